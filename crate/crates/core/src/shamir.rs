//! Shamir threshold secret sharing with t = ⌊(n+1)/2⌋.
//!
//! Share evaluation points are the public party indices 1..n, so any t
//! parties can reconstruct by Lagrange interpolation at zero while any
//! t−1 shares are jointly uniform.

use alloc::vec::Vec;
use core::fmt;

use rand_core::RngCore;

use crate::field::{FieldElement, PrimeModulus};

/// One-based party index; doubles as the agent index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartyId(pub u32);

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.0)
    }
}

/// Party count and reconstruction threshold, tied by t = ⌊(n+1)/2⌋.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShareParams {
    n: u32,
    t: u32,
}

/// Errors raised by sharing and reconstruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShamirError {
    /// Party count below two.
    TooFewParties(u32),
    /// Fewer than t share points supplied to reconstruct.
    NotEnoughShares { got: usize, need: u32 },
    /// The same party index appeared twice in a reconstruction subset.
    DuplicateParty(PartyId),
    /// A share point carried an index outside 1..n.
    BadPartyIndex(PartyId),
}

impl fmt::Display for ShamirError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShamirError::TooFewParties(n) => write!(f, "need at least 2 parties, got {n}"),
            ShamirError::NotEnoughShares { got, need } => {
                write!(f, "need at least {need} shares to reconstruct, got {got}")
            }
            ShamirError::DuplicateParty(id) => write!(f, "duplicate share point for {id}"),
            ShamirError::BadPartyIndex(id) => write!(f, "party index {id} out of range"),
        }
    }
}

impl core::error::Error for ShamirError {}

impl ShareParams {
    /// Builds the honest-majority parameters for `n` parties.
    pub fn new(n: u32) -> Result<Self, ShamirError> {
        if n < 2 {
            return Err(ShamirError::TooFewParties(n));
        }
        Ok(ShareParams { n, t: (n + 1) / 2 })
    }

    #[inline]
    pub fn parties(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn threshold(&self) -> u32 {
        self.t
    }

    /// Iterator over all party ids 1..=n.
    pub fn party_ids(&self) -> impl Iterator<Item = PartyId> {
        (1..=self.n).map(PartyId)
    }
}

/// The n-vector of per-party shares of one secret.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sharing {
    shares: Vec<FieldElement>,
    params: ShareParams,
}

impl Sharing {
    /// Share held by `id`.
    #[inline]
    pub fn share(&self, id: PartyId) -> FieldElement {
        self.shares[(id.0 - 1) as usize]
    }

    #[inline]
    pub fn params(&self) -> ShareParams {
        self.params
    }

    /// All shares in party order 1..n.
    #[inline]
    pub fn shares(&self) -> &[FieldElement] {
        &self.shares
    }

    /// Assembles a sharing from per-party shares in index order.
    pub fn from_shares(shares: Vec<FieldElement>, params: ShareParams) -> Self {
        debug_assert_eq!(shares.len(), params.n as usize);
        Sharing { shares, params }
    }
}

/// Samples a uniformly random polynomial of degree ≤ t−1 with constant
/// term `secret` and evaluates it at the party indices.
pub fn share(secret: FieldElement, params: ShareParams, rng: &mut dyn RngCore) -> Sharing {
    let modulus = secret.modulus();
    let mut coeffs = Vec::with_capacity(params.t as usize);
    coeffs.push(secret);
    for _ in 1..params.t {
        coeffs.push(random_element(modulus, rng));
    }
    let shares = (1..=params.n)
        .map(|i| eval_poly(&coeffs, modulus.element(i as u64)))
        .collect();
    Sharing {
        shares,
        params,
    }
}

/// Every party holds the public value itself; a valid (t,n)-sharing of
/// any public constant.
pub fn constant_sharing(alpha: FieldElement, params: ShareParams) -> Sharing {
    Sharing {
        shares: alloc::vec![alpha; params.n as usize],
        params,
    }
}

/// Interpolates f(0) from at least t distinct share points.
pub fn reconstruct(
    points: &[(PartyId, FieldElement)],
    params: ShareParams,
) -> Result<FieldElement, ShamirError> {
    if points.len() < params.t as usize {
        return Err(ShamirError::NotEnoughShares {
            got: points.len(),
            need: params.t,
        });
    }
    let used = &points[..params.t as usize];
    let mut seen = alloc::vec![false; params.n as usize + 1];
    for (id, _) in used {
        if id.0 == 0 || id.0 > params.n {
            return Err(ShamirError::BadPartyIndex(*id));
        }
        if seen[id.0 as usize] {
            return Err(ShamirError::DuplicateParty(*id));
        }
        seen[id.0 as usize] = true;
    }
    let modulus = used[0].1.modulus();
    let mut acc = modulus.zero();
    for (j, &(id_j, y_j)) in used.iter().enumerate() {
        let mut num = modulus.one();
        let mut den = modulus.one();
        let x_j = modulus.element(id_j.0 as u64);
        for (m, &(id_m, _)) in used.iter().enumerate() {
            if m == j {
                continue;
            }
            let x_m = modulus.element(id_m.0 as u64);
            num = num.mul(x_m.neg());
            den = den.mul(x_j.sub(x_m));
        }
        let lagrange = num.mul(den.inv().expect("distinct points"));
        acc = acc.add(y_j.mul(lagrange));
    }
    Ok(acc)
}

/// Convenience: reconstruct from the first t shares of a full sharing.
pub fn reconstruct_full(sharing: &Sharing) -> FieldElement {
    let params = sharing.params();
    let points: Vec<_> = (1..=params.t)
        .map(|i| (PartyId(i), sharing.share(PartyId(i))))
        .collect();
    reconstruct(&points, params).expect("full sharing has t distinct points")
}

/// Lagrange coefficients at zero for the full point set 1..n, used by
/// the degree-reduction step of secure multiplication.
pub fn lagrange_at_zero(modulus: PrimeModulus, n: u32) -> Vec<FieldElement> {
    (1..=n)
        .map(|j| {
            let x_j = modulus.element(j as u64);
            let mut num = modulus.one();
            let mut den = modulus.one();
            for m in 1..=n {
                if m == j {
                    continue;
                }
                let x_m = modulus.element(m as u64);
                num = num.mul(x_m.neg());
                den = den.mul(x_j.sub(x_m));
            }
            num.mul(den.inv().expect("distinct points"))
        })
        .collect()
}

/// Uniform field element by rejection sampling on the top bits.
pub fn random_element(modulus: PrimeModulus, rng: &mut dyn RngCore) -> FieldElement {
    let shift = 64 - modulus.bits();
    loop {
        let candidate = rng.next_u64() >> shift;
        if candidate < modulus.prime() {
            return modulus.element(candidate);
        }
    }
}

fn eval_poly(coeffs: &[FieldElement], x: FieldElement) -> FieldElement {
    let mut acc = x.modulus().zero();
    for &c in coeffs.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn modulus() -> PrimeModulus {
        PrimeModulus::new(1_000_003).unwrap()
    }

    #[test]
    fn threshold_formula() {
        for (n, t) in [(2, 1), (3, 2), (4, 2), (5, 3), (6, 3), (7, 4)] {
            assert_eq!(ShareParams::new(n).unwrap().threshold(), t);
        }
        assert_eq!(
            ShareParams::new(1).unwrap_err(),
            ShamirError::TooFewParties(1)
        );
    }

    #[test]
    fn n2_degenerates_to_broadcast() {
        let f = modulus();
        let params = ShareParams::new(2).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let s = share(f.element(42), params, &mut rng);
        assert_eq!(s.share(PartyId(1)).value(), 42);
        assert_eq!(s.share(PartyId(2)).value(), 42);
        let single = reconstruct(&[(PartyId(2), s.share(PartyId(2)))], params).unwrap();
        assert_eq!(single.value(), 42);
    }

    #[test]
    fn round_trip_random_secrets() {
        let f = modulus();
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for n in [3u32, 4, 5] {
            let params = ShareParams::new(n).unwrap();
            for _ in 0..1000 {
                let secret = random_element(f, &mut rng);
                let sharing = share(secret, params, &mut rng);
                assert_eq!(reconstruct_full(&sharing), secret);
            }
        }
    }

    #[test]
    fn all_t_subsets_agree_n5() {
        let f = modulus();
        let params = ShareParams::new(5).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        let secret = f.element(271_828);
        let sharing = share(secret, params, &mut rng);
        let ids: Vec<u32> = (1..=5).collect();
        let mut checked = 0;
        for a in 0..5 {
            for b in a + 1..5 {
                for c in b + 1..5 {
                    let pts = [
                        (PartyId(ids[a]), sharing.share(PartyId(ids[a]))),
                        (PartyId(ids[b]), sharing.share(PartyId(ids[b]))),
                        (PartyId(ids[c]), sharing.share(PartyId(ids[c]))),
                    ];
                    assert_eq!(reconstruct(&pts, params).unwrap(), secret);
                    checked += 1;
                }
            }
        }
        assert_eq!(checked, 10);
    }

    #[test]
    fn explicit_degree_two_interpolation() {
        // Shares (1,f(1)),(2,f(2)),(3,f(3)) of f(x) = 5 + 3x + 2x^2.
        let f = modulus();
        let params = ShareParams::new(5).unwrap();
        let poly = |x: u64| (5 + 3 * x + 2 * x * x) % f.prime();
        let pts = [
            (PartyId(1), f.element(poly(1))),
            (PartyId(2), f.element(poly(2))),
            (PartyId(3), f.element(poly(3))),
        ];
        assert_eq!(reconstruct(&pts, params).unwrap().value(), 5);
    }

    #[test]
    fn reconstruction_errors() {
        let f = modulus();
        let params = ShareParams::new(5).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        let sharing = share(f.element(9), params, &mut rng);
        let p1 = (PartyId(1), sharing.share(PartyId(1)));
        let p2 = (PartyId(2), sharing.share(PartyId(2)));
        assert_eq!(
            reconstruct(&[p1, p2], params).unwrap_err(),
            ShamirError::NotEnoughShares { got: 2, need: 3 }
        );
        assert_eq!(
            reconstruct(&[p1, p1, p2], params).unwrap_err(),
            ShamirError::DuplicateParty(PartyId(1))
        );
    }

    #[test]
    fn constant_sharing_is_constant_and_reconstructs() {
        let f = modulus();
        let params = ShareParams::new(4).unwrap();
        let zero = constant_sharing(f.element(0), params);
        assert!(zero.shares().iter().all(|s| s.value() == 0));
        let c = constant_sharing(f.element(77), params);
        assert_eq!(reconstruct_full(&c).value(), 77);
    }

    #[test]
    fn affine_on_constant_sharings_matches_plaintext() {
        let f = modulus();
        let params = ShareParams::new(3).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        for _ in 0..200 {
            let a = random_element(f, &mut rng);
            let b = random_element(f, &mut rng);
            let alpha = random_element(f, &mut rng);
            let beta = random_element(f, &mut rng);
            let sa = constant_sharing(a, params);
            let sb = constant_sharing(b, params);
            let combined: Vec<FieldElement> = sa
                .shares()
                .iter()
                .zip(sb.shares())
                .map(|(x, y)| alpha.add(beta.mul(*x)).add(y.neg()))
                .collect();
            let got = reconstruct_full(&Sharing::from_shares(combined, params));
            assert_eq!(got, alpha.add(beta.mul(a)).sub(b));
        }
    }

    #[test]
    fn single_share_marginal_uniform_chi_square() {
        // n=5, t=3, fixed secret, 10k sharings: each single-party marginal
        // bucketed into 32 ranges. dof = 31, alpha = 0.001 -> 61.098.
        let f = modulus();
        let params = ShareParams::new(5).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        let secret = f.element(123_456);
        const SAMPLES: usize = 10_000;
        const BUCKETS: usize = 32;
        let mut counts = [[0u32; BUCKETS]; 5];
        for _ in 0..SAMPLES {
            let sharing = share(secret, params, &mut rng);
            for i in 0..5 {
                let v = sharing.share(PartyId(i as u32 + 1)).value();
                let bucket = (v as u128 * BUCKETS as u128 / f.prime() as u128) as usize;
                counts[i][bucket] += 1;
            }
        }
        let expected = SAMPLES as f64 / BUCKETS as f64;
        for (i, row) in counts.iter().enumerate() {
            let stat: f64 = row
                .iter()
                .map(|&c| {
                    let d = c as f64 - expected;
                    d * d / expected
                })
                .sum();
            assert!(stat < 61.098, "party {} marginal chi2 = {stat}", i + 1);
        }
    }
}
