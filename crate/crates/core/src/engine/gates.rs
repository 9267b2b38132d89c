//! Comparison-family gates, division, and the k-th ranked element.
//!
//! Everything here reduces to the LSB gate. For operands bounded by the
//! magnitude bound M (with p > 2(M+1)):
//!
//! ```text
//! 1_{u<v} = LSB(2(u−v) mod p)
//! ```
//!
//! since 2(u−v) is even when u ≥ v and p−2(v−u) is odd when u < v.
//! LSB(x) for any x in [0, p) opens the uniformly masked c = x + r from
//! a dealer solved random, computes the wrap bit w = 1_{c<r} with a
//! public/shared bitwise prefix scan over r's bit sharings, and returns
//! c₀ ⊕ r₀ ⊕ w.

use alloc::vec::Vec;

use super::{Engine, GateKind, OpenLog};
use crate::shamir::Sharing;

impl Engine {
    /// Sharing of the least significant bit of x, x in [0, p).
    pub fn lsb(&mut self, x: &Sharing) -> Sharing {
        let start = self.begin_gate(GateKind::Lsb);
        let (r, r_bits) = self.dealer_solved_random();
        let masked = self.add(x, &r);
        let c = self.open_all(&masked, OpenLog::Masked);
        let wrap = self.lt_bits_public(c, &r_bits);
        // y = c0 XOR r0 is affine in r0 because c0 is public.
        let y = if c & 1 == 0 {
            r_bits[0].clone()
        } else {
            self.not(&r_bits[0])
        };
        let yw = self.mul(&y, &wrap);
        let one = self.modulus().one();
        let two = self.modulus().element(2);
        let result = self.lincomb(
            &[(one, &y), (one, &wrap), (two.neg(), &yw)],
            self.modulus().zero(),
        );
        self.end_gate(GateKind::Lsb, start);
        result
    }

    /// 1_{c < r} for public c and bit-shared r, MSB-down prefix scan.
    /// One multiplication per bit position.
    fn lt_bits_public(&mut self, c: u64, r_bits: &[Sharing]) -> Sharing {
        let mut acc = self.constant(0);
        let mut prefix = self.constant(1);
        for j in (0..r_bits.len()).rev() {
            let c_j = (c >> j) & 1;
            if c_j == 0 {
                // c_j = 0, r_j = 1 decides c < r; equality keeps 1 − r_j.
                let term = self.mul(&prefix, &r_bits[j]);
                acc = self.add(&acc, &term);
                if j > 0 {
                    prefix = self.sub(&prefix, &term);
                }
            } else if j > 0 {
                // c_j = 1: only r_j = 1 keeps the prefix equal.
                prefix = self.mul(&prefix, &r_bits[j]);
            }
        }
        acc
    }

    /// Sharing of 1_{u<v}; both operands must lie in [0, M].
    pub fn lt(&mut self, u: &Sharing, v: &Sharing) -> Sharing {
        let start = self.begin_gate(GateKind::Lt);
        let two = self.modulus().element(2);
        let diff = self.lincomb(&[(two, u), (two.neg(), v)], self.modulus().zero());
        let result = self.lsb(&diff);
        self.end_gate(GateKind::Lt, start);
        result
    }

    /// Sharing of 1_{u≤v} via 1_{u<v+1} on integers.
    pub fn le(&mut self, u: &Sharing, v: &Sharing) -> Sharing {
        let v_plus = self.add_const(v, 1);
        self.lt(u, &v_plus)
    }

    /// Sharing of 1_{u=0}; u must lie in [0, M].
    pub fn eq_zero(&mut self, u: &Sharing) -> Sharing {
        let start = self.begin_gate(GateKind::EqZero);
        let zero = self.constant(0);
        let positive = self.lt(&zero, u);
        let result = self.not(&positive);
        self.end_gate(GateKind::EqZero, start);
        result
    }

    /// Sharing of 1_{x=y} for values whose difference squares below M.
    pub fn eq_small(&mut self, x: &Sharing, y: &Sharing) -> Sharing {
        let d = self.sub(x, y);
        let sq = self.mul(&d, &d);
        self.eq_zero(&sq)
    }

    /// min(u,v) = v + 1_{u<v}·(u−v).
    pub fn min(&mut self, u: &Sharing, v: &Sharing) -> Sharing {
        let start = self.begin_gate(GateKind::Min);
        let b = self.lt(u, v);
        let d = self.sub(u, v);
        let bd = self.mul(&b, &d);
        let result = self.add(v, &bd);
        self.end_gate(GateKind::Min, start);
        result
    }

    /// max(u,v) = u + 1_{u<v}·(v−u).
    pub fn max(&mut self, u: &Sharing, v: &Sharing) -> Sharing {
        let start = self.begin_gate(GateKind::Max);
        let b = self.lt(u, v);
        let d = self.sub(v, u);
        let bd = self.mul(&b, &d);
        let result = self.add(u, &bd);
        self.end_gate(GateKind::Max, start);
        result
    }

    /// u ∨ v = u + v − u·v for shared bits.
    pub fn or(&mut self, u: &Sharing, v: &Sharing) -> Sharing {
        let start = self.begin_gate(GateKind::Or);
        let uv = self.mul(u, v);
        let one = self.modulus().one();
        let result = self.lincomb(&[(one, u), (one, v), (one.neg(), &uv)], self.modulus().zero());
        self.end_gate(GateKind::Or, start);
        result
    }

    /// Left fold of [`or`](Self::or) over a non-empty bit sequence.
    pub fn or_many(&mut self, bits: &[Sharing]) -> Sharing {
        let mut acc = bits[0].clone();
        for b in &bits[1..] {
            acc = self.or(&acc, b);
        }
        acc
    }

    /// ⌊x/2⌋ = (p+1)/2 · (x − LSB(x)); x in [0, M].
    pub fn halve(&mut self, x: &Sharing) -> Sharing {
        let start = self.begin_gate(GateKind::Halve);
        let b = self.lsb(x);
        let inv2 = self.modulus().inv2();
        let result = self.lincomb(&[(inv2, x), (inv2.neg(), &b)], self.modulus().zero());
        self.end_gate(GateKind::Halve, start);
        result
    }

    /// LSB-first bit sharings of x, for x publicly bounded by 2^width.
    /// Peels one LSB per step and halves exactly.
    pub fn bit_decompose(&mut self, x: &Sharing, width: u32) -> Vec<Sharing> {
        let start = self.begin_gate(GateKind::BitDecompose);
        let inv2 = self.modulus().inv2();
        let mut bits = Vec::with_capacity(width as usize);
        let mut cur = x.clone();
        for _ in 0..width {
            let b = self.lsb(&cur);
            cur = self.lincomb(&[(inv2, &cur), (inv2.neg(), &b)], self.modulus().zero());
            bits.push(b);
        }
        self.end_gate(GateKind::BitDecompose, start);
        bits
    }

    /// Secure binary long division. `u_bits` is an LSB-first bit sharing
    /// of the numerator (width = its public magnitude bound); `v` the
    /// positive divisor, with 2v ≤ M. Returns (⌊u/v⌋, u mod v, quotient
    /// bits LSB-first).
    pub fn secure_div(
        &mut self,
        u_bits: &[Sharing],
        v: &Sharing,
    ) -> (Sharing, Sharing, Vec<Sharing>) {
        let start = self.begin_gate(GateKind::Div);
        let mut q = self.constant(0);
        let mut r = self.constant(0);
        let two = self.modulus().element(2);
        let one = self.modulus().one();
        let mut q_bits = alloc::vec![self.constant(0); u_bits.len()];
        for j in (0..u_bits.len()).rev() {
            r = self.lincomb(&[(two, &r), (one, &u_bits[j])], self.modulus().zero());
            let below = self.lt(&r, v);
            let q_j = self.not(&below);
            let qv = self.mul(&q_j, v);
            r = self.sub(&r, &qv);
            q = self.lincomb(&[(two, &q), (one, &q_j)], self.modulus().zero());
            q_bits[j] = q_j;
        }
        self.end_gate(GateKind::Div, start);
        (q, r, q_bits)
    }

    /// Sharing of the k-th smallest value (1-based, counting duplicates)
    /// of a shared dataset bounded by 2^h ≤ M+1: bisection on the
    /// strict-less count, then a one-step correction.
    pub fn kth_ranked(&mut self, data: &[Sharing], k: u32, h: u32) -> Sharing {
        assert!(k >= 1 && (k as usize) <= data.len(), "rank out of range");
        let start = self.begin_gate(GateKind::KthRanked);
        let mut alpha = self.constant(1u64 << (h - 1));
        for i in (1..h).rev() {
            let kappa = self.count_below(data, &alpha);
            let k_const = self.constant(k as u64);
            let lam = self.lt(&kappa, &k_const);
            // α ← λ(α + 2^{i−1}) + (1−λ)(α − 2^{i−1}), with the λ·α
            // cross terms cancelling into an affine update.
            let step = self.modulus().element(1u64 << (i - 1));
            let double_step = self.modulus().element(1u64 << i);
            alpha = self.lincomb(&[(self.modulus().one(), &alpha), (double_step, &lam)], step.neg());
        }
        // α now sits on M_k or M_k+1; the strict count tells which.
        let kappa = self.count_below(data, &alpha);
        let k_minus = self.constant(k as u64 - 1);
        let lam = self.lt(&k_minus, &kappa);
        let result = self.sub(&alpha, &lam);
        self.end_gate(GateKind::KthRanked, start);
        result
    }

    /// Σ_j 1_{u_j < α}.
    fn count_below(&mut self, data: &[Sharing], alpha: &Sharing) -> Sharing {
        let mut acc = self.constant(0);
        for u_j in data {
            let below = self.lt(u_j, alpha);
            acc = self.add(&acc, &below);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use crate::engine::{Engine, EngineConfig, GateKind, OpenLog};
    use crate::field::PrimeModulus;
    use crate::shamir::{self, PartyId, Sharing};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    /// Engine over the smallest prime exceeding 2(M+1).
    fn test_engine(n: u32, magnitude: u64, seed: u64) -> Engine {
        let modulus = PrimeModulus::next_prime_above(2 * magnitude + 2).unwrap();
        Engine::new(EngineConfig {
            parties: n,
            modulus,
            magnitude_bound: magnitude,
            seed,
            record_messages: false,
        })
    }

    fn dealer_input(eng: &mut Engine, v: u64) -> Sharing {
        eng.input_share(PartyId(1), v)
    }

    #[test]
    fn affine_is_local_and_matches_plaintext() {
        let mut eng = test_engine(4, 1000, 1);
        let p = eng.modulus().prime();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let before = eng.transcript().total_messages();
        let u = dealer_input(&mut eng, 0);
        let v = dealer_input(&mut eng, 0);
        let share_msgs = eng.transcript().total_messages() - before;
        assert_eq!(share_msgs, 2 * 3);
        for _ in 0..1000 {
            let (a, b, g) = (rng.gen_range(0..p), rng.gen_range(0..p), rng.gen_range(0..p));
            let (x, y) = (rng.gen_range(0..p), rng.gen_range(0..p));
            let sx = eng.input_share(PartyId(1), x);
            let sy = eng.input_share(PartyId(2), y);
            let msgs_before = eng.transcript().total_messages();
            let w = eng.affine_combine(a, b, g, &sx, &sy);
            assert_eq!(eng.transcript().total_messages(), msgs_before);
            let expect =
                ((a as u128 + b as u128 * x as u128 + g as u128 * y as u128) % p as u128) as u64;
            assert_eq!(eng.peek(&w), expect);
        }
        let _ = (u, v);
    }

    #[test]
    fn mul_exhaustive_p61() {
        let modulus = PrimeModulus::new(61).unwrap();
        let mut eng = Engine::new(EngineConfig {
            parties: 3,
            modulus,
            magnitude_bound: 30,
            seed: 3,
            record_messages: false,
        });
        for u in 0..30u64 {
            for v in 0..30u64 {
                let su = eng.input_share(PartyId(1), u);
                let sv = eng.input_share(PartyId(2), v);
                let before = eng.transcript().total_messages();
                let w = eng.mul(&su, &sv);
                assert_eq!(eng.transcript().total_messages() - before, 3 * 2);
                assert_eq!(eng.peek(&w), u * v % 61);
            }
        }
    }

    #[test]
    fn mul_output_degree_at_most_t_minus_1() {
        // All C(n,t) reconstruction subsets of a product sharing agree.
        let mut eng = test_engine(5, 100, 4);
        let su = dealer_input(&mut eng, 17);
        let sv = eng.input_share(PartyId(2), 23);
        let w = eng.mul(&su, &sv);
        let params = eng.params();
        let expect = 17 * 23 % eng.modulus().prime();
        for a in 1..=5u32 {
            for b in a + 1..=5 {
                for c in b + 1..=5 {
                    let pts = [
                        (PartyId(a), w.share(PartyId(a))),
                        (PartyId(b), w.share(PartyId(b))),
                        (PartyId(c), w.share(PartyId(c))),
                    ];
                    assert_eq!(shamir::reconstruct(&pts, params).unwrap().value(), expect);
                }
            }
        }
    }

    #[test]
    fn lt_exhaustive_64() {
        for n in [3u32, 5] {
            let mut eng = test_engine(n, 64, 5);
            for u in 0..64u64 {
                for v in 0..64u64 {
                    let su = dealer_input(&mut eng, u);
                    let sv = eng.input_share(PartyId(2), v);
                    let b = eng.lt(&su, &sv);
                    assert_eq!(eng.peek(&b), u64::from(u < v), "{u} < {v} at n={n}");
                }
            }
        }
    }

    #[test]
    fn le_and_boundary() {
        let mut eng = test_engine(3, 64, 6);
        for (u, v) in [(2u64, 5u64), (5, 5), (5, 2), (0, 0), (63, 64), (64, 63), (64, 64)] {
            let su = dealer_input(&mut eng, u);
            let sv = eng.input_share(PartyId(2), v);
            let b = eng.le(&su, &sv);
            assert_eq!(eng.peek(&b), u64::from(u <= v), "{u} <= {v}");
        }
    }

    #[test]
    fn eq_zero_exhaustive_64() {
        let mut eng = test_engine(3, 64, 7);
        for u in 0..64u64 {
            let su = dealer_input(&mut eng, u);
            let b = eng.eq_zero(&su);
            assert_eq!(eng.peek(&b), u64::from(u == 0));
        }
    }

    #[test]
    fn min_max_random_pairs() {
        let mut eng = test_engine(3, 1000, 8);
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for _ in 0..300 {
            let u = rng.gen_range(0..=1000u64);
            let v = rng.gen_range(0..=1000u64);
            let su = dealer_input(&mut eng, u);
            let sv = eng.input_share(PartyId(2), v);
            let mn = eng.min(&su, &sv);
            let mx = eng.max(&su, &sv);
            assert_eq!(eng.peek(&mn), u.min(v));
            assert_eq!(eng.peek(&mx), u.max(v));
        }
        // min(x,x) = x and min(0,v) = 0.
        let sx = dealer_input(&mut eng, 123);
        let mn = eng.min(&sx.clone(), &sx);
        assert_eq!(eng.peek(&mn), 123);
        let z = eng.constant(0);
        let sv = dealer_input(&mut eng, 77);
        let mn = eng.min(&z, &sv);
        assert_eq!(eng.peek(&mn), 0);
    }

    #[test]
    fn or_truth_table_and_folds() {
        let mut eng = test_engine(3, 64, 10);
        for (u, v) in [(0u64, 0u64), (0, 1), (1, 0), (1, 1)] {
            let su = dealer_input(&mut eng, u);
            let sv = eng.input_share(PartyId(2), v);
            let b = eng.or(&su, &sv);
            assert_eq!(eng.peek(&b), u | v);
        }
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..100 {
            let bits: Vec<u64> = (0..6).map(|_| rng.gen_range(0..2u64)).collect();
            let shared: Vec<Sharing> = bits.iter().map(|&b| dealer_input(&mut eng, b)).collect();
            let folded = eng.or_many(&shared);
            assert_eq!(eng.peek(&folded), bits.iter().copied().fold(0, |a, b| a | b));
        }
    }

    #[test]
    fn lsb_and_halve_exhaustive_128() {
        let mut eng = test_engine(3, 128, 12);
        for x in 0..128u64 {
            let sx = dealer_input(&mut eng, x);
            let b = eng.lsb(&sx);
            assert_eq!(eng.peek(&b), x & 1, "lsb({x})");
            let h = eng.halve(&sx);
            assert_eq!(eng.peek(&h), x / 2, "halve({x})");
        }
    }

    #[test]
    fn bit_decompose_round_trip() {
        let mut eng = test_engine(3, 1 << 12, 13);
        let mut rng = ChaCha20Rng::seed_from_u64(14);
        for _ in 0..200 {
            let x = rng.gen_range(0..(1u64 << 12));
            let sx = dealer_input(&mut eng, x);
            let bits = eng.bit_decompose(&sx, 12);
            let mut acc = 0u64;
            for (j, b) in bits.iter().enumerate() {
                acc += eng.peek(b) << j;
            }
            assert_eq!(acc, x);
        }
        let zero = dealer_input(&mut eng, 0);
        let bits = eng.bit_decompose(&zero, 12);
        assert!(bits.iter().all(|b| eng.peek(b) == 0));
    }

    #[test]
    fn secure_div_exhaustive() {
        let mut eng = test_engine(3, 128, 15);
        for u in 0..128u64 {
            for v in 1..16u64 {
                let su = dealer_input(&mut eng, u);
                let u_bits = eng.bit_decompose(&su, 7);
                let sv = eng.input_share(PartyId(2), v);
                let (q, r, q_bits) = eng.secure_div(&u_bits, &sv);
                assert_eq!(eng.peek(&q), u / v, "{u}/{v}");
                assert_eq!(eng.peek(&r), u % v, "{u}%{v}");
                let mut acc = 0u64;
                for (j, b) in q_bits.iter().enumerate() {
                    acc += eng.peek(b) << j;
                }
                assert_eq!(acc, u / v);
            }
        }
    }

    #[test]
    fn kth_ranked_examples_and_duplicates() {
        let mut eng = test_engine(3, 64, 16);
        let share_all = |eng: &mut Engine, vs: &[u64]| -> Vec<Sharing> {
            vs.iter().map(|&v| eng.input_share(PartyId(1), v)).collect()
        };
        let data = share_all(&mut eng, &[3, 1, 2]);
        let m1 = eng.kth_ranked(&data, 1, 2);
        assert_eq!(eng.peek(&m1), 1);
        let m2 = eng.kth_ranked(&data, 2, 2);
        assert_eq!(eng.peek(&m2), 2);
        let m3 = eng.kth_ranked(&data, 3, 2);
        assert_eq!(eng.peek(&m3), 3);

        // Duplicate-heavy datasets that break the uncorrected bisection.
        let data = share_all(&mut eng, &[0, 0]);
        for k in 1..=2 {
            let m = eng.kth_ranked(&data, k, 3);
            assert_eq!(eng.peek(&m), 0, "k={k} of [0,0]");
        }
        let data = share_all(&mut eng, &[0, 2]);
        let m = eng.kth_ranked(&data, 1, 3);
        assert_eq!(eng.peek(&m), 0);
        let data = share_all(&mut eng, &[0, 0, 5, 5]);
        for (k, want) in [(1, 0), (2, 0), (3, 5), (4, 5)] {
            let m = eng.kth_ranked(&data, k, 3);
            assert_eq!(eng.peek(&m), want, "k={k} of [0,0,5,5]");
        }
    }

    #[test]
    fn kth_ranked_random_multisets_vs_sort() {
        let mut eng = test_engine(3, 64, 17);
        let mut rng = ChaCha20Rng::seed_from_u64(18);
        for _ in 0..100 {
            let m = rng.gen_range(1..=9usize);
            let h = 6u32;
            let vals: Vec<u64> = (0..m).map(|_| rng.gen_range(0..(1 << h))).collect();
            let data: Vec<Sharing> = vals.iter().map(|&v| eng.input_share(PartyId(2), v)).collect();
            let mut sorted = vals.clone();
            sorted.sort_unstable();
            for k in 1..=m {
                let got = eng.kth_ranked(&data, k as u32, h);
                assert_eq!(eng.peek(&got), sorted[k - 1], "vals={vals:?} k={k}");
            }
        }
    }

    #[test]
    fn open_to_is_directed_and_open_all_broadcasts() {
        let mut eng = test_engine(5, 64, 19);
        eng.transcript_mut();
        let mut eng = Engine::new(EngineConfig {
            parties: 5,
            modulus: eng.modulus(),
            magnitude_bound: 64,
            seed: 19,
            record_messages: true,
        });
        let sx = eng.input_share(PartyId(1), 42);
        let before = eng.transcript().messages.len();
        let v = eng.open_to(PartyId(4), &sx, OpenLog::Output("test"));
        assert_eq!(v, 42);
        let directed = &eng.transcript().messages[before..];
        // t−1 = 2 messages, all addressed to the target.
        assert_eq!(directed.len(), 2);
        assert!(directed.iter().all(|m| m.to == PartyId(4)));

        let before = eng.transcript().messages.len();
        let v = eng.open_all(&sx, OpenLog::Guard("test_guard", None));
        assert_eq!(v, 42);
        // first t = 3 parties send to the other 4 each.
        assert_eq!(eng.transcript().messages.len() - before, 3 * 4);
    }

    #[test]
    fn dealer_bits_are_bits() {
        let mut eng = test_engine(3, 64, 20);
        let mut seen = [false; 2];
        for _ in 0..64 {
            let b = eng.dealer_random_bit();
            let v = eng.peek(&b);
            assert!(v <= 1);
            seen[v as usize] = true;
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn mul_output_share_marginal_uniform() {
        // n=3, t=2: any single party's share of a product sharing is
        // uniform. 4000 samples, 16 buckets, dof 15, alpha 1e-3 -> 37.697.
        let mut eng = test_engine(3, 1000, 21);
        let p = eng.modulus().prime();
        const BUCKETS: usize = 16;
        let mut counts = [0u32; BUCKETS];
        let su = dealer_input(&mut eng, 700);
        let sv = eng.input_share(PartyId(2), 900);
        for _ in 0..4000 {
            let w = eng.mul(&su, &sv);
            let share = w.share(PartyId(3)).value();
            counts[(share as u128 * BUCKETS as u128 / p as u128) as usize] += 1;
        }
        let expected = 4000.0 / BUCKETS as f64;
        let stat: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(stat < 37.697, "chi2 = {stat}");
    }

    #[test]
    fn gate_counters_accumulate() {
        let mut eng = test_engine(3, 64, 22);
        let su = dealer_input(&mut eng, 5);
        let sv = eng.input_share(PartyId(2), 9);
        let _ = eng.lt(&su, &sv);
        let t = eng.transcript();
        assert_eq!(t.counter(GateKind::Lt).invocations, 1);
        assert_eq!(t.counter(GateKind::Lsb).invocations, 1);
        assert_eq!(t.counter(GateKind::DealerSolved).invocations, 1);
        assert!(t.counter(GateKind::Mul).invocations > 0);
        assert_eq!(
            t.counter(GateKind::Mul).messages,
            t.counter(GateKind::Mul).invocations * 6
        );
    }
}
