//! Plaintext piecewise-uniform valuations: validation, lossless decimal
//! quantization to the integer grid [0, Q], and exact measures.
//!
//! Endpoints are exact rationals end to end; floating point never
//! touches this layer, so envy-freeness assertions compare exactly.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;
use num_traits::{Signed, Zero};

/// Exact rational with enough headroom for every supported run
/// (denominators divide n!·Q, products stay far below i128).
pub type Frac = Ratio<i128>;

/// A density that is a positive constant on finitely many disjoint
/// half-open intervals of [0,1) and zero elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseUniformValuation {
    intervals: Vec<(Frac, Frac)>,
}

/// An agent's quantized valuation: 2ℓ ordered integer endpoints in
/// [0, Q], padded with the empty interval [Q, Q] beyond `ell`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerValuation {
    /// Interleaved a_1, b_1, …, a_L, b_L.
    pub endpoints: Vec<u64>,
    pub q: u64,
    /// True interval count before padding.
    pub ell: usize,
}

/// Violations reported by [`PiecewiseUniformValuation::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValuationError {
    /// An interval has b < a.
    Reversal { index: usize },
    /// Consecutive intervals overlap (a_{j+1} < b_j).
    Overlap { index: usize },
    /// An endpoint lies outside [0, 1].
    OutOfRange { index: usize },
    /// The support has zero total length, so the density cannot normalize.
    EmptySupport,
    /// No intervals at all.
    NoIntervals,
    /// An endpoint is not a terminating decimal, so no Q = 10^d is lossless.
    NonDecimalEndpoint { index: usize },
}

impl fmt::Display for ValuationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValuationError::Reversal { index } => {
                write!(f, "interval {index} has reversed endpoints")
            }
            ValuationError::Overlap { index } => {
                write!(f, "interval {index} overlaps its predecessor")
            }
            ValuationError::OutOfRange { index } => {
                write!(f, "interval {index} leaves [0,1]")
            }
            ValuationError::EmptySupport => write!(f, "support has zero total length"),
            ValuationError::NoIntervals => write!(f, "valuation has no intervals"),
            ValuationError::NonDecimalEndpoint { index } => {
                write!(f, "interval {index} has a non-terminating-decimal endpoint")
            }
        }
    }
}

impl core::error::Error for ValuationError {}

impl PiecewiseUniformValuation {
    /// Builds and validates a valuation from sorted half-open intervals.
    pub fn new(intervals: Vec<(Frac, Frac)>) -> Result<Self, ValuationError> {
        let v = PiecewiseUniformValuation { intervals };
        v.validate()?;
        Ok(v)
    }

    pub fn intervals(&self) -> &[(Frac, Frac)] {
        &self.intervals
    }

    /// Number of support intervals ℓ.
    pub fn ell(&self) -> usize {
        self.intervals.len()
    }

    /// Accepts iff 0 ≤ a_1 ≤ b_1 ≤ a_2 ≤ … ≤ b_ℓ ≤ 1 and the support
    /// length is positive; names the first violation otherwise.
    pub fn validate(&self) -> Result<(), ValuationError> {
        if self.intervals.is_empty() {
            return Err(ValuationError::NoIntervals);
        }
        let zero = Frac::zero();
        let one = Frac::from_integer(1);
        let mut prev_end = zero;
        for (j, (a, b)) in self.intervals.iter().enumerate() {
            if a < &zero || b > &one {
                return Err(ValuationError::OutOfRange { index: j });
            }
            if b < a {
                return Err(ValuationError::Reversal { index: j });
            }
            if a < &prev_end {
                return Err(ValuationError::Overlap { index: j });
            }
            prev_end = *b;
        }
        if self.support_length().is_zero() {
            return Err(ValuationError::EmptySupport);
        }
        Ok(())
    }

    /// Total length of the support.
    pub fn support_length(&self) -> Frac {
        self.intervals
            .iter()
            .map(|(a, b)| *b - *a)
            .fold(Frac::zero(), |acc, l| acc + l)
    }

    /// Decimal digits needed to express every endpoint exactly, or the
    /// offending endpoint if one is not a terminating decimal.
    pub fn decimal_digits(&self) -> Result<u32, ValuationError> {
        let mut digits = 0;
        for (j, (a, b)) in self.intervals.iter().enumerate() {
            for x in [a, b] {
                match terminating_digits(x) {
                    Some(d) => digits = digits.max(d),
                    None => return Err(ValuationError::NonDecimalEndpoint { index: j }),
                }
            }
        }
        Ok(digits)
    }

    /// Quantizes each endpoint to x·Q on the lossless grid and pads with
    /// [Q, Q] up to `slots` intervals.
    pub fn discretize(&self, q: u64, slots: usize) -> IntegerValuation {
        debug_assert!(slots >= self.intervals.len());
        let qf = Frac::from_integer(q as i128);
        let mut endpoints = Vec::with_capacity(2 * slots);
        for (a, b) in &self.intervals {
            endpoints.push(round_nearest(*a * qf));
            endpoints.push(round_nearest(*b * qf));
        }
        while endpoints.len() < 2 * slots {
            endpoints.push(q);
        }
        IntegerValuation {
            endpoints,
            q,
            ell: self.intervals.len(),
        }
    }

    /// |piece ∩ supp(v)| / |supp(v)| as an exact rational. The piece may
    /// be any list of half-open intervals in [0,1).
    pub fn measure(&self, piece: &[(Frac, Frac)]) -> Frac {
        let mut covered = Frac::zero();
        for (pa, pb) in piece {
            for (sa, sb) in &self.intervals {
                let lo = if pa > sa { *pa } else { *sa };
                let hi = if pb < sb { *pb } else { *sb };
                if hi > lo {
                    covered = covered + (hi - lo);
                }
            }
        }
        covered / self.support_length()
    }
}

/// d = max significant decimal digits over every agent's endpoints, and
/// Q = 10^d: the smallest power-of-ten grid that quantizes losslessly.
pub fn choose_precision(
    valuations: &[PiecewiseUniformValuation],
) -> Result<(u32, u64), ValuationError> {
    let mut d = 0;
    for v in valuations {
        d = d.max(v.decimal_digits()?);
    }
    Ok((d, 10u64.pow(d)))
}

/// Rescales an integer valuation back to exact rationals on [0,1];
/// inverse of [`PiecewiseUniformValuation::discretize`] for lossless Q.
pub fn rescale(iv: &IntegerValuation) -> PiecewiseUniformValuation {
    let q = Frac::from_integer(iv.q as i128);
    let intervals = (0..iv.ell)
        .map(|j| {
            (
                Frac::from_integer(iv.endpoints[2 * j] as i128) / q,
                Frac::from_integer(iv.endpoints[2 * j + 1] as i128) / q,
            )
        })
        .collect();
    PiecewiseUniformValuation { intervals }
}

impl IntegerValuation {
    /// Eq-(3)-style ordering check on the padded endpoint list.
    pub fn is_well_formed(&self) -> bool {
        let mut prev = 0u64;
        for &e in &self.endpoints {
            if e < prev || e > self.q {
                return false;
            }
            prev = e;
        }
        self.endpoints[2 * self.ell..].iter().all(|&e| e == self.q)
    }
}

/// Number of fractional decimal digits if x is a terminating decimal.
fn terminating_digits(x: &Frac) -> Option<u32> {
    let mut den = *x.denom();
    if den.is_negative() {
        den = -den;
    }
    let mut twos = 0u32;
    while den % 2 == 0 {
        den /= 2;
        twos += 1;
    }
    let mut fives = 0u32;
    while den % 5 == 0 {
        den /= 5;
        fives += 1;
    }
    if den == 1 {
        Some(twos.max(fives))
    } else {
        None
    }
}

/// Round half away from zero; endpoints are non-negative here.
fn round_nearest(x: Frac) -> u64 {
    let num = *x.numer();
    let den = *x.denom();
    ((2 * num + den) / (2 * den)) as u64
}

/// Parses a non-negative decimal literal like "0.125" into an exact
/// rational. Rejects anything else.
pub fn parse_decimal(text: &str) -> Result<Frac, String> {
    let t = text.trim();
    let (int_part, frac_part) = match t.split_once('.') {
        Some((i, f)) => (i, f),
        None => (t, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(alloc::format!("empty number literal {text:?}"));
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(alloc::format!("bad decimal literal {text:?}"));
    }
    if frac_part.len() > 18 {
        return Err(alloc::format!("too many decimal digits in {text:?}"));
    }
    let int_val: i128 = if int_part.is_empty() {
        0
    } else {
        int_part
            .parse()
            .map_err(|_| alloc::format!("bad decimal literal {text:?}"))?
    };
    let scale = 10i128.pow(frac_part.len() as u32);
    let frac_val: i128 = if frac_part.is_empty() {
        0
    } else {
        frac_part
            .parse()
            .map_err(|_| alloc::format!("bad decimal literal {text:?}"))?
    };
    Ok(Frac::new(int_val * scale + frac_val, scale))
}
