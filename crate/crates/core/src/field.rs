//! Arithmetic in the prime field F_p backing all sharings and gates.
//!
//! The prime is chosen per run as the smallest prime exceeding twice the
//! global magnitude bound M, so every comparison operand sits in `[0, M]`
//! with `M < p/2` of headroom. Values are u64 residues; products reduce
//! through u128, which is exact for every prime below the [`MAX_PRIME`]
//! cap enforced at construction.

use core::fmt;

/// Upper bound (exclusive) on supported primes. Keeps `p^2` inside u128
/// and sums of a few field elements inside u64 without overflow checks
/// on the hot path.
pub const MAX_PRIME: u64 = 1 << 62;

/// Errors raised by field construction and checked arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldError {
    /// The requested modulus is not prime, too small, or above [`MAX_PRIME`].
    BadModulus(u64),
    /// Two operands belong to different fields.
    ModulusMismatch { left: u64, right: u64 },
    /// Multiplicative inverse of zero requested.
    ZeroInverse,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::BadModulus(p) => write!(f, "invalid field modulus {p}"),
            FieldError::ModulusMismatch { left, right } => {
                write!(f, "field modulus mismatch: {left} vs {right}")
            }
            FieldError::ZeroInverse => write!(f, "zero has no multiplicative inverse"),
        }
    }
}

impl core::error::Error for FieldError {}

/// A public prime modulus together with its bit length s = ⌈log2 p⌉.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeModulus {
    p: u64,
    s: u32,
}

impl PrimeModulus {
    /// Validates primality and the supported range.
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p < 2 || p >= MAX_PRIME || !is_prime_u64(p) {
            return Err(FieldError::BadModulus(p));
        }
        Ok(PrimeModulus {
            p,
            s: bit_length(p),
        })
    }

    /// The modulus itself.
    #[inline]
    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Bit length s = ⌈log2 p⌉; the width of [`FieldElement::to_bits`].
    #[inline]
    pub fn bits(&self) -> u32 {
        self.s
    }

    /// Embeds an arbitrary u64, reducing mod p.
    #[inline]
    pub fn element(&self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.p,
            modulus: *self,
        }
    }

    /// Embeds a signed integer, mapping negatives to `p - |v|`.
    pub fn element_signed(&self, value: i64) -> FieldElement {
        if value >= 0 {
            self.element(value as u64)
        } else {
            let m = (value.unsigned_abs()) % self.p;
            self.element(self.p - m)
        }
    }

    /// Zero of this field.
    #[inline]
    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    /// One of this field.
    #[inline]
    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    /// The inverse of two, (p+1)/2. Used by the secure halving gate.
    #[inline]
    pub fn inv2(&self) -> FieldElement {
        self.element(self.p / 2 + 1)
    }

    /// Smallest prime strictly greater than `lower`, within the cap.
    pub fn next_prime_above(lower: u64) -> Result<Self, FieldError> {
        let mut candidate = lower.checked_add(1).ok_or(FieldError::BadModulus(lower))?;
        if candidate <= 2 {
            candidate = 2;
        } else if candidate % 2 == 0 {
            candidate += 1;
        }
        while candidate < MAX_PRIME {
            if is_prime_u64(candidate) {
                return PrimeModulus::new(candidate);
            }
            candidate += 2;
        }
        Err(FieldError::BadModulus(lower))
    }
}

/// A residue in `[0, p)` tagged with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    modulus: PrimeModulus,
}

/// The five checked arithmetic operations of the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Neg,
    Inv,
}

impl FieldElement {
    /// The raw residue in `[0, p)`.
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    /// The field this element lives in.
    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    #[inline]
    fn check_same(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.modulus.p == other.modulus.p {
            Ok(())
        } else {
            Err(FieldError::ModulusMismatch {
                left: self.modulus.p,
                right: other.modulus.p,
            })
        }
    }

    /// Dispatches one checked operation; `Neg` and `Inv` ignore `b`.
    pub fn arith(a: FieldElement, b: FieldElement, op: FieldOp) -> Result<FieldElement, FieldError> {
        match op {
            FieldOp::Add => {
                a.check_same(&b)?;
                Ok(a.add(b))
            }
            FieldOp::Sub => {
                a.check_same(&b)?;
                Ok(a.sub(b))
            }
            FieldOp::Mul => {
                a.check_same(&b)?;
                Ok(a.mul(b))
            }
            FieldOp::Neg => Ok(a.neg()),
            FieldOp::Inv => a.inv(),
        }
    }

    #[inline]
    pub fn add(self, rhs: FieldElement) -> FieldElement {
        debug_assert_eq!(self.modulus.p, rhs.modulus.p);
        let p = self.modulus.p;
        let mut v = self.value + rhs.value;
        if v >= p {
            v -= p;
        }
        FieldElement {
            value: v,
            modulus: self.modulus,
        }
    }

    #[inline]
    pub fn sub(self, rhs: FieldElement) -> FieldElement {
        debug_assert_eq!(self.modulus.p, rhs.modulus.p);
        let p = self.modulus.p;
        let v = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.value + p - rhs.value
        };
        FieldElement {
            value: v,
            modulus: self.modulus,
        }
    }

    #[inline]
    pub fn mul(self, rhs: FieldElement) -> FieldElement {
        debug_assert_eq!(self.modulus.p, rhs.modulus.p);
        let p = self.modulus.p as u128;
        let v = (self.value as u128 * rhs.value as u128 % p) as u64;
        FieldElement {
            value: v,
            modulus: self.modulus,
        }
    }

    #[inline]
    pub fn neg(self) -> FieldElement {
        let v = if self.value == 0 {
            0
        } else {
            self.modulus.p - self.value
        };
        FieldElement {
            value: v,
            modulus: self.modulus,
        }
    }

    /// Multiplicative inverse via Fermat exponentiation.
    pub fn inv(self) -> Result<FieldElement, FieldError> {
        if self.value == 0 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.pow(self.modulus.p - 2))
    }

    /// Modular exponentiation by squaring.
    pub fn pow(self, mut exp: u64) -> FieldElement {
        let mut base = self;
        let mut acc = self.modulus.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            exp >>= 1;
        }
        acc
    }

    /// Big-endian-indexed bit view `b_{s−1} … b_0` with Σ b_j·2^j = value.
    /// Returned LSB-first, so `bits[j]` is the coefficient of 2^j.
    pub fn to_bits(&self) -> alloc::vec::Vec<u8> {
        let s = self.modulus.s;
        (0..s).map(|j| ((self.value >> j) & 1) as u8).collect()
    }

    /// Inverse of [`to_bits`](Self::to_bits) for any bit slice whose
    /// weighted sum stays below p.
    pub fn from_bits(modulus: PrimeModulus, bits: &[u8]) -> FieldElement {
        let mut v: u64 = 0;
        for (j, &b) in bits.iter().enumerate() {
            if b != 0 {
                v |= 1 << j;
            }
        }
        modulus.element(v)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Bit length of a nonzero u64.
#[inline]
fn bit_length(v: u64) -> u32 {
    64 - v.leading_zeros()
}

/// Deterministic Miller-Rabin, exact for all u64 with this witness set.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &sp in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == sp {
            return true;
        }
        if n % sp == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}
