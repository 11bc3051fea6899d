//! Exact modular arithmetic over odd prime-power moduli and the unit-circle
//! exponential e_q(x) = exp(2 pi i x / q).
//!
//! Arguments of e_q are reduced modulo q in exact integer arithmetic before
//! any floating-point step, so accumulated sums never lose angle precision.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// An odd prime power q = p^n together with phi(q) = p^(n-1)(p-1).
///
/// Construction validates that p is an odd prime (deterministic Miller-Rabin)
/// and that q fits in 64 bits; everything downstream relies on those
/// invariants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimePowerModulus {
    p: u64,
    n: u32,
    q: u64,
    phi: u64,
}

impl PrimePowerModulus {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroExponent);
        }
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        let mut q: u64 = 1;
        for _ in 0..n {
            q = q.checked_mul(p).ok_or(Error::ModulusOverflow { p, n })?;
        }
        let phi = q / p * (p - 1);
        Ok(Self { p, n, q, phi })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn phi(&self) -> u64 {
        self.phi
    }

    /// Number of blocks p^(n-1) in the block enumeration of the prefix set.
    pub fn blocks(&self) -> u64 {
        self.q / self.p
    }

    /// p^(n/2) as a float; the normalization of every sum in this crate.
    pub fn normalization(&self) -> f64 {
        (self.q as f64).sqrt()
    }

    /// True when the residue of `x` is invertible, i.e. p does not divide x.
    pub fn is_unit(&self, x: u64) -> bool {
        !x.is_multiple_of(self.p)
    }

    /// Reduce an arbitrary integer to its residue in [0, q).
    pub fn reduce(&self, x: i128) -> u64 {
        x.rem_euclid(self.q as i128) as u64
    }
}

/// A residue in [1, q-1] coprime to p, tied to its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnitResidue {
    value: u64,
    modulus: PrimePowerModulus,
}

impl UnitResidue {
    /// Reduces `value` modulo q and rejects residues divisible by p.
    pub fn new(value: u64, m: &PrimePowerModulus) -> Result<Self> {
        let v = value % m.q;
        if v.is_multiple_of(m.p) {
            return Err(Error::NotAUnit { value, q: m.q, p: m.p });
        }
        Ok(Self { value: v, modulus: *m })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> &PrimePowerModulus {
        &self.modulus
    }

    /// Product of two units of the same modulus.
    pub fn mul(&self, other: &UnitResidue) -> Result<UnitResidue> {
        if self.modulus.q != other.modulus.q {
            return Err(Error::ModulusMismatch { expected: self.modulus.q, got: other.modulus.q });
        }
        Ok(UnitResidue {
            value: mul_mod(self.value, other.value, self.modulus.q),
            modulus: self.modulus,
        })
    }
}

/// Inverse of a unit: the residue y with x * y = 1 (mod q).
pub fn inv_mod(x: &UnitResidue) -> UnitResidue {
    UnitResidue { value: inv_u64(x.value, x.modulus.q), modulus: x.modulus }
}

/// exp(2 pi i x / q) with the argument reduced modulo q before the
/// trigonometric evaluation.
pub fn e_q(x: i128, m: &PrimePowerModulus) -> Complex64 {
    unit_root(m.reduce(x), m.q)
}

/// exp(2 pi i r / q) for an already reduced residue r in [0, q).
pub(crate) fn unit_root(r: u64, q: u64) -> Complex64 {
    debug_assert!(r < q);
    let theta = std::f64::consts::TAU * (r as f64) / (q as f64);
    let (sin, cos) = theta.sin_cos();
    Complex64::new(cos, sin)
}

/// The units of Z/qZ in increasing order: exactly phi(q) values, the i-th of
/// which is `index_map(i)`.
pub fn units_iter(m: PrimePowerModulus) -> impl Iterator<Item = UnitResidue> {
    (1..m.q).filter(move |x| x % m.p != 0).map(move |value| UnitResidue { value, modulus: m })
}

/// Extended-Euclid inverse of x modulo q; requires gcd(x, q) = 1.
pub(crate) fn inv_u64(x: u64, q: u64) -> u64 {
    let (mut old_r, mut r) = (x as i128, q as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quotient = old_r / r;
        (old_r, r) = (r, old_r - quotient * r);
        (old_s, s) = (s, old_s - quotient * s);
    }
    debug_assert_eq!(old_r, 1, "inverse of a non-unit requested");
    old_s.rem_euclid(q as i128) as u64
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    (a as u128 * b as u128 % q as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1u64 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin with a base set valid for all 64-bit inputs,
/// restricted to odd p.
pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p.is_multiple_of(2) {
        return false;
    }
    for small in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if p == small {
            return true;
        }
        if p.is_multiple_of(small) {
            return false;
        }
    }
    let d = p - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'base: for base in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(base, d, p);
        if x == 1 || x == p - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, p);
            if x == p - 1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}
