//! Coefficient rings.
//!
//! All containers in this crate (polynomials, matrices, q-expansions) are
//! generic over a ring *context*: the ring is a value carrying p and the
//! precision, elements are plain data. `ResidueRing` is Z/p^M with elements
//! stored as canonical representatives in [0, p^M); the unramified
//! extension ring lives in `unramified`. `LocalRing` captures what the
//! chain-ring linear algebra needs: every nonzero element is (unit) * p^v.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Debug;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

pub trait Ring: Clone + PartialEq + Debug {
    type Elt: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elt;
    fn one(&self) -> Self::Elt;
    fn add(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt;
    fn sub(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt;
    fn neg(&self, a: &Self::Elt) -> Self::Elt;
    fn mul(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt;
    fn is_zero(&self, a: &Self::Elt) -> bool;
    /// Canonical image of an integer.
    fn from_int(&self, n: &BigInt) -> Self::Elt;
    /// Render an element for humans; machine formats canonicalize elsewhere.
    fn elt_string(&self, a: &Self::Elt) -> String;

    fn from_i64(&self, n: i64) -> Self::Elt {
        self.from_int(&BigInt::from(n))
    }

    fn is_one(&self, a: &Self::Elt) -> bool {
        *a == self.one()
    }
}

/// A finite chain ring of residue characteristic p: Z/p^M or an unramified
/// extension. The maximal ideal is (p), every element is u * p^v with u a
/// unit, and exact division by p^v is available on representatives.
pub trait LocalRing: Ring {
    fn prime(&self) -> u64;
    /// Nilpotency exponent M: p^M = 0 in the ring.
    fn precision(&self) -> u32;
    /// Residue field degree f (so the residue field is F_{p^f}).
    fn residue_degree(&self) -> u32;
    /// v_p(a), or None when a = 0 in the ring (v >= M).
    fn valuation(&self, a: &Self::Elt) -> Option<u32>;
    /// Inverse of a unit; None when a is not a unit.
    fn unit_inverse(&self, a: &Self::Elt) -> Option<Self::Elt>;
    /// a / p^v. Caller guarantees v <= valuation(a); the result is exact on
    /// canonical representatives.
    fn div_exact_p(&self, a: &Self::Elt, v: u32) -> Self::Elt;
    fn mul_p(&self, a: &Self::Elt, v: u32) -> Self::Elt;

    /// Image of the adjoined variable for extension rings; zero in Z/p^M.
    fn extension_generator(&self) -> Self::Elt {
        self.zero()
    }

    fn is_unit(&self, a: &Self::Elt) -> bool {
        self.valuation(a) == Some(0)
    }

    /// a / b whenever v(a) >= v(b) (with b != 0); None otherwise.
    fn divide(&self, a: &Self::Elt, b: &Self::Elt) -> Option<Self::Elt> {
        let vb = self.valuation(b)?;
        if self.is_zero(a) {
            return Some(self.zero());
        }
        let va = self.valuation(a).unwrap();
        if va < vb {
            return None;
        }
        let bu = self.div_exact_p(b, vb);
        let inv = self.unit_inverse(&bu)?;
        Some(self.mul(&self.div_exact_p(a, vb), &inv))
    }
}

/// Z with BigInt elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerRing;

impl Ring for IntegerRing {
    type Elt = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn from_int(&self, n: &BigInt) -> BigInt {
        n.clone()
    }
    fn elt_string(&self, a: &BigInt) -> String {
        a.to_str_radix(10)
    }
}

/// Z/p^M with canonical representatives in [0, p^M).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueRing {
    p: u64,
    m: u32,
    modulus: BigUint,
}

fn is_small_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl ResidueRing {
    /// Panics on a non-prime p or m = 0; these are programming errors, not
    /// data errors.
    pub fn new(p: u64, m: u32) -> Self {
        assert!(is_small_prime(p), "p = {} is not prime", p);
        assert!(m >= 1, "need m >= 1");
        let modulus = BigUint::from(p).pow(m);
        ResidueRing { p, m, modulus }
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// Same p, different precision.
    pub fn with_precision(&self, m: u32) -> Self {
        ResidueRing::new(self.p, m)
    }

    pub fn reduce_uint(&self, n: &BigUint) -> BigUint {
        n % &self.modulus
    }

    /// Lift to the centered integer representative in (-p^M/2, p^M/2].
    pub fn lift_centered(&self, a: &BigUint) -> BigInt {
        let twice: BigUint = a * 2u32;
        if twice > self.modulus {
            BigInt::from_biguint(Sign::Plus, a.clone()) - BigInt::from_biguint(Sign::Plus, self.modulus.clone())
        } else {
            BigInt::from_biguint(Sign::Plus, a.clone())
        }
    }
}

impl Ring for ResidueRing {
    type Elt = BigUint;

    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        BigUint::one()
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.modulus {
            s - &self.modulus
        } else {
            s
        }
    }
    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            a + &self.modulus - b
        }
    }
    fn neg(&self, a: &BigUint) -> BigUint {
        if a.is_zero() {
            BigUint::zero()
        } else {
            &self.modulus - a
        }
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.modulus
    }
    fn is_zero(&self, a: &BigUint) -> bool {
        a.is_zero()
    }
    fn from_int(&self, n: &BigInt) -> BigUint {
        let m = BigInt::from_biguint(Sign::Plus, self.modulus.clone());
        let r = n.mod_floor(&m);
        r.to_biguint().expect("mod_floor of positive modulus is nonnegative")
    }
    fn elt_string(&self, a: &BigUint) -> String {
        a.to_str_radix(10)
    }
}

impl LocalRing for ResidueRing {
    fn prime(&self) -> u64 {
        self.p
    }
    fn precision(&self) -> u32 {
        self.m
    }
    fn residue_degree(&self) -> u32 {
        1
    }

    fn valuation(&self, a: &BigUint) -> Option<u32> {
        if a.is_zero() {
            return None;
        }
        let p = BigUint::from(self.p);
        let mut v = 0u32;
        let mut rest = a.clone();
        while (&rest % &p).is_zero() {
            rest /= &p;
            v += 1;
        }
        Some(v)
    }

    fn unit_inverse(&self, a: &BigUint) -> Option<BigUint> {
        if self.valuation(a) != Some(0) {
            return None;
        }
        // Inverse mod p by Fermat, then Newton steps x <- x(2 - ax) double
        // the precision up to p^M.
        let p = BigUint::from(self.p);
        let a_mod_p = a % &p;
        let mut x = a_mod_p.modpow(&BigUint::from(self.p - 2), &p);
        let mut prec = 1u32;
        while prec < self.m {
            prec = (prec * 2).min(self.m);
            let modulus = BigUint::from(self.p).pow(prec);
            let ax = (a * &x) % &modulus;
            let two = BigUint::from(2u32) % &modulus;
            let corr = if two >= ax {
                two - ax
            } else {
                &modulus + two - ax
            };
            x = (&x * corr) % &modulus;
        }
        Some(x % &self.modulus)
    }

    fn div_exact_p(&self, a: &BigUint, v: u32) -> BigUint {
        if v == 0 {
            return a.clone();
        }
        let pv = BigUint::from(self.p).pow(v);
        debug_assert!((a % &pv).is_zero(), "div_exact_p: not divisible");
        a / pv
    }

    fn mul_p(&self, a: &BigUint, v: u32) -> BigUint {
        if v >= self.m {
            return BigUint::zero();
        }
        (a * BigUint::from(self.p).pow(v)) % &self.modulus
    }
}

/// v_p of an integer; None for 0.
pub fn int_valuation(p: u64, n: &BigInt) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0u32;
    let mut rest = n.clone();
    while rest.mod_floor(&p).is_zero() {
        rest /= &p;
        v += 1;
    }
    Some(v)
}

/// Convenience: map a slice of integers into a ring.
pub fn map_ints<R: Ring>(ring: &R, ns: &[i64]) -> Vec<R::Elt> {
    ns.iter().map(|n| ring.from_i64(*n)).collect()
}
