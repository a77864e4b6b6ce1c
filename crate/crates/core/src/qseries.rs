//! Truncated q-expansions over an arbitrary coefficient ring.
//!
//! A series carries its own precision: `coeffs[n]` is the coefficient of
//! q^n and exactly `prec()` coefficients are known. Products truncate to
//! the shorter operand, which is the correct law when constant terms are
//! known exactly.
//!
//! The optional weight tag travels through arithmetic (sums check it,
//! products add it) but carries no mathematical weight on its own —
//! callers that need the grading enforce it.

use alloc::vec;
use alloc::vec::Vec;

use crate::ring::{IntegerRing, Ring};

#[derive(Debug, Clone, PartialEq)]
pub struct QExpansion<R: Ring> {
    ring: R,
    coeffs: Vec<R::Elt>,
    weight: Option<i64>,
}

impl<R: Ring> QExpansion<R> {
    pub fn new(ring: R, coeffs: Vec<R::Elt>, weight: Option<i64>) -> Self {
        QExpansion { ring, coeffs, weight }
    }

    pub fn zero(ring: R, prec: usize, weight: Option<i64>) -> Self {
        let coeffs = vec![ring.zero(); prec];
        QExpansion { ring, coeffs, weight }
    }

    pub fn one(ring: R, prec: usize, weight: Option<i64>) -> Self {
        let mut s = Self::zero(ring, prec, weight);
        if prec > 0 {
            s.coeffs[0] = s.ring.one();
        }
        s
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, n: usize) -> &R::Elt {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[R::Elt] {
        &self.coeffs
    }

    pub fn weight(&self) -> Option<i64> {
        self.weight
    }

    pub fn with_weight(mut self, weight: Option<i64>) -> Self {
        self.weight = weight;
        self
    }

    pub fn truncated(&self, prec: usize) -> Self {
        assert!(prec <= self.prec(), "cannot extend a truncated series");
        QExpansion {
            ring: self.ring.clone(),
            coeffs: self.coeffs[..prec].to_vec(),
            weight: self.weight,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| self.ring.is_zero(c))
    }

    /// Index of the first nonzero coefficient, if any.
    pub fn leading_index(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !self.ring.is_zero(c))
    }

    fn sum_weight(&self, other: &Self) -> Option<i64> {
        match (self.weight, other.weight) {
            (Some(a), Some(b)) => {
                assert_eq!(a, b, "weights differ in a sum: {} vs {}", a, b);
                Some(a)
            }
            _ => None,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.ring, other.ring);
        let weight = self.sum_weight(other);
        let prec = self.prec().min(other.prec());
        let coeffs = (0..prec)
            .map(|n| self.ring.add(&self.coeffs[n], &other.coeffs[n]))
            .collect();
        QExpansion { ring: self.ring.clone(), coeffs, weight }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.ring, other.ring);
        let weight = self.sum_weight(other);
        let prec = self.prec().min(other.prec());
        let coeffs = (0..prec)
            .map(|n| self.ring.sub(&self.coeffs[n], &other.coeffs[n]))
            .collect();
        QExpansion { ring: self.ring.clone(), coeffs, weight }
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| self.ring.neg(c)).collect();
        QExpansion { ring: self.ring.clone(), coeffs, weight: self.weight }
    }

    pub fn scale(&self, c: &R::Elt) -> Self {
        let coeffs = self.coeffs.iter().map(|a| self.ring.mul(a, c)).collect();
        QExpansion { ring: self.ring.clone(), coeffs, weight: self.weight }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ring, other.ring);
        let weight = match (self.weight, other.weight) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        let prec = self.prec().min(other.prec());
        let ring = self.ring.clone();
        let mut coeffs = vec![ring.zero(); prec];
        for (i, a) in self.coeffs.iter().enumerate().take(prec) {
            if ring.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(prec - i) {
                if ring.is_zero(b) {
                    continue;
                }
                let t = ring.mul(a, b);
                coeffs[i + j] = ring.add(&coeffs[i + j], &t);
            }
        }
        QExpansion { ring, coeffs, weight }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.ring.clone(), self.prec(), Some(0));
        let mut base = self.clone();
        let mut e = e;
        if e == 0 {
            return acc;
        }
        loop {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base);
        }
        acc
    }

    /// Push the series through a coefficient map into another ring.
    pub fn map_ring<S: Ring>(&self, target: &S, f: impl Fn(&R::Elt) -> S::Elt) -> QExpansion<S> {
        QExpansion {
            ring: target.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
            weight: self.weight,
        }
    }

    pub fn eq_up_to(&self, other: &Self, prec: usize) -> bool {
        assert!(prec <= self.prec() && prec <= other.prec());
        (0..prec).all(|n| self.coeffs[n] == other.coeffs[n])
    }
}

/// Reduce an integral series into any coefficient ring.
pub fn reduce_integral<R: Ring>(f: &QExpansion<IntegerRing>, ring: &R) -> QExpansion<R> {
    f.map_ring(ring, |c| ring.from_int(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ResidueRing;
    use num_bigint::BigInt;

    fn zseries(coeffs: &[i64]) -> QExpansion<IntegerRing> {
        let ring = IntegerRing;
        let v = coeffs.iter().map(|&c| BigInt::from(c)).collect();
        QExpansion::new(ring, v, None)
    }

    #[test]
    fn difference_of_squares() {
        let a = zseries(&[1, 1, 0, 0, 0, 0, 0, 0]);
        let b = zseries(&[1, -1, 0, 0, 0, 0, 0, 0]);
        let prod = a.mul(&b);
        assert_eq!(prod, zseries(&[1, 0, -1, 0, 0, 0, 0, 0]));
    }

    #[test]
    fn product_precision_is_min() {
        let a = zseries(&[1, 2, 3, 4, 5]);
        let b = zseries(&[1, 1, 1]);
        assert_eq!(a.mul(&b).prec(), 3);
        assert_eq!(a.add(&b).prec(), 3);
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let a = zseries(&[1, -3, 2, 7, 0, 5, -1, 2, 9, -4]);
        let mut by_mul = QExpansion::one(IntegerRing, a.prec(), Some(0));
        for _ in 0..5 {
            by_mul = by_mul.mul(&a);
        }
        assert_eq!(a.pow(5).coeffs(), by_mul.coeffs());
    }

    #[test]
    fn reduction_is_a_ring_homomorphism() {
        let ring = ResidueRing::new(7, 2);
        let mut rng = crate::rng::SplitMix64::new(42);
        for _ in 0..10 {
            let a = zseries(&(0..12).map(|_| rng.next_u64() as i64 % 1000).collect::<Vec<_>>());
            let b = zseries(&(0..12).map(|_| rng.next_u64() as i64 % 1000).collect::<Vec<_>>());
            let lhs = reduce_integral(&a.mul(&b), &ring);
            let rhs = reduce_integral(&a, &ring).mul(&reduce_integral(&b, &ring));
            assert_eq!(lhs, rhs);
            let lhs = reduce_integral(&a.add(&b), &ring);
            let rhs = reduce_integral(&a, &ring).add(&reduce_integral(&b, &ring));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn weight_tags() {
        let a = zseries(&[1, 2, 3]).with_weight(Some(4));
        let b = zseries(&[0, 1, 1]).with_weight(Some(6));
        assert_eq!(a.mul(&b).weight(), Some(10));
        assert_eq!(a.mul(&zseries(&[1, 1, 1])).weight(), None);
        assert_eq!(a.pow(3).weight(), Some(12));
    }

    #[test]
    fn leading_index_and_truncation() {
        let a = zseries(&[0, 0, 5, 1]);
        assert_eq!(a.leading_index(), Some(2));
        assert_eq!(a.truncated(2).leading_index(), None);
        assert!(a.truncated(2).is_zero());
    }
}
