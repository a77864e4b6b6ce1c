//! Polynomials over Z.
//!
//! Coefficients ascend: coeffs[i] is the coefficient of x^i. The zero
//! polynomial is the empty vector. Characteristic polynomials and their
//! squarefreeness checks live on this type; reductions into residue rings
//! produce `modpoly::ModPoly`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::modpoly::ModPoly;
use crate::ring::{ResidueRing, Ring};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: vec![] }
    }

    pub fn x() -> Self {
        IntPoly::from_i64(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        IntPoly::new(out)
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - other.coeff(i));
        }
        IntPoly::new(out)
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> IntPoly {
        if self.coeffs.len() <= 1 {
            return IntPoly::zero();
        }
        IntPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * BigInt::from(i as u64 + 1))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn reduce(&self, ring: &ResidueRing) -> ModPoly<ResidueRing> {
        ModPoly::new(
            ring.clone(),
            self.coeffs.iter().map(|c| ring.from_int(c)).collect(),
        )
    }

    /// Squarefree over Q, i.e. gcd(f, f') is constant. Uses the primitive
    /// pseudo-remainder sequence so everything stays in Z.
    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None | Some(0) => true,
            Some(_) => {
                let g = int_gcd_poly(self, &self.derivative());
                g.degree() == Some(0)
            }
        }
    }
}

fn content(f: &IntPoly) -> BigInt {
    let mut g = BigInt::zero();
    for c in f.coeffs() {
        g = gcd_int(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn gcd_int(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

fn primitive_part(f: &IntPoly) -> IntPoly {
    let c = content(f);
    if c.is_zero() || c.is_one() {
        return f.clone();
    }
    IntPoly::new(f.coeffs().iter().map(|a| a / &c).collect())
}

/// Pseudo-division: lc(g)^(deg f - deg g + 1) * f = q*g + r with deg r < deg g.
fn pseudo_rem(f: &IntPoly, g: &IntPoly) -> IntPoly {
    let dg = g.degree().expect("pseudo_rem by zero");
    let lc = g.coeff(dg);
    let mut r = f.clone();
    while let Some(dr) = r.degree() {
        if dr < dg {
            break;
        }
        let lead = r.coeff(dr);
        let mut shifted = vec![BigInt::zero(); dr - dg];
        shifted.extend(g.coeffs().iter().map(|c| c * &lead));
        r = r.scale(&lc).sub(&IntPoly::new(shifted));
    }
    r
}

/// gcd over Q, returned primitive. Primitive PRS: small degrees only, so
/// the coefficient growth of the plain primitive sequence is acceptable.
pub fn int_gcd_poly(f: &IntPoly, g: &IntPoly) -> IntPoly {
    let mut a = primitive_part(f);
    let mut b = primitive_part(g);
    if a.is_zero() {
        return b;
    }
    while !b.is_zero() {
        if a.degree() < b.degree() {
            core::mem::swap(&mut a, &mut b);
            continue;
        }
        let r = primitive_part(&pseudo_rem(&a, &b));
        a = b;
        b = r;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let f = IntPoly::from_i64(&[1, 2, 1]); // (x+1)^2
        let g = IntPoly::from_i64(&[1, 1]);
        assert_eq!(g.mul(&g), f);
        assert_eq!(f.sub(&f), IntPoly::zero());
        assert_eq!(f.eval(&BigInt::from(3)), BigInt::from(16));
        assert_eq!(f.derivative(), IntPoly::from_i64(&[2, 2]));
    }

    #[test]
    fn squarefree_detection() {
        assert!(IntPoly::from_i64(&[-1, 0, 1]).is_squarefree()); // x^2 - 1
        assert!(!IntPoly::from_i64(&[1, 2, 1]).is_squarefree()); // (x+1)^2
        assert!(IntPoly::from_i64(&[0, 1]).is_squarefree());
        // x^3 - x = x(x-1)(x+1)
        assert!(IntPoly::from_i64(&[0, -1, 0, 1]).is_squarefree());
        // x^4 - 2x^2 + 1 = (x^2-1)^2
        assert!(!IntPoly::from_i64(&[1, 0, -2, 0, 1]).is_squarefree());
    }

    #[test]
    fn gcd_examples() {
        let f = IntPoly::from_i64(&[-1, 0, 1]); // (x-1)(x+1)
        let g = IntPoly::from_i64(&[1, 1]);
        assert_eq!(int_gcd_poly(&f, &g), g);
        let h = IntPoly::from_i64(&[2, 2]); // content 2
        assert_eq!(int_gcd_poly(&f, &h), g);
    }
}
