//! Polynomials over a finite chain ring (Z/p^M or an unramified extension).
//!
//! The same type does double duty: at precision M it carries Hensel lifting
//! data, and at precision 1 the ring is a finite field and the full Euclid /
//! Cantor-Zassenhaus toolbox applies. Coefficients ascend; coeffs[i] is the
//! coefficient of x^i.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::One;

use crate::ring::{LocalRing, Ring};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq)]
pub struct ModPoly<R: Ring> {
    ring: R,
    coeffs: Vec<R::Elt>,
}

impl<R: Ring> ModPoly<R> {
    pub fn new(ring: R, mut coeffs: Vec<R::Elt>) -> Self {
        while coeffs.last().is_some_and(|c| ring.is_zero(c)) {
            coeffs.pop();
        }
        ModPoly { ring, coeffs }
    }

    pub fn zero(ring: R) -> Self {
        ModPoly { ring, coeffs: vec![] }
    }

    pub fn one(ring: R) -> Self {
        let c = ring.one();
        ModPoly::new(ring, vec![c])
    }

    pub fn x(ring: R) -> Self {
        let coeffs = vec![ring.zero(), ring.one()];
        ModPoly::new(ring, coeffs)
    }

    pub fn constant(ring: R, c: R::Elt) -> Self {
        ModPoly::new(ring, vec![c])
    }

    pub fn from_i64(ring: R, coeffs: &[i64]) -> Self {
        let elts = coeffs.iter().map(|&c| ring.from_i64(c)).collect();
        ModPoly::new(ring, elts)
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn coeffs(&self) -> &[R::Elt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> R::Elt {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&R::Elt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| self.ring.is_one(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.ring, other.ring);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.ring.add(&self.coeff(i), &other.coeff(i)));
        }
        ModPoly::new(self.ring.clone(), out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.ring, other.ring);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.ring.sub(&self.coeff(i), &other.coeff(i)));
        }
        ModPoly::new(self.ring.clone(), out)
    }

    pub fn neg(&self) -> Self {
        ModPoly::new(self.ring.clone(), self.coeffs.iter().map(|c| self.ring.neg(c)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.ring, other.ring);
        if self.is_zero() || other.is_zero() {
            return ModPoly::zero(self.ring.clone());
        }
        let mut out = vec![self.ring.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if self.ring.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = self.ring.add(&out[i + j], &self.ring.mul(a, b));
            }
        }
        ModPoly::new(self.ring.clone(), out)
    }

    pub fn scale(&self, c: &R::Elt) -> Self {
        ModPoly::new(self.ring.clone(), self.coeffs.iter().map(|a| self.ring.mul(a, c)).collect())
    }

    pub fn shift(&self, by: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut out = vec![self.ring.zero(); by];
        out.extend(self.coeffs.iter().cloned());
        ModPoly::new(self.ring.clone(), out)
    }

    pub fn eval(&self, x: &R::Elt) -> R::Elt {
        let mut acc = self.ring.zero();
        for c in self.coeffs.iter().rev() {
            acc = self.ring.add(&self.ring.mul(&acc, x), c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return ModPoly::zero(self.ring.clone());
        }
        let out = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let n = self.ring.from_i64(i as i64 + 1);
                self.ring.mul(c, &n)
            })
            .collect();
        ModPoly::new(self.ring.clone(), out)
    }

    pub fn to_string_in(&self, var: &str) -> String {
        use core::fmt::Write;
        if self.is_zero() {
            return String::from("0");
        }
        let mut s = String::new();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if self.ring.is_zero(c) {
                continue;
            }
            if !first {
                s.push_str(" + ");
            }
            first = false;
            let cs = self.ring.elt_string(c);
            match i {
                0 => s.push_str(&cs),
                1 if cs == "1" => s.push_str(var),
                1 => {
                    let _ = write!(s, "{}*{}", cs, var);
                }
                _ if cs == "1" => {
                    let _ = write!(s, "{}^{}", var, i);
                }
                _ => {
                    let _ = write!(s, "{}*{}^{}", cs, var, i);
                }
            }
        }
        s
    }
}

impl<R: LocalRing> ModPoly<R> {
    /// Quotient and remainder by a divisor whose leading coefficient is a
    /// unit. Panics otherwise; callers in this crate only divide by monic
    /// or unit-led polynomials.
    pub fn divrem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lc = divisor.leading().unwrap();
        let lc_inv = self
            .ring
            .unit_inverse(lc)
            .expect("divrem: leading coefficient must be a unit");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (ModPoly::zero(self.ring.clone()), self.clone());
        }
        let qlen = rem.len() - dd;
        let mut quot = vec![self.ring.zero(); qlen];
        for i in (0..qlen).rev() {
            let top = rem[i + dd].clone();
            if self.ring.is_zero(&top) {
                continue;
            }
            let q = self.ring.mul(&top, &lc_inv);
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                let t = self.ring.mul(&q, dc);
                rem[i + j] = self.ring.sub(&rem[i + j], &t);
            }
            quot[i] = q;
        }
        (
            ModPoly::new(self.ring.clone(), quot),
            ModPoly::new(self.ring.clone(), rem),
        )
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.divrem(divisor).1
    }

    /// Divide every coefficient by the leading unit.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(lc) => {
                let inv = self
                    .ring
                    .unit_inverse(lc)
                    .expect("monic: leading coefficient must be a unit");
                self.scale(&inv)
            }
        }
    }

    /// Monic gcd. Valid when the ring is a field (precision 1); panics if a
    /// non-unit leading coefficient shows up, which cannot happen there.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b.monic());
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd over a field: returns (g, u, v) monic with u*a + v*b = g.
    pub fn extended_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let ring = self.ring.clone();
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let mut u0 = ModPoly::one(ring.clone());
        let mut u1 = ModPoly::zero(ring.clone());
        let mut v0 = ModPoly::zero(ring.clone());
        let mut v1 = ModPoly::one(ring.clone());
        while !r1.is_zero() {
            let lc_inv = ring
                .unit_inverse(r1.leading().unwrap())
                .expect("extended_gcd requires a field");
            let r1m = r1.scale(&lc_inv);
            let (q, rem) = r0.divrem(&r1m);
            let q = q.scale(&lc_inv);
            let nu = u0.sub(&q.mul(&u1));
            let nv = v0.sub(&q.mul(&v1));
            r0 = r1;
            r1 = rem;
            u0 = u1;
            u1 = nu;
            v0 = v1;
            v1 = nv;
        }
        if r0.is_zero() {
            return (r0, u0, v0);
        }
        let lc_inv = ring.unit_inverse(r0.leading().unwrap()).unwrap();
        (r0.scale(&lc_inv), u0.scale(&lc_inv), v0.scale(&lc_inv))
    }

    /// self^exp mod modulus, square-and-multiply on the exponent bits.
    pub fn pow_mod(&self, exp: &BigUint, modulus: &Self) -> Self {
        let mut base = self.rem(modulus);
        let mut acc = ModPoly::one(self.ring.clone());
        let bits = exp.bits();
        for i in 0..bits {
            if exp.bit(i) {
                acc = acc.mul(&base).rem(modulus);
            }
            if i + 1 < bits {
                base = base.mul(&base).rem(modulus);
            }
        }
        acc
    }
}

/// Factor a monic squarefree polynomial over the residue field the ring
/// represents (the ring must have precision 1). Returns monic irreducible
/// factors sorted by (degree, coefficient tuple). Cantor-Zassenhaus with a
/// fixed-seed generator, so runs are reproducible.
pub fn factor_squarefree_field<R: LocalRing>(f: &ModPoly<R>) -> Vec<ModPoly<R>> {
    assert_eq!(f.ring().precision(), 1, "factorization wants a residue field");
    assert!(f.is_monic(), "factorization wants a monic input");
    let ring = f.ring().clone();
    let q = BigUint::from(ring.prime()).pow(ring.residue_degree());

    let mut irreducibles = Vec::new();
    // Distinct-degree split: gcd with x^(q^d) - x peels off the product of
    // all irreducible factors of degree d.
    let mut rest = f.clone();
    let mut xq = ModPoly::x(ring.clone()); // x^(q^d) mod rest, starting d = 0
    let mut d = 0usize;
    while rest.degree().is_some_and(|deg| deg > 0) {
        d += 1;
        if rest.degree().unwrap() < 2 * d {
            // What remains is irreducible.
            irreducibles.push(rest.monic());
            break;
        }
        xq = xq.pow_mod(&q, &rest);
        let split = rest.gcd(&xq.sub(&ModPoly::x(ring.clone())));
        if split.degree().is_some_and(|deg| deg > 0) {
            let mut rng = SplitMix64::new(0x5eed_c0de ^ (d as u64));
            equal_degree_split(&split, d, &mut rng, &mut irreducibles);
            rest = rest.divrem(&split).0;
            xq = xq.rem(&rest);
        }
    }
    irreducibles.sort_by(|a, b| cmp_poly(a, b));
    irreducibles
}

/// Canonical total order on polynomials: by length, then coefficient keys.
pub fn cmp_poly<R: LocalRing>(a: &ModPoly<R>, b: &ModPoly<R>) -> core::cmp::Ordering {
    use core::cmp::Ordering;
    match a.coeffs().len().cmp(&b.coeffs().len()) {
        Ordering::Equal => {}
        o => return o,
    }
    for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
        let o = elt_key(a.ring(), x).cmp(&elt_key(b.ring(), y));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Total order on ring elements for canonical sorting: the string is a
/// stable, injective encoding of the canonical representative.
pub fn elt_key<R: Ring>(ring: &R, a: &R::Elt) -> (usize, String) {
    let s = ring.elt_string(a);
    (s.len(), s)
}

fn random_poly<R: LocalRing>(ring: &R, deg_below: usize, rng: &mut SplitMix64) -> ModPoly<R> {
    let coeffs = (0..deg_below).map(|_| sample_elt(ring, rng)).collect();
    ModPoly::new(ring.clone(), coeffs)
}

/// Uniform-ish ring element from the generator; only used inside the
/// splitting loop where any decent spread works.
pub fn sample_elt<R: LocalRing>(ring: &R, rng: &mut SplitMix64) -> R::Elt {
    // Random integer of enough bits, pushed through the canonical map.
    let lo = rng.next_u64();
    let hi = rng.next_u64();
    let n = num_bigint::BigInt::from(hi) << 64 | num_bigint::BigInt::from(lo);
    let base = ring.from_int(&n);
    // For extension rings a single integer only reaches the prime subring,
    // so mix in powers of the generator when one exists.
    let f = ring.residue_degree();
    if f == 1 {
        return base;
    }
    let mut acc = base;
    let gen = ring.extension_generator();
    let mut pw = ring.one();
    for _ in 1..f {
        pw = ring.mul(&pw, &gen);
        let c = ring.from_int(&num_bigint::BigInt::from(rng.next_u64()));
        acc = ring.add(&acc, &ring.mul(&c, &pw));
    }
    acc
}

fn equal_degree_split<R: LocalRing>(
    product: &ModPoly<R>,
    d: usize,
    rng: &mut SplitMix64,
    out: &mut Vec<ModPoly<R>>,
) {
    let deg = product.degree().unwrap();
    if deg == d {
        out.push(product.monic());
        return;
    }
    let ring = product.ring().clone();
    let p = ring.prime();
    let f = ring.residue_degree();
    loop {
        let r = random_poly(&ring, deg, rng);
        if r.degree().is_none() {
            continue;
        }
        let w = if p == 2 {
            // Absolute trace to F_2: r + r^2 + r^4 + ... over F_{2^(f*d)}.
            let mut acc = r.clone();
            let mut t = r.clone();
            let steps = (f as usize) * d;
            for _ in 1..steps {
                t = t.mul(&t).rem(product);
                acc = acc.add(&t);
            }
            acc
        } else {
            let qd = BigUint::from(p).pow(f).pow(d as u32);
            let e = (&qd - BigUint::one()) / BigUint::from(2u32);
            let w = r.pow_mod(&e, product);
            w.sub(&ModPoly::one(ring.clone()))
        };
        let g = product.gcd(&w);
        if let Some(dg) = g.degree() {
            if dg > 0 && dg < deg {
                let h = product.divrem(&g).0;
                equal_degree_split(&g, d, rng, out);
                equal_degree_split(&h, d, rng, out);
                return;
            }
        }
    }
}
