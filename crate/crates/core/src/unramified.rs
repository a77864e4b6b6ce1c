//! The unramified extension W(p, M, f) = Z/p^M [x] / (phi), phi monic of
//! degree f and irreducible mod p.
//!
//! This is the coefficient ring for eigensystems whose residue field is
//! F_{p^f}. It is again a chain ring with maximal ideal (p): the valuation
//! of an element is the minimum of the valuations of its coordinates, so
//! the Howell machinery works over it unchanged.
//!
//! Every ring uses the canonical modulus (the first monic irreducible of
//! degree f over F_p in the coefficient-encoding order, lifted with digits
//! in [0, p)), so elements of equal rings compare coordinatewise and
//! eigensystems computed at different weights land in literally the same
//! ring.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use crate::error::Error;
use crate::intpoly::IntPoly;
use crate::modpoly::{factor_squarefree_field, ModPoly};
use crate::ring::{LocalRing, ResidueRing, Ring};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnramifiedRing {
    base: ResidueRing,
    /// Monic modulus, ascending coefficients, length f + 1, digits in [0, p).
    phi: Vec<u64>,
}

pub type UnramifiedElt = Vec<BigUint>;

impl UnramifiedRing {
    /// The canonical degree-f unramified extension of Z/p^M.
    pub fn standard(p: u64, m: u32, f: u32) -> Self {
        assert!(f >= 1);
        let base = ResidueRing::new(p, m);
        let phi = canonical_irreducible(p, f);
        UnramifiedRing { base, phi }
    }

    pub fn base(&self) -> &ResidueRing {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn modulus_poly(&self) -> &[u64] {
        &self.phi
    }

    pub fn with_precision(&self, m: u32) -> Self {
        UnramifiedRing {
            base: self.base.with_precision(m),
            phi: self.phi.clone(),
        }
    }

    /// Coordinatewise reduction of an element of the same extension at
    /// higher precision into this ring.
    pub fn reduce_elt_from(&self, a: &UnramifiedElt) -> UnramifiedElt {
        a.iter().map(|c| self.base.reduce_uint(c)).collect()
    }

    /// Embed a base-ring element as a constant.
    pub fn embed_base(&self, a: &BigUint) -> UnramifiedElt {
        let mut v = vec![BigUint::zero(); self.degree()];
        v[0] = self.base.reduce_uint(a);
        v
    }

    /// The constant part, if the element is a constant.
    pub fn constant_part(&self, a: &UnramifiedElt) -> Option<BigUint> {
        if a[1..].iter().all(|c| c.is_zero()) {
            Some(a[0].clone())
        } else {
            None
        }
    }

    pub fn from_coords(&self, coords: Vec<BigUint>) -> UnramifiedElt {
        let f = self.degree();
        let mut v: Vec<BigUint> = coords.into_iter().map(|c| self.base.reduce_uint(&c)).collect();
        v.resize(f, BigUint::zero());
        v
    }

    /// The residue field of this ring, as the same extension at precision 1.
    pub fn residue_field(&self) -> UnramifiedRing {
        self.with_precision(1)
    }

    /// Reduce a base-ring polynomial into a polynomial over this ring.
    pub fn lift_poly(&self, f: &ModPoly<ResidueRing>) -> ModPoly<UnramifiedRing> {
        assert_eq!(f.ring(), &self.base);
        let coeffs = f.coeffs().iter().map(|c| self.embed_base(c)).collect();
        ModPoly::new(self.clone(), coeffs)
    }

    fn reduce_mod_phi(&self, mut c: Vec<BigUint>) -> UnramifiedElt {
        let f = self.degree();
        // phi is monic: x^f = -(phi_0 + ... + phi_{f-1} x^{f-1}).
        for i in (f..c.len()).rev() {
            let top = core::mem::replace(&mut c[i], BigUint::zero());
            if top.is_zero() {
                continue;
            }
            for (j, &pj) in self.phi[..f].iter().enumerate() {
                if pj == 0 {
                    continue;
                }
                let t = self.base.mul(&top, &BigUint::from(pj));
                c[i - f + j] = self.base.sub(&c[i - f + j], &t);
            }
        }
        c.truncate(f);
        c.resize(f, BigUint::zero());
        c
    }

    /// The Frobenius automorphism: the unique ring automorphism congruent
    /// to a -> a^p mod p. Returns the image of the generator; apply with
    /// `apply_frobenius`.
    pub fn frobenius_generator_image(&self) -> UnramifiedElt {
        let gen = self.extension_generator();
        // sigma(w) is the root of phi congruent to w^p mod p; Newton from
        // w^p converges since phi' is a unit at it.
        let mut z = self.pow_u64(&gen, self.base.prime());
        let phi_poly = self.phi_over_self();
        let dphi = phi_poly.derivative();
        let m = self.base.precision();
        let mut prec = 1u32;
        while prec < m {
            let fz = phi_poly.eval(&z);
            let dz = dphi.eval(&z);
            let dz_inv = self
                .unit_inverse(&dz)
                .expect("phi' is a unit at an approximate root");
            let step = self.mul(&fz, &dz_inv);
            z = self.sub(&z, &step);
            prec *= 2;
        }
        z
    }

    pub fn apply_frobenius(&self, sigma_w: &UnramifiedElt, a: &UnramifiedElt) -> UnramifiedElt {
        // a = sum a_i w^i with a_i in the base ring, so sigma(a) = sum a_i sigma(w)^i.
        let mut acc = self.zero();
        let mut pw = self.one();
        for (i, c) in a.iter().enumerate() {
            if i > 0 {
                pw = self.mul(&pw, sigma_w);
            }
            let term: Vec<BigUint> = pw.iter().map(|x| self.base.mul(x, c)).collect();
            acc = self.add(&acc, &term);
        }
        acc
    }

    fn phi_over_self(&self) -> ModPoly<UnramifiedRing> {
        let coeffs = self
            .phi
            .iter()
            .map(|&c| self.embed_base(&BigUint::from(c)))
            .collect();
        ModPoly::new(self.clone(), coeffs)
    }

    pub fn pow_u64(&self, a: &UnramifiedElt, e: u64) -> UnramifiedElt {
        let mut acc = self.one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

impl Ring for UnramifiedRing {
    type Elt = UnramifiedElt;

    fn zero(&self) -> UnramifiedElt {
        vec![BigUint::zero(); self.degree()]
    }

    fn one(&self) -> UnramifiedElt {
        let mut v = self.zero();
        v[0] = self.base.one();
        v
    }

    fn add(&self, a: &UnramifiedElt, b: &UnramifiedElt) -> UnramifiedElt {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }

    fn sub(&self, a: &UnramifiedElt, b: &UnramifiedElt) -> UnramifiedElt {
        a.iter().zip(b).map(|(x, y)| self.base.sub(x, y)).collect()
    }

    fn neg(&self, a: &UnramifiedElt) -> UnramifiedElt {
        a.iter().map(|x| self.base.neg(x)).collect()
    }

    fn mul(&self, a: &UnramifiedElt, b: &UnramifiedElt) -> UnramifiedElt {
        let f = self.degree();
        let mut c = vec![BigUint::zero(); 2 * f - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                let t = self.base.mul(x, y);
                c[i + j] = self.base.add(&c[i + j], &t);
            }
        }
        self.reduce_mod_phi(c)
    }

    fn is_zero(&self, a: &UnramifiedElt) -> bool {
        a.iter().all(|c| c.is_zero())
    }

    fn from_int(&self, n: &BigInt) -> UnramifiedElt {
        self.embed_base(&self.base.from_int(n))
    }

    fn elt_string(&self, a: &UnramifiedElt) -> String {
        if self.is_zero(a) {
            return String::from("0");
        }
        let mut parts: Vec<String> = Vec::new();
        for (i, c) in a.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cs = c.to_str_radix(10);
            parts.push(match i {
                0 => cs,
                1 if cs == "1" => String::from("w"),
                1 => format!("{}*w", cs),
                _ if cs == "1" => format!("w^{}", i),
                _ => format!("{}*w^{}", cs, i),
            });
        }
        parts.join(" + ")
    }
}

impl LocalRing for UnramifiedRing {
    fn prime(&self) -> u64 {
        self.base.prime()
    }

    fn precision(&self) -> u32 {
        self.base.precision()
    }

    fn residue_degree(&self) -> u32 {
        self.degree() as u32
    }

    fn valuation(&self, a: &UnramifiedElt) -> Option<u32> {
        a.iter().filter_map(|c| self.base.valuation(c)).min()
    }

    fn unit_inverse(&self, a: &UnramifiedElt) -> Option<UnramifiedElt> {
        if self.valuation(a) != Some(0) {
            return None;
        }
        // Inverse in the residue field by extended Euclid against phi,
        // then Newton x <- x (2 - a x) at full precision; each step doubles
        // the p-adic accuracy starting from exact mod p.
        let field = self.residue_field();
        let fp = field.base().clone();
        let a_bar = ModPoly::new(fp.clone(), a.iter().map(|c| fp.reduce_uint(c)).collect());
        let phi_bar = ModPoly::new(
            fp.clone(),
            self.phi.iter().map(|&c| fp.from_i64(c as i64)).collect(),
        );
        let (g, u, _) = a_bar.extended_gcd(&phi_bar);
        debug_assert!(g.degree() == Some(0), "unit has invertible reduction");
        let g_inv = fp.unit_inverse(&g.coeff(0))?;
        let mut x: UnramifiedElt = {
            let mut v = self.zero();
            for (i, c) in u.scale(&g_inv).coeffs().iter().enumerate() {
                v[i] = c.clone();
            }
            v
        };
        let two = self.from_i64(2);
        let mut prec = 1u32;
        while prec < self.precision() {
            let ax = self.mul(a, &x);
            let corr = self.sub(&two, &ax);
            x = self.mul(&x, &corr);
            prec *= 2;
        }
        Some(x)
    }

    fn div_exact_p(&self, a: &UnramifiedElt, v: u32) -> UnramifiedElt {
        a.iter().map(|c| self.base.div_exact_p(c, v)).collect()
    }

    fn mul_p(&self, a: &UnramifiedElt, v: u32) -> UnramifiedElt {
        a.iter().map(|c| self.base.mul_p(c, v)).collect()
    }

    fn extension_generator(&self) -> UnramifiedElt {
        let mut v = self.zero();
        if self.degree() >= 2 {
            v[1] = self.base.one();
        } else {
            v[0] = self.base.one();
        }
        v
    }
}

/// First monic irreducible of degree f over F_p, in the order given by the
/// integer encoding c_0 + c_1 p + ... of the non-leading digits. Lifted
/// digits verbatim. For f = 1 this is x itself.
pub fn canonical_irreducible(p: u64, f: u32) -> Vec<u64> {
    assert!(f >= 1);
    if f == 1 {
        return vec![0, 1];
    }
    let field = ResidueRing::new(p, 1);
    let mut code = 0u64;
    loop {
        let mut digits = Vec::with_capacity(f as usize + 1);
        let mut c = code;
        for _ in 0..f {
            digits.push(c % p);
            c /= p;
        }
        digits.push(1);
        code += 1;
        let poly = ModPoly::new(
            field.clone(),
            digits.iter().map(|&d| BigUint::from(d)).collect(),
        );
        if poly.degree() == Some(f as usize) && is_irreducible(&poly) {
            return digits;
        }
    }
}

/// Irreducibility over F_q (q = p^residue_degree of the coefficient field):
/// x^(q^f) = x mod g together with gcd(x^(q^(f/r)) - x, g) = 1 for prime r | f.
pub fn is_irreducible<R: LocalRing>(g: &ModPoly<R>) -> bool {
    let Some(f) = g.degree() else { return false };
    if f == 0 {
        return false;
    }
    if f == 1 {
        return true;
    }
    let ring = g.ring().clone();
    debug_assert_eq!(ring.precision(), 1);
    let q = BigUint::from(ring.prime()).pow(ring.residue_degree());
    let x = ModPoly::x(ring.clone());
    // x^(q^j) mod g, iterated j times.
    let mut frob = x.clone();
    let mut frob_powers = Vec::with_capacity(f);
    for _ in 0..f {
        frob = frob.pow_mod(&q, g);
        frob_powers.push(frob.clone());
    }
    if frob_powers[f - 1] != x.rem(g) {
        return false;
    }
    let mut r = 2usize;
    let mut n = f;
    while r * r <= n {
        if n % r == 0 {
            let h = frob_powers[f / r - 1].sub(&x);
            if g.gcd(&h).degree() != Some(0) {
                return false;
            }
            while n % r == 0 {
                n /= r;
            }
        }
        r += 1;
    }
    if n > 1 {
        let h = frob_powers[f / n - 1].sub(&x);
        if g.gcd(&h).degree() != Some(0) {
            return false;
        }
    }
    true
}

/// All roots of f in the (field) coefficient ring: linear factors of the
/// squarefree part. Sorted canonically.
pub fn field_roots<R: LocalRing>(f: &ModPoly<R>) -> Vec<R::Elt> {
    assert_eq!(f.ring().precision(), 1);
    let ring = f.ring().clone();
    if f.degree().is_none_or(|d| d == 0) {
        return vec![];
    }
    let sqf = {
        let d = f.derivative();
        if d.is_zero() {
            // f = g(x^p); every root of f is a root of g at the same points,
            // and over a perfect field the radical still sees them. Peel by
            // gcd with x^q - x directly instead.
            let q = BigUint::from(ring.prime()).pow(ring.residue_degree());
            let xq = ModPoly::x(ring.clone()).pow_mod(&q, f);
            let lin = xq.sub(&ModPoly::x(ring.clone()));
            f.gcd(&lin)
        } else {
            f.monic().divrem(&f.gcd(&d)).0
        }
    };
    // Restrict to the part that splits into linear factors over the field.
    let q = BigUint::from(ring.prime()).pow(ring.residue_degree());
    let xq = ModPoly::x(ring.clone()).pow_mod(&q, &sqf);
    let linear_part = sqf.gcd(&xq.sub(&ModPoly::x(ring.clone())));
    if linear_part.degree().is_none_or(|d| d == 0) {
        return vec![];
    }
    let factors = factor_squarefree_field(&linear_part);
    let mut roots: Vec<R::Elt> = factors
        .iter()
        .filter(|g| g.degree() == Some(1))
        .map(|g| ring.neg(&g.coeff(0)))
        .collect();
    roots.sort_by(|a, b| crate::modpoly::elt_key(&ring, a).cmp(&crate::modpoly::elt_key(&ring, b)));
    roots
}

/// Newton-lift a simple root: x0 lives in the ring, g(x0) = 0 mod p and
/// g'(x0) is a unit. Converges to the unique root congruent to x0.
pub fn lift_simple_root(g: &ModPoly<UnramifiedRing>, x0: &UnramifiedElt) -> UnramifiedElt {
    let ring = g.ring().clone();
    let dg = g.derivative();
    let mut z = x0.clone();
    let mut prec = 1u32;
    while prec < ring.precision() {
        let fz = g.eval(&z);
        let dz = dg.eval(&z);
        let dz_inv = ring
            .unit_inverse(&dz)
            .expect("lift_simple_root: derivative must be a unit");
        z = ring.sub(&z, &ring.mul(&fz, &dz_inv));
        prec *= 2;
    }
    z
}

/// Exact coordinates in Z[w]/(phi): length-f vectors of unbounded integers.
/// The intermediate representation of the integral root search, where no
/// working modulus can silently truncate a digit that a later division by p
/// would have needed.
type ExactElt = Vec<BigInt>;

fn exact_add(a: &ExactElt, b: &ExactElt) -> ExactElt {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn exact_scale_int(a: &ExactElt, k: &BigInt) -> ExactElt {
    a.iter().map(|x| x * k).collect()
}

fn exact_mul(a: &ExactElt, b: &ExactElt, phi: &[BigInt]) -> ExactElt {
    let f = phi.len() - 1;
    let mut c = vec![BigInt::zero(); 2 * f - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    // phi is monic: w^f = -(phi_0 + ... + phi_{f-1} w^{f-1}).
    for i in (f..c.len()).rev() {
        let top = core::mem::replace(&mut c[i], BigInt::zero());
        if top.is_zero() {
            continue;
        }
        for (j, pj) in phi[..f].iter().enumerate() {
            if pj.is_zero() {
                continue;
            }
            c[i - f + j] -= &top * pj;
        }
    }
    c.truncate(f);
    c
}

fn int_val(x: &BigInt, p: &BigInt) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let mut v = 0u32;
    let mut y = x.clone();
    while (&y % p).is_zero() {
        y = &y / p;
        v += 1;
    }
    Some(v)
}

fn exact_val(a: &ExactElt, p: &BigInt) -> Option<u32> {
    a.iter().filter_map(|c| int_val(c, p)).min()
}

/// g(r + p z) as an exact polynomial in z, by Horner against r + p z.
fn exact_shift_scale(g: &[ExactElt], r: &ExactElt, p: &BigInt, phi: &[BigInt]) -> Vec<ExactElt> {
    let f = phi.len() - 1;
    let zero = vec![BigInt::zero(); f];
    let d = g.len() - 1;
    let mut res: Vec<ExactElt> = vec![g[d].clone()];
    for i in (0..d).rev() {
        let mut out = vec![zero.clone(); res.len() + 1];
        for (j, c) in res.iter().enumerate() {
            out[j] = exact_add(&out[j], &exact_mul(c, r, phi));
            out[j + 1] = exact_add(&out[j + 1], &exact_scale_int(c, p));
        }
        out[0] = exact_add(&out[0], &g[i]);
        res = out;
    }
    res
}

/// Reduce exact coordinates into a ring of the same extension.
fn exact_into_ring(w: &UnramifiedRing, a: &ExactElt) -> UnramifiedElt {
    let pm = BigInt::from(w.base().modulus().clone());
    w.from_coords(
        a.iter()
            .map(|c| {
                let mut r = c % &pm;
                if r.sign() == num_bigint::Sign::Minus {
                    r += &pm;
                }
                r.to_biguint().expect("nonnegative after normalization")
            })
            .collect(),
    )
}

/// How many shift-and-scale levels the search will descend before deciding
/// the input violates its squarefreeness contract. Distinct roots of a
/// squarefree polynomial separate at depth at most v_p(disc)/2, far below
/// this for any characteristic polynomial the crate produces.
const CLUSTER_DEPTH_CAP: u32 = 192;

fn integral_roots_rec(
    g: &[ExactElt],
    w: &UnramifiedRing,
    phi: &[BigInt],
    n: u32,
    depth: u32,
    out: &mut Vec<ExactElt>,
) -> Result<(), Error> {
    if depth > CLUSTER_DEPTH_CAP {
        return Err(Error::PrecisionLoss(String::from(
            "root clusters failed to separate within the recursion depth cap",
        )));
    }
    let field = w.residue_field();
    let gbar = ModPoly::new(
        field.clone(),
        g.iter().map(|c| exact_into_ring(&field, c)).collect(),
    );
    let residue_roots = field_roots(&gbar);
    if residue_roots.is_empty() {
        return Ok(());
    }
    let dgbar = gbar.derivative();
    let p_int = BigInt::from(w.prime());
    for rbar in residue_roots {
        if !field.is_zero(&dgbar.eval(&rbar)) {
            // Separated: the unique root over this residue, Newton-lifted in
            // the finite ring at the precision still owed.
            let wn = w.with_precision(n);
            let gn = ModPoly::new(
                wn.clone(),
                g.iter().map(|c| exact_into_ring(&wn, c)).collect(),
            );
            let x0 = wn.from_coords(rbar.clone());
            let root = lift_simple_root(&gn, &x0);
            out.push(root.into_iter().map(BigInt::from).collect());
        } else {
            // A cluster of roots sharing this residue: carry the whole
            // cluster into x = r + p z and recurse on g(r + p z) with its
            // p-power content removed. Roots of g in a ramified extension
            // produce, at their would-be separation level, a residue
            // polynomial with no roots, and the branch ends with nothing.
            let r: ExactElt = rbar.into_iter().map(BigInt::from).collect();
            let shifted = exact_shift_scale(g, &r, &p_int, phi);
            let content = shifted
                .iter()
                .filter_map(|a| exact_val(a, &p_int))
                .min()
                .expect("the shifted polynomial of a unit-content input is nonzero");
            let pc = p_int.pow(content);
            let reduced: Vec<ExactElt> = shifted
                .iter()
                .map(|a| a.iter().map(|x| x / &pc).collect())
                .collect();
            let before = out.len();
            integral_roots_rec(&reduced, w, phi, (n - 1).max(1), depth + 1, out)?;
            for z in &mut out[before..] {
                *z = exact_add(&r, &exact_scale_int(z, &p_int));
            }
        }
    }
    Ok(())
}

/// All roots of an integer polynomial in this ring's full Witt ring
/// W(F_{p^f}), reduced to the ring's precision: the genuine unramified
/// eigenvalue approximations, never the larger solution set of g = 0 mod
/// p^M that deep root clusters smear into balls. Requires g squarefree
/// over the integers. Congruent roots are chased by the substitution
/// x = r + p z on exact integer coordinates, so a cluster costs recursion
/// depth equal to its separation, not branch width; each root is finished
/// by Newton the moment it separates. Roots living in a ramified extension
/// are correctly absent.
pub fn all_integral_roots(g: &IntPoly, w: &UnramifiedRing) -> Result<Vec<UnramifiedElt>, Error> {
    debug_assert!(
        g.is_squarefree(),
        "integral root search needs a squarefree polynomial"
    );
    let f = w.degree();
    let mut gx: Vec<ExactElt> = g
        .coeffs()
        .iter()
        .map(|c| {
            let mut v = vec![BigInt::zero(); f];
            v[0] = c.clone();
            v
        })
        .collect();
    if gx.len() <= 1 {
        return Ok(Vec::new());
    }
    let p_int = BigInt::from(w.prime());
    if let Some(content) = gx.iter().filter_map(|a| exact_val(a, &p_int)).min() {
        if content > 0 {
            let pc = p_int.pow(content);
            for a in &mut gx {
                for x in a.iter_mut() {
                    *x = &*x / &pc;
                }
            }
        }
    }
    let phi: Vec<BigInt> = w.modulus_poly().iter().map(|&c| BigInt::from(c)).collect();
    let mut found: Vec<ExactElt> = Vec::new();
    integral_roots_rec(&gx, w, &phi, w.precision(), 0, &mut found)?;
    let mut roots: Vec<UnramifiedElt> = found.iter().map(|c| exact_into_ring(w, c)).collect();
    roots.sort_by(|a, b| {
        crate::modpoly::elt_key(w, a).cmp(&crate::modpoly::elt_key(w, b))
    });
    // Roots congruent beyond the ring precision reduce to one value.
    roots.dedup();
    Ok(roots)
}
