//! Hecke eigensystems modulo prime powers.
//!
//! A *strong* eigensystem at weight k mod p^m is read off a simultaneous
//! eigenvector of the integer Hecke operators on the cusp space, with the
//! eigenvalues carried in an unramified coefficient ring W(p, m, f). A
//! *weak* eigenform is a q-expansion over Z/p^m that every T_n fixes up
//! to scalar through the Sturm bound of its weight. This module extracts
//! strong systems, decides weak eigenform-ness, compares systems across
//! weights, builds the averaged family (a f + b g)/(a + b), and finds the
//! minimal weight at which a system occurs weakly.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};

use crate::charpoly::charpoly_int;
use crate::error::Error;
use crate::forms::{dim_sk, eisenstein, eisenstein_unit, miller_basis_cusp_in, sturm_bound};
use crate::hecke::{hecke_matrix_cusp, hecke_tn};
use crate::linear::{kernel, Mat};
use crate::modpoly::{elt_key, ModPoly};
use crate::qseries::{reduce_integral, QExpansion};
use crate::ring::{IntegerRing, LocalRing, ResidueRing, Ring};
use crate::unramified::{
    all_integral_roots, field_roots, lift_simple_root, UnramifiedElt, UnramifiedRing,
};

/// The weight step that multiplication by a unit form realizes mod p^m:
/// (p-1) p^(m-1) for odd p, and for p = 2 the even step 2 when m <= 3
/// (where the Q^a R^b multipliers give every even gap except 2) or
/// 2^(m-2) beyond.
pub fn phi_tilde(p: u64, m: u32) -> u64 {
    assert!(m >= 1);
    if p == 2 {
        if m <= 3 {
            2
        } else {
            1u64 << (m - 2)
        }
    } else {
        (p - 1) * p.pow(m - 1)
    }
}

/// A Hecke eigensystem modulo p^m with coefficients in the unramified
/// ring W(p, m, f) of residue degree f.
///
/// `coefficients[n-1]` is a_n as a coordinate vector of length f over the
/// canonical basis of W (canonical representatives in [0, p^m)), for n up
/// to the Sturm bound of the weight; a_1 = 1. A `ramified` entry records
/// a charpoly factor whose eigenvalues live in no unramified extension at
/// the working precision: it carries the factor degree in
/// `residue_degree` but no coefficient claims and an empty modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Eigensystem {
    pub level: u64,
    pub weight: u64,
    pub p: u64,
    pub m: u32,
    pub residue_degree: u32,
    /// Coefficients of the defining polynomial of W over Z/p^m, ascending,
    /// entries in [0, p); empty for ramified entries.
    pub modulus_poly: Vec<u64>,
    pub coefficients: Vec<Vec<BigUint>>,
    pub ramified: bool,
}

impl Eigensystem {
    /// The largest n with a stored coefficient.
    pub fn bound(&self) -> usize {
        self.coefficients.len()
    }

    /// a_n as a coordinate vector (1-based n).
    pub fn a(&self, n: usize) -> &[BigUint] {
        &self.coefficients[n - 1]
    }

    /// The coefficient ring the system lives in, at its claim precision.
    pub fn coefficient_ring(&self) -> UnramifiedRing {
        UnramifiedRing::standard(self.p, self.m, self.residue_degree)
    }
}

fn sort_systems(v: &mut [Eigensystem]) {
    v.sort_by(|a, b| {
        (a.ramified, a.residue_degree, &a.coefficients)
            .cmp(&(b.ramified, b.residue_degree, &b.coefficients))
    });
}

struct GeneratorChoice {
    label: String,
    mat: Mat<IntegerRing>,
    charpoly: crate::intpoly::IntPoly,
    squarefree_mod_p: bool,
}

fn poly_is_squarefree(f: &ModPoly<ResidueRing>) -> bool {
    let d = f.derivative();
    if d.is_zero() {
        return false;
    }
    f.gcd(&d).degree() == Some(0)
}

/// Pick the operator whose eigenvalues will label the systems: the first
/// of T_2, T_3, T_5, T_7, T_2 + c T_3 (c < p) whose characteristic
/// polynomial is squarefree mod p, which makes the factor lifting exact.
/// When every candidate collides mod p — unavoidable for p = 2, where all
/// cusp eigenvalues are even — fall back to the first candidate that is
/// at least squarefree over the integers and find its p-adic roots by
/// digit branching instead.
fn find_generator(k: u64, p: u64) -> Result<GeneratorChoice, Error> {
    let t2 = hecke_matrix_cusp(k, 2);
    let t3 = hecke_matrix_cusp(k, 3);
    let mut candidates: Vec<(String, Mat<IntegerRing>)> = vec![
        (String::from("T_2"), t2.clone()),
        (String::from("T_3"), t3.clone()),
        (String::from("T_5"), hecke_matrix_cusp(k, 5)),
        (String::from("T_7"), hecke_matrix_cusp(k, 7)),
    ];
    for c in 1..p {
        candidates.push((
            format!("T_2 + {} T_3", c),
            t2.add(&t3.scale(&BigInt::from(c))),
        ));
    }
    let fp = ResidueRing::new(p, 1);
    let mut notes = Vec::new();
    for (label, mat) in &candidates {
        let cp = charpoly_int(mat);
        if poly_is_squarefree(&cp.reduce(&fp)) {
            return Ok(GeneratorChoice {
                label: label.clone(),
                mat: mat.clone(),
                charpoly: cp,
                squarefree_mod_p: true,
            });
        }
        notes.push(format!("{} collides mod {}", label, p));
    }
    for (label, mat) in &candidates {
        let cp = charpoly_int(mat);
        if cp.is_squarefree() {
            return Ok(GeneratorChoice {
                label: label.clone(),
                mat: mat.clone(),
                charpoly: cp,
                squarefree_mod_p: false,
            });
        }
        notes.push(format!("{} not squarefree over Z", label));
    }
    Err(Error::GeneratorNotFound(format!(
        "weight {}, p = {}: {}",
        k,
        p,
        notes.join("; ")
    )))
}

fn ramified_entry(k: u64, p: u64, m: u32, f: u32) -> Eigensystem {
    Eigensystem {
        level: 1,
        weight: k,
        p,
        m,
        residue_degree: f,
        modulus_poly: Vec::new(),
        coefficients: Vec::new(),
        ramified: true,
    }
}

/// The canonical root of an irreducible-mod-p factor: the lex-least root
/// of its reduction in the residue field, Newton-lifted.
fn canonical_factor_root(
    fac: &ModPoly<ResidueRing>,
    w: &UnramifiedRing,
    ring_m: &ResidueRing,
) -> Result<UnramifiedElt, Error> {
    let deg = fac.degree().expect("a charpoly factor has positive degree");
    if deg == 1 {
        let c = fac.coeff(0);
        return Ok(w.embed_base(&ring_m.neg(&c)));
    }
    let gw = w.lift_poly(fac);
    let w1 = w.residue_field();
    let g1 = ModPoly::new(
        w1.clone(),
        gw.coeffs().iter().map(|c| w1.reduce_elt_from(c)).collect(),
    );
    let roots = field_roots(&g1);
    let r0 = roots.first().cloned().ok_or_else(|| {
        Error::PrecisionLoss(String::from(
            "an irreducible factor found no residue root in its own residue field",
        ))
    })?;
    Ok(lift_simple_root(&gw, &w.from_coords(r0)))
}

/// Read one eigensystem off a root of the generator's charpoly: kernel of
/// (generator - lambda), normalized to a_1 = 1, then every T_n applied and
/// checked to act by the scalar it reports. Residuals must survive well
/// into the slack digits; anything shallower is treated as a failed
/// extraction, not rounded away.
fn extract_one(
    w: &UnramifiedRing,
    lambda: &UnramifiedElt,
    gen: &GeneratorChoice,
    mats: &[Mat<IntegerRing>],
    k: u64,
    p: u64,
    m: u32,
    s: u32,
) -> Option<Eigensystem> {
    let d = mats[0].rows();
    let gw = gen.mat.map_ring(w, |c| w.from_int(c));
    let shifted = Mat::from_fn(w.clone(), d, d, |i, j| {
        if i == j {
            w.sub(gw.at(i, j), lambda)
        } else {
            gw.at(i, j).clone()
        }
    });
    let ker = kernel(&shifted);
    let v0 = ker.iter().find(|g| w.is_unit(&g[0]))?;
    let inv = w.unit_inverse(&v0[0]).expect("checked unit");
    let v: Vec<UnramifiedElt> = v0.iter().map(|c| w.mul(c, &inv)).collect();

    let thresh = m + s.div_ceil(2);
    let mut coeffs = Vec::with_capacity(mats.len());
    for mat in mats {
        let mw = mat.map_ring(w, |c| w.from_int(c));
        let img = mw.mul_vec(&v);
        let a_n = img[0].clone();
        for (c, vi) in img.iter().zip(&v) {
            let diff = w.sub(c, &w.mul(&a_n, vi));
            if let Some(val) = w.valuation(&diff) {
                if val < thresh {
                    return None;
                }
            }
        }
        coeffs.push(a_n);
    }
    let wm = w.with_precision(m);
    Some(Eigensystem {
        level: 1,
        weight: k,
        p,
        m,
        residue_degree: w.degree() as u32,
        modulus_poly: w.modulus_poly().to_vec(),
        coefficients: coeffs.iter().map(|c| wm.reduce_elt_from(c)).collect(),
        ramified: false,
    })
}

fn extract_all(
    k: u64,
    p: u64,
    m: u32,
    s: u32,
    gen: &GeneratorChoice,
    mats: &[Mat<IntegerRing>],
    final_attempt: bool,
) -> Result<Vec<Eigensystem>, Error> {
    let d = mats[0].rows();
    let big_m = m + s;
    let ring_m = ResidueRing::new(p, big_m);
    let cp_m = gen.charpoly.reduce(&ring_m);
    let mut out = Vec::new();

    if gen.squarefree_mod_p {
        for fac in crate::hensel::hensel_factor(&cp_m)? {
            let f = fac.degree().expect("positive factor degree") as u32;
            let w = UnramifiedRing::standard(p, big_m, f);
            let root = canonical_factor_root(&fac, &w, &ring_m)?;
            match extract_one(&w, &root, gen, mats, k, p, m, s) {
                Some(sys) => out.push(sys),
                None if final_attempt => out.push(ramified_entry(k, p, m, f)),
                None => {
                    return Err(Error::PrecisionLoss(format!(
                        "weight {}: extraction failed on a degree-{} factor of {} at slack {}",
                        k, f, gen.label, s
                    )))
                }
            }
        }
    } else {
        let mut mass = 0usize;
        for f in 1..=d as u32 {
            if mass == d {
                break;
            }
            let w = UnramifiedRing::standard(p, big_m, f);
            let roots = all_integral_roots(&gen.charpoly, &w)?;
            let sigma = w.frobenius_generator_image();
            'roots: for root in &roots {
                // Roots fixed by a proper power of Frobenius already
                // appeared at a smaller residue degree.
                for e in 1..f {
                    if f % e == 0 {
                        let mut img = root.clone();
                        for _ in 0..e {
                            img = w.apply_frobenius(&sigma, &img);
                        }
                        if img == *root {
                            continue 'roots;
                        }
                    }
                }
                // Keep one representative per Frobenius orbit: the
                // lex-least conjugate.
                let key = elt_key(&w, root);
                let mut img = root.clone();
                for _ in 1..f {
                    img = w.apply_frobenius(&sigma, &img);
                    if elt_key(&w, &img) < key {
                        continue 'roots;
                    }
                }
                mass += f as usize;
                match extract_one(&w, root, gen, mats, k, p, m, s) {
                    Some(sys) => out.push(sys),
                    None if final_attempt => out.push(ramified_entry(k, p, m, f)),
                    None => {
                        return Err(Error::PrecisionLoss(format!(
                            "weight {}: extraction failed on a branch-lifted root of {} at slack {}",
                            k, gen.label, s
                        )))
                    }
                }
            }
        }
        debug_assert!(mass <= d, "more eigenvalue mass than the space has dimension");
        if mass < d {
            // Whatever eigenvalue mass has no unramified root at this
            // precision is reported, never silently dropped.
            out.push(ramified_entry(k, p, m, (d - mass) as u32));
        }
    }
    sort_systems(&mut out);
    Ok(out)
}

/// All strong eigensystems on the weight-k cusp space mod p^m, one entry
/// per Frobenius orbit, sorted by (ramified, residue degree, coefficient
/// list). Internally works at precision m + s for a slack s that doubles
/// when residual checks detect precision loss; persistent loss is an
/// error, never a quietly wrong table.
pub fn strong_eigensystems(k: u64, p: u64, m: u32) -> Result<Vec<Eigensystem>, Error> {
    assert!(k % 2 == 0 && k >= 4, "level-one cusp spaces live in even weight >= 12");
    assert!(m >= 1);
    if dim_sk(k) == 0 {
        return Ok(Vec::new());
    }
    let b = sturm_bound(k);
    let mats: Vec<Mat<IntegerRing>> = (1..=b as u64).map(|n| hecke_matrix_cusp(k, n)).collect();
    let gen = find_generator(k, p)?;
    let mut s = 10u32;
    for attempt in 0..3 {
        match extract_all(k, p, m, s, &gen, &mats, attempt == 2) {
            Ok(systems) => return Ok(systems),
            Err(Error::PrecisionLoss(_)) if attempt < 2 => s *= 2,
            Err(e) => return Err(e),
        }
    }
    unreachable!("the final attempt returns or errors");
}

/// Outcome of the weak-eigenform test: either every T_n through the Sturm
/// bound acts by the scalar it reports (the scalars are returned,
/// normalized to a_1 = 1), or the least n that breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeakCheck<E> {
    Eigenform { eigenvalues: Vec<E> },
    NotEigenform { index: usize },
}

/// Decide whether f is a weak eigenform for its tagged weight k: check
/// T_n f = a_n(f) f for every n up to B = sturm_bound(k), comparing the
/// first B + 1 coefficients, which pin a weight-k form. Needs precision
/// B (B + 1) so every T_n image is long enough; a_1 must be a unit.
pub fn is_weak_eigenform<R: LocalRing>(f: &QExpansion<R>) -> Result<WeakCheck<R::Elt>, Error> {
    let kw = f.weight().ok_or(Error::MissingWeightTag)?;
    assert!(kw >= 0);
    let b = sturm_bound(kw as u64);
    let needed = b * (b + 1);
    if f.prec() < needed {
        return Err(Error::PrecisionTooSmall { needed, have: f.prec() });
    }
    let ring = f.ring();
    let Some(inv) = ring.unit_inverse(f.coeff(1)) else {
        return Err(Error::NotNormalized);
    };
    let g = f.scale(&inv);
    let mut eigenvalues = Vec::with_capacity(b);
    for n in 1..=b {
        let tn = hecke_tn(&g, n as u64)?;
        let lam = g.coeff(n).clone();
        let upto = tn.prec().min(b + 1);
        for idx in 0..upto {
            if *tn.coeff(idx) != ring.mul(&lam, g.coeff(idx)) {
                return Ok(WeakCheck::NotEigenform { index: n });
            }
        }
        eigenvalues.push(lam);
    }
    Ok(WeakCheck::Eigenform { eigenvalues })
}

/// Compare two tagged forms over Z/p^m as forms, moving the lower weight
/// up by a unit multiplier when the weights differ: E_(p-1)^(p^(m-1))
/// powers for p >= 5, Q^a R^b for p = 2 with m <= 3 (every even gap
/// except 2), Q^(2^(m-4)) powers for p = 2 with m >= 4. Weights the
/// multipliers cannot bridge are NotComparable; p = 3 has no unit form,
/// so cross-weight comparison is unsupported there.
pub fn equal_mod_pm(
    f: &QExpansion<ResidueRing>,
    g: &QExpansion<ResidueRing>,
) -> Result<bool, Error> {
    let ring = f.ring();
    if ring.prime() != g.ring().prime() || ring.precision() != g.ring().precision() {
        return Err(Error::RingMismatch);
    }
    let kf = f.weight().ok_or(Error::MissingWeightTag)?;
    let kg = g.weight().ok_or(Error::MissingWeightTag)?;
    assert!(kf >= 0 && kg >= 0);
    let (lo, hi) = if kf <= kg { (f, g) } else { (g, f) };
    let diff = (kf - kg).unsigned_abs();
    let bound = sturm_bound(kf.max(kg) as u64);
    let have = f.prec().min(g.prec());
    if have < bound {
        return Err(Error::PrecisionTooSmall { needed: bound, have });
    }

    let lifted;
    let lo_cmp: &QExpansion<ResidueRing> = if diff == 0 {
        lo
    } else {
        let p = ring.prime();
        let m = ring.precision();
        let mult: QExpansion<IntegerRing> = match p {
            3 => return Err(Error::UnsupportedPrime(3)),
            2 if m <= 3 => {
                if diff % 2 != 0 || diff == 2 {
                    return Err(Error::NotComparable);
                }
                let (a, b6) = if diff % 4 == 0 {
                    (diff / 4, 0)
                } else {
                    ((diff - 6) / 4, 1)
                };
                let q = eisenstein(4, bound)?.pow(a as u32);
                if b6 == 0 {
                    q
                } else {
                    q.mul(&eisenstein(6, bound)?)
                }
            }
            _ => {
                let phi = phi_tilde(p, m);
                if diff % phi != 0 {
                    return Err(Error::NotComparable);
                }
                eisenstein_unit(p, m, bound)?.pow((diff / phi) as u32)
            }
        };
        lifted = lo.truncated(bound).mul(&reduce_integral(&mult, ring));
        &lifted
    };
    for n in 0..bound {
        if lo_cmp.coeff(n) != hi.coeff(n) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The averaged form (a f + b g)/(a + b) for forms of one weight that
/// agree mod p but not mod p^2, with a + b a unit. The coefficient ring
/// is any local ring of precision 2 — distinct averages need ratios from
/// unramified extensions once the prime is exhausted, so the scalars a
/// and b live in the same ring as the forms. Each hypothesis failure has
/// its own error so callers can tell the degenerate configurations apart.
pub fn construct_hab<R: LocalRing>(
    f: &QExpansion<R>,
    g: &QExpansion<R>,
    a: &R::Elt,
    b: &R::Elt,
) -> Result<QExpansion<R>, Error> {
    let ring = f.ring();
    if ring.prime() != g.ring().prime() || ring.precision() != g.ring().precision() {
        return Err(Error::RingMismatch);
    }
    if ring.precision() != 2 {
        return Err(Error::UnsupportedExponent(ring.precision()));
    }
    let kf = f.weight().ok_or(Error::MissingWeightTag)?;
    let kg = g.weight().ok_or(Error::MissingWeightTag)?;
    if kf != kg {
        return Err(Error::WeightMismatch(kf, kg));
    }
    let bound = sturm_bound(kf as u64);
    let have = f.prec().min(g.prec());
    if have < bound {
        return Err(Error::PrecisionTooSmall { needed: bound, have });
    }
    let mut congruent_mod_p2 = true;
    for n in 0..have {
        match ring.valuation(&ring.sub(f.coeff(n), g.coeff(n))) {
            None => {}
            Some(0) => return Err(Error::NotCongruentModP),
            Some(_) => congruent_mod_p2 = false,
        }
    }
    if congruent_mod_p2 {
        return Err(Error::CongruentModPSquared);
    }
    let denom = ring.add(a, b);
    let Some(dinv) = ring.unit_inverse(&denom) else {
        return Err(Error::NonUnitDenominator);
    };
    Ok(f.scale(a).add(&g.scale(b)).scale(&dinv))
}

/// The eigenvalue law of the averaged form: nu_n = (a lambda_n + b mu_n)
/// / (a + b), which reduces to the common value mod p and averages the
/// first-order parts.
pub fn hab_eigenvalues<R: LocalRing>(
    ring: &R,
    lambda: &[R::Elt],
    mu: &[R::Elt],
    a: &R::Elt,
    b: &R::Elt,
) -> Result<Vec<R::Elt>, Error> {
    assert_eq!(lambda.len(), mu.len());
    let denom = ring.add(a, b);
    let dinv = ring.unit_inverse(&denom).ok_or(Error::NonUnitDenominator)?;
    Ok(lambda
        .iter()
        .zip(mu)
        .map(|(l, u)| ring.mul(&ring.add(&ring.mul(a, l), &ring.mul(b, u)), &dinv))
        .collect())
}

/// Does the system occur as a weak eigenform of weight kp? The cusp
/// echelon basis is unitriangular in its leading coefficients, so the
/// only candidate has the system's own a_j as coordinates; it occurs
/// exactly when that candidate reproduces every stored coefficient up to
/// the cross-weight Sturm bound and passes the weak-eigenform test at kp.
fn occurs_at(sys: &Eigensystem, kp: u64) -> Result<bool, Error> {
    let w = sys.coefficient_ring();
    let match_bound = sturm_bound(sys.weight.max(kp));
    assert!(
        sys.bound() >= match_bound,
        "system must store coefficients through the cross-weight bound"
    );
    let bp = sturm_bound(kp);
    let prec = (bp * (bp + 1)).max(match_bound) + 1;
    let basis = miller_basis_cusp_in(kp, &w, prec);
    let mut g = QExpansion::zero(w.clone(), prec, Some(kp as i64));
    for (j, bj) in basis.iter().enumerate() {
        let coord = sys.a(j + 1).to_vec();
        g = g.add(&bj.clone().with_weight(Some(kp as i64)).scale(&coord));
    }
    for n in 1..=match_bound {
        if g.coeff(n).as_slice() != sys.a(n) {
            return Ok(false);
        }
    }
    Ok(matches!(
        is_weak_eigenform(&g)?,
        WeakCheck::Eigenform { .. }
    ))
}

/// The least weight, scanned upward through the arithmetic progression
/// k mod phi_tilde(p^m), at which the system occurs as a weak eigenform.
/// The system's own weight always succeeds, so the scan terminates.
/// Unsupported coefficient settings (p = 3 across weights, p = 2 below
/// m = 4, ramified entries) are rejected up front.
pub fn min_weak_weight(sys: &Eigensystem) -> Result<u64, Error> {
    assert_eq!(sys.level, 1, "occurrence search is a level-one computation");
    if sys.ramified {
        return Err(Error::HypothesisNotMet(String::from(
            "a ramified entry carries no coefficient claims to match",
        )));
    }
    match (sys.p, sys.m) {
        (2, m) if m <= 3 => return Err(Error::UnsupportedExponent(m)),
        (3, _) => return Err(Error::UnsupportedPrime(3)),
        _ => {}
    }
    let phi = phi_tilde(sys.p, sys.m);
    let mut kp = sys.weight % phi;
    while kp < 12 {
        kp += phi;
    }
    while kp <= sys.weight {
        if dim_sk(kp) > 0 && occurs_at(sys, kp)? {
            return Ok(kp);
        }
        kp += phi;
    }
    Err(Error::HypothesisNotMet(format!(
        "the weight-{} system failed to occur at its own weight",
        sys.weight
    )))
}

/// One strong system together with its minimal weak weight; ramified
/// entries carry None.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurveyRow {
    pub system: Eigensystem,
    pub min_weight: Option<u64>,
}

/// The assembled survey: all rows in canonical order, the maximum of the
/// unramified minimal weights, and the comparator bound
/// 2 p^m + p^2 + 1 (or p^2 + p when m = 1) the maximum is measured
/// against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Survey {
    pub p: u64,
    pub m: u32,
    pub k_max: u64,
    pub rows: Vec<SurveyRow>,
    pub comparator: u64,
    pub max_min_weight: Option<u64>,
    pub ramified_count: usize,
}

fn check_survey_setting(p: u64, m: u32) -> Result<(), Error> {
    match (p, m) {
        (2, m) if m <= 3 => Err(Error::UnsupportedExponent(m)),
        (3, _) => Err(Error::UnsupportedPrime(3)),
        _ => Ok(()),
    }
}

/// Survey rows for a single weight; exposed separately so callers can
/// fan weights out across workers and still assemble one deterministic
/// table.
pub fn survey_weight(p: u64, m: u32, k: u64) -> Result<Vec<SurveyRow>, Error> {
    check_survey_setting(p, m)?;
    strong_eigensystems(k, p, m)?
        .into_iter()
        .map(|system| {
            let min_weight = if system.ramified {
                None
            } else {
                Some(min_weak_weight(&system)?)
            };
            Ok(SurveyRow { system, min_weight })
        })
        .collect()
}

/// Deterministically order rows and compute the summary, whatever order
/// the rows arrived in.
pub fn assemble_survey(p: u64, m: u32, k_max: u64, mut rows: Vec<SurveyRow>) -> Survey {
    rows.sort_by(|a, b| {
        (
            a.system.weight,
            a.system.ramified,
            a.system.residue_degree,
            &a.system.coefficients,
        )
            .cmp(&(
                b.system.weight,
                b.system.ramified,
                b.system.residue_degree,
                &b.system.coefficients,
            ))
    });
    let comparator = if m == 1 { p * p + p } else { 2 * p.pow(m) + p * p + 1 };
    let max_min_weight = rows.iter().filter_map(|r| r.min_weight).max();
    let ramified_count = rows.iter().filter(|r| r.system.ramified).count();
    Survey { p, m, k_max, rows, comparator, max_min_weight, ramified_count }
}

/// The full survey over even weights 12..=k_max, sequentially.
pub fn survey_min_weights(p: u64, m: u32, k_max: u64) -> Result<Survey, Error> {
    check_survey_setting(p, m)?;
    let mut rows = Vec::new();
    let mut k = 12;
    while k <= k_max {
        rows.extend(survey_weight(p, m, k)?);
        k += 2;
    }
    Ok(assemble_survey(p, m, k_max, rows))
}
