//! Hecke operators on level-one q-expansions, their integral matrices on
//! the cusp echelon basis, slope data from 2x2 Newton polygons, and the
//! theta operator.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::Error;
use crate::forms::{dim_sk, miller_basis_cusp_in, miller_expand};
use crate::intpoly::IntPoly;
use crate::linear::Mat;
use crate::qseries::QExpansion;
use crate::ring::{int_valuation, IntegerRing, LocalRing, ResidueRing, Ring};

/// T_n on a weight-tagged series:
/// a_m(T_n f) = sum over d | gcd(m, n) of d^(k-1) a_(mn/d^2).
/// Output precision floor(P/n).
pub fn hecke_tn<R: Ring>(f: &QExpansion<R>, n: u64) -> Result<QExpansion<R>, Error> {
    assert!(n >= 1);
    let k = f.weight().ok_or(Error::MissingWeightTag)?;
    assert!(k >= 1, "Hecke action needs positive weight");
    let ring = f.ring().clone();
    let out_prec = f.prec() / n as usize;
    let mut coeffs = Vec::with_capacity(out_prec);
    for m in 0..out_prec as u64 {
        let mut acc = ring.zero();
        let g = m.gcd(&n);
        for d in 1..=g {
            if g % d != 0 {
                continue;
            }
            let scale = ring.from_int(&BigInt::from(d).pow(k as u32 - 1));
            let idx = (m / d) * (n / d);
            let t = ring.mul(&scale, f.coeff(idx as usize));
            acc = ring.add(&acc, &t);
        }
        coeffs.push(acc);
    }
    Ok(QExpansion::new(ring, coeffs, Some(k)))
}

/// U_p: a_m -> a_(pm). Output precision floor(P/p).
pub fn u_p<R: Ring>(f: &QExpansion<R>, p: u64) -> QExpansion<R> {
    let out_prec = f.prec() / p as usize;
    let coeffs = (0..out_prec).map(|m| f.coeff(m * p as usize).clone()).collect();
    QExpansion::new(f.ring().clone(), coeffs, f.weight())
}

/// Matrix of T_n on the cusp echelon basis of S_k, over Z. Column j holds
/// the coordinates of T_n b_(j+1), which for an echelon basis are read off
/// the leading coefficients; the remainder of each image is then checked
/// to still lie in the span, so a precision shortfall cannot pass silently.
pub fn hecke_matrix_cusp(k: u64, n: u64) -> Mat<IntegerRing> {
    let d = dim_sk(k);
    if d == 0 {
        return Mat::zero(IntegerRing, 0, 0);
    }
    let out_need = d + 3;
    let prec = n as usize * out_need;
    let basis = miller_basis_cusp_in(k, &IntegerRing, prec);
    let short: Vec<_> = basis.iter().map(|b| b.truncated(out_need)).collect();
    let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(d);
    for b in &basis {
        let tb = hecke_tn(b, n).expect("basis series are weight-tagged");
        let coords =
            miller_expand(&tb.truncated(out_need), &short).expect("Hecke image stays in the span");
        cols.push(coords);
    }
    Mat::from_fn(IntegerRing, d, d, |i, j| cols[j][i].clone())
}

/// Valuations with denominator at most 2, as used for slopes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct HalfInt(pub i64);

impl HalfInt {
    pub fn from_int(n: i64) -> Self {
        HalfInt(2 * n)
    }

    pub fn halves(self) -> i64 {
        self.0
    }

    pub fn to_string_frac(self) -> String {
        if self.0 % 2 == 0 {
            format!("{}", self.0 / 2)
        } else {
            format!("{}/2", self.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slope {
    Finite(HalfInt),
    /// Valuation of an exact zero.
    Infinite,
    /// Known only to be at least this, because the input is zero modulo
    /// the working precision.
    AtLeast(u32),
}

impl Slope {
    pub fn to_string_slope(self) -> String {
        match self {
            Slope::Finite(h) => h.to_string_frac(),
            Slope::Infinite => String::from("inf"),
            Slope::AtLeast(m) => format!(">={}", m),
        }
    }
}

/// Slope data of x^2 - a_p x + p^(k-1): the valuation of a_p and the two
/// root valuations from the Newton polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlopeData {
    pub v_ap: Slope,
    pub roots: (Slope, Slope),
}

fn roots_from_valuation(v: Option<u32>, k: u64) -> (Slope, Slope) {
    let edge = k as i64 - 1;
    let mid = HalfInt(edge);
    match v {
        Some(v) if 2 * (v as i64) < edge => (
            Slope::Finite(HalfInt::from_int(v as i64)),
            Slope::Finite(HalfInt::from_int(edge - v as i64)),
        ),
        _ => (Slope::Finite(mid), Slope::Finite(mid)),
    }
}

/// Exact integer a_p.
pub fn slope_data_exact(p: u64, k: u64, ap: &BigInt) -> SlopeData {
    let v = int_valuation(p, ap);
    let v_ap = match v {
        None => Slope::Infinite,
        Some(v) => Slope::Finite(HalfInt::from_int(v as i64)),
    };
    SlopeData { v_ap, roots: roots_from_valuation(v, k) }
}

/// a_p known only modulo p^precision; a residue of zero leaves the
/// valuation open-ended, and pins the roots only when the precision
/// already clears the middle of the polygon.
pub fn slope_data_mod(k: u64, ap_valuation: Option<u32>, precision: u32) -> SlopeData {
    match ap_valuation {
        Some(v) => SlopeData {
            v_ap: Slope::Finite(HalfInt::from_int(v as i64)),
            roots: roots_from_valuation(Some(v), k),
        },
        None => {
            let edge = k as i64 - 1;
            if 2 * (precision as i64) >= edge {
                let mid = HalfInt(edge);
                SlopeData {
                    v_ap: Slope::AtLeast(precision),
                    roots: (Slope::Finite(mid), Slope::Finite(mid)),
                }
            } else {
                SlopeData {
                    v_ap: Slope::AtLeast(precision),
                    roots: (Slope::AtLeast(precision), Slope::AtLeast(precision)),
                }
            }
        }
    }
}

/// a_n -> n^t a_n, with no claim about the weight.
pub fn theta_raw<R: Ring>(f: &QExpansion<R>, t: u32) -> QExpansion<R> {
    let ring = f.ring().clone();
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, a)| {
            let scale = ring.from_int(&BigInt::from(n).pow(t));
            ring.mul(&scale, a)
        })
        .collect();
    QExpansion::new(ring, coeffs, None)
}

/// The theta operator on forms mod p^m for p >= 5: coefficients n^t a_n,
/// weight k + t (2 + 2 p^(m-1) (p-1)).
pub fn theta_iterate(f: &QExpansion<ResidueRing>, t: u32) -> Result<QExpansion<ResidueRing>, Error> {
    let ring = f.ring().clone();
    let p = ring.prime();
    if p < 5 {
        return Err(Error::UnsupportedPrime(p));
    }
    let k = f.weight().ok_or(Error::MissingWeightTag)?;
    let m = ring.precision();
    let step = 2 + 2 * p.pow(m - 1) as i64 * (p as i64 - 1);
    let new_weight = k + t as i64 * step;
    Ok(theta_raw(f, t).with_weight(Some(new_weight)))
}

/// Characteristic polynomial of U_ell on the old subspace generated by an
/// eigenform with T_ell eigenvalue a and character value eps at ell,
/// pushed out by r levels: (x^2 - a x + delta eps ell^(k-1)) * x^(r-1).
/// `delta_flag` zeroes the constant term for the degenerate case.
pub fn oldform_uell_charpoly(
    a: &BigInt,
    eps: &BigInt,
    ell: u64,
    k: u64,
    r: u32,
    delta_flag: u8,
) -> IntPoly {
    assert!(r >= 1);
    assert!(delta_flag <= 1);
    let constant = BigInt::from(delta_flag) * eps * BigInt::from(ell).pow(k as u32 - 1);
    let quad = IntPoly::new(alloc::vec![constant, -a.clone(), BigInt::from(1)]);
    let mut out = quad;
    for _ in 1..r {
        out = out.mul(&IntPoly::x());
    }
    out
}
