//! Level-one modular forms as exact q-expansions: Eisenstein series, the
//! discriminant, monomial spanning sets in Q = E4, R = E6, Delta, and the
//! integral echelon (Miller) basis.
//!
//! Everything is computed over Z first wherever the coefficients stay
//! small; the in-ring basis constructor exists because high-weight integer
//! coefficients grow like n^(k-1) and are pointless to materialize when
//! the target is Z/p^m.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::Error;
use crate::qseries::{reduce_integral, QExpansion};
use crate::ring::{IntegerRing, LocalRing, ResidueRing, Ring};

/// sigma_{k-1}(n).
fn divisor_power_sum(n: u64, e: u32) -> BigInt {
    let mut total = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            total += BigInt::from(d).pow(e);
            let q = n / d;
            if q != d {
                total += BigInt::from(q).pow(e);
            }
        }
        d += 1;
    }
    total
}

/// The normalized Eisenstein series E_k for the weights where it has
/// integral coefficients: 4, 6, 8, 10, 14 (constants 240, -504, 480,
/// -264, -24).
pub fn eisenstein(k: u64, prec: usize) -> Result<QExpansion<IntegerRing>, Error> {
    let c: i64 = match k {
        4 => 240,
        6 => -504,
        8 => 480,
        10 => -264,
        14 => -24,
        _ => return Err(Error::NonIntegralEisenstein(k)),
    };
    let mut coeffs = vec![BigInt::zero(); prec];
    if prec > 0 {
        coeffs[0] = BigInt::from(1);
    }
    for (n, cn) in coeffs.iter_mut().enumerate().skip(1) {
        *cn = BigInt::from(c) * divisor_power_sum(n as u64, k as u32 - 1);
    }
    Ok(QExpansion::new(IntegerRing, coeffs, Some(k as i64)))
}

/// Delta = (E4^3 - E6^2)/1728, the normalized weight-12 cusp form.
pub fn delta(prec: usize) -> QExpansion<IntegerRing> {
    let e4 = eisenstein(4, prec).unwrap();
    let e6 = eisenstein(6, prec).unwrap();
    let num = e4.pow(3).sub(&e6.pow(2));
    let coeffs = num
        .coeffs()
        .iter()
        .map(|c| {
            let (q, r) = num_integer::Integer::div_rem(c, &BigInt::from(1728));
            assert!(r.is_zero(), "E4^3 - E6^2 is divisible by 1728");
            q
        })
        .collect();
    QExpansion::new(IntegerRing, coeffs, Some(12))
}

/// Number of leading coefficients that pin down a form of weight k:
/// floor(k/12) + 1.
pub fn sturm_bound(k: u64) -> usize {
    (k / 12) as usize + 1
}

/// Q^a R^b Delta^c with 4a + 6b + 12c = weight and b in {0, 1}. For each
/// admissible c there is exactly one (a, b), and the possible c form the
/// contiguous range 0..dim.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Monomial {
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

impl Monomial {
    pub fn weight(&self) -> u64 {
        4 * self.a as u64 + 6 * self.b as u64 + 12 * self.c as u64
    }
}

/// The monomial spanning set of M_k, ordered by increasing Delta-degree.
/// Its length is dim M_k.
pub fn monomials(k: u64) -> Vec<Monomial> {
    if k % 2 != 0 {
        return vec![];
    }
    let mut out = Vec::new();
    for c in 0..=(k / 12) {
        let rem = k - 12 * c;
        let (a, b) = if rem % 4 == 0 {
            (rem / 4, 0)
        } else if rem >= 6 && (rem - 6) % 4 == 0 {
            ((rem - 6) / 4, 1)
        } else {
            continue; // rem == 2: no monomial at this c
        };
        out.push(Monomial { a: a as u32, b: b as u32, c: c as u32 });
    }
    out
}

pub fn dim_mk(k: u64) -> usize {
    monomials(k).len()
}

pub fn dim_sk(k: u64) -> usize {
    dim_mk(k).saturating_sub(1)
}

/// Incremental powers of Q, R, Delta over an arbitrary coefficient ring.
pub struct MonomialCache<R: Ring> {
    prec: usize,
    q_pows: Vec<QExpansion<R>>,
    r_pows: Vec<QExpansion<R>>,
    d_pows: Vec<QExpansion<R>>,
}

impl<R: Ring> MonomialCache<R> {
    pub fn new(ring: &R, prec: usize) -> Self {
        let q = reduce_integral(&eisenstein(4, prec).unwrap(), ring);
        let r = reduce_integral(&eisenstein(6, prec).unwrap(), ring);
        let d = reduce_integral(&delta(prec), ring);
        let one = QExpansion::one(ring.clone(), prec, Some(0));
        MonomialCache {
            prec,
            q_pows: vec![one.clone(), q],
            r_pows: vec![one.clone(), r],
            d_pows: vec![one, d],
        }
    }

    fn power(list: &mut Vec<QExpansion<R>>, e: usize) -> &QExpansion<R> {
        while list.len() <= e {
            let next = list.last().unwrap().mul(&list[1]);
            list.push(next);
        }
        &list[e]
    }

    pub fn series(&mut self, m: &Monomial) -> QExpansion<R> {
        let q = Self::power(&mut self.q_pows, m.a as usize).clone();
        let r = Self::power(&mut self.r_pows, m.b as usize).clone();
        let d = Self::power(&mut self.d_pows, m.c as usize).clone();
        q.mul(&r).mul(&d).with_weight(Some(m.weight() as i64))
    }

    pub fn prec(&self) -> usize {
        self.prec
    }
}

pub fn monomial_series(m: &Monomial, prec: usize) -> QExpansion<IntegerRing> {
    MonomialCache::new(&IntegerRing, prec).series(m)
}

/// The echelon basis of M_k: b_j has coefficients a_i(b_j) = delta_{ij}
/// for i, j < dim. The monomial-to-echelon change of basis is
/// unitriangular, so the result is integral whenever the ring is Z.
pub fn miller_basis_in<R: Ring>(k: u64, ring: &R, prec: usize) -> Vec<QExpansion<R>> {
    let monos = monomials(k);
    let d = monos.len();
    assert!(prec >= d, "need at least dim M_k coefficients to echelonize");
    let mut cache = MonomialCache::new(ring, prec);
    let mut rows: Vec<QExpansion<R>> = monos.iter().map(|m| cache.series(m)).collect();
    // rows[j] = q^j + O(q^(j+1)); clear the entries above each pivot,
    // working from the last row up.
    for j in (0..d).rev() {
        for i in 0..j {
            let c = rows[i].coeff(j).clone();
            if ring.is_zero(&c) {
                continue;
            }
            let scaled = rows[j].scale(&c);
            rows[i] = rows[i].sub(&scaled);
        }
    }
    rows
}

pub fn miller_basis(k: u64, prec: usize) -> Vec<QExpansion<IntegerRing>> {
    miller_basis_in(k, &IntegerRing, prec)
}

/// The cusp part of the echelon basis: rows with a_0 = 0.
pub fn miller_basis_cusp_in<R: Ring>(k: u64, ring: &R, prec: usize) -> Vec<QExpansion<R>> {
    let mut rows = miller_basis_in(k, ring, prec);
    if !rows.is_empty() {
        rows.remove(0);
    }
    rows
}

/// Coordinates of f in an echelon basis, by reading off the leading
/// coefficients and checking the remainder vanishes to the requested
/// precision. `NotInSpan` when it does not.
pub fn miller_expand<R: Ring>(
    f: &QExpansion<R>,
    basis: &[QExpansion<R>],
) -> Result<Vec<R::Elt>, Error> {
    let mut coords = Vec::with_capacity(basis.len());
    let mut residual = f.clone();
    for b in basis {
        let lead = b.leading_index().expect("echelon basis rows are nonzero");
        debug_assert!(f.ring().is_one(b.coeff(lead)));
        let c = residual.coeff(lead).clone();
        residual = residual.sub(&b.scale(&c));
        coords.push(c);
    }
    if residual.is_zero() {
        Ok(coords)
    } else {
        Err(Error::NotInSpan)
    }
}

/// A level-one form congruent to 1 mod p^m, used to move between weights:
///  - p >= 5: U^(p^(m-1)) where U is E_{p-1} when integral, otherwise the
///    first echelon basis element of M_{p-1} (which reduces to 1 mod p);
///  - p = 2, m >= 4: Q^(2^(m-4)), since Q = 1 mod 16;
///  - p = 2, m <= 3 has no designated unit (weights move in steps of 4
///    and 6 there), and p = 3 has none at level one.
pub fn eisenstein_unit(p: u64, m: u32, prec: usize) -> Result<QExpansion<IntegerRing>, Error> {
    match p {
        2 => {
            if m <= 3 {
                return Err(Error::UnsupportedExponent(m));
            }
            let q = eisenstein(4, prec).unwrap();
            Ok(q.pow(1 << (m - 4)))
        }
        3 => Err(Error::UnsupportedPrime(3)),
        _ if m >= 1 => {
            let base = match eisenstein(p - 1, prec) {
                Ok(e) => e,
                Err(_) => {
                    let b = miller_basis(p - 1, prec.max(dim_mk(p - 1)));
                    b.into_iter().next().expect("M_{p-1} is nonzero").truncated(prec)
                }
            };
            let mut pow = base;
            for _ in 1..m {
                pow = pow.pow(p as u32);
            }
            Ok(pow)
        }
        _ => Err(Error::UnsupportedExponent(m)),
    }
}

/// Write a q-series as a polynomial in Delta. Valid mod 2^m for m <= 3,
/// where every monomial collapses to its Delta-power. Returns the
/// coefficient list (index = Delta-degree); `NotInSpan` if a remainder
/// survives at the available precision.
pub fn delta_polynomial(
    f: &QExpansion<ResidueRing>,
    max_deg: usize,
) -> Result<Vec<num_bigint::BigUint>, Error> {
    let ring = f.ring().clone();
    assert!(
        ring.prime() == 2 && ring.precision() <= 3,
        "Delta-polynomial collapse needs Q = R = 1, i.e. mod 8 at most"
    );
    let prec = f.prec();
    let d = reduce_integral(&delta(prec), &ring).with_weight(None);
    let mut pow = QExpansion::one(ring.clone(), prec, None);
    let mut residual = f.clone().with_weight(None);
    let mut coeffs = Vec::with_capacity(max_deg + 1);
    for c in 0..=max_deg.min(prec.saturating_sub(1)) {
        let e = residual.coeff(c).clone();
        residual = residual.sub(&pow.scale(&e));
        coeffs.push(e);
        if c < max_deg {
            pow = pow.mul(&d);
        }
    }
    if residual.is_zero() {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Ok(coeffs)
    } else {
        Err(Error::NotInSpan)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn eisenstein_low_coefficients() {
        let e4 = eisenstein(4, 4).unwrap();
        assert_eq!(e4.coeffs()[..4].to_vec(), vec![
            BigInt::from(1), BigInt::from(240), BigInt::from(2160), BigInt::from(6720)
        ]);
        let e6 = eisenstein(6, 4).unwrap();
        assert_eq!(e6.coeffs()[..4].to_vec(), vec![
            BigInt::from(1), BigInt::from(-504), BigInt::from(-16632), BigInt::from(-122976)
        ]);
        assert_eq!(*eisenstein(8, 2).unwrap().coeff(1), BigInt::from(480));
        assert_eq!(*eisenstein(10, 2).unwrap().coeff(1), BigInt::from(-264));
        assert_eq!(*eisenstein(14, 2).unwrap().coeff(1), BigInt::from(-24));
        assert!(matches!(eisenstein(12, 2), Err(Error::NonIntegralEisenstein(12))));
    }

    #[test]
    fn delta_matches_tau() {
        let d = delta(11);
        let tau: Vec<i64> = vec![
            0, 1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920,
        ];
        for (n, t) in tau.iter().enumerate() {
            assert_eq!(*d.coeff(n), BigInt::from(*t), "tau({})", n);
        }
    }

    #[test]
    fn delta_matches_eta_product() {
        let prec = 24;
        let mut prod = QExpansion::one(IntegerRing, prec, None);
        for n in 1..prec {
            let mut factor = QExpansion::one(IntegerRing, prec, None);
            let mut coeffs = factor.coeffs().to_vec();
            coeffs[n] = BigInt::from(-1);
            factor = QExpansion::new(IntegerRing, coeffs, None);
            prod = prod.mul(&factor.pow(24));
        }
        // Multiply by q: shift.
        let mut shifted = vec![BigInt::zero()];
        shifted.extend_from_slice(&prod.coeffs()[..prec - 1]);
        let eta24 = QExpansion::new(IntegerRing, shifted, None);
        assert_eq!(eta24.coeffs(), delta(prec).coeffs());
    }

    #[test]
    fn dimension_table() {
        let expected = [
            (0u64, 1usize), (2, 0), (4, 1), (6, 1), (8, 1), (10, 1), (12, 2),
            (14, 1), (16, 2), (18, 2), (20, 2), (22, 2), (24, 3), (26, 2),
        ];
        for (k, d) in expected {
            assert_eq!(dim_mk(k), d, "dim M_{}", k);
        }
        assert_eq!(dim_sk(12), 1);
        assert_eq!(dim_sk(24), 2);
        assert_eq!(dim_mk(3), 0);
    }

    #[test]
    fn sturm_values() {
        assert_eq!(sturm_bound(12), 2);
        assert_eq!(sturm_bound(24), 3);
        assert_eq!(sturm_bound(214), 18);
    }

    #[test]
    fn miller_is_echelon_and_integral() {
        let k = 24;
        let basis = miller_basis(k, 10);
        assert_eq!(basis.len(), 3);
        for (j, b) in basis.iter().enumerate() {
            for i in 0..3 {
                let want = if i == j { BigInt::from(1) } else { BigInt::zero() };
                assert_eq!(*b.coeff(i), want);
            }
        }
        // Every monomial lies in the span with coordinates read off its
        // leading coefficients.
        for m in monomials(k) {
            let s = monomial_series(&m, 10);
            let coords = miller_expand(&s, &basis).unwrap();
            assert_eq!(coords.len(), 3);
        }
    }

    #[test]
    fn in_ring_basis_matches_reduced_integral_basis() {
        let ring = ResidueRing::new(5, 3);
        let k = 16;
        let over_z = miller_basis(k, 8);
        let reduced: Vec<_> = over_z.iter().map(|b| reduce_integral(b, &ring)).collect();
        let in_ring = miller_basis_in(k, &ring, 8);
        assert_eq!(reduced.len(), in_ring.len());
        for (a, b) in reduced.iter().zip(&in_ring) {
            assert_eq!(a.coeffs(), b.coeffs());
        }
    }

    #[test]
    fn unit_congruences() {
        let u = eisenstein_unit(5, 2, 20).unwrap();
        assert_eq!(u.weight(), Some(20));
        let r25 = ResidueRing::new(5, 2);
        let red = reduce_integral(&u, &r25);
        assert!(red.eq_up_to(&QExpansion::one(r25, 20, None), 20));

        let u2 = eisenstein_unit(2, 4, 16).unwrap();
        assert_eq!(u2.weight(), Some(4));
        let r16 = ResidueRing::new(2, 4);
        assert!(reduce_integral(&u2, &r16).eq_up_to(&QExpansion::one(r16, 16, None), 16));

        let u26 = eisenstein_unit(2, 6, 16).unwrap();
        assert_eq!(u26.weight(), Some(16));
        let r64 = ResidueRing::new(2, 6);
        assert!(reduce_integral(&u26, &r64).eq_up_to(&QExpansion::one(r64, 16, None), 16));

        let u13 = eisenstein_unit(13, 1, 20).unwrap();
        assert_eq!(u13.weight(), Some(12));
        let r13 = ResidueRing::new(13, 1);
        assert!(reduce_integral(&u13, &r13).eq_up_to(&QExpansion::one(r13, 20, None), 20));

        assert!(matches!(eisenstein_unit(3, 2, 4), Err(Error::UnsupportedPrime(3))));
        assert!(matches!(eisenstein_unit(2, 3, 4), Err(Error::UnsupportedExponent(3))));
    }

    #[test]
    fn delta_polynomial_collapse() {
        let ring = ResidueRing::new(2, 3);
        let prec = 30;
        let d = reduce_integral(&delta(prec), &ring);
        let d3 = d.pow(3);
        let coeffs = delta_polynomial(&d3, 6).unwrap();
        assert_eq!(coeffs.len(), 4);
        assert!(coeffs[3].is_one());
        assert!(coeffs[..3].iter().all(|c| c.is_zero()));

        // E4^3 = 1728 Delta + E6^2 = 1 mod 8.
        let e4cubed = reduce_integral(&eisenstein(4, prec).unwrap().pow(3), &ring);
        let coeffs = delta_polynomial(&e4cubed, 3).unwrap();
        assert_eq!(coeffs, vec![num_bigint::BigUint::from(1u32)]);

        // E4 * Delta = Delta mod 8.
        let e4d = reduce_integral(&eisenstein(4, prec).unwrap().mul(&delta(prec)), &ring);
        let coeffs = delta_polynomial(&e4d, 3).unwrap();
        assert_eq!(coeffs.len(), 2);
        assert!(coeffs[0].is_zero() && coeffs[1].is_one());
    }

    #[test]
    fn identity_e4_cubed_minus_e6_squared() {
        let prec = 16;
        let lhs = eisenstein(4, prec).unwrap().pow(3).sub(
            &eisenstein(6, prec).unwrap().pow(2).with_weight(Some(12)),
        );
        let rhs = delta(prec).scale(&BigInt::from(1728));
        assert_eq!(lhs.coeffs(), rhs.coeffs());
    }
}
