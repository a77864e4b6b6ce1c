//! Factoring monic polynomials over Z/p^M whose reduction mod p is
//! squarefree: factor over the residue field, then lift the coprime
//! factorization digit by digit.
//!
//! The digit lift solves g*dh + h*dg = e/p^j over F_p using one Bezout
//! identity computed up front; each pass gains one digit of precision, so
//! at most M passes run. Quadratic lifting would save nothing at these
//! sizes and is easier to get subtly wrong.

use alloc::vec::Vec;

use crate::error::Error;
use crate::modpoly::{cmp_poly, factor_squarefree_field, ModPoly};
use crate::ring::{LocalRing, ResidueRing, Ring};

fn reduce_poly(f: &ModPoly<ResidueRing>, target: &ResidueRing) -> ModPoly<ResidueRing> {
    ModPoly::new(
        target.clone(),
        f.coeffs().iter().map(|c| target.reduce_uint(c)).collect(),
    )
}

/// Reinterpret a residue-field polynomial inside Z/p^M; digits are already
/// canonical representatives.
fn lift_poly(f: &ModPoly<ResidueRing>, target: &ResidueRing) -> ModPoly<ResidueRing> {
    ModPoly::new(target.clone(), f.coeffs().to_vec())
}

/// The factors of a monic f over Z/p^M, in canonical order, given that f
/// mod p is squarefree. Each factor is monic and irreducible mod p, and
/// their product is exactly f.
pub fn hensel_factor(f: &ModPoly<ResidueRing>) -> Result<Vec<ModPoly<ResidueRing>>, Error> {
    let ring = f.ring().clone();
    if !f.is_monic() {
        return Err(Error::NonMonic);
    }
    let field = ring.with_precision(1);
    let f_bar = reduce_poly(f, &field);
    if f_bar.degree() != f.degree() {
        // Cannot happen for monic f, but keep the invariant visible.
        return Err(Error::NonMonic);
    }
    if f_bar.gcd(&f_bar.derivative()).degree() != Some(0) {
        return Err(Error::NotSquarefreeModP);
    }
    let mut remaining = factor_squarefree_field(&f_bar);
    let mut out = Vec::with_capacity(remaining.len());
    let mut rest = f.clone();
    while remaining.len() > 1 {
        let g_bar = remaining.remove(0);
        let mut h_bar = ModPoly::constant(field.clone(), field.one());
        for q in &remaining {
            h_bar = h_bar.mul(q);
        }
        let (g, new_rest) = lift_pair(&rest, &g_bar, &h_bar);
        out.push(g);
        rest = new_rest;
    }
    out.push(rest);
    out.sort_by(cmp_poly);
    debug_assert_eq!(
        out.iter().fold(ModPoly::constant(ring.clone(), ring.one()), |a, b| a.mul(b)),
        *f
    );
    Ok(out)
}

/// Lift f = g_bar * h_bar mod p to f = g * h over the full ring. Both
/// inputs monic and coprime over the residue field.
fn lift_pair(
    f: &ModPoly<ResidueRing>,
    g_bar: &ModPoly<ResidueRing>,
    h_bar: &ModPoly<ResidueRing>,
) -> (ModPoly<ResidueRing>, ModPoly<ResidueRing>) {
    let ring = f.ring().clone();
    let m = ring.precision();
    let (gcd, _s_bar, t_bar) = g_bar.extended_gcd(h_bar);
    assert!(gcd.degree() == Some(0), "factors must be coprime mod p");

    let mut g = lift_poly(g_bar, &ring);
    let mut h = lift_poly(h_bar, &ring);
    for _ in 0..m {
        let e = f.sub(&g.mul(&h));
        if e.is_zero() {
            break;
        }
        let j = e
            .coeffs()
            .iter()
            .filter_map(|c| ring.valuation(c))
            .min()
            .expect("nonzero residual has a valuation");
        let field = g_bar.ring().clone();
        let eps = ModPoly::new(
            field.clone(),
            e.coeffs()
                .iter()
                .map(|c| field.reduce_uint(&ring.div_exact_p(c, j)))
                .collect(),
        );
        let dg = t_bar.mul(&eps).rem(g_bar);
        let (dh, rem0) = eps.sub(&h_bar.mul(&dg)).divrem(g_bar);
        assert!(rem0.is_zero(), "digit equation must divide exactly");
        let bump = |poly: &ModPoly<ResidueRing>, delta: &ModPoly<ResidueRing>| {
            let lifted = lift_poly(delta, &ring);
            let scaled = ModPoly::new(
                ring.clone(),
                lifted.coeffs().iter().map(|c| ring.mul_p(c, j)).collect(),
            );
            poly.add(&scaled)
        };
        g = bump(&g, &dg);
        h = bump(&h, &dh);
    }
    debug_assert!(f.sub(&g.mul(&h)).is_zero());
    (g, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn poly(ring: &ResidueRing, coeffs: &[i64]) -> ModPoly<ResidueRing> {
        ModPoly::from_i64(ring.clone(), coeffs)
    }

    #[test]
    fn splits_x2_minus_1_mod_9() {
        let ring = ResidueRing::new(3, 2);
        let f = poly(&ring, &[-1, 0, 1]);
        let factors = hensel_factor(&f).unwrap();
        assert_eq!(factors.len(), 2);
        assert!(factors.contains(&poly(&ring, &[1, 1])));
        assert!(factors.contains(&poly(&ring, &[8, 1])));
    }

    #[test]
    fn splits_x2_plus_1_mod_125() {
        let ring = ResidueRing::new(5, 3);
        let f = poly(&ring, &[1, 0, 1]);
        let factors = hensel_factor(&f).unwrap();
        assert_eq!(factors.len(), 2);
        // Roots are 57 and 68: the factors are x - 57 and x - 68.
        assert!(factors.contains(&poly(&ring, &[-57, 1])));
        assert!(factors.contains(&poly(&ring, &[-68, 1])));
        assert_eq!(factors[0].mul(&factors[1]), f);
    }

    #[test]
    fn irreducible_stays_whole_mod_81() {
        let ring = ResidueRing::new(3, 4);
        let f = poly(&ring, &[1, 0, 1]);
        let factors = hensel_factor(&f).unwrap();
        assert_eq!(factors, vec![f]);
    }

    #[test]
    fn rejects_non_squarefree_reduction() {
        let ring = ResidueRing::new(2, 2);
        let f = poly(&ring, &[0, 0, 1]);
        assert!(matches!(hensel_factor(&f), Err(Error::NotSquarefreeModP)));
    }

    #[test]
    fn rejects_non_monic() {
        let ring = ResidueRing::new(2, 2);
        let f = poly(&ring, &[1, 2]);
        assert!(matches!(hensel_factor(&f), Err(Error::NonMonic)));
    }

    #[test]
    fn product_recovers_input() {
        let cases: &[(u64, u32)] = &[(2, 5), (3, 4), (5, 3), (7, 2), (13, 2)];
        let mut rng = SplitMix64::new(77);
        for &(p, m) in cases {
            let ring = ResidueRing::new(p, m);
            let field = ring.with_precision(1);
            'next: for _ in 0..10 {
                let deg = 2 + (rng.below(4) as usize);
                let mut coeffs: Vec<i64> =
                    (0..deg).map(|_| rng.next_u64() as i64 % 1000).collect();
                coeffs.push(1);
                let f = poly(&ring, &coeffs);
                let f_bar = reduce_poly(&f, &field);
                if f_bar.gcd(&f_bar.derivative()).degree() != Some(0) {
                    continue 'next;
                }
                let factors = hensel_factor(&f).unwrap();
                let prod = factors
                    .iter()
                    .fold(ModPoly::constant(ring.clone(), ring.one()), |a, b| a.mul(b));
                assert_eq!(prod, f);
                for g in &factors {
                    assert!(g.is_monic());
                }
            }
        }
    }
}
