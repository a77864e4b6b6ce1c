//! Randomized and sweep-style invariants, exercised through the public
//! API. Every randomized test draws from a fixed seed, so failures are
//! reproducible by rerunning the same test.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use modpm_core::eigen::{
    construct_hab, hab_eigenvalues, is_weak_eigenform, strong_eigensystems, Eigensystem,
    WeakCheck,
};
use modpm_core::forms::{
    delta, delta_polynomial, dim_mk, dim_sk, eisenstein_unit, miller_basis_cusp_in,
    miller_basis_in, miller_expand, monomial_series, monomials, sturm_bound,
};
use modpm_core::hecke::{
    hecke_matrix_cusp, hecke_tn, slope_data_exact, slope_data_mod, theta_iterate, Slope,
};
use modpm_core::hensel::hensel_factor;
use modpm_core::linear::{solve, Mat};
use modpm_core::mod2::{compute_nk, t_ell_delta, u_op, v_op, DeltaCalculus, DeltaPolyF2};
use modpm_core::modpoly::ModPoly;
use modpm_core::qseries::{reduce_integral, QExpansion};
use modpm_core::rng::SplitMix64;
use modpm_core::unramified::{UnramifiedElt, UnramifiedRing};
use modpm_core::{IntegerRing, LocalRing, ResidueRing, Ring};

fn rand_residue(rng: &mut SplitMix64, ring: &ResidueRing) -> BigUint {
    let m: BigUint = ring.modulus().clone();
    let bound = u64::try_from(&m).expect("test moduli fit in a word");
    BigUint::from(rng.below(bound))
}

fn rand_unramified(rng: &mut SplitMix64, w: &UnramifiedRing) -> UnramifiedElt {
    let coords = (0..w.degree()).map(|_| rand_residue(rng, w.base())).collect();
    w.from_coords(coords)
}

// ------------------------------------------------------------ ring tower

#[test]
fn hensel_factors_remultiply_to_the_input() {
    let mut rng = SplitMix64::new(0x5eed_0001);
    let mut exercised = 0usize;
    for &(p, big_m) in &[(2u64, 4u32), (3, 3), (3, 4), (5, 3), (7, 2)] {
        let ring = ResidueRing::new(p, big_m);
        let field = ResidueRing::new(p, 1);
        for _ in 0..40 {
            let deg = 2 + rng.below(4) as usize;
            let mut coeffs: Vec<BigUint> =
                (0..deg).map(|_| rand_residue(&mut rng, &ring)).collect();
            coeffs.push(BigUint::one());
            let f = ModPoly::new(ring.clone(), coeffs);

            // The lift needs a squarefree reduction; skip the draws
            // that do not qualify rather than biasing the sample.
            let fbar = ModPoly::new(
                field.clone(),
                f.coeffs().iter().map(|c| field.reduce_uint(c)).collect(),
            );
            let dbar = fbar.derivative();
            if dbar.is_zero() || fbar.gcd(&dbar).degree() != Some(0) {
                continue;
            }

            let factors = hensel_factor(&f).expect("squarefree reduction lifts");
            let mut product = ModPoly::new(ring.clone(), vec![BigUint::one()]);
            for g in &factors {
                assert!(g.is_monic(), "every lifted factor is monic");
                product = product.mul(g);
            }
            assert_eq!(product, f, "re-multiplied factorization = input");
            exercised += 1;
        }
    }
    assert!(exercised >= 120, "only {} draws qualified", exercised);
}

#[test]
fn unramified_ring_axioms_on_random_triples() {
    let mut rng = SplitMix64::new(0x5eed_0002);
    for &(p, m, f) in &[(2u64, 4u32, 3u32), (3, 3, 2), (5, 2, 2), (7, 1, 1)] {
        let w = UnramifiedRing::standard(p, m, f);
        for _ in 0..25 {
            let a = rand_unramified(&mut rng, &w);
            let b = rand_unramified(&mut rng, &w);
            let c = rand_unramified(&mut rng, &w);
            assert_eq!(w.add(&w.add(&a, &b), &c), w.add(&a, &w.add(&b, &c)));
            assert_eq!(w.mul(&w.mul(&a, &b), &c), w.mul(&a, &w.mul(&b, &c)));
            assert_eq!(w.add(&a, &b), w.add(&b, &a));
            assert_eq!(w.mul(&a, &b), w.mul(&b, &a));
            assert_eq!(
                w.mul(&a, &w.add(&b, &c)),
                w.add(&w.mul(&a, &b), &w.mul(&a, &c))
            );

            // Unit exactly when the residue is nonzero.
            let residue_nonzero = w.valuation(&a) == Some(0);
            match w.unit_inverse(&a) {
                Some(inv) => {
                    assert!(residue_nonzero);
                    assert_eq!(w.mul(&a, &inv), w.one());
                }
                None => assert!(!residue_nonzero),
            }
        }
    }
}

/// All vectors over the residue ring, in lexicographic coordinate order.
fn all_vectors(ring: &ResidueRing, len: usize) -> Vec<Vec<BigUint>> {
    let m = u64::try_from(ring.modulus()).expect("test moduli fit in a word");
    let mut out = vec![vec![]];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * m as usize);
        for v in &out {
            for d in 0..m {
                let mut v2 = v.clone();
                v2.push(BigUint::from(d));
                next.push(v2);
            }
        }
        out = next;
    }
    out
}

#[test]
fn linear_solver_agrees_with_exhaustive_search() {
    let mut rng = SplitMix64::new(0x5eed_0003);
    for &(p, m) in &[(2u64, 3u32), (3, 2), (5, 2), (3, 3)] {
        let ring = ResidueRing::new(p, m);
        for _ in 0..12 {
            let rows = 1 + rng.below(3) as usize;
            let cols = 1 + rng.below(3) as usize;
            let a = Mat::from_fn(ring.clone(), rows, cols, |_, _| rand_residue(&mut rng, &ring));
            let b: Vec<BigUint> = (0..rows).map(|_| rand_residue(&mut rng, &ring)).collect();

            let brute: BTreeSet<Vec<BigUint>> = all_vectors(&ring, cols)
                .into_iter()
                .filter(|x| a.mul_vec(x) == b)
                .collect();

            match solve(&a, &b) {
                Ok(sol) => {
                    assert!(
                        !brute.is_empty(),
                        "solver returned a solution the search does not see"
                    );
                    assert_eq!(a.mul_vec(&sol.particular), b);
                    // particular + every kernel combination = the full
                    // solution set, no more and no less.
                    let mut reached = BTreeSet::new();
                    for combo in all_vectors(&ring, sol.kernel.len()) {
                        let mut x = sol.particular.clone();
                        for (ci, kv) in combo.iter().zip(&sol.kernel) {
                            for (xe, ke) in x.iter_mut().zip(kv) {
                                *xe = ring.add(xe, &ring.mul(ci, ke));
                            }
                        }
                        reached.insert(x);
                    }
                    assert_eq!(reached, brute, "solution sets agree");
                }
                Err(_) => assert!(brute.is_empty(), "solver missed a solution"),
            }
        }
    }
}

// --------------------------------------------------------------- qseries

fn rand_int_series(rng: &mut SplitMix64, prec: usize) -> QExpansion<IntegerRing> {
    let coeffs = (0..prec)
        .map(|_| BigInt::from(rng.below(101) as i64 - 50))
        .collect();
    QExpansion::new(IntegerRing, coeffs, None)
}

#[test]
fn series_products_commute_associate_and_track_precision() {
    let mut rng = SplitMix64::new(0x5eed_0004);
    for _ in 0..20 {
        let pf = 15 + rng.below(26) as usize;
        let pg = 15 + rng.below(26) as usize;
        let ph = 15 + rng.below(26) as usize;
        let f = rand_int_series(&mut rng, pf);
        let g = rand_int_series(&mut rng, pg);
        let h = rand_int_series(&mut rng, ph);

        let fg = f.mul(&g);
        assert_eq!(fg.prec(), pf.min(pg), "product precision is the min");
        assert_eq!(fg, g.mul(&f), "multiplication commutes");
        assert_eq!(fg.mul(&h), f.mul(&g.mul(&h)), "multiplication associates");

        for ring in [ResidueRing::new(7, 2), ResidueRing::new(2, 4)] {
            let rf = reduce_integral(&f, &ring);
            let rg = reduce_integral(&g, &ring);
            assert_eq!(
                reduce_integral(&fg, &ring),
                rf.mul(&rg),
                "reduction is multiplicative"
            );
            assert_eq!(
                reduce_integral(&f.add(&g), &ring),
                rf.add(&rg),
                "reduction is additive"
            );
        }
    }
}

// ---------------------------------------------------------- level1 forms

#[test]
fn monomials_are_unitriangular_through_weight_one_hundred() {
    for k in (0..=100u64).step_by(2) {
        let mons = monomials(k);
        assert_eq!(mons.len(), dim_mk(k));
        for (i, mo) in mons.iter().enumerate() {
            assert_eq!(mo.c as usize, i, "Delta exponents are contiguous");
            assert_eq!(mo.weight(), k);
            let s = monomial_series(mo, mons.len() + 2);
            for j in 0..mo.c as usize {
                assert!(s.coeff(j).is_zero(), "weight {} monomial {} below pivot", k, i);
            }
            assert!(s.coeff(mo.c as usize).is_one(), "pivot coefficient is one");
        }
    }
}

#[test]
fn unit_series_squares_sharpen_one_binary_digit() {
    let prec = 64;
    let q = eisenstein_unit(2, 4, prec).unwrap();
    for s in 0..=6u32 {
        let pow = q.pow(1 << s);
        let ring = ResidueRing::new(2, 4 + s);
        let reduced = reduce_integral(&pow, &ring);
        assert!(reduced.coeff(0).is_one());
        for n in 1..prec {
            assert!(
                reduced.coeff(n).is_zero(),
                "Q^(2^{}) = 1 mod 2^{} fails at q^{}",
                s,
                4 + s,
                n
            );
        }
    }
}

#[test]
fn delta_power_collapse_degrees() {
    let prec = 23;
    let d = delta(prec);
    let mut pow = QExpansion::one(IntegerRing, prec, None);
    let mut powers: Vec<QExpansion<IntegerRing>> = vec![pow.clone()];
    for _ in 1..=20 {
        pow = pow.mul(&d);
        powers.push(pow.clone());
    }

    // Moduli where every form collapses to a Delta-polynomial: the
    // expansion of Delta^c is the single monomial of degree c.
    for m in 1..=3u32 {
        let ring = ResidueRing::new(2, m);
        for (c, pw) in powers.iter().enumerate() {
            let coeffs = delta_polynomial(&reduce_integral(pw, &ring), 21).unwrap();
            let mut expected = vec![BigUint::zero(); c + 1];
            expected[c] = BigUint::one();
            if c == 0 {
                assert_eq!(coeffs, vec![BigUint::one()]);
            } else {
                assert_eq!(coeffs, expected, "Delta^{} mod 2^{}", c, m);
            }
        }
    }

    // One level up the collapse map is gone, but unitriangularity still
    // pins the degree: Delta^c is not a combination of lower powers.
    let ring = ResidueRing::new(2, 4);
    for c in 1..=20usize {
        let a = Mat::from_fn(ring.clone(), c + 2, c, |i, j| {
            ring.from_int(powers[j].coeff(i))
        });
        let b: Vec<BigUint> = (0..c + 2).map(|i| ring.from_int(powers[c].coeff(i))).collect();
        assert!(
            solve(&a, &b).is_err(),
            "Delta^{} escaped the span of lower powers mod 16",
            c
        );
    }
}

#[test]
fn miller_and_monomial_bases_span_the_same_module() {
    for &(p, m) in &[(5u64, 2u32), (2, 3)] {
        let ring = ResidueRing::new(p, m);
        for &k in &[24u64, 36, 48] {
            let prec = sturm_bound(k) + 4;
            let miller = miller_basis_in(k, &ring, prec);
            let monos: Vec<QExpansion<ResidueRing>> = monomials(k)
                .iter()
                .map(|mo| reduce_integral(&monomial_series(mo, prec), &ring))
                .collect();
            assert_eq!(miller.len(), monos.len());

            // Monomials expand exactly in the echelon basis...
            for mo in &monos {
                miller_expand(mo, &miller).expect("monomial lies in the echelon span");
            }
            // ...and each echelon element is a combination of monomials.
            let a = Mat::from_fn(ring.clone(), prec, monos.len(), |i, j| {
                monos[j].coeff(i).clone()
            });
            for b in &miller {
                let sol = solve(&a, b.coeffs()).expect("echelon element in monomial span");
                assert_eq!(a.mul_vec(&sol.particular), b.coeffs().to_vec());
            }
        }
    }
}

// ----------------------------------------------------------------- hecke

#[test]
fn hecke_matrices_commute_through_weight_sixty() {
    for k in (12..=60u64).step_by(2) {
        if dim_sk(k) == 0 {
            continue;
        }
        let mats: Vec<Mat<IntegerRing>> = (2..=7).map(|n| hecke_matrix_cusp(k, n)).collect();
        for i in 0..mats.len() {
            for j in (i + 1)..mats.len() {
                assert_eq!(
                    mats[i].mul(&mats[j]),
                    mats[j].mul(&mats[i]),
                    "T_{} and T_{} at weight {}",
                    i + 2,
                    j + 2,
                    k
                );
            }
        }
    }
}

#[test]
fn one_dimensional_spaces_have_multiplicative_eigenvalues() {
    for &k in &[12u64, 16, 18, 20, 22, 26] {
        assert_eq!(dim_sk(k), 1);
        let prec = 144;
        let f = miller_basis_cusp_in(k, &IntegerRing, prec)
            .pop()
            .unwrap()
            .with_weight(Some(k as i64));
        assert!(f.coeff(1).is_one());

        let a = |n: usize| f.coeff(n).clone();
        for n in 2..=12u64 {
            let tn = hecke_tn(&f, n).unwrap();
            let scaled = f.scale(&a(n as usize));
            assert!(
                tn.eq_up_to(&scaled, tn.prec()),
                "T_{} acts by a_{} at weight {}",
                n,
                n,
                k
            );
        }

        // Coprime multiplicativity and the prime-power recursion.
        for &(s, t) in &[(2usize, 3usize), (2, 5), (3, 4), (2, 7), (3, 5), (4, 5)] {
            assert_eq!(a(s * t), a(s) * a(t), "a_{}a_{} at weight {}", s, t, k);
        }
        let pk = |p: i64| BigInt::from(p).pow(k as u32 - 1);
        assert_eq!(a(4), a(2) * a(2) - pk(2));
        assert_eq!(a(9), a(3) * a(3) - pk(3));
        assert_eq!(a(8), a(4) * a(2) - pk(2) * a(2));
        assert_eq!(a(25), a(5) * a(5) - pk(5));
    }
}

#[test]
fn theta_twists_commute_with_hecke_away_from_p() {
    let prec = 60;
    let d = delta(prec);
    let c16 = miller_basis_cusp_in(16, &IntegerRing, prec)
        .pop()
        .unwrap()
        .with_weight(Some(16));
    for &(p, m) in &[(5u64, 2u32), (7, 1), (11, 1)] {
        let ring = ResidueRing::new(p, m);
        for f in [reduce_integral(&d, &ring), reduce_integral(&c16, &ring)] {
            for ell in [2u64, 3] {
                let lhs = hecke_tn(&theta_iterate(&f, 1).unwrap(), ell).unwrap();
                let rhs = theta_iterate(&hecke_tn(&f, ell).unwrap(), 1)
                    .unwrap()
                    .scale(&ring.from_i64(ell as i64));
                let common = lhs.prec().min(rhs.prec());
                assert!(common >= 20);
                assert!(
                    lhs.eq_up_to(&rhs, common),
                    "T_{} theta = {} theta T_{} mod {}^{}",
                    ell,
                    ell,
                    ell,
                    p,
                    m
                );
            }
        }
    }
}

#[test]
fn u_operator_slope_pairs_sum_to_weight_minus_one() {
    let sum_halves = |roots: (Slope, Slope)| match roots {
        (Slope::Finite(x), Slope::Finite(y)) => Some(x.0 + y.0),
        _ => None,
    };

    // Genuine eigenvalues from the one-dimensional spaces.
    for &k in &[12u64, 16, 18, 20, 22, 26] {
        let f = miller_basis_cusp_in(k, &IntegerRing, 30).pop().unwrap();
        for p in [2u64, 3, 5, 7] {
            let data = slope_data_exact(p, k, f.coeff(p as usize));
            assert_eq!(
                sum_halves(data.roots),
                Some(2 * (k as i64 - 1)),
                "p = {} k = {}",
                p,
                k
            );
        }
    }

    // Arbitrary integers, zero, and deep p-divisibility.
    let mut rng = SplitMix64::new(0x5eed_0005);
    for _ in 0..50 {
        let k = 12 + 2 * rng.below(40);
        let p = [2u64, 3, 5, 7][rng.below(4) as usize];
        let ap = match rng.below(4) {
            0 => BigInt::zero(),
            1 => BigInt::from(p).pow(rng.below(64) as u32),
            _ => BigInt::from(rng.next_u64() as i64),
        };
        let data = slope_data_exact(p, k, &ap);
        assert_eq!(sum_halves(data.roots), Some(2 * (k as i64 - 1)));
    }

    // Residue-level input, when the polygon is pinned.
    for &(k, v, prec) in &[(12u64, 0u32, 6u32), (12, 3, 6), (26, 5, 13), (20, 11, 10)] {
        let data = slope_data_mod(k, Some(v), prec);
        assert_eq!(sum_halves(data.roots), Some(2 * (k as i64 - 1)));
    }
    let data = slope_data_mod(12, None, 6);
    assert_eq!(sum_halves(data.roots), Some(22), "zero residue past the middle");
}

// ----------------------------------------------------------- eigensystems

/// All Frobenius conjugates of a coefficient list over its ring.
fn frobenius_orbit(w: &UnramifiedRing, coeffs: &[Vec<BigUint>]) -> Vec<Vec<Vec<BigUint>>> {
    let sigma = w.frobenius_generator_image();
    let mut orbit = Vec::with_capacity(w.degree());
    let mut current: Vec<UnramifiedElt> = coeffs.to_vec();
    for _ in 0..w.degree() {
        orbit.push(current.clone());
        current = current.iter().map(|c| w.apply_frobenius(&sigma, c)).collect();
    }
    orbit
}

#[test]
fn strong_systems_reduce_compatibly_down_the_tower() {
    let cases: &[(u64, &[u64])] = &[
        (5, &[12, 16, 20, 24, 32, 48]),
        (7, &[12, 26, 50]),
        (3, &[12, 16, 22]),
        (2, &[12, 24, 32]),
    ];
    for &(p, weights) in cases {
        for &k in weights {
            let high = strong_eigensystems(k, p, 2).unwrap();
            let low = strong_eigensystems(k, p, 1).unwrap();
            for sys in high.iter().filter(|s| !s.ramified) {
                let f = sys.residue_degree;
                let w1 = UnramifiedRing::standard(p, 1, f);
                let reduced: Vec<Vec<BigUint>> = sys
                    .coefficients
                    .iter()
                    .map(|c| w1.reduce_elt_from(c))
                    .collect();
                let found = frobenius_orbit(&w1, &reduced).into_iter().any(|conj| {
                    low.iter().any(|t| {
                        !t.ramified && t.residue_degree == f && t.coefficients == conj
                    })
                });
                assert!(
                    found,
                    "mod {}^2 system at weight {} has no mod-{} counterpart",
                    p, k, p
                );
            }
        }
    }
}

/// The eigenform carrying a rational or extension-valued system, rebuilt
/// on the cusp echelon basis over the system's own coefficient ring.
fn eigenform_series(sys: &Eigensystem, prec: usize) -> QExpansion<UnramifiedRing> {
    let w = sys.coefficient_ring();
    let basis = miller_basis_cusp_in(sys.weight, &w, prec);
    let mut g = QExpansion::zero(w, prec, Some(sys.weight as i64));
    for (j, bj) in basis.iter().enumerate() {
        g = g.add(
            &bj.clone()
                .with_weight(Some(sys.weight as i64))
                .scale(&sys.a(j + 1).to_vec()),
        );
    }
    g
}

#[test]
fn strong_systems_pass_the_weak_test_at_their_weight() {
    for &(k, p, m) in &[(12u64, 5u64, 2u32), (16, 7, 2), (22, 3, 2), (24, 5, 2), (50, 7, 2)] {
        let systems = strong_eigensystems(k, p, m).unwrap();
        assert!(systems.iter().any(|s| !s.ramified));
        let b = sturm_bound(k);
        for sys in systems.iter().filter(|s| !s.ramified) {
            let g = eigenform_series(sys, b * (b + 1) + 1);
            // The expansion reproduces every claimed coefficient...
            for n in 1..=sys.bound() {
                assert_eq!(g.coeff(n).as_slice(), sys.a(n), "a_{} at weight {}", n, k);
            }
            // ...and the form it defines is an eigenform of its weight.
            match is_weak_eigenform(&g).unwrap() {
                WeakCheck::Eigenform { eigenvalues } => {
                    for n in 1..=b {
                        assert_eq!(eigenvalues[n - 1].as_slice(), sys.a(n));
                    }
                }
                WeakCheck::NotEigenform { index } => {
                    panic!("weight {} mod {}^{} system fails at T_{}", k, p, m, index)
                }
            }
        }
    }
}

#[test]
fn bounded_slope_systems_stabilize_across_weights() {
    // Systems mod 25 whose a_5 has valuation <= 1, truncated to their
    // first coefficients: finitely many classes occur across weights,
    // and the set stops growing long before the weight cap.
    let mut seen: BTreeSet<(u32, Vec<Vec<BigUint>>)> = BTreeSet::new();
    let mut last_new = 0u64;
    for k in (48..=120u64).step_by(2) {
        for sys in strong_eigensystems(k, 5, 2).unwrap() {
            if sys.ramified || sys.bound() < 5 {
                continue;
            }
            let a5 = sys.a(5);
            if a5.iter().all(|c| c.is_zero()) {
                continue; // valuation >= 2: outside the slope bound
            }
            let trunc = (
                sys.residue_degree,
                (2..=5).map(|n| sys.a(n).to_vec()).collect::<Vec<_>>(),
            );
            if seen.insert(trunc) {
                last_new = k;
            }
        }
    }
    assert_eq!(seen.len(), 4, "distinct truncated classes");
    assert_eq!(last_new, 64, "the class set is stable from weight 64 up");
}

#[test]
fn averaged_families_follow_the_eigenvalue_law() {
    // The congruent-mod-5 pair of weight 36 (distinct mod 25).
    let systems = strong_eigensystems(36, 5, 2).unwrap();
    let rational: Vec<&Eigensystem> = systems
        .iter()
        .filter(|s| !s.ramified && s.residue_degree == 1)
        .collect();
    let ring1 = ResidueRing::new(5, 1);
    let mut pair = None;
    'outer: for i in 0..rational.len() {
        for j in (i + 1)..rational.len() {
            let (f, g) = (rational[i], rational[j]);
            if f.coefficients == g.coefficients {
                continue;
            }
            let congruent = (1..=f.bound().min(g.bound()))
                .all(|n| ring1.reduce_uint(&f.a(n)[0]) == ring1.reduce_uint(&g.a(n)[0]));
            if congruent {
                pair = Some((f, g));
                break 'outer;
            }
        }
    }
    let (f, g) = pair.expect("weight 36 holds a congruent pair mod 5");

    let b = sturm_bound(36);
    let prec = b * (b + 1) + 1;
    let w = UnramifiedRing::standard(5, 2, 2);
    let fw = eigenform_series(f, prec).map_ring(&w, |c| w.from_coords(c.clone()));
    let gw = eigenform_series(g, prec).map_ring(&w, |c| w.from_coords(c.clone()));
    let lam: Vec<UnramifiedElt> = (1..=b).map(|n| w.embed_base(&f.a(n)[0])).collect();
    let mu: Vec<UnramifiedElt> = (1..=b).map(|n| w.embed_base(&g.a(n)[0])).collect();

    // Ratios over the base and over the quadratic extension; all pairs
    // with distinct t = b/(a+b) mod 5 must give distinct systems.
    let elt = |c0: u64, c1: u64| w.from_coords(vec![BigUint::from(c0), BigUint::from(c1)]);
    let ratios = [
        (elt(1, 0), elt(0, 0)),  // t = 0: the form f itself
        (elt(0, 0), elt(1, 0)),  // t = 1: the form g
        (elt(1, 0), elt(1, 0)),  // t = 3 mod 5
        (elt(2, 0), elt(1, 0)),  // t = 2 mod 5
        (elt(3, 0), elt(1, 0)),  // t = 4 mod 5
        (elt(0, 1), elt(1, 0)),  // t with a nontrivial extension part
        (elt(1, 1), elt(1, 0)),
        (elt(0, 2), elt(3, 1)),
    ];
    let mut signatures = Vec::new();
    for (ra, rb) in &ratios {
        let h = construct_hab(&fw, &gw, ra, rb).unwrap();
        let law = hab_eigenvalues(&w, &lam, &mu, ra, rb).unwrap();
        match is_weak_eigenform(&h).unwrap() {
            WeakCheck::Eigenform { eigenvalues } => assert_eq!(eigenvalues, law),
            WeakCheck::NotEigenform { index } => panic!("average fails at T_{}", index),
        }
        signatures.push(law);
    }
    for i in 0..signatures.len() {
        for j in (i + 1)..signatures.len() {
            assert_ne!(signatures[i], signatures[j], "ratios {} and {}", i, j);
        }
    }

    // Degenerate scalars are rejected, not mishandled: a + b = 5u.
    assert!(construct_hab(&fw, &gw, &elt(2, 0), &elt(3, 0)).is_err());
}

// ------------------------------------------------------------ mod-2 calculus

fn rand_delta_poly(rng: &mut SplitMix64, max_deg: u64, terms: u64) -> DeltaPolyF2 {
    let mut p = DeltaPolyF2::zero();
    for _ in 0..terms {
        p.set_coeff(rng.below(max_deg + 1) as usize, true);
    }
    p
}

#[test]
fn odd_hecke_operators_preserve_parity_split() {
    let mut rng = SplitMix64::new(0x5eed_0006);
    for _ in 0..30 {
        let p = rand_delta_poly(&mut rng, 40, 9);
        let (even, odd) = p.parity_split();
        assert_eq!(even.add(&odd), p);
        assert!(even.support().iter().all(|e| e % 2 == 0));
        assert!(odd.support().iter().all(|e| e % 2 == 1));
        for ell in [3u64, 5, 7] {
            let t_even = t_ell_delta(&even, ell).unwrap();
            let t_odd = t_ell_delta(&odd, ell).unwrap();
            assert!(
                t_even.support().iter().all(|e| e % 2 == 0),
                "T_{} keeps even degrees even",
                ell
            );
            assert!(
                t_odd.support().iter().all(|e| e % 2 == 1),
                "T_{} keeps odd degrees odd",
                ell
            );
            assert_eq!(
                t_ell_delta(&p, ell).unwrap(),
                t_even.add(&t_odd),
                "T_{} is linear",
                ell
            );
        }
    }
}

#[test]
fn halving_inverts_squaring_through_degree_forty() {
    let mut rng = SplitMix64::new(0x5eed_0007);
    for _ in 0..40 {
        let p = rand_delta_poly(&mut rng, 40, 8);
        assert_eq!(u_op(&v_op(&p)), p, "U(V(f)) = f");

        // V is squaring of the q-expansion.
        let deg = p.degree().unwrap_or(0);
        let mut calc = DeltaCalculus::new(4 * (deg + 1) + 2);
        let fq = calc.q_series(&p);
        let vq = calc.q_series(&v_op(&p));
        let squared = fq.mul(&fq);
        assert_eq!(
            vq.truncated(squared.prec()),
            squared.truncated(vq.prec()),
            "V doubles every exponent"
        );

        // On squares, halving and squaring are two-sided inverses.
        let (even, _) = p.parity_split();
        assert_eq!(v_op(&u_op(&even)), even, "V(U(g)) = g on even support");
    }
}

#[test]
fn degree_bounds_grow_monotonically() {
    let mut prev = 0;
    for k in (1..=41u64).step_by(2) {
        let n = compute_nk(k).unwrap();
        assert!(n >= prev, "N({}) = {} dips below {}", k, n, prev);
        prev = n;
    }
    assert_eq!(compute_nk(1).unwrap(), 5);
    assert_eq!(compute_nk(5).unwrap(), 17);
}
