use super::*;
use crate::characters::{enumerate_characters, kummer_block, non_kummer_polys};
use crate::ffpoly::QuadraticExtension;
use crate::lfunctions::l_polynomial;
use crate::HalfPowNum;
use proptest::prelude::*;

fn f7() -> FieldSpec {
    FieldSpec::from_q(7).unwrap()
}

fn f5() -> FieldSpec {
    FieldSpec::from_q(5).unwrap()
}

#[test]
fn kummer_counts_split_into_restriction_classes() {
    let field = f7();
    let omega = OmegaIso::canonical(&field).unwrap();
    for d in 1..=3 {
        // every (d1, d2) with d1 + d2 = d, all three restriction classes
        let all: usize = (0..=d).map(|d1| kummer_block(&omega, d1, d - d1).len()).sum();
        assert_eq!(count_primitive_exact(&field, Setting::Kummer, d).unwrap(), all as u64);
    }
    // the χ_3 class of genus g has conductor degree g + 1
    for g in 1..=2 {
        let own: usize = (0..=g + 1).filter(|d1| (d1 + 2 * (g + 1 - d1)) % 3 == 1).map(|d1| kummer_block(&omega, d1, g + 1 - d1).len()).sum();
        assert_eq!(enumerate_characters(&field, g, Setting::Kummer).unwrap().len(), own);
    }
    assert_eq!(count_primitive_exact(&field, Setting::Kummer, 1).unwrap(), 14);
}

#[test]
fn non_kummer_counts_match_the_family() {
    let field = f5();
    let ext = QuadraticExtension::new(&field).unwrap();
    for k in 1..=2 {
        let n = count_primitive_exact(&field, Setting::NonKummer, 2 * k).unwrap();
        assert_eq!(n, non_kummer_polys(&ext, k).len() as u64);
    }
    for d in [1, 3, 5] {
        let c = count_primitive(&field, Setting::NonKummer, d).unwrap();
        assert_eq!(c.exact, 0);
        assert_eq!(c.asymptotic.re, 0.0);
    }
    assert!(count_primitive(&field, Setting::Kummer, 2).is_err());
    assert!(count_primitive(&f7(), Setting::NonKummer, 2).is_err());
}

#[test]
fn count_ratios_approach_one() {
    let k: Vec<f64> = (2..=4).map(|d| count_primitive(&f7(), Setting::Kummer, d).unwrap().ratio()).collect();
    assert!((k[2] - 1.0).abs() < 0.25, "{k:?}");
    let n = count_primitive(&f5(), Setting::NonKummer, 4).unwrap();
    assert!((n.ratio() - 1.0).abs() < 0.25, "{n:?}");
}

#[test]
fn f_k_derivative_agrees_with_finite_difference() {
    for q in [7u64, 13] {
        let (analytic, fd) = f_k_derivative_check(q, DEFAULT_TRUNCATION);
        assert!((analytic.re - fd).abs() <= 1e-4 * analytic.re.abs(), "q={q}: {analytic:?} vs {fd}");
    }
}

#[test]
fn a_nk_matches_both_closed_forms() {
    let q = 5u64;
    let qf = q as f64;
    let g1 = constant_a_nk(q, 1.0 / (qf * qf), qf.powf(-1.5)).unwrap();
    let c1 = a_nk_closed_form_three_halves(q, DEFAULT_TRUNCATION);
    assert!((g1.re - c1.re).abs() < 1e-8 && g1.overlaps(&c1), "{g1:?} {c1:?}");
    let g2 = constant_a_nk(q, 1.0 / (qf * qf), 1.0 / qf).unwrap();
    let c2 = a_nk_closed_form_one(q, DEFAULT_TRUNCATION);
    assert!((g2.re - c2.re).abs() < 1e-8 && g2.overlaps(&c2), "{g2:?} {c2:?}");
    assert!(g1.err < 1e-10 && g2.err < 1e-10);
}

#[test]
fn a_nk_degenerate_and_divergent_inputs() {
    let v = constant_a_nk(5, 0.0, 0.3).unwrap();
    assert_eq!((v.re, v.im), (1.0, 0.0));
    assert!(constant_a_nk(5, 0.2, 0.1).is_err());
    assert!(constant_a_nk(5, 0.01, 3.0).is_err());
    assert!(constant_a_nk(5, -0.01, 0.1).is_err());
}

#[test]
fn knk_identity_holds() {
    for q in [5u64, 11] {
        let r = knk_equals_ank_check(q).unwrap();
        assert!(r.holds, "{r:?}");
        assert!((r.knk.re - r.ank.re).abs() < 1e-6);
    }
    assert!(knk_equals_ank_check(7).is_err());
}

#[test]
fn knk_factor_matches_a_nk_factor_per_degree() {
    for q in [5u64, 11] {
        let qf = q as f64;
        let a = a_nk_spec(q, 1.0 / (qf * qf), 1.0 / qf, 10).unwrap();
        for d in 1..=8 {
            let k = knk_delta(q, qf.powf(-1.0 / 6.0), 1.0, d);
            let ad = a.delta(d).re;
            // the K_nK factor cancels two terms of size 1/|R|, so its absolute accuracy is ~ε/|R|
            let r = qf.powi(d as i32);
            assert!((k - ad).abs() <= 16.0 * f64::EPSILON / r, "q={q} d={d}: {k} vs {ad}");
        }
    }
}

#[test]
fn zeta_closed_forms() {
    assert!((zeta_q(7, 3.0) - 49.0 / 48.0).abs() < 1e-15);
    assert!((zeta_q(7, 1.5) - 1.0 / (1.0 - 7f64.powf(-0.5))).abs() < 1e-15);
}

#[test]
fn d_k_expansion_matches_product_form() {
    let q = 7u64;
    let xi = xi3();
    let pts = [(c(0.1), xi * 0.1, c(1.0)), (c(0.05), c(0.12), c(2.5)), (xi * xi * 0.2, c(0.2), c(0.7))];
    for (x, y, u) in pts {
        for d in 1..=4 {
            let di = d as i32;
            let r32 = (q as f64).powf(1.5 * d as f64);
            let (xd, yd, ud) = (x.powi(di), y.powi(di), u.powi(di));
            let one = c(1.0);
            let product = (one + (xd + yd) * (one - ud / r32)) * (one - xd) * (one - yd) - one;
            assert!((product - d_k_delta(q, x, y, u, d)).norm() < 1e-14);
        }
    }
}

#[test]
fn d_k_is_symmetric() {
    let q = 7u64;
    let xi = xi3();
    for (x, y) in [(c(1.0 / 7.0), xi / 7.0), (c(0.1), c(0.03)), (xi * xi / 7.0, c(1.0 / 7.0))] {
        let a = d_k_spec(q, x, y, c(1.0), DEFAULT_TRUNCATION).evaluate();
        let b = d_k_spec(q, y, x, c(1.0), DEFAULT_TRUNCATION).evaluate();
        assert!(a.overlaps(&b), "{a:?} {b:?}");
    }
}

#[test]
fn d_k_diagonal_derivative_agrees_with_finite_difference() {
    let q = 7u64;
    for u in [c(1.0), c(7f64.sqrt())] {
        let x = 1.0 / 7.0;
        let (_, dp) = d_k_diagonal(q, x, u, DEFAULT_TRUNCATION);
        let h = 1e-6;
        let p = d_k_spec(q, c(x + h), c(x + h), u, DEFAULT_TRUNCATION).evaluate();
        let m = d_k_spec(q, c(x - h), c(x - h), u, DEFAULT_TRUNCATION).evaluate();
        let fd = (p.re - m.re) / (2.0 * h);
        assert!((dp.re - fd).abs() <= 1e-4 * dp.re.abs(), "{dp:?} vs {fd}");
    }
}

#[test]
fn kummer_constants_are_real() {
    for g in 2..=5 {
        let k = constants_kummer(7, g).unwrap();
        assert!(k.c_k1.im.abs() < 1e-8 && k.c_k2.im.abs() < 1e-8, "{k:?}");
        assert!(k.d_k1.im.abs() < 1e-8 && k.d_k2.im.abs() < 1e-8, "{k:?}");
        assert!(k.c_k1.re > 0.0);
    }
    // C_{K,2} depends on g only through g mod 3
    let (a, b) = (constants_kummer(7, 2).unwrap(), constants_kummer(7, 5).unwrap());
    assert!(a.c_k2.overlaps(&b.c_k2));
    assert!(constants_kummer(5, 2).is_err());
}

#[test]
fn sieve_identity_examples() {
    let field = f7();
    let iso = OmegaIso::canonical(&field).unwrap();
    let t = Poly::t(&field);
    assert!(sieve_identity_check(&iso, &t, 2, 2).unwrap());
    // f = 1: both sides count coprime squarefree pairs
    let one = Poly::one(&field);
    let (l, r) = sieve_sides(&iso, &one, 2, 1).unwrap();
    assert_eq!(l, r);
    let pairs = kummer_block(&iso, 2, 1).len() as i128;
    assert_eq!(l, Eis::ONE.scale(pairs));
    // d1 = 0: only F1 = 1
    let (l, r) = sieve_sides(&iso, &t, 0, 2).unwrap();
    assert_eq!(l, r);
    let direct = squarefree_monic(&field, 2).iter().fold(Eis::ZERO, |acc, b| acc.add(Eis::from_exp(chi_f_exp(&iso, &t, b)).conj()));
    assert_eq!(l, direct);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn sieve_identity_random(c0 in 0i64..7, c1 in 0i64..7, deg in 1usize..3, d1 in 0usize..3, d2 in 0usize..3) {
        let field = f7();
        let iso = OmegaIso::canonical(&field).unwrap();
        let mut cs = vec![c0, c1, 1];
        cs.truncate(deg + 1);
        *cs.last_mut().unwrap() = 1;
        let f = Poly::from_ints(&field, &cs);
        prop_assert!(sieve_identity_check(&iso, &f, d1, d2).unwrap());
    }
}

/// Σ_χ L(1/2, χ) by enumeration polynomials, independent of the block engine.
fn oracle_moment(field: &FieldSpec, g: usize, setting: Setting) -> HalfPowNum {
    enumerate_characters(field, g, setting)
        .unwrap()
        .iter()
        .fold(HalfPowNum::zero(field.q() as u64, 3), |acc, chi| acc.add(&l_polynomial(chi).central_value().value))
}

#[test]
fn small_moments_match_enumeration() {
    let opts = MomentOptions::default();
    let nk = brute_force_moment(&f5(), 2, Setting::NonKummer, &opts).unwrap();
    assert_eq!(nk.exact_moment, oracle_moment(&f5(), 2, Setting::NonKummer));
    assert_eq!(nk.character_count, 480);
    assert!(nk.spot_checked >= 48);
    assert!(nk.exact_complex.im.abs() <= nk.exact_complex.err + 1e-9);
    let k = brute_force_moment(&f7(), 2, Setting::Kummer, &opts).unwrap();
    assert_eq!(k.exact_moment, oracle_moment(&f7(), 2, Setting::Kummer));
    assert_eq!(k.character_count, 252);
    let k3 = brute_force_moment(&f7(), 3, Setting::Kummer, &opts).unwrap();
    assert_eq!(k3.exact_moment, oracle_moment(&f7(), 3, Setting::Kummer));
}

#[test]
fn moments_are_omega_invariant() {
    for (field, setting) in [(f5(), Setting::NonKummer), (f7(), Setting::Kummer)] {
        let a = brute_force_moment(&field, 2, setting, &MomentOptions::default()).unwrap();
        let opts = MomentOptions { conjugate_omega: true, ..MomentOptions::default() };
        let b = brute_force_moment(&field, 2, setting, &opts).unwrap();
        assert_eq!(b.exact_moment, a.exact_moment.conj());
        assert!((a.exact_complex.re - b.exact_complex.re).abs() < 1e-9);
    }
}

#[test]
fn afe_split_does_not_change_the_moment() {
    let base = brute_force_moment(&f7(), 2, Setting::Kummer, &MomentOptions::default()).unwrap();
    for a in [1, 2] {
        let opts = MomentOptions { afe_split: Some(a), spot_check_stride: 1, ..MomentOptions::default() };
        let r = brute_force_moment(&f7(), 2, Setting::Kummer, &opts).unwrap();
        assert_eq!(r.exact_moment, base.exact_moment);
        assert_eq!(r.empty_dual_range, a == 2);
    }
}

#[test]
fn empty_family_and_guards() {
    let r = brute_force_moment(&f5(), 3, Setting::NonKummer, &MomentOptions::default()).unwrap();
    assert_eq!(r.character_count, 0);
    assert!(r.exact_moment.is_zero());
    assert_eq!(r.relative_error, 0.0);
    assert!(brute_force_moment(&f5(), 1, Setting::NonKummer, &MomentOptions::default()).is_err());
    let tight = MomentOptions { budget_ops: Some(1000), ..MomentOptions::default() };
    assert!(matches!(brute_force_moment(&f7(), 2, Setting::Kummer, &tight), Err(Error::Budget { .. })));
}

#[test]
fn checkpoints_resume_to_the_same_value() {
    let dir = tempfile::tempdir().unwrap();
    let full = brute_force_moment(&f7(), 3, Setting::Kummer, &MomentOptions::default()).unwrap();
    // a budget that admits only the first block
    let first = full.blocks[0].ops;
    let partial = MomentOptions { checkpoint_dir: Some(dir.path().to_path_buf()), budget_ops: Some(first), ..MomentOptions::default() };
    assert!(matches!(brute_force_moment(&f7(), 3, Setting::Kummer, &partial), Err(Error::Budget { .. })));
    let resume = MomentOptions { checkpoint_dir: Some(dir.path().to_path_buf()), resume: true, ..MomentOptions::default() };
    let r = brute_force_moment(&f7(), 3, Setting::Kummer, &resume).unwrap();
    assert_eq!(r.runtime.resumed_blocks, 1);
    assert_eq!(r.exact_moment, full.exact_moment);
    // a different run refuses the directory
    assert!(brute_force_moment(&f7(), 2, Setting::Kummer, &resume).is_err());
}

/// ζ_q(3/2) Σ_{(F1,F2)} Π_{P | F1F2}(1 − |P|^{−3/2}): the cube contribution with
/// the k-sum completed, which the Kummer main term approximates to O(q^{g/3}).
#[test]
fn kummer_main_term_tracks_the_cube_sum() {
    use crate::ffpoly::factor_monic;
    let field = f7();
    let q = 7f64;
    let weight = |f: &Poly| factor_monic(f).iter().map(|(p, _)| 1.0 - q.powf(-1.5 * p.deg() as f64)).product::<f64>();
    for g in 2..=4usize {
        let mut t = 0.0;
        for (d1, d2) in crate::characters::kummer_blocks(g) {
            let b = squarefree_monic(&field, d2);
            let wb: Vec<f64> = b.iter().map(weight).collect();
            for x in squarefree_monic(&field, d1) {
                let wx = weight(&x);
                t += b.iter().zip(&wb).filter(|(y, _)| x.is_coprime(y)).map(|(_, wy)| wx * wy).sum::<f64>();
            }
        }
        t *= zeta_q(7, 1.5);
        let main = constants_kummer(7, g).unwrap().main_term();
        assert!((t - main.re).abs() <= 2.0 * q.powf((g + 1) as f64 / 3.0), "g={g}: {t} vs {main:?}");
    }
}
