//! Identity suite for the transform calculus: inversion round-trips, the
//! mean-square inequality sweep, and the two independent routes to Z_2
//! (direct integral vs pole expansion plus error-term integral).

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::sync::LazyLock;
use zetalab::mellin::{
    c_from_a, i_sigma, lemma4_ratio, mellin_inverse, mellin_truncated, residue_circle,
    TailModel, TransformFn, Z2Continuation, ZkTransform,
};
use zetalab::moments::{fit_p4, MomentEngine, MomentTable};
use zetalab::numerics::{smooth_bump, BumpSpec};
use zetalab::zeta::{sample_line, CacheInterp, EvalMethod, SampleCache};
use zetalab::Complex;

/// Shared small-scale table and cache: [0, 320] is enough for the identity
/// suite; the acceptance suite exercises the big build.
struct Ctx {
    interp: CacheInterp,
    table: MomentTable,
}

static CTX: LazyLock<Ctx> = LazyLock::new(|| {
    let mut cache = SampleCache::in_memory();
    let step = 1.0 / 64.0;
    sample_line(0.0, 320.0, step, &mut cache, EvalMethod::EulerMaclaurin).unwrap();
    let interp = CacheInterp::new(&cache, 0.0, 320.0, step).unwrap();
    let engine = MomentEngine::from_cache(interp.clone());
    let grid = engine.build_grid(320.0, 0.125).unwrap();
    let fit = fit_p4(&grid, 30.0, 320.0, true).unwrap();
    Ctx {
        interp,
        table: MomentTable::new(grid, fit.coeffs),
    }
});

#[test]
fn inversion_round_trips_at_random_points() {
    let mut rng = StdRng::seed_from_u64(0x11e771);
    for _ in 0..20 {
        let x = rng.gen_range(1.05..10.0);
        let v = mellin_inverse(|s| 1.0 / (s + 1.0), x, 2.0, 1000.0).unwrap();
        assert!(
            (v - x.powf(-2.0)).abs() < 1e-3,
            "x = {x}: {v} vs {}",
            x.powf(-2.0)
        );
        if x < 2.0 {
            let ind = mellin_inverse(
                |s| (1.0 - (2f64.ln() * (1.0 - s)).exp()) / (s - 1.0),
                x,
                2.0,
                1000.0,
            )
            .unwrap();
            assert!((ind - 1.0).abs() < 1e-3, "indicator at {x}: {ind}");
        }
    }
}

#[test]
fn mean_square_ratio_sweep() {
    // 50 random smooth bump combinations, random sigma and T: the ratio of
    // the mean square of the truncated transform to its majorant never
    // exceeds 1 (+ quadrature slack).
    let mut rng = StdRng::seed_from_u64(0x11e772);
    for case in 0..50 {
        let a = rng.gen_range(2.0..5.0);
        let w1 = rng.gen_range(0.5..2.0);
        let plateau = rng.gen_range(0.5..3.0);
        let w2 = rng.gen_range(0.5..2.0);
        let b = a + w1 + plateau + w2;
        let amp = rng.gen_range(0.2..3.0);
        let bump = smooth_bump(BumpSpec::new(a, a + w1, a + w1 + plateau, b)).unwrap();
        let g = TransformFn::new(move |x| amp * bump.eval(x), b, TailModel::zero());
        let sigma = rng.gen_range(0.5..2.0);
        let t_upper = rng.gen_range(10.0..1000.0);
        let ratio = lemma4_ratio(&g, a, b, sigma, t_upper).unwrap();
        assert!(
            ratio <= 1.0 + 1e-6,
            "case {case}: ratio {ratio} (a={a}, b={b}, sigma={sigma}, T={t_upper})"
        );
    }
}

#[test]
fn z2_cross_method_agreement_on_overlap() {
    let ctx = &CTX;
    let x_upper = 300.0;
    let z2 = ZkTransform::new(&ctx.interp, 2, x_upper, 20.0, Some(&ctx.table.coeffs)).unwrap();
    let z2c = Z2Continuation::new(&ctx.table, x_upper, 20.0).unwrap();
    for s in [Complex::new(2.0, 0.0), Complex::new(3.0, 10.0), Complex::new(1.5, 5.0)] {
        let direct = z2.eval(s).unwrap();
        let cont = z2c.eval(s).unwrap();
        let budget = direct.trunc_err + cont.trunc_err + 1e-6;
        assert!(
            (direct.value - cont.value).norm() <= budget,
            "s = {s}: direct {} vs continued {}, budget {budget}",
            direct.value,
            cont.value
        );
    }
}

#[test]
fn z2_conjugate_symmetry() {
    let ctx = &CTX;
    let z2 = ZkTransform::new(&ctx.interp, 2, 300.0, 20.0, Some(&ctx.table.coeffs)).unwrap();
    let z2c = Z2Continuation::new(&ctx.table, 300.0, 20.0).unwrap();
    let s = Complex::new(2.3, 7.7);
    let d = z2.eval(s).unwrap().value;
    let dc = z2.eval(s.conj()).unwrap().value;
    assert!((dc - d.conj()).norm() <= 1e-12 * d.norm());
    let c = z2c.eval(s).unwrap().value;
    let cc = z2c.eval(s.conj()).unwrap().value;
    assert!((cc - c.conj()).norm() <= 1e-12 * c.norm());
}

#[test]
fn zk_reduces_and_matches_trapezoid_oracle() {
    let ctx = &CTX;
    // k = 1 against a brute-force trapezoid over the same samples
    let z1 = ZkTransform::new(&ctx.interp, 1, 200.0, 0.0, None).unwrap();
    let s = Complex::new(2.0, 0.0);
    let got = z1.eval(s).unwrap().value;
    let h = 1.0 / 1024.0;
    let n = ((200.0 - 1.0) / h) as usize;
    let mut oracle = 0.0;
    for i in 0..=n {
        let x = 1.0 + i as f64 * h;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        let z = ctx.interp.z(x);
        oracle += w * z * z * x.powf(-2.0);
    }
    oracle *= h;
    assert!(
        (got.re - oracle).abs() < 1e-6f64.max(1e-6 * oracle.abs()),
        "{got} vs {oracle}"
    );
    assert!(got.im.abs() < 1e-12);
    // conjugate symmetry for k = 1
    let v = z1.eval(Complex::new(2.0, 4.0)).unwrap().value;
    let vc = z1.eval(Complex::new(2.0, -4.0)).unwrap().value;
    assert!((vc - v.conj()).norm() <= 1e-12 * v.norm());
}

#[test]
fn pole_expansion_recovers_c5() {
    let ctx = &CTX;
    let z2c = Z2Continuation::new(&ctx.table, 300.0, 1.0).unwrap();
    let c5 = z2c.cj.c[4];
    let delta = 1e-2;
    // Four approach directions; their average kills the delta^1..3 terms.
    let mut avg = Complex::new(0.0, 0.0);
    for k in 0..4 {
        let theta = std::f64::consts::FRAC_PI_2 * k as f64;
        let s = Complex::new(1.0, 0.0) + Complex::from_polar(delta, theta);
        let sample = z2c.eval(s).unwrap();
        let principal = sample.value - z2c.regular_integral(s);
        let scaled = principal * (s - 1.0).powu(5);
        avg += scaled;
    }
    avg /= 4.0;
    assert!(
        (avg - Complex::new(c5, 0.0)).norm() <= 0.01 * c5.abs(),
        "averaged principal part {avg} vs c5 {c5}"
    );
}

#[test]
fn residue_circle_radius_independence() {
    let ctx = &CTX;
    let z2c = Z2Continuation::new(&ctx.table, 300.0, 1.0).unwrap();
    let r1 = residue_circle(&z2c, 150.0, 0.05);
    let r2 = residue_circle(&z2c, 150.0, 0.1);
    assert!(
        (r1 - r2).abs() <= 1e-6 * r1.abs().max(1.0),
        "radii disagree: {r1} vs {r2}"
    );
}

#[test]
fn i_sigma_monotone_and_matches_half_step() {
    let ctx = &CTX;
    let z2c = Z2Continuation::new(&ctx.table, 300.0, 50.0).unwrap();
    let coarse = i_sigma(&z2c, 0.75, 50.0, 0.1).unwrap();
    for pair in coarse.points.windows(2) {
        assert!(pair[1].1 >= pair[0].1, "not monotone at t = {}", pair[1].0);
    }
    let fine = i_sigma(&z2c, 0.75, 50.0, 0.05).unwrap();
    let a = coarse.at(50.0);
    let b = fine.at(50.0);
    assert!(
        (a - b).abs() <= 0.01 * b.abs(),
        "half-step disagreement: {a} vs {b}"
    );
}

#[test]
fn truncation_models_cover_refinement_moves() {
    // halving X or doubling Tmax never moves a value outside the previously
    // reported error band
    let ctx = &CTX;
    let z2 = ZkTransform::new(&ctx.interp, 2, 300.0, 0.0, Some(&ctx.table.coeffs)).unwrap();
    let z2_half = ZkTransform::new(&ctx.interp, 2, 150.0, 0.0, Some(&ctx.table.coeffs)).unwrap();
    let s = Complex::new(2.5, 3.0);
    let full = z2.eval(s).unwrap();
    let half = z2_half.eval(s).unwrap();
    assert!(
        (full.value - half.value).norm() <= half.trunc_err + 1e-9,
        "X move {} vs band {}",
        (full.value - half.value).norm(),
        half.trunc_err
    );

    let f = TransformFn::power_law(-2.0);
    let short = mellin_truncated(&f, s, 50.0).unwrap();
    let long = mellin_truncated(&f, s, 1000.0).unwrap();
    assert!((long.value - short.value).norm() <= short.trunc_err + 1e-12);
}

#[test]
fn linearity_under_random_combinations() {
    let mut rng = StdRng::seed_from_u64(0x11e773);
    let f = TransformFn::power_law(-2.0);
    let g = TransformFn::indicator(1.0, 2.0);
    for _ in 0..10 {
        let (a, b) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let combo = TransformFn::new(
            {
                let (f, g) = (f.clone(), g.clone());
                move |x| a * f.eval(x) + b * g.eval(x)
            },
            200.0,
            TailModel {
                coeff: a.abs(),
                power: -2.0,
                log_power: 0,
            },
        )
        .with_breakpoints(vec![2.0]);
        let s = Complex::new(2.0, rng.gen_range(-5.0..5.0));
        let lhs = mellin_truncated(&combo, s, 200.0).unwrap().value;
        let rhs = a * mellin_truncated(&f, s, 200.0).unwrap().value
            + b * mellin_truncated(&g, s, 200.0).unwrap().value;
        assert!((lhs - rhs).norm() < 1e-9, "a={a}, b={b}: {lhs} vs {rhs}");
    }
}

#[test]
fn cj_consistency_with_fitted_coefficients() {
    let ctx = &CTX;
    let cj = c_from_a(&ctx.table.coeffs);
    // c_j encode ∫ Q4(log x) x^{-s}: spot check at s = 2 via direct quadrature
    let coeffs = ctx.table.coeffs;
    let q = TransformFn::new(
        move |x: f64| coeffs.eval_q4(x.ln()),
        f64::INFINITY,
        TailModel {
            coeff: 1.0,
            power: 0.0,
            log_power: 5,
        },
    );
    let direct = mellin_truncated(&q, Complex::new(2.0, 0.0), 1e6).unwrap();
    let series = cj.pole_sum(Complex::new(2.0, 0.0));
    assert!(
        (direct.value - series).norm() <= direct.trunc_err.max(1e-6),
        "{} vs {series}",
        direct.value
    );
}
