//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! The heavy sample build is shared across criteria through a lazy context.
//!
//! Three clauses are implemented exactly as specified and fail on measured
//! desk-scale mathematics rather than on implementation defects; their
//! failure messages carry the measured values (see the project README for
//! the analysis):
//!   - free-fit recovery of the leading moment coefficient over [500, 5000],
//!   - the non-increasing-trend statistics for the E2 envelopes,
//!   - the saddle remainder slope 3 and the dF/dT positivity.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::LazyLock;
use std::time::Instant;
use zetalab::mellin::{
    c_from_a, lemma4_ratio, mellin_inverse, parseval_pair, TailModel, TransformFn,
    Z2Continuation, ZkTransform, LINE_STEP,
};
use zetalab::moments::{fit_p4, FitResult, MomentEngine, MomentTable, A4_PINNED};
use zetalab::numerics::{smooth_bump, BumpSpec};
use zetalab::spectral::{
    load_spectral, saddle_df, saddle_f, saddle_z0, saddle_z0_offset, weight,
};
use zetalab::zeta::{
    sample_line, z_deriv_remainder, z_hardy, z_hardy_deriv, zeta_em_auto, CacheInterp,
    EvalMethod, SampleCache,
};
use zetalab::Complex;

const TABLE_MAX: f64 = 5000.0;
const X_TRUNC: f64 = 1000.0;

struct BigCtx {
    interp: CacheInterp,
    table: MomentTable,
    free_fit: FitResult,
    diagnostic_fit: FitResult,
}

static CTX: LazyLock<BigCtx> = LazyLock::new(|| {
    let start = Instant::now();
    let mut cache = SampleCache::in_memory();
    let step = 1.0 / 64.0;
    sample_line(0.0, TABLE_MAX + 1.0, step, &mut cache, EvalMethod::EulerMaclaurin).unwrap();
    let interp = CacheInterp::new(&cache, 0.0, TABLE_MAX + 1.0, step).unwrap();
    let engine = MomentEngine::from_cache(interp.clone());
    let grid = engine.build_grid(TABLE_MAX, 0.125).unwrap();
    let pinned = fit_p4(&grid, 500.0, TABLE_MAX, true).unwrap();
    let free_fit = fit_p4(&grid, 500.0, TABLE_MAX, false).unwrap();
    let diagnostic_fit = fit_p4(&grid, 100.0, TABLE_MAX, false).unwrap();
    eprintln!(
        "[acceptance] shared build: {} samples, {} rows, {:.1} s",
        cache.len(),
        grid.i4.len(),
        start.elapsed().as_secs_f64()
    );
    BigCtx {
        interp,
        table: MomentTable::new(grid, pinned.coeffs),
        free_fit,
        diagnostic_fit,
    }
});

fn verdict(name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_1_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0xacce9701);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let t = rng.gen_range(10.0..500.0);
        let (zeta, _) = zeta_em_auto(Complex::new(0.5, t)).unwrap();
        worst = worst.max((z_hardy(t).abs() - zeta.norm()).abs());
    }
    let pass = worst < 1e-8 && start.elapsed().as_secs() < 60;
    verdict(
        "1 oracle equivalence",
        pass,
        &format!("worst gap {worst:.2e} over 200 points, {:.1} s", start.elapsed().as_secs_f64()),
    );
    assert!(pass, "worst |Z| vs |zeta| gap {worst:.2e} exceeds 1e-8");
}

#[test]
fn criterion_2_derivative_expansion() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0xacce9702);
    let mut ok = true;
    for _ in 0..10 {
        let t = rng.gen_range(60.0..400.0);
        let h = 1e-3;
        let fd1 = (z_hardy(t + h) - z_hardy(t - h)) / (2.0 * h);
        let d1 = z_hardy_deriv(t, 1).unwrap();
        ok &= (d1 - fd1).abs() <= z_deriv_remainder(t, 1) + 1e-3;
        let fd2 = (z_hardy(t + h) - 2.0 * z_hardy(t) + z_hardy(t - h)) / (h * h);
        let d2 = z_hardy_deriv(t, 2).unwrap();
        ok &= (d2 - fd2).abs() <= z_deriv_remainder(t, 2) + 1e-2;
    }
    verdict(
        "2 derivative expansion",
        ok,
        &format!("k in {{1,2}} x 10 points, {:.1} s", start.elapsed().as_secs_f64()),
    );
    assert!(ok);
}

#[test]
fn criterion_3_a4_recovery() {
    let ctx = &CTX;
    let a4 = ctx.free_fit.coeffs.a[4];
    let dev = (a4 - A4_PINNED) / A4_PINNED;
    let diag = ctx.diagnostic_fit.coeffs.a[4];
    let diag_dev = (diag - A4_PINNED) / A4_PINNED;
    let pass = dev.abs() <= 0.15;
    verdict(
        "3 a4 recovery",
        pass,
        &format!(
            "free fit over [500,5000]: a4 = {a4:.6} ({:+.1}%); diagnostic fit over [100,5000]: {diag:.6} ({:+.1}%)",
            100.0 * dev,
            100.0 * diag_dev
        ),
    );
    assert!(
        pass,
        "free-fit a4 = {a4:.6} deviates {:+.1}% from 1/(2 pi^2); the deviation is \
         dominated by genuine heavy-tailed fluctuations of the integrand at desk scale, \
         not by quadrature error (integrals validated externally to 1e-8); the same \
         estimator over [100,5000] gives {diag:.6} ({:+.1}%)",
        100.0 * dev,
        100.0 * diag_dev
    );
}

#[test]
fn criterion_4a_e2_sign_changes() {
    let ctx = &CTX;
    let changes = ctx.table.e2_sign_changes(100.0, TABLE_MAX);
    let pass = changes >= 10;
    verdict("4a E2 sign changes", pass, &format!("{changes} on [100, 5000]"));
    assert!(pass, "only {changes} sign changes");
}

#[test]
fn criterion_4b_e2_trend_statistics() {
    let ctx = &CTX;
    let sup_blocks = ctx.table.e2_sup_scaled(100.0, TABLE_MAX, 2.0 / 3.0);
    let (sup_slope, sup_err) = trend(&sup_blocks);
    let ms_blocks: Vec<(f64, f64)> = sup_blocks
        .iter()
        .map(|&(tm, _)| {
            let v = ctx.table.e2_mean_square(tm.min(TABLE_MAX)).unwrap();
            (tm, v / (tm * tm))
        })
        .collect();
    let (ms_slope, ms_err) = trend(&ms_blocks);
    let pass = sup_slope <= 2.0 * sup_err && ms_slope <= 2.0 * ms_err;
    verdict(
        "4b E2 trend statistics",
        pass,
        &format!(
            "sup|E2|/T^(2/3) slope {sup_slope:+.3} (2se {:.3}); mean-square/T^2 slope {ms_slope:+.3} (2se {:.3})",
            2.0 * sup_err,
            2.0 * ms_err
        ),
    );
    assert!(
        pass,
        "trend statistics increase significantly: sup slope {sup_slope:+.3} vs allowance {:.3}, \
         mean-square slope {ms_slope:+.3} vs allowance {:.3}; at desk scale the error term \
         grows faster than its asymptotic envelopes (integrals validated externally)",
        2.0 * sup_err,
        2.0 * ms_err
    );
}

fn trend(blocks: &[(f64, f64)]) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = blocks
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|&(t, v)| (t.ln(), v.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let ss: f64 = pts
        .iter()
        .map(|p| {
            let r = p.1 - my - slope * (p.0 - mx);
            r * r
        })
        .sum();
    (slope, (ss / (n - 2.0) / sxx).sqrt())
}

#[test]
fn criterion_5_mellin_identity_suite() {
    let start = Instant::now();
    let ctx = &CTX;

    let inv = mellin_inverse(|s| 1.0 / (s + 1.0), 2.0, 2.0, 1000.0).unwrap();
    let inv_ok = (inv - 0.25).abs() < 1e-3;

    let tail = TailModel {
        coeff: 1.0,
        power: -2.0,
        log_power: 0,
    };
    let conv = zetalab::mellin::convolve_lines(
        |w| 1.0 / (w + 1.0),
        |w| 1.0 / (w + 1.0),
        &tail,
        &tail,
        Complex::new(2.0, 0.0),
        1.5,
        1000.0,
    )
    .unwrap();
    let conv_ok = (conv - Complex::new(0.2, 0.0)).norm() < 1e-4;

    let f2 = TransformFn::power_law(-2.0);
    let pair = parseval_pair(&f2, 1.0, 1e3, 1000.0).unwrap();
    let parseval_ok = (pair.rhs + pair.rhs_tail - pair.lhs).abs() < 1e-4;

    let e2_fn = {
        let table = ctx.table.clone();
        TransformFn::new(
            move |x| {
                if (1.0..=X_TRUNC).contains(&x) {
                    table.e2(x).unwrap_or(0.0)
                } else {
                    0.0
                }
            },
            X_TRUNC,
            TailModel::zero(),
        )
        .with_panel_cap(0.5)
    };
    let pair_e2 = parseval_pair(&e2_fn, 1.75, X_TRUNC, 400.0).unwrap();
    let e2_gap = (pair_e2.rhs + pair_e2.rhs_tail - pair_e2.lhs).abs();
    let parseval_e2_ok = e2_gap <= 0.02 * pair_e2.lhs;

    let mut rng = StdRng::seed_from_u64(0xacce9705);
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..50 {
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
        worst_ratio = worst_ratio.max(lemma4_ratio(&g, a, b, sigma, t_upper).unwrap());
    }
    let lemma4_ok = worst_ratio <= 1.0 + 1e-6;

    let pass = inv_ok && conv_ok && parseval_ok && parseval_e2_ok && lemma4_ok;
    verdict(
        "5 mellin identity suite",
        pass,
        &format!(
            "inversion {:.1e}, convolution {:.1e}, parseval {:.1e}, parseval-E2 {:.2}%, worst ratio {worst_ratio:.6}, {:.0} s",
            (inv - 0.25).abs(),
            (conv - Complex::new(0.2, 0.0)).norm(),
            (pair.rhs + pair.rhs_tail - pair.lhs).abs(),
            100.0 * e2_gap / pair_e2.lhs,
            start.elapsed().as_secs_f64()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_6_continuation_consistency() {
    let ctx = &CTX;
    let z2 = ZkTransform::new(&ctx.interp, 2, X_TRUNC, 30.0, Some(&ctx.table.coeffs)).unwrap();
    let z2c = Z2Continuation::new(&ctx.table, X_TRUNC, 30.0).unwrap();
    let mut pass = true;
    let mut worst_margin: f64 = 0.0;
    for i in 0..10 {
        let s = Complex::new(1.5 + 0.25 * i as f64, 3.0 * i as f64);
        let direct = z2.eval(s).unwrap();
        let cont = z2c.eval(s).unwrap();
        let diff = (direct.value - cont.value).norm();
        let budget = direct.trunc_err + cont.trunc_err + 1e-6;
        pass &= diff <= budget;
        worst_margin = worst_margin.max(diff / budget);
    }

    let cj = c_from_a(&ctx.table.coeffs);
    let delta = 1e-2;
    let mut avg = Complex::new(0.0, 0.0);
    for k in 0..4 {
        let theta = std::f64::consts::FRAC_PI_2 * k as f64;
        let s = Complex::new(1.0, 0.0) + Complex::from_polar(delta, theta);
        let sample = z2c.eval(s).unwrap();
        avg += (sample.value - z2c.regular_integral(s)) * (s - 1.0).powu(5);
    }
    avg /= 4.0;
    let c5_ok = (avg - Complex::new(cj.c[4], 0.0)).norm() <= 0.01 * cj.c[4].abs();
    pass &= c5_ok;
    verdict(
        "6 continuation consistency",
        pass,
        &format!(
            "worst diff/budget {worst_margin:.3} over 10 points; principal part {:.8} vs c5 {:.8}",
            avg.re, cj.c[4]
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_7_i_sigma_slope() {
    let start = Instant::now();
    let ctx = &CTX;
    let z2c = Z2Continuation::new(&ctx.table, X_TRUNC, 400.0).unwrap();
    let curve = zetalab::mellin::i_sigma(&z2c, 0.75, 400.0, LINE_STEP).unwrap();
    let slope = curve.loglog_slope(&[50.0, 100.0, 200.0, 400.0]);
    let pass = (0.1..=2.2).contains(&slope);
    verdict(
        "7 I_sigma slope",
        pass,
        &format!(
            "sigma = 0.75: slope {slope:.3} over T in {{50,100,200,400}}; I(400) = {:.3e}, {:.0} s",
            curve.at(400.0),
            start.elapsed().as_secs_f64()
        ),
    );
    assert!(pass, "measured log-log slope {slope:.3} outside [0.1, 2.2]");
}

#[test]
fn criterion_8a_saddle_residual_and_point() {
    let mut worst: f64 = 0.0;
    for (r, t) in [(10.0, 1e4), (10.0, 1e6), (50.0, 1e5), (3.0, 100.0)] {
        let z0 = saddle_z0(r, t).unwrap();
        worst = worst.max(saddle_df(z0, r, t).unwrap().abs() / (r / z0).max(1.0));
    }
    let z0 = saddle_z0(10.0, 1e6).unwrap();
    let point_ok = (z0 / 10.0 - (1.0 + 5e-6)).abs() < 1e-10;
    let pass = worst < 1e-10 && point_ok;
    verdict(
        "8a saddle residual",
        pass,
        &format!("worst residual {worst:.2e}; z0/r at (10,1e6) = {:.12}", z0 / 10.0),
    );
    assert!(pass);
}

#[test]
fn criterion_8b_saddle_remainder_slope() {
    // Remainder of the two-term offset expansion across the pinned heights
    // T in {1e4, 1e5, 1e6}, plus a cleaner decade shifted away from the f64
    // resolution floor (at T = 1e6 the true remainder ~8e-23 sits below the
    // ~1e-21 offset resolution).
    let r = 10.0;
    let rem_at = |t: f64| {
        let rho = r / t;
        let d = saddle_z0_offset(r, t).unwrap();
        (d / r - (0.5 * rho + 0.125 * rho * rho)).abs().max(1e-300)
    };
    let slope_over = |ts: [f64; 3]| {
        let lo = rem_at(ts[0]);
        let hi = rem_at(ts[2]);
        (lo / hi).ln() / ((r / ts[0]) / (r / ts[2])).ln()
    };
    let slope = slope_over([1e4, 1e5, 1e6]);
    let clean_slope = slope_over([1e3, 1e4, 1e5]);
    let pass = (slope - 3.0).abs() <= 0.3;
    verdict(
        "8b saddle remainder slope",
        pass,
        &format!("measured {slope:.4} on the pinned heights ({clean_slope:.4} one decade lower), required 3 +- 0.3"),
    );
    assert!(
        pass,
        "measured remainder slope {slope:.4} (pinned heights; {clean_slope:.4} one decade \
         lower, clear of the f64 floor): the coefficient of (r/T)^3 in the saddle offset \
         expansion is exactly zero — the true remainder is -(r/T)^4/128, verified to 50 \
         digits — so the genuine slope is 4, outside the required window 3 +- 0.3"
    );
}

#[test]
fn criterion_8c_saddle_df_dt_positivity() {
    let (r, t) = (50.0, 1e5);
    let ht = t * 1e-4;
    let df_dt = (saddle_f(saddle_z0(r, t + ht).unwrap(), r, t + ht).unwrap()
        - saddle_f(saddle_z0(r, t - ht).unwrap(), r, t - ht).unwrap())
        / (2.0 * ht);
    let pass = df_dt > 0.0;
    verdict(
        "8c saddle dF/dT positivity",
        pass,
        &format!("measured {df_dt:.3e}; r^2/T^2 scale {:.3e}", (r / t).powi(2)),
    );
    assert!(
        pass,
        "dF(z0(T))/dT = {df_dt:.3e} at (r,T) = (50, 1e5): for the displayed phase the \
         composite derivative equals -(r/T)^3/24 (verified to 50 digits), which is \
         negative and far below the r^2/T^2 scale; positivity cannot hold"
    );
}

#[test]
fn criterion_9_spectral_fixture() {
    let start = Instant::now();
    let fixture = fixture_path();
    let ds = load_spectral(&fixture).unwrap();
    assert_eq!(ds.len(), 7);

    // phase vanishes when tau = kappa on a single-record window ([13, 15]
    // holds only the kappa = 14 record and sits inside coverage)
    let single = ds.conj3_sum(14.0, 14.0).unwrap();
    let w14 = 1.0 * 1.2f64.powi(3);
    let phase_ok = (single - Complex::new(w14, 0.0)).norm() < 1e-12;

    // triangle inequality
    let sum = ds.conj3_sum(10.5, 123.4).unwrap();
    let cap = ds.sum_window(10.5, 1.0).unwrap();
    let triangle_ok = sum.norm() <= cap + 1e-12;

    // additivity over a disjoint split
    let full = ds.sum_window(10.5, 1.5).unwrap();
    let left: f64 = ds.window(9.0, 10.5).unwrap().iter().map(weight).sum();
    let right: f64 = ds.window(10.5 + 1e-9, 12.0).unwrap().iter().map(weight).sum();
    let additivity_ok = (full - (left + right)).abs() < 1e-12;

    // hand fold over the window [9.5, 11.5]
    let tau = 77.7;
    let manual: Complex = [(9.5, 0.75, 1.6), (10.25, 1.5, 1.0), (11.0, 0.5, 2.0)]
        .iter()
        .map(|&(kappa, alpha, h): &(f64, f64, f64)| {
            let phase = kappa * (kappa / tau).ln();
            alpha * h.powi(3) * Complex::new(phase.cos(), phase.sin())
        })
        .sum();
    let fold = ds.conj3_sum(10.5, tau).unwrap();
    let fold_ok = (fold - manual).norm() < 1e-12;

    // scans requiring wide real coverage are refused with a coverage error,
    // which the driver surfaces as skipped-with-reason
    let scan = ds.conj3_sup_scan(500.0, 0.2, 1.0);
    let skip_ok = scan.is_err();

    let pass = phase_ok && triangle_ok && additivity_ok && fold_ok && skip_ok;
    verdict(
        "9 spectral fixture",
        pass,
        &format!(
            "phase {phase_ok}, triangle {triangle_ok}, additivity {additivity_ok}, fold {fold_ok}, scan-skip {skip_ok}, {:.1} s",
            start.elapsed().as_secs_f64()
        ),
    );
    assert!(pass);
}

fn fixture_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/spectral_fixture.csv")
        .canonicalize()
        .expect("fixture shipped with the repository")
}

#[test]
fn criterion_10_pipeline_determinism() {
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_zetalab");
    let base = std::env::temp_dir().join(format!("zl_accept_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&base);
    let dir_a = base.join("a");
    let dir_b = base.join("b");
    run_pipeline(bin, &dir_a, 1);
    // warm rerun into the same directory: unchanged inputs, unchanged bytes
    let before: Vec<(String, Vec<u8>)> = artifact_bytes(&dir_a);
    run_pipeline(bin, &dir_a, 1);
    let after = artifact_bytes(&dir_a);
    assert_eq!(before.len(), after.len());
    for ((name_a, bytes_a), (name_b, bytes_b)) in before.iter().zip(&after) {
        assert_eq!(name_a, name_b);
        assert_eq!(bytes_a, bytes_b, "warm rerun changed {name_a}");
    }
    // different worker count into a fresh directory
    run_pipeline(bin, &dir_b, 4);
    let other = artifact_bytes(&dir_b);
    assert_eq!(before.len(), other.len());
    let mut compared = 0;
    for ((name_a, bytes_a), (name_b, bytes_b)) in before.iter().zip(&other) {
        assert_eq!(name_a, name_b);
        assert_eq!(bytes_a, bytes_b, "worker count changed {name_a}");
        compared += 1;
    }
    // the SVG parses as XML and carries the two guide curves
    let svg = std::fs::read_to_string(dir_a.join("e2_plot.svg")).unwrap();
    assert!(xml_well_formed(&svg), "plot is not well-formed XML");
    assert_eq!(
        svg.matches("class=\"guide\"").count(),
        2,
        "expected exactly two guide paths"
    );
    assert!(!svg.contains("href"), "plot must be self-contained");
    let _ = std::fs::remove_dir_all(&base);
    verdict(
        "10 determinism",
        true,
        &format!("{compared} artifacts byte-identical across reruns and worker counts, {:.0} s", start.elapsed().as_secs_f64()),
    );
}

fn run_pipeline(bin: &str, out: &Path, workers: usize) {
    std::fs::create_dir_all(out).unwrap();
    let fixture = fixture_path();
    for stage in ["sample", "moments", "mellin", "spectral", "report"] {
        let status = Command::new(bin)
            .args([
                stage,
                "--out",
                out.to_str().unwrap(),
                "--workers",
                &workers.to_string(),
                "--t0",
                "0",
                "--t1",
                "130",
                "--step",
                "0.015625",
                "--X",
                "100",
                "--tmax",
                "200",
                "--sigma",
                "0.75",
                "--spectral-data",
                fixture.to_str().unwrap(),
                "--config",
                &write_mini_config(out),
            ])
            .output()
            .expect("stage spawns");
        // stages exit 0; report exits 1 when checks fail (expected here:
        // the known desk-scale reds), 2 only on operational errors
        assert!(
            status.status.code().unwrap_or(2) <= 1,
            "stage {stage} errored: {}",
            String::from_utf8_lossy(&status.stderr)
        );
    }
}

fn write_mini_config(out: &Path) -> String {
    let path = out.join("mini.conf");
    let text = format!(
        "cache = {}\nout = {}\ntable_max = 120\ntable_step = 0.125\nfit_lo = 20\n\
         i_sigma_tmax = 60\ne2_contour_t = 80\nlemma4_cases = 5\nscan_t = 11\nscan_delta = 0.1\n",
        out.join("samples.zcache").display(),
        out.display()
    );
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn artifact_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut names: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.extension()
                .map(|x| x == "csv" || x == "svg" || x == "zcache")
                .unwrap_or(false)
        })
        .collect();
    // include the per-sigma line exports
    let lines = dir.join("lines");
    if lines.exists() {
        names.extend(
            std::fs::read_dir(lines)
                .unwrap()
                .filter_map(|e| e.ok())
                .map(|e| e.path()),
        );
    }
    names.sort();
    for p in names {
        out.push((
            p.file_name().unwrap().to_string_lossy().into_owned(),
            std::fs::read(&p).unwrap(),
        ));
    }
    out
}

/// Tiny well-formedness check: declarations, balanced tags, quoted attrs.
fn xml_well_formed(text: &str) -> bool {
    let mut stack: Vec<String> = Vec::new();
    let mut rest = text.trim_start();
    if rest.starts_with("<?xml") {
        match rest.find("?>") {
            Some(i) => rest = &rest[i + 2..],
            None => return false,
        }
    }
    while let Some(open) = rest.find('<') {
        let Some(close_rel) = rest[open..].find('>') else {
            return false;
        };
        let tag = &rest[open + 1..open + close_rel];
        rest = &rest[open + close_rel + 1..];
        if let Some(name) = tag.strip_prefix('/') {
            match stack.pop() {
                Some(top) if top == name => {}
                _ => return false,
            }
        } else if !tag.ends_with('/') && !tag.starts_with('!') {
            let name: String = tag
                .chars()
                .take_while(|c| !c.is_whitespace())
                .collect();
            stack.push(name);
        }
    }
    stack.is_empty()
}
