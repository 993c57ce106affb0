//! `mellin`: the identity-check suite (inversion, convolution, Parseval, the
//! mean-square inequality), line exports of the continued transform, the
//! mean-square slope table, and the contour reconstruction band.

use crate::config::ExperimentConfig;
use crate::report::{write_identity_csv, CheckRecord};
use anyhow::{anyhow, bail, Context, Result};
use std::path::Path;
use zetalab::mellin::{
    c_from_a, convolution_recurrence_check, lemma4_ratio, mellin_inverse, mellin_truncated,
    parseval_pair, residue_circle, e2_contour, TailModel, TransformFn, Z2Continuation,
    ZkTransform, LINE_STEP,
};
use zetalab::moments::{MomentGrid, MomentTable, P4Coefficients, Provenance};
use zetalab::numerics::{smooth_bump, BumpSpec};
use zetalab::zeta::{CacheInterp, SampleCache};
use zetalab::Complex;

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<CheckRecord>> {
    let table = load_moments_artifacts(cfg)?;
    let cache = SampleCache::open(&cfg.cache_path)?;
    let x_upper = cfg.x_trunc.min(table.grid.tmax() - 1.0);
    let interp = CacheInterp::new(&cache, 0.0, x_upper.max(cfg.table_max.min(cfg.t1)), cfg.step)?;

    let stage = "mellin";
    let mut checks = Vec::new();

    // --- closed-form identity suite ---------------------------------------
    let inv = mellin_inverse(|s| 1.0 / (s + 1.0), 2.0, 2.0, cfg.tmax)?;
    checks.push(CheckRecord::compare(
        stage,
        "inversion_power_law",
        inv,
        0.25,
        cfg.tol_inversion,
        "round trip of the x^-2 pair at x = 2",
    ));
    let inv_ind = mellin_inverse(
        |s| (1.0 - (2f64.ln() * (1.0 - s)).exp()) / (s - 1.0),
        1.5,
        2.0,
        cfg.tmax,
    )?;
    checks.push(CheckRecord::compare(
        stage,
        "inversion_indicator",
        inv_ind,
        1.0,
        cfg.tol_inversion,
        "round trip of the indicator pair at x = 1.5",
    ));

    let power_tail = TailModel {
        coeff: 1.0,
        power: -2.0,
        log_power: 0,
    };
    let conv = zetalab::mellin::convolve_lines(
        |w| 1.0 / (w + 1.0),
        |w| 1.0 / (w + 1.0),
        &power_tail,
        &power_tail,
        Complex::new(2.0, 0.0),
        1.5,
        cfg.tmax,
    )?;
    checks.push(CheckRecord::compare(
        stage,
        "convolution_power_law",
        conv.re,
        0.2,
        cfg.tol_convolution,
        "m[x^-4](2) via the w-line",
    ));
    let fg = TransformFn::new(
        |x: f64| if x <= 2.0 { x.powf(-2.0) } else { 0.0 },
        2.0,
        TailModel::zero(),
    )
    .with_breakpoints(vec![2.0]);
    let fg_direct = mellin_truncated(&fg, Complex::new(2.0, 0.0), 2.0)?.value;
    let conv_mixed = zetalab::mellin::convolve_lines(
        |w| 1.0 / (w + 1.0),
        |w| (1.0 - (2f64.ln() * (1.0 - w)).exp()) / (w - 1.0),
        &power_tail,
        &TailModel::zero(),
        Complex::new(2.0, 0.0),
        1.5,
        cfg.tmax,
    )?;
    checks.push(CheckRecord::compare(
        stage,
        "convolution_mixed",
        (conv_mixed - fg_direct).norm(),
        0.0,
        cfg.tol_convolution,
        "mixed pair against direct quadrature",
    ));

    let f2 = TransformFn::power_law(-2.0);
    let pair = parseval_pair(&f2, 1.0, 1e3, cfg.tmax)?;
    checks.push(CheckRecord::compare(
        stage,
        "parseval_power_law",
        pair.rhs + pair.rhs_tail,
        pair.lhs,
        cfg.tol_parseval,
        "both sides of the x^-2 pair at sigma = 1",
    ));
    let ind = TransformFn::indicator(1.0, 2.0);
    let pair_ind = parseval_pair(&ind, 1.0, 10.0, cfg.tmax)?;
    checks.push(CheckRecord::compare(
        stage,
        "parseval_indicator",
        pair_ind.rhs + pair_ind.rhs_tail,
        pair_ind.lhs,
        10.0 * cfg.tol_parseval * pair_ind.lhs,
        "indicator pair; budget 10x tolerance x lhs",
    ));

    // Parseval on the error-term samples
    let e2_x = x_upper;
    let e2_fn = {
        let table = table.clone();
        TransformFn::new(
            move |x| {
                if (1.0..=e2_x).contains(&x) {
                    table.e2(x).unwrap_or(0.0)
                } else {
                    0.0
                }
            },
            e2_x,
            TailModel::zero(),
        )
        .with_panel_cap(0.5)
    };
    let pair_e2 = parseval_pair(&e2_fn, 1.75, e2_x, cfg.tmax.min(400.0))?;
    checks.push(CheckRecord::compare(
        stage,
        "parseval_e2",
        pair_e2.rhs + pair_e2.rhs_tail,
        pair_e2.lhs,
        cfg.tol_parseval_e2 * pair_e2.lhs,
        "mean square identity on error-term samples",
    ));

    // mean-square inequality sweep
    let mut worst: f64 = 0.0;
    let mut state = 0x7ab11ce5u64;
    let mut rng = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..cfg.lemma4_cases {
        let a = 2.0 + 3.0 * rng();
        let w1 = 0.5 + 1.5 * rng();
        let plateau = 0.5 + 2.5 * rng();
        let w2 = 0.5 + 1.5 * rng();
        let b = a + w1 + plateau + w2;
        let amp = 0.2 + 2.8 * rng();
        let bump = smooth_bump(BumpSpec::new(a, a + w1, a + w1 + plateau, b))
            .map_err(|e| anyhow!("{e}"))?;
        let g = TransformFn::new(move |x| amp * bump.eval(x), b, TailModel::zero());
        let sigma = 0.5 + 1.5 * rng();
        let t_upper = 10.0 + 990.0 * rng();
        let ratio = lemma4_ratio(&g, a, b, sigma, t_upper)?;
        worst = worst.max(ratio);
    }
    checks.push(CheckRecord::compare(
        stage,
        "lemma4_ratio_sweep",
        worst,
        0.0,
        1.0 + cfg.lemma4_slack,
        "worst mean-square ratio over the random sweep",
    ));

    // --- the Z_2 transforms ------------------------------------------------
    let cj = c_from_a(&table.coeffs);
    let cj_expected = {
        let q = table.coeffs.q4();
        [q[0], q[1], 2.0 * q[2], 6.0 * q[3], 24.0 * q[4]]
    };
    let cj_dev = cj
        .c
        .iter()
        .zip(&cj_expected)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    checks.push(CheckRecord::compare(
        stage,
        "cj_from_a_symbolic",
        cj_dev,
        0.0,
        1e-12,
        "factorial moment identity",
    ));

    let z2c = Z2Continuation::new(&table, x_upper, cfg.i_sigma_tmax.max(cfg.e2_contour_t))?;
    let z2 = ZkTransform::new(&interp, 2, x_upper, 20.0, Some(&table.coeffs))?;
    for (label, s) in [
        ("z2_cross_method_s2", Complex::new(2.0, 0.0)),
        ("z2_cross_method_s3_10i", Complex::new(3.0, 10.0)),
    ] {
        let direct = z2.eval(s)?;
        let cont = z2c.eval(s)?;
        checks.push(CheckRecord::compare(
            stage,
            label,
            (direct.value - cont.value).norm(),
            0.0,
            direct.trunc_err + cont.trunc_err + 1e-6,
            "direct vs continued on the overlap",
        ));
    }
    let sc = Complex::new(2.3, 7.7);
    let v = z2.eval(sc)?.value;
    let vc = z2.eval(sc.conj())?.value;
    checks.push(CheckRecord::compare(
        stage,
        "z2_conjugate_symmetry",
        (vc - v.conj()).norm(),
        0.0,
        1e-12 * v.norm(),
        "conjugate values at conjugate points",
    ));

    // pole principal part, averaged over four approach directions
    let delta = 1e-2;
    let mut avg = Complex::new(0.0, 0.0);
    for k in 0..4 {
        let theta = std::f64::consts::FRAC_PI_2 * k as f64;
        let s = Complex::new(1.0, 0.0) + Complex::from_polar(delta, theta);
        let sample = z2c.eval(s)?;
        avg += (sample.value - z2c.regular_integral(s)) * (s - 1.0).powu(5);
    }
    avg /= 4.0;
    checks.push(CheckRecord::compare(
        stage,
        "pole_principal_part_c5",
        avg.re,
        cj.c[4],
        0.01 * cj.c[4].abs(),
        "direction-averaged principal part at |s-1| = 1e-2",
    ));

    let r_a = residue_circle(&z2c, cfg.e2_contour_t, 0.05);
    let r_b = residue_circle(&z2c, cfg.e2_contour_t, 0.1);
    checks.push(CheckRecord::compare(
        stage,
        "residue_circle_radii",
        r_a,
        r_b,
        1e-6 * r_a.abs().max(1.0),
        "residue independent of the circle radius",
    ));

    // contour reconstruction band (diagnostic)
    let contour = e2_contour(&z2c, cfg.e2_contour_t, 0.75, cfg.i_sigma_tmax, 0.1)?;
    let direct_e2 = table.e2(cfg.e2_contour_t)?;
    checks.push(CheckRecord::info(
        stage,
        "e2_contour_band",
        contour.value - direct_e2,
        "contour minus direct; O(1)-plus-truncation band recorded",
    ));

    // k = 1 transform against a brute-force trapezoid at the cache quantum
    let z1 = ZkTransform::new(&interp, 1, x_upper.min(200.0), 0.0, None)?;
    let s1 = Complex::new(2.0, 0.0);
    let got = z1.eval(s1)?.value.re;
    let mut oracle = 0.0;
    let h = 1.0 / 1024.0;
    let n = ((x_upper.min(200.0) - 1.0) / h) as usize;
    for i in 0..=n {
        let x = 1.0 + i as f64 * h;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        let z = interp.z(x);
        oracle += w * z * z * x.powf(-2.0);
    }
    oracle *= h;
    checks.push(CheckRecord::compare(
        stage,
        "z1_trapezoid_oracle",
        got,
        oracle,
        1e-6_f64.max(1e-6 * oracle.abs()),
        "k = 1 direct transform vs fixed-step trapezoid",
    ));

    // convolution recurrence on the transforms
    let rec = convolution_recurrence_check(
        &interp,
        &table.coeffs,
        1,
        1,
        Complex::new(4.0, 0.0),
        2.0,
        cfg.tmax.min(400.0),
        x_upper,
    )?;
    let rec_budget = rec.lhs.trunc_err + 2.0 * (rec.rhs - rec.rhs_half).norm() + 1e-9;
    checks.push(CheckRecord::compare(
        stage,
        "convolution_recurrence_1_1",
        (rec.lhs.value - rec.rhs).norm(),
        0.0,
        rec_budget,
        "m = 2 from two k = 1 lines",
    ));

    // --- line exports and slope table --------------------------------------
    let lines_dir = cfg.out_dir.join("lines");
    std::fs::create_dir_all(&lines_dir).with_context(|| lines_dir.display().to_string())?;
    let mut slope_csv = String::from("sigma,i_at_50,i_at_100,i_at_200,i_at_400,slope\n");
    let mut slope_checks = Vec::new();
    for &sigma in &cfg.sigmas {
        let n = ((cfg.i_sigma_tmax - 1.0) / LINE_STEP).ceil() as usize;
        let values = z2c.sweep(sigma, 1.0, LINE_STEP, n + 1);
        write_line_csv(
            &lines_dir.join(format!("line_sigma_{sigma:?}.csv")),
            &z2c,
            sigma,
            &values,
        )?;
        // cumulative mean square along the line
        let mut acc = 0.0;
        let mut curve = Vec::with_capacity(n + 1);
        curve.push((1.0, 0.0));
        for k in 1..=n {
            acc += 0.5
                * LINE_STEP
                * (values[k - 1].norm_sqr() + values[k].norm_sqr());
            curve.push((1.0 + k as f64 * LINE_STEP, acc));
        }
        let at = |t: f64| {
            let i = ((t - 1.0) / LINE_STEP).round() as usize;
            curve[i.min(curve.len() - 1)].1
        };
        let checkpoints = [50.0, 100.0, 200.0, 400.0f64];
        let pts: Vec<(f64, f64)> = checkpoints
            .iter()
            .filter(|&&t| t <= cfg.i_sigma_tmax)
            .map(|&t| (t.ln(), at(t).max(1e-300).ln()))
            .collect();
        let slope = slope_of(&pts);
        slope_csv.push_str(&format!(
            "{sigma:?},{:?},{:?},{:?},{:?},{slope:?}\n",
            at(50.0),
            at(100.0),
            at(200.0),
            at(400.0)
        ));
        if (sigma - 0.75).abs() < 1e-12 {
            slope_checks.push(CheckRecord::flag(
                stage,
                "i_sigma_slope_0.75",
                slope,
                1.15,
                (0.1..=2.2).contains(&slope),
                "log-log slope across T = 50..400; window [0.1; 2.2]",
            ));
        }
    }
    let slope_path = cfg.out_dir.join("i_sigma_slopes.csv");
    std::fs::write(&slope_path, slope_csv).with_context(|| slope_path.display().to_string())?;
    checks.extend(slope_checks);

    write_identity_csv(&cfg.out_dir.join("identity_checks.csv"), &checks)?;
    println!(
        "mellin: {} checks, lines for sigma in {:?}, X = {x_upper:?}",
        checks.len(),
        cfg.sigmas
    );
    Ok(checks)
}

fn slope_of(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    num / den
}

fn write_line_csv(
    path: &Path,
    z2c: &Z2Continuation,
    sigma: f64,
    values: &[Complex],
) -> Result<()> {
    let base = z2c.trunc_base(sigma);
    let mut out = String::from("sigma,t,re,im,trunc_err\n");
    for (k, v) in values.iter().enumerate() {
        let t = 1.0 + k as f64 * LINE_STEP;
        let trunc = (sigma * sigma + t * t).sqrt() * base;
        out.push_str(&format!("{sigma:?},{t:?},{:?},{:?},{trunc:?}\n", v.re, v.im));
    }
    std::fs::write(path, out).with_context(|| path.display().to_string())
}

/// Rebuild the moment table from the artifacts written by the moments stage.
fn load_moments_artifacts(cfg: &ExperimentConfig) -> Result<MomentTable> {
    let coeffs_path = cfg.out_dir.join("p4_coeffs.csv");
    let table_path = cfg.out_dir.join("moments.csv");
    let mut missing = Vec::new();
    for p in [&coeffs_path, &table_path] {
        if !p.exists() {
            missing.push(p.display().to_string());
        }
    }
    if !missing.is_empty() {
        bail!(
            "missing moments artifacts: {} (run `zetalab moments` first)",
            missing.join(", ")
        );
    }
    let coeffs_text =
        std::fs::read_to_string(&coeffs_path).with_context(|| coeffs_path.display().to_string())?;
    let mut a = [0.0f64; 5];
    let mut tags = [Provenance::Fitted; 5];
    for line in coeffs_text.lines().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            bail!("{}: malformed row {line:?}", coeffs_path.display());
        }
        let j: usize = fields[0].parse().context("coefficient index")?;
        if j > 4 {
            bail!("{}: coefficient index {j} out of range", coeffs_path.display());
        }
        a[j] = fields[1].parse().context("coefficient value")?;
        tags[j] = match fields[2] {
            "pinned" => Provenance::Pinned,
            "fitted" => Provenance::Fitted,
            "loaded" => Provenance::Loaded,
            other => bail!("{}: unknown tag {other:?}", coeffs_path.display()),
        };
    }
    let table_text =
        std::fs::read_to_string(&table_path).with_context(|| table_path.display().to_string())?;
    let mut i4 = Vec::new();
    let mut ts = Vec::new();
    for (idx, line) in table_text.lines().enumerate() {
        if idx == 0 {
            if line != "T,fourth_moment,E2" {
                bail!("{}: unexpected header {line:?}", table_path.display());
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            bail!("{}:{}: malformed row", table_path.display(), idx + 1);
        }
        ts.push(fields[0].parse::<f64>().context("T column")?);
        i4.push(fields[1].parse::<f64>().context("fourth_moment column")?);
    }
    if ts.len() < 3 {
        bail!("{}: too few rows", table_path.display());
    }
    let step = ts[1] - ts[0];
    let grid = MomentGrid {
        step,
        i4,
        quad_err: 0.0,
    };
    Ok(MomentTable::new(grid, P4Coefficients { a, tags }))
}
