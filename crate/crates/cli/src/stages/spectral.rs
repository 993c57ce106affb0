//! `spectral`: saddle-point diagnostics (always), and the Hecke-series scans
//! when a spectral dataset is supplied; data-dependent checks are skipped
//! with a reason otherwise.

use crate::config::ExperimentConfig;
use crate::report::CheckRecord;
use anyhow::{Context, Result};
use zetalab::spectral::{
    load_spectral, saddle_df, saddle_f, saddle_z0, saddle_z0_offset, weight, SpectralDataset,
};

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<CheckRecord>> {
    let stage = "spectral";
    let mut checks = Vec::new();

    // --- saddle diagnostics (data-free) ------------------------------------
    let (z, r, t) = (10.0, 10.0, 1e4);
    let h = 1e-5;
    let fd = (saddle_f(z + h, r, t)? - saddle_f(z - h, r, t)?) / (2.0 * h);
    checks.push(CheckRecord::compare(
        stage,
        "saddle_derivative_fd",
        saddle_df(z, r, t)?,
        fd,
        1e-6,
        "analytic derivative vs central difference",
    ));

    let mut worst_residual: f64 = 0.0;
    for (r, t) in [(10.0, 1e4), (10.0, 1e6), (50.0, 1e5), (3.0, 100.0)] {
        let z0 = saddle_z0(r, t)?;
        let res = saddle_df(z0, r, t)?.abs() / (r / z0).max(1.0);
        worst_residual = worst_residual.max(res);
    }
    checks.push(CheckRecord::compare(
        stage,
        "saddle_root_residual",
        worst_residual,
        0.0,
        1e-10,
        "|F'(z0)| relative to the r/z0 scale",
    ));

    let z0 = saddle_z0(10.0, 1e6)?;
    checks.push(CheckRecord::compare(
        stage,
        "saddle_expansion_point",
        z0 / 10.0,
        1.0 + 5e-6,
        1e-10,
        "two-term offset expansion at r = 10; T = 1e6",
    ));

    // remainder of the two-term expansion across three decades
    let r = 10.0;
    let mut pts = Vec::new();
    for t in [1e4, 1e5, 1e6] {
        let rho: f64 = r / t;
        let d = saddle_z0_offset(r, t)?;
        let rem = (d / r - (0.5 * rho + 0.125 * rho * rho)).abs();
        pts.push((rho.ln(), rem.max(1e-300).ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<f64>();
    checks.push(CheckRecord::compare(
        stage,
        "saddle_remainder_slope",
        slope,
        3.0,
        0.3,
        "log-log slope of the expansion remainder in r/T",
    ));

    // composite derivative of F along the moving saddle, finite differences
    let (r, t) = (50.0, 1e5);
    let ht = t * 1e-4;
    let df_dt = (saddle_f(saddle_z0(r, t + ht)?, r, t + ht)?
        - saddle_f(saddle_z0(r, t - ht)?, r, t - ht)?)
        / (2.0 * ht);
    checks.push(CheckRecord::flag(
        stage,
        "saddle_df_dt_positive",
        df_dt,
        (r / t).powi(2),
        df_dt > 0.0,
        "sign of dF(z0(T))/dT at (50; 1e5); rhs is the r^2/T^2 scale",
    ));

    // --- data-dependent scans ----------------------------------------------
    match &cfg.spectral_data {
        None => {
            for name in [
                "spectral_unit_window_scan",
                "spectral_sup_scan",
                "spectral_triangle",
                "spectral_phase_realness",
                "spectral_e2_sum",
                "spectral_i_tt_majorant",
                "spectral_i_tt_asymptotic_band",
            ] {
                checks.push(CheckRecord::skip(stage, name, "no spectral dataset supplied"));
            }
            write_scan_csv(cfg, &[])?;
        }
        Some(path) => {
            let ds = load_spectral(path)?;
            checks.extend(data_checks(cfg, &ds)?);
        }
    }
    println!("spectral: {} checks", checks.len());
    Ok(checks)
}

fn data_checks(cfg: &ExperimentConfig, ds: &SpectralDataset) -> Result<Vec<CheckRecord>> {
    let stage = "spectral";
    let mut checks = Vec::new();
    let (lo, hi) = ds.coverage()?;

    // unit-window boundedness statistic: max over K of the window sum / K^1.01
    let mut k = (lo + 1.0).ceil();
    let mut stat: f64 = 0.0;
    let mut any = false;
    while k + 1.0 <= hi {
        stat = stat.max(ds.sum_window(k, 1.0)? / k.powf(1.01));
        any = true;
        k += 1.0;
    }
    if any {
        checks.push(CheckRecord::info(
            stage,
            "spectral_unit_window_scan",
            stat,
            "max over K of window sum / K^1.01",
        ));
    } else {
        checks.push(CheckRecord::skip(
            stage,
            "spectral_unit_window_scan",
            "coverage narrower than a unit window",
        ));
    }

    // sup scan; skipped with reason if coverage cannot host the K-grid
    match ds.conj3_sup_scan(cfg.scan_t, cfg.scan_delta, cfg.scan_c) {
        Ok(scan) => {
            checks.push(CheckRecord::info(
                stage,
                "spectral_sup_scan",
                scan.sup / cfg.scan_t.sqrt(),
                "sup over the K-grid divided by sqrt(T)",
            ));
            write_scan_rows(cfg, &scan.rows)?;
        }
        Err(e) => {
            checks.push(CheckRecord::skip(
                stage,
                "spectral_sup_scan",
                &format!("{e}"),
            ));
            write_scan_csv(cfg, &[])?;
        }
    }

    // triangle inequality and realness of weights at a representative window
    let k_mid = 0.5 * (lo + hi);
    if k_mid - 1.0 >= lo && k_mid + 1.0 <= hi {
        let tau = cfg.scan_c * cfg.scan_t;
        let sum = ds.conj3_sum(k_mid, tau)?;
        let cap = ds.sum_window(k_mid, 1.0)?;
        checks.push(CheckRecord::flag(
            stage,
            "spectral_triangle",
            sum.norm(),
            cap,
            sum.norm() <= cap + 1e-12,
            "|exponential sum| vs window weight sum",
        ));
        // conjugating every phase conjugates the sum (weights are real)
        let manual: zetalab::Complex = ds
            .window(k_mid - 1.0, k_mid + 1.0)?
            .iter()
            .map(|rec| {
                let phase = -(rec.kappa * (rec.kappa / tau).ln());
                weight(rec) * zetalab::Complex::new(phase.cos(), phase.sin())
            })
            .sum();
        checks.push(CheckRecord::compare(
            stage,
            "spectral_phase_realness",
            (manual - sum.conj()).norm(),
            0.0,
            1e-12 * sum.norm().max(1e-12),
            "conjugated phases give the conjugate sum",
        ));
    } else {
        checks.push(CheckRecord::skip(stage, "spectral_triangle", "coverage too narrow"));
        checks.push(CheckRecord::skip(
            stage,
            "spectral_phase_realness",
            "coverage too narrow",
        ));
    }

    // error-term spectral sum at the configured point
    let sum = ds.e2_spectral_sum(cfg.scan_t, cfg.scan_t.sqrt(), cfg.scan_t, hi)?;
    checks.push(CheckRecord::info(
        stage,
        "spectral_e2_sum",
        sum.norm(),
        "modulus at T = scan_t; Delta = sqrt(T); tau = T",
    ));

    // windowed I(T, t) against its majorant and the Stirling-reduced form
    let t_mid = k_mid;
    let window = (0.2 * (hi - lo)).min(2.0);
    if t_mid - window >= lo && t_mid + window <= hi {
        let v = ds.i_tt(cfg.scan_t, t_mid, window)?;
        let cap = ds.i_tt_majorant(t_mid, window)?;
        checks.push(CheckRecord::flag(
            stage,
            "spectral_i_tt_majorant",
            v.norm(),
            cap,
            v.norm() <= cap + 1e-12,
            "triangle inequality for the windowed sum",
        ));
        let asym = ds.i_tt_asymptotic(cfg.scan_t, t_mid, window)?;
        checks.push(CheckRecord::info(
            stage,
            "spectral_i_tt_asymptotic_band",
            (v - asym).norm(),
            "gamma-factor form minus Stirling-reduced form",
        ));
    } else {
        checks.push(CheckRecord::skip(
            stage,
            "spectral_i_tt_majorant",
            "coverage too narrow",
        ));
        checks.push(CheckRecord::skip(
            stage,
            "spectral_i_tt_asymptotic_band",
            "coverage too narrow",
        ));
    }
    Ok(checks)
}

fn write_scan_rows(cfg: &ExperimentConfig, rows: &[zetalab::spectral::ScanRow]) -> Result<()> {
    let mut out = String::from("K,tau,re,im,abs\n");
    for row in rows {
        out.push_str(&format!(
            "{:?},{:?},{:?},{:?},{:?}\n",
            row.k,
            row.tau,
            row.value.re,
            row.value.im,
            row.value.norm()
        ));
    }
    let path = cfg.out_dir.join("spectral_scans.csv");
    std::fs::write(&path, out).with_context(|| path.display().to_string())
}

fn write_scan_csv(cfg: &ExperimentConfig, rows: &[zetalab::spectral::ScanRow]) -> Result<()> {
    write_scan_rows(cfg, rows)
}
