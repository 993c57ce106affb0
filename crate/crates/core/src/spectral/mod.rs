//! Maass-form spectral data and every Hecke-series sum the laboratory
//! evaluates over it: windowed weight sums, exponentially twisted sums and
//! their sup-scans, the error-term spectral sum, and the windowed I(T,t)
//! sums with their Stirling-reduced asymptotic form.
//!
//! Real spectral tables (kappa_j, alpha_j, H_j(1/2), parity) must be supplied
//! by the user from published sources; the repository ships only the CSV
//! schema and a clearly synthetic fixture.

mod saddle;

pub use saddle::{saddle_df, saddle_f, saddle_z0, saddle_z0_offset};

use crate::numerics::{r1, smooth_bump, Bump, BumpSpec};
use crate::quad::GL16;
use crate::{Complex, Error, Result};
use std::path::{Path, PathBuf};

/// One Maass-form entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralRecord {
    /// Spectral parameter kappa_j > 0.
    pub kappa: f64,
    /// Normalization weight alpha_j = |rho_j(1)|^2 / cosh(pi kappa_j) > 0.
    pub alpha: f64,
    /// Central Hecke-series value H_j(1/2) >= 0.
    pub h_half: f64,
    /// Reflection parity, +1 or -1.
    pub parity: i8,
}

/// The recurring summand alpha_j H_j(1/2)^3; nonnegative.
pub fn weight(rec: &SpectralRecord) -> f64 {
    rec.alpha * rec.h_half * rec.h_half * rec.h_half
}

/// Validated, kappa-sorted spectral dataset.
#[derive(Debug, Clone)]
pub struct SpectralDataset {
    records: Vec<SpectralRecord>,
    source: Option<PathBuf>,
    checksum: u64,
}

impl SpectralDataset {
    /// Build from in-memory records (used by tests and the synthetic fixture);
    /// enforces the same invariants as the file loader.
    pub fn from_records(records: Vec<SpectralRecord>) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            validate_record(r, None, i + 1)?;
        }
        for w in records.windows(2) {
            if w[1].kappa <= w[0].kappa {
                return Err(Error::SpectralData {
                    path: PathBuf::from("<memory>"),
                    row: 0,
                    what: format!("kappa not strictly increasing at {}", w[1].kappa),
                });
            }
        }
        Ok(SpectralDataset {
            records,
            source: None,
            checksum: 0,
        })
    }

    pub fn records(&self) -> &[SpectralRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn checksum(&self) -> u64 {
        self.checksum
    }

    pub fn source(&self) -> Option<&Path> {
        self.source.as_deref()
    }

    /// Coverage interval [kappa_min, kappa_max]; errors on an empty dataset.
    pub fn coverage(&self) -> Result<(f64, f64)> {
        match (self.records.first(), self.records.last()) {
            (Some(a), Some(b)) => Ok((a.kappa, b.kappa)),
            _ => Err(Error::SpectralEmpty),
        }
    }

    /// Records with kappa in the closed window [lo, hi]; the window must lie
    /// inside coverage (queries outside error rather than silently truncate).
    pub fn window(&self, lo: f64, hi: f64) -> Result<&[SpectralRecord]> {
        let (cov_lo, cov_hi) = self.coverage()?;
        if lo < cov_lo || hi > cov_hi {
            return Err(Error::SpectralCoverage {
                lo,
                hi,
                cov_lo,
                cov_hi,
            });
        }
        let start = self.records.partition_point(|r| r.kappa < lo);
        let end = self.records.partition_point(|r| r.kappa <= hi);
        Ok(&self.records[start..end])
    }

    /// Sum of alpha_j H_j(1/2)^3 over kappa_j in [K - G, K + G].
    pub fn sum_window(&self, k: f64, g: f64) -> Result<f64> {
        Ok(self.window(k - g, k + g)?.iter().map(weight).sum())
    }

    /// The unit-window exponential sum
    /// sum_{K-1 <= kappa_j <= K+1} alpha_j H_j^3(1/2) exp(i kappa_j log(kappa_j / tau)).
    pub fn conj3_sum(&self, k: f64, tau: f64) -> Result<Complex> {
        if !(tau > 0.0) {
            return Err(Error::Domain {
                op: "conj3_sum",
                name: "tau",
                value: tau,
                constraint: "tau > 0",
            });
        }
        let mut acc = Complex::new(0.0, 0.0);
        for r in self.window(k - 1.0, k + 1.0)? {
            let phase = r.kappa * (r.kappa / tau).ln();
            acc += weight(r) * Complex::new(phase.cos(), phase.sin());
        }
        Ok(acc)
    }

    /// Scan |conj3_sum(K, C*T)| over a unit-step K-grid covering
    /// [T^(1-delta), T^(1+delta)]; returns the argmax, the sup, and the rows.
    pub fn conj3_sup_scan(&self, t: f64, delta: f64, c: f64) -> Result<SupScan> {
        let k_lo = t.powf(1.0 - delta);
        let k_hi = t.powf(1.0 + delta);
        let tau = c * t;
        let mut rows = Vec::new();
        let mut best = (f64::NAN, f64::NEG_INFINITY);
        let mut k = k_lo.ceil();
        while k <= k_hi {
            let v = self.conj3_sum(k, tau)?;
            let a = v.norm();
            rows.push(ScanRow {
                k,
                tau,
                value: v,
            });
            if a > best.1 {
                best = (k, a);
            }
            k += 1.0;
        }
        if rows.is_empty() {
            return Err(Error::Domain {
                op: "conj3_sup_scan",
                name: "T",
                value: t,
                constraint: "unit K-grid nonempty in [T^(1-delta), T^(1+delta)]",
            });
        }
        Ok(SupScan {
            k_star: best.0,
            sup: best.1,
            rows,
        })
    }

    /// The error-term spectral sum over kappa_j <= Kmax:
    /// alpha_j H_j^3 kappa_j^{-3/2} exp(i kappa_j log(kappa_j/tau) - (Delta kappa_j / T)^2).
    ///
    /// The regime of interest has sqrt(T) <= Delta <= T^(2/3) log^c T; values
    /// outside it are still computed (exploratory), no enforcement.
    pub fn e2_spectral_sum(&self, t: f64, delta: f64, tau: f64, kmax: f64) -> Result<Complex> {
        let (cov_lo, cov_hi) = self.coverage()?;
        if kmax > cov_hi {
            return Err(Error::SpectralCoverage {
                lo: cov_lo,
                hi: kmax,
                cov_lo,
                cov_hi,
            });
        }
        let mut acc = Complex::new(0.0, 0.0);
        for r in &self.records {
            if r.kappa > kmax {
                break;
            }
            let phase = r.kappa * (r.kappa / tau).ln();
            let damp = (delta * r.kappa / t).powi(2);
            let amp = weight(r) * r.kappa.powf(-1.5) * (-damp).exp();
            acc += amp * Complex::new(phase.cos(), phase.sin());
        }
        Ok(acc)
    }

    /// The windowed sum I(T, t) over |kappa_j - t| <= eps_window:
    /// weight * R1(-kappa_j) / (1/2 - i kappa_j) * ∫ Phi(x) (Tx)^{i(t - kappa_j)} dx,
    /// with the x-integral over the bump support [1/2, 5/2].
    pub fn i_tt(&self, t_big: f64, t: f64, eps_window: f64) -> Result<Complex> {
        let phi = phi_bump();
        let mut acc = Complex::new(0.0, 0.0);
        for r in self.window(t - eps_window, t + eps_window)? {
            let mu = t - r.kappa;
            let x_int = phi_oscillatory_integral(&phi, t_big, mu);
            let denom = Complex::new(0.5, -r.kappa);
            acc += weight(r) * r1(-r.kappa)? / denom * x_int;
        }
        Ok(acc)
    }

    /// Stirling-reduced form of [`Self::i_tt`]: prefactor pi (2t)^{-3/2} and
    /// phase exp(i kappa_j log(kappa_j / 4e)) replacing the gamma-factor
    /// product; agreement is recorded, not asserted.
    pub fn i_tt_asymptotic(&self, t_big: f64, t: f64, eps_window: f64) -> Result<Complex> {
        let phi = phi_bump();
        let prefactor = std::f64::consts::PI * (2.0 * t).powf(-1.5);
        let four_e = 4.0 * std::f64::consts::E;
        let mut acc = Complex::new(0.0, 0.0);
        for r in self.window(t - eps_window, t + eps_window)? {
            let mu = t - r.kappa;
            let x_int = phi_oscillatory_integral(&phi, t_big, mu);
            let phase = r.kappa * (r.kappa / four_e).ln();
            acc += weight(r) * Complex::new(phase.cos(), phase.sin()) * x_int;
        }
        Ok(prefactor * acc)
    }

    /// Triangle-inequality majorant of |i_tt|, used as a cross-check.
    pub fn i_tt_majorant(&self, t: f64, eps_window: f64) -> Result<f64> {
        let phi = phi_bump();
        let phi_mass = GL16.integrate(0.5, 2.5, |x| phi.eval(x));
        let mut acc = 0.0;
        for r in self.window(t - eps_window, t + eps_window)? {
            let denom = Complex::new(0.5, -r.kappa).norm();
            acc += weight(r) * r1(-r.kappa)?.norm() / denom * phi_mass;
        }
        Ok(acc)
    }
}

/// Result of a sup-scan over the K-grid.
#[derive(Debug, Clone)]
pub struct SupScan {
    pub k_star: f64,
    pub sup: f64,
    pub rows: Vec<ScanRow>,
}

/// One scan row for the `K,tau,re,im,abs` export.
#[derive(Debug, Clone, Copy)]
pub struct ScanRow {
    pub k: f64,
    pub tau: f64,
    pub value: Complex,
}

/// The smooth weight Phi on [1/2, 5/2]. Its plateau is taken as [1, 2]: the
/// qualitative description pins only the support and that Phi equals one on an
/// interior interval, so the symmetric unit plateau is used and documented.
pub fn phi_bump() -> Bump {
    smooth_bump(BumpSpec::new(0.5, 1.0, 2.0, 2.5)).expect("static knots are valid")
}

/// ∫ Phi(x) (Tx)^{i mu} dx over the support of Phi, by Gauss–Legendre panels;
/// mu stays window-small so the integrand is mildly oscillatory.
fn phi_oscillatory_integral(phi: &Bump, t_big: f64, mu: f64) -> Complex {
    let log_t = t_big.ln();
    let n_panels = (4.0 + mu.abs()).ceil() as usize;
    let h = 2.0 / n_panels as f64;
    let mut acc = Complex::new(0.0, 0.0);
    for p in 0..n_panels {
        let a = 0.5 + p as f64 * h;
        acc += GL16.integrate_complex(a, a + h, |x| {
            let phase = mu * (log_t + x.ln());
            phi.eval(x) * Complex::new(phase.cos(), phase.sin())
        });
    }
    acc
}

fn validate_record(r: &SpectralRecord, path: Option<&Path>, row: usize) -> Result<()> {
    let fail = |what: String| Error::SpectralData {
        path: path.unwrap_or(Path::new("<memory>")).to_path_buf(),
        row,
        what,
    };
    if !(r.kappa > 0.0) {
        return Err(fail(format!("kappa = {} must be > 0", r.kappa)));
    }
    if !(r.alpha > 0.0) {
        return Err(fail(format!("alpha = {} must be > 0", r.alpha)));
    }
    if !(r.h_half >= 0.0) {
        return Err(fail(format!("h_half = {} must be >= 0", r.h_half)));
    }
    if r.parity != 1 && r.parity != -1 {
        return Err(fail(format!("parity = {} must be +1 or -1", r.parity)));
    }
    Ok(())
}

/// Load and validate a spectral CSV with header `kappa,alpha,h_half,parity`.
/// Rows must be strictly increasing in kappa; violations carry row numbers.
pub fn load_spectral(path: impl AsRef<Path>) -> Result<SpectralDataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let checksum = fnv1a(text.as_bytes());
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "kappa,alpha,h_half,parity" => {}
        other => {
            return Err(Error::SpectralData {
                path: path.to_path_buf(),
                row: 1,
                what: format!(
                    "expected header 'kappa,alpha,h_half,parity', got {:?}",
                    other.map(|(_, l)| l).unwrap_or("")
                ),
            });
        }
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        let row = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::SpectralData {
                path: path.to_path_buf(),
                row,
                what: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        let parse = |s: &str, name: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| Error::SpectralData {
                path: path.to_path_buf(),
                row,
                what: format!("cannot parse {name} from {s:?}"),
            })
        };
        let rec = SpectralRecord {
            kappa: parse(fields[0], "kappa")?,
            alpha: parse(fields[1], "alpha")?,
            h_half: parse(fields[2], "h_half")?,
            parity: parse(fields[3], "parity")? as i8,
        };
        validate_record(&rec, Some(path), row)?;
        if let Some(last) = records.last() {
            let last: &SpectralRecord = last;
            if rec.kappa <= last.kappa {
                return Err(Error::SpectralData {
                    path: path.to_path_buf(),
                    row,
                    what: format!(
                        "kappa = {} not strictly increasing (previous {})",
                        rec.kappa, last.kappa
                    ),
                });
            }
        }
        records.push(rec);
    }
    Ok(SpectralDataset {
        records,
        source: Some(path.to_path_buf()),
        checksum,
    })
}

/// Write a dataset back in the schema accepted by [`load_spectral`].
pub fn save_spectral(ds: &SpectralDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("kappa,alpha,h_half,parity\n");
    for r in &ds.records {
        out.push_str(&format!("{},{},{},{}\n", r.kappa, r.alpha, r.h_half, r.parity));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}
