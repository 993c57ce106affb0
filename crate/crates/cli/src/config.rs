//! Flat key=value experiment configuration, overridable by command-line
//! flags; flags win. The resolved config is echoed into the run report so
//! every run is reproducible from its artifacts.

use anyhow::{bail, Context, Result};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub cache_path: PathBuf,
    pub spectral_data: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub workers: usize,
    /// Sample stage range and step.
    pub t0: f64,
    pub t1: f64,
    pub step: f64,
    /// Vertical lines exported by the mellin stage.
    pub sigmas: Vec<f64>,
    /// Truncation height X of the direct transforms.
    pub x_trunc: f64,
    /// Truncation of vertical-line integrals.
    pub tmax: f64,
    /// Moment table grid.
    pub table_step: f64,
    pub table_max: f64,
    /// Main-term fit window.
    pub fit_lo: f64,
    pub fit_hi: f64,
    /// Mean-square line integral upper end (also the line export range).
    pub i_sigma_tmax: f64,
    /// Contour reconstruction point.
    pub e2_contour_t: f64,
    /// Property-sweep size for the mean-square inequality.
    pub lemma4_cases: usize,
    /// Spectral sup-scan parameters.
    pub scan_t: f64,
    pub scan_delta: f64,
    pub scan_c: f64,
    /// Tolerance overrides.
    pub tol_inversion: f64,
    pub tol_convolution: f64,
    pub tol_parseval: f64,
    pub tol_parseval_e2: f64,
    pub lemma4_slack: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            cache_path: PathBuf::from("out/samples.zcache"),
            spectral_data: None,
            out_dir: PathBuf::from("out"),
            workers: 1,
            t0: 0.0,
            t1: 1200.0,
            step: 1.0 / 64.0,
            sigmas: vec![0.6, 0.75, 0.9],
            x_trunc: 1000.0,
            tmax: 1000.0,
            table_step: 0.125,
            table_max: 1200.0,
            fit_lo: 100.0,
            fit_hi: f64::INFINITY,
            i_sigma_tmax: 400.0,
            e2_contour_t: 500.0,
            lemma4_cases: 50,
            scan_t: 500.0,
            scan_delta: 0.2,
            scan_c: 1.0,
            tol_inversion: 1e-3,
            tol_convolution: 1e-4,
            tol_parseval: 1e-4,
            tol_parseval_e2: 0.02,
            lemma4_slack: 1e-6,
        }
    }
}

impl ExperimentConfig {
    /// Load from a key=value file ('#' comments, blank lines allowed).
    /// Unknown keys are rejected by name.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("config file {}", path.display()))?;
        let mut cfg = ExperimentConfig::default();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!(
                    "{}:{}: expected key=value, got {:?}",
                    path.display(),
                    idx + 1,
                    line
                );
            };
            cfg.set(key.trim(), value.trim())
                .with_context(|| format!("{}:{}", path.display(), idx + 1))?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let f = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .with_context(|| format!("cannot parse {v:?} as a number"))
        };
        match key {
            "cache" => self.cache_path = PathBuf::from(value),
            "spectral_data" => self.spectral_data = Some(PathBuf::from(value)),
            "out" => self.out_dir = PathBuf::from(value),
            "workers" => self.workers = value.parse().context("workers")?,
            "t0" => self.t0 = f(value)?,
            "t1" => self.t1 = f(value)?,
            "step" => self.step = f(value)?,
            "sigma" => {
                self.sigmas = value
                    .split(',')
                    .map(|v| f(v.trim()))
                    .collect::<Result<Vec<_>>>()?;
            }
            "x" => self.x_trunc = f(value)?,
            "tmax" => self.tmax = f(value)?,
            "table_step" => self.table_step = f(value)?,
            "table_max" => self.table_max = f(value)?,
            "fit_lo" => self.fit_lo = f(value)?,
            "fit_hi" => self.fit_hi = f(value)?,
            "i_sigma_tmax" => self.i_sigma_tmax = f(value)?,
            "e2_contour_t" => self.e2_contour_t = f(value)?,
            "lemma4_cases" => self.lemma4_cases = value.parse().context("lemma4_cases")?,
            "scan_t" => self.scan_t = f(value)?,
            "scan_delta" => self.scan_delta = f(value)?,
            "scan_c" => self.scan_c = f(value)?,
            "tol_inversion" => self.tol_inversion = f(value)?,
            "tol_convolution" => self.tol_convolution = f(value)?,
            "tol_parseval" => self.tol_parseval = f(value)?,
            "tol_parseval_e2" => self.tol_parseval_e2 = f(value)?,
            "lemma4_slack" => self.lemma4_slack = f(value)?,
            other => bail!("unknown config key {other:?}"),
        }
        Ok(())
    }

    /// Validate ranges and paths before any compute.
    pub fn validate(&self) -> Result<()> {
        if !(self.t0 < self.t1) {
            bail!("sample range empty: t0 = {} >= t1 = {}", self.t0, self.t1);
        }
        if !(self.step > 0.0 && self.table_step > 0.0) {
            bail!("steps must be positive");
        }
        if self.sigmas.is_empty() {
            bail!("sigma list is empty");
        }
        if let Some(p) = &self.spectral_data {
            if !p.exists() {
                bail!("spectral data file {} does not exist", p.display());
            }
        }
        Ok(())
    }

    pub fn fit_window(&self) -> (f64, f64) {
        (self.fit_lo, self.fit_hi.min(self.table_max))
    }

    /// Canonical echo, one key per line (also valid config-file syntax).
    pub fn echo(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("cache = {}\n", self.cache_path.display()));
        match &self.spectral_data {
            Some(p) => s.push_str(&format!("spectral_data = {}\n", p.display())),
            None => s.push_str("# spectral_data unset\n"),
        }
        s.push_str(&format!("out = {}\n", self.out_dir.display()));
        s.push_str(&format!("workers = {}\n", self.workers));
        s.push_str(&format!("t0 = {:?}\n", self.t0));
        s.push_str(&format!("t1 = {:?}\n", self.t1));
        s.push_str(&format!("step = {:?}\n", self.step));
        let sig: Vec<String> = self.sigmas.iter().map(|v| format!("{v:?}")).collect();
        s.push_str(&format!("sigma = {}\n", sig.join(",")));
        s.push_str(&format!("x = {:?}\n", self.x_trunc));
        s.push_str(&format!("tmax = {:?}\n", self.tmax));
        s.push_str(&format!("table_step = {:?}\n", self.table_step));
        s.push_str(&format!("table_max = {:?}\n", self.table_max));
        s.push_str(&format!("fit_lo = {:?}\n", self.fit_lo));
        s.push_str(&format!("fit_hi = {:?}\n", self.fit_hi));
        s.push_str(&format!("i_sigma_tmax = {:?}\n", self.i_sigma_tmax));
        s.push_str(&format!("e2_contour_t = {:?}\n", self.e2_contour_t));
        s.push_str(&format!("lemma4_cases = {}\n", self.lemma4_cases));
        s.push_str(&format!("scan_t = {:?}\n", self.scan_t));
        s.push_str(&format!("scan_delta = {:?}\n", self.scan_delta));
        s.push_str(&format!("scan_c = {:?}\n", self.scan_c));
        s.push_str(&format!("tol_inversion = {:?}\n", self.tol_inversion));
        s.push_str(&format!("tol_convolution = {:?}\n", self.tol_convolution));
        s.push_str(&format!("tol_parseval = {:?}\n", self.tol_parseval));
        s.push_str(&format!("tol_parseval_e2 = {:?}\n", self.tol_parseval_e2));
        s.push_str(&format!("lemma4_slack = {:?}\n", self.lemma4_slack));
        s
    }
}
