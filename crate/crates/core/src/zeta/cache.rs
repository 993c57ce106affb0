//! File-backed cache of critical-line samples on a fixed 1/1024 grid.
//!
//! Binary format: magic `ZCACHE1\0`, then little-endian records of
//! (u64 quantized t, f64 z, u8 method) sorted by key. Grids with coarser
//! dyadic steps always land on cache keys, so reruns are pure hits.

use super::{z_hardy, z_hardy_rs};
use crate::{Error, Result};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

/// Fixed quantization step of the sample grid.
pub const CACHE_QUANTUM: f64 = 1.0 / 1024.0;

const MAGIC: [u8; 8] = *b"ZCACHE1\0";
const RECORD: usize = 8 + 8 + 1;

/// Which evaluator produced a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMethod {
    RiemannSiegel = 0,
    EulerMaclaurin = 1,
}

impl EvalMethod {
    fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(EvalMethod::RiemannSiegel),
            1 => Some(EvalMethod::EulerMaclaurin),
            _ => None,
        }
    }
}

/// One cached pair (t, Z(t)) with its evaluator tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalSample {
    pub t: f64,
    pub z: f64,
    pub method: EvalMethod,
}

/// Ordered map from quantized t to sample, optionally bound to a file.
#[derive(Debug, Default)]
pub struct SampleCache {
    map: BTreeMap<u64, (f64, EvalMethod)>,
    path: Option<PathBuf>,
}

/// Result of one [`sample_line`] call.
#[derive(Debug)]
pub struct SampleRun {
    pub samples: Vec<CriticalSample>,
    pub hits: usize,
    pub misses: usize,
}

pub(crate) fn quantize(t: f64) -> u64 {
    (t / CACHE_QUANTUM).round() as u64
}

pub(crate) fn dequantize(key: u64) -> f64 {
    key as f64 * CACHE_QUANTUM
}

impl SampleCache {
    /// Empty cache with no backing file.
    pub fn in_memory() -> Self {
        SampleCache::default()
    }

    /// Open a file-backed cache, loading existing records if the file exists.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut cache = SampleCache {
            map: BTreeMap::new(),
            path: Some(path.clone()),
        };
        if !path.exists() {
            return Ok(cache);
        }
        let mut bytes = Vec::new();
        std::fs::File::open(&path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| Error::io(&path, e))?;
        if bytes.len() < MAGIC.len() || bytes[..MAGIC.len()] != MAGIC {
            return Err(Error::CacheFormat {
                path,
                what: "bad magic header".into(),
            });
        }
        let body = &bytes[MAGIC.len()..];
        if body.len() % RECORD != 0 {
            return Err(Error::CacheFormat {
                path,
                what: format!("truncated record block ({} bytes)", body.len()),
            });
        }
        let mut prev: Option<u64> = None;
        for chunk in body.chunks_exact(RECORD) {
            let key = u64::from_le_bytes(chunk[0..8].try_into().unwrap());
            let z = f64::from_le_bytes(chunk[8..16].try_into().unwrap());
            let method = EvalMethod::from_byte(chunk[16]).ok_or_else(|| Error::CacheFormat {
                path: path.clone(),
                what: format!("unknown method tag {}", chunk[16]),
            })?;
            if prev.is_some_and(|p| p >= key) {
                return Err(Error::CacheFormat {
                    path: path.clone(),
                    what: "keys not strictly increasing".into(),
                });
            }
            prev = Some(key);
            cache.map.insert(key, (z, method));
        }
        Ok(cache)
    }

    /// Atomically persist to the backing file (temp file + rename).
    pub fn save(&self) -> Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let mut bytes = Vec::with_capacity(MAGIC.len() + self.map.len() * RECORD);
        bytes.extend_from_slice(&MAGIC);
        for (&key, &(z, method)) in &self.map {
            bytes.extend_from_slice(&key.to_le_bytes());
            bytes.extend_from_slice(&z.to_le_bytes());
            bytes.push(method as u8);
        }
        let tmp = path.with_extension("tmp");
        std::fs::File::create(&tmp)
            .and_then(|mut f| f.write_all(&bytes).and_then(|_| f.sync_all()))
            .map_err(|e| Error::io(&tmp, e))?;
        std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, t: f64) -> Option<CriticalSample> {
        let key = quantize(t);
        self.map.get(&key).map(|&(z, method)| CriticalSample {
            t: dequantize(key),
            z,
            method,
        })
    }

    /// Iterate samples with t in [lo, hi].
    pub fn range(&self, lo: f64, hi: f64) -> impl Iterator<Item = CriticalSample> + '_ {
        self.map
            .range(quantize(lo)..=quantize(hi))
            .map(|(&key, &(z, method))| CriticalSample {
                t: dequantize(key),
                z,
                method,
            })
    }
}

/// Evaluate Z for one quantized key with the requested method. Below the
/// Riemann–Siegel domain (t < 2 pi) the reference evaluator fills in and the
/// sample is tagged accordingly.
fn evaluate(key: u64, method: EvalMethod) -> (f64, EvalMethod) {
    let t = dequantize(key);
    match method {
        EvalMethod::EulerMaclaurin => (z_hardy(t), EvalMethod::EulerMaclaurin),
        EvalMethod::RiemannSiegel => match z_hardy_rs(t) {
            Ok((z, _)) => (z, EvalMethod::RiemannSiegel),
            Err(_) => (z_hardy(t), EvalMethod::EulerMaclaurin),
        },
    }
}

/// Samples on the quantized grid over [t0, t1] with the given step, served
/// from cache where present, computed in parallel and inserted otherwise.
/// Output is independent of worker count.
pub fn sample_line(
    t0: f64,
    t1: f64,
    step: f64,
    cache: &mut SampleCache,
    method: EvalMethod,
) -> Result<SampleRun> {
    if !(t0 < t1) || !(t0 >= 0.0) {
        return Err(Error::Domain {
            op: "sample_line",
            name: "t0",
            value: t0,
            constraint: "0 <= t0 < t1",
        });
    }
    if !(step >= CACHE_QUANTUM) {
        return Err(Error::StepTooFine {
            step,
            quantum: CACHE_QUANTUM,
        });
    }
    let count = ((t1 - t0) / step + 1e-9).floor() as usize + 1;
    let keys: Vec<u64> = (0..count).map(|i| quantize(t0 + i as f64 * step)).collect();

    let missing: Vec<u64> = keys
        .iter()
        .copied()
        .filter(|k| !cache.map.contains_key(k))
        .collect();
    let hits = keys.len() - missing.len();
    let computed: Vec<(u64, (f64, EvalMethod))> = missing
        .par_iter()
        .map(|&k| (k, evaluate(k, method)))
        .collect();
    for (k, v) in computed {
        cache.map.insert(k, v);
    }

    let samples = keys
        .iter()
        .map(|k| {
            let &(z, m) = cache.map.get(k).expect("just inserted");
            CriticalSample {
                t: dequantize(*k),
                z,
                method: m,
            }
        })
        .collect();
    Ok(SampleRun {
        samples,
        hits,
        misses: missing.len(),
    })
}

/// Cubic-interpolating view over a complete uniform sub-grid of the cache.
///
/// Construction fails with the missing interval if any grid point is absent.
/// Interpolation error for Z on the default 1/64 grid is ~1e-7 relative,
/// which the quadrature layers fold into their error budgets.
#[derive(Debug, Clone)]
pub struct CacheInterp {
    t0: f64,
    step: f64,
    values: Vec<f64>,
}

impl CacheInterp {
    pub fn new(cache: &SampleCache, lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(step >= CACHE_QUANTUM) {
            return Err(Error::StepTooFine {
                step,
                quantum: CACHE_QUANTUM,
            });
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        let mut values = Vec::with_capacity(count);
        for i in 0..count {
            let t = lo + i as f64 * step;
            match cache.get(t) {
                Some(s) => values.push(s.z),
                None => {
                    // Report the whole missing span for a actionable error.
                    let mut j = i;
                    while j + 1 < count && cache.get(lo + (j + 1) as f64 * step).is_none() {
                        j += 1;
                    }
                    return Err(Error::CacheCoverage {
                        lo,
                        hi,
                        missing_lo: t,
                        missing_hi: lo + j as f64 * step,
                    });
                }
            }
        }
        Ok(CacheInterp {
            t0: lo,
            step,
            values,
        })
    }

    pub fn lo(&self) -> f64 {
        self.t0
    }

    pub fn hi(&self) -> f64 {
        self.t0 + self.step * (self.values.len() - 1) as f64
    }

    /// 4-point Lagrange interpolation of Z at x (clamped stencil at the ends).
    pub fn z(&self, x: f64) -> f64 {
        let n = self.values.len();
        let u = (x - self.t0) / self.step;
        let i = (u.floor() as isize).clamp(1, n as isize - 3) as usize;
        let f = u - i as f64; // in [0,1] away from the ends
        let vm1 = self.values[i - 1];
        let v0 = self.values[i];
        let v1 = self.values[i + 1];
        let v2 = self.values[i + 2];
        // Lagrange weights for nodes -1, 0, 1, 2 evaluated at f.
        let a = -f * (f - 1.0) * (f - 2.0) / 6.0;
        let b = (f * f - 1.0) * (f - 2.0) / 2.0;
        let c = -f * (f + 1.0) * (f - 2.0) / 2.0;
        let d = f * (f * f - 1.0) / 6.0;
        a * vm1 + b * v0 + c * v1 + d * v2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_arithmetic_and_idempotence() {
        let mut cache = SampleCache::in_memory();
        let run = sample_line(10.0, 20.0, 0.01, &mut cache, EvalMethod::EulerMaclaurin).unwrap();
        assert_eq!(run.samples.len(), 1001);
        assert_eq!(run.hits, 0);
        assert_eq!(run.misses, 1001);

        let rerun = sample_line(10.0, 20.0, 0.01, &mut cache, EvalMethod::EulerMaclaurin).unwrap();
        assert_eq!(rerun.hits, 1001);
        assert_eq!(rerun.misses, 0);
        assert_eq!(run.samples, rerun.samples);
    }

    #[test]
    fn spot_value_consistent_with_reference() {
        let mut cache = SampleCache::in_memory();
        sample_line(14.0, 14.5, 0.01, &mut cache, EvalMethod::EulerMaclaurin).unwrap();
        let s = cache.get(14.13).unwrap();
        // quantized abscissa, so compare against Z at the quantized point
        assert!((s.z - z_hardy(s.t)).abs() < 1e-12);
        assert!((s.t - 14.13).abs() <= CACHE_QUANTUM / 2.0);
    }

    #[test]
    fn rejects_sub_quantum_steps_and_bad_ranges() {
        let mut cache = SampleCache::in_memory();
        assert!(matches!(
            sample_line(1.0, 2.0, 1e-4, &mut cache, EvalMethod::EulerMaclaurin),
            Err(Error::StepTooFine { .. })
        ));
        assert!(sample_line(5.0, 2.0, 0.5, &mut cache, EvalMethod::EulerMaclaurin).is_err());
        assert!(sample_line(-1.0, 2.0, 0.5, &mut cache, EvalMethod::EulerMaclaurin).is_err());
    }

    #[test]
    fn file_round_trip_is_bit_exact() {
        let dir = std::env::temp_dir().join(format!("zcache_test_{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("roundtrip.zcache");
        let _ = std::fs::remove_file(&path);

        let mut cache = SampleCache::open(&path).unwrap();
        sample_line(30.0, 31.0, 1.0 / 64.0, &mut cache, EvalMethod::RiemannSiegel).unwrap();
        cache.save().unwrap();
        let bytes1 = std::fs::read(&path).unwrap();

        let reloaded = SampleCache::open(&path).unwrap();
        assert_eq!(reloaded.len(), cache.len());
        for (a, b) in cache.range(30.0, 31.0).zip(reloaded.range(30.0, 31.0)) {
            assert_eq!(a.z.to_bits(), b.z.to_bits());
            assert_eq!(a.method, b.method);
        }
        reloaded.save().unwrap();
        let bytes2 = std::fs::read(&path).unwrap();
        assert_eq!(bytes1, bytes2);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn interp_tracks_reference_between_nodes() {
        let mut cache = SampleCache::in_memory();
        sample_line(100.0, 102.0, 1.0 / 64.0, &mut cache, EvalMethod::EulerMaclaurin).unwrap();
        let interp = CacheInterp::new(&cache, 100.0, 102.0, 1.0 / 64.0).unwrap();
        for i in 0..40 {
            let x = 100.3 + i as f64 * 0.033;
            assert!(
                (interp.z(x) - z_hardy(x)).abs() < 1e-6,
                "x = {x}: {} vs {}",
                interp.z(x),
                z_hardy(x)
            );
        }
    }

    #[test]
    fn interp_reports_missing_interval() {
        let mut cache = SampleCache::in_memory();
        sample_line(10.0, 11.0, 1.0 / 64.0, &mut cache, EvalMethod::EulerMaclaurin).unwrap();
        let err = CacheInterp::new(&cache, 10.0, 12.0, 1.0 / 64.0).unwrap_err();
        match err {
            Error::CacheCoverage { missing_lo, .. } => assert!(missing_lo > 11.0),
            other => panic!("unexpected error {other}"),
        }
    }
}
