//! Complex special functions shared by every other module: the principal
//! log-gamma, the functional-equation factor chi(s), the Riemann–Siegel theta
//! function, smooth bump functions, and the gamma-factor products attached to
//! Maass-form residues.

mod bump;

pub use bump::{smooth_bump, Bump, BumpSpec};

use crate::{Complex, Error, Result};
use std::f64::consts::PI;

/// Stirling coefficients B_{2k} / (2k (2k-1)) for the log-gamma asymptotic
/// series, enough terms for ~1e-15 accuracy once Re z >= 10.
const STIRLING: [f64; 9] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
];

/// Real part threshold above which the Stirling series is applied directly.
const STIRLING_RE: f64 = 10.0;

const LN_2PI_HALF: f64 = 0.918938533204672741780329736406; // ln(2 pi) / 2

/// Principal-branch log-gamma for complex z.
///
/// Arguments left of Re z = 10 are shifted up by the recurrence
/// log Γ(z) = log Γ(z+n) − Σ log(z+k), then the asymptotic series is applied.
/// For Re z > 0 this is the continuous principal branch; everywhere
/// exp(log_gamma(z)) = Γ(z) to working accuracy.
pub fn log_gamma(z: Complex) -> Result<Complex> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.floor() {
        return Err(Error::GammaPole { re: z.re, im: z.im });
    }
    // Conjugation keeps the shifted logs on the principal branch's good side.
    if z.im < 0.0 {
        return Ok(log_gamma(z.conj())?.conj());
    }
    let mut shift = Complex::new(0.0, 0.0);
    let mut w = z;
    while w.re < STIRLING_RE {
        shift += w.ln();
        w += 1.0;
    }
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut series = Complex::new(0.0, 0.0);
    let mut p = inv;
    for a in STIRLING {
        series += a * p;
        p *= inv2;
    }
    let lg = (w - 0.5) * w.ln() - w + LN_2PI_HALF + series;
    Ok(lg - shift)
}

/// The factor chi(s) = pi^(s-1/2) Γ((1-s)/2) / Γ(s/2) from the functional
/// equation; chi(s) chi(1-s) = 1.
pub fn chi(s: Complex) -> Result<Complex> {
    let half = Complex::new(0.5, 0.0);
    let lg_top = log_gamma(half - 0.5 * s).map_err(|_| Error::ChiSingular {
        re: s.re,
        im: s.im,
        what: "gamma pole in the numerator factor",
    })?;
    let lg_bot = log_gamma(0.5 * s).map_err(|_| Error::ChiSingular {
        re: s.re,
        im: s.im,
        what: "gamma pole in the denominator factor",
    })?;
    let v = ((s - half) * PI.ln() + lg_top - lg_bot).exp();
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::ChiSingular {
            re: s.re,
            im: s.im,
            what: "non-finite value",
        });
    }
    Ok(v)
}

/// Riemann–Siegel theta: the continuous odd function with
/// Z(t) = exp(i theta(t)) zeta(1/2 + it) real.
///
/// Computed as Im log Γ(1/4 + it/2) − (t/2) ln pi; the argument stays in the
/// right half-plane, where `log_gamma` is the continuous principal branch, so
/// no unwrapping is needed.
pub fn rs_theta(t: f64) -> f64 {
    // 1/4 + it/2 is never a pole, so the unwrap cannot fire.
    let lg = log_gamma(Complex::new(0.25, 0.5 * t)).expect("pole-free argument");
    lg.im - 0.5 * t * PI.ln()
}

/// Floor below which the gamma-factor product is treated as singular.
pub const R1_SINGULAR_FLOOR: f64 = 0.5;

/// The gamma-factor product
/// sqrt(pi/2) (2^{-iy} Γ(1/4 - iy/2) / Γ(1/4 + iy/2))^3 Γ(2iy) cosh(pi y),
/// which controls the Maass-form residues and decays like (1+|y|)^{-1/2}.
///
/// Errors for |y| below [`R1_SINGULAR_FLOOR`]; the smallest spectral parameter
/// in real datasets exceeds 9, so the floor is never hit in practice.
pub fn r1(y: f64) -> Result<Complex> {
    if !(y.abs() >= R1_SINGULAR_FLOOR) {
        return Err(Error::SingularFloor {
            y,
            floor: R1_SINGULAR_FLOOR,
        });
    }
    r1_unchecked(y)
}

/// Residue weight at the spectral point kappa_h: `weight` times the
/// gamma-factor product; the residue at the conjugate point is the conjugate.
pub fn residue_r(kappa_h: f64, weight: f64) -> Result<Complex> {
    if !(kappa_h > 0.0) {
        return Err(Error::Domain {
            op: "residue_r",
            name: "kappa_h",
            value: kappa_h,
            constraint: "kappa_h > 0",
        });
    }
    Ok(weight * r1_unchecked(kappa_h)?)
}

/// As `r1` but without the singular floor; the product is finite for any
/// nonzero y, only increasingly large as y -> 0.
fn r1_unchecked(y: f64) -> Result<Complex> {
    let iy2 = Complex::new(0.0, 0.5 * y);
    let quarter = Complex::new(0.25, 0.0);
    let ratio = log_gamma(quarter - iy2)? - log_gamma(quarter + iy2)?;
    // Everything assembled in log form: Γ(2iy) decays like e^{-pi|y|} and
    // cosh(pi y) grows like e^{pi|y|}/2, so the exponents cancel.
    let log = 0.5 * (PI / 2.0).ln()
        + 3.0 * (ratio - Complex::new(0.0, y * 2f64.ln()))
        + log_gamma(Complex::new(0.0, 2.0 * y))?
        + log_cosh(PI * y);
    let v = log.exp();
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::Domain {
            op: "r1",
            name: "y",
            value: y,
            constraint: "finite gamma-factor product",
        });
    }
    Ok(v)
}

/// ln cosh(t) without overflow.
fn log_cosh(t: f64) -> f64 {
    let a = t.abs();
    a - std::f64::consts::LN_2 + (-2.0 * a).exp().ln_1p()
}
