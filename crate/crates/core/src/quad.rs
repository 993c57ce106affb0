//! Quadrature building blocks: Gauss–Legendre rules, panel integration with
//! embedded error estimates, and tapered vertical-line integrals for
//! oscillatory Mellin-type integrands.

use crate::numerics::{smooth_bump, Bump, BumpSpec};
use crate::Complex;
use std::sync::LazyLock;

/// A Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Node/weight pairs on [-1, 1], for callers assembling their own panels.
    pub fn node_weight_pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    pub fn integrate_complex<F: FnMut(f64) -> Complex>(
        &self,
        a: f64,
        b: f64,
        mut f: F,
    ) -> Complex {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = Complex::new(0.0, 0.0);
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// Legendre P_n and P_n' at x.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub static GL8: LazyLock<GaussLegendre> = LazyLock::new(|| GaussLegendre::new(8));
pub static GL16: LazyLock<GaussLegendre> = LazyLock::new(|| GaussLegendre::new(16));

/// Integrate f over [a, b] split into panels whose length at position x is
/// `panel_len(x)` (clamped to the remaining interval). Returns the GL16 value
/// and an error estimate from the embedded GL8 comparison.
pub fn panels<F, L>(a: f64, b: f64, panel_len: L, mut f: F) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
    L: Fn(f64) -> f64,
{
    let mut acc = 0.0;
    let mut err = 0.0;
    let mut x = a;
    while x < b {
        let len = panel_len(x).max(1e-12);
        let hi = (x + len).min(b);
        let v16 = GL16.integrate(x, hi, &mut f);
        let v8 = GL8.integrate(x, hi, &mut f);
        acc += v16;
        err += (v16 - v8).abs();
        x = hi;
    }
    (acc, err)
}

/// Complex-valued variant of [`panels`].
pub fn panels_complex<F, L>(a: f64, b: f64, panel_len: L, mut f: F) -> (Complex, f64)
where
    F: FnMut(f64) -> Complex,
    L: Fn(f64) -> f64,
{
    let mut acc = Complex::new(0.0, 0.0);
    let mut err = 0.0;
    let mut x = a;
    while x < b {
        let len = panel_len(x).max(1e-12);
        let hi = (x + len).min(b);
        let v16 = GL16.integrate_complex(x, hi, &mut f);
        let v8 = GL8.integrate_complex(x, hi, &mut f);
        acc += v16;
        err += (v16 - v8).norm();
        x = hi;
    }
    (acc, err)
}

/// Trapezoid rule over a uniform grid of `values` with spacing `step`.
pub fn trapezoid_uniform(values: &[f64], step: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    step * (0.5 * (values[0] + values[values.len() - 1]) + inner)
}

/// Composite Simpson over a uniform grid (odd point count preferred; a final
/// trapezoid strip absorbs an even tail).
pub fn simpson_uniform(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    if n < 3 {
        return trapezoid_uniform(values, step);
    }
    let pairs = (n - 1) / 2;
    let mut acc = 0.0;
    for p in 0..pairs {
        let i = 2 * p;
        acc += values[i] + 4.0 * values[i + 1] + values[i + 2];
    }
    let mut total = acc * step / 3.0;
    if (n - 1) % 2 == 1 {
        total += 0.5 * step * (values[n - 2] + values[n - 1]);
    }
    total
}

/// Smooth taper for truncated vertical-line integrals: 1 on the central 80%
/// of [-tmax, tmax], rolling smoothly to 0 at the ends. Suppresses the slow
/// oscillatory tail of raw truncation.
pub fn line_taper(tmax: f64) -> Bump {
    smooth_bump(BumpSpec::new(-tmax, -0.8 * tmax, 0.8 * tmax, tmax))
        .expect("valid taper knots for tmax > 0")
}

/// Tapered trapezoid approximation of (1/2 pi) ∫_{-tmax}^{tmax} g(t) dt on a
/// uniform grid. The taper makes the trapezoid rule spectrally accurate and
/// the truncation error decay superpolynomially in tmax for amplitudes with
/// asymptotic expansions.
pub fn tapered_line_integral<F>(g: F, tmax: f64, step: f64) -> Complex
where
    F: Fn(f64) -> Complex + Sync,
{
    use rayon::prelude::*;
    let n = (2.0 * tmax / step).ceil() as usize;
    let h = 2.0 * tmax / n as f64;
    let taper = line_taper(tmax);
    // Endpoint values vanish under the taper, so the trapezoid endpoint
    // halving is immaterial; keep it for form.
    let terms: Vec<Complex> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let t = -tmax + i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            w * taper.eval(t) * g(t)
        })
        .collect();
    let mut acc = Complex::new(0.0, 0.0);
    for v in terms {
        acc += v;
    }
    acc * h / (2.0 * std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_nodes_integrate_polynomials_exactly() {
        // GL16 is exact through degree 31.
        let v = GL16.integrate(0.0, 1.0, |x| x.powi(20));
        assert!((v - 1.0 / 21.0).abs() < 1e-15);
        let v8 = GL8.integrate(-1.0, 2.0, |x| 3.0 * x * x);
        assert!((v8 - 9.0).abs() < 1e-13);
    }

    #[test]
    fn panels_track_oscillation() {
        // ∫_0^20 cos(5x) dx = sin(100)/5
        let (v, err) = panels(0.0, 20.0, |_| 1.0, |x| (5.0 * x).cos());
        let exact = 100f64.sin() / 5.0;
        assert!((v - exact).abs() < 1e-10, "v = {v}, exact = {exact}");
        assert!(err < 1e-6);
    }

    #[test]
    fn simpson_and_trapezoid_agree_on_smooth_data() {
        let step = 0.01;
        let values: Vec<f64> = (0..=1000).map(|i| (i as f64 * step).sin()).collect();
        let exact = 1.0 - 10f64.cos();
        assert!((simpson_uniform(&values, step) - exact).abs() < 1e-9);
        assert!((trapezoid_uniform(&values, step) - exact).abs() < 1e-4);
    }

    #[test]
    fn tapered_line_recovers_known_transform() {
        // (1/2pi) ∫ x^{1+it}/(3+it) dt = x^{-1} for x>1 ... evaluated at x = 2:
        // inverse of m[x^{-2}](s) = 1/(s+1) on the sigma = 2 line equals 2^{-2}.
        let x: f64 = 2.0;
        let v = tapered_line_integral(
            |t| {
                let s = Complex::new(2.0, t);
                (s * x.ln()).exp() / (s + 1.0) / x
            },
            400.0,
            0.05,
        );
        assert!((v.re - 0.25).abs() < 1e-6, "re = {}", v.re);
        assert!(v.im.abs() < 1e-8);
    }
}
