//! Smooth bump functions built from the classical exp(-1/x) partition
//! construction: identically 0 outside [a, d], identically 1 on [b, c],
//! monotone on the ramps, with all derivatives continuous.

use crate::{Error, Result};

/// Knot layout and guaranteed smoothness order of a bump function.
#[derive(Debug, Clone, Copy)]
pub struct BumpSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Number of continuous derivatives exposed through [`Bump::deriv`].
    /// The construction itself is C-infinity.
    pub smoothness: u32,
}

impl BumpSpec {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        BumpSpec {
            a,
            b,
            c,
            d,
            smoothness: 4,
        }
    }
}

/// A smooth bump with plateau [b, c] inside support [a, d].
#[derive(Debug, Clone, Copy)]
pub struct Bump {
    spec: BumpSpec,
}

/// Validate the knots and build the bump.
pub fn smooth_bump(spec: BumpSpec) -> Result<Bump> {
    let BumpSpec { a, b, c, d, .. } = spec;
    let ordered = a < b && b <= c && c < d;
    if !ordered || !(a.is_finite() && d.is_finite()) {
        return Err(Error::BumpKnots { a, b, c, d });
    }
    Ok(Bump { spec })
}

impl Bump {
    pub fn spec(&self) -> &BumpSpec {
        &self.spec
    }

    pub fn support(&self) -> (f64, f64) {
        (self.spec.a, self.spec.d)
    }

    /// phi(x): 0 outside [a, d], 1 on [b, c], increasing on [a, b] and
    /// decreasing on [c, d].
    pub fn eval(&self, x: f64) -> f64 {
        let BumpSpec { a, b, c, d, .. } = self.spec;
        ramp((x - a) / (b - a)) * ramp((d - x) / (d - c))
    }

    /// First derivative, in closed form.
    pub fn deriv1(&self, x: f64) -> f64 {
        let BumpSpec { a, b, c, d, .. } = self.spec;
        let ua = (x - a) / (b - a);
        let ud = (d - x) / (d - c);
        ramp_deriv(ua) / (b - a) * ramp(ud) - ramp(ua) * ramp_deriv(ud) / (d - c)
    }

    /// r-th derivative. r = 0 and r = 1 are exact; higher orders are central
    /// differences of the closed-form first derivative, good to roughly 1e-6
    /// relative — ample for the order-of-magnitude derivative-bound checks.
    pub fn deriv(&self, x: f64, r: u32) -> Result<f64> {
        if r > self.spec.smoothness {
            return Err(Error::Domain {
                op: "bump_deriv",
                name: "r",
                value: r as f64,
                constraint: "r <= smoothness order",
            });
        }
        Ok(match r {
            0 => self.eval(x),
            1 => self.deriv1(x),
            _ => {
                let w = (self.spec.b - self.spec.a).min(self.spec.d - self.spec.c);
                let h = w * 1e-3;
                match r {
                    2 => (self.deriv1(x + h) - self.deriv1(x - h)) / (2.0 * h),
                    3 => {
                        (self.deriv1(x + h) - 2.0 * self.deriv1(x) + self.deriv1(x - h)) / (h * h)
                    }
                    _ => {
                        (self.deriv1(x + 2.0 * h) - 2.0 * self.deriv1(x + h)
                            + 2.0 * self.deriv1(x - h)
                            - self.deriv1(x - 2.0 * h))
                            / (2.0 * h * h * h)
                    }
                }
            }
        })
    }
}

/// C-infinity ramp: 0 for u <= 0, 1 for u >= 1, strictly increasing between.
fn ramp(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let hu = h(u);
        hu / (hu + h(1.0 - u))
    }
}

fn ramp_deriv(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        let hu = h(u);
        let hv = h(1.0 - u);
        let den = hu + hv;
        (hp(u) * hv + hu * hp(1.0 - u)) / (den * den)
    }
}

fn h(u: f64) -> f64 {
    (-1.0 / u).exp()
}

fn hp(u: f64) -> f64 {
    h(u) / (u * u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_bump() -> Bump {
        smooth_bump(BumpSpec::new(1.0, 2.0, 3.0, 4.0)).unwrap()
    }

    #[test]
    fn plateau_support_and_range() {
        let b = unit_bump();
        assert_eq!(b.eval(2.5), 1.0);
        assert_eq!(b.eval(2.0), 1.0);
        assert_eq!(b.eval(0.5), 0.0);
        assert_eq!(b.eval(4.0), 0.0);
        for i in 0..=1000 {
            let x = 0.5 + 4.0 * i as f64 / 1000.0;
            let v = b.eval(x);
            assert!((0.0..=1.0).contains(&v), "x = {x}, phi = {v}");
        }
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(smooth_bump(BumpSpec::new(2.0, 1.0, 3.0, 4.0)).is_err());
        assert!(smooth_bump(BumpSpec::new(1.0, 2.0, 1.5, 4.0)).is_err());
        assert!(smooth_bump(BumpSpec::new(1.0, 2.0, 4.0, 4.0)).is_err());
        // degenerate plateau b == c is allowed
        assert!(smooth_bump(BumpSpec::new(0.0, 1.0, 1.0, 2.0)).is_ok());
    }

    #[test]
    fn monotone_on_ramps() {
        let b = unit_bump();
        let mut prev = -1.0;
        for i in 0..=1000 {
            let x = 1.0 + i as f64 / 1000.0;
            let v = b.eval(x);
            assert!(v >= prev, "not increasing at x = {x}");
            prev = v;
        }
        let mut prev = 2.0;
        for i in 0..=1000 {
            let x = 3.0 + i as f64 / 1000.0;
            let v = b.eval(x);
            assert!(v <= prev, "not decreasing at x = {x}");
            prev = v;
        }
    }

    #[test]
    fn ramp_derivative_scale() {
        // max |phi'| over the unit ramp is within a factor 10 of 1/(b-a).
        let b = unit_bump();
        let mut max = 0.0f64;
        for i in 0..=1000 {
            let x = 1.0 + i as f64 / 1000.0;
            max = max.max(b.deriv1(x).abs());
        }
        assert!(max < 10.0 && max > 0.1, "max |phi'| = {max}");
    }

    #[test]
    fn first_derivative_matches_finite_difference() {
        let b = unit_bump();
        let h = 1e-6;
        for x in [1.3, 1.7, 3.2, 3.9] {
            let fd = (b.eval(x + h) - b.eval(x - h)) / (2.0 * h);
            assert!((b.deriv1(x) - fd).abs() < 1e-7, "x = {x}");
        }
    }

    #[test]
    fn derivative_bounds_scale_with_ramp_width() {
        // || phi^(r) ||_inf scales like (ramp width)^{-r}: compare a width-0.1
        // ramp against the unit-ramp baseline, which must differ by 10^r.
        let unit = unit_bump();
        let narrow = smooth_bump(BumpSpec::new(0.0, 0.1, 1.0, 1.1)).unwrap();
        let sup = |b: &Bump, lo: f64, hi: f64, r: u32| {
            let mut max = 0.0f64;
            for i in 0..=2000 {
                let x = lo + (hi - lo) * i as f64 / 2000.0;
                max = max.max(b.deriv(x, r).unwrap().abs());
            }
            max
        };
        for r in 1..=3u32 {
            let base = sup(&unit, 1.0, 2.0, r);
            let scaled = sup(&narrow, 0.0, 0.1, r);
            let ratio = scaled / base / 10f64.powi(r as i32);
            assert!(
                (0.5..2.0).contains(&ratio),
                "r = {r}: base = {base}, scaled = {scaled}, ratio = {ratio}"
            );
        }
        assert!(narrow.deriv(0.5, 5).is_err());
    }
}
