//! Scalar function descriptors for spectral calculus.
//!
//! A [`ScalarFunction`] carries a value together with derivatives up to third
//! order. Third derivatives are required even though matrix Frechet
//! derivatives stop at order two: third directional derivatives of trace
//! functions restrict to a line and consume them through third divided
//! differences.

use crate::{Error, Result};

/// Scalar function on an interval, with derivatives up to order 3.
///
/// Variants cover exactly what the trace-function and perspective layers
/// need: plain and scaled powers, the negated power family `x -> -x^p`
/// (operator concave for p in [-1, 0]), the logarithm, and affine maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarFunction {
    /// `x^p`.
    Power(f64),
    /// `c * x^p`.
    ScaledPower { c: f64, p: f64 },
    /// `-x^p`.
    NegPower(f64),
    /// `ln x`.
    Log,
    /// `a*x + b`.
    Affine { a: f64, b: f64 },
}

impl ScalarFunction {
    /// True when the descriptor is defined at `x`.
    ///
    /// Powers with nonnegative integer exponent extend to all of R; other
    /// powers and the logarithm live on the open positive axis.
    pub fn in_domain(&self, x: f64) -> bool {
        match self {
            ScalarFunction::Power(p)
            | ScalarFunction::ScaledPower { p, .. }
            | ScalarFunction::NegPower(p) => {
                if *p >= 0.0 && p.fract() == 0.0 {
                    true
                } else {
                    x > 0.0
                }
            }
            ScalarFunction::Log => x > 0.0,
            ScalarFunction::Affine { .. } => true,
        }
    }

    fn name(&self) -> String {
        match self {
            ScalarFunction::Power(p) => format!("x^{p}"),
            ScalarFunction::ScaledPower { c, p } => format!("{c}*x^{p}"),
            ScalarFunction::NegPower(p) => format!("-x^{p}"),
            ScalarFunction::Log => "ln".into(),
            ScalarFunction::Affine { a, b } => format!("{a}*x+{b}"),
        }
    }

    fn check(&self, x: f64) -> Result<()> {
        if !x.is_finite() || !self.in_domain(x) {
            return Err(Error::DomainViolation {
                func: self.name(),
                x,
            });
        }
        Ok(())
    }

    /// Derivative of order `k` (0 = value), checked against the domain.
    pub fn deriv(&self, k: usize, x: f64) -> Result<f64> {
        self.check(x)?;
        debug_assert!(k <= 3);
        Ok(match *self {
            ScalarFunction::Power(p) => power_deriv(1.0, p, k, x),
            ScalarFunction::ScaledPower { c, p } => power_deriv(c, p, k, x),
            ScalarFunction::NegPower(p) => power_deriv(-1.0, p, k, x),
            ScalarFunction::Log => match k {
                0 => x.ln(),
                1 => 1.0 / x,
                2 => -1.0 / (x * x),
                _ => 2.0 / (x * x * x),
            },
            ScalarFunction::Affine { a, b } => match k {
                0 => a * x + b,
                1 => a,
                _ => 0.0,
            },
        })
    }

    /// Value at `x`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        self.deriv(0, x)
    }

    /// First derivative at `x`.
    pub fn d1(&self, x: f64) -> Result<f64> {
        self.deriv(1, x)
    }

    /// Second derivative at `x`.
    pub fn d2(&self, x: f64) -> Result<f64> {
        self.deriv(2, x)
    }

    /// Third derivative at `x`.
    pub fn d3(&self, x: f64) -> Result<f64> {
        self.deriv(3, x)
    }
}

fn power_deriv(c: f64, p: f64, k: usize, x: f64) -> f64 {
    let mut coeff = c;
    let mut q = p;
    for _ in 0..k {
        coeff *= q;
        q -= 1.0;
    }
    if coeff == 0.0 {
        // Integer powers differentiate to zero eventually; avoid 0 * inf at x = 0.
        return 0.0;
    }
    coeff * x.powf(q)
}

/// Relative eigenvalue-gap threshold below which divided differences switch to
/// their confluent (derivative-based) form.
pub const DEGENERACY_TOL: f64 = 1e-8;

fn gap_is_degenerate(spread: f64, vals: &[f64]) -> bool {
    let scale = vals.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    spread <= DEGENERACY_TOL * scale
}

/// First divided difference `f[a,b]`.
///
/// Falls back to `f'((a+b)/2)` when the gap is below the degeneracy threshold
/// relative to `max(1, |a|, |b|)`.
pub fn dd1(f: &ScalarFunction, a: f64, b: f64) -> Result<f64> {
    if gap_is_degenerate((a - b).abs(), &[a, b]) {
        f.d1(0.5 * (a + b))
    } else {
        Ok((f.eval(a)? - f.eval(b)?) / (a - b))
    }
}

/// Second divided difference `f[a,b,c]`; confluent form `f''(mid)/2` under the
/// same relative-gap rule applied to the spread of the three arguments.
pub fn dd2(f: &ScalarFunction, a: f64, b: f64, c: f64) -> Result<f64> {
    let mut v = [a, b, c];
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let spread = v[2] - v[0];
    if gap_is_degenerate(spread, &v) {
        Ok(f.d2((a + b + c) / 3.0)? / 2.0)
    } else {
        // Divide by the extreme pair so the quotient is as well conditioned as
        // the data allows.
        Ok((dd1(f, v[2], v[1])? - dd1(f, v[1], v[0])?) / (v[2] - v[0]))
    }
}

/// Third divided difference `f[a,b,c,d]`; confluent form `f'''(mid)/6`.
pub fn dd3(f: &ScalarFunction, a: f64, b: f64, c: f64, d: f64) -> Result<f64> {
    let mut v = [a, b, c, d];
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let spread = v[3] - v[0];
    if gap_is_degenerate(spread, &v) {
        Ok(f.d3((a + b + c + d) / 4.0)? / 6.0)
    } else {
        Ok((dd2(f, v[3], v[2], v[1])? - dd2(f, v[2], v[1], v[0])?) / (v[3] - v[0]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    /// Central finite difference of order `k` with Richardson extrapolation;
    /// reference for the analytic derivatives.
    fn fd_deriv(f: &ScalarFunction, k: usize, x: f64, h: f64) -> f64 {
        let d = |h: f64| -> f64 {
            let e = |t: f64| f.eval(t).unwrap();
            match k {
                1 => (e(x + h) - e(x - h)) / (2.0 * h),
                2 => (e(x + h) - 2.0 * e(x) + e(x - h)) / (h * h),
                3 => (e(x + 2.0 * h) - 2.0 * e(x + h) + 2.0 * e(x - h) - e(x - 2.0 * h))
                    / (2.0 * h * h * h),
                _ => unreachable!(),
            }
        };
        (4.0 * d(h / 2.0) - d(h)) / 3.0
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let funcs = [
            ScalarFunction::Power(0.7),
            ScalarFunction::Power(2.0),
            ScalarFunction::ScaledPower { c: 0.75, p: -0.25 },
            ScalarFunction::NegPower(-0.5),
            ScalarFunction::Log,
            ScalarFunction::Affine { a: 2.0, b: -1.0 },
        ];
        let mut rng = Stream::new(11);
        for f in &funcs {
            for _ in 0..40 {
                let x = rng.uniform_in(0.1, 10.0);
                for k in 1..=3 {
                    let exact = f.deriv(k, x).unwrap();
                    // Relative step keeps truncation error ~h^4/x^4 uniform
                    // for the power-type functions with a pole at zero.
                    let approx = fd_deriv(f, k, x, 1e-2 * x);
                    let scale = exact.abs().max(1.0);
                    assert!(
                        (exact - approx).abs() <= 2e-6 * scale,
                        "{f:?} order {k} at {x}: {exact} vs {approx}"
                    );
                }
            }
        }
    }

    #[test]
    fn domain_violations_error() {
        assert!(ScalarFunction::Log.eval(-1.0).is_err());
        assert!(ScalarFunction::Power(0.5).eval(-2.0).is_err());
        assert!(ScalarFunction::Power(2.0).eval(-2.0).is_ok());
        assert!(ScalarFunction::Affine { a: 1.0, b: 0.0 }.eval(-2.0).is_ok());
    }

    #[test]
    fn divided_differences_reduce_to_derivatives_on_ties() {
        let f = ScalarFunction::Power(0.5);
        // sqrt: f[4,1] = (2-1)/3.
        assert!((dd1(&f, 4.0, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        // Exact tie uses the derivative at the midpoint.
        let d = dd1(&f, 2.0, 2.0).unwrap();
        assert!((d - 0.5 / 2.0_f64.sqrt()).abs() < 1e-15);
        let d2v = dd2(&f, 3.0, 3.0, 3.0).unwrap();
        assert!((d2v - f.d2(3.0).unwrap() / 2.0).abs() < 1e-15);
        let d3v = dd3(&f, 3.0, 3.0, 3.0, 3.0).unwrap();
        assert!((d3v - f.d3(3.0).unwrap() / 6.0).abs() < 1e-15);
    }

    #[test]
    fn divided_differences_are_symmetric() {
        let f = ScalarFunction::Log;
        let (a, b, c, d) = (0.7, 1.9, 3.2, 5.5);
        let base = dd2(&f, a, b, c).unwrap();
        assert!((dd2(&f, c, a, b).unwrap() - base).abs() < 1e-12);
        let base3 = dd3(&f, a, b, c, d).unwrap();
        assert!((dd3(&f, d, b, a, c).unwrap() - base3).abs() < 1e-12);
    }

    #[test]
    fn near_degenerate_gaps_stay_accurate() {
        // Just above and below the switch the two branches must agree to the
        // expected truncation level.
        let f = ScalarFunction::Power(0.75);
        for gap in [1e-7, 1e-9] {
            let a = 2.0;
            let b = 2.0 + gap;
            let q = dd1(&f, a, b).unwrap();
            let exact = f.d1(2.0 + gap / 2.0).unwrap();
            assert!((q - exact).abs() < 1e-7, "gap {gap}: {q} vs {exact}");
        }
    }
}
