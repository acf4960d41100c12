use serde::{Deserialize, Serialize};

use super::field::PotentialField;
use super::path::Path;
use crate::{Error, Result, Vec2};

/// Controls for adaptive Simpson quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureOptions {
    /// Relative tolerance, measured against `∫|A||dr|` over each segment.
    pub tol: f64,
    pub max_depth: u32,
    /// Hard cap on integrand evaluations per segment.
    pub max_evaluations: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            tol: 1e-10,
            max_depth: 30,
            max_evaluations: 5_000_000,
        }
    }
}

impl QuadratureOptions {
    pub fn with_tol(tol: f64) -> Self {
        QuadratureOptions {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Levels of bisection performed before the error test is trusted.
const MIN_DEPTH: u32 = 3;

struct Simpson<'a, F> {
    f: &'a mut F,
    max_depth: u32,
    budget: usize,
    evaluations: usize,
    error_bound: f64,
    converged: bool,
}

impl<F> Simpson<'_, F>
where
    F: FnMut(f64) -> Result<f64>,
{
    fn eval(&mut self, x: f64) -> Result<f64> {
        self.evaluations += 1;
        (self.f)(x)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let h = b - a;
        let flm = self.eval(0.5 * (a + m))?;
        let frm = self.eval(0.5 * (m + b))?;
        let left = h / 12.0 * (fa + 4.0 * flm + fm);
        let right = h / 12.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        // Differences at rounding level cannot be refined away.
        let floor = 8.0 * f64::EPSILON * (left.abs() + right.abs());
        // Agreement on a coarse panel can be a coincidence (an integrand with
        // nodes at the sample points), so the first few levels always split.
        if depth >= MIN_DEPTH.min(self.max_depth) && delta.abs() <= 15.0 * eps.max(floor) {
            self.error_bound += delta.abs() / 15.0;
            return Ok(left + right + delta / 15.0);
        }
        if depth >= self.max_depth || self.evaluations >= self.budget {
            self.converged = false;
            self.error_bound += delta.abs();
            return Ok(left + right + delta / 15.0);
        }
        let l = self.refine(a, m, fa, flm, fm, left, 0.5 * eps, depth + 1)?;
        let r = self.refine(m, b, fm, frm, fb, right, 0.5 * eps, depth + 1)?;
        Ok(l + r)
    }
}

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `abs_tol`. Evaluation errors abort immediately; failing to converge is
/// reported through [`QuadratureEstimate::converged`].
pub fn adaptive_simpson<F>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    opts: &QuadratureOptions,
) -> Result<QuadratureEstimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    let fa = f(a)?;
    let fm = f(0.5 * (a + b))?;
    let fb = f(b)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut s = Simpson {
        f: &mut f,
        max_depth: opts.max_depth,
        budget: opts.max_evaluations,
        evaluations: 3,
        error_bound: 0.0,
        converged: true,
    };
    let value = s.refine(a, b, fa, fm, fb, whole, abs_tol, 0)?;
    Ok(QuadratureEstimate {
        value,
        error_bound: s.error_bound,
        evaluations: s.evaluations,
        converged: s.converged,
    })
}

fn segment_integral(
    field: &PotentialField,
    p0: Vec2,
    p1: Vec2,
    opts: &QuadratureOptions,
) -> Result<QuadratureEstimate> {
    let d = p1 - p0;
    let len = d.norm();
    if len == 0.0 {
        return Ok(QuadratureEstimate {
            value: 0.0,
            error_bound: 0.0,
            evaluations: 0,
            converged: true,
        });
    }
    // Coarse estimate of ∫|A||dr| sets the scale for the relative tolerance.
    let mut scale = 0.0;
    for (w, s) in [(1.0, 0.0), (4.0, 0.25), (2.0, 0.5), (4.0, 0.75), (1.0, 1.0)] {
        scale += w * field.eval_a(p0 + d * s)?.norm();
    }
    scale *= len / 12.0;
    let abs_tol = opts.tol * scale.max(f64::MIN_POSITIVE);
    adaptive_simpson(
        |s| Ok(field.eval_a(p0 + d * s)?.dot(&d)),
        0.0,
        1.0,
        abs_tol,
        opts,
    )
}

/// `∫ A·dr` along `path` with its accumulated error bound. A failed segment
/// does not stop the sweep; the caller sees `converged = false`.
///
/// Gauge layers contribute `χ(end) − χ(start)` exactly; only the ungauged
/// potential goes through quadrature.
pub fn line_integral_a_estimate(
    field: &PotentialField,
    path: &Path,
    opts: &QuadratureOptions,
) -> Result<QuadratureEstimate> {
    match field {
        PotentialField::Gauged { inner, gauge } => {
            let mut est = line_integral_a_estimate(inner, path, opts)?;
            if !path.is_closed() {
                est.value += gauge.value(path.end()) - gauge.value(path.start());
            }
            Ok(est)
        }
        _ => line_integral_a_quadrature(field, path, opts),
    }
}

/// Adaptive quadrature of `A·dr` for the full potential, gauge terms
/// included. Slower and less exact than [`line_integral_a_estimate`] for
/// gauged fields; kept as an independent check of it.
pub fn line_integral_a_quadrature(
    field: &PotentialField,
    path: &Path,
    opts: &QuadratureOptions,
) -> Result<QuadratureEstimate> {
    if !(opts.tol > 0.0) {
        return Err(Error::invalid("tol", "quadrature tolerance must be > 0"));
    }
    let mut total = QuadratureEstimate {
        value: 0.0,
        error_bound: 0.0,
        evaluations: 0,
        converged: true,
    };
    for (a, b) in path.segments() {
        let seg = segment_integral(field, a, b, opts)?;
        total.value += seg.value;
        total.error_bound += seg.error_bound;
        total.evaluations += seg.evaluations;
        total.converged &= seg.converged;
    }
    Ok(total)
}

/// `∫ A·dr` along a piecewise-linear path (charge factor not included).
pub fn line_integral_a(field: &PotentialField, path: &Path, opts: &QuadratureOptions) -> Result<f64> {
    let est = line_integral_a_estimate(field, path, opts)?;
    if !est.converged {
        return Err(Error::QuadratureFailure {
            estimate: est.value,
            error_bound: est.error_bound,
        });
    }
    Ok(est.value)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::em_potentials::GaugeFunction;

    fn sol() -> PotentialField {
        PotentialField::solenoid(Vec2::zeros(), 1.0, 2.0 * PI).unwrap()
    }

    #[test]
    fn simpson_polynomial_and_smooth() {
        let opts = QuadratureOptions::default();
        let cubic = adaptive_simpson(|x| Ok(x * x * x - x), 0.0, 2.0, 1e-12, &opts).unwrap();
        assert!((cubic.value - 2.0).abs() < 1e-14);
        let s = adaptive_simpson(|x: f64| Ok(x.sin()), 0.0, PI, 1e-12, &opts).unwrap();
        assert!((s.value - 2.0).abs() < 1e-11);
        assert!(s.converged);
    }

    #[test]
    fn circle_around_solenoid() {
        let opts = QuadratureOptions::default();
        let ccw = Path::circle(Vec2::zeros(), 2.0, 64, 1).unwrap();
        let v = line_integral_a(&sol(), &ccw, &opts).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-9, "{v}");
        let cw = line_integral_a(&sol(), &ccw.reversed(), &opts).unwrap();
        assert!((cw + 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn square_not_enclosing_is_zero() {
        let sq = Path::polygon(vec![
            Vec2::new(2.0, 2.0),
            Vec2::new(4.0, 2.0),
            Vec2::new(4.0, 4.0),
            Vec2::new(2.0, 4.0),
        ])
        .unwrap();
        let v = line_integral_a(&sol(), &sq, &QuadratureOptions::default()).unwrap();
        assert!(v.abs() < 1e-10);
    }

    #[test]
    fn constant_gauge_leaves_potential() {
        let f = sol().apply_gauge(GaugeFunction::Constant(4.0));
        let p = Vec2::new(1.3, -2.0);
        assert_eq!(f.eval_a(p).unwrap(), sol().eval_a(p).unwrap());
    }

    #[test]
    fn linear_gauge_shifts_potential() {
        let base = PotentialField::uniform_b(1.0);
        let g = base.apply_gauge(GaugeFunction::Linear {
            gradient: Vec2::new(0.7, 0.0),
            offset: 0.0,
        });
        let p = Vec2::new(0.4, 0.9);
        let d = g.eval_a(p).unwrap() - base.eval_a(p).unwrap();
        assert!((d - Vec2::new(0.7, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn depth_cap_reports_failure() {
        let opts = QuadratureOptions {
            tol: 1e-12,
            max_depth: 1,
            ..Default::default()
        };
        let f = PotentialField::flux_line(Vec2::zeros(), 1.0);
        let path = Path::open(vec![Vec2::new(-5.0, 1e-3), Vec2::new(5.0, 1e-3)]).unwrap();
        match line_integral_a(&f, &path, &opts) {
            Err(Error::QuadratureFailure { estimate, error_bound }) => {
                assert!(estimate.is_finite());
                assert!(error_bound > 0.0);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn singular_point_propagates() {
        let f = PotentialField::flux_line(Vec2::zeros(), 1.0);
        let path = Path::open(vec![Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0)]).unwrap();
        assert!(matches!(
            line_integral_a(&f, &path, &QuadratureOptions::default()),
            Err(Error::SingularPoint(_))
        ));
    }

    #[test]
    fn radial_segment_converges() {
        let path = Path::open(vec![Vec2::new(1.5, 1.5), Vec2::new(6.0, 6.0)]).unwrap();
        let v = line_integral_a(&sol(), &path, &QuadratureOptions::default()).unwrap();
        assert!(v.abs() < 1e-14);
    }

    #[test]
    fn nonpositive_tol_rejected() {
        let path = Path::circle(Vec2::zeros(), 2.0, 8, 1).unwrap();
        assert!(line_integral_a(&sol(), &path, &QuadratureOptions::with_tol(0.0)).is_err());
    }

    #[test]
    fn gauge_shortcut_matches_full_quadrature() {
        let chi = GaugeFunction::Sum(vec![
            GaugeFunction::Gaussian {
                amplitude: 2.0,
                center: Vec2::new(1.0, 1.0),
                width: 1.5,
            },
            GaugeFunction::PlaneWave {
                amplitude: 0.5,
                wavevector: Vec2::new(0.8, -0.3),
                phase: 0.4,
            },
        ]);
        let f = sol().apply_gauge(chi);
        let opts = QuadratureOptions::default();
        let open = Path::open(vec![Vec2::new(-3.0, 2.0), Vec2::new(2.0, 3.0), Vec2::new(4.0, -2.0)]).unwrap();
        let loop_ = Path::circle(Vec2::new(0.5, 0.0), 2.5, 24, 1).unwrap();
        for path in [&open, &loop_] {
            let fast = line_integral_a(&f, path, &opts).unwrap();
            let full = line_integral_a_quadrature(&f, path, &opts).unwrap();
            assert!(full.converged);
            assert!((fast - full.value).abs() < 1e-9, "{fast} vs {}", full.value);
        }
    }
}
