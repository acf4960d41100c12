use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::gauge::GaugeFunction;
use crate::{Error, Mat2, Result, Vec2};

/// Infinite solenoid seen in cross-section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolenoidSpec {
    pub center: Vec2,
    pub radius: f64,
    /// Signed magnetic flux through the cross-section.
    pub flux: f64,
}

impl SolenoidSpec {
    pub fn new(center: Vec2, radius: f64, flux: f64) -> Result<Self> {
        let spec = SolenoidSpec {
            center,
            radius,
            flux,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::invalid("radius", "must be finite and > 0"));
        }
        if !self.flux.is_finite() || !self.center.iter().all(|c| c.is_finite()) {
            return Err(Error::invalid("flux", "solenoid parameters must be finite"));
        }
        Ok(())
    }

    /// Uniform interior field `Φ/(πR²)`.
    pub fn interior_field(&self) -> f64 {
        self.flux / (PI * self.radius * self.radius)
    }

    pub fn with_flux(mut self, flux: f64) -> Self {
        self.flux = flux;
        self
    }
}

/// Static electromagnetic potential `(A, φ)` in the plane.
///
/// Every shipped model has `φ = 0`; the scalar channel is carried through the
/// dynamics so that the Hamiltonian keeps its general form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialField {
    /// Finite-radius solenoid, uniform field inside and `B = 0` outside.
    Solenoid(SolenoidSpec),
    /// Zero-radius limit of the solenoid; singular on its axis.
    FluxLine { center: Vec2, flux: f64 },
    /// Uniform field in the symmetric gauge `A = ½ B ẑ × r`.
    UniformB { b: f64 },
    /// `A' = A + ∇χ` around another field.
    Gauged {
        inner: Box<PotentialField>,
        gauge: GaugeFunction,
    },
}

/// `ẑ × v`.
fn perp(v: Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

/// Matrix of `v ↦ ẑ × v`.
fn perp_matrix() -> Mat2 {
    Mat2::new(0.0, -1.0, 1.0, 0.0)
}

impl PotentialField {
    pub fn solenoid(center: Vec2, radius: f64, flux: f64) -> Result<Self> {
        Ok(PotentialField::Solenoid(SolenoidSpec::new(
            center, radius, flux,
        )?))
    }

    pub fn flux_line(center: Vec2, flux: f64) -> Self {
        PotentialField::FluxLine { center, flux }
    }

    pub fn uniform_b(b: f64) -> Self {
        PotentialField::UniformB { b }
    }

    /// Wrap the field in a gauge transformation. The gauge function is
    /// single-valued by construction, so curl and loop integrals are unchanged.
    pub fn apply_gauge(&self, gauge: GaugeFunction) -> PotentialField {
        PotentialField::Gauged {
            inner: Box::new(self.clone()),
            gauge,
        }
    }

    /// The field with every gauge wrapper removed.
    pub fn ungauged(&self) -> &PotentialField {
        match self {
            PotentialField::Gauged { inner, .. } => inner.ungauged(),
            other => other,
        }
    }

    /// The underlying solenoid, if the (ungauged) model is one.
    pub fn solenoid_spec(&self) -> Option<&SolenoidSpec> {
        match self.ungauged() {
            PotentialField::Solenoid(s) => Some(s),
            _ => None,
        }
    }

    fn check(&self, p: Vec2) -> Result<()> {
        match self {
            PotentialField::FluxLine { center, .. } => {
                if (p - center).norm_squared() == 0.0 {
                    return Err(Error::SingularPoint(p));
                }
                Ok(())
            }
            PotentialField::Gauged { inner, .. } => inner.check(p),
            _ => Ok(()),
        }
    }

    pub fn eval_a(&self, p: Vec2) -> Result<Vec2> {
        self.check(p)?;
        Ok(match self {
            PotentialField::Solenoid(s) => {
                let d = p - s.center;
                let r2 = d.norm_squared();
                let r2_in = s.radius * s.radius;
                if r2 < r2_in {
                    perp(d) * (s.flux / (2.0 * PI * r2_in))
                } else {
                    perp(d) * (s.flux / (2.0 * PI * r2))
                }
            }
            PotentialField::FluxLine { center, flux } => {
                let d = p - center;
                perp(d) * (flux / (2.0 * PI * d.norm_squared()))
            }
            PotentialField::UniformB { b } => perp(p) * (0.5 * b),
            PotentialField::Gauged { inner, gauge } => inner.eval_a(p)? + gauge.gradient(p),
        })
    }

    pub fn eval_phi(&self, p: Vec2) -> Result<f64> {
        self.check(p)?;
        Ok(0.0)
    }

    pub fn grad_phi(&self, p: Vec2) -> Result<Vec2> {
        self.check(p)?;
        Ok(Vec2::zeros())
    }

    /// Analytic Jacobian `J[(i, j)] = ∂A_i/∂x_j`.
    pub fn grad_a(&self, p: Vec2) -> Result<Mat2> {
        self.check(p)?;
        Ok(match self {
            PotentialField::Solenoid(s) => {
                let d = p - s.center;
                let r2_in = s.radius * s.radius;
                if d.norm_squared() < r2_in {
                    perp_matrix() * (s.flux / (2.0 * PI * r2_in))
                } else {
                    exterior_jacobian(d, s.flux)
                }
            }
            PotentialField::FluxLine { center, flux } => exterior_jacobian(p - center, *flux),
            PotentialField::UniformB { b } => perp_matrix() * (0.5 * b),
            PotentialField::Gauged { inner, gauge } => inner.grad_a(p)? + gauge.hessian(p),
        })
    }

    /// Out-of-plane magnetic field. Gauge wrappers are transparent.
    pub fn eval_b(&self, p: Vec2) -> Result<f64> {
        self.check(p)?;
        Ok(match self {
            PotentialField::Solenoid(s) => {
                if (p - s.center).norm_squared() < s.radius * s.radius {
                    s.interior_field()
                } else {
                    0.0
                }
            }
            PotentialField::FluxLine { .. } => 0.0,
            PotentialField::UniformB { b } => *b,
            PotentialField::Gauged { inner, .. } => inner.eval_b(p)?,
        })
    }

    /// `∇·A`; zero wherever the field is in Coulomb gauge.
    pub fn divergence_a(&self, p: Vec2) -> Result<f64> {
        Ok(self.grad_a(p)?.trace())
    }
}

/// Jacobian of `Φ/(2π) ẑ×d / |d|²`.
fn exterior_jacobian(d: Vec2, flux: f64) -> Mat2 {
    let r2 = d.norm_squared();
    let c = flux / (2.0 * PI * r2 * r2);
    let (x, y) = (d.x, d.y);
    Mat2::new(
        2.0 * c * x * y,
        -c * (x * x - y * y),
        -c * (x * x - y * y),
        -2.0 * c * x * y,
    )
}

/// Central-difference curl of `A`, used to validate [`PotentialField::eval_b`].
pub fn numeric_curl(field: &PotentialField, p: Vec2, h: f64) -> Result<f64> {
    let ex = Vec2::new(h, 0.0);
    let ey = Vec2::new(0.0, h);
    let day_dx = (field.eval_a(p + ex)?.y - field.eval_a(p - ex)?.y) / (2.0 * h);
    let dax_dy = (field.eval_a(p + ey)?.x - field.eval_a(p - ey)?.x) / (2.0 * h);
    Ok(day_dx - dax_dy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sol(flux: f64) -> PotentialField {
        PotentialField::solenoid(Vec2::zeros(), 1.0, flux).unwrap()
    }

    #[test]
    fn solenoid_potential_values() {
        let f = sol(2.0 * PI);
        let a = f.eval_a(Vec2::new(2.0, 0.0)).unwrap();
        assert!((a - Vec2::new(0.0, 0.5)).norm() < 1e-15);
        assert_eq!(f.eval_a(Vec2::zeros()).unwrap(), Vec2::zeros());
    }

    #[test]
    fn uniform_symmetric_gauge() {
        let a = PotentialField::uniform_b(1.0)
            .eval_a(Vec2::new(1.0, 0.0))
            .unwrap();
        assert!((a - Vec2::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn solenoid_field_inside_and_out() {
        let f = sol(PI);
        assert!((f.eval_b(Vec2::new(0.5, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(f.eval_b(Vec2::new(3.0, 0.0)).unwrap(), 0.0);
        let g = f.apply_gauge(GaugeFunction::Gaussian {
            amplitude: 3.0,
            center: Vec2::new(0.2, -0.4),
            width: 0.7,
        });
        for p in [Vec2::new(0.5, 0.0), Vec2::new(3.0, 1.0)] {
            assert_eq!(g.eval_b(p).unwrap(), f.eval_b(p).unwrap());
        }
    }

    #[test]
    fn continuity_at_radius() {
        let s = SolenoidSpec::new(Vec2::new(0.3, -0.2), 1.7, 2.3).unwrap();
        for k in 0..16 {
            let th = k as f64 * PI / 8.0;
            let d = Vec2::new(th.cos(), th.sin()) * s.radius;
            let inside = perp(d) * (s.flux / (2.0 * PI * s.radius * s.radius));
            let outside = perp(d) * (s.flux / (2.0 * PI * d.norm_squared()));
            assert!((inside - outside).norm() <= 4.0 * f64::EPSILON * inside.norm());
        }
    }

    #[test]
    fn numeric_curl_matches_analytic() {
        let f = sol(PI);
        let h = 1e-4;
        let ext = numeric_curl(&f, Vec2::new(1.6, 0.9), h).unwrap();
        assert!(ext.abs() < 1e-6, "{ext}");
        let int = numeric_curl(&f, Vec2::new(0.3, -0.2), h).unwrap();
        assert!((int - 1.0).abs() < 1e-5);
        let u = numeric_curl(&PotentialField::uniform_b(2.5), Vec2::new(-3.0, 7.0), h).unwrap();
        assert!((u - 2.5).abs() < 1e-8);
    }

    #[test]
    fn flux_line_axis_is_singular() {
        let f = PotentialField::flux_line(Vec2::new(1.0, 1.0), 1.0);
        assert!(matches!(
            f.eval_a(Vec2::new(1.0, 1.0)),
            Err(Error::SingularPoint(_))
        ));
        assert!(f.eval_b(Vec2::new(1.0, 1.0)).is_err());
        assert!(f.eval_a(Vec2::new(2.0, 1.0)).is_ok());
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let fields = [
            sol(1.3),
            PotentialField::flux_line(Vec2::new(0.1, 0.2), -0.8),
            PotentialField::uniform_b(0.7),
            sol(2.0).apply_gauge(GaugeFunction::PlaneWave {
                amplitude: 0.4,
                wavevector: Vec2::new(1.1, -0.6),
                phase: 0.3,
            }),
        ];
        let h = 1e-6;
        for f in &fields {
            for p in [Vec2::new(1.7, -0.4), Vec2::new(0.2, 0.3), Vec2::new(-2.5, 1.1)] {
                let j = f.grad_a(p).unwrap();
                for col in 0..2 {
                    let mut e = Vec2::zeros();
                    e[col] = h;
                    let fd = (f.eval_a(p + e).unwrap() - f.eval_a(p - e).unwrap()) / (2.0 * h);
                    for row in 0..2 {
                        assert!((j[(row, col)] - fd[row]).abs() < 1e-7, "{f:?} {p}");
                    }
                }
            }
        }
    }

    #[test]
    fn solenoid_is_coulomb_gauge() {
        let f = sol(1.0);
        for p in [Vec2::new(0.3, 0.1), Vec2::new(2.0, -3.0)] {
            assert!(f.divergence_a(p).unwrap().abs() < 1e-15);
        }
        let g = f.apply_gauge(GaugeFunction::Gaussian {
            amplitude: 1.0,
            center: Vec2::zeros(),
            width: 1.0,
        });
        assert!(g.divergence_a(Vec2::new(0.5, 0.0)).unwrap().abs() > 0.1);
    }
}
