use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{norm_sq, sample_ball, MapPoint, Space, SymplecticMapSpec};
use crate::error::{Error, Result};
use crate::geometry::{ManifoldModel, Point, ProjectivePoint};
use crate::numeric::Rng;

fn ball_root(z1: Complex64, z2: Complex64) -> Result<f64> {
    let r2 = z1.norm_sqr() + z2.norm_sqr();
    if !(r2 < 1.0) {
        return Err(Error::DomainViolation(format!("|z1|^2 + |z2|^2 = {r2} is not below 1")));
    }
    Ok((1.0 - r2).sqrt())
}

/// `[√(1 − |z₁|² − |z₂|²) : z₁ : z₂]`.
pub fn i_minus(z1: Complex64, z2: Complex64) -> Result<ProjectivePoint> {
    let c = ball_root(z1, z2)?;
    ProjectivePoint::new(vec![Complex64::new(c, 0.0), z1, z2])
}

/// `[z₁ : √(1 − |z₁|² − |z₂|²) : z₂]`.
pub fn i_plus(z1: Complex64, z2: Complex64) -> Result<ProjectivePoint> {
    let c = ball_root(z1, z2)?;
    ProjectivePoint::new(vec![z1, Complex64::new(c, 0.0), z2])
}

pub(crate) fn complex_pair(v: &[f64]) -> (Complex64, Complex64) {
    (Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallSide {
    Minus,
    Plus,
}

/// `i^±` restricted to `B⁴(radius)`, into CP² or (plus side) the blow-up.
#[derive(Debug, Clone, PartialEq)]
pub struct BallEmbedding {
    pub side: BallSide,
    pub radius: f64,
    pub manifold: ManifoldModel,
}

impl BallEmbedding {
    pub fn new(side: BallSide, radius: f64, manifold: ManifoldModel) -> Result<Self> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::InvalidArgument(format!("ball radius must lie in (0, 1), got {radius}")));
        }
        match (&manifold, side) {
            (ManifoldModel::Cp2, _) => {}
            (ManifoldModel::BlowupCp2 { lambda }, BallSide::Plus) => {
                // Every image point has |z₀|² ≤ radius², so it stays off the removed ball.
                if radius * radius > 1.0 - lambda * lambda {
                    return Err(Error::InvalidArgument(format!(
                        "i+ into the blow-up needs radius^2 <= 1 - lambda^2, got {radius}"
                    )));
                }
            }
            _ => return Err(Error::Unsupported(format!("i{:?} into {}", side, manifold.label()))),
        }
        Ok(BallEmbedding { side, radius, manifold })
    }

    fn apply(&self, v: &[f64]) -> Result<ProjectivePoint> {
        let (z1, z2) = complex_pair(v);
        match self.side {
            BallSide::Minus => i_minus(z1, z2),
            BallSide::Plus => i_plus(z1, z2),
        }
    }
}

impl SymplecticMapSpec for BallEmbedding {
    fn name(&self) -> String {
        let s = if self.side == BallSide::Minus { "i-" } else { "i+" };
        format!("{s} into {}", self.manifold.label())
    }

    fn source(&self) -> Space {
        Space::Standard { dim: 4 }
    }

    fn target(&self) -> Space {
        Space::Manifold { manifold: self.manifold.clone() }
    }

    fn domain(&self) -> String {
        format!("B^4({})", self.radius)
    }

    fn sample_domain(&self, rng: &mut Rng) -> MapPoint {
        MapPoint::Flat(sample_ball(4, self.radius, rng))
    }

    fn evaluate(&self, x: &MapPoint) -> Result<MapPoint> {
        let v = x.flat().ok_or_else(|| Error::InvalidArgument("expected a point of R^4".into()))?;
        if norm_sq(v) >= self.radius * self.radius {
            return Err(Error::DomainViolation(format!("point outside B^4({})", self.radius)));
        }
        Ok(MapPoint::Manifold(Point::Projective(self.apply(v)?)))
    }

    fn evaluate_extended(&self, x: &MapPoint) -> Result<MapPoint> {
        let v = x.flat().ok_or_else(|| Error::InvalidArgument("expected a point of R^4".into()))?;
        Ok(MapPoint::Manifold(Point::Projective(self.apply(v)?)))
    }

    fn margin(&self, _x: &MapPoint, y: &MapPoint) -> f64 {
        let Some(Point::Projective(q)) = y.manifold() else {
            return f64::NEG_INFINITY;
        };
        match self.manifold {
            ManifoldModel::BlowupCp2 { lambda } => q.norm_sq(1) + q.norm_sq(2) - lambda * lambda,
            // The image lies in the affine chart of the square-root coordinate.
            _ => q.norm_sq(if self.side == BallSide::Minus { 0 } else { 1 }),
        }
    }

    fn ball_radius(&self) -> Option<f64> {
        Some(self.radius)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;
    use crate::embeddings::verify_map;
    use crate::geometry::moment_map_rho;
    use crate::numeric::rng;

    #[test]
    fn i_minus_centre_and_moment_image() {
        let p = i_minus(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(p.coords()[0], Complex64::new(1.0, 0.0));
        let mut r = rng(7);
        for _ in 0..100 {
            let v = sample_ball(4, 0.99, &mut r);
            let (z1, z2) = complex_pair(&v);
            let (a, b) = moment_map_rho(&i_minus(z1, z2).unwrap()).unwrap();
            let n = norm_sq(&v);
            assert!((a - FRAC_PI_2 * (1.0 - n)).abs() < 1e-14);
            assert!((b - FRAC_PI_2 * z1.norm_sqr()).abs() < 1e-14);
        }
    }

    #[test]
    fn domain_violation_at_unit_sphere() {
        assert!(matches!(i_plus(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)), Err(Error::DomainViolation(_))));
    }

    #[test]
    fn both_sides_verify() {
        for side in [BallSide::Minus, BallSide::Plus] {
            let m = BallEmbedding::new(side, 0.9, ManifoldModel::Cp2).unwrap();
            let rec = verify_map(&m, 1000, 1e-6, 11);
            assert!(rec.pass, "{rec:?}");
        }
        let b = BallEmbedding::new(BallSide::Plus, 0.6, ManifoldModel::blowup(0.5).unwrap()).unwrap();
        assert!(verify_map(&b, 500, 1e-6, 12).pass);
    }
}
