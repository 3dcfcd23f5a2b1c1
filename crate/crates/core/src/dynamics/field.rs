use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::Hamiltonian;
use crate::error::{Error, Result};
use crate::geometry::Point;

/// `X^H` at a point, in chart coordinates, with the residual of
/// `ω(X, ·) + dH = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorField {
    pub chart: usize,
    pub coords: Vec<f64>,
    pub vector: Vec<f64>,
    pub residual: f64,
}

impl VectorField {
    pub fn norm(&self) -> f64 {
        self.vector.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Solves `i(X)ω = −dH`, i.e. `M X = dH` for the chart form matrix `M`.
pub(crate) fn chart_field(h: &dyn Hamiltonian, chart: usize, coords: &[f64], t: f64) -> Result<(Vec<f64>, f64)> {
    let m = h.manifold().form_matrix(chart, coords);
    let dh = DVector::from_vec(h.chart_differential(chart, coords, t));
    let x = m.clone().lu().solve(&dh).ok_or(Error::SingularForm)?;
    let residual = (m.transpose() * &x + &dh).amax();
    Ok((x.as_slice().to_vec(), residual))
}

pub fn hamiltonian_vector_field(h: &dyn Hamiltonian, p: &Point, t: f64) -> Result<VectorField> {
    hamiltonian_vector_field_in(h, p, h.manifold().best_chart(p), t)
}

pub fn hamiltonian_vector_field_in(h: &dyn Hamiltonian, p: &Point, chart: usize, t: f64) -> Result<VectorField> {
    let coords = h.manifold().to_chart(p, chart)?;
    let (vector, residual) = chart_field(h, chart, &coords, t)?;
    Ok(VectorField { chart, coords, vector, residual })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::dynamics::{MomentHamiltonian, RadialBump};
    use crate::geometry::{ManifoldModel, ProjectivePoint};
    use crate::numeric::rng;

    #[test]
    fn p_vanishes_on_fixed_sphere() {
        let h = MomentHamiltonian::p(ManifoldModel::Cp2).unwrap();
        let p = Point::Projective(ProjectivePoint::real(&[0.0, 0.6, 0.8]).unwrap());
        let x = hamiltonian_vector_field(&h, &p, 0.0).unwrap();
        assert!(x.norm() < 1e-15);
    }

    #[test]
    fn p_field_is_derivative_of_rotation() {
        let h = MomentHamiltonian::p(ManifoldModel::Cp2).unwrap();
        let p = Point::Projective(ProjectivePoint::real(&[1.0, 1.0, 0.0]).unwrap());
        let x = hamiltonian_vector_field_in(&h, &p, 1, 0.0).unwrap();
        // chart {z₁ ≠ 0}: w₀ = e^{iπt}, w₂ = 0
        let expect = [0.0, PI, 0.0, 0.0];
        for (a, b) in x.vector.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(x.residual < 1e-10);
    }

    #[test]
    fn constant_has_zero_field_and_small_residuals() {
        let m = ManifoldModel::Cp2;
        let c = MomentHamiltonian::new(m.clone(), vec![0.7, 0.7, 0.7], "c").unwrap();
        let h = MomentHamiltonian::new(m.clone(), vec![1.0, -2.0, 0.5], "h").unwrap();
        let mut r = rng(4);
        for _ in 0..200 {
            let p = m.sample(&mut r);
            assert!(hamiltonian_vector_field(&c, &p, 0.0).unwrap().norm() < 1e-14);
            assert!(hamiltonian_vector_field(&h, &p, 0.0).unwrap().residual <= 1e-10);
        }
    }

    #[test]
    fn bump_rotates_disk_at_rate_two_pi_slope() {
        let b = RadialBump::standard(ManifoldModel::disk(1.0).unwrap(), 0.9).unwrap();
        let z = (0.5 / PI).sqrt();
        let x = hamiltonian_vector_field(&b, &Point::Disk(num_complex::Complex64::new(z, 0.0)), 0.0).unwrap();
        assert!((x.vector[1] - 2.0 * PI * 0.9 * z).abs() < 1e-12 && x.vector[0].abs() < 1e-15);
    }
}
