use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{ManifoldModel, ProjectivePoint};
use crate::error::{Error, Result};
use crate::numeric::rng;

/// Convex polygon in action coordinates, counter-clockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeModel {
    pub vertices: Vec<(f64, f64)>,
}

impl PolytopeModel {
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        0.5 * (0..n)
            .map(|i| {
                let (x0, y0) = v[i];
                let (x1, y1) = v[(i + 1) % n];
                x0 * y1 - x1 * y0
            })
            .sum::<f64>()
    }

    /// Signed distance to the boundary: positive inside, negative outside.
    pub fn margin(&self, (x, y): (f64, f64)) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        (0..n)
            .map(|i| {
                let (x0, y0) = v[i];
                let (x1, y1) = v[(i + 1) % n];
                let (ex, ey) = (x1 - x0, y1 - y0);
                let len = ex.hypot(ey);
                (ex * (y - y0) - ey * (x - x0)) / len
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y\n");
        for (x, y) in &self.vertices {
            s.push_str(&format!("{x:.17e},{y:.17e}\n"));
        }
        s
    }
}

/// `ρ([z]) = ((π/2)|z₀|²/|z|², (π/2)|z₁|²/|z|²)`.
pub fn moment_map_rho(p: &ProjectivePoint) -> Result<(f64, f64)> {
    if p.len() != 3 {
        return Err(Error::Unsupported("moment map on non-CP² point".into()));
    }
    Ok((FRAC_PI_2 * p.norm_sq(0), FRAC_PI_2 * p.norm_sq(1)))
}

pub fn polytope(m: &ManifoldModel) -> Result<PolytopeModel> {
    match m {
        ManifoldModel::Cp2 => Ok(PolytopeModel { vertices: vec![(0.0, 0.0), (FRAC_PI_2, 0.0), (0.0, FRAC_PI_2)] }),
        ManifoldModel::BlowupCp2 { lambda } => {
            let l2 = lambda * lambda;
            let x = FRAC_PI_2 * (1.0 - l2);
            Ok(PolytopeModel {
                vertices: vec![(0.0, 0.0), (x, 0.0), (x, FRAC_PI_2 * l2), (0.0, FRAC_PI_2)],
            })
        }
        other => Err(Error::Unsupported(format!("polytope of {}", other.label()))),
    }
}

/// Volume in moment-polytope normalization: polytope area for the toric
/// cases, `a` for `D(a)`, multiplicative on products.
pub fn volume(m: &ManifoldModel) -> f64 {
    match m {
        ManifoldModel::Cp2 => PI * PI / 8.0,
        ManifoldModel::BlowupCp2 { lambda } => PI * PI / 8.0 * (1.0 - lambda.powi(4)),
        ManifoldModel::Sphere => FRAC_PI_2,
        ManifoldModel::Disk { area } => *area,
        ManifoldModel::ProductWithDisk { base, disk_area } => volume(base) * disk_area,
    }
}

/// `∫ ωⁿ/n!`, the Liouville volume.
pub fn liouville_volume(m: &ManifoldModel) -> f64 {
    match m {
        ManifoldModel::Cp2 | ManifoldModel::BlowupCp2 { .. } => 4.0 * volume(m),
        ManifoldModel::Sphere => 2.0 * volume(m),
        ManifoldModel::Disk { area } => *area,
        ManifoldModel::ProductWithDisk { base, disk_area } => liouville_volume(base) * disk_area,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
}

fn pfaffian(m: &nalgebra::DMatrix<f64>) -> f64 {
    match m.nrows() {
        2 => m[(0, 1)],
        4 => m[(0, 1)] * m[(2, 3)] - m[(0, 2)] * m[(1, 3)] + m[(0, 3)] * m[(1, 2)],
        _ => m.determinant().abs().sqrt(),
    }
}

/// Monte Carlo estimate of [`volume`] that integrates the Pfaffian of the
/// chart form matrix over chart 0 with a tangent substitution per real
/// coordinate; independent of the polytope formulas.
pub fn monte_carlo_volume(m: &ManifoldModel, samples: usize, seed: u64) -> Result<VolumeEstimate> {
    let (proj, disk_area) = match m {
        ManifoldModel::Disk { area } => {
            return Ok(VolumeEstimate { value: *area, stderr: 0.0, samples });
        }
        ManifoldModel::ProductWithDisk { base, disk_area } => (base.as_ref(), *disk_area),
        other => (other, 1.0),
    };
    let dim = proj.real_dim();
    let lambda_sq = proj.lambda().map(|l| l * l);
    let mut r = rng(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut x = vec![0.0; dim];
    for _ in 0..samples {
        let mut jac = 1.0;
        for xi in x.iter_mut() {
            let theta = PI * (r.gen::<f64>() - 0.5);
            *xi = theta.tan();
            jac *= 1.0 + *xi * *xi;
        }
        let w2: f64 = x.iter().map(|v| v * v).sum();
        let inside = match lambda_sq {
            Some(l2) => w2 / (1.0 + w2) >= l2,
            None => true,
        };
        let f = if inside { pfaffian(&proj.form_matrix(0, &x)) * jac } else { 0.0 };
        sum += f;
        sum_sq += f * f;
    }
    let n = samples as f64;
    let box_volume = PI.powi(dim as i32);
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    let scale = box_volume / 2f64.powi((dim / 2) as i32) * disk_area;
    Ok(VolumeEstimate { value: scale * mean, stderr: scale * (var / n).sqrt(), samples })
}
