use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of CPⁿ stored as a unit vector of homogeneous coordinates whose
/// first non-negligible coordinate is real and positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectivePoint {
    z: Vec<Complex64>,
}

const PHASE_FLOOR: f64 = 1e-12;

impl ProjectivePoint {
    pub fn new(z: Vec<Complex64>) -> Result<Self> {
        let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) || z.len() < 2 {
            return Err(Error::InvalidArgument("homogeneous coordinates must be finite and not all zero".into()));
        }
        let mut z: Vec<Complex64> = z.into_iter().map(|c| c / norm).collect();
        canonicalize(&mut z);
        Ok(ProjectivePoint { z })
    }

    /// Convenience constructor from real homogeneous coordinates.
    pub fn real(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.z
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// `|z_k|²` on the normalized representative.
    pub fn norm_sq(&self, k: usize) -> f64 {
        self.z[k].norm_sqr()
    }

    /// Phase-invariant distance `min_θ ‖z − e^{iθ} w‖`.
    pub fn distance(&self, other: &ProjectivePoint) -> f64 {
        let inner: Complex64 = self.z.iter().zip(&other.z).map(|(a, b)| b.conj() * a).sum();
        let phase = if inner.norm() > 0.0 { inner / inner.norm() } else { Complex64::new(1.0, 0.0) };
        self.z
            .iter()
            .zip(&other.z)
            .map(|(a, b)| (a - phase * b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Multiplies coordinate `k` by `e^{i·angle}`.
    pub fn rotate(&self, k: usize, angle: f64) -> ProjectivePoint {
        let mut z = self.z.clone();
        z[k] *= Complex64::from_polar(1.0, angle);
        canonicalize(&mut z);
        ProjectivePoint { z }
    }
}

fn canonicalize(z: &mut [Complex64]) {
    if let Some(lead) = z.iter().find(|c| c.norm() > PHASE_FLOOR).copied() {
        let phase = lead.conj() / lead.norm();
        for c in z.iter_mut() {
            *c *= phase;
        }
    }
}

/// A point of any supported manifold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Point {
    Projective(ProjectivePoint),
    Disk(Complex64),
    Product(ProjectivePoint, Complex64),
}

impl Point {
    pub fn projective(&self) -> Option<&ProjectivePoint> {
        match self {
            Point::Projective(p) | Point::Product(p, _) => Some(p),
            Point::Disk(_) => None,
        }
    }

    pub fn disk_coord(&self) -> Option<Complex64> {
        match self {
            Point::Disk(z) | Point::Product(_, z) => Some(*z),
            Point::Projective(_) => None,
        }
    }

    /// Flat real vector used for trajectory export: homogeneous coordinates
    /// (re, im interleaved) followed by the disk coordinate.
    pub fn ambient(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if let Some(p) = self.projective() {
            for c in p.coords() {
                out.push(c.re);
                out.push(c.im);
            }
        }
        if let Some(z) = self.disk_coord() {
            out.push(z.re);
            out.push(z.im);
        }
        out
    }
}
