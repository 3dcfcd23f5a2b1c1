//! Toric models: CP², its one-point blow-up, CP¹, disks and products with
//! a disk, together with charts, symplectic form matrices, the moment map
//! and moment polytopes.

mod chart;
mod point;
mod polytope;

pub use chart::{chart_transition, chart_transition_jacobian, symplectic_form_matrix, symplectic_form_matrix_in};
pub use point::{Point, ProjectivePoint};
pub use polytope::{
    liouville_volume, moment_map_rho, monte_carlo_volume, polytope, volume, PolytopeModel, VolumeEstimate,
};

use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Rng;

/// Width of the tube around collapsed loci that random sampling avoids.
pub const COLLAPSE_TUBE: f64 = 1e-8;

/// Tolerance for point equality on normalized homogeneous coordinates.
pub const POINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ManifoldModel {
    Cp2,
    /// CP² with the open ball `|z₁|²+|z₂|² < λ²` (normalized coordinates)
    /// around `[1:0:0]` removed and its boundary collapsed along Hopf fibres.
    BlowupCp2 { lambda: f64 },
    /// CP¹ with area π.
    Sphere,
    /// Open disk of area `area`, centred at the origin of C.
    Disk { area: f64 },
    ProductWithDisk { base: Box<ManifoldModel>, disk_area: f64 },
}

impl ManifoldModel {
    pub fn cp2() -> Self {
        ManifoldModel::Cp2
    }

    pub fn blowup(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidManifold(format!("blow-up needs 0 < λ < 1, got {lambda}")));
        }
        Ok(ManifoldModel::BlowupCp2 { lambda })
    }

    pub fn disk(area: f64) -> Result<Self> {
        if !(area > 0.0 && area.is_finite()) {
            return Err(Error::InvalidManifold(format!("disk area must be positive, got {area}")));
        }
        Ok(ManifoldModel::Disk { area })
    }

    pub fn product(base: ManifoldModel, disk_area: f64) -> Result<Self> {
        if base.projective_len().is_none() {
            return Err(Error::InvalidManifold("product base must be CP², its blow-up or CP¹".into()));
        }
        ManifoldModel::disk(disk_area)?;
        Ok(ManifoldModel::ProductWithDisk { base: Box::new(base), disk_area })
    }

    /// Number of homogeneous coordinates of the projective factor, if any.
    pub fn projective_len(&self) -> Option<usize> {
        match self {
            ManifoldModel::Cp2 | ManifoldModel::BlowupCp2 { .. } => Some(3),
            ManifoldModel::Sphere => Some(2),
            ManifoldModel::Disk { .. } => None,
            ManifoldModel::ProductWithDisk { base, .. } => base.projective_len(),
        }
    }

    pub fn real_dim(&self) -> usize {
        match self {
            ManifoldModel::Cp2 | ManifoldModel::BlowupCp2 { .. } => 4,
            ManifoldModel::Sphere | ManifoldModel::Disk { .. } => 2,
            ManifoldModel::ProductWithDisk { base, .. } => base.real_dim() + 2,
        }
    }

    pub fn lambda(&self) -> Option<f64> {
        match self {
            ManifoldModel::BlowupCp2 { lambda } => Some(*lambda),
            ManifoldModel::ProductWithDisk { base, .. } => base.lambda(),
            _ => None,
        }
    }

    pub fn is_compact(&self) -> bool {
        !matches!(self, ManifoldModel::Disk { .. } | ManifoldModel::ProductWithDisk { .. })
    }

    pub fn label(&self) -> String {
        match self {
            ManifoldModel::Cp2 => "CP2".into(),
            ManifoldModel::BlowupCp2 { lambda } => format!("blowup(lambda={lambda})"),
            ManifoldModel::Sphere => "CP1".into(),
            ManifoldModel::Disk { area } => format!("D({area})"),
            ManifoldModel::ProductWithDisk { base, disk_area } => format!("{} x D({disk_area})", base.label()),
        }
    }

    fn disk_radius(area: f64) -> f64 {
        (area / std::f64::consts::PI).sqrt()
    }

    /// Membership test; collapsed loci count as members.
    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (ManifoldModel::Cp2, Point::Projective(q)) => q.len() == 3,
            (ManifoldModel::BlowupCp2 { lambda }, Point::Projective(q)) => {
                q.len() == 3 && q.norm_sq(1) + q.norm_sq(2) >= lambda * lambda - 1e-12
            }
            (ManifoldModel::Sphere, Point::Projective(q)) => q.len() == 2,
            (ManifoldModel::Disk { area }, Point::Disk(z)) => std::f64::consts::PI * z.norm_sqr() <= *area + 1e-12,
            (ManifoldModel::ProductWithDisk { base, disk_area }, Point::Product(q, z)) => {
                base.contains(&Point::Projective(q.clone()))
                    && std::f64::consts::PI * z.norm_sqr() <= *disk_area + 1e-12
            }
            _ => false,
        }
    }

    /// Draws a point uniformly with respect to the Liouville measure.
    pub fn sample(&self, rng: &mut Rng) -> Point {
        match self {
            ManifoldModel::Cp2 => Point::Projective(gaussian_projective(3, rng)),
            ManifoldModel::Sphere => Point::Projective(gaussian_projective(2, rng)),
            ManifoldModel::BlowupCp2 { lambda } => Point::Projective(sample_blowup(*lambda, rng)),
            ManifoldModel::Disk { area } => Point::Disk(sample_disk(*area, rng)),
            ManifoldModel::ProductWithDisk { base, disk_area } => match base.sample(rng) {
                Point::Projective(q) => Point::Product(q, sample_disk(*disk_area, rng)),
                _ => unreachable!("product base is projective"),
            },
        }
    }

    /// Distance between two points: phase-invariant Euclidean distance on
    /// normalized homogeneous coordinates, plus Euclidean distance on disk
    /// factors.
    pub fn distance(&self, a: &Point, b: &Point) -> f64 {
        match (a, b) {
            (Point::Projective(p), Point::Projective(q)) => p.distance(q),
            (Point::Disk(z), Point::Disk(w)) => (z - w).norm(),
            (Point::Product(p, z), Point::Product(q, w)) => p.distance(q).hypot((z - w).norm()),
            _ => f64::INFINITY,
        }
    }
}

pub(crate) fn gaussian_projective(n: usize, rng: &mut Rng) -> ProjectivePoint {
    loop {
        let z: Vec<Complex64> = (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im)
            })
            .collect();
        if let Ok(p) = ProjectivePoint::new(z) {
            return p;
        }
    }
}

fn sample_blowup(lambda: f64, rng: &mut Rng) -> ProjectivePoint {
    let floor = lambda * lambda + COLLAPSE_TUBE;
    loop {
        let p = gaussian_projective(3, rng);
        if p.norm_sq(1) + p.norm_sq(2) >= floor {
            return p;
        }
    }
}

fn sample_disk(area: f64, rng: &mut Rng) -> Complex64 {
    let radius = ManifoldModel::disk_radius(area);
    let r = radius * rng.gen::<f64>().sqrt();
    let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    Complex64::from_polar(r, theta)
}
