//! Product embeddings `(z, u, v) ↦ (base(z), ψ(v, u))` of `B⁶(R)` into the
//! graph regions `R_P^±(ν/2)` over CP² and the blow-up.
//!
//! The disk factor is fed `(v, u)` because the region form is `dt∧ds`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::ball::{complex_pair, i_minus, i_plus};
use super::blowup::{j_jacobian, j_minus};
use super::disk_rect::{DiskRectFamily, DiskRectVariant};
use super::{fd_jacobian, norm_sq, sample_ball, MapPoint, Space, SymplecticMapSpec};
use crate::dynamics::MomentHamiltonian;
use crate::error::{Error, Result};
use crate::geometry::{ManifoldModel, Point, ProjectivePoint};
use crate::numeric::{block_diag, Rng};
use crate::regions::{region_above, region_below, GraphRegion, RegionPoint, Side};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "base", rename_all = "snake_case")]
pub enum BaseMap {
    IMinus,
    IPlus,
    JMinus { lambda: f64 },
}

impl BaseMap {
    pub fn apply(&self, v: &[f64]) -> Result<ProjectivePoint> {
        let (a, b) = complex_pair(v);
        match self {
            BaseMap::IMinus => i_minus(a, b),
            BaseMap::IPlus => i_plus(a, b),
            BaseMap::JMinus { lambda } => j_minus(*lambda, a, b),
        }
    }

    fn label(&self) -> &'static str {
        match self {
            BaseMap::IMinus => "i-",
            BaseMap::IPlus => "i+",
            BaseMap::JMinus { .. } => "j-",
        }
    }
}

#[derive(Clone)]
pub struct ProductEmbedding {
    pub base: BaseMap,
    pub family: DiskRectFamily,
    pub region: Arc<GraphRegion>,
    pub radius: f64,
}

impl std::fmt::Debug for ProductEmbedding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProductEmbedding")
            .field("base", &self.base)
            .field("variant", &self.family.variant)
            .field("radius", &self.radius)
            .field("epsilon", &self.family.epsilon)
            .finish()
    }
}

fn p_region(m: ManifoldModel, side: Side, nu: f64) -> Result<Arc<GraphRegion>> {
    let p = Arc::new(MomentHamiltonian::p(m)?);
    Ok(Arc::new(match side {
        Side::Below => region_below(p, nu)?,
        Side::Above => region_above(p, nu)?,
    }))
}

impl ProductEmbedding {
    fn build(base: BaseMap, variant: DiskRectVariant, m: ManifoldModel, side: Side, eps: f64, nu: f64) -> Result<Self> {
        let radius = variant.scale() * FRAC_1_SQRT_2 - eps;
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument(format!("ε = {eps} leaves no ball")));
        }
        let family = DiskRectFamily::build(variant, radius, eps)?;
        Ok(ProductEmbedding { base, family, region: p_region(m, side, nu)?, radius })
    }

    /// `Ψ⁻ : B⁶(1/√2 − ε) → R_P^−(ν/2)` over CP².
    pub fn psi_minus(eps: f64, nu: f64) -> Result<Self> {
        Self::build(BaseMap::IMinus, DiskRectVariant::MinusCp2, ManifoldModel::Cp2, Side::Below, eps, nu)
    }

    /// `Ψ⁺ : B⁶(1/√2 − ε) → R_P^+(ν/2)` over CP².
    pub fn psi_plus(eps: f64, nu: f64) -> Result<Self> {
        Self::build(BaseMap::IPlus, DiskRectVariant::PlusCp2, ManifoldModel::Cp2, Side::Above, eps, nu)
    }

    /// `Ψ⁺ : B⁶(√((1−λ²)/2) − ε) → R_P^+(ν/2)` over the blow-up.
    pub fn psi_plus_blowup(lambda: f64, eps: f64, nu: f64) -> Result<Self> {
        let m = ManifoldModel::blowup(lambda)?;
        Self::build(BaseMap::IPlus, DiskRectVariant::PlusBlowup { lambda }, m, Side::Above, eps, nu)
    }

    /// `Υ⁻ : B⁶(S) → R_P^−(ν/2)` over the blow-up, `S = √((1−λ²)/2) − ε`.
    pub fn upsilon_minus(lambda: f64, eps: f64, nu: f64) -> Result<Self> {
        let m = ManifoldModel::blowup(lambda)?;
        Self::build(BaseMap::JMinus { lambda }, DiskRectVariant::MinusBlowup { lambda }, m, Side::Below, eps, nu)
    }

    pub fn epsilon(&self) -> f64 {
        self.family.epsilon
    }

    fn split(x: &MapPoint) -> Result<&[f64]> {
        match x.flat() {
            Some(v) if v.len() == 6 => Ok(v),
            _ => Err(Error::InvalidArgument("expected a point of R^6".into())),
        }
    }

    /// Distance of `s` from the graph of `P` on the graph side of the region.
    pub fn graph_margin(&self, y: &MapPoint) -> f64 {
        let Some(q) = y.region() else {
            return f64::NEG_INFINITY;
        };
        let (lo, hi) = self.region.bounds(&q.x, q.t);
        match self.region.side {
            Side::Below => hi - q.s,
            Side::Above => q.s - lo,
        }
    }

    /// `(√2π/2)ε − (π/2)ε²` scaled by `k²`: the smallest graph margin the
    /// construction allows.
    pub fn graph_margin_bound(&self) -> f64 {
        let k = self.family.scale();
        let e = self.epsilon() / k;
        k * k * FRAC_PI_2 * (2f64.sqrt() * e - e * e)
    }
}

impl SymplecticMapSpec for ProductEmbedding {
    fn name(&self) -> String {
        let side = if self.region.side == Side::Below { "-" } else { "+" };
        let head = if matches!(self.base, BaseMap::JMinus { .. }) { "Upsilon" } else { "Psi" };
        format!(
            "{head}{side} = ({} x disk-rect) into R_P^{side} over {} (eps={})",
            self.base.label(),
            self.region.base().label(),
            self.epsilon()
        )
    }

    fn source(&self) -> Space {
        Space::Standard { dim: 6 }
    }

    fn target(&self) -> Space {
        Space::Region { manifold: self.region.base().clone() }
    }

    fn domain(&self) -> String {
        match self.base {
            BaseMap::JMinus { .. } => format!("B^6({}) minus |w0| < {}", self.radius, super::blowup::J_TUBE),
            _ => format!("B^6({})", self.radius),
        }
    }

    fn sample_domain(&self, rng: &mut Rng) -> MapPoint {
        match self.base {
            BaseMap::JMinus { .. } => loop {
                let v = sample_ball(6, self.radius, rng);
                if v[0].hypot(v[1]) >= super::blowup::J_TUBE {
                    return MapPoint::Flat(v);
                }
            },
            _ => MapPoint::Flat(sample_ball(6, self.radius, rng)),
        }
    }

    fn evaluate(&self, x: &MapPoint) -> Result<MapPoint> {
        let v = Self::split(x)?;
        if norm_sq(v) >= self.radius * self.radius {
            return Err(Error::DomainViolation(format!("point outside B^6({})", self.radius)));
        }
        let p = self.base.apply(&v[..4])?;
        let (s, t) = self.family.evaluate(v[5], v[4])?;
        Ok(MapPoint::Region(RegionPoint { x: Point::Projective(p), s, t }))
    }

    fn margin(&self, _x: &MapPoint, y: &MapPoint) -> f64 {
        y.region().map_or(f64::NEG_INFINITY, |q| self.region.margin(q))
    }

    fn ball_radius(&self) -> Option<f64> {
        Some(self.radius)
    }

    /// Block-diagonal: the base map and the disk map are differentiated
    /// separately.
    fn jacobian(&self, x: &MapPoint) -> Result<(usize, usize, DMatrix<f64>)> {
        let v = Self::split(x)?;
        let m = self.region.base().clone();
        let p = Point::Projective(self.base.apply(&v[..4])?);
        let (co, jb) = match self.base {
            BaseMap::JMinus { lambda } => (0, j_jacobian(lambda, &v[..4])?),
            _ => {
                let co = m.best_chart(&p);
                (co, fd_jacobian(&v[..4], 1e-5, |z| m.to_chart(&Point::Projective(self.base.apply(z)?), co))?)
            }
        };
        let jd = fd_jacobian(&v[4..], 1e-5, |w| {
            let (s, t) = self.family.eval_unchecked(w[1], w[0]);
            Ok(vec![s, t])
        })?;
        Ok((0, co, block_diag(&[&jb, &jd])))
    }
}
