//! Graph regions `R_H^±(ν/2) ⊂ M × R(s) × [0,1](t)`, the glued regions
//! `R_{H,K}(ν)` and quasi-cylinder areas.
//!
//! The form on `M × R × [0,1]` is `Ω = ω ⊕ dt∧ds`; with `i(X)ω = −dH` this
//! is the orientation for which the gluing map `g` is symplectic.

use std::fmt;

use nalgebra::DMatrix;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::dynamics::{flow_to, sampled_extrema, HamiltonianFn};
use crate::error::{Error, Result};
use crate::geometry::{liouville_volume, ManifoldModel, Point, VolumeEstimate};
use crate::numeric::{block_diag, integrate, jacobian_fd4, monte_carlo_mean, pullback_residual, rng, substream};

/// Integration tolerance used when a flow has no closed form.
const FLOW_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub x: Point,
    pub s: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Below,
    Above,
}

/// `H` shifted so that `min_x H_t = 0` for every `t`.
#[derive(Debug, Clone)]
pub struct NormalizedHamiltonian {
    h: HamiltonianFn,
    sampled: Option<(f64, f64)>,
}

impl NormalizedHamiltonian {
    /// Uses analytic extrema when `H` provides them; otherwise (autonomous
    /// `H` only) locates them by refined sampling.
    pub fn new(h: HamiltonianFn, samples: usize, seed: u64) -> Result<Self> {
        if h.extrema(0.0).is_some() {
            return Ok(NormalizedHamiltonian { h, sampled: None });
        }
        if !h.is_autonomous() {
            return Err(Error::NormalizationFailure(format!(
                "{}: per-time minimum of a time-dependent H without analytic extrema",
                h.name()
            )));
        }
        let e = sampled_extrema(h.as_ref(), 0.0, samples, seed);
        if !(e.error <= 1e-6 && e.min.is_finite()) {
            return Err(Error::NormalizationFailure(format!("{}: minimum not located (gain {})", h.name(), e.error)));
        }
        Ok(NormalizedHamiltonian { h, sampled: Some((e.min, e.max)) })
    }

    pub fn raw(&self) -> &HamiltonianFn {
        &self.h
    }

    pub fn manifold(&self) -> &ManifoldModel {
        self.h.manifold()
    }

    fn extrema(&self, t: f64) -> (f64, f64) {
        self.sampled.unwrap_or_else(|| self.h.extrema(t).expect("checked in new"))
    }

    pub fn value(&self, p: &Point, t: f64) -> f64 {
        self.h.value(p, t) - self.extrema(t).0
    }

    /// `max_x H_t − min_x H_t`.
    pub fn oscillation(&self, t: f64) -> f64 {
        let (lo, hi) = self.extrema(t);
        hi - lo
    }

    /// `h_∞ = sup_t max_x` of the normalized function.
    pub fn h_inf(&self) -> f64 {
        if self.h.is_autonomous() {
            return self.oscillation(0.0);
        }
        (0..=1024).map(|i| self.oscillation(i as f64 / 1024.0)).fold(0.0, f64::max) * (1.0 + 1e-9)
    }

    pub fn length(&self) -> f64 {
        if self.h.is_autonomous() {
            return self.oscillation(0.0);
        }
        self.h.analytic_length().unwrap_or_else(|| integrate(|t| self.oscillation(t), 0.0, 1.0, 1e-12))
    }

    pub fn phi(&self, p: &Point, t: f64) -> Result<Point> {
        match self.h.exact_flow(p, t) {
            Some(q) => Ok(q),
            None => flow_to(self.h.as_ref(), p, 0.0, t, FLOW_TOL),
        }
    }

    pub fn phi_inv(&self, p: &Point, t: f64) -> Result<Point> {
        match self.h.exact_flow(p, -t) {
            Some(q) => Ok(q),
            None => flow_to(self.h.as_ref(), p, t, 0.0, FLOW_TOL),
        }
    }
}

/// `R_H^−(ν/2) = {ℓ(t) ≤ s ≤ H_t(x)}` or `R_H^+(ν/2) = {H_t(x) ≤ s ≤ μ_H(t)}`
/// with `ℓ ≡ −ν/2` and `μ_H(t) = max_x H_t + ν/2`.
#[derive(Debug, Clone)]
pub struct GraphRegion {
    pub side: Side,
    pub nu: f64,
    h: NormalizedHamiltonian,
}

impl GraphRegion {
    pub fn new(h: NormalizedHamiltonian, nu: f64, side: Side) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::InvalidArgument(format!("ν must be positive, got {nu}")));
        }
        Ok(GraphRegion { side, nu, h })
    }

    pub fn base(&self) -> &ManifoldModel {
        self.h.manifold()
    }

    pub fn hamiltonian(&self) -> &NormalizedHamiltonian {
        &self.h
    }

    pub fn ell(&self, _t: f64) -> f64 {
        -0.5 * self.nu
    }

    pub fn mu(&self, t: f64) -> f64 {
        self.h.oscillation(t) + 0.5 * self.nu
    }

    pub fn h_inf(&self) -> f64 {
        self.h.h_inf()
    }

    /// `(lower, upper)` bounds of the `s`-fibre over `(x, t)`.
    pub fn bounds(&self, x: &Point, t: f64) -> (f64, f64) {
        let hx = self.h.value(x, t);
        match self.side {
            Side::Below => (self.ell(t), hx),
            Side::Above => (hx, self.mu(t)),
        }
    }

    /// Signed distance to the boundary in the `s` and `t` directions;
    /// `−∞` when the base point is not in `M`.
    pub fn margin(&self, q: &RegionPoint) -> f64 {
        if !self.base().contains(&q.x) {
            return f64::NEG_INFINITY;
        }
        let (lo, hi) = self.bounds(&q.x, q.t);
        (q.s - lo).min(hi - q.s).min(q.t).min(1.0 - q.t)
    }

    pub fn contains(&self, q: &RegionPoint) -> bool {
        self.margin(q) >= 0.0
    }

    /// Liouville volume by rejection sampling in `M × [−ν/2, h_∞ + ν/2] × [0,1]`.
    pub fn monte_carlo_volume(&self, samples: usize, seed: u64) -> VolumeEstimate {
        let top = self.h_inf() + 0.5 * self.nu;
        let bottom = -0.5 * self.nu;
        let m = self.base();
        let (mean, se) = monte_carlo_mean(samples, seed, |r| {
            let x = m.sample(r);
            let t = r.gen::<f64>();
            let s = bottom + (top - bottom) * r.gen::<f64>();
            let (lo, hi) = self.bounds(&x, t);
            f64::from(u8::from(lo <= s && s <= hi))
        });
        let scale = liouville_volume(m) * (top - bottom);
        VolumeEstimate { value: scale * mean, stderr: scale * se, samples }
    }
}

pub fn region_below(h: HamiltonianFn, nu: f64) -> Result<GraphRegion> {
    GraphRegion::new(NormalizedHamiltonian::new(h, 4096, 0)?, nu, Side::Below)
}

pub fn region_above(h: HamiltonianFn, nu: f64) -> Result<GraphRegion> {
    GraphRegion::new(NormalizedHamiltonian::new(h, 4096, 0)?, nu, Side::Above)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FormKind {
    Split,
    Glued { h: String, k: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiCylinder {
    pub base: ManifoldModel,
    pub form_kind: FormKind,
    pub area: f64,
    pub area_stderr: f64,
}

impl QuasiCylinder {
    /// `M × D(a)` with the split form; its area is `a`.
    pub fn split(base: ManifoldModel, disk_area: f64) -> Result<Self> {
        ManifoldModel::disk(disk_area)?;
        Ok(QuasiCylinder { base, form_kind: FormKind::Split, area: disk_area, area_stderr: 0.0 })
    }

    /// `R_H(ν) = R_H^−(ν/2) ∪ R_H^+(ν/2)`, of area `L(H) + ν`.
    pub fn thickened_graph(h: &NormalizedHamiltonian, nu: f64) -> Result<Self> {
        Self::split(h.manifold().clone(), h.length() + nu)
    }

    /// `area · vol(M)`, in Liouville normalization.
    pub fn total_volume(&self) -> f64 {
        self.area * liouville_volume(&self.base)
    }
}

/// Area of the quasi-cylinder `R_H(ν)`: `L(H) + ν`.
pub fn region_area(h: &NormalizedHamiltonian, nu: f64) -> f64 {
    h.length() + nu
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointCheck {
    pub samples: usize,
    pub max_distance: f64,
    pub tolerance: f64,
}

/// `R_{H,K}(ν) = R_H^−(ν/2) ∪ g(R_K^+(ν/2))` with
/// `g(x,s,t) = (φ^H_t (φ^K_t)⁻¹ x, s − K_t(x) + H_t(φ^H_t (φ^K_t)⁻¹ x), t)`.
#[derive(Debug, Clone)]
pub struct GluedRegion {
    h: NormalizedHamiltonian,
    k: NormalizedHamiltonian,
    pub nu: f64,
    pub endpoint: EndpointCheck,
}

pub const ENDPOINT_TOL: f64 = 1e-6;

/// Builds `R_{H,K}(ν)` after checking `φ^H_1 = φ^K_1` on `samples` points.
pub fn glue(h: HamiltonianFn, k: HamiltonianFn, nu: f64, samples: usize, seed: u64) -> Result<GluedRegion> {
    if h.manifold() != k.manifold() {
        return Err(Error::InvalidArgument("H and K live on different manifolds".into()));
    }
    if !(nu > 0.0) {
        return Err(Error::InvalidArgument(format!("ν must be positive, got {nu}")));
    }
    let h = NormalizedHamiltonian::new(h, 4096, seed)?;
    let k = NormalizedHamiltonian::new(k, 4096, seed)?;
    let m = h.manifold().clone();
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = m.sample(&mut r);
        worst = worst.max(m.distance(&h.phi(&x, 1.0)?, &k.phi(&x, 1.0)?));
    }
    if worst > ENDPOINT_TOL {
        return Err(Error::EndpointMismatch { distance: worst, tolerance: ENDPOINT_TOL });
    }
    Ok(GluedRegion { h, k, nu, endpoint: EndpointCheck { samples, max_distance: worst, tolerance: ENDPOINT_TOL } })
}

impl GluedRegion {
    pub fn base(&self) -> &ManifoldModel {
        self.h.manifold()
    }

    pub fn h(&self) -> &NormalizedHamiltonian {
        &self.h
    }

    pub fn k(&self) -> &NormalizedHamiltonian {
        &self.k
    }

    fn mu_k(&self, t: f64) -> f64 {
        self.k.oscillation(t) + 0.5 * self.nu
    }

    /// `φ^H_t ∘ (φ^K_t)⁻¹`.
    pub fn transport(&self, x: &Point, t: f64) -> Result<Point> {
        self.h.phi(&self.k.phi_inv(x, t)?, t)
    }

    pub fn g(&self, q: &RegionPoint) -> Result<RegionPoint> {
        let y = self.transport(&q.x, q.t)?;
        let s = q.s - self.k.value(&q.x, q.t) + self.h.value(&y, q.t);
        Ok(RegionPoint { x: y, s, t: q.t })
    }

    pub fn g_inverse(&self, q: &RegionPoint) -> Result<RegionPoint> {
        let x = self.k.phi(&self.h.phi_inv(&q.x, q.t)?, q.t)?;
        let s = q.s - self.h.value(&q.x, q.t) + self.k.value(&x, q.t);
        Ok(RegionPoint { x, s, t: q.t })
    }

    /// Top of the `s`-fibre of `R_{H,K}(ν)` over `(y, t)`:
    /// `μ_K(t) + H_t(y) − K_t(x)` with `y = φ^H_t (φ^K_t)⁻¹ x`.
    pub fn upper(&self, y: &Point, t: f64) -> Result<f64> {
        let x = self.k.phi(&self.h.phi_inv(y, t)?, t)?;
        Ok(self.mu_k(t) + self.h.value(y, t) - self.k.value(&x, t))
    }

    pub fn contains(&self, q: &RegionPoint) -> Result<bool> {
        if !(0.0..=1.0).contains(&q.t) || !self.base().contains(&q.x) || q.s < -0.5 * self.nu {
            return Ok(false);
        }
        Ok(q.s <= self.upper(&q.x, q.t)?)
    }

    /// Liouville volume by rejection sampling the bounding slab.
    pub fn monte_carlo_volume(&self, samples: usize, seed: u64) -> Result<VolumeEstimate> {
        let bottom = -0.5 * self.nu;
        let top = self.k.h_inf() + self.h.h_inf() + 0.5 * self.nu;
        let m = self.base();
        let (mean, se) = monte_carlo_mean(samples, seed, |r| {
            let y = m.sample(r);
            let t = r.gen::<f64>();
            let s = bottom + (top - bottom) * r.gen::<f64>();
            match self.upper(&y, t) {
                Ok(u) => f64::from(u8::from(s <= u)),
                Err(_) => f64::NAN,
            }
        });
        if !mean.is_finite() {
            return Err(Error::StepFailure { t: f64::NAN });
        }
        let scale = liouville_volume(m) * (top - bottom);
        Ok(VolumeEstimate { value: scale * mean, stderr: scale * se, samples })
    }

    pub fn quasi_cylinder(&self, samples: usize, seed: u64) -> Result<QuasiCylinder> {
        let v = self.monte_carlo_volume(samples, seed)?;
        let lv = liouville_volume(self.base());
        Ok(QuasiCylinder {
            base: self.base().clone(),
            form_kind: FormKind::Glued { h: self.h.raw().name(), k: self.k.raw().name() },
            area: v.value / lv,
            area_stderr: v.stderr / lv,
        })
    }

    /// `g` on `(chart coordinates of x, s, t)` with fixed input and output
    /// charts.
    pub fn g_in_charts(&self, chart_in: usize, chart_out: usize, z: &[f64]) -> Result<Vec<f64>> {
        let n = z.len() - 2;
        let m = self.base();
        let q = RegionPoint { x: m.from_chart(chart_in, &z[..n]), s: z[n], t: z[n + 1] };
        let img = self.g(&q)?;
        let mut out = m.to_chart(&img.x, chart_out)?;
        out.push(img.s);
        out.push(img.t);
        Ok(out)
    }

    /// `‖Jᵀ Ω J − Ω‖_max` for `g` at `q` by fourth-order differences.
    pub fn symplectic_residual(&self, q: &RegionPoint, step: f64) -> Result<f64> {
        let m = self.base();
        let img = self.g(q)?;
        let (ci, co) = (m.best_chart(&q.x), m.best_chart(&img.x));
        let mut z = m.to_chart(&q.x, ci)?;
        z.push(q.s);
        z.push(q.t);
        self.g_in_charts(ci, co, &z)?;
        let jac = jacobian_fd4(|v| self.g_in_charts(ci, co, v).unwrap_or_else(|_| vec![f64::NAN; v.len()]), &z, step);
        let n = z.len() - 2;
        let w = img_coords(m, &img, co)?;
        let target = extended_form(m, co, &w[..n]);
        let source = extended_form(m, ci, &z[..n]);
        Ok(pullback_residual(&jac, &target, &source))
    }
}

fn img_coords(m: &ManifoldModel, q: &RegionPoint, chart: usize) -> Result<Vec<f64>> {
    m.to_chart(&q.x, chart)
}

/// Matrix of `ω ⊕ dt∧ds` in coordinates `(chart coords, s, t)`.
pub fn extended_form(m: &ManifoldModel, chart: usize, coords: &[f64]) -> DMatrix<f64> {
    let st = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    block_diag(&[&m.form_matrix(chart, coords), &st])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    pub length: f64,
    pub nu: f64,
    pub area: f64,
    pub volume: f64,
    pub stderr: f64,
}

impl fmt::Display for RegionSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serde_json::to_string(self).map_err(|_| fmt::Error)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluingVolumeReport {
    pub length_h: f64,
    pub length_k: f64,
    pub nu: f64,
    pub area_hk: f64,
    pub area_kh: f64,
    /// `vol R_{H,K}(ν) + vol R_{K,H}(ν)` (Monte Carlo).
    pub lhs: f64,
    pub lhs_stderr: f64,
    /// `vol R_H(ν) + vol R_K(ν)` (analytic).
    pub rhs: f64,
    pub sigmas: f64,
    pub identity_holds: bool,
    /// Present when `L(K) + 2ν < L(H)`: whether `min(area) < L(H)`.
    pub smaller_area_below_length: Option<bool>,
}

/// Checks `vol R_{H,K} + vol R_{K,H} = vol R_H + vol R_K` within three
/// standard errors.
pub fn gluing_volume_identity(h: HamiltonianFn, k: HamiltonianFn, nu: f64, samples: usize, seed: u64) -> Result<GluingVolumeReport> {
    let hk = glue(h.clone(), k.clone(), nu, 1000, seed)?;
    let kh = glue(k, h, nu, 1000, seed)?;
    let lv = liouville_volume(hk.base());
    let a = hk.monte_carlo_volume(samples, substream(seed, 1).gen())?;
    let b = kh.monte_carlo_volume(samples, substream(seed, 2).gen())?;
    let (lh, lk) = (hk.h.length(), hk.k.length());
    let rhs = lv * (lh + nu + lk + nu);
    let lhs = a.value + b.value;
    let lhs_stderr = a.stderr.hypot(b.stderr);
    let sigmas = (lhs - rhs).abs() / lhs_stderr.max(f64::MIN_POSITIVE);
    let (area_hk, area_kh) = (a.value / lv, b.value / lv);
    Ok(GluingVolumeReport {
        length_h: lh,
        length_k: lk,
        nu,
        area_hk,
        area_kh,
        lhs,
        lhs_stderr,
        rhs,
        sigmas,
        identity_holds: sigmas <= 3.0,
        smaller_area_below_length: (lk + 2.0 * nu < lh).then(|| area_hk.min(area_kh) < lh),
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};
    use std::sync::Arc;

    use super::*;
    use crate::dynamics::{MomentHamiltonian, Reparametrized};
    use crate::geometry::ProjectivePoint;

    fn p() -> HamiltonianFn {
        Arc::new(MomentHamiltonian::p(ManifoldModel::Cp2).unwrap())
    }

    #[test]
    fn membership_below_p() {
        let r = region_below(p(), 0.2).unwrap();
        let x = Point::Projective(ProjectivePoint::real(&[1.0, 0.0, 0.0]).unwrap());
        assert!(r.contains(&RegionPoint { x: x.clone(), s: PI / 4.0, t: 0.3 }));
        assert!(r.contains(&RegionPoint { x: x.clone(), s: -0.1, t: 0.3 }));
        assert!(!r.contains(&RegionPoint { x, s: -0.11, t: 0.3 }));
    }

    #[test]
    fn zero_hamiltonian_gives_slab() {
        let zero: HamiltonianFn = Arc::new(MomentHamiltonian::new(ManifoldModel::Cp2, vec![0.0; 3], "0").unwrap());
        let r = region_below(zero, 0.4).unwrap();
        let v = r.monte_carlo_volume(10_000, 1);
        assert!((v.value - 0.2 * liouville_volume(&ManifoldModel::Cp2)).abs() < 3.0 * v.stderr);
    }

    #[test]
    fn thickened_graph_area() {
        let h = NormalizedHamiltonian::new(p(), 10, 0).unwrap();
        let q = QuasiCylinder::thickened_graph(&h, 0.1).unwrap();
        assert_eq!(q.area, FRAC_PI_2 + 0.1);
        assert_eq!(QuasiCylinder::split(ManifoldModel::Cp2, 1.0).unwrap().area, 1.0);
    }

    #[test]
    fn self_gluing_is_identity() {
        let g = glue(p(), p(), 0.1, 50, 3).unwrap();
        let mut r = rng(4);
        for _ in 0..20 {
            let x = ManifoldModel::Cp2.sample(&mut r);
            let q = RegionPoint { x: x.clone(), s: 0.3, t: 0.6 };
            let img = g.g(&q).unwrap();
            assert!(ManifoldModel::Cp2.distance(&img.x, &x) < 1e-14 && (img.s - 0.3).abs() < 1e-14);
        }
    }

    #[test]
    fn mismatched_endpoints_rejected() {
        let q: HamiltonianFn = Arc::new(MomentHamiltonian::q(ManifoldModel::Cp2).unwrap());
        assert!(matches!(glue(p(), q, 0.1, 20, 0), Err(Error::EndpointMismatch { .. })));
    }

    #[test]
    fn reparametrized_gluing_is_symplectic_and_maps_graphs() {
        let k: HamiltonianFn = Arc::new(Reparametrized::new(p(), 0.5).unwrap());
        let g = glue(p(), k.clone(), 0.1, 100, 5).unwrap();
        let mut r = rng(6);
        for _ in 0..30 {
            let x = ManifoldModel::Cp2.sample(&mut r);
            let t: f64 = r.gen();
            let q = RegionPoint { x: x.clone(), s: g.k().value(&x, t), t };
            let img = g.g(&q).unwrap();
            assert!((img.s - g.h().value(&img.x, t)).abs() < 1e-12);
            let q = RegionPoint { x, s: 0.2, t: t.clamp(0.05, 0.95) };
            let res = g.symplectic_residual(&q, 1e-4).unwrap();
            assert!(res < 1e-5, "residual {res}");
        }
    }
}
