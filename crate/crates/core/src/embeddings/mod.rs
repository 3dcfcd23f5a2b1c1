//! Explicit symplectic embeddings and their numerical verification: pullback
//! residual `JᵀΩJ − ω` at random probes, containment margins and a pairwise
//! injectivity check.

pub mod ball;
pub mod blowup;
pub mod disk_rect;
pub mod psi;

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ManifoldModel, Point};
use crate::numeric::{jacobian_fd4, pullback_residual, standard_form, substream, Rng};
use crate::regions::{extended_form, RegionPoint};

pub use ball::{i_minus, i_plus, BallEmbedding, BallSide};
pub use blowup::{j_minus, BlowupChain, ChainStage, ChainStep, JMinus};
pub use disk_rect::{DiskRectFamily, DiskRectVariant, Rect};
pub use psi::{BaseMap, ProductEmbedding};

/// Spaces maps go between. `Standard` is `R^{2n}` with `Σ dx_k∧dy_k`;
/// `Region` is `M × R(s) × [0,1](t)` with `ω ⊕ dt∧ds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "snake_case")]
pub enum Space {
    Standard { dim: usize },
    Manifold { manifold: ManifoldModel },
    Region { manifold: ManifoldModel },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapPoint {
    Flat(Vec<f64>),
    Manifold(Point),
    Region(RegionPoint),
}

impl MapPoint {
    pub fn flat(&self) -> Option<&[f64]> {
        match self {
            MapPoint::Flat(v) => Some(v),
            _ => None,
        }
    }

    pub fn region(&self) -> Option<&RegionPoint> {
        match self {
            MapPoint::Region(q) => Some(q),
            _ => None,
        }
    }

    pub fn manifold(&self) -> Option<&Point> {
        match self {
            MapPoint::Manifold(p) => Some(p),
            _ => None,
        }
    }
}

fn wrong_kind(space: &Space) -> Error {
    Error::InvalidArgument(format!("point does not belong to {}", space.label()))
}

impl Space {
    pub fn label(&self) -> String {
        match self {
            Space::Standard { dim } => format!("R^{dim}"),
            Space::Manifold { manifold } => manifold.label(),
            Space::Region { manifold } => format!("{} x R x [0,1]", manifold.label()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Space::Standard { dim } => *dim,
            Space::Manifold { manifold } => manifold.real_dim(),
            Space::Region { manifold } => manifold.real_dim() + 2,
        }
    }

    pub fn chart_of(&self, p: &MapPoint) -> usize {
        match (self, p) {
            (Space::Manifold { manifold }, MapPoint::Manifold(x)) => manifold.best_chart(x),
            (Space::Region { manifold }, MapPoint::Region(q)) => manifold.best_chart(&q.x),
            _ => 0,
        }
    }

    pub fn coords(&self, p: &MapPoint, chart: usize) -> Result<Vec<f64>> {
        match (self, p) {
            (Space::Standard { dim }, MapPoint::Flat(v)) if v.len() == *dim => Ok(v.clone()),
            (Space::Manifold { manifold }, MapPoint::Manifold(x)) => manifold.to_chart(x, chart),
            (Space::Region { manifold }, MapPoint::Region(q)) => {
                let mut c = manifold.to_chart(&q.x, chart)?;
                c.push(q.s);
                c.push(q.t);
                Ok(c)
            }
            _ => Err(wrong_kind(self)),
        }
    }

    pub fn point(&self, chart: usize, coords: &[f64]) -> MapPoint {
        match self {
            Space::Standard { .. } => MapPoint::Flat(coords.to_vec()),
            Space::Manifold { manifold } => MapPoint::Manifold(manifold.from_chart(chart, coords)),
            Space::Region { manifold } => {
                let n = coords.len() - 2;
                MapPoint::Region(RegionPoint {
                    x: manifold.from_chart(chart, &coords[..n]),
                    s: coords[n],
                    t: coords[n + 1],
                })
            }
        }
    }

    pub fn form(&self, chart: usize, coords: &[f64]) -> DMatrix<f64> {
        match self {
            Space::Standard { dim } => standard_form(*dim),
            Space::Manifold { manifold } => manifold.form_matrix(chart, coords),
            Space::Region { manifold } => extended_form(manifold, chart, &coords[..coords.len() - 2]),
        }
    }

    pub fn distance(&self, a: &MapPoint, b: &MapPoint) -> f64 {
        match (self, a, b) {
            (Space::Standard { .. }, MapPoint::Flat(x), MapPoint::Flat(y)) => {
                x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
            }
            (Space::Manifold { manifold }, MapPoint::Manifold(x), MapPoint::Manifold(y)) => manifold.distance(x, y),
            (Space::Region { manifold }, MapPoint::Region(p), MapPoint::Region(q)) => {
                manifold.distance(&p.x, &q.x).hypot((p.s - q.s).hypot(p.t - q.t))
            }
            _ => f64::INFINITY,
        }
    }
}

/// An explicit map with a sampled domain, an evaluator and a containment
/// margin (non-negative inside the target set).
pub trait SymplecticMapSpec: Send + Sync {
    fn name(&self) -> String;
    fn source(&self) -> Space;
    fn target(&self) -> Space;
    /// Human-readable description of the domain.
    fn domain(&self) -> String;
    /// Draws a probe from the open domain.
    fn sample_domain(&self, rng: &mut Rng) -> MapPoint;
    fn evaluate(&self, x: &MapPoint) -> Result<MapPoint>;
    fn margin(&self, x: &MapPoint, y: &MapPoint) -> f64;

    fn fd_step(&self, _x: &MapPoint) -> f64 {
        1e-5
    }

    /// Radius of the ball the domain is, when it is one.
    fn ball_radius(&self) -> Option<f64> {
        None
    }

    /// Evaluation used by finite-difference stencils, which may reach just
    /// past the domain boundary. Maps whose formula extends override it.
    fn evaluate_extended(&self, x: &MapPoint) -> Result<MapPoint> {
        self.evaluate(x)
    }

    /// Jacobian in the best charts at `x` and at its image; returns
    /// `(source chart, target chart, J)`.
    fn jacobian(&self, x: &MapPoint) -> Result<(usize, usize, DMatrix<f64>)> {
        let (src, tgt) = (self.source(), self.target());
        let ci = src.chart_of(x);
        let y = self.evaluate(x)?;
        let co = tgt.chart_of(&y);
        let c = src.coords(x, ci)?;
        let jac = fd_jacobian(&c, self.fd_step(x), |z| {
            let img = self.evaluate_extended(&src.point(ci, z))?;
            tgt.coords(&img, co)
        })?;
        Ok((ci, co, jac))
    }
}

/// Fourth-order finite-difference Jacobian of a fallible map.
pub(crate) fn fd_jacobian<F>(x: &[f64], h: f64, f: F) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let failure = std::sync::Mutex::new(None);
    let n_out = f(x)?.len();
    let jac = jacobian_fd4(
        |z| match f(z) {
            Ok(v) => v,
            Err(e) => {
                *failure.lock().expect("unpoisoned") = Some(e);
                vec![f64::NAN; n_out]
            }
        },
        x,
        h,
    );
    match failure.into_inner().expect("unpoisoned") {
        Some(e) => Err(e),
        None => Ok(jac),
    }
}

/// `|JᵀΩ_target J − ω_source|_max` at `x`.
pub fn pullback_residual_at(map: &dyn SymplecticMapSpec, x: &MapPoint) -> Result<f64> {
    let (ci, co, jac) = map.jacobian(x)?;
    let (src, tgt) = (map.source(), map.target());
    let y = map.evaluate(x)?;
    let omega_src = src.form(ci, &src.coords(x, ci)?);
    let omega_tgt = tgt.form(co, &tgt.coords(&y, co)?);
    Ok(pullback_residual(&jac, &omega_tgt, &omega_src))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub map: String,
    pub domain: String,
    pub target: String,
    pub probes: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub pullback_residual_max: f64,
    pub containment_margin_min: f64,
    /// Probes whose evaluation or Jacobian raised an error.
    pub failures: usize,
    pub failure_example: Option<String>,
    pub injectivity_pairs: usize,
    /// Smallest image distance over probe pairs at source distance ≥ 1e-3.
    pub min_image_separation: f64,
    pub injective: bool,
    pub ball_radius: Option<f64>,
    pub pass: bool,
}

impl VerificationRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }
}

const INJECTIVITY_PROBES: usize = 300;
const INJECTIVITY_SOURCE_SEP: f64 = 1e-3;
const INJECTIVITY_IMAGE_SEP: f64 = 1e-9;

struct Probe {
    x: MapPoint,
    y: Option<MapPoint>,
    residual: f64,
    margin: f64,
    error: Option<String>,
}

/// Evaluates `map` at `probes` domain samples (probe `i` drawn from substream
/// `i` of `seed`). PASS iff every probe evaluates, the residual is at most
/// `tol`, every margin is non-negative and no probe pair collides.
pub fn verify_map(map: &dyn SymplecticMapSpec, probes: usize, tol: f64, seed: u64) -> VerificationRecord {
    let results: Vec<Probe> = (0..probes)
        .into_par_iter()
        .map(|i| {
            let x = map.sample_domain(&mut substream(seed, i as u64));
            let out = map.evaluate(&x).and_then(|y| {
                let res = pullback_residual_at(map, &x)?;
                let margin = map.margin(&x, &y);
                Ok((y, res, margin))
            });
            match out {
                Ok((y, residual, margin)) => Probe { x, y: Some(y), residual, margin, error: None },
                Err(e) => Probe { x, y: None, residual: f64::NAN, margin: f64::NAN, error: Some(e.to_string()) },
            }
        })
        .collect();
    let failures = results.iter().filter(|p| p.error.is_some()).count();
    let failure_example = results.iter().find_map(|p| p.error.clone());
    let ok: Vec<&Probe> = results.iter().filter(|p| p.error.is_none()).collect();
    let residual = ok.iter().map(|p| p.residual).fold(0.0, f64::max);
    let margin = ok.iter().map(|p| p.margin).fold(f64::INFINITY, f64::min);
    let (src, tgt) = (map.source(), map.target());
    let sub: Vec<&&Probe> = ok.iter().take(INJECTIVITY_PROBES).collect();
    let mut pairs = 0;
    let mut sep = f64::INFINITY;
    for i in 0..sub.len() {
        for j in i + 1..sub.len() {
            if src.distance(&sub[i].x, &sub[j].x) < INJECTIVITY_SOURCE_SEP {
                continue;
            }
            pairs += 1;
            let (a, b) = (sub[i].y.as_ref().expect("ok probe"), sub[j].y.as_ref().expect("ok probe"));
            sep = sep.min(tgt.distance(a, b));
        }
    }
    let injective = sep > INJECTIVITY_IMAGE_SEP;
    let pass = failures == 0 && !ok.is_empty() && residual <= tol && margin >= 0.0 && injective;
    VerificationRecord {
        map: map.name(),
        domain: map.domain(),
        target: tgt.label(),
        probes,
        seed,
        tolerance: tol,
        pullback_residual_max: residual,
        containment_margin_min: margin,
        failures,
        failure_example,
        injectivity_pairs: pairs,
        min_image_separation: sep,
        injective,
        ball_radius: map.ball_radius(),
        pass,
    }
}

/// Uniform sample of the open ball `B^{dim}(radius)`.
pub fn sample_ball(dim: usize, radius: f64, rng: &mut Rng) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let rad = radius * rng.gen::<f64>().powf(1.0 / dim as f64);
        if rad < radius {
            return g.into_iter().map(|v| v * rad / norm).collect();
        }
    }
}

pub(crate) fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// The inclusion of the closed disk of area `area` in `D(area)`; a sanity
/// baseline for the verifier.
#[derive(Debug, Clone)]
pub struct IdentityDisk {
    pub area: f64,
}

impl SymplecticMapSpec for IdentityDisk {
    fn name(&self) -> String {
        format!("identity on D({})", self.area)
    }

    fn source(&self) -> Space {
        Space::Standard { dim: 2 }
    }

    fn target(&self) -> Space {
        Space::Manifold { manifold: ManifoldModel::Disk { area: self.area } }
    }

    fn domain(&self) -> String {
        format!("B^2(sqrt({}/pi))", self.area)
    }

    fn sample_domain(&self, rng: &mut Rng) -> MapPoint {
        MapPoint::Flat(sample_ball(2, (self.area / std::f64::consts::PI).sqrt(), rng))
    }

    fn evaluate(&self, x: &MapPoint) -> Result<MapPoint> {
        let v = x.flat().ok_or_else(|| wrong_kind(&self.source()))?;
        Ok(MapPoint::Manifold(Point::Disk(num_complex::Complex64::new(v[0], v[1]))))
    }

    fn margin(&self, x: &MapPoint, _y: &MapPoint) -> f64 {
        self.area - std::f64::consts::PI * norm_sq(x.flat().unwrap_or(&[f64::INFINITY]))
    }

    fn ball_radius(&self) -> Option<f64> {
        Some((self.area / std::f64::consts::PI).sqrt())
    }
}

/// Wraps a map on a standard space and first scales the first complex
/// coordinate by `factor`; with `factor ≠ 1` the result is not symplectic
/// and must fail verification.
#[derive(Clone)]
pub struct Corrupted {
    pub inner: Arc<dyn SymplecticMapSpec>,
    pub factor: f64,
}

impl Corrupted {
    pub fn new(inner: Arc<dyn SymplecticMapSpec>, factor: f64) -> Result<Self> {
        if !matches!(inner.source(), Space::Standard { .. }) {
            return Err(Error::Unsupported("corruption of a map with a non-standard source".into()));
        }
        if !(factor > 0.0) {
            return Err(Error::InvalidArgument(format!("factor must be positive, got {factor}")));
        }
        Ok(Corrupted { inner, factor })
    }

    fn scale(&self, x: &MapPoint, f: f64) -> MapPoint {
        match x {
            MapPoint::Flat(v) => {
                let mut w = v.clone();
                w[0] *= f;
                w[1] *= f;
                MapPoint::Flat(w)
            }
            other => other.clone(),
        }
    }
}

impl SymplecticMapSpec for Corrupted {
    fn name(&self) -> String {
        format!("{} with z1 scaled by {}", self.inner.name(), self.factor)
    }

    fn source(&self) -> Space {
        self.inner.source()
    }

    fn target(&self) -> Space {
        self.inner.target()
    }

    fn domain(&self) -> String {
        format!("preimage of {} under the scaling", self.inner.domain())
    }

    fn sample_domain(&self, rng: &mut Rng) -> MapPoint {
        self.scale(&self.inner.sample_domain(rng), 1.0 / self.factor)
    }

    fn evaluate(&self, x: &MapPoint) -> Result<MapPoint> {
        self.inner.evaluate(&self.scale(x, self.factor))
    }

    fn margin(&self, x: &MapPoint, y: &MapPoint) -> f64 {
        self.inner.margin(&self.scale(x, self.factor), y)
    }

    fn fd_step(&self, x: &MapPoint) -> f64 {
        self.inner.fd_step(&self.scale(x, self.factor))
    }
}
