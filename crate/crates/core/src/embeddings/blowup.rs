//! The chain `U_s → V_s → T_s → T⁴(πs²)` over the blow-up and the ball
//! embedding `j⁻` into `U_s`.
//!
//! With `k² = 1 − λ²` and `m = k² − s²`:
//! - `U_s`: points of the blow-up with `m < |z₀|² ≤ k²` and `|z₁|² < k² − |z₀|²`;
//! - `V_s ⊂ B⁴(k)`: the same set in the ball chart at `[0:0:1]`,
//!   `(Z₀, Z₁) = (z₀, z₁)·z̄₂/|z₂|`;
//! - `T_s = {0 ≤ x < πs, 0 < y ≤ s, |w|² < s² − s·y}`: action-angle
//!   coordinates `x = −(s/2)·arg Z₀`, `y = (|Z₀|² − m)/s` on the annulus factor;
//! - `T⁴(πs²) = {0 ≤ X < 1, 0 < Y, Y + π|w|² < πs²}` by `X = x/(πs)`, `Y = πs·y`.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::ball::complex_pair;
use super::{norm_sq, MapPoint, Space, SymplecticMapSpec};
use crate::error::{Error, Result};
use crate::geometry::{ManifoldModel, Point, ProjectivePoint};
use crate::numeric::Rng;

/// Relative width of the band around the angular cut `x = 0` that probes
/// avoid; the action-angle chart is discontinuous there.
const CUT_BAND: f64 = 1e-3;

/// Probes of `j⁻` avoid `|w₀| < J_TUBE`, where the map is not continuous.
pub const J_TUBE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupChain {
    pub lambda: f64,
    pub s: f64,
}

impl BlowupChain {
    pub fn new(lambda: f64, s: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidArgument(format!("λ must lie in (0, 1), got {lambda}")));
        }
        if !(s > 0.0 && s * s <= 1.0 - lambda * lambda) {
            return Err(Error::DomainViolation(format!("need 0 < s^2 <= 1 - λ^2, got s = {s}")));
        }
        Ok(BlowupChain { lambda, s })
    }

    pub fn k2(&self) -> f64 {
        1.0 - self.lambda * self.lambda
    }

    fn floor(&self) -> f64 {
        self.k2() - self.s * self.s
    }

    pub fn manifold(&self) -> ManifoldModel {
        ManifoldModel::BlowupCp2 { lambda: self.lambda }
    }

    pub fn u_to_v(&self, p: &ProjectivePoint) -> Result<[Complex64; 2]> {
        let z = p.coords();
        let r2 = z[2].norm();
        if r2 == 0.0 {
            return Err(Error::DomainViolation("z2 = 0 lies outside U_s".into()));
        }
        let phase = z[2].conj() / r2;
        Ok([z[0] * phase, z[1] * phase])
    }

    pub fn v_to_u(&self, v: [Complex64; 2]) -> Result<ProjectivePoint> {
        let rest = 1.0 - v[0].norm_sqr() - v[1].norm_sqr();
        if !(rest > 0.0) {
            return Err(Error::DomainViolation("point outside the unit ball".into()));
        }
        ProjectivePoint::new(vec![v[0], v[1], Complex64::new(rest.sqrt(), 0.0)])
    }

    pub fn v_to_t(&self, v: [Complex64; 2]) -> Result<[f64; 4]> {
        let a = v[0].norm_sqr();
        if !(a > 0.0) {
            return Err(Error::DomainViolation("Z0 = 0 lies outside V_s".into()));
        }
        let theta = (-v[0].arg()).rem_euclid(TAU);
        Ok([0.5 * self.s * theta, (a - self.floor()) / self.s, v[1].re, v[1].im])
    }

    pub fn t_to_v(&self, p: [f64; 4]) -> Result<[Complex64; 2]> {
        let a = self.floor() + self.s * p[1];
        if !(a > 0.0) {
            return Err(Error::DomainViolation("y below the annulus".into()));
        }
        let theta = 2.0 * p[0] / self.s;
        Ok([Complex64::from_polar(a.sqrt(), -theta), Complex64::new(p[2], p[3])])
    }

    pub fn t_to_t4(&self, p: [f64; 4]) -> [f64; 4] {
        [p[0] / (PI * self.s), PI * self.s * p[1], p[2], p[3]]
    }

    pub fn t4_to_t(&self, p: [f64; 4]) -> [f64; 4] {
        [p[0] * PI * self.s, p[1] / (PI * self.s), p[2], p[3]]
    }

    pub fn v_margin(&self, v: [Complex64; 2]) -> f64 {
        let a = v[0].norm_sqr();
        (a - self.floor()).min(self.k2() - a - v[1].norm_sqr())
    }

    pub fn u_margin(&self, p: &ProjectivePoint) -> f64 {
        let blown = p.norm_sq(1) + p.norm_sq(2) - self.lambda * self.lambda;
        match self.u_to_v(p) {
            Ok(v) => self.v_margin(v).min(blown),
            Err(_) => f64::NEG_INFINITY,
        }
    }

    pub fn t_margin(&self, p: [f64; 4]) -> f64 {
        let s = self.s;
        let w2 = p[2] * p[2] + p[3] * p[3];
        p[0].min(PI * s - p[0]).min(p[1]).min(s - p[1]).min(s * s - s * p[1] - w2)
    }

    pub fn t4_margin(&self, p: [f64; 4]) -> f64 {
        let w2 = p[2] * p[2] + p[3] * p[3];
        p[0].min(1.0 - p[0]).min(p[1]).min(PI * self.s * self.s - p[1] - PI * w2)
    }

    /// Uniform sample of `T_s` away from the angular cut.
    pub fn sample_t(&self, rng: &mut Rng) -> [f64; 4] {
        let s = self.s;
        let x = PI * s * (CUT_BAND + (1.0 - 2.0 * CUT_BAND) * rng.gen::<f64>());
        // Fibre area is proportional to s − y.
        let y = loop {
            let y = s * (1.0 - rng.gen::<f64>().sqrt());
            if y > 0.0 {
                break y;
            }
        };
        let rad = (s * s - s * y).sqrt() * rng.gen::<f64>().sqrt();
        let w = Complex64::from_polar(rad, TAU * rng.gen::<f64>());
        [x, y, w.re, w.im]
    }

    /// `(U → V, V → T, T → T⁴)`.
    pub fn stages(&self) -> Vec<ChainStage> {
        [ChainStep::UToV, ChainStep::VToT, ChainStep::TToT4]
            .into_iter()
            .map(|step| ChainStage { chain: *self, step })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainStep {
    UToV,
    VToT,
    TToT4,
}

/// One link of the chain as a verifiable map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainStage {
    pub chain: BlowupChain,
    pub step: ChainStep,
}

fn four(x: &MapPoint) -> Result<[f64; 4]> {
    match x.flat() {
        Some(v) if v.len() == 4 => Ok([v[0], v[1], v[2], v[3]]),
        _ => Err(Error::InvalidArgument("expected a point of R^4".into())),
    }
}

fn v_flat(v: [Complex64; 2]) -> MapPoint {
    MapPoint::Flat(vec![v[0].re, v[0].im, v[1].re, v[1].im])
}

fn v_of(p: [f64; 4]) -> [Complex64; 2] {
    let (a, b) = complex_pair(&p);
    [a, b]
}

impl SymplecticMapSpec for ChainStage {
    fn name(&self) -> String {
        let s = match self.step {
            ChainStep::UToV => "U_s -> V_s",
            ChainStep::VToT => "V_s -> T_s",
            ChainStep::TToT4 => "T_s -> T4",
        };
        format!("{s} (lambda={}, s={})", self.chain.lambda, self.chain.s)
    }

    fn source(&self) -> Space {
        match self.step {
            ChainStep::UToV => Space::Manifold { manifold: self.chain.manifold() },
            _ => Space::Standard { dim: 4 },
        }
    }

    fn target(&self) -> Space {
        Space::Standard { dim: 4 }
    }

    fn domain(&self) -> String {
        let s = match self.step {
            ChainStep::UToV => "U_s",
            ChainStep::VToT => "V_s",
            ChainStep::TToT4 => "T_s",
        };
        format!("{s}(s={})", self.chain.s)
    }

    fn sample_domain(&self, rng: &mut Rng) -> MapPoint {
        let c = &self.chain;
        let t = c.sample_t(rng);
        if self.step == ChainStep::TToT4 {
            return MapPoint::Flat(t.to_vec());
        }
        let v = c.t_to_v(t).expect("sampled point of T_s");
        match self.step {
            ChainStep::UToV => MapPoint::Manifold(Point::Projective(c.v_to_u(v).expect("V_s lies in the ball"))),
            _ => v_flat(v),
        }
    }

    fn evaluate(&self, x: &MapPoint) -> Result<MapPoint> {
        let c = &self.chain;
        match self.step {
            ChainStep::UToV => match x.manifold() {
                Some(Point::Projective(p)) => Ok(v_flat(c.u_to_v(p)?)),
                _ => Err(Error::InvalidArgument("expected a projective point".into())),
            },
            ChainStep::VToT => Ok(MapPoint::Flat(c.v_to_t(v_of(four(x)?))?.to_vec())),
            ChainStep::TToT4 => Ok(MapPoint::Flat(c.t_to_t4(four(x)?).to_vec())),
        }
    }

    fn margin(&self, _x: &MapPoint, y: &MapPoint) -> f64 {
        let Ok(p) = four(y) else {
            return f64::NEG_INFINITY;
        };
        match self.step {
            ChainStep::UToV => self.chain.v_margin(v_of(p)),
            ChainStep::VToT => self.chain.t_margin(p),
            ChainStep::TToT4 => self.chain.t4_margin(p),
        }
    }
}

/// `j⁻(w₀, w₁) = [√(k² − |w|²) : w₁ : w₀·√(|w₀|² + λ²)/|w₀|]`, with
/// `w₀/|w₀|` read as 1 at `w₀ = 0`. `P ∘ j⁻ = (π/2)(k² − |w|²)` is constant
/// on spheres and the formula does not depend on `s`.
pub fn j_minus(lambda: f64, w0: Complex64, w1: Complex64) -> Result<ProjectivePoint> {
    let k2 = 1.0 - lambda * lambda;
    let r2 = w0.norm_sqr() + w1.norm_sqr();
    if !(r2 < k2) {
        return Err(Error::DomainViolation(format!("|w|^2 = {r2} is not below 1 - λ^2 = {k2}")));
    }
    let a = w0.norm();
    let phase = if a > 0.0 { w0 / a } else { Complex64::new(1.0, 0.0) };
    let z2 = phase * (a * a + lambda * lambda).sqrt();
    ProjectivePoint::new(vec![Complex64::new((k2 - r2).sqrt(), 0.0), w1, z2])
}

/// `j_s⁻ : B⁴(s − ε) → U_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JMinus {
    pub chain: BlowupChain,
    pub epsilon: f64,
}

impl JMinus {
    pub fn new(lambda: f64, s: f64, epsilon: f64) -> Result<Self> {
        let chain = BlowupChain::new(lambda, s)?;
        if !(epsilon > 0.0 && epsilon < s) {
            return Err(Error::InvalidArgument(format!("ε must lie in (0, s), got {epsilon}")));
        }
        Ok(JMinus { chain, epsilon })
    }

    pub fn radius(&self) -> f64 {
        self.chain.s - self.epsilon
    }
}

/// Uniform sample of `B⁴(radius)` outside the tube `|w₀| < J_TUBE`.
pub(crate) fn sample_off_tube(radius: f64, rng: &mut Rng) -> Vec<f64> {
    loop {
        let v = super::sample_ball(4, radius, rng);
        if v[0].hypot(v[1]) >= J_TUBE {
            return v;
        }
    }
}

/// Jacobian of `j⁻` into the affine chart `Z₀ ≠ 0`, whose coordinates are
/// `(Z₁/Z₀, Z₂/Z₀)` split into real and imaginary parts. Exact away from
/// `w₀ = 0`; finite differences lose accuracy there because the entries
/// grow like `λ/|w₀|`.
pub(crate) fn j_jacobian(lambda: f64, v: &[f64]) -> Result<DMatrix<f64>> {
    let k2 = 1.0 - lambda * lambda;
    let r2 = norm_sq(&v[..4]);
    let rho = v[0] * v[0] + v[1] * v[1];
    if !(r2 < k2) || rho == 0.0 {
        return Err(Error::DomainViolation(format!("j- is not differentiable at {v:?}")));
    }
    let a = (k2 - r2).sqrt().recip();
    let a3 = a * a * a;
    let g = ((rho + lambda * lambda) / rho).sqrt();
    let dg = -lambda * lambda / (2.0 * rho * rho * g);
    let f = [g * v[0], g * v[1]];
    let mut j = DMatrix::zeros(4, 4);
    for i in 0..4 {
        j[(0, i)] = a3 * v[i] * v[2];
        j[(1, i)] = a3 * v[i] * v[3];
        j[(2, i)] = a3 * v[i] * f[0];
        j[(3, i)] = a3 * v[i] * f[1];
    }
    j[(0, 2)] += a;
    j[(1, 3)] += a;
    for i in 0..2 {
        j[(2, i)] += a * 2.0 * dg * v[i] * v[0];
        j[(3, i)] += a * 2.0 * dg * v[i] * v[1];
    }
    j[(2, 0)] += a * g;
    j[(3, 1)] += a * g;
    Ok(j)
}

impl SymplecticMapSpec for JMinus {
    fn name(&self) -> String {
        format!("j_s- (lambda={}, s={}, eps={})", self.chain.lambda, self.chain.s, self.epsilon)
    }

    fn source(&self) -> Space {
        Space::Standard { dim: 4 }
    }

    fn target(&self) -> Space {
        Space::Manifold { manifold: self.chain.manifold() }
    }

    fn domain(&self) -> String {
        format!("B^4({}) minus |w0| < {J_TUBE}", self.radius())
    }

    fn sample_domain(&self, rng: &mut Rng) -> MapPoint {
        MapPoint::Flat(sample_off_tube(self.radius(), rng))
    }

    fn evaluate(&self, x: &MapPoint) -> Result<MapPoint> {
        let v = four(x)?;
        if norm_sq(&v) >= self.radius() * self.radius() {
            return Err(Error::DomainViolation(format!("point outside B^4({})", self.radius())));
        }
        let (w0, w1) = complex_pair(&v);
        Ok(MapPoint::Manifold(Point::Projective(j_minus(self.chain.lambda, w0, w1)?)))
    }

    fn margin(&self, _x: &MapPoint, y: &MapPoint) -> f64 {
        match y.manifold() {
            Some(Point::Projective(p)) => self.chain.u_margin(p),
            _ => f64::NEG_INFINITY,
        }
    }

    fn jacobian(&self, x: &MapPoint) -> Result<(usize, usize, DMatrix<f64>)> {
        Ok((0, 0, j_jacobian(self.chain.lambda, &four(x)?)?))
    }

    fn ball_radius(&self) -> Option<f64> {
        Some(self.radius())
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;
    use crate::embeddings::verify_map;
    use crate::numeric::rng;

    #[test]
    fn chain_round_trip() {
        let c = BlowupChain::new(0.5, 0.6).unwrap();
        let mut r = rng(1);
        for _ in 0..500 {
            let t = c.sample_t(&mut r);
            assert!(c.t_margin(t) > 0.0);
            let v = c.t_to_v(t).unwrap();
            assert!(c.v_margin(v) > 0.0);
            let u = c.v_to_u(v).unwrap();
            assert!(c.u_margin(&u) > 0.0);
            let back = c.v_to_t(c.u_to_v(&u).unwrap()).unwrap();
            let t4 = c.t4_to_t(c.t_to_t4(back));
            for i in 0..4 {
                assert!((t4[i] - t[i]).abs() < 1e-8, "{t:?} {t4:?}");
            }
        }
    }

    #[test]
    fn half_depth_point_lies_in_chain() {
        let c = BlowupChain::new(0.5, 0.6).unwrap();
        let tau2 = 0.18;
        let z0 = (c.k2() - tau2).sqrt();
        let z1 = 0.5 * tau2.sqrt();
        let z2 = (1.0 - z0 * z0 - z1 * z1).sqrt();
        let p = ProjectivePoint::new(vec![
            Complex64::from_polar(z0, -1.0),
            Complex64::new(z1, 0.0),
            Complex64::new(z2, 0.0),
        ])
        .unwrap();
        assert!(c.u_margin(&p) > 0.0);
        let t = c.v_to_t(c.u_to_v(&p).unwrap()).unwrap();
        assert!(c.t_margin(t) > 0.0 && t[1] < c.s);
        // Fibre over y has area π(s² − s·y) = πτ².
        assert!((PI * (c.s * c.s - c.s * t[1]) - PI * tau2).abs() < 1e-12);
    }

    #[test]
    fn stages_and_j_verify() {
        let c = BlowupChain::new(0.5, 0.6).unwrap();
        for st in c.stages() {
            let rec = verify_map(&st, 500, 1e-6, 5);
            assert!(rec.pass, "{rec:?}");
        }
        let j = JMinus::new(0.5, 0.6, 0.05).unwrap();
        let rec = verify_map(&j, 500, 1e-6, 6);
        assert!(rec.pass, "{rec:?}");
    }

    #[test]
    fn j_minus_is_constant_on_spheres_and_nested() {
        let mut r = rng(9);
        let rad = 0.37;
        let vals: Vec<f64> = (0..1000)
            .map(|_| {
                let v = sample_off_tube(1.0, &mut r);
                let n = norm_sq(&v).sqrt();
                let (w0, w1) = complex_pair(&v.iter().map(|x| x * rad / n).collect::<Vec<_>>());
                FRAC_PI_2 * j_minus(0.5, w0, w1).unwrap().norm_sq(0)
            })
            .collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / vals.len() as f64;
        assert!(var <= 1e-10);
        assert!((mean - FRAC_PI_2 * (0.75 - rad * rad)).abs() < 1e-12);
        let centre = j_minus(0.5, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
        assert!((centre.norm_sq(0) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn j_jacobian_matches_differences() {
        let v = [0.21, -0.13, 0.3, 0.05];
        let exact = j_jacobian(0.5, &v).unwrap();
        let fd = crate::embeddings::fd_jacobian(&v, 1e-4, |z| {
            let (w0, w1) = complex_pair(z);
            let q = j_minus(0.5, w0, w1)?;
            ManifoldModel::blowup(0.5)?.to_chart(&Point::Projective(q), 0)
        })
        .unwrap();
        assert!((exact - fd).abs().max() < 1e-8);
    }
}
