use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Debug;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{polytope, ManifoldModel, Point, ProjectivePoint};
use crate::numeric::{integrate, plateau};

/// A (possibly time-dependent) Hamiltonian `H_t : M → R`.
///
/// Chart-level methods take coordinates of `manifold().to_chart(_, chart)`.
pub trait Hamiltonian: Send + Sync + Debug {
    fn manifold(&self) -> &ManifoldModel;
    fn name(&self) -> String;
    fn is_autonomous(&self) -> bool;
    fn value(&self, p: &Point, t: f64) -> f64;

    fn chart_value(&self, chart: usize, coords: &[f64], t: f64) -> f64 {
        self.value(&self.manifold().from_chart(chart, coords), t)
    }

    /// `dH` in chart coordinates; defaults to fourth-order differences.
    fn chart_differential(&self, chart: usize, coords: &[f64], t: f64) -> Vec<f64> {
        let h = 1e-4;
        let mut x = coords.to_vec();
        (0..coords.len())
            .map(|i| {
                let x0 = x[i];
                let mut f = |d: f64| {
                    x[i] = x0 + d;
                    self.chart_value(chart, &x, t)
                };
                let g = (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h);
                x[i] = x0;
                g
            })
            .collect()
    }

    /// Closed-form time-`t` flow, when known. Negative `t` must give
    /// `(φ_{−t})⁻¹`.
    fn exact_flow(&self, _p: &Point, _t: f64) -> Option<Point> {
        None
    }

    /// Analytic `(min_x H_t, max_x H_t)`, when known.
    fn extrema(&self, _t: f64) -> Option<(f64, f64)> {
        None
    }

    /// Analytic `∫₀¹ max H_t − min H_t dt`, when known.
    fn analytic_length(&self) -> Option<f64> {
        None
    }
}

pub type HamiltonianFn = Arc<dyn Hamiltonian>;

/// `dH` at `p` in a given chart.
pub fn differential(h: &dyn Hamiltonian, p: &Point, chart: usize, t: f64) -> Result<Vec<f64>> {
    let coords = h.manifold().to_chart(p, chart)?;
    Ok(h.chart_differential(chart, &coords, t))
}

/// `H = (π/2) Σ c_k |z_k|² / |z|²` on CP², its blow-up or CP¹ (and on their
/// products with a disk, ignoring the disk factor). `P` has weights
/// `(1,0,0)` and `Q` has `(0,1,0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentHamiltonian {
    manifold: ManifoldModel,
    weights: Vec<f64>,
    label: String,
}

impl MomentHamiltonian {
    pub fn new(manifold: ManifoldModel, weights: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let n = manifold
            .projective_len()
            .ok_or_else(|| Error::Unsupported(format!("moment Hamiltonian on {}", manifold.label())))?;
        if weights.len() != n || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidArgument(format!("expected {n} finite weights")));
        }
        Ok(MomentHamiltonian { manifold, weights, label: label.into() })
    }

    pub fn p(manifold: ManifoldModel) -> Result<Self> {
        let n = manifold.projective_len().unwrap_or(0);
        let mut w = vec![0.0; n.max(1)];
        w[0] = 1.0;
        Self::new(manifold, w, "P")
    }

    pub fn q(manifold: ManifoldModel) -> Result<Self> {
        let n = manifold.projective_len().unwrap_or(0);
        if n < 3 {
            return Err(Error::Unsupported(format!("Q on {}", manifold.label())));
        }
        let mut w = vec![0.0; n];
        w[1] = 1.0;
        Self::new(manifold, w, "Q")
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scaled(&self, c: f64) -> Self {
        MomentHamiltonian {
            manifold: self.manifold.clone(),
            weights: self.weights.iter().map(|w| c * w).collect(),
            label: format!("{c}*({})", self.label),
        }
    }

    fn projective_coords<'a>(&self, coords: &'a [f64]) -> &'a [f64] {
        match self.manifold {
            ManifoldModel::ProductWithDisk { .. } => &coords[..coords.len() - 2],
            _ => coords,
        }
    }

    fn vertex_values(&self) -> Vec<f64> {
        let c = &self.weights;
        if c.len() == 2 {
            return vec![FRAC_PI_2 * c[1], FRAC_PI_2 * c[0]];
        }
        let base = match &self.manifold {
            ManifoldModel::ProductWithDisk { base, .. } => base.as_ref(),
            m => m,
        };
        polytope(base)
            .expect("toric base")
            .vertices
            .iter()
            .map(|&(x, y)| c[0] * x + c[1] * y + c[2] * (FRAC_PI_2 - x - y))
            .collect()
    }

    pub(crate) fn rotate_projective(&self, q: &ProjectivePoint, t: f64) -> ProjectivePoint {
        let z: Vec<Complex64> =
            q.coords().iter().zip(&self.weights).map(|(z, c)| z * Complex64::from_polar(1.0, PI * c * t)).collect();
        ProjectivePoint::new(z).expect("rotation preserves norm")
    }
}

impl Hamiltonian for MomentHamiltonian {
    fn manifold(&self) -> &ManifoldModel {
        &self.manifold
    }

    fn name(&self) -> String {
        self.label.clone()
    }

    fn is_autonomous(&self) -> bool {
        true
    }

    fn value(&self, p: &Point, _t: f64) -> f64 {
        let q = p.projective().expect("projective point");
        FRAC_PI_2 * self.weights.iter().enumerate().map(|(k, c)| c * q.norm_sq(k)).sum::<f64>()
    }

    fn chart_value(&self, chart: usize, coords: &[f64], _t: f64) -> f64 {
        let x = self.projective_coords(coords);
        let mut num = self.weights[chart];
        let mut big_n = 1.0;
        for (i, w) in x.chunks(2).enumerate() {
            let k = if i < chart { i } else { i + 1 };
            let m = w[0] * w[0] + w[1] * w[1];
            num += self.weights[k] * m;
            big_n += m;
        }
        FRAC_PI_2 * num / big_n
    }

    fn chart_differential(&self, chart: usize, coords: &[f64], t: f64) -> Vec<f64> {
        let x = self.projective_coords(coords);
        let h = self.chart_value(chart, coords, t);
        let big_n = 1.0 + x.iter().map(|v| v * v).sum::<f64>();
        let mut out = vec![0.0; coords.len()];
        for (m, xm) in x.iter().enumerate() {
            let i = m / 2;
            let k = if i < chart { i } else { i + 1 };
            out[m] = 2.0 * xm * (FRAC_PI_2 * self.weights[k] - h) / big_n;
        }
        out
    }

    fn exact_flow(&self, p: &Point, t: f64) -> Option<Point> {
        Some(match p {
            Point::Projective(q) => Point::Projective(self.rotate_projective(q, t)),
            Point::Product(q, z) => Point::Product(self.rotate_projective(q, t), *z),
            Point::Disk(_) => return None,
        })
    }

    fn extrema(&self, _t: f64) -> Option<(f64, f64)> {
        let v = self.vertex_values();
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some((lo, hi))
    }

    fn analytic_length(&self) -> Option<f64> {
        self.extrema(0.0).map(|(lo, hi)| hi - lo)
    }
}

/// `K_t = f'(t)·H` with `f(t) = t + (a/2π) sin 2πt`, so that
/// `φ^K_t = φ^H_{f(t)}` and `f(0) = 0`, `f(1) = 1`. Requires `|a| < 1`.
#[derive(Debug, Clone)]
pub struct Reparametrized {
    inner: HamiltonianFn,
    amplitude: f64,
}

impl Reparametrized {
    pub fn new(inner: HamiltonianFn, amplitude: f64) -> Result<Self> {
        if !inner.is_autonomous() || !(amplitude.abs() < 1.0) {
            return Err(Error::InvalidArgument("reparametrization needs autonomous H and |a| < 1".into()));
        }
        Ok(Reparametrized { inner, amplitude })
    }

    pub fn f(&self, t: f64) -> f64 {
        t + self.amplitude / (2.0 * PI) * (2.0 * PI * t).sin()
    }

    pub fn f_prime(&self, t: f64) -> f64 {
        1.0 + self.amplitude * (2.0 * PI * t).cos()
    }

    pub fn inner(&self) -> &HamiltonianFn {
        &self.inner
    }
}

impl Hamiltonian for Reparametrized {
    fn manifold(&self) -> &ManifoldModel {
        self.inner.manifold()
    }

    fn name(&self) -> String {
        format!("reparam({}, a={})", self.inner.name(), self.amplitude)
    }

    fn is_autonomous(&self) -> bool {
        self.amplitude == 0.0
    }

    fn value(&self, p: &Point, t: f64) -> f64 {
        self.f_prime(t) * self.inner.value(p, t)
    }

    fn chart_value(&self, chart: usize, coords: &[f64], t: f64) -> f64 {
        self.f_prime(t) * self.inner.chart_value(chart, coords, t)
    }

    fn chart_differential(&self, chart: usize, coords: &[f64], t: f64) -> Vec<f64> {
        let c = self.f_prime(t);
        self.inner.chart_differential(chart, coords, t).into_iter().map(|g| c * g).collect()
    }

    fn exact_flow(&self, p: &Point, t: f64) -> Option<Point> {
        self.inner.exact_flow(p, self.f(t))
    }

    fn extrema(&self, t: f64) -> Option<(f64, f64)> {
        let c = self.f_prime(t);
        self.inner.extrema(t).map(|(lo, hi)| (c * lo, c * hi))
    }

    fn analytic_length(&self) -> Option<f64> {
        self.inner.analytic_length()
    }
}

/// Radial Hamiltonian `H = f(π|ζ|²)` on the disk factor, with
/// `f' = σ·plateau(A; A₀, A₁, w)`: zero near the centre, constant `max f`
/// near the rim, non-constant orbits of period `1/f'(A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialBump {
    manifold: ManifoldModel,
    sigma: f64,
    a0: f64,
    a1: f64,
    w: f64,
}

impl RadialBump {
    pub fn new(manifold: ManifoldModel, sigma: f64, a0: f64, a1: f64, w: f64) -> Result<Self> {
        let area = match &manifold {
            ManifoldModel::Disk { area } | ManifoldModel::ProductWithDisk { disk_area: area, .. } => *area,
            other => return Err(Error::Unsupported(format!("radial bump on {}", other.label()))),
        };
        if !(sigma > 0.0 && a0 > 0.0 && w > 0.0 && a0 + 2.0 * w <= a1 && a1 < area) {
            return Err(Error::InvalidArgument(format!(
                "radial bump needs σ > 0 and 0 < A₀, A₀ + 2w ≤ A₁ < {area}"
            )));
        }
        Ok(RadialBump { manifold, sigma, a0, a1, w })
    }

    /// Profile with `A₀ = 0.02a`, `A₁ = 0.98a`, `w = 0.04a`.
    pub fn standard(manifold: ManifoldModel, sigma: f64) -> Result<Self> {
        let a = Self::disk_area_of(&manifold)?;
        Self::new(manifold, sigma, 0.02 * a, 0.98 * a, 0.04 * a)
    }

    fn disk_area_of(m: &ManifoldModel) -> Result<f64> {
        match m {
            ManifoldModel::Disk { area } | ManifoldModel::ProductWithDisk { disk_area: area, .. } => Ok(*area),
            other => Err(Error::Unsupported(format!("radial bump on {}", other.label()))),
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn disk_area(&self) -> f64 {
        Self::disk_area_of(&self.manifold).expect("validated")
    }

    pub fn scaled(&self, c: f64) -> Self {
        RadialBump { sigma: c * self.sigma, ..self.clone() }
    }

    /// `sup f' = σ`.
    pub fn max_slope(&self) -> f64 {
        self.sigma
    }

    pub fn max_value(&self) -> f64 {
        self.sigma * (self.a1 - self.a0 - self.w)
    }

    /// Fraction of the disk area lost to the flat ends of the profile.
    pub fn grid_slack(&self) -> f64 {
        1.0 - (self.a1 - self.a0 - self.w) / self.disk_area()
    }

    /// Area thresholds `(A₀, A₁)`: `H = 0` below `A₀`, `H = max` above `A₁`.
    pub fn support(&self) -> (f64, f64) {
        (self.a0, self.a1)
    }

    pub fn profile(&self, a: f64) -> f64 {
        if a <= self.a0 {
            0.0
        } else if a >= self.a1 {
            self.max_value()
        } else {
            self.sigma * integrate(|s| plateau(s, self.a0, self.a1, self.w), self.a0, a, 1e-14)
        }
    }

    pub fn profile_slope(&self, a: f64) -> f64 {
        self.sigma * plateau(a, self.a0, self.a1, self.w)
    }

    fn disk_coords<'a>(&self, coords: &'a [f64]) -> &'a [f64] {
        &coords[coords.len() - 2..]
    }
}

impl Hamiltonian for RadialBump {
    fn manifold(&self) -> &ManifoldModel {
        &self.manifold
    }

    fn name(&self) -> String {
        format!("bump(sigma={})", self.sigma)
    }

    fn is_autonomous(&self) -> bool {
        true
    }

    fn value(&self, p: &Point, _t: f64) -> f64 {
        self.profile(PI * p.disk_coord().expect("disk factor").norm_sqr())
    }

    fn chart_value(&self, _chart: usize, coords: &[f64], _t: f64) -> f64 {
        let d = self.disk_coords(coords);
        self.profile(PI * (d[0] * d[0] + d[1] * d[1]))
    }

    fn chart_differential(&self, _chart: usize, coords: &[f64], _t: f64) -> Vec<f64> {
        let d = self.disk_coords(coords);
        let slope = self.profile_slope(PI * (d[0] * d[0] + d[1] * d[1]));
        let mut out = vec![0.0; coords.len()];
        let n = coords.len();
        out[n - 2] = 2.0 * PI * slope * d[0];
        out[n - 1] = 2.0 * PI * slope * d[1];
        out
    }

    fn exact_flow(&self, p: &Point, t: f64) -> Option<Point> {
        let z = p.disk_coord()?;
        let rot = Complex64::from_polar(1.0, 2.0 * PI * self.profile_slope(PI * z.norm_sqr()) * t);
        Some(match p {
            Point::Disk(_) => Point::Disk(z * rot),
            Point::Product(q, _) => Point::Product(q.clone(), z * rot),
            Point::Projective(_) => return None,
        })
    }

    fn extrema(&self, _t: f64) -> Option<(f64, f64)> {
        Some((0.0, self.max_value()))
    }

    fn analytic_length(&self) -> Option<f64> {
        Some(self.max_value())
    }
}

/// Parses sums of scaled `P`, `Q` and constants, e.g. `P`, `2P`,
/// `0.5*Q`, `P+Q`, `P-0.25`, `0`.
pub fn parse_hamiltonian(expr: &str, manifold: &ManifoldModel) -> Result<HamiltonianFn> {
    let n = manifold
        .projective_len()
        .ok_or_else(|| Error::Unsupported(format!("expression Hamiltonians on {}", manifold.label())))?;
    let bad = |msg: &str| Error::InvalidArgument(format!("cannot parse Hamiltonian '{expr}': {msg}"));
    let s: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(bad("empty"));
    }
    let mut weights = vec![0.0; n];
    let mut constant = 0.0;
    let mut rest = s.as_str();
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'+' => (1.0, &rest[1..]),
            b'-' => (-1.0, &rest[1..]),
            _ if rest.len() == s.len() => (1.0, rest),
            _ => return Err(bad("expected + or -")),
        };
        let end = body[1..].find(['+', '-']).map(|i| i + 1).unwrap_or(body.len());
        let term = &body[..end];
        rest = &body[end..];
        let (coef, name) = match term.find(['P', 'Q']) {
            Some(i) => {
                let c = term[..i].trim_end_matches('*');
                let c = if c.is_empty() { 1.0 } else { c.parse::<f64>().map_err(|_| bad(c))? };
                if term.len() != i + 1 {
                    return Err(bad(&term[i..]));
                }
                (c, Some(&term[i..]))
            }
            None => (term.parse::<f64>().map_err(|_| bad(term))?, None),
        };
        match name {
            Some("P") => weights[0] += sign * coef,
            Some("Q") if n >= 3 => weights[1] += sign * coef,
            Some(other) => return Err(bad(&format!("{other} undefined on {}", manifold.label()))),
            None => constant += sign * coef,
        }
    }
    for w in weights.iter_mut() {
        *w += constant / FRAC_PI_2;
    }
    Ok(Arc::new(MomentHamiltonian::new(manifold.clone(), weights, s)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rng;

    #[test]
    fn chart_value_matches_value() {
        let mut r = rng(1);
        for m in [ManifoldModel::Cp2, ManifoldModel::blowup(0.4).unwrap(), ManifoldModel::product(ManifoldModel::Sphere, 1.0).unwrap()] {
            let h = MomentHamiltonian::new(m.clone(), vec![0.3, -1.2, 0.7][..m.projective_len().unwrap()].to_vec(), "h").unwrap();
            for _ in 0..50 {
                let p = m.sample(&mut r);
                let chart = m.best_chart(&p);
                let x = m.to_chart(&p, chart).unwrap();
                assert!((h.chart_value(chart, &x, 0.0) - h.value(&p, 0.0)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn analytic_differential_matches_differences() {
        let m = ManifoldModel::Cp2;
        let h = MomentHamiltonian::new(m.clone(), vec![1.0, 0.4, -0.3], "h").unwrap();
        let mut r = rng(2);
        for _ in 0..100 {
            let p = m.sample(&mut r);
            let chart = m.best_chart(&p);
            let x = m.to_chart(&p, chart).unwrap();
            let exact = h.chart_differential(chart, &x, 0.0);
            let mut scratch = x.clone();
            for (i, e) in exact.iter().enumerate() {
                let step = 1e-6;
                scratch[i] = x[i] + step;
                let up = h.chart_value(chart, &scratch, 0.0);
                scratch[i] = x[i] - step;
                let down = h.chart_value(chart, &scratch, 0.0);
                scratch[i] = x[i];
                assert!((e - (up - down) / (2.0 * step)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn lengths_from_polytope() {
        let p = MomentHamiltonian::p(ManifoldModel::Cp2).unwrap();
        assert!((p.analytic_length().unwrap() - FRAC_PI_2).abs() < 1e-15);
        let b = ManifoldModel::blowup(0.5).unwrap();
        let p = MomentHamiltonian::p(b.clone()).unwrap();
        assert!((p.analytic_length().unwrap() - 3.0 * PI / 8.0).abs() < 1e-15);
        let q = MomentHamiltonian::q(b).unwrap();
        assert!((q.analytic_length().unwrap() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn parser_accepts_sums_and_scalings() {
        let m = ManifoldModel::Cp2;
        let h = parse_hamiltonian("2P", &m).unwrap();
        assert!((h.analytic_length().unwrap() - PI).abs() < 1e-15);
        let h = parse_hamiltonian("P + 0.5*Q - 1", &m).unwrap();
        let p = Point::Projective(ProjectivePoint::real(&[1.0, 0.0, 0.0]).unwrap());
        assert!((h.value(&p, 0.0) - (FRAC_PI_2 - 1.0)).abs() < 1e-15);
        let zero = parse_hamiltonian("0", &m).unwrap();
        assert_eq!(zero.analytic_length().unwrap(), 0.0);
        assert!(parse_hamiltonian("P*", &m).is_err());
        assert!(parse_hamiltonian("R", &m).is_err());
        assert!(parse_hamiltonian("Q", &ManifoldModel::Sphere).is_err());
    }

    #[test]
    fn bump_profile_integrates_to_plateau_length() {
        let b = RadialBump::standard(ManifoldModel::disk(1.0).unwrap(), 0.9).unwrap();
        assert!((b.profile(0.99) - 0.9 * 0.92).abs() < 1e-12);
        assert!((b.profile(0.5) - 0.9 * 0.46).abs() < 1e-12);
        assert!((b.grid_slack() - 0.08).abs() < 1e-15);
    }
}
