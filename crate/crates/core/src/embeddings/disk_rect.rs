//! Area-preserving maps from a disk onto a region inside a family of
//! rectangles. Concentric circles go to nested closed curves: an exact
//! linear ellipse near the centre, then superellipses whose `s`-edges are
//! blended onto the rectangle edges. Angles are fixed by solving the
//! area-preservation equation along each curve.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{brent_root, integrate};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum DiskRectVariant {
    MinusCp2,
    PlusCp2,
    MinusBlowup { lambda: f64 },
    PlusBlowup { lambda: f64 },
}

impl DiskRectVariant {
    /// Scale `k = √(1 − λ²)`.
    pub fn scale(&self) -> f64 {
        match self {
            DiskRectVariant::MinusCp2 | DiskRectVariant::PlusCp2 => 1.0,
            DiskRectVariant::MinusBlowup { lambda } | DiskRectVariant::PlusBlowup { lambda } => {
                (1.0 - lambda * lambda).sqrt()
            }
        }
    }

    pub fn is_plus(&self) -> bool {
        matches!(self, DiskRectVariant::PlusCp2 | DiskRectVariant::PlusBlowup { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub s_min: f64,
    pub s_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl Rect {
    /// Signed distance to the boundary, positive inside.
    pub fn margin(&self, s: f64, t: f64) -> f64 {
        (s - self.s_min).min(self.s_max - s).min(t - self.t_min).min(self.t_max - t)
    }
}

/// Value and `r`-derivative of the curve parameters at one radius.
#[derive(Debug, Clone, Copy)]
struct Params {
    r: f64,
    c: f64,
    a: f64,
    b: f64,
    eta: f64,
    dc: f64,
    da: f64,
    db: f64,
    deta: f64,
}

/// `R(φ)`, `∂R/∂r` and `∂R/∂φ` on the level set
/// `(1−η)(X²+Y²)^m + η(X^{2m}+Y^{2m}) = 1`, `X = x/a`, `Y = y/b`.
#[derive(Debug, Clone, Copy)]
struct Radial {
    r: f64,
    r_r: f64,
    r_phi: f64,
}

fn radial(pr: &Params, m: i32, phi: f64) -> Radial {
    let (sn, cs) = phi.sin_cos();
    let al = cs / pr.a;
    let be = sn / pr.b;
    let mf = m as f64;
    let q = al * al + be * be;
    let qm1 = q.powi(m - 1);
    let a2m1 = al.powi(2 * m - 1);
    let b2m1 = be.powi(2 * m - 1);
    let big = (1.0 - pr.eta) * qm1 * q + pr.eta * (a2m1 * al + b2m1 * be);
    let r = big.powf(-1.0 / (2.0 * mf));
    let f_a = -(2.0 * mf / pr.a) * ((1.0 - pr.eta) * qm1 * al * al + pr.eta * a2m1 * al);
    let f_b = -(2.0 * mf / pr.b) * ((1.0 - pr.eta) * qm1 * be * be + pr.eta * b2m1 * be);
    let f_eta = -qm1 * q + a2m1 * al + b2m1 * be;
    let (al_phi, be_phi) = (-sn / pr.a, cs / pr.b);
    let f_phi = 2.0 * mf * ((1.0 - pr.eta) * qm1 * (al * al_phi + be * be_phi) + pr.eta * (a2m1 * al_phi + b2m1 * be_phi));
    let scale = -r / (2.0 * mf * big);
    Radial { r, r_r: scale * (f_a * pr.da + f_b * pr.db + f_eta * pr.deta), r_phi: scale * f_phi }
}

/// Area of the unit-axis level set and its `η`-derivative.
fn shape_area(m: i32, eta: f64) -> (f64, f64) {
    let mf = m as f64;
    let w = |phi: f64| {
        let (sn, cs) = phi.sin_cos();
        1.0 - eta + eta * (cs.powi(2 * m) + sn.powi(2 * m))
    };
    let area = 4.0 * integrate(|phi| w(phi).powf(-1.0 / mf), 0.0, FRAC_PI_4, 1e-13);
    let d = 4.0
        * integrate(
            |phi| {
                let (sn, cs) = phi.sin_cos();
                let g = cs.powi(2 * m) + sn.powi(2 * m);
                -(g - 1.0) / mf * w(phi).powf(-1.0 / mf - 1.0)
            },
            0.0,
            FRAC_PI_4,
            1e-13,
        );
    (area, d)
}

/// Lower bound on `J / r`, which bounds the angular stretch `∂Φ/∂θ`.
const J_FLOOR: f64 = 0.05;

fn upper(r: f64) -> f64 {
    FRAC_PI_4 + FRAC_PI_2 * r * r
}

fn lower(r: f64, e: f64) -> f64 {
    let q = r + e;
    FRAC_PI_4 + FRAC_PI_2 * q * q - PI * FRAC_1_SQRT_2 * q
}

/// Curve family for scale 1 and gap `e`. Half-width, centre and shape are
/// closed-form in `r`: `a` is odd, `c` and `η` are even, so the map is
/// smooth at the centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub e: f64,
    /// Half the exponent of the outer superellipse.
    pub m: i32,
    pub len_a: f64,
    pub len_c: f64,
    pub len_shape: f64,
    pub delta: f64,
}

impl Profile {
    fn new(e: f64, m: i32, len_a: f64, len_c: f64, len_shape: f64) -> Profile {
        Profile { e, m, len_a: len_a * e, len_c: len_c * e, len_shape: len_shape * e, delta: 1e-4 * e }
    }

    pub fn r_max(&self) -> f64 {
        FRAC_1_SQRT_2 - self.e
    }

    /// Centre of the degenerate curve at `r = 0`.
    pub fn mid0(&self) -> f64 {
        0.5 * (upper(0.0) + lower(0.0, self.e))
    }

    fn params(&self, r: f64) -> Params {
        let e = self.e;
        // (U − L)/2 = d0 + a0·r and (U + L)/2 = mid0 + (π/2)r² − c1·r exactly
        let d0 = 0.5 * (PI * FRAC_1_SQRT_2 * e - FRAC_PI_2 * e * e);
        let a0 = 0.5 * (PI * FRAC_1_SQRT_2 - PI * e);
        let c1 = 0.5 * PI * FRAC_1_SQRT_2 - FRAC_PI_2 * e;
        let th = (r / self.len_a).tanh();
        let a = a0 * r + (d0 - self.delta) * th;
        let da = a0 + (d0 - self.delta) * (1.0 - th * th) / self.len_a;
        let tc = (r / self.len_c).tanh();
        let c = self.mid0() + FRAC_PI_2 * r * r - c1 * r * tc;
        let dc = PI * r - c1 * (tc + r / self.len_c * (1.0 - tc * tc));
        let ts = (r / self.len_shape).tanh();
        let eta = ts * ts;
        let deta = 2.0 * ts * (1.0 - ts * ts) / self.len_shape;
        let (k, dk) = shape_area(self.m, eta);
        let b = PI * r * r / (k * a);
        let db = b * (2.0 / r - da / a - dk * deta / k);
        Params { r, c, a, b, eta, dc, da, db, deta }
    }

    /// `∫₀^ψ R·∂R/∂r dφ` for `ψ ∈ [0, π/2]`.
    fn quadrant_integral(&self, pr: &Params, psi: f64) -> f64 {
        let tol = 1e-13 * pr.r.max(1e-6);
        integrate(
            |phi| {
                let q = radial(pr, self.m, phi);
                q.r * q.r_r
            },
            0.0,
            psi,
            tol,
        )
    }

    /// `G(Φ) = ∫₀^Φ J dφ`, where `q` is the quadrant integral.
    fn g(&self, pr: &Params, q: f64, phi: f64) -> f64 {
        let swept = if phi <= FRAC_PI_2 {
            self.quadrant_integral(pr, phi)
        } else if phi <= PI {
            2.0 * q - self.quadrant_integral(pr, PI - phi)
        } else if phi <= 1.5 * PI {
            2.0 * q + self.quadrant_integral(pr, phi - PI)
        } else {
            4.0 * q - self.quadrant_integral(pr, TAU - phi)
        };
        swept + pr.dc * radial(pr, self.m, phi).r * phi.sin()
    }

    /// Image of `(u, v)` with `u² + v² ≤ r_max²`.
    pub fn evaluate(&self, u: f64, v: f64) -> (f64, f64) {
        let r = u.hypot(v);
        if r < 1e-300 {
            return (self.mid0(), 0.5);
        }
        let pr = self.params(r);
        let q = self.quadrant_integral(&pr, FRAC_PI_2);
        let theta = v.atan2(u).rem_euclid(TAU);
        let target = theta / TAU * 4.0 * q;
        let phi = brent_root(|f| self.g(&pr, q, f) - target, 0.0, TAU, 1e-15);
        let rad = radial(&pr, self.m, phi).r;
        (pr.c + rad * phi.cos(), 0.5 + rad * phi.sin())
    }

    fn jacobian_density(&self, pr: &Params, phi: f64) -> f64 {
        let q = radial(pr, self.m, phi);
        q.r * q.r_r + pr.dc * (q.r * phi.cos() + q.r_phi * phi.sin())
    }

    fn radius_grid(&self) -> Vec<f64> {
        let r_max = self.r_max();
        let mut g: Vec<f64> = (1..=300).map(|i| r_max * (i as f64 / 300.0).powi(2)).collect();
        g.extend((1..=200).map(|i| 1e-3 * self.e * (2e4f64).powf(i as f64 / 200.0)));
        g.retain(|r| *r > 0.0 && *r <= r_max);
        g
    }

    /// Worst normalized margin over the edge, height and Jacobian checks and
    /// the radius where it occurs; stops at the first violation. The
    /// Jacobian floor tapers to zero at `r_max`, where the lower edge of the
    /// rectangles stops moving.
    pub fn feasibility(&self) -> (f64, f64) {
        let grid = self.radius_grid();
        let mut worst = (f64::INFINITY, 0.0);
        let params: Vec<Params> = grid.iter().map(|&r| self.params(r)).collect();
        for pr in &params {
            let r = pr.r;
            let m = ((upper(r) - (pr.c + pr.a)) / self.e)
                .min(((pr.c - pr.a) - lower(r, self.e)) / self.e)
                .min(((r + self.e) * FRAC_1_SQRT_2 - pr.b) / self.e);
            if !(m >= 0.0) {
                return (m, r);
            }
            if m < worst.0 {
                worst = (m, r);
            }
        }
        for pr in &params {
            let r = pr.r;
            let floor = J_FLOOR * ((self.r_max() - r) / (4.0 * self.e)).min(1.0);
            for j in 0..128 {
                let phi = (j as f64 + 0.5) * TAU / 128.0;
                let m = self.jacobian_density(pr, phi) / r - floor + 1e-12;
                if !(m >= 0.0) {
                    return (m, r);
                }
                worst.0 = worst.0.min(m);
            }
        }
        worst
    }

    /// Deterministic search, smallest exponent first.
    fn search(e: f64) -> Result<Profile> {
        let mut best = (f64::NEG_INFINITY, 0.0);
        for m in 2..=12 {
            for len_a in [3.0, 2.0, 5.0] {
                for len_c in [1.0, 0.6, 1.5] {
                    for len_shape in [3.0, 1.0, 10.0] {
                        let prof = Profile::new(e, m, len_a, len_c, len_shape);
                        let (margin, r) = prof.feasibility();
                        if margin >= 0.0 {
                            return Ok(prof);
                        }
                        if margin > best.0 {
                            best = (margin, r);
                        }
                    }
                }
            }
        }
        Err(Error::InfeasibleContainment { margin: best.0 * e, radius: best.1 })
    }
}

/// The rescaled and, for the plus side, rotated curve family on `B²(R)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskRectFamily {
    pub variant: DiskRectVariant,
    pub outer_radius: f64,
    pub epsilon: f64,
    pub profile: Profile,
}

impl DiskRectFamily {
    pub fn build(variant: DiskRectVariant, outer_radius: f64, epsilon: f64) -> Result<Self> {
        if let DiskRectVariant::MinusBlowup { lambda } | DiskRectVariant::PlusBlowup { lambda } = variant {
            if !(lambda > 0.0 && lambda < 1.0) {
                return Err(Error::InvalidArgument(format!("λ must lie in (0, 1), got {lambda}")));
            }
        }
        let k = variant.scale();
        if !(epsilon > 0.0 && epsilon < k * FRAC_1_SQRT_2) {
            return Err(Error::InvalidArgument(format!("ε must lie in (0, k/√2), got {epsilon}")));
        }
        let r_max = k * FRAC_1_SQRT_2 - epsilon;
        if !(outer_radius > 0.0 && outer_radius <= r_max * (1.0 + 1e-12)) {
            return Err(Error::InvalidArgument(format!("R must lie in (0, {r_max}], got {outer_radius}")));
        }
        let profile = Profile::search(epsilon / k)?;
        Ok(DiskRectFamily { variant, outer_radius, epsilon, profile })
    }

    pub fn scale(&self) -> f64 {
        self.variant.scale()
    }

    /// Target rectangle for radius `r`.
    pub fn rect_of(&self, r: f64) -> Rect {
        let k = self.scale();
        let top = FRAC_PI_4 * k * k + FRAC_PI_2 * r * r;
        let bottom = top - PI * FRAC_1_SQRT_2 * k * r;
        let half = r / (2f64.sqrt() * k);
        let (s_min, s_max) = if self.variant.is_plus() {
            (FRAC_PI_2 * k * k - top, FRAC_PI_2 * k * k - bottom)
        } else {
            (bottom, top)
        };
        Rect { s_min, s_max, t_min: 0.5 - half, t_max: 0.5 + half }
    }

    pub fn evaluate(&self, u: f64, v: f64) -> Result<(f64, f64)> {
        let r = u.hypot(v);
        if !(r <= self.outer_radius) {
            return Err(Error::DomainViolation(format!("|(u, v)| = {r} exceeds R = {}", self.outer_radius)));
        }
        Ok(self.eval_unchecked(u, v))
    }

    pub(crate) fn eval_unchecked(&self, u: f64, v: f64) -> (f64, f64) {
        let k = self.scale();
        let (s, t) = self.profile.evaluate(u / k, v / k);
        if self.variant.is_plus() {
            (FRAC_PI_2 * k * k - k * k * s, 1.0 - t)
        } else {
            (k * k * s, t)
        }
    }

    /// Margin of the image of `(u, v)` inside `rect_of(|(u, v)| + ε)`.
    pub fn containment_margin(&self, u: f64, v: f64) -> Result<f64> {
        let (s, t) = self.evaluate(u, v)?;
        Ok(self.rect_of(u.hypot(v) + self.epsilon).margin(s, t))
    }

    /// Upper bound on `s` over the circle of radius `r` (lower bound for the
    /// plus side).
    pub fn s_extreme(&self, r: f64) -> f64 {
        let k = self.scale();
        let top = FRAC_PI_4 * k * k + FRAC_PI_2 * r * r;
        if self.variant.is_plus() {
            FRAC_PI_2 * k * k - top
        } else {
            top
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::jacobian_fd4;

    #[test]
    fn shape_area_limits() {
        assert!((shape_area(3, 0.0).0 - PI).abs() < 1e-13);
        let (k, dk) = shape_area(4, 0.4);
        let fd = (shape_area(4, 0.4 + 1e-6).0 - shape_area(4, 0.4 - 1e-6).0) / 2e-6;
        assert!((dk - fd).abs() < 1e-7 && k > PI);
    }

    #[test]
    fn parameter_derivatives_match_differences() {
        let prof = Profile::new(0.05, 4, 3.0, 1.0, 3.0);
        for r in [0.003, 0.04, 0.2, 0.6] {
            let p = prof.params(r);
            let h = 1e-6;
            let (hi, lo) = (prof.params(r + h), prof.params(r - h));
            for (d, x, y) in [(p.dc, hi.c, lo.c), (p.da, hi.a, lo.a), (p.db, hi.b, lo.b), (p.deta, hi.eta, lo.eta)] {
                assert!((d - (x - y) / (2.0 * h)).abs() < 1e-6 * (1.0 + d.abs()), "r = {r}");
            }
            for phi in [0.3, 1.2, 2.5, 4.0] {
                let q = radial(&p, prof.m, phi);
                let fr = (radial(&hi, prof.m, phi).r - radial(&lo, prof.m, phi).r) / (2.0 * h);
                let fphi = (radial(&p, prof.m, phi + h).r - radial(&p, prof.m, phi - h).r) / (2.0 * h);
                assert!((q.r_r - fr).abs() < 1e-6 && (q.r_phi - fphi).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn area_preserving_and_contained() {
        let fam = DiskRectFamily::build(DiskRectVariant::MinusCp2, FRAC_1_SQRT_2 - 0.05, 0.05).unwrap();
        let f = |x: &[f64]| {
            let (s, t) = fam.evaluate(x[0], x[1]).unwrap();
            vec![s, t]
        };
        for (u, v) in [(0.001, 0.0), (0.01, -0.02), (0.05, 0.03), (-0.3, 0.2), (0.1, -0.6), (-0.45, -0.45), (0.0, 0.6)] {
            let j = jacobian_fd4(f, &[u, v], 1e-5);
            let det = j[(0, 0)] * j[(1, 1)] - j[(0, 1)] * j[(1, 0)];
            assert!((det - 1.0).abs() < 1e-6, "det {det} at ({u}, {v})");
            assert!(fam.containment_margin(u, v).unwrap() >= 0.0);
        }
    }

    #[test]
    fn epsilon_grid_is_feasible() {
        for e in [0.1, 0.02, 0.01] {
            let fam = DiskRectFamily::build(DiskRectVariant::MinusCp2, FRAC_1_SQRT_2 - e, e).unwrap();
            assert!(fam.profile.feasibility().0 >= 0.0);
        }
    }

    #[test]
    fn scaled_family_keeps_area_and_rectangles() {
        let lambda: f64 = 0.5;
        let k = (1.0 - lambda * lambda).sqrt();
        let fam = DiskRectFamily::build(DiskRectVariant::MinusBlowup { lambda }, k * FRAC_1_SQRT_2 - 0.05, 0.05).unwrap();
        let f = |x: &[f64]| {
            let (s, t) = fam.evaluate(x[0], x[1]).unwrap();
            vec![s, t]
        };
        for (u, v) in [(0.02, 0.01), (-0.2, 0.3), (0.5, -0.1)] {
            let j = jacobian_fd4(f, &[u, v], 1e-5);
            assert!((j[(0, 0)] * j[(1, 1)] - j[(0, 1)] * j[(1, 0)] - 1.0).abs() < 1e-6);
            assert!(fam.containment_margin(u, v).unwrap() >= 0.0);
            assert!(fam.evaluate(u, v).unwrap().0 <= fam.s_extreme(u.hypot(v)));
        }
        let rect = fam.rect_of(0.3);
        assert!((rect.s_max - (FRAC_PI_4 * k * k + FRAC_PI_2 * 0.09)).abs() < 1e-15);
        assert!((rect.t_max - (0.5 + 0.3 / (2f64.sqrt() * k))).abs() < 1e-15);
    }

    #[test]
    fn plus_side_is_rotated_minus_side() {
        let m = DiskRectFamily::build(DiskRectVariant::MinusCp2, 0.6, 0.05).unwrap();
        let p = DiskRectFamily::build(DiskRectVariant::PlusCp2, 0.6, 0.05).unwrap();
        let (s, t) = m.evaluate(0.2, -0.1).unwrap();
        let (sp, tp) = p.evaluate(0.2, -0.1).unwrap();
        assert!((s + sp - FRAC_PI_2).abs() < 1e-14 && (t + tp - 1.0).abs() < 1e-14);
    }
}
