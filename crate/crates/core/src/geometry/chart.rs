//! Affine charts `{z_j ≠ 0}` with coordinates `w_k = z_k / z_j` (k ≠ j,
//! ascending), flattened to reals as `(Re w, Im w, …)`. Disk factors append
//! `(x, y)`.
//!
//! The chart form is `(i/2)∂∂̄ log(1 + |w|²)`, which gives lines area π and
//! makes `w ↦ [1 : w] ` agree with the ball model under
//! `ζ ↦ ζ / √(1 − |ζ|²)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{ManifoldModel, Point, ProjectivePoint};
use crate::error::{Error, Result};
use crate::numeric::{block_diag, standard_form};

/// `|z_j|²` below which chart `j` is reported as degenerate.
const CHART_FLOOR_SQ: f64 = 1e-6;

fn projective_chart(p: &ProjectivePoint, chart: usize) -> Result<Vec<f64>> {
    let z = p.coords();
    if chart >= z.len() {
        return Err(Error::InvalidArgument(format!("chart {chart} out of range")));
    }
    let zj = z[chart];
    if zj.norm_sqr() < CHART_FLOOR_SQ {
        return Err(Error::ChartDegenerate { chart, modulus: zj.norm() });
    }
    let mut out = Vec::with_capacity(2 * (z.len() - 1));
    for (k, zk) in z.iter().enumerate() {
        if k != chart {
            let w = zk / zj;
            out.push(w.re);
            out.push(w.im);
        }
    }
    Ok(out)
}

fn projective_from_chart(n: usize, chart: usize, coords: &[f64]) -> ProjectivePoint {
    let mut z = Vec::with_capacity(n);
    let mut it = coords.chunks(2);
    for k in 0..n {
        if k == chart {
            z.push(Complex64::new(1.0, 0.0));
        } else {
            let c = it.next().expect("chart coordinate count");
            z.push(Complex64::new(c[0], c[1]));
        }
    }
    ProjectivePoint::new(z).expect("chart point is nonzero")
}

/// Real matrix `M` with `ω(U, V) = Uᵀ M V` for the chart form at `coords`.
fn fubini_study_matrix(coords: &[f64]) -> DMatrix<f64> {
    let n = coords.len() / 2;
    let w: Vec<Complex64> = coords.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
    let big_n = 1.0 + w.iter().map(|c| c.norm_sqr()).sum::<f64>();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for a in 0..n {
        for b in 0..n {
            let delta = if a == b { big_n } else { 0.0 };
            let h = (Complex64::new(delta, 0.0) - w[a] * w[b].conj()) / (big_n * big_n);
            m[(2 * a, 2 * b)] = h.im;
            m[(2 * a, 2 * b + 1)] = h.re;
            m[(2 * a + 1, 2 * b)] = -h.re;
            m[(2 * a + 1, 2 * b + 1)] = h.im;
        }
    }
    m
}

impl ManifoldModel {
    /// Chart with the largest homogeneous coordinate; 0 for a bare disk.
    pub fn best_chart(&self, p: &Point) -> usize {
        match p.projective() {
            Some(q) => (0..q.len())
                .max_by(|&a, &b| q.norm_sq(a).total_cmp(&q.norm_sq(b)))
                .unwrap_or(0),
            None => 0,
        }
    }

    pub fn to_chart(&self, p: &Point, chart: usize) -> Result<Vec<f64>> {
        match p {
            Point::Projective(q) => projective_chart(q, chart),
            Point::Disk(z) => Ok(vec![z.re, z.im]),
            Point::Product(q, z) => {
                let mut c = projective_chart(q, chart)?;
                c.push(z.re);
                c.push(z.im);
                Ok(c)
            }
        }
    }

    pub fn from_chart(&self, chart: usize, coords: &[f64]) -> Point {
        match self {
            ManifoldModel::Disk { .. } => Point::Disk(Complex64::new(coords[0], coords[1])),
            ManifoldModel::ProductWithDisk { base, .. } => {
                let n = base.projective_len().expect("projective base");
                let split = coords.len() - 2;
                Point::Product(
                    projective_from_chart(n, chart, &coords[..split]),
                    Complex64::new(coords[split], coords[split + 1]),
                )
            }
            _ => Point::Projective(projective_from_chart(
                self.projective_len().expect("projective manifold"),
                chart,
                coords,
            )),
        }
    }

    /// Form matrix at chart coordinates `coords` of chart `chart`.
    pub fn form_matrix(&self, _chart: usize, coords: &[f64]) -> DMatrix<f64> {
        match self {
            ManifoldModel::Disk { .. } => standard_form(2),
            ManifoldModel::ProductWithDisk { .. } => {
                let split = coords.len() - 2;
                block_diag(&[&fubini_study_matrix(&coords[..split]), &standard_form(2)])
            }
            _ => fubini_study_matrix(coords),
        }
    }
}

/// Form matrix at `p` in its best chart.
pub fn symplectic_form_matrix(m: &ManifoldModel, p: &Point) -> Result<DMatrix<f64>> {
    symplectic_form_matrix_in(m, p, m.best_chart(p))
}

/// Form matrix at `p` in the requested chart.
pub fn symplectic_form_matrix_in(m: &ManifoldModel, p: &Point, chart: usize) -> Result<DMatrix<f64>> {
    let coords = m.to_chart(p, chart)?;
    Ok(m.form_matrix(chart, &coords))
}

/// Transition `chart from → chart to` on projective chart coordinates.
pub fn chart_transition(n: usize, from: usize, to: usize, coords: &[f64]) -> Result<Vec<f64>> {
    let p = projective_from_chart(n, from, coords);
    projective_chart(&p, to)
}

/// Analytic real Jacobian of [`chart_transition`].
pub fn chart_transition_jacobian(n: usize, from: usize, to: usize, coords: &[f64]) -> Result<DMatrix<f64>> {
    if from == to {
        return Ok(DMatrix::identity(coords.len(), coords.len()));
    }
    // z in chart `from`; index of each homogeneous coordinate among chart slots
    let slot = |k: usize| if k < from { k } else { k - 1 };
    let mut z = vec![Complex64::new(1.0, 0.0); n];
    for k in (0..n).filter(|&k| k != from) {
        let s = slot(k);
        z[k] = Complex64::new(coords[2 * s], coords[2 * s + 1]);
    }
    let zt = z[to];
    if zt.norm_sqr() < 1e-300 {
        return Err(Error::ChartDegenerate { chart: to, modulus: 0.0 });
    }
    let out_slot = |k: usize| if k < to { k } else { k - 1 };
    let dim = coords.len();
    let mut jac = DMatrix::zeros(dim, dim);
    let mut put = |row: usize, col: usize, d: Complex64| {
        jac[(2 * row, 2 * col)] += d.re;
        jac[(2 * row, 2 * col + 1)] -= d.im;
        jac[(2 * row + 1, 2 * col)] += d.im;
        jac[(2 * row + 1, 2 * col + 1)] += d.re;
    };
    for m in (0..n).filter(|&m| m != to) {
        let row = out_slot(m);
        // w'_m = z_m / z_to
        put(row, slot(to), -z[m] / (zt * zt));
        if m != from {
            put(row, slot(m), Complex64::new(1.0, 0.0) / zt);
        }
    }
    Ok(jac)
}
