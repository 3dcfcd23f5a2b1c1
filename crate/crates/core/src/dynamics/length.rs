use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::Hamiltonian;
use crate::geometry::Point;
use crate::numeric::{substream, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrema {
    pub min: f64,
    pub max: f64,
    /// Gain of the last refinement stage, summed over both ends.
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthEstimate {
    pub value: f64,
    pub error: f64,
    pub analytic: Option<f64>,
    pub time_steps: usize,
    pub spatial_samples: usize,
}

/// Compass search with a couple of random directions per sweep; moves are
/// rejected when they leave the manifold. `sign = 1` ascends.
fn refine(h: &dyn Hamiltonian, start: Point, t: f64, sign: f64, rng: &mut Rng) -> (f64, f64) {
    let m = h.manifold();
    let mut p = start;
    let mut best = sign * h.value(&p, t);
    let mut step = 0.1;
    let mut late_gain = 0.0;
    let mut iters = 0;
    while step > 1e-9 && iters < 4000 {
        iters += 1;
        let chart = m.best_chart(&p);
        let x = m.to_chart(&p, chart).expect("best chart is regular");
        let n = x.len();
        let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(2 * n + 2);
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut d = vec![0.0; n];
                d[i] = s;
                dirs.push(d);
            }
        }
        for _ in 0..2 {
            let d: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
            let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
            dirs.push(d.into_iter().map(|v| v / norm).collect());
        }
        let mut moved = false;
        for d in dirs {
            let y: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + step * b).collect();
            let q = m.from_chart(chart, &y);
            if !m.contains(&q) {
                continue;
            }
            let v = sign * h.value(&q, t);
            if v > best {
                if step < 1e-6 {
                    late_gain += v - best;
                }
                best = v;
                p = q;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    (sign * best, late_gain)
}

/// `(min_x H_t, max_x H_t)` from Liouville-uniform samples refined by local
/// search from the best few. A sampled estimate, so `max − min` approaches
/// the true oscillation from below.
pub fn sampled_extrema(h: &dyn Hamiltonian, t: f64, samples: usize, seed: u64) -> Extrema {
    let samples = samples.max(1);
    let m = h.manifold();
    let mut rng = substream(seed, 0);
    let mut pts: Vec<(f64, Point)> = (0..samples)
        .map(|_| {
            let p = m.sample(&mut rng);
            (h.value(&p, t), p)
        })
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let k = pts.len().min(4);
    let mut refine_rng = substream(seed, 1);
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut error = 0.0;
    for (_, p) in pts.iter().take(k) {
        let (v, g) = refine(h, p.clone(), t, -1.0, &mut refine_rng);
        if v < min {
            min = v;
            error = g;
        }
    }
    let mut error_hi = 0.0;
    for (_, p) in pts.iter().rev().take(k) {
        let (v, g) = refine(h, p.clone(), t, 1.0, &mut refine_rng);
        if v > max {
            max = v;
            error_hi = g;
        }
    }
    Extrema { min, max, error: error + error_hi }
}

/// `L(H) = ∫₀¹ max H_t − min H_t dt`. Autonomous `H` uses one slice;
/// otherwise composite Simpson over `time_steps` intervals (rounded up to
/// even).
pub fn hofer_length(h: &dyn Hamiltonian, time_steps: usize, spatial_samples: usize, seed: u64) -> LengthEstimate {
    let analytic = h.analytic_length();
    if h.is_autonomous() {
        let e = sampled_extrema(h, 0.0, spatial_samples, seed);
        return LengthEstimate {
            value: e.max - e.min,
            error: e.error,
            analytic,
            time_steps: 1,
            spatial_samples,
        };
    }
    let n = time_steps.max(2).div_ceil(2) * 2;
    let dt = 1.0 / n as f64;
    let mut value = 0.0;
    let mut error = 0.0;
    for i in 0..=n {
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let e = sampled_extrema(h, i as f64 * dt, spatial_samples, seed);
        value += w * (e.max - e.min);
        error += w * e.error;
    }
    LengthEstimate { value: value * dt / 3.0, error: error * dt / 3.0, analytic, time_steps: n, spatial_samples }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;
    use std::sync::Arc;

    use super::*;
    use crate::dynamics::{MomentHamiltonian, Reparametrized};
    use crate::geometry::ManifoldModel;

    #[test]
    fn length_of_p_on_cp2() {
        let h = MomentHamiltonian::p(ManifoldModel::Cp2).unwrap();
        let l = hofer_length(&h, 1, 2000, 3);
        assert!((l.value - FRAC_PI_2).abs() < 1e-3, "{l:?}");
        assert!(l.value <= FRAC_PI_2 + 1e-12);
    }

    #[test]
    fn length_scales_linearly() {
        let h = MomentHamiltonian::q(ManifoldModel::blowup(0.5).unwrap()).unwrap();
        let a = hofer_length(&h, 1, 500, 5);
        let b = hofer_length(&h.scaled(3.0), 1, 500, 5);
        assert!((b.value - 3.0 * a.value).abs() <= 3.0 * a.error + b.error + 1e-12);
    }

    #[test]
    fn reparametrized_length_matches_inner() {
        let p: crate::dynamics::HamiltonianFn = Arc::new(MomentHamiltonian::p(ManifoldModel::Cp2).unwrap());
        let k = Reparametrized::new(p, 0.5).unwrap();
        let l = hofer_length(&k, 16, 300, 1);
        assert!((l.value - FRAC_PI_2).abs() < 1e-3, "{l:?}");
    }
}
