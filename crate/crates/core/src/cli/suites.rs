//! Verification suites behind `hofercert verify`.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacities::{hz_admissibility, HzConfig};
use crate::dynamics::{closed_form_flow, flow_with, FlowOptions, Hamiltonian, MomentHamiltonian, RadialBump, Reparametrized};
use crate::embeddings::{
    verify_map, BallEmbedding, BallSide, BlowupChain, Corrupted, JMinus, MapPoint, ProductEmbedding, SymplecticMapSpec,
    VerificationRecord,
};
use crate::error::Result;
use crate::geometry::ManifoldModel;
use crate::numeric::substream;
use crate::regions::{gluing_volume_identity, region_area, NormalizedHamiltonian};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<Check>) -> Self {
        SuiteReport { suite: suite.into(), pass: checks.iter().all(|c| c.pass), checks }
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteParams {
    pub epsilon: f64,
    pub nu: f64,
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams { epsilon: 0.05, nu: 0.1, samples: 2000, tol: 1e-6, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowErrors {
    pub starts: usize,
    pub sup_error: f64,
    pub max_energy_drift: f64,
}

/// Integrated flow of `P` or `Q` against the exact rotation over `[0, 1]`.
pub fn flow_oracle(m: &ManifoldModel, name: &str, starts: usize, seed: u64) -> Result<FlowErrors> {
    let h = match name {
        "P" => MomentHamiltonian::p(m.clone())?,
        _ => MomentHamiltonian::q(m.clone())?,
    };
    let out: Vec<Result<(f64, f64)>> = (0..starts)
        .into_par_iter()
        .map(|i| {
            let x0 = m.sample(&mut substream(seed, i as u64));
            let traj = flow_with(&h, &x0, 0.0, 1.0, FlowOptions { tol: 1e-12, max_step: 0.02, record: true })?;
            let mut err: f64 = 0.0;
            for (t, p) in &traj.samples {
                err = err.max(m.distance(p, &closed_form_flow(name, &x0, *t)?));
            }
            Ok((err, traj.energy_drift.unwrap_or(0.0)))
        })
        .collect();
    let mut e = FlowErrors { starts, sup_error: 0.0, max_energy_drift: 0.0 };
    for r in out {
        let (a, b) = r?;
        e.sup_error = e.sup_error.max(a);
        e.max_energy_drift = e.max_energy_drift.max(b);
    }
    Ok(e)
}

pub fn flows_suite(p: &SuiteParams) -> Result<SuiteReport> {
    let starts = (p.samples / 20).clamp(10, 100);
    let mut checks = Vec::new();
    for m in [ManifoldModel::Cp2, ManifoldModel::blowup(0.5)?] {
        for name in ["P", "Q"] {
            let e = flow_oracle(&m, name, starts, p.seed)?;
            checks.push(Check {
                name: format!("flow of {name} on {}", m.label()),
                pass: e.sup_error <= 1e-6 && e.max_energy_drift <= 1e-8,
                detail: serde_json::to_value(e).expect("serializes"),
            });
        }
    }
    Ok(SuiteReport::new("flows", checks))
}

/// Every shipped map, in a fixed order.
pub fn shipped_maps(eps: f64, nu: f64) -> Result<Vec<Box<dyn SymplecticMapSpec>>> {
    let mut maps: Vec<Box<dyn SymplecticMapSpec>> = vec![
        Box::new(BallEmbedding::new(BallSide::Minus, 0.9, ManifoldModel::Cp2)?),
        Box::new(BallEmbedding::new(BallSide::Plus, 0.9, ManifoldModel::Cp2)?),
        Box::new(ProductEmbedding::psi_minus(eps, nu)?),
        Box::new(ProductEmbedding::psi_plus(eps, nu)?),
        Box::new(ProductEmbedding::psi_plus_blowup(0.5, eps, nu)?),
    ];
    for st in BlowupChain::new(0.5, 0.8)?.stages() {
        maps.push(Box::new(st));
    }
    maps.push(Box::new(JMinus::new(0.5, 0.8, eps)?));
    maps.push(Box::new(ProductEmbedding::upsilon_minus(0.5, eps, nu)?));
    Ok(maps)
}

/// Smallest `P − s` over `probes` images of `Ψ⁻`, with the bound it must
/// respect.
pub fn psi_minus_graph_margin(eps: f64, nu: f64, probes: usize, seed: u64) -> Result<(f64, f64)> {
    let psi = ProductEmbedding::psi_minus(eps, nu)?;
    let worst = (0..probes)
        .into_par_iter()
        .map(|i| {
            let x = psi.sample_domain(&mut substream(seed, i as u64));
            psi.evaluate(&x).map(|y| psi.graph_margin(&y))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok((worst, psi.graph_margin_bound()))
}

pub fn embeddings_records(p: &SuiteParams) -> Result<Vec<VerificationRecord>> {
    Ok(shipped_maps(p.epsilon, p.nu)?
        .iter()
        .enumerate()
        .map(|(i, m)| verify_map(m.as_ref(), p.samples, p.tol, p.seed.wrapping_add(i as u64)))
        .collect())
}

pub fn embeddings_suite(p: &SuiteParams) -> Result<SuiteReport> {
    let mut checks: Vec<Check> = embeddings_records(p)?
        .into_iter()
        .map(|r| Check { name: r.map.clone(), pass: r.pass, detail: serde_json::to_value(&r).expect("serializes") })
        .collect();
    let (worst, bound) = psi_minus_graph_margin(p.epsilon, p.nu, p.samples, p.seed)?;
    checks.push(Check {
        name: "Psi- graph margin".into(),
        pass: worst >= bound - 1e-9,
        detail: serde_json::json!({ "min_margin": worst, "bound": bound }),
    });
    Ok(SuiteReport::new("embeddings", checks))
}

/// Negative control: `i⁻` with `z₁` scaled by 1.01. Its report FAILs.
pub fn corrupted_suite(p: &SuiteParams) -> Result<SuiteReport> {
    let inner: Arc<dyn SymplecticMapSpec> = Arc::new(BallEmbedding::new(BallSide::Minus, 0.9, ManifoldModel::Cp2)?);
    let rec = verify_map(&Corrupted::new(inner, 1.01)?, p.samples.min(1000), p.tol, p.seed);
    Ok(SuiteReport::new(
        "corrupted",
        vec![Check { name: rec.map.clone(), pass: rec.pass, detail: serde_json::to_value(&rec).expect("serializes") }],
    ))
}

pub fn regions_suite(p: &SuiteParams) -> Result<SuiteReport> {
    let pm: Arc<dyn Hamiltonian> = Arc::new(MomentHamiltonian::p(ManifoldModel::Cp2)?);
    let area = region_area(&NormalizedHamiltonian::new(pm.clone(), 16, p.seed)?, p.nu);
    let mut checks = vec![Check {
        name: "area of R_P(nu) over CP2".into(),
        pass: area == FRAC_PI_2 + p.nu,
        detail: serde_json::json!({ "area": area, "expected": FRAC_PI_2 + p.nu }),
    }];
    let k: Arc<dyn Hamiltonian> = Arc::new(Reparametrized::new(pm.clone(), 0.5)?);
    let rep = gluing_volume_identity(pm, k, p.nu, (50 * p.samples).max(10_000), p.seed)?;
    checks.push(Check {
        name: "glued volumes of P and its reparametrization".into(),
        pass: rep.identity_holds,
        detail: serde_json::to_value(&rep).expect("serializes"),
    });
    Ok(SuiteReport::new("regions", checks))
}

pub fn hz_suite(p: &SuiteParams) -> Result<SuiteReport> {
    let cfg = HzConfig { grid: p.samples.max(200), orbit_samples: (p.samples / 10).clamp(20, 200), seed: p.seed, tol: 1e-9 };
    let mut checks = Vec::new();
    for m in [ManifoldModel::disk(1.0)?, ManifoldModel::product(ManifoldModel::Sphere, 1.0)?] {
        let ok = RadialBump::standard(m.clone(), 0.9)?;
        let c = hz_admissibility(&ok, &cfg)?;
        let floor = 0.9 * (1.0 - ok.grid_slack());
        checks.push(Check {
            name: format!("bump sup f'=0.9 on {}", m.label()),
            pass: c.pass && c.value.unwrap_or(0.0) >= floor - 1e-12,
            detail: serde_json::to_value(&c).expect("serializes"),
        });
        let bad = hz_admissibility(&RadialBump::standard(m.clone(), 1.1)?, &cfg)?;
        let has_witness = !bad.evidence["witness"].is_null();
        checks.push(Check {
            name: format!("bump sup f'=1.1 on {} is rejected", m.label()),
            pass: !bad.pass && has_witness,
            detail: serde_json::to_value(&bad).expect("serializes"),
        });
    }
    Ok(SuiteReport::new("hz", checks))
}

pub fn run_suite(name: &str, p: &SuiteParams) -> Result<Vec<SuiteReport>> {
    Ok(match name {
        "flows" => vec![flows_suite(p)?],
        "embeddings" => vec![embeddings_suite(p)?],
        "regions" => vec![regions_suite(p)?],
        "hz" => vec![hz_suite(p)?],
        "corrupted" => vec![corrupted_suite(p)?],
        "all" => vec![flows_suite(p)?, embeddings_suite(p)?, regions_suite(p)?, hz_suite(p)?],
        other => {
            return Err(crate::error::Error::InvalidArgument(format!(
                "unknown suite '{other}' (flows, embeddings, regions, hz, corrupted, all)"
            )))
        }
    })
}

/// Moment-map image of `B⁴(s)` under `i^±`, sampled.
pub fn ball_image(side: BallSide, s: f64, manifold: ManifoldModel, n: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    let m = BallEmbedding::new(side, s, manifold)?;
    moment_scatter(&m, n, seed)
}

/// Moment-map image of `j⁻` on `B⁴(s)` in the blow-up, sampled.
pub fn j_image(lambda: f64, s: f64, eps: f64, n: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    moment_scatter(&JMinus::new(lambda, s, eps)?, n, seed)
}

fn moment_scatter(m: &dyn SymplecticMapSpec, n: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    (0..n)
        .map(|i| {
            let x = m.sample_domain(&mut substream(seed, i as u64));
            match m.evaluate(&x)? {
                MapPoint::Manifold(crate::geometry::Point::Projective(q)) => crate::geometry::moment_map_rho(&q),
                _ => Err(crate::error::Error::Unsupported("moment image of a non-projective point".into())),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_image_is_in_shaded_triangle() {
        let pts = ball_image(BallSide::Minus, 0.6, ManifoldModel::Cp2, 200, 1).unwrap();
        for (x, y) in pts {
            assert!(x >= FRAC_PI_2 * (1.0 - 0.36) - 1e-12 && y >= 0.0 && x + y <= FRAC_PI_2 + 1e-12);
        }
    }

    #[test]
    fn corrupted_suite_fails() {
        let r = corrupted_suite(&SuiteParams { samples: 50, ..Default::default() }).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn regions_area_is_exact() {
        let r = regions_suite(&SuiteParams { samples: 200, ..Default::default() }).unwrap();
        assert!(r.checks[0].pass, "{:?}", r.checks[0]);
    }
}
