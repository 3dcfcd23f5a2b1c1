//! End-to-end certification: lengths, verified embeddings or the
//! no-short-orbit check, premises and the `r₁` registry.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    ball6_volume, capacity_area_premise, capacity_of_hamiltonian, length_minimal_certificate, no_short_orbit,
    r1_registry, region_gromov_bound, render_report, volume_obstruction, Certificate, CertificateKind, LengthInputs,
};
use crate::dynamics::{hofer_length, parse_hamiltonian, HamiltonianFn, MomentHamiltonian};
use crate::embeddings::{verify_map, ProductEmbedding, VerificationRecord};
use crate::error::{Error, Result};
use crate::geometry::ManifoldModel;
use crate::regions::{region_below, GraphRegion};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyConfig {
    pub manifold: ManifoldModel,
    pub hamiltonian: String,
    pub epsilon: f64,
    pub nu: f64,
    /// Probes per embedding verification.
    pub probes: usize,
    pub pullback_tol: f64,
    /// Spatial samples for the length estimate.
    pub length_samples: usize,
    /// Orbit starts for the no-short-orbit route.
    pub orbit_starts: usize,
    /// Monte Carlo samples for volume records.
    pub volume_samples: usize,
    pub seed: u64,
    /// User-asserted `r₁(M)`.
    pub r1_override: Option<f64>,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            manifold: ManifoldModel::Cp2,
            hamiltonian: "P".into(),
            epsilon: 0.05,
            nu: 0.1,
            probes: 2000,
            pullback_tol: 1e-6,
            length_samples: 2000,
            orbit_starts: 200,
            volume_samples: 200_000,
            seed: 0,
            r1_override: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyOutcome {
    pub certificate: Option<Certificate>,
    /// Why no certificate was issued.
    pub refusal: Option<String>,
    pub supporting: Vec<Certificate>,
    pub verifications: Vec<VerificationRecord>,
    pub report: String,
}

impl CertifyOutcome {
    pub fn pass(&self) -> bool {
        self.certificate.as_ref().is_some_and(|c| c.pass)
    }
}

/// The two graph-region embeddings for `P`: `(below, above)`.
pub fn p_embeddings(m: &ManifoldModel, eps: f64, nu: f64) -> Result<(ProductEmbedding, ProductEmbedding)> {
    match m {
        ManifoldModel::Cp2 => Ok((ProductEmbedding::psi_minus(eps, nu)?, ProductEmbedding::psi_plus(eps, nu)?)),
        ManifoldModel::BlowupCp2 { lambda } => Ok((
            ProductEmbedding::upsilon_minus(*lambda, eps, nu)?,
            ProductEmbedding::psi_plus_blowup(*lambda, eps, nu)?,
        )),
        other => Err(Error::Unsupported(format!("P-region embeddings over {}", other.label()))),
    }
}

/// Verifies one embedding and turns the record into a Gromov certificate.
pub fn certify_embedding(
    map: &ProductEmbedding,
    probes: usize,
    tol: f64,
    seed: u64,
) -> Result<(Certificate, VerificationRecord)> {
    let rec = verify_map(map, probes, tol, seed);
    let mut c = region_gromov_bound(&map.region, map, &rec)?;
    c.params.insert("epsilon".into(), map.epsilon());
    Ok((c, rec))
}

/// Certified lower bounds for `c(P)` over an ε grid, with the records.
pub fn gromov_epsilon_grid(
    m: &ManifoldModel,
    eps_grid: &[f64],
    nu: f64,
    probes: usize,
    seed: u64,
) -> Result<Vec<(f64, Certificate)>> {
    eps_grid
        .iter()
        .map(|&eps| {
            let (lo, hi) = p_embeddings(m, eps, nu)?;
            let (a, _) = certify_embedding(&lo, probes, 1e-6, seed)?;
            let (b, _) = certify_embedding(&hi, probes, 1e-6, seed.wrapping_add(1))?;
            Ok((eps, capacity_of_hamiltonian("P", &[a], &[b])?))
        })
        .collect()
}

/// `λ` above which `vol B⁶(1/√2) > vol R_Q^−(ν/2)` over the blow-up, by
/// bisection on Monte Carlo volumes with a fixed seed.
pub fn q_obstruction_threshold(nu: f64, samples: usize, seed: u64) -> Result<f64> {
    let target = ball6_volume(FRAC_1_SQRT_2);
    let vol = |lambda: f64| -> Result<f64> {
        let region = q_region(lambda, nu)?;
        Ok(region.monte_carlo_volume(samples, seed).value)
    };
    let (mut lo, mut hi) = (0.5, 0.999);
    if vol(lo)? <= target || vol(hi)? >= target {
        return Err(Error::InvalidArgument(format!("no volume threshold in [0.5, 0.999] for ν = {nu}")));
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if vol(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Closed-form `vol R_Q^−(ν/2)` over the blow-up (Liouville normalization),
/// integrating over the moment polytope.
pub fn q_region_volume_exact(lambda: f64, nu: f64) -> f64 {
    let b = FRAC_PI_2;
    let c = FRAC_PI_2 * lambda * lambda;
    4.0 * ((b.powi(3) - c.powi(3)) / 6.0 + 0.5 * nu * (b * b - c * c) / 2.0)
}

fn q_region(lambda: f64, nu: f64) -> Result<GraphRegion> {
    region_below(Arc::new(MomentHamiltonian::q(ManifoldModel::blowup(lambda)?)?), nu)
}

fn is_p(expr: &str) -> bool {
    expr.chars().filter(|c| !c.is_whitespace()).collect::<String>() == "P"
}

fn is_q(expr: &str) -> bool {
    expr.chars().filter(|c| !c.is_whitespace()).collect::<String>() == "Q"
}

/// Runs the full pipeline for `H` on `M`.
pub fn certify(cfg: &CertifyConfig) -> Result<CertifyOutcome> {
    let m = &cfg.manifold;
    let h: HamiltonianFn = parse_hamiltonian(&cfg.hamiltonian, m)?;
    let len = hofer_length(h.as_ref(), 1, cfg.length_samples, cfg.seed);
    let length = len.analytic.unwrap_or(len.value);
    let length_error = (len.value - length).abs().max(len.error);
    let premise = capacity_area_premise(m)?;
    let mut registry = r1_registry();
    if let Some(r1) = cfg.r1_override {
        registry.assert_value(m, r1, "command-line override")?;
    }
    let mut supporting = vec![premise.clone()];
    let mut verifications = Vec::new();
    let mut inputs = LengthInputs {
        hamiltonian: cfg.hamiltonian.clone(),
        manifold: Some(m.clone()),
        length,
        length_error,
        premise: Some(premise),
        r1: registry.get(m).cloned(),
        ..Default::default()
    };

    if is_p(&cfg.hamiltonian) && matches!(m, ManifoldModel::Cp2 | ManifoldModel::BlowupCp2 { .. }) {
        let k = m.lambda().map_or(1.0, |l| (1.0 - l * l).sqrt());
        let mut below = Vec::new();
        let mut above = Vec::new();
        for (i, nu) in [cfg.nu, 0.1 * cfg.nu].into_iter().enumerate() {
            let (lo, hi) = p_embeddings(m, cfg.epsilon, nu)?;
            let seed = cfg.seed.wrapping_add(10 * i as u64);
            let (a, ra) = certify_embedding(&lo, cfg.probes, cfg.pullback_tol, seed)?;
            let (b, rb) = certify_embedding(&hi, cfg.probes, cfg.pullback_tol, seed.wrapping_add(1))?;
            below.push(a);
            above.push(b);
            verifications.extend([ra, rb]);
        }
        let cap = capacity_of_hamiltonian(&cfg.hamiltonian, &below, &above)?;
        supporting.push(cap.clone());
        inputs.capacity = Some(cap);
        let e = cfg.epsilon;
        inputs.allowed_slack = PI * (2f64.sqrt() * k * e + e * e) + length_error;
    } else {
        let nso = no_short_orbit(h.as_ref(), 1.0, cfg.orbit_starts, cfg.seed)?;
        supporting.push(nso.clone());
        inputs.no_short_orbit = Some(nso);
        if is_q(&cfg.hamiltonian) {
            if let Some(lambda) = m.lambda() {
                let here = volume_obstruction(FRAC_1_SQRT_2, &q_region(lambda, cfg.nu)?, cfg.volume_samples, cfg.seed);
                let threshold = q_obstruction_threshold(cfg.nu, cfg.volume_samples / 4, cfg.seed)?;
                let beyond = (threshold + 0.5 * (1.0 - threshold)).min(0.999);
                let mut above =
                    volume_obstruction(FRAC_1_SQRT_2, &q_region(beyond, cfg.nu)?, cfg.volume_samples, cfg.seed);
                above.params.insert("threshold_lambda".into(), threshold);
                above.statement = format!(
                    "{}; capacity route for Q unavailable for lambda above ~{threshold:.4}",
                    above.statement
                );
                inputs.attachments = vec![here.clone(), above.clone()];
                supporting.extend([here, above]);
            }
        }
    }

    match length_minimal_certificate(inputs) {
        Ok(c) => {
            let mut report = render_report(&c);
            for s in supporting.iter().filter(|s| s.kind == CertificateKind::VolumeObstruction) {
                report.push_str(&format!("\nAttached: {}\n", s.statement));
            }
            Ok(CertifyOutcome { certificate: Some(c), refusal: None, supporting, verifications, report })
        }
        Err(Error::InsufficientPremises(why)) => {
            let mut report = format!("REFUSED: {} on {}\n  missing: {why}\n", cfg.hamiltonian, m.label());
            for s in &supporting {
                report.push_str(&render_report(s));
            }
            Ok(CertifyOutcome { certificate: None, refusal: Some(why), supporting, verifications, report })
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_q_volume_threshold_is_three_quarters_root() {
        let lambda = 0.75f64.powf(1.0 / 6.0);
        assert!((q_region_volume_exact(lambda, 0.0) - ball6_volume(FRAC_1_SQRT_2)).abs() < 1e-12);
        assert!((q_region_volume_exact(0.0, 0.0) - PI.powi(3) / 12.0).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_q_volume_matches_exact() {
        let r = q_region(0.5, 0.1).unwrap();
        let v = r.monte_carlo_volume(200_000, 4);
        assert!((v.value - q_region_volume_exact(0.5, 0.1)).abs() < 4.0 * v.stderr, "{v:?}");
    }

    #[test]
    fn doubled_p_is_refused() {
        let cfg = CertifyConfig { hamiltonian: "2P".into(), orbit_starts: 10, length_samples: 200, ..Default::default() };
        let out = certify(&cfg).unwrap();
        assert!(!out.pass());
        assert!(out.refusal.unwrap().contains("periodic orbit"));
    }
}
