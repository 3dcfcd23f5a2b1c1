use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{no_short_orbit_from, Certificate, CertificateKind};
use crate::dynamics::{classify_starts, Hamiltonian, OrbitConfig};
use crate::error::{Error, Result};
use crate::geometry::ManifoldModel;
use crate::numeric::substream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HzConfig {
    /// Liouville-uniform grid points for conditions (a)–(c).
    pub grid: usize,
    /// Orbit starts for condition (d).
    pub orbit_samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for HzConfig {
    fn default() -> Self {
        HzConfig { grid: 4000, orbit_samples: 200, seed: 0, tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Condition {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn disk_area(m: &ManifoldModel) -> Option<f64> {
    match m {
        ManifoldModel::Disk { area } | ManifoldModel::ProductWithDisk { disk_area: area, .. } => Some(*area),
        _ => None,
    }
}

/// Checks (a) `H = max H` outside a compact set, (b) `H = 0` on a nonempty
/// open set, (c) `0 ≤ H ≤ max H` on a sampled grid, and (d) no non-constant
/// periodic orbit of period `≤ 1` among sampled starts. The certificate's
/// value is `max H`; FAIL names the violated conditions.
pub fn hz_admissibility(h: &dyn Hamiltonian, cfg: &HzConfig) -> Result<Certificate> {
    if !h.is_autonomous() {
        return Err(Error::Unsupported("HZ admissibility of a time-dependent H".into()));
    }
    let m = h.manifold();
    let tol = cfg.tol;
    let pts: Vec<_> = (0..cfg.grid.max(1)).map(|i| m.sample(&mut substream(cfg.seed, i as u64))).collect();
    let vals: Vec<f64> = pts.iter().map(|p| h.value(p, 0.0)).collect();
    let sampled_max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sampled_min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let max_h = h.extrema(0.0).map_or(sampled_max, |e| e.1);
    let degenerate = !(max_h > tol);
    let mut conds = Vec::new();

    // (a)
    let a = match disk_area(m) {
        None => Condition { name: "a", pass: !degenerate, detail: "M is compact; take the compact set to be M".into() },
        Some(area) => {
            let area_of = |p: &crate::geometry::Point| PI * p.disk_coord().map_or(0.0, |z| z.norm_sqr());
            let inner = pts
                .iter()
                .zip(&vals)
                .filter(|(_, v)| **v < max_h - tol)
                .map(|(p, _)| area_of(p))
                .fold(0.0, f64::max);
            let cut = 0.5 * (inner + area);
            let outside = pts.iter().filter(|p| area_of(p) > cut).count();
            Condition {
                name: "a",
                pass: !degenerate && inner < area && outside > 0,
                detail: format!("H = max H on pi|z|^2 > {cut:.6} ({outside} grid points), area {area}"),
            }
        }
    };
    conds.push(a);

    // (b): a zero of H whose chart neighbourhood is also zero.
    let zero_open = pts.iter().zip(&vals).filter(|(_, v)| v.abs() <= tol).take(50).any(|(p, _)| {
        let chart = m.best_chart(p);
        let Ok(x) = m.to_chart(p, chart) else { return false };
        (0..x.len()).all(|i| {
            [1e-3, -1e-3].iter().all(|d| {
                let mut y = x.clone();
                y[i] += d;
                let q = m.from_chart(chart, &y);
                !m.contains(&q) || h.value(&q, 0.0).abs() <= tol
            })
        })
    });
    conds.push(Condition {
        name: "b",
        pass: zero_open && !degenerate,
        detail: if zero_open { "H vanishes on a neighbourhood of a grid point".into() } else { "no open zero set found".into() },
    });

    // (c)
    let c_ok = sampled_min >= -tol && sampled_max <= max_h + tol;
    conds.push(Condition {
        name: "c",
        pass: c_ok,
        detail: format!("grid range [{sampled_min:.3e}, {sampled_max:.6}], max H = {max_h:.6}"),
    });

    // (d)
    let starts: Vec<_> = (0..cfg.orbit_samples)
        .map(|i| m.sample(&mut substream(cfg.seed.wrapping_add(1), i as u64)))
        .collect();
    let orbits = classify_starts(h, &starts, 1.0, &OrbitConfig::default())?;
    let orbit_cert = no_short_orbit_from(h, 1.0, cfg.seed.wrapping_add(1), &orbits);
    conds.push(Condition { name: "d", pass: orbit_cert.pass, detail: orbit_cert.statement.clone() });

    let pass = conds.iter().all(|c| c.pass);
    let failed: Vec<&str> = conds.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    let subject = format!("{} on {}", h.name(), m.label());
    let statement = if pass {
        format!("H is HZ-admissible with max H = {max_h:.10}")
    } else if degenerate {
        format!("degenerate: max H = {max_h:.3e}; fails ({})", failed.join(", "))
    } else {
        format!("not admissible: fails ({})", failed.join(", "))
    };
    let mut cert = Certificate::new(CertificateKind::HzAdmissible, format!("hz-admissible[{subject}]"), subject, statement)
        .param("grid", cfg.grid as f64)
        .param("orbit_samples", cfg.orbit_samples as f64);
    cert.value = Some(max_h);
    cert.pass = pass;
    cert.evidence = serde_json::json!({
        "conditions": conds,
        "degenerate": degenerate,
        "witness": orbit_cert.evidence.get("witness"),
    });
    Ok(cert)
}

/// `c_HZ(N) ≥ max H` from a passing admissibility certificate.
pub fn hz_lower_bound(adm: &Certificate) -> Result<Certificate> {
    if adm.kind != CertificateKind::HzAdmissible || !adm.pass {
        return Err(Error::InsufficientPremises(format!("admissible Hamiltonian ({} did not pass)", adm.id)));
    }
    let v = adm.value.unwrap_or(0.0);
    let mut c = Certificate::new(
        CertificateKind::HzLowerBound,
        format!("hz-lower-bound[{}]", adm.subject),
        adm.subject.clone(),
        format!("c_HZ >= {v:.10}"),
    );
    c.value = Some(v);
    c.premises.push(adm.clone());
    Ok(c)
}
