//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use std::sync::Arc;
use std::time::{Duration, Instant};

use hofer_core::capacities::pipeline::{certify, certify_embedding, gromov_epsilon_grid, q_obstruction_threshold, CertifyConfig};
use hofer_core::capacities::{hz_admissibility, CertificateKind, HzConfig};
use hofer_core::cli::suites::{embeddings_records, flow_oracle, psi_minus_graph_margin, SuiteParams};
use hofer_core::dynamics::{
    classify_starts, hofer_length, Hamiltonian, HamiltonianFn, MomentHamiltonian, OrbitConfig, RadialBump,
    Reparametrized, Verdict,
};
use hofer_core::embeddings::{
    verify_map, BallEmbedding, BallSide, Corrupted, DiskRectFamily, DiskRectVariant, ProductEmbedding, SymplecticMapSpec,
};
use hofer_core::geometry::{polytope, ManifoldModel};
use hofer_core::numeric::substream;
use hofer_core::regions::{gluing_volume_identity, region_area, NormalizedHamiltonian};

type Outcome = Result<(bool, String), String>;

fn run(n: usize, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let res = f();
    let dt = start.elapsed();
    let (ok, detail) = match res {
        Ok((ok, d)) => (ok, d),
        Err(e) => (false, format!("error: {e}")),
    };
    let in_time = limit.is_none_or(|l| dt <= l);
    let pass = ok && in_time;
    let budget = limit.map_or(String::new(), |l| format!(" / limit {:.0} s", l.as_secs_f64()));
    println!(
        "{} {n:>2} {title}: {detail}{} [{:.1} s{budget}]",
        if pass { "PASS" } else { "FAIL" },
        if in_time { "" } else { "; over time budget" },
        dt.as_secs_f64()
    );
    pass
}

fn e(err: impl std::fmt::Display) -> String {
    err.to_string()
}

fn lengths() -> Outcome {
    let mut cases: Vec<(ManifoldModel, &str, f64)> = vec![(ManifoldModel::Cp2, "P", FRAC_PI_2)];
    for l in [0.3, 0.5, 0.7] {
        let m = ManifoldModel::blowup(l).map_err(e)?;
        cases.push((m.clone(), "P", FRAC_PI_2 * (1.0 - l * l)));
        cases.push((m, "Q", FRAC_PI_2));
    }
    let mut ok = true;
    let (mut worst_est, mut worst_an, mut slowest) = (0.0f64, 0.0f64, 0.0f64);
    for (m, name, expected) in cases {
        let h = if name == "P" { MomentHamiltonian::p(m) } else { MomentHamiltonian::q(m) }.map_err(e)?;
        let t0 = Instant::now();
        let est = hofer_length(&h, 1, 2000, 7);
        slowest = slowest.max(t0.elapsed().as_secs_f64());
        let an = h.analytic_length().ok_or("no analytic length")?;
        worst_est = worst_est.max((est.value - expected).abs());
        worst_an = worst_an.max((an - expected).abs());
        ok &= (est.value - expected).abs() <= 1e-3 && (an - expected).abs() <= 1e-12;
    }
    ok &= slowest < 10.0;
    Ok((ok, format!("7 cases, max |L_est - L| = {worst_est:.2e}, max analytic error {worst_an:.1e}, slowest {slowest:.2} s")))
}

fn flows() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for m in [ManifoldModel::Cp2, ManifoldModel::blowup(0.5).map_err(e)?] {
        for name in ["P", "Q"] {
            let r = flow_oracle(&m, name, 100, 11).map_err(e)?;
            ok &= r.sup_error <= 1e-6 && r.max_energy_drift <= 1e-8;
            parts.push(format!("{name}/{}: sup {:.1e}, drift {:.1e}", m.label(), r.sup_error, r.max_energy_drift));
        }
    }
    Ok((ok, parts.join("; ")))
}

fn orbits() -> Outcome {
    let m = ManifoldModel::Cp2;
    let starts: Vec<_> = (0..1000).map(|i| m.sample(&mut substream(21, i))).collect();
    let cfg = OrbitConfig::default();
    let p = MomentHamiltonian::p(m.clone()).map_err(e)?;
    let short = classify_starts(&p, &starts, 1.0, &cfg)
        .map_err(e)?
        .iter()
        .filter(|c| matches!(c.verdict, Verdict::Periodic { period } if period <= 1.0))
        .count();
    let two_p = p.scaled(2.0);
    let res = classify_starts(&two_p, &starts[..200], 1.0, &cfg).map_err(e)?;
    let periods: Vec<f64> = res
        .iter()
        .filter_map(|c| match c.verdict {
            Verdict::Periodic { period } => Some(period),
            _ => None,
        })
        .collect();
    let worst = periods.iter().map(|t| (t - 1.0).abs()).fold(0.0, f64::max);
    let ok = short == 0 && !periods.is_empty() && worst <= 1e-4;
    Ok((
        ok,
        format!(
            "P: {short} periodic verdicts with T <= 1 over 1000 starts; 2P: {} of 200 periodic, max |T - 1| = {worst:.1e}",
            periods.len()
        ),
    ))
}

fn embeddings() -> Outcome {
    let params = SuiteParams { epsilon: 0.05, nu: 0.1, samples: 10_000, tol: 1e-6, seed: 31 };
    let recs = embeddings_records(&params).map_err(e)?;
    let worst = recs.iter().map(|r| r.pullback_residual_max).fold(0.0, f64::max);
    let failed: Vec<&str> = recs.iter().filter(|r| !r.pass).map(|r| r.map.as_str()).collect();
    let (margin, bound) = psi_minus_graph_margin(0.05, 0.1, 10_000, 32).map_err(e)?;
    let eps = 0.05;
    let stated = SQRT_2 * PI / 2.0 * eps - FRAC_PI_2 * eps * eps;
    let ok = failed.is_empty() && (bound - stated).abs() < 1e-15 && margin >= stated - 1e-9;
    Ok((
        ok,
        format!(
            "{} maps x 10^4 probes, max residual {worst:.1e}, failed {:?}; Psi- graph margin {margin:.6} >= {stated:.6}",
            recs.len(),
            failed
        ),
    ))
}

fn gromov() -> Outcome {
    let eps = 0.05;
    let nu = 0.1;
    let mut ok = true;
    let mut parts = Vec::new();
    let cp2 = [ProductEmbedding::psi_minus(eps, nu).map_err(e)?, ProductEmbedding::psi_plus(eps, nu).map_err(e)?];
    let blow = [
        ProductEmbedding::upsilon_minus(0.5, eps, nu).map_err(e)?,
        ProductEmbedding::psi_plus_blowup(0.5, eps, nu).map_err(e)?,
    ];
    for (maps, expected, floor) in [(&cp2, PI * (FRAC_1_SQRT_2 - eps).powi(2), 1.32), (&blow, PI * ((3.0f64 / 8.0).sqrt() - eps).powi(2), 0.0)] {
        for (i, map) in maps.iter().enumerate() {
            let (c, _) = certify_embedding(map, 2000, 1e-6, 41 + i as u64).map_err(e)?;
            let v = c.value.unwrap_or(f64::NAN);
            ok &= c.pass && (v - expected).abs() < 1e-12 && v >= floor;
            parts.push(format!("{:.6}", v));
        }
    }
    let grid = gromov_epsilon_grid(&ManifoldModel::Cp2, &[0.1, 0.05, 0.02, 0.01], nu, 1000, 43).map_err(e)?;
    let vals: Vec<f64> = grid.iter().map(|(_, c)| c.value.unwrap_or(f64::NAN)).collect();
    let monotone = vals.windows(2).all(|w| w[1] > w[0]) && vals.iter().all(|v| *v < FRAC_PI_2);
    let gap = FRAC_PI_2 - vals[vals.len() - 1];
    let gap_bound = PI * (SQRT_2 * 0.01 + 1e-4);
    ok &= grid.iter().all(|(_, c)| c.pass) && monotone && gap <= gap_bound;
    Ok((
        ok,
        format!(
            "CP2 sides {} / {}, blow-up sides {} / {}; grid {:?}, final gap {gap:.5} <= {gap_bound:.5}",
            parts[0],
            parts[1],
            parts[2],
            parts[3],
            vals.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>()
        ),
    ))
}

fn regions() -> Outcome {
    let p: HamiltonianFn = Arc::new(MomentHamiltonian::p(ManifoldModel::Cp2).map_err(e)?);
    let nh = NormalizedHamiltonian::new(p.clone(), 64, 0).map_err(e)?;
    let mut exact = true;
    for nu in [0.0, 0.1, 0.25, 1.0] {
        exact &= region_area(&nh, nu) == FRAC_PI_2 + nu;
    }
    let k: HamiltonianFn = Arc::new(Reparametrized::new(p.clone(), 0.5).map_err(e)?);
    let rep = gluing_volume_identity(p, k, 0.1, 1_000_000, 51).map_err(e)?;
    Ok((
        exact && rep.identity_holds && rep.sigmas <= 3.0,
        format!(
            "area exact: {exact}; glued volumes {:.5} +- {:.5} vs {:.5} ({:.2} SE)",
            rep.lhs, rep.lhs_stderr, rep.rhs, rep.sigmas
        ),
    ))
}

fn engine() -> Outcome {
    let base = CertifyConfig::default();
    let a = certify(&CertifyConfig { seed: 61, ..base.clone() }).map_err(e)?;
    let ca = a.certificate.as_ref().ok_or("cp2 P refused")?;
    let ok_a = a.pass()
        && ca.statement.contains("globally length minimizing")
        && ca.params.get("r1").is_some_and(|r| (r - PI).abs() < 1e-15);

    let blow = ManifoldModel::blowup(0.5).map_err(e)?;
    let b = certify(&CertifyConfig { manifold: blow.clone(), seed: 62, ..base.clone() }).map_err(e)?;
    let cb = b.certificate.as_ref().ok_or("blowup P refused")?;
    let ok_b = b.pass()
        && cb.statement.contains("length minimizing among all homotopic paths")
        && cb.evidence["route"] == "capacity";

    let q = certify(&CertifyConfig { manifold: blow, hamiltonian: "Q".into(), seed: 63, ..base }).map_err(e)?;
    let cq = q.certificate.as_ref().ok_or("blowup Q refused")?;
    let obstructions: Vec<_> = q.supporting.iter().filter(|s| s.kind == CertificateKind::VolumeObstruction).collect();
    let threshold = obstructions.iter().find_map(|s| s.params.get("threshold_lambda").copied());
    let beyond = obstructions.iter().find(|s| s.params.contains_key("threshold_lambda"));
    let ok_q = q.pass()
        && cq.statement.contains("length minimizing among all homotopic paths")
        && cq.evidence["route"] == "no_short_orbit"
        && beyond.is_some_and(|s| s.pass)
        && threshold.is_some_and(|t| (t - 0.75f64.powf(1.0 / 6.0)).abs() < 0.02);
    let th = q_obstruction_threshold(0.1, 50_000, 64).map_err(e)?;
    Ok((
        ok_a && ok_b && ok_q,
        format!(
            "cp2 P global with r1 = pi: {ok_a}; blowup P homotopic via capacities: {ok_b}; blowup Q homotopic via orbits with obstruction above lambda ~ {th:.4}: {ok_q}"
        ),
    ))
}

fn negative_controls() -> Outcome {
    let inner: Arc<dyn SymplecticMapSpec> =
        Arc::new(BallEmbedding::new(BallSide::Minus, 0.9, ManifoldModel::Cp2).map_err(e)?);
    let rec = verify_map(&Corrupted::new(inner, 1.01).map_err(e)?, 1000, 1e-6, 71);
    let out = certify(&CertifyConfig { hamiltonian: "2P".into(), seed: 72, ..CertifyConfig::default() }).map_err(e)?;
    let refusal = out.refusal.clone().unwrap_or_default();
    let witness_period = out
        .supporting
        .iter()
        .find(|s| s.kind == CertificateKind::NoShortOrbit)
        .and_then(|s| s.evidence["witness"]["period_estimate"].as_f64());
    let ok = !rec.pass
        && rec.pullback_residual_max >= 1e-2
        && !out.pass()
        && refusal.contains("periodic orbit")
        && witness_period.is_some_and(|t| (t - 1.0).abs() <= 1e-4);
    Ok((
        ok,
        format!(
            "corrupted map residual {:.3e} (pass = {}); 2P refused with witness period {:?}",
            rec.pullback_residual_max, rec.pass, witness_period
        ),
    ))
}

fn figures() -> Outcome {
    let mut worst = 0.0f64;
    let mut track = |a: f64, b: f64| worst = worst.max((a - b).abs());
    let tri = polytope(&ManifoldModel::Cp2).map_err(e)?.vertices;
    let want = [(0.0, 0.0), (FRAC_PI_2, 0.0), (0.0, FRAC_PI_2)];
    if tri.len() != 3 {
        return Ok((false, "CP2 polytope is not a triangle".into()));
    }
    for (v, w) in tri.iter().zip(want) {
        track(v.0, w.0);
        track(v.1, w.1);
    }
    for l in [0.3, 0.5, 0.7] {
        let q = polytope(&ManifoldModel::blowup(l).map_err(e)?).map_err(e)?.vertices;
        let x = FRAC_PI_2 * (1.0 - l * l);
        let want = [(0.0, 0.0), (x, 0.0), (x, FRAC_PI_2 * l * l), (0.0, FRAC_PI_2)];
        if q.len() != 4 {
            return Ok((false, "blow-up polytope is not a quadrilateral".into()));
        }
        for (v, w) in q.iter().zip(want) {
            track(v.0, w.0);
            track(v.1, w.1);
        }
    }
    let eps = 0.05;
    let fams = [
        DiskRectFamily::build(DiskRectVariant::MinusCp2, FRAC_1_SQRT_2 - eps, eps).map_err(e)?,
        DiskRectFamily::build(DiskRectVariant::PlusCp2, FRAC_1_SQRT_2 - eps, eps).map_err(e)?,
    ];
    let k = (0.75f64).sqrt();
    let blow = DiskRectFamily::build(DiskRectVariant::MinusBlowup { lambda: 0.5 }, k * FRAC_1_SQRT_2 - eps, eps).map_err(e)?;
    for r in [0.0, 0.1, 0.3, 0.5, 0.6] {
        let lo_t = 0.5 - r / SQRT_2;
        let hi_t = 0.5 + r / SQRT_2;
        let m = fams[0].rect_of(r);
        track(m.s_min, FRAC_PI_4 + FRAC_PI_2 * r * r - PI / SQRT_2 * r);
        track(m.s_max, FRAC_PI_4 + FRAC_PI_2 * r * r);
        track(m.t_min, lo_t);
        track(m.t_max, hi_t);
        let p = fams[1].rect_of(r);
        track(p.s_min, FRAC_PI_4 - FRAC_PI_2 * r * r);
        track(p.s_max, FRAC_PI_4 - FRAC_PI_2 * r * r + PI / SQRT_2 * r);
        track(p.t_min, lo_t);
        track(p.t_max, hi_t);
        if r < k * FRAC_1_SQRT_2 {
            let k2 = k * k;
            let b = blow.rect_of(r);
            // The horizontal extent uses sqrt(1 - lambda^2), which gives the
            // rectangle area pi r^2 stated with the figure.
            track(b.s_min, FRAC_PI_4 * k2 + FRAC_PI_2 * r * r - PI / SQRT_2 * k * r);
            track(b.s_max, FRAC_PI_4 * k2 + FRAC_PI_2 * r * r);
            track(b.t_min, 0.5 - r / (2.0 - 2.0 * 0.25f64).sqrt());
            track(b.t_max, 0.5 + r / (2.0 - 2.0 * 0.25f64).sqrt());
            let area = (b.s_max - b.s_min) * (b.t_max - b.t_min);
            track(area, PI * r * r);
        }
    }
    Ok((worst <= 1e-12, format!("max deviation from vertex and rectangle labels {worst:.1e}")))
}

fn hz() -> Outcome {
    let cfg = HzConfig { seed: 81, ..HzConfig::default() };
    let mut ok = true;
    let mut parts = Vec::new();
    for m in [ManifoldModel::product(ManifoldModel::Sphere, 1.0).map_err(e)?, ManifoldModel::disk(1.0).map_err(e)?] {
        let good = RadialBump::standard(m.clone(), 0.9).map_err(e)?;
        let c = hz_admissibility(&good, &cfg).map_err(e)?;
        let floor = 0.9 * (1.0 - good.grid_slack());
        let v = c.value.unwrap_or(f64::NAN);
        let bad = hz_admissibility(&RadialBump::standard(m.clone(), 1.1).map_err(e)?, &cfg).map_err(e)?;
        let rejected = !bad.pass && bad.statement.contains("(d)") && !bad.evidence["witness"].is_null();
        ok &= c.pass && v >= floor && rejected;
        parts.push(format!("{}: value {v:.6} >= {floor:.6}, sup f' = 1.1 fails (d): {rejected}", m.label()));
    }
    Ok((ok, parts.join("; ")))
}

fn main() {
    let s = Duration::from_secs;
    let results = [
        run(1, "Hofer lengths", None, lengths),
        run(2, "flow oracle", Some(s(60)), flows),
        run(3, "orbit detection", Some(s(120)), orbits),
        run(4, "embedding verification", Some(s(300)), embeddings),
        run(5, "Gromov certificates", None, gromov),
        run(6, "quasi-cylinder arithmetic", None, regions),
        run(7, "certificate engine", None, engine),
        run(8, "negative controls", None, negative_controls),
        run(9, "figures", None, figures),
        run(10, "HZ admissibility", None, hz),
    ];
    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
