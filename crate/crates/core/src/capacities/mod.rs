//! Capacity certificates and the length-minimality engine.
//!
//! A [`Certificate`] owns its premises, so every premise tree is finite and
//! acyclic by construction; [`Certificate::check_closure`] additionally
//! rejects failed premises and repeated ids along a branch.

mod hz;
pub mod pipeline;

pub use hz::{hz_admissibility, hz_lower_bound, HzConfig};

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dynamics::{classify_starts, Hamiltonian, OrbitConfig, TrajectoryClassification, Verdict};
use crate::embeddings::{Space, SymplecticMapSpec, VerificationRecord};
use crate::error::{Error, Result};
use crate::geometry::ManifoldModel;
use crate::numeric::substream;
use crate::regions::GraphRegion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    GromovLowerBound,
    HzAdmissible,
    HzLowerBound,
    CapacityLowerBound,
    CapacityAreaPremise,
    NoShortOrbit,
    LengthMinimal,
    VolumeObstruction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub id: String,
    pub kind: CertificateKind,
    pub subject: String,
    pub statement: String,
    pub value: Option<f64>,
    pub pass: bool,
    /// Named numeric parameters (`epsilon`, `nu`, `lambda`, ...).
    pub params: BTreeMap<String, f64>,
    pub premises: Vec<Certificate>,
    /// Facts taken on trust: cited theorems and user-supplied values.
    pub assertions: Vec<String>,
    pub evidence: serde_json::Value,
    /// Backed by a closed-form oracle rather than sampling.
    pub analytic: bool,
}

impl Certificate {
    fn new(kind: CertificateKind, id: String, subject: String, statement: String) -> Self {
        Certificate {
            id,
            kind,
            subject,
            statement,
            value: None,
            pass: true,
            params: BTreeMap::new(),
            premises: Vec::new(),
            assertions: Vec::new(),
            evidence: serde_json::Value::Null,
            analytic: false,
        }
    }

    fn param(mut self, key: &str, v: f64) -> Self {
        self.params.insert(key.into(), v);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    /// Fails if any premise in the tree failed or an id repeats along a
    /// branch.
    pub fn check_closure(&self) -> Result<()> {
        fn walk<'a>(c: &'a Certificate, path: &mut Vec<&'a str>) -> Result<()> {
            if path.contains(&c.id.as_str()) {
                return Err(Error::InsufficientPremises(format!("certificate {} cites itself", c.id)));
            }
            if !c.pass {
                return Err(Error::InsufficientPremises(format!("premise {} did not pass", c.id)));
            }
            path.push(&c.id);
            for p in &c.premises {
                walk(p, path)?;
            }
            path.pop();
            Ok(())
        }
        walk(self, &mut Vec::new())
    }

    /// Ids of every certificate in the tree, root first.
    pub fn premise_ids(&self) -> Vec<String> {
        let mut out = vec![self.id.clone()];
        for p in &self.premises {
            out.extend(p.premise_ids());
        }
        out
    }
}

/// Append-only certificate collection; merging is a union by id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CertificateStore {
    entries: Vec<Certificate>,
}

impl CertificateStore {
    pub fn push(&mut self, c: Certificate) {
        if self.get(&c.id).is_none() {
            self.entries.push(c);
        }
    }

    pub fn merge(&mut self, other: CertificateStore) {
        for c in other.entries {
            self.push(c);
        }
    }

    pub fn get(&self, id: &str) -> Option<&Certificate> {
        self.entries.iter().find(|c| c.id == id)
    }

    pub fn of_kind(&self, kind: CertificateKind) -> impl Iterator<Item = &Certificate> {
        self.entries.iter().filter(move |c| c.kind == kind)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn all(&self) -> &[Certificate] {
        &self.entries
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct R1Entry {
    /// Smallest positive length of a loop class; `f64::INFINITY` allowed.
    pub value: f64,
    pub citation: String,
    pub user_asserted: bool,
}

/// `r₁(M)` values keyed by manifold label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct R1Registry {
    pub entries: BTreeMap<String, R1Entry>,
}

/// Registry with the shipped entry `r₁(CP²) = π`.
pub fn r1_registry() -> R1Registry {
    let mut entries = BTreeMap::new();
    entries.insert(
        ManifoldModel::Cp2.label(),
        R1Entry {
            value: PI,
            citation: "pi_1(Ham(CP2)) = Z_3, generated by the full rotation t -> diag(e^{2 pi i t}, 1, 1), of length pi"
                .into(),
            user_asserted: false,
        },
    );
    R1Registry { entries }
}

impl R1Registry {
    pub fn get(&self, m: &ManifoldModel) -> Option<&R1Entry> {
        self.entries.get(&m.label())
    }

    /// Records a user-supplied value with its provenance.
    pub fn assert_value(&mut self, m: &ManifoldModel, value: f64, provenance: &str) -> Result<()> {
        if !(value > 0.0) {
            return Err(Error::InvalidArgument(format!("r1 must be positive or infinite, got {value}")));
        }
        self.entries.insert(
            m.label(),
            R1Entry { value, citation: format!("user-asserted: {provenance}"), user_asserted: true },
        );
        Ok(())
    }
}

/// `c(N) ≥ πr²` from a verified ball embedding `B^{2n}(r) → N`.
pub fn gromov_lower_bound(target: &Space, map: &dyn SymplecticMapSpec, record: &VerificationRecord) -> Result<Certificate> {
    if record.map != map.name() {
        return Err(Error::UnverifiedMap(format!("record is for '{}', not '{}'", record.map, map.name())));
    }
    if !record.pass {
        return Err(Error::UnverifiedMap(format!(
            "{}: residual {:.3e}, margin {:.3e}, failures {}",
            record.map, record.pullback_residual_max, record.containment_margin_min, record.failures
        )));
    }
    if map.target() != *target {
        return Err(Error::UnverifiedMap(format!("{} does not map into {}", map.name(), target.label())));
    }
    let r = map.ball_radius().ok_or_else(|| Error::UnverifiedMap(format!("{} has no ball domain", map.name())))?;
    let value = PI * r * r;
    let mut c = Certificate::new(
        CertificateKind::GromovLowerBound,
        format!("gromov[{}]", map.name()),
        target.label(),
        format!("c_G >= pi r^2 = {value:.10} via a verified embedding of a ball of radius {r:.10}"),
    )
    .param("radius", r);
    c.value = Some(value);
    c.evidence = serde_json::to_value(record).expect("record serializes");
    Ok(c)
}

/// Gromov bound for a graph region, tagged with the region's `ν` and side.
pub fn region_gromov_bound(region: &GraphRegion, map: &dyn SymplecticMapSpec, record: &VerificationRecord) -> Result<Certificate> {
    let target = Space::Region { manifold: region.base().clone() };
    let mut c = gromov_lower_bound(&target, map, record)?;
    let side = side_name(region);
    c.id = format!("gromov[{}; nu={}]", map.name(), region.nu);
    c.subject = format!("R^{side}(nu/2) over {}", region.base().label());
    c.params.insert("nu".into(), region.nu);
    Ok(c.param(&format!("side_{side}"), 1.0))
}

fn side_name(region: &GraphRegion) -> &'static str {
    match region.side {
        crate::regions::Side::Below => "below",
        crate::regions::Side::Above => "above",
    }
}

/// `c(H) = min(inf_ν c(R_H^−(ν/2)), inf_ν c(R_H^+(ν/2)))` bounded below by
/// the best certificate per `(side, ν)`, minimised over `ν` and sides.
pub fn capacity_of_hamiltonian(h_name: &str, below: &[Certificate], above: &[Certificate]) -> Result<Certificate> {
    if below.is_empty() {
        return Err(Error::MissingSide("below".into()));
    }
    if above.is_empty() {
        return Err(Error::MissingSide("above".into()));
    }
    let side_bound = |certs: &[Certificate]| -> f64 {
        let mut per_nu: BTreeMap<u64, f64> = BTreeMap::new();
        for c in certs.iter().filter(|c| c.pass) {
            let nu = c.params.get("nu").copied().unwrap_or(f64::NAN);
            let v = c.value.unwrap_or(f64::NEG_INFINITY);
            let e = per_nu.entry(nu.to_bits()).or_insert(f64::NEG_INFINITY);
            *e = e.max(v);
        }
        per_nu.values().copied().fold(f64::INFINITY, f64::min)
    };
    let (lo, hi) = (side_bound(below), side_bound(above));
    let value = lo.min(hi);
    let mut c = Certificate::new(
        CertificateKind::CapacityLowerBound,
        format!("capacity[{h_name}]"),
        h_name.into(),
        format!("c({h_name}) >= {value:.10} (below side {lo:.10}, above side {hi:.10})"),
    );
    c.pass = value.is_finite();
    c.value = Some(value);
    c.premises = below.iter().chain(above).cloned().collect();
    Ok(c)
}

/// Recorded capacity-area inequality for `M × D(a)`, `dim M ∈ {2, 4}`.
pub fn capacity_area_premise(m: &ManifoldModel) -> Result<Certificate> {
    let dim = match m {
        ManifoldModel::ProductWithDisk { base, .. } => base.real_dim(),
        other => other.real_dim(),
    };
    if !(dim == 2 || dim == 4) {
        return Err(Error::Unsupported(format!("capacity-area premise in dimension {dim}")));
    }
    let mut c = Certificate::new(
        CertificateKind::CapacityAreaPremise,
        format!("capacity-area[{}]", m.label()),
        m.label(),
        "c(M x D(a)) <= a for c = c_HZ and c = c_G, M compact (at infinity) of dimension 2 or 4".into(),
    )
    .param("dimension", dim as f64);
    c.assertions.push(
        "capacity-area inequality for products of a compact symplectic manifold of dimension two or four with a disk (cited theorem)"
            .into(),
    );
    c.analytic = true;
    Ok(c)
}

/// `vol B⁶(r) = π³r⁶/6`.
pub fn ball6_volume(r: f64) -> f64 {
    PI.powi(3) * r.powi(6) / 6.0
}

/// Passes (obstruction established) when `vol B⁶(r)` exceeds the region's
/// Monte Carlo volume by more than three standard errors.
pub fn volume_obstruction(r: f64, region: &GraphRegion, samples: usize, seed: u64) -> Certificate {
    let ball = ball6_volume(r);
    let vol = region.monte_carlo_volume(samples, seed);
    let obstructed = ball > vol.value + 3.0 * vol.stderr;
    let side = side_name(region);
    let subject = format!("R^{side}(nu/2) of {} over {}", region.hamiltonian().raw().name(), region.base().label());
    let statement = if obstructed {
        format!("no ball of radius {r} embeds: vol B6 = {ball:.6} > vol region = {:.6}", vol.value)
    } else {
        format!("volume does not obstruct radius {r}: vol B6 = {ball:.6} <= vol region = {:.6}", vol.value)
    };
    let mut c = Certificate::new(
        CertificateKind::VolumeObstruction,
        format!("volume-obstruction[{subject}; r={r}]"),
        subject,
        statement,
    )
    .param("radius", r)
    .param("nu", region.nu)
    .param("ball_volume", ball)
    .param("region_volume", vol.value)
    .param("region_stderr", vol.stderr);
    if let Some(l) = region.base().lambda() {
        c.params.insert("lambda".into(), l);
    }
    c.pass = obstructed;
    c.value = Some(ball - vol.value);
    c
}

/// No non-constant closed orbit of period `≤ t_max` among `starts`
/// Liouville-uniform starts. A failure carries the first periodic orbit as
/// witness.
pub fn no_short_orbit(h: &dyn Hamiltonian, t_max: f64, starts: usize, seed: u64) -> Result<Certificate> {
    let pts: Vec<_> = (0..starts).map(|i| h.manifold().sample(&mut substream(seed, i as u64))).collect();
    let out = classify_starts(h, &pts, t_max, &OrbitConfig::default())?;
    Ok(no_short_orbit_from(h, t_max, seed, &out))
}

pub(crate) fn no_short_orbit_from(h: &dyn Hamiltonian, t_max: f64, seed: u64, out: &[TrajectoryClassification]) -> Certificate {
    let witness = out.iter().find(|c| c.is_periodic());
    let inconclusive = out.iter().filter(|c| matches!(c.verdict, Verdict::Inconclusive { .. })).count();
    let fixed = out.iter().filter(|c| c.verdict == Verdict::Fixed).count();
    let mut c = Certificate::new(
        CertificateKind::NoShortOrbit,
        format!("no-short-orbit[{} on {}; T<={t_max}]", h.name(), h.manifold().label()),
        format!("{} on {}", h.name(), h.manifold().label()),
        match witness {
            Some(w) => format!(
                "periodic orbit of period {:.8} <= {t_max} found from start #{}",
                w.period_estimate.unwrap_or(f64::NAN),
                w.index
            ),
            None => format!("no non-constant closed orbit of period <= {t_max} among {} starts", out.len()),
        },
    )
    .param("t_max", t_max)
    .param("starts", out.len() as f64)
    .param("seed", seed as f64)
    .param("fixed", fixed as f64)
    .param("inconclusive", inconclusive as f64);
    c.pass = witness.is_none() && inconclusive == 0 && h.is_autonomous();
    c.evidence = match witness {
        Some(w) => serde_json::json!({ "witness": w }),
        None => serde_json::json!({ "min_return_distance_seen": out.iter().filter_map(|c| c.return_distance).fold(f64::INFINITY, f64::min) }),
    };
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    AmongHomotopicPaths,
    Globally,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// `c(H) ≥ L(H)` from capacity lower bounds of both graph regions.
    Capacity,
    /// `c_HZ(H) ≥ L(H)` for autonomous `H` without short closed orbits.
    NoShortOrbit,
}

/// Everything the engine may consume.
#[derive(Debug, Clone, Default)]
pub struct LengthInputs {
    pub hamiltonian: String,
    pub manifold: Option<ManifoldModel>,
    pub length: f64,
    pub length_error: f64,
    pub capacity: Option<Certificate>,
    /// Accepted shortfall `L(H) − c(H)` on the capacity route.
    pub allowed_slack: f64,
    pub no_short_orbit: Option<Certificate>,
    pub premise: Option<Certificate>,
    pub r1: Option<R1Entry>,
    /// Extra records attached to the result (not premises).
    pub attachments: Vec<Certificate>,
}

/// Assembles a `LengthMinimal` certificate for the path `φ_t^H, t ∈ [0,1]`.
pub fn length_minimal_certificate(inputs: LengthInputs) -> Result<Certificate> {
    let m = inputs.manifold.clone().ok_or_else(|| Error::InsufficientPremises("manifold".into()))?;
    let premise = match inputs.premise {
        Some(p) if p.pass => p,
        _ => return Err(Error::InsufficientPremises("capacity-area premise".into())),
    };
    let l = inputs.length;
    let cap_ok = inputs
        .capacity
        .as_ref()
        .filter(|c| c.pass && c.value.is_some_and(|v| v >= l - inputs.allowed_slack));
    let orbit_ok = inputs.no_short_orbit.as_ref().filter(|c| c.pass);
    let (route, support) = match (cap_ok, orbit_ok) {
        (Some(c), _) => (Route::Capacity, c.clone()),
        (None, Some(o)) => (Route::NoShortOrbit, o.clone()),
        (None, None) => {
            let mut why = Vec::new();
            match &inputs.capacity {
                Some(c) if c.pass => why.push(format!(
                    "capacity bound {:.6} below L(H) = {l:.6} minus slack {:.3e}",
                    c.value.unwrap_or(f64::NAN),
                    inputs.allowed_slack
                )),
                Some(_) => why.push("capacity certificate did not pass".into()),
                None => why.push("capacity certificate".into()),
            }
            match &inputs.no_short_orbit {
                Some(o) => why.push(format!("no-short-orbit check failed: {}", o.statement)),
                None => why.push("no-short-orbit certificate".into()),
            }
            return Err(Error::InsufficientPremises(why.join("; ")));
        }
    };
    let c_value = if route == Route::Capacity { support.value } else { None };
    let global = inputs.r1.as_ref().filter(|r| l <= r.value / 2.0 + inputs.length_error);
    let scope = if global.is_some() { Scope::Globally } else { Scope::AmongHomotopicPaths };
    let slack = c_value.map(|c| c - l);
    let scope_text = match scope {
        Scope::Globally => "globally length minimizing",
        Scope::AmongHomotopicPaths => "length minimizing among all homotopic paths",
    };
    let mut statement = format!(
        "the path phi_t of {} on {}, t in [0,1], is {scope_text}",
        inputs.hamiltonian,
        m.label()
    );
    if let Some(s) = slack.filter(|s| *s < 0.0) {
        let _ = write!(statement, " (up to stated slack {s:.6})");
    }
    let mut c = Certificate::new(
        CertificateKind::LengthMinimal,
        format!("length-minimal[{} on {}]", inputs.hamiltonian, m.label()),
        format!("{} on {}", inputs.hamiltonian, m.label()),
        statement,
    )
    .param("length", l)
    .param("length_error", inputs.length_error)
    .param("allowed_slack", inputs.allowed_slack);
    if let Some(s) = slack {
        c.params.insert("slack".into(), s);
    }
    if let Some(v) = c_value {
        c.params.insert("capacity".into(), v);
    }
    c.value = Some(l);
    c.premises = vec![support, premise];
    if route == Route::NoShortOrbit {
        c.assertions.push("c_HZ(H) >= L(H) for autonomous H whose flow has no non-constant closed orbit of period <= 1 (cited)".into());
    }
    c.assertions.push("c(H) >= L(H) plus the capacity-area inequality imply minimality among homotopic paths (cited)".into());
    if let Some(r) = global {
        c.params.insert("r1".into(), r.value);
        c.assertions.push(format!("r1({}) = {} [{}]", m.label(), r.value, r.citation));
        c.assertions.push("c(H) = L(H) <= r1(M)/2 implies global minimality (cited)".into());
    }
    c.evidence = serde_json::json!({
        "route": route,
        "scope": scope,
        "attachments": inputs.attachments,
    });
    c.analytic = false;
    c.check_closure()?;
    Ok(c)
}

/// Human-readable rendering of a certificate tree.
pub fn render_report(c: &Certificate) -> String {
    let mut out = String::new();
    render_into(c, 0, &mut out);
    if c.kind == CertificateKind::LengthMinimal {
        out.push_str("\nArgument:\n");
        let route = c.evidence.get("route").and_then(|r| r.as_str()).unwrap_or("");
        let l = c.params.get("length").copied().unwrap_or(f64::NAN);
        if route == "capacity" {
            let cap = c.params.get("capacity").copied().unwrap_or(f64::NAN);
            let _ = writeln!(out, "  1. Verified ball embeddings give c(H) >= {cap:.10} on both graph regions.");
            let _ = writeln!(out, "  2. L(H) = {l:.10}; slack c(H) - L(H) = {:.3e}.", cap - l);
        } else {
            let _ = writeln!(out, "  1. H is autonomous and has no non-constant closed orbit of period <= 1 (sampled).");
            let _ = writeln!(out, "  2. Hence c_HZ(H) >= L(H) = {l:.10}.");
        }
        let _ = writeln!(out, "  3. The capacity-area inequality holds for the base manifold.");
        let _ = writeln!(out, "  Conclusion: {}.", c.statement);
    }
    out
}

fn render_into(c: &Certificate, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let mark = if c.pass { "PASS" } else { "FAIL" };
    let _ = writeln!(out, "{pad}[{mark}] {:?} {}", c.kind, c.id);
    let _ = writeln!(out, "{pad}  {}", c.statement);
    for a in &c.assertions {
        let _ = writeln!(out, "{pad}  premise: {a}");
    }
    for p in &c.premises {
        render_into(p, depth + 1, out);
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::dynamics::MomentHamiltonian;
    use crate::embeddings::{verify_map, Corrupted, IdentityDisk};

    #[test]
    fn identity_disk_gromov_bound() {
        let map = IdentityDisk { area: 2.0 };
        let rec = verify_map(&map, 100, 1e-8, 1);
        let c = gromov_lower_bound(&map.target(), &map, &rec).unwrap();
        assert!((c.value.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unverified_map_is_rejected() {
        let inner: Arc<dyn SymplecticMapSpec> = Arc::new(IdentityDisk { area: 2.0 });
        let map = Corrupted::new(inner, 1.01).unwrap();
        let rec = verify_map(&map, 50, 1e-6, 1);
        assert!(matches!(gromov_lower_bound(&map.target(), &map, &rec), Err(Error::UnverifiedMap(_))));
    }

    fn cert(v: f64, nu: f64) -> Certificate {
        let mut c = Certificate::new(CertificateKind::GromovLowerBound, format!("g{v}{nu}"), "x".into(), "".into());
        c.value = Some(v);
        c.param("nu", nu)
    }

    #[test]
    fn capacity_takes_inf_over_nu_and_sides() {
        let below = [cert(1.0, 0.1), cert(1.2, 0.1), cert(1.1, 0.01)];
        let above = [cert(1.3, 0.1)];
        let c = capacity_of_hamiltonian("H", &below, &above).unwrap();
        assert_eq!(c.value, Some(1.1));
        assert!(matches!(capacity_of_hamiltonian("H", &[], &above), Err(Error::MissingSide(_))));
    }

    #[test]
    fn premise_dimensions() {
        assert!(capacity_area_premise(&ManifoldModel::Cp2).is_ok());
        assert!(capacity_area_premise(&ManifoldModel::disk(1.0).unwrap()).is_ok());
        let big = ManifoldModel::product(ManifoldModel::Cp2, 1.0).unwrap();
        assert!(capacity_area_premise(&big).is_ok());
    }

    #[test]
    fn engine_needs_premise_and_route() {
        let m = ManifoldModel::Cp2;
        let base = LengthInputs { hamiltonian: "P".into(), manifold: Some(m.clone()), length: 1.0, ..Default::default() };
        assert!(matches!(length_minimal_certificate(base.clone()), Err(Error::InsufficientPremises(_))));
        let with_premise = LengthInputs { premise: Some(capacity_area_premise(&m).unwrap()), ..base };
        let err = length_minimal_certificate(with_premise.clone()).unwrap_err();
        assert!(err.to_string().contains("capacity certificate"));
        let mut cap = cert(1.0, 0.1);
        cap.kind = CertificateKind::CapacityLowerBound;
        let ok = length_minimal_certificate(LengthInputs {
            capacity: Some(cap),
            r1: r1_registry().get(&m).cloned(),
            ..with_premise
        })
        .unwrap();
        assert!(ok.statement.contains("globally"));
        assert!(ok.check_closure().is_ok());
        assert!(render_report(&ok).contains("Conclusion"));
    }

    #[test]
    fn self_citation_is_rejected() {
        let mut c = cert(1.0, 0.1);
        c.premises.push(c.clone());
        assert!(c.check_closure().is_err());
    }

    #[test]
    fn registry_override_records_provenance() {
        let mut r = r1_registry();
        let b = ManifoldModel::blowup(0.5).unwrap();
        assert!(r.get(&b).is_none());
        r.assert_value(&b, 2.0, "test").unwrap();
        assert!(r.get(&b).unwrap().user_asserted);
        assert!((r.get(&ManifoldModel::Cp2).unwrap().value - PI).abs() < 1e-15);
    }

    #[test]
    fn doubled_p_has_a_short_orbit() {
        let h = MomentHamiltonian::p(ManifoldModel::Cp2).unwrap().scaled(2.0);
        let c = no_short_orbit(&h, 1.0, 8, 3).unwrap();
        assert!(!c.pass);
        assert!(c.evidence.get("witness").is_some());
    }
}
