//! `hofercert`: polytope plots, verification suites and certification.
//!
//! Settings come from defaults, then a `key = value` file given with
//! `--config`, then flags. Exit status is 0 when every check passes, 1 when
//! some check fails and 2 on a usage or runtime error.

pub mod suites;

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::capacities::pipeline::{certify, CertifyConfig};
use crate::embeddings::{BallSide, DiskRectFamily, DiskRectVariant};
use crate::error::{Error, Result};
use crate::export::{csv, write_atomic, SvgPlot};
use crate::geometry::{polytope, ManifoldModel};
use suites::{ball_image, j_image, run_suite, SuiteParams};

#[derive(Debug, Parser)]
#[command(name = "hofercert", version, about = "Hofer-length certificates for toric rotations of CP2 and its blow-up")]
struct Cli {
    /// File of `key = value` lines; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Default, Args)]
struct Opts {
    /// cp2, blowup, sphere, disk, cp1xdisk, cp2xdisk or blowupxdisk.
    #[arg(long)]
    manifold: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    disk_area: Option<f64>,
    #[arg(long)]
    hamiltonian: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    probes: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Asserted value of r1(M), recorded as an override.
    #[arg(long)]
    r1: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Moment polytope with optional overlays (i_minus, i_plus, j_minus,
    /// rect_minus, rect_plus).
    Polytope {
        #[command(flatten)]
        opts: Opts,
        #[arg(long)]
        overlay: Option<String>,
        /// Ball radius for overlays.
        #[arg(long = "s")]
        s: Option<f64>,
        /// Disk radius for the rectangle overlay.
        #[arg(long = "r")]
        r: Option<f64>,
    },
    /// Runs a verification suite: flows, embeddings, regions, hz, corrupted
    /// or all.
    Verify {
        #[command(flatten)]
        opts: Opts,
        #[arg(long)]
        suite: Option<String>,
    },
    /// Certifies length minimality of a Hamiltonian rotation.
    Certify {
        manifold_arg: Option<String>,
        hamiltonian_arg: Option<String>,
        #[command(flatten)]
        opts: Opts,
    },
}

/// Fully resolved settings, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub manifold: String,
    pub lambda: f64,
    pub disk_area: f64,
    pub hamiltonian: String,
    pub epsilon: f64,
    pub nu: f64,
    pub seed: u64,
    pub samples: usize,
    pub probes: usize,
    pub tol: f64,
    pub r1: Option<f64>,
    #[serde(skip)]
    pub out: PathBuf,
    pub suite: String,
    pub overlay: Option<String>,
    pub s: f64,
    pub r: f64,
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("config line {}: expected key = value", n + 1)))?;
        map.insert(k.trim().replace('-', "_"), v.trim().trim_matches('"').to_string());
    }
    Ok(map)
}

fn pick<T: FromStr>(flag: Option<T>, key: &str, file: &BTreeMap<String, String>, default: T) -> Result<T> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match file.get(key) {
        Some(s) => s.parse().map_err(|_| Error::InvalidArgument(format!("config key {key}: cannot parse '{s}'"))),
        None => Ok(default),
    }
}

fn pick_opt<T: FromStr>(flag: Option<T>, key: &str, file: &BTreeMap<String, String>) -> Result<Option<T>> {
    if flag.is_some() {
        return Ok(flag);
    }
    file.get(key)
        .map(|s| s.parse().map_err(|_| Error::InvalidArgument(format!("config key {key}: cannot parse '{s}'"))))
        .transpose()
}

fn resolve(opts: Opts, file: &BTreeMap<String, String>, extra: Extra) -> Result<Settings> {
    let samples = pick(opts.samples, "samples", file, 2000)?;
    Ok(Settings {
        manifold: pick(opts.manifold, "manifold", file, "cp2".into())?,
        lambda: pick(opts.lambda, "lambda", file, 0.5)?,
        disk_area: pick(opts.disk_area, "disk_area", file, 1.0)?,
        hamiltonian: pick(opts.hamiltonian, "hamiltonian", file, "P".into())?,
        epsilon: pick(opts.epsilon, "epsilon", file, 0.05)?,
        nu: pick(opts.nu, "nu", file, 0.1)?,
        seed: pick(opts.seed, "seed", file, 0)?,
        samples,
        probes: pick(opts.probes, "probes", file, samples)?,
        tol: pick(opts.tol, "tol", file, 1e-6)?,
        r1: pick_opt(opts.r1, "r1", file)?,
        out: pick(opts.out, "out", file, PathBuf::from("out"))?,
        suite: pick(extra.suite, "suite", file, "all".into())?,
        overlay: pick_opt(extra.overlay, "overlay", file)?,
        s: pick(extra.s, "s", file, 0.6)?,
        r: pick(extra.r, "r", file, 0.3)?,
    })
}

#[derive(Default)]
struct Extra {
    suite: Option<String>,
    overlay: Option<String>,
    s: Option<f64>,
    r: Option<f64>,
}

pub fn parse_manifold(name: &str, lambda: f64, disk_area: f64) -> Result<ManifoldModel> {
    match name.to_ascii_lowercase().as_str() {
        "cp2" => Ok(ManifoldModel::Cp2),
        "blowup" => ManifoldModel::blowup(lambda),
        "sphere" | "cp1" => Ok(ManifoldModel::Sphere),
        "disk" => ManifoldModel::disk(disk_area),
        "cp1xdisk" | "spherexdisk" => ManifoldModel::product(ManifoldModel::Sphere, disk_area),
        "cp2xdisk" => ManifoldModel::product(ManifoldModel::Cp2, disk_area),
        "blowupxdisk" => ManifoldModel::product(ManifoldModel::blowup(lambda)?, disk_area),
        other => Err(Error::InvalidArgument(format!("unknown manifold '{other}'"))),
    }
}

struct Output {
    pass: bool,
    json: serde_json::Value,
    text: String,
}

fn save(out: &Path, o: &Output) -> Result<()> {
    let json = serde_json::to_string_pretty(&o.json).map_err(|e| Error::Io(e.to_string()))?;
    write_atomic(&out.join("report.json"), &(json + "\n"))?;
    write_atomic(&out.join("report.txt"), &o.text)
}

fn fmt_pt((x, y): (f64, f64)) -> String {
    format!("({x:.4}, {y:.4})")
}

fn run_polytope(st: &Settings) -> Result<Output> {
    let m = parse_manifold(&st.manifold, st.lambda, st.disk_area)?;
    let poly = polytope(&m)?;
    let mut plot = SvgPlot::default();
    plot.polygon(&poly.vertices, "lightgray");
    for &v in &poly.vertices {
        plot.label(v, &fmt_pt(v));
    }
    write_atomic(&st.out.join("polytope.csv"), &poly.to_csv())?;
    let mut text = format!("polytope of {}\n", m.label());
    for &v in &poly.vertices {
        text.push_str(&format!("  vertex {}\n", fmt_pt(v)));
    }
    let mut overlay = serde_json::Value::Null;
    let mut pass = true;
    let n = st.samples.min(5000);
    match st.overlay.as_deref() {
        None => {}
        Some(name @ ("i_minus" | "i_plus")) => {
            let side = if name == "i_minus" { BallSide::Minus } else { BallSide::Plus };
            let pts = ball_image(side, st.s, m.clone(), n, st.seed)?;
            if m == ManifoldModel::Cp2 {
                let a = FRAC_PI_2 * st.s * st.s;
                let tri = match side {
                    BallSide::Minus => vec![(FRAC_PI_2 - a, 0.0), (FRAC_PI_2, 0.0), (FRAC_PI_2 - a, a)],
                    BallSide::Plus => vec![(0.0, 0.0), (a, 0.0), (0.0, a)],
                };
                plot.polygon(&tri, "steelblue");
            }
            let min_margin = pts.iter().map(|&p| poly.margin(p)).fold(f64::INFINITY, f64::min);
            pass = min_margin >= -1e-12;
            plot.points(&pts, "navy");
            let rows: Vec<Vec<f64>> = pts.iter().map(|&(x, y)| vec![x, y]).collect();
            write_atomic(&st.out.join(format!("{name}.csv")), &csv(&["x", "y"], &rows))?;
            text.push_str(&format!("  {name} image of B4({}): {} points, min polytope margin {min_margin:.3e}\n", st.s, pts.len()));
            overlay = serde_json::json!({ "overlay": name, "s": st.s, "points": pts.len(), "min_polytope_margin": min_margin });
        }
        Some("j_minus") => {
            let lambda = m.lambda().ok_or_else(|| Error::InvalidArgument("j_minus overlay needs the blow-up".into()))?;
            let pts = j_image(lambda, st.s, st.epsilon, n, st.seed)?;
            let min_margin = pts.iter().map(|&p| poly.margin(p)).fold(f64::INFINITY, f64::min);
            pass = min_margin >= -1e-12;
            plot.points(&pts, "darkred");
            let rows: Vec<Vec<f64>> = pts.iter().map(|&(x, y)| vec![x, y]).collect();
            write_atomic(&st.out.join("j_minus.csv"), &csv(&["x", "y"], &rows))?;
            text.push_str(&format!("  j_minus image: {} points, min polytope margin {min_margin:.3e}\n", pts.len()));
            overlay = serde_json::json!({ "overlay": "j_minus", "s": st.s, "points": pts.len(), "min_polytope_margin": min_margin });
        }
        Some(name @ ("rect_minus" | "rect_plus" | "rect")) => {
            let plus = name == "rect_plus";
            let variant = match (m.lambda(), plus) {
                (None, false) => DiskRectVariant::MinusCp2,
                (None, true) => DiskRectVariant::PlusCp2,
                (Some(lambda), false) => DiskRectVariant::MinusBlowup { lambda },
                (Some(lambda), true) => DiskRectVariant::PlusBlowup { lambda },
            };
            let outer = variant.scale() * FRAC_1_SQRT_2 - st.epsilon;
            let fam = DiskRectFamily::build(variant, outer, st.epsilon)?;
            let rect = fam.rect_of(st.r);
            let outer_rect = fam.rect_of(st.r + st.epsilon);
            let mut rp = SvgPlot::default();
            rp.rect(outer_rect.s_min, outer_rect.s_max, outer_rect.t_min, outer_rect.t_max, "white");
            rp.rect(rect.s_min, rect.s_max, rect.t_min, rect.t_max, "khaki");
            let corners = [(rect.s_min, rect.t_min), (rect.s_max, rect.t_min), (rect.s_max, rect.t_max), (rect.s_min, rect.t_max)];
            for &c in &corners {
                rp.label(c, &fmt_pt(c));
            }
            let circle: Vec<(f64, f64)> = (0..720)
                .map(|i| {
                    let th = i as f64 * std::f64::consts::TAU / 720.0;
                    fam.evaluate(st.r * th.cos(), st.r * th.sin())
                })
                .collect::<Result<_>>()?;
            let min_margin = circle.iter().map(|&(s, t)| outer_rect.margin(s, t)).fold(f64::INFINITY, f64::min);
            pass = min_margin >= -1e-12;
            rp.points(&circle, "darkgreen");
            write_atomic(&st.out.join(format!("{name}.svg")), &rp.render())?;
            let row = |r: f64, q: &crate::embeddings::Rect| vec![r, q.s_min, q.s_max, q.t_min, q.t_max];
            write_atomic(
                &st.out.join(format!("{name}.csv")),
                &csv(&["r", "s_min", "s_max", "t_min", "t_max"], &[row(st.r, &rect), row(st.r + st.epsilon, &outer_rect)]),
            )?;
            text.push_str(&format!(
                "  {name} rect_of({}) = [{:.6}, {:.6}] x [{:.6}, {:.6}]; circle of radius {} inside rect_of(r + eps) with margin {min_margin:.3e}\n",
                st.r, rect.s_min, rect.s_max, rect.t_min, rect.t_max, st.r
            ));
            overlay = serde_json::json!({
                "overlay": name, "r": st.r, "rect": rect, "outer_rect": outer_rect, "circle_margin_min": min_margin
            });
        }
        Some(other) => return Err(Error::InvalidArgument(format!("unknown overlay '{other}'"))),
    }
    write_atomic(&st.out.join("polytope.svg"), &plot.render())?;
    text.push_str(if pass { "PASS\n" } else { "FAIL\n" });
    Ok(Output {
        pass,
        json: serde_json::json!({ "command": "polytope", "settings": st, "vertices": poly.vertices, "overlay": overlay, "pass": pass }),
        text,
    })
}

fn run_verify(st: &Settings) -> Result<Output> {
    let params = SuiteParams { epsilon: st.epsilon, nu: st.nu, samples: st.probes, tol: st.tol, seed: st.seed };
    let reports = run_suite(&st.suite, &params)?;
    let pass = reports.iter().all(|r| r.pass);
    let mut text = String::new();
    for r in &reports {
        for c in &r.checks {
            text.push_str(&format!("{} {}/{}\n", if c.pass { "PASS" } else { "FAIL" }, r.suite, c.name));
        }
    }
    text.push_str(if pass { "PASS\n" } else { "FAIL\n" });
    Ok(Output {
        pass,
        json: serde_json::json!({ "command": "verify", "settings": st, "suites": reports, "pass": pass }),
        text,
    })
}

fn run_certify(st: &Settings) -> Result<Output> {
    let cfg = CertifyConfig {
        manifold: parse_manifold(&st.manifold, st.lambda, st.disk_area)?,
        hamiltonian: st.hamiltonian.clone(),
        epsilon: st.epsilon,
        nu: st.nu,
        probes: st.probes,
        pullback_tol: st.tol,
        length_samples: st.samples,
        orbit_starts: (st.samples / 10).clamp(20, 1000),
        volume_samples: 100 * st.samples,
        seed: st.seed,
        r1_override: st.r1,
    };
    let outcome = certify(&cfg)?;
    let pass = outcome.pass();
    Ok(Output {
        pass,
        json: serde_json::json!({ "command": "certify", "settings": st, "outcome": outcome, "pass": pass }),
        text: outcome.report.clone(),
    })
}

fn execute(cli: Cli) -> Result<(Settings, Output)> {
    let file = match &cli.config {
        Some(p) => parse_config(&std::fs::read_to_string(p)?)?,
        None => BTreeMap::new(),
    };
    let (st, kind) = match cli.command {
        Command::Polytope { opts, overlay, s, r } => {
            (resolve(opts, &file, Extra { overlay, s, r, ..Default::default() })?, 0)
        }
        Command::Verify { opts, suite } => (resolve(opts, &file, Extra { suite, ..Default::default() })?, 1),
        Command::Certify { manifold_arg, hamiltonian_arg, mut opts } => {
            opts.manifold = opts.manifold.or(manifold_arg);
            opts.hamiltonian = opts.hamiltonian.or(hamiltonian_arg);
            (resolve(opts, &file, Extra::default())?, 2)
        }
    };
    let out = match kind {
        0 => run_polytope(&st)?,
        1 => run_verify(&st)?,
        _ => run_certify(&st)?,
    };
    save(&st.out, &out)?;
    Ok((st, out))
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok((_, out)) => {
            print!("{}", out.text);
            i32::from(!out.pass)
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_is_overridden_by_flags() {
        let file = parse_config("epsilon = 0.02 # finer\nseed=7\n").unwrap();
        let opts = Opts { seed: Some(3), ..Default::default() };
        let st = resolve(opts, &file, Extra::default()).unwrap();
        assert_eq!(st.epsilon, 0.02);
        assert_eq!(st.seed, 3);
        assert_eq!(st.probes, 2000);
    }

    #[test]
    fn bad_config_line_is_rejected() {
        assert!(parse_config("epsilon 0.1").is_err());
    }

    #[test]
    fn manifold_names() {
        assert_eq!(parse_manifold("CP2", 0.5, 1.0).unwrap(), ManifoldModel::Cp2);
        assert!(parse_manifold("blowup", 1.5, 1.0).is_err());
        assert!(parse_manifold("torus", 0.5, 1.0).is_err());
    }
}
