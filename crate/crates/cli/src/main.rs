//! Command-line front end: symmetrisation, perimeter evaluation, inequality
//! checks, rigidity classification, counterexample generation, and
//! equality-case analysis. Every run writes a manifest with the SHA-256 of
//! its inputs so results are reproducible byte for byte.
//!
//! Exit codes: 0 success, 2 invalid input, 3 tolerance breach / inequality
//! violation.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use sha2::{Digest, Sha256};
use sphsym::equality::{
    direction_trace_capfield, verify_equality_conditions_capfield,
    verify_equality_conditions_voxel, verify_ode,
};
use sphsym::io::{
    fmt_f64, read_profile, read_set_spec, read_voxel, write_profile, write_set_spec, write_voxel,
};
use sphsym::perimeter::PerimeterReport;
use sphsym::rigidity::{
    classify, counterexample_cantor, counterexample_disconnect, counterexample_jump, probe_jump,
    rotation_separation_bound, RigidityReason,
};
use sphsym::symmetrize::{circular_symmetrize, perimeter_circular_symmetral, spherical_symmetrize};
use sphsym::{
    check_inequality, perimeter_capfield, perimeter_symmetral, CapFieldSet, Error, Verdict,
};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "sphsym", version, about = "Spherical and circular symmetrisation of sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Number of radial shells for sampled symmetrisation.
    #[arg(long, global = true, default_value_t = 4096)]
    grid: usize,
    /// Mesh resolution (strips and segments) for the n = 3 boundary mesh,
    /// and angular samples for sampled slices.
    #[arg(long, global = true, default_value_t = 512)]
    mesh: usize,
    /// Seed for all randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the spherical (or circular) symmetral of a set.
    Symmetrize {
        /// Cap-field set-spec JSON input.
        #[arg(long, conflicts_with = "voxel")]
        input: Option<PathBuf>,
        /// Voxel grid input (PGM-style for n = 2, slice-stacked CSV for n = 3).
        #[arg(long)]
        voxel: Option<PathBuf>,
        /// Circular instead of spherical symmetrisation.
        #[arg(long)]
        circular: bool,
        /// Circle-plane axes for circular symmetrisation, 1-based ("1,2").
        #[arg(long, default_value = "1,2")]
        axes: String,
    },
    /// Evaluate the perimeter of a symmetral (profile input) or a cap-field
    /// set (set-spec input).
    Perimeter {
        #[arg(long, conflicts_with = "set")]
        profile: Option<PathBuf>,
        #[arg(long)]
        set: Option<PathBuf>,
        /// Radial window "lo,hi" (hi may be "inf").
        #[arg(long, default_value = "0,inf")]
        window: String,
    },
    /// Verify P(E) >= P(F_v) for a cap-field set.
    CheckInequality {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, default_value = "0,inf")]
        window: String,
    },
    /// Classify rigidity of a profile and emit a witness when it fails.
    Rigidity {
        #[arg(long)]
        profile: PathBuf,
    },
    /// Generate an extremal counterexample of the requested kind.
    Counterexample {
        #[arg(long)]
        kind: CounterexampleKind,
        #[arg(long)]
        profile: PathBuf,
        /// Gluing radius (defaults to the first admissible one).
        #[arg(long)]
        r_bar: Option<f64>,
        /// Nesting fraction for jump/cantor constructions.
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        /// Rotation angle (defaults to half the allowed bound).
        #[arg(long)]
        gamma: Option<f64>,
        /// Accept any gamma (jump kind only), for probing beyond the bound.
        #[arg(long)]
        probe: bool,
    },
    /// Direction/barycentre traces, the barycentre ODE, and equality-case
    /// condition scores for a set.
    EqualityAnalyze {
        #[arg(long, conflicts_with = "voxel")]
        set: Option<PathBuf>,
        #[arg(long)]
        voxel: Option<PathBuf>,
        /// Radial interval "lo,hi" (defaults to the profile window).
        #[arg(long)]
        interval: Option<String>,
        #[arg(long, default_value_t = 256)]
        shells: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CounterexampleKind {
    Jump,
    Disconnect,
    Cantor,
}

const FULL: (f64, f64) = (0.0, f64::INFINITY);

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            std::process::exit(failure.code);
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ToleranceBreach(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: msg.into(),
    }
}

fn parse_window(s: &str) -> Result<(f64, f64), Failure> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(invalid(format!("window '{s}' must be 'lo,hi'")));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| invalid(format!("bad window bound '{}'", parts[0])))?;
    let hi = match parts[1].trim() {
        "inf" | "INF" | "Inf" => f64::INFINITY,
        t => t
            .parse()
            .map_err(|_| invalid(format!("bad window bound '{t}'")))?,
    };
    Ok((lo, hi))
}

fn sha256_hex(path: &Path) -> Result<String, Failure> {
    let bytes = fs::read(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    Ok(format!("{:x}", Sha256::digest(bytes)))
}

fn write_manifest(
    out: &Path,
    command: &str,
    config: serde_json::Value,
    inputs: &[&Path],
) -> Result<(), Failure> {
    let mut hashed = Vec::new();
    for p in inputs {
        hashed.push(json!({"path": p.display().to_string(), "sha256": sha256_hex(p)?}));
    }
    let manifest = json!({
        "command": command,
        "config": config,
        "inputs": hashed,
        "version": env!("CARGO_PKG_VERSION"),
    });
    write_json(&out.join("manifest.json"), &manifest)
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| invalid(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn perimeter_json(rep: &PerimeterReport) -> serde_json::Value {
    json!({
        "total": rep.total,
        "ac_part": rep.ac_part,
        "singular_part": rep.singular_part,
        "tangential_total": rep.tangential_total,
    })
}

fn write_shell_csv(path: &Path, rep: &PerimeterReport) -> Result<(), Failure> {
    let mut out = String::from("r,p,rescaled_slope,integrand,cumulative\n");
    for s in &rep.per_shell {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(s.r),
            fmt_f64(s.p),
            fmt_f64(s.rescaled_slope),
            fmt_f64(s.integrand),
            fmt_f64(s.cumulative)
        ));
    }
    fs::write(path, out).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn load_set(path: &Path) -> Result<CapFieldSet, Failure> {
    Ok(read_set_spec(path)?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let c = &cli.common;
    fs::create_dir_all(&c.out).map_err(|e| invalid(format!("{}: {e}", c.out.display())))?;
    match cli.command {
        Command::Symmetrize {
            input,
            voxel,
            circular,
            axes,
        } => cmd_symmetrize(c, input, voxel, circular, &axes),
        Command::Perimeter {
            profile,
            set,
            window,
        } => cmd_perimeter(c, profile, set, &window),
        Command::CheckInequality { set, window } => cmd_check_inequality(c, &set, &window),
        Command::Rigidity { profile } => cmd_rigidity(c, &profile),
        Command::Counterexample {
            kind,
            profile,
            r_bar,
            lambda,
            gamma,
            probe,
        } => cmd_counterexample(c, kind, &profile, r_bar, lambda, gamma, probe),
        Command::EqualityAnalyze {
            set,
            voxel,
            interval,
            shells,
        } => cmd_equality_analyze(c, set, voxel, interval.as_deref(), shells),
    }
}

fn cmd_symmetrize(
    c: &Common,
    input: Option<PathBuf>,
    voxel: Option<PathBuf>,
    circular: bool,
    axes: &str,
) -> Result<(), Failure> {
    let (v, source) = match (&input, &voxel) {
        (Some(path), None) => {
            let e = load_set(path)?;
            // Rasterize at a spacing resolving the grid to the requested
            // number of shells.
            let h = (e.profile.grid.r_max / c.grid as f64).max(e.profile.grid.r_max / 1024.0);
            (e.rasterize(h)?, path.clone())
        }
        (None, Some(path)) => (read_voxel(path)?, path.clone()),
        _ => return Err(invalid("exactly one of --input / --voxel is required")),
    };
    if circular {
        let parts: Vec<usize> = axes
            .split(',')
            .filter_map(|t| t.trim().parse::<usize>().ok())
            .collect();
        if parts.len() != 2 || parts.contains(&0) {
            return Err(invalid(format!("axes '{axes}' must be two 1-based indices")));
        }
        let (cp, out_voxel) = circular_symmetrize(&v, (parts[0] - 1, parts[1] - 1), c.mesh)?;
        let mut csv = String::from("rho,z,ell\n");
        for j in 0..cp.z_count {
            for i in 0..cp.rho_count {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    fmt_f64(cp.rho(i)),
                    fmt_f64(cp.z(j)),
                    fmt_f64(cp.ell_at(i, j))
                ));
            }
        }
        let csv_path = c.out.join("circular_profile.csv");
        fs::write(&csv_path, csv).map_err(|e| invalid(e.to_string()))?;
        let voxel_path = c.out.join(if v.n.0 == 2 {
            "circular_symmetral.pgm"
        } else {
            "circular_symmetral.csv"
        });
        write_voxel(&voxel_path, &out_voxel)?;
        let rep = perimeter_circular_symmetral(&cp)?;
        write_json(
            &c.out.join("symmetrize.json"),
            &json!({
                "kind": "circular",
                "axes": [parts[0], parts[1]],
                "perimeter": perimeter_json(&rep),
                "profile_csv": csv_path.display().to_string(),
                "symmetral_voxel": voxel_path.display().to_string(),
            }),
        )?;
    } else {
        let (p, fv) = spherical_symmetrize(&v, c.grid, c.mesh.max(64), c.seed)?;
        let profile_path = c.out.join("profile.json");
        write_profile(&profile_path, &p)?;
        let set_path = c.out.join("symmetral.json");
        write_set_spec(&set_path, &fv)?;
        let rep = perimeter_symmetral(&p, FULL);
        write_json(
            &c.out.join("symmetrize.json"),
            &json!({
                "kind": "spherical",
                "n": p.n.0,
                "perimeter": perimeter_json(&rep),
                "profile": profile_path.display().to_string(),
                "symmetral": set_path.display().to_string(),
            }),
        )?;
    }
    write_manifest(
        &c.out,
        "symmetrize",
        json!({"grid": c.grid, "mesh": c.mesh, "seed": c.seed, "circular": circular}),
        &[source.as_path()],
    )
}

fn cmd_perimeter(
    c: &Common,
    profile: Option<PathBuf>,
    set: Option<PathBuf>,
    window: &str,
) -> Result<(), Failure> {
    let b = parse_window(window)?;
    let (rep, source) = match (&profile, &set) {
        (Some(path), None) => (perimeter_symmetral(&read_profile(path)?, b), path.clone()),
        (None, Some(path)) => (
            perimeter_capfield(&load_set(path)?, b, c.mesh)?,
            path.clone(),
        ),
        _ => return Err(invalid("exactly one of --profile / --set is required")),
    };
    write_json(&c.out.join("perimeter.json"), &perimeter_json(&rep))?;
    write_shell_csv(&c.out.join("perimeter_shells.csv"), &rep)?;
    write_manifest(
        &c.out,
        "perimeter",
        json!({"window": window, "mesh": c.mesh}),
        &[source.as_path()],
    )
}

fn cmd_check_inequality(c: &Common, set: &Path, window: &str) -> Result<(), Failure> {
    let b = parse_window(window)?;
    let e = load_set(set)?;
    let rep = check_inequality(&e, b, c.mesh)?;
    let holds = matches!(rep.verdict, Verdict::Holds);
    write_json(
        &c.out.join("inequality.json"),
        &json!({
            "p_e": rep.p_e,
            "p_fv": rep.p_fv,
            "slack": rep.slack,
            "eps_budget": rep.eps_budget,
            "verdict": if holds { "holds" } else { "violated" },
        }),
    )?;
    write_manifest(
        &c.out,
        "check-inequality",
        json!({"window": window, "mesh": c.mesh}),
        &[set],
    )?;
    if !holds {
        return Err(Failure {
            code: 3,
            message: format!(
                "inequality violated: slack {} below budget {}",
                rep.slack, rep.eps_budget
            ),
        });
    }
    Ok(())
}

fn reason_json(r: &RigidityReason) -> serde_json::Value {
    match r {
        RigidityReason::IntervalViolation { r, kind } => json!({
            "kind": "interval_violation",
            "r": r,
            "endpoint": match kind {
                sphsym::rigidity::IntervalKind::AlphaZero => "alpha_zero",
                sphsym::rigidity::IntervalKind::AlphaPi => "alpha_pi",
            },
        }),
        RigidityReason::Jump {
            r,
            alpha_lower,
            alpha_upper,
        } => json!({"kind": "jump", "r": r, "alpha_lower": alpha_lower, "alpha_upper": alpha_upper}),
        RigidityReason::Cantor { interval, mass } => {
            json!({"kind": "cantor", "interval": [interval.0, interval.1], "mass": mass})
        }
    }
}

fn cmd_rigidity(c: &Common, profile: &Path) -> Result<(), Failure> {
    let p = read_profile(profile)?;
    let verdict = classify(&p);
    let witness_path = match &verdict.witness {
        Some(w) => {
            let path = c.out.join("witness.json");
            write_set_spec(&path, w)?;
            Some(path.display().to_string())
        }
        None => None,
    };
    write_json(
        &c.out.join("rigidity.json"),
        &json!({
            "holds": verdict.holds,
            "reasons": verdict.reasons.iter().map(reason_json).collect::<Vec<_>>(),
            "witness": witness_path,
        }),
    )?;
    write_manifest(&c.out, "rigidity", json!({}), &[profile])
}

fn cmd_counterexample(
    c: &Common,
    kind: CounterexampleKind,
    profile: &Path,
    r_bar: Option<f64>,
    lambda: f64,
    gamma: Option<f64>,
    probe: bool,
) -> Result<(), Failure> {
    let p = read_profile(profile)?;
    let (e, kind_name) = match kind {
        CounterexampleKind::Jump => {
            let r_bar = match r_bar {
                Some(r) => r,
                None => p
                    .alpha
                    .jumps
                    .first()
                    .map(|j| j.r)
                    .ok_or_else(|| invalid("profile has no jumps"))?,
            };
            let width = p
                .alpha
                .jumps
                .iter()
                .find(|j| (j.r - r_bar).abs() <= 1e-12 * r_bar.max(1.0))
                .map(|j| j.delta().abs())
                .ok_or_else(|| invalid(format!("no jump at r = {r_bar}")))?;
            let gamma = gamma.unwrap_or(0.5 * lambda * width);
            if probe {
                (probe_jump(&p, r_bar, gamma)?, "jump-probe")
            } else {
                (counterexample_jump(&p, r_bar, lambda, gamma)?, "jump")
            }
        }
        CounterexampleKind::Disconnect => {
            let r_bar = match r_bar {
                Some(r) => r,
                None => first_gap_radius(&p).ok_or_else(|| invalid("no separating radius"))?,
            };
            let gamma = gamma.unwrap_or(std::f64::consts::FRAC_PI_2);
            (counterexample_disconnect(&p, r_bar, gamma)?, "disconnect")
        }
        CounterexampleKind::Cantor => (counterexample_cantor(&p, lambda)?, "cantor"),
    };
    let set_path = c.out.join("counterexample.json");
    write_set_spec(&set_path, &e)?;
    // Re-verify extremality and non-triviality of the construction.
    let p_e = perimeter_capfield(&e, FULL, c.mesh)?.total;
    let p_fv = perimeter_symmetral(&p, FULL).total;
    let bound = rotation_separation_bound(&e, 1024);
    write_json(
        &c.out.join("counterexample_summary.json"),
        &json!({
            "kind": kind_name,
            "p_e": p_e,
            "p_fv": p_fv,
            "difference": p_e - p_fv,
            "rotation_gap_lower_bound": bound,
            "set": set_path.display().to_string(),
        }),
    )?;
    write_manifest(
        &c.out,
        "counterexample",
        json!({"kind": kind_name, "lambda": lambda, "r_bar": r_bar, "gamma": gamma, "mesh": c.mesh}),
        &[profile],
    )
}

/// First grid radius where alpha vanishes (or fills) with mass on both sides.
fn first_gap_radius(p: &sphsym::Profile) -> Option<f64> {
    use std::f64::consts::PI;
    let eps = sphsym::rigidity::EPS0;
    let proper: Vec<bool> = (0..p.grid.count)
        .map(|i| {
            let (lo, hi) = p.approx_limits(p.grid.node(i));
            lo > eps && hi < PI - eps
        })
        .collect();
    let first = proper.iter().position(|&b| b)?;
    let last = proper.iter().rposition(|&b| b)?;
    (first..=last)
        .find(|&i| !proper[i])
        .map(|i| p.grid.node(i))
}

fn cmd_equality_analyze(
    c: &Common,
    set: Option<PathBuf>,
    voxel: Option<PathBuf>,
    interval: Option<&str>,
    shells: usize,
) -> Result<(), Failure> {
    match (&set, &voxel) {
        (Some(path), None) => {
            let e = load_set(path)?;
            let b = match interval {
                Some(s) => parse_window(s)?,
                None => (e.profile.grid.r_min, e.profile.grid.r_max),
            };
            let trace = direction_trace_capfield(&e, b, shells);
            let ode = verify_ode(&e, b, shells);
            let scores = verify_equality_conditions_capfield(&e, b, shells);
            let mut csv = String::from("r,d1,d2,d3,b1,b2,b3,degenerate\n");
            for i in 0..trace.radii.len() {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    fmt_f64(trace.radii[i]),
                    fmt_f64(trace.d[i][0]),
                    fmt_f64(trace.d[i][1]),
                    fmt_f64(trace.d[i][2]),
                    fmt_f64(trace.b[i][0]),
                    fmt_f64(trace.b[i][1]),
                    fmt_f64(trace.b[i][2]),
                    u8::from(trace.degenerate[i])
                ));
            }
            fs::write(c.out.join("direction_trace.csv"), csv)
                .map_err(|e| invalid(e.to_string()))?;
            write_json(
                &c.out.join("equality.json"),
                &json!({
                    "ode_max_residual": ode.max_residual,
                    "ode_tolerance": ode.tolerance,
                    "direction_drift": ode.direction_drift,
                    "slices_are_caps": scores.slices_are_caps,
                    "normal_constancy": scores.normal_constancy,
                    "degenerate_shells": scores.degenerate_shells,
                }),
            )?;
            write_manifest(
                &c.out,
                "equality-analyze",
                json!({"shells": shells, "interval": interval}),
                &[path.as_path()],
            )
        }
        (None, Some(path)) => {
            let v = read_voxel(path)?;
            let b = match interval {
                Some(s) => parse_window(s)?,
                None => (v.h, v.extent() * 0.95),
            };
            let scores = verify_equality_conditions_voxel(&v, b, shells.min(64), c.mesh, c.seed);
            write_json(
                &c.out.join("equality.json"),
                &json!({
                    "slices_are_caps": scores.slices_are_caps,
                    "normal_constancy": scores.normal_constancy,
                    "degenerate_shells": scores.degenerate_shells,
                }),
            )?;
            write_manifest(
                &c.out,
                "equality-analyze",
                json!({"shells": shells, "interval": interval, "mesh": c.mesh, "seed": c.seed}),
                &[path.as_path()],
            )
        }
        _ => Err(invalid("exactly one of --set / --voxel is required")),
    }
}
