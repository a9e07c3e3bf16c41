//! Command-line front end: state preparation, entanglement classification,
//! class maps, protocol planning, and teleportation fidelity curves.
//!
//! Exit codes: 0 for any computed answer (including "unphysical" and
//! "not transformable"), 2 for invalid invocations. Scalar results are
//! JSON; sweeps are CSV with `#` metadata headers; class maps can also be
//! rendered as P6 rasters. Outputs are byte-stable for identical inputs.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use gslocc::entanglement::{
    class_map, classify, ppt_min_symplectic, separability_margin, EntanglementClass, GridSpec,
    MapSpec, ProtocolKind,
};
use gslocc::protocols::{
    plan_noise, plan_qnd_all, transform_state, NotTransformable, Plan, TargetRatios,
};
use gslocc::states::StateDescriptor;
use gslocc::teleportation::{
    bipartite_fidelity, fidelity, fidelity_after_squeezing, fidelity_closed, fidelity_vs_g,
    fidelity_vs_squeezing, optimal_squeezing, squeezing_db, CharlieSetup, SqueezingMode,
};
use gslocc::{EffectiveScheme, Quadrature, SymmetricState};

#[derive(Parser)]
#[command(
    name = "gslocc",
    about = "Permutation-invariant Gaussian states: preparation, LOCC protocols, entanglement classes, teleportation fidelity",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON config file mirroring the flags; explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Recorded in metadata; reserved for sampling-based extensions.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Convert state parameters between pictures and check physicality.
    Prepare(StateArgs),
    /// Entanglement class, PPT eigenvalue, and separability verdict.
    Classify(StateArgs),
    /// Classification map over a (c, d) grid, optionally after a protocol.
    Map(MapArgs),
    /// Solve a transformation protocol for target ratios.
    Protocol(ProtocolArgs),
    /// Assisted-teleportation fidelity: single value, optimum, or sweeps.
    Fidelity(FidelityArgs),
}

#[derive(Args, Clone, Default)]
struct StateArgs {
    /// Number of parties N.
    #[arg(long)]
    parties: Option<usize>,
    /// Canonical picture: x variance m.
    #[arg(long, allow_negative_numbers = true)]
    m: Option<f64>,
    /// Canonical picture: p variance n.
    #[arg(long, allow_negative_numbers = true)]
    n: Option<f64>,
    /// Canonical picture: x correlation c (default 0 when m, n given).
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    /// Canonical picture: negated p correlation d (default 0).
    #[arg(long, allow_negative_numbers = true)]
    d: Option<f64>,
    /// Preparation picture: V_x of the N-1 identical input modes.
    #[arg(long, allow_negative_numbers = true)]
    vx: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    vp: Option<f64>,
    /// Preparation picture: W_x of input mode N.
    #[arg(long, allow_negative_numbers = true)]
    wx: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    wp: Option<f64>,
    /// Thermal/squeezing picture: noise of the N-1 identical modes.
    #[arg(long, allow_negative_numbers = true)]
    n1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    r1: Option<f64>,
    /// Thermal/squeezing picture: noise of mode N.
    #[arg(long, allow_negative_numbers = true)]
    nn: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    rn: Option<f64>,
}

#[derive(Args)]
struct MapArgs {
    #[arg(long)]
    parties: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    m: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    n: Option<f64>,
    /// Grid points per axis.
    #[arg(long)]
    grid: Option<usize>,
    /// c axis as "min:max" (defaults to the physical box).
    #[arg(long)]
    crange: Option<String>,
    /// d axis as "min:max" (defaults to the physical box).
    #[arg(long)]
    drange: Option<String>,
    /// Apply this protocol before classifying.
    #[arg(long)]
    protocol: Option<String>,
    #[arg(long)]
    k1: Option<f64>,
    #[arg(long)]
    k2: Option<f64>,
    /// Noise orientation: x or p.
    #[arg(long)]
    quadrature: Option<String>,
    /// Output format: csv (default) or ppm.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct ProtocolArgs {
    #[command(flatten)]
    state: StateArgs,
    /// noise or qnd.
    #[arg(long)]
    protocol: Option<String>,
    #[arg(long)]
    k1: Option<f64>,
    #[arg(long)]
    k2: Option<f64>,
    /// Noise orientation: x or p.
    #[arg(long)]
    quadrature: Option<String>,
    /// Include all admissible QND roots in the output.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct FidelityArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Charlie's power transmittance T (default 1: p homodyne).
    #[arg(long)]
    t: Option<f64>,
    /// Sweep axis: a (squeezing) or g (QND strength).
    #[arg(long)]
    sweep: Option<String>,
    /// Sweep range "min:max" (geometric spacing).
    #[arg(long)]
    range: Option<String>,
    /// Number of sweep points.
    #[arg(long)]
    points: Option<usize>,
    /// Squeezing along a g sweep: "optimal" or "fixed:<a>".
    #[arg(long)]
    squeezing: Option<String>,
    /// Report the optimal squeezing and the fidelity it achieves.
    #[arg(long)]
    optimize: bool,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("GSLOCC_THREADS") {
        if let Ok(threads) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global();
        }
    }
    let cli = Cli::parse();
    let cfg = match load_config(cli.config.as_deref()) {
        Ok(cfg) => cfg,
        Err(msg) => return invalid(&msg),
    };
    let result = match &cli.command {
        Command::Prepare(args) => cmd_prepare(args, &cfg),
        Command::Classify(args) => cmd_classify(args, &cfg),
        Command::Map(args) => cmd_map(args, &cfg),
        Command::Protocol(args) => cmd_protocol(args, &cfg),
        Command::Fidelity(args) => cmd_fidelity(args, &cfg),
    };
    match result {
        Ok(bytes) => match write_output(cli.out.as_deref(), &bytes) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(msg) => invalid(&msg),
    }
}

fn invalid(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn load_config(path: Option<&std::path::Path>) -> Result<Value, String> {
    match path {
        None => Ok(Value::Null),
        Some(p) => {
            let text =
                std::fs::read_to_string(p).map_err(|e| format!("config {}: {e}", p.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("config {}: {e}", p.display()))
        }
    }
}

fn write_output(path: Option<&std::path::Path>, bytes: &[u8]) -> Result<(), String> {
    match path {
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| e.to_string()),
        Some(p) => std::fs::write(p, bytes).map_err(|e| format!("{}: {e}", p.display())),
    }
}

fn cfg_f64(cli: Option<f64>, cfg: &Value, key: &str) -> Option<f64> {
    cli.or_else(|| cfg.get(key).and_then(Value::as_f64))
}

fn cfg_usize(cli: Option<usize>, cfg: &Value, key: &str) -> Option<usize> {
    cli.or_else(|| cfg.get(key).and_then(Value::as_u64).map(|v| v as usize))
}

fn cfg_string(cli: Option<String>, cfg: &Value, key: &str) -> Option<String> {
    cli.or_else(|| cfg.get(key).and_then(Value::as_str).map(String::from))
}

/// Resolves the state parameters, insisting on exactly one complete
/// parameter picture.
fn resolve_state(args: &StateArgs, cfg: &Value) -> Result<SymmetricState, String> {
    let parties = cfg_usize(args.parties, cfg, "parties").unwrap_or(3);
    let m = cfg_f64(args.m, cfg, "m");
    let n = cfg_f64(args.n, cfg, "n");
    let c = cfg_f64(args.c, cfg, "c");
    let d = cfg_f64(args.d, cfg, "d");
    let vx = cfg_f64(args.vx, cfg, "vx");
    let vp = cfg_f64(args.vp, cfg, "vp");
    let wx = cfg_f64(args.wx, cfg, "wx");
    let wp = cfg_f64(args.wp, cfg, "wp");
    let n1 = cfg_f64(args.n1, cfg, "n1");
    let r1 = cfg_f64(args.r1, cfg, "r1");
    let nn = cfg_f64(args.nn, cfg, "nn");
    let rn = cfg_f64(args.rn, cfg, "rn");

    let canonical = [m, n, c, d];
    let effective = [vx, vp, wx, wp];
    let thermal = [n1, r1, nn, rn];
    let used: Vec<&str> = [
        ("canonical", canonical.iter().any(Option::is_some)),
        ("effective", effective.iter().any(Option::is_some)),
        ("thermal", thermal.iter().any(Option::is_some)),
    ]
    .iter()
    .filter(|(_, used)| *used)
    .map(|(name, _)| *name)
    .collect();
    match used.as_slice() {
        [] => Err("no state parameters given (use --m/--n[/--c/--d], --vx/--vp/--wx/--wp, or --n1/--r1/--nn/--rn)".into()),
        [one] => match *one {
            "canonical" => {
                let (Some(m), Some(n)) = (m, n) else {
                    return Err("canonical picture needs both --m and --n".into());
                };
                SymmetricState::new(parties, m, n, c.unwrap_or(0.0), d.unwrap_or(0.0))
                    .map_err(|e| e.to_string())
            }
            "effective" => {
                let (Some(vx), Some(vp), Some(wx), Some(wp)) = (vx, vp, wx, wp) else {
                    return Err("effective picture needs all of --vx --vp --wx --wp".into());
                };
                EffectiveScheme::new(parties, vx, vp, wx, wp)
                    .and_then(|e| e.to_state())
                    .map_err(|e| e.to_string())
            }
            _ => {
                let (Some(n1), Some(r1), Some(nn), Some(rn)) = (n1, r1, nn, rn) else {
                    return Err("thermal picture needs all of --n1 --r1 --nn --rn".into());
                };
                EffectiveScheme::from_thermal_squeezing(parties, n1, r1, nn, rn)
                    .and_then(|e| e.to_state())
                    .map_err(|e| e.to_string())
            }
        },
        many => Err(format!(
            "mixed parameter pictures {:?}; give exactly one complete picture",
            many
        )),
    }
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable");
    out.push(b'\n');
    out
}

fn cmd_prepare(args: &StateArgs, cfg: &Value) -> Result<Vec<u8>, String> {
    let state = resolve_state(args, cfg)?;
    Ok(json_bytes(&StateDescriptor::from_state(&state)))
}

#[derive(Serialize)]
struct ClassifyOutput {
    state: StateDescriptor,
    physical: bool,
    class: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    ppt_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fully_separable: Option<bool>,
}

fn cmd_classify(args: &StateArgs, cfg: &Value) -> Result<Vec<u8>, String> {
    let state = resolve_state(args, cfg)?;
    let class = classify(&state);
    let physical = class != EntanglementClass::Unphysical;
    let output = ClassifyOutput {
        state: StateDescriptor::from_state(&state),
        physical,
        class: class.label().to_string(),
        ppt_min: physical.then(|| ppt_min_symplectic(&state).unwrap()),
        fully_separable: physical.then(|| separability_margin(&state) >= -1e-9),
    };
    Ok(json_bytes(&output))
}

fn parse_range(spec: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 2 {
        return Err(format!("range '{spec}' must be min:max"));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| format!("bad range '{spec}'"))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| format!("bad range '{spec}'"))?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(format!("bad range '{spec}'"));
    }
    Ok((lo, hi))
}

fn parse_quadrature(s: Option<String>) -> Result<Quadrature, String> {
    match s.as_deref() {
        None | Some("x") => Ok(Quadrature::X),
        Some("p") => Ok(Quadrature::P),
        Some(other) => Err(format!("quadrature must be x or p, got '{other}'")),
    }
}

fn cmd_map(args: &MapArgs, cfg: &Value) -> Result<Vec<u8>, String> {
    let parties = cfg_usize(args.parties, cfg, "parties").unwrap_or(3);
    let m = cfg_f64(args.m, cfg, "m").ok_or("map needs --m")?;
    let n = cfg_f64(args.n, cfg, "n").ok_or("map needs --n")?;
    if parties < 2 || m <= 0.0 || n <= 0.0 {
        return Err("map needs --parties >= 2 and positive --m/--n".into());
    }
    let count = cfg_usize(args.grid, cfg, "grid").unwrap_or(200);
    if count < 2 {
        return Err("--grid must be at least 2".into());
    }
    let (default_c, default_d) = MapSpec::default_grids(m, n, parties, count);
    let c_grid = match cfg_string(args.crange.clone(), cfg, "crange") {
        None => default_c,
        Some(spec) => {
            let (lo, hi) = parse_range(&spec)?;
            GridSpec::new(lo, hi, count).map_err(|e| e.to_string())?
        }
    };
    let d_grid = match cfg_string(args.drange.clone(), cfg, "drange") {
        None => default_d,
        Some(spec) => {
            let (lo, hi) = parse_range(&spec)?;
            GridSpec::new(lo, hi, count).map_err(|e| e.to_string())?
        }
    };
    let protocol = match cfg_string(args.protocol.clone(), cfg, "protocol").as_deref() {
        None | Some("none") => None,
        Some(name) => {
            let kind = match name {
                "noise" => ProtocolKind::Noise,
                "qnd" => ProtocolKind::Qnd,
                other => return Err(format!("protocol must be noise or qnd, got '{other}'")),
            };
            let k1 = cfg_f64(args.k1, cfg, "k1").ok_or("protocol maps need --k1")?;
            let k2 = cfg_f64(args.k2, cfg, "k2").ok_or("protocol maps need --k2")?;
            Some((kind, TargetRatios::new(k1, k2).map_err(|e| e.to_string())?))
        }
    };
    let quadrature = parse_quadrature(cfg_string(args.quadrature.clone(), cfg, "quadrature"))?;
    let spec = MapSpec {
        m,
        n,
        n_parties: parties,
        c_grid,
        d_grid,
        protocol,
        quadrature,
    };
    let started = std::time::Instant::now();
    let map = class_map(&spec).map_err(|e| e.to_string())?;
    eprintln!(
        "map: {} cells in {:.1} ms",
        map.codes.len(),
        started.elapsed().as_secs_f64() * 1e3
    );
    match cfg_string(args.format.clone(), cfg, "format").as_deref() {
        None | Some("csv") => Ok(map.to_csv().into_bytes()),
        Some("ppm") => Ok(map.to_ppm()),
        Some(other) => Err(format!("map format must be csv or ppm, got '{other}'")),
    }
}

#[derive(Serialize)]
struct ProtocolOutput {
    state: StateDescriptor,
    physical: bool,
    targets: TargetRatios,
    #[serde(skip_serializing_if = "Option::is_none")]
    plan: Option<Plan>,
    #[serde(skip_serializing_if = "Option::is_none")]
    not_transformable: Option<NotTransformable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    transformed: Option<StateDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residuals: Option<Residuals>,
    #[serde(skip_serializing_if = "Option::is_none")]
    roots: Option<Vec<Plan>>,
}

#[derive(Serialize)]
struct Residuals {
    k1: f64,
    k2: f64,
}

fn cmd_protocol(args: &ProtocolArgs, cfg: &Value) -> Result<Vec<u8>, String> {
    let state = resolve_state(&args.state, cfg)?;
    let k1 = cfg_f64(args.k1, cfg, "k1").ok_or("protocol needs --k1")?;
    let k2 = cfg_f64(args.k2, cfg, "k2").ok_or("protocol needs --k2")?;
    let targets = TargetRatios::new(k1, k2).map_err(|e| e.to_string())?;
    let quadrature = parse_quadrature(cfg_string(args.quadrature.clone(), cfg, "quadrature"))?;
    let name = cfg_string(args.protocol.clone(), cfg, "protocol")
        .ok_or("protocol needs --protocol noise|qnd")?;

    if !state.is_physical() {
        return Err("state is not physical".into());
    }
    let (outcome, roots): (Result<Plan, NotTransformable>, Option<Vec<Plan>>) = match name.as_str()
    {
        "noise" => match plan_noise(&state, &targets, quadrature).map_err(|e| e.to_string())? {
            gslocc::protocols::PlanOutcome::Transformable(p) => (Ok(Plan::Noise(p)), None),
            gslocc::protocols::PlanOutcome::NotTransformable(r) => (Err(r), None),
        },
        "qnd" => match plan_qnd_all(&state, &targets).map_err(|e| e.to_string())? {
            gslocc::protocols::PlanOutcome::Transformable(plans) => (
                Ok(Plan::Qnd(plans[0])),
                args.verbose
                    .then(|| plans.into_iter().map(Plan::Qnd).collect()),
            ),
            gslocc::protocols::PlanOutcome::NotTransformable(r) => (Err(r), None),
        },
        other => return Err(format!("protocol must be noise or qnd, got '{other}'")),
    };

    let output = match outcome {
        Err(reason) => {
            if reason == NotTransformable::DegenerateInput {
                return Err(format!(
                    "degenerate input: correlation ratio undefined ({reason})"
                ));
            }
            ProtocolOutput {
                state: StateDescriptor::from_state(&state),
                physical: true,
                targets,
                plan: None,
                not_transformable: Some(reason),
                transformed: None,
                residuals: None,
                roots: None,
            }
        }
        Ok(plan) => {
            let out = transform_state(&state, &plan).map_err(|e| e.to_string())?;
            let residuals = Residuals {
                k1: (out.k1() - targets.k1) / targets.k1,
                k2: out
                    .k2()
                    .map(|k2| (k2 - targets.k2) / targets.k2)
                    .unwrap_or(f64::NAN),
            };
            ProtocolOutput {
                state: StateDescriptor::from_state(&state),
                physical: true,
                targets,
                plan: Some(plan),
                not_transformable: None,
                transformed: Some(StateDescriptor::from_state(&out)),
                residuals: Some(residuals),
                roots,
            }
        }
    };
    Ok(json_bytes(&output))
}

#[derive(Serialize)]
struct FidelityOutput {
    state: StateDescriptor,
    physical: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    transmittance_sq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    det_e: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    formula: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    optimal: Option<OptimalSqueezing>,
}

#[derive(Serialize)]
struct OptimalSqueezing {
    a: f64,
    a_db: f64,
    fidelity: f64,
}

fn cmd_fidelity(args: &FidelityArgs, cfg: &Value) -> Result<Vec<u8>, String> {
    let state = resolve_state(&args.state, cfg)?;
    if !state.is_physical() {
        let output = FidelityOutput {
            state: StateDescriptor::from_state(&state),
            physical: false,
            transmittance_sq: None,
            fidelity: None,
            det_e: None,
            closed_form: None,
            formula: None,
            optimal: None,
        };
        return Ok(json_bytes(&output));
    }

    let sweep = cfg_string(args.sweep.clone(), cfg, "sweep");
    match (state.n_parties(), sweep.as_deref()) {
        (2, None) => {
            if args.optimize {
                return Err("--optimize needs a tripartite state".into());
            }
            let f = bipartite_fidelity(&state).map_err(|e| e.to_string())?;
            let output = FidelityOutput {
                state: StateDescriptor::from_state(&state),
                physical: true,
                transmittance_sq: None,
                fidelity: Some(f),
                det_e: None,
                closed_form: Some(f),
                formula: Some("bipartite".into()),
                optimal: None,
            };
            Ok(json_bytes(&output))
        }
        (2, Some(_)) => Err("sweeps need a tripartite state".into()),
        (3, None) => {
            let t_sq = cfg_f64(args.t, cfg, "t").unwrap_or(1.0);
            let setup = CharlieSetup::new(t_sq).map_err(|e| e.to_string())?;
            let report = fidelity(&state, &setup).map_err(|e| e.to_string())?;
            let optimal = if args.optimize {
                let a = optimal_squeezing(&state.to_effective()).map_err(|e| e.to_string())?;
                Some(OptimalSqueezing {
                    a,
                    a_db: squeezing_db(a),
                    fidelity: fidelity_after_squeezing(&state, a).map_err(|e| e.to_string())?,
                })
            } else {
                None
            };
            let output = FidelityOutput {
                state: StateDescriptor::from_state(&state),
                physical: true,
                transmittance_sq: Some(t_sq),
                fidelity: Some(report.fidelity),
                det_e: Some(report.det_e),
                closed_form: Some(fidelity_closed(&state).map_err(|e| e.to_string())?),
                formula: Some("tripartite".into()),
                optimal,
            };
            Ok(json_bytes(&output))
        }
        (3, Some(axis)) => {
            let points = cfg_usize(args.points, cfg, "points").unwrap_or(200);
            if points < 2 {
                return Err("--points must be at least 2".into());
            }
            match axis {
                "a" => {
                    let (lo, hi) = match cfg_string(args.range.clone(), cfg, "range") {
                        Some(spec) => parse_range(&spec)?,
                        None => (1.0, 40.0),
                    };
                    if lo <= 0.0 {
                        return Err("squeezing range must be positive".into());
                    }
                    let grid = geometric_grid(lo, hi, points);
                    let curve = fidelity_vs_squeezing(&state, &grid).map_err(|e| e.to_string())?;
                    Ok(curve.to_csv().into_bytes())
                }
                "g" => {
                    let (lo, hi) = match cfg_string(args.range.clone(), cfg, "range") {
                        Some(spec) => parse_range(&spec)?,
                        None => (1e-3, 1e3),
                    };
                    if lo <= 0.0 {
                        return Err("QND strength range must be positive".into());
                    }
                    let mode = match cfg_string(args.squeezing.clone(), cfg, "squeezing")
                        .as_deref()
                        .unwrap_or("optimal")
                    {
                        "optimal" => SqueezingMode::PerGOptimal,
                        fixed if fixed.starts_with("fixed:") => {
                            let a: f64 = fixed[6..]
                                .parse()
                                .map_err(|_| format!("bad squeezing '{fixed}'"))?;
                            if a <= 0.0 {
                                return Err("fixed squeezing must be positive".into());
                            }
                            SqueezingMode::Fixed(a)
                        }
                        other => {
                            return Err(format!(
                                "squeezing must be 'optimal' or 'fixed:<a>', got '{other}'"
                            ))
                        }
                    };
                    let curve = fidelity_vs_g(&state, &geometric_grid(lo, hi, points), mode)
                        .map_err(|e| e.to_string())?;
                    Ok(curve.to_csv().into_bytes())
                }
                other => Err(format!("sweep must be a or g, got '{other}'")),
            }
        }
        (n, _) => Err(format!("fidelity supports 2 or 3 parties, got {n}")),
    }
}

fn geometric_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| lo * (hi / lo).powf(i as f64 / (points - 1) as f64))
        .collect()
}
