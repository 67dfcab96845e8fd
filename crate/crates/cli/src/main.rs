//! `reebstrip`: command-line front end for the reeb-strip crate.
//!
//! Every subcommand prints (or writes with `--out`) one JSON document
//! `{"tool", "version", "config", "result"}`; `reeb --format dot|svg` writes
//! the graph with the same data in a leading comment. Exit status is 0 when
//! the verdict holds, 2 when it fails and 1 on usage or domain errors.

use clap::{Args, Parser, Subcommand};
use reeb_strip::constructions::{check_pair, ConstructionSpec, PairParams, Theorem};
use reeb_strip::critical::find_critical_set;
use reeb_strip::manifold::{
    critical_points, critical_sweep, restricted_hessian, sample_lines, sample_zero_set, slice_sphere_defect,
    verify_regularity, ManifoldSpec, ManifoldTolerances,
};
use reeb_strip::oracle::{graphs_equivalent, grid_reeb, DEFAULT_NS, DEFAULT_NT};
use reeb_strip::reeb::{
    build_reeb_graph, check_cw_hypotheses, compare_prediction, predict_mthm2, to_dot, to_json, to_svg, CwTolerances,
    ExportFormat, SweepOptions,
};
use reeb_strip::stability::{classify_stability, StabilityTolerances, Verdict};
use reeb_strip::strip::{make_region_with, FunctionSource, StripRegion, TsFunction};
use reeb_strip::{Tolerances, Window, VERSION};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "reebstrip", version = VERSION, about = "Reeb graphs of the height function on planar strips")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct FnArg {
    /// Expression in `x`.
    #[arg(long = "f", allow_hyphen_values = true, conflicts_with = "f_spec")]
    f: Option<String>,
    /// JSON file with a function source or construction spec.
    #[arg(long = "f-spec")]
    f_spec: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct PairArgs {
    #[arg(long, allow_hyphen_values = true, conflicts_with = "c1_spec")]
    c1: Option<String>,
    #[arg(long = "c1-spec")]
    c1_spec: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "c2_spec")]
    c2: Option<String>,
    #[arg(long = "c2-spec")]
    c2_spec: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Window `LO HI` for the position variable.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, default_values_t = [-7.0, 7.0])]
    window: Vec<f64>,
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Value and first two derivatives at given points.
    Eval {
        #[command(flatten)]
        func: FnArg,
        #[arg(long, num_args = 1.., allow_negative_numbers = true, required = true)]
        at: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Critical set of one function on the window.
    Critical {
        #[command(flatten)]
        func: FnArg,
        #[command(flatten)]
        common: Common,
    },
    /// Reeb graph of the strip between c1 and c2.
    Reeb {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value = "json")]
        format: ExportFormat,
        #[arg(long, default_value_t = 1e-7)]
        event_gap: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Degree prediction for (c1, c1 + a) checked against the sweep.
    Predict {
        #[arg(long, allow_hyphen_values = true, conflicts_with = "c1_spec")]
        c1: Option<String>,
        #[arg(long = "c1-spec")]
        c1_spec: Option<PathBuf>,
        #[arg(long)]
        a: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Discreteness and closedness of the critical values.
    CheckCw {
        #[command(flatten)]
        pair: PairArgs,
        /// Declared exceptional values.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        zf: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Build a construction from a spec file, or check a theorem's pair.
    Construct {
        #[arg(long, conflicts_with = "theorem")]
        spec: Option<PathBuf>,
        #[arg(long)]
        theorem: Option<Theorem>,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        p1: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        p2: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Morse and stability verdicts.
    Stability {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Regularity and critical points of the hypersurface over the strip.
    ManifoldCheck {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Also write the samples as JSON lines to this file.
        #[arg(long)]
        samples: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep graph against the grid quotient.
    OracleCompare {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = DEFAULT_NT)]
        nt: usize,
        #[arg(long, default_value_t = DEFAULT_NS)]
        ns: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Serialize)]
struct RunConfig {
    command: &'static str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    functions: Vec<(String, FunctionSource)>,
    window: Window,
    tolerances: Tolerances,
    seed: u64,
    options: Value,
}

struct Outcome {
    result: Value,
    holds: bool,
    /// Replaces the JSON document (DOT or SVG output).
    text: Option<String>,
}

type Run = Result<(RunConfig, Outcome), String>;

fn load_source(expr: &Option<String>, spec: &Option<PathBuf>, name: &str) -> Result<FunctionSource, String> {
    match (expr, spec) {
        (Some(text), _) => {
            let e = reeb_strip::parse(text).map_err(|e| format!("--{name}: {e}"))?;
            Ok(FunctionSource::Expr { expr: e })
        }
        (None, Some(path)) => {
            let raw = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            if let Ok(src) = serde_json::from_str::<FunctionSource>(&raw) {
                return Ok(src);
            }
            let c: ConstructionSpec =
                serde_json::from_str(&raw).map_err(|e| format!("{}: not a function spec: {e}", path.display()))?;
            Ok(FunctionSource::Construction {
                construction: c,
                offset: 0.0,
            })
        }
        (None, None) => Err(format!("missing --{name} or --{name}-spec")),
    }
}

fn build(src: &FunctionSource) -> Result<TsFunction, String> {
    TsFunction::from_source(src).map_err(|e| e.to_string())
}

fn window(c: &Common) -> Result<Window, String> {
    let (lo, hi) = (c.window[0], c.window[1]);
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(format!("--window needs finite LO < HI (got {lo} {hi})"));
    }
    Ok(Window::new(lo, hi))
}

fn pair(p: &PairArgs, w: Window) -> Result<(Vec<(String, FunctionSource)>, StripRegion), String> {
    let s1 = load_source(&p.c1, &p.c1_spec, "c1")?;
    let s2 = load_source(&p.c2, &p.c2_spec, "c2")?;
    let region = make_region_with(build(&s1)?, build(&s2)?, w, Tolerances::default()).map_err(|e| e.to_string())?;
    Ok((vec![("c1".into(), s1), ("c2".into(), s2)], region))
}

fn config(
    command: &'static str,
    functions: Vec<(String, FunctionSource)>,
    c: &Common,
    w: Window,
    options: Value,
) -> RunConfig {
    RunConfig {
        command,
        functions,
        window: w,
        tolerances: Tolerances::default(),
        seed: c.seed,
        options,
    }
}

fn value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result serializes")
}

fn done(result: Value, holds: bool) -> Outcome {
    Outcome {
        result,
        holds,
        text: None,
    }
}

fn run(cmd: &Command) -> Run {
    match cmd {
        Command::Eval { func, at, common } => {
            let w = window(common)?;
            let src = load_source(&func.f, &func.f_spec, "f")?;
            let f = build(&src)?;
            let mut rows = Vec::new();
            for &s in at {
                let j = f.jet(s).map_err(|e| format!("at {s}: {e}"))?;
                rows.push(json!({"s": s, "value": j.value, "d1": j.d1, "d2": j.d2}));
            }
            let cfg = config("eval", vec![("f".into(), src)], common, w, json!({"at": at}));
            Ok((cfg, done(Value::Array(rows), true)))
        }
        Command::Critical { func, common } => {
            let w = window(common)?;
            let src = load_source(&func.f, &func.f_spec, "f")?;
            let cs = find_critical_set(&build(&src)?, w, &Tolerances::default()).map_err(|e| e.to_string())?;
            let cfg = config("critical", vec![("f".into(), src)], common, w, json!({}));
            Ok((cfg, done(value(&cs), true)))
        }
        Command::Reeb {
            pair: p,
            format,
            event_gap,
            common,
        } => {
            let w = window(common)?;
            let (fs, region) = pair(p, w)?;
            let opts = SweepOptions {
                event_gap: *event_gap,
                ..SweepOptions::default()
            };
            let g = build_reeb_graph(&region, &opts).map_err(|e| e.to_string())?;
            let holds = g.validate().is_ok();
            let cfg = config("reeb", fs, common, w, json!({"format": format, "sweep": opts}));
            let text = match format {
                ExportFormat::Json => None,
                ExportFormat::Dot => Some(to_dot(&g)),
                ExportFormat::Svg => Some(to_svg(&g, Some(&region))),
            };
            Ok((
                cfg,
                Outcome {
                    result: to_json(&g),
                    holds,
                    text,
                },
            ))
        }
        Command::Predict { c1, c1_spec, a, common } => {
            let w = window(common)?;
            let s1 = load_source(c1, c1_spec, "c1")?;
            let f1 = build(&s1)?;
            let f2 = f1.shifted(*a);
            let s2 = f2.source().clone();
            let region = make_region_with(f1, f2, w, Tolerances::default()).map_err(|e| e.to_string())?;
            let (cs1, _) = region.critical_sets().map_err(|e| e.to_string())?;
            let prediction = predict_mthm2(cs1, *a).map_err(|e| e.to_string())?;
            let g = build_reeb_graph(&region, &SweepOptions::default()).map_err(|e| e.to_string())?;
            let m = compare_prediction(&g, &prediction, &region, 1e-6).map_err(|e| e.to_string())?;
            let cfg = config(
                "predict",
                vec![("c1".into(), s1), ("c2".into(), s2)],
                common,
                w,
                json!({"a": a}),
            );
            let holds = m.matched;
            Ok((cfg, done(json!({"prediction": prediction, "comparison": m}), holds)))
        }
        Command::CheckCw { pair: p, zf, common } => {
            let w = window(common)?;
            let (fs, region) = pair(p, w)?;
            let tol = CwTolerances::default();
            let rep = check_cw_hypotheses(&region, zf, &tol).map_err(|e| e.to_string())?;
            let cfg = config("check-cw", fs, common, w, json!({"zf": zf, "cw": tol}));
            let holds = rep.verdicts.all();
            Ok((cfg, done(value(&rep), holds)))
        }
        Command::Construct {
            spec,
            theorem,
            r,
            p1,
            p2,
            common,
        } => {
            let w = window(common)?;
            match (spec, theorem) {
                (Some(path), _) => {
                    let src = load_source(&None, &Some(path.clone()), "spec")?;
                    let f = build(&src)?;
                    let mut samples = Vec::new();
                    for s in w.lattice(8) {
                        let j = f.jet(s).map_err(|e| format!("at {s}: {e}"))?;
                        samples.push(json!({"s": s, "value": j.value, "d1": j.d1, "d2": j.d2}));
                    }
                    let bounds = f.rotated().map(|g| g.bounds_check());
                    let holds = bounds.is_none_or(|b| b.holds);
                    let result = json!({"label": f.label(), "samples": samples, "bounds": bounds});
                    let cfg = config("construct", vec![("f".into(), src)], common, w, json!({}));
                    Ok((cfg, done(result, holds)))
                }
                (None, Some(t)) => {
                    let params = PairParams {
                        r: *r,
                        p1: *p1,
                        p2: *p2,
                        ..PairParams::default()
                    };
                    let half = w.hi.abs().max(w.lo.abs());
                    let widths = [0.25 * half, 0.5 * half, half];
                    let chk = check_pair(*t, &params, &widths, &Tolerances::default()).map_err(|e| e.to_string())?;
                    let holds = chk.separation_holds
                        && chk.image.is_none_or(|(_, ok)| ok)
                        && chk.shapes.iter().all(|s| s.holds)
                        && chk
                            .asymptotics
                            .iter()
                            .all(|(_, a)| a.verdict != reeb_strip::constructions::AsymptoticVerdict::Inconsistent);
                    let cfg = config("construct", vec![], common, w, json!({"theorem": t, "params": params}));
                    Ok((cfg, done(value(&chk), holds)))
                }
                (None, None) => Err("construct needs --spec FILE or --theorem NAME".into()),
            }
        }
        Command::Stability { pair: p, common } => {
            let w = window(common)?;
            let (fs, region) = pair(p, w)?;
            let tol = StabilityTolerances::default();
            let rep = classify_stability(&region, &tol);
            let holds = ![
                rep.morse,
                rep.critical_values_injective,
                rep.stable_sufficient,
                rep.strongly_stable,
                rep.infinitesimally_stable,
            ]
            .contains(&Verdict::Undetermined);
            let cfg = config("stability", fs, common, w, json!({"stability": tol}));
            Ok((cfg, done(value(&rep), holds)))
        }
        Command::ManifoldCheck {
            pair: p,
            m,
            n,
            samples,
            common,
        } => {
            let w = window(common)?;
            let (fs, region) = pair(p, w)?;
            let spec = ManifoldSpec::new(*m, region).map_err(|e| e.to_string())?;
            let tol = ManifoldTolerances::default();
            let pts = sample_zero_set(&spec, *n, common.seed).map_err(|e| e.to_string())?;
            let reg = verify_regularity(&spec, &pts, &tol).map_err(|e| e.to_string())?;
            let interior: Vec<_> = pts.iter().filter(|s| !s.on_boundary).take(1000).cloned().collect();
            let sweep = critical_sweep(&spec, &interior, &tol).map_err(|e| e.to_string())?;
            let mut hessians = Vec::new();
            for (which, pt) in critical_points(&spec).map_err(|e| e.to_string())? {
                let h = restricted_hessian(&spec, &pt, &tol).map_err(|e| e.to_string())?;
                hessians.push(json!({"c": which, "point": pt, "hessian": h}));
            }
            let sphere = slice_sphere_defect(&spec, &pts).map_err(|e| e.to_string())?;
            if let Some(path) = samples {
                let text = sample_lines(&spec, &pts).map_err(|e| e.to_string())?;
                std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            let holds = reg.holds && sweep.holds;
            let result = json!({"regularity": reg, "critical": sweep, "hessians": hessians, "sphere_defect": sphere});
            let cfg = config(
                "manifold-check",
                fs,
                common,
                w,
                json!({"m": m, "n": n, "manifold": tol}),
            );
            Ok((cfg, done(result, holds)))
        }
        Command::OracleCompare {
            pair: p,
            nt,
            ns,
            common,
        } => {
            let w = window(common)?;
            if *nt < 256 || *ns < 1024 {
                return Err(format!("grid needs nt >= 256 and ns >= 1024 (got {nt}, {ns})"));
            }
            let (fs, region) = pair(p, w)?;
            let g = build_reeb_graph(&region, &SweepOptions::default()).map_err(|e| e.to_string())?;
            let q = grid_reeb(&region, w, *nt, *ns).map_err(|e| e.to_string())?;
            let tol_h = reeb_strip::oracle::grid_tolerance(&q);
            let eq = graphs_equivalent(&g, &q.graph, tol_h);
            let holds = eq.equivalent;
            let result = json!({"tol_h": tol_h, "equivalence": eq, "sweep": to_json(&g), "grid": to_json(&q.graph)});
            let cfg = config("oracle-compare", fs, common, w, json!({"nt": nt, "ns": ns}));
            Ok((cfg, done(result, holds)))
        }
    }
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Eval { common, .. }
        | Command::Critical { common, .. }
        | Command::Reeb { common, .. }
        | Command::Predict { common, .. }
        | Command::CheckCw { common, .. }
        | Command::Construct { common, .. }
        | Command::Stability { common, .. }
        | Command::ManifoldCheck { common, .. }
        | Command::OracleCompare { common, .. } => common,
    }
}

fn render(cfg: &RunConfig, out: &Outcome, format_text: bool) -> String {
    let doc = json!({"tool": "reebstrip", "version": VERSION, "config": cfg, "result": out.result});
    match (&out.text, format_text) {
        (Some(text), true) if text.starts_with("<svg") => {
            let header = serde_json::to_string(&doc["config"]).unwrap().replace("--", "- -");
            format!("<!-- reebstrip {VERSION} config: {header} -->\n{text}")
        }
        (Some(text), true) => {
            let header = serde_json::to_string(&doc["config"]).unwrap();
            format!("// reebstrip {VERSION}\n// config: {header}\n{text}")
        }
        _ => {
            let mut s = serde_json::to_string_pretty(&doc).unwrap();
            s.push('\n');
            s
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = common(&cli.command).clone();
    match run(&cli.command) {
        Ok((cfg, outcome)) => {
            let text = render(&cfg, &outcome, true);
            let written = match &c.out {
                Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if outcome.holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
