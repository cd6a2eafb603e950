//! `hopfq` command line. JSON goes to stdout, a short summary to stderr.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cyclo::{make_context, CycScalar};
use crate::extensions::{
    build_double_action_unchecked, build_uq_action_unchecked, double_constraint_entries, double_system,
    parse_double_params, parse_uq_params, uq_constraint_entries, uq_system, verify_double, verify_uq,
};
use crate::fixtures;
use crate::oracle::vanishing_grid;
use crate::quiver::{export_dot, parse_element_strict, validate_quiver, Quiver, QuiverSpec};
use crate::symmetry::{
    action_from_json, canonical_labels, classify_minimal, decompose_components, orbits, parse_action_json,
    validate_action, ZnAction,
};
use crate::taft::{build_action_unchecked, parametrize, params_to_json, parse_params, sample_params};
use crate::verifier::{configure_threads_from_env, default_depth, extend_system, taft_constraint_entries, verify_all, OperatorSystem, VerificationReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hopfq", version, about = "Taft, u_q(sl2) and Drinfeld double actions on quiver path algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Inputs {
    /// Quiver JSON.
    #[arg(long)]
    pub quiver: PathBuf,
    /// Z_n-action JSON.
    #[arg(long)]
    pub action: PathBuf,
    /// Treat every arrow scale as 1; the action file is left untouched.
    #[arg(long)]
    pub normalize_mu: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Extension {
    Uq,
    Double,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the quiver (and optionally the action).
    Validate {
        #[arg(long)]
        quiver: PathBuf,
        #[arg(long)]
        action: Option<PathBuf>,
    },
    /// Orbits, components and canonical labels.
    Decompose {
        #[command(flatten)]
        inputs: Inputs,
        /// Also write a DOT graph colored by vertex orbit.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Free, derived and forced scalars plus residual constraints.
    Parametrize {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Draw parameters satisfying every reported constraint.
    Sample {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        attempts: usize,
    },
    /// Apply a generator to an element such as "f1*f2 + 1/2*e[v1]".
    Act {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        params: Option<PathBuf>,
        /// Extension the parameters describe; plain T(n) when absent.
        #[arg(long, value_enum)]
        ext: Option<Extension>,
        generator: String,
        element: String,
    },
    /// Build the action and check every relation on paths up to the depth.
    Verify {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        /// Fail when x acts by zero.
        #[arg(long)]
        require_inner_faithful: bool,
    },
    /// Build and verify a u_q(sl2) or D(T(n)) action.
    Extend {
        #[arg(value_enum)]
        which: Extension,
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Check h_a(1, ζ, ..., ζ^b) = 0 for n | a + b, a, b != 0, over a, b <= 3n.
    Oracle {
        #[arg(long, value_delimiter = ',', default_values_t = [2u32, 3, 4, 6])]
        n: Vec<u32>,
        /// Skip grid points with n | a.
        #[arg(long)]
        restricted: bool,
    },
    /// List bundled fixtures, or write one to a directory.
    Fixtures {
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// DOT graph of the quiver, colored by orbit when an action is given.
    ExportDot {
        #[arg(long)]
        quiver: PathBuf,
        #[arg(long)]
        action: Option<PathBuf>,
    },
}

#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Res<T> = Result<T, InputError>;

struct Out<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Out<'_> {
    fn json<T: Serialize>(&mut self, v: &T) -> Res<()> {
        let s = serde_json::to_string_pretty(v)?;
        writeln!(self.stdout, "{s}")?;
        Ok(())
    }

    fn note(&mut self, msg: impl AsRef<str>) {
        let _ = writeln!(self.stderr, "{}", msg.as_ref());
    }
}

fn read(path: &FsPath) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn read_quiver_spec(path: &FsPath) -> Res<QuiverSpec> {
    let text = read(path)?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| InputError(format!("{}: schema error at {}: {}", path.display(), e.path(), e.inner())))
}

fn load_quiver(path: &FsPath) -> Res<Quiver> {
    let spec = read_quiver_spec(path)?;
    Ok(Quiver::from_spec(&spec)?)
}

fn load_action(q: &Quiver, path: &FsPath) -> Res<ZnAction> {
    let spec = parse_action_json(&read(path)?)?;
    let ctx = make_context(spec.n as i64)?;
    Ok(action_from_json(q, &ctx, &spec)?)
}

struct Session {
    quiver: Quiver,
    action: ZnAction,
}

impl Session {
    fn load(inp: &Inputs) -> Res<Session> {
        let quiver = load_quiver(&inp.quiver)?;
        let mut action = load_action(&quiver, &inp.action)?;
        let rep = validate_action(&quiver, &action);
        if !rep.valid {
            return Err(InputError(format!("invalid action: {}", serde_json::to_string(&rep.violations)?)));
        }
        if inp.normalize_mu {
            action = action.with_scales(vec![CycScalar::one(action.ctx()); quiver.num_arrows()]);
        }
        Ok(Session { quiver, action })
    }

    fn depth(&self, d: Option<usize>) -> usize {
        d.unwrap_or_else(|| default_depth(self.action.ctx()))
    }
}

fn report_exit(out: &mut Out, report: &VerificationReport, ok: bool) -> Res<i32> {
    out.json(report)?;
    let fails = report.failures();
    if ok {
        out.note(format!("pass: {} relation and split checks", report.relations.len() + report.splits.len()));
        Ok(EXIT_PASS)
    } else {
        for e in &fails {
            match &e.witness {
                Some(w) => out.note(format!("FAIL {}: at {} residual {}", e.name, w.path, w.residual)),
                None => out.note(format!("FAIL {}", e.name)),
            }
        }
        if fails.is_empty() {
            out.note("FAIL: x acts by zero, so the action is not inner faithful");
        }
        Ok(EXIT_FAIL)
    }
}

fn cmd_validate(out: &mut Out, quiver: &FsPath, action: Option<&FsPath>) -> Res<i32> {
    let spec = read_quiver_spec(quiver)?;
    let qrep = validate_quiver(&spec);
    let mut body = json!({ "quiver": qrep });
    let mut ok = qrep.valid;
    if let (true, Some(a)) = (qrep.valid, action) {
        let q = Quiver::from_spec(&spec)?;
        let act = load_action(&q, a)?;
        let arep = validate_action(&q, &act);
        ok &= arep.valid;
        body["action"] = serde_json::to_value(&arep)?;
    }
    out.json(&body)?;
    out.note(if ok { "valid" } else { "invalid" });
    Ok(if ok { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_decompose(out: &mut Out, inputs: &Inputs, dot: Option<&FsPath>) -> Res<i32> {
    let s = Session::load(inputs)?;
    let q = &s.quiver;
    let orb = orbits(q, &s.action);
    let comps = decompose_components(q, &orb);
    let orbit_list: Vec<Value> = orb
        .vertex_orbits
        .iter()
        .enumerate()
        .map(|(o, m)| json!({"id": orb.orbit_name(q, o), "size": m.len(), "vertices": m.iter().map(|&v| q.vertex_id(v)).collect::<Vec<_>>()}))
        .collect();
    let body = json!({
        "n": s.action.n(),
        "minimality": classify_minimal(q, &s.action),
        "orbits": orbit_list,
        "components": comps.iter().map(|c| canonical_labels(q, &orb, c)).collect::<Vec<_>>(),
    });
    if let Some(path) = dot {
        std::fs::write(path, export_dot(q, Some(&orb.vertex_orbit_of)))?;
    }
    out.json(&body)?;
    out.note(format!("{} orbits, {} components", orb.vertex_orbits.len(), comps.len()));
    Ok(EXIT_PASS)
}

fn cmd_parametrize(out: &mut Out, inputs: &Inputs) -> Res<i32> {
    let s = Session::load(inputs)?;
    let r = parametrize(&s.quiver, &s.action);
    out.json(&r)?;
    out.note(format!(
        "{} free symbols, {} residual constraints",
        r.free.len(),
        r.residual_constraints.len()
    ));
    for c in &r.residual_constraints {
        out.note(format!("  {}", c.display));
    }
    Ok(EXIT_PASS)
}

fn cmd_sample(out: &mut Out, inputs: &Inputs, seed: u64, attempts: usize) -> Res<i32> {
    let s = Session::load(inputs)?;
    let r = parametrize(&s.quiver, &s.action);
    let vals = sample_params(&r, s.action.ctx(), seed, attempts)?;
    let p = r.instantiate(s.action.ctx(), &vals);
    out.json(&params_to_json(&s.quiver, &orbits(&s.quiver, &s.action), &p))?;
    for (k, v) in &vals {
        out.note(format!("{k} = {v}"));
    }
    Ok(EXIT_PASS)
}

fn system_for(s: &Session, params: Option<&FsPath>, ext: Option<Extension>) -> Res<OperatorSystem> {
    let q = &s.quiver;
    let orb = orbits(q, &s.action);
    let text = match params {
        Some(p) => read(p)?,
        None => "{}".to_string(),
    };
    Ok(match ext {
        None => {
            let p = parse_params(q, &orb, s.action.ctx(), &text)?;
            OperatorSystem::taft(&build_action_unchecked(q, &s.action, &p))
        }
        Some(Extension::Uq) => {
            let p = parse_uq_params(q, &orb, s.action.ctx(), &text)?;
            uq_system(&build_uq_action_unchecked(q, &s.action, &p)?)
        }
        Some(Extension::Double) => {
            let (p, g2) = parse_double_params(q, &orb, &s.action, &text)?;
            double_system(&build_double_action_unchecked(q, &s.action, &g2, &p)?)
        }
    })
}

fn cmd_act(out: &mut Out, inputs: &Inputs, params: Option<&FsPath>, ext: Option<Extension>, generator: &str, element: &str) -> Res<i32> {
    let s = Session::load(inputs)?;
    let system = system_for(&s, params, ext)?;
    let ops: Vec<&String> = system.grouplikes.keys().chain(system.skews.keys()).collect();
    if !ops.iter().any(|o| o.as_str() == generator) {
        let names: Vec<&str> = ops.iter().map(|s| s.as_str()).collect();
        return Err(InputError(format!("unknown generator {generator}; available: {}", names.join(", "))));
    }
    let e = parse_element_strict(&s.quiver, s.action.ctx(), element)?;
    let table = extend_system(&system, e.degree());
    let r = table.apply(Some(generator), &e);
    let shown = r.display(&s.quiver);
    out.json(&json!({"generator": generator, "element": e.display(&s.quiver), "result": shown}))?;
    out.note(format!("{generator}.({element}) = {shown}"));
    Ok(EXIT_PASS)
}

fn cmd_verify(out: &mut Out, inputs: &Inputs, params: &FsPath, depth: Option<usize>, require_faithful: bool) -> Res<i32> {
    let s = Session::load(inputs)?;
    let orb = orbits(&s.quiver, &s.action);
    let p = parse_params(&s.quiver, &orb, s.action.ctx(), &read(params)?)?;
    let spec = build_action_unchecked(&s.quiver, &s.action, &p);
    let mut report = verify_all(&spec, s.depth(depth));
    report.constraints = taft_constraint_entries(&s.quiver, &s.action, &p);
    let ok = if require_faithful {
        report.entry("inner-faithful").is_some_and(|e| e.passed()) && report.all_pass()
    } else {
        report.all_pass()
    };
    report_exit(out, &report, ok)
}

fn cmd_extend(out: &mut Out, which: Extension, inputs: &Inputs, params: &FsPath, depth: Option<usize>) -> Res<i32> {
    let s = Session::load(inputs)?;
    let q = &s.quiver;
    let orb = orbits(q, &s.action);
    let text = read(params)?;
    let d = s.depth(depth);
    let report = match which {
        Extension::Uq => {
            let p = parse_uq_params(q, &orb, s.action.ctx(), &text)?;
            let spec = build_uq_action_unchecked(q, &s.action, &p)?;
            let mut r = verify_uq(&spec, d);
            r.constraints = uq_constraint_entries(q, &s.action, &p);
            r
        }
        Extension::Double => {
            let (p, g2) = parse_double_params(q, &orb, &s.action, &text)?;
            let spec = build_double_action_unchecked(q, &s.action, &g2, &p)?;
            let mut r = verify_double(&spec, d);
            r.constraints = double_constraint_entries(q, &s.action, &g2, &p);
            r
        }
    };
    let ok = report.all_pass();
    report_exit(out, &report, ok)
}

fn cmd_oracle(out: &mut Out, ns: &[u32], restricted: bool) -> Res<i32> {
    let mut rows = Vec::new();
    let mut ok = true;
    for &n in ns {
        let ctx = make_context(n as i64)?;
        let (checked, bad) = vanishing_grid(&ctx, 3 * n as i64);
        let (excluded, bad): (Vec<_>, Vec<_>) = bad.into_iter().partition(|p| restricted && p.a % p.n as i64 == 0);
        ok &= bad.is_empty();
        out.note(format!("n = {n}: {} of {checked} grid points nonzero", bad.len()));
        rows.push(json!({"n": n, "checked": checked - excluded.len(), "nonzero": bad}));
    }
    out.json(&json!({"restricted": restricted, "grids": rows}))?;
    Ok(if ok { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_fixtures(out: &mut Out, name: Option<&str>, dir: Option<&FsPath>) -> Res<i32> {
    let Some(name) = name else {
        let list: Vec<Value> = fixtures::FIXTURES.iter().map(|f| json!({"name": f.name, "n": f.n, "summary": f.summary})).collect();
        out.json(&list)?;
        return Ok(EXIT_PASS);
    };
    let f = fixtures::find(name)?;
    let dir = dir.map(FsPath::to_path_buf).unwrap_or_else(|| PathBuf::from(name));
    std::fs::create_dir_all(&dir)?;
    let mut written = Vec::new();
    for (file, body) in f.files() {
        let p = dir.join(file);
        std::fs::write(&p, body)?;
        written.push(p.display().to_string());
    }
    out.json(&json!({"fixture": name, "files": written}))?;
    out.note(format!("wrote {} files to {}", written.len(), dir.display()));
    Ok(EXIT_PASS)
}

fn cmd_export_dot(out: &mut Out, quiver: &FsPath, action: Option<&FsPath>) -> Res<i32> {
    let q = load_quiver(quiver)?;
    let dot = match action {
        Some(a) => {
            let act = load_action(&q, a)?;
            export_dot(&q, Some(&orbits(&q, &act).vertex_orbit_of))
        }
        None => export_dot(&q, None),
    };
    write!(out.stdout, "{dot}")?;
    Ok(EXIT_PASS)
}

fn dispatch(cli: &Cli, out: &mut Out) -> Res<i32> {
    match &cli.command {
        Command::Validate { quiver, action } => cmd_validate(out, quiver, action.as_deref()),
        Command::Decompose { inputs, dot } => cmd_decompose(out, inputs, dot.as_deref()),
        Command::Parametrize { inputs } => cmd_parametrize(out, inputs),
        Command::Sample { inputs, seed, attempts } => cmd_sample(out, inputs, *seed, *attempts),
        Command::Act { inputs, params, ext, generator, element } => cmd_act(out, inputs, params.as_deref(), *ext, generator, element),
        Command::Verify { inputs, params, depth, require_inner_faithful } => {
            cmd_verify(out, inputs, params, *depth, *require_inner_faithful)
        }
        Command::Extend { which, inputs, params, depth } => cmd_extend(out, *which, inputs, params, *depth),
        Command::Oracle { n, restricted } => cmd_oracle(out, n, *restricted),
        Command::Fixtures { name, out: dir } => cmd_fixtures(out, name.as_deref(), dir.as_deref()),
        Command::ExportDot { quiver, action } => cmd_export_dot(out, quiver, action.as_deref()),
    }
}

/// Parse arguments and run; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    configure_threads_from_env();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    let mut out = Out { stdout, stderr };
    match dispatch(&cli, &mut out) {
        Ok(code) => code,
        Err(InputError(msg)) => {
            out.note(format!("error: {msg}"));
            EXIT_INPUT
        }
    }
}
