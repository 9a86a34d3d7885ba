use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Debug;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use starlike::bifurcate::{abelian_integrals, n_eval, n_scan, reversible_parts, BifurcationOptions};
use starlike::common::{
    build_problem_with, condition_polys, parameter_conditions, solutions_json, solve_conditions,
    verify_common_curve, verify_params, FieldPair,
};
use starlike::decompose::{decompose_xy, periodic_fit, polar_parts, VParts};
use starlike::polyring::{MultiPoly, Rational};
use starlike::reversible::reversible_pipeline_with;
use starlike::sysio::{emit, parse_poly, poly_json, read_system_file, Format, PlanarSystem, Record, Table};
use starlike::systems::{build_3d, build_fg, integrate_from, invariant_cofactor, HeteroOptions};

#[derive(Parser)]
#[command(name = "starlike", version, about = "Star-like limit cycles of planar polynomial systems")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Polar parts of a system, or of a single polynomial in x, y.
    Decompose(DecomposeArgs),
    /// Implicit equations in f, g and their derivatives.
    Fg(SystemArgs),
    /// Polynomial 3D system in (f, g, u); optionally integrate one orbit.
    Threed(ThreedArgs),
    /// Test whether a polynomial is invariant under a system.
    Invariant(InvariantArgs),
    /// Conditions for two (f, u) systems to share a solution curve.
    Common(CommonArgs),
    /// Algebraic curve of a reversible system and its invariance.
    Reversible(ReversibleArgs),
    /// Persistence of periodic orbits under perturbation.
    #[command(subcommand)]
    Bifurcate(BifurcateCmd),
    /// Split samples of F(theta) into f(sin theta) + g(sin theta) cos theta.
    PeriodicFit(PeriodicArgs),
}

#[derive(Args)]
struct SystemArgs {
    /// System file.
    #[arg(long)]
    system: PathBuf,
    /// Parameter values, `name=p/q,...`.
    #[arg(long, value_parser = parse_assignment)]
    params: Option<Assignment>,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long, required_unless_present = "poly", conflicts_with = "poly")]
    system: Option<PathBuf>,
    /// Polynomial in x, y.
    #[arg(long)]
    poly: Option<String>,
}

#[derive(Args)]
struct ThreedArgs {
    #[command(flatten)]
    sys: SystemArgs,
    /// Start point `f,g,u` of an orbit to integrate.
    #[arg(long, value_parser = parse_point)]
    start: Option<[f64; 3]>,
    #[arg(long, default_value_t = 1e-3)]
    delta: f64,
    #[arg(long, default_value_t = 1e-10)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    atol: f64,
    #[arg(long, default_value_t = 1e4)]
    s_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum FieldKind {
    Planar,
    Threed,
}

#[derive(Args)]
struct InvariantArgs {
    #[command(flatten)]
    sys: SystemArgs,
    /// Candidate polynomial, in x, y or in f, g, u.
    #[arg(long)]
    candidate: String,
    #[arg(long, value_enum, default_value = "planar")]
    field: FieldKind,
}

#[derive(Args)]
struct CommonArgs {
    /// File with `df = ...` and `du = ...` in f, u.
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long, value_parser = parse_assignment)]
    params: Option<Assignment>,
    /// Curve in f, u to test against both systems.
    #[arg(long)]
    candidate: Option<String>,
    /// Differentiate the content-free part of h.
    #[arg(long)]
    strip_before_derive: bool,
    /// Also derive the parameter conditions and their rational solutions.
    #[arg(long)]
    solve: bool,
}

#[derive(Args)]
struct ReversibleArgs {
    #[command(flatten)]
    sys: SystemArgs,
    /// Factor of the curve to try when the whole curve is not invariant.
    #[arg(long)]
    factor: Vec<String>,
}

#[derive(Args, Clone)]
struct BifTol {
    #[arg(long, default_value_t = 1e-6)]
    delta_end: f64,
    #[arg(long, default_value_t = 1e-10)]
    ode_tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    quad_tol: f64,
}

impl BifTol {
    fn options(&self) -> Result<BifurcationOptions, Failure> {
        for (n, v) in [("delta-end", self.delta_end), ("ode-tol", self.ode_tol), ("quad-tol", self.quad_tol)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Failure::Usage(format!("--{n} must lie in (0, 1), got {v}")));
            }
        }
        Ok(BifurcationOptions {
            delta_end: self.delta_end,
            ode_tol: self.ode_tol,
            quad_tol: self.quad_tol,
        })
    }
}

#[derive(Subcommand)]
enum BifurcateCmd {
    /// N(rho) at one radius.
    Eval {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        rho: f64,
        #[command(flatten)]
        tol: BifTol,
    },
    /// N on a uniform grid with bracketed zeros.
    Scan {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        rho_min: f64,
        #[arg(long)]
        rho_max: f64,
        #[arg(long, default_value_t = 50)]
        grid_n: usize,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[command(flatten)]
        tol: BifTol,
    },
    /// Ratio of line integrals of x*y dy and x dy over an oval H = h.
    Abelian {
        /// Hamiltonian in x, y.
        #[arg(long)]
        hamiltonian: String,
        #[arg(long)]
        level: f64,
    },
}

#[derive(Args)]
struct PeriodicArgs {
    /// CSV of `theta,F` rows on a uniform grid over [0, 2 pi).
    #[arg(long)]
    samples: PathBuf,
    #[arg(long, default_value_t = 64)]
    nodes: usize,
}

type Assignment = BTreeMap<String, Rational>;

fn parse_point(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| "expected three values `f,g,u`".to_string())
}

fn parse_assignment(s: &str) -> Result<Assignment, String> {
    let mut out = BTreeMap::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| format!("expected name=value, got `{item}`"))?;
        let v = Rational::from_str(v.trim()).map_err(|_| format!("`{v}` is not a rational p/q"))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

enum Failure {
    /// Bad input: exit code 2.
    Usage(String),
    /// Computation error: exit code 1.
    Compute { kind: String, message: String },
}

fn compute<E: Debug + std::fmt::Display>(e: E) -> Failure {
    let dbg = format!("{e:?}");
    let kind: String = dbg.chars().take_while(|c| c.is_ascii_alphanumeric()).collect();
    Failure::Compute {
        kind,
        message: e.to_string(),
    }
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

/// Ad hoc report with a JSON body and an optional table.
struct Report {
    kind: &'static str,
    body: Value,
    table: Option<Table>,
}

impl Record for Report {
    fn kind(&self) -> &'static str {
        self.kind
    }
    fn to_json(&self) -> Value {
        self.body.clone()
    }
    fn table(&self) -> Option<Table> {
        self.table.clone()
    }
}

fn load_system(a: &SystemArgs) -> Result<PlanarSystem, Failure> {
    let sys = read_system_file(&a.system)
        .and_then(|f| f.planar())
        .map_err(|e| Failure::Usage(format!("{}: {e}", a.system.display())))?;
    let sys = match &a.params {
        Some(p) => sys.bind(&p.iter().map(|(k, v)| (k.clone(), v.clone())).collect::<HashMap<_, _>>()),
        None => sys,
    };
    Ok(sys)
}

fn poly_in(text: &str, vars: &[&str], extra: &[String]) -> Result<MultiPoly, Failure> {
    let mut allowed: HashSet<String> = vars.iter().map(|s| s.to_string()).collect();
    allowed.extend(extra.iter().cloned());
    parse_poly(text, &allowed).map_err(|e| Failure::Usage(format!("`{text}`: {e}")))
}

fn parts_json(v: &VParts) -> Value {
    json!({
        "h0": poly_json(&v.h0),
        "h1": poly_json(&v.h1),
        "even_refinement": v.even_refinement.as_ref().map(|e| json!({
            "k00": poly_json(&e.k00),
            "k01": poly_json(&e.k01),
            "k10": poly_json(&e.k10),
        })),
        "display": { "h0": v.h0.to_string(), "h1": v.h1.to_string() },
    })
}

fn fu_pair(path: &Path) -> Result<FieldPair, Failure> {
    let (p, q) = read_system_file(path)
        .and_then(|f| f.fu_pair())
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(FieldPair::new(p, q))
}

fn run(cli: Cli) -> Result<Box<dyn Record>, Failure> {
    Ok(match cli.cmd {
        Cmd::Decompose(a) => match (a.system, a.poly) {
            (Some(path), _) => {
                let sys = load_system(&SystemArgs { system: path, params: None })?;
                let pd = polar_parts(&sys).map_err(compute)?;
                let mut body = serde_json::Map::new();
                body.insert("kind".into(), json!("polar-parts"));
                for (n, p) in [("n0", &pd.n0), ("n1", &pd.n1), ("d0", &pd.d0), ("d1", &pd.d1), ("r0", &pd.r0), ("r1", &pd.r1)] {
                    body.insert(n.into(), poly_json(p));
                }
                Box::new(Report { kind: "polar parts", body: Value::Object(body), table: None })
            }
            (None, Some(text)) => {
                let h = poly_in(&text, &["x", "y"], &[])?;
                let mut body = parts_json(&decompose_xy(&h));
                body["kind"] = json!("vparts");
                Box::new(Report { kind: "polar split", body, table: None })
            }
            (None, None) => unreachable!("clap requires one of them"),
        },
        Cmd::Fg(a) => Box::new(build_fg(&load_system(&a)?).map_err(compute)?),
        Cmd::Threed(a) => {
            let s3 = build_3d(&load_system(&a.sys)?).map_err(compute)?;
            match a.start {
                None => Box::new(s3),
                Some(st) => {
                    let o = HeteroOptions {
                        delta: a.delta,
                        rtol: a.rtol,
                        atol: a.atol,
                        s_max: a.s_max,
                        ..Default::default()
                    };
                    Box::new(integrate_from(&s3, st, &o).map_err(compute)?)
                }
            }
        }
        Cmd::Invariant(a) => {
            let sys = load_system(&a.sys)?;
            let params = sys.free_params();
            let (h, k) = match a.field {
                FieldKind::Planar => {
                    let h = poly_in(&a.candidate, &["x", "y"], &params)?;
                    let k = invariant_cofactor(&sys, &h).map_err(compute)?;
                    (h, k)
                }
                FieldKind::Threed => {
                    let h = poly_in(&a.candidate, &["f", "g", "u"], &params)?;
                    let s3 = build_3d(&sys).map_err(compute)?;
                    let k = invariant_cofactor(&s3, &h).map_err(compute)?;
                    (h, k)
                }
            };
            Box::new(Report {
                kind: "invariance",
                body: json!({
                    "kind": "invariant",
                    "candidate": poly_json(&h),
                    "invariant": k.is_some(),
                    "cofactor": k.as_ref().map(poly_json),
                    "display": { "candidate": h.to_string(), "cofactor": k.map(|k| k.to_string()) },
                }),
                table: None,
            })
        }
        Cmd::Common(a) => common(a)?,
        Cmd::Reversible(a) => {
            let sys = load_system(&a.sys)?;
            let params = sys.free_params();
            let factors = a
                .factor
                .iter()
                .map(|f| poly_in(f, &["x", "y"], &params))
                .collect::<Result<Vec<_>, _>>()?;
            Box::new(reversible_pipeline_with(&sys, &factors).map_err(compute)?)
        }
        Cmd::Bifurcate(b) => bifurcate(b)?,
        Cmd::PeriodicFit(a) => {
            let samples = read_samples(&a.samples)?;
            let fit = periodic_fit(&samples, a.nodes).map_err(compute)?;
            Box::new(Report {
                kind: "periodic fit",
                body: json!({
                    "kind": "periodic-fit",
                    "nodes": fit.nodes,
                    "f": fit.f_vals,
                    "g": fit.g_vals,
                    "residual": fit.residual,
                }),
                table: Some(Table {
                    header: ["u", "f", "g"].map(String::from).to_vec(),
                    rows: (0..fit.nodes.len())
                        .map(|i| vec![fit.nodes[i], fit.f_vals[i], fit.g_vals[i]])
                        .collect(),
                }),
            })
        }
    })
}

fn common(a: CommonArgs) -> Result<Box<dyn Record>, Failure> {
    let (fa, fb) = (fu_pair(&a.a)?, fu_pair(&a.b)?);
    let cp = build_problem_with(&fa, &fb, a.strip_before_derive);
    let mut body = cp.to_json();
    if let Some(params) = &a.params {
        let r = verify_params(&cp, params).map_err(compute)?;
        body["params_report"] = r.json();
    }
    if let Some(c) = &a.candidate {
        let mut extra = fa.params();
        extra.extend(fb.params());
        let curve = poly_in(c, &["f", "u"], &extra)?;
        let empty = BTreeMap::new();
        let r = verify_common_curve(&fa, &fb, &curve, a.params.as_ref().unwrap_or(&empty)).map_err(compute)?;
        body["curve_report"] = r.json();
    }
    if a.solve {
        let (c1, c2) = (condition_polys(&cp, 1), condition_polys(&cp, 2));
        let mut conds = Vec::new();
        for c in [&c1, &c2] {
            conds.extend(parameter_conditions(&c.g_f.result, "f"));
            conds.extend(parameter_conditions(&c.g_u.result, "u"));
        }
        let sols = solve_conditions(&conds).map_err(compute)?;
        body["conditions"] = Value::Array(conds.iter().map(|c| json!(c.to_string())).collect());
        body["solutions"] = solutions_json(&sols);
    }
    Ok(Box::new(Report { kind: "common report", body, table: None }))
}

fn bifurcate(b: BifurcateCmd) -> Result<Box<dyn Record>, Failure> {
    Ok(match b {
        BifurcateCmd::Eval { sys, rho, tol } => {
            let parts = reversible_parts(&load_system(&sys)?).map_err(compute)?;
            Box::new(n_eval(&parts, rho, &tol.options()?).map_err(compute)?)
        }
        BifurcateCmd::Scan {
            sys,
            rho_min,
            rho_max,
            grid_n,
            jobs,
            tol,
        } => {
            if !(rho_min > 0.0 && rho_min < rho_max && grid_n >= 2) {
                return Err(Failure::Usage("need 0 < rho-min < rho-max and grid-n >= 2".into()));
            }
            let parts = reversible_parts(&load_system(&sys)?).map_err(compute)?;
            Box::new(n_scan(&parts, rho_min, rho_max, grid_n, &tol.options()?, jobs).map_err(compute)?)
        }
        BifurcateCmd::Abelian { hamiltonian, level } => {
            let h = poly_in(&hamiltonian, &["x", "y"], &[])?;
            let a = abelian_integrals(&h, level).map_err(compute)?;
            Box::new(Report {
                kind: "abelian integrals",
                body: json!({
                    "kind": "abelian",
                    "level": level,
                    "x0": a.x0,
                    "xy_dy": a.xy_dy,
                    "x_dy": a.x_dy,
                    "ratio": a.ratio(),
                    "period": a.period,
                }),
                table: None,
            })
        }
    })
}

fn read_samples(path: &Path) -> Result<Vec<(f64, f64)>, Failure> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(usage)?;
        let nums: Vec<Option<f64>> = rec.iter().map(|s| s.parse().ok()).collect();
        match nums.as_slice() {
            [Some(t), Some(v)] => out.push((*t, *v)),
            // header row
            [None, None] if i == 0 => {}
            _ => return Err(Failure::Usage(format!("{}: row {} is not `theta,F`", path.display(), i + 1))),
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let format = cli.format;
    let result = run(cli).and_then(|r| emit(r.as_ref(), format).map_err(usage));
    match result {
        Ok(bytes) => {
            let _ = std::io::stdout().write_all(&bytes);
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute { kind, message }) => {
            eprintln!("error: {message}");
            let v = json!({"schema": 1, "error": {"kind": kind, "message": message}});
            println!("{v}");
            ExitCode::from(1)
        }
    }
}
