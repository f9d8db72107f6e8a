//! Batch experiment runner for the `angval` library.
//!
//! Every subcommand prints one report, JSON by default or CSV with
//! `--format csv`. With `--assert` a failing verdict becomes exit code 1.

pub mod io;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use angval::extendability::{
    self, angle_sweep, dimension_formula, hw_relation_sides, hw_relation_sides_n5, one_angle_basis, quadratic_fit,
    quadratic_space_dimension, relation_sides, relation_test, relation_test_general_k, sphere_relation_sides,
    two_angle_basis, RelationConfig, RelationReport, FAIL_FLOOR,
};
use angval::exterior::Frame;
use angval::klain::{parse_spec, DynKlain, HighestWeight};
use angval::numerics::halving_grid;
use angval::polytope::{make_shape, Polytope, ShapeKind};
use angval::random::{random_onb, MonteCarloConfig, DEFAULT_SAMPLES};
use angval::simplex_lab::{
    averaged_derivative_experiment, default_t_grid, face_table, relation_gap, theta_limits, ThetaLimits,
};
use angval::valuation::{intrinsic_volume, mu_angular};
use angval::{Cx, Error as CoreError};

pub use io::{load_polytope, load_quadratic};
pub use report::{ExperimentReport, Format, Outcome, Output, Table};

#[derive(Parser, Debug)]
#[command(name = "angval", version, about = "Angular valuations, Klain functions and extendability experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo samples per angle; for `fit`, the number of training points.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Tolerance for the verdict (each subcommand has its own default).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Parallel workers (threads and Monte Carlo streams).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Exit with status 1 when the verdict is "fail".
    #[arg(long, global = true)]
    pub assert: bool,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// List built-in shapes, or describe one.
    Shapes {
        #[arg(long)]
        shape: Option<String>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Angular valuation `μ_f(P)` at degree k.
    Evaluate {
        #[arg(long)]
        f: String,
        #[arg(long)]
        shape: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Intrinsic volumes `V_k(P)` (all k when `--k` is omitted).
    Intrinsic {
        #[arg(long)]
        shape: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Sign-average relation on `Gr_2(R^n)` (or lines of `R^3`).
    Relation {
        #[arg(long)]
        f: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Relation test for `1 <= k <= n-2` through restrictions to `(k+2)`-planes.
    RelationK {
        #[arg(long)]
        f: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Least-squares fit of a quadratic form on `Λ^k` to f.
    Fit {
        #[arg(long)]
        f: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Numerical dimension of the quadratic restrictions to the Plücker image.
    Dimension {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// The simplex family: face table, θ limits, closed forms and the
    /// finite-difference derivative at `t = 0⁺`.
    Simplex {
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Function on `Gr_{n-2}`.
        #[arg(long, default_value = "const:1")]
        f: String,
        /// `t_max:t_min`, halved in between.
        #[arg(long)]
        t_grid: Option<String>,
        /// `t` for the face table.
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// Reproduce a counterexample: f20-n4, n5-hw33 or sphere-n3.
    Counterexample {
        #[arg(long)]
        case: String,
        /// Function for sphere-n3 (default sph:2).
        #[arg(long)]
        f: Option<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Shapes { .. } => "shapes",
            Command::Evaluate { .. } => "evaluate",
            Command::Intrinsic { .. } => "intrinsic",
            Command::Relation { .. } => "relation",
            Command::RelationK { .. } => "relation-k",
            Command::Fit { .. } => "fit",
            Command::Dimension { .. } => "dimension",
            Command::Simplex { .. } => "simplex",
            Command::Counterexample { .. } => "counterexample",
        }
    }

    fn default_tol(&self) -> Option<f64> {
        match self {
            Command::Relation { .. } | Command::RelationK { .. } => Some(1e-8),
            Command::Fit { .. } => Some(1e-6),
            Command::Simplex { .. } => Some(1e-5),
            Command::Counterexample { .. } => Some(1e-9),
            _ => None,
        }
    }
}

/// Parses `argv` (program name first), runs the subcommand and writes the
/// report. Returns the process exit code.
pub fn run<I, S>(argv: I) -> Result<i32>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(&argv)?;
    let started = Instant::now();
    let c = &cli.common;
    let workers = c.workers.unwrap_or(1).max(1);
    if c.workers.is_some() {
        // the global pool can only be built once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
    let mc = MonteCarloConfig::with_seed(c.seed).samples(c.samples.unwrap_or(DEFAULT_SAMPLES)).workers(workers);
    let tol = c.tol.or(cli.command.default_tol());
    let out = dispatch(&cli.command, c, &mc, tol)?;
    let report = ExperimentReport {
        command: argv.iter().map(|a| a.to_string_lossy().into_owned()).collect(),
        subcommand: cli.command.name().to_string(),
        seed: c.seed,
        samples: mc.samples,
        workers,
        tol,
        verdict: out.verdict,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        result: out.result,
    };
    report::emit(&report, &out.table, c.format, c.out.as_deref())?;
    Ok(if c.assert && out.verdict == Outcome::Fail { 1 } else { 0 })
}

fn dispatch(cmd: &Command, c: &Common, mc: &MonteCarloConfig, tol: Option<f64>) -> Result<Output> {
    let tol_or = |d: f64| tol.unwrap_or(d);
    match cmd {
        Command::Shapes { shape, n } => shapes(shape.as_deref(), *n),
        Command::Evaluate { f, shape, n, k } => evaluate(f, shape, *n, *k, mc),
        Command::Intrinsic { shape, n, k } => intrinsic(shape, *n, *k, mc),
        Command::Relation { f, n, k, trials } => {
            let func = function(f, *n, *k)?;
            let cfg = RelationConfig { trials: *trials, seed: c.seed, tol: tol_or(1e-8), structured: true };
            Ok(relation_output(relation_test(func.as_ref(), &cfg)?))
        }
        Command::RelationK { f, n, k, trials } => {
            let func = function(f, *n, *k)?;
            let cfg = RelationConfig { trials: *trials, seed: c.seed, tol: tol_or(1e-8), structured: true };
            Ok(relation_output(relation_test_general_k(func, &cfg)?))
        }
        Command::Fit { f, n, k } => fit(f, *n, *k, c.samples, c.seed, tol_or(1e-6)),
        Command::Dimension { n, k } => dimension(*n, *k, c.samples, c.seed),
        Command::Simplex { n, f, t_grid, t } => simplex(*n, f, t_grid.as_deref(), *t, c.seed, tol_or(1e-5), mc),
        Command::Counterexample { case, f } => counterexample(case, f.as_deref(), tol_or(1e-9)),
    }
}

fn function(spec: &str, n: usize, k: usize) -> Result<DynKlain<f64>> {
    parse_spec::<f64>(spec, n, k).with_context(|| format!("invalid --f '{spec}' for n = {n}, k = {k}"))
}

/// `--shape` is a built-in name (see `shapes`) or `file:<path>` / a path to
/// a `.json` polytope.
pub fn resolve_shape(shape: &str, n: usize) -> Result<Polytope<f64>> {
    let file = shape.strip_prefix("file:").or(if shape.ends_with(".json") { Some(shape) } else { None });
    if let Some(path) = file {
        let p = load_polytope(Path::new(path))?;
        if p.n() != n {
            bail!("{path} is a polytope in R^{}, but --n is {n}", p.n());
        }
        return Ok(p);
    }
    let kind = ShapeKind::parse(shape, n)?;
    make_shape(&kind).with_context(|| format!("cannot build shape '{shape}'"))
}

fn cx_json(z: Cx<f64>) -> Value {
    json!([z.re, z.im])
}

fn shapes(shape: Option<&str>, n: Option<usize>) -> Result<Output> {
    let Some(shape) = shape else {
        let mut table = Table::new(&["shape"]);
        for name in ShapeKind::NAMES {
            table.push([name]);
        }
        return Ok(Output {
            result: json!({ "shapes": ShapeKind::NAMES, "file": "file:<path.json> with {\"n\": int, \"vertices\": [[..]]}" }),
            table,
            verdict: Outcome::None,
        });
    };
    let n = n.ok_or_else(|| anyhow!("--n is required with --shape"))?;
    let p = resolve_shape(shape, n)?;
    let mut table = Table::new(&["vertex", "coordinates"]);
    for (i, v) in p.vertices().iter().enumerate() {
        table.push([i.to_string(), v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")]);
    }
    Ok(Output {
        result: json!({
            "shape": shape,
            "n": p.n(),
            "dim": p.dim(),
            "f_vector": p.f_vector(),
            "volume": p.volume(),
            "vertices": p.to_spec().vertices,
        }),
        table,
        verdict: Outcome::None,
    })
}

fn evaluate(f: &str, shape: &str, n: usize, k: usize, mc: &MonteCarloConfig) -> Result<Output> {
    let func = function(f, n, k)?;
    let p = resolve_shape(shape, n)?;
    let e = mu_angular(func.as_ref(), &p, k, mc)?;
    let mut table = Table::new(&["vertex_ids", "volume", "weight_re", "weight_im", "angle", "angle_stderr", "method", "value_re", "value_im"]);
    for t in &e.terms {
        let (a, se, m) = match &t.angle {
            Some(a) => (a.value, a.stderr, serde_json::to_value(a.method)?.as_str().unwrap_or("").to_string()),
            None => (f64::NAN, f64::NAN, String::new()),
        };
        table.push([
            t.vertex_ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" "),
            t.volume.to_string(),
            t.weight.re.to_string(),
            t.weight.im.to_string(),
            a.to_string(),
            se.to_string(),
            m,
            t.value.re.to_string(),
            t.value.im.to_string(),
        ]);
    }
    Ok(Output {
        result: json!({
            "function": func.tag(),
            "shape": shape,
            "n": n,
            "k": k,
            "value": cx_json(e.value),
            "stderr": e.stderr,
            "exact": e.is_exact(),
            "terms": e.terms,
        }),
        table,
        verdict: Outcome::None,
    })
}

fn intrinsic(shape: &str, n: usize, k: Option<usize>, mc: &MonteCarloConfig) -> Result<Output> {
    let p = resolve_shape(shape, n)?;
    let ks: Vec<usize> = match k {
        Some(k) => vec![k],
        None => (0..=p.dim()).collect(),
    };
    let mut table = Table::new(&["k", "value", "stderr"]);
    let mut values = Vec::new();
    for k in ks {
        let (v, se) = intrinsic_volume(&p, k, mc)?;
        table.push([k.to_string(), v.to_string(), se.to_string()]);
        values.push(json!({ "k": k, "value": v, "stderr": se }));
    }
    let result = if values.len() == 1 {
        let mut one = values.remove(0);
        one["shape"] = json!(shape);
        one
    } else {
        json!({ "shape": shape, "volumes": values })
    };
    Ok(Output { result, table, verdict: Outcome::None })
}

fn relation_output(r: RelationReport<f64>) -> Output {
    let mut table = Table::new(&["family", "angles", "seed", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_residual"]);
    for row in &r.rows {
        table.push([
            serde_json::to_value(row.family).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            row.angles.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" "),
            row.seed.map(|s| s.to_string()).unwrap_or_default(),
            row.lhs.re.to_string(),
            row.lhs.im.to_string(),
            row.rhs.re.to_string(),
            row.rhs.im.to_string(),
            row.residual.norm().to_string(),
        ]);
    }
    let verdict = r.verdict.into();
    Output { result: serde_json::to_value(&r).unwrap_or(Value::Null), table, verdict }
}

fn fit(f: &str, n: usize, k: usize, samples: Option<usize>, seed: u64, tol: f64) -> Result<Output> {
    let func = function(f, n, k)?;
    let train = samples.unwrap_or(3 * dimension_formula(n, k));
    let r = quadratic_fit(func.as_ref(), train, train, seed)?;
    let verdict = if r.test_residual <= tol { Outcome::Pass } else { Outcome::Fail };
    let mut table = Table::new(&["function", "n", "k", "train", "test", "rank", "train_residual", "test_residual"]);
    table.push([
        func.tag(),
        n.to_string(),
        k.to_string(),
        r.train_count.to_string(),
        r.test_count.to_string(),
        r.rank.to_string(),
        r.train_residual.to_string(),
        r.test_residual.to_string(),
    ]);
    let mut result = serde_json::to_value(&r)?;
    result["function"] = json!(func.tag());
    result["dimension_formula"] = json!(dimension_formula(n, k));
    Ok(Output { result, table, verdict })
}

fn dimension(n: usize, k: usize, samples: Option<usize>, seed: u64) -> Result<Output> {
    if k > n {
        bail!("--k must not exceed --n");
    }
    let needed = extendability::fit::monomial_count(n, k);
    let samples = samples.unwrap_or(needed + needed / 2 + 10);
    let rank = quadratic_space_dimension(n, k, samples, seed)?;
    let formula = dimension_formula(n, k);
    let verdict = if rank == formula { Outcome::Pass } else { Outcome::Fail };
    let mut table = Table::new(&["n", "k", "samples", "rank", "formula"]);
    table.push([n, k, samples, rank, formula]);
    Ok(Output {
        result: json!({ "n": n, "k": k, "samples": samples, "dimension": rank, "formula": formula }),
        table,
        verdict,
    })
}

fn parse_t_grid(spec: Option<&str>) -> Result<Vec<f64>> {
    let Some(spec) = spec else {
        return Ok(default_t_grid());
    };
    let (a, b) = spec.split_once(':').ok_or_else(|| anyhow!("--t-grid expects t_max:t_min, got '{spec}'"))?;
    let (hi, lo): (f64, f64) = (a.trim().parse()?, b.trim().parse()?);
    if !(hi > lo && lo > 0.0) {
        bail!("--t-grid needs t_max > t_min > 0, got {hi}:{lo}");
    }
    Ok(halving_grid(hi, lo))
}

fn simplex(
    n: usize,
    f: &str,
    t_grid: Option<&str>,
    t: f64,
    seed: u64,
    tol: f64,
    mc: &MonteCarloConfig,
) -> Result<Output> {
    if n < 3 {
        bail!("simplex needs --n >= 3");
    }
    let func = function(f, n, n - 2)?;
    let grid = parse_t_grid(t_grid)?;
    let basis: Frame<f64> = if seed == 0 { Frame::standard(n) } else { random_onb(n, seed) };
    let table_t = face_table(&basis, t)?;
    let limits = theta_limits::<f64>(n, &grid)?;
    let gap = relation_gap(func.clone(), &basis)?;
    let mut table = Table::new(&["t", "difference_re", "difference_im"]);
    let (experiment, verdict) =
        match averaged_derivative_experiment(func.as_ref(), &basis, &grid, tol.max(1e-8), mc) {
            Ok(r) => {
                for (t, d) in r.t_grid.iter().zip(&r.differences) {
                    table.push([t.to_string(), d.re.to_string(), d.im.to_string()]);
                }
                let err = (r.estimate - r.comp2).norm();
                let v = if err <= tol { Outcome::Pass } else { Outcome::Fail };
                (json!({ "report": r, "abs_error_vs_comp2": err }), v)
            }
            Err(CoreError::UnstableExtrapolation { spread }) => {
                (json!({ "unstable": true, "spread": spread }), Outcome::Inconclusive)
            }
            Err(e) => return Err(e.into()),
        };
    Ok(Output {
        result: json!({
            "function": func.tag(),
            "n": n,
            "basis": if seed == 0 { "standard" } else { "random" },
            "face_table": table_t,
            "theta_limits": {
                "values": limits.values(),
                "expected": ThetaLimits::<f64>::expected(n),
                "detail": limits,
            },
            "comp1": cx_json(gap.comp1),
            "comp2": cx_json(gap.comp2),
            "comp2_minus_comp1": cx_json(gap.gap),
            "scaled_relation_residual": cx_json(gap.scaled_residual),
            "middle_term": "f evaluated on the span of the (n-2)-vector of norm sqrt(n-1)",
            "t_grid": grid,
            "experiment": experiment,
        }),
        table,
        verdict,
    })
}

fn counterexample(case: &str, f: Option<&str>, tol: f64) -> Result<Output> {
    match case {
        "f20-n4" => hw_case(4, 2, 0, tol),
        "n5-hw33" => n5_case(tol),
        "sphere-n3" => sphere_case(f.unwrap_or("sph:2")),
        _ => bail!("unknown case '{case}' (expected f20-n4, n5-hw33 or sphere-n3)"),
    }
}

/// One-angle sweep for `f_{m1,m2}` with the closed-form oracle alongside.
fn hw_case(n: usize, m1: u32, m2: i32, tol: f64) -> Result<Output> {
    let f = HighestWeight::new(n, m1, m2)?;
    let mut table = Table::new(&["phi", "residual_re", "residual_im", "oracle_re", "oracle_im", "oracle_gap"]);
    let (mut max_res, mut max_gap) = (0.0f64, 0.0f64);
    for phi in angle_sweep() {
        let (l, r) = relation_sides::<f64>(&f, &one_angle_basis(n, phi)?)?;
        let (lo, ro) = hw_relation_sides(m1, m2, n, phi)?;
        let (res, ora) = (l - r, lo - ro);
        let gap = (res - ora).norm();
        max_res = max_res.max(res.norm());
        max_gap = max_gap.max(gap);
        table.push([phi, res.re, res.im, ora.re, ora.im, gap]);
    }
    let reproduced = max_res > FAIL_FLOOR.max(1e-2) && max_gap <= tol;
    Ok(Output {
        result: json!({
            "case": format!("f_{{{m1},{m2}}} in R^{n}"),
            "max_abs_residual": max_res,
            "max_oracle_gap": max_gap,
            "reproduced": reproduced,
        }),
        table,
        verdict: if reproduced { Outcome::Pass } else { Outcome::Fail },
    })
}

fn n5_case(tol: f64) -> Result<Output> {
    let mut table = Table::new(&["family", "sign", "phi", "psi", "abs_residual", "oracle_gap"]);
    let (mut one_max, mut two_max, mut gap_max) = (0.0f64, 0.0f64, 0.0f64);
    for (sign, m2) in [("+", 3), ("-", -3)] {
        let f = HighestWeight::new(5, 3, m2)?;
        for phi in angle_sweep() {
            let (l, r) = relation_sides::<f64>(&f, &one_angle_basis(5, phi)?)?;
            let (lo, ro) = hw_relation_sides(3, m2, 5, phi)?;
            let gap = ((l - r) - (lo - ro)).norm();
            one_max = one_max.max((l - r).norm());
            gap_max = gap_max.max(gap);
            table.push(["one-angle".to_string(), sign.into(), phi.to_string(), String::new(), (l - r).norm().to_string(), gap.to_string()]);
        }
        for phi in angle_sweep() {
            for psi in angle_sweep() {
                let (l, r) = relation_sides::<f64>(&f, &two_angle_basis(5, phi, psi)?)?;
                let (lo, ro) = hw_relation_sides_n5(3, m2 < 0, phi, psi)?;
                let gap = ((l - r) - (lo - ro)).norm();
                two_max = two_max.max((l - r).norm());
                gap_max = gap_max.max(gap);
                table.push([
                    "two-angle".to_string(),
                    sign.into(),
                    phi.to_string(),
                    psi.to_string(),
                    (l - r).norm().to_string(),
                    gap.to_string(),
                ]);
            }
        }
    }
    let first_equal = one_max < tol;
    let second_differs = two_max > 1e-2;
    let reproduced = first_equal && second_differs && gap_max <= tol;
    let note = if reproduced {
        "first family satisfies the relation, second family violates it"
    } else if first_equal && !second_differs {
        "first family satisfies the relation, and so does the second: f_{3,±3} is not separated here"
    } else {
        "unexpected first-family residual"
    };
    Ok(Output {
        result: json!({
            "case": "f_{3,±3} in R^5",
            "first_family_max_abs_residual": one_max,
            "second_family_max_abs_residual": two_max,
            "max_oracle_gap": gap_max,
            "reproduced": reproduced,
            "note": note,
        }),
        table,
        verdict: if reproduced { Outcome::Pass } else { Outcome::Fail },
    })
}

fn sphere_case(spec: &str) -> Result<Output> {
    let f = function(spec, 3, 1)?;
    let mut table = Table::new(&["phi", "lhs", "rhs", "abs_residual"]);
    let mut max_res = 0.0f64;
    for phi in angle_sweep() {
        let (l, r) = sphere_relation_sides(f.as_ref(), &one_angle_basis(3, phi)?)?;
        max_res = max_res.max((l - r).norm());
        table.push([phi, l.re, r.re, (l - r).norm()]);
    }
    let reproduced = max_res > 1e-2;
    Ok(Output {
        result: json!({ "case": format!("{} on lines of R^3", f.tag()), "max_abs_residual": max_res, "reproduced": reproduced }),
        table,
        verdict: if reproduced { Outcome::Pass } else { Outcome::Fail },
    })
}
