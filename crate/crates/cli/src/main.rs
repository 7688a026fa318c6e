use std::fmt::Display;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use mcalg::cyclic::build_semidirect;
use mcalg::exparse::{
    digest, monomial_json, parse_problem_with, polyvector_json, scalar_json, series_json, ProblemFile, Report,
};
use mcalg::fdalg::{
    builtin, eigen_split, from_presentation, idempotent_check, parse_element, zero_eigenspace_rank, AlgebraError,
    FiniteDimAlgebra,
};
use mcalg::koszul::{
    hh_ranks, invariant_hh, jacobian_ring, koszul_exactness, twisted_sector_ranks, HHOptions, HHReport, KoszulError,
    MonomialOrder, WindowRanks,
};
use mcalg::mcgauge::{classify_cubic, mc_check, normal_form, replay, residual, CubicClass, GaugeError};
use mcalg::{CyclicAction, Field, GaugeStep, MCPair, Polyvector, SeriesContext};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Command {
    McCheck,
    Hh,
    InvariantHh,
    TwistedHh,
    Jacobian,
    Exactness,
    ClassifyCubic,
    NormalForm,
    QhSplit,
    SemidirectCheck,
}

/// Exact computations on Maurer–Cartan pairs and finite-dimensional algebras.
#[derive(Parser, Debug)]
#[command(name = "mcalg", version)]
struct Cli {
    command: Command,
    /// Problem file.
    input: Option<PathBuf>,
    /// Report destination (default stdout).
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    /// Overrides the `trunc` directive.
    #[arg(long)]
    trunc: Option<u32>,
    /// Stabilization window (default `trunc / 2`).
    #[arg(long)]
    window: Option<u32>,
    /// Genus for `normal-form` (default from the group order).
    #[arg(long)]
    genus: Option<u32>,
    /// Gauge log (a `normal-form` report or a bare step array) to replay.
    #[arg(long)]
    replay: Option<PathBuf>,
    /// Builtin algebra for `qh-split`, e.g. `qh_moduli_sigma2` or `qh_quadric(3)`.
    #[arg(long)]
    builtin: Option<String>,
    /// Element to split by in `qh-split` (default `h`, else `c1`).
    #[arg(long)]
    element: Option<String>,
}

enum Failure {
    Input(String),
    Math(Report),
}

fn input<E: Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn math(mut report: Report, kind: &str, msg: String) -> Failure {
    report.set("status", json!("failed"));
    report.set("error", json!({ "kind": kind, "message": msg }));
    Failure::Math(report)
}

fn koszul_failure(report: Report, e: KoszulError) -> Failure {
    let kind = match &e {
        KoszulError::NotStabilized { .. } => "NotStabilized",
        KoszulError::JacobianNotStabilized(..) => "JacobianNotStabilized",
        KoszulError::DifferentialNotSquareZero(..) => "DifferentialNotSquareZero",
        KoszulError::FixedLocusPositiveDimensional(_) => "FixedLocusPositiveDimensional",
        _ => return input(e),
    };
    let mut report = report;
    if let KoszulError::NotStabilized { table, .. } = &e {
        report.set("table", table_json(table));
    }
    math(report, kind, e.to_string())
}

fn gauge_failure(report: Report, e: GaugeError) -> Failure {
    let kind = match &e {
        GaugeError::NotCoboundary { .. } => "NotCoboundary",
        GaugeError::TailUnsolvable { .. } => "TailUnsolvable",
        GaugeError::CubicDegenerate(_) => "CubicDegenerate",
        GaugeError::RequiresGaussianField => "RequiresGaussianField",
        _ => return input(e),
    };
    math(report, kind, e.to_string())
}

fn algebra_failure(report: Report, e: AlgebraError) -> Failure {
    match e {
        AlgebraError::NotAssociative(..) => math(report, "NotAssociative", e.to_string()),
        _ => input(e),
    }
}

struct Problem {
    file: ProblemFile,
    ctx: SeriesContext,
}

impl Problem {
    fn names(&self) -> &[String] {
        &self.file.names
    }

    fn pair(&self) -> Result<MCPair, Failure> {
        let w = self.file.w.clone().ok_or_else(|| input("problem file has no `W` line"))?;
        let eta = self.file.eta.clone().unwrap_or_else(|| Polyvector::zero(self.ctx));
        MCPair::new(w, eta).map_err(input)
    }

    fn group(&self) -> Result<&CyclicAction, Failure> {
        self.file.group.as_ref().ok_or_else(|| input("problem file has no `group` line"))
    }
}

fn load(cli: &Cli) -> Result<(Vec<u8>, ProblemFile), Failure> {
    let path = cli.input.as_ref().ok_or_else(|| input("missing input file"))?;
    let bytes = fs::read(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let file = parse_problem_with(&bytes, cli.trunc).map_err(|e| input(format!("{}: {e}", path.display())))?;
    Ok((bytes, file))
}

fn problem(cli: &Cli) -> Result<Problem, Failure> {
    let (_, file) = load(cli)?;
    let ctx = file.ctx.ok_or_else(|| input("problem file declares no series context (`vars` and `trunc`)"))?;
    if let Some(w) = cli.window {
        if w == 0 || w >= ctx.trunc {
            return Err(input(format!("--window {w} needs 1 <= window < trunc = {}", ctx.trunc)));
        }
    }
    Ok(Problem { file, ctx })
}

fn validate_flags(cli: &Cli) -> Result<(), Failure> {
    let allowed = |flag: &str, set: bool, ok: &[Command]| {
        if set && !ok.contains(&cli.command) {
            Err(input(format!("{flag} does not apply to this command")))
        } else {
            Ok(())
        }
    };
    use Command::*;
    allowed("--window", cli.window.is_some(), &[Hh, InvariantHh, TwistedHh, Exactness])?;
    allowed("--genus", cli.genus.is_some(), &[NormalForm])?;
    allowed("--replay", cli.replay.is_some(), &[NormalForm])?;
    allowed("--builtin", cli.builtin.is_some(), &[QhSplit])?;
    allowed("--element", cli.element.is_some(), &[QhSplit])?;
    allowed(
        "--trunc",
        cli.trunc.is_some(),
        &[McCheck, Hh, InvariantHh, TwistedHh, Jacobian, Exactness, ClassifyCubic, NormalForm],
    )?;
    match (cli.command, &cli.builtin, &cli.input) {
        (QhSplit, Some(_), Some(_)) => Err(input("give either --builtin or an input file, not both")),
        (QhSplit, Some(_), None) => Ok(()),
        (_, _, None) => Err(input("missing input file")),
        _ => Ok(()),
    }
}

fn window_json(r: &WindowRanks) -> Value {
    json!({ "window": r.window, "trunc": r.trunc, "even": r.even, "odd": r.odd })
}

fn table_json(t: &[WindowRanks]) -> Value {
    Value::Array(t.iter().map(window_json).collect())
}

fn hh_json(report: &mut Report, r: &HHReport, names: &[String]) {
    report.set("even", json!(r.even));
    report.set("odd", json!(r.odd));
    report.set("window", json!(r.window));
    report.set("trunc", json!(r.trunc));
    report.set("stabilized", json!(r.stabilized));
    report.set("table", table_json(&r.table));
    report.set("chain_dims", json!([r.chain_dims.0, r.chain_dims.1]));
    report.set("invariant", json!(r.invariant));
    let basis = |b: &Option<Vec<Polyvector>>| {
        b.as_ref().map_or(Value::Null, |v| Value::Array(v.iter().map(|p| polyvector_json(p, names)).collect()))
    };
    report.set("even_basis", basis(&r.even_basis));
    report.set("odd_basis", basis(&r.odd_basis));
}

fn opts(cli: &Cli) -> HHOptions {
    HHOptions { window: cli.window, with_basis: true }
}

fn require_mc(report: Report, p: &MCPair) -> Result<Report, Failure> {
    let v = mc_check(p);
    match v.first_failure() {
        Some(c) => {
            let name = c.name.to_string();
            let mut report = report;
            report.set("failing_bracket", json!(name));
            Err(math(report, "NotMaurerCartan", format!("{name} does not vanish")))
        }
        None => Ok(report),
    }
}

fn start(cli: &Cli, p: &Problem, name: &str) -> Report {
    let mut r = Report::new(name, &p.file.digest);
    r.set("vars", json!(p.names()));
    r.set("field", json!(field_name(p.ctx.field)));
    r.set("trunc", json!(p.ctx.trunc));
    if let Some(w) = cli.window {
        r.set("window", json!(w));
    }
    r
}

fn field_name(f: Field) -> &'static str {
    match f {
        Field::Q => "Q",
        Field::QI => "QI",
    }
}

fn cmd_mc_check(cli: &Cli) -> Result<Report, Failure> {
    let p = problem(cli)?;
    let pair = p.pair()?;
    let mut report = start(cli, &p, "mc-check");
    let v = mc_check(&pair);
    let checks: Vec<Value> = v
        .checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "vanishes": c.vanishes,
                "value": polyvector_json(&c.value, p.names()),
                "note": c.note,
            })
        })
        .collect();
    report.set("checks", Value::Array(checks));
    report.set("pass", json!(v.pass));
    require_mc(report, &pair)
}

fn cmd_hh(cli: &Cli, kind: Command) -> Result<Report, Failure> {
    let p = problem(cli)?;
    let pair = p.pair()?;
    let name = match kind {
        Command::Hh => "hh",
        Command::InvariantHh => "invariant-hh",
        _ => "twisted-hh",
    };
    let mut report = require_mc(start(cli, &p, name), &pair)?;
    match kind {
        Command::Hh => {
            let r = hh_ranks(&pair, &opts(cli)).map_err(|e| koszul_failure(report.clone(), e))?;
            hh_json(&mut report, &r, p.names());
        }
        Command::InvariantHh => {
            let g = p.group()?;
            let r = invariant_hh(&pair, g, &opts(cli)).map_err(|e| koszul_failure(report.clone(), e))?;
            hh_json(&mut report, &r, p.names());
        }
        _ => {
            let g = p.group()?;
            let o = HHOptions { window: cli.window, with_basis: false };
            let r = twisted_sector_ranks(&pair, g, &o).map_err(|e| koszul_failure(report.clone(), e))?;
            let sectors: Vec<Value> = r
                .sectors
                .iter()
                .map(|s| json!({ "element": s.element, "even": s.even, "odd": s.odd, "rule_based": s.rule_based }))
                .collect();
            report.set("sectors", Value::Array(sectors));
            report.set("even", json!(r.even));
            report.set("odd", json!(r.odd));
        }
    }
    report.set("status", json!("ok"));
    Ok(report)
}

fn cmd_jacobian(cli: &Cli) -> Result<Report, Failure> {
    let p = problem(cli)?;
    let w = p.pair()?.w().clone();
    let mut report = start(cli, &p, "jacobian");
    let mut totals = Vec::new();
    for (key, order) in [("glex", MonomialOrder::GradedLex), ("revlex", MonomialOrder::ReverseLex)] {
        let j = match jacobian_ring(&w, order) {
            Ok(j) => j,
            Err(KoszulError::JacobianNotStabilized(d, j)) => {
                report.set("dims", json!(j.dims));
                return Err(koszul_failure(report, KoszulError::JacobianNotStabilized(d, j)));
            }
            Err(e) => return Err(koszul_failure(report, e)),
        };
        let basis: Vec<Value> = j.basis.iter().map(|m| monomial_json(m, p.names())).collect();
        report.set(key, json!({ "dims": j.dims, "total": j.total, "basis": basis }));
        totals.push(j.total);
    }
    report.set("total", json!(totals[0]));
    report.set("orders_agree", json!(totals[0] == totals[1]));
    if totals[0] != totals[1] {
        return Err(math(report, "OrdersDisagree", "graded-lex and reverse-lex totals differ".into()));
    }
    report.set("status", json!("ok"));
    Ok(report)
}

fn cmd_exactness(cli: &Cli) -> Result<Report, Failure> {
    let p = problem(cli)?;
    let w = p.pair()?.w().clone();
    let mut report = start(cli, &p, "exactness");
    let v = koszul_exactness(&w, &opts(cli)).map_err(|e| koszul_failure(report.clone(), e))?;
    report.set("exact", json!(v.exact));
    report.set("window", json!(v.window));
    report.set("stabilized", json!(v.stabilized));
    report.set("ranks", table_json(&v.ranks));
    match &v.failure {
        Some(f) => {
            report.set(
                "witness",
                json!({
                    "form_degree": f.form_degree,
                    "degree": f.degree,
                    "class": polyvector_json(&f.witness, p.names()),
                }),
            );
            Err(math(report, "NotExact", format!("nonzero class in form degree {}", f.form_degree)))
        }
        None => {
            report.set("status", json!("ok"));
            Ok(report)
        }
    }
}

fn matrix_json(m: &mcalg::linalg::Matrix) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(scalar_json).collect())).collect())
}

fn cmd_classify(cli: &Cli) -> Result<Report, Failure> {
    let p = problem(cli)?;
    let w = p.pair()?.w().clone();
    let g = p.group()?;
    let mut report = start(cli, &p, "classify-cubic");
    report.set("cubic", series_json(&w.homogeneous_part(3), p.names()));
    match classify_cubic(&w, g) {
        CubicClass::TypeA(l) => {
            report.set("class", json!("TypeA"));
            report.set("lambda", scalar_json(&l));
        }
        CubicClass::TypeB { lambda, witness } => {
            report.set("class", json!("TypeB"));
            report.set("lambda", scalar_json(&lambda));
            report.set("witness", witness.as_ref().map_or(Value::Null, matrix_json));
            report.set("requires_gaussian_field", json!(p.ctx.field == Field::Q));
        }
        CubicClass::Other(_) => report.set("class", json!("Other")),
    }
    report.set("status", json!("ok"));
    Ok(report)
}

fn read_log(path: &PathBuf, p: &Problem) -> Result<(Vec<GaugeStep>, String), Failure> {
    let bytes = fs::read(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_slice(&bytes).map_err(|e| input(format!("{}: not JSON: {e}", path.display())))?;
    let steps = match &v {
        Value::Array(a) => a.clone(),
        Value::Object(o) => match o.get("gauge_log") {
            Some(Value::Array(a)) => a.clone(),
            _ => return Err(input(format!("{}: no `gauge_log` array", path.display()))),
        },
        _ => return Err(input(format!("{}: expected an array or a report", path.display()))),
    };
    let log = steps
        .iter()
        .map(|s| GaugeStep::from_json(s, p.names(), p.ctx))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| input(format!("{}: {e}", path.display())))?;
    Ok((log, digest(&bytes)))
}

fn genus(cli: &Cli, p: &Problem) -> Result<(u32, CyclicAction), Failure> {
    let g = match (cli.genus, &p.file.group) {
        (Some(g), _) => g,
        (None, Some(a)) if a.order() % 2 == 1 && a.order() >= 5 => (a.order() - 1) / 2,
        (None, Some(a)) => return Err(input(format!("cannot infer a genus from group order {}", a.order()))),
        (None, None) => return Err(input("normal-form needs --genus or a `group` line")),
    };
    if g < 2 {
        return Err(input(format!("--genus {g}: need genus >= 2")));
    }
    let action = p.file.group.clone().unwrap_or_else(|| CyclicAction::canonical(g));
    Ok((g, action))
}

fn cmd_normal_form(cli: &Cli) -> Result<Report, Failure> {
    let p = problem(cli)?;
    let pair = p.pair()?;
    if !pair.eta().is_zero() {
        return Err(input("normal-form needs eta = 0"));
    }
    let (g, action) = genus(cli, &p)?;
    let mut report = start(cli, &p, "normal-form");
    report.set("genus", json!(g));
    report.set("input", series_json(pair.w(), p.names()));
    if let Some(path) = &cli.replay {
        let (log, log_digest) = read_log(path, &p)?;
        let out = replay(&log, &pair).map_err(|e| gauge_failure(report.clone(), e))?;
        report.set("mode", json!("replay"));
        report.set("log_digest", json!(log_digest));
        report.set("steps", json!(log.len()));
        report.set("output", series_json(out.w(), p.names()));
        report.set("residual", series_json(&residual(out.w(), g), p.names()));
        report.set("status", json!("ok"));
        return Ok(report);
    }
    let r = normal_form(pair.w(), &action, g).map_err(|e| gauge_failure(report.clone(), e))?;
    report.set("mode", json!("solve"));
    report.set("gauge_log", Value::Array(r.gauge_log.iter().map(|s| s.to_json(p.names())).collect()));
    report.set("output", series_json(&r.output, p.names()));
    report.set("residual", series_json(&r.residual, p.names()));
    report.set("lambda", scalar_json(&r.lambda));
    report.set("mu", Value::Array(r.mu.iter().map(scalar_json).collect()));
    let s = &r.scaling;
    report.set(
        "scaling",
        json!({
            "epsilon_power": s.epsilon_power,
            "epsilon_target": scalar_json(&s.epsilon_target),
            "coordinate_power": s.coordinate_power,
            "epsilon_exponent_in_coordinates": s.epsilon_exponent_in_coordinates,
            "coordinate_targets": s.coordinate_targets,
        }),
    );
    report.set("status", json!(r.status.to_string()));
    Ok(report)
}

fn split_element(cli: &Cli, alg: &FiniteDimAlgebra) -> Result<(String, Vec<mcalg::Scalar>), Failure> {
    if let Some(e) = &cli.element {
        return Ok((e.clone(), parse_element(alg, e).map_err(input)?));
    }
    if alg.index("h").is_some() {
        return Ok(("h".into(), parse_element(alg, "h").map_err(input)?));
    }
    match alg.c1() {
        Some(c) => Ok((alg.render(c), c.to_vec())),
        None => Err(input("algebra has no `h` and no `c1`; pass --element")),
    }
}

fn cmd_qh_split(cli: &Cli) -> Result<Report, Failure> {
    let (mut report, alg) = match &cli.builtin {
        Some(b) => {
            let alg = builtin(b).map_err(input)?;
            let mut r = Report::new("qh-split", &digest(b.as_bytes()));
            r.set("builtin", json!(b));
            (r, alg)
        }
        None => {
            let (_, file) = load(cli)?;
            let ring = file.ring.clone().ok_or_else(|| input("problem file has no `ring` block"))?;
            let report = Report::new("qh-split", &file.digest);
            let alg = from_presentation(&ring).map_err(|e| algebra_failure(report.clone(), e))?;
            (report, alg)
        }
    };
    alg.check_associative().map_err(|e| algebra_failure(report.clone(), e))?;
    report.set("dim", json!(alg.dim()));
    report.set("associative", json!(true));
    let (label, a) = split_element(cli, &alg)?;
    report.set("element", json!(label));
    let split = eigen_split(&alg, &a);
    report.set("minimal_polynomial", json!(split.minpoly.render("t")));
    let mut table = serde_json::Map::new();
    let mut blocks = Vec::new();
    let mut laws = true;
    let mut sum = alg.zero();
    for (i, b) in split.blocks.iter().enumerate() {
        table.insert(b.label.to_string(), json!(b.dim));
        let ok = idempotent_check(&alg, &b.idempotent).pass;
        laws &= ok;
        for c in &split.blocks[i + 1..] {
            laws &= alg.mul(&b.idempotent, &c.idempotent).iter().all(|x| x.is_zero());
        }
        sum = alg.add(&sum, &b.idempotent);
        blocks.push(json!({
            "label": b.label.to_string(),
            "factor": b.factor.render("t"),
            "multiplicity": b.multiplicity,
            "dim": b.dim,
            "idempotent": alg.render(&b.idempotent),
            "idempotent_ok": ok,
        }));
    }
    laws &= sum == alg.unit();
    report.set("eigenvalues", Value::Object(table));
    report.set("blocks", Value::Array(blocks));
    report.set("zero_eigenspace_rank", json!(zero_eigenspace_rank(&alg, &a)));
    report.set("idempotent_laws", json!(laws));
    if !laws {
        return Err(math(report, "IdempotentLaws", "idempotents fail to be orthogonal or to sum to 1".into()));
    }
    report.set("status", json!("ok"));
    Ok(report)
}

fn cmd_semidirect(cli: &Cli) -> Result<Report, Failure> {
    let p = problem(cli)?;
    let g = p.group()?;
    let mut report = start(cli, &p, "semidirect-check");
    report.set("order", json!(g.order()));
    report.set("weights", json!(g.weights()));
    let alg = build_semidirect(p.ctx.num_vars, g).map_err(|e| algebra_failure(report.clone(), e))?;
    report.set("dim", json!(alg.dim()));
    alg.check_associative().map_err(|e| algebra_failure(report.clone(), e))?;
    report.set("associative", json!(true));
    report.set("status", json!("ok"));
    Ok(report)
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    validate_flags(cli)?;
    match cli.command {
        Command::McCheck => cmd_mc_check(cli),
        c @ (Command::Hh | Command::InvariantHh | Command::TwistedHh) => cmd_hh(cli, c),
        Command::Jacobian => cmd_jacobian(cli),
        Command::Exactness => cmd_exactness(cli),
        Command::ClassifyCubic => cmd_classify(cli),
        Command::NormalForm => cmd_normal_form(cli),
        Command::QhSplit => cmd_qh_split(cli),
        Command::SemidirectCheck => cmd_semidirect(cli),
    }
}

fn emit(cli: &Cli, report: &Report) -> Result<(), String> {
    let text = report.to_canonical_string();
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, code) = match run(&cli) {
        Ok(r) => (r, 0),
        Err(Failure::Math(r)) => (r, 1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&cli, &report) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
