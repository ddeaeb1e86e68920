//! Command-line front end: field-file parsing, subcommand dispatch, and
//! key=value / JSON report serialization.

use crate::blowup::{strict_transform, BlowupError, BranchData};
use crate::chern::CIData;
use crate::desing::{
    case_classify3, detect_ss_obstruction, eigen_data, extract_curve_data, resolve_curve, CaseTag,
    DesingError, Outcome,
};
use crate::field::{classify_center, multiplicities, CenterLocal, FieldError, VectorField};
use crate::nu::{nu, nu_gamma_oracle, theorem_milnor, FamilyTag, NuInput};
use crate::oracle::{build_deformation, local_milnor, OracleError};
use crate::poly::MultiPoly;
use crate::tower::{
    blowup_bound, chern_integrals, eta, mu_along, n_on_divisor, n_total, EllVariant, TowerError,
    TowerState,
};
use crate::unipoly::UniPoly;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

const EXIT_OK: i32 = 0;
const EXIT_PARSE: i32 = 2;
const EXIT_PRECONDITION: i32 = 3;
const EXIT_INCONSISTENT: i32 = 4;

#[derive(Parser)]
#[command(name = "foliations", disable_help_subcommand = true)]
struct Cli {
    /// Emit a JSON document instead of key=value lines.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FieldArgs {
    /// Path to a field file (n=, degree=, optional d=, then P<i> = ...).
    #[arg(long)]
    field: String,
    /// Codimension of the center {z1 = ... = zd = 0}; overrides the file.
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Args)]
struct NuArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: i128,
    #[arg(long)]
    ell: i128,
    /// Comma-separated degrees of the defining equations.
    #[arg(long, value_delimiter = ',')]
    degrees: Vec<i128>,
}

#[derive(Subcommand)]
enum Command {
    /// Multiplicities, classification and (n = 3) transverse eigen data.
    Analyze(FieldArgs),
    /// Strict transform in one chart, optionally recentered on a branch.
    Blowup {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        chart: usize,
        /// Path to a branch file (psi<i> = <polynomial in zn> lines).
        #[arg(long)]
        recenter: Option<String>,
    },
    /// Kernel invariant of one family.
    Nu {
        #[arg(long)]
        family: String,
        #[command(flatten)]
        nu: NuArgs,
    },
    /// Milnor number along the center from the kernel invariant and the
    /// embedded-point count N.
    Mu {
        #[command(flatten)]
        nu: NuArgs,
        #[arg(long = "N")]
        n_embedded: i128,
    },
    /// Singularity counts and Chern integrals along a blow-up tower.
    Tower {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: i128,
        #[arg(long)]
        deg: i128,
        #[arg(long)]
        chi: i128,
        #[arg(long, value_delimiter = ',')]
        ells: Vec<i128>,
        #[arg(long)]
        at: usize,
        /// Next order of annulment, enabling the Milnor number report.
        #[arg(long)]
        ell_next: Option<i128>,
        /// Embedded-point count at the level, for the Milnor report.
        #[arg(long = "N")]
        n_embedded: Option<i128>,
        /// Use the literal displayed exponent factor instead of the
        /// base-case-consistent one.
        #[arg(long)]
        literal_ellj: bool,
    },
    /// Maximum-blow-up bound from the divisibility argument.
    Bound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        lambda0: i128,
        #[arg(long)]
        ell1: i128,
        /// Use the squared-lambda reading of the displayed corollary.
        #[arg(long)]
        corollary_lambda_squared: bool,
    },
    /// Blow up along curves until an elementary curve or an obstruction.
    Resolve {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 8)]
        budget: usize,
    },
    /// Local Milnor number at the origin by truncated elimination.
    OracleMilnor {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 12)]
        max_degree: u32,
    },
    /// Order-prescribed one-parameter deformation of the field.
    Deform {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the internal cross-check grid.
    Selftest,
}

/// Parsed field file: the vector field and the declared codimension.
struct FieldFile {
    field: VectorField,
    d: usize,
}

fn parse_field_file(path: &str, d_override: Option<usize>) -> Result<FieldFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let mut n: Option<usize> = None;
    let mut degree: Option<u32> = None;
    let mut d: Option<usize> = None;
    let mut comps: Vec<(usize, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "n" => n = Some(value.parse().map_err(|e| format!("n: {e}"))?),
            "degree" => degree = Some(value.parse().map_err(|e| format!("degree: {e}"))?),
            "d" => d = Some(value.parse().map_err(|e| format!("d: {e}"))?),
            _ => {
                let idx: usize = key
                    .strip_prefix('P')
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| format!("line {}: unknown key {key}", lineno + 1))?;
                comps.push((idx, value.to_string()));
            }
        }
    }
    let n = n.ok_or("missing n=")?;
    let degree = degree.ok_or("missing degree=")?;
    if !(1..=16).contains(&n) {
        return Err(format!("n = {n} out of range 1..=16"));
    }
    comps.sort_by_key(|(i, _)| *i);
    let indices: Vec<usize> = comps.iter().map(|(i, _)| *i).collect();
    if indices != (1..=n).collect::<Vec<_>>() {
        return Err(format!("expected components P1..P{n}, got {indices:?}"));
    }
    let parsed = comps
        .iter()
        .map(|(_, s)| MultiPoly::parse(s, n))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let d = d_override.or(d).unwrap_or(2);
    if !(2..=n).contains(&d) {
        return Err(format!("d = {d} out of range 2..={n}"));
    }
    Ok(FieldFile {
        field: VectorField::new(n, parsed, degree, "file"),
        d,
    })
}

fn parse_branch_file(path: &str, n: usize) -> Result<BranchData, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let mut psi: Vec<Option<UniPoly>> = vec![None; n - 2];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected psi<i> = value", lineno + 1))?;
        let idx: usize = key
            .trim()
            .strip_prefix("psi")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("line {}: unknown key {}", lineno + 1, key.trim()))?;
        if !(2..n).contains(&idx) {
            return Err(format!("psi{idx} out of range 2..{n}"));
        }
        let p = MultiPoly::parse(&value.trim().replace(&format!("z{n}"), "z1"), 1)
            .map_err(|e| e.to_string())?;
        let u = UniPoly::from_multi(&p, 0).ok_or_else(|| format!("psi{idx} is not univariate"))?;
        psi[idx - 2] = Some(u);
    }
    psi.into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| format!("missing psi{}", i + 2)))
        .collect::<Result<Vec<_>, _>>()
        .map(|psi| BranchData { psi })
}

fn family_tag(name: &str) -> Result<FamilyTag, String> {
    match name.to_lowercase().as_str() {
        "phi" => Ok(FamilyTag::Phi),
        "psi" => Ok(FamilyTag::Psi),
        "theta" => Ok(FamilyTag::Theta),
        other => Err(format!("unknown family {other}; expected phi|psi|theta")),
    }
}

fn nu_input(args: &NuArgs) -> Result<NuInput, String> {
    let ci = CIData::new(args.n, args.d, args.degrees.clone()).map_err(|e| e.to_string())?;
    Ok(NuInput {
        k: args.k,
        ell: args.ell,
        ci,
    })
}

/// Ordered report: printed as key=value lines or one JSON object.
struct Report {
    entries: Vec<(String, Value)>,
}

impl Report {
    fn new() -> Self {
        Report {
            entries: Vec::new(),
        }
    }

    fn push(&mut self, key: &str, value: impl Into<Value>) {
        self.entries.push((key.to_string(), value.into()));
    }

    fn print(&self, json: bool) {
        if json {
            let mut map = Map::new();
            for (k, v) in &self.entries {
                map.insert(k.clone(), v.clone());
            }
            println!("{}", Value::Object(map));
        } else {
            for (k, v) in &self.entries {
                match v {
                    Value::String(s) => println!("{k}={s}"),
                    other => println!("{k}={other}"),
                }
            }
        }
    }
}

fn big_to_value(v: i128) -> Value {
    match i64::try_from(v) {
        Ok(x) => json!(x),
        Err(_) => json!(v.to_string()),
    }
}

enum CliError {
    Parse(String),
    Precondition(String),
    Inconsistent(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Precondition(_) => EXIT_PRECONDITION,
            CliError::Inconsistent(_) => EXIT_INCONSISTENT,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Precondition(m) | CliError::Inconsistent(m) => m,
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::Poly(p) => CliError::Parse(p.to_string()),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<BlowupError> for CliError {
    fn from(e: BlowupError) -> Self {
        match e {
            BlowupError::Field(f) => f.into(),
            BlowupError::Poly(p) => CliError::Parse(p.to_string()),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<DesingError> for CliError {
    fn from(e: DesingError) -> Self {
        match e {
            DesingError::Blowup(b) => b.into(),
            DesingError::Field(f) => f.into(),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<TowerError> for CliError {
    fn from(e: TowerError) -> Self {
        match e {
            TowerError::NonIntegerResult { .. } | TowerError::BadLambda => {
                CliError::Inconsistent(e.to_string())
            }
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Field(f) => f.into(),
            OracleError::Poly(p) => CliError::Parse(p.to_string()),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

fn seed_default() -> u64 {
    std::env::var("FOLIATION_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

fn case_name(c: &CaseTag) -> &'static str {
    match c {
        CaseTag::CaseI { resonant: false } => "I",
        CaseTag::CaseI { resonant: true } => "I-resonant",
        CaseTag::CaseII => "II",
        CaseTag::CaseIII => "III",
    }
}

fn push_classification(report: &mut Report, f: &VectorField, d: usize) -> Result<(), CliError> {
    let c = CenterLocal::new(d);
    let (m_prime, m_min, orders) = multiplicities(f, &c)?;
    let cls = classify_center(f, &c)?;
    report.push("n", f.n as u64);
    report.push("d", d as u64);
    report.push("degree", f.projective_degree);
    report.push(
        "orders",
        orders
            .iter()
            .map(|o| o.map_or("inf".to_string(), |v| v.to_string()))
            .collect::<Vec<_>>()
            .join(","),
    );
    report.push("m_prime", m_prime);
    report.push("m_min", m_min);
    report.push("type", format!("{:?}", cls.type_tag));
    report.push("dicritical", cls.dicritical);
    report.push("ell", cls.ell);
    report.push("ell_kernel", cls.ell_kernel);
    if f.n == 3 && d == 2 {
        let cd = extract_curve_data(f)?;
        let e = eigen_data(&cd);
        report.push("trace", e.trace.display_with("z3"));
        report.push("det", e.det.display_with("z3"));
        report.push("delta", e.delta.display_with("z3"));
        report.push("case", case_name(&case_classify3(&e)));
        if detect_ss_obstruction(&cd) {
            report.push("hint", "ObstructionSS");
        }
    }
    Ok(())
}

fn run_command(cmd: &Command, report: &mut Report) -> Result<(), CliError> {
    match cmd {
        Command::Analyze(args) => {
            let ff = parse_field_file(&args.field, args.d).map_err(CliError::Parse)?;
            push_classification(report, &ff.field, ff.d)?;
        }
        Command::Blowup {
            field,
            chart,
            recenter,
        } => {
            let ff = parse_field_file(&field.field, field.d).map_err(CliError::Parse)?;
            let c = CenterLocal::new(ff.d);
            let res = strict_transform(&ff.field, &c, *chart)?;
            let out = match recenter {
                Some(path) => {
                    let b = parse_branch_file(path, ff.field.n).map_err(CliError::Parse)?;
                    crate::blowup::recenter_on_branch(&res.strict, &b)?
                }
                None => res.strict.clone(),
            };
            report.push("chart", *chart as u64);
            report.push("ell", res.ell);
            report.push("divisor_var", format!("z{}", res.divisor_var + 1));
            for (i, p) in out.components.iter().enumerate() {
                report.push(&format!("P{}", i + 1), p.to_string());
            }
        }
        Command::Nu { family, nu: args } => {
            let tag = family_tag(family).map_err(CliError::Parse)?;
            let inp = nu_input(args).map_err(CliError::Parse)?;
            let value = nu(tag, &inp);
            if value != nu_gamma_oracle_checked(tag, &inp) {
                return Err(CliError::Inconsistent(
                    "closed form disagrees with the expansion oracle".into(),
                ));
            }
            report.push("nu", big_to_value(value));
        }
        Command::Mu {
            nu: args,
            n_embedded,
        } => {
            let inp = nu_input(args).map_err(CliError::Parse)?;
            let r = theorem_milnor(&inp, Some(*n_embedded));
            report.push("mu_lower_bound", big_to_value(r.mu_lower_bound));
            report.push("mu", big_to_value(r.mu.expect("N provided")));
            report.push(
                "sum_isolated_mu",
                big_to_value(r.sum_isolated_mu.expect("N provided")),
            );
            report.push("blowup_delta", big_to_value(r.mu_after_blowup_delta));
        }
        Command::Tower {
            n,
            k,
            deg,
            chi,
            ells,
            at,
            ell_next,
            n_embedded,
            literal_ellj,
        } => {
            let t = TowerState::new(*n, *k, *deg, *chi, ells.clone())?;
            let j = *at;
            report.push("lambda0", big_to_value(t.lambda0));
            report.push("n_on_divisor", big_to_value(n_on_divisor(&t, j)?));
            report.push("eta", big_to_value(eta(&t, j)?));
            report.push("n_total", big_to_value(n_total(&t, j)?));
            let ci = chern_integrals(&t, j)?;
            report.push("e_on_w", ci.e_on_w.to_string());
            report.push("c1_tm", ci.c1_tm.to_string());
            report.push("c1_tf_star", ci.c1_tf_star.to_string());
            if let (Some(en), Some(ne)) = (ell_next, n_embedded) {
                let variant = if *literal_ellj {
                    EllVariant::LiteralEllJ
                } else {
                    EllVariant::EllNext
                };
                report.push("mu_along", big_to_value(mu_along(&t, j, *en, *ne, variant)?));
            }
        }
        Command::Bound {
            n,
            lambda0,
            ell1,
            corollary_lambda_squared,
        } => {
            let b = blowup_bound(*n, *lambda0, *ell1, *corollary_lambda_squared)?;
            report.push("bound", b);
        }
        Command::Resolve { field, budget } => {
            let ff = parse_field_file(&field.field, field.d).map_err(CliError::Parse)?;
            if ff.field.n != 3 || ff.d != 2 {
                return Err(CliError::Precondition(
                    "resolve needs n = 3 and d = 2".into(),
                ));
            }
            let trace = resolve_curve(&ff.field, *budget)?;
            for (i, s) in trace.steps.iter().enumerate() {
                report.push(
                    &format!("step{i}"),
                    format!(
                        "type={:?} case={} {}",
                        s.classification.type_tag,
                        case_name(&s.case),
                        if s.note.is_empty() {
                            "terminal".to_string()
                        } else {
                            format!("next={}", s.note)
                        }
                    ),
                );
            }
            report.push(
                "outcome",
                match trace.outcome {
                    Outcome::ElementaryReached(step) => format!("ElementaryReached({step})"),
                    Outcome::ObstructionSS => "ObstructionSS".to_string(),
                    Outcome::BudgetExceeded => "BudgetExceeded".to_string(),
                },
            );
        }
        Command::OracleMilnor { field, max_degree } => {
            let ff = parse_field_file(&field.field, field.d).map_err(CliError::Parse)?;
            let r = local_milnor(&ff.field.components, *max_degree)?;
            report.push("mu", r.mu);
            report.push("stabilized_at", r.stabilized_at);
            report.push("certificate", r.certificate);
        }
        Command::Deform { field, seed } => {
            let ff = parse_field_file(&field.field, field.d).map_err(CliError::Parse)?;
            let c = CenterLocal::new(ff.d);
            let spec = build_deformation(&ff.field, &c, seed.unwrap_or_else(seed_default))?;
            report.push("seed", spec.seed);
            report.push(
                "targets",
                spec.targets
                    .iter()
                    .map(|q| q.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            for (i, p) in spec.perturbation.components.iter().enumerate() {
                report.push(&format!("Y{}", i + 1), p.to_string());
            }
        }
        Command::Selftest => {
            let checked = selftest_grid().map_err(CliError::Inconsistent)?;
            report.push("grid_cells", checked as u64);
            report.push("status", "ok");
        }
    }
    Ok(())
}

fn nu_gamma_oracle_checked(tag: FamilyTag, inp: &NuInput) -> i128 {
    match tag {
        FamilyTag::Theta => nu_gamma_oracle(inp),
        other => nu(other, inp),
    }
}

/// Cross-check grid: the closed-form kernel invariant against the
/// expansion oracle, and the curve-case remark formula, over a small
/// sweep of ambient data.
fn selftest_grid() -> Result<usize, String> {
    let mut checked = 0usize;
    for n in 3..=5usize {
        for d in 2..n {
            for k in 1..=4i128 {
                for ell in 0..=3i128 {
                    let degrees: Vec<i128> = (0..d).map(|i| 1 + (i as i128 % 2)).collect();
                    let ci = CIData::new(n, d, degrees).map_err(|e| e.to_string())?;
                    let inp = NuInput { k, ell, ci };
                    let closed = nu(FamilyTag::Theta, &inp);
                    let oracle = nu_gamma_oracle(&inp);
                    if closed != oracle {
                        return Err(format!(
                            "theta mismatch at n={n} d={d} k={k} ell={ell}: {closed} vs {oracle}"
                        ));
                    }
                    if d == n - 1 {
                        let remark =
                            crate::nu::curve_remark_formula(k, ell, &inp.ci).map_err(|e| e.to_string())?;
                        if remark != closed {
                            return Err(format!(
                                "curve remark mismatch at n={n} k={k} ell={ell}"
                            ));
                        }
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(checked)
}

/// Entry point: parse arguments, run the command, print the report, and
/// translate errors to exit codes (2 parse, 3 precondition, 4 math).
pub fn run(args: Vec<String>) -> i32 {
    let mut argv = vec!["foliations".to_string()];
    argv.extend(args);
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    let mut report = Report::new();
    match run_command(&cli.command, &mut report) {
        Ok(()) => {
            report.print(cli.json);
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}
