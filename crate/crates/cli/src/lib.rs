//! Report-producing commands behind the `lietp` binary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, Subcommand};

use lietp_core::halfder::{operator_rank, Generator, OperatorJson};
use lietp_core::oracle::{extreme_pairs_by_cycles, pair_classes_by_cycles};
use lietp_core::poset::{
    blocks_and_bridges, enumerate_cycles, extreme_pairs, extreme_sides, pair_classes, DEFAULT_CYCLE_CAP,
};
use lietp_core::rational::{fmt_q, is_zero_or_one};
use lietp_core::tpstruct::{ParamsJson, TableJson};
use lietp_core::{golden, Elem, Error, Poset, TPDecomposition, TPProduct, DEFAULT_ORACLE_CAP};

pub const ORACLE_CAP_VAR: &str = "LIETP_ORACLE_CAP";

#[derive(Debug, Parser)]
#[command(name = "lietp", version, about = "Half-derivations and transposed Poisson structures on incidence algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Order-theoretic summary of a poset.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        u0: Option<String>,
    },
    /// Structural basis of the space of ½-derivations.
    Halfder {
        file: PathBuf,
        /// Also solve the defining linear system and compare dimensions.
        #[arg(long)]
        oracle: bool,
    },
    /// Split a ½-derivation into inner, σ and κ parts.
    Decompose {
        file: PathBuf,
        operator: PathBuf,
        #[arg(long)]
        u0: Option<String>,
    },
    /// Build, verify, decompose or normalize a transposed Poisson structure.
    Tp {
        #[command(subcommand)]
        action: TpAction,
    },
    /// Recompute the worked examples and compare with the known answers.
    Examples,
}

#[derive(Debug, Subcommand)]
pub enum TpAction {
    /// Product table from `{mu, nu, lambda}` parameters.
    Build(TpArgs),
    /// Check the axioms on a product table.
    Verify(TpArgs),
    /// Recover parameters from a product table.
    Decompose(TpArgs),
    /// Rescale so that nu takes values in {0, 1}.
    Normalize(TpArgs),
}

#[derive(Debug, clap::Args)]
pub struct TpArgs {
    pub file: PathBuf,
    pub data: PathBuf,
    #[arg(long)]
    pub u0: Option<String>,
    /// Also write the JSON payload to this file.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Rendered text plus the overall verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub text: String,
    pub passed: bool,
    /// JSON payload, already included in `text`.
    pub payload: Option<String>,
}

#[derive(Default)]
struct Builder {
    text: String,
    checks: Vec<(String, bool, String)>,
    payload: Option<String>,
}

impl Builder {
    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn check(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.checks.push((name.into(), ok, detail.into()));
    }

    fn payload(&mut self, json: String) {
        self.line("payload:");
        self.line(&json);
        self.payload = Some(json);
    }

    fn finish(mut self) -> Report {
        let passed = self.checks.iter().all(|c| c.1);
        if !self.checks.is_empty() {
            self.line("checks:");
            let checks = std::mem::take(&mut self.checks);
            for (name, ok, detail) in checks {
                let tag = if ok { "PASS" } else { "FAIL" };
                if detail.is_empty() {
                    self.line(format!("  {tag} {name}"));
                } else {
                    self.line(format!("  {tag} {name}: {detail}"));
                }
            }
        }
        self.line(format!("result: {}", if passed { "PASS" } else { "FAIL" }));
        Report {
            text: self.text,
            passed,
            payload: self.payload,
        }
    }
}

fn load_poset(path: &Path) -> anyhow::Result<Arc<Poset>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let p = Poset::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(Arc::new(p))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Json(e.to_string()))
        .with_context(|| format!("parsing {}", path.display()))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn resolve_u0(p: &Poset, u0: &Option<String>) -> anyhow::Result<Elem> {
    match u0 {
        Some(l) => Ok(p.index_of(l)?),
        None => Ok(0),
    }
}

/// Oracle cap from the environment, else the default.
pub fn oracle_cap() -> anyhow::Result<usize> {
    match std::env::var(ORACLE_CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{ORACLE_CAP_VAR}={v} is not a number")),
        Err(_) => Ok(DEFAULT_ORACLE_CAP),
    }
}

fn basis_name(p: &Poset, (x, y): (Elem, Elem)) -> String {
    if x == y {
        format!("e{}", p.label(x))
    } else {
        format!("e{}{}", p.label(x), p.label(y))
    }
}

fn pair_list(p: &Poset, v: &[(Elem, Elem)]) -> String {
    format!("{{{}}}", v.iter().map(|&e| p.fmt_pair(e)).collect::<Vec<_>>().join(", "))
}

fn summary(b: &mut Builder, p: &Poset) {
    let (min, max) = p.min_max();
    b.line(format!("|X| = {}", p.len()));
    b.line(format!("Min = {}", p.fmt_set(&min)));
    b.line(format!("Max = {}", p.fmt_set(&max)));
    b.line(format!("X2e = {}", pair_list(p, &extreme_pairs(p))));
    let classes = pair_classes(p);
    let shown: Vec<String> = classes.classes().iter().map(|c| pair_list(p, c)).collect();
    b.line(format!("pair classes = {}: {}", classes.len(), shown.join(" ")));
    let z: Vec<String> = p.min_max_pairs().into_iter().map(|e| basis_name(p, e)).collect();
    b.line(format!("Z([L,L]) basis = {{{}}}", z.join(", ")));
}

fn echo(b: &mut Builder, args: &[String]) {
    b.line(format!("$ lietp {}", args.join(" ")));
}

pub fn analyze(p: &Arc<Poset>, u0: Elem) -> Report {
    let mut b = Builder::default();
    summary(&mut b, p);
    let covers: Vec<String> = p
        .covers()
        .iter()
        .map(|&(x, y)| format!("{}<{}", p.label(x), p.label(y)))
        .collect();
    b.line(format!("covers = {}", covers.join(" ")));
    b.line(format!("bridges = {}", pair_list(p, &blocks_and_bridges(p).bridges)));
    match enumerate_cycles(p, DEFAULT_CYCLE_CAP) {
        Ok(c) => {
            b.line(format!("cycles = {}", c.len()));
            let ext = extreme_pairs_by_cycles(p, DEFAULT_CYCLE_CAP).expect("under cap");
            b.check("X2e agrees with cycle enumeration", ext == extreme_pairs(p), "");
            let cls = pair_classes_by_cycles(p, DEFAULT_CYCLE_CAP).expect("under cap");
            b.check("pair classes agree with cycle enumeration", cls == pair_classes(p), "");
        }
        Err(_) => b.line(format!("cycles > {DEFAULT_CYCLE_CAP}")),
    }
    b.line(format!("u0 = {}", p.label(u0)));
    for s in extreme_sides(p, u0) {
        b.line(format!(
            "  {} sgn = {:+} V = {}",
            p.fmt_pair(s.pair),
            s.sign,
            p.fmt_set(&s.vset)
        ));
    }
    let classes = pair_classes(p).len();
    let z = p.min_max_pairs().len();
    b.line(format!(
        "predicted dim = {} + {} + {} = {}",
        p.len(),
        classes,
        z,
        lietp_core::predicted_dimension(p)
    ));
    b.finish()
}

pub fn halfder(p: &Arc<Poset>, oracle: bool, cap: usize) -> anyhow::Result<Report> {
    let mut b = Builder::default();
    summary(&mut b, p);
    let basis = lietp_core::structural_basis(p, 0)?;
    b.line(format!("structural basis ({} generators, u0 = {}):", basis.len(), p.label(0)));
    let classes = pair_classes(p);
    for (g, _) in &basis {
        let name = match g {
            Generator::Inner(e) => format!("ad {}", basis_name(p, *e)),
            Generator::Sigma(k) => format!(
                "phi_sigma on class {} {}",
                k,
                pair_list(p, &classes.classes()[*k])
            ),
            Generator::Kappa(x) => format!("phi_kappa at {}", p.label(*x)),
        };
        b.line(format!("  {name}"));
    }
    let ops: Vec<_> = basis.iter().map(|(_, op)| op.clone()).collect();
    let rank = operator_rank(&ops);
    let predicted = lietp_core::predicted_dimension(p);
    b.line(format!("structural dim = {rank}"));
    b.check(
        "generators are ½-derivations",
        ops.iter().all(|o| o.is_half_derivation()),
        "",
    );
    b.check("generators independent", rank == ops.len(), format!("rank {rank}"));
    b.check("structural dim matches predicted", rank == predicted, format!("predicted {predicted}"));
    if oracle {
        let d = lietp_core::half_derivation_dimension(p, cap)?;
        let verdict = if d == rank { "EQUAL" } else { "DIFFERENT" };
        b.line(format!("oracle dim = {d}"));
        b.line(format!("verdict = {verdict}"));
        b.check("oracle dim equals structural dim", d == rank, format!("{rank} vs {d}"));
    }
    Ok(b.finish())
}

pub fn decompose(p: &Arc<Poset>, json: &OperatorJson, u0: Elem) -> anyhow::Result<Report> {
    let mut b = Builder::default();
    summary(&mut b, p);
    let op = lietp_core::LinearOperator::from_json(p, json)?;
    let d = lietp_core::decompose(&op, u0)?;
    b.line(format!("u0 = {}", p.label(u0)));
    b.line(format!("c = {}", d.c.element().display()));
    let cls: Vec<String> = d
        .sigma
        .classes()
        .representatives()
        .into_iter()
        .zip(d.sigma.class_values())
        .map(|(e, v)| format!("{}:{}", p.fmt_pair(e), fmt_q(v)))
        .collect();
    b.line(format!("sigma by class = {}", cls.join(" ")));
    let kap: Vec<String> = d.kappa.values.iter().map(fmt_q).collect();
    b.line(format!("kappa = ({})", kap.join(", ")));
    b.payload(to_json(&d.report()));
    b.check("exact reconstruction", d.reconstruct() == op, "");
    Ok(b.finish())
}

fn verify_lines(b: &mut Builder, p: &Poset, prod: &TPProduct) -> bool {
    let r = lietp_core::verify_tp(prod);
    if r.sampled {
        b.line("verification sampled basis triples");
    }
    let detail = |axiom| match &r.witness {
        Some(w) if w.axiom == axiom => {
            let n = |i: usize| basis_name(p, p.pairs()[i]);
            format!("witness ({}, {}, {})", n(w.triple.0), n(w.triple.1), n(w.triple.2))
        }
        _ => String::new(),
    };
    use lietp_core::tpstruct::Axiom;
    b.check("commutative", r.commutative, "");
    b.check("associative", r.associative, detail(Axiom::Associativity));
    b.check("transposed Leibniz", r.transposed_leibniz, detail(Axiom::TransposedLeibniz));
    b.check(
        "left multiplications are ½-derivations",
        r.half_derivation_agreement,
        detail(Axiom::HalfDerivationAgreement),
    );
    r.passed()
}

pub fn tp_build(p: &Arc<Poset>, json: &ParamsJson, u0: Option<Elem>) -> anyhow::Result<Report> {
    let mut b = Builder::default();
    summary(&mut b, p);
    let mut json = json.clone();
    if let Some(u) = u0 {
        json.u0 = Some(p.label(u).to_string());
    }
    let d = TPDecomposition::from_json(p, &json, 0)?;
    lietp_core::poisson_type(p, &d.mu)?;
    b.line(format!("u0 = {}", p.label(d.u0)));
    let prod = d.reconstruct();
    table_lines(&mut b, p, &prod);
    b.payload(to_json(&prod.to_json()));
    verify_lines(&mut b, p, &prod);
    Ok(b.finish())
}

fn table_lines(b: &mut Builder, p: &Poset, prod: &TPProduct) {
    b.line("nonzero products:");
    for ((i, j), v) in prod.entries() {
        b.line(format!(
            "  {}.{} = {}",
            basis_name(p, p.pairs()[i]),
            basis_name(p, p.pairs()[j]),
            v.display()
        ));
    }
}

pub fn tp_verify(p: &Arc<Poset>, json: &TableJson) -> anyhow::Result<Report> {
    let mut b = Builder::default();
    summary(&mut b, p);
    let prod = TPProduct::from_json(p, json)?;
    verify_lines(&mut b, p, &prod);
    Ok(b.finish())
}

pub fn tp_decompose(p: &Arc<Poset>, json: &TableJson, u0: Elem) -> anyhow::Result<Report> {
    let mut b = Builder::default();
    summary(&mut b, p);
    let prod = TPProduct::from_json(p, json)?;
    let d = lietp_core::decompose_tp(&prod, u0)?;
    b.line(format!("u0 = {}", p.label(u0)));
    b.payload(to_json(&d.to_json()));
    b.check("exact reconstruction", d.reconstruct() == prod, "");
    Ok(b.finish())
}

pub fn tp_normalize(p: &Arc<Poset>, json: &TableJson, u0: Elem) -> anyhow::Result<Report> {
    let mut b = Builder::default();
    summary(&mut b, p);
    let prod = TPProduct::from_json(p, json)?;
    let d = lietp_core::decompose_tp(&prod, u0)?;
    let (n, phi) = lietp_core::normalize_nu(&d);
    b.line(format!("u0 = {}", p.label(u0)));
    if phi.is_identity() {
        b.line("rescaling = identity");
    } else {
        b.line("rescaling:");
        for pv in phi.describe() {
            b.line(format!("  e{}{} -> {} e{}{}", pv.x, pv.y, pv.value, pv.x, pv.y));
        }
    }
    b.payload(to_json(&n.to_json()));
    b.check(
        "nu in {0, 1}",
        n.nu.values().iter().all(|(_, v)| is_zero_or_one(v)),
        "",
    );
    b.check("mu and lambda unchanged", n.mu == d.mu && n.lambda == d.lambda, "");
    let moved = phi.transport(&prod);
    b.check("transported product is the normalized one", moved == n.reconstruct(), "");
    verify_lines(&mut b, p, &moved);
    Ok(b.finish())
}

pub fn examples() -> anyhow::Result<Report> {
    let mut b = Builder::default();
    for r in golden::run_all()? {
        b.line(format!("{} {}", if r.passed() { "PASS" } else { "FAIL" }, r.name));
        for c in &r.checks {
            let tag = if c.passed { "ok  " } else { "FAIL" };
            if c.detail.is_empty() {
                b.line(format!("  {tag} {}", c.name));
            } else {
                b.line(format!("  {tag} {}: {}", c.name, c.detail));
            }
        }
        b.check(r.name.clone(), r.passed(), "");
    }
    Ok(b.finish())
}

/// Runs one command. `args` is echoed at the top of the report.
pub fn run(cli: &Cli, args: &[String]) -> anyhow::Result<Report> {
    let mut report = match &cli.command {
        Command::Analyze { file, u0 } => {
            let p = load_poset(file)?;
            let u = resolve_u0(&p, u0)?;
            analyze(&p, u)
        }
        Command::Halfder { file, oracle } => {
            let p = load_poset(file)?;
            halfder(&p, *oracle, oracle_cap()?)?
        }
        Command::Decompose { file, operator, u0 } => {
            let p = load_poset(file)?;
            let u = resolve_u0(&p, u0)?;
            decompose(&p, &load_json(operator)?, u)?
        }
        Command::Tp { action } => {
            let (TpAction::Build(a) | TpAction::Verify(a) | TpAction::Decompose(a) | TpAction::Normalize(a)) = action;
            let p = load_poset(&a.file)?;
            let r = match action {
                TpAction::Build(_) => {
                    let u = match &a.u0 {
                        Some(_) => Some(resolve_u0(&p, &a.u0)?),
                        None => None,
                    };
                    tp_build(&p, &load_json(&a.data)?, u)?
                }
                TpAction::Verify(_) => tp_verify(&p, &load_json(&a.data)?)?,
                TpAction::Decompose(_) => tp_decompose(&p, &load_json(&a.data)?, resolve_u0(&p, &a.u0)?)?,
                TpAction::Normalize(_) => tp_normalize(&p, &load_json(&a.data)?, resolve_u0(&p, &a.u0)?)?,
            };
            if let (Some(out), Some(json)) = (&a.output, &r.payload) {
                std::fs::write(out, format!("{json}\n")).with_context(|| format!("writing {}", out.display()))?;
            }
            r
        }
        Command::Examples => examples()?,
    };
    let mut b = Builder::default();
    echo(&mut b, args);
    let mut text = b.text;
    text.push_str(&report.text);
    report.text = text;
    Ok(report)
}

/// The error and its causes on one line, for stderr.
pub fn describe_error(e: &anyhow::Error) -> String {
    let mut s = format!("error: {e}");
    for cause in e.chain().skip(1) {
        let _ = write!(s, ": {cause}");
    }
    s
}
