use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use qdp::acceptance::{run_suite, validated_seed, SuiteConfig};
use qdp::classical::{
    commutative_mod_h_report, dual_lie_bialgebra, extract_lie_bialgebra, extract_poisson_structure,
    lie_bialgebra_equal, validate_lie_bialgebra,
};
use qdp::drinfeld::{prime_membership, prime_presentation, roundtrip_check, vee_presentation, Direction};
use qdp::examples::{builtin_with, ExampleBundle, NAMES};
use qdp::expr::parse_element;
use qdp::hopf::{Model, Presentation};
use qdp::manifest::{dump_presentation, load_seed, read_presentation};
use qdp::pairing::{orthogonal_membership, pair, pairing_axioms_check};
use qdp::report::{CheckEntry, HopfReport};
use qdp::{Error, Result};

use crate::{render, Cli, Command, Dir, Format, Via};

/// What the process prints and returns.
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

/// A finished command: JSON fields beyond the envelope, and a text form.
struct Done {
    pass: bool,
    /// Overrides the exit code derived from `pass`.
    code: Option<u8>,
    h_order: i64,
    degree_cap: u32,
    fields: Map<String, Value>,
    text: String,
    warnings: Vec<String>,
}

impl Done {
    fn new(pass: bool, h_order: i64, degree_cap: u32) -> Self {
        Done {
            pass,
            code: None,
            h_order,
            degree_cap,
            fields: Map::new(),
            text: String::new(),
            warnings: Vec::new(),
        }
    }

    fn of(p: &Presentation, pass: bool) -> Self {
        Done::new(pass, p.h_order(), p.degree_cap())
    }

    fn field(mut self, k: &str, v: impl Serialize) -> Self {
        self.fields.insert(k.into(), serde_json::to_value(v).expect("report values serialize"));
        self
    }

    fn text(mut self, t: impl Into<String>) -> Self {
        self.text.push_str(&t.into());
        self
    }
}

/// 1 for mathematical findings, 2 for bad input, 3 for internal trouble.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotDivisible { .. }
        | Error::NegativeValuation(_)
        | Error::NotLieType(_)
        | Error::CobracketNotInWedge(_)
        | Error::NotCommutativeModH(_)
        | Error::NotAHopfMap(_)
        | Error::InvalidPairing(_) => 1,
        Error::FuelExceeded { .. } => 3,
        _ => 2,
    }
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::NotDivisible { .. } => "NotDivisible",
        Error::NotTopologicallyNilpotent { .. } => "NotTopologicallyNilpotent",
        Error::MixedPresentations { .. } => "MixedPresentations",
        Error::FuelExceeded { .. } => "FuelExceeded",
        Error::NegativeValuation(_) => "NegativeValuation",
        Error::NotLieType(_) => "NotLieType",
        Error::CobracketNotInWedge(_) => "CobracketNotInWedge",
        Error::NotCommutativeModH(_) => "NotCommutativeModH",
        Error::DimensionMismatch { .. } => "DimensionMismatch",
        Error::SingularBasisMap => "SingularBasisMap",
        Error::NotAHopfMap(_) => "NotAHopfMap",
        Error::UnknownExample(_) => "UnknownExample",
        Error::UnknownGenerator(_) => "UnknownGenerator",
        Error::Parse { .. } => "SyntaxError",
        Error::Inadmissible(_) => "Inadmissible",
        Error::WrongModel(_) => "WrongModel",
        Error::InvalidPairing(_) => "InvalidPairing",
        Error::Manifest(_) => "ManifestError",
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::List => "list",
        Command::Show { .. } => "show",
        Command::CheckHopf { .. } => "check-hopf",
        Command::Diamond { .. } => "diamond",
        Command::Prime { .. } => "prime",
        Command::Vee { .. } => "vee",
        Command::Member { .. } => "member",
        Command::Limit { .. } => "limit",
        Command::DualCheck { .. } => "dual-check",
        Command::Roundtrip { .. } => "roundtrip",
        Command::Pair { .. } => "pair",
        Command::Selftest { .. } => "selftest",
    }
}

pub fn dispatch(cli: &Cli) -> Output {
    let name = command_name(&cli.command);
    if let Command::Show { name: ex, manifest: true } = &cli.command {
        return match bundle(ex, cli) {
            Ok(b) => Output {
                stdout: dump_presentation(&b.quea),
                stderr: String::new(),
                code: 0,
            },
            Err(e) => failure(cli, name, &e),
        };
    }
    match run(cli) {
        Ok(done) => finish(cli, name, done),
        Err(e) => failure(cli, name, &e),
    }
}

fn finish(cli: &Cli, name: &str, done: Done) -> Output {
    let code = done.code.unwrap_or(if done.pass { 0 } else { 1 });
    let stderr: String = done.warnings.iter().map(|w| format!("warning: {w}\n")).collect();
    let stdout = match cli.format {
        Format::Text => done.text,
        Format::Json => {
            let mut obj = Map::new();
            obj.insert("command".into(), json!(name));
            obj.insert("pass".into(), json!(done.pass));
            obj.insert("h_order".into(), json!(done.h_order));
            obj.insert("degree_cap".into(), json!(done.degree_cap));
            obj.insert("warnings".into(), json!(done.warnings));
            obj.extend(done.fields);
            pretty(&Value::Object(obj))
        }
    };
    Output { stdout, stderr, code }
}

fn failure(cli: &Cli, name: &str, e: &Error) -> Output {
    let code = exit_code(e);
    let stdout = match cli.format {
        Format::Text => String::new(),
        Format::Json => pretty(&json!({
            "command": name,
            "pass": false,
            "h_order": cli.h_order,
            "degree_cap": cli.degree,
            "error": { "kind": kind(e), "message": e.to_string() },
            "exit_code": code,
        })),
    };
    Output {
        stdout,
        stderr: format!("error: {e}\n"),
        code,
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn bundle(name: &str, cli: &Cli) -> Result<ExampleBundle> {
    builtin_with(name, cli.h_order, cli.degree)
}

/// Built-in name, built-in name plus `'`, or manifest path.
fn target(arg: &str, cli: &Cli) -> Result<Presentation> {
    if NAMES.contains(&arg) {
        return Ok(bundle(arg, cli)?.quea);
    }
    if let Some(base) = arg.strip_suffix('\'') {
        if NAMES.contains(&base) {
            return prime_presentation(&bundle(base, cli)?.quea);
        }
    }
    let path = Path::new(arg);
    if path.exists() {
        return read_presentation(path);
    }
    if arg.contains(std::path::MAIN_SEPARATOR) || arg.ends_with(".json") {
        return Err(Error::Manifest(format!("{arg}: no such file")));
    }
    Err(Error::UnknownExample(arg.to_string()))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<Done> {
    match &cli.command {
        Command::List => {
            let mut text = String::new();
            for n in NAMES {
                text.push_str(n);
                text.push('\n');
            }
            Ok(Done::new(true, cli.h_order, cli.degree).field("examples", NAMES).text(text))
        }
        Command::Show { name, .. } => {
            let b = bundle(name, cli)?;
            let text = format!(
                "{}\nclassical limit:\n{}\nexpected dual:\n{}\n{}\n",
                render::presentation(&b.quea).trim_end(),
                indent(&b.lie.describe()),
                indent(&b.expected_dual.describe()),
                b.notes
            );
            let manifest: Value = serde_json::from_str(&dump_presentation(&b.quea)).expect("manifest is JSON");
            Ok(Done::of(&b.quea, true)
                .field("name", &b.name)
                .field("manifest", manifest)
                .field("lie", &b.lie)
                .field("expected_dual", &b.expected_dual)
                .field("has_pairing_seed", b.pairing_seed.is_some())
                .field("notes", &b.notes)
                .text(text))
        }
        Command::CheckHopf { target: t, bound } => {
            let p = target(t, cli)?;
            let rep = p.check_hopf_axioms(*bound)?;
            Ok(checked(&p, rep).field("degree_bound", bound))
        }
        Command::Diamond { target: t } => {
            let p = target(t, cli)?;
            let rep = p.check_diamond()?;
            Ok(checked(&p, rep))
        }
        Command::Prime { target: t, output } => {
            let p = target(t, cli)?;
            transform(&p, &prime_presentation(&p)?, output.as_deref())
        }
        Command::Vee { target: t, output } => {
            let p = target(t, cli)?;
            transform(&p, &vee_presentation(&p)?, output.as_deref())
        }
        Command::Member {
            target: t,
            element,
            n_max,
            via,
        } => member(cli, t, element, *n_max, *via),
        Command::Limit { target: t } => limit(&target(t, cli)?),
        Command::DualCheck { name } => dual_check(&bundle(name, cli)?),
        Command::Roundtrip { target: t, direction } => {
            let p = target(t, cli)?;
            let dir = match direction {
                Dir::PrimeVee => Direction::PrimeThenVee,
                Dir::VeePrime => Direction::VeeThenPrime,
            };
            let rep = roundtrip_check(&p, dir)?;
            Ok(checked(&p, rep).field("direction", format!("{dir:?}")))
        }
        Command::Pair {
            left,
            right,
            seed,
            left_elem,
            right_elem,
        } => {
            let l = target(left, cli)?;
            let r = target(right, cli)?;
            let text = std::fs::read_to_string(seed).map_err(|e| Error::Manifest(format!("{}: {e}", seed.display())))?;
            let mut s = load_seed(&text, &l, &r)?;
            let rep = pairing_axioms_check(&mut s, &l, &r, 2)?;
            let a = parse_element(left_elem, &l)?;
            let b = parse_element(right_elem, &r)?;
            let v = pair(&a, &b, &l, &r, &s)?;
            let mut done = Done::new(rep.passed(), l.h_order().min(r.h_order()), l.degree_cap().min(r.degree_cap()))
                .field("left", l.name())
                .field("right", r.name())
                .field("left_elem", l.show(&a))
                .field("right_elem", r.show(&b))
                .field("value", &v)
                .field("validated", s.is_validated())
                .field("report", &rep)
                .text(format!("<{}, {}> = {v}\n", l.show(&a), r.show(&b)));
            if !s.is_validated() {
                done = done.text(format!("seed is provisional: {}", render::report(&rep)));
            }
            Ok(done)
        }
        Command::Selftest { seed } => {
            let cfg = SuiteConfig {
                h_order: cli.h_order,
                degree_cap: cli.degree,
                seed: *seed,
            };
            let rep = run_suite(&cfg);
            let mut text = String::new();
            for c in &rep.criteria {
                text.push_str(&c.line());
                text.push('\n');
                for f in &c.failures {
                    text.push_str(&format!("    {f}\n"));
                }
            }
            let failed = rep.criteria.iter().filter(|c| !c.pass).count();
            text.push_str(&format!("{} of {} passed\n", rep.criteria.len() - failed, rep.criteria.len()));
            Ok(Done::new(rep.pass, cfg.h_order, cfg.degree_cap)
                .field("seed", seed)
                .field("criteria", &rep.criteria)
                .text(text))
        }
    }
}

fn indent(s: &str) -> String {
    s.lines().map(|l| format!("  {l}")).collect::<Vec<_>>().join("\n")
}

fn checked(p: &Presentation, rep: HopfReport) -> Done {
    Done::of(p, rep.passed())
        .field("target", p.name())
        .text(render::report(&rep))
        .field("report", rep)
}

fn transform(input: &Presentation, out: &Presentation, file: Option<&Path>) -> Result<Done> {
    let manifest = dump_presentation(out);
    if let Some(f) = file {
        write_file(f, &manifest)?;
    }
    let rep = out.check_diamond()?;
    let value: Value = serde_json::from_str(&manifest).expect("manifest is JSON");
    let mut text = render::presentation(out);
    text.push_str("diamond: ");
    text.push_str(&render::report(&rep));
    Ok(Done::of(out, rep.passed())
        .field("input", input.name())
        .field("output", out.name())
        .field("manifest", value)
        .field("report", rep)
        .text(text))
}

fn member(cli: &Cli, t: &str, src: &str, n_max: Option<usize>, via: Via) -> Result<Done> {
    let p = target(t, cli)?;
    let a = parse_element(src, &p)?;
    let mut warnings = Vec::new();
    if p.h_order() < p.degree_cap() as i64 {
        warnings.push(format!(
            "h-order {} is below the degree cap {}; high-degree witnesses may be unobservable",
            p.h_order(),
            p.degree_cap()
        ));
    }
    let delta = match via {
        Via::Delta | Via::Both => Some(prime_membership(&a, &p, n_max)?),
        Via::Pairing => None,
    };
    let orth = match via {
        Via::Pairing | Via::Both => {
            let b = if NAMES.contains(&t) {
                bundle(t, cli)?
            } else {
                return Err(Error::InvalidPairing(format!("{t} is not a built-in with a canonical seed")));
            };
            let q = prime_presentation(&b.quea)?;
            let (seed, rep) = validated_seed(&b, &q)?;
            if !rep.passed() {
                return Ok(Done::of(&p, false)
                    .field("target", p.name())
                    .field("seed_report", &rep)
                    .text(format!("canonical seed fails its axioms: {}", render::report(&rep))));
            }
            Some(orthogonal_membership(&a, &seed, &b.quea, &q, n_max)?)
        }
        Via::Delta => None,
    };
    let verdicts: Vec<bool> = delta.iter().chain(orth.iter()).map(|c| c.verdict.is_member()).collect();
    let agree = verdicts.windows(2).all(|w| w[0] == w[1]);
    let mut done = Done::of(&p, verdicts.iter().all(|&m| m))
        .field("target", p.name())
        .field("element", p.show(&a))
        .field("via", format!("{via:?}").to_lowercase());
    if let Some(c) = &delta {
        done = done.text(render::certificate("delta", c)).field("delta", c);
    }
    if let Some(c) = &orth {
        done = done.text(render::certificate("pairing", c)).field("pairing", c);
    }
    if via == Via::Both {
        done = done.field("agree", agree);
        if !agree {
            done.code = Some(3);
            done = done.text("routes disagree\n");
        }
    }
    done.warnings = warnings;
    Ok(done)
}

fn limit(p: &Presentation) -> Result<Done> {
    let (structure, mut rep) = match p.model() {
        Model::Poly => {
            let l = extract_lie_bialgebra(p)?;
            (l, HopfReport::default())
        }
        Model::Series => {
            let l = extract_poisson_structure(p)?;
            (l, commutative_mod_h_report(p))
        }
    };
    rep.extend(validate_lie_bialgebra(&structure));
    let kind = match p.model() {
        Model::Poly => "lie_bialgebra",
        Model::Series => "poisson_dual",
    };
    let text = format!("{kind}:\n{}\n{}", indent(&structure.describe()), render::report(&rep));
    Ok(Done::of(p, rep.passed())
        .field("target", p.name())
        .field("kind", kind)
        .field("structure", &structure)
        .field("report", &rep)
        .text(text))
}

fn dual_check(b: &ExampleBundle) -> Result<Done> {
    let q = prime_presentation(&b.quea)?;
    let mut rep = q.check_diamond()?.tagged("prime.");
    rep.extend(commutative_mod_h_report(&q).tagged("prime."));
    let lie = extract_lie_bialgebra(&b.quea)?;
    let dual = dual_lie_bialgebra(&lie);
    let poisson = extract_poisson_structure(&q)?;
    rep.extend(validate_lie_bialgebra(&poisson).tagged("poisson."));
    let cmp = |axiom: &str, x: &_, y: &_| -> Result<CheckEntry> {
        let eq = lie_bialgebra_equal(x, y, None)?;
        Ok(CheckEntry::from_bool(axiom, &b.name, eq, || "tables differ".into()))
    };
    rep.push(cmp("lie_matches_stored", &lie, &b.lie)?);
    rep.push(cmp("poisson_matches_dual", &poisson, &dual)?);
    rep.push(cmp("dual_matches_expected", &dual, &b.expected_dual)?);
    let text = format!(
        "lie(P):\n{}\ndual(lie(P)):\n{}\npoisson(P'):\n{}\n{}",
        indent(&lie.describe()),
        indent(&dual.describe()),
        indent(&poisson.describe()),
        render::report(&rep)
    );
    Ok(Done::of(&b.quea, rep.passed())
        .field("name", &b.name)
        .field("prime", q.name())
        .field(
            "tables",
            json!({
                "lie": lie,
                "dual": dual,
                "poisson": poisson,
                "expected_dual": b.expected_dual,
            }),
        )
        .field("report", &rep)
        .text(text))
}
