//! The `copath` command-line front end.
//!
//! Exit codes: 0 when the property holds or the object was constructed, 1
//! when it is violated (a witness is printed), 2 on any error.

pub mod files;
pub mod syntax;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use crate::behaviour::{
    behaviour_at_depth, finality_witness, minimize, monoid_from_presentation, net_object, relative_final_moore,
    render_net_word, terminal_sequence, NetSymbol, SingularSystem, TestOutcome,
};
use crate::coalgebra::Coalgebra;
use crate::coequations::coequation_counterexample;
use crate::constraints::{builtin, Constraint, ConstraintSystem, Witness};
use crate::error::{Error, Result};
use crate::functor::{Budget, Carrier, FunctorExpr};
use crate::generate::{all_moore, random_moore, rng, DEFAULT_SEED};
use crate::linear::{parse_rational, render_rational};
use crate::modal::{frame_valid, implication_to_constraint, natform_to_constraint, Frame, Mode};
use crate::moore::Moore;
use files::{
    coalgebra_to_json, constraints_from_json, presentation_from_json, read_coalgebra, read_json, weighted_from_json,
};
use syntax::{parse_formula, parse_functor};

#[derive(Debug, Parser)]
#[command(name = "copath", version, about = "Coalgebras with equational path constraints")]
pub struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized test generation.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads for parallel enumeration.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    /// Compare both sides along the unfolding.
    Direct,
    /// Membership in the enumerated subfunctor.
    Subfunctor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Iff,
    Implies,
}

#[derive(Debug, Args)]
pub struct ConstraintArgs {
    /// Name of a built-in constraint.
    #[arg(long, conflicts_with = "constraints")]
    pub builtin: Option<String>,
    /// Comma-separated parameters of the built-in.
    #[arg(long, value_delimiter = ',', requires = "builtin")]
    pub params: Vec<String>,
    /// Constraint file.
    #[arg(long)]
    pub constraints: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MonoidArgs {
    /// Presentation file.
    #[arg(long)]
    pub presentation: PathBuf,
    /// Comma-separated output names.
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    pub outputs: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a coalgebra against constraints.
    Check {
        coalgebra: PathBuf,
        #[command(flatten)]
        constraint: ConstraintArgs,
        #[arg(long, value_enum, default_value_t = Route::Direct)]
        route: Route,
    },
    /// Partition refinement and the minimal quotient.
    Minimize {
        coalgebra: PathBuf,
        /// Write the quotient here.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Depth-k behaviour of every state in the terminal sequence.
    Behaviour {
        coalgebra: PathBuf,
        #[arg(long)]
        depth: usize,
    },
    /// Sizes of F^k 1 and the connecting maps.
    TerminalSeq {
        #[arg(long)]
        functor: String,
        #[arg(long)]
        depth: usize,
    },
    /// An object of the terminal net, e.g. `--word "E0 F"`.
    NetApprox {
        #[arg(long)]
        functor: String,
        #[command(flatten)]
        constraint: ConstraintArgs,
        #[arg(long, default_value = "")]
        word: String,
        /// Print the elements.
        #[arg(long)]
        list: bool,
    },
    /// Build the monoid of a presentation and the automaton B^M.
    MonoidFinal {
        #[command(flatten)]
        monoid: MonoidArgs,
        /// Write the automaton here.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Check finality of B^M against test automata.
    FinalityCheck {
        #[command(flatten)]
        monoid: MonoidArgs,
        /// Test automata files.
        tests: Vec<PathBuf>,
        /// Also test every automaton with at most this many states.
        #[arg(long)]
        exhaustive: Option<usize>,
        /// Also test this many seeded random automata.
        #[arg(long)]
        random: Option<usize>,
        /// State count of the random automata.
        #[arg(long, default_value_t = 5)]
        states: usize,
    },
    /// Check the two-colour coequation of a word system.
    CoequationCheck {
        coalgebra: PathBuf,
        /// Word system in the presentation format.
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        depth: usize,
    },
    /// Validity of a frame condition, by valuations and as a constraint.
    FrameCheck {
        frame: PathBuf,
        #[arg(long)]
        phi: String,
        #[arg(long)]
        psi: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Iff)]
        mode: ModeArg,
    },
    /// Word equations and the heat equation on a weighted automaton.
    LinearCheck {
        automaton: PathBuf,
        #[arg(long, requires = "equals", conflicts_with = "heat")]
        word: Option<String>,
        #[arg(long)]
        equals: Option<String>,
        /// Diffusion constant `c` in `t = c(xx + yy)`.
        #[arg(long)]
        heat: Option<String>,
    },
    /// Graphviz rendering of a coalgebra.
    ExportDot {
        coalgebra: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

/// What a command found.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub holds: bool,
    pub text: String,
    pub json: Json,
}

impl Report {
    fn new(holds: bool, text: String, json: Json) -> Self {
        Report { holds, text, json }
    }

    pub fn exit_code(&self) -> i32 {
        if self.holds {
            0
        } else {
            1
        }
    }
}

fn status(holds: bool, yes: &str) -> &str {
    if holds {
        yes
    } else {
        "violated"
    }
}

fn load_constraints(args: &ConstraintArgs) -> Result<ConstraintSystem> {
    match (&args.builtin, &args.constraints) {
        (Some(name), _) => Ok(ConstraintSystem::new(vec![builtin(name, &args.params)?])),
        (None, Some(path)) => constraints_from_json(&read_json(path)?),
        (None, None) => Err(Error::Invalid("give --builtin or --constraints".into())),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn check(c: &Coalgebra, sys: &ConstraintSystem, route: Route, budget: &Budget) -> Result<Report> {
    if route == Route::Subfunctor {
        for (i, k) in sys.constraints.iter().enumerate() {
            if !k.satisfies_via_subfunctor(c, budget)? {
                let text = format!("violated: constraint {i} (outside the subfunctor)");
                return Ok(Report::new(
                    false,
                    text,
                    json!({ "status": "violated", "constraint": i }),
                ));
            }
        }
        return Ok(Report::new(true, "holds".into(), json!({ "status": "holds" })));
    }
    let Some((i, w)) = sys.check(c, budget)? else {
        return Ok(Report::new(true, "holds".into(), json!({ "status": "holds" })));
    };
    let state = c.state_name(w.state()).to_string();
    let mut text = format!("violated: constraint {i} at state {state}");
    let mut out = json!({ "status": "violated", "constraint": i, "state": state });
    match (&sys.constraints[i], &w) {
        (Constraint::Equational(e), Witness::Equational { left, right, .. }) => {
            let h = e.typecheck(c.functor())?.target().clone();
            let (l, r) = (h.render(c.carrier(), left), h.render(c.carrier(), right));
            text.push_str(&format!("\n  left:  {l}\n  right: {r}"));
            out["left"] = json!(l);
            out["right"] = json!(r);
        }
        (Constraint::Predicate(p), Witness::Predicate { value, .. }) => {
            let v = p.shape.resolve(c.functor()).render(c.carrier(), value);
            text.push_str(&format!("\n  value: {v}"));
            out["value"] = json!(v);
        }
        _ => {}
    }
    Ok(Report::new(false, text, out))
}

fn parse_net_word(s: &str) -> Result<Vec<NetSymbol>> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            'F' => out.push(NetSymbol::F),
            'E' => {
                let mut digits = String::new();
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    digits.push(*d);
                    chars.next();
                }
                out.push(NetSymbol::E(if digits.is_empty() {
                    0
                } else {
                    digits.parse().expect("digits")
                }));
            }
            c if c.is_whitespace() || c == '•' => {}
            other => {
                return Err(Error::Invalid(format!(
                    "unexpected {other:?} in net word; use F and E<i>"
                )))
            }
        }
    }
    Ok(out)
}

/// DOT rendering. Moore automata get `name / output` node labels and
/// letter-labelled edges; other functors get an edge to every state in
/// the structure, labelled by letter when the functor is `Pow(A × Id)`.
pub fn to_dot(c: &Coalgebra) -> String {
    let q = |s: &str| format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""));
    let mut out = String::from("digraph coalgebra {\n  rankdir=LR;\n");
    let moore = Moore::view(c).ok();
    for x in 0..c.len() {
        let label = match &moore {
            Some(m) => format!("{} / {}", c.state_name(x), m.outputs.name(m.output[x])),
            None => c.state_name(x).to_string(),
        };
        out.push_str(&format!("  {} [label={}];\n", q(c.state_name(x)), q(&label)));
    }
    let mut edges: Vec<(usize, usize, Option<String>)> = Vec::new();
    if let Some(m) = &moore {
        for x in 0..m.len() {
            for (a, &y) in m.next[x].iter().enumerate() {
                edges.push((x, y, Some(m.alphabet.name(a).to_string())));
            }
        }
    } else {
        let lts_letters = match c.functor() {
            FunctorExpr::Pow(inner) => match inner.as_ref() {
                FunctorExpr::Prod(fs) if fs.len() == 2 && fs[1] == FunctorExpr::Identity => match &fs[0] {
                    FunctorExpr::Const(a) => Some(a.clone()),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        };
        for x in 0..c.len() {
            match (&lts_letters, c.beta(x)) {
                (Some(a), crate::functor::Value::Set(pairs)) => {
                    for p in pairs {
                        if let crate::functor::Value::Tuple(ps) = p {
                            if let [crate::functor::Value::Const(l), crate::functor::Value::Elem(y)] = ps.as_slice() {
                                edges.push((x, *y, Some(a.name(*l).to_string())));
                            }
                        }
                    }
                }
                _ => {
                    for leaf in c.functor().holes(c.beta(x)) {
                        if let crate::functor::Value::Elem(y) = leaf {
                            edges.push((x, *y, None));
                        }
                    }
                }
            }
        }
    }
    for (x, y, label) in edges {
        let (sx, sy) = (q(c.state_name(x)), q(c.state_name(y)));
        match label {
            Some(l) => out.push_str(&format!("  {sx} -> {sy} [label={}];\n", q(&l))),
            None => out.push_str(&format!("  {sx} -> {sy};\n")),
        }
    }
    out.push_str("}\n");
    out
}

fn test_automata(
    alphabet: &Carrier,
    outputs: &Carrier,
    files: &[PathBuf],
    exhaustive: Option<usize>,
    random: Option<usize>,
    states: usize,
    seed: u64,
) -> Result<Vec<Coalgebra>> {
    let mut tests = files.iter().map(|p| read_coalgebra(p)).collect::<Result<Vec<_>>>()?;
    for n in 1..=exhaustive.unwrap_or(0) {
        tests.extend(all_moore(n, outputs, alphabet).iter().map(Moore::to_coalgebra));
    }
    let mut r = rng(seed);
    for _ in 0..random.unwrap_or(0) {
        tests.push(random_moore(&mut r, states.max(1), outputs, alphabet).to_coalgebra());
    }
    Ok(tests)
}

pub fn execute(cli: &Cli, budget: &Budget) -> Result<Report> {
    match &cli.command {
        Command::Check {
            coalgebra,
            constraint,
            route,
        } => {
            let c = read_coalgebra(coalgebra)?;
            check(&c, &load_constraints(constraint)?, *route, budget)
        }
        Command::Minimize { coalgebra, output } => {
            let c = read_coalgebra(coalgebra)?;
            let min = minimize(&c)?;
            let blocks: Vec<Vec<&str>> = min
                .partition
                .blocks()
                .iter()
                .map(|b| b.iter().map(|&x| c.state_name(x)).collect())
                .collect();
            let quotient = coalgebra_to_json(&min.quotient);
            if let Some(path) = output {
                write_file(path, &serde_json::to_string_pretty(&quotient).expect("serializable"))?;
            }
            let mut text = format!("{} states, {} classes\n", c.len(), blocks.len());
            for b in &blocks {
                text.push_str(&format!("{{{}}}\n", b.join(", ")));
            }
            let json = json!({ "status": "constructed", "blocks": blocks, "quotient": quotient });
            Ok(Report::new(true, text.trim_end().to_string(), json))
        }
        Command::Behaviour { coalgebra, depth } => {
            let c = read_coalgebra(coalgebra)?;
            let fk = c.functor().compose_power(*depth);
            let one = Carrier::terminal();
            let beh = behaviour_at_depth(&c, *depth, budget)?;
            let mut text = String::new();
            let mut map = serde_json::Map::new();
            for (x, v) in beh.iter().enumerate() {
                let r = fk.render(&one, v);
                text.push_str(&format!("{}: {r}\n", c.state_name(x)));
                map.insert(c.state_name(x).to_string(), json!(r));
            }
            let json = json!({ "status": "constructed", "depth": depth, "behaviour": map });
            Ok(Report::new(true, text.trim_end().to_string(), json))
        }
        Command::TerminalSeq { functor, depth } => {
            let f = parse_functor(functor)?;
            let seq = terminal_sequence(&f, *depth, budget)?;
            let sizes: Vec<usize> = (0..=*depth).map(|k| seq.level(k).len()).collect();
            let surjective: Vec<bool> = (0..*depth)
                .map(|k| {
                    let mut hit = vec![false; seq.level(k).len()];
                    seq.connecting(k).iter().for_each(|&i| hit[i] = true);
                    hit.into_iter().all(|h| h)
                })
                .collect();
            let mut text = String::new();
            for (k, s) in sizes.iter().enumerate() {
                text.push_str(&format!("|F^{k} 1| = {s}"));
                if k > 0 {
                    let onto = if surjective[k - 1] { "onto" } else { "not onto" };
                    text.push_str(&format!("   F^{}(!) {onto}", k - 1));
                }
                text.push('\n');
            }
            let json = json!({ "status": "constructed", "functor": f.to_string(), "sizes": sizes, "connecting_onto": surjective });
            Ok(Report::new(true, text.trim_end().to_string(), json))
        }
        Command::NetApprox {
            functor,
            constraint,
            word,
            list,
        } => {
            let f = parse_functor(functor)?;
            let sys = SingularSystem::new(&f, &load_constraints(constraint)?)?;
            let w = parse_net_word(word)?;
            let elements = net_object(&w, &sys, budget)?;
            let fn_ = w
                .iter()
                .map(|s| match s {
                    NetSymbol::F => 1,
                    NetSymbol::E(i) => sys.length(*i),
                })
                .sum();
            let carrier_expr = f.compose_power(fn_);
            let one = Carrier::terminal();
            let mut text = format!("|[{}] 1| = {}", render_net_word(&w), elements.len());
            let rendered: Vec<String> = elements.iter().map(|v| carrier_expr.render(&one, v)).collect();
            if *list {
                for r in &rendered {
                    text.push_str(&format!("\n  {r}"));
                }
            }
            let mut json = json!({ "status": "constructed", "word": render_net_word(&w), "size": elements.len() });
            if *list {
                json["elements"] = json!(rendered);
            }
            Ok(Report::new(true, text, json))
        }
        Command::MonoidFinal { monoid, output } => {
            let p = presentation_from_json(&read_json(&monoid.presentation)?)?;
            let m = monoid_from_presentation(&p)?;
            let outputs = Carrier::new(monoid.outputs.clone())?;
            let z = relative_final_moore(&outputs, &m, budget)?;
            let satisfies = p.constraint_system().satisfied_by(&z, budget)?;
            let simple = crate::behaviour::is_simple(&z)?;
            if let Some(path) = output {
                write_file(
                    path,
                    &serde_json::to_string_pretty(&coalgebra_to_json(&z)).expect("serializable"),
                )?;
            }
            let names: Vec<String> = (0..m.len()).map(|x| m.name(x)).collect();
            let table: Vec<Vec<String>> = (0..m.len())
                .map(|x| (0..m.len()).map(|y| m.name(m.mul(x, y))).collect())
                .collect();
            let mut text = format!("monoid of order {}: {}\n", m.len(), names.join(" "));
            for (x, row) in table.iter().enumerate() {
                text.push_str(&format!("  {} * _ = {}\n", names[x], row.join(" ")));
            }
            text.push_str(&format!(
                "automaton: {} states, satisfies relations: {satisfies}, simple: {simple}",
                z.len()
            ));
            let json = json!({
                "status": status(satisfies && simple, "constructed"),
                "elements": names,
                "table": table,
                "states": z.len(),
                "satisfies": satisfies,
                "simple": simple,
            });
            Ok(Report::new(satisfies && simple, text, json))
        }
        Command::FinalityCheck {
            monoid,
            tests,
            exhaustive,
            random,
            states,
        } => {
            let p = presentation_from_json(&read_json(&monoid.presentation)?)?;
            let m = monoid_from_presentation(&p)?;
            let outputs = Carrier::new(monoid.outputs.clone())?;
            let z = relative_final_moore(&outputs, &m, budget)?;
            let automata = test_automata(&p.alphabet, &outputs, tests, *exhaustive, *random, *states, cli.seed)?;
            let report = finality_witness(&z, &p.constraint_system(), &automata, Some((&p, &m)), budget)?;
            let skipped = report.outcomes.iter().filter(|o| **o == TestOutcome::Skipped).count();
            let text =
                format!(
                "automaton B^M with {} states\nsatisfies relations: {}\nsimple: {}\ntests: {} checked, {} skipped\n{}",
                z.len(),
                report.satisfies,
                report.simple,
                report.checked(),
                skipped,
                if report.passes() { "finality witness passes" } else { "finality witness FAILS" }
            );
            let failures: Vec<usize> = report
                .outcomes
                .iter()
                .enumerate()
                .filter(
                    |(_, o)| matches!(o, TestOutcome::Checked { exists, unique } if !*exists || *unique == Some(false)),
                )
                .map(|(i, _)| i)
                .collect();
            let json = json!({
                "status": status(report.passes(), "holds"),
                "states": z.len(),
                "satisfies": report.satisfies,
                "simple": report.simple,
                "checked": report.checked(),
                "skipped": skipped,
                "failed_tests": failures,
            });
            Ok(Report::new(report.passes(), text, json))
        }
        Command::CoequationCheck {
            coalgebra,
            system,
            depth,
        } => {
            let c = read_coalgebra(coalgebra)?;
            let p = presentation_from_json(&read_json(system)?)?;
            let m = Moore::view(&c)?;
            if m.alphabet != p.alphabet {
                return Err(Error::Validation(
                    "system and automaton have different alphabets".into(),
                ));
            }
            match coequation_counterexample(&m, &p.relations, *depth, budget)? {
                None => Ok(Report::new(true, "holds".into(), json!({ "status": "holds" }))),
                Some((k, x)) => {
                    let colouring: serde_json::Map<String, Json> = (0..c.len())
                        .map(|y| (c.state_name(y).to_string(), json!(k.colour(y))))
                        .collect();
                    let ones: Vec<&str> = (0..c.len())
                        .filter(|&y| k.colour(y) == 1)
                        .map(|y| c.state_name(y))
                        .collect();
                    let text = format!(
                        "violated at state {} under the colouring with colour 1 on {{{}}}",
                        c.state_name(x),
                        ones.join(", ")
                    );
                    let json = json!({ "status": "violated", "state": c.state_name(x), "colouring": colouring });
                    Ok(Report::new(false, text, json))
                }
            }
        }
        Command::FrameCheck { frame, phi, psi, mode } => {
            let c = read_coalgebra(frame)?;
            let fr = Frame::from_coalgebra(&c)?;
            let (phi, psi) = (parse_formula(phi)?, parse_formula(psi)?);
            let (m, k) = match mode {
                ModeArg::Iff => (Mode::Iff, natform_to_constraint(&phi, &psi)),
                ModeArg::Implies => (Mode::Implies, implication_to_constraint(&phi, &psi)),
            };
            let valid = frame_valid(&fr, &phi, &psi, m, budget)?;
            let constraint = k.typecheck(c.functor())?.satisfies(&c, budget)?.holds();
            if valid != constraint {
                return Err(Error::Invalid(format!(
                    "valuation check ({valid}) and constraint check ({constraint}) disagree"
                )));
            }
            let op = if m == Mode::Iff { "<->" } else { "->" };
            let text = format!("{phi} {op} {psi}: {}", if valid { "valid" } else { "not valid" });
            let json = json!({ "status": status(valid, "holds"), "valid": valid, "constraint": constraint });
            Ok(Report::new(valid, text, json))
        }
        Command::LinearCheck {
            automaton,
            word,
            equals,
            heat,
        } => {
            let w = weighted_from_json(&read_json(automaton)?)?;
            match (word, equals, heat) {
                (Some(a), Some(b), None) => {
                    let holds = w.check_word_equation_str(a, b)?;
                    let text = format!("M_{a} {} M_{b}", if holds { "=" } else { "!=" });
                    Ok(Report::new(holds, text, json!({ "status": status(holds, "holds") })))
                }
                (None, None, Some(c)) => {
                    let c = parse_rational(c)?;
                    let holds = w.check_heat(&c)?;
                    let text = format!(
                        "M_t {} {}(M_x^2 + M_y^2)",
                        if holds { "=" } else { "!=" },
                        render_rational(&c)
                    );
                    Ok(Report::new(holds, text, json!({ "status": status(holds, "holds") })))
                }
                _ => Err(Error::Invalid("give --word and --equals, or --heat".into())),
            }
        }
        Command::ExportDot { coalgebra, output } => {
            let c = read_coalgebra(coalgebra)?;
            let dot = to_dot(&c);
            if let Some(path) = output {
                write_file(path, &dot)?;
            }
            let json = json!({ "status": "constructed", "dot": dot });
            Ok(Report::new(true, dot.trim_end().to_string(), json))
        }
    }
}

/// Parses arguments, runs and prints. Returns the exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    let budget = Budget::from_env();
    let result = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build() {
        Ok(pool) => pool.install(|| execute(&cli, &budget)),
        Err(e) => Err(Error::Invalid(format!("cannot start {} worker threads: {e}", cli.jobs))),
    };
    match result {
        Ok(report) => {
            let _ = if cli.json {
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&report.json).expect("serializable")
                )
            } else {
                writeln!(out, "{}", report.text)
            };
            report.exit_code()
        }
        Err(e) => {
            let _ = if cli.json {
                writeln!(out, "{}", json!({ "status": "error", "error": e.to_string() }))
            } else {
                writeln!(err, "error: {e}")
            };
            2
        }
    }
}
