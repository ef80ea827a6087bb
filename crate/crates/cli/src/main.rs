//! `rwpair` command-line front end.
//!
//! Exit codes: 0 on success, 1 when a mathematical check fails, 2 on bad
//! input. A PAIR argument is either a catalog name or a JSON file holding
//! a Lie pair and its form: `{"dim", "sub_dim", "brackets", "omega"}`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{rngs::StdRng, SeedableRng};
use serde_json::{json, Value};

use rwpair::catalog;
use rwpair::ce::{self, form_to_json};
use rwpair::chord::{all_four_terms, enumerate_chord, ChordDiagram};
use rwpair::connections::{check_symplectic, Connection, SymplecticForm};
use rwpair::diagrams::{enumerate_trivalent, TrivalentDiagram};
use rwpair::liepair::{LiePair, ModuleRep};
use rwpair::weights::{ChordWeights, TrivalentWeights, WeightClass};

#[derive(Parser)]
#[command(name = "rwpair", version, about = "Exact weight systems from symplectic Lie pairs")]
struct Cli {
    /// Write the JSON result to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Seed for randomized connections.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Lie pair axioms and the symplectic form.
    Validate { pair: String },
    /// Build a connection on q extending the h-action.
    Connection {
        pair: String,
        #[arg(long)]
        torsion_free: bool,
        #[arg(long)]
        symplectic: bool,
    },
    /// Atiyah cocycle of a connection and whether its class vanishes.
    Atiyah {
        pair: String,
        #[arg(long)]
        connection: Option<PathBuf>,
    },
    /// Weight report for one trivalent diagram or all diagrams of order k.
    Weight {
        pair: String,
        #[arg(long, conflicts_with = "k", required_unless_present = "k")]
        diagram: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        connection: Option<PathBuf>,
    },
    /// Weight report for chord diagrams with coefficients in a module.
    Chord {
        pair: String,
        #[arg(long, conflicts_with = "k", required_unless_present = "k")]
        chords: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        /// Module JSON; defaults to q.
        #[arg(long)]
        module: Option<PathBuf>,
        /// Connection on the module; defaults to the one extending the action.
        #[arg(long)]
        connection: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        origin: usize,
    },
    /// Check a relation on every diagram of the given order.
    Check {
        pair: String,
        #[arg(long, value_enum)]
        relation: Relation,
        #[arg(long)]
        order: usize,
    },
    /// List the built-in pairs or emit one as a pair file.
    Examples {
        #[arg(long, conflicts_with = "emit", required_unless_present = "emit")]
        list: bool,
        #[arg(long)]
        emit: Option<String>,
    },
    /// Dimensions of H^d(h) with trivial coefficients.
    Cohomology {
        pair: String,
        #[arg(long)]
        degree: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Relation {
    As,
    Ihx,
    #[value(name = "4t")]
    FourT,
    #[value(name = "1t")]
    OneT,
}

/// Bad input; always exit code 2.
struct Failure(String);

impl From<rwpair::Error> for Failure {
    fn from(e: rwpair::Error) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<(Value, bool), Failure>;

struct PairInput {
    pair: LiePair,
    omega: Option<SymplecticForm>,
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_pair(arg: &str) -> Result<PairInput, Failure> {
    let path = Path::new(arg);
    if !path.exists() && catalog::names().contains(&arg) {
        let ex = catalog::get(arg)?;
        return Ok(PairInput { pair: ex.pair, omega: Some(ex.omega) });
    }
    if !path.exists() {
        return Err(Failure(format!("{arg}: no such file or catalog name ({})", catalog::names().join(", "))));
    }
    let v = read_json(path)?;
    let pair = LiePair::from_json(&v)?;
    let omega = match v.get("omega") {
        None => None,
        Some(_) => Some(SymplecticForm::from_json(&v, pair.dim_q())?),
    };
    Ok(PairInput { pair, omega })
}

fn require_omega(p: &PairInput) -> Result<&SymplecticForm, Failure> {
    p.omega.as_ref().ok_or_else(|| Failure("at /: missing field \"omega\"".into()))
}

/// Symplectic connection from the action, randomized on the complement if
/// a seed is given.
fn default_connection(p: &PairInput, seed: Option<u64>) -> Result<Connection, Failure> {
    let w = require_omega(p)?;
    p.pair.require_valid()?;
    let mut c = Connection::extend_action(&p.pair)?;
    if let Some(s) = seed {
        c = c.randomize_complement(&mut StdRng::seed_from_u64(s));
    }
    Ok(c.make_torsion_free()?.make_symplectic(w)?)
}

fn quotient_connection(p: &PairInput, file: Option<&Path>, seed: Option<u64>) -> Result<Connection, Failure> {
    match file {
        None => default_connection(p, seed),
        Some(f) => {
            let c = Connection::from_json(&read_json(f)?, &p.pair, None)?;
            let w = require_omega(p)?;
            if !c.is_symplectic(w)? || !c.is_torsion_free()? {
                eprintln!("warning: connection is not symplectic; the class is unchanged, the cocycle is not");
            }
            Ok(c)
        }
    }
}

fn pair_file(ex: &catalog::Example) -> Value {
    let mut v = ex.pair.to_json();
    v["omega"] = ex.omega.to_json()["omega"].clone();
    v["name"] = json!(ex.name);
    v["note"] = json!(ex.note);
    v
}

fn validate(pair: &str) -> Outcome {
    let p = load_pair(pair)?;
    let report = p.pair.validate();
    let mut ok = report.is_valid();
    let mut out = json!({"pair": report.to_json()});
    if let Some(w) = &p.omega {
        let s = check_symplectic(&p.pair, w.matrix())?;
        ok &= s.passes();
        out["symplectic"] = s.to_json();
    }
    Ok((out, ok))
}

fn connection(pair: &str, torsion_free: bool, symplectic: bool, seed: Option<u64>) -> Outcome {
    let p = load_pair(pair)?;
    p.pair.require_valid()?;
    let mut c = Connection::extend_action(&p.pair)?;
    if let Some(s) = seed {
        c = c.randomize_complement(&mut StdRng::seed_from_u64(s));
    }
    if torsion_free || symplectic {
        c = c.make_torsion_free()?;
    }
    if symplectic {
        c = c.make_symplectic(require_omega(&p)?)?;
    }
    Ok((c.to_json(), true))
}

fn atiyah(pair: &str, file: Option<&Path>, seed: Option<u64>) -> Outcome {
    let p = load_pair(pair)?;
    p.pair.require_valid()?;
    let c = match file {
        Some(f) => Connection::from_json(&read_json(f)?, &p.pair, None)?,
        None => {
            let c = Connection::extend_action(&p.pair)?;
            match seed {
                Some(s) => c.randomize_complement(&mut StdRng::seed_from_u64(s)),
                None => c,
            }
        }
    };
    let rep = c.atiyah_module()?;
    let r = c.atiyah_cocycle()?;
    let closed = ce::is_closed(&rep, &r)?;
    let vanishes = ce::is_coboundary(&rep, &r)?.is_some();
    let compatible = Connection::compatible(&p.pair)?;
    eprintln!("class vanishes: {vanishes}");
    let out = json!({
        "cocycle": form_to_json(&r),
        "closed": closed,
        "class_vanishes": vanishes,
        "compatible_connection": compatible.map(|c| c.to_json()),
    });
    Ok((out, closed))
}

fn report_ok(r: &Value) -> bool {
    r["relations"].as_object().is_some_and(|m| m.values().all(|v| v == &json!(true)))
}

fn weight(pair: &str, diagram: Option<&Path>, k: Option<usize>, file: Option<&Path>, seed: Option<u64>) -> Outcome {
    let p = load_pair(pair)?;
    let c = quotient_connection(&p, file, seed)?;
    let tw = TrivalentWeights::new(&c, require_omega(&p)?)?;
    let diagrams = match (diagram, k) {
        (Some(f), _) => vec![TrivalentDiagram::from_json(&read_json(f)?)?],
        (None, Some(k)) => enumerate_trivalent(k)?,
        (None, None) => return Err(Failure("one of --diagram or --k is required".into())),
    };
    let mut reports = Vec::new();
    for d in &diagrams {
        let mut r = tw.report(d)?;
        r["diagram"] = d.to_json();
        reports.push(r);
    }
    let ok = reports.iter().all(report_ok);
    let out = if diagram.is_some() { reports.pop().unwrap_or(Value::Null) } else { Value::Array(reports) };
    Ok((out, ok))
}

fn chord_weights(p: &PairInput, module: Option<&Path>, file: Option<&Path>, seed: Option<u64>) -> Result<ChordWeights, Failure> {
    let w = require_omega(p)?;
    let c = match module {
        None => quotient_connection(p, file, seed)?,
        Some(m) => {
            p.pair.require_valid()?;
            let e = ModuleRep::from_json(&read_json(m)?, &p.pair.h_algebra())?;
            match file {
                Some(f) => Connection::from_json(&read_json(f)?, &p.pair, Some(&e))?,
                None => Connection::extend_module_action(&p.pair, &e, false)?,
            }
        }
    };
    Ok(ChordWeights::new(&c, w)?)
}

#[allow(clippy::too_many_arguments)]
fn chord(
    pair: &str,
    chords: Option<&Path>,
    k: Option<usize>,
    module: Option<&Path>,
    file: Option<&Path>,
    origin: usize,
    seed: Option<u64>,
) -> Outcome {
    let p = load_pair(pair)?;
    let cw = chord_weights(&p, module, file, seed)?;
    let diagrams = match (chords, k) {
        (Some(f), _) => vec![ChordDiagram::from_json(&read_json(f)?)?],
        (None, Some(k)) => enumerate_chord(k)?,
        (None, None) => return Err(Failure("one of --chords or --k is required".into())),
    };
    let scalars = cw.scalars();
    let mut reports = Vec::new();
    for cd in &diagrams {
        let o = if cd.points() == 0 { 0 } else { origin % cd.points() };
        let class = cw.class(cd, o)?;
        let deframed = WeightClass::of(&scalars, cw.deframed(cd, o)?)?;
        let closed = ce::is_closed(&scalars, &class.cocycle)?;
        let mut relations = json!({"closed": closed});
        if cd.has_isolated_chord() {
            relations["1t"] = json!(deframed.is_zero());
        }
        reports.push(json!({
            "chords": cd.to_json(),
            "origin": o,
            "weight": class.to_json(),
            "deframed": deframed.to_json(),
            "relations": relations,
        }));
    }
    let ok = reports.iter().all(report_ok);
    let out = if chords.is_some() { reports.pop().unwrap_or(Value::Null) } else { Value::Array(reports) };
    Ok((out, ok))
}

fn check(pair: &str, relation: Relation, order: usize, seed: Option<u64>) -> Outcome {
    let p = load_pair(pair)?;
    let mut rows = Vec::new();
    match relation {
        Relation::As | Relation::Ihx => {
            let c = default_connection(&p, seed)?;
            let tw = TrivalentWeights::new(&c, require_omega(&p)?)?;
            for (n, d) in enumerate_trivalent(order)?.iter().enumerate() {
                if let Relation::As = relation {
                    for v in 0..d.num_vertices() {
                        rows.push(json!({"diagram": n, "vertex": v, "pass": tw.check_as(d, v)?}));
                    }
                } else {
                    for e in (0..d.edges().len()).filter(|&e| !d.is_loop(e)) {
                        rows.push(json!({"diagram": n, "edge": e, "pass": tw.check_ihx(d, e)?}));
                    }
                }
            }
        }
        Relation::FourT => {
            let cw = chord_weights(&p, None, None, seed)?;
            for (n, t) in all_four_terms(order)?.iter().enumerate() {
                rows.push(json!({"quadruple": n, "pass": cw.check_4t(t)?}));
            }
        }
        Relation::OneT => {
            let cw = chord_weights(&p, None, None, seed)?;
            for cd in enumerate_chord(order)?.iter().filter(|cd| cd.has_isolated_chord()) {
                rows.push(json!({"chords": cd.to_json(), "pass": cw.check_1t(cd, 0)?}));
            }
        }
    }
    let ok = rows.iter().all(|r| r["pass"] == json!(true));
    Ok((json!({"order": order, "all_pass": ok, "results": rows}), ok))
}

fn examples(list: bool, emit: Option<&str>) -> Outcome {
    if let Some(name) = emit {
        return Ok((pair_file(&catalog::get(name)?), true));
    }
    debug_assert!(list);
    let entries: Vec<Value> = catalog::all()?
        .iter()
        .map(|ex| json!({"name": ex.name, "dim": ex.pair.dim(), "sub_dim": ex.pair.dim_h(), "note": ex.note}))
        .collect();
    Ok((Value::Array(entries), true))
}

fn cohomology(pair: &str, degree: Option<usize>) -> Outcome {
    let p = load_pair(pair)?;
    p.pair.require_valid()?;
    let scalars = ModuleRep::scalars(p.pair.h_algebra());
    let degrees: Vec<usize> = match degree {
        Some(d) => vec![d],
        None => (0..=p.pair.dim_h()).collect(),
    };
    let dims = degrees
        .iter()
        .map(|&d| Ok(json!({"degree": d, "dim": ce::cohomology_dim(&scalars, d)?})))
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok((json!({"dim_h": p.pair.dim_h(), "cohomology": dims}), true))
}

fn run(cli: &Cli) -> Outcome {
    let seed = cli.seed;
    match &cli.command {
        Command::Validate { pair } => validate(pair),
        Command::Connection { pair, torsion_free, symplectic } => connection(pair, *torsion_free, *symplectic, seed),
        Command::Atiyah { pair, connection } => atiyah(pair, connection.as_deref(), seed),
        Command::Weight { pair, diagram, k, connection } => weight(pair, diagram.as_deref(), *k, connection.as_deref(), seed),
        Command::Chord { pair, chords, k, module, connection, origin } => {
            chord(pair, chords.as_deref(), *k, module.as_deref(), connection.as_deref(), *origin, seed)
        }
        Command::Check { pair, relation, order } => check(pair, *relation, *order, seed),
        Command::Examples { list, emit } => examples(*list, emit.as_deref()),
        Command::Cohomology { pair, degree } => cohomology(pair, *degree),
    }
}

fn emit(value: &Value, output: Option<&Path>) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    match output {
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.to_string()),
                _ => Ok(()),
            }
        }
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| format!("{}: {e}", path.display())),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (value, ok) = match run(&cli) {
        Ok(r) => r,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(msg) = emit(&value, cli.output.as_deref()) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
