use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use galsym_core::residue::{bilocal_decompose, case2a_reduce, decompose, decompose_symbol_rewrite, residue};
use galsym_core::splitting::{
    common_slot_local, cyclotomic_descent, descent_enlargement, index_bounds, split_composite_with_order, split_top,
    SplittingCertificate,
};
use galsym_core::symcalc::{normalize, normalize_report, CanonicalClass};
use galsym_core::{
    hilbert_symbol, parse_element, parse_symbol_expr, quaternion_ramification, tate_common_slot, FieldTower, Place,
    QuaternionInput,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::session::Session;
use crate::{Cli, CliError, Command, OracleCommand, Report, TowerCommand};

type Outcome = Result<Report, CliError>;

pub fn run(cli: &Cli, session_path: &Path) -> Outcome {
    let load = || -> Result<Arc<FieldTower>, CliError> { Session::load(session_path)?.tower() };
    match &cli.command {
        Command::Tower(TowerCommand::New { q, m, uniformizers, output }) => {
            let tower = Arc::new(FieldTower::new(*q, *m, uniformizers)?);
            Session::new(&tower, *output).save(session_path)?;
            Ok(tower_report(tower, Some(session_path)))
        }
        Command::Tower(TowerCommand::Show) => Ok(tower_report(load()?, None)),
        Command::Normalize { expr } => normalize_cmd(&load()?, expr),
        Command::Residue { expr } => residue_cmd(&load()?, expr),
        Command::Decompose { expr, trace } => decompose_cmd(&load()?, expr, *trace),
        Command::BilocalDecompose { expr, unit } => bilocal_cmd(&load()?, expr, unit.as_deref()),
        Command::Split { expr, order } => split_cmd(&load()?, expr, order.as_deref()),
        Command::PeriodIndex { expr } => period_index_cmd(&load()?, expr),
        Command::CommonSlot { exprs, random } => common_slot_cmd(&load()?, exprs, *random, cli.seed),
        Command::Descend { expr } => descend_cmd(&load()?, expr.as_deref()),
        Command::TateSlot { algebras } => tate_cmd(algebras),
        Command::Oracle(OracleCommand::Hilbert { a, b, place }) => hilbert_cmd(*a, *b, place.as_deref()),
    }
}

fn tower_report(tower: Arc<FieldTower>, saved: Option<&Path>) -> Report {
    let mut text = format!(
        "depth {}, top degree {}, {}",
        tower.depth(),
        tower.top_degree(),
        if tower.full_calculus() { "full calculus (m | q - 1)" } else { "descent bookkeeping only (m ∤ q - 1)" }
    );
    if let Some(path) = saved {
        let _ = write!(text, "\nsaved to {}", path.display());
    }
    let json = json!({
        "depth": tower.depth(),
        "top_degree": tower.top_degree(),
        "full_calculus": tower.full_calculus(),
        "generators": tower.generator_names(),
    });
    Report { text, json, tower: Some(tower) }
}

fn class_from(tower: &Arc<FieldTower>, expr: &str) -> Result<CanonicalClass, CliError> {
    Ok(normalize(&parse_symbol_expr(expr, tower)?)?)
}

fn normalize_cmd(tower: &Arc<FieldTower>, expr: &str) -> Outcome {
    let report = normalize_report(&parse_symbol_expr(expr, tower)?)?;
    let mut json = serde_json::to_value(report.class.to_json()).expect("json");
    json["symbol_length_bound"] = json!(report.symbol_length_bound);
    json["degree_overflow"] = json!(report.degree_overflow);
    let mut text = format!("{}\ndegree {}, symbol length <= {}", report.class, report.class.degree(), report.symbol_length_bound);
    if report.degree_overflow {
        text.push_str("\n(degree exceeds the top degree: the class is zero)");
    }
    Ok(Report { text, json, tower: Some(Arc::clone(tower)) })
}

fn residue_cmd(tower: &Arc<FieldTower>, expr: &str) -> Outcome {
    let r = residue(&class_from(tower, expr)?)?;
    Ok(Report {
        text: format!("{r}\nover {}", r.tower()),
        json: serde_json::to_value(r.to_json()).expect("json"),
        tower: Some(Arc::clone(tower)),
    })
}

fn decompose_cmd(tower: &Arc<FieldTower>, expr: &str, trace: bool) -> Outcome {
    let sum = parse_symbol_expr(expr, tower)?;
    let x = normalize(&sum)?;
    let d = decompose(&x)?;
    let mut text = format!("xi1 = {}\nxi2 = {}", d.xi1, d.xi2);
    let mut json = json!({
        "xi1": d.xi1.to_json(),
        "xi2": d.xi2.to_json(),
        "recombines": d.recombine()?.equals(&x),
    });
    if trace {
        let rw = decompose_symbol_rewrite(&sum)?;
        let agrees = normalize(&rw.units)?.equals(&d.xi1) && normalize(&rw.ramified)?.equals(&x.sub(&d.xi1)?);
        for step in &rw.trace {
            let _ = write!(text, "\n[{}] {}  =>  {}", format!("{:?}", step.rule).to_lowercase(), step.before, step.after);
        }
        let _ = write!(text, "\nunits: {}\nramified: {}\nrewrite agrees with canonical form: {agrees}", rw.units, rw.ramified);
        json["trace"] = serde_json::to_value(&rw.trace).expect("json");
        json["diagonal_exponents"] = serde_json::to_value(&rw.diagonal_exponents).expect("json");
        json["rewrite"] = json!({
            "units": rw.units.to_string(),
            "ramified": rw.ramified.to_string(),
            "residue": rw.residue.to_string(),
            "agrees": agrees,
        });
    }
    Ok(Report { text, json, tower: Some(Arc::clone(tower)) })
}

fn bilocal_cmd(tower: &Arc<FieldTower>, expr: &str, unit: Option<&str>) -> Outcome {
    let sum = parse_symbol_expr(expr, tower)?;
    let b = bilocal_decompose(&sum)?;
    let recombines = b.recombine()?.equals(&normalize(&sum)?);
    let mut text = format!("xi1 = {}\nxi2 = {}\nxi3 = {}\nxi4 = {}", b.xi1, b.xi2, b.xi3, b.xi4);
    let mut json = json!({
        "xi1": b.xi1.to_json(),
        "xi2": b.xi2.to_json(),
        "xi3": b.xi3.to_json(),
        "xi4": b.xi4.to_json(),
        "recombines": recombines,
    });
    if let Some(u) = unit {
        let u = parse_element(u, tower)?;
        let chain = case2a_reduce(&b.xi4, &u)?;
        let lines: Vec<Value> = chain
            .lines
            .iter()
            .map(|l| json!({"expression": l.expression, "class": l.class.to_json()}))
            .collect();
        for l in &chain.lines {
            let _ = write!(text, "\n  {} = {}", l.expression, l.class);
        }
        let _ = write!(text, "\ncommon slot g = {}", chain.g);
        json["nodal_chain"] = json!({"lines": lines, "g": chain.g.to_string(), "verified": true});
    }
    Ok(Report { text, json, tower: Some(Arc::clone(tower)) })
}

fn certificate_text(cert: &SplittingCertificate) -> String {
    let mut text = format!("input {}\n", cert.input);
    for (step, after) in cert.chain.iter().zip(&cert.restricted) {
        let j = step.to_json();
        let what = match (&j.uniformizer, &j.radicand) {
            (Some(u), _) => format!("adjoin {u}^(1/{})", j.degree),
            (_, Some(r)) => format!("adjoin ({r})^(1/{})", j.degree),
            _ => format!("enlarge residue field by degree {}", j.degree),
        };
        let _ = writeln!(text, "  {what}: {after}");
    }
    let _ = write!(text, "degree {}, period {}, verified {}", cert.degree, cert.period, cert.verified);
    text
}

fn split_cmd(tower: &Arc<FieldTower>, expr: &str, order: Option<&[u64]>) -> Outcome {
    let x = class_from(tower, expr)?;
    let cert = match order {
        Some(order) => split_composite_with_order(&x, order)?,
        None => split_top(&x)?,
    };
    Ok(Report {
        text: certificate_text(&cert),
        json: serde_json::to_value(cert.to_json()).expect("json"),
        tower: Some(Arc::clone(tower)),
    })
}

fn period_index_cmd(tower: &Arc<FieldTower>, expr: &str) -> Outcome {
    let b = index_bounds(&class_from(tower, expr)?)?;
    Ok(Report {
        text: format!("period {}, constructed degree {}, equal {}", b.period, b.constructed_degree, b.equal),
        json: json!({
            "period": b.period,
            "degree": b.constructed_degree,
            "equal": b.equal,
            "certificate": b.certificate.to_json(),
        }),
        tower: Some(Arc::clone(tower)),
    })
}

fn common_slot_cmd(tower: &Arc<FieldTower>, exprs: &[String], random: Option<usize>, seed: u64) -> Outcome {
    let classes = match random {
        Some(n) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n).map(|_| CanonicalClass::random(tower, tower.top_degree(), &mut rng)).collect()
        }
        None if exprs.is_empty() => return Err(CliError::usage("give class expressions or --random N".into())),
        None => exprs.iter().map(|e| class_from(tower, e)).collect::<Result<Vec<_>, _>>()?,
    };
    let slot = common_slot_local(&classes)?;
    let mut text = String::new();
    for (x, r) in slot.classes.iter().zip(&slot.restricted) {
        let _ = writeln!(text, "{x}  ->  {r}");
    }
    let step = match &slot.step {
        Some(s) => match s.to_json().uniformizer {
            Some(u) => format!("adjoin {u}^(1/{})", s.degree()),
            None => format!("enlarge residue field by degree {}", s.degree()),
        },
        None => "no extension needed".into(),
    };
    let _ = write!(text, "{step}; degree {}, verified {}", slot.degree, slot.verified);
    Ok(Report { text, json: serde_json::to_value(slot.to_json()).expect("json"), tower: Some(Arc::clone(tower)) })
}

fn descend_cmd(tower: &Arc<FieldTower>, expr: Option<&str>) -> Outcome {
    let enlargement = descent_enlargement(tower)?;
    let big = enlargement.target();
    let x = match expr {
        Some(e) => class_from(big, e)?,
        None => {
            let gens: Vec<usize> = (0..=big.depth()).collect();
            CanonicalClass::basis(big, &gens)?
        }
    };
    let r = cyclotomic_descent(tower, &x)?;
    let text = format!(
        "d = ord_{}(q) = {}, gcd(d, {}) = {}, d^-1 = {} mod {}\nover {}: {}\ncor∘res = ×d checked on {} element classes and {} cohomology classes: {}\nconclusion: split by an extension of degree {}; valid {}",
        r.ell,
        r.d,
        r.ell,
        r.gcd,
        r.d_inverse,
        r.ell,
        big,
        certificate_text(&r.certificate).replace('\n', "\n  "),
        r.contract.iter().map(|c| c.elements_checked).sum::<usize>(),
        r.contract.iter().map(|c| c.classes_checked).sum::<usize>(),
        r.contract.iter().all(|c| c.holds),
        r.conclusion_degree,
        r.valid,
    );
    Ok(Report { text, json: serde_json::to_value(r.to_json()).expect("json"), tower: Some(Arc::clone(tower)) })
}

fn parse_algebra(text: &str) -> Result<QuaternionInput, CliError> {
    let bad = || CliError::usage(format!("expected an algebra like (-1,-3), got {text:?}"));
    let inner = text.trim().strip_prefix('(').and_then(|s| s.strip_suffix(')')).ok_or_else(bad)?;
    let (a, b) = inner.split_once(',').ok_or_else(bad)?;
    let a = a.trim().parse().map_err(|_| bad())?;
    let b = b.trim().parse().map_err(|_| bad())?;
    Ok(QuaternionInput::new(a, b)?)
}

fn tate_cmd(algebras: &[String]) -> Outcome {
    let inputs = algebras.iter().map(|a| parse_algebra(a)).collect::<Result<Vec<_>, _>>()?;
    let s = tate_common_slot(&inputs)?;
    let mut text = format!("d = {}\n", s.d);
    for (qa, r) in &s.ramification {
        let _ = writeln!(text, "  {qa} ramified at {{{}}}", r.labels().join(", "));
    }
    for c in &s.verification {
        let _ = writeln!(text, "  place {}: d is {}", c.place, if c.nonsquare { "a nonsquare" } else { "a square" });
    }
    let _ = write!(text, "verified {}", s.verified);
    Ok(Report { text, json: serde_json::to_value(s.to_json()).expect("json"), tower: None })
}

fn hilbert_cmd(a: i64, b: i64, place: Option<&str>) -> Outcome {
    let places: Vec<Place> = match place {
        Some(p) => vec![p.parse()?],
        None => QuaternionInput::new(a, b)?.candidate_places(),
    };
    let mut text = String::new();
    let mut rows = Vec::new();
    for v in places {
        let h = hilbert_symbol(a, b, v)?;
        let _ = writeln!(text, "({a}, {b})_{v} = {h:+}");
        rows.push(json!({"place": v, "symbol": h}));
    }
    let mut json = json!({"a": a, "b": b, "symbols": rows});
    if place.is_none() {
        let r = quaternion_ramification(&QuaternionInput::new(a, b)?)?;
        let _ = write!(text, "ramified at {{{}}}", r.labels().join(", "));
        json["ramification"] = serde_json::to_value(&r).expect("json");
    }
    Ok(Report { text, json, tower: None })
}
