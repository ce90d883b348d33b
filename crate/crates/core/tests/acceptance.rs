//! Acceptance suite: nine criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the summary is always printed;
//! the process exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use galsym_core::arith;
use galsym_core::numoracle::{hilbert_symbol, quaternion_ramification, tate_common_slot, Place, QuaternionInput};
use galsym_core::residue::{bilocal_decompose, case2a_reduce, decompose, decompose_symbol_rewrite, residue};
use galsym_core::splitting::{
    common_slot_local, cor_res_contract, cyclotomic_descent, descent_enlargement, index_bounds, split_composite_with_order,
    split_top,
};
use galsym_core::symcalc::{normalize, CanonicalClass, SymbolSum};
use galsym_core::tower::{ElementClass, FieldTower};
use galsym_core::{parse_symbol_expr, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(failures: &[String], summary: String) -> Self {
        let detail = match failures.first() {
            None => summary,
            Some(first) => format!("{summary}; {} failure(s), first: {first}", failures.len()),
        };
        Self { passed: failures.is_empty(), detail }
    }
}

fn tower(q: u64, m: u64, depth: usize) -> Arc<FieldTower> {
    let names: Vec<String> = (1..=depth).map(|i| format!("t{i}")).collect();
    Arc::new(FieldTower::new(q, m, &names).unwrap())
}

fn sym(t: &Arc<FieldTower>, slots: &[&ElementClass]) -> CanonicalClass {
    normalize(&SymbolSum::symbol(t, slots.iter().map(|&a| a.clone()).collect()).unwrap()).unwrap()
}

fn top_class(t: &Arc<FieldTower>, a: i128) -> CanonicalClass {
    let gens: Vec<usize> = (0..=t.depth()).collect();
    CanonicalClass::basis(t, &gens).unwrap().scale(a)
}

/// Antisymmetry, bilinearity and `(a, a) = (-1, a)` on random pairs.
fn relations() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let towers: Vec<_> = [7, 13]
        .into_iter()
        .flat_map(|q| [2, 3, 6].into_iter().flat_map(move |m| [1, 2].map(|n| (q, m, n))))
        .collect();
    let mut failures = Vec::new();
    let trials = 1000;
    for i in 0..trials {
        let (q, m, n) = towers[i % towers.len()];
        let t = tower(q, m, n);
        let (a, a2, b) = (t.random_element(&mut rng), t.random_element(&mut rng), t.random_element(&mut rng));
        let ab = sym(&t, &[&a, &b]);
        if !ab.add(&sym(&t, &[&b, &a])).unwrap().is_zero() {
            failures.push(format!("antisymmetry ({a}, {b}) over {t}"));
        }
        let lhs = sym(&t, &[&a.mul(&a2).unwrap(), &b]);
        if !lhs.equals(&ab.add(&sym(&t, &[&a2, &b])).unwrap()) {
            failures.push(format!("left linearity ({a}·{a2}, {b}) over {t}"));
        }
        let rhs = sym(&t, &[&b, &a.mul(&a2).unwrap()]);
        if !rhs.equals(&sym(&t, &[&b, &a]).add(&sym(&t, &[&b, &a2])).unwrap()) {
            failures.push(format!("right linearity ({b}, {a}·{a2}) over {t}"));
        }
        if !sym(&t, &[&a, &a]).equals(&sym(&t, &[&t.minus_one(), &a])) {
            failures.push(format!("diagonal ({a}, {a}) over {t}"));
        }
    }
    Outcome::new(&failures, format!("{trials} random pairs over {} towers", towers.len()))
}

/// Recombination of `decompose`, trace replay of the rewriting, and agreement of the two.
fn decomposition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = Vec::new();
    let mut random_checked = 0;
    for (q, m, n) in [(7, 2, 1), (7, 3, 1), (7, 6, 2), (13, 2, 2), (13, 3, 2), (13, 6, 1)] {
        let t = tower(q, m, n);
        for i in 0..500 {
            let degree = 1 + i % t.top_degree();
            let x = CanonicalClass::random(&t, degree, &mut rng);
            let d = decompose(&x).unwrap();
            if !d.recombine().unwrap().equals(&x) {
                failures.push(format!("recombination of {x} over {t}"));
            }
            random_checked += 1;
        }
    }
    let mut exhaustive = 0;
    let mut steps = 0;
    for (q, m) in [(7, 2), (7, 3)] {
        let t = tower(q, m, 1);
        let elems = t.all_elements();
        for a in &elems {
            for b in &elems {
                let sum = SymbolSum::symbol(&t, vec![a.clone(), b.clone()]).unwrap();
                let x = normalize(&sum).unwrap();
                let rw = decompose_symbol_rewrite(&sum).unwrap();
                for step in &rw.trace {
                    for text in [&step.before, &step.after] {
                        let replayed = parse_symbol_expr(text, &t).and_then(|s| normalize(&s));
                        if !matches!(replayed, Ok(ref y) if y.equals(&x)) {
                            failures.push(format!("trace state {text:?} of ({a}, {b}) over {t}"));
                        }
                    }
                    steps += 1;
                }
                let d = decompose(&x).unwrap();
                let units = normalize(&rw.units).unwrap();
                let res = normalize(&rw.residue).unwrap();
                let expected_res = residue(&x).unwrap();
                let res_matches = res.coefficients() == expected_res.coefficients();
                let ram_matches = normalize(&rw.ramified).unwrap().equals(&x.sub(&d.xi1).unwrap());
                if !units.equals(&d.xi1) || !res_matches || !ram_matches {
                    failures.push(format!("rewrite vs decompose on ({a}, {b}) over {t}"));
                }
                exhaustive += 1;
            }
        }
    }
    Outcome::new(
        &failures,
        format!("{random_checked} random recombinations, {exhaustive} exhaustive symbols, {steps} trace steps replayed"),
    )
}

/// Every top class over q = 7 splits in degree equal to its period.
fn period_index() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for m in [2, 3, 6] {
        for n in [1, 2] {
            let t = tower(7, m, n);
            let classes = CanonicalClass::enumerate(&t, n + 1);
            for x in &classes {
                let cert = split_top(x).unwrap();
                let bounds = index_bounds(x).unwrap();
                if !(cert.verified && cert.verify() && cert.degree == x.period()) {
                    failures.push(format!("split_top on {x} over {t}: degree {}", cert.degree));
                }
                if !bounds.equal || !bounds.certificate.verify() {
                    failures.push(format!("index_bounds on {x} over {t}"));
                }
                checked += 1;
            }
        }
    }
    Outcome::new(&failures, format!("{checked} top classes, period = index for all"))
}

/// For m = 6 both prime orders give verified chains dictated by the period.
fn composite_splitting() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for n in [1, 2] {
        let t = tower(7, 6, n);
        for a in 0..6 {
            let x = top_class(&t, a);
            let period = x.period();
            for order in [[2, 3], [3, 2]] {
                let cert = split_composite_with_order(&x, &order).unwrap();
                let mut degrees = cert.degrees();
                degrees.sort_unstable();
                let expected: Vec<u64> = arith::prime_factors(period);
                if !(cert.verified && cert.verify() && cert.degree == period && degrees == expected) {
                    failures.push(format!("order {order:?} on {x}: chain {:?}", cert.degrees()));
                }
                checked += 1;
            }
        }
    }
    Outcome::new(&failures, format!("{checked} chains over m = 6"))
}

/// Bilocal recombination on all monomial 3-slot symbols, and the nodal chain for all units.
fn bilocal() -> Outcome {
    let mut failures = Vec::new();
    let mut symbols = 0;
    for m in [2, 3] {
        let t = tower(7, m, 2);
        let elems = t.all_elements();
        for a in &elems {
            for b in &elems {
                for c in &elems {
                    let sum = SymbolSum::symbol(&t, vec![a.clone(), b.clone(), c.clone()]).unwrap();
                    let x = normalize(&sum).unwrap();
                    let bd = bilocal_decompose(&sum).unwrap();
                    if !bd.recombine().unwrap().equals(&x) {
                        failures.push(format!("bilocal recombination of ({a}, {b}, {c}) over {t}"));
                    }
                    symbols += 1;
                }
            }
        }
    }
    let mut chains = 0;
    let mut skipped = 0;
    for m in [2, 3, 6] {
        let t = tower(7, m, 2);
        let units: Vec<ElementClass> = t.all_elements().into_iter().filter(|u| u.is_base_unit()).collect();
        // xi4 ranges over scalars and multiples of (c): classes of the residue field
        let mut xi4s: Vec<CanonicalClass> = (0..m as i128).map(|k| CanonicalClass::scalar(&t, k)).collect();
        xi4s.extend((1..m as i128).map(|k| CanonicalClass::basis(&t, &[0]).unwrap().scale(k)));
        for xi4 in &xi4s {
            for u in &units {
                match case2a_reduce(xi4, u) {
                    Ok(_) => chains += 1,
                    Err(Error::Precondition(_)) => skipped += 1,
                    Err(e) => failures.push(format!("nodal chain xi4 = {xi4}, u = {u} over {t}: {e}")),
                }
            }
        }
    }
    Outcome::new(
        &failures,
        format!("{symbols} symbols recombined, {chains} nodal chains verified ({skipped} outside the chain's hypotheses)"),
    )
}

/// Symbolic vanishing against brute-force p-adic symbols, and reciprocity.
fn oracle_equivalence() -> Outcome {
    let mut failures = Vec::new();
    let mut pairs = 0;
    for p in [3u64, 5, 7, 13] {
        let t = tower(p, 2, 1);
        let g = arith::smallest_primitive_root(p).unwrap() as i64;
        let monomials: Vec<(i64, i64)> = vec![(0, 0), (1, 0), (0, 1), (1, 1)];
        let rational = |(i, j): (i64, i64)| g.pow(i as u32) * (p as i64).pow(j as u32);
        for &x in &monomials {
            for &y in &monomials {
                let a = t.element(x.0 as i128, &[x.1 as i128]).unwrap();
                let b = t.element(y.0 as i128, &[y.1 as i128]).unwrap();
                let symbolic_zero = sym(&t, &[&a, &b]).is_zero();
                let h = hilbert_symbol(rational(x), rational(y), Place::Prime(p)).unwrap();
                if symbolic_zero != (h == 1) {
                    failures.push(format!("p = {p}: ({a}, {b}) zero = {symbolic_zero}, hilbert = {h}"));
                }
                pairs += 1;
            }
        }
    }
    let mut reciprocity = 0;
    for a in -30i64..=30 {
        for b in -30i64..=30 {
            if a == 0 || b == 0 {
                continue;
            }
            let qa = QuaternionInput::new(a, b).unwrap();
            let product: i64 = qa
                .candidate_places()
                .into_iter()
                .map(|v| hilbert_symbol(a, b, v).unwrap() as i64)
                .product();
            if product != 1 {
                failures.push(format!("reciprocity fails for ({a}, {b})"));
            }
            reciprocity += 1;
        }
    }
    Outcome::new(&failures, format!("{pairs} class pairs, reciprocity on {reciprocity} pairs"))
}

/// Local common slots for random families, and quaternion common slots over Q.
fn common_slot() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();
    let configs = [(7, 2), (7, 3), (7, 6), (13, 4), (13, 6), (13, 12)];
    for i in 0..100 {
        let (q, m) = configs[i % configs.len()];
        let t = tower(q, m, 1 + i % 2);
        let size = rng.random_range(1..=8);
        let family: Vec<_> = (0..size).map(|_| CanonicalClass::random(&t, t.top_degree(), &mut rng)).collect();
        let slot = common_slot_local(&family).unwrap();
        if !slot.verified || slot.degree > m {
            failures.push(format!("family of {size} over {t}: degree {}", slot.degree));
        }
    }
    let mut slowest = Duration::ZERO;
    for _ in 0..200 {
        let size = rng.random_range(1..=5);
        let mut entry = || loop {
            let v = rng.random_range(-50i64..=50);
            if v != 0 {
                return v;
            }
        };
        let algebras: Vec<_> = (0..size).map(|_| QuaternionInput::new(entry(), entry()).unwrap()).collect();
        let start = Instant::now();
        let solution = tate_common_slot(&algebras);
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        match solution {
            Ok(s) if s.verified && elapsed < Duration::from_secs(1) => {
                // independent re-check: every algebra is split at every place by Q(√d)
                for qa in &algebras {
                    let ram = quaternion_ramification(qa).unwrap();
                    if ram.iter().any(|v| galsym_core::numoracle::is_local_square(s.d, v).unwrap()) {
                        failures.push(format!("d = {} fails for {qa}", s.d));
                    }
                }
            }
            Ok(s) => failures.push(format!("{algebras:?}: d = {}, verified = {}, {elapsed:?}", s.d, s.verified)),
            Err(e) => failures.push(format!("{algebras:?}: {e}")),
        }
    }
    Outcome::new(&failures, format!("100 local families, 200 quaternion sets, slowest solve {slowest:.2?}"))
}

/// Descent bookkeeping for all admissible (q, ℓ) and the contract on full towers.
fn descent() -> Outcome {
    let mut failures = Vec::new();
    let mut valid = 0;
    let mut rejected = Vec::new();
    for q in [5u64, 7, 11] {
        for ell in [3u64, 5, 7] {
            if (q - 1) % ell == 0 {
                continue;
            }
            for n in [1, 2] {
                let names: Vec<String> = (1..=n).map(|i| format!("t{i}")).collect();
                let small = match FieldTower::new(q, ell, &names) {
                    Ok(t) => Arc::new(t),
                    Err(Error::NonCoprimeModulus { .. }) => {
                        // ℓ = p: no Kummer theory, rejected by construction
                        rejected.push(format!("(q={q}, ℓ={ell})"));
                        continue;
                    }
                    Err(e) => {
                        failures.push(format!("q = {q}, ℓ = {ell}: {e}"));
                        continue;
                    }
                };
                let big = Arc::clone(descent_enlargement(&small).unwrap().target());
                for a in 1..ell as i128 {
                    match cyclotomic_descent(&small, &top_class(&big, a)) {
                        Ok(r) if r.valid && r.gcd == 1 && r.d * r.d_inverse % ell == 1 && r.d == arith::multiplicative_order(q % ell, ell).unwrap() => {
                            valid += 1
                        }
                        Ok(r) => failures.push(format!("q = {q}, ℓ = {ell}, n = {n}: report {:?}", r.contract)),
                        Err(e) => failures.push(format!("q = {q}, ℓ = {ell}, n = {n}: {e}")),
                    }
                }
            }
        }
    }
    let mut full_checks = 0;
    for (q, m) in [(5, 2), (5, 4), (7, 2), (7, 3), (7, 6), (11, 5), (11, 10), (13, 4)] {
        for n in [0, 1, 2] {
            for d in 1..=4 {
                let c = cor_res_contract(&tower(q, m, n), d).unwrap();
                if !c.holds || c.classes_checked == 0 {
                    failures.push(format!("cor∘res on q = {q}, m = {m}, n = {n}, d = {d}"));
                }
                full_checks += c.classes_checked;
            }
        }
    }
    rejected.dedup();
    Outcome::new(
        &failures,
        format!(
            "{valid} descents valid, {full_checks} classes checked for cor∘res = ×d; wild pairs rejected: {}",
            rejected.join(" ")
        ),
    )
}

/// Random sums of degree n + 2 over depth-n towers normalize to zero.
fn vanishing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = Vec::new();
    let configs = [(7, 2), (7, 3), (7, 6), (13, 4), (13, 12), (5, 4)];
    for i in 0..500 {
        let (q, m) = configs[i % configs.len()];
        let n = i % 4;
        let t = tower(q, m, n);
        let len = rng.random_range(1..=4);
        let sum = SymbolSum::random(&t, n + 2, len, &mut rng);
        if !normalize(&sum).unwrap().is_zero() {
            failures.push(format!("{sum} over {t}"));
        }
    }
    Outcome::new(&failures, "500 random sums".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("symbol relations", relations),
        ("ramified decomposition", decomposition),
        ("period equals index", period_index),
        ("composite splitting", composite_splitting),
        ("bilocal decomposition", bilocal),
        ("oracle equivalence", oracle_equivalence),
        ("common slot", common_slot),
        ("cyclotomic descent", descent),
        ("vanishing above top degree", vanishing),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!("criterion {} [{name}]: {verdict} ({}) in {:.2?}", i + 1, outcome.detail, start.elapsed());
        all &= outcome.passed;
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
