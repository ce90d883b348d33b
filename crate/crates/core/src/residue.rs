//! Residue maps and the ramified/unramified decompositions.
//!
//! Residues are taken only at the outermost uniformizer `tn`. Because `tn`
//! is last in the generator order, the residue of `x_S ∧ tn` is `x_S` with
//! sign `+1`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::symcalc::{generator_bit, normalize, CanonicalClass, SymbolSum, SymbolTerm};
use crate::tower::{ElementClass, FieldTower};

/// Degree-one class of the uniformizer at `index`.
pub fn uniformizer_class(tower: &Arc<FieldTower>, index: usize) -> CanonicalClass {
    CanonicalClass::from_element(&tower.uniformizer(index))
}

/// Residue at the uniformizer `index`; only the outermost one is supported.
pub fn residue_map(x: &CanonicalClass, index: usize) -> Result<CanonicalClass> {
    let tower = x.tower();
    let n = tower.depth();
    if n == 0 {
        return Err(Error::DepthTooSmall(1));
    }
    if index + 1 != n {
        return Err(Error::InnerUniformizer { requested: index, outermost: n - 1 });
    }
    if x.degree() == 0 {
        return Err(Error::Precondition("residue of a degree-zero class".into()));
    }
    let residue_tower = Arc::new(tower.residue_tower()?);
    let last = generator_bit(n);
    let coeffs = x
        .coefficients()
        .iter()
        .filter(|(&s, _)| s & last != 0)
        .map(|(&s, &a)| (s & !last, a));
    Ok(CanonicalClass::from_coeffs(&residue_tower, x.degree() - 1, coeffs))
}

/// Residue at the outermost uniformizer.
pub fn residue(x: &CanonicalClass) -> Result<CanonicalClass> {
    let n = x.tower().depth();
    if n == 0 {
        return Err(Error::DepthTooSmall(1));
    }
    residue_map(x, n - 1)
}

/// Inclusion of classes from the residue tower (drop `tn`) into the tower.
pub fn embed_from_residue(y: &CanonicalClass, tower: &Arc<FieldTower>) -> Result<CanonicalClass> {
    if !y.tower().same_field(&tower.residue_tower()?) {
        return Err(Error::TowerMismatch);
    }
    Ok(CanonicalClass::from_coeffs(tower, y.degree(), y.coefficients().iter().map(|(&s, &a)| (s, a))))
}

/// `x = xi1 + xi2 ∧ tn` with neither part involving `tn`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub xi1: CanonicalClass,
    pub xi2: CanonicalClass,
}

impl Decomposition {
    pub fn recombine(&self) -> Result<CanonicalClass> {
        let tower = self.xi1.tower();
        let pi = uniformizer_class(tower, tower.depth() - 1);
        self.xi1.add(&self.xi2.cup(&pi)?)
    }
}

/// Splits a class into its unramified part and the residue paired with `tn`.
pub fn decompose(x: &CanonicalClass) -> Result<Decomposition> {
    let tower = x.tower();
    if x.degree() == 0 {
        let xi2 = CanonicalClass::zero(tower, 0);
        return Ok(Decomposition { xi1: x.clone(), xi2 });
    }
    let xi2 = embed_from_residue(&residue(x)?, tower)?;
    let pi = uniformizer_class(tower, tower.depth() - 1);
    let xi1 = x.sub(&xi2.cup(&pi)?)?;
    Ok(Decomposition { xi1, xi2 })
}

/// Rewrite rules recorded in a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Swap,
    Diagonal,
    Split,
    Multilinear,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub rule: Rule,
    pub before: String,
    pub after: String,
}

/// Exponent `e` found for `(π^j1, π^j2) = ((-1)^e, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiagonalExponent {
    pub j1: u64,
    pub j2: u64,
    pub e: u64,
}

#[derive(Debug, Clone)]
pub struct SymbolRewrite {
    /// Terms whose slots are all units.
    pub units: SymbolSum,
    /// Terms of the shape `(v1, ..., v_{k-1}, π)`.
    pub ramified: SymbolSum,
    /// The ramified terms with the trailing `π` removed (degree `k - 1`).
    pub residue: SymbolSum,
    pub trace: Vec<TraceStep>,
    pub diagonal_exponents: Vec<DiagonalExponent>,
}

/// Determines `e` with `(π^j1, π^j2) = ((-1)^e, π)` by comparing canonical forms.
pub fn diagonal_exponent(tower: &Arc<FieldTower>, j1: u64, j2: u64) -> Result<u64> {
    let n = tower.depth();
    let pi = tower.uniformizer(n - 1);
    let lhs = normalize(&SymbolSum::symbol(tower, vec![pi.pow(j1 as i128), pi.pow(j2 as i128)])?)?;
    for e in 0..2 {
        let rhs = normalize(&SymbolSum::symbol(tower, vec![tower.minus_one().pow(e), pi.clone()])?)?;
        if lhs == rhs {
            return Ok(e as u64);
        }
    }
    Err(Error::IdentityFailure { step: 0, detail: format!("no exponent matches (π^{j1}, π^{j2})") })
}

struct Rewriter {
    tower: Arc<FieldTower>,
    degree: usize,
    state: Vec<SymbolTerm>,
    trace: Vec<TraceStep>,
    diagonals: Vec<DiagonalExponent>,
}

impl Rewriter {
    fn render(&self) -> String {
        let mut s = SymbolSum::new(&self.tower, self.degree);
        for t in &self.state {
            s.push(t.coeff, t.slots.clone()).expect("state terms share tower and degree");
        }
        s.to_string()
    }

    fn replace(&mut self, rule: Rule, at: usize, with: Vec<SymbolTerm>) {
        let before = self.render();
        self.state.splice(at..=at, with);
        let after = self.render();
        self.trace.push(TraceStep { rule, before, after });
    }

    fn pi_exp(&self, a: &ElementClass) -> u64 {
        a.unif_exps()[self.tower.depth() - 1]
    }

    /// Applies one rule to term `at`; returns false when the term is final.
    fn step(&mut self, at: usize) -> Result<bool> {
        let term = self.state[at].clone();
        let k = term.slots.len();
        // split a mixed slot u·π^j into (u) + (π^j)
        if let Some(i) = term.slots.iter().position(|a| {
            let (u, j) = a.split_outermost().expect("depth >= 1");
            j != 0 && !u.is_identity()
        }) {
            let (u, j) = term.slots[i].split_outermost().expect("depth >= 1");
            let pi_part = self.tower.uniformizer(self.tower.depth() - 1).pow(j as i128);
            let mut first = term.clone();
            first.slots[i] = u;
            let mut second = term;
            second.slots[i] = pi_part;
            self.replace(Rule::Split, at, vec![first, second]);
            return Ok(true);
        }
        let pi_slots: Vec<usize> = (0..k).filter(|&i| self.pi_exp(&term.slots[i]) != 0).collect();
        let Some(&last) = pi_slots.last() else {
            return Ok(false);
        };
        if last + 1 < k {
            self.replace(Rule::Swap, at, vec![swapped(&term, last)]);
            return Ok(true);
        }
        if pi_slots.len() >= 2 {
            let p = pi_slots[pi_slots.len() - 2];
            if p + 2 < k {
                self.replace(Rule::Swap, at, vec![swapped(&term, p)]);
                return Ok(true);
            }
            let j1 = self.pi_exp(&term.slots[k - 2]);
            let j2 = self.pi_exp(&term.slots[k - 1]);
            let e = diagonal_exponent(&self.tower, j1, j2)?;
            self.diagonals.push(DiagonalExponent { j1, j2, e });
            let mut next = term;
            next.slots[k - 2] = self.tower.minus_one().pow(e as i128);
            next.slots[k - 1] = self.tower.uniformizer(self.tower.depth() - 1);
            self.replace(Rule::Diagonal, at, vec![next]);
            return Ok(true);
        }
        let j = self.pi_exp(&term.slots[k - 1]);
        if j != 1 {
            let mut next = term;
            next.coeff *= j as i64;
            next.slots[k - 1] = self.tower.uniformizer(self.tower.depth() - 1);
            self.replace(Rule::Multilinear, at, vec![next]);
            return Ok(true);
        }
        Ok(false)
    }

    /// Combines ramified terms sharing slots 2..k by multilinearity in the first slot.
    fn collect(&mut self) {
        if self.degree < 2 {
            return;
        }
        loop {
            let ramified: Vec<usize> =
                (0..self.state.len()).filter(|&i| self.pi_exp(self.state[i].slots.last().unwrap()) != 0).collect();
            // absorb coefficients into the first slot
            if let Some(&i) = ramified.iter().find(|&&i| self.state[i].coeff != 1) {
                let mut t = self.state[i].clone();
                t.slots[0] = t.slots[0].pow(t.coeff as i128);
                t.coeff = 1;
                self.replace(Rule::Multilinear, i, vec![t]);
                continue;
            }
            let pair = ramified.iter().enumerate().find_map(|(a, &i)| {
                ramified[a + 1..]
                    .iter()
                    .find(|&&j| self.state[i].slots[1..] == self.state[j].slots[1..])
                    .map(|&j| (i, j))
            });
            let Some((i, j)) = pair else { break };
            let mut merged = self.state[i].clone();
            merged.slots[0] = merged.slots[0].mul(&self.state[j].slots[0]).expect("same tower");
            let before = self.render();
            self.state.remove(j);
            self.state[i] = merged;
            let after = self.render();
            self.trace.push(TraceStep { rule: Rule::Multilinear, before, after });
        }
    }
}

fn swapped(term: &SymbolTerm, i: usize) -> SymbolTerm {
    let mut t = term.clone();
    t.slots.swap(i, i + 1);
    t.coeff = -t.coeff;
    t
}

/// Rewrites a symbol sum into units-only symbols plus symbols ending in `π = tn`,
/// applying the symbol relations one at a time and recording each step.
pub fn decompose_symbol_rewrite(sum: &SymbolSum) -> Result<SymbolRewrite> {
    let tower = Arc::clone(sum.tower());
    tower.require_full()?;
    if tower.depth() == 0 {
        return Err(Error::DepthTooSmall(1));
    }
    if sum.degree() == 0 {
        return Err(Error::Precondition("symbols must have at least one slot".into()));
    }
    let mut rw = Rewriter {
        tower: Arc::clone(&tower),
        degree: sum.degree(),
        state: sum.terms().to_vec(),
        trace: Vec::new(),
        diagonals: Vec::new(),
    };
    let mut i = 0;
    while i < rw.state.len() {
        if !rw.step(i)? {
            i += 1;
        }
    }
    rw.collect();

    let k = sum.degree();
    let mut units = SymbolSum::new(&tower, k);
    let mut ramified = SymbolSum::new(&tower, k);
    let mut residue = SymbolSum::new(&tower, k - 1);
    for t in &rw.state {
        if rw.pi_exp(&t.slots[k - 1]) == 0 {
            units.push(t.coeff, t.slots.clone())?;
        } else {
            ramified.push(t.coeff, t.slots.clone())?;
            residue.push(t.coeff, t.slots[..k - 1].to_vec())?;
        }
    }
    Ok(SymbolRewrite { units, ramified, residue, trace: rw.trace, diagonal_exponents: rw.diagonals })
}

/// `x = xi1 + xi2∧π + xi3∧δ + xi4∧π∧δ` for the last two uniformizers `π, δ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilocalDecomposition {
    pub xi1: CanonicalClass,
    pub xi2: CanonicalClass,
    pub xi3: CanonicalClass,
    pub xi4: CanonicalClass,
}

impl BilocalDecomposition {
    pub fn recombine(&self) -> Result<CanonicalClass> {
        let tower = self.xi1.tower();
        let n = tower.depth();
        let pi = uniformizer_class(tower, n - 2);
        let delta = uniformizer_class(tower, n - 1);
        // parts below their minimal degree are zero placeholders and are skipped
        let mut acc = self.xi1.clone();
        for part in [self.xi2.cup(&pi)?, self.xi3.cup(&delta)?, self.xi4.cup(&pi)?.cup(&delta)?] {
            if !part.is_zero() {
                acc = acc.add(&part)?;
            }
        }
        Ok(acc)
    }
}

/// Groups canonical monomials by their `{π, δ}` content.
pub fn bilocal_decompose_class(x: &CanonicalClass) -> Result<BilocalDecomposition> {
    let tower = x.tower();
    let n = tower.depth();
    if n < 2 {
        return Err(Error::DepthTooSmall(2));
    }
    let (pi, delta) = (generator_bit(n - 1), generator_bit(n));
    let k = x.degree();
    let part = |want_pi: bool, want_delta: bool, drop: usize| {
        let coeffs = x
            .coefficients()
            .iter()
            .filter(|(&s, _)| (s & pi != 0) == want_pi && (s & delta != 0) == want_delta)
            .map(|(&s, &a)| (s & !(pi | delta), a));
        CanonicalClass::from_coeffs(tower, k.saturating_sub(drop), coeffs)
    };
    let zero_if = |c: CanonicalClass, needed: usize| if k < needed { CanonicalClass::zero(tower, 0) } else { c };
    Ok(BilocalDecomposition {
        xi1: part(false, false, 0),
        xi2: zero_if(part(true, false, 1), 1),
        xi3: zero_if(part(false, true, 1), 1),
        xi4: zero_if(part(true, true, 2), 2),
    })
}

pub fn bilocal_decompose(sum: &SymbolSum) -> Result<BilocalDecomposition> {
    bilocal_decompose_class(&normalize(sum)?)
}

/// One line of the nodal-point chain.
#[derive(Debug, Clone)]
pub struct ChainLine {
    pub expression: String,
    pub class: CanonicalClass,
}

#[derive(Debug, Clone)]
pub struct Case2aReport {
    pub lines: Vec<ChainLine>,
    /// The correction term `(xi4, u, -π)`, zero by the vanishing of unramified classes.
    pub correction: CanonicalClass,
    /// The common slot element `g = u·π·δ`.
    pub g: ElementClass,
}

/// Verifies `(xi4, π, δ) = (xi4, -π, g)` with `g = u·π·δ` at a nodal point.
///
/// `π, δ` are the last two uniformizers. `xi4` must carry no `π, δ` content
/// and must be annihilated by cup product with unramified degree-one classes
/// (`-1` and `u`), which the two-base-slot rule guarantees when `xi4` lies in
/// the top degree of the base.
pub fn case2a_reduce(xi4: &CanonicalClass, u: &ElementClass) -> Result<Case2aReport> {
    let tower = xi4.tower();
    tower.require_full()?;
    let n = tower.depth();
    if n < 2 {
        return Err(Error::DepthTooSmall(2));
    }
    if u.tower() != tower {
        return Err(Error::TowerMismatch);
    }
    let (pi_bit, delta_bit) = (generator_bit(n - 1), generator_bit(n));
    if xi4.coefficients().keys().any(|&s| s & (pi_bit | delta_bit) != 0) {
        return Err(Error::Precondition("xi4 must not involve π or δ".into()));
    }
    if u.unif_exps()[n - 2] != 0 || u.unif_exps()[n - 1] != 0 {
        return Err(Error::Precondition("u must be a unit at the nodal point".into()));
    }
    let minus_one = CanonicalClass::from_element(&tower.minus_one());
    let u_class = CanonicalClass::from_element(u);
    if !xi4.cup(&minus_one)?.is_zero() || !xi4.cup(&u_class)?.is_zero() {
        return Err(Error::Precondition(
            "xi4 ∪ (-1) and xi4 ∪ (u) must vanish (xi4 in the top degree of the residue field)".into(),
        ));
    }

    let pi = tower.uniformizer(n - 2);
    let delta = tower.uniformizer(n - 1);
    let neg_pi = tower.minus_one().mul(&pi)?;
    let g = u.mul(&pi)?.mul(&delta)?;
    let cls = |a: &ElementClass| CanonicalClass::from_element(a);
    let triple = |a: &ElementClass, b: &ElementClass| -> Result<CanonicalClass> { xi4.cup(&cls(a))?.cup(&cls(b)) };

    let correction = triple(u, &neg_pi)?;
    let main = triple(&neg_pi, &g)?;
    let lines = vec![
        ChainLine { expression: "(xi4, π, δ)".into(), class: triple(&pi, &delta)? },
        ChainLine { expression: "(xi4, -π, πδ)".into(), class: triple(&neg_pi, &pi.mul(&delta)?)? },
        ChainLine { expression: "(xi4, -π, u^-1·g)".into(), class: triple(&neg_pi, &u.inv().mul(&g)?)? },
        ChainLine { expression: "(xi4, u, -π) + (xi4, -π, g)".into(), class: correction.add(&main)? },
        ChainLine { expression: "(xi4, -π, g)".into(), class: main },
    ];
    for (i, w) in lines.windows(2).enumerate() {
        if w[0].class != w[1].class {
            return Err(Error::IdentityFailure {
                step: i + 1,
                detail: format!("{} = {} but {} = {}", w[0].expression, w[0].class, w[1].expression, w[1].class),
            });
        }
    }
    Ok(Case2aReport { lines, correction, g })
}
