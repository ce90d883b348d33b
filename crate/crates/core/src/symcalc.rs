//! Formal symbol sums and their canonical normal form.
//!
//! Over a full-calculus tower, `H^k(K, μ_m)` is free over `Z/m` on the
//! wedge monomials `x_S` for `k`-subsets `S` of the generators
//! `c < t1 < ... < tn`. Products of degree-one generators obey
//!
//! * `x_i x_j = -x_j x_i`,
//! * `x_i x_i = (-1, x_i) = e * x_c x_i` where `-1 = c^e`,
//! * any monomial with two base slots vanishes (`H^2` of a finite field is zero).
//!
//! A monomial is stored as a bitmask: bit 0 is `c`, bit `i` is `t_i`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::tower::{ElementClass, ExtensionKind, ExtensionStep, FieldTower, TowerDecl};

pub type Monomial = u32;

pub const BASE_BIT: Monomial = 1;

pub fn generator_bit(index: usize) -> Monomial {
    1 << index
}

/// Indices of the generators in a monomial, ascending.
pub fn monomial_indices(s: Monomial) -> impl Iterator<Item = usize> {
    (0..Monomial::BITS as usize).filter(move |&i| s & (1 << i) != 0)
}

fn sign(parity: u32, m: u64) -> u64 {
    if parity.is_multiple_of(2) {
        1 % m
    } else {
        m - 1
    }
}

/// Right multiplication of a sorted monomial by one generator.
///
/// Returns the resulting monomial and its coefficient in `Z/m`, or `None`
/// when the product vanishes.
pub(crate) fn mul_generator(s: Monomial, g: usize, minus_one: u64, m: u64) -> Option<(Monomial, u64)> {
    let bit = generator_bit(g);
    let greater = (s >> (g + 1)).count_ones();
    if s & bit == 0 {
        return Some((s | bit, sign(greater, m)));
    }
    // repeated generator: x_g x_g = e * x_c x_g, killed if c already present
    if g == 0 || s & BASE_BIT != 0 || minus_one == 0 {
        return None;
    }
    let less = (s & (bit - 1)).count_ones();
    let coeff = minus_one * sign(greater + less, m) % m;
    (coeff != 0).then_some((s | BASE_BIT, coeff))
}

/// Product `x_s * x_t` of two sorted monomials.
pub(crate) fn mul_monomials(s: Monomial, t: Monomial, minus_one: u64, m: u64) -> Option<(Monomial, u64)> {
    let mut acc = (s, 1 % m);
    for g in monomial_indices(t) {
        let (next, k) = mul_generator(acc.0, g, minus_one, m)?;
        acc = (next, acc.1 * k % m);
    }
    (acc.1 != 0).then_some(acc)
}

/// One term `coeff * (a_1, ..., a_k)` of a symbol sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolTerm {
    pub coeff: i64,
    pub slots: Vec<ElementClass>,
}

/// A formal integer combination of degree-`k` symbols. Purely syntactic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSum {
    tower: Arc<FieldTower>,
    degree: usize,
    terms: Vec<SymbolTerm>,
}

impl SymbolSum {
    pub fn new(tower: &Arc<FieldTower>, degree: usize) -> Self {
        Self { tower: Arc::clone(tower), degree, terms: Vec::new() }
    }

    /// A single symbol `(a_1, ..., a_k)`.
    pub fn symbol(tower: &Arc<FieldTower>, slots: Vec<ElementClass>) -> Result<Self> {
        let mut s = Self::new(tower, slots.len());
        s.push(1, slots)?;
        Ok(s)
    }

    pub fn push(&mut self, coeff: i64, slots: Vec<ElementClass>) -> Result<()> {
        if slots.len() != self.degree {
            return Err(Error::DegreeMismatch(self.degree, slots.len()));
        }
        if slots.iter().any(|a| a.tower() != &self.tower) {
            return Err(Error::TowerMismatch);
        }
        self.terms.push(SymbolTerm { coeff, slots });
        Ok(())
    }

    pub fn extend(&mut self, other: SymbolSum) -> Result<()> {
        if other.tower != self.tower {
            return Err(Error::TowerMismatch);
        }
        if other.degree != self.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        self.terms.extend(other.terms);
        Ok(())
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[SymbolTerm] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<SymbolTerm> {
        self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(mut self, k: i64) -> Self {
        for t in &mut self.terms {
            t.coeff *= k;
        }
        self
    }

    /// Random sum of `len` symbols with coefficients in `[1, m)`.
    pub fn random<R: Rng + ?Sized>(tower: &Arc<FieldTower>, degree: usize, len: usize, rng: &mut R) -> Self {
        let mut s = Self::new(tower, degree);
        for _ in 0..len {
            let coeff = rng.random_range(1..tower.modulus()) as i64;
            let slots = (0..degree).map(|_| tower.random_element(rng)).collect();
            s.terms.push(SymbolTerm { coeff, slots });
        }
        s
    }
}

impl fmt::Display for SymbolSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, term) in self.terms.iter().enumerate() {
            let slots: Vec<String> = term.slots.iter().map(ToString::to_string).collect();
            let body = format!("({})", slots.join(", "));
            let c = term.coeff;
            match (i, c) {
                (0, 1) => write!(f, "{body}")?,
                (0, _) => write!(f, "{c}*{body}")?,
                (_, 1) => write!(f, " + {body}")?,
                (_, -1) => write!(f, " - {body}")?,
                (_, c) if c < 0 => write!(f, " - {}*{body}", c.unsigned_abs())?,
                (_, c) => write!(f, " + {c}*{body}")?,
            }
        }
        Ok(())
    }
}

/// Normal form of a class in `H^k(K, μ_m)`: nonzero coefficients on wedge monomials.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalClass {
    tower: Arc<FieldTower>,
    degree: usize,
    coeffs: BTreeMap<Monomial, u64>,
}

/// Output of [`normalize_report`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizeReport {
    pub class: CanonicalClass,
    /// Set when the input degree exceeds the top degree (the class is then zero).
    pub degree_overflow: bool,
    /// Number of nonzero basis monomials: an upper bound for the symbol length.
    pub symbol_length_bound: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassJson {
    pub tower: TowerDecl,
    pub degree: usize,
    pub coeffs: BTreeMap<String, u64>,
    pub generator_convention: String,
}

impl CanonicalClass {
    pub fn zero(tower: &Arc<FieldTower>, degree: usize) -> Self {
        Self { tower: Arc::clone(tower), degree, coeffs: BTreeMap::new() }
    }

    /// Degree-zero class `a` in `H^0 = Z/m`.
    pub fn scalar(tower: &Arc<FieldTower>, a: i128) -> Self {
        Self::from_coeffs(tower, 0, [(0, arith::reduce(a, tower.modulus()))])
    }

    /// Basis monomial on the given generator indices (0 = `c`), with sign from sorting.
    pub fn basis(tower: &Arc<FieldTower>, generators: &[usize]) -> Result<Self> {
        let m = tower.modulus();
        let mut acc = Self::scalar(tower, 1);
        for &g in generators {
            if g > tower.depth() {
                return Err(Error::DepthTooSmall(g));
            }
            acc = acc.cup(&Self::from_coeffs(tower, 1, [(generator_bit(g), 1 % m)]))?;
        }
        Ok(acc)
    }

    /// Degree-one class of an element.
    pub fn from_element(a: &ElementClass) -> Self {
        let coords = a.coordinates();
        Self::from_coeffs(a.tower(), 1, coords.into_iter().enumerate().map(|(g, e)| (generator_bit(g), e)))
    }

    pub(crate) fn from_coeffs(
        tower: &Arc<FieldTower>,
        degree: usize,
        coeffs: impl IntoIterator<Item = (Monomial, u64)>,
    ) -> Self {
        let m = tower.modulus();
        let mut map = BTreeMap::new();
        for (s, a) in coeffs {
            debug_assert_eq!(s.count_ones() as usize, degree);
            let entry = map.entry(s).or_insert(0);
            *entry = (*entry + a) % m;
        }
        map.retain(|_, a| *a != 0);
        Self { tower: Arc::clone(tower), degree, coeffs: map }
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> &BTreeMap<Monomial, u64> {
        &self.coeffs
    }

    pub fn coefficient(&self, s: Monomial) -> u64 {
        self.coeffs.get(&s).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Equality as cohomology classes (same tower and degree).
    pub fn equals(&self, other: &Self) -> bool {
        self == other
    }

    /// Dimension of `H^degree` as a free `Z/m`-module.
    pub fn dimension(&self) -> u64 {
        binomial(self.tower.depth() as u64 + 1, self.degree as u64)
    }

    /// Order of the class in the `m`-torsion group.
    pub fn period(&self) -> u64 {
        let m = self.tower.modulus();
        let g = self.coeffs.values().fold(m, |g, &a| arith::gcd(g, a));
        m / g
    }

    pub fn symbol_length_bound(&self) -> usize {
        self.coeffs.len()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.tower != other.tower {
            return Err(Error::TowerMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_coeffs(
            &self.tower,
            self.degree,
            self.coeffs.iter().chain(&other.coeffs).map(|(&s, &a)| (s, a)),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, r: i128) -> Self {
        let m = self.tower.modulus();
        let r = arith::reduce(r, m);
        Self::from_coeffs(&self.tower, self.degree, self.coeffs.iter().map(|(&s, &a)| (s, a * r % m)))
    }

    /// Cup product; zero above the top degree.
    pub fn cup(&self, other: &Self) -> Result<Self> {
        if self.tower != other.tower {
            return Err(Error::TowerMismatch);
        }
        let m = self.tower.modulus();
        let e = self.tower.minus_one_exponent() % m;
        let mut out = Vec::new();
        for (&s, &a) in &self.coeffs {
            for (&t, &b) in &other.coeffs {
                if let Some((u, k)) = mul_monomials(s, t, e, m) {
                    out.push((u, a * b % m * k % m));
                }
            }
        }
        Ok(Self::from_coeffs(&self.tower, self.degree + other.degree, out))
    }

    /// Re-serializes the class as a sum of basis symbols.
    pub fn to_symbol_sum(&self) -> SymbolSum {
        let mut sum = SymbolSum::new(&self.tower, self.degree);
        let gens: Vec<ElementClass> = (0..=self.tower.depth())
            .map(|g| if g == 0 { self.tower.base_generator() } else { self.tower.uniformizer(g - 1) })
            .collect();
        for (&s, &a) in &self.coeffs {
            let slots = monomial_indices(s).map(|g| gens[g].clone()).collect();
            sum.terms.push(SymbolTerm { coeff: a as i64, slots });
        }
        sum
    }

    /// Reduction along `μ_m -> μ_s`: coefficients mod `s`, over the same field with modulus `s`.
    pub fn coeff_reduce(&self, s: u64) -> Result<Self> {
        let m = self.tower.modulus();
        if s < 2 || !m.is_multiple_of(s) {
            return Err(Error::InvalidModulus(s));
        }
        let tower = Arc::new(self.tower.with_modulus(s)?);
        Ok(Self::from_coeffs(&tower, self.degree, self.coeffs.iter().map(|(&k, &a)| (k, a % s))))
    }

    /// Lift of a class killed by reduction mod `s` to coefficients in `Z/(m/s)`.
    pub fn coeff_lift(&self, s: u64) -> Result<Self> {
        let m = self.tower.modulus();
        if s == 0 || !m.is_multiple_of(s) || m / s < 2 {
            return Err(Error::InvalidModulus(s));
        }
        if let Some(&a) = self.coeffs.values().find(|&&a| a % s != 0) {
            return Err(Error::NotLiftable { coeff: a, divisor: s });
        }
        let tower = Arc::new(self.tower.with_modulus(m / s)?);
        Ok(Self::from_coeffs(&tower, self.degree, self.coeffs.iter().map(|(&k, &a)| (k, a / s))))
    }

    /// Inclusion `Z/ℓ -> Z/m`, `a ↦ s·a`, back onto the given modulus-`m` tower.
    pub fn coeff_include(&self, tower: &Arc<FieldTower>) -> Result<Self> {
        let l = self.tower.modulus();
        let m = tower.modulus();
        if !m.is_multiple_of(l) || !self.tower.same_field(&tower.with_modulus(l)?) {
            return Err(Error::TowerMismatch);
        }
        let s = m / l;
        Ok(Self::from_coeffs(tower, self.degree, self.coeffs.iter().map(|(&k, &a)| (k, a * s % m))))
    }

    /// Moves the same coefficients onto a tower with identical shape and modulus.
    pub(crate) fn rehome(&self, tower: &Arc<FieldTower>) -> Result<Self> {
        if !self.tower.same_field(tower) {
            return Err(Error::TowerMismatch);
        }
        Ok(Self { tower: Arc::clone(tower), degree: self.degree, coeffs: self.coeffs.clone() })
    }

    /// Restriction along one extension step.
    pub fn restrict(&self, step: &ExtensionStep) -> Result<Self> {
        if &self.tower != step.source() {
            return Err(Error::TowerMismatch);
        }
        let m = self.tower.modulus();
        let mult = step.generator_multipliers();
        Ok(Self::from_coeffs(
            step.target(),
            self.degree,
            self.coeffs
                .iter()
                .map(|(&s, &a)| (s, monomial_indices(s).fold(a, |acc, g| acc * mult[g] % m))),
        ))
    }

    pub fn restrict_chain(&self, steps: &[ExtensionStep]) -> Result<Self> {
        steps.iter().try_fold(self.clone(), |x, step| x.restrict(step))
    }

    /// Corestriction down a residue enlargement of degree `d`.
    ///
    /// By the projection formula, monomials carrying `c` keep their
    /// coefficient and monomials without `c` are multiplied by `d`.
    pub fn corestrict(&self) -> Result<Self> {
        let origin = self.tower.origin().ok_or(Error::NotDescendable)?;
        let d = match &origin.kind {
            ExtensionKind::ResidueEnlarge { degree } | ExtensionKind::UnramifiedKummer { degree, .. } => *degree,
            ExtensionKind::RamifiedKummer { .. } => return Err(Error::NotDescendable),
        };
        let source = &origin.source;
        source.require_full()?;
        let m = source.modulus();
        Ok(Self::from_coeffs(
            source,
            self.degree,
            self.coeffs
                .iter()
                .map(|(&s, &a)| (s, if s & BASE_BIT != 0 { a } else { a * (d % m) % m })),
        ))
    }

    pub fn monomial_label(&self, s: Monomial) -> String {
        monomial_label(&self.tower, s)
    }

    pub fn to_json(&self) -> ClassJson {
        ClassJson {
            tower: self.tower.decl(),
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(&s, &a)| (self.monomial_label(s), a)).collect(),
            generator_convention: self.tower.generator_convention(),
        }
    }

    /// Every class of the given degree, coefficient vectors in lexicographic order.
    pub fn enumerate(tower: &Arc<FieldTower>, degree: usize) -> Vec<Self> {
        let m = tower.modulus();
        let basis = monomials_of_degree(tower.depth(), degree);
        let total = m.pow(basis.len() as u32);
        (0..total)
            .map(|mut idx| {
                let coeffs: Vec<_> = basis
                    .iter()
                    .map(|&s| {
                        let a = idx % m;
                        idx /= m;
                        (s, a)
                    })
                    .collect();
                Self::from_coeffs(tower, degree, coeffs)
            })
            .collect()
    }

    /// Random class of the given degree.
    pub fn random<R: Rng + ?Sized>(tower: &Arc<FieldTower>, degree: usize, rng: &mut R) -> Self {
        let m = tower.modulus();
        let coeffs: Vec<_> = monomials_of_degree(tower.depth(), degree)
            .into_iter()
            .map(|s| (s, rng.random_range(0..m)))
            .collect();
        Self::from_coeffs(tower, degree, coeffs)
    }
}

impl fmt::Display for CanonicalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(&s, &a)| format!("{a}*{{{}}}", self.monomial_label(s)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn monomial_label(tower: &FieldTower, s: Monomial) -> String {
    let names = tower.generator_names();
    monomial_indices(s).map(|g| names[g]).collect::<Vec<_>>().join(",")
}

/// All monomials of the given degree over a tower of depth `depth`.
pub fn monomials_of_degree(depth: usize, degree: usize) -> Vec<Monomial> {
    let gens = depth + 1;
    (0..(1u64 << gens))
        .map(|s| s as Monomial)
        .filter(|s| s.count_ones() as usize == degree)
        .collect()
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Canonical form of a symbol sum, by multilinear expansion and rewriting.
pub fn normalize(sum: &SymbolSum) -> Result<CanonicalClass> {
    normalize_report(sum).map(|r| r.class)
}

pub fn normalize_report(sum: &SymbolSum) -> Result<NormalizeReport> {
    let tower = sum.tower();
    tower.require_full()?;
    let m = tower.modulus();
    let e = tower.minus_one_exponent() % m;
    let mut total: BTreeMap<Monomial, u64> = BTreeMap::new();
    for term in sum.terms() {
        let mut state: BTreeMap<Monomial, u64> = BTreeMap::new();
        let c0 = arith::reduce(term.coeff as i128, m);
        if c0 == 0 {
            continue;
        }
        state.insert(0, c0);
        for slot in &term.slots {
            let coords = slot.coordinates();
            let mut next: BTreeMap<Monomial, u64> = BTreeMap::new();
            for (&s, &a) in &state {
                for (g, &k) in coords.iter().enumerate() {
                    if k == 0 {
                        continue;
                    }
                    if let Some((u, sgn)) = mul_generator(s, g, e, m) {
                        let v = next.entry(u).or_insert(0);
                        *v = (*v + a * k % m * sgn) % m;
                    }
                }
            }
            next.retain(|_, a| *a != 0);
            state = next;
            if state.is_empty() {
                break;
            }
        }
        for (s, a) in state {
            let v = total.entry(s).or_insert(0);
            *v = (*v + a) % m;
        }
    }
    let class = CanonicalClass::from_coeffs(tower, sum.degree(), total);
    Ok(NormalizeReport {
        symbol_length_bound: class.symbol_length_bound(),
        degree_overflow: sum.degree() > tower.top_degree(),
        class,
    })
}

/// Restriction of an element-level extension to a symbol sum, slot by slot.
pub fn restrict_sum(sum: &SymbolSum, step: &ExtensionStep) -> Result<SymbolSum> {
    let mut out = SymbolSum::new(step.target(), sum.degree());
    for term in sum.terms() {
        let slots = term.slots.iter().map(|a| step.apply(a)).collect::<Result<Vec<_>>>()?;
        out.push(term.coeff, slots)?;
    }
    Ok(out)
}
