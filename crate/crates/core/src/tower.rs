//! Laurent-series towers `K = F_q((t1))...((tn))` and their Kummer class groups
//! `K^x / (K^x)^m`.
//!
//! The multiplicative group of the base field is modelled as the cyclic group
//! `Z/(q-1)` on a fixed generator `c`; principal units are `m`-divisible, so
//! every class is a monomial `c^a * t1^e1 * ... * tn^en`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

/// Name of the distinguished generator of the base multiplicative group.
pub const BASE_GENERATOR: &str = "c";

/// A tower `F_q((t1))...((tn))` together with the coefficient modulus `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldTower {
    q: u128,
    characteristic: u64,
    m: u64,
    names: Vec<String>,
    origin: Option<Arc<Origin>>,
}

/// How a tower was produced from another one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Origin {
    pub source: Arc<FieldTower>,
    pub kind: ExtensionKind,
}

/// Serialized form of a tower declaration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerDecl {
    pub q: u128,
    pub m: u64,
    pub uniformizers: Vec<String>,
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(ch) if ch.is_ascii_alphabetic() || ch == '_')
        && chars.all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
}

impl FieldTower {
    /// Builds a tower over `F_q` with the given uniformizer names.
    ///
    /// Towers with `m ∤ q - 1` are accepted but flagged: they support
    /// descent bookkeeping only, since `μ_m` is not in the base.
    pub fn new<S: AsRef<str>>(q: u64, m: u64, names: &[S]) -> Result<Self> {
        let (p, _) = arith::prime_power(q).ok_or(Error::InvalidBase(q))?;
        if m < 2 {
            return Err(Error::InvalidModulus(m));
        }
        if m.is_multiple_of(p) {
            return Err(Error::NonCoprimeModulus { m, p });
        }
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, name) in names.iter().enumerate() {
            if !valid_identifier(name) || name == BASE_GENERATOR || names[..i].contains(name) {
                return Err(Error::InvalidName(name.clone()));
            }
        }
        Ok(Self { q: q as u128, characteristic: p, m, names, origin: None })
    }

    pub fn from_decl(decl: &TowerDecl) -> Result<Self> {
        let q = u64::try_from(decl.q).map_err(|_| Error::Overflow)?;
        Self::new(q, decl.m, &decl.uniformizers)
    }

    pub fn decl(&self) -> TowerDecl {
        TowerDecl { q: self.q, m: self.m, uniformizers: self.names.clone() }
    }

    pub fn q(&self) -> u128 {
        self.q
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn depth(&self) -> usize {
        self.names.len()
    }

    pub fn uniformizer_names(&self) -> &[String] {
        &self.names
    }

    /// Order of the cyclic group `F_q^x`.
    pub fn base_group_order(&self) -> u128 {
        self.q - 1
    }

    /// True when `μ_m ⊂ F_q`, i.e. `m | q - 1`.
    pub fn full_calculus(&self) -> bool {
        (self.q - 1).is_multiple_of(self.m as u128)
    }

    /// Cohomological dimension: 1 for the finite base, plus one per level.
    pub fn cohomological_dimension(&self) -> usize {
        self.depth() + 1
    }

    /// Degree of the top cohomology group.
    pub fn top_degree(&self) -> usize {
        self.depth() + 1
    }

    /// Order of the base part `F_q^x / (F_q^x)^m`.
    pub fn base_class_order(&self) -> u64 {
        arith::gcd(self.m, ((self.q - 1) % self.m as u128) as u64)
    }

    pub fn origin(&self) -> Option<&Origin> {
        self.origin.as_deref()
    }

    pub fn require_full(&self) -> Result<()> {
        if self.full_calculus() {
            Ok(())
        } else {
            Err(Error::NotFullCalculus { q: self.q, m: self.m })
        }
    }

    /// Generator names in the fixed order `c < t1 < ... < tn`.
    pub fn generator_names(&self) -> Vec<&str> {
        std::iter::once(BASE_GENERATOR)
            .chain(self.names.iter().map(String::as_str))
            .collect()
    }

    /// Human-readable convention for the base generator, embedded in serialized output.
    pub fn generator_convention(&self) -> String {
        match u64::try_from(self.q).ok().and_then(arith::smallest_primitive_root) {
            Some(g) => format!("smallest primitive root (c = {g} mod {})", self.q),
            None => format!("fixed abstract generator c of F_{}^x", self.q),
        }
    }

    /// Same field, different coefficient modulus. Lineage is dropped.
    pub fn with_modulus(&self, m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidModulus(m));
        }
        if m.is_multiple_of(self.characteristic) {
            return Err(Error::NonCoprimeModulus { m, p: self.characteristic });
        }
        Ok(Self { q: self.q, characteristic: self.characteristic, m, names: self.names.clone(), origin: None })
    }

    /// The residue tower of the outermost valuation: drop the last uniformizer.
    pub fn residue_tower(&self) -> Result<Self> {
        if self.depth() == 0 {
            return Err(Error::DepthTooSmall(1));
        }
        let mut t = self.with_modulus(self.m)?;
        t.names.pop();
        Ok(t)
    }

    /// Structural equality ignoring lineage.
    pub fn same_field(&self, other: &Self) -> bool {
        self.q == other.q && self.m == other.m && self.names == other.names
    }

    pub fn identity(self: &Arc<Self>) -> ElementClass {
        ElementClass { tower: Arc::clone(self), base: 0, unif: vec![0; self.depth()] }
    }

    /// Class of `c^base * prod t_i^{unif_i}`, exponents reduced.
    pub fn element(self: &Arc<Self>, base: i128, unif: &[i128]) -> Result<ElementClass> {
        if unif.len() != self.depth() {
            return Err(Error::ArityMismatch { expected: self.depth(), got: unif.len() });
        }
        Ok(ElementClass {
            tower: Arc::clone(self),
            base: arith::reduce(base, self.base_class_order()),
            unif: unif.iter().map(|&e| arith::reduce(e, self.m)).collect(),
        })
    }

    /// The class of `c`.
    pub fn base_generator(self: &Arc<Self>) -> ElementClass {
        let mut x = self.identity();
        x.base = 1 % self.base_class_order();
        x
    }

    /// The class of the uniformizer `t_{index+1}`.
    pub fn uniformizer(self: &Arc<Self>, index: usize) -> ElementClass {
        let mut x = self.identity();
        x.unif[index] = 1;
        x
    }

    /// Exponent of `-1 = c^((q-1)/2)` on the base generator, reduced mod `m`.
    pub fn minus_one_exponent(&self) -> u64 {
        if self.q.is_multiple_of(2) {
            // characteristic 2: -1 = 1
            0
        } else {
            (((self.q - 1) / 2) % self.base_class_order() as u128) as u64
        }
    }

    /// The class of `-1`; trivial whenever `m` is odd.
    pub fn minus_one(self: &Arc<Self>) -> ElementClass {
        let mut x = self.identity();
        x.base = self.minus_one_exponent();
        x
    }

    pub fn random_element<R: Rng + ?Sized>(self: &Arc<Self>, rng: &mut R) -> ElementClass {
        ElementClass {
            tower: Arc::clone(self),
            base: rng.random_range(0..self.base_class_order()),
            unif: (0..self.depth()).map(|_| rng.random_range(0..self.m)).collect(),
        }
    }

    /// Every class of the group, in lexicographic exponent order.
    pub fn all_elements(self: &Arc<Self>) -> Vec<ElementClass> {
        let mut out = vec![self.identity()];
        let mut radices = vec![self.base_class_order()];
        radices.extend(std::iter::repeat_n(self.m, self.depth()));
        let total: u64 = radices.iter().product();
        out.reserve(total as usize);
        for mut idx in 1..total {
            let mut x = self.identity();
            for (slot, &r) in radices.iter().enumerate().rev() {
                let e = idx % r;
                idx /= r;
                if slot == 0 {
                    x.base = e;
                } else {
                    x.unif[slot - 1] = e;
                }
            }
            out.push(x);
        }
        out
    }
}

impl fmt::Display for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)?;
        for name in &self.names {
            write!(f, "(({name}))")?;
        }
        write!(f, " mod {}", self.m)
    }
}

/// A class in `K^x / (K^x)^m`, stored as its exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ElementClass {
    tower: Arc<FieldTower>,
    base: u64,
    unif: Vec<u64>,
}

impl ElementClass {
    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn base_exp(&self) -> u64 {
        self.base
    }

    pub fn unif_exps(&self) -> &[u64] {
        &self.unif
    }

    pub fn is_identity(&self) -> bool {
        self.base == 0 && self.unif.iter().all(|&e| e == 0)
    }

    /// True when the class has no uniformizer content.
    pub fn is_base_unit(&self) -> bool {
        self.unif.iter().all(|&e| e == 0)
    }

    /// Coefficients over the generator basis `c, t1, ..., tn`, as elements of `Z/m`.
    ///
    /// For full-calculus towers the base part is already an element of `Z/m`.
    pub fn coordinates(&self) -> Vec<u64> {
        std::iter::once(self.base).chain(self.unif.iter().copied()).collect()
    }

    fn check_tower(&self, other: &Self) -> Result<()> {
        if self.tower == other.tower {
            Ok(())
        } else {
            Err(Error::TowerMismatch)
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_tower(other)?;
        let t = &self.tower;
        Ok(Self {
            tower: Arc::clone(t),
            base: (self.base + other.base) % t.base_class_order(),
            unif: self.unif.iter().zip(&other.unif).map(|(a, b)| (a + b) % t.m).collect(),
        })
    }

    pub fn inv(&self) -> Self {
        self.pow(-1)
    }

    pub fn pow(&self, k: i128) -> Self {
        let t = &self.tower;
        Self {
            tower: Arc::clone(t),
            base: arith::reduce(self.base as i128 * k, t.base_class_order()),
            unif: self.unif.iter().map(|&e| arith::reduce(e as i128 * k, t.m)).collect(),
        }
    }

    /// Splits `u * t_n^j` into the unit part `u` and the exponent `j` of the outermost uniformizer.
    pub fn split_outermost(&self) -> Option<(Self, u64)> {
        let n = self.tower.depth();
        if n == 0 {
            return None;
        }
        let mut unit = self.clone();
        let j = unit.unif[n - 1];
        unit.unif[n - 1] = 0;
        Some((unit, j))
    }

    /// Re-homes the same exponent vector on another tower with identical shape.
    pub(crate) fn rehome(&self, tower: &Arc<FieldTower>) -> Self {
        Self {
            tower: Arc::clone(tower),
            base: self.base % tower.base_class_order(),
            unif: self.unif.iter().map(|&e| e % tower.m).collect(),
        }
    }
}

impl fmt::Display for ElementClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut factors = Vec::new();
        let names = self.tower.generator_names();
        for (name, e) in names.iter().zip(self.coordinates()) {
            match e {
                0 => {}
                1 => factors.push(name.to_string()),
                _ => factors.push(format!("{name}^{e}")),
            }
        }
        if factors.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", factors.join("*"))
        }
    }
}

/// One field-extension move.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtensionKind {
    /// Adjoin a `degree`-th root of the uniformizer at `index`.
    RamifiedKummer { index: usize, degree: u64 },
    /// Adjoin a `degree`-th root of a base unit; realized as a residue enlargement.
    UnramifiedKummer { radicand: ElementClass, degree: u64 },
    /// Replace `F_q` by `F_{q^degree}`.
    ResidueEnlarge { degree: u64 },
}

impl ExtensionKind {
    pub fn degree(&self) -> u64 {
        match self {
            Self::RamifiedKummer { degree, .. }
            | Self::UnramifiedKummer { degree, .. }
            | Self::ResidueEnlarge { degree } => *degree,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::RamifiedKummer { .. } => "ramified_kummer",
            Self::UnramifiedKummer { .. } => "unramified_kummer",
            Self::ResidueEnlarge { .. } => "residue_enlarge",
        }
    }
}

/// Serialized form of an extension step.
#[derive(Debug, Clone, Serialize)]
pub struct StepJson {
    pub kind: &'static str,
    pub degree: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniformizer: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radicand: Option<String>,
    pub target: TowerDecl,
}

/// An extension step with its source and target towers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionStep {
    kind: ExtensionKind,
    source: Arc<FieldTower>,
    target: Arc<FieldTower>,
}

impl ExtensionStep {
    pub fn new(source: &Arc<FieldTower>, kind: ExtensionKind) -> Result<Self> {
        let mut target = FieldTower::clone(source);
        match &kind {
            ExtensionKind::RamifiedKummer { index, degree } => {
                check_kummer_degree(*degree, source.m)?;
                if *index >= source.depth() {
                    return Err(Error::DepthTooSmall(index + 1));
                }
            }
            ExtensionKind::UnramifiedKummer { radicand, degree } => {
                check_kummer_degree(*degree, source.m)?;
                if radicand.tower() != source {
                    return Err(Error::TowerMismatch);
                }
                if !radicand.is_base_unit() {
                    return Err(Error::NonUnitRadicand);
                }
                target.q = enlarged_q(source.q, *degree)?;
            }
            ExtensionKind::ResidueEnlarge { degree } => {
                if *degree == 0 {
                    return Err(Error::InvalidDegree { degree: 0, reason: "must be positive" });
                }
                target.q = enlarged_q(source.q, *degree)?;
            }
        }
        target.origin = Some(Arc::new(Origin { source: Arc::clone(source), kind: kind.clone() }));
        Ok(Self { kind, source: Arc::clone(source), target: Arc::new(target) })
    }

    pub fn kind(&self) -> &ExtensionKind {
        &self.kind
    }

    pub fn degree(&self) -> u64 {
        self.kind.degree()
    }

    pub fn source(&self) -> &Arc<FieldTower> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FieldTower> {
        &self.target
    }

    pub fn to_json(&self) -> StepJson {
        let (uniformizer, radicand) = match &self.kind {
            ExtensionKind::RamifiedKummer { index, .. } => (Some(self.source.names[*index].clone()), None),
            ExtensionKind::UnramifiedKummer { radicand, .. } => (None, Some(radicand.to_string())),
            ExtensionKind::ResidueEnlarge { .. } => (None, None),
        };
        StepJson { kind: self.kind.label(), degree: self.degree(), uniformizer, radicand, target: self.target.decl() }
    }

    /// Multipliers of the induced map on generators `c, t1, ..., tn`:
    /// each generator maps to a multiple of the corresponding target generator.
    pub fn generator_multipliers(&self) -> Vec<u64> {
        let n = self.source.depth();
        let m = self.source.m;
        let mut mult = vec![1 % m; n + 1];
        match &self.kind {
            ExtensionKind::RamifiedKummer { index, degree } => mult[index + 1] = degree % m,
            ExtensionKind::UnramifiedKummer { degree, .. } | ExtensionKind::ResidueEnlarge { degree } => {
                // compatible generators: c = c'^((q^d - 1)/(q - 1))
                mult[0] = arith::geometric_sum_mod(self.source.q, *degree, m as u128) as u64;
            }
        }
        mult
    }

    /// Image of a class under the inclusion of multiplicative groups.
    pub fn apply(&self, class: &ElementClass) -> Result<ElementClass> {
        if class.tower() != &self.source {
            return Err(Error::TowerMismatch);
        }
        let mult = self.generator_multipliers();
        let t = &self.target;
        Ok(ElementClass {
            tower: Arc::clone(t),
            base: (class.base as u128 * mult[0] as u128 % t.base_class_order() as u128) as u64,
            unif: class
                .unif
                .iter()
                .zip(&mult[1..])
                .map(|(&e, &k)| (e as u128 * k as u128 % t.m as u128) as u64)
                .collect(),
        })
    }

    /// For unramified Kummer steps: checks that the radicand becomes a
    /// `d`-th power in `F_{q^d}^x`, using the exact exponent in the cyclic
    /// group of order `q^d - 1`.
    pub fn certify_radicand(&self) -> Option<bool> {
        let ExtensionKind::UnramifiedKummer { radicand, degree } = &self.kind else {
            return None;
        };
        // exponent of c' is a * (1 + q + ... + q^(d-1)) modulo q^d - 1
        let order = self.target.q - 1;
        let s = arith::geometric_sum_mod(self.source.q, *degree, order);
        let exponent = arith::mul_mod(radicand.base as u128, s, order);
        Some(exponent.is_multiple_of(*degree as u128))
    }
}

fn check_kummer_degree(degree: u64, m: u64) -> Result<()> {
    if degree < 2 {
        return Err(Error::InvalidDegree { degree, reason: "Kummer steps need degree > 1" });
    }
    if !m.is_multiple_of(degree) {
        return Err(Error::InvalidDegree { degree, reason: "Kummer degree must divide m" });
    }
    Ok(())
}

fn enlarged_q(q: u128, degree: u64) -> Result<u128> {
    let exp = u32::try_from(degree).map_err(|_| Error::Overflow)?;
    q.checked_pow(exp).ok_or(Error::Overflow)
}

/// Applies a chain of extension kinds starting from `tower`.
pub fn build_chain(tower: &Arc<FieldTower>, kinds: &[ExtensionKind]) -> Result<Vec<ExtensionStep>> {
    let mut current = Arc::clone(tower);
    let mut steps = Vec::with_capacity(kinds.len());
    for kind in kinds {
        let kind = match kind {
            // radicands must live on the current tower
            ExtensionKind::UnramifiedKummer { radicand, degree } => ExtensionKind::UnramifiedKummer {
                radicand: radicand.rehome(&current),
                degree: *degree,
            },
            other => other.clone(),
        };
        let step = ExtensionStep::new(&current, kind)?;
        current = Arc::clone(step.target());
        steps.push(step);
    }
    Ok(steps)
}

/// Norm map on classes back down a residue enlargement.
///
/// With compatible generators the norm of `c'` is `c`, and each uniformizer
/// (defined over the source) has norm `t^d`.
pub fn corestrict_base(class: &ElementClass) -> Result<ElementClass> {
    let origin = class.tower().origin().ok_or(Error::NotDescendable)?;
    let degree = match &origin.kind {
        ExtensionKind::ResidueEnlarge { degree } | ExtensionKind::UnramifiedKummer { degree, .. } => *degree,
        ExtensionKind::RamifiedKummer { .. } => return Err(Error::NotDescendable),
    };
    let source = &origin.source;
    Ok(ElementClass {
        tower: Arc::clone(source),
        base: class.base % source.base_class_order(),
        unif: class.unif.iter().map(|&e| (e as u128 * degree as u128 % source.m as u128) as u64).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tower(q: u64, m: u64, names: &[&str]) -> Arc<FieldTower> {
        Arc::new(FieldTower::new(q, m, names).unwrap())
    }

    #[test]
    fn build_tower_examples() {
        let t = FieldTower::new(7, 2, &["t"]).unwrap();
        assert_eq!(t.depth(), 1);
        assert!(t.full_calculus());
        assert_eq!(t.cohomological_dimension(), 2);

        let t = FieldTower::new(7, 6, &["t1", "t2"]).unwrap();
        assert!(t.full_calculus());
        assert_eq!(t.cohomological_dimension(), 3);

        assert_eq!(FieldTower::new(7, 7, &["t"]), Err(Error::NonCoprimeModulus { m: 7, p: 7 }));
        assert_eq!(FieldTower::new(6, 5, &["t"]), Err(Error::InvalidBase(6)));
        assert!(!FieldTower::new(7, 5, &["t"]).unwrap().full_calculus());
        assert!(FieldTower::new(7, 2, &["t", "t"]).is_err());
        assert!(FieldTower::new(7, 2, &["c"]).is_err());
    }

    #[test]
    fn element_reduction_and_group_law() {
        let t = tower(7, 2, &["t"]);
        let x = t.element(3, &[0]).unwrap();
        assert_eq!((x.base_exp(), x.unif_exps()), (1, &[0][..]));
        assert_eq!(t.element(3, &[]).unwrap_err(), Error::ArityMismatch { expected: 1, got: 0 });

        let t = tower(13, 6, &["t1", "t2"]);
        let x = t.element(5, &[-1, 7]).unwrap();
        assert!(x.mul(&x.inv()).unwrap().is_identity());
        assert!(x.pow(6).is_identity());
    }

    #[test]
    fn minus_one_classes() {
        // 3 generates F_7^x and 3^3 = 27 = -1 mod 7
        assert_eq!(arith::pow_mod(3, 3, 7), 6);
        let t = tower(7, 2, &["t"]);
        assert_eq!(t.minus_one().coordinates(), vec![1, 0]);
        assert!(tower(7, 3, &["t"]).minus_one().is_identity());

        // discrete log of -1 base 2 in F_13^x is 6
        let log = (0..12).find(|&k| arith::pow_mod(2, k, 13) == 12).unwrap();
        assert_eq!(log, 6);
        assert_eq!(tower(13, 4, &["t"]).minus_one().base_exp(), log % 4);
    }

    #[test]
    fn ramified_kummer_kills_uniformizer() {
        let t = tower(7, 6, &["t1", "t2"]);
        let step = ExtensionStep::new(&t, ExtensionKind::RamifiedKummer { index: 1, degree: 6 }).unwrap();
        let img = step.apply(&t.uniformizer(1)).unwrap();
        assert!(img.is_identity());
        let img = step.apply(&t.element(1, &[1, 1]).unwrap()).unwrap();
        assert_eq!(img.coordinates(), vec![1, 1, 0]);
    }

    #[test]
    fn residue_enlarge_multiplies_base() {
        let t = tower(7, 6, &["t"]);
        for d in 1..5u64 {
            let step = ExtensionStep::new(&t, ExtensionKind::ResidueEnlarge { degree: d }).unwrap();
            // 1 + 7 + ... + 7^(d-1) summed directly
            let direct: u64 = (0..d).map(|i| 7u64.pow(i as u32)).sum::<u64>() % 6;
            assert_eq!(direct, d % 6);
            let img = step.apply(&t.base_generator()).unwrap();
            assert_eq!(img.base_exp(), direct);
            assert_eq!(step.target().q(), 7u128.pow(d as u32));
        }
    }

    #[test]
    fn unramified_kummer_certifies_radicand() {
        let t = tower(7, 6, &["t"]);
        for a in 0..6 {
            let u = t.element(a, &[0]).unwrap();
            let step = ExtensionStep::new(&t, ExtensionKind::UnramifiedKummer { radicand: u.clone(), degree: 3 }).unwrap();
            assert_eq!(step.certify_radicand(), Some(true));
            let img = step.apply(&u).unwrap();
            assert_eq!(img.base_exp(), (a as u64 * 3) % 6);
            assert_eq!(img.base_exp() % 3, 0);
        }
        let bad = ExtensionStep::new(&t, ExtensionKind::UnramifiedKummer { radicand: t.uniformizer(0), degree: 2 });
        assert_eq!(bad.unwrap_err(), Error::NonUnitRadicand);
    }

    #[test]
    fn kummer_degree_validation() {
        let t = tower(7, 6, &["t"]);
        assert!(ExtensionStep::new(&t, ExtensionKind::RamifiedKummer { index: 0, degree: 4 }).is_err());
        assert!(ExtensionStep::new(&t, ExtensionKind::RamifiedKummer { index: 0, degree: 1 }).is_err());
        assert!(ExtensionStep::new(&t, ExtensionKind::RamifiedKummer { index: 1, degree: 2 }).is_err());
    }

    #[test]
    fn apply_rejects_foreign_class() {
        let t = tower(7, 6, &["t"]);
        let other = tower(13, 6, &["t"]);
        let step = ExtensionStep::new(&t, ExtensionKind::ResidueEnlarge { degree: 2 }).unwrap();
        assert_eq!(step.apply(&other.base_generator()), Err(Error::TowerMismatch));
    }

    #[test]
    fn corestriction_examples() {
        let t = tower(7, 6, &["t"]);
        let step = ExtensionStep::new(&t, ExtensionKind::ResidueEnlarge { degree: 2 }).unwrap();
        let x = t.element(1, &[0]).unwrap();
        let back = corestrict_base(&step.apply(&x).unwrap()).unwrap();
        assert_eq!(back, t.element(2, &[0]).unwrap());
        assert!(corestrict_base(&step.target().identity()).unwrap().is_identity());
        assert_eq!(corestrict_base(&x), Err(Error::NotDescendable));

        // ℓ = 3, d = 2: cor∘res = ×2 = -1 on Z/3
        let t = tower(7, 3, &["t"]);
        let step = ExtensionStep::new(&t, ExtensionKind::ResidueEnlarge { degree: 2 }).unwrap();
        let x = t.element(1, &[1]).unwrap();
        assert_eq!(corestrict_base(&step.apply(&x).unwrap()).unwrap(), x.inv());
    }

    #[test]
    fn cor_res_exhaustive_small() {
        for (q, m) in [(7, 2), (7, 3), (7, 6), (13, 4), (13, 6)] {
            for depth in 0..=2 {
                let names: Vec<String> = (1..=depth).map(|i| format!("t{i}")).collect();
                let t = Arc::new(FieldTower::new(q, m, &names).unwrap());
                for d in 1..=3 {
                    let step = ExtensionStep::new(&t, ExtensionKind::ResidueEnlarge { degree: d }).unwrap();
                    for x in t.all_elements() {
                        let back = corestrict_base(&step.apply(&x).unwrap()).unwrap();
                        assert_eq!(back, x.pow(d as i128));
                    }
                }
            }
        }
    }

    #[test]
    fn all_elements_enumerates_group() {
        let t = tower(7, 3, &["a", "b"]);
        let all = t.all_elements();
        assert_eq!(all.len(), 27);
        let distinct: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 27);
    }

    #[test]
    fn display_forms() {
        let t = tower(7, 6, &["t1", "t2"]);
        assert_eq!(t.element(3, &[1, -1]).unwrap().to_string(), "c^3*t1*t2^5");
        assert_eq!(t.identity().to_string(), "1");
    }
}
