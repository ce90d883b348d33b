//! Splitting fields for top-degree classes.
//!
//! `H^{n+1}` of a depth-`n` tower is cyclic, generated by `x_{c,t1,...,tn}`,
//! and adjoining an `r`-th root of `tn` multiplies it by `r`. Prime moduli
//! therefore split with a single ramified Kummer step; composite moduli go
//! through the reduce-then-lift induction on the number of prime factors.

use std::sync::Arc;

use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::symcalc::{ClassJson, CanonicalClass};
use crate::tower::{
    build_chain, corestrict_base, ExtensionKind, ExtensionStep, FieldTower, StepJson,
};

/// A chain of extensions together with the restricted class after each step.
#[derive(Debug, Clone)]
pub struct SplittingCertificate {
    pub input: CanonicalClass,
    pub chain: Vec<ExtensionStep>,
    pub degree: u64,
    pub period: u64,
    /// Canonical form of the restriction after each step.
    pub restricted: Vec<CanonicalClass>,
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateJson {
    pub input: ClassJson,
    pub chain: Vec<StepJson>,
    pub degree: u64,
    pub period: u64,
    pub verified: bool,
}

impl SplittingCertificate {
    fn build(input: &CanonicalClass, chain: Vec<ExtensionStep>) -> Result<Self> {
        let mut restricted = Vec::with_capacity(chain.len());
        let mut current = input.clone();
        for step in &chain {
            current = current.restrict(step)?;
            restricted.push(current.clone());
        }
        let degree = chain.iter().map(ExtensionStep::degree).product();
        let verified = current.is_zero() && degree <= input.tower().modulus();
        Ok(Self { input: input.clone(), chain, degree, period: input.period(), restricted, verified })
    }

    /// Rebuilds the chain from its kinds and re-checks every claim.
    pub fn verify(&self) -> bool {
        let kinds: Vec<ExtensionKind> = self.chain.iter().map(|s| s.kind().clone()).collect();
        let Ok(chain) = build_chain(self.input.tower(), &kinds) else {
            return false;
        };
        let degree: u64 = chain.iter().map(ExtensionStep::degree).product();
        let mut current = self.input.clone();
        for (step, recorded) in chain.iter().zip(&self.restricted) {
            match current.restrict(step) {
                Ok(next) if next.equals(recorded) => current = next,
                _ => return false,
            }
        }
        chain.len() == self.restricted.len()
            && current.is_zero()
            && degree == self.degree
            && degree <= self.input.tower().modulus()
            && self.period == self.input.period()
    }

    /// The class over the top of the chain.
    pub fn final_class(&self) -> &CanonicalClass {
        self.restricted.last().unwrap_or(&self.input)
    }

    pub fn degrees(&self) -> Vec<u64> {
        self.chain.iter().map(ExtensionStep::degree).collect()
    }

    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            input: self.input.to_json(),
            chain: self.chain.iter().map(ExtensionStep::to_json).collect(),
            degree: self.degree,
            period: self.period,
            verified: self.verified,
        }
    }
}

fn check_top(x: &CanonicalClass) -> Result<()> {
    let top = x.tower().top_degree();
    if x.degree() != top {
        return Err(Error::NotTopDegree { got: x.degree(), top });
    }
    x.tower().require_full()
}

/// The step multiplying the top generator by `degree`: a root of `tn`, or an
/// unramified step on the bare finite field.
fn killing_kind(tower: &FieldTower, degree: u64) -> ExtensionKind {
    match tower.depth() {
        0 => ExtensionKind::ResidueEnlarge { degree },
        n => ExtensionKind::RamifiedKummer { index: n - 1, degree },
    }
}

/// Splits a top-degree class with a chain of total degree at most `m`.
pub fn split_top(x: &CanonicalClass) -> Result<SplittingCertificate> {
    check_top(x)?;
    let m = x.tower().modulus();
    if !arith::is_prime(m) {
        return split_composite(x);
    }
    let kinds = if x.is_zero() { vec![] } else { vec![killing_kind(x.tower(), m)] };
    SplittingCertificate::build(x, build_chain(x.tower(), &kinds)?)
}

/// Composite-modulus splitting with the primes taken in ascending order.
pub fn split_composite(x: &CanonicalClass) -> Result<SplittingCertificate> {
    let m = x.tower().modulus();
    split_composite_with_order(x, &arith::prime_factors(m))
}

/// Composite-modulus splitting with an explicit order of the prime factors of `m`.
///
/// The last prime `ℓ` is peeled off: with `s = m / ℓ`, the class reduced mod
/// `s` is split recursively over `L1`, the restriction to `L1` then lifts to
/// `μ_ℓ` coefficients, and one more step of degree `ℓ` kills the lift.
pub fn split_composite_with_order(x: &CanonicalClass, order: &[u64]) -> Result<SplittingCertificate> {
    check_top(x)?;
    let m = x.tower().modulus();
    if arith::is_prime(m) {
        return Err(Error::NotComposite(m));
    }
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != arith::prime_factors(m) {
        return Err(Error::Precondition(format!("{order:?} is not an ordering of the prime factors of {m}")));
    }
    let kinds = composite_kinds(x, order)?;
    SplittingCertificate::build(x, build_chain(x.tower(), &kinds)?)
}

fn composite_kinds(x: &CanonicalClass, order: &[u64]) -> Result<Vec<ExtensionKind>> {
    let tower = x.tower();
    if x.is_zero() {
        return Ok(vec![]);
    }
    let Some((&l, rest)) = order.split_last() else {
        return Ok(vec![]);
    };
    if rest.is_empty() {
        return Ok(vec![killing_kind(tower, l)]);
    }
    let s = tower.modulus() / l;
    let mut kinds = composite_kinds(&x.coeff_reduce(s)?, rest)?;
    let over_l1 = x.restrict_chain(&build_chain(tower, &kinds)?)?;
    let eta = over_l1.coeff_lift(s)?;
    if !eta.is_zero() {
        kinds.push(killing_kind(tower, l));
    }
    Ok(kinds)
}

/// Period, certified upper bound for the index, and whether they agree.
#[derive(Debug, Clone)]
pub struct IndexBounds {
    pub period: u64,
    pub constructed_degree: u64,
    pub equal: bool,
    pub certificate: SplittingCertificate,
}

/// Splits the class at its exact period: `x = (m/p)·y` with `y` over `μ_p`,
/// and the chain splitting `y` is replayed on the original tower.
pub fn index_bounds(x: &CanonicalClass) -> Result<IndexBounds> {
    check_top(x)?;
    let m = x.tower().modulus();
    let period = x.period();
    let kinds = if period == 1 {
        vec![]
    } else {
        let y = x.coeff_lift(m / period)?;
        composite_kinds(&y, &arith::prime_factors(period))?
    };
    let certificate = SplittingCertificate::build(x, build_chain(x.tower(), &kinds)?)?;
    Ok(IndexBounds {
        period,
        constructed_degree: certificate.degree,
        equal: certificate.verified && certificate.degree == period,
        certificate,
    })
}

/// One extension splitting a whole family of top-degree classes.
#[derive(Debug, Clone)]
pub struct CommonSlot {
    pub classes: Vec<CanonicalClass>,
    /// `None` when every class is already zero.
    pub step: Option<ExtensionStep>,
    pub degree: u64,
    pub restricted: Vec<CanonicalClass>,
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommonSlotJson {
    pub classes: Vec<ClassJson>,
    pub step: Option<StepJson>,
    pub degree: u64,
    pub verified: bool,
}

impl CommonSlot {
    pub fn to_json(&self) -> CommonSlotJson {
        CommonSlotJson {
            classes: self.classes.iter().map(CanonicalClass::to_json).collect(),
            step: self.step.as_ref().map(ExtensionStep::to_json),
            degree: self.degree,
            verified: self.verified,
        }
    }
}

/// A single root of `tn` of degree `lcm` of the periods splits every class.
pub fn common_slot_local(classes: &[CanonicalClass]) -> Result<CommonSlot> {
    let first = classes.first().ok_or(Error::EmptyInput)?;
    let tower = first.tower();
    for x in classes {
        if x.tower() != tower {
            return Err(Error::TowerMismatch);
        }
        if x.degree() != first.degree() {
            return Err(Error::MixedDegrees);
        }
    }
    check_top(first)?;
    let degree = classes.iter().fold(1, |acc, x| arith::lcm(acc, x.period()));
    let step = if degree > 1 { Some(ExtensionStep::new(tower, killing_kind(tower, degree))?) } else { None };
    let restricted = classes
        .iter()
        .map(|x| match &step {
            Some(step) => x.restrict(step),
            None => Ok(x.clone()),
        })
        .collect::<Result<Vec<_>>>()?;
    let verified = restricted.iter().all(CanonicalClass::is_zero) && degree <= tower.modulus();
    Ok(CommonSlot { classes: classes.to_vec(), step, degree, restricted, verified })
}

/// Outcome of an exhaustive `cor ∘ res = ×d` check along a residue enlargement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ContractCheck {
    pub elements_checked: usize,
    pub classes_checked: usize,
    pub holds: bool,
}

/// Upper bound on the number of classes enumerated per degree before
/// falling back to the basis monomials (the maps are linear).
const EXHAUSTIVE_LIMIT: u64 = 4096;

/// Checks `cor ∘ res = ×d` for `F_q -> F_{q^d}` on `source`.
///
/// On element classes the check always runs; on cohomology it runs only when
/// `μ_m ⊂ F_q`, where both sides are representable.
pub fn cor_res_contract(source: &Arc<FieldTower>, d: u64) -> Result<ContractCheck> {
    let step = ExtensionStep::new(source, ExtensionKind::ResidueEnlarge { degree: d })?;
    let mut holds = true;
    let mut elements_checked = 0;
    for a in source.all_elements() {
        let back = corestrict_base(&step.apply(&a)?)?;
        holds &= back == a.pow(d as i128);
        elements_checked += 1;
    }
    let mut classes_checked = 0;
    if source.full_calculus() {
        for degree in 0..=source.top_degree() {
            let dim = crate::symcalc::monomials_of_degree(source.depth(), degree).len() as u32;
            let classes = match source.modulus().checked_pow(dim) {
                Some(total) if total <= EXHAUSTIVE_LIMIT => CanonicalClass::enumerate(source, degree),
                _ => crate::symcalc::monomials_of_degree(source.depth(), degree)
                    .into_iter()
                    .map(|s| {
                        let gens: Vec<usize> = crate::symcalc::monomial_indices(s).collect();
                        CanonicalClass::basis(source, &gens)
                    })
                    .collect::<Result<Vec<_>>>()?,
            };
            for x in classes {
                let back = x.restrict(&step)?.corestrict()?;
                holds &= back.equals(&x.scale(d as i128));
                classes_checked += 1;
            }
        }
    }
    Ok(ContractCheck { elements_checked, classes_checked, holds })
}

/// Verified inference that a class split over `K'(ℓ√π)` is already split over `K(ℓ√π)`,
/// where `K' = K ⊗ F_{q^d}` contains `μ_ℓ`.
#[derive(Debug, Clone)]
pub struct DescentReport {
    pub q: u128,
    pub ell: u64,
    pub d: u64,
    pub gcd: u64,
    pub d_inverse: u64,
    pub enlargement: ExtensionStep,
    pub certificate: SplittingCertificate,
    /// Contract checks on `K` and on `K(ℓ√π)`.
    pub contract: Vec<ContractCheck>,
    pub conclusion_degree: u64,
    pub valid: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DescentJson {
    pub q: u128,
    pub ell: u64,
    pub d: u64,
    pub gcd: u64,
    pub d_inverse: u64,
    pub enlargement: StepJson,
    pub certificate: CertificateJson,
    pub contract: Vec<ContractCheck>,
    pub conclusion_degree: u64,
    pub valid: bool,
}

impl DescentReport {
    pub fn to_json(&self) -> DescentJson {
        DescentJson {
            q: self.q,
            ell: self.ell,
            d: self.d,
            gcd: self.gcd,
            d_inverse: self.d_inverse,
            enlargement: self.enlargement.to_json(),
            certificate: self.certificate.to_json(),
            contract: self.contract.clone(),
            conclusion_degree: self.conclusion_degree,
            valid: self.valid,
        }
    }
}

/// The enlargement `F_q -> F_{q^d}`, `d = ord_ℓ(q)`, adjoining `μ_ℓ` to a tower
/// with prime modulus `ℓ ∤ q - 1`.
pub fn descent_enlargement(small: &Arc<FieldTower>) -> Result<ExtensionStep> {
    let ell = small.modulus();
    if !arith::is_prime(ell) {
        return Err(Error::Precondition(format!("descent needs a prime modulus, got {ell}")));
    }
    if small.full_calculus() {
        return Err(Error::Precondition(format!("{ell} divides q - 1: the base already contains μ_{ell}")));
    }
    let q_mod = (small.q() % ell as u128) as u64;
    let d = arith::multiplicative_order(q_mod, ell).ok_or(Error::GcdFailure { d: 0, l: ell })?;
    ExtensionStep::new(small, ExtensionKind::ResidueEnlarge { degree: d })
}

/// Descent along the residue enlargement adjoining `μ_ℓ`.
///
/// `x` is a top-degree class over the enlarged tower. Its splitting certificate
/// there, together with `cor ∘ res = ×d` and `d` invertible mod `ℓ`, shows the
/// corresponding class over `K(ℓ√π)` vanishes.
pub fn cyclotomic_descent(small: &Arc<FieldTower>, x: &CanonicalClass) -> Result<DescentReport> {
    let enlargement = descent_enlargement(small)?;
    let ell = small.modulus();
    let d = enlargement.degree();
    let gcd = arith::gcd(d, ell);
    if gcd != 1 {
        return Err(Error::GcdFailure { d, l: ell });
    }
    let d_inverse = (1..ell).find(|k| d * k % ell == 1).ok_or(Error::GcdFailure { d, l: ell })?;
    let big = enlargement.target();
    let x = x.rehome(big)?;
    let certificate = split_top(&x)?;
    let mut contract = vec![cor_res_contract(small, d)?];
    if small.depth() > 0 {
        let root = ExtensionStep::new(small, killing_kind(small, ell))?;
        contract.push(cor_res_contract(root.target(), d)?);
    }
    let valid = certificate.verified && contract.iter().all(|c| c.holds);
    Ok(DescentReport {
        q: small.q(),
        ell,
        d,
        gcd,
        d_inverse,
        enlargement,
        certificate,
        contract,
        conclusion_degree: ell,
        valid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcalc::CanonicalClass;

    fn tower(q: u64, m: u64, names: &[&str]) -> Arc<FieldTower> {
        Arc::new(FieldTower::new(q, m, names).unwrap())
    }

    fn top(t: &Arc<FieldTower>, a: i128) -> CanonicalClass {
        let gens: Vec<usize> = (0..=t.depth()).collect();
        CanonicalClass::basis(t, &gens).unwrap().scale(a)
    }

    #[test]
    fn prime_modulus_single_step() {
        let t = tower(7, 3, &["t"]);
        let cert = split_top(&top(&t, 1)).unwrap();
        assert_eq!(cert.degrees(), vec![3]);
        assert!(cert.verified && cert.verify());
        assert!(matches!(cert.chain[0].kind(), ExtensionKind::RamifiedKummer { index: 0, degree: 3 }));

        let zero = split_top(&top(&t, 0)).unwrap();
        assert!(zero.chain.is_empty());
        assert_eq!(zero.degree, 1);
    }

    #[test]
    fn depth_two_quadratic() {
        let t = tower(7, 2, &["t1", "t2"]);
        let cert = split_top(&top(&t, 1)).unwrap();
        assert!(matches!(cert.chain[0].kind(), ExtensionKind::RamifiedKummer { index: 1, degree: 2 }));
        assert!(cert.final_class().is_zero());
    }

    #[test]
    fn composite_orders() {
        let t = tower(7, 6, &["t"]);
        let x = top(&t, 1);
        let asc = split_composite_with_order(&x, &[2, 3]).unwrap();
        let desc = split_composite_with_order(&x, &[3, 2]).unwrap();
        assert_eq!(asc.degrees(), vec![2, 3]);
        assert_eq!(desc.degrees(), vec![3, 2]);
        assert!(asc.verify() && desc.verify());

        let half = split_composite(&top(&t, 3)).unwrap();
        assert_eq!(half.degrees(), vec![2]);
        let third = split_composite(&top(&t, 2)).unwrap();
        assert_eq!(third.degrees(), vec![3]);
        assert!(matches!(split_composite_with_order(&x, &[2, 2]), Err(Error::Precondition(_))));
        let prime = tower(7, 3, &["t"]);
        assert_eq!(split_composite(&top(&prime, 1)).unwrap_err(), Error::NotComposite(3));
    }

    #[test]
    fn period_equals_index() {
        let t = tower(7, 6, &["t1", "t2"]);
        for a in 0..6 {
            let b = index_bounds(&top(&t, a)).unwrap();
            assert!(b.equal, "coefficient {a}");
            assert_eq!(b.period, 6 / arith::gcd(6, a as u64));
        }
        let t = tower(13, 4, &["t"]);
        let b = index_bounds(&top(&t, 2)).unwrap();
        assert_eq!((b.period, b.constructed_degree), (2, 2));
    }

    #[test]
    fn not_top_degree() {
        let t = tower(7, 2, &["t"]);
        let x = CanonicalClass::basis(&t, &[1]).unwrap();
        assert_eq!(split_top(&x).unwrap_err(), Error::NotTopDegree { got: 1, top: 2 });
    }

    #[test]
    fn base_field_only() {
        let t = tower(7, 3, &[] as &[&str]);
        let cert = split_top(&top(&t, 1)).unwrap();
        assert!(matches!(cert.chain[0].kind(), ExtensionKind::ResidueEnlarge { degree: 3 }));
        assert!(cert.verified);
    }

    #[test]
    fn common_slot_all_classes() {
        let t = tower(7, 3, &["t1", "t2"]);
        let all = CanonicalClass::enumerate(&t, 3);
        assert_eq!(all.len(), 3);
        let slot = common_slot_local(&all).unwrap();
        assert_eq!(slot.degree, 3);
        assert!(slot.verified);

        let zero = common_slot_local(&[top(&t, 0)]).unwrap();
        assert!(zero.step.is_none());
        assert_eq!(zero.degree, 1);

        let low = CanonicalClass::basis(&t, &[1, 2]).unwrap();
        assert_eq!(common_slot_local(&[top(&t, 1), low]).unwrap_err(), Error::MixedDegrees);
        assert_eq!(common_slot_local(&[]).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn descent_examples() {
        let small = tower(7, 5, &["t"]);
        let big = Arc::clone(descent_enlargement(&small).unwrap().target());
        let report = cyclotomic_descent(&small, &top(&big, 1)).unwrap();
        assert_eq!((report.d, report.gcd, report.d_inverse), (4, 1, 4));
        assert!(report.valid);
        assert_eq!(report.conclusion_degree, 5);

        let small = tower(5, 3, &["t"]);
        assert_eq!(descent_enlargement(&small).unwrap().degree(), 2);

        let wrong = tower(7, 3, &["t"]);
        assert!(matches!(descent_enlargement(&wrong), Err(Error::Precondition(_))));
    }

    #[test]
    fn contract_on_full_towers() {
        for (q, m) in [(7, 2), (7, 3), (7, 6), (13, 4)] {
            for d in 1..4 {
                let c = cor_res_contract(&tower(q, m, &["t1", "t2"]), d).unwrap();
                assert!(c.holds && c.classes_checked > 0, "q={q} m={m} d={d}");
            }
        }
    }
}
