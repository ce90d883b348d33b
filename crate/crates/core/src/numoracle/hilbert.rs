use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use super::Place;
use crate::arith;
use crate::error::{Error, Result};

/// Hilbert symbol `(a, b)_v`: `+1` iff `z² = a x² + b y²` has a nonzero solution in `Q_v`.
pub fn hilbert_symbol(a: i64, b: i64, place: Place) -> Result<i8> {
    if a == 0 || b == 0 {
        return Err(Error::ZeroInput);
    }
    Ok(match place {
        Place::Real => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        Place::Prime(p) => {
            if isotropic([a as i128, b as i128, -1], p as i128) {
                1
            } else {
                -1
            }
        }
    })
}

fn strip_squares(mut c: i128, p: i128) -> i128 {
    while c % (p * p) == 0 {
        c /= p * p;
    }
    c
}

/// Decides whether `c0 x² + c1 y² + c2 z²` is isotropic over `Q_p`.
///
/// After stripping squares and, if two coefficients are divisible by `p`,
/// rescaling the form by `p`, at most one coefficient has valuation one. Then
/// the form is isotropic iff it has a zero modulo `p` (modulo 8 when `p = 2`)
/// in which some variable with a unit coefficient is itself a unit: Hensel's
/// lemma lifts such a zero, and a primitive zero always reduces to one.
fn isotropic(coeffs: [i128; 3], p: i128) -> bool {
    let mut c = coeffs.map(|x| strip_squares(x, p));
    if c.iter().filter(|&&x| x % p == 0).count() >= 2 {
        c = c.map(|x| strip_squares(x * p, p));
    }
    let modulus = if p == 2 { 8 } else { p };
    let r = c.map(|x| x.rem_euclid(modulus));
    let unit_coeff = c.map(|x| x % p != 0);
    let is_unit = |x: i128| x % p != 0;

    // which values c2 z² takes, with any z and with a unit z
    let mut any_root = vec![false; modulus as usize];
    let mut unit_root = vec![false; modulus as usize];
    for z in 0..modulus {
        let v = (r[2] * z * z % modulus) as usize;
        any_root[v] = true;
        if is_unit(z) {
            unit_root[v] = true;
        }
    }
    for x in 0..modulus {
        for y in 0..modulus {
            let v = (-(r[0] * x * x + r[1] * y * y)).rem_euclid(modulus) as usize;
            let xy_unit = (unit_coeff[0] && is_unit(x)) || (unit_coeff[1] && is_unit(y));
            if (xy_unit && any_root[v]) || (unit_coeff[2] && unit_root[v]) {
                return true;
            }
        }
    }
    false
}

/// Whether the nonzero integer `d` is a square in `Q_v`, by residue search.
pub fn is_local_square(d: i64, place: Place) -> Result<bool> {
    if d == 0 {
        return Err(Error::ZeroInput);
    }
    let p = match place {
        Place::Real => return Ok(d > 0),
        Place::Prime(p) => p as i128,
    };
    let mut u = d as i128;
    let mut v = 0;
    while u % p == 0 {
        u /= p;
        v += 1;
    }
    if v % 2 == 1 {
        return Ok(false);
    }
    let modulus = if p == 2 { 8 } else { p };
    let target = u.rem_euclid(modulus);
    Ok((1..modulus).filter(|x| x % p != 0).any(|x| x * x % modulus == target))
}

/// A quaternion algebra `(a, b)` over `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuaternionInput {
    pub a: i64,
    pub b: i64,
}

impl QuaternionInput {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::ZeroInput);
        }
        Ok(Self { a, b })
    }

    /// The squarefree representatives of the two slots.
    pub fn normalized(&self) -> (i64, i64) {
        (arith::squarefree_part(self.a), arith::squarefree_part(self.b))
    }

    /// Places where a local symbol can be nontrivial: 2, the primes dividing `ab`, and the real place.
    pub fn candidate_places(&self) -> Vec<Place> {
        let (a, b) = self.normalized();
        let mut primes = BTreeSet::from([2u64]);
        for n in [a, b] {
            primes.extend(arith::factorize(n.unsigned_abs()).into_iter().map(|(p, _)| p));
        }
        primes.into_iter().map(Place::Prime).chain([Place::Real]).collect()
    }
}

impl fmt::Display for QuaternionInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// A finite set of places of `Q`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PlaceSet {
    places: BTreeSet<Place>,
}

impl PlaceSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, place: Place) {
        self.places.insert(place);
    }

    pub fn contains(&self, place: Place) -> bool {
        self.places.contains(&place)
    }

    pub fn len(&self) -> usize {
        self.places.len()
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Place> + '_ {
        self.places.iter().copied()
    }

    pub fn union(&self, other: &Self) -> Self {
        Self { places: self.places.union(&other.places).copied().collect() }
    }

    pub fn labels(&self) -> Vec<String> {
        self.iter().map(|p| p.to_string()).collect()
    }
}

impl FromIterator<Place> for PlaceSet {
    fn from_iter<I: IntoIterator<Item = Place>>(iter: I) -> Self {
        Self { places: iter.into_iter().collect() }
    }
}

impl Serialize for PlaceSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.places.iter())
    }
}

/// Places where `(a, b)` is a division algebra. An odd count means an oracle bug.
pub fn quaternion_ramification(qa: &QuaternionInput) -> Result<PlaceSet> {
    let (a, b) = qa.normalized();
    let mut out = PlaceSet::new();
    for place in qa.candidate_places() {
        if hilbert_symbol(a, b, place)? == -1 {
            out.insert(place);
        }
    }
    if out.len() % 2 == 1 {
        return Err(Error::ReciprocityViolation(out.labels()));
    }
    Ok(out)
}
