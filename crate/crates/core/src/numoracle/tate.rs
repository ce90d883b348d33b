use std::collections::BTreeMap;

use serde::Serialize;

use super::hilbert::{is_local_square, quaternion_ramification, PlaceSet, QuaternionInput};
use super::Place;
use crate::arith;
use crate::error::{Error, Result};

/// Outcome of the local check at one ramified place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PlaceCheck {
    pub place: Place,
    pub nonsquare: bool,
}

/// A quadratic field `Q(√d)` splitting every algebra of the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TateSolution {
    pub d: i64,
    pub ramification: Vec<(QuaternionInput, PlaceSet)>,
    pub verification: Vec<PlaceCheck>,
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TateJson {
    pub d: i64,
    pub ramification: BTreeMap<String, PlaceSet>,
    pub verification: Vec<PlaceCheck>,
    pub verified: bool,
}

impl TateSolution {
    /// Union of the ramification sets.
    pub fn ramified_places(&self) -> PlaceSet {
        self.ramification.iter().fold(PlaceSet::new(), |acc, (_, r)| acc.union(r))
    }

    /// Recomputes ramification and the local checks from scratch.
    pub fn verify(&self) -> bool {
        let union = self.ramified_places();
        let fresh = self.ramification.iter().all(|(qa, r)| quaternion_ramification(qa).as_ref() == Ok(r));
        let local = union
            .iter()
            .all(|place| !is_local_square(self.d, place).unwrap_or(true));
        fresh && local && arith::is_squarefree(self.d) && (self.d != 1 || union.is_empty())
    }

    pub fn to_json(&self) -> TateJson {
        TateJson {
            d: self.d,
            ramification: self.ramification.iter().map(|(qa, r)| (qa.to_string(), r.clone())).collect(),
            verification: self.verification.clone(),
            verified: self.verified,
        }
    }
}

fn nonsquare_everywhere(d: i64, places: &PlaceSet) -> Result<bool> {
    for place in places.iter() {
        if is_local_square(d, place)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Finds a squarefree `d` that is a nonsquare at every ramified place of every
/// algebra, so that `Q(√d)` splits them all.
///
/// Candidates are scanned by increasing `|d|`, negative first. Constraints at
/// the finitely many places are congruence conditions, so the admissible set
/// is a union of residue classes modulo `8·∏p` (with a sign condition), and
/// it contains primes; the scan therefore terminates.
pub fn tate_common_slot(algebras: &[QuaternionInput]) -> Result<TateSolution> {
    if algebras.is_empty() {
        return Err(Error::EmptyInput);
    }
    let ramification = algebras
        .iter()
        .map(|qa| Ok((*qa, quaternion_ramification(qa)?)))
        .collect::<Result<Vec<_>>>()?;
    let union = ramification.iter().fold(PlaceSet::new(), |acc, (_, r)| acc.union(r));
    let d = if union.is_empty() {
        1
    } else {
        let mut found = None;
        'search: for n in 1i64.. {
            for d in [-n, n] {
                if d != 1 && arith::is_squarefree(d) && nonsquare_everywhere(d, &union)? {
                    found = Some(d);
                    break 'search;
                }
            }
        }
        found.ok_or(Error::Overflow)?
    };
    let verification = union
        .iter()
        .map(|place| Ok(PlaceCheck { place, nonsquare: !is_local_square(d, place)? }))
        .collect::<Result<Vec<_>>>()?;
    let mut solution = TateSolution { d, ramification, verification, verified: false };
    solution.verified = solution.verify();
    Ok(solution)
}
