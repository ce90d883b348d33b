//! Independent ground truth over the rationals.
//!
//! Local Hilbert symbols are decided by exhaustive residue search plus Hensel
//! lifting, with no Legendre-symbol shortcuts, so that agreement with the
//! symbolic engine is meaningful evidence.

mod hilbert;
mod tate;

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub use hilbert::{hilbert_symbol, is_local_square, quaternion_ramification, PlaceSet, QuaternionInput};
pub use tate::{tate_common_slot, PlaceCheck, TateSolution};

/// A place of `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Prime(u64),
    Real,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(p) => write!(f, "{p}"),
            Place::Real => write!(f, "inf"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl std::str::FromStr for Place {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "real" | "oo" => Ok(Place::Real),
            _ => match s.parse::<u64>() {
                Ok(p) if crate::arith::is_prime(p) => Ok(Place::Prime(p)),
                _ => Err(Error::Precondition(format!("{s:?} is not a place of Q"))),
            },
        }
    }
}

/// Direct evaluation of the tame symbol of `a = u·π^α`, `b = v·π^β` over a
/// local field with residue field `F_q`, as the exponent of the result on the
/// base generator modulo `m`. Units are given by their exponents on that generator.
///
/// The result is the class of `(-1)^{αβ} u^β v^{-α}`.
pub fn tame_symbol_oracle(a: (i64, i64), b: (i64, i64), q: u64, m: u64) -> Result<u64> {
    let order = q.checked_sub(1).filter(|&o| o > 0).ok_or(Error::InvalidBase(q))?;
    if m == 0 || order % m != 0 {
        return Err(Error::ModulusMismatch { m, order });
    }
    let (alpha, u) = (a.0 as i128, a.1 as i128);
    let (beta, v) = (b.0 as i128, b.1 as i128);
    // -1 is the element of order 2 in the cyclic group, or 1 in characteristic 2
    let minus_one = if q.is_multiple_of(2) { 0 } else { (order / 2) as i128 };
    let exponent = minus_one * alpha * beta + u * beta - v * alpha;
    Ok(crate::arith::reduce(exponent, m))
}
