//! Exact mod-`m` Galois-symbol calculus over iterated Laurent-series towers
//! `F_q((t1))...((tn))`.
//!
//! Classes in `H^k(K, μ_m)` are kept in a canonical basis of wedge monomials,
//! which makes equality, residues, restriction and splitting decidable. The
//! [`numoracle`] module supplies independent p-adic ground truth.

pub mod arith;
pub mod error;
pub mod numoracle;
pub mod parse;
pub mod residue;
pub mod splitting;
pub mod symcalc;
pub mod tower;

pub use error::{Error, Result};
pub use numoracle::{
    hilbert_symbol, quaternion_ramification, tame_symbol_oracle, tate_common_slot, Place, PlaceSet, QuaternionInput,
    TateSolution,
};
pub use parse::{parse_element, parse_symbol_expr};
pub use residue::{
    bilocal_decompose, case2a_reduce, decompose, decompose_symbol_rewrite, residue, residue_map,
    BilocalDecomposition, Case2aReport, Decomposition, Rule, SymbolRewrite, TraceStep,
};
pub use splitting::{
    common_slot_local, cyclotomic_descent, descent_enlargement, index_bounds, split_composite,
    split_composite_with_order, split_top, CommonSlot, DescentReport, IndexBounds, SplittingCertificate,
};
pub use symcalc::{normalize, normalize_report, CanonicalClass, Monomial, NormalizeReport, SymbolSum, SymbolTerm};
pub use tower::{build_chain, ElementClass, ExtensionKind, ExtensionStep, FieldTower, TowerDecl, BASE_GENERATOR};
