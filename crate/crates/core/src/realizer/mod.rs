//! Basis changes that make a lumping matrix nonnegative or real.
//!
//! Given a full-rank `Q`, find a nonsingular `P` such that `PQ >= 0`
//! ([`exists_nonneg_p`], decided exactly for two rows) or `PQ` is real
//! ([`exists_real_p`]).

mod nonneg;
mod real;

pub use nonneg::{
    classify_columns, classify_pair, exists_nonneg_p, feasible_cone, verify_nonneg_witness, ConeRegion, SignCase,
    SignPattern,
};
pub use real::{build_real_coefficient_matrix, exists_real_p, p_from_parts, real_witness_product, RealSearch};

use alloc::vec::Vec;

use crate::linalg::{Matrix, C64};

/// Why no suitable `P` exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Infeasibility {
    /// Two columns point in exactly opposite directions.
    PairRule,
    /// Three columns whose sign cases exclude a solution for any magnitudes.
    TripleRule,
    /// Columns of cases 2, 3, 5 and 8 together.
    Quadruple2358,
    /// Three columns whose half-planes meet only at the origin because of
    /// their slopes.
    SlopeRule,
    /// The feasible set has no interior but no small certificate was found.
    DegenerateCone,
    /// Row entries of `Q` do not share one sign (single-row case).
    MixedSigns,
    /// The real solutions of the realness conditions do not span enough
    /// complex directions for a nonsingular `P`.
    InsufficientNullspace,
}

impl Infeasibility {
    pub fn code(self) -> &'static str {
        match self {
            Infeasibility::PairRule => "pair-rule",
            Infeasibility::TripleRule => "triple-rule",
            Infeasibility::Quadruple2358 => "quadruple-2358",
            Infeasibility::SlopeRule => "slope-rule",
            Infeasibility::DegenerateCone => "degenerate-cone",
            Infeasibility::MixedSigns => "mixed-signs",
            Infeasibility::InsufficientNullspace => "insufficient-nullspace",
        }
    }
}

/// Outcome of a realizability question.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizabilityCertificate {
    pub feasible: bool,
    pub witness_p: Option<Matrix<C64>>,
    pub reason: Option<Infeasibility>,
    /// Columns of `Q` the reason refers to.
    pub columns: Vec<usize>,
    /// Sign cases of those columns, in column order.
    pub pattern: Vec<SignCase>,
}

impl RealizabilityCertificate {
    pub(crate) fn feasible(p: Matrix<C64>) -> Self {
        Self {
            feasible: true,
            witness_p: Some(p),
            reason: None,
            columns: Vec::new(),
            pattern: Vec::new(),
        }
    }

    pub(crate) fn infeasible(reason: Infeasibility, columns: Vec<usize>, pattern: Vec<SignCase>) -> Self {
        Self {
            feasible: false,
            witness_p: None,
            reason: Some(reason),
            columns,
            pattern,
        }
    }

    /// The witness as a real matrix, for the nonnegativity problem.
    pub fn real_witness(&self) -> Option<Matrix<f64>> {
        self.witness_p.as_ref().map(|p| p.real_part())
    }
}
