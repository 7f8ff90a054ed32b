//! The β window in which the height balance has a solution.

use serde::{Deserialize, Serialize};

use crate::dims::DimensionParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RejectReason {
    /// β ≤ N−4: the balance would force μ^{−(β+2)} = O(μ^{−(β+3)}).
    BalanceContradiction,
    /// β ≥ N−2: outside the admissible range of the potential exponent.
    ExponentTooLarge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Feasibility {
    Accept,
    Reject { reason: RejectReason, message: String },
}

impl Feasibility {
    pub fn is_accept(&self) -> bool {
        matches!(self, Feasibility::Accept)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Feasibility::Accept => "ACCEPT",
            Feasibility::Reject { .. } => "REJECT",
        }
    }
}

/// ACCEPT iff N−4 < β < N−2.
pub fn feasibility_check(dims: &DimensionParams, beta: f64) -> Feasibility {
    let nf = dims.nf();
    if !beta.is_finite() || beta <= nf - 4.0 {
        Feasibility::Reject {
            reason: RejectReason::BalanceContradiction,
            message: format!(
                "beta = {beta} <= N-4 = {}: the potential term mu^-(beta+2) is not dominated by the interaction mu^-(N-2) L^-(N-2) for any mu -> inf, so the height balance forces mu^-(beta+2) = O(mu^-(beta+3))",
                nf - 4.0
            ),
        }
    } else if beta >= nf - 2.0 {
        Feasibility::Reject {
            reason: RejectReason::ExponentTooLarge,
            message: format!("beta = {beta} >= N-2 = {}: the potential exponent must lie in (N-4, N-2)", nf - 2.0),
        }
    } else {
        Feasibility::Accept
    }
}
