//! Temporal assemblages, hidden-state models and steering quantifiers.

mod assemblage;
mod classical;
mod measurement;
mod robustness;

pub use assemblage::{make_assemblage, nsit_check, Assemblage, DeterministicStrategySet, NsitReport, ASSEMBLAGE_TOL};
pub use classical::{classical_assemblage, classical_pair, classical_tsr_theorem_check, ClassicalCheck};
pub use measurement::{mubs, Measurement, UNIT_TOL};
pub use robustness::{tsr, tsr_problem, tsw, tsw_problem};

pub use crate::sdpsolver::{SdpSolution, SolveStatus};

use crate::causal::{spatio_temporal_assemblage, CausalScenario};
use crate::error::{Error, Result};

/// TSR from qubit 3 (measured at time 0) to qubit 2 at time `t`.
pub fn spatio_temporal_tsr(scenario: &CausalScenario, t: f64) -> Result<f64> {
    let sol = tsr(&spatio_temporal_assemblage(scenario, t)?);
    if !sol.is_optimal() {
        return Err(Error::SolverFailed(format!("{:?} at t = {t}", sol.status)));
    }
    Ok(sol.value)
}
