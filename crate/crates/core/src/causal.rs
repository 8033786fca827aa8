//! Common-cause versus direct-cause correlations between qubits 1 and 2,
//! probed by steering qubit 2 from an auxiliary qubit 3 coupled to qubit 1.
//!
//! Register order is (qubit 1, qubit 2, qubit 3), so qubit `k` is subsystem
//! `k − 1`.

use crate::channels::{exchange_hamiltonian, propagator};
use crate::error::{Error, Result};
use crate::matcore::{partial_trace, phi_plus, ComplexMatrix, DensityMatrix};
use crate::steering::{mubs, tsr, Assemblage};
use crate::sweep;

/// TSR above this marks a direct cause.
pub const VERDICT_THRESHOLD: f64 = 1e-6;

const DIMS: [usize; 3] = [2, 2, 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CausalKind {
    CommonCause,
    DirectCause,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausalScenario {
    kind: CausalKind,
    j: f64,
    j31: f64,
    initial_state: DensityMatrix,
    hamiltonian: ComplexMatrix,
}

/// Initial states for [`build_scenario_with`]. Qubit states are Bloch
/// vectors; `|0⟩` is `[0, 0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioStates {
    pub qubit3: [f64; 3],
    /// Product state of qubits 1 and 2 in the direct-cause case.
    pub direct_pair: [[f64; 3]; 2],
}

impl Default for ScenarioStates {
    fn default() -> Self {
        Self {
            qubit3: [0.0; 3],
            direct_pair: [[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]],
        }
    }
}

/// Builds a scenario with qubit 3 maximally mixed and, for a direct
/// cause, qubits 1 and 2 in `|00⟩`.
pub fn build_scenario(kind: CausalKind, j: f64, j31: f64) -> Result<CausalScenario> {
    build_scenario_with(kind, j, j31, &ScenarioStates::default())
}

pub fn build_scenario_with(kind: CausalKind, j: f64, j31: f64, states: &ScenarioStates) -> Result<CausalScenario> {
    for c in [j, j31] {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidCoupling(c));
        }
    }
    let q3 = DensityMatrix::from_bloch(states.qubit3)?;
    let (pair, hamiltonian) = match kind {
        CausalKind::CommonCause => (
            DensityMatrix::pure(&phi_plus(), vec![2, 2])?,
            exchange_hamiltonian(3, 2, 0, j31),
        ),
        CausalKind::DirectCause => {
            let q1 = DensityMatrix::from_bloch(states.direct_pair[0])?;
            let q2 = DensityMatrix::from_bloch(states.direct_pair[1])?;
            (
                q1.tensor(&q2),
                &exchange_hamiltonian(3, 0, 1, j) + &exchange_hamiltonian(3, 2, 0, j31),
            )
        }
    };
    Ok(CausalScenario {
        kind,
        j,
        j31,
        initial_state: pair.tensor(&q3),
        hamiltonian,
    })
}

impl CausalScenario {
    pub fn kind(&self) -> CausalKind {
        self.kind
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn j31(&self) -> f64 {
        self.j31
    }

    pub fn initial_state(&self) -> &DensityMatrix {
        &self.initial_state
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }
}

/// Measures qubit 3 in the X, Y and Z bases at time 0, evolves each
/// post-measurement state for `t` and keeps qubit 2.
pub fn spatio_temporal_assemblage(s: &CausalScenario, t: f64) -> Result<Assemblage> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let u = propagator(&s.hamiltonian, t)?;
    let id4 = ComplexMatrix::identity(4);
    let members = mubs(3)?
        .iter()
        .map(|m| {
            m.effects()
                .iter()
                .map(|e| {
                    let proj = id4.kron(e);
                    let post = proj.conjugate(s.initial_state.matrix());
                    partial_trace(&u.conjugate(&post), &DIMS, &[1])
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Assemblage::new(members)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CausalPoint {
    pub t: f64,
    pub tsr: f64,
    pub optimal: bool,
}

/// TSR from qubit 3 to qubit 2 at every grid time, in grid order.
pub fn causal_tsr_series(s: &CausalScenario, t_grid: &[f64]) -> Result<Vec<CausalPoint>> {
    sweep::map(t_grid, |&t| {
        let sol = tsr(&spatio_temporal_assemblage(s, t)?);
        Ok(CausalPoint {
            t,
            tsr: sol.value,
            optimal: sol.is_optimal(),
        })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalVerdict {
    CommonCauseConsistent,
    DirectCauseDetected,
}

impl CausalVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::CommonCauseConsistent => "common-cause-consistent",
            Self::DirectCauseDetected => "direct-cause-detected",
        }
    }
}

impl std::fmt::Display for CausalVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn causal_verdict(tsr_values: &[f64]) -> CausalVerdict {
    if tsr_values.iter().any(|&v| v > VERDICT_THRESHOLD) {
        CausalVerdict::DirectCauseDetected
    } else {
        CausalVerdict::CommonCauseConsistent
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steering::nsit_check;
    use crate::sweep::time_grid;
    use std::f64::consts::PI;

    #[test]
    fn scenario_structure() {
        let c = build_scenario(CausalKind::CommonCause, 1.0, 1.0).unwrap();
        let pair = c.initial_state().reduce(&[0, 1]).unwrap();
        assert!(pair.matrix().max_abs_diff(&ComplexMatrix::projector(&phi_plus())) < 1e-15);
        assert!(c.hamiltonian().max_abs_diff(&exchange_hamiltonian(3, 2, 0, 1.0)) < 1e-15);

        let d = build_scenario(CausalKind::DirectCause, 1.0, 0.5).unwrap();
        let pair = d.initial_state().reduce(&[0, 1]).unwrap();
        assert!((pair.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!(matches!(
            build_scenario(CausalKind::DirectCause, 0.0, 1.0),
            Err(Error::InvalidCoupling(_))
        ));
        assert!(build_scenario(CausalKind::CommonCause, 1.0, -2.0).is_err());
    }

    #[test]
    fn no_steering_at_time_zero() {
        for kind in [CausalKind::CommonCause, CausalKind::DirectCause] {
            let s = build_scenario(kind, 1.0, 1.0).unwrap();
            let asm = spatio_temporal_assemblage(&s, 0.0).unwrap();
            for x in 0..3 {
                for a in 0..2 {
                    let cond = asm.conditional_state(x, a).unwrap();
                    assert!(cond.max_abs_diff(&asm.conditional_state(0, 0).unwrap()) < 1e-12);
                }
            }
            assert!(tsr(&asm).value.abs() < 1e-8);
        }
    }

    #[test]
    fn common_cause_members_coincide() {
        let s = build_scenario(CausalKind::CommonCause, 1.0, 1.0).unwrap();
        for &t in &[0.3, 1.7, 4.0] {
            let asm = spatio_temporal_assemblage(&s, t).unwrap();
            let first = asm.conditional_state(0, 0).unwrap();
            for x in 0..3 {
                assert!(asm.marginal(x).max_abs_diff(&asm.marginal(0)) < 1e-12);
                for a in 0..2 {
                    assert!(asm.conditional_state(x, a).unwrap().max_abs_diff(&first) < 1e-10);
                }
            }
            assert!(nsit_check(&asm).unwrap().holds);
        }
    }

    #[test]
    fn direct_cause_oscillates() {
        let s = build_scenario(CausalKind::DirectCause, 1.0, 1.0).unwrap();
        let grid = time_grid(0.0, 4.0 * PI, 60);
        let series = causal_tsr_series(&s, &grid).unwrap();
        assert!(series.iter().all(|p| p.optimal && p.tsr >= -1e-9));
        assert!(series[0].tsr.abs() < 1e-8);
        let values: Vec<f64> = series.iter().map(|p| p.tsr).collect();
        assert_eq!(causal_verdict(&values), CausalVerdict::DirectCauseDetected);
        assert!(nsit_check(&spatio_temporal_assemblage(&s, 1.1).unwrap()).unwrap().holds);
    }

    #[test]
    fn common_cause_series_is_flat() {
        let s = build_scenario(CausalKind::CommonCause, 1.0, 1.0).unwrap();
        let series = causal_tsr_series(&s, &time_grid(0.0, 4.0 * PI, 20)).unwrap();
        let values: Vec<f64> = series.iter().map(|p| p.tsr).collect();
        assert!(values.iter().all(|v| v.abs() <= 1e-8));
        assert_eq!(causal_verdict(&values), CausalVerdict::CommonCauseConsistent);
    }

    #[test]
    fn weak_auxiliary_coupling_decouples() {
        let s = build_scenario(CausalKind::DirectCause, 1.0, 1e-10).unwrap();
        let series = causal_tsr_series(&s, &time_grid(0.0, 4.0 * PI, 12)).unwrap();
        assert!(series.iter().all(|p| p.tsr <= 1e-8));
    }

    #[test]
    fn verdict_on_zeros() {
        assert_eq!(causal_verdict(&[0.0; 5]), CausalVerdict::CommonCauseConsistent);
        assert_eq!(causal_verdict(&[]), CausalVerdict::CommonCauseConsistent);
    }

    #[test]
    fn single_excitation_period() {
        // Excitation-preserving chain 2–1–3 has frequencies 0 and
        // ±√(J² + J31²), so the series repeats after 2π/√(J² + J31²).
        let j = 1.0;
        for j31 in [1.0, 3f64.sqrt()] {
            let s = build_scenario(CausalKind::DirectCause, j, j31).unwrap();
            let period = 2.0 * PI / (j * j + j31 * j31).sqrt();
            for &t in &[0.4, 1.3, 2.2] {
                let a = tsr(&spatio_temporal_assemblage(&s, t).unwrap()).value;
                let b = tsr(&spatio_temporal_assemblage(&s, t + period).unwrap()).value;
                assert!((a - b).abs() < 1e-6, "j31={j31} t={t}: {a} vs {b}");
            }
        }
    }
}
