use crate::error::{Error, Result};
use crate::matcore::{trace_norm, ComplexMatrix};

use super::{tsr, tsw, Assemblage, ASSEMBLAGE_TOL};

/// Diagonal assemblage `ρ_{a|x} = diag(α_{a|x}, β_{a|x})`, indexed `[x][a]`.
pub fn classical_assemblage(alpha: &[Vec<f64>], beta: &[Vec<f64>]) -> Result<Assemblage> {
    if alpha.len() != beta.len() {
        return Err(Error::InvalidProbabilities(
            "α and β have different setting counts".into(),
        ));
    }
    let mut members = Vec::with_capacity(alpha.len());
    for (x, (ax, bx)) in alpha.iter().zip(beta).enumerate() {
        if ax.len() != bx.len() {
            return Err(Error::InvalidProbabilities(format!(
                "setting {x}: α and β have different outcome counts"
            )));
        }
        if ax.iter().chain(bx).any(|&v| !(v.is_finite() && v >= 0.0)) {
            return Err(Error::InvalidProbabilities(format!(
                "setting {x}: negative or non-finite entry"
            )));
        }
        let total: f64 = ax.iter().chain(bx).sum();
        if (total - 1.0).abs() > ASSEMBLAGE_TOL {
            return Err(Error::InvalidProbabilities(format!(
                "setting {x}: entries sum to {total}"
            )));
        }
        members.push(
            ax.iter()
                .zip(bx)
                .map(|(&a, &b)| ComplexMatrix::from_diagonal(&[a, b]))
                .collect(),
        );
    }
    Assemblage::new(members)
}

/// Two-setting classical assemblage whose setting marginals are
/// `diag(α, 1 − α)` and `diag(β, 1 − β)`: outcome `+` keeps the first
/// level, outcome `−` the second.
pub fn classical_pair(alpha: f64, beta: f64) -> Result<Assemblage> {
    if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidProbabilities(format!("α = {alpha}, β = {beta}")));
    }
    classical_assemblage(
        &[vec![alpha, 0.0], vec![beta, 0.0]],
        &[vec![0.0, 1.0 - alpha], vec![0.0, 1.0 - beta]],
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalCheck {
    pub tsr: f64,
    pub tsw: f64,
    /// Trace distance between the two setting marginals.
    pub trace_distance: f64,
    /// Both programs reached optimality.
    pub optimal: bool,
}

/// Computes TSR, TSW and the marginal trace distance of a two-setting
/// diagonal assemblage. Dephasing leaves such an assemblage unchanged, so
/// this is also its long-time value under any pure-dephasing channel.
pub fn classical_tsr_theorem_check(asm: &Assemblage) -> Result<ClassicalCheck> {
    if asm.n_x() != 2 {
        return Err(Error::InvalidAssemblage(format!(
            "expected 2 settings, got {}",
            asm.n_x()
        )));
    }
    for row in asm.members() {
        for m in row {
            let off = (0..m.rows())
                .flat_map(|r| (0..m.cols()).filter(move |&c| c != r).map(move |c| (r, c)))
                .fold(0.0f64, |acc, rc| acc.max(m[rc].norm()));
            if off > 1e-12 {
                return Err(Error::InvalidAssemblage("members must be diagonal".into()));
            }
        }
    }
    let trace_distance = 0.5 * trace_norm(&(&asm.marginal(0) - &asm.marginal(1)))?;
    let r = tsr(asm);
    let w = tsw(asm)?;
    Ok(ClassicalCheck {
        tsr: r.value,
        tsw: w.value,
        trace_distance,
        optimal: r.is_optimal() && w.is_optimal(),
    })
}
