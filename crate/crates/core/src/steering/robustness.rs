use crate::error::Result;
use crate::matcore::{herm_eig, ComplexMatrix, ONE, ZERO};
use crate::sdpsolver::{solve, LmiTerm, SdpProblem, SdpSolution, Sense};

use super::{Assemblage, DeterministicStrategySet};

fn strategy_terms(strategies: &DeterministicStrategySet, a: usize, x: usize, coeff: f64) -> Vec<LmiTerm> {
    strategies.answering(a, x).map(|var| LmiTerm::new(var, coeff)).collect()
}

/// Robustness program: minimize `Σ_λ tr σ_λ − 1` subject to `σ_λ ⪰ 0` and
/// `Σ_λ D_λ(a|x) σ_λ ⪰ ρ_{a|x}`. Block `λ` is strategy `λ` of
/// [`DeterministicStrategySet`].
pub fn tsr_problem(asm: &Assemblage) -> SdpProblem {
    let d = asm.dim();
    let strategies = DeterministicStrategySet::new(asm.n_x(), asm.n_a());
    let mut p = SdpProblem::new(Sense::Minimize);
    for _ in 0..strategies.len() {
        p.add_block(ComplexMatrix::identity(d)).expect("identity weight");
    }
    p.set_offset(-1.0);
    for x in 0..asm.n_x() {
        for a in 0..asm.n_a() {
            p.add_constraint(asm.member(x, a).scale(-1.0), strategy_terms(&strategies, a, x, 1.0))
                .expect("validated assemblage");
        }
    }
    p
}

/// Eigenvalues at or below this fraction of the largest count as zero when
/// a member's support is taken.
const SUPPORT_TOL: f64 = 1e-8;

/// Columns spanning the null space of `k` (the standard basis when `k`
/// vanishes), or `None` when `k` is nonsingular.
fn null_basis(k: &ComplexMatrix, cutoff: f64) -> Result<Option<ComplexMatrix>> {
    let d = k.rows();
    let spec = herm_eig(k)?;
    let cols: Vec<usize> = (0..d).filter(|&c| spec.eigenvalues[c] <= cutoff).collect();
    if cols.is_empty() {
        return Ok(None);
    }
    if cols.len() == d {
        return Ok(Some(ComplexMatrix::identity(d)));
    }
    let mut data = Vec::with_capacity(d * cols.len());
    for r in 0..d {
        data.extend(cols.iter().map(|&c| spec.eigenvectors[(r, c)]));
    }
    ComplexMatrix::from_vec(d, cols.len(), data).map(Some)
}

/// Kernel projector of a PSD member, and the whitening map `W = V Λ^{-1/2}`
/// onto its support (`W† ρ W = I`), or `None` for a zero member.
fn member_geometry(m: &ComplexMatrix) -> Result<(ComplexMatrix, Option<ComplexMatrix>)> {
    let d = m.rows();
    let spec = herm_eig(m)?;
    let cutoff = SUPPORT_TOL * spec.max().max(f64::MIN_POSITIVE);
    let kernel = spec.map(|mu| if mu <= cutoff { ONE } else { ZERO });
    let cols: Vec<usize> = (0..d).filter(|&c| spec.eigenvalues[c] > cutoff).collect();
    if cols.is_empty() {
        return Ok((kernel, None));
    }
    let mut data = Vec::with_capacity(d * cols.len());
    for r in 0..d {
        data.extend(cols.iter().map(|&c| spec.eigenvectors[(r, c)]));
    }
    Ok((kernel, Some(ComplexMatrix::from_vec(d, cols.len(), data)?)))
}

/// Steerable weight program: maximize `Σ_λ tr σ̃_λ` subject to `σ̃_λ ⪰ 0` and
/// `ρ_{a|x} − Σ_λ D_λ(a|x) σ̃_λ ⪰ 0`, posed as minimizing `1 − Σ tr σ̃_λ`
/// so the optimum is the weight itself.
///
/// Rank-deficient members leave the program without a strictly feasible
/// point, which stalls interior-point iterations. Each `σ̃_λ` is therefore
/// written as `P_λ Y_λ P_λ†` with `P_λ` spanning the intersection of the
/// supports of the members `λ` answers into, and each constraint is
/// restricted to its member's support and whitened there, so its constant
/// term is the identity. Strategies with an empty intersection are
/// dropped, so blocks no longer line up with strategy indices when that
/// happens.
pub fn tsw_problem(asm: &Assemblage) -> Result<SdpProblem> {
    let d = asm.dim();
    let strategies = DeterministicStrategySet::new(asm.n_x(), asm.n_a());
    let geometry = asm
        .members()
        .iter()
        .map(|row| row.iter().map(member_geometry).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;

    let mut p = SdpProblem::new(Sense::Minimize);
    p.set_offset(1.0);
    let mut blocks = vec![None; strategies.len()];
    for (lambda, slot) in blocks.iter_mut().enumerate() {
        let mut overlap = ComplexMatrix::zeros(d, d);
        for x in 0..asm.n_x() {
            overlap += &geometry[x][strategies.outcome(lambda, x)].0;
        }
        if let Some(basis) = null_basis(&overlap, 1e-8)? {
            let k = p.add_block(ComplexMatrix::identity(basis.cols()).scale(-1.0))?;
            *slot = Some((k, basis));
        }
    }
    for (x, row) in geometry.iter().enumerate() {
        for (a, (_, support)) in row.iter().enumerate() {
            let Some(w) = support else {
                continue;
            };
            let terms = strategies
                .answering(a, x)
                .filter_map(|lambda| blocks[lambda].as_ref())
                .map(|(k, basis)| LmiTerm::mapped(*k, -1.0, &w.dagger() * basis))
                .collect();
            let constant = w.dagger().conjugate(asm.member(x, a)).hermitian_part();
            p.add_constraint(constant, terms)?;
        }
    }
    Ok(p)
}

/// Temporal steering robustness; `value` is the TSR.
pub fn tsr(asm: &Assemblage) -> SdpSolution {
    solve(&tsr_problem(asm))
}

/// Temporal steerable weight; `value` is the TSW. Hidden states are the
/// restricted blocks of [`tsw_problem`]. Nearly rank-deficient members
/// (strong amplitude damping) can leave the program degenerate enough that
/// the solver stops short of its tolerances; `status` reports that.
pub fn tsw(asm: &Assemblage) -> Result<SdpSolution> {
    Ok(solve(&tsw_problem(asm)?))
}
