//! Two-time pseudo density matrices of a single qubit.
//!
//! `R = ¼ Σ_ij C_ij σ_i ⊗ σ_j`, where the left factor belongs to the first
//! measurement time and the right factor to the second.

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::matcore::{herm_eig, kron, partial_trace, partial_transpose, pauli, ComplexMatrix, DensityMatrix, PSD_TOL};
use crate::steering::{Assemblage, Measurement};

/// Eigenvalues below `−NEGATIVITY_TOL` count as negative.
pub const NEGATIVITY_TOL: f64 = PSD_TOL;

#[derive(Debug, Clone, PartialEq)]
pub struct PseudoDensityMatrix {
    matrix: ComplexMatrix,
    correlations: [[f64; 4]; 4],
    nsit_verified: bool,
}

fn correlations_of(m: &ComplexMatrix) -> [[f64; 4]; 4] {
    let mut c = [[0.0; 4]; 4];
    for (i, row) in c.iter_mut().enumerate() {
        for (j, cij) in row.iter_mut().enumerate() {
            *cij = m.trace_product(&kron(&pauli::sigma(i), &pauli::sigma(j))).re;
        }
    }
    c
}

fn compose(c: &[[f64; 4]; 4]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    for (i, row) in c.iter().enumerate() {
        for (j, &cij) in row.iter().enumerate() {
            if cij != 0.0 {
                m += &kron(&pauli::sigma(i), &pauli::sigma(j)).scale(0.25 * cij);
            }
        }
    }
    m
}

/// The first-time marginal is `I/2` exactly when `C_i0 = 0` for `i ≥ 1`.
fn first_marginal_is_mixed(c: &[[f64; 4]; 4]) -> bool {
    (1..4).all(|i| c[i][0].abs() <= 1e-12)
}

impl PseudoDensityMatrix {
    /// Wraps a 4x4 Hermitian unit-trace matrix. Positivity is not required.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != 4 || matrix.cols() != 4 {
            return Err(Error::DimensionMismatch(format!(
                "pseudo density matrix must be 4x4, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let dev = matrix.hermitian_deviation();
        if dev > 1e-12 {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let matrix = matrix.hermitian_part();
        let correlations = correlations_of(&matrix);
        Ok(Self {
            nsit_verified: first_marginal_is_mixed(&correlations),
            matrix,
            correlations,
        })
    }

    /// Builds `R` from its Pauli correlation table; `C_00` must be 1.
    pub fn from_correlations(correlations: [[f64; 4]; 4]) -> Result<Self> {
        if (correlations[0][0] - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!(
                "C_00 = {}, expected 1",
                correlations[0][0]
            )));
        }
        if correlations.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidState("non-finite correlation".into()));
        }
        Ok(Self {
            matrix: compose(&correlations),
            nsit_verified: first_marginal_is_mixed(&correlations),
            correlations,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `C_ij = tr(R σ_i ⊗ σ_j)`.
    pub fn correlations(&self) -> &[[f64; 4]; 4] {
        &self.correlations
    }

    pub fn correlation(&self, i: usize, j: usize) -> f64 {
        self.correlations[i][j]
    }

    /// True when the first-time marginal is maximally mixed, the case in
    /// which measurement on `R` reproduces the channel-evolved assemblage.
    pub fn nsit_verified(&self) -> bool {
        self.nsit_verified
    }

    /// The 3x3 block `T_ij = C_ij`, `i, j ≥ 1`, row-major.
    pub fn correlation_block(&self) -> [f64; 9] {
        let mut t = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                t[3 * i + j] = self.correlations[i + 1][j + 1];
            }
        }
        t
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        herm_eig(&self.matrix).expect("Hermitian by construction").eigenvalues
    }
}

/// Pseudo density matrix of `ch` between times 0 and `t`, starting from
/// `ρ0`: `C_ij = tr[σ_j E_t(½{σ_i, ρ0})]`.
///
/// For `ρ0 = I/2` this is `C_0j = tr[σ_j E_t(I/2)]`, `C_i0 = 0` and
/// `C_ij = ½ tr[σ_j E_t(σ_i)]`.
pub fn build_pdm(ch: &Channel, rho0: &DensityMatrix, t: f64) -> Result<PseudoDensityMatrix> {
    if !ch.is_qubit() || rho0.dim() != 2 {
        return Err(Error::NonQubitChannel);
    }
    let mut c = [[0.0; 4]; 4];
    for (i, row) in c.iter_mut().enumerate() {
        let input = pauli::sigma(i).anticommutator(rho0.matrix()).scale(0.5);
        let out = ch.apply(&input, t)?;
        for (j, cij) in row.iter_mut().enumerate() {
            *cij = pauli::sigma(j).trace_product(&out).re;
        }
    }
    PseudoDensityMatrix::from_correlations(c)
}

/// `f = Σ |μ|` over eigenvalues `μ < −1e-10`.
pub fn f_function(r: &PseudoDensityMatrix) -> f64 {
    r.eigenvalues()
        .into_iter()
        .filter(|&mu| mu < -NEGATIVITY_TOL)
        .map(f64::abs)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptReport {
    pub positive: bool,
    pub min_eigenvalue: f64,
}

/// Positivity of the partial transpose on the first-time factor.
pub fn ppt_positive(r: &PseudoDensityMatrix) -> PptReport {
    let pt = partial_transpose(r.matrix(), &[2, 2], 0).expect("4x4 by construction");
    let min = herm_eig(&pt).expect("Hermitian by construction").min();
    PptReport {
        positive: min >= -NEGATIVITY_TOL,
        min_eigenvalue: min,
    }
}

/// `ρ_{a|x} = tr_A[(E_{a|x} ⊗ I) R]`.
///
/// Only projective settings on a pseudo density matrix with maximally
/// mixed first-time marginal are accepted: that is where this agrees with
/// measuring and then evolving.
pub fn extract_assemblage(r: &PseudoDensityMatrix, settings: &[Measurement]) -> Result<Assemblage> {
    if !r.nsit_verified() {
        return Err(Error::UnverifiedPdm);
    }
    let mut members = Vec::with_capacity(settings.len());
    for (x, m) in settings.iter().enumerate() {
        if m.dim() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "setting {x} is not a qubit measurement"
            )));
        }
        if !m.is_projective() {
            return Err(Error::NonProjective(format!("setting {x}")));
        }
        let row = m
            .effects()
            .iter()
            .map(|e| {
                let lifted = &kron(e, &ComplexMatrix::identity(2)) * r.matrix();
                partial_trace(&lifted, &[2, 2], &[1]).map(|m| m.hermitian_part())
            })
            .collect::<Result<Vec<_>>>()?;
        members.push(row);
    }
    Assemblage::new(members)
}
