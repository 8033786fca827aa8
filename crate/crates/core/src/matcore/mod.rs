//! Dense complex linear algebra for 2-, 4- and 8-dimensional Hilbert spaces.
//!
//! Subsystem index 0 is always the leftmost tensor factor.

mod eig;
mod matrix;

pub use eig::{herm_eig, min_eigenvalue, psd_sqrt, sym_eig, trace_norm, Spectrum};
pub use matrix::{pauli, ComplexMatrix, HERMITIAN_TOL};

pub(crate) use matrix::{I, ONE, ZERO};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on negative eigenvalues accepted as rounding noise.
pub const PSD_TOL: f64 = 1e-10;

/// Standard tensor product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Tensor product of a list of factors, leftmost first.
pub fn kron_all(factors: &[ComplexMatrix]) -> ComplexMatrix {
    let (first, rest) = factors.split_first().expect("at least one factor");
    rest.iter().fold(first.clone(), |acc, f| acc.kron(f))
}

fn check_dims(m: &ComplexMatrix, dims: &[usize]) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || total != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims {dims:?} do not multiply to {}",
            m.rows()
        )));
    }
    Ok(total)
}

/// Splits a flat index into per-subsystem digits (subsystem 0 most significant).
fn digits(mut idx: usize, dims: &[usize], out: &mut [usize]) {
    for (k, &d) in dims.iter().enumerate().rev() {
        out[k] = idx % d;
        idx /= d;
    }
}

fn flat(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// Traces out every subsystem not listed in `keep`.
///
/// `keep` is a set of subsystem indices; the kept factors stay in their
/// original left-to-right order.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total = check_dims(m, dims)?;
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "subsystem {bad} out of range for dims {dims:?}"
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();
    let out_dim: usize = kept_dims.iter().product();

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    let mut rd = vec![0; dims.len()];
    let mut cd = vec![0; dims.len()];
    let mut rk = vec![0; kept.len()];
    let mut ck = vec![0; kept.len()];
    for r in 0..total {
        digits(r, dims, &mut rd);
        for c in 0..total {
            digits(c, dims, &mut cd);
            if traced.iter().any(|&k| rd[k] != cd[k]) {
                continue;
            }
            for (slot, &k) in kept.iter().enumerate() {
                rk[slot] = rd[k];
                ck[slot] = cd[k];
            }
            out[(flat(&rk, &kept_dims), flat(&ck, &kept_dims))] += m[(r, c)];
        }
    }
    Ok(out)
}

/// Transposes subsystem `which` in place of the full matrix.
pub fn partial_transpose(m: &ComplexMatrix, dims: &[usize], which: usize) -> Result<ComplexMatrix> {
    let total = check_dims(m, dims)?;
    if which >= dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "subsystem {which} out of range for dims {dims:?}"
        )));
    }
    let mut out = ComplexMatrix::zeros(total, total);
    let mut rd = vec![0; dims.len()];
    let mut cd = vec![0; dims.len()];
    for r in 0..total {
        for c in 0..total {
            digits(r, dims, &mut rd);
            digits(c, dims, &mut cd);
            std::mem::swap(&mut rd[which], &mut cd[which]);
            out[(flat(&rd, dims), flat(&cd, dims))] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Pauli coefficients `c_k = tr(σ_k m)`, so that `m = ½ Σ c_k σ_k`.
pub fn bloch_decompose(m: &ComplexMatrix) -> Result<[f64; 4]> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "Bloch decomposition needs a 2x2 matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let mut c = [0.0; 4];
    for (k, ck) in c.iter_mut().enumerate() {
        *ck = pauli::sigma(k).trace_product(m).re;
    }
    Ok(c)
}

/// Inverse of [`bloch_decompose`].
pub fn bloch_compose(c: [f64; 4]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    for (k, &ck) in c.iter().enumerate() {
        m += &pauli::sigma(k).scale(0.5 * ck);
    }
    m
}

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        check_dims(&matrix, &dims)?;
        let dev = matrix.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > HERMITIAN_TOL || tr.im.abs() > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = min_eigenvalue(&matrix)?;
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
            dims,
        })
    }

    /// Single-qubit (or single-system) state with one subsystem.
    pub fn single(matrix: ComplexMatrix) -> Result<Self> {
        let d = matrix.rows();
        Self::new(matrix, vec![d])
    }

    /// Wraps a matrix already known to be a state up to rounding; only
    /// Hermiticity is restored.
    pub(crate) fn from_trusted(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.rows());
        Self {
            matrix: matrix.hermitian_part(),
            dims,
        }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self {
            matrix: ComplexMatrix::identity(d).scale(1.0 / d as f64),
            dims,
        }
    }

    pub fn pure(psi: &[Complex64], dims: Vec<usize>) -> Result<Self> {
        Self::new(ComplexMatrix::projector(psi), dims)
    }

    /// Qubit state `(I + r·σ)/2` with `|r| ≤ 1`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1.0 + 1e-12 {
            return Err(Error::InvalidState(format!("Bloch vector norm {norm} exceeds 1")));
        }
        Ok(Self::from_trusted(bloch_compose([1.0, r[0], r[1], r[2]]), vec![2]))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::from_trusted(self.matrix.kron(&other.matrix), dims)
    }

    /// Reduced state on the subsystems listed in `keep`.
    pub fn reduce(&self, keep: &[usize]) -> Result<Self> {
        let m = partial_trace(&self.matrix, &self.dims, keep)?;
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        let dims = kept.iter().map(|&k| self.dims[k]).collect();
        Ok(Self::from_trusted(m, dims))
    }
}

/// `D(a, b) = ½ Σ |eig(a − b)|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "trace distance between {}- and {}-dimensional states",
            a.dim(),
            b.dim()
        )));
    }
    Ok(0.5 * trace_norm(&(a.matrix() - b.matrix()))?)
}

/// `|Φ⁺⟩ = (|00⟩ + |11⟩)/√2`.
pub fn phi_plus() -> Vec<Complex64> {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    vec![h, ZERO, ZERO, h]
}

/// Two-qubit SWAP operator.
pub fn swap() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 2)] = ONE;
    m[(2, 1)] = ONE;
    m[(3, 3)] = ONE;
    m
}
