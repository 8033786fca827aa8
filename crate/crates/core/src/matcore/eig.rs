//! Cyclic Jacobi eigensolvers.
//!
//! Both solvers sweep the strictly upper triangle in a fixed order and stop
//! once the off-diagonal mass drops below `EPS` times the Frobenius norm, so
//! results are bit-reproducible for identical inputs.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, HERMITIAN_TOL, ZERO};
use crate::error::{Error, Result};

const EPS: f64 = 1e-15;
const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    /// `V diag(g(μ)) V†`.
    pub fn map(&self, g: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &mu) in self.eigenvalues.iter().enumerate() {
            let w = g(mu);
            if w == ZERO {
                continue;
            }
            for r in 0..n {
                let vr = v[(r, k)] * w;
                for c in 0..n {
                    out[(r, c)] += vr * v[(c, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|mu| Complex64::new(mu, 0.0))
    }
}

/// Eigen-decomposition of a Hermitian matrix by complex Jacobi rotations.
pub fn herm_eig(m: &ComplexMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigensolver needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let scale = m.max_abs().max(1.0);
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(dev));
    }

    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let norm = a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|r| ((r + 1)..n).map(move |c| (r, c)))
            .map(|(r, c)| a[(r, c)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= EPS * norm || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate_complex(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors[(r, dst)] = v[(r, src)];
        }
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn rotate_complex(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    // Phase that makes the pivot real, followed by a real Givens rotation.
    let phase = apq / mag;
    let (c, s) = jacobi_angle(a[(p, p)].re, a[(q, q)].re, mag);
    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Cosine and sine of the rotation that annihilates a real pivot `apq`.
fn jacobi_angle(app: f64, aqq: f64, apq: f64) -> (f64, f64) {
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    (c, t * c)
}

/// Eigen-decomposition of a real symmetric `n x n` matrix in row-major
/// storage. Returns ascending eigenvalues and the eigenvector matrix
/// (columns, row-major).
pub fn sym_eig(n: usize, m: &[f64]) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(m.len(), n * n);
    let mut a: Vec<f64> = m.to_vec();
    for r in 0..n {
        for c in (r + 1)..n {
            let avg = 0.5 * (a[r * n + c] + a[c * n + r]);
            a[r * n + c] = avg;
            a[c * n + r] = avg;
        }
    }
    let mut v = vec![0.0; n * n];
    for k in 0..n {
        v[k * n + k] = 1.0;
    }
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for r in 0..n {
            for c in (r + 1)..n {
                off += a[r * n + c] * a[r * n + c];
            }
        }
        let off = off.sqrt();
        if off <= EPS * norm || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let (c, s) = jacobi_angle(a[p * n + p], a[q * n + q], apq);
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let vals = order.iter().map(|&k| a[k * n + k]).collect();
    let mut vecs = vec![0.0; n * n];
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vecs[r * n + dst] = v[r * n + src];
        }
    }
    (vals, vecs)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eig(m)?.min())
}

/// Principal square root of a positive semidefinite matrix; tiny negative
/// eigenvalues from rounding are clamped to zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spec = herm_eig(m)?;
    Ok(spec.map(|mu| Complex64::new(mu.max(0.0).sqrt(), 0.0)))
}

/// Trace norm `Σ|μ_k|` of a Hermitian matrix.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eig(m)?.eigenvalues.iter().map(|x| x.abs()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::pauli;

    #[test]
    fn pauli_z_spectrum() {
        let s = herm_eig(&pauli::z()).unwrap();
        assert_eq!(s.eigenvalues, vec![-1.0, 1.0]);
    }

    #[test]
    fn pauli_y_eigenvectors() {
        let y = pauli::y();
        let s = herm_eig(&y).unwrap();
        for k in 0..2 {
            let v = s.eigenvectors.column(k);
            let yv = y.matvec(&v);
            for r in 0..2 {
                assert!((yv[r] - v[r] * s.eigenvalues[k]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn rejects_non_square() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(herm_eig(&m), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn real_symmetric_jacobi() {
        let m = [2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 5.0];
        let (vals, vecs) = sym_eig(3, &m);
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] - 3.0).abs() < 1e-14);
        assert!((vals[2] - 5.0).abs() < 1e-14);
        // M v = λ v for the first column
        for r in 0..3 {
            let mv: f64 = (0..3).map(|c| m[r * 3 + c] * vecs[c * 3]).sum();
            assert!((mv - vals[0] * vecs[r * 3]).abs() < 1e-14);
        }
    }

    #[test]
    fn sqrt_of_projector_is_projector() {
        let p = ComplexMatrix::from_diagonal(&[1.0, 0.0]);
        assert!(psd_sqrt(&p).unwrap().max_abs_diff(&p) < 1e-15);
    }
}
