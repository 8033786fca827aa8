//! Small dense real matrices for the interior-point iterations.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Sub};

use crate::matcore::sym_eig;

#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for k in 0..n {
            m[(k, k)] = 1.0;
        }
        m
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        let mut m = Self::identity(n);
        m.scale_mut(s);
        m
    }

    pub fn scale_mut(&mut self, s: f64) {
        self.data.iter_mut().for_each(|x| *x *= s);
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut m = self.clone();
        m.scale_mut(s);
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                m[(c, r)] = self[(r, c)];
            }
        }
        m
    }

    pub fn symmetrized(&self) -> Self {
        let mut m = self.clone();
        for r in 0..self.n {
            for c in (r + 1)..self.n {
                let avg = 0.5 * (self[(r, c)] + self[(c, r)]);
                m[(r, c)] = avg;
                m[(c, r)] = avg;
            }
        }
        m
    }

    /// Frobenius inner product `tr(Aᵀ B)`.
    pub fn dot(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|k| self[(k, k)]).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn axpy(&mut self, alpha: f64, x: &Self) {
        for (a, b) in self.data.iter_mut().zip(&x.data) {
            *a += alpha * b;
        }
    }

    /// Lower Cholesky factor, or `None` if the matrix is not positive definite.
    pub fn cholesky(&self) -> Option<Self> {
        let n = self.n;
        let mut l = Self::zeros(n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if d.is_nan() || d <= 0.0 {
                return None;
            }
            let d = d.sqrt();
            l[(j, j)] = d;
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Some(l)
    }

    /// Inverse of a lower-triangular matrix.
    pub fn lower_inverse(&self) -> Self {
        let n = self.n;
        let mut inv = Self::zeros(n);
        for col in 0..n {
            for i in col..n {
                let mut s = if i == col { 1.0 } else { 0.0 };
                for k in col..i {
                    s -= self[(i, k)] * inv[(k, col)];
                }
                inv[(i, col)] = s / self[(i, i)];
            }
        }
        inv
    }

    /// Inverse of a symmetric positive definite matrix.
    pub fn spd_inverse(&self) -> Option<Self> {
        let linv = self.cholesky()?.lower_inverse();
        Some((&linv.transpose() * &linv).symmetrized())
    }

    /// Smallest eigenvalue of a symmetric matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        sym_eig(self.n, &self.data).0[0]
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;

    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.n + c]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.n + c]
    }
}

impl Mul for &Mat {
    type Output = Mat;

    fn mul(self, rhs: &Mat) -> Mat {
        let n = self.n;
        let mut m = Mat::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a == 0.0 {
                    continue;
                }
                for c in 0..n {
                    m.data[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        m
    }
}

impl Add for &Mat {
    type Output = Mat;

    fn add(self, rhs: &Mat) -> Mat {
        Mat {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Mat {
    type Output = Mat;

    fn sub(self, rhs: &Mat) -> Mat {
        Mat {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl AddAssign<&Mat> for Mat {
    fn add_assign(&mut self, rhs: &Mat) {
        self.axpy(1.0, rhs);
    }
}

/// Largest `α ≥ 0` with `X + α ΔX ⪰ 0`, given the Cholesky factor of `X`.
/// Returns `f64::INFINITY` when the direction never leaves the cone.
pub fn max_step(chol_x: &Mat, dx: &Mat) -> f64 {
    let linv = chol_x.lower_inverse();
    let w = &(&linv * dx) * &linv.transpose();
    let lmin = w.symmetrized().min_eigenvalue();
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

/// Solves `A x = b` for a dense square system: Cholesky when `A` is
/// positive definite (retrying with a small diagonal shift if rounding has
/// made it numerically indefinite), partial-pivoting LU otherwise.
/// Two rounds of iterative refinement follow.
pub fn solve_system(n: usize, a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let mut x = solve_direct(n, a, b)?;
    for _ in 0..2 {
        let r: Vec<f64> = (0..n)
            .map(|i| b[i] - (0..n).map(|j| a[i * n + j] * x[j]).sum::<f64>())
            .collect();
        let Some(dx) = solve_direct(n, a, &r) else {
            break;
        };
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi += d;
        }
    }
    Some(x)
}

fn solve_direct(n: usize, a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let mat = Mat { n, data: a.to_vec() };
    if let Some(x) = mat.cholesky().map(|l| cholesky_solve(&l, b)) {
        return Some(x);
    }
    let diag = (0..n).fold(0.0f64, |acc, k| acc.max(mat[(k, k)].abs()));
    for shift in [1e-14, 1e-12, 1e-10] {
        let mut shifted = mat.clone();
        for k in 0..n {
            shifted[(k, k)] += shift * diag;
        }
        if let Some(l) = shifted.cholesky() {
            return Some(cholesky_solve(&l, b));
        }
    }
    lu_solve(n, a, b).filter(|x| x.iter().all(|v| v.is_finite()))
}

fn cholesky_solve(l: &Mat, b: &[f64]) -> Vec<f64> {
    let n = l.n;
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[(i, k)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            y[i] -= l[(k, i)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    y
}

fn lu_solve(n: usize, a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1e-300);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))?;
        if m[pivot * n + col].abs() <= 1e-300 * scale {
            return None;
        }
        if pivot != col {
            for c in 0..n {
                m.swap(col * n + c, pivot * n + c);
            }
            x.swap(col, pivot);
        }
        for r in (col + 1)..n {
            let f = m[r * n + col] / m[col * n + col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                m[r * n + c] -= f * m[col * n + c];
            }
            x[r] -= f * x[col];
        }
    }
    for r in (0..n).rev() {
        for c in (r + 1)..n {
            x[r] -= m[r * n + c] * x[c];
        }
        x[r] /= m[r * n + r];
    }
    Some(x)
}
