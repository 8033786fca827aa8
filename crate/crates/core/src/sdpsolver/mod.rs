//! Dense primal-dual interior-point solver for small block SDPs.
//!
//! Hermitian `d x d` variable blocks are parametrized by `d²` real numbers
//! and every Hermitian LMI is mapped to the real-symmetric embedding
//! `[[Re, −Im], [Im, Re]]`. The real problem is solved in the standard pair
//!
//! ```text
//! (P)  min C•X  s.t. A_i•X = b_i, X ⪰ 0
//! (D)  max bᵀy  s.t. Z = C − Σ y_i A_i ⪰ 0
//! ```
//!
//! where `y` holds the parameters of the user's variable blocks, so `Z` is
//! the stack of the user's LMIs. Iterations use the HKM search direction
//! with Mehrotra's predictor-corrector and an infeasible starting point.

mod dense;
mod problem;

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;

pub use problem::{LmiConstraint, LmiTerm, SdpProblem, Sense};

use crate::matcore::{herm_eig, ComplexMatrix, I, ONE};
use dense::{max_step, solve_system, Mat};

/// Termination state of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    MaxIterations,
}

/// Optimizer output. `hidden_states` are the variable blocks at the final
/// iterate; `dual_certificate` holds one Hermitian multiplier per LMI (the
/// implicit `X_k ⪰ 0` constraints come first, then the user constraints).
#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub value: f64,
    pub dual_value: f64,
    pub hidden_states: Vec<ComplexMatrix>,
    pub dual_certificate: Vec<ComplexMatrix>,
    pub duality_gap: f64,
    /// Largest LMI violation `max(0, −λ_min)` over all constraints.
    pub primal_residual: f64,
    pub status: SolveStatus,
    pub iterations: usize,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Stop once `|pobj − dobj|` and `X•Z` fall below this.
    pub gap_tol: f64,
    /// Relative primal and dual residual tolerance.
    pub feas_tol: f64,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
    /// If the iterations break down numerically, the last iterate still
    /// counts as optimal when gap and residuals are below this.
    pub accept_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gap_tol: 1e-9,
            feas_tol: 1e-10,
            step_fraction: 0.98,
            accept_tol: 1e-8,
        }
    }
}

/// Hermitian basis of `d x d` matrices: diagonal units, then for each
/// `r < c` the symmetric `E_rc + E_cr` and antisymmetric `−iE_rc + iE_cr`.
fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(d * d);
    for r in 0..d {
        let mut e = ComplexMatrix::zeros(d, d);
        e[(r, r)] = ONE;
        basis.push(e);
    }
    for r in 0..d {
        for c in (r + 1)..d {
            let mut s = ComplexMatrix::zeros(d, d);
            s[(r, c)] = ONE;
            s[(c, r)] = ONE;
            basis.push(s);
            let mut a = ComplexMatrix::zeros(d, d);
            a[(r, c)] = -I;
            a[(c, r)] = I;
            basis.push(a);
        }
    }
    basis
}

/// `[[Re H, −Im H], [Im H, Re H]]`.
fn embed(h: &ComplexMatrix) -> Mat {
    let d = h.rows();
    let mut m = Mat::zeros(2 * d);
    for r in 0..d {
        for c in 0..d {
            let z = h[(r, c)];
            m[(r, c)] = z.re;
            m[(r + d, c + d)] = z.re;
            m[(r, c + d)] = -z.im;
            m[(r + d, c)] = z.im;
        }
    }
    m
}

/// Hermitian `F` with `tr(embed(W) X) = Re tr(W F)` for all Hermitian `W`.
fn unembed_dual(x: &Mat) -> ComplexMatrix {
    let d = x.n / 2;
    let mut f = ComplexMatrix::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            let re = x[(r, c)] + x[(r + d, c + d)];
            let im = x[(r + d, c)] - x[(r, c + d)];
            f[(r, c)] = Complex64::new(re, im);
        }
    }
    f.hermitian_part()
}

struct RealBlock {
    c: Mat,
    /// `(i, A_i)` for every parameter with a nonzero coefficient matrix.
    a: Vec<(usize, Mat)>,
}

struct RealSdp {
    m: usize,
    b: Vec<f64>,
    blocks: Vec<RealBlock>,
    /// Parameter range of each user variable block.
    offsets: Vec<usize>,
    bases: Vec<Vec<ComplexMatrix>>,
}

impl RealSdp {
    fn compile(p: &SdpProblem) -> Self {
        let bases: Vec<Vec<ComplexMatrix>> = p.var_dims.iter().map(|&d| hermitian_basis(d)).collect();
        let mut offsets = Vec::with_capacity(bases.len());
        let mut m = 0;
        for b in &bases {
            offsets.push(m);
            m += b.len();
        }
        let sign = match p.sense {
            Sense::Minimize => -1.0,
            Sense::Maximize => 1.0,
        };
        let mut b = vec![0.0; m];
        for (k, basis) in bases.iter().enumerate() {
            for (q, h) in basis.iter().enumerate() {
                b[offsets[k] + q] = sign * p.weights[k].trace_product(h).re;
            }
        }

        let mut blocks = Vec::with_capacity(bases.len() + p.constraints.len());
        for (k, basis) in bases.iter().enumerate() {
            let d = p.var_dims[k];
            let a = basis
                .iter()
                .enumerate()
                .map(|(q, h)| (offsets[k] + q, embed(h).scaled(-1.0)))
                .collect();
            blocks.push(RealBlock {
                c: Mat::zeros(2 * d),
                a,
            });
        }
        for lmi in &p.constraints {
            let mut images: BTreeMap<usize, ComplexMatrix> = BTreeMap::new();
            for t in &lmi.terms {
                if t.coeff == 0.0 {
                    continue;
                }
                for (q, h) in bases[t.var].iter().enumerate() {
                    let img = t.apply(h);
                    images
                        .entry(offsets[t.var] + q)
                        .and_modify(|acc| *acc += &img)
                        .or_insert(img);
                }
            }
            let a = images
                .into_iter()
                .filter(|(_, img)| img.max_abs() > 0.0)
                .map(|(i, img)| (i, embed(&img).scaled(-1.0)))
                .collect();
            blocks.push(RealBlock {
                c: embed(&lmi.constant),
                a,
            });
        }
        Self {
            m,
            b,
            blocks,
            offsets,
            bases,
        }
    }

    fn variable_blocks(&self, y: &[f64]) -> Vec<ComplexMatrix> {
        self.bases
            .iter()
            .zip(&self.offsets)
            .map(|(basis, &off)| {
                let d = basis[0].rows();
                let mut x = ComplexMatrix::zeros(d, d);
                for (q, h) in basis.iter().enumerate() {
                    x += &h.scale(y[off + q]);
                }
                x
            })
            .collect()
    }

    /// `C − Σ y_i A_i` per block.
    fn slack(&self, y: &[f64]) -> Vec<Mat> {
        self.blocks
            .iter()
            .map(|blk| {
                let mut s = blk.c.clone();
                for (i, a) in &blk.a {
                    s.axpy(-y[*i], a);
                }
                s
            })
            .collect()
    }

    fn apply_a(&self, x: &[Mat]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for (blk, xb) in self.blocks.iter().zip(x) {
            for (i, a) in &blk.a {
                out[*i] += a.dot(xb);
            }
        }
        out
    }

    fn apply_at(&self, dy: &[f64]) -> Vec<Mat> {
        self.blocks
            .iter()
            .map(|blk| {
                let mut s = Mat::zeros(blk.c.n);
                for (i, a) in &blk.a {
                    s.axpy(dy[*i], a);
                }
                s
            })
            .collect()
    }
}

struct Direction {
    dx: Vec<Mat>,
    dy: Vec<f64>,
    dz: Vec<Mat>,
}

/// Solves with default options.
pub fn solve(p: &SdpProblem) -> SdpSolution {
    solve_with(p, &SolverOptions::default(), None)
}

/// Solves with explicit options; when `trace` is given, one line per
/// iteration is written as `iter pobj dobj gap`.
pub fn solve_with(p: &SdpProblem, opts: &SolverOptions, mut trace: Option<&mut dyn Write>) -> SdpSolution {
    let sdp = RealSdp::compile(p);
    let n_total: usize = sdp.blocks.iter().map(|b| b.c.n).sum();
    let m = sdp.m;

    let b_norm = sdp.b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let c_norm = sdp.blocks.iter().map(|b| b.c.norm()).fold(0.0, f64::max);
    let a_norm = sdp
        .blocks
        .iter()
        .flat_map(|b| b.a.iter().map(|(_, a)| a.norm()))
        .fold(0.0, f64::max);
    let xi = (10.0f64)
        .max((n_total as f64).sqrt())
        .max((1.0 + b_norm) / (1.0 + a_norm) * (n_total as f64).sqrt());
    let eta = (10.0f64).max((n_total as f64).sqrt()).max(c_norm).max(a_norm);

    let mut x: Vec<Mat> = sdp.blocks.iter().map(|b| Mat::scaled_identity(b.c.n, xi)).collect();
    let mut z: Vec<Mat> = sdp.blocks.iter().map(|b| Mat::scaled_identity(b.c.n, eta)).collect();
    let mut y = vec![0.0; m];

    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0;
    // Last iterate within `accept_tol`, returned if iterations break down.
    let mut accepted: Option<(Vec<Mat>, Vec<f64>, usize)> = None;

    for iter in 0..=opts.max_iterations {
        iterations = iter;
        let ax = sdp.apply_a(&x);
        let rp: Vec<f64> = sdp.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let slack = sdp.slack(&y);
        let rd: Vec<Mat> = slack.iter().zip(&z).map(|(s, zb)| s - zb).collect();
        let pobj: f64 = sdp.blocks.iter().zip(&x).map(|(b, xb)| b.c.dot(xb)).sum();
        let dobj: f64 = sdp.b.iter().zip(&y).map(|(b, yi)| b * yi).sum();
        let xz: f64 = x.iter().zip(&z).map(|(xb, zb)| xb.dot(zb)).sum();
        let mu = xz / n_total as f64;

        let rp_norm = rp.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let rd_norm = rd
            .iter()
            .map(|r| r.data.iter().fold(0.0f64, |a, v| a.max(v.abs())))
            .fold(0.0, f64::max);

        if let Some(w) = trace.as_deref_mut() {
            let _ = writeln!(w, "{iter} {pobj:.17e} {dobj:.17e} {:.17e}", (pobj - dobj).abs());
        }

        let within = |gap_tol: f64, feas_tol: f64| {
            (pobj - dobj).abs() <= gap_tol
                && xz <= gap_tol
                && rp_norm <= feas_tol * (1.0 + b_norm)
                && rd_norm <= feas_tol * (1.0 + c_norm)
        };
        if within(opts.gap_tol, opts.feas_tol) {
            status = SolveStatus::Optimal;
            break;
        }
        if within(opts.accept_tol, opts.accept_tol) {
            accepted = Some((x.clone(), y.clone(), iter));
        }
        let y_norm = y.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let x_norm = x.iter().map(Mat::trace).sum::<f64>();
        if !y_norm.is_finite() || y_norm > 1e12 || x_norm > 1e14 {
            status = SolveStatus::Infeasible;
            break;
        }
        if iter == opts.max_iterations {
            break;
        }

        let Some(zinv) = z.iter().map(Mat::spd_inverse).collect::<Option<Vec<_>>>() else {
            break;
        };
        let schur = schur_complement(&sdp, &x, &zinv);

        // Predictor
        let rc_aff: Vec<Mat> = x.iter().zip(&z).map(|(xb, zb)| (xb * zb).scaled(-1.0)).collect();
        let Some(aff) = direction(&sdp, &schur, &x, &zinv, &rp, &rd, &rc_aff) else {
            break;
        };
        let ap_aff = step_length(&x, &aff.dx, 1.0);
        let ad_aff = step_length(&z, &aff.dz, 1.0);
        let mut xz_aff = 0.0;
        for k in 0..x.len() {
            let mut xa = x[k].clone();
            xa.axpy(ap_aff, &aff.dx[k]);
            let mut za = z[k].clone();
            za.axpy(ad_aff, &aff.dz[k]);
            xz_aff += xa.dot(&za);
        }
        let mu_aff = xz_aff / n_total as f64;
        let sigma = if mu > 0.0 {
            (mu_aff / mu).clamp(0.0, 1.0).powi(3)
        } else {
            0.0
        };

        // Corrector
        let rc: Vec<Mat> = (0..x.len())
            .map(|k| {
                let mut r = Mat::scaled_identity(x[k].n, sigma * mu);
                r.axpy(-1.0, &(&x[k] * &z[k]));
                r.axpy(-1.0, &(&aff.dx[k] * &aff.dz[k]));
                r
            })
            .collect();
        let Some(dir) = direction(&sdp, &schur, &x, &zinv, &rp, &rd, &rc) else {
            break;
        };
        let (Some((ap, x_next)), Some((ad, z_next))) = (
            advance(&x, &dir.dx, step_length(&x, &dir.dx, opts.step_fraction)),
            advance(&z, &dir.dz, step_length(&z, &dir.dz, opts.step_fraction)),
        ) else {
            break;
        };
        x = x_next;
        z = z_next;
        for (yi, dyi) in y.iter_mut().zip(&dir.dy) {
            *yi += ad * dyi;
        }
        if ap < 1e-12 && ad < 1e-12 {
            break;
        }
    }
    if status == SolveStatus::MaxIterations {
        if let Some((xa, ya, it)) = accepted {
            return finish(p, &sdp, &xa, &ya, SolveStatus::Optimal, it);
        }
    }

    finish(p, &sdp, &x, &y, status, iterations)
}

fn schur_complement(sdp: &RealSdp, x: &[Mat], zinv: &[Mat]) -> Vec<f64> {
    let m = sdp.m;
    let mut schur = vec![0.0; m * m];
    for (k, blk) in sdp.blocks.iter().enumerate() {
        let xk = &x[k];
        let zk = &zinv[k];
        let products: Vec<Mat> = blk.a.iter().map(|(_, a)| &(xk * a) * zk).collect();
        for (jj, (j, _)) in blk.a.iter().enumerate() {
            for (i, ai) in &blk.a {
                schur[i * m + j] += ai.dot(&products[jj]);
            }
        }
    }
    for i in 0..m {
        for j in (i + 1)..m {
            let avg = 0.5 * (schur[i * m + j] + schur[j * m + i]);
            schur[i * m + j] = avg;
            schur[j * m + i] = avg;
        }
    }
    schur
}

/// HKM direction for complementarity right-hand side `rc`
/// (`ΔX Z + X ΔZ = rc`).
fn direction(
    sdp: &RealSdp,
    schur: &[f64],
    x: &[Mat],
    zinv: &[Mat],
    rp: &[f64],
    rd: &[Mat],
    rc: &[Mat],
) -> Option<Direction> {
    let g: Vec<Mat> = (0..x.len())
        .map(|k| {
            let t = &rc[k] - &(&x[k] * &rd[k]);
            &t * &zinv[k]
        })
        .collect();
    let ag = sdp.apply_a(&g);
    let rhs: Vec<f64> = rp.iter().zip(&ag).map(|(r, a)| r - a).collect();
    let dy = solve_system(sdp.m, schur, &rhs)?;
    if dy.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let aty = sdp.apply_at(&dy);
    let dz: Vec<Mat> = rd.iter().zip(&aty).map(|(r, a)| r - a).collect();
    let dx: Vec<Mat> = (0..x.len())
        .map(|k| {
            let t = &rc[k] - &(&x[k] * &dz[k]);
            (&t * &zinv[k]).symmetrized()
        })
        .collect();
    Some(Direction { dx, dy, dz })
}

fn step_length(x: &[Mat], dx: &[Mat], fraction: f64) -> f64 {
    let mut alpha = f64::INFINITY;
    for (xb, dxb) in x.iter().zip(dx) {
        match xb.cholesky() {
            Some(l) => alpha = alpha.min(max_step(&l, dxb)),
            None => return 0.0,
        }
    }
    (fraction * alpha).min(1.0)
}

/// `X + αΔX`, shrinking `α` until the result factors as positive definite.
fn advance(x: &[Mat], dx: &[Mat], mut alpha: f64) -> Option<(f64, Vec<Mat>)> {
    while alpha > 1e-14 {
        let next: Vec<Mat> = x
            .iter()
            .zip(dx)
            .map(|(xb, dxb)| {
                let mut n = xb.clone();
                n.axpy(alpha, dxb);
                n.symmetrized()
            })
            .collect();
        if next.iter().all(|b| b.cholesky().is_some()) {
            return Some((alpha, next));
        }
        alpha *= 0.5;
    }
    None
}

fn finish(p: &SdpProblem, sdp: &RealSdp, x: &[Mat], y: &[f64], status: SolveStatus, iterations: usize) -> SdpSolution {
    let hidden_states = sdp.variable_blocks(y);
    let value = p.objective(&hidden_states);
    let pobj: f64 = sdp.blocks.iter().zip(x).map(|(b, xb)| b.c.dot(xb)).sum();
    let dual_value = match p.sense {
        Sense::Minimize => -pobj + p.offset,
        Sense::Maximize => pobj + p.offset,
    };
    let dual_certificate = x.iter().map(unembed_dual).collect();
    let primal_residual = constraint_eigenvalues(p, &hidden_states)
        .into_iter()
        .fold(0.0f64, |acc, l| acc.max(-l));
    SdpSolution {
        value,
        dual_value,
        hidden_states,
        dual_certificate,
        duality_gap: (value - dual_value).abs(),
        primal_residual,
        status,
        iterations,
    }
}

/// Smallest eigenvalue of every LMI (variable blocks first), evaluated
/// directly on the complex matrices.
fn constraint_eigenvalues(p: &SdpProblem, vars: &[ComplexMatrix]) -> Vec<f64> {
    let mut out: Vec<f64> = vars
        .iter()
        .map(|v| {
            herm_eig(&v.hermitian_part())
                .map(|s| s.min())
                .unwrap_or(f64::NEG_INFINITY)
        })
        .collect();
    for lmi in &p.constraints {
        let m = lmi.evaluate(vars).hermitian_part();
        out.push(herm_eig(&m).map(|s| s.min()).unwrap_or(f64::NEG_INFINITY));
    }
    out
}

/// Independent re-evaluation of a solution against its problem.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    /// `λ_min` of each LMI, variable blocks first.
    pub constraint_min_eigenvalues: Vec<f64>,
    /// Most negative of `constraint_min_eigenvalues` (0 if none are negative).
    pub worst_residual: f64,
    pub objective: f64,
    /// `|objective − reported value|`.
    pub objective_mismatch: f64,
    pub feasible: bool,
}

pub const CERTIFICATE_TOL: f64 = 1e-9;

pub fn check_certificate(p: &SdpProblem, s: &SdpSolution) -> CertificateReport {
    let eigs = constraint_eigenvalues(p, &s.hidden_states);
    let worst = eigs.iter().copied().fold(0.0f64, f64::min);
    let objective = p.objective(&s.hidden_states);
    CertificateReport {
        worst_residual: worst,
        feasible: worst >= -CERTIFICATE_TOL,
        objective_mismatch: (objective - s.value).abs(),
        objective,
        constraint_min_eigenvalues: eigs,
    }
}
