//! Temporal CHSH and Leggett–Garg correlations.
//!
//! Outcomes are dichotomic with index 0 standing for `+1`.

use std::f64::consts::{PI, SQRT_2};

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::matcore::{sym_eig, DensityMatrix};
use crate::pdm::{build_pdm, PseudoDensityMatrix};
use crate::steering::Measurement;
use crate::sweep;

const SIGNS: [f64; 2] = [1.0, -1.0];

/// `p(a, b | x, y)` for dichotomic outcomes, stored `[x][y][a][b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTable {
    probs: Vec<Vec<[[f64; 2]; 2]>>,
}

impl CorrelationTable {
    pub fn new(probs: Vec<Vec<[[f64; 2]; 2]>>) -> Result<Self> {
        if probs.is_empty() || probs[0].is_empty() || probs.iter().any(|r| r.len() != probs[0].len()) {
            return Err(Error::InvalidProbabilities("ragged or empty table".into()));
        }
        for (x, row) in probs.iter().enumerate() {
            for (y, p) in row.iter().enumerate() {
                let flat = p.iter().flatten();
                if flat.clone().any(|&v| !(-1e-12..=1.0 + 1e-12).contains(&v)) {
                    return Err(Error::InvalidProbabilities(format!(
                        "entry outside [0, 1] at ({x}, {y})"
                    )));
                }
                let total: f64 = flat.sum();
                if (total - 1.0).abs() > 1e-10 {
                    return Err(Error::InvalidProbabilities(format!("({x}, {y}) sums to {total}")));
                }
            }
        }
        Ok(Self { probs })
    }

    pub fn n_x(&self) -> usize {
        self.probs.len()
    }

    pub fn n_y(&self) -> usize {
        self.probs[0].len()
    }

    pub fn probability(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.probs[x][y][a][b]
    }

    /// `C_xy = Σ_ab a·b·p(a, b | x, y)`.
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        let p = &self.probs[x][y];
        let mut c = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                c += SIGNS[a] * SIGNS[b] * p[a][b];
            }
        }
        c
    }
}

/// Joint distribution of a Lüders measurement at time 0 and a second
/// measurement after `ch` has acted for time `t`.
fn joint(
    ch: &Channel,
    rho0: &DensityMatrix,
    first: &Measurement,
    second: &Measurement,
    t: f64,
) -> Result<[[f64; 2]; 2]> {
    let mut p = [[0.0; 2]; 2];
    for (a, row) in p.iter_mut().enumerate() {
        let evolved = ch.apply(&first.luders(a, rho0.matrix())?, t)?;
        for (b, pab) in row.iter_mut().enumerate() {
            *pab = second.effect(b).trace_product(&evolved).re;
        }
    }
    Ok(p)
}

fn settings(dirs: &[[f64; 3]]) -> Result<Vec<Measurement>> {
    dirs.iter().map(|&d| Measurement::projective(d)).collect()
}

/// `p(a, b | x, y) = tr[E_{b|y} E_t(√E_{a|x} ρ0 √E_{a|x})]`.
pub fn correlations(
    ch: &Channel,
    rho0: &DensityMatrix,
    dirs_t1: &[[f64; 3]],
    dirs_t2: &[[f64; 3]],
    t: f64,
) -> Result<CorrelationTable> {
    if !ch.is_qubit() || rho0.dim() != 2 {
        return Err(Error::NonQubitChannel);
    }
    let first = settings(dirs_t1)?;
    let second = settings(dirs_t2)?;
    let probs = first
        .iter()
        .map(|m1| {
            second
                .iter()
                .map(|m2| joint(ch, rho0, m1, m2, t))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    CorrelationTable::new(probs)
}

/// `C_xy + C_x'y + C_xy' − C_x'y'` with `x, y` the first settings.
pub fn tchsh_kernel(tbl: &CorrelationTable) -> f64 {
    tbl.correlator(0, 0) + tbl.correlator(1, 0) + tbl.correlator(0, 1) - tbl.correlator(1, 1)
}

/// Maps a kernel value onto `[0, 1]`: `max{0, (B − 2)/(2√2 − 2)}`.
pub fn normalize_kernel(b: f64) -> f64 {
    ((b - 2.0) / (2.0 * SQRT_2 - 2.0)).max(0.0)
}

/// Largest kernel over all settings, `2√(s₁² + s₂²)` from the two largest
/// singular values of the 3x3 correlation block of `r`.
pub fn tchsh_kernel_max(r: &PseudoDensityMatrix) -> f64 {
    let t = r.correlation_block();
    let mut tt = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            tt[3 * i + j] = (0..3).map(|k| t[3 * k + i] * t[3 * k + j]).sum();
        }
    }
    let (vals, _) = sym_eig(3, &tt);
    2.0 * (vals[2].max(0.0) + vals[1].max(0.0)).sqrt()
}

/// Normalized optimum of the temporal CHSH kernel for `ch` at time `t`,
/// starting from `I/2`.
pub fn tchsh_max(ch: &Channel, t: f64) -> Result<f64> {
    let r = build_pdm(ch, &DensityMatrix::maximally_mixed(vec![2]), t)?;
    Ok(normalize_kernel(tchsh_kernel_max(&r)))
}

/// Result of the direct settings search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSearch {
    pub kernel: f64,
    pub dirs_t1: [[f64; 3]; 2],
    pub dirs_t2: [[f64; 3]; 2],
}

fn unit(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn add(u: [f64; 3], v: [f64; 3], s: f64) -> [f64; 3] {
    [u[0] + s * v[0], u[1] + s * v[1], u[2] + s * v[2]]
}

fn norm(u: [f64; 3]) -> f64 {
    u.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normalized(u: [f64; 3], fallback: [f64; 3]) -> [f64; 3] {
    let n = norm(u);
    if n < 1e-14 {
        fallback
    } else {
        [u[0] / n, u[1] / n, u[2] / n]
    }
}

const AXES: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// Two-time correlator `C(a, b)` for projective settings along `a` then `b`,
/// evaluated from joint outcome probabilities.
struct BornCorrelator<'a> {
    ch: &'a Channel,
    rho0: DensityMatrix,
    t: f64,
}

impl BornCorrelator<'_> {
    fn value(&self, a: [f64; 3], b: [f64; 3]) -> Result<f64> {
        let tbl = correlations(self.ch, &self.rho0, &[a], &[b], self.t)?;
        Ok(tbl.correlator(0, 0))
    }

    /// `(C(e₁, b), C(e₂, b), C(e₃, b))`: for a maximally mixed start the
    /// correlator is linear in `a`, so the best first-time direction for a
    /// fixed `b` is along this vector.
    fn left(&self, b: [f64; 3]) -> Result<[f64; 3]> {
        Ok([
            self.value(AXES[0], b)?,
            self.value(AXES[1], b)?,
            self.value(AXES[2], b)?,
        ])
    }

    fn right(&self, a: [f64; 3]) -> Result<[f64; 3]> {
        Ok([
            self.value(a, AXES[0])?,
            self.value(a, AXES[1])?,
            self.value(a, AXES[2])?,
        ])
    }

    fn kernel(&self, a: [[f64; 3]; 2], b: [[f64; 3]; 2]) -> Result<f64> {
        let tbl = correlations(self.ch, &self.rho0, &a, &b, self.t)?;
        Ok(tchsh_kernel(&tbl))
    }
}

/// Direct maximization of the kernel over four Bloch vectors, using only
/// outcome probabilities. A coarse grid over the two second-time settings
/// (with the first-time pair chosen optimally) seeds alternating
/// maximization over the two pairs.
pub fn tchsh_search(ch: &Channel, t: f64) -> Result<ChshSearch> {
    if !ch.is_qubit() {
        return Err(Error::NonQubitChannel);
    }
    let born = BornCorrelator {
        ch,
        rho0: DensityMatrix::maximally_mixed(vec![2]),
        t,
    };
    let (n_theta, n_phi) = (7, 12);
    let mut grid = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        for j in 0..n_phi {
            let theta = PI * (i as f64 + 0.5) / n_theta as f64;
            let phi = 2.0 * PI * j as f64 / n_phi as f64;
            grid.push(unit(theta, phi));
        }
    }
    let lefts = sweep::map(&grid, |&b| born.left(b))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let scores = sweep::map(&(0..grid.len()).collect::<Vec<_>>(), |&i| {
        let mut best = (f64::NEG_INFINITY, 0);
        for j in 0..grid.len() {
            let s = norm(add(lefts[i], lefts[j], 1.0)) + norm(add(lefts[i], lefts[j], -1.0));
            if s > best.0 {
                best = (s, j);
            }
        }
        (best.0, i, best.1)
    });
    let (_, bi, bj) = scores
        .into_iter()
        .fold((f64::NEG_INFINITY, 0, 0), |acc, s| if s.0 > acc.0 { s } else { acc });

    let mut b = [grid[bi], grid[bj]];
    let mut a = [AXES[2], AXES[0]];
    let mut best = f64::NEG_INFINITY;
    for _ in 0..500 {
        let (l0, l1) = (born.left(b[0])?, born.left(b[1])?);
        a = [normalized(add(l0, l1, 1.0), a[0]), normalized(add(l0, l1, -1.0), a[1])];
        let (r0, r1) = (born.right(a[0])?, born.right(a[1])?);
        b = [normalized(add(r0, r1, 1.0), b[0]), normalized(add(r0, r1, -1.0), b[1])];
        let k = born.kernel(a, b)?;
        if k <= best + 1e-13 {
            best = best.max(k);
            break;
        }
        best = k;
    }
    Ok(ChshSearch {
        kernel: best,
        dirs_t1: a,
        dirs_t2: b,
    })
}

/// Correlator of `q̂·σ` measured at time 0 (Lüders) and again after `ch`
/// has acted for `tau`, starting from `rho`.
pub fn two_time_correlator(ch: &Channel, rho: &DensityMatrix, q: [f64; 3], tau: f64) -> Result<f64> {
    let m = Measurement::projective(q)?;
    let p = joint(ch, rho, &m, &m, tau)?;
    Ok(p[0][0] - p[0][1] - p[1][0] + p[1][1])
}

/// `K = C₁₂ + C₂₃ − C₁₃` for `Q = q̂·σ` measured at `0`, `t12` and
/// `t12 + t23`; each correlator comes from its own two-measurement run.
pub fn lg_parameter(ch: &Channel, rho0: &DensityMatrix, q: [f64; 3], t12: f64, t23: f64) -> Result<f64> {
    if rho0.dim() != ch.dim() {
        return Err(Error::DimensionMismatch("state and channel dimensions differ".into()));
    }
    let c12 = two_time_correlator(ch, rho0, q, t12)?;
    let rho_t2 = DensityMatrix::from_trusted(ch.apply(rho0.matrix(), t12)?, rho0.dims().to_vec());
    let c23 = two_time_correlator(ch, &rho_t2, q, t23)?;
    let c13 = two_time_correlator(ch, rho0, q, t12 + t23)?;
    Ok(c12 + c23 - c13)
}
