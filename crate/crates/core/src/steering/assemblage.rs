use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::matcore::{min_eigenvalue, trace_norm, ComplexMatrix, DensityMatrix};

use super::Measurement;

/// Normalization and positivity tolerance for assemblage members.
pub const ASSEMBLAGE_TOL: f64 = 1e-10;

/// Subnormalized conditional states `ρ_{a|x}`, indexed `[x][a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assemblage {
    n_x: usize,
    n_a: usize,
    members: Vec<Vec<ComplexMatrix>>,
}

impl Assemblage {
    pub fn new(members: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        let n_x = members.len();
        if n_x == 0 {
            return Err(Error::InvalidAssemblage("no settings".into()));
        }
        let n_a = members[0].len();
        if n_a == 0 {
            return Err(Error::InvalidAssemblage("no outcomes".into()));
        }
        let d = members[0][0].rows();
        let mut clean = Vec::with_capacity(n_x);
        for (x, row) in members.into_iter().enumerate() {
            if row.len() != n_a {
                return Err(Error::InvalidAssemblage(format!(
                    "setting {x} has {} outcomes, expected {n_a}",
                    row.len()
                )));
            }
            let mut total = 0.0;
            let mut kept = Vec::with_capacity(n_a);
            for (a, m) in row.into_iter().enumerate() {
                if !m.is_square() || m.rows() != d {
                    return Err(Error::DimensionMismatch(format!(
                        "member ({a}|{x}) has the wrong shape"
                    )));
                }
                let dev = m.hermitian_deviation();
                if dev > ASSEMBLAGE_TOL {
                    return Err(Error::NotHermitian(dev));
                }
                let min = min_eigenvalue(&m.hermitian_part())?;
                if min < -ASSEMBLAGE_TOL {
                    return Err(Error::InvalidAssemblage(format!(
                        "member ({a}|{x}) has eigenvalue {min:.3e}"
                    )));
                }
                total += m.trace().re;
                kept.push(m.hermitian_part());
            }
            if (total - 1.0).abs() > ASSEMBLAGE_TOL {
                return Err(Error::InvalidAssemblage(format!(
                    "members of setting {x} have total trace {total}"
                )));
            }
            clean.push(kept);
        }
        Ok(Self {
            n_x,
            n_a,
            members: clean,
        })
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn dim(&self) -> usize {
        self.members[0][0].rows()
    }

    pub fn member(&self, x: usize, a: usize) -> &ComplexMatrix {
        &self.members[x][a]
    }

    pub fn members(&self) -> &[Vec<ComplexMatrix>] {
        &self.members
    }

    /// `p(a|x) = tr ρ_{a|x}`.
    pub fn probability(&self, x: usize, a: usize) -> f64 {
        self.members[x][a].trace().re
    }

    /// Normalized conditional state, or `None` for outcomes of
    /// probability below `1e-12`.
    pub fn conditional_state(&self, x: usize, a: usize) -> Option<ComplexMatrix> {
        let p = self.probability(x, a);
        (p >= 1e-12).then(|| self.members[x][a].scale(1.0 / p))
    }

    /// `Σ_a ρ_{a|x}`.
    pub fn marginal(&self, x: usize) -> ComplexMatrix {
        let d = self.dim();
        self.members[x]
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, m| &acc + m)
    }

    /// Convex combination `μ·self + (1 − μ)·other`.
    pub fn mix(&self, other: &Self, mu: f64) -> Result<Self> {
        if self.n_x != other.n_x || self.n_a != other.n_a || self.dim() != other.dim() {
            return Err(Error::InvalidAssemblage("mixing assemblages of different shape".into()));
        }
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::InvalidProbabilities(format!("mixing weight {mu}")));
        }
        let members = self
            .members
            .iter()
            .zip(&other.members)
            .map(|(r1, r2)| {
                r1.iter()
                    .zip(r2)
                    .map(|(a, b)| &a.scale(mu) + &b.scale(1.0 - mu))
                    .collect()
            })
            .collect();
        Self::new(members)
    }

    /// Applies `ch` for time `t` to every member.
    pub fn evolve(&self, ch: &Channel, t: f64) -> Result<Self> {
        let members = self
            .members
            .iter()
            .map(|row| row.iter().map(|m| ch.apply(m, t)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }
}

/// All `n_a^{n_x}` deterministic response functions `λ: x → a`. Strategy
/// `λ` answers `(λ / n_a^x) mod n_a` to setting `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterministicStrategySet {
    n_x: usize,
    n_a: usize,
    tables: Vec<Vec<usize>>,
}

impl DeterministicStrategySet {
    pub fn new(n_x: usize, n_a: usize) -> Self {
        let count = n_a.pow(n_x as u32);
        let tables = (0..count)
            .map(|mut lambda| {
                (0..n_x)
                    .map(|_| {
                        let a = lambda % n_a;
                        lambda /= n_a;
                        a
                    })
                    .collect()
            })
            .collect();
        Self { n_x, n_a, tables }
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn outcome(&self, lambda: usize, x: usize) -> usize {
        self.tables[lambda][x]
    }

    /// `D_λ(a|x) ∈ {0, 1}`.
    pub fn d(&self, lambda: usize, a: usize, x: usize) -> f64 {
        if self.tables[lambda][x] == a {
            1.0
        } else {
            0.0
        }
    }

    /// Strategies answering `a` to setting `x`.
    pub fn answering(&self, a: usize, x: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&l| self.tables[l][x] == a)
    }
}

/// `ρ_{a|x}(t) = E_t(√E_{a|x} ρ0 √E_{a|x})`.
pub fn make_assemblage(rho0: &DensityMatrix, settings: &[Measurement], ch: &Channel, t: f64) -> Result<Assemblage> {
    if rho0.dim() != ch.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} vs channel dimension {}",
            rho0.dim(),
            ch.dim()
        )));
    }
    let Some(first) = settings.first() else {
        return Err(Error::InvalidAssemblage("no settings".into()));
    };
    let n_a = first.n_outcomes();
    let mut members = Vec::with_capacity(settings.len());
    for m in settings {
        if m.dim() != rho0.dim() {
            return Err(Error::DimensionMismatch(format!(
                "measurement dimension {} vs state dimension {}",
                m.dim(),
                rho0.dim()
            )));
        }
        if m.n_outcomes() != n_a {
            return Err(Error::InvalidMeasurement("settings differ in outcome count".into()));
        }
        let row = (0..n_a)
            .map(|a| ch.apply(&m.luders(a, rho0.matrix())?, t))
            .collect::<Result<Vec<_>>>()?;
        members.push(row);
    }
    Assemblage::new(members)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NsitReport {
    pub holds: bool,
    /// Largest trace distance `½‖Σ_a ρ_{a|x} − Σ_a ρ_{a|x'}‖₁` over setting pairs.
    pub deviation: f64,
}

/// No-signalling in time: the outcome-summed state must not depend on `x`.
pub fn nsit_check(asm: &Assemblage) -> Result<NsitReport> {
    let marginals: Vec<ComplexMatrix> = (0..asm.n_x()).map(|x| asm.marginal(x)).collect();
    let mut deviation: f64 = 0.0;
    for x in 0..marginals.len() {
        for y in (x + 1)..marginals.len() {
            deviation = deviation.max(0.5 * trace_norm(&(&marginals[x] - &marginals[y]))?);
        }
    }
    Ok(NsitReport {
        holds: deviation <= ASSEMBLAGE_TOL,
        deviation,
    })
}
