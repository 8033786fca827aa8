use crate::error::{Error, Result};
use crate::matcore::{ComplexMatrix, HERMITIAN_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// `coeff · X_var`, or `coeff · M X_var M†` when `map` is set, inside a
/// linear matrix inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct LmiTerm {
    pub var: usize,
    pub coeff: f64,
    pub map: Option<ComplexMatrix>,
}

impl LmiTerm {
    pub fn new(var: usize, coeff: f64) -> Self {
        Self { var, coeff, map: None }
    }

    /// `coeff · M X_var M†`; `M` is (constraint dim) × (block dim).
    pub fn mapped(var: usize, coeff: f64, map: ComplexMatrix) -> Self {
        Self {
            var,
            coeff,
            map: Some(map),
        }
    }

    pub(crate) fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        match &self.map {
            Some(m) => m.conjugate(x).scale(self.coeff),
            None => x.scale(self.coeff),
        }
    }

    fn output_dim(&self, var_dim: usize) -> Option<usize> {
        match &self.map {
            Some(m) if m.cols() == var_dim => Some(m.rows()),
            Some(_) => None,
            None => Some(var_dim),
        }
    }
}

/// `constant + Σ coeff_k · X_{var_k} ⪰ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LmiConstraint {
    pub constant: ComplexMatrix,
    pub terms: Vec<LmiTerm>,
}

impl LmiConstraint {
    pub fn dim(&self) -> usize {
        self.constant.rows()
    }

    /// Evaluates the affine matrix at the given variable blocks.
    pub fn evaluate(&self, vars: &[ComplexMatrix]) -> ComplexMatrix {
        let mut m = self.constant.clone();
        for t in &self.terms {
            m += &t.apply(&vars[t.var]);
        }
        m
    }
}

/// Semidefinite program over Hermitian variable blocks `X_k ⪰ 0`:
///
/// ```text
/// optimize   Σ_k Re tr(W_k X_k) + offset
/// subject to X_k ⪰ 0,  constant_j + Σ coeff · X_var ⪰ 0  for every j
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub(crate) sense: Sense,
    pub(crate) var_dims: Vec<usize>,
    pub(crate) weights: Vec<ComplexMatrix>,
    pub(crate) offset: f64,
    pub(crate) constraints: Vec<LmiConstraint>,
}

impl SdpProblem {
    pub fn new(sense: Sense) -> Self {
        Self {
            sense,
            var_dims: Vec::new(),
            weights: Vec::new(),
            offset: 0.0,
            constraints: Vec::new(),
        }
    }

    /// Adds a positive semidefinite Hermitian block with objective weight
    /// `weight` (`tr(W X)` enters the objective). Returns its index.
    pub fn add_block(&mut self, weight: ComplexMatrix) -> Result<usize> {
        let dev = weight.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        self.var_dims.push(weight.rows());
        self.weights.push(weight);
        Ok(self.var_dims.len() - 1)
    }

    pub fn set_offset(&mut self, offset: f64) {
        self.offset = offset;
    }

    pub fn add_constraint(&mut self, constant: ComplexMatrix, terms: Vec<LmiTerm>) -> Result<()> {
        let dev = constant.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        for t in &terms {
            let Some(&d) = self.var_dims.get(t.var) else {
                return Err(Error::InvalidProblem(format!("unknown variable block {}", t.var)));
            };
            if t.output_dim(d) != Some(constant.rows()) {
                return Err(Error::InvalidProblem(format!(
                    "block {} has dimension {d}, constraint has {}",
                    t.var,
                    constant.rows()
                )));
            }
            if !t.coeff.is_finite()
                || t.map
                    .as_ref()
                    .is_some_and(|m| m.as_slice().iter().any(|z| !z.is_finite()))
            {
                return Err(Error::InvalidProblem("non-finite coefficient".into()));
            }
        }
        self.constraints.push(LmiConstraint { constant, terms });
        Ok(())
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn var_dims(&self) -> &[usize] {
        &self.var_dims
    }

    pub fn constraints(&self) -> &[LmiConstraint] {
        &self.constraints
    }

    /// Objective evaluated at the given blocks.
    pub fn objective(&self, vars: &[ComplexMatrix]) -> f64 {
        self.weights
            .iter()
            .zip(vars)
            .map(|(w, x)| w.trace_product(x).re)
            .sum::<f64>()
            + self.offset
    }
}
