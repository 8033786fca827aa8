use crate::error::{Error, Result};
use crate::matcore::{min_eigenvalue, pauli, psd_sqrt, ComplexMatrix, PSD_TOL};

/// Tolerance for unit Bloch vectors and effect completeness.
pub const UNIT_TOL: f64 = 1e-10;

/// A POVM `{E_a}`. For dichotomic qubit settings outcome index 0 is `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    effects: Vec<ComplexMatrix>,
}

impl Measurement {
    /// Projective measurement of `n̂·σ`: `E_± = (I ± n̂·σ)/2`.
    pub fn projective(dir: [f64; 3]) -> Result<Self> {
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NonUnitVector(norm));
        }
        let n = pauli::dot(dir);
        let id = ComplexMatrix::identity(2);
        Ok(Self {
            effects: vec![(&id + &n).scale(0.5), (&id - &n).scale(0.5)],
        })
    }

    pub fn from_effects(effects: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = effects.first() else {
            return Err(Error::InvalidMeasurement("no effects".into()));
        };
        let d = first.rows();
        let mut total = ComplexMatrix::zeros(d, d);
        for e in &effects {
            if !e.is_square() || e.rows() != d {
                return Err(Error::InvalidMeasurement("effects differ in dimension".into()));
            }
            let dev = e.hermitian_deviation();
            if dev > UNIT_TOL {
                return Err(Error::NotHermitian(dev));
            }
            let min = min_eigenvalue(e)?;
            if min < -PSD_TOL {
                return Err(Error::InvalidMeasurement(format!("effect has eigenvalue {min:.3e}")));
            }
            total += e;
        }
        let dev = total.max_abs_diff(&ComplexMatrix::identity(d));
        if dev > UNIT_TOL {
            return Err(Error::InvalidMeasurement(format!(
                "effects sum to identity only within {dev:.3e}"
            )));
        }
        Ok(Self {
            effects: effects.into_iter().map(|e| e.hermitian_part()).collect(),
        })
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn effect(&self, a: usize) -> &ComplexMatrix {
        &self.effects[a]
    }

    pub fn n_outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].rows()
    }

    /// `E_a² = E_a` for every effect.
    pub fn is_projective(&self) -> bool {
        self.effects.iter().all(|e| (e * e).max_abs_diff(e) <= UNIT_TOL)
    }

    /// Unnormalized Lüders update `√E_a ρ √E_a`.
    pub fn luders(&self, a: usize, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let e = &self.effects[a];
        if self.is_projective() {
            return Ok(e.conjugate(rho));
        }
        Ok(psd_sqrt(e)?.conjugate(rho))
    }
}

/// Mutually unbiased qubit bases: `{Z}`, `{X, Z}` or `{X, Y, Z}`.
pub fn mubs(n: usize) -> Result<Vec<Measurement>> {
    let dirs: &[[f64; 3]] = match n {
        1 => &[[0.0, 0.0, 1.0]],
        2 => &[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
        3 => &[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        _ => {
            return Err(Error::InvalidMeasurement(format!(
                "a qubit has at most 3 mutually unbiased bases, asked for {n}"
            )))
        }
    };
    dirs.iter().map(|&d| Measurement::projective(d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projective_effects() {
        let m = Measurement::projective([0.0, 0.0, 1.0]).unwrap();
        assert_eq!(m.effect(0), &ComplexMatrix::from_diagonal(&[1.0, 0.0]));
        assert_eq!(m.effect(1), &ComplexMatrix::from_diagonal(&[0.0, 1.0]));
        assert!(m.is_projective());
        assert!(matches!(
            Measurement::projective([1.0, 1.0, 0.0]),
            Err(Error::NonUnitVector(_))
        ));
    }

    #[test]
    fn unsharp_povm_is_not_projective() {
        let z = pauli::z();
        let id = ComplexMatrix::identity(2);
        let m = Measurement::from_effects(vec![(&id + &z.scale(0.6)).scale(0.5), (&id - &z.scale(0.6)).scale(0.5)])
            .unwrap();
        assert!(!m.is_projective());
        let incomplete = Measurement::from_effects(vec![id.scale(0.4)]);
        assert!(matches!(incomplete, Err(Error::InvalidMeasurement(_))));
    }

    #[test]
    fn mub_overlaps() {
        let m = mubs(3).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                let ov = m[x].effect(0).trace_product(m[y].effect(0)).re;
                let want = if x == y { 1.0 } else { 0.5 };
                assert!((ov - want).abs() < 1e-15);
            }
        }
        assert!(mubs(4).is_err());
    }
}
