//! Qubit dynamics: closed-form damping channels, a generic Lindblad
//! integrator and unitary evolution. `ℏ = 1` throughout.
//!
//! Basis convention for the damping channels: `|0⟩` is the excited state and
//! `|1⟩` the ground state, so `σ₋ = |1⟩⟨0|` and amplitude damping relaxes
//! populations toward `|1⟩⟨1|`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{herm_eig, pauli, ComplexMatrix, DensityMatrix, HERMITIAN_TOL, ONE, ZERO};

/// `σ₊ = |0⟩⟨1|` (ground → excited).
pub fn sigma_plus() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![ZERO, ONE, ZERO, ZERO]).unwrap()
}

/// `σ₋ = |1⟩⟨0|` (excited → ground).
pub fn sigma_minus() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![ZERO, ZERO, ONE, ZERO]).unwrap()
}

/// Time-independent Lindblad generator
/// `ρ̇ = −i[H, ρ] + Σ_k γ_k (L_k ρ L_k† − ½{L_k† L_k, ρ})`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladGenerator {
    hamiltonian: ComplexMatrix,
    jumps: Vec<(f64, ComplexMatrix)>,
}

impl LindbladGenerator {
    pub fn new(hamiltonian: ComplexMatrix, jumps: Vec<(f64, ComplexMatrix)>) -> Result<Self> {
        let dev = hamiltonian.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let d = hamiltonian.rows();
        for (rate, op) in &jumps {
            check_rate(*rate)?;
            if op.rows() != d || op.cols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "jump operator is {}x{}, Hamiltonian is {d}x{d}",
                    op.rows(),
                    op.cols()
                )));
            }
        }
        Ok(Self { hamiltonian, jumps })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.rows()
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[(f64, ComplexMatrix)] {
        &self.jumps
    }

    fn max_rate(&self) -> f64 {
        let h = self.hamiltonian.max_abs() * self.dim() as f64;
        self.jumps.iter().map(|(g, _)| *g).fold(h, f64::max)
    }

    /// Applies the generator to an arbitrary operator.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.hamiltonian.commutator(rho).scale_c(Complex64::new(0.0, -1.0));
        for (rate, l) in &self.jumps {
            if *rate == 0.0 {
                continue;
            }
            let ld = l.dagger();
            let ldl = &ld * l;
            let term = &(&(l * rho) * &ld) - &ldl.anticommutator(rho).scale(0.5);
            out += &term.scale(*rate);
        }
        out
    }
}

/// Dynamics map from `t₁ = 0` to `t₂ = t`.
#[derive(Debug, Clone, PartialEq)]
pub enum Channel {
    AmplitudeDamping { rate: f64 },
    PhaseDamping { rate: f64 },
    Depolarizing { rate: f64 },
    Unitary { hamiltonian: ComplexMatrix },
    Lindblad(LindbladGenerator),
}

fn check_rate(rate: f64) -> Result<()> {
    if rate.is_finite() && rate >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidRate(rate))
    }
}

impl Channel {
    pub fn amplitude_damping(rate: f64) -> Result<Self> {
        check_rate(rate)?;
        Ok(Self::AmplitudeDamping { rate })
    }

    pub fn phase_damping(rate: f64) -> Result<Self> {
        check_rate(rate)?;
        Ok(Self::PhaseDamping { rate })
    }

    pub fn depolarizing(rate: f64) -> Result<Self> {
        check_rate(rate)?;
        Ok(Self::Depolarizing { rate })
    }

    pub fn unitary(hamiltonian: ComplexMatrix) -> Result<Self> {
        let dev = hamiltonian.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self::Unitary { hamiltonian })
    }

    /// The identity map on a `dim`-dimensional system (`H = 0`).
    pub fn identity(dim: usize) -> Self {
        Self::Unitary {
            hamiltonian: ComplexMatrix::zeros(dim, dim),
        }
    }

    /// Qubit precessing about `axis` at angular frequency `omega`:
    /// `H = ω (n·σ)/2`.
    pub fn precession(omega: f64, axis: [f64; 3]) -> Result<Self> {
        Self::unitary(pauli::dot(axis).scale(0.5 * omega))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::AmplitudeDamping { .. } | Self::PhaseDamping { .. } | Self::Depolarizing { .. } => 2,
            Self::Unitary { hamiltonian } => hamiltonian.rows(),
            Self::Lindblad(g) => g.dim(),
        }
    }

    pub fn is_qubit(&self) -> bool {
        self.dim() == 2
    }

    /// Lindblad form of the channel, used to cross-check closed forms.
    pub fn generator(&self) -> LindbladGenerator {
        let zero2 = ComplexMatrix::zeros(2, 2);
        match self {
            Self::AmplitudeDamping { rate } => LindbladGenerator {
                hamiltonian: zero2,
                jumps: vec![(*rate, sigma_minus())],
            },
            // γ/4 (2ZρZ − 2ρ) = (γ/2)(ZρZ − ρ)
            Self::PhaseDamping { rate } => LindbladGenerator {
                hamiltonian: zero2,
                jumps: vec![(rate / 2.0, pauli::z())],
            },
            // γ/8 Σ_i (2σ_iρσ_i − 2ρ), Bloch vector decays as e^{−γt}
            Self::Depolarizing { rate } => LindbladGenerator {
                hamiltonian: zero2,
                jumps: (1..4).map(|k| (rate / 4.0, pauli::sigma(k))).collect(),
            },
            Self::Unitary { hamiltonian } => LindbladGenerator {
                hamiltonian: hamiltonian.clone(),
                jumps: Vec::new(),
            },
            Self::Lindblad(g) => g.clone(),
        }
    }

    /// Applies the (linear) channel to an arbitrary operator, not only to
    /// states. Needed for `E(σ_i)` and `E(E_{a|x})`.
    pub fn apply(&self, m: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        if m.rows() != self.dim() || m.cols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, channel acts on dimension {}",
                m.rows(),
                m.cols(),
                self.dim()
            )));
        }
        let out = match self {
            Self::AmplitudeDamping { rate } => {
                let e = (-rate * t).exp();
                let c = (-rate * t / 2.0).exp();
                let mut out = m.clone();
                out[(0, 0)] = m[(0, 0)] * e;
                out[(1, 1)] = m[(1, 1)] + m[(0, 0)] * (1.0 - e);
                out[(0, 1)] = m[(0, 1)] * c;
                out[(1, 0)] = m[(1, 0)] * c;
                out
            }
            Self::PhaseDamping { rate } => {
                let c = (-rate * t).exp();
                let mut out = m.clone();
                out[(0, 1)] = m[(0, 1)] * c;
                out[(1, 0)] = m[(1, 0)] * c;
                out
            }
            Self::Depolarizing { rate } => {
                let e = (-rate * t).exp();
                let mixed = ComplexMatrix::identity(2).scale_c(m.trace() * 0.5);
                &m.scale(e) + &mixed.scale(1.0 - e)
            }
            Self::Unitary { hamiltonian } => {
                let u = propagator(hamiltonian, t)?;
                u.conjugate(m)
            }
            Self::Lindblad(g) => {
                let dt = default_step(g, t);
                integrate_rk4(g, m, t, dt)
            }
        };
        Ok(out)
    }
}

fn default_step(g: &LindbladGenerator, t: f64) -> f64 {
    let scale = g.max_rate();
    let dt = if scale > 0.0 { 1e-3 / scale } else { t.max(1.0) };
    dt.min(t.max(f64::MIN_POSITIVE))
}

/// `e^{−iHt}` via the spectral decomposition of `H`.
pub fn propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let spec = herm_eig(h)?;
    Ok(spec.map(|e| Complex64::from_polar(1.0, -e * t)))
}

/// Evolves a state through `ch` for time `t`.
pub fn evolve(ch: &Channel, rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    let m = ch.apply(rho.matrix(), t)?;
    Ok(DensityMatrix::from_trusted(m, rho.dims().to_vec()))
}

/// Fourth-order Runge–Kutta integration of a Lindblad generator with step
/// `dt`; the last step is shortened to land exactly on `t`.
pub fn evolve_rk4(gen: &LindbladGenerator, rho: &DensityMatrix, t: f64, dt: f64) -> Result<DensityMatrix> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidStep(dt));
    }
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if rho.dim() != gen.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} vs generator dimension {}",
            rho.dim(),
            gen.dim()
        )));
    }
    let m = integrate_rk4(gen, rho.matrix(), t, dt);
    Ok(DensityMatrix::from_trusted(m, rho.dims().to_vec()))
}

fn integrate_rk4(gen: &LindbladGenerator, m: &ComplexMatrix, t: f64, dt: f64) -> ComplexMatrix {
    let mut rho = m.clone();
    let steps = (t / dt).ceil() as usize;
    let mut elapsed = 0.0;
    for k in 0..steps {
        let h = if k + 1 == steps { t - elapsed } else { dt };
        if h <= 0.0 {
            break;
        }
        let k1 = gen.apply(&rho);
        let k2 = gen.apply(&(&rho + &k1.scale(h / 2.0)));
        let k3 = gen.apply(&(&rho + &k2.scale(h / 2.0)));
        let k4 = gen.apply(&(&rho + &k3.scale(h)));
        let mut incr = k1;
        incr += &k2.scale(2.0);
        incr += &k3.scale(2.0);
        incr += &k4;
        rho += &incr.scale(h / 6.0);
        elapsed += h;
    }
    rho
}

/// `e^{−iHt} ρ e^{+iHt}`.
pub fn unitary_evolve(h: &ComplexMatrix, rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    let dev = h.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    if h.rows() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian dimension {} vs state dimension {}",
            h.rows(),
            rho.dim()
        )));
    }
    let u = propagator(h, t)?;
    Ok(DensityMatrix::from_trusted(
        u.conjugate(rho.matrix()),
        rho.dims().to_vec(),
    ))
}

/// Exchange coupling `J (σ₊ᵃσ₋ᵇ + σ₋ᵃσ₊ᵇ)` between qubits `a` and `b` of an
/// `n`-qubit register.
pub fn exchange_hamiltonian(n: usize, a: usize, b: usize, coupling: f64) -> ComplexMatrix {
    assert!(a < n && b < n && a != b);
    let embed = |site_a: &ComplexMatrix, site_b: &ComplexMatrix| {
        let factors: Vec<ComplexMatrix> = (0..n)
            .map(|k| {
                if k == a {
                    site_a.clone()
                } else if k == b {
                    site_b.clone()
                } else {
                    ComplexMatrix::identity(2)
                }
            })
            .collect();
        crate::matcore::kron_all(&factors)
    };
    let (sp, sm) = (sigma_plus(), sigma_minus());
    (&embed(&sp, &sm) + &embed(&sm, &sp)).scale(coupling)
}
