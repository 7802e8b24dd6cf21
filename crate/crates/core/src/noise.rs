//! System-environment coupling models and joint Hamiltonian assembly.
//!
//! Joint-space ordering is always system qubits first, then environment
//! qubits. With one environment qubit per system qubit, environment qubit `q`
//! is paired with system qubit `q`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{kron, kron_all, ComplexMatrix, StateVector};
use crate::pauli::{sigma_x, sigma_y, sigma_z, sigma_z as pauli_z};
use crate::tolerance::HERMITIAN_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    /// Each system qubit couples to its own environment qubit.
    #[default]
    OneEnvPerSystemQubit,
    /// All system qubits couple to one environment qubit.
    SingleSharedEnv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EnvInit {
    /// Every environment qubit in `|0⟩`.
    #[default]
    Ground,
    /// Every environment qubit in `(|0⟩ + |1⟩)/√2`.
    Plus,
    /// Average over the environment computational basis, i.e. `I/d`.
    MixedAverage,
}

/// Bath self-Hamiltonian `H_E`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BathHamiltonian {
    #[default]
    Zero,
    /// `ω σ_z / 2` on every environment qubit.
    Zeeman { omega: f64 },
    /// Arbitrary Hermitian matrix on the whole environment space.
    Custom { matrix: ComplexMatrix },
}

/// Operators `(B̂_x, B̂_y, B̂_z)` in `H_I = ε Σ_q Σ_μ σ_μ^{(q)} ⊗ B̂_μ^{(q)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BathCoupling {
    /// `B̂_μ = σ_μ` on the environment qubit attached to the system qubit.
    #[default]
    Heisenberg,
    /// One triple per system qubit, each acting on the full environment space.
    Custom { operators: Vec<[ComplexMatrix; 3]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub epsilon: f64,
    #[serde(default)]
    pub topology: Topology,
    #[serde(default)]
    pub bath_hamiltonian: BathHamiltonian,
    #[serde(default, rename = "env_init")]
    pub env_initial_state: EnvInit,
    #[serde(default, rename = "bath")]
    pub coupling: BathCoupling,
}

impl NoiseModel {
    /// Heisenberg coupling of strength `epsilon`, everything else at defaults.
    pub fn heisenberg(epsilon: f64) -> Self {
        Self {
            epsilon,
            topology: Topology::default(),
            bath_hamiltonian: BathHamiltonian::Zero,
            env_initial_state: EnvInit::Ground,
            coupling: BathCoupling::Heisenberg,
        }
    }

    pub fn noiseless() -> Self {
        Self::heisenberg(0.0)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self { epsilon, ..self.clone() }
    }

    pub fn with_env_init(&self, env: EnvInit) -> Self {
        Self {
            env_initial_state: env,
            ..self.clone()
        }
    }

    pub fn env_qubits(&self, n_system_qubits: usize) -> usize {
        match self.topology {
            Topology::OneEnvPerSystemQubit => n_system_qubits,
            Topology::SingleSharedEnv => 1,
        }
    }

    pub fn env_dim(&self, n_system_qubits: usize) -> usize {
        1 << self.env_qubits(n_system_qubits)
    }

    pub fn validate(&self, n_system_qubits: usize) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::InvalidNoise(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        if !(1..=2).contains(&n_system_qubits) {
            return Err(Error::Dimension(format!(
                "1 or 2 system qubits supported, got {n_system_qubits}"
            )));
        }
        let env_dim = self.env_dim(n_system_qubits);
        if let BathCoupling::Custom { operators } = &self.coupling {
            if operators.len() != n_system_qubits {
                return Err(Error::Dimension(format!(
                    "custom bath has {} operator triples for {n_system_qubits} system qubits",
                    operators.len()
                )));
            }
            for b in operators.iter().flatten() {
                if b.dim() != env_dim {
                    return Err(Error::Dimension(format!(
                        "bath operator has dimension {}, environment has {env_dim}",
                        b.dim()
                    )));
                }
                if !b.is_hermitian(HERMITIAN_TOL) {
                    return Err(Error::InvalidNoise("bath operators must be Hermitian".into()));
                }
            }
        }
        if let BathHamiltonian::Custom { matrix } = &self.bath_hamiltonian {
            if matrix.dim() != env_dim {
                return Err(Error::Dimension(format!(
                    "bath Hamiltonian has dimension {}, environment has {env_dim}",
                    matrix.dim()
                )));
            }
            if !matrix.is_hermitian(HERMITIAN_TOL) {
                return Err(Error::InvalidNoise("bath Hamiltonian must be Hermitian".into()));
            }
        }
        Ok(())
    }

    /// `H_E` on the environment space.
    pub fn bath_matrix(&self, n_system_qubits: usize) -> ComplexMatrix {
        let n_env = self.env_qubits(n_system_qubits);
        match &self.bath_hamiltonian {
            BathHamiltonian::Zero => ComplexMatrix::zeros(1 << n_env),
            BathHamiltonian::Zeeman { omega } => {
                let mut acc = ComplexMatrix::zeros(1 << n_env);
                for q in 0..n_env {
                    acc += &embed(&pauli_z(), q, n_env).scale_re(0.5 * omega);
                }
                acc
            }
            BathHamiltonian::Custom { matrix } => matrix.clone(),
        }
    }

    /// `H_I` on the joint space.
    pub fn interaction_matrix(&self, n_system_qubits: usize) -> ComplexMatrix {
        let n_env = self.env_qubits(n_system_qubits);
        let n_total = n_system_qubits + n_env;
        let sys_dim = 1 << n_system_qubits;
        let paulis = [sigma_x(), sigma_y(), sigma_z()];
        let mut acc = ComplexMatrix::zeros(1 << n_total);
        for q in 0..n_system_qubits {
            for (mu, p) in paulis.iter().enumerate() {
                let term = match &self.coupling {
                    BathCoupling::Heisenberg => {
                        let env_q = match self.topology {
                            Topology::OneEnvPerSystemQubit => q,
                            Topology::SingleSharedEnv => 0,
                        };
                        &embed(p, q, n_total) * &embed(p, n_system_qubits + env_q, n_total)
                    }
                    BathCoupling::Custom { operators } => kron(
                        &embed(p, q, n_system_qubits),
                        &operators[q][mu],
                    ),
                };
                acc += &term;
            }
        }
        debug_assert_eq!(acc.dim(), sys_dim << n_env);
        acc.scale_re(self.epsilon)
    }

    /// Initial environment density matrix.
    pub fn env_density(&self, n_system_qubits: usize) -> ComplexMatrix {
        let n_env = self.env_qubits(n_system_qubits);
        let dim = 1 << n_env;
        match self.env_initial_state {
            EnvInit::Ground => StateVector::basis(dim, 0).projector(),
            EnvInit::Plus => {
                let amp = (dim as f64).sqrt().recip();
                StateVector::new(vec![crate::matrix::c(amp, 0.0); dim]).projector()
            }
            EnvInit::MixedAverage => ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64),
        }
    }
}

/// Single-qubit operator `op` on qubit `q` of an `n`-qubit register.
pub fn embed(op: &ComplexMatrix, q: usize, n: usize) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let factors: Vec<&ComplexMatrix> = (0..n).map(|i| if i == q { op } else { &id }).collect();
    kron_all(&factors)
}

/// `ε(σ_x σ_x + σ_y σ_y + σ_z σ_z)` on one system-environment pair.
pub fn heisenberg_interaction(epsilon: f64) -> ComplexMatrix {
    let xx = kron(&sigma_x(), &sigma_x());
    let yy = kron(&sigma_y(), &sigma_y());
    let zz = kron(&sigma_z(), &sigma_z());
    (&(&xx + &yy) + &zz).scale_re(epsilon)
}

/// Time-dependent joint Hamiltonian `H_sys(t) ⊗ I + I ⊗ H_E + H_I`.
pub struct JointHamiltonian<F> {
    system: F,
    n_system_qubits: usize,
    env_dim: usize,
    static_part: ComplexMatrix,
}

impl<F> JointHamiltonian<F>
where
    F: Fn(f64) -> Result<ComplexMatrix>,
{
    pub fn at(&self, t: f64) -> Result<ComplexMatrix> {
        let hs = (self.system)(t)?;
        if hs.dim() != 1 << self.n_system_qubits {
            return Err(Error::Dimension(format!(
                "system Hamiltonian has dimension {}, expected {}",
                hs.dim(),
                1 << self.n_system_qubits
            )));
        }
        Ok(&kron(&hs, &ComplexMatrix::identity(self.env_dim)) + &self.static_part)
    }

    pub fn dim(&self) -> usize {
        (1 << self.n_system_qubits) * self.env_dim
    }

    /// `I ⊗ H_E + H_I`.
    pub fn static_part(&self) -> &ComplexMatrix {
        &self.static_part
    }
}

pub fn assemble_total<F>(system_h: F, model: &NoiseModel, n_system_qubits: usize) -> Result<JointHamiltonian<F>>
where
    F: Fn(f64) -> Result<ComplexMatrix>,
{
    model.validate(n_system_qubits)?;
    let env_dim = model.env_dim(n_system_qubits);
    let sys_id = ComplexMatrix::identity(1 << n_system_qubits);
    let static_part = &kron(&sys_id, &model.bath_matrix(n_system_qubits)) + &model.interaction_matrix(n_system_qubits);
    Ok(JointHamiltonian {
        system: system_h,
        n_system_qubits,
        env_dim,
        static_part,
    })
}
