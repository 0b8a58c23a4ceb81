// SPDX-License-Identifier: Apache-2.0

//! Zero-temperature master equation restricted to the single-excitation
//! sector.
//!
//! With at most one excitation, `ρ` splits into the excited block `ρ_ee`
//! (an `n × n` matrix over `σ_j⁺|g⟩`) and the ground population. The
//! dissipator acts on the excited block as a non-Hermitian evolution with
//! `H_eff = Ω + H_LS − (i/2)Γ`, and every lost excitation lands in `|g⟩`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use super::exact::StepConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SectorState {
    pub rho_ee: DMatrix<C64>,
    pub p_ground: f64,
    pub time: f64,
}

impl SectorState {
    /// Pure single-excitation state `Σ c_j σ_j⁺|g⟩`, normalized here.
    pub fn pure(amps: &[C64]) -> Result<Self> {
        let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Domain("amplitudes must have nonzero norm".into()));
        }
        let v = DVector::from_iterator(amps.len(), amps.iter().map(|c| c / norm));
        Ok(Self { rho_ee: &v * v.adjoint(), p_ground: 0.0, time: 0.0 })
    }

    pub fn excited_population(&self) -> f64 {
        self.rho_ee.trace().re
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.rho_ee.nrows()).map(|i| self.rho_ee[(i, i)].re).collect()
    }

    pub fn trace(&self) -> f64 {
        self.excited_population() + self.p_ground
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.rho_ee + self.rho_ee.adjoint()) * C64::new(0.5, 0.0);
        SymmetricEigen::new(herm).eigenvalues.min()
    }
}

/// Sector generator built from physical-rate `gamma` and Lamb-shift `lamb`
/// matrices (both in units of `J`).
#[derive(Debug, Clone)]
pub struct SectorGenerator {
    h_eff: DMatrix<C64>,
    h_eff_dag: DMatrix<C64>,
    gamma: DMatrix<C64>,
}

impl SectorGenerator {
    pub fn new(gamma: &DMatrix<f64>, lamb: &DMatrix<f64>, omega: f64) -> Result<Self> {
        let n = gamma.nrows();
        if gamma.ncols() != n || lamb.nrows() != n || lamb.ncols() != n {
            return Err(Error::Domain("rate and Lamb-shift matrices must be square and equal-sized".into()));
        }
        if (gamma - gamma.transpose()).amax() > 1e-12 * gamma.amax().max(1e-300) {
            return Err(Error::Domain("dissipation matrix must be symmetric".into()));
        }
        let min = crate::rates::min_eigenvalue(gamma);
        if min < -1e-12 * gamma.amax().max(1e-300) {
            return Err(Error::Domain(format!("dissipation matrix is not PSD (eigenvalue {min:.3e})")));
        }
        let h_eff = DMatrix::from_fn(n, n, |i, j| {
            let coherent = lamb[(i, j)] + if i == j { omega } else { 0.0 };
            C64::new(coherent, -0.5 * gamma[(i, j)])
        });
        Ok(Self {
            h_eff_dag: h_eff.adjoint(),
            h_eff,
            gamma: gamma.map(|v| C64::new(v, 0.0)),
        })
    }

    fn derivative(&self, rho: &DMatrix<C64>) -> (DMatrix<C64>, f64) {
        let minus_i = C64::new(0.0, -1.0);
        let d_rho = (&self.h_eff * rho - rho * &self.h_eff_dag) * minus_i;
        let d_ground = (&self.gamma * rho).trace().re;
        (d_rho, d_ground)
    }
}

pub fn evolve_master_with<F: FnMut(&SectorState)>(
    generator: &SectorGenerator,
    rho0: &SectorState,
    cfg: &StepConfig,
    mut observe: F,
) -> Result<SectorState> {
    let n = generator.h_eff.nrows();
    if rho0.rho_ee.nrows() != n || rho0.rho_ee.ncols() != n {
        return Err(Error::Domain("initial state does not match the generator".into()));
    }
    if (rho0.trace() - 1.0).abs() > 1e-10 || rho0.min_eigenvalue() < -1e-10 || rho0.p_ground < 0.0 {
        return Err(Error::Domain("initial sector state must be a valid density matrix".into()));
    }
    let (steps, dt) = cfg.steps()?;
    let mut rho = rho0.rho_ee.clone();
    let mut ground = rho0.p_ground;
    observe(rho0);
    for step in 1..=steps {
        let (k1, g1) = generator.derivative(&rho);
        let (k2, g2) = generator.derivative(&(&rho + &k1 * C64::new(0.5 * dt, 0.0)));
        let (k3, g3) = generator.derivative(&(&rho + &k2 * C64::new(0.5 * dt, 0.0)));
        let (k4, g4) = generator.derivative(&(&rho + &k3 * C64::new(dt, 0.0)));
        rho += (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0);
        ground += dt / 6.0 * (g1 + 2.0 * (g2 + g3) + g4);
        if step % cfg.stride == 0 || step == steps {
            observe(&SectorState { rho_ee: rho.clone(), p_ground: ground, time: rho0.time + step as f64 * dt });
        }
    }
    Ok(SectorState { rho_ee: rho, p_ground: ground, time: rho0.time + steps as f64 * dt })
}

/// Master-equation trajectory for physical `gamma` and `lamb` matrices.
pub fn evolve_master(
    gamma: &DMatrix<f64>,
    lamb: &DMatrix<f64>,
    omega: f64,
    rho0: &SectorState,
    cfg: &StepConfig,
) -> Result<Vec<SectorState>> {
    let generator = SectorGenerator::new(gamma, lamb, omega)?;
    let mut out = Vec::new();
    evolve_master_with(&generator, rho0, cfg, |s| out.push(s.clone()))?;
    Ok(out)
}

/// Decay rates of the symmetric and antisymmetric two-atom channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveRates {
    /// `Γ0 + Γc`, channel `(σ1⁻ + σ2⁻)/√2`.
    pub plus: f64,
    /// `Γ0 − Γc`, channel `(σ1⁻ − σ2⁻)/√2`.
    pub minus: f64,
}

impl CollectiveRates {
    pub fn weights() -> [[f64; 2]; 2] {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        [[a, a], [a, -a]]
    }
}

pub fn collective_decomposition(gamma0: f64, gammac: f64) -> Result<CollectiveRates> {
    if gammac.abs() > gamma0 * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "|cross-talk| {gammac} exceeds the individual rate {gamma0}"
        )));
    }
    Ok(CollectiveRates { plus: gamma0 + gammac, minus: gamma0 - gammac })
}

/// Lindblad evolution with the single jump operator `Σ s_i σ_i⁻` at rate
/// `gamma0`, i.e. `Γ = Γ0 s sᵀ`.
pub fn dicke_evolution(
    signs: &[f64],
    gamma0: f64,
    rho0: &SectorState,
    cfg: &StepConfig,
) -> Result<Vec<SectorState>> {
    if signs.iter().any(|s| s.abs() != 1.0) {
        return Err(Error::Domain("Dicke signs must be +1 or -1".into()));
    }
    let n = signs.len();
    let gamma = DMatrix::from_fn(n, n, |i, j| gamma0 * signs[i] * signs[j]);
    evolve_master(&gamma, &DMatrix::zeros(n, n), 0.0, rho0, cfg)
}
