// SPDX-License-Identifier: Apache-2.0

//! Two-emitter reduced states and the Wootters concurrence.

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64 as C64;

use super::exact::PureState;
use super::master::SectorState;
use crate::error::{Error, Result};

const STATE_TOL: f64 = 1e-10;

/// Two-qubit density matrix in the ordered basis `|00⟩, |01⟩, |10⟩, |11⟩`,
/// where the first label is the first atom of the pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    pub rho: Matrix4<C64>,
}

impl TwoQubitState {
    pub fn new(rho: Matrix4<C64>) -> Result<Self> {
        let state = Self { rho };
        state.validate()?;
        Ok(state)
    }

    pub fn validate(&self) -> Result<()> {
        let herm = (self.rho - self.rho.adjoint()).camax();
        if herm > STATE_TOL {
            return Err(Error::Domain(format!("density matrix not Hermitian ({herm:.2e})")));
        }
        let tr = self.rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::Domain(format!("density matrix trace {tr} != 1")));
        }
        let min = hermitian_eigenvalues(&self.rho).min();
        if min < -STATE_TOL {
            return Err(Error::Domain(format!("density matrix not PSD (eigenvalue {min:.2e})")));
        }
        Ok(())
    }

    /// The Bell state `(|01⟩ + sign·|10⟩)/√2`.
    pub fn bell(sign: f64) -> Self {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let v = [C64::new(0.0, 0.0), C64::new(a, 0.0), C64::new(sign.signum() * a, 0.0), C64::new(0.0, 0.0)];
        Self { rho: Matrix4::from_fn(|i, j| v[i] * v[j].conj()) }
    }

    pub fn maximally_mixed() -> Self {
        Self { rho: Matrix4::identity() * C64::new(0.25, 0.0) }
    }

    /// `⟨10|ρ|01⟩`.
    pub fn coherence(&self) -> C64 {
        self.rho[(2, 1)]
    }

    pub fn population(&self, basis: usize) -> f64 {
        self.rho[(basis, basis)].re
    }
}

fn hermitian_eigenvalues(m: &Matrix4<C64>) -> nalgebra::Vector4<f64> {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(herm).eigenvalues
}

/// Reduced state of atoms `(i, j)` from a joint single-excitation state.
pub trait ReducePair {
    fn reduce_pair(&self, i: usize, j: usize) -> Result<TwoQubitState>;
}

fn single_excitation_block(p_i: f64, p_j: f64, coh_ij: C64) -> Matrix4<C64> {
    let zero = C64::new(0.0, 0.0);
    let mut rho = Matrix4::from_element(zero);
    rho[(0, 0)] = C64::new(1.0 - p_i - p_j, 0.0);
    rho[(1, 1)] = C64::new(p_j, 0.0);
    rho[(2, 2)] = C64::new(p_i, 0.0);
    rho[(2, 1)] = coh_ij;
    rho[(1, 2)] = coh_ij.conj();
    rho
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<()> {
    if i >= n || j >= n || i == j {
        return Err(Error::Domain(format!("invalid atom pair ({i}, {j}) for {n} atoms")));
    }
    Ok(())
}

impl ReducePair for PureState {
    fn reduce_pair(&self, i: usize, j: usize) -> Result<TwoQubitState> {
        check_pair(self.atom_amps.len(), i, j)?;
        let (ci, cj) = (self.atom_amps[i], self.atom_amps[j]);
        Ok(TwoQubitState {
            rho: single_excitation_block(ci.norm_sqr(), cj.norm_sqr(), ci * cj.conj()),
        })
    }
}

impl ReducePair for SectorState {
    fn reduce_pair(&self, i: usize, j: usize) -> Result<TwoQubitState> {
        check_pair(self.rho_ee.nrows(), i, j)?;
        Ok(TwoQubitState {
            rho: single_excitation_block(
                self.rho_ee[(i, i)].re,
                self.rho_ee[(j, j)].re,
                self.rho_ee[(i, j)],
            ),
        })
    }
}

pub fn reduced_two_qubit<S: ReducePair>(state: &S, i: usize, j: usize) -> Result<TwoQubitState> {
    state.reduce_pair(i, j)
}

/// Wootters concurrence `max(0, λ1 − λ2 − λ3 − λ4)`, with `λ_i` the
/// decreasing square roots of the eigenvalues of `ρ(σy⊗σy)ρ*(σy⊗σy)`.
///
/// Evaluated through the Hermitian form `√ρ ρ̃ √ρ`, which shares that
/// spectrum.
pub fn concurrence(state: &TwoQubitState) -> Result<f64> {
    state.validate()?;
    let rho = (state.rho + state.rho.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(rho);
    let sqrt_vals = eig.eigenvalues.map(|v| C64::new(v.max(0.0).sqrt(), 0.0));
    let sqrt_rho =
        eig.eigenvectors * Matrix4::from_diagonal(&sqrt_vals) * eig.eigenvectors.adjoint();

    // σy⊗σy in the computational basis: anti-diagonal (−1, 1, 1, −1).
    let mut yy = Matrix4::from_element(C64::new(0.0, 0.0));
    yy[(0, 3)] = C64::new(-1.0, 0.0);
    yy[(1, 2)] = C64::new(1.0, 0.0);
    yy[(2, 1)] = C64::new(1.0, 0.0);
    yy[(3, 0)] = C64::new(-1.0, 0.0);
    let rho_tilde = yy * rho.map(|c| c.conj()) * yy;
    let r = sqrt_rho * rho_tilde * sqrt_rho;
    let mut lambdas: Vec<f64> = hermitian_eigenvalues(&r)
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0))
}

/// `2·max(0, |ρ_{10,01}| − √(p00 p11))`, exact for X-shaped states such as
/// any reduced single-excitation state.
pub fn concurrence_x_state(state: &TwoQubitState) -> f64 {
    let coh = state.coherence().norm();
    let p00 = state.population(0).max(0.0);
    let p11 = state.population(3).max(0.0);
    (2.0 * (coh - (p00 * p11).sqrt())).clamp(0.0, 1.0)
}
