// SPDX-License-Identifier: Apache-2.0

//! Exact single-excitation dynamics of emitters plus lattice.
//!
//! The state lives in the span of `σ_j⁺|g, vac⟩` and `A_k†|g, vac⟩`. In that
//! basis the Hamiltonian is diagonal (`Ω` on the atoms, `ω_k` on the modes)
//! plus a dense `n × M` border of couplings `λ f_{r_j,k}`, so one product
//! costs `O(n·M)`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::lattice::ModeTable;
use crate::rates::AtomSet;

/// Norm drift that aborts a propagation.
pub const MAX_NORM_DRIFT: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub atom_freq: f64,
    pub mode_freqs: Vec<f64>,
    /// Row `j` holds `λ f_{r_j,k}` for every mode `k`.
    pub coupling: Vec<Vec<f64>>,
}

pub fn assemble_hamiltonian(table: &ModeTable, atoms: &AtomSet) -> Result<Hamiltonian> {
    atoms.check_against(table)?;
    let coupling = atoms
        .positions()
        .iter()
        .map(|&s| table.profiles_at(s).into_iter().map(|f| atoms.lambda() * f).collect())
        .collect();
    Ok(Hamiltonian {
        atom_freq: atoms.omega(),
        mode_freqs: table.modes().iter().map(|m| m.omega).collect(),
        coupling,
    })
}

impl Hamiltonian {
    pub fn num_atoms(&self) -> usize {
        self.coupling.len()
    }

    pub fn num_modes(&self) -> usize {
        self.mode_freqs.len()
    }

    pub fn dim(&self) -> usize {
        self.num_atoms() + self.num_modes()
    }

    /// `out = H·psi` on the flat `[atoms…, modes…]` layout.
    pub fn apply(&self, psi: &[C64], out: &mut [C64]) {
        let n = self.num_atoms();
        let (atoms, modes) = psi.split_at(n);
        let (out_atoms, out_modes) = out.split_at_mut(n);
        for (o, (&w, &c)) in out_modes.iter_mut().zip(self.mode_freqs.iter().zip(modes)) {
            *o = c * w;
        }
        for (j, row) in self.coupling.iter().enumerate() {
            let cj = atoms[j];
            let mut acc = cj * self.atom_freq;
            for ((o, &g), &c) in out_modes.iter_mut().zip(row).zip(modes) {
                acc += c * g;
                *o += cj * g;
            }
            out_atoms[j] = acc;
        }
    }

    /// Dense matrix form, for small-lattice checks.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.num_atoms();
        let d = self.dim();
        let mut h = vec![vec![0.0; d]; d];
        for (j, row) in self.coupling.iter().enumerate() {
            h[j][j] = self.atom_freq;
            for (k, &g) in row.iter().enumerate() {
                h[j][n + k] = g;
                h[n + k][j] = g;
            }
        }
        for (k, &w) in self.mode_freqs.iter().enumerate() {
            h[n + k][n + k] = w;
        }
        h
    }

    pub fn expectation(&self, state: &PureState) -> f64 {
        let psi = state.to_flat();
        let mut out = vec![C64::new(0.0, 0.0); psi.len()];
        self.apply(&psi, &mut out);
        psi.iter().zip(&out).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

/// Joint wavefunction `Σ c_j σ_j⁺|g,0⟩ + Σ c_k A_k†|g,0⟩` at `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    pub atom_amps: Vec<C64>,
    pub mode_amps: Vec<C64>,
    pub time: f64,
}

impl PureState {
    /// Excitation shared among the atoms only; `amps` is normalized here.
    pub fn atomic(amps: &[C64], num_modes: usize) -> Result<Self> {
        let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Domain("atomic amplitudes must have nonzero norm".into()));
        }
        Ok(Self {
            atom_amps: amps.iter().map(|c| c / norm).collect(),
            mode_amps: vec![C64::new(0.0, 0.0); num_modes],
            time: 0.0,
        })
    }

    /// Single excitation in atom `index`.
    pub fn excited(num_atoms: usize, index: usize, num_modes: usize) -> Result<Self> {
        if index >= num_atoms {
            return Err(Error::Domain(format!("atom index {index} out of range")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); num_atoms];
        amps[index] = C64::new(1.0, 0.0);
        Self::atomic(&amps, num_modes)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.atomic_population() + self.lattice_population()
    }

    pub fn atomic_population(&self) -> f64 {
        self.atom_amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn lattice_population(&self) -> f64 {
        self.mode_amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.atom_amps.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn to_flat(&self) -> Vec<C64> {
        self.atom_amps.iter().chain(&self.mode_amps).copied().collect()
    }

    fn from_flat(flat: &[C64], num_atoms: usize, time: f64) -> Self {
        Self {
            atom_amps: flat[..num_atoms].to_vec(),
            mode_amps: flat[num_atoms..].to_vec(),
            time,
        }
    }
}

/// Fixed-step schedule shared by the integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    pub dt: f64,
    pub t_final: f64,
    /// Record every `stride` steps (the final state is always recorded).
    pub stride: usize,
}

impl StepConfig {
    pub fn new(dt: f64, t_final: f64, stride: usize) -> Self {
        Self { dt, t_final, stride }
    }

    pub(crate) fn steps(&self) -> Result<(usize, f64)> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Domain(format!("time step must be > 0, got {}", self.dt)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::Domain(format!("final time must be >= 0, got {}", self.t_final)));
        }
        if self.stride == 0 {
            return Err(Error::Domain("output stride must be >= 1".into()));
        }
        let steps = (self.t_final / self.dt).round() as usize;
        if steps == 0 {
            return Ok((0, 0.0));
        }
        Ok((steps, self.t_final / steps as f64))
    }
}

/// RK4 propagation of `i∂t ψ = Hψ`. The callback sees the initial state,
/// every `stride`-th step and the final state.
pub fn evolve_exact_with<F: FnMut(&PureState)>(
    h: &Hamiltonian,
    psi0: &PureState,
    cfg: &StepConfig,
    mut observe: F,
) -> Result<PureState> {
    let n = h.num_atoms();
    if psi0.atom_amps.len() != n || psi0.mode_amps.len() != h.num_modes() {
        return Err(Error::Domain("initial state does not match the Hamiltonian".into()));
    }
    let norm0 = psi0.norm_sqr();
    if (norm0 - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!("initial state must be normalized, |psi|^2 = {norm0}")));
    }
    let (steps, dt) = cfg.steps()?;
    let d = h.dim();
    let mut psi = psi0.to_flat();
    let zero = C64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![zero; d], vec![zero; d], vec![zero; d], vec![zero; d], vec![zero; d]);
    // −i·dt·H·v
    let mi_dt = C64::new(0.0, -dt);
    let half = mi_dt * 0.5;
    observe(&PureState::from_flat(&psi, n, psi0.time));
    for step in 1..=steps {
        h.apply(&psi, &mut k1);
        for i in 0..d {
            tmp[i] = psi[i] + half * k1[i];
        }
        h.apply(&tmp, &mut k2);
        for i in 0..d {
            tmp[i] = psi[i] + half * k2[i];
        }
        h.apply(&tmp, &mut k3);
        for i in 0..d {
            tmp[i] = psi[i] + mi_dt * k3[i];
        }
        h.apply(&tmp, &mut k4);
        for i in 0..d {
            psi[i] += mi_dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        }
        if step % cfg.stride == 0 || step == steps {
            let state = PureState::from_flat(&psi, n, psi0.time + step as f64 * dt);
            let drift = (state.norm_sqr() - norm0).abs();
            if drift > MAX_NORM_DRIFT || !drift.is_finite() {
                return Err(Error::StepSize { drift, time: state.time });
            }
            observe(&state);
        }
    }
    Ok(PureState::from_flat(&psi, n, psi0.time + steps as f64 * dt))
}

/// Snapshots at every `stride` steps, starting with `psi0`.
pub fn evolve_exact(h: &Hamiltonian, psi0: &PureState, cfg: &StepConfig) -> Result<Vec<PureState>> {
    let mut out = Vec::new();
    evolve_exact_with(h, psi0, cfg, |s| out.push(s.clone()))?;
    Ok(out)
}

/// Real-space lattice amplitude `c_r = Σ_k f_{r,k} c_k`, row-major
/// (y outer, x inner).
pub fn field_snapshot(state: &PureState, table: &ModeTable) -> Result<Vec<C64>> {
    let spec = table.spec();
    let (nx, ny) = (spec.nx(), spec.ny());
    if state.mode_amps.len() != table.len() {
        return Err(Error::Domain("state does not match the mode table".into()));
    }
    // Separable sine transform: first over ly, then over lx.
    let mut partial = vec![C64::new(0.0, 0.0); nx * ny]; // [lx][y]
    for lx in 1..=nx {
        for y in 1..=ny {
            let mut acc = C64::new(0.0, 0.0);
            for ly in 1..=ny {
                acc += state.mode_amps[(lx - 1) * ny + (ly - 1)] * table.sin_y(ly, y);
            }
            partial[(lx - 1) * ny + (y - 1)] = acc;
        }
    }
    let norm = spec.mode_norm();
    let mut grid = vec![C64::new(0.0, 0.0); nx * ny];
    for y in 1..=ny {
        for x in 1..=nx {
            let mut acc = C64::new(0.0, 0.0);
            for lx in 1..=nx {
                acc += partial[(lx - 1) * ny + (y - 1)] * table.sin_x(lx, x);
            }
            grid[(y - 1) * nx + (x - 1)] = acc * norm;
        }
    }
    Ok(grid)
}
