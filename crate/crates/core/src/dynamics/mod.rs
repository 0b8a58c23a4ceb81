// SPDX-License-Identifier: Apache-2.0

//! Exact and master-equation dynamics of emitters on a lattice.

mod exact;
mod master;
mod qubits;

pub use exact::{
    assemble_hamiltonian, evolve_exact, evolve_exact_with, field_snapshot, Hamiltonian, PureState,
    StepConfig, MAX_NORM_DRIFT,
};
pub use master::{
    collective_decomposition, dicke_evolution, evolve_master, evolve_master_with, CollectiveRates,
    SectorGenerator, SectorState,
};
pub use qubits::{concurrence, concurrence_x_state, reduced_two_qubit, ReducePair, TwoQubitState};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::lattice::{ModeTable, Site};
use crate::rates::{AtomSet, RateMatrix};

/// Amplitudes of `(|01⟩ + sign·|10⟩)/√2` on atoms `(i, j)` of an `n`-atom set,
/// where `|10⟩` has atom `i` excited.
pub fn bell_amplitudes(n: usize, i: usize, j: usize, sign: f64) -> Result<Vec<C64>> {
    if i >= n || j >= n || i == j {
        return Err(Error::Domain(format!("invalid atom pair ({i}, {j}) for {n} atoms")));
    }
    let a = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![C64::new(0.0, 0.0); n];
    amps[i] = C64::new(sign.signum() * a, 0.0);
    amps[j] = C64::new(a, 0.0);
    Ok(amps)
}

/// Sign of the Bell state on `(i, j)` that the steady rates predict to be
/// dark: `Ψ±` is dark when `Γ_ij/Γ_ii = ∓1`. `None` when the pair has no
/// cross-talk to cancel.
pub fn dark_bell_sign(rates: &RateMatrix, i: usize, j: usize) -> Option<f64> {
    let g = rates.gamma[(i, j)];
    let scale = rates.gamma[(i, i)].max(rates.gamma[(j, j)]);
    if !(scale > 0.0) || g.abs() <= 1e-10 * scale {
        return None;
    }
    Some(-g.signum())
}

/// Individual decay rate from the exact single-atom dynamics: least-squares
/// slope of `−ln P(t)` sampled every `sample_every` over `window`.
pub fn calibrate_gamma0(
    table: &ModeTable,
    site: Site,
    omega: f64,
    lambda: f64,
    dt: f64,
    window: (f64, f64),
    sample_every: f64,
) -> Result<f64> {
    let atoms = AtomSet::new(vec![site], omega, lambda)?;
    let h = assemble_hamiltonian(table, &atoms)?;
    let psi0 = PureState::excited(1, 0, table.len())?;
    let stride = ((sample_every / dt).round() as usize).max(1);
    let mut samples = Vec::new();
    evolve_exact_with(&h, &psi0, &StepConfig::new(dt, window.1, stride), |s| {
        if s.time >= window.0 - 1e-9 {
            samples.push((s.time, s.atomic_population().max(1e-300).ln()));
        }
    })?;
    if samples.len() < 2 {
        return Err(Error::Domain("calibration window holds fewer than two samples".into()));
    }
    let n = samples.len() as f64;
    let mt = samples.iter().map(|p| p.0).sum::<f64>() / n;
    let ml = samples.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut stl, mut stt) = (0.0, 0.0);
    for &(t, l) in &samples {
        stl += (t - mt) * (l - ml);
        stt += (t - mt) * (t - mt);
    }
    Ok(-stl / stt)
}
