// SPDX-License-Identifier: Apache-2.0

//! Master-equation coefficients for emitters sharing a lattice bath.
//!
//! All matrices are reported in units of `λ²` (dissipation) or `λ²/J`
//! (Lamb shift). Only ratios such as `Γ12/Γ11` are physically meaningful in
//! a finite lattice; the absolute rate entering the master equation is
//! calibrated separately (see [`crate::dynamics::calibrate_gamma0`]).

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::lattice::{ModeTable, Site, DEFAULT_RESONANCE_TOL};

/// Emitter positions and their shared parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomSet {
    positions: Vec<Site>,
    omega: f64,
    lambda: f64,
}

impl AtomSet {
    pub fn new(positions: Vec<Site>, omega: f64, lambda: f64) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::Config("at least one atom is required".into()));
        }
        for (i, a) in positions.iter().enumerate() {
            if positions[..i].contains(a) {
                return Err(Error::Config(format!(
                    "atom positions must be distinct: ({}, {}) repeated",
                    a.x, a.y
                )));
            }
        }
        // λ = 0 is the decoupled limit used by the dynamics checks.
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::Config(format!("coupling lambda must be >= 0, got {lambda}")));
        }
        if !omega.is_finite() {
            return Err(Error::Config("emitter frequency must be finite".into()));
        }
        Ok(Self { positions, omega, lambda })
    }

    pub fn positions(&self) -> &[Site] {
        &self.positions
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.positions.clone(), self.omega, lambda)
    }

    pub fn check_against(&self, table: &ModeTable) -> Result<()> {
        self.positions.iter().try_for_each(|&s| table.spec().check_site(s))
    }
}

/// Steady dissipation matrix `Γ_jl = λ² Σ_{k∈manifold} f_j,k f_l,k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    pub gamma: DMatrix<f64>,
    pub manifold_size: usize,
}

impl RateMatrix {
    pub fn dim(&self) -> usize {
        self.gamma.nrows()
    }

    /// `Γ_ij / Γ_ii`.
    pub fn ratio(&self, i: usize, j: usize) -> f64 {
        self.gamma[(i, j)] / self.gamma[(i, i)]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.gamma)
    }

    /// A copy rescaled so that the mean diagonal entry equals `gamma0`.
    pub fn scaled_to(&self, gamma0: f64) -> DMatrix<f64> {
        let mean = self.gamma.diagonal().mean();
        if mean == 0.0 {
            return DMatrix::zeros(self.dim(), self.dim());
        }
        &self.gamma * (gamma0 / mean)
    }
}

/// Second-order coherent shifts: diagonal `Ω_LS`, off-diagonal `λ_LS`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambMatrix {
    pub shift: DMatrix<f64>,
}

pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(m.clone()).eigenvalues.min()
}

fn profile_rows(table: &ModeTable, atoms: &AtomSet, modes: &[usize]) -> Vec<Vec<f64>> {
    modes
        .iter()
        .map(|&k| atoms.positions().iter().map(|&s| table.profile(k, s)).collect())
        .collect()
}

/// Gram matrix of the resonant-mode profiles, scaled by `λ²`.
pub fn steady_rates(table: &ModeTable, atoms: &AtomSet) -> Result<RateMatrix> {
    steady_rates_with_tol(table, atoms, DEFAULT_RESONANCE_TOL)
}

pub fn steady_rates_with_tol(table: &ModeTable, atoms: &AtomSet, tol: f64) -> Result<RateMatrix> {
    atoms.check_against(table)?;
    let manifold = table.resonant_indices(atoms.omega(), tol);
    let n = atoms.len();
    let lambda2 = atoms.lambda() * atoms.lambda();
    let mut gamma = DMatrix::zeros(n, n);
    for row in profile_rows(table, atoms, &manifold) {
        for i in 0..n {
            for j in 0..n {
                gamma[(i, j)] += row[i] * row[j];
            }
        }
    }
    gamma *= lambda2;
    Ok(RateMatrix { gamma, manifold_size: manifold.len() })
}

/// `Γ_1r / Γ_11` for every lattice site `r`.
#[derive(Debug, Clone)]
pub struct CrosstalkMap {
    nx: usize,
    ny: usize,
    source: Site,
    values: Vec<f64>,
}

impl CrosstalkMap {
    pub fn get(&self, site: Site) -> f64 {
        self.values[(site.y - 1) * self.nx + (site.x - 1)]
    }

    pub fn source(&self) -> Site {
        self.source
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Values in row-major order (y outer, x inner).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(site, ratio)` pairs in x-major order.
    pub fn iter_x_major(&self) -> impl Iterator<Item = (Site, f64)> + '_ {
        (1..=self.nx).flat_map(move |x| {
            (1..=self.ny).map(move |y| {
                let s = Site::new(x, y);
                (s, self.get(s))
            })
        })
    }
}

pub fn crosstalk_map(table: &ModeTable, source: Site, omega0: f64) -> Result<CrosstalkMap> {
    crosstalk_map_with_tol(table, source, omega0, DEFAULT_RESONANCE_TOL)
}

pub fn crosstalk_map_with_tol(
    table: &ModeTable,
    source: Site,
    omega0: f64,
    tol: f64,
) -> Result<CrosstalkMap> {
    let spec = *table.spec();
    spec.check_site(source)?;
    let manifold = table.resonant_indices(omega0, tol);
    let source_profile: Vec<f64> = manifold.iter().map(|&k| table.profile(k, source)).collect();
    let self_rate: f64 = source_profile.iter().map(|f| f * f).sum();
    // Rounding residue of an exactly vanishing overlap sits near 1e-32.
    if self_rate <= 1e-24 {
        return Err(Error::DegenerateSource { x: source.x, y: source.y });
    }
    let values = spec
        .sites()
        .map(|site| {
            if site == source {
                return 1.0;
            }
            manifold
                .iter()
                .zip(&source_profile)
                .map(|(&k, f1)| f1 * table.profile(k, site))
                .sum::<f64>()
                / self_rate
        })
        .collect();
    Ok(CrosstalkMap { nx: spec.nx(), ny: spec.ny(), source, values })
}

#[inline]
fn sinc_kernel(detuning: f64, t: f64) -> f64 {
    let x = detuning * t;
    if x.abs() < 1e-4 {
        t * (1.0 - x * x / 6.0)
    } else {
        x.sin() / detuning
    }
}

/// Time-dependent coefficients `Γ_jl(t) = 2λ² Σ_k f_j f_l sin(Δ_k t)/Δ_k`
/// with `Δ_k = Ω − ω_k`, summed over every mode.
pub fn rate_buildup(table: &ModeTable, atoms: &AtomSet, t: f64) -> Result<DMatrix<f64>> {
    atoms.check_against(table)?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    let n = atoms.len();
    let mut gamma = DMatrix::zeros(n, n);
    if t == 0.0 {
        return Ok(gamma);
    }
    let lambda2 = atoms.lambda() * atoms.lambda();
    let mut row = vec![0.0; n];
    for (k, mode) in table.modes().iter().enumerate() {
        let w = 2.0 * sinc_kernel(atoms.omega() - mode.omega, t);
        for (r, &s) in row.iter_mut().zip(atoms.positions()) {
            *r = table.profile(k, s);
        }
        for i in 0..n {
            for j in i..n {
                gamma[(i, j)] += w * row[i] * row[j];
            }
        }
    }
    gamma *= lambda2;
    gamma.fill_lower_triangle_with_upper_triangle();
    Ok(gamma)
}

/// Principal-value sum `λ² Σ_{k∉manifold} f_j f_l / (Ω − ω_k)`.
pub fn lamb_shift(table: &ModeTable, atoms: &AtomSet) -> Result<LambMatrix> {
    lamb_shift_with_tol(table, atoms, DEFAULT_RESONANCE_TOL)
}

pub fn lamb_shift_with_tol(table: &ModeTable, atoms: &AtomSet, tol: f64) -> Result<LambMatrix> {
    atoms.check_against(table)?;
    let n = atoms.len();
    let lambda2 = atoms.lambda() * atoms.lambda();
    let mut shift = DMatrix::zeros(n, n);
    let mut row = vec![0.0; n];
    for (k, mode) in table.modes().iter().enumerate() {
        let detuning = atoms.omega() - mode.omega;
        if detuning.abs() <= tol {
            continue;
        }
        for (r, &s) in row.iter_mut().zip(atoms.positions()) {
            *r = table.profile(k, s);
        }
        for i in 0..n {
            for j in 0..n {
                shift[(i, j)] += row[i] * row[j] / detuning;
            }
        }
    }
    shift *= lambda2;
    Ok(LambMatrix { shift })
}
