// SPDX-License-Identifier: Apache-2.0

//! Independent reference computations shared by the integration tests. None of
//! these go through the crate's mode tables.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

/// `Σ_{l=1}^{N} cos(π l m / (N+1))`.
pub fn cos_sum(n: usize, m: i64) -> f64 {
    let period = 2 * (n as i64 + 1);
    if m.rem_euclid(period) == 0 {
        n as f64
    } else if m % 2 == 0 {
        -1.0
    } else {
        0.0
    }
}

/// Steady cross-talk `Γ_12/λ²` at band centre on a square `N×N` lattice from
/// the cosine-sum identity. Resonant modes are `l_y = N+1−l_x`, so each profile
/// reduces to `±sin(θl x) sin(θl y)` and products of four sines become cosine
/// sums over `x ± y` combinations.
pub fn trig_sum_gamma(n: usize, r1: (i64, i64), r2: (i64, i64)) -> f64 {
    let (u1, v1) = (r1.0 - r1.1, r1.0 + r1.1);
    let (u2, v2) = (r2.0 - r2.1, r2.0 + r2.1);
    let pair = |a: i64, b: i64| cos_sum(n, a - b) + cos_sum(n, a + b);
    let body = pair(u1, u2) - pair(u1, v2) - pair(v1, u2) + pair(v1, v2);
    let parity = if (r1.1 + r2.1) % 2 == 0 { 1.0 } else { -1.0 };
    let norm = 4.0 / ((n + 1) as f64).powi(2);
    parity * norm * body / 8.0
}

pub fn trig_sum_ratio(n: usize, r1: (i64, i64), r2: (i64, i64)) -> f64 {
    trig_sum_gamma(n, r1, r2) / trig_sum_gamma(n, r1, r1)
}

/// Sine-mode profile written out from its definition.
pub fn profile(nx: usize, ny: usize, lx: usize, ly: usize, x: usize, y: usize) -> f64 {
    let kx = PI * lx as f64 / (nx + 1) as f64;
    let ky = PI * ly as f64 / (ny + 1) as f64;
    2.0 / (((nx + 1) * (ny + 1)) as f64).sqrt() * (kx * x as f64).sin() * (ky * y as f64).sin()
}

/// Dense Hamiltonian on `atoms ⊕ modes` for a standard lattice with `J = 1`,
/// modes ordered `lx`-major.
pub fn dense_hamiltonian(n: usize, atoms: &[(usize, usize)], omega: f64, lambda: f64) -> DMatrix<f64> {
    let na = atoms.len();
    let nm = n * n;
    let mut h = DMatrix::zeros(na + nm, na + nm);
    for a in 0..na {
        h[(a, a)] = omega;
    }
    for lx in 1..=n {
        for ly in 1..=n {
            let k = (lx - 1) * n + (ly - 1);
            let kx = PI * lx as f64 / (n + 1) as f64;
            let ky = PI * ly as f64 / (n + 1) as f64;
            h[(na + k, na + k)] = -2.0 * (kx.cos() + ky.cos());
            for (a, &(x, y)) in atoms.iter().enumerate() {
                let g = lambda * profile(n, n, lx, ly, x, y);
                h[(a, na + k)] = g;
                h[(na + k, a)] = g;
            }
        }
    }
    h
}

/// `exp(−iHt) ψ0` by full diagonalization.
pub fn spectral_propagate(h: &DMatrix<f64>, psi0: &[C64], t: f64) -> Vec<C64> {
    let eig = SymmetricEigen::new(h.clone());
    let v = eig.eigenvectors.map(|x| C64::new(x, 0.0));
    let psi = DVector::from_column_slice(psi0);
    let mut coeffs = v.adjoint() * psi;
    for (c, e) in coeffs.iter_mut().zip(eig.eigenvalues.iter()) {
        *c *= C64::from_polar(1.0, -e * t);
    }
    (v * coeffs).iter().copied().collect()
}
