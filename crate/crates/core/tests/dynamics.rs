// SPDX-License-Identifier: Apache-2.0

mod common;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subradiance_core::dynamics::{
    assemble_hamiltonian, bell_amplitudes, concurrence, concurrence_x_state, dark_bell_sign,
    evolve_exact, evolve_exact_with, evolve_master_with, field_snapshot, reduced_two_qubit,
    PureState, SectorGenerator, SectorState, StepConfig,
};
use subradiance_core::lattice::{enumerate_modes, LatticeSpec, ModeTable, Site};
use subradiance_core::rates::{lamb_shift, steady_rates, AtomSet};

fn pair_atoms(a: (usize, usize), b: (usize, usize), lambda: f64) -> AtomSet {
    AtomSet::new(vec![a.into(), b.into()], 0.0, lambda).unwrap()
}

fn bell_concurrence(table: &ModeTable, atoms: &AtomSet, sign: f64, t: f64) -> f64 {
    let h = assemble_hamiltonian(table, atoms).unwrap();
    let psi = PureState::atomic(&bell_amplitudes(2, 0, 1, sign).unwrap(), table.len()).unwrap();
    let last = evolve_exact_with(&h, &psi, &StepConfig::new(0.01, t, 100_000), |_| {}).unwrap();
    concurrence(&reduced_two_qubit(&last, 0, 1).unwrap()).unwrap()
}

fn random_amps(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

#[test]
fn coupling_row_is_scaled_profile() {
    let table = enumerate_modes(&LatticeSpec::standard(3, 3).unwrap());
    let atoms = AtomSet::new(vec![Site::new(2, 2)], 0.0, 0.1).unwrap();
    let h = assemble_hamiltonian(&table, &atoms).unwrap();
    for (k, m) in table.modes().iter().enumerate() {
        assert!((h.coupling[0][k] - 0.1 * common::profile(3, 3, m.lx, m.ly, 2, 2)).abs() < 1e-15);
    }
    let dense = h.to_dense();
    for i in 0..h.dim() {
        for j in 0..h.dim() {
            assert_eq!(dense[i][j], dense[j][i]);
        }
    }
}

#[test]
fn decoupled_atom_keeps_its_excitation() {
    let table = enumerate_modes(&LatticeSpec::standard(7, 7).unwrap());
    let atoms = AtomSet::new(vec![Site::new(3, 4)], 0.3, 0.0).unwrap();
    let h = assemble_hamiltonian(&table, &atoms).unwrap();
    let psi = PureState::excited(1, 0, table.len()).unwrap();
    for s in evolve_exact(&h, &psi, &StepConfig::new(0.01, 50.0, 100)).unwrap() {
        assert!((s.atom_amps[0].norm() - 1.0).abs() < 1e-12);
        let expect = C64::from_polar(1.0, -0.3 * s.time);
        assert!((s.atom_amps[0] - expect).norm() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn small_lattice_matches_spectral_oracle(
        x1 in 1usize..=6, y1 in 1usize..=6, x2 in 1usize..=6, y2 in 1usize..=6,
        lambda in 0.01f64..0.1,
        omega in -0.5f64..0.5,
        phase in 0.0f64..std::f64::consts::TAU,
    ) {
        prop_assume!((x1, y1) != (x2, y2));
        let table = enumerate_modes(&LatticeSpec::standard(6, 6).unwrap());
        let atoms = AtomSet::new(vec![Site::new(x1, y1), Site::new(x2, y2)], omega, lambda).unwrap();
        let h = assemble_hamiltonian(&table, &atoms).unwrap();
        let amps = [C64::new(0.6, 0.0), C64::from_polar(0.8, phase)];
        let psi = PureState::atomic(&amps, table.len()).unwrap();
        let last = evolve_exact_with(&h, &psi, &StepConfig::new(0.005, 50.0, 1_000_000), |_| {}).unwrap();
        let dense = common::dense_hamiltonian(6, &[(x1, y1), (x2, y2)], omega, lambda);
        let want = common::spectral_propagate(&dense, &psi.to_flat(), 50.0);
        let err = last.to_flat().iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-8, "max amplitude error {err:e}");
    }
}

#[test]
fn long_runs_conserve_norm_and_energy() {
    let table = enumerate_modes(&LatticeSpec::standard(15, 15).unwrap());
    let atoms = AtomSet::new(vec![Site::new(8, 5), Site::new(5, 8), Site::new(12, 12)], 0.0, 0.05).unwrap();
    let h = assemble_hamiltonian(&table, &atoms).unwrap();
    let psi = PureState::atomic(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-0.5, 0.0)], table.len()).unwrap();
    let e0 = h.expectation(&psi);
    evolve_exact_with(&h, &psi, &StepConfig::new(0.01, 500.0, 500), |s| {
        assert!((s.norm_sqr() - 1.0).abs() <= 1e-8);
        assert!((h.expectation(s) - e0).abs() <= 1e-8);
    })
    .unwrap();
}

#[test]
fn field_snapshot_is_unitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (nx, ny) in [(3usize, 5usize), (8, 8), (13, 4)] {
        let table = enumerate_modes(&LatticeSpec::standard(nx, ny).unwrap());
        let state = PureState { atom_amps: vec![], mode_amps: random_amps(&mut rng, table.len()), time: 0.0 };
        let grid = field_snapshot(&state, &table).unwrap();
        let total: f64 = grid.iter().map(|c| c.norm_sqr()).sum();
        assert!((total - state.lattice_population()).abs() < 1e-10);
    }
}

#[test]
fn single_mode_snapshot_is_the_profile() {
    let table = enumerate_modes(&LatticeSpec::standard(5, 4).unwrap());
    let k = table.index_of(2, 3).unwrap();
    let mut mode_amps = vec![C64::new(0.0, 0.0); table.len()];
    mode_amps[k] = C64::new(1.0, 0.0);
    let grid = field_snapshot(&PureState { atom_amps: vec![], mode_amps, time: 0.0 }, &table).unwrap();
    for s in table.spec().sites() {
        let want = common::profile(5, 4, 2, 3, s.x, s.y).abs();
        assert!((grid[table.spec().site_index(s)].norm() - want).abs() < 1e-14);
    }
}

/// Pairs B and C of the first geometry, whose diagonals are four distinct
/// lines.
#[test]
fn early_emission_runs_along_the_diagonals() {
    let table = enumerate_modes(&LatticeSpec::standard(49, 49).unwrap());
    for other in [(25, 30), (40, 25)] {
        let atoms = pair_atoms((25, 20), other, 0.05);
        let h = assemble_hamiltonian(&table, &atoms).unwrap();
        let psi = PureState::atomic(&bell_amplitudes(2, 0, 1, 1.0).unwrap(), table.len()).unwrap();
        let last = evolve_exact_with(&h, &psi, &StepConfig::new(0.01, 10.0, 1000), |_| {}).unwrap();
        let grid = field_snapshot(&last, &table).unwrap();
        let total: f64 = grid.iter().map(|c| c.norm_sqr()).sum();
        let on_lines: f64 = table
            .spec()
            .sites()
            .filter(|s| {
                atoms.positions().iter().any(|a| {
                    let (x, y, ax, ay) = (s.x as i64, s.y as i64, a.x as i64, a.y as i64);
                    ((x + y) - (ax + ay)).abs() <= 1 || ((x - y) - (ax - ay)).abs() <= 1
                })
            })
            .map(|s| grid[table.spec().site_index(s)].norm_sqr())
            .sum();
        assert!(on_lines / total >= 0.7, "{other:?}: {:.3}", on_lines / total);
    }
}

#[test]
fn predicted_dark_state_outlives_the_bright_one() {
    let square = enumerate_modes(&LatticeSpec::standard(49, 49).unwrap());
    let tilted = enumerate_modes(&LatticeSpec::tilted(49, 29).unwrap());
    let cases = [
        (&square, (25, 20), (20, 25), 0.05),
        (&square, (25, 20), (25, 30), 0.05),
        (&tilted, (15, 14), (19, 14), 0.01),
        (&tilted, (15, 14), (21, 14), 0.01),
    ];
    for (table, a, b, lambda) in cases {
        let atoms = pair_atoms(a, b, lambda);
        let sign = dark_bell_sign(&steady_rates(table, &atoms).unwrap(), 0, 1).unwrap();
        let dark = bell_concurrence(table, &atoms, sign, 200.0);
        let bright = bell_concurrence(table, &atoms, -sign, 200.0);
        assert!(dark > bright, "{a:?}/{b:?}: dark {dark:.3} bright {bright:.3}");
    }
}

#[test]
fn shortcut_concurrence_matches_wootters() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..1000 {
        let n = rng.random_range(2..=5);
        let b = DMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let m = &b * b.adjoint();
        let excited: f64 = rng.random_range(0.05..=1.0);
        let rho_ee = &m * C64::new(excited / m.trace().re, 0.0);
        let state = SectorState { rho_ee, p_ground: 1.0 - excited, time: 0.0 };
        let i = rng.random_range(0..n);
        let j = (i + rng.random_range(1..n)) % n;
        let r = reduced_two_qubit(&state, i, j).unwrap();
        let full = concurrence(&r).unwrap();
        let short = concurrence_x_state(&r);
        assert!((full - short).abs() < 1e-12, "{full} vs {short}");
        assert!((short - 2.0 * r.coherence().norm()).abs() < 1e-15 || short == 1.0);
    }
}

#[test]
fn master_equation_keeps_a_valid_state() {
    let table = enumerate_modes(&LatticeSpec::standard(21, 21).unwrap());
    let atoms = AtomSet::new(vec![Site::new(11, 6), Site::new(6, 11), Site::new(11, 16), Site::new(16, 11)], 0.0, 0.05).unwrap();
    let gamma = steady_rates(&table, &atoms).unwrap().scaled_to(0.02);
    let lamb = lamb_shift(&table, &atoms).unwrap().shift;
    let generator = SectorGenerator::new(&gamma, &lamb, 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let rho0 = SectorState::pure(&random_amps(&mut rng, 4)).unwrap();
        let mut last_excited = 1.0;
        evolve_master_with(&generator, &rho0, &StepConfig::new(0.01, 200.0, 50), |s| {
            assert!((s.trace() - 1.0).abs() <= 1e-10);
            assert!(s.min_eigenvalue() >= -1e-9);
            assert!(s.excited_population() <= last_excited + 1e-12);
            last_excited = s.excited_population();
        })
        .unwrap();
    }
}
