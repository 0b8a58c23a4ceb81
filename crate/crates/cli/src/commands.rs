// SPDX-License-Identifier: Apache-2.0

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::{json, Value};
use subradiance_core::design::{
    certify_dark, cross_layout, dark_basis, max_inter_block, multiline_layout, radiative_blocks,
    DarkReport, DarkVector, Layout, NULL_SPACE_CUTOFF,
};
use subradiance_core::dynamics::{
    assemble_hamiltonian, bell_amplitudes, calibrate_gamma0, concurrence, dark_bell_sign,
    dicke_evolution, evolve_exact_with, evolve_master, field_snapshot, reduced_two_qubit,
    PureState, ReducePair, SectorState, StepConfig,
};
use subradiance_core::lattice::{enumerate_modes, ModeTable, Site, DEFAULT_RESONANCE_TOL};
use subradiance_core::rates::{crosstalk_map_with_tol, lamb_shift_with_tol, steady_rates_with_tol, AtomSet, RateMatrix};

use crate::config::{ExperimentConfig, InitialState, LayoutConfig};
use crate::error::CliError;
use crate::output::{Cell, OutputDir, Table};

const DEFAULT_DT: f64 = 0.01;
const DEFAULT_CERTIFY_TIME: f64 = 150.0;
const DEFAULT_CERTIFY_LIMIT: usize = 4;
const DEFAULT_CALIBRATION: [f64; 2] = [50.0, 150.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Exact,
    Master,
    Dicke,
}

pub struct Run<'a> {
    pub cfg: &'a ExperimentConfig,
    pub tol: Option<f64>,
    pub out: &'a mut OutputDir,
}

impl Run<'_> {
    fn resonance_tol(&self) -> Result<f64, CliError> {
        let tol = self.tol.or(self.cfg.run.tol).unwrap_or(DEFAULT_RESONANCE_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Config(format!("run.tol: must be a positive number, got {tol}")));
        }
        Ok(tol)
    }

    fn table(&self) -> Result<ModeTable, CliError> {
        Ok(enumerate_modes(&self.cfg.lattice_spec()?))
    }

    fn dt(&self) -> Result<f64, CliError> {
        let dt = self.cfg.run.dt.unwrap_or(DEFAULT_DT);
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(CliError::Config(format!("run.dt: must be a positive number, got {dt}")));
        }
        Ok(dt)
    }
}

pub fn dispersion(run: &mut Run) -> Result<Value, CliError> {
    let table = run.table()?;
    let mut band = Table::new(["lx", "ly", "kx", "ky", "omega"]);
    for m in table.modes() {
        band.push(vec![m.lx.into(), m.ly.into(), m.kx.into(), m.ky.into(), m.omega.into()]);
    }
    run.out.csv("band.csv", &band)?;
    Ok(json!({ "modes": table.len() }))
}

pub fn xtalk_map(run: &mut Run) -> Result<Value, CliError> {
    let table = run.table()?;
    let atoms = run.cfg.atom_set()?;
    let source = atoms.positions()[0];
    let tol = run.resonance_tol()?;
    let map = crosstalk_map_with_tol(&table, source, atoms.omega(), tol)?;
    let mut out = Table::new(["x", "y", "ratio"]);
    for (site, ratio) in map.iter_x_major() {
        out.push(vec![site.x.into(), site.y.into(), ratio.into()]);
    }
    run.out.csv("map.csv", &out)?;
    let manifold = table.resonant_indices(atoms.omega(), tol).len();
    Ok(json!({ "source": [source.x, source.y], "manifold_size": manifold, "resonance_tol": tol }))
}

/// Resolves a Bell sign string against the steady rates.
fn bell_sign(sign: &str, rates: &RateMatrix, i: usize, j: usize) -> Result<f64, CliError> {
    let dark = || {
        dark_bell_sign(rates, i, j).ok_or_else(|| {
            CliError::Degenerate(format!("atoms {i} and {j} have no cross-talk: no dark Bell sign"))
        })
    };
    match sign {
        "+" => Ok(1.0),
        "-" => Ok(-1.0),
        "dark" => dark(),
        "bright" => Ok(-dark()?),
        other => Err(CliError::Config(format!(
            "run.initial.sign: expected \"+\", \"-\", \"dark\" or \"bright\", got {other:?}"
        ))),
    }
}

fn check_pair(pair: [usize; 2], n: usize, field: &str) -> Result<(usize, usize), CliError> {
    let [i, j] = pair;
    if i >= n || j >= n || i == j {
        return Err(CliError::Config(format!("{field}: invalid atom pair [{i}, {j}] for {n} atoms")));
    }
    Ok((i, j))
}

/// Atomic amplitudes of an initial state together with the resolved Bell
/// signs.
fn resolve_state(
    state: &InitialState,
    n: usize,
    rates: &RateMatrix,
    field: &str,
) -> Result<(Vec<C64>, Vec<f64>), CliError> {
    match state {
        InitialState::Bell { pair, sign } => {
            let (i, j) = check_pair(*pair, n, field)?;
            let s = bell_sign(sign, rates, i, j)?;
            Ok((bell_amplitudes(n, i, j, s)?, vec![s]))
        }
        InitialState::BellPairs { pairs, signs } => {
            if pairs.len() != signs.len() || pairs.is_empty() {
                return Err(CliError::Config(format!("{field}: one sign per pair is required")));
            }
            let mut idx = Vec::new();
            let mut resolved = Vec::new();
            for (p, s) in pairs.iter().zip(signs) {
                let (i, j) = check_pair(*p, n, field)?;
                resolved.push(bell_sign(s, rates, i, j)?);
                idx.push((i, j));
            }
            let v = subradiance_core::design::bell_superposition(n, &idx, &resolved)
                .map_err(|e| CliError::Config(format!("{field}: {e}")))?;
            Ok((v.amps, resolved))
        }
        InitialState::Amplitudes(amps) => {
            if amps.len() != n {
                return Err(CliError::Config(format!("{field}: {} amplitudes for {n} atoms", amps.len())));
            }
            let amps: Vec<C64> = amps.iter().map(|a| C64::new(a[0], a[1])).collect();
            if amps.iter().all(|c| c.norm_sqr() == 0.0) || amps.iter().any(|c| !c.is_finite()) {
                return Err(CliError::Config(format!("{field}: amplitudes must be finite and nonzero")));
            }
            Ok((amps, vec![]))
        }
        InitialState::Excited(i) => {
            if *i >= n {
                return Err(CliError::Config(format!("{field}: atom index {i} out of range")));
            }
            let mut amps = vec![C64::new(0.0, 0.0); n];
            amps[*i] = C64::new(1.0, 0.0);
            Ok((amps, vec![]))
        }
    }
}

fn pairs_of(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect()
}

fn traj_header(n: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((0..n).map(|i| format!("p_{i}")));
    h.extend(pairs_of(n).into_iter().map(|(i, j)| format!("c_{i}_{j}")));
    h.push("lattice".into());
    h
}

fn traj_row<S: ReducePair>(state: &S, time: f64, pops: Vec<f64>, rest: f64) -> Result<Vec<Cell>, CliError> {
    let n = pops.len();
    let mut row: Vec<Cell> = vec![time.into()];
    row.extend(pops.into_iter().map(Cell::from));
    for (i, j) in pairs_of(n) {
        let c = concurrence(&reduced_two_qubit(state, i, j)?)?;
        row.push(c.into());
    }
    row.push(rest.into());
    Ok(row)
}

pub fn evolve(run: &mut Run, engine: Engine) -> Result<Value, CliError> {
    let cfg = run.cfg;
    let table = run.table()?;
    let atoms = cfg.atom_set()?;
    let n = atoms.len();
    let tol = run.resonance_tol()?;
    let dt = run.dt()?;
    let t_final = ExperimentConfig::require(cfg.run.t_final, "t_final")?;
    let stride = cfg.run.stride.unwrap_or(100);
    if stride == 0 {
        return Err(CliError::Config("run.stride: must be >= 1".into()));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(CliError::Config(format!("run.t_final: must be >= 0, got {t_final}")));
    }
    let initial = cfg
        .run
        .initial
        .as_ref()
        .ok_or_else(|| CliError::Config("run.initial: required for evolve".into()))?;
    let rates = steady_rates_with_tol(&table, &atoms, tol)?;
    let (amps, signs) = resolve_state(initial, n, &rates, "run.initial")?;
    let mut derived = json!({
        "engine": engine,
        "bell_signs": signs,
        "manifold_size": rates.manifold_size,
        "resonance_tol": tol,
    });

    let mut traj = Table::new(traj_header(n));
    match engine {
        Engine::Exact => {
            let steps = (t_final / dt).round() as usize;
            let dt_eff = if steps == 0 { 0.0 } else { t_final / steps as f64 };
            let mut snaps = Vec::new();
            for &ts in &cfg.run.snapshot_times {
                if !(0.0..=t_final).contains(&ts) {
                    return Err(CliError::Config(format!("run.snapshot_times: {ts} outside [0, {t_final}]")));
                }
                let k = if steps == 0 { 0 } else { (ts / dt_eff).round() as usize };
                snaps.push((k, ts));
            }
            let h = assemble_hamiltonian(&table, &atoms)?;
            let psi0 = PureState::atomic(&amps, table.len())?;
            let mut k = 0usize;
            let mut failure = None;
            let mut fields: Vec<(f64, Vec<C64>)> = Vec::new();
            evolve_exact_with(&h, &psi0, &StepConfig::new(dt, t_final, 1), |s| {
                if failure.is_some() {
                    return;
                }
                if k % stride == 0 || k == steps {
                    match traj_row(s, s.time, s.populations(), s.lattice_population()) {
                        Ok(row) => traj.push(row),
                        Err(e) => failure = Some(e),
                    }
                }
                for &(ks, ts) in &snaps {
                    if ks == k {
                        match field_snapshot(s, &table) {
                            Ok(grid) => fields.push((ts, grid)),
                            Err(e) => failure = Some(e.into()),
                        }
                    }
                }
                k += 1;
            })?;
            if let Some(e) = failure {
                return Err(e);
            }
            let spec = *table.spec();
            let mut names = Vec::new();
            for (ts, grid) in fields {
                let mut t = Table::new(["x", "y", "re", "im", "intensity"]);
                for x in 1..=spec.nx() {
                    for y in 1..=spec.ny() {
                        let c = grid[spec.site_index(Site::new(x, y))];
                        t.push(vec![x.into(), y.into(), c.re.into(), c.im.into(), c.norm_sqr().into()]);
                    }
                }
                let name = format!("field_t{ts}.csv");
                run.out.csv(&name, &t)?;
                names.push(json!({ "time": ts, "file": name }));
            }
            derived["snapshots"] = json!(names);
        }
        Engine::Master | Engine::Dicke => {
            if !cfg.run.snapshot_times.is_empty() {
                return Err(CliError::Config("run.snapshot_times: field snapshots need the exact engine".into()));
            }
            let gamma0 = physical_gamma0(run, &table, &atoms, dt)?;
            derived["gamma0"] = json!(gamma0);
            let rho0 = SectorState::pure(&amps)?;
            let step = StepConfig::new(dt, t_final, stride);
            let states = if engine == Engine::Master {
                let gamma = rates.scaled_to(gamma0);
                let lamb = lamb_shift_with_tol(&table, &atoms, tol)?.shift;
                evolve_master(&gamma, &lamb, atoms.omega(), &rho0, &step)?
            } else {
                let signs = cfg
                    .run
                    .signs
                    .as_ref()
                    .ok_or_else(|| CliError::Config("run.signs: required for the dicke engine".into()))?;
                if signs.len() != n || signs.iter().any(|s| s.abs() != 1.0) {
                    return Err(CliError::Config(format!("run.signs: expected {n} entries of +1 or -1")));
                }
                dicke_evolution(signs, gamma0, &rho0, &step)?
            };
            for s in &states {
                traj.push(traj_row(s, s.time, s.populations(), s.p_ground)?);
            }
        }
    }
    run.out.csv("traj.csv", &traj)?;
    Ok(derived)
}

fn physical_gamma0(run: &Run, table: &ModeTable, atoms: &AtomSet, dt: f64) -> Result<f64, CliError> {
    if let Some(g) = run.cfg.run.gamma0 {
        if !(g >= 0.0 && g.is_finite()) {
            return Err(CliError::Config(format!("run.gamma0: must be >= 0, got {g}")));
        }
        return Ok(g);
    }
    let [a, b] = run.cfg.run.calibration_window.unwrap_or(DEFAULT_CALIBRATION);
    if !(0.0 <= a && a < b && b.is_finite()) {
        return Err(CliError::Config(format!("run.calibration_window: invalid window [{a}, {b}]")));
    }
    let g = calibrate_gamma0(table, atoms.positions()[0], atoms.omega(), atoms.lambda(), dt, (a, b), 1.0)?;
    if !g.is_finite() {
        return Err(CliError::Numerical("calibrated decay rate is not finite".into()));
    }
    if g < 0.0 {
        return Err(CliError::Degenerate(format!(
            "single-atom population grows over [{a}, {b}] (fitted rate {g:.3e}); set run.gamma0"
        )));
    }
    Ok(g)
}

#[derive(Serialize)]
struct ReportJson {
    retained_population: f64,
    norm_drift: f64,
    energy_drift: f64,
    time: f64,
}

#[derive(Serialize)]
struct VectorJson {
    amps: Vec<[f64; 2]>,
    steady_residual: f64,
    lamb_residual: f64,
    certification: Option<ReportJson>,
}

#[derive(Serialize)]
struct DarkJson {
    atoms: Vec<[usize; 2]>,
    lambda: f64,
    manifold_size: usize,
    nullity: usize,
    null_space_cutoff: f64,
    vectors: Vec<VectorJson>,
    candidates: Vec<VectorJson>,
    blocks: Vec<Vec<usize>>,
    block_diagonal: bool,
    max_inter_block: f64,
}

fn vector_json(v: &DarkVector, unit_gamma: &DMatrix<f64>, unit_lamb: &DMatrix<f64>, report: Option<(DarkReport, f64)>) -> VectorJson {
    let sigma = unit_gamma.clone().svd(false, false).singular_values.max();
    VectorJson {
        amps: v.amps.iter().map(|c| [c.re, c.im]).collect(),
        steady_residual: if sigma > 0.0 { v.apply_norm(unit_gamma) / sigma } else { 0.0 },
        lamb_residual: v.eigen_residual(unit_lamb),
        certification: report.map(|(r, time)| ReportJson {
            retained_population: r.retained_population,
            norm_drift: r.norm_drift,
            energy_drift: r.energy_drift,
            time,
        }),
    }
}

pub fn dark(run: &mut Run) -> Result<Value, CliError> {
    let cfg = run.cfg;
    let table = run.table()?;
    let a = cfg.atoms_config()?;
    let layout = match &cfg.run.layout {
        Some(LayoutConfig::Cross) => cross_layout(&table)?,
        Some(LayoutConfig::Multiline { rows }) => multiline_layout(&table, *rows)?,
        None => Layout::free(cfg.positions()?),
    };
    if cfg.run.layout.is_some() && !a.positions.is_empty() {
        return Err(CliError::Config("atoms.positions: must be empty when run.layout is set".into()));
    }
    if layout.len() < 2 {
        return Err(CliError::Config("atoms.positions: dark needs at least two atoms".into()));
    }
    let tol = run.resonance_tol()?;
    let dt = run.dt()?;
    let t_cert = cfg.run.certify_time.unwrap_or(DEFAULT_CERTIFY_TIME);
    if !(t_cert >= 0.0 && t_cert.is_finite()) {
        return Err(CliError::Config(format!("run.certify_time: must be >= 0, got {t_cert}")));
    }
    let limit = cfg.run.certify_limit.unwrap_or(DEFAULT_CERTIFY_LIMIT);

    let atoms = layout.atoms(a.omega, a.lambda)?;
    let rates = steady_rates_with_tol(&table, &atoms, tol)?;
    let unit = atoms.with_lambda(1.0)?;
    let unit_gamma = steady_rates_with_tol(&table, &unit, tol)?.gamma;
    let unit_lamb = lamb_shift_with_tol(&table, &unit, tol)?.shift;
    let basis = dark_basis(&rates, NULL_SPACE_CUTOFF);

    let certify = |v: &DarkVector| -> Result<(DarkReport, f64), CliError> {
        Ok((certify_dark(&layout, v, &table, a.omega, a.lambda, t_cert, dt)?, t_cert))
    };
    let mut vectors = Vec::new();
    for (idx, v) in basis.iter().enumerate() {
        let report = if idx < limit { Some(certify(v)?) } else { None };
        vectors.push(vector_json(v, &unit_gamma, &unit_lamb, report));
    }
    let mut candidates = Vec::new();
    for (idx, c) in cfg.run.candidates.iter().enumerate() {
        let (amps, _) = resolve_state(c, layout.len(), &rates, &format!("run.candidates[{idx}]"))?;
        let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let v = DarkVector { amps: amps.iter().map(|c| c / norm).collect() };
        let report = certify(&v)?;
        candidates.push(vector_json(&v, &unit_gamma, &unit_lamb, Some(report)));
    }
    let blocks = radiative_blocks(&rates.gamma, 1e-12);
    let doc = DarkJson {
        atoms: layout.positions.iter().map(|s| [s.x, s.y]).collect(),
        lambda: a.lambda,
        manifold_size: rates.manifold_size,
        nullity: basis.len(),
        null_space_cutoff: NULL_SPACE_CUTOFF,
        vectors,
        candidates,
        block_diagonal: blocks.len() > 1,
        max_inter_block: max_inter_block(&rates.gamma, &blocks),
        blocks,
    };
    let rows = doc.vectors.len() + doc.candidates.len();
    run.out.json("darkbasis.json", &doc, rows)?;
    Ok(json!({ "nullity": doc.nullity, "block_diagonal": doc.block_diagonal, "resonance_tol": tol }))
}
