// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration: one JSON document, units of `J` and `1/J`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use subradiance_core::lattice::{LatticeSpec, Orientation, Site};
use subradiance_core::rates::AtomSet;
use subradiance_core::Error as CoreError;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub lattice: LatticeConfig,
    #[serde(default)]
    pub atoms: Option<AtomsConfig>,
    #[serde(default)]
    pub run: RunConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub nx: usize,
    pub ny: usize,
    #[serde(default = "one")]
    pub j: f64,
    #[serde(default)]
    pub jtilde: f64,
    #[serde(default = "standard")]
    pub orientation: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomsConfig {
    #[serde(default)]
    pub positions: Vec<[usize; 2]>,
    #[serde(default)]
    pub omega: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    /// Output every `stride` integration steps.
    pub stride: Option<usize>,
    pub initial: Option<InitialState>,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    /// Resonance tolerance for the manifold.
    pub tol: Option<f64>,
    /// Physical single-atom rate for the master and Dicke engines; calibrated
    /// from the exact single-atom decay when absent.
    pub gamma0: Option<f64>,
    pub calibration_window: Option<[f64; 2]>,
    /// Jump-operator signs for the Dicke engine.
    pub signs: Option<Vec<f64>>,
    pub layout: Option<LayoutConfig>,
    /// Time at which dark candidates are certified.
    pub certify_time: Option<f64>,
    /// Max number of null-space vectors that get an exact-dynamics check.
    pub certify_limit: Option<usize>,
    #[serde(default)]
    pub candidates: Vec<InitialState>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum InitialState {
    /// Bell state on `pair`; `sign` is `"+"`, `"-"`, `"dark"` or `"bright"`.
    Bell { pair: [usize; 2], sign: String },
    /// Superposed Bell pairs, one sign per pair.
    BellPairs { pairs: Vec<[usize; 2]>, signs: Vec<String> },
    /// Atomic amplitudes as `[re, im]`, normalized on use.
    Amplitudes(Vec<[f64; 2]>),
    Excited(usize),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum LayoutConfig {
    Cross,
    Multiline { rows: usize },
}

fn one() -> f64 {
    1.0
}

fn standard() -> String {
    "standard".into()
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<(Self, serde_json::Value), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let raw: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_value(raw.clone())
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version: expected {SCHEMA_VERSION}, got {}",
                cfg.schema_version
            )));
        }
        cfg.lattice_spec()?;
        Ok((cfg, raw))
    }

    pub fn lattice_spec(&self) -> Result<LatticeSpec, CliError> {
        let l = &self.lattice;
        let orientation: Orientation = l.orientation.parse().map_err(|e| match e {
            CoreError::Config(msg) => CliError::Config(format!("lattice.{msg}")),
            other => other.into(),
        })?;
        Ok(LatticeSpec::new(l.nx, l.ny, l.j, l.jtilde, orientation)?)
    }

    pub fn atoms_config(&self) -> Result<&AtomsConfig, CliError> {
        self.atoms.as_ref().ok_or_else(|| CliError::Config("atoms: section is required".into()))
    }

    pub fn positions(&self) -> Result<Vec<Site>, CliError> {
        let a = self.atoms_config()?;
        if a.positions.is_empty() {
            return Err(CliError::Config("atoms.positions: at least one position is required".into()));
        }
        Ok(a.positions.iter().map(|p| Site::new(p[0], p[1])).collect())
    }

    pub fn atom_set(&self) -> Result<AtomSet, CliError> {
        let a = self.atoms_config()?;
        Ok(AtomSet::new(self.positions()?, a.omega, a.lambda)?)
    }

    pub fn require<T: Copy>(value: Option<T>, field: &str) -> Result<T, CliError> {
        value.ok_or_else(|| CliError::Config(format!("run.{field}: required for this command")))
    }
}
