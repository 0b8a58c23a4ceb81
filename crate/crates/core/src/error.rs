// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no iso-frequency contour at omega = {0}")]
    NoContour(f64),

    #[error("emitter at ({x}, {y}) is decoupled from the resonant manifold")]
    DegenerateSource { x: usize, y: usize },

    #[error("norm drift {drift:.3e} at t = {time}: reduce the time step")]
    StepSize { drift: f64, time: f64 },

    #[error("capacity exceeded: {0}")]
    Capacity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
