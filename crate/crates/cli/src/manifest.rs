//! Run manifests: the resolved inputs of a run, written to the output
//! directory before any data file. A manifest is itself re-runnable
//! (`swp run out/manifest.json`): it carries the canonical protocol text,
//! the resolved parameters and the exact grid.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use swp_core::grid::Grid;
use swp_core::params::PhysicalParams;

use crate::paramfile::ParamsFile;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridInfo {
    pub nz: usize,
    pub nx: usize,
    pub z_min_mm: f64,
    pub z_max_mm: f64,
    pub x_min_mm: f64,
    pub x_max_mm: f64,
    pub dt_us: f64,
    pub dt_dark_us: f64,
    pub t_max_us: f64,
}

impl GridInfo {
    pub fn of(grid: &Grid) -> GridInfo {
        GridInfo {
            nz: grid.nz,
            nx: grid.nx,
            z_min_mm: grid.z_min,
            z_max_mm: grid.z_max,
            x_min_mm: grid.x_min,
            x_max_mm: grid.x_max,
            dt_us: grid.dt,
            dt_dark_us: grid.dt_dark,
            t_max_us: grid.t_max,
        }
    }

    pub fn to_grid(&self) -> Grid {
        Grid {
            z_min: self.z_min_mm,
            z_max: self.z_max_mm,
            nz: self.nz,
            x_min: self.x_min_mm,
            x_max: self.x_max_mm,
            nx: self.nx,
            dt: self.dt_us,
            dt_dark: self.dt_dark_us,
            t_max: self.t_max_us,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    /// SHA-256 of `protocol_canonical`.
    pub protocol_sha256: String,
    /// The protocol in canonical DSL form; parsing it reproduces the run.
    pub protocol_canonical: String,
    pub params: ParamsFile,
    /// Residual carrier wavevector delta0/c, rad/mm (diagnostic).
    pub kz0_rad_mm: f64,
    /// On-axis optical depth 2 g0 sigma_z sqrt(2 pi) / Gamma (diagnostic).
    pub optical_depth: f64,
    pub grid: GridInfo,
    pub outputs: Vec<String>,
}

pub fn sha256_hex(text: &str) -> String {
    let mut h = Sha256::new();
    h.update(text.as_bytes());
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

pub fn build(
    command: &str,
    canonical: &str,
    params: &PhysicalParams,
    grid: &Grid,
    outputs: Vec<String>,
) -> RunManifest {
    RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        protocol_sha256: sha256_hex(canonical),
        protocol_canonical: canonical.to_string(),
        params: ParamsFile::from_params(params),
        kz0_rad_mm: params.kz0(),
        optical_depth: params.optical_depth(),
        grid: GridInfo::of(grid),
        outputs,
    }
}
