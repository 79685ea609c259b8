//! Orchestration shared by `run`, `sweep` and `demo`: input resolution,
//! grid overrides, output writing. The manifest goes to disk before any
//! data file.

use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use swp_core::analysis::image_port;
use swp_core::dsl;
use swp_core::error::CoreError;
use swp_core::grid::Grid;
use swp_core::params::PhysicalParams;
use swp_core::protocol::{
    apply_sweep_value, execute, execute_on, sweep_values, Protocol, Step,
};

use crate::manifest::{self, RunManifest};
use crate::outputs;
use crate::paramfile::ParamsFile;
use crate::{Failure, GridArgs};

/// Far-field port integration halfwidth, bins each side of the port center.
/// Ports sit 8 bins apart on auto-sized grids, so 2 keeps them disjoint.
const PORT_HALFWIDTH: usize = 2;

pub struct Loaded {
    pub protocol: Protocol,
    pub base_params: Option<PhysicalParams>,
    pub base_grid: Option<Grid>,
}

/// Read a protocol from DSL text, or re-load a previous run's manifest
/// (recognized by its .json extension).
pub fn load(path: &Path) -> Result<Loaded, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|x| x == "json") {
        let m: RunManifest = serde_json::from_str(&text).map_err(|e| {
            Failure::Usage(format!("{}: not a run manifest: {e}", path.display()))
        })?;
        let protocol = dsl::parse(&m.protocol_canonical)?;
        Ok(Loaded {
            protocol,
            base_params: Some(m.params.resolve_against_defaults()),
            base_grid: Some(m.grid.to_grid()),
        })
    } else {
        let protocol = dsl::parse(&text)?;
        Ok(Loaded {
            protocol,
            base_params: None,
            base_grid: None,
        })
    }
}

/// Parameter precedence: --params file > manifest > built-in defaults.
pub fn resolve_params(
    file: Option<&Path>,
    base: Option<PhysicalParams>,
) -> Result<PhysicalParams, Failure> {
    match file {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            let pf: ParamsFile = serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            Ok(pf.resolve_against_defaults())
        }
        None => Ok(base.unwrap_or_else(swp_core::params::default_params)),
    }
}

/// Start from the protocol-sized (or manifest) grid, then apply flag
/// overrides. Values are validated by the solver, not here, so a bad
/// combination fails with the solver's explanation.
pub fn resolve_grid(protocol: &Protocol, base: Option<Grid>, flags: &GridArgs) -> Grid {
    let mut g = base.unwrap_or_else(|| protocol.required_grid());
    if let Some(nz) = flags.nz {
        g.nz = nz;
    }
    if let Some(nx) = flags.nx {
        g.nx = nx;
    }
    if let Some(ns) = flags.dt_ns {
        g.dt = ns * 1e-3;
        if g.dt_dark < g.dt {
            g.dt_dark = g.dt;
        }
    }
    g
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    fs::write(&path, content).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

pub fn run_to_dir(
    protocol: &Protocol,
    params: &PhysicalParams,
    grid: Grid,
    snapshot_every: Option<usize>,
    out: &Path,
) -> Result<(), Failure> {
    if protocol.sweep.is_some() {
        eprintln!(
            "note: protocol has a SWEEP; `run` executes it as written (one point), \
             use `swp sweep` for the fringe table"
        );
    }
    let canonical = dsl::serialize(protocol);
    let executed = execute_on(protocol, params, Some(grid.clone()), snapshot_every)?;

    let mut names = vec!["apd.csv".to_string(), "detections.csv".to_string()];
    for (i, d) in executed.detections.iter().enumerate() {
        if d.camera.is_some() {
            names.push(format!("farfield_{}.csv", i + 1));
        }
    }
    let snap_names: Vec<String> = executed
        .result
        .snapshots
        .iter()
        .enumerate()
        .map(|(i, (t, _))| format!("snapshot_{:03}_t{t:.6}.csv", i + 1))
        .collect();
    names.extend(snap_names.iter().cloned());

    fs::create_dir_all(out).map_err(|e| Failure::Io(format!("{}: {e}", out.display())))?;
    let m = manifest::build("run", &canonical, params, &grid, names.clone());
    write_file(
        out,
        "manifest.json",
        &serde_json::to_string_pretty(&m).expect("json"),
    )?;

    write_file(out, "apd.csv", &outputs::apd_csv(&executed.result))?;
    write_file(
        out,
        "detections.csv",
        &outputs::detections_csv(&executed.detections),
    )?;
    for (i, d) in executed.detections.iter().enumerate() {
        if let Some((kxs, image)) = &d.camera {
            write_file(
                out,
                &format!("farfield_{}.csv", i + 1),
                &outputs::farfield_csv(kxs, image),
            )?;
        }
    }
    for (name, (_, wave)) in snap_names.iter().zip(&executed.result.snapshots) {
        write_file(out, name, &outputs::snapshot_csv(wave))?;
    }

    let led = &executed.result.ledger;
    eprintln!(
        "run done: input {:.6}, transmitted {:.6}, stored at end {:.6}",
        led.input, led.transmitted, led.stored_final
    );
    for (i, d) in executed.detections.iter().enumerate() {
        eprintln!(
            "detection {} ({}) over {:.3}..{:.3} us: energy {:.6e}",
            i + 1,
            d.kind.name(),
            d.window.0,
            d.window.1,
            d.energy
        );
    }
    Ok(())
}

/// Distinct pulse kx values, in order of appearance: the far-field port
/// centers a camera detection is integrated at.
fn port_centers(protocol: &Protocol) -> Vec<f64> {
    let mut centers: Vec<f64> = Vec::new();
    for s in &protocol.steps {
        if let Step::Pulse(p) = s {
            if !centers.iter().any(|&c| c == p.kx) {
                centers.push(p.kx);
            }
        }
    }
    if centers.is_empty() {
        centers.push(0.0);
    }
    centers
}

/// One sweep point: set the swept scalar, run, reduce every detection to
/// port energies (APD: window energy; camera: one value per port center).
fn point_row(
    protocol: &Protocol,
    params: &PhysicalParams,
    grid: &Grid,
    centers: &[f64],
    value: f64,
) -> Result<Vec<f64>, CoreError> {
    let mut p = protocol.clone();
    let mut pr = *params;
    let path = p.sweep.as_ref().expect("caller checked").path.clone();
    apply_sweep_value(&mut p, &mut pr, &path, value)?;
    let ex = execute(&p, &pr, Some(grid.clone()))?;
    let mut row = Vec::new();
    for d in &ex.detections {
        match &d.camera {
            None => row.push(d.energy),
            Some((kxs, image)) => {
                for &k in centers {
                    row.push(image_port(kxs, image, k, PORT_HALFWIDTH)?);
                }
            }
        }
    }
    Ok(row)
}

pub fn sweep_to_dir(
    protocol: &Protocol,
    params: &PhysicalParams,
    grid: Grid,
    parallel: usize,
    fit_period: Option<f64>,
    out: &Path,
) -> Result<(), Failure> {
    let Some(sw) = &protocol.sweep else {
        return Err(Failure::Usage(
            "protocol has no SWEEP statement; use `swp run` for a single point".into(),
        ));
    };
    let canonical = dsl::serialize(protocol);
    let values = sweep_values(sw);

    let centers = port_centers(protocol);
    let done = AtomicUsize::new(0);
    let total = values.len();
    let compute = |&v: &f64| -> Result<Vec<f64>, CoreError> {
        let row = point_row(protocol, params, &grid, &centers, v);
        let k = done.fetch_add(1, Ordering::Relaxed) + 1;
        eprintln!("sweep point {k}/{total} ({}={v})", sw.path);
        row
    };
    let rows: Vec<Vec<f64>> = if parallel > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallel)
            .build()
            .map_err(|e| Failure::Usage(format!("--parallel {parallel}: {e}")))?;
        pool.install(|| values.par_iter().map(compute).collect::<Result<_, _>>())?
    } else {
        values.iter().map(compute).collect::<Result<_, _>>()?
    };

    fs::create_dir_all(out).map_err(|e| Failure::Io(format!("{}: {e}", out.display())))?;
    let names = vec!["fringe.csv".to_string(), "fringe_fit.json".to_string()];
    let m = manifest::build("sweep", &canonical, params, &grid, names);
    write_file(
        out,
        "manifest.json",
        &serde_json::to_string_pretty(&m).expect("json"),
    )?;
    write_file(out, "fringe.csv", &outputs::fringe_csv(&values, &rows))?;
    write_file(
        out,
        "fringe_fit.json",
        &outputs::fringe_fit_json(fit_period, &values, &rows),
    )?;
    Ok(())
}
