//! CSV/JSON builders for everything the CLI writes. All of them are pure
//! string builders; the caller owns file placement, so identical inputs
//! yield byte-identical files.

use swp_core::analysis::{self, FringeFit};
use swp_core::protocol::Detection;
use swp_core::solver::RunResult;
use swp_core::spinwave::SpinWave;

/// Output pulse trace: time, on-axis complex amplitude, x-integrated
/// intensity. On a 1D grid the on-axis column is the trace itself.
pub fn apd_csv(result: &RunResult) -> String {
    let (t, y) = analysis::apd_trace(result);
    let ix = result.grid.nx / 2;
    let mut s = String::from("t_us,re,im,intensity\n");
    for (i, (&ti, &yi)) in t.iter().zip(&y).enumerate() {
        let v = result.signal_out[[i, ix]];
        s.push_str(&format!("{ti},{},{},{yi}\n", v.re, v.im));
    }
    s
}

pub fn farfield_csv(kxs: &[f64], image: &[f64]) -> String {
    let mut s = String::from("kx_rad_mm,intensity\n");
    for (k, v) in kxs.iter().zip(image) {
        s.push_str(&format!("{k},{v}\n"));
    }
    s
}

pub fn detections_csv(detections: &[Detection]) -> String {
    let mut s = String::from("index,kind,t0_us,t1_us,energy\n");
    for (i, d) in detections.iter().enumerate() {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            i + 1,
            d.kind.name(),
            d.window.0,
            d.window.1,
            d.energy
        ));
    }
    s
}

/// k-space power of a stored wave: first row the K_x axis, then one row
/// per K_z value, row-major |S|^2.
pub fn snapshot_csv(wave: &SpinWave) -> String {
    let view = wave.to_kspace();
    let mut s = String::from("kz_rad_mm\\kx_rad_mm");
    for k in &view.kx {
        s.push_str(&format!(",{k}"));
    }
    s.push('\n');
    // view.data rows run along kx, columns along kz
    for (m, kz) in view.kz.iter().enumerate() {
        s.push_str(&format!("{kz}"));
        for j in 0..view.kx.len() {
            s.push_str(&format!(",{}", view.data[[j, m]].norm_sqr()));
        }
        s.push('\n');
    }
    s
}

pub fn fringe_csv(values: &[f64], rows: &[Vec<f64>]) -> String {
    let ports = rows.first().map_or(0, |r| r.len());
    let mut s = String::from("sweep_value");
    for p in 1..=ports {
        s.push_str(&format!(",port{p}"));
    }
    s.push('\n');
    for (v, row) in values.iter().zip(rows) {
        s.push_str(&format!("{v}"));
        for e in row {
            s.push_str(&format!(",{e}"));
        }
        s.push('\n');
    }
    s
}

/// Fit sidecar for a fringe table: model-free visibility always, cosine-fit
/// results when a period is known.
pub fn fringe_fit_json(
    period: Option<f64>,
    values: &[f64],
    rows: &[Vec<f64>],
) -> String {
    let ports = rows.first().map_or(0, |r| r.len());
    let mut port_docs = Vec::new();
    for p in 0..ports {
        let ys: Vec<f64> = rows.iter().map(|r| r[p]).collect();
        let (lo, hi) = ys
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| {
                (lo.min(y), hi.max(y))
            });
        let vis_mf = if hi + lo > 0.0 {
            (hi - lo) / (hi + lo)
        } else {
            f64::NAN
        };
        let mut doc = serde_json::json!({
            "port": p + 1,
            "visibility_model_free": vis_mf,
        });
        if let Some(t) = period {
            match analysis::fit_fringe(values, &ys, t) {
                Ok(fit) => {
                    doc["fit"] = fit_doc(&fit);
                }
                Err(e) => {
                    doc["fit"] = serde_json::Value::Null;
                    doc["fit_error"] = serde_json::json!(e.to_string());
                }
            }
        } else {
            doc["fit"] = serde_json::Value::Null;
        }
        port_docs.push(doc);
    }
    let doc = serde_json::json!({
        "period_sweep_units": period,
        "ports": port_docs,
    });
    serde_json::to_string_pretty(&doc).expect("json")
}

fn fit_doc(fit: &FringeFit) -> serde_json::Value {
    serde_json::json!({
        "offset": fit.offset,
        "amplitude": fit.amplitude,
        "phase_rad": fit.phase,
        "visibility": fit.visibility,
        "visibility_model_free": fit.visibility_model_free,
        "rms_residual": fit.rms_residual,
        "degenerate": fit.degenerate,
    })
}
