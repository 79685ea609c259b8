//! Measurement helpers: detector traces, far-field images, port energies,
//! efficiencies and fringe fits.

use crate::error::CoreError;
use crate::params::TWO_PI;
use crate::solver::{EnergyLedger, RunResult};
use crate::C64;

/// Photodiode trace: output intensity vs time. On a transverse grid the
/// intensity is integrated over x (bucket detector).
pub fn apd_trace(result: &RunResult) -> (Vec<f64>, Vec<f64>) {
    let mx = result.grid.measure_x();
    let nt = result.t.len();
    let mut out = Vec::with_capacity(nt);
    for i in 0..nt {
        let mut s = 0.0;
        for ix in 0..result.grid.nx {
            s += result.signal_out[[i, ix]].norm_sqr();
        }
        out.push(s * mx);
    }
    (result.t.clone(), out)
}

/// Trapezoid weights for a (possibly non-uniform) sample grid restricted to a
/// window; samples outside get weight 0.
fn trapezoid_weights(t: &[f64], window: Option<(f64, f64)>) -> Vec<f64> {
    let (lo, hi) = window.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let n = t.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let (a, b) = (t[i], t[i + 1]);
        let ca = a.max(lo);
        let cb = b.min(hi);
        if cb <= ca {
            continue;
        }
        // linear interpolation inside the clipped interval
        let len = cb - ca;
        let mid = 0.5 * (ca + cb);
        let frac = if b > a { (mid - a) / (b - a) } else { 0.5 };
        w[i] += len * (1.0 - frac);
        w[i + 1] += len * frac;
    }
    w
}

/// Time-integrated far-field intensity: |integral omega(x) e^{+iKx} dx|^2
/// accumulated over the window with trapezoid weights in time. Returns the
/// (kx axis, intensity) pair on the grid's centered kx bins.
pub fn farfield_image(
    result: &RunResult,
    window: Option<(f64, f64)>,
) -> Result<(Vec<f64>, Vec<f64>), CoreError> {
    let grid = &result.grid;
    if grid.nx <= 1 {
        return Err(CoreError::Analysis(
            "far-field image needs a transverse axis (nx > 1)".into(),
        ));
    }
    let w = trapezoid_weights(&result.t, window);
    if w.iter().all(|&v| v == 0.0) {
        return Err(CoreError::Analysis(
            "no trace samples inside the requested window".into(),
        ));
    }
    let kxs = grid.kx_axis();
    let xs = grid.x_axis();
    let scale = grid.dx() / TWO_PI.sqrt();
    // phase table [k][x]
    let phases: Vec<Vec<C64>> = kxs
        .iter()
        .map(|&k| xs.iter().map(|&x| C64::cis(k * x) * scale).collect())
        .collect();
    let mut image = vec![0.0; kxs.len()];
    for (i, &wt) in w.iter().enumerate() {
        if wt == 0.0 {
            continue;
        }
        for (m, row) in phases.iter().enumerate() {
            let mut acc = C64::ZERO;
            for (ix, ph) in row.iter().enumerate() {
                acc += result.signal_out[[i, ix]] * ph;
            }
            image[m] += wt * acc.norm_sqr();
        }
    }
    Ok((kxs, image))
}

/// Integral of a scalar trace over a time window (trapezoid, window edges
/// interpolated).
pub fn port_energy(t: &[f64], y: &[f64], window: (f64, f64)) -> f64 {
    let w = trapezoid_weights(t, Some(window));
    y.iter().zip(&w).map(|(a, b)| a * b).sum()
}

/// Sum a far-field image over `halfwidth` bins either side of the bin
/// nearest k. Errors when k misses the bin lattice by more than a quarter
/// bin or falls off the axis.
pub fn image_port(
    kxs: &[f64],
    image: &[f64],
    k: f64,
    halfwidth: usize,
) -> Result<f64, CoreError> {
    if kxs.len() < 2 || kxs.len() != image.len() {
        return Err(CoreError::Analysis("malformed far-field image".into()));
    }
    let dk = kxs[1] - kxs[0];
    let idx = (k - kxs[0]) / dk;
    let i = idx.round();
    if (idx - i).abs() > 0.25 || i < 0.0 || i as usize >= kxs.len() {
        return Err(CoreError::Analysis(format!(
            "port at kx = {k} rad/mm does not land on a far-field bin"
        )));
    }
    let c = i as usize;
    let lo = c.saturating_sub(halfwidth);
    let hi = (c + halfwidth).min(image.len() - 1);
    Ok(image[lo..=hi].iter().sum())
}

/// Energies split into the far-field ports at +k and -k: intensity summed
/// over `halfwidth` bins either side of each port center.
pub fn camera_ports(
    result: &RunResult,
    window: Option<(f64, f64)>,
    k_port: f64,
    halfwidth: usize,
) -> Result<(f64, f64), CoreError> {
    let (kxs, image) = farfield_image(result, window)?;
    let plus = image_port(&kxs, &image, k_port, halfwidth)?;
    let minus = image_port(&kxs, &image, -k_port, halfwidth)?;
    Ok((plus, minus))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Efficiencies {
    /// Fraction of input pulse energy not transmitted through the cloud.
    pub write_in: f64,
    /// Retrieved optical energy over stored energy (set by the caller when a
    /// read trace is available; `from_ledger` leaves it at 0).
    pub retrieval: f64,
    pub net: f64,
}

pub fn write_in_efficiency(ledger: &EnergyLedger) -> Result<f64, CoreError> {
    if !(ledger.input > 0.0) {
        return Err(CoreError::Analysis(
            "write-in efficiency needs a nonzero input pulse".into(),
        ));
    }
    Ok(1.0 - ledger.transmitted / ledger.input)
}

/// Combine a write ledger with the retrieved energy from a read trace.
pub fn efficiencies(write: &EnergyLedger, retrieved: f64) -> Result<Efficiencies, CoreError> {
    let w = write_in_efficiency(write)?;
    let stored_opt = write.input - write.transmitted;
    if !(stored_opt > 0.0) {
        return Err(CoreError::Analysis(
            "nothing was written into the medium".into(),
        ));
    }
    let r = retrieved / stored_opt;
    Ok(Efficiencies {
        write_in: w,
        retrieval: r,
        net: w * r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeFit {
    pub amplitude: f64,
    pub offset: f64,
    /// y = offset + amplitude * cos(2 pi x / period + phase)
    pub phase: f64,
    /// amplitude / offset from the fit
    pub visibility: f64,
    /// (max - min) / (max + min) straight from the samples
    pub visibility_model_free: f64,
    pub rms_residual: f64,
    /// set when the normal equations were singular or the offset vanished;
    /// amplitude/phase/visibility are then meaningless
    pub degenerate: bool,
}

/// Least-squares fit of a cosine fringe with known period. Needs at least 8
/// samples spanning at least one period.
pub fn fit_fringe(xs: &[f64], ys: &[f64], period: f64) -> Result<FringeFit, CoreError> {
    if xs.len() != ys.len() {
        return Err(CoreError::Analysis(format!(
            "fringe fit: {} x values vs {} y values",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 8 {
        return Err(CoreError::Analysis(format!(
            "fringe fit needs at least 8 samples, got {}",
            xs.len()
        )));
    }
    if !(period > 0.0) || !period.is_finite() {
        return Err(CoreError::Analysis(format!("bad fringe period {period}")));
    }
    let span = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - xs.iter().cloned().fold(f64::INFINITY, f64::min);
    if span < period * (1.0 - 1e-9) {
        return Err(CoreError::Analysis(format!(
            "fringe fit: samples span {span:.4}, less than one period {period:.4}"
        )));
    }
    let omega = TWO_PI / period;
    // normal equations for y = o + a cos(wx) + b sin(wx)
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let basis = [1.0, (omega * x).cos(), (omega * x).sin()];
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] += basis[r] * basis[c];
            }
            rhs[r] += basis[r] * y;
        }
    }
    let scale = m.iter().flatten().fold(0.0f64, |a, &b| a.max(b.abs()));
    let mut degenerate = false;
    // gaussian elimination, partial pivoting
    let mut sol = [0.0f64; 3];
    'solve: {
        for col in 0..3 {
            let piv = (col..3)
                .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())
                .unwrap();
            if m[piv][col].abs() < 1e-12 * scale {
                degenerate = true;
                break 'solve;
            }
            m.swap(col, piv);
            rhs.swap(col, piv);
            for r in col + 1..3 {
                let f = m[r][col] / m[col][col];
                for c in col..3 {
                    m[r][c] -= f * m[col][c];
                }
                rhs[r] -= f * rhs[col];
            }
        }
        for r in (0..3).rev() {
            let mut v = rhs[r];
            for c in r + 1..3 {
                v -= m[r][c] * sol[c];
            }
            sol[r] = v / m[r][r];
        }
    }
    let (o, a, b) = (sol[0], sol[1], sol[2]);
    let amplitude = (a * a + b * b).sqrt();
    let phase = (-b).atan2(a);
    let mut rss = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let f = o + a * (omega * x).cos() + b * (omega * x).sin();
        rss += (y - f) * (y - f);
    }
    let rms_residual = (rss / xs.len() as f64).sqrt();
    let ymax = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ymin = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let visibility_model_free = if ymax + ymin > 0.0 {
        (ymax - ymin) / (ymax + ymin)
    } else {
        degenerate = true;
        0.0
    };
    let visibility = if degenerate || !(o > 0.0) {
        degenerate = true;
        0.0
    } else {
        amplitude / o
    };
    Ok(FringeFit {
        amplitude,
        offset: o,
        phase,
        visibility,
        visibility_model_free,
        rms_residual,
        degenerate,
    })
}
