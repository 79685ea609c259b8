//! Input signal pulses and the smooth window envelope shared by pulses and
//! coupling windows.

use crate::params::TWO_PI;
use crate::C64;

/// Raised-cosine edge time, us. Edges eat into the stated duration.
pub const EDGE_TIME: f64 = 0.1;
pub const DEFAULT_PULSE_DURATION: f64 = 0.3;
pub const DEFAULT_PEAK_RABI: f64 = TWO_PI * 0.05;
pub const DEFAULT_COUPLING_PEAK: f64 = TWO_PI * 9.0;

/// One weak input pulse entering the cloud at z_min.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    pub t0: f64,
    pub duration: f64,
    /// Peak Rabi frequency of the envelope, rad/us.
    pub peak_rabi: f64,
    /// Transverse wavevector of the input mode, rad/mm.
    pub kx: f64,
    /// Global phase, rad.
    pub phase: f64,
}

impl PulseSpec {
    pub fn at(t0: f64) -> PulseSpec {
        PulseSpec {
            t0,
            duration: DEFAULT_PULSE_DURATION,
            peak_rabi: DEFAULT_PEAK_RABI,
            kx: 0.0,
            phase: 0.0,
        }
    }

    pub fn end(&self) -> f64 {
        self.t0 + self.duration
    }

    pub fn center(&self) -> f64 {
        self.t0 + 0.5 * self.duration
    }

    /// Real temporal envelope at t, rad/us (zero outside [t0, t0+duration]).
    pub fn envelope(&self, t: f64) -> f64 {
        self.peak_rabi * flattop(t - self.t0, self.duration)
    }

    /// Complex boundary value at (t, x). A mode labeled kx enters as
    /// exp(-i kx x), so the stored spin wave sits at K_x = +kx.
    pub fn boundary(&self, t: f64, x: f64) -> C64 {
        let env = self.envelope(t);
        if env == 0.0 {
            C64::ZERO
        } else {
            env * C64::cis(self.phase - self.kx * x)
        }
    }
}

/// Flat-top window with raised-cosine edges, unit height on the flat part,
/// zero outside [0, duration]. Edge time shrinks for windows under 2 edges.
pub fn flattop(s: f64, duration: f64) -> f64 {
    let e = EDGE_TIME.min(duration / 2.0);
    if s <= 0.0 || s >= duration {
        0.0
    } else if s < e {
        0.5 * (1.0 - (std::f64::consts::PI * s / e).cos())
    } else if s > duration - e {
        0.5 * (1.0 - (std::f64::consts::PI * (duration - s) / e).cos())
    } else {
        1.0
    }
}

/// Exact integral of flattop(s, duration)^2 over the whole window:
/// flat part + 2 * (3/8) * edge, since mean of ((1-cos)/2)^2 is 3/8.
pub fn flattop_sq_integral(duration: f64) -> f64 {
    let e = EDGE_TIME.min(duration / 2.0);
    (duration - 2.0 * e) + 2.0 * e * 3.0 / 8.0
}
