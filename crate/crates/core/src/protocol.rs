//! Protocol layer: declarative step lists (pulses, coupling windows, grating
//! applications, readouts, detectors), validation, execution, and the
//! built-in experiment sequences.

use crate::analysis;
use crate::error::CoreError;
use crate::grating::{
    solve_equal_orders, GratingShape, GratingSpec, SolveCondition,
};
use crate::grid::Grid;
use crate::params::{PhysicalParams, TWO_PI};
use crate::pulse::{PulseSpec, DEFAULT_COUPLING_PEAK};
use crate::solver::{run, AcsEvent, CouplingWindow, FieldSchedule, RunResult};
use std::f64::consts::PI;

/// Longitudinal grating wavevector of the interferometer protocols, rad/mm.
pub const KZ_PATTERN: f64 = 22.0;
/// Coarser pitch used by the echo (lifo/fifo) protocols, rad/mm. Resolved by
/// the default 512-point axial grid, where 22 rad/mm would not be.
pub const KZ_ECHO: f64 = 9.6;
/// Transverse signal mode tilt for the beamsplitter protocols, rad/mm.
pub const KX_TRANSVERSE: f64 = 75.4;
/// Mode tilt and grating pitch for the two-dimensional protocol, rad/mm.
pub const KX_2D: f64 = 12.0;
pub const KZ_2D: f64 = 5.0;

const WRITE_WINDOW: f64 = 0.9;
const READ_WINDOW: f64 = 0.6;
/// Pulse start relative to its coupling window start.
const PULSE_LEAD: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorKind {
    /// Time-resolved bucket detector on the output face.
    Apd,
    /// Far-field (transverse wavevector) image, time-integrated.
    Camera,
}

impl DetectorKind {
    pub fn name(&self) -> &'static str {
        match self {
            DetectorKind::Apd => "apd",
            DetectorKind::Camera => "camera",
        }
    }

    pub fn from_name(name: &str) -> Option<DetectorKind> {
        match name.to_ascii_lowercase().as_str() {
            "apd" => Some(DetectorKind::Apd),
            "camera" => Some(DetectorKind::Camera),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectSpec {
    pub kind: DetectorKind,
    pub t0: f64,
    pub t1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    Pulse(PulseSpec),
    Coupling { t0: f64, duration: f64, peak: f64 },
    Grate { t: f64, spec: GratingSpec },
    Read { t0: f64, duration: f64 },
    Detect(DetectSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Dotted parameter path, e.g. "grate1.zeta" or "params.delta_two".
    pub path: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Protocol {
    pub steps: Vec<Step>,
    pub sweep: Option<SweepSpec>,
}

const EPS: f64 = 1e-9;

impl Protocol {
    /// All coupling intervals (explicit windows and readouts), time-sorted,
    /// tagged with their step index.
    fn windows(&self) -> Vec<(usize, f64, f64, f64)> {
        let mut out = Vec::new();
        for (i, s) in self.steps.iter().enumerate() {
            match *s {
                Step::Coupling { t0, duration, peak } => out.push((i, t0, t0 + duration, peak)),
                Step::Read { t0, duration } => {
                    out.push((i, t0, t0 + duration, DEFAULT_COUPLING_PEAK))
                }
                _ => {}
            }
        }
        out.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        out
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        let windows = self.windows();
        for w in windows.windows(2) {
            if w[1].1 < w[0].2 - EPS {
                return Err(CoreError::protocol_at(
                    w[1].0,
                    format!(
                        "coupling window starting at {} overlaps the one ending at {}",
                        w[1].1, w[0].2
                    ),
                ));
            }
        }
        for (i, s) in self.steps.iter().enumerate() {
            match *s {
                Step::Pulse(p) => {
                    if !(p.duration > 0.0) || p.t0 < 0.0 {
                        return Err(CoreError::protocol_at(i, "pulse has a bad time range"));
                    }
                    let inside = windows
                        .iter()
                        .any(|&(_, a, b, peak)| peak > 0.0 && a <= p.t0 + EPS && b >= p.end() - EPS);
                    if !inside {
                        return Err(CoreError::protocol_at(
                            i,
                            format!(
                                "pulse at [{}, {}] is not covered by any coupling window, so it \
                                 cannot be stored",
                                p.t0,
                                p.end()
                            ),
                        ));
                    }
                }
                Step::Coupling { t0, duration, peak } => {
                    if !(duration > 0.0) || t0 < 0.0 || !(peak >= 0.0) {
                        return Err(CoreError::protocol_at(i, "coupling window is malformed"));
                    }
                }
                Step::Read { t0, duration } => {
                    if !(duration > 0.0) || t0 < 0.0 {
                        return Err(CoreError::protocol_at(i, "readout window is malformed"));
                    }
                    // a readout must not swallow an input pulse
                    for s2 in &self.steps {
                        if let Step::Pulse(p) = s2 {
                            if p.t0 < t0 + duration - EPS && p.end() > t0 + EPS {
                                return Err(CoreError::protocol_at(
                                    i,
                                    format!(
                                        "readout at [{}, {}] overlaps an input pulse; use a \
                                         coupling window to store",
                                        t0,
                                        t0 + duration
                                    ),
                                ));
                            }
                        }
                    }
                }
                Step::Grate { t, spec } => {
                    if t <= 0.0 {
                        return Err(CoreError::protocol_at(i, "grating time must be positive"));
                    }
                    if !(spec.amplitude >= 0.0) {
                        return Err(CoreError::protocol_at(i, "grating amplitude is negative"));
                    }
                    for &(_, a, b, _) in &windows {
                        if t > a - EPS && t < b + EPS {
                            return Err(CoreError::protocol_at(
                                i,
                                format!(
                                    "grating at t = {t} falls inside the coupling window \
                                     [{a}, {b}]; gratings act in the dark"
                                ),
                            ));
                        }
                    }
                }
                Step::Detect(d) => {
                    if !(d.t1 > d.t0) {
                        return Err(CoreError::protocol_at(i, "detector window is empty"));
                    }
                }
            }
        }
        if let Some(sw) = &self.sweep {
            if sw.steps == 0 {
                return Err(CoreError::protocol(
                    "sweep needs at least one step".to_string(),
                ));
            }
            // the path must resolve against this protocol
            let mut probe = self.clone();
            let mut params = crate::params::default_params();
            apply_sweep_value(&mut probe, &mut params, &sw.path, sw.from).map_err(|e| {
                CoreError::protocol(format!("sweep: {e}"))
            })?;
        }
        Ok(())
    }

    /// Latest time any step needs, plus settle margin.
    pub fn end_time(&self) -> f64 {
        let mut t = 0.0f64;
        for s in &self.steps {
            let e = match *s {
                Step::Pulse(p) => p.end(),
                Step::Coupling { t0, duration, .. } => t0 + duration,
                Step::Read { t0, duration } => t0 + duration,
                Step::Grate { t, .. } => t,
                Step::Detect(d) => d.t1,
            };
            t = t.max(e);
        }
        t + 0.2
    }

    /// Pick a grid that resolves every wavevector in the protocol: at least 8
    /// samples per grating period on each axis, transverse box sized so the
    /// signal tilt falls on a far-field bin.
    pub fn required_grid(&self) -> Grid {
        let mut kz_max = 0.0f64;
        let mut kx_grating = 0.0f64;
        let mut kx_pulse = 0.0f64;
        for s in &self.steps {
            match *s {
                Step::Grate { spec, .. } => {
                    kz_max = kz_max.max(spec.kz.abs());
                    kx_grating = kx_grating.max(spec.kx.abs());
                }
                Step::Pulse(p) => kx_pulse = kx_pulse.max(p.kx.abs()),
                _ => {}
            }
        }
        // the sampling target sits below 8 by a hair so spans engineered to
        // land exactly on 8 samples per period don't double on rounding noise
        const TARGET: f64 = 8.0 * (1.0 - 1e-9);
        let z_span = 2.0 * crate::grid::DEFAULT_Z_HALF_SPAN;
        let mut nz: usize = 512;
        while kz_max > 0.0 && (TWO_PI / kz_max) / (z_span / nz as f64) < TARGET {
            nz *= 2;
        }
        let t_max = self.end_time();
        let kx_any = kx_grating.max(kx_pulse);
        if kx_any == 0.0 {
            return Grid::one_d(nz, t_max);
        }
        let kx_ref = if kx_pulse > 0.0 { kx_pulse } else { kx_any / 2.0 };
        let x_span = 16.0 * PI / kx_ref;
        let mut nx: usize = 16;
        while kx_any > 0.0 && (TWO_PI / kx_any) / (x_span / nx as f64) < TARGET {
            nx *= 2;
        }
        let mut g = Grid::two_d(nz, nx, x_span, t_max);
        g.t_max = t_max;
        g
    }

    pub fn to_schedule(&self) -> FieldSchedule {
        let mut sched = FieldSchedule::default();
        for s in &self.steps {
            match *s {
                Step::Pulse(p) => sched.pulses.push(p),
                Step::Coupling { t0, duration, peak } => sched.coupling.push(CouplingWindow {
                    t0,
                    duration,
                    peak,
                }),
                Step::Read { t0, duration } => sched.coupling.push(CouplingWindow {
                    t0,
                    duration,
                    peak: DEFAULT_COUPLING_PEAK,
                }),
                Step::Grate { t, spec } => sched.acs_events.push(AcsEvent { t, spec }),
                Step::Detect(_) => {}
            }
        }
        sched
    }
}

/// Inclusive sweep axis.
pub fn sweep_values(sweep: &SweepSpec) -> Vec<f64> {
    if sweep.steps <= 1 {
        return vec![sweep.from];
    }
    let n = sweep.steps;
    (0..n)
        .map(|i| sweep.from + (sweep.to - sweep.from) * i as f64 / (n - 1) as f64)
        .collect()
}

fn params_field<'a>(params: &'a mut PhysicalParams, name: &str) -> Option<&'a mut f64> {
    Some(match name {
        "g0" => &mut params.g0,
        "gamma_big" => &mut params.gamma_big,
        "gamma_small" => &mut params.gamma_small,
        "delta_one" => &mut params.delta_one,
        "delta_two" => &mut params.delta_two,
        "delta0" => &mut params.delta0,
        "gamma_acs" => &mut params.gamma_acs,
        "sigma_z" => &mut params.sigma_z,
        _ => return None,
    })
}

/// Resolve a sweep path to the addressed scalar and set it. Paths are
/// "params.<field>" or "<kind><index>.<field>" with kind one of pulse,
/// grate, coupling, read and a 1-based index counted per kind.
pub fn apply_sweep_value(
    protocol: &mut Protocol,
    params: &mut PhysicalParams,
    path: &str,
    value: f64,
) -> Result<(), CoreError> {
    let bad = |msg: String| CoreError::protocol(msg);
    let (head, field) = path
        .split_once('.')
        .ok_or_else(|| bad(format!("sweep path '{path}' has no '.' separator")))?;
    if head == "params" {
        let slot = params_field(params, field)
            .ok_or_else(|| bad(format!("unknown parameter field '{field}'")))?;
        *slot = value;
        return Ok(());
    }
    let split = head.find(|c: char| c.is_ascii_digit()).ok_or_else(|| {
        bad(format!("sweep path '{path}' needs an index, e.g. grate1.zeta"))
    })?;
    let (kind, idx_str) = head.split_at(split);
    let idx: usize = idx_str
        .parse()
        .map_err(|_| bad(format!("bad index in sweep path '{path}'")))?;
    if idx == 0 {
        return Err(bad(format!("sweep path '{path}' indexes from 1")));
    }
    let mut seen = 0usize;
    for step in protocol.steps.iter_mut() {
        let slot: Option<&mut f64> = match (kind, step) {
            ("pulse", Step::Pulse(p)) => {
                seen += 1;
                if seen != idx {
                    None
                } else {
                    Some(match field {
                        "t" => &mut p.t0,
                        "dur" => &mut p.duration,
                        "amp" => &mut p.peak_rabi,
                        "kx" => &mut p.kx,
                        "phase" => &mut p.phase,
                        _ => return Err(bad(format!("unknown pulse field '{field}'"))),
                    })
                }
            }
            ("grate", Step::Grate { t, spec }) => {
                seen += 1;
                if seen != idx {
                    None
                } else {
                    Some(match field {
                        "t" => t,
                        "a" => &mut spec.amplitude,
                        "kx" => &mut spec.kx,
                        "kz" => &mut spec.kz,
                        "zeta" => &mut spec.zeta,
                        _ => return Err(bad(format!("unknown grate field '{field}'"))),
                    })
                }
            }
            ("coupling", Step::Coupling { t0, duration, peak }) => {
                seen += 1;
                if seen != idx {
                    None
                } else {
                    Some(match field {
                        "t" => t0,
                        "dur" => duration,
                        "amp" => peak,
                        _ => return Err(bad(format!("unknown coupling field '{field}'"))),
                    })
                }
            }
            ("read", Step::Read { t0, duration }) => {
                seen += 1;
                if seen != idx {
                    None
                } else {
                    Some(match field {
                        "t" => t0,
                        "dur" => duration,
                        _ => return Err(bad(format!("unknown read field '{field}'"))),
                    })
                }
            }
            _ => None,
        };
        if let Some(slot) = slot {
            *slot = value;
            return Ok(());
        }
    }
    if matches!(kind, "pulse" | "grate" | "coupling" | "read") {
        Err(bad(format!(
            "sweep path '{path}': protocol has only {seen} {kind} steps"
        )))
    } else {
        Err(bad(format!("unknown sweep target '{kind}'")))
    }
}

/// One evaluated detector window.
#[derive(Debug, Clone)]
pub struct Detection {
    pub kind: DetectorKind,
    pub window: (f64, f64),
    /// Output pulse energy in the window (x-integrated).
    pub energy: f64,
    /// Far-field (kx axis, time-integrated intensity) for camera detectors.
    pub camera: Option<(Vec<f64>, Vec<f64>)>,
}

/// A finished run bundled with its evaluated detector windows.
#[derive(Debug, Clone)]
pub struct Executed {
    pub result: RunResult,
    pub detections: Vec<Detection>,
}

pub fn execute(
    protocol: &Protocol,
    params: &PhysicalParams,
    grid: Option<Grid>,
) -> Result<Executed, CoreError> {
    execute_on(protocol, params, grid, None)
}

/// `execute` with control over solver snapshot cadence.
pub fn execute_on(
    protocol: &Protocol,
    params: &PhysicalParams,
    grid: Option<Grid>,
    snapshot_every: Option<usize>,
) -> Result<Executed, CoreError> {
    protocol.validate()?;
    let grid = grid.unwrap_or_else(|| protocol.required_grid());
    let schedule = protocol.to_schedule();
    let result = run(&schedule, params, &grid, None, snapshot_every)?;
    let mut detections = Vec::new();
    let (t, y) = analysis::apd_trace(&result);
    for s in &protocol.steps {
        if let Step::Detect(d) = s {
            let window = (d.t0, d.t1);
            let energy = analysis::port_energy(&t, &y, window);
            let camera = match d.kind {
                DetectorKind::Apd => None,
                DetectorKind::Camera => Some(analysis::farfield_image(&result, Some(window))?),
            };
            detections.push(Detection {
                kind: d.kind,
                window,
                energy,
                camera,
            });
        }
    }
    Ok(Executed { result, detections })
}

// ---------------------------------------------------------------------------
// Built-in sequences.

fn write_block(steps: &mut Vec<Step>, window_start: f64, kx: f64) {
    steps.push(Step::Coupling {
        t0: window_start,
        duration: WRITE_WINDOW,
        peak: DEFAULT_COUPLING_PEAK,
    });
    let mut p = PulseSpec::at(window_start + PULSE_LEAD);
    p.kx = kx;
    steps.push(Step::Pulse(p));
}

fn read_block(steps: &mut Vec<Step>, t0: f64, kind: DetectorKind) {
    steps.push(Step::Read {
        t0,
        duration: READ_WINDOW,
    });
    steps.push(Step::Detect(DetectSpec {
        kind,
        t0,
        t1: t0 + READ_WINDOW,
    }));
}

fn tri_a(kz: f64) -> GratingSpec {
    GratingSpec::along_z(GratingShape::Triangle, kz, TWO_PI, 0.0)
}

/// Pattern A shifted by half a period: profile sums with pattern A to a
/// constant, so the pair composes to the identity (up to uniform damping).
fn tri_b(kz: f64) -> GratingSpec {
    GratingSpec::along_z(GratingShape::Triangle, kz, TWO_PI, PI)
}

/// Echo memory, last-in-first-out order. Pattern A (full triangle) parks the
/// whole stack off the readable plane after every write; pattern B (A shifted
/// half a period) undoes exactly one A per application, so each B plus
/// readout pops the most recent pulse.
pub fn lifo(n_pulses: usize) -> Result<Protocol, CoreError> {
    if !(2..=3).contains(&n_pulses) {
        return Err(CoreError::protocol("lifo is built for 2 or 3 pulses"));
    }
    let mut steps = Vec::new();
    let mut t = 0.1;
    for _ in 0..n_pulses {
        write_block(&mut steps, t, 0.0);
        steps.push(Step::Grate {
            t: t + WRITE_WINDOW + 0.3,
            spec: tri_a(KZ_ECHO),
        });
        t += 1.5;
    }
    let mut g = t - 0.3 + 0.2; // 0.2 us after the last park
    for _ in 0..n_pulses {
        steps.push(Step::Grate {
            t: g,
            spec: tri_b(KZ_ECHO),
        });
        read_block(&mut steps, g + 0.2, DetectorKind::Apd);
        g += READ_WINDOW + 0.4;
    }
    Ok(Protocol { steps, sweep: None })
}

/// Echo memory, first-in-first-out order: parks go after every write but the
/// last, then n-1 stacked Bs bring the oldest pulse back first; one A between
/// readouts re-matches the next-oldest.
pub fn fifo(n_pulses: usize) -> Result<Protocol, CoreError> {
    if !(2..=3).contains(&n_pulses) {
        return Err(CoreError::protocol("fifo is built for 2 or 3 pulses"));
    }
    let mut steps = Vec::new();
    let mut t = 0.1;
    for i in 0..n_pulses {
        write_block(&mut steps, t, 0.0);
        if i + 1 < n_pulses {
            steps.push(Step::Grate {
                t: t + WRITE_WINDOW + 0.3,
                spec: tri_a(KZ_ECHO),
            });
        }
        t += 1.5;
    }
    let mut g = t - 1.5 + WRITE_WINDOW + 0.3;
    for _ in 0..n_pulses - 1 {
        steps.push(Step::Grate {
            t: g,
            spec: tri_b(KZ_ECHO),
        });
        g += 0.2;
    }
    let mut r = g + 0.2;
    for i in 0..n_pulses {
        read_block(&mut steps, r, DetectorKind::Apd);
        if i + 1 < n_pulses {
            steps.push(Step::Grate {
                t: r + READ_WINDOW + 0.2,
                spec: tri_a(KZ_ECHO),
            });
        }
        r += READ_WINDOW + 0.4;
    }
    Ok(Protocol { steps, sweep: None })
}

/// Mach-Zehnder for two pulses stored 3 us apart: pattern A parks the first,
/// a half-amplitude shifted triangle recombines, the off-plane port is
/// probed with a 2.25 pi triangle after the first readout. Sweeping the
/// two-photon detuning traces Ramsey fringes with period 2 pi / tau.
pub fn ramsey_mz() -> Result<Protocol, CoreError> {
    let mut steps = Vec::new();
    write_block(&mut steps, 0.1, 0.0);
    steps.push(Step::Grate {
        t: 1.3,
        spec: tri_a(KZ_PATTERN),
    });
    write_block(&mut steps, 3.1, 0.0); // pulse centers 3 us apart
    steps.push(Step::Grate {
        t: 4.3,
        spec: GratingSpec::along_z(GratingShape::Triangle, KZ_PATTERN, PI, PI),
    });
    read_block(&mut steps, 4.5, DetectorKind::Apd);
    steps.push(Step::Grate {
        t: 5.3,
        spec: GratingSpec::along_z(GratingShape::Triangle, KZ_PATTERN, 2.25 * PI, PI),
    });
    read_block(&mut steps, 5.5, DetectorKind::Apd);
    Ok(Protocol {
        steps,
        sweep: Some(SweepSpec {
            path: "params.delta_two".into(),
            from: -2.5,
            to: 2.5,
            steps: 21,
        }),
    })
}

/// Time between the two Ramsey pulse starts, us (sets the fringe period).
pub const RAMSEY_TAU: f64 = 3.0;

/// Asymmetric interferometer: the first pulse is displaced by a sawtooth
/// (whose offset zeta carries straight onto the displaced component), the
/// second written on axis, and an equal-orders triangle recombines them.
/// Port 2 sits at K_z = +k and is probed with a pi triangle.
pub fn geometric_phase() -> Result<Protocol, CoreError> {
    let eq = solve_equal_orders(GratingShape::Triangle, SolveCondition::Equal012)?;
    let mut steps = Vec::new();
    write_block(&mut steps, 0.1, 0.0);
    steps.push(Step::Grate {
        t: 1.3,
        spec: GratingSpec::along_z(GratingShape::Sawtooth, KZ_PATTERN, TWO_PI, 0.0),
    });
    write_block(&mut steps, 1.6, 0.0);
    steps.push(Step::Grate {
        t: 2.8,
        spec: GratingSpec::along_z(GratingShape::Triangle, KZ_PATTERN, eq.amplitude, 0.0),
    });
    read_block(&mut steps, 3.0, DetectorKind::Apd);
    steps.push(Step::Grate {
        t: 3.8,
        spec: GratingSpec::along_z(GratingShape::Triangle, KZ_PATTERN, PI, 0.0),
    });
    read_block(&mut steps, 4.0, DetectorKind::Apd);
    Ok(Protocol {
        steps,
        sweep: Some(SweepSpec {
            path: "grate1.zeta".into(),
            from: 0.0,
            to: TWO_PI,
            steps: 13,
        }),
    })
}

/// Transverse beamsplitter: two tilted modes +k and -k written together, one
/// sinusoidal grating at pitch 2k mixes them, far-field camera reads both
/// output ports. The grating offset zeta steers the split.
pub fn transverse_bs() -> Result<Protocol, CoreError> {
    let eq = solve_equal_orders(GratingShape::Sine, SolveCondition::Equal012)?;
    let mut steps = Vec::new();
    steps.push(Step::Coupling {
        t0: 0.1,
        duration: WRITE_WINDOW,
        peak: DEFAULT_COUPLING_PEAK,
    });
    let mut pa = PulseSpec::at(0.3);
    pa.kx = KX_TRANSVERSE;
    let mut pb = PulseSpec::at(0.3);
    pb.kx = -KX_TRANSVERSE;
    steps.push(Step::Pulse(pa));
    steps.push(Step::Pulse(pb));
    steps.push(Step::Grate {
        t: 1.3,
        spec: GratingSpec {
            shape: GratingShape::Sine,
            kx: 2.0 * KX_TRANSVERSE,
            kz: 0.0,
            amplitude: eq.amplitude,
            zeta: 0.0,
            duration: 0.0,
        },
    });
    read_block(&mut steps, 1.5, DetectorKind::Camera);
    Ok(Protocol {
        steps,
        sweep: Some(SweepSpec {
            path: "grate1.zeta".into(),
            from: 0.0,
            to: TWO_PI,
            steps: 13,
        }),
    })
}

/// Interferometer with gratings tilted in both wavevector axes. The first
/// pulse is split by a longitudinal square grating, a diagonal square
/// grating mixes one arm with the second pulse, and the two output ports are
/// read in separate windows (the second after a sawtooth lifts it back to
/// the readable plane).
pub fn two_dimensional() -> Result<Protocol, CoreError> {
    let mut steps = Vec::new();
    write_block(&mut steps, 0.1, -KX_2D);
    steps.push(Step::Grate {
        t: 1.3,
        spec: GratingSpec::along_z(GratingShape::Square, KZ_2D, PI, 0.0),
    });
    write_block(&mut steps, 1.6, 0.0);
    steps.push(Step::Grate {
        t: 2.8,
        spec: GratingSpec {
            shape: GratingShape::Square,
            kx: KX_2D,
            kz: KZ_2D,
            amplitude: PI / 2.0,
            zeta: 0.0,
            duration: 0.0,
        },
    });
    read_block(&mut steps, 3.0, DetectorKind::Camera);
    steps.push(Step::Grate {
        t: 3.8,
        spec: GratingSpec::along_z(GratingShape::Sawtooth, KZ_2D, TWO_PI, 0.0),
    });
    read_block(&mut steps, 4.0, DetectorKind::Camera);
    Ok(Protocol {
        steps,
        sweep: Some(SweepSpec {
            path: "pulse2.phase".into(),
            from: 0.0,
            to: TWO_PI,
            steps: 13,
        }),
    })
}

/// Showcase sequence: park an axial pulse at +k_z, store a tilted mode pair,
/// steer the pair into one far-field port with an antisymmetric square
/// grating, read it, undo the square, restore the parked pulse with a
/// reversed sawtooth and read it back.
pub fn fig_demo() -> Result<Protocol, CoreError> {
    let anti = solve_equal_orders(GratingShape::Square, SolveCondition::SquareAntisym)?;
    let zeta = anti.zeta.unwrap_or(PI);
    let mut steps = Vec::new();
    write_block(&mut steps, 0.1, 0.0);
    steps.push(Step::Grate {
        t: 1.3,
        spec: GratingSpec::along_z(GratingShape::Sawtooth, KZ_PATTERN, TWO_PI, 0.0),
    });
    steps.push(Step::Coupling {
        t0: 1.6,
        duration: WRITE_WINDOW,
        peak: DEFAULT_COUPLING_PEAK,
    });
    let mut pa = PulseSpec::at(1.8);
    pa.kx = KX_TRANSVERSE;
    let mut pb = PulseSpec::at(1.8);
    pb.kx = -KX_TRANSVERSE;
    steps.push(Step::Pulse(pa));
    steps.push(Step::Pulse(pb));
    steps.push(Step::Grate {
        t: 2.8,
        spec: GratingSpec {
            shape: GratingShape::Square,
            kx: 2.0 * KX_TRANSVERSE,
            kz: 0.0,
            amplitude: anti.amplitude,
            zeta,
            duration: 0.0,
        },
    });
    read_block(&mut steps, 3.0, DetectorKind::Camera);
    steps.push(Step::Grate {
        t: 3.8,
        spec: GratingSpec {
            shape: GratingShape::Square,
            kx: 2.0 * KX_TRANSVERSE,
            kz: 0.0,
            amplitude: anti.amplitude,
            zeta: zeta - PI,
            duration: 0.0,
        },
    });
    steps.push(Step::Grate {
        t: 4.0,
        spec: GratingSpec::along_z(GratingShape::SawtoothReversed, KZ_PATTERN, TWO_PI, 0.0),
    });
    read_block(&mut steps, 4.2, DetectorKind::Apd);
    Ok(Protocol { steps, sweep: None })
}

pub const BUILTIN_NAMES: [&str; 9] = [
    "lifo2",
    "lifo3",
    "fifo2",
    "fifo3",
    "ramsey",
    "geometric",
    "transverse_bs",
    "two_dim",
    "fig1",
];

pub fn builtin(name: &str) -> Result<Protocol, CoreError> {
    match name {
        "lifo2" => lifo(2),
        "lifo3" => lifo(3),
        "fifo2" => fifo(2),
        "fifo3" => fifo(3),
        "ramsey" => ramsey_mz(),
        "geometric" => geometric_phase(),
        "transverse_bs" => transverse_bs(),
        "two_dim" => two_dimensional(),
        "fig1" => fig_demo(),
        _ => Err(CoreError::protocol(format!(
            "unknown protocol '{name}'; built-ins are {}",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}
