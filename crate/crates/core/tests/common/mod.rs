// Shared fixtures and frozen reference values for the integration suites.
//
// The physics constants below were computed away from this codebase (closed
// forms, root finds and quadrature at f64 precision) and are pasted here as
// literals. They pin behavior: a drift in any of them is a regression, not
// something to retune.
#![allow(dead_code)]

use swp_core::C64;

/// Im(b0) * peak coupling power: the ac-Stark shift rate at default params,
/// rad/us. Equals Delta * W_c^2 / (4 Delta^2 + Gamma^2).
pub const LIGHT_SHIFT: f64 = 6.221736062121595;
/// -Re(b0) * peak coupling power: power broadening at default params, 1/us.
pub const POWER_BROADEN: f64 = 0.9332604093182392;
/// Resonant optical depth 2 g0 sigma_z sqrt(2 pi) / Gamma at default params.
pub const OPTICAL_DEPTH: f64 = 13.298076013381086;
/// Amplitude decay exp(-gamma/2 * 5us) of a dark wave at default gamma.
pub const DARK_5US: f64 = 0.8546359991532334;
/// Two-photon wavevector 2 pi * 6800 MHz / c, rad/mm.
pub const KZ0: f64 = 0.14251746149271435;

/// Triangle amplitude with |c_0| = |c_1| = |c_-1|, and the common magnitude.
pub const TRI_EQ: f64 = 3.644892049830218;
pub const TRI_EQ_COMMON: f64 = 0.5314302582131107;
/// |c_2| at that amplitude (first parasitic order).
pub const TRI_EQ_C2ABS: f64 = 0.2695425912925045;

/// Sine amplitude with J_0 = J_1, and the common magnitude.
pub const SINE_EQ: f64 = 1.434695650819563;
pub const SINE_EQ_COMMON: f64 = 0.547946449517282;

/// Square amplitude 2 atan(pi/2) where |c_0| = |c_1|; with zeta = pi the
/// orders come out antisymmetric, c_-1 = c_0 = -c_1.
pub const SQ_ANTI: f64 = 2.0077696437077743;
pub const SQ_ANTI_COMMON: f64 = 0.5370292721463151;

/// First zero of J_0 (sine-grating amplitude that kills order zero).
pub const J0_ZERO1: f64 = 2.4048255576957724;

pub fn assert_c_close(got: C64, want: C64, tol: f64, what: &str) {
    let err = (got - want).norm();
    assert!(
        err <= tol,
        "{what}: got {got}, want {want}, |err| = {err:.3e} > {tol:.1e}"
    );
}

pub fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    let err = (got - want).abs();
    assert!(
        err <= tol,
        "{what}: got {got}, want {want}, |err| = {err:.3e} > {tol:.1e}"
    );
}

pub fn assert_rel(got: f64, want: f64, rtol: f64, what: &str) {
    let err = (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
    assert!(
        err <= rtol,
        "{what}: got {got}, want {want}, rel err = {err:.3e} > {rtol:.1e}"
    );
}

/// Small deterministic RNG so tests never pull in rand.
pub struct XorShift(u64);

impl XorShift {
    pub fn new(seed: u64) -> XorShift {
        XorShift(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn complex(&mut self) -> C64 {
        C64::new(self.range(-1.0, 1.0), self.range(-1.0, 1.0))
    }
}

/// Uniform index in [0, n).
pub fn pick(rng: &mut XorShift, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

/// A structurally valid random protocol on a 1.5 us slot lattice: write
/// blocks, reads, gratings and detections in any mix, sweeps on a third of
/// the cases. Shared by the text round-trip and crash-resistance suites.
pub fn random_protocol(rng: &mut XorShift) -> swp_core::protocol::Protocol {
    let mut steps = Vec::new();
    let n_slots = 1 + pick(rng, 6);
    let mut grates = 0usize;
    for slot in 0..n_slots {
        let base = 0.1 + 1.5 * slot as f64;
        match pick(rng, 4) {
            0 => {
                // write block: window plus a pulse inside it
                steps.push(swp_core::protocol::Step::Coupling {
                    t0: base,
                    duration: 0.9,
                    peak: 20.0 + 40.0 * rng.uniform(),
                });
                steps.push(swp_core::protocol::Step::Pulse(swp_core::pulse::PulseSpec {
                    t0: base + 0.2,
                    duration: 0.2 + 0.3 * rng.uniform(),
                    peak_rabi: 0.1 + rng.uniform(),
                    kx: (rng.uniform() - 0.5) * 160.0,
                    phase: (rng.uniform() - 0.5) * 12.0,
                }));
            }
            1 => {
                steps.push(swp_core::protocol::Step::Read {
                    t0: base,
                    duration: 0.3 + 0.9 * rng.uniform(),
                });
            }
            2 => {
                grates += 1;
                let shapes = swp_core::grating::ALL_SHAPES;
                steps.push(swp_core::protocol::Step::Grate {
                    t: base,
                    spec: swp_core::grating::GratingSpec {
                        shape: shapes[pick(rng, shapes.len())],
                        kx: (rng.uniform() - 0.5) * 160.0,
                        kz: (rng.uniform() - 0.5) * 60.0,
                        amplitude: 12.0 * rng.uniform(),
                        zeta: (rng.uniform() - 0.5) * 14.0,
                        duration: 0.0,
                    },
                });
            }
            _ => {
                steps.push(swp_core::protocol::Step::Detect(swp_core::protocol::DetectSpec {
                    kind: if pick(rng, 2) == 0 {
                        swp_core::protocol::DetectorKind::Apd
                    } else {
                        swp_core::protocol::DetectorKind::Camera
                    },
                    t0: base,
                    t1: base + 0.2 + 0.8 * rng.uniform(),
                }));
            }
        }
    }
    let sweep = if pick(rng, 3) == 0 {
        Some(swp_core::protocol::SweepSpec {
            path: if grates > 0 {
                format!("grate{}.zeta", 1 + pick(rng, grates))
            } else {
                "params.delta_two".into()
            },
            from: (rng.uniform() - 0.5) * 10.0,
            to: (rng.uniform() - 0.5) * 10.0,
            steps: 2 + pick(rng, 28),
        })
    } else {
        None
    };
    swp_core::protocol::Protocol { steps, sweep }
}
