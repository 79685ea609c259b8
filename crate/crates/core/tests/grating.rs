// Grating coefficients against independent closed forms.
//
// Every expected value here is evaluated from textbook integrals done by hand
// (and cross-checked numerically elsewhere), never by calling back into the
// functions under test.

mod common;

use common::*;
use std::f64::consts::PI;
use swp_core::error::CoreError;
use swp_core::grating::{
    discrete_coeffs, discrete_coeffs_damped, fourier_coeff, fourier_coeffs, profile_value,
    render_mask, solve_equal_orders, GratingShape, GratingSpec, SolveCondition, ALL_SHAPES,
};
use swp_core::params::TWO_PI;
use swp_core::{C64, Grid};

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Triangle coefficients: c_0 = e^{iA/2} sinc(A/2) and for n != 0
/// c_n = ((-1)^n e^{iA} - 1) r / (i pi (r^2 - n^2)), r = A/pi. At A = |n| pi
/// the ratio has a removable singularity with limit exactly 1/2.
fn tri_closed(a: f64, n: i32) -> C64 {
    if n == 0 {
        return C64::cis(a / 2.0) * sinc(a / 2.0);
    }
    let r = a / PI;
    let s = if n % 2 == 0 { 1.0 } else { -1.0 };
    if (r - f64::from(n.abs())).abs() < 1e-12 {
        return C64::new(0.5, 0.0);
    }
    (s * C64::cis(a) - 1.0) * r / (C64::new(0.0, PI) * (r * r - f64::from(n * n)))
}

/// Sawtooth (rising ramp): c_n = e^{i(A/2 - pi n)} sinc(A/2 - pi n).
fn saw_closed(a: f64, n: i32) -> C64 {
    let arg = a / 2.0 - PI * f64::from(n);
    C64::cis(arg) * sinc(arg)
}

/// Square (high half first): c_0 = e^{iA/2} cos(A/2), odd orders
/// (e^{iA} - 1)/(i pi n), even orders vanish.
fn square_closed(a: f64, n: i32) -> C64 {
    if n == 0 {
        C64::cis(a / 2.0) * (a / 2.0).cos()
    } else if n % 2 == 0 {
        C64::ZERO
    } else {
        (C64::cis(a) - 1.0) / C64::new(0.0, PI * f64::from(n))
    }
}

fn closed_form(shape: GratingShape, a: f64, n: i32) -> C64 {
    match shape {
        GratingShape::Triangle => tri_closed(a, n),
        GratingShape::Sawtooth => saw_closed(a, n),
        GratingShape::SawtoothReversed => saw_closed(a, -n),
        GratingShape::Square => square_closed(a, n),
        GratingShape::Sine => C64::new(libm::jn(n, a), 0.0),
    }
}

const TEST_AMPS: [f64; 4] = [0.3 * PI, PI, 1.16 * PI, TWO_PI];

#[test]
fn quadrature_matches_closed_forms() {
    for shape in ALL_SHAPES {
        for &a in &TEST_AMPS {
            for n in -6..=6 {
                let got = fourier_coeff(shape, a, 0.0, n);
                let want = closed_form(shape, a, n);
                assert_c_close(
                    got,
                    want,
                    1e-11,
                    &format!("{} A={a:.4} n={n}", shape.name()),
                );
            }
        }
    }
}

#[test]
fn degenerate_triangle_orders_are_exactly_half() {
    // r = |n| is a removable singularity of the closed form; the limit is 1/2
    // for every order, which the quadrature must reproduce.
    for (a, n) in [(PI, 1), (PI, -1), (TWO_PI, 2), (TWO_PI, -2), (3.0 * PI, 3)] {
        let got = fourier_coeff(GratingShape::Triangle, a, 0.0, n);
        assert_c_close(got, C64::new(0.5, 0.0), 1e-11, &format!("tri A={a:.4} n={n}"));
    }
}

#[test]
fn displacement_orders_are_exact() {
    // saw(2pi) is a clean +1 ladder step, sawr(2pi) the -1 inverse.
    let up = fourier_coeff(GratingShape::Sawtooth, TWO_PI, 0.0, 1);
    let down = fourier_coeff(GratingShape::SawtoothReversed, TWO_PI, 0.0, -1);
    assert_c_close(up, C64::new(1.0, 0.0), 1e-11, "saw(2pi) c_1");
    assert_c_close(down, C64::new(1.0, 0.0), 1e-11, "sawr(2pi) c_-1");
    for n in [-2, -1, 0, 2, 3] {
        let c = fourier_coeff(GratingShape::Sawtooth, TWO_PI, 0.0, n);
        assert!(c.norm() < 1e-11, "saw(2pi) c_{n} = {c} should vanish");
    }
}

#[test]
fn shift_law() {
    // Offsetting the profile multiplies order n by e^{-in zeta}. Both sides
    // are computed by direct integration (zeta enters the integrand).
    for shape in ALL_SHAPES {
        let base = fourier_coeffs(shape, 1.7, 0.0, 4);
        for zeta in [0.7, -2.3, 5.9] {
            let shifted = fourier_coeffs(shape, 1.7, zeta, 4);
            for n in -4i32..=4 {
                let i = (n + 4) as usize;
                let want = base[i] * C64::cis(-f64::from(n) * zeta);
                assert_c_close(
                    shifted[i],
                    want,
                    1e-11,
                    &format!("{} zeta={zeta} n={n}", shape.name()),
                );
            }
        }
    }
}

#[test]
fn discrete_coeffs_match_naive_dft() {
    let q = 48;
    for shape in ALL_SHAPES {
        for gamma in [0.0, 0.1] {
            let got = discrete_coeffs_damped(shape, 1.9, 0.83, gamma, q);
            for m in -(q as isize / 2)..(q as isize / 2) {
                let mut acc = C64::ZERO;
                for j in 0..q {
                    let xi = TWO_PI * j as f64 / q as f64;
                    let phi = profile_value(shape, 1.9, xi - 0.83);
                    acc += C64::cis(phi) * (-gamma * phi.abs()).exp()
                        * C64::cis(-(m as f64) * xi);
                }
                acc /= q as f64;
                let i = (m + q as isize / 2) as usize;
                assert_c_close(
                    got[i],
                    acc,
                    1e-12,
                    &format!("{} gamma={gamma} m={m}", shape.name()),
                );
            }
        }
    }
}

#[test]
fn discrete_parseval() {
    for shape in ALL_SHAPES {
        for &a in &TEST_AMPS {
            let c = discrete_coeffs(shape, a, 1.1, 256);
            let total: f64 = c.iter().map(|v| v.norm_sqr()).sum();
            assert_close(total, 1.0, 1e-12, &format!("{} A={a:.3}", shape.name()));
            let damped = discrete_coeffs_damped(shape, a, 1.1, 0.1, 256);
            let total_d: f64 = damped.iter().map(|v| v.norm_sqr()).sum();
            assert!(
                total_d < 1.0 + 1e-12,
                "{}: damped mask must not gain energy (got {total_d})",
                shape.name()
            );
        }
    }
}

#[test]
fn continuous_parseval_sine() {
    // sum_n J_n(A)^2 = 1; checks the whole coefficient ladder at once.
    for &a in &TEST_AMPS {
        let c = fourier_coeffs(GratingShape::Sine, a, 0.0, 40);
        let total: f64 = c.iter().map(|v| v.norm_sqr()).sum();
        assert_close(total, 1.0, 1e-10, &format!("sine A={a:.3}"));
    }
}

#[test]
fn discrete_matches_continuous_when_smooth() {
    // The sine profile is analytic, so 64 samples already resolve every order
    // that carries weight; alias classes and true orders coincide to rounding.
    let q = 64;
    let d = discrete_coeffs(GratingShape::Sine, SINE_EQ, 0.4, q);
    for n in -6i32..=6 {
        let c = fourier_coeff(GratingShape::Sine, SINE_EQ, 0.4, n);
        let i = (n + q as i32 / 2) as usize;
        assert_c_close(d[i], c, 1e-12, &format!("sine alias class n={n}"));
    }
}

#[test]
fn solve_zero_c0_roots() {
    let cases = [
        (GratingShape::Triangle, TWO_PI),
        (GratingShape::Sawtooth, TWO_PI),
        (GratingShape::SawtoothReversed, TWO_PI),
        (GratingShape::Square, PI),
        (GratingShape::Sine, J0_ZERO1),
    ];
    for (shape, want) in cases {
        let sol = solve_equal_orders(shape, SolveCondition::ZeroC0).unwrap();
        assert_close(sol.amplitude, want, 1e-9, &format!("{} zero_c0", shape.name()));
        let c0 = fourier_coeff(shape, sol.amplitude, 0.0, 0);
        assert!(c0.norm() < 1e-8, "{}: |c0| = {} at root", shape.name(), c0.norm());
    }
}

#[test]
fn solve_equal_012_triangle() {
    let sol = solve_equal_orders(GratingShape::Triangle, SolveCondition::Equal012).unwrap();
    assert_close(sol.amplitude, TRI_EQ, 1e-9, "tri equal_012 amplitude");
    assert_close(sol.common_magnitude, TRI_EQ_COMMON, 1e-9, "tri equal_012 |c|");
    let c2 = fourier_coeff(GratingShape::Triangle, sol.amplitude, 0.0, 2);
    assert_close(c2.norm(), TRI_EQ_C2ABS, 1e-9, "tri equal_012 |c2|");
}

#[test]
fn solve_equal_012_sine() {
    let sol = solve_equal_orders(GratingShape::Sine, SolveCondition::Equal012).unwrap();
    assert_close(sol.amplitude, SINE_EQ, 1e-9, "sine equal_012 amplitude");
    assert_close(sol.common_magnitude, SINE_EQ_COMMON, 1e-9, "sine equal_012 |c|");
}

#[test]
fn solve_equal_012_square() {
    // |c_1| = |c_-1| holds identically for a square profile, so the condition
    // reduces to |c_0| = |c_1| at 2 atan(pi/2).
    let sol = solve_equal_orders(GratingShape::Square, SolveCondition::Equal012).unwrap();
    assert_close(sol.amplitude, SQ_ANTI, 1e-9, "square equal_012 amplitude");
    assert_close(sol.common_magnitude, SQ_ANTI_COMMON, 1e-9, "square equal_012 |c|");
}

#[test]
fn solve_equal_012_sawtooth_unachievable() {
    // A ramp feeds +1 and -1 asymmetrically; no amplitude balances all three.
    let err = solve_equal_orders(GratingShape::Sawtooth, SolveCondition::Equal012).unwrap_err();
    assert!(
        matches!(err, CoreError::ConditionUnachievable(_)),
        "expected ConditionUnachievable, got {err:?}"
    );
}

#[test]
fn solve_square_antisym() {
    let sol = solve_equal_orders(GratingShape::Square, SolveCondition::SquareAntisym).unwrap();
    assert_close(sol.amplitude, SQ_ANTI, 1e-9, "antisym amplitude");
    let zeta = sol.zeta.expect("antisym pins zeta");
    assert_close(zeta, PI, 1e-9, "antisym zeta");
    let c0 = fourier_coeff(GratingShape::Square, sol.amplitude, zeta, 0);
    let cp = fourier_coeff(GratingShape::Square, sol.amplitude, zeta, 1);
    let cm = fourier_coeff(GratingShape::Square, sol.amplitude, zeta, -1);
    assert_c_close(cm, c0, 1e-9, "c_-1 = c_0");
    assert_c_close(cp, -c0, 1e-9, "c_1 = -c_0");
    assert_close(c0.norm(), SQ_ANTI_COMMON, 1e-9, "antisym |c|");

    for shape in [GratingShape::Triangle, GratingShape::Sine, GratingShape::Sawtooth] {
        assert!(
            solve_equal_orders(shape, SolveCondition::SquareAntisym).is_err(),
            "{} should refuse the square-only condition",
            shape.name()
        );
    }
}

#[test]
fn render_mask_samples_the_profile() {
    let grid = Grid::two_d(64, 16, 8.0, 1.0);
    let spec = GratingSpec {
        shape: GratingShape::Triangle,
        kx: 1.2,
        kz: 0.9,
        amplitude: 2.2,
        zeta: 0.5,
        duration: 0.0,
    };
    let mask = render_mask(&spec, &grid).unwrap();
    for (ix, iz) in [(0, 0), (3, 17), (15, 63), (8, 31)] {
        let xi = spec.kx * grid.x(ix) + spec.kz * grid.z(iz) - spec.zeta;
        let want = profile_value(spec.shape, spec.amplitude, xi);
        assert_close(mask[[ix, iz]], want, 1e-14, &format!("mask[{ix}][{iz}]"));
    }
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    fn any_shape() -> impl Strategy<Value = GratingShape> {
        prop::sample::select(ALL_SHAPES.to_vec())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        // A phase-only modulation redistributes power but never changes it.
        #[test]
        fn discrete_parseval_any_amplitude(
            shape in any_shape(),
            a in 1e-3..(3.0 * TWO_PI),
            zeta in -10.0..10.0f64,
        ) {
            let c = discrete_coeffs(shape, a, zeta, 128);
            let total: f64 = c.iter().map(|v| v.norm_sqr()).sum();
            prop_assert!((total - 1.0).abs() < 1e-10, "sum |c|^2 = {total}");
        }

        #[test]
        fn shift_law_any_offset(
            shape in any_shape(),
            a in 1e-3..(2.0 * TWO_PI),
            zeta in -10.0..10.0f64,
        ) {
            for n in -3i32..=3 {
                let base = fourier_coeff(shape, a, 0.0, n);
                let shifted = fourier_coeff(shape, a, zeta, n);
                let want = base * C64::cis(-f64::from(n) * zeta);
                prop_assert!(
                    (shifted - want).norm() < 1e-9,
                    "{} A={a} zeta={zeta} n={n}: {shifted} vs {want}",
                    shape.name()
                );
            }
        }

        // Profiles repeat with period 2 pi by construction.
        #[test]
        fn profile_periodicity(
            shape in any_shape(),
            a in 0.0..(3.0 * TWO_PI),
            xi in -20.0..20.0f64,
        ) {
            let d = profile_value(shape, a, xi + TWO_PI) - profile_value(shape, a, xi);
            prop_assert!(d.abs() < 1e-9 * (1.0 + a), "period defect {d}");
        }
    }
}

#[test]
fn render_mask_rejects_unresolved_gratings() {
    let grid = Grid::one_d(512, 1.0);
    // dz ~ 0.0586 mm; kz = 22 gives ~4.9 samples per period, under the floor.
    let spec = GratingSpec::along_z(GratingShape::Sawtooth, 22.0, TWO_PI, 0.0);
    match render_mask(&spec, &grid) {
        Err(CoreError::NyquistViolation { axis: "z", samples, .. }) => {
            assert!(samples < 8.0)
        }
        other => panic!("expected z Nyquist violation, got {other:?}"),
    }

    let spec_x = GratingSpec {
        shape: GratingShape::Sine,
        kx: 10.0,
        kz: 0.0,
        amplitude: 1.0,
        zeta: 0.0,
        duration: 0.0,
    };
    assert!(
        render_mask(&spec_x, &grid).is_err(),
        "transverse grating on a 1-column grid must be rejected"
    );
}
