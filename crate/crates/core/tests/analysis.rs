// Measurement pipeline on synthetic traces with closed-form energies: the
// detectors and fits are checked against hand-integrable inputs, never
// against solver output.

mod common;

use common::{assert_close, assert_rel, XorShift};
use ndarray::Array2;
use swp_core::analysis::{
    apd_trace, camera_ports, efficiencies, farfield_image, fit_fringe, image_port, port_energy,
    write_in_efficiency,
};
use swp_core::error::CoreError;
use swp_core::params::TWO_PI;
use swp_core::solver::{EnergyLedger, RunResult};
use swp_core::spinwave::SpinWave;
use swp_core::{C64, Grid};

fn fake_result(grid: Grid, t: Vec<f64>, fill: impl Fn(f64, f64) -> C64) -> RunResult {
    let nt = t.len();
    let mut out = Array2::from_elem((nt, grid.nx), C64::ZERO);
    for (i, &ti) in t.iter().enumerate() {
        for ix in 0..grid.nx {
            out[[i, ix]] = fill(ti, grid.x(ix));
        }
    }
    RunResult {
        grid,
        t,
        signal_out: out,
        snapshots: vec![],
        final_spinwave: SpinWave::zeros(grid),
        ledger: EnergyLedger {
            input: 0.0,
            transmitted: 0.0,
            stored_final: 0.0,
        },
    }
}

#[test]
fn apd_trace_is_an_x_integrated_intensity() {
    // 1D: measure 1, intensity is |omega|^2 directly
    let g1 = Grid::one_d(4, 1.0);
    let r1 = fake_result(g1, vec![0.0, 0.5, 1.0], |t, _| C64::new(t, 2.0 * t));
    let (t, y) = apd_trace(&r1);
    assert_eq!(t, vec![0.0, 0.5, 1.0]);
    for (ti, yi) in t.iter().zip(&y) {
        assert_close(*yi, 5.0 * ti * ti, 1e-15, "1d intensity");
    }

    // 2D: integration measure dx, plane-wave phases drop out
    let g2 = Grid::two_d(4, 32, 10.0, 1.0);
    let r2 = fake_result(g2, vec![0.0, 1.0], |t, x| {
        C64::cis(-7.0 * x) * (1.0 + t)
    });
    let (_, y2) = apd_trace(&r2);
    assert_close(y2[0], 10.0, 1e-12, "x span times unit intensity");
    assert_close(y2[1], 40.0, 1e-12, "x span times 4");
}

#[test]
fn port_energy_is_an_exact_clipped_trapezoid() {
    let t = [0.0, 1.0, 2.0, 3.0];
    let y = [0.0, 2.0, 2.0, 4.0];
    // piecewise-linear y integrates exactly
    assert_close(port_energy(&t, &y, (0.0, 3.0)), 6.0, 1e-14, "full span");
    assert_close(port_energy(&t, &y, (-5.0, 9.0)), 6.0, 1e-14, "wider window");
    assert_close(port_energy(&t, &y, (0.5, 2.5)), 4.0, 1e-14, "interior clip");
    assert_close(port_energy(&t, &y, (-1.0, 0.5)), 0.25, 1e-14, "edge clip");
    assert_close(port_energy(&t, &y, (5.0, 6.0)), 0.0, 1e-14, "outside");
    assert_close(port_energy(&t, &y, (2.5, 0.5)), 0.0, 1e-14, "inverted window");

    // window splitting is additive for any cut point
    let mut rng = XorShift::new(0x9e3779b97f4a7c15);
    let tt: Vec<f64> = (0..40).scan(0.0, |acc, _| {
        *acc += 0.01 + rng.uniform();
        Some(*acc)
    })
    .collect();
    let yy: Vec<f64> = (0..40).map(|_| rng.uniform() * 3.0).collect();
    for _ in 0..32 {
        let a = rng.uniform() * 30.0;
        let b = a + rng.uniform() * 10.0;
        let cut = a + (b - a) * rng.uniform();
        let whole = port_energy(&tt, &yy, (a, b));
        let split = port_energy(&tt, &yy, (a, cut)) + port_energy(&tt, &yy, (cut, b));
        assert_close(split, whole, 1e-12, "window additivity");
    }
}

#[test]
fn farfield_parseval_matches_the_bucket_detector() {
    // sum over far-field bins times dkx equals the x-integrated intensity:
    // both detectors see the same energy in any window
    let grid = Grid::two_d(4, 32, 10.0, 1.0);
    let t = vec![0.0, 0.1, 0.25, 0.3];
    let mut rng = XorShift::new(42);
    let mut r = fake_result(grid, t, |_, _| C64::ZERO);
    for v in r.signal_out.iter_mut() {
        *v = rng.complex();
    }
    let window = (0.05, 0.28);
    let (_kxs, image) = farfield_image(&r, Some(window)).unwrap();
    let camera: f64 = image.iter().sum::<f64>() * grid.dkx();
    let (t, y) = apd_trace(&r);
    let bucket = port_energy(&t, &y, window);
    assert_rel(camera, bucket, 1e-12, "energy agreement");

    // windows with no samples are an error, as is a missing x axis
    assert!(matches!(
        farfield_image(&r, Some((5.0, 6.0))),
        Err(CoreError::Analysis(_))
    ));
    let r1 = fake_result(Grid::one_d(4, 1.0), vec![0.0, 1.0], |_, _| C64::ONE);
    assert!(matches!(
        farfield_image(&r1, None),
        Err(CoreError::Analysis(_))
    ));
}

#[test]
fn camera_ports_split_a_plane_wave_pair() {
    // x span 2 pi puts the wavevector lattice on integers; modes at -+5
    // with intensity ratio 1:4 land in their bins with zero leakage
    let grid = Grid::two_d(4, 64, TWO_PI, 1.0);
    let t = vec![0.0, 0.5, 1.0];
    let a = C64::new(1.0, 0.0);
    let b = C64::new(0.0, 2.0);
    let r = fake_result(grid, t, |_, x| {
        a * C64::cis(-5.0 * x) + b * C64::cis(5.0 * x)
    });

    let (kxs, image) = farfield_image(&r, None).unwrap();
    let p_plus = image_port(&kxs, &image, 5.0, 0).unwrap();
    let p_minus = image_port(&kxs, &image, -5.0, 0).unwrap();
    assert_rel(p_plus / p_minus, 0.25, 1e-12, "port intensity ratio");

    // neighbors carry nothing: widening the port changes nothing
    let wide = image_port(&kxs, &image, 5.0, 2).unwrap();
    assert_rel(wide, p_plus, 1e-12, "no leakage into neighbors");

    // closed form: |a|^2 * span^2 / (2 pi) per unit time, one time unit
    let expect = TWO_PI * TWO_PI / TWO_PI;
    assert_rel(p_plus, expect, 1e-12, "plane-wave port energy");

    let (plus, minus) = camera_ports(&r, None, 5.0, 1).unwrap();
    assert_rel(plus, p_plus, 1e-12, "camera_ports plus");
    assert_rel(minus, p_minus, 1e-12, "camera_ports minus");
}

#[test]
fn image_port_rejects_off_lattice_requests() {
    let grid = Grid::two_d(4, 64, TWO_PI, 1.0);
    let r = fake_result(grid, vec![0.0, 1.0], |_, x| C64::cis(-5.0 * x));
    let (kxs, image) = farfield_image(&r, None).unwrap();
    // 0.3 bins off the lattice
    match image_port(&kxs, &image, 5.3, 1) {
        Err(CoreError::Analysis(msg)) => assert!(msg.contains("does not land"), "{msg}"),
        other => panic!("expected off-lattice error, got {other:?}"),
    }
    // off the axis entirely
    assert!(image_port(&kxs, &image, 1e6, 1).is_err());
    // malformed image
    assert!(image_port(&kxs[..1], &image[..1], 0.0, 1).is_err());
}

#[test]
fn fit_fringe_recovers_a_synthetic_cosine() {
    let period = TWO_PI / 3.0;
    let omega = TWO_PI / period;
    let (off, amp, ph) = (2.5, 1.2, 0.77);
    let mut rng = XorShift::new(7);
    // irregular sampling over ~2.4 periods
    let xs: Vec<f64> = (0..21)
        .map(|i| i as f64 * 0.25 + 0.03 * rng.uniform())
        .collect();
    let ys: Vec<f64> = xs
        .iter()
        .map(|&x| off + amp * (omega * x + ph).cos())
        .collect();
    let fit = fit_fringe(&xs, &ys, period).unwrap();
    assert!(!fit.degenerate);
    assert_close(fit.offset, off, 1e-10, "offset");
    assert_close(fit.amplitude, amp, 1e-10, "amplitude");
    assert_close(fit.phase, ph, 1e-10, "phase");
    assert_close(fit.visibility, amp / off, 1e-10, "visibility");
    assert!(fit.rms_residual < 1e-10, "exact data fits exactly");
    let mf = fit.visibility_model_free;
    assert!(mf > 0.0 && mf <= 1.0, "model-free visibility in range");
}

#[test]
fn fit_fringe_rejects_underdetermined_input() {
    let xs: Vec<f64> = (0..21).map(|i| i as f64 * 0.25).collect();
    let ys = vec![1.0; 21];
    // length mismatch
    assert!(fit_fringe(&xs[..20], &ys, 1.0).is_err());
    // too few points
    assert!(fit_fringe(&xs[..7], &ys[..7], 1.0).is_err());
    // span below one period
    assert!(fit_fringe(&xs, &ys, 100.0).is_err());
    // nonsense period
    assert!(fit_fringe(&xs, &ys, 0.0).is_err());
    assert!(fit_fringe(&xs, &ys, f64::NAN).is_err());
}

#[test]
fn fit_fringe_flags_degenerate_systems() {
    // samples exactly one period apart: cos and sin basis columns collapse
    let period = 0.5;
    let xs: Vec<f64> = (0..10).map(|i| i as f64 * period).collect();
    let ys: Vec<f64> = (0..10).map(|i| 1.0 + 0.1 * (i % 2) as f64).collect();
    let fit = fit_fringe(&xs, &ys, period).unwrap();
    assert!(fit.degenerate);
    assert_eq!(fit.visibility, 0.0);

    // a fringe around zero offset has no meaningful visibility
    let xs: Vec<f64> = (0..16).map(|i| i as f64 * 0.1).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| (TWO_PI * x).cos()).collect();
    let fit = fit_fringe(&xs, &ys, 1.0).unwrap();
    assert!(fit.degenerate, "zero offset flags degenerate");
}

#[test]
fn efficiency_algebra() {
    let ledger = EnergyLedger {
        input: 10.0,
        transmitted: 4.0,
        stored_final: 0.0,
    };
    assert_rel(write_in_efficiency(&ledger).unwrap(), 0.6, 1e-15, "write-in");
    let eff = efficiencies(&ledger, 1.5).unwrap();
    assert_rel(eff.write_in, 0.6, 1e-15, "write-in via efficiencies");
    assert_rel(eff.retrieval, 0.25, 1e-15, "retrieved over stored");
    assert_rel(eff.net, 0.15, 1e-15, "net is the product");

    let empty = EnergyLedger {
        input: 0.0,
        transmitted: 0.0,
        stored_final: 0.0,
    };
    assert!(write_in_efficiency(&empty).is_err());
    assert!(efficiencies(&empty, 1.0).is_err());

    let nothing_stored = EnergyLedger {
        input: 5.0,
        transmitted: 5.0,
        stored_final: 0.0,
    };
    assert!(efficiencies(&nothing_stored, 1.0).is_err());
}
