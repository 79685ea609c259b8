//! Periodic ac-Stark phase profiles, their diffraction-order coefficients,
//! amplitude solvers, and mask rendering.
//!
//! A grating is a 2*pi-periodic non-negative phase profile phi(xi) of
//! amplitude A, applied to a spin wave as S -> S * exp(i*phi - gamma_acs*phi)
//! with xi = kx*x + kz*z - zeta. Its diffraction-order coefficients are
//!     c_n(zeta) = (1/2pi) * Int exp(i*phi(xi - zeta)) * exp(-i*n*xi) dxi,
//! which obey the shift law c_n(zeta) = c_n(0) * exp(-i*n*zeta). Order n
//! displaces a wavevector component by +n*k.

use ndarray::Array2;

use crate::error::CoreError;
use crate::grid::Grid;
use crate::params::TWO_PI;
use crate::C64;

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GratingShape {
    Triangle,
    Sawtooth,
    SawtoothReversed,
    Square,
    Sine,
}

pub const ALL_SHAPES: [GratingShape; 5] = [
    GratingShape::Triangle,
    GratingShape::Sawtooth,
    GratingShape::SawtoothReversed,
    GratingShape::Square,
    GratingShape::Sine,
];

impl GratingShape {
    pub fn name(&self) -> &'static str {
        match self {
            GratingShape::Triangle => "tri",
            GratingShape::Sawtooth => "saw",
            GratingShape::SawtoothReversed => "sawr",
            GratingShape::Square => "square",
            GratingShape::Sine => "sine",
        }
    }

    pub fn from_name(name: &str) -> Option<GratingShape> {
        match name.to_ascii_lowercase().as_str() {
            "tri" => Some(GratingShape::Triangle),
            "saw" => Some(GratingShape::Sawtooth),
            "sawr" => Some(GratingShape::SawtoothReversed),
            "square" => Some(GratingShape::Square),
            "sine" => Some(GratingShape::Sine),
            _ => None,
        }
    }

    /// xi values in [0, 2pi) where the profile is not smooth.
    fn breakpoints(&self) -> &'static [f64] {
        match self {
            GratingShape::Triangle | GratingShape::Square => &[0.0, PI],
            GratingShape::Sawtooth | GratingShape::SawtoothReversed => &[0.0],
            GratingShape::Sine => &[],
        }
    }

    /// Max |d phi / d xi| per unit amplitude, for quadrature panel sizing.
    fn slope(&self) -> f64 {
        match self {
            GratingShape::Triangle => 1.0 / PI,
            GratingShape::Sawtooth | GratingShape::SawtoothReversed => 0.5 / PI,
            GratingShape::Square => 0.0,
            GratingShape::Sine => 1.0,
        }
    }
}

/// One grating application: shape, wavevector (rad/mm), amplitude (rad),
/// offset (rad). `duration` records the (idealized, pre-integrated) light
/// exposure time and is 0 for the instantaneous applications used here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GratingSpec {
    pub shape: GratingShape,
    pub kx: f64,
    pub kz: f64,
    pub amplitude: f64,
    pub zeta: f64,
    pub duration: f64,
}

impl GratingSpec {
    pub fn along_z(shape: GratingShape, kz: f64, amplitude: f64, zeta: f64) -> GratingSpec {
        GratingSpec {
            shape,
            kx: 0.0,
            kz,
            amplitude,
            zeta,
            duration: 0.0,
        }
    }
}

/// Closed-form 2pi-periodic profile value at xi.
pub fn profile_value(shape: GratingShape, amplitude: f64, xi: f64) -> f64 {
    let u = xi / TWO_PI;
    let frac = u - u.floor();
    match shape {
        // 0 at xi = 0, peak A at xi = pi, back to 0; even in xi.
        GratingShape::Triangle => amplitude * (1.0 - 2.0 * (frac - 0.5).abs()),
        GratingShape::Sawtooth => amplitude * frac,
        // Mirror image: phi_sawr(xi) = phi_saw(-xi).
        GratingShape::SawtoothReversed => {
            let v = -u;
            amplitude * (v - v.floor())
        }
        // High A on the first half-period, 0 on the second.
        GratingShape::Square => {
            if frac < 0.5 {
                amplitude
            } else {
                0.0
            }
        }
        // Sinusoidal phase of full swing +-A; any constant offset of a lab
        // realization is a global phase and is dropped.
        GratingShape::Sine => amplitude * xi.sin(),
    }
}

// 16-node Gauss-Legendre rule on [-1, 1].
const GL_X: [f64; 16] = [
    -9.89400934991649939e-01,
    -9.44575023073232600e-01,
    -8.65631202387831755e-01,
    -7.55404408355002999e-01,
    -6.17876244402643771e-01,
    -4.58016777657227370e-01,
    -2.81603550779258915e-01,
    -9.50125098376374544e-02,
    9.50125098376374544e-02,
    2.81603550779258915e-01,
    4.58016777657227370e-01,
    6.17876244402643771e-01,
    7.55404408355002999e-01,
    8.65631202387831755e-01,
    9.44575023073232600e-01,
    9.89400934991649939e-01,
];
const GL_W: [f64; 16] = [
    2.71524594117540374e-02,
    6.22535239386477063e-02,
    9.51585116824925914e-02,
    1.24628971255534030e-01,
    1.49595988816576764e-01,
    1.69156519395002619e-01,
    1.82603415044923612e-01,
    1.89450610455068585e-01,
    1.89450610455068585e-01,
    1.82603415044923612e-01,
    1.69156519395002619e-01,
    1.49595988816576764e-01,
    1.24628971255534030e-01,
    9.51585116824925914e-02,
    6.22535239386477063e-02,
    2.71524594117540374e-02,
];

fn wrap_tau(x: f64) -> f64 {
    let r = x % TWO_PI;
    if r < 0.0 {
        r + TWO_PI
    } else {
        r
    }
}

/// One Fourier coefficient of exp(i*phi(xi - zeta)) by composite
/// Gauss-Legendre quadrature between the zeta-shifted profile breakpoints.
/// Panels never contain a discontinuity, so the fixed 16-node rule converges
/// far below 1e-12 once panels are sized to the integrand's phase swing.
pub fn fourier_coeff(shape: GratingShape, amplitude: f64, zeta: f64, n: i32) -> C64 {
    let mut cuts: Vec<f64> = shape
        .breakpoints()
        .iter()
        .map(|b| wrap_tau(b + zeta))
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    if cuts.is_empty() {
        cuts.push(0.0);
    }

    let nf = f64::from(n);
    // Phase swing per unit xi: profile slope plus the e^{-in xi} rotation.
    let rate = amplitude.abs() * shape.slope() + nf.abs();
    let mut sum = C64::ZERO;
    let m = cuts.len();
    for s in 0..m {
        let a = cuts[s];
        let b = if s + 1 < m { cuts[s + 1] } else { cuts[0] + TWO_PI };
        let len = b - a;
        if len <= 1e-14 {
            continue;
        }
        let panels = ((len * (rate + 2.0) / 6.0).ceil() as usize).max(1);
        let h = len / panels as f64;
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let c = lo + 0.5 * h;
            for k in 0..16 {
                let xi = c + 0.5 * h * GL_X[k];
                let phi = profile_value(shape, amplitude, xi - zeta);
                sum += GL_W[k] * 0.5 * h * C64::cis(phi - nf * xi);
            }
        }
    }
    sum / TWO_PI
}

/// Coefficients for n in [-n_max, n_max], centered (index n_max is n = 0).
pub fn fourier_coeffs(shape: GratingShape, amplitude: f64, zeta: f64, n_max: usize) -> Vec<C64> {
    let nm = n_max as i32;
    (-nm..=nm)
        .map(|n| fourier_coeff(shape, amplitude, zeta, n))
        .collect()
}

/// Alias-class coefficients on a q-point grid: the q-point DFT of
/// exp(i*phi(2pi j/q - zeta)), i.e. the coefficients a grid of q samples per
/// period actually realizes (c_m summed over all aliases m + r*q). Centered,
/// m in [-q/2, q/2). These satisfy sum |c~_m|^2 = 1 exactly for pure phase
/// profiles, by Plancherel.
pub fn discrete_coeffs(shape: GratingShape, amplitude: f64, zeta: f64, q: usize) -> Vec<C64> {
    discrete_coeffs_damped(shape, amplitude, zeta, 0.0, q)
}

/// Like [`discrete_coeffs`] but for the lossy modulation
/// exp(i*phi - gamma_acs*|phi|) that a physical kick actually applies.
pub fn discrete_coeffs_damped(
    shape: GratingShape,
    amplitude: f64,
    zeta: f64,
    gamma_acs: f64,
    q: usize,
) -> Vec<C64> {
    assert!(q >= 2, "need at least 2 samples");
    let mut buf: Vec<C64> = (0..q)
        .map(|j| {
            let xi = TWO_PI * j as f64 / q as f64;
            let phi = profile_value(shape, amplitude, xi - zeta);
            C64::cis(phi) * (-gamma_acs * phi.abs()).exp()
        })
        .collect();
    let mut planner = rustfft::FftPlanner::new();
    planner.plan_fft_forward(q).process(&mut buf);
    let half = q / 2;
    // DFT bin m (0-based) holds order m for m < q/2, order m - q above.
    (0..q)
        .map(|i| {
            let m = i as isize - half as isize;
            let bin = m.rem_euclid(q as isize) as usize;
            buf[bin] / q as f64
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveCondition {
    /// Smallest positive amplitude with c_0 = 0 (wave made unreadable).
    ZeroC0,
    /// Smallest positive amplitude with |c_0| = |c_1| = |c_-1|.
    Equal012,
    /// Square only: amplitude and offset with c_-1 = c_0 = -c_1.
    SquareAntisym,
}

impl SolveCondition {
    pub fn name(&self) -> &'static str {
        match self {
            SolveCondition::ZeroC0 => "zero_c0",
            SolveCondition::Equal012 => "equal_012",
            SolveCondition::SquareAntisym => "square_antisym",
        }
    }

    pub fn from_name(name: &str) -> Option<SolveCondition> {
        match name.to_ascii_lowercase().as_str() {
            "zero_c0" => Some(SolveCondition::ZeroC0),
            "equal_012" => Some(SolveCondition::Equal012),
            "square_antisym" => Some(SolveCondition::SquareAntisym),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveResult {
    pub amplitude: f64,
    /// Offset pinned by the condition, when it pins one.
    pub zeta: Option<f64>,
    /// |c_0| at the solution (for the equal-order conditions this is the
    /// common magnitude).
    pub common_magnitude: f64,
    /// Residual of the defining equations at the returned point.
    pub residual: f64,
}

const AMP_SCAN_MAX: f64 = 3.0 * TWO_PI;

/// Solve an amplitude condition for a shape. Returns the smallest positive
/// solution; errors when the shape cannot satisfy the condition.
pub fn solve_equal_orders(
    shape: GratingShape,
    condition: SolveCondition,
) -> Result<SolveResult, CoreError> {
    match condition {
        SolveCondition::Equal012 => solve_equal_012(shape),
        SolveCondition::ZeroC0 => solve_zero_c0(shape),
        SolveCondition::SquareAntisym => solve_square_antisym(shape),
    }
}

fn mag(shape: GratingShape, a: f64, n: i32) -> f64 {
    fourier_coeff(shape, a, 0.0, n).norm()
}

fn solve_equal_012(shape: GratingShape) -> Result<SolveResult, CoreError> {
    // |c0| starts at 1, |c1| at 0, so scan for the first sign change of the
    // difference and bisect.
    let f = |a: f64| mag(shape, a, 0) - mag(shape, a, 1);
    let step = 0.05 * PI;
    let mut a0 = 1e-3;
    let mut f0 = f(a0);
    let mut bracket = None;
    let mut a = a0 + step;
    while a <= AMP_SCAN_MAX {
        let fa = f(a);
        if f0 > 0.0 && fa <= 0.0 {
            bracket = Some((a0, a));
            break;
        }
        a0 = a;
        f0 = fa;
        a += step;
    }
    let (mut lo, mut hi) = bracket.ok_or_else(|| {
        CoreError::ConditionUnachievable(format!(
            "equal_012: |c0| never meets |c1| for shape {} below amplitude {AMP_SCAN_MAX:.3}",
            shape.name()
        ))
    })?;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a_star = 0.5 * (lo + hi);
    let c0 = mag(shape, a_star, 0);
    let c1 = mag(shape, a_star, 1);
    let cm1 = mag(shape, a_star, -1);
    let residual = (c0 - c1).abs().max((c0 - cm1).abs());
    if (c1 - cm1).abs() > 1e-8 {
        return Err(CoreError::ConditionUnachievable(format!(
            "equal_012 for shape {}: at |c0| = |c1| (A = {a_star:.6}) the orders are lopsided, \
             |c-1| = {cm1:.6} vs |c1| = {c1:.6}",
            shape.name()
        )));
    }
    Ok(SolveResult {
        amplitude: a_star,
        zeta: None,
        common_magnitude: c0,
        residual,
    })
}

fn solve_zero_c0(shape: GratingShape) -> Result<SolveResult, CoreError> {
    // |c0(A)| has no sign to change; bracket its first local minimum on a
    // coarse scan, refine by golden section, then demand an actual zero.
    let f = |a: f64| mag(shape, a, 0);
    let step = 0.02 * PI;
    let mut prev2 = f(step);
    let mut prev1 = f(2.0 * step);
    let mut bracket = None;
    let mut i = 3usize;
    while (i as f64) * step <= AMP_SCAN_MAX {
        let cur = f(i as f64 * step);
        if prev1 <= prev2 && prev1 <= cur {
            bracket = Some(((i as f64 - 2.0) * step, i as f64 * step));
            break;
        }
        prev2 = prev1;
        prev1 = cur;
        i += 1;
    }
    let (mut lo, mut hi) = bracket.ok_or_else(|| {
        CoreError::ConditionUnachievable(format!(
            "zero_c0: |c0| has no interior minimum for shape {} below {AMP_SCAN_MAX:.3}",
            shape.name()
        ))
    })?;
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..120 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let a_star = 0.5 * (lo + hi);
    let residual = f(a_star);
    if residual > 1e-9 {
        return Err(CoreError::ConditionUnachievable(format!(
            "zero_c0 for shape {}: best |c0| = {residual:.3e} at A = {a_star:.6}, not a zero",
            shape.name()
        )));
    }
    Ok(SolveResult {
        amplitude: a_star,
        zeta: None,
        common_magnitude: residual,
        residual,
    })
}

fn solve_square_antisym(shape: GratingShape) -> Result<SolveResult, CoreError> {
    if shape != GratingShape::Square {
        return Err(CoreError::ConditionUnachievable(format!(
            "square_antisym applies to the square shape, not {}",
            shape.name()
        )));
    }
    // Magnitudes first: |c0| = |c1| picks the amplitude; the offset then
    // rotates c_+-1 so that c_-1 = c0 = -c_1 (possible because the square's
    // c_-1(0) = -c_1(0) exactly).
    let base = solve_equal_012(shape)?;
    let a_star = base.amplitude;
    let c0 = fourier_coeff(shape, a_star, 0.0, 0);
    let c1 = fourier_coeff(shape, a_star, 0.0, 1);
    // Want c0 = -c1(0) * e^{-i zeta}.
    let zeta = wrap_tau(-(-c0 / c1).arg());
    let r0 = fourier_coeff(shape, a_star, zeta, 0);
    let r1 = fourier_coeff(shape, a_star, zeta, 1);
    let rm1 = fourier_coeff(shape, a_star, zeta, -1);
    let residual = (rm1 - r0).norm().max((r0 + r1).norm());
    if residual > 1e-8 {
        return Err(CoreError::ConditionUnachievable(format!(
            "square_antisym: residual {residual:.3e} at A = {a_star:.6}, zeta = {zeta:.6}"
        )));
    }
    Ok(SolveResult {
        amplitude: a_star,
        zeta: Some(zeta),
        common_magnitude: r0.norm(),
        residual,
    })
}

/// Render the phase profile over the grid: phi[ix][iz] at
/// xi = kx*x + kz*z - zeta. Errors when either axis samples the pattern
/// with fewer than 8 points per period.
pub fn render_mask(spec: &GratingSpec, grid: &Grid) -> Result<Array2<f64>, CoreError> {
    // grids are often sized to land exactly on the 8-sample floor, so the
    // comparison carries a relative guard against rounding noise
    const FLOOR: f64 = 8.0 * (1.0 - 1e-9);
    if spec.kz != 0.0 {
        let samples = TWO_PI / (spec.kz.abs() * grid.dz());
        if samples < FLOOR {
            return Err(CoreError::NyquistViolation {
                k: spec.kz,
                axis: "z",
                samples,
            });
        }
    }
    if spec.kx != 0.0 {
        if grid.nx <= 1 {
            return Err(CoreError::InvalidGrid(format!(
                "grating carries kx = {} rad/mm but the grid has no transverse axis",
                spec.kx
            )));
        }
        let samples = TWO_PI / (spec.kx.abs() * grid.dx());
        if samples < FLOOR {
            return Err(CoreError::NyquistViolation {
                k: spec.kx,
                axis: "x",
                samples,
            });
        }
    }
    let mut mask = Array2::zeros((grid.nx, grid.nz));
    for ix in 0..grid.nx {
        let x = grid.x(ix);
        for iz in 0..grid.nz {
            let xi = spec.kx * x + spec.kz * grid.z(iz) - spec.zeta;
            mask[[ix, iz]] = profile_value(spec.shape, spec.amplitude, xi);
        }
    }
    Ok(mask)
}
