//! Stored spin-wave fields, wavevector-space views, phase-mask application,
//! and the diffraction-order series transform used to cross-check masks.

use ndarray::Array2;
use rustfft::FftPlanner;

use crate::error::CoreError;
use crate::grid::Grid;
use crate::params::{PhysicalParams, TWO_PI};
use crate::C64;

/// Rescaled spin-wave field u(x, z) on the grid nodes, [nx][nz].
#[derive(Debug, Clone, PartialEq)]
pub struct SpinWave {
    pub grid: Grid,
    pub data: Array2<C64>,
}

impl SpinWave {
    pub fn zeros(grid: Grid) -> SpinWave {
        SpinWave {
            grid,
            data: Array2::zeros((grid.nx, grid.nz)),
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> C64) -> SpinWave {
        let mut data = Array2::zeros((grid.nx, grid.nz));
        for ix in 0..grid.nx {
            let x = grid.x(ix);
            for iz in 0..grid.nz {
                data[[ix, iz]] = f(x, grid.z(iz));
            }
        }
        SpinWave { grid, data }
    }

    /// Integral of |u|^2 over the grid (dz, and dx when present).
    pub fn norm_sq(&self) -> f64 {
        let w = self.grid.dz() * self.grid.measure_x();
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>() * w
    }

    /// Apply a rendered phase mask: u -> u * exp(i*phi - gamma_acs*|phi|).
    /// The damping models imperfect (dephasing) grating light.
    pub fn apply_mask(&self, mask: &Array2<f64>, gamma_acs: f64) -> Result<SpinWave, CoreError> {
        if mask.dim() != self.data.dim() {
            return Err(CoreError::GridMismatch(format!(
                "mask is {:?}, spin wave is {:?}",
                mask.dim(),
                self.data.dim()
            )));
        }
        let mut out = self.clone();
        ndarray::Zip::from(&mut out.data)
            .and(mask)
            .for_each(|u, &phi| {
                *u *= (-gamma_acs * phi.abs()).exp() * C64::cis(phi);
            });
        Ok(out)
    }

    /// Unitary transform to wavevector space with the physical-coordinate
    /// kernel exp(-i K . r): bin values (dz/sqrt(2pi)) * sum u exp(-i Kz z)
    /// per axis, so that sum |s|^2 dK = sum |u|^2 dr exactly.
    pub fn to_kspace(&self) -> KSpaceView {
        let grid = self.grid;
        let mut data = self.data.clone();
        let mut planner = FftPlanner::new();

        // z axis
        let fft = planner.plan_fft_forward(grid.nz);
        for mut row in data.rows_mut() {
            let mut buf: Vec<C64> = row.to_vec();
            fft.process(&mut buf);
            for (v, b) in row.iter_mut().zip(buf) {
                *v = b;
            }
        }
        let scale_z = grid.dz() / TWO_PI.sqrt();
        let kz = grid.kz_axis();
        let mut shifted = Array2::zeros((grid.nx, grid.nz));
        let half_z = grid.nz / 2;
        for ix in 0..grid.nx {
            for (m, &k) in kz.iter().enumerate() {
                // centered index m holds FFT bin (m - nz/2) mod nz
                let bin = (m + grid.nz - half_z) % grid.nz;
                shifted[[ix, m]] = data[[ix, bin]] * scale_z * C64::cis(-k * grid.z_min);
            }
        }
        let mut data = shifted;

        // x axis
        if grid.nx > 1 {
            let fft = planner.plan_fft_forward(grid.nx);
            let scale_x = grid.dx() / TWO_PI.sqrt();
            let kx = grid.kx_axis();
            let half_x = grid.nx / 2;
            let mut buf = vec![C64::ZERO; grid.nx];
            for m in 0..grid.nz {
                for ix in 0..grid.nx {
                    buf[ix] = data[[ix, m]];
                }
                fft.process(&mut buf);
                for (i, &k) in kx.iter().enumerate() {
                    let bin = (i + grid.nx - half_x) % grid.nx;
                    data[[i, m]] = buf[bin] * scale_x * C64::cis(-k * grid.x_min);
                }
            }
        }

        KSpaceView {
            grid,
            kx: grid.kx_axis(),
            kz: grid.kz_axis(),
            data,
        }
    }
}

/// Spin wave in wavevector space on centered, monotone axes.
#[derive(Debug, Clone, PartialEq)]
pub struct KSpaceView {
    pub grid: Grid,
    pub kx: Vec<f64>,
    pub kz: Vec<f64>,
    pub data: Array2<C64>,
}

impl KSpaceView {
    /// Integral of |s|^2 over wavevector bins (dKz, and dKx when present).
    pub fn norm_sq(&self) -> f64 {
        let wx = if self.grid.nx <= 1 { 1.0 } else { self.grid.dkx() };
        let w = self.grid.dkz() * wx;
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>() * w
    }

    /// Exact inverse of `SpinWave::to_kspace`.
    pub fn to_real(&self) -> SpinWave {
        let grid = self.grid;
        let mut planner = FftPlanner::new();

        // undo x axis first (it was applied last)
        let mut data = self.data.clone();
        if grid.nx > 1 {
            let ifft = planner.plan_fft_inverse(grid.nx);
            let scale_x = grid.dx() / TWO_PI.sqrt();
            let kx = grid.kx_axis();
            let half_x = grid.nx / 2;
            let mut buf = vec![C64::ZERO; grid.nx];
            for m in 0..grid.nz {
                for (i, &k) in kx.iter().enumerate() {
                    let bin = (i + grid.nx - half_x) % grid.nx;
                    buf[bin] = data[[i, m]] / scale_x * C64::cis(k * grid.x_min);
                }
                ifft.process(&mut buf);
                for ix in 0..grid.nx {
                    data[[ix, m]] = buf[ix] / grid.nx as f64;
                }
            }
        }

        let ifft = planner.plan_fft_inverse(grid.nz);
        let scale_z = grid.dz() / TWO_PI.sqrt();
        let kz = grid.kz_axis();
        let half_z = grid.nz / 2;
        let mut out = Array2::zeros((grid.nx, grid.nz));
        let mut buf = vec![C64::ZERO; grid.nz];
        for ix in 0..grid.nx {
            for (m, &k) in kz.iter().enumerate() {
                let bin = (m + grid.nz - half_z) % grid.nz;
                buf[bin] = data[[ix, m]] / scale_z * C64::cis(k * grid.z_min);
            }
            ifft.process(&mut buf);
            for iz in 0..grid.nz {
                out[[ix, iz]] = buf[iz] / grid.nz as f64;
            }
        }
        SpinWave { grid, data: out }
    }
}

/// Apply a grating as its diffraction-order series directly in wavevector
/// space: s'(K) = sum_n c_n * s(K - n*k), coefficients centered (index
/// coeffs.len()/2 is order 0). Components shifted past the band edge wrap
/// (the grid is periodic), picking up the exact wrap phase. Non-integer bin
/// shifts fall back to linear interpolation and emit a warning.
pub fn series_transform(view: &KSpaceView, coeffs: &[C64], k: (f64, f64)) -> KSpaceView {
    let grid = view.grid;
    let n0 = (coeffs.len() / 2) as i32;
    let (kx, kz) = k;
    let sx = if grid.nx > 1 { kx / grid.dkx() } else { 0.0 };
    let sz = kz / grid.dkz();
    if grid.nx <= 1 && kx != 0.0 {
        log::warn!("series_transform: ignoring kx = {kx} on a grid with no transverse axis");
    }
    let integer = (sz - sz.round()).abs() < 1e-9 && (sx - sx.round()).abs() < 1e-9;
    if !integer {
        log::warn!(
            "series_transform: grating wavevector ({kx}, {kz}) rad/mm is not commensurate with \
             the grid (bin shifts {sx:.6}, {sz:.6}); using linear interpolation between bins"
        );
    }

    let nx = grid.nx as i32;
    let nz = grid.nz as i32;
    // Wrap phase: crossing the band by w full spans multiplies by
    // exp(-i w (2pi/d) r_min) per axis (periodic-grid identity).
    let wrap_z = TWO_PI / grid.dz() * grid.z_min;
    let wrap_x = if grid.nx > 1 {
        TWO_PI / grid.dx() * grid.x_min
    } else {
        0.0
    };

    // source value at fractional centered index (fx, fz), bilinear
    let sample = |data: &Array2<C64>, fx: f64, fz: f64| -> C64 {
        let x0 = fx.floor();
        let z0 = fz.floor();
        let tx = fx - x0;
        let tz = fz - z0;
        let mut acc = C64::ZERO;
        for (dx, wx) in [(0i32, 1.0 - tx), (1, tx)] {
            if wx == 0.0 {
                continue;
            }
            for (dz, wz) in [(0i32, 1.0 - tz), (1, tz)] {
                if wz == 0.0 {
                    continue;
                }
                let ix = x0 as i32 + dx;
                let iz = z0 as i32 + dz;
                let wrap_cx = (ix as f64 / nx as f64).floor() as i32;
                let wrap_cz = (iz as f64 / nz as f64).floor() as i32;
                let jx = ix.rem_euclid(nx) as usize;
                let jz = iz.rem_euclid(nz) as usize;
                // Source bin jx/jz reached by unwinding wrap_c full spans:
                // value there corresponds to K - w*span, phase factor below.
                let phase = C64::cis(-(wrap_cx as f64) * wrap_x - (wrap_cz as f64) * wrap_z);
                acc += wx * wz * phase * data[[jx, jz]];
            }
        }
        acc
    };

    let mut out = Array2::zeros((grid.nx, grid.nz));
    for (idx, c) in coeffs.iter().enumerate() {
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let n = idx as i32 - n0;
        let dxs = f64::from(n) * sx;
        let dzs = f64::from(n) * sz;
        for ix in 0..grid.nx as i32 {
            for iz in 0..grid.nz as i32 {
                // target bin (ix, iz) draws from source at (ix - n*s)
                let v = sample(&view.data, f64::from(ix) - dxs, f64::from(iz) - dzs);
                out[[ix as usize, iz as usize]] += c * v;
            }
        }
    }
    KSpaceView {
        grid,
        kx: view.kx.clone(),
        kz: view.kz.clone(),
        data: out,
    }
}

/// Fraction of spin-wave power inside the phase-matched (readable) band
/// |K_z| <= 1/sigma_z. The band is narrower than a raw wavevector bin on the
/// default grid, so the spectrum is refined by 8x zero-padding along z
/// (trigonometric interpolation) before integrating.
pub fn readable_fraction(wave: &SpinWave, params: &PhysicalParams) -> f64 {
    const PAD: usize = 8;
    let grid = wave.grid;
    let nzp = grid.nz * PAD;
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(nzp);
    let band = 1.0 / params.sigma_z;
    let dkz = TWO_PI / (grid.dz() * nzp as f64);
    let mut total = 0.0;
    let mut inside = 0.0;
    let mut buf = vec![C64::ZERO; nzp];
    for ix in 0..grid.nx {
        buf.iter_mut().for_each(|v| *v = C64::ZERO);
        for iz in 0..grid.nz {
            buf[iz] = wave.data[[ix, iz]];
        }
        fft.process(&mut buf);
        for (m, v) in buf.iter().enumerate() {
            let p = v.norm_sqr();
            let k = if m <= nzp / 2 {
                m as f64 * dkz
            } else {
                (m as f64 - nzp as f64) * dkz
            };
            total += p;
            if k.abs() <= band {
                inside += p;
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        inside / total
    }
}
