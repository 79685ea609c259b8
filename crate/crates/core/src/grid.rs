//! Spatial and temporal discretization.
//!
//! Nodes are periodic-exclusive on both axes: z_j = z_min + j*dz with
//! dz = (z_max - z_min)/nz and j = 0..nz-1, so FFTs over either axis see one
//! exact period. nx = 1 means no transverse axis; its integration measure is
//! then 1 so that 1D and 2D energies share units.

use crate::error::CoreError;
use crate::params::TWO_PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub z_min: f64,
    pub z_max: f64,
    pub nz: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    /// Time step inside coupling/read windows, us.
    pub dt: f64,
    /// Trace sampling interval in dark segments, us (dark evolution is exact
    /// regardless; this only sets output density).
    pub dt_dark: f64,
    pub t_max: f64,
}

pub const DEFAULT_Z_HALF_SPAN: f64 = 15.0;
pub const DEFAULT_DT: f64 = 0.002;
pub const DEFAULT_DT_DARK: f64 = 0.02;

impl Grid {
    pub fn one_d(nz: usize, t_max: f64) -> Grid {
        Grid {
            z_min: -DEFAULT_Z_HALF_SPAN,
            z_max: DEFAULT_Z_HALF_SPAN,
            nz,
            x_min: 0.0,
            x_max: 0.0,
            nx: 1,
            dt: DEFAULT_DT,
            dt_dark: DEFAULT_DT_DARK,
            t_max,
        }
    }

    pub fn two_d(nz: usize, nx: usize, x_span: f64, t_max: f64) -> Grid {
        Grid {
            x_min: -x_span / 2.0,
            x_max: x_span / 2.0,
            nx,
            ..Grid::one_d(nz, t_max)
        }
    }

    pub fn dz(&self) -> f64 {
        (self.z_max - self.z_min) / self.nz as f64
    }

    pub fn dx(&self) -> f64 {
        if self.nx <= 1 {
            0.0
        } else {
            (self.x_max - self.x_min) / self.nx as f64
        }
    }

    /// Transverse integration measure: dx, or 1 when there is no x axis.
    pub fn measure_x(&self) -> f64 {
        if self.nx <= 1 {
            1.0
        } else {
            self.dx()
        }
    }

    pub fn z(&self, j: usize) -> f64 {
        self.z_min + j as f64 * self.dz()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn z_axis(&self) -> Vec<f64> {
        (0..self.nz).map(|j| self.z(j)).collect()
    }

    pub fn x_axis(&self) -> Vec<f64> {
        if self.nx <= 1 {
            vec![0.0]
        } else {
            (0..self.nx).map(|i| self.x(i)).collect()
        }
    }

    /// Wavevector bin spacing along z: 2*pi / span.
    pub fn dkz(&self) -> f64 {
        TWO_PI / (self.z_max - self.z_min)
    }

    pub fn dkx(&self) -> f64 {
        if self.nx <= 1 {
            0.0
        } else {
            TWO_PI / (self.x_max - self.x_min)
        }
    }

    /// Monotone K_z axis, bin m at (m - nz/2) * dkz.
    pub fn kz_axis(&self) -> Vec<f64> {
        let half = (self.nz / 2) as isize;
        (0..self.nz)
            .map(|i| (i as isize - half) as f64 * self.dkz())
            .collect()
    }

    pub fn kx_axis(&self) -> Vec<f64> {
        if self.nx <= 1 {
            return vec![0.0];
        }
        let half = (self.nx / 2) as isize;
        (0..self.nx)
            .map(|i| (i as isize - half) as f64 * self.dkx())
            .collect()
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        if self.nz < 2 {
            return Err(CoreError::InvalidGrid(format!("nz = {} < 2", self.nz)));
        }
        if self.nx < 1 {
            return Err(CoreError::InvalidGrid("nx = 0".into()));
        }
        if !(self.z_max > self.z_min) {
            return Err(CoreError::InvalidGrid("z span must be positive".into()));
        }
        if self.nx > 1 && !(self.x_max > self.x_min) {
            return Err(CoreError::InvalidGrid(
                "x span must be positive when nx > 1".into(),
            ));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(CoreError::InvalidGrid(format!("dt = {} invalid", self.dt)));
        }
        if self.dt_dark < self.dt {
            return Err(CoreError::InvalidGrid(
                "dt_dark must be >= dt (it only sets dark trace density)".into(),
            ));
        }
        if !(self.t_max > 0.0) {
            return Err(CoreError::InvalidGrid("t_max must be positive".into()));
        }
        Ok(())
    }
}
