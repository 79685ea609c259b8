//! Physical constants of the memory medium and derived diagnostics.

use serde::Deserialize;

use crate::error::CoreError;

pub const SPEED_OF_LIGHT_MM_US: f64 = 299_792.458;
pub const TWO_PI: f64 = std::f64::consts::TAU;

/// Medium and beam constants. Rates are angular (rad/us), lengths mm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Peak coupling constant of the cloud, 1/(mm us).
    pub g0: f64,
    /// Excited-state decay rate, rad/us.
    pub gamma_big: f64,
    /// Intrinsic spin-wave decoherence rate, rad/us.
    pub gamma_small: f64,
    /// One-photon detuning of signal and coupling from the excited state, rad/us.
    pub delta_one: f64,
    /// Two-photon (Raman) detuning, rad/us.
    pub delta_two: f64,
    /// Ground-state hyperfine splitting, rad/us.
    pub delta0: f64,
    /// Dimensionless dephasing fraction of applied grating phases.
    pub gamma_acs: f64,
    /// Gaussian 1/e^(1/2) density width of the cloud along z, mm.
    pub sigma_z: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        default_params()
    }
}

pub fn default_params() -> PhysicalParams {
    PhysicalParams {
        g0: 20.0,
        gamma_big: TWO_PI * 6.0,
        gamma_small: TWO_PI * 0.01,
        delta_one: TWO_PI * 20.0,
        delta_two: 0.0,
        delta0: TWO_PI * 6800.0,
        gamma_acs: 0.1,
        sigma_z: 5.0,
    }
}

impl PhysicalParams {
    /// Residual longitudinal wavevector of a stored wave left by the
    /// ground-state splitting, delta0/c, rad/mm.
    pub fn kz0(&self) -> f64 {
        self.delta0 / SPEED_OF_LIGHT_MM_US
    }

    /// Atomic coupling profile g(z) = g0 exp(-z^2 / (2 sigma_z^2)).
    pub fn coupling_profile(&self, z: f64) -> f64 {
        let s = z / self.sigma_z;
        self.g0 * (-0.5 * s * s).exp()
    }

    /// Resonant intensity-absorption exponent: (2/Gamma) * integral of g(z).
    pub fn optical_depth(&self) -> f64 {
        (2.0 / self.gamma_big) * self.g0 * self.sigma_z * TWO_PI.sqrt()
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        let positive = [("g0", self.g0), ("sigma_z", self.sigma_z)];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CoreError::InvalidParams(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        let nonneg = [
            ("gamma_big", self.gamma_big),
            ("gamma_small", self.gamma_small),
            ("delta0", self.delta0),
            ("gamma_acs", self.gamma_acs),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(CoreError::InvalidParams(format!(
                    "{name} must be non-negative and finite, got {v}"
                )));
            }
        }
        for (name, v) in [("delta_one", self.delta_one), ("delta_two", self.delta_two)] {
            if !v.is_finite() {
                return Err(CoreError::InvalidParams(format!("{name} must be finite")));
            }
        }
        // The complex denominator 2*delta_one + i*gamma_big must not vanish.
        // gamma_big = 0 is the ideal scatter-free limit and stays legal as
        // long as the detuning carries the denominator.
        if self.gamma_big == 0.0 && self.delta_one == 0.0 {
            return Err(CoreError::InvalidParams(
                "gamma_big and delta_one cannot both be zero".into(),
            ));
        }
        Ok(())
    }
}

/// JSON parameter file. Every key optional; anything unknown is an error.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    g0_mm_us: Option<f64>,
    gamma_big_rad_us: Option<f64>,
    gamma_small_rad_us: Option<f64>,
    delta_one_rad_us: Option<f64>,
    delta_two_rad_us: Option<f64>,
    delta0_rad_us: Option<f64>,
    gamma_acs: Option<f64>,
    sigma_z_mm: Option<f64>,
}

pub fn from_json_str(text: &str) -> Result<PhysicalParams, CoreError> {
    let file: ParamsFile = serde_json::from_str(text)
        .map_err(|e| CoreError::InvalidParams(format!("parameter file: {e}")))?;
    let mut p = default_params();
    if let Some(v) = file.g0_mm_us {
        p.g0 = v;
    }
    if let Some(v) = file.gamma_big_rad_us {
        p.gamma_big = v;
    }
    if let Some(v) = file.gamma_small_rad_us {
        p.gamma_small = v;
    }
    if let Some(v) = file.delta_one_rad_us {
        p.delta_one = v;
    }
    if let Some(v) = file.delta_two_rad_us {
        p.delta_two = v;
    }
    if let Some(v) = file.delta0_rad_us {
        p.delta0 = v;
    }
    if let Some(v) = file.gamma_acs {
        p.gamma_acs = v;
    }
    if let Some(v) = file.sigma_z_mm {
        p.sigma_z = v;
    }
    p.validate()?;
    Ok(p)
}

pub fn from_json_file(path: &std::path::Path) -> Result<PhysicalParams, CoreError> {
    let text = std::fs::read_to_string(path)?;
    from_json_str(&text)
}
