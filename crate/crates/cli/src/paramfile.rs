//! Flat JSON parameter files. Every key optional (defaults fill the gaps);
//! unknown keys are rejected so typos cannot silently run the defaults.

use serde::{Deserialize, Serialize};
use swp_core::params::{default_params, PhysicalParams};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub g0_mm_us: Option<f64>,
    pub gamma_big_rad_us: Option<f64>,
    pub gamma_small_rad_us: Option<f64>,
    pub delta_one_rad_us: Option<f64>,
    pub delta_two_rad_us: Option<f64>,
    pub delta0_rad_us: Option<f64>,
    pub gamma_acs: Option<f64>,
    pub sigma_z_mm: Option<f64>,
}

impl ParamsFile {
    /// Fill unset keys from `base`.
    pub fn resolve(&self, base: &PhysicalParams) -> PhysicalParams {
        PhysicalParams {
            g0: self.g0_mm_us.unwrap_or(base.g0),
            gamma_big: self.gamma_big_rad_us.unwrap_or(base.gamma_big),
            gamma_small: self.gamma_small_rad_us.unwrap_or(base.gamma_small),
            delta_one: self.delta_one_rad_us.unwrap_or(base.delta_one),
            delta_two: self.delta_two_rad_us.unwrap_or(base.delta_two),
            delta0: self.delta0_rad_us.unwrap_or(base.delta0),
            gamma_acs: self.gamma_acs.unwrap_or(base.gamma_acs),
            sigma_z: self.sigma_z_mm.unwrap_or(base.sigma_z),
        }
    }

    /// Fully resolved view (all keys present), as written into manifests.
    pub fn from_params(p: &PhysicalParams) -> ParamsFile {
        ParamsFile {
            g0_mm_us: Some(p.g0),
            gamma_big_rad_us: Some(p.gamma_big),
            gamma_small_rad_us: Some(p.gamma_small),
            delta_one_rad_us: Some(p.delta_one),
            delta_two_rad_us: Some(p.delta_two),
            delta0_rad_us: Some(p.delta0),
            gamma_acs: Some(p.gamma_acs),
            sigma_z_mm: Some(p.sigma_z),
        }
    }

    pub fn resolve_against_defaults(&self) -> PhysicalParams {
        self.resolve(&default_params())
    }
}
