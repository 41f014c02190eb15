//! Differential thrust as a rudder substitute: the rad-to-lbf conversion,
//! actuator limiting, and the symmetric four-engine split.
//!
//! Sign conventions follow the free-body layout: positive net thrust
//! `dT = T1 - T4` yaws the nose the same way a positive-factor rudder
//! deflection would, and the conversion factor is kept positive after the
//! rudder sign flip.

use crate::aircraft::AircraftConfig;
use crate::error::{Error, Result};

/// Flight-condition constants of the rudder-to-thrust mapping
/// `dT = (q S b |C_n_dr| / y_e) * dr`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConversionContext {
    pub dynamic_pressure: f64,
    pub wing_area: f64,
    pub span: f64,
    pub cn_dr: f64,
    pub engine_arm: f64,
}

impl ConversionContext {
    pub fn from_config(cfg: &AircraftConfig) -> Self {
        Self {
            dynamic_pressure: cfg.trim.dynamic_pressure,
            wing_area: cfg.geometry.wing_area,
            span: cfg.geometry.span,
            cn_dr: cfg.derivatives.cn_dr,
            engine_arm: cfg.geometry.engine_arm,
        }
    }

    /// lbf of net differential thrust per radian of rudder demand.
    pub fn factor(&self) -> f64 {
        self.dynamic_pressure * self.wing_area * self.span * self.cn_dr.abs() / self.engine_arm
    }
}

/// Map a rudder demand in radians to net differential thrust in lbf.
pub fn rudder_to_thrust(rudder: f64, ctx: &ConversionContext) -> f64 {
    ctx.factor() * rudder
}

/// Actuator limits imposed on the control efforts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimiterConfig {
    /// Aileron deflection limit, rad (26 degrees).
    pub aileron_limit: f64,
    /// Differential thrust saturation, lbf (max thrust minus trim thrust).
    pub dt_saturation: f64,
    /// Differential thrust rate limit, lbf/s.
    pub dt_rate_limit: f64,
}

impl Default for LimiterConfig {
    fn default() -> Self {
        Self {
            aileron_limit: 26.0_f64.to_radians(),
            dt_saturation: 43_729.0,
            dt_rate_limit: 12_726.0,
        }
    }
}

/// Clamp a raw thrust command to saturation, then to the reachable band
/// around the previous command given the rate limit.
pub fn limit_command(raw: f64, previous: f64, dt: f64, cfg: &LimiterConfig) -> f64 {
    debug_assert!(dt > 0.0);
    let saturated = raw.clamp(-cfg.dt_saturation, cfg.dt_saturation);
    let reach = cfg.dt_rate_limit * dt;
    saturated.clamp(previous - reach, previous + reach)
}

/// Per-engine thrust settings realizing a net differential command.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThrustAllocation {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
}

impl ThrustAllocation {
    pub fn net(&self) -> f64 {
        self.t1 - self.t4
    }
}

/// Split `dt_net` symmetrically across the outboard pair: engine 1 takes
/// `+dt/2`, engine 4 `-dt/2`, inboard engines hold trim. Collective thrust
/// is unchanged.
pub fn allocate(dt_net: f64, trim_thrust: f64, max_thrust: f64) -> Result<ThrustAllocation> {
    let authority = 2.0 * trim_thrust.min(max_thrust - trim_thrust);
    if dt_net.abs() > authority {
        return Err(Error::InfeasibleAllocation { requested: dt_net.abs(), limit: authority });
    }
    Ok(ThrustAllocation {
        t1: trim_thrust + 0.5 * dt_net,
        t2: trim_thrust,
        t3: trim_thrust,
        t4: trim_thrust - 0.5 * dt_net,
    })
}
