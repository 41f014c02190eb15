//! JT9D-7A engine model: a time-delayed, critically damped second-order lag
//! from commanded to available thrust.

use crate::error::{Error, Result};

/// Engine lag parameters. `jt9d_7a()` is the operating point used throughout:
/// time constant 1.25 s, delay 0.4 s, 46,500 lbf maximum against 3,221 lbf trim.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EngineModel {
    pub time_constant: f64,
    pub damping_ratio: f64,
    pub time_delay: f64,
    pub max_thrust: f64,
    pub trim_thrust: f64,
    /// Spool rate capability, lbf/s. Matches the peak slope of the step
    /// response (delta_T / (tau e)); imposed on commands by the control path.
    pub rate_limit: f64,
}

impl EngineModel {
    pub fn jt9d_7a() -> Self {
        Self {
            time_constant: 1.25,
            damping_ratio: 1.0,
            time_delay: 0.4,
            max_thrust: 46_500.0,
            trim_thrust: 3_221.0,
            rate_limit: 12_726.0,
        }
    }

    /// Analytic peak slope of the step response from trim to `command`:
    /// `(command - trim) / (tau e)` at `t = t_d + tau`.
    pub fn peak_step_slope(&self, command: f64) -> f64 {
        (command - self.trim_thrust) / (self.time_constant * std::f64::consts::E)
    }

    /// Number of integration steps spanned by the transport delay; `dt` must
    /// divide the delay to one part in 1e9.
    pub fn delay_slots(&self, dt: f64) -> Result<usize> {
        if dt <= 0.0 {
            return Err(Error::Precondition {
                op: "delay_slots",
                detail: "dt must be positive".into(),
            });
        }
        let slots = (self.time_delay / dt).round();
        if (slots * dt - self.time_delay).abs() > 1e-9 * self.time_delay.max(1.0) {
            return Err(Error::Precondition {
                op: "delay_slots",
                detail: format!("dt = {dt} does not divide the {} s delay", self.time_delay),
            });
        }
        Ok(slots as usize)
    }
}

/// Thrust and thrust rate of one lag channel.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EngineState {
    pub thrust: f64,
    pub thrust_rate: f64,
}

/// Right-hand side of the lag ODE driven by the delayed command:
/// `T'' = -T/tau^2 - 2 zeta T'/tau + Tc(t - t_d)/tau^2`.
pub fn engine_derivative(
    state: EngineState,
    delayed_command: f64,
    model: &EngineModel,
) -> (f64, f64) {
    let tau = model.time_constant;
    (
        state.thrust_rate,
        (delayed_command - state.thrust) / (tau * tau)
            - 2.0 * model.damping_ratio * state.thrust_rate / tau,
    )
}

/// Fixed-length delay line of past command samples, pre-filled so the system
/// starts at equilibrium.
#[derive(Clone, Debug)]
pub struct DelayLine {
    samples: Vec<f64>,
    head: usize,
}

impl DelayLine {
    pub fn new(slots: usize, initial: f64) -> Self {
        Self { samples: vec![initial; slots.max(1)], head: 0 }
    }

    /// Push the newest command, returning the sample from `slots` steps ago.
    pub fn advance(&mut self, command: f64) -> f64 {
        let delayed = self.samples[self.head];
        self.samples[self.head] = command;
        self.head = (self.head + 1) % self.samples.len();
        delayed
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EngineSample {
    pub t: f64,
    pub command: f64,
    pub available: f64,
}

/// Time-indexed commanded vs available thrust.
#[derive(Clone, Debug)]
pub struct EngineTrace {
    pub dt: f64,
    pub rows: Vec<EngineSample>,
}

impl EngineTrace {
    pub fn final_available(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.available)
    }

    /// Largest forward-difference slope of the available thrust, lbf/s.
    pub fn peak_slope(&self) -> f64 {
        self.rows
            .windows(2)
            .map(|w| (w[1].available - w[0].available) / self.dt)
            .fold(0.0_f64, f64::max)
    }
}

/// Integrate the engine response to a constant thrust command, starting from
/// trim. The command is clamped to `[0, max_thrust]`; within a step the
/// delayed command is a stored sample, so the piecewise-constant RK4
/// integration is exact up to the lag dynamics.
pub fn step_response(
    model: &EngineModel,
    command: f64,
    duration: f64,
    dt: f64,
) -> Result<EngineTrace> {
    if dt <= 0.0 {
        return Err(Error::Precondition { op: "step_response", detail: "dt must be positive".into() });
    }
    if duration < model.time_delay {
        return Err(Error::Precondition {
            op: "step_response",
            detail: "duration shorter than the transport delay".into(),
        });
    }
    let slots = model.delay_slots(dt)?;
    let command = command.clamp(0.0, model.max_thrust);
    let steps = (duration / dt).round() as usize;
    let mut delay = DelayLine::new(slots, model.trim_thrust);
    let mut state = EngineState { thrust: model.trim_thrust, thrust_rate: 0.0 };
    let mut rows = Vec::with_capacity(steps + 1);
    rows.push(EngineSample { t: 0.0, command, available: state.thrust });
    for k in 0..steps {
        let delayed = delay.advance(command);
        state = rk4_engine(state, delayed, model, dt);
        rows.push(EngineSample { t: (k + 1) as f64 * dt, command, available: state.thrust });
    }
    Ok(EngineTrace { dt, rows })
}

fn rk4_engine(state: EngineState, delayed: f64, model: &EngineModel, dt: f64) -> EngineState {
    let f = |s: EngineState| engine_derivative(s, delayed, model);
    let k1 = f(state);
    let k2 = f(EngineState {
        thrust: state.thrust + 0.5 * dt * k1.0,
        thrust_rate: state.thrust_rate + 0.5 * dt * k1.1,
    });
    let k3 = f(EngineState {
        thrust: state.thrust + 0.5 * dt * k2.0,
        thrust_rate: state.thrust_rate + 0.5 * dt * k2.1,
    });
    let k4 = f(EngineState {
        thrust: state.thrust + dt * k3.0,
        thrust_rate: state.thrust_rate + dt * k3.1,
    });
    EngineState {
        thrust: state.thrust + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        thrust_rate: state.thrust_rate + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    }
}
