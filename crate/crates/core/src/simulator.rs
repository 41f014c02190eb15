//! Fixed-step time-domain simulation of the open-loop, LQR and adaptive
//! closed-loop scenarios.
//!
//! Closed-loop wiring: the differential-thrust feedforward (the pilot's
//! rudder-equivalent command) passes through conversion, saturation, rate
//! limiting and the delayed engine lag, and the resulting available thrust
//! feeds BOTH the model and the damaged plant as their common second input.
//! The feedback `-L y_d` acts directly at the damaged plant's input. With a
//! common input signal the adaptive error dynamics keep the form the
//! stability proof needs, so the Lyapunov function stays non-increasing in
//! engine-lag mode as well as in the ideal mode.

use crate::aircraft::{LateralState, StateSpaceModel};
use crate::allocation::{limit_command, ConversionContext, LimiterConfig};
use crate::controllers::{adaptation_gain_matrix, LqrDesign, MracConfig};
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::propulsion::{DelayLine, EngineModel};

/// States above this magnitude truncate the run and flag the trace.
pub const DIVERGENCE_GUARD: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    OpenLoop,
    LqrClosedLoop,
    MracIdeal,
    MracEngineLag,
}

/// A simulation request: piecewise-constant step inputs on the aileron and
/// rudder-equivalent channels, both in radians.
#[derive(Clone, Copy, Debug)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub duration: f64,
    pub dt: f64,
    pub aileron_step: f64,
    pub rudder_step: f64,
    pub initial_model: LateralState,
    pub initial_damaged: LateralState,
}

impl Scenario {
    /// One-degree steps on both channels for 60 s at dt = 5 ms.
    pub fn canonical(kind: ScenarioKind) -> Self {
        Self {
            kind,
            duration: 60.0,
            dt: 0.005,
            aileron_step: 1.0_f64.to_radians(),
            rudder_step: 1.0_f64.to_radians(),
            initial_model: LateralState::default(),
            initial_damaged: LateralState::default(),
        }
    }

    pub fn validate(&self, engine: Option<&EngineModel>) -> Result<()> {
        if self.duration <= 0.0 || self.dt <= 0.0 {
            return Err(Error::Precondition {
                op: "scenario",
                detail: "duration and dt must be positive".into(),
            });
        }
        if let Some(engine) = engine {
            engine.delay_slots(self.dt)?;
        }
        Ok(())
    }

    fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }
}

/// One sampled instant of a simulation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub model: [f64; 4],
    pub damaged: [f64; 4],
    pub error: [f64; 4],
    /// Aileron command after the deflection limit, rad.
    pub aileron_cmd: f64,
    /// Total commanded differential thrust after saturation/rate limits, lbf.
    pub dt_cmd: f64,
    /// Differential thrust delivered to the plant, lbf.
    pub dt_avail: f64,
    /// Adaptive gain entries, row-major 2x4.
    pub gain: [f64; 8],
    /// True when an actuator limit bound this row's commands.
    pub clamped: bool,
}

/// Uniformly sampled simulation record; `rows.len() == duration/dt + 1`
/// unless the divergence guard truncated the run.
#[derive(Clone, Debug, PartialEq)]
pub struct SimTrace {
    pub dt: f64,
    pub rows: Vec<TraceRow>,
    pub diverged: bool,
}

impl SimTrace {
    pub fn error_inf(&self, row: usize) -> f64 {
        self.rows[row].error.iter().fold(0.0_f64, |m, e| m.max(e.abs()))
    }

    pub fn peak_error_inf(&self) -> f64 {
        (0..self.rows.len()).map(|i| self.error_inf(i)).fold(0.0, f64::max)
    }
}

/// Classical fourth-order Runge-Kutta step over a flat state vector.
/// Returns an error if the derivative map produces a non-finite value.
pub fn rk4_step(
    state: &[f64],
    dt: f64,
    mut deriv: impl FnMut(&[f64], &mut [f64]),
) -> Result<Vec<f64>> {
    let mut workspace = Rk4::new(state.len());
    let mut next = state.to_vec();
    workspace.step(&mut next, dt, |x, dx| deriv(x, dx))?;
    Ok(next)
}

/// Reusable RK4 scratch space; `step` advances the state in place.
pub struct Rk4 {
    k: [Vec<f64>; 4],
    stage: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Self {
            k: [vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]],
            stage: vec![0.0; dim],
        }
    }

    pub fn step(
        &mut self,
        state: &mut [f64],
        dt: f64,
        mut deriv: impl FnMut(&[f64], &mut [f64]),
    ) -> Result<()> {
        let n = state.len();
        deriv(state, &mut self.k[0]);
        for i in 0..n {
            self.stage[i] = state[i] + 0.5 * dt * self.k[0][i];
        }
        deriv(&self.stage, &mut self.k[1]);
        for i in 0..n {
            self.stage[i] = state[i] + 0.5 * dt * self.k[1][i];
        }
        deriv(&self.stage, &mut self.k[2]);
        for i in 0..n {
            self.stage[i] = state[i] + dt * self.k[2][i];
        }
        deriv(&self.stage, &mut self.k[3]);
        for i in 0..n {
            let slope = self.k[0][i] + 2.0 * self.k[1][i] + 2.0 * self.k[2][i] + self.k[3][i];
            state[i] += dt / 6.0 * slope;
            if !state[i].is_finite() {
                return Err(Error::NonFiniteState { t: f64::NAN });
            }
        }
        Ok(())
    }
}

fn mat4(m: &Matrix) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = m[(i, j)];
        }
    }
    out
}

fn mat4x2(m: &Matrix) -> [[f64; 2]; 4] {
    let mut out = [[0.0; 2]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = m[(i, j)];
        }
    }
    out
}

fn mat2x4(m: &Matrix) -> [[f64; 4]; 2] {
    let mut out = [[0.0; 4]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = m[(i, j)];
        }
    }
    out
}

#[inline]
fn mul4(a: &[[f64; 4]; 4], x: &[f64]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = a[i][0] * x[0] + a[i][1] * x[1] + a[i][2] * x[2] + a[i][3] * x[3];
    }
    out
}

fn guard_exceeded(state: &[f64]) -> bool {
    state.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_GUARD)
}

/// Integrate `x_dot = A x + B u` with the scenario's constant inputs and no
/// feedback. The plant state is recorded in the damaged columns.
pub fn run_open_loop(
    plant: &StateSpaceModel,
    scenario: &Scenario,
    ctx: &ConversionContext,
) -> Result<SimTrace> {
    scenario.validate(None)?;
    let a = mat4(&plant.a);
    let b = mat4x2(&plant.b);
    let u = [scenario.aileron_step, scenario.rudder_step];
    let dt_equiv = ctx.factor() * scenario.rudder_step;
    let mut state = scenario.initial_damaged.to_array().to_vec();
    let mut rk4 = Rk4::new(4);
    let mut rows = Vec::with_capacity(scenario.steps() + 1);
    let mut diverged = false;
    let record = |t: f64, x: &[f64]| TraceRow {
        t,
        model: [0.0; 4],
        damaged: [x[0], x[1], x[2], x[3]],
        error: [x[0], x[1], x[2], x[3]],
        aileron_cmd: u[0],
        dt_cmd: dt_equiv,
        dt_avail: dt_equiv,
        gain: [0.0; 8],
        clamped: false,
    };
    rows.push(record(0.0, &state));
    for k in 0..scenario.steps() {
        let step_result = rk4.step(&mut state, scenario.dt, |x, dx| {
            let ax = mul4(&a, x);
            for i in 0..4 {
                dx[i] = ax[i] + b[i][0] * u[0] + b[i][1] * u[1];
            }
        });
        if step_result.is_err() || guard_exceeded(&state) {
            diverged = true;
            break;
        }
        rows.push(record((k + 1) as f64 * scenario.dt, &state));
    }
    Ok(SimTrace { dt: scenario.dt, rows, diverged })
}

struct ClosedLoopSetup<'a> {
    plant: &'a StateSpaceModel,
    design: &'a LqrDesign,
    engine: &'a EngineModel,
    limits: &'a LimiterConfig,
    ctx: &'a ConversionContext,
    /// None freezes the feedback gain (LQR scenario).
    adaptation: Option<&'a Matrix>,
    l_initial: &'a Matrix,
}

/// Shared integrator for the LQR and adaptive closed loops. State layout:
/// `[y_m(4), y_d(4), L(8 row-major), engine(2)]`; the engine block is
/// omitted in ideal mode.
fn run_closed_loop(scenario: &Scenario, setup: &ClosedLoopSetup) -> Result<SimTrace> {
    let engine_lagged = matches!(
        scenario.kind,
        ScenarioKind::LqrClosedLoop | ScenarioKind::MracEngineLag
    );
    scenario.validate(engine_lagged.then_some(setup.engine))?;

    let a_m = mat4(&setup.design.a_m);
    let a_p = mat4(&setup.plant.a);
    let b = mat4x2(&setup.plant.b);
    let gain_factor = setup.adaptation.map(mat2x4);
    let u_c = [scenario.aileron_step, scenario.rudder_step];
    let factor = setup.ctx.factor();
    let ail_lim = setup.limits.aileron_limit;
    let dim = if engine_lagged { 18 } else { 16 };

    let mut state = vec![0.0; dim];
    state[..4].copy_from_slice(&scenario.initial_model.to_array());
    state[4..8].copy_from_slice(&scenario.initial_damaged.to_array());
    for i in 0..2 {
        for j in 0..4 {
            state[8 + 4 * i + j] = setup.l_initial[(i, j)];
        }
    }

    let mut delay = DelayLine::new(setup.engine.delay_slots(scenario.dt)?, 0.0);
    let mut prev_total = 0.0;
    let mut prev_ff = 0.0;
    let mut rk4 = Rk4::new(dim);
    let mut rows = Vec::with_capacity(scenario.steps() + 1);
    let mut diverged = false;

    let record = |z: &[f64], t: f64, prev_total: &mut f64| -> TraceRow {
        let (y_m, y_d) = (&z[..4], &z[4..8]);
        let mut fb = [0.0; 2];
        for i in 0..2 {
            for j in 0..4 {
                fb[i] += z[8 + 4 * i + j] * y_d[j];
            }
        }
        let ail_raw = u_c[0] - fb[0];
        let dt_raw = factor * (u_c[1] - fb[1]);
        let dt_cmd = if engine_lagged {
            limit_command(dt_raw, *prev_total, scenario.dt, setup.limits)
        } else {
            dt_raw
        };
        *prev_total = dt_cmd;
        let dt_avail = if engine_lagged { z[16] - factor * fb[1] } else { dt_raw };
        let mut gain = [0.0; 8];
        gain.copy_from_slice(&z[8..16]);
        TraceRow {
            t,
            model: [y_m[0], y_m[1], y_m[2], y_m[3]],
            damaged: [y_d[0], y_d[1], y_d[2], y_d[3]],
            error: [y_d[0] - y_m[0], y_d[1] - y_m[1], y_d[2] - y_m[2], y_d[3] - y_m[3]],
            aileron_cmd: ail_raw.clamp(-ail_lim, ail_lim),
            dt_cmd,
            dt_avail,
            gain,
            clamped: engine_lagged && (ail_raw.abs() > ail_lim || (dt_cmd - dt_raw).abs() > 1e-9),
        }
    };

    rows.push(record(&state, 0.0, &mut prev_total));
    for k in 0..scenario.steps() {
        let delayed_ff = if engine_lagged {
            let ff_cmd =
                limit_command(factor * u_c[1], prev_ff, scenario.dt, setup.limits);
            prev_ff = ff_cmd;
            delay.advance(ff_cmd)
        } else {
            0.0
        };
        let tau = setup.engine.time_constant;
        let zeta = setup.engine.damping_ratio;
        let step_result = rk4.step(&mut state, scenario.dt, |z, dz| {
            let y_m = &z[..4];
            let y_d = &z[4..8];
            // common second input: lagged feedforward thrust in rad-equivalent
            let u2_common = if engine_lagged { z[16] / factor } else { u_c[1] };
            let mut fb = [0.0; 2];
            for i in 0..2 {
                for j in 0..4 {
                    fb[i] += z[8 + 4 * i + j] * y_d[j];
                }
            }
            let ail = (u_c[0] - fb[0]).clamp(-ail_lim, ail_lim);
            let u_model = [u_c[0], u2_common];
            let u_damaged = [ail, u2_common - fb[1]];
            let am_ym = mul4(&a_m, y_m);
            let ap_yd = mul4(&a_p, y_d);
            for i in 0..4 {
                dz[i] = am_ym[i] + b[i][0] * u_model[0] + b[i][1] * u_model[1];
                dz[4 + i] = ap_yd[i] + b[i][0] * u_damaged[0] + b[i][1] * u_damaged[1];
            }
            match &gain_factor {
                Some(g) => {
                    let e = [y_d[0] - y_m[0], y_d[1] - y_m[1], y_d[2] - y_m[2], y_d[3] - y_m[3]];
                    let ge = [
                        g[0][0] * e[0] + g[0][1] * e[1] + g[0][2] * e[2] + g[0][3] * e[3],
                        g[1][0] * e[0] + g[1][1] * e[1] + g[1][2] * e[2] + g[1][3] * e[3],
                    ];
                    for i in 0..2 {
                        for j in 0..4 {
                            dz[8 + 4 * i + j] = ge[i] * y_d[j];
                        }
                    }
                }
                None => dz[8..16].fill(0.0),
            }
            if engine_lagged {
                dz[16] = z[17];
                dz[17] = (delayed_ff - z[16]) / (tau * tau) - 2.0 * zeta * z[17] / tau;
            }
        });
        if step_result.is_err() || guard_exceeded(&state) {
            diverged = true;
            break;
        }
        rows.push(record(&state, (k + 1) as f64 * scenario.dt, &mut prev_total));
    }
    Ok(SimTrace { dt: scenario.dt, rows, diverged })
}

/// LQR closed loop: the damaged plant under the frozen gain `K`, with the
/// feedforward thrust routed through the engine channel. The model columns
/// carry the reference plant driven by the same inputs.
pub fn run_lqr(
    scenario: &Scenario,
    plant: &StateSpaceModel,
    design: &LqrDesign,
    engine: &EngineModel,
    limits: &LimiterConfig,
    ctx: &ConversionContext,
) -> Result<SimTrace> {
    if scenario.kind != ScenarioKind::LqrClosedLoop {
        return Err(Error::Precondition {
            op: "run_lqr",
            detail: "scenario kind must be LqrClosedLoop".into(),
        });
    }
    run_closed_loop(
        scenario,
        &ClosedLoopSetup {
            plant,
            design,
            engine,
            limits,
            ctx,
            adaptation: None,
            l_initial: &design.k,
        },
    )
}

/// Adaptive closed loop in ideal (no lag, no limits) or engine-lag mode.
pub fn run_mrac(
    scenario: &Scenario,
    plant: &StateSpaceModel,
    design: &LqrDesign,
    cfg: &MracConfig,
    engine: &EngineModel,
    limits: &LimiterConfig,
    ctx: &ConversionContext,
) -> Result<SimTrace> {
    if !matches!(scenario.kind, ScenarioKind::MracIdeal | ScenarioKind::MracEngineLag) {
        return Err(Error::Precondition {
            op: "run_mrac",
            detail: "scenario kind must be MracIdeal or MracEngineLag".into(),
        });
    }
    let adaptation = adaptation_gain_matrix(cfg, &plant.b)?;
    run_closed_loop(
        scenario,
        &ClosedLoopSetup {
            plant,
            design,
            engine,
            limits,
            ctx,
            adaptation: Some(&adaptation),
            l_initial: &cfg.l_initial,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aircraft::{canonical_models, AircraftConfig};
    use crate::controllers::{canonical_lqr_weights, design_lqr};

    fn fixtures() -> (StateSpaceModel, LqrDesign, MracConfig, EngineModel, LimiterConfig, ConversionContext)
    {
        let (_, damaged) = canonical_models();
        let (q, r) = canonical_lqr_weights();
        let design = design_lqr(&damaged, &q, &r).unwrap();
        let cfg = MracConfig::for_design(&design).unwrap();
        let ctx = ConversionContext::from_config(&AircraftConfig::boeing_747());
        (damaged, design, cfg, EngineModel::jt9d_7a(), LimiterConfig::default(), ctx)
    }

    #[test]
    fn rk4_null_dynamics_is_identity() {
        let state = [1.0, -2.0, 3.0];
        let next = rk4_step(&state, 0.1, |_, dx| dx.fill(0.0)).unwrap();
        assert_eq!(next, state);
    }

    #[test]
    fn rk4_matches_scalar_exponential() {
        let mut state = vec![1.0];
        let mut rk4 = Rk4::new(1);
        for _ in 0..100 {
            rk4.step(&mut state, 0.01, |x, dx| dx[0] = -x[0]).unwrap();
        }
        assert!((state[0] - (-1.0_f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn rk4_rejects_non_finite_derivative() {
        let state = [1.0];
        assert!(rk4_step(&state, 0.1, |_, dx| dx[0] = f64::NAN).is_err());
    }

    #[test]
    fn open_loop_damaged_grows_past_ten_times_its_one_second_value() {
        let (_, damaged) = canonical_models();
        let ctx = ConversionContext::from_config(&AircraftConfig::boeing_747());
        let scenario = Scenario::canonical(ScenarioKind::OpenLoop);
        let trace = run_open_loop(&damaged, &scenario, &ctx).unwrap();
        let at_one_second = &trace.rows[(1.0 / scenario.dt) as usize];
        let grew = (0..4).any(|i| {
            let reference = at_one_second.damaged[i].abs().max(1e-12);
            trace.rows.iter().any(|r| r.damaged[i].abs() >= 10.0 * reference)
        });
        assert!(grew, "no state grew tenfold over its 1 s value");
    }

    #[test]
    fn open_loop_nominal_at_equilibrium_stays_zero() {
        let (nominal, _) = canonical_models();
        let ctx = ConversionContext::from_config(&AircraftConfig::boeing_747());
        let mut scenario = Scenario::canonical(ScenarioKind::OpenLoop);
        scenario.aileron_step = 0.0;
        scenario.rudder_step = 0.0;
        let trace = run_open_loop(&nominal, &scenario, &ctx).unwrap();
        assert!(!trace.diverged);
        for row in &trace.rows {
            assert_eq!(row.damaged, [0.0; 4]);
        }
    }

    #[test]
    fn open_loop_nominal_stays_bounded() {
        let (nominal, _) = canonical_models();
        let ctx = ConversionContext::from_config(&AircraftConfig::boeing_747());
        let trace = run_open_loop(&nominal, &Scenario::canonical(ScenarioKind::OpenLoop), &ctx)
            .unwrap();
        assert!(!trace.diverged);
        // Hurwitz plant under a step input: bounded well below the guard.
        for row in &trace.rows {
            for v in row.damaged {
                assert!(v.abs() < 1.0, "state {v} unexpectedly large");
            }
        }
    }

    #[test]
    fn trace_row_count_matches_contract() {
        let (plant, design, cfg, engine, limits, ctx) = fixtures();
        let mut scenario = Scenario::canonical(ScenarioKind::MracEngineLag);
        scenario.duration = 2.0;
        let trace = run_mrac(&scenario, &plant, &design, &cfg, &engine, &limits, &ctx).unwrap();
        assert_eq!(trace.rows.len(), (scenario.duration / scenario.dt) as usize + 1);
        let dts: Vec<f64> = trace.rows.windows(2).map(|w| w[1].t - w[0].t).collect();
        for d in dts {
            assert!((d - scenario.dt).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_scenarios_produce_identical_traces() {
        let (plant, design, cfg, engine, limits, ctx) = fixtures();
        let mut scenario = Scenario::canonical(ScenarioKind::MracEngineLag);
        scenario.duration = 5.0;
        let a = run_mrac(&scenario, &plant, &design, &cfg, &engine, &limits, &ctx).unwrap();
        let b = run_mrac(&scenario, &plant, &design, &cfg, &engine, &limits, &ctx).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_inputs_zero_error_zero_gain_stays_at_rest() {
        let (plant, design, cfg, engine, limits, ctx) = fixtures();
        let mut scenario = Scenario::canonical(ScenarioKind::MracIdeal);
        scenario.duration = 3.0;
        scenario.aileron_step = 0.0;
        scenario.rudder_step = 0.0;
        let trace = run_mrac(&scenario, &plant, &design, &cfg, &engine, &limits, &ctx).unwrap();
        for row in &trace.rows {
            assert_eq!(row.model, [0.0; 4]);
            assert_eq!(row.damaged, [0.0; 4]);
            assert_eq!(row.gain, [0.0; 8]);
            assert_eq!(row.dt_cmd, 0.0);
        }
    }

    #[test]
    fn engine_lag_mode_respects_actuator_limits() {
        let (plant, design, cfg, engine, limits, ctx) = fixtures();
        let scenario = Scenario::canonical(ScenarioKind::MracEngineLag);
        let trace = run_mrac(&scenario, &plant, &design, &cfg, &engine, &limits, &ctx).unwrap();
        assert!(!trace.diverged);
        let per_step = limits.dt_rate_limit * scenario.dt;
        for pair in trace.rows.windows(2) {
            assert!(pair[1].dt_avail.abs() <= limits.dt_saturation);
            assert!(
                (pair[1].dt_avail - pair[0].dt_avail).abs() <= per_step * (1.0 + 1e-6),
                "available thrust moved faster than the rate limit"
            );
        }
        // commanded and available settle together
        let last = trace.rows.last().unwrap();
        assert!((last.dt_cmd - last.dt_avail).abs() <= 1e-3 * last.dt_cmd.abs());
    }

    #[test]
    fn matched_gain_holds_zero_error() {
        let (plant, design, _, engine, limits, ctx) = fixtures();
        let cfg = MracConfig::matched(&design).unwrap();
        let scenario = Scenario::canonical(ScenarioKind::MracIdeal);
        let trace = run_mrac(&scenario, &plant, &design, &cfg, &engine, &limits, &ctx).unwrap();
        assert!(trace.peak_error_inf() <= 1e-9, "matched-gain error {}", trace.peak_error_inf());
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let (plant, design, cfg, engine, limits, ctx) = fixtures();
        let scenario = Scenario::canonical(ScenarioKind::OpenLoop);
        assert!(run_mrac(&scenario, &plant, &design, &cfg, &engine, &limits, &ctx).is_err());
        assert!(run_lqr(&scenario, &plant, &design, &engine, &limits, &ctx).is_err());
    }

    #[test]
    fn misaligned_dt_rejected_in_lag_mode() {
        let (plant, design, cfg, engine, limits, ctx) = fixtures();
        let mut scenario = Scenario::canonical(ScenarioKind::MracEngineLag);
        scenario.dt = 0.003;
        assert!(run_mrac(&scenario, &plant, &design, &cfg, &engine, &limits, &ctx).is_err());
    }
}
