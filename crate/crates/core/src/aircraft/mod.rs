//! Lateral/directional aircraft models: dimensionalization of stability
//! derivatives, the vertical-stabilizer-loss damage rules, the canonical
//! Boeing 747-100 state-space fixtures, and modal classification.
//!
//! Dimensional derivatives use the uncoupled single-axis forms
//! (`L_i = q S b C_l_i / Ixx` etc., with `b/2V` on the rate terms). The
//! inertia cross-coupling enters only through the differential-thrust input
//! column, whose moment is split across roll and yaw by the full
//! `Ixx Izz - Ixz^2` inversion.

mod config;

pub use config::{AircraftConfig, BOEING_747_CONFIG};

use crate::error::{Error, Result};
use crate::numerics::{eigenvalues, Matrix};
use num_complex::Complex64;

/// Roll angle, roll rate, side-slip angle, yaw rate — the four lateral states.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LateralState {
    pub roll_angle: f64,
    pub roll_rate: f64,
    pub sideslip: f64,
    pub yaw_rate: f64,
}

impl LateralState {
    pub fn to_array(self) -> [f64; 4] {
        [self.roll_angle, self.roll_rate, self.sideslip, self.yaw_rate]
    }

    pub fn from_array(x: [f64; 4]) -> Self {
        Self { roll_angle: x[0], roll_rate: x[1], sideslip: x[2], yaw_rate: x[3] }
    }
}

/// Dimensionless lateral/directional stability and control derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AeroDerivatives {
    pub cl_beta: f64,
    pub cl_p: f64,
    pub cl_r: f64,
    pub cl_da: f64,
    pub cl_dr: f64,
    pub cn_beta: f64,
    pub cn_p: f64,
    pub cn_r: f64,
    pub cn_da: f64,
    pub cn_dr: f64,
    pub cy_beta: f64,
    pub cy_p: f64,
    pub cy_r: f64,
    pub cy_da: f64,
    pub cy_dr: f64,
}

/// Weight, mass and the moments of inertia that matter laterally.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InertiaSet {
    pub weight: f64,
    pub mass: f64,
    pub ixx: f64,
    pub iyy: f64,
    pub izz: f64,
    pub ixz: f64,
}

impl InertiaSet {
    pub fn new(weight: f64, mass: f64, ixx: f64, iyy: f64, izz: f64, ixz: f64) -> Result<Self> {
        let set = Self { weight, mass, ixx, iyy, izz, ixz };
        if !(weight > 0.0 && mass > 0.0 && ixx > 0.0 && iyy > 0.0 && izz > 0.0) {
            return Err(Error::Precondition {
                op: "InertiaSet",
                detail: "weight, mass and principal inertias must be positive".into(),
            });
        }
        if set.roll_yaw_determinant() <= 0.0 {
            return Err(Error::Precondition {
                op: "InertiaSet",
                detail: "Ixx*Izz - Ixz^2 must be positive".into(),
            });
        }
        Ok(set)
    }

    /// `Ixx Izz - Ixz^2`, the determinant of the coupled roll/yaw inertia block.
    pub fn roll_yaw_determinant(&self) -> f64 {
        self.ixx * self.izz - self.ixz * self.ixz
    }
}

/// Planform and moment-arm geometry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geometry {
    pub wing_area: f64,
    pub span: f64,
    pub chord: f64,
    /// Moment arm of the outboard engine pair, ft.
    pub engine_arm: f64,
    pub tail_arm: f64,
    pub tail_height: f64,
    pub tail_area: f64,
}

impl Geometry {
    /// Geometry after total vertical-stabilizer loss.
    pub fn damaged(&self) -> Geometry {
        Geometry { tail_area: 0.0, ..*self }
    }
}

/// Steady level-cruise operating point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrimCondition {
    pub mach: f64,
    pub airspeed: f64,
    pub altitude: f64,
    pub density: f64,
    /// q_bar = rho V^2 / 2, lbf/ft^2.
    pub dynamic_pressure: f64,
    pub pitch: f64,
    pub flight_path: f64,
    pub sideslip: f64,
    /// C_L = W / (q_bar S) at the trim weight.
    pub lift_coefficient: f64,
    pub gravity: f64,
    /// Per-engine thrust at trim, lbf.
    pub thrust_per_engine: f64,
}

impl TrimCondition {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        mach: f64,
        airspeed: f64,
        altitude: f64,
        density: f64,
        pitch: f64,
        flight_path: f64,
        sideslip: f64,
        gravity: f64,
        thrust_per_engine: f64,
        weight: f64,
        wing_area: f64,
    ) -> Result<Self> {
        if airspeed <= 0.0 || density <= 0.0 || wing_area <= 0.0 {
            return Err(Error::Precondition {
                op: "TrimCondition",
                detail: "airspeed, density and wing area must be positive".into(),
            });
        }
        let dynamic_pressure = 0.5 * density * airspeed * airspeed;
        let lift_coefficient = weight / (dynamic_pressure * wing_area);
        Ok(Self {
            mach,
            airspeed,
            altitude,
            density,
            dynamic_pressure,
            pitch,
            flight_path,
            sideslip,
            lift_coefficient,
            gravity,
            thrust_per_engine,
        })
    }
}

/// `(A, B, C, D)` with `C = I` and `D = 0` for every plant in this crate.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpaceModel {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub d: Matrix,
    pub input_labels: Vec<String>,
}

impl StateSpaceModel {
    fn new(a: Matrix, b: Matrix, input_labels: &[&str]) -> Self {
        let n = a.rows();
        let m = b.cols();
        Self {
            a,
            b,
            c: Matrix::identity(n),
            d: Matrix::zeros(n, m),
            input_labels: input_labels.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Build the four-state lateral model from dimensionless derivatives.
pub fn dimensionalize(
    derivatives: &AeroDerivatives,
    inertia: &InertiaSet,
    geometry: &Geometry,
    trim: &TrimCondition,
) -> Result<StateSpaceModel> {
    if trim.airspeed <= 0.0 {
        return Err(Error::Precondition { op: "dimensionalize", detail: "zero airspeed".into() });
    }
    if inertia.roll_yaw_determinant() <= 0.0 {
        return Err(Error::Precondition {
            op: "dimensionalize",
            detail: "Ixx*Izz - Ixz^2 must be positive".into(),
        });
    }
    let qsb = trim.dynamic_pressure * geometry.wing_area * geometry.span;
    let rate = geometry.span / (2.0 * trim.airspeed);
    let l = |c: f64| qsb * c / inertia.ixx;
    let n = |c: f64| qsb * c / inertia.izz;
    let y = |c: f64| trim.dynamic_pressure * geometry.wing_area * c / inertia.mass;
    let v = trim.airspeed;
    let g = trim.gravity;

    let a = Matrix::from_rows(&[
        [0.0, 1.0, 0.0, trim.pitch],
        [0.0, l(derivatives.cl_p) * rate, l(derivatives.cl_beta), l(derivatives.cl_r) * rate],
        [
            g / v,
            y(derivatives.cy_p) * rate / v,
            (y(derivatives.cy_beta) + g * trim.flight_path) / v,
            y(derivatives.cy_r) * rate / v - 1.0,
        ],
        [0.0, n(derivatives.cn_p) * rate, n(derivatives.cn_beta), n(derivatives.cn_r) * rate],
    ]);
    let b = Matrix::from_rows(&[
        [0.0, 0.0],
        [l(derivatives.cl_da), l(derivatives.cl_dr)],
        [y(derivatives.cy_da) / v, y(derivatives.cy_dr) / v],
        [n(derivatives.cn_da), n(derivatives.cn_dr)],
    ]);
    Ok(StateSpaceModel::new(a, b, &["aileron_rad", "rudder_rad"]))
}

/// Zero the derivatives carried by the vertical stabilizer and set
/// `C_l_r` to `C_L / 4` (total-loss damage rules).
pub fn apply_damage(derivatives: &AeroDerivatives, trim: &TrimCondition) -> AeroDerivatives {
    AeroDerivatives {
        cy_beta: 0.0,
        cy_r: 0.0,
        cn_beta: 0.0,
        cn_r: 0.0,
        cl_r: trim.lift_coefficient / 4.0,
        ..*derivatives
    }
}

/// Input matrix of the damaged aircraft: aileron column plus the
/// differential-thrust column `[0, Ixz*y_e/Delta, 0, Ixx*y_e/Delta]`
/// (per lbf of net thrust). Rows 1 and 3 of the thrust column are zero:
/// thrust maps to roll and yaw moments only, never to side-slip.
pub fn damaged_b_matrix(
    derivatives: &AeroDerivatives,
    inertia: &InertiaSet,
    geometry: &Geometry,
    trim: &TrimCondition,
) -> Result<Matrix> {
    let delta = inertia.roll_yaw_determinant();
    if delta <= 0.0 {
        return Err(Error::Precondition {
            op: "damaged_b_matrix",
            detail: "Ixx*Izz - Ixz^2 must be positive".into(),
        });
    }
    let qsb = trim.dynamic_pressure * geometry.wing_area * geometry.span;
    let arm = geometry.engine_arm;
    Ok(Matrix::from_rows(&[
        [0.0, 0.0],
        [qsb * derivatives.cl_da / inertia.ixx, inertia.ixz * arm / delta],
        [
            trim.dynamic_pressure * geometry.wing_area * derivatives.cy_da
                / (inertia.mass * trim.airspeed),
            0.0,
        ],
        [qsb * derivatives.cn_da / inertia.izz, inertia.ixx * arm / delta],
    ]))
}

/// The published nominal and damaged Boeing 747-100 models at Mach 0.65 /
/// 20,000 ft. These fixtures, not the dimensionalization pipeline, feed the
/// control design; the pipeline serves as a cross-check (the source data
/// does not pin down every dimensionalization constant).
pub fn canonical_models() -> (StateSpaceModel, StateSpaceModel) {
    let nominal = StateSpaceModel::new(
        Matrix::from_rows(&[
            [0.0, 1.0, 0.0, 0.0],
            [0.0, -0.8566, -2.7681, 0.3275],
            [0.0478, 0.0, -0.1079, -1.0],
            [0.0, -0.0248, 1.0460, -0.2665],
        ]),
        Matrix::from_rows(&[
            [0.0, 0.0],
            [0.2249, 0.1384],
            [0.0, 0.0144],
            [0.0118, -0.6537],
        ]),
        &["aileron_rad", "rudder_rad"],
    );
    let damaged = StateSpaceModel::new(
        Matrix::from_rows(&[
            [0.0, 1.0, 0.0, 0.0],
            [0.0, -0.8566, -2.7681, 0.1008],
            [0.0478, 0.0, 0.0, -1.0],
            [0.0, -0.0248, 0.0, 0.0],
        ]),
        Matrix::from_rows(&[
            [0.0, 0.0],
            [0.2249, 0.0142],
            [0.0, 0.0],
            [0.0118, 0.6784],
        ]),
        &["aileron_rad", "diff_thrust_rad_eq"],
    );
    (nominal, damaged)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeKind {
    DutchRoll,
    Spiral,
    Roll,
}

#[derive(Clone, Debug)]
pub struct Mode {
    pub kind: ModeKind,
    pub poles: Vec<Complex64>,
    pub damping: f64,
    /// |lambda|, 1/s.
    pub frequency: f64,
    /// 2 pi / |lambda|, s.
    pub period: f64,
}

/// Result of classifying a four-state lateral spectrum.
#[derive(Clone, Debug)]
pub enum ModalAnalysis {
    Classified(Vec<Mode>),
    /// Spectrum without the one-pair-two-reals structure (e.g. four real
    /// poles); raw poles reported instead.
    Unclassified(Vec<Complex64>),
}

impl ModalAnalysis {
    pub fn mode(&self, kind: ModeKind) -> Option<&Mode> {
        match self {
            ModalAnalysis::Classified(modes) => modes.iter().find(|m| m.kind == kind),
            ModalAnalysis::Unclassified(_) => None,
        }
    }
}

fn mode_from_poles(kind: ModeKind, poles: Vec<Complex64>) -> Mode {
    let lambda = poles[0];
    let magnitude = lambda.norm();
    let damping = if magnitude == 0.0 { 0.0 } else { -lambda.re / magnitude };
    Mode {
        kind,
        poles,
        damping,
        frequency: magnitude,
        period: 2.0 * std::f64::consts::PI / magnitude,
    }
}

/// Classify the lateral modes: the complex pair is Dutch roll; of the two
/// real poles the larger magnitude is roll subsidence, the smaller spiral.
pub fn modal_analysis(model: &StateSpaceModel) -> Result<ModalAnalysis> {
    if model.a.rows() != 4 || model.a.cols() != 4 {
        return Err(Error::DimensionMismatch {
            op: "modal_analysis",
            detail: format!("expected a 4x4 state matrix, got {}x{}", model.a.rows(), model.a.cols()),
        });
    }
    let eig = eigenvalues(&model.a)?;
    let complex: Vec<Complex64> = eig.values.iter().copied().filter(|z| z.im != 0.0).collect();
    let mut real: Vec<Complex64> = eig.values.iter().copied().filter(|z| z.im == 0.0).collect();
    if complex.len() != 2 || real.len() != 2 {
        return Ok(ModalAnalysis::Unclassified(eig.values));
    }
    // Equal magnitudes tie-break: the more negative real pole is Roll.
    real.sort_by(|a, b| {
        a.norm()
            .partial_cmp(&b.norm())
            .unwrap()
            .then(b.re.partial_cmp(&a.re).unwrap())
    });
    let modes = vec![
        mode_from_poles(ModeKind::DutchRoll, complex),
        mode_from_poles(ModeKind::Spiral, vec![real[0]]),
        mode_from_poles(ModeKind::Roll, vec![real[1]]),
    ];
    Ok(ModalAnalysis::Classified(modes))
}
