//! Plain-text aircraft dataset: flat `key = value` lines with `#` comments.
//! The parser is strict — a missing or unknown key is an error, so a typo in
//! a dataset cannot silently fall back to a default.

use super::{AeroDerivatives, Geometry, InertiaSet, TrimCondition};
use crate::error::{Error, Result};
use std::collections::HashMap;

/// The Boeing 747-100 dataset shipped with the crate (also at
/// `data/boeing747.cfg` in the repository).
pub const BOEING_747_CONFIG: &str = include_str!("../../../../data/boeing747.cfg");

const REQUIRED_KEYS: &[&str] = &[
    "wing_area_sqft",
    "wing_span_ft",
    "mean_chord_ft",
    "outboard_engine_arm_ft",
    "vertical_tail_arm_ft",
    "vertical_tail_height_ft",
    "vertical_tail_area_sqft",
    "nominal_weight_lbf",
    "nominal_mass_slug",
    "nominal_ixx_slugft2",
    "nominal_iyy_slugft2",
    "nominal_izz_slugft2",
    "nominal_ixz_slugft2",
    "damaged_weight_lbf",
    "damaged_mass_slug",
    "damaged_ixx_slugft2",
    "damaged_iyy_slugft2",
    "damaged_izz_slugft2",
    "damaged_ixz_slugft2",
    "cl_beta",
    "cl_p",
    "cl_r",
    "cl_da",
    "cl_dr",
    "cn_beta",
    "cn_p",
    "cn_r",
    "cn_da",
    "cn_dr",
    "cy_beta",
    "cy_p",
    "cy_r",
    "cy_da",
    "cy_dr",
    "mach",
    "airspeed_fps",
    "altitude_ft",
    "air_density_slugft3",
    "pitch_trim_rad",
    "flight_path_trim_rad",
    "sideslip_trim_rad",
    "gravity_fps2",
    "trim_thrust_lbf",
];

/// Everything the model builders need, as parsed from one dataset file.
#[derive(Clone, Debug)]
pub struct AircraftConfig {
    pub derivatives: AeroDerivatives,
    pub nominal_inertia: InertiaSet,
    pub damaged_inertia: InertiaSet,
    pub geometry: Geometry,
    pub trim: TrimCondition,
}

impl AircraftConfig {
    /// Parse a `key = value` dataset.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values: HashMap<&str, f64> = HashMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::ConfigParse {
                line: line_no,
                detail: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            if !REQUIRED_KEYS.contains(&key) {
                return Err(Error::ConfigParse {
                    line: line_no,
                    detail: format!("unknown key `{key}`"),
                });
            }
            let value: f64 = value.trim().parse().map_err(|_| Error::ConfigParse {
                line: line_no,
                detail: format!("`{}` is not a number", value.trim()),
            })?;
            if !value.is_finite() {
                return Err(Error::ConfigParse {
                    line: line_no,
                    detail: format!("`{key}` must be finite"),
                });
            }
            if values.insert(key, value).is_some() {
                return Err(Error::ConfigParse {
                    line: line_no,
                    detail: format!("duplicate key `{key}`"),
                });
            }
        }
        for key in REQUIRED_KEYS {
            if !values.contains_key(key) {
                return Err(Error::ConfigMissingKey { key: (*key).into() });
            }
        }
        let get = |key: &str| values[key];

        let derivatives = AeroDerivatives {
            cl_beta: get("cl_beta"),
            cl_p: get("cl_p"),
            cl_r: get("cl_r"),
            cl_da: get("cl_da"),
            cl_dr: get("cl_dr"),
            cn_beta: get("cn_beta"),
            cn_p: get("cn_p"),
            cn_r: get("cn_r"),
            cn_da: get("cn_da"),
            cn_dr: get("cn_dr"),
            cy_beta: get("cy_beta"),
            cy_p: get("cy_p"),
            cy_r: get("cy_r"),
            cy_da: get("cy_da"),
            cy_dr: get("cy_dr"),
        };
        let nominal_inertia = InertiaSet::new(
            get("nominal_weight_lbf"),
            get("nominal_mass_slug"),
            get("nominal_ixx_slugft2"),
            get("nominal_iyy_slugft2"),
            get("nominal_izz_slugft2"),
            get("nominal_ixz_slugft2"),
        )?;
        let damaged_inertia = InertiaSet::new(
            get("damaged_weight_lbf"),
            get("damaged_mass_slug"),
            get("damaged_ixx_slugft2"),
            get("damaged_iyy_slugft2"),
            get("damaged_izz_slugft2"),
            get("damaged_ixz_slugft2"),
        )?;
        let geometry = Geometry {
            wing_area: get("wing_area_sqft"),
            span: get("wing_span_ft"),
            chord: get("mean_chord_ft"),
            engine_arm: get("outboard_engine_arm_ft"),
            tail_arm: get("vertical_tail_arm_ft"),
            tail_height: get("vertical_tail_height_ft"),
            tail_area: get("vertical_tail_area_sqft"),
        };
        let trim = TrimCondition::new(
            get("mach"),
            get("airspeed_fps"),
            get("altitude_ft"),
            get("air_density_slugft3"),
            get("pitch_trim_rad"),
            get("flight_path_trim_rad"),
            get("sideslip_trim_rad"),
            get("gravity_fps2"),
            get("trim_thrust_lbf"),
            nominal_inertia.weight,
            geometry.wing_area,
        )?;
        Ok(Self { derivatives, nominal_inertia, damaged_inertia, geometry, trim })
    }

    /// The built-in Boeing 747-100 dataset.
    pub fn boeing_747() -> Self {
        Self::parse(BOEING_747_CONFIG).expect("built-in dataset parses")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_dataset_parses() {
        let cfg = AircraftConfig::boeing_747();
        assert_eq!(cfg.geometry.wing_area, 5500.0);
        assert_eq!(cfg.derivatives.cn_dr, -0.100);
        assert!((cfg.trim.dynamic_pressure - 287.0).abs() < 0.1);
        assert!((cfg.trim.lift_coefficient - 0.4033).abs() < 5e-4);
    }

    #[test]
    fn missing_key_is_named() {
        let text = BOEING_747_CONFIG.replace("cn_dr = -0.100", "");
        match AircraftConfig::parse(&text) {
            Err(Error::ConfigMissingKey { key }) => assert_eq!(key, "cn_dr"),
            other => panic!("expected missing-key error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = format!("{BOEING_747_CONFIG}\nbogus_key = 1.0\n");
        match AircraftConfig::parse(&text) {
            Err(Error::ConfigParse { line, detail }) => {
                assert!(detail.contains("bogus_key"));
                assert!(line > 1);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_number_reports_line() {
        let text = BOEING_747_CONFIG.replace("mach = 0.65", "mach = zero-point-six-five");
        assert!(matches!(AircraftConfig::parse(&text), Err(Error::ConfigParse { .. })));
    }
}
