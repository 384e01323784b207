//! Scenario files: TOML with lengths in meters, frequencies in Hz and angles
//! in radians. Angles may also be strings such as `"2pi/3"`, `"-pi/4"`,
//! `"60deg"` or `"1.2rad"`.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;
use sha2::{Digest, Sha256};
use shvel::metrics::frequency_range;
use shvel::reproduction::{ArrayScenario, PinvTolerance};
use shvel::{GridSpec, LoudspeakerArray, MediumConstants, SourceSpec, SphericalPoint};

use crate::error::CliError;

/// An angle in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle(pub f64);

/// Parses `"pi/3"`, `"2*pi/3"`, `"-3π/4"`, `"45deg"`, `"45°"`, `"0.5rad"`, `"1.2"`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let s = text.trim().replace('π', "pi").replace(' ', "");
    let bad =
        || format!("cannot read angle {text:?}; use radians, a pi expression or a deg suffix");
    if let Some(deg) = s.strip_suffix("deg").or_else(|| s.strip_suffix('°')) {
        return deg.parse::<f64>().map(f64::to_radians).map_err(|_| bad());
    }
    let s = s.strip_suffix("rad").unwrap_or(&s);
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d.parse::<f64>().map_err(|_| bad())?)),
        None => (s, None),
    };
    let value = match num.find("pi") {
        Some(pos) if pos + 2 == num.len() => {
            let coef = num[..pos].trim_end_matches('*');
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            c * PI
        }
        Some(_) => return Err(bad()),
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    let value = match den {
        Some(d) if d != 0.0 => value / d,
        Some(_) => return Err(bad()),
        None => value,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct AngleVisitor;

        impl Visitor<'_> for AngleVisitor {
            type Value = Angle;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an angle in radians or a string like \"pi/3\" or \"60deg\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Angle, E> {
                Ok(Angle(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Angle, E> {
                parse_angle(v).map(Angle).map_err(E::custom)
            }
        }

        deserializer.deserialize_any(AngleVisitor)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMedium {
    density: Option<f64>,
    sound_speed: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum SourceType {
    PlaneWave,
    PointSource,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSource {
    #[serde(rename = "type")]
    kind: SourceType,
    r: Option<f64>,
    theta: Angle,
    phi: Angle,
    gain: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPosition {
    r: f64,
    theta: Angle,
    phi: Angle,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArray {
    radius: Option<f64>,
    azimuths: Option<Vec<Angle>>,
    positions: Option<Vec<RawPosition>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    spacing: Option<f64>,
    radius: Option<f64>,
    z: Option<f64>,
    inner_radius: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    start: f64,
    stop: f64,
    step: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    region_radius: Option<f64>,
    max_degree: Option<usize>,
    frequencies: Option<Vec<f64>>,
    output_dir: Option<PathBuf>,
    tolerance: Option<f64>,
    eval_margin: Option<usize>,
    medium: Option<RawMedium>,
    #[serde(default)]
    source: Vec<RawSource>,
    array: Option<RawArray>,
    grid: Option<RawGrid>,
    sweep: Option<RawSweep>,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub medium: MediumConstants,
    pub region_radius: f64,
    pub max_degree: usize,
    pub frequencies: Vec<f64>,
    pub sources: Vec<SourceSpec>,
    pub array: Option<LoudspeakerArray>,
    pub grid: GridSpec,
    pub inner_radius: f64,
    pub output_dir: PathBuf,
    pub tolerance: PinvTolerance,
    pub eval_margin: usize,
    /// Hex SHA-256 of the scenario file bytes.
    pub sha256: String,
}

pub const DEFAULT_OUTPUT_DIR: &str = "out";
pub const DEFAULT_INNER_RADIUS: f64 = 0.15;
pub const DEFAULT_EVAL_MARGIN: usize = 12;

fn positive(field: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::validation(
            field,
            format!("must be a positive number, got {v}"),
        ))
    }
}

fn gain(g: Option<[f64; 2]>) -> Complex64 {
    g.map_or(Complex64::new(1.0, 0.0), |[re, im]| Complex64::new(re, im))
}

fn point(field: &str, r: f64, theta: Angle, phi: Angle) -> Result<SphericalPoint, CliError> {
    SphericalPoint::new(positive(&format!("{field}.r"), r)?, theta.0, phi.0)
        .map_err(|e| CliError::validation(field, e.to_string()))
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let mut scenario = Self::parse(&text).map_err(|e| match e {
            CliError::Parse { message, .. } => CliError::Parse {
                path: path.display().to_string(),
                message,
            },
            other => other,
        })?;
        scenario.sha256 = hex::encode(Sha256::digest(&bytes));
        Ok(scenario)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| CliError::Parse {
            path: "<scenario>".into(),
            message: e.to_string().trim_end().replace('\n', " | "),
        })?;
        let region_radius = positive(
            "region_radius",
            raw.region_radius
                .ok_or_else(|| CliError::validation("region_radius", "missing"))?,
        )?;
        let max_degree = raw
            .max_degree
            .ok_or_else(|| CliError::validation("max_degree", "missing"))?;
        if max_degree < 1 {
            return Err(CliError::validation("max_degree", "must be at least 1"));
        }

        let defaults = MediumConstants::default();
        let medium = match raw.medium {
            Some(m) => MediumConstants::new(
                m.density.unwrap_or(defaults.density),
                m.sound_speed.unwrap_or(defaults.sound_speed),
            )
            .map_err(|e| CliError::validation("medium", e.to_string()))?,
            None => defaults,
        };

        let mut frequencies = raw.frequencies.unwrap_or_default();
        if let Some(s) = raw.sweep {
            if s.step.is_nan() || s.step <= 0.0 || s.stop < s.start {
                return Err(CliError::validation(
                    "sweep",
                    "needs start <= stop and step > 0",
                ));
            }
            frequencies.extend(frequency_range(s.start, s.stop, s.step));
        }
        for (i, &f) in frequencies.iter().enumerate() {
            positive(&format!("frequencies[{i}]"), f)?;
        }

        let sources = raw
            .source
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                let field = format!("source[{i}]");
                let spec = match (s.kind, s.r) {
                    (SourceType::PlaneWave, None) => SourceSpec::plane_wave(s.theta.0, s.phi.0),
                    (SourceType::PlaneWave, Some(_)) => {
                        return Err(CliError::validation(
                            format!("{field}.r"),
                            "not used by a plane wave",
                        ))
                    }
                    (SourceType::PointSource, Some(r)) => {
                        SourceSpec::point_source(point(&field, r, s.theta, s.phi)?)
                    }
                    (SourceType::PointSource, None) => {
                        return Err(CliError::validation(format!("{field}.r"), "missing"))
                    }
                };
                Ok(spec.with_gain(gain(s.gain)))
            })
            .collect::<Result<Vec<_>, CliError>>()?;

        let array = raw.array.map(parse_array).transpose()?;

        let g = raw.grid.unwrap_or(RawGrid {
            spacing: None,
            radius: None,
            z: None,
            inner_radius: None,
        });
        let spacing = positive(
            "grid.spacing",
            g.spacing.unwrap_or(GridSpec::DEFAULT_SPACING),
        )?;
        let mask = positive("grid.radius", g.radius.unwrap_or(region_radius))?;
        if mask > region_radius {
            return Err(CliError::validation(
                "grid.radius",
                format!("{mask} m exceeds region_radius {region_radius} m"),
            ));
        }
        let mut grid = GridSpec::new(spacing, mask)
            .map_err(|e| CliError::validation("grid", e.to_string()))?;
        grid.z = g.z.unwrap_or(0.0);
        if grid.z.abs() > region_radius {
            return Err(CliError::validation(
                "grid.z",
                "plane does not cut the region",
            ));
        }
        let inner_radius = positive(
            "grid.inner_radius",
            g.inner_radius.unwrap_or(DEFAULT_INNER_RADIUS),
        )?;

        let tolerance = match raw.tolerance {
            Some(t) => PinvTolerance::Relative(positive("tolerance", t)?),
            None => PinvTolerance::Default,
        };

        Ok(Scenario {
            medium,
            region_radius,
            max_degree,
            frequencies,
            sources,
            array,
            grid,
            inner_radius,
            output_dir: raw.output_dir.unwrap_or_else(|| DEFAULT_OUTPUT_DIR.into()),
            tolerance,
            eval_margin: raw.eval_margin.unwrap_or(DEFAULT_EVAL_MARGIN),
            sha256: String::new(),
        })
    }

    pub fn require_frequencies(&self) -> Result<&[f64], CliError> {
        if self.frequencies.is_empty() {
            Err(CliError::validation(
                "frequencies",
                "missing; give `frequencies` or a [sweep] table",
            ))
        } else {
            Ok(&self.frequencies)
        }
    }

    pub fn require_sources(&self) -> Result<&[SourceSpec], CliError> {
        if self.sources.is_empty() {
            Err(CliError::validation(
                "source",
                "missing; add a [[source]] table",
            ))
        } else {
            Ok(&self.sources)
        }
    }

    /// The reproduction setup: requires an array and exactly one desired source.
    pub fn array_scenario(&self) -> Result<ArrayScenario, CliError> {
        let array = self
            .array
            .clone()
            .ok_or_else(|| CliError::validation("array", "missing; add an [array] table"))?;
        let desired = match self.require_sources()? {
            [one] => *one,
            many => {
                return Err(CliError::validation(
                    "source",
                    format!(
                        "reproduction needs exactly one desired source, got {}",
                        many.len()
                    ),
                ))
            }
        };
        let scenario = ArrayScenario {
            array,
            desired,
            region_radius: self.region_radius,
            max_degree: self.max_degree,
            medium: self.medium,
            tolerance: self.tolerance,
            eval_margin: self.eval_margin,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

fn parse_array(raw: RawArray) -> Result<LoudspeakerArray, CliError> {
    let array = match (raw.radius, raw.azimuths, raw.positions) {
        (Some(radius), Some(azimuths), None) => {
            let phis: Vec<f64> = azimuths.iter().map(|a| a.0).collect();
            LoudspeakerArray::horizontal_circle(positive("array.radius", radius)?, &phis)
        }
        (None, None, Some(positions)) => LoudspeakerArray::new(
            positions
                .into_iter()
                .enumerate()
                .map(|(i, p)| point(&format!("array.positions[{i}]"), p.r, p.theta, p.phi))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        (None, Some(_), None) => return Err(CliError::validation("array.radius", "missing")),
        (Some(_), None, None) => return Err(CliError::validation("array.azimuths", "missing")),
        _ => {
            return Err(CliError::validation(
                "array",
                "give either `radius` and `azimuths`, or `positions`",
            ))
        }
    };
    array.map_err(|e| CliError::validation("array", e.to_string()))
}
