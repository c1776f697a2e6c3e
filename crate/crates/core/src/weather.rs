//! Weather time series: validation, resampling, and a synthetic clear-sky
//! generator used by tests and the seasonal presets.
//!
//! Timestamps are plain UTC unix seconds; the IO layer converts to and from
//! ISO-8601 text. A series is immutable once built and can be shared across
//! threads freely.

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// Default maximum tolerated gap between consecutive samples, seconds.
pub const DEFAULT_MAX_GAP_S: i64 = 3600;

const SECONDS_PER_DAY: i64 = 86_400;

/// One timestamped weather observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeatherSample {
    /// UTC timestamp, seconds since the unix epoch.
    pub unix_s: i64,
    /// Ambient temperature at the station, °C.
    pub temperature_c: f64,
    /// Reference-level (sea-level-equivalent) air pressure, Pa.
    pub pressure_pa: f64,
    /// Plane-of-array solar irradiance, W/m².
    pub irradiance_wm2: f64,
}

impl WeatherSample {
    /// Checks the per-field physical bounds.
    pub fn validate(&self) -> Result<(), WeatherError> {
        if self.irradiance_wm2 < 0.0 {
            return Err(WeatherError::FieldOutOfBounds {
                field: "ghi_wm2",
                value: self.irradiance_wm2,
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        if !(80_000.0..=110_000.0).contains(&self.pressure_pa) {
            return Err(WeatherError::FieldOutOfBounds {
                field: "pressure_pa",
                value: self.pressure_pa,
                min: 80_000.0,
                max: 110_000.0,
            });
        }
        if !(-60.0..=60.0).contains(&self.temperature_c) {
            return Err(WeatherError::FieldOutOfBounds {
                field: "temp_c",
                value: self.temperature_c,
                min: -60.0,
                max: 60.0,
            });
        }
        Ok(())
    }
}

/// An ordered weather series with a nominal sample spacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeatherSeries {
    samples: Vec<WeatherSample>,
    /// Nominal spacing between samples, seconds.
    step_s: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeatherError {
    Empty,
    FieldOutOfBounds {
        field: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    NonIncreasingTimestamps {
        index: usize,
    },
    GapTooLarge {
        index: usize,
        gap_s: i64,
        max_gap_s: i64,
    },
    InvalidStep {
        step_s: u32,
    },
}

impl fmt::Display for WeatherError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => write!(f, "weather series is empty"),
            Self::FieldOutOfBounds {
                field,
                value,
                min,
                max,
            } => write!(
                f,
                "field {field} value {value} outside bounds [{min}, {max}]"
            ),
            Self::NonIncreasingTimestamps { index } => {
                write!(f, "timestamps not strictly increasing at sample {index}")
            }
            Self::GapTooLarge {
                index,
                gap_s,
                max_gap_s,
            } => write!(
                f,
                "gap of {gap_s} s before sample {index} exceeds the allowed {max_gap_s} s"
            ),
            Self::InvalidStep { step_s } => write!(f, "invalid resampling step {step_s} s"),
        }
    }
}

impl core::error::Error for WeatherError {}

impl WeatherSeries {
    /// Builds a series from samples, validating bounds, ordering, and gaps.
    ///
    /// Samples are sorted by timestamp first, so shuffled input is accepted;
    /// duplicate timestamps are rejected.
    pub fn new(
        mut samples: Vec<WeatherSample>,
        step_s: u32,
        max_gap_s: i64,
    ) -> Result<Self, WeatherError> {
        if samples.is_empty() {
            return Err(WeatherError::Empty);
        }
        if step_s == 0 {
            return Err(WeatherError::InvalidStep { step_s });
        }
        for s in &samples {
            s.validate()?;
        }
        samples.sort_by_key(|s| s.unix_s);
        for i in 1..samples.len() {
            let gap = samples[i].unix_s - samples[i - 1].unix_s;
            if gap == 0 {
                return Err(WeatherError::NonIncreasingTimestamps { index: i });
            }
            if gap > max_gap_s {
                return Err(WeatherError::GapTooLarge {
                    index: i,
                    gap_s: gap,
                    max_gap_s,
                });
            }
        }
        Ok(Self { samples, step_s })
    }

    pub fn samples(&self) -> &[WeatherSample] {
        &self.samples
    }

    pub fn step_s(&self) -> u32 {
        self.step_s
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Linearly interpolates the series at an arbitrary timestamp, holding
    /// the endpoint values outside the original support.
    pub fn interpolate(&self, unix_s: i64) -> WeatherSample {
        let first = self.samples[0];
        let last = self.samples[self.samples.len() - 1];
        if unix_s <= first.unix_s {
            return WeatherSample { unix_s, ..first };
        }
        if unix_s >= last.unix_s {
            return WeatherSample { unix_s, ..last };
        }
        let idx = match self.samples.binary_search_by_key(&unix_s, |s| s.unix_s) {
            Ok(i) => return self.samples[i],
            Err(i) => i,
        };
        let a = self.samples[idx - 1];
        let b = self.samples[idx];
        let w = (unix_s - a.unix_s) as f64 / (b.unix_s - a.unix_s) as f64;
        WeatherSample {
            unix_s,
            temperature_c: a.temperature_c + w * (b.temperature_c - a.temperature_c),
            pressure_pa: a.pressure_pa + w * (b.pressure_pa - a.pressure_pa),
            irradiance_wm2: a.irradiance_wm2 + w * (b.irradiance_wm2 - a.irradiance_wm2),
        }
    }
}

/// Resamples a series onto a uniform grid covering its span.
///
/// Grid points are `t0, t0 + step, ...` up to the last original timestamp;
/// values are linear interpolations of the bracketing samples. A series
/// that is already uniform at `step_s` comes back identical.
pub fn resample_to_step(
    series: &WeatherSeries,
    step_s: u32,
) -> Result<WeatherSeries, WeatherError> {
    if series.is_empty() {
        return Err(WeatherError::Empty);
    }
    if step_s == 0 {
        return Err(WeatherError::InvalidStep { step_s });
    }
    let t0 = series.samples[0].unix_s;
    let t_end = series.samples[series.samples.len() - 1].unix_s;
    let mut out = Vec::new();
    let mut t = t0;
    while t <= t_end {
        out.push(series.interpolate(t));
        t += i64::from(step_s);
    }
    Ok(WeatherSeries {
        samples: out,
        step_s,
    })
}

/// Parameters for the synthetic clear-sky day generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClearSkyParams {
    /// Day of year, 1..=365.
    pub day_of_year: u32,
    /// Geographic latitude, degrees north.
    pub latitude_deg: f64,
    /// Irradiance at solar noon, W/m².
    pub peak_irradiance_wm2: f64,
    /// Daily maximum ambient temperature, °C.
    pub day_temp_c: f64,
    /// Daily minimum ambient temperature, °C.
    pub night_temp_c: f64,
    /// Constant reference-level pressure, Pa.
    pub pressure_pa: f64,
    /// Sample spacing, seconds; must divide 86400.
    pub step_s: u32,
}

/// Daylight span for a day-of-year and latitude, as (sunrise, sunset) in
/// seconds from midnight. Returns None during polar night.
fn daylight_span(day_of_year: u32, latitude_deg: f64) -> Option<(f64, f64)> {
    // Cooper's declination formula and the sunset-hour-angle day length.
    let decl_deg =
        23.45 * libm::sin(2.0 * core::f64::consts::PI * (284.0 + f64::from(day_of_year)) / 365.0);
    let lat = latitude_deg.to_radians();
    let decl = decl_deg.to_radians();
    let cos_h = -libm::tan(lat) * libm::tan(decl);
    if cos_h >= 1.0 {
        return None; // polar night
    }
    let hour_angle_deg = if cos_h <= -1.0 {
        180.0 // polar day
    } else {
        libm::acos(cos_h).to_degrees()
    };
    let half_day_s = hour_angle_deg / 15.0 * 3600.0;
    let noon = 12.0 * 3600.0;
    Some((noon - half_day_s, noon + half_day_s))
}

/// Generates one synthetic clear-sky day.
///
/// Irradiance is a half-sine between sunrise and sunset; temperature swings
/// sinusoidally between the night minimum (03:00) and the day maximum
/// (15:00). Timestamps start at `(day_of_year - 1) * 86400`, so series for
/// increasing days of one year concatenate in order.
pub fn synthetic_clear_sky(p: &ClearSkyParams) -> Result<WeatherSeries, WeatherError> {
    if p.step_s == 0 || 86_400 % p.step_s != 0 {
        return Err(WeatherError::InvalidStep { step_s: p.step_s });
    }
    let span = daylight_span(p.day_of_year, p.latitude_deg);
    let day_start = i64::from(p.day_of_year - 1) * SECONDS_PER_DAY;
    let n = SECONDS_PER_DAY / i64::from(p.step_s);
    let t_mean = 0.5 * (p.day_temp_c + p.night_temp_c);
    let t_amp = 0.5 * (p.day_temp_c - p.night_temp_c);
    let mut samples = Vec::with_capacity(n as usize);
    for k in 0..n {
        let tod = (k * i64::from(p.step_s)) as f64; // seconds since midnight
        let irradiance = match span {
            Some((sunrise, sunset)) if sunset > sunrise && tod > sunrise && tod < sunset => {
                let phase = core::f64::consts::PI * (tod - sunrise) / (sunset - sunrise);
                (p.peak_irradiance_wm2 * libm::sin(phase)).max(0.0)
            }
            _ => 0.0,
        };
        // peak at 15:00, trough at 03:00
        let hours = tod / 3600.0;
        let temperature =
            t_mean + t_amp * libm::sin(2.0 * core::f64::consts::PI * (hours - 9.0) / 24.0);
        samples.push(WeatherSample {
            unix_s: day_start + k * i64::from(p.step_s),
            temperature_c: temperature,
            pressure_pa: p.pressure_pa,
            irradiance_wm2: irradiance,
        });
    }
    WeatherSeries::new(samples, p.step_s, i64::from(p.step_s))
}
