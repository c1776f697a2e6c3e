//! Weather CSV ingestion and serialization, plus assembly of the
//! simulated season days from either CSV files or the synthetic generator.
//!
//! The schema is `timestamp,temp_c,pressure_pa,ghi_wm2` with ISO-8601
//! timestamps. The pressure column may be absent, in which case a standard
//! 101325 Pa is assumed. Floats are written in shortest round-trip form,
//! so save followed by load reproduces the exact values.

use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};

use aerocell_core::sim::SeasonDay;
use aerocell_core::weather::{
    resample_to_step, synthetic_clear_sky, ClearSkyParams, WeatherSample, WeatherSeries,
    DEFAULT_MAX_GAP_S,
};

use crate::config::{SyntheticWeatherConfig, WeatherConfig};
use crate::AppError;

pub const COL_TIMESTAMP: &str = "timestamp";
pub const COL_TEMP: &str = "temp_c";
pub const COL_PRESSURE: &str = "pressure_pa";
pub const COL_GHI: &str = "ghi_wm2";

const SECONDS_PER_DAY: i64 = 86_400;

fn parse_timestamp(raw: &str, row: usize, path: &Path) -> Result<i64, AppError> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Ok(dt.timestamp());
    }
    for fmt in [
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Ok(naive.and_utc().timestamp());
        }
    }
    Err(AppError::config(format!(
        "{}: row {row}: cannot parse timestamp '{raw}'",
        path.display()
    )))
}

fn parse_float(raw: &str, col: &str, row: usize, path: &Path) -> Result<f64, AppError> {
    raw.trim().parse().map_err(|_| {
        AppError::config(format!(
            "{}: row {row}: column {col}: cannot parse '{raw}' as a number",
            path.display()
        ))
    })
}

/// Loads a weather CSV. Rows may arrive unordered; they are sorted by
/// timestamp. Bound violations name the offending column and row.
pub fn load_weather_csv(path: &Path) -> Result<WeatherSeries, AppError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => AppError::io(path, std::io::Error::other(e.to_string())),
        _ => AppError::config(format!("{}: {e}", path.display())),
    })?;
    let headers = reader
        .headers()
        .map_err(|e| AppError::config(format!("{}: {e}", path.display())))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let ts_idx = col(COL_TIMESTAMP).ok_or_else(|| {
        AppError::config(format!(
            "{}: missing column {COL_TIMESTAMP}",
            path.display()
        ))
    })?;
    let temp_idx = col(COL_TEMP).ok_or_else(|| {
        AppError::config(format!("{}: missing column {COL_TEMP}", path.display()))
    })?;
    let ghi_idx = col(COL_GHI)
        .ok_or_else(|| AppError::config(format!("{}: missing column {COL_GHI}", path.display())))?;
    let pressure_idx = col(COL_PRESSURE);

    let mut samples = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2; // header is line 1
        let record =
            record.map_err(|e| AppError::config(format!("{}: row {row}: {e}", path.display())))?;
        let field = |idx: usize| record.get(idx).unwrap_or("");
        let sample = WeatherSample {
            unix_s: parse_timestamp(field(ts_idx), row, path)?,
            temperature_c: parse_float(field(temp_idx), COL_TEMP, row, path)?,
            pressure_pa: match pressure_idx {
                Some(idx) => parse_float(field(idx), COL_PRESSURE, row, path)?,
                None => 101_325.0,
            },
            irradiance_wm2: parse_float(field(ghi_idx), COL_GHI, row, path)?,
        };
        sample
            .validate()
            .map_err(|e| AppError::config(format!("{}: row {row}: {e}", path.display())))?;
        samples.push(sample);
    }
    if samples.is_empty() {
        return Err(AppError::config(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    samples.sort_by_key(|s| s.unix_s);
    let step = samples
        .windows(2)
        .map(|w| w[1].unix_s - w[0].unix_s)
        .find(|&g| g > 0)
        .unwrap_or(60);
    let step = u32::try_from(step)
        .map_err(|_| AppError::config(format!("{}: sample spacing too large", path.display())))?;
    WeatherSeries::new(samples, step, DEFAULT_MAX_GAP_S)
        .map_err(|e| AppError::config(format!("{}: {e}", path.display())))
}

/// Writes a weather CSV in the canonical schema.
pub fn save_weather_csv(path: &Path, series: &WeatherSeries) -> Result<(), AppError> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| AppError::io(path, std::io::Error::other(e.to_string())))?;
    writer
        .write_record([COL_TIMESTAMP, COL_TEMP, COL_PRESSURE, COL_GHI])
        .map_err(|e| AppError::io(path, std::io::Error::other(e.to_string())))?;
    for s in series.samples() {
        let ts = DateTime::<Utc>::from_timestamp(s.unix_s, 0)
            .map(|dt| dt.format("%Y-%m-%dT%H:%M:%SZ").to_string())
            .unwrap_or_else(|| s.unix_s.to_string());
        writer
            .write_record([
                ts,
                format!("{}", s.temperature_c),
                format!("{}", s.pressure_pa),
                format!("{}", s.irradiance_wm2),
            ])
            .map_err(|e| AppError::io(path, std::io::Error::other(e.to_string())))?;
    }
    writer.flush().map_err(|e| AppError::io(path, e))?;
    Ok(())
}

/// Generates one synthetic day with timestamps anchored to the given year.
pub fn synthetic_day(
    cfg: &SyntheticWeatherConfig,
    preset: &crate::config::SeasonPreset,
    step_s: u32,
) -> Result<WeatherSeries, AppError> {
    let series = synthetic_clear_sky(&ClearSkyParams {
        day_of_year: preset.day_of_year,
        latitude_deg: cfg.latitude_deg,
        peak_irradiance_wm2: preset.peak_irradiance_wm2,
        day_temp_c: preset.day_temp_c,
        night_temp_c: preset.night_temp_c,
        pressure_pa: cfg.pressure_pa,
        step_s,
    })
    .map_err(|e| AppError::config(e.to_string()))?;
    let jan1 = NaiveDate::from_ymd_opt(cfg.year, 1, 1)
        .ok_or_else(|| AppError::config(format!("invalid year {}", cfg.year)))?
        .and_hms_opt(0, 0, 0)
        .expect("midnight exists")
        .and_utc()
        .timestamp();
    let shifted: Vec<WeatherSample> = series
        .samples()
        .iter()
        .map(|s| WeatherSample {
            unix_s: s.unix_s + jan1,
            ..*s
        })
        .collect();
    WeatherSeries::new(shifted, step_s, i64::from(step_s))
        .map_err(|e| AppError::config(e.to_string()))
}

/// Builds the simulated season days from the configured weather source,
/// resampled to the simulation step and trimmed to whole days.
pub fn build_season_days(weather: &WeatherConfig, step_s: u32) -> Result<Vec<SeasonDay>, AppError> {
    let steps_per_day = (SECONDS_PER_DAY / i64::from(step_s)) as usize;
    match weather {
        WeatherConfig::Synthetic(s) => s
            .seasons
            .iter()
            .map(|preset| {
                Ok(SeasonDay {
                    label: preset.label.clone(),
                    series: synthetic_day(s, preset, step_s)?,
                })
            })
            .collect(),
        WeatherConfig::Csv(c) => {
            let mut days = Vec::new();
            for (i, raw_path) in c.paths.iter().enumerate() {
                let path = Path::new(raw_path);
                let label = match &c.labels {
                    Some(labels) => labels[i].clone(),
                    None => path
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| format!("day{i}")),
                };
                let loaded = load_weather_csv(path)?;
                let resampled = resample_to_step(&loaded, step_s)
                    .map_err(|e| AppError::config(format!("{}: {e}", path.display())))?;
                // a file covering midnight-to-midnight inclusive carries one
                // extra sample; drop it
                let mut samples = resampled.samples().to_vec();
                if samples.len() == steps_per_day + 1 {
                    samples.pop();
                }
                if samples.len() != steps_per_day {
                    return Err(AppError::config(format!(
                        "{}: expected one day of data ({steps_per_day} samples at {step_s} s), got {}",
                        path.display(),
                        samples.len()
                    )));
                }
                let series = WeatherSeries::new(samples, step_s, i64::from(step_s))
                    .map_err(|e| AppError::config(format!("{}: {e}", path.display())))?;
                days.push(SeasonDay { label, series });
            }
            Ok(days)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{default_season_presets, CsvWeatherConfig, SeasonPreset};

    #[test]
    fn synthetic_day_is_anchored_to_the_year() {
        let cfg = SyntheticWeatherConfig::default();
        let preset = &default_season_presets()[0]; // day 79 of 2022: March 20
        let series = synthetic_day(&cfg, preset, 60).unwrap();
        let first = DateTime::<Utc>::from_timestamp(series.samples()[0].unix_s, 0).unwrap();
        assert_eq!(
            first.format("%Y-%m-%dT%H:%M:%SZ").to_string(),
            "2022-03-20T00:00:00Z"
        );
        assert_eq!(series.len(), 1440);
    }

    #[test]
    fn csv_round_trip_is_bit_identical() {
        let cfg = SyntheticWeatherConfig::default();
        let preset = &default_season_presets()[1];
        let series = synthetic_day(&cfg, preset, 300).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("day.csv");
        save_weather_csv(&path, &series).unwrap();
        let loaded = load_weather_csv(&path).unwrap();
        assert_eq!(series.samples(), loaded.samples());
        // and saving the loaded series reproduces the file byte for byte
        let path2 = dir.path().join("day2.csv");
        save_weather_csv(&path2, &loaded).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn four_day_file_row_count() {
        // a contiguous 4-day 1-minute file holds 5760 rows and loads in full
        let cfg = SyntheticWeatherConfig::default();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("horizon.csv");
        let mut all = Vec::new();
        for day_of_year in 79..83 {
            let preset = SeasonPreset {
                label: format!("day{day_of_year}"),
                day_of_year,
                peak_irradiance_wm2: 600.0,
                day_temp_c: 12.0,
                night_temp_c: 4.0,
            };
            let day = synthetic_day(&cfg, &preset, 60).unwrap();
            all.extend_from_slice(day.samples());
        }
        assert_eq!(all.len(), 5760);
        let series = WeatherSeries::new(all, 60, DEFAULT_MAX_GAP_S).unwrap();
        save_weather_csv(&path, &series).unwrap();
        let loaded = load_weather_csv(&path).unwrap();
        assert_eq!(loaded.len(), 5760);
    }

    #[test]
    fn negative_irradiance_names_field_and_row() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(
            &path,
            "timestamp,temp_c,pressure_pa,ghi_wm2\n\
             2022-03-20T00:00:00Z,10,101325,0\n\
             2022-03-20T00:01:00Z,10,101325,-5\n",
        )
        .unwrap();
        let err = load_weather_csv(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("ghi_wm2"), "{msg}");
        assert!(msg.contains("row 3"), "{msg}");
    }

    #[test]
    fn shuffled_rows_are_sorted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("shuffled.csv");
        std::fs::write(
            &path,
            "timestamp,temp_c,pressure_pa,ghi_wm2\n\
             2022-03-20T00:02:00Z,12,101325,20\n\
             2022-03-20T00:00:00Z,10,101325,0\n\
             2022-03-20T00:01:00Z,11,101325,10\n",
        )
        .unwrap();
        let series = load_weather_csv(&path).unwrap();
        let temps: Vec<f64> = series.samples().iter().map(|s| s.temperature_c).collect();
        assert_eq!(temps, vec![10.0, 11.0, 12.0]);
    }

    #[test]
    fn missing_pressure_column_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nopressure.csv");
        std::fs::write(
            &path,
            "timestamp,temp_c,ghi_wm2\n\
             2022-03-20T00:00:00Z,10,0\n\
             2022-03-20T00:01:00Z,10,5\n",
        )
        .unwrap();
        let series = load_weather_csv(&path).unwrap();
        assert!(series.samples().iter().all(|s| s.pressure_pa == 101_325.0));
    }

    #[test]
    fn missing_required_column_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nocol.csv");
        std::fs::write(&path, "timestamp,temp_c\n2022-03-20T00:00:00Z,10\n").unwrap();
        let err = load_weather_csv(&path).unwrap_err();
        assert!(err.to_string().contains("ghi_wm2"));
    }

    #[test]
    fn csv_source_builds_days() {
        let cfg = SyntheticWeatherConfig::default();
        let dir = tempfile::tempdir().unwrap();
        let mut paths = Vec::new();
        for preset in &default_season_presets()[..2] {
            let day = synthetic_day(&cfg, preset, 60).unwrap();
            let path = dir.path().join(format!("{}.csv", preset.label));
            save_weather_csv(&path, &day).unwrap();
            paths.push(path.to_string_lossy().into_owned());
        }
        let days = build_season_days(
            &WeatherConfig::Csv(CsvWeatherConfig {
                paths,
                labels: None,
            }),
            60,
        )
        .unwrap();
        assert_eq!(days.len(), 2);
        assert_eq!(days[0].label, "vernal_equinox");
        assert_eq!(days[0].series.len(), 1440);
    }
}
