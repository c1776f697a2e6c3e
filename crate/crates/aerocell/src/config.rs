//! Simulator configuration: the JSON schema, built-in defaults, override
//! resolution (file < environment < command line), and validation.
//!
//! Overrides address fields by dotted path (`sim.seed`,
//! `scenario.base_stations.0.x_m`). Environment variables use the
//! `AEROCELL_` prefix with `__` standing in for the dot:
//! `AEROCELL_SIM__SEED=7`. Unknown keys are rejected, and an override must
//! keep the JSON type of the field it replaces.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use aerocell_core::atmosphere::{AtmoConstants, SitePosition};
use aerocell_core::battery::BatteryConfig;
use aerocell_core::plan::{Area, LinkBudgetParams, UavBaseStation, UavHardware};
use aerocell_core::power::{MimoConfig, RisConfig, UavAirframe};
use aerocell_core::pv::PvConfig;
use aerocell_core::sim::{NetworkModel, SimConfig, UePopulation};

use crate::AppError;

/// Ground position of one base station; hardware is shared fleet-wide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BsSite {
    pub x_m: f64,
    pub y_m: f64,
}

/// Deployment scenario: area, station sites, user population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub bounds: Area,
    pub base_stations: Vec<BsSite>,
    pub population: UePopulation,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        // eight stations on a 4x2 grid with 700 m pitch; every point of
        // the area reaches its nearest station at the lowest power level,
        // and the pitch keeps distant cells out of low-level reach so each
        // station carries its own neighborhood
        let mut base_stations = Vec::new();
        for &y in &[350.0, 1050.0] {
            for i in 0..4 {
                base_stations.push(BsSite {
                    x_m: 350.0 + 700.0 * f64::from(i),
                    y_m: y,
                });
            }
        }
        Self {
            bounds: Area {
                x_min_m: 0.0,
                y_min_m: 0.0,
                x_max_m: 2800.0,
                y_max_m: 1400.0,
            },
            base_stations,
            population: UePopulation::default(),
        }
    }
}

/// One synthetic season-day preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeasonPreset {
    pub label: String,
    pub day_of_year: u32,
    pub peak_irradiance_wm2: f64,
    pub day_temp_c: f64,
    pub night_temp_c: f64,
}

/// Synthetic clear-sky weather generation for the simulated days.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticWeatherConfig {
    /// Year used to anchor timestamps.
    pub year: i32,
    pub latitude_deg: f64,
    pub pressure_pa: f64,
    pub seasons: Vec<SeasonPreset>,
}

impl Default for SyntheticWeatherConfig {
    fn default() -> Self {
        Self {
            year: 2022,
            latitude_deg: 52.4,
            pressure_pa: 101_325.0,
            seasons: default_season_presets(),
        }
    }
}

/// Clear-sky presets for the four simulated days at the default site.
pub fn default_season_presets() -> Vec<SeasonPreset> {
    vec![
        SeasonPreset {
            label: "vernal_equinox".into(),
            day_of_year: 79,
            peak_irradiance_wm2: 640.0,
            day_temp_c: 10.0,
            night_temp_c: 2.0,
        },
        SeasonPreset {
            label: "summer_solstice".into(),
            day_of_year: 172,
            peak_irradiance_wm2: 840.0,
            day_temp_c: 24.0,
            night_temp_c: 14.0,
        },
        SeasonPreset {
            label: "autumn_equinox".into(),
            day_of_year: 266,
            peak_irradiance_wm2: 600.0,
            day_temp_c: 16.0,
            night_temp_c: 9.0,
        },
        SeasonPreset {
            label: "winter_solstice".into(),
            day_of_year: 355,
            peak_irradiance_wm2: 190.0,
            day_temp_c: 1.0,
            night_temp_c: -4.0,
        },
    ]
}

/// Weather CSV inputs, one file per simulated day.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CsvWeatherConfig {
    pub paths: Vec<String>,
    /// Season labels; file stems when omitted.
    pub labels: Option<Vec<String>>,
}

/// Where the driving weather comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WeatherConfig {
    Synthetic(SyntheticWeatherConfig),
    Csv(CsvWeatherConfig),
}

impl Default for WeatherConfig {
    fn default() -> Self {
        Self::Synthetic(SyntheticWeatherConfig::default())
    }
}

/// The complete simulator configuration.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioConfig,
    pub airframe: UavAirframe,
    pub mimo: MimoConfig,
    pub ris: RisConfig,
    pub pv: PvConfig,
    pub battery: BatteryConfig,
    pub link_budget: LinkBudgetParams,
    pub site: SitePosition,
    pub constants: AtmoConstants,
    pub sim: SimConfig,
    pub weather: WeatherConfig,
}

impl Config {
    /// Assembles the static network model the engine consumes.
    pub fn to_network_model(&self) -> NetworkModel {
        let hardware = UavHardware {
            airframe: self.airframe.clone(),
            mimo: self.mimo.clone(),
            ris: self.ris.clone(),
            pv: self.pv.clone(),
            battery: self.battery.clone(),
        };
        NetworkModel {
            bounds: self.scenario.bounds,
            base_stations: self
                .scenario
                .base_stations
                .iter()
                .map(|s| UavBaseStation {
                    x_m: s.x_m,
                    y_m: s.y_m,
                    hardware: hardware.clone(),
                })
                .collect(),
            population: self.scenario.population.clone(),
            link_budget: self.link_budget.clone(),
            site: self.site,
            constants: self.constants.clone(),
        }
    }

    /// Semantic checks beyond what deserialization enforces. Returns the
    /// list of violations, empty when the configuration is sound.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let b = &self.battery;
        if (b.unit_energy_wh - b.nominal_voltage_v * b.capacity_ah).abs() > 1e-9 {
            v.push(format!(
                "battery.unit_energy_wh {} must equal nominal_voltage_v * capacity_ah = {}",
                b.unit_energy_wh,
                b.nominal_voltage_v * b.capacity_ah
            ));
        }
        if !(0.0 < b.efficiency && b.efficiency <= 1.0) {
            v.push(format!(
                "battery.efficiency {} must be in (0, 1]",
                b.efficiency
            ));
        }
        if !(0.0 < b.primary_soc && b.primary_soc <= 1.0) {
            v.push(format!(
                "battery.primary_soc {} must be in (0, 1]",
                b.primary_soc
            ));
        }
        if !(0.0 < b.max_depth_of_discharge && b.max_depth_of_discharge <= 1.0) {
            v.push(format!(
                "battery.max_depth_of_discharge {} must be in (0, 1]",
                b.max_depth_of_discharge
            ));
        }
        if !(0.0..1.0).contains(&self.airframe.dc_loss_factor) {
            v.push(format!(
                "airframe.dc_loss_factor {} must be in [0, 1)",
                self.airframe.dc_loss_factor
            ));
        }
        if self.airframe.propeller_radius_m <= 0.0 {
            v.push("airframe.propeller_radius_m must be positive".into());
        }
        if self.airframe.propeller_count == 0 {
            v.push("airframe.propeller_count must be at least 1".into());
        }
        let m = &self.mimo;
        if !(0.0 < m.amplifier_efficiency && m.amplifier_efficiency <= 1.0) {
            v.push(format!(
                "mimo.amplifier_efficiency {} must be in (0, 1]",
                m.amplifier_efficiency
            ));
        }
        if m.compute_efficiency_gflops_w <= 0.0 {
            v.push("mimo.compute_efficiency_gflops_w must be positive".into());
        }
        if m.dl_duty + m.ul_duty > 1.0 + 1e-12 {
            v.push(format!(
                "mimo.dl_duty + mimo.ul_duty = {} must not exceed 1",
                m.dl_duty + m.ul_duty
            ));
        }
        if m.coherence_samples() < 1.0 {
            v.push(format!(
                "mimo coherence block of {} samples must hold at least one sample",
                m.coherence_samples()
            ));
        }
        let pv = &self.pv;
        if !(0.0 < pv.derating_factor && pv.derating_factor <= 1.0) {
            v.push(format!(
                "pv.derating_factor {} must be in (0, 1]",
                pv.derating_factor
            ));
        }
        let cover = pv.transmittance * pv.absorptance;
        if !(0.0 < cover && cover <= 1.0) {
            v.push(format!(
                "pv transmittance * absorptance = {cover} must be in (0, 1]"
            ));
        }
        if pv.module_width_m <= 0.0 || pv.module_height_m <= 0.0 {
            v.push("pv module dimensions must be positive".into());
        }
        let lb = &self.link_budget;
        if lb.tx_power_levels_dbm.is_empty() {
            v.push("link_budget.tx_power_levels_dbm must not be empty".into());
        }
        if lb.tx_power_levels_dbm.windows(2).any(|w| w[0] >= w[1]) {
            v.push("link_budget.tx_power_levels_dbm must be strictly ascending".into());
        }
        if lb.total_subcarriers == 0 || lb.used_subcarriers > lb.total_subcarriers {
            v.push("link_budget subcarrier configuration is inconsistent".into());
        }
        let sc = &self.scenario;
        if sc.bounds.width_m() <= 0.0 || sc.bounds.height_m() <= 0.0 {
            v.push("scenario.bounds must span a positive area".into());
        }
        if sc.base_stations.is_empty() {
            v.push("scenario.base_stations must not be empty".into());
        }
        for (i, s) in sc.base_stations.iter().enumerate() {
            if !sc.bounds.contains(s.x_m, s.y_m) {
                v.push(format!(
                    "scenario.base_stations.{i} lies outside the bounds"
                ));
            }
        }
        if self.sim.step_s == 0 || 86_400 % self.sim.step_s != 0 {
            v.push(format!("sim.step_s {} must divide 86400", self.sim.step_s));
        }
        if self.sim.runs == 0 {
            v.push("sim.runs must be at least 1".into());
        }
        if self.site.station_altitude_m < 0.0 || self.site.terrain_altitude_m < 0.0 {
            v.push("site altitudes must not be negative".into());
        }
        let c = &self.constants;
        for (name, value) in [
            ("dry_air_gas_constant", c.dry_air_gas_constant),
            ("vapor_gas_constant", c.vapor_gas_constant),
            ("universal_gas_constant", c.universal_gas_constant),
            ("air_molar_mass", c.air_molar_mass),
            ("sea_level_gravity", c.sea_level_gravity),
            ("earth_radius_m", c.earth_radius_m),
            ("lapse_rate_k_per_m", c.lapse_rate_k_per_m),
        ] {
            if value <= 0.0 {
                v.push(format!("constants.{name} must be strictly positive"));
            }
        }
        match &self.weather {
            WeatherConfig::Synthetic(s) => {
                if s.seasons.is_empty() {
                    v.push("weather.synthetic.seasons must not be empty".into());
                }
                for (i, p) in s.seasons.iter().enumerate() {
                    if p.day_of_year == 0 || p.day_of_year > 365 {
                        v.push(format!(
                            "weather.synthetic.seasons.{i}.day_of_year must be in 1..=365"
                        ));
                    }
                    if p.peak_irradiance_wm2 < 0.0 {
                        v.push(format!(
                            "weather.synthetic.seasons.{i}.peak_irradiance_wm2 must not be negative"
                        ));
                    }
                }
            }
            WeatherConfig::Csv(c) => {
                if c.paths.is_empty() {
                    v.push("weather.csv.paths must not be empty".into());
                }
                if let Some(labels) = &c.labels {
                    if labels.len() != c.paths.len() {
                        v.push("weather.csv.labels must match paths in length".into());
                    }
                }
            }
        }
        v
    }
}

/// One `key=value` override.
#[derive(Debug, Clone, PartialEq)]
pub struct Override {
    pub path: String,
    pub value: String,
}

impl Override {
    pub fn parse(spec: &str) -> Result<Self, AppError> {
        let (path, value) = spec
            .split_once('=')
            .ok_or_else(|| AppError::config(format!("override '{spec}' must be KEY=VALUE")))?;
        if path.is_empty() {
            return Err(AppError::config(format!(
                "override '{spec}' has an empty key"
            )));
        }
        Ok(Self {
            path: path.to_string(),
            value: value.to_string(),
        })
    }
}

/// Collects overrides from `AEROCELL_*` environment variables.
pub fn env_overrides(vars: impl Iterator<Item = (String, String)>) -> Vec<Override> {
    let mut out: Vec<Override> = vars
        .filter_map(|(k, value)| {
            let path = k.strip_prefix("AEROCELL_")?;
            Some(Override {
                path: path.to_lowercase().replace("__", "."),
                value,
            })
        })
        .collect();
    out.sort_by(|a, b| a.path.cmp(&b.path));
    out
}

fn parse_override_value(raw: &str, like: &Value, path: &str) -> Result<Value, AppError> {
    let mismatch =
        |want: &str| AppError::config(format!("override {path}: expected a {want}, got '{raw}'"));
    match like {
        Value::Number(n) if n.is_f64() => {
            let v: f64 = raw.parse().map_err(|_| mismatch("number"))?;
            serde_json::Number::from_f64(v)
                .map(Value::Number)
                .ok_or_else(|| mismatch("finite number"))
        }
        Value::Number(n) if n.is_u64() => raw
            .parse::<u64>()
            .map(|v| Value::Number(v.into()))
            .map_err(|_| mismatch("unsigned integer")),
        Value::Number(_) => raw
            .parse::<i64>()
            .map(|v| Value::Number(v.into()))
            .map_err(|_| mismatch("integer")),
        Value::Bool(_) => raw.parse().map(Value::Bool).map_err(|_| mismatch("bool")),
        Value::String(_) => Ok(Value::String(raw.to_string())),
        Value::Null => Ok(serde_json::from_str(raw).unwrap_or(Value::String(raw.to_string()))),
        Value::Array(_) | Value::Object(_) => Err(AppError::config(format!(
            "override {path} targets a composite value; set its fields instead"
        ))),
    }
}

/// Applies one dotted-path override onto a JSON tree, type-checked
/// against the existing value.
pub fn apply_override(root: &mut Value, ov: &Override) -> Result<(), AppError> {
    let mut cursor = &mut *root;
    for segment in ov.path.split('.') {
        cursor = match cursor {
            Value::Object(map) => map.get_mut(segment).ok_or_else(|| {
                AppError::config(format!("override {}: unknown key '{segment}'", ov.path))
            })?,
            Value::Array(items) => {
                let idx: usize = segment.parse().map_err(|_| {
                    AppError::config(format!(
                        "override {}: '{segment}' is not an array index",
                        ov.path
                    ))
                })?;
                items.get_mut(idx).ok_or_else(|| {
                    AppError::config(format!("override {}: index {idx} out of bounds", ov.path))
                })?
            }
            _ => {
                return Err(AppError::config(format!(
                    "override {}: '{segment}' descends into a scalar",
                    ov.path
                )))
            }
        };
    }
    *cursor = parse_override_value(&ov.value, cursor, &ov.path)?;
    Ok(())
}

/// Loads the configuration: file (or built-in defaults), then environment,
/// then command-line overrides.
pub fn load_config(
    path: Option<&Path>,
    env: &[Override],
    flags: &[Override],
) -> Result<Config, AppError> {
    let mut value = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| AppError::io(p, e))?;
            let v: Value = serde_json::from_str(&text)
                .map_err(|e| AppError::config(format!("{}: {e}", p.display())))?;
            // run it through the typed config once so unknown keys are
            // rejected with serde's field context
            let cfg: Config = serde_json::from_value(v)
                .map_err(|e| AppError::config(format!("{}: {e}", p.display())))?;
            serde_json::to_value(&cfg).expect("config serializes")
        }
        None => serde_json::to_value(Config::default()).expect("config serializes"),
    };
    for ov in env.iter().chain(flags) {
        apply_override(&mut value, ov)?;
    }
    let cfg: Config = serde_json::from_value(value).map_err(|e| AppError::config(e.to_string()))?;
    let violations = cfg.violations();
    if !violations.is_empty() {
        return Err(AppError::config(format!(
            "invalid configuration:\n  {}",
            violations.join("\n  ")
        )));
    }
    Ok(cfg)
}

/// Dotted paths whose values differ between two JSON trees.
pub fn diff_paths(a: &Value, b: &Value) -> Vec<String> {
    fn walk(prefix: &str, a: &Value, b: &Value, out: &mut Vec<String>) {
        match (a, b) {
            (Value::Object(ma), Value::Object(mb)) => {
                let mut keys: Vec<&String> = ma.keys().chain(mb.keys()).collect();
                keys.sort();
                keys.dedup();
                for k in keys {
                    let p = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    match (ma.get(k), mb.get(k)) {
                        (Some(va), Some(vb)) => walk(&p, va, vb, out),
                        _ => out.push(p),
                    }
                }
            }
            (Value::Array(xa), Value::Array(xb)) if xa.len() == xb.len() => {
                for (i, (va, vb)) in xa.iter().zip(xb).enumerate() {
                    walk(&format!("{prefix}.{i}"), va, vb, out);
                }
            }
            _ => {
                if a != b {
                    out.push(prefix.to_string());
                }
            }
        }
    }
    let mut out = Vec::new();
    walk("", a, b, &mut out);
    out
}
