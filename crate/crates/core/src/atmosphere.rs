//! Altitude- and weather-dependent atmospheric quantities.
//!
//! The hover-power model needs air density and gravitational acceleration
//! at the hover altitude; the PV model needs the ambient temperature there.
//! Everything is derived from a ground weather sample: the lapse-rate
//! temperature profile, the Magnus vapor-pressure formula, the barometric
//! pressure law, and the two-component (dry air + water vapor) density
//! equation.
//!
//! Units are SI throughout except temperatures, which are degrees Celsius
//! at the API boundary (converted to Kelvin internally where required).
//! The Magnus formula yields hPa and is converted to Pa immediately so the
//! density equation always receives pascals.

use core::fmt;

use serde::{Deserialize, Serialize};

use crate::weather::WeatherSample;

pub const CELSIUS_TO_KELVIN: f64 = 273.15;

/// Physical constants of the atmosphere model.
///
/// Defaults are the values used throughout the simulator; override only
/// for sensitivity experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AtmoConstants {
    /// Specific gas constant of dry air, J/(kg·K).
    pub dry_air_gas_constant: f64,
    /// Specific gas constant of water vapor, J/(kg·K).
    pub vapor_gas_constant: f64,
    /// Universal gas constant, N·m/(mol·K).
    pub universal_gas_constant: f64,
    /// Molar mass of air, kg/mol.
    pub air_molar_mass: f64,
    /// Gravitational acceleration at sea level, m/s².
    pub sea_level_gravity: f64,
    /// Mean radius of the Earth, m.
    pub earth_radius_m: f64,
    /// Reference altitude of the pressure input, m (sea level).
    pub reference_altitude_m: f64,
    /// Tropospheric temperature lapse rate, K/m.
    pub lapse_rate_k_per_m: f64,
}

impl Default for AtmoConstants {
    fn default() -> Self {
        Self {
            dry_air_gas_constant: 287.058,
            vapor_gas_constant: 461.495,
            universal_gas_constant: 8.31432,
            air_molar_mass: 0.0289644,
            sea_level_gravity: 9.80665,
            earth_radius_m: 6_371_009.0,
            reference_altitude_m: 0.0,
            lapse_rate_k_per_m: 0.0065,
        }
    }
}

/// Absolute altitudes anchoring ground-relative heights to sea level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SitePosition {
    /// Absolute altitude of the terrain under the UAVs, m.
    pub terrain_altitude_m: f64,
    /// Absolute altitude of the weather station, m.
    pub station_altitude_m: f64,
}

impl Default for SitePosition {
    fn default() -> Self {
        Self {
            terrain_altitude_m: 54.44,
            station_altitude_m: 90.0,
        }
    }
}

/// Atmospheric state at one altitude and time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtmosphereState {
    /// Ambient temperature at the target altitude, °C.
    pub temperature_c: f64,
    /// Total air pressure, Pa.
    pub pressure_pa: f64,
    /// Water-vapor partial pressure, Pa.
    pub vapor_pressure_pa: f64,
    /// Dry-air partial pressure, Pa. Always `pressure_pa - vapor_pressure_pa`.
    pub dry_pressure_pa: f64,
    /// Air density, kg/m³.
    pub density_kg_m3: f64,
    /// Gravitational acceleration, m/s².
    pub gravity_m_s2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AtmosphereError {
    /// Temperature at or below the Magnus-formula singularity (−237.3 °C).
    TemperatureOutOfDomain { temperature_c: f64 },
    /// Non-positive absolute temperature fed to the pressure law.
    NonPositiveKelvin { temperature_k: f64 },
    /// Vapor pressure exceeds total pressure; the weather input is inconsistent.
    VaporExceedsTotal { vapor_pa: f64, total_pa: f64 },
    /// Non-positive air density.
    NonPositiveDensity { density: f64 },
}

impl fmt::Display for AtmosphereError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TemperatureOutOfDomain { temperature_c } => write!(
                f,
                "temperature {temperature_c} degC is outside the vapor-pressure domain (> -237.3 degC)"
            ),
            Self::NonPositiveKelvin { temperature_k } => {
                write!(f, "absolute temperature must be positive, got {temperature_k} K")
            }
            Self::VaporExceedsTotal { vapor_pa, total_pa } => write!(
                f,
                "vapor pressure {vapor_pa} Pa exceeds total pressure {total_pa} Pa"
            ),
            Self::NonPositiveDensity { density } => {
                write!(f, "air density must be positive, got {density} kg/m3")
            }
        }
    }
}

impl core::error::Error for AtmosphereError {}

/// Gravitational acceleration at a ground-relative altitude.
///
/// Uses the inverse-square falloff from the Earth's mean radius; the site
/// terrain offset is added so `h` is measured from the ground.
pub fn gravity_at(altitude_m: f64, site: &SitePosition, c: &AtmoConstants) -> f64 {
    let h_abs = altitude_m + site.terrain_altitude_m;
    let ratio = c.earth_radius_m / (c.earth_radius_m + h_abs);
    c.sea_level_gravity * ratio * ratio
}

/// Ambient temperature at a ground-relative altitude, °C.
///
/// Linear lapse from the weather-station measurement; the offset is the
/// absolute-altitude difference between the target and the station.
pub fn temperature_at(
    station_temp_c: f64,
    altitude_m: f64,
    site: &SitePosition,
    c: &AtmoConstants,
) -> f64 {
    station_temp_c
        - c.lapse_rate_k_per_m * (altitude_m + site.terrain_altitude_m - site.station_altitude_m)
}

/// Saturation water-vapor pressure (Magnus formula), Pa.
///
/// The underlying fit is in hPa; the result is converted to Pa here so no
/// caller ever sees hectopascals.
pub fn vapor_pressure(temperature_c: f64) -> Result<f64, AtmosphereError> {
    if temperature_c <= -237.3 {
        return Err(AtmosphereError::TemperatureOutOfDomain { temperature_c });
    }
    let exponent = 7.5 * temperature_c / (temperature_c + 237.3);
    Ok(6.1078 * libm::pow(10.0, exponent) * 100.0)
}

/// Air pressure at a ground-relative altitude, Pa.
///
/// Barometric law anchored at the reference-level pressure `p0`; gravity is
/// evaluated at the target altitude and the temperature argument is the
/// ambient Kelvin temperature there.
pub fn pressure_at(
    reference_pressure_pa: f64,
    altitude_m: f64,
    temperature_k: f64,
    site: &SitePosition,
    c: &AtmoConstants,
) -> Result<f64, AtmosphereError> {
    if temperature_k <= 0.0 {
        return Err(AtmosphereError::NonPositiveKelvin { temperature_k });
    }
    let g = gravity_at(altitude_m, site, c);
    let rise = altitude_m + site.terrain_altitude_m - c.reference_altitude_m;
    let exponent = -g * c.air_molar_mass * rise / (c.universal_gas_constant * temperature_k);
    Ok(reference_pressure_pa * libm::exp(exponent))
}

/// Air density from total pressure and temperature, kg/m³.
///
/// Two-component sum of dry air and water vapor; the split is
/// `p_d = p - p_v(T)` with the vapor pressure from the Magnus formula.
pub fn air_density(
    pressure_pa: f64,
    temperature_c: f64,
    c: &AtmoConstants,
) -> Result<f64, AtmosphereError> {
    let p_v = vapor_pressure(temperature_c)?;
    if p_v > pressure_pa {
        return Err(AtmosphereError::VaporExceedsTotal {
            vapor_pa: p_v,
            total_pa: pressure_pa,
        });
    }
    let p_d = pressure_pa - p_v;
    let t_k = temperature_c + CELSIUS_TO_KELVIN;
    if t_k <= 0.0 {
        return Err(AtmosphereError::NonPositiveKelvin { temperature_k: t_k });
    }
    Ok(p_d / (c.dry_air_gas_constant * t_k) + p_v / (c.vapor_gas_constant * t_k))
}

/// Full atmospheric state at a ground-relative altitude for one weather sample.
pub fn atmosphere_state(
    sample: &WeatherSample,
    altitude_m: f64,
    site: &SitePosition,
    c: &AtmoConstants,
) -> Result<AtmosphereState, AtmosphereError> {
    let temperature_c = temperature_at(sample.temperature_c, altitude_m, site, c);
    let vapor_pa = vapor_pressure(temperature_c)?;
    let pressure_pa = pressure_at(
        sample.pressure_pa,
        altitude_m,
        temperature_c + CELSIUS_TO_KELVIN,
        site,
        c,
    )?;
    if vapor_pa > pressure_pa {
        return Err(AtmosphereError::VaporExceedsTotal {
            vapor_pa,
            total_pa: pressure_pa,
        });
    }
    let density = air_density(pressure_pa, temperature_c, c)?;
    if density <= 0.0 {
        return Err(AtmosphereError::NonPositiveDensity { density });
    }
    // store p as the recomposed sum so p_d + p_v == p holds bit-exactly
    let dry_pa = pressure_pa - vapor_pa;
    Ok(AtmosphereState {
        temperature_c,
        pressure_pa: dry_pa + vapor_pa,
        vapor_pressure_pa: vapor_pa,
        dry_pressure_pa: dry_pa,
        density_kg_m3: density,
        gravity_m_s2: gravity_at(altitude_m, site, c),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand_core::RngCore;

    fn sea_level_site() -> SitePosition {
        SitePosition {
            terrain_altitude_m: 0.0,
            station_altitude_m: 0.0,
        }
    }

    fn test_rng() -> rand_chacha::ChaCha8Rng {
        use rand_core::SeedableRng;
        rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed)
    }

    fn uniform(rng: &mut impl RngCore, lo: f64, hi: f64) -> f64 {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        lo + u * (hi - lo)
    }

    #[test]
    fn gravity_is_g0_at_sea_level() {
        let c = AtmoConstants::default();
        assert_eq!(gravity_at(0.0, &sea_level_site(), &c), 9.80665);
    }

    #[test]
    fn gravity_at_hover_altitude_over_site() {
        let c = AtmoConstants::default();
        let site = SitePosition::default();
        // absolute altitude 50 + 54.44 = 104.44 m
        assert_relative_eq!(gravity_at(50.0, &site, &c), 9.80633, max_relative = 1e-5);
    }

    #[test]
    fn gravity_quarters_at_double_radius() {
        let c = AtmoConstants::default();
        let g = gravity_at(c.earth_radius_m, &sea_level_site(), &c);
        assert_relative_eq!(g, c.sea_level_gravity / 4.0, max_relative = 1e-12);
    }

    #[test]
    fn gravity_strictly_decreasing_in_altitude() {
        let c = AtmoConstants::default();
        let site = SitePosition::default();
        let mut prev = gravity_at(0.0, &site, &c);
        for i in 1..=100 {
            let g = gravity_at(f64::from(i) * 100.0, &site, &c);
            assert!(g < prev, "gravity must decrease with altitude");
            prev = g;
        }
    }

    #[test]
    fn temperature_unchanged_at_station_altitude() {
        let c = AtmoConstants::default();
        let site = SitePosition {
            terrain_altitude_m: 40.0,
            station_altitude_m: 90.0,
        };
        assert_eq!(temperature_at(12.5, 50.0, &site, &c), 12.5);
    }

    #[test]
    fn temperature_lapse_example() {
        let c = AtmoConstants::default();
        let site = SitePosition::default();
        assert_relative_eq!(
            temperature_at(10.0, 50.0, &site, &c),
            9.90614,
            max_relative = 1e-9
        );
    }

    #[test]
    fn temperature_drops_six_and_a_half_degrees_per_km() {
        let c = AtmoConstants::default();
        let site = sea_level_site();
        assert_abs_diff_eq!(
            temperature_at(15.0, 1000.0, &site, &c),
            15.0 - 6.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn vapor_pressure_at_zero_celsius() {
        assert_relative_eq!(vapor_pressure(0.0).unwrap(), 610.78, max_relative = 1e-12);
    }

    #[test]
    fn vapor_pressure_hand_values() {
        assert_relative_eq!(vapor_pressure(20.0).unwrap(), 2338.1, max_relative = 1e-3);
        assert_relative_eq!(vapor_pressure(15.0).unwrap(), 1705.3, max_relative = 1e-3);
    }

    #[test]
    fn vapor_pressure_monotone_and_bounded_domain() {
        let mut prev = vapor_pressure(-60.0).unwrap();
        for i in 1..=120 {
            let t = -60.0 + f64::from(i);
            let p = vapor_pressure(t).unwrap();
            assert!(p > prev);
            prev = p;
        }
        assert!(vapor_pressure(-237.3).is_err());
        assert!(vapor_pressure(-250.0).is_err());
    }

    #[test]
    fn pressure_identity_at_reference_level() {
        let c = AtmoConstants::default();
        let site = sea_level_site();
        let p = pressure_at(101_325.0, 0.0, 288.15, &site, &c).unwrap();
        assert_eq!(p, 101_325.0);
    }

    #[test]
    fn pressure_hand_value_at_uav_altitude() {
        let c = AtmoConstants::default();
        let site = SitePosition::default();
        let p = pressure_at(101_325.0, 50.0, 288.15, &site, &c).unwrap();
        assert_relative_eq!(p, 100_078.0, max_relative = 1e-4);
    }

    #[test]
    fn pressure_attenuation_squares_when_rise_doubles() {
        // With gravity held fixed the barometric factor is exponential in
        // the rise, so doubling the rise squares the attenuation. An
        // effectively infinite Earth radius pins gravity at g0.
        let c = AtmoConstants {
            earth_radius_m: 1.0e18,
            ..AtmoConstants::default()
        };
        let site = sea_level_site();
        let p0 = 101_325.0;
        let f1 = pressure_at(p0, 400.0, 288.15, &site, &c).unwrap() / p0;
        let f2 = pressure_at(p0, 800.0, 288.15, &site, &c).unwrap() / p0;
        assert_relative_eq!(f2, f1 * f1, max_relative = 1e-12);
    }

    #[test]
    fn pressure_rejects_non_positive_temperature() {
        let c = AtmoConstants::default();
        assert!(pressure_at(101_325.0, 50.0, 0.0, &sea_level_site(), &c).is_err());
        assert!(pressure_at(101_325.0, 50.0, -10.0, &sea_level_site(), &c).is_err());
    }

    #[test]
    fn density_hand_values() {
        let c = AtmoConstants::default();
        assert_relative_eq!(
            air_density(101_325.0, 15.0, &c).unwrap(),
            1.21713,
            max_relative = 1e-4
        );
    }

    #[test]
    fn density_dry_air_limit() {
        // At very low temperature the vapor term is negligible; compare the
        // full computation against the single dry term at 15 degC by removing
        // the vapor contribution explicitly.
        let c = AtmoConstants::default();
        let p = 101_325.0;
        let t = 15.0;
        let p_v = vapor_pressure(t).unwrap();
        let dry_only = p / (c.dry_air_gas_constant * (t + CELSIUS_TO_KELVIN));
        assert_relative_eq!(dry_only, 1.22493, max_relative = 1e-4);
        let full = air_density(p, t, &c).unwrap();
        let vapor_term = p_v / (c.vapor_gas_constant * (t + CELSIUS_TO_KELVIN));
        let dry_term = (p - p_v) / (c.dry_air_gas_constant * (t + CELSIUS_TO_KELVIN));
        assert_relative_eq!(full, dry_term + vapor_term, max_relative = 1e-15);
    }

    #[test]
    fn density_decreasing_in_temperature() {
        let c = AtmoConstants::default();
        let mut prev = air_density(101_325.0, -20.0, &c).unwrap();
        for i in 1..=60 {
            let t = -20.0 + f64::from(i);
            let d = air_density(101_325.0, t, &c).unwrap();
            assert!(d < prev, "density must fall as temperature rises");
            prev = d;
        }
    }

    #[test]
    fn density_rejects_vapor_above_total() {
        let c = AtmoConstants::default();
        // 40 degC vapor pressure is ~7.4 kPa; a 5 kPa total is inconsistent.
        let err = air_density(5_000.0, 40.0, &c).unwrap_err();
        assert!(matches!(err, AtmosphereError::VaporExceedsTotal { .. }));
    }

    #[test]
    fn density_matches_two_term_oracle_on_random_inputs() {
        let c = AtmoConstants::default();
        let mut rng = test_rng();
        for _ in 0..1000 {
            let p = uniform(&mut rng, 80_000.0, 110_000.0);
            let t = uniform(&mut rng, -40.0, 45.0);
            let got = air_density(p, t, &c).unwrap();
            let p_v = 6.1078 * libm::pow(10.0, 7.5 * t / (t + 237.3)) * 100.0;
            let want = (p - p_v) / (287.058 * (t + 273.15)) + p_v / (461.495 * (t + 273.15));
            assert_relative_eq!(got, want, max_relative = 1e-9);
        }
    }

    #[test]
    fn state_partial_pressures_sum_exactly() {
        let c = AtmoConstants::default();
        let site = SitePosition::default();
        let mut rng = test_rng();
        for _ in 0..1000 {
            let sample = WeatherSample {
                unix_s: 0,
                temperature_c: uniform(&mut rng, -30.0, 40.0),
                pressure_pa: uniform(&mut rng, 85_000.0, 108_000.0),
                irradiance_wm2: 0.0,
            };
            let st = atmosphere_state(&sample, 50.0, &site, &c).unwrap();
            assert_eq!(st.dry_pressure_pa + st.vapor_pressure_pa, st.pressure_pa);
        }
    }

    #[test]
    fn state_on_a_standard_day() {
        let c = AtmoConstants::default();
        let site = SitePosition::default();
        let sample = WeatherSample {
            unix_s: 0,
            temperature_c: 15.0,
            pressure_pa: 101_325.0,
            irradiance_wm2: 0.0,
        };
        let st = atmosphere_state(&sample, 50.0, &site, &c).unwrap();
        assert!(st.density_kg_m3 > 1.15 && st.density_kg_m3 < 1.25);
        assert!(st.gravity_m_s2 > 9.7 && st.gravity_m_s2 <= 9.81);
    }

    #[test]
    fn higher_altitude_means_lower_pressure_and_temperature() {
        let c = AtmoConstants::default();
        let site = SitePosition::default();
        let sample = WeatherSample {
            unix_s: 0,
            temperature_c: 15.0,
            pressure_pa: 101_325.0,
            irradiance_wm2: 0.0,
        };
        let low = atmosphere_state(&sample, 50.0, &site, &c).unwrap();
        let high = atmosphere_state(&sample, 500.0, &site, &c).unwrap();
        assert!(high.pressure_pa < low.pressure_pa);
        assert!(high.temperature_c < low.temperature_c);
    }

    #[test]
    fn winter_air_is_denser_than_summer_air() {
        let c = AtmoConstants::default();
        let site = SitePosition::default();
        let winter = WeatherSample {
            unix_s: 0,
            temperature_c: -5.0,
            pressure_pa: 101_325.0,
            irradiance_wm2: 0.0,
        };
        let summer = WeatherSample {
            unix_s: 0,
            temperature_c: 30.0,
            ..winter
        };
        let w = atmosphere_state(&winter, 50.0, &site, &c).unwrap();
        let s = atmosphere_state(&summer, 50.0, &site, &c).unwrap();
        assert!(w.density_kg_m3 > s.density_kg_m3);
    }
}
