//! PV output power with irradiance scaling and cell-temperature derating.
//!
//! The output model scales the rated power by the irradiance ratio and a
//! linear temperature correction around the STC cell temperature; the cell
//! temperature itself comes from the NOCT energy-balance form, which needs
//! the maximum-power-point efficiency and the cover transmittance and
//! absorptance.

use core::fmt;

use serde::{Deserialize, Serialize};

/// PV panel set configuration.
///
/// `temp_coefficient_per_c` is the power temperature coefficient in 1/°C
/// (a datasheet −0.5 %/°C is −0.005 here).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PvConfig {
    /// Panels connected in series.
    pub series_count: u32,
    /// Panels connected in parallel.
    pub parallel_count: u32,
    /// Mass of one panel, kg.
    pub unit_mass_kg: f64,
    /// Rated power of one panel at STC, W.
    pub rated_power_w: f64,
    /// Derating factor, in (0, 1].
    pub derating_factor: f64,
    /// Module width, m.
    pub module_width_m: f64,
    /// Module height, m.
    pub module_height_m: f64,
    /// Temperature coefficient of power, 1/°C (negative for silicon).
    pub temp_coefficient_per_c: f64,
    /// Irradiance at standard test conditions, W/m².
    pub stc_irradiance_wm2: f64,
    /// Cell temperature at standard test conditions, °C.
    pub stc_cell_temp_c: f64,
    /// Irradiance at which NOCT is defined, W/m².
    pub noct_irradiance_wm2: f64,
    /// Nominal operating cell temperature, °C.
    pub noct_cell_temp_c: f64,
    /// Ambient temperature at which NOCT is defined, °C.
    pub noct_ambient_temp_c: f64,
    /// Solar transmittance of the cover.
    pub transmittance: f64,
    /// Solar absorptance of the panel.
    pub absorptance: f64,
    /// Ground-relative altitude of the panels, m.
    pub altitude_m: f64,
}

impl Default for PvConfig {
    fn default() -> Self {
        Self {
            series_count: 1,
            parallel_count: 5,
            unit_mass_kg: 0.0,
            rated_power_w: 20.0,
            derating_factor: 0.723,
            module_width_m: 0.576,
            module_height_m: 0.357,
            temp_coefficient_per_c: -0.005,
            stc_irradiance_wm2: 1000.0,
            stc_cell_temp_c: 25.0,
            noct_irradiance_wm2: 800.0,
            noct_cell_temp_c: 47.0,
            noct_ambient_temp_c: 20.0,
            transmittance: 0.3 * 3.162_277_660_168_379_5, // 0.3 * sqrt(10)
            absorptance: 0.3 * 3.162_277_660_168_379_5,
            altitude_m: 50.0,
        }
    }
}

impl PvConfig {
    /// Total panel count: series times parallel.
    pub fn total_panels(&self) -> u32 {
        self.series_count * self.parallel_count
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PvError {
    /// Module dimensions must be positive for the efficiency quotient.
    NonPositiveArea { area_m2: f64 },
    /// The transmittance-absorptance product must be positive.
    NonPositiveCoverProduct { product: f64 },
    /// The cell-temperature denominator collapsed; the configuration is
    /// non-physical at this irradiance.
    DegenerateDenominator { denominator: f64 },
}

impl fmt::Display for PvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonPositiveArea { area_m2 } => {
                write!(f, "module area must be positive, got {area_m2} m2")
            }
            Self::NonPositiveCoverProduct { product } => {
                write!(f, "transmittance-absorptance product must be positive, got {product}")
            }
            Self::DegenerateDenominator { denominator } => write!(
                f,
                "cell-temperature denominator {denominator} is not positive; configuration is non-physical"
            ),
        }
    }
}

impl core::error::Error for PvError {}

/// Maximum-power-point efficiency at STC: rated power over module area
/// times STC irradiance.
pub fn mpp_efficiency(pv: &PvConfig) -> Result<f64, PvError> {
    let area = pv.module_width_m * pv.module_height_m;
    if area <= 0.0 {
        return Err(PvError::NonPositiveArea { area_m2: area });
    }
    Ok(pv.rated_power_w / (area * pv.stc_irradiance_wm2))
}

/// Cell temperature under irradiance `g_t` and ambient temperature `t_a`, °C.
///
/// NOCT energy balance solved for the cell temperature; at zero irradiance
/// the cell sits at ambient.
pub fn cell_temperature(g_t: f64, t_a: f64, pv: &PvConfig) -> Result<f64, PvError> {
    let cover = pv.transmittance * pv.absorptance;
    if cover <= 0.0 {
        return Err(PvError::NonPositiveCoverProduct { product: cover });
    }
    let mpp = mpp_efficiency(pv)?;
    let x = (pv.noct_cell_temp_c - pv.noct_ambient_temp_c) * (g_t / pv.noct_irradiance_wm2);
    let numerator =
        t_a + x * (1.0 - mpp * (1.0 - pv.temp_coefficient_per_c * pv.stc_cell_temp_c) / cover);
    let denominator = 1.0 + x * (pv.temp_coefficient_per_c * mpp / cover);
    if denominator <= 0.0 {
        return Err(PvError::DegenerateDenominator { denominator });
    }
    Ok(numerator / denominator)
}

/// Output power of the panel set at a forced cell temperature, W.
///
/// Clamped below at zero: at extreme cell temperatures the linear
/// correction bracket can go negative, and a panel does not consume power.
pub fn pv_power_at_cell_temp(g_t: f64, t_c: f64, pv: &PvConfig) -> f64 {
    let bracket = 1.0 + pv.temp_coefficient_per_c * (t_c - pv.stc_cell_temp_c);
    let raw = f64::from(pv.total_panels())
        * pv.rated_power_w
        * pv.derating_factor
        * (g_t / pv.stc_irradiance_wm2)
        * bracket;
    raw.max(0.0)
}

/// Output power of the panel set, W, deriving the cell temperature from
/// the ambient temperature at panel altitude.
pub fn pv_power(g_t: f64, t_a: f64, pv: &PvConfig) -> Result<f64, PvError> {
    let t_c = cell_temperature(g_t, t_a, pv)?;
    Ok(pv_power_at_cell_temp(g_t, t_c, pv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_cover_product_is_point_nine() {
        let pv = PvConfig::default();
        assert_relative_eq!(pv.transmittance * pv.absorptance, 0.9, epsilon = 1e-12);
    }

    #[test]
    fn mpp_efficiency_table_value() {
        let pv = PvConfig::default();
        assert_relative_eq!(mpp_efficiency(&pv).unwrap(), 0.09726, max_relative = 1e-4);
    }

    #[test]
    fn mpp_efficiency_scales_with_rated_power() {
        let pv = PvConfig::default();
        let doubled = PvConfig {
            rated_power_w: 40.0,
            ..pv.clone()
        };
        assert_relative_eq!(
            mpp_efficiency(&doubled).unwrap(),
            2.0 * mpp_efficiency(&pv).unwrap(),
            max_relative = 1e-12
        );
        let unit = PvConfig {
            rated_power_w: 200.0,
            module_width_m: 1.0,
            module_height_m: 1.0,
            ..pv
        };
        assert_relative_eq!(mpp_efficiency(&unit).unwrap(), 0.2, max_relative = 1e-12);
    }

    #[test]
    fn cell_sits_at_ambient_in_the_dark() {
        let pv = PvConfig::default();
        assert_eq!(cell_temperature(0.0, 13.7, &pv).unwrap(), 13.7);
    }

    #[test]
    fn cell_temperature_at_noct_conditions() {
        let pv = PvConfig::default();
        let t_c = cell_temperature(800.0, 20.0, &pv).unwrap();
        assert_relative_eq!(t_c, 44.37, max_relative = 1e-3);
    }

    #[test]
    fn cell_temperature_increasing_in_irradiance() {
        let pv = PvConfig::default();
        let mut prev = cell_temperature(0.0, 20.0, &pv).unwrap();
        for i in 1..=13 {
            let g = f64::from(i) * 100.0;
            let t = cell_temperature(g, 20.0, &pv).unwrap();
            assert!(t > prev, "cell must heat up with insolation");
            prev = t;
        }
    }

    #[test]
    fn dark_panel_produces_nothing() {
        let pv = PvConfig::default();
        assert_eq!(pv_power(0.0, 20.0, &pv).unwrap(), 0.0);
    }

    #[test]
    fn stc_output_with_forced_cell_temperature() {
        let pv = PvConfig::default();
        assert_relative_eq!(
            pv_power_at_cell_temp(1000.0, 25.0, &pv),
            72.3,
            max_relative = 1e-12
        );
    }

    #[test]
    fn full_sun_output_with_derived_cell_temperature() {
        let pv = PvConfig::default();
        let p = pv_power(1000.0, 20.0, &pv).unwrap();
        // cell temperature ~50 degC derates the 72.3 W STC output
        assert_relative_eq!(p, 63.1, max_relative = 5e-3);
        assert!(p < 72.3);
    }

    #[test]
    fn output_clamps_at_zero_for_extreme_cell_heat() {
        let pv = PvConfig::default();
        // +250 degC over STC pushes the linear bracket negative
        assert_eq!(pv_power_at_cell_temp(500.0, 300.0, &pv), 0.0);
    }

    #[test]
    fn output_is_continuous_and_bounded_by_irradiance_scaling() {
        let pv = PvConfig::default();
        let mut prev = pv_power(0.0, 20.0, &pv).unwrap();
        for i in 1..=130 {
            let g = f64::from(i) * 10.0;
            let p = pv_power(g, 20.0, &pv).unwrap();
            let cap = f64::from(pv.total_panels())
                * pv.rated_power_w
                * pv.derating_factor
                * (g / pv.stc_irradiance_wm2);
            // alpha < 0 and the cell above 25 degC keeps output under the cap
            let t_c = cell_temperature(g, 20.0, &pv).unwrap();
            if t_c > pv.stc_cell_temp_c {
                assert!(p <= cap + 1e-12);
            }
            // continuity in the crude sense of small steps producing small jumps
            assert!((p - prev).abs() < 2.0);
            prev = p;
        }
    }

    #[test]
    fn degenerate_configuration_is_reported() {
        let pv = PvConfig {
            temp_coefficient_per_c: -5.0,
            ..PvConfig::default()
        };
        assert!(matches!(
            cell_temperature(1300.0, 20.0, &pv),
            Err(PvError::DegenerateDenominator { .. })
        ));
    }
}
