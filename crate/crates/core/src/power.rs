//! Per-time-step power consumption of a UAV base station.
//!
//! Three loads are modeled: the hover thrust power of the airframe
//! (momentum-theory rotor model), the phase shifters of the RIS array, and
//! the massive-MIMO transceiver (circuit power plus amplifier draw). The DC
//! supply loss is applied once over the summed load.

use core::fmt;

use serde::{Deserialize, Serialize};

use crate::atmosphere::AtmosphereState;
use crate::pv::PvConfig;

/// Airframe and supply parameters of one UAV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UavAirframe {
    /// Bare airframe mass, kg.
    pub mass_kg: f64,
    /// Auxiliary package mass, kg.
    pub aux_mass_kg: f64,
    /// Constant auxiliary power draw, W.
    pub aux_power_w: f64,
    /// Radius of a single propeller, m.
    pub propeller_radius_m: f64,
    /// Number of propellers.
    pub propeller_count: u32,
    /// Hover altitude above ground, m.
    pub hover_altitude_m: f64,
    /// DC supply loss factor, in [0, 1).
    pub dc_loss_factor: f64,
}

impl Default for UavAirframe {
    fn default() -> Self {
        Self {
            mass_kg: 2.0,
            aux_mass_kg: 0.0,
            aux_power_w: 0.0,
            propeller_radius_m: 0.5,
            propeller_count: 12,
            hover_altitude_m: 50.0,
            dc_loss_factor: 0.075,
        }
    }
}

/// MIMO transceiver hardware and frame configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MimoConfig {
    /// Number of transceivers per UAV.
    pub count: u32,
    /// Mass of one transceiver, kg.
    pub unit_mass_kg: f64,
    /// Total antenna elements available per transceiver.
    pub max_antennas: u32,
    /// Fixed power of an active cell, W.
    pub fixed_power_w: f64,
    /// Circuit power per active antenna chain, W.
    pub chain_power_w: f64,
    /// Local-oscillator power, W. Only added when `include_oscillator` is set.
    pub oscillator_power_w: f64,
    /// Adds the local-oscillator term to the circuit power once per transceiver.
    pub include_oscillator: bool,
    /// Encoding power, W per Gbit/s of downlink traffic.
    pub coding_power_w_per_gbps: f64,
    /// Decoding power, W per Gbit/s of uplink traffic.
    pub decoding_power_w_per_gbps: f64,
    /// Backhaul power, W per Gbit/s of total traffic.
    pub backhaul_power_w_per_gbps: f64,
    /// Power amplifier efficiency, in (0, 1].
    pub amplifier_efficiency: f64,
    /// Computational efficiency, Gflops/W.
    pub compute_efficiency_gflops_w: f64,
    /// Channel bandwidth, Hz.
    pub bandwidth_hz: f64,
    /// Coherence bandwidth, Hz.
    pub coherence_bandwidth_hz: f64,
    /// Coherence time, s.
    pub coherence_time_s: f64,
    /// Pilot reuse factor.
    pub pilot_reuse_factor: f64,
    /// Downlink share of the TDD frame, fraction.
    pub dl_duty: f64,
    /// Uplink share of the TDD frame, fraction.
    pub ul_duty: f64,
}

impl Default for MimoConfig {
    fn default() -> Self {
        Self {
            count: 1,
            unit_mass_kg: 1.0,
            max_antennas: 64,
            fixed_power_w: 10.0,
            chain_power_w: 0.4,
            oscillator_power_w: 0.2,
            include_oscillator: false,
            coding_power_w_per_gbps: 0.1,
            decoding_power_w_per_gbps: 0.8,
            backhaul_power_w_per_gbps: 0.25,
            amplifier_efficiency: 0.35,
            compute_efficiency_gflops_w: 75.0,
            bandwidth_hz: 120.0e6,
            coherence_bandwidth_hz: 1.0e6,
            coherence_time_s: 0.05,
            pilot_reuse_factor: 1.0,
            dl_duty: 0.75,
            ul_duty: 0.25,
        }
    }
}

impl MimoConfig {
    /// Samples per coherence block.
    pub fn coherence_samples(&self) -> f64 {
        self.coherence_bandwidth_hz * self.coherence_time_s
    }

    /// Computational efficiency in flops/W.
    fn compute_efficiency_flops_w(&self) -> f64 {
        self.compute_efficiency_gflops_w * 1.0e9
    }
}

/// Unit interpretation of the configured phase-shifter power value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerUnit {
    /// Value is in watts.
    W,
    /// Value is in milliwatts.
    Mw,
}

/// RIS array configuration. The arrays are passive reflectors; only the
/// phase-shifter supply power enters the energy balance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RisConfig {
    /// Number of RIS arrays per UAV.
    pub count: u32,
    /// Mass of one array, kg.
    pub unit_mass_kg: f64,
    /// Reflecting elements per array.
    pub elements_per_array: u32,
    /// Supply power of one phase shifter, in `phase_shifter_unit`s.
    /// The value is the one resolved for the configured bit resolution.
    pub phase_shifter_power: f64,
    /// Unit the `phase_shifter_power` value is expressed in.
    pub phase_shifter_unit: PowerUnit,
    /// Phase shifter resolution, bits. Configuration metadata.
    pub phase_shifter_bits: u32,
}

impl Default for RisConfig {
    fn default() -> Self {
        Self {
            count: 1,
            unit_mass_kg: 1.0,
            elements_per_array: 16,
            phase_shifter_power: 7.8,
            phase_shifter_unit: PowerUnit::W,
            phase_shifter_bits: 6,
        }
    }
}

impl RisConfig {
    /// Per-shifter power in watts under the configured unit reading.
    pub fn shifter_power_w(&self) -> f64 {
        match self.phase_shifter_unit {
            PowerUnit::W => self.phase_shifter_power,
            PowerUnit::Mw => self.phase_shifter_power * 1.0e-3,
        }
    }
}

/// Traffic and radio load of one cell at one time step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellLoad {
    /// Served users.
    pub users: u32,
    /// Active antenna elements.
    pub active_antennas: u32,
    /// Radiated transmit power of the array, W.
    pub transmit_power_w: f64,
    /// Downlink traffic, Gbit/s.
    pub dl_traffic_gbps: f64,
    /// Uplink traffic, Gbit/s.
    pub ul_traffic_gbps: f64,
}

impl CellLoad {
    /// Load of a powered-down cell.
    pub fn idle() -> Self {
        Self {
            users: 0,
            active_antennas: 0,
            transmit_power_w: 0.0,
            dl_traffic_gbps: 0.0,
            ul_traffic_gbps: 0.0,
        }
    }
}

/// Per-step power split of one UAV base station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBreakdown {
    pub hover_w: f64,
    pub ris_w: f64,
    pub mimo_circuit_w: f64,
    pub mimo_amplifier_w: f64,
    pub aux_w: f64,
    /// Total draw on the DC supply including the loss factor.
    pub total_dc_w: f64,
    /// PV production, W. Zero until the harvest model fills it in.
    pub pv_w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PowerError {
    /// Air density must be positive for the rotor model.
    NonPositiveDensity { density: f64 },
    /// Pilot samples exceed the coherence block.
    OverPilotedCell {
        pilot_samples: f64,
        coherence_samples: f64,
    },
    /// Amplifier efficiency must be positive.
    NonPositiveEfficiency { efficiency: f64 },
    /// DC loss factor must stay below 1.
    InvalidDcLoss { loss: f64 },
}

impl fmt::Display for PowerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonPositiveDensity { density } => {
                write!(f, "air density must be positive, got {density}")
            }
            Self::OverPilotedCell {
                pilot_samples,
                coherence_samples,
            } => write!(
                f,
                "pilot samples {pilot_samples} exceed the coherence block of {coherence_samples}"
            ),
            Self::NonPositiveEfficiency { efficiency } => {
                write!(f, "amplifier efficiency must be positive, got {efficiency}")
            }
            Self::InvalidDcLoss { loss } => {
                write!(f, "DC loss factor must lie in [0, 1), got {loss}")
            }
        }
    }
}

impl core::error::Error for PowerError {}

/// Mass of the package lifted by the airframe: transceivers, RIS arrays,
/// PV panels, and the auxiliary payload.
pub fn package_mass(
    mimo: &MimoConfig,
    ris: &RisConfig,
    pv: &PvConfig,
    airframe: &UavAirframe,
) -> f64 {
    f64::from(mimo.count) * mimo.unit_mass_kg
        + f64::from(ris.count) * ris.unit_mass_kg
        + f64::from(pv.total_panels()) * pv.unit_mass_kg
        + airframe.aux_mass_kg
}

/// Hover power of the UAV, W.
///
/// Momentum-theory rotor model: thrust power grows with total mass to the
/// 3/2 and falls with the square root of air density.
pub fn uav_hover_power(
    airframe: &UavAirframe,
    package_mass_kg: f64,
    atmo: &AtmosphereState,
) -> Result<f64, PowerError> {
    if atmo.density_kg_m3 <= 0.0 {
        return Err(PowerError::NonPositiveDensity {
            density: atmo.density_kg_m3,
        });
    }
    let weight = (airframe.mass_kg + package_mass_kg) * atmo.gravity_m_s2;
    let disk = 2.0
        * core::f64::consts::PI
        * airframe.propeller_radius_m
        * airframe.propeller_radius_m
        * f64::from(airframe.propeller_count)
        * atmo.density_kg_m3;
    Ok(libm::sqrt(weight * weight * weight / disk))
}

/// Supply power of the RIS phase shifters, W.
pub fn ris_power(ris: &RisConfig) -> f64 {
    f64::from(ris.count) * f64::from(ris.elements_per_array) * ris.shifter_power_w()
}

/// Samples allocated to pilots per coherence block.
pub fn pilot_samples(load: &CellLoad, mimo: &MimoConfig) -> f64 {
    mimo.pilot_reuse_factor * f64::from(load.users)
}

/// Circuit power of one transceiver, W.
///
/// Sum of the fixed draw, the per-chain circuit power, MMSE channel
/// estimation, coding/decoding, backhaul, and MMSE signal processing. Data
/// samples are split between downlink and uplink by the configured TDD
/// duty cycles over what remains of the coherence block after pilots.
pub fn mimo_circuit_power(load: &CellLoad, mimo: &MimoConfig) -> Result<f64, PowerError> {
    let tau_c = mimo.coherence_samples();
    let tau_p = pilot_samples(load, mimo);
    if tau_p > tau_c {
        return Err(PowerError::OverPilotedCell {
            pilot_samples: tau_p,
            coherence_samples: tau_c,
        });
    }
    let m = f64::from(load.active_antennas);
    let k = f64::from(load.users);
    let tau_d = mimo.dl_duty * (tau_c - tau_p);
    let tau_u = mimo.ul_duty * (tau_c - tau_p);
    let flops_scale = 3.0 * mimo.bandwidth_hz / (tau_c * mimo.compute_efficiency_flops_w());

    let chains = m * mimo.chain_power_w;
    let estimation = flops_scale * k * (m * tau_p + m * m);
    let coding = mimo.coding_power_w_per_gbps * load.dl_traffic_gbps
        + mimo.decoding_power_w_per_gbps * load.ul_traffic_gbps;
    let backhaul = mimo.backhaul_power_w_per_gbps * (load.dl_traffic_gbps + load.ul_traffic_gbps);
    let processing = flops_scale
        * (m * k * (tau_u + tau_d)
            + (3.0 * m * m + m) * k / 2.0
            + m * m * m / 3.0
            + 2.0 * m
            + m * tau_p * (tau_p - k)
            + m * k);
    let oscillator = if mimo.include_oscillator {
        mimo.oscillator_power_w
    } else {
        0.0
    };

    Ok(mimo.fixed_power_w + chains + estimation + coding + backhaul + processing + oscillator)
}

/// Total transceiver power including the amplifier, W, across all
/// transceivers of the UAV.
pub fn mimo_power(load: &CellLoad, mimo: &MimoConfig) -> Result<f64, PowerError> {
    if mimo.amplifier_efficiency <= 0.0 {
        return Err(PowerError::NonPositiveEfficiency {
            efficiency: mimo.amplifier_efficiency,
        });
    }
    let circuit = mimo_circuit_power(load, mimo)?;
    let amplifier = load.transmit_power_w / mimo.amplifier_efficiency;
    Ok(f64::from(mimo.count) * (circuit + amplifier))
}

/// Full consumption breakdown of one UAV base station at one step.
///
/// A cell with no active antenna elements is treated as powered down and
/// contributes no transceiver draw. The PV field is left at zero; the
/// simulation engine fills it in when harvesting is enabled.
pub fn total_consumption(
    airframe: &UavAirframe,
    mimo: &MimoConfig,
    ris: &RisConfig,
    pv: &PvConfig,
    load: &CellLoad,
    atmo: &AtmosphereState,
) -> Result<PowerBreakdown, PowerError> {
    if !(0.0..1.0).contains(&airframe.dc_loss_factor) {
        return Err(PowerError::InvalidDcLoss {
            loss: airframe.dc_loss_factor,
        });
    }
    let pkg = package_mass(mimo, ris, pv, airframe);
    let hover_w = uav_hover_power(airframe, pkg, atmo)?;
    let ris_w = ris_power(ris);
    let (mimo_circuit_w, mimo_amplifier_w) = if load.active_antennas == 0 {
        (0.0, 0.0)
    } else {
        if mimo.amplifier_efficiency <= 0.0 {
            return Err(PowerError::NonPositiveEfficiency {
                efficiency: mimo.amplifier_efficiency,
            });
        }
        let circuit = f64::from(mimo.count) * mimo_circuit_power(load, mimo)?;
        let amplifier = f64::from(mimo.count) * load.transmit_power_w / mimo.amplifier_efficiency;
        (circuit, amplifier)
    };
    let aux_w = airframe.aux_power_w;
    let summed = hover_w + ris_w + mimo_circuit_w + mimo_amplifier_w + aux_w;
    Ok(PowerBreakdown {
        hover_w,
        ris_w,
        mimo_circuit_w,
        mimo_amplifier_w,
        aux_w,
        total_dc_w: summed / (1.0 - airframe.dc_loss_factor),
        pv_w: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atmosphere::AtmosphereState;
    use approx::assert_relative_eq;
    use rand_core::{RngCore, SeedableRng};

    fn still_air(density: f64, gravity: f64) -> AtmosphereState {
        AtmosphereState {
            temperature_c: 15.0,
            pressure_pa: 101_325.0,
            vapor_pressure_pa: 0.0,
            dry_pressure_pa: 101_325.0,
            density_kg_m3: density,
            gravity_m_s2: gravity,
        }
    }

    fn uniform(rng: &mut impl RngCore, lo: f64, hi: f64) -> f64 {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        lo + u * (hi - lo)
    }

    #[test]
    fn package_mass_at_defaults_is_two_kilograms() {
        let m = package_mass(
            &MimoConfig::default(),
            &RisConfig::default(),
            &PvConfig::default(),
            &UavAirframe::default(),
        );
        assert_eq!(m, 2.0);
    }

    #[test]
    fn package_mass_reduces_to_aux_mass() {
        let mimo = MimoConfig {
            count: 0,
            ..MimoConfig::default()
        };
        let ris = RisConfig {
            count: 0,
            ..RisConfig::default()
        };
        let pv = PvConfig {
            series_count: 0,
            parallel_count: 0,
            ..PvConfig::default()
        };
        let airframe = UavAirframe {
            aux_mass_kg: 1.5,
            ..UavAirframe::default()
        };
        assert_eq!(package_mass(&mimo, &ris, &pv, &airframe), 1.5);
    }

    #[test]
    fn package_mass_is_linear_in_counts() {
        let mimo = MimoConfig {
            unit_mass_kg: 1.0,
            ..MimoConfig::default()
        };
        let ris = RisConfig {
            unit_mass_kg: 1.0,
            ..RisConfig::default()
        };
        let pv = PvConfig {
            unit_mass_kg: 0.2,
            ..PvConfig::default()
        };
        let airframe = UavAirframe::default();
        let single = package_mass(&mimo, &ris, &pv, &airframe) - airframe.aux_mass_kg;
        let mimo2 = MimoConfig {
            count: mimo.count * 2,
            ..mimo
        };
        let ris2 = RisConfig {
            count: ris.count * 2,
            ..ris
        };
        let pv2 = PvConfig {
            parallel_count: pv.parallel_count * 2,
            ..pv
        };
        let double = package_mass(&mimo2, &ris2, &pv2, &airframe) - airframe.aux_mass_kg;
        assert_relative_eq!(double, 2.0 * single, max_relative = 1e-12);
    }

    #[test]
    fn hover_power_reference_point() {
        let airframe = UavAirframe::default();
        let atmo = still_air(1.225, 9.80665);
        let p = uav_hover_power(&airframe, 2.0, &atmo).unwrap();
        assert_relative_eq!(p, 51.1, max_relative = 1e-3);
    }

    #[test]
    fn hover_power_zero_mass_is_zero() {
        let airframe = UavAirframe {
            mass_kg: 0.0,
            ..UavAirframe::default()
        };
        let atmo = still_air(1.225, 9.80665);
        assert_eq!(uav_hover_power(&airframe, 0.0, &atmo).unwrap(), 0.0);
    }

    #[test]
    fn hover_power_mass_power_law() {
        let airframe = UavAirframe::default();
        let atmo = still_air(1.225, 9.80665);
        let p1 = uav_hover_power(&airframe, 2.0, &atmo).unwrap();
        // quadruple total mass (airframe 2 + package 2 -> 8 + 8)
        let heavy = UavAirframe {
            mass_kg: 8.0,
            ..airframe
        };
        let p4 = uav_hover_power(&heavy, 8.0, &atmo).unwrap();
        assert_relative_eq!(p4, 8.0 * p1, max_relative = 1e-12);
    }

    #[test]
    fn hover_power_rejects_vacuum() {
        let airframe = UavAirframe::default();
        let atmo = still_air(0.0, 9.80665);
        assert!(uav_hover_power(&airframe, 2.0, &atmo).is_err());
    }

    #[test]
    fn hover_power_matches_one_line_oracle_on_random_inputs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let airframe = UavAirframe {
                mass_kg: uniform(&mut rng, 0.1, 20.0),
                propeller_radius_m: uniform(&mut rng, 0.05, 1.0),
                propeller_count: 1 + (rng.next_u64() % 16) as u32,
                ..UavAirframe::default()
            };
            let pkg = uniform(&mut rng, 0.0, 10.0);
            let atmo = still_air(uniform(&mut rng, 0.8, 1.5), uniform(&mut rng, 9.7, 9.81));
            let got = uav_hover_power(&airframe, pkg, &atmo).unwrap();
            let want = (((airframe.mass_kg + pkg) * atmo.gravity_m_s2).powi(3)
                / (2.0
                    * core::f64::consts::PI
                    * airframe.propeller_radius_m.powi(2)
                    * f64::from(airframe.propeller_count)
                    * atmo.density_kg_m3))
                .sqrt();
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn ris_power_as_printed_and_in_milliwatts() {
        let ris = RisConfig::default();
        assert_relative_eq!(ris_power(&ris), 124.8, max_relative = 1e-12);
        let mw = RisConfig {
            phase_shifter_unit: PowerUnit::Mw,
            ..ris
        };
        assert_relative_eq!(ris_power(&mw), 0.1248, max_relative = 1e-12);
        let none = RisConfig {
            count: 0,
            ..RisConfig::default()
        };
        assert_eq!(ris_power(&none), 0.0);
    }

    #[test]
    fn pilot_sample_counts() {
        let mimo = MimoConfig::default();
        let mut load = CellLoad::idle();
        assert_eq!(pilot_samples(&load, &mimo), 0.0);
        load.users = 10;
        assert_eq!(pilot_samples(&load, &mimo), 10.0);
        let mimo3 = MimoConfig {
            pilot_reuse_factor: 3.0,
            ..mimo
        };
        load.users = 4;
        assert_eq!(pilot_samples(&load, &mimo3), 12.0);
    }

    #[test]
    fn circuit_power_with_no_users() {
        let mimo = MimoConfig::default();
        let load = CellLoad {
            users: 0,
            active_antennas: 64,
            transmit_power_w: 0.0,
            dl_traffic_gbps: 0.0,
            ul_traffic_gbps: 0.0,
        };
        let p = mimo_circuit_power(&load, &mimo).unwrap();
        // fixed + chains + the user-independent signal-processing terms
        let scale = 3.0 * 1.2e8 / (5.0e4 * 7.5e10);
        let expected = 10.0 + 64.0 * 0.4 + scale * (64.0f64.powi(3) / 3.0 + 2.0 * 64.0);
        assert_relative_eq!(p, expected, max_relative = 1e-12);
        assert_relative_eq!(p, 35.61, max_relative = 1e-3);
    }

    #[test]
    fn channel_estimation_term_hand_value() {
        let mimo = MimoConfig::default();
        let load = CellLoad {
            users: 10,
            active_antennas: 64,
            transmit_power_w: 0.0,
            dl_traffic_gbps: 0.0,
            ul_traffic_gbps: 0.0,
        };
        let with_users = mimo_circuit_power(&load, &mimo).unwrap();
        let scale = 3.0 * 1.2e8 / (5.0e4 * 7.5e10);
        let estimation = scale * 10.0 * (64.0 * 10.0 + 64.0 * 64.0);
        assert_relative_eq!(estimation, 4.547e-3, max_relative = 1e-3);
        // the estimation term is part of the total
        let without = {
            let l0 = CellLoad { users: 0, ..load };
            mimo_circuit_power(&l0, &mimo).unwrap()
        };
        assert!(with_users > without + estimation * 0.99);
    }

    #[test]
    fn traffic_power_hand_values() {
        let mimo = MimoConfig::default();
        let base = CellLoad {
            users: 0,
            active_antennas: 64,
            transmit_power_w: 0.0,
            dl_traffic_gbps: 0.0,
            ul_traffic_gbps: 0.0,
        };
        let loaded = CellLoad {
            dl_traffic_gbps: 1.2,
            ul_traffic_gbps: 0.4,
            ..base
        };
        let delta =
            mimo_circuit_power(&loaded, &mimo).unwrap() - mimo_circuit_power(&base, &mimo).unwrap();
        // coding/decoding 0.44 W plus backhaul 0.4 W
        assert_relative_eq!(delta, 0.84, max_relative = 1e-9);
    }

    #[test]
    fn over_piloted_cell_is_rejected() {
        let mimo = MimoConfig {
            coherence_bandwidth_hz: 100.0,
            coherence_time_s: 0.05,
            ..MimoConfig::default()
        }; // tau_c = 5 samples
        let load = CellLoad {
            users: 6,
            active_antennas: 64,
            transmit_power_w: 0.0,
            dl_traffic_gbps: 0.0,
            ul_traffic_gbps: 0.0,
        };
        assert!(matches!(
            mimo_circuit_power(&load, &mimo),
            Err(PowerError::OverPilotedCell { .. })
        ));
    }

    #[test]
    fn circuit_power_monotone_in_load() {
        let mimo = MimoConfig::default();
        let base = CellLoad {
            users: 5,
            active_antennas: 32,
            transmit_power_w: 0.0,
            dl_traffic_gbps: 0.5,
            ul_traffic_gbps: 0.2,
        };
        let p0 = mimo_circuit_power(&base, &mimo).unwrap();
        for (load, name) in [
            (CellLoad { users: 6, ..base }, "users"),
            (
                CellLoad {
                    active_antennas: 33,
                    ..base
                },
                "antennas",
            ),
            (
                CellLoad {
                    dl_traffic_gbps: 0.6,
                    ..base
                },
                "dl",
            ),
            (
                CellLoad {
                    ul_traffic_gbps: 0.3,
                    ..base
                },
                "ul",
            ),
        ] {
            let p = mimo_circuit_power(&load, &mimo).unwrap();
            assert!(p >= p0, "circuit power must not fall when {name} grows");
        }
    }

    #[test]
    fn oscillator_term_is_opt_in() {
        let load = CellLoad {
            users: 3,
            active_antennas: 64,
            transmit_power_w: 0.0,
            dl_traffic_gbps: 0.0,
            ul_traffic_gbps: 0.0,
        };
        let without = mimo_circuit_power(&load, &MimoConfig::default()).unwrap();
        let with = mimo_circuit_power(
            &load,
            &MimoConfig {
                include_oscillator: true,
                ..MimoConfig::default()
            },
        )
        .unwrap();
        assert_relative_eq!(with - without, 0.2, max_relative = 1e-9);
    }

    #[test]
    fn amplifier_power_at_max_transmit() {
        let mimo = MimoConfig::default();
        let idle = CellLoad {
            users: 0,
            active_antennas: 64,
            transmit_power_w: 0.0,
            dl_traffic_gbps: 0.0,
            ul_traffic_gbps: 0.0,
        };
        // amplifier idle: total equals circuit power
        assert_eq!(
            mimo_power(&idle, &mimo).unwrap(),
            mimo_circuit_power(&idle, &mimo).unwrap()
        );
        // 42 dBm radiated
        let tx = CellLoad {
            transmit_power_w: 15.848_931_924_611_133,
            ..idle
        };
        let pa = mimo_power(&tx, &mimo).unwrap() - mimo_circuit_power(&tx, &mimo).unwrap();
        assert_relative_eq!(pa, 45.28, max_relative = 1e-3);
        // halving the efficiency doubles the amplifier draw
        let half = MimoConfig {
            amplifier_efficiency: mimo.amplifier_efficiency / 2.0,
            ..mimo
        };
        let pa_half = mimo_power(&tx, &half).unwrap() - mimo_circuit_power(&tx, &half).unwrap();
        assert_relative_eq!(pa_half, 2.0 * pa, max_relative = 1e-12);
    }

    #[test]
    fn total_consumption_dc_loss() {
        let airframe = UavAirframe::default();
        let mimo = MimoConfig::default();
        let ris = RisConfig::default();
        let pv = PvConfig::default();
        let load = CellLoad {
            users: 10,
            active_antennas: 64,
            transmit_power_w: 0.15848931924611134,
            dl_traffic_gbps: 1.0,
            ul_traffic_gbps: 0.333,
        };
        let atmo = still_air(1.225, 9.80665);
        let pb = total_consumption(&airframe, &mimo, &ris, &pv, &load, &atmo).unwrap();
        let summed = pb.hover_w + pb.ris_w + pb.mimo_circuit_w + pb.mimo_amplifier_w + pb.aux_w;
        assert_relative_eq!(pb.total_dc_w, summed / 0.925, max_relative = 1e-12);
        assert!(pb.total_dc_w >= summed);

        let lossless = UavAirframe {
            dc_loss_factor: 0.0,
            ..airframe
        };
        let pb0 = total_consumption(&lossless, &mimo, &ris, &pv, &load, &atmo).unwrap();
        let summed0 =
            pb0.hover_w + pb0.ris_w + pb0.mimo_circuit_w + pb0.mimo_amplifier_w + pb0.aux_w;
        assert_eq!(pb0.total_dc_w, summed0);
    }

    #[test]
    fn total_consumption_hundred_watt_example() {
        // a 100 W summed load at the default 7.5% loss gives 108.108 W
        assert_relative_eq!(100.0 / (1.0 - 0.075), 108.108, max_relative = 1e-4);
    }

    #[test]
    fn powered_down_cell_draws_hover_only() {
        let airframe = UavAirframe::default();
        let mimo = MimoConfig::default();
        let ris = RisConfig {
            count: 0,
            ..RisConfig::default()
        };
        let pv = PvConfig::default();
        let atmo = still_air(1.225, 9.80665);
        let pb = total_consumption(&airframe, &mimo, &ris, &pv, &CellLoad::idle(), &atmo).unwrap();
        assert_eq!(pb.mimo_circuit_w, 0.0);
        assert_eq!(pb.mimo_amplifier_w, 0.0);
        assert_relative_eq!(
            pb.total_dc_w,
            pb.hover_w / (1.0 - airframe.dc_loss_factor),
            max_relative = 1e-12
        );
    }

    #[test]
    fn total_consumption_increasing_in_dc_loss() {
        let mimo = MimoConfig::default();
        let ris = RisConfig::default();
        let pv = PvConfig::default();
        let load = CellLoad::idle();
        let atmo = still_air(1.225, 9.80665);
        let mut prev = 0.0;
        for i in 0..10 {
            let airframe = UavAirframe {
                dc_loss_factor: f64::from(i) * 0.05,
                ..UavAirframe::default()
            };
            let pb = total_consumption(&airframe, &mimo, &ris, &pv, &load, &atmo).unwrap();
            assert!(pb.total_dc_w > prev);
            prev = pb.total_dc_w;
        }
    }
}
