//! Battery energy state machine.
//!
//! Charging multiplies by the round-trip split efficiency and is capped at
//! capacity; discharging divides by it and is capped at the usable floor.
//! A draw that cannot be served in full reports the unmet remainder in
//! load-side watt-hours, which the simulation engine turns into a UAV
//! replacement at the start of the following step.

use serde::{Deserialize, Serialize};

use crate::power::PowerBreakdown;

/// Clamp rule for the charge branch.
///
/// `Cap` accepts at most the free headroom. `PrintedMax` takes the larger
/// of the scaled delta and the headroom (jumping to full on any surplus)
/// and then clamps at capacity; it exists so the alternative reading of
/// the charge rule can be exercised, not as a recommended setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChargeRule {
    #[default]
    Cap,
    PrintedMax,
}

/// Battery system configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatteryConfig {
    /// Energy of one battery, Wh. Equals nominal voltage times capacity.
    pub unit_energy_wh: f64,
    /// Batteries in series.
    pub series_count: u32,
    /// Batteries in parallel.
    pub parallel_count: u32,
    /// Round-trip split efficiency, in (0, 1].
    pub efficiency: f64,
    /// State of charge of a freshly swapped-in battery, fraction.
    pub primary_soc: f64,
    /// Maximum depth of discharge, fraction.
    pub max_depth_of_discharge: f64,
    /// Mass of one battery, kg.
    pub unit_mass_kg: f64,
    /// Nominal voltage, V.
    pub nominal_voltage_v: f64,
    /// Charging voltage, V. Metadata only.
    pub charge_voltage_v: f64,
    /// Discharging voltage, V. Metadata only.
    pub discharge_voltage_v: f64,
    /// Charging current, A. Metadata only.
    pub charge_current_a: f64,
    /// Discharging current, A. Metadata only.
    pub discharge_current_a: f64,
    /// Capacity, Ah.
    pub capacity_ah: f64,
    /// Rated charge cycles. Metadata only; aging is not modeled.
    pub rated_cycles: u32,
    /// Charge clamp rule; see [`ChargeRule`].
    pub charge_rule: ChargeRule,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self {
            unit_energy_wh: 768.0,
            series_count: 1,
            parallel_count: 1,
            efficiency: 0.95,
            primary_soc: 0.95,
            max_depth_of_discharge: 1.0,
            unit_mass_kg: 5.2,
            nominal_voltage_v: 12.8,
            charge_voltage_v: 14.6,
            discharge_voltage_v: 12.8,
            charge_current_a: 30.0,
            discharge_current_a: 60.0,
            capacity_ah: 60.0,
            rated_cycles: 2000,
            charge_rule: ChargeRule::Cap,
        }
    }
}

impl BatteryConfig {
    /// Total battery count: series times parallel.
    pub fn total_units(&self) -> u32 {
        self.series_count * self.parallel_count
    }

    /// System capacity, Wh.
    pub fn max_energy_wh(&self) -> f64 {
        f64::from(self.total_units()) * self.unit_energy_wh
    }

    /// Lowest allowed stored energy, Wh.
    pub fn floor_wh(&self) -> f64 {
        (1.0 - self.max_depth_of_discharge) * self.max_energy_wh()
    }

    /// Stored energy of a freshly swapped-in system, Wh.
    pub fn primary_energy_wh(&self) -> f64 {
        self.primary_soc * self.max_energy_wh()
    }
}

/// Battery state of one UAV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryState {
    /// Stored energy, Wh.
    pub energy_wh: f64,
    /// System capacity, Wh.
    pub max_energy_wh: f64,
    /// Lowest allowed stored energy, Wh.
    pub floor_wh: f64,
    /// UAV replacements so far.
    pub replacements: u32,
    /// Whether the last step could not be served in full.
    pub deficit_flag: bool,
}

impl BatteryState {
    /// State of a freshly deployed UAV: primary state of charge, no swaps.
    pub fn fresh(cfg: &BatteryConfig) -> Self {
        Self {
            energy_wh: cfg.primary_energy_wh(),
            max_energy_wh: cfg.max_energy_wh(),
            floor_wh: cfg.floor_wh(),
            replacements: 0,
            deficit_flag: false,
        }
    }
}

/// Energy balance of one step, Wh: PV production minus the DC consumption,
/// over the step duration.
pub fn energy_balance(pb: &PowerBreakdown, dt_hours: f64) -> f64 {
    (pb.pv_w - pb.total_dc_w) * dt_hours
}

/// Advances the battery by one energy delta.
///
/// Returns the new state and the unmet deficit in load-side Wh (zero when
/// the step was served in full). Charging stores `delta * efficiency`
/// capped at the headroom; discharging removes `|delta| / efficiency`
/// capped at the energy above the floor, and the shortfall is scaled back
/// to load-side by the efficiency.
pub fn step_battery(
    state: &BatteryState,
    delta_wh: f64,
    cfg: &BatteryConfig,
) -> (BatteryState, f64) {
    let mut next = *state;
    if delta_wh > 0.0 {
        let headroom = state.max_energy_wh - state.energy_wh;
        let accepted = match cfg.charge_rule {
            ChargeRule::Cap => (delta_wh * cfg.efficiency).min(headroom),
            // max(scaled delta, headroom) clamped at capacity is always
            // exactly the headroom: any surplus fills the battery
            ChargeRule::PrintedMax => headroom,
        };
        next.energy_wh = state.energy_wh + accepted;
        next.deficit_flag = false;
        (next, 0.0)
    } else {
        let requested = -delta_wh / cfg.efficiency;
        let available = state.energy_wh - state.floor_wh;
        let drawn = requested.min(available);
        next.energy_wh = state.energy_wh - drawn;
        let deficit = (requested - drawn).max(0.0) * cfg.efficiency;
        next.deficit_flag = deficit > 0.0;
        (next, deficit)
    }
}

/// Swaps the UAV for a fresh one: primary state of charge, counter bumped,
/// deficit flag cleared.
pub fn replace_uav(state: &BatteryState, cfg: &BatteryConfig) -> BatteryState {
    BatteryState {
        energy_wh: cfg.primary_energy_wh(),
        max_energy_wh: state.max_energy_wh,
        floor_wh: state.floor_wh,
        replacements: state.replacements + 1,
        deficit_flag: false,
    }
}
