//! Energy prosumption models for UAV-mounted 5G base stations.
//!
//! This crate holds the pure computational side of the simulator: the
//! atmosphere model driving hover power and PV output, the per-subsystem
//! power models (hover, MIMO transceiver, RIS array), the PV harvest and
//! battery state machines, a greedy cell planner with an exhaustive test
//! oracle, and the discrete-time simulation engine with its ANUR/AREC
//! metrics.
//!
//! The crate is `no_std` (with `alloc`); file formats, CSV/JSON handling,
//! and the command-line front-end live in the companion `aerocell` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod atmosphere;
pub mod battery;
pub mod plan;
pub mod power;
pub mod pv;
pub mod sim;
pub mod weather;

pub use atmosphere::{AtmoConstants, AtmosphereState, SitePosition};
pub use battery::{BatteryConfig, BatteryState, ChargeRule};
pub use plan::{
    Area, CellAssignment, LinkBudgetParams, PathLossModel, Scenario, UavBaseStation, UavHardware,
    UserEquipment,
};
pub use power::{CellLoad, MimoConfig, PowerBreakdown, RisConfig, UavAirframe};
pub use pv::PvConfig;
pub use sim::{MetricsReport, NetworkModel, SeasonDay, SimConfig, UePopulation};
pub use weather::{WeatherSample, WeatherSeries};
