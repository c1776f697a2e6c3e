//! Link budgets, BS-UE association, and per-cell load selection.
//!
//! The planner is a greedy heuristic: users are visited in order of their
//! best achievable link and each attaches to the base station that needs
//! the smallest increase in transmit power to serve it, subject to the
//! link budget and a per-cell user cap. Base stations end up at the
//! highest power level any of their users required. An exhaustive search
//! over small instances is provided as a test oracle.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::battery::BatteryConfig;
use crate::power::{CellLoad, MimoConfig, RisConfig, UavAirframe};
use crate::pv::PvConfig;

/// Axis-aligned deployment area, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Area {
    pub x_min_m: f64,
    pub y_min_m: f64,
    pub x_max_m: f64,
    pub y_max_m: f64,
}

impl Area {
    pub fn width_m(&self) -> f64 {
        self.x_max_m - self.x_min_m
    }

    pub fn height_m(&self) -> f64 {
        self.y_max_m - self.y_min_m
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.x_min_m..=self.x_max_m).contains(&x) && (self.y_min_m..=self.y_max_m).contains(&y)
    }
}

/// Full hardware complement of one UAV base station.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UavHardware {
    pub airframe: UavAirframe,
    pub mimo: MimoConfig,
    pub ris: RisConfig,
    pub pv: PvConfig,
    pub battery: BatteryConfig,
}

/// One UAV base station: ground position plus hardware.
/// The hover altitude lives in the airframe configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UavBaseStation {
    pub x_m: f64,
    pub y_m: f64,
    pub hardware: UavHardware,
}

/// One user terminal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserEquipment {
    pub x_m: f64,
    pub y_m: f64,
    /// Antenna height above ground, m.
    pub height_m: f64,
    /// Downlink demand, Mbit/s.
    pub demand_dl_mbps: f64,
    /// Antenna gain, dBi.
    pub antenna_gain_dbi: f64,
    /// Maximum uplink transmit power, dBm. Metadata; the uplink budget is
    /// not modeled.
    pub max_tx_power_dbm: f64,
}

/// A concrete planning instance: placed base stations and users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub bounds: Area,
    pub base_stations: Vec<UavBaseStation>,
    pub users: Vec<UserEquipment>,
}

/// Path-loss model selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathLossModel {
    /// Urban-macro line of sight, single-slope form.
    UmaLos,
    /// Urban-macro non-line-of-sight (lower-bounded by the LOS loss).
    UmaNlos,
}

/// Link budget and radio-plan parameters shared by all base stations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkBudgetParams {
    /// Carrier frequency, MHz.
    pub carrier_mhz: f64,
    /// Base-station antenna gain, dBi.
    pub bs_antenna_gain_dbi: f64,
    /// Antenna feeder loss, dB.
    pub feeder_loss_db: f64,
    /// Receiver noise figure, dB.
    pub noise_figure_db: f64,
    /// Interference margin, dB.
    pub interference_margin_db: f64,
    /// Doppler margin, dB.
    pub doppler_margin_db: f64,
    /// Fade margin, dB.
    pub fade_margin_db: f64,
    /// Shadow margin, dB.
    pub shadow_margin_db: f64,
    /// Implementation loss, dB.
    pub implementation_loss_db: f64,
    /// Soft handover gain, dB.
    pub soft_handover_gain_db: f64,
    /// Candidate downlink transmit power levels, dBm, ascending.
    pub tx_power_levels_dbm: Vec<f64>,
    /// Subcarriers carrying data.
    pub used_subcarriers: u32,
    /// Total subcarriers.
    pub total_subcarriers: u32,
    /// Sampling factor.
    pub sampling_factor: f64,
    /// Spatial duty cycle, fraction. Configuration metadata.
    pub spatial_duty: f64,
    /// Maximum users one cell may serve.
    pub max_users_per_cell: u32,
    /// Path-loss model.
    pub path_loss_model: PathLossModel,
}

impl Default for LinkBudgetParams {
    fn default() -> Self {
        Self {
            carrier_mhz: 3500.0,
            bs_antenna_gain_dbi: 24.0,
            feeder_loss_db: 3.0,
            noise_figure_db: 7.0,
            interference_margin_db: 2.0,
            doppler_margin_db: 3.0,
            fade_margin_db: 10.0,
            shadow_margin_db: 10.0,
            implementation_loss_db: 3.0,
            soft_handover_gain_db: 0.0,
            tx_power_levels_dbm: vec![
                22.0, 24.0, 26.0, 28.0, 30.0, 32.0, 34.0, 36.0, 38.0, 40.0, 42.0,
            ],
            used_subcarriers: 320,
            total_subcarriers: 512,
            sampling_factor: 1.536,
            spatial_duty: 0.25,
            max_users_per_cell: 25,
            path_loss_model: PathLossModel::UmaLos,
        }
    }
}

/// Per-base-station planning result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BsAssignment {
    pub active: bool,
    /// Radiated transmit power, W. Zero for inactive cells.
    pub tx_power_w: f64,
    /// The chosen level, dBm, when active.
    pub tx_power_dbm: Option<f64>,
    /// Indices of served users.
    pub served: Vec<usize>,
    pub dl_traffic_gbps: f64,
    pub ul_traffic_gbps: f64,
    pub active_antennas: u32,
}

/// Planning result: one entry per base station plus the per-user serving map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellAssignment {
    pub per_bs: Vec<BsAssignment>,
    /// Serving base station index per user; None when unserved.
    pub serving: Vec<Option<usize>>,
}

impl CellAssignment {
    pub fn served_count(&self) -> usize {
        self.serving.iter().filter(|s| s.is_some()).count()
    }

    /// Total radiated power across active cells, W.
    pub fn total_tx_power_w(&self) -> f64 {
        self.per_bs.iter().map(|b| b.tx_power_w).sum()
    }

    /// The load the power model sees for one cell.
    pub fn cell_load(&self, bs: usize) -> CellLoad {
        let a = &self.per_bs[bs];
        CellLoad {
            users: a.served.len() as u32,
            active_antennas: a.active_antennas,
            transmit_power_w: a.tx_power_w,
            dl_traffic_gbps: a.dl_traffic_gbps,
            ul_traffic_gbps: a.ul_traffic_gbps,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlanError {
    /// 3D distance below the path-loss model validity floor of 1 m.
    DistanceTooSmall { d3d_m: f64 },
    /// No candidate power levels configured.
    NoPowerLevels,
    /// The exhaustive oracle only accepts small instances.
    InstanceTooLarge {
        base_stations: usize,
        users: usize,
        levels: usize,
    },
}

impl fmt::Display for PlanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DistanceTooSmall { d3d_m } => {
                write!(f, "3D distance {d3d_m} m is below the 1 m model floor")
            }
            Self::NoPowerLevels => write!(f, "transmit power level list is empty"),
            Self::InstanceTooLarge {
                base_stations,
                users,
                levels,
            } => write!(
                f,
                "exhaustive search limited to 3 base stations, 6 users, 4 levels; got {base_stations}/{users}/{levels}"
            ),
        }
    }
}

impl core::error::Error for PlanError {}

/// Converts dBm to watts.
pub fn dbm_to_w(dbm: f64) -> f64 {
    libm::pow(10.0, (dbm - 30.0) / 10.0)
}

/// Path loss over a 3D distance, dB.
///
/// Urban-macro single-slope forms; the NLOS variant is lower-bounded by
/// the LOS loss.
pub fn path_loss(
    d3d_m: f64,
    carrier_ghz: f64,
    ue_height_m: f64,
    model: PathLossModel,
) -> Result<f64, PlanError> {
    if d3d_m < 1.0 {
        return Err(PlanError::DistanceTooSmall { d3d_m });
    }
    let los = 28.0 + 22.0 * libm::log10(d3d_m) + 20.0 * libm::log10(carrier_ghz);
    Ok(match model {
        PathLossModel::UmaLos => los,
        PathLossModel::UmaNlos => {
            let nlos = 13.54 + 39.08 * libm::log10(d3d_m) + 20.0 * libm::log10(carrier_ghz)
                - 0.6 * (ue_height_m - 1.5);
            los.max(nlos)
        }
    })
}

/// Effective downlink bandwidth of the link budget, Hz.
fn effective_bandwidth_hz(lb: &LinkBudgetParams, mimo: &MimoConfig) -> f64 {
    mimo.bandwidth_hz * (f64::from(lb.used_subcarriers) / f64::from(lb.total_subcarriers))
        / lb.sampling_factor
        * mimo.dl_duty
}

/// Maximum allowable path loss for a demand at a transmit power, dB.
///
/// Shannon-based SNR target over the effective downlink bandwidth, with a
/// thermal-noise floor and additive margins. The required-SNR term is
/// floored at -10 dB so vanishing demands keep a finite budget. `None`
/// means the demand is unreachable at any SNR the budget can express.
pub fn max_allowable_path_loss(
    demand_mbps: f64,
    tx_power_dbm: f64,
    ue_gain_dbi: f64,
    lb: &LinkBudgetParams,
    mimo: &MimoConfig,
) -> Option<f64> {
    let b_eff = effective_bandwidth_hz(lb, mimo);
    let snr_linear = libm::exp2(demand_mbps * 1.0e6 / b_eff) - 1.0;
    if !snr_linear.is_finite() {
        return None;
    }
    let snr_db = if snr_linear <= 0.0 {
        -10.0
    } else {
        (10.0 * libm::log10(snr_linear)).max(-10.0)
    };
    let noise_floor_dbm = -174.0 + 10.0 * libm::log10(b_eff) + lb.noise_figure_db;
    let margins = lb.interference_margin_db
        + lb.doppler_margin_db
        + lb.fade_margin_db
        + lb.shadow_margin_db
        + lb.implementation_loss_db;
    Some(
        tx_power_dbm + lb.bs_antenna_gain_dbi + ue_gain_dbi - lb.feeder_loss_db - margins
            + lb.soft_handover_gain_db
            - (noise_floor_dbm + snr_db),
    )
}

/// 3D distance between a base station and a user, m.
fn link_distance(bs: &UavBaseStation, ue: &UserEquipment) -> f64 {
    let dx = bs.x_m - ue.x_m;
    let dy = bs.y_m - ue.y_m;
    let dz = bs.hardware.airframe.hover_altitude_m - ue.height_m;
    libm::sqrt(dx * dx + dy * dy + dz * dz)
}

/// Per-instance link table: path loss and the minimum feasible power level
/// for every BS-UE pair.
struct LinkTable {
    /// path_loss[bs][ue]
    loss_db: Vec<Vec<f64>>,
    /// lowest feasible level index per [bs][ue]; None when out of reach
    min_level: Vec<Vec<Option<usize>>>,
    level_w: Vec<f64>,
}

fn build_link_table(
    scn: &Scenario,
    lb: &LinkBudgetParams,
    mimo: &MimoConfig,
) -> Result<LinkTable, PlanError> {
    if lb.tx_power_levels_dbm.is_empty() {
        return Err(PlanError::NoPowerLevels);
    }
    let carrier_ghz = lb.carrier_mhz / 1000.0;
    let n_bs = scn.base_stations.len();
    let n_ue = scn.users.len();
    let mut loss_db = vec![vec![0.0; n_ue]; n_bs];
    let mut min_level = vec![vec![None; n_ue]; n_bs];
    for (b, bs) in scn.base_stations.iter().enumerate() {
        for (u, ue) in scn.users.iter().enumerate() {
            let d = link_distance(bs, ue);
            let pl = path_loss(d, carrier_ghz, ue.height_m, lb.path_loss_model)?;
            loss_db[b][u] = pl;
            min_level[b][u] = lb.tx_power_levels_dbm.iter().position(|&level| {
                max_allowable_path_loss(ue.demand_dl_mbps, level, ue.antenna_gain_dbi, lb, mimo)
                    .is_some_and(|mapl| mapl >= pl)
            });
        }
    }
    let level_w = lb
        .tx_power_levels_dbm
        .iter()
        .map(|&d| dbm_to_w(d))
        .collect();
    Ok(LinkTable {
        loss_db,
        min_level,
        level_w,
    })
}

/// Assembles the per-BS result from chosen levels and a serving map.
fn assemble_assignment(
    scn: &Scenario,
    lb: &LinkBudgetParams,
    mimo: &MimoConfig,
    levels: &[Option<usize>],
    serving: Vec<Option<usize>>,
    table: &LinkTable,
) -> CellAssignment {
    let n_bs = scn.base_stations.len();
    let mut per_bs: Vec<BsAssignment> = (0..n_bs)
        .map(|b| BsAssignment {
            active: false,
            tx_power_w: 0.0,
            tx_power_dbm: levels[b].map(|l| lb.tx_power_levels_dbm[l]),
            served: Vec::new(),
            dl_traffic_gbps: 0.0,
            ul_traffic_gbps: 0.0,
            active_antennas: 0,
        })
        .collect();
    for (u, s) in serving.iter().enumerate() {
        if let Some(b) = s {
            per_bs[*b].served.push(u);
            per_bs[*b].dl_traffic_gbps += scn.users[u].demand_dl_mbps / 1000.0;
        }
    }
    for (b, a) in per_bs.iter_mut().enumerate() {
        a.active = !a.served.is_empty();
        if a.active {
            let level = levels[b].expect("active cell must have a level");
            a.tx_power_w = table.level_w[level];
            a.tx_power_dbm = Some(lb.tx_power_levels_dbm[level]);
            a.active_antennas = mimo.max_antennas;
            a.ul_traffic_gbps = a.dl_traffic_gbps * (mimo.ul_duty / mimo.dl_duty);
        } else {
            a.tx_power_dbm = None;
        }
    }
    CellAssignment { per_bs, serving }
}

/// Greedy cell planner.
///
/// Users are visited in ascending order of their best-link path loss; each
/// attaches to the base station that needs the smallest climb up the
/// power-level ladder to serve it, counting activation of an idle station
/// as one step onto the lowest required level. Ties break toward the
/// lower resulting level, then the stronger link, then the station index.
/// Unserved users are a result, not an error.
pub fn plan_cells(
    scn: &Scenario,
    lb: &LinkBudgetParams,
    mimo: &MimoConfig,
) -> Result<CellAssignment, PlanError> {
    let table = build_link_table(scn, lb, mimo)?;
    let n_bs = scn.base_stations.len();
    let n_ue = scn.users.len();

    let mut order: Vec<usize> = (0..n_ue).collect();
    let best_loss: Vec<f64> = (0..n_ue)
        .map(|u| {
            (0..n_bs)
                .map(|b| table.loss_db[b][u])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    order.sort_by(|&a, &b| {
        best_loss[a]
            .partial_cmp(&best_loss[b])
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    let mut levels: Vec<Option<usize>> = vec![None; n_bs];
    let mut user_counts = vec![0u32; n_bs];
    let mut serving: Vec<Option<usize>> = vec![None; n_ue];

    for &u in &order {
        let mut best: Option<(i64, usize, f64, usize)> = None;
        for b in 0..n_bs {
            if user_counts[b] >= lb.max_users_per_cell {
                continue;
            }
            let Some(required) = table.min_level[b][u] else {
                continue;
            };
            let needed = levels[b].map_or(required, |cur| cur.max(required));
            let current_idx = levels[b].map_or(-1i64, |cur| cur as i64);
            let increment = needed as i64 - current_idx;
            let key = (increment, needed, table.loss_db[b][u], b);
            let better = match &best {
                None => true,
                Some(k) => key < *k,
            };
            if better {
                best = Some(key);
            }
        }
        if let Some((_, needed, _, b)) = best {
            serving[u] = Some(b);
            levels[b] = Some(needed);
            user_counts[b] += 1;
        }
    }

    Ok(assemble_assignment(scn, lb, mimo, &levels, serving, &table))
}

const EXHAUSTIVE_MAX_BS: usize = 3;
const EXHAUSTIVE_MAX_UE: usize = 6;
const EXHAUSTIVE_MAX_LEVELS: usize = 4;

/// Exhaustive planning oracle for small instances.
///
/// Enumerates every per-station power setting (off or one of the levels)
/// and, within each setting, every feasible user assignment, and returns
/// the lexicographic optimum: most users served, then least total radiated
/// power. Guarded to tiny instances; intended for testing the greedy.
pub fn exhaustive_plan(
    scn: &Scenario,
    lb: &LinkBudgetParams,
    mimo: &MimoConfig,
) -> Result<CellAssignment, PlanError> {
    let n_bs = scn.base_stations.len();
    let n_ue = scn.users.len();
    let n_levels = lb.tx_power_levels_dbm.len();
    if n_bs > EXHAUSTIVE_MAX_BS || n_ue > EXHAUSTIVE_MAX_UE || n_levels > EXHAUSTIVE_MAX_LEVELS {
        return Err(PlanError::InstanceTooLarge {
            base_stations: n_bs,
            users: n_ue,
            levels: n_levels,
        });
    }
    let table = build_link_table(scn, lb, mimo)?;

    // best = (served, total_w, levels, serving)
    type Candidate = (usize, f64, Vec<Option<usize>>, Vec<Option<usize>>);
    let mut best: Option<Candidate> = None;

    // iterate over level combos: usize counter in base (n_levels + 1)
    let combos = (n_levels + 1).pow(n_bs as u32);
    for combo in 0..combos {
        let mut rem = combo;
        let mut levels: Vec<Option<usize>> = Vec::with_capacity(n_bs);
        let mut total_w = 0.0;
        for _ in 0..n_bs {
            let digit = rem % (n_levels + 1);
            rem /= n_levels + 1;
            if digit == 0 {
                levels.push(None);
            } else {
                levels.push(Some(digit - 1));
                total_w += table.level_w[digit - 1];
            }
        }
        // feasible stations per user under this combo
        let feasible: Vec<Vec<usize>> = (0..n_ue)
            .map(|u| {
                (0..n_bs)
                    .filter(|&b| {
                        levels[b]
                            .and_then(|l| table.min_level[b][u].map(|req| req <= l))
                            .unwrap_or(false)
                    })
                    .collect()
            })
            .collect();

        // depth-first maximum assignment under capacity
        let mut counts = vec![0u32; n_bs];
        let mut serving: Vec<Option<usize>> = vec![None; n_ue];
        let mut best_served = 0usize;
        let mut best_serving = serving.clone();
        dfs_assign(
            0,
            n_ue,
            &feasible,
            lb.max_users_per_cell,
            &mut counts,
            &mut serving,
            &mut best_served,
            &mut best_serving,
        );

        let candidate = (best_served, total_w);
        let better = match &best {
            None => true,
            Some((s, w, _, _)) => {
                candidate.0 > *s || (candidate.0 == *s && candidate.1 < *w - 1e-15)
            }
        };
        if better {
            best = Some((best_served, total_w, levels, best_serving));
        }
    }

    let (_, _, levels, serving) = best.expect("at least the all-off combo exists");
    Ok(assemble_assignment(scn, lb, mimo, &levels, serving, &table))
}

#[allow(clippy::too_many_arguments)]
fn dfs_assign(
    u: usize,
    n_ue: usize,
    feasible: &[Vec<usize>],
    cap: u32,
    counts: &mut [u32],
    serving: &mut Vec<Option<usize>>,
    best_served: &mut usize,
    best_serving: &mut Vec<Option<usize>>,
) {
    if u == n_ue {
        let served = serving.iter().filter(|s| s.is_some()).count();
        if served > *best_served {
            *best_served = served;
            best_serving.clone_from(serving);
        }
        return;
    }
    // bound: even serving everyone left cannot beat the best
    let already = serving[..u].iter().filter(|s| s.is_some()).count();
    if already + (n_ue - u) <= *best_served {
        return;
    }
    for &b in &feasible[u] {
        if counts[b] < cap {
            counts[b] += 1;
            serving[u] = Some(b);
            dfs_assign(
                u + 1,
                n_ue,
                feasible,
                cap,
                counts,
                serving,
                best_served,
                best_serving,
            );
            serving[u] = None;
            counts[b] -= 1;
        }
    }
    // leave u unserved
    dfs_assign(
        u + 1,
        n_ue,
        feasible,
        cap,
        counts,
        serving,
        best_served,
        best_serving,
    );
}
