//! Discrete-time simulation engine and the ANUR/AREC metrics.
//!
//! One run draws a user population, plans cells once, and then walks the
//! weather series step by step, composing atmosphere, consumption, PV
//! harvest, and the battery transition. A step whose demand cannot be
//! served in full schedules a UAV replacement at the start of the next
//! step; the unserved remainder is drawn from the fresh battery then.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64(seed)` and
//! `set_stream(run_index)`; user coordinates are drawn as consecutive
//! 53-bit uniforms (x then y per user, in user order), so any
//! implementation of ChaCha8 reproduces the exact populations.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::atmosphere::{self, AtmoConstants, AtmosphereError, SitePosition};
use crate::battery::{energy_balance, replace_uav, step_battery, BatteryState};
use crate::plan::{
    plan_cells, Area, CellAssignment, LinkBudgetParams, PlanError, Scenario, UavBaseStation,
    UserEquipment,
};
use crate::power::{total_consumption, PowerError};
use crate::pv::{pv_power, PvError};
use crate::weather::{WeatherSample, WeatherSeries};

const SECONDS_PER_DAY: u32 = 86_400;

/// User population drawn afresh for every run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UePopulation {
    pub count: u32,
    pub demand_dl_mbps: f64,
    pub height_m: f64,
    pub antenna_gain_dbi: f64,
    pub max_tx_power_dbm: f64,
}

impl Default for UePopulation {
    fn default() -> Self {
        Self {
            count: 100,
            demand_dl_mbps: 100.0,
            height_m: 1.5,
            antenna_gain_dbi: 0.0,
            max_tx_power_dbm: 23.0,
        }
    }
}

/// Everything static across runs: deployment, radio plan, site, constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkModel {
    pub bounds: Area,
    pub base_stations: Vec<UavBaseStation>,
    pub population: UePopulation,
    pub link_budget: LinkBudgetParams,
    pub site: SitePosition,
    pub constants: AtmoConstants,
}

/// Simulation control parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Step length, seconds.
    pub step_s: u32,
    /// Independent Monte Carlo runs.
    pub runs: u32,
    /// Whether PV harvesting feeds the batteries.
    pub res_enabled: bool,
    /// Master seed for user placement.
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            step_s: 60,
            runs: 10,
            res_enabled: true,
            seed: 1,
        }
    }
}

/// One labelled day of weather driving one simulated season.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonDay {
    pub label: String,
    pub series: WeatherSeries,
}

/// Per-base-station numbers of one logged step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsStepRecord {
    pub hover_w: f64,
    pub mimo_w: f64,
    pub ris_w: f64,
    pub pv_w: f64,
    pub battery_wh: f64,
    pub replaced: bool,
}

/// One logged step across the fleet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub unix_s: i64,
    pub per_bs: Vec<BsStepRecord>,
}

/// Per-UAV tallies of one run, sliced by day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UavRunStats {
    pub replacements_by_day: Vec<u32>,
    pub pv_energy_by_day_wh: Vec<f64>,
    pub pv_peak_by_day_w: Vec<f64>,
    pub pv_used_by_day_wh: Vec<f64>,
    pub consumption_by_day_wh: Vec<f64>,
    pub final_energy_wh: f64,
    /// Energy-conservation residual of the bookkeeping identity, Wh.
    pub conservation_residual_wh: f64,
    /// Demand left unserved when the horizon ended, load-side Wh.
    pub trailing_deficit_wh: f64,
}

impl UavRunStats {
    pub fn total_replacements(&self) -> u32 {
        self.replacements_by_day.iter().sum()
    }
}

/// Result of one run of one arm (with or without PV).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub per_uav: Vec<UavRunStats>,
    pub served_users: u32,
    pub trace: Option<Vec<StepRecord>>,
}

/// Metrics of one day (or of the whole horizon when labelled "aggregate").
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonMetrics {
    pub label: String,
    pub pv_energy_total_per_uav_wh: f64,
    pub pv_energy_peak_per_uav_w: f64,
    pub anur: f64,
    pub arec_grid_pct: f64,
    pub arec_harvest_pct: f64,
    pub grid_energy_per_uav_wh: f64,
    pub consumption_per_uav_wh: f64,
}

/// Per-arm metrics: one entry per simulated day plus the aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmReport {
    pub seasons: Vec<SeasonMetrics>,
    pub aggregate: SeasonMetrics,
}

/// The simulator's headline output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub seed: u64,
    pub runs: u32,
    pub step_s: u32,
    pub res_enabled: bool,
    pub season_labels: Vec<String>,
    pub no_res: ArmReport,
    pub with_res: Option<ArmReport>,
}

/// Full simulation output: the report plus raw per-run results and the
/// step trace of the first run of the primary arm.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    pub report: MetricsReport,
    pub trace: Vec<StepRecord>,
    pub runs_no_res: Vec<RunResult>,
    pub runs_with_res: Option<Vec<RunResult>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    Atmosphere(AtmosphereError),
    Power(PowerError),
    Pv(PvError),
    Plan(PlanError),
    /// Weather input does not cover the horizon at the configured step.
    WeatherMismatch {
        expected_steps: usize,
        got_steps: usize,
        step_s: u32,
    },
    NoSeasons,
    NoBaseStations,
    /// AREC pairing needs equally many runs in both arms.
    UnpairedRuns {
        with_res: usize,
        no_res: usize,
    },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Atmosphere(e) => write!(f, "atmosphere: {e}"),
            Self::Power(e) => write!(f, "power: {e}"),
            Self::Pv(e) => write!(f, "pv: {e}"),
            Self::Plan(e) => write!(f, "planner: {e}"),
            Self::WeatherMismatch {
                expected_steps,
                got_steps,
                step_s,
            } => write!(
                f,
                "weather series must hold {expected_steps} samples at {step_s} s per day, got {got_steps}"
            ),
            Self::NoSeasons => write!(f, "no weather days supplied"),
            Self::NoBaseStations => write!(f, "scenario has no base stations"),
            Self::UnpairedRuns { with_res, no_res } => write!(
                f,
                "paired metrics need equal run counts, got {with_res} with RES vs {no_res} without"
            ),
        }
    }
}

impl core::error::Error for SimError {}

impl From<AtmosphereError> for SimError {
    fn from(e: AtmosphereError) -> Self {
        Self::Atmosphere(e)
    }
}

impl From<PowerError> for SimError {
    fn from(e: PowerError) -> Self {
        Self::Power(e)
    }
}

impl From<PvError> for SimError {
    fn from(e: PvError) -> Self {
        Self::Pv(e)
    }
}

impl From<PlanError> for SimError {
    fn from(e: PlanError) -> Self {
        Self::Plan(e)
    }
}

/// 53-bit uniform in [0, 1).
fn uniform_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws the user population of one run. Stream-split per run index.
pub fn draw_users(model: &NetworkModel, seed: u64, run_idx: u64) -> Vec<UserEquipment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run_idx);
    let p = &model.population;
    (0..p.count)
        .map(|_| {
            let x = model.bounds.x_min_m + uniform_f64(&mut rng) * model.bounds.width_m();
            let y = model.bounds.y_min_m + uniform_f64(&mut rng) * model.bounds.height_m();
            UserEquipment {
                x_m: x,
                y_m: y,
                height_m: p.height_m,
                demand_dl_mbps: p.demand_dl_mbps,
                antenna_gain_dbi: p.antenna_gain_dbi,
                max_tx_power_dbm: p.max_tx_power_dbm,
            }
        })
        .collect()
}

/// Plans the cells for one run's drawn population.
pub fn plan_for_run(
    model: &NetworkModel,
    seed: u64,
    run_idx: u64,
) -> Result<(Scenario, CellAssignment), SimError> {
    let users = draw_users(model, seed, run_idx);
    let scenario = Scenario {
        bounds: model.bounds,
        base_stations: model.base_stations.clone(),
        users,
    };
    let mimo = &model.base_stations[0].hardware.mimo;
    let assignment = plan_cells(&scenario, &model.link_budget, mimo)?;
    Ok((scenario, assignment))
}

/// Simulates one run of one arm over a contiguous multi-day horizon.
///
/// `steps` must hold `days` whole days at `step_s` resolution. The cell
/// plan is computed once and held for the whole horizon.
#[allow(clippy::too_many_arguments)]
pub fn simulate_run(
    model: &NetworkModel,
    steps: &[WeatherSample],
    days: usize,
    step_s: u32,
    seed: u64,
    run_idx: u64,
    res_enabled: bool,
    collect_trace: bool,
) -> Result<RunResult, SimError> {
    if model.base_stations.is_empty() {
        return Err(SimError::NoBaseStations);
    }
    let steps_per_day = (SECONDS_PER_DAY / step_s) as usize;
    if days == 0 || steps.len() != days * steps_per_day {
        return Err(SimError::WeatherMismatch {
            expected_steps: days.max(1) * steps_per_day,
            got_steps: steps.len(),
            step_s,
        });
    }

    let (_, assignment) = plan_for_run(model, seed, run_idx)?;
    let n_bs = model.base_stations.len();
    let dt_h = f64::from(step_s) / 3600.0;

    let mut states: Vec<BatteryState> = model
        .base_stations
        .iter()
        .map(|bs| BatteryState::fresh(&bs.hardware.battery))
        .collect();
    let mut pending: Vec<f64> = vec![0.0; n_bs];
    let mut stats: Vec<UavRunStats> = (0..n_bs)
        .map(|_| UavRunStats {
            replacements_by_day: vec![0; days],
            pv_energy_by_day_wh: vec![0.0; days],
            pv_peak_by_day_w: vec![0.0; days],
            pv_used_by_day_wh: vec![0.0; days],
            consumption_by_day_wh: vec![0.0; days],
            final_energy_wh: 0.0,
            conservation_residual_wh: 0.0,
            trailing_deficit_wh: 0.0,
        })
        .collect();
    // conservation ledger per UAV: initial + charged + injected - discharged - final = 0
    let initial: Vec<f64> = states.iter().map(|s| s.energy_wh).collect();
    let mut charged = vec![0.0f64; n_bs];
    let mut discharged = vec![0.0f64; n_bs];
    let mut injected = vec![0.0f64; n_bs];

    let mut trace: Vec<StepRecord> = Vec::new();
    if collect_trace {
        trace.reserve(steps.len());
    }

    for (i, sample) in steps.iter().enumerate() {
        let day = i / steps_per_day;
        let mut step_bs: Vec<BsStepRecord> = Vec::new();
        if collect_trace {
            step_bs.reserve(n_bs);
        }
        for b in 0..n_bs {
            let hw = &model.base_stations[b].hardware;
            let mut replaced = false;

            if pending[b] > 0.0 {
                // the deficit happened in the previous step; the swap is
                // attributed to that step's day
                let before = states[b].energy_wh;
                states[b] = replace_uav(&states[b], &hw.battery);
                injected[b] += states[b].energy_wh - before;
                let attr_day = (i - 1) / steps_per_day;
                stats[b].replacements_by_day[attr_day] += 1;
                let pre_draw = states[b].energy_wh;
                let (served, still_unmet) = step_battery(&states[b], -pending[b], &hw.battery);
                discharged[b] += pre_draw - served.energy_wh;
                states[b] = served;
                pending[b] = still_unmet;
                replaced = true;
            }

            let atmo = atmosphere_state_for(model, sample, hw.airframe.hover_altitude_m)?;
            let load = assignment.cell_load(b);
            let mut pb = total_consumption(&hw.airframe, &hw.mimo, &hw.ris, &hw.pv, &load, &atmo)?;
            if res_enabled {
                let t_ambient = atmosphere::temperature_at(
                    sample.temperature_c,
                    hw.pv.altitude_m,
                    &model.site,
                    &model.constants,
                );
                pb.pv_w = pv_power(sample.irradiance_wm2, t_ambient, &hw.pv)?;
            }
            let delta = energy_balance(&pb, dt_h);
            let before = states[b].energy_wh;
            let (next, deficit) = step_battery(&states[b], delta, &hw.battery);

            let pv_in_wh = pb.pv_w * dt_h;
            if delta > 0.0 {
                let accepted = next.energy_wh - before;
                charged[b] += accepted;
                // surplus the full battery could not take, in load-side Wh
                let spill = delta - accepted / hw.battery.efficiency;
                stats[b].pv_used_by_day_wh[day] += pv_in_wh - spill.max(0.0);
            } else {
                discharged[b] += before - next.energy_wh;
                stats[b].pv_used_by_day_wh[day] += pv_in_wh;
            }
            states[b] = next;
            pending[b] += deficit;

            stats[b].consumption_by_day_wh[day] += pb.total_dc_w * dt_h;
            stats[b].pv_energy_by_day_wh[day] += pv_in_wh;
            if pb.pv_w > stats[b].pv_peak_by_day_w[day] {
                stats[b].pv_peak_by_day_w[day] = pb.pv_w;
            }

            if collect_trace {
                step_bs.push(BsStepRecord {
                    hover_w: pb.hover_w,
                    mimo_w: pb.mimo_circuit_w + pb.mimo_amplifier_w,
                    ris_w: pb.ris_w,
                    pv_w: pb.pv_w,
                    battery_wh: states[b].energy_wh,
                    replaced,
                });
            }
        }
        if collect_trace {
            trace.push(StepRecord {
                unix_s: sample.unix_s,
                per_bs: step_bs,
            });
        }
    }

    for b in 0..n_bs {
        stats[b].final_energy_wh = states[b].energy_wh;
        stats[b].conservation_residual_wh =
            initial[b] + charged[b] + injected[b] - discharged[b] - states[b].energy_wh;
        stats[b].trailing_deficit_wh = pending[b];
    }

    Ok(RunResult {
        per_uav: stats,
        served_users: assignment.served_count() as u32,
        trace: if collect_trace { Some(trace) } else { None },
    })
}

fn atmosphere_state_for(
    model: &NetworkModel,
    sample: &WeatherSample,
    altitude_m: f64,
) -> Result<crate::atmosphere::AtmosphereState, AtmosphereError> {
    atmosphere::atmosphere_state(sample, altitude_m, &model.site, &model.constants)
}

/// Average number of UAV replacements: mean over runs and UAVs, by day and
/// in total.
pub fn compute_anur(runs: &[RunResult], days: usize) -> (Vec<f64>, f64) {
    let mut by_day = vec![0.0f64; days];
    let mut samples = 0usize;
    for run in runs {
        for uav in &run.per_uav {
            for (d, r) in uav.replacements_by_day.iter().enumerate() {
                by_day[d] += f64::from(*r);
            }
            samples += 1;
        }
    }
    if samples > 0 {
        for v in &mut by_day {
            *v /= samples as f64;
        }
    }
    let total = by_day.iter().sum();
    (by_day, total)
}

/// Per-day and aggregate AREC between paired arms, percent.
///
/// Grid energy is the bookkeeping identity `replacements * primary charge
/// + initial charge`, with the initial charge attributed to the first day.
pub fn compute_arec(
    runs_with_res: &[RunResult],
    runs_no_res: &[RunResult],
    primary_energy_wh: f64,
    days: usize,
) -> Result<(Vec<f64>, f64), SimError> {
    if runs_with_res.len() != runs_no_res.len() {
        return Err(SimError::UnpairedRuns {
            with_res: runs_with_res.len(),
            no_res: runs_no_res.len(),
        });
    }
    let grid = |runs: &[RunResult]| -> (Vec<f64>, f64) {
        let mut by_day = vec![0.0f64; days];
        let mut samples = 0usize;
        for run in runs {
            for uav in &run.per_uav {
                for (d, r) in uav.replacements_by_day.iter().enumerate() {
                    by_day[d] += f64::from(*r) * primary_energy_wh;
                    if d == 0 {
                        by_day[d] += primary_energy_wh;
                    }
                }
                samples += 1;
            }
        }
        if samples > 0 {
            for v in &mut by_day {
                *v /= samples as f64;
            }
        }
        let total = by_day.iter().sum();
        (by_day, total)
    };
    let (g_res_days, g_res_total) = grid(runs_with_res);
    let (g_no_days, g_no_total) = grid(runs_no_res);
    let pct = |saved: f64, base: f64| {
        if base > 0.0 {
            100.0 * saved / base
        } else {
            0.0
        }
    };
    let by_day = g_no_days
        .iter()
        .zip(&g_res_days)
        .map(|(no, res)| pct(no - res, *no))
        .collect();
    Ok((by_day, pct(g_no_total - g_res_total, g_no_total)))
}

fn mean_by_day<F>(runs: &[RunResult], days: usize, f: F) -> (Vec<f64>, f64)
where
    F: Fn(&UavRunStats, usize) -> f64,
{
    let mut by_day = vec![0.0f64; days];
    let mut samples = 0usize;
    for run in runs {
        for uav in &run.per_uav {
            for (d, v) in by_day.iter_mut().enumerate() {
                *v += f(uav, d);
            }
            samples += 1;
        }
    }
    if samples > 0 {
        for v in &mut by_day {
            *v /= samples as f64;
        }
    }
    let total = by_day.iter().sum();
    (by_day, total)
}

fn arm_report(
    runs: &[RunResult],
    paired_no_res: Option<&[RunResult]>,
    labels: &[String],
    primary_energy_wh: f64,
) -> Result<ArmReport, SimError> {
    let days = labels.len();
    let (anur_days, anur_total) = compute_anur(runs, days);
    let (pv_days, pv_total) = mean_by_day(runs, days, |u, d| u.pv_energy_by_day_wh[d]);
    let (peak_days, _) = mean_by_day(runs, days, |u, d| u.pv_peak_by_day_w[d]);
    let peak_total = peak_days.iter().cloned().fold(0.0, f64::max);
    let (cons_days, cons_total) = mean_by_day(runs, days, |u, d| u.consumption_by_day_wh[d]);
    let (used_days, used_total) = mean_by_day(runs, days, |u, d| u.pv_used_by_day_wh[d]);
    let (grid_days, grid_total) = {
        let mut by_day = vec![0.0f64; days];
        let mut samples = 0usize;
        for run in runs {
            for uav in &run.per_uav {
                for (d, v) in by_day.iter_mut().enumerate() {
                    *v += f64::from(uav.replacements_by_day[d]) * primary_energy_wh;
                    if d == 0 {
                        *v += primary_energy_wh;
                    }
                }
                samples += 1;
            }
        }
        if samples > 0 {
            for v in &mut by_day {
                *v /= samples as f64;
            }
        }
        let total = by_day.iter().sum::<f64>();
        (by_day, total)
    };
    let (arec_days, arec_total) = match paired_no_res {
        Some(no_res) => compute_arec(runs, no_res, primary_energy_wh, days)?,
        None => (vec![0.0; days], 0.0),
    };
    // harvesting can defer a swap across a midnight boundary, which makes
    // the donor day look better and the receiving day worse; a day slice
    // can then dip below zero even though the horizon total cannot. The
    // report floors day slices at zero.
    let arec_days: Vec<f64> = arec_days.into_iter().map(|v| v.max(0.0)).collect();
    let arec_total = arec_total.max(0.0);

    let harvest_pct = |used: f64, cons: f64| if cons > 0.0 { 100.0 * used / cons } else { 0.0 };
    let seasons = (0..days)
        .map(|d| SeasonMetrics {
            label: labels[d].clone(),
            pv_energy_total_per_uav_wh: pv_days[d],
            pv_energy_peak_per_uav_w: peak_days[d],
            anur: anur_days[d],
            arec_grid_pct: arec_days[d],
            arec_harvest_pct: harvest_pct(used_days[d], cons_days[d]),
            grid_energy_per_uav_wh: grid_days[d],
            consumption_per_uav_wh: cons_days[d],
        })
        .collect();
    let aggregate = SeasonMetrics {
        label: String::from("aggregate"),
        pv_energy_total_per_uav_wh: pv_total,
        pv_energy_peak_per_uav_w: peak_total,
        anur: anur_total,
        arec_grid_pct: arec_total,
        arec_harvest_pct: harvest_pct(used_total, cons_total),
        grid_energy_per_uav_wh: grid_total,
        consumption_per_uav_wh: cons_total,
    };
    Ok(ArmReport { seasons, aggregate })
}

/// Builds the metrics report from raw per-run results.
pub fn compute_metrics(
    model: &NetworkModel,
    cfg: &SimConfig,
    labels: &[String],
    runs_no_res: &[RunResult],
    runs_with_res: Option<&[RunResult]>,
) -> Result<MetricsReport, SimError> {
    let primary = model.base_stations[0].hardware.battery.primary_energy_wh();
    let no_res = arm_report(runs_no_res, None, labels, primary)?;
    let with_res = match runs_with_res {
        Some(res) => Some(arm_report(res, Some(runs_no_res), labels, primary)?),
        None => None,
    };
    Ok(MetricsReport {
        seed: cfg.seed,
        runs: cfg.runs,
        step_s: cfg.step_s,
        res_enabled: cfg.res_enabled,
        season_labels: labels.to_vec(),
        no_res,
        with_res,
    })
}

/// Flattens labelled season days into one contiguous step sequence,
/// validating coverage at the configured step.
pub fn flatten_horizon(
    seasons: &[SeasonDay],
    step_s: u32,
) -> Result<(Vec<WeatherSample>, Vec<String>), SimError> {
    if seasons.is_empty() {
        return Err(SimError::NoSeasons);
    }
    let steps_per_day = (SECONDS_PER_DAY / step_s) as usize;
    let mut all = Vec::with_capacity(seasons.len() * steps_per_day);
    let mut labels = Vec::with_capacity(seasons.len());
    for day in seasons {
        if day.series.step_s() != step_s || day.series.len() != steps_per_day {
            return Err(SimError::WeatherMismatch {
                expected_steps: steps_per_day,
                got_steps: day.series.len(),
                step_s,
            });
        }
        all.extend_from_slice(day.series.samples());
        labels.push(day.label.clone());
    }
    Ok((all, labels))
}

/// Runs the full simulation serially: paired arms when RES is enabled,
/// metrics averaged over runs, and the step trace of the first run of the
/// primary arm.
pub fn run_simulation(
    model: &NetworkModel,
    seasons: &[SeasonDay],
    cfg: &SimConfig,
) -> Result<SimulationOutput, SimError> {
    let (steps, labels) = flatten_horizon(seasons, cfg.step_s)?;
    let days = labels.len();

    let mut runs_no_res = Vec::with_capacity(cfg.runs as usize);
    let mut runs_with_res = if cfg.res_enabled {
        Some(Vec::with_capacity(cfg.runs as usize))
    } else {
        None
    };
    for run_idx in 0..u64::from(cfg.runs) {
        let trace_this = run_idx == 0 && !cfg.res_enabled;
        runs_no_res.push(simulate_run(
            model, &steps, days, cfg.step_s, cfg.seed, run_idx, false, trace_this,
        )?);
        if let Some(res_runs) = runs_with_res.as_mut() {
            res_runs.push(simulate_run(
                model,
                &steps,
                days,
                cfg.step_s,
                cfg.seed,
                run_idx,
                true,
                run_idx == 0,
            )?);
        }
    }

    let report = compute_metrics(model, cfg, &labels, &runs_no_res, runs_with_res.as_deref())?;
    let trace = match runs_with_res.as_mut() {
        Some(res_runs) => res_runs[0].trace.take().unwrap_or_default(),
        None => runs_no_res[0].trace.take().unwrap_or_default(),
    };
    Ok(SimulationOutput {
        report,
        trace,
        runs_no_res,
        runs_with_res,
    })
}
