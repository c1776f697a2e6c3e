//! Run orchestration: executes the Monte Carlo runs serially or across a
//! capped pool of worker threads. Aggregation is by run index either way,
//! so the thread count never changes the output.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use aerocell_core::sim::{
    compute_metrics, flatten_horizon, run_simulation, simulate_run, NetworkModel, RunResult,
    SeasonDay, SimConfig, SimError, SimulationOutput,
};

/// Runs the simulation with at most `threads` workers.
pub fn execute(
    model: &NetworkModel,
    seasons: &[SeasonDay],
    cfg: &SimConfig,
    threads: usize,
) -> Result<SimulationOutput, SimError> {
    if threads <= 1 || cfg.runs <= 1 {
        return run_simulation(model, seasons, cfg);
    }
    let (steps, labels) = flatten_horizon(seasons, cfg.step_s)?;
    let days = labels.len();

    type Slot = Option<Result<(RunResult, Option<RunResult>), SimError>>;
    let results: Mutex<Vec<Slot>> = Mutex::new(vec![None; cfg.runs as usize]);
    let next_run = AtomicU64::new(0);
    let workers = threads.min(cfg.runs as usize);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let run_idx = next_run.fetch_add(1, Ordering::Relaxed);
                if run_idx >= u64::from(cfg.runs) {
                    break;
                }
                let trace_this = run_idx == 0;
                let no_res = simulate_run(
                    model,
                    &steps,
                    days,
                    cfg.step_s,
                    cfg.seed,
                    run_idx,
                    false,
                    trace_this && !cfg.res_enabled,
                );
                let outcome = no_res.and_then(|no_res| {
                    if cfg.res_enabled {
                        simulate_run(
                            model, &steps, days, cfg.step_s, cfg.seed, run_idx, true, trace_this,
                        )
                        .map(|res| (no_res, Some(res)))
                    } else {
                        Ok((no_res, None))
                    }
                });
                results.lock().unwrap()[run_idx as usize] = Some(outcome);
            });
        }
    });

    let mut runs_no_res = Vec::with_capacity(cfg.runs as usize);
    let mut runs_with_res = if cfg.res_enabled {
        Some(Vec::new())
    } else {
        None
    };
    for slot in results.into_inner().unwrap() {
        let (no_res, with_res) = slot.expect("every run index was claimed")?;
        runs_no_res.push(no_res);
        if let (Some(all), Some(one)) = (runs_with_res.as_mut(), with_res) {
            all.push(one);
        }
    }

    let report = compute_metrics(model, cfg, &labels, &runs_no_res, runs_with_res.as_deref())?;
    let trace = match runs_with_res.as_mut() {
        Some(res) => res[0].trace.take().unwrap_or_default(),
        None => runs_no_res[0].trace.take().unwrap_or_default(),
    };
    Ok(SimulationOutput {
        report,
        trace,
        runs_no_res,
        runs_with_res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use crate::weather_io::build_season_days;

    #[test]
    fn thread_count_does_not_change_results() {
        let mut cfg = Config::default();
        cfg.scenario.population.count = 20;
        cfg.scenario.base_stations.truncate(3);
        cfg.sim.runs = 4;
        cfg.sim.seed = 123;
        let model = cfg.to_network_model();
        let days = build_season_days(&cfg.weather, cfg.sim.step_s).unwrap();
        let days = &days[..2];

        let serial = execute(&model, days, &cfg.sim, 1).unwrap();
        let parallel = execute(&model, days, &cfg.sim, 4).unwrap();
        assert_eq!(serial.report, parallel.report);
        assert_eq!(serial.trace, parallel.trace);
        assert_eq!(serial.runs_no_res, parallel.runs_no_res);
    }

    #[test]
    fn metrics_json_round_trips_the_schema() {
        let mut cfg = Config::default();
        cfg.scenario.population.count = 10;
        cfg.scenario.base_stations.truncate(2);
        cfg.sim.runs = 1;
        let model = cfg.to_network_model();
        let days = build_season_days(&cfg.weather, cfg.sim.step_s).unwrap();
        let out = execute(&model, &days[..1], &cfg.sim, 1).unwrap();
        let text = crate::emit::metrics_json(&out.report);
        let parsed: aerocell_core::sim::MetricsReport = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, out.report);
    }
}
