//! End-to-end exercise of the public API as an external consumer sees it:
//! build a model, generate weather, plan, simulate both arms, and check
//! the cross-module invariants.

use aerocell_core::atmosphere::{AtmoConstants, SitePosition};
use aerocell_core::plan::{plan_cells, Area, UavBaseStation, UavHardware};
use aerocell_core::sim::{
    draw_users, run_simulation, NetworkModel, SeasonDay, SimConfig, UePopulation,
};
use aerocell_core::weather::{synthetic_clear_sky, ClearSkyParams};
use aerocell_core::LinkBudgetParams;

fn model() -> NetworkModel {
    let bounds = Area {
        x_min_m: 0.0,
        y_min_m: 0.0,
        x_max_m: 1400.0,
        y_max_m: 700.0,
    };
    NetworkModel {
        bounds,
        base_stations: vec![
            UavBaseStation {
                x_m: 350.0,
                y_m: 350.0,
                hardware: UavHardware::default(),
            },
            UavBaseStation {
                x_m: 1050.0,
                y_m: 350.0,
                hardware: UavHardware::default(),
            },
        ],
        population: UePopulation {
            count: 30,
            ..UePopulation::default()
        },
        link_budget: LinkBudgetParams::default(),
        site: SitePosition::default(),
        constants: AtmoConstants::default(),
    }
}

fn season(label: &str, day_of_year: u32, peak: f64) -> SeasonDay {
    SeasonDay {
        label: label.into(),
        series: synthetic_clear_sky(&ClearSkyParams {
            day_of_year,
            latitude_deg: 52.4,
            peak_irradiance_wm2: peak,
            day_temp_c: 18.0,
            night_temp_c: 8.0,
            pressure_pa: 101_325.0,
            step_s: 60,
        })
        .unwrap(),
    }
}

#[test]
fn paired_two_day_simulation_holds_its_invariants() {
    let model = model();
    let days = [season("bright", 172, 800.0), season("dim", 266, 300.0)];
    let cfg = SimConfig {
        runs: 3,
        seed: 21,
        ..SimConfig::default()
    };
    let out = run_simulation(&model, &days, &cfg).unwrap();

    // every drawn user is coverable in this compact layout
    let plan = plan_cells(
        &aerocell_core::Scenario {
            bounds: model.bounds,
            base_stations: model.base_stations.clone(),
            users: draw_users(&model, cfg.seed, 0),
        },
        &model.link_budget,
        &model.base_stations[0].hardware.mimo,
    )
    .unwrap();
    assert_eq!(plan.served_count(), 30);
    assert_eq!(out.runs_no_res[0].served_users, 30);

    let report = &out.report;
    assert_eq!(report.season_labels, vec!["bright", "dim"]);
    let res = report.with_res.as_ref().unwrap();
    assert!(res.aggregate.anur <= report.no_res.aggregate.anur);
    assert!(res.aggregate.pv_energy_total_per_uav_wh > 0.0);
    assert!(res.aggregate.arec_grid_pct >= 0.0);
    assert!(res.aggregate.arec_harvest_pct >= 0.0 && res.aggregate.arec_harvest_pct <= 100.0);
    for season in &res.seasons {
        assert!(season.anur >= 0.0);
        assert!(season.arec_grid_pct >= 0.0 && season.arec_grid_pct <= 100.0);
    }
    // two days of sixty-second steps for two stations
    assert_eq!(out.trace.len(), 2 * 1440);
    assert!(out.trace.iter().all(|r| r.per_bs.len() == 2));
    // conservation per run and UAV
    for run in out.runs_with_res.as_ref().unwrap() {
        for uav in &run.per_uav {
            assert!(uav.conservation_residual_wh.abs() <= 1e-6);
        }
    }
}
