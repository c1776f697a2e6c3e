//! Command-line front-end.
//!
//! Subcommands: `run` (simulate and emit results), `validate` (check a
//! configuration and show its diff against the built-in defaults),
//! `sweep` (Cartesian parameter grids), `gen-weather` (synthetic weather
//! CSVs), and `explain` (derived quantities of the resolved
//! configuration). Outputs land in the `--output` directory; nothing else
//! is written.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use aerocell_core::plan::dbm_to_w;
use aerocell_core::power::package_mass;
use aerocell_core::power::{mimo_circuit_power, ris_power, CellLoad, PowerUnit};
use aerocell_core::sim::SimulationOutput;

use crate::config::{
    apply_override, diff_paths, env_overrides, load_config, Config, Override, SeasonPreset,
    SyntheticWeatherConfig,
};
use crate::weather_io::{build_season_days, save_weather_csv, synthetic_day};
use crate::{emit, runner, AppError};

#[derive(Debug, Parser)]
#[command(
    name = "aerocell",
    version,
    about = "UAV base-station energy prosumption simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the simulation and write metrics, the step trace, and plots.
    Run(RunArgs),
    /// Check a configuration and print its diff against the defaults.
    Validate(ConfigArgs),
    /// Run a Cartesian grid of configurations and tabulate the metrics.
    Sweep(SweepArgs),
    /// Generate a synthetic clear-sky weather CSV.
    GenWeather(GenWeatherArgs),
    /// Print the resolved configuration and derived quantities.
    Explain(ExplainArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PshifterUnits {
    W,
    Mw,
}

/// Configuration selection and override flags shared by subcommands.
#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Configuration file (JSON); built-in defaults when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override a configuration field by dotted path, e.g. -O sim.runs=3.
    #[arg(short = 'O', long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Master seed (shorthand for -O sim.seed=...).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Disable PV harvesting (shorthand for -O sim.res_enabled=false).
    #[arg(long)]
    pub no_res: bool,
    /// Add the local-oscillator term to the transceiver circuit power.
    #[arg(long)]
    pub include_lo: bool,
    /// Interpret the configured phase-shifter power as W or mW.
    #[arg(long, value_enum)]
    pub pshifter_units: Option<PshifterUnits>,
}

impl ConfigArgs {
    /// Resolves the configuration: file < environment < flags.
    pub fn load(&self) -> Result<Config, AppError> {
        let env = env_overrides(std::env::vars());
        let mut flags: Vec<Override> = self
            .overrides
            .iter()
            .map(|s| Override::parse(s))
            .collect::<Result<_, _>>()?;
        if let Some(seed) = self.seed {
            flags.push(Override {
                path: "sim.seed".into(),
                value: seed.to_string(),
            });
        }
        if self.no_res {
            flags.push(Override {
                path: "sim.res_enabled".into(),
                value: "false".into(),
            });
        }
        if self.include_lo {
            flags.push(Override {
                path: "mimo.include_oscillator".into(),
                value: "true".into(),
            });
        }
        if let Some(units) = self.pshifter_units {
            flags.push(Override {
                path: "ris.phase_shifter_unit".into(),
                value: match units {
                    PshifterUnits::W => "w".into(),
                    PshifterUnits::Mw => "mw".into(),
                },
            });
        }
        load_config(self.config.as_deref(), &env, &flags)
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub output: PathBuf,
    /// Also write SVG charts of battery trajectories and PV output.
    #[arg(long)]
    pub plot: bool,
    /// Worker thread cap for the Monte Carlo runs.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Grid axis as KEY=V1,V2,..., repeatable; axes combine as a product.
    #[arg(long = "grid", value_name = "KEY=V1,V2,...")]
    pub grids: Vec<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub output: PathBuf,
    /// Refuse grids larger than this many points.
    #[arg(long, default_value_t = 1000)]
    pub max_points: usize,
    /// Worker thread cap for the Monte Carlo runs.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct GenWeatherArgs {
    /// Season preset: vernal_equinox, summer_solstice, autumn_equinox,
    /// winter_solstice.
    #[arg(long, conflicts_with_all = ["day_of_year", "peak", "t_day", "t_night"])]
    pub season: Option<String>,
    #[arg(long)]
    pub day_of_year: Option<u32>,
    /// Solar-noon irradiance, W/m².
    #[arg(long)]
    pub peak: Option<f64>,
    /// Daily maximum temperature, °C.
    #[arg(long)]
    pub t_day: Option<f64>,
    /// Daily minimum temperature, °C.
    #[arg(long)]
    pub t_night: Option<f64>,
    /// Latitude, degrees north.
    #[arg(long, default_value_t = 52.4)]
    pub latitude: f64,
    /// Constant reference-level pressure, Pa.
    #[arg(long, default_value_t = 101_325.0)]
    pub pressure: f64,
    /// Sample spacing, seconds.
    #[arg(long, default_value_t = 60)]
    pub step: u32,
    /// Year anchoring the timestamps.
    #[arg(long, default_value_t = 2022)]
    pub year: i32,
    /// Output CSV path.
    #[arg(long, default_value = "out/weather.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Print the resolved configuration as JSON instead of the summary.
    #[arg(long)]
    pub json: bool,
}

/// Entry point used by `main`; returns the process exit code indirectly
/// through `AppError::exit_code`.
pub fn dispatch(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Run(args) => run(&args),
        Command::Validate(args) => validate(&args),
        Command::Sweep(args) => sweep(&args),
        Command::GenWeather(args) => gen_weather(&args),
        Command::Explain(args) => explain(&args),
    }
}

fn ensure_dir(path: &Path) -> Result<(), AppError> {
    std::fs::create_dir_all(path).map_err(|e| AppError::io(path, e))
}

fn simulate(cfg: &Config, threads: usize) -> Result<SimulationOutput, AppError> {
    let model = cfg.to_network_model();
    let days = build_season_days(&cfg.weather, cfg.sim.step_s)?;
    runner::execute(&model, &days, &cfg.sim, threads).map_err(AppError::from)
}

fn run(args: &RunArgs) -> Result<(), AppError> {
    let cfg = args.config.load()?;
    let out = simulate(&cfg, args.threads)?;
    ensure_dir(&args.output)?;
    emit::write_metrics_json(&args.output.join("metrics.json"), &out.report)?;
    emit::write_steps_csv(&args.output.join("steps.csv"), &out.trace)?;
    if args.plot {
        emit::write_battery_svg(&args.output.join("battery.svg"), &out.trace)?;
        emit::write_pv_svg(&args.output.join("pv.svg"), &out.trace)?;
    }

    let primary = out.report.with_res.as_ref().unwrap_or(&out.report.no_res);
    println!(
        "runs: {}   seed: {}   res: {}",
        out.report.runs, out.report.seed, out.report.res_enabled
    );
    println!(
        "{:<18} {:>10} {:>10} {:>8} {:>10} {:>12}",
        "season", "pv [Wh]", "peak [W]", "anur", "arec [%]", "grid [Wh]"
    );
    for season in primary.seasons.iter().chain([&primary.aggregate]) {
        println!(
            "{:<18} {:>10.2} {:>10.2} {:>8.3} {:>10.3} {:>12.1}",
            season.label,
            season.pv_energy_total_per_uav_wh,
            season.pv_energy_peak_per_uav_w,
            season.anur,
            season.arec_grid_pct,
            season.grid_energy_per_uav_wh,
        );
    }
    println!("wrote {}", args.output.join("metrics.json").display());
    Ok(())
}

fn validate(args: &ConfigArgs) -> Result<(), AppError> {
    // load_config already fails on violations; reaching here means valid
    let cfg = args.load()?;
    println!("configuration is valid");
    let resolved = serde_json::to_value(&cfg).expect("config serializes");
    let defaults = serde_json::to_value(Config::default()).expect("config serializes");
    let diff = diff_paths(&defaults, &resolved);
    if diff.is_empty() {
        println!("matches the built-in defaults exactly");
    } else {
        println!("fields differing from the built-in defaults:");
        let pointer = |v: &serde_json::Value, path: &str| -> String {
            let p = format!("/{}", path.replace('.', "/"));
            v.pointer(&p).map(|x| x.to_string()).unwrap_or_default()
        };
        for path in diff {
            println!(
                "  {path}: {} (default {})",
                pointer(&resolved, &path),
                pointer(&defaults, &path)
            );
        }
    }
    Ok(())
}

fn parse_grid_axis(spec: &str) -> Result<(String, Vec<String>), AppError> {
    let (key, values) = spec
        .split_once('=')
        .ok_or_else(|| AppError::config(format!("grid '{spec}' must be KEY=V1,V2,...")))?;
    let values: Vec<String> = values
        .split(',')
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect();
    if key.is_empty() || values.is_empty() {
        return Err(AppError::config(format!("grid '{spec}' has no values")));
    }
    Ok((key.to_string(), values))
}

fn sweep(args: &SweepArgs) -> Result<(), AppError> {
    if args.grids.is_empty() {
        return Err(AppError::config("sweep needs at least one --grid axis"));
    }
    let axes: Vec<(String, Vec<String>)> = args
        .grids
        .iter()
        .map(|g| parse_grid_axis(g))
        .collect::<Result<_, _>>()?;
    let points: usize = axes.iter().map(|(_, v)| v.len()).product();
    if points > args.max_points {
        return Err(AppError::config(format!(
            "grid has {points} points, above the cap of {}",
            args.max_points
        )));
    }

    let base = args.config.load()?;
    let base_value = serde_json::to_value(&base).expect("config serializes");

    ensure_dir(&args.output)?;
    let csv_path = args.output.join("sweep.csv");
    let mut rows = Vec::new();
    let mut header: Vec<String> = axes.iter().map(|(k, _)| k.clone()).collect();
    header.extend(
        [
            "anur_no_res",
            "anur_with_res",
            "arec_grid_pct",
            "pv_total_wh",
        ]
        .map(String::from),
    );
    rows.push(header.join(","));

    let mut index = vec![0usize; axes.len()];
    for _ in 0..points {
        let assignment: Vec<(String, String)> = axes
            .iter()
            .zip(&index)
            .map(|((k, vs), &i)| (k.clone(), vs[i].clone()))
            .collect();
        let mut value = base_value.clone();
        for (path, raw) in &assignment {
            apply_override(
                &mut value,
                &Override {
                    path: path.clone(),
                    value: raw.clone(),
                },
            )?;
        }
        let cfg: Config =
            serde_json::from_value(value).map_err(|e| AppError::config(e.to_string()))?;
        let violations = cfg.violations();
        if !violations.is_empty() {
            return Err(AppError::config(format!(
                "grid point {:?} invalid: {}",
                assignment,
                violations.join("; ")
            )));
        }
        let out = simulate(&cfg, args.threads)?;
        let mut row: Vec<String> = assignment.iter().map(|(_, v)| v.clone()).collect();
        row.push(format!("{}", out.report.no_res.aggregate.anur));
        match &out.report.with_res {
            Some(arm) => {
                row.push(format!("{}", arm.aggregate.anur));
                row.push(format!("{}", arm.aggregate.arec_grid_pct));
                row.push(format!("{}", arm.aggregate.pv_energy_total_per_uav_wh));
            }
            None => {
                row.push(String::new());
                row.push("0".into());
                row.push("0".into());
            }
        }
        rows.push(row.join(","));

        // advance the mixed-radix counter
        for (slot, (_, values)) in index.iter_mut().zip(&axes) {
            *slot += 1;
            if *slot < values.len() {
                break;
            }
            *slot = 0;
        }
    }

    let text = rows.join("\n") + "\n";
    std::fs::write(&csv_path, &text).map_err(|e| AppError::io(&csv_path, e))?;
    print!("{text}");
    println!("wrote {}", csv_path.display());
    Ok(())
}

fn gen_weather(args: &GenWeatherArgs) -> Result<(), AppError> {
    let preset = match &args.season {
        Some(name) => crate::config::default_season_presets()
            .into_iter()
            .find(|p| p.label == *name)
            .ok_or_else(|| {
                AppError::config(format!(
                    "unknown season '{name}'; expected one of vernal_equinox, summer_solstice, autumn_equinox, winter_solstice"
                ))
            })?,
        None => SeasonPreset {
            label: "custom".into(),
            day_of_year: args.day_of_year.ok_or_else(|| {
                AppError::config("either --season or --day-of-year is required")
            })?,
            peak_irradiance_wm2: args
                .peak
                .ok_or_else(|| AppError::config("--peak is required without --season"))?,
            day_temp_c: args
                .t_day
                .ok_or_else(|| AppError::config("--t-day is required without --season"))?,
            night_temp_c: args
                .t_night
                .ok_or_else(|| AppError::config("--t-night is required without --season"))?,
        },
    };
    let synth = SyntheticWeatherConfig {
        year: args.year,
        latitude_deg: args.latitude,
        pressure_pa: args.pressure,
        seasons: vec![preset.clone()],
    };
    let series = synthetic_day(&synth, &preset, args.step)?;
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            ensure_dir(parent)?;
        }
    }
    save_weather_csv(&args.out, &series)?;
    println!(
        "wrote {} ({} samples, {})",
        args.out.display(),
        series.len(),
        preset.label
    );
    Ok(())
}

fn explain(args: &ExplainArgs) -> Result<(), AppError> {
    let cfg = args.config.load()?;
    if args.json {
        let text =
            serde_json::to_string_pretty(&cfg).map_err(|e| AppError::config(e.to_string()))?;
        println!("{text}");
        return Ok(());
    }
    let model = cfg.to_network_model();
    let hw = &model.base_stations[0].hardware;

    let pkg = package_mass(&hw.mimo, &hw.ris, &hw.pv, &hw.airframe);
    println!("deployment");
    println!("  base stations: {}", model.base_stations.len());
    println!("  users: {}", model.population.count);
    println!(
        "  area: {:.0} x {:.0} m",
        model.bounds.width_m(),
        model.bounds.height_m()
    );
    println!("airframe");
    println!(
        "  package mass: {pkg} kg (airframe {} kg)",
        hw.airframe.mass_kg
    );
    println!("battery");
    println!("  capacity: {:.1} Wh", hw.battery.max_energy_wh());
    println!("  usable floor: {:.1} Wh", hw.battery.floor_wh());
    println!("  fresh charge: {:.1} Wh", hw.battery.primary_energy_wh());
    println!("ris");
    println!(
        "  phase shifter reading: {} {}",
        hw.ris.phase_shifter_power,
        match hw.ris.phase_shifter_unit {
            PowerUnit::W => "W",
            PowerUnit::Mw => "mW",
        }
    );
    println!("  array power: {} W", ris_power(&hw.ris));
    println!("mimo");
    let idle = CellLoad {
        users: 0,
        active_antennas: hw.mimo.max_antennas,
        transmit_power_w: 0.0,
        dl_traffic_gbps: 0.0,
        ul_traffic_gbps: 0.0,
    };
    if let Ok(p) = mimo_circuit_power(&idle, &hw.mimo) {
        println!("  circuit power, no users: {p:.3} W");
    }
    let per_bs = model.population.count as f64 / model.base_stations.len() as f64;
    let loaded = CellLoad {
        users: per_bs.round() as u32,
        active_antennas: hw.mimo.max_antennas,
        transmit_power_w: 0.0,
        dl_traffic_gbps: per_bs * model.population.demand_dl_mbps / 1000.0,
        ul_traffic_gbps: per_bs * model.population.demand_dl_mbps / 1000.0
            * (hw.mimo.ul_duty / hw.mimo.dl_duty),
    };
    if let Ok(p) = mimo_circuit_power(&loaded, &hw.mimo) {
        println!("  circuit power, {} users: {p:.3} W", loaded.users);
    }
    println!(
        "link budget (demand {} Mbit/s)",
        model.population.demand_dl_mbps
    );
    println!("  level  dBm      W        MAPL dB   LOS reach m");
    for &dbm in &model.link_budget.tx_power_levels_dbm {
        let mapl = aerocell_core::plan::max_allowable_path_loss(
            model.population.demand_dl_mbps,
            dbm,
            model.population.antenna_gain_dbi,
            &model.link_budget,
            &hw.mimo,
        );
        match mapl {
            Some(mapl) => {
                // invert the LOS slope for the 3D reach
                let f_ghz = model.link_budget.carrier_mhz / 1000.0;
                let reach = 10f64.powf((mapl - 28.0 - 20.0 * f_ghz.log10()) / 22.0);
                println!(
                    "  {dbm:>5} {:>8.3} {mapl:>12.2} {reach:>12.0}",
                    dbm_to_w(dbm)
                );
            }
            None => println!("  {dbm:>5}  unreachable demand"),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn grid_axis_parsing() {
        let (k, v) = parse_grid_axis("pv.parallel_count=0,5,10").unwrap();
        assert_eq!(k, "pv.parallel_count");
        assert_eq!(v, vec!["0", "5", "10"]);
        assert!(parse_grid_axis("nope").is_err());
        assert!(parse_grid_axis("k=").is_err());
    }
}
