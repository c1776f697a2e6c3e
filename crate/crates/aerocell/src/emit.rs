//! Result emission: metrics JSON, the per-step CSV, and optional SVG
//! charts of battery trajectories and PV output.

use std::io::Write;
use std::path::Path;

use chrono::{DateTime, Utc};

use aerocell_core::sim::{MetricsReport, StepRecord};

use crate::AppError;

/// Serializes the metrics report. Deterministic for identical reports:
/// key order follows the struct definitions and floats use shortest
/// round-trip formatting.
pub fn metrics_json(report: &MetricsReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn write_metrics_json(path: &Path, report: &MetricsReport) -> Result<(), AppError> {
    std::fs::write(path, metrics_json(report)).map_err(|e| AppError::io(path, e))
}

fn format_timestamp(unix_s: i64) -> String {
    DateTime::<Utc>::from_timestamp(unix_s, 0)
        .map(|dt| dt.format("%Y-%m-%dT%H:%M:%SZ").to_string())
        .unwrap_or_else(|| unix_s.to_string())
}

/// Writes the step trace, one row per step and base station:
/// `t,bs_id,p_hover,p_mimo,p_ris,p_pv,e_batt,replaced`.
pub fn write_steps_csv(path: &Path, trace: &[StepRecord]) -> Result<(), AppError> {
    let file = std::fs::File::create(path).map_err(|e| AppError::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let io_err = |e: std::io::Error| AppError::io(path, e);
    writeln!(w, "t,bs_id,p_hover,p_mimo,p_ris,p_pv,e_batt,replaced").map_err(io_err)?;
    for rec in trace {
        let ts = format_timestamp(rec.unix_s);
        for (bs_id, bs) in rec.per_bs.iter().enumerate() {
            writeln!(
                w,
                "{ts},{bs_id},{},{},{},{},{},{}",
                bs.hover_w,
                bs.mimo_w,
                bs.ris_w,
                bs.pv_w,
                bs.battery_wh,
                u8::from(bs.replaced)
            )
            .map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

/// A minimal polyline chart. One series per line, shared axes, no
/// dependencies beyond the SVG spec itself.
fn polyline_chart(title: &str, series: &[(String, Vec<f64>)]) -> String {
    const W: f64 = 960.0;
    const H: f64 = 320.0;
    const MARGIN: f64 = 42.0;
    let palette = [
        "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    ];

    let n = series.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, values) in series {
        for &v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo).abs() < 1e-12 {
        hi = lo + 1.0;
    }
    let x = |i: usize| MARGIN + (W - 2.0 * MARGIN) * i as f64 / (n.max(2) - 1) as f64;
    let y = |v: f64| H - MARGIN - (H - 2.0 * MARGIN) * (v - lo) / (hi - lo);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n  <text x=\"{}\" y=\"18\" \
         font-family=\"sans-serif\" font-size=\"13\">{title}</text>\n",
        MARGIN
    ));
    svg.push_str(&format!(
        "  <line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"#333\"/>\n  \
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"#333\"/>\n",
        m = MARGIN,
        r = W - MARGIN,
        t = MARGIN,
        b = H - MARGIN
    ));
    svg.push_str(&format!(
        "  <text x=\"4\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{hi:.1}</text>\n  \
         <text x=\"4\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{lo:.1}</text>\n",
        MARGIN + 4.0,
        H - MARGIN
    ));
    for (k, (label, values)) in series.iter().enumerate() {
        let color = palette[k % palette.len()];
        let points: Vec<String> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| format!("{:.2},{:.2}", x(i), y(v)))
            .collect();
        svg.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1\" points=\"{}\"/>\n",
            points.join(" ")
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             fill=\"{color}\">{label}</text>\n",
            W - MARGIN + 4.0,
            MARGIN + 14.0 * k as f64
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Battery trajectories of every base station over the horizon.
pub fn write_battery_svg(path: &Path, trace: &[StepRecord]) -> Result<(), AppError> {
    let n_bs = trace.first().map(|r| r.per_bs.len()).unwrap_or(0);
    let series: Vec<(String, Vec<f64>)> = (0..n_bs)
        .map(|b| {
            (
                format!("bs{b}"),
                trace.iter().map(|r| r.per_bs[b].battery_wh).collect(),
            )
        })
        .collect();
    let svg = polyline_chart("Stored battery energy per UAV [Wh]", &series);
    std::fs::write(path, svg).map_err(|e| AppError::io(path, e))
}

/// PV output of the first base station over the horizon (panels and
/// weather are fleet-wide, so one curve stands for all).
pub fn write_pv_svg(path: &Path, trace: &[StepRecord]) -> Result<(), AppError> {
    let values: Vec<f64> = trace
        .iter()
        .map(|r| r.per_bs.first().map(|b| b.pv_w).unwrap_or(0.0))
        .collect();
    let svg = polyline_chart("PV output per UAV [W]", &[("pv".to_string(), values)]);
    std::fs::write(path, svg).map_err(|e| AppError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use aerocell_core::sim::BsStepRecord;

    fn trace(steps: usize, bs: usize) -> Vec<StepRecord> {
        (0..steps)
            .map(|i| StepRecord {
                unix_s: 1_647_734_400 + (i as i64) * 60,
                per_bs: (0..bs)
                    .map(|b| BsStepRecord {
                        hover_w: 51.0,
                        mimo_w: 40.0 + b as f64,
                        ris_w: 0.1248,
                        pv_w: i as f64,
                        battery_wh: 700.0 - i as f64,
                        replaced: i == 2,
                    })
                    .collect(),
            })
            .collect()
    }

    #[test]
    fn csv_has_one_row_per_step_and_station() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("steps.csv");
        write_steps_csv(&path, &trace(5, 3)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + 5 * 3);
        assert_eq!(
            lines[0],
            "t,bs_id,p_hover,p_mimo,p_ris,p_pv,e_batt,replaced"
        );
        assert!(lines[1].starts_with("2022-03-20T00:00:00Z,0,51,40,0.1248,0,700,0"));
    }

    #[test]
    fn svg_emission_is_self_contained() {
        let dir = tempfile::tempdir().unwrap();
        let bpath = dir.path().join("battery.svg");
        let ppath = dir.path().join("pv.svg");
        write_battery_svg(&bpath, &trace(10, 2)).unwrap();
        write_pv_svg(&ppath, &trace(10, 2)).unwrap();
        let svg = std::fs::read_to_string(&bpath).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("polyline"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
