use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::SweepResult;
use crate::error::{Error, Result};

/// Seventeen significant digits: enough to round-trip any `f64`.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn columns(result: &SweepResult) -> (Vec<String>, Vec<(usize, Vec<f64>)>) {
    let mut header = vec!["d".to_string()];
    header.extend(result.series.iter().map(|s| s.state_label().to_string()));
    if result.bounds.is_some() {
        header.extend(result.series.iter().map(|s| format!("bound_{}", s.state_label())));
    }
    let dims = result.series.first().map(|s| s.dims()).unwrap_or_default();
    let rows = dims
        .iter()
        .enumerate()
        .map(|(r, &d)| {
            let mut vals: Vec<f64> = result.series.iter().map(|s| s.rows()[r].1).collect();
            if let Some(b) = &result.bounds {
                vals.extend(b);
            }
            (d, vals)
        })
        .collect();
    (header, rows)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Wide CSV: `d,m0,m1,…` plus `bound_m0,…` when bounds were requested.
pub fn write_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let (header, rows) = columns(result);
    let mut out = header.join(",");
    out.push('\n');
    for (d, vals) in rows {
        out.push_str(&d.to_string());
        for v in vals {
            out.push(',');
            out.push_str(&num(v));
        }
        out.push('\n');
    }
    write_file(path, &out)
}

/// Paths written by [`emit_plotdata`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlotFiles {
    pub data: PathBuf,
    pub script: PathBuf,
}

fn gp_quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

/// Whitespace-separated data at `path` and a gnuplot script next to it
/// (same stem, `.gp`): error against `d` as points, bounds as lines.
pub fn emit_plotdata(result: &SweepResult, path: &Path) -> Result<PlotFiles> {
    let (header, rows) = columns(result);
    let mut data = format!("# {}\n", header.join(" "));
    for (d, vals) in rows {
        data.push_str(&d.to_string());
        for v in vals {
            data.push(' ');
            data.push_str(&num(v));
        }
        data.push('\n');
    }
    write_file(path, &data)?;

    let cfg = &result.config;
    let data_name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let script_path = path.with_extension("gp");
    let image = path.with_extension("png");
    let image_name = image.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let ylabel = if result.bounds.is_none() && result.series.len() == 1 && result.series[0].state_label() == "beta" {
        "uniform error"
    } else {
        "state error"
    };
    let mut gp = String::new();
    let _ = writeln!(gp, "# {} vs {}, t = {}, n = {}", cfg.h1_expr, cfg.h2_expr, cfg.t, cfg.trotter_steps);
    let _ = writeln!(gp, "set terminal pngcairo size 900,600");
    let _ = writeln!(gp, "set output {}", gp_quote(&image_name));
    let _ = writeln!(gp, "set xlabel 'truncation dimension d'");
    let _ = writeln!(gp, "set ylabel '{ylabel}'");
    let _ = writeln!(gp, "set key outside right");
    let k = result.series.len();
    let mut plots: Vec<String> = result
        .series
        .iter()
        .enumerate()
        .map(|(j, s)| format!("{} using 1:{} with points pt 7 ps 0.6 lc {} title '{}'", gp_quote(&data_name), j + 2, j + 1, s.state_label()))
        .collect();
    if result.bounds.is_some() {
        plots.extend(result.series.iter().enumerate().map(|(j, s)| {
            format!("'' using 1:{} with lines lw 2 lc {} title 'bound {}'", k + j + 2, j + 1, s.state_label())
        }));
    }
    let _ = writeln!(gp, "plot {}", plots.join(", \\\n     "));
    write_file(&script_path, &gp)?;
    Ok(PlotFiles {
        data: path.to_path_buf(),
        script: script_path,
    })
}
