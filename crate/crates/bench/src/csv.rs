//! Deterministic CSV output. Floats are written with 17 significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::config::{kernel_name, solution_name, ExperimentConfig};
use crate::error::{BenchError, Result};
use crate::experiment::ErrorTrace;
use crate::rates::RatePoint;

pub const TRACE_HEADER: &str =
    "method,iteration,error,residual,wall_time_s,seed,kernel,solution,m,noise_fraction";
pub const FILTER_HEADER: &str =
    "lambda,f_continuous,g_discrete,residual_factor_cont,residual_factor_disc";
pub const RATE_HEADER: &str = "method,delta,parameter,error";

/// `{:.16e}`: 17 significant digits, round-trips every finite `f64`.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_traces<W: Write>(
    out: &mut W,
    traces: &[ErrorTrace],
    config: &ExperimentConfig,
) -> std::io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for t in traces {
        for (k, (e, r)) in t.errors.iter().zip(&t.residuals).enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                t.method,
                k,
                float(*e),
                float(*r),
                float(t.wall_time),
                config.seed,
                kernel_name(config.kernel),
                solution_name(config.solution),
                config.m,
                float(config.noise_fraction),
            )?;
        }
    }
    Ok(())
}

pub fn write_filter_table<W: Write>(out: &mut W, rows: &[[f64; 5]]) -> std::io::Result<()> {
    writeln!(out, "{FILTER_HEADER}")?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| float(v)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn write_rates<W: Write>(out: &mut W, points: &[RatePoint]) -> std::io::Result<()> {
    writeln!(out, "{RATE_HEADER}")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{}",
            p.method,
            float(p.delta),
            p.parameter,
            float(p.error)
        )?;
    }
    Ok(())
}

/// Creates `path` and hands a buffered writer to `body`; I/O errors carry the path.
pub fn write_file<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let io = |source| BenchError::Io {
        path: path.to_owned(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    body(&mut w).map_err(io)?;
    w.flush().map_err(io)
}

pub fn emit_csv(traces: &[ErrorTrace], config: &ExperimentConfig, path: &Path) -> Result<()> {
    write_file(path, |w| write_traces(w, traces, config))
}
