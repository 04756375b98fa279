//! CSV outputs of an experiment.
//!
//! Files written under the output directory:
//!
//! * `summary.csv`: one row per replicate.
//! * `arms.csv`: one row per arm.
//! * `comparisons.csv`: one row per unordered arm pair.
//! * `curves/<arm>.csv`: replicate-averaged fitness per iteration.
//! * `goals.csv`: goal strategy of every replicate.
//! * `traces/<arm>/replicate_<k>.csv`: only when tracing is enabled.
//!
//! Rows are ordered by arm label, then replicate index. Reals are printed
//! with six significant digits; missing values are written as `never` for
//! iteration counts and `NA` otherwise.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::engine::{ReplicateResult, TraceLevel};
use crate::error::RunError;
use crate::experiment::{ArmOutcome, ExperimentOutcome};

/// Formats a real with six significant digits, `%g`-style, without trailing zeros.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "NA".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.5e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa.to_string()),
            sign,
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn opt_iter(v: Option<u32>) -> String {
    v.map_or_else(|| "never".into(), |x| x.to_string())
}

fn opt_num(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".into(), fmt_num)
}

struct CsvFile {
    path: PathBuf,
    out: BufWriter<fs::File>,
}

impl CsvFile {
    fn create(path: PathBuf, header: &str) -> Result<Self, RunError> {
        let file = fs::File::create(&path).map_err(|source| RunError::Io {
            path: path.clone(),
            source,
        })?;
        let mut f = Self {
            path,
            out: BufWriter::new(file),
        };
        f.row(header)?;
        Ok(f)
    }

    fn row(&mut self, line: &str) -> Result<(), RunError> {
        writeln!(self.out, "{line}").map_err(|source| RunError::Io {
            path: self.path.clone(),
            source,
        })
    }

    fn finish(mut self) -> Result<(), RunError> {
        self.out.flush().map_err(|source| RunError::Io {
            path: self.path,
            source,
        })
    }
}

fn mkdir(path: &Path) -> Result<(), RunError> {
    fs::create_dir_all(path).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes every output file and returns the paths written, in write order.
pub fn write_outputs(
    outcome: &ExperimentOutcome,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, RunError> {
    mkdir(out_dir)?;
    let mut written = Vec::new();

    let path = out_dir.join("summary.csv");
    let mut f = CsvFile::create(
        path.clone(),
        "arm,replicate,seed,group_convergence,first_any_hit,success,final_best_fitness",
    )?;
    for arm in &outcome.arms {
        for r in &arm.results {
            f.row(&format!(
                "{},{},{},{},{},{},{}",
                arm.label,
                r.replicate,
                r.seed,
                opt_iter(r.group_convergence),
                opt_iter(r.first_any_hit()),
                u8::from(r.success()),
                r.final_best_fitness()
            ))?;
        }
    }
    f.finish()?;
    written.push(path);

    let path = out_dir.join("arms.csv");
    let mut f = CsvFile::create(
        path.clone(),
        "arm,n,success_rate,median_group_convergence,mean_group_convergence,iqr_low,iqr_high,median_first_any_hit",
    )?;
    for arm in &outcome.arms {
        let g = &arm.summary.group_convergence;
        f.row(&format!(
            "{},{},{},{},{},{},{},{}",
            arm.label,
            g.n,
            fmt_num(g.success_rate),
            opt_num(g.median),
            opt_num(g.mean),
            opt_num(g.iqr.map(|q| q.0)),
            opt_num(g.iqr.map(|q| q.1)),
            opt_num(arm.summary.median_first_any_hit)
        ))?;
    }
    f.finish()?;
    written.push(path);

    let path = out_dir.join("comparisons.csv");
    let mut f = CsvFile::create(
        path.clone(),
        "arm_a,arm_b,median_ratio,u_statistic,p_value,censored_median_ratio",
    )?;
    for c in &outcome.comparisons {
        f.row(&format!(
            "{},{},{},{},{},{}",
            c.arm_a,
            c.arm_b,
            opt_num(c.test.map(|t| t.median_ratio)),
            opt_num(c.test.map(|t| t.u_statistic)),
            opt_num(c.test.map(|t| t.p_value)),
            fmt_num(c.censored_median_ratio)
        ))?;
    }
    f.finish()?;
    written.push(path);

    let path = out_dir.join("goals.csv");
    let mut f = CsvFile::create(path.clone(), "arm,replicate,goal")?;
    for arm in &outcome.arms {
        for r in &arm.results {
            f.row(&format!("{},{},{}", arm.label, r.replicate, r.goal))?;
        }
    }
    f.finish()?;
    written.push(path);

    let curves = out_dir.join("curves");
    mkdir(&curves)?;
    for arm in &outcome.arms {
        let path = curves.join(format!("{}.csv", arm.label));
        let mut f = CsvFile::create(
            path.clone(),
            "iteration,mean_best_fitness,mean_mean_fitness",
        )?;
        for p in &arm.summary.curve {
            f.row(&format!(
                "{},{},{}",
                p.iteration,
                fmt_num(p.mean_best_fitness),
                fmt_num(p.mean_mean_fitness)
            ))?;
        }
        f.finish()?;
        written.push(path);
    }

    if outcome.trace != TraceLevel::None {
        for arm in &outcome.arms {
            let dir = out_dir.join("traces").join(&arm.label);
            mkdir(&dir)?;
            for r in &arm.results {
                let path = dir.join(format!("replicate_{}.csv", r.replicate));
                write_trace(&path, arm, r)?;
                written.push(path);
            }
        }
    }
    Ok(written)
}

fn write_trace(path: &Path, arm: &ArmOutcome, r: &ReplicateResult) -> Result<(), RunError> {
    let n = arm.config.agent_count;
    let mut header = String::from("iteration,best_fitness,mean_fitness");
    if r.agent_trace.is_some() {
        for prefix in ["fitness_", "W_", "C1_", "C2_", "silo_of_agent_"] {
            for i in 0..n {
                header.push_str(&format!(",{prefix}{i}"));
            }
        }
    }
    let mut f = CsvFile::create(path.to_path_buf(), &header)?;
    for (t, row) in r.trace.iter().enumerate() {
        let mut line = format!("{},{},{}", t, row.best_fitness, fmt_num(row.mean_fitness));
        if let Some(frame) = r.agent_trace.as_ref().map(|frames| &frames[t]) {
            for v in &frame.fitness {
                line.push_str(&format!(",{v}"));
            }
            for c in &frame.coeffs {
                line.push_str(&format!(",{}", fmt_num(c.inertia)));
            }
            for c in &frame.coeffs {
                line.push_str(&format!(",{}", fmt_num(c.self_belief)));
            }
            for c in &frame.coeffs {
                line.push_str(&format!(",{}", fmt_num(c.prestige_bias)));
            }
            for s in &frame.silo {
                line.push_str(&format!(",{s}"));
            }
        }
        f.row(&line)?;
    }
    f.finish()
}
