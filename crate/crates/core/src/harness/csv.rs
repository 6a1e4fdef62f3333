//! CSV output. Fields are written with Rust's shortest round-trip float
//! formatting; undefined ratios are empty fields. Lines end in `\n`.

use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{CellSummary, Stats, TrialRecord};

pub const TRIAL_HEADER: &str = "algo,N,d,n,trial,seed,sigma,noise_target,norm_e,err2,err2_2n,tail1,ratio_meas,ratio_sig,iterations,support_hit,termination";

pub const SUMMARY_HEADER: &str = "algo,N,d,n,trials,success_rate,mean_iterations,mean_err2,\
ratio_meas_count,ratio_meas_mean,ratio_meas_median,ratio_meas_p10,ratio_meas_p90,\
ratio_sig_count,ratio_sig_mean,ratio_sig_median,ratio_sig_p10,ratio_sig_p90";

/// `runs.csv` → `runs.summary.csv`.
pub fn summary_path(trials: &Path) -> PathBuf {
    let stem = trials
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    trials.with_file_name(format!("{stem}.summary.csv"))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn trial_row(r: &TrialRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.algorithm,
        r.measurements,
        r.dim,
        r.sparsity,
        r.trial,
        r.seed,
        r.sigma,
        r.noise_target,
        r.norm_e,
        r.err2,
        r.err2_2n,
        r.tail1,
        opt(r.ratio_meas),
        opt(r.ratio_sig),
        r.iterations,
        r.support_hit,
        r.termination
    )
}

fn stats_fields(s: &Option<Stats>) -> String {
    match s {
        Some(s) => format!("{},{},{},{},{}", s.count, s.mean, s.median, s.p10, s.p90),
        None => "0,,,,".to_string(),
    }
}

pub fn summary_row(c: &CellSummary) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        c.cell.algorithm,
        c.cell.measurements,
        c.dim,
        c.cell.sparsity,
        c.trials,
        c.success_rate,
        c.mean_iterations,
        c.mean_err2,
        stats_fields(&c.ratio_meas),
        stats_fields(&c.ratio_sig)
    )
}

pub fn write_trials(out: impl Write, records: &[TrialRecord]) -> io::Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, "{TRIAL_HEADER}")?;
    for r in records {
        writeln!(w, "{}", trial_row(r))?;
    }
    w.flush()
}

pub fn write_summary(out: impl Write, cells: &[CellSummary]) -> io::Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, "{SUMMARY_HEADER}")?;
    for c in cells {
        writeln!(w, "{}", summary_row(c))?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_path_sits_next_to_trials() {
        assert_eq!(summary_path(Path::new("out/runs.csv")), PathBuf::from("out/runs.summary.csv"));
        assert_eq!(summary_path(Path::new("runs")), PathBuf::from("runs.summary.csv"));
    }

    #[test]
    fn headers_match_column_counts() {
        assert_eq!(TRIAL_HEADER.split(',').count(), 17);
        assert_eq!(SUMMARY_HEADER.split(',').count(), 18);
        assert_eq!(stats_fields(&None).split(',').count(), 5);
    }
}
