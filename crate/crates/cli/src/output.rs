//! File emission: everything is written to a temporary sibling and renamed
//! into place, so a failed run never leaves a partial output file.

use std::fs;
use std::path::Path;

use crate::CliError;

pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)
        .map_err(|e| CliError::runtime(format!("writing {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| CliError::runtime(format!("renaming into {}: {e}", path.display())))?;
    Ok(())
}

/// Sweep rows in the fixed schema
/// `g,throughput_mean,throughput_stderr,packet_loss_mean,trials,seed`.
pub struct SweepRow {
    pub g: f64,
    pub throughput_mean: f64,
    pub throughput_stderr: f64,
    pub packet_loss_mean: f64,
    pub trials: usize,
    pub seed: u64,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("g,throughput_mean,throughput_stderr,packet_loss_mean,trials,seed\n");
    for r in rows {
        out.push_str(&format!(
            "{:.6},{:.6},{:.6},{:.6},{},{}\n",
            r.g, r.throughput_mean, r.throughput_stderr, r.packet_loss_mean, r.trials, r.seed
        ));
    }
    out
}

pub fn de_sweep_csv(rows: &[(f64, f64, f64, f64, bool)]) -> String {
    let mut out = String::from("g,throughput,packet_loss,p_inf,converged\n");
    for (g, t, loss, p_inf, converged) in rows {
        out.push_str(&format!("{g:.6},{t:.6},{loss:.6e},{p_inf:.6e},{converged}\n"));
    }
    out
}

pub fn trace_csv(trace: &[irsa_core::de::DEState]) -> String {
    let mut out = String::from("iteration,p,q\n");
    for s in trace {
        out.push_str(&format!("{},{:.12e},{:.12e}\n", s.iteration, s.p, s.q));
    }
    out
}
