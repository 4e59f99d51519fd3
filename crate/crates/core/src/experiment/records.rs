use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::learners::StepRecord;
use crate::mdp::Mode;
use crate::Result;

/// Steps up to this one are all logged.
const DENSE_STEPS: u64 = 1000;
const THINNING_BASE: f64 = 1.05;

/// Logging cadence: every step up to 1000, then steps `ceil(1.05^k)`.
/// Queries must come in increasing step order.
#[derive(Debug, Clone)]
pub struct LogSchedule {
    k: i32,
    next: u64,
}

impl Default for LogSchedule {
    fn default() -> Self {
        LogSchedule { k: 0, next: 1 }
    }
}

impl LogSchedule {
    pub fn should_log(&mut self, step: u64) -> bool {
        if step <= DENSE_STEPS {
            return true;
        }
        while self.next < step {
            self.k += 1;
            self.next = THINNING_BASE.powi(self.k).ceil() as u64;
        }
        self.next == step
    }
}

/// Column names of the metrics table. Average mode adds `f_value`.
pub fn metrics_header(mode: Mode) -> Vec<&'static str> {
    let mut cols = vec![
        "step",
        "state",
        "action",
        "raw_reward",
        "clipped_reward",
        "violation_mask",
        "any_violation",
        "cumulative_violations",
        "q_error",
        "value_estimate",
    ];
    if mode == Mode::Average {
        cols.push("f_value");
    }
    cols
}

/// Row-per-logged-step CSV writer. The header is written on creation, so
/// even a zero-step run yields a well-formed table.
pub struct MetricsWriter<W: Write> {
    mode: Mode,
    inner: csv::Writer<W>,
}

impl MetricsWriter<BufWriter<File>> {
    pub fn create(path: &Path, mode: Mode) -> Result<Self> {
        Self::new(BufWriter::new(File::create(path)?), mode)
    }
}

impl<W: Write> MetricsWriter<W> {
    pub fn new(writer: W, mode: Mode) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(writer);
        inner.write_record(metrics_header(mode))?;
        Ok(MetricsWriter { mode, inner })
    }

    /// `q_error` is left empty when no oracle is available; `f_value` is
    /// only written in average mode.
    pub fn write(
        &mut self,
        rec: &StepRecord<'_>,
        cumulative_violations: u64,
        q_error: Option<f64>,
        value_estimate: f64,
        f_value: f64,
    ) -> Result<()> {
        let mut row = vec![
            rec.step.to_string(),
            rec.state.to_string(),
            rec.action.to_string(),
            rec.raw_reward.to_string(),
            rec.clipped_reward.to_string(),
            rec.violation_mask(),
            u8::from(rec.any_violation()).to_string(),
            cumulative_violations.to_string(),
            q_error.map(|e| e.to_string()).unwrap_or_default(),
            value_estimate.to_string(),
        ];
        if self.mode == Mode::Average {
            row.push(f_value.to_string());
        }
        self.inner.write_record(&row)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.flush()?;
        self.inner
            .into_inner()
            .map_err(|e| crate::Error::Io(std::io::Error::other(e.to_string())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_then_geometric() {
        let mut sched = LogSchedule::default();
        let logged: Vec<u64> = (1..=2000).filter(|&k| sched.should_log(k)).collect();
        assert_eq!(logged[..1000], (1..=1000).collect::<Vec<_>>()[..]);
        // ceil(1.05^k) for k = 142..155.
        assert_eq!(&logged[1000..], &[1021, 1072, 1126, 1182, 1241, 1303, 1368, 1437, 1508, 1584, 1663, 1746, 1833, 1925]);
    }

    #[test]
    fn thinning_keeps_files_small() {
        let mut sched = LogSchedule::default();
        let n = (1..=1_000_000u64).filter(|&k| sched.should_log(k)).count();
        assert!(n < 1200, "{n}");
    }

    #[test]
    fn header_and_row() {
        let mut w = MetricsWriter::new(Vec::new(), Mode::Average).unwrap();
        let rec = StepRecord {
            step: 1,
            state: 0,
            action: 1,
            next_state: 0,
            raw_reward: 0.5,
            clipped_reward: -1.0,
            constraint_samples: &[0.2, -0.1],
        };
        w.write(&rec, 1, None, 0.5, 0.25).unwrap();
        let text = String::from_utf8(w.finish().unwrap()).unwrap();
        assert_eq!(
            text,
            "step,state,action,raw_reward,clipped_reward,violation_mask,any_violation,\
             cumulative_violations,q_error,value_estimate,f_value\n1,0,1,0.5,-1,01,1,1,,0.5,0.25\n"
        );
    }
}
