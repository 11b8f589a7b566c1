//! Machine-readable reports and the exit-code contract.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::ops::{execute, Verdict};
use crate::schema::JobSpec;
use crate::{JobError, JobResult};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub tool: String,
    /// The job exactly as it can be re-run.
    pub job: JobSpec,
    pub result: Value,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<u64>,
}

impl Report {
    pub fn exit_code(&self) -> u8 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_VIOLATION
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

pub fn tool_version() -> String {
    format!("tate-forge {}", env!("CARGO_PKG_VERSION"))
}

/// Runs a job and wraps the outcome. Input errors come back as `Err`; a
/// broken invariant of the input data becomes a failing report whose
/// verdict names the witness.
pub fn run_job(job: &JobSpec, base: &Path, timing: bool) -> JobResult<Report> {
    let start = Instant::now();
    let (result, verdicts) = match execute(job, base) {
        Ok(o) => (o.result, o.verdicts),
        Err(e) if e.is_violation() => {
            let name = match &e {
                JobError::Core(tate_forge::Error::LieAxiomViolation { axiom, .. }) => axiom.clone(),
                _ => "input data".to_string(),
            };
            (Value::Null, vec![Verdict { name, pass: false, witness: Some(e.to_string()) }])
        }
        Err(e) => return Err(e),
    };
    let passed = verdicts.iter().all(|v| v.pass);
    Ok(Report {
        tool: tool_version(),
        job: job.echo(),
        result,
        verdicts,
        passed,
        duration_ms: timing.then(|| start.elapsed().as_millis() as u64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::Operation;
    use serde_json::json;

    #[test]
    fn residue_report() {
        let job = JobSpec::new(Operation::ResiduePairing, json!({"d": 1, "n": 2}));
        let r = run_job(&job, Path::new("."), false).unwrap();
        assert!(r.passed);
        assert_eq!(r.result["matrix"], json!([["0/1", "1/1"], ["1/1", "0/1"]]));
        assert_eq!(r.exit_code(), EXIT_OK);
    }

    #[test]
    fn broken_differential_is_a_violation() {
        let lie = json!({"basis": ["x", "y", "z"], "degrees": [0, 1, 2], "differential": {"x": {"y": "1"}, "y": {"z": "1"}}});
        let job = JobSpec::new(Operation::CeHomology, json!({"lie": lie, "weight": 2}));
        let r = run_job(&job, Path::new("."), false).unwrap();
        assert_eq!(r.exit_code(), EXIT_VIOLATION);
        assert_eq!(r.verdicts[0].name, "d^2");
        assert!(r.verdicts[0].witness.as_ref().unwrap().contains("d(d x)"));
    }

    #[test]
    fn bad_bounds_are_input_errors() {
        let job = JobSpec::new(Operation::ResiduePairing, json!({"d": 9, "n": 2}));
        assert!(matches!(run_job(&job, Path::new("."), false), Err(JobError::Input(_))));
        let job = JobSpec::new(Operation::Pbw, json!({"lie": {"basis": [], "degrees": []}, "weight": 3}));
        let mut job = job;
        job.field = "fp:3".into();
        let err = run_job(&job, Path::new("."), false).unwrap_err();
        assert!(!err.is_violation());
    }

    #[test]
    fn echoed_job_reproduces_the_report() {
        let job = JobSpec::new(Operation::LoopTangent, json!({"d": 2, "n": 1, "p": 1}));
        let first = run_job(&job, Path::new("."), false).unwrap();
        let echoed = JobSpec::parse(&serde_json::to_string(&first.job).unwrap()).unwrap();
        let second = run_job(&echoed, Path::new("."), false).unwrap();
        assert_eq!(first.to_json(), second.to_json());
    }
}
