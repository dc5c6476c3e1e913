use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::params::{ProtocolParams, REAL_AXES};
use super::protocol::run_protocol;
use crate::error::{Error, Result};
use crate::observables::{format_value, TimeSeries};

/// One parameter varied over a list of values, everything else from `base`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: ProtocolParams,
    pub axis: String,
    pub values: Vec<f64>,
}

impl SweepSpec {
    pub fn new(base: ProtocolParams, axis: &str, values: Vec<f64>) -> Self {
        Self {
            base,
            axis: axis.to_string(),
            values,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !REAL_AXES.contains(&self.axis.as_str()) {
            return Err(Error::InvalidArgument(format!(
                "unknown sweep axis `{}`; expected one of {}",
                self.axis,
                REAL_AXES.join(", ")
            )));
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("sweep value {v} is not finite")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    /// `NaN` when the point failed.
    pub fidelity: f64,
    /// Zero for deterministic solvers.
    pub fidelity_se: f64,
    pub runtime_s: f64,
    /// `ok`, or the error that stopped the point.
    pub status: String,
}

impl SweepPoint {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// Columns `<axis>, fidelity, fidelity_se, runtime_s, status`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        w.write_record([self.spec.axis.as_str(), "fidelity", "fidelity_se", "runtime_s", "status"])
            .map_err(io)?;
        for p in &self.points {
            w.write_record([
                format_value(p.value),
                format_value(p.fidelity),
                format_value(p.fidelity_se),
                format!("{:.3}", p.runtime_s),
                p.status.clone(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Axis against fidelity and its standard error, without timings or
    /// status, so that reruns compare equal.
    pub fn to_series(&self) -> TimeSeries {
        let mut s = TimeSeries::new(&self.spec.axis, ["fidelity", "fidelity_se"]);
        for p in &self.points {
            s.push(p.value, &[p.fidelity, p.fidelity_se]).expect("two columns");
        }
        let failures: Vec<_> = self
            .points
            .iter()
            .filter(|p| !p.ok())
            .map(|p| serde_json::json!({ "value": p.value, "status": p.status }))
            .collect();
        s.set_meta("failures", failures);
        s
    }

    pub fn fidelity_at(&self, value: f64) -> Option<&SweepPoint> {
        self.points.iter().find(|p| p.value == value)
    }
}

/// Runs every point concurrently and returns them in input order. A failing
/// point is recorded with its error and does not stop the others.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let points = spec
        .values
        .par_iter()
        .map(|&value| {
            let start = Instant::now();
            let run = spec.base.with_axis(&spec.axis, value).and_then(|p| run_protocol(&p));
            let runtime_s = start.elapsed().as_secs_f64();
            match run {
                Ok(r) => SweepPoint {
                    value,
                    fidelity: r.final_fidelity,
                    fidelity_se: r.fidelity_se.unwrap_or(0.0),
                    runtime_s,
                    status: "ok".into(),
                },
                Err(e) => {
                    log::warn!("sweep point {}={value} failed: {e}", spec.axis);
                    SweepPoint {
                        value,
                        fidelity: f64::NAN,
                        fidelity_se: f64::NAN,
                        runtime_s,
                        status: format!("error: {e}"),
                    }
                }
            }
        })
        .collect();
    Ok(SweepResult {
        spec: spec.clone(),
        points,
    })
}
