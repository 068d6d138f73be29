//! Text artifacts of a run. Floats in CSV use 17 significant digits so every
//! value round-trips exactly.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{IterationTrace, SolutionPair};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionExport {
    pub u_star: Vec<f64>,
    pub u_upper_star: Vec<f64>,
    pub residual_lower: f64,
    pub residual_upper: f64,
    pub coincide: bool,
}

impl From<&SolutionPair> for SolutionExport {
    fn from(p: &SolutionPair) -> Self {
        SolutionExport {
            u_star: p.u_star.values().to_vec(),
            u_upper_star: p.u_upper_star.values().to_vec(),
            residual_lower: p.residual_lower,
            residual_upper: p.residual_upper,
            coincide: p.coincide,
        }
    }
}

pub fn write_solution_json<W: Write>(pair: &SolutionPair, out: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(out, &SolutionExport::from(pair)).map_err(std::io::Error::other)
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// One row per vertex: index, coordinates, both limits.
pub fn write_solution_csv<W: Write>(
    pair: &SolutionPair,
    coordinates: &[[f64; 3]],
    out: W,
) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["vertex", "x", "y", "z", "u_star", "u_upper_star"])?;
    let (lo, up) = (pair.u_star.values(), pair.u_upper_star.values());
    for (i, p) in coordinates.iter().enumerate() {
        w.write_record([i.to_string(), float(p[0]), float(p[1]), float(p[2]), float(lo[i]), float(up[i])])?;
    }
    w.flush()
}

/// Rows `step,seq,max_change,min_u,max_u,defect_norm`, lower sequence first.
pub fn write_trace_csv<W: Write>(trace: &IterationTrace, out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "seq", "max_change", "min_u", "max_u", "defect_norm"])?;
    for (seq, records) in [("lower", &trace.lower), ("upper", &trace.upper)] {
        for r in records {
            w.write_record([
                r.step.to_string(),
                seq.to_string(),
                float(r.max_change),
                float(r.min_u),
                float(r.max_u),
                float(r.defect_norm),
            ])?;
        }
    }
    w.flush()
}
