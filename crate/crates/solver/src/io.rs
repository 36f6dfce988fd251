//! CSV traces and JSON grid dumps.

use std::io::Write;

use serde::{Deserialize, Serialize};
use torus_soliton_core::exec::Mode;

use crate::error::SolverError;
use crate::flow::TraceRow;
use crate::grid::Grid;
use crate::potential::ConvexPotential;

#[derive(Serialize)]
struct CsvRow {
    step: usize,
    t: f64,
    dt: f64,
    residual: f64,
    #[serde(rename = "R")]
    r: f64,
    #[serde(rename = "D_eta")]
    d_eta: f64,
    #[serde(rename = "D")]
    d: f64,
    #[serde(rename = "J")]
    j: f64,
    #[serde(rename = "H")]
    h: f64,
    #[serde(rename = "M_eta")]
    m_eta: f64,
}

pub fn write_trace_csv<W: Write>(out: W, trace: &[TraceRow]) -> Result<(), SolverError> {
    let mut w = csv::Writer::from_writer(out);
    for row in trace {
        let d = &row.diagnostics;
        w.serialize(CsvRow {
            step: row.step,
            t: row.t,
            dt: row.dt,
            residual: d.residual,
            r: d.r,
            d_eta: d.d_eta,
            d: d.d,
            j: d.j,
            h: d.h_entropy,
            m_eta: d.m_eta,
        })
        .map_err(|e| SolverError::Invalid(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| SolverError::Invalid(format!("csv: {e}")))?;
    Ok(())
}

/// A self-describing dump: the potential's parts plus its nodal values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridDump {
    pub grid: Grid,
    pub potential: ConvexPotential,
    pub values: Vec<f64>,
}

impl GridDump {
    pub fn new(psi: &ConvexPotential) -> Self {
        Self {
            grid: psi.grid.clone(),
            potential: psi.clone(),
            values: psi.values(Mode::Sequential),
        }
    }
}

pub fn write_grid_json<W: Write>(out: W, psi: &ConvexPotential) -> Result<(), SolverError> {
    serde_json::to_writer(out, &GridDump::new(psi)).map_err(|e| SolverError::Invalid(format!("json: {e}")))
}

pub fn read_grid_json(s: &str) -> Result<ConvexPotential, SolverError> {
    let d: GridDump = serde_json::from_str(s).map_err(|e| SolverError::Invalid(format!("json: {e}")))?;
    Ok(d.potential)
}
