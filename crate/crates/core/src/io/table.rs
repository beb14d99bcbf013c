use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::diagnostics::{DiagnosticsRecord, TAIL_LADDER};
use crate::error::{Error, Result};

pub const SCHEMA: &str = "qnsch-diagnostics/1";

const AXES: [&str; 3] = ["x", "y", "z"];

/// Column names for a run in `dim` dimensions.
pub fn columns(dim: usize) -> Vec<String> {
    let mut c: Vec<String> = ["step", "time", "mass_rho", "mass_phi"].map(String::from).to_vec();
    c.extend(AXES[..dim].iter().map(|a| format!("momentum_{a}")));
    c.extend(
        [
            "E_total",
            "E_sigma_delta",
            "E_BD",
            "D_visc",
            "D_mup",
            "P_L1",
            "P_chi_L1",
            "rho_min",
            "rho_max",
            "energy_defect",
            "E_GL",
            "momentum_l2",
            "log_rho_integral",
            "D_reg",
            "S_reg",
            "S_bound",
            "BD_lap_rho",
            "BD_hess",
            "BD_rotation",
            "energy_slack",
        ]
        .map(String::from),
    );
    c.extend(TAIL_LADDER.iter().map(|m| format!("tail_M{m}")));
    c
}

fn real(v: f64) -> String {
    format!("{v:.17e}")
}

fn row(r: &DiagnosticsRecord) -> Vec<String> {
    let mut out = vec![r.step.to_string(), real(r.time), real(r.mass_rho), real(r.mass_phi)];
    out.extend(r.momentum.iter().map(|&v| real(v)));
    out.extend(
        [
            r.e_total,
            r.e_sigma_delta,
            r.e_bd,
            r.d_visc,
            r.d_mup,
            r.p_l1,
            r.p_chi_l1,
            r.rho_min,
            r.rho_max,
            r.energy_defect,
            r.e_gl,
            r.momentum_l2,
            r.log_rho_integral,
            r.d_reg,
            r.source_reg,
            r.source_bound,
            r.bd_lap_rho,
            r.bd_hess,
            r.bd_rotation,
            r.energy_slack,
        ]
        .map(real),
    );
    out.extend(r.tails.iter().map(|&v| real(v)));
    out
}

/// Streams diagnostics rows to a versioned CSV file.
pub struct CsvSink {
    writer: csv::Writer<BufWriter<File>>,
    width: usize,
}

fn csv_err(e: csv::Error) -> Error {
    Error::Csv(e.to_string())
}

impl CsvSink {
    pub fn create(path: &Path, dim: usize) -> Result<Self> {
        let mut file = BufWriter::new(File::create(path)?);
        writeln!(file, "# schema={SCHEMA}")?;
        let mut writer = csv::Writer::from_writer(file);
        let cols = columns(dim);
        writer.write_record(&cols).map_err(csv_err)?;
        Ok(Self {
            writer,
            width: cols.len(),
        })
    }

    pub fn write(&mut self, r: &DiagnosticsRecord) -> Result<()> {
        let fields = row(r);
        if fields.len() != self.width {
            return Err(Error::Csv(format!(
                "record has {} fields, schema has {}",
                fields.len(),
                self.width
            )));
        }
        self.writer.write_record(&fields).map_err(csv_err)
    }

    pub fn flush(&mut self) -> Result<()> {
        self.writer.flush()?;
        Ok(())
    }
}

/// A diagnostics CSV read back as named numeric columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn read(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(csv_err)?;
        let headers: Vec<String> = reader.headers().map_err(csv_err)?.iter().map(String::from).collect();
        if headers.iter().all(|h| h.is_empty()) {
            return Err(Error::Csv(format!("{} is empty", path.display())));
        }
        let mut rows = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let row = rec
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| Error::Csv(format!("row {}: `{s}` is not a number", i + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self { headers, rows })
    }

    /// Index of `name`, or an error naming the missing column.
    pub fn column(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Csv(format!("missing column `{name}`")))
    }
}
