use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::table::CsvTable;
use crate::diagnostics::TAIL_LADDER;
use crate::error::{Error, Result};

fn script(csv: &Path, title: &str, ylabel: &str, logscale: bool, series: &[(usize, &str)], time: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set datafile commentschars '#'");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set title '{title}'");
    let _ = writeln!(s, "set xlabel 'time'");
    let _ = writeln!(s, "set ylabel '{ylabel}'");
    if logscale {
        let _ = writeln!(s, "set logscale y");
    }
    let file = csv.display().to_string().replace('\'', "''");
    let parts: Vec<String> = series
        .iter()
        .map(|(col, name)| format!("'{file}' using {}:{} with lines title '{name}'", time + 1, col + 1))
        .collect();
    let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    s
}

/// Writes `energy.gp`, `bd_entropy.gp` and `tails.gp` next to `csv` and returns their paths.
///
/// Fails when the CSV has no data rows or lacks a needed column.
pub fn write_plot_scripts(csv: &Path) -> Result<Vec<PathBuf>> {
    let table = CsvTable::read(csv)?;
    if table.rows.is_empty() {
        return Err(Error::Csv(format!("{} has no data rows", csv.display())));
    }
    let time = table.column("time")?;
    let energy = [("E_total", table.column("E_total")?), ("E_sigma_delta", table.column("E_sigma_delta")?)];
    let bd = table.column("E_BD")?;
    let tail_names: Vec<String> = TAIL_LADDER.iter().map(|m| format!("tail_M{m}")).collect();
    let tails = tail_names
        .iter()
        .map(|n| table.column(n).map(|c| (c, n.as_str())))
        .collect::<Result<Vec<_>>>()?;

    let dir = csv.parent().map(Path::to_path_buf).unwrap_or_default();
    let name = csv.file_name().map(PathBuf::from).unwrap_or_else(|| csv.to_path_buf());
    let outputs = [
        (
            "energy.gp",
            script(&name, "energy", "energy", false, &energy.map(|(n, c)| (c, n)), time),
        ),
        ("bd_entropy.gp", script(&name, "BD entropy", "E_BD", false, &[(bd, "E_BD")], time)),
        ("tails.gp", script(&name, "pressure tails", "tail integral", true, &tails, time)),
    ];
    let mut paths = Vec::with_capacity(outputs.len());
    for (file, body) in outputs {
        let p = dir.join(file);
        std::fs::write(&p, body)?;
        paths.push(p);
    }
    Ok(paths)
}
