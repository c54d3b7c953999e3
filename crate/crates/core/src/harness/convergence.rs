//! Convergence studies, their CSV form and text reports.

use std::fmt::Write as _;

use super::config::RunConfig;
use super::manufactured::ManufacturedSolution;
use crate::assembly::{error_norms, solve_homogeneous, Assembly};
use crate::error::{Error, Result};
use crate::mesh::{format_f64, make_grid_seeded};

/// Allowed shortfall of the observed energy rate below `k + 1 - m`.
pub const RATE_TOLERANCE: f64 = 0.25;

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub ncells: usize,
    pub ndofs: usize,
    /// `e_0 ..= e_m`.
    pub errors: Vec<f64>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceStudy {
    pub m: usize,
    pub k: usize,
    pub rows: Vec<ConvergenceRow>,
}

/// `log(e_a / e_b) / log(h_a / h_b)`.
pub fn observed_rate(e_a: f64, e_b: f64, h_a: f64, h_b: f64) -> f64 {
    (e_a / e_b).ln() / (h_a / h_b).ln()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RateCheck {
    Passed { observed: f64, required: f64 },
    Failed { observed: f64, required: f64 },
    /// Fewer than two meshes, or zero errors.
    Skipped,
}

impl RateCheck {
    pub fn ok(&self) -> bool {
        !matches!(self, RateCheck::Failed { .. })
    }
}

impl ConvergenceStudy {
    /// `e_m` rate between consecutive rows; `None` for the first row.
    pub fn energy_rates(&self) -> Vec<Option<f64>> {
        let m = self.m;
        (0..self.rows.len())
            .map(|i| {
                (i > 0).then(|| {
                    let (a, b) = (&self.rows[i - 1], &self.rows[i]);
                    observed_rate(a.errors[m], b.errors[m], a.h, b.h)
                })
            })
            .collect()
    }

    pub fn rate_check(&self) -> RateCheck {
        let rates = self.energy_rates();
        let last = self.rows.len();
        if last < 2 || self.rows[last - 2..].iter().any(|r| r.errors[self.m] == 0.0) {
            return RateCheck::Skipped;
        }
        let observed = rates[last - 1].expect("two rows");
        let required = (self.k + 1 - self.m) as f64 - RATE_TOLERANCE;
        if observed >= required {
            RateCheck::Passed { observed, required }
        } else {
            RateCheck::Failed { observed, required }
        }
    }

    /// Columns `h, ncells, ndofs, e0..em, rate_m`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h,ncells,ndofs");
        for s in 0..=self.m {
            let _ = write!(out, ",e{s}");
        }
        let _ = writeln!(out, ",rate_{}", self.m);
        for (row, rate) in self.rows.iter().zip(self.energy_rates()) {
            let _ = write!(out, "{},{},{}", format_f64(row.h), row.ncells, row.ndofs);
            for e in &row.errors {
                let _ = write!(out, ",{}", format_f64(*e));
            }
            let _ = writeln!(out, ",{}", rate.map(format_f64).unwrap_or_default());
        }
        out
    }
}

pub fn run_convergence(config: &RunConfig) -> Result<ConvergenceStudy> {
    config.validate()?;
    let solution = ManufacturedSolution::by_name(&config.solution, config.m)?;
    let mut rows = Vec::with_capacity(config.sizes.len());
    for &n in &config.sizes {
        let mesh = make_grid_seeded(config.mesh, n, config.perturb, config.seed)?;
        let assembly = Assembly::new(&mesh, config.m, config.k, solution.f.as_ref())?;
        let (x, report) = solve_homogeneous(&assembly)?;
        rows.push(ConvergenceRow {
            h: mesh.mesh_size(),
            ncells: mesh.num_cells(),
            ndofs: assembly.map.len(),
            errors: error_norms(&assembly, &x, solution.u.as_ref()),
            residual: report.residual,
        });
    }
    Ok(ConvergenceStudy {
        m: config.m,
        k: config.k,
        rows,
    })
}

/// Parsed convergence CSV: header names and numeric cells (`None` when blank).
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl CsvTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let headers: Vec<String> = lines
            .next()
            .ok_or_else(|| Error::Report("empty CSV".into()))?
            .split(',')
            .map(|h| h.trim().to_string())
            .collect();
        for required in ["h", "e0"] {
            if !headers.iter().any(|h| h == required) {
                return Err(Error::Report(format!("CSV has no '{required}' column")));
            }
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != headers.len() {
                return Err(Error::Report(format!(
                    "row {} has {} fields, header has {}",
                    i + 1,
                    cells.len(),
                    headers.len()
                )));
            }
            let parsed = cells
                .iter()
                .map(|c| {
                    if c.is_empty() {
                        Ok(None)
                    } else {
                        c.parse::<f64>()
                            .map(Some)
                            .map_err(|_| Error::Report(format!("row {}: '{c}' is not a number", i + 1)))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(parsed);
        }
        if rows.is_empty() {
            return Err(Error::Report("CSV has no data rows".into()));
        }
        Ok(Self { headers, rows })
    }

    fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    fn error_columns(&self) -> Vec<(String, usize)> {
        self.headers
            .iter()
            .enumerate()
            .filter(|(_, h)| h.starts_with('e') && h[1..].parse::<usize>().is_ok())
            .map(|(i, h)| (h.clone(), i))
            .collect()
    }

    /// Rows with `h` and every error column, plus a rate for each error between consecutive rows.
    fn with_rates(&self) -> (Vec<String>, Vec<Vec<Option<f64>>>) {
        let h = self.column("h").expect("checked at parse");
        let mut headers = vec!["h".to_string()];
        for extra in ["ncells", "ndofs"] {
            if self.column(extra).is_some() {
                headers.push(extra.to_string());
            }
        }
        let errors = self.error_columns();
        for (name, _) in &errors {
            headers.push(name.clone());
            headers.push(format!("rate{}", &name[1..]));
        }
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut out = vec![row[h]];
                for extra in ["ncells", "ndofs"] {
                    if let Some(c) = self.column(extra) {
                        out.push(row[c]);
                    }
                }
                for (_, c) in &errors {
                    out.push(row[*c]);
                    let rate = if i == 0 {
                        None
                    } else {
                        let prev = &self.rows[i - 1];
                        match (prev[*c], row[*c], prev[h], row[h]) {
                            (Some(ea), Some(eb), Some(ha), Some(hb)) if ea > 0.0 && eb > 0.0 => {
                                Some(observed_rate(ea, eb, ha, hb))
                            }
                            _ => None,
                        }
                    };
                    out.push(rate);
                }
                out
            })
            .collect();
        (headers, rows)
    }

    /// Right-aligned text table with a rate column after each error column.
    pub fn render(&self) -> String {
        let (headers, rows) = self.with_rates();
        let cells: Vec<Vec<String>> = rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&headers)
                    .map(|(v, name)| match v {
                        None => "-".to_string(),
                        Some(x) if name == "ncells" || name == "ndofs" => format!("{x}"),
                        Some(x) if name.starts_with("rate") => format!("{x:.3}"),
                        Some(x) => format!("{x:.4e}"),
                    })
                    .collect()
            })
            .collect();
        let widths: Vec<usize> = (0..headers.len())
            .map(|j| cells.iter().map(|r| r[j].len()).chain([headers[j].len()]).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        let line = |items: &[String]| {
            items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let _ = writeln!(out, "{}", line(&headers));
        for row in &cells {
            let _ = writeln!(out, "{}", line(row));
        }
        out
    }

    /// Whitespace-separated columns with a `#` header; missing rates are `NaN`.
    pub fn gnuplot(&self) -> String {
        let (headers, rows) = self.with_rates();
        let mut out = format!("# {}\n", headers.join(" "));
        for row in rows {
            let items: Vec<String> = row.iter().map(|v| v.map(format_f64).unwrap_or_else(|| "NaN".into())).collect();
            let _ = writeln!(out, "{}", items.join(" "));
        }
        out
    }
}
