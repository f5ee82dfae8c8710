//! Grid runs over (p, r, d, k) from a key-value config file.
//!
//! ```text
//! # normalized sphere energies
//! command = energy
//! p = 5, 7, 11, 13
//! d = 2, 3
//! k = 2, 3
//! ```
//!
//! Missing keys default to r = 1, k = 2, j = 1. Each cell becomes one CSV
//! row; a cell that fails keeps its row with the error in the last column.

use std::collections::BTreeMap;
use std::sync::Arc;

use lcdg_core::cayley::{cycles_through_vertex, CayleyGraph};
use lcdg_core::configurations::{congruence_class_count, degenerate_span_count};
use lcdg_core::energy::{additive_energy, energy_inequality_check};
use lcdg_core::spectral::fourier_spectrum;
use lcdg_core::{sphere, FieldCtx, Space, Vector};
use serde::Serialize;

use crate::CliError;

const COMMANDS: [&str; 5] = ["energy", "classes", "cycles", "degenerate-span", "spectrum"];

#[derive(Debug, Clone, Serialize)]
pub struct SweepConfig {
    pub command: String,
    pub p: Vec<u32>,
    pub r: Vec<u32>,
    pub d: Vec<usize>,
    pub k: Vec<usize>,
    pub j: u32,
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, CliError> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad value {s:?} for {key}")))
        })
        .collect()
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut kv = BTreeMap::new();
        for line in text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
        {
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("expected key = value, got {line:?}")))?;
            kv.insert(key.trim().to_string(), value.trim().to_string());
        }
        let command = kv
            .remove("command")
            .ok_or_else(|| CliError::Usage("config lacks command".into()))?;
        if !COMMANDS.contains(&command.as_str()) {
            return Err(CliError::Usage(format!("sweep does not support {command:?}")));
        }
        let mut get = |key: &str, default: &str| kv.remove(key).unwrap_or_else(|| default.to_string());
        let p = get("p", "");
        if p.is_empty() {
            return Err(CliError::Usage("config lacks p".into()));
        }
        let d = get("d", "");
        if d.is_empty() {
            return Err(CliError::Usage("config lacks d".into()));
        }
        let cfg = SweepConfig {
            p: list("p", &p)?,
            r: list("r", &get("r", "1"))?,
            d: list("d", &d)?,
            k: list("k", &get("k", "2"))?,
            j: get("j", "1")
                .parse()
                .map_err(|_| CliError::Usage("bad value for j".into()))?,
            command,
        };
        if let Some(key) = kv.keys().next() {
            return Err(CliError::Usage(format!("unknown config key {key:?}")));
        }
        Ok(cfg)
    }

    fn header(&self) -> Vec<&'static str> {
        let tail: &[&'static str] = match self.command.as_str() {
            "energy" => &["t_k", "normalized_energy", "inequality_holds", "slack"],
            "classes" => &["classes", "unordered_classes", "total", "classes_over_q_power"],
            "cycles" => &["per_vertex", "total", "normalized_total"],
            "degenerate-span" => &["count", "ratio"],
            _ => &["mu", "mu_over_sqrt_q_power"],
        };
        let mut h = vec!["p", "r", "d", "k", "q", "size"];
        h.extend_from_slice(tail);
        h.push("error");
        h
    }

    fn cell(&self, p: u32, r: u32, d: usize, k: usize, cap: u64) -> Result<(u32, usize, Vec<String>), CliError> {
        let space = Space::with_cap(Arc::new(FieldCtx::new(p, r, None)?), d, cap)?;
        let q = space.q();
        let qf = q as f64;
        if self.command == "degenerate-span" {
            let l = degenerate_span_count(&space, k)?;
            return Ok((q, l.sphere_size, vec![l.count.to_string(), format!("{:.6}", l.ratio)]));
        }
        if self.j >= q {
            return Err(CliError::Usage(format!("j = {} is not an element of F_{q}", self.j)));
        }
        let e = sphere(&space, self.j, &Vector::zero(d))?;
        let n = e.len() as f64;
        let values = match self.command.as_str() {
            "energy" => {
                let t = additive_energy(&e, k)?;
                let (holds, slack) = if self.j == 1 {
                    let c = energy_inequality_check(&e, k)?;
                    (c.holds.to_string(), format!("{:.6}", c.slack))
                } else {
                    (String::new(), String::new())
                };
                let norm = t as f64 * qf / n.powi(2 * k as i32 - 1);
                vec![t.to_string(), format!("{norm:.6}"), holds, slack]
            }
            "classes" => {
                let t = congruence_class_count(&e, k)?;
                let power = qf.powi((2 * k * k - 3 * k) as i32);
                vec![
                    t.len().to_string(),
                    t.unordered_classes.to_string(),
                    t.total.to_string(),
                    format!("{:.6}", t.len() as f64 / power),
                ]
            }
            "cycles" => {
                let g = CayleyGraph::new(e.clone())?;
                let per = cycles_through_vertex(&g, 0, 2 * k)? as u128;
                let total = per * space.size() as u128;
                let norm = total as f64 / (n.powi(2 * k as i32 - 1) * qf.powi(d as i32 - 1));
                vec![per.to_string(), total.to_string(), format!("{norm:.6}")]
            }
            _ => {
                let mu = fourier_spectrum(&e)?.mu;
                vec![
                    format!("{mu:.6}"),
                    format!("{:.6}", mu / qf.powf((d as f64 - 1.0) / 2.0)),
                ]
            }
        };
        Ok((q, e.len(), values))
    }

    /// Runs every cell and renders the CSV body.
    pub fn run(&self, cap: u64) -> Result<String, CliError> {
        let header = self.header();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header).map_err(|e| CliError::Usage(e.to_string()))?;
        for &p in &self.p {
            for &r in &self.r {
                for &d in &self.d {
                    for &k in &self.k {
                        let mut row = vec![p.to_string(), r.to_string(), d.to_string(), k.to_string()];
                        match self.cell(p, r, d, k, cap) {
                            Ok((q, size, values)) => {
                                row.push(q.to_string());
                                row.push(size.to_string());
                                row.extend(values);
                                row.push(String::new());
                            }
                            Err(e) => {
                                row.resize(header.len() - 1, String::new());
                                row.push(e.to_string());
                            }
                        }
                        w.write_record(&row).map_err(|e| CliError::Usage(e.to_string()))?;
                    }
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists_and_defaults() {
        let c = SweepConfig::parse("# x\ncommand = energy\np = 5, 7\nd = 3\n").unwrap();
        assert_eq!(c.p, vec![5, 7]);
        assert_eq!(c.r, vec![1]);
        assert_eq!(c.k, vec![2]);
        assert!(SweepConfig::parse("command = energy\np = 5\n").is_err());
        assert!(SweepConfig::parse("command = energy\np = 5\nd = 2\nz = 1\n").is_err());
        assert!(SweepConfig::parse("command = mixing\np = 5\nd = 2\n").is_err());
    }

    #[test]
    fn energy_rows() {
        let c = SweepConfig::parse("command = energy\np = 3, 5\nd = 2\nk = 2\n").unwrap();
        let body = c.run(1_000_000).unwrap();
        let lines: Vec<&str> = body.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("p,r,d,k,q,size,t_k"));
        assert!(lines[2].starts_with("5,1,2,2,5,4,"));
    }

    #[test]
    fn failing_cell_keeps_its_row() {
        let c = SweepConfig::parse("command = spectrum\np = 4, 3\nd = 2\n").unwrap();
        let body = c.run(1_000_000).unwrap();
        let lines: Vec<&str> = body.lines().collect();
        assert!(lines[1].ends_with("4 is not prime"));
        assert!(lines[2].ends_with(','));
    }
}
