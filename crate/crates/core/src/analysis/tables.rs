//! CSV and aligned markdown renderings of study results.

use std::io::Write;

use super::{ConvergenceTable, EquivalenceReport, RankDeficiencyTable};
use crate::error::Result;

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(String::new, |x| format!("{x:.prec$}"))
}

/// Pads every column to its widest cell.
pub fn markdown(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: Vec<String>| {
        let padded: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:>w$}")).collect();
        format!("| {} |\n", padded.join(" | "))
    };
    let mut out = line(header.iter().map(|s| s.to_string()).collect());
    out.push_str(&format!(
        "|{}|\n",
        width.iter().map(|w| format!("{}:", "-".repeat(w + 1))).collect::<Vec<_>>().join("|")
    ));
    for r in rows {
        out.push_str(&line(r.clone()));
    }
    out
}

impl ConvergenceTable {
    const HEADER: [&'static str; 8] =
        ["h", "H1 error", "H1 order", "L2 error", "L2 order", "iterations", "residual", "converged"];

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(Self::HEADER)?;
        for r in &self.rows {
            out.write_record([
                format!("1/{}", r.n),
                format!("{:e}", r.h1),
                r.h1_order.map_or_else(String::new, |v| format!("{v:e}")),
                format!("{:e}", r.l2),
                r.l2_order.map_or_else(String::new, |v| format!("{v:e}")),
                r.iterations.to_string(),
                format!("{:e}", r.residual),
                r.converged.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_markdown(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    format!("1/{}", r.n),
                    format!("{:.3e}", r.h1),
                    opt(r.h1_order, 3),
                    format!("{:.3e}", r.l2),
                    opt(r.l2_order, 3),
                    r.iterations.to_string(),
                    format!("{:.1e}", r.residual),
                    r.converged.to_string(),
                ]
            })
            .collect();
        markdown(&Self::HEADER, &rows)
    }
}

impl RankDeficiencyTable {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["Nx", "Ny", "Nz", "predicted", "computed"])?;
        for e in &self.entries {
            let c = match &e.computed {
                Ok(v) => v.to_string(),
                Err(msg) => msg.clone(),
            };
            out.write_record([
                e.counts[0].to_string(),
                e.counts[1].to_string(),
                e.counts[2].to_string(),
                e.predicted.to_string(),
                c,
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_markdown(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .entries
            .iter()
            .map(|e| {
                vec![
                    format!("({},{},{})", e.counts[0], e.counts[1], e.counts[2]),
                    e.predicted.to_string(),
                    match &e.computed {
                        Ok(v) => v.to_string(),
                        Err(msg) => msg.clone(),
                    },
                    if e.matches() { "yes" } else { "no" }.to_string(),
                ]
            })
            .collect();
        markdown(&["(Nx,Ny,Nz)", "predicted", "computed", "match"], &rows)
    }
}

impl EquivalenceReport {
    const HEADER: [&'static str; 8] = [
        "h",
        "scale",
        "max pairwise L2 (1-3)",
        "gap L2 (3-4)",
        "gap H1 (3-4)",
        "alternating defect",
        "gap - |alt part|",
        "",
    ];

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&Self::HEADER[..7])?;
        for r in &self.rows {
            out.write_record([
                format!("1/{}", r.n),
                format!("{:e}", r.scale),
                format!("{:e}", r.max_pairwise_l2),
                format!("{:e}", r.gap_l2),
                format!("{:e}", r.gap_h1),
                format!("{:e}", r.alternating_defect),
                format!("{:e}", r.gap_vs_alternating),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_markdown(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    format!("1/{}", r.n),
                    format!("{:.3e}", r.scale),
                    format!("{:.2e}", r.max_pairwise_l2),
                    format!("{:.3e}", r.gap_l2),
                    format!("{:.3e}", r.gap_h1),
                    format!("{:.2e}", r.alternating_defect),
                    format!("{:.2e}", r.gap_vs_alternating),
                ]
            })
            .collect();
        let mut s = markdown(&Self::HEADER[..7], &rows);
        match (self.slope_l2, self.slope_h1) {
            (Some(l2), Some(h1)) => {
                s.push_str(&format!("\nfitted slopes over {} resolved meshes: L2 {l2:.3}, H1 {h1:.3}\n", self.resolved))
            }
            _ => s.push_str(&format!(
                "\nfitted slopes: none, {} of {} gaps above roundoff\n",
                self.resolved,
                self.rows.len()
            )),
        }
        s
    }
}
