//! Plot-ready CSV and JSON output.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::monopoles::MonopoleMap;
use super::screening::ScreeningBin;
use super::structure::{CrossSection, StructureFactorGrid};

/// Row-major grid with its dimensions, `null` on missing cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridDocument {
    pub rows: usize,
    pub cols: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<f64>>,
    pub values: Vec<Option<f64>>,
}

impl From<&StructureFactorGrid> for GridDocument {
    fn from(sf: &StructureFactorGrid) -> Self {
        let q = sf.grid.values();
        GridDocument {
            rows: sf.grid.points,
            cols: sf.grid.points,
            x: Some(q.clone()),
            y: Some(q),
            values: sf.values.iter().copied().map(Some).collect(),
        }
    }
}

impl From<&MonopoleMap> for GridDocument {
    fn from(m: &MonopoleMap) -> Self {
        GridDocument { rows: m.rows, cols: m.cols, x: None, y: None, values: m.frequency.clone() }
    }
}

pub fn write_bins_csv<W: Write>(bins: &[ScreeningBin], mut out: W) -> std::io::Result<()> {
    writeln!(out, "distance,mean,min,max,count")?;
    for b in bins {
        writeln!(out, "{},{},{},{},{}", b.distance, b.mean, b.min, b.max, b.count)?;
    }
    Ok(())
}

pub fn write_cross_section_csv<W: Write>(cut: &CrossSection, mut out: W) -> std::io::Result<()> {
    writeln!(out, "offset,value")?;
    for (o, v) in cut.offsets.iter().zip(&cut.values) {
        writeln!(out, "{o},{v}")?;
    }
    Ok(())
}

/// Generic two-column-or-more table.
pub fn write_table_csv<W: Write>(header: &[&str], rows: &[Vec<f64>], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for r in rows {
        let cells: Vec<String> = r.iter().map(f64::to_string).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}
