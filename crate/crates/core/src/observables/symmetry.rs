use serde::{Deserialize, Serialize};

use super::monopoles::MonopoleMap;
use crate::error::{Error, Result};

/// Rectangular window on the vertex grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubGrid {
    pub row: usize,
    pub col: usize,
    pub rows: usize,
    pub cols: usize,
}

impl SubGrid {
    pub fn square(row: usize, col: usize, size: usize) -> Self {
        SubGrid { row, col, rows: size, cols: size }
    }
}

/// The eight symmetries of a square as maps on `(row, col)` in an `n × n` grid.
pub fn d4_images(n: usize, r: usize, c: usize) -> [(usize, usize); 8] {
    let m = n - 1;
    [(r, c), (c, m - r), (m - r, m - c), (m - c, r), (r, m - c), (m - r, c), (c, r), (m - c, m - r)]
}

/// Average of an `n × n` row-major array over the square's point group.
pub fn d4_average(values: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(values.len(), n * n);
    let mut out = vec![0.0; n * n];
    for r in 0..n {
        for c in 0..n {
            let v = values[r * n + c] / 8.0;
            for (rr, cc) in d4_images(n, r, c) {
                out[rr * n + cc] += v;
            }
        }
    }
    out
}

/// Monopole frequencies on `sub`, averaged over the eight symmetries.
pub fn symmetry_average(map: &MonopoleMap, sub: SubGrid) -> Result<Vec<f64>> {
    if sub.rows != sub.cols || sub.rows == 0 {
        return Err(Error::Config(format!("subgrid {}x{} is not a square", sub.rows, sub.cols)));
    }
    if sub.row + sub.rows > map.rows || sub.col + sub.cols > map.cols {
        return Err(Error::Config("subgrid exceeds the map".into()));
    }
    let n = sub.rows;
    let mut values = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let v = map
                .get(sub.row + r, sub.col + c)
                .ok_or_else(|| Error::Config(format!("subgrid contains a vacancy at ({}, {})", sub.row + r, sub.col + c)))?;
            values.push(v);
        }
    }
    Ok(d4_average(&values, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spike_spreads_over_orbit() {
        let n = 5;
        let mut v = vec![0.0; n * n];
        v[1] = 8.0;
        let avg = d4_average(&v, n);
        let hits: Vec<_> = avg.iter().filter(|&&x| x > 0.0).collect();
        assert_eq!(hits.len(), 8);
        assert!(hits.iter().all(|&&x| x == 1.0));
    }

    #[test]
    fn fixed_point() {
        let n = 4;
        let v: Vec<f64> = (0..n * n)
            .map(|k| {
                let (r, c) = (k / n, k % n);
                let d = (r as f64 - 1.5).hypot(c as f64 - 1.5);
                d * d
            })
            .collect();
        let avg = d4_average(&v, n);
        assert!(v.iter().zip(&avg).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn images_are_distinct_group_elements() {
        let imgs = d4_images(7, 1, 2);
        let mut u = imgs.to_vec();
        u.sort();
        u.dedup();
        assert_eq!(u.len(), 8);
    }
}
