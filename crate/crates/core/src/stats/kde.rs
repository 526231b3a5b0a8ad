//! Bivariate Gaussian kernel density estimate on a regular grid.

use serde::{Deserialize, Serialize};

use crate::error::StatsError;

pub const DEFAULT_GRID: usize = 64;

/// Padding around the data bounding box, in bandwidths.
const PAD_BANDWIDTHS: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdeGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major, `density[iy * xs.len() + ix]`.
    pub density: Vec<f64>,
    pub bandwidth: (f64, f64),
}

impl KdeGrid {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.density[iy * self.xs.len() + ix]
    }

    /// Riemann sum of the density over the grid.
    pub fn integral(&self) -> f64 {
        let step = |v: &[f64]| if v.len() > 1 { v[1] - v[0] } else { 0.0 };
        self.density.iter().sum::<f64>() * step(&self.xs) * step(&self.ys)
    }

    /// Grid coordinates of the highest density cell.
    pub fn argmax(&self) -> (f64, f64) {
        let (best, _) =
            self.density
                .iter()
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc },
                );
        let nx = self.xs.len();
        (self.xs[best % nx], self.ys[best / nx])
    }
}

fn sample_std(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Per-axis Scott bandwidth `sigma * n^(-1/6)`. An axis without spread
/// borrows the other axis' bandwidth.
pub fn scott_bandwidth(points: &[(f64, f64)]) -> Result<(f64, f64), StatsError> {
    if points.len() < 2 {
        return Err(StatsError::TooFewSamples {
            needed: 2,
            got: points.len(),
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let factor = (points.len() as f64).powf(-1.0 / 6.0);
    let (hx, hy) = (sample_std(&xs) * factor, sample_std(&ys) * factor);
    match (hx > 0.0, hy > 0.0) {
        (true, true) => Ok((hx, hy)),
        (true, false) => Ok((hx, hx)),
        (false, true) => Ok((hy, hy)),
        (false, false) => Err(StatsError::DegeneratePoints),
    }
}

pub fn kde2d(
    points: &[(f64, f64)],
    bandwidth: Option<(f64, f64)>,
    grid: usize,
) -> Result<KdeGrid, StatsError> {
    if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let auto = scott_bandwidth(points)?;
    let (hx, hy) = match bandwidth {
        Some((hx, hy)) if hx > 0.0 && hy > 0.0 && hx.is_finite() && hy.is_finite() => (hx, hy),
        Some((hx, hy)) => return Err(StatsError::BadBandwidth(hx, hy)),
        None => auto,
    };
    let grid = grid.max(2);
    let axis = |coords: Vec<f64>, h: f64| {
        let lo = coords.iter().copied().fold(f64::INFINITY, f64::min) - PAD_BANDWIDTHS * h;
        let hi = coords.iter().copied().fold(f64::NEG_INFINITY, f64::max) + PAD_BANDWIDTHS * h;
        let step = (hi - lo) / (grid - 1) as f64;
        (0..grid)
            .map(|i| lo + step * i as f64)
            .collect::<Vec<f64>>()
    };
    let xs = axis(points.iter().map(|p| p.0).collect(), hx);
    let ys = axis(points.iter().map(|p| p.1).collect(), hy);

    let norm = 1.0 / (2.0 * std::f64::consts::PI * hx * hy * points.len() as f64);
    let mut density = Vec::with_capacity(grid * grid);
    for &y in &ys {
        for &x in &xs {
            let s: f64 = points
                .iter()
                .map(|&(px, py)| {
                    let (u, v) = ((x - px) / hx, (y - py) / hy);
                    (-0.5 * (u * u + v * v)).exp()
                })
                .sum();
            density.push(s * norm);
        }
    }
    Ok(KdeGrid {
        xs,
        ys,
        density,
        bandwidth: (hx, hy),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_points_give_symmetric_grid() {
        let g = kde2d(&[(-1.0, 2.0), (1.0, 4.0)], None, 33).unwrap();
        let n = g.xs.len();
        for iy in 0..n {
            for ix in 0..n {
                let a = g.at(ix, iy);
                let b = g.at(n - 1 - ix, n - 1 - iy);
                assert!((a - b).abs() <= 1e-12 * a.max(1e-300), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn cluster_argmax_near_centroid() {
        let pts: Vec<(f64, f64)> = (0..25)
            .map(|i| {
                (
                    3.0 + 0.1 * ((i % 5) as f64 - 2.0),
                    7.0 + 0.1 * ((i / 5) as f64 - 2.0),
                )
            })
            .collect();
        let g = kde2d(&pts, None, DEFAULT_GRID).unwrap();
        let (cx, cy) = g.argmax();
        let (dx, dy) = (g.xs[1] - g.xs[0], g.ys[1] - g.ys[0]);
        assert!((cx - 3.0).abs() <= dx && (cy - 7.0).abs() <= dy);
    }

    #[test]
    fn integrates_to_one() {
        let pts = [(0.0, 0.0), (1.0, 3.0), (2.0, 1.0), (5.0, 2.5), (4.0, 4.0)];
        let g = kde2d(&pts, None, DEFAULT_GRID).unwrap();
        assert!((g.integral() - 1.0).abs() < 0.05, "{}", g.integral());
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(
            kde2d(&[(1.0, 1.0), (1.0, 1.0)], None, 8),
            Err(StatsError::DegeneratePoints)
        );
        assert!(kde2d(&[(1.0, 1.0)], None, 8).is_err());
        assert!(kde2d(&[(0.0, 1.0), (1.0, 1.0)], Some((0.0, 1.0)), 8).is_err());
        let g = kde2d(&[(0.0, 1.0), (2.0, 1.0)], None, 8).unwrap();
        assert_eq!(g.bandwidth.0, g.bandwidth.1);
    }
}
