//! Fixed design grids, functional samples and the interpolated mean curve.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::stats::order_independent_sum;

/// Heuristic threshold above which [`MeshReport::warning`] is raised.
pub const QUASI_UNIFORM_WARNING_RATIO: f64 = 10.0;

/// Strictly increasing observation times `t_1 < … < t_p` in `[0, T]`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DesignGrid {
    points: Vec<f64>,
    horizon: f64,
}

/// Gap statistics of a design grid, with sentinels `t_0 = 0` and `t_{p+1} = T`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeshReport {
    /// Largest gap over `j = 0..=p`, sentinels included.
    pub max_gap: f64,
    /// Smallest gap between consecutive interior points `t_1..t_p`.
    pub min_interior_gap: f64,
    /// `max_gap / min_interior_gap`.
    pub quasi_uniform_ratio: f64,
    /// Set when the ratio exceeds [`QUASI_UNIFORM_WARNING_RATIO`]. Never an error.
    pub warning: bool,
}

/// Validates `points` on `[0, horizon]` and reports its gap statistics.
pub fn validate_grid(points: &[f64], horizon: f64) -> Result<MeshReport> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidGrid(format!("horizon must be positive, got {horizon}")));
    }
    if points.len() < 2 {
        return Err(Error::InvalidGrid(format!(
            "at least 2 points are required, got {}",
            points.len()
        )));
    }
    for (j, &t) in points.iter().enumerate() {
        if !t.is_finite() || t < 0.0 || t > horizon {
            return Err(Error::InvalidGrid(format!(
                "point {} = {t} lies outside [0, {horizon}]",
                j + 1
            )));
        }
    }
    for (j, w) in points.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidGrid(format!(
                "points must be strictly increasing: t_{} = {} is followed by t_{} = {}",
                j + 1,
                w[0],
                j + 2,
                w[1]
            )));
        }
    }

    let p = points.len();
    let min_interior_gap = points.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let max_gap = points
        .windows(2)
        .map(|w| w[1] - w[0])
        .chain([points[0], horizon - points[p - 1]])
        .fold(0.0, f64::max);
    let quasi_uniform_ratio = max_gap / min_interior_gap;
    Ok(MeshReport {
        max_gap,
        min_interior_gap,
        quasi_uniform_ratio,
        warning: quasi_uniform_ratio > QUASI_UNIFORM_WARNING_RATIO,
    })
}

impl DesignGrid {
    pub fn new(points: Vec<f64>, horizon: f64) -> Result<Self> {
        validate_grid(&points, horizon)?;
        Ok(DesignGrid { points, horizon })
    }

    /// `p` equally spaced points on `[0, T]`, both endpoints included.
    pub fn equispaced(p: usize, horizon: f64) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidGrid(format!("at least 2 points are required, got {p}")));
        }
        let step = horizon / (p - 1) as f64;
        let mut points: Vec<f64> = (0..p).map(|j| j as f64 * step).collect();
        points[p - 1] = horizon;
        Self::new(points, horizon)
    }

    #[inline]
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn mesh_report(&self) -> MeshReport {
        validate_grid(&self.points, self.horizon).expect("grid validated on construction")
    }

    pub fn contains_time(&self, t: f64) -> bool {
        (0.0..=self.horizon).contains(&t)
    }
}

/// `n` equally spaced evaluation times on `[0, T]`, endpoints included.
pub fn uniform_eval_grid(count: usize, horizon: f64) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => alloc::vec![0.5 * horizon],
        _ => {
            let step = horizon / (count - 1) as f64;
            let mut v: Vec<f64> = (0..count).map(|i| i as f64 * step).collect();
            v[count - 1] = horizon;
            v
        }
    }
}

/// `n` curves observed on a common grid: the `n × p` matrix `Y_ij`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FunctionalSample {
    /// Row-major `n × p` observations.
    data: Vec<f64>,
    n: usize,
    grid: DesignGrid,
}

impl FunctionalSample {
    /// Builds a sample from row-major data with `grid.len()` columns.
    pub fn new(data: Vec<f64>, grid: DesignGrid) -> Result<Self> {
        let p = grid.len();
        if data.is_empty() {
            return Err(Error::InvalidSample("at least one curve is required".into()));
        }
        if !data.len().is_multiple_of(p) {
            return Err(Error::InvalidSample(format!(
                "{} values do not form rows of length {p}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSample(format!(
                "non-finite value at curve {}, point {}",
                pos / p + 1,
                pos % p + 1
            )));
        }
        let n = data.len() / p;
        Ok(FunctionalSample { data, n, grid })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], grid: DesignGrid) -> Result<Self> {
        let p = grid.len();
        let mut data = Vec::with_capacity(rows.len() * p);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != p {
                return Err(Error::InvalidSample(format!(
                    "curve {} has {} values, expected {p}",
                    i + 1,
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(data, grid)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.grid.len()
    }

    #[inline]
    pub fn grid(&self) -> &DesignGrid {
        &self.grid
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let p = self.p();
        &self.data[i * p..(i + 1) * p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.p())
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_parts(self) -> (Vec<f64>, DesignGrid) {
        (self.data, self.grid)
    }

    /// Column means `Ȳ_j`.
    ///
    /// Each column is summed in a canonical order, so permuting the curves
    /// does not change a single bit of the result.
    pub fn cross_sectional_means(&self) -> Vec<f64> {
        let p = self.p();
        let nf = self.n as f64;
        let mut column = Vec::with_capacity(self.n);
        (0..p)
            .map(|j| {
                column.clear();
                column.extend(self.rows().map(|r| r[j]));
                order_independent_sum(&mut column) / nf
            })
            .collect()
    }
}

/// Evaluates the piecewise-linear interpolant of `(t_j, means_j)` at `t`,
/// held constant on `[0, t_1]` and `[t_p, T]`.
pub fn interpolant_eval(means: &[f64], grid: &DesignGrid, t: f64) -> Result<f64> {
    let pts = grid.points();
    if means.len() != pts.len() {
        return Err(Error::InvalidArgument(format!(
            "{} means for a grid of {} points",
            means.len(),
            pts.len()
        )));
    }
    if !grid.contains_time(t) {
        return Err(Error::Domain {
            t,
            horizon: grid.horizon(),
        });
    }
    Ok(interpolate(means, pts, t))
}

#[inline]
pub(crate) fn interpolate(means: &[f64], pts: &[f64], t: f64) -> f64 {
    let p = pts.len();
    if t <= pts[0] {
        return means[0];
    }
    if t >= pts[p - 1] {
        return means[p - 1];
    }
    let k = pts.partition_point(|&x| x <= t);
    let (t0, t1) = (pts[k - 1], pts[k]);
    let lambda = (t - t0) / (t1 - t0);
    (1.0 - lambda) * means[k - 1] + lambda * means[k]
}
