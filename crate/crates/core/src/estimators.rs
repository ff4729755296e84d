//! Trend estimators for the mean function `μ = E X`.
//!
//! Two estimators are provided, both linear in the cross-sectional means
//! `Ȳ_j`:
//!
//! * [`Method::Clark`]: the convolution of `K_h` with the piecewise-linear
//!   interpolant `Ȳ(·)`, renormalized by the kernel mass inside `[0, T]`.
//!   The integral is computed exactly: the window `[t - h, t + h] ∩ [0, T]`
//!   is split at the design points and at the kernel breakpoints, and each
//!   piece is integrated by Gauss–Legendre quadrature of an order that is
//!   exact for a polynomial kernel times a linear function.
//! * [`Method::LocalLinear`]: the intercept of the kernel-weighted least
//!   squares line through `(t_j, Ȳ_j)` centred at `t`.
//!
//! [`effective_weights`] exposes the linear map `Ȳ ↦ μ̂(t)` and
//! [`LinearSmoother`] caches it for a whole evaluation grid.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::design::{DesignGrid, FunctionalSample};
use crate::error::{Error, Result};
use crate::float::{ln, powf, sqrt};
use crate::kernels::{gauss_legendre, Kernel};

/// Default number of evaluation points on `[0, T]`.
pub const DEFAULT_EVAL_POINTS: usize = 401;

/// Floor of the automatic bandwidth in units of the largest design gap.
pub const AUTO_BANDWIDTH_GAP_FLOOR: f64 = 2.5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    /// Boundary-corrected convolution of the interpolated means.
    Clark,
    /// Local linear regression on the cross-sectional means.
    #[default]
    LocalLinear,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Clark => "clark",
            Method::LocalLinear => "loclin",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "clark" => Ok(Method::Clark),
            "loclin" | "local_linear" | "local-linear" => Ok(Method::LocalLinear),
            other => Err(Error::InvalidArgument(format!(
                "unknown method '{other}' (expected clark or loclin)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Bandwidth {
    /// `h = T · n^{-1/3} · (log max(n, 3))^{-1/2}`, floored at
    /// [`AUTO_BANDWIDTH_GAP_FLOOR`] times the largest design gap and capped at `T`.
    #[default]
    Auto,
    Fixed(f64),
}

impl fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bandwidth::Auto => f.write_str("auto"),
            Bandwidth::Fixed(h) => write!(f, "{h}"),
        }
    }
}

impl FromStr for Bandwidth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Bandwidth::Auto);
        }
        let h: f64 = s
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bandwidth '{s}' is neither 'auto' nor a number")))?;
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidBandwidth(h));
        }
        Ok(Bandwidth::Fixed(h))
    }
}

/// Automatic bandwidth for `n` curves on `grid`.
pub fn auto_bandwidth(n: usize, grid: &DesignGrid) -> f64 {
    let horizon = grid.horizon();
    let nf = n.max(1) as f64;
    let rate = horizon * powf(nf, -1.0 / 3.0) / sqrt(ln(nf.max(3.0)));
    let floor = AUTO_BANDWIDTH_GAP_FLOOR * grid.mesh_report().max_gap;
    rate.max(floor).min(horizon)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimatorConfig {
    pub method: Method,
    pub kernel: Kernel,
    pub bandwidth: Bandwidth,
}

impl EstimatorConfig {
    pub fn new(method: Method, kernel: Kernel, bandwidth: Bandwidth) -> Self {
        EstimatorConfig {
            method,
            kernel,
            bandwidth,
        }
    }

    pub fn clark(bandwidth: Bandwidth) -> Self {
        Self::new(Method::Clark, Kernel::Epanechnikov, bandwidth)
    }

    pub fn local_linear(bandwidth: Bandwidth) -> Self {
        Self::new(Method::LocalLinear, Kernel::Epanechnikov, bandwidth)
    }

    /// Bandwidth in time units for a sample of `n` curves on `grid`.
    pub fn resolve_bandwidth(&self, n: usize, grid: &DesignGrid) -> Result<f64> {
        let h = match self.bandwidth {
            Bandwidth::Auto => auto_bandwidth(n, grid),
            Bandwidth::Fixed(h) => h,
        };
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidBandwidth(h));
        }
        if self.method == Method::Clark && h > grid.horizon() {
            return Err(Error::InvalidBandwidth(h));
        }
        Ok(h)
    }

    /// Same configuration with the bandwidth pinned to `h`.
    pub fn with_fixed_bandwidth(self, h: f64) -> Self {
        EstimatorConfig {
            bandwidth: Bandwidth::Fixed(h),
            ..self
        }
    }
}

/// Estimated trend on an evaluation grid.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrendEstimate {
    pub eval_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub config: EstimatorConfig,
    /// Bandwidth actually used, in time units.
    pub bandwidth: f64,
    /// Number of curves in the sample.
    pub n: usize,
    /// Hash of the grid and the cross-sectional means.
    pub fingerprint: u64,
}

/// Checks that evaluation times are non-empty, ordered and inside `[0, T]`.
pub fn check_eval_grid(eval_grid: &[f64], horizon: f64) -> Result<()> {
    if eval_grid.is_empty() {
        return Err(Error::InvalidArgument("evaluation grid is empty".into()));
    }
    for &t in eval_grid {
        if !(0.0..=horizon).contains(&t) {
            return Err(Error::Domain { t, horizon });
        }
    }
    if eval_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("evaluation grid must be ordered".into()));
    }
    Ok(())
}

/// Estimates the trend with whichever method `config` selects.
pub fn estimate(sample: &FunctionalSample, config: &EstimatorConfig, eval_grid: &[f64]) -> Result<TrendEstimate> {
    let grid = sample.grid();
    check_eval_grid(eval_grid, grid.horizon())?;
    let h = config.resolve_bandwidth(sample.n(), grid)?;
    let means = sample.cross_sectional_means();
    let values = eval_grid
        .iter()
        .map(|&t| evaluate_at(config.method, config.kernel, h, &means, grid, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrendEstimate {
        eval_grid: eval_grid.to_vec(),
        values,
        config: *config,
        bandwidth: h,
        n: sample.n(),
        fingerprint: fingerprint(grid, sample.n(), &means),
    })
}

/// Boundary-corrected convolution estimator.
pub fn clark_estimate(sample: &FunctionalSample, config: &EstimatorConfig, eval_grid: &[f64]) -> Result<TrendEstimate> {
    if config.method != Method::Clark {
        return Err(Error::InvalidArgument(format!(
            "clark_estimate called with method '{}'",
            config.method
        )));
    }
    estimate(sample, config, eval_grid)
}

/// Local linear estimator.
pub fn local_linear_estimate(
    sample: &FunctionalSample,
    config: &EstimatorConfig,
    eval_grid: &[f64],
) -> Result<TrendEstimate> {
    if config.method != Method::LocalLinear {
        return Err(Error::InvalidArgument(format!(
            "local_linear_estimate called with method '{}'",
            config.method
        )));
    }
    estimate(sample, config, eval_grid)
}

/// Weights `w_j(t)` with `μ̂(t) = Σ_j w_j(t) Ȳ_j`, for a sample of `n` curves
/// (used only to resolve an automatic bandwidth).
pub fn effective_weights(config: &EstimatorConfig, grid: &DesignGrid, n: usize, t: f64) -> Result<Vec<f64>> {
    let h = config.resolve_bandwidth(n, grid)?;
    if !grid.contains_time(t) {
        return Err(Error::Domain {
            t,
            horizon: grid.horizon(),
        });
    }
    let mut w = vec![0.0; grid.len()];
    match config.method {
        Method::Clark => {
            let norm = clark_accumulate(config.kernel, h, grid, t, |j, c| w[j] += c)?;
            for v in &mut w {
                *v /= norm;
            }
        }
        Method::LocalLinear => {
            let pts = grid.points();
            let range = window(pts, t, h);
            let s = local_moments(config.kernel, h, pts, t, range.clone())?;
            for j in range {
                let d = pts[j] - t;
                w[j] = config.kernel.eval_scaled(d, h) * (s.s2 - s.s1 * d) / s.det;
            }
        }
    }
    Ok(w)
}

pub(crate) fn evaluate_at(
    method: Method,
    kernel: Kernel,
    h: f64,
    means: &[f64],
    grid: &DesignGrid,
    t: f64,
) -> Result<f64> {
    match method {
        Method::Clark => {
            let mut acc = 0.0;
            let norm = clark_accumulate(kernel, h, grid, t, |j, c| acc += c * means[j])?;
            Ok(acc / norm)
        }
        Method::LocalLinear => {
            let pts = grid.points();
            let range = window(pts, t, h);
            let s = local_moments(kernel, h, pts, t, range.clone())?;
            let (mut t0, mut t1) = (0.0, 0.0);
            for j in range {
                let d = pts[j] - t;
                let k = kernel.eval_scaled(d, h);
                t0 += k * means[j];
                t1 += k * d * means[j];
            }
            Ok((s.s2 * t0 - s.s1 * t1) / s.det)
        }
    }
}

/// Indices `j` with `|t_j - t| < h`.
fn window(pts: &[f64], t: f64, h: f64) -> core::ops::Range<usize> {
    let lo = pts.partition_point(|&x| x <= t - h);
    let hi = pts.partition_point(|&x| x < t + h);
    lo..hi.max(lo)
}

struct LocalMoments {
    s1: f64,
    s2: f64,
    det: f64,
}

fn local_moments(kernel: Kernel, h: f64, pts: &[f64], t: f64, range: core::ops::Range<usize>) -> Result<LocalMoments> {
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    let mut positive = 0usize;
    for &x in &pts[range] {
        let d = x - t;
        let k = kernel.eval_scaled(d, h);
        if k > 0.0 {
            positive += 1;
        }
        s0 += k;
        s1 += k * d;
        s2 += k * d * d;
    }
    let det = s0 * s2 - s1 * s1;
    let eps = 1e-12 * (s0 * s2 + s1 * s1);
    if positive < 2 || !(det > eps) {
        return Err(Error::DegenerateWindow { t });
    }
    Ok(LocalMoments { s1, s2, det })
}

/// Exact convolution of `K_h(t - ·)` with each interpolation basis function.
///
/// Calls `emit(j, c)` with the (unnormalized) contribution `c` of `Ȳ_j` and
/// returns the normalizing mass `∫_0^T K_h(t - u) du`.
fn clark_accumulate(
    kernel: Kernel,
    h: f64,
    grid: &DesignGrid,
    t: f64,
    mut emit: impl FnMut(usize, f64),
) -> Result<f64> {
    let horizon = grid.horizon();
    let norm = kernel.boundary_norm(t, h, horizon)?;
    if h > horizon {
        return Err(Error::InvalidBandwidth(h));
    }
    let pts = grid.points();
    let p = pts.len();
    let lo = (t - h).max(0.0);
    let hi = (t + h).min(horizon);

    let mut cuts: Vec<f64> = Vec::with_capacity(8);
    cuts.push(lo);
    let first = pts.partition_point(|&x| x <= lo);
    cuts.extend(pts[first..].iter().copied().take_while(|&x| x < hi));
    for &b in kernel.breakpoints() {
        let u = t - h * b;
        if u > lo && u < hi {
            cuts.push(u);
        }
    }
    cuts.push(hi);
    cuts.sort_unstable_by(f64::total_cmp);
    cuts.dedup();

    let (nodes, weights) = gauss_legendre(kernel.quadrature_order());
    for piece in cuts.windows(2) {
        let (a, b) = (piece[0], piece[1]);
        if !(b > a) {
            continue;
        }
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        // interpolation segment containing this piece
        let k = pts.partition_point(|&x| x <= mid);
        for (x, wq) in nodes.iter().zip(weights) {
            let u = mid + half * x;
            let c = half * wq * kernel.eval_scaled(t - u, h);
            if k == 0 {
                emit(0, c);
            } else if k == p {
                emit(p - 1, c);
            } else {
                let lambda = (u - pts[k - 1]) / (pts[k] - pts[k - 1]);
                emit(k - 1, c * (1.0 - lambda));
                emit(k, c * lambda);
            }
        }
    }
    Ok(norm)
}

fn fingerprint(grid: &DesignGrid, n: usize, means: &[f64]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET;
    let mut feed = |word: u64| {
        for byte in word.to_le_bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(PRIME);
        }
    };
    feed(n as u64);
    feed(grid.len() as u64);
    feed(grid.horizon().to_bits());
    for &t in grid.points() {
        feed(t.to_bits());
    }
    for &m in means {
        feed(m.to_bits());
    }
    hash
}

#[derive(Clone, Debug)]
struct SparseRow {
    start: usize,
    weights: Vec<f64>,
}

/// Precomputed weights of a trend estimator over a whole evaluation grid.
///
/// Applying the smoother to a vector of grid values is a sparse
/// matrix-vector product. Used to smooth many curves with one configuration.
#[derive(Clone, Debug)]
pub struct LinearSmoother {
    rows: Vec<SparseRow>,
    eval_grid: Vec<f64>,
    p: usize,
    bandwidth: f64,
}

impl LinearSmoother {
    pub fn new(config: &EstimatorConfig, grid: &DesignGrid, n: usize, eval_grid: &[f64]) -> Result<Self> {
        check_eval_grid(eval_grid, grid.horizon())?;
        let h = config.resolve_bandwidth(n, grid)?;
        let pinned = config.with_fixed_bandwidth(h);
        let rows = eval_grid
            .iter()
            .map(|&t| {
                let w = effective_weights(&pinned, grid, n, t)?;
                let start = w.iter().position(|&v| v != 0.0).unwrap_or(0);
                let end = w.iter().rposition(|&v| v != 0.0).map_or(start, |e| e + 1);
                Ok(SparseRow {
                    start,
                    weights: w[start..end].to_vec(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LinearSmoother {
            rows,
            eval_grid: eval_grid.to_vec(),
            p: grid.len(),
            bandwidth: h,
        })
    }

    pub fn eval_grid(&self) -> &[f64] {
        &self.eval_grid
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Smoothed values of `values` (one per design point) at every evaluation time.
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows.len()];
        self.apply_into(values, &mut out);
        out
    }

    pub fn apply_into(&self, values: &[f64], out: &mut [f64]) {
        assert_eq!(values.len(), self.p, "values must have one entry per design point");
        assert_eq!(out.len(), self.rows.len());
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row
                .weights
                .iter()
                .zip(&values[row.start..row.start + row.weights.len()])
                .map(|(w, v)| w * v)
                .sum();
        }
    }
}
