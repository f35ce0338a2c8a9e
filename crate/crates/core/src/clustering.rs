//! Mean-shift mode seeking over projected house coordinates.
//!
//! Every house seeds one trajectory. Trajectories climb the Gaussian kernel
//! density estimate until the step length drops below `convergence_eps`;
//! the resulting modes are merged greedily and become the proposed stops.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::coverage::assign_nearest;
use crate::error::{Error, Result};
use crate::geo::{GeoPoint, LocalFrame, PlanarPoint};

#[derive(Debug, Clone, PartialEq)]
pub struct MeanShiftConfig {
    /// Kernel standard deviation in meters; doubles as the service radius.
    pub bandwidth: f64,
    /// Step length (meters) below which a trajectory counts as converged.
    pub convergence_eps: f64,
    pub max_iterations: usize,
    /// Modes closer than this (meters) collapse into one center.
    pub merge_radius: f64,
    /// Weights beyond `kernel_cutoff * bandwidth` are exactly zero.
    pub kernel_cutoff: f64,
}

impl MeanShiftConfig {
    pub fn new(bandwidth: f64) -> Self {
        Self {
            bandwidth,
            convergence_eps: 0.01,
            max_iterations: 300,
            merge_radius: bandwidth,
            kernel_cutoff: 3.0,
        }
    }

    /// Same settings at a different bandwidth; `merge_radius` follows the bandwidth.
    pub fn with_bandwidth(&self, bandwidth: f64) -> Self {
        Self {
            bandwidth,
            merge_radius: bandwidth,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::InvalidConfig(format!("{what} = {v}")));
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return bad("bandwidth must be > 0", self.bandwidth);
        }
        if !(self.convergence_eps > 0.0) {
            return bad("convergence_eps must be > 0", self.convergence_eps);
        }
        if self.max_iterations < 1 {
            return bad("max_iterations must be >= 1", self.max_iterations as f64);
        }
        if !(self.merge_radius > 0.0) {
            return bad("merge_radius must be > 0", self.merge_radius);
        }
        if !(self.kernel_cutoff >= 1.0) {
            return bad("kernel_cutoff must be >= 1", self.kernel_cutoff);
        }
        Ok(())
    }

    fn support(&self) -> f64 {
        self.kernel_cutoff * self.bandwidth
    }
}

/// Converged modes (the proposed stops) and the house-to-stop assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    pub centers: Vec<GeoPoint>,
    /// Index into `centers` of each house's geodesically nearest center.
    pub assignment: Vec<usize>,
    pub bandwidth: f64,
    /// Mean-shift steps taken by each seed; `None` for seeds dropped as isolated.
    pub iterations_per_seed: Vec<Option<usize>>,
    /// Origin of the local plane the arithmetic ran in.
    pub origin: GeoPoint,
}

impl ClusterResult {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

/// Gaussian kernel `exp(-d^2 / (2 h^2))`, truncated to zero past `cutoff * h`.
pub fn gaussian_weight(d: f64, bandwidth: f64, cutoff: f64) -> f64 {
    if d > cutoff * bandwidth {
        return 0.0;
    }
    (-(d * d) / (2.0 * bandwidth * bandwidth)).exp()
}

fn weight_sq(d_sq: f64, cfg: &MeanShiftConfig) -> f64 {
    let support = cfg.support();
    if d_sq > support * support {
        return 0.0;
    }
    (-d_sq / (2.0 * cfg.bandwidth * cfg.bandwidth)).exp()
}

/// One mean-shift step over every point of `data`: the kernel-weighted mean.
pub fn shift_once(
    x: PlanarPoint,
    data: &[PlanarPoint],
    cfg: &MeanShiftConfig,
) -> Result<PlanarPoint> {
    if data.is_empty() {
        return Err(Error::EmptyInput);
    }
    weighted_mean(x, data.iter(), cfg)
}

/// Kernel density (unnormalized) at `x` over every point of `data`.
pub fn kernel_density(x: PlanarPoint, data: &[PlanarPoint], cfg: &MeanShiftConfig) -> f64 {
    data.iter().map(|s| weight_sq(x.distance_sq(s), cfg)).sum()
}

/// Support-shifted profile `exp(-d^2 / 2h^2) - exp(-c^2 / 2)` inside the
/// cutoff `c * h`, zero outside. This is the density whose ascent the
/// truncated-Gaussian shift guarantees: its profile is convex and its negative
/// derivative is the truncated Gaussian weight itself.
fn shadow_weight_sq(d_sq: f64, cfg: &MeanShiftConfig) -> f64 {
    let w = weight_sq(d_sq, cfg);
    if w == 0.0 {
        return 0.0;
    }
    w - (-0.5 * cfg.kernel_cutoff * cfg.kernel_cutoff).exp()
}

/// Density climbed by [`shift_once`] trajectories; see [`MeanShift::shadow_density`].
pub fn shadow_density(x: PlanarPoint, data: &[PlanarPoint], cfg: &MeanShiftConfig) -> f64 {
    data.iter()
        .map(|s| shadow_weight_sq(x.distance_sq(s), cfg))
        .sum()
}

fn weighted_mean<'a>(
    x: PlanarPoint,
    points: impl Iterator<Item = &'a PlanarPoint>,
    cfg: &MeanShiftConfig,
) -> Result<PlanarPoint> {
    let (mut sw, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for s in points {
        let w = weight_sq(x.distance_sq(s), cfg);
        sw += w;
        sx += w * s.x;
        sy += w * s.y;
    }
    if sw == 0.0 {
        return Err(Error::IsolatedSeed);
    }
    Ok(PlanarPoint::new(sx / sw, sy / sw))
}

/// Greedy agglomeration: modes are visited by descending weight (ties by
/// ascending index) and absorbed when closer than `merge_radius` to an
/// accepted one. Returns the indices of the accepted modes in acceptance order.
pub fn merge_mode_indices(
    modes: &[PlanarPoint],
    weights: &[usize],
    merge_radius: f64,
) -> Vec<usize> {
    assert_eq!(
        modes.len(),
        weights.len(),
        "modes and weights differ in length"
    );
    let mut order: Vec<usize> = (0..modes.len()).collect();
    order.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));

    let r_sq = merge_radius * merge_radius;
    let mut accepted: Vec<usize> = Vec::new();
    for i in order {
        if accepted
            .iter()
            .all(|&j| modes[i].distance_sq(&modes[j]) >= r_sq)
        {
            accepted.push(i);
        }
    }
    accepted
}

pub fn merge_modes(
    modes: &[PlanarPoint],
    weights: &[usize],
    merge_radius: f64,
) -> Vec<PlanarPoint> {
    merge_mode_indices(modes, weights, merge_radius)
        .into_iter()
        .map(|i| modes[i])
        .collect()
}

/// Uniform square binning; a query disc of radius `cell` touches at most 3x3 cells.
#[derive(Debug, Clone)]
struct NeighborGrid {
    cell: f64,
    bins: HashMap<(i64, i64), Vec<u32>>,
}

impl NeighborGrid {
    fn new(points: &[PlanarPoint], cell: f64) -> Self {
        let mut bins: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            bins.entry(Self::key(cell, p)).or_default().push(i as u32);
        }
        Self { cell, bins }
    }

    fn key(cell: f64, p: &PlanarPoint) -> (i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
    }

    fn around(&self, p: &PlanarPoint) -> impl Iterator<Item = usize> + '_ {
        let (cx, cy) = Self::key(self.cell, p);
        (-1..=1)
            .flat_map(move |dy| (-1..=1).map(move |dx| (cx + dx, cy + dy)))
            .filter_map(|k| self.bins.get(&k))
            .flatten()
            .map(|&i| i as usize)
    }
}

/// Result of following one seed uphill.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Seed first, final position last.
    pub points: Vec<PlanarPoint>,
    pub converged: bool,
}

impl Trajectory {
    pub fn end(&self) -> PlanarPoint {
        *self
            .points
            .last()
            .expect("trajectory holds at least its seed")
    }

    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }
}

/// Projected dataset plus a neighbor index sized to the kernel support.
#[derive(Debug, Clone)]
pub struct MeanShift {
    cfg: MeanShiftConfig,
    frame: LocalFrame,
    points: Vec<PlanarPoint>,
    grid: NeighborGrid,
}

impl MeanShift {
    pub fn new(houses: &[GeoPoint], cfg: &MeanShiftConfig) -> Result<Self> {
        cfg.validate()?;
        let frame = LocalFrame::centered_on(houses)?;
        let points = frame.project_all(houses)?;
        Ok(Self::from_planar(frame, points, cfg.clone()))
    }

    pub fn from_planar(frame: LocalFrame, points: Vec<PlanarPoint>, cfg: MeanShiftConfig) -> Self {
        let grid = NeighborGrid::new(&points, cfg.support());
        Self {
            cfg,
            frame,
            points,
            grid,
        }
    }

    pub fn config(&self) -> &MeanShiftConfig {
        &self.cfg
    }

    pub fn frame(&self) -> &LocalFrame {
        &self.frame
    }

    pub fn points(&self) -> &[PlanarPoint] {
        &self.points
    }

    fn neighbors(&self, x: &PlanarPoint) -> impl Iterator<Item = &PlanarPoint> + '_ {
        self.grid.around(x).map(|i| &self.points[i])
    }

    /// Grid-accelerated equivalent of [`shift_once`].
    pub fn shift(&self, x: PlanarPoint) -> Result<PlanarPoint> {
        weighted_mean(x, self.neighbors(&x), &self.cfg)
    }

    /// Grid-accelerated equivalent of [`kernel_density`].
    pub fn density(&self, x: PlanarPoint) -> f64 {
        self.neighbors(&x)
            .map(|s| weight_sq(x.distance_sq(s), &self.cfg))
            .sum()
    }

    /// Grid-accelerated equivalent of [`shadow_density`]; non-decreasing along
    /// every trajectory.
    pub fn shadow_density(&self, x: PlanarPoint) -> f64 {
        self.neighbors(&x)
            .map(|s| shadow_weight_sq(x.distance_sq(s), &self.cfg))
            .sum()
    }

    pub fn trajectory(&self, seed: PlanarPoint) -> Result<Trajectory> {
        let mut points = vec![seed];
        let mut x = seed;
        let eps_sq = self.cfg.convergence_eps * self.cfg.convergence_eps;
        for _ in 0..self.cfg.max_iterations {
            let next = self.shift(x)?;
            points.push(next);
            let step_sq = next.distance_sq(&x);
            x = next;
            if step_sq < eps_sq {
                return Ok(Trajectory {
                    points,
                    converged: true,
                });
            }
        }
        Ok(Trajectory {
            points,
            converged: false,
        })
    }

    /// Number of data points within one bandwidth of `x`.
    fn support_count(&self, x: &PlanarPoint) -> usize {
        let h_sq = self.cfg.bandwidth * self.cfg.bandwidth;
        self.neighbors(x)
            .filter(|s| s.distance_sq(x) <= h_sq)
            .count()
    }

    /// Runs every seed, merges the modes and assigns houses to the survivors.
    pub fn run(&self, houses: &[GeoPoint]) -> Result<ClusterResult> {
        let ends: Vec<Option<(PlanarPoint, usize)>> = self
            .points
            .par_iter()
            .map(|&seed| match self.trajectory(seed) {
                Ok(t) => Ok(Some((t.end(), t.steps()))),
                Err(Error::IsolatedSeed) => Ok(None),
                Err(e) => Err(e),
            })
            .collect::<Result<_>>()?;

        let modes: Vec<PlanarPoint> = ends.iter().flatten().map(|&(p, _)| p).collect();
        if modes.is_empty() {
            return Err(Error::IsolatedSeed);
        }
        let weights: Vec<usize> = modes.par_iter().map(|m| self.support_count(m)).collect();
        let centers = merge_modes(&modes, &weights, self.cfg.merge_radius)
            .into_iter()
            .map(|p| self.frame.unproject(p))
            .collect::<Result<Vec<_>>>()?;

        let assignment = assign_nearest(houses, &centers)?
            .into_iter()
            .map(|(i, _)| i)
            .collect();

        Ok(ClusterResult {
            centers,
            assignment,
            bandwidth: self.cfg.bandwidth,
            iterations_per_seed: ends.iter().map(|e| e.map(|(_, n)| n)).collect(),
            origin: self.frame.origin(),
        })
    }
}

/// Mean-shift clustering of `houses`; deterministic for identical input.
pub fn mean_shift(houses: &[GeoPoint], cfg: &MeanShiftConfig) -> Result<ClusterResult> {
    if houses.is_empty() {
        return Err(Error::EmptyInput);
    }
    MeanShift::new(houses, cfg)?.run(houses)
}
