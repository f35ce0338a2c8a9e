//! Bandwidth sweep, bandwidth selection and routing of the chosen stops.

use rayon::prelude::*;

use crate::clustering::{mean_shift, ClusterResult, MeanShiftConfig};
use crate::coverage::{coverage_report, CoverageReport};
use crate::error::{Error, Result};
use crate::geo::GeoPoint;
use crate::routing::{aco_solve, AcoParams, Tour};

/// Radii evaluated by default, in table order.
pub const DEFAULT_BANDWIDTHS: [f64; 6] = [500.0, 450.0, 400.0, 350.0, 300.0, 250.0];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    /// One row per bandwidth, descending bandwidth.
    pub rows: Vec<CoverageReport>,
    pub chosen_bandwidth: f64,
}

impl SweepReport {
    pub fn chosen_row(&self) -> &CoverageReport {
        self.rows
            .iter()
            .find(|r| r.bandwidth == self.chosen_bandwidth)
            .expect("chosen bandwidth is one of the rows")
    }
}

/// Lowest error share wins; on a tie the larger bandwidth (fewer stops) wins.
/// `rows` must already be in descending bandwidth order.
pub fn choose_bandwidth(rows: &[CoverageReport]) -> Option<f64> {
    rows.iter()
        .min_by(|a, b| {
            // cross-multiplied so differing totals compare exactly
            let lhs = a.error_count as u128 * b.total_houses.max(1) as u128;
            let rhs = b.error_count as u128 * a.total_houses.max(1) as u128;
            lhs.cmp(&rhs).then(b.bandwidth.total_cmp(&a.bandwidth))
        })
        .map(|r| r.bandwidth)
}

fn validate_bandwidths(bandwidths: &[f64]) -> Result<Vec<f64>> {
    if bandwidths.is_empty() {
        return Err(Error::InvalidConfig(
            "at least one bandwidth is required".into(),
        ));
    }
    if let Some(b) = bandwidths.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
        return Err(Error::InvalidConfig(format!(
            "bandwidth must be > 0, got {b}"
        )));
    }
    let mut sorted = bandwidths.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted.dedup();
    Ok(sorted)
}

/// Sweep that also keeps each bandwidth's clustering, in row order.
pub fn sweep_with_clusters(
    houses: &[GeoPoint],
    bandwidths: &[f64],
    template: &MeanShiftConfig,
) -> Result<(SweepReport, Vec<ClusterResult>)> {
    if houses.is_empty() {
        return Err(Error::EmptyInput);
    }
    let bandwidths = validate_bandwidths(bandwidths)?;
    let runs: Vec<(CoverageReport, ClusterResult)> = bandwidths
        .par_iter()
        .map(|&h| {
            let clusters = mean_shift(houses, &template.with_bandwidth(h))?;
            let report = coverage_report(houses, &clusters.centers, h)?;
            Ok((report, clusters))
        })
        .collect::<Result<_>>()?;
    let (rows, clusters): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    let chosen_bandwidth = choose_bandwidth(&rows).expect("non-empty sweep");
    Ok((
        SweepReport {
            rows,
            chosen_bandwidth,
        },
        clusters,
    ))
}

pub fn bandwidth_sweep(
    houses: &[GeoPoint],
    bandwidths: &[f64],
    template: &MeanShiftConfig,
) -> Result<SweepReport> {
    sweep_with_clusters(houses, bandwidths, template).map(|(report, _)| report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub sweep: SweepReport,
    /// Clustering at the chosen bandwidth; its centers are the routed stops.
    pub clusters: ClusterResult,
    pub tour: Tour,
    /// Best-so-far tour length per ant-colony iteration.
    pub history: Vec<f64>,
    /// Existing stops supplied by the caller, passed through untouched.
    pub existing_stops: Vec<GeoPoint>,
}

impl PlanResult {
    pub fn stops(&self) -> &[GeoPoint] {
        &self.clusters.centers
    }
}

pub fn plan(
    houses: &[GeoPoint],
    bandwidths: &[f64],
    template: &MeanShiftConfig,
    aco: &AcoParams,
    existing_stops: Vec<GeoPoint>,
) -> Result<PlanResult> {
    aco.validate()?;
    let (sweep, clusters) = sweep_with_clusters(houses, bandwidths, template)?;
    let idx = sweep
        .rows
        .iter()
        .position(|r| r.bandwidth == sweep.chosen_bandwidth)
        .expect("chosen bandwidth is one of the rows");
    let clusters = clusters
        .into_iter()
        .nth(idx)
        .expect("one clustering per row");
    if clusters.len() < 3 {
        return Err(Error::TooFewStops(clusters.len()));
    }
    let outcome = aco_solve(&clusters.centers, aco)?;
    Ok(PlanResult {
        sweep,
        clusters,
        tour: outcome.best,
        history: outcome.history,
        existing_stops,
    })
}
