//! Service-radius error analysis for a set of houses against a set of stops.

use crate::error::{Error, Result};
use crate::geo::{haversine_distance, GeoPoint};

/// One row of the bandwidth summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    /// Service radius / bandwidth in meters.
    pub bandwidth: f64,
    pub total_houses: usize,
    pub error_count: usize,
    /// Percent of houses outside the radius, rounded to 2 decimals.
    pub error_percentage: f64,
    /// Excess distance beyond the radius, km rounded to 2 decimals.
    /// `None` when no house misses the radius.
    pub max_error: Option<f64>,
    pub min_error: Option<f64>,
    pub median_error: Option<f64>,
    pub stops_spawned: usize,
}

/// Rounds half-up to two decimals (inputs here are non-negative).
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Index of and distance to each house's nearest center; ties go to the lowest index.
pub fn assign_nearest(houses: &[GeoPoint], centers: &[GeoPoint]) -> Result<Vec<(usize, f64)>> {
    if centers.is_empty() {
        return Err(Error::NoCenters);
    }
    Ok(houses
        .iter()
        .map(|&h| {
            let mut best = (0, haversine_distance(h, centers[0]));
            for (i, &c) in centers.iter().enumerate().skip(1) {
                let d = haversine_distance(h, c);
                if d < best.1 {
                    best = (i, d);
                }
            }
            best
        })
        .collect())
}

fn median(sorted: &[f64]) -> Option<f64> {
    let n = sorted.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(sorted[n / 2]),
        _ => Some((sorted[n / 2 - 1] + sorted[n / 2]) / 2.0),
    }
}

/// Houses whose nearest center lies farther than `radius`, with their excess in meters.
pub fn coverage_errors(
    houses: &[GeoPoint],
    centers: &[GeoPoint],
    radius: f64,
) -> Result<Vec<(usize, f64)>> {
    Ok(assign_nearest(houses, centers)?
        .into_iter()
        .enumerate()
        .filter(|(_, (_, d))| *d > radius)
        .map(|(house, (_, d))| (house, d - radius))
        .collect())
}

pub fn coverage_report(
    houses: &[GeoPoint],
    centers: &[GeoPoint],
    radius: f64,
) -> Result<CoverageReport> {
    if !(radius > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "radius must be > 0, got {radius}"
        )));
    }
    let mut excess: Vec<f64> = coverage_errors(houses, centers, radius)?
        .into_iter()
        .map(|(_, e)| e / 1000.0)
        .collect();
    excess.sort_by(f64::total_cmp);

    let error_count = excess.len();
    let error_percentage = if houses.is_empty() {
        0.0
    } else {
        round2(100.0 * error_count as f64 / houses.len() as f64)
    };
    Ok(CoverageReport {
        bandwidth: radius,
        total_houses: houses.len(),
        error_count,
        error_percentage,
        max_error: excess.last().copied().map(round2),
        min_error: excess.first().copied().map(round2),
        median_error: median(&excess).map(round2),
        stops_spawned: centers.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::{LocalFrame, PlanarPoint};

    fn frame() -> LocalFrame {
        LocalFrame::new(GeoPoint::new(-6.17, 106.76).unwrap())
    }

    fn at(x: f64, y: f64) -> GeoPoint {
        frame().unproject(PlanarPoint::new(x, y)).unwrap()
    }

    #[test]
    fn coincident_house() {
        let c = at(10.0, 20.0);
        assert_eq!(
            assign_nearest(&[c], &[at(900.0, 0.0), c]).unwrap(),
            vec![(1, 0.0)]
        );
    }

    #[test]
    fn nearer_of_two() {
        let h = at(0.0, 0.0);
        let out = assign_nearest(&[h], &[at(900.0, 0.0), at(0.0, 100.0)]).unwrap();
        assert_eq!(out[0].0, 1);
        assert!((out[0].1 - 100.0).abs() < 0.2);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let c = at(0.0, 0.0);
        assert_eq!(assign_nearest(&[at(5.0, 5.0)], &[c, c]).unwrap()[0].0, 0);
    }

    #[test]
    fn no_centers() {
        assert!(matches!(
            assign_nearest(&[at(0.0, 0.0)], &[]),
            Err(Error::NoCenters)
        ));
        assert!(matches!(
            coverage_report(&[at(0.0, 0.0)], &[], 350.0),
            Err(Error::NoCenters)
        ));
    }

    #[test]
    fn fully_covered() {
        let r = coverage_report(&[at(0.0, 0.0), at(100.0, 0.0)], &[at(50.0, 0.0)], 350.0).unwrap();
        assert_eq!(r.error_count, 0);
        assert_eq!(r.error_percentage, 0.0);
        assert_eq!(
            (r.max_error, r.min_error, r.median_error),
            (None, None, None)
        );
        assert_eq!(r.stops_spawned, 1);
    }

    #[test]
    fn excess_distances_and_median() {
        // nearest distances 360, 380 and 440 m measured along a meridian
        let c = GeoPoint::new(-6.17, 106.76).unwrap();
        let deg_per_m = 1.0 / (crate::geo::EARTH_RADIUS_M.to_radians());
        let houses: Vec<GeoPoint> = [360.0, 380.0, 440.0]
            .iter()
            .map(|d| GeoPoint::new(c.lat() + d * deg_per_m, c.lon()).unwrap())
            .collect();
        let r = coverage_report(&houses, &[c], 350.0).unwrap();
        assert_eq!(r.error_count, 3);
        assert_eq!(r.error_percentage, 100.0);
        assert_eq!(r.min_error, Some(0.01));
        assert_eq!(r.median_error, Some(0.03));
        assert_eq!(r.max_error, Some(0.09));
    }

    #[test]
    fn even_count_median_is_mean_of_middles() {
        assert_eq!(median(&[1.0, 2.0, 4.0, 10.0]), Some(3.0));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn percentage_arithmetic() {
        // 594 of 7962 houses: the arithmetic value, 7.46
        assert_eq!(round2(100.0 * 594.0 / 7962.0), 7.46);
        assert_eq!(round2(0.125), 0.13);
    }
}
