//! Deterministic synthetic house layouts used by tests, examples and the
//! shipped fixture files.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::geo::{GeoPoint, LocalFrame, PlanarPoint};

/// Center of the synthetic neighbourhoods (West Jakarta).
pub const CITY_ORIGIN: (f64, f64) = (-6.17, 106.76);

/// Seed of the shipped fixture files.
pub const FIXTURE_SEED: u64 = 2017;

fn frame() -> LocalFrame {
    LocalFrame::new(GeoPoint::new(CITY_ORIGIN.0, CITY_ORIGIN.1).expect("valid origin"))
}

fn to_geo(frame: &LocalFrame, pts: impl IntoIterator<Item = PlanarPoint>) -> Vec<GeoPoint> {
    pts.into_iter()
        .map(|p| {
            frame
                .unproject(p)
                .expect("fixture stays inside the workspace")
        })
        .collect()
}

/// Rounds to 7 decimal places (about 1 cm), the precision of the shipped CSVs.
fn quantize(points: Vec<GeoPoint>) -> Vec<GeoPoint> {
    let q = |v: f64| (v * 1e7).round() / 1e7;
    points
        .into_iter()
        .map(|p| GeoPoint::new(q(p.lat()), q(p.lon())).expect("rounding keeps range"))
        .collect()
}

fn blob(rng: &mut ChaCha8Rng, center: PlanarPoint, sigma: f64, n: usize) -> Vec<PlanarPoint> {
    let normal = Normal::new(0.0, sigma).expect("positive sigma");
    (0..n)
        .map(|_| PlanarPoint::new(center.x + normal.sample(rng), center.y + normal.sample(rng)))
        .collect()
}

/// 7,962 houses over a 6 km x 6 km area: 20 Gaussian neighbourhoods of
/// varying size and spread on a jittered grid, plus sparse scattered houses.
pub fn synthetic_city(seed: u64) -> Vec<GeoPoint> {
    const TOTAL: usize = 7962;
    const SCATTER: usize = 60;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut centers = Vec::with_capacity(20);
    for row in 0..4 {
        for col in 0..5 {
            let x = -2400.0 + col as f64 * 1200.0 + rng.random_range(-250.0..250.0);
            let y = -2250.0 + row as f64 * 1500.0 + rng.random_range(-250.0..250.0);
            centers.push(PlanarPoint::new(x, y));
        }
    }
    let sizes: Vec<f64> = centers.iter().map(|_| rng.random_range(0.5..1.5)).collect();
    let total_size: f64 = sizes.iter().sum();

    let clustered = TOTAL - SCATTER;
    let mut counts: Vec<usize> = sizes
        .iter()
        .map(|s| (s / total_size * clustered as f64).floor() as usize)
        .collect();
    let shortfall = clustered - counts.iter().sum::<usize>();
    for c in counts.iter_mut().take(shortfall) {
        *c += 1;
    }

    let mut pts = Vec::with_capacity(TOTAL);
    for (c, &n) in centers.iter().zip(&counts) {
        let sigma = rng.random_range(60.0..150.0);
        pts.extend(blob(&mut rng, *c, sigma, n));
    }
    for _ in 0..SCATTER {
        pts.push(PlanarPoint::new(
            rng.random_range(-3000.0..3000.0),
            rng.random_range(-3000.0..3000.0),
        ));
    }
    quantize(to_geo(&frame(), pts))
}

/// Two tight blobs of 50 houses (sigma 30 m) whose centers are 2,000 m apart.
pub fn two_blobs(seed: u64) -> Vec<GeoPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = blob(&mut rng, PlanarPoint::new(-1000.0, 0.0), 30.0, 50);
    pts.extend(blob(&mut rng, PlanarPoint::new(1000.0, 0.0), 30.0, 50));
    quantize(to_geo(&frame(), pts))
}

/// 19 compact neighbourhoods of 40 houses (sigma 40 m) on a 5 x 4 lattice with
/// one site left empty, spaced 1.8 km apart.
pub fn nineteen_neighbourhoods(seed: u64) -> Vec<GeoPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::new();
    for row in 0..4 {
        for col in 0..5 {
            if (row, col) == (3, 4) {
                continue;
            }
            let c = PlanarPoint::new(-3600.0 + col as f64 * 1800.0, -2700.0 + row as f64 * 1800.0);
            pts.extend(blob(&mut rng, c, 40.0, 40));
        }
    }
    quantize(to_geo(&frame(), pts))
}
