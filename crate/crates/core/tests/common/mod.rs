#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stopplan::geo::LocalFrame;
use stopplan::{GeoPoint, PlanarPoint};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn load_fixture(name: &str) -> Vec<GeoPoint> {
    stopplan::io::load_houses(fixture(name)).unwrap().houses
}

pub fn frame() -> LocalFrame {
    LocalFrame::new(GeoPoint::new(-6.17, 106.76).unwrap())
}

pub fn at(x: f64, y: f64) -> GeoPoint {
    frame().unproject(PlanarPoint::new(x, y)).unwrap()
}

/// Uniform points in a square of half-side `half` meters around the city origin.
pub fn random_points(rng: &mut ChaCha8Rng, n: usize, half: f64) -> Vec<GeoPoint> {
    (0..n)
        .map(|_| at(rng.random_range(-half..half), rng.random_range(-half..half)))
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
