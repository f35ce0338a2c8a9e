mod common;

use common::{at, frame, load_fixture, rng};
use rand::Rng;
use stopplan::clustering::{mean_shift, shift_once, MeanShift, MeanShiftConfig};
use stopplan::fixtures::{two_blobs, FIXTURE_SEED};
use stopplan::{haversine_distance, GeoPoint, PlanarPoint};

fn planar_centroid(points: &[GeoPoint]) -> PlanarPoint {
    let f = frame();
    let pts: Vec<PlanarPoint> = points.iter().map(|&p| f.project(p).unwrap()).collect();
    let n = pts.len() as f64;
    PlanarPoint::new(
        pts.iter().map(|p| p.x).sum::<f64>() / n,
        pts.iter().map(|p| p.y).sum::<f64>() / n,
    )
}

#[test]
fn two_blobs_give_two_centers_near_their_centroids() {
    let houses = two_blobs(FIXTURE_SEED);
    let res = mean_shift(&houses, &MeanShiftConfig::new(350.0)).unwrap();
    assert_eq!(res.centers.len(), 2);

    let f = frame();
    for blob in houses.chunks(50) {
        let c = planar_centroid(blob);
        let nearest = res
            .centers
            .iter()
            .map(|&m| f.project(m).unwrap().distance(&c))
            .fold(f64::INFINITY, f64::min);
        assert!(nearest < 10.0, "center {nearest} m from blob centroid");
    }
}

#[test]
fn shipped_two_blob_fixture_matches_generator() {
    assert_eq!(load_fixture("two_blobs.csv"), two_blobs(FIXTURE_SEED));
}

#[test]
fn disc_inside_one_kernel_gives_one_center() {
    let mut r = rng(11);
    let houses: Vec<GeoPoint> = (0..100)
        .map(|_| {
            let rad = 100.0 * r.random::<f64>().sqrt();
            let t = r.random_range(0.0..std::f64::consts::TAU);
            at(300.0 + rad * t.cos(), -200.0 + rad * t.sin())
        })
        .collect();
    let res = mean_shift(&houses, &MeanShiftConfig::new(500.0)).unwrap();
    assert_eq!(res.centers.len(), 1);
    let c = frame().project(res.centers[0]).unwrap();
    assert!(c.distance(&planar_centroid(&houses)) < 15.0);
}

#[test]
fn mode_count_grows_as_bandwidth_shrinks_on_two_blobs() {
    let houses = load_fixture("two_blobs.csv");
    let small = mean_shift(&houses, &MeanShiftConfig::new(250.0)).unwrap();
    let large = mean_shift(&houses, &MeanShiftConfig::new(500.0)).unwrap();
    assert!(small.centers.len() >= large.centers.len());
}

#[test]
fn deterministic() {
    let houses = load_fixture("nineteen_neighbourhoods.csv");
    let cfg = MeanShiftConfig::new(300.0);
    assert_eq!(
        mean_shift(&houses, &cfg).unwrap(),
        mean_shift(&houses, &cfg).unwrap()
    );
}

#[test]
fn result_invariants_on_nineteen_neighbourhoods() {
    let houses = load_fixture("nineteen_neighbourhoods.csv");
    let cfg = MeanShiftConfig::new(350.0);
    let res = mean_shift(&houses, &cfg).unwrap();
    assert_eq!(res.centers.len(), 19);

    let f = stopplan::geo::LocalFrame::new(res.origin);
    let planar: Vec<PlanarPoint> = res.centers.iter().map(|&c| f.project(c).unwrap()).collect();
    for i in 0..planar.len() {
        for j in 0..i {
            assert!(planar[i].distance(&planar[j]) >= cfg.merge_radius - 1e-6);
        }
    }

    // nearest-center assignment, checked by brute force
    for (h, &a) in houses.iter().zip(&res.assignment) {
        let d: Vec<f64> = res
            .centers
            .iter()
            .map(|&c| haversine_distance(*h, c))
            .collect();
        let best = d.iter().copied().fold(f64::INFINITY, f64::min);
        let first = d.iter().position(|&x| x == best).unwrap();
        assert_eq!(a, first);
    }

    // converged centers are fixed points of one more shift
    let ms = MeanShift::new(&houses, &cfg).unwrap();
    for c in &planar {
        let next = shift_once(*c, ms.points(), &cfg).unwrap();
        assert!(next.distance(c) < cfg.convergence_eps);
    }
}

#[test]
fn shadow_density_ascends_along_trajectories() {
    let houses = load_fixture("nineteen_neighbourhoods.csv");
    let cfg = MeanShiftConfig::new(500.0);
    let ms = MeanShift::new(&houses, &cfg).unwrap();
    for &seed in ms.points().iter().step_by(5) {
        let t = ms.trajectory(seed).unwrap();
        assert!(t.converged);
        for w in t.points.windows(2) {
            let (a, b) = (ms.shadow_density(w[0]), ms.shadow_density(w[1]));
            assert!(b >= a * (1.0 - 1e-9), "density fell from {a} to {b}");
        }
    }
}

#[test]
fn rejects_wide_workspace() {
    let houses = [
        GeoPoint::new(-6.0, 106.0).unwrap(),
        GeoPoint::new(-6.0, 108.5).unwrap(),
    ];
    let err = mean_shift(&houses, &MeanShiftConfig::new(350.0)).unwrap_err();
    assert!(matches!(err, stopplan::Error::WorkspaceTooLarge { .. }));
}
