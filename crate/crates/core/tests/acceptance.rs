//! Acceptance gate. Prints one PASS/FAIL line per criterion; exits non-zero
//! if any criterion fails.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use common::{fixture, load_fixture, random_points, rng};
use rand::seq::index::sample;
use rand::Rng;
use stopplan::clustering::{mean_shift, shift_once, MeanShift, MeanShiftConfig};
use stopplan::coverage::{coverage_errors, coverage_report};
use stopplan::geo::{project_local, unproject_local, EARTH_RADIUS_M};
use stopplan::io::{parse_table_csv, sweep_csv, TABLE_HEADER};
use stopplan::pipeline::{sweep_with_clusters, DEFAULT_BANDWIDTHS};
use stopplan::routing::{
    aco_solve, brute_force_tsp, transition_probabilities, update_pheromone, AcoParams, Matrix,
    PheromoneMatrix,
};
use stopplan::{haversine_distance, GeoPoint};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(cond: bool, ok: String, fail: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(fail)
    }
}

/// Mean-shift fixed points and density ascent at h = 350 m, under 60 s.
fn fixed_points_and_ascent() -> Outcome {
    let houses = load_fixture("synthetic_city.csv");
    let cfg = MeanShiftConfig::new(350.0);
    let t = Instant::now();
    let res = mean_shift(&houses, &cfg).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();

    let ms = MeanShift::new(&houses, &cfg).map_err(|e| e.to_string())?;
    let mut worst_step: f64 = 0.0;
    for &c in &res.centers {
        let p = ms.frame().project(c).map_err(|e| e.to_string())?;
        let next = shift_once(p, ms.points(), &cfg).map_err(|e| e.to_string())?;
        worst_step = worst_step.max(next.distance(&p));
    }
    let (mut steps, mut drops, mut unconverged) = (0usize, 0usize, 0usize);
    for &seed in ms.points() {
        let traj = ms.trajectory(seed).map_err(|e| e.to_string())?;
        unconverged += usize::from(!traj.converged);
        for w in traj.points.windows(2) {
            steps += 1;
            let (a, b) = (ms.shadow_density(w[0]), ms.shadow_density(w[1]));
            if b < a * (1.0 - 1e-9) {
                drops += 1;
            }
        }
    }
    let summary = format!(
        "{} centers, max fixed-point step {worst_step:.2e} m, {drops} density drops in {steps} steps, {unconverged} unconverged seeds, {:.1}s",
        res.centers.len(),
        elapsed.as_secs_f64()
    );
    check(
        worst_step < 0.01 && drops == 0 && elapsed < Duration::from_secs(60),
        summary.clone(),
        summary,
    )
}

/// Coverage error sets match a brute-force filter on 1,000-house subsets.
fn coverage_oracle(sweep: &(stopplan::SweepReport, Vec<stopplan::ClusterResult>)) -> Outcome {
    let houses = load_fixture("synthetic_city.csv");
    let mut r = rng(2024);
    let mut compared = 0;
    for clusters in &sweep.1 {
        let radius = clusters.bandwidth;
        for _ in 0..5 {
            let subset: Vec<GeoPoint> = sample(&mut r, houses.len(), 1000)
                .iter()
                .map(|i| houses[i])
                .collect();
            let oracle: Vec<(usize, f64)> = subset
                .iter()
                .enumerate()
                .filter_map(|(i, &h)| {
                    let d = clusters
                        .centers
                        .iter()
                        .map(|&c| haversine_distance(h, c))
                        .fold(f64::INFINITY, f64::min);
                    (d > radius).then_some((i, d - radius))
                })
                .collect();
            let got =
                coverage_errors(&subset, &clusters.centers, radius).map_err(|e| e.to_string())?;
            let report =
                coverage_report(&subset, &clusters.centers, radius).map_err(|e| e.to_string())?;
            if got != oracle || report.error_count != oracle.len() {
                return Err(format!(
                    "mismatch at {radius} m: {} vs {} errors",
                    got.len(),
                    oracle.len()
                ));
            }
            compared += 1;
        }
    }
    Ok(format!(
        "{compared} subsets over {} bandwidths identical",
        sweep.1.len()
    ))
}

/// Stop counts grow from 500 m to 250 m; the CSV has six rows in table order.
fn table_pattern(sweep: &(stopplan::SweepReport, Vec<stopplan::ClusterResult>)) -> Outcome {
    let report = &sweep.0;
    let stops = |bw: f64| {
        report
            .rows
            .iter()
            .find(|r| r.bandwidth == bw)
            .map(|r| r.stops_spawned)
    };
    let (s250, s500) = (
        stops(250.0).unwrap_or(0),
        stops(500.0).unwrap_or(usize::MAX),
    );
    let text = sweep_csv(report);
    let header_ok = text.lines().next() == Some(TABLE_HEADER.join(",").as_str());
    let rows = parse_table_csv(&text).map_err(|e| e.to_string())?;
    let order_ok = rows.iter().map(|r| r.bandwidth).eq(DEFAULT_BANDWIDTHS);
    let counts: Vec<usize> = report.rows.iter().map(|r| r.stops_spawned).collect();
    let summary = format!(
        "stops per bandwidth {counts:?}; chosen {} m; header ok {header_ok}; rows {}",
        report.chosen_bandwidth,
        rows.len()
    );
    check(
        s250 > s500 && header_ok && order_ok && rows.len() == 6,
        summary.clone(),
        summary,
    )
}

/// Transition probabilities form a distribution and ignore trail scale.
fn transition_distribution() -> Outcome {
    let mut r = rng(404);
    let (mut worst_sum, mut worst_scale): (f64, f64) = (0.0, 0.0);
    for _ in 0..10_000 {
        let n = r.random_range(3..12);
        let taus: Vec<f64> = (0..n * n)
            .map(|_| 10f64.powf(r.random_range(-6.0..1.0)))
            .collect();
        let dists: Vec<f64> = (0..n * n).map(|_| r.random_range(1.0..10_000.0)).collect();
        let tau = Matrix::from_fn(n, |i, j| taus[i.min(j) * n + i.max(j)]);
        let dist = Matrix::from_fn(n, |i, j| dists[i.min(j) * n + i.max(j)]);
        let (alpha, beta) = (r.random_range(0.0..6.0), r.random_range(0.0..6.0));
        let scale = 10f64.powf(r.random_range(-3.0..3.0));
        let cur = r.random_range(0..n);
        let unvisited: Vec<usize> = (0..n).filter(|&i| i != cur && r.random_bool(0.7)).collect();
        if unvisited.is_empty() {
            continue;
        }
        let p = transition_probabilities(
            cur,
            &unvisited,
            &PheromoneMatrix(tau.clone()),
            &dist,
            alpha,
            beta,
        )
        .map_err(|e| e.to_string())?;
        if p.iter().any(|&x| x < 0.0) {
            return Err("negative probability".into());
        }
        worst_sum = worst_sum.max((p.iter().sum::<f64>() - 1.0).abs());
        let scaled = PheromoneMatrix(Matrix::from_fn(n, |i, j| tau.get(i, j) * scale));
        let q = transition_probabilities(cur, &unvisited, &scaled, &dist, alpha, beta)
            .map_err(|e| e.to_string())?;
        for (a, b) in p.iter().zip(&q) {
            worst_scale = worst_scale.max((a - b).abs());
        }
    }

    let mut tau = Matrix::filled(3, 1.0);
    tau.set(0, 1, 2.0);
    tau.set(1, 0, 2.0);
    let mut d = Matrix::filled(3, 0.0);
    for (i, j, v) in [(0, 1, 100.0), (0, 2, 200.0), (1, 2, 150.0)] {
        d.set(i, j, v);
        d.set(j, i, v);
    }
    let p = transition_probabilities(0, &[1, 2], &PheromoneMatrix(tau), &d, 1.0, 1.0)
        .map_err(|e| e.to_string())?;
    let worked = (p[0] - 0.8).abs() < 1e-12 && (p[1] - 0.2).abs() < 1e-12;
    let summary = format!(
        "max |sum-1| {worst_sum:.1e}, max rescale delta {worst_scale:.1e}, worked example {p:?}"
    );
    check(
        worst_sum < 1e-12 && worst_scale < 1e-12 && worked,
        summary.clone(),
        summary,
    )
}

/// Evaporation arithmetic.
fn evaporation() -> Outcome {
    let ones = PheromoneMatrix::uniform(3, 1.0);
    let zero = Matrix::filled(3, 0.0);
    let once = update_pheromone(&ones, 0.15, &zero);
    let exact = once.get(0, 1) == 0.85;

    let mut worst: f64 = 0.0;
    let mut tau = ones.clone();
    for k in 1..=60 {
        tau = update_pheromone(&tau, 0.15, &zero);
        worst = worst.max((tau.get(1, 2) - 0.85f64.powi(k)).abs());
    }
    let fixed = update_pheromone(&ones, 0.15, &Matrix::filled(3, 1.0)) == ones;
    let summary = format!(
        "one step {}, k-fold max error {worst:.1e}, fixed point kept {fixed}",
        once.get(0, 1)
    );
    check(exact && worst <= 1e-12 && fixed, summary.clone(), summary)
}

/// Ant colony at defaults against the exact optimum on 9-stop instances.
fn aco_vs_oracle() -> Outcome {
    let mut r = rng(900);
    let (mut runs, mut within, mut monotone) = (0, 0, 0);
    let mut slowest = Duration::ZERO;
    let mut worst_gap: f64 = 0.0;
    for _ in 0..20 {
        let stops = random_points(&mut r, 9, 3000.0);
        let exact = brute_force_tsp(&stops).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let params = AcoParams::with_seed(r.random());
            let t = Instant::now();
            let out = aco_solve(&stops, &params).map_err(|e| e.to_string())?;
            slowest = slowest.max(t.elapsed());
            runs += 1;
            let gap = out.best.length / exact.length - 1.0;
            worst_gap = worst_gap.max(gap);
            within += usize::from(gap <= 0.02);
            monotone += usize::from(out.history.windows(2).all(|w| w[1] <= w[0]));
        }
    }
    let summary = format!(
        "{within}/{runs} within 2%, {monotone}/{runs} monotone histories, worst gap {:.3}%, slowest run {:.2}s",
        worst_gap * 100.0,
        slowest.as_secs_f64()
    );
    check(
        within * 100 >= 95 * runs && monotone == runs && slowest < Duration::from_secs(5),
        summary.clone(),
        summary,
    )
}

/// `plan --seed 42` twice gives byte-identical CSV and GeoJSON.
fn plan_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let houses = fixture("synthetic_city.csv");
    let run = |tag: &str| -> Result<(Vec<u8>, Vec<u8>), String> {
        let csv = dir.path().join(format!("{tag}.csv"));
        let gj = dir.path().join(format!("{tag}.geojson"));
        let out = Command::new(env!("CARGO_BIN_EXE_stopplan"))
            .args(["plan", "--seed", "42", "--houses"])
            .arg(&houses)
            .arg("--report")
            .arg(&csv)
            .arg("--geojson")
            .arg(&gj)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(String::from_utf8_lossy(&out.stderr).into_owned());
        }
        Ok((
            std::fs::read(&csv).map_err(|e| e.to_string())?,
            std::fs::read(&gj).map_err(|e| e.to_string())?,
        ))
    };
    let (a, b) = (run("a")?, run("b")?);
    let summary = format!("csv {} bytes, geojson {} bytes", a.0.len(), a.1.len());
    check(
        a == b,
        format!("{summary}, identical"),
        format!("{summary}, outputs differ"),
    )
}

/// Haversine against the spherical law of cosines; projection round trip.
fn geodesy() -> Outcome {
    let mut r = rng(8);
    let mut worst_d: f64 = 0.0;
    for _ in 0..10_000 {
        let a =
            GeoPoint::new(r.random_range(-6.30..-6.05), r.random_range(106.65..106.90)).unwrap();
        let b =
            GeoPoint::new(r.random_range(-6.30..-6.05), r.random_range(106.65..106.90)).unwrap();
        let (p1, p2) = (a.lat().to_radians(), b.lat().to_radians());
        let cos_c =
            p1.sin() * p2.sin() + p1.cos() * p2.cos() * (b.lon() - a.lon()).to_radians().cos();
        let oracle = EARTH_RADIUS_M * cos_c.clamp(-1.0, 1.0).acos();
        worst_d = worst_d.max((haversine_distance(a, b) - oracle).abs());
    }
    let origin = GeoPoint::new(-6.17, 106.76).unwrap();
    let mut worst_deg: f64 = 0.0;
    for _ in 0..1_000 {
        let p = GeoPoint::new(
            origin.lat() + r.random_range(-0.99..0.99),
            origin.lon() + r.random_range(-0.99..0.99),
        )
        .unwrap();
        let back = unproject_local(origin, project_local(origin, p).unwrap()).unwrap();
        worst_deg = worst_deg
            .max((back.lat() - p.lat()).abs())
            .max((back.lon() - p.lon()).abs());
    }
    let summary =
        format!("max distance delta {worst_d:.3} m, max round-trip error {worst_deg:.1e} deg");
    check(worst_d < 1.0 && worst_deg < 1e-9, summary.clone(), summary)
}

fn main() {
    let houses = load_fixture("synthetic_city.csv");
    let sweep = sweep_with_clusters(&houses, &DEFAULT_BANDWIDTHS, &MeanShiftConfig::new(1.0))
        .expect("sweep over the shipped fixture");

    let criteria: Vec<Criterion> = vec![
        (
            "AC1 mean-shift fixed points and density ascent",
            Box::new(fixed_points_and_ascent),
        ),
        (
            "AC2 coverage equals brute-force filter",
            Box::new(|| coverage_oracle(&sweep)),
        ),
        (
            "AC3 bandwidth table pattern and CSV layout",
            Box::new(|| table_pattern(&sweep)),
        ),
        (
            "AC4 transition probabilities",
            Box::new(transition_distribution),
        ),
        (
            "AC5 pheromone evaporation arithmetic",
            Box::new(evaporation),
        ),
        ("AC6 ant colony vs exact optimum", Box::new(aco_vs_oracle)),
        (
            "AC7 end-to-end plan determinism",
            Box::new(plan_determinism),
        ),
        ("AC8 geodesy", Box::new(geodesy)),
    ];

    let mut failed = 0;
    for (name, run) in &criteria {
        match run() {
            Ok(msg) => println!("[PASS] {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] {name}: {msg}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
