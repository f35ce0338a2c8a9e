//! Closed-tour routing over bus stops with an ant colony (ant-cycle model),
//! plus an exhaustive solver for small instances.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geo::{haversine_distance, GeoPoint};

/// Largest instance [`brute_force_tsp`] accepts.
pub const BRUTE_FORCE_MAX_STOPS: usize = 11;

/// Pheromone entries never drop below this after an update.
pub const TAU_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct AcoParams {
    /// Pheromone exponent.
    pub alpha: f64,
    /// Visibility exponent.
    pub beta: f64,
    /// Evaporation rate, strictly between 0 and 1.
    pub rho: f64,
    pub n_ants: usize,
    pub n_iterations: usize,
    pub deposit_q: f64,
    pub initial_tau: f64,
    pub seed: u64,
}

impl Default for AcoParams {
    fn default() -> Self {
        Self {
            alpha: 4.0,
            beta: 1.0,
            rho: 0.15,
            n_ants: 30,
            n_iterations: 500,
            deposit_q: 1.0,
            initial_tau: 1.0,
            seed: 0,
        }
    }
}

impl AcoParams {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be >= 0, got {}", self.alpha));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be >= 0, got {}", self.beta));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad(format!("rho must lie in (0, 1), got {}", self.rho));
        }
        if self.n_ants < 1 {
            return bad("ants must be >= 1".into());
        }
        if self.n_iterations < 1 {
            return bad("iterations must be >= 1".into());
        }
        if !(self.deposit_q > 0.0 && self.deposit_q.is_finite()) {
            return bad(format!("deposit_q must be > 0, got {}", self.deposit_q));
        }
        if !(self.initial_tau > 0.0 && self.initial_tau.is_finite()) {
            return bad(format!("initial_tau must be > 0, got {}", self.initial_tau));
        }
        Ok(())
    }
}

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn filled(n: usize, value: f64) -> Self {
        Self {
            n,
            data: vec![value; n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let data = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// Pairwise great-circle distances in meters.
pub fn distance_matrix(stops: &[GeoPoint]) -> Matrix {
    let mut m = Matrix::filled(stops.len(), 0.0);
    for i in 0..stops.len() {
        for j in 0..i {
            let d = haversine_distance(stops[i], stops[j]);
            m.set(i, j, d);
            m.set(j, i, d);
        }
    }
    m
}

/// Symmetric trail intensities; the diagonal is unused.
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneMatrix(pub Matrix);

impl PheromoneMatrix {
    pub fn uniform(n: usize, tau: f64) -> Self {
        Self(Matrix::filled(n, tau))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn size(&self) -> usize {
        self.0.size()
    }
}

/// A closed cycle over all stops.
#[derive(Debug, Clone, PartialEq)]
pub struct Tour {
    pub order: Vec<usize>,
    /// Closed-cycle length in meters.
    pub length: f64,
}

impl Tour {
    pub fn new(order: Vec<usize>, dist: &Matrix) -> Self {
        let length = tour_length(&order, dist);
        Self { order, length }
    }

    pub fn is_permutation_of(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        self.order.len() == n
            && self
                .order
                .iter()
                .all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
    }

    /// Undirected edges of the cycle as `(min, max)` pairs.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.order.len();
        (0..n).map(move |k| {
            let (a, b) = (self.order[k], self.order[(k + 1) % n]);
            (a.min(b), a.max(b))
        })
    }
}

/// Sum of consecutive legs including the closing leg back to the start.
pub fn tour_length(order: &[usize], dist: &Matrix) -> f64 {
    let n = order.len();
    if n < 2 {
        return 0.0;
    }
    (0..n).map(|k| dist.get(order[k], order[(k + 1) % n])).sum()
}

/// Next-stop probabilities `tau^alpha * eta^beta / sum(...)` with `eta = 1/d`,
/// one entry per element of `unvisited`.
pub fn transition_probabilities(
    current: usize,
    unvisited: &[usize],
    tau: &PheromoneMatrix,
    dist: &Matrix,
    alpha: f64,
    beta: f64,
) -> Result<Vec<f64>> {
    assert!(!unvisited.is_empty(), "no candidate stops");
    // log domain keeps tau^4 of floored trails representable
    let mut logw = Vec::with_capacity(unvisited.len());
    for &j in unvisited {
        let d = dist.get(current, j);
        if !(d > 0.0) {
            return Err(Error::DegenerateDistance {
                from: current,
                to: j,
            });
        }
        let t = if alpha == 0.0 {
            0.0
        } else {
            alpha * tau.get(current, j).ln()
        };
        let e = if beta == 0.0 { 0.0 } else { -beta * d.ln() };
        logw.push(t + e);
    }
    let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / total).collect())
}

/// `(1 - rho) * tau + rho * deposits`, element-wise, floored at [`TAU_FLOOR`].
pub fn update_pheromone(tau: &PheromoneMatrix, rho: f64, deposits: &Matrix) -> PheromoneMatrix {
    assert_eq!(tau.size(), deposits.size(), "shape mismatch");
    let n = tau.size();
    PheromoneMatrix(Matrix::from_fn(n, |i, j| {
        ((1.0 - rho) * tau.get(i, j) + rho * deposits.get(i, j)).max(TAU_FLOOR)
    }))
}

/// One ant walk starting at `start`, sampling each step from
/// [`transition_probabilities`].
pub fn construct_tour<R: Rng + ?Sized>(
    rng: &mut R,
    start: usize,
    tau: &PheromoneMatrix,
    dist: &Matrix,
    alpha: f64,
    beta: f64,
) -> Result<Tour> {
    let n = dist.size();
    assert!(start < n, "start stop out of range");
    let mut order = Vec::with_capacity(n);
    order.push(start);
    let mut unvisited: Vec<usize> = (0..n).filter(|&i| i != start).collect();
    let mut current = start;
    while !unvisited.is_empty() {
        let k = if unvisited.len() == 1 {
            0
        } else {
            let probs = transition_probabilities(current, &unvisited, tau, dist, alpha, beta)?;
            WeightedIndex::new(&probs)
                .expect("probabilities are finite and sum to one")
                .sample(rng)
        };
        current = unvisited.remove(k);
        order.push(current);
    }
    if n >= 2 && !(dist.get(current, start) > 0.0) {
        return Err(Error::DegenerateDistance {
            from: current,
            to: start,
        });
    }
    Ok(Tour::new(order, dist))
}

fn check_stops(stops: &[GeoPoint]) -> Result<Matrix> {
    if stops.len() < 3 {
        return Err(Error::TooFewStops(stops.len()));
    }
    let dist = distance_matrix(stops);
    for i in 0..stops.len() {
        for j in 0..i {
            if !(dist.get(i, j) > 0.0) {
                return Err(Error::DuplicateStops(j, i));
            }
        }
    }
    Ok(dist)
}

/// Generator for one ant in one iteration; independent of thread scheduling.
fn ant_rng(seed: u64, iteration: usize, ant: usize, n_ants: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((iteration * n_ants + ant) as u64);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcoOutcome {
    pub best: Tour,
    /// Best-so-far length after each iteration.
    pub history: Vec<f64>,
}

/// Ant colony search for a short closed tour. Deterministic for a fixed `params.seed`.
pub fn aco_solve(stops: &[GeoPoint], params: &AcoParams) -> Result<AcoOutcome> {
    params.validate()?;
    let dist = check_stops(stops)?;
    let n = stops.len();
    let mut tau = PheromoneMatrix::uniform(n, params.initial_tau);
    let mut best: Option<Tour> = None;
    let mut history = Vec::with_capacity(params.n_iterations);

    for it in 0..params.n_iterations {
        let tours: Vec<Tour> = (0..params.n_ants)
            .into_par_iter()
            .map(|ant| {
                let mut rng = ant_rng(params.seed, it, ant, params.n_ants);
                let start = rng.random_range(0..n);
                construct_tour(&mut rng, start, &tau, &dist, params.alpha, params.beta)
            })
            .collect::<Result<_>>()?;

        let mut deposits = Matrix::filled(n, 0.0);
        for tour in &tours {
            let amount = params.deposit_q / tour.length;
            for (a, b) in tour.edges() {
                let v = deposits.get(a, b) + amount;
                deposits.set(a, b, v);
                deposits.set(b, a, v);
            }
            if best.as_ref().is_none_or(|b| tour.length < b.length) {
                best = Some(tour.clone());
            }
        }
        tau = update_pheromone(&tau, params.rho, &deposits);
        history.push(best.as_ref().map(|b| b.length).expect("at least one ant"));
    }

    Ok(AcoOutcome {
        best: best.expect("at least one iteration"),
        history,
    })
}

/// Exact minimum tour by enumerating every undirected cycle through stop 0.
/// Among equal lengths the lexicographically smallest order wins.
pub fn brute_force_tsp(stops: &[GeoPoint]) -> Result<Tour> {
    let n = stops.len();
    if n > BRUTE_FORCE_MAX_STOPS {
        return Err(Error::InstanceTooLarge(n));
    }
    let dist = check_stops(stops)?;
    let mut rest: Vec<usize> = (1..n).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        // each undirected cycle once: skip the mirrored orientation
        if rest[0] < rest[rest.len() - 1] {
            let mut len = dist.get(0, rest[0]) + dist.get(rest[rest.len() - 1], 0);
            for w in rest.windows(2) {
                len += dist.get(w[0], w[1]);
            }
            if best.as_ref().is_none_or(|(b, _)| len < *b) {
                best = Some((len, rest.clone()));
            }
        }
        if !next_permutation(&mut rest) {
            break;
        }
    }
    let (_, rest) = best.expect("n >= 3 yields at least one cycle");
    let mut order = Vec::with_capacity(n);
    order.push(0);
    order.extend(rest);
    Ok(Tour::new(order, &dist))
}

/// Advances to the next lexicographic permutation; false once the last is reached.
fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v
        .iter()
        .rposition(|&x| x > v[i])
        .expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}
