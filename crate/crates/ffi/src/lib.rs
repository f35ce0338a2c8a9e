//! C ABI over the `stopplan` library.
//!
//! Every fallible function returns an [`SpStatus`]; on failure a description
//! is available from [`sp_last_error_message`] on the same thread. Handles
//! (`SpPoints`, `SpClusters`, `SpTour`) are opaque, owned by the caller, and
//! released with their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stopplan::clustering::{mean_shift, ClusterResult, MeanShiftConfig};
use stopplan::routing::{aco_solve, brute_force_tsp, AcoParams, Tour};
use stopplan::{coverage_report, haversine_distance, Error, GeoPoint};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidCoordinate = 3,
    WorkspaceTooLarge = 4,
    EmptyInput = 5,
    NoCenters = 6,
    TooFewStops = 7,
    DuplicateStops = 8,
    InstanceTooLarge = 9,
    FileNotFound = 10,
    Parse = 11,
    Io = 12,
    BufferTooSmall = 13,
    IndexOutOfRange = 14,
    Panic = 15,
}

impl From<&Error> for SpStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidCoordinate(_) => SpStatus::InvalidCoordinate,
            Error::WorkspaceTooLarge { .. } => SpStatus::WorkspaceTooLarge,
            Error::InvalidConfig(_) => SpStatus::InvalidArgument,
            Error::IsolatedSeed | Error::EmptyInput | Error::EmptyDataset(_) => {
                SpStatus::EmptyInput
            }
            Error::NoCenters => SpStatus::NoCenters,
            Error::DegenerateDistance { .. } | Error::DuplicateStops(..) => {
                SpStatus::DuplicateStops
            }
            Error::TooFewStops(_) => SpStatus::TooFewStops,
            Error::InstanceTooLarge(_) => SpStatus::InstanceTooLarge,
            Error::FileNotFound(_) => SpStatus::FileNotFound,
            Error::Parse { .. } => SpStatus::Parse,
            Error::Io(_) => SpStatus::Io,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: SpStatus, msg: impl Into<String>) -> SpStatus {
    set_error(msg);
    status
}

fn fail_with(e: Error) -> SpStatus {
    fail(SpStatus::from(&e), e.to_string())
}

/// Runs `f`, turning panics into [`SpStatus::Panic`].
fn guard(f: impl FnOnce() -> SpStatus) -> SpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(SpStatus::Panic, "internal panic"),
    }
}

/// Message for the most recent failure on this thread, or NULL.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Owned list of coordinates (houses or stops).
pub struct SpPoints(Vec<GeoPoint>);

/// Owned clustering result.
pub struct SpClusters(ClusterResult);

/// Owned closed tour.
pub struct SpTour(Tour);

fn into_handle<T>(value: T, out: *mut *mut T) -> SpStatus {
    // SAFETY: callers check `out` for NULL before producing a value.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    SpStatus::Ok
}

/// Copies `n` coordinate pairs into a new handle.
///
/// # Safety
/// `lats` and `lons` must each point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_points_new(
    lats: *const f64,
    lons: *const f64,
    n: usize,
    out: *mut *mut SpPoints,
) -> SpStatus {
    guard(|| {
        if out.is_null() || (n > 0 && (lats.is_null() || lons.is_null())) {
            return fail(SpStatus::NullPointer, "null pointer argument");
        }
        let (lats, lons) = if n == 0 {
            (&[][..], &[][..])
        } else {
            // SAFETY: caller guarantees both arrays hold `n` elements.
            unsafe {
                (
                    std::slice::from_raw_parts(lats, n),
                    std::slice::from_raw_parts(lons, n),
                )
            }
        };
        match lats
            .iter()
            .zip(lons)
            .map(|(&a, &b)| GeoPoint::new(a, b))
            .collect::<Result<Vec<_>, _>>()
        {
            Ok(points) => into_handle(SpPoints(points), out),
            Err(e) => fail_with(e),
        }
    })
}

/// Loads houses from a `lat,lon` CSV or GeoJSON FeatureCollection.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_points_load(path: *const c_char, out: *mut *mut SpPoints) -> SpStatus {
    guard(|| {
        if path.is_null() || out.is_null() {
            return fail(SpStatus::NullPointer, "null pointer argument");
        }
        // SAFETY: caller guarantees a NUL-terminated string.
        let Ok(path) = unsafe { CStr::from_ptr(path) }.to_str() else {
            return fail(SpStatus::InvalidArgument, "path is not valid UTF-8");
        };
        match stopplan::io::load_houses(path) {
            Ok(ds) => into_handle(SpPoints(ds.houses), out),
            Err(e) => fail_with(e),
        }
    })
}

/// Number of points; 0 for NULL.
///
/// # Safety
/// `points` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp_points_len(points: *const SpPoints) -> usize {
    // SAFETY: caller guarantees a live handle or NULL.
    unsafe { points.as_ref() }.map_or(0, |p| p.0.len())
}

/// # Safety
/// `points` must be a live handle; `lat` and `lon` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_points_get(
    points: *const SpPoints,
    index: usize,
    lat: *mut f64,
    lon: *mut f64,
) -> SpStatus {
    // SAFETY: caller guarantees a live handle or NULL.
    let Some(points) = (unsafe { points.as_ref() }) else {
        return fail(SpStatus::NullPointer, "null points handle");
    };
    if lat.is_null() || lon.is_null() {
        return fail(SpStatus::NullPointer, "null output pointer");
    }
    let Some(p) = points.0.get(index) else {
        return fail(
            SpStatus::IndexOutOfRange,
            format!("index {index} out of range"),
        );
    };
    // SAFETY: checked non-null above.
    unsafe {
        *lat = p.lat();
        *lon = p.lon();
    }
    SpStatus::Ok
}

/// # Safety
/// `points` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_points_free(points: *mut SpPoints) {
    if !points.is_null() {
        // SAFETY: handle was created by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(points) });
    }
}

/// Great-circle distance in meters.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_haversine_distance(
    lat1: f64,
    lon1: f64,
    lat2: f64,
    lon2: f64,
    out: *mut f64,
) -> SpStatus {
    if out.is_null() {
        return fail(SpStatus::NullPointer, "null output pointer");
    }
    match (GeoPoint::new(lat1, lon1), GeoPoint::new(lat2, lon2)) {
        (Ok(a), Ok(b)) => {
            // SAFETY: checked non-null above.
            unsafe { *out = haversine_distance(a, b) };
            SpStatus::Ok
        }
        (Err(e), _) | (_, Err(e)) => fail_with(e),
    }
}

/// Mean-shift settings; see `sp_mean_shift_config_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SpMeanShiftConfig {
    pub bandwidth: f64,
    pub convergence_eps: f64,
    pub max_iterations: usize,
    pub merge_radius: f64,
    pub kernel_cutoff: f64,
}

impl From<SpMeanShiftConfig> for MeanShiftConfig {
    fn from(c: SpMeanShiftConfig) -> Self {
        MeanShiftConfig {
            bandwidth: c.bandwidth,
            convergence_eps: c.convergence_eps,
            max_iterations: c.max_iterations,
            merge_radius: c.merge_radius,
            kernel_cutoff: c.kernel_cutoff,
        }
    }
}

#[no_mangle]
pub extern "C" fn sp_mean_shift_config_default(bandwidth: f64) -> SpMeanShiftConfig {
    let c = MeanShiftConfig::new(bandwidth);
    SpMeanShiftConfig {
        bandwidth: c.bandwidth,
        convergence_eps: c.convergence_eps,
        max_iterations: c.max_iterations,
        merge_radius: c.merge_radius,
        kernel_cutoff: c.kernel_cutoff,
    }
}

/// # Safety
/// `houses` and `config` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_mean_shift(
    houses: *const SpPoints,
    config: *const SpMeanShiftConfig,
    out: *mut *mut SpClusters,
) -> SpStatus {
    guard(|| {
        // SAFETY: caller guarantees live pointers or NULL.
        let (Some(houses), Some(config)) = (unsafe { houses.as_ref() }, unsafe { config.as_ref() })
        else {
            return fail(SpStatus::NullPointer, "null pointer argument");
        };
        if out.is_null() {
            return fail(SpStatus::NullPointer, "null output pointer");
        }
        match mean_shift(&houses.0, &MeanShiftConfig::from(*config)) {
            Ok(r) => into_handle(SpClusters(r), out),
            Err(e) => fail_with(e),
        }
    })
}

/// # Safety
/// `clusters` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp_clusters_len(clusters: *const SpClusters) -> usize {
    // SAFETY: caller guarantees a live handle or NULL.
    unsafe { clusters.as_ref() }.map_or(0, |c| c.0.centers.len())
}

/// Copies the centers into a new points handle (usable as route stops).
///
/// # Safety
/// `clusters` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_clusters_centers(
    clusters: *const SpClusters,
    out: *mut *mut SpPoints,
) -> SpStatus {
    // SAFETY: caller guarantees a live handle or NULL.
    let Some(clusters) = (unsafe { clusters.as_ref() }) else {
        return fail(SpStatus::NullPointer, "null clusters handle");
    };
    if out.is_null() {
        return fail(SpStatus::NullPointer, "null output pointer");
    }
    into_handle(SpPoints(clusters.0.centers.clone()), out)
}

/// Writes each house's center index into `buf` (capacity `cap`).
/// `written` receives the number of houses even when the buffer is too small.
///
/// # Safety
/// `buf` must hold `cap` writable elements; `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_clusters_assignment(
    clusters: *const SpClusters,
    buf: *mut usize,
    cap: usize,
    written: *mut usize,
) -> SpStatus {
    // SAFETY: caller guarantees a live handle or NULL.
    let Some(clusters) = (unsafe { clusters.as_ref() }) else {
        return fail(SpStatus::NullPointer, "null clusters handle");
    };
    // SAFETY: caller guarantees `buf`/`written` validity.
    unsafe { copy_out(&clusters.0.assignment, buf, cap, written) }
}

unsafe fn copy_out(src: &[usize], buf: *mut usize, cap: usize, written: *mut usize) -> SpStatus {
    if written.is_null() {
        return fail(SpStatus::NullPointer, "null output pointer");
    }
    // SAFETY: checked non-null above.
    unsafe { *written = src.len() };
    if cap < src.len() {
        return fail(
            SpStatus::BufferTooSmall,
            format!("buffer holds {cap}, need {}", src.len()),
        );
    }
    if !src.is_empty() {
        if buf.is_null() {
            return fail(SpStatus::NullPointer, "null buffer");
        }
        // SAFETY: caller guarantees `cap >= src.len()` writable elements.
        unsafe { ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len()) };
    }
    SpStatus::Ok
}

/// # Safety
/// `clusters` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_clusters_free(clusters: *mut SpClusters) {
    if !clusters.is_null() {
        // SAFETY: handle was created by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(clusters) });
    }
}

/// One row of the bandwidth summary table. Error distances are in km and are
/// NaN when `error_count` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SpCoverageReport {
    pub bandwidth: f64,
    pub total_houses: usize,
    pub error_count: usize,
    pub error_percentage: f64,
    pub max_error_km: f64,
    pub min_error_km: f64,
    pub median_error_km: f64,
    pub stops_spawned: usize,
}

/// # Safety
/// `houses` and `centers` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_coverage_report(
    houses: *const SpPoints,
    centers: *const SpPoints,
    radius: f64,
    out: *mut SpCoverageReport,
) -> SpStatus {
    guard(|| {
        // SAFETY: caller guarantees live pointers or NULL.
        let (Some(houses), Some(centers)) =
            (unsafe { houses.as_ref() }, unsafe { centers.as_ref() })
        else {
            return fail(SpStatus::NullPointer, "null pointer argument");
        };
        if out.is_null() {
            return fail(SpStatus::NullPointer, "null output pointer");
        }
        match coverage_report(&houses.0, &centers.0, radius) {
            Ok(r) => {
                let report = SpCoverageReport {
                    bandwidth: r.bandwidth,
                    total_houses: r.total_houses,
                    error_count: r.error_count,
                    error_percentage: r.error_percentage,
                    max_error_km: r.max_error.unwrap_or(f64::NAN),
                    min_error_km: r.min_error.unwrap_or(f64::NAN),
                    median_error_km: r.median_error.unwrap_or(f64::NAN),
                    stops_spawned: r.stops_spawned,
                };
                // SAFETY: checked non-null above.
                unsafe { *out = report };
                SpStatus::Ok
            }
            Err(e) => fail_with(e),
        }
    })
}

/// Ant colony settings; see `sp_aco_params_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SpAcoParams {
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
    pub n_ants: usize,
    pub n_iterations: usize,
    pub deposit_q: f64,
    pub initial_tau: f64,
    pub seed: u64,
}

impl From<SpAcoParams> for AcoParams {
    fn from(p: SpAcoParams) -> Self {
        AcoParams {
            alpha: p.alpha,
            beta: p.beta,
            rho: p.rho,
            n_ants: p.n_ants,
            n_iterations: p.n_iterations,
            deposit_q: p.deposit_q,
            initial_tau: p.initial_tau,
            seed: p.seed,
        }
    }
}

#[no_mangle]
pub extern "C" fn sp_aco_params_default(seed: u64) -> SpAcoParams {
    let p = AcoParams::with_seed(seed);
    SpAcoParams {
        alpha: p.alpha,
        beta: p.beta,
        rho: p.rho,
        n_ants: p.n_ants,
        n_iterations: p.n_iterations,
        deposit_q: p.deposit_q,
        initial_tau: p.initial_tau,
        seed: p.seed,
    }
}

/// # Safety
/// `stops` and `params` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_aco_solve(
    stops: *const SpPoints,
    params: *const SpAcoParams,
    out: *mut *mut SpTour,
) -> SpStatus {
    guard(|| {
        // SAFETY: caller guarantees live pointers or NULL.
        let (Some(stops), Some(params)) = (unsafe { stops.as_ref() }, unsafe { params.as_ref() })
        else {
            return fail(SpStatus::NullPointer, "null pointer argument");
        };
        if out.is_null() {
            return fail(SpStatus::NullPointer, "null output pointer");
        }
        match aco_solve(&stops.0, &AcoParams::from(*params)) {
            Ok(o) => into_handle(SpTour(o.best), out),
            Err(e) => fail_with(e),
        }
    })
}

/// Exact shortest tour (at most 11 stops).
///
/// # Safety
/// `stops` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_brute_force_tsp(
    stops: *const SpPoints,
    out: *mut *mut SpTour,
) -> SpStatus {
    guard(|| {
        // SAFETY: caller guarantees a live handle or NULL.
        let Some(stops) = (unsafe { stops.as_ref() }) else {
            return fail(SpStatus::NullPointer, "null stops handle");
        };
        if out.is_null() {
            return fail(SpStatus::NullPointer, "null output pointer");
        }
        match brute_force_tsp(&stops.0) {
            Ok(t) => into_handle(SpTour(t), out),
            Err(e) => fail_with(e),
        }
    })
}

/// Number of stops in the tour; 0 for NULL.
///
/// # Safety
/// `tour` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp_tour_len(tour: *const SpTour) -> usize {
    // SAFETY: caller guarantees a live handle or NULL.
    unsafe { tour.as_ref() }.map_or(0, |t| t.0.order.len())
}

/// Closed-cycle length in meters; NaN for NULL.
///
/// # Safety
/// `tour` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp_tour_length_m(tour: *const SpTour) -> f64 {
    // SAFETY: caller guarantees a live handle or NULL.
    unsafe { tour.as_ref() }.map_or(f64::NAN, |t| t.0.length)
}

/// Writes the visiting order (0-based stop indices) into `buf`.
///
/// # Safety
/// `buf` must hold `cap` writable elements; `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_tour_order(
    tour: *const SpTour,
    buf: *mut usize,
    cap: usize,
    written: *mut usize,
) -> SpStatus {
    // SAFETY: caller guarantees a live handle or NULL.
    let Some(tour) = (unsafe { tour.as_ref() }) else {
        return fail(SpStatus::NullPointer, "null tour handle");
    };
    // SAFETY: caller guarantees `buf`/`written` validity.
    unsafe { copy_out(&tour.0.order, buf, cap, written) }
}

/// # Safety
/// `tour` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_tour_free(tour: *mut SpTour) {
    if !tour.is_null() {
        // SAFETY: handle was created by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(tour) });
    }
}
