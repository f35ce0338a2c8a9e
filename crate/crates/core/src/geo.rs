//! Geodesic primitives: great-circle distance and a local equirectangular
//! plane for city-scale vector arithmetic.

use crate::error::{Error, Result};

/// IUGG mean Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_008.8;

/// Largest lat/lon offset from a projection origin accepted by [`project_local`].
pub const MAX_WORKSPACE_DEG: f64 = 1.0;

/// A WGS84 latitude/longitude pair in decimal degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    lat: f64,
    lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        if !lat.is_finite() || !lon.is_finite() {
            return Err(Error::InvalidCoordinate(format!(
                "non-finite coordinate ({lat}, {lon})"
            )));
        }
        if !(-90.0..=90.0).contains(&lat) {
            return Err(Error::InvalidCoordinate(format!(
                "latitude out of range: {lat}"
            )));
        }
        if !(-180.0..=180.0).contains(&lon) {
            return Err(Error::InvalidCoordinate(format!(
                "longitude out of range: {lon}"
            )));
        }
        Ok(Self { lat, lon })
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    pub fn lon(&self) -> f64 {
        self.lon
    }

    /// Arithmetic mean of latitudes and longitudes. `None` for an empty slice.
    pub fn centroid(points: &[GeoPoint]) -> Option<GeoPoint> {
        if points.is_empty() {
            return None;
        }
        let n = points.len() as f64;
        let lat = points.iter().map(|p| p.lat).sum::<f64>() / n;
        let lon = points.iter().map(|p| p.lon).sum::<f64>() / n;
        Some(GeoPoint { lat, lon })
    }
}

/// Meters east (`x`) and north (`y`) of a projection origin.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

impl PlanarPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &PlanarPoint) -> f64 {
        self.distance_sq(other).sqrt()
    }

    pub fn distance_sq(&self, other: &PlanarPoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Great-circle distance in meters (haversine form).
pub fn haversine_distance(a: GeoPoint, b: GeoPoint) -> f64 {
    let lat1 = a.lat.to_radians();
    let lat2 = b.lat.to_radians();
    // abs() keeps the result bit-identical under argument swap
    let half_dlat = ((a.lat - b.lat).abs().to_radians() / 2.0).sin();
    let half_dlon = ((a.lon - b.lon).abs().to_radians() / 2.0).sin();
    let h = half_dlat * half_dlat + lat1.cos() * lat2.cos() * half_dlon * half_dlon;
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}

/// Equirectangular projection of `p` into the plane tangent at `origin`.
pub fn project_local(origin: GeoPoint, p: GeoPoint) -> Result<PlanarPoint> {
    let dlat = p.lat - origin.lat;
    let dlon = p.lon - origin.lon;
    if dlat.abs() >= MAX_WORKSPACE_DEG || dlon.abs() >= MAX_WORKSPACE_DEG {
        return Err(Error::WorkspaceTooLarge { dlat, dlon });
    }
    let cos_lat = origin.lat.to_radians().cos();
    Ok(PlanarPoint {
        x: EARTH_RADIUS_M * dlon.to_radians() * cos_lat,
        y: EARTH_RADIUS_M * dlat.to_radians(),
    })
}

/// Inverse of [`project_local`].
pub fn unproject_local(origin: GeoPoint, p: PlanarPoint) -> Result<GeoPoint> {
    let cos_lat = origin.lat.to_radians().cos();
    let lat = origin.lat + (p.y / EARTH_RADIUS_M).to_degrees();
    let lon = origin.lon + (p.x / (EARTH_RADIUS_M * cos_lat)).to_degrees();
    GeoPoint::new(lat, lon)
}

/// A projection plane anchored at a fixed origin.
#[derive(Debug, Clone, Copy)]
pub struct LocalFrame {
    origin: GeoPoint,
}

impl LocalFrame {
    pub fn new(origin: GeoPoint) -> Self {
        Self { origin }
    }

    /// Frame centered on the centroid of `points`.
    pub fn centered_on(points: &[GeoPoint]) -> Result<Self> {
        GeoPoint::centroid(points)
            .map(Self::new)
            .ok_or(Error::EmptyInput)
    }

    pub fn origin(&self) -> GeoPoint {
        self.origin
    }

    pub fn project(&self, p: GeoPoint) -> Result<PlanarPoint> {
        project_local(self.origin, p)
    }

    pub fn project_all(&self, points: &[GeoPoint]) -> Result<Vec<PlanarPoint>> {
        points.iter().map(|&p| self.project(p)).collect()
    }

    pub fn unproject(&self, p: PlanarPoint) -> Result<GeoPoint> {
        unproject_local(self.origin, p)
    }
}
