//! File formats: house/stop CSV, GeoJSON in and out, and the summary table CSV.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use geojson::{Feature, FeatureCollection, GeoJson, Geometry, JsonObject, Value};
use serde_json::json;

use crate::coverage::CoverageReport;
use crate::error::{Error, Result};
use crate::geo::GeoPoint;
use crate::pipeline::{PlanResult, SweepReport};
use crate::routing::Tour;

/// Column header of the summary table, in table order.
pub const TABLE_HEADER: [&str; 7] = [
    "bandwidth",
    "total_error",
    "error_pct",
    "max_km",
    "min_km",
    "median_km",
    "stops",
];

/// Houses read from disk, plus any existing stops found alongside them.
#[derive(Debug, Clone, PartialEq)]
pub struct HouseDataset {
    pub houses: Vec<GeoPoint>,
    pub source_path: PathBuf,
    pub existing_stops: Vec<GeoPoint>,
}

/// Loads a `lat,lon` CSV or a GeoJSON FeatureCollection of Points.
///
/// GeoJSON Point features whose `kind` property is `"existing"` go to
/// `existing_stops`; LineString features (exported routes) are skipped.
pub fn load_houses(path: impl AsRef<Path>) -> Result<HouseDataset> {
    let path = path.as_ref();
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::FileNotFound(path.to_path_buf()))
        }
        Err(e) => return Err(e.into()),
    };
    let (houses, existing_stops) = if text.trim_start().starts_with('{') {
        parse_geojson_points(&text)?
    } else {
        (parse_csv_points(&text)?, Vec::new())
    };
    if houses.is_empty() {
        return Err(Error::EmptyDataset(path.to_path_buf()));
    }
    Ok(HouseDataset {
        houses,
        source_path: path.to_path_buf(),
        existing_stops,
    })
}

/// Parses `lat,lon` CSV text (header required; extra columns ignored).
pub fn parse_csv_points(text: &str) -> Result<Vec<GeoPoint>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let parse_err = |line: usize, reason: String| Error::Parse { line, reason };

    let headers = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim_start_matches('\u{feff}').eq_ignore_ascii_case(name))
            .ok_or_else(|| parse_err(1, format!("missing `{name}` column in header")))
    };
    let (lat_col, lon_col) = (column("lat")?, column("lon")?);

    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let field = |col: usize, name: &str| -> Result<f64> {
            let raw = record.get(col).unwrap_or("");
            raw.parse::<f64>()
                .map_err(|_| parse_err(line, format!("{name} is not a number: {raw:?}")))
        };
        let (lat, lon) = (field(lat_col, "latitude")?, field(lon_col, "longitude")?);
        let p = GeoPoint::new(lat, lon).map_err(|e| match e {
            Error::InvalidCoordinate(reason) => parse_err(line, reason),
            other => other,
        })?;
        points.push(p);
    }
    Ok(points)
}

fn parse_geojson_points(text: &str) -> Result<(Vec<GeoPoint>, Vec<GeoPoint>)> {
    let gj: GeoJson = text.parse().map_err(|e: geojson::Error| Error::Parse {
        line: match &e {
            geojson::Error::MalformedJson(j) => j.line(),
            _ => 1,
        },
        reason: e.to_string(),
    })?;
    let GeoJson::FeatureCollection(fc) = gj else {
        return Err(Error::Parse {
            line: 1,
            reason: "expected a GeoJSON FeatureCollection".into(),
        });
    };
    let feature_err = |i: usize, reason: String| Error::Parse {
        line: 1,
        reason: format!("feature {}: {reason}", i + 1),
    };

    let (mut houses, mut existing) = (Vec::new(), Vec::new());
    for (i, feature) in fc.features.iter().enumerate() {
        let Some(geometry) = &feature.geometry else {
            return Err(feature_err(i, "missing geometry".into()));
        };
        let coords = match &geometry.value {
            Value::Point(c) => c,
            Value::LineString(_) | Value::MultiLineString(_) => continue,
            _ => return Err(feature_err(i, "only Point features are supported".into())),
        };
        if coords.len() < 2 {
            return Err(feature_err(i, "point needs [lon, lat]".into()));
        }
        let p = GeoPoint::new(coords[1], coords[0]).map_err(|e| feature_err(i, e.to_string()))?;
        let is_existing = feature
            .property("kind")
            .and_then(|k| k.as_str())
            .is_some_and(|k| k == "existing");
        if is_existing {
            existing.push(p);
        } else {
            houses.push(p);
        }
    }
    Ok((houses, existing))
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn point(p: GeoPoint) -> Geometry {
    Geometry::new(Value::Point(vec![p.lon(), p.lat()]))
}

fn feature(geometry: Geometry, properties: serde_json::Value) -> Feature {
    let properties: JsonObject = match properties {
        serde_json::Value::Object(m) => m,
        _ => unreachable!("properties are always built as objects"),
    };
    Feature {
        bbox: None,
        geometry: Some(geometry),
        id: None,
        properties: Some(properties),
        foreign_members: None,
    }
}

fn collection(features: Vec<Feature>) -> String {
    let fc = FeatureCollection {
        bbox: None,
        features,
        foreign_members: None,
    };
    let mut s = GeoJson::from(fc).to_string();
    s.push('\n');
    s
}

fn existing_features(existing: &[GeoPoint]) -> impl Iterator<Item = Feature> + '_ {
    existing
        .iter()
        .map(|&p| feature(point(p), json!({ "kind": "existing" })))
}

/// Stops labeled by tour position, the closed route, then existing stops.
pub fn route_geojson(stops: &[GeoPoint], tour: &Tour, existing: &[GeoPoint]) -> String {
    let mut features: Vec<Feature> = tour
        .order
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            feature(
                point(stops[i]),
                json!({ "kind": "stop", "stop_seq": k + 1, "stop_index": i }),
            )
        })
        .collect();

    let mut line: Vec<Vec<f64>> = tour
        .order
        .iter()
        .map(|&i| vec![stops[i].lon(), stops[i].lat()])
        .collect();
    if let Some(first) = line.first().cloned() {
        line.push(first);
    }
    features.push(feature(
        Geometry::new(Value::LineString(line)),
        json!({ "kind": "route", "length_m": tour.length }),
    ));
    features.extend(existing_features(existing));
    collection(features)
}

/// Stops without a route, labeled by center index (1-based).
pub fn stops_geojson(stops: &[GeoPoint], existing: &[GeoPoint]) -> String {
    let mut features: Vec<Feature> = stops
        .iter()
        .enumerate()
        .map(|(i, &p)| feature(point(p), json!({ "kind": "stop", "stop_id": i + 1 })))
        .collect();
    features.extend(existing_features(existing));
    collection(features)
}

pub fn plan_geojson(plan: &PlanResult) -> String {
    route_geojson(plan.stops(), &plan.tour, &plan.existing_stops)
}

pub fn export_geojson(plan: &PlanResult, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path, plan_geojson(plan).as_bytes())
}

/// `lat,lon` CSV with round-trip precision.
pub fn points_csv(points: &[GeoPoint]) -> String {
    let mut out = String::from("lat,lon\n");
    for p in points {
        out.push_str(&format!("{},{}\n", p.lat(), p.lon()));
    }
    out
}

/// The seven tabulated columns of a [`CoverageReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub bandwidth: f64,
    pub total_error: usize,
    pub error_pct: f64,
    pub max_km: Option<f64>,
    pub min_km: Option<f64>,
    pub median_km: Option<f64>,
    pub stops: usize,
}

impl From<&CoverageReport> for TableRow {
    fn from(r: &CoverageReport) -> Self {
        Self {
            bandwidth: r.bandwidth,
            total_error: r.error_count,
            error_pct: r.error_percentage,
            max_km: r.max_error,
            min_km: r.min_error,
            median_km: r.median_error,
            stops: r.stops_spawned,
        }
    }
}

fn km(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2}")).unwrap_or_default()
}

pub fn table_csv<'a>(rows: impl IntoIterator<Item = &'a CoverageReport>) -> String {
    let mut out = TABLE_HEADER.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.2},{},{},{},{}\n",
            r.bandwidth,
            r.error_count,
            r.error_percentage,
            km(r.max_error),
            km(r.min_error),
            km(r.median_error),
            r.stops_spawned
        ));
    }
    out
}

pub fn sweep_csv(report: &SweepReport) -> String {
    table_csv(&report.rows)
}

/// Parses text produced by [`table_csv`].
pub fn parse_table_csv(text: &str) -> Result<Vec<TableRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Parse {
        line: 1,
        reason: e.to_string(),
    })?;
    if headers.iter().ne(TABLE_HEADER) {
        return Err(Error::Parse {
            line: 1,
            reason: format!("expected header {}", TABLE_HEADER.join(",")),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let bad = |col: &str| Error::Parse {
            line,
            reason: format!("bad `{col}` value"),
        };
        let num = |i: usize| record[i].parse::<f64>().map_err(|_| bad(TABLE_HEADER[i]));
        let count = |i: usize| record[i].parse::<usize>().map_err(|_| bad(TABLE_HEADER[i]));
        let opt = |i: usize| -> Result<Option<f64>> {
            if record[i].is_empty() {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        rows.push(TableRow {
            bandwidth: num(0)?,
            total_error: count(1)?,
            error_pct: num(2)?,
            max_km: opt(3)?,
            min_km: opt(4)?,
            median_km: opt(5)?,
            stops: count(6)?,
        });
    }
    Ok(rows)
}
