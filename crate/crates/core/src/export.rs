//! File formats: point sets, lookup results, metric reports, comparison
//! tables and region boundary polylines.
//!
//! CSV floats are written with 17 significant digits, which round-trips any
//! binary64 value exactly. JSON documents carry a `schema_version` field.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::compare::{CompareTable, COMPARE_COLUMNS};
use crate::error::{Error, Result};
use crate::geometry::{polar_to_coords, CartesianPoint, Dimension};
use crate::metrics::MetricsReport;
use crate::partition::{RegionKind, RegionTree};
use crate::points::{CodeSet, Generator};

/// Version of the point-set JSON schema.
pub const POINTS_SCHEMA_VERSION: u32 = 1;

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::parse(line, e.to_string())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Serialization(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
}

/// `index,x0,…,xd`, one row per point.
pub fn points_to_csv(code: &CodeSet) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["index".to_string()];
    header.extend((0..code.d().ambient()).map(|k| format!("x{k}")));
    w.write_record(&header).map_err(csv_error)?;
    for (i, p) in code.points().iter().enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(p.coords().iter().map(|&c| fmt_f64(c)));
        w.write_record(&row).map_err(csv_error)?;
    }
    finish(w)
}

#[derive(Serialize, Deserialize)]
struct PointsFile {
    schema_version: u32,
    d: usize,
    #[serde(rename = "N")]
    n: usize,
    generator: String,
    params: Generator,
    seed: u64,
    points: Vec<Vec<f64>>,
}

/// `{schema_version, d, N, generator, params, seed, points}`.
pub fn points_to_json(code: &CodeSet) -> Result<String> {
    let file = PointsFile {
        schema_version: POINTS_SCHEMA_VERSION,
        d: code.d().get(),
        n: code.len(),
        generator: code.generator().name().to_string(),
        params: *code.generator(),
        seed: code.generator().seed(),
        points: code.points().iter().map(|p| p.coords().to_vec()).collect(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Reads a point set written by [`points_to_csv`] or [`points_to_json`], or a
/// plain CSV of coordinates (one point per row, optional header). Every point
/// must be a unit vector.
pub fn read_points(text: &str) -> Result<CodeSet> {
    if text.trim_start().starts_with('{') {
        let file: PointsFile =
            serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        if file.schema_version != POINTS_SCHEMA_VERSION {
            return Err(Error::config(format!(
                "unsupported points schema version {}",
                file.schema_version
            )));
        }
        let d = Dimension::new(file.d)?;
        let points = file
            .points
            .into_iter()
            .map(CartesianPoint::new)
            .collect::<Result<Vec<_>>>()?;
        if points.len() != file.n {
            return Err(Error::config("point count does not match N"));
        }
        return CodeSet::new(d, points, file.params);
    }
    let (d, rows) = read_point_rows(text, None)?;
    let Some(d) = d else {
        return Err(Error::parse(1, "no points"));
    };
    CodeSet::new(
        d,
        rows.into_iter().map(|(_, p)| p).collect(),
        Generator::External,
    )
}

/// Dimension of a parsed point file and its points with their line numbers.
pub type PointRows = (Option<Dimension>, Vec<(usize, CartesianPoint)>);

/// Parses point rows from CSV. Returns the dimension (if any rows or a
/// header fixed it) and `(line, point)` pairs. With `expected` set, rows of
/// `d + 2` fields are taken to start with an index column.
pub fn read_point_rows(text: &str, expected: Option<Dimension>) -> Result<PointRows> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut has_index: Option<bool> = None;
    let mut width: Option<usize> = None;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        // A header row is recognized by its first field not being numeric.
        if out.is_empty()
            && width.is_none()
            && rec.get(0).is_some_and(|f| f.parse::<f64>().is_err())
        {
            has_index = Some(rec.get(0) == Some("index"));
            width = Some(rec.len());
            continue;
        }
        match width {
            Some(w) if w != rec.len() => {
                return Err(Error::parse(
                    line,
                    format!("expected {w} fields, found {}", rec.len()),
                ))
            }
            None => width = Some(rec.len()),
            _ => {}
        }
        let index_col = *has_index.get_or_insert_with(|| match expected {
            Some(d) => rec.len() == d.get() + 2,
            None => false,
        });
        let fields: Vec<&str> = rec.iter().skip(usize::from(index_col)).collect();
        if fields.len() < 2 {
            return Err(Error::parse(line, "a point needs at least 2 coordinates"));
        }
        let coords = fields
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::parse(line, format!("'{f}' is not a number")))
            })
            .collect::<Result<Vec<_>>>()?;
        let p = CartesianPoint::new(coords).map_err(|e| Error::parse(line, e.to_string()))?;
        if let Some(d) = expected {
            if p.dim() != d {
                return Err(Error::parse(
                    line,
                    format!(
                        "point has {} coordinates, expected {}",
                        p.dim().ambient(),
                        d.ambient()
                    ),
                ));
            }
        }
        out.push((line, p));
    }
    let d = match (expected, out.first()) {
        (Some(d), _) => Some(d),
        (None, Some((_, p))) => Some(p.dim()),
        (None, None) => width
            .map(|w| w.saturating_sub(usize::from(has_index == Some(true)) + 1))
            .and_then(|d| Dimension::new(d).ok()),
    };
    Ok((d, out))
}

/// `index,region`, one row per looked-up point.
pub fn indices_to_csv(indices: &[usize]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "region"]).map_err(csv_error)?;
    for (i, r) in indices.iter().enumerate() {
        w.write_record([i.to_string(), r.to_string()])
            .map_err(csv_error)?;
    }
    finish(w)
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Header and one data row; Riesz energies become `riesz_energy_s<s>` columns.
pub fn report_to_csv(r: &MetricsReport) -> Result<String> {
    let mut header: Vec<String> = [
        "generator",
        "d",
        "N",
        "max_region_diameter",
        "diameter_ratio",
        "diameter_exact",
        "min_distance",
        "min_distance_ratio",
        "packing_density",
        "covering_radius_estimate",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut row = vec![
        r.generator.clone(),
        r.d.to_string(),
        r.n.to_string(),
        opt(r.max_region_diameter),
        opt(r.diameter_ratio),
        r.diameter_exact.map(|b| b.to_string()).unwrap_or_default(),
        fmt_f64(r.min_distance),
        fmt_f64(r.min_distance_ratio),
        fmt_f64(r.packing_density),
        fmt_f64(r.covering_radius_estimate),
    ];
    for (s, e) in &r.riesz_energy {
        header.push(format!("riesz_energy_s{s}"));
        row.push(fmt_f64(*e));
    }
    for (h, v) in [
        ("log_energy", fmt_f64(r.log_energy)),
        (
            "cap_discrepancy_estimate",
            fmt_f64(r.cap_discrepancy_estimate),
        ),
        ("mc_samples", r.mc_samples.to_string()),
        ("cap_trials", r.cap_trials.to_string()),
        ("seed", r.seed.to_string()),
    ] {
        header.push(h.to_string());
        row.push(v);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).map_err(csv_error)?;
    w.write_record(&row).map_err(csv_error)?;
    finish(w)
}

pub fn report_to_json(r: &MetricsReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(r)?)
}

/// Long-form CSV with columns `generator,N,metric,value,seed`.
pub fn table_to_csv(t: &CompareTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COMPARE_COLUMNS).map_err(csv_error)?;
    for r in &t.rows {
        w.write_record([
            r.generator.clone(),
            r.n.to_string(),
            r.metric.clone(),
            fmt_f64(r.value),
            r.seed.to_string(),
        ])
        .map_err(csv_error)?;
    }
    finish(w)
}

pub fn table_to_json(t: &CompareTable) -> Result<String> {
    Ok(serde_json::to_string_pretty(t)?)
}

fn kind_name(k: RegionKind) -> &'static str {
    match k {
        RegionKind::CapNorth => "cap_north",
        RegionKind::CapSouth => "cap_south",
        RegionKind::Zonal => "zonal",
        RegionKind::WholeSphere => "whole_sphere",
        RegionKind::CircleSegment => "circle_segment",
    }
}

/// `region,kind,azimuth_offset,lo0,hi0,…`, one row per region, with the
/// interval bounds of every level in the collar's azimuth frame.
pub fn regions_to_csv(tree: &RegionTree) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["region".to_string(), "kind".into(), "azimuth_offset".into()];
    for k in 0..tree.d().get() {
        header.push(format!("lo{k}"));
        header.push(format!("hi{k}"));
    }
    w.write_record(&header).map_err(csv_error)?;
    for (i, r) in tree.regions().iter().enumerate() {
        let mut row = vec![
            i.to_string(),
            kind_name(r.kind).into(),
            fmt_f64(r.azimuth_offset),
        ];
        for iv in &r.intervals {
            row.push(fmt_f64(iv.lo));
            row.push(fmt_f64(iv.hi));
        }
        w.write_record(&row).map_err(csv_error)?;
    }
    finish(w)
}

/// Closed boundary polyline of one region of a partition of S².
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub region: usize,
    pub vertices: Vec<[f64; 3]>,
}

fn steps(span: f64, resolution: f64) -> usize {
    ((span / resolution).ceil() as usize).max(1)
}

/// Boundary polylines of every region of EQ(2, N), sampled at angular
/// spacing at most `resolution`. The whole sphere has no boundary and gives
/// an empty polyline.
pub fn boundaries(tree: &RegionTree, resolution: f64) -> Result<Vec<Polyline>> {
    if tree.d().get() != 2 {
        return Err(Error::Unsupported(format!(
            "boundaries are drawn for partitions of S² only, not S^{}",
            tree.d()
        )));
    }
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::domain("resolution must be positive"));
    }
    let point = |theta: f64, phi: f64| -> [f64; 3] {
        let c = polar_to_coords(&[theta, phi]);
        [c[0], c[1], c[2]]
    };
    let circle = |theta: f64| -> Vec<[f64; 3]> {
        let k = steps(TAU, resolution);
        let mut v: Vec<_> = (0..k)
            .map(|i| point(theta, TAU * i as f64 / k as f64))
            .collect();
        v.push(v[0]);
        v
    };
    let lines = tree
        .regions()
        .iter()
        .enumerate()
        .map(|(idx, r)| {
            let vertices = match r.kind {
                RegionKind::WholeSphere => Vec::new(),
                RegionKind::CapNorth => circle(r.intervals[0].hi),
                RegionKind::CapSouth => circle(r.intervals[0].lo),
                _ => {
                    let (t1, t2) = (r.intervals[0].lo, r.intervals[0].hi);
                    let (p1, p2) = (
                        r.intervals[1].lo + r.azimuth_offset,
                        r.intervals[1].hi + r.azimuth_offset,
                    );
                    let ka = steps(p2 - p1, resolution);
                    let kc = steps(t2 - t1, resolution);
                    let lerp =
                        |a: f64, b: f64, i: usize, k: usize| a + (b - a) * i as f64 / k as f64;
                    let mut v = Vec::with_capacity(2 * (ka + kc) + 1);
                    v.extend((0..ka).map(|i| point(t1, lerp(p1, p2, i, ka))));
                    v.extend((0..kc).map(|i| point(lerp(t1, t2, i, kc), p2)));
                    v.extend((0..ka).map(|i| point(t2, lerp(p2, p1, i, ka))));
                    v.extend((0..kc).map(|i| point(lerp(t2, t1, i, kc), p1)));
                    v.push(v[0]);
                    v
                }
            };
            Polyline {
                region: idx,
                vertices,
            }
        })
        .collect();
    Ok(lines)
}

/// `region,vertex,x0,x1,x2`, one row per vertex.
pub fn boundaries_to_csv(lines: &[Polyline]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["region", "vertex", "x0", "x1", "x2"])
        .map_err(csv_error)?;
    for l in lines {
        for (k, v) in l.vertices.iter().enumerate() {
            w.write_record([
                l.region.to_string(),
                k.to_string(),
                fmt_f64(v[0]),
                fmt_f64(v[1]),
                fmt_f64(v[2]),
            ])
            .map_err(csv_error)?;
        }
    }
    finish(w)
}
