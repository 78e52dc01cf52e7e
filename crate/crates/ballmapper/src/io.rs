//! File formats: CSV ingestion, JSON/DOT/HTML graph export, sweep CSV.
//!
//! The JSON schema ([`GraphDocument`]) is the interchange format: struct
//! fields are declared in alphabetical order so serialization emits sorted
//! keys, floats print as the shortest decimal that round-trips, and every
//! writer terminates its output with a newline — equal inputs produce
//! byte-identical files.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::DegreeSweep;
use crate::graph::{Aggregator, BmGraph, Edge, Vertex, VertexColoring};
use crate::metric::{DistanceMatrix, Metric, MetricError, PointCloud};

/// Schema version stamped into every exported document.
pub const GRAPH_FORMAT_VERSION: &str = "1";

/// Nine-stop sequential color ramp (dark violet to yellow) used for vertex
/// fills in DOT and HTML exports.
pub const COLOR_RAMP: [&str; 9] = [
    "#440154", "#472d7b", "#3b528b", "#2c728e", "#21918c", "#28ae80", "#5ec962", "#addc30",
    "#fde725",
];

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("file {0} contains no data rows")]
    EmptyFile(String),
    #[error("row {row} has {found} columns, expected {expected}")]
    RaggedRow {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("row {row}, column {col}: cannot parse {value:?} as a number")]
    BadNumber {
        row: usize,
        col: usize,
        value: String,
    },
    #[error("attribute column {0:?} not found")]
    UnknownAttributeColumn(String),
    #[error("attribute column {0:?} is not an index and the file has no header row")]
    NamedColumnsNeedHeader(String),
    #[error("no coordinate columns remain after removing attribute columns")]
    NoCoordinateColumns,
    #[error("graph document is inconsistent: {0}")]
    Document(String),
    #[error("vertex {0} lacks its covered-point list; export with covered lists to rebuild a graph")]
    MissingCovered(usize),
}

/// On-disk graph schema. Field order is alphabetical by design: serde emits
/// struct fields in declaration order, which makes the JSON keys sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub edges: Vec<EdgeDoc>,
    pub epsilon: f64,
    pub metric: String,
    pub partial_cover: bool,
    pub points: usize,
    pub version: String,
    pub vertices: Vec<VertexDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexDoc {
    pub center: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub colors: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covered: Option<Vec<usize>>,
    pub id: usize,
    pub size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub u: usize,
    pub v: usize,
    pub weight: usize,
}

/// Key under which a coloring appears in the document: the attribute name
/// for means, suffixed with the aggregator otherwise.
pub fn coloring_key(coloring: &VertexColoring<f64>) -> String {
    match coloring.aggregator() {
        Aggregator::Mean => coloring.attribute().to_string(),
        other => format!("{}_{}", coloring.attribute(), other.name()),
    }
}

impl GraphDocument {
    /// Captures a graph (plus any colorings) into the export schema.
    /// Covered-point lists are bulky, so they are written only on request.
    pub fn from_graph(
        graph: &BmGraph<f64>,
        metric_name: &str,
        colorings: &[VertexColoring<f64>],
        include_covered: bool,
    ) -> GraphDocument {
        let vertices = graph
            .vertices()
            .iter()
            .map(|v| {
                let colors = colorings
                    .iter()
                    .map(|c| (coloring_key(c), c.values()[v.id]))
                    .collect();
                VertexDoc {
                    center: v.center,
                    colors,
                    covered: include_covered.then(|| v.covered.clone()),
                    id: v.id,
                    size: v.size(),
                }
            })
            .collect();
        let edges = graph
            .edges()
            .iter()
            .map(|e| EdgeDoc {
                u: e.u,
                v: e.v,
                weight: e.weight,
            })
            .collect();
        GraphDocument {
            edges,
            epsilon: graph.epsilon(),
            metric: metric_name.to_string(),
            partial_cover: graph.partial_cover(),
            points: graph.n_points(),
            version: GRAPH_FORMAT_VERSION.to_string(),
            vertices,
        }
    }

    /// Validates the document's internal consistency (dense ids, ordered
    /// edges, sizes matching covered lists where present).
    pub fn validate(&self) -> Result<(), IoError> {
        for (i, v) in self.vertices.iter().enumerate() {
            if v.id != i {
                return Err(IoError::Document(format!(
                    "vertex at position {i} has id {}",
                    v.id
                )));
            }
            if let Some(covered) = &v.covered {
                if covered.len() != v.size {
                    return Err(IoError::Document(format!(
                        "vertex {i} says size {} but lists {} covered points",
                        v.size,
                        covered.len()
                    )));
                }
                if covered.iter().any(|&x| x >= self.points) {
                    return Err(IoError::Document(format!(
                        "vertex {i} covers a point beyond the cloud size {}",
                        self.points
                    )));
                }
            }
            if v.center >= self.points {
                return Err(IoError::Document(format!(
                    "vertex {i} centers on point {} beyond the cloud size {}",
                    v.center, self.points
                )));
            }
        }
        for e in &self.edges {
            if e.u >= e.v || e.v >= self.vertices.len() {
                return Err(IoError::Document(format!(
                    "edge ({}, {}) is not an ordered pair of vertex ids",
                    e.u, e.v
                )));
            }
            if e.weight == 0 {
                return Err(IoError::Document(format!(
                    "edge ({}, {}) has weight 0",
                    e.u, e.v
                )));
            }
        }
        Ok(())
    }

    /// Rebuilds the in-memory graph; requires covered lists on every vertex.
    pub fn to_graph(&self) -> Result<BmGraph<f64>, IoError> {
        self.validate()?;
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                let covered = v
                    .covered
                    .clone()
                    .ok_or(IoError::MissingCovered(v.id))?;
                Ok(Vertex {
                    id: v.id,
                    center: v.center,
                    covered,
                })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                u: e.u,
                v: e.v,
                weight: e.weight,
            })
            .collect();
        Ok(BmGraph::from_parts(
            self.epsilon,
            self.points,
            self.partial_cover,
            vertices,
            edges,
        ))
    }

    /// The document as pretty-printed JSON with a trailing newline — the
    /// exact bytes [`write_graph_json`] puts on disk.
    pub fn to_json_string(&self) -> Result<String, IoError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

pub fn write_graph_json(document: &GraphDocument, path: impl AsRef<Path>) -> Result<(), IoError> {
    std::fs::write(path.as_ref(), document.to_json_string()?)?;
    Ok(())
}

pub fn read_graph_json(path: impl AsRef<Path>) -> Result<GraphDocument, IoError> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let doc: GraphDocument = serde_json::from_str(&text)?;
    doc.validate()?;
    Ok(doc)
}

/// Maps a color value to a ramp entry over the coloring's min–max span;
/// degenerate spans collapse to the ramp's first stop.
fn ramp_color(value: f64, min: f64, max: f64) -> &'static str {
    let t = if max > min { (value - min) / (max - min) } else { 0.0 };
    let idx = (t * (COLOR_RAMP.len() - 1) as f64).round() as usize;
    COLOR_RAMP[idx.min(COLOR_RAMP.len() - 1)]
}

/// Min and max of the chosen color key over vertices carrying it.
fn color_span(document: &GraphDocument, key: &str) -> Option<(f64, f64)> {
    let mut span: Option<(f64, f64)> = None;
    for v in &document.vertices {
        if let Some(&value) = v.colors.get(key) {
            span = Some(match span {
                None => (value, value),
                Some((lo, hi)) => (lo.min(value), hi.max(value)),
            });
        }
    }
    span
}

/// Writes Graphviz DOT: undirected, node label `center:size`, node area
/// proportional to ball size (width 0.2·√size inches), optional fill from
/// the color ramp. Edges are unweighted in the output.
pub fn write_dot(
    document: &GraphDocument,
    color_key: Option<&str>,
    path: impl AsRef<Path>,
) -> Result<(), IoError> {
    let span = color_key.and_then(|k| color_span(document, k));
    let mut out = String::new();
    out.push_str("graph ballmapper {\n");
    out.push_str("  node [shape=circle, fixedsize=true];\n");
    for v in &document.vertices {
        let width = 0.2 * (v.size as f64).sqrt();
        let fill = color_key
            .and_then(|k| v.colors.get(k))
            .zip(span)
            .map(|(&value, (lo, hi))| ramp_color(value, lo, hi));
        match fill {
            Some(color) => out.push_str(&format!(
                "  {} [label=\"{}:{}\", width={:.3}, style=filled, fillcolor=\"{}\"];\n",
                v.id, v.center, v.size, width, color
            )),
            None => out.push_str(&format!(
                "  {} [label=\"{}:{}\", width={:.3}];\n",
                v.id, v.center, v.size, width
            )),
        }
    }
    for e in &document.edges {
        out.push_str(&format!("  {} -- {};\n", e.u, e.v));
    }
    out.push_str("}\n");
    std::fs::write(path.as_ref(), out)?;
    Ok(())
}

/// Writes a self-contained HTML page: the document embedded as JSON plus a
/// small force-layout renderer. No external resources are referenced.
pub fn write_html(
    document: &GraphDocument,
    color_key: Option<&str>,
    path: impl AsRef<Path>,
) -> Result<(), IoError> {
    // "<" never survives into the inline script: escaping it keeps any
    // attribute name from smuggling in a closing tag.
    let data = serde_json::to_string(document)?.replace('<', "\\u003c");
    let key = serde_json::to_string(&color_key)?.replace('<', "\\u003c");
    let ramp = serde_json::to_string(&COLOR_RAMP)?;
    let html = HTML_TEMPLATE
        .replace("__DATA__", &data)
        .replace("__COLOR_KEY__", &key)
        .replace("__RAMP__", &ramp);
    std::fs::write(path.as_ref(), html)?;
    Ok(())
}

const HTML_TEMPLATE: &str = r##"<!DOCTYPE html>
<html>
<head>
<meta charset="utf-8">
<title>ball mapper graph</title>
<style>
  body { margin: 0; background: #181820; color: #ddd; font: 13px sans-serif; }
  #hud { position: fixed; top: 8px; left: 10px; pointer-events: none; }
  svg { width: 100vw; height: 100vh; display: block; }
  line { stroke: #555; stroke-width: 1; }
  circle { stroke: #000; stroke-width: 0.5; }
</style>
</head>
<body>
<div id="hud"></div>
<svg id="view"></svg>
<script>
"use strict";
const DATA = __DATA__;
const COLOR_KEY = __COLOR_KEY__;
const RAMP = __RAMP__;

const V = DATA.vertices.length;
const W = Math.max(window.innerWidth, 400);
const H = Math.max(window.innerHeight, 400);
document.getElementById("hud").textContent =
  "V=" + V + " E=" + DATA.edges.length + " epsilon=" + DATA.epsilon +
  " metric=" + DATA.metric + (COLOR_KEY ? " color=" + COLOR_KEY : "");

// Deterministic starting layout on a circle, then a fixed number of
// spring/repulsion iterations. Small graphs settle well before 400 steps.
const pos = DATA.vertices.map(function (v, i) {
  const a = 2 * Math.PI * i / Math.max(V, 1);
  return { x: W / 2 + 0.35 * Math.min(W, H) * Math.cos(a),
           y: H / 2 + 0.35 * Math.min(W, H) * Math.sin(a) };
});
const k = Math.sqrt(W * H / Math.max(V, 1)) * 0.7;
for (let step = 0; step < 400; step++) {
  const heat = 0.05 * Math.min(W, H) * (1 - step / 400);
  const disp = pos.map(function () { return { x: 0, y: 0 }; });
  for (let i = 0; i < V; i++) {
    for (let j = i + 1; j < V; j++) {
      let dx = pos[i].x - pos[j].x, dy = pos[i].y - pos[j].y;
      let d2 = dx * dx + dy * dy + 0.01;
      const f = k * k / d2;
      disp[i].x += dx * f; disp[i].y += dy * f;
      disp[j].x -= dx * f; disp[j].y -= dy * f;
    }
  }
  DATA.edges.forEach(function (e) {
    let dx = pos[e.u].x - pos[e.v].x, dy = pos[e.u].y - pos[e.v].y;
    const d = Math.sqrt(dx * dx + dy * dy) + 0.01;
    const f = d / k * 0.05;
    disp[e.u].x -= dx * f; disp[e.u].y -= dy * f;
    disp[e.v].x += dx * f; disp[e.v].y += dy * f;
  });
  for (let i = 0; i < V; i++) {
    const d = Math.sqrt(disp[i].x * disp[i].x + disp[i].y * disp[i].y) + 1e-9;
    const step_len = Math.min(d, heat);
    pos[i].x = Math.min(W - 20, Math.max(20, pos[i].x + disp[i].x / d * step_len));
    pos[i].y = Math.min(H - 20, Math.max(20, pos[i].y + disp[i].y / d * step_len));
  }
}

let lo = Infinity, hi = -Infinity;
if (COLOR_KEY) {
  DATA.vertices.forEach(function (v) {
    const c = v.colors && v.colors[COLOR_KEY];
    if (typeof c === "number") { lo = Math.min(lo, c); hi = Math.max(hi, c); }
  });
}
function fill(v) {
  if (!COLOR_KEY || !v.colors || typeof v.colors[COLOR_KEY] !== "number") return "#888";
  const t = hi > lo ? (v.colors[COLOR_KEY] - lo) / (hi - lo) : 0;
  return RAMP[Math.min(RAMP.length - 1, Math.round(t * (RAMP.length - 1)))];
}

const svg = document.getElementById("view");
const NS = "http://www.w3.org/2000/svg";
DATA.edges.forEach(function (e) {
  const l = document.createElementNS(NS, "line");
  l.setAttribute("x1", pos[e.u].x); l.setAttribute("y1", pos[e.u].y);
  l.setAttribute("x2", pos[e.v].x); l.setAttribute("y2", pos[e.v].y);
  svg.appendChild(l);
});
DATA.vertices.forEach(function (v, i) {
  const c = document.createElementNS(NS, "circle");
  c.setAttribute("cx", pos[i].x);
  c.setAttribute("cy", pos[i].y);
  c.setAttribute("r", 3 + 2 * Math.sqrt(v.size));
  c.setAttribute("fill", fill(v));
  const t = document.createElementNS(NS, "title");
  t.textContent = "vertex " + v.id + " center " + v.center + " size " + v.size;
  c.appendChild(t);
  svg.appendChild(c);
});
</script>
</body>
</html>
"##;

/// Writes a degree sweep as CSV: `radius,mean_degree,rep_0,...` with one
/// row per radius and shortest round-trip float formatting.
pub fn write_sweep_csv(sweep: &DegreeSweep, path: impl AsRef<Path>) -> Result<(), IoError> {
    let mut out = String::from("radius,mean_degree");
    for rep in 0..sweep.repetitions() {
        out.push_str(&format!(",rep_{rep}"));
    }
    out.push('\n');
    for (i, &radius) in sweep.radii().iter().enumerate() {
        out.push_str(&format!("{},{}", radius, sweep.mean_degree()[i]));
        for rep in sweep.per_repetition() {
            out.push_str(&format!(",{}", rep[i]));
        }
        out.push('\n');
    }
    std::fs::write(path.as_ref(), out)?;
    Ok(())
}

/// How CSV columns may be named: by header name, or by 0-based index when
/// there is no header.
fn resolve_attribute_columns(
    names: &[String],
    header: Option<&csv::StringRecord>,
    width: usize,
) -> Result<Vec<(usize, String)>, IoError> {
    let mut resolved = Vec::with_capacity(names.len());
    for name in names {
        let index = match header {
            Some(h) => h.iter().position(|field| field == name).ok_or_else(|| {
                IoError::UnknownAttributeColumn(name.clone())
            })?,
            None => name
                .parse::<usize>()
                .map_err(|_| IoError::NamedColumnsNeedHeader(name.clone()))?,
        };
        if index >= width {
            return Err(IoError::UnknownAttributeColumn(name.clone()));
        }
        resolved.push((index, name.clone()));
    }
    Ok(resolved)
}

/// Reads a rectangular numeric table as a point cloud. Listed attribute
/// columns (header names, or 0-based indices for headerless files) become
/// named attributes; the remaining columns, in file order, become
/// coordinates. Row index equals point id.
pub fn read_points_csv(
    path: impl AsRef<Path>,
    delimiter: u8,
    has_header: bool,
    attribute_columns: &[String],
) -> Result<PointCloud<f64>, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .delimiter(delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path.as_ref())?;
    let header = if has_header {
        Some(reader.headers()?.clone())
    } else {
        None
    };

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = header.as_ref().map(csv::StringRecord::len);
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(IoError::RaggedRow {
                row,
                found: record.len(),
                expected,
            });
        }
        let mut parsed = Vec::with_capacity(record.len());
        for (col, cell) in record.iter().enumerate() {
            let value = cell.parse::<f64>().map_err(|_| IoError::BadNumber {
                row,
                col,
                value: cell.to_string(),
            })?;
            parsed.push(value);
        }
        rows.push(parsed);
    }
    if rows.is_empty() {
        return Err(IoError::EmptyFile(path.as_ref().display().to_string()));
    }

    let width = width.unwrap();
    let attributes = resolve_attribute_columns(attribute_columns, header.as_ref(), width)?;
    let attribute_indices: Vec<usize> = attributes.iter().map(|(i, _)| *i).collect();
    if attribute_indices.len() >= width {
        return Err(IoError::NoCoordinateColumns);
    }

    let coords: Vec<Vec<f64>> = rows
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(col, _)| !attribute_indices.contains(col))
                .map(|(_, &v)| v)
                .collect()
        })
        .collect();
    let mut cloud = PointCloud::from_rows(coords)?;
    for (index, name) in attributes {
        let column: Vec<f64> = rows.iter().map(|row| row[index]).collect();
        cloud = cloud.with_attribute(name, column)?;
    }
    Ok(cloud)
}

/// Reads a square distance matrix; returns the precomputed metric together
/// with an ids-only cloud of matching size. The matrix is validated for
/// symmetry, zero diagonal, and nonnegativity.
pub fn read_distance_matrix_csv(
    path: impl AsRef<Path>,
) -> Result<(Metric<f64>, PointCloud<f64>), IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path.as_ref())?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let mut parsed = Vec::with_capacity(record.len());
        for (col, cell) in record.iter().enumerate() {
            let value = cell.parse::<f64>().map_err(|_| IoError::BadNumber {
                row,
                col,
                value: cell.to_string(),
            })?;
            parsed.push(value);
        }
        rows.push(parsed);
    }
    if rows.is_empty() {
        return Err(IoError::EmptyFile(path.as_ref().display().to_string()));
    }
    let n = rows.len();
    let matrix = DistanceMatrix::new(rows)?;
    let cloud = PointCloud::ids_only(n)?;
    Ok((Metric::Precomputed(matrix), cloud))
}
