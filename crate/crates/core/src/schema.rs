//! The shared on-disk space format.
//!
//! JSON schema: `{ "name", "metric": "matrix"|"l1"|"l2"|"linf", "matrix"?,
//! "points"?, "subsets"?, "interior"?, "labels"? }`. Matrix spaces store the
//! row-major lower triangle including the diagonal; coordinate spaces store
//! the point list. Distances survive a JSON round trip bit-exactly.
//!
//! The CSV loader reads a square distance matrix with an optional header
//! row and produces a matrix-backed space.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{CoarseError, Result};
use crate::metric::{FiniteMetricSpace, Norm, PointId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricTag {
    Matrix,
    L1,
    L2,
    Linf,
}

impl MetricTag {
    fn norm(self) -> Option<Norm> {
        match self {
            MetricTag::Matrix => None,
            MetricTag::L1 => Some(Norm::L1),
            MetricTag::L2 => Some(Norm::L2),
            MetricTag::Linf => Some(Norm::Linf),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceDocument {
    pub name: String,
    pub metric: MetricTag,
    /// Row-major lower triangle including the diagonal; present iff the
    /// metric tag is `matrix`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub matrix: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub subsets: Option<BTreeMap<String, Vec<PointId>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub interior: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub labels: Option<Vec<String>>,
}

pub fn space_to_document(space: &FiniteMetricSpace) -> SpaceDocument {
    let (metric, matrix, points) = match space.coords() {
        Some((pts, norm)) => {
            let tag = match norm {
                Norm::L1 => MetricTag::L1,
                Norm::L2 => MetricTag::L2,
                Norm::Linf => MetricTag::Linf,
            };
            (tag, None, Some(pts.to_vec()))
        }
        None => {
            let n = space.len();
            let mut tri = Vec::with_capacity(n * (n + 1) / 2);
            for i in 0..n {
                for j in 0..=i {
                    tri.push(space.dist(i, j));
                }
            }
            (MetricTag::Matrix, Some(tri), None)
        }
    };
    let subsets = space.named_subsets();
    SpaceDocument {
        name: space.name().to_string(),
        metric,
        matrix,
        points,
        subsets: if subsets.is_empty() {
            None
        } else {
            Some(subsets.clone())
        },
        interior: space.interior_marks().map(|m| m.to_vec()),
        labels: space.labels().map(|l| l.to_vec()),
    }
}

pub fn document_to_space(doc: SpaceDocument) -> Result<FiniteMetricSpace> {
    let mut space = match (doc.metric.norm(), doc.matrix, doc.points) {
        (None, Some(tri), _) => FiniteMetricSpace::from_lower_triangle(&doc.name, &tri)?,
        (None, None, _) => {
            return Err(CoarseError::Schema(
                "metric \"matrix\" requires a \"matrix\" field".to_string(),
            ))
        }
        (Some(norm), _, Some(points)) => FiniteMetricSpace::from_coords(&doc.name, points, norm)?,
        (Some(_), _, None) => {
            return Err(CoarseError::Schema(
                "coordinate metrics require a \"points\" field".to_string(),
            ))
        }
    };
    if let Some(labels) = doc.labels {
        space = space.with_labels(labels)?;
    }
    if let Some(interior) = doc.interior {
        space = space.with_interior_marks(interior)?;
    }
    if let Some(subsets) = doc.subsets {
        for (name, ids) in subsets {
            space = space.with_named_subset(&name, ids)?;
        }
    }
    Ok(space)
}

pub fn space_to_json_string(space: &FiniteMetricSpace) -> String {
    let doc = space_to_document(space);
    let mut out = serde_json::to_string_pretty(&doc).expect("space documents always serialize");
    out.push('\n');
    out
}

pub fn space_from_json_str(text: &str) -> Result<FiniteMetricSpace> {
    let doc: SpaceDocument =
        serde_json::from_str(text).map_err(|e| CoarseError::Schema(e.to_string()))?;
    document_to_space(doc)
}

/// Parses a square distance matrix from CSV text. A first row containing
/// any non-numeric cell is treated as a header and skipped.
pub fn space_from_csv_str(text: &str, name: &str) -> Result<FiniteMetricSpace> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .peekable();
    if let Some(first) = lines.peek() {
        let header = first
            .split(',')
            .any(|cell| cell.trim().parse::<f64>().is_err());
        if header {
            lines.next();
        }
    }
    for (line_no, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|_| {
                    CoarseError::Schema(format!(
                        "row {line_no}: cell {:?} is not a number",
                        cell.trim()
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    for (idx, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(CoarseError::Schema(format!(
                "matrix is not square: row {idx} has {} cells, expected {n}",
                row.len()
            )));
        }
    }
    let entries: Vec<f64> = rows.into_iter().flatten().collect();
    FiniteMetricSpace::from_full_matrix(name, n, entries)
}
