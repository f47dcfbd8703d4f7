//! Finite metric spaces, point subsets, and extended lengths.
//!
//! A [`FiniteMetricSpace`] stores its distances either as an explicit
//! symmetric matrix or derives them on the fly from point coordinates under
//! an ℓ¹/ℓ²/ℓ∞ norm. Coordinate-backed spaces satisfy the metric axioms by
//! construction; matrix-backed spaces are checked by [`FiniteMetricSpace::validate_metric`].
//!
//! Conventions used throughout the crate:
//!
//! * balls are open (`d < radius`), and no closed variant is exposed;
//! * the distance between sets is `+∞` when either set is empty;
//! * all comparisons against scale parameters are exact `<` / `<=`; the
//!   tolerance [`METRIC_TOLERANCE`] applies only inside metric validation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CoarseError, Result};

/// Index of a point inside its space.
pub type PointId = usize;

/// Slack allowed when validating metric axioms and coordinate consistency.
pub const METRIC_TOLERANCE: f64 = 1e-9;

/// Norm used to derive distances from coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Norm::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Norm::L2 => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Norm::Linf => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::L1 => write!(f, "l1"),
            Norm::L2 => write!(f, "l2"),
            Norm::Linf => write!(f, "linf"),
        }
    }
}

/// A nonnegative length extended with a distinguished infinite value.
///
/// `Infinite` compares greater than every finite value and is absorbing
/// under addition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtLength {
    Finite(f64),
    Infinite,
}

impl ExtLength {
    pub const ZERO: ExtLength = ExtLength::Finite(0.0);

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtLength::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtLength::Finite(v) => Some(*v),
            ExtLength::Infinite => None,
        }
    }

    /// `self >= threshold`, with `Infinite` counting as at least anything.
    pub fn at_least(&self, threshold: f64) -> bool {
        match self {
            ExtLength::Finite(v) => *v >= threshold,
            ExtLength::Infinite => true,
        }
    }

    /// `self <= threshold`; `Infinite` exceeds every finite threshold.
    pub fn at_most(&self, threshold: f64) -> bool {
        match self {
            ExtLength::Finite(v) => *v <= threshold,
            ExtLength::Infinite => false,
        }
    }

    pub fn min(self, other: ExtLength) -> ExtLength {
        match (self, other) {
            (ExtLength::Finite(a), ExtLength::Finite(b)) => ExtLength::Finite(a.min(b)),
            (ExtLength::Finite(a), ExtLength::Infinite) => ExtLength::Finite(a),
            (ExtLength::Infinite, b) => b,
        }
    }

    pub fn max(self, other: ExtLength) -> ExtLength {
        match (self, other) {
            (ExtLength::Finite(a), ExtLength::Finite(b)) => ExtLength::Finite(a.max(b)),
            _ => ExtLength::Infinite,
        }
    }
}

impl PartialOrd for ExtLength {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering;
        match (self, other) {
            (ExtLength::Finite(a), ExtLength::Finite(b)) => a.partial_cmp(b),
            (ExtLength::Finite(_), ExtLength::Infinite) => Some(Ordering::Less),
            (ExtLength::Infinite, ExtLength::Finite(_)) => Some(Ordering::Greater),
            (ExtLength::Infinite, ExtLength::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl std::ops::Add for ExtLength {
    type Output = ExtLength;

    fn add(self, rhs: ExtLength) -> ExtLength {
        match (self, rhs) {
            (ExtLength::Finite(a), ExtLength::Finite(b)) => ExtLength::Finite(a + b),
            _ => ExtLength::Infinite,
        }
    }
}

impl fmt::Display for ExtLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtLength::Finite(v) => write!(f, "{v}"),
            ExtLength::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtLength {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtLength::Finite(v) => serializer.serialize_f64(*v),
            ExtLength::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtLength {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        match value {
            serde_json::Value::Number(n) => n
                .as_f64()
                .map(ExtLength::Finite)
                .ok_or_else(|| D::Error::custom("length out of f64 range")),
            serde_json::Value::String(s) if s == "inf" => Ok(ExtLength::Infinite),
            other => Err(D::Error::custom(format!(
                "expected number or \"inf\", got {other}"
            ))),
        }
    }
}

/// A set of point ids, optionally labelled. Equality compares the members
/// only; the name is a display label.
#[derive(Clone, Debug, Eq, Serialize, Deserialize)]
pub struct Subset {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub name: Option<String>,
    pub members: BTreeSet<PointId>,
}

impl PartialEq for Subset {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl Subset {
    pub fn empty() -> Self {
        Subset {
            name: None,
            members: BTreeSet::new(),
        }
    }

    pub fn from_ids<I: IntoIterator<Item = PointId>>(ids: I) -> Self {
        Subset {
            name: None,
            members: ids.into_iter().collect(),
        }
    }

    pub fn named<I: IntoIterator<Item = PointId>>(name: &str, ids: I) -> Self {
        Subset {
            name: Some(name.to_string()),
            members: ids.into_iter().collect(),
        }
    }

    /// All points of a space of `n` points.
    pub fn full(n: usize) -> Self {
        Subset::from_ids(0..n)
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: PointId) -> bool {
        self.members.contains(&id)
    }

    pub fn insert(&mut self, id: PointId) {
        self.members.insert(id);
    }

    pub fn iter(&self) -> impl Iterator<Item = PointId> + '_ {
        self.members.iter().copied()
    }

    pub fn union(&self, other: &Subset) -> Subset {
        Subset::from_ids(self.members.union(&other.members).copied())
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        Subset::from_ids(self.members.difference(&other.members).copied())
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        Subset::from_ids(self.members.intersection(&other.members).copied())
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.members.is_subset(&other.members)
    }

    fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| "<unnamed>".to_string())
    }
}

#[derive(Clone, Debug)]
enum Backend {
    /// Full n×n row-major matrix.
    Matrix(Vec<f64>),
    /// Distances derived from coordinates under `norm`.
    Coords { points: Vec<Vec<f64>>, norm: Norm },
}

/// Immutable finite metric space; the universe every analysis works over.
#[derive(Clone, Debug)]
pub struct FiniteMetricSpace {
    name: String,
    n: usize,
    backend: Backend,
    labels: Option<Vec<String>>,
    interior_mark: Option<Vec<f64>>,
    subsets: BTreeMap<String, Vec<PointId>>,
}

/// One defect found by [`FiniteMetricSpace::validate_metric`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricViolation {
    NotFinite { i: PointId, j: PointId, value: f64 },
    Negative { i: PointId, j: PointId, value: f64 },
    NonzeroDiagonal { i: PointId, value: f64 },
    Asymmetric { i: PointId, j: PointId, defect: f64 },
    /// `d(a,b)` exceeds `d(a,via) + d(via,b)` by `defect`.
    Triangle {
        a: PointId,
        via: PointId,
        b: PointId,
        defect: f64,
    },
}

impl fmt::Display for MetricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricViolation::NotFinite { i, j, value } => {
                write!(f, "d({i},{j}) = {value} is not finite")
            }
            MetricViolation::Negative { i, j, value } => {
                write!(f, "d({i},{j}) = {value} is negative")
            }
            MetricViolation::NonzeroDiagonal { i, value } => {
                write!(f, "d({i},{i}) = {value} is nonzero")
            }
            MetricViolation::Asymmetric { i, j, defect } => {
                write!(f, "d({i},{j}) and d({j},{i}) differ by {defect}")
            }
            MetricViolation::Triangle { a, via, b, defect } => {
                write!(f, "triangle violation ({a},{via},{b}), defect {defect}")
            }
        }
    }
}

impl FiniteMetricSpace {
    /// Builds a space from a full row-major matrix. Shape is checked here;
    /// metric axioms are reported by [`validate_metric`](Self::validate_metric).
    pub fn from_full_matrix(name: &str, n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(CoarseError::InvalidInput(format!(
                "matrix for {n} points needs {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        Ok(FiniteMetricSpace {
            name: name.to_string(),
            n,
            backend: Backend::Matrix(entries),
            labels: None,
            interior_mark: None,
            subsets: BTreeMap::new(),
        })
    }

    /// Builds a space from the row-major lower triangle including the
    /// diagonal: rows `i = 0..n`, entries `j = 0..=i`.
    pub fn from_lower_triangle(name: &str, tri: &[f64]) -> Result<Self> {
        let mut n = 0usize;
        while n * (n + 1) / 2 < tri.len() {
            n += 1;
        }
        if n * (n + 1) / 2 != tri.len() {
            return Err(CoarseError::InvalidInput(format!(
                "lower triangle length {} is not of the form n(n+1)/2",
                tri.len()
            )));
        }
        let mut entries = vec![0.0; n * n];
        let mut idx = 0;
        for i in 0..n {
            for j in 0..=i {
                entries[i * n + j] = tri[idx];
                entries[j * n + i] = tri[idx];
                idx += 1;
            }
        }
        FiniteMetricSpace::from_full_matrix(name, n, entries)
    }

    /// Builds a coordinate-backed space; distances come from `norm` and the
    /// metric axioms hold by construction.
    pub fn from_coords(name: &str, points: Vec<Vec<f64>>, norm: Norm) -> Result<Self> {
        if let Some(first) = points.first() {
            let dim = first.len();
            if dim == 0 {
                return Err(CoarseError::InvalidInput(
                    "points must have at least one coordinate".to_string(),
                ));
            }
            for (i, p) in points.iter().enumerate() {
                if p.len() != dim {
                    return Err(CoarseError::InvalidInput(format!(
                        "point {i} has {} coordinates, expected {dim}",
                        p.len()
                    )));
                }
                if p.iter().any(|c| !c.is_finite()) {
                    return Err(CoarseError::InvalidInput(format!(
                        "point {i} has a non-finite coordinate"
                    )));
                }
            }
        }
        let n = points.len();
        Ok(FiniteMetricSpace {
            name: name.to_string(),
            n,
            backend: Backend::Coords { points, norm },
            labels: None,
            interior_mark: None,
            subsets: BTreeMap::new(),
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(CoarseError::InvalidInput(format!(
                "{} labels for {} points",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Attaches per-point interior marks: mark `k` promises that the k-ball
    /// of the point in the ideal (untruncated) space lies inside this sample.
    pub fn with_interior_marks(mut self, marks: Vec<f64>) -> Result<Self> {
        if marks.len() != self.n {
            return Err(CoarseError::InvalidInput(format!(
                "{} interior marks for {} points",
                marks.len(),
                self.n
            )));
        }
        if let Some(bad) = marks.iter().find(|m| !m.is_finite() || **m < 0.0) {
            return Err(CoarseError::InvalidInput(format!(
                "interior marks must be nonnegative, got {bad}"
            )));
        }
        self.interior_mark = Some(marks);
        Ok(self)
    }

    pub fn with_named_subset(mut self, name: &str, ids: Vec<PointId>) -> Result<Self> {
        for &id in &ids {
            if id >= self.n {
                return Err(CoarseError::SubsetOutOfRange {
                    name: name.to_string(),
                    id,
                    n: self.n,
                });
            }
        }
        let mut sorted = ids;
        sorted.sort_unstable();
        sorted.dedup();
        self.subsets.insert(name.to_string(), sorted);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Distance between two points. Panics on out-of-range ids; public
    /// entry points validate ids before reaching this.
    #[inline]
    pub fn dist(&self, i: PointId, j: PointId) -> f64 {
        debug_assert!(i < self.n && j < self.n);
        match &self.backend {
            Backend::Matrix(entries) => entries[i * self.n + j],
            Backend::Coords { points, norm } => norm.distance(&points[i], &points[j]),
        }
    }

    pub fn check_point(&self, id: PointId) -> Result<()> {
        if id < self.n {
            Ok(())
        } else {
            Err(CoarseError::UnknownPoint { id, n: self.n })
        }
    }

    pub fn check_subset(&self, subset: &Subset) -> Result<()> {
        match subset.members.iter().next_back() {
            Some(&max) if max >= self.n => Err(CoarseError::SubsetOutOfRange {
                name: subset.display_name(),
                id: max,
                n: self.n,
            }),
            _ => Ok(()),
        }
    }

    /// Coordinates, when this space is coordinate-backed.
    pub fn coords(&self) -> Option<(&[Vec<f64>], Norm)> {
        match &self.backend {
            Backend::Coords { points, norm } => Some((points.as_slice(), *norm)),
            Backend::Matrix(_) => None,
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn interior_mark(&self, id: PointId) -> Option<f64> {
        self.interior_mark.as_ref().map(|m| m[id])
    }

    pub fn interior_marks(&self) -> Option<&[f64]> {
        self.interior_mark.as_deref()
    }

    pub fn subset_names(&self) -> impl Iterator<Item = &str> {
        self.subsets.keys().map(String::as_str)
    }

    pub fn named_subsets(&self) -> &BTreeMap<String, Vec<PointId>> {
        &self.subsets
    }

    pub fn subset(&self, name: &str) -> Result<Subset> {
        self.subsets
            .get(name)
            .map(|ids| Subset::named(name, ids.iter().copied()))
            .ok_or_else(|| CoarseError::UnknownSubset(name.to_string()))
    }

    /// Checks the metric axioms within [`METRIC_TOLERANCE`] and reports every
    /// defect found; never aborts. Coordinate-backed spaces satisfy the
    /// axioms by construction, so only finiteness is re-checked there.
    /// Matrix-backed spaces get the full cubic triangle scan.
    pub fn validate_metric(&self) -> Vec<MetricViolation> {
        let mut out = Vec::new();
        match &self.backend {
            Backend::Coords { points, norm } => {
                for i in 0..self.n {
                    for j in (i + 1)..self.n {
                        let d = norm.distance(&points[i], &points[j]);
                        if !d.is_finite() {
                            out.push(MetricViolation::NotFinite { i, j, value: d });
                        }
                    }
                }
            }
            Backend::Matrix(entries) => {
                for i in 0..self.n {
                    let dii = entries[i * self.n + i];
                    if dii.abs() > METRIC_TOLERANCE {
                        out.push(MetricViolation::NonzeroDiagonal { i, value: dii });
                    }
                    for j in (i + 1)..self.n {
                        let dij = entries[i * self.n + j];
                        let dji = entries[j * self.n + i];
                        if !dij.is_finite() || !dji.is_finite() {
                            out.push(MetricViolation::NotFinite {
                                i,
                                j,
                                value: if dij.is_finite() { dji } else { dij },
                            });
                            continue;
                        }
                        if dij < -METRIC_TOLERANCE {
                            out.push(MetricViolation::Negative { i, j, value: dij });
                        }
                        if (dij - dji).abs() > METRIC_TOLERANCE {
                            out.push(MetricViolation::Asymmetric {
                                i,
                                j,
                                defect: (dij - dji).abs(),
                            });
                        }
                    }
                }
                // Cubic; fine at desk scale where matrices come from.
                for i in 0..self.n {
                    for j in 0..self.n {
                        if j == i {
                            continue;
                        }
                        let dij = entries[i * self.n + j];
                        for k in (j + 1)..self.n {
                            if k == i {
                                continue;
                            }
                            let defect =
                                entries[j * self.n + k] - dij - entries[i * self.n + k];
                            if defect > METRIC_TOLERANCE {
                                out.push(MetricViolation::Triangle {
                                    a: j,
                                    via: i,
                                    b: k,
                                    defect,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Distance from one point to a set; `Infinite` when the set is empty.
    pub fn point_to_set(&self, x: PointId, a: &Subset) -> ExtLength {
        let mut best = ExtLength::Infinite;
        for p in a.iter() {
            best = best.min(ExtLength::Finite(self.dist(x, p)));
        }
        best
    }

    /// `min { d(a, b) : a ∈ A, b ∈ B }`; `Infinite` when either set is empty.
    pub fn set_distance(&self, a: &Subset, b: &Subset) -> ExtLength {
        if a.is_empty() || b.is_empty() {
            return ExtLength::Infinite;
        }
        let mut best = f64::INFINITY;
        for p in a.iter() {
            for q in b.iter() {
                let d = self.dist(p, q);
                if d < best {
                    best = d;
                }
            }
        }
        ExtLength::Finite(best)
    }

    /// Hausdorff distance: the larger of the two directed suprema of
    /// point-to-set distances. Both sets empty gives 0, exactly one empty
    /// gives `Infinite`.
    pub fn hausdorff_distance(&self, a: &Subset, b: &Subset) -> ExtLength {
        match (a.is_empty(), b.is_empty()) {
            (true, true) => return ExtLength::ZERO,
            (true, false) | (false, true) => return ExtLength::Infinite,
            (false, false) => {}
        }
        let mut sup = 0.0f64;
        for p in a.iter() {
            let mut best = f64::INFINITY;
            for q in b.iter() {
                let d = self.dist(p, q);
                if d < best {
                    best = d;
                }
            }
            sup = sup.max(best);
        }
        for q in b.iter() {
            let mut best = f64::INFINITY;
            for p in a.iter() {
                let d = self.dist(p, q);
                if d < best {
                    best = d;
                }
            }
            sup = sup.max(best);
        }
        ExtLength::Finite(sup)
    }

    /// Open ball around a set: `{ x : d(x, A) < radius }`. Empty for an
    /// empty set or radius 0.
    pub fn ball(&self, a: &Subset, radius: f64) -> Result<Subset> {
        if !(radius >= 0.0) {
            return Err(CoarseError::InvalidScale {
                name: "radius",
                value: radius,
                reason: "must be nonnegative",
            });
        }
        self.check_subset(a)?;
        let mut out = Subset::empty();
        for x in 0..self.n {
            for p in a.iter() {
                if self.dist(x, p) < radius {
                    out.insert(x);
                    break;
                }
            }
        }
        Ok(out)
    }

    /// Max pairwise distance over a subset; 0 for empty or singleton sets.
    pub fn subset_diameter(&self, a: &Subset) -> f64 {
        let ids: Vec<PointId> = a.iter().collect();
        let mut diam = 0.0f64;
        for (idx, &p) in ids.iter().enumerate() {
            for &q in &ids[idx + 1..] {
                diam = diam.max(self.dist(p, q));
            }
        }
        diam
    }

    /// Max pairwise distance over the whole space. Quadratic.
    pub fn diameter(&self) -> f64 {
        let mut diam = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                diam = diam.max(self.dist(i, j));
            }
        }
        diam
    }

    /// Smallest nonzero distance; `Infinite` when no positive distance exists.
    pub fn min_positive_distance(&self) -> ExtLength {
        let mut best = ExtLength::Infinite;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let d = self.dist(i, j);
                if d > 0.0 {
                    best = best.min(ExtLength::Finite(d));
                }
            }
        }
        best
    }

    /// Endpoints of a 2-approximate diameter: the point farthest from id 0,
    /// then the point farthest from that. Deterministic, ties to lowest id.
    pub fn approx_diameter_pair(&self) -> Option<(PointId, PointId)> {
        if self.n == 0 {
            return None;
        }
        let farthest_from = |x: PointId| -> PointId {
            let mut best = 0usize;
            let mut best_d = -1.0f64;
            for y in 0..self.n {
                let d = self.dist(x, y);
                if d > best_d {
                    best_d = d;
                    best = y;
                }
            }
            best
        };
        let p = farthest_from(0);
        let q = farthest_from(p);
        Some((p, q))
    }

    /// Restriction to a subset with the inherited metric. Point `i` of the
    /// result is the i-th member of `keep` in ascending id order. Named
    /// subsets and interior marks are dropped; labels are carried over.
    pub fn restrict(&self, keep: &Subset) -> Result<FiniteMetricSpace> {
        self.check_subset(keep)?;
        let ids: Vec<PointId> = keep.iter().collect();
        let name = format!("{}|{}", self.name, keep.name.as_deref().unwrap_or("sub"));
        let mut sub = match &self.backend {
            Backend::Coords { points, norm } => FiniteMetricSpace::from_coords(
                &name,
                ids.iter().map(|&i| points[i].clone()).collect(),
                *norm,
            )?,
            Backend::Matrix(entries) => {
                let k = ids.len();
                let mut m = vec![0.0; k * k];
                for (a, &i) in ids.iter().enumerate() {
                    for (b, &j) in ids.iter().enumerate() {
                        m[a * k + b] = entries[i * self.n + j];
                    }
                }
                FiniteMetricSpace::from_full_matrix(&name, k, m)?
            }
        };
        if let Some(labels) = &self.labels {
            sub = sub.with_labels(ids.iter().map(|&i| labels[i].clone()).collect())?;
        }
        Ok(sub)
    }
}
