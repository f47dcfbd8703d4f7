//! Cover-based and recursive dimension estimation, with re-checkable
//! certificates.
//!
//! None of the true asymptotic invariants is computable from one finite
//! sample, so every estimator here is an explicit upper-bound heuristic:
//! the cover estimator reports the best multiplicity it achieved over a
//! fixed family of candidate covers, and the recursive estimators report
//! `1 + max` over the *tested* pairs of the best verified cut or separator
//! they found. Exhausted recursion budgets are reported as a distinct
//! status, never converted into a number. Every certificate can be replayed
//! by [`verify_certificate`].

use serde::Serialize;

use crate::chain::ChainGraph;
use crate::cuts::{
    find_min_cut, reachable_partition, verify_cut, verify_separator, zero_dim_partition,
    CutReport, SeparatorReport,
};
use crate::error::{CoarseError, Result};
use crate::metric::{FiniteMetricSpace, PointId, Subset};
use crate::scale::{disjoint_at_scale, is_bounded_at, ScaleParams};

/// A family of subsets with a uniform diameter bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cover {
    pub elements: Vec<Subset>,
    pub diameter_bound: f64,
}

impl Cover {
    /// Checks the cover invariants: elements within range, union equal to
    /// the whole space, every element within the diameter bound.
    pub fn validate(&self, space: &FiniteMetricSpace) -> Result<()> {
        let mut covered = vec![false; space.len()];
        for (idx, element) in self.elements.iter().enumerate() {
            space.check_subset(element)?;
            let diam = space.subset_diameter(element);
            if diam > self.diameter_bound {
                return Err(CoarseError::InvalidCover(format!(
                    "element {idx} has diameter {diam}, bound is {}",
                    self.diameter_bound
                )));
            }
            for x in element.iter() {
                covered[x] = true;
            }
        }
        if let Some(missing) = covered.iter().position(|&c| !c) {
            return Err(CoarseError::InvalidCover(format!(
                "point {missing} is not covered"
            )));
        }
        Ok(())
    }
}

/// Largest number of cover elements any open r-ball around a point meets.
pub fn cover_multiplicity(space: &FiniteMetricSpace, cover: &Cover, r: f64) -> Result<usize> {
    cover.validate(space)?;
    if !(r >= 0.0) {
        return Err(CoarseError::InvalidScale {
            name: "r",
            value: r,
            reason: "must be nonnegative",
        });
    }
    let mut worst = 0usize;
    for x in 0..space.len() {
        let mut hits = 0usize;
        for element in &cover.elements {
            if element.iter().any(|u| space.dist(x, u) < r) {
                hits += 1;
            }
        }
        worst = worst.max(hits);
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    Asdim,
    Asdg,
    Lsind,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EstimateOutcome {
    Value { estimate: i64 },
    /// The recursion ran out of budget or candidates; explicitly not a
    /// number claim.
    DepthExhausted { detail: String },
}

impl EstimateOutcome {
    pub fn value(&self) -> Option<i64> {
        match self {
            EstimateOutcome::Value { estimate } => Some(*estimate),
            EstimateOutcome::DepthExhausted { .. } => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "via", rename_all = "snake_case")]
pub enum CandidateWitness {
    Cut {
        report: CutReport,
    },
    Separator {
        x1: Subset,
        x2: Subset,
        report: SeparatorReport,
    },
}

/// Evidence for one tested pair: the chosen cut, the verification report
/// that admitted it, and the child certificate for the cut as a subspace.
#[derive(Clone, Debug, Serialize)]
pub struct PairCertificate {
    pub set_a: Subset,
    pub set_b: Subset,
    pub cut: Subset,
    pub witness: CandidateWitness,
    pub child: Box<DimensionCertificate>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// The space sits inside the boundedness ball; estimate -1.
    BoundedSpace { params: ScaleParams },
    /// A cover achieving the reported multiplicity at the reported scale.
    CoverWitness {
        scale_r: f64,
        diameter_bound: f64,
        multiplicity: usize,
        cover: Cover,
    },
    /// Per-pair cut/separator evidence with child certificates.
    Recursion {
        params: ScaleParams,
        pairs: Vec<PairCertificate>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionCertificate {
    pub kind: EstimateKind,
    pub outcome: EstimateOutcome,
    /// Recursive estimates cover only the tested pairs; a true invariant
    /// would quantify over all pairs.
    pub pair_limited: bool,
    pub evidence: Evidence,
}

// ---------------------------------------------------------------------------
// Cover-based estimation
// ---------------------------------------------------------------------------

/// Cover by chain components at scale `r`, valid only when every component
/// respects the diameter bound.
fn component_cover(space: &FiniteMetricSpace, r: f64, bound: f64) -> Option<Cover> {
    let graph = ChainGraph::build(space, r).ok()?;
    let labels = graph.component_labels();
    let count = labels.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut elements = vec![Subset::empty(); count];
    for (id, &label) in labels.iter().enumerate() {
        elements[label as usize].insert(id);
    }
    for element in &elements {
        if space.subset_diameter(element) > bound {
            return None;
        }
    }
    Some(Cover {
        elements,
        diameter_bound: bound,
    })
}

/// Greedy net cover: centers by farthest-point traversal from point 0 until
/// everything lies within `bound / 2` of a center, then each point joins its
/// nearest center (ties to the earliest center).
fn greedy_net_cover(space: &FiniteMetricSpace, bound: f64) -> Cover {
    let n = space.len();
    if n == 0 {
        return Cover {
            elements: Vec::new(),
            diameter_bound: bound,
        };
    }
    let mut centers = vec![0usize];
    let mut min_dist: Vec<f64> = (0..n).map(|x| space.dist(x, 0)).collect();
    loop {
        let mut far = 0usize;
        let mut far_d = -1.0f64;
        for x in 0..n {
            if min_dist[x] > far_d {
                far_d = min_dist[x];
                far = x;
            }
        }
        if far_d <= bound / 2.0 {
            break;
        }
        centers.push(far);
        for x in 0..n {
            min_dist[x] = min_dist[x].min(space.dist(x, far));
        }
    }
    let mut elements = vec![Subset::empty(); centers.len()];
    for x in 0..n {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (idx, &c) in centers.iter().enumerate() {
            let d = space.dist(x, c);
            if d < best_d {
                best_d = d;
                best = idx;
            }
        }
        elements[best].insert(x);
    }
    elements.retain(|e| !e.is_empty());
    Cover {
        elements,
        diameter_bound: bound,
    }
}

/// Axis-aligned brick cover for coordinate spaces: boxes whose side keeps
/// the diameter within the bound, with alternating half-side offsets along
/// the first axis per row parity.
fn brick_cover(space: &FiniteMetricSpace, bound: f64) -> Option<Cover> {
    let (points, norm) = space.coords()?;
    if points.is_empty() {
        return Some(Cover {
            elements: Vec::new(),
            diameter_bound: bound,
        });
    }
    let dim = points[0].len();
    let side = match norm {
        crate::metric::Norm::L1 => bound / dim as f64,
        crate::metric::Norm::L2 => bound / (dim as f64).sqrt(),
        crate::metric::Norm::Linf => bound,
    };
    if !(side > 0.0) {
        return None;
    }
    let mins: Vec<f64> = (0..dim)
        .map(|k| points.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min))
        .collect();
    let mut cells: std::collections::BTreeMap<Vec<i64>, Subset> = std::collections::BTreeMap::new();
    for (id, p) in points.iter().enumerate() {
        let mut key = vec![0i64; dim];
        let mut parity = 0i64;
        for k in 1..dim {
            let idx = ((p[k] - mins[k]) / side).floor() as i64;
            key[k] = idx;
            parity += idx;
        }
        let shift = if parity.rem_euclid(2) == 1 { side / 2.0 } else { 0.0 };
        key[0] = ((p[0] - mins[0] - shift) / side).floor() as i64;
        cells.entry(key).or_insert_with(Subset::empty).insert(id);
    }
    Some(Cover {
        elements: cells.into_values().collect(),
        diameter_bound: bound,
    })
}

/// Builds candidate covers with diameter at most `diameter_bound` and
/// returns the one of least verified r-multiplicity as an upper-bound
/// witness: the estimate is `multiplicity - 1`, and the true invariant may
/// be lower still.
pub fn estimate_asdim(
    space: &FiniteMetricSpace,
    r: f64,
    diameter_bound: f64,
) -> Result<DimensionCertificate> {
    if !(r > 0.0) {
        return Err(CoarseError::InvalidScale {
            name: "r",
            value: r,
            reason: "must be positive",
        });
    }
    if !(diameter_bound > 0.0) {
        return Err(CoarseError::InvalidScale {
            name: "diameter_bound",
            value: diameter_bound,
            reason: "must be positive",
        });
    }
    let mut candidates: Vec<Cover> = Vec::new();
    if let Some(cover) = component_cover(space, r, diameter_bound) {
        candidates.push(cover);
    }
    candidates.push(greedy_net_cover(space, diameter_bound));
    if let Some(cover) = brick_cover(space, diameter_bound) {
        candidates.push(cover);
    }
    let mut best: Option<(usize, Cover)> = None;
    for cover in candidates {
        if cover.validate(space).is_err() {
            continue;
        }
        let multiplicity = cover_multiplicity(space, &cover, r)?;
        if best.as_ref().map_or(true, |(m, _)| multiplicity < *m) {
            best = Some((multiplicity, cover));
        }
    }
    let (multiplicity, cover) =
        best.expect("the greedy net cover is always valid");
    Ok(DimensionCertificate {
        kind: EstimateKind::Asdim,
        outcome: EstimateOutcome::Value {
            estimate: multiplicity as i64 - 1,
        },
        pair_limited: false,
        evidence: Evidence::CoverWitness {
            scale_r: r,
            diameter_bound,
            multiplicity,
            cover,
        },
    })
}

// ---------------------------------------------------------------------------
// Recursive estimation
// ---------------------------------------------------------------------------

/// Knobs for the recursive estimators.
#[derive(Clone, Debug)]
pub struct RecursionOptions {
    /// Remaining recursion budget; certificates never exceed this depth.
    pub depth: usize,
    /// Extra caller-supplied cut candidates, tried after the searched ones.
    pub user_cuts: Vec<Subset>,
    /// Scale ceiling for the expanding-component partition candidate.
    pub zero_dim_i_max: usize,
}

impl RecursionOptions {
    pub fn with_depth(depth: usize) -> Self {
        RecursionOptions {
            depth,
            user_cuts: Vec::new(),
            zero_dim_i_max: 6,
        }
    }
}

/// Window parameters for a cut treated as a subspace: the window grows to
/// the subspace diameter plus one (so the whole sample is inside it) and the
/// boundedness radius is a quarter of that; chain scales carry over.
pub fn subspace_params(sub: &FiniteMetricSpace, parent: &ScaleParams) -> ScaleParams {
    let window = sub.diameter() + 1.0;
    ScaleParams {
        r: parent.r,
        s: parent.s,
        m: parent.m,
        basepoint: 0,
        window_radius: window,
        bounded_rho: window / 4.0,
        disjoint_gap: parent.disjoint_gap,
    }
}

/// Deterministic far pair when the caller supplies none: the endpoints of a
/// 2-approximate diameter, each grown to a tenth-of-window ball.
pub fn default_pairs(space: &FiniteMetricSpace, params: &ScaleParams) -> Vec<(Subset, Subset)> {
    let Some((p, q)) = space.approx_diameter_pair() else {
        return Vec::new();
    };
    if p == q {
        return Vec::new();
    }
    let radius = params.window_radius / 10.0;
    let grow = |x: PointId| {
        space
            .ball(&Subset::from_ids([x]), radius)
            .unwrap_or_else(|_| Subset::from_ids([x]))
    };
    let mut a = grow(p);
    let mut b = grow(q);
    if a.is_empty() {
        a = Subset::from_ids([p]);
    }
    if b.is_empty() {
        b = Subset::from_ids([q]);
    }
    if !a.intersection(&b).is_empty() {
        return Vec::new();
    }
    if !disjoint_at_scale(space, &a, &b, params) {
        return Vec::new();
    }
    vec![(a, b)]
}

fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 {
        Ok(())
    } else {
        Err(CoarseError::InvalidScale {
            name,
            value,
            reason: "must be positive",
        })
    }
}

/// Recursive estimator driven by cut verification. An empty pair list asks
/// for the deterministic far pair from [`default_pairs`].
pub fn estimate_asdg(
    space: &FiniteMetricSpace,
    pairs: &[(Subset, Subset)],
    params: &ScaleParams,
    opts: &RecursionOptions,
) -> Result<DimensionCertificate> {
    validate_recursion_inputs(space, pairs, params, opts)?;
    Ok(estimate_recursive(
        space,
        Some(pairs),
        params,
        opts,
        EstimateKind::Asdg,
        opts.depth,
    ))
}

/// Recursive estimator driven by separator verification, with partitions
/// from chain reachability and from the expanding-component construction.
pub fn estimate_lsind(
    space: &FiniteMetricSpace,
    pairs: &[(Subset, Subset)],
    params: &ScaleParams,
    opts: &RecursionOptions,
) -> Result<DimensionCertificate> {
    validate_recursion_inputs(space, pairs, params, opts)?;
    Ok(estimate_recursive(
        space,
        Some(pairs),
        params,
        opts,
        EstimateKind::Lsind,
        opts.depth,
    ))
}

fn validate_recursion_inputs(
    space: &FiniteMetricSpace,
    pairs: &[(Subset, Subset)],
    params: &ScaleParams,
    opts: &RecursionOptions,
) -> Result<()> {
    require_positive("r", params.r)?;
    require_positive("s", params.s)?;
    if !space.is_empty() {
        space.check_point(params.basepoint)?;
    }
    if opts.zero_dim_i_max < 1 {
        return Err(CoarseError::InvalidInput(
            "zero_dim_i_max must be at least 1".to_string(),
        ));
    }
    for (idx, (a, b)) in pairs.iter().enumerate() {
        space.check_subset(a)?;
        space.check_subset(b)?;
        if !disjoint_at_scale(space, a, b, params) {
            return Err(CoarseError::Precondition(format!(
                "pair {idx} is not disjoint at the window (gap below {})",
                params.disjoint_gap
            )));
        }
    }
    Ok(())
}

fn estimate_recursive(
    space: &FiniteMetricSpace,
    given_pairs: Option<&[(Subset, Subset)]>,
    params: &ScaleParams,
    opts: &RecursionOptions,
    kind: EstimateKind,
    depth: usize,
) -> DimensionCertificate {
    let full = Subset::full(space.len());
    if is_bounded_at(space, &full, params) {
        return DimensionCertificate {
            kind,
            outcome: EstimateOutcome::Value { estimate: -1 },
            pair_limited: true,
            evidence: Evidence::BoundedSpace { params: *params },
        };
    }

    let pairs: Vec<(Subset, Subset)> = match given_pairs {
        Some(p) if !p.is_empty() => p.to_vec(),
        _ => default_pairs(space, params),
    };
    let exhausted = |detail: String, resolved: Vec<PairCertificate>| DimensionCertificate {
        kind,
        outcome: EstimateOutcome::DepthExhausted { detail },
        pair_limited: true,
        evidence: Evidence::Recursion {
            params: *params,
            pairs: resolved,
        },
    };
    if pairs.is_empty() {
        return exhausted(
            "unbounded space with no admissible test pair".to_string(),
            Vec::new(),
        );
    }
    if depth == 0 {
        return exhausted("recursion budget exhausted".to_string(), Vec::new());
    }

    let mut resolved = Vec::new();
    let mut worst_child = -1i64;
    for (pair_idx, (a, b)) in pairs.iter().enumerate() {
        let mut candidates: Vec<Subset> = Vec::new();
        if let Ok(cut) = find_min_cut(space, a, b, params.r) {
            if !cut.is_empty() {
                if let Ok(thickened) = space.ball(&cut, params.s) {
                    candidates.push(thickened.with_name("MIN_CUT_THICKENED"));
                }
            }
            candidates.insert(0, cut);
        }
        candidates.extend(opts.user_cuts.iter().cloned());
        candidates.dedup_by(|x, y| x.members == y.members);

        let mut best: Option<(i64, PairCertificate)> = None;
        for cand in candidates {
            let witness = match kind {
                EstimateKind::Asdg => match verify_cut(space, a, b, &cand, params) {
                    Ok(report) if report.pass => CandidateWitness::Cut { report },
                    _ => continue,
                },
                EstimateKind::Lsind => {
                    match separator_witness(space, a, b, &cand, params, opts) {
                        Some(w) => w,
                        None => continue,
                    }
                }
                EstimateKind::Asdim => unreachable!("cover estimation does not recurse"),
            };
            let Ok(sub) = space.restrict(&cand) else {
                continue;
            };
            let child_params = subspace_params(&sub, params);
            let child = estimate_recursive(&sub, None, &child_params, opts, kind, depth - 1);
            let Some(child_value) = child.outcome.value() else {
                continue;
            };
            if best.as_ref().map_or(true, |(v, _)| child_value < *v) {
                best = Some((
                    child_value,
                    PairCertificate {
                        set_a: a.clone(),
                        set_b: b.clone(),
                        cut: cand,
                        witness,
                        child: Box::new(child),
                    },
                ));
            }
        }
        match best {
            Some((value, cert)) => {
                worst_child = worst_child.max(value);
                resolved.push(cert);
            }
            None => {
                return exhausted(
                    format!("no verified candidate with a resolved child for pair {pair_idx}"),
                    resolved,
                );
            }
        }
    }

    DimensionCertificate {
        kind,
        outcome: EstimateOutcome::Value {
            estimate: 1 + worst_child,
        },
        pair_limited: true,
        evidence: Evidence::Recursion {
            params: *params,
            pairs: resolved,
        },
    }
}

fn separator_witness(
    space: &FiniteMetricSpace,
    a: &Subset,
    b: &Subset,
    cand: &Subset,
    params: &ScaleParams,
    opts: &RecursionOptions,
) -> Option<CandidateWitness> {
    let mut partitions: Vec<(Subset, Subset)> = Vec::new();
    if let Ok(p) = reachable_partition(space, a, cand, params) {
        partitions.push(p);
    }
    if let Ok(p) = zero_dim_partition(space, a, b, opts.zero_dim_i_max) {
        partitions.push(p);
    }
    for (x1, x2) in partitions {
        if let Ok(report) = verify_separator(space, a, b, cand, &x1, &x2, params, None) {
            if report.pass {
                return Some(CandidateWitness::Separator { x1, x2, report });
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Component growth
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct GrowthSample {
    pub r: f64,
    pub component_size: usize,
    pub diameter: f64,
}

/// Diameter of the chain component of `x` at each scale in `r_list`.
/// A plateau over growing scales is the desk-scale signal that the
/// component stays bounded.
pub fn component_growth(
    space: &FiniteMetricSpace,
    x: PointId,
    r_list: &[f64],
) -> Result<Vec<GrowthSample>> {
    space.check_point(x)?;
    if r_list.is_empty() {
        return Err(CoarseError::InvalidInput("empty scale list".to_string()));
    }
    for w in r_list.windows(2) {
        if !(w[0] < w[1]) {
            return Err(CoarseError::InvalidInput(
                "scales must be strictly increasing".to_string(),
            ));
        }
    }
    r_list
        .iter()
        .map(|&r| {
            let component = ChainGraph::build(space, r)?.component_of(x);
            Ok(GrowthSample {
                r,
                component_size: component.len(),
                diameter: space.subset_diameter(&component),
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Certificate replay
// ---------------------------------------------------------------------------

/// Recomputes every report a certificate relies on and checks it reproduces
/// the recorded numbers exactly.
pub fn verify_certificate(
    space: &FiniteMetricSpace,
    cert: &DimensionCertificate,
) -> std::result::Result<(), String> {
    match &cert.evidence {
        Evidence::BoundedSpace { params } => {
            if !is_bounded_at(space, &Subset::full(space.len()), params) {
                return Err("space is not bounded at the recorded window".to_string());
            }
            if cert.outcome.value() != Some(-1) {
                return Err("bounded evidence must carry estimate -1".to_string());
            }
            Ok(())
        }
        Evidence::CoverWitness {
            scale_r,
            multiplicity,
            cover,
            ..
        } => {
            cover.validate(space).map_err(|e| e.to_string())?;
            let recomputed =
                cover_multiplicity(space, cover, *scale_r).map_err(|e| e.to_string())?;
            if recomputed != *multiplicity {
                return Err(format!(
                    "recorded multiplicity {multiplicity}, recomputed {recomputed}"
                ));
            }
            if cert.outcome.value() != Some(*multiplicity as i64 - 1) {
                return Err("estimate does not match multiplicity - 1".to_string());
            }
            Ok(())
        }
        Evidence::Recursion { params, pairs } => {
            let mut worst_child = -1i64;
            for (idx, pair) in pairs.iter().enumerate() {
                match &pair.witness {
                    CandidateWitness::Cut { report } => {
                        let recomputed =
                            verify_cut(space, &pair.set_a, &pair.set_b, &pair.cut, params)
                                .map_err(|e| e.to_string())?;
                        if recomputed != *report {
                            return Err(format!("pair {idx}: cut report does not replay"));
                        }
                        if !recomputed.pass {
                            return Err(format!("pair {idx}: recorded cut does not pass"));
                        }
                    }
                    CandidateWitness::Separator { x1, x2, report } => {
                        let recomputed = verify_separator(
                            space,
                            &pair.set_a,
                            &pair.set_b,
                            &pair.cut,
                            x1,
                            x2,
                            params,
                            Some(report.threshold_t),
                        )
                        .map_err(|e| e.to_string())?;
                        if recomputed != *report {
                            return Err(format!("pair {idx}: separator report does not replay"));
                        }
                        if !recomputed.pass {
                            return Err(format!("pair {idx}: recorded separator does not pass"));
                        }
                    }
                }
                let sub = space.restrict(&pair.cut).map_err(|e| e.to_string())?;
                verify_certificate(&sub, &pair.child)?;
                match pair.child.outcome.value() {
                    Some(v) => worst_child = worst_child.max(v),
                    None => {
                        if cert.outcome.value().is_some() {
                            return Err(format!(
                                "pair {idx}: numeric estimate built on an exhausted child"
                            ));
                        }
                    }
                }
            }
            if let Some(v) = cert.outcome.value() {
                if pairs.is_empty() {
                    return Err("numeric recursive estimate without pair evidence".to_string());
                }
                if v != 1 + worst_child {
                    return Err(format!(
                        "estimate {v} does not equal 1 + max child ({})",
                        1 + worst_child
                    ));
                }
            }
            Ok(())
        }
    }
}
