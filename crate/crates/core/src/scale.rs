//! Scale-windowed resemblance: alikeness, splitting, gap profiles,
//! disjointness, boundedness, and coarse-map control.
//!
//! On a finite sample there is no "at infinity", so every asymptotic
//! quantifier is replaced by an explicit, auditable window:
//!
//! * two sets are *alike at scale m* when their Hausdorff distance is `<= m`;
//! * a set is *bounded* when it sits inside the open `bounded_rho`-ball
//!   around the basepoint;
//! * two sets are *disjoint at scale* when, after deleting the open
//!   `window_radius`-ball around the basepoint, the gap between what is left
//!   is at least `disjoint_gap` (an emptied side counts as infinitely far).

use serde::{Deserialize, Serialize};

use crate::error::{CoarseError, Result};
use crate::metric::{ExtLength, FiniteMetricSpace, PointId, Subset};

/// The window tuple replacing the asymptotic quantifiers.
///
/// `r` is the chain scale, `s` the thickening scale, `m` the alikeness scale.
/// `window_radius` truncates around `basepoint` for disjointness checks,
/// `bounded_rho` is the boundedness radius, and `disjoint_gap` the gap that
/// certifies disjointness at this window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleParams {
    pub r: f64,
    pub s: f64,
    pub m: f64,
    pub basepoint: PointId,
    pub window_radius: f64,
    pub bounded_rho: f64,
    pub disjoint_gap: f64,
}

impl ScaleParams {
    /// Builds params with `bounded_rho` defaulted to a quarter of the window.
    pub fn new(
        r: f64,
        s: f64,
        m: f64,
        basepoint: PointId,
        window_radius: f64,
        disjoint_gap: f64,
    ) -> Result<Self> {
        ScaleParams {
            r,
            s,
            m,
            basepoint,
            window_radius,
            bounded_rho: window_radius / 4.0,
            disjoint_gap,
        }
        .validated()
    }

    pub fn with_bounded_rho(mut self, bounded_rho: f64) -> Result<Self> {
        self.bounded_rho = bounded_rho;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let nonneg: [(&'static str, f64); 5] = [
            ("r", self.r),
            ("s", self.s),
            ("m", self.m),
            ("window_radius", self.window_radius),
            ("bounded_rho", self.bounded_rho),
        ];
        for (name, value) in nonneg {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(CoarseError::InvalidScale {
                    name,
                    value,
                    reason: "must be finite and nonnegative",
                });
            }
        }
        if self.bounded_rho > self.window_radius {
            return Err(CoarseError::InvalidScale {
                name: "bounded_rho",
                value: self.bounded_rho,
                reason: "must not exceed window_radius",
            });
        }
        if !(self.disjoint_gap > 0.0) {
            return Err(CoarseError::InvalidScale {
                name: "disjoint_gap",
                value: self.disjoint_gap,
                reason: "must be positive",
            });
        }
        Ok(self)
    }
}

/// Gap between two sets after truncating progressively larger balls around a
/// basepoint. Gaps are nondecreasing in the radius and, once a side empties,
/// stay infinite.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapProfile {
    pub basepoint: PointId,
    pub radii: Vec<f64>,
    pub gaps: Vec<ExtLength>,
}

/// `true` when the Hausdorff distance is at most `m`. Both sets empty is
/// alike at every scale; exactly one empty is alike at none.
pub fn alike_at_scale(space: &FiniteMetricSpace, a: &Subset, b: &Subset, m: f64) -> bool {
    space.hausdorff_distance(a, b).at_most(m)
}

/// Splits `a` along `b1`/`b2`: `a_i = { x ∈ a : d(x, b_i) <= m }`.
///
/// Requires `a` alike `b1 ∪ b2` at scale `m` and both parts nonempty; the
/// result then covers `a`, each part is nonempty, and each part is alike its
/// `b_i` at scale `m`.
pub fn split_alike(
    space: &FiniteMetricSpace,
    a: &Subset,
    b1: &Subset,
    b2: &Subset,
    m: f64,
) -> Result<(Subset, Subset)> {
    space.check_subset(a)?;
    space.check_subset(b1)?;
    space.check_subset(b2)?;
    if b1.is_empty() || b2.is_empty() {
        return Err(CoarseError::Precondition(format!(
            "split requires nonempty parts; b1 has {} members, b2 has {}",
            b1.len(),
            b2.len()
        )));
    }
    let union = b1.union(b2);
    if !alike_at_scale(space, a, &union, m) {
        return Err(CoarseError::Precondition(format!(
            "a is not alike b1 ∪ b2 at scale {m} (Hausdorff distance {})",
            space.hausdorff_distance(a, &union)
        )));
    }
    let part = |b: &Subset| {
        Subset::from_ids(a.iter().filter(|&x| space.point_to_set(x, b).at_most(m)))
    };
    Ok((part(b1), part(b2)))
}

/// Gap profile of `a` and `b` along strictly increasing truncation radii.
pub fn gap_profile(
    space: &FiniteMetricSpace,
    a: &Subset,
    b: &Subset,
    basepoint: PointId,
    radii: &[f64],
) -> Result<GapProfile> {
    space.check_point(basepoint)?;
    space.check_subset(a)?;
    space.check_subset(b)?;
    if radii.is_empty() {
        return Err(CoarseError::InvalidInput("empty radius list".to_string()));
    }
    for w in radii.windows(2) {
        if !(w[0] < w[1]) {
            return Err(CoarseError::InvalidInput(format!(
                "radii must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    if !(radii[0] >= 0.0) {
        return Err(CoarseError::InvalidInput(format!(
            "radii must be nonnegative, got {}",
            radii[0]
        )));
    }
    let gaps = radii
        .iter()
        .map(|&rho| Ok(truncated_gap(space, a, b, basepoint, rho)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GapProfile {
        basepoint,
        radii: radii.to_vec(),
        gaps,
    })
}

fn truncated_gap(
    space: &FiniteMetricSpace,
    a: &Subset,
    b: &Subset,
    basepoint: PointId,
    radius: f64,
) -> ExtLength {
    let keep = |s: &Subset| Subset::from_ids(s.iter().filter(|&x| space.dist(x, basepoint) >= radius));
    space.set_distance(&keep(a), &keep(b))
}

/// Window surrogate for asymptotic disjointness: after truncating the window
/// ball around the basepoint, the remaining gap reaches `disjoint_gap`.
/// The basepoint must be a valid point id whenever a set is nonempty; the
/// fallible entry points validate this before calling in.
pub fn disjoint_at_scale(
    space: &FiniteMetricSpace,
    a: &Subset,
    b: &Subset,
    params: &ScaleParams,
) -> bool {
    truncated_gap(space, a, b, params.basepoint, params.window_radius).at_least(params.disjoint_gap)
}

/// Whether `a` sits inside the open boundedness ball. The empty set is
/// bounded.
pub fn is_bounded_at(space: &FiniteMetricSpace, a: &Subset, params: &ScaleParams) -> bool {
    a.iter()
        .all(|x| space.dist(x, params.basepoint) < params.bounded_rho)
}

#[derive(Clone, Debug, Serialize)]
pub struct ControlEntry {
    pub r: f64,
    /// `max { d'(f(x), f(y)) : d(x, y) < r }`; 0 when no pair qualifies.
    pub s: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ControlProfile {
    pub entries: Vec<ControlEntry>,
    /// Radius used for the properness scan.
    pub properness_rho: f64,
    /// Max diameter of the preimage of any `properness_rho`-ball in the
    /// target; small values mean the map does not collapse far points.
    pub max_preimage_diameter: f64,
}

/// Control profile of a total map between spaces: for each `r`, the tightest
/// `s(r)` such that pairs closer than `r` land closer than... precisely, the
/// supremum of image distances over source pairs at distance `< r`, plus a
/// properness report.
pub fn coarse_control_profile(
    source: &FiniteMetricSpace,
    target: &FiniteMetricSpace,
    images: &[PointId],
    radii: &[f64],
    properness_rho: f64,
) -> Result<ControlProfile> {
    if images.len() != source.len() {
        return Err(CoarseError::InvalidInput(format!(
            "map assigns {} images to {} source points",
            images.len(),
            source.len()
        )));
    }
    for &y in images {
        target.check_point(y)?;
    }
    if !(properness_rho >= 0.0) {
        return Err(CoarseError::InvalidScale {
            name: "properness_rho",
            value: properness_rho,
            reason: "must be nonnegative",
        });
    }
    let n = source.len();
    let mut entries = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut sup = 0.0f64;
        for x in 0..n {
            for y in (x + 1)..n {
                if source.dist(x, y) < r {
                    sup = sup.max(target.dist(images[x], images[y]));
                }
            }
        }
        entries.push(ControlEntry { r, s: sup });
    }
    let mut max_preimage = 0.0f64;
    for t in 0..target.len() {
        let preimage: Vec<PointId> = (0..n)
            .filter(|&x| target.dist(images[x], t) < properness_rho)
            .collect();
        for (idx, &p) in preimage.iter().enumerate() {
            for &q in &preimage[idx + 1..] {
                max_preimage = max_preimage.max(source.dist(p, q));
            }
        }
    }
    Ok(ControlProfile {
        entries,
        properness_rho,
        max_preimage_diameter: max_preimage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Norm;

    fn line(n: usize) -> FiniteMetricSpace {
        FiniteMetricSpace::from_coords(
            "line",
            (0..n).map(|i| vec![i as f64]).collect(),
            Norm::L2,
        )
        .unwrap()
    }

    #[test]
    fn alike_basics() {
        let space = line(10);
        let a = Subset::from_ids([0]);
        let b = Subset::from_ids([3]);
        assert!(alike_at_scale(&space, &a, &a, 0.0));
        assert!(!alike_at_scale(&space, &a, &b, 2.0));
        assert!(alike_at_scale(&space, &a, &b, 3.0));
        assert!(alike_at_scale(&space, &Subset::empty(), &Subset::empty(), 0.0));
        assert!(!alike_at_scale(&space, &a, &Subset::empty(), 1e9));
    }

    #[test]
    fn split_along_identical_parts_returns_a() {
        let space = line(10);
        let a = Subset::from_ids(0..5);
        let b = Subset::from_ids(0..5);
        let (a1, a2) = split_alike(&space, &a, &b, &b, 0.0).unwrap();
        assert_eq!(a1, Subset::from_ids(0..5));
        assert_eq!(a2, Subset::from_ids(0..5));
    }

    #[test]
    fn split_on_the_integer_line() {
        let space = line(11);
        let a = Subset::from_ids(0..=10);
        let b1 = Subset::from_ids(0..=4);
        let b2 = Subset::from_ids(6..=10);
        let (a1, a2) = split_alike(&space, &a, &b1, &b2, 1.0).unwrap();
        assert_eq!(a1, Subset::from_ids(0..=5));
        assert_eq!(a2, Subset::from_ids(5..=10));
        assert_eq!(a1.union(&a2), a);
        assert!(space.hausdorff_distance(&a1, &b1).at_most(1.0));
        assert!(space.hausdorff_distance(&a2, &b2).at_most(1.0));
    }

    #[test]
    fn split_rejects_bad_inputs() {
        let space = line(11);
        let a = Subset::from_ids(0..=10);
        let err = split_alike(&space, &a, &Subset::empty(), &a, 1.0).unwrap_err();
        assert!(err.to_string().contains("nonempty"));
        let far = Subset::from_ids([10]);
        let err = split_alike(&space, &a, &far, &far, 1.0).unwrap_err();
        assert!(err.to_string().contains("not alike"));
    }

    #[test]
    fn gap_profile_of_parallel_sets() {
        // Two parallel lines at distance 7.
        let mut pts: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, 0.0]).collect();
        pts.extend((0..20).map(|i| vec![i as f64, 7.0]));
        let space = FiniteMetricSpace::from_coords("rails", pts, Norm::L2).unwrap();
        let a = Subset::from_ids(0..20);
        let b = Subset::from_ids(20..40);
        let profile = gap_profile(&space, &a, &b, 0, &[1.0, 5.0, 100.0]).unwrap();
        assert_eq!(profile.gaps[0], ExtLength::Finite(7.0));
        assert_eq!(profile.gaps[1], ExtLength::Finite(7.0));
        assert_eq!(profile.gaps[2], ExtLength::Infinite);
    }

    #[test]
    fn gap_profile_of_a_set_with_itself() {
        let space = line(10);
        let a = Subset::from_ids(0..10);
        let profile = gap_profile(&space, &a, &a, 0, &[1.0, 20.0]).unwrap();
        assert_eq!(profile.gaps[0], ExtLength::ZERO);
        assert_eq!(profile.gaps[1], ExtLength::Infinite);
    }

    #[test]
    fn gap_profile_rejects_unsorted_radii() {
        let space = line(10);
        let a = Subset::from_ids([0]);
        assert!(gap_profile(&space, &a, &a, 0, &[2.0, 1.0]).is_err());
        assert!(gap_profile(&space, &a, &a, 0, &[]).is_err());
    }

    #[test]
    fn bounded_and_disjoint_windows() {
        let space = line(100);
        let params = ScaleParams::new(2.0, 1.0, 2.0, 0, 40.0, 10.0).unwrap();
        assert!(is_bounded_at(&space, &Subset::empty(), &params));
        assert!(is_bounded_at(&space, &Subset::from_ids([0]), &params));
        assert!(!is_bounded_at(&space, &Subset::from_ids(0..100), &params));

        // Nearby sets inside one cluster are not disjoint at gap 10.
        let a = Subset::from_ids(40..60);
        let b = Subset::from_ids(61..80);
        assert!(!disjoint_at_scale(&space, &a, &b, &params));
        // A bounded set empties under truncation and is disjoint from
        // everything.
        let small = Subset::from_ids(0..5);
        assert!(disjoint_at_scale(&space, &small, &a, &params));
    }

    #[test]
    fn params_invariants_enforced() {
        assert!(ScaleParams::new(1.0, 1.0, 1.0, 0, 10.0, 0.0).is_err());
        assert!(ScaleParams::new(1.0, 1.0, 1.0, 0, 10.0, 1.0)
            .unwrap()
            .with_bounded_rho(11.0)
            .is_err());
        assert!(ScaleParams::new(-1.0, 1.0, 1.0, 0, 10.0, 1.0).is_err());
    }

    #[test]
    fn control_profile_identity_and_stretch() {
        let space = line(20);
        let ident: Vec<usize> = (0..20).collect();
        let profile =
            coarse_control_profile(&space, &space, &ident, &[1.0, 2.0, 5.0], 2.0).unwrap();
        for e in &profile.entries {
            assert!(e.s < e.r, "identity control s={} at r={}", e.s, e.r);
        }

        // x -> 2x doubles distances.
        let target = FiniteMetricSpace::from_coords(
            "double",
            (0..40).map(|i| vec![i as f64]).collect(),
            Norm::L2,
        )
        .unwrap();
        let doubled: Vec<usize> = (0..20).map(|i| 2 * i).collect();
        let profile =
            coarse_control_profile(&space, &target, &doubled, &[1.5, 3.0], 1.0).unwrap();
        for e in &profile.entries {
            assert!(e.s <= 2.0 * e.r);
        }

        let err = coarse_control_profile(&space, &target, &[999; 20], &[1.0], 1.0);
        assert!(err.is_err());
    }
}
