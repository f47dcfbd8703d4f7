//! Seeded property campaigns, runnable from tests and from the CLI.
//!
//! Three campaigns back the headline guarantees:
//!
//! * every verified separator yields a verified cut at a slightly larger
//!   thickening (checked on random small spaces with random partitions);
//! * on the 2-convex gallery samples, points of the reachable side that are
//!   m-close to the other side stay within `m·r + s` of a minimum cut;
//! * the fast implementations agree exactly with the independent oracles
//!   for hop distances, minimum cuts, and Hausdorff distances.
//!
//! Campaigns run on one thread and are deterministic given their seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chain::chain_metric;
use crate::cuts::{find_min_cut, reachable_partition, verify_cut, verify_separator};
use crate::error::CoarseError;
use crate::gallery;
use crate::metric::{FiniteMetricSpace, Subset};
use crate::oracles;
use crate::scale::ScaleParams;

/// Outcome of one campaign. `checks` counts the individual assertions that
/// actually fired (for the implication campaign, only separator passes lead
/// to a check).
#[derive(Clone, Debug, Serialize)]
pub struct Campaign {
    pub name: String,
    pub cases: usize,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl Campaign {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn random_subset_of(rng: &mut ChaCha8Rng, pool: &Subset, keep: f64) -> Subset {
    let mut out = Subset::empty();
    for x in pool.iter() {
        if rng.random_bool(keep) {
            out.insert(x);
        }
    }
    if out.is_empty() {
        if let Some(x) = pool.iter().nth(rng.random_range(0..pool.len().max(1))) {
            out.insert(x);
        }
    }
    out
}

/// On seeded random spaces with random partitions `X = X1 ∪ X2`,
/// `A ⊆ X1`, `B ⊆ X2` and random `C`: whenever the separator clauses pass
/// with `m = r` and threshold `t`, the cut clauses must pass at thickening
/// `t + 1`. The campaign runs with boundedness radius 0 so the witness
/// clause quantifies over every point; random spaces are complete data, not
/// windows onto something larger.
pub fn separator_implies_cut(seed: u64, cases: usize) -> Campaign {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut campaign = Campaign {
        name: "separator_implies_cut".to_string(),
        cases,
        checks: 0,
        failures: Vec::new(),
    };
    for case in 0..cases {
        let space_seed: u64 = rng.random();
        let n = rng.random_range(8..=40usize);
        let space = gallery::gen_random(n, 2, 10.0, space_seed)
            .expect("random space parameters are in range");
        let r = rng.random_range(0.8..2.5f64);
        let s = rng.random_range(0.5..3.0f64);
        let gap = rng.random_range(0.5..3.0f64);
        let window = rng.random_range(2.0..12.0f64);
        let basepoint = rng.random_range(0..n);
        let params = ScaleParams::new(r, s, r, basepoint, window, gap)
            .and_then(|p| p.with_bounded_rho(0.0))
            .expect("campaign parameters are valid");
        let t = params.m * params.r + params.s;

        let (x1, x2, c) = if rng.random_bool(0.5) {
            // Structured split: a coordinate threshold with a slab around it.
            let (points, _) = space.coords().expect("random spaces are coordinate-backed");
            let axis = rng.random_range(0..2usize);
            let pivot = points[rng.random_range(0..n)][axis];
            let width = rng.random_range(0.5..2.0f64);
            let mut x1 = Subset::empty();
            let mut x2 = Subset::empty();
            let mut c = Subset::empty();
            for (id, p) in points.iter().enumerate() {
                if p[axis] <= pivot {
                    x1.insert(id);
                } else {
                    x2.insert(id);
                }
                if (p[axis] - pivot).abs() < width {
                    c.insert(id);
                }
            }
            (x1, x2, c)
        } else {
            let mut x1 = Subset::empty();
            let mut x2 = Subset::empty();
            let mut c = Subset::empty();
            for id in 0..n {
                if rng.random_bool(0.5) {
                    x1.insert(id);
                } else {
                    x2.insert(id);
                }
                if rng.random_bool(0.2) {
                    c.insert(id);
                }
            }
            (x1, x2, c)
        };
        if x1.is_empty() || x2.is_empty() {
            continue;
        }
        let a = random_subset_of(&mut rng, &x1, 0.3);
        let b = random_subset_of(&mut rng, &x2, 0.3);

        let separator = match verify_separator(&space, &a, &b, &c, &x1, &x2, &params, Some(t)) {
            Ok(report) => report,
            Err(e) => {
                campaign
                    .failures
                    .push(format!("case {case}: separator check errored: {e}"));
                continue;
            }
        };
        if !separator.pass {
            continue;
        }
        campaign.checks += 1;
        let cut_params = ScaleParams {
            s: t + 1.0,
            ..params
        };
        match verify_cut(&space, &a, &b, &c, &cut_params) {
            Ok(report) if report.pass => {}
            Ok(report) => campaign.failures.push(format!(
                "case {case} (space seed {space_seed}): separator passed but cut failed: {report:?}"
            )),
            Err(e) => campaign
                .failures
                .push(format!("case {case}: cut check errored: {e}")),
        }
    }
    campaign
}

fn far_pair(
    rng: &mut ChaCha8Rng,
    space: &FiniteMetricSpace,
    min_separation: f64,
    grow_radius: f64,
) -> (Subset, Subset) {
    let n = space.len();
    let p = rng.random_range(0..n);
    let mut q = rng.random_range(0..n);
    let mut tries = 0;
    while space.dist(p, q) < min_separation && tries < 200 {
        q = rng.random_range(0..n);
        tries += 1;
    }
    if space.dist(p, q) < min_separation {
        // Fall back to the farthest point.
        let mut best = 0usize;
        let mut best_d = -1.0;
        for y in 0..n {
            let d = space.dist(p, y);
            if d > best_d {
                best_d = d;
                best = y;
            }
        }
        q = best;
    }
    let grow = |x: usize| {
        space
            .ball(&Subset::from_ids([x]), grow_radius)
            .expect("positive radius")
    };
    (grow(p), grow(q))
}

/// On the 2-convex gallery samples (square lattice and free-group ball),
/// with `C` a minimum cut between seeded far pairs and `(X1, X2)` the
/// reachability partition: every point of `X1` whose interior mark admits
/// it and which is m-close to `X2` lies within `m·r + s` of `C`, for
/// `m ∈ {r, 2r, 5r}`.
pub fn cut_bound_on_convex_samples(seed: u64, pairs_per_space: usize) -> Campaign {
    let mut campaign = Campaign {
        name: "cut_bound_on_convex_samples".to_string(),
        cases: 0,
        checks: 0,
        failures: Vec::new(),
    };
    let spaces = [
        gallery::gen_lattice(2, 40, crate::metric::Norm::L1).expect("lattice parameters"),
        gallery::gen_free_group_ball(2, 6).expect("ball parameters"),
    ];
    let r = 2.0;
    let s = 3.0;
    for space in &spaces {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ space.len() as u64);
        let diam = space.diameter();
        let params = ScaleParams::new(r, s, r, 0, diam + 1.0, 1.0).expect("params");
        for pair_idx in 0..pairs_per_space {
            campaign.cases += 1;
            let (a, b) = far_pair(&mut rng, space, diam / 2.0, 2.5);
            let cut = match find_min_cut(space, &a, &b, r) {
                Ok(c) => c,
                Err(e) => {
                    campaign.failures.push(format!(
                        "{} pair {pair_idx}: cut search failed: {e}",
                        space.name()
                    ));
                    continue;
                }
            };
            let (x1, x2) = match reachable_partition(space, &a, &cut, &params) {
                Ok(p) => p,
                Err(e) => {
                    campaign.failures.push(format!(
                        "{} pair {pair_idx}: partition failed: {e}",
                        space.name()
                    ));
                    continue;
                }
            };
            for factor in [1.0, 2.0, 5.0] {
                let m = factor * r;
                let bound = m * r + s;
                for x in x1.iter() {
                    if let Some(mark) = space.interior_mark(x) {
                        if mark < bound {
                            continue;
                        }
                    }
                    if !space.point_to_set(x, &x2).at_most(m) {
                        continue;
                    }
                    campaign.checks += 1;
                    if !space.point_to_set(x, &cut).at_most(bound) {
                        campaign.failures.push(format!(
                            "{} pair {pair_idx}: point {x} is {m}-close to X2 but farther than {bound} from the cut",
                            space.name()
                        ));
                    }
                }
            }
        }
    }
    campaign
}

/// Exact agreement between the fast implementations and the independent
/// oracles: BFS hop distances vs iterated relaxation on 12-point spaces,
/// flow-based minimum cuts vs exhaustive enumeration on 10-point spaces,
/// and Hausdorff distances vs the raw double scan.
pub fn oracle_equivalence(
    seed: u64,
    chain_cases: usize,
    cut_cases: usize,
    hausdorff_cases: usize,
) -> Vec<Campaign> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut chain = Campaign {
        name: "chain_metric_vs_relaxation".to_string(),
        cases: chain_cases,
        checks: 0,
        failures: Vec::new(),
    };
    for case in 0..chain_cases {
        let space_seed: u64 = rng.random();
        let space = gallery::gen_random(12, 2, rng.random_range(4.0..14.0), space_seed)
            .expect("random space parameters");
        let r = rng.random_range(1.0..5.0f64);
        let table = oracles::hop_distances_by_relaxation(&space, r).expect("12 points");
        for x in 0..12 {
            for y in 0..12 {
                chain.checks += 1;
                let fast = chain_metric(&space, x, y, r).expect("valid ids");
                if fast != table[x][y] {
                    chain.failures.push(format!(
                        "case {case} (seed {space_seed}, r {r}): d_r({x},{y}) fast {fast:?} oracle {:?}",
                        table[x][y]
                    ));
                }
            }
        }
    }

    let mut cut = Campaign {
        name: "min_cut_vs_enumeration".to_string(),
        cases: cut_cases,
        checks: 0,
        failures: Vec::new(),
    };
    let mut done = 0usize;
    while done < cut_cases {
        let space_seed: u64 = rng.random();
        let space = gallery::gen_random(10, 2, rng.random_range(3.0..8.0), space_seed)
            .expect("random space parameters");
        let r = rng.random_range(1.2..3.5f64);
        let a = Subset::from_ids([rng.random_range(0..10usize)]);
        let b = Subset::from_ids([rng.random_range(0..10usize)]);
        let fast = find_min_cut(&space, &a, &b, r);
        let slow = oracles::min_cut_by_enumeration(&space, &a, &b, r);
        match (fast, slow) {
            (Ok(f), Ok(s)) => {
                done += 1;
                cut.checks += 1;
                if f.len() != s.len() {
                    cut.failures.push(format!(
                        "seed {space_seed} r {r}: flow cut size {} vs enumerated {}",
                        f.len(),
                        s.len()
                    ));
                }
            }
            (Err(CoarseError::NoInteriorCut(_)), Err(CoarseError::NoInteriorCut(_))) => {
                // Both reject adjacent sides; resample.
            }
            (f, s) => {
                done += 1;
                cut.failures.push(format!(
                    "seed {space_seed} r {r}: disagree on feasibility: {f:?} vs {s:?}"
                ));
            }
        }
    }

    let mut hausdorff = Campaign {
        name: "hausdorff_vs_double_scan".to_string(),
        cases: hausdorff_cases,
        checks: 0,
        failures: Vec::new(),
    };
    for case in 0..hausdorff_cases {
        let space_seed: u64 = rng.random();
        let space =
            gallery::gen_random(20, 2, 12.0, space_seed).expect("random space parameters");
        let pool = Subset::full(20);
        let a = random_subset_of(&mut rng, &pool, 0.4);
        let b = random_subset_of(&mut rng, &pool, 0.4);
        hausdorff.checks += 1;
        let fast = space.hausdorff_distance(&a, &b);
        let slow = oracles::hausdorff_by_double_scan(&space, &a, &b);
        if fast != slow {
            hausdorff.failures.push(format!(
                "case {case} (seed {space_seed}): fast {fast} oracle {slow}"
            ));
        }
    }

    vec![chain, cut, hausdorff]
}

/// The full battery with one budget knob, as exposed by the command line.
pub fn run_all(seed: u64, cases: usize) -> Vec<Campaign> {
    let mut out = vec![
        separator_implies_cut(seed, cases),
        cut_bound_on_convex_samples(seed, (cases / 10).max(4)),
    ];
    out.extend(oracle_equivalence(
        seed,
        (cases / 4).max(10),
        (cases / 4).max(10),
        (cases / 2).max(10),
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_campaign_battery_passes() {
        for campaign in run_all(0xC0A25E, 40) {
            assert!(
                campaign.passed(),
                "{} failed: {:?}",
                campaign.name,
                campaign.failures
            );
            assert!(campaign.checks > 0, "{} never checked anything", campaign.name);
        }
    }

    #[test]
    fn campaigns_are_deterministic() {
        let a = separator_implies_cut(7, 25);
        let b = separator_implies_cut(7, 25);
        assert_eq!(a.checks, b.checks);
        assert_eq!(a.failures, b.failures);
    }
}
