//! Deterministic generators for the standard test spaces, with their named
//! subsets.
//!
//! Every generator records its truncation in per-point interior marks where
//! the ideal space is unbounded, so boundary-sensitive checks can exclude
//! clipped points. Generation is deterministic given the parameters (and the
//! seed, for the random family).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoarseError, Result};
use crate::metric::{FiniteMetricSpace, Norm};

/// Parameter record for one gallery space; `generate` turns it into the
/// actual space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GallerySpec {
    ExpRays { n_max: usize, height: f64, step: f64 },
    ExpStrips { n_max: usize, step: f64 },
    Lattice { dim: usize, side: usize, norm: Norm },
    FreeGroupBall { rank: usize, radius: usize },
    LocallyFiniteGroup { n_terms: usize },
    Random { n: usize, dim: usize, box_side: f64, seed: u64 },
}

impl GallerySpec {
    pub fn generate(&self) -> Result<FiniteMetricSpace> {
        match *self {
            GallerySpec::ExpRays { n_max, height, step } => gen_exp_rays(n_max, height, step),
            GallerySpec::ExpStrips { n_max, step } => gen_exp_strips(n_max, step),
            GallerySpec::Lattice { dim, side, norm } => gen_lattice(dim, side, norm),
            GallerySpec::FreeGroupBall { rank, radius } => gen_free_group_ball(rank, radius),
            GallerySpec::LocallyFiniteGroup { n_terms } => gen_locally_finite_group(n_terms),
            GallerySpec::Random { n, dim, box_side, seed } => gen_random(n, dim, box_side, seed),
        }
    }
}

fn bad_param(msg: String) -> CoarseError {
    CoarseError::InvalidInput(msg)
}

/// Vertical rays in the plane at x = 2, 4, 8, ..., 2^n_max, sampled at
/// vertical step `step` up to height `height`, Euclidean metric.
///
/// Named subsets: `A` = the ray feet `(2^n, 0)`, `B` = the whole ray at
/// x = 2, `C` = the single foot `(2, 0)`. Interior marks record the distance
/// to the clipped material: the missing height above `height` and the
/// missing rays beyond `n_max`.
pub fn gen_exp_rays(n_max: usize, height: f64, step: f64) -> Result<FiniteMetricSpace> {
    if n_max < 2 {
        return Err(bad_param(format!("n_max must be >= 2, got {n_max}")));
    }
    if !(height > 0.0) {
        return Err(bad_param(format!("height must be positive, got {height}")));
    }
    if !(step > 0.0 && step <= 1.0) {
        return Err(bad_param(format!("step must lie in (0, 1], got {step}")));
    }
    let k_max = (height / step + 1e-9).floor() as usize;
    let next_ray_x = 2f64.powi(n_max as i32 + 1);
    let mut points = Vec::new();
    let mut marks = Vec::new();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for n in 1..=n_max {
        let x = 2f64.powi(n as i32);
        for k in 0..=k_max {
            let y = k as f64 * step;
            if k == 0 {
                a.push(points.len());
            }
            if n == 1 {
                b.push(points.len());
            }
            marks.push((height - y).min(next_ray_x - x));
            points.push(vec![x, y]);
        }
    }
    let name = format!("exp_rays(n_max={n_max},height={height},step={step})");
    FiniteMetricSpace::from_coords(&name, points, Norm::L2)?
        .with_interior_marks(marks)?
        .with_named_subset("A", a)?
        .with_named_subset("B", b)?
        .with_named_subset("C", vec![0])
}

/// Vertical strips in the plane: strip n sits at x = 2^n and spans
/// y ∈ [-n, n] at step `step`, Euclidean metric. Named subsets `TOP` and
/// `BOTTOM` collect the strip endpoints.
pub fn gen_exp_strips(n_max: usize, step: f64) -> Result<FiniteMetricSpace> {
    if n_max < 2 {
        return Err(bad_param(format!("n_max must be >= 2, got {n_max}")));
    }
    if !(step > 0.0 && step <= 1.0) {
        return Err(bad_param(format!("step must lie in (0, 1], got {step}")));
    }
    let next_ray_x = 2f64.powi(n_max as i32 + 1);
    let mut points = Vec::new();
    let mut marks = Vec::new();
    let mut top = Vec::new();
    let mut bottom = Vec::new();
    for n in 1..=n_max {
        let x = 2f64.powi(n as i32);
        let k_max = (n as f64 / step + 1e-9).floor() as i64;
        for k in -k_max..=k_max {
            let y = k as f64 * step;
            if k == -k_max {
                bottom.push(points.len());
            }
            if k == k_max {
                top.push(points.len());
            }
            marks.push(next_ray_x - x);
            points.push(vec![x, y]);
        }
    }
    let name = format!("exp_strips(n_max={n_max},step={step})");
    FiniteMetricSpace::from_coords(&name, points, Norm::L2)?
        .with_interior_marks(marks)?
        .with_named_subset("TOP", top)?
        .with_named_subset("BOTTOM", bottom)
}

/// Integer grid `[0, side)^dim` under the chosen norm. Named subsets
/// `FACE_LO_k` / `FACE_HI_k` are the two faces orthogonal to axis k.
pub fn gen_lattice(dim: usize, side: usize, norm: Norm) -> Result<FiniteMetricSpace> {
    if !(1..=3).contains(&dim) {
        return Err(bad_param(format!("dim must be 1, 2 or 3, got {dim}")));
    }
    if side < 2 {
        return Err(bad_param(format!("side must be >= 2, got {side}")));
    }
    let n = side.pow(dim as u32);
    let mut points = Vec::with_capacity(n);
    let mut faces: Vec<(Vec<usize>, Vec<usize>)> = vec![(Vec::new(), Vec::new()); dim];
    for id in 0..n {
        let mut rest = id;
        let mut coord = vec![0.0; dim];
        for axis in (0..dim).rev() {
            let c = rest % side;
            rest /= side;
            coord[axis] = c as f64;
            if c == 0 {
                faces[axis].0.push(id);
            }
            if c == side - 1 {
                faces[axis].1.push(id);
            }
        }
        points.push(coord);
    }
    let name = format!("lattice(dim={dim},side={side},norm={norm})");
    let mut space = FiniteMetricSpace::from_coords(&name, points, norm)?;
    for (axis, (lo, hi)) in faces.into_iter().enumerate() {
        space = space
            .with_named_subset(&format!("FACE_LO_{axis}"), lo)?
            .with_named_subset(&format!("FACE_HI_{axis}"), hi)?;
    }
    Ok(space)
}

const FREE_GROUP_MAX_RADIUS: usize = 7;

fn letter_symbol(letter: i8) -> char {
    match letter {
        1 => 'a',
        -1 => 'A',
        2 => 'b',
        -2 => 'B',
        _ => '?',
    }
}

/// Ball of the free group of the given rank under the word metric: reduced
/// words of length at most `radius`, enumerated breadth-first with the fixed
/// letter order a, a⁻¹, b, b⁻¹. Point labels spell the words (inverses in
/// upper case). Named subsets `FACE_HI_k` / `FACE_LO_k` collect the words
/// starting with generator k and its inverse; interior marks record
/// `radius - |word|`.
pub fn gen_free_group_ball(rank: usize, radius: usize) -> Result<FiniteMetricSpace> {
    if !(1..=2).contains(&rank) {
        return Err(bad_param(format!("rank must be 1 or 2, got {rank}")));
    }
    if radius > FREE_GROUP_MAX_RADIUS {
        return Err(bad_param(format!(
            "radius {radius} exceeds the size guard {FREE_GROUP_MAX_RADIUS}"
        )));
    }
    let alphabet: Vec<i8> = match rank {
        1 => vec![1, -1],
        _ => vec![1, -1, 2, -2],
    };
    let mut words: Vec<Vec<i8>> = vec![Vec::new()];
    let mut frontier_start = 0;
    for _ in 0..radius {
        let frontier_end = words.len();
        for idx in frontier_start..frontier_end {
            let word = words[idx].clone();
            for &letter in &alphabet {
                if word.last() == Some(&-letter) {
                    continue;
                }
                let mut next = word.clone();
                next.push(letter);
                words.push(next);
            }
        }
        frontier_start = frontier_end;
    }

    let n = words.len();
    let word_dist = |g: &[i8], h: &[i8]| -> f64 {
        let common = g
            .iter()
            .zip(h.iter())
            .take_while(|(x, y)| x == y)
            .count();
        (g.len() + h.len() - 2 * common) as f64
    };
    let mut matrix = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = word_dist(&words[i], &words[j]);
            matrix[i * n + j] = d;
            matrix[j * n + i] = d;
        }
    }

    let labels: Vec<String> = words
        .iter()
        .map(|w| {
            if w.is_empty() {
                "e".to_string()
            } else {
                w.iter().map(|&l| letter_symbol(l)).collect()
            }
        })
        .collect();
    let marks: Vec<f64> = words.iter().map(|w| (radius - w.len()) as f64).collect();

    let name = format!("free_group_ball(rank={rank},radius={radius})");
    let mut space = FiniteMetricSpace::from_full_matrix(&name, n, matrix)?
        .with_labels(labels)?
        .with_interior_marks(marks)?;
    for (axis, &gen) in [1i8, 2i8][..rank].iter().enumerate() {
        let starts_with = |letter: i8| -> Vec<usize> {
            words
                .iter()
                .enumerate()
                .filter(|(_, w)| w.first() == Some(&letter))
                .map(|(id, _)| id)
                .collect()
        };
        space = space
            .with_named_subset(&format!("FACE_HI_{axis}"), starts_with(gen))?
            .with_named_subset(&format!("FACE_LO_{axis}"), starts_with(-gen))?;
    }
    Ok(space)
}

/// The group (ℤ/2)^n_terms under the proper invariant ultrametric
/// `d(g, h) = max { i : g_i ≠ h_i }` with 1-based indices (0 when equal).
///
/// Realized as coordinates `c_i = i·g_i` under ℓ∞, which reproduces the
/// ultrametric exactly. Chain components at scale `r` are the subgroups
/// supported below `r`, so every component stays bounded while the space
/// does not. Named subsets `A` (the subgroup supported on the lower half of
/// the indices) and `B` (its coset shifted at the top index) form a far
/// pair.
pub fn gen_locally_finite_group(n_terms: usize) -> Result<FiniteMetricSpace> {
    if !(2..=14).contains(&n_terms) {
        return Err(bad_param(format!(
            "n_terms must lie in 2..=14, got {n_terms}"
        )));
    }
    let n = 1usize << n_terms;
    let mut points = Vec::with_capacity(n);
    for mask in 0..n {
        let coord: Vec<f64> = (0..n_terms)
            .map(|bit| if mask >> bit & 1 == 1 { (bit + 1) as f64 } else { 0.0 })
            .collect();
        points.push(coord);
    }
    let half = n_terms / 2;
    let low_subgroup: Vec<usize> = (0..1usize << half).collect();
    let top = 1usize << (n_terms - 1);
    let coset: Vec<usize> = low_subgroup.iter().map(|m| m | top).collect();
    let name = format!("locally_finite_group(n_terms={n_terms})");
    // Elements supported beyond the sampled indices sit at distance at
    // least n_terms + 1 from every sample point.
    let marks = vec![(n_terms + 1) as f64; n];
    FiniteMetricSpace::from_coords(&name, points, Norm::Linf)?
        .with_interior_marks(marks)?
        .with_named_subset("A", low_subgroup)?
        .with_named_subset("B", coset)
}

/// Uniform points in `[0, box_side]^dim`, Euclidean metric, reproducible
/// from the seed.
pub fn gen_random(n: usize, dim: usize, box_side: f64, seed: u64) -> Result<FiniteMetricSpace> {
    if n > 5000 {
        return Err(bad_param(format!("n {n} exceeds the size guard 5000")));
    }
    if dim == 0 {
        return Err(bad_param("dim must be positive".to_string()));
    }
    if !(box_side > 0.0) {
        return Err(bad_param(format!("box_side must be positive, got {box_side}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(0.0..box_side)).collect())
        .collect();
    let name = format!("random(n={n},dim={dim},box={box_side},seed={seed})");
    FiniteMetricSpace::from_coords(&name, points, Norm::L2)
}
