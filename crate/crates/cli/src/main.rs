//! `coarse`: command-line front door for the finite-scale coarse geometry
//! toolkit.
//!
//! Every analysis command writes a JSON report `{ manifest, payload }` to
//! stdout or `--out`; profile commands emit two-column CSV instead. Exit
//! codes: 0 the analysis passed (or simply succeeded), 1 the analysis ran
//! but the checked property failed, 2 usage or input errors.

mod manifest;

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use coarse_core::chain::{check_r_convexity, ChainGraph};
use coarse_core::cuts::{
    find_min_cut, reachable_partition, verify_cut, verify_separator, zero_dim_partition,
};
use coarse_core::dimension::{
    component_growth, estimate_asdg, estimate_asdim, estimate_lsind, verify_certificate,
    CandidateWitness, DimensionCertificate, Evidence, RecursionOptions,
};
use coarse_core::gallery;
use coarse_core::metric::Norm;
use coarse_core::props;
use coarse_core::scale::gap_profile;
use coarse_core::schema;
use coarse_core::{FiniteMetricSpace, ScaleParams, Subset};

use manifest::{digest_bytes, render_report, threads_cap, write_output, InputDigest, Report};

#[derive(Parser)]
#[command(name = "coarse", version, about = "Finite-scale coarse geometry toolkit")]
struct Cli {
    /// Write the report (or generated space / CSV) here instead of stdout.
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,

    /// Load spaces even when metric validation reports violations.
    #[arg(long, global = true)]
    allow_invalid: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a gallery space as a space JSON file.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
    },
    /// Validate the metric axioms and summarize a space.
    Metric { space: PathBuf },
    /// Check r-convexity of a space.
    Convexity {
        space: PathBuf,
        #[arg(long)]
        r: f64,
    },
    /// List chain components at a scale.
    Components {
        space: PathBuf,
        #[arg(long)]
        r: f64,
        /// Only the component of this point.
        #[arg(long)]
        point: Option<usize>,
    },
    /// Cut verification and search.
    Cut {
        #[command(subcommand)]
        action: CutAction,
    },
    /// Separator verification and partition construction.
    Sep {
        #[command(subcommand)]
        action: SepAction,
    },
    /// Dimension estimators.
    Dim {
        #[command(subcommand)]
        action: DimAction,
    },
    /// Plot-data emission (two-column CSV).
    Profile {
        #[command(subcommand)]
        action: ProfileAction,
    },
    /// Built-in checks: metric axioms, randomized property campaigns.
    Check {
        #[command(subcommand)]
        action: CheckAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    L1,
    L2,
    Linf,
}

impl From<NormArg> for Norm {
    fn from(value: NormArg) -> Norm {
        match value {
            NormArg::L1 => Norm::L1,
            NormArg::L2 => Norm::L2,
            NormArg::Linf => Norm::Linf,
        }
    }
}

#[derive(Subcommand)]
enum GenFamily {
    /// Vertical rays at x = 2, 4, ..., 2^n-max with named subsets A, B, C.
    ExpRays {
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        height: f64,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
    },
    /// Vertical strips at x = 2^n spanning [-n, n], subsets TOP and BOTTOM.
    ExpStrips {
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
    },
    /// Integer grid [0, side)^dim with FACE_LO_k / FACE_HI_k subsets.
    Lattice {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        side: usize,
        #[arg(long, value_enum, default_value = "l1")]
        norm: NormArg,
    },
    /// Word-metric ball of the free group with FACE subsets per generator.
    FreeBall {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        radius: usize,
    },
    /// (Z/2)^terms under the max-index ultrametric, far cosets A and B.
    LfGroup {
        #[arg(long)]
        terms: usize,
    },
    /// Uniform points in a box, reproducible from the seed.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long = "box", default_value_t = 10.0)]
        box_side: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Window parameters shared by the cut/separator/dimension commands.
#[derive(Args, Clone)]
struct ScaleArgs {
    /// Chain scale r.
    #[arg(long)]
    r: f64,
    /// Thickening scale s.
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    /// Alikeness scale m; defaults to r.
    #[arg(long)]
    m: Option<f64>,
    /// Truncation window radius around the basepoint.
    #[arg(long)]
    window: f64,
    /// Gap certifying scale-disjointness at this window.
    #[arg(long)]
    gap: f64,
    /// Boundedness radius; defaults to window/4.
    #[arg(long)]
    rho: Option<f64>,
    /// Basepoint id.
    #[arg(long, default_value_t = 0)]
    basepoint: usize,
}

impl ScaleArgs {
    fn to_params(&self) -> Result<ScaleParams> {
        let params = ScaleParams::new(
            self.r,
            self.s,
            self.m.unwrap_or(self.r),
            self.basepoint,
            self.window,
            self.gap,
        )?;
        Ok(match self.rho {
            Some(rho) => params.with_bounded_rho(rho)?,
            None => params,
        })
    }
}

#[derive(Subcommand)]
enum CutAction {
    /// Verify that C is a cut between A and B.
    Verify {
        space: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
        #[command(flatten)]
        scale: ScaleArgs,
    },
    /// Minimum vertex cut between A and B in the chain graph.
    Find {
        space: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        r: f64,
        /// Write a copy of the space with the cut added as a named subset.
        #[arg(long)]
        emit_space: Option<PathBuf>,
        #[arg(long, default_value = "MIN_CUT")]
        save_as: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PartitionMethod {
    Reachable,
    ZeroDim,
}

#[derive(Subcommand)]
enum SepAction {
    /// Verify the separator clauses for a given partition X1, X2.
    Verify {
        space: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
        #[arg(long)]
        x1: String,
        #[arg(long)]
        x2: String,
        /// Witness-clause threshold; defaults to m*r + s.
        #[arg(long)]
        t: Option<f64>,
        #[command(flatten)]
        scale: ScaleArgs,
    },
    /// Construct a candidate partition (reachable or zero-dim).
    Construct {
        space: PathBuf,
        #[arg(long, value_enum)]
        method: PartitionMethod,
        #[arg(long)]
        a: String,
        /// Cut set; required by the reachable method.
        #[arg(long)]
        c: Option<String>,
        /// Opposite side; required by the zero-dim method.
        #[arg(long)]
        b: Option<String>,
        #[arg(long, default_value_t = 6)]
        i_max: usize,
        #[command(flatten)]
        scale: ScaleArgs,
        /// Write a copy of the space with X1/X2 added as named subsets.
        #[arg(long)]
        emit_space: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DimAction {
    /// Cover-based estimate at scale r with diameter bound d.
    Asdim {
        space: PathBuf,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        d: f64,
    },
    /// Recursive estimate via verified cuts.
    Asdg {
        space: PathBuf,
        /// Pairs of named subsets, e.g. FACE_LO_0:FACE_HI_0,FACE_LO_1:FACE_HI_1.
        /// Omitted: a deterministic far pair is generated.
        #[arg(long)]
        pairs: Option<String>,
        #[arg(long)]
        depth: usize,
        /// Extra named subsets to try as cut candidates.
        #[arg(long = "cut")]
        cuts: Vec<String>,
        #[command(flatten)]
        scale: ScaleArgs,
    },
    /// Recursive estimate via verified separators.
    Lsind {
        space: PathBuf,
        #[arg(long)]
        pairs: Option<String>,
        #[arg(long)]
        depth: usize,
        #[arg(long = "cut")]
        cuts: Vec<String>,
        #[arg(long, default_value_t = 6)]
        i_max: usize,
        #[command(flatten)]
        scale: ScaleArgs,
    },
}

#[derive(Subcommand)]
enum ProfileAction {
    /// Gap between A and B under growing truncations around x0.
    Gap {
        space: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 0)]
        x0: usize,
        /// Comma-separated strictly increasing radii.
        #[arg(long)]
        radii: String,
    },
    /// Diameter of the chain component of a point across scales.
    Growth {
        space: PathBuf,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        radii: String,
    },
}

#[derive(Subcommand)]
enum CheckAction {
    /// Metric-axiom validation only.
    Axioms { space: PathBuf },
    /// Seeded randomized property campaigns.
    Props {
        #[arg(long, default_value_t = 0xC0A25E)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
}

struct Ctx {
    argv: Vec<String>,
    start: Instant,
    inputs: Vec<InputDigest>,
    out: Option<PathBuf>,
    allow_invalid: bool,
}

impl Ctx {
    fn load_space(&mut self, path: &PathBuf) -> Result<FiniteMetricSpace> {
        self.load_space_with_validation(path, !self.allow_invalid)
    }

    fn load_space_with_validation(
        &mut self,
        path: &PathBuf,
        validate: bool,
    ) -> Result<FiniteMetricSpace> {
        let bytes =
            std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(digest_bytes(path, &bytes));
        let text = String::from_utf8(bytes)
            .with_context(|| format!("{} is not valid UTF-8", path.display()))?;
        let is_csv = path
            .extension()
            .map(|e| e.eq_ignore_ascii_case("csv"))
            .unwrap_or(false);
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "space".to_string());
        let space = if is_csv {
            schema::space_from_csv_str(&text, &name)?
        } else {
            schema::space_from_json_str(&text)?
        };
        if validate {
            let violations = space.validate_metric();
            if !violations.is_empty() {
                let listing: Vec<String> =
                    violations.iter().take(10).map(|v| v.to_string()).collect();
                bail!(
                    "{} violates the metric axioms ({} violations, rerun with --allow-invalid to proceed):\n  {}",
                    path.display(),
                    violations.len(),
                    listing.join("\n  ")
                );
            }
        }
        Ok(space)
    }

    fn finish<P: serde::Serialize>(self, params: serde_json::Value, payload: P) -> Result<()> {
        let report = Report {
            manifest: manifest::RunManifest {
                command: self.argv,
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                inputs: self.inputs,
                params,
                threads_cap: threads_cap(),
                wall_time_ms: self.start.elapsed().as_millis(),
            },
            payload,
        };
        write_output(self.out.as_ref(), &render_report(&report))
    }
}

fn subset(space: &FiniteMetricSpace, name: &str) -> Result<Subset> {
    space.subset(name).map_err(|e| anyhow!("{e}"))
}

fn parse_radii(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|cell| {
            cell.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("radius {cell:?} is not a number"))
        })
        .collect()
}

fn parse_pairs(space: &FiniteMetricSpace, text: &str) -> Result<Vec<(Subset, Subset)>> {
    text.split(',')
        .map(|pair| {
            let (a, b) = pair
                .split_once(':')
                .ok_or_else(|| anyhow!("pair {pair:?} is not of the form NAME:NAME"))?;
            Ok((subset(space, a.trim())?, subset(space, b.trim())?))
        })
        .collect()
}

fn profile_csv<'a>(rows: impl Iterator<Item = (f64, String)> + 'a) -> String {
    let mut out = String::from("x,value\n");
    for (x, value) in rows {
        out.push_str(&format!("{x},{value}\n"));
    }
    out
}

fn certificate_tree(
    space: &FiniteMetricSpace,
    cert: &DimensionCertificate,
    indent: usize,
    lines: &mut Vec<String>,
) {
    let pad = "  ".repeat(indent);
    let outcome = match cert.outcome.value() {
        Some(v) => format!("estimate {v}"),
        None => "depth-exhausted".to_string(),
    };
    let status = match verify_certificate(space, cert) {
        Ok(()) => "re-verified".to_string(),
        Err(e) => format!("RE-VERIFY FAILED: {e}"),
    };
    match &cert.evidence {
        Evidence::BoundedSpace { .. } => {
            lines.push(format!("{pad}{:?} {outcome} (bounded) [{status}]", cert.kind));
        }
        Evidence::CoverWitness {
            multiplicity,
            cover,
            ..
        } => {
            lines.push(format!(
                "{pad}{:?} {outcome} (cover of {} elements, multiplicity {multiplicity}) [{status}]",
                cert.kind,
                cover.elements.len()
            ));
        }
        Evidence::Recursion { pairs, .. } => {
            lines.push(format!(
                "{pad}{:?} {outcome} ({} pair(s) tested{}) [{status}]",
                cert.kind,
                pairs.len(),
                if cert.pair_limited { ", pair-limited" } else { "" }
            ));
            for (idx, pair) in pairs.iter().enumerate() {
                let via = match &pair.witness {
                    CandidateWitness::Cut { .. } => "cut",
                    CandidateWitness::Separator { .. } => "separator",
                };
                lines.push(format!(
                    "{pad}  pair {idx}: |A|={} |B|={} -> {via} through |C|={}",
                    pair.set_a.len(),
                    pair.set_b.len(),
                    pair.cut.len()
                ));
                match space.restrict(&pair.cut) {
                    Ok(sub) => certificate_tree(&sub, &pair.child, indent + 2, lines),
                    Err(e) => lines.push(format!("{pad}    (subspace unavailable: {e})")),
                }
            }
        }
    }
}

fn dim_report(
    space: &FiniteMetricSpace,
    cert: DimensionCertificate,
) -> (serde_json::Value, u8) {
    let reverify = verify_certificate(space, &cert);
    let mut tree = Vec::new();
    certificate_tree(space, &cert, 0, &mut tree);
    let exit = match (&cert.outcome.value(), &reverify) {
        (Some(_), Ok(())) => 0u8,
        _ => 1u8,
    };
    let payload = json!({
        "certificate": cert,
        "reverified": reverify.is_ok(),
        "reverify_error": reverify.err(),
        "tree": tree,
    });
    (payload, exit)
}

fn add_subset_copy(
    space: &FiniteMetricSpace,
    additions: &[(&str, &Subset)],
    path: &PathBuf,
) -> Result<()> {
    let mut copy = space.clone();
    for (name, set) in additions {
        copy = copy.with_named_subset(name, set.iter().collect())?;
    }
    write_output(Some(path), &schema::space_to_json_string(&copy))
}

fn run(cli: Cli, argv: Vec<String>) -> Result<u8> {
    let mut ctx = Ctx {
        argv,
        start: Instant::now(),
        inputs: Vec::new(),
        out: cli.out.clone(),
        allow_invalid: cli.allow_invalid,
    };

    match cli.command {
        Command::Gen { family } => {
            let space = match family {
                GenFamily::ExpRays { n_max, height, step } => {
                    gallery::gen_exp_rays(n_max, height, step)?
                }
                GenFamily::ExpStrips { n_max, step } => gallery::gen_exp_strips(n_max, step)?,
                GenFamily::Lattice { dim, side, norm } => {
                    gallery::gen_lattice(dim, side, norm.into())?
                }
                GenFamily::FreeBall { rank, radius } => {
                    gallery::gen_free_group_ball(rank, radius)?
                }
                GenFamily::LfGroup { terms } => gallery::gen_locally_finite_group(terms)?,
                GenFamily::Random { n, dim, box_side, seed } => {
                    gallery::gen_random(n, dim, box_side, seed)?
                }
            };
            write_output(ctx.out.as_ref(), &schema::space_to_json_string(&space))?;
            Ok(0)
        }

        Command::Metric { space } => {
            let loaded = ctx.load_space_with_validation(&space, false)?;
            let violations = loaded.validate_metric();
            let exit = if violations.is_empty() { 0 } else { 1 };
            let payload = json!({
                "name": loaded.name(),
                "points": loaded.len(),
                "diameter": loaded.diameter(),
                "min_positive_distance": loaded.min_positive_distance(),
                "violation_count": violations.len(),
                "violations": violations.iter().take(64).collect::<Vec<_>>(),
            });
            ctx.finish(json!({}), payload)?;
            Ok(exit)
        }

        Command::Convexity { space, r } => {
            let loaded = ctx.load_space(&space)?;
            let report = check_r_convexity(&loaded, r)?;
            let exit = if report.is_r_convex() { 0 } else { 1 };
            ctx.finish(json!({ "r": r }), report)?;
            Ok(exit)
        }

        Command::Components { space, r, point } => {
            let loaded = ctx.load_space(&space)?;
            let graph = ChainGraph::build(&loaded, r)?;
            let payload = match point {
                Some(x) => {
                    loaded.check_point(x)?;
                    let component = graph.component_of(x);
                    json!({ "r": r, "point": x, "component": component })
                }
                None => {
                    let labels = graph.component_labels();
                    let count = labels.iter().copied().max().map_or(0, |m| m as usize + 1);
                    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
                    for (id, &label) in labels.iter().enumerate() {
                        members[label as usize].push(id);
                    }
                    json!({ "r": r, "component_count": count, "components": members })
                }
            };
            ctx.finish(json!({ "r": r }), payload)?;
            Ok(0)
        }

        Command::Cut { action } => match action {
            CutAction::Verify { space, a, b, c, scale } => {
                let loaded = ctx.load_space(&space)?;
                let params = scale.to_params()?;
                let set_a = subset(&loaded, &a)?;
                let set_b = subset(&loaded, &b)?;
                let set_c = subset(&loaded, &c)?;
                let report = verify_cut(&loaded, &set_a, &set_b, &set_c, &params)?;
                let exit = if report.pass { 0 } else { 1 };
                ctx.finish(
                    json!({ "a": a, "b": b, "c": c, "scale": params }),
                    report,
                )?;
                Ok(exit)
            }
            CutAction::Find { space, a, b, r, emit_space, save_as } => {
                let loaded = ctx.load_space(&space)?;
                let set_a = subset(&loaded, &a)?;
                let set_b = subset(&loaded, &b)?;
                let cut = find_min_cut(&loaded, &set_a, &set_b, r)?;
                if let Some(path) = emit_space {
                    add_subset_copy(&loaded, &[(&save_as, &cut)], &path)?;
                }
                let payload = json!({ "cardinality": cut.len(), "cut": cut });
                ctx.finish(json!({ "a": a, "b": b, "r": r }), payload)?;
                Ok(0)
            }
        },

        Command::Sep { action } => match action {
            SepAction::Verify { space, a, b, c, x1, x2, t, scale } => {
                let loaded = ctx.load_space(&space)?;
                let params = scale.to_params()?;
                let report = verify_separator(
                    &loaded,
                    &subset(&loaded, &a)?,
                    &subset(&loaded, &b)?,
                    &subset(&loaded, &c)?,
                    &subset(&loaded, &x1)?,
                    &subset(&loaded, &x2)?,
                    &params,
                    t,
                )?;
                let exit = if report.pass { 0 } else { 1 };
                ctx.finish(
                    json!({ "a": a, "b": b, "c": c, "x1": x1, "x2": x2, "t": t, "scale": params }),
                    report,
                )?;
                Ok(exit)
            }
            SepAction::Construct {
                space,
                method,
                a,
                c,
                b,
                i_max,
                scale,
                emit_space,
            } => {
                let loaded = ctx.load_space(&space)?;
                let set_a = subset(&loaded, &a)?;
                let (x1, x2, method_name) = match method {
                    PartitionMethod::Reachable => {
                        let c_name = c
                            .as_deref()
                            .ok_or_else(|| anyhow!("--method reachable requires --c"))?;
                        let params = scale.to_params()?;
                        let set_c = subset(&loaded, c_name)?;
                        let (x1, x2) = reachable_partition(&loaded, &set_a, &set_c, &params)?;
                        (x1, x2, "reachable")
                    }
                    PartitionMethod::ZeroDim => {
                        let b_name = b
                            .as_deref()
                            .ok_or_else(|| anyhow!("--method zero-dim requires --b"))?;
                        let set_b = subset(&loaded, b_name)?;
                        let (x1, x2) = zero_dim_partition(&loaded, &set_a, &set_b, i_max)?;
                        (x1, x2, "zero_dim")
                    }
                };
                if let Some(path) = emit_space {
                    add_subset_copy(&loaded, &[("X1", &x1), ("X2", &x2)], &path)?;
                }
                let payload = json!({
                    "method": method_name,
                    "x1_size": x1.len(),
                    "x2_size": x2.len(),
                    "x1": x1,
                    "x2": x2,
                });
                ctx.finish(
                    json!({ "a": a, "b": b, "c": c, "i_max": i_max, "method": method_name }),
                    payload,
                )?;
                Ok(0)
            }
        },

        Command::Dim { action } => match action {
            DimAction::Asdim { space, r, d } => {
                let loaded = ctx.load_space(&space)?;
                let cert = estimate_asdim(&loaded, r, d)?;
                let (payload, exit) = dim_report(&loaded, cert);
                ctx.finish(json!({ "r": r, "d": d }), payload)?;
                Ok(exit)
            }
            DimAction::Asdg { space, pairs, depth, cuts, scale } => {
                let loaded = ctx.load_space(&space)?;
                let params = scale.to_params()?;
                let pair_sets = match &pairs {
                    Some(text) => parse_pairs(&loaded, text)?,
                    None => Vec::new(),
                };
                let mut opts = RecursionOptions::with_depth(depth);
                for name in &cuts {
                    opts.user_cuts.push(subset(&loaded, name)?);
                }
                let cert = estimate_asdg(&loaded, &pair_sets, &params, &opts)?;
                let (payload, exit) = dim_report(&loaded, cert);
                ctx.finish(
                    json!({ "pairs": pairs, "depth": depth, "scale": params }),
                    payload,
                )?;
                Ok(exit)
            }
            DimAction::Lsind { space, pairs, depth, cuts, i_max, scale } => {
                let loaded = ctx.load_space(&space)?;
                let params = scale.to_params()?;
                let pair_sets = match &pairs {
                    Some(text) => parse_pairs(&loaded, text)?,
                    None => Vec::new(),
                };
                let mut opts = RecursionOptions::with_depth(depth);
                opts.zero_dim_i_max = i_max;
                for name in &cuts {
                    opts.user_cuts.push(subset(&loaded, name)?);
                }
                let cert = estimate_lsind(&loaded, &pair_sets, &params, &opts)?;
                let (payload, exit) = dim_report(&loaded, cert);
                ctx.finish(
                    json!({ "pairs": pairs, "depth": depth, "i_max": i_max, "scale": params }),
                    payload,
                )?;
                Ok(exit)
            }
        },

        Command::Profile { action } => match action {
            ProfileAction::Gap { space, a, b, x0, radii } => {
                let loaded = ctx.load_space(&space)?;
                let radii = parse_radii(&radii)?;
                let profile = gap_profile(
                    &loaded,
                    &subset(&loaded, &a)?,
                    &subset(&loaded, &b)?,
                    x0,
                    &radii,
                )?;
                let csv = profile_csv(
                    profile
                        .radii
                        .iter()
                        .zip(&profile.gaps)
                        .map(|(&r, g)| (r, g.to_string())),
                );
                write_output(ctx.out.as_ref(), &csv)?;
                Ok(0)
            }
            ProfileAction::Growth { space, x, radii } => {
                let loaded = ctx.load_space(&space)?;
                let radii = parse_radii(&radii)?;
                let growth = component_growth(&loaded, x, &radii)?;
                let csv = profile_csv(growth.iter().map(|g| (g.r, g.diameter.to_string())));
                write_output(ctx.out.as_ref(), &csv)?;
                Ok(0)
            }
        },

        Command::Check { action } => match action {
            CheckAction::Axioms { space } => {
                let loaded = ctx.load_space_with_validation(&space, false)?;
                let violations = loaded.validate_metric();
                let exit = if violations.is_empty() { 0 } else { 1 };
                let payload = json!({
                    "violation_count": violations.len(),
                    "violations": violations.iter().take(64).collect::<Vec<_>>(),
                });
                ctx.finish(json!({}), payload)?;
                Ok(exit)
            }
            CheckAction::Props { seed, cases } => {
                let campaigns = props::run_all(seed, cases);
                let exit = if campaigns.iter().all(|c| c.passed()) { 0 } else { 1 };
                for campaign in &campaigns {
                    eprintln!(
                        "{}: {} cases, {} checks, {}",
                        campaign.name,
                        campaign.cases,
                        campaign.checks,
                        if campaign.passed() {
                            "pass".to_string()
                        } else {
                            format!("{} FAILURES", campaign.failures.len())
                        }
                    );
                }
                ctx.finish(json!({ "seed": seed, "cases": cases }), campaigns)?;
                Ok(exit)
            }
        },
    }
}

fn main() -> std::process::ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Clap uses exit code 2 for usage errors and 0 for help/version.
            e.exit();
        }
    };
    match run(cli, argv) {
        Ok(code) => std::process::ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::ExitCode::from(2)
        }
    }
}
