//! The `family`, `certify` and `ghost` commands as library calls. Each
//! returns a printable summary, a JSON report and, where relevant, CSV.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::Value;

use crate::config::{ConfigError, RunConfig};
use crate::families::FamilyError;
use crate::geometry::{
    coarse_union, laplacian_gap, propagation, spectra_csv, CayleyGraph, CollapseFlags, GeometryError, LaplacianGap,
    SpectrumRow, LAPLACIAN_IDENTITY_TOL, NONZERO_TOL,
};
use crate::ghost::{
    analyze_window, classical_ghost, diagonal_ranks, rank_sequence, truncate_to_j, verify_claim1, verify_claim2,
    verify_claim3, GhostError, GhostOptions, Window, PASS,
};
use crate::group::{QuotientFamily, DEFAULT_CAP};
use crate::linalg;
use crate::rep::{IRREDUCIBLE_TOL, RANK_GUARD};
use crate::report::{format_sig, num, object, to_value, HEADER, SCHEMA};

/// Samples drawn for the triangle-inequality check of the window's space.
pub const TRIANGLE_SAMPLES: usize = 10_000;
pub const TRIANGLE_SEED: u64 = 0;
/// Thresholds `ε` for the classical ghost's propagation profile.
pub const GHOST_EPSILONS: [f64; 2] = [0.1, 0.01];

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {message}")]
    Verification {
        message: String,
        block: Option<(usize, usize)>,
    },
}

impl CommandError {
    /// 2 for usage and configuration problems, 1 for failed verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Usage(_) => 2,
            Self::Verification { .. } => 1,
        }
    }

    fn verification(e: impl std::fmt::Display) -> Self {
        Self::Verification {
            message: e.to_string(),
            block: None,
        }
    }
}

impl From<GhostError> for CommandError {
    fn from(e: GhostError) -> Self {
        match e {
            GhostError::Family(FamilyError::UnsupportedPolicy { .. }) | GhostError::BadWindow(_) => {
                Self::Usage(e.to_string())
            }
            other => Self::Verification {
                block: other.block(),
                message: other.to_string(),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub summary: String,
    pub report: Value,
    pub csv: Option<String>,
}

fn build_family(cfg: &RunConfig) -> Result<QuotientFamily, CommandError> {
    cfg.validate()?;
    cfg.family_spec()?
        .build()
        .map_err(|e| CommandError::Usage(format!("cannot build family: {e}")))
}

fn window_levels(cfg: &RunConfig, family: &QuotientFamily) -> Result<Vec<usize>, CommandError> {
    let levels = cfg
        .window
        .clone()
        .unwrap_or_else(|| (0..family.levels().len()).collect());
    if let Some(&bad) = levels.iter().find(|&&l| l >= family.levels().len()) {
        return Err(ConfigError::Invalid(format!(
            "window level {bad} out of range (family has {} levels)",
            family.levels().len()
        ))
        .into());
    }
    Ok(levels)
}

fn pool(parallelism: usize) -> Result<rayon::ThreadPool, CommandError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(CommandError::verification)
}

struct Spectrum {
    graph: CayleyGraph,
    flags: CollapseFlags,
    gap: LaplacianGap,
}

fn spectra(family: &QuotientFamily, levels: &[usize], parallelism: usize) -> Result<Vec<Spectrum>, CommandError> {
    let results: Vec<Result<Spectrum, GeometryError>> = pool(parallelism)?.install(|| {
        levels
            .par_iter()
            .map(|&l| {
                let (graph, flags) = CayleyGraph::from_level(&family.levels()[l])?;
                let gap = laplacian_gap(&graph)?;
                Ok(Spectrum { graph, flags, gap })
            })
            .collect()
    });
    results
        .into_iter()
        .zip(levels)
        .map(|(r, &l)| {
            r.map_err(|e| CommandError::Verification {
                message: format!("certificate refused for {}: {e}", family.levels()[l].label),
                block: Some((l, l)),
            })
        })
        .collect()
}

fn spectrum_rows(family: &QuotientFamily, levels: &[usize], spectra: &[Spectrum]) -> Vec<SpectrumRow> {
    levels
        .iter()
        .zip(spectra)
        .map(|(&l, s)| SpectrumRow {
            block_label: family.levels()[l].label.clone(),
            dim: s.graph.vertices(),
            degree: s.graph.degree(),
            diameter: s.graph.diameter(),
            lambda1: s.gap.lambda1,
            mu2: s.gap.mu2,
        })
        .collect()
}

fn spectra_json(rows: &[SpectrumRow], spectra: &[Spectrum]) -> Value {
    Value::Array(
        rows.iter()
            .zip(spectra)
            .map(|(r, s)| {
                object([
                    ("block_label", r.block_label.clone().into()),
                    ("dim", r.dim.into()),
                    ("degree", r.degree.into()),
                    ("diameter", r.diameter.into()),
                    ("lambda1", num(r.lambda1)),
                    ("mu2", num(r.mu2)),
                    ("identity_defect", num(s.gap.identity_defect)),
                    ("identity_symbols", to_value(&s.flags.identity_symbols)),
                    ("duplicate_symbols", to_value(&s.flags.duplicate_symbols)),
                ])
            })
            .collect(),
    )
}

fn trend(values: &[f64]) -> &'static str {
    if values.len() < 2 {
        "single"
    } else if values.windows(2).all(|w| w[0] < w[1]) {
        "increasing"
    } else if values.windows(2).all(|w| w[0] > w[1]) {
        "decreasing"
    } else {
        "mixed"
    }
}

fn config_echo(cfg: &RunConfig, levels: &[usize]) -> Value {
    object([
        ("kind", cfg.kind.clone().into()),
        ("primes", to_value(&cfg.primes)),
        ("degrees", to_value(&cfg.degrees)),
        ("policy", cfg.policy().name().into()),
        ("window", to_value(&levels)),
        ("truncate", to_value(&cfg.truncate)),
    ])
}

fn family_json(family: &QuotientFamily) -> Value {
    object([
        ("symbols", family.symbols().len().into()),
        ("pairing", to_value(&family.symbols().pairing())),
        (
            "labels",
            to_value(&family.levels().iter().map(|l| l.label.clone()).collect::<Vec<_>>()),
        ),
        ("orders", to_value(&family.orders())),
        ("index_growth_strict", family.index_growth_strict().into()),
    ])
}

/// Orders, Cayley-graph degrees and the symmetry check of a family.
pub fn cmd_family(cfg: &RunConfig) -> Result<CommandOutput, CommandError> {
    let family = build_family(cfg)?;
    let symmetry = family.check_symmetric().map_err(CommandError::verification)?;
    let degrees: Vec<usize> = family
        .levels()
        .iter()
        .map(|l| CayleyGraph::from_level(l).map(|(g, _)| g.degree()))
        .collect::<Result<_, _>>()
        .map_err(CommandError::verification)?;
    let mut summary = format!("family {} with {} symbols\n", cfg.kind, family.symbols().len());
    for (l, d) in family.levels().iter().zip(&degrees) {
        summary.push_str(&format!(
            "  {:<10} order {:>8}  degree {}\n",
            l.label,
            l.group.order(),
            d
        ));
    }
    summary.push_str(&format!(
        "orders: {}\nsymmetric: yes ({} levels checked)\n",
        family
            .orders()
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(","),
        symmetry.levels
    ));
    let report = object([
        ("schema", SCHEMA.into()),
        ("command", "family".into()),
        ("family", family_json(&family)),
        ("degrees", to_value(&degrees)),
        ("symmetric", true.into()),
    ]);
    Ok(CommandOutput {
        summary,
        report,
        csv: None,
    })
}

/// Laplacian gaps of the window's Cayley graphs.
pub fn cmd_certify(cfg: &RunConfig) -> Result<CommandOutput, CommandError> {
    let start = Instant::now();
    let family = build_family(cfg)?;
    let levels = window_levels(cfg, &family)?;
    let spectra = spectra(&family, &levels, cfg.parallelism)?;
    let rows = spectrum_rows(&family, &levels, &spectra);
    let lambdas: Vec<f64> = rows.iter().map(|r| r.lambda1).collect();
    let min = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    let degree_uniform = rows.windows(2).all(|w| w[0].degree == w[1].degree);
    let mut summary = String::new();
    for r in &rows {
        summary.push_str(&format!(
            "  {:<10} |V| {:>8}  degree {}  diameter {}  lambda1 {}\n",
            r.block_label,
            r.dim,
            r.degree,
            r.diameter,
            format_sig(r.lambda1, 6)
        ));
    }
    summary.push_str(&format!(
        "min lambda1 = {} (trend: {})\n",
        format_sig(min, 6),
        trend(&lambdas)
    ));
    let report = object([
        ("schema", SCHEMA.into()),
        ("command", "certify".into()),
        ("header", HEADER.into()),
        ("config", config_echo(cfg, &levels)),
        ("family", family_json(&family)),
        ("spectra", spectra_json(&rows, &spectra)),
        ("min_lambda1", num(min)),
        ("trend", trend(&lambdas).into()),
        ("degree_uniform", degree_uniform.into()),
        (
            "constants",
            object([("laplacian_identity_tol", num(LAPLACIAN_IDENTITY_TOL))]),
        ),
        (
            "timing",
            object([
                ("parallelism", cfg.parallelism.into()),
                ("seconds", num(start.elapsed().as_secs_f64())),
            ]),
        ),
    ]);
    Ok(CommandOutput {
        summary,
        report,
        csv: Some(spectra_csv(&rows)),
    })
}

fn constants(opts: &GhostOptions, rule: String) -> Value {
    object([
        ("cluster_threshold", num(opts.cluster_threshold)),
        ("projection_tol", num(opts.projection_tol)),
        ("ambiguity_window", num(opts.ambiguity_window)),
        ("dense_limit", opts.dense_limit.into()),
        ("closure_cap", DEFAULT_CAP.into()),
        ("rank_guard", num(RANK_GUARD)),
        ("irreducible_tol", num(IRREDUCIBLE_TOL)),
        ("nonzero_tol", num(NONZERO_TOL)),
        ("laplacian_identity_tol", num(LAPLACIAN_IDENTITY_TOL)),
        ("cross_distance_rule", rule.into()),
        ("triangle_samples", TRIANGLE_SAMPLES.into()),
    ])
}

/// The whole pipeline: `T`, `e`, ranks, the three claims, the classical
/// ghost baseline and the metric check.
pub fn cmd_ghost(cfg: &RunConfig) -> Result<CommandOutput, CommandError> {
    let start = Instant::now();
    let family = Arc::new(build_family(cfg)?);
    let levels = window_levels(cfg, &family)?;
    let opts = cfg.ghost_options();
    let window = Window::new(family.clone(), levels.clone(), &cfg.policy())?;

    let spectra = spectra(&family, &levels, cfg.parallelism)?;
    let rows = spectrum_rows(&family, &levels, &spectra);
    let analysis = analyze_window(&window, &opts)?;
    let ranks = rank_sequence(&analysis.e, &analysis.oracle_table(window.len()))?;
    let claim1 = verify_claim1(&analysis, &opts)?;
    let claim2: Vec<_> = (0..window.len()).map(|n| verify_claim2(&window, &ranks, n)).collect();
    let claim3 = verify_claim3(&analysis.e)?;

    let truncation = match cfg.truncate {
        Some(k) => {
            let ranks = diagonal_ranks(&truncate_to_j(&analysis.e, k))?;
            let tail = ranks.get(k.min(ranks.len())..).unwrap_or(&[]).to_vec();
            object([
                ("k", k.into()),
                ("diagonal_ranks", to_value(&ranks)),
                ("tail", to_value(&tail)),
            ])
        }
        None => Value::Null,
    };

    let spectra_value = spectra_json(&rows, &spectra);
    let space = coarse_union(spectra.into_iter().map(|s| s.graph).collect());
    let classical = classical_ghost(&window);
    let mut ghost_blocks = Vec::new();
    for n in 0..window.len() {
        let profile = propagation(&classical.restrict_to_level(n), &space, &GHOST_EPSILONS)
            .map_err(CommandError::verification)?;
        ghost_blocks.push(object([
            ("label", window.label(n).into()),
            ("entry", num(1.0 / window.order(n) as f64)),
            ("exact_propagation", num(profile.exact_propagation)),
            (
                "profile",
                Value::Array(
                    profile
                        .profile
                        .iter()
                        .map(|&(eps, r)| object([("epsilon", num(eps)), ("r", num(r))]))
                        .collect(),
                ),
            ),
        ]));
    }
    let trivial_agreement = if cfg.policy().name() == "trivial" {
        let worst = analysis
            .e
            .blocks()
            .map(|(&(n, _), e)| linalg::frobenius_distance(e, classical.block(n, n).expect("diagonal block")))
            .fold(0.0, f64::max);
        num(worst)
    } else {
        Value::Null
    };
    let triangle = space.triangle_check(TRIANGLE_SAMPLES, TRIANGLE_SEED);

    let claim2_verdict = claim2
        .iter()
        .map(|r| r.verdict.clone())
        .find(|v| v != PASS)
        .unwrap_or_else(|| {
            if claim2.is_empty() {
                "vacuous (empty window)".into()
            } else {
                PASS.into()
            }
        });
    let blocks_json = Value::Array(
        analysis
            .blocks
            .iter()
            .map(|b| {
                object([
                    ("n", b.n.into()),
                    ("m", b.m.into()),
                    ("dim", b.dim.into()),
                    ("quotient_order", b.quotient_order.into()),
                    ("gap", num(b.gap.gap)),
                    ("degenerate", b.gap.degenerate.into()),
                    ("top_eigenvalue", num(b.top_eigenvalue)),
                    ("rank", b.rank.into()),
                    ("oracle_rank", b.oracle_rank.into()),
                    ("projection_distance", num(b.projection_distance)),
                    ("path", to_value(&b.path)),
                ])
            })
            .collect(),
    );

    let mut summary = format!("{HEADER}\n");
    summary.push_str(&format!(
        "window {} ({} policy), dims {:?}\n",
        levels
            .iter()
            .map(|&l| family.levels()[l].label.clone())
            .collect::<Vec<_>>()
            .join(", "),
        window.policy(),
        window.dims()
    ));
    summary.push_str(&format!("diagonal ranks {:?}\n", ranks.diagonal));
    summary.push_str(&format!("min pair gap {}\n", format_sig(claim1.min_gap, 6)));
    summary.push_str(&format!(
        "claim1: {}\nclaim2: {}\nclaim3: {}\n",
        claim1.verdict, claim2_verdict, claim3.verdict
    ));

    let report = object([
        ("schema", SCHEMA.into()),
        ("command", "ghost".into()),
        (
            "tool",
            object([
                ("name", "ghost-lab".into()),
                ("version", env!("CARGO_PKG_VERSION").into()),
            ]),
        ),
        ("header", HEADER.into()),
        ("config", config_echo(cfg, &levels)),
        ("constants", constants(&opts, space.rule_description())),
        ("family", family_json(&family)),
        (
            "window",
            object([
                ("levels", to_value(&levels)),
                (
                    "labels",
                    to_value(
                        &(0..window.len())
                            .map(|p| window.label(p).to_string())
                            .collect::<Vec<_>>(),
                    ),
                ),
                (
                    "orders",
                    to_value(&(0..window.len()).map(|p| window.order(p)).collect::<Vec<_>>()),
                ),
                ("dims", to_value(&window.dims())),
                ("policy", window.policy().into()),
            ]),
        ),
        ("spectra", spectra_value),
        ("blocks", blocks_json),
        ("ranks", to_value(&ranks)),
        ("claim1", to_value(&claim1)),
        ("claim2", to_value(&claim2)),
        ("claim3", to_value(&claim3)),
        ("truncation", truncation),
        (
            "classical_ghost",
            object([
                ("blocks", Value::Array(ghost_blocks)),
                ("trivial_window_distance", trivial_agreement),
            ]),
        ),
        (
            "metric",
            object([
                ("rule", space.rule_description().into()),
                ("cross_rule_sound", space.cross_rule_sound().into()),
                ("triangle_checked", triangle.checked.into()),
                ("triangle_violations", triangle.violations.into()),
            ]),
        ),
        (
            "flags",
            object([
                ("star", claim1.star.into()),
                ("star_star", window.dims_strictly_increasing().into()),
            ]),
        ),
        (
            "verdicts",
            object([
                ("window", to_value(&levels)),
                ("oracle", "pass".into()),
                ("claim1", claim1.verdict.clone().into()),
                ("claim2", claim2_verdict.into()),
                ("claim3", claim3.verdict.clone().into()),
            ]),
        ),
        (
            "timing",
            object([
                ("parallelism", cfg.parallelism.into()),
                ("seconds", num(start.elapsed().as_secs_f64())),
            ]),
        ),
    ]);
    Ok(CommandOutput {
        summary,
        report,
        csv: Some(spectra_csv(&rows)),
    })
}
