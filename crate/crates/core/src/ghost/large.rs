//! Matrix-free treatment of blocks above the dense limit: Lanczos with
//! deflation pulls out the 1-cluster one vector at a time, and the first
//! Ritz value below the cluster gives the gap.

use faer::Mat;

use super::blocks::{oracle_value, BlockAnalysis, BlockOutcome, GapAtOne, PairGroup, SolverPath};
use super::{GhostError, GhostOptions, Window};
use crate::linalg::{lanczos_top, LanczosOptions};
use crate::rep::round_rank;

/// Imaginary parts below this are treated as zero.
const REAL_TOL: f64 = 1e-13;

fn real_image(window: &Window, n: usize, m: usize, g: usize) -> Result<Mat<f64>, GhostError> {
    let img = window.irrep(m).image(g);
    let worst = (0..img.nrows())
        .flat_map(|i| (0..img.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| img[(i, j)].im.abs())
        .fold(0.0, f64::max);
    if worst > REAL_TOL {
        return Err(GhostError::LargeBlockComplex { n, m });
    }
    Ok(Mat::from_fn(img.nrows(), img.ncols(), |i, j| img[(i, j)].re))
}

/// `out[a·x] += w · B · v[x]` over all points `x`, fibers of size `rd`.
fn apply_term(translation: &[u32], b: &Mat<f64>, w: f64, v: &[f64], out: &mut [f64]) {
    let rd = b.nrows();
    for (x, &ax) in translation.iter().enumerate() {
        let src = &v[x * rd..(x + 1) * rd];
        let dst = ax as usize * rd;
        for i in 0..rd {
            let s: f64 = (0..rd).map(|j| b[(i, j)] * src[j]).sum();
            out[dst + i] += w * s;
        }
    }
}

pub(crate) fn iterative_block(
    window: &Window,
    n: usize,
    m: usize,
    pair: &PairGroup,
    opts: &GhostOptions,
) -> Result<BlockOutcome, GhostError> {
    let g_n = &window.family().level(window.levels()[n])?.group;
    let rd = window.irrep(m).dim();
    let dim = g_n.order() * rd;

    let terms: Vec<(Vec<u32>, Mat<f64>)> = pair
        .genset
        .iter()
        .map(|&s| {
            Ok((
                g_n.left_translation(pair.to_left[s]),
                real_image(window, n, m, pair.to_right[s])?,
            ))
        })
        .collect::<Result<_, GhostError>>()?;
    let w = 1.0 / terms.len() as f64;
    let apply = |v: &[f64], out: &mut [f64]| {
        for (tr, b) in &terms {
            apply_term(tr, b, w, v, out);
        }
    };

    let oracle_value = oracle_value(window, n, m, pair);
    let oracle_rank = round_rank(oracle_value)?;
    let lanczos = LanczosOptions {
        max_iterations: 600,
        ..LanczosOptions::default()
    };

    let mut cluster: Vec<Vec<f64>> = Vec::new();
    let mut top = None;
    let gap = loop {
        if cluster.len() == dim {
            break GapAtOne {
                gap: 2.0,
                degenerate: true,
            };
        }
        let res = lanczos_top(dim, apply, &cluster, lanczos)?;
        top.get_or_insert(res.value);
        if res.value >= 1.0 - opts.cluster_threshold {
            cluster.push(res.vector);
            if cluster.len() > oracle_rank {
                break GapAtOne {
                    gap: f64::NAN,
                    degenerate: false,
                };
            }
            continue;
        }
        if res.value > 1.0 - opts.ambiguity_window {
            return Err(GhostError::ClusterAmbiguous { n, m, value: res.value });
        }
        break GapAtOne {
            gap: 1.0 - res.value,
            degenerate: false,
        };
    };
    let rank = cluster.len();
    if rank != oracle_rank {
        return Err(GhostError::OracleMismatch {
            n,
            m,
            numeric: rank,
            oracle: oracle_rank,
        });
    }

    // Fiber sums S_a = Σ_{q : q_N = a} π(q_M), so that the averaging
    // projection is (P v)[a·x] = (1/|Q|) Σ_a S_a v[x].
    let mut fibers: Vec<Option<Mat<f64>>> = vec![None; g_n.order()];
    for q in 0..pair.group.order() {
        let img = real_image(window, n, m, pair.to_right[q])?;
        let slot = &mut fibers[pair.to_left[q]];
        match slot {
            Some(acc) => *acc += &img,
            None => *slot = Some(img),
        }
    }
    let scale = 1.0 / pair.group.order() as f64;
    let fiber_terms: Vec<(Vec<u32>, Mat<f64>)> = fibers
        .into_iter()
        .enumerate()
        .filter_map(|(a, s)| s.map(|s| (g_n.left_translation(a), s)))
        .collect();
    // Both projections have rank r, so ‖VVᵀ − P‖² = 2 Σ_k ‖(I − P) v_k‖².
    let mut sq = 0.0;
    for v in &cluster {
        let mut pv = vec![0.0; dim];
        for (tr, s) in &fiber_terms {
            apply_term(tr, s, scale, v, &mut pv);
        }
        sq += v.iter().zip(&pv).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    }
    let projection_distance = (2.0 * sq).sqrt();
    if projection_distance > opts.projection_tol {
        return Err(GhostError::ProjectionMismatch {
            n,
            m,
            distance: projection_distance,
        });
    }

    Ok(BlockOutcome {
        analysis: BlockAnalysis {
            n,
            m,
            dim,
            quotient_order: pair.group.order(),
            gap,
            top_eigenvalue: top.unwrap_or(f64::NAN),
            bottom_eigenvalue: None,
            hermitian_defect: 0.0,
            rank,
            oracle_rank,
            oracle_value,
            projection_distance,
            idempotence_defect: None,
            path: SolverPath::Iterative,
        },
        t: None,
        e: None,
    })
}
