use faer::Mat;

use super::{CoarseSpace, GeometryError};
use crate::ghost::BlockOperator;
use crate::linalg::{self, CMat};

/// Sub-blocks with Frobenius norm at or below this count as zero.
pub const NONZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationProfile {
    pub exact_propagation: f64,
    /// `(ε, R(ε))` in the order the thresholds were given.
    pub profile: Vec<(f64, f64)>,
}

/// Norm of the part of a block coupling points farther apart than `r`.
fn tail_norm(block: &CMat, dist: &[u32], points: usize, fiber: usize, r: u32) -> Result<f64, GeometryError> {
    let d = block.nrows();
    let tail = Mat::from_fn(d, d, |i, j| {
        if dist[(i / fiber) * points + j / fiber] > r {
            block[(i, j)]
        } else {
            faer::c64::new(0.0, 0.0)
        }
    });
    if linalg::hermitian_defect(&tail) <= 1e-12 {
        let vals = linalg::hermitian_eigenvalues(&tail)?;
        Ok(vals.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    } else {
        Ok(linalg::operator_norm(&tail)?)
    }
}

/// Exact propagation of `op` over `space`, and for each threshold `ε` the
/// least `R` such that zeroing every point-pair sub-block at distance `> R`
/// changes the operator norm by at most `ε`.
///
/// The operator is block diagonal over the `(N, M)` blocks, so the norm of a
/// perturbation is the largest norm among its blocks.
pub fn propagation(
    op: &BlockOperator,
    space: &CoarseSpace,
    thresholds: &[f64],
) -> Result<PropagationProfile, GeometryError> {
    if op.len() != space.blocks().len() {
        return Err(GeometryError::ShapeMismatch(format!(
            "{} operator positions vs {} space blocks",
            op.len(),
            space.blocks().len()
        )));
    }
    if op.has_implicit_blocks() {
        return Err(GeometryError::ShapeMismatch(
            "operator has blocks without dense matrices".into(),
        ));
    }
    for (i, axis) in op.axes().iter().enumerate() {
        if axis.points != space.block(i).vertices() {
            return Err(GeometryError::ShapeMismatch(format!(
                "position {i} has {} points, block has {}",
                axis.points,
                space.block(i).vertices()
            )));
        }
    }

    struct Item<'a> {
        block: &'a CMat,
        dist: &'a [u32],
        points: usize,
        fiber: usize,
        reach: u32,
    }
    let mut items = Vec::new();
    let mut exact = 0u32;
    for (&(n, m), block) in op.blocks() {
        let points = op.axes()[n].points;
        let fiber = op.axes()[m].fiber_dim;
        let dist = space.block(n).distance_table();
        let mut reach = 0u32;
        for x in 0..points {
            for y in 0..points {
                let dxy = dist[x * points + y];
                if dxy <= reach {
                    continue;
                }
                let mut sq = 0.0;
                for i in 0..fiber {
                    for j in 0..fiber {
                        sq += block[(x * fiber + i, y * fiber + j)].norm_sqr();
                    }
                }
                if sq.sqrt() > NONZERO_TOL {
                    reach = dxy;
                }
            }
        }
        exact = exact.max(reach);
        items.push(Item {
            block,
            dist,
            points,
            fiber,
            reach,
        });
    }

    // tails[r] = norm of what is removed by truncating at radius r.
    let mut tails = Vec::with_capacity(exact as usize + 1);
    for r in 0..=exact {
        let mut worst = 0.0f64;
        for it in items.iter().filter(|it| it.reach > r) {
            worst = worst.max(tail_norm(it.block, it.dist, it.points, it.fiber, r)?);
        }
        tails.push(worst);
    }
    let profile = thresholds
        .iter()
        .map(|&eps| {
            let r = tails.iter().position(|&t| t <= eps).unwrap_or(exact as usize);
            (eps, r as f64)
        })
        .collect();
    Ok(PropagationProfile {
        exact_propagation: exact as f64,
        profile,
    })
}
