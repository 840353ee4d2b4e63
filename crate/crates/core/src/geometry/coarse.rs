use std::fmt::Debug;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::CayleyGraph;

/// Distance between two distinct blocks at 1-based positions `q < q2`.
pub trait CrossDistance: Debug + Send + Sync {
    fn distance(&self, q: usize, q2: usize, diam_q: u32, diam_q2: u32) -> u64;
    fn describe(&self) -> String;
}

/// `max(q, q', diam X_q, diam X_q') + 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MarginRule;

impl CrossDistance for MarginRule {
    fn distance(&self, q: usize, q2: usize, diam_q: u32, diam_q2: u32) -> u64 {
        (q as u64).max(q2 as u64).max(diam_q as u64).max(diam_q2 as u64) + 1
    }

    fn describe(&self) -> String {
        "max(q, q', diam(X_q), diam(X_q')) + 1".to_string()
    }
}

/// The coarse disjoint union of a list of Cayley graphs. Points are indexed
/// globally, block after block.
#[derive(Debug)]
pub struct CoarseSpace {
    blocks: Vec<CayleyGraph>,
    offsets: Vec<usize>,
    rule: Box<dyn CrossDistance>,
}

pub fn coarse_union(blocks: Vec<CayleyGraph>) -> CoarseSpace {
    CoarseSpace::with_rule(blocks, Box::new(MarginRule))
}

impl CoarseSpace {
    pub fn with_rule(blocks: Vec<CayleyGraph>, rule: Box<dyn CrossDistance>) -> Self {
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        let mut total = 0;
        offsets.push(0);
        for b in &blocks {
            total += b.vertices();
            offsets.push(total);
        }
        Self { blocks, offsets, rule }
    }

    pub fn blocks(&self) -> &[CayleyGraph] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CayleyGraph {
        &self.blocks[i]
    }

    pub fn rule_description(&self) -> String {
        self.rule.describe()
    }

    pub fn points(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    /// `(block, vertex)` of a global point index.
    pub fn locate(&self, x: usize) -> (usize, usize) {
        let b = self.offsets.partition_point(|&o| o <= x) - 1;
        (b, x - self.offsets[b])
    }

    pub fn global(&self, block: usize, vertex: usize) -> usize {
        self.offsets[block] + vertex
    }

    /// Distance between blocks at 0-based positions `a != b`.
    pub fn cross_distance(&self, a: usize, b: usize) -> u64 {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.rule
            .distance(a + 1, b + 1, self.blocks[a].diameter(), self.blocks[b].diameter())
    }

    pub fn distance(&self, x: usize, y: usize) -> u64 {
        let (bx, vx) = self.locate(x);
        let (by, vy) = self.locate(y);
        if bx == by {
            self.blocks[bx].distance(vx, vy) as u64
        } else {
            self.cross_distance(bx, by)
        }
    }

    /// Cross distances nondecreasing in both block positions and larger
    /// than both diameters involved.
    pub fn cross_rule_sound(&self) -> bool {
        let k = self.blocks.len();
        for a in 0..k {
            for b in a + 1..k {
                let d = self.cross_distance(a, b);
                if d <= self.blocks[a].diameter() as u64 || d <= self.blocks[b].diameter() as u64 {
                    return false;
                }
                if b + 1 < k && self.cross_distance(a, b + 1) < d {
                    return false;
                }
                if a + 1 < b && self.cross_distance(a + 1, b) < d {
                    return false;
                }
            }
        }
        true
    }

    /// Samples random point triples with a seeded generator and checks the
    /// triangle inequality and symmetry.
    pub fn triangle_check(&self, samples: usize, seed: u64) -> TriangleReport {
        let n = self.points();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut violations = 0;
        let mut first = None;
        for _ in 0..samples {
            let (x, y, z) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            let (xy, yz, xz) = (self.distance(x, y), self.distance(y, z), self.distance(x, z));
            if xz > xy + yz || xy != self.distance(y, x) || (xy == 0) != (x == y) {
                violations += 1;
                first.get_or_insert((x, y, z));
            }
        }
        TriangleReport {
            checked: samples,
            violations,
            first_violation: first,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleReport {
    pub checked: usize,
    pub violations: usize,
    pub first_violation: Option<(usize, usize, usize)>,
}

impl TriangleReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Largest ball `|B(x, r)|` over all points. Blocks are vertex-transitive,
/// so one centre per block suffices.
pub fn bounded_geometry_check(space: &CoarseSpace, r: f64) -> usize {
    let k = space.blocks().len();
    (0..k)
        .map(|a| {
            let inside = space.block(a).ball_size(r);
            let outside: usize = (0..k)
                .filter(|&b| b != a && space.cross_distance(a, b) as f64 <= r)
                .map(|b| space.block(b).vertices())
                .sum();
            inside + outside
        })
        .max()
        .unwrap_or(0)
}
