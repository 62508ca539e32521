//! Deterministic compensated reductions.
//!
//! Every cell sum in the crate goes through [`tree_sum`]. The tree shape
//! depends only on the input length, so the result is bit-identical for any
//! rayon pool size.

use rayon::prelude::*;

const LEAF: usize = 256;
const PAR_CUTOFF: usize = 1 << 14;

/// Running sum with an error term.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Acc {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

impl Acc {
    #[inline]
    fn push(self, x: f64) -> Self {
        let (hi, e) = two_sum(self.hi, x);
        Acc { hi, lo: self.lo + e }
    }

    #[inline]
    fn merge(self, other: Acc) -> Self {
        let (hi, e) = two_sum(self.hi, other.hi);
        Acc {
            hi,
            lo: self.lo + other.lo + e,
        }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

fn leaf(xs: &[f64]) -> Acc {
    xs.iter().fold(Acc::default(), |a, &x| a.push(x))
}

fn tree(xs: &[f64]) -> Acc {
    if xs.len() <= LEAF {
        return leaf(xs);
    }
    let mid = split_point(xs.len());
    let (a, b) = xs.split_at(mid);
    if xs.len() >= PAR_CUTOFF {
        let (x, y) = rayon::join(|| tree(a), || tree(b));
        x.merge(y)
    } else {
        tree(a).merge(tree(b))
    }
}

/// Midpoint rounded to a multiple of the leaf size, so leaves stay full.
fn split_point(n: usize) -> usize {
    let blocks = n.div_ceil(LEAF);
    (blocks / 2) * LEAF
}

/// Pairwise compensated sum in a fixed tree order.
pub fn tree_sum(xs: &[f64]) -> f64 {
    tree(xs).value()
}

/// Maps `f` over `0..n` in parallel, then reduces with [`tree_sum`].
pub fn map_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let vals: Vec<f64> = (0..n).into_par_iter().map(f).collect();
    tree_sum(&vals)
}
