//! Bitmask enumeration of action spaces with exact scaled-integer scores.
//!
//! A profile is a `u64` whose bit `i` is set when node `i` plays `x`. Every
//! quantity the solvers compare has the form `(1 + α)·a + b` with integer
//! `a, b`, so comparisons reduce to `i128` arithmetic once `α = p/q` is fixed.

use std::cmp::Ordering;

use num_bigint::BigInt;

use crate::adversary::ActionSpace;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rational::{as_i128_pair, Rational};

/// Largest number of free nodes any exhaustive enumeration will visit.
pub const ENUMERATION_CAP: usize = 24;
const MASK_WIDTH: usize = 64;

/// Integer pair standing for `(1 + α)·a + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub(crate) struct Score {
    pub a: i64,
    pub b: i64,
}

impl std::ops::Add for Score {
    type Output = Score;
    fn add(self, o: Score) -> Score {
        Score { a: self.a + o.a, b: self.b + o.b }
    }
}

/// A gain `α = p/q` ready for exact score comparisons.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Scaled {
    p: i128,
    q: i128,
}

impl Scaled {
    pub fn new(alpha: &Rational) -> Result<Self> {
        let (p, q) = as_i128_pair(alpha)?;
        Ok(Scaled { p, q })
    }

    fn scaled(&self, s: &Score) -> i128 {
        (self.q + self.p) * s.a as i128 + self.q * s.b as i128
    }

    pub fn cmp(&self, l: &Score, r: &Score) -> Ordering {
        self.scaled(l).cmp(&self.scaled(r))
    }

    pub fn value(&self, s: &Score) -> Rational {
        Rational::new(BigInt::from(self.scaled(s)), BigInt::from(self.q))
    }
}

/// Graph plus action space, flattened to masks.
pub(crate) struct Context {
    pub n: usize,
    pub adj: Vec<u64>,
    pub full: u64,
    pub free: u64,
    pub fixed_x: u64,
}

impl Context {
    pub fn new(g: &Graph, space: &ActionSpace) -> Result<Self> {
        let ctx = Self::unbounded(g, space)?;
        let free_count = ctx.free.count_ones() as usize;
        if free_count > ENUMERATION_CAP {
            return Err(Error::CapExceeded { what: "free nodes", got: free_count, limit: ENUMERATION_CAP });
        }
        Ok(ctx)
    }

    /// Like [`Context::new`] without the free-node cap, for callers that never enumerate the whole space.
    pub fn unbounded(g: &Graph, space: &ActionSpace) -> Result<Self> {
        let n = g.node_count();
        if space.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: space.len() });
        }
        if n > MASK_WIDTH {
            return Err(Error::CapExceeded { what: "node count", got: n, limit: MASK_WIDTH });
        }
        Ok(Context { n, adj: g.adjacency_masks(), full: full_mask(n), free: space.free_mask(), fixed_x: space.fixed_x_mask() })
    }

    /// All profiles of the space, in increasing submask order of the free nodes.
    pub fn profiles(&self) -> impl Iterator<Item = u64> + '_ {
        let fixed_x = self.fixed_x;
        submasks(self.free).map(move |sub| fixed_x | sub)
    }

    /// Folds `step` over every profile, splitting the space into chunks on the
    /// highest free bits. Chunk results are combined with `merge` in no
    /// particular order, so `merge` must not care about order.
    pub fn scan<A, I, S, M>(&self, init: I, step: S, merge: M) -> A
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        S: Fn(&mut A, u64) + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        let free_bits: Vec<u32> = (0..self.n as u32).filter(|&i| self.free >> i & 1 == 1).collect();
        let split = free_bits.len().saturating_sub(CHUNK_LOW_BITS);
        let high: u64 = free_bits[free_bits.len() - split..].iter().fold(0, |m, &i| m | 1 << i);
        let low = self.free & !high;
        let run_chunk = |h: u64| {
            let mut acc = init();
            let mut sub = 0u64;
            loop {
                step(&mut acc, self.fixed_x | h | sub);
                if sub == low {
                    break;
                }
                sub = ((sub | !low).wrapping_add(1)) & low;
            }
            acc
        };
        let heads: Vec<u64> = submasks(high).collect();
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            heads.into_par_iter().map(run_chunk).reduce(&init, &merge)
        }
        #[cfg(not(feature = "parallel"))]
        {
            heads.into_iter().map(run_chunk).fold(init(), &merge)
        }
    }

    /// Coordinating `x`-`x` and `y`-`y` edge counts.
    pub fn coordinating(&self, x: u64) -> (i64, i64) {
        let y = !x & self.full;
        let mut xx = 0u32;
        let mut yy = 0u32;
        for i in 0..self.n {
            if x >> i & 1 == 1 {
                xx += (self.adj[i] & x).count_ones();
            } else {
                yy += (self.adj[i] & y).count_ones();
            }
        }
        ((xx / 2) as i64, (yy / 2) as i64)
    }

    /// Half the true welfare: `(1 + α)·#xx + #yy`.
    pub fn welfare_score(&self, x: u64) -> Score {
        let (xx, yy) = self.coordinating(x);
        Score { a: xx, b: yy }
    }

    /// Coordinating edge counts restricted to edges touching `part`.
    pub fn local_coordinating(&self, x: u64, part: u64) -> (i64, i64) {
        let y = !x & self.full;
        let mut xx = 0i64;
        let mut yy = 0i64;
        for i in 0..self.n {
            if part >> i & 1 == 0 {
                continue;
            }
            // Edges to the outside once, internal edges once per endpoint.
            let (same, inside) = if x >> i & 1 == 1 { (self.adj[i] & x, &mut xx) } else { (self.adj[i] & y, &mut yy) };
            let internal = (same & part).count_ones() as i64;
            let external = (same & !part).count_ones() as i64;
            *inside += 2 * external + internal;
        }
        // Doubled above so internal edges could be halved exactly.
        (xx / 2, yy / 2)
    }

    /// Order key that sorts profiles lexicographically, `x < y`, node 0 first.
    pub fn lex_key(&self, x: u64) -> u64 {
        (0..self.n).fold(0u64, |k, i| (k << 1) | (!x >> i & 1))
    }
}

/// Free bits enumerated inside one chunk of [`Context::scan`].
const CHUNK_LOW_BITS: usize = 14;

/// Submasks of `mask` in increasing order, starting with 0.
pub(crate) fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut sub: Option<u64> = Some(0);
    std::iter::from_fn(move || {
        let cur = sub?;
        sub = if cur == mask { None } else { Some(((cur | !mask).wrapping_add(1)) & mask) };
        Some(cur)
    })
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}
