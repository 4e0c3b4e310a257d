//! Fibonacci numbers indexed so that `F_1 = 1, F_2 = 2`, and Zeckendorf
//! decompositions under that indexing.
//!
//! Height vectors are 1-based by meaning and 0-based in storage: entry `0`
//! of a slice counts chips worth `F_1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported index; `F_90` is the last value comfortably inside `u64`.
pub const MAX_INDEX: usize = 90;

const TABLE: [u64; MAX_INDEX + 1] = build_table();

const fn build_table() -> [u64; MAX_INDEX + 1] {
    let mut t = [0u64; MAX_INDEX + 1];
    t[1] = 1;
    t[2] = 2;
    let mut k = 3;
    while k <= MAX_INDEX {
        t[k] = t[k - 1] + t[k - 2];
        k += 1;
    }
    t
}

/// Largest `n` accepted by the decomposition functions.
pub const MAX_VALUE: u64 = TABLE[MAX_INDEX];

/// `F_k` for `1 <= k <= 90`.
pub fn fib(k: usize) -> Result<u64> {
    if k == 0 || k > MAX_INDEX {
        return Err(Error::Range {
            what: "fibonacci index",
            value: k as u64,
            range: "1..=90",
        });
    }
    Ok(TABLE[k])
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    if n > MAX_VALUE {
        return Err(Error::Range {
            what: "n",
            value: n,
            range: "1..=F_90",
        });
    }
    Ok(())
}

/// The largest `F_k <= n`, returned as `(F_k, k)`.
pub fn largest_fib_leq(n: u64) -> Result<(u64, usize)> {
    check_n(n)?;
    // TABLE[1..] is strictly increasing, so the partition point is the first index above n.
    let k = TABLE[1..].partition_point(|&f| f <= n);
    Ok((TABLE[k], k))
}

/// Greedy Zeckendorf decomposition of `n` as a 0/1 height vector.
pub fn zeckendorf(n: u64) -> Result<Vec<u32>> {
    check_n(n)?;
    let (_, top) = largest_fib_leq(n)?;
    let mut heights = vec![0u32; top];
    let mut rest = n;
    while rest > 0 {
        let (f, k) = largest_fib_leq(rest)?;
        heights[k - 1] = 1;
        rest -= f;
    }
    Ok(heights)
}

/// `Σ heights[i] · F_i`. Trailing zeros are allowed; the empty vector is 0.
///
/// Panics if a nonzero bin lies beyond `F_90` or the sum overflows `u64`.
pub fn value_of(heights: &[u32]) -> u64 {
    heights
        .iter()
        .enumerate()
        .filter(|(_, &h)| h > 0)
        .map(|(i, &h)| {
            assert!(i < MAX_INDEX, "bin {} exceeds F_{MAX_INDEX}", i + 1);
            TABLE[i + 1]
                .checked_mul(u64::from(h))
                .expect("state value overflows u64")
        })
        .fold(0u64, |acc, v| {
            acc.checked_add(v).expect("state value overflows u64")
        })
}

/// Zeckendorf form of `n` with its term count `Z(n)` and index sum `Z_I(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionStats {
    pub n: u64,
    pub heights: Vec<u32>,
    /// Number of terms, `Z(n)`.
    pub terms: u64,
    /// Sum of the indices of the terms, `Z_I(n)`.
    pub index_sum: u64,
}

pub fn decomposition_stats(n: u64) -> Result<DecompositionStats> {
    let heights = zeckendorf(n)?;
    let terms = heights.iter().map(|&h| u64::from(h)).sum();
    let index_sum = heights
        .iter()
        .enumerate()
        .map(|(i, &h)| (i as u64 + 1) * u64::from(h))
        .sum();
    Ok(DecompositionStats {
        n,
        heights,
        terms,
        index_sum,
    })
}
