//! Deterministic floating-point reductions and the counter-based generator
//! used for reproducible sampling.
//!
//! Every parallel sweep in this crate maps fixed-order chunks to partial
//! results and combines them in a fixed order, so outputs are bit-identical
//! for any thread count.

use num_complex::Complex64;

/// Terms per summation block; block sums are combined pairwise.
pub(crate) const BLOCK: usize = 1 << 10;

/// Pairwise (tree) reduction of a list of partial sums, in place.
pub(crate) fn tree_sum_complex(mut blocks: Vec<Complex64>) -> Complex64 {
    if blocks.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    while blocks.len() > 1 {
        let mut next = Vec::with_capacity(blocks.len().div_ceil(2));
        for pair in blocks.chunks(2) {
            next.push(if pair.len() == 2 { pair[0] + pair[1] } else { pair[0] });
        }
        blocks = next;
    }
    blocks[0]
}

/// Sum an iterator of complex terms in blocks of [`BLOCK`] with a pairwise
/// combination of the block sums.
pub(crate) fn blocked_sum_complex<I: Iterator<Item = Complex64>>(iter: I) -> Complex64 {
    let mut blocks = Vec::new();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut in_block = 0usize;
    for term in iter {
        acc += term;
        in_block += 1;
        if in_block == BLOCK {
            blocks.push(acc);
            acc = Complex64::new(0.0, 0.0);
            in_block = 0;
        }
    }
    if in_block > 0 {
        blocks.push(acc);
    }
    tree_sum_complex(blocks)
}

/// SplitMix64 step: advances `state` and returns the next output.
pub(crate) fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent stream key from a base seed and a stream index.
pub(crate) fn stream_key(seed: u64, index: u64) -> u64 {
    let mut s = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    splitmix64(&mut s)
}

/// Uniform draw in `0..bound` from a SplitMix64 state (`bound >= 1`).
pub(crate) fn bounded(state: &mut u64, bound: u64) -> u64 {
    debug_assert!(bound >= 1);
    splitmix64(state) % bound
}
