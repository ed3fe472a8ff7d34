//! Enumeration of set partitions with blocks of at most two elements.
//!
//! These index the terms of the smoothing-operator derivative formula: each
//! partition contributes the product of a first-order stochastic weight per
//! singleton block and a deterministic second-order weight per pair block.
//! The number of such partitions of an n-set is the involution number
//! 1, 1, 2, 4, 10, 26, 76, ... .

use crate::error::{Error, Result};

/// Largest n for which enumeration is supported. Derivative orders never
/// exceed 3; the guard leaves headroom without inviting blowup.
pub const MAX_PARTITION_ORDER: usize = 8;

/// A partition of `{0, .., n-1}` into blocks of size 1 or 2.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PartitionP2 {
    blocks: Vec<Block>,
}

/// One block: a singleton or an ordered pair (i < j).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Singleton(usize),
    Pair(usize, usize),
}

impl Block {
    fn key(&self) -> (usize, usize) {
        match *self {
            Block::Singleton(i) => (i, i),
            Block::Pair(i, j) => (i, j),
        }
    }
}

impl Ord for Block {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Block {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl PartitionP2 {
    /// Blocks in canonical order (sorted by smallest element).
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Number of singleton blocks.
    pub fn singleton_count(&self) -> usize {
        self.blocks
            .iter()
            .filter(|b| matches!(b, Block::Singleton(_)))
            .count()
    }
}

/// Enumerate all partitions of `{0, .., n-1}` with blocks of size at most 2,
/// in a deterministic canonical order. `n = 0` yields the single empty
/// partition.
pub fn p2_partitions(n: usize) -> Result<Vec<PartitionP2>> {
    if n > MAX_PARTITION_ORDER {
        return Err(Error::UnsupportedOrder(n, MAX_PARTITION_ORDER));
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    let mut remaining: Vec<usize> = (0..n).collect();
    recurse(&mut remaining, &mut current, &mut out);
    out.sort();
    Ok(out)
}

fn recurse(remaining: &mut Vec<usize>, current: &mut Vec<Block>, out: &mut Vec<PartitionP2>) {
    if remaining.is_empty() {
        let mut blocks = current.clone();
        blocks.sort();
        out.push(PartitionP2 { blocks });
        return;
    }
    // The smallest remaining element is either a singleton or pairs with one
    // of the others; this visits every partition exactly once.
    let first = remaining.remove(0);
    current.push(Block::Singleton(first));
    recurse(remaining, current, out);
    current.pop();
    for k in 0..remaining.len() {
        let partner = remaining.remove(k);
        current.push(Block::Pair(first, partner));
        recurse(remaining, current, out);
        current.pop();
        remaining.insert(k, partner);
    }
    remaining.insert(0, first);
}

/// Involution numbers I(n) = I(n-1) + (n-1) I(n-2), counting the partitions
/// enumerated by [`p2_partitions`].
pub fn involution_number(n: usize) -> u64 {
    let (mut a, mut b) = (1u64, 1u64); // I(0), I(1)
    if n == 0 {
        return a;
    }
    for k in 2..=n {
        let next = b + (k as u64 - 1) * a;
        a = b;
        b = next;
    }
    b
}
