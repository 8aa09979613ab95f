//! Finitely supported multi-indices and graded truncation sets.
//!
//! A [`MultiIndex`] is stored in canonical form (trailing zeros dropped), so
//! `(1,0)` and `(1)` are the same value. [`IndexSet`] holds every index of
//! degree at most `K` supported on the first `N` coordinates, ordered
//! graded-lexicographically: by degree, then with larger leading entries
//! first. Position 0 is always the zero index.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex {
    entries: Vec<u32>,
    degree: u32,
}

impl MultiIndex {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(entries: &[u32]) -> Self {
        Self::from_vec(entries.to_vec())
    }

    fn from_vec(mut entries: Vec<u32>) -> Self {
        while entries.last() == Some(&0) {
            entries.pop();
        }
        let degree = entries.iter().sum();
        Self { entries, degree }
    }

    /// The unit index with a one at 0-based position `k`.
    pub fn unit(k: usize) -> Self {
        let mut entries = alloc::vec![0; k + 1];
        entries[k] = 1;
        Self { entries, degree: 1 }
    }

    /// `n` times the unit index at 0-based position `k`.
    pub fn scaled_unit(k: usize, n: u32) -> Self {
        if n == 0 {
            return Self::zero();
        }
        let mut entries = alloc::vec![0; k + 1];
        entries[k] = n;
        Self { entries, degree: n }
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// Entry at 0-based position `i` (zero past the stored support).
    pub fn get(&self, i: usize) -> u32 {
        self.entries.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of stored entries; the index is supported within this many
    /// leading coordinates.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `α! = Π α_j!`.
    pub fn factorial(&self) -> Result<u64> {
        let mut acc: u64 = 1;
        for &a in &self.entries {
            for m in 2..=a as u64 {
                acc = acc.checked_mul(m).ok_or(Error::Overflow("multi-index factorial"))?;
            }
        }
        Ok(acc)
    }

    /// `(2ℕ)^α = Π_j (2j)^{α_j}` with 1-based positions `j`.
    pub fn weight(&self) -> Result<u64> {
        let mut acc: u64 = 1;
        for (i, &a) in self.entries.iter().enumerate() {
            let base = 2 * (i as u64 + 1);
            let p = base.checked_pow(a).ok_or(Error::Overflow("multi-index weight"))?;
            acc = acc.checked_mul(p).ok_or(Error::Overflow("multi-index weight"))?;
        }
        Ok(acc)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.len().max(other.len());
        let entries = (0..n).map(|i| self.get(i) + other.get(i)).collect();
        Self { entries, degree: self.degree + other.degree }
    }

    /// `α − β` when `α ≥ β` entrywise.
    pub fn sub_checked(&self, other: &Self) -> Option<Self> {
        if other.len() > self.len() || other.degree > self.degree {
            return None;
        }
        let mut entries = self.entries.clone();
        for (e, &b) in entries.iter_mut().zip(&other.entries) {
            *e = e.checked_sub(b)?;
        }
        Some(Self::from_vec(entries))
    }

    /// `z^α = Π z_j^{α_j}` for any multiplicative monoid.
    pub fn monomial<T>(&self, z: &[T], one: T) -> T
    where
        T: Copy + core::ops::Mul<Output = T>,
    {
        let mut acc = one;
        for (j, &a) in self.entries.iter().enumerate() {
            for _ in 0..a {
                acc = acc * z[j];
            }
        }
        acc
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| other.entries.cmp(&self.entries))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(alloc::format!("multi-index {s:?} is not parenthesised")))?;
        if inner.trim().is_empty() {
            return Ok(Self::zero());
        }
        let entries = inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(alloc::format!("bad multi-index entry {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_vec(entries))
    }
}

/// All multi-indices with degree `≤ K` supported in the first `N` coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct IndexSet {
    max_degree: u32,
    max_dims: usize,
    members: Vec<MultiIndex>,
}

impl IndexSet {
    /// Panics if `max_dims == 0`.
    pub fn enumerate(max_degree: u32, max_dims: usize) -> Self {
        assert!(max_dims >= 1, "an index set needs at least one dimension");
        let mut members = Vec::new();
        let mut current = alloc::vec![0u32; max_dims];
        collect(&mut current, 0, max_degree, &mut members);
        members.sort();
        Self { max_degree, max_dims, members }
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn max_dims(&self) -> usize {
        self.max_dims
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[MultiIndex] {
        &self.members
    }

    pub fn get(&self, position: usize) -> Option<&MultiIndex> {
        self.members.get(position)
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        if alpha.degree() > self.max_degree || alpha.len() > self.max_dims {
            return None;
        }
        self.members.binary_search(alpha).ok()
    }

    pub fn contains(&self, alpha: &MultiIndex) -> bool {
        self.position(alpha).is_some()
    }

    /// Positions of the members with exactly the given degree (contiguous).
    pub fn level(&self, degree: u32) -> core::ops::Range<usize> {
        let start = self.members.partition_point(|m| m.degree() < degree);
        let end = self.members.partition_point(|m| m.degree() <= degree);
        start..end
    }

    /// Header line `K=<k> N=<n>` used by every persisted artifact.
    pub fn header(&self) -> String {
        alloc::format!("K={} N={}", self.max_degree, self.max_dims)
    }

    pub fn parse_header(line: &str) -> Result<(u32, usize)> {
        let mut k = None;
        let mut n = None;
        for tok in line.split_whitespace() {
            if let Some(v) = tok.strip_prefix("K=") {
                k = v.parse().ok();
            } else if let Some(v) = tok.strip_prefix("N=") {
                n = v.parse().ok();
            }
        }
        match (k, n) {
            (Some(k), Some(n)) if n >= 1 => Ok((k, n)),
            _ => Err(Error::Parse(alloc::format!("bad index-set header {line:?}"))),
        }
    }

    /// Header followed by the ordered member list, one per line.
    pub fn serialize(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for m in &self.members {
            out.push_str(&m.to_string());
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IndexSet({}, {} members)", self.header(), self.len())
    }
}

fn collect(current: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos == current.len() {
        out.push(MultiIndex::new(current));
        return;
    }
    for v in 0..=remaining {
        current[pos] = v;
        collect(current, pos + 1, remaining - v, out);
    }
    current[pos] = 0;
}

pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}
