//! Adjacency matrices, admissible sequences, and two-row tableaux.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::{Error, Result};

/// Symmetric non-negative integer matrix with zero diagonal. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AdjacencyMatrix {
    size: usize,
    entries: Vec<u32>,
}

impl AdjacencyMatrix {
    pub fn zero(size: usize) -> Self {
        AdjacencyMatrix { size, entries: vec![0; size * size] }
    }

    /// Validates squareness, symmetry and the zero diagonal.
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self> {
        let size = rows.len();
        let mut entries = Vec::with_capacity(size * size);
        for row in &rows {
            if row.len() != size {
                return Err(Error::InvalidAdjacency("matrix is not square"));
            }
            entries.extend_from_slice(row);
        }
        let m = AdjacencyMatrix { size, entries };
        for i in 0..size {
            if m.get(i, i) != 0 {
                return Err(Error::InvalidAdjacency("non-zero diagonal entry"));
            }
            for j in 0..i {
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::InvalidAdjacency("matrix is not symmetric"));
                }
            }
        }
        Ok(m)
    }

    /// Builds a matrix from upper-triangle entries `(i, j, m_ij)`, `i != j`.
    /// Repeated pairs accumulate.
    pub fn from_pairs(size: usize, pairs: impl IntoIterator<Item = (usize, usize, u32)>) -> Result<Self> {
        let mut m = AdjacencyMatrix::zero(size);
        for (i, j, v) in pairs {
            if i >= size || j >= size {
                return Err(Error::VertexOutOfRange { vertex: i.max(j), count: size });
            }
            if i == j {
                return Err(Error::SelfLoop { vertex: i });
            }
            m.add_pair(i, j, v);
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.size + j]
    }

    pub(crate) fn add_pair(&mut self, i: usize, j: usize, v: u32) {
        self.entries[i * self.size + j] += v;
        self.entries[j * self.size + i] += v;
    }

    fn set_pair(&mut self, i: usize, j: usize, v: u32) {
        self.entries[i * self.size + j] = v;
        self.entries[j * self.size + i] = v;
    }

    /// `deg M = sum_ij m_ij`, twice the number of edges.
    pub fn degree(&self) -> u32 {
        self.entries.iter().sum()
    }

    pub fn row_sums(&self) -> Vec<u32> {
        self.entries.chunks(self.size.max(1)).take(self.size).map(|r| r.iter().sum()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    /// Non-zero upper-triangle entries `(i, j, m_ij)` with `i < j`, row-major.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        (0..self.size)
            .flat_map(move |i| (i + 1..self.size).map(move |j| (i, j, self.get(i, j))))
            .filter(|&(_, _, v)| v > 0)
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.size.max(1)).take(self.size).map(<[u32]>::to_vec).collect()
    }

    /// Entry-wise sum.
    pub fn checked_add(&self, other: &AdjacencyMatrix) -> Result<AdjacencyMatrix> {
        if self.size != other.size {
            return Err(Error::BoundaryMismatch { left: self.size, right: other.size });
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(AdjacencyMatrix { size: self.size, entries })
    }

    /// Multinomial `k! / prod_(i<j) m_ij!` with `k = deg M / 2`.
    pub fn multinomial(&self) -> BigUint {
        let parts: Vec<u32> = self.upper_entries().map(|(_, _, v)| v).collect();
        multinomial(self.degree() / 2, &parts).expect("parts sum to half the degree")
    }
}

impl fmt::Display for AdjacencyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (r, row) in self.rows().iter().enumerate() {
            if r > 0 {
                f.write_str(",")?;
            }
            f.write_str("[")?;
            for (c, v) in row.iter().enumerate() {
                if c > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// A non-empty sequence of positive integers `(n_1, ..., n_d)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntSequence(Vec<u32>);

impl IntSequence {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySequence);
        }
        if let Some(position) = values.iter().position(|&v| v == 0) {
            return Err(Error::NonPositiveEntry { position });
        }
        Ok(IntSequence(values))
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_weakly_decreasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1])
    }
}

impl fmt::Display for IntSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn big_factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// `k! / (p_1! ... p_r!)`.
pub fn multinomial(k: u32, parts: &[u32]) -> Result<BigUint> {
    let sum: u32 = parts.iter().sum();
    if sum != k {
        return Err(Error::PartsSum { k, sum });
    }
    let denominator = parts.iter().fold(BigUint::one(), |acc, &p| acc * big_factorial(p));
    Ok(big_factorial(k) / denominator)
}

/// All `d x d` adjacency matrices of degree `deg`, in row-major
/// lexicographic order of the upper triangle.
pub fn enumerate_adjacency_by_degree(d: usize, deg: u32) -> Result<Vec<AdjacencyMatrix>> {
    if deg % 2 == 1 {
        return Err(Error::OddDegree(deg));
    }
    let slots: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    let mut current = AdjacencyMatrix::zero(d);
    fill_slots(&slots, 0, deg / 2, &mut current, &mut out);
    Ok(out)
}

fn fill_slots(
    slots: &[(usize, usize)],
    at: usize,
    remaining: u32,
    current: &mut AdjacencyMatrix,
    out: &mut Vec<AdjacencyMatrix>,
) {
    if at == slots.len() {
        if remaining == 0 {
            out.push(current.clone());
        }
        return;
    }
    let (i, j) = slots[at];
    if at + 1 == slots.len() {
        current.set_pair(i, j, remaining);
        out.push(current.clone());
        current.set_pair(i, j, 0);
        return;
    }
    for v in 0..=remaining {
        current.set_pair(i, j, v);
        fill_slots(slots, at + 1, remaining - v, current, out);
    }
    current.set_pair(i, j, 0);
}

/// All adjacency matrices with row sums `n`, in row-major lexicographic order
/// of the upper triangle.
pub fn enumerate_adjacency_by_rowsums(n: &[u32]) -> Vec<AdjacencyMatrix> {
    let d = n.len();
    let mut out = Vec::new();
    if n.iter().sum::<u32>() % 2 == 1 {
        return out;
    }
    let mut remaining = n.to_vec();
    let mut current = AdjacencyMatrix::zero(d);
    rowsum_search(0, 1, &mut remaining, &mut current, &mut out);
    out
}

fn rowsum_search(
    i: usize,
    j: usize,
    remaining: &mut [u32],
    current: &mut AdjacencyMatrix,
    out: &mut Vec<AdjacencyMatrix>,
) {
    let d = remaining.len();
    if i + 1 >= d {
        if remaining.iter().all(|&r| r == 0) {
            out.push(current.clone());
        }
        return;
    }
    if j == i + 1 {
        // row i is settled by the entries (i, i+1..d); the rest must absorb it
        let capacity: u32 = remaining[i + 1..].iter().sum();
        if remaining[i] > capacity {
            return;
        }
    }
    let (low, high) = if j + 1 == d {
        if remaining[i] > remaining[j] {
            return;
        }
        (remaining[i], remaining[i])
    } else {
        (0, remaining[i].min(remaining[j]))
    };
    let (next_i, next_j) = if j + 1 == d { (i + 1, i + 2) } else { (i, j + 1) };
    for v in low..=high {
        remaining[i] -= v;
        remaining[j] -= v;
        current.set_pair(i, j, v);
        rowsum_search(next_i, next_j, remaining, current, out);
        remaining[i] += v;
        remaining[j] += v;
    }
    current.set_pair(i, j, 0);
}

/// Even total and `2 n_i <= n_1 + ... + n_d` for every `i`.
pub fn is_admissible(n: &IntSequence) -> bool {
    let total = n.total();
    total.is_multiple_of(2) && n.values().iter().all(|&v| 2 * v <= total)
}

/// An adjacency matrix with row sums `n`.
///
/// Equal entries are matched directly (pairs for even length, a cycle of
/// weight `p/2` for odd length). Otherwise the smallest vertex is joined to the
/// largest and the largest is reduced; when that reduction leaves an
/// inadmissible sequence, the smallest vertex's units are spread one at a
/// time over the currently largest remaining vertices instead.
pub fn admissible_witness(n: &IntSequence) -> Result<AdjacencyMatrix> {
    if !is_admissible(n) {
        return Err(Error::Inadmissible);
    }
    let mut m = AdjacencyMatrix::zero(n.len());
    let items: Vec<(usize, u32)> = n.values().iter().copied().enumerate().collect();
    witness_step(items, &mut m);
    Ok(m)
}

fn admissible_values(items: &[(usize, u32)]) -> bool {
    let total: u32 = items.iter().map(|&(_, v)| v).sum();
    total.is_multiple_of(2) && items.iter().all(|&(_, v)| 2 * v <= total)
}

fn witness_step(mut items: Vec<(usize, u32)>, m: &mut AdjacencyMatrix) {
    items.retain(|&(_, v)| v > 0);
    if items.is_empty() {
        return;
    }
    items.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let d = items.len();
    if d == 2 {
        m.add_pair(items[0].0, items[1].0, items[0].1);
        return;
    }
    let p = items[0].1;
    if items.iter().all(|&(_, v)| v == p) {
        if d.is_multiple_of(2) {
            for k in 0..d / 2 {
                m.add_pair(items[k].0, items[d - 1 - k].0, p);
            }
        } else {
            for k in 0..d {
                m.add_pair(items[k].0, items[(k + 1) % d].0, p / 2);
            }
        }
        return;
    }
    let (min_index, min_value) = items[d - 1];
    let mut reduced: Vec<(usize, u32)> = items[..d - 1].to_vec();
    reduced[0].1 -= min_value;
    if admissible_values(&reduced) {
        m.add_pair(items[0].0, min_index, min_value);
        witness_step(reduced, m);
        return;
    }
    let mut rest: Vec<(usize, u32)> = items[..d - 1].to_vec();
    for _ in 0..min_value {
        let largest = (0..rest.len()).max_by(|&a, &b| rest[a].1.cmp(&rest[b].1).then(rest[b].0.cmp(&rest[a].0)));
        let largest = largest.expect("other vertices remain");
        m.add_pair(rest[largest].0, min_index, 1);
        rest[largest].1 -= 1;
    }
    witness_step(rest, m);
}

/// A two-row semi-standard Young tableau.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwoRowSsyt {
    pub row1: Vec<u32>,
    pub row2: Vec<u32>,
}

impl TwoRowSsyt {
    /// Rows weakly increasing, columns strictly increasing, equal lengths.
    pub fn is_valid(&self) -> bool {
        self.row1.len() == self.row2.len()
            && self.row1.windows(2).all(|w| w[0] <= w[1])
            && self.row2.windows(2).all(|w| w[0] <= w[1])
            && self.row1.iter().zip(&self.row2).all(|(a, b)| a < b)
    }

    /// Reads each column `(a, b)` as an edge between vertices `a` and `b`
    /// (1-based contents) of a `d`-vertex multigraph.
    pub fn column_matching(&self, d: usize) -> Result<AdjacencyMatrix> {
        AdjacencyMatrix::from_pairs(
            d,
            self.row1.iter().zip(&self.row2).map(|(&a, &b)| (a as usize - 1, b as usize - 1, 1)),
        )
    }
}

/// Writes the content `1^n_1 ... d^n_d` row-major into a `2 x (sum n / 2)`
/// tableau, top row first.
pub fn ssyt_two_row(n: &IntSequence) -> Result<TwoRowSsyt> {
    if !is_admissible(n) {
        return Err(Error::Inadmissible);
    }
    if !n.is_weakly_decreasing() {
        return Err(Error::Unsorted);
    }
    let content: Vec<u32> =
        n.values().iter().enumerate().flat_map(|(i, &v)| core::iter::repeat_n(i as u32 + 1, v as usize)).collect();
    let half = content.len() / 2;
    Ok(TwoRowSsyt { row1: content[..half].to_vec(), row2: content[half..].to_vec() })
}

/// A permutation of `0..len`, given by its images.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn is_involution(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| self.0[j] == i)
    }

    pub fn fixed_points(&self) -> usize {
        self.0.iter().enumerate().filter(|&(i, &j)| i == j).count()
    }

    /// Non-trivial cycles, each starting at its smallest element, 0-based.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                cycle.push(k);
                k = self.0[k];
            }
            out.push(cycle);
        }
        out
    }
}

/// Cycle notation with 1-based points, e.g. `(1 2)(3 4)`.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for cycle in cycles {
            f.write_str("(")?;
            for (k, p) in cycle.iter().enumerate() {
                if k > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", p + 1)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// The fixed-point-free involution swapping matched vertices.
pub fn matching_to_involution(m: &AdjacencyMatrix) -> Result<Permutation> {
    if let Some(row) = m.row_sums().iter().position(|&s| s != 1) {
        return Err(Error::NotPerfectMatching { row });
    }
    let mut images: Vec<usize> = (0..m.size()).collect();
    for (i, j, _) in m.upper_entries() {
        images[i] = j;
        images[j] = i;
    }
    Ok(Permutation(images))
}
