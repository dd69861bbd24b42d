use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A multi-index `α ∈ Z₊^d`.
///
/// A zero-length index is accepted wherever an index is compared against a
/// dimension and reads as the zero index of that dimension.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(components: Vec<u32>) -> Self {
        Self(components)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn scalar(k: u32) -> Self {
        Self(vec![k])
    }

    pub fn unit(dim: usize, coord: usize) -> Self {
        let mut c = vec![0; dim];
        c[coord] = 1;
        Self(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    /// Component `j`, zero past the stored length.
    pub fn get(&self, j: usize) -> u32 {
        self.0.get(j).copied().unwrap_or(0)
    }

    /// `|α|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Pads (or validates) to dimension `dim`.
    pub fn padded(&self, dim: usize) -> Option<Self> {
        if self.0.len() > dim && self.0[dim..].iter().any(|&c| c != 0) {
            return None;
        }
        Some(Self((0..dim).map(|j| self.get(j)).collect()))
    }

    pub fn add(&self, other: &Self) -> Self {
        let d = self.dim().max(other.dim());
        Self((0..d).map(|j| self.get(j) + other.get(j)).collect())
    }

    /// Componentwise `self - other`, `None` when some component would go negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let d = self.dim().max(other.dim());
        (0..d)
            .map(|j| self.get(j).checked_sub(other.get(j)))
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }

    /// `self + t·γ` for a non-negative step count `t`.
    pub fn offset(&self, gamma: &Self, t: u64) -> Vec<u64> {
        let d = self.dim().max(gamma.dim());
        (0..d)
            .map(|j| self.get(j) as u64 + t * gamma.get(j) as u64)
            .collect()
    }

    /// `α! = Π α_j!` as a float.
    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&c| (1..=c).map(f64::from).product::<f64>())
            .product()
    }

    /// Graded-lexicographic comparison: total order first, then lexicographic
    /// with larger leading components first.
    pub fn grlex_cmp(&self, other: &Self) -> Ordering {
        self.order().cmp(&other.order()).then_with(|| {
            let d = self.dim().max(other.dim());
            for j in 0..d {
                match other.get(j).cmp(&self.get(j)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }

    /// All indices of dimension `dim` with `|α| <= max_order`, in graded-lexicographic order.
    pub fn graded_lex(dim: usize, max_order: u32) -> Vec<Self> {
        let mut out = Vec::new();
        for order in 0..=max_order {
            let mut current = vec![0u32; dim];
            push_compositions(dim, order, 0, &mut current, &mut out);
        }
        out
    }
}

fn push_compositions(
    dim: usize,
    remaining: u32,
    pos: usize,
    cur: &mut Vec<u32>,
    out: &mut Vec<MultiIndex>,
) {
    if dim == 0 {
        if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    if pos == dim - 1 {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for c in (0..=remaining).rev() {
        cur[pos] = c;
        push_compositions(dim, remaining - c, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order_in_two_variables() {
        let idx = MultiIndex::graded_lex(2, 2);
        let comps: Vec<Vec<u32>> = idx.iter().map(|a| a.components().to_vec()).collect();
        assert_eq!(
            comps,
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
        for w in idx.windows(2) {
            assert_eq!(w[0].grlex_cmp(&w[1]), Ordering::Less);
        }
    }

    #[test]
    fn counts_match_binomials() {
        // C(d + N, d)
        assert_eq!(MultiIndex::graded_lex(3, 4).len(), 35);
        assert_eq!(MultiIndex::graded_lex(1, 9).len(), 10);
    }

    #[test]
    fn subtraction_and_padding() {
        let a = MultiIndex::new(vec![2, 1]);
        let b = MultiIndex::new(vec![1]);
        assert_eq!(a.checked_sub(&b), Some(MultiIndex::new(vec![1, 1])));
        assert_eq!(b.checked_sub(&a), None);
        assert_eq!(MultiIndex::default().padded(3), Some(MultiIndex::zeros(3)));
        assert_eq!(a.padded(1), None);
        assert_eq!(a.order(), 3);
        assert_eq!(MultiIndex::new(vec![3, 2]).factorial(), 12.0);
    }
}
