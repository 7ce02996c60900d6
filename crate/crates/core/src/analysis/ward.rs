//! Agglomerative clustering with Ward linkage.
//!
//! Matrix entries are taken as distances between points. Linkage is updated
//! with the Lance–Williams recurrence on squared distances,
//!
//! ```text
//! d²(k, i∪j) = ((n_i + n_k) d²(k,i) + (n_j + n_k) d²(k,j) - n_k d²(i,j)) / (n_i + n_j + n_k)
//! ```
//!
//! and merge heights are reported as distances, so two singletons merge at
//! their matrix entry. The input need not be Euclidean.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::analysis::matrix::DissimilarityMatrix;
use crate::scalar::Scalar;

/// One agglomeration step. Leaves are clusters `0..n`; step `k` creates cluster `n + k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Merge<T> {
    pub left: usize,
    pub right: usize,
    pub height: T,
    pub id: usize,
    /// Leaves under the new cluster.
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergeTree<T> {
    pub leaf_labels: Vec<String>,
    pub merges: Vec<Merge<T>>,
}

impl<T: Scalar> MergeTree<T> {
    pub fn leaf_count(&self) -> usize {
        self.leaf_labels.len()
    }

    /// Leaf indices under `cluster`, ascending.
    pub fn members(&self, cluster: usize) -> Vec<usize> {
        let n = self.leaf_count();
        let mut out = Vec::new();
        let mut stack = vec![cluster];
        while let Some(c) = stack.pop() {
            if c < n {
                out.push(c);
            } else {
                let m = &self.merges[c - n];
                stack.push(m.left);
                stack.push(m.right);
            }
        }
        out.sort_unstable();
        out
    }

    /// Labels under `cluster`, in leaf order.
    pub fn member_labels(&self, cluster: usize) -> Vec<&str> {
        self.members(cluster)
            .into_iter()
            .map(|i| self.leaf_labels[i].as_str())
            .collect()
    }

    fn height_of(&self, cluster: usize) -> T {
        let n = self.leaf_count();
        if cluster < n {
            T::zero()
        } else {
            self.merges[cluster - n].height
        }
    }

    /// Newick string; branch lengths are height differences.
    pub fn to_newick(&self) -> String {
        let n = self.leaf_count();
        let mut out = String::new();
        if n == 1 {
            out.push_str(&newick_label(&self.leaf_labels[0]));
        } else {
            self.write_newick(n + self.merges.len() - 1, &mut out);
        }
        out.push(';');
        out
    }

    fn write_newick(&self, cluster: usize, out: &mut String) {
        let n = self.leaf_count();
        if cluster < n {
            out.push_str(&newick_label(&self.leaf_labels[cluster]));
            return;
        }
        let m = &self.merges[cluster - n];
        out.push('(');
        for (k, child) in [m.left, m.right].into_iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            self.write_newick(child, out);
            let _ = write!(out, ":{}", m.height - self.height_of(child));
        }
        out.push(')');
    }
}

fn newick_label(label: &str) -> String {
    if label.chars().any(|c| "()[]':;, \t".contains(c)) {
        format!("'{}'", label.replace('\'', "''"))
    } else {
        label.to_string()
    }
}

/// Ward-linkage agglomeration of every label into one tree.
///
/// At each step the closest pair of active clusters merges; ties go to the
/// pair with the lowest cluster ids.
pub fn ward_cluster<T: Scalar>(m: &DissimilarityMatrix<T>) -> MergeTree<T> {
    let n = m.len();
    let total = 2 * n - 1;
    // squared distances between all clusters that ever exist
    let mut d2 = vec![vec![T::zero(); total]; total];
    for (i, row) in d2.iter_mut().take(n).enumerate() {
        for (j, cell) in row.iter_mut().take(n).enumerate() {
            let v = m.get(i, j);
            *cell = v * v;
        }
    }
    let mut size = vec![0usize; total];
    size[..n].fill(1);
    let mut active: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    for id in n..total {
        let mut best: Option<(usize, usize, T)> = None;
        for (ai, &i) in active.iter().enumerate() {
            for &j in &active[ai + 1..] {
                let d = d2[i][j];
                if best.is_none_or(|(_, _, b)| d < b) {
                    best = Some((i, j, d));
                }
            }
        }
        let (i, j, dij) = best.expect("at least two active clusters");
        active.retain(|&c| c != i && c != j);

        let (ni, nj) = (T::of(size[i] as f64), T::of(size[j] as f64));
        for &k in &active {
            let nk = T::of(size[k] as f64);
            let v = ((ni + nk) * d2[k][i] + (nj + nk) * d2[k][j] - nk * dij) / (ni + nj + nk);
            let v = v.max(T::zero());
            d2[k][id] = v;
            d2[id][k] = v;
        }
        size[id] = size[i] + size[j];
        active.push(id);
        merges.push(Merge {
            left: i,
            right: j,
            height: dij.max(T::zero()).sqrt(),
            id,
            size: size[id],
        });
    }

    MergeTree {
        leaf_labels: m.labels().to_vec(),
        merges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    #[test]
    fn two_leaves_merge_at_their_distance() {
        let m = DissimilarityMatrix::from_upper(labels(2), &[1.0]).unwrap();
        let t = ward_cluster(&m);
        assert_eq!(
            t.merges,
            vec![Merge {
                left: 0,
                right: 1,
                height: 1.0,
                id: 2,
                size: 2
            }]
        );
        assert_eq!(t.to_newick(), "(p0:1,p1:1);");
    }

    #[test]
    fn single_leaf_has_no_merges() {
        let m = DissimilarityMatrix::new(labels(1), vec![vec![0.0]]).unwrap();
        let t = ward_cluster(&m);
        assert!(t.merges.is_empty());
        assert_eq!(t.to_newick(), "p0;");
    }

    #[test]
    fn ties_merge_lowest_pair_first() {
        let m = DissimilarityMatrix::from_upper(labels(4), &[1.0, 5.0, 5.0, 5.0, 5.0, 1.0]).unwrap();
        let t = ward_cluster(&m);
        assert_eq!((t.merges[0].left, t.merges[0].right), (0, 1));
        assert_eq!((t.merges[1].left, t.merges[1].right), (2, 3));
        assert_eq!((t.merges[2].left, t.merges[2].right), (4, 5));
    }

    #[test]
    fn three_point_update_closed_form() {
        // d(2, {0,1}) = sqrt((2*d02² + 2*d12² - d01²) / 3)
        let m = DissimilarityMatrix::from_upper(labels(3), &[1.0, 2.0, 3.0]).unwrap();
        let t = ward_cluster(&m);
        let want = ((2.0 * 4.0 + 2.0 * 9.0 - 1.0) / 3.0f64).sqrt();
        assert_eq!(t.merges[1].height, want);
        assert_eq!(t.members(4), vec![0, 1, 2]);
    }

    #[test]
    fn newick_quotes_awkward_labels() {
        let m = DissimilarityMatrix::from_upper(vec!["a b".into(), "c".into()], &[0.5]).unwrap();
        assert_eq!(ward_cluster(&m).to_newick(), "('a b':0.5,c:0.5);");
    }
}
