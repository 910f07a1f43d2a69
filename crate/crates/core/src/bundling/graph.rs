use std::fmt;

use crate::error::{Error, Result};

/// Dense symmetric nonnegative weight matrix with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    w: Vec<f64>,
    strength: Vec<f64>,
    two_m: f64,
}

impl WeightedGraph {
    /// `weights` is row-major `n * n`; the diagonal is ignored.
    pub fn from_dense(n: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {} weights, got {}",
                n * n,
                weights.len()
            )));
        }
        let mut w = weights;
        for i in 0..n {
            w[i * n + i] = 0.0;
            for j in 0..i {
                let (a, b) = (w[i * n + j], w[j * n + i]);
                if a != b {
                    return Err(Error::invalid(format!("weights not symmetric at ({i}, {j})")));
                }
                if !(a >= 0.0) || !a.is_finite() {
                    return Err(Error::invalid(format!(
                        "weight at ({i}, {j}) must be finite and nonnegative"
                    )));
                }
            }
        }
        let strength: Vec<f64> = (0..n).map(|i| w[i * n..(i + 1) * n].iter().sum()).collect();
        let two_m = strength.iter().sum();
        Ok(Self { n, w, strength, two_m })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut w = vec![0.0; n * n];
        for &(i, j, x) in edges {
            if i >= n || j >= n || i == j {
                return Err(Error::invalid(format!("bad edge ({i}, {j})")));
            }
            w[i * n + j] += x;
            w[j * n + i] += x;
        }
        Self::from_dense(n, w)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.w[i * self.n..(i + 1) * self.n]
    }

    pub fn strength(&self, i: usize) -> f64 {
        self.strength[i]
    }

    /// Sum of all strengths, i.e. twice the total edge weight.
    pub fn two_m(&self) -> f64 {
        self.two_m
    }

    pub fn is_isolated(&self, i: usize) -> bool {
        self.strength[i] == 0.0
    }

    /// Connected components over positive-weight edges, as a label vector
    /// numbered in order of first appearance.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for (v, &x) in self.row(u).iter().enumerate() {
                    if x > 0.0 && label[v] == usize::MAX {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        label
    }
}

/// Weighted Newman modularity of `assignment` (any label values).
pub fn modularity(graph: &WeightedGraph, assignment: &[usize]) -> Result<f64> {
    if assignment.len() != graph.len() {
        return Err(Error::invalid(format!(
            "assignment covers {} nodes, graph has {}",
            assignment.len(),
            graph.len()
        )));
    }
    if graph.two_m() == 0.0 {
        return Err(Error::degenerate("graph has no positive edge weight"));
    }
    let labels = normalize_labels(assignment);
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut w_in = vec![0.0; k];
    let mut s = vec![0.0; k];
    for i in 0..graph.len() {
        let c = labels[i];
        s[c] += graph.strength(i);
        let row = graph.row(i);
        for j in 0..graph.len() {
            if labels[j] == c {
                w_in[c] += row[j];
            }
        }
    }
    let two_m = graph.two_m();
    Ok((0..k).map(|c| w_in[c] / two_m - (s[c] / two_m).powi(2)).sum())
}

/// Relabels communities `0..k` ordered by size descending, ties broken by
/// smallest member index.
pub fn normalize_labels(assignment: &[usize]) -> Vec<usize> {
    let mut groups: std::collections::BTreeMap<usize, (usize, usize)> = Default::default();
    for (i, &c) in assignment.iter().enumerate() {
        let e = groups.entry(c).or_insert((0, i));
        e.0 += 1;
    }
    let mut order: Vec<(usize, usize, usize)> = groups.into_iter().map(|(c, (size, first))| (c, size, first)).collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
    let mut map = std::collections::HashMap::new();
    for (new, (old, _, _)) in order.into_iter().enumerate() {
        map.insert(old, new);
    }
    assignment.iter().map(|c| map[c]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Eo,
    EoKl,
    Sa,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Eo => "eo",
            Method::EoKl => "eo+kl",
            Method::Sa => "sa",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "eo" => Some(Method::Eo),
            "eo+kl" | "eo_kl" => Some(Method::EoKl),
            "sa" => Some(Method::Sa),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BundlePartition {
    pub assignment: Vec<usize>,
    pub q: f64,
    pub method: Method,
}

impl BundlePartition {
    /// Builds a partition with isolated nodes split into singletons,
    /// normalized labels and a freshly computed `q`.
    pub fn new(graph: &WeightedGraph, assignment: &[usize], method: Method) -> Result<Self> {
        let mut a = assignment.to_vec();
        let fresh = a.iter().max().map_or(0, |m| m + 1);
        let mut next = fresh;
        for (i, c) in a.iter_mut().enumerate() {
            if graph.is_isolated(i) {
                *c = next;
                next += 1;
            }
        }
        let assignment = normalize_labels(&a);
        let q = if graph.two_m() > 0.0 {
            modularity(graph, &assignment)?
        } else {
            0.0
        };
        Ok(Self { assignment, q, method })
    }

    pub fn n_bundles(&self) -> usize {
        self.assignment.iter().max().map_or(0, |m| m + 1)
    }

    pub fn members(&self, bundle: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|i| self.assignment[*i] == bundle)
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.n_bundles()];
        for c in &self.assignment {
            s[*c] += 1;
        }
        s
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn two_cliques(k: usize) -> WeightedGraph {
        let mut e = Vec::new();
        for base in [0, k] {
            for i in 0..k {
                for j in i + 1..k {
                    e.push((base + i, base + j, 1.0));
                }
            }
        }
        WeightedGraph::from_edges(2 * k, &e).unwrap()
    }

    /// Best modularity over every set partition, via restricted growth strings.
    pub(crate) fn exhaustive(graph: &WeightedGraph) -> (f64, usize) {
        let n = graph.len();
        let mut a = vec![0usize; n];
        let mut maxes = vec![0usize; n];
        let mut best = f64::NEG_INFINITY;
        let mut count = 0;
        loop {
            count += 1;
            best = best.max(modularity(graph, &a).unwrap());
            let mut i = n - 1;
            loop {
                if i == 0 {
                    return (best, count);
                }
                if a[i] <= maxes[i - 1] {
                    a[i] += 1;
                    let m = maxes[i - 1].max(a[i]);
                    maxes[i] = m;
                    for j in i + 1..n {
                        a[j] = 0;
                        maxes[j] = m;
                    }
                    break;
                }
                i -= 1;
            }
        }
    }

    #[test]
    fn enumeration_counts_bell_numbers() {
        let g = WeightedGraph::from_edges(8, &[(0, 1, 1.0)]).unwrap();
        assert_eq!(exhaustive(&g).1, 4140);
    }

    #[test]
    fn single_community_has_zero_q() {
        let g = two_cliques(5);
        assert!(modularity(&g, &[0; 10]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn two_cliques_natural_partition_is_half() {
        let g = two_cliques(5);
        let a: Vec<usize> = (0..10).map(|i| i / 5).collect();
        assert!((modularity(&g, &a).unwrap() - 0.5).abs() < 1e-15);
        assert!((exhaustive(&g).0 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn matches_pairwise_definition() {
        let g =
            WeightedGraph::from_edges(5, &[(0, 1, 2.0), (1, 2, 0.5), (2, 3, 1.5), (3, 4, 1.0), (0, 4, 0.25)]).unwrap();
        let a = [0, 0, 1, 1, 2];
        let two_m = g.two_m();
        let mut q = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                if a[i] == a[j] {
                    q += g.weight(i, j) - g.strength(i) * g.strength(j) / two_m;
                }
            }
        }
        q /= two_m;
        assert!((modularity(&g, &a).unwrap() - q).abs() < 1e-14);
    }

    #[test]
    fn empty_graph_is_error() {
        let g = WeightedGraph::from_dense(3, vec![0.0; 9]).unwrap();
        assert!(modularity(&g, &[0, 1, 2]).is_err());
    }

    #[test]
    fn labels_ordered_by_size_then_first_member() {
        assert_eq!(normalize_labels(&[7, 3, 3, 9, 7]), vec![0, 1, 1, 2, 0]);
        assert_eq!(normalize_labels(&[4, 2, 2, 2, 4]), vec![1, 0, 0, 0, 1]);
    }

    #[test]
    fn isolated_nodes_become_singletons() {
        let g = WeightedGraph::from_edges(4, &[(0, 1, 1.0)]).unwrap();
        let p = BundlePartition::new(&g, &[0, 0, 0, 0], Method::Eo).unwrap();
        assert_eq!(p.assignment, vec![0, 0, 1, 2]);
    }

    proptest! {
        #[test]
        fn relabeling_leaves_q_unchanged(
            w in prop::collection::vec(0.0f64..3.0, 28),
            a in prop::collection::vec(0usize..4, 8),
            perm in Just([3usize, 0, 2, 1]).prop_shuffle(),
        ) {
            let mut e = Vec::new();
            let mut it = w.iter();
            for i in 0..8 {
                for j in i + 1..8 {
                    e.push((i, j, *it.next().unwrap()));
                }
            }
            let g = WeightedGraph::from_edges(8, &e).unwrap();
            let b: Vec<usize> = a.iter().map(|c| perm[*c] + 10).collect();
            prop_assert!((modularity(&g, &a).unwrap() - modularity(&g, &b).unwrap()).abs() < 1e-14);
        }
    }
}
