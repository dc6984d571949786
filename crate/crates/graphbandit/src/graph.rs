//! Directed feedback graphs with mandatory self-loops, plus exact
//! brute-force oracles for the combinatorial quantities the learner's
//! guarantees are stated in: independence number, strong independence
//! number, largest acyclic vertex set, and dominating-set checks.
//!
//! Graphs are immutable after construction and safe to share across
//! threads; the oracles are pure functions.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exhaustive independence-number search is refused above this many arms.
pub const INDEPENDENCE_BRUTE_CAP: usize = 20;
/// Exhaustive largest-acyclic-subset search is refused above this many arms.
pub const MAS_BRUTE_CAP: usize = 10;

/// Directed graph on `K` arms where every arm has a self-loop. Playing arm
/// `i` reveals the losses of all arms in its out-neighborhood.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct FeedbackGraph {
    num_arms: usize,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    fingerprint: u64,
}

impl PartialEq for FeedbackGraph {
    fn eq(&self, other: &Self) -> bool {
        self.num_arms == other.num_arms && self.out_edges == other.out_edges
    }
}
impl Eq for FeedbackGraph {}

/// JSON form: `{"K": 3, "edges": [[0,1],[1,2]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphJson {
    #[serde(rename = "K")]
    k: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphJson> for FeedbackGraph {
    type Error = Error;
    fn try_from(j: GraphJson) -> Result<Self> {
        let edges: Vec<(usize, usize)> = j.edges.iter().map(|e| (e[0], e[1])).collect();
        FeedbackGraph::new(j.k, &edges)
    }
}

impl From<FeedbackGraph> for GraphJson {
    fn from(g: FeedbackGraph) -> Self {
        GraphJson {
            k: g.num_arms,
            edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }
}

impl FeedbackGraph {
    /// Builds a graph, silently adding any missing self-loops.
    pub fn new(num_arms: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::build(num_arms, edges, false)
    }

    /// Builds a graph, rejecting inputs that do not list every self-loop.
    pub fn new_strict(num_arms: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::build(num_arms, edges, true)
    }

    fn build(num_arms: usize, edges: &[(usize, usize)], strict: bool) -> Result<Self> {
        if num_arms == 0 {
            return Err(Error::Domain("a graph needs at least one arm".into()));
        }
        let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); num_arms];
        let mut has_self = vec![false; num_arms];
        for &(u, v) in edges {
            if u >= num_arms || v >= num_arms {
                return Err(Error::Domain(format!(
                    "edge ({u}, {v}) out of range for {num_arms} arms"
                )));
            }
            if u == v {
                has_self[u] = true;
            }
            out_edges[u].push(v);
        }
        if strict {
            if let Some(missing) = has_self.iter().position(|&s| !s) {
                return Err(Error::Domain(format!(
                    "strict mode: arm {missing} is missing its self-loop"
                )));
            }
        }
        for (i, row) in out_edges.iter_mut().enumerate() {
            row.push(i); // self-loop, deduped below
            row.sort_unstable();
            row.dedup();
        }
        let mut in_edges: Vec<Vec<usize>> = vec![Vec::new(); num_arms];
        for (u, row) in out_edges.iter().enumerate() {
            for &v in row {
                in_edges[v].push(u);
            }
        }
        // in_edges rows come out sorted because u ascends.
        let fingerprint = fingerprint_of(num_arms, &out_edges);
        Ok(FeedbackGraph {
            num_arms,
            out_edges,
            in_edges,
            fingerprint,
        })
    }

    /// Parses the edge-list text format: first non-empty line is `K`,
    /// every following line is `u v`.
    pub fn from_edge_list_text(text: &str) -> Result<Self> {
        let (k, edges) = Self::parse_edge_list(text)?;
        Self::new(k, &edges)
    }

    fn parse_edge_list(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
        let mut num_arms: Option<usize> = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                continue;
            }
            match num_arms {
                None => {
                    let k: usize = trimmed.parse().map_err(|_| Error::Parse {
                        line,
                        msg: format!("expected the number of arms, got {trimmed:?}"),
                    })?;
                    if k < 2 {
                        return Err(Error::Domain(format!(
                            "a feedback graph needs at least 2 arms, got {k}"
                        )));
                    }
                    num_arms = Some(k);
                }
                Some(_) => {
                    let mut fields = trimmed.split_whitespace();
                    let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next())
                    else {
                        return Err(Error::Parse {
                            line,
                            msg: format!("expected `u v`, got {trimmed:?}"),
                        });
                    };
                    let parse = |s: &str| -> Result<usize> {
                        s.parse().map_err(|_| Error::Parse {
                            line,
                            msg: format!("expected an arm index, got {s:?}"),
                        })
                    };
                    edges.push((parse(a)?, parse(b)?));
                }
            }
        }
        let Some(k) = num_arms else {
            return Err(Error::Parse {
                line: 1,
                msg: "empty graph file".into(),
            });
        };
        Ok((k, edges))
    }

    /// Parses the JSON form `{"K": .., "edges": [[u,v], ..]}`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let (k, edges) = Self::parse_json(text)?;
        Self::new(k, &edges)
    }

    fn parse_json(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
        let j: GraphJson = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        if j.k < 2 {
            return Err(Error::Domain(format!(
                "a feedback graph needs at least 2 arms, got {}",
                j.k
            )));
        }
        Ok((j.k, j.edges.iter().map(|e| (e[0], e[1])).collect()))
    }

    fn parse_text(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_edge_list(text)
        }
    }

    /// Parses either accepted format, sniffing JSON by its leading `{`.
    pub fn from_text(text: &str) -> Result<Self> {
        let (k, edges) = Self::parse_text(text)?;
        Self::new(k, &edges)
    }

    /// Like [`Self::from_text`], but rejects inputs missing any self-loop.
    pub fn from_text_strict(text: &str) -> Result<Self> {
        let (k, edges) = Self::parse_text(text)?;
        Self::new_strict(k, &edges)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    /// Serializes to the edge-list text format, self-loops included.
    pub fn to_edge_list_text(&self) -> String {
        let mut out = format!("{}\n", self.num_arms);
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("graph serialization cannot fail")
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    /// All edges, self-loops included, in `(u, v)` lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for (u, row) in self.out_edges.iter().enumerate() {
            for &v in row {
                edges.push((u, v));
            }
        }
        edges
    }

    pub fn out_neighbors(&self, arm: usize) -> &[usize] {
        &self.out_edges[arm]
    }

    pub fn in_neighbors(&self, arm: usize) -> &[usize] {
        &self.in_edges[arm]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        from < self.num_arms && self.out_edges[from].binary_search(&to).is_ok()
    }

    /// Structural hash; used as a cache key by the exploration machinery.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// True iff every non-self edge is mutual.
    pub fn is_undirected(&self) -> bool {
        (0..self.num_arms).all(|u| {
            self.out_edges[u]
                .iter()
                .all(|&v| v == u || self.has_edge(v, u))
        })
    }

    /// The undirected graph keeping only mutual edge pairs (self-loops
    /// retained). A pair `{i, j}` is adjacent here iff both `(i, j)` and
    /// `(j, i)` are edges of `self`.
    pub fn strong_subgraph(&self) -> FeedbackGraph {
        let mut edges = Vec::new();
        for u in 0..self.num_arms {
            for &v in &self.out_edges[u] {
                if v != u && self.has_edge(v, u) {
                    edges.push((u, v));
                }
            }
        }
        FeedbackGraph::new(self.num_arms, &edges).expect("indices already validated")
    }

    /// Exact independence number by pruned exhaustive search. Self-loops are
    /// ignored. With `ignore_directions`, an edge in either direction makes a
    /// pair dependent; otherwise only a mutual pair does.
    pub fn independence_number(&self, ignore_directions: bool) -> Result<usize> {
        self.independence_number_capped(ignore_directions, INDEPENDENCE_BRUTE_CAP)
    }

    pub fn independence_number_capped(&self, ignore_directions: bool, cap: usize) -> Result<usize> {
        if self.num_arms > cap {
            return Err(Error::Capacity {
                quantity: "independence number",
                cap,
                arms: self.num_arms,
            });
        }
        let adj = self.dependence_masks(ignore_directions);
        let mut best = 0usize;
        let full: u32 = if self.num_arms == 32 {
            u32::MAX
        } else {
            (1u32 << self.num_arms) - 1
        };
        max_independent(&adj, full, 0, &mut best);
        Ok(best)
    }

    /// Independence number of [`Self::strong_subgraph`].
    pub fn strong_independence_number(&self) -> Result<usize> {
        self.strong_subgraph().independence_number(true)
    }

    pub fn strong_independence_number_capped(&self, cap: usize) -> Result<usize> {
        self.strong_subgraph().independence_number_capped(true, cap)
    }

    /// Per-arm bitmasks of dependent partners (self excluded).
    fn dependence_masks(&self, ignore_directions: bool) -> Vec<u32> {
        let k = self.num_arms;
        let mut adj = vec![0u32; k];
        for (i, mask) in adj.iter_mut().enumerate() {
            for j in 0..k {
                if i == j {
                    continue;
                }
                let dependent = if ignore_directions {
                    self.has_edge(i, j) || self.has_edge(j, i)
                } else {
                    self.has_edge(i, j) && self.has_edge(j, i)
                };
                if dependent {
                    *mask |= 1 << j;
                }
            }
        }
        adj
    }

    /// Size of the largest vertex subset whose induced subgraph is acyclic,
    /// self-loops excluded from the cycle check. Exhaustive over subsets.
    pub fn mas(&self) -> Result<usize> {
        self.mas_capped(MAS_BRUTE_CAP)
    }

    pub fn mas_capped(&self, cap: usize) -> Result<usize> {
        if self.num_arms > cap {
            return Err(Error::Capacity {
                quantity: "largest acyclic vertex set",
                cap,
                arms: self.num_arms,
            });
        }
        let k = self.num_arms;
        let mut best = 0usize;
        for subset in 0u32..(1u32 << k) {
            let size = subset.count_ones() as usize;
            if size <= best {
                continue;
            }
            if self.induced_is_acyclic(subset) {
                best = size;
            }
        }
        Ok(best)
    }

    /// Kahn's algorithm on the induced subgraph, self-loops ignored.
    fn induced_is_acyclic(&self, subset: u32) -> bool {
        let k = self.num_arms;
        let in_subset = |v: usize| subset & (1 << v) != 0;
        let mut indeg = vec![0usize; k];
        let mut members = 0usize;
        for (v, deg) in indeg.iter_mut().enumerate() {
            if !in_subset(v) {
                continue;
            }
            members += 1;
            for &u in &self.in_edges[v] {
                if u != v && in_subset(u) {
                    *deg += 1;
                }
            }
        }
        let mut queue: Vec<usize> = (0..k).filter(|&v| in_subset(v) && indeg[v] == 0).collect();
        let mut removed = 0usize;
        while let Some(u) = queue.pop() {
            removed += 1;
            for &v in &self.out_edges[u] {
                if v != u && in_subset(v) {
                    indeg[v] -= 1;
                    if indeg[v] == 0 {
                        queue.push(v);
                    }
                }
            }
        }
        removed == members
    }

    /// True iff every arm is in the out-neighborhood of some member of `set`.
    /// Out-of-range members cover nothing.
    pub fn is_dominating(&self, set: &[usize]) -> bool {
        let mut covered = vec![false; self.num_arms];
        for &s in set {
            if s < self.num_arms {
                for &v in &self.out_edges[s] {
                    covered[v] = true;
                }
            }
        }
        covered.iter().all(|&c| c)
    }

    /// All oracle-backed statistics at once. Fails above the independence
    /// cap; the largest-acyclic-set entry is omitted above its own cap.
    pub fn stats(&self) -> Result<GraphStats> {
        Ok(GraphStats {
            num_arms: self.num_arms,
            alpha: self.independence_number(true)?,
            alpha_strong: self.strong_independence_number()?,
            mas: if self.num_arms <= MAS_BRUTE_CAP {
                Some(self.mas()?)
            } else {
                None
            },
            is_undirected: self.is_undirected(),
        })
    }
}

fn fingerprint_of(num_arms: usize, out_edges: &[Vec<usize>]) -> u64 {
    // FNV-1a over K and the sorted edge list.
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    let mut eat = |x: u64| {
        for byte in x.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100_0000_01b3);
        }
    };
    eat(num_arms as u64);
    for (u, row) in out_edges.iter().enumerate() {
        for &v in row {
            eat(u as u64);
            eat(v as u64);
        }
    }
    h
}

/// Branch-and-bound maximum independent set on bitmask adjacency.
fn max_independent(adj: &[u32], remaining: u32, size: usize, best: &mut usize) {
    if remaining == 0 {
        *best = (*best).max(size);
        return;
    }
    if size + remaining.count_ones() as usize <= *best {
        return;
    }
    let v = remaining.trailing_zeros() as usize;
    let bit = 1u32 << v;
    max_independent(adj, remaining & !adj[v] & !bit, size + 1, best);
    max_independent(adj, remaining & !bit, size, best);
}

/// Oracle-backed graph statistics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub num_arms: usize,
    /// Independence number with edge directions ignored.
    pub alpha: usize,
    /// Independence number of the mutual-edge subgraph.
    pub alpha_strong: usize,
    /// Largest acyclic vertex set, when within the brute-force cap.
    pub mas: Option<usize>,
    pub is_undirected: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent re-implementation: plain subset enumeration, no pruning.
    fn naive_independence(g: &FeedbackGraph, ignore_directions: bool) -> usize {
        let k = g.num_arms();
        let mut best = 0;
        for subset in 0u32..(1 << k) {
            let members: Vec<usize> = (0..k).filter(|&v| subset & (1 << v) != 0).collect();
            let ok = members.iter().enumerate().all(|(idx, &a)| {
                members[idx + 1..].iter().all(|&b| {
                    let dependent = if ignore_directions {
                        g.has_edge(a, b) || g.has_edge(b, a)
                    } else {
                        g.has_edge(a, b) && g.has_edge(b, a)
                    };
                    !dependent
                })
            });
            if ok {
                best = best.max(members.len());
            }
        }
        best
    }

    /// Independent acyclicity check: DFS three-coloring instead of Kahn.
    fn naive_mas(g: &FeedbackGraph) -> usize {
        let k = g.num_arms();
        let mut best = 0;
        for subset in 0u32..(1 << k) {
            let members: Vec<usize> = (0..k).filter(|&v| subset & (1 << v) != 0).collect();
            if members.len() <= best {
                continue;
            }
            if dfs_acyclic(g, subset) {
                best = members.len();
            }
        }
        best
    }

    fn dfs_acyclic(g: &FeedbackGraph, subset: u32) -> bool {
        let k = g.num_arms();
        let mut color = vec![0u8; k]; // 0 white, 1 gray, 2 black
        fn visit(g: &FeedbackGraph, subset: u32, v: usize, color: &mut [u8]) -> bool {
            color[v] = 1;
            for &w in g.out_neighbors(v) {
                if w == v || subset & (1 << w) == 0 {
                    continue;
                }
                if color[w] == 1 {
                    return false;
                }
                if color[w] == 0 && !visit(g, subset, w, color) {
                    return false;
                }
            }
            color[v] = 2;
            true
        }
        (0..k)
            .filter(|&v| subset & (1 << v) != 0)
            .all(|v| color[v] != 0 || visit(g, subset, v, &mut color))
    }

    fn cycle(k: usize) -> FeedbackGraph {
        let mut edges = Vec::new();
        for i in 0..k {
            edges.push((i, (i + 1) % k));
            edges.push(((i + 1) % k, i));
        }
        FeedbackGraph::new(k, &edges).unwrap()
    }

    fn complete(k: usize) -> FeedbackGraph {
        let mut edges = Vec::new();
        for u in 0..k {
            for v in 0..k {
                edges.push((u, v));
            }
        }
        FeedbackGraph::new(k, &edges).unwrap()
    }

    #[test]
    fn parses_edge_list_and_adds_self_loops() {
        let g = FeedbackGraph::from_edge_list_text("3\n0 1\n1 2").unwrap();
        assert_eq!(g.num_arms(), 3);
        assert_eq!(g.out_neighbors(0), &[0, 1]);
        assert_eq!(g.out_neighbors(1), &[1, 2]);
        assert_eq!(g.out_neighbors(2), &[2]);
        assert_eq!(g.in_neighbors(1), &[0, 1]);
    }

    #[test]
    fn parses_bandit_graph_with_no_edges() {
        let g = FeedbackGraph::from_edge_list_text("2\n").unwrap();
        assert_eq!(g.out_neighbors(0), &[0]);
        assert_eq!(g.out_neighbors(1), &[1]);
    }

    #[test]
    fn parses_two_disjoint_mutual_pairs() {
        let g = FeedbackGraph::from_edge_list_text("4\n0 1\n1 0\n2 3\n3 2").unwrap();
        assert!(g.has_edge(0, 1) && g.has_edge(1, 0));
        assert!(g.has_edge(2, 3) && g.has_edge(3, 2));
        assert!(!g.has_edge(1, 2) && !g.has_edge(0, 3));
        assert!(g.is_undirected());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = FeedbackGraph::from_edge_list_text("3\n0 1\nnope").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = FeedbackGraph::from_edge_list_text("3\n0 1 2").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn rejects_too_few_arms_and_bad_indices() {
        assert!(matches!(
            FeedbackGraph::from_edge_list_text("1\n"),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            FeedbackGraph::from_edge_list_text("3\n0 7"),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn strict_mode_rejects_missing_self_loops() {
        assert!(FeedbackGraph::new_strict(2, &[(0, 0), (1, 1), (0, 1)]).is_ok());
        assert!(matches!(
            FeedbackGraph::new_strict(2, &[(0, 0), (0, 1)]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn json_and_edge_list_are_interchangeable() {
        let text = FeedbackGraph::from_json_str(r#"{"K": 3, "edges": [[0,1],[1,2]]}"#).unwrap();
        let list = FeedbackGraph::from_edge_list_text("3\n0 1\n1 2").unwrap();
        assert_eq!(text, list);
        let sniffed = FeedbackGraph::from_text(r#" {"K": 3, "edges": [[0,1],[1,2]]}"#).unwrap();
        assert_eq!(sniffed, list);
    }

    #[test]
    fn strong_subgraph_drops_one_way_edges_and_keeps_mutual_ones() {
        let one_way = FeedbackGraph::new(2, &[(0, 1)]).unwrap();
        assert!(!one_way.strong_subgraph().has_edge(0, 1));

        let mutual = FeedbackGraph::new(2, &[(0, 1), (1, 0)]).unwrap();
        let sub = mutual.strong_subgraph();
        assert!(sub.has_edge(0, 1) && sub.has_edge(1, 0));

        let k5 = complete(5);
        assert_eq!(k5.strong_subgraph(), k5);
        // Idempotent on undirected graphs.
        assert_eq!(k5.strong_subgraph().strong_subgraph(), k5.strong_subgraph());
    }

    #[test]
    fn independence_number_matches_known_values() {
        let bandit = FeedbackGraph::new(5, &[]).unwrap();
        assert_eq!(bandit.independence_number(true).unwrap(), 5);
        assert_eq!(complete(5).independence_number(true).unwrap(), 1);

        // Five-cycle: value frozen from the unpruned enumeration oracle.
        let c5 = cycle(5);
        assert_eq!(naive_independence(&c5, true), 2);
        assert_eq!(c5.independence_number(true).unwrap(), 2);
    }

    #[test]
    fn strong_independence_number_matches_known_values() {
        // Tournament without mutual pairs: the mutual-edge subgraph is edgeless.
        let tour = FeedbackGraph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(tour.strong_independence_number().unwrap(), 3);

        assert_eq!(complete(4).strong_independence_number().unwrap(), 1);

        // Mutual 0-1 plus one-way 1->2; frozen from the enumeration oracle.
        let mixed = FeedbackGraph::new(3, &[(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(naive_independence(&mixed, false), 2);
        assert_eq!(mixed.strong_independence_number().unwrap(), 2);
    }

    #[test]
    fn mas_matches_known_values() {
        let edgeless = FeedbackGraph::new(4, &[]).unwrap();
        assert_eq!(edgeless.mas().unwrap(), 4);
        let pair = FeedbackGraph::new(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(pair.mas().unwrap(), 1);
        let chain = FeedbackGraph::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(chain.mas().unwrap(), 3);
    }

    #[test]
    fn caps_produce_capacity_errors() {
        let big = FeedbackGraph::new(21, &[]).unwrap();
        assert!(matches!(
            big.independence_number(true),
            Err(Error::Capacity { .. })
        ));
        let medium = FeedbackGraph::new(11, &[]).unwrap();
        assert!(matches!(medium.mas(), Err(Error::Capacity { .. })));
    }

    #[test]
    fn dominating_set_checks() {
        let bandit = FeedbackGraph::new(4, &[]).unwrap();
        assert!(bandit.is_dominating(&[0, 1, 2, 3]));
        assert!(!bandit.is_dominating(&[1, 2, 3]));

        let star = FeedbackGraph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(star.is_dominating(&[0]));
    }

    #[test]
    fn stats_reports_all_oracles() {
        let mixed = FeedbackGraph::new(3, &[(0, 1), (1, 0), (1, 2)]).unwrap();
        let stats = mixed.stats().unwrap();
        assert_eq!(stats.alpha, 2); // {0, 2}
        assert_eq!(stats.alpha_strong, 2);
        assert_eq!(stats.mas, Some(2));
        assert!(!stats.is_undirected);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn oracle_chain_holds_on_random_graphs(
            k in 2usize..=10,
            edges in proptest::collection::vec((0usize..10, 0usize..10), 0..40),
        ) {
            let edges: Vec<(usize, usize)> = edges
                .into_iter()
                .map(|(u, v)| (u % k, v % k))
                .collect();
            let g = FeedbackGraph::new(k, &edges).unwrap();

            let alpha = g.independence_number(true).unwrap();
            let alpha_strong = g.strong_independence_number().unwrap();
            let mas = g.mas().unwrap();

            prop_assert_eq!(alpha, naive_independence(&g, true));
            prop_assert_eq!(alpha_strong, naive_independence(&g, false));
            prop_assert_eq!(mas, naive_mas(&g));

            prop_assert!(1 <= alpha);
            prop_assert!(alpha <= alpha_strong);
            prop_assert!(alpha_strong <= k);
            prop_assert!(alpha <= mas);
            prop_assert!(mas <= alpha_strong);

            if g.is_undirected() {
                prop_assert_eq!(alpha, alpha_strong);
                prop_assert_eq!(g.strong_subgraph(), g.clone());
            }
        }

        #[test]
        fn serialization_round_trips(
            k in 2usize..=8,
            edges in proptest::collection::vec((0usize..8, 0usize..8), 0..24),
        ) {
            let edges: Vec<(usize, usize)> = edges
                .into_iter()
                .map(|(u, v)| (u % k, v % k))
                .collect();
            let g = FeedbackGraph::new(k, &edges).unwrap();

            let via_text = FeedbackGraph::from_edge_list_text(&g.to_edge_list_text()).unwrap();
            prop_assert_eq!(&via_text, &g);
            prop_assert_eq!(via_text.fingerprint(), g.fingerprint());

            let via_json = FeedbackGraph::from_json_str(&g.to_json_string()).unwrap();
            prop_assert_eq!(&via_json, &g);
        }
    }
}
