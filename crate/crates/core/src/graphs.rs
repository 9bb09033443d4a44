//! Oriented multigraphs on labeled vertices `1..=n` and their cocomposition.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::perm::Perm;

/// An `n`-graph: vertices `1..=n` and a multiset of oriented edges `i → j`, `i ≠ j`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        for &(a, b) in edges {
            if a == 0 || b == 0 || a > n || b > n {
                return Err(Error::Validation(format!("edge {a}->{b} leaves 1..={n}")));
            }
            if a == b {
                return Err(Error::Validation(format!("tadpole at vertex {a}")));
            }
        }
        let mut edges = edges.to_vec();
        edges.sort_unstable();
        Ok(Graph { n, edges })
    }

    pub fn edgeless(n: usize) -> Self {
        Graph { n, edges: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_edgeless(&self) -> bool {
        self.edges.is_empty()
    }

    /// Acyclic as an unoriented multigraph; a doubled edge counts as a cycle.
    pub fn is_acyclic(&self) -> bool {
        let mut uf = UnionFind::new(self.n);
        self.edges.iter().all(|&(a, b)| uf.union(a - 1, b - 1))
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.n);
        for &(a, b) in &self.edges {
            uf.union(a - 1, b - 1);
        }
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut index_of_root = vec![usize::MAX; self.n];
        for v in 0..self.n {
            let r = uf.find(v);
            if index_of_root[r] == usize::MAX {
                index_of_root[r] = comps.len();
                comps.push(Vec::new());
            }
            comps[index_of_root[r]].push(v + 1);
        }
        comps
    }

    /// For each vertex (0-based position), the 0-based index of its component.
    pub fn component_index(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for (c, comp) in self.components().iter().enumerate() {
            for &v in comp {
                out[v - 1] = c;
            }
        }
        out
    }

    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    /// Relabel vertex `i` as `σ(i)`, keeping the edges.
    pub fn permute(&self, sigma: &Perm) -> Result<Graph> {
        if sigma.len() != self.n {
            return Err(Error::SizeMismatch { expected: self.n, found: sigma.len() });
        }
        let edges: Vec<(usize, usize)> =
            self.edges.iter().map(|&(a, b)| (sigma.apply(a), sigma.apply(b))).collect();
        Graph::new(self.n, &edges)
    }

    /// The graph with the edge at `idx` removed.
    pub fn remove_edge(&self, idx: usize) -> Graph {
        let mut edges = self.edges.clone();
        edges.remove(idx);
        Graph { n: self.n, edges }
    }

    /// Simple oriented cycles of length `≤ max_len`, as sorted edge-index sets.
    pub fn oriented_cycles(&self, max_len: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for start in 0..self.edges.len() {
            let (s0, s1) = self.edges[start];
            let mut path = vec![start];
            let mut visited = vec![s0];
            self.cycle_dfs(start, s0, s1, max_len, &mut path, &mut visited, &mut out);
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn cycle_dfs(
        &self,
        start: usize,
        origin: usize,
        at: usize,
        max_len: usize,
        path: &mut Vec<usize>,
        visited: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if at == origin {
            let mut c = path.clone();
            c.sort_unstable();
            out.push(c);
            return;
        }
        if path.len() >= max_len || visited.contains(&at) {
            return;
        }
        visited.push(at);
        // only edges with index above `start`, so each cycle is found once
        for (idx, &(a, b)) in self.edges.iter().enumerate() {
            if idx > start && a == at {
                path.push(idx);
                self.cycle_dfs(start, origin, b, max_len, path, visited, out);
                path.pop();
            }
        }
        visited.pop();
    }

    /// Group (1-based) of each vertex (1-based) under the partition `parts`.
    fn groups(parts: &[usize]) -> Vec<usize> {
        let mut out = Vec::new();
        for (g, &m) in parts.iter().enumerate() {
            out.extend(std::iter::repeat_n(g + 1, m));
        }
        out
    }

    fn check_parts(&self, parts: &[usize]) -> Result<()> {
        let total: usize = parts.iter().sum();
        if total != self.n {
            return Err(Error::PartitionMismatch { expected: self.n, found: total });
        }
        if parts.contains(&0) {
            return Err(Error::Validation("partition parts must be positive".into()));
        }
        Ok(())
    }

    /// `(Δ₀, [Δ₁, …, Δₙ])`: clasp each group into one vertex, and the induced
    /// subgraph on each group with vertices relabeled `1..=mₖ`.
    pub fn cocompose(&self, parts: &[usize]) -> Result<(Graph, Vec<Graph>)> {
        self.check_parts(parts)?;
        let group = Self::groups(parts);
        let mut offsets = Vec::with_capacity(parts.len());
        let mut acc = 0;
        for &m in parts {
            offsets.push(acc);
            acc += m;
        }
        let mut outer = Vec::new();
        let mut inner: Vec<Vec<(usize, usize)>> = vec![Vec::new(); parts.len()];
        for &(a, b) in &self.edges {
            let (ga, gb) = (group[a - 1], group[b - 1]);
            if ga == gb {
                let off = offsets[ga - 1];
                inner[ga - 1].push((a - off, b - off));
            } else {
                outer.push((ga, gb));
            }
        }
        let d0 = Graph::new(parts.len(), &outer)?;
        let dk = inner
            .iter()
            .zip(parts)
            .map(|(e, &m)| Graph::new(m, e))
            .collect::<Result<Vec<_>>>()?;
        Ok((d0, dk))
    }

    /// Groups `j` externally connected to vertex `k` (1-based) under `parts`.
    pub fn externally_connected(&self, parts: &[usize], k: usize) -> Result<BTreeSet<usize>> {
        self.check_parts(parts)?;
        if k == 0 || k > self.n {
            return Err(Error::Validation(format!("vertex {k} out of range")));
        }
        let group = Self::groups(parts);
        // Δ₀ edges, indexed like the crossing edges of Γ
        let crossing: Vec<(usize, usize, usize)> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| group[a - 1] != group[b - 1])
            .map(|(i, &(a, b))| (i, group[a - 1], group[b - 1]))
            .collect();
        let mut out = BTreeSet::new();
        for &(idx, ga, gb) in &crossing {
            let (a, b) = self.edges[idx];
            let far = if a == k {
                gb
            } else if b == k {
                ga
            } else {
                continue;
            };
            // every group reachable from the far end without reusing this edge
            let mut uf = UnionFind::new(parts.len());
            for &(j, x, y) in &crossing {
                if j != idx {
                    uf.union(x - 1, y - 1);
                }
            }
            let root = uf.find(far - 1);
            for g in 0..parts.len() {
                if uf.find(g) == root {
                    out.insert(g + 1);
                }
            }
        }
        Ok(out)
    }

    /// `σ̃ ∈ S_s` with `σ(Γ_{σ̃(k)}) = (σΓ)_k`.
    pub fn tilde_sigma(&self, sigma: &Perm) -> Result<Perm> {
        let moved = self.permute(sigma)?;
        let comps = self.components();
        let idx = self.component_index();
        let images: Vec<usize> = moved
            .components()
            .iter()
            .map(|c| {
                // any vertex of (σΓ)_k comes from the component holding σ⁻¹ of it
                let v = sigma.inverse().apply(c[0]);
                idx[v - 1] + 1
            })
            .collect();
        debug_assert_eq!(images.len(), comps.len());
        Ok(Perm::from_images(&images).expect("components correspond bijectively"))
    }

    /// `ρ_k^Γ ∈ S_{s+t−1}` for the partition `(1,…,1,m,1,…,1)` with `m` at position `k`.
    ///
    /// Components of `Δ_k` come first (`1..=s`), then the components of `Δ₀`
    /// other than the one holding the clasped vertex, in order. The image of a
    /// position is the index of the component of `Γ` it corresponds to.
    pub fn rho(&self, k: usize, m: usize) -> Result<Perm> {
        let n = self.n + 1 - m;
        if k == 0 || k > n || m == 0 || m > self.n {
            return Err(Error::Validation(format!("clasp position {k} with {m} vertices")));
        }
        let parts = clasp_parts(n, k, m);
        let (d0, dk) = self.cocompose(&parts)?;
        if !d0.is_acyclic() {
            return Err(Error::Undefined("the clasped graph contains a cycle".into()));
        }
        let inner = &dk[k - 1];
        let gidx = self.component_index();
        let mut images = Vec::new();
        for comp in inner.components() {
            // vertex comp[0] of Δ_k is vertex k-1+comp[0] of Γ
            images.push(gidx[k - 1 + comp[0] - 1] + 1);
        }
        let d0_idx = d0.component_index();
        let q = d0_idx[k - 1];
        for (j, comp) in d0.components().iter().enumerate() {
            if j == q {
                continue;
            }
            let v = comp[0];
            let gv = if v < k { v } else { v + m - 1 };
            images.push(gidx[gv - 1] + 1);
        }
        Perm::from_images(&images)
            .ok_or_else(|| Error::Undefined("component correspondence is not a bijection".into()))
    }

    /// All acyclic `n`-graphs, in a fixed order.
    pub fn enumerate_acyclic(n: usize, bound: usize) -> Result<Vec<Graph>> {
        if n > bound {
            return Err(Error::BoundExceeded { n, bound });
        }
        let pairs: Vec<(usize, usize)> =
            (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect();
        let mut forests: Vec<Vec<(usize, usize)>> = Vec::new();
        fn rec(
            i: usize,
            pairs: &[(usize, usize)],
            chosen: &mut Vec<(usize, usize)>,
            n: usize,
            out: &mut Vec<Vec<(usize, usize)>>,
        ) {
            if i == pairs.len() {
                out.push(chosen.clone());
                return;
            }
            rec(i + 1, pairs, chosen, n, out);
            chosen.push(pairs[i]);
            let g = Graph { n, edges: chosen.clone() };
            if g.is_acyclic() {
                rec(i + 1, pairs, chosen, n, out);
            }
            chosen.pop();
        }
        rec(0, &pairs, &mut Vec::new(), n, &mut forests);
        let mut out = Vec::new();
        for f in forests {
            for mask in 0..(1u32 << f.len()) {
                let edges: Vec<(usize, usize)> = f
                    .iter()
                    .enumerate()
                    .map(|(i, &(a, b))| if mask >> i & 1 == 1 { (b, a) } else { (a, b) })
                    .collect();
                out.push(Graph::new(n, &edges)?);
            }
        }
        out.sort();
        Ok(out)
    }
}

/// The partition `(1,…,1,m,1,…,1)` of length `n` with `m` at 1-based position `k`.
pub fn clasp_parts(n: usize, k: usize, m: usize) -> Vec<usize> {
    (1..=n).map(|i| if i == k { m } else { 1 }).collect()
}

impl fmt::Display for Graph {
    /// `n; a->b, c->d`, or just `n;` without edges.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}->{b}")).collect();
        if edges.is_empty() {
            write!(f, "{};", self.n)
        } else {
            write!(f, "{}; {}", self.n, edges.join(", "))
        }
    }
}

impl FromStr for Graph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Graph> {
        let (head, tail) = s.split_once(';').unwrap_or((s, ""));
        let n: usize = head
            .trim()
            .parse()
            .map_err(|_| Error::Parse { col: 1, msg: format!("bad vertex count `{}`", head.trim()) })?;
        let mut edges = Vec::new();
        let mut col = head.len() + 2;
        for part in tail.split(',') {
            let t = part.trim();
            if !t.is_empty() {
                let (a, b) = t
                    .split_once("->")
                    .ok_or_else(|| Error::Parse { col, msg: format!("expected `a->b`, got `{t}`") })?;
                let a = a.trim().parse().map_err(|_| Error::Parse { col, msg: format!("bad vertex `{a}`") })?;
                let b = b.trim().parse().map_err(|_| Error::Parse { col, msg: format!("bad vertex `{b}`") })?;
                edges.push((a, b));
            }
            col += part.len() + 1;
        }
        Graph::new(n, &edges)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    /// Merge; `false` if already joined (the edge closes a cycle).
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // keep the smaller label as root so component order is stable
        if ra < rb {
            self.parent[rb] = ra;
        } else {
            self.parent[ra] = rb;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> Graph {
        s.parse().unwrap()
    }

    #[test]
    fn round_trip_text() {
        let x = g("4; 2->1, 1->3");
        assert_eq!(x.to_string(), "4; 1->3, 2->1");
        assert_eq!(g(&x.to_string()), x);
        assert!("3; 1-2".parse::<Graph>().is_err());
        assert!("2; 1->1".parse::<Graph>().is_err());
    }

    #[test]
    fn doubled_edge_is_a_cycle() {
        assert!(!g("2; 1->2, 1->2").is_acyclic());
        assert!(!g("2; 1->2, 2->1").is_acyclic());
        assert!(g("3; 1->2, 3->2").is_acyclic());
    }

    #[test]
    fn oriented_cycles_found_once() {
        let x = g("3; 1->2, 2->3, 3->1, 2->1");
        let cycles = x.oriented_cycles(3);
        assert_eq!(cycles.len(), 2);
        assert_eq!(x.oriented_cycles(2).len(), 1);
        assert!(g("2; 1->2, 1->2").oriented_cycles(3).is_empty());
    }

    #[test]
    fn partition_errors() {
        let x = g("3; 1->2");
        assert!(x.cocompose(&[1, 1]).is_err());
        assert!(Graph::enumerate_acyclic(6, 5).is_err());
    }
}
