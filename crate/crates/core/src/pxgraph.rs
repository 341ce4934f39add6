//! Praeger–Xu graphs `C(p, r, s)` as exact multigraphs, and isomorphism
//! testing by colour refinement with individualization.
//!
//! `C(p, r, s)` for `s ≥ 1` has vertex set `Z_r × F_p^s`, with
//! `(i, x₀…x_{s−1})` adjacent to `(i+1, x₁…x_s)` for every choice of
//! `x_s`: a `2p`-regular simple graph on `r·p^s` vertices with `r·p^{s+1}`
//! edges. The degenerate `s = 0` members are the `p`-fold thickened
//! `r`-cycle and the plain `pr`-cycle.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Undirected multigraph without loops; edges are stored once per
/// unordered pair with a multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    pub vertices: usize,
    edges: BTreeMap<(u32, u32), u32>,
}

impl Multigraph {
    pub fn new(vertices: usize) -> Multigraph {
        Multigraph { vertices, edges: BTreeMap::new() }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, multiplicity: u32) {
        assert!(u < self.vertices && v < self.vertices, "vertex out of range");
        assert_ne!(u, v, "loops are outside this graph model");
        if multiplicity == 0 {
            return;
        }
        let key = (u.min(v) as u32, u.max(v) as u32);
        *self.edges.entry(key).or_insert(0) += multiplicity;
    }

    /// Number of edges counted with multiplicity.
    pub fn edge_count(&self) -> u64 {
        self.edges.values().map(|&m| m as u64).sum()
    }

    /// Number of distinct adjacent pairs.
    pub fn bundle_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.edges.iter().map(|(&(u, v), &m)| (u as usize, v as usize, m))
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u32 {
        let key = (u.min(v) as u32, u.max(v) as u32);
        self.edges.get(&key).copied().unwrap_or(0)
    }

    /// Degrees (with multiplicity), indexed by vertex.
    pub fn degrees(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.vertices];
        for (&(u, v), &m) in &self.edges {
            deg[u as usize] += m as u64;
            deg[v as usize] += m as u64;
        }
        deg
    }

    pub fn is_regular(&self, degree: u64) -> bool {
        self.degrees().iter().all(|&d| d == degree)
    }

    /// Adjacency bundles per vertex: `(neighbour, multiplicity)` lists.
    fn adjacency(&self) -> Vec<Vec<(u32, u32)>> {
        let mut adj = vec![Vec::new(); self.vertices];
        for (&(u, v), &m) in &self.edges {
            adj[u as usize].push((v, m));
            adj[v as usize].push((u, m));
        }
        adj
    }

    /// Plain-text edge list: a header line `p r s delta |V|`, then one
    /// `u v multiplicity` line per bundle.
    pub fn edge_list_text(&self, p: u64, r: u64, s: u64, delta: i64) -> String {
        let mut out = format!("{p} {r} {s} {delta} {}\n", self.vertices);
        for (u, v, m) in self.edges() {
            out.push_str(&format!("{u} {v} {m}\n"));
        }
        out
    }
}

/// Vertex id of `(i, x)` in `C(p, r, s)`: `i·p^s + Σ x_j·p^j`
/// (digits little-endian, the ring coordinate above them).
pub fn px_vertex_id(p: u64, _s: u64, i: u64, x: &[u64]) -> usize {
    let mut xid = 0u64;
    let mut scale = 1u64;
    for &digit in x {
        xid += digit * scale;
        scale *= p;
    }
    (i * scale + xid) as usize
}

/// `C(p, r, s)` for `s ≥ 1`.
///
/// `p | r` is permitted here: the graph is well-defined for any `r ≥ 3`,
/// and lengths divisible by `p` occur as reference graphs (contents
/// containing the full-cycle character re-express over a `pr`-cycle).
/// Group- and census-level entry points still enforce `p ∤ r`.
pub fn build_px(p: u64, r: u64, s: u64, max_vertices: u64) -> Result<Multigraph> {
    if p < 3 || !crate::ffpoly::is_prime(p) {
        return Err(Error::ParamDomain(format!(
            "p = {p} is not an odd prime (the construction requires odd prime p)"
        )));
    }
    if r < 3 {
        return Err(Error::ParamDomain(format!("r = {r} must be at least 3")));
    }
    if s == 0 {
        return Err(Error::ParamDomain(
            "s = 0 has two degenerate forms; use build_px_zero".into(),
        ));
    }
    let vcount = (r as u128) * crate::ffpoly::powm(p, s, u64::MAX) as u128;
    if vcount > max_vertices as u128 {
        return Err(Error::Budget(format!(
            "graph on {vcount} vertices exceeds the cap {max_vertices}"
        )));
    }
    let mut g = Multigraph::new(vcount as usize);
    // one edge per (i, word of length s+1)
    let words = word_count(p, s + 1);
    let mut word = vec![0u64; (s + 1) as usize];
    for _ in 0..words {
        for i in 0..r {
            let u = px_vertex_id(p, s, i, &word[..s as usize]);
            let v = px_vertex_id(p, s, (i + 1) % r, &word[1..]);
            if u < v {
                g.add_edge(u, v, 1);
            } else {
                g.add_edge(v, u, 1);
            }
        }
        increment(&mut word, p);
    }
    Ok(g)
}

/// The two `s = 0` degenerate members: `delta = +1` is the `p`-fold
/// thickened `r`-cycle, `delta = −1` the simple `pr`-cycle.
///
/// Unlike `build_px`, `p | r` is permitted: the thickened cycle is a
/// well-formed graph for any length, and lengths divisible by `p` do occur
/// (maps whose content is one of the degenerate linear pairs live on a
/// thickened `pr`-cycle).
pub fn build_px_zero(p: u64, r: u64, delta: i64) -> Result<Multigraph> {
    if p < 3 || !crate::ffpoly::is_prime(p) {
        return Err(Error::ParamDomain(format!(
            "p = {p} is not an odd prime (the construction requires odd prime p)"
        )));
    }
    if r < 3 {
        return Err(Error::ParamDomain(format!("r = {r} must be at least 3")));
    }
    match delta {
        1 => {
            let mut g = Multigraph::new(r as usize);
            for i in 0..r as usize {
                g.add_edge(i, (i + 1) % r as usize, p as u32);
            }
            Ok(g)
        }
        -1 => {
            let m = (p * r) as usize;
            let mut g = Multigraph::new(m);
            for i in 0..m {
                g.add_edge(i, (i + 1) % m, 1);
            }
            Ok(g)
        }
        _ => Err(Error::ParamDomain(format!("delta = {delta} must be +1 or -1"))),
    }
}

fn word_count(p: u64, len: u64) -> u64 {
    (0..len).fold(1u64, |acc, _| acc * p)
}

fn increment(word: &mut [u64], p: u64) {
    for digit in word.iter_mut() {
        *digit += 1;
        if *digit < p {
            return;
        }
        *digit = 0;
    }
}

/// Exact isomorphism test. Runs colour refinement over both graphs with a
/// shared palette, individualizing one vertex per level on ties; any
/// claimed isomorphism is verified bundle-by-bundle before returning.
pub fn isomorphic(a: &Multigraph, b: &Multigraph, max_vertices: u64) -> Result<bool> {
    if a.vertices.max(b.vertices) as u64 > max_vertices {
        return Err(Error::Budget(format!(
            "isomorphism test on {} vertices exceeds the cap {max_vertices}",
            a.vertices.max(b.vertices)
        )));
    }
    if a.vertices != b.vertices
        || a.bundle_count() != b.bundle_count()
        || a.edge_count() != b.edge_count()
    {
        return Ok(false);
    }
    let sorted = |g: &Multigraph| {
        let mut d = g.degrees();
        d.sort_unstable();
        d
    };
    if sorted(a) != sorted(b) {
        return Ok(false);
    }
    let mut search = IsoSearch {
        a,
        b,
        adj_a: a.adjacency(),
        adj_b: b.adjacency(),
        nodes: 0,
    };
    let n = a.vertices;
    search.run(vec![0; n], vec![0; n])
}

struct IsoSearch<'g> {
    a: &'g Multigraph,
    b: &'g Multigraph,
    adj_a: Vec<Vec<(u32, u32)>>,
    adj_b: Vec<Vec<(u32, u32)>>,
    nodes: u64,
}

impl<'g> IsoSearch<'g> {
    fn run(&mut self, mut ca: Vec<u32>, mut cb: Vec<u32>) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > 200_000 {
            return Err(Error::Budget(
                "isomorphism search exceeded its node budget".into(),
            ));
        }
        if !refine(&self.adj_a, &self.adj_b, &mut ca, &mut cb) {
            return Ok(false);
        }
        let n = ca.len();
        let mut class_size = BTreeMap::new();
        for &c in &ca {
            *class_size.entry(c).or_insert(0u32) += 1;
        }
        if let Some((&color, _)) = class_size.iter().find(|&(_, &count)| count > 1) {
            // individualize: pin the first such vertex of A against every
            // same-coloured vertex of B
            let u = ca.iter().position(|&c| c == color).expect("present");
            let fresh = u32::MAX;
            for v in 0..n {
                if cb[v] != color {
                    continue;
                }
                let mut ca2 = ca.clone();
                let mut cb2 = cb.clone();
                ca2[u] = fresh;
                cb2[v] = fresh;
                if self.run(ca2, cb2)? {
                    return Ok(true);
                }
            }
            return Ok(false);
        }
        // discrete colouring: colours pair the vertices up
        let mut map = vec![usize::MAX; n];
        let mut by_color: BTreeMap<u32, usize> = BTreeMap::new();
        for (v, &c) in cb.iter().enumerate() {
            by_color.insert(c, v);
        }
        for (u, &c) in ca.iter().enumerate() {
            map[u] = *by_color.get(&c).expect("refinement matched histograms");
        }
        // verify the witness exactly
        for (u, v, m) in self.a.edges() {
            if self.b.multiplicity(map[u], map[v]) != m {
                return Ok(false);
            }
        }
        Ok(self.a.bundle_count() == self.b.bundle_count())
    }
}

/// One shared-palette refinement pass to stability. Returns false when the
/// colour histograms of the two graphs separate (no isomorphism in this
/// branch).
fn refine(
    adj_a: &[Vec<(u32, u32)>],
    adj_b: &[Vec<(u32, u32)>],
    ca: &mut [u32],
    cb: &mut [u32],
) -> bool {
    loop {
        let sig = |adj: &[Vec<(u32, u32)>], colors: &[u32], v: usize| {
            let mut s: Vec<(u32, u32)> = adj[v]
                .iter()
                .map(|&(w, m)| (colors[w as usize], m))
                .collect();
            s.sort_unstable();
            (colors[v], s)
        };
        let mut palette: BTreeMap<(u32, Vec<(u32, u32)>), u32> = BTreeMap::new();
        let sigs_a: Vec<_> = (0..ca.len()).map(|v| sig(adj_a, ca, v)).collect();
        let sigs_b: Vec<_> = (0..cb.len()).map(|v| sig(adj_b, cb, v)).collect();
        for s in sigs_a.iter().chain(&sigs_b) {
            let next = palette.len() as u32;
            palette.entry(s.clone()).or_insert(next);
        }
        let mut changed = false;
        let mut hist_a: BTreeMap<u32, u32> = BTreeMap::new();
        let mut hist_b: BTreeMap<u32, u32> = BTreeMap::new();
        for (v, s) in sigs_a.iter().enumerate() {
            let c = palette[s];
            if c != ca[v] {
                changed = true;
            }
            ca[v] = c;
            *hist_a.entry(c).or_insert(0) += 1;
        }
        for (v, s) in sigs_b.iter().enumerate() {
            let c = palette[s];
            if c != cb[v] {
                changed = true;
            }
            cb[v] = c;
            *hist_b.entry(c).or_insert(0) += 1;
        }
        if hist_a != hist_b {
            return false;
        }
        if !changed {
            return true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete_bipartite(m: usize, n: usize) -> Multigraph {
        let mut g = Multigraph::new(m + n);
        for u in 0..m {
            for v in 0..n {
                g.add_edge(u, m + v, 1);
            }
        }
        g
    }

    fn circulant(n: usize, jumps: &[usize]) -> Multigraph {
        let mut g = Multigraph::new(n);
        for u in 0..n {
            for &j in jumps {
                g.add_edge(u, (u + j) % n, 1);
            }
        }
        g
    }

    fn relabel(g: &Multigraph, perm: &[usize]) -> Multigraph {
        let mut h = Multigraph::new(g.vertices);
        for (u, v, m) in g.edges() {
            h.add_edge(perm[u], perm[v], m);
        }
        h
    }

    #[test]
    fn px_5_3_1_shape() {
        let g = build_px(5, 3, 1, 2000).unwrap();
        assert_eq!(g.vertices, 15);
        assert_eq!(g.edge_count(), 75);
        assert!(g.is_regular(10));
    }

    #[test]
    fn px_counts_across_small_grid() {
        for (p, r, s) in [(3u64, 4u64, 1u64), (3, 4, 2), (3, 5, 1), (5, 3, 1), (3, 5, 3)] {
            let g = build_px(p, r, s, 2000).unwrap();
            let expected_v = r * p.pow(s as u32);
            assert_eq!(g.vertices as u64, expected_v);
            assert_eq!(g.edge_count(), r * p.pow(s as u32 + 1));
            assert!(g.is_regular(2 * p), "regularity at ({p},{r},{s})");
            // simple for s ≥ 1, r ≥ 3
            assert_eq!(g.bundle_count() as u64, g.edge_count());
        }
    }

    #[test]
    fn px_zero_forms() {
        let thick = build_px_zero(3, 4, 1).unwrap();
        assert_eq!(thick.vertices, 4);
        assert_eq!(thick.edge_count(), 12);
        assert_eq!(thick.bundle_count(), 4);
        assert!(thick.is_regular(6));
        let cycle = build_px_zero(3, 4, -1).unwrap();
        assert_eq!(cycle.vertices, 12);
        assert!(cycle.is_regular(2));
        assert!(build_px_zero(3, 4, 0).is_err());
    }

    #[test]
    fn px_3_4_1_is_complete_bipartite_6_6() {
        let px = build_px(3, 4, 1, 2000).unwrap();
        let k66 = complete_bipartite(6, 6);
        assert!(isomorphic(&px, &k66, 2000).unwrap());
    }

    #[test]
    fn iso_invariant_under_relabelling() {
        let g = build_px(3, 4, 1, 2000).unwrap();
        // a fixed scrambling permutation
        let perm: Vec<usize> = (0..12).map(|v| (5 * v + 3) % 12).collect();
        let h = relabel(&g, &perm);
        assert!(isomorphic(&g, &h, 2000).unwrap());
        let cyc = build_px_zero(3, 4, -1).unwrap();
        let perm12: Vec<usize> = (0..12).map(|v| (7 * v + 1) % 12).collect();
        assert!(isomorphic(&cyc, &relabel(&cyc, &perm12), 2000).unwrap());
    }

    #[test]
    fn iso_rejects_same_degree_non_isomorphic() {
        // both 6-regular on 12 vertices, but the circulant has triangles
        let px = build_px(3, 4, 1, 2000).unwrap();
        let circ = circulant(12, &[1, 2, 3]);
        assert_eq!(circ.edge_count(), px.edge_count());
        assert!(!isomorphic(&px, &circ, 2000).unwrap());
    }

    #[test]
    fn iso_distinguishes_multiplicities() {
        let thick = build_px_zero(3, 4, 1).unwrap(); // 4 vertices, 3-fold cycle
        let mut other = Multigraph::new(4);
        // same degree sequence (6,6,6,6), different bundle profile
        other.add_edge(0, 1, 4);
        other.add_edge(1, 2, 2);
        other.add_edge(2, 3, 4);
        other.add_edge(3, 0, 2);
        assert_eq!(other.degrees(), thick.degrees());
        assert!(!isomorphic(&thick, &other, 2000).unwrap());
    }

    #[test]
    fn iso_budget_guard() {
        let g = build_px(3, 4, 1, 2000).unwrap();
        assert!(matches!(isomorphic(&g, &g, 10), Err(Error::Budget(_))));
        assert!(matches!(build_px(3, 4, 5, 100), Err(Error::Budget(_))));
    }

    #[test]
    fn edge_list_text_shape() {
        let g = build_px_zero(3, 4, 1).unwrap();
        let text = g.edge_list_text(3, 4, 0, 1);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("3 4 0 1 4"));
        assert_eq!(lines.clone().count(), 4);
        assert!(lines.all(|l| l.split_whitespace().count() == 3));
    }
}
