//! Diameter graphs: extraction from configurations, structural classification
//! (caterpillars, odd cycles with pendants), the thrackle intersection test,
//! and enumeration of the candidate graph shapes for small n.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{self, Point, PointConfig};

/// Default relative activity tolerance.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Unordered vertex pair stored as `(i, j)` with `i < j`, 0-based.
pub type Edge = (usize, usize);

/// Abstract simple graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    /// Normalizes each pair to `i < j`, sorts and removes duplicates.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return invalid(format!("self-loop at vertex {a}"));
            }
            if a >= n || b >= n {
                return invalid(format!("edge {a}-{b} out of range for n={n}"));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Self { n, edges: set.into_iter().collect() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn min_degree(&self) -> usize {
        self.degrees().into_iter().min().unwrap_or(0)
    }

    /// Component label per vertex and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let adj = self.adjacency();
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1 <= 1
    }

    /// Image under the vertex map `v -> perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return invalid("permutation length differs from vertex count");
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return invalid("not a permutation");
            }
        }
        Self::new(self.n, self.edges.iter().map(|&(a, b)| (perm[a], perm[b])))
    }

    /// Vertices left after repeatedly deleting degree-≤1 vertices (the 2-core).
    fn two_core(&self) -> Vec<bool> {
        let adj = self.adjacency();
        let mut deg = self.degrees();
        let mut alive = vec![true; self.n];
        let mut stack: Vec<usize> = (0..self.n).filter(|&v| deg[v] <= 1).collect();
        while let Some(v) = stack.pop() {
            if !alive[v] {
                continue;
            }
            alive[v] = false;
            for &w in &adj[v] {
                if alive[w] {
                    deg[w] -= 1;
                    if deg[w] == 1 {
                        stack.push(w);
                    }
                }
            }
        }
        alive
    }

    /// True iff the graph contains a cycle of even length. Uses the block
    /// decomposition: a graph has no even cycle iff every block is a bridge or
    /// an odd cycle.
    pub fn has_even_cycle(&self) -> bool {
        blocks(self).into_iter().any(|(verts, edges)| {
            edges > 1 && !(edges == verts && verts % 2 == 1)
        })
    }

    /// Line format `n=<n>; edges=i-j,...` with 1-based vertex labels.
    pub fn to_text(&self) -> String {
        let edges: Vec<String> = self.edges.iter().map(|(a, b)| format!("{}-{}", a + 1, b + 1)).collect();
        format!("n={}; edges={}", self.n, edges.join(","))
    }

    /// Accepts `n=<n>; edges=i-j,...` and the short form `<n>;i-j,...`, 1-based.
    pub fn parse_text(s: &str) -> Result<Self> {
        let (head, tail) = s
            .split_once(';')
            .ok_or_else(|| Error::InvalidInput(format!("graph text needs ';': {s:?}")))?;
        let head = head.trim();
        let n_str = head.strip_prefix("n=").unwrap_or(head).trim();
        let n: usize = n_str
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad vertex count {n_str:?}")))?;
        let tail = tail.trim();
        let tail = tail.strip_prefix("edges=").unwrap_or(tail).trim();
        let mut edges = Vec::new();
        for tok in tail.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (a, b) = tok
                .split_once('-')
                .ok_or_else(|| Error::InvalidInput(format!("bad edge token {tok:?}")))?;
            let parse = |x: &str| -> Result<usize> {
                match x.trim().parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v - 1),
                    _ => invalid(format!("bad vertex label {x:?} (labels are 1-based)")),
                }
            };
            edges.push((parse(a)?, parse(b)?));
        }
        Self::new(n, edges)
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Graph {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse_text(s)
    }
}

/// Biconnected components as (vertex count, edge count), Hopcroft–Tarjan.
fn blocks(g: &Graph) -> Vec<(usize, usize)> {
    let adj = g.adjacency();
    let n = g.n;
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0;
    let mut edge_stack: Vec<Edge> = Vec::new();
    let mut out = Vec::new();

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        // (vertex, parent, next neighbor index)
        let mut stack = vec![(root, usize::MAX, 0usize)];
        while let Some(top) = stack.last_mut() {
            let (v, parent) = (top.0, top.1);
            if top.2 < adj[v].len() {
                let w = adj[v][top.2];
                top.2 += 1;
                if disc[w] == usize::MAX {
                    edge_stack.push((v, w));
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, v, 0));
                } else if w != parent && disc[w] < disc[v] {
                    edge_stack.push((v, w));
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(u, _, _)) = stack.last() {
                    low[u] = low[u].min(low[v]);
                    if low[v] >= disc[u] {
                        let mut verts = BTreeSet::new();
                        let mut edges = 0;
                        while let Some(e) = edge_stack.pop() {
                            verts.insert(e.0);
                            verts.insert(e.1);
                            edges += 1;
                            if e == (u, v) {
                                break;
                            }
                        }
                        out.push((verts.len(), edges));
                    }
                }
            }
        }
    }
    out
}

/// Near-diameter pairs of a configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiameterGraph {
    pub graph: Graph,
    pub tol: f64,
    pub diameter: f64,
}

impl DiameterGraph {
    pub fn n(&self) -> usize {
        self.graph.n()
    }
    pub fn edges(&self) -> &[Edge] {
        self.graph.edges()
    }
}

/// All pairs `i < j` with `|z_i - z_j| ≥ (1 - rel_tol) · diam`.
pub fn extract(cfg: &PointConfig, rel_tol: f64) -> Result<DiameterGraph> {
    let diam = geometry::diameter(cfg)?;
    let threshold = (1.0 - rel_tol) * diam;
    let pts = cfg.points();
    let mut edges = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if (pts[i] - pts[j]).norm() >= threshold {
                edges.push((i, j));
            }
        }
    }
    Ok(DiameterGraph { graph: Graph::new(pts.len(), edges)?, tol: rel_tol, diameter: diam })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GraphKind {
    Caterpillar,
    OddCycleWithPendants,
    Disconnected,
    Other,
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `detail` is the spine length (non-leaf vertex count) for caterpillars,
/// the cycle length for unicyclic graphs and the component count for
/// disconnected graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphClass {
    pub kind: GraphKind,
    pub detail: Option<usize>,
}

pub fn classify(g: &Graph) -> GraphClass {
    let (_, comps) = g.components();
    if comps > 1 {
        return GraphClass { kind: GraphKind::Disconnected, detail: Some(comps) };
    }
    let other = GraphClass { kind: GraphKind::Other, detail: None };
    let n = g.n();
    let m = g.edge_count();
    let deg = g.degrees();
    if n >= 1 && m + 1 == n {
        // tree: the non-leaf vertices must induce a path
        let adj = g.adjacency();
        let spine: Vec<usize> = (0..n).filter(|&v| deg[v] >= 2).collect();
        let is_path = spine.iter().all(|&v| adj[v].iter().filter(|&&w| deg[w] >= 2).count() <= 2);
        return if is_path {
            GraphClass { kind: GraphKind::Caterpillar, detail: Some(spine.len()) }
        } else {
            other
        };
    }
    if m == n && n >= 3 {
        let core = g.two_core();
        let k = core.iter().filter(|&&c| c).count();
        // every vertex off the cycle is a leaf hanging on the cycle
        let pendants_ok = g.edges().iter().all(|&(a, b)| core[a] || core[b])
            && (0..n).all(|v| core[v] || deg[v] == 1);
        if k % 2 == 1 && pendants_ok {
            return GraphClass { kind: GraphKind::OddCycleWithPendants, detail: Some(k) };
        }
    }
    other
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.re - a.re) * (c.im - a.im) - (b.im - a.im) * (c.re - a.re)
}

fn sign(x: f64, eps: f64) -> i8 {
    if x > eps {
        1
    } else if x < -eps {
        -1
    } else {
        0
    }
}

/// Number of intersection points of two closed segments: 0, 1, or 2 meaning
/// "infinitely many" (collinear overlap of positive length).
fn segment_meetings(p1: Point, p2: Point, q1: Point, q2: Point, eps: f64) -> u8 {
    let d1 = sign(orient(q1, q2, p1), eps);
    let d2 = sign(orient(q1, q2, p2), eps);
    let d3 = sign(orient(p1, p2, q1), eps);
    let d4 = sign(orient(p1, p2, q2), eps);
    if d1 == 0 && d2 == 0 && d3 == 0 && d4 == 0 {
        // collinear: project onto the dominant axis of p
        let dir = p2 - p1;
        let t = |z: Point| ((z - p1) * dir.conj()).re / dir.norm_sqr();
        let (a0, a1) = (0.0f64, 1.0f64);
        let (mut b0, mut b1) = (t(q1), t(q2));
        if b0 > b1 {
            std::mem::swap(&mut b0, &mut b1);
        }
        let lo = a0.max(b0);
        let hi = a1.min(b1);
        let rel = eps / dir.norm_sqr();
        return if hi < lo - rel {
            0
        } else if hi - lo <= rel {
            1
        } else {
            2
        };
    }
    if d1 * d2 <= 0 && d3 * d4 <= 0 {
        1
    } else {
        0
    }
}

/// True iff every two edge segments meet in exactly one point. A shared
/// endpoint counts as one meeting; collinear overlap fails the test.
pub fn check_pairwise_intersection(cfg: &PointConfig, g: &Graph) -> Result<bool> {
    if g.n() != cfg.len() {
        return invalid("graph and configuration sizes differ");
    }
    let pts = cfg.points();
    for &(a, b) in g.edges() {
        if pts[a] == pts[b] {
            return invalid(format!("edge {a}-{b} has coincident endpoints"));
        }
    }
    let scale = if cfg.len() >= 2 { geometry::diameter(cfg)? } else { 1.0 };
    let eps = 1e-12 * scale * scale;
    let edges = g.edges();
    for (x, &(a, b)) in edges.iter().enumerate() {
        for &(c, d) in &edges[x + 1..] {
            if segment_meetings(pts[a], pts[b], pts[c], pts[d], eps) != 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A caterpillar in canonical form: leaf counts along the spine.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Caterpillar {
    pub n: usize,
    pub spine_leaves: Vec<usize>,
}

impl Caterpillar {
    /// Spine vertices are `0..s`, leaves follow in spine order.
    pub fn to_graph(&self) -> Graph {
        if self.spine_leaves.is_empty() {
            return Graph::new(self.n, (self.n == 2).then_some((0, 1))).expect("valid K2");
        }
        let s = self.spine_leaves.len();
        let mut edges: Vec<Edge> = (1..s).map(|i| (i - 1, i)).collect();
        let mut next = s;
        for (i, &c) in self.spine_leaves.iter().enumerate() {
            for _ in 0..c {
                edges.push((i, next));
                next += 1;
            }
        }
        Graph::new(self.n, edges).expect("valid caterpillar")
    }
}

fn compositions(total: usize, parts: usize, mins: &dyn Fn(usize) -> usize, out: &mut Vec<Vec<usize>>) {
    fn rec(
        idx: usize,
        left: usize,
        parts: usize,
        mins: &dyn Fn(usize) -> usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if idx == parts {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let rest_min: usize = (idx + 1..parts).map(mins).sum();
        let lo = mins(idx);
        if left < lo + rest_min {
            return;
        }
        for v in lo..=left - rest_min {
            cur.push(v);
            rec(idx + 1, left - v, parts, mins, cur, out);
            cur.pop();
        }
    }
    rec(0, total, parts, mins, &mut Vec::with_capacity(parts), out);
}

/// All caterpillars on `n` vertices up to isomorphism.
pub fn enumerate_caterpillars(n: usize) -> Result<Vec<Caterpillar>> {
    if n < 2 {
        return invalid("caterpillar enumeration needs n ≥ 2");
    }
    if n == 2 {
        return Ok(vec![Caterpillar { n, spine_leaves: vec![] }]);
    }
    let mut out = BTreeSet::new();
    for s in 1..=n - 2 {
        let mins = move |i: usize| if s == 1 || i == 0 || i == s - 1 { 1 } else { 0 };
        let mut comps = Vec::new();
        compositions(n - s, s, &mins, &mut comps);
        for c in comps {
            let rev: Vec<usize> = c.iter().rev().copied().collect();
            out.insert(Caterpillar { n, spine_leaves: c.min(rev) });
        }
    }
    Ok(out.into_iter().collect())
}

/// Closed-form caterpillar count `2^{n-4} + 2^{⌊n/2⌋-2}`, valid for n ≥ 5.
pub fn caterpillar_count_formula(n: usize) -> Option<u64> {
    (n >= 5).then(|| (1u64 << (n - 4)) + (1u64 << (n / 2 - 2)))
}

/// An odd cycle `C_k` with `pendants[i]` leaves on cycle vertex `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Unicyclic {
    pub n: usize,
    pub pendants: Vec<usize>,
}

impl Unicyclic {
    pub fn cycle_len(&self) -> usize {
        self.pendants.len()
    }

    /// Cycle vertices are `0..k`, pendants follow in cycle order.
    pub fn to_graph(&self) -> Graph {
        let k = self.pendants.len();
        let mut edges: Vec<Edge> = (0..k).map(|i| (i, (i + 1) % k)).collect();
        let mut next = k;
        for (i, &c) in self.pendants.iter().enumerate() {
            for _ in 0..c {
                edges.push((i, next));
                next += 1;
            }
        }
        Graph::new(self.n, edges).expect("valid unicyclic graph")
    }
}

fn dihedral_canonical(seq: &[usize]) -> Vec<usize> {
    let k = seq.len();
    let mut best = seq.to_vec();
    for r in 0..k {
        let rot: Vec<usize> = (0..k).map(|i| seq[(i + r) % k]).collect();
        let refl: Vec<usize> = (0..k).map(|i| seq[(r + k - i) % k]).collect();
        best = best.min(rot).min(refl);
    }
    best
}

/// Odd cycles `C_k`, `3 ≤ k ≤ min(n, max_cycle)`, with the remaining vertices
/// attached as pendants, up to isomorphism.
pub fn enumerate_unicyclic_candidates(n: usize, max_cycle: usize) -> Result<Vec<Unicyclic>> {
    if n < 3 {
        return invalid("unicyclic candidates need n ≥ 3");
    }
    let mut out = BTreeSet::new();
    for k in (3..=n.min(max_cycle)).step_by(2) {
        let mut comps = Vec::new();
        compositions(n - k, k, &|_| 0, &mut comps);
        for c in comps {
            out.insert(Unicyclic { n, pendants: dihedral_canonical(&c) });
        }
    }
    Ok(out.into_iter().collect())
}

/// `C_{n-3}` with three pendant edges at cycle positions `⌊i(n-3)/3⌋`.
pub fn conjectured_even_graph(n: usize) -> Result<Unicyclic> {
    if n % 2 != 0 || n < 6 {
        return invalid(format!("conjectured graph needs even n ≥ 6, got {n}"));
    }
    let k = n - 3;
    let mut pendants = vec![0; k];
    for i in 0..3 {
        pendants[i * k / 3] += 1;
    }
    Ok(Unicyclic { n, pendants })
}

/// Necessary conditions for a maximizer, evaluated on one configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub edge_count: usize,
    pub edge_count_at_most_n: bool,
    pub min_degree_at_least_one: bool,
    pub connected: bool,
    pub no_even_cycle: bool,
    pub pairwise_intersecting: bool,
    pub convex_position: bool,
    pub class: GraphClass,
    pub class_allowed: bool,
}

impl StructureReport {
    pub fn all_true(&self) -> bool {
        self.edge_count_at_most_n
            && self.min_degree_at_least_one
            && self.connected
            && self.no_even_cycle
            && self.pairwise_intersecting
            && self.convex_position
            && self.class_allowed
    }
}

pub fn maximizer_structure_report(cfg: &PointConfig, rel_tol: f64) -> Result<StructureReport> {
    cfg.require_distinct()?;
    let dg = extract(cfg, rel_tol)?;
    let g = &dg.graph;
    let class = classify(g);
    let convex_position = if cfg.len() >= 3 {
        geometry::is_convex_position(cfg, geometry::DEFAULT_CONVEX_TOL)?
    } else {
        true
    };
    Ok(StructureReport {
        edge_count: g.edge_count(),
        edge_count_at_most_n: g.edge_count() <= g.n(),
        min_degree_at_least_one: g.min_degree() >= 1,
        connected: g.is_connected(),
        no_even_cycle: !g.has_even_cycle(),
        pairwise_intersecting: check_pairwise_intersection(cfg, g)?,
        convex_position,
        class,
        class_allowed: matches!(class.kind, GraphKind::Caterpillar | GraphKind::OddCycleWithPendants),
    })
}
