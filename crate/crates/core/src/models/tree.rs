use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::moduli::UcModulus;
use crate::sampling::{index, unit, SimRng};
use crate::search::{Chart, SearchRegion};
use crate::space::{GeodesicSpace, TOL_EXACT};

use super::{ModelKind, ModelSpace};

/// A point of a metric tree: `offset` is measured from the parent end of
/// `edge`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreePoint {
    pub edge: usize,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Edge {
    parent: usize,
    child: usize,
    len: f64,
}

/// A finite metric tree with positive edge lengths.
///
/// Edges are oriented away from the first vertex named in the input. A
/// vertex is represented at offset 0 of its first child edge, or at the far
/// end of its parent edge when it is a leaf.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTree {
    names: Vec<String>,
    edges: Vec<Edge>,
    parent_edge: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    vdist: Vec<Vec<f64>>,
    r_sample: f64,
}

/// Parses `vertex vertex length` lines; blank lines and `#` comments are
/// skipped.
pub fn parse_edge_list(text: &str) -> Result<Vec<(String, String, f64)>> {
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [u, v, len] = fields[..] else {
            return Err(Error::Parse(format!("line {}: expected `vertex vertex length`", lineno + 1)));
        };
        let len: f64 =
            len.parse().map_err(|_| Error::Parse(format!("line {}: bad edge length {len:?}", lineno + 1)))?;
        edges.push((u.to_string(), v.to_string(), len));
    }
    Ok(edges)
}

impl MetricTree {
    pub fn from_edges(edges: &[(String, String, f64)], r_sample: f64) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::InvalidModel("tree needs at least one edge".into()));
        }
        let mut ids: HashMap<String, usize> = HashMap::new();
        let mut names = Vec::new();
        let mut adj: Vec<Vec<(usize, f64)>> = Vec::new();
        for (u, v, len) in edges {
            if !(*len > 0.0) || !len.is_finite() {
                return Err(Error::InvalidModel(format!("edge {u}-{v} has non-positive length {len}")));
            }
            if u == v {
                return Err(Error::InvalidModel(format!("self-loop at vertex {u}: tree contains a cycle")));
            }
            let mut id = |name: &str| match ids.get(name) {
                Some(&i) => i,
                None => {
                    ids.insert(name.to_string(), names.len());
                    names.push(name.to_string());
                    adj.push(Vec::new());
                    names.len() - 1
                }
            };
            let a = id(u);
            let b = id(v);
            adj[a].push((b, *len));
            adj[b].push((a, *len));
        }
        let n = names.len();

        let mut seen = vec![false; n];
        let mut oriented = Vec::new();
        let mut parent_edge = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![0; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &(v, len) in &adj[u] {
                if seen[v] {
                    continue;
                }
                seen[v] = true;
                parent_edge[v] = Some(oriented.len());
                children[u].push(oriented.len());
                depth[v] = depth[u] + 1;
                oriented.push(Edge { parent: u, child: v, len });
                queue.push_back(v);
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidModel(format!("tree is disconnected: vertex {} unreachable", names[v])));
        }
        if edges.len() != n - 1 {
            return Err(Error::InvalidModel(format!(
                "edge list contains a cycle: {} edges on {n} vertices",
                edges.len()
            )));
        }

        let mut vdist = vec![vec![0.0; n]; n];
        for s in 0..n {
            let mut stack = vec![(s, usize::MAX)];
            while let Some((u, from)) = stack.pop() {
                for &(v, len) in &adj[u] {
                    if v != from {
                        vdist[s][v] = vdist[s][u] + len;
                        stack.push((v, u));
                    }
                }
            }
        }
        Ok(Self { names, edges: oriented, parent_edge, children, depth, vdist, r_sample })
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_length(&self, edge: usize) -> f64 {
        self.edges[edge].len
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex_id(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Usage(format!("unknown tree vertex {name:?}")))
    }

    /// Parent and child vertex of `edge`.
    pub fn endpoints(&self, edge: usize) -> (usize, usize) {
        (self.edges[edge].parent, self.edges[edge].child)
    }

    pub fn vertex_distance(&self, u: usize, v: usize) -> f64 {
        self.vdist[u][v]
    }

    /// Canonical representation of vertex `v`.
    pub fn vertex_point(&self, v: usize) -> TreePoint {
        match (self.children[v].first(), self.parent_edge[v]) {
            (Some(&e), _) => TreePoint { edge: e, offset: 0.0 },
            (None, Some(e)) => TreePoint { edge: e, offset: self.edges[e].len },
            (None, None) => unreachable!("a tree with an edge has no isolated vertex"),
        }
    }

    /// The vertex `p` sits on, if any.
    pub fn as_vertex(&self, p: &TreePoint) -> Option<usize> {
        let e = &self.edges[p.edge];
        if p.offset <= 0.0 {
            Some(e.parent)
        } else if p.offset >= e.len {
            Some(e.child)
        } else {
            None
        }
    }

    /// Point at distance `t` from `u` along the edge joining vertices `u` and `v`.
    pub fn point_between(&self, u: &str, v: &str, t: f64) -> Result<TreePoint> {
        let (a, b) = (self.vertex_id(u)?, self.vertex_id(v)?);
        let e = self
            .edges
            .iter()
            .position(|e| (e.parent == a && e.child == b) || (e.parent == b && e.child == a))
            .ok_or_else(|| Error::Usage(format!("no edge between {u} and {v}")))?;
        let len = self.edges[e].len;
        if !(0.0..=len).contains(&t) {
            return usage(format!("offset {t} outside edge {u}-{v} of length {len}"));
        }
        let offset = if self.edges[e].parent == a { t } else { len - t };
        Ok(self.canonical(e, offset))
    }

    fn canonical(&self, edge: usize, offset: f64) -> TreePoint {
        let e = &self.edges[edge];
        if offset <= 0.0 {
            self.vertex_point(e.parent)
        } else if offset >= e.len {
            self.vertex_point(e.child)
        } else {
            TreePoint { edge, offset }
        }
    }

    /// Vertices on the path from `u` to `v`, both included.
    fn vertex_path(&self, mut u: usize, mut v: usize) -> Vec<usize> {
        let mut head = vec![u];
        let mut tail = vec![v];
        while u != v {
            if self.depth[u] >= self.depth[v] {
                u = self.edges[self.parent_edge[u].expect("non-root")].parent;
                head.push(u);
            } else {
                v = self.edges[self.parent_edge[v].expect("non-root")].parent;
                tail.push(v);
            }
        }
        tail.pop();
        head.extend(tail.into_iter().rev());
        head
    }

    /// Edge joining adjacent vertices `u` and `v`, with `u`'s offset on it.
    fn edge_from(&self, u: usize, v: usize) -> (usize, f64) {
        match self.parent_edge[v] {
            Some(e) if self.edges[e].parent == u => (e, 0.0),
            _ => {
                let e = self.parent_edge[u].expect("adjacent vertices");
                (e, self.edges[e].len)
            }
        }
    }

    /// Endpoint of `p`'s edge through which the geodesic to `q` leaves, with
    /// the matching endpoint of `q`'s edge.
    fn exits(&self, p: &TreePoint, q: &TreePoint) -> ((usize, f64), (usize, f64)) {
        let ends = |t: &TreePoint| {
            let e = &self.edges[t.edge];
            [(e.parent, t.offset), (e.child, e.len - t.offset)]
        };
        let mut best = (f64::INFINITY, ((0, 0.0), (0, 0.0)));
        for a in ends(p) {
            for b in ends(q) {
                let total = a.1 + self.vdist[a.0][b.0] + b.1;
                if total < best.0 {
                    best = (total, (a, b));
                }
            }
        }
        best.1
    }

    pub fn sampling_root(&self) -> TreePoint {
        self.vertex_point(0)
    }
}

impl GeodesicSpace for MetricTree {
    type Point = TreePoint;

    fn name(&self) -> String {
        format!("tree(V={}, E={})", self.vertex_count(), self.edge_count())
    }

    fn dist(&self, p: &TreePoint, q: &TreePoint) -> f64 {
        if p.edge == q.edge {
            return (p.offset - q.offset).abs();
        }
        let ((a, da), (b, db)) = self.exits(p, q);
        da + self.vdist[a][b] + db
    }

    fn geodesic(&self, p: &TreePoint, q: &TreePoint, lam: f64) -> TreePoint {
        if lam == 0.0 {
            return *p;
        }
        if lam == 1.0 {
            return *q;
        }
        if p.edge == q.edge {
            return self.canonical(p.edge, p.offset + lam * (q.offset - p.offset));
        }
        let mut rest = lam * self.dist(p, q);
        let ((a, _), (b, _)) = self.exits(p, q);

        // segments (edge, from offset, to offset) along the arc
        let end_a = if self.edges[p.edge].parent == a { 0.0 } else { self.edges[p.edge].len };
        let mut segments = vec![(p.edge, p.offset, end_a)];
        let path = self.vertex_path(a, b);
        for w in path.windows(2) {
            let (e, start) = self.edge_from(w[0], w[1]);
            segments.push((e, start, self.edges[e].len - start));
        }
        let start_b = if self.edges[q.edge].parent == b { 0.0 } else { self.edges[q.edge].len };
        segments.push((q.edge, start_b, q.offset));

        for &(e, from, to) in &segments {
            let len = (to - from).abs();
            if rest <= len {
                return self.canonical(e, from + rest * (to - from).signum());
            }
            rest -= len;
        }
        *q
    }

    fn validate(&self, p: &TreePoint) -> Result<()> {
        let Some(e) = self.edges.get(p.edge) else {
            return usage(format!("edge {} does not exist", p.edge));
        };
        if !(0.0..=e.len).contains(&p.offset) {
            return usage(format!("offset {} outside [0, {}] on edge {}", p.offset, e.len, p.edge));
        }
        Ok(())
    }

    /// Length-weighted uniform point, pulled toward the first vertex until it
    /// lies within the sampling radius.
    fn sample(&self, rng: &mut SimRng) -> TreePoint {
        let total: f64 = self.edges.iter().map(|e| e.len).sum();
        let mut t = total * unit(rng);
        let mut p = self.vertex_point(0);
        for (i, e) in self.edges.iter().enumerate() {
            if t <= e.len || i + 1 == self.edges.len() {
                p = self.canonical(i, t.min(e.len));
                break;
            }
            t -= e.len;
        }
        let root = self.sampling_root();
        let d = self.dist(&root, &p);
        if d > self.r_sample {
            self.geodesic(&root, &p, self.r_sample / d)
        } else {
            p
        }
    }

    /// Non-backtracking random walk of random length at most `radius`.
    fn sample_within(&self, center: &TreePoint, radius: f64, rng: &mut SimRng) -> TreePoint {
        let mut rest = radius * unit(rng);
        let (mut edge, mut offset) = (center.edge, center.offset);
        let mut at_vertex = self.as_vertex(center).map(|v| (v, usize::MAX));
        // interior direction: +1 toward the child, -1 toward the parent
        let mut dir = if unit(rng) < 0.5 { 1.0 } else { -1.0 };
        loop {
            if let Some((v, came)) = at_vertex {
                let mut options: Vec<usize> = self.children[v].clone();
                if let Some(pe) = self.parent_edge[v] {
                    options.push(pe);
                }
                options.retain(|&o| o != came);
                if options.is_empty() || rest <= 0.0 {
                    return self.vertex_point(v);
                }
                edge = options[index(rng, options.len())];
                if self.edges[edge].parent == v {
                    offset = 0.0;
                    dir = 1.0;
                } else {
                    offset = self.edges[edge].len;
                    dir = -1.0;
                }
            }
            let len = self.edges[edge].len;
            let room = if dir > 0.0 { len - offset } else { offset };
            if rest <= room {
                return self.canonical(edge, offset + dir * rest);
            }
            rest -= room;
            let v = if dir > 0.0 { self.edges[edge].child } else { self.edges[edge].parent };
            at_vertex = Some((v, edge));
        }
    }

    fn tolerance(&self) -> f64 {
        TOL_EXACT
    }
}

impl ModelSpace for MetricTree {
    fn kind(&self) -> ModelKind {
        ModelKind::Tree
    }

    fn modulus(&self) -> UcModulus {
        UcModulus::Cat0
    }

    fn is_cat0(&self) -> bool {
        true
    }

    fn sampling_radius(&self) -> f64 {
        self.r_sample
    }

    /// One chart per edge meeting the ball.
    fn ball_region(&self, center: &TreePoint, radius: f64) -> SearchRegion<TreePoint> {
        let mut charts = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let near = i == center.edge
                || self.dist(center, &self.vertex_point(e.parent)) <= radius
                || self.dist(center, &self.vertex_point(e.child)) <= radius;
            if !near {
                continue;
            }
            let tree = self.clone();
            let chart = Chart::new(vec![0.0], vec![e.len], move |c: &[f64]| Some(tree.canonical(i, c[0])))
                .expect("finite edge");
            charts.push(chart);
        }
        SearchRegion { charts }
    }
}

/// The subtree spanned by a connected set of vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Subtree {
    tree: MetricTree,
    members: Vec<bool>,
}

impl MetricTree {
    /// Subtree spanned by the named vertices, which must induce a connected
    /// subgraph.
    pub fn subtree(&self, vertices: &[&str]) -> Result<Subtree> {
        if vertices.is_empty() {
            return usage("subtree needs at least one vertex");
        }
        let mut members = vec![false; self.vertex_count()];
        for name in vertices {
            members[self.vertex_id(name)?] = true;
        }
        let inner = self.edges.iter().filter(|e| members[e.parent] && members[e.child]).count();
        if inner + 1 != vertices.len() {
            return usage("subtree vertices do not induce a connected subtree");
        }
        Ok(Subtree { tree: self.clone(), members })
    }
}

impl Subtree {
    pub fn contains(&self, p: &TreePoint) -> bool {
        let e = &self.tree.edges[p.edge];
        match self.tree.as_vertex(p) {
            Some(v) => self.members[v],
            None => self.members[e.parent] && self.members[e.child],
        }
    }

    /// Nearest point of the subtree; outside it this is the nearest member
    /// vertex.
    pub fn project(&self, p: &TreePoint) -> TreePoint {
        if self.contains(p) {
            return *p;
        }
        let best = (0..self.members.len())
            .filter(|&v| self.members[v])
            .map(|v| (self.tree.dist(p, &self.tree.vertex_point(v)), v))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("nonempty subtree");
        self.tree.vertex_point(best.1)
    }

    pub fn member_vertices(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&v| self.members[v]).collect()
    }

    /// Charts over the edges of the subtree (a single point chart when it has
    /// no edges).
    pub fn region(&self) -> SearchRegion<TreePoint> {
        let mut charts = Vec::new();
        for (i, e) in self.tree.edges.iter().enumerate() {
            if self.members[e.parent] && self.members[e.child] {
                let tree = self.tree.clone();
                charts.push(
                    Chart::new(vec![0.0], vec![e.len], move |c: &[f64]| Some(tree.canonical(i, c[0])))
                        .expect("finite edge"),
                );
            }
        }
        if charts.is_empty() {
            let p = self.tree.vertex_point(self.member_vertices()[0]);
            charts.push(Chart::new(vec![0.0], vec![0.0], move |_: &[f64]| Some(p)).expect("point chart"));
        }
        SearchRegion { charts }
    }
}
