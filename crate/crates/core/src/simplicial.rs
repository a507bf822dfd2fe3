//! Abstract 2-complexes and the structural checks that certify a complex is
//! a triangulated disk bounded by the labeled cycle `0, 1, ..., n-1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::Phase;

/// Dense vertex index. Boundary vertices occupy `0..n` in cyclic order.
pub type VertexId = u32;

/// An oriented triangle stored with its smallest vertex first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[VertexId; 3]", into = "[VertexId; 3]")]
pub struct Triangle([VertexId; 3]);

impl Triangle {
    /// Rotates `(a, b, c)` so the smallest id leads; orientation is kept.
    pub fn new(a: VertexId, b: VertexId, c: VertexId) -> Self {
        let v = [a, b, c];
        let lead = (0..3).min_by_key(|&i| v[i]).unwrap_or(0);
        Triangle([v[lead], v[(lead + 1) % 3], v[(lead + 2) % 3]])
    }

    pub fn vertices(&self) -> [VertexId; 3] {
        self.0
    }

    pub fn is_degenerate(&self) -> bool {
        let [a, b, c] = self.0;
        a == b || b == c || a == c
    }

    /// Unoriented vertex set, sorted.
    pub fn key(&self) -> [VertexId; 3] {
        let mut k = self.0;
        k.sort_unstable();
        k
    }

    /// The three undirected edges, each as `(min, max)`.
    pub fn edges(&self) -> [Edge; 3] {
        let [a, b, c] = self.0;
        [Edge::new(a, b), Edge::new(b, c), Edge::new(c, a)]
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.contains(&v)
    }
}

impl From<[VertexId; 3]> for Triangle {
    fn from(v: [VertexId; 3]) -> Self {
        Triangle::new(v[0], v[1], v[2])
    }
}

impl From<Triangle> for [VertexId; 3] {
    fn from(t: Triangle) -> Self {
        t.0
    }
}

/// Undirected edge with `lo <= hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub lo: VertexId,
    pub hi: VertexId,
}

impl Edge {
    pub fn new(a: VertexId, b: VertexId) -> Self {
        if a <= b {
            Edge { lo: a, hi: b }
        } else {
            Edge { lo: b, hi: a }
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.lo, self.hi)
    }
}

/// Per-vertex metadata: which cycle the vertex lies on and its coordinate.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexMeta {
    pub layer: Option<u32>,
    pub index_in_layer: Option<u32>,
    pub theta: Option<Phase>,
}

/// An immutable abstract triangulation with a labeled boundary of length `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    n: u32,
    vertices: Vec<VertexMeta>,
    triangles: Vec<Triangle>,
}

impl Triangulation {
    pub fn new(n: u32, vertices: Vec<VertexMeta>, triangles: Vec<Triangle>) -> Self {
        Triangulation { n, vertices, triangles }
    }

    /// A complex with no layer metadata: boundary `0..n`, then interior ids.
    pub fn from_triangles(n: u32, vertex_count: u32, triangles: Vec<Triangle>) -> Self {
        let vertices = (0..vertex_count)
            .map(|v| {
                if v < n {
                    VertexMeta { layer: Some(0), index_in_layer: Some(v), theta: None }
                } else {
                    VertexMeta::default()
                }
            })
            .collect();
        Triangulation { n, vertices, triangles }
    }

    /// The wheel: boundary `C_n` coned off to one apex (id `n`).
    pub fn cone(n: u32) -> Self {
        let apex = n;
        let triangles = (0..n).map(|i| Triangle::new(apex, i, (i + 1) % n)).collect();
        let mut vertices: Vec<VertexMeta> = (0..n)
            .map(|i| VertexMeta {
                layer: Some(0),
                index_in_layer: Some(i),
                theta: Some(Phase::new(crate::exact::int(i as i64), n)),
            })
            .collect();
        vertices.push(VertexMeta { layer: Some(1), index_in_layer: None, theta: None });
        Triangulation { n, vertices, triangles }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[VertexMeta] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn is_boundary(&self, v: VertexId) -> bool {
        v < self.n
    }

    /// Every distinct edge with the number of triangles containing it,
    /// sorted by edge.
    pub fn edge_incidences(&self) -> Vec<(Edge, u32)> {
        let mut all: Vec<Edge> = Vec::with_capacity(self.triangles.len() * 3);
        for t in &self.triangles {
            for e in t.edges() {
                if e.lo != e.hi {
                    all.push(e);
                }
            }
        }
        all.sort_unstable();
        let mut out: Vec<(Edge, u32)> = Vec::new();
        for e in all {
            match out.last_mut() {
                Some((last, count)) if *last == e => *count += 1,
                _ => out.push((e, 1)),
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edge_incidences().len()
    }
}

/// One failed disk invariant, with a concrete witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "defect", rename_all = "snake_case")]
pub enum Defect {
    EmptyComplex,
    BoundaryTooShort { n: u32 },
    UnknownVertex { triangle: [VertexId; 3] },
    DegenerateTriangle { triangle: [VertexId; 3] },
    RepeatedTriangle { triangle: [VertexId; 3] },
    OverusedEdge { edge: Edge, incidence: u32 },
    StrayBoundaryEdge { edge: Edge },
    MissingBoundaryEdge { edge: Edge, incidence: u32 },
    EulerCharacteristic { vertices: usize, edges: usize, faces: usize },
    IsolatedVertex { vertex: VertexId },
    BadLink { vertex: VertexId, expected: LinkShape },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkShape {
    Path,
    Cycle,
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::EmptyComplex => write!(f, "no triangles"),
            Defect::BoundaryTooShort { n } => write!(f, "boundary length {n} < 3"),
            Defect::UnknownVertex { triangle } => {
                write!(f, "triangle {triangle:?} names a vertex outside the vertex table")
            }
            Defect::DegenerateTriangle { triangle } => write!(f, "degenerate triangle {triangle:?}"),
            Defect::RepeatedTriangle { triangle } => write!(f, "repeated triangle {triangle:?}"),
            Defect::OverusedEdge { edge, incidence } => {
                write!(f, "edge {edge} lies in {incidence} triangles")
            }
            Defect::StrayBoundaryEdge { edge } => {
                write!(f, "edge {edge} has incidence 1 but is not on the boundary cycle")
            }
            Defect::MissingBoundaryEdge { edge, incidence } => {
                write!(f, "boundary edge {edge} has incidence {incidence}, expected 1")
            }
            Defect::EulerCharacteristic { vertices, edges, faces } => write!(
                f,
                "V - E + F = {} - {} + {} = {}, expected 1",
                vertices,
                edges,
                faces,
                *vertices as i64 - *edges as i64 + *faces as i64
            ),
            Defect::IsolatedVertex { vertex } => write!(f, "vertex {vertex} lies in no triangle"),
            Defect::BadLink { vertex, expected } => {
                write!(f, "link of vertex {vertex} is not a {expected:?}")
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub vertices: usize,
    pub edges: usize,
    pub boundary_edges: usize,
    pub interior_edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    pub defects: Vec<Defect>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.defects.is_empty()
    }
}

/// Checks every disk invariant and reports all failures at once.
pub fn validate_disk(t: &Triangulation) -> ValidationReport {
    let mut defects = Vec::new();
    let v_count = t.vertex_count();
    let n = t.n;

    if t.triangles.is_empty() {
        defects.push(Defect::EmptyComplex);
    }
    if n < 3 {
        defects.push(Defect::BoundaryTooShort { n });
    }

    let mut keys: Vec<([VertexId; 3], Triangle)> = Vec::with_capacity(t.triangles.len());
    for tri in &t.triangles {
        let verts = tri.vertices();
        if verts.iter().any(|&v| v as usize >= v_count) {
            defects.push(Defect::UnknownVertex { triangle: verts });
        }
        if tri.is_degenerate() {
            defects.push(Defect::DegenerateTriangle { triangle: verts });
        }
        keys.push((tri.key(), *tri));
    }
    keys.sort_unstable();
    for pair in keys.windows(2) {
        if pair[0].0 == pair[1].0 {
            defects.push(Defect::RepeatedTriangle { triangle: pair[1].1.vertices() });
        }
    }

    let incidences = t.edge_incidences();
    let mut boundary_edges = 0;
    let mut interior_edges = 0;
    let is_cycle_edge = |e: &Edge| {
        e.hi < n && (e.hi == e.lo + 1 || (e.lo == 0 && e.hi == n - 1 && n >= 3))
    };
    for (edge, count) in &incidences {
        match count {
            1 => {
                boundary_edges += 1;
                if !is_cycle_edge(edge) {
                    defects.push(Defect::StrayBoundaryEdge { edge: *edge });
                }
            }
            2 => interior_edges += 1,
            _ => defects.push(Defect::OverusedEdge { edge: *edge, incidence: *count }),
        }
    }
    if n >= 3 {
        for i in 0..n {
            let edge = Edge::new(i, (i + 1) % n);
            let count = incidences
                .binary_search_by(|(e, _)| e.cmp(&edge))
                .map(|idx| incidences[idx].1)
                .unwrap_or(0);
            if count != 1 {
                defects.push(Defect::MissingBoundaryEdge { edge, incidence: count });
            }
        }
    }

    let euler = v_count as i64 - incidences.len() as i64 + t.triangles.len() as i64;
    if euler != 1 {
        defects.push(Defect::EulerCharacteristic {
            vertices: v_count,
            edges: incidences.len(),
            faces: t.triangles.len(),
        });
    }

    check_links(t, &mut defects);

    ValidationReport {
        vertices: v_count,
        edges: incidences.len(),
        boundary_edges,
        interior_edges,
        faces: t.triangles.len(),
        euler_characteristic: euler,
        defects,
    }
}

fn check_links(t: &Triangulation, defects: &mut Vec<Defect>) {
    let v_count = t.vertex_count();
    // CSR of vertex -> opposite link edges.
    let mut degree = vec![0u32; v_count + 1];
    for tri in &t.triangles {
        for v in tri.vertices() {
            if (v as usize) < v_count {
                degree[v as usize + 1] += 1;
            }
        }
    }
    for i in 0..v_count {
        degree[i + 1] += degree[i];
    }
    let offsets = degree;
    let mut fill = offsets.clone();
    let mut link: Vec<(VertexId, VertexId)> = vec![(0, 0); offsets[v_count] as usize];
    for tri in &t.triangles {
        let [a, b, c] = tri.vertices();
        for (v, x, y) in [(a, b, c), (b, c, a), (c, a, b)] {
            if (v as usize) < v_count {
                link[fill[v as usize] as usize] = (x, y);
                fill[v as usize] += 1;
            }
        }
    }

    let mut local: Vec<(VertexId, u32)> = Vec::new();
    for v in 0..v_count {
        let edges = &link[offsets[v] as usize..offsets[v + 1] as usize];
        let vertex = v as VertexId;
        if edges.is_empty() {
            defects.push(Defect::IsolatedVertex { vertex });
            continue;
        }
        let expected = if t.is_boundary(vertex) { LinkShape::Path } else { LinkShape::Cycle };
        if !link_has_shape(edges, expected, &mut local) {
            defects.push(Defect::BadLink { vertex, expected });
        }
    }
}

/// Whether the edge set forms a single simple path or a single cycle.
fn link_has_shape(
    edges: &[(VertexId, VertexId)],
    shape: LinkShape,
    degrees: &mut Vec<(VertexId, u32)>,
) -> bool {
    degrees.clear();
    for &(x, y) in edges {
        if x == y {
            return false;
        }
        degrees.push((x, 0));
        degrees.push((y, 0));
    }
    degrees.sort_unstable();
    degrees.dedup();
    let node_count = degrees.len();
    for &(x, y) in edges {
        for end in [x, y] {
            let i = degrees.binary_search_by_key(&end, |d| d.0).unwrap();
            degrees[i].1 += 1;
        }
    }
    let ends = degrees.iter().filter(|d| d.1 == 1).count();
    if degrees.iter().any(|d| d.1 > 2) {
        return false;
    }
    let edge_count = edges.len();
    let shape_ok = match shape {
        LinkShape::Path => ends == 2 && edge_count + 1 == node_count,
        LinkShape::Cycle => ends == 0 && edge_count == node_count,
    };
    if !shape_ok {
        return false;
    }
    // Connectivity by walking from one node.
    let start = match shape {
        LinkShape::Path => degrees.iter().find(|d| d.1 == 1).map(|d| d.0),
        LinkShape::Cycle => degrees.first().map(|d| d.0),
    };
    let Some(start) = start else { return false };
    let mut used = vec![false; edge_count];
    let mut current = start;
    let mut walked = 0;
    loop {
        let next = edges.iter().enumerate().find(|(i, e)| !used[*i] && (e.0 == current || e.1 == current));
        match next {
            Some((i, e)) => {
                used[i] = true;
                walked += 1;
                current = if e.0 == current { e.1 } else { e.0 };
            }
            None => break,
        }
    }
    walked == edge_count
}

/// The boundary vertices in cyclic order, starting at the smallest id and
/// heading towards its smaller neighbour.
pub fn boundary_cycle(t: &Triangulation) -> Result<Vec<VertexId>> {
    let boundary: Vec<Edge> = t
        .edge_incidences()
        .into_iter()
        .filter(|(_, c)| *c == 1)
        .map(|(e, _)| e)
        .collect();
    if boundary.is_empty() {
        return Err(Error::Boundary("no incidence-1 edges".into()));
    }
    let mut neighbours: std::collections::BTreeMap<VertexId, Vec<VertexId>> = Default::default();
    for e in &boundary {
        neighbours.entry(e.lo).or_default().push(e.hi);
        neighbours.entry(e.hi).or_default().push(e.lo);
    }
    if let Some((v, nb)) = neighbours.iter().find(|(_, nb)| nb.len() != 2) {
        return Err(Error::Boundary(format!("vertex {v} has {} boundary edges", nb.len())));
    }
    let (&start, nb) = neighbours.iter().next().unwrap();
    let mut order = vec![start];
    let mut prev = start;
    let mut current = *nb.iter().min().unwrap();
    while current != start {
        order.push(current);
        let nb = &neighbours[&current];
        let next = if nb[0] == prev { nb[1] } else { nb[0] };
        prev = current;
        current = next;
        if order.len() > neighbours.len() {
            break;
        }
    }
    if order.len() != neighbours.len() {
        return Err(Error::Boundary(format!(
            "cycle through {start} covers {} of {} boundary vertices",
            order.len(),
            neighbours.len()
        )));
    }
    if order.len() != t.n as usize {
        return Err(Error::Boundary(format!(
            "boundary cycle has length {}, expected {}",
            order.len(),
            t.n
        )));
    }
    Ok(order)
}

/// Compressed adjacency of the 1-skeleton.
#[derive(Clone, Debug)]
pub struct SkeletonGraph {
    offsets: Vec<u32>,
    targets: Vec<VertexId>,
}

impl SkeletonGraph {
    pub fn new(t: &Triangulation) -> Self {
        let v_count = t.vertex_count();
        let edges: Vec<Edge> = t.edge_incidences().into_iter().map(|(e, _)| e).collect();
        let mut offsets = vec![0u32; v_count + 1];
        for e in &edges {
            offsets[e.lo as usize + 1] += 1;
            offsets[e.hi as usize + 1] += 1;
        }
        for i in 0..v_count {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0; offsets[v_count] as usize];
        for e in &edges {
            targets[fill[e.lo as usize] as usize] = e.hi;
            fill[e.lo as usize] += 1;
            targets[fill[e.hi as usize] as usize] = e.lo;
            fill[e.hi as usize] += 1;
        }
        for v in 0..v_count {
            targets[offsets[v] as usize..offsets[v + 1] as usize].sort_unstable();
        }
        SkeletonGraph { offsets, targets }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbours(&self, v: VertexId) -> &[VertexId] {
        &self.targets[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }
}
