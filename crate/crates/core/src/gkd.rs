//! Generalized knot diagrams: single and double vertices joined by single
//! and double edges, where a double edge is a run of alternating twists
//! between two parallel strands.
//!
//! Each vertex lists its incident edges counterclockwise. A double edge
//! occupies two consecutive strand ports at each end; the first port in
//! counterclockwise order is the right-hand one when looking along the
//! edge. A crossing vertex keeps its four single edges in slot order
//! (slots 1 and 3 are the over-strand). Every other vertex is "smooth":
//! its ports are paired by adjacency, starting after the first port of a
//! double edge, so strands never cross inside it.

use std::collections::{HashMap, HashSet};

use smallvec::SmallVec;
use std::fmt;

use crate::diagram::{DiagramBuilder, DiagramError, EndpointLabel, Junction, PlaneDiagram};

pub type VertexId = usize;
pub type EdgeId = usize;
/// Counterclockwise edge list of a vertex; at most four entries.
pub type EdgeList = SmallVec<[EdgeId; 4]>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    /// A single vertex of diagram degree four.
    Crossing,
    /// Subdivision vertex or double vertex.
    Smooth,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub kind: VertexKind,
    /// Incident edges, counterclockwise.
    pub edges: EdgeList,
}

/// Which port of a double-edge end carries the `u` label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EndLabels {
    pub up_on_second: bool,
}

impl EndLabels {
    pub fn label(self, port: usize) -> EndpointLabel {
        if (port == 1) == self.up_on_second {
            EndpointLabel::Up
        } else {
            EndpointLabel::Down
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Single,
    Double { twists: u32, labels: [EndLabels; 2] },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub ends: [VertexId; 2],
    pub kind: EdgeKind,
}

impl Edge {
    pub fn is_double(&self) -> bool {
        matches!(self.kind, EdgeKind::Double { .. })
    }

    pub fn end_index(&self, v: VertexId) -> usize {
        if self.ends[0] == v {
            0
        } else {
            debug_assert_eq!(self.ends[1], v);
            1
        }
    }

    pub fn other(&self, v: VertexId) -> VertexId {
        self.ends[1 - self.end_index(v)]
    }

    pub fn twists(&self) -> u32 {
        match self.kind {
            EdgeKind::Double { twists, .. } => twists,
            EdgeKind::Single => 0,
        }
    }

    /// Signed twist exponent: positive when the strand moving from the
    /// left to the right position is the over-strand.
    pub fn signed_twists(&self) -> i64 {
        match self.kind {
            EdgeKind::Double { twists, labels } => {
                if labels[0].up_on_second {
                    twists as i64
                } else {
                    -(twists as i64)
                }
            }
            EdgeKind::Single => 0,
        }
    }
}

/// Builds a double edge from a signed twist exponent.
pub fn double_kind(signed: i64) -> EdgeKind {
    let labels = EndLabels {
        up_on_second: signed >= 0,
    };
    EdgeKind::Double {
        twists: signed.unsigned_abs() as u32,
        labels: [labels; 2],
    }
}

/// The five vertex types a generalized knot diagram allows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexType {
    /// Single vertex with four single edges.
    Crossing,
    /// Single vertex with two single edges.
    Subdivision,
    /// Double vertex with one double edge.
    Cap,
    /// Double vertex with two double edges.
    DoubleTwo,
    /// Double vertex with one double edge and two single edges.
    DoubleThree,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedDiagram {
    vertices: Vec<Option<Vertex>>,
    edges: Vec<Option<Edge>>,
    live_vertices: usize,
    /// Unknotted, unlinked circles split off by the reduction so far.
    pub split_circles: usize,
    /// Crossing-free circles of the input, counted separately.
    pub free_circles: usize,
    crossing_total: usize,
    components: usize,
}

impl GeneralizedDiagram {
    fn empty() -> Self {
        GeneralizedDiagram {
            vertices: Vec::new(),
            edges: Vec::new(),
            live_vertices: 0,
            split_circles: 0,
            free_circles: 0,
            crossing_total: 0,
            components: 0,
        }
    }

    /// Converts a plane diagram: crossings become crossing vertices, every
    /// self-loop arc is subdivided twice and every arc of a parallel class
    /// but the first is subdivided once, so the underlying graph is simple.
    pub fn from_plane_diagram(d: &PlaneDiagram) -> Self {
        let mut g = Self::empty();
        let n = d.crossing_count();
        g.vertices.reserve(n + d.arc_count());
        g.edges.reserve(3 * d.arc_count());
        for _ in 0..n {
            g.add_vertex(VertexKind::Crossing, EdgeList::new());
        }
        let mut slot_edge = vec![[usize::MAX; 4]; n];
        // crossing at the far end of the unsubdivided arc in each slot
        let mut direct = vec![[usize::MAX; 4]; n];
        for a in 0..d.arc_count() {
            let [p, q] = d.arc_ends(a);
            let subdivisions = if p.crossing == q.crossing {
                2
            } else if direct[p.crossing].contains(&q.crossing) {
                1
            } else {
                direct[p.crossing][p.slot as usize] = q.crossing;
                direct[q.crossing][q.slot as usize] = p.crossing;
                0
            };
            let mut prev = p.crossing;
            let mut first_edge = usize::MAX;
            let mut prev_sub: Option<VertexId> = None;
            for _ in 0..subdivisions {
                let s = g.add_vertex(VertexKind::Smooth, EdgeList::new());
                let e = g.add_edge_raw([prev, s], EdgeKind::Single);
                if first_edge == usize::MAX {
                    first_edge = e;
                }
                if let Some(ps) = prev_sub {
                    g.vertex_mut(ps).edges.push(e);
                }
                g.vertex_mut(s).edges.push(e);
                prev_sub = Some(s);
                prev = s;
            }
            let e = g.add_edge_raw([prev, q.crossing], EdgeKind::Single);
            if let Some(ps) = prev_sub {
                g.vertex_mut(ps).edges.push(e);
            }
            if first_edge == usize::MAX {
                first_edge = e;
            }
            slot_edge[p.crossing][p.slot as usize] = first_edge;
            slot_edge[q.crossing][q.slot as usize] = e;
        }
        for (c, slots) in slot_edge.into_iter().enumerate() {
            g.vertex_mut(c).edges = EdgeList::from_slice(&slots);
        }
        g.crossing_total = n;
        g.free_circles = d.free_circles();
        g.components = d.components();
        g
    }

    /// Assembles a diagram from explicit vertex and edge tables (ids are
    /// the table indices) and validates it. Used for hand-built fixtures.
    pub fn from_parts(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self, GkdError> {
        let mut g = Self::empty();
        g.live_vertices = vertices.len();
        g.crossing_total = vertices
            .iter()
            .filter(|v| v.kind == VertexKind::Crossing)
            .count()
            + edges.iter().map(|e| e.twists() as usize).sum::<usize>();
        g.vertices = vertices.into_iter().map(Some).collect();
        g.edges = edges.into_iter().map(Some).collect();
        let bad = g.validate();
        if !bad.is_empty() {
            return Err(GkdError::Invalid(bad));
        }
        g.components = g.expand()?.components();
        Ok(g)
    }

    pub(crate) fn add_vertex(&mut self, kind: VertexKind, edges: EdgeList) -> VertexId {
        self.vertices.push(Some(Vertex { kind, edges }));
        self.live_vertices += 1;
        self.vertices.len() - 1
    }

    /// Adds an edge record without touching the vertices' rotation lists.
    pub(crate) fn add_edge_raw(&mut self, ends: [VertexId; 2], kind: EdgeKind) -> EdgeId {
        self.edges.push(Some(Edge { ends, kind }));
        self.crossing_total += match kind {
            EdgeKind::Double { twists, .. } => twists as usize,
            EdgeKind::Single => 0,
        };
        self.edges.len() - 1
    }

    /// Removes an edge record; rotation lists must be fixed by the caller.
    pub(crate) fn remove_edge_raw(&mut self, e: EdgeId) -> Edge {
        let edge = self.edges[e].take().expect("edge already removed");
        self.crossing_total -= edge.twists() as usize;
        edge
    }

    pub(crate) fn remove_vertex(&mut self, v: VertexId) -> Vertex {
        let vert = self.vertices[v].take().expect("vertex already removed");
        self.live_vertices -= 1;
        if vert.kind == VertexKind::Crossing {
            self.crossing_total -= 1;
        }
        vert
    }

    pub(crate) fn set_kind(&mut self, v: VertexId, kind: VertexKind) {
        let vert = self.vertices[v].as_mut().expect("dead vertex");
        match (vert.kind, kind) {
            (VertexKind::Crossing, VertexKind::Smooth) => self.crossing_total -= 1,
            (VertexKind::Smooth, VertexKind::Crossing) => self.crossing_total += 1,
            _ => {}
        }
        vert.kind = kind;
    }

    /// Changes a double edge's twist data.
    pub(crate) fn set_edge_kind(&mut self, e: EdgeId, kind: EdgeKind) {
        let edge = self.edges[e].as_mut().expect("dead edge");
        self.crossing_total -= edge.twists() as usize;
        edge.kind = kind;
        self.crossing_total += edge.twists() as usize;
    }

    /// Repoints one end of `e` from `from` to `to`.
    pub(crate) fn retarget_edge(&mut self, e: EdgeId, from: VertexId, to: VertexId) {
        let edge = self.edges[e].as_mut().expect("dead edge");
        let i = edge.end_index(from);
        edge.ends[i] = to;
    }

    pub(crate) fn vertex_mut(&mut self, v: VertexId) -> &mut Vertex {
        self.vertices[v].as_mut().expect("dead vertex")
    }

    pub fn vertex(&self, v: VertexId) -> Option<&Vertex> {
        self.vertices.get(v).and_then(Option::as_ref)
    }

    pub fn edge(&self, e: EdgeId) -> Option<&Edge> {
        self.edges.get(e).and_then(Option::as_ref)
    }

    pub(crate) fn v(&self, v: VertexId) -> &Vertex {
        self.vertices[v].as_ref().expect("dead vertex")
    }

    pub(crate) fn e(&self, e: EdgeId) -> &Edge {
        self.edges[e].as_ref().expect("dead edge")
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.as_ref().map(|_| i))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.as_ref().map(|_| i))
    }

    /// Upper bound (exclusive) on vertex ids ever allocated.
    pub fn vertex_capacity(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.live_vertices
    }

    pub fn is_graph_empty(&self) -> bool {
        self.live_vertices == 0
    }

    /// Crossings of the expanded diagram: crossing vertices plus twists.
    pub fn crossing_total(&self) -> usize {
        self.crossing_total
    }

    /// Components of the diagram this one was built from.
    pub fn input_components(&self) -> usize {
        self.components
    }

    pub fn graph_degree(&self, v: VertexId) -> usize {
        self.v(v).edges.len()
    }

    pub fn diagram_degree(&self, v: VertexId) -> usize {
        self.v(v)
            .edges
            .iter()
            .map(|&e| if self.e(e).is_double() { 2 } else { 1 })
            .sum()
    }

    /// Neighbour of `v` along `e`.
    pub fn across(&self, v: VertexId, e: EdgeId) -> VertexId {
        self.e(e).other(v)
    }

    /// The edge joining `a` and `b`, if any. Linear in `deg(a)`.
    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.v(a)
            .edges
            .iter()
            .copied()
            .find(|&e| self.e(e).other(a) == b)
    }

    pub fn vertex_type(&self, v: VertexId) -> Option<VertexType> {
        let vert = self.v(v);
        let doubles = vert.edges.iter().filter(|&&e| self.e(e).is_double()).count();
        let singles = vert.edges.len() - doubles;
        match (vert.kind, doubles, singles) {
            (VertexKind::Crossing, 0, 4) => Some(VertexType::Crossing),
            (VertexKind::Smooth, 0, 2) => Some(VertexType::Subdivision),
            (VertexKind::Smooth, 1, 0) => Some(VertexType::Cap),
            (VertexKind::Smooth, 2, 0) => Some(VertexType::DoubleTwo),
            (VertexKind::Smooth, 1, 2) if self.e(vert.edges[0]).is_double() => {
                Some(VertexType::DoubleThree)
            }
            _ => None,
        }
    }

    /// Strand ports of `v` in counterclockwise order, as (edge, lane)
    /// pairs; lane 1 is the second port of a double edge.
    pub fn ports(&self, v: VertexId) -> Vec<(EdgeId, u8)> {
        let mut out = Vec::with_capacity(4);
        for &e in &self.v(v).edges {
            out.push((e, 0));
            if self.e(e).is_double() {
                out.push((e, 1));
            }
        }
        out
    }

    /// Expands into a plane diagram: crossing vertices become crossings,
    /// double edges become runs of twists, smooth vertices disappear, and
    /// split-off and free circles become crossing-free circles.
    pub fn expand(&self) -> Result<PlaneDiagram, GkdError> {
        for e in self.edge_ids() {
            if let EdgeKind::Double { twists, labels } = self.e(e).kind {
                if twists > 0 && labels[0] != labels[1] {
                    return Err(GkdError::LabelInconsistency(e));
                }
            }
        }
        let mut b = DiagramBuilder::new();
        // junctions of each edge end: [end][lane]
        let mut edge_ports: HashMap<EdgeId, [[Option<Junction>; 2]; 2]> =
            HashMap::with_capacity(self.edges.len());
        for v in self.vertex_ids() {
            let vert = self.v(v);
            let ports = self.ports(v);
            let junctions: Vec<Junction> = match vert.kind {
                VertexKind::Crossing => {
                    let c = b.crossing();
                    (0..4).map(|s| Junction::Slot(c, s)).collect()
                }
                VertexKind::Smooth => {
                    let js: Vec<Junction> = ports.iter().map(|_| b.point()).collect();
                    match js.len() {
                        2 => b.link(js[0], js[1]),
                        4 => {
                            b.link(js[1], js[2]);
                            b.link(js[3], js[0]);
                        }
                        k => return Err(GkdError::BadVertex(v, format!("{k} ports"))),
                    }
                    js
                }
            };
            for ((e, lane), j) in ports.into_iter().zip(junctions) {
                let end = self.e(e).end_index(v);
                edge_ports.entry(e).or_default()[end][lane as usize] = Some(j);
            }
        }
        for e in self.edge_ids() {
            let edge = self.e(e);
            let p = edge_ports[&e];
            match edge.kind {
                EdgeKind::Single => b.link(p[0][0].unwrap(), p[1][0].unwrap()),
                EdgeKind::Double { twists, .. } => b.twist_region(
                    [p[0][0].unwrap(), p[0][1].unwrap()],
                    [p[1][0].unwrap(), p[1][1].unwrap()],
                    twists as usize,
                    edge.signed_twists() >= 0,
                ),
            }
        }
        b.add_free_circles(self.split_circles + self.free_circles);
        Ok(b.try_build()?)
    }

    /// Checks every structural invariant; returns the violations found.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut pairs = HashSet::new();
        for e in self.edge_ids() {
            let edge = self.e(e);
            let [a, b] = edge.ends;
            if a == b {
                out.push(Violation::Loop(e));
                continue;
            }
            for x in [a, b] {
                match self.vertex(x) {
                    None => out.push(Violation::DanglingEdge(e)),
                    Some(vx) if !vx.edges.contains(&e) => out.push(Violation::DanglingEdge(e)),
                    _ => {}
                }
            }
            if !pairs.insert((a.min(b), a.max(b))) {
                out.push(Violation::ParallelEdges(a.min(b), a.max(b)));
            }
            if let EdgeKind::Double { twists, labels } = edge.kind {
                if twists > 0 && labels[0] != labels[1] {
                    out.push(Violation::LabelParity(e));
                }
            }
        }
        let mut crossings = 0usize;
        for v in self.vertex_ids() {
            let vert = self.v(v);
            if vert.edges.iter().any(|&e| self.edge(e).is_none()) {
                out.push(Violation::DanglingEdge(v));
                continue;
            }
            let unique: HashSet<_> = vert.edges.iter().collect();
            if unique.len() != vert.edges.len() {
                out.push(Violation::BadVertexType(v, "repeated edge".into()));
            }
            let dd = self.diagram_degree(v);
            if dd != 2 && dd != 4 {
                out.push(Violation::DiagramDegree(v, dd));
            } else if self.vertex_type(v).is_none() {
                out.push(Violation::BadVertexType(v, format!("{:?}", vert)));
            }
            if vert.kind == VertexKind::Crossing {
                crossings += 1;
            }
        }
        let twists: usize = self.edge_ids().map(|e| self.e(e).twists() as usize).sum();
        if crossings + twists != self.crossing_total {
            out.push(Violation::CrossingTally(crossings + twists, self.crossing_total));
        }
        out
    }

    /// One line per vertex and edge; for debugging and fixtures.
    pub fn dump(&self) -> String {
        self.to_string()
    }

    /// The underlying simple graph as adjacency lists over live vertices,
    /// renumbered densely.
    pub fn simple_graph(&self) -> Vec<Vec<usize>> {
        let mut index = vec![usize::MAX; self.vertices.len()];
        for (i, v) in self.vertex_ids().enumerate() {
            index[v] = i;
        }
        let mut adj = vec![Vec::new(); self.live_vertices];
        for e in self.edge_ids() {
            let [a, b] = self.e(e).ends;
            adj[index[a]].push(index[b]);
            adj[index[b]].push(index[a]);
        }
        adj
    }
}

impl fmt::Display for GeneralizedDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "# split_circles={} free_circles={} crossings={}",
            self.split_circles, self.free_circles, self.crossing_total
        )?;
        for v in self.vertex_ids() {
            let kind = match self.vertex_type(v) {
                Some(t) => format!("{t:?}"),
                None => "Invalid".into(),
            };
            let edges: Vec<String> = self.v(v).edges.iter().map(|e| e.to_string()).collect();
            writeln!(f, "V {v} {kind} [{}]", edges.join(" "))?;
        }
        for e in self.edge_ids() {
            let edge = self.e(e);
            match edge.kind {
                EdgeKind::Single => writeln!(f, "E {e} single {} {}", edge.ends[0], edge.ends[1])?,
                EdgeKind::Double { twists, labels } => {
                    let l = |x: EndLabels| if x.up_on_second { "du" } else { "ud" };
                    writeln!(
                        f,
                        "E {e} double {} {} twists={twists} labels={}/{}",
                        edge.ends[0],
                        edge.ends[1],
                        l(labels[0]),
                        l(labels[1])
                    )?
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Loop(EdgeId),
    ParallelEdges(VertexId, VertexId),
    DanglingEdge(usize),
    DiagramDegree(VertexId, usize),
    BadVertexType(VertexId, String),
    LabelParity(EdgeId),
    CrossingTally(usize, usize),
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum GkdError {
    #[error("double edge {0}: end labels contradict the twist parity")]
    LabelInconsistency(EdgeId),
    #[error("vertex {0} cannot be expanded: {1}")]
    BadVertex(VertexId, String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("invalid generalized diagram: {0:?}")]
    Invalid(Vec<Violation>),
}

/// Validation report for `g`: empty means valid.
pub fn validate_gkd(g: &GeneralizedDiagram) -> Vec<Violation> {
    g.validate()
}
