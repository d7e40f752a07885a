//! Plane knot/link diagrams as 4-valent rotation systems.
//!
//! Every crossing has four slots in counterclockwise order. Slots 0 and 2
//! carry the under-strand, slots 1 and 3 the over-strand. Arcs join two
//! slots. Crossing-free circles are kept as a plain counter.

mod builder;
mod pd;

pub use builder::{Corner, DiagramBuilder, Junction};

pub use pd::{parse_pd, serialize_pd};

use std::collections::VecDeque;

use thiserror::Error;

pub type CrossingId = usize;
pub type ArcId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("syntax error at line {line}: {message} (token `{token}`)")]
    Syntax {
        line: usize,
        token: String,
        message: String,
    },
    #[error("arc label {label} occurs {count} time(s), expected exactly 2")]
    ArcLabelCount { label: u64, count: usize },
    #[error("rotation system is not planar: component with {vertices} crossings, {edges} arcs and {faces} faces has Euler characteristic {euler}")]
    Embedding {
        vertices: usize,
        edges: usize,
        faces: usize,
        euler: i64,
    },
    #[error("empty diagram")]
    Empty,
}

/// One end of an arc: a crossing and one of its four slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Endpoint {
    pub crossing: CrossingId,
    pub slot: u8,
}

impl Endpoint {
    pub fn new(crossing: CrossingId, slot: u8) -> Self {
        Endpoint { crossing, slot }
    }

    /// Slot reached by going straight through the crossing.
    pub fn opposite(self) -> Self {
        Endpoint::new(self.crossing, (self.slot + 2) % 4)
    }

    pub fn is_over(self) -> bool {
        self.slot % 2 == 1
    }

    pub fn label(self) -> EndpointLabel {
        if self.is_over() {
            EndpointLabel::Up
        } else {
            EndpointLabel::Down
        }
    }
}

/// Over/under marking of an edge endpoint at a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EndpointLabel {
    /// Overcrossing (`u`).
    Up,
    /// Undercrossing (`d`).
    Down,
}

impl EndpointLabel {
    pub fn flip(self) -> Self {
        match self {
            EndpointLabel::Up => EndpointLabel::Down,
            EndpointLabel::Down => EndpointLabel::Up,
        }
    }
}

/// A validated plane diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneDiagram {
    crossings: Vec<[ArcId; 4]>,
    arcs: Vec<[Endpoint; 2]>,
    free_circles: usize,
}

/// A direction of travel for every arc, given as the index of the end the
/// arc is left from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    from_end: Vec<u8>,
}

impl Orientation {
    pub fn from_end(&self, arc: ArcId) -> u8 {
        self.from_end[arc]
    }

    /// Reverses every arc of the strand containing `arc`.
    pub fn reverse_component(&mut self, d: &PlaneDiagram, arc: ArcId) {
        for (a, _) in d.strand_from(arc, 1 - self.from_end[arc]) {
            self.from_end[a] = 1 - self.from_end[a];
        }
    }

    pub fn reverse_all(&mut self) {
        for e in &mut self.from_end {
            *e = 1 - *e;
        }
    }
}

/// One side of an arc, as seen while walking a face boundary. The face
/// lies to the right of the walk from `from` to the other end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Arc { arc: ArcId, from: u8 },
    /// A crossing-free circle; each circle borders two faces.
    Circle { index: usize, inner: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub sides: Vec<Side>,
}

impl PlaneDiagram {
    /// Builds a diagram from crossing slot tables over dense arc ids
    /// `0..arc_count`, validating labels and planarity.
    pub fn from_slots(
        crossings: Vec<[ArcId; 4]>,
        free_circles: usize,
    ) -> Result<Self, DiagramError> {
        let arc_count = crossings
            .iter()
            .flat_map(|c| c.iter())
            .map(|&a| a + 1)
            .max()
            .unwrap_or(0);
        let mut ends: Vec<Vec<Endpoint>> = vec![Vec::with_capacity(2); arc_count];
        for (c, slots) in crossings.iter().enumerate() {
            for (s, &a) in slots.iter().enumerate() {
                ends[a].push(Endpoint::new(c, s as u8));
            }
        }
        let mut arcs = Vec::with_capacity(arc_count);
        for (a, e) in ends.into_iter().enumerate() {
            if e.len() != 2 {
                return Err(DiagramError::ArcLabelCount {
                    label: a as u64 + 1,
                    count: e.len(),
                });
            }
            arcs.push([e[0], e[1]]);
        }
        let d = PlaneDiagram {
            crossings,
            arcs,
            free_circles,
        };
        d.check_planar()?;
        Ok(d)
    }

    pub fn unknot() -> Self {
        Self::circles(1)
    }

    /// `k` disjoint crossing-free circles.
    pub fn circles(k: usize) -> Self {
        PlaneDiagram {
            crossings: Vec::new(),
            arcs: Vec::new(),
            free_circles: k,
        }
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn free_circles(&self) -> usize {
        self.free_circles
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty() && self.free_circles == 0
    }

    pub fn slots(&self, c: CrossingId) -> [ArcId; 4] {
        self.crossings[c]
    }

    pub fn crossings(&self) -> &[[ArcId; 4]] {
        &self.crossings
    }

    pub fn arc_ends(&self, a: ArcId) -> [Endpoint; 2] {
        self.arcs[a]
    }

    pub fn arc_at(&self, p: Endpoint) -> ArcId {
        self.crossings[p.crossing][p.slot as usize]
    }

    /// The end index of arc `a` sitting at `p`.
    pub(crate) fn end_index(&self, a: ArcId, p: Endpoint) -> u8 {
        if self.arcs[a][0] == p {
            0
        } else {
            debug_assert_eq!(self.arcs[a][1], p);
            1
        }
    }

    /// Endpoint at the other end of the arc attached at `p`.
    pub fn across(&self, p: Endpoint) -> Endpoint {
        let a = self.arc_at(p);
        self.arcs[a][1 - self.end_index(a, p) as usize]
    }

    /// Walks the strand starting on `arc`, leaving from end `from`. Yields
    /// each arc with the end it is left from, ending before `arc` repeats.
    pub fn strand_from(&self, arc: ArcId, from: u8) -> Vec<(ArcId, u8)> {
        let mut out = Vec::new();
        let (mut a, mut f) = (arc, from);
        loop {
            out.push((a, f));
            let arrive = self.arcs[a][1 - f as usize];
            let next = arrive.opposite();
            let na = self.arc_at(next);
            let nf = self.end_index(na, next);
            if na == arc && nf == from {
                break;
            }
            a = na;
            f = nf;
        }
        out
    }

    /// Strand index of every arc, and the number of strands through
    /// crossings (free circles excluded).
    pub fn strand_labels(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.arcs.len()];
        let mut count = 0;
        for a in 0..self.arcs.len() {
            if label[a] != usize::MAX {
                continue;
            }
            for (b, _) in self.strand_from(a, 0) {
                label[b] = count;
            }
            count += 1;
        }
        (label, count)
    }

    /// Number of closed strands, free circles included.
    pub fn components(&self) -> usize {
        self.strand_labels().1 + self.free_circles
    }

    /// Deterministic orientation: strands in order of their smallest arc,
    /// each traversed starting on that arc toward its smaller endpoint.
    pub fn default_orientation(&self) -> Orientation {
        let mut from_end = vec![u8::MAX; self.arcs.len()];
        for a in 0..self.arcs.len() {
            if from_end[a] != u8::MAX {
                continue;
            }
            let [e0, e1] = self.arcs[a];
            let from = if e0 < e1 { 1 } else { 0 };
            for (b, f) in self.strand_from(a, from) {
                from_end[b] = f;
            }
        }
        Orientation { from_end }
    }

    /// Sign of crossing `c`: +1 iff, with the under-strand entering at
    /// slot `k`, the over-strand exits at slot `k + 3`.
    pub fn crossing_sign(&self, c: CrossingId, o: &Orientation) -> i32 {
        let enters = |s: u8| {
            let p = Endpoint::new(c, s);
            let a = self.arc_at(p);
            self.end_index(a, p) != o.from_end(a)
        };
        let under_in: u8 = if enters(0) { 0 } else { 2 };
        let over_out: u8 = if enters(1) { 3 } else { 1 };
        if (over_out + 4 - under_in) % 4 == 3 {
            1
        } else {
            -1
        }
    }

    pub fn writhe(&self, o: &Orientation) -> i64 {
        (0..self.crossings.len())
            .map(|c| self.crossing_sign(c, o) as i64)
            .sum()
    }

    /// Sum of signs over crossings where a strand meets itself. Does not
    /// depend on the orientation chosen for each strand.
    pub fn self_writhe(&self) -> i64 {
        let o = self.default_orientation();
        let (label, _) = self.strand_labels();
        (0..self.crossings.len())
            .filter(|&c| label[self.crossings[c][0]] == label[self.crossings[c][1]])
            .map(|c| self.crossing_sign(c, &o) as i64)
            .sum()
    }

    /// The same diagram with arcs numbered consecutively along each strand
    /// and crossings in order of first visit, as in conventional PD codes.
    pub fn renumbered(&self) -> Self {
        let n = self.crossings.len();
        let mut arc_new = vec![usize::MAX; self.arcs.len()];
        let mut cross_new = vec![usize::MAX; n];
        let (mut next_arc, mut next_cross) = (0, 0);
        for a in 0..self.arcs.len() {
            if arc_new[a] != usize::MAX {
                continue;
            }
            for (b, from) in self.strand_from(a, 0) {
                arc_new[b] = next_arc;
                next_arc += 1;
                let c = self.arcs[b][from as usize].crossing;
                if cross_new[c] == usize::MAX {
                    cross_new[c] = next_cross;
                    next_cross += 1;
                }
            }
        }
        let mut crossings = vec![[0; 4]; n];
        for (c, slots) in self.crossings.iter().enumerate() {
            crossings[cross_new[c]] = slots.map(|a| arc_new[a]);
        }
        let mut arcs = vec![[Endpoint::new(0, 0); 2]; self.arcs.len()];
        for (a, ends) in self.arcs.iter().enumerate() {
            arcs[arc_new[a]] = ends.map(|p| Endpoint::new(cross_new[p.crossing], p.slot));
        }
        PlaneDiagram {
            crossings,
            arcs,
            free_circles: self.free_circles,
        }
    }

    /// Mirror image: every crossing switched.
    pub fn mirror(&self) -> Self {
        let crossings: Vec<[ArcId; 4]> = self
            .crossings
            .iter()
            .map(|s| [s[1], s[2], s[3], s[0]])
            .collect();
        PlaneDiagram::from_slots(crossings, self.free_circles).expect("mirror of a valid diagram")
    }

    /// Disjoint union, placing `other` in the outer face.
    pub fn disjoint_union(&self, other: &PlaneDiagram) -> Self {
        let shift = self.arcs.len();
        let mut crossings = self.crossings.clone();
        crossings.extend(
            other
                .crossings
                .iter()
                .map(|s| [s[0] + shift, s[1] + shift, s[2] + shift, s[3] + shift]),
        );
        PlaneDiagram::from_slots(crossings, self.free_circles + other.free_circles)
            .expect("union of valid diagrams")
    }

    fn next_ccw(p: Endpoint) -> Endpoint {
        Endpoint::new(p.crossing, (p.slot + 1) % 4)
    }

    /// Face boundaries of the rotation system.
    pub fn faces(&self) -> Vec<Face> {
        let n = self.crossings.len();
        let mut seen = vec![false; 4 * n];
        let mut faces = Vec::new();
        for start in 0..4 * n {
            if seen[start] {
                continue;
            }
            let mut sides = Vec::new();
            let mut d = start;
            while !seen[d] {
                seen[d] = true;
                let p = Endpoint::new(d / 4, (d % 4) as u8);
                let a = self.arc_at(p);
                sides.push(Side::Arc {
                    arc: a,
                    from: self.end_index(a, p),
                });
                let q = Self::next_ccw(self.across(p));
                d = 4 * q.crossing + q.slot as usize;
            }
            faces.push(Face { sides });
        }
        for index in 0..self.free_circles {
            for inner in [true, false] {
                faces.push(Face {
                    sides: vec![Side::Circle { index, inner }],
                });
            }
        }
        faces
    }

    /// Connected components of the crossing graph, as a component id per
    /// crossing plus the component count.
    pub fn crossing_components(&self) -> (Vec<usize>, usize) {
        let n = self.crossings.len();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            queue.push_back(s);
            while let Some(c) = queue.pop_front() {
                for slot in 0..4 {
                    let q = self.across(Endpoint::new(c, slot));
                    if comp[q.crossing] == usize::MAX {
                        comp[q.crossing] = count;
                        queue.push_back(q.crossing);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    fn check_planar(&self) -> Result<(), DiagramError> {
        let (comp, count) = self.crossing_components();
        let mut v = vec![0i64; count];
        let mut e = vec![0i64; count];
        let mut f = vec![0i64; count];
        for &c in &comp {
            v[c] += 1;
        }
        for ends in &self.arcs {
            e[comp[ends[0].crossing]] += 1;
        }
        for face in self.faces() {
            if let Some(Side::Arc { arc, .. }) = face.sides.first() {
                f[comp[self.arcs[*arc][0].crossing]] += 1;
            }
        }
        for i in 0..count {
            let euler = v[i] - e[i] + f[i];
            if euler != 2 {
                return Err(DiagramError::Embedding {
                    vertices: v[i] as usize,
                    edges: e[i] as usize,
                    faces: f[i] as usize,
                    euler,
                });
            }
        }
        Ok(())
    }

    /// Relabeling-invariant code: two diagrams are isomorphic (same
    /// rotation system and crossing information up to renaming) iff their
    /// canonical forms are equal.
    pub fn canonical_form(&self) -> (Vec<Vec<usize>>, usize) {
        let (comp, count) = self.crossing_components();
        let mut members: Vec<Vec<CrossingId>> = vec![Vec::new(); count];
        for (c, &k) in comp.iter().enumerate() {
            members[k].push(c);
        }
        let mut codes: Vec<Vec<usize>> = members
            .iter()
            .map(|m| {
                m.iter()
                    .flat_map(|&c| [(c, 0u8), (c, 2u8)])
                    .map(|(c, r)| self.bfs_code(c, r, m.len()))
                    .min()
                    .expect("nonempty component")
            })
            .collect();
        codes.sort();
        (codes, self.free_circles)
    }

    fn bfs_code(&self, start: CrossingId, rot: u8, size: usize) -> Vec<usize> {
        let mut order: Vec<(CrossingId, u8)> = Vec::with_capacity(size);
        let mut id = std::collections::HashMap::with_capacity(size);
        id.insert(start, 0usize);
        order.push((start, rot));
        let mut code = Vec::with_capacity(8 * size);
        let mut i = 0;
        while i < order.len() {
            let (c, r) = order[i];
            for k in 0..4u8 {
                let q = self.across(Endpoint::new(c, (r + k) % 4));
                let qid = match id.get(&q.crossing) {
                    Some(&x) => x,
                    None => {
                        let x = order.len();
                        id.insert(q.crossing, x);
                        order.push((q.crossing, q.slot & !1));
                        x
                    }
                };
                let qrot = order[qid].1;
                code.push(qid);
                code.push(((q.slot + 4 - qrot) % 4) as usize);
            }
            i += 1;
        }
        code
    }

    pub fn is_isomorphic(&self, other: &PlaneDiagram) -> bool {
        self.crossings.len() == other.crossings.len()
            && self.arcs.len() == other.arcs.len()
            && self.free_circles == other.free_circles
            && self.canonical_form() == other.canonical_form()
    }
}
