//! The seven local reduction rules.
//!
//! Each rule is applied at a vertex of graph degree at most two, rewrites
//! a constant-size neighbourhood in place and reports what happened: the
//! graph shrank, an unknotted circle split off, or a terminal
//! classification was reached. Twist arithmetic uses signed exponents
//! (see [`crate::gkd::Edge::signed_twists`]); two double edges meeting at a double
//! vertex always compose without a flip, so exponents simply add.

use std::fmt;

use serde::Serialize;
use smallvec::{smallvec, SmallVec};
use thiserror::Error;

use crate::gkd::{
    double_kind, EdgeId, EdgeKind, EdgeList, GeneralizedDiagram, VertexId, VertexKind, VertexType,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleId {
    Rule1,
    Rule2,
    Rule3,
    Rule4,
    Rule5,
    Rule6,
    Rule7,
}

impl RuleId {
    pub const ALL: [RuleId; 7] = [
        RuleId::Rule1,
        RuleId::Rule2,
        RuleId::Rule3,
        RuleId::Rule4,
        RuleId::Rule5,
        RuleId::Rule6,
        RuleId::Rule7,
    ];

    pub fn number(self) -> u8 {
        self as u8 + 1
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Untwist,
    Unpoke,
    ReRepresentation,
}

/// Vertices a move acts on.
pub type Location = SmallVec<[VertexId; 3]>;

/// One step of the trace. Counted moves are genuine Reidemeister
/// untwists (one crossing removed) or unpokes (two crossings removed).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Move {
    pub kind: MoveKind,
    pub location: Location,
    pub counted: bool,
    pub crossings_before: usize,
    pub crossings_after: usize,
}

/// A classification reached inside a rule that ends the whole run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Terminal {
    /// An odd clasp: a nontrivial knotted summand.
    NontrivialKnot,
    /// A circle crossing another strand with nonzero linking number.
    NontrivialLink,
    /// A whole component is the closure of a two-strand braid with `m`
    /// uniform crossings, `m >= 2`.
    Torus(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Effect {
    Reduced,
    /// This many unknotted, unlinked circles were split off and added to
    /// `split_circles`.
    CircleSplitOff(usize),
    Terminal(Terminal),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleOutcome {
    pub rule: RuleId,
    /// Sub-case label, e.g. `"case4"` or `"agree"`; stable, for statistics
    /// and fixtures.
    pub case: &'static str,
    pub effect: Effect,
    pub moves: Vec<Move>,
    /// Surviving vertices whose degree or type changed.
    pub touched: Vec<VertexId>,
}

impl RuleOutcome {
    pub fn counted_moves(&self) -> usize {
        self.moves.iter().filter(|m| m.counted).count()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("{rule} does not apply at vertex {vertex}: {reason}")]
    PatternMismatch {
        rule: RuleId,
        vertex: VertexId,
        reason: &'static str,
    },
    #[error("{rule} at vertex {vertex}: impossible configuration: {reason}")]
    Internal {
        rule: RuleId,
        vertex: VertexId,
        reason: &'static str,
    },
}

fn mismatch(rule: RuleId, vertex: VertexId, reason: &'static str) -> RuleError {
    RuleError::PatternMismatch {
        rule,
        vertex,
        reason,
    }
}

fn internal(rule: RuleId, vertex: VertexId, reason: &'static str) -> RuleError {
    RuleError::Internal {
        rule,
        vertex,
        reason,
    }
}

struct Log {
    current: usize,
    location: Location,
    moves: Vec<Move>,
}

impl Log {
    fn new(g: &GeneralizedDiagram, location: &[VertexId]) -> Self {
        Log {
            current: g.crossing_total(),
            location: Location::from_slice(location),
            moves: Vec::new(),
        }
    }

    fn push(&mut self, kind: MoveKind) {
        let removed = match kind {
            MoveKind::Untwist => 1,
            MoveKind::Unpoke => 2,
            MoveKind::ReRepresentation => 0,
        };
        let before = self.current;
        self.current -= removed;
        self.moves.push(Move {
            kind,
            location: self.location.clone(),
            counted: removed > 0,
            crossings_before: before,
            crossings_after: self.current,
        });
    }

    fn repeat(&mut self, kind: MoveKind, times: u64) {
        for _ in 0..times {
            self.push(kind);
        }
    }

    fn finish(
        self,
        rule: RuleId,
        case: &'static str,
        effect: Effect,
        touched: Vec<VertexId>,
    ) -> RuleOutcome {
        RuleOutcome {
            rule,
            case,
            effect,
            moves: self.moves,
            touched,
        }
    }
}

/// Unpokes performed when composing exponents `a` and `b`.
fn cancellations(a: i64, b: i64) -> u64 {
    if (a > 0 && b < 0) || (a < 0 && b > 0) {
        a.unsigned_abs().min(b.unsigned_abs())
    } else {
        0
    }
}

fn position(g: &GeneralizedDiagram, v: VertexId, e: EdgeId) -> usize {
    g.v(v)
        .edges
        .iter()
        .position(|&x| x == e)
        .expect("edge not incident")
}

fn replace_edge(g: &mut GeneralizedDiagram, v: VertexId, old: EdgeId, new: EdgeId) {
    let i = position(g, v, old);
    g.vertex_mut(v).edges[i] = new;
}

enum SlotPair {
    /// The two edges sit in consecutive slots; `first` is the index of the
    /// one that comes first counterclockwise.
    Adjacent { first: usize },
    Opposite,
}

fn slot_pair(g: &GeneralizedDiagram, w: VertexId, e1: EdgeId, e2: EdgeId) -> SlotPair {
    let (s1, s2) = (position(g, w, e1), position(g, w, e2));
    if (s1 + 1) % 4 == s2 {
        SlotPair::Adjacent { first: s1 }
    } else if (s2 + 1) % 4 == s1 {
        SlotPair::Adjacent { first: s2 }
    } else {
        SlotPair::Opposite
    }
}

/// Handedness of the twist obtained by viewing crossing `w` as a smooth
/// vertex whose double edge leaves through the consecutive slots starting
/// at `first`.
fn crossing_handedness(first: usize) -> i64 {
    if first % 2 == 1 {
        1
    } else {
        -1
    }
}

/// Remaining edges of a crossing after its slots `first`, `first + 1`
/// are merged into a double edge, in counterclockwise order.
fn far_pair(g: &GeneralizedDiagram, w: VertexId, first: usize) -> [EdgeId; 2] {
    let l = &g.v(w).edges;
    [l[(first + 2) % 4], l[(first + 3) % 4]]
}

/// The two single edges of a subdivision vertex, or `None`.
fn subdivision_edges(g: &GeneralizedDiagram, v: VertexId) -> Option<(EdgeId, EdgeId)> {
    match g.vertex_type(v) {
        Some(VertexType::Subdivision) => {
            let l = &g.v(v).edges;
            Some((l[0], l[1]))
        }
        _ => None,
    }
}

fn double_two_edges(g: &GeneralizedDiagram, v: VertexId) -> Option<(EdgeId, EdgeId)> {
    match g.vertex_type(v) {
        Some(VertexType::DoubleTwo) => {
            let l = &g.v(v).edges;
            Some((l[0], l[1]))
        }
        _ => None,
    }
}

/// The rule whose pattern matches at `v`, if `v` has graph degree at most
/// two. For a valid diagram exactly one rule matches such a vertex.
pub fn matching_rule(g: &GeneralizedDiagram, v: VertexId) -> Option<RuleId> {
    g.vertex(v)?;
    match g.vertex_type(v)? {
        VertexType::Cap => Some(RuleId::Rule1),
        VertexType::Subdivision => {
            let (a, b) = subdivision_edges(g, v)?;
            let (w, x) = (g.across(v, a), g.across(v, b));
            match g.edge_between(w, x).map(|e| g.e(e).is_double()) {
                None => Some(RuleId::Rule2),
                Some(false) => Some(RuleId::Rule3),
                Some(true) => Some(RuleId::Rule4),
            }
        }
        VertexType::DoubleTwo => {
            let (d, e) = double_two_edges(g, v)?;
            let (w, x) = (g.across(v, d), g.across(v, e));
            match g.edge_between(w, x).map(|e| g.e(e).is_double()) {
                None => Some(RuleId::Rule5),
                Some(false) => Some(RuleId::Rule6),
                Some(true) => Some(RuleId::Rule7),
            }
        }
        VertexType::Crossing | VertexType::DoubleThree => None,
    }
}

/// Applies the matching rule at `v`.
pub fn apply_at(g: &mut GeneralizedDiagram, v: VertexId) -> Result<RuleOutcome, RuleError> {
    match matching_rule(g, v) {
        Some(RuleId::Rule1) => apply_rule1(g, v),
        Some(RuleId::Rule2) => apply_rule2(g, v),
        Some(RuleId::Rule3) => apply_rule3(g, v),
        Some(RuleId::Rule4) => apply_rule4(g, v),
        Some(RuleId::Rule5) => apply_rule5(g, v),
        Some(RuleId::Rule6) => apply_rule6(g, v),
        Some(RuleId::Rule7) => apply_rule7(g, v),
        None => Err(mismatch(RuleId::Rule1, v, "no rule matches this vertex")),
    }
}

/// Rule 1: a cap `v` on a double edge of `i` twists. The twists come off
/// by `i` untwists and the two strands at the far end `w` are joined.
pub fn apply_rule1(g: &mut GeneralizedDiagram, v: VertexId) -> Result<RuleOutcome, RuleError> {
    const R: RuleId = RuleId::Rule1;
    if g.vertex(v).is_none() || g.vertex_type(v) != Some(VertexType::Cap) {
        return Err(mismatch(R, v, "not a cap"));
    }
    let d = g.v(v).edges[0];
    let w = g.across(v, d);
    let wt = g.vertex_type(w);
    let mut log = Log::new(g, &[v, w]);
    log.repeat(MoveKind::Untwist, g.e(d).twists() as u64);
    let (case, effect, touched) = match wt {
        Some(VertexType::Cap) => {
            g.remove_edge_raw(d);
            g.remove_vertex(v);
            g.remove_vertex(w);
            g.split_circles += 1;
            ("cap", Effect::CircleSplitOff(1), vec![])
        }
        Some(VertexType::DoubleThree) | Some(VertexType::DoubleTwo) => {
            g.remove_edge_raw(d);
            g.remove_vertex(v);
            g.vertex_mut(w).edges.retain(|e| *e != d);
            let case = if wt == Some(VertexType::DoubleThree) {
                "double_three"
            } else {
                "double_two"
            };
            (case, Effect::Reduced, vec![w])
        }
        _ => return Err(internal(R, v, "cap attached to a vertex without a double edge")),
    };
    if log.moves.is_empty() {
        log.push(MoveKind::ReRepresentation);
    }
    debug_assert_eq!(log.current, g.crossing_total());
    Ok(log.finish(R, case, effect, touched))
}

/// Rule 2: contracts a subdivision vertex whose neighbours are not
/// adjacent. The surviving edge keeps its slot at both ends.
pub fn apply_rule2(g: &mut GeneralizedDiagram, v: VertexId) -> Result<RuleOutcome, RuleError> {
    const R: RuleId = RuleId::Rule2;
    let (a, b) = g
        .vertex(v)
        .and_then(|_| subdivision_edges(g, v))
        .ok_or_else(|| mismatch(R, v, "not a subdivision vertex"))?;
    let (w, x) = (g.across(v, a), g.across(v, b));
    if w == x || g.edge_between(w, x).is_some() {
        return Err(mismatch(R, v, "neighbours are adjacent"));
    }
    let mut log = Log::new(g, &[v, w, x]);
    log.push(MoveKind::ReRepresentation);
    g.retarget_edge(a, v, x);
    replace_edge(g, x, b, a);
    g.remove_edge_raw(b);
    g.remove_vertex(v);
    Ok(log.finish(R, "contract", Effect::Reduced, vec![w, x]))
}

fn rank(t: VertexType) -> u8 {
    match t {
        VertexType::Subdivision => 0,
        VertexType::Crossing => 1,
        VertexType::DoubleThree => 2,
        VertexType::Cap | VertexType::DoubleTwo => 3,
    }
}

/// Rule 3: a subdivision vertex `v` on a triangle closed by a single edge
/// `c = {w, x}`. The bigon formed by `c` and the path through `v` is
/// removed or turned into a double edge, depending on the types of `w`
/// and `x`.
pub fn apply_rule3(g: &mut GeneralizedDiagram, v: VertexId) -> Result<RuleOutcome, RuleError> {
    const R: RuleId = RuleId::Rule3;
    let (mut a, mut b) = g
        .vertex(v)
        .and_then(|_| subdivision_edges(g, v))
        .ok_or_else(|| mismatch(R, v, "not a subdivision vertex"))?;
    let (mut w, mut x) = (g.across(v, a), g.across(v, b));
    let c = g
        .edge_between(w, x)
        .filter(|&c| !g.e(c).is_double())
        .ok_or_else(|| mismatch(R, v, "neighbours not joined by a single edge"))?;
    let mut tw = g
        .vertex_type(w)
        .ok_or_else(|| internal(R, v, "invalid neighbour"))?;
    let mut tx = g
        .vertex_type(x)
        .ok_or_else(|| internal(R, v, "invalid neighbour"))?;
    if rank(tw) > rank(tx) {
        std::mem::swap(&mut w, &mut x);
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut tw, &mut tx);
    }
    let mut log = Log::new(g, &[v, w, x]);
    use VertexType::*;
    let (case, effect, touched) = match (tw, tx) {
        (Subdivision, Subdivision) => {
            for e in [a, b, c] {
                g.remove_edge_raw(e);
            }
            for u in [v, w, x] {
                g.remove_vertex(u);
            }
            g.split_circles += 1;
            log.push(MoveKind::ReRepresentation);
            ("case1", Effect::CircleSplitOff(1), vec![])
        }
        (Subdivision, Crossing) => {
            let SlotPair::Adjacent { first } = slot_pair(g, x, b, c) else {
                return Err(internal(R, v, "kink through opposite slots"));
            };
            let rest = far_pair(g, x, first);
            log.push(MoveKind::Untwist);
            for e in [a, b, c] {
                g.remove_edge_raw(e);
            }
            g.remove_vertex(v);
            g.remove_vertex(w);
            g.set_kind(x, VertexKind::Smooth);
            g.vertex_mut(x).edges = EdgeList::from_slice(&rest);
            ("case2", Effect::Reduced, vec![x])
        }
        (Subdivision, DoubleThree) => {
            for e in [a, b, c] {
                g.remove_edge_raw(e);
            }
            g.remove_vertex(v);
            g.remove_vertex(w);
            g.vertex_mut(x).edges.truncate(1);
            log.push(MoveKind::ReRepresentation);
            ("case3", Effect::Reduced, vec![x])
        }
        (Crossing, Crossing) => match (slot_pair(g, w, a, c), slot_pair(g, x, b, c)) {
            (SlotPair::Adjacent { first: fw }, SlotPair::Adjacent { first: fx }) => {
                let s = crossing_handedness(fw) + crossing_handedness(fx);
                let (rw, rx) = (far_pair(g, w, fw), far_pair(g, x, fx));
                let case = if s == 0 {
                    log.push(MoveKind::Unpoke);
                    "case4"
                } else {
                    log.push(MoveKind::ReRepresentation);
                    "case5"
                };
                g.remove_edge_raw(a);
                g.remove_edge_raw(b);
                g.remove_vertex(v);
                g.set_kind(w, VertexKind::Smooth);
                g.set_kind(x, VertexKind::Smooth);
                g.vertex_mut(w).edges = smallvec![c, rw[0], rw[1]];
                g.vertex_mut(x).edges = smallvec![c, rx[0], rx[1]];
                g.set_edge_kind(c, double_kind(s));
                (case, Effect::Reduced, vec![w, x])
            }
            (SlotPair::Opposite, SlotPair::Opposite) => {
                // The triangle is a closed component meeting one other
                // strand at w and x.
                let (cw, cx) = (position(g, w, c), position(g, x, c));
                if cw % 2 != cx % 2 {
                    return Ok(log.finish(
                        R,
                        "ring_linked",
                        Effect::Terminal(Terminal::NontrivialLink),
                        vec![],
                    ));
                }
                let lw = g.v(w).edges.clone();
                let lx = g.v(x).edges.clone();
                log.push(MoveKind::Unpoke);
                for e in [a, b, c] {
                    g.remove_edge_raw(e);
                }
                g.remove_vertex(v);
                g.set_kind(w, VertexKind::Smooth);
                g.set_kind(x, VertexKind::Smooth);
                g.vertex_mut(w).edges = smallvec![lw[(cw + 1) % 4], lw[(cw + 3) % 4]];
                g.vertex_mut(x).edges = smallvec![lx[(cx + 1) % 4], lx[(cx + 3) % 4]];
                g.split_circles += 1;
                ("ring_split", Effect::CircleSplitOff(1), vec![w, x])
            }
            _ => return Err(internal(R, v, "bigon with mixed slot adjacency")),
        },
        (Crossing, DoubleThree) => {
            let SlotPair::Adjacent { first } = slot_pair(g, w, a, c) else {
                return Err(internal(R, v, "bigon through opposite slots"));
            };
            let s = crossing_handedness(first);
            let rw = far_pair(g, w, first);
            log.push(MoveKind::ReRepresentation);
            g.remove_edge_raw(a);
            g.remove_edge_raw(b);
            g.remove_vertex(v);
            g.set_kind(w, VertexKind::Smooth);
            g.vertex_mut(w).edges = smallvec![c, rw[0], rw[1]];
            let dx = g.v(x).edges[0];
            g.vertex_mut(x).edges = smallvec![dx, c];
            g.set_edge_kind(c, double_kind(s));
            ("case6", Effect::Reduced, vec![w, x])
        }
        (DoubleThree, DoubleThree) => {
            log.push(MoveKind::ReRepresentation);
            g.remove_edge_raw(a);
            g.remove_edge_raw(b);
            g.remove_vertex(v);
            for u in [w, x] {
                let du = g.v(u).edges[0];
                g.vertex_mut(u).edges = smallvec![du, c];
            }
            g.set_edge_kind(c, double_kind(0));
            ("case7", Effect::Reduced, vec![w, x])
        }
        _ => return Err(internal(R, v, "neighbour type outside the case table")),
    };
    debug_assert_eq!(log.current, g.crossing_total());
    Ok(log.finish(R, case, effect, touched))
}

/// Rule 4: a subdivision vertex `v` whose neighbours are joined by a
/// double edge `d` of `i` twists. The path through `v` either closes one
/// strand of `d` into a circle (possible only for even `i`) or turns `d`
/// into a clasp with an odd number of crossings.
pub fn apply_rule4(g: &mut GeneralizedDiagram, v: VertexId) -> Result<RuleOutcome, RuleError> {
    const R: RuleId = RuleId::Rule4;
    let (a, b) = g
        .vertex(v)
        .and_then(|_| subdivision_edges(g, v))
        .ok_or_else(|| mismatch(R, v, "not a subdivision vertex"))?;
    let (w, x) = (g.across(v, a), g.across(v, b));
    let d = g
        .edge_between(w, x)
        .filter(|&d| g.e(d).is_double())
        .ok_or_else(|| mismatch(R, v, "neighbours not joined by a double edge"))?;
    if g.vertex_type(w) != Some(VertexType::DoubleThree)
        || g.vertex_type(x) != Some(VertexType::DoubleThree)
    {
        return Err(internal(R, v, "double edge ends are not three-edge double vertices"));
    }
    // Ports of a three-edge double vertex [d, s1, s2] pair d's lane 1
    // with s1 and lane 0 with s2.
    let lane_of = |u: VertexId, e: EdgeId| -> usize {
        if g.v(u).edges[1] == e {
            1
        } else {
            0
        }
    };
    let (alpha, beta) = (lane_of(w, a), lane_of(x, b));
    let i = g.e(d).twists();
    // Lane k at one end of an i-twist double edge reaches lane 1 - k at
    // the other end, swapped once per twist.
    let reached = if i % 2 == 0 { 1 - alpha } else { alpha };
    let closes = reached == beta;
    let mut log = Log::new(g, &[v, w, x]);
    let (case, effect) = match (closes, i) {
        (true, 0) => {
            log.push(MoveKind::ReRepresentation);
            ("case1", Effect::CircleSplitOff(1))
        }
        (false, 1) => {
            log.push(MoveKind::Untwist);
            ("case4", Effect::Reduced)
        }
        (true, _) if i % 2 == 0 => {
            return Ok(log.finish(
                R,
                "case3",
                Effect::Terminal(Terminal::NontrivialLink),
                vec![],
            ))
        }
        (false, _) if i % 2 == 1 => {
            return Ok(log.finish(
                R,
                "case2",
                Effect::Terminal(Terminal::NontrivialKnot),
                vec![],
            ))
        }
        _ => return Err(internal(R, v, "closed strand crosses the other an odd number of times")),
    };
    g.remove_edge_raw(a);
    g.remove_edge_raw(b);
    g.remove_vertex(v);
    for u in [w, x] {
        g.vertex_mut(u).edges.retain(|e| *e != a && *e != b);
    }
    g.set_edge_kind(d, EdgeKind::Single);
    if let Effect::CircleSplitOff(k) = effect {
        g.split_circles += k;
    }
    debug_assert_eq!(log.current, g.crossing_total());
    Ok(log.finish(R, case, effect, vec![w, x]))
}

/// Rule 5: a two-edge double vertex `v` between non-adjacent `w` and `x`
/// is dissolved, merging its double edges into one.
pub fn apply_rule5(g: &mut GeneralizedDiagram, v: VertexId) -> Result<RuleOutcome, RuleError> {
    const R: RuleId = RuleId::Rule5;
    let (d, e) = g
        .vertex(v)
        .and_then(|_| double_two_edges(g, v))
        .ok_or_else(|| mismatch(R, v, "not a two-edge double vertex"))?;
    let (w, x) = (g.across(v, d), g.across(v, e));
    if w == x || g.edge_between(w, x).is_some() {
        return Err(mismatch(R, v, "neighbours are adjacent"));
    }
    let (sd, se) = (g.e(d).signed_twists(), g.e(e).signed_twists());
    let unpokes = cancellations(sd, se);
    let case = if unpokes > 0 || sd == 0 || se == 0 {
        "agree"
    } else {
        "disagree"
    };
    let mut log = Log::new(g, &[v, w, x]);
    log.repeat(MoveKind::Unpoke, unpokes);
    if unpokes == 0 {
        log.push(MoveKind::ReRepresentation);
    }
    g.retarget_edge(d, v, x);
    replace_edge(g, x, e, d);
    g.remove_edge_raw(e);
    g.remove_vertex(v);
    g.set_edge_kind(d, double_kind(sd + se));
    debug_assert_eq!(log.current, g.crossing_total());
    Ok(log.finish(R, case, Effect::Reduced, vec![w, x]))
}

/// Rule 6: a two-edge double vertex whose neighbours share a single edge.
/// The single edge is subdivided, Rule 5 merges the double edges, and Rule
/// 4 then resolves the new subdivision vertex.
pub fn apply_rule6(g: &mut GeneralizedDiagram, v: VertexId) -> Result<RuleOutcome, RuleError> {
    const R: RuleId = RuleId::Rule6;
    let (d, e) = g
        .vertex(v)
        .and_then(|_| double_two_edges(g, v))
        .ok_or_else(|| mismatch(R, v, "not a two-edge double vertex"))?;
    let (w, x) = (g.across(v, d), g.across(v, e));
    let c = g
        .edge_between(w, x)
        .filter(|&c| !g.e(c).is_double())
        .ok_or_else(|| mismatch(R, v, "neighbours not joined by a single edge"))?;
    let y = g.add_vertex(VertexKind::Smooth, EdgeList::new());
    let c2 = g.add_edge_raw([y, x], EdgeKind::Single);
    g.retarget_edge(c, x, y);
    replace_edge(g, x, c, c2);
    g.vertex_mut(y).edges.extend([c, c2]);
    let merged = apply_rule5(g, v).map_err(|_| internal(R, v, "merge step failed"))?;
    let mut finish = apply_rule4(g, y).map_err(|_| internal(R, v, "clasp step failed"))?;
    let mut moves = merged.moves;
    moves.append(&mut finish.moves);
    Ok(RuleOutcome {
        rule: R,
        case: finish.case,
        effect: finish.effect,
        moves,
        touched: finish.touched,
    })
}

/// Rule 7: a triangle of two-edge double vertices is a whole component:
/// the closure of a two-strand braid whose exponent is the sum of the
/// three edges' exponents.
pub fn apply_rule7(g: &mut GeneralizedDiagram, v: VertexId) -> Result<RuleOutcome, RuleError> {
    const R: RuleId = RuleId::Rule7;
    let (d, e) = g
        .vertex(v)
        .and_then(|_| double_two_edges(g, v))
        .ok_or_else(|| mismatch(R, v, "not a two-edge double vertex"))?;
    let (w, x) = (g.across(v, d), g.across(v, e));
    let f = g
        .edge_between(w, x)
        .filter(|&f| g.e(f).is_double())
        .ok_or_else(|| mismatch(R, v, "neighbours not joined by a double edge"))?;
    if g.vertex_type(w) != Some(VertexType::DoubleTwo)
        || g.vertex_type(x) != Some(VertexType::DoubleTwo)
    {
        return Err(internal(R, v, "triangle vertex is not a two-edge double vertex"));
    }
    let [sd, se, sf] = [d, e, f].map(|e| g.e(e).signed_twists());
    let m = classify_triangle(sd, se, sf);
    let mut log = Log::new(g, &[v, w, x]);
    log.repeat(MoveKind::Unpoke, cancellations(sd, se));
    log.repeat(MoveKind::Unpoke, cancellations(sd + se, sf));
    let (case, circles) = match m {
        0 => ("m0", 2),
        1 => {
            log.push(MoveKind::Untwist);
            ("m1", 1)
        }
        m if m % 2 == 1 => {
            return Ok(log.finish(R, "odd", Effect::Terminal(Terminal::Torus(m)), vec![]))
        }
        m => return Ok(log.finish(R, "even", Effect::Terminal(Terminal::Torus(m)), vec![])),
    };
    if log.moves.is_empty() {
        log.push(MoveKind::ReRepresentation);
    }
    for edge in [d, e, f] {
        g.remove_edge_raw(edge);
    }
    for u in [v, w, x] {
        g.remove_vertex(u);
    }
    g.split_circles += circles;
    debug_assert_eq!(log.current, g.crossing_total());
    Ok(log.finish(R, case, Effect::CircleSplitOff(circles), vec![]))
}

/// Crossing number `m` of the two-strand braid closure formed by a triangle
/// of double edges with signed exponents `a`, `b`, `c`.
pub fn classify_triangle(a: i64, b: i64, c: i64) -> u32 {
    (a + b + c).unsigned_abs() as u32
}
