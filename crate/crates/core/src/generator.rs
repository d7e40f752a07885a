//! Seeded construction of test diagrams with known answers.
//!
//! Instances start from a classified template (a circle, an unlink, or a
//! two-strand torus closure) and grow by Reidemeister twists and pokes,
//! which never change the link type. Pokes that would push the diagram's
//! graph above treewidth two are rolled back. The random source is
//! ChaCha8 (`rand_chacha`) seeded with `seed_from_u64`, so a configuration
//! reproduces the same diagram on every platform.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::diagram::{serialize_pd, ArcId, Endpoint, Face, PlaneDiagram, Side};
use crate::engine::{is_treewidth_le2, Verdict};
use crate::gkd::GeneralizedDiagram;
use crate::oracle::torus_reference;

pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.3, seed_from_u64)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Template {
    Circle,
    Unlink(usize),
    Torus(usize),
}

impl Template {
    pub fn diagram(self) -> PlaneDiagram {
        match self {
            Template::Circle => PlaneDiagram::unknot(),
            Template::Unlink(k) => PlaneDiagram::circles(k),
            Template::Torus(m) => torus_reference(m),
        }
    }

    pub fn ground_truth(self) -> Verdict {
        match self {
            Template::Circle | Template::Torus(1) | Template::Unlink(1) => Verdict::Unknot,
            Template::Unlink(k) => Verdict::Unlink(k),
            Template::Torus(0) => Verdict::Unlink(2),
            Template::Torus(m) if m % 2 == 1 => Verdict::TorusKnot(m as u32),
            Template::Torus(m) => Verdict::TorusLink(m as u32),
        }
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Template::Circle => write!(f, "circle"),
            Template::Unlink(k) => write!(f, "unlink({k})"),
            Template::Torus(m) => write!(f, "torus({m})"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown template `{0}` (expected circle, unlink(k) or torus(m))")]
pub struct TemplateParseError(String);

impl FromStr for Template {
    type Err = TemplateParseError;

    /// Accepts `circle`, `unlink(3)`, `unlink:3`, `torus(5)`, `torus:5`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || TemplateParseError(s.to_string());
        let t = s.trim();
        if t == "circle" {
            return Ok(Template::Circle);
        }
        let (name, arg) = if let Some((n, rest)) = t.split_once('(') {
            (n, rest.strip_suffix(')').ok_or_else(err)?)
        } else {
            t.split_once(':').ok_or_else(err)?
        };
        let k: usize = arg.trim().parse().map_err(|_| err())?;
        match name.trim() {
            "unlink" if k >= 1 => Ok(Template::Unlink(k)),
            "torus" => Ok(Template::Torus(k)),
            _ => Err(err()),
        }
    }
}

/// Relative weights of twist and poke moves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MoveMix {
    pub twist: f64,
    pub poke: f64,
}

impl Default for MoveMix {
    fn default() -> Self {
        MoveMix {
            twist: 1.0,
            poke: 1.0,
        }
    }
}

impl MoveMix {
    pub fn twist_only() -> Self {
        MoveMix {
            twist: 1.0,
            poke: 0.0,
        }
    }

    fn is_valid(&self) -> bool {
        self.twist >= 0.0 && self.poke >= 0.0 && self.twist + self.poke > 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenConfig {
    pub seed: u64,
    pub target_crossings: usize,
    pub template: Template,
    pub move_mix: MoveMix,
}

impl GenConfig {
    pub fn new(seed: u64, target_crossings: usize, template: Template) -> Self {
        GenConfig {
            seed,
            target_crossings,
            template,
            move_mix: MoveMix::default(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("the two arc sides share no face")]
    NotCofacial,
    #[error("side {0:?} does not exist in this diagram")]
    NoSuchSide(Side),
    #[error("move weights must be non-negative and not all zero")]
    BadMix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub diagram: PlaneDiagram,
    pub ground_truth: Verdict,
    /// Set when too many pokes were rejected before reaching the target;
    /// the diagram is the one built so far.
    pub stalled: bool,
    pub rejected: usize,
}

/// Face list of a diagram (see [`PlaneDiagram::faces`]).
pub fn faces(d: &PlaneDiagram) -> Vec<Face> {
    d.faces()
}

/// A diagram under construction: slot tables, arc ends and a count of
/// crossing-free circles, mutated in place.
#[derive(Debug, Clone)]
struct Draft {
    slots: Vec<[ArcId; 4]>,
    arcs: Vec<[Endpoint; 2]>,
    circles: usize,
}

// Compass positions around a new crossing, counterclockwise from east.
const E: usize = 0;
const N: usize = 1;
const W: usize = 2;
const S: usize = 3;

impl Draft {
    fn from_diagram(d: &PlaneDiagram) -> Self {
        Draft {
            slots: d.crossings().to_vec(),
            arcs: (0..d.arc_count()).map(|a| d.arc_ends(a)).collect(),
            circles: d.free_circles(),
        }
    }

    fn to_diagram(&self) -> PlaneDiagram {
        PlaneDiagram::from_slots(self.slots.clone(), self.circles)
            .expect("generator moves preserve planarity")
    }

    /// Adds a crossing whose compass position `E` sits at slot `offset`;
    /// returns the endpoint for each compass position.
    fn add_crossing(&mut self, offset: usize) -> [Endpoint; 4] {
        let c = self.slots.len();
        self.slots.push([usize::MAX; 4]);
        [0, 1, 2, 3].map(|k| Endpoint::new(c, ((k + offset) % 4) as u8))
    }

    fn set_arc(&mut self, a: ArcId, ends: [Endpoint; 2]) {
        self.arcs[a] = ends;
        for p in ends {
            self.slots[p.crossing][p.slot as usize] = a;
        }
    }

    fn new_arc(&mut self, ends: [Endpoint; 2]) -> ArcId {
        self.arcs.push(ends);
        let a = self.arcs.len() - 1;
        self.set_arc(a, ends);
        a
    }

    fn check_side(&self, side: Side) -> Result<(), GenError> {
        let ok = match side {
            Side::Arc { arc, from } => arc < self.arcs.len() && from < 2,
            Side::Circle { index, .. } => index < self.circles,
        };
        ok.then_some(()).ok_or(GenError::NoSuchSide(side))
    }

    /// Kink on `side`, bulging into the face on the right of the side's
    /// direction of travel. With `over` the through-strand is the
    /// over-strand.
    fn twist(&mut self, side: Side, over: bool) {
        let x = self.add_crossing(if over { 1 } else { 0 });
        match side {
            Side::Arc { arc, from } => {
                // Travel p -> q heading east with the face to the south:
                // enter at W, leave at E, loop round to S, exit at N.
                let p = self.arcs[arc][from as usize];
                let q = self.arcs[arc][1 - from as usize];
                self.set_arc(arc, [p, x[W]]);
                self.new_arc([x[E], x[S]]);
                self.new_arc([x[N], q]);
            }
            Side::Circle { .. } => {
                self.circles -= 1;
                self.new_arc([x[E], x[S]]);
                self.new_arc([x[N], x[W]]);
            }
        }
    }

    /// Start and end of a side traversed with its face on the left, or
    /// `None` for a circle.
    fn left_run(&self, side: Side) -> Option<(ArcId, Endpoint, Endpoint)> {
        match side {
            // Faces lie to the right of `from -> other`.
            Side::Arc { arc, from } => Some((
                arc,
                self.arcs[arc][1 - from as usize],
                self.arcs[arc][from as usize],
            )),
            Side::Circle { .. } => None,
        }
    }

    /// Pushes a finger of `s1` across `s2` through their common face,
    /// creating crossings X then Y along the finger.
    fn poke(&mut self, s1: Side, s2: Side, first_over: bool) {
        let offset = if first_over { 0 } else { 3 };
        let x = self.add_crossing(offset);
        let y = self.add_crossing(offset);
        let run1 = self.left_run(s1);
        let run2 = self.left_run(s2);
        let circles_used = match (s1, s2) {
            (Side::Circle { index: i, .. }, Side::Circle { index: j, .. }) if i == j => 1,
            (Side::Circle { .. }, Side::Circle { .. }) => 2,
            (Side::Circle { .. }, _) | (_, Side::Circle { .. }) => 1,
            _ => 0,
        };
        self.circles -= circles_used;
        self.new_arc([x[N], y[N]]);
        self.new_arc([y[W], x[E]]);
        if s1 == s2 {
            // Both runs are portions of one side, the finger first.
            self.new_arc([y[S], y[E]]);
            match run1 {
                Some((a, p, q)) => {
                    self.set_arc(a, [p, x[S]]);
                    self.new_arc([x[W], q]);
                }
                None => {
                    self.new_arc([x[W], x[S]]);
                }
            }
            return;
        }
        match run1 {
            Some((a, p1, q1)) => {
                self.set_arc(a, [p1, x[S]]);
                self.new_arc([y[S], q1]);
            }
            None => {
                self.new_arc([y[S], x[S]]);
            }
        }
        match run2 {
            Some((a, p2, q2)) => {
                self.set_arc(a, [p2, y[E]]);
                self.new_arc([x[W], q2]);
            }
            None => {
                self.new_arc([x[W], y[E]]);
            }
        }
    }
}

/// Adds a kink on the given side of an arc (or circle).
pub fn apply_twist(d: &PlaneDiagram, side: Side, over: bool) -> Result<PlaneDiagram, GenError> {
    let mut draft = Draft::from_diagram(d);
    draft.check_side(side)?;
    draft.twist(side, over);
    Ok(draft.to_diagram())
}

/// Component (crossing component or circle) a side belongs to, as an id
/// unique within `d`.
fn side_component(d: &PlaneDiagram, comps: &[usize], count: usize, side: Side) -> usize {
    match side {
        Side::Arc { arc, .. } => comps[d.arc_ends(arc)[0].crossing],
        Side::Circle { index, .. } => count + index,
    }
}

/// Whether a poke between `s1` and `s2` is planar: both sides bound a
/// common face, or they lie in different split pieces (which can be
/// placed in each other's faces).
fn cofacial(d: &PlaneDiagram, faces: &[Face], s1: Side, s2: Side) -> bool {
    let (comps, count) = d.crossing_components();
    if side_component(d, &comps, count, s1) != side_component(d, &comps, count, s2) {
        return true;
    }
    faces
        .iter()
        .any(|f| f.sides.contains(&s1) && f.sides.contains(&s2))
}

/// Reidemeister poke: a finger of `s1` crosses `s2` twice. `s1 == s2`
/// pokes a side across itself. With `first_over` the finger passes over.
pub fn apply_poke(
    d: &PlaneDiagram,
    s1: Side,
    s2: Side,
    first_over: bool,
) -> Result<PlaneDiagram, GenError> {
    let mut draft = Draft::from_diagram(d);
    draft.check_side(s1)?;
    draft.check_side(s2)?;
    if let (Side::Arc { arc: a, from: f }, Side::Arc { arc: b, from: g }) = (s1, s2) {
        if a == b && f != g {
            // both sides of one arc never share a face in a 4-valent
            // plane graph; a poke between them has no planar meaning
            return Err(GenError::NotCofacial);
        }
    }
    if !cofacial(d, &d.faces(), s1, s2) {
        return Err(GenError::NotCofacial);
    }
    draft.poke(s1, s2, first_over);
    Ok(draft.to_diagram())
}

fn passes_treewidth(d: &PlaneDiagram) -> bool {
    is_treewidth_le2(&GeneralizedDiagram::from_plane_diagram(d).simple_graph())
}

fn random_side(rng: &mut ChaCha8Rng, draft: &Draft) -> Side {
    let k = rng.gen_range(0..draft.arcs.len() + draft.circles);
    if k < draft.arcs.len() {
        Side::Arc {
            arc: k,
            from: rng.gen_range(0..2),
        }
    } else {
        Side::Circle {
            index: k - draft.arcs.len(),
            inner: rng.gen(),
        }
    }
}

/// Picks two sides for a poke: usually two sides of one random face,
/// sometimes sides of two different split pieces.
fn random_poke_sides(rng: &mut ChaCha8Rng, d: &PlaneDiagram) -> (Side, Side) {
    let faces = d.faces();
    let (comps, count) = d.crossing_components();
    let pieces = count + d.free_circles();
    if pieces > 1 && rng.gen_bool(0.5) {
        let f1 = &faces[rng.gen_range(0..faces.len())];
        let s1 = f1.sides[rng.gen_range(0..f1.sides.len())];
        let c1 = side_component(d, &comps, count, s1);
        let others: Vec<&Face> = faces
            .iter()
            .filter(|f| side_component(d, &comps, count, f.sides[0]) != c1)
            .collect();
        let f2 = others[rng.gen_range(0..others.len())];
        return (s1, f2.sides[rng.gen_range(0..f2.sides.len())]);
    }
    let f = &faces[rng.gen_range(0..faces.len())];
    let s1 = f.sides[rng.gen_range(0..f.sides.len())];
    let s2 = f.sides[rng.gen_range(0..f.sides.len())];
    (s1, s2)
}

/// Grows the template to `target_crossings` by random twists and pokes.
pub fn generate(cfg: &GenConfig) -> Result<Generated, GenError> {
    if !cfg.move_mix.is_valid() {
        return Err(GenError::BadMix);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let template = cfg.template.diagram();
    let mut draft = Draft::from_diagram(&template);
    let max_rejections = 100 + 10 * cfg.target_crossings;
    let mut rejected = 0;
    let mut stalled = false;
    let p_twist = cfg.move_mix.twist / (cfg.move_mix.twist + cfg.move_mix.poke);
    while draft.slots.len() < cfg.target_crossings {
        let room = cfg.target_crossings - draft.slots.len();
        let poke = room >= 2 && cfg.move_mix.poke > 0.0 && !rng.gen_bool(p_twist);
        if !poke {
            if cfg.move_mix.twist == 0.0 {
                break;
            }
            let side = random_side(&mut rng, &draft);
            let over = rng.gen();
            draft.twist(side, over);
            continue;
        }
        let current = draft.to_diagram();
        let (s1, s2) = random_poke_sides(&mut rng, &current);
        let over = rng.gen();
        match apply_poke(&current, s1, s2, over) {
            Ok(next) if passes_treewidth(&next) => draft = Draft::from_diagram(&next),
            _ => {
                rejected += 1;
                if rejected > max_rejections {
                    stalled = true;
                    break;
                }
            }
        }
    }
    Ok(Generated {
        diagram: draft.to_diagram().renumbered(),
        ground_truth: cfg.template.ground_truth(),
        stalled,
        rejected,
    })
}

pub const MANIFEST_HEADER: &str = "# seed\ttemplate\ttarget\tcrossings\tground_truth\tstalled\tpath";

/// One manifest line, tab-separated in the order of [`MANIFEST_HEADER`].
pub fn manifest_line(cfg: &GenConfig, g: &Generated, path: &str) -> String {
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}",
        cfg.seed,
        cfg.template,
        cfg.target_crossings,
        g.diagram.crossing_count(),
        g.ground_truth,
        g.stalled,
        path
    )
}

/// Serialized PD text of a generated instance, newline-terminated.
pub fn pd_text(g: &Generated) -> String {
    let mut s = serialize_pd(&g.diagram);
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;
    use crate::oracle::normalized_invariant;

    fn same_link(a: &PlaneDiagram, b: &PlaneDiagram) -> bool {
        a.components() == b.components()
            && normalized_invariant(a).unwrap() == normalized_invariant(b).unwrap()
    }

    #[test]
    fn face_counts() {
        assert_eq!(faces(&parse_pd("O").unwrap()).len(), 2);
        assert_eq!(faces(&parse_pd("X(1,2,2,1)").unwrap()).len(), 3);
        assert_eq!(faces(&parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)").unwrap()).len(), 5);
    }

    #[test]
    fn twisting_a_circle_gives_the_kink() {
        let kink = parse_pd("X(1,2,2,1)").unwrap();
        for over in [false, true] {
            let side = Side::Circle {
                index: 0,
                inner: true,
            };
            let d = apply_twist(&PlaneDiagram::unknot(), side, over).unwrap();
            assert!(d.is_isomorphic(&kink) || d.is_isomorphic(&kink.mirror()));
        }
    }

    #[test]
    fn twists_preserve_the_invariant() {
        let d = parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)").unwrap();
        for arc in 0..d.arc_count() {
            for from in 0..2 {
                for over in [false, true] {
                    let t = apply_twist(&d, Side::Arc { arc, from }, over).unwrap();
                    assert_eq!(t.crossing_count(), 4);
                    assert!(same_link(&d, &t));
                }
            }
        }
    }

    #[test]
    fn pokes_preserve_the_invariant() {
        let d = parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)").unwrap();
        for f in d.faces() {
            for &s1 in &f.sides {
                for &s2 in &f.sides {
                    for over in [false, true] {
                        let p = apply_poke(&d, s1, s2, over).unwrap();
                        assert_eq!(p.crossing_count(), 5);
                        assert!(same_link(&d, &p), "{s1:?} {s2:?} {over}");
                    }
                }
            }
        }
    }

    #[test]
    fn circle_self_poke_and_unlink_poke() {
        let c = Side::Circle {
            index: 0,
            inner: true,
        };
        let d = apply_poke(&PlaneDiagram::unknot(), c, c, true).unwrap();
        assert_eq!((d.crossing_count(), d.components()), (2, 1));
        assert!(same_link(&d, &PlaneDiagram::unknot()));
        let c1 = Side::Circle {
            index: 1,
            inner: false,
        };
        let u = apply_poke(&PlaneDiagram::circles(2), c, c1, false).unwrap();
        assert_eq!((u.crossing_count(), u.components()), (2, 2));
        assert!(same_link(&u, &PlaneDiagram::circles(2)));
    }

    #[test]
    fn non_cofacial_sides_are_rejected() {
        let d = parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)").unwrap();
        let faces = d.faces();
        let (small, other) = faces
            .iter()
            .flat_map(|f| faces.iter().map(move |g| (f, g)))
            .find_map(|(f, g)| {
                let s1 = f.sides[0];
                g.sides
                    .iter()
                    .find(|s| !faces.iter().any(|h| h.sides.contains(&s1) && h.sides.contains(s)))
                    .map(|&s2| (s1, s2))
            })
            .unwrap();
        assert_eq!(apply_poke(&d, small, other, true), Err(GenError::NotCofacial));
    }

    #[test]
    fn generation_is_deterministic_and_valid() {
        let cfg = GenConfig::new(42, 40, Template::Circle);
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(serialize_pd(&a.diagram), serialize_pd(&b.diagram));
        assert_eq!(a.diagram.crossing_count(), 40);
        assert_eq!(a.ground_truth, Verdict::Unknot);
        assert!(passes_treewidth(&a.diagram));
    }

    #[test]
    fn zero_target_is_the_template() {
        let g = generate(&GenConfig::new(1, 0, Template::Circle)).unwrap();
        assert_eq!(serialize_pd(&g.diagram), "O");
    }

    #[test]
    fn small_instances_keep_their_link_type() {
        for seed in 0..8 {
            for t in [Template::Circle, Template::Unlink(2), Template::Torus(3)] {
                let g = generate(&GenConfig::new(seed, 9, t)).unwrap();
                assert!(same_link(&g.diagram, &t.diagram()), "{seed} {t}");
            }
        }
    }

    #[test]
    fn template_parsing() {
        assert_eq!("circle".parse(), Ok(Template::Circle));
        assert_eq!("unlink(3)".parse(), Ok(Template::Unlink(3)));
        assert_eq!("torus:5".parse(), Ok(Template::Torus(5)));
        assert!("torus".parse::<Template>().is_err());
        assert_eq!(Template::Torus(4).to_string(), "torus(4)");
    }
}
