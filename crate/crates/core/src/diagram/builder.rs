use super::{ArcId, DiagramError, PlaneDiagram};

/// A strand junction: either a crossing slot or a free point on a strand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Junction {
    Slot(usize, u8),
    Point(usize),
}

/// Crossing positions seen from one end of a twist region, listed
/// counterclockwise: south-west, south-east, north-east, north-west.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corner {
    SouthWest = 0,
    SouthEast = 1,
    NorthEast = 2,
    NorthWest = 3,
}

/// Assembles a [`PlaneDiagram`] from crossings and strand connections.
/// Every slot must end up with exactly one link and every point with two.
#[derive(Debug, Default)]
pub struct DiagramBuilder {
    slot_link: Vec<[Option<Junction>; 4]>,
    point_links: Vec<Vec<Junction>>,
    free_circles: usize,
}

impl DiagramBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn crossing(&mut self) -> usize {
        self.slot_link.push([None; 4]);
        self.slot_link.len() - 1
    }

    pub fn point(&mut self) -> Junction {
        self.point_links.push(Vec::with_capacity(2));
        Junction::Point(self.point_links.len() - 1)
    }

    pub fn add_free_circles(&mut self, k: usize) {
        self.free_circles += k;
    }

    fn attach(&mut self, at: Junction, to: Junction) {
        match at {
            Junction::Slot(c, s) => {
                let slot = &mut self.slot_link[c][s as usize];
                assert!(slot.is_none(), "slot ({c},{s}) linked twice");
                *slot = Some(to);
            }
            Junction::Point(p) => {
                assert!(self.point_links[p].len() < 2, "point {p} linked three times");
                self.point_links[p].push(to);
            }
        }
    }

    pub fn link(&mut self, a: Junction, b: Junction) {
        self.attach(a, b);
        self.attach(b, a);
    }

    /// A crossing whose geometric corners map to slots so the strand
    /// running south-west to north-east is over iff `sw_ne_over`.
    pub fn twist_crossing(&mut self, sw_ne_over: bool) -> [Junction; 4] {
        let c = self.crossing();
        let slots: [u8; 4] = if sw_ne_over { [3, 0, 1, 2] } else { [0, 1, 2, 3] };
        slots.map(|s| Junction::Slot(c, s))
    }

    /// Two parallel strands with `twists` alternating crossings between
    /// end A and end B. Ports are given counterclockwise as seen from each
    /// end's vertex (right-hand port first when looking along the region).
    /// With `left_over`, the strand moving from the left to the right
    /// position is the over-strand at every crossing.
    pub fn twist_region(
        &mut self,
        a: [Junction; 2],
        b: [Junction; 2],
        twists: usize,
        left_over: bool,
    ) {
        // (left, right) as seen looking from A toward B
        let mut left = a[1];
        let mut right = a[0];
        for _ in 0..twists {
            let c = self.twist_crossing(left_over);
            self.link(left, c[Corner::SouthWest as usize]);
            self.link(right, c[Corner::SouthEast as usize]);
            left = c[Corner::NorthWest as usize];
            right = c[Corner::NorthEast as usize];
        }
        self.link(left, b[0]);
        self.link(right, b[1]);
    }

    /// Follows the strand from `from` through `next` until a slot is hit
    /// or the walk closes up at `from`.
    fn walk(&self, from: Junction, mut next: Junction, seen: &mut [bool]) -> Junction {
        let mut prev = from;
        while let Junction::Point(p) = next {
            if next == from {
                break;
            }
            seen[p] = true;
            let links = &self.point_links[p];
            assert_eq!(links.len(), 2, "point {p} is not on a strand");
            let step = if links[0] == prev { links[1] } else { links[0] };
            prev = next;
            next = step;
        }
        next
    }

    /// Finishes the diagram; panics if the rotation system is not planar.
    pub fn build(self) -> PlaneDiagram {
        self.try_build().expect("builder produced an invalid diagram")
    }

    pub fn try_build(self) -> Result<PlaneDiagram, DiagramError> {
        let n = self.slot_link.len();
        let mut arc_of = vec![[usize::MAX; 4]; n];
        let mut seen = vec![false; self.point_links.len()];
        let mut arcs = 0;
        for c in 0..n {
            for s in 0..4u8 {
                if arc_of[c][s as usize] != usize::MAX {
                    continue;
                }
                let first = self.slot_link[c][s as usize].expect("unlinked slot");
                let end = self.walk(Junction::Slot(c, s), first, &mut seen);
                let Junction::Slot(c2, s2) = end else { unreachable!() };
                arc_of[c][s as usize] = arcs;
                arc_of[c2][s2 as usize] = arcs;
                arcs += 1;
            }
        }
        let mut circles = self.free_circles;
        for p in 0..self.point_links.len() {
            if seen[p] {
                continue;
            }
            seen[p] = true;
            let links = &self.point_links[p];
            assert_eq!(links.len(), 2, "point {p} is not on a strand");
            let end = self.walk(Junction::Point(p), links[0], &mut seen);
            debug_assert_eq!(end, Junction::Point(p));
            circles += 1;
        }
        let crossings: Vec<[ArcId; 4]> = arc_of;
        PlaneDiagram::from_slots(crossings, circles)
    }
}
