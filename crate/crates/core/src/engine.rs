//! The reduction driver: a work queue of vertices of graph degree at most
//! two, rule dispatch, verdict aggregation and the treewidth-2 recognizer.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::diagram::PlaneDiagram;
use crate::gkd::{GeneralizedDiagram, VertexId, Violation};
use crate::oracle::{normalized_invariant, LaurentPoly};
use crate::rules::{apply_at, matching_rule, Effect, Move, RuleError, RuleId, Terminal};

/// Expanded crossing count up to which debug mode oracle-checks every step.
pub const DEBUG_ORACLE_CROSSINGS: usize = 12;

/// What a part of the input turned out to be, for composite verdicts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    /// Unknotted, unlinked circles split off or present from the start.
    Circles(usize),
    KnottedSummand,
    Linked,
    Torus(u32),
    /// Vertices left unexamined after the run stopped early.
    NotExamined(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Unknot,
    Unlink(usize),
    NontrivialKnot,
    NontrivialLink,
    TorusKnot(u32),
    TorusLink(u32),
    /// A nontrivial part was found in an input with more components than
    /// that part accounts for.
    Composite(Vec<Part>),
    /// No vertex of graph degree at most two remains; `residual` is the
    /// number of vertices left.
    TreewidthExceeded { residual: usize },
}

impl Verdict {
    pub fn is_unknot(&self) -> bool {
        *self == Verdict::Unknot
    }

    /// True for the unknot and for every unlink.
    pub fn is_unlink(&self) -> bool {
        matches!(self, Verdict::Unknot | Verdict::Unlink(_))
    }

    /// Whether the run reached a decision.
    pub fn is_decided(&self) -> bool {
        !matches!(self, Verdict::TreewidthExceeded { .. })
    }

    /// Short lower-case label, e.g. `unknot`, `unlink(3)`, `torus_knot(5)`.
    pub fn label(&self) -> String {
        match self {
            Verdict::Unknot => "unknot".into(),
            Verdict::Unlink(k) => format!("unlink({k})"),
            Verdict::NontrivialKnot => "nontrivial_knot".into(),
            Verdict::NontrivialLink => "nontrivial_link".into(),
            Verdict::TorusKnot(m) => format!("torus_knot({m})"),
            Verdict::TorusLink(m) => format!("torus_link({m})"),
            Verdict::Composite(_) => "composite".into(),
            Verdict::TreewidthExceeded { .. } => "treewidth_exceeded".into(),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub moves: Vec<Move>,
    pub counted_total: usize,
}

impl Trace {
    fn extend(&mut self, moves: Vec<Move>) {
        self.counted_total += moves.iter().filter(|m| m.counted).count();
        self.moves.extend(moves);
    }
}

#[derive(Debug, Clone, Default)]
pub struct ReduceOptions {
    /// Pop queue entries in a random order drawn from this seed instead
    /// of first-in first-out.
    pub shuffle_seed: Option<u64>,
    /// Re-validate the diagram after every rule and oracle-check small
    /// expansions.
    pub debug_validate: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RunStats {
    pub n: usize,
    pub components: usize,
    pub rules_fired: BTreeMap<RuleId, usize>,
    pub cases_fired: BTreeMap<String, usize>,
    pub counted_moves: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl RunStats {
    fn record_cases(&mut self, cases: BTreeMap<(RuleId, &'static str), usize>) {
        self.cases_fired = cases
            .into_iter()
            .map(|((r, c), k)| (format!("{r}.{c}"), k))
            .collect();
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("rule application failed: {0}")]
    Rule(#[from] RuleError),
    #[error("vertex {0} has graph degree at most two but no rule matches")]
    Unmatched(VertexId),
    #[error("invariant violated after step {step} ({rule}): {violations:?}")]
    Invalid {
        step: usize,
        rule: RuleId,
        violations: Vec<Violation>,
    },
    #[error("step {step} ({rule} {case}) changed the expansion: {detail}")]
    NotPreserved {
        step: usize,
        rule: RuleId,
        case: &'static str,
        detail: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub verdict: Verdict,
    pub trace: Trace,
    pub stats: RunStats,
}

struct WorkQueue {
    items: VecDeque<VertexId>,
    rng: Option<ChaCha8Rng>,
}

impl WorkQueue {
    fn pop(&mut self) -> Option<VertexId> {
        match &mut self.rng {
            None => self.items.pop_front(),
            Some(rng) => {
                if self.items.is_empty() {
                    return None;
                }
                let i = rng.gen_range(0..self.items.len());
                self.items.swap_remove_back(i)
            }
        }
    }
}

fn signature(g: &GeneralizedDiagram) -> Option<(usize, usize, LaurentPoly)> {
    let d = g.expand().ok()?;
    let n = normalized_invariant(&d).ok()?;
    Some((d.crossing_count(), d.components(), n))
}

/// Runs the rules to exhaustion (or to the first terminal verdict) and
/// classifies what is left. `stats.elapsed` is not set here.
pub fn reduce(
    g: &mut GeneralizedDiagram,
    options: &ReduceOptions,
) -> Result<(Verdict, Trace, RunStats), EngineError> {
    let components = g.input_components();
    let mut stats = RunStats {
        n: g.crossing_total(),
        components,
        ..RunStats::default()
    };
    let mut trace = Trace::default();
    let mut queue = WorkQueue {
        items: g.vertex_ids().filter(|&v| g.graph_degree(v) <= 2).collect(),
        rng: options.shuffle_seed.map(ChaCha8Rng::seed_from_u64),
    };
    let mut step = 0;
    let mut cases: BTreeMap<(RuleId, &'static str), usize> = BTreeMap::new();
    while let Some(v) = queue.pop() {
        if g.vertex(v).is_none() || g.graph_degree(v) > 2 {
            continue;
        }
        let Some(rule) = matching_rule(g, v) else {
            return Err(EngineError::Unmatched(v));
        };
        let before = if options.debug_validate && g.crossing_total() <= DEBUG_ORACLE_CROSSINGS {
            signature(g)
        } else {
            None
        };
        let out = apply_at(g, v)?;
        debug_assert_eq!(out.rule, rule);
        step += 1;
        *stats.rules_fired.entry(out.rule).or_default() += 1;
        *cases.entry((out.rule, out.case)).or_default() += 1;
        let effect = out.effect;
        if options.debug_validate && !matches!(effect, Effect::Terminal(_)) {
            check_step(g, step, &out, before)?;
        }
        trace.extend(out.moves);
        match effect {
            Effect::Terminal(t) => {
                stats.counted_moves = trace.counted_total;
                stats.record_cases(cases);
                return Ok((terminal_verdict(g, t, components), trace, stats));
            }
            Effect::Reduced | Effect::CircleSplitOff(_) => {
                for u in out.touched {
                    if g.vertex(u).is_some() && g.graph_degree(u) <= 2 {
                        queue.items.push_back(u);
                    }
                }
            }
        }
    }
    stats.counted_moves = trace.counted_total;
    stats.record_cases(cases);
    if !g.is_graph_empty() {
        let residual = g.vertex_count();
        return Ok((Verdict::TreewidthExceeded { residual }, trace, stats));
    }
    let verdict = match g.split_circles + g.free_circles {
        1 => Verdict::Unknot,
        k => Verdict::Unlink(k),
    };
    Ok((verdict, trace, stats))
}

fn check_step(
    g: &GeneralizedDiagram,
    step: usize,
    out: &crate::rules::RuleOutcome,
    before: Option<(usize, usize, LaurentPoly)>,
) -> Result<(), EngineError> {
    let violations = g.validate();
    if !violations.is_empty() {
        return Err(EngineError::Invalid {
            step,
            rule: out.rule,
            violations,
        });
    }
    let fail = |detail: String| EngineError::NotPreserved {
        step,
        rule: out.rule,
        case: out.case,
        detail,
    };
    let expanded = g.expand().map_err(|e| fail(e.to_string()))?;
    let last = out.moves.last().map(|m| m.crossings_after);
    if last != Some(expanded.crossing_count()) {
        return Err(fail(format!(
            "trace ends at {last:?} crossings, expansion has {}",
            expanded.crossing_count()
        )));
    }
    if let Some((_, comps, inv)) = before {
        let after = normalized_invariant(&expanded).map_err(|e| fail(e.to_string()))?;
        if comps != expanded.components() || inv != after {
            return Err(fail(format!(
                "{comps} components, {inv} before; {} components, {after} after",
                expanded.components()
            )));
        }
    }
    Ok(())
}

fn terminal_verdict(g: &GeneralizedDiagram, t: Terminal, components: usize) -> Verdict {
    let (part, alone) = match t {
        Terminal::NontrivialLink => return Verdict::NontrivialLink,
        Terminal::NontrivialKnot => (Part::KnottedSummand, Verdict::NontrivialKnot),
        Terminal::Torus(m) if m % 2 == 1 => (Part::Torus(m), Verdict::TorusKnot(m)),
        Terminal::Torus(m) => (Part::Torus(m), Verdict::TorusLink(m)),
    };
    let accounted = match t {
        Terminal::Torus(m) if m % 2 == 0 => 2,
        _ => 1,
    };
    if components == accounted {
        return alone;
    }
    let mut parts = Vec::new();
    let circles = g.split_circles + g.free_circles;
    if circles > 0 {
        parts.push(Part::Circles(circles));
    }
    parts.push(part);
    if !g.is_graph_empty() {
        parts.push(Part::NotExamined(g.vertex_count()));
    }
    Verdict::Composite(parts)
}

/// Full pipeline on a plane diagram with default options.
pub fn classify(d: &PlaneDiagram) -> Classification {
    classify_with(d, &ReduceOptions::default()).expect("reduction failed on a valid diagram")
}

pub fn classify_with(
    d: &PlaneDiagram,
    options: &ReduceOptions,
) -> Result<Classification, EngineError> {
    let start = Instant::now();
    let mut g = GeneralizedDiagram::from_plane_diagram(d);
    let (verdict, trace, mut stats) = reduce(&mut g, options)?;
    stats.elapsed = start.elapsed();
    Ok(Classification {
        verdict,
        trace,
        stats,
    })
}

/// Whether a simple graph (adjacency lists) has treewidth at most two:
/// repeatedly delete vertices of degree at most one and contract vertices
/// of degree two into an edge between their neighbours, merging parallel
/// edges. The graph has treewidth at most two iff this empties it.
pub fn is_treewidth_le2(adj: &[Vec<usize>]) -> bool {
    let mut sets: Vec<HashSet<usize>> = adj
        .iter()
        .enumerate()
        .map(|(v, ns)| ns.iter().copied().filter(|&u| u != v).collect())
        .collect();
    let mut alive = vec![true; sets.len()];
    let mut remaining = sets.len();
    let mut queue: Vec<usize> = (0..sets.len()).filter(|&v| sets[v].len() <= 2).collect();
    while let Some(v) = queue.pop() {
        if !alive[v] || sets[v].len() > 2 {
            continue;
        }
        alive[v] = false;
        remaining -= 1;
        let ns: Vec<usize> = sets[v].drain().collect();
        for &u in &ns {
            sets[u].remove(&v);
        }
        if let [a, b] = ns[..] {
            sets[a].insert(b);
            sets[b].insert(a);
        }
        for u in ns {
            if sets[u].len() <= 2 {
                queue.push(u);
            }
        }
    }
    remaining == 0
}
