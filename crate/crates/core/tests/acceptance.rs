//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any failed.
//!
//! Ground truth never comes from the reducer itself: generated instances
//! carry their template's classification, and single rule applications
//! are judged by the exponential-time bracket oracle.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use tw2knot::diagram::Side;
use tw2knot::engine::{is_treewidth_le2, reduce};
use tw2knot::generator::{apply_twist, generate, GenConfig, MoveMix, Template};
use tw2knot::gkd::{double_kind, Edge, EdgeKind, EdgeList, Vertex, VertexKind};
use tw2knot::oracle::{equivalent_invariants, normalized_invariant, torus_reference, LaurentPoly};
use tw2knot::rules::{apply_at, matching_rule, Effect, Terminal};
use tw2knot::{
    classify_with, parse_pd, serialize_pd, Classification, GeneralizedDiagram, PlaneDiagram,
    ReduceOptions, Verdict,
};

const KINK: &str = "X(1,2,2,1)";
const TREFOIL: &str = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)";
const HOPF: &str = "X(1,3,2,4) X(3,1,4,2)";
const FIGURE_EIGHT: &str = "X(4,2,5,1) X(8,6,1,5) X(6,3,7,4) X(2,7,3,8)";
const POKED: &str = "X(1,3,2,4) X(2,3,1,4)";
const DOUBLE_KINK: &str = "X(1,4,2,1) X(3,2,4,3)";

/// The octahedron: four crossings on an equator, one inside and one
/// outside, each joined to all four. Its graph is 4-regular and simple,
/// so it contains K4 as a minor. Each rotation choice moves the over-strand.
fn octahedron(rot: u32) -> PlaneDiagram {
    let rows: [[u32; 4]; 6] = [
        [9, 1, 5, 4],
        [10, 2, 6, 1],
        [11, 3, 7, 2],
        [12, 4, 8, 3],
        [5, 6, 7, 8],
        [12, 11, 10, 9],
    ];
    let text: Vec<String> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let k = (rot >> i & 1) as usize;
            let s: Vec<String> = (0..4).map(|j| r[(j + k) % 4].to_string()).collect();
            format!("X({})", s.join(","))
        })
        .collect();
    parse_pd(&text.join(" ")).expect("octahedron PD is valid")
}

struct Instance {
    template: Template,
    diagram: PlaneDiagram,
    truth: Verdict,
    result: Classification,
}

fn decision(v: &Verdict) -> (bool, bool) {
    (v.is_unknot(), v.is_unlink())
}

fn build_corpus() -> Vec<Instance> {
    let mut cfgs = Vec::new();
    for seed in 1..=500u64 {
        cfgs.push(GenConfig::new(seed, 10 + (seed as usize % 51), Template::Circle));
    }
    for seed in 1..=200u64 {
        let k = 1 + seed as usize % 4;
        cfgs.push(GenConfig::new(seed, 10 + (seed as usize * 7 % 51), Template::Unlink(k)));
    }
    for seed in 1..=200u64 {
        let m = 2 + seed as usize % 6;
        cfgs.push(GenConfig::new(seed, 10 + (seed as usize * 13 % 51), Template::Torus(m)));
    }
    cfgs.par_iter()
        .map(|cfg| {
            let g = generate(cfg).expect("valid configuration");
            let result = classify_with(&g.diagram, &ReduceOptions::default())
                .unwrap_or_else(|e| panic!("seed {} {}: {e}", cfg.seed, cfg.template));
            Instance {
                template: cfg.template,
                diagram: g.diagram,
                truth: g.ground_truth,
                result,
            }
        })
        .collect()
}

fn criterion1(corpus: &[Instance], elapsed: Duration) -> Result<String, String> {
    let mut bad = Vec::new();
    let mut tally = BTreeMap::<&str, usize>::new();
    for inst in corpus {
        let v = &inst.result.verdict;
        let (kind, ok) = match inst.template {
            Template::Circle => ("circle", *v == Verdict::Unknot),
            Template::Unlink(_) => ("unlink", *v == inst.truth),
            Template::Torus(_) => ("torus", !v.is_unlink()),
        };
        *tally.entry(kind).or_default() += 1;
        if !ok {
            bad.push(format!("{} n={} -> {v}", inst.template, inst.diagram.crossing_count()));
        }
    }
    let detail = format!(
        "{} circle, {} unlink, {} torus instances; {} misclassified; {:.2} s",
        tally["circle"],
        tally["unlink"],
        tally["torus"],
        bad.len(),
        elapsed.as_secs_f64()
    );
    if bad.is_empty() && elapsed < Duration::from_secs(30) {
        Ok(detail)
    } else {
        Err(format!("{detail}; first failures: {:?}", &bad[..bad.len().min(5)]))
    }
}

fn criterion2(corpus: &[Instance]) -> Result<String, String> {
    let checked: Vec<Result<usize, String>> = corpus
        .par_iter()
        .filter(|i| i.result.verdict.is_unlink())
        .map(|inst| {
            let n = inst.diagram.crossing_count();
            let trace = &inst.result.trace;
            let name = format!("{} n={n}", inst.template);
            if trace.counted_total > n {
                return Err(format!("{name}: {} counted moves", trace.counted_total));
            }
            let mut current = n;
            for (k, m) in trace.moves.iter().enumerate() {
                let ok = m.crossings_before == current
                    && if m.counted {
                        m.crossings_after < m.crossings_before
                    } else {
                        m.crossings_after == m.crossings_before
                    };
                if !ok {
                    return Err(format!("{name}: move {k} {m:?} at running count {current}"));
                }
                current = m.crossings_after;
            }
            if current != 0 {
                return Err(format!("{name}: trace ends at {current} crossings"));
            }
            // Replay with the expansion recomputed and validated after
            // every rule application.
            let opts = ReduceOptions {
                shuffle_seed: None,
                debug_validate: true,
            };
            match classify_with(&inst.diagram, &opts) {
                Ok(c) if c.trace == *trace => Ok(trace.counted_total),
                Ok(_) => Err(format!("{name}: replay produced a different trace")),
                Err(e) => Err(format!("{name}: replay: {e}")),
            }
        })
        .collect();
    let errors: Vec<&String> = checked.iter().filter_map(|r| r.as_ref().err()).collect();
    let moves: usize = checked.iter().filter_map(|r| r.as_ref().ok()).sum();
    let detail = format!(
        "{} unknot/unlink traces replayed, {moves} counted moves, {} violations",
        checked.len(),
        errors.len()
    );
    if errors.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {:?}", &errors[..errors.len().min(5)]))
    }
}

fn vx(edges: &[usize]) -> Vertex {
    Vertex {
        kind: VertexKind::Smooth,
        edges: EdgeList::from_slice(edges),
    }
}

fn ed(a: usize, b: usize, kind: EdgeKind) -> Edge {
    Edge { ends: [a, b], kind }
}

fn single(a: usize, b: usize) -> Edge {
    ed(a, b, EdgeKind::Single)
}

struct Fixture {
    label: String,
    source: String,
    g: GeneralizedDiagram,
    at: usize,
}

/// Hand-built diagrams for patterns that do not arise directly from
/// converted plane diagrams.
fn hand_fixtures() -> Vec<(String, GeneralizedDiagram, usize)> {
    let mut out = Vec::new();
    let mut add = |name: String, r: Result<GeneralizedDiagram, _>, at: usize| {
        if let Ok(g) = r {
            out.push((name, g, at));
        }
    };
    for i in [0i64, 3, -2] {
        add(
            format!("cap-cap({i})"),
            GeneralizedDiagram::from_parts(vec![vx(&[0]), vx(&[0])], vec![ed(0, 1, double_kind(i))]),
            0,
        );
    }
    add(
        "cap on three-edge double vertex".into(),
        GeneralizedDiagram::from_parts(
            vec![vx(&[0]), vx(&[0, 1, 2]), vx(&[1, 3]), vx(&[3, 2])],
            vec![ed(0, 1, double_kind(3)), single(1, 2), single(1, 3), single(2, 3)],
        ),
        0,
    );
    add(
        "cap on two-edge double vertex".into(),
        GeneralizedDiagram::from_parts(
            vec![vx(&[0]), vx(&[0, 1]), vx(&[1])],
            vec![ed(0, 1, double_kind(2)), ed(1, 2, double_kind(-1))],
        ),
        0,
    );
    for (i, j) in [(3, -2), (3, 2), (-1, -4), (2, -2)] {
        add(
            format!("double path ({i},{j})"),
            GeneralizedDiagram::from_parts(
                vec![vx(&[0]), vx(&[0, 1]), vx(&[1])],
                vec![ed(0, 1, double_kind(i)), ed(1, 2, double_kind(j))],
            ),
            1,
        );
    }
    for (i, j, k) in [(1, 1, 1), (1, -1, 1), (2, -1, -1), (2, 1, 1)] {
        add(
            format!("triangle ({i},{j},{k})"),
            GeneralizedDiagram::from_parts(
                vec![vx(&[0, 1]), vx(&[2, 0]), vx(&[1, 2])],
                vec![
                    ed(0, 1, double_kind(i)),
                    ed(0, 2, double_kind(j)),
                    ed(1, 2, double_kind(k)),
                ],
            ),
            0,
        );
    }
    // Subdivision 0 between the two ends of an i-twist double edge,
    // with a second path through subdivision 3; every port arrangement
    // that embeds is kept.
    for i in [0i64, 1, -1, 2, 3, -3, 4] {
        for (wl, xl) in [([2, 0, 3], [2, 1, 4]), ([2, 3, 0], [2, 1, 4]), ([2, 0, 3], [2, 4, 1]), ([2, 3, 0], [2, 4, 1])] {
            add(
                format!("clasp i={i} w={wl:?} x={xl:?}"),
                GeneralizedDiagram::from_parts(
                    vec![vx(&[0, 1]), vx(&wl), vx(&xl), vx(&[3, 4])],
                    vec![single(0, 1), single(0, 2), ed(1, 2, double_kind(i)), single(1, 3), single(3, 2)],
                ),
                0,
            );
        }
    }
    out
}

const REQUIRED_CASES: [&str; 22] = [
    "rule1.cap",
    "rule1.double_three",
    "rule1.double_two",
    "rule2.contract",
    "rule3.case1",
    "rule3.case2",
    "rule3.case3",
    "rule3.case4",
    "rule3.case5",
    "rule3.case6",
    "rule3.case7",
    "rule4.case1",
    "rule4.case2",
    "rule4.case3",
    "rule4.case4",
    "rule5.agree",
    "rule5.disagree",
    "rule6",
    "rule7.m0",
    "rule7.m1",
    "rule7.odd",
    "rule7.even",
];

/// Coverage key: Rule 6 counts as one case whatever its final step does.
fn coverage_key(label: &str) -> String {
    if label.starts_with("rule6.") {
        "rule6".into()
    } else {
        label.to_string()
    }
}

const MAX_FIXTURE_CROSSINGS: usize = 14;

/// Runs the rules in a seeded random order and keeps the state before the
/// first application of each not-yet-seen case.
fn harvest(
    source: &str,
    g0: &GeneralizedDiagram,
    seed: u64,
    found: &mut BTreeMap<String, Fixture>,
) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = g0.clone();
    loop {
        let mut cand: Vec<usize> = g.vertex_ids().filter(|&v| matching_rule(&g, v).is_some()).collect();
        if cand.is_empty() {
            return;
        }
        cand.shuffle(&mut rng);
        let before = g.clone();
        let Ok(out) = apply_at(&mut g, cand[0]) else {
            return;
        };
        let label = format!("{}.{}", out.rule, out.case);
        if before.crossing_total() <= MAX_FIXTURE_CROSSINGS && !found.contains_key(&label) {
            found.insert(
                label.clone(),
                Fixture {
                    label,
                    source: source.to_string(),
                    g: before,
                    at: cand[0],
                },
            );
        }
        if matches!(out.effect, Effect::Terminal(_)) {
            return;
        }
    }
}

fn signature(g: &GeneralizedDiagram) -> Result<(usize, LaurentPoly), String> {
    let d = g.expand().map_err(|e| e.to_string())?;
    let inv = normalized_invariant(&d).map_err(|e| e.to_string())?;
    Ok((d.components(), inv))
}

fn unlink_invariant(k: usize) -> LaurentPoly {
    LaurentPoly::delta().pow(k.saturating_sub(1) as u32)
}

fn check_fixture(f: &Fixture) -> Result<(), String> {
    let before = signature(&f.g)?;
    let crossings = f.g.crossing_total();
    let mut g = f.g.clone();
    let out = apply_at(&mut g, f.at).map_err(|e| e.to_string())?;
    let label = format!("{}.{}", out.rule, out.case);
    if label != f.label {
        return Err(format!("expected {}, applied {label}", f.label));
    }
    match out.effect {
        Effect::Terminal(t) => {
            // Terminal outcomes leave the diagram as it was; the claimed
            // class must agree with the oracle.
            if signature(&g)? != before {
                return Err("terminal rule modified the diagram".into());
            }
            if before.1 == unlink_invariant(before.0) {
                return Err(format!("{t:?} reported, oracle cannot tell it from an unlink"));
            }
            if let Terminal::Torus(m) = t {
                let d = f.g.expand().map_err(|e| e.to_string())?;
                if d.components() == if m % 2 == 0 { 2 } else { 1 }
                    && !equivalent_invariants(&d, &torus_reference(m as usize), true).map_err(|e| e.to_string())?
                {
                    return Err(format!("not the ({m},2) torus class"));
                }
            }
        }
        _ => {
            let violations = g.validate();
            if !violations.is_empty() {
                return Err(format!("invalid after rule: {violations:?}"));
            }
            let after = signature(&g)?;
            if after != before {
                return Err(format!("expansion changed: {before:?} -> {after:?}"));
            }
            let removed: usize = out.moves.iter().map(|m| m.crossings_before - m.crossings_after).sum();
            let now = g.expand().map_err(|e| e.to_string())?.crossing_count();
            if now + removed != crossings {
                return Err(format!("{crossings} crossings, moves remove {removed}, {now} left"));
            }
        }
    }
    Ok(())
}

fn criterion3() -> Result<String, String> {
    let mut found = BTreeMap::new();
    for (name, g, at) in hand_fixtures() {
        let mut probe = g.clone();
        if let Ok(out) = apply_at(&mut probe, at) {
            let label = format!("{}.{}", out.rule, out.case);
            found.entry(label.clone()).or_insert(Fixture {
                label,
                source: name,
                g,
                at,
            });
        }
    }
    let mut sources: Vec<(String, PlaneDiagram)> = [KINK, TREFOIL, HOPF, FIGURE_EIGHT, POKED, DOUBLE_KINK]
        .iter()
        .map(|s| (s.to_string(), parse_pd(s).unwrap()))
        .collect();
    for seed in 1..=150u64 {
        let template = match seed % 3 {
            0 => Template::Circle,
            1 => Template::Unlink(2),
            _ => Template::Torus(2 + seed as usize % 4),
        };
        let cfg = GenConfig::new(seed, 4 + seed as usize % 9, template);
        sources.push((format!("{template} seed {seed}"), generate(&cfg).unwrap().diagram));
    }
    for (name, d) in &sources {
        let g = GeneralizedDiagram::from_plane_diagram(d);
        for seed in 0..8 {
            harvest(name, &g, seed, &mut found);
        }
    }
    let covered: BTreeSet<String> = found.keys().map(|k| coverage_key(k)).collect();
    let missing: Vec<&str> = REQUIRED_CASES.iter().copied().filter(|c| !covered.contains(*c)).collect();
    let failures: Vec<String> = found
        .values()
        .filter_map(|f| check_fixture(f).err().map(|e| format!("{} [{}]: {e}", f.label, f.source)))
        .collect();
    let largest = found.values().map(|f| f.g.crossing_total()).max().unwrap_or(0);
    let detail = format!(
        "{} fixtures (at most {largest} expanded crossings), {} of {} required cases covered, {} not preserved",
        found.len(),
        REQUIRED_CASES.len() - missing.len(),
        REQUIRED_CASES.len(),
        failures.len()
    );
    if missing.is_empty() && failures.is_empty() && found.len() >= 18 {
        Ok(detail)
    } else {
        Err(format!("{detail}; missing {missing:?}; {failures:?}"))
    }
}

fn criterion4() -> Result<String, String> {
    let mut triples = Vec::new();
    for i in 0..=12i64 {
        for j in 0..=12 - i {
            for k in 0..=12 - i - j {
                for s in [(1, 1, 1), (1, 1, -1), (1, -1, 1), (-1, 1, 1)] {
                    triples.push((i * s.0, j * s.1, k * s.2));
                }
            }
        }
    }
    let failures: Vec<String> = triples
        .par_iter()
        .filter_map(|&(i, j, k)| {
            let check = || -> Result<(), String> {
                let g = GeneralizedDiagram::from_parts(
                    vec![vx(&[0, 1]), vx(&[2, 0]), vx(&[1, 2])],
                    vec![ed(0, 1, double_kind(i)), ed(0, 2, double_kind(j)), ed(1, 2, double_kind(k))],
                )
                .map_err(|e| e.to_string())?;
                let d = g.expand().map_err(|e| e.to_string())?;
                let inv = normalized_invariant(&d).map_err(|e| e.to_string())?;
                let mut h = g.clone();
                let out = apply_at(&mut h, 0).map_err(|e| e.to_string())?;
                let ok = match out.effect {
                    Effect::CircleSplitOff(2) => d.components() == 2 && inv == LaurentPoly::delta(),
                    Effect::CircleSplitOff(1) => d.components() == 1 && inv == LaurentPoly::one(),
                    Effect::Terminal(Terminal::Torus(m)) if m >= 2 => {
                        equivalent_invariants(&d, &torus_reference(m as usize), true).map_err(|e| e.to_string())?
                    }
                    _ => false,
                };
                if ok {
                    Ok(())
                } else {
                    Err(format!("{:?} but oracle has {} components, invariant {inv}", out.effect, d.components()))
                }
            };
            check().err().map(|e| format!("({i},{j},{k}): {e}"))
        })
        .collect();
    let detail = format!("{} signed triangles, {} mismatches", triples.len(), failures.len());
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {:?}", &failures[..failures.len().min(5)]))
    }
}

fn criterion5() -> Result<String, String> {
    let mut inputs: Vec<(String, PlaneDiagram)> = [KINK, TREFOIL, HOPF, FIGURE_EIGHT, POKED, DOUBLE_KINK, "O O O"]
        .iter()
        .map(|s| (s.to_string(), parse_pd(s).unwrap()))
        .collect();
    let trefoil = parse_pd(TREFOIL).unwrap();
    inputs.push(("trefoil + circle".into(), trefoil.disjoint_union(&PlaneDiagram::unknot())));
    inputs.push(("trefoil + kink".into(), trefoil.disjoint_union(&parse_pd(KINK).unwrap())));
    let mut seed = 1u64;
    while inputs.len() < 50 {
        let template = match seed % 4 {
            0 => Template::Circle,
            1 => Template::Unlink(2 + seed as usize % 2),
            2 => Template::Torus(2 + seed as usize % 5),
            _ => Template::Torus(1),
        };
        let cfg = GenConfig::new(seed, 20 + seed as usize % 40, template);
        inputs.push((format!("{template} seed {seed}"), generate(&cfg).unwrap().diagram));
        seed += 1;
    }
    let failures: Vec<String> = inputs
        .par_iter()
        .filter_map(|(name, d)| {
            let reference = decision(&classify_with(d, &ReduceOptions::default()).ok()?.verdict);
            for s in 0..20u64 {
                let opts = ReduceOptions {
                    shuffle_seed: Some(s * 7919 + 1),
                    debug_validate: false,
                };
                match classify_with(d, &opts) {
                    Ok(c) if decision(&c.verdict) == reference => {}
                    Ok(c) => return Some(format!("{name}: order {s} gave {}", c.verdict)),
                    Err(e) => return Some(format!("{name}: order {s}: {e}")),
                }
            }
            None
        })
        .collect();
    let detail = format!("{} inputs x 20 orders, {} disagreements", inputs.len(), failures.len());
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {failures:?}"))
    }
}

fn criterion6() -> Result<String, String> {
    let mut rows = Vec::new();
    for n in [10_000usize, 100_000, 1_000_000] {
        let cfg = GenConfig {
            move_mix: MoveMix::twist_only(),
            ..GenConfig::new(n as u64, n, Template::Circle)
        };
        let g = generate(&cfg).map_err(|e| e.to_string())?;
        let mut best = Duration::MAX;
        for _ in 0..3 {
            let start = Instant::now();
            let c = classify_with(&g.diagram, &ReduceOptions::default()).map_err(|e| e.to_string())?;
            best = best.min(start.elapsed());
            if c.verdict != Verdict::Unknot {
                return Err(format!("n={n}: {}", c.verdict));
            }
        }
        rows.push((g.diagram.crossing_count(), best));
    }
    let per = |(n, t): (usize, Duration)| t.as_secs_f64() * 1e9 / n as f64;
    let ratio = per(rows[2]) / per(rows[0]);
    let table: Vec<String> = rows
        .iter()
        .map(|&r| format!("n={} {:.1} ms ({:.0} ns/crossing)", r.0, r.1.as_secs_f64() * 1e3, per(r)))
        .collect();
    let detail = format!("{}; ratio 10^6/10^4 = {ratio:.2}", table.join(", "));
    if ratio <= 3.0 && rows[2].1 < Duration::from_secs(10) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn min_degree(adj: &[Vec<usize>]) -> usize {
    adj.iter().map(Vec::len).min().unwrap_or(0)
}

fn criterion7(corpus: &[Instance]) -> Result<String, String> {
    let mut errors = Vec::new();
    let mut within = 0;
    for inst in corpus {
        let g = GeneralizedDiagram::from_plane_diagram(&inst.diagram);
        if is_treewidth_le2(&g.simple_graph()) {
            within += 1;
            if !inst.result.verdict.is_decided() {
                errors.push(format!("{} n={}: stuck", inst.template, inst.diagram.crossing_count()));
            }
        }
    }
    let mut hard: Vec<(String, PlaneDiagram)> = (0..64).map(|r| (format!("octahedron {r}"), octahedron(r))).collect();
    for r in [0, 21, 42, 63] {
        let base = octahedron(r);
        let mut d = base.clone();
        for arc in [0, 3, 7] {
            d = apply_twist(&d, Side::Arc { arc, from: 0 }, arc % 2 == 0).map_err(|e| e.to_string())?;
        }
        hard.push((format!("octahedron {r} with kinks"), d));
    }
    for (name, d) in &hard {
        let mut g = GeneralizedDiagram::from_plane_diagram(d);
        if is_treewidth_le2(&g.simple_graph()) {
            errors.push(format!("{name}: passes the treewidth test"));
            continue;
        }
        match reduce(&mut g, &ReduceOptions::default()) {
            Ok((Verdict::TreewidthExceeded { residual }, _, _)) => {
                let adj = g.simple_graph();
                if residual != adj.len() || min_degree(&adj) < 3 {
                    errors.push(format!("{name}: residual {residual}, min degree {}", min_degree(&adj)));
                }
            }
            Ok((v, _, _)) => errors.push(format!("{name}: {v}")),
            Err(e) => errors.push(format!("{name}: {e}")),
        }
    }
    let detail = format!(
        "{within} treewidth-2 inputs all decided; {} K4-minor diagrams stuck with residual min degree >= 3; {} errors",
        hard.len(),
        errors.len()
    );
    if errors.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {:?}", &errors[..errors.len().min(5)]))
    }
}

fn criterion8() -> Result<String, String> {
    let run = |s: &str| classify_with(&parse_pd(s).unwrap(), &ReduceOptions::default()).map_err(|e| e.to_string());
    let kink = run(KINK)?;
    let trefoil = run(TREFOIL)?;
    let hopf = run(HOPF)?;
    let circles = run("O O O")?;
    let checks = [
        ("kink", kink.verdict == Verdict::Unknot && kink.trace.counted_total == 1),
        ("trefoil", !trefoil.verdict.is_unknot()),
        ("hopf", !hopf.verdict.is_unlink() && hopf.stats.components == 2),
        ("O O O", circles.verdict == Verdict::Unlink(3)),
    ];
    let detail = format!(
        "kink {} ({} moves), trefoil {}, hopf {} ({} components), O O O {}",
        kink.verdict, kink.trace.counted_total, trefoil.verdict, hopf.verdict, hopf.stats.components, circles.verdict
    );
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    if failed.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; failed {failed:?}"))
    }
}

fn criterion9(corpus: &[Instance]) -> Result<String, String> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let mut texts = Vec::new();
    for entry in fs::read_dir(&dir).map_err(|e| format!("{}: {e}", dir.display()))? {
        let path = entry.map_err(|e| e.to_string())?.path();
        if path.extension().is_some_and(|x| x == "pd") {
            texts.push((path.display().to_string(), fs::read_to_string(&path).map_err(|e| e.to_string())?));
        }
    }
    let files = texts.len();
    texts.extend(corpus.iter().map(|i| (format!("generated {}", i.template), serialize_pd(&i.diagram))));
    let failures: Vec<String> = texts
        .par_iter()
        .filter_map(|(name, text)| {
            let d = match parse_pd(text) {
                Ok(d) => d,
                Err(e) => return Some(format!("{name}: {e}")),
            };
            match parse_pd(&serialize_pd(&d)) {
                Ok(back) if back.is_isomorphic(&d) => None,
                Ok(_) => Some(format!("{name}: not isomorphic after round trip")),
                Err(e) => Some(format!("{name}: reparse: {e}")),
            }
        })
        .collect();
    let detail = format!("{files} corpus files + {} generated diagrams, {} failures", corpus.len(), failures.len());
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {failures:?}"))
    }
}

fn run(number: usize, name: &str, f: impl FnOnce() -> Result<String, String>) -> bool {
    let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    match &outcome {
        Ok(d) => println!("criterion {number} ({name}): PASS - {d}"),
        Err(d) => println!("criterion {number} ({name}): FAIL - {d}"),
    }
    outcome.is_ok()
}

fn main() -> ExitCode {
    let start = Instant::now();
    let corpus = build_corpus();
    let corpus_time = start.elapsed();
    let results = [
        run(1, "generated ground truth", || criterion1(&corpus, corpus_time)),
        run(2, "move bound", || criterion2(&corpus)),
        run(3, "rule safety", criterion3),
        run(4, "triangle arithmetic", criterion4),
        run(5, "queue order", criterion5),
        run(6, "linear time", criterion6),
        run(7, "treewidth guard", || criterion7(&corpus)),
        run(8, "named fixtures", criterion8),
        run(9, "format round trip", || criterion9(&corpus)),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
