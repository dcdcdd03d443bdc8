//! Seeded property harness.
//!
//! Each property draws its cases from a per-case derived seed, so cases run
//! in parallel and the report does not depend on scheduling. The first
//! failing case of a property is shrunk greedily: unmarked vertices and the
//! highest mark are dropped, turns and lengths are rounded to small
//! denominators, and each candidate is kept only if the property still fails.

use std::collections::BTreeSet;

use metric_moduli::generate;
use metric_moduli::moduli_space::{eps_close_tol, in_neighborhood_by, NeighborSample};
use metric_moduli::rational::{frac, half, int, rational, Rational};
use metric_moduli::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

#[derive(Clone, Debug, PartialEq)]
pub struct HarnessConfig {
    pub seed: u64,
    /// Cases per property.
    pub cases: usize,
    pub tolerance: f64,
    pub boundary_band: f64,
    pub max_vertices: usize,
    pub max_marks: Mark,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            cases: 200,
            tolerance: 1e-12,
            boundary_band: 1e-9,
            max_vertices: 8,
            max_marks: 5,
        }
    }
}

impl HarnessConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.cases == 0 {
            return Err("cases must be positive".into());
        }
        if self.boundary_band.is_nan() || self.boundary_band <= 0.0 {
            return Err(format!("boundary band must be positive, got {}", self.boundary_band));
        }
        if !(self.tolerance >= 0.0 && self.tolerance < self.boundary_band) {
            return Err(format!(
                "tolerance {} must be non-negative and below the boundary band {}",
                self.tolerance, self.boundary_band
            ));
        }
        if self.max_vertices == 0 || self.max_marks == 0 {
            return Err("max-vertices and max-marks must be positive".into());
        }
        Ok(())
    }
}

/// The closeness predicate the membership properties are run against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Predicate {
    #[default]
    Standard,
    /// Strict inequality reversed for distinct points: inside and outside
    /// verdicts swap.
    Flipped,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Case {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<ModuliPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<ModuliPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<MetricGraph>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub w: Vec<ScanParameter>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "optional_rational")]
    pub tau: Option<Rational>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub reals: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<u64>,
}

fn optional_rational<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => metric_moduli::rational::serialize(r, s),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Pass,
    /// The case does not meet the property's premise.
    Skip,
    Fail(String),
}

struct Ctx {
    cfg: HarnessConfig,
    predicate: Predicate,
}

impl Ctx {
    fn member(&self, x: &ModuliPoint, y: &ModuliPoint, eps: f64) -> Status {
        let tol = self.cfg.tolerance;
        let close = |a: &Rational, b: &Rational, e: f64| {
            let s = eps_close_tol(a, b, e, CloseMode::Symmetric, tol);
            if a == b {
                return s;
            }
            match (self.predicate, s) {
                (Predicate::Flipped, Status::Inside) => Status::Outside,
                (Predicate::Flipped, Status::Outside) => Status::Inside,
                _ => s,
            }
        };
        in_neighborhood_by(x, y, eps, &close).status
    }

    fn point(&self, rng: &mut ChaCha8Rng) -> ModuliPoint {
        generate::moduli_point(rng, self.cfg.max_vertices, self.cfg.max_marks)
    }

    fn multigraph(&self, rng: &mut ChaCha8Rng) -> MetricGraph {
        let v = self.cfg.max_vertices;
        generate::connected_multigraph(rng, v, v + v / 2, self.cfg.max_marks)
    }
}

struct Property {
    name: &'static str,
    generate: fn(&mut ChaCha8Rng, &Ctx) -> Case,
    check: fn(&Case, &Ctx) -> Outcome,
}

fn verdict(ok: bool, reason: impl FnOnce() -> String) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail(reason())
    }
}

fn x(c: &Case) -> &ModuliPoint {
    c.x.as_ref().expect("case carries a point")
}

fn g(c: &Case) -> &MetricGraph {
    c.graph.as_ref().expect("case carries a graph")
}

fn mark_union(g: &MetricGraph) -> BTreeSet<Mark> {
    g.vertices.iter().flat_map(|v| v.marks.iter().copied()).collect()
}

fn unit_rational(rng: &mut ChaCha8Rng) -> Rational {
    let den = rng.random_range(1..=360);
    rational(rng.random_range(0..=den), den)
}

fn point_case(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Case {
    Case { x: Some(ctx.point(rng)), ..Case::default() }
}

fn graph_case(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Case {
    Case { graph: Some(ctx.multigraph(rng)), ..Case::default() }
}

fn genus_one_case(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Case {
    let g = generate::genus_one_graph(rng, ctx.cfg.max_vertices, ctx.cfg.max_marks);
    Case { graph: Some(g), ..Case::default() }
}

fn shrink_case(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Case {
    let tau = if rng.random_bool(0.2) { int(1) } else { unit_rational(rng) };
    Case { graph: Some(ctx.multigraph(rng)), tau: Some(tau), ..Case::default() }
}

fn properties() -> Vec<Property> {
    vec![
        Property {
            name: "metric_graph.contraction_keeps_genus",
            generate: graph_case,
            check: |c, _| {
                let g = g(c);
                let genus = g.genus().expect("valid graph");
                for e in g.edges.iter().filter(|e| !e.is_loop()) {
                    let h = g.contract_edge(&e.id).expect("non-loop edge contracts");
                    if h.genus().ok() != Some(genus) {
                        return Outcome::Fail(format!("contracting {} changes the genus", e.id));
                    }
                }
                Outcome::Pass
            },
        },
        Property {
            name: "metric_graph.marks_preserved",
            generate: shrink_case,
            check: |c, _| {
                let g = g(c);
                let marks = mark_union(g);
                let mut images = vec![shrink_bridges(g, c.tau.as_ref().unwrap()).expect("tau in range")];
                images.extend(g.edges.iter().filter(|e| !e.is_loop()).map(|e| g.contract_edge(&e.id).unwrap()));
                if g.genus() == Ok(1) && !marks.is_empty() {
                    images.push(conjectured_retract(g).expect("connected"));
                }
                verdict(images.iter().all(|h| mark_union(h) == marks && h.mark_count() == g.mark_count()), || {
                    "an operation changed the set of marks".into()
                })
            },
        },
        Property {
            name: "metric_graph.json_round_trip",
            generate: graph_case,
            check: |c, _| {
                let g = g(c);
                verdict(MetricGraph::from_json(&g.to_json()).as_ref() == Ok(g), || "round trip differs".into())
            },
        },
        Property {
            name: "retraction.bridges_match_brute_force",
            generate: graph_case,
            check: |c, _| {
                let g = g(c);
                let base = g.component_count();
                let slow: BTreeSet<String> = g
                    .edges
                    .iter()
                    .filter(|e| {
                        let mut h = g.clone();
                        h.edges.retain(|f| f.id != e.id);
                        h.component_count() > base
                    })
                    .map(|e| e.id.clone())
                    .collect();
                let fast = find_bridges(g);
                verdict(fast == slow, || format!("found {fast:?}, deletion test gives {slow:?}"))
            },
        },
        Property {
            name: "retraction.shrinking_keeps_genus",
            generate: shrink_case,
            check: |c, _| {
                let g = g(c);
                let h = shrink_bridges(g, c.tau.as_ref().unwrap()).expect("tau in range");
                verdict(h.genus() == g.genus(), || "genus changed".into())
            },
        },
        Property {
            name: "retraction.shrunk_graph_is_bridge_free",
            generate: graph_case,
            check: |c, _| {
                let h = shrink_bridges(g(c), &int(1)).expect("tau in range");
                let left = find_bridges(&h);
                verdict(left.is_empty(), || format!("bridges left: {left:?}"))
            },
        },
        Property {
            name: "retraction.cycle_lengths_untouched",
            generate: shrink_case,
            check: |c, _| {
                let g = g(c);
                let h = shrink_bridges(g, c.tau.as_ref().unwrap()).expect("tau in range");
                let bridges = find_bridges(g);
                for e in g.edges.iter().filter(|e| !bridges.contains(&e.id)) {
                    let kept = h.edge(&e.id).is_some_and(|f| f.length.numer() == e.length.numer() && f.length.denom() == e.length.denom());
                    if !kept {
                        return Outcome::Fail(format!("length of {} changed", e.id));
                    }
                }
                Outcome::Pass
            },
        },
        Property {
            name: "retraction.retract_is_stable",
            generate: genus_one_case,
            check: |c, _| {
                let g = g(c);
                if g.genus() != Ok(1) || g.mark_count() == 0 || !g.is_connected() {
                    return Outcome::Skip;
                }
                let h = conjectured_retract(&shrink_bridges(g, &int(1)).unwrap()).unwrap();
                let degenerate = h.vertices.len() == 1 && h.vertices[0].marks.is_empty();
                verdict(degenerate || is_tropically_stable(&h), || "retract is not stable".into())
            },
        },
        Property {
            name: "retraction.retract_is_idempotent",
            generate: genus_one_case,
            check: |c, _| {
                let g = g(c);
                if !g.is_connected() {
                    return Outcome::Skip;
                }
                let h = conjectured_retract(g).unwrap();
                verdict(conjectured_retract(&h).as_ref() == Ok(&h), || "second application changes the graph".into())
            },
        },
        Property {
            name: "moduli_space.reflection_is_an_involution",
            generate: point_case,
            check: |c, _| {
                let p = x(c).cycle();
                verdict(&reflect(&reflect(p)) == p, || "reflecting twice differs".into())
            },
        },
        Property {
            name: "moduli_space.canonical_form_is_stable",
            generate: point_case,
            check: |c, _| {
                let p = x(c);
                let ok = &canonical_form(p.cycle()) == p && &canonical_form(&reflect(p.cycle())) == p;
                verdict(ok, || "canonical form depends on the representative".into())
            },
        },
        Property {
            name: "moduli_space.membership_is_reflexive",
            generate: |rng, ctx| Case {
                x: Some(ctx.point(rng)),
                reals: vec![rng.random_range(1e-6..2.0)],
                ..Case::default()
            },
            check: |c, ctx| {
                let eps = c.reals[0];
                verdict(ctx.member(x(c), x(c), eps) == Status::Inside, || format!("x is not in N_{eps}(x)"))
            },
        },
        Property {
            name: "moduli_space.membership_is_monotone",
            generate: |rng, ctx| {
                let x = ctx.point(rng);
                let near = rng.random_range(0.005..0.4);
                let y = if rng.random_bool(0.7) {
                    sample_neighbor(&x, near, rng.random()).expect("sampler self-check")
                } else {
                    ctx.point(rng)
                };
                let e1 = rng.random_range(0.001..1.0);
                let e2 = e1 + rng.random_range(0.0..1.0);
                Case { x: Some(x), y: Some(y), reals: vec![e1, e2], ..Case::default() }
            },
            check: |c, ctx| {
                let (x, y) = (x(c), c.y.as_ref().unwrap());
                let (e1, e2) = (c.reals[0], c.reals[1]);
                if ctx.member(x, y, e1) != Status::Inside {
                    return Outcome::Skip;
                }
                verdict(ctx.member(x, y, e2) == Status::Inside, || format!("inside at {e1} but not at {e2}"))
            },
        },
        Property {
            name: "moduli_space.membership_is_symmetric",
            generate: |rng, ctx| {
                let x = ctx.point(rng);
                let eps = rng.random_range(0.005..0.4);
                let y = sample_neighbor(&x, eps, rng.random()).expect("sampler self-check");
                Case { x: Some(x), y: Some(y), reals: vec![eps * rng.random_range(0.3..1.7)], ..Case::default() }
            },
            check: |c, ctx| {
                let (x, y, eps) = (x(c), c.y.as_ref().unwrap(), c.reals[0]);
                let (there, back) = (ctx.member(x, y, eps), ctx.member(y, x, eps));
                if there == Status::Boundary || back == Status::Boundary {
                    return Outcome::Skip;
                }
                verdict(there == back, || format!("y in N(x) is {there:?}, x in N(y) is {back:?}"))
            },
        },
        Property {
            name: "moduli_space.neighborhoods_compose",
            generate: |rng, ctx| Case {
                x: Some(ctx.point(rng)),
                reals: vec![rng.random_range(0.005..0.3), rng.random_range(0.005..0.3)],
                seeds: vec![rng.random(), rng.random()],
                ..Case::default()
            },
            check: |c, ctx| {
                let (e1, e2) = (c.reals[0], c.reals[1]);
                let x = x(c);
                let Ok(y) = sample_neighbor(x, e2, c.seeds[0]) else { return Outcome::Skip };
                let Ok(z) = sample_neighbor(&y, e1, c.seeds[1]) else { return Outcome::Skip };
                if ctx.member(x, &y, e2) != Status::Inside || ctx.member(&y, &z, e1) != Status::Inside {
                    return Outcome::Skip;
                }
                verdict(ctx.member(x, &z, e1 + e2) == Status::Inside, || format!("y = {y}, z = {z}"))
            },
        },
        Property {
            name: "moduli_space.constructed_midpoints_split_a_step",
            generate: |rng, ctx| Case {
                x: Some(ctx.point(rng)),
                reals: vec![rng.random_range(0.005..0.3), rng.random_range(0.005..0.3)],
                seeds: vec![rng.random()],
                ..Case::default()
            },
            check: |c, ctx| {
                let (e1, e2) = (c.reals[0], c.reals[1]);
                let x = x(c);
                let sample = NeighborSample::draw(x, 0.99 * (e1 + e2), c.seeds[0]);
                let y = sample.endpoint();
                let Some(z) = sample.midpoint(e2, e1) else { return Outcome::Skip };
                verdict(ctx.member(x, &z, e2) == Status::Inside && ctx.member(&z, &y, e1) == Status::Inside, || {
                    format!("y = {y}, midpoint {z}")
                })
            },
        },
        Property {
            name: "moduli_space.normalization_round_trip",
            generate: |rng, ctx| Case {
                graph: Some(generate::cycle_graph(rng, ctx.cfg.max_vertices, ctx.cfg.max_marks)),
                ..Case::default()
            },
            check: |c, _| {
                let Ok((p, total)) = normalize(g(c)) else { return Outcome::Skip };
                let h = denormalize(&p, &total).expect("positive length");
                verdict(normalize(&h) == Ok((p, total)), || "round trip differs".into())
            },
        },
        Property {
            name: "scanning.identity_endpoint",
            generate: point_case,
            check: |c, _| {
                let y = scan(x(c), &ScanParameter::new(half()).unwrap());
                verdict(&y == x(c), || format!("scan at 1/2 gives {y}"))
            },
        },
        Property {
            name: "scanning.retraction_endpoint",
            generate: point_case,
            check: |c, _| {
                let zero = ScanParameter::new(int(0)).unwrap();
                let y = scan(x(c), &zero);
                verdict(is_in_y(&y) && scan(&y, &zero) == y, || format!("scan at 0 gives {y}"))
            },
        },
        Property {
            name: "scanning.marked_turns_fixed",
            generate: scan_case,
            check: |c, _| {
                let p = x(c);
                let y = scan_cycle(p.cycle(), &c.w[0]);
                verdict((1..=p.mark_count()).all(|m| y.turn_of_mark(m) == p.turn_of_mark(m)), || {
                    format!("scan gives {y}")
                })
            },
        },
        Property {
            name: "scanning.representative_independence",
            generate: scan_case,
            check: |c, _| {
                let (p, w) = (x(c).cycle(), &c.w[0]);
                let flipped = scan_cycle(&reflect(p), w);
                verdict(flipped.canonical() == scan(x(c), w) && flipped == reflect(&scan_cycle(p, w)), || {
                    format!("reflected scan gives {flipped}")
                })
            },
        },
        Property {
            name: "scanning.monotone_forgetting",
            generate: |rng, ctx| {
                let (a, b) = (generate::scan_parameter(rng), generate::scan_parameter(rng));
                let w = if a.w() <= b.w() { vec![a, b] } else { vec![b, a] };
                Case { x: Some(ctx.point(rng)), w, ..Case::default() }
            },
            check: |c, _| {
                let unmarked = |w: &ScanParameter| -> BTreeSet<Rational> {
                    let line = [w.w().clone(), frac(&(int(1) - w.w()))];
                    scan_cycle(x(c).cycle(), w)
                        .points()
                        .iter()
                        .filter(|p| !p.is_marked() && !line.contains(&p.turn))
                        .map(|p| p.turn.clone())
                        .collect()
                };
                let (early, late) = (unmarked(&c.w[0]), unmarked(&c.w[1]));
                verdict(early.is_subset(&late), || "an unmarked vertex reappeared".into())
            },
        },
        Property {
            name: "scanning.nearby_lines",
            generate: |rng, ctx| loop {
                let (w0, w1) = (generate::scan_parameter(rng), generate::scan_parameter(rng));
                if 0.1 * (w1.s() - w0.s()).abs() >= ctx.cfg.boundary_band {
                    break Case { x: Some(ctx.point(rng)), w: vec![w0, w1], ..Case::default() };
                }
            },
            check: |c, _| {
                let eps = 1.1 * (c.w[1].s() - c.w[0].s()).abs();
                let ok = lemma_step1_check(x(c), &c.w[0], &c.w[1], eps);
                verdict(ok == Ok(true), || format!("eps = {eps}: {ok:?}"))
            },
        },
        Property {
            name: "scanning.scans_of_neighbors",
            generate: |rng, ctx| Case {
                x: Some(ctx.point(rng)),
                w: vec![generate::scan_parameter(rng)],
                reals: vec![rng.random_range(0.005..0.4)],
                seeds: vec![rng.random()],
                ..Case::default()
            },
            check: |c, _| {
                let eps = c.reals[0];
                let Ok(y) = sample_neighbor(x(c), eps, c.seeds[0]) else { return Outcome::Skip };
                let ok = lemma_step2_check(x(c), &y, &c.w[0], eps * (1.0 + 1e-6));
                verdict(ok == Ok(true), || format!("y = {y}: {ok:?}"))
            },
        },
        Property {
            name: "scanning.continuity_certificate",
            generate: |rng, ctx| {
                let alpha = rng.random_range(0.005..0.08);
                Case {
                    x: Some(ctx.point(rng)),
                    w: vec![generate::scan_parameter(rng)],
                    reals: vec![alpha, 2.0 * alpha * rng.random_range(1.05..2.0)],
                    seeds: vec![rng.random()],
                    ..Case::default()
                }
            },
            check: |c, _| {
                let report = continuity_certificate(x(c), &c.w[0], c.reals[0], c.reals[1], 50, c.seeds[0]);
                match report {
                    Ok(r) if r.all_passed() => Outcome::Pass,
                    Ok(r) => Outcome::Fail(format!("{} of {} samples failed", r.failures.len(), r.samples)),
                    Err(e) => Outcome::Fail(e.to_string()),
                }
            },
        },
    ]
}

fn scan_case(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Case {
    Case { x: Some(ctx.point(rng)), w: vec![generate::scan_parameter(rng)], ..Case::default() }
}

/// Smaller variants of a point: an unmarked vertex or the top mark removed,
/// or a turn rounded to a small denominator.
fn shrink_point(p: &ModuliPoint) -> Vec<ModuliPoint> {
    let points = p.points();
    let mut out = Vec::new();
    let mut push = |pts: Vec<CyclePoint>| match MarkedCycle::new(pts) {
        Ok(c) => {
            out.push(c.canonical());
            true
        }
        Err(_) => false,
    };
    for i in 0..points.len() {
        if !points[i].is_marked() {
            let mut pts = points.to_vec();
            pts.remove(i);
            push(pts);
        }
    }
    let n = p.mark_count();
    if n >= 2 {
        let mut pts = points.to_vec();
        for q in &mut pts {
            q.marks.remove(&n);
        }
        push(pts);
    }
    for i in 0..points.len() {
        if points[i].turn == half() {
            continue;
        }
        for den in [2, 3, 4, 6, 8, 12, 24] {
            let den = int(den);
            let rounded = frac(&((&points[i].turn * &den).round() / &den));
            if rounded.denom() < points[i].turn.denom() {
                let mut pts = points.to_vec();
                pts[i].turn = rounded;
                if push(pts) {
                    break;
                }
            }
        }
    }
    out
}

/// Smaller variants of a graph: an edge deleted or contracted, the top mark
/// removed, or a length set to 1.
fn shrink_graph(g: &MetricGraph) -> Vec<MetricGraph> {
    let mut out = Vec::new();
    for e in &g.edges {
        let mut h = g.clone();
        h.edges.retain(|f| f.id != e.id);
        if h.is_connected() {
            out.push(h);
        }
        if !e.is_loop() {
            if let Ok(h) = g.contract_edge(&e.id) {
                out.push(h);
            }
        }
    }
    let n = g.mark_count();
    if n >= 1 {
        let mut h = g.clone();
        for v in &mut h.vertices {
            v.marks.remove(&n);
        }
        out.push(h);
    }
    for (i, e) in g.edges.iter().enumerate() {
        if e.length != int(1) {
            let mut h = g.clone();
            h.edges[i].length = int(1);
            out.push(h);
        }
    }
    out.retain(|h| h.validate().is_empty());
    out
}

fn shrink_candidates(c: &Case) -> Vec<Case> {
    let mut out = Vec::new();
    if let Some(p) = &c.x {
        out.extend(shrink_point(p).into_iter().map(|p| Case { x: Some(p), ..c.clone() }));
    }
    if let Some(p) = &c.y {
        out.extend(shrink_point(p).into_iter().map(|p| Case { y: Some(p), ..c.clone() }));
    }
    if let Some(g) = &c.graph {
        out.extend(shrink_graph(g).into_iter().map(|g| Case { graph: Some(g), ..c.clone() }));
    }
    out
}

const MAX_SHRINK_STEPS: usize = 500;

fn minimize(mut case: Case, mut reason: String, prop: &Property, ctx: &Ctx) -> (Case, String, usize) {
    let mut steps = 0;
    'outer: while steps < MAX_SHRINK_STEPS {
        for cand in shrink_candidates(&case) {
            if let Outcome::Fail(r) = (prop.check)(&cand, ctx) {
                case = cand;
                reason = r;
                steps += 1;
                continue 'outer;
            }
        }
        break;
    }
    (case, reason, steps)
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub case_index: usize,
    pub reason: String,
    pub original: Case,
    pub minimized: Case,
    pub shrink_steps: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub cases: usize,
    pub passed: usize,
    pub skipped: usize,
    pub failed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub seed: u64,
    pub cases: usize,
    pub predicate: Predicate,
    pub properties: Vec<PropertyReport>,
    pub failed_properties: Vec<String>,
    pub ok: bool,
}

pub fn property_names() -> Vec<&'static str> {
    properties().iter().map(|p| p.name).collect()
}

/// Runs every property. The report is a function of `cfg` and `predicate`.
pub fn proptest_run(cfg: &HarnessConfig, predicate: Predicate) -> Result<Report, String> {
    cfg.validate()?;
    let ctx = Ctx { cfg: cfg.clone(), predicate };
    let mut reports = Vec::new();
    for (k, prop) in properties().iter().enumerate() {
        let outcomes: Vec<(Case, Outcome)> = (0..cfg.cases)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(cfg.seed, k as u64 + 1, i as u64));
                let case = (prop.generate)(&mut rng, &ctx);
                let outcome = (prop.check)(&case, &ctx);
                (case, outcome)
            })
            .collect();
        let passed = outcomes.iter().filter(|(_, o)| *o == Outcome::Pass).count();
        let skipped = outcomes.iter().filter(|(_, o)| *o == Outcome::Skip).count();
        let first = outcomes.into_iter().enumerate().find_map(|(i, (case, o))| match o {
            Outcome::Fail(reason) => Some((i, case, reason)),
            _ => None,
        });
        let counterexample = first.map(|(case_index, case, reason)| {
            let (minimized, reason, shrink_steps) = minimize(case.clone(), reason, prop, &ctx);
            Counterexample { case_index, reason, original: case, minimized, shrink_steps }
        });
        reports.push(PropertyReport {
            name: prop.name.to_string(),
            cases: cfg.cases,
            passed,
            skipped,
            failed: cfg.cases - passed - skipped,
            counterexample,
        });
    }
    let failed_properties: Vec<String> = reports.iter().filter(|r| r.failed > 0).map(|r| r.name.clone()).collect();
    Ok(Report {
        seed: cfg.seed,
        cases: cfg.cases,
        predicate,
        ok: failed_properties.is_empty(),
        properties: reports,
        failed_properties,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shrinking_a_point_drops_unmarked_vertices() {
        let p = MarkedCycle::from_turns(&[("1/2", &[1]), ("37/97", &[]), ("0", &[2])]).unwrap().canonical();
        let smaller = shrink_point(&p);
        assert!(smaller.iter().any(|q| q.points().len() == 2));
        assert!(smaller.iter().any(|q| q.mark_count() == 1));
        assert!(smaller.iter().any(|q| q.points().iter().any(|r| r.turn == rational(1, 3) || r.turn == rational(2, 3))));
    }

    #[test]
    fn minimizer_reaches_a_small_case() {
        let ctx = Ctx { cfg: HarnessConfig::default(), predicate: Predicate::Standard };
        let prop = Property {
            name: "test.at_most_one_unmarked",
            generate: point_case,
            check: |c, _| verdict(x(c).points().iter().filter(|p| !p.is_marked()).count() <= 1, || "two".into()),
        };
        let p = MarkedCycle::from_turns(&[("1/2", &[1]), ("1/97", &[]), ("3/97", &[]), ("5/97", &[]), ("7/11", &[2])])
            .unwrap()
            .canonical();
        let case = Case { x: Some(p), ..Case::default() };
        let (small, _, _) = minimize(case, "two".into(), &prop, &ctx);
        let small = small.x.unwrap();
        assert_eq!(small.points().len(), 3);
        assert_eq!(small.mark_count(), 1);
    }

    #[test]
    fn config_rejects_zero_cases() {
        let cfg = HarnessConfig { cases: 0, ..HarnessConfig::default() };
        assert!(proptest_run(&cfg, Predicate::Standard).is_err());
        let cfg = HarnessConfig { tolerance: 1e-6, ..HarnessConfig::default() };
        assert!(cfg.validate().is_err());
    }
}
