use metric_moduli::generate;
use metric_moduli::moduli_space::{in_neighborhood_by, x_coord};
use metric_moduli::rational::{frac, int, rational, to_f64};
use metric_moduli::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn point() -> impl Strategy<Value = ModuliPoint> {
    any::<u64>().prop_map(|s| generate::moduli_point(&mut rng(s), 8, 5))
}

fn multigraph() -> impl Strategy<Value = MetricGraph> {
    any::<u64>().prop_map(|s| generate::connected_multigraph(&mut rng(s), 8, 12, 5))
}

fn genus_one() -> impl Strategy<Value = MetricGraph> {
    any::<u64>().prop_map(|s| generate::genus_one_graph(&mut rng(s), 8, 5))
}

fn scan_param() -> impl Strategy<Value = ScanParameter> {
    any::<u64>().prop_map(|s| generate::scan_parameter(&mut rng(s)))
}

fn unit_rational() -> impl Strategy<Value = Rational> {
    (1i64..=720).prop_flat_map(|den| (0..=den).prop_map(move |num| rational(num, den)))
}

/// Edges whose removal adds a component, found by deleting each in turn.
fn brute_force_bridges(g: &MetricGraph) -> Vec<String> {
    let base = g.component_count();
    g.edges
        .iter()
        .filter(|e| {
            let mut h = g.clone();
            h.edges.retain(|f| f.id != e.id);
            h.component_count() > base
        })
        .map(|e| e.id.clone())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn contraction_keeps_genus_and_marks(g in multigraph(), pick in any::<prop::sample::Index>()) {
        prop_assume!(!g.edges.is_empty());
        let e = &g.edges[pick.index(g.edges.len())];
        prop_assume!(!e.is_loop());
        let h = g.contract_edge(&e.id).unwrap();
        prop_assert!(h.validate().is_empty());
        prop_assert_eq!(h.genus().unwrap(), g.genus().unwrap());
        prop_assert_eq!(h.mark_count(), g.mark_count());
        prop_assert_eq!(h.edges.len() + 1, g.edges.len());
    }

    #[test]
    fn graph_json_round_trip(g in multigraph()) {
        prop_assert_eq!(MetricGraph::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn bridges_match_brute_force(g in multigraph()) {
        let fast: Vec<String> = find_bridges(&g).into_iter().collect();
        let mut slow = brute_force_bridges(&g);
        slow.sort();
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn shrinking_keeps_genus_and_cycle_lengths(g in multigraph(), tau in unit_rational()) {
        let h = shrink_bridges(&g, &tau).unwrap();
        prop_assert_eq!(h.genus().unwrap(), g.genus().unwrap());
        let bridges = find_bridges(&g);
        for e in g.edges.iter().filter(|e| !bridges.contains(&e.id)) {
            prop_assert_eq!(&h.edge(&e.id).unwrap().length, &e.length);
        }
        if tau == int(1) {
            prop_assert!(find_bridges(&h).is_empty());
        } else {
            prop_assert_eq!(h.edges.len(), g.edges.len());
        }
    }

    #[test]
    fn retract_is_idempotent(g in genus_one()) {
        let h = conjectured_retract(&g).unwrap();
        prop_assert_eq!(h.genus().unwrap(), 1);
        prop_assert_eq!(h.mark_count(), g.mark_count());
        prop_assert_eq!(conjectured_retract(&h).unwrap(), h);
    }

    #[test]
    fn reflection_is_an_involution(x in point()) {
        let c = x.cycle();
        prop_assert_eq!(&reflect(&reflect(c)), c);
        prop_assert!(iso_equal(c, &reflect(c)));
    }

    #[test]
    fn canonical_form_is_idempotent_and_reflection_blind(x in point()) {
        prop_assert_eq!(&canonical_form(x.cycle()), &x);
        prop_assert_eq!(&canonical_form(&reflect(x.cycle())), &x);
        prop_assert_eq!(ModuliPoint::from_json(&x.to_json()).unwrap(), x);
    }

    #[test]
    fn membership_is_reflexive(x in point(), eps in 1e-6f64..1.0) {
        prop_assert!(in_neighborhood(&x, &x, eps, CloseMode::Symmetric).is_inside());
        prop_assert!(in_neighborhood(&x, &x, eps, CloseMode::Paper).is_inside());
    }

    #[test]
    fn membership_grows_with_eps(x in point(), y in point(), eps in 0.001f64..1.0, extra in 0.0f64..1.0) {
        let small = in_neighborhood(&x, &y, eps, CloseMode::Symmetric);
        let large = in_neighborhood(&x, &y, eps + extra, CloseMode::Symmetric);
        if small.is_inside() {
            prop_assert!(large.is_inside());
        }
    }

    #[test]
    fn symmetric_membership_is_symmetric(x in point(), seed in any::<u64>(), eps in 0.005f64..0.4) {
        let y = sample_neighbor(&x, eps, seed).unwrap();
        for probe in [eps * 0.5, eps, eps * 1.5] {
            let there = in_neighborhood(&x, &y, probe, CloseMode::Symmetric).status;
            let back = in_neighborhood(&y, &x, probe, CloseMode::Symmetric).status;
            if there != Status::Boundary && back != Status::Boundary {
                prop_assert_eq!(there, back);
            }
        }
    }

    #[test]
    fn neighborhoods_compose(x in point(), s1 in any::<u64>(), s2 in any::<u64>(), e1 in 0.005f64..0.3, e2 in 0.005f64..0.3) {
        let y = sample_neighbor(&x, e2, s2).unwrap();
        let z = sample_neighbor(&y, e1, s1).unwrap();
        prop_assert!(additivity_witness_check(&x, &y, &z, e1, e2));
    }

    #[test]
    fn normalization_round_trip(s in any::<u64>()) {
        let g = generate::cycle_graph(&mut rng(s), 8, 5);
        let (p, total) = normalize(&g).unwrap();
        prop_assert_eq!(&total, &g.total_length().unwrap());
        let h = denormalize(&p, &total).unwrap();
        prop_assert_eq!(normalize(&h).unwrap(), (p, total));
    }

    #[test]
    fn scan_endpoints(x in point()) {
        let half = ScanParameter::new(rational(1, 2)).unwrap();
        prop_assert_eq!(&scan(&x, &half), &x);
        let y = scan(&x, &ScanParameter::new(int(0)).unwrap());
        prop_assert!(is_in_y(&y));
        prop_assert!(is_tropical_point(&to_tropical_point(&y).unwrap()));
    }

    #[test]
    fn scan_keeps_marked_turns(x in point(), w in scan_param()) {
        let y = scan_cycle(x.cycle(), &w);
        for m in 1..=x.mark_count() {
            prop_assert_eq!(y.turn_of_mark(m), x.turn_of_mark(m));
        }
    }

    #[test]
    fn scan_commutes_with_reflection(x in point(), w in scan_param()) {
        let c = x.cycle();
        prop_assert_eq!(scan_cycle(&reflect(c), &w), reflect(&scan_cycle(c, &w)));
    }

    #[test]
    fn scanning_only_forgets(x in point(), a in scan_param(), b in scan_param()) {
        let (lo, hi) = if a.w() <= b.w() { (a, b) } else { (b, a) };
        let unmarked = |p: &ModuliPoint, w: &ScanParameter| {
            let line = [w.w().clone(), frac(&(int(1) - w.w()))];
            p.points().iter().filter(|q| !q.is_marked() && !line.contains(&q.turn)).count()
        };
        prop_assert!(unmarked(&scan(&x, &lo), &lo) <= unmarked(&scan(&x, &hi), &hi));
        prop_assert_eq!(scan(&scan(&x, &hi), &lo), scan(&x, &lo));
    }

    #[test]
    fn nearby_lines_give_nearby_scans(x in point(), w0 in scan_param(), w1 in scan_param()) {
        let gap = (w1.s() - w0.s()).abs();
        prop_assume!(gap * 0.1 > metric_moduli::scanning::BOUNDARY_BAND);
        prop_assert!(lemma_step1_check(&x, &w0, &w1, gap * 1.1).unwrap());
    }

    #[test]
    fn scanning_keeps_neighbors_close(x in point(), w in scan_param(), seed in any::<u64>(), eps in 0.005f64..0.4) {
        let y = sample_neighbor(&x, eps, seed).unwrap();
        prop_assert!(lemma_step2_check(&x, &y, &w, eps * (1.0 + 1e-6)).unwrap());
    }

    #[test]
    fn abscissa_is_a_mirror_image(u in unit_rational()) {
        let mirrored = frac(&(int(1) - &u));
        prop_assert_eq!(x_coord(&u), x_coord(&mirrored));
        prop_assert!((x_coord(&u) - (std::f64::consts::TAU * to_f64(&u)).cos()).abs() < 1e-12);
    }
}

/// Closeness with its inequality turned around has to trip the checks above.
#[test]
fn flipped_inequality_is_caught() {
    let flipped = |a: &Rational, b: &Rational, eps: f64| {
        if (x_coord(a) - x_coord(b)).abs() >= eps {
            Status::Inside
        } else {
            Status::Outside
        }
    };
    let mut r = rng(11);
    let mut caught = false;
    for _ in 0..200 {
        let x = generate::moduli_point(&mut r, 8, 5);
        let reflexive = in_neighborhood_by(&x, &x, 0.1, &flipped).is_inside();
        let y = generate::moduli_point(&mut r, 8, 5);
        let monotone = !in_neighborhood_by(&x, &y, 0.05, &flipped).is_inside()
            || in_neighborhood_by(&x, &y, 0.5, &flipped).is_inside();
        if !reflexive || !monotone {
            caught = true;
            break;
        }
    }
    assert!(caught);
}
