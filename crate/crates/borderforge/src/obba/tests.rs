use super::*;
use crate::algebra::TermOrder;
use crate::bba::{compute_border_basis, BbaConfig, ExpansionPair, Variant};
use crate::orderideal::Universe;

fn ring7() -> Ring {
    Ring::new(7, 2, TermOrder::DegRevLex).unwrap()
}

fn circle(r: &Ring) -> Vec<Polynomial> {
    vec![r.parse("x1^2 + x2^2 - 1").unwrap(), r.parse("x1 - 1").unwrap()]
}

fn system3() -> (Ring, Vec<Polynomial>) {
    let r = Ring::new(31, 3, TermOrder::DegRevLex).unwrap();
    let f = ["x1^2 + 3*x2 - x3", "x2^2 - x1*x3 + 5", "x3^2 + x1 - 2*x2", "x1*x2 - x3 + 7"]
        .iter()
        .map(|s| r.parse(s).unwrap())
        .collect();
    (r, f)
}

fn state(r: &Ring, d: u32, polys: &[Polynomial]) -> GeneratorSet {
    let mut gs = GeneratorSet::new(*r, Universe::new(r, d), Lookup::Tree);
    for f in polys {
        gs.basis.reduce_insert(f);
    }
    gs
}

#[test]
fn perfect_labels_on_circle() {
    let r = ring7();
    let gs = state(&r, 2, &circle(&r));
    let x = r.term(&[1, 0]).unwrap();
    assert_eq!(perfect_oracle_labels(&gs), vec![ExpansionPair::new(1, x), ExpansionPair::new(2, x)]);

    let mut stable = gs.clone();
    crate::bba::lstable_span(&mut stable, Variant::Bba);
    assert!(perfect_oracle_labels(&stable).is_empty());
    assert!((relative_border_gap(&stable) - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(relative_border_gap(&GeneratorSet::new(r, Universe::new(&r, 1), Lookup::Tree)), 0.0);
}

#[test]
fn trivial_full_lists_all_pairs() {
    let r = ring7();
    let gs = state(&r, 2, &circle(&r));
    let q = OracleQuery { state: &gs, truncate: 5, stage: 0, iteration: 0 };
    assert_eq!(TrivialFullOracle.predict(&q).unwrap().len(), 4);
}

#[test]
fn zero_budget_matches_incremental() {
    let (r, f) = system3();
    let (bb, ibba) = compute_border_basis(&r, &f, &BbaConfig::default()).unwrap();
    let cfg = ObbaConfig { budget: 0, ..Default::default() };
    let (bb2, t2) = run_obba(&r, &f, &mut PerfectOracle, &cfg).unwrap();
    assert_eq!(bb, bb2);
    assert_eq!(ibba, t2);
}

#[test]
fn every_oracle_gives_the_same_basis() {
    for (r, f) in [(ring7(), circle(&ring7())), system3()] {
        let cfg = BbaConfig { variant: Variant::Bba, ..Default::default() };
        let (want, _) = compute_border_basis(&r, &f, &cfg).unwrap();
        for tau in [0.0, 0.5, 0.9] {
            let c = ObbaConfig { gap_threshold: tau, ..Default::default() };
            let mut oracles: Vec<Box<dyn Oracle>> = vec![
                Box::new(PerfectOracle),
                Box::new(EmptyOracle),
                Box::new(RandomSubsetOracle::new(3, 0.5)),
                Box::new(AdversarialOracle),
                Box::new(TrivialFullOracle),
            ];
            for o in oracles.iter_mut() {
                let (got, trace) = run_obba(&r, &f, o, &c).unwrap();
                assert_eq!(got, want, "oracle {} tau {tau}", o.name());
                assert!(trace.iterations.iter().all(|it| it.is_consistent()));
            }
        }
    }
}

#[test]
fn empty_oracle_falls_back() {
    let (r, f) = system3();
    let c = ObbaConfig { gap_threshold: 0.0, ..Default::default() };
    let (_, trace) = run_obba(&r, &f, &mut EmptyOracle, &c).unwrap();
    assert_eq!(trace.fallbacks(), 1);
    assert!(trace.events.iter().any(|e| matches!(e, TraceEvent::StopClaim { accepted: false, .. })));
}

#[test]
fn perfect_oracle_wastes_nothing_once_consulted() {
    let (r, f) = system3();
    let c = ObbaConfig { gap_threshold: 0.0, budget: u32::MAX, ..Default::default() };
    let (_, trace) = run_obba(&r, &f, &mut PerfectOracle, &c).unwrap();
    for it in trace.iterations.iter().filter(|it| it.kind == ExpansionKind::Oracle) {
        assert_eq!(it.zero_reductions, 0);
        assert_eq!(it.outside, 0);
    }
    assert_eq!(trace.fallbacks(), 0);
    assert!(matches!(trace.events.last(), Some(TraceEvent::StopClaim { accepted: true, .. })));
}

#[test]
fn budget_is_respected() {
    let (r, f) = system3();
    for k in 1..4 {
        let c = ObbaConfig { gap_threshold: 0.0, budget: k, ..Default::default() };
        let (_, trace) = run_obba(&r, &f, &mut RandomSubsetOracle::new(1, 0.3), &c).unwrap();
        let mut run = 0;
        for it in &trace.iterations {
            if it.kind == ExpansionKind::Oracle {
                run += 1;
                assert!(run <= k);
            } else {
                run = 0;
            }
        }
    }
}

#[test]
fn gap_gate_holds() {
    let (r, f) = system3();
    let c = ObbaConfig { gap_threshold: 0.8, ..Default::default() };
    let (_, trace) = run_obba(&r, &f, &mut PerfectOracle, &c).unwrap();
    for it in trace.iterations.iter().filter(|it| it.kind == ExpansionKind::Oracle) {
        assert!(it.gap_before() >= 0.8);
    }
}

#[test]
fn stale_pairs_are_skipped() {
    struct Stale;
    impl Oracle for Stale {
        fn predict(&mut self, q: &OracleQuery) -> Result<Vec<ExpansionPair>> {
            let t = q.state.tentative_order_ideal()[0];
            Ok(vec![ExpansionPair::new(1, t)])
        }
        fn name(&self) -> &str {
            "stale"
        }
    }
    let r = ring7();
    let c = ObbaConfig { gap_threshold: 0.0, ..Default::default() };
    let (bb, trace) = run_obba(&r, &circle(&r), &mut Stale, &c).unwrap();
    assert_eq!(trace.iterations[0].stale, 1);
    assert_eq!(trace.iterations[0].candidates, 0);
    assert_eq!(bb.len(), 3);
}

#[test]
fn unavailable_oracle_uses_plain_expansion() {
    struct Down;
    impl Oracle for Down {
        fn predict(&mut self, _: &OracleQuery) -> Result<Vec<ExpansionPair>> {
            Err(Error::OracleUnavailable("down".into()))
        }
        fn name(&self) -> &str {
            "down"
        }
    }
    let (r, f) = system3();
    let c = ObbaConfig { gap_threshold: 0.0, budget: 1, ..Default::default() };
    let (bb, trace) = run_obba(&r, &f, &mut Down, &c).unwrap();
    assert_eq!(bb, compute_border_basis(&r, &f, &BbaConfig::default()).unwrap().0);
    assert_eq!(trace.oracle_expansions(), 0);
    let unavailable = trace.events.iter().filter(|e| matches!(e, TraceEvent::OracleUnavailable { .. })).count();
    // no budget is consumed, so every step asks again
    assert_eq!(unavailable, trace.iterations.len());
}

#[test]
fn certificate_accepts_only_true_bases() {
    let r = ring7();
    let f = circle(&r);
    let mut gs = state(&r, 2, &f);
    assert!(!certificate::certify(&gs, &f).accepted);
    crate::bba::lstable_span(&mut gs, Variant::Ibba);
    let v = certificate::certify(&gs, &f);
    assert!(v.accepted, "{}", v.reason);

    // monomial basis of <x, y^2>
    let mono: Vec<Polynomial> = ["x1^2", "x1*x2", "x2^2", "x1"].iter().map(|s| r.parse(s).unwrap()).collect();
    let g2 = state(&r, 2, &mono);
    assert!(certificate::certify(&g2, &[r.parse("x1").unwrap(), r.parse("x2^2").unwrap()]).accepted);
    let v = certificate::certify(&g2, &[r.parse("x2 - 1").unwrap()]);
    assert_eq!(v.reason, "an input has nonzero normal form");
}

#[test]
fn non_commuting_prebasis_rejected() {
    // O = {1, x, y}; x^2 - y, xy - 1, y^2 - x cuts out the three points
    // (w, w^2) with w^3 = 1, while x^2 - y, xy - x, y^2 - 1 is no basis.
    let r = Ring::new(31, 2, TermOrder::DegRevLex).unwrap();
    let mk = |ps: &[&str]| {
        let mut polys: Vec<Polynomial> = ps.iter().map(|s| r.parse(s).unwrap()).collect();
        let gens = polys.clone();
        polys.extend(crate::orderideal::terms_of_degree(2, 3).into_iter().map(|t| r.monomial(1, t)));
        (state(&r, 3, &polys), gens)
    };
    let (good, gp) = mk(&["x1^2 - x2", "x1*x2 - 1", "x2^2 - x1"]);
    let v = certificate::certify(&good, &gp);
    assert!(v.accepted, "{}", v.reason);
    assert!(v.ops > 0);

    let (bad, bp) = mk(&["x1^2 - x2", "x1*x2 - x1", "x2^2 - 1"]);
    assert_eq!(certificate::certify(&bad, &bp).reason, "multiplication matrices do not commute");
}
