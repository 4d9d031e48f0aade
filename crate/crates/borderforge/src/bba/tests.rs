use super::*;
use crate::algebra::{Term, TermOrder};
use crate::orderideal::Universe;

fn ring7() -> Ring {
    Ring::new(7, 2, TermOrder::DegRevLex).unwrap()
}

fn p(r: &Ring, s: &str) -> Polynomial {
    r.parse(s).unwrap()
}

fn t(r: &Ring, e: &[u32]) -> Term {
    r.term(e).unwrap()
}

fn circle() -> Vec<Polynomial> {
    let r = ring7();
    vec![p(&r, "x1^2 + x2^2 - 1"), p(&r, "x1 - 1")]
}

fn gs_from(r: &Ring, d: u32, polys: &[Polynomial]) -> GeneratorSet {
    let mut gs = GeneratorSet::new(*r, Universe::new(r, d), Lookup::Tree);
    for f in polys {
        gs.basis.reduce_insert(f);
    }
    gs
}

#[test]
fn circle_border_basis() {
    let r = ring7();
    for variant in [Variant::Bba, Variant::Ibba] {
        for lookup in [Lookup::Tree, Lookup::Naive] {
            let cfg = BbaConfig { variant, lookup, degree_cap: None };
            let (bb, trace) = compute_border_basis(&r, &circle(), &cfg).unwrap();
            let o: Vec<Term> = bb.order_ideal().terms().to_vec();
            assert_eq!(o, vec![t(&r, &[0, 1]), t(&r, &[0, 0])]);
            let got: Vec<String> = bb.polys().iter().map(|g| r.format(g)).collect();
            assert_eq!(got, vec!["1*x1*x2 + 6*x2", "1*x2^2", "1*x1 + 6"]);
            assert_eq!(trace.enlargements, 0);
            assert!(trace.iterations.iter().all(|it| it.is_consistent()));
        }
    }
}

#[test]
fn circle_trace_shape() {
    let r = ring7();
    let (_, ibba) = compute_border_basis(&r, &circle(), &BbaConfig::default()).unwrap();
    assert_eq!(ibba.iterations.len(), 2);
    let first = &ibba.iterations[0];
    assert_eq!((first.candidates, first.outside, first.zero_reductions, first.new_elements), (4, 2, 0, 2));
    let second = &ibba.iterations[1];
    assert_eq!((second.candidates, second.outside, second.new_elements), (4, 4, 0));

    let cfg = BbaConfig { variant: Variant::Bba, ..Default::default() };
    let (_, bba) = compute_border_basis(&r, &circle(), &cfg).unwrap();
    let second = &bba.iterations[1];
    assert_eq!((second.candidates, second.outside, second.zero_reductions), (8, 6, 2));
}

#[test]
fn expand_labels() {
    let r = ring7();
    let gs = gs_from(&r, 2, &circle());
    let c = expand(&gs);
    assert_eq!(c.len(), 4);
    let labels: Vec<(u32, Term)> = c.iter().map(|(pr, _)| (pr.var, pr.lt)).collect();
    let x2 = t(&r, &[2, 0]);
    let x = t(&r, &[1, 0]);
    assert_eq!(labels, vec![(1, x2), (2, x2), (1, x), (2, x)]);

    let r3 = Ring::new(7, 3, TermOrder::DegRevLex).unwrap();
    let gs = gs_from(&r3, 1, &[p(&r3, "x1")]);
    let c = expand(&gs);
    let got: Vec<String> = c.iter().map(|(_, f)| r3.format(f)).collect();
    assert_eq!(got, vec!["1*x1^2", "1*x1*x2", "1*x1*x3"]);
    assert_eq!(c.iter().map(|(pr, _)| pr.var).collect::<Vec<_>>(), vec![1, 2, 3]);

    let empty = GeneratorSet::new(r, Universe::new(&r, 1), Lookup::Tree);
    assert!(expand(&empty).is_empty());
}

#[test]
fn extension_of_circle() {
    let r = ring7();
    let mut gs = gs_from(&r, 2, &circle());
    let cands: Vec<Polynomial> = expand(&gs).into_iter().map(|(_, f)| f).collect();
    let delta = basis_extension(&mut gs, &cands);
    assert_eq!((delta.outside, delta.new_elements, delta.zero_reductions), (2, 2, 0));
    let mut lts = gs.basis.leading_terms();
    lts.sort_by(|a, b| r.cmp(b, a));
    assert_eq!(lts, vec![t(&r, &[2, 0]), t(&r, &[1, 1]), t(&r, &[0, 2]), t(&r, &[1, 0])]);
    // the elements named in the worked example lie in the span
    for s in ["x2^2 + x1 - 1", "x1*x2 - x2"] {
        assert!(gs.basis.reduce_full(&p(&r, s)).is_zero());
    }
    assert!((gs.relative_gap() - 4.0 / 6.0).abs() < 1e-12);

    let n = gs.len();
    assert_eq!(basis_extension(&mut gs, &[]), ExtensionDelta::default());
    let own: Vec<Polynomial> = gs.basis.polys().to_vec();
    let delta = basis_extension(&mut gs, &own);
    assert_eq!(delta.zero_reductions, own.len());
    assert_eq!(gs.len(), n);
}

#[test]
fn stable_span_examples() {
    let r = ring7();
    let mut gs = gs_from(&r, 2, &circle());
    lstable_span(&mut gs, Variant::Bba);
    let mut lts = gs.basis.leading_terms();
    lts.sort_by(|a, b| r.cmp(b, a));
    assert_eq!(lts, vec![t(&r, &[2, 0]), t(&r, &[1, 1]), t(&r, &[0, 2]), t(&r, &[1, 0])]);
    let before: Vec<Polynomial> = gs.basis.polys().to_vec();
    lstable_span(&mut gs, Variant::Ibba);
    assert_eq!(gs.basis.polys(), &before[..]);
    assert!(border_basis_check(&gs));

    let mut gs = gs_from(&r, 1, &[p(&r, "x1"), p(&r, "x2")]);
    lstable_span(&mut gs, Variant::Ibba);
    assert_eq!(gs.len(), 2);

    let mut empty = GeneratorSet::new(r, Universe::new(&r, 1), Lookup::Tree);
    assert_eq!(lstable_span(&mut empty, Variant::Bba), 0);
    assert!(empty.is_empty());
    assert!(!border_basis_check(&empty));
}

#[test]
fn check_on_complete_degree() {
    let r = Ring::new(31, 3, TermOrder::DegRevLex).unwrap();
    let top: Vec<Polynomial> = crate::orderideal::terms_of_degree(3, 2).into_iter().map(|m| r.monomial(1, m)).collect();
    let gs = gs_from(&r, 2, &top);
    assert!(border_basis_check(&gs));
    let bb = final_reduction(&gs).unwrap();
    assert_eq!(bb.order_ideal().len(), 4);
}

#[test]
fn enlarge_keeps_basis() {
    let r = ring7();
    let mut gs = gs_from(&r, 2, &circle());
    let before: Vec<Polynomial> = gs.basis.polys().to_vec();
    assert_eq!(gs.universe.len(), 6);
    enlarge_universe(&mut gs);
    assert_eq!(gs.universe.len(), 10);
    enlarge_universe(&mut gs);
    assert_eq!(gs.universe.degree(), 4);
    assert_eq!(gs.basis.polys(), &before[..]);
}

#[test]
fn variables_give_unit_ideal_complement() {
    let r = ring7();
    let gs = gs_from(&r, 1, &[p(&r, "x1"), p(&r, "x2")]);
    let bb = final_reduction(&gs).unwrap();
    assert_eq!(bb.order_ideal().terms(), &[Term::one(2)]);
    assert_eq!(bb.format(&r), "1*x1\n1*x2");

    let (bb2, _) = compute_border_basis(&r, &[p(&r, "x1"), p(&r, "x2")], &BbaConfig::default()).unwrap();
    assert_eq!(bb, bb2);
}

#[test]
fn missing_border_generator() {
    let r = ring7();
    // O' = {1, y} but y^2 is not a leading term
    let gs = gs_from(&r, 1, &[p(&r, "x1")]);
    assert!(matches!(final_reduction(&gs), Err(Error::MissingBorderGenerator(_))));
}

#[test]
fn positive_dimensional_hits_cap() {
    let r = ring7();
    let err = compute_border_basis(&r, &[p(&r, "x1 - 1")], &BbaConfig::default()).unwrap_err();
    assert!(matches!(err, Error::DegreeBudgetExceeded { degree: 12, cap: 11 }));
    let cfg = BbaConfig { degree_cap: Some(3), ..Default::default() };
    let err = compute_border_basis(&r, &[p(&r, "x1 - 1")], &cfg).unwrap_err();
    assert!(matches!(err, Error::DegreeBudgetExceeded { degree: 4, cap: 3 }));
}

#[test]
fn deterministic_runs() {
    let r = Ring::new(31, 3, TermOrder::DegRevLex).unwrap();
    let f = vec![
        p(&r, "x1^2 + 3*x2 - x3"),
        p(&r, "x2^2 - x1*x3 + 5"),
        p(&r, "x3^2 + x1 - 2*x2"),
    ];
    let a = compute_border_basis(&r, &f, &BbaConfig::default()).unwrap();
    let b = compute_border_basis(&r, &f, &BbaConfig::default()).unwrap();
    assert_eq!(a.0, b.0);
    assert_eq!(serde_json::to_string(&a.1).unwrap(), serde_json::to_string(&b.1).unwrap());
    let cfg = BbaConfig { variant: Variant::Bba, ..Default::default() };
    assert_eq!(compute_border_basis(&r, &f, &cfg).unwrap().0, a.0);
    a.0.validate(&r).unwrap();
}
