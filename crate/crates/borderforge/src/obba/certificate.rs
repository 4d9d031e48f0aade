use crate::algebra::Polynomial;
use crate::bba::mulmat::MulMatrices;
use crate::bba::GeneratorSet;
use crate::orderideal::is_order_ideal;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Verdict {
    pub accepted: bool,
    pub reason: &'static str,
    pub ops: u64,
}

impl Verdict {
    fn reject(reason: &'static str, ops: u64) -> Verdict {
        Verdict { accepted: false, reason, ops }
    }
}

/// Tests whether V already holds a border basis of the input ideal with
/// order ideal L \ lt(V).
///
/// The prebasis is accepted when its multiplication matrices commute and
/// every input has normal form zero.
pub(crate) fn certify(gs: &GeneratorSet, inputs: &[Polynomial]) -> Verdict {
    let d = gs.universe.degree();
    let o = gs.tentative_order_ideal();
    if o.iter().any(|t| t.degree() == d) {
        return Verdict::reject("order ideal reaches the universe boundary", 0);
    }
    if !is_order_ideal(&o) {
        return Verdict::reject("not an order ideal", 0);
    }
    if o.is_empty() {
        // 1 is a leading term, so every input reduces to zero
        return Verdict { accepted: true, reason: "unit ideal", ops: 0 };
    }
    let ring = gs.ring();
    let f = ring.field();
    let mut rewrite_ops = 0;
    let mats = MulMatrices::build(ring, &o, |b| {
        let p = gs.basis.get(b)?;
        let tail = Polynomial::from_sorted(p.terms()[1..].to_vec());
        let (nf, ops) = gs.basis.normal_form(&tail);
        rewrite_ops += ops;
        Some(nf.terms().iter().map(|&(t, c)| (t, f.neg(c))).collect())
    });
    let Some(mut mats) = mats else {
        return Verdict::reject("missing border generator", rewrite_ops);
    };
    mats.ops += rewrite_ops;
    if !mats.commute() {
        return Verdict::reject("multiplication matrices do not commute", mats.ops);
    }
    for g in inputs {
        if mats.normal_form(g).iter().any(|&x| x != 0) {
            return Verdict::reject("an input has nonzero normal form", mats.ops);
        }
    }
    Verdict { accepted: true, reason: "certified", ops: mats.ops }
}
