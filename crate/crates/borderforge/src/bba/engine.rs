use std::collections::HashMap;

use super::basis::{BorderBasis, ExpansionPair, GeneratorSet};
use super::trace::{ExpansionKind, IterationRecord, RunTrace, TraceEvent};
use crate::algebra::{Polynomial, Ring, Term};
use crate::error::{Error, Result};
use crate::linalg::Lookup;
use crate::orderideal::{OrderIdeal, Universe};

/// Outcome of one basis extension.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtensionDelta {
    pub candidates: usize,
    pub outside: usize,
    pub zero_reductions: usize,
    pub new_elements: usize,
    pub ops: u64,
    /// Pairs whose candidate added a basis element, in processing order.
    pub successful: Vec<ExpansionPair>,
    /// Leading terms of the added elements.
    pub inserted: Vec<Term>,
}

/// A labelled candidate; `None` when the product leaves the universe.
pub type Candidate = (ExpansionPair, Option<Polynomial>);

/// Forms x_j * v for each pair. Pairs naming no basis element are counted
/// as stale and skipped.
pub fn build_candidates(gs: &GeneratorSet, pairs: &[ExpansionPair]) -> (Vec<Candidate>, usize) {
    let ring = *gs.ring();
    let d = gs.universe.degree();
    let mut out = Vec::with_capacity(pairs.len());
    let mut stale = 0;
    for pair in pairs {
        match gs.basis.get(&pair.lt) {
            None => stale += 1,
            Some(v) => {
                let inside = v.degree().is_some_and(|dv| dv < d);
                let prod = if inside { ring.mul_var(pair.var_index(), v) } else { None };
                out.push((*pair, prod));
            }
        }
    }
    (out, stale)
}

/// Reduces each in-universe candidate in order and inserts nonzero normal forms.
pub fn extend_with(gs: &mut GeneratorSet, candidates: &[Candidate]) -> ExtensionDelta {
    let before = gs.basis.stats();
    let mut delta = ExtensionDelta { candidates: candidates.len(), ..Default::default() };
    for (pair, prod) in candidates {
        let Some(f) = prod else {
            delta.outside += 1;
            continue;
        };
        let g = gs.basis.reduce_full(f);
        let lt = g.lt();
        if gs.basis.insert(&g).expect("normal form has a fresh leading term") {
            delta.new_elements += 1;
            delta.successful.push(*pair);
            delta.inserted.push(lt.unwrap());
        } else {
            delta.zero_reductions += 1;
        }
    }
    delta.ops = gs.basis.stats().since(&before).ops;
    delta
}

/// All n*|V| pairs, descending leading term then ascending variable.
pub fn all_pairs(gs: &GeneratorSet) -> Vec<ExpansionPair> {
    let n = gs.ring().nvars() as u32;
    gs.basis
        .leading_terms()
        .into_iter()
        .flat_map(|lt| (1..=n).map(move |j| ExpansionPair::new(j, lt)))
        .collect()
}

pub fn default_degree_cap(initial: u32) -> u32 {
    (2 * initial).max(initial + 10)
}

/// Mutable state of one computation, shared by every algorithm variant.
pub(crate) struct Engine {
    pub gs: GeneratorSet,
    /// Variables not yet expanded in the current universe, per leading term.
    pending: HashMap<Term, u32>,
    /// Pairs whose product left the universe; expanded again after the
    /// next enlargement.
    deferred: HashMap<Term, u32>,
    pub trace: RunTrace,
    pub stage: usize,
    degree_cap: u32,
    pub inputs: Vec<Polynomial>,
}

impl Engine {
    pub fn new(ring: Ring, inputs: &[Polynomial], lookup: Lookup, degree_cap: Option<u32>) -> Result<Engine> {
        for f in inputs {
            if let Some(t) = f.lt() {
                if t.nvars() != ring.nvars() {
                    return Err(Error::DimensionMismatch { expected: ring.nvars(), found: t.nvars() });
                }
            }
        }
        let d0 = inputs.iter().filter_map(|f| f.degree()).max().unwrap_or(0);
        let cap = degree_cap.unwrap_or_else(|| default_degree_cap(d0));
        let mut gs = GeneratorSet::new(ring, Universe::new(&ring, d0), lookup);
        let mut zero = 0;
        for f in inputs.iter().filter(|f| !f.is_zero()) {
            if !gs.basis.reduce_insert(f) {
                zero += 1;
            }
        }
        let trace = RunTrace {
            initial_degree: d0,
            final_degree: d0,
            initial_ops: gs.basis.stats().ops,
            initial_zero_reductions: zero,
            ..Default::default()
        };
        let mut e = Engine { gs, pending: HashMap::new(), deferred: HashMap::new(), trace, stage: 0, degree_cap: cap, inputs: inputs.to_vec() };
        e.reset_pending();
        Ok(e)
    }

    fn all_mask(&self) -> u32 {
        (1u32 << self.gs.ring().nvars()) - 1
    }

    fn reset_pending(&mut self) {
        let mask = self.all_mask();
        self.pending = self.gs.basis.leading_terms().into_iter().map(|t| (t, mask)).collect();
    }

    pub fn all_pairs(&self) -> Vec<ExpansionPair> {
        all_pairs(&self.gs)
    }

    pub fn pending_pairs(&self) -> Vec<ExpansionPair> {
        let n = self.gs.ring().nvars();
        let mut out = Vec::new();
        for lt in self.gs.basis.leading_terms() {
            let mask = self.pending.get(&lt).copied().unwrap_or(0);
            for j in 0..n {
                if mask & (1 << j) != 0 {
                    out.push(ExpansionPair::new(j as u32 + 1, lt));
                }
            }
        }
        out
    }


    /// Expands `pairs`, records one iteration and returns its delta.
    pub fn extend(&mut self, pairs: &[ExpansionPair], kind: ExpansionKind) -> (IterationRecord, ExtensionDelta) {
        let basis_before = self.gs.len();
        let (cands, stale) = build_candidates(&self.gs, pairs);
        for (pair, prod) in &cands {
            let bit = 1 << pair.var_index();
            if let Some(m) = self.pending.get_mut(&pair.lt) {
                *m &= !bit;
            }
            if prod.is_none() {
                *self.deferred.entry(pair.lt).or_insert(0) |= bit;
            }
        }
        let delta = extend_with(&mut self.gs, &cands);
        let mask = self.all_mask();
        for lt in &delta.inserted {
            self.pending.insert(*lt, mask);
        }
        let rec = IterationRecord {
            index: self.trace.iterations.len(),
            stage: self.stage,
            kind,
            universe_degree: self.gs.universe.degree(),
            universe_size: self.gs.universe.len(),
            basis_before,
            basis_after: self.gs.len(),
            candidates: delta.candidates,
            outside: delta.outside,
            zero_reductions: delta.zero_reductions,
            new_elements: delta.new_elements,
            stale,
            ops: delta.ops,
        };
        self.trace.iterations.push(rec.clone());
        (rec, delta)
    }

    pub fn border_check(&self) -> bool {
        border_check(&self.gs)
    }

    pub fn enlarge(&mut self) -> Result<()> {
        let next = self.gs.universe.degree() + 1;
        if next > self.degree_cap {
            return Err(Error::DegreeBudgetExceeded { degree: next, cap: self.degree_cap });
        }
        self.gs.universe = self.gs.universe.enlarged(self.gs.ring());
        self.stage += 1;
        self.trace.enlargements += 1;
        self.trace.final_degree = next;
        self.trace.final_stage_start = self.trace.iterations.len();
        self.trace.events.push(TraceEvent::Enlarged { iteration: self.trace.iterations.len(), degree: next });
        // products inside the old universe are already in the span
        for (lt, bits) in self.deferred.drain() {
            *self.pending.entry(lt).or_insert(0) |= bits;
        }
        Ok(())
    }

    pub fn finish(self) -> Result<(BorderBasis, RunTrace)> {
        let bb = final_reduction(&self.gs)?;
        Ok((bb, self.trace))
    }
}

/// O' = L \ lt(V) must have its border inside L. Since L is degree-complete
/// this means O' is an order ideal with no term of top degree.
pub fn border_check(gs: &GeneratorSet) -> bool {
    let d = gs.universe.degree();
    let o = gs.tentative_order_ideal();
    if o.iter().any(|t| t.degree() == d) {
        return false;
    }
    crate::orderideal::is_order_ideal(&o)
}

pub fn final_reduction(gs: &GeneratorSet) -> Result<BorderBasis> {
    let ring = *gs.ring();
    let o = OrderIdeal::new(&ring, gs.tentative_order_ideal())?;
    let polys = o
        .border(&ring)
        .into_iter()
        .map(|b| gs.basis.reduced(&b).ok_or_else(|| Error::MissingBorderGenerator(b.to_text())))
        .collect::<Result<Vec<_>>>()?;
    BorderBasis::new(&ring, o, polys)
}
