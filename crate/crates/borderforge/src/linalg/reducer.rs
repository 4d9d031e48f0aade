use std::collections::{BTreeMap, BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::algebra::{FieldElement, Polynomial, Ring, Term};
use crate::error::{Error, Result};

/// How a reducer set finds the reducer for a given leading term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lookup {
    /// Ordered map keyed by leading term (logarithmic lookup).
    #[default]
    Tree,
    /// Linear scan over the stored leading terms.
    Naive,
}

impl std::str::FromStr for Lookup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fge" | "tree" => Ok(Lookup::Tree),
            "naive" | "scan" => Ok(Lookup::Naive),
            _ => Err(Error::Parse(format!("unknown eliminator {s:?}"))),
        }
    }
}

/// Counters collected by a [`ReducerSet`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElimStats {
    /// Coefficient multiply-adds.
    pub ops: u64,
    /// Calls to `reduce_full`.
    pub reductions: u64,
    /// Zero polynomials offered for insertion.
    pub zero_reductions: u64,
    pub insertions: u64,
}

impl ElimStats {
    pub fn since(&self, earlier: &ElimStats) -> ElimStats {
        ElimStats {
            ops: self.ops - earlier.ops,
            reductions: self.reductions - earlier.reductions,
            zero_reductions: self.zero_reductions - earlier.zero_reductions,
            insertions: self.insertions - earlier.insertions,
        }
    }
}

/// Monic polynomials with pairwise distinct leading terms (echelon form).
#[derive(Clone, Debug)]
pub struct ReducerSet {
    ring: Ring,
    lookup: Lookup,
    polys: Vec<Polynomial>,
    tree: BTreeMap<u128, usize>,
    scan: Vec<(Term, usize)>,
    stats: ElimStats,
    dense: Dense,
}

/// Index map from terms to dense ids, the reducer tails over those ids and
/// a scratch accumulator.
#[derive(Clone, Debug, Default)]
struct Dense {
    ids: HashMap<Term, u32>,
    terms: Vec<Term>,
    keys: Vec<u128>,
    /// Tails of the reducers as (term id, coefficient), parallel to `polys`.
    tails: Vec<Vec<(u32, FieldElement)>>,
    acc: Vec<u64>,
    queued: Vec<bool>,
}

impl Dense {
    fn id(&mut self, ring: &Ring, t: &Term) -> u32 {
        if let Some(&i) = self.ids.get(t) {
            return i;
        }
        let i = self.terms.len() as u32;
        self.ids.insert(*t, i);
        self.terms.push(*t);
        self.keys.push(ring.order().key(t));
        self.acc.push(0);
        self.queued.push(false);
        i
    }

    fn index_tail(&mut self, ring: &Ring, p: &Polynomial) -> Vec<(u32, FieldElement)> {
        p.terms()[1..].iter().map(|(t, c)| (self.id(ring, t), *c)).collect()
    }
}

impl ReducerSet {
    pub fn new(ring: Ring, lookup: Lookup) -> ReducerSet {
        ReducerSet {
            ring,
            lookup,
            polys: Vec::new(),
            tree: BTreeMap::new(),
            scan: Vec::new(),
            stats: ElimStats::default(),
            dense: Dense::default(),
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn lookup(&self) -> Lookup {
        self.lookup
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn stats(&self) -> ElimStats {
        self.stats
    }

    /// Adds work done elsewhere on behalf of this set (e.g. certificates).
    pub fn charge_ops(&mut self, ops: u64) {
        self.stats.ops += ops;
    }

    #[inline]
    fn find(&self, t: &Term) -> Option<usize> {
        match self.lookup {
            Lookup::Tree => self.tree.get(&self.ring.order().key(t)).copied(),
            Lookup::Naive => self.scan.iter().find(|(s, _)| s == t).map(|(_, i)| *i),
        }
    }

    pub fn contains_lt(&self, t: &Term) -> bool {
        self.find(t).is_some()
    }

    /// The reducer with leading term `lt`. Its tail may contain leading
    /// terms of later reducers; see [`ReducerSet::reduced`].
    pub fn get(&self, lt: &Term) -> Option<&Polynomial> {
        self.find(lt).map(|i| &self.polys[i])
    }

    /// The reducer with leading term `lt` with its tail in normal form.
    pub fn reduced(&self, lt: &Term) -> Option<Polynomial> {
        let p = self.get(lt)?;
        let tail = Polynomial::from_sorted(p.terms()[1..].to_vec());
        let (nf, _) = self.normal_form(&tail);
        let mut terms = vec![p.terms()[0]];
        terms.extend_from_slice(nf.terms());
        Some(Polynomial::from_sorted(terms))
    }

    /// Reducers in insertion order.
    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    /// Leading terms, descending.
    pub fn leading_terms(&self) -> Vec<Term> {
        match self.lookup {
            Lookup::Tree => self.tree.values().rev().map(|&i| self.polys[i].terms()[0].0).collect(),
            Lookup::Naive => {
                let mut v: Vec<Term> = self.scan.iter().map(|(t, _)| *t).collect();
                self.ring.sort_desc(&mut v);
                v
            }
        }
    }

    /// Reducers sorted by descending leading term.
    pub fn sorted_desc(&self) -> Vec<&Polynomial> {
        self.leading_terms().iter().map(|t| self.get(t).expect("stored")).collect()
    }

    /// Normal form of `f` and the multiply-adds spent, without touching the
    /// counters.
    pub fn normal_form(&self, f: &Polynomial) -> (Polynomial, u64) {
        let one = self.ring.one();
        let mut ops = 0;
        let mut work = f.clone();
        let mut i = 0;
        while i < work.len() {
            let (t, c) = work.terms()[i];
            match self.find(&t) {
                Some(k) => {
                    let r = &self.polys[k];
                    ops += r.len() as u64 - 1;
                    work = self.ring.axpy(&work, c, &one, r);
                }
                None => i += 1,
            }
        }
        (work, ops)
    }

    /// Normal form of `f`: no term of the result is a leading term of a reducer.
    pub fn reduce_full(&mut self, f: &Polynomial) -> Polynomial {
        self.stats.reductions += 1;
        self.reduce_inner(f)
    }

    fn reduce_inner(&mut self, f: &Polynomial) -> Polynomial {
        if f.terms().iter().all(|(t, _)| self.find(t).is_none()) {
            return f.clone();
        }
        match self.lookup {
            Lookup::Tree => self.reduce_dense(f),
            Lookup::Naive => {
                let (g, ops) = self.normal_form(f);
                self.stats.ops += ops;
                g
            }
        }
    }

    /// Eliminates in a dense accumulator. Pending terms sit in a max-heap;
    /// the greatest one is final once popped because reducer tails only add
    /// smaller terms.
    fn reduce_dense(&mut self, f: &Polynomial) -> Polynomial {
        let ring = self.ring;
        let p = ring.field().p() as u64;
        let d = &mut self.dense;
        let mut heap = BinaryHeap::with_capacity(f.len());
        for (t, c) in f.terms() {
            let id = d.id(&ring, t);
            d.acc[id as usize] = *c as u64;
            d.queued[id as usize] = true;
            heap.push((d.keys[id as usize], id));
        }
        let mut out = Vec::new();
        while let Some((key, id)) = heap.pop() {
            let k = id as usize;
            let c = d.acc[k] % p;
            d.acc[k] = 0;
            d.queued[k] = false;
            if c == 0 {
                continue;
            }
            match self.tree.get(&key) {
                Some(&r) => {
                    let neg = p - c;
                    let tail = &d.tails[r];
                    self.stats.ops += tail.len() as u64;
                    for &(tid, e) in tail {
                        let j = tid as usize;
                        // acc < p + p^2 < 2^63 after the reduction below
                        d.acc[j] = (d.acc[j] + neg * e as u64) % p;
                        if !d.queued[j] {
                            d.queued[j] = true;
                            heap.push((d.keys[j], tid));
                        }
                    }
                }
                None => out.push((d.terms[k], c as FieldElement)),
            }
        }
        Polynomial::from_sorted(out)
    }

    /// Reduces `f` (its leading term must not be a key yet), makes it monic
    /// and inserts it. Returns `false` for the zero polynomial, which is
    /// recorded as a zero reduction.
    pub fn insert(&mut self, f: &Polynomial) -> Result<bool> {
        let Some(lt) = f.lt() else {
            self.stats.zero_reductions += 1;
            return Ok(false);
        };
        if self.find(&lt).is_some() {
            return Err(Error::DuplicateLeadingTerm(lt.to_text()));
        }
        let g = self.reduce_inner(f);
        let g = self.ring.monic(&g);
        let ring = self.ring;
        let idx = self.polys.len();
        let tail = self.dense.index_tail(&ring, &g);
        self.dense.tails.push(tail);
        self.polys.push(g);
        match self.lookup {
            Lookup::Tree => {
                self.tree.insert(ring.order().key(&lt), idx);
            }
            Lookup::Naive => self.scan.push((lt, idx)),
        }
        self.stats.insertions += 1;
        Ok(true)
    }

    /// Reduces `f` and inserts the normal form. Returns whether the set grew.
    pub fn reduce_insert(&mut self, f: &Polynomial) -> bool {
        let g = self.reduce_full(f);
        self.insert(&g).expect("normal form has a fresh leading term")
    }
}

/// Reference eliminator: repeatedly finds the greatest term of the work
/// polynomial that is the leading term of some reducer by scanning the list.
/// `reducers` must have pairwise distinct leading terms; they need not be
/// monic or inter-reduced.
pub fn reduce_full_naive(ring: &Ring, f: &Polynomial, reducers: &[Polynomial]) -> Polynomial {
    let fp = ring.field();
    let one = ring.one();
    let mut work = f.clone();
    let mut i = 0;
    while i < work.len() {
        let (t, c) = work.terms()[i];
        match reducers.iter().find(|r| r.lt() == Some(t)) {
            Some(r) => {
                let factor = fp.div(c, r.lc().unwrap()).expect("nonzero leading coefficient");
                work = ring.axpy(&work, factor, &one, r);
            }
            None => i += 1,
        }
    }
    work
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::TermOrder;

    fn ring() -> Ring {
        Ring::new(7, 2, TermOrder::DegRevLex).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let r = ring();
        for lookup in [Lookup::Tree, Lookup::Naive] {
            let mut rs = ReducerSet::new(r, lookup);
            let g = r.parse("x1^2 + x2^2 - 1").unwrap();
            assert!(rs.insert(&g).unwrap());
            let f = r.parse("x1^2 - x1").unwrap();
            assert_eq!(rs.reduce_full(&f), r.parse("-x1 - x2^2 + 1").unwrap());
            assert!(rs.reduce_full(&g).is_zero());
            assert!(rs.insert(&r.parse("x1").unwrap()).unwrap());
            let y3 = r.parse("x2^3").unwrap();
            assert_eq!(rs.reduce_full(&y3), y3);
        }
    }

    #[test]
    fn insert_examples() {
        let r = ring();
        let mut rs = ReducerSet::new(r, Lookup::Tree);
        assert!(rs.insert(&r.parse("3*x1").unwrap()).unwrap());
        assert_eq!(rs.get(&r.var(0)).unwrap(), &r.parse("x1").unwrap());
        assert!(!rs.insert(&Polynomial::zero()).unwrap());
        assert_eq!(rs.stats().zero_reductions, 1);
        assert!(matches!(rs.insert(&r.parse("x1 + 1").unwrap()), Err(Error::DuplicateLeadingTerm(_))));
    }

    #[test]
    fn echelon_and_reduced_view() {
        let r = ring();
        for lookup in [Lookup::Tree, Lookup::Naive] {
            let mut rs = ReducerSet::new(r, lookup);
            rs.insert(&r.parse("x1^2 + x1*x2 + x2").unwrap()).unwrap();
            rs.insert(&r.parse("x1*x2 + 1").unwrap()).unwrap();
            rs.insert(&r.parse("x2 + 3").unwrap()).unwrap();
            let lts = rs.leading_terms();
            assert_eq!(lts, vec![r.term(&[2, 0]).unwrap(), r.term(&[1, 1]).unwrap(), r.var(1)]);
            assert!(rs.polys().iter().all(|p| p.is_monic()));
            let x2 = r.term(&[2, 0]).unwrap();
            assert_eq!(rs.get(&x2).unwrap(), &r.parse("x1^2 + x1*x2 + x2").unwrap());
            assert_eq!(rs.reduced(&x2).unwrap(), r.parse("x1^2 + 3").unwrap());
            assert!(rs.reduced(&r.var(0)).is_none());
        }
    }

    #[test]
    fn naive_reference_examples() {
        let r = ring();
        let g = r.parse("x1^2 + x2^2 - 1").unwrap();
        let f = r.parse("x1^2 - x1").unwrap();
        assert_eq!(reduce_full_naive(&r, &f, std::slice::from_ref(&g)), r.parse("-x1 - x2^2 + 1").unwrap());
        assert!(reduce_full_naive(&r, &g, std::slice::from_ref(&g)).is_zero());
        assert_eq!(reduce_full_naive(&r, &f, &[]), f);
    }
}
