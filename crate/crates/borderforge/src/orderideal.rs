//! Order ideals, borders, corner terms and the degree-complete universe.

use std::collections::HashSet;

use crate::algebra::{Ring, Term};
use crate::error::{Error, Result};

/// Whether `terms` is closed under taking divisors.
pub fn is_order_ideal(terms: &[Term]) -> bool {
    let set: HashSet<Term> = terms.iter().copied().collect();
    is_closed(&set)
}

fn is_closed(set: &HashSet<Term>) -> bool {
    let Some(n) = set.iter().next().map(|t| t.nvars()) else {
        return true;
    };
    set.iter().all(|t| {
        t.nvars() == n && (0..n).all(|i| t.div_var(i).is_none_or(|s| set.contains(&s)))
    })
}

/// A finite divisibility-closed set of terms with a cached descending view.
#[derive(Clone, Debug)]
pub struct OrderIdeal {
    set: HashSet<Term>,
    sorted: Vec<Term>,
}

impl PartialEq for OrderIdeal {
    fn eq(&self, other: &Self) -> bool {
        self.set == other.set
    }
}

impl Eq for OrderIdeal {}

impl OrderIdeal {
    pub fn new(ring: &Ring, terms: impl IntoIterator<Item = Term>) -> Result<OrderIdeal> {
        let set: HashSet<Term> = terms.into_iter().collect();
        if set.iter().any(|t| t.nvars() != ring.nvars()) {
            return Err(Error::DimensionMismatch {
                expected: ring.nvars(),
                found: set.iter().find(|t| t.nvars() != ring.nvars()).unwrap().nvars(),
            });
        }
        if !is_closed(&set) {
            return Err(Error::NotAnOrderIdeal);
        }
        Ok(Self::from_closed(ring, set))
    }

    pub(crate) fn from_closed(ring: &Ring, set: HashSet<Term>) -> OrderIdeal {
        let mut sorted: Vec<Term> = set.iter().copied().collect();
        ring.sort_desc(&mut sorted);
        OrderIdeal { set, sorted }
    }

    pub fn empty() -> OrderIdeal {
        OrderIdeal { set: HashSet::new(), sorted: Vec::new() }
    }

    #[inline]
    pub fn contains(&self, t: &Term) -> bool {
        self.set.contains(t)
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Terms in descending order.
    pub fn terms(&self) -> &[Term] {
        &self.sorted
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.sorted.first().map(|t| t.degree())
    }

    /// `(x_1 O ∪ ... ∪ x_n O) \ O`, sorted descending.
    pub fn border(&self, ring: &Ring) -> Vec<Term> {
        let mut out = HashSet::new();
        for t in &self.sorted {
            for j in 0..ring.nvars() {
                if let Some(s) = t.mul_var(j) {
                    if !self.set.contains(&s) {
                        out.insert(s);
                    }
                }
            }
        }
        let mut v: Vec<Term> = out.into_iter().collect();
        ring.sort_desc(&mut v);
        v
    }

    /// Divisibility-maximal elements, sorted descending.
    pub fn corners(&self, ring: &Ring) -> Vec<Term> {
        self.sorted
            .iter()
            .filter(|t| (0..ring.nvars()).all(|j| t.mul_var(j).is_none_or(|s| !self.set.contains(&s))))
            .copied()
            .collect()
    }
}

/// Checked border of an arbitrary term set.
pub fn border(ring: &Ring, terms: &[Term]) -> Result<Vec<Term>> {
    Ok(OrderIdeal::new(ring, terms.iter().copied())?.border(ring))
}

/// Checked corner terms of an arbitrary term set.
pub fn corner_terms(ring: &Ring, terms: &[Term]) -> Result<Vec<Term>> {
    Ok(OrderIdeal::new(ring, terms.iter().copied())?.corners(ring))
}

/// Union of the divisor sets of `corners`.
pub fn reconstruct_from_corners(ring: &Ring, corners: &[Term]) -> OrderIdeal {
    let mut set = HashSet::new();
    let mut stack: Vec<Term> = corners.to_vec();
    while let Some(t) = stack.pop() {
        if set.insert(t) {
            for i in 0..t.nvars() {
                if let Some(s) = t.div_var(i) {
                    if !set.contains(&s) {
                        stack.push(s);
                    }
                }
            }
        }
    }
    OrderIdeal::from_closed(ring, set)
}

/// All terms in `n` variables of total degree exactly `d`.
pub fn terms_of_degree(n: usize, d: u32) -> Vec<Term> {
    let mut out = Vec::new();
    let mut e = vec![0u32; n];
    fn rec(i: usize, left: u32, e: &mut Vec<u32>, out: &mut Vec<Term>) {
        if i + 1 == e.len() {
            e[i] = left;
            out.push(Term::new(e).expect("exponent in range"));
            return;
        }
        for k in (0..=left).rev() {
            e[i] = k;
            rec(i + 1, left - k, e, out);
        }
        e[i] = 0;
    }
    if n == 0 {
        if d == 0 {
            out.push(Term::one(0));
        }
        return out;
    }
    rec(0, d, &mut e, &mut out);
    out
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// The universe L of all terms of total degree at most `degree`.
#[derive(Clone, Debug)]
pub struct Universe {
    degree: u32,
    terms: Vec<Term>,
}

impl Universe {
    pub fn new(ring: &Ring, degree: u32) -> Universe {
        let mut terms = Vec::new();
        for d in (0..=degree).rev() {
            let mut layer = terms_of_degree(ring.nvars(), d);
            ring.sort_desc(&mut layer);
            terms.extend(layer);
        }
        Universe { degree, terms }
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.degree
    }

    #[inline]
    pub fn contains(&self, t: &Term) -> bool {
        t.degree() <= self.degree
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// All terms, descending.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Corner terms: everything of degree exactly `degree`.
    pub fn corners(&self) -> Vec<Term> {
        self.terms.iter().filter(|t| t.degree() == self.degree).copied().collect()
    }

    pub fn enlarged(&self, ring: &Ring) -> Universe {
        Universe::new(ring, self.degree + 1)
    }
}
