use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::field::{FieldElement, PrimeField};
use super::term::{Term, TermOrder, MAX_VARS};
use crate::error::{Error, Result};

/// Sparse polynomial: terms strictly descending in the ring's order, no zero
/// coefficients. Built through [`Ring`] so the ordering invariant holds.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Polynomial {
    terms: Vec<(Term, FieldElement)>,
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial { terms: Vec::new() }
    }

    /// Wraps an already normalized term list. Callers must guarantee the
    /// ordering and nonzero invariants.
    pub(crate) fn from_sorted(terms: Vec<(Term, FieldElement)>) -> Polynomial {
        Polynomial { terms }
    }

    #[inline]
    pub fn terms(&self) -> &[(Term, FieldElement)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Term, FieldElement)> {
        self.terms
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    #[inline]
    pub fn lt(&self) -> Option<Term> {
        self.terms.first().map(|(t, _)| *t)
    }

    #[inline]
    pub fn lc(&self) -> Option<FieldElement> {
        self.terms.first().map(|(_, c)| *c)
    }

    pub fn is_monic(&self) -> bool {
        self.lc() == Some(1)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|(t, _)| t.degree()).max()
    }

    pub fn support(&self) -> impl Iterator<Item = &Term> + '_ {
        self.terms.iter().map(|(t, _)| t)
    }

    /// Coefficient of `t`, zero if absent.
    pub fn coeff(&self, t: &Term) -> FieldElement {
        self.terms.iter().find(|(s, _)| s == t).map(|(_, c)| *c).unwrap_or(0)
    }

    /// Keeps the `l` greatest terms.
    pub fn truncated(&self, l: usize) -> Polynomial {
        Polynomial { terms: self.terms.iter().take(l).copied().collect() }
    }
}

/// Computation context: coefficient field, number of variables, term order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ring {
    field: PrimeField,
    n: usize,
    order: TermOrder,
}

impl Ring {
    pub fn new(p: u64, n: usize, order: TermOrder) -> Result<Ring> {
        let field = PrimeField::new(p)?;
        Ring::with_field(field, n, order)
    }

    pub fn with_field(field: PrimeField, n: usize, order: TermOrder) -> Result<Ring> {
        if n > MAX_VARS {
            return Err(Error::TooManyVariables(n));
        }
        Ok(Ring { field, n, order })
    }

    #[inline]
    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.field.p()
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn order(&self) -> TermOrder {
        self.order
    }

    #[inline]
    pub fn cmp(&self, a: &Term, b: &Term) -> Ordering {
        self.order.cmp(a, b)
    }

    pub fn term(&self, exps: &[u32]) -> Result<Term> {
        self.check_len(exps.len())?;
        Term::new(exps)
    }

    pub fn one(&self) -> Term {
        Term::one(self.n)
    }

    pub fn var(&self, i: usize) -> Term {
        Term::var(self.n, i)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: len });
        }
        Ok(())
    }

    /// Sorts the terms descending in place.
    pub fn sort_desc(&self, terms: &mut [Term]) {
        terms.sort_unstable_by(|a, b| self.cmp(b, a));
    }

    /// Builds a normalized polynomial from arbitrary (term, coefficient) pairs.
    pub fn poly(&self, mut terms: Vec<(Term, FieldElement)>) -> Result<Polynomial> {
        for (t, _) in &terms {
            self.check_len(t.nvars())?;
        }
        terms.sort_by(|a, b| self.cmp(&b.0, &a.0));
        let mut out: Vec<(Term, FieldElement)> = Vec::with_capacity(terms.len());
        for (t, c) in terms {
            let c = c % self.p();
            match out.last_mut() {
                Some((s, d)) if *s == t => *d = self.field.add(*d, c),
                _ => out.push((t, c)),
            }
        }
        out.retain(|(_, c)| *c != 0);
        Ok(Polynomial::from_sorted(out))
    }

    /// Convenience constructor from signed coefficients and exponent slices.
    pub fn poly_i64(&self, terms: &[(i64, &[u32])]) -> Result<Polynomial> {
        let mut v = Vec::with_capacity(terms.len());
        for (c, e) in terms {
            v.push((self.term(e)?, self.field.from_i64(*c)));
        }
        self.poly(v)
    }

    pub fn monomial(&self, c: FieldElement, t: Term) -> Polynomial {
        let c = c % self.p();
        if c == 0 {
            Polynomial::zero()
        } else {
            Polynomial::from_sorted(vec![(t, c)])
        }
    }

    /// `f - c * t * g`.
    pub fn axpy(&self, f: &Polynomial, c: FieldElement, t: &Term, g: &Polynomial) -> Polynomial {
        let c = c % self.p();
        if c == 0 || g.is_zero() {
            return f.clone();
        }
        let neg = self.field.neg(c);
        let fp = &self.field;
        let a = f.terms();
        let b = g.terms();
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let bt = if j < b.len() { Some(b[j].0.mul(t).expect("exponent overflow")) } else { None };
            let ord = match (i < a.len(), bt) {
                (true, Some(ref s)) => self.cmp(&a[i].0, s),
                (true, None) => Ordering::Greater,
                (false, _) => Ordering::Less,
            };
            match ord {
                Ordering::Greater => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Less => {
                    out.push((bt.unwrap(), fp.mul(neg, b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let v = fp.mul_add(a[i].1, neg, b[j].1);
                    if v != 0 {
                        out.push((a[i].0, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Polynomial::from_sorted(out)
    }

    /// `c * t * g`.
    pub fn mul_term(&self, c: FieldElement, t: &Term, g: &Polynomial) -> Polynomial {
        let c = c % self.p();
        if c == 0 {
            return Polynomial::zero();
        }
        Polynomial::from_sorted(
            g.terms()
                .iter()
                .map(|(s, d)| (s.mul(t).expect("exponent overflow"), self.field.mul(c, *d)))
                .collect(),
        )
    }

    /// x_{j+1} * g, `None` if an exponent would overflow.
    pub fn mul_var(&self, j: usize, g: &Polynomial) -> Option<Polynomial> {
        let mut v = Vec::with_capacity(g.len());
        for (s, c) in g.terms() {
            v.push((s.mul_var(j)?, *c));
        }
        Some(Polynomial::from_sorted(v))
    }

    pub fn add(&self, f: &Polynomial, g: &Polynomial) -> Polynomial {
        self.axpy(f, self.p() - 1, &self.one(), g)
    }

    pub fn sub(&self, f: &Polynomial, g: &Polynomial) -> Polynomial {
        self.axpy(f, 1, &self.one(), g)
    }

    pub fn scale(&self, c: FieldElement, f: &Polynomial) -> Polynomial {
        self.mul_term(c, &self.one(), f)
    }

    /// Divides by the leading coefficient. Zero stays zero.
    pub fn monic(&self, f: &Polynomial) -> Polynomial {
        match f.lc() {
            None | Some(1) => f.clone(),
            Some(c) => self.scale(self.field.inv(c).expect("nonzero leading coefficient"), f),
        }
    }

    /// Full product, accumulated one term of `f` at a time.
    pub fn mul(&self, f: &Polynomial, g: &Polynomial) -> Polynomial {
        let mut acc = Polynomial::zero();
        for (t, c) in f.terms() {
            acc = self.axpy(&acc, self.field.neg(*c), t, g);
        }
        acc
    }

    pub fn eval(&self, f: &Polynomial, point: &[FieldElement]) -> Result<FieldElement> {
        self.check_len(point.len())?;
        let mut acc = 0;
        for (t, c) in f.terms() {
            acc = self.field.add(acc, self.field.mul(*c, self.eval_term(t, point)));
        }
        Ok(acc)
    }

    pub fn eval_term(&self, t: &Term, point: &[FieldElement]) -> FieldElement {
        let mut v = 1;
        for (i, &x) in point.iter().enumerate().take(self.n) {
            v = self.field.mul(v, self.field.pow(x, t.exp(i) as u64));
        }
        v
    }

    /// Text form, e.g. `1*x1^2 + 1*x2^2 + 6`.
    pub fn format(&self, f: &Polynomial) -> String {
        if f.is_zero() {
            return "0".to_string();
        }
        f.terms()
            .iter()
            .map(|(t, c)| if t.is_one() { c.to_string() } else { format!("{c}*{}", t.to_text()) })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Parses the text form. Accepts `-`, omitted coefficients, repeated
    /// factors and arbitrary integer coefficients.
    pub fn parse(&self, s: &str) -> Result<Polynomial> {
        let mut out = Vec::new();
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let bytes = compact.as_bytes();
        let mut start = 0;
        let mut chunks = Vec::new();
        for i in 0..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && i > 0 && bytes[i - 1] != b'^' {
                chunks.push(&compact[start..i]);
                start = i;
            }
        }
        chunks.push(&compact[start..]);
        for chunk in chunks {
            let (neg, body) = match chunk.as_bytes().first() {
                Some(b'+') => (false, &chunk[1..]),
                Some(b'-') => (true, &chunk[1..]),
                _ => (false, chunk),
            };
            if body.is_empty() {
                return Err(Error::Parse(format!("dangling sign in {s:?}")));
            }
            let (c, t) = self.parse_monomial(body)?;
            out.push((t, if neg { self.field.neg(c) } else { c }));
        }
        self.poly(out)
    }

    fn parse_monomial(&self, s: &str) -> Result<(FieldElement, Term)> {
        let mut coeff: FieldElement = 1 % self.p();
        let mut exps = vec![0u32; self.n];
        for factor in s.split('*') {
            if factor.is_empty() {
                return Err(Error::Parse(format!("empty factor in {s:?}")));
            }
            if factor.as_bytes()[0].is_ascii_digit() {
                let v: u128 = factor.parse().map_err(|_| Error::Parse(format!("bad coefficient {factor:?}")))?;
                coeff = self.field.mul(coeff, (v % self.p() as u128) as u32);
                continue;
            }
            let rest = factor
                .strip_prefix('x')
                .ok_or_else(|| Error::Parse(format!("bad factor {factor:?}")))?;
            let (idx, pow) = match rest.split_once('^') {
                Some((i, e)) => (i, e.parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?),
                None => (rest, 1),
            };
            let i: usize = idx.parse().map_err(|_| Error::Parse(format!("bad variable {factor:?}")))?;
            if i == 0 || i > self.n {
                return Err(Error::Parse(format!("variable x{i} out of range 1..={}", self.n)));
            }
            exps[i - 1] += pow;
        }
        Ok((coeff, Term::new(&exps)?))
    }
}
