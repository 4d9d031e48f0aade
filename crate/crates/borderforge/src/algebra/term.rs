use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of variables.
pub const MAX_VARS: usize = 12;
/// Largest exponent of a single variable.
pub const MAX_EXP: u32 = u8::MAX as u32;

/// A power product x^a, stored as its exponent vector.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term {
    exps: [u8; MAX_VARS],
    n: u8,
    deg: u16,
}

impl Term {
    pub fn new(exps: &[u32]) -> Result<Term> {
        if exps.len() > MAX_VARS {
            return Err(Error::TooManyVariables(exps.len()));
        }
        let mut e = [0u8; MAX_VARS];
        let mut deg = 0u16;
        for (slot, &x) in e.iter_mut().zip(exps) {
            if x > MAX_EXP {
                return Err(Error::ExponentOverflow { max: MAX_EXP });
            }
            *slot = x as u8;
            deg += x as u16;
        }
        Ok(Term { exps: e, n: exps.len() as u8, deg })
    }

    /// The unit term 1 in `n` variables.
    pub fn one(n: usize) -> Term {
        assert!(n <= MAX_VARS, "too many variables");
        Term { exps: [0; MAX_VARS], n: n as u8, deg: 0 }
    }

    /// The variable x_{i+1} (zero based index `i`).
    pub fn var(n: usize, i: usize) -> Term {
        assert!(i < n && n <= MAX_VARS);
        let mut t = Term::one(n);
        t.exps[i] = 1;
        t.deg = 1;
        t
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.deg as u32
    }

    #[inline]
    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i] as u32
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.exps[..self.n as usize].iter().map(|&e| e as u32).collect()
    }

    #[inline]
    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    fn check_dim(&self, other: &Term) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n as usize, found: other.n as usize });
        }
        Ok(())
    }

    /// Whether `self` divides `other`.
    pub fn divides(&self, other: &Term) -> Result<bool> {
        self.check_dim(other)?;
        Ok(self.divides_unchecked(other))
    }

    #[inline]
    pub(crate) fn divides_unchecked(&self, other: &Term) -> bool {
        self.deg <= other.deg && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// Product of two terms, `None` on exponent overflow.
    pub fn mul(&self, other: &Term) -> Option<Term> {
        debug_assert_eq!(self.n, other.n);
        let mut t = *self;
        for (a, b) in t.exps.iter_mut().zip(&other.exps) {
            *a = a.checked_add(*b)?;
        }
        t.deg += other.deg;
        Some(t)
    }

    /// x_{j+1} times `self`.
    #[inline]
    pub fn mul_var(&self, j: usize) -> Option<Term> {
        debug_assert!(j < self.n as usize);
        let mut t = *self;
        t.exps[j] = t.exps[j].checked_add(1)?;
        t.deg += 1;
        Some(t)
    }

    /// `self / x_{j+1}` if x_{j+1} divides `self`.
    #[inline]
    pub fn div_var(&self, j: usize) -> Option<Term> {
        if self.exps[j] == 0 {
            return None;
        }
        let mut t = *self;
        t.exps[j] -= 1;
        t.deg -= 1;
        Some(t)
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Term) -> Option<Term> {
        if self.n != other.n || !other.divides_unchecked(self) {
            return None;
        }
        let mut t = *self;
        for (a, b) in t.exps.iter_mut().zip(&other.exps) {
            *a -= *b;
        }
        t.deg -= other.deg;
        Some(t)
    }

    /// Text form `x1^2*x3`, or `1` for the unit.
    pub fn to_text(&self) -> String {
        if self.is_one() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        for i in 0..self.n as usize {
            match self.exps[i] {
                0 => {}
                1 => parts.push(format!("x{}", i + 1)),
                e => parts.push(format!("x{}^{}", i + 1, e)),
            }
        }
        parts.join("*")
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.exps[..self.n as usize])
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.exps[..self.n as usize].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<u32>::deserialize(d)?;
        Term::new(&v).map_err(serde::de::Error::custom)
    }
}

/// Degree-compatible term orders.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermOrder {
    /// Degree reverse lexicographic, x1 > x2 > ... > xn.
    #[default]
    DegRevLex,
    /// Degree lexicographic, x1 > x2 > ... > xn.
    DegLex,
}

impl TermOrder {
    #[inline]
    pub fn cmp(&self, a: &Term, b: &Term) -> Ordering {
        match a.deg.cmp(&b.deg) {
            Ordering::Equal => {}
            o => return o,
        }
        let n = a.n as usize;
        match self {
            TermOrder::DegRevLex => {
                for i in (0..n).rev() {
                    if a.exps[i] != b.exps[i] {
                        return b.exps[i].cmp(&a.exps[i]);
                    }
                }
                Ordering::Equal
            }
            TermOrder::DegLex => a.exps[..n].cmp(&b.exps[..n]),
        }
    }

    /// Checked comparison.
    pub fn compare(&self, a: &Term, b: &Term) -> Result<Ordering> {
        a.check_dim(b)?;
        Ok(self.cmp(a, b))
    }

    /// An integer whose natural order agrees with this term order for terms
    /// with the same number of variables.
    #[inline]
    pub fn key(&self, t: &Term) -> u128 {
        let n = t.n as usize;
        let mut k = t.deg as u128;
        match self {
            TermOrder::DegRevLex => {
                for i in (0..n).rev() {
                    k = (k << 8) | (255 - t.exps[i]) as u128;
                }
            }
            TermOrder::DegLex => {
                for i in 0..n {
                    k = (k << 8) | t.exps[i] as u128;
                }
            }
        }
        k << (8 * (MAX_VARS - n))
    }

    pub fn name(&self) -> &'static str {
        match self {
            TermOrder::DegRevLex => "degrevlex",
            TermOrder::DegLex => "deglex",
        }
    }
}

impl std::str::FromStr for TermOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "degrevlex" | "grevlex" => Ok(TermOrder::DegRevLex),
            "deglex" | "grlex" => Ok(TermOrder::DegLex),
            _ => Err(Error::Parse(format!("unknown term order {s:?}"))),
        }
    }
}
