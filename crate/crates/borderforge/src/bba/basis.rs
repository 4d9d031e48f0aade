use serde::{Deserialize, Serialize};

use crate::algebra::{FieldElement, Polynomial, Ring, Term};
use crate::error::{Error, Result};
use crate::linalg::{Lookup, ReducerSet};
use super::mulmat::MulMatrices;
use crate::orderideal::{OrderIdeal, Universe};

/// A candidate x_var * v named by the variable (1-based) and lt(v).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExpansionPair {
    pub var: u32,
    pub lt: Term,
}

impl ExpansionPair {
    pub fn new(var: u32, lt: Term) -> ExpansionPair {
        ExpansionPair { var, lt }
    }

    /// Zero-based variable index.
    #[inline]
    pub fn var_index(&self) -> usize {
        self.var as usize - 1
    }
}

impl Serialize for ExpansionPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.var, self.lt).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExpansionPair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (var, lt) = <(u32, Term)>::deserialize(d)?;
        if var == 0 || var as usize > lt.nvars() {
            return Err(serde::de::Error::custom(format!("variable index {var} out of range")));
        }
        Ok(ExpansionPair { var, lt })
    }
}

/// Echelon basis V inside the universe L.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub basis: ReducerSet,
    pub universe: Universe,
}

impl GeneratorSet {
    pub fn new(ring: Ring, universe: Universe, lookup: Lookup) -> GeneratorSet {
        GeneratorSet { basis: ReducerSet::new(ring, lookup), universe }
    }

    pub fn ring(&self) -> &Ring {
        self.basis.ring()
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// |V| / |L|.
    pub fn relative_gap(&self) -> f64 {
        self.basis.len() as f64 / self.universe.len() as f64
    }

    /// Terms of L that are not leading terms of V, descending.
    pub fn tentative_order_ideal(&self) -> Vec<Term> {
        self.universe.terms().iter().filter(|t| !self.basis.contains_lt(t)).copied().collect()
    }
}

/// An O-border basis: one polynomial b - sum c_t t (t in O) per border term b.
///
/// The border term need not be the leading term when O is not the
/// complement of a leading term ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BorderBasis {
    order_ideal: OrderIdeal,
    keys: Vec<Term>,
    polys: Vec<Polynomial>,
}

#[derive(Serialize, Deserialize)]
struct BorderBasisRepr {
    order_ideal: Vec<Term>,
    polys: Vec<Vec<(FieldElement, Term)>>,
}

impl BorderBasis {
    /// Sorts `polys` by border term and validates every invariant.
    pub fn new(ring: &Ring, order_ideal: OrderIdeal, polys: Vec<Polynomial>) -> Result<BorderBasis> {
        let mut keyed = Vec::with_capacity(polys.len());
        for p in polys {
            let mut outside = p.terms().iter().filter(|(t, _)| !order_ideal.contains(t));
            let head = match (outside.next(), outside.next()) {
                (Some(&(t, 1)), None) => t,
                _ => {
                    return Err(Error::InvalidConfig(format!(
                        "{} is not of the form b - sum c_t t with t in O",
                        ring.format(&p)
                    )))
                }
            };
            keyed.push((head, p));
        }
        keyed.sort_by(|a, b| ring.cmp(&b.0, &a.0));
        let (keys, polys) = keyed.into_iter().unzip();
        let bb = BorderBasis { order_ideal, keys, polys };
        bb.validate(ring)?;
        Ok(bb)
    }

    pub fn order_ideal(&self) -> &OrderIdeal {
        &self.order_ideal
    }

    /// Polynomials sorted by descending border term.
    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    /// Border terms, descending, aligned with `polys`.
    pub fn border_terms(&self) -> &[Term] {
        &self.keys
    }

    pub fn get(&self, b: &Term) -> Option<&Polynomial> {
        self.keys.iter().position(|k| k == b).map(|i| &self.polys[i])
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// Keys equal the border and every polynomial has the form
    /// b - sum c_t t with t in O.
    pub fn validate(&self, ring: &Ring) -> Result<()> {
        let border = self.order_ideal.border(ring);
        if border != self.keys {
            return Err(Error::MissingBorderGenerator(format!(
                "border {:?} does not match keys {:?}",
                border.iter().map(|t| t.to_text()).collect::<Vec<_>>(),
                self.keys.iter().map(|t| t.to_text()).collect::<Vec<_>>()
            )));
        }
        for (b, p) in self.keys.iter().zip(&self.polys) {
            if p.coeff(b) != 1 || p.terms().iter().any(|(t, _)| t != b && !self.order_ideal.contains(t)) {
                return Err(Error::InvalidConfig(format!("{} is not a border polynomial for {}", ring.format(p), b.to_text())));
            }
        }
        Ok(())
    }

    /// Whether the leading term of every polynomial is its border term.
    pub fn is_leading_term_form(&self) -> bool {
        self.keys.iter().zip(&self.polys).all(|(b, p)| p.lt() == Some(*b))
    }

    fn matrices(&self, ring: &Ring) -> Option<MulMatrices> {
        let f = ring.field();
        MulMatrices::build(ring, self.order_ideal.terms(), |b| {
            let g = self.get(b)?;
            Some(g.terms().iter().filter(|(t, _)| t != b).map(|&(t, c)| (t, f.neg(c))).collect())
        })
    }

    /// Whether the prebasis is a border basis: its multiplication
    /// matrices commute.
    pub fn is_border_basis(&self, ring: &Ring) -> bool {
        self.order_ideal.is_empty() || self.matrices(ring).is_some_and(|mut m| m.commute())
    }

    /// Whether every polynomial of `fs` lies in the ideal. Requires a
    /// border basis.
    pub fn ideal_contains(&self, ring: &Ring, fs: &[Polynomial]) -> bool {
        if self.order_ideal.is_empty() {
            return true;
        }
        let Some(mut m) = self.matrices(ring) else { return false };
        fs.iter().all(|f| m.normal_form(f).iter().all(|&x| x == 0))
    }

    /// Whether both border bases generate the same ideal.
    pub fn same_ideal(&self, ring: &Ring, other: &BorderBasis) -> bool {
        self == other
            || (self.order_ideal.len() == other.order_ideal.len()
                && self.ideal_contains(ring, other.polys())
                && other.ideal_contains(ring, self.polys()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let repr = BorderBasisRepr {
            order_ideal: self.order_ideal.terms().to_vec(),
            polys: self.polys.iter().map(|p| p.terms().iter().map(|&(t, c)| (c, t)).collect()).collect(),
        };
        serde_json::to_value(repr).expect("serializable")
    }

    pub fn from_json(ring: &Ring, v: &serde_json::Value) -> Result<BorderBasis> {
        let repr: BorderBasisRepr = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let o = OrderIdeal::new(ring, repr.order_ideal)?;
        let mut polys = Vec::with_capacity(repr.polys.len());
        for p in repr.polys {
            polys.push(ring.poly(p.into_iter().map(|(c, t)| (t, c)).collect())?);
        }
        BorderBasis::new(ring, o, polys)
    }

    /// Stable 64-bit fingerprint of the structure (FNV-1a over the JSON form).
    pub fn fingerprint(&self) -> u64 {
        let s = self.to_json().to_string();
        let mut h: u64 = 0xcbf29ce484222325;
        for b in s.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    }

    /// Whether all polynomials vanish at `point`.
    pub fn vanishes_at(&self, ring: &Ring, point: &[FieldElement]) -> Result<bool> {
        for p in &self.polys {
            if ring.eval(p, point)? != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn format(&self, ring: &Ring) -> String {
        self.polys.iter().map(|p| ring.format(p)).collect::<Vec<_>>().join("\n")
    }
}
