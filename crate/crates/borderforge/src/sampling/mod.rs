//! Random polynomials, order ideals, border bases of point sets and
//! ideal-preserving generator transforms.

mod cells;
mod instance;

use std::collections::HashSet;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use cells::{sample_order_ideal, sample_order_ideal_with, Cell, SampledOrderIdeal};
pub use instance::{derive_seed, generate_instance, Instance, InstanceConfig};

use crate::algebra::{FieldElement, Polynomial, Ring, Term};
use crate::bba::{compute_border_basis, BbaConfig, BorderBasis};
use crate::error::{Error, Result};
use crate::linalg::MatrixFp;
use crate::orderideal::{binomial, terms_of_degree, OrderIdeal, Universe};

/// Degree d uniform in [0, d_max], term count t uniform in
/// [0, min(t_max, #terms of degree <= d_max)], then cut to the number of
/// terms of degree <= d. A nonzero result has degree exactly d: one term is
/// drawn from degree d, the rest from degree <= d.
pub fn random_polynomial<R: Rng + ?Sized>(ring: &Ring, d_max: u32, t_max: usize, rng: &mut R) -> Polynomial {
    let n = ring.nvars();
    let d = rng.gen_range(0..=d_max);
    let bound = binomial((n as u32 + d_max) as u64, n as u64) as usize;
    let avail = binomial((n as u32 + d) as u64, n as u64) as usize;
    let t = rng.gen_range(0..=t_max.min(bound)).min(avail);
    if t == 0 {
        return Polynomial::zero();
    }
    let top = terms_of_degree(n, d);
    let lead = top[rng.gen_range(0..top.len())];
    let universe = Universe::new(ring, d);
    let rest: Vec<Term> = universe.terms().iter().copied().filter(|s| *s != lead).collect();
    let mut terms = vec![(lead, rng.gen_range(1..ring.p()))];
    for i in index::sample(rng, rest.len(), t - 1) {
        terms.push((rest[i], rng.gen_range(1..ring.p())));
    }
    ring.poly(terms).expect("terms come from the ring")
}

/// `nu` distinct points of F_p^n, uniformly.
pub fn sample_points<R: Rng + ?Sized>(ring: &Ring, nu: usize, rng: &mut R) -> Result<Vec<Vec<FieldElement>>> {
    let n = ring.nvars() as u32;
    let p = ring.p() as u128;
    let total = p.checked_pow(n).unwrap_or(u128::MAX);
    if nu as u128 > total {
        return Err(Error::TooManyPoints { requested: nu as u128, available: total });
    }
    let decode = |mut k: u128| -> Vec<FieldElement> {
        (0..n)
            .map(|_| {
                let c = (k % p) as FieldElement;
                k /= p;
                c
            })
            .collect()
    };
    if total <= (1u128 << 40) {
        return Ok(index::sample(rng, total as usize, nu).into_iter().map(|k| decode(k as u128)).collect());
    }
    let mut seen = HashSet::with_capacity(nu);
    let mut out = Vec::with_capacity(nu);
    while out.len() < nu {
        let pt: Vec<FieldElement> = (0..n).map(|_| rng.gen_range(0..ring.p())).collect();
        if seen.insert(pt.clone()) {
            out.push(pt);
        }
    }
    Ok(out)
}

/// Evaluation matrix: one row per point, one column per term.
pub fn evaluation_matrix(ring: &Ring, terms: &[Term], points: &[Vec<FieldElement>]) -> MatrixFp {
    let rows: Vec<Vec<FieldElement>> =
        points.iter().map(|pt| terms.iter().map(|t| ring.eval_term(t, pt)).collect()).collect();
    let mut m = MatrixFp::zeros(points.len(), terms.len());
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    m
}

/// The O-border basis of the vanishing ideal of `points`.
///
/// Needs |O| = |P| and an invertible evaluation matrix O(P); each border
/// term b gets the unique g = b - sum c_o o vanishing on P.
pub fn border_basis_from_points(ring: &Ring, o: &OrderIdeal, points: &[Vec<FieldElement>]) -> Result<BorderBasis> {
    let nu = o.len();
    if points.len() != nu {
        return Err(Error::DimensionMismatch { expected: nu, found: points.len() });
    }
    if let Some(pt) = points.iter().find(|pt| pt.len() != ring.nvars()) {
        return Err(Error::DimensionMismatch { expected: ring.nvars(), found: pt.len() });
    }
    let border = o.border(ring);
    let mut cols: Vec<Term> = o.terms().to_vec();
    cols.extend_from_slice(&border);
    let mut m = evaluation_matrix(ring, &cols, points);
    let pivots = m.rref(ring.field());
    if pivots.len() < nu || pivots[..nu].iter().enumerate().any(|(i, &c)| c != i) {
        return Err(Error::RankDeficient);
    }
    let f = ring.field();
    let polys = border
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let mut terms = vec![(b, 1)];
            for (j, &oj) in o.terms().iter().enumerate() {
                let v = f.neg(m[(j, nu + i)]);
                if v != 0 {
                    terms.push((oj, v));
                }
            }
            ring.poly(terms)
        })
        .collect::<Result<Vec<_>>>()?;
    BorderBasis::new(ring, o.clone(), polys)
}

/// Row i of the result is sum_j a[i][j] * g[j].
pub fn apply_transform(ring: &Ring, a: &[Vec<Polynomial>], g: &[Polynomial]) -> Result<Vec<Polynomial>> {
    a.iter()
        .map(|row| {
            if row.len() != g.len() {
                return Err(Error::DimensionMismatch { expected: g.len(), found: row.len() });
            }
            Ok(row.iter().zip(g).fold(Polynomial::zero(), |acc, (aij, gj)| ring.add(&acc, &ring.mul(aij, gj))))
        })
        .collect()
}

/// F = A G with every entry of A a random polynomial of degree <= d_a and
/// at most t_a terms. Rows that come out zero are redrawn.
pub fn backward_transform<R: Rng + ?Sized>(
    ring: &Ring,
    g: &BorderBasis,
    r: usize,
    d_a: u32,
    t_a: usize,
    rng: &mut R,
) -> Result<Vec<Polynomial>> {
    if r == 0 {
        return Err(Error::InvalidConfig("transform needs at least one row".into()));
    }
    if g.is_empty() || t_a == 0 {
        return Err(Error::InvalidConfig("transform of an empty basis or with empty entries".into()));
    }
    let mut out = Vec::with_capacity(r);
    while out.len() < r {
        let row: Vec<Polynomial> = (0..g.len()).map(|_| random_polynomial(ring, d_a, t_a, rng)).collect();
        let f = apply_transform(ring, &[row], g.polys())?.pop().unwrap();
        if !f.is_zero() {
            out.push(f);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdealEquality {
    Equal,
    Different,
    /// The computation from F hit its degree cap.
    Undetermined,
}

/// Decides whether F generates the ideal of the border basis G.
///
/// The border basis of F is computed and compared with G. When both share
/// the order ideal they must coincide; otherwise the two ideals are
/// compared through normal forms in both directions.
pub fn verify_ideal_equality(ring: &Ring, f: &[Polynomial], g: &BorderBasis, config: &BbaConfig) -> Result<IdealEquality> {
    match compute_border_basis(ring, f, config) {
        Ok((bb, _)) => Ok(if bb.same_ideal(ring, g) { IdealEquality::Equal } else { IdealEquality::Different }),
        Err(Error::DegreeBudgetExceeded { .. }) => Ok(IdealEquality::Undetermined),
        Err(e) => Err(e),
    }
}
