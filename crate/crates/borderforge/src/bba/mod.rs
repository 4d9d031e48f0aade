//! Border basis computation: expansion, basis extension, the L-stable span,
//! the border check, universe enlargement and final reduction.

mod basis;
pub(crate) mod mulmat;
pub(crate) mod engine;
mod trace;

use serde::{Deserialize, Serialize};

pub use basis::{BorderBasis, ExpansionPair, GeneratorSet};
pub use engine::{all_pairs, build_candidates, default_degree_cap, extend_with, Candidate, ExtensionDelta};
pub use trace::{ExpansionKind, IterationRecord, RunTrace, TraceEvent};

use crate::algebra::{Polynomial, Ring};
use crate::error::{Error, Result};
use crate::linalg::Lookup;
use engine::Engine;

/// Expansion strategy inside the L-stable span loop.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Expand every basis element each round.
    Bba,
    /// Expand only elements added since they were last expanded.
    #[default]
    Ibba,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Variant> {
        match s.to_ascii_lowercase().as_str() {
            "bba" => Ok(Variant::Bba),
            "ibba" => Ok(Variant::Ibba),
            _ => Err(Error::Parse(format!("unknown variant `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BbaConfig {
    pub variant: Variant,
    pub lookup: Lookup,
    /// Largest universe degree allowed; `None` picks `default_degree_cap`.
    pub degree_cap: Option<u32>,
}

/// All n*|V| products x_j*v, labelled, in descending lt(v) then ascending j.
/// Products whose exponents would overflow are omitted.
pub fn expand(gs: &GeneratorSet) -> Vec<(ExpansionPair, Polynomial)> {
    let ring = *gs.ring();
    all_pairs(gs)
        .into_iter()
        .filter_map(|pair| {
            let v = gs.basis.get(&pair.lt)?;
            ring.mul_var(pair.var_index(), v).map(|f| (pair, f))
        })
        .collect()
}

/// Reduces and inserts each candidate lying in the universe. Candidates
/// with a term outside the universe are counted and dropped.
pub fn basis_extension(gs: &mut GeneratorSet, candidates: &[Polynomial]) -> ExtensionDelta {
    let before = gs.basis.stats();
    let d = gs.universe.degree();
    let mut delta = ExtensionDelta { candidates: candidates.len(), ..Default::default() };
    for f in candidates {
        if f.degree().is_some_and(|df| df > d) {
            delta.outside += 1;
            continue;
        }
        let g = gs.basis.reduce_full(f);
        let lt = g.lt();
        if gs.basis.insert(&g).expect("normal form has a fresh leading term") {
            delta.new_elements += 1;
            delta.inserted.push(lt.unwrap());
        } else {
            delta.zero_reductions += 1;
        }
    }
    delta.ops = gs.basis.stats().since(&before).ops;
    delta
}

/// Expands and extends until nothing new enters the span. Returns the
/// number of rounds performed.
pub fn lstable_span(gs: &mut GeneratorSet, variant: Variant) -> usize {
    let mut frontier: Option<Vec<crate::algebra::Term>> = None;
    let mut rounds = 0;
    loop {
        let pairs: Vec<ExpansionPair> = match (&frontier, variant) {
            (Some(lts), Variant::Ibba) => {
                let n = gs.ring().nvars() as u32;
                let mut lts = lts.clone();
                gs.ring().sort_desc(&mut lts);
                lts.iter().flat_map(|&lt| (1..=n).map(move |j| ExpansionPair::new(j, lt))).collect()
            }
            _ => all_pairs(gs),
        };
        if pairs.is_empty() {
            return rounds;
        }
        let (cands, _) = build_candidates(gs, &pairs);
        let delta = extend_with(gs, &cands);
        rounds += 1;
        if delta.new_elements == 0 {
            return rounds;
        }
        frontier = Some(delta.inserted);
    }
}

/// True when the border of L \ lt(V) lies inside L.
pub fn border_basis_check(gs: &GeneratorSet) -> bool {
    engine::border_check(gs)
}

pub fn enlarge_universe(gs: &mut GeneratorSet) {
    gs.universe = gs.universe.enlarged(gs.ring());
}

pub fn final_reduction(gs: &GeneratorSet) -> Result<BorderBasis> {
    engine::final_reduction(gs)
}

/// Runs the full algorithm on `inputs`.
pub fn compute_border_basis(ring: &Ring, inputs: &[Polynomial], config: &BbaConfig) -> Result<(BorderBasis, RunTrace)> {
    let mut e = Engine::new(*ring, inputs, config.lookup, config.degree_cap)?;
    let kind = match config.variant {
        Variant::Bba => ExpansionKind::Full,
        Variant::Ibba => ExpansionKind::Incremental,
    };
    loop {
        loop {
            let pairs = match config.variant {
                Variant::Bba => e.all_pairs(),
                Variant::Ibba => e.pending_pairs(),
            };
            if pairs.is_empty() {
                break;
            }
            let (rec, _) = e.extend(&pairs, kind);
            if rec.new_elements == 0 {
                break;
            }
        }
        if e.border_check() {
            return e.finish();
        }
        e.enlarge()?;
    }
}

#[cfg(test)]
mod tests;
