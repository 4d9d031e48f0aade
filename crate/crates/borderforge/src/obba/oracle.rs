use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::wire::{OracleRequest, WirePoly};
use crate::algebra::Term;
use crate::bba::{all_pairs, build_candidates, extend_with, ExpansionPair, GeneratorSet};
use crate::error::Result;

/// The state handed to an oracle before an oracle-driven expansion.
pub struct OracleQuery<'a> {
    pub state: &'a GeneratorSet,
    /// Leading terms kept per generator on the wire.
    pub truncate: usize,
    pub stage: usize,
    pub iteration: usize,
}

impl OracleQuery<'_> {
    pub fn universe_corners(&self) -> Vec<Term> {
        self.state.universe.corners()
    }

    /// Generators by descending leading term, each cut to `truncate` terms.
    pub fn truncated_generators(&self) -> Vec<WirePoly> {
        self.state
            .basis
            .sorted_desc()
            .into_iter()
            .map(|g| g.terms().iter().take(self.truncate).map(|&(t, c)| (c, t)).collect())
            .collect()
    }

    pub fn request(&self, id: u64) -> OracleRequest {
        let ring = self.state.ring();
        OracleRequest {
            id,
            p: ring.p(),
            n: ring.nvars() as u32,
            l: self.truncate as u32,
            universe_corners: self.universe_corners(),
            generators: self.truncated_generators(),
        }
    }
}

/// Proposes which candidates x_j * v to reduce next. An empty answer claims
/// that the span is already stable.
pub trait Oracle {
    /// Errors are reported as `OracleUnavailable` and the caller expands
    /// without the oracle.
    fn predict(&mut self, query: &OracleQuery) -> Result<Vec<ExpansionPair>>;

    fn name(&self) -> &str;
}

impl<O: Oracle + ?Sized> Oracle for Box<O> {
    fn predict(&mut self, query: &OracleQuery) -> Result<Vec<ExpansionPair>> {
        (**self).predict(query)
    }

    fn name(&self) -> &str {
        (**self).name()
    }
}

/// Pairs whose candidates would extend the basis in one full expansion,
/// found by running that expansion on a copy.
pub fn perfect_oracle_labels(gs: &GeneratorSet) -> Vec<ExpansionPair> {
    let mut copy = gs.clone();
    let (cands, _) = build_candidates(&copy, &all_pairs(gs));
    extend_with(&mut copy, &cands).successful
}

/// Hindsight oracle.
#[derive(Clone, Copy, Debug, Default)]
pub struct PerfectOracle;

impl Oracle for PerfectOracle {
    fn predict(&mut self, query: &OracleQuery) -> Result<Vec<ExpansionPair>> {
        Ok(perfect_oracle_labels(query.state))
    }

    fn name(&self) -> &str {
        "perfect"
    }
}

/// Proposes every pair; behaves like a full expansion.
#[derive(Clone, Copy, Debug, Default)]
pub struct TrivialFullOracle;

impl Oracle for TrivialFullOracle {
    fn predict(&mut self, query: &OracleQuery) -> Result<Vec<ExpansionPair>> {
        Ok(all_pairs(query.state))
    }

    fn name(&self) -> &str {
        "full"
    }
}

/// Always claims the span is stable.
#[derive(Clone, Copy, Debug, Default)]
pub struct EmptyOracle;

impl Oracle for EmptyOracle {
    fn predict(&mut self, _: &OracleQuery) -> Result<Vec<ExpansionPair>> {
        Ok(Vec::new())
    }

    fn name(&self) -> &str {
        "empty"
    }
}

/// Keeps each pair independently with probability `keep`.
#[derive(Clone, Debug)]
pub struct RandomSubsetOracle {
    rng: ChaCha8Rng,
    keep: f64,
}

impl RandomSubsetOracle {
    pub fn new(seed: u64, keep: f64) -> RandomSubsetOracle {
        RandomSubsetOracle { rng: ChaCha8Rng::seed_from_u64(seed), keep }
    }
}

impl Oracle for RandomSubsetOracle {
    fn predict(&mut self, query: &OracleQuery) -> Result<Vec<ExpansionPair>> {
        let keep = self.keep;
        Ok(all_pairs(query.state).into_iter().filter(|_| self.rng.gen_bool(keep)).collect())
    }

    fn name(&self) -> &str {
        "random"
    }
}

/// Proposes exactly the pairs the hindsight oracle rejects, plus one pair
/// naming a term that is not a leading term.
#[derive(Clone, Copy, Debug, Default)]
pub struct AdversarialOracle;

impl Oracle for AdversarialOracle {
    fn predict(&mut self, query: &OracleQuery) -> Result<Vec<ExpansionPair>> {
        let good: HashSet<ExpansionPair> = perfect_oracle_labels(query.state).into_iter().collect();
        let mut out: Vec<ExpansionPair> = all_pairs(query.state).into_iter().filter(|p| !good.contains(p)).collect();
        let n = query.state.ring().nvars();
        if let Some(t) = query.state.tentative_order_ideal().first() {
            out.push(ExpansionPair::new(n as u32, *t));
        }
        Ok(out)
    }

    fn name(&self) -> &str {
        "adversarial"
    }
}

/// Answers from a table keyed by the canonical request key. Unknown states
/// get an empty answer.
#[derive(Clone, Debug, Default)]
pub struct ReplayOracle {
    table: HashMap<String, Vec<ExpansionPair>>,
    pub misses: usize,
}

impl ReplayOracle {
    pub fn new() -> ReplayOracle {
        ReplayOracle::default()
    }

    pub fn insert(&mut self, key: String, pairs: Vec<ExpansionPair>) {
        self.table.insert(key, pairs);
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn lookup(&self, key: &str) -> Option<&[ExpansionPair]> {
        self.table.get(key).map(|v| v.as_slice())
    }
}

impl Oracle for ReplayOracle {
    fn predict(&mut self, query: &OracleQuery) -> Result<Vec<ExpansionPair>> {
        match self.table.get(&query.request(0).key()) {
            Some(p) => Ok(p.clone()),
            None => {
                self.misses += 1;
                Ok(Vec::new())
            }
        }
    }

    fn name(&self) -> &str {
        "replay"
    }
}

/// One answered query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryRecord {
    pub stage: usize,
    pub iteration: usize,
    pub request: OracleRequest,
    pub pairs: Vec<ExpansionPair>,
}

/// Logs every successful query and answer of the wrapped oracle.
pub struct RecordingOracle<O> {
    pub inner: O,
    pub log: Vec<QueryRecord>,
}

impl<O: Oracle> RecordingOracle<O> {
    pub fn new(inner: O) -> RecordingOracle<O> {
        RecordingOracle { inner, log: Vec::new() }
    }
}

impl<O: Oracle> Oracle for RecordingOracle<O> {
    fn predict(&mut self, query: &OracleQuery) -> Result<Vec<ExpansionPair>> {
        let pairs = self.inner.predict(query)?;
        self.log.push(QueryRecord {
            stage: query.stage,
            iteration: query.iteration,
            request: query.request(self.log.len() as u64),
            pairs: pairs.clone(),
        });
        Ok(pairs)
    }

    fn name(&self) -> &str {
        self.inner.name()
    }
}

