//! Oracle-guided border basis computation.
//!
//! An oracle proposes which candidates to reduce. At most `budget` oracle
//! expansions run per final-stage attempt before a verification expansion of
//! all pending pairs; if that finds new elements the run reverts to plain
//! incremental expansion for good. An empty oracle answer is a claim that
//! the span is stable. It is accepted only after the prebasis passes the
//! commuting-matrix test and every input reduces to zero, so the output
//! never depends on oracle quality.

mod certificate;
mod oracle;
mod spec;
pub mod wire;

use serde::{Deserialize, Serialize};

pub use oracle::{
    perfect_oracle_labels, AdversarialOracle, EmptyOracle, Oracle, OracleQuery, PerfectOracle, QueryRecord,
    RandomSubsetOracle, RecordingOracle, ReplayOracle, TrivialFullOracle,
};
pub use spec::OracleSpec;
pub use wire::{Endpoint, ExternalOracle, OracleRequest, OracleResponse};

use crate::algebra::{Polynomial, Ring};
use crate::bba::engine::Engine;
use crate::bba::{BorderBasis, ExpansionKind, GeneratorSet, RunTrace, TraceEvent};
use crate::error::{Error, Result};
use crate::linalg::Lookup;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ObbaConfig {
    /// Oracle expansions allowed before a verification expansion.
    pub budget: u32,
    /// Oracle is consulted only once |V|/|L| reaches this value.
    pub gap_threshold: f64,
    /// Terms per generator sent to the oracle.
    pub truncate: usize,
    pub lookup: Lookup,
    pub degree_cap: Option<u32>,
}

impl Default for ObbaConfig {
    fn default() -> ObbaConfig {
        ObbaConfig { budget: 5, gap_threshold: 0.9, truncate: 5, lookup: Lookup::Tree, degree_cap: None }
    }
}

impl ObbaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gap_threshold >= 0.0 && self.gap_threshold <= 1.0) {
            return Err(Error::InvalidConfig(format!("gap threshold {} not in [0, 1]", self.gap_threshold)));
        }
        if self.truncate == 0 {
            return Err(Error::InvalidConfig("truncation must be at least 1".into()));
        }
        Ok(())
    }
}

/// |V| / |L|.
pub fn relative_border_gap(gs: &GeneratorSet) -> f64 {
    gs.relative_gap()
}

enum Step {
    /// Keep expanding in this universe.
    Continue,
    /// The span is stable; run the border check.
    Stable,
    /// A stop claim was certified.
    Done,
}

/// Runs the oracle-guided algorithm. The result equals that of
/// `bba::compute_border_basis` for any oracle.
pub fn run_obba<O: Oracle + ?Sized>(
    ring: &Ring,
    inputs: &[Polynomial],
    oracle: &mut O,
    config: &ObbaConfig,
) -> Result<(BorderBasis, RunTrace)> {
    config.validate()?;
    let mut e = Engine::new(*ring, inputs, config.lookup, config.degree_cap)?;
    let mut reverted = false;
    loop {
        let mut used = 0u32;
        loop {
            let consult = !reverted && used < config.budget && e.gs.relative_gap() >= config.gap_threshold;
            let step = if consult {
                oracle_step(&mut e, oracle, config, &mut used, &mut reverted)
            } else {
                pending_step(&mut e, ExpansionKind::Incremental)
            };
            match step {
                Step::Continue => {}
                Step::Stable => break,
                Step::Done => return e.finish(),
            }
        }
        if e.border_check() {
            return e.finish();
        }
        e.enlarge()?;
    }
}

fn pending_step(e: &mut Engine, kind: ExpansionKind) -> Step {
    let pairs = e.pending_pairs();
    if pairs.is_empty() {
        return Step::Stable;
    }
    let (rec, _) = e.extend(&pairs, kind);
    if rec.new_elements == 0 {
        Step::Stable
    } else {
        Step::Continue
    }
}

/// Expands all pending pairs; new elements mean the oracle missed
/// something and the run reverts.
fn verify(e: &mut Engine, reverted: &mut bool) -> Step {
    let iteration = e.trace.iterations.len();
    match pending_step(e, ExpansionKind::Verification) {
        Step::Continue => {
            *reverted = true;
            e.trace.events.push(TraceEvent::Fallback { iteration });
            Step::Continue
        }
        other => other,
    }
}

fn oracle_step<O: Oracle + ?Sized>(
    e: &mut Engine,
    oracle: &mut O,
    config: &ObbaConfig,
    used: &mut u32,
    reverted: &mut bool,
) -> Step {
    e.trace.oracle_calls += 1;
    let query = OracleQuery {
        state: &e.gs,
        truncate: config.truncate,
        stage: e.stage,
        iteration: e.trace.iterations.len(),
    };
    let pairs = match oracle.predict(&query) {
        Ok(p) => p,
        Err(err) => {
            let reason = match err {
                Error::OracleUnavailable(r) => r,
                other => other.to_string(),
            };
            e.trace.events.push(TraceEvent::OracleUnavailable { iteration: e.trace.iterations.len(), reason });
            return pending_step(e, ExpansionKind::Incremental);
        }
    };
    *used += 1;
    let (rec, _) = e.extend(&pairs, ExpansionKind::Oracle);
    if rec.new_elements == 0 {
        let verdict = certificate::certify(&e.gs, &e.inputs);
        e.trace.certificate_ops += verdict.ops;
        e.trace.events.push(TraceEvent::StopClaim {
            iteration: rec.index,
            accepted: verdict.accepted,
            reason: verdict.reason.to_string(),
        });
        if verdict.accepted {
            return Step::Done;
        }
        return verify(e, reverted);
    }
    if *used >= config.budget {
        return verify(e, reverted);
    }
    Step::Continue
}

#[cfg(test)]
mod tests;
