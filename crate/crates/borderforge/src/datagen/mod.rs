//! Supervised samples from oracle runs, truncation and serialization.

mod tokens;

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{Polynomial, Ring, Term};
use crate::bba::ExpansionPair;
use crate::error::{Error, Result};
use crate::obba::wire::{replay_key, WirePoly};
use crate::obba::{run_obba, ObbaConfig, PerfectOracle, QueryRecord, RecordingOracle, ReplayOracle};

pub use tokens::{decode, decode_sample, tokenize, tokenize_infix, tokenize_monomial, Follow, Scheme, Token, TokenStream};

/// Keeps the `l` greatest terms of `f`.
pub fn truncate(f: &Polynomial, l: usize) -> Polynomial {
    f.truncated(l)
}

/// One oracle query and its hindsight answer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingSample {
    pub p: u32,
    pub n: u32,
    pub l: u32,
    pub universe_corners: Vec<Term>,
    pub generators: Vec<WirePoly>,
    pub labels: Vec<ExpansionPair>,
    pub is_terminal: bool,
}

impl TrainingSample {
    pub fn from_record(rec: &QueryRecord) -> TrainingSample {
        let r = &rec.request;
        TrainingSample {
            p: r.p,
            n: r.n,
            l: r.l,
            universe_corners: r.universe_corners.clone(),
            generators: r.generators.clone(),
            labels: rec.pairs.clone(),
            is_terminal: rec.pairs.is_empty(),
        }
    }

    /// The replay key of the state this sample was taken from.
    pub fn key(&self) -> String {
        replay_key(&self.universe_corners, &self.generators)
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.is_terminal != self.labels.is_empty() {
            return Err("is_terminal must equal labels being empty".into());
        }
        let n = self.n as usize;
        let lts: Vec<Term> = self.generators.iter().filter_map(|g| g.first().map(|(_, t)| *t)).collect();
        if lts.len() != self.generators.len() {
            return Err("empty generator".into());
        }
        for g in &self.generators {
            if g.len() > self.l as usize {
                return Err(format!("generator has {} terms, more than l = {}", g.len(), self.l));
            }
            if g.iter().any(|(c, t)| *c == 0 || *c >= self.p || t.nvars() != n) {
                return Err("bad generator term".into());
            }
        }
        if self.universe_corners.iter().any(|t| t.nvars() != n) {
            return Err("corner has the wrong number of variables".into());
        }
        for pair in &self.labels {
            if pair.var == 0 || pair.var > self.n || !lts.contains(&pair.lt) {
                return Err(format!("label {pair:?} names no generator"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatagenConfig {
    /// Productive final-stage queries kept per instance.
    pub last_k: usize,
    /// Terms kept per generator.
    pub truncate: usize,
}

impl Default for DatagenConfig {
    fn default() -> DatagenConfig {
        DatagenConfig { last_k: 5, truncate: 5 }
    }
}

/// Converts a query log. Keeps every query.
pub fn samples_from_log(log: &[QueryRecord]) -> Vec<TrainingSample> {
    log.iter().map(TrainingSample::from_record).collect()
}

/// Runs the hindsight oracle at every expansion and keeps the last `last_k`
/// productive queries of the final stage followed by the terminal query.
pub fn extract_samples(ring: &Ring, inputs: &[Polynomial], config: &DatagenConfig) -> Result<Vec<TrainingSample>> {
    let log = record_perfect_run(ring, inputs, config.truncate)?;
    Ok(select_final(&log, config.last_k))
}

/// The query log of a hindsight run that consults the oracle at every step.
pub fn record_perfect_run(ring: &Ring, inputs: &[Polynomial], truncate: usize) -> Result<Vec<QueryRecord>> {
    let cfg = ObbaConfig { budget: u32::MAX, gap_threshold: 0.0, truncate, ..Default::default() };
    let mut oracle = RecordingOracle::new(PerfectOracle);
    run_obba(ring, inputs, &mut oracle, &cfg)?;
    Ok(oracle.log)
}

fn select_final(log: &[QueryRecord], last_k: usize) -> Vec<TrainingSample> {
    let Some(last) = log.last() else {
        return Vec::new();
    };
    let stage: Vec<&QueryRecord> = log.iter().filter(|r| r.stage == last.stage).collect();
    let productive: Vec<&&QueryRecord> = stage.iter().filter(|r| !r.pairs.is_empty()).collect();
    let skip = productive.len().saturating_sub(last_k);
    let mut out: Vec<TrainingSample> = productive[skip..].iter().map(|r| TrainingSample::from_record(r)).collect();
    if last.pairs.is_empty() {
        out.push(TrainingSample::from_record(last));
    }
    out
}

/// A replay oracle answering every state in `samples`.
pub fn replay_oracle(samples: &[TrainingSample]) -> ReplayOracle {
    let mut oracle = ReplayOracle::new();
    for s in samples {
        oracle.insert(s.key(), s.labels.clone());
    }
    oracle
}

pub fn write_dataset(path: &Path, samples: &[TrainingSample]) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    write_samples(&mut w, samples)?;
    w.flush()?;
    Ok(())
}

pub fn write_samples<W: Write>(w: &mut W, samples: &[TrainingSample]) -> Result<()> {
    for s in samples {
        serde_json::to_writer(&mut *w, s).map_err(|e| Error::Io(e.into()))?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_dataset(path: &Path) -> Result<Vec<TrainingSample>> {
    read_samples(BufReader::new(std::fs::File::open(path)?))
}

/// Parses JSONL; blank lines are skipped and line numbers start at 1.
pub fn read_samples<R: BufRead>(r: R) -> Result<Vec<TrainingSample>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let s: TrainingSample =
            serde_json::from_str(&line).map_err(|e| Error::Schema { line: i + 1, msg: e.to_string() })?;
        s.validate().map_err(|msg| Error::Schema { line: i + 1, msg })?;
        out.push(s);
    }
    Ok(out)
}
