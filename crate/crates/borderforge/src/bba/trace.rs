use serde::{Deserialize, Serialize};

/// How the candidates of one expansion were chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionKind {
    /// Every basis element times every variable.
    Full,
    /// Only pairs not yet expanded in the current universe.
    Incremental,
    /// Pairs proposed by an oracle.
    Oracle,
    /// Pending pairs expanded to check oracle progress.
    Verification,
}

/// Counters for one expand + basis extension step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub index: usize,
    pub stage: usize,
    pub kind: ExpansionKind,
    pub universe_degree: u32,
    pub universe_size: usize,
    pub basis_before: usize,
    pub basis_after: usize,
    /// Candidates actually formed (stale oracle pairs excluded).
    pub candidates: usize,
    /// Candidates with a term outside the universe.
    pub outside: usize,
    pub zero_reductions: usize,
    pub new_elements: usize,
    /// Oracle pairs naming no current leading term.
    pub stale: usize,
    /// Elimination multiply-adds.
    pub ops: u64,
}

impl IterationRecord {
    pub fn gap_before(&self) -> f64 {
        self.basis_before as f64 / self.universe_size as f64
    }

    pub fn is_consistent(&self) -> bool {
        self.new_elements + self.zero_reductions + self.outside == self.candidates
            && self.basis_after == self.basis_before + self.new_elements
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    Enlarged { iteration: usize, degree: u32 },
    OracleUnavailable { iteration: usize, reason: String },
    /// An oracle expansion added nothing; the claimed stable state was tested.
    StopClaim { iteration: usize, accepted: bool, reason: String },
    /// A verification expansion found new elements; the oracle is off for good.
    Fallback { iteration: usize },
}

/// Everything measured during one border basis computation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunTrace {
    pub initial_degree: u32,
    pub final_degree: u32,
    /// Ops spent building the initial echelon basis.
    pub initial_ops: u64,
    pub initial_zero_reductions: usize,
    /// Ops spent on stop-claim certificates (included in `total_ops`).
    pub certificate_ops: u64,
    pub iterations: Vec<IterationRecord>,
    pub enlargements: usize,
    /// Index of the first iteration after the last enlargement.
    pub final_stage_start: usize,
    pub oracle_calls: usize,
    pub events: Vec<TraceEvent>,
}

impl RunTrace {
    pub fn final_stage(&self) -> &[IterationRecord] {
        &self.iterations[self.final_stage_start..]
    }

    pub fn total_ops(&self) -> u64 {
        self.initial_ops + self.certificate_ops + self.iterations.iter().map(|r| r.ops).sum::<u64>()
    }

    pub fn final_stage_ops(&self) -> u64 {
        self.final_stage().iter().map(|r| r.ops).sum()
    }

    pub fn total_zero_reductions(&self) -> usize {
        self.initial_zero_reductions + self.iterations.iter().map(|r| r.zero_reductions).sum::<usize>()
    }

    pub fn final_stage_zero_reductions(&self) -> usize {
        self.final_stage().iter().map(|r| r.zero_reductions).sum()
    }

    pub fn fallbacks(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, TraceEvent::Fallback { .. })).count()
    }

    pub fn oracle_expansions(&self) -> usize {
        self.iterations.iter().filter(|r| r.kind == ExpansionKind::Oracle).count()
    }
}
