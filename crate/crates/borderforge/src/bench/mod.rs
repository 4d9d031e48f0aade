//! Runs algorithm variants side by side on generated instances.

pub mod stats;

use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bba::{compute_border_basis, BbaConfig, RunTrace, Variant};
use crate::error::{Error, Result};
use crate::linalg::Lookup;
use crate::obba::{perfect_oracle_labels, run_obba, ObbaConfig, Oracle, OracleQuery, OracleSpec};
use crate::bba::ExpansionPair;
use crate::sampling::{derive_seed, generate_instance, InstanceConfig};
use stats::{mean, median, spearman, MeanStd};

pub const THREADS_ENV: &str = "BORDERFORGE_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BenchVariant {
    Bba,
    Ibba,
    IbbaFge,
    Obba,
    ObbaFge,
}

impl BenchVariant {
    pub const ALL: [BenchVariant; 5] =
        [BenchVariant::Bba, BenchVariant::Ibba, BenchVariant::IbbaFge, BenchVariant::Obba, BenchVariant::ObbaFge];

    pub fn name(self) -> &'static str {
        match self {
            BenchVariant::Bba => "bba",
            BenchVariant::Ibba => "ibba",
            BenchVariant::IbbaFge => "ibba+fge",
            BenchVariant::Obba => "obba",
            BenchVariant::ObbaFge => "obba+fge",
        }
    }

    pub fn lookup(self) -> Lookup {
        match self {
            BenchVariant::IbbaFge | BenchVariant::ObbaFge => Lookup::Tree,
            _ => Lookup::Naive,
        }
    }

    pub fn uses_oracle(self) -> bool {
        matches!(self, BenchVariant::Obba | BenchVariant::ObbaFge)
    }
}

impl FromStr for BenchVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<BenchVariant> {
        BenchVariant::ALL
            .into_iter()
            .find(|v| v.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Parse(format!("unknown variant {s:?}")))
    }
}

impl std::fmt::Display for BenchVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for BenchVariant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for BenchVariant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A benchmark suite. Every combination of field, variable count and degree
/// is one group of `count` instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub name: String,
    pub fields: Vec<u64>,
    pub nvars: Vec<usize>,
    /// Border basis degree bounds of the generated instances.
    pub degrees: Vec<u32>,
    pub count: usize,
    pub seed: u64,
    pub variants: Vec<BenchVariant>,
    pub oracle: OracleSpec,
    pub oracle_budget: u32,
    pub gap_threshold: f64,
    pub truncate: usize,
    pub degree_cap: Option<u32>,
    pub transform_rows: Option<usize>,
    /// Also trace border gap against border distance on a BBA run.
    pub border_gap: bool,
    /// Worker threads; falls back to BORDERFORGE_THREADS, then all cores.
    pub threads: Option<usize>,
    /// Rerun oracle variants untimed, scoring each answer against the
    /// perfect-oracle labels of the same state.
    pub error_proxy: bool,
}

impl Default for SuiteConfig {
    fn default() -> SuiteConfig {
        let o = ObbaConfig::default();
        SuiteConfig {
            name: "suite".into(),
            fields: vec![31],
            nvars: vec![3],
            degrees: vec![2],
            count: 10,
            seed: 0,
            variants: BenchVariant::ALL.to_vec(),
            oracle: OracleSpec::Perfect,
            oracle_budget: o.budget,
            gap_threshold: o.gap_threshold,
            truncate: o.truncate,
            degree_cap: None,
            transform_rows: None,
            border_gap: false,
            threads: None,
            error_proxy: false,
        }
    }
}

impl SuiteConfig {
    pub fn from_toml(text: &str) -> Result<SuiteConfig> {
        let cfg: SuiteConfig = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<SuiteConfig> {
        SuiteConfig::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.fields.is_empty() || self.nvars.is_empty() || self.degrees.is_empty() {
            return Err(Error::InvalidConfig("fields, nvars and degrees must be nonempty".into()));
        }
        if self.variants.is_empty() {
            return Err(Error::InvalidConfig("no variants selected".into()));
        }
        if self.variants.iter().any(|v| v.uses_oracle()) && self.oracle == OracleSpec::None {
            return Err(Error::InvalidConfig("oracle variants need an oracle".into()));
        }
        for &p in &self.fields {
            crate::algebra::PrimeField::new(p)?;
        }
        if let Some(&n) = self.nvars.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidArity(n));
        }
        if self.degrees.contains(&0) {
            return Err(Error::InvalidConfig("degree bound must be at least 1".into()));
        }
        self.obba_config(Lookup::Tree).validate()
    }

    pub fn obba_config(&self, lookup: Lookup) -> ObbaConfig {
        ObbaConfig {
            budget: self.oracle_budget,
            gap_threshold: self.gap_threshold,
            truncate: self.truncate,
            lookup,
            degree_cap: self.degree_cap,
        }
    }

    pub fn groups(&self) -> Vec<InstanceConfig> {
        let mut out = Vec::new();
        for &p in &self.fields {
            for &n in &self.nvars {
                for &max_degree in &self.degrees {
                    out.push(InstanceConfig { p, n, max_degree, transform_rows: self.transform_rows, ..Default::default() });
                }
            }
        }
        out
    }

    /// Explicit setting, then the environment variable.
    pub fn thread_count(&self) -> Option<usize> {
        self.threads.or_else(|| std::env::var(THREADS_ENV).ok()?.parse().ok()).filter(|&t| t > 0)
    }
}

/// Measurements of one variant on one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantRun {
    pub variant: BenchVariant,
    pub wall_ms: f64,
    pub ops: u64,
    pub zero_reductions: usize,
    pub final_stage_zero_reductions: usize,
    pub fallbacks: usize,
    pub enlargements: usize,
    pub oracle_calls: usize,
    pub iterations: usize,
    pub final_stage_ratio: f64,
    /// Cumulative op share of the last 1..=5 final-stage expansions.
    pub last_k_shares: Vec<f64>,
    pub basis_hash: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_proxy: Option<ErrorProxy>,
}

/// Oracle answers compared with the perfect-oracle labels for the same
/// state, summed over all queries of a run. This stands in for the
/// conditional error against an optimal expansion sequence, which is not
/// computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorProxy {
    pub queries: usize,
    pub proposed: usize,
    pub perfect: usize,
    /// Proposed pairs outside the perfect labels.
    pub excess: usize,
    /// Perfect labels the oracle left out.
    pub missed: usize,
}

/// Wraps an oracle and accumulates an [`ErrorProxy`].
pub struct ScoredOracle<O> {
    pub inner: O,
    pub score: ErrorProxy,
}

impl<O: Oracle> ScoredOracle<O> {
    pub fn new(inner: O) -> ScoredOracle<O> {
        ScoredOracle { inner, score: ErrorProxy::default() }
    }
}

impl<O: Oracle> Oracle for ScoredOracle<O> {
    fn predict(&mut self, query: &OracleQuery) -> Result<Vec<ExpansionPair>> {
        let pairs = self.inner.predict(query)?;
        let labels: std::collections::HashSet<ExpansionPair> = perfect_oracle_labels(query.state).into_iter().collect();
        let proposed: std::collections::HashSet<ExpansionPair> = pairs.iter().copied().collect();
        let hits = proposed.intersection(&labels).count();
        let s = &mut self.score;
        s.queries += 1;
        s.proposed += proposed.len();
        s.perfect += labels.len();
        s.excess += proposed.len() - hits;
        s.missed += labels.len() - hits;
        Ok(pairs)
    }

    fn name(&self) -> &str {
        self.inner.name()
    }
}

impl VariantRun {
    fn new(variant: BenchVariant, wall_ms: f64, trace: &RunTrace, basis_hash: u64) -> VariantRun {
        VariantRun {
            variant,
            wall_ms,
            ops: trace.total_ops(),
            zero_reductions: trace.total_zero_reductions(),
            final_stage_zero_reductions: trace.final_stage_zero_reductions(),
            fallbacks: trace.fallbacks(),
            enlargements: trace.enlargements,
            oracle_calls: trace.oracle_calls,
            iterations: trace.iterations.len(),
            final_stage_ratio: final_stage_ratio(trace),
            last_k_shares: last_k_shares(trace, 5),
            basis_hash,
            error_proxy: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: usize,
    pub p: u64,
    pub n: usize,
    pub max_degree: u32,
    pub seed: u64,
    pub order_ideal_size: usize,
    pub basis_hash: u64,
    pub runs: Vec<VariantRun>,
    /// (|V|/|L|, remaining expansions) along the final stage of a BBA run.
    pub border_gap: Vec<(f64, usize)>,
}

impl BenchRecord {
    pub fn run(&self, v: BenchVariant) -> Option<&VariantRun> {
        self.runs.iter().find(|r| r.variant == v)
    }
}

/// Share of elimination ops spent after the last enlargement. Without an
/// enlargement the whole run, including the initial echelon form, is the
/// final stage.
pub fn final_stage_ratio(trace: &RunTrace) -> f64 {
    let total = trace.total_ops() - trace.certificate_ops;
    if total == 0 {
        return 1.0;
    }
    let mut fs = trace.final_stage_ops();
    if trace.enlargements == 0 {
        fs += trace.initial_ops;
    }
    fs as f64 / total as f64
}

/// For k = 1..=max_k, the fraction of final-stage ops spent in its last k
/// expansions.
pub fn last_k_shares(trace: &RunTrace, max_k: usize) -> Vec<f64> {
    let fs = trace.final_stage();
    let total: u64 = fs.iter().map(|r| r.ops).sum();
    (1..=max_k)
        .map(|k| {
            if total == 0 {
                return 1.0;
            }
            let tail: u64 = fs.iter().rev().take(k).map(|r| r.ops).sum();
            tail as f64 / total as f64
        })
        .collect()
}

/// (|V_i|/|L|, T - i) for the final-stage iterations i = 0..=T of a run;
/// the last iteration is the one that found the span stable.
pub fn border_gap_trace(trace: &RunTrace) -> Vec<(f64, usize)> {
    let fs = trace.final_stage();
    let t = fs.len().saturating_sub(1);
    fs.iter().enumerate().map(|(i, r)| (r.gap_before(), t - i)).collect()
}

fn run_variant(
    suite: &SuiteConfig,
    variant: BenchVariant,
    ring: &crate::algebra::Ring,
    inputs: &[crate::algebra::Polynomial],
    seed: u64,
) -> Result<(crate::bba::BorderBasis, RunTrace, f64)> {
    let start = Instant::now();
    let (bb, trace) = match variant {
        BenchVariant::Bba | BenchVariant::Ibba | BenchVariant::IbbaFge => {
            let v = if variant == BenchVariant::Bba { Variant::Bba } else { Variant::Ibba };
            compute_border_basis(ring, inputs, &BbaConfig { variant: v, lookup: variant.lookup(), degree_cap: suite.degree_cap })?
        }
        BenchVariant::Obba | BenchVariant::ObbaFge => {
            let mut oracle = suite.oracle.build(seed)?.expect("validated suites have an oracle");
            run_obba(ring, inputs, &mut oracle, &suite.obba_config(variant.lookup()))?
        }
    };
    Ok((bb, trace, start.elapsed().as_secs_f64() * 1e3))
}

/// Generates instance `index` of a group and runs every selected variant.
pub fn run_instance(suite: &SuiteConfig, group: &InstanceConfig, index: usize) -> Result<BenchRecord> {
    let seed = derive_seed(suite.seed, index as u64);
    let inst = generate_instance(group, seed)?;
    let ring = group.ring()?;
    let mut runs = Vec::new();
    let mut reference: Option<(BenchVariant, crate::bba::BorderBasis)> = None;
    let mut bba_trace = None;
    for &v in &suite.variants {
        let (bb, trace, ms) = run_variant(suite, v, &ring, &inst.inputs, seed)?;
        match &reference {
            Some((rv, rb)) if *rb != bb => {
                return Err(Error::VariantDisagreement {
                    instance: index,
                    detail: format!("{v} differs from {rv} (seed {seed})"),
                })
            }
            Some(_) => {}
            None => reference = Some((v, bb.clone())),
        }
        let mut run = VariantRun::new(v, ms, &trace, bb.fingerprint());
        if suite.error_proxy && v.uses_oracle() {
            let mut scored = ScoredOracle::new(suite.oracle.build(seed)?.expect("validated suites have an oracle"));
            run_obba(&ring, &inst.inputs, &mut scored, &suite.obba_config(v.lookup()))?;
            run.error_proxy = Some(scored.score);
        }
        runs.push(run);
        if v == BenchVariant::Bba {
            bba_trace = Some(trace);
        }
    }
    let border_gap = if suite.border_gap {
        let trace = match bba_trace {
            Some(t) => t,
            None => {
                let cfg = BbaConfig { variant: Variant::Bba, lookup: Lookup::Tree, degree_cap: suite.degree_cap };
                compute_border_basis(&ring, &inst.inputs, &cfg)?.1
            }
        };
        border_gap_trace(&trace)
    } else {
        Vec::new()
    };
    let (_, bb) = reference.expect("at least one variant");
    Ok(BenchRecord {
        instance: index,
        p: group.p,
        n: group.n,
        max_degree: group.max_degree,
        seed,
        order_ideal_size: inst.border_basis.order_ideal().len(),
        basis_hash: bb.fingerprint(),
        runs,
        border_gap,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantSummary {
    pub variant: BenchVariant,
    pub wall_ms: MeanStd,
    pub ops: MeanStd,
    pub zero_reductions: MeanStd,
    pub final_stage_zero_reductions: MeanStd,
    pub final_stage_ratio: MeanStd,
    pub last_k_shares: Vec<f64>,
    pub fallbacks: usize,
    /// Mean excess and missed pairs per instance against the perfect-oracle
    /// labels; a proxy, see [`ErrorProxy`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_proxy_excess: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_proxy_missed: Option<f64>,
    /// Baseline mean wall time over this variant's.
    pub speedup_mean: f64,
    /// Baseline median wall time over this variant's.
    pub speedup_median: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub p: u64,
    pub n: usize,
    pub max_degree: u32,
    pub count: usize,
    /// Variant the speedups are measured against.
    pub baseline: BenchVariant,
    pub variants: Vec<VariantSummary>,
    /// Spearman correlation of border gap with border distance, pooled.
    pub gap_distance_spearman: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub suite: SuiteConfig,
    pub summary: Vec<GroupSummary>,
    pub records: Vec<BenchRecord>,
}

fn summarize(suite: &SuiteConfig, group: &InstanceConfig, records: &[BenchRecord]) -> GroupSummary {
    let baseline = if suite.variants.contains(&BenchVariant::Ibba) { BenchVariant::Ibba } else { suite.variants[0] };
    let col = |v: BenchVariant, f: &dyn Fn(&VariantRun) -> f64| -> Vec<f64> {
        records.iter().filter_map(|r| r.run(v)).map(f).collect()
    };
    let base = col(baseline, &|r| r.wall_ms);
    let variants = suite
        .variants
        .iter()
        .map(|&v| {
            let wall = col(v, &|r| r.wall_ms);
            let proxy: Vec<ErrorProxy> = records.iter().filter_map(|r| r.run(v)?.error_proxy).collect();
            let proxy_mean = |f: fn(&ErrorProxy) -> usize| {
                (!proxy.is_empty()).then(|| mean(&proxy.iter().map(|e| f(e) as f64).collect::<Vec<_>>()))
            };
            let shares = (0..5).map(|k| mean(&col(v, &|r| r.last_k_shares[k]))).collect();
            VariantSummary {
                variant: v,
                wall_ms: MeanStd::of(&wall),
                ops: MeanStd::of(&col(v, &|r| r.ops as f64)),
                zero_reductions: MeanStd::of(&col(v, &|r| r.zero_reductions as f64)),
                final_stage_zero_reductions: MeanStd::of(&col(v, &|r| r.final_stage_zero_reductions as f64)),
                final_stage_ratio: MeanStd::of(&col(v, &|r| r.final_stage_ratio)),
                last_k_shares: shares,
                fallbacks: records.iter().filter_map(|r| r.run(v)).map(|r| r.fallbacks).sum(),
                error_proxy_excess: proxy_mean(|e| e.excess),
                error_proxy_missed: proxy_mean(|e| e.missed),
                speedup_mean: mean(&base) / mean(&wall),
                speedup_median: median(&base) / median(&wall),
            }
        })
        .collect();
    let gap_distance_spearman = suite.border_gap.then(|| {
        let pts: Vec<(f64, usize)> = records.iter().flat_map(|r| r.border_gap.iter().copied()).collect();
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1 as f64).collect();
        spearman(&xs, &ys)
    });
    GroupSummary {
        p: group.p,
        n: group.n,
        max_degree: group.max_degree,
        count: records.len(),
        baseline,
        variants,
        gap_distance_spearman,
    }
}

/// Runs every group of the suite. Instances run in parallel; results are
/// in instance order, so everything except wall times is reproducible.
pub fn run_benchmark(suite: &SuiteConfig) -> Result<BenchReport> {
    suite.validate()?;
    let work = || -> Result<BenchReport> {
        let mut summary = Vec::new();
        let mut records = Vec::new();
        for group in suite.groups() {
            let recs: Vec<BenchRecord> =
                (0..suite.count).into_par_iter().map(|i| run_instance(suite, &group, i)).collect::<Result<_>>()?;
            summary.push(summarize(suite, &group, &recs));
            records.extend(recs);
        }
        Ok(BenchReport { suite: suite.clone(), summary, records })
    };
    match suite.thread_count() {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(work),
        None => work(),
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    instance: usize,
    p: u64,
    n: usize,
    max_degree: u32,
    seed: u64,
    variant: &'a str,
    wall_ms: f64,
    ops: u64,
    zero_reductions: usize,
    final_stage_zero_reductions: usize,
    fallbacks: usize,
    enlargements: usize,
    oracle_calls: usize,
    final_stage_ratio: f64,
    basis_hash: String,
    error_proxy_excess: Option<usize>,
    error_proxy_missed: Option<usize>,
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per instance and variant.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.records {
            for run in &r.runs {
                out.serialize(CsvRow {
                    instance: r.instance,
                    p: r.p,
                    n: r.n,
                    max_degree: r.max_degree,
                    seed: r.seed,
                    variant: run.variant.name(),
                    wall_ms: run.wall_ms,
                    ops: run.ops,
                    zero_reductions: run.zero_reductions,
                    final_stage_zero_reductions: run.final_stage_zero_reductions,
                    fallbacks: run.fallbacks,
                    enlargements: run.enlargements,
                    oracle_calls: run.oracle_calls,
                    final_stage_ratio: run.final_stage_ratio,
                    basis_hash: format!("{:016x}", run.basis_hash),
                    error_proxy_excess: run.error_proxy.map(|e| e.excess),
                    error_proxy_missed: run.error_proxy.map(|e| e.missed),
                })
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// The report with wall-clock fields zeroed.
    pub fn without_timings(&self) -> BenchReport {
        let mut r = self.clone();
        for rec in &mut r.records {
            for run in &mut rec.runs {
                run.wall_ms = 0.0;
            }
        }
        for g in &mut r.summary {
            for v in &mut g.variants {
                v.wall_ms = MeanStd::default();
                v.speedup_mean = 0.0;
                v.speedup_median = 0.0;
            }
        }
        r
    }
}
