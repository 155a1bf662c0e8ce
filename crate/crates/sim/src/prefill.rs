//! Pre-fill propagation against annotation coverage. Annotators answer at
//! random on anchor datasets only; every other disputed pair is a
//! pre-fill candidate.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crowdval_core::coherence::{
    build_network, infer_prefills, Assertion, DatasetScope, OntologyNetwork, PendingPair, PrefillSettings, Rule,
};
use crowdval_core::task::Verdict;
use crowdval_core::partition_mappings;

use crate::config::{DomainSpec, SimConfig};
use crate::output::{PrefillRow, RowKind};
use crate::stats::{mean, sd};
use crate::synth::{synth_domain, SynthDomain};
use crate::{stream, SimError};

/// Counts for one coverage, summed over annotators.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PrefillCounts {
    pub by_rule: [f64; 4],
    pub conflicts: f64,
}

impl PrefillCounts {
    pub fn get(&self, rule: Rule) -> f64 {
        self.by_rule[rule_index(rule)]
    }

    pub fn total(&self) -> f64 {
        self.by_rule.iter().sum()
    }

    fn add(&mut self, other: &PrefillCounts) {
        for (a, b) in self.by_rule.iter_mut().zip(other.by_rule) {
            *a += b;
        }
        self.conflicts += other.conflicts;
    }
}

fn rule_index(rule: Rule) -> usize {
    Rule::ALL.iter().position(|&r| r == rule).expect("listed")
}

/// The disputed pairs of a domain, split by whether annotators see them.
pub struct Candidates {
    pub anchor: Vec<PendingPair>,
    pub others: Vec<PendingPair>,
}

pub fn candidates(domain: &SynthDomain) -> Result<Candidates, SimError> {
    let mut out = Candidates {
        anchor: Vec::new(),
        others: Vec::new(),
    };
    for d in &domain.datasets {
        let partition = partition_mappings(&d.dataset.reference, &d.matcher)?;
        let cells = partition.reference_only.values().chain(partition.matcher_only.values());
        let list = if d.anchor { &mut out.anchor } else { &mut out.others };
        for (k, c) in cells.enumerate() {
            list.push(PendingPair::new(format!("{}-{k}", d.dataset.id), &c.source, &c.target, &d.dataset.id));
        }
    }
    Ok(out)
}

pub fn base_network(domain: &SynthDomain) -> Result<OntologyNetwork, SimError> {
    let scopes = domain.datasets.iter().map(|d| {
        DatasetScope::new(&d.dataset.id, &d.dataset.ontology_a.id, &d.dataset.ontology_b.id)
    });
    Ok(build_network(domain.ontologies.iter().cloned(), scopes, [])?)
}

/// Pre-fills one annotator gets after answering `answered` (pair, value)
/// with everything else pending.
pub fn prefills_for(
    base: &OntologyNetwork,
    answered: &[(&PendingPair, Verdict)],
    pending: &[PendingPair],
    one_to_one: bool,
) -> Result<PrefillCounts, SimError> {
    let mut net = base.clone();
    net.add_assertions(
        answered
            .iter()
            .map(|(p, v)| Assertion::user(&p.source, &p.target, *v, &p.dataset_id)),
    )?;
    let inference = infer_prefills(
        &net,
        pending,
        PrefillSettings {
            one_to_one,
            cross_dataset: true,
        },
    );
    let mut counts = PrefillCounts::default();
    for p in &inference.prefills {
        counts.by_rule[rule_index(p.rule)] += 1.0;
    }
    counts.conflicts = inference.conflicts.len() as f64;
    Ok(counts)
}

/// Per coverage, totals over all annotators for one replicate. Each
/// annotator answers a prefix of one random order, so higher coverage
/// extends lower coverage.
fn domain_replicate(cfg: &SimConfig, spec: &DomainSpec, seed: u64, stream_base: u64) -> Result<Vec<PrefillCounts>, SimError> {
    let domain = synth_domain(spec, &mut stream(seed, stream_base))?;
    let cand = candidates(&domain)?;
    let base = base_network(&domain)?;
    let mut rng = stream(seed, stream_base + 1);
    let mut out = vec![PrefillCounts::default(); cfg.coverages.len()];
    for _ in 0..cfg.annotator_count {
        let mut order: Vec<usize> = (0..cand.anchor.len()).collect();
        order.shuffle(&mut rng);
        let votes: Vec<Verdict> = order
            .iter()
            .map(|_| if rng.random::<bool>() { Verdict::Equivalent } else { Verdict::NotEquivalent })
            .collect();
        for (g, &c) in cfg.coverages.iter().enumerate() {
            let k = (c * cand.anchor.len() as f64).round() as usize;
            let answered: Vec<(&PendingPair, Verdict)> =
                order[..k].iter().zip(&votes).map(|(&i, &v)| (&cand.anchor[i], v)).collect();
            let mut pending: Vec<PendingPair> = order[k..].iter().map(|&i| cand.anchor[i].clone()).collect();
            pending.extend(cand.others.iter().cloned());
            let counts = prefills_for(&base, &answered, &pending, cfg.prefill_one_to_one)?;
            out[g].add(&counts);
        }
    }
    Ok(out)
}

fn row(domain: &str, coverage: f64, kind: RowKind, seed: Option<u64>, c: &PrefillCounts, total_sd: Option<f64>) -> PrefillRow {
    PrefillRow {
        domain: domain.into(),
        coverage,
        kind,
        replicate_seed: seed,
        transitive_equivalence: c.get(Rule::TransitiveEquivalence),
        subsumption_negativity: c.get(Rule::SubsumptionNegativity),
        disjointedness: c.get(Rule::Disjointedness),
        one_to_one_negativity: c.get(Rule::OneToOneNegativity),
        conflicts: c.conflicts,
        total: c.total(),
        total_sd,
    }
}

fn emit(cfg: &SimConfig, name: &str, per_rep: &[Vec<PrefillCounts>], rows: &mut Vec<PrefillRow>) {
    for (g, &coverage) in cfg.coverages.iter().enumerate() {
        let mut sum = PrefillCounts::default();
        for (r, counts) in per_rep.iter().enumerate() {
            rows.push(row(name, coverage, RowKind::Replicate(r), Some(cfg.replicate_seed(r)), &counts[g], None));
            sum.add(&counts[g]);
        }
        let n = per_rep.len() as f64;
        let avg = PrefillCounts {
            by_rule: sum.by_rule.map(|x| x / n),
            conflicts: sum.conflicts / n,
        };
        let totals: Vec<f64> = per_rep.iter().map(|c| c[g].total()).collect();
        debug_assert!((mean(&totals) - avg.total()).abs() < 1e-9);
        rows.push(row(name, coverage, RowKind::Mean, None, &avg, Some(sd(&totals))));
    }
}

/// Rows per domain, then `all` summing the domains.
pub fn run_prefill_sweep(cfg: &SimConfig) -> Result<Vec<PrefillRow>, SimError> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut all: Vec<Vec<PrefillCounts>> = vec![vec![PrefillCounts::default(); cfg.coverages.len()]; cfg.replicates];
    for (di, spec) in cfg.prefill_domains.iter().enumerate() {
        let mut per_rep = Vec::new();
        for r in 0..cfg.replicates {
            let counts = domain_replicate(cfg, spec, cfg.replicate_seed(r), 100 + 2 * di as u64)?;
            for (acc, c) in all[r].iter_mut().zip(&counts) {
                acc.add(c);
            }
            per_rep.push(counts);
        }
        emit(cfg, &spec.name, &per_rep, &mut rows);
    }
    emit(cfg, "all", &all, &mut rows);
    Ok(rows)
}

/// Mean total per coverage for `domain` (or `all`).
pub fn mean_totals(rows: &[PrefillRow], domain: &str) -> BTreeMap<String, f64> {
    rows.iter()
        .filter(|r| r.domain == domain && r.kind == RowKind::Mean)
        .map(|r| (format!("{:.6}", r.coverage), r.total))
        .collect()
}
