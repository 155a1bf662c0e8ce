//! Discovery-rate sweeps: expert ratio, expert knowledge and corrections.

use std::collections::BTreeMap;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::Rng;

use crowdval_core::revision::{Origin, Outcome, TaskLedger};
use crowdval_core::seeds::{forge_task_pairs, SeedConfig};
use crowdval_core::task::{DisputeSide, Verdict};
use crowdval_core::trust::{accept, agreement_score, trustworthiness, unweighted_majority, Vote};
use crowdval_core::{
    partition_mappings, AnnotationPair, Decision, PairId, PairKind, TaskId, TaskSettings, Threshold, UserId,
};

use crate::config::{DatasetSpec, DomainSpec, SimConfig, Spread, Target};
use crate::output::{Mechanism, RowKind, SweepRow};
use crate::population::{population_from_draws, spread_population, AnnotatorModel, PopulationProfile};
use crate::stats::{mean, sd};
use crate::synth::synth_domain;
use crate::{stream, streams, SimError};

/// A forged task with the correct answer of every pair.
#[derive(Debug, Clone)]
pub struct SimTask {
    pub task_id: TaskId,
    pub pairs: Vec<AnnotationPair>,
    pub truth: Vec<Verdict>,
}

impl SimTask {
    pub fn build(spec: &DatasetSpec, seed: u64) -> Result<SimTask, SimError> {
        let domain = DomainSpec {
            name: "sim".into(),
            ontologies: 2,
            anchor: 0,
            concepts: spec.entities,
            dataset: spec.clone(),
        };
        let synth = synth_domain(&domain, &mut stream(seed, streams::DOMAIN))?;
        let d = &synth.datasets[0];
        let partition = partition_mappings(&d.dataset.reference, &d.matcher)?;
        let forged = forge_task_pairs(
            &partition,
            (&d.dataset.ontology_a, &d.dataset.ontology_b),
            TaskSettings::default(),
            &SeedConfig::default(),
            "q",
            seed,
        )?;
        let truth = forged
            .pairs
            .iter()
            .map(|p| match &p.kind {
                PairKind::Seed(label) => label.gold,
                PairKind::Disputed {
                    side: DisputeSide::ReferenceOnly,
                } => Verdict::Equivalent,
                PairKind::Disputed {
                    side: DisputeSide::MatcherOnly,
                } => Verdict::NotEquivalent,
            })
            .collect();
        Ok(SimTask {
            task_id: TaskId::new("sim"),
            pairs: forged.pairs,
            truth,
        })
    }

    fn side(&self, i: usize) -> Option<DisputeSide> {
        self.pairs[i].dispute_side()
    }

    fn count(&self, side: DisputeSide) -> usize {
        (0..self.pairs.len()).filter(|&i| self.side(i) == Some(side)).count()
    }
}

fn answer(truth: Verdict, correct: bool) -> Decision {
    if correct {
        truth.into()
    } else {
        truth.negate().into()
    }
}

/// `draws[u][q] < p_u` means annotator `u` answers pair `q` correctly.
pub fn sample_votes(task: &SimTask, pop: &[AnnotatorModel], draws: &[Vec<f64>]) -> Vec<Vec<Decision>> {
    pop.iter()
        .zip(draws)
        .map(|(a, row)| task.truth.iter().zip(row).map(|(&t, &u)| answer(t, u < a.p)).collect())
        .collect()
}

fn vote_draws(n: usize, pairs: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..pairs).map(|_| rng.random()).collect()).collect()
}

/// (tp, fp) discovery for both mechanisms when every annotator answered
/// every pair.
pub fn discovery(task: &SimTask, votes: &[Vec<Decision>], theta: Threshold) -> BTreeMap<Mechanism, (f64, f64)> {
    let weights: Vec<_> = votes
        .iter()
        .enumerate()
        .map(|(u, row)| {
            let answers: BTreeMap<PairId, Decision> =
                task.pairs.iter().zip(row).map(|(p, &d)| (p.id.clone(), d)).collect();
            trustworthiness(&UserId::new(format!("a{u}")), &task.task_id, &task.pairs, &answers)
                .ok()
                .and_then(|t| t.weight())
        })
        .collect();
    let mut accepted: BTreeMap<(Mechanism, DisputeSide), usize> = BTreeMap::new();
    for (q, p) in task.pairs.iter().enumerate() {
        let Some(side) = task.side(q) else {
            continue;
        };
        let column: Vec<Decision> = votes.iter().map(|row| row[q]).collect();
        let weighted_votes: Vec<Vote> = weights
            .iter()
            .zip(&column)
            .filter_map(|(w, &d)| w.map(|w| Vote::new(w, d)))
            .collect();
        let w = agreement_score(&p.id, &weighted_votes).is_ok_and(|s| accept(&s, theta, true));
        let u = unweighted_majority(&p.id, &column, theta).unwrap_or(false);
        *accepted.entry((Mechanism::Weighted, side)).or_default() += usize::from(w);
        *accepted.entry((Mechanism::Unweighted, side)).or_default() += usize::from(u);
    }
    rates(task, &accepted)
}

fn rates(task: &SimTask, accepted: &BTreeMap<(Mechanism, DisputeSide), usize>) -> BTreeMap<Mechanism, (f64, f64)> {
    let frac = |m, side| {
        let n = task.count(side);
        if n == 0 {
            0.0
        } else {
            accepted.get(&(m, side)).copied().unwrap_or(0) as f64 / n as f64
        }
    };
    Mechanism::BOTH
        .into_iter()
        .map(|m| (m, (frac(m, DisputeSide::ReferenceOnly), frac(m, DisputeSide::MatcherOnly))))
        .collect()
}

/// Per grid point, per replicate: rates for both mechanisms.
type Grid = Vec<Vec<BTreeMap<Mechanism, (f64, f64)>>>;

struct Labels<'a> {
    sweep: &'a str,
    parameter: &'a str,
    spread: Option<String>,
    target: Option<String>,
}

fn rows_for(cfg: &SimConfig, labels: &Labels, values: &[f64], grid: &Grid) -> Vec<SweepRow> {
    let mut rows = Vec::new();
    for (g, &value) in values.iter().enumerate() {
        for m in Mechanism::BOTH {
            let row = |kind, seed, tp, fp, tp_sd, fp_sd| SweepRow {
                sweep: labels.sweep.into(),
                parameter: labels.parameter.into(),
                value,
                spread: labels.spread.clone(),
                target: labels.target.clone(),
                mechanism: m,
                kind,
                replicate_seed: seed,
                tp_discovery: tp,
                fp_discovery: fp,
                tp_sd,
                fp_sd,
            };
            let per: Vec<(f64, f64)> = grid[g].iter().map(|r| r[&m]).collect();
            for (r, &(tp, fp)) in per.iter().enumerate() {
                rows.push(row(RowKind::Replicate(r), Some(cfg.replicate_seed(r)), tp, fp, None, None));
            }
            let tps: Vec<f64> = per.iter().map(|x| x.0).collect();
            let fps: Vec<f64> = per.iter().map(|x| x.1).collect();
            rows.push(row(RowKind::Mean, None, mean(&tps), mean(&fps), Some(sd(&tps)), Some(sd(&fps))));
        }
    }
    rows
}

/// Shared body of the expert-ratio and expert-knowledge sweeps. Within a
/// replicate the task, annotator draws and vote draws are fixed, so grid
/// points differ only in the population profile.
fn population_sweep(
    cfg: &SimConfig,
    labels: Labels,
    values: &[f64],
    profile_at: impl Fn(f64) -> PopulationProfile,
) -> Result<Vec<SweepRow>, SimError> {
    cfg.validate()?;
    let theta = Threshold::new(cfg.threshold)?;
    for &v in values {
        profile_at(v).validate()?;
    }
    let mut grid: Grid = vec![Vec::new(); values.len()];
    for r in 0..cfg.replicates {
        let seed = cfg.replicate_seed(r);
        let task = SimTask::build(&cfg.dataset, seed)?;
        let mut prng = stream(seed, streams::POPULATION);
        let draws: Vec<f64> = (0..cfg.annotator_count).map(|_| prng.random()).collect();
        let vdraws = vote_draws(cfg.annotator_count, task.pairs.len(), &mut stream(seed, streams::VOTES));
        for (g, &v) in values.iter().enumerate() {
            let pop = population_from_draws(&profile_at(v), &draws);
            let votes = sample_votes(&task, &pop, &vdraws);
            grid[g].push(discovery(&task, &votes, theta));
        }
    }
    Ok(rows_for(cfg, &labels, values, &grid))
}

pub fn run_trust_sweep(cfg: &SimConfig) -> Result<Vec<SweepRow>, SimError> {
    let labels = Labels {
        sweep: "trust",
        parameter: "expert_ratio",
        spread: None,
        target: None,
    };
    population_sweep(cfg, labels, &cfg.expert_ratios, |ratio| PopulationProfile {
        expert_ratio: ratio,
        expert_range: cfg.expert_range,
        nonexpert_range: cfg.nonexpert_range,
    })
}

pub fn run_expert_knowledge_sweep(cfg: &SimConfig) -> Result<Vec<SweepRow>, SimError> {
    let labels = Labels {
        sweep: "knowledge",
        parameter: "expert_lower_bound",
        spread: None,
        target: None,
    };
    population_sweep(cfg, labels, &cfg.knowledge_lower_bounds, |lower| PopulationProfile {
        expert_ratio: cfg.knowledge_expert_ratio,
        expert_range: crate::config::Range::new(lower, cfg.expert_range.hi),
        nonexpert_range: cfg.nonexpert_range,
    })
}

fn user(u: usize) -> UserId {
    UserId::new(format!("a{u}"))
}

fn start() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2025, 1, 1, 0, 0, 0).single().expect("valid")
}

/// Rates read back from the ledger at `as_of`.
fn ledger_discovery(task: &SimTask, ledger: &TaskLedger, as_of: DateTime<Utc>, theta: Threshold) -> BTreeMap<Mechanism, (f64, f64)> {
    let snap = ledger.decision_snapshot(Some(as_of));
    let board = ledger.board(Some(as_of));
    let mut accepted: BTreeMap<(Mechanism, DisputeSide), usize> = BTreeMap::new();
    for (q, p) in task.pairs.iter().enumerate() {
        let Some(side) = task.side(q) else {
            continue;
        };
        let w = snap.pairs.get(&p.id).is_some_and(|r| r.outcome == Outcome::Accepted);
        let column: Vec<Decision> = board.values().filter_map(|m| m.get(&p.id)).map(|e| e.value).collect();
        let u = unweighted_majority(&p.id, &column, theta).unwrap_or(false);
        *accepted.entry((Mechanism::Weighted, side)).or_default() += usize::from(w);
        *accepted.entry((Mechanism::Unweighted, side)).or_default() += usize::from(u);
    }
    rates(task, &accepted)
}

/// One annotator's pending corrections, in the order they are applied.
struct Corrections {
    wrong_seeds: Vec<usize>,
    wrong_others: Vec<usize>,
    /// Cascade draw per pair (seed target only).
    cascade: Vec<f64>,
    seeds_total: usize,
    seeds_right: usize,
    fixed: Vec<bool>,
}

/// Runs one (spread, replicate): initial answers are recorded at the start
/// time, then the corrections for each fraction are appended one second
/// apart and the snapshot at that instant is read.
fn correction_run(
    cfg: &SimConfig,
    spread: Spread,
    target: Target,
    seed: u64,
    fractions: &[f64],
) -> Result<Vec<BTreeMap<Mechanism, (f64, f64)>>, SimError> {
    let theta = Threshold::new(cfg.threshold)?;
    let task = SimTask::build(&cfg.dataset, seed)?;
    let pop = spread_population(spread, cfg.correction_expert_ratio, cfg.annotator_count);
    let vdraws = vote_draws(pop.len(), task.pairs.len(), &mut stream(seed, streams::VOTES));
    let votes = sample_votes(&task, &pop, &vdraws);

    let mut ledger = TaskLedger::new(
        task.task_id.clone(),
        "sim",
        task.pairs.clone(),
        TaskSettings::default(),
        theta,
    );
    let t0 = start();
    for (u, row) in votes.iter().enumerate() {
        for (p, &d) in task.pairs.iter().zip(row) {
            ledger.record_decision(&user(u), &p.id, d, Origin::Manual, t0)?;
        }
    }

    let mut order = stream(seed, streams::ORDER);
    let mut crng = stream(seed, streams::CASCADE);
    let mut state: Vec<Corrections> = votes
        .iter()
        .map(|row| {
            let mut wrong = |seed_pairs: bool| {
                let mut v: Vec<usize> = (0..row.len())
                    .filter(|&q| task.pairs[q].is_seed() == seed_pairs && row[q].verdict() != Some(task.truth[q]))
                    .collect();
                v.shuffle(&mut order);
                v
            };
            let wrong_seeds = wrong(true);
            let wrong_others = wrong(false);
            let seeds_total = task.pairs.iter().filter(|p| p.is_seed()).count();
            Corrections {
                seeds_right: seeds_total - wrong_seeds.len(),
                seeds_total,
                wrong_seeds,
                wrong_others,
                cascade: (0..row.len()).map(|_| crng.random()).collect(),
                fixed: vec![false; row.len()],
            }
        })
        .collect();

    // fractions are applied in increasing order so corrections nest
    let mut levels: Vec<(usize, f64)> = fractions.iter().copied().enumerate().collect();
    levels.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut out = vec![BTreeMap::new(); fractions.len()];
    for (step, (g, f)) in levels.into_iter().enumerate() {
        let now = t0 + Duration::seconds(step as i64 + 1);
        for (u, c) in state.iter_mut().enumerate() {
            let fix = |q: usize, c: &mut Corrections, ledger: &mut TaskLedger| -> Result<(), SimError> {
                if !c.fixed[q] {
                    c.fixed[q] = true;
                    ledger.record_decision(&user(u), &task.pairs[q].id, task.truth[q].into(), Origin::Manual, now)?;
                }
                Ok(())
            };
            match target {
                Target::NonSeed => {
                    let k = (f * c.wrong_others.len() as f64).round() as usize;
                    for i in 0..k {
                        fix(c.wrong_others[i], c, &mut ledger)?;
                    }
                }
                Target::Seed => {
                    let k = (f * c.wrong_seeds.len() as f64).round() as usize;
                    for i in 0..k {
                        fix(c.wrong_seeds[i], c, &mut ledger)?;
                    }
                    // accuracy follows the recomputed trustworthiness
                    let m = c.seeds_total as f64;
                    let before = c.seeds_right as f64 / m;
                    let after = (c.seeds_right + k) as f64 / m;
                    let q = if before < 1.0 { (after - before) / (1.0 - before) } else { 0.0 };
                    for i in 0..c.wrong_others.len() {
                        let pair = c.wrong_others[i];
                        if c.cascade[pair] < q {
                            fix(pair, c, &mut ledger)?;
                        }
                    }
                }
            }
        }
        out[g] = ledger_discovery(&task, &ledger, now, theta);
    }
    Ok(out)
}

pub fn run_correction_sweep(cfg: &SimConfig, target: Target) -> Result<Vec<SweepRow>, SimError> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &spread in &cfg.spreads {
        let mut grid: Grid = vec![Vec::new(); cfg.correction_fractions.len()];
        for r in 0..cfg.replicates {
            let per = correction_run(cfg, spread, target, cfg.replicate_seed(r), &cfg.correction_fractions)?;
            for (g, x) in per.into_iter().enumerate() {
                grid[g].push(x);
            }
        }
        let labels = Labels {
            sweep: "correction",
            parameter: "correction_fraction",
            spread: Some(spread.label()),
            target: Some(target.name().into()),
        };
        rows.extend(rows_for(cfg, &labels, &cfg.correction_fractions, &grid));
    }
    Ok(rows)
}
