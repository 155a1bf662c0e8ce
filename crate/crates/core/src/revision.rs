//! Append-only decision log for one task, with point-in-time replays.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coherence::{Assertion, Inference, PendingPair, PreFill, Rule};
use crate::ontology::{Status, Threshold};
use crate::task::{AnnotationPair, Decision, PairId, TaskId, TaskSettings, UserId};
use crate::trust::{accept, agreement_score, trustworthiness, AgreementScore, Tau, TrustProfile, Vote};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogError {
    #[error("pair {0} not found in task")]
    NotFound(PairId),
    #[error("task {0} is closed")]
    TaskClosed(TaskId),
    #[error("timestamp {got} is earlier than the last recorded {last}")]
    NonMonotonicTimestamp { last: DateTime<Utc>, got: DateTime<Utc> },
    #[error("event log is corrupt at line {line}: {message}")]
    Corrupt { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Manual,
    Prefill,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionEvent {
    pub seq: u64,
    pub timestamp: DateTime<Utc>,
    pub user: UserId,
    pub pair: PairId,
    pub value: Decision,
    pub origin: Origin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<Rule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explanation: Option<String>,
}

/// A user's latest entry for a pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub value: Decision,
    pub origin: Origin,
    pub rule: Option<Rule>,
    pub explanation: Option<String>,
}

/// Latest entries per user and pair.
pub type Board = BTreeMap<UserId, BTreeMap<PairId, Entry>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Accepted,
    Rejected,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub outcome: Outcome,
    pub score: Option<AgreementScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub task_id: TaskId,
    pub as_of: Option<DateTime<Utc>>,
    pub weighted: bool,
    pub threshold: f64,
    pub trust: BTreeMap<UserId, TrustProfile>,
    pub pairs: BTreeMap<PairId, PairResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrustChange {
    pub user: UserId,
    pub old: Option<f64>,
    pub new: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreChange {
    pub pair: PairId,
    pub old: PairResult,
    pub new: PairResult,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PrefillChanges {
    pub added: Vec<PreFill>,
    pub retracted: Vec<PairId>,
}

impl PrefillChanges {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.retracted.is_empty()
    }
}

/// What was recomputed after one event.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ChangeSet {
    pub recomputed_trust: Vec<TrustChange>,
    pub recomputed_scores: Vec<ScoreChange>,
    pub prefill_changes: PrefillChanges,
}

impl ChangeSet {
    pub fn is_empty(&self) -> bool {
        self.recomputed_trust.is_empty()
            && self.recomputed_scores.is_empty()
            && self.prefill_changes.is_empty()
    }
}

/// Pairs, settings and the event log of one annotation task.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaskLedger {
    pub task_id: TaskId,
    pub dataset_id: String,
    pairs: Vec<AnnotationPair>,
    pub settings: TaskSettings,
    pub threshold: Threshold,
    pub status: Status,
    #[serde(skip)]
    events: Vec<DecisionEvent>,
    #[serde(skip)]
    index: HashMap<PairId, usize>,
}

impl TaskLedger {
    pub fn new(
        task_id: TaskId,
        dataset_id: impl Into<String>,
        pairs: Vec<AnnotationPair>,
        settings: TaskSettings,
        threshold: Threshold,
    ) -> Self {
        let mut ledger = TaskLedger {
            task_id,
            dataset_id: dataset_id.into(),
            pairs,
            settings,
            threshold,
            status: Status::Open,
            events: Vec::new(),
            index: HashMap::new(),
        };
        ledger.reindex();
        ledger
    }

    /// Rebuilds the pair index; needed after deserializing.
    pub fn reindex(&mut self) {
        self.index = self
            .pairs
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id.clone(), i))
            .collect();
    }

    pub fn pairs(&self) -> &[AnnotationPair] {
        &self.pairs
    }

    pub fn pair(&self, id: &PairId) -> Option<&AnnotationPair> {
        self.index.get(id).map(|&i| &self.pairs[i])
    }

    pub fn events(&self) -> &[DecisionEvent] {
        &self.events
    }

    pub fn seed_count(&self) -> usize {
        self.pairs.iter().filter(|p| p.is_seed()).count()
    }

    fn weighted(&self) -> bool {
        self.settings.trust_enabled && self.seed_count() > 0
    }

    pub fn record_decision(
        &mut self,
        user: &UserId,
        pair: &PairId,
        value: Decision,
        origin: Origin,
        now: DateTime<Utc>,
    ) -> Result<DecisionEvent, LogError> {
        self.record(user, pair, value, origin, None, now)
    }

    fn record(
        &mut self,
        user: &UserId,
        pair: &PairId,
        value: Decision,
        origin: Origin,
        prefill: Option<(Rule, String)>,
        now: DateTime<Utc>,
    ) -> Result<DecisionEvent, LogError> {
        if !self.index.contains_key(pair) {
            return Err(LogError::NotFound(pair.clone()));
        }
        if self.status == Status::Closed {
            return Err(LogError::TaskClosed(self.task_id.clone()));
        }
        if let Some(last) = self.events.last() {
            if now < last.timestamp {
                return Err(LogError::NonMonotonicTimestamp {
                    last: last.timestamp,
                    got: now,
                });
            }
        }
        let (rule, explanation) = prefill.map_or((None, None), |(r, e)| (Some(r), Some(e)));
        let event = DecisionEvent {
            seq: self.events.len() as u64 + 1,
            timestamp: now,
            user: user.clone(),
            pair: pair.clone(),
            value,
            origin,
            rule,
            explanation,
        };
        self.events.push(event.clone());
        Ok(event)
    }

    /// Re-appends persisted events, checking numbering and pair ids.
    pub fn restore(&mut self, events: Vec<DecisionEvent>) -> Result<(), LogError> {
        for (i, e) in events.into_iter().enumerate() {
            let expected = self.events.len() as u64 + 1;
            if e.seq != expected {
                return Err(LogError::Corrupt {
                    line: i + 1,
                    message: format!("sequence {} where {expected} was expected", e.seq),
                });
            }
            if !self.index.contains_key(&e.pair) {
                return Err(LogError::Corrupt {
                    line: i + 1,
                    message: format!("unknown pair {}", e.pair),
                });
            }
            self.events.push(e);
        }
        Ok(())
    }

    fn visible(as_of: Option<DateTime<Utc>>) -> impl Fn(&&DecisionEvent) -> bool {
        move |e| as_of.is_none_or(|t| e.timestamp <= t)
    }

    pub fn board(&self, as_of: Option<DateTime<Utc>>) -> Board {
        board_of(self.events.iter().filter(Self::visible(as_of)))
    }

    pub fn current_entry(&self, user: &UserId, pair: &PairId, as_of: Option<DateTime<Utc>>) -> Option<Entry> {
        self.events
            .iter()
            .filter(Self::visible(as_of))
            .rfind(|e| &e.user == user && &e.pair == pair)
            .map(entry_of)
    }

    /// Latest value at or before `as_of` (default: now); `NA` if none.
    pub fn current_decision(&self, user: &UserId, pair: &PairId, as_of: Option<DateTime<Utc>>) -> Decision {
        self.current_entry(user, pair, as_of)
            .map_or(Decision::NA, |e| e.value)
    }

    pub fn participants(&self) -> BTreeSet<UserId> {
        self.events.iter().map(|e| e.user.clone()).collect()
    }

    fn values(entries: Option<&BTreeMap<PairId, Entry>>) -> BTreeMap<PairId, Decision> {
        entries
            .into_iter()
            .flatten()
            .map(|(p, e)| (p.clone(), e.value))
            .collect()
    }

    fn profile(&self, board: &Board, user: &UserId) -> Option<TrustProfile> {
        trustworthiness(user, &self.task_id, &self.pairs, &Self::values(board.get(user))).ok()
    }

    fn is_complete(&self, board: &Board, user: &UserId) -> bool {
        let d = board.get(user);
        self.pairs
            .iter()
            .all(|p| d.and_then(|m| m.get(&p.id)).is_some_and(|e| !e.value.is_na()))
    }

    fn weights(&self, board: &Board) -> BTreeMap<UserId, Tau> {
        board
            .keys()
            .filter(|u| self.is_complete(board, u))
            .filter_map(|u| {
                if self.weighted() {
                    self.profile(board, u).and_then(|p| p.weight()).map(|w| (u.clone(), w))
                } else {
                    Some((u.clone(), Tau::UNIT))
                }
            })
            .collect()
    }

    fn score(&self, board: &Board, weights: &BTreeMap<UserId, Tau>, pair: &PairId) -> PairResult {
        let votes: Vec<Vote> = weights
            .iter()
            .filter_map(|(u, &w)| {
                let d = board.get(u)?.get(pair)?.value;
                (!d.is_na()).then_some(Vote::new(w, d))
            })
            .collect();
        match agreement_score(pair, &votes) {
            Ok(score) => PairResult {
                outcome: if accept(&score, self.threshold, self.weighted()) {
                    Outcome::Accepted
                } else {
                    Outcome::Rejected
                },
                score: Some(score),
            },
            Err(_) => PairResult {
                outcome: Outcome::Undecided,
                score: None,
            },
        }
    }

    fn snapshot_of(&self, board: &Board, as_of: Option<DateTime<Utc>>) -> Snapshot {
        let weights = self.weights(board);
        let trust = if self.weighted() {
            board
                .keys()
                .filter_map(|u| self.profile(board, u).map(|p| (u.clone(), p)))
                .collect()
        } else {
            BTreeMap::new()
        };
        let pairs = self
            .pairs
            .iter()
            .filter(|p| !p.is_seed())
            .map(|p| (p.id.clone(), self.score(board, &weights, &p.id)))
            .collect();
        Snapshot {
            task_id: self.task_id.clone(),
            as_of,
            weighted: self.weighted(),
            threshold: self.threshold.value(),
            trust,
            pairs,
        }
    }

    /// Trust and scores recomputed from only the events up to `as_of`.
    pub fn decision_snapshot(&self, as_of: Option<DateTime<Utc>>) -> Snapshot {
        self.snapshot_of(&self.board(as_of), as_of)
    }

    /// Recomputes what `event` (already appended) affects. A seed answer,
    /// or a change in the user's completion, re-derives that user's τ and
    /// every pair they voted on; any other answer only its own pair.
    pub fn recompute_after_revision(&self, event: &DecisionEvent) -> ChangeSet {
        let before = board_of(self.events.iter().filter(|e| e.seq < event.seq));
        let after = board_of(self.events.iter().filter(|e| e.seq <= event.seq));
        let old_value = before
            .get(&event.user)
            .and_then(|m| m.get(&event.pair))
            .map_or(Decision::NA, |e| e.value);
        let mut changes = ChangeSet::default();
        if old_value == event.value {
            return changes;
        }
        let is_seed = self.pair(&event.pair).is_some_and(|p| p.is_seed());
        let completion_changed =
            self.is_complete(&before, &event.user) != self.is_complete(&after, &event.user);

        let mut affected: BTreeSet<PairId> = BTreeSet::new();
        if is_seed || completion_changed {
            if self.weighted() {
                let tau = |b: &Board| self.profile(b, &event.user).and_then(|p| p.tau);
                changes.recomputed_trust.push(TrustChange {
                    user: event.user.clone(),
                    old: tau(&before),
                    new: tau(&after),
                });
            }
            for b in [&before, &after] {
                if let Some(m) = b.get(&event.user) {
                    affected.extend(
                        m.iter()
                            .filter(|(p, e)| !e.value.is_na() && self.pair(p).is_some_and(|p| !p.is_seed()))
                            .map(|(p, _)| p.clone()),
                    );
                }
            }
        }
        if !is_seed {
            affected.insert(event.pair.clone());
        }
        let (wb, wa) = (self.weights(&before), self.weights(&after));
        for pair in affected {
            changes.recomputed_scores.push(ScoreChange {
                old: self.score(&before, &wb, &pair),
                new: self.score(&after, &wa, &pair),
                pair,
            });
        }
        changes
    }

    /// Non-seed pairs `user` has not decided manually.
    pub fn pending_for(&self, user: &UserId) -> Vec<PendingPair> {
        let board = self.board(None);
        let mine = board.get(user);
        self.pairs
            .iter()
            .filter(|p| !p.is_seed())
            .filter(|p| {
                mine.and_then(|m| m.get(&p.id))
                    .is_none_or(|e| e.origin == Origin::Prefill)
            })
            .map(|p| PendingPair {
                id: p.id.clone(),
                source: p.source.clone(),
                target: p.target.clone(),
                dataset_id: self.dataset_id.clone(),
            })
            .collect()
    }

    /// The user's current manual, definite, non-seed decisions.
    pub fn manual_assertions(&self, user: &UserId) -> Vec<Assertion> {
        let board = self.board(None);
        let Some(mine) = board.get(user) else {
            return Vec::new();
        };
        mine.iter()
            .filter(|(_, e)| e.origin == Origin::Manual)
            .filter_map(|(pid, e)| {
                let p = self.pair(pid)?;
                let v = e.value.verdict()?;
                (!p.is_seed()).then(|| Assertion::user(&p.source, &p.target, v, &self.dataset_id))
            })
            .collect()
    }

    /// Brings the user's pre-filled decisions in line with `inference`:
    /// new or changed pre-fills are recorded, stale ones are reset to `NA`.
    /// Manual decisions are never touched.
    pub fn apply_prefills(
        &mut self,
        user: &UserId,
        inference: &Inference,
        now: DateTime<Utc>,
    ) -> Result<PrefillChanges, LogError> {
        let wanted: BTreeMap<&PairId, &PreFill> =
            inference.prefills.iter().map(|p| (&p.pair_id, p)).collect();
        let board = self.board(None);
        let mine = board.get(user).cloned().unwrap_or_default();
        let mut changes = PrefillChanges::default();
        let ids: Vec<PairId> = self
            .pairs
            .iter()
            .filter(|p| !p.is_seed())
            .map(|p| p.id.clone())
            .collect();
        for id in ids {
            let entry = mine.get(&id);
            if entry.is_some_and(|e| e.origin == Origin::Manual) {
                continue;
            }
            match wanted.get(&id) {
                Some(pf) => {
                    let value = Decision::from(pf.value);
                    let same = entry.is_some_and(|e| e.value == value && e.explanation.as_deref() == Some(&pf.explanation));
                    if !same {
                        self.record(user, &id, value, Origin::Prefill, Some((pf.rule, pf.explanation.clone())), now)?;
                        changes.added.push((*pf).clone());
                    }
                }
                None => {
                    if entry.is_some_and(|e| !e.value.is_na()) {
                        self.record(user, &id, Decision::NA, Origin::Prefill, None, now)?;
                        changes.retracted.push(id);
                    }
                }
            }
        }
        Ok(changes)
    }
}

fn entry_of(e: &DecisionEvent) -> Entry {
    Entry {
        value: e.value,
        origin: e.origin,
        rule: e.rule,
        explanation: e.explanation.clone(),
    }
}

fn board_of<'a>(events: impl Iterator<Item = &'a DecisionEvent>) -> Board {
    let mut board = Board::new();
    for e in events {
        board
            .entry(e.user.clone())
            .or_default()
            .insert(e.pair.clone(), entry_of(e));
    }
    board
}

/// One JSON object per line.
pub fn events_to_ndjson(events: &[DecisionEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e).expect("events serialize"));
        out.push('\n');
    }
    out
}

pub fn events_from_ndjson(text: &str) -> Result<Vec<DecisionEvent>, LogError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| LogError::Corrupt {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexical::Difficulty;
    use crate::seeds::{Polarity, SeedLabel, SeedProvenance};
    use crate::task::{DisputeSide, PairKind, Verdict};
    use chrono::TimeZone;
    use proptest::prelude::*;

    fn at(s: i64) -> DateTime<Utc> {
        Utc.timestamp_opt(1_700_000_000 + s, 0).unwrap()
    }

    fn task(seeds: usize, disputed: usize, trust: bool) -> TaskLedger {
        let mut pairs = Vec::new();
        for i in 0..seeds {
            let gold = if i % 2 == 0 { Verdict::Equivalent } else { Verdict::NotEquivalent };
            pairs.push(AnnotationPair {
                id: PairId::new(format!("t-s{i}")),
                source: format!("a#s{i}"),
                target: format!("b#s{i}"),
                kind: PairKind::Seed(SeedLabel {
                    polarity: if i % 2 == 0 { Polarity::Positive } else { Polarity::Negative },
                    difficulty: Difficulty::Trivial,
                    gold,
                    provenance: if i % 2 == 0 { SeedProvenance::FromNonDisputed } else { SeedProvenance::OneToOnePermutation },
                }),
            });
        }
        for i in 0..disputed {
            pairs.push(AnnotationPair {
                id: PairId::new(format!("t-d{i}")),
                source: format!("a#d{i}"),
                target: format!("b#d{i}"),
                kind: PairKind::Disputed { side: DisputeSide::ReferenceOnly },
            });
        }
        let settings = TaskSettings { trust_enabled: trust, ..Default::default() };
        TaskLedger::new(TaskId::new("t"), "ds", pairs, settings, Threshold::default())
    }

    fn u(s: &str) -> UserId {
        UserId::new(s)
    }

    fn p(s: &str) -> PairId {
        PairId::new(s)
    }

    #[test]
    fn last_write_wins_and_as_of() {
        let mut t = task(0, 1, false);
        assert_eq!(t.current_decision(&u("x"), &p("t-d0"), None), Decision::NA);
        t.record_decision(&u("x"), &p("t-d0"), Decision::Equivalent, Origin::Manual, at(10)).unwrap();
        t.record_decision(&u("x"), &p("t-d0"), Decision::NotEquivalent, Origin::Manual, at(20)).unwrap();
        assert_eq!(t.current_decision(&u("x"), &p("t-d0"), None), Decision::NotEquivalent);
        assert_eq!(t.current_decision(&u("x"), &p("t-d0"), Some(at(15))), Decision::Equivalent);
        assert_eq!(t.current_decision(&u("x"), &p("t-d0"), Some(at(5))), Decision::NA);
        assert_eq!(t.events().len(), 2);
    }

    #[test]
    fn closed_and_unknown() {
        let mut t = task(0, 1, false);
        assert_eq!(
            t.record_decision(&u("x"), &p("nope"), Decision::Equivalent, Origin::Manual, at(0)),
            Err(LogError::NotFound(p("nope")))
        );
        t.status = Status::Closed;
        assert!(matches!(
            t.record_decision(&u("x"), &p("t-d0"), Decision::Equivalent, Origin::Manual, at(0)),
            Err(LogError::TaskClosed(_))
        ));
    }

    #[test]
    fn clock_must_not_go_back() {
        let mut t = task(0, 1, false);
        t.record_decision(&u("x"), &p("t-d0"), Decision::Equivalent, Origin::Manual, at(10)).unwrap();
        t.record_decision(&u("y"), &p("t-d0"), Decision::Equivalent, Origin::Manual, at(10)).unwrap();
        assert!(matches!(
            t.record_decision(&u("x"), &p("t-d0"), Decision::Equivalent, Origin::Manual, at(9)),
            Err(LogError::NonMonotonicTimestamp { .. })
        ));
    }

    #[test]
    fn identical_revision_is_noop() {
        let mut t = task(2, 1, true);
        let e1 = t.record_decision(&u("x"), &p("t-d0"), Decision::Equivalent, Origin::Manual, at(1)).unwrap();
        assert!(!t.recompute_after_revision(&e1).is_empty());
        let e2 = t.record_decision(&u("x"), &p("t-d0"), Decision::Equivalent, Origin::Manual, at(2)).unwrap();
        assert!(t.recompute_after_revision(&e2).is_empty());
    }

    #[test]
    fn seed_fix_raises_tau_and_cascades() {
        let mut t = task(4, 2, true);
        let x = u("x");
        // seeds golds: E, NE, E, NE; answer s0 wrong
        for (pid, d) in [
            ("t-s0", Decision::NotEquivalent),
            ("t-s1", Decision::NotEquivalent),
            ("t-s2", Decision::Equivalent),
            ("t-s3", Decision::NotEquivalent),
            ("t-d0", Decision::Equivalent),
            ("t-d1", Decision::NotEquivalent),
        ] {
            t.record_decision(&x, &p(pid), d, Origin::Manual, at(1)).unwrap();
        }
        assert_eq!(t.decision_snapshot(None).trust[&x].tau, Some(0.75));
        let e = t.record_decision(&x, &p("t-s0"), Decision::Equivalent, Origin::Manual, at(2)).unwrap();
        let cs = t.recompute_after_revision(&e);
        assert_eq!(cs.recomputed_trust, vec![TrustChange { user: x.clone(), old: Some(0.75), new: Some(1.0) }]);
        let rescored: Vec<&str> = cs.recomputed_scores.iter().map(|s| s.pair.as_str()).collect();
        assert_eq!(rescored, vec!["t-d0", "t-d1"]);
    }

    #[test]
    fn non_seed_flip_rescored_alone() {
        let mut t = task(2, 3, true);
        for who in ["x", "y"] {
            for pair in t.pairs().to_vec() {
                t.record_decision(&u(who), &pair.id, Decision::Equivalent, Origin::Manual, at(1)).unwrap();
            }
        }
        let e = t.record_decision(&u("x"), &p("t-d1"), Decision::NotEquivalent, Origin::Manual, at(2)).unwrap();
        let cs = t.recompute_after_revision(&e);
        assert!(cs.recomputed_trust.is_empty());
        assert_eq!(cs.recomputed_scores.len(), 1);
        assert_eq!(cs.recomputed_scores[0].pair, p("t-d1"));
        assert_ne!(cs.recomputed_scores[0].old, cs.recomputed_scores[0].new);
    }

    #[test]
    fn single_perfect_voter_accepts() {
        let mut t = task(2, 1, true);
        t.record_decision(&u("x"), &p("t-s0"), Decision::Equivalent, Origin::Manual, at(1)).unwrap();
        t.record_decision(&u("x"), &p("t-s1"), Decision::NotEquivalent, Origin::Manual, at(1)).unwrap();
        assert_eq!(t.decision_snapshot(None).pairs[&p("t-d0")].outcome, Outcome::Undecided);
        t.record_decision(&u("x"), &p("t-d0"), Decision::Equivalent, Origin::Manual, at(2)).unwrap();
        let s = t.decision_snapshot(None);
        assert_eq!(s.pairs[&p("t-d0")].outcome, Outcome::Accepted);
        assert_eq!(s.pairs[&p("t-d0")].score.as_ref().unwrap().raw_score, 1.0);
        assert_eq!(t.decision_snapshot(Some(at(1))).pairs[&p("t-d0")].outcome, Outcome::Undecided);
    }

    #[test]
    fn ndjson_roundtrip() {
        let mut t = task(1, 1, true);
        t.record_decision(&u("x"), &p("t-d0"), Decision::Equivalent, Origin::Manual, at(1)).unwrap();
        t.record_decision(&u("x"), &p("t-s0"), Decision::NA, Origin::Manual, at(2)).unwrap();
        let text = events_to_ndjson(t.events());
        let back = events_from_ndjson(&text).unwrap();
        assert_eq!(back, t.events());
        let mut fresh = task(1, 1, true);
        fresh.restore(back).unwrap();
        assert_eq!(
            serde_json::to_string(&fresh.decision_snapshot(None)).unwrap(),
            serde_json::to_string(&t.decision_snapshot(None)).unwrap()
        );
        assert!(matches!(events_from_ndjson("{not json"), Err(LogError::Corrupt { line: 1, .. })));
    }

    /// Straight evaluation of trust, votes and acceptance from a list of
    /// (user, pair, value) triples already cut at `as_of`.
    fn naive(t: &TaskLedger, events: &[(usize, usize, Decision)], users: usize) -> BTreeMap<PairId, Outcome> {
        let pairs = t.pairs();
        let mut cur = vec![vec![Decision::NA; pairs.len()]; users];
        for &(uu, pp, d) in events {
            cur[uu][pp] = d;
        }
        let seeds: Vec<usize> = (0..pairs.len()).filter(|&i| pairs[i].is_seed()).collect();
        let weighted = t.settings.trust_enabled && !seeds.is_empty();
        let mut out = BTreeMap::new();
        for (i, pair) in pairs.iter().enumerate() {
            if pair.is_seed() {
                continue;
            }
            // integer numerators over the shared seed count keep ties exact
            let (mut num, mut den, mut n, mut e) = (0usize, 0usize, 0usize, 0usize);
            for row in &cur {
                if row.iter().any(|d| d.is_na()) {
                    continue;
                }
                let tau = if weighted {
                    seeds.iter().filter(|&&s| row[s].verdict() == Some(pairs[s].seed().unwrap().gold)).count()
                } else {
                    1
                };
                n += 1;
                den += tau;
                if row[i] == Decision::Equivalent {
                    num += tau;
                    e += 1;
                }
            }
            let outcome = if n == 0 {
                Outcome::Undecided
            } else {
                let accepted = if weighted { den > 0 && 2 * num > den } else { 2 * e > n };
                if accepted { Outcome::Accepted } else { Outcome::Rejected }
            };
            out.insert(pair.id.clone(), outcome);
        }
        out
    }

    fn script() -> impl Strategy<Value = (usize, bool, Vec<(usize, usize, u8, i64)>)> {
        (1usize..5, any::<bool>()).prop_flat_map(|(users, trust)| {
            (
                Just(users),
                Just(trust),
                prop::collection::vec((0..users, 0usize..6, 0u8..3, 0i64..3), 0..120),
            )
        })
    }

    fn decision(k: u8) -> Decision {
        match k {
            0 => Decision::Equivalent,
            1 => Decision::NotEquivalent,
            _ => Decision::NA,
        }
    }

    proptest! {
        #[test]
        fn snapshot_equals_replay((users, trust, script) in script(), cut in 0i64..400) {
            let mut t = task(3, 3, trust);
            let ids: Vec<PairId> = t.pairs().iter().map(|p| p.id.clone()).collect();
            let mut clock = 0;
            let mut log = Vec::new();
            for &(uu, pp, k, dt) in &script {
                clock += dt;
                t.record_decision(&UserId::new(format!("u{uu}")), &ids[pp], decision(k), Origin::Manual, at(clock)).unwrap();
                log.push((uu, pp, decision(k), clock));
            }
            let prefix: Vec<(usize, usize, Decision)> =
                log.iter().filter(|e| e.3 <= cut).map(|e| (e.0, e.1, e.2)).collect();
            let want = naive(&t, &prefix, users);
            let snap = t.decision_snapshot(Some(at(cut)));
            let got: BTreeMap<PairId, Outcome> = snap.pairs.iter().map(|(k, v)| (k.clone(), v.outcome)).collect();
            prop_assert_eq!(got, want);

            let mut again = task(3, 3, trust);
            again.restore(events_from_ndjson(&events_to_ndjson(t.events())).unwrap()).unwrap();
            prop_assert_eq!(
                serde_json::to_string(&again.decision_snapshot(Some(at(cut)))).unwrap(),
                serde_json::to_string(&snap).unwrap()
            );
            let seqs: Vec<u64> = t.events().iter().map(|e| e.seq).collect();
            prop_assert_eq!(seqs, (1..=script.len() as u64).collect::<Vec<_>>());
        }

        #[test]
        fn changeset_matches_scratch_diff((_users, trust, script) in script()) {
            let mut t = task(3, 3, trust);
            let ids: Vec<PairId> = t.pairs().iter().map(|p| p.id.clone()).collect();
            for (i, &(uu, pp, k, _)) in script.iter().enumerate() {
                let before = t.decision_snapshot(None);
                let e = t.record_decision(&UserId::new(format!("u{uu}")), &ids[pp], decision(k), Origin::Manual, at(i as i64)).unwrap();
                let after = t.decision_snapshot(None);
                let cs = t.recompute_after_revision(&e);
                let touched: BTreeSet<&PairId> = cs.recomputed_scores.iter().map(|s| &s.pair).collect();
                for (pid, new) in &after.pairs {
                    if before.pairs[pid] != *new {
                        prop_assert!(touched.contains(pid), "{} changed but was not recomputed", pid);
                    }
                }
                for s in &cs.recomputed_scores {
                    prop_assert_eq!(&s.old, &before.pairs[&s.pair]);
                    prop_assert_eq!(&s.new, &after.pairs[&s.pair]);
                }
            }
        }
    }
}
