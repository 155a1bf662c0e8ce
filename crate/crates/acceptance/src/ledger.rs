//! Task results recomputed from a plain list of timestamped votes.

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};

/// One recorded answer. `value` is `None` for a cleared answer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub at: DateTime<Utc>,
    pub user: usize,
    pub pair: usize,
    pub value: Option<bool>,
}

/// The fixed part of a task. Seeds carry their gold value.
#[derive(Debug, Clone)]
pub struct TaskShape {
    pub gold: Vec<Option<bool>>,
    pub trust: bool,
    /// Threshold as `k / 20`.
    pub k: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expected {
    /// `(n, m, complete)` per user with any event.
    pub trust: BTreeMap<usize, (u64, u64, bool)>,
    /// Per non-seed pair: `None` when nobody counts, else
    /// `(accepted, voters, equivalent_votes, raw_score, share)`.
    pub pairs: BTreeMap<usize, Option<(bool, usize, usize, f64, f64)>>,
    pub weighted: bool,
}

pub fn expected(shape: &TaskShape, events: &[Event], as_of: Option<DateTime<Utc>>) -> Expected {
    let mut latest: BTreeMap<usize, BTreeMap<usize, Option<bool>>> = BTreeMap::new();
    for e in events.iter().filter(|e| as_of.is_none_or(|t| e.at <= t)) {
        latest.entry(e.user).or_default().insert(e.pair, e.value);
    }
    let seeds: Vec<usize> = (0..shape.gold.len()).filter(|&i| shape.gold[i].is_some()).collect();
    let m = seeds.len() as u64;
    let weighted = shape.trust && m > 0;

    let mut trust = BTreeMap::new();
    let mut voters: Vec<(u64, &BTreeMap<usize, Option<bool>>)> = Vec::new();
    for (&u, answers) in &latest {
        let answer = |p: usize| answers.get(&p).copied().flatten();
        let n = seeds.iter().filter(|&&s| answer(s) == shape.gold[s]).count() as u64;
        let complete = (0..shape.gold.len()).all(|p| answer(p).is_some());
        if m > 0 {
            trust.insert(u, (n, m, complete));
        }
        if complete {
            voters.push((if weighted { n } else { 1 }, answers));
        }
    }
    let denom = if weighted { m } else { 1 };

    let mut pairs = BTreeMap::new();
    for p in (0..shape.gold.len()).filter(|&p| shape.gold[p].is_none()) {
        if voters.is_empty() {
            pairs.insert(p, None);
            continue;
        }
        let (mut num, mut den, mut eq) = (0u64, 0u64, 0usize);
        for (w, answers) in &voters {
            den += w;
            if answers[&p] == Some(true) {
                num += w;
                eq += 1;
            }
        }
        let n = voters.len();
        let raw = num as f64 / (denom * n as u64) as f64;
        let share = if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let accepted = if weighted {
            den > 0 && 20 * num > shape.k * den
        } else {
            20 * eq as u64 > shape.k * n as u64
        };
        pairs.insert(p, Some((accepted, n, eq, raw, share)));
    }
    Expected { trust, pairs, weighted }
}
