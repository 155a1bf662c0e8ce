//! Annotator trustworthiness and trust-weighted vote aggregation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::Threshold;
use crate::task::{AnnotationPair, Decision, PairId, TaskId, UserId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrustError {
    #[error("task has no seed pairs; trust weighting is unavailable")]
    TrustUnavailable,
    #[error("pair {0} has no votes")]
    NoVotes(PairId),
    #[error("vote from an incomplete or NA decision on pair {0}")]
    InvalidVote(PairId),
}

/// `n / m` kept as integers so that equal trust values compare exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tau {
    pub n: u64,
    pub m: u64,
}

impl Tau {
    /// Weight used when the trust mechanism is off.
    pub const UNIT: Tau = Tau { n: 1, m: 1 };

    pub fn new(n: u64, m: u64) -> Self {
        assert!(m > 0 && n <= m, "tau needs 0 <= n <= m, m > 0");
        Tau { n, m }
    }

    pub fn value(self) -> f64 {
        self.n as f64 / self.m as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrustProfile {
    pub user_id: UserId,
    pub task_id: TaskId,
    pub m: u64,
    pub n: u64,
    pub complete: bool,
    /// Present only once the user has answered every pair.
    pub tau: Option<f64>,
}

impl TrustProfile {
    pub fn weight(&self) -> Option<Tau> {
        self.complete.then(|| Tau::new(self.n, self.m))
    }
}

/// Scores a user's seed answers. `decisions` holds current decisions; a
/// missing entry means `NA`.
pub fn trustworthiness(
    user: &UserId,
    task: &TaskId,
    pairs: &[AnnotationPair],
    decisions: &BTreeMap<PairId, Decision>,
) -> Result<TrustProfile, TrustError> {
    let current = |p: &AnnotationPair| decisions.get(&p.id).copied().unwrap_or_default();
    let mut m = 0;
    let mut n = 0;
    for p in pairs {
        if let Some(label) = p.seed() {
            m += 1;
            if current(p).verdict() == Some(label.gold) {
                n += 1;
            }
        }
    }
    if m == 0 {
        return Err(TrustError::TrustUnavailable);
    }
    let complete = pairs.iter().all(|p| !current(p).is_na());
    Ok(TrustProfile {
        user_id: user.clone(),
        task_id: task.clone(),
        m,
        n,
        complete,
        tau: complete.then(|| n as f64 / m as f64),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vote {
    pub weight: Tau,
    pub decision: Decision,
}

impl Vote {
    pub fn new(weight: Tau, decision: Decision) -> Self {
        Vote { weight, decision }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementScore {
    pub pair_id: PairId,
    /// Number of contributing users, `N`.
    pub voters: usize,
    pub equivalent_votes: usize,
    /// `S = (1/N) Σ τ·a`.
    pub raw_score: f64,
    /// `W = Σ τ·a / Σ τ`, or 0 when `Σ τ = 0`.
    pub normalized_share: f64,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `Σ τ·a / Σ τ` as a reduced fraction over a common denominator, or
/// `None` if the denominators do not fit.
fn exact_share(votes: &[Vote]) -> Option<(u128, u128)> {
    let mut lcm: u128 = 1;
    for v in votes {
        let m = v.weight.m as u128;
        lcm = lcm.checked_mul(m / gcd(lcm, m))?;
    }
    let (mut num, mut den) = (0u128, 0u128);
    for v in votes {
        let w = (v.weight.n as u128).checked_mul(lcm / v.weight.m as u128)?;
        den = den.checked_add(w)?;
        if v.decision == Decision::Equivalent {
            num = num.checked_add(w)?;
        }
    }
    let g = gcd(num, den).max(1);
    Some((num / g, den / g))
}

/// Trust-weighted agreement for one pair.
pub fn agreement_score(pair_id: &PairId, votes: &[Vote]) -> Result<AgreementScore, TrustError> {
    if votes.is_empty() {
        return Err(TrustError::NoVotes(pair_id.clone()));
    }
    if votes.iter().any(|v| v.decision.is_na()) {
        return Err(TrustError::InvalidVote(pair_id.clone()));
    }
    let voters = votes.len();
    let eq: Vec<&Vote> = votes
        .iter()
        .filter(|v| v.decision == Decision::Equivalent)
        .collect();
    let weighted_eq: f64 = eq.iter().map(|v| v.weight.value()).sum();
    let raw_score = weighted_eq / voters as f64;
    let normalized_share = match exact_share(votes) {
        Some((_, 0)) => 0.0,
        Some((num, den)) => num as f64 / den as f64,
        None => {
            let total: f64 = votes.iter().map(|v| v.weight.value()).sum();
            if total == 0.0 {
                0.0
            } else {
                weighted_eq / total
            }
        }
    };
    Ok(AgreementScore {
        pair_id: pair_id.clone(),
        voters,
        equivalent_votes: eq.len(),
        raw_score,
        normalized_share,
    })
}

/// Strictly greater than the threshold; ties are rejected.
pub fn accept(score: &AgreementScore, theta: Threshold, weighted: bool) -> bool {
    let share = if weighted {
        score.normalized_share
    } else {
        score.equivalent_votes as f64 / score.voters as f64
    };
    share > theta.value()
}

/// Plain majority with threshold, ignoring trust.
pub fn unweighted_majority(pair_id: &PairId, votes: &[Decision], theta: Threshold) -> Result<bool, TrustError> {
    let votes: Vec<Vote> = votes.iter().map(|&d| Vote::new(Tau::UNIT, d)).collect();
    let score = agreement_score(pair_id, &votes)?;
    Ok(accept(&score, theta, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexical::Difficulty;
    use crate::seeds::{Polarity, SeedLabel, SeedProvenance};
    use crate::task::{PairKind, Verdict};
    use proptest::prelude::*;

    fn pid() -> PairId {
        PairId::new("q")
    }

    fn th(v: f64) -> Threshold {
        Threshold::new(v).unwrap()
    }

    fn seeded_task(golds: &[Verdict], extra_disputed: usize) -> Vec<AnnotationPair> {
        let mut pairs: Vec<AnnotationPair> = golds
            .iter()
            .enumerate()
            .map(|(i, &gold)| AnnotationPair {
                id: PairId::new(format!("s{i}")),
                source: format!("a#{i}"),
                target: format!("b#{i}"),
                kind: PairKind::Seed(SeedLabel {
                    polarity: if gold == Verdict::Equivalent { Polarity::Positive } else { Polarity::Negative },
                    difficulty: Difficulty::Trivial,
                    gold,
                    provenance: if gold == Verdict::Equivalent {
                        SeedProvenance::FromNonDisputed
                    } else {
                        SeedProvenance::OneToOnePermutation
                    },
                }),
            })
            .collect();
        for i in 0..extra_disputed {
            pairs.push(AnnotationPair {
                id: PairId::new(format!("d{i}")),
                source: format!("a#d{i}"),
                target: format!("b#d{i}"),
                kind: PairKind::Disputed { side: crate::task::DisputeSide::ReferenceOnly },
            });
        }
        pairs
    }

    #[test]
    fn seven_of_ten() {
        let golds = [Verdict::Equivalent; 10];
        let pairs = seeded_task(&golds, 1);
        let mut d: BTreeMap<PairId, Decision> = BTreeMap::new();
        for (i, p) in pairs.iter().enumerate() {
            let v = if i < 7 || !p.is_seed() { Decision::Equivalent } else { Decision::NotEquivalent };
            d.insert(p.id.clone(), v);
        }
        let t = trustworthiness(&"u".into(), &"t".into(), &pairs, &d).unwrap();
        assert_eq!((t.n, t.m), (7, 10));
        assert_eq!(t.tau, Some(0.7));
    }

    #[test]
    fn incomplete_has_no_tau() {
        let pairs = seeded_task(&[Verdict::Equivalent; 4], 1);
        let d: BTreeMap<PairId, Decision> =
            pairs.iter().filter(|p| p.is_seed()).map(|p| (p.id.clone(), Decision::Equivalent)).collect();
        let t = trustworthiness(&"u".into(), &"t".into(), &pairs, &d).unwrap();
        assert!(!t.complete);
        assert_eq!(t.tau, None);
        assert_eq!(t.n, 4);
        assert!(t.weight().is_none());
    }

    #[test]
    fn no_seeds_is_unavailable() {
        let pairs = seeded_task(&[], 2);
        assert_eq!(
            trustworthiness(&"u".into(), &"t".into(), &pairs, &BTreeMap::new()),
            Err(TrustError::TrustUnavailable)
        );
    }

    #[test]
    fn three_voter_example() {
        let votes = [
            Vote::new(Tau::new(1, 1), Decision::Equivalent),
            Vote::new(Tau::new(1, 2), Decision::Equivalent),
            Vote::new(Tau::new(1, 2), Decision::NotEquivalent),
        ];
        let s = agreement_score(&pid(), &votes).unwrap();
        assert!((s.raw_score - 0.5).abs() < 1e-15);
        assert!((s.normalized_share - 0.75).abs() < 1e-15);
        assert!(!accept(&s, th(0.8), true));
        assert!(accept(&s, th(0.5), true));
    }

    #[test]
    fn zero_total_trust() {
        let votes = [Vote::new(Tau::new(0, 4), Decision::Equivalent)];
        let s = agreement_score(&pid(), &votes).unwrap();
        assert_eq!((s.raw_score, s.normalized_share), (0.0, 0.0));
    }

    #[test]
    fn unweighted_examples() {
        use Decision::{Equivalent as E, NotEquivalent as N};
        assert!(unweighted_majority(&pid(), &[E, E, E, N, N], th(0.5)).unwrap());
        assert!(!unweighted_majority(&pid(), &[E, E, N, N], th(0.5)).unwrap());
        assert!(unweighted_majority(&pid(), &[E], th(0.5)).unwrap());
        let mut v = vec![E; 50];
        v.extend([N; 50]);
        assert!(!unweighted_majority(&pid(), &v, th(0.5)).unwrap());
        let mut v = vec![E; 51];
        v.extend([N; 49]);
        assert!(unweighted_majority(&pid(), &v, th(0.5)).unwrap());
        assert_eq!(unweighted_majority(&pid(), &[], th(0.5)), Err(TrustError::NoVotes(pid())));
        assert_eq!(unweighted_majority(&pid(), &[Decision::NA], th(0.5)), Err(TrustError::InvalidVote(pid())));
    }

    fn votes() -> impl Strategy<Value = Vec<Vote>> {
        prop::collection::vec(
            (1u64..20).prop_flat_map(|m| (0..=m, Just(m), any::<bool>())).prop_map(|(n, m, e)| {
                Vote::new(Tau::new(n, m), if e { Decision::Equivalent } else { Decision::NotEquivalent })
            }),
            1..50,
        )
    }

    proptest! {
        #[test]
        fn scaling_tau_keeps_share(v in votes(), k in 1u64..6) {
            // multiplying every tau by c = 1/k: n/(m·k)
            let scaled: Vec<Vote> = v.iter().map(|x| Vote::new(Tau::new(x.weight.n, x.weight.m * k), x.decision)).collect();
            let a = agreement_score(&pid(), &v).unwrap();
            let b = agreement_score(&pid(), &scaled).unwrap();
            prop_assert_eq!(a.normalized_share, b.normalized_share);
            prop_assert!((a.raw_score / k as f64 - b.raw_score).abs() < 1e-12);
            for t in [0.5, 0.6, 0.75, 0.9, 1.0] {
                prop_assert_eq!(accept(&a, th(t), true), accept(&b, th(t), true));
            }
        }

        #[test]
        fn equal_tau_matches_majority(decisions in prop::collection::vec(any::<bool>(), 1..60), n in 1u64..10, extra in 0u64..10, t in 0.5f64..=1.0) {
            let tau = Tau::new(n, n + extra);
            let v: Vec<Vote> = decisions.iter().map(|&e| Vote::new(tau, if e { Decision::Equivalent } else { Decision::NotEquivalent })).collect();
            let s = agreement_score(&pid(), &v).unwrap();
            prop_assert_eq!(accept(&s, th(t), true), accept(&s, th(t), false));
        }

        #[test]
        fn flipping_to_equivalent_is_monotone(v in votes(), i in any::<prop::sample::Index>()) {
            let i = i.index(v.len());
            prop_assume!(v[i].decision == Decision::NotEquivalent);
            let mut w = v.clone();
            w[i].decision = Decision::Equivalent;
            let a = agreement_score(&pid(), &v).unwrap();
            let b = agreement_score(&pid(), &w).unwrap();
            prop_assert!(b.raw_score >= a.raw_score);
            prop_assert!(b.normalized_share >= a.normalized_share);
        }

        #[test]
        fn bounds(v in votes()) {
            let s = agreement_score(&pid(), &v).unwrap();
            let total: f64 = v.iter().map(|x| x.weight.value()).sum();
            prop_assert!(s.raw_score >= 0.0 && s.raw_score <= total / v.len() as f64 + 1e-12);
            prop_assert!((0.0..=1.0).contains(&s.normalized_share));
        }

        #[test]
        fn tau_ignores_answer_order(answers in prop::collection::vec(any::<bool>(), 1..12), seed in any::<u64>()) {
            let golds: Vec<Verdict> = answers.iter().map(|_| Verdict::Equivalent).collect();
            let pairs = seeded_task(&golds, 0);
            let decide = |order: &[bool]| -> BTreeMap<PairId, Decision> {
                pairs.iter().zip(order).map(|(p, &ok)| (p.id.clone(), if ok { Decision::Equivalent } else { Decision::NotEquivalent })).collect()
            };
            let mut shuffled = answers.clone();
            use rand::{seq::SliceRandom, SeedableRng};
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let a = trustworthiness(&"u".into(), &"t".into(), &pairs, &decide(&answers)).unwrap();
            let b = trustworthiness(&"u".into(), &"t".into(), &pairs, &decide(&shuffled)).unwrap();
            prop_assert_eq!(a.tau, b.tau);
        }
    }
}
