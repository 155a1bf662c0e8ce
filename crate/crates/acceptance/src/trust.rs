//! Agreement scores over exact integers. Every τ here is `n/m` with
//! `m <= 12`, so all weights share the denominator 27720 = lcm(1..=12).

pub const DENOM: u64 = 27720;

/// `(n, m, equivalent)` per vote.
pub type RawVote = (u64, u64, bool);

fn scaled(n: u64, m: u64) -> u64 {
    assert!(m > 0 && DENOM % m == 0);
    n * (DENOM / m)
}

/// `(1/N) Σ τ·a`, rounded once.
pub fn raw_score(votes: &[RawVote]) -> f64 {
    let num: u64 = votes.iter().filter(|v| v.2).map(|&(n, m, _)| scaled(n, m)).sum();
    num as f64 / (DENOM * votes.len() as u64) as f64
}

/// `Σ τ·a / Σ τ` as integers over the shared denominator.
pub fn share_parts(votes: &[RawVote]) -> (u64, u64) {
    let den: u64 = votes.iter().map(|&(n, m, _)| scaled(n, m)).sum();
    let num: u64 = votes.iter().filter(|v| v.2).map(|&(n, m, _)| scaled(n, m)).sum();
    (num, den)
}

pub fn normalized_share(votes: &[RawVote]) -> f64 {
    match share_parts(votes) {
        (_, 0) => 0.0,
        (num, den) => num as f64 / den as f64,
    }
}

/// Acceptance at `θ = k / 20`, decided on integers.
pub fn accepted_at(votes: &[RawVote], k: u64) -> bool {
    let (num, den) = share_parts(votes);
    den > 0 && 20 * num > k * den
}
