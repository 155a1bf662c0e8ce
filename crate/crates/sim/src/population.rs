//! Simulated annotators.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{Range, Spread};
use crate::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnotatorModel {
    pub id: usize,
    /// Probability of answering any pair correctly.
    pub p: f64,
    pub expert: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationProfile {
    pub expert_ratio: f64,
    pub expert_range: Range,
    pub nonexpert_range: Range,
}

impl PopulationProfile {
    pub fn validate(&self) -> Result<(), SimError> {
        self.expert_range.validate()?;
        self.nonexpert_range.validate()?;
        if !(0.0..=1.0).contains(&self.expert_ratio) {
            return Err(SimError::InvalidProfile(format!("expert ratio {}", self.expert_ratio)));
        }
        if self.expert_range.lo < 0.5 || self.nonexpert_range.hi > 0.5 {
            return Err(SimError::InvalidProfile(
                "expert accuracy must lie above 0.5 and non-expert accuracy below".into(),
            ));
        }
        Ok(())
    }

    /// Experts draw from `(lo, hi]` and non-experts from `[lo, hi)`, so
    /// the two groups never meet at 0.5.
    pub fn accuracy(&self, expert: bool, u: f64) -> f64 {
        if expert {
            let r = self.expert_range;
            r.hi - u * (r.hi - r.lo)
        } else {
            let r = self.nonexpert_range;
            r.lo + u * (r.hi - r.lo)
        }
    }
}

pub fn expert_count(ratio: f64, n: usize) -> usize {
    (ratio * n as f64).round() as usize
}

/// The first `round(ratio * n)` annotators are experts. One uniform draw
/// per annotator, so sweeping the profile over fixed draws gives common
/// random numbers.
pub fn population_from_draws(profile: &PopulationProfile, draws: &[f64]) -> Vec<AnnotatorModel> {
    let experts = expert_count(profile.expert_ratio, draws.len());
    draws
        .iter()
        .enumerate()
        .map(|(id, &u)| {
            let expert = id < experts;
            AnnotatorModel {
                id,
                p: profile.accuracy(expert, u),
                expert,
            }
        })
        .collect()
}

pub fn simulate_population(
    profile: &PopulationProfile,
    count: usize,
    rng: &mut impl Rng,
) -> Result<Vec<AnnotatorModel>, SimError> {
    profile.validate()?;
    let draws: Vec<f64> = (0..count).map(|_| rng.random()).collect();
    Ok(population_from_draws(profile, &draws))
}

/// Fixed-accuracy groups for the correction sweep. Group membership sets
/// `expert`, even for a 0.5/0.5 spread.
pub fn spread_population(spread: Spread, expert_ratio: f64, count: usize) -> Vec<AnnotatorModel> {
    let experts = expert_count(expert_ratio, count);
    (0..count)
        .map(|id| {
            let expert = id < experts;
            AnnotatorModel {
                id,
                p: if expert { spread.expert } else { spread.nonexpert },
                expert,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn profile(ratio: f64, e: (f64, f64), n: (f64, f64)) -> PopulationProfile {
        PopulationProfile {
            expert_ratio: ratio,
            expert_range: Range::new(e.0, e.1),
            nonexpert_range: Range::new(n.0, n.1),
        }
    }

    #[test]
    fn counts_and_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let zero = simulate_population(&profile(0.0, (0.5, 1.0), (0.0, 0.5)), 100, &mut rng).unwrap();
        assert!(zero.iter().all(|a| !a.expert && a.p < 0.5));
        let half = simulate_population(&profile(0.5, (0.5, 1.0), (0.0, 0.5)), 100, &mut rng).unwrap();
        assert_eq!(half.iter().filter(|a| a.expert).count(), 50);
        assert!(half.iter().all(|a| a.expert == (a.p > 0.5)));
        let point = simulate_population(&profile(1.0, (0.9, 0.9), (0.0, 0.5)), 10, &mut rng).unwrap();
        assert!(point.iter().all(|a| a.p == 0.9));
    }

    #[test]
    fn overlapping_ranges_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(simulate_population(&profile(0.5, (0.4, 1.0), (0.0, 0.5)), 10, &mut rng).is_err());
        assert!(simulate_population(&profile(1.5, (0.5, 1.0), (0.0, 0.5)), 10, &mut rng).is_err());
    }
}
