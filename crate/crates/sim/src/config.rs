//! Simulation settings. Every field has a default so a config file only
//! needs the values it changes.

use serde::{Deserialize, Serialize};

use crate::SimError;

fn grid(steps: u32, lo: f64, hi: f64) -> Vec<f64> {
    (0..=steps)
        .map(|i| lo + (hi - lo) * f64::from(i) / f64::from(steps))
        .collect()
}

/// Closed probability range for sampling annotator accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Range { lo, hi }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(0.0..=1.0).contains(&self.lo) || !(0.0..=1.0).contains(&self.hi) || self.lo > self.hi {
            return Err(SimError::InvalidProfile(format!("range [{}, {}]", self.lo, self.hi)));
        }
        Ok(())
    }
}

/// Shape of one synthetic dataset (two ontologies).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetSpec {
    /// Entities per ontology.
    pub entities: usize,
    /// Cells in both R and A.
    pub agreed: usize,
    /// Cells only in R.
    pub tp: usize,
    /// Cells only in A.
    pub fp: usize,
    pub branching: usize,
    pub disjoint_density: f64,
    /// Chance that an entity's label is reworded in one ontology.
    pub label_variation: f64,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        DatasetSpec {
            entities: 60,
            agreed: 20,
            tp: 10,
            fp: 10,
            branching: 3,
            disjoint_density: 0.3,
            label_variation: 0.3,
        }
    }
}

/// A synthetic domain: `ontologies` copies drawn from one concept tree,
/// with a dataset for every pair of ontologies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DomainSpec {
    pub name: String,
    pub ontologies: usize,
    /// Index of the anchor ontology.
    pub anchor: usize,
    /// Size of the shared concept tree.
    pub concepts: usize,
    pub dataset: DatasetSpec,
}

impl Default for DomainSpec {
    fn default() -> Self {
        DomainSpec {
            name: "domain".into(),
            ontologies: 2,
            anchor: 0,
            concepts: 60,
            dataset: DatasetSpec::default(),
        }
    }
}

impl DomainSpec {
    /// Three domains with different hierarchy and disjointness profiles.
    pub fn prefill_defaults() -> Vec<DomainSpec> {
        let base = |name: &str, branching: usize, disjoint_density: f64| DomainSpec {
            name: name.into(),
            ontologies: 4,
            anchor: 0,
            concepts: 40,
            dataset: DatasetSpec {
                entities: 32,
                agreed: 10,
                tp: 8,
                fp: 8,
                branching,
                disjoint_density,
                label_variation: 0.3,
            },
        };
        vec![
            base("deep", 2, 0.0),
            base("balanced", 3, 0.5),
            base("flat", 8, 0.8),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    NonSeed,
    Seed,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::NonSeed => "non-seed",
            Target::Seed => "seed",
        }
    }
}

/// Fixed accuracies for non-experts and experts, e.g. 0.1/0.9.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub nonexpert: f64,
    pub expert: f64,
}

impl Spread {
    pub fn label(&self) -> String {
        format!("{:.1}/{:.1}", self.nonexpert, self.expert)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub rng_seed: u64,
    pub annotator_count: usize,
    pub threshold: f64,
    pub replicates: usize,
    pub dataset: DatasetSpec,
    pub expert_range: Range,
    pub nonexpert_range: Range,
    pub expert_ratios: Vec<f64>,
    pub knowledge_lower_bounds: Vec<f64>,
    pub knowledge_expert_ratio: f64,
    pub coverages: Vec<f64>,
    pub prefill_domains: Vec<DomainSpec>,
    /// Whether the one-to-one rule runs in the pre-fill sweep.
    pub prefill_one_to_one: bool,
    pub spreads: Vec<Spread>,
    pub correction_fractions: Vec<f64>,
    pub correction_expert_ratio: f64,
    pub target: Target,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            rng_seed: 42,
            annotator_count: 100,
            threshold: 0.5,
            replicates: 20,
            dataset: DatasetSpec::default(),
            expert_range: Range::new(0.5, 1.0),
            nonexpert_range: Range::new(0.0, 0.5),
            expert_ratios: grid(10, 0.0, 1.0),
            knowledge_lower_bounds: grid(10, 0.5, 1.0),
            knowledge_expert_ratio: 0.5,
            coverages: grid(10, 0.0, 1.0),
            prefill_domains: DomainSpec::prefill_defaults(),
            prefill_one_to_one: false,
            spreads: [(0.5, 0.5), (0.4, 0.6), (0.3, 0.7), (0.2, 0.8), (0.1, 0.9)]
                .into_iter()
                .map(|(nonexpert, expert)| Spread { nonexpert, expert })
                .collect(),
            correction_fractions: grid(10, 0.0, 1.0),
            correction_expert_ratio: 0.5,
            target: Target::NonSeed,
        }
    }
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<SimConfig, SimError> {
        let cfg: SimConfig = serde_json::from_str(text).map_err(|e| SimError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.annotator_count == 0 || self.replicates == 0 {
            return Err(SimError::Config("annotator_count and replicates must be positive".into()));
        }
        crowdval_core::Threshold::new(self.threshold).map_err(|e| SimError::Config(e.to_string()))?;
        self.expert_range.validate()?;
        self.nonexpert_range.validate()?;
        let unit = |name: &str, xs: &[f64]| {
            if xs.iter().all(|x| (0.0..=1.0).contains(x)) {
                Ok(())
            } else {
                Err(SimError::Config(format!("{name} must lie in [0, 1]")))
            }
        };
        unit("expert_ratios", &self.expert_ratios)?;
        unit("knowledge_lower_bounds", &self.knowledge_lower_bounds)?;
        unit("coverages", &self.coverages)?;
        unit("correction_fractions", &self.correction_fractions)?;
        unit("knowledge_expert_ratio", &[self.knowledge_expert_ratio])?;
        unit("correction_expert_ratio", &[self.correction_expert_ratio])?;
        for s in &self.spreads {
            unit("spreads", &[s.nonexpert, s.expert])?;
        }
        Ok(())
    }

    /// Seed of replicate `r`; replicates use independent streams.
    pub fn replicate_seed(&self, r: usize) -> u64 {
        self.rng_seed.wrapping_add(r as u64)
    }
}
