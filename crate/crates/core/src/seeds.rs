//! Hidden seed pairs with known answers, used to measure annotators.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coherence::{
    build_network, coherence_check, Assertion, DatasetScope, NetworkError, PrefillSettings,
};
use crate::diff::MappingPartition;
use crate::lexical::{Difficulty, MissingLexicalForm, TrivialityClassifier};
use crate::ontology::{CellKey, EntityRef, Ontology};
use crate::task::{AnnotationPair, DisputeSide, PairId, PairKind, TaskSettings, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedProvenance {
    FromNonDisputed,
    OneToOnePermutation,
    CoherenceFailure,
}

/// What is known about a seed. Never shown to annotators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedLabel {
    pub polarity: Polarity,
    pub difficulty: Difficulty,
    pub gold: Verdict,
    pub provenance: SeedProvenance,
}

impl SeedLabel {
    fn positive(difficulty: Difficulty) -> Self {
        SeedLabel {
            polarity: Polarity::Positive,
            difficulty,
            gold: Verdict::Equivalent,
            provenance: SeedProvenance::FromNonDisputed,
        }
    }

    fn permutation() -> Self {
        SeedLabel {
            polarity: Polarity::Negative,
            difficulty: Difficulty::Trivial,
            gold: Verdict::NotEquivalent,
            provenance: SeedProvenance::OneToOnePermutation,
        }
    }

    fn incoherent() -> Self {
        SeedLabel {
            polarity: Polarity::Negative,
            difficulty: Difficulty::Nontrivial,
            gold: Verdict::NotEquivalent,
            provenance: SeedProvenance::CoherenceFailure,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPair {
    pub source: String,
    pub target: String,
    pub label: SeedLabel,
}

impl SeedPair {
    pub fn key(&self) -> CellKey {
        (self.source.clone(), self.target.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifficultyProfile {
    pub positive_count: usize,
    pub trivial_fraction: f64,
}

impl DifficultyProfile {
    pub fn trivial_count(&self) -> usize {
        (self.trivial_fraction * self.positive_count as f64).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedConfig {
    /// Upper bound on positive seeds; `None` uses every non-disputed cell.
    pub max_positive: Option<usize>,
    pub classifier: TrivialityClassifier,
}

impl Default for SeedConfig {
    fn default() -> Self {
        SeedConfig {
            max_positive: None,
            classifier: TrivialityClassifier::default(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeedError {
    #[error("no non-disputed mappings to draw positive seeds from")]
    EmptySeedSource,
    #[error(transparent)]
    MissingLexicalForm(#[from] MissingLexicalForm),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Requested versus achieved negatives per difficulty class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShortfallWarning {
    pub requested_trivial: usize,
    pub achieved_trivial: usize,
    pub requested_nontrivial: usize,
    pub achieved_nontrivial: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositiveSeeds {
    pub seeds: Vec<SeedPair>,
    pub profile: DifficultyProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NegativeSeeds {
    pub seeds: Vec<SeedPair>,
    pub shortfall: Option<ShortfallWarning>,
}

impl NegativeSeeds {
    /// Disputed cells used as seeds; they must leave the disputed set.
    pub fn consumed_disputes(&self) -> BTreeSet<CellKey> {
        self.seeds
            .iter()
            .filter(|s| s.label.provenance == SeedProvenance::CoherenceFailure)
            .map(SeedPair::key)
            .collect()
    }
}

fn stream(rng_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(stream);
    rng
}

fn resolve(ontology: &Ontology, iri: &str) -> EntityRef {
    ontology
        .entity(iri)
        .cloned()
        .unwrap_or_else(|| EntityRef::new(ontology.id.clone(), iri))
}

/// Positive seeds from the non-disputed cells, each classified by lexical
/// similarity. With a cap, a uniform sample of that size is taken.
pub fn generate_positive_seeds(
    partition: &MappingPartition,
    ontologies: (&Ontology, &Ontology),
    config: &SeedConfig,
    rng_seed: u64,
) -> Result<PositiveSeeds, SeedError> {
    if partition.non_disputed.is_empty() {
        return Err(SeedError::EmptySeedSource);
    }
    let mut cells: Vec<&CellKey> = partition.non_disputed.keys().collect();
    if let Some(cap) = config.max_positive {
        if cap < cells.len() {
            let mut rng = stream(rng_seed, 1);
            cells.shuffle(&mut rng);
            cells.truncate(cap);
            cells.sort();
        }
    }
    let mut seeds = Vec::with_capacity(cells.len());
    for (s, t) in cells {
        let e1 = resolve(ontologies.0, s);
        let e2 = resolve(ontologies.1, t);
        let difficulty = config.classifier.classify(&e1, &e2)?;
        seeds.push(SeedPair {
            source: s.clone(),
            target: t.clone(),
            label: SeedLabel::positive(difficulty),
        });
    }
    let trivial = seeds
        .iter()
        .filter(|s| s.label.difficulty == Difficulty::Trivial)
        .count();
    let profile = DifficultyProfile {
        positive_count: seeds.len(),
        trivial_fraction: if seeds.is_empty() {
            0.0
        } else {
            trivial as f64 / seeds.len() as f64
        },
    };
    Ok(PositiveSeeds { seeds, profile })
}

/// Lazily yields disputed cells that fail the coherence check against the
/// two ontologies plus the non-disputed cells, in shuffled order.
struct IncoherentDisputes {
    candidates: Vec<CellKey>,
    network: crate::coherence::OntologyNetwork,
}

impl IncoherentDisputes {
    fn next(&mut self) -> Option<CellKey> {
        let settings = PrefillSettings {
            one_to_one: false,
            cross_dataset: true,
        };
        while let Some((s, t)) = self.candidates.pop() {
            if !self.network.contains_entity(&s) || !self.network.contains_entity(&t) {
                continue;
            }
            if !coherence_check(&self.network, &s, &t, "seed", settings).passed() {
                return Some((s, t));
            }
        }
        None
    }
}

/// `(e3, e2)` permutations of non-disputed cells, drawn round-robin over
/// the cells in shuffled order with `e3` uniform over what is eligible.
struct Permutations<'a> {
    partition: &'a MappingPartition,
    cells: Vec<(String, Vec<String>)>,
    cursor: usize,
    emitted: BTreeSet<CellKey>,
}

impl Permutations<'_> {
    fn next(&mut self, rng: &mut ChaCha8Rng) -> Option<CellKey> {
        while !self.cells.is_empty() {
            self.cursor %= self.cells.len();
            let (target, pool) = &mut self.cells[self.cursor];
            let mut found = None;
            while !pool.is_empty() {
                let e3 = pool.swap_remove(rng.random_range(0..pool.len()));
                let key = (e3, target.clone());
                if !self.partition.contains_any(&key) && !self.emitted.contains(&key) {
                    found = Some(key);
                    break;
                }
            }
            match found {
                Some(key) => {
                    self.emitted.insert(key.clone());
                    self.cursor += 1;
                    return Some(key);
                }
                None => {
                    self.cells.swap_remove(self.cursor);
                }
            }
        }
        None
    }
}

/// Negative seeds matching `profile`: permutation pairs for the trivial
/// share, coherence failures among the disputed cells for the rest. A
/// class that runs short is filled from the other one and reported.
pub fn generate_negative_seeds(
    partition: &MappingPartition,
    ontologies: (&Ontology, &Ontology),
    profile: &DifficultyProfile,
    rng_seed: u64,
) -> Result<NegativeSeeds, SeedError> {
    let total = profile.positive_count;
    let want_trivial = profile.trivial_count().min(total);
    let want_nontrivial = total - want_trivial;
    if total == 0 {
        return Ok(NegativeSeeds {
            seeds: Vec::new(),
            shortfall: None,
        });
    }

    let mut rng = stream(rng_seed, 2);
    let (oa, ob) = ontologies;

    let mut disputed: Vec<CellKey> = partition
        .reference_only
        .keys()
        .chain(partition.matcher_only.keys())
        .cloned()
        .collect();
    disputed.shuffle(&mut rng);
    // popped from the back
    disputed.reverse();
    let network = build_network(
        [oa.clone(), ob.clone()],
        [DatasetScope::new("seed", &oa.id, &ob.id)],
        partition
            .non_disputed
            .keys()
            .filter(|(s, t)| oa.contains(s) && ob.contains(t))
            .map(|(s, t)| Assertion::equivalent(s, t, "seed")),
    )?;
    let mut incoherent = IncoherentDisputes {
        candidates: disputed,
        network,
    };

    let mut sources: Vec<String> = oa.entities().map(|e| e.iri.clone()).collect();
    sources.sort();
    let mut cells: Vec<(String, String)> = partition.non_disputed.keys().cloned().collect();
    cells.shuffle(&mut rng);
    let mut perms = Permutations {
        partition,
        cells: cells
            .into_iter()
            .map(|(e1, e2)| {
                let pool = sources.iter().filter(|e| **e != e1).cloned().collect();
                (e2, pool)
            })
            .collect(),
        cursor: 0,
        emitted: BTreeSet::new(),
    };

    let mut nontrivial = Vec::new();
    while nontrivial.len() < want_nontrivial {
        match incoherent.next() {
            Some(k) => nontrivial.push(k),
            None => break,
        }
    }
    let mut trivial = Vec::new();
    let trivial_goal = want_trivial + (want_nontrivial - nontrivial.len());
    while trivial.len() < trivial_goal {
        match perms.next(&mut rng) {
            Some(k) => trivial.push(k),
            None => break,
        }
    }
    let achieved_nontrivial = nontrivial.len();
    let achieved_trivial = trivial.len().min(want_trivial);
    while trivial.len() + nontrivial.len() < total {
        match incoherent.next() {
            Some(k) => nontrivial.push(k),
            None => break,
        }
    }

    let shortfall = (achieved_trivial < want_trivial || achieved_nontrivial < want_nontrivial)
        .then_some(ShortfallWarning {
            requested_trivial: want_trivial,
            achieved_trivial: trivial.len(),
            requested_nontrivial: want_nontrivial,
            achieved_nontrivial: nontrivial.len(),
        });

    let seeds = trivial
        .into_iter()
        .map(|(s, t)| SeedPair {
            source: s,
            target: t,
            label: SeedLabel::permutation(),
        })
        .chain(nontrivial.into_iter().map(|(s, t)| SeedPair {
            source: s,
            target: t,
            label: SeedLabel::incoherent(),
        }))
        .collect();
    Ok(NegativeSeeds { seeds, shortfall })
}

/// A disputed mapping waiting for annotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisputedPair {
    pub source: String,
    pub target: String,
    pub side: DisputeSide,
}

/// Disputed pairs of `partition`, minus cells consumed as seeds.
pub fn disputed_pairs(partition: &MappingPartition, consumed: &BTreeSet<CellKey>) -> Vec<DisputedPair> {
    let side = |m: &std::collections::BTreeMap<CellKey, _>, side| {
        m.keys()
            .filter(|k| !consumed.contains(*k))
            .map(move |(s, t)| DisputedPair {
                source: s.clone(),
                target: t.clone(),
                side,
            })
            .collect::<Vec<_>>()
    };
    let mut out = side(&partition.reference_only, DisputeSide::ReferenceOnly);
    out.extend(side(&partition.matcher_only, DisputeSide::MatcherOnly));
    out
}

/// Shuffles disputed pairs and seeds together. Ids are assigned after the
/// shuffle as `{id_prefix}-{position}`, so they carry no seed information.
pub fn blend_seeds(
    disputed: &[DisputedPair],
    seeds: &[SeedPair],
    id_prefix: &str,
    rng_seed: u64,
) -> Vec<AnnotationPair> {
    let mut items: Vec<(String, String, PairKind)> = disputed
        .iter()
        .map(|d| (d.source.clone(), d.target.clone(), PairKind::Disputed { side: d.side }))
        .chain(
            seeds
                .iter()
                .map(|s| (s.source.clone(), s.target.clone(), PairKind::Seed(s.label))),
        )
        .collect();
    let mut rng = stream(rng_seed, 3);
    items.shuffle(&mut rng);
    items
        .into_iter()
        .enumerate()
        .map(|(i, (source, target, kind))| AnnotationPair {
            id: PairId::new(format!("{id_prefix}-{}", i + 1)),
            source,
            target,
            kind,
        })
        .collect()
}

/// Annotation pairs for one task plus what happened to the trust mechanism.
#[derive(Debug, Clone, PartialEq)]
pub struct ForgedTask {
    pub pairs: Vec<AnnotationPair>,
    pub trust_enabled: bool,
    pub profile: Option<DifficultyProfile>,
    pub shortfall: Option<ShortfallWarning>,
    pub warnings: Vec<String>,
}

/// Seeds (when trust is on) blended with the disputed pairs. If no positive
/// seed can be drawn, trust is switched off and a warning is returned.
pub fn forge_task_pairs(
    partition: &MappingPartition,
    ontologies: (&Ontology, &Ontology),
    settings: TaskSettings,
    config: &SeedConfig,
    id_prefix: &str,
    rng_seed: u64,
) -> Result<ForgedTask, SeedError> {
    let mut warnings = Vec::new();
    let mut seeds = Vec::new();
    let mut profile = None;
    let mut shortfall = None;
    let mut consumed = BTreeSet::new();
    let mut trust_enabled = settings.trust_enabled;
    if trust_enabled {
        match generate_positive_seeds(partition, ontologies, config, rng_seed) {
            Ok(pos) => {
                let neg = generate_negative_seeds(partition, ontologies, &pos.profile, rng_seed)?;
                consumed = neg.consumed_disputes();
                if let Some(w) = neg.shortfall {
                    warnings.push(format!(
                        "negative seed shortfall: trivial {}/{}, nontrivial {}/{}",
                        w.achieved_trivial, w.requested_trivial, w.achieved_nontrivial, w.requested_nontrivial
                    ));
                }
                shortfall = neg.shortfall;
                profile = Some(pos.profile);
                seeds.extend(pos.seeds);
                seeds.extend(neg.seeds);
            }
            Err(SeedError::EmptySeedSource) => {
                trust_enabled = false;
                warnings.push("no non-disputed mappings; trust weighting disabled".to_string());
            }
            Err(e) => return Err(e),
        }
    }
    let disputed = disputed_pairs(partition, &consumed);
    Ok(ForgedTask {
        pairs: blend_seeds(&disputed, &seeds, id_prefix, rng_seed),
        trust_enabled,
        profile,
        shortfall,
        warnings,
    })
}
