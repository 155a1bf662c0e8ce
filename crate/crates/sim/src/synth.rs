//! Synthetic domains: every ontology is a sample of one concept tree, so
//! identity correspondences form a coherent reference by construction.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crowdval_core::{Alignment, Dataset, DomainGroup, EntityRef, Ontology};

use crate::config::DomainSpec;
use crate::SimError;

const SYLLABLES: [&str; 16] = [
    "ka", "lo", "mi", "ren", "tor", "sa", "vi", "nel", "do", "pra", "chi", "mu", "bes", "ga", "fen", "ul",
];
const QUALIFIERS: [&str; 6] = ["entity", "record", "item", "object", "unit", "element"];

#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub dataset: Dataset,
    pub matcher: Alignment,
    /// Involves the domain's anchor ontology.
    pub anchor: bool,
}

#[derive(Debug, Clone)]
pub struct SynthDomain {
    pub group: DomainGroup,
    pub ontologies: Vec<Ontology>,
    pub datasets: Vec<SynthDataset>,
}

/// The shared concept tree: a complete `branching`-ary tree over
/// `0..concepts` (branching 1 gives a chain).
struct Tree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl Tree {
    fn new(concepts: usize, branching: usize) -> Tree {
        let parent: Vec<Option<usize>> = (0..concepts)
            .map(|k| (k > 0).then(|| (k - 1) / branching))
            .collect();
        let mut children = vec![Vec::new(); concepts];
        for (k, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(k);
            }
        }
        Tree { parent, children }
    }

    fn siblings(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.parent[k]
            .into_iter()
            .flat_map(move |p| self.children[p].iter().copied().filter(move |&s| s != k))
    }

    fn neighbours(&self, k: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.parent[k].into_iter().collect();
        out.extend(&self.children[k]);
        out.extend(self.siblings(k));
        out
    }

    /// Closest proper ancestor of `k` inside `present`.
    fn nearest_ancestor(&self, k: usize, present: &BTreeSet<usize>) -> Option<usize> {
        let mut cur = self.parent[k];
        while let Some(c) = cur {
            if present.contains(&c) {
                return Some(c);
            }
            cur = self.parent[c];
        }
        None
    }
}

fn iri(domain: &str, o: usize, k: usize) -> String {
    format!("http://{domain}.example/o{o}#C{k}")
}

fn words(n: usize, rng: &mut impl Rng) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let w: String = (0..3).map(|_| SYLLABLES[rng.random_range(0..SYLLABLES.len())]).collect();
        if seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

fn check(spec: &DomainSpec) -> Result<(), SimError> {
    let d = &spec.dataset;
    let bad = |m: String| Err(SimError::InfeasibleSpec(m));
    if spec.ontologies < 2 || spec.anchor >= spec.ontologies {
        return bad(format!("{} ontologies with anchor {}", spec.ontologies, spec.anchor));
    }
    if d.branching == 0 || d.entities == 0 || d.entities > spec.concepts {
        return bad(format!("{} entities from {} concepts", d.entities, spec.concepts));
    }
    // two samples of `entities` concepts always share at least this many
    let guaranteed = (2 * d.entities).saturating_sub(spec.concepts);
    if d.agreed + d.tp > guaranteed {
        return bad(format!(
            "{} reference cells but only {guaranteed} shared entities are guaranteed",
            d.agreed + d.tp
        ));
    }
    if d.fp > d.entities * d.entities - (d.agreed + d.tp) {
        return bad(format!("{} false positives do not fit", d.fp));
    }
    if !(0.0..=1.0).contains(&d.disjoint_density) || !(0.0..=1.0).contains(&d.label_variation) {
        return bad("densities must lie in [0, 1]".into());
    }
    Ok(())
}

/// Generates a domain deterministically from `rng`.
pub fn synth_domain(spec: &DomainSpec, rng: &mut impl Rng) -> Result<SynthDomain, SimError> {
    check(spec)?;
    let d = &spec.dataset;
    let name = spec.name.as_str();
    let tree = Tree::new(spec.concepts, d.branching);
    let base = words(spec.concepts, rng);
    let difficulty: Vec<f64> = (0..spec.concepts).map(|_| rng.random()).collect();

    let mut disjoint = Vec::new();
    for k in 0..spec.concepts {
        for s in tree.siblings(k).filter(|&s| s > k) {
            if rng.random::<f64>() < d.disjoint_density {
                disjoint.push((k, s));
            }
        }
    }

    let mut members: Vec<BTreeSet<usize>> = Vec::new();
    let mut ontologies = Vec::new();
    for o in 0..spec.ontologies {
        let mut all: Vec<usize> = (0..spec.concepts).collect();
        all.shuffle(rng);
        let present: BTreeSet<usize> = all.into_iter().take(d.entities).collect();
        let mut onto = Ontology::new(format!("{name}-o{o}"));
        for &k in &present {
            let label = if rng.random::<f64>() < d.label_variation {
                format!("{} {}", base[k], QUALIFIERS[rng.random_range(0..QUALIFIERS.len())])
            } else {
                base[k].clone()
            };
            onto.add_entity(EntityRef::new(onto.id.clone(), iri(name, o, k)).with_labels([label]));
        }
        for &k in &present {
            if let Some(p) = tree.nearest_ancestor(k, &present) {
                onto.add_subclass(&iri(name, o, k), &iri(name, o, p));
            }
        }
        for &(x, y) in &disjoint {
            if present.contains(&x) && present.contains(&y) {
                onto.add_disjoint(&iri(name, o, x), &iri(name, o, y));
            }
        }
        members.push(present);
        ontologies.push(onto);
    }

    let mut group = DomainGroup::new(name, name);
    let mut datasets = Vec::new();
    for i in 0..spec.ontologies {
        for j in i + 1..spec.ontologies {
            let shared: Vec<usize> = members[i].intersection(&members[j]).copied().collect();
            let mut chosen = shared;
            chosen.shuffle(rng);
            chosen.truncate(d.agreed + d.tp);
            // the matcher misses its hardest concepts
            chosen.sort_by(|a, b| difficulty[*b].total_cmp(&difficulty[*a]).then(a.cmp(b)));
            let (missed, found) = chosen.split_at(d.tp);

            let (oa, ob) = (&ontologies[i], &ontologies[j]);
            let mut reference = Alignment::new(oa.id.clone(), ob.id.clone());
            let mut matcher = Alignment::new(oa.id.clone(), ob.id.clone());
            for &k in missed.iter().chain(found) {
                reference = reference.with_cell(&iri(name, i, k), &iri(name, j, k), 1.0);
            }
            for &k in found {
                matcher = matcher.with_cell(&iri(name, i, k), &iri(name, j, k), 1.0);
            }

            // near misses around reference concepts, missed ones first
            let mut near: Vec<(usize, usize)> = Vec::new();
            for group_of in [missed, found] {
                let mut local = Vec::new();
                for &k in group_of {
                    for n in tree.neighbours(k) {
                        if members[j].contains(&n) {
                            local.push((k, n));
                        }
                        if members[i].contains(&n) {
                            local.push((n, k));
                        }
                    }
                }
                local.shuffle(rng);
                near.extend(local);
            }
            let mut added = 0;
            for (x, y) in near {
                if added == d.fp {
                    break;
                }
                let (s, t) = (iri(name, i, x), iri(name, j, y));
                if x != y && !matcher.contains(&s, &t) {
                    matcher = matcher.with_cell(&s, &t, 0.8);
                    added += 1;
                }
            }
            let a: Vec<usize> = members[i].iter().copied().collect();
            let b: Vec<usize> = members[j].iter().copied().collect();
            while added < d.fp {
                let (x, y) = (a[rng.random_range(0..a.len())], b[rng.random_range(0..b.len())]);
                let (s, t) = (iri(name, i, x), iri(name, j, y));
                if x != y && !matcher.contains(&s, &t) {
                    matcher = matcher.with_cell(&s, &t, 0.5);
                    added += 1;
                }
            }

            let id = format!("{name}-o{i}-o{j}");
            group.add_dataset(&id);
            let dataset = Dataset::new(&id, name, oa.clone(), ob.clone(), reference)?;
            datasets.push(SynthDataset {
                dataset,
                matcher,
                anchor: i == spec.anchor || j == spec.anchor,
            });
        }
    }
    Ok(SynthDomain {
        group,
        ontologies,
        datasets,
    })
}
