use super::*;
use proptest::prelude::*;

fn onto(id: &str, classes: &[&str], sub: &[(&str, &str)], disj: &[(&str, &str)]) -> Ontology {
    let mut o = Ontology::new(id);
    for c in classes {
        o.add_class(&format!("{id}#{c}"), &[] as &[&str]);
    }
    for (c, p) in sub {
        o.add_subclass(&format!("{id}#{c}"), &format!("{id}#{p}"));
    }
    for (x, y) in disj {
        o.add_disjoint(&format!("{id}#{x}"), &format!("{id}#{y}"));
    }
    o
}

fn conference() -> (Ontology, Ontology, Ontology) {
    let a = onto(
        "a",
        &["Paper", "Review", "Person", "Author"],
        &[("Author", "Person")],
        &[("Paper", "Review")],
    );
    let b = onto("b", &["Article", "Referee", "Human", "Writer"], &[("Writer", "Human")], &[]);
    let c = onto("c", &["Contribution", "Critique"], &[], &[]);
    (a, b, c)
}

fn scopes() -> Vec<DatasetScope> {
    vec![
        DatasetScope::new("ab", "a", "b"),
        DatasetScope::new("bc", "b", "c"),
        DatasetScope::new("ac", "a", "c"),
    ]
}

#[test]
fn transitive_across_datasets() {
    let (a, b, c) = conference();
    let net = build_network(
        [a, b, c],
        scopes(),
        [
            Assertion::equivalent("a#Paper", "b#Article", "ab"),
            Assertion::equivalent("b#Article", "c#Contribution", "bc"),
        ],
    )
    .unwrap();
    let pending = [PendingPair::new("p1", "a#Paper", "c#Contribution", "ac")];
    let inf = infer_prefills(&net, &pending, PrefillSettings::default());
    assert!(inf.conflicts.is_empty());
    let p = &inf.prefills[0];
    assert_eq!(p.value, Verdict::Equivalent);
    assert_eq!(p.rule, Rule::TransitiveEquivalence);
    assert_eq!(
        p.explanation,
        "Equivalent inferred by TransitiveEquivalence: a:Paper ≡ b:Article [ab]; b:Article ≡ c:Contribution [bc]"
    );

    let local = PrefillSettings {
        cross_dataset: false,
        ..Default::default()
    };
    assert!(infer_prefills(&net, &pending, local).prefills.is_empty());
}

#[test]
fn subsumption_and_disjointness() {
    let (a, b, c) = conference();
    let net = build_network(
        [a, b, c],
        scopes(),
        [
            Assertion::equivalent("a#Person", "b#Human", "ab"),
            Assertion::equivalent("a#Paper", "b#Article", "ab"),
        ],
    )
    .unwrap();
    let settings = PrefillSettings {
        one_to_one: false,
        cross_dataset: true,
    };
    let pending = [
        PendingPair::new("p1", "a#Author", "b#Human", "ab"),
        PendingPair::new("p2", "a#Review", "b#Article", "ab"),
        PendingPair::new("p3", "a#Person", "b#Writer", "ab"),
    ];
    let inf = infer_prefills(&net, &pending, settings);
    let by_id: BTreeMap<&str, &PreFill> =
        inf.prefills.iter().map(|p| (p.pair_id.as_str(), p)).collect();
    assert_eq!(by_id["p1"].rule, Rule::SubsumptionNegativity);
    assert_eq!(
        by_id["p1"].explanation,
        "NotEquivalent inferred by SubsumptionNegativity: a:Person ≡ b:Human [ab]; a:Author ⊑ a:Person"
    );
    assert_eq!(by_id["p2"].rule, Rule::Disjointedness);
    assert_eq!(
        by_id["p2"].explanation,
        "NotEquivalent inferred by Disjointedness: a:Paper ≡ b:Article [ab]; a:Review ⊓ a:Paper ⊑ ⊥"
    );
    // superclass orientation, on the target side
    assert_eq!(by_id["p3"].rule, Rule::SubsumptionNegativity);
}

#[test]
fn one_to_one_only_when_enabled() {
    let (a, b, c) = conference();
    let net = build_network([a, b, c], scopes(), [Assertion::equivalent("a#Paper", "b#Article", "ab")])
        .unwrap();
    let pending = [
        PendingPair::new("p1", "a#Paper", "b#Referee", "ab"),
        PendingPair::new("p2", "a#Person", "b#Article", "ab"),
        PendingPair::new("p3", "a#Person", "b#Human", "ab"),
    ];
    let on = infer_prefills(&net, &pending, PrefillSettings::default());
    let ids: Vec<&str> = on.prefills.iter().map(|p| p.pair_id.as_str()).collect();
    assert_eq!(ids, vec!["p1", "p2"]);
    assert!(on.prefills.iter().all(|p| p.rule == Rule::OneToOneNegativity));
    let off = infer_prefills(
        &net,
        &pending,
        PrefillSettings {
            one_to_one: false,
            cross_dataset: true,
        },
    );
    assert!(off.prefills.is_empty());
}

#[test]
fn conflicting_pair_is_reported_not_prefilled() {
    let (a, b, c) = conference();
    let net = build_network(
        [a, b, c],
        scopes(),
        [
            Assertion::equivalent("a#Paper", "b#Article", "ab"),
            Assertion::equivalent("b#Article", "a#Review", "ab"),
        ],
    )
    .unwrap();
    let pending = [PendingPair::new("p1", "a#Review", "b#Article", "ab")];
    let settings = PrefillSettings {
        one_to_one: false,
        cross_dataset: true,
    };
    let inf = infer_prefills(&net, &pending, settings);
    assert!(inf.prefills.is_empty());
    assert_eq!(inf.conflicts.len(), 1);
    assert_eq!(inf.conflicts[0].not_equivalent.rule, Some(Rule::Disjointedness));
}

#[test]
fn coherence_check_cases() {
    let (a, b, c) = conference();
    let net = build_network([a, b, c], scopes(), [Assertion::equivalent("a#Paper", "b#Article", "ab")])
        .unwrap();
    let s = PrefillSettings {
        one_to_one: false,
        cross_dataset: true,
    };
    assert!(coherence_check(&net, "a#Person", "b#Human", "ab", s).passed());
    assert_eq!(
        coherence_check(&net, "a#Review", "b#Article", "ab", s),
        CoherenceVerdict::Fail {
            rule: Some(Rule::Disjointedness),
            source: "a#Review".into(),
            target: "b#Article".into()
        }
    );
    let one = PrefillSettings::default();
    assert!(!coherence_check(&net, "a#Person", "b#Article", "ab", one).passed());
}

#[test]
fn unknown_entity_in_assertion() {
    let (a, b, c) = conference();
    let err = build_network([a, b, c], scopes(), [Assertion::equivalent("a#Nope", "b#Article", "ab")])
        .unwrap_err();
    assert!(matches!(err, NetworkError::DanglingAssertion { .. }));
}

#[test]
fn retraction_drops_only_unsupported() {
    let (a, b, c) = conference();
    let keep = Assertion::equivalent("a#Person", "b#Human", "ab");
    let gone = Assertion::equivalent("a#Paper", "b#Article", "ab");
    let net = build_network([a, b, c], scopes(), [keep.clone(), gone.clone()]).unwrap();
    let pending = [
        PendingPair::new("p1", "a#Author", "b#Human", "ab"),
        PendingPair::new("p2", "a#Review", "b#Article", "ab"),
        PendingPair::new("p3", "a#Paper", "b#Referee", "ab"),
    ];
    let s = PrefillSettings::default();
    let before = infer_prefills(&net, &pending, s).prefills;
    assert_eq!(before.len(), 3);
    let after_net = net.without(&gone);
    let dropped = retract_dependents(&gone, &before, &after_net, s);
    let ids: Vec<&str> = dropped.iter().map(|p| p.pair_id.as_str()).collect();
    assert_eq!(ids, vec!["p2", "p3"]);
    let rebuilt = infer_prefills(&after_net, &pending, s).prefills;
    assert_eq!(rebuilt.len(), 1);
    assert_eq!(rebuilt[0].pair_id.as_str(), "p1");
}

// ---- randomized comparison against a dense-matrix closure ----

#[derive(Debug, Clone)]
struct World {
    n: usize,
    sub_a: Vec<(usize, usize)>,
    sub_b: Vec<(usize, usize)>,
    disj_a: Vec<(usize, usize)>,
    disj_b: Vec<(usize, usize)>,
    asserted: Vec<(usize, usize, bool)>,
    one_to_one: bool,
}

fn iri(side: char, i: usize) -> String {
    format!("{side}#e{i}")
}

fn world() -> impl Strategy<Value = World> {
    (3usize..=15).prop_flat_map(|n| {
        let hier = prop::collection::vec((0..n, 0..n), 0..n + 2);
        let disj = prop::collection::vec((0..n, 0..n), 0..4);
        (
            Just(n),
            hier.clone(),
            hier,
            disj.clone(),
            disj,
            prop::collection::vec((0..n, 0..n, prop::bool::weighted(0.8)), 0..=15),
            any::<bool>(),
        )
            .prop_map(|(n, sa, sb, da, db, asserted, one_to_one)| {
                // child index above parent keeps hierarchies acyclic
                let acyclic = |v: Vec<(usize, usize)>| {
                    v.into_iter()
                        .filter(|(c, p)| c > p)
                        .collect::<Vec<_>>()
                };
                let irreflexive =
                    |v: Vec<(usize, usize)>| v.into_iter().filter(|(x, y)| x != y).collect::<Vec<_>>();
                World {
                    n,
                    sub_a: acyclic(sa),
                    sub_b: acyclic(sb),
                    disj_a: irreflexive(da),
                    disj_b: irreflexive(db),
                    asserted,
                    one_to_one,
                }
            })
    })
}

fn build(w: &World) -> (OntologyNetwork, Vec<PendingPair>) {
    let mk = |side: char, sub: &[(usize, usize)], disj: &[(usize, usize)]| {
        let mut o = Ontology::new(side.to_string());
        for i in 0..w.n {
            o.add_class(&iri(side, i), &[] as &[&str]);
        }
        for &(c, p) in sub {
            o.add_subclass(&iri(side, c), &iri(side, p));
        }
        for &(x, y) in disj {
            o.add_disjoint(&iri(side, x), &iri(side, y));
        }
        o
    };
    let assertions: Vec<Assertion> = w
        .asserted
        .iter()
        .map(|&(i, j, eq)| {
            let v = if eq { Verdict::Equivalent } else { Verdict::NotEquivalent };
            Assertion::user(&iri('a', i), &iri('b', j), v, "ab")
        })
        .collect();
    let net = build_network(
        [mk('a', &w.sub_a, &w.disj_a), mk('b', &w.sub_b, &w.disj_b)],
        [DatasetScope::new("ab", "a", "b")],
        assertions,
    )
    .unwrap();
    let mut pending = Vec::new();
    for i in 0..w.n {
        for j in 0..w.n {
            if !w.asserted.iter().any(|&(x, y, _)| x == i && y == j) {
                pending.push(PendingPair::new(format!("p{i:02}{j:02}"), &iri('a', i), &iri('b', j), "ab"));
            }
        }
    }
    (net, pending)
}

/// Entities 0..n are ontology a, n..2n ontology b.
fn oracle(w: &World) -> BTreeMap<(usize, usize), Option<Verdict>> {
    let m = 2 * w.n;
    let mut eq = vec![vec![false; m]; m];
    for (i, row) in eq.iter_mut().enumerate() {
        row[i] = true;
    }
    let mut neq_fact = vec![vec![false; m]; m];
    for &(i, j, e) in &w.asserted {
        let (x, y) = (i, w.n + j);
        if e {
            eq[x][y] = true;
            eq[y][x] = true;
        } else {
            neq_fact[x][y] = true;
            neq_fact[y][x] = true;
        }
    }
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                if eq[i][k] && eq[k][j] {
                    eq[i][j] = true;
                }
            }
        }
    }
    let mut anc = vec![vec![false; m]; m];
    for &(c, p) in &w.sub_a {
        anc[c][p] = true;
    }
    for &(c, p) in &w.sub_b {
        anc[w.n + c][w.n + p] = true;
    }
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                if anc[i][k] && anc[k][j] {
                    anc[i][j] = true;
                }
            }
        }
    }
    let mut disj = vec![vec![false; m]; m];
    for &(x, y) in &w.disj_a {
        disj[x][y] = true;
        disj[y][x] = true;
    }
    for &(x, y) in &w.disj_b {
        disj[w.n + x][w.n + y] = true;
        disj[w.n + y][w.n + x] = true;
    }
    let neg = |z: usize, y: usize| {
        (0..m).any(|x| x != y && eq[x][y] && (anc[z][x] || anc[x][z] || disj[z][x]))
    };
    let side = |x: usize| x < w.n;
    let mut out = BTreeMap::new();
    for i in 0..w.n {
        for j in 0..w.n {
            if w.asserted.iter().any(|&(x, y, _)| x == i && y == j) {
                continue;
            }
            let (a, b) = (i, w.n + j);
            let mut n = neg(a, b) || neg(b, a);
            if w.one_to_one {
                n |= (0..m).any(|x| x != a && x != b && side(x) && eq[x][b]);
                n |= (0..m).any(|y| y != b && y != a && !side(y) && eq[a][y]);
            }
            let e = eq[a][b];
            let verdict = match (e, n || neq_fact[a][b]) {
                (true, true) => None,
                (true, false) => Some(Verdict::Equivalent),
                (false, _) if n => Some(Verdict::NotEquivalent),
                _ => continue,
            };
            out.insert((i, j), verdict);
        }
    }
    out
}

fn restricted(net: &OntologyNetwork, supports: &[Support], dataset: &str) -> OntologyNetwork {
    let onts = net.ontologies().map(|o| {
        let mut r = Ontology::new(o.id.clone());
        for e in o.entities() {
            r.add_entity(e.clone());
        }
        for s in supports {
            match s {
                Support::Subclass { child, parent } if o.contains(child) => {
                    r.add_subclass(child, parent);
                }
                Support::Disjoint { x, y } if o.contains(x) => {
                    r.add_disjoint(x, y);
                }
                _ => {}
            }
        }
        r
    });
    let asserted = supports.iter().filter_map(|s| match s {
        Support::Assertion(a) => Some(a.clone()),
        _ => None,
    });
    build_network(onts.collect::<Vec<_>>(), [DatasetScope::new(dataset, "a", "b")], asserted).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_dense_closure(w in world()) {
        let (net, pending) = build(&w);
        let settings = PrefillSettings { one_to_one: w.one_to_one, cross_dataset: true };
        let inf = infer_prefills(&net, &pending, settings);
        let mut got = BTreeMap::new();
        for p in &inf.prefills {
            got.insert(p.pair_id.to_string(), Some(p.value));
        }
        for c in &inf.conflicts {
            got.insert(c.pair_id.to_string(), None);
        }
        let want: BTreeMap<String, Option<Verdict>> = oracle(&w)
            .into_iter()
            .map(|((i, j), v)| (format!("p{i:02}{j:02}"), v))
            .collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn supports_are_sufficient_and_minimal(w in world()) {
        let (net, pending) = build(&w);
        let settings = PrefillSettings { one_to_one: w.one_to_one, cross_dataset: true };
        let inf = infer_prefills(&net, &pending, settings);
        for p in &inf.prefills {
            let pair = [PendingPair { id: p.pair_id.clone(), source: p.source.clone(), target: p.target.clone(), dataset_id: p.dataset_id.clone() }];
            let alone = infer_prefills(&restricted(&net, &p.supports, "ab"), &pair, settings);
            prop_assert_eq!(alone.prefills.len(), 1);
            prop_assert_eq!(alone.prefills[0].value, p.value);
            for k in 0..p.supports.len() {
                let mut fewer = p.supports.clone();
                fewer.remove(k);
                let again = infer_prefills(&restricted(&net, &fewer, "ab"), &pair, settings);
                prop_assert!(again.prefills.iter().all(|q| q.value != p.value),
                    "support {:?} of {} is redundant", p.supports[k], p.explanation);
            }
        }
    }

    #[test]
    fn retraction_matches_rebuild(w in world(), pick in any::<prop::sample::Index>()) {
        let (net, pending) = build(&w);
        prop_assume!(!net.assertions().is_empty());
        let settings = PrefillSettings { one_to_one: w.one_to_one, cross_dataset: true };
        let before = infer_prefills(&net, &pending, settings).prefills;
        let removed = net.assertions()[pick.index(net.assertions().len())].clone();
        let after = net.without(&removed);
        let dropped = retract_dependents(&removed, &before, &after, settings);
        let rebuilt = infer_prefills(&after, &pending, settings).prefills;
        let rebuilt: BTreeMap<&PairId, Verdict> = rebuilt.iter().map(|p| (&p.pair_id, p.value)).collect();
        for p in &before {
            let survives = rebuilt.get(&p.pair_id) == Some(&p.value);
            prop_assert_eq!(survives, !dropped.contains(p));
        }
    }

    #[test]
    fn derivable_negative_fails_check(w in world(), i in 0usize..15, j in 0usize..15) {
        prop_assume!(i < w.n && j < w.n);
        let mut w = w;
        w.asserted.retain(|&(x, y, _)| !(x == i && y == j));
        let (net, _) = build(&w);
        let settings = PrefillSettings { one_to_one: w.one_to_one, cross_dataset: true };
        let verdict = coherence_check(&net, &iri('a', i), &iri('b', j), "ab", settings);
        let before = oracle(&w).get(&(i, j)).copied();
        if matches!(before, Some(None) | Some(Some(Verdict::NotEquivalent))) {
            prop_assert!(!verdict.passed());
        }
        if before == Some(Some(Verdict::Equivalent)) {
            prop_assert!(verdict.passed());
        }
    }

    #[test]
    fn idempotent_on_own_output(w in world()) {
        let (net, pending) = build(&w);
        let settings = PrefillSettings { one_to_one: w.one_to_one, cross_dataset: true };
        let first = infer_prefills(&net, &pending, settings);
        let mut grown = net.clone();
        grown
            .add_assertions(first.prefills.iter().map(|p| Assertion {
                source: p.source.clone(),
                target: p.target.clone(),
                value: p.value,
                origin: AssertionSource::Inferred,
                dataset_id: p.dataset_id.clone(),
            }))
            .unwrap();
        let second = infer_prefills(&grown, &pending, settings);
        let values = |inf: &Inference| -> Vec<(PairId, Verdict)> {
            inf.prefills.iter().map(|p| (p.pair_id.clone(), p.value)).collect()
        };
        prop_assert_eq!(values(&first), values(&second));
        prop_assert_eq!(first.conflicts.len(), second.conflicts.len());
    }

    #[test]
    fn adding_an_assertion_keeps_derived_facts(w in world(), i in 0usize..15, j in 0usize..15, eq in any::<bool>()) {
        prop_assume!(i < w.n && j < w.n);
        let (net, pending) = build(&w);
        let settings = PrefillSettings { one_to_one: w.one_to_one, cross_dataset: true };
        let facts = |inf: &Inference| -> BTreeSet<(PairId, Verdict)> {
            let mut out = BTreeSet::new();
            for p in &inf.prefills {
                out.insert((p.pair_id.clone(), p.value));
            }
            for c in &inf.conflicts {
                out.insert((c.pair_id.clone(), Verdict::Equivalent));
                out.insert((c.pair_id.clone(), Verdict::NotEquivalent));
            }
            out
        };
        let before = facts(&infer_prefills(&net, &pending, settings));
        let (s, t) = (iri('a', i), iri('b', j));
        let mut grown = net.clone();
        let v = if eq { Verdict::Equivalent } else { Verdict::NotEquivalent };
        grown.add_assertions([Assertion::user(&s, &t, v, "ab")]).unwrap();
        let rest: Vec<PendingPair> = pending.into_iter().filter(|p| !(p.source == s && p.target == t)).collect();
        let after = facts(&infer_prefills(&grown, &rest, settings));
        for f in before {
            if rest.iter().any(|p| p.id == f.0) {
                prop_assert!(after.contains(&f), "lost {:?}", f);
            }
        }
    }
}
