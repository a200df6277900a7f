use std::collections::HashMap;
use std::time::Instant;

use proptest::prelude::*;
use prosody_core::stress::{
    all_shapes, metrical_number, numbers_to_bracketing, parenthesis_count, parse_numbers_to_tree,
    stress_subordinate, Bracketing, Shape, StressError, StressRule, StressVector, Tree,
};

/// Independent oracle: in `(A B)` every stress in the weak daughter drops
/// one level, and in the strong daughter everything but its 1 drops.
fn oracle(t: &Tree, rule: StressRule) -> Vec<u32> {
    match t {
        Tree::Leaf(_) => vec![1],
        Tree::Node(l, r) => {
            let (a, b) = (oracle(l, rule), oracle(r, rule));
            let weaken = |v: Vec<u32>| v.into_iter().map(|x| x + 1).collect::<Vec<_>>();
            let keep_top = |v: Vec<u32>| {
                v.into_iter()
                    .map(|x| if x == 1 { 1 } else { x + 1 })
                    .collect::<Vec<_>>()
            };
            match rule {
                StressRule::Nuclear => [weaken(a), keep_top(b)].concat(),
                StressRule::Compound => [keep_top(a), weaken(b)].concat(),
            }
        }
    }
}

fn relabel(t: &Tree, labels: &mut impl Iterator<Item = String>) -> Tree {
    match t {
        Tree::Leaf(_) => Tree::Leaf(labels.next().unwrap()),
        Tree::Node(l, r) => Tree::Node(Box::new(relabel(l, labels)), Box::new(relabel(r, labels))),
    }
}

fn label_sets(n: usize) -> Vec<Vec<String>> {
    vec![
        (1..=n).map(|i| format!("w{i}")).collect(),
        (1..=n).map(|i| i.to_string()).collect(),
        vec!["la".to_string(); n],
        (1..=n).map(|i| format!("Tom's{i}")).collect(),
    ]
}

fn all_vectors(t: &Tree, b: &Bracketing, rule: StressRule) -> [Vec<u32>; 3] {
    [
        stress_subordinate(b, rule).unwrap().indices,
        metrical_number(b, rule).unwrap().leaf_indices(),
        parenthesis_count(b, rule).unwrap().indices,
    ]
    .map(|v| {
        assert_eq!(v.len(), t.labels().len());
        v
    })
}

#[test]
fn shape_counts_are_catalan() {
    let counts: Vec<usize> = (1..=6).map(|n| all_shapes(n).len()).collect();
    assert_eq!(counts, [1, 1, 2, 5, 14, 42]);
}

#[test]
fn exhaustive_agreement_and_round_trip() {
    let start = Instant::now();
    for n in 1..=6 {
        let mut seen: HashMap<Vec<u32>, Shape> = HashMap::new();
        for shape in all_shapes(n) {
            for labels in label_sets(n) {
                let tree = relabel(&shape.to_tree(), &mut labels.into_iter());
                let b = tree.to_bracketing();
                for rule in [StressRule::Nuclear, StressRule::Compound] {
                    let want = oracle(&tree, rule);
                    for got in all_vectors(&tree, &b, rule) {
                        assert_eq!(got, want, "{b} {rule:?}");
                    }
                }
            }
            let v = oracle(&shape.to_tree(), StressRule::Nuclear);
            let sv = StressVector::new(v.clone());

            let inv = numbers_to_bracketing(&sv);
            assert!(inv.balanced, "{v:?}");
            assert_eq!(inv.bracketing.to_tree().unwrap().shape(), shape, "{v:?}");

            let parsed = parse_numbers_to_tree(&sv).unwrap();
            assert_eq!(parsed.shape(), shape);
            assert_eq!(parsed.leaves(), v);

            if let Some(other) = seen.insert(v.clone(), shape.clone()) {
                panic!("{v:?} produced by {other:?} and {shape:?}");
            }
        }
    }
    assert!(start.elapsed().as_secs_f64() < 1.0, "{:?}", start.elapsed());
}

#[test]
fn non_derivable_sequences_are_rejected() {
    let cases: [&[u32]; 9] = [
        &[],
        &[1, 1],
        &[3, 1],
        &[2],
        &[1, 2],
        &[2, 1, 1],
        &[2, 2, 1],
        &[4, 3, 1],
        &[1, 2, 1],
    ];
    for c in cases {
        let v = StressVector::new(c.to_vec());
        assert_eq!(
            parse_numbers_to_tree(&v).unwrap_err(),
            StressError::Unparseable(c.to_vec()),
            "{c:?}"
        );
        if !c.is_empty() {
            assert!(!numbers_to_bracketing(&v).balanced, "{c:?}");
        }
    }
}

#[test]
fn worked_examples() {
    for text in [
        "((big John)(saw (Tom's dog)))",
        "( ( tiny Moll ) ( met ( tall Jill ) ) )",
    ] {
        let b = Bracketing::parse(text);
        let tree = b.to_tree().unwrap();
        for v in all_vectors(&tree, &b, StressRule::Nuclear) {
            assert_eq!(v, [3, 2, 3, 4, 1]);
        }
    }
    let inv = numbers_to_bracketing(&StressVector::new(vec![3, 4, 2, 3, 4, 1]));
    assert_eq!(inv.bracketing.to_string(), "((3 (4 2))(3 (4 1)))");
    let tree = parse_numbers_to_tree(&StressVector::new(vec![3, 2, 3, 4, 1])).unwrap();
    assert_eq!(
        serde_json::to_string(&tree).unwrap(),
        "[[[[3,2],2],[[3,[[4,1],1]],1]],1]"
    );
}

#[test]
fn malformed_inputs() {
    for text in ["(a b", "a b)", "(a b c)", "((a b)", "()", "(a (b))"] {
        let b = Bracketing::parse(text);
        for r in [
            stress_subordinate(&b, StressRule::Nuclear).map(|_| ()),
            metrical_number(&b, StressRule::Nuclear).map(|_| ()),
            parenthesis_count(&b, StressRule::Nuclear).map(|_| ()),
        ] {
            assert_eq!(r.unwrap_err().name(), "MalformedBracketing", "{text}");
        }
    }
}

fn arb_tree() -> impl Strategy<Value = Tree> {
    let leaf = "[a-z]{1,5}".prop_map(Tree::Leaf);
    leaf.prop_recursive(6, 14, 2, |inner| {
        (inner.clone(), inner).prop_map(|(l, r)| Tree::Node(Box::new(l), Box::new(r)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn random_bracketings_agree_with_oracle(tree in arb_tree()) {
        let b = tree.to_bracketing();
        let reparsed = Bracketing::parse(&b.to_string());
        prop_assert_eq!(&reparsed, &b);
        for rule in [StressRule::Nuclear, StressRule::Compound] {
            let want = oracle(&tree, rule);
            for got in all_vectors(&tree, &b, rule) {
                prop_assert_eq!(&got, &want);
            }
        }
        let v = StressVector::new(oracle(&tree, StressRule::Nuclear));
        prop_assert_eq!(parse_numbers_to_tree(&v).unwrap().shape(), tree.shape());
        let inv = numbers_to_bracketing(&v);
        prop_assert!(inv.balanced);
        prop_assert_eq!(inv.bracketing.to_tree().unwrap().shape(), tree.shape());
    }

    #[test]
    fn nuclear_vectors_never_repeat_adjacent_values(tree in arb_tree()) {
        let v = oracle(&tree, StressRule::Nuclear);
        prop_assert!(v.windows(2).all(|w| w[0] != w[1]));
        prop_assert_eq!(v.iter().filter(|&&x| x == 1).count(), 1);
    }
}
