use std::collections::BTreeSet;
use std::time::Instant;

use prosody_core::rewrite::{ContextRule, IterationMode, LexicalTone, ToneFst};

const TONES: [&str; 4] = ["T1", "T2", "T3", "T4"];

fn seqs(alphabet: &[&str], max_len: usize) -> Vec<Vec<String>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<String>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|s| {
                alphabet.iter().map(move |a| {
                    let mut t = s.clone();
                    t.push(a.to_string());
                    t
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Two-state transducer for `T3 -> T2 / _ T3` with contexts read from the
/// input: a T3 is held until the next symbol decides its output.
fn fst_simultaneous(input: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut holding = false;
    for x in input {
        if holding {
            out.push(if x == "T3" { "T2" } else { "T3" }.to_string());
        }
        holding = x == "T3";
        if !holding {
            out.push(x.clone());
        }
    }
    if holding {
        out.push("T3".to_string());
    }
    out
}

/// Right-to-left transducer whose state is the previous output symbol.
fn fst_right_to_left(input: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut right: Option<String> = None;
    for x in input.iter().rev() {
        let y = if x == "T3" && right.as_deref() == Some("T3") {
            "T2".to_string()
        } else {
            x.clone()
        };
        right = Some(y.clone());
        out.push(y);
    }
    out.reverse();
    out
}

fn v(s: &[&str]) -> Vec<String> {
    s.iter().map(|x| x.to_string()).collect()
}

#[test]
fn rule_matches_hand_built_transducer() {
    let rule = ContextRule::mandarin_tone3();
    let rtl = rule.clone().with_mode(IterationMode::RightToLeft);
    for s in seqs(&TONES, 6) {
        assert_eq!(
            rule.apply_forward(&s).unwrap(),
            fst_simultaneous(&s),
            "{s:?}"
        );
        assert_eq!(
            rtl.apply_forward(&s).unwrap(),
            fst_right_to_left(&s),
            "{s:?}"
        );
    }
}

#[test]
fn ambiguity_of_inverse() {
    let rule = ContextRule::mandarin_tone3();
    let got = rule.apply_inverse(&v(&["T2", "T3"]));
    let want: BTreeSet<Vec<String>> = [v(&["T3", "T3"]), v(&["T2", "T3"])].into_iter().collect();
    assert_eq!(got, want);
    assert_eq!(
        rule.apply_forward(&v(&["T3", "T3", "T3"])).unwrap(),
        v(&["T2", "T2", "T3"])
    );
}

#[test]
fn inverse_is_sound_and_complete() {
    let start = Instant::now();
    for mode in [IterationMode::Simultaneous, IterationMode::RightToLeft] {
        let rule = ContextRule::mandarin_tone3().with_mode(mode);
        let all = seqs(&TONES, 6);
        for y in &all {
            for x in rule.apply_inverse(y) {
                assert_eq!(
                    &rule.apply_forward(&x).unwrap(),
                    y,
                    "{mode:?} {x:?} -> {y:?}"
                );
            }
        }
        for x in &all {
            let y = rule.apply_forward(x).unwrap();
            assert!(rule.apply_inverse(&y).contains(x), "{mode:?} {x:?}");
        }
    }
    assert!(start.elapsed().as_secs_f64() < 1.0, "{:?}", start.elapsed());
}

#[test]
fn unknown_symbols_are_rejected() {
    let rule = ContextRule::mandarin_tone3();
    assert_eq!(
        rule.apply_forward(&v(&["T3", "T5"])).unwrap_err().name(),
        "UnknownSymbol"
    );
}

#[test]
fn downstep_transducer_inverse_is_sound_and_complete() {
    let fst = ToneFst::two_tone_downstep();
    let mut inputs: Vec<Vec<LexicalTone>> = vec![vec![]];
    for len in 1..=6 {
        for bits in 0..(1u32 << len) {
            inputs.push(
                (0..len)
                    .map(|i| {
                        if bits >> i & 1 == 1 {
                            LexicalTone::L
                        } else {
                            LexicalTone::H
                        }
                    })
                    .collect(),
            );
        }
    }
    for x in &inputs {
        let run = fst.forward(x, 200.0).unwrap();
        let back = fst.inverse(&run.symbols);
        assert!(back.contains(x), "{x:?}");
        for cand in back {
            assert_eq!(fst.forward(&cand, 200.0).unwrap().symbols, run.symbols);
        }
    }
}

#[test]
fn downstep_pitch_terraces() {
    use LexicalTone::{H, L};
    let fst = ToneFst::two_tone_downstep();
    let run = fst.forward(&[H, L, H, L, H], 200.0).unwrap();
    let p = &run.pitch;
    // each H after an L sits lower than the H before it
    assert!(p[2] < p[0] && p[4] < p[2]);
    assert!((p[0] - 200.0).abs() < 1e-12);
    assert!((p[2] - 160.0).abs() < 1e-9);
    assert!((p[4] - 128.0).abs() < 1e-9);
}
