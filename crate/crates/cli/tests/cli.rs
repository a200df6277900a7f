use std::path::Path;
use std::process::{Command, Output};

use prosody_core::rfa::{fourier_synthesize, Carrier};
use prosody_core::stress::{self, Bracketing, StressRule, StressVector};

fn prosody(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prosody"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "{}", stderr(o));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn synth_wav(dir: &Path, name: &str, carrier: Carrier, secs: f64) -> String {
    let path = dir.join(name);
    let s = fourier_synthesize(&[carrier], secs, 16000.0).unwrap();
    prosody_core::ingest::write_wav(&path, &s).unwrap();
    path.display().to_string()
}

#[test]
fn stress_example() {
    let o = prosody(&["stress", "((big John)(saw (Tom's dog)))"]);
    assert_eq!(json(&o)["indices"], serde_json::json!([3, 2, 3, 4, 1]));
    for alg in ["metrical", "counter"] {
        let o = prosody(&[
            "stress",
            "--algorithm",
            alg,
            "( ( tiny Moll ) ( met ( tall Jill ) ) )",
        ]);
        assert_eq!(json(&o)["indices"], serde_json::json!([3, 2, 3, 4, 1]));
    }
    let o = prosody(&["stress", "--rule", "compound", "((black board) eraser)"]);
    assert_eq!(json(&o)["indices"], serde_json::json!([1, 3, 2]));
}

#[test]
fn invstress_example() {
    let o = prosody(&["invstress", "3", "4", "2", "3", "4", "1"]);
    let v = json(&o);
    assert_eq!(v["bracketing"], "((3 (4 2))(3 (4 1)))");
    assert_eq!(v["balanced"], true);
    let o = prosody(&["invstress", "--tree", "1", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Unparseable"));
}

#[test]
fn cli_output_equals_library_json() {
    let text = "((big John)(saw (Tom's dog)))";
    let lib = stress::stress_subordinate(&Bracketing::parse(text), StressRule::Nuclear).unwrap();
    let o = prosody(&["stress", text]);
    assert_eq!(
        stdout(&o),
        serde_json::to_string_pretty(&lib).unwrap() + "\n"
    );

    let lib = stress::numbers_to_bracketing(&StressVector::new(vec![2, 1]));
    let o = prosody(&["invstress", "2", "1"]);
    assert_eq!(
        stdout(&o),
        serde_json::to_string_pretty(&lib).unwrap() + "\n"
    );
}

#[test]
fn sandhi_both_directions() {
    let o = prosody(&["sandhi", "T3", "T3", "T3"]);
    assert_eq!(json(&o), serde_json::json!(["T2", "T2", "T3"]));
    let o = prosody(&["sandhi", "--right-to-left", "T3", "T3", "T3"]);
    assert_eq!(json(&o), serde_json::json!(["T3", "T2", "T3"]));
    let o = prosody(&["sandhi", "--inverse", "T2", "T3"]);
    assert_eq!(json(&o), serde_json::json!([["T2", "T3"], ["T3", "T3"]]));
    let o = prosody(&["sandhi", "--builtin", "downstep", "H", "L", "H"]);
    assert_eq!(json(&o)["symbols"], serde_json::json!(["h", "l", "!h"]));
    let o = prosody(&[
        "sandhi",
        "--builtin",
        "downstep",
        "--inverse",
        "h",
        "l",
        "!h",
    ]);
    assert_eq!(json(&o), serde_json::json!([["H", "L", "H"]]));
    let o = prosody(&["sandhi", "T3", "T9"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("UnknownSymbol"));
}

#[test]
fn sandhi_rule_and_fst_files() {
    let dir = tempfile::tempdir().unwrap();
    let rule = dir.path().join("rule.json");
    std::fs::write(
        &rule,
        r#"{"alphabet": ["a", "b"], "target": "a", "replacement": "b", "left": ["b"], "right": []}"#,
    )
    .unwrap();
    let o = prosody(&["sandhi", "--rule", rule.to_str().unwrap(), "b", "a", "a"]);
    assert_eq!(json(&o), serde_json::json!(["b", "b", "a"]));

    let fst = dir.path().join("fst.json");
    let desc = prosody_core::rewrite::ToneFst::two_tone_downstep()
        .desc()
        .clone();
    std::fs::write(&fst, serde_json::to_string(&desc).unwrap()).unwrap();
    let o = prosody(&[
        "sandhi",
        "--fst",
        fst.to_str().unwrap(),
        "--p0",
        "100",
        "H",
        "L",
        "H",
    ]);
    assert_eq!(json(&o)["pitch"], serde_json::json!([100.0, 70.0, 80.0]));
}

#[test]
fn pvi_and_scatter() {
    let dir = tempfile::tempdir().unwrap();
    let tsv = dir.path().join("a.tsv");
    std::fs::write(
        &tsv,
        "tier\tlabel\tstart_s\tend_s\nw\ta\t0\t0.2\nw\tb\t0.2\t0.6\nw\tsil\t0.6\t0.7\nw\tc\t0.7\t0.9\nw\td\t0.9\t1.3\n",
    )
    .unwrap();
    let p = tsv.to_str().unwrap();
    let v = json(&prosody(&["pvi", p, "--tier", "w"]));
    assert_eq!(v["n"], 4);
    let v = json(&prosody(&["pvi", p, "--tier", "w", "--exclude", "none"]));
    assert_eq!(v["n"], 5);
    let plots = dir.path().join("plots");
    let v = json(&prosody(&[
        "scatter",
        p,
        "--tier",
        "w",
        "--plot",
        plots.to_str().unwrap(),
    ]));
    assert_eq!(v["pairs"].as_array().unwrap().len(), 3);
    let svg = std::fs::read_to_string(plots.join("scatter.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="point""#).count(), 3);
    assert_eq!(svg.matches(r#"class="quadrant""#).count(), 2);

    let o = prosody(&["pvi", p, "--tier", "nope"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("TierNotFound"));
}

#[test]
fn rfa_report_and_figure() {
    let dir = tempfile::tempdir().unwrap();
    let wav = synth_wav(
        dir.path(),
        "counting.wav",
        Carrier::new(180.0).with_am(2.0, 0.8).with_fm(1.0, 20.0),
        6.0,
    );
    let plots = dir.path().join("plots");
    let v = json(&prosody(&["rfa", &wav, "--plot", plots.to_str().unwrap()]));
    for key in [
        "duration_s",
        "aems",
        "fems",
        "formants_am",
        "formants_fm",
        "histogram",
        "pearson_r",
    ] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["formants_am"].as_array().unwrap().len(), 6);
    let svg = std::fs::read_to_string(plots.join("counting.svg")).unwrap();
    assert_eq!(svg.matches(r#"<g class="row""#).count(), 4);
    assert_eq!(svg.matches(r#"class="rhythm-bar""#).count(), 12);
    assert_eq!(svg.matches(r#"class="hist-bar""#).count(), 12);
}

#[test]
fn rfa_with_config_and_batch() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth_wav(
        dir.path(),
        "a.wav",
        Carrier::new(180.0).with_am(3.0, 0.8),
        4.0,
    );
    let b = synth_wav(
        dir.path(),
        "b.wav",
        Carrier::new(220.0).with_am(5.0, 0.8),
        4.0,
    );
    let conf = dir.path().join("c.conf");
    std::fs::write(&conf, "rhythmcount=3\naemsmedfilt=1\n").unwrap();
    let c = conf.to_str().unwrap();
    let v = json(&prosody(&["rfa", &a, &b, "--config", c]));
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 2);
    assert_eq!(arr[0]["file"], a.as_str());
    assert_eq!(arr[1]["file"], b.as_str());
    assert_eq!(arr[0]["report"]["formants_am"].as_array().unwrap().len(), 3);
    assert_eq!(arr[1]["report"]["formants_am"][0]["freq"], 5.0);

    let v = json(&prosody(&["correlate", &a, "--config", c]));
    assert!(v["pearson_r"].as_f64().unwrap().abs() <= 1.0);

    std::fs::write(&conf, "nonsense=1\n").unwrap();
    let o = prosody(&["rfa", &a, "--config", c]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("UnknownKey"));
}

#[test]
fn synth_writes_wav() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("s.json");
    std::fs::write(
        &spec,
        r#"{"duration_s": 1.5, "fs": 8000, "carriers": [{"freq": 200, "fm": [{"freq": 1, "deviation": 30}]}]}"#,
    )
    .unwrap();
    let out = dir.path().join("s.wav");
    let v = json(&prosody(&[
        "synth",
        spec.to_str().unwrap(),
        out.to_str().unwrap(),
    ]));
    assert_eq!(v["samples"], 12000);
    let s = prosody_core::ingest::load_wav(&out).unwrap();
    assert_eq!(s.len(), 12000);

    std::fs::write(&spec, r#"{"duration_s": 1, "fs": 8000, "carriers": [{"freq": 20, "fm": [{"freq": 1, "deviation": 30}]}]}"#).unwrap();
    let o = prosody(&["synth", spec.to_str().unwrap(), out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("InvalidParameters"));
}

#[test]
fn data_and_usage_errors() {
    let o = prosody(&["stress", "(a b"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("MalformedBracketing"));
    let o = prosody(&["rfa", "/nonexistent.wav"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(prosody(&["stress"]).status.code(), Some(2));
    assert_eq!(prosody(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(prosody(&["invstress", "x"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let silent = dir.path().join("silent.wav");
    let s = prosody_core::rfa::Signal::new(vec![0.0; 8000], 8000.0).unwrap();
    prosody_core::ingest::write_wav(&silent, &s).unwrap();
    let o = prosody(&["rfa", silent.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("DegenerateAudio"));
}
