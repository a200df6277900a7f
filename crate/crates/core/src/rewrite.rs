//! Reversible contextual rewrite rules and tone-sandhi transducers.
//!
//! [`ContextRule`] is a single `α → β / γ _ δ` rule over a declared alphabet.
//! Applied forward it is deterministic; applied in reverse it returns every
//! lexical sequence that maps onto the surface form, which is where sandhi
//! ambiguity shows up (Mandarin `T2 T3` may come from `T3 T3` or `T2 T3`).
//!
//! [`ToneFst`] is a deterministic transducer from lexical tones `H`/`L` to
//! phonetic tones `h`, `l`, `!h`, `^l`, with a third, numeric stage that
//! turns each transition into a pitch value.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FstError {
    #[error("symbol `{0}` is not in the rule alphabet")]
    UnknownSymbol(String),
    #[error("no transition from state `{state}` on input {input} at position {position}")]
    NoTransition {
        state: String,
        input: String,
        position: usize,
    },
    #[error("invalid rule: {0}")]
    InvalidRule(String),
    #[error("invalid transducer: {0}")]
    InvalidTransducer(String),
    #[error("reference pitch must be positive, got {0}")]
    InvalidPitch(f64),
}

impl FstError {
    pub fn name(&self) -> &'static str {
        match self {
            FstError::UnknownSymbol(_) => "UnknownSymbol",
            FstError::NoTransition { .. } => "NoTransition",
            FstError::InvalidRule(_) => "InvalidRule",
            FstError::InvalidTransducer(_) => "InvalidTransducer",
            FstError::InvalidPitch(_) => "InvalidPitch",
        }
    }
}

/// How a rule whose context can itself be rewritten (e.g. T3 T3 T3) is
/// iterated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IterationMode {
    /// One left-to-right pass; contexts are matched against the input.
    #[default]
    Simultaneous,
    /// Right-to-left pass; contexts are matched against the partially
    /// rewritten sequence, so a rewrite can bleed the one to its left.
    RightToLeft,
}

/// `target → replacement / left _ right`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextRule {
    pub alphabet: BTreeSet<String>,
    pub target: String,
    pub replacement: String,
    #[serde(default)]
    pub left: Vec<String>,
    #[serde(default)]
    pub right: Vec<String>,
    #[serde(default)]
    pub mode: IterationMode,
}

impl ContextRule {
    pub fn new<S: Into<String>>(
        alphabet: impl IntoIterator<Item = S>,
        target: &str,
        replacement: &str,
        left: &[&str],
        right: &[&str],
    ) -> Result<Self, FstError> {
        let rule = ContextRule {
            alphabet: alphabet.into_iter().map(Into::into).collect(),
            target: target.to_string(),
            replacement: replacement.to_string(),
            left: left.iter().map(|s| s.to_string()).collect(),
            right: right.iter().map(|s| s.to_string()).collect(),
            mode: IterationMode::Simultaneous,
        };
        rule.validate()?;
        Ok(rule)
    }

    /// Mandarin third-tone sandhi, `T3 → T2 / _ T3`, over `T1..T4`.
    pub fn mandarin_tone3() -> Self {
        ContextRule::new(["T1", "T2", "T3", "T4"], "T3", "T2", &[], &["T3"])
            .expect("built-in rule is valid")
    }

    pub fn with_mode(mut self, mode: IterationMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<(), FstError> {
        if self.target == self.replacement {
            return Err(FstError::InvalidRule(
                "target and replacement are identical".into(),
            ));
        }
        for s in std::iter::once(&self.target)
            .chain(std::iter::once(&self.replacement))
            .chain(&self.left)
            .chain(&self.right)
        {
            if !self.alphabet.contains(s) {
                return Err(FstError::UnknownSymbol(s.clone()));
            }
        }
        Ok(())
    }

    fn check_symbols(&self, s: &[String]) -> Result<(), FstError> {
        match s.iter().find(|x| !self.alphabet.contains(*x)) {
            Some(x) => Err(FstError::UnknownSymbol(x.clone())),
            None => Ok(()),
        }
    }

    fn context_matches(&self, seq: &[String], i: usize) -> bool {
        let l = self.left.len();
        let r = self.right.len();
        i >= l
            && i + 1 + r <= seq.len()
            && seq[i - l..i] == self.left[..]
            && seq[i + 1..i + 1 + r] == self.right[..]
    }

    pub fn apply_forward(&self, s: &[String]) -> Result<Vec<String>, FstError> {
        self.check_symbols(s)?;
        Ok(self.forward_unchecked(s))
    }

    fn forward_unchecked(&self, s: &[String]) -> Vec<String> {
        match self.mode {
            IterationMode::Simultaneous => s
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    if *x == self.target && self.context_matches(s, i) {
                        self.replacement.clone()
                    } else {
                        x.clone()
                    }
                })
                .collect(),
            IterationMode::RightToLeft => {
                let mut out = s.to_vec();
                for i in (0..out.len()).rev() {
                    if out[i] == self.target && self.context_matches(&out, i) {
                        out[i] = self.replacement.clone();
                    }
                }
                out
            }
        }
    }

    /// All sequences `c` with `apply_forward(c) == s`.
    ///
    /// A preimage can only differ from `s` where `s` shows the replacement
    /// symbol, so candidates expand those positions to {target,
    /// replacement} and are kept when they map forward onto `s`.
    pub fn apply_inverse(&self, s: &[String]) -> BTreeSet<Vec<String>> {
        let mut out = BTreeSet::new();
        if self.check_symbols(s).is_err() {
            return out;
        }
        let sites: Vec<usize> = s
            .iter()
            .enumerate()
            .filter(|(_, x)| **x == self.replacement)
            .map(|(i, _)| i)
            .collect();
        let mut candidates = vec![s.to_vec()];
        for &i in &sites {
            let mut next = Vec::with_capacity(candidates.len() * 2);
            for c in candidates {
                let mut alt = c.clone();
                alt[i] = self.target.clone();
                next.push(c);
                next.push(alt);
            }
            candidates = next;
        }
        for c in candidates {
            if self.forward_unchecked(&c) == s {
                out.insert(c);
            }
        }
        out
    }
}

pub fn symbols(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LexicalTone {
    H,
    L,
}

impl fmt::Display for LexicalTone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LexicalTone::H => "H",
            LexicalTone::L => "L",
        })
    }
}

impl FromStr for LexicalTone {
    type Err = FstError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "H" => Ok(LexicalTone::H),
            "L" => Ok(LexicalTone::L),
            other => Err(FstError::UnknownSymbol(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PhoneticTone {
    #[serde(rename = "h")]
    High,
    #[serde(rename = "l")]
    Low,
    #[serde(rename = "!h")]
    DownstepHigh,
    #[serde(rename = "^l")]
    UpstepLow,
}

impl fmt::Display for PhoneticTone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhoneticTone::High => "h",
            PhoneticTone::Low => "l",
            PhoneticTone::DownstepHigh => "!h",
            PhoneticTone::UpstepLow => "^l",
        })
    }
}

impl FromStr for PhoneticTone {
    type Err = FstError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "h" => Ok(PhoneticTone::High),
            "l" => Ok(PhoneticTone::Low),
            "!h" => Ok(PhoneticTone::DownstepHigh),
            "^l" => Ok(PhoneticTone::UpstepLow),
            other => Err(FstError::UnknownSymbol(other.to_string())),
        }
    }
}

/// Numeric stage of a transition.
///
/// The run keeps a high-register reference `top` (initially `p0`) and the
/// previous pitch `prev`:
///
/// | fn         | pitch                 | register after  |
/// |------------|-----------------------|-----------------|
/// | `reset`    | `p0`                  | `p0`            |
/// | `high`     | `top`                 | unchanged       |
/// | `downstep` | `k · top`             | `k · top`       |
/// | `low`      | `r · top`             | unchanged       |
/// | `upstep`   | `u · prev`            | unchanged       |
/// | `same`     | `prev`                | unchanged       |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PitchFn {
    Reset,
    Same,
    Downstep,
    Upstep,
    Low,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitchParams {
    /// Downstep factor `k`.
    #[serde(default = "default_downstep")]
    pub downstep: f64,
    /// Low-tone ratio `r` relative to the current register.
    #[serde(default = "default_low")]
    pub low: f64,
    /// Upstep factor `u`.
    #[serde(default = "default_upstep")]
    pub upstep: f64,
}

fn default_downstep() -> f64 {
    0.8
}
fn default_low() -> f64 {
    0.7
}
fn default_upstep() -> f64 {
    1.25
}

impl Default for PitchParams {
    fn default() -> Self {
        PitchParams {
            downstep: default_downstep(),
            low: default_low(),
            upstep: default_upstep(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub from: String,
    pub to: String,
    #[serde(rename = "in")]
    pub input: LexicalTone,
    pub out: PhoneticTone,
    pub pitch_fn: PitchFn,
    /// Only taken when the tone-bearing unit carries this feature (e.g. a
    /// tone-blocking onset). Unguarded transitions are the fallback.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<String>,
}

/// Transducer description as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToneFstDesc {
    pub states: Vec<String>,
    pub transitions: Vec<Transition>,
    pub initial: String,
    pub accepting: Vec<String>,
    #[serde(default)]
    pub pitch: PitchParams,
}

/// A tone-bearing unit: the lexical tone plus an optional syllable label and
/// feature tags consulted by guarded transitions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ToneUnit {
    pub tone: Option<LexicalTone>,
    pub syllable: Option<String>,
    pub features: BTreeSet<String>,
}

impl From<LexicalTone> for ToneUnit {
    fn from(t: LexicalTone) -> Self {
        ToneUnit {
            tone: Some(t),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToneRun {
    pub symbols: Vec<PhoneticTone>,
    pub pitch: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub syllables: Vec<Option<String>>,
    pub final_state: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToneFst {
    desc: ToneFstDesc,
    state_index: BTreeMap<String, usize>,
    // per state: transitions leaving it
    outgoing: Vec<Vec<usize>>,
    accepting: Vec<bool>,
    initial: usize,
}

impl ToneFst {
    pub fn new(desc: ToneFstDesc) -> Result<Self, FstError> {
        let mut state_index = BTreeMap::new();
        for (i, s) in desc.states.iter().enumerate() {
            if state_index.insert(s.clone(), i).is_some() {
                return Err(FstError::InvalidTransducer(format!(
                    "duplicate state `{s}`"
                )));
            }
        }
        let lookup = |name: &str| {
            state_index
                .get(name)
                .copied()
                .ok_or_else(|| FstError::InvalidTransducer(format!("unknown state `{name}`")))
        };
        let initial = lookup(&desc.initial)?;
        let mut accepting = vec![false; desc.states.len()];
        for a in &desc.accepting {
            accepting[lookup(a)?] = true;
        }
        let mut outgoing = vec![Vec::new(); desc.states.len()];
        let mut seen = BTreeSet::new();
        for (i, t) in desc.transitions.iter().enumerate() {
            let from = lookup(&t.from)?;
            lookup(&t.to)?;
            if !seen.insert((from, t.input, t.guard.clone())) {
                return Err(FstError::InvalidTransducer(format!(
                    "nondeterministic: two transitions from `{}` on {}{}",
                    t.from,
                    t.input,
                    t.guard
                        .as_ref()
                        .map(|g| format!(" with guard `{g}`"))
                        .unwrap_or_default()
                )));
            }
            outgoing[from].push(i);
        }
        let p = desc.pitch;
        if !(p.downstep > 0.0 && p.downstep < 1.0 && p.low > 0.0 && p.upstep > 0.0) {
            return Err(FstError::InvalidTransducer(
                "pitch factors must be positive, with downstep below 1".into(),
            ));
        }
        Ok(ToneFst {
            desc,
            state_index,
            outgoing,
            accepting,
            initial,
        })
    }

    /// Two-tone downstep grammar: `H → !h / L _`, everything else
    /// surfaces faithfully.
    pub fn two_tone_downstep() -> Self {
        let t = |from: &str, to: &str, input, out, pitch_fn| Transition {
            from: from.into(),
            to: to.into(),
            input,
            out,
            pitch_fn,
            guard: None,
        };
        use LexicalTone::*;
        use PhoneticTone::*;
        ToneFst::new(ToneFstDesc {
            states: vec!["start".into(), "high".into(), "low".into()],
            transitions: vec![
                t("start", "high", H, High, PitchFn::Reset),
                t("start", "low", L, Low, PitchFn::Low),
                t("high", "high", H, High, PitchFn::High),
                t("high", "low", L, Low, PitchFn::Low),
                t("low", "low", L, Low, PitchFn::Same),
                t("low", "high", H, DownstepHigh, PitchFn::Downstep),
            ],
            initial: "start".into(),
            accepting: vec!["start".into(), "high".into(), "low".into()],
            pitch: PitchParams::default(),
        })
        .expect("built-in transducer is valid")
    }

    pub fn from_json(text: &str) -> Result<Self, FstError> {
        let desc: ToneFstDesc =
            serde_json::from_str(text).map_err(|e| FstError::InvalidTransducer(e.to_string()))?;
        ToneFst::new(desc)
    }

    pub fn load(path: &Path) -> Result<Self, FstError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FstError::InvalidTransducer(format!("{}: {e}", path.display())))?;
        ToneFst::from_json(&text)
    }

    pub fn desc(&self) -> &ToneFstDesc {
        &self.desc
    }

    pub fn state_names(&self) -> impl Iterator<Item = &str> {
        self.state_index.keys().map(String::as_str)
    }

    fn select(&self, state: usize, unit: &ToneUnit, tone: LexicalTone) -> Option<&Transition> {
        let mut fallback = None;
        for &i in &self.outgoing[state] {
            let t = &self.desc.transitions[i];
            if t.input != tone {
                continue;
            }
            match &t.guard {
                Some(g) if unit.features.contains(g) => return Some(t),
                Some(_) => {}
                None => fallback = Some(t),
            }
        }
        fallback
    }

    pub fn forward(&self, tones: &[LexicalTone], p0: f64) -> Result<ToneRun, FstError> {
        let units: Vec<ToneUnit> = tones.iter().map(|&t| t.into()).collect();
        self.forward_units(&units, p0)
    }

    /// Runs the transducer, producing phonetic tones and one pitch value per
    /// unit. Units without a tone are rejected.
    pub fn forward_units(&self, units: &[ToneUnit], p0: f64) -> Result<ToneRun, FstError> {
        if !(p0 > 0.0 && p0.is_finite()) {
            return Err(FstError::InvalidPitch(p0));
        }
        let params = self.desc.pitch;
        let mut state = self.initial;
        let mut top = p0;
        let mut prev = p0;
        let mut symbols = Vec::with_capacity(units.len());
        let mut pitch = Vec::with_capacity(units.len());
        for (position, unit) in units.iter().enumerate() {
            let tone = unit
                .tone
                .ok_or_else(|| FstError::UnknownSymbol("<missing tone>".into()))?;
            let t = self
                .select(state, unit, tone)
                .ok_or_else(|| FstError::NoTransition {
                    state: self.desc.states[state].clone(),
                    input: tone.to_string(),
                    position,
                })?;
            let value = match t.pitch_fn {
                PitchFn::Reset => {
                    top = p0;
                    p0
                }
                PitchFn::High => top,
                PitchFn::Downstep => {
                    top *= params.downstep;
                    top
                }
                PitchFn::Low => params.low * top,
                PitchFn::Upstep => params.upstep * prev,
                PitchFn::Same => prev,
            };
            symbols.push(t.out);
            pitch.push(value);
            prev = value;
            state = self.state_index[&t.to];
        }
        if !self.accepting[state] {
            return Err(FstError::NoTransition {
                state: self.desc.states[state].clone(),
                input: "<end>".into(),
                position: units.len(),
            });
        }
        let syllables = if units.iter().any(|u| u.syllable.is_some()) {
            units.iter().map(|u| u.syllable.clone()).collect()
        } else {
            Vec::new()
        };
        Ok(ToneRun {
            symbols,
            pitch,
            syllables,
            final_state: self.desc.states[state].clone(),
        })
    }

    /// Every lexical sequence whose forward image is `phonetic`, found by
    /// walking the transducer on its output side. Guarded transitions are
    /// not considered since a bare tone string carries no features.
    pub fn inverse(&self, phonetic: &[PhoneticTone]) -> BTreeSet<Vec<LexicalTone>> {
        let mut out = BTreeSet::new();
        let mut frontier: Vec<(usize, Vec<LexicalTone>)> = vec![(self.initial, Vec::new())];
        for sym in phonetic {
            let mut next = Vec::new();
            for (state, path) in &frontier {
                for &i in &self.outgoing[*state] {
                    let t = &self.desc.transitions[i];
                    if t.guard.is_none() && t.out == *sym {
                        let mut p = path.clone();
                        p.push(t.input);
                        next.push((self.state_index[&t.to], p));
                    }
                }
            }
            frontier = next;
        }
        for (state, path) in frontier {
            if self.accepting[state] {
                out.insert(path);
            }
        }
        out
    }
}

pub fn parse_lexical(text: &str) -> Result<Vec<LexicalTone>, FstError> {
    text.split_whitespace().map(str::parse).collect()
}

pub fn parse_phonetic(text: &str) -> Result<Vec<PhoneticTone>, FstError> {
    text.split_whitespace().map(str::parse).collect()
}
