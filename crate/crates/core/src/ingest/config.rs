use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use super::IngestError;
use crate::rfa::{EnvWindow, F0Params, F0Preset, RfaConfig, SpectrumMode};

pub fn load_config(path: impl AsRef<Path>) -> Result<RfaConfig, IngestError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
    parse_config(&text)
}

/// Parses `key=value` lines; `#` starts a comment. Missing keys keep their
/// defaults. `f0range` is applied before `f0min`/`f0max`, so explicit
/// bounds win wherever they appear.
pub fn parse_config(text: &str) -> Result<RfaConfig, IngestError> {
    let mut entries: Vec<(usize, String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| IngestError::ParseError {
                line,
                msg: format!("expected key=value, got `{content}`"),
            })?;
        entries.push((line, key.trim().to_string(), value.trim().to_string()));
    }
    entries.sort_by_key(|(_, k, _)| k != "f0range");

    let mut cfg = RfaConfig::default();
    let mut lines: HashMap<&str, usize> = HashMap::new();
    for (line, key, value) in &entries {
        let bad = |msg: &str| IngestError::BadValue {
            line: *line,
            key: key.clone(),
            value: value.clone(),
            msg: msg.to_string(),
        };
        let num = || {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad("not a number"))
        };
        let positive = || {
            num().and_then(|v| {
                if v > 0.0 {
                    Ok(v)
                } else {
                    Err(bad("must be positive"))
                }
            })
        };
        let count = || {
            value
                .parse::<usize>()
                .map_err(|_| bad("not a non-negative integer"))
        };
        let odd = || {
            count().and_then(|v| {
                if v % 2 == 1 {
                    Ok(v)
                } else {
                    Err(bad("must be odd"))
                }
            })
        };
        match key.as_str() {
            "envwin" => {
                let n = count()?;
                if n == 0 {
                    return Err(bad("must be at least 1"));
                }
                cfg.envelope.window = EnvWindow::Samples(n);
            }
            "envwin_ms" => cfg.envelope.window = EnvWindow::Millis(positive()?),
            "envmedianfilt" => cfg.envelope.medfilt = odd()?,
            "aemsmin" => cfg.lfs.fmin = positive()?,
            "aemsmax" => cfg.lfs.fmax = positive()?,
            "aemsmedfilt" => cfg.lfs.medfilt = odd()?,
            "spectrumpower" => cfg.lfs.power = positive()?,
            "spectrumpoly" => cfg.lfs.detrend_degree = count()?,
            "spectrummode" => {
                cfg.lfs.mode = match value.as_str() {
                    "reference" => SpectrumMode::Reference,
                    "simple" => SpectrumMode::Simple,
                    _ => return Err(bad("expected reference or simple")),
                }
            }
            "rhythmcount" => {
                cfg.rhythm_count = count()?;
                if cfg.rhythm_count == 0 {
                    return Err(bad("must be at least 1"));
                }
            }
            "f0range" => {
                let preset = F0Preset::from_str(value).map_err(|m| bad(&m))?;
                cfg.f0 = F0Params {
                    hop_ms: cfg.f0.hop_ms,
                    voicing_threshold: cfg.f0.voicing_threshold,
                    ..F0Params::preset(preset)
                };
            }
            "f0min" => cfg.f0.fmin = positive()?,
            "f0max" => cfg.f0.fmax = positive()?,
            "f0hop_ms" => cfg.f0.hop_ms = positive()?,
            "voicing" => {
                let v = num()?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(bad("must lie in [0, 1]"));
                }
                cfg.f0.voicing_threshold = v;
            }
            "histbin" => cfg.histogram.bin_width = positive()?,
            "histmin" => cfg.histogram.min = num()?,
            "histmax" => cfg.histogram.max = num()?,
            _ => {
                return Err(IngestError::UnknownKey {
                    line: *line,
                    key: key.clone(),
                })
            }
        }
        lines.insert(key.as_str(), *line);
    }

    let ordered = [
        ("aemsmax", cfg.lfs.fmin, cfg.lfs.fmax),
        ("f0max", cfg.f0.fmin, cfg.f0.fmax),
        ("histmax", cfg.histogram.min, cfg.histogram.max),
    ];
    for (key, lo, hi) in ordered {
        if hi <= lo {
            return Err(IngestError::BadValue {
                line: lines.get(key).copied().unwrap_or(0),
                key: key.to_string(),
                value: hi.to_string(),
                msg: format!("must exceed the lower bound {lo}"),
            });
        }
    }
    Ok(cfg)
}
