//! `prosody` command-line tool. Every subcommand prints JSON on stdout;
//! data errors exit with status 1 and the error name on stderr, usage
//! errors exit with status 2.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use prosody_core::ingest::{self, Annotation, DEFAULT_EXCLUDE};
use prosody_core::plot;
use prosody_core::rewrite::{self, ContextRule, IterationMode, ToneFst};
use prosody_core::rfa::{self, RfaConfig};
use prosody_core::stress::{self, Bracketing, StressRule, StressVector};
use prosody_core::timing;
use prosody_core::Error;

#[derive(Parser)]
#[command(
    name = "prosody",
    version,
    about = "Stress, tone, timing and rhythm formant analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    Subordinate,
    Metrical,
    Counter,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Nuclear,
    Compound,
}

impl From<Rule> for StressRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Nuclear => StressRule::Nuclear,
            Rule::Compound => StressRule::Compound,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    /// Mandarin T3 -> T2 / _ T3
    Tone3,
    /// Two-tone downstep transducer
    Downstep,
}

#[derive(Subcommand)]
enum Command {
    /// Stress indices for a bracketed phrase, e.g. "((big John)(saw (Tom's dog)))"
    Stress {
        bracketing: String,
        #[arg(long, value_enum, default_value = "nuclear")]
        rule: Rule,
        #[arg(long, value_enum, default_value = "subordinate")]
        algorithm: Algorithm,
    },
    /// Bracketing regenerated from stress numbers
    Invstress {
        #[arg(required = true)]
        numbers: Vec<u32>,
        /// Print the shift-reduce parse tree instead
        #[arg(long)]
        tree: bool,
    },
    /// Apply a tone rule or transducer forwards or backwards
    Sandhi {
        tones: Vec<String>,
        /// Context rule as JSON
        #[arg(long, conflicts_with_all = ["fst", "builtin"])]
        rule: Option<PathBuf>,
        /// Tone transducer as JSON
        #[arg(long, conflicts_with = "builtin")]
        fst: Option<PathBuf>,
        #[arg(long, value_enum)]
        builtin: Option<Builtin>,
        #[arg(long)]
        inverse: bool,
        /// Right-to-left iteration for context rules
        #[arg(long)]
        right_to_left: bool,
        /// Initial pitch (Hz) for transducer runs
        #[arg(long, default_value_t = 200.0)]
        p0: f64,
    },
    /// Pairwise variability indices of one annotation tier
    Pvi {
        annotation: PathBuf,
        #[arg(long)]
        tier: String,
        /// Labels to skip (replaces the default: empty and "sil")
        #[arg(long)]
        exclude: Vec<String>,
    },
    /// z-scored successive duration pairs of one tier
    Scatter {
        annotation: PathBuf,
        #[arg(long)]
        tier: String,
        #[arg(long)]
        exclude: Vec<String>,
        /// Write scatter.svg into this directory
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Rhythm formant analysis of WAV files
    Rfa {
        #[arg(required = true)]
        wavs: Vec<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write <stem>.svg per file into this directory
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Pearson's r between the AEMS and FEMS of a WAV file
    Correlate {
        wav: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Render a synthesis spec (JSON) to a 16-bit WAV file
    Synth { spec: PathBuf, out: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(json) => {
            emit(&json);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(1)
        }
    }
}

/// Prints to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("output types serialize")
}

fn run(cmd: Command) -> Result<String, Error> {
    match cmd {
        Command::Stress {
            bracketing,
            rule,
            algorithm,
        } => {
            let b = Bracketing::parse(&bracketing);
            let rule = rule.into();
            let v = match algorithm {
                Algorithm::Subordinate => stress::stress_subordinate(&b, rule)?,
                Algorithm::Metrical => stress::metrical_number(&b, rule)?.to_stress_vector(),
                Algorithm::Counter => stress::parenthesis_count(&b, rule)?,
            };
            Ok(to_json(&v))
        }
        Command::Invstress { numbers, tree } => {
            let v = StressVector::new(numbers);
            if tree {
                Ok(to_json(&stress::parse_numbers_to_tree(&v)?))
            } else {
                Ok(to_json(&stress::numbers_to_bracketing(&v)))
            }
        }
        Command::Sandhi {
            tones,
            rule,
            fst,
            builtin,
            inverse,
            right_to_left,
            p0,
        } => sandhi(&tones, rule, fst, builtin, inverse, right_to_left, p0),
        Command::Pvi {
            annotation,
            tier,
            exclude,
        } => {
            let d = load_durations(&annotation, &tier, &exclude)?;
            Ok(to_json(&timing::pvi_report(&d)?))
        }
        Command::Scatter {
            annotation,
            tier,
            exclude,
            plot: dir,
        } => {
            let d = load_durations(&annotation, &tier, &exclude)?;
            let data = timing::wagner_scatter(&d)?;
            if let Some(dir) = dir {
                let svg = plot::scatter_figure(&data).render()?;
                write_file(&dir, "scatter.svg", &svg)?;
            }
            Ok(to_json(&data))
        }
        Command::Rfa { wavs, config, plot } => rfa_batch(&wavs, config.as_deref(), plot.as_deref()),
        Command::Correlate { wav, config } => {
            let cfg = load_cfg(config.as_deref())?;
            let signal = ingest::load_wav(&wav)?;
            let a = rfa::analyze(&signal, &cfg)?;
            Ok(to_json(&serde_json::json!({ "pearson_r": a.pearson_r })))
        }
        Command::Synth { spec, out } => {
            let text = std::fs::read_to_string(&spec).map_err(|e| ingest::IngestError::Io {
                path: spec.display().to_string(),
                msg: e.to_string(),
            })?;
            let spec: rfa::SynthSpec = serde_json::from_str(&text)
                .map_err(|e| rfa::RfaError::InvalidParameters(format!("synthesis spec: {e}")))?;
            let signal = spec.synthesize()?;
            ingest::write_wav(&out, &signal)?;
            Ok(to_json(&serde_json::json!({
                "path": out.display().to_string(),
                "samples": signal.len(),
                "fs": signal.fs(),
                "duration_s": signal.duration_s(),
            })))
        }
    }
}

fn sandhi(
    tones: &[String],
    rule: Option<PathBuf>,
    fst: Option<PathBuf>,
    builtin: Option<Builtin>,
    inverse: bool,
    right_to_left: bool,
    p0: f64,
) -> Result<String, Error> {
    let text = tones.join(" ");
    let transducer = match (&fst, builtin) {
        (Some(path), _) => Some(ToneFst::load(path)?),
        (None, Some(Builtin::Downstep)) => Some(ToneFst::two_tone_downstep()),
        _ => None,
    };
    if let Some(t) = transducer {
        return if inverse {
            Ok(to_json(&t.inverse(&rewrite::parse_phonetic(&text)?)))
        } else {
            Ok(to_json(&t.forward(&rewrite::parse_lexical(&text)?, p0)?))
        };
    }
    let mut r = match rule {
        Some(path) => {
            let body = std::fs::read_to_string(&path).map_err(|e| ingest::IngestError::Io {
                path: path.display().to_string(),
                msg: e.to_string(),
            })?;
            let r: ContextRule = serde_json::from_str(&body)
                .map_err(|e| rewrite::FstError::InvalidRule(e.to_string()))?;
            r.validate()?;
            r
        }
        None => ContextRule::mandarin_tone3(),
    };
    if right_to_left {
        r = r.with_mode(IterationMode::RightToLeft);
    }
    let symbols = rewrite::symbols(&text);
    if inverse {
        for s in &symbols {
            if !r.alphabet.contains(s) {
                return Err(rewrite::FstError::UnknownSymbol(s.clone()).into());
            }
        }
        Ok(to_json(&r.apply_inverse(&symbols)))
    } else {
        Ok(to_json(&r.apply_forward(&symbols)?))
    }
}

fn load_durations(
    path: &Path,
    tier: &str,
    exclude: &[String],
) -> Result<timing::DurationVector, Error> {
    let a = Annotation::load(path)?;
    let labels: Vec<&str> = if exclude.is_empty() {
        DEFAULT_EXCLUDE.to_vec()
    } else {
        exclude.iter().map(String::as_str).collect()
    };
    Ok(ingest::durations(&a, tier, &labels)?)
}

fn load_cfg(path: Option<&Path>) -> Result<RfaConfig, Error> {
    Ok(match path {
        Some(p) => ingest::load_config(p)?,
        None => RfaConfig::default(),
    })
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<(), Error> {
    let io = |e: std::io::Error| ingest::IngestError::Io {
        path: dir.join(name).display().to_string(),
        msg: e.to_string(),
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(dir.join(name), body).map_err(io)?;
    Ok(())
}

#[derive(Serialize)]
struct FileReport {
    file: String,
    report: rfa::RfaReport,
}

fn analyze_file(
    wav: &Path,
    cfg: &RfaConfig,
    plot_dir: Option<&Path>,
) -> Result<rfa::RfaReport, Error> {
    let signal = ingest::load_wav(wav)?;
    let a = rfa::analyze(&signal, cfg)?;
    if let Some(dir) = plot_dir {
        let rectified: Vec<f64> = signal.samples().iter().map(|x| x.abs()).collect();
        let raw = rfa::lf_spectrum(&rectified, signal.fs(), &cfg.lfs).ok();
        let svg = plot::rfa_figure(&signal, &a, raw.as_ref()).render()?;
        let stem = wav
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "rfa".into());
        write_file(dir, &format!("{stem}.svg"), &svg)?;
    }
    Ok(a.report())
}

/// Files are analysed in parallel; output order follows the arguments.
fn rfa_batch(
    wavs: &[PathBuf],
    config: Option<&Path>,
    plot_dir: Option<&Path>,
) -> Result<String, Error> {
    let cfg = load_cfg(config)?;
    let results: Vec<Result<rfa::RfaReport, Error>> = wavs
        .par_iter()
        .map(|w| analyze_file(w, &cfg, plot_dir))
        .collect();
    if wavs.len() == 1 {
        return results
            .into_iter()
            .next()
            .expect("one result")
            .map(|r| to_json(&r));
    }
    let mut reports = Vec::new();
    let mut first_error = None;
    for (w, r) in wavs.iter().zip(results) {
        match r {
            Ok(report) => reports.push(FileReport {
                file: w.display().to_string(),
                report,
            }),
            Err(e) => {
                eprintln!("error: {}: {}: {e}", w.display(), e.name());
                first_error.get_or_insert(e);
            }
        }
    }
    match first_error {
        // partial results still go to stdout
        Some(e) => {
            emit(&to_json(&reports));
            Err(e)
        }
        None => Ok(to_json(&reports)),
    }
}
