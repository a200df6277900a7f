//! SVG figures.
//!
//! A [`PlotSpec`] is a grid of panels, one `<g class="row">` per row. The
//! rhythm-analysis figure follows a four-row layout: waveform, amplitude
//! envelope, F0 modulation, and F0 track beside the formant histogram.
//! Spectrum panels mark formants with vertical `rhythm-bar` lines whose
//! height is the formant magnitude.

use std::fmt::Write as _;

use thiserror::Error;

use crate::rfa::{HistBin, LfSpectrum, RFormant, RfaAnalysis, Signal};
use crate::timing::ScatterData;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlotError {
    #[error("a plot needs at least one panel")]
    NoPanels,
}

impl PlotError {
    pub fn name(&self) -> &'static str {
        match self {
            PlotError::NoPanels => "NoPanels",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub class: &'static str,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PanelKind {
    Lines {
        series: Vec<Series>,
        y_range: Option<(f64, f64)>,
    },
    Spectrum {
        freqs: Vec<f64>,
        mags: Vec<f64>,
        bars: Vec<(f64, f64)>,
    },
    Histogram {
        bins: Vec<HistBin>,
    },
    Scatter {
        points: Vec<(f64, f64)>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub kind: PanelKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub width: f64,
    pub row_height: f64,
    pub font_size: f64,
    pub rows: Vec<Vec<Panel>>,
}

const MARGIN: f64 = 40.0;
const TITLE_GAP: f64 = 18.0;

impl PlotSpec {
    pub fn new(rows: Vec<Vec<Panel>>) -> Self {
        PlotSpec {
            width: 1200.0,
            row_height: 260.0,
            font_size: 11.0,
            rows,
        }
    }

    pub fn panel_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn render(&self) -> Result<String, PlotError> {
        if self.panel_count() == 0 {
            return Err(PlotError::NoPanels);
        }
        let height = self.row_height * self.rows.len() as f64;
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="{fs}">"#,
            w = self.width,
            h = height,
            fs = self.font_size
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        for (r, row) in self.rows.iter().enumerate() {
            let _ = writeln!(out, r#"<g class="row" data-row="{}">"#, r + 1);
            let cell_w = self.width / row.len().max(1) as f64;
            for (c, panel) in row.iter().enumerate() {
                let frame = Frame {
                    x: c as f64 * cell_w + MARGIN,
                    y: r as f64 * self.row_height + MARGIN / 2.0 + TITLE_GAP,
                    w: cell_w - 1.5 * MARGIN,
                    h: self.row_height - MARGIN - TITLE_GAP - 10.0,
                };
                render_panel(&mut out, panel, &frame, self.font_size);
            }
            out.push_str("</g>\n");
        }
        out.push_str("</svg>\n");
        Ok(out)
    }
}

struct Frame {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

impl Frame {
    fn map(&self, (x, y): (f64, f64), xr: (f64, f64), yr: (f64, f64)) -> (f64, f64) {
        let fx = if xr.1 > xr.0 {
            (x - xr.0) / (xr.1 - xr.0)
        } else {
            0.5
        };
        let fy = if yr.1 > yr.0 {
            (y - yr.0) / (yr.1 - yr.0)
        } else {
            0.5
        };
        (self.x + fx * self.w, self.y + self.h - fy * self.h)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 1.0)
    }
}

fn polyline(out: &mut String, class: &str, color: &str, pts: impl Iterator<Item = (f64, f64)>) {
    let mut coords = String::new();
    for (x, y) in pts {
        let _ = write!(coords, "{x:.2},{y:.2} ");
    }
    let _ = writeln!(
        out,
        r#"<polyline class="{class}" fill="none" stroke="{color}" stroke-width="1" points="{}"/>"#,
        coords.trim_end()
    );
}

fn render_panel(out: &mut String, panel: &Panel, f: &Frame, font: f64) {
    let _ = writeln!(out, r#"<g class="panel">"#);
    let _ = writeln!(
        out,
        r#"<text class="title" x="{:.2}" y="{:.2}">{}</text>"#,
        f.x,
        f.y - 6.0,
        escape(&panel.title)
    );
    let _ = writeln!(
        out,
        r##"<rect class="frame" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#888"/>"##,
        f.x, f.y, f.w, f.h
    );
    let xr = match &panel.kind {
        PanelKind::Lines { series, y_range } => {
            let xr = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
            let yr = y_range
                .unwrap_or_else(|| range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1))));
            for s in series {
                polyline(
                    out,
                    s.class,
                    s.color,
                    s.points.iter().map(|&p| f.map(p, xr, yr)),
                );
            }
            xr
        }
        PanelKind::Spectrum { freqs, mags, bars } => {
            let xr = range(freqs.iter().copied());
            let yr = (0.0, 1.0);
            polyline(
                out,
                "spectrum",
                "blue",
                freqs.iter().zip(mags).map(|(&x, &y)| f.map((x, y), xr, yr)),
            );
            for &(freq, mag) in bars {
                let (x0, y0) = f.map((freq, 0.0), xr, yr);
                let (_, y1) = f.map((freq, mag), xr, yr);
                let _ = writeln!(
                    out,
                    r#"<line class="rhythm-bar" x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}" stroke="red" stroke-width="2"/>"#
                );
            }
            xr
        }
        PanelKind::Histogram { bins } => {
            let xr = range(bins.iter().flat_map(|b| [b.lo, b.hi]));
            let top = bins.iter().map(|b| b.weight).fold(0.0, f64::max);
            let yr = (0.0, if top > 0.0 { top } else { 1.0 });
            for b in bins {
                let (x0, y0) = f.map((b.lo, 0.0), xr, yr);
                let (x1, y1) = f.map((b.hi, b.weight), xr, yr);
                let _ = writeln!(
                    out,
                    r#"<rect class="hist-bar" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="steelblue" stroke="white"/>"#,
                    x0,
                    y1,
                    (x1 - x0).max(0.0),
                    (y0 - y1).max(0.0)
                );
            }
            xr
        }
        PanelKind::Scatter { points } => {
            let lim = points
                .iter()
                .map(|p| p.0.abs().max(p.1.abs()))
                .fold(1.0, f64::max)
                * 1.1;
            let r = (-lim, lim);
            let (cx, top) = f.map((0.0, lim), r, r);
            let (_, bottom) = f.map((0.0, -lim), r, r);
            let (left, cy) = f.map((-lim, 0.0), r, r);
            let (right, _) = f.map((lim, 0.0), r, r);
            let _ = writeln!(
                out,
                r#"<line class="quadrant" x1="{cx:.2}" y1="{top:.2}" x2="{cx:.2}" y2="{bottom:.2}" stroke="gray"/>"#
            );
            let _ = writeln!(
                out,
                r#"<line class="quadrant" x1="{left:.2}" y1="{cy:.2}" x2="{right:.2}" y2="{cy:.2}" stroke="gray"/>"#
            );
            for &p in points {
                let (x, y) = f.map(p, r, r);
                let _ = writeln!(
                    out,
                    r#"<circle class="point" cx="{x:.2}" cy="{y:.2}" r="3" fill="black"/>"#
                );
            }
            r
        }
    };
    let _ = writeln!(
        out,
        r#"<text class="axis" x="{:.2}" y="{:.2}">{:.2}</text>"#,
        f.x,
        f.y + f.h + font + 2.0,
        xr.0
    );
    let _ = writeln!(
        out,
        r#"<text class="axis" x="{:.2}" y="{:.2}" text-anchor="end">{:.2} {}</text>"#,
        f.x + f.w,
        f.y + f.h + font + 2.0,
        xr.1,
        escape(&panel.x_label)
    );
    out.push_str("</g>\n");
}

/// Reduces a long trace to at most `buckets` min/max pairs, preserving its
/// visual outline.
pub fn downsample(values: &[f64], rate: f64, buckets: usize) -> Vec<(f64, f64)> {
    if values.len() <= 2 * buckets.max(1) {
        return values
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as f64 / rate, v))
            .collect();
    }
    let size = values.len().div_ceil(buckets);
    let mut out = Vec::with_capacity(2 * buckets);
    for (b, chunk) in values.chunks(size).enumerate() {
        let t = (b * size) as f64 / rate;
        let (lo, hi) = range(chunk.iter().copied());
        out.push((t, lo));
        out.push((t, hi));
    }
    out
}

fn bars(formants: &[RFormant]) -> Vec<(f64, f64)> {
    formants.iter().map(|f| (f.freq, f.mag)).collect()
}

fn spectrum_panel(title: &str, sp: &LfSpectrum, formants: &[RFormant]) -> Panel {
    Panel {
        title: title.to_string(),
        x_label: "Hz".into(),
        kind: PanelKind::Spectrum {
            freqs: sp.freqs.clone(),
            mags: sp.mags.clone(),
            bars: bars(formants),
        },
    }
}

/// The four-row rhythm-analysis figure. `raw` is the low-frequency
/// spectrum of the rectified waveform, shown beside it when given.
pub fn rfa_figure(s: &Signal, a: &RfaAnalysis, raw: Option<&LfSpectrum>) -> PlotSpec {
    const BUCKETS: usize = 1500;
    let wave = downsample(s.samples(), s.fs(), BUCKETS);
    let rectified: Vec<f64> = s.samples().iter().map(|x| x.abs()).collect();
    let rect = downsample(&rectified, s.fs(), BUCKETS);
    let env = downsample(&a.envelope.values, a.envelope.fs, BUCKETS);

    let mut row1 = vec![Panel {
        title: "Waveform, rectified waveform and envelope".into(),
        x_label: "s".into(),
        kind: PanelKind::Lines {
            series: vec![
                Series {
                    class: "waveform",
                    color: "blue",
                    points: wave,
                },
                Series {
                    class: "rectified",
                    color: "lightblue",
                    points: rect,
                },
                Series {
                    class: "envelope",
                    color: "red",
                    points: env.clone(),
                },
            ],
            y_range: Some((-1.0, 1.1)),
        },
    }];
    if let Some(sp) = raw {
        row1.push(spectrum_panel("LFS of rectified waveform", sp, &[]));
    }
    let row2 = vec![
        Panel {
            title: "AEM (peak-picking envelope)".into(),
            x_label: "s".into(),
            kind: PanelKind::Lines {
                series: vec![Series {
                    class: "envelope",
                    color: "red",
                    points: env,
                }],
                y_range: Some((0.0, 1.0)),
            },
        },
        spectrum_panel("AEMS with rhythm bars", &a.aems, &a.formants_am),
    ];
    let times = a.f0.times();
    let fem: Vec<(f64, f64)> = times.iter().copied().zip(a.f0.modulation()).collect();
    let row3 = vec![
        Panel {
            title: "FEM (F0 minus its mean, Hz)".into(),
            x_label: "s".into(),
            kind: PanelKind::Lines {
                series: vec![Series {
                    class: "fem",
                    color: "green",
                    points: fem,
                }],
                y_range: None,
            },
        },
        spectrum_panel("FEMS with rhythm bars", &a.fems, &a.formants_fm),
    ];
    let voiced: Vec<(f64, f64)> = times
        .iter()
        .zip(&a.f0.values)
        .zip(&a.f0.voiced)
        .filter(|(_, v)| **v)
        .map(|((t, f), _)| (*t, *f))
        .collect();
    let track: Vec<(f64, f64)> = times
        .iter()
        .copied()
        .zip(a.f0.values.iter().copied())
        .collect();
    let row4 = vec![
        Panel {
            title: "F0 track (Hz; filled gaps in grey)".into(),
            x_label: "s".into(),
            kind: PanelKind::Lines {
                series: vec![
                    Series {
                        class: "f0-filled",
                        color: "grey",
                        points: track,
                    },
                    Series {
                        class: "f0-voiced",
                        color: "black",
                        points: voiced,
                    },
                ],
                y_range: Some((a.f0.fmin, a.f0.fmax)),
            },
        },
        Panel {
            title: "R-formant histogram".into(),
            x_label: "Hz".into(),
            kind: PanelKind::Histogram {
                bins: a.histogram.bins.clone(),
            },
        },
    ];
    PlotSpec::new(vec![row1, row2, row3, row4])
}

/// Successive z-scored durations with quadrant lines through the origin.
pub fn scatter_figure(d: &ScatterData) -> PlotSpec {
    let mut spec = PlotSpec::new(vec![vec![Panel {
        title: format!("Duration pairs, tier {}", d.tier),
        x_label: "z(d_i)".into(),
        kind: PanelKind::Scatter {
            points: d.pairs.clone(),
        },
    }]]);
    spec.width = 520.0;
    spec.row_height = 520.0;
    spec
}
