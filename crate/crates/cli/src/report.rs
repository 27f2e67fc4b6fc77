//! Trace CSVs, the run summary and the energy-versus-strings chart.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde::Serialize;
use wahtor::wahtor::{StrategyKind, TraceRecord};

pub const CSV_HEADER: &str =
    "strategy,outer_index,stage,cumulative_pauli_evals,energy_hartree,hamiltonian_word_count";

pub fn csv_row(r: &TraceRecord) -> String {
    format!(
        "{},{},{},{},{},{}",
        r.strategy,
        r.outer_index,
        r.stage,
        r.cumulative_pauli_evals,
        r.energy,
        r.hamiltonian_word_count
    )
}

/// Streams trace rows, flushing after each so a failed run leaves its prefix on disk.
pub struct CsvSink<W: Write> {
    out: W,
    error: Option<io::Error>,
}

impl<W: Write> CsvSink<W> {
    pub fn new(mut out: W) -> io::Result<Self> {
        writeln!(out, "{CSV_HEADER}")?;
        out.flush()?;
        Ok(Self { out, error: None })
    }

    pub fn push(&mut self, r: &TraceRecord) {
        if self.error.is_some() {
            return;
        }
        let res = writeln!(self.out, "{}", csv_row(r)).and_then(|_| self.out.flush());
        if let Err(e) = res {
            self.error = Some(e);
        }
    }

    pub fn finish(self) -> io::Result<W> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(self.out),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StrategySummary {
    pub strategy: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub first_vqe_energy: Option<f64>,
    pub final_energy: Option<f64>,
    pub total_pauli_evals: Option<u64>,
    pub trace_records: usize,
    pub termination: Option<String>,
    pub csv: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SectorEnergy {
    pub n_up: usize,
    pub n_dn: usize,
    pub energy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub system: String,
    pub seed: u64,
    pub count_gradients: bool,
    /// Lowest eigenvalue over all particle sectors, the floor for any ansatz state.
    pub exact_ground_energy: Option<f64>,
    pub exact_ground_sector: Option<SectorEnergy>,
    /// Lowest eigenvalue in the sector the input declares, when it declares one.
    pub declared_sector: Option<SectorEnergy>,
    pub strategies: Vec<StrategySummary>,
}

/// One curve of the chart: `(cumulative strings, energy)` points.
pub struct Series {
    pub strategy: StrategyKind,
    pub points: Vec<(u64, f64)>,
}

fn color(kind: StrategyKind) -> &'static str {
    match kind {
        StrategyKind::AdiabaticSd => "#d62728",
        StrategyKind::NaTrustRegion => "#1f77b4",
        StrategyKind::NaNewton => "#2ca02c",
        StrategyKind::NaBfgs => "#ff7f0e",
    }
}

/// Energy against log₁₀ of evaluated Pauli strings, one polyline per strategy and a
/// dashed line at the exact energy.
pub fn render_svg(series: &[Series], exact: Option<f64>, title: &str) -> String {
    const W: f64 = 800.0;
    const H: f64 = 500.0;
    const L: f64 = 80.0;
    const R: f64 = 200.0;
    const T: f64 = 40.0;
    const B: f64 = 60.0;
    let xs = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| (p.0.max(1) as f64).log10()));
    let ys = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .chain(exact);
    let (mut x0, mut x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
        (a.min(x), b.max(x))
    });
    let (mut y0, mut y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| {
        (a.min(y), b.max(y))
    });
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if !y0.is_finite() {
        (y0, y1) = (0.0, 1.0);
    }
    x0 = x0.floor();
    x1 = x1.ceil().max(x0 + 1.0);
    let pad = ((y1 - y0) * 0.05).max(1e-6);
    y0 -= pad;
    y1 += pad;
    let px = |x: f64| L + (x - x0) / (x1 - x0) * (W - L - R);
    let py = |y: f64| T + (y1 - y) / (y1 - y0) * (H - T - B);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        (L + W - R) / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{L}" y="{T}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - L - R,
        H - T - B
    );
    let mut decade = x0;
    while decade <= x1 + 1e-9 {
        let x = px(decade);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.1}" y1="{T}" x2="{x:.1}" y2="{}" stroke="#ddd"/>"##,
            H - B
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">1e{decade}</text>"#,
            H - B + 18.0
        );
        decade += 1.0;
    }
    for k in 0..=4 {
        let y = y0 + (y1 - y0) * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="end">{y:.4}</text>"#,
            L - 6.0,
            py(y) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">evaluated Pauli strings</text>"#,
        (L + W - R) / 2.0,
        H - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 {})">energy (Hartree)</text>"#,
        (T + H - B) / 2.0,
        (T + H - B) / 2.0
    );
    if let Some(e) = exact {
        let y = py(e);
        let _ = writeln!(
            s,
            r#"<line x1="{L}" y1="{y:.1}" x2="{}" y2="{y:.1}" stroke="black" stroke-dasharray="6 4"/>"#,
            W - R
        );
    }
    for (i, ser) in series.iter().enumerate() {
        let pts: Vec<String> = ser
            .points
            .iter()
            .map(|&(c, e)| format!("{:.1},{:.1}", px((c.max(1) as f64).log10()), py(e)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            color(ser.strategy),
            pts.join(" ")
        );
        let ly = T + 20.0 + 20.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="2"/>"#,
            W - R + 15.0,
            W - R + 40.0,
            color(ser.strategy)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            W - R + 46.0,
            ly + 4.0,
            ser.strategy
        );
    }
    if exact.is_some() {
        let ly = T + 20.0 + 20.0 * series.len() as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="black" stroke-dasharray="6 4"/>"#,
            W - R + 15.0,
            W - R + 40.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">exact</text>"#,
            W - R + 46.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
