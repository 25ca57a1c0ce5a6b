//! On-disk formats: code JSON, certificate JSON, and CSV emission with a
//! config-echoing comment header.

use anytime_core::bitlinalg::BitMatrix;
use anytime_core::code::{CodeParams, ToeplitzParityCheck};
use anytime_core::spectrum::{AnytimeCertificate, WeightSpectrum};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

pub const TOOL_VERSION: &str = concat!("anytime v", env!("CARGO_PKG_VERSION"));

/// Serialized TZ_p code: parity-check blocks H_1..H_T as hex rows.
/// The seed is stored for provenance only; loading uses the hex blocks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodeFile {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub seed: u64,
    #[serde(rename = "H")]
    pub blocks: Vec<Vec<String>>,
}

impl CodeFile {
    pub fn from_code(h: &ToeplitzParityCheck, p: f64, seed: u64) -> Self {
        CodeFile {
            n: h.params().n(),
            k: h.params().k(),
            p,
            horizon: h.params().horizon(),
            seed,
            blocks: h.blocks().iter().map(BitMatrix::to_hex_rows).collect(),
        }
    }

    pub fn to_code(&self) -> Result<ToeplitzParityCheck, String> {
        let params = CodeParams::new(self.n, self.k, self.horizon)
            .map_err(|e| format!("bad code parameters: {e}"))?;
        let blocks = self
            .blocks
            .iter()
            .map(|rows| {
                let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
                BitMatrix::from_hex_rows(&refs, self.n).map_err(|e| format!("bad hex block: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        ToeplitzParityCheck::from_blocks(params, blocks).map_err(|e| format!("bad code: {e}"))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("code serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("bad code file: {e}"))
    }
}

/// Certificate export with all inputs echoed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateFile {
    pub tool: String,
    pub config: String,
    pub n: usize,
    pub k: usize,
    pub alpha: f64,
    pub theta: f64,
    pub d_o: usize,
    pub d_max: usize,
    pub pass: bool,
    pub violations: Vec<String>,
    /// Smallest d_o that would pass at these (alpha, theta), if any.
    pub smallest_passing_d_o: Option<usize>,
    /// Per-delay minimum weights, delays 1..=d_max.
    pub w_min: Vec<Option<usize>>,
}

impl CertificateFile {
    pub fn new(
        cert: &AnytimeCertificate,
        spec: &WeightSpectrum,
        smallest: Option<usize>,
        config_echo: &str,
    ) -> Self {
        CertificateFile {
            tool: TOOL_VERSION.to_string(),
            config: config_echo.to_string(),
            n: spec.n(),
            k: spec.k(),
            alpha: cert.alpha,
            theta: cert.theta,
            d_o: cert.d_o,
            d_max: cert.d_max,
            pass: cert.pass,
            violations: cert.violations.iter().map(|v| v.to_string()).collect(),
            smallest_passing_d_o: smallest,
            w_min: (1..=spec.d_max()).map(|d| spec.w_min(d)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }
}

/// CSV builder: `#` comment header echoing tool version, subcommand and
/// full config, then a column-name line, then rows.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(subcommand: &str, config_echo: &str, columns: &[&str]) -> Self {
        let mut text = String::new();
        let _ = writeln!(text, "# {TOOL_VERSION} {subcommand}");
        let _ = writeln!(text, "# config: {config_echo}");
        Csv { text }.with_columns(columns)
    }

    fn with_columns(mut self, columns: &[&str]) -> Self {
        let _ = writeln!(self.text, "{}", columns.join(","));
        self
    }

    /// Extra `# key: value` metadata line (inserted before rows only if
    /// called before `row`; order of calls is the order on disk).
    pub fn comment(&mut self, line: &str) {
        // Keep comments after the column header simple: they are emitted
        // wherever the command places them.
        let _ = writeln!(self.text, "# {line}");
    }

    pub fn row(&mut self, fields: &[String]) {
        let _ = writeln!(self.text, "{}", fields.join(","));
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// Spectrum CSV: columns d, w, N_w.
pub fn spectrum_csv(spec: &WeightSpectrum, config_echo: &str) -> String {
    let mut csv = Csv::new("certify", config_echo, &["d", "w", "N_w"]);
    for d in 1..=spec.d_max() {
        for (&w, &count) in spec.counts(d) {
            csv.row(&[d.to_string(), w.to_string(), count.to_string()]);
        }
    }
    csv.finish()
}
