//! CSV / JSON serialization of result rows.
//!
//! All floating-point values are written with 12 significant digits in
//! scientific notation, so byte-identical output is a meaningful
//! determinism check.

use crate::config::{OutputFormat, Units};
use blockfade_core::BoundResult;
use serde::Serialize;
use std::io::Write;

pub const RATE_HEADER: &str = "snr_db,t,l,epsilon,kind,rate_nats,rate_bits,ci_low,ci_high,samples,seed";

/// 12 significant digits, scientific.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

#[derive(Debug, Clone, Serialize)]
pub struct RateRow {
    pub snr_db: String,
    pub t: u32,
    pub l: u32,
    pub epsilon: String,
    pub kind: &'static str,
    pub rate_nats: String,
    pub rate_bits: String,
    pub ci_low: String,
    pub ci_high: String,
    pub samples: u64,
    pub seed: u64,
}

impl RateRow {
    /// `epsilon_override` replaces the epsilon column (used by the
    /// error-probability figure, where ε is the computed quantity).
    pub fn new(r: &BoundResult, units: Units, run_seed: u64, epsilon_override: Option<f64>) -> Self {
        let ln2 = std::f64::consts::LN_2;
        let in_units = |nats: f64| match units {
            Units::Nats => nats,
            Units::Bits => nats / ln2,
        };
        let rate_u = in_units(r.rate);
        let ci_u = in_units(r.ci_half_width);
        RateRow {
            snr_db: sig12(10.0 * r.rho.log10()),
            t: r.t,
            l: r.l,
            epsilon: sig12(epsilon_override.unwrap_or(r.epsilon)),
            kind: r.kind.as_str(),
            rate_nats: sig12(r.rate),
            rate_bits: sig12(r.rate / ln2),
            ci_low: sig12(rate_u - ci_u),
            ci_high: sig12(rate_u + ci_u),
            samples: r.mc_meta.as_ref().map_or(0, |m| m.n_samples),
            seed: r.mc_meta.as_ref().map_or(run_seed, |m| m.seed),
        }
    }

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.snr_db,
            self.t,
            self.l,
            self.epsilon,
            self.kind,
            self.rate_nats,
            self.rate_bits,
            self.ci_low,
            self.ci_high,
            self.samples,
            self.seed
        )
    }
}

/// Writes rows with optional `# comment` header lines (CSV only).
pub fn write_rate_rows(
    w: &mut dyn Write,
    format: OutputFormat,
    comments: &[String],
    rows: &[RateRow],
) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => {
            for c in comments {
                writeln!(w, "# {c}")?;
            }
            writeln!(w, "{RATE_HEADER}")?;
            for row in rows {
                writeln!(w, "{}", row.csv_line())?;
            }
        }
        OutputFormat::Json => {
            let doc = serde_json::json!({
                "comments": comments,
                "rows": rows,
            });
            writeln!(w, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
    }
    Ok(())
}

pub const ALOHA_HEADER: &str =
    "snr_db,t,model,frame_n,payload_bits,devices,opt_slots,slot_len,p_success";

#[derive(Debug, Clone, Serialize)]
pub struct AlohaRow {
    pub snr_db: String,
    pub t: u32,
    pub model: &'static str,
    pub frame_n: u32,
    pub payload_bits: u32,
    pub devices: u32,
    pub opt_slots: u32,
    pub slot_len: u32,
    pub p_success: String,
}

pub fn write_aloha_rows(
    w: &mut dyn Write,
    format: OutputFormat,
    comments: &[String],
    rows: &[AlohaRow],
) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => {
            for c in comments {
                writeln!(w, "# {c}")?;
            }
            writeln!(w, "{ALOHA_HEADER}")?;
            for r in rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{}",
                    r.snr_db,
                    r.t,
                    r.model,
                    r.frame_n,
                    r.payload_bits,
                    r.devices,
                    r.opt_slots,
                    r.slot_len,
                    r.p_success
                )?;
            }
        }
        OutputFormat::Json => {
            let doc = serde_json::json!({
                "comments": comments,
                "rows": rows,
            });
            writeln!(w, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
    }
    Ok(())
}
