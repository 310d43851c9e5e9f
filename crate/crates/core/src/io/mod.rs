//! File formats: JSON-Lines and packed binary template stores, and the
//! per-pair `scores.csv` table.

mod binary;
mod jsonl;
mod scores_csv;

pub use binary::{
    deserialize_template, payload_len, read_store, serialize_template, template_payload,
    write_store, STORE_MAGIC,
};
pub use jsonl::{parse_templates_jsonl, read_templates_jsonl, template_to_jsonl, write_templates_jsonl};
pub use scores_csv::{read_scores_csv, write_scores_csv, SCORES_HEADER};

/// Formats a float with 9 significant digits, `%g` style: fixed notation
/// for moderate exponents, scientific otherwise, trailing zeros trimmed.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
