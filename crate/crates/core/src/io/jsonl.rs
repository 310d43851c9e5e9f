use std::io::{BufRead, Write};

use crate::io::fmt_sig9;
use crate::{CoreError, ModalityDims, Result, Template};

/// One JSON object on one line; fields in a fixed order and floats with
/// 9 significant digits so the output is byte-stable.
pub fn template_to_jsonl(t: &Template) -> String {
    let mut line = String::with_capacity(t.vector.len() * 12 + 128);
    line.push_str("{\"subject_id\":");
    line.push_str(&json_str(&t.subject_id));
    line.push_str(",\"media_id\":");
    line.push_str(&json_str(&t.media_id));
    line.push_str(",\"modality\":\"");
    line.push_str(t.modality.as_str());
    line.push_str("\",\"vector\":[");
    for (i, x) in t.vector.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        line.push_str(&fmt_sig9(*x));
    }
    line.push_str("],\"quality\":");
    line.push_str(&fmt_sig9(t.quality));
    line.push_str(",\"range_class\":\"");
    line.push_str(t.range_class.as_str());
    line.push_str("\"}");
    line
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization cannot fail")
}

pub fn write_templates_jsonl<W: Write>(mut w: W, templates: &[Template]) -> Result<()> {
    for t in templates {
        writeln!(w, "{}", template_to_jsonl(t))?;
    }
    Ok(())
}

/// Parses and validates JSON-Lines templates. Blank lines are skipped;
/// errors carry the 1-based line number.
pub fn parse_templates_jsonl(text: &str, dims: &ModalityDims) -> Result<Vec<Template>> {
    read_templates_jsonl(text.as_bytes(), dims)
}

pub fn read_templates_jsonl<R: BufRead>(r: R, dims: &ModalityDims) -> Result<Vec<Template>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let t: Template = serde_json::from_str(&line).map_err(|e| CoreError::Schema {
            line: lineno,
            message: e.to_string(),
        })?;
        t.validate(dims).map_err(|e| CoreError::Schema {
            line: lineno,
            message: e.to_string(),
        })?;
        out.push(t);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Modality, RangeClass};

    #[test]
    fn line_layout_is_fixed() {
        let t = Template {
            subject_id: "a\"b".into(),
            media_id: "m1".into(),
            modality: Modality::Gait,
            vector: vec![0.6, -0.8],
            quality: 1.0,
            range_class: RangeClass::Close,
        };
        assert_eq!(
            template_to_jsonl(&t),
            r#"{"subject_id":"a\"b","media_id":"m1","modality":"gait","vector":[0.6,-0.8],"quality":1,"range_class":"close"}"#
        );
    }

    #[test]
    fn schema_errors_name_the_line() {
        let dims = ModalityDims::uniform(2);
        let text = concat!(
            r#"{"subject_id":"a","media_id":"m","modality":"face","vector":[1,0],"quality":0.5,"range_class":"close"}"#,
            "\n\n",
            r#"{"subject_id":"a","media_id":"m","modality":"face","vector":[1,0,0],"quality":0.5,"range_class":"close"}"#,
        );
        match parse_templates_jsonl(text, &dims) {
            Err(CoreError::Schema { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_input_is_empty_store() {
        assert!(parse_templates_jsonl("", &ModalityDims::default()).unwrap().is_empty());
    }
}
