//! `batch.jsonl` reader: one exemplar per line, either as an embedding
//! (`vector`) or, for probes, as a precomputed row of scores against the
//! gallery lines in file order (`score_row`).

use std::io::BufRead;

use lrid_core::RangeClass;
use serde::Deserialize;

use crate::{cosine_table, BatchPartition, LossError, MatedProbe, Result, ScoreTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Gallery,
    Probe,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchLine {
    pub subject_id: String,
    pub split: Split,
    #[serde(default)]
    pub vector: Option<Vec<f64>>,
    #[serde(default)]
    pub score_row: Option<Vec<f64>>,
    pub range_class: RangeClass,
}

#[derive(Debug, Clone)]
pub struct BatchInput {
    pub partition: BatchPartition,
    pub lines: Vec<BatchLine>,
}

pub fn read_batch<R: BufRead>(r: R) -> Result<BatchInput> {
    let mut lines = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| LossError::Partition(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: BatchLine = serde_json::from_str(&line)
            .map_err(|e| LossError::Partition(format!("line {}: {e}", i + 1)))?;
        lines.push(parsed);
    }
    build_partition(lines)
}

fn build_partition(lines: Vec<BatchLine>) -> Result<BatchInput> {
    let gallery: Vec<&BatchLine> = lines.iter().filter(|l| l.split == Split::Gallery).collect();
    let probes: Vec<&BatchLine> = lines.iter().filter(|l| l.split == Split::Probe).collect();
    let gallery_ids: Vec<String> = gallery.iter().map(|l| l.subject_id.clone()).collect();
    for (i, id) in gallery_ids.iter().enumerate() {
        if gallery_ids[..i].contains(id) {
            return Err(LossError::Partition(format!("gallery subject {id} appears twice")));
        }
    }
    let all_vectors = probes.iter().all(|p| p.vector.is_some());
    let scores = if all_vectors && gallery.iter().all(|g| g.vector.is_some()) {
        let pv: Vec<Vec<f64>> = probes.iter().map(|p| p.vector.clone().unwrap()).collect();
        let gv: Vec<Vec<f64>> = gallery.iter().map(|g| g.vector.clone().unwrap()).collect();
        cosine_table(&pv, &gv)?
    } else {
        let rows: Vec<Vec<f64>> = probes
            .iter()
            .map(|p| {
                p.score_row.clone().ok_or_else(|| {
                    LossError::Partition(format!(
                        "probe of {} needs a score_row when gallery lines lack vectors",
                        p.subject_id
                    ))
                })
            })
            .collect::<Result<_>>()?;
        if rows.iter().any(|r| r.len() != gallery_ids.len()) {
            return Err(LossError::Shape("score_row length must equal gallery size".into()));
        }
        let mut table = ScoreTable::from_rows(&rows)?;
        table.cols = gallery_ids.len();
        table
    };
    let mut mated = Vec::new();
    let mut non_mated = Vec::new();
    for (row, p) in probes.iter().enumerate() {
        match gallery_ids.iter().position(|g| *g == p.subject_id) {
            Some(col) => mated.push(MatedProbe {
                probe: row,
                gallery: col,
            }),
            None => non_mated.push(row),
        }
    }
    let probe_subjects = probes.iter().map(|p| p.subject_id.clone()).collect();
    let partition = BatchPartition::new(gallery_ids, probe_subjects, mated, non_mated, scores)?;
    Ok(BatchInput { partition, lines })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectors_and_score_rows() {
        let text = r#"{"subject_id":"a","split":"gallery","vector":[1,0],"range_class":"close"}
{"subject_id":"b","split":"gallery","vector":[0,1],"range_class":"close"}
{"subject_id":"a","split":"probe","vector":[2,0],"range_class":"long"}
{"subject_id":"c","split":"probe","vector":[1,1],"range_class":"long"}
"#;
        let b = read_batch(text.as_bytes()).unwrap();
        assert_eq!(b.partition.mated, vec![MatedProbe { probe: 0, gallery: 0 }]);
        assert_eq!(b.partition.non_mated, vec![1]);
        assert!((b.partition.scores.get(0, 0) - 1.0).abs() < 1e-15);

        let text = r#"{"subject_id":"a","split":"gallery","range_class":"close"}
{"subject_id":"a","split":"probe","score_row":[0.8],"range_class":"long"}
{"subject_id":"z","split":"probe","score_row":[0.1],"range_class":"long"}
"#;
        let b = read_batch(text.as_bytes()).unwrap();
        assert_eq!(b.partition.scores.data, vec![0.8, 0.1]);
    }

    #[test]
    fn bad_line_is_reported() {
        let err = read_batch(&b"{\"subject_id\":1}\n"[..]).unwrap_err();
        assert!(err.to_string().contains("line 1"));
    }
}
