use std::io::Write;

use lrid_core::io::fmt_sig9;
use serde::{Deserialize, Serialize};

use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportCounts {
    pub gallery_size: usize,
    pub distractors: usize,
    pub mated_probes: usize,
    pub non_mated_probes: usize,
}

/// One (source, metric) measurement. `source` is a modality name or
/// `"fused"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub source: String,
    pub metric: String,
    pub target: Option<f64>,
    pub value: f64,
    pub threshold: Option<f64>,
    pub mated_searches: usize,
    pub non_mated_searches: usize,
    pub genuine_pairs: usize,
    pub impostor_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub counts: ReportCounts,
    pub rows: Vec<MetricRow>,
}

impl EvalReport {
    pub fn find(&self, source: &str, metric: &str) -> Option<&MetricRow> {
        self.rows
            .iter()
            .find(|r| r.source == source && r.metric == metric)
    }

    pub fn sources(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.source.as_str()) {
                out.push(&r.source);
            }
        }
        out
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| std::io::Error::other(e.to_string());
        wr.write_record([
            "source",
            "metric",
            "target",
            "value",
            "threshold",
            "mated_searches",
            "non_mated_searches",
            "genuine_pairs",
            "impostor_pairs",
        ])
        .map_err(io)?;
        for r in &self.rows {
            let opt = |x: Option<f64>| x.map(fmt_sig9).unwrap_or_default();
            wr.write_record([
                r.source.clone(),
                r.metric.clone(),
                opt(r.target),
                fmt_sig9(r.value),
                opt(r.threshold),
                r.mated_searches.to_string(),
                r.non_mated_searches.to_string(),
                r.genuine_pairs.to_string(),
                r.impostor_pairs.to_string(),
            ])
            .map_err(io)?;
        }
        wr.flush()?;
        Ok(())
    }
}
