use std::io::{Read, Write};

use crate::io::fmt_sig9;
use crate::{is_missing, CoreError, Modality, Result, ScoreMatrix, MISSING};

pub const SCORES_HEADER: [&str; 6] = ["probe_id", "gallery_id", "face", "gait", "body", "fused"];

/// One row per (probe, gallery identity). Absent or MISSING scores are
/// written as empty cells.
pub fn write_scores_csv<W: Write>(w: W, matrices: &[ScoreMatrix]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(SCORES_HEADER).map_err(csv_err)?;
    for s in matrices {
        for (g, gid) in s.gallery_ids.iter().enumerate() {
            let mut rec = vec![s.probe_id.clone(), gid.clone()];
            for m in Modality::ALL {
                rec.push(s.score(g, m).map(fmt_sig9).unwrap_or_default());
            }
            let fused = s.fused.as_ref().map(|f| f[g]).filter(|x| !is_missing(*x));
            rec.push(fused.map(fmt_sig9).unwrap_or_default());
            wr.write_record(&rec).map_err(csv_err)?;
        }
    }
    wr.flush()?;
    Ok(())
}

/// Groups rows by probe id in first-appearance order. A modality column is
/// kept for a probe when at least one of its cells is non-empty; the fused
/// column is kept when every cell of that probe is non-empty.
pub fn read_scores_csv<R: Read>(r: R) -> Result<Vec<ScoreMatrix>> {
    let mut rd = csv::Reader::from_reader(r);
    let header = rd.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != SCORES_HEADER {
        return Err(CoreError::Format(format!(
            "scores.csv header must be {}",
            SCORES_HEADER.join(",")
        )));
    }
    struct Rows {
        probe: String,
        gallery: Vec<String>,
        cells: Vec<[f64; 4]>,
    }
    let mut groups: Vec<Rows> = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = i + 2;
        let probe = rec[0].to_string();
        let mut cells = [MISSING; 4];
        for (k, cell) in cells.iter_mut().enumerate() {
            let raw = rec[2 + k].trim();
            if !raw.is_empty() {
                *cell = raw.parse().map_err(|_| CoreError::Schema {
                    line,
                    message: format!("bad score {raw:?}"),
                })?;
            }
        }
        match groups.last_mut() {
            Some(g) if g.probe == probe => {
                g.gallery.push(rec[1].to_string());
                g.cells.push(cells);
            }
            _ => {
                if groups.iter().any(|g| g.probe == probe) {
                    return Err(CoreError::Schema {
                        line,
                        message: format!("rows of probe {probe:?} are not contiguous"),
                    });
                }
                groups.push(Rows {
                    probe,
                    gallery: vec![rec[1].to_string()],
                    cells: vec![cells],
                });
            }
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let modalities: Vec<Modality> = Modality::ALL
                .into_iter()
                .filter(|m| g.cells.iter().any(|c| !is_missing(c[m.index()])))
                .collect();
            let scores = g
                .cells
                .iter()
                .flat_map(|c| modalities.iter().map(move |m| c[m.index()]))
                .collect();
            let mut s = ScoreMatrix::new(g.probe, g.gallery, modalities, scores)?;
            if g.cells.iter().all(|c| !is_missing(c[3])) {
                s.fused = Some(g.cells.iter().map(|c| c[3]).collect());
            }
            Ok(s)
        })
        .collect()
}

fn csv_err(e: csv::Error) -> CoreError {
    CoreError::Format(e.to_string())
}
