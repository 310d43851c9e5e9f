use serde::{Deserialize, Serialize};

use crate::{iou, linear_assignment, BBox, Result, TrackError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackState {
    Active,
    Lost,
    Removed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub track_id: u64,
    /// Last observed box.
    pub bbox: BBox,
    /// Per-frame change of (x, y, w, h).
    pub velocity: [f64; 4],
    pub state: TrackState,
    pub frames_since_update: u64,
    pub last_update: u64,
    pub history: Vec<(u64, BBox)>,
}

impl Track {
    /// Constant-velocity prediction of the box at `frame`.
    pub fn predict(&self, frame: u64) -> BBox {
        let dt = frame.saturating_sub(self.last_update) as f64;
        let b = self.bbox.as_array();
        let mut p = [0.0; 4];
        for k in 0..4 {
            p[k] = b[k] + self.velocity[k] * dt;
        }
        // keep the size positive so IoU stays defined
        p[2] = p[2].max(1e-6);
        p[3] = p[3].max(1e-6);
        BBox::from_array(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ByteTrackConfig {
    pub tau_high: f64,
    pub tau_low: f64,
    pub iou_min: f64,
    /// Unmatched frames tolerated before a track becomes lost.
    pub patience: u64,
    /// Unmatched frames after which a track is removed.
    pub max_age: u64,
}

impl Default for ByteTrackConfig {
    fn default() -> Self {
        Self {
            tau_high: 0.6,
            tau_low: 0.1,
            iou_min: 0.2,
            patience: 1,
            max_age: 30,
        }
    }
}

impl ByteTrackConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.tau_low && self.tau_low < self.tau_high && self.tau_high <= 1.0) {
            return Err(TrackError::Config("need 0 <= tau_low < tau_high <= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.iou_min) {
            return Err(TrackError::Config("iou_min must lie in [0, 1]".into()));
        }
        if self.max_age < self.patience {
            return Err(TrackError::Config("max_age must be >= patience".into()));
        }
        Ok(())
    }
}

/// Two-stage confidence-bucketed tracker for one video stream. Lost tracks
/// are kept until `max_age` but take no part in association.
#[derive(Debug, Clone)]
pub struct Tracker {
    pub config: ByteTrackConfig,
    pub video_id: String,
    pub tracks: Vec<Track>,
    next_id: u64,
    last_frame: Option<u64>,
}

impl Tracker {
    pub fn new(video_id: impl Into<String>, config: ByteTrackConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            video_id: video_id.into(),
            tracks: Vec::new(),
            next_id: 1,
            last_frame: None,
        })
    }

    fn match_stage(&self, frame: u64, track_idx: &[usize], dets: &[(BBox, f64)], det_idx: &[usize]) -> Vec<(usize, usize)> {
        if track_idx.is_empty() || det_idx.is_empty() {
            return Vec::new();
        }
        let cost: Vec<Vec<f64>> = track_idx
            .iter()
            .map(|&t| {
                let pred = self.tracks[t].predict(frame);
                det_idx
                    .iter()
                    .map(|&d| {
                        let o = iou(&pred, &dets[d].0);
                        if o >= self.config.iou_min && o > 0.0 {
                            1.0 - o
                        } else {
                            f64::INFINITY
                        }
                    })
                    .collect()
            })
            .collect();
        linear_assignment(&cost)
            .into_iter()
            .map(|(r, c)| (track_idx[r], det_idx[c]))
            .collect()
    }

    fn update(&mut self, t: usize, frame: u64, b: BBox) {
        let track = &mut self.tracks[t];
        let dt = frame.saturating_sub(track.last_update);
        if dt > 0 {
            let old = track.bbox.as_array();
            let new = b.as_array();
            for k in 0..4 {
                track.velocity[k] = (new[k] - old[k]) / dt as f64;
            }
        }
        track.bbox = b;
        track.last_update = frame;
        track.frames_since_update = 0;
        track.state = TrackState::Active;
        track.history.push((frame, b));
    }

    /// Advances to `frame` with that frame's (box, confidence) detections.
    /// Returns `(detection index, track id)` for every detection that was
    /// matched or started a track, sorted by detection index.
    pub fn step(&mut self, frame: u64, dets: &[(BBox, f64)]) -> Result<Vec<(usize, u64)>> {
        if let Some(last) = self.last_frame {
            if frame <= last {
                return Err(TrackError::StreamOrder {
                    video: self.video_id.clone(),
                    frame,
                    last,
                });
            }
        }
        self.last_frame = Some(frame);
        let cfg = &self.config;
        let high: Vec<usize> = (0..dets.len()).filter(|&i| dets[i].1 >= cfg.tau_high).collect();
        let low: Vec<usize> = (0..dets.len())
            .filter(|&i| dets[i].1 >= cfg.tau_low && dets[i].1 < cfg.tau_high)
            .collect();
        let active: Vec<usize> = (0..self.tracks.len())
            .filter(|&t| self.tracks[t].state == TrackState::Active)
            .collect();

        let first = self.match_stage(frame, &active, dets, &high);
        let matched_tracks: Vec<usize> = first.iter().map(|p| p.0).collect();
        let remaining: Vec<usize> = active.iter().copied().filter(|t| !matched_tracks.contains(t)).collect();
        let second = self.match_stage(frame, &remaining, dets, &low);

        let mut out = Vec::new();
        let mut touched = vec![false; self.tracks.len()];
        for &(t, d) in first.iter().chain(&second) {
            self.update(t, frame, dets[d].0);
            touched[t] = true;
            out.push((d, self.tracks[t].track_id));
        }
        for (t, track) in self.tracks.iter_mut().enumerate() {
            if touched[t] {
                continue;
            }
            track.frames_since_update = frame - track.last_update;
            if track.frames_since_update > self.config.max_age {
                track.state = TrackState::Removed;
            } else if track.frames_since_update > self.config.patience {
                track.state = TrackState::Lost;
            }
        }
        self.tracks.retain(|t| t.state != TrackState::Removed);

        let matched_dets: Vec<usize> = out.iter().map(|p| p.0).collect();
        for &d in &high {
            if matched_dets.contains(&d) {
                continue;
            }
            let id = self.next_id;
            self.next_id += 1;
            self.tracks.push(Track {
                track_id: id,
                bbox: dets[d].0,
                velocity: [0.0; 4],
                state: TrackState::Active,
                frames_since_update: 0,
                last_update: frame,
                history: vec![(frame, dets[d].0)],
            });
            out.push((d, id));
        }
        out.sort_unstable();
        Ok(out)
    }
}

/// Free-function form of [`Tracker::step`].
pub fn bytetrack_step(tracker: &mut Tracker, frame: u64, dets: &[(BBox, f64)]) -> Result<Vec<(usize, u64)>> {
    tracker.step(frame, dets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: f64) -> BBox {
        BBox::new(x, 10.0, 20.0, 40.0)
    }

    #[test]
    fn constant_motion_keeps_one_track() {
        let mut t = Tracker::new("v", ByteTrackConfig::default()).unwrap();
        for f in 0..30 {
            let out = t.step(f, &[(b(5.0 * f as f64), 0.9)]).unwrap();
            assert_eq!(out, vec![(0, 1)]);
        }
    }

    #[test]
    fn very_low_confidence_is_ignored() {
        let mut t = Tracker::new("v", ByteTrackConfig::default()).unwrap();
        assert!(t.step(0, &[(b(0.0), 0.05)]).unwrap().is_empty());
        assert!(t.tracks.is_empty());
    }

    #[test]
    fn low_confidence_extends_but_never_starts_tracks() {
        let mut t = Tracker::new("v", ByteTrackConfig::default()).unwrap();
        assert!(t.step(0, &[(b(0.0), 0.3)]).unwrap().is_empty());
        t.step(1, &[(b(0.0), 0.9)]).unwrap();
        assert_eq!(t.step(2, &[(b(2.0), 0.3)]).unwrap(), vec![(0, 1)]);
    }

    #[test]
    fn lost_then_removed() {
        let cfg = ByteTrackConfig {
            max_age: 3,
            ..Default::default()
        };
        let mut t = Tracker::new("v", cfg).unwrap();
        t.step(0, &[(b(0.0), 0.9)]).unwrap();
        t.step(1, &[]).unwrap();
        assert_eq!(t.tracks[0].state, TrackState::Active);
        t.step(2, &[]).unwrap();
        assert_eq!(t.tracks[0].state, TrackState::Lost);
        // lost tracks do not take part in association
        assert_eq!(t.step(3, &[(b(0.0), 0.9)]).unwrap(), vec![(0, 2)]);
        t.step(4, &[]).unwrap();
        assert!(t.tracks.iter().all(|x| x.track_id != 1));
    }

    #[test]
    fn frames_must_increase() {
        let mut t = Tracker::new("v", ByteTrackConfig::default()).unwrap();
        t.step(5, &[]).unwrap();
        assert!(matches!(t.step(5, &[]), Err(TrackError::StreamOrder { .. })));
        assert!(matches!(t.step(4, &[]), Err(TrackError::StreamOrder { .. })));
    }
}
