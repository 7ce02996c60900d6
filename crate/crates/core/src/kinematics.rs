//! Keypoint tracks to ankle/wrist speed pairs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signal::{Signal, SignalPair};

/// Default joint names, in the index order of a 25-keypoint body model.
pub const BODY_25: [&str; 25] = [
    "nose",
    "neck",
    "right_shoulder",
    "right_elbow",
    "right_wrist",
    "left_shoulder",
    "left_elbow",
    "left_wrist",
    "mid_hip",
    "right_hip",
    "right_knee",
    "right_ankle",
    "left_hip",
    "left_knee",
    "left_ankle",
    "right_eye",
    "left_eye",
    "right_ear",
    "left_ear",
    "left_big_toe",
    "left_small_toe",
    "left_heel",
    "right_big_toe",
    "right_small_toe",
    "right_heel",
];

/// Default number of consecutive rising-ankle frames that mark heel-off.
pub const DEFAULT_HEEL_OFF_WINDOW: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Handedness {
    Right,
    Left,
}

impl Handedness {
    /// Stride-side ankle and throwing-side wrist.
    pub fn joints(self) -> (&'static str, &'static str) {
        match self {
            Handedness::Right => ("left_ankle", "right_wrist"),
            Handedness::Left => ("right_ankle", "left_wrist"),
        }
    }
}

impl fmt::Display for Handedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Handedness::Right => "right",
            Handedness::Left => "left",
        })
    }
}

impl FromStr for Handedness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "right" | "r" => Ok(Handedness::Right),
            "left" | "l" => Ok(Handedness::Left),
            other => Err(Error::InvalidArgument(format!(
                "handedness must be `right` or `left`, got `{other}`"
            ))),
        }
    }
}

/// Image-space joint position; `y` grows downward.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Keypoint<T> {
    pub x: T,
    pub y: T,
    /// Carried through from the detector but not used.
    pub confidence: T,
}

impl<T> Keypoint<T> {
    pub fn new(x: T, y: T, confidence: T) -> Self {
        Keypoint { x, y, confidence }
    }
}

/// Per-frame 2D joints of one motion. A `None` slot is a joint the detector missed.
#[derive(Clone, Debug, PartialEq)]
pub struct KeypointSequence<T> {
    subject: String,
    handedness: Handedness,
    frame_rate: f64,
    joint_names: Vec<String>,
    frames: Vec<Vec<Option<Keypoint<T>>>>,
}

impl<T: Scalar> KeypointSequence<T> {
    pub fn new(
        subject: impl Into<String>,
        handedness: Handedness,
        frame_rate: f64,
        joint_names: Vec<String>,
        frames: Vec<Vec<Option<Keypoint<T>>>>,
    ) -> Result<Self> {
        if frames.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "keypoint sequence needs at least 2 frames, got {}",
                frames.len()
            )));
        }
        if !(frame_rate.is_finite() && frame_rate > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "frame rate must be positive, got {frame_rate}"
            )));
        }
        for (i, name) in joint_names.iter().enumerate() {
            if joint_names[..i].contains(name) {
                return Err(Error::InvalidArgument(format!("duplicate joint name `{name}`")));
            }
        }
        for (f, frame) in frames.iter().enumerate() {
            if frame.len() != joint_names.len() {
                return Err(Error::InvalidArgument(format!(
                    "frame {f} has {} joints, expected {}",
                    frame.len(),
                    joint_names.len()
                )));
            }
            let bad = frame
                .iter()
                .flatten()
                .any(|k| !(k.x.is_finite() && k.y.is_finite() && k.confidence.is_finite()));
            if bad {
                return Err(Error::InvalidArgument(format!(
                    "frame {f} has non-finite coordinates"
                )));
            }
        }
        Ok(KeypointSequence {
            subject: subject.into(),
            handedness,
            frame_rate,
            joint_names,
            frames,
        })
    }

    /// Builds a sequence from complete per-joint tracks of `(x, y)` points.
    pub fn from_tracks(
        subject: impl Into<String>,
        handedness: Handedness,
        frame_rate: f64,
        tracks: &[(&str, Vec<(T, T)>)],
    ) -> Result<Self> {
        let n = tracks.first().map_or(0, |(_, t)| t.len());
        if let Some((name, _)) = tracks.iter().find(|(_, t)| t.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "track `{name}` length differs from the others"
            )));
        }
        let frames = (0..n)
            .map(|f| {
                tracks
                    .iter()
                    .map(|(_, t)| Some(Keypoint::new(t[f].0, t[f].1, T::one())))
                    .collect()
            })
            .collect();
        let names = tracks.iter().map(|(name, _)| name.to_string()).collect();
        KeypointSequence::new(subject, handedness, frame_rate, names, frames)
    }

    pub fn subject(&self) -> &str {
        &self.subject
    }

    pub fn handedness(&self) -> Handedness {
        self.handedness
    }

    pub fn frame_rate(&self) -> f64 {
        self.frame_rate
    }

    pub fn joint_names(&self) -> &[String] {
        &self.joint_names
    }

    pub fn frames(&self) -> &[Vec<Option<Keypoint<T>>>] {
        &self.frames
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn with_handedness(mut self, handedness: Handedness) -> Self {
        self.handedness = handedness;
        self
    }

    pub fn joint_index(&self, joint: &str) -> Option<usize> {
        self.joint_names.iter().position(|n| n == joint)
    }

    /// The joint's position at every frame in `bounds`, inclusive.
    pub fn track(&self, joint: &str, bounds: SegmentBounds) -> Result<Vec<Keypoint<T>>> {
        bounds.check(self.frame_count())?;
        let j = self.joint_index(joint).ok_or_else(|| Error::MissingJoint {
            joint: joint.to_string(),
            frame: None,
        })?;
        (bounds.start..=bounds.end)
            .map(|f| {
                self.frames[f][j].ok_or_else(|| Error::MissingJoint {
                    joint: joint.to_string(),
                    frame: Some(f),
                })
            })
            .collect()
    }
}

/// Inclusive frame range of one motion segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SegmentBounds {
    pub start: usize,
    pub end: usize,
}

impl SegmentBounds {
    pub fn new(start: usize, end: usize, frame_count: usize) -> Result<Self> {
        let b = SegmentBounds { start, end };
        b.check(frame_count)?;
        Ok(b)
    }

    /// First to last frame.
    pub fn full(frame_count: usize) -> Result<Self> {
        SegmentBounds::new(0, frame_count.saturating_sub(1), frame_count)
    }

    pub fn check(&self, frame_count: usize) -> Result<()> {
        if self.start < self.end && self.end < frame_count {
            Ok(())
        } else {
            Err(Error::InvalidBounds {
                start: self.start,
                end: self.end,
                frames: frame_count,
            })
        }
    }

    /// Number of speed samples the segment yields.
    pub fn speed_len(&self) -> usize {
        self.end - self.start
    }
}

/// Ankle and wrist joint names implied by the sequence's handedness.
pub fn select_joints<T: Scalar>(seq: &KeypointSequence<T>) -> Result<(&'static str, &'static str)> {
    let (ankle, wrist) = seq.handedness().joints();
    for joint in [ankle, wrist] {
        let present = seq
            .joint_index(joint)
            .is_some_and(|j| seq.frames().iter().any(|f| f[j].is_some()));
        if !present {
            return Err(Error::MissingJoint {
                joint: joint.to_string(),
                frame: None,
            });
        }
    }
    Ok((ankle, wrist))
}

/// Per-frame displacement magnitudes for frames `start+1 ..= end`.
///
/// Returns raw samples; a two-frame segment yields a single value.
pub fn joint_speeds<T: Scalar>(
    seq: &KeypointSequence<T>,
    joint: &str,
    bounds: SegmentBounds,
) -> Result<Vec<T>> {
    let track = seq.track(joint, bounds)?;
    Ok(track
        .windows(2)
        .map(|w| {
            let dx = w[1].x - w[0].x;
            let dy = w[1].y - w[0].y;
            (dx * dx + dy * dy).sqrt()
        })
        .collect())
}

/// Speed of `joint` over `bounds` in pixels per frame, `bounds.end - bounds.start` samples.
pub fn speed_series<T: Scalar>(
    seq: &KeypointSequence<T>,
    joint: &str,
    bounds: SegmentBounds,
) -> Result<Signal<T>> {
    let speeds = joint_speeds(seq, joint, bounds)?;
    Signal::new(speeds, seq.frame_rate()).map_err(|e| match e {
        Error::InvalidSignal(msg) => {
            Error::InvalidSignal(format!("`{joint}` over frames {}..={}: {msg}", bounds.start, bounds.end))
        }
        e => e,
    })
}

/// Heel-off heuristic: the ankle's image `y` starts a sustained decrease.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SegmentDetector {
    /// Consecutive decreasing frames required.
    pub window: usize,
}

impl Default for SegmentDetector {
    fn default() -> Self {
        SegmentDetector {
            window: DEFAULT_HEEL_OFF_WINDOW,
        }
    }
}

impl SegmentDetector {
    /// Earliest frame `n` with `y[n+i] < y[n+i-1]` for `i in 0..window`.
    /// The segment ends at `end`, or at the last frame when `None`.
    pub fn detect<T: Scalar>(
        &self,
        seq: &KeypointSequence<T>,
        ankle: &str,
        end: Option<usize>,
    ) -> Result<SegmentBounds> {
        let window = self.window.max(1);
        let frames = seq.frame_count();
        let end = end.unwrap_or(frames - 1);
        let ys: Vec<T> = seq.track(ankle, SegmentBounds::full(frames)?)?.iter().map(|k| k.y).collect();
        let start = (1..frames)
            .filter(|&n| n + window <= frames)
            .find(|&n| (n..n + window).all(|k| ys[k] < ys[k - 1]))
            .filter(|&n| n < end)
            .ok_or_else(|| Error::NoSegmentStart(ankle.to_string()))?;
        SegmentBounds::new(start, end, frames)
    }
}

/// [`SegmentDetector::detect`] with the default window, ending at the last frame.
pub fn detect_segment<T: Scalar>(seq: &KeypointSequence<T>, ankle: &str) -> Result<SegmentBounds> {
    SegmentDetector::default().detect(seq, ankle, None)
}

/// Ankle speed as input, wrist speed as output, joints chosen by handedness.
pub fn build_pair<T: Scalar>(seq: &KeypointSequence<T>, bounds: SegmentBounds) -> Result<SignalPair<T>> {
    let (ankle, wrist) = select_joints(seq)?;
    build_pair_with_joints(seq, ankle, wrist, bounds)
}

pub fn build_pair_with_joints<T: Scalar>(
    seq: &KeypointSequence<T>,
    ankle: &str,
    wrist: &str,
    bounds: SegmentBounds,
) -> Result<SignalPair<T>> {
    let input = speed_series(seq, ankle, bounds)?;
    let output = speed_series(seq, wrist, bounds)?;
    let label = format!("{}[{}..{}]", seq.subject(), bounds.start, bounds.end);
    SignalPair::new(input, output, label)
}
