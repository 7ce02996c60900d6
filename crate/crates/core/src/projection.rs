//! Virtual-camera projection of 3D marker data and dissimilarity-vs-angle sweeps.
//!
//! Axes: `+x` toward first base, `+y` up, `+z` away from home plate. A camera
//! moved by `theta` in the horizontal plane sees the horizontal image
//! coordinate `z cos(theta) + x sin(theta)` under orthographic projection.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{build_pair_with_joints, Handedness, Keypoint, KeypointSequence, SegmentBounds};
use crate::scalar::Scalar;
use crate::signal::{dissimilarity_with, DissimilarityOptions, SignalPair};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T> Point3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Point3 { x, y, z }
    }
}

/// Per-frame 3D marker positions of one motion.
#[derive(Clone, Debug, PartialEq)]
pub struct MocapSequence<T> {
    subject: String,
    handedness: Handedness,
    frame_rate: f64,
    marker_names: Vec<String>,
    frames: Vec<Vec<Point3<T>>>,
}

impl<T: Scalar> MocapSequence<T> {
    pub fn new(
        subject: impl Into<String>,
        handedness: Handedness,
        frame_rate: f64,
        marker_names: Vec<String>,
        frames: Vec<Vec<Point3<T>>>,
    ) -> Result<Self> {
        if frames.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "mocap sequence needs at least 2 frames, got {}",
                frames.len()
            )));
        }
        if !(frame_rate.is_finite() && frame_rate > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "frame rate must be positive, got {frame_rate}"
            )));
        }
        for (f, frame) in frames.iter().enumerate() {
            if frame.len() != marker_names.len() {
                return Err(Error::InvalidArgument(format!(
                    "frame {f} has {} markers, expected {}",
                    frame.len(),
                    marker_names.len()
                )));
            }
            if frame.iter().any(|p| !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite())) {
                return Err(Error::InvalidArgument(format!(
                    "frame {f} has non-finite coordinates"
                )));
            }
        }
        Ok(MocapSequence {
            subject: subject.into(),
            handedness,
            frame_rate,
            marker_names,
            frames,
        })
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

    pub fn marker_names(&self) -> &[String] {
        &self.marker_names
    }

    pub fn frames(&self) -> &[Vec<Point3<T>>] {
        &self.frames
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    /// Multiplies every coordinate by `c`.
    pub fn scaled(&self, c: T) -> Self {
        let frames = self
            .frames
            .iter()
            .map(|f| f.iter().map(|p| Point3::new(p.x * c, p.y * c, p.z * c)).collect())
            .collect();
        MocapSequence {
            frames,
            ..self.clone()
        }
    }
}

/// `(sin, cos)` of an angle in degrees, exact at multiples of 90°.
pub fn sin_cos_deg<T: Scalar>(theta: T) -> (T, T) {
    let full = T::of(360.0);
    let reduced = theta % full;
    let reduced = if reduced < T::zero() { reduced + full } else { reduced };
    let quarter = T::of(90.0);
    if reduced % quarter == T::zero() {
        let (zero, one) = (T::zero(), T::one());
        return match (reduced / quarter).to_u8() {
            Some(0) | Some(4) => (zero, one),
            Some(1) => (one, zero),
            Some(2) => (zero, -one),
            _ => (-one, zero),
        };
    }
    reduced.to_radians().sin_cos()
}

/// Orthographic view from a camera rotated by `theta_deg` about the vertical axis.
///
/// The horizontal image coordinate is `z cos(theta) + x sin(theta)` and the
/// vertical one is `-y`, so the output uses the downward-positive image
/// convention of [`KeypointSequence`]. Markers keep their names.
pub fn project<T: Scalar>(seq: &MocapSequence<T>, theta_deg: T) -> Result<KeypointSequence<T>> {
    if !theta_deg.is_finite() {
        return Err(Error::InvalidArgument(format!("angle {theta_deg} is not finite")));
    }
    let (sin, cos) = sin_cos_deg(theta_deg);
    let frames = seq
        .frames()
        .iter()
        .map(|frame| {
            frame
                .iter()
                .map(|p| Some(Keypoint::new(p.z * cos + p.x * sin, -p.y, T::one())))
                .collect()
        })
        .collect();
    KeypointSequence::new(
        seq.subject(),
        seq.handedness(),
        seq.frame_rate(),
        seq.marker_names().to_vec(),
        frames,
    )
}

/// A mocap motion with the markers and segment to analyse.
#[derive(Clone, Debug, PartialEq)]
pub struct MocapTrial<T> {
    pub sequence: MocapSequence<T>,
    pub ankle_marker: String,
    pub wrist_marker: String,
    pub bounds: SegmentBounds,
}

impl<T: Scalar> MocapTrial<T> {
    pub fn new(
        sequence: MocapSequence<T>,
        ankle_marker: impl Into<String>,
        wrist_marker: impl Into<String>,
        bounds: SegmentBounds,
    ) -> Result<Self> {
        bounds.check(sequence.frame_count())?;
        let trial = MocapTrial {
            sequence,
            ankle_marker: ankle_marker.into(),
            wrist_marker: wrist_marker.into(),
            bounds,
        };
        for marker in [&trial.ankle_marker, &trial.wrist_marker] {
            if !trial.sequence.marker_names().contains(marker) {
                return Err(Error::MissingJoint {
                    joint: marker.clone(),
                    frame: None,
                });
            }
        }
        Ok(trial)
    }

    pub fn subject(&self) -> &str {
        self.sequence.subject()
    }

    /// Ankle/wrist speed pair as seen from `theta_deg`.
    pub fn pair_at(&self, theta_deg: T) -> Result<SignalPair<T>> {
        let view = project(&self.sequence, theta_deg)?;
        let pair = build_pair_with_joints(&view, &self.ankle_marker, &self.wrist_marker, self.bounds)?;
        Ok(pair.with_label(format!("{}@{}", self.subject(), theta_deg)))
    }

    pub fn scaled(&self, c: T) -> Self {
        MocapTrial {
            sequence: self.sequence.scaled(c),
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry<T> {
    pub theta: T,
    pub dis: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepFailure<T> {
    pub theta: T,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleSweepResult<T> {
    pub base_subject: String,
    pub probe_subject: String,
    /// Successful angles, strictly increasing.
    pub entries: Vec<SweepEntry<T>>,
    /// Angles at which the probe's speed pair was unusable.
    pub failures: Vec<SweepFailure<T>>,
}

impl<T: Scalar> AngleSweepResult<T> {
    pub fn dis_at(&self, theta: T) -> Option<T> {
        self.entries.iter().find(|e| e.theta == theta).map(|e| e.dis)
    }

    /// Largest dissimilarity with `|theta| < limit`.
    pub fn max_within(&self, limit: T) -> Option<T> {
        self.entries
            .iter()
            .filter(|e| e.theta.abs() < limit)
            .map(|e| e.dis)
            .reduce(T::max)
    }
}

/// `start, start + step, ...` up to and including `end`.
pub fn theta_grid<T: Scalar>(start: T, end: T, step: T) -> Result<Vec<T>> {
    if !(start.is_finite() && end.is_finite() && step.is_finite()) || step <= T::zero() || end < start {
        return Err(Error::InvalidArgument(format!(
            "invalid angle grid {start}..={end} step {step}"
        )));
    }
    let slack = T::of(1e-9);
    let count = ((end - start) / step + slack).floor().to_usize().unwrap_or(0) + 1;
    Ok((0..count).map(|i| start + step * T::of(i as f64)).collect())
}

/// -80° to +90° in 10° steps.
pub fn default_theta_grid<T: Scalar>() -> Vec<T> {
    theta_grid(T::of(-80.0), T::of(90.0), T::of(10.0)).expect("default grid is valid")
}

/// Compares `base` viewed at 0° with `probe` viewed at each angle.
///
/// Entries are computed in parallel and returned in angle order. An angle
/// where the probe yields a degenerate pair is recorded in `failures` and
/// the sweep continues.
pub fn sweep<T: Scalar>(
    base: &MocapTrial<T>,
    probe: &MocapTrial<T>,
    thetas: &[T],
    opts: &DissimilarityOptions,
) -> Result<AngleSweepResult<T>> {
    if thetas.is_empty() {
        return Err(Error::InvalidArgument("angle list is empty".into()));
    }
    if thetas.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
        return Err(Error::InvalidArgument("angles must be strictly increasing".into()));
    }
    let reference = base.pair_at(T::zero())?;
    let outcomes: Vec<Result<T>> = thetas
        .par_iter()
        .map(|&theta| {
            let pair = probe.pair_at(theta)?;
            dissimilarity_with(&reference, &pair, opts)
        })
        .collect();

    let mut result = AngleSweepResult {
        base_subject: base.subject().to_string(),
        probe_subject: probe.subject().to_string(),
        entries: Vec::new(),
        failures: Vec::new(),
    };
    for (&theta, outcome) in thetas.iter().zip(outcomes) {
        match outcome {
            Ok(dis) => result.entries.push(SweepEntry { theta, dis }),
            Err(e) if e.is_domain() => result.failures.push(SweepFailure {
                theta,
                error: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(result)
}
