//! Motion sources: keypoint files, pair descriptors, and manifests listing them.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use synergy_core::io::{self, KeypointFile, PairFile};
use synergy_core::{build_pair, Error, Handedness, Result, SegmentBounds, SignalPair64};

/// One manifest entry. `file` is a keypoint JSON or a pair descriptor,
/// relative to the manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotionEntry {
    pub label: String,
    pub file: PathBuf,
    /// Segment of a keypoint file; the whole file when absent.
    #[serde(default)]
    pub bounds: Option<SegmentBounds>,
    /// Overrides the handedness stored in a keypoint file.
    #[serde(default)]
    pub handedness: Option<Handedness>,
}

/// Loads a keypoint file or pair descriptor as a signal pair.
pub fn load_motion(
    path: &Path,
    label: Option<&str>,
    bounds: Option<SegmentBounds>,
    handedness: Option<Handedness>,
) -> Result<SignalPair64> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let format_err = |e: serde_json::Error| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let value: serde_json::Value = serde_json::from_str(&text).map_err(format_err)?;
    let pair = if value.get("frames").is_none() {
        let desc: PairFile = serde_json::from_value(value).map_err(format_err)?;
        if bounds.is_some() || handedness.is_some() {
            return Err(Error::InvalidArgument(format!(
                "{}: bounds and handedness apply to keypoint files only",
                path.display()
            )));
        }
        io::load_pair(&desc, path.parent().unwrap_or(Path::new("")))?
    } else {
        let kp: KeypointFile = serde_json::from_value(value).map_err(format_err)?;
        let mut seq = kp.into_sequence().map_err(|e| with_path(path, e))?;
        if let Some(h) = handedness {
            seq = seq.with_handedness(h);
        }
        let bounds = match bounds {
            Some(b) => b,
            None => SegmentBounds::full(seq.frame_count())?,
        };
        build_pair(&seq, bounds)
            .map_err(|e| with_path(path, e))?
            .with_label(seq.subject().to_string())
    };
    Ok(match label {
        Some(l) => pair.with_label(l),
        None => pair,
    })
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::MissingJoint { .. } | Error::InvalidBounds { .. } | Error::InvalidSignal(_) | Error::InvalidArgument(_) => Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        },
        e => e,
    }
}

pub fn read_manifest(path: &Path) -> Result<Vec<MotionEntry>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Loads every motion a manifest lists, before any comparison is made.
pub fn load_manifest(path: &Path) -> Result<Vec<SignalPair64>> {
    let dir = path.parent().unwrap_or(Path::new(""));
    read_manifest(path)?
        .iter()
        .map(|e| load_motion(&dir.join(&e.file), Some(&e.label), e.bounds, e.handedness))
        .collect()
}
