//! Readers and writers for the on-disk formats described in `docs/formats.md`.

use std::collections::HashMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::kinematics::{Handedness, Keypoint, KeypointSequence, SegmentBounds, BODY_25};
use crate::projection::{MocapSequence, MocapTrial, Point3};
use crate::scalar::Scalar;
use crate::signal::SignalPair;

fn read_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn parse_value<T: Scalar>(field: &str) -> std::result::Result<T, String> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| format!("`{field}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("`{field}` is not finite"));
    }
    Ok(T::of(v))
}

fn csv_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r)
}

fn check_header(path: &Path, got: &csv::StringRecord, want: &[&str]) -> Result<()> {
    if got.iter().eq(want.iter().copied()) {
        Ok(())
    } else {
        Err(Error::format(
            path,
            format!("expected header `{}`, got `{}`", want.join(","), got.iter().collect::<Vec<_>>().join(",")),
        ))
    }
}

// --- speed series -------------------------------------------------------

/// Parses a `frame,value` CSV. Frame numbers must be consecutive.
pub fn parse_speed_csv<T: Scalar, R: Read>(reader: R, path: &Path) -> Result<Vec<T>> {
    let mut rdr = csv_reader(reader);
    let header = rdr.headers().map_err(|e| Error::format(path, e))?.clone();
    check_header(path, &header, &["frame", "value"])?;
    let mut values = Vec::new();
    let mut last: Option<i64> = None;
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::format(path, e))?;
        let at = |msg: String| Error::format(path, format!("row {}: {msg}", row + 2));
        if rec.len() != 2 {
            return Err(at(format!("expected 2 fields, got {}", rec.len())));
        }
        let frame: i64 = rec[0].parse().map_err(|_| at(format!("bad frame `{}`", &rec[0])))?;
        if last.is_some_and(|l| frame != l + 1) {
            return Err(at(format!("frame {frame} does not follow {}", last.unwrap_or_default())));
        }
        last = Some(frame);
        values.push(parse_value(&rec[1]).map_err(at)?);
    }
    Ok(values)
}

pub fn read_speed_csv<T: Scalar>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_speed_csv(file, path)
}

/// Writes `frame,value` rows numbered from `first_frame`.
pub fn format_speed_csv<T: Scalar>(first_frame: usize, values: &[T]) -> String {
    let mut out = String::from("frame,value\n");
    for (i, v) in values.iter().enumerate() {
        out.push_str(&format!("{},{}\n", first_frame + i, v.render()));
    }
    out
}

pub fn write_speed_csv<T: Scalar>(path: impl AsRef<Path>, first_frame: usize, values: &[T]) -> Result<()> {
    write_bytes(path.as_ref(), format_speed_csv(first_frame, values).as_bytes())
}

// --- pair files ---------------------------------------------------------

/// JSON descriptor tying two speed CSVs into one motion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFile {
    pub label: String,
    pub frame_rate: f64,
    /// Ankle speed CSV, relative to the descriptor's directory.
    pub input: PathBuf,
    /// Wrist speed CSV, relative to the descriptor's directory.
    pub output: PathBuf,
}

pub fn read_pair_file<T: Scalar>(path: impl AsRef<Path>) -> Result<SignalPair<T>> {
    let path = path.as_ref();
    let desc: PairFile = serde_json::from_str(&read_string(path)?).map_err(|e| Error::format(path, e))?;
    load_pair(&desc, path.parent().unwrap_or(Path::new("")))
}

/// Loads the CSVs a descriptor points at, resolving relative paths against `dir`.
pub fn load_pair<T: Scalar>(desc: &PairFile, dir: &Path) -> Result<SignalPair<T>> {
    let input = read_speed_csv(dir.join(&desc.input))?;
    let output = read_speed_csv(dir.join(&desc.output))?;
    SignalPair::from_samples(input, output, desc.frame_rate, &*desc.label)
}

pub fn write_pair_file(path: impl AsRef<Path>, desc: &PairFile) -> Result<()> {
    let json = serde_json::to_string_pretty(desc).expect("pair descriptor serializes");
    write_bytes(path.as_ref(), format!("{json}\n").as_bytes())
}

// --- keypoints ----------------------------------------------------------

/// One motion's pose-estimation output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeypointFile {
    pub subject: String,
    pub handedness: Handedness,
    pub frame_rate: f64,
    /// Name of each joint slot; defaults to the 25-joint body model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint_names: Option<Vec<String>>,
    /// `frames[f][j]` is `[x, y, confidence]`, or `null` when undetected.
    pub frames: Vec<Vec<Option<[f64; 3]>>>,
}

impl KeypointFile {
    pub fn into_sequence<T: Scalar>(self) -> Result<KeypointSequence<T>> {
        let names = self
            .joint_names
            .unwrap_or_else(|| BODY_25.iter().map(|s| s.to_string()).collect());
        let frames = self
            .frames
            .into_iter()
            .map(|f| {
                f.into_iter()
                    .map(|k| k.map(|[x, y, c]| Keypoint::new(T::of(x), T::of(y), T::of(c))))
                    .collect()
            })
            .collect();
        KeypointSequence::new(self.subject, self.handedness, self.frame_rate, names, frames)
    }

    pub fn from_sequence<T: Scalar>(seq: &KeypointSequence<T>) -> Self {
        KeypointFile {
            subject: seq.subject().to_string(),
            handedness: seq.handedness(),
            frame_rate: seq.frame_rate(),
            joint_names: Some(seq.joint_names().to_vec()),
            frames: seq
                .frames()
                .iter()
                .map(|f| {
                    f.iter()
                        .map(|k| k.map(|k| [k.x.as_f64(), k.y.as_f64(), k.confidence.as_f64()]))
                        .collect()
                })
                .collect(),
        }
    }
}

pub fn parse_keypoints<T: Scalar>(json: &str, path: &Path) -> Result<KeypointSequence<T>> {
    let file: KeypointFile = serde_json::from_str(json).map_err(|e| Error::format(path, e))?;
    file.into_sequence().map_err(|e| match e {
        Error::InvalidArgument(msg) => Error::format(path, msg),
        e => e,
    })
}

pub fn read_keypoints<T: Scalar>(path: impl AsRef<Path>) -> Result<KeypointSequence<T>> {
    let path = path.as_ref();
    parse_keypoints(&read_string(path)?, path)
}

pub fn write_keypoints<T: Scalar>(path: impl AsRef<Path>, seq: &KeypointSequence<T>) -> Result<()> {
    let json = serde_json::to_string(&KeypointFile::from_sequence(seq)).expect("keypoints serialize");
    write_bytes(path.as_ref(), json.as_bytes())
}

// --- mocap --------------------------------------------------------------

/// Sidecar manifest for a `frame,marker,x,y,z` mocap CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MocapManifest {
    pub subject: String,
    pub handedness: Handedness,
    pub frame_rate: f64,
    pub ankle_marker: String,
    pub wrist_marker: String,
    /// Row index into the sorted frames; defaults to the first.
    #[serde(default)]
    pub start_frame: Option<usize>,
    /// Defaults to the last frame.
    #[serde(default)]
    pub end_frame: Option<usize>,
}

/// Marker names and per-frame marker positions.
pub type MocapFrames<T> = (Vec<String>, Vec<Vec<Point3<T>>>);

/// Groups mocap rows by frame number. Marker order is first appearance.
pub fn parse_mocap_csv<T: Scalar, R: Read>(reader: R, path: &Path) -> Result<MocapFrames<T>> {
    let mut rdr = csv_reader(reader);
    let header = rdr.headers().map_err(|e| Error::format(path, e))?.clone();
    check_header(path, &header, &["frame", "marker", "x", "y", "z"])?;

    let mut markers: Vec<String> = Vec::new();
    let mut marker_ix: HashMap<String, usize> = HashMap::new();
    let mut frames: Vec<(i64, Vec<Option<Point3<T>>>)> = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::format(path, e))?;
        let at = |msg: String| Error::format(path, format!("row {}: {msg}", row + 2));
        if rec.len() != 5 {
            return Err(at(format!("expected 5 fields, got {}", rec.len())));
        }
        let frame: i64 = rec[0].parse().map_err(|_| at(format!("bad frame `{}`", &rec[0])))?;
        let p = Point3::new(
            parse_value(&rec[2]).map_err(at)?,
            parse_value(&rec[3]).map_err(at)?,
            parse_value(&rec[4]).map_err(at)?,
        );
        let name = rec[1].to_string();
        let m = *marker_ix.entry(name.clone()).or_insert_with(|| {
            markers.push(name.clone());
            markers.len() - 1
        });
        match frames.last_mut() {
            Some((f, _)) if *f == frame => {}
            Some((f, _)) if *f > frame => {
                return Err(at(format!("frame {frame} after frame {f}; rows must be grouped by ascending frame")))
            }
            _ => frames.push((frame, Vec::new())),
        }
        let slots = &mut frames.last_mut().expect("pushed above").1;
        if slots.len() <= m {
            slots.resize(m + 1, None);
        }
        if slots[m].replace(p).is_some() {
            return Err(at(format!("marker `{name}` repeated in frame {frame}")));
        }
    }

    let n = markers.len();
    let frames = frames
        .into_iter()
        .map(|(f, mut slots)| {
            slots.resize(n, None);
            slots
                .into_iter()
                .enumerate()
                .map(|(m, p)| {
                    p.ok_or_else(|| Error::format(path, format!("frame {f} lacks marker `{}`", markers[m])))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((markers, frames))
}

/// Sidecar of `data.csv` is `data.json`, and vice versa.
pub fn mocap_paths(path: &Path) -> (PathBuf, PathBuf) {
    (path.with_extension("csv"), path.with_extension("json"))
}

/// Reads a mocap CSV and its sidecar manifest; either path may be given.
pub fn read_mocap_trial<T: Scalar>(path: impl AsRef<Path>) -> Result<MocapTrial<T>> {
    let (csv_path, manifest_path) = mocap_paths(path.as_ref());
    let manifest: MocapManifest =
        serde_json::from_str(&read_string(&manifest_path)?).map_err(|e| Error::format(&manifest_path, e))?;
    let file = fs::File::open(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    let (markers, frames) = parse_mocap_csv(file, &csv_path)?;
    mocap_trial(&manifest, markers, frames).map_err(|e| match e {
        Error::InvalidArgument(msg) => Error::format(&csv_path, msg),
        e => e,
    })
}

pub fn mocap_trial<T: Scalar>(
    manifest: &MocapManifest,
    markers: Vec<String>,
    frames: Vec<Vec<Point3<T>>>,
) -> Result<MocapTrial<T>> {
    let seq = MocapSequence::new(&*manifest.subject, manifest.handedness, manifest.frame_rate, markers, frames)?;
    let count = seq.frame_count();
    let bounds = SegmentBounds::new(
        manifest.start_frame.unwrap_or(0),
        manifest.end_frame.unwrap_or(count - 1),
        count,
    )?;
    MocapTrial::new(seq, &*manifest.ankle_marker, &*manifest.wrist_marker, bounds)
}

pub fn format_mocap_csv<T: Scalar>(seq: &MocapSequence<T>) -> String {
    let mut out = String::from("frame,marker,x,y,z\n");
    for (f, frame) in seq.frames().iter().enumerate() {
        for (name, p) in seq.marker_names().iter().zip(frame) {
            out.push_str(&format!("{f},{name},{},{},{}\n", p.x.render(), p.y.render(), p.z.render()));
        }
    }
    out
}

/// Writes `data.csv` plus its `data.json` sidecar.
pub fn write_mocap_trial<T: Scalar>(path: impl AsRef<Path>, trial: &MocapTrial<T>) -> Result<()> {
    let (csv_path, manifest_path) = mocap_paths(path.as_ref());
    let seq = &trial.sequence;
    let manifest = MocapManifest {
        subject: seq.subject().to_string(),
        handedness: seq.handedness(),
        frame_rate: seq.frame_rate(),
        ankle_marker: trial.ankle_marker.clone(),
        wrist_marker: trial.wrist_marker.clone(),
        start_frame: Some(trial.bounds.start),
        end_frame: Some(trial.bounds.end),
    };
    write_bytes(&csv_path, format_mocap_csv(seq).as_bytes())?;
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_bytes(&manifest_path, format!("{json}\n").as_bytes())
}

// --- matrices -----------------------------------------------------------

/// CSV with a label header row and a label first column.
pub fn format_matrix_csv<T: Scalar>(m: &DissimilarityMatrix<T>) -> String {
    format_matrix_csv_with(m, T::render)
}

/// Like [`format_matrix_csv`] with a custom number format.
pub fn format_matrix_csv_with<T: Scalar>(m: &DissimilarityMatrix<T>, fmt: impl Fn(T) -> String) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = std::iter::once("").chain(m.labels().iter().map(String::as_str)).collect();
    wtr.write_record(&header).expect("in-memory write");
    for (label, row) in m.labels().iter().zip(m.rows()) {
        let rec: Vec<String> = std::iter::once(label.clone()).chain(row.iter().map(|&v| fmt(v))).collect();
        wtr.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Reads a labelled CSV matrix. Cells below the diagonal may be blank or `-`,
/// in which case they mirror the upper triangle.
pub fn parse_matrix_csv<T: Scalar, R: Read>(reader: R, path: &Path) -> Result<DissimilarityMatrix<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .has_headers(false)
        .from_reader(reader);
    let mut rows = rdr.records();
    let header = rows
        .next()
        .ok_or_else(|| Error::format(path, "empty matrix file"))?
        .map_err(|e| Error::format(path, e))?;
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let n = labels.len();
    let mut cells: Vec<Vec<Option<T>>> = Vec::with_capacity(n);
    for (i, rec) in rows.enumerate() {
        let rec = rec.map_err(|e| Error::format(path, e))?;
        let at = |msg: String| Error::format(path, format!("row {}: {msg}", i + 2));
        if i >= n {
            return Err(at("more rows than labels".into()));
        }
        if rec.len() != n + 1 {
            return Err(at(format!("expected {} fields, got {}", n + 1, rec.len())));
        }
        if rec[0] != labels[i] {
            return Err(at(format!("row label `{}` does not match column `{}`", &rec[0], labels[i])));
        }
        let row = rec
            .iter()
            .skip(1)
            .enumerate()
            .map(|(j, cell)| match cell {
                "" | "-" | "---" if j < i => Ok(None),
                cell => parse_value(cell).map(Some).map_err(&at),
            })
            .collect::<Result<Vec<_>>>()?;
        cells.push(row);
    }
    if cells.len() != n {
        return Err(Error::format(path, format!("{} rows for {n} labels", cells.len())));
    }
    let values = (0..n)
        .map(|i| (0..n).map(|j| cells[i][j].or(cells[j][i]).unwrap_or_default()).collect())
        .collect();
    DissimilarityMatrix::new(labels, values).map_err(|e| Error::format(path, e))
}

pub fn read_matrix<T: Scalar>(path: impl AsRef<Path>) -> Result<DissimilarityMatrix<T>> {
    let path = path.as_ref();
    let text = read_string(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        serde_json::from_str(&text).map_err(|e| Error::format(path, e))
    } else {
        parse_matrix_csv(text.as_bytes(), path)
    }
}

pub fn write_matrix_csv<T: Scalar>(path: impl AsRef<Path>, m: &DissimilarityMatrix<T>) -> Result<()> {
    write_bytes(path.as_ref(), format_matrix_csv(m).as_bytes())
}

pub fn write_json<S: Serialize>(path: impl AsRef<Path>, value: &S) -> Result<()> {
    let mut json = serde_json::to_vec_pretty(value).expect("value serializes");
    json.write_all(b"\n").expect("in-memory write");
    write_bytes(path.as_ref(), &json)
}
