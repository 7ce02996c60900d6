#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use synergy_core::io::{write_keypoints, write_mocap_trial};
use synergy_core::{
    convolve, Handedness, Keypoint, KeypointSequence64, MocapSequence64, MocapTrial64, Point3, SegmentBounds,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Positive speed profile: a few smooth bumps plus a floor.
pub fn random_speeds(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let bumps: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| (rng.gen_range(0.0..len as f64), rng.gen_range(2.0..8.0), rng.gen_range(1.0..10.0)))
        .collect();
    (0..len)
        .map(|n| {
            let t = n as f64;
            0.2 + bumps.iter().map(|&(c, w, h)| h * (-((t - c) / w).powi(2)).exp()).sum::<f64>()
        })
        .collect()
}

/// Track whose per-frame displacement has the given magnitudes, turning as it goes.
pub fn track_with_speeds(origin: (f64, f64), speeds: &[f64], turn: f64) -> Vec<(f64, f64)> {
    let mut p = origin;
    let mut out = vec![p];
    for (n, s) in speeds.iter().enumerate() {
        let phi = turn * n as f64;
        p = (p.0 + s * phi.cos(), p.1 + s * phi.sin());
        out.push(p);
    }
    out
}

/// Keypoint sequence whose ankle speed is `ankle` (padded with stillness)
/// and whose wrist speed is `kernel * ankle`. Other body joints stand still.
pub fn synthetic_motion(subject: &str, handedness: Handedness, ankle: &[f64], kernel: &[f64]) -> KeypointSequence64 {
    let mut input = ankle.to_vec();
    input.resize(ankle.len() + kernel.len() - 1, 0.0);
    let output = convolve(ankle, kernel).unwrap().into_vec();
    let (ankle_name, wrist_name) = handedness.joints();
    let other_ankle = if ankle_name == "left_ankle" { "right_ankle" } else { "left_ankle" };
    let ankle_track = track_with_speeds((300.0, 600.0), &input, 0.05);
    let wrist_track = track_with_speeds((420.0, 250.0), &output, -0.11);
    let still: Vec<(f64, f64)> = vec![(350.0, 640.0); ankle_track.len()];
    KeypointSequence64::from_tracks(
        subject,
        handedness,
        30.0,
        &[(ankle_name, ankle_track), (wrist_name, wrist_track), (other_ankle, still)],
    )
    .unwrap()
}

pub fn write_motion(dir: &Path, name: &str, seq: &KeypointSequence64) -> PathBuf {
    let path = dir.join(format!("{name}.json"));
    write_keypoints(&path, seq).unwrap();
    path
}

/// Body joints with the wrist slot removed from every frame.
pub fn without_joint(seq: &KeypointSequence64, joint: &str) -> KeypointSequence64 {
    let j = seq.joint_index(joint).unwrap();
    let names = seq.joint_names().iter().enumerate().filter(|&(i, _)| i != j).map(|(_, n)| n.clone()).collect();
    let frames: Vec<Vec<Option<Keypoint<f64>>>> = seq
        .frames()
        .iter()
        .map(|f| f.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, k)| *k).collect())
        .collect();
    KeypointSequence64::new(seq.subject(), seq.handedness(), seq.frame_rate(), names, frames).unwrap()
}

/// Mocap trial with an ankle on a helix and a wrist on a lissajous loop.
pub fn helix_trial(subject: &str, wrist_rate: f64, frames: usize) -> MocapTrial64 {
    let data = (0..frames)
        .map(|f| {
            let t = f as f64 / frames as f64;
            let ankle = Point3::new(
                120.0 * (5.0 * t).cos(),
                40.0 * t * t + 10.0 * (3.0 * t).sin(),
                150.0 * (5.0 * t).sin() + 300.0 * t,
            );
            let wrist = Point3::new(
                200.0 * (wrist_rate * t).sin(),
                1500.0 + 300.0 * (2.0 * wrist_rate * t).cos(),
                400.0 * t * t * t + 80.0 * (wrist_rate * t).cos(),
            );
            vec![Point3::new(10.0, 1700.0, -5.0), ankle, wrist]
        })
        .collect();
    let seq = MocapSequence64::new(
        subject,
        Handedness::Right,
        120.0,
        vec!["HEAD".into(), "LANK".into(), "RWRI".into()],
        data,
    )
    .unwrap();
    MocapTrial64::new(seq, "LANK", "RWRI", SegmentBounds::new(3, frames - 2, frames).unwrap()).unwrap()
}

pub fn write_trial(dir: &Path, name: &str, trial: &MocapTrial64) -> PathBuf {
    let path = dir.join(format!("{name}.csv"));
    write_mocap_trial(&path, trial).unwrap();
    path
}

/// `theta_deg,dis` rows of a sweep CSV.
pub fn read_sweep_csv(path: &Path) -> Vec<(f64, f64)> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta_deg,dis"));
    lines
        .map(|l| {
            let (t, d) = l.split_once(',').unwrap();
            (t.parse().unwrap(), d.parse().unwrap())
        })
        .collect()
}

pub fn run(args: &[&str]) -> synergy_cli::CliResult<String> {
    synergy_cli::run_args(std::iter::once("synergy").chain(args.iter().copied()))
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
