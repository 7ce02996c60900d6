//! Command-line pipeline: keypoints to speeds, pairwise comparison, matrices,
//! Ward dendrograms, camera-angle sweeps and the DTW baseline.

pub mod manifest;
pub mod plot;

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use synergy_core::io::{self, PairFile};
use synergy_core::{
    build_matrix, build_pair, dtw_distance_with, dtw_pair_distance, pair_cross_convolution,
    select_joints, sweep, theta_grid, ward_cluster, AngleSweepResult64, Convolver, DissimilarityMatrix64,
    DissimilarityOptions, DtwNormalization, DtwOptions, Error, Handedness, LocalCost, MergeTree64, Scalar,
    SegmentBounds, SignalPair64, DEFAULT_FFT_CROSSOVER,
};

use crate::manifest::{load_manifest, load_motion};
use crate::plot::{Series, BLUE, GREEN, ORANGE, RED};

/// Same-subject dissimilarity is expected to stay small inside this angle.
pub const SMALL_ANGLE_LIMIT_DEG: f64 = 40.0;

#[derive(Debug, Parser)]
#[command(name = "synergy", version, about = "Cross-convolution dissimilarity of body coordination")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Args)]
pub struct GlobalOpts {
    /// Directory for every file a command writes.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Whether motions with different frame rates may be compared.
    #[arg(long, global = true, value_enum, default_value_t = FrameRateCheck::Strict)]
    pub frame_rate_check: FrameRateCheck,
    /// Operand length above which convolution goes through the FFT.
    #[arg(long, global = true, default_value_t = DEFAULT_FFT_CROSSOVER)]
    pub fft_crossover: usize,
    #[arg(long, global = true, default_value_t = -80.0, allow_negative_numbers = true)]
    pub theta_start: f64,
    #[arg(long, global = true, default_value_t = 90.0, allow_negative_numbers = true)]
    pub theta_end: f64,
    #[arg(long, global = true, default_value_t = 10.0)]
    pub theta_step: f64,
    /// Round printed values to this many decimals, e.g. `--round=6`; 4 when
    /// given without a value.
    #[arg(long, global = true, num_args = 0..=1, require_equals = true, default_missing_value = "4")]
    pub round: Option<usize>,
}

impl Default for GlobalOpts {
    fn default() -> Self {
        GlobalOpts {
            out_dir: PathBuf::from("."),
            frame_rate_check: FrameRateCheck::Strict,
            fft_crossover: DEFAULT_FFT_CROSSOVER,
            theta_start: -80.0,
            theta_end: 90.0,
            theta_step: 10.0,
            round: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FrameRateCheck {
    Strict,
    Off,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ankle and wrist speed series of one keypoint file.
    Speeds(SpeedsArgs),
    /// Dissimilarity of two motions, with their convolution vectors.
    Compare(PairArgs),
    /// Pairwise dissimilarity matrix of a motion manifest.
    Matrix(MatrixArgs),
    /// Ward dendrogram of a manifest or of a saved matrix.
    Cluster(ClusterArgs),
    /// Dissimilarity against virtual camera angle for mocap trials.
    Sweep(SweepArgs),
    /// DTW baseline next to the dissimilarity for two motions.
    Dtw(DtwArgs),
}

#[derive(Debug, Args)]
pub struct SpeedsArgs {
    /// Keypoint JSON file.
    pub keypoints: PathBuf,
    /// First frame of the segment; heel-off is detected when omitted and
    /// `--detect-start` is set, otherwise the first frame.
    #[arg(long)]
    pub start: Option<usize>,
    /// Last frame of the segment (the frame before ball release).
    #[arg(long)]
    pub end: Option<usize>,
    #[arg(long)]
    pub detect_start: bool,
    /// Rising-ankle frames required for heel-off detection.
    #[arg(long, default_value_t = synergy_core::kinematics::DEFAULT_HEEL_OFF_WINDOW)]
    pub window: usize,
    #[arg(long)]
    pub handedness: Option<Handedness>,
    /// Output file prefix; defaults to the subject.
    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Keypoint JSON or pair descriptor of the first motion.
    pub first: PathBuf,
    /// Keypoint JSON or pair descriptor of the second motion.
    pub second: PathBuf,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    /// JSON list of {label, file, bounds, handedness}.
    pub manifest: PathBuf,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ClusterInput {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Matrix CSV or JSON, e.g. as written by `matrix`.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub input: ClusterInput,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Mocap CSV (or its sidecar JSON) viewed at 0°.
    pub base: PathBuf,
    /// Other subjects' mocap; the base is always also compared with itself.
    pub probes: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DtwArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, default_value = "absolute")]
    pub dtw_cost: LocalCost,
    /// Sakoe-Chiba half-width; unconstrained when omitted.
    #[arg(long)]
    pub dtw_window: Option<usize>,
    #[arg(long, default_value = "none")]
    pub dtw_normalize: DtwNormalization,
}

/// Failure of a command, with the process exit code it maps to.
#[derive(Debug, thiserror::Error)]
#[error(transparent)]
pub struct CliError(#[from] pub Error);

impl CliError {
    /// 1 for computation errors, 2 for bad input.
    pub fn exit_code(&self) -> i32 {
        if self.0.is_domain() {
            1
        } else {
            2
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

struct Context<'a> {
    opts: &'a GlobalOpts,
    dis: DissimilarityOptions,
}

impl Context<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.opts.out_dir.join(name)
    }

    fn write(&self, name: &str, contents: &str) -> CliResult<PathBuf> {
        let path = self.path(name);
        fs::write(&path, contents).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
        Ok(path)
    }

    fn write_json<S: Serialize>(&self, name: &str, value: &S) -> CliResult<PathBuf> {
        let path = self.path(name);
        io::write_json(&path, value)?;
        Ok(path)
    }

    fn num(&self, v: f64) -> String {
        match self.opts.round {
            Some(d) => format!("{v:.d$}"),
            None => v.render(),
        }
    }
}

/// Characters outside `[A-Za-z0-9._-]` become `_`.
pub fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' })
        .collect()
}

/// Runs one command, writing its files and returning what goes to stdout.
pub fn run(cli: &Cli) -> CliResult<String> {
    let opts = &cli.global;
    fs::create_dir_all(&opts.out_dir).map_err(|e| Error::Io {
        path: opts.out_dir.clone(),
        source: e,
    })?;
    let ctx = Context {
        opts,
        dis: DissimilarityOptions {
            convolver: Convolver::new(opts.fft_crossover),
            check_frame_rate: opts.frame_rate_check == FrameRateCheck::Strict,
        },
    };
    match &cli.command {
        Command::Speeds(a) => cmd_speeds(&ctx, a),
        Command::Compare(a) => cmd_compare(&ctx, a),
        Command::Matrix(a) => cmd_matrix(&ctx, a),
        Command::Cluster(a) => cmd_cluster(&ctx, a),
        Command::Sweep(a) => cmd_sweep(&ctx, a),
        Command::Dtw(a) => cmd_dtw(&ctx, a),
    }
}

fn cmd_speeds(ctx: &Context, a: &SpeedsArgs) -> CliResult<String> {
    let mut seq = io::read_keypoints::<f64>(&a.keypoints)?;
    if let Some(h) = a.handedness {
        seq = seq.with_handedness(h);
    }
    let in_file = |e: Error| match e {
        Error::MissingJoint { .. } | Error::InvalidBounds { .. } | Error::NoSegmentStart(_) | Error::InvalidSignal(_) => {
            Error::Format {
                path: a.keypoints.clone(),
                message: e.to_string(),
            }
        }
        e => e,
    };
    let (ankle, _) = select_joints(&seq).map_err(in_file)?;
    let last = seq.frame_count() - 1;
    let end = a.end.unwrap_or(last);
    let start = match a.start {
        Some(s) => s,
        None if a.detect_start => {
            synergy_core::SegmentDetector { window: a.window }
                .detect(&seq, ankle, Some(end))
                .map_err(in_file)?
                .start
        }
        None => 0,
    };
    let bounds = SegmentBounds::new(start, end, seq.frame_count()).map_err(in_file)?;
    let pair = build_pair(&seq, bounds).map_err(in_file)?;

    let label = a.label.clone().unwrap_or_else(|| seq.subject().to_string());
    let stem = file_stem(&label);
    let first = bounds.start + 1;
    let ankle_csv = format!("{stem}_ankle.csv");
    let wrist_csv = format!("{stem}_wrist.csv");
    ctx.write(&ankle_csv, &io::format_speed_csv(first, pair.input()))?;
    ctx.write(&wrist_csv, &io::format_speed_csv(first, pair.output()))?;
    io::write_pair_file(
        ctx.path(&format!("{stem}.pair.json")),
        &PairFile {
            label: label.clone(),
            frame_rate: pair.frame_rate(),
            input: ankle_csv.into(),
            output: wrist_csv.into(),
        },
    )?;
    let frames = |s: &[f64]| s.iter().enumerate().map(|(i, &v)| ((first + i) as f64, v)).collect();
    let svg = plot::line_chart(
        &format!("Ankle and wrist speeds of {label}"),
        "frame",
        "speed [pixels/frame]",
        &[
            Series { name: "ankle", color: ORANGE, points: frames(pair.input()), markers: true },
            Series { name: "wrist", color: BLUE, points: frames(pair.output()), markers: true },
        ],
    );
    ctx.write(&format!("{stem}_speeds.svg"), &svg)?;
    Ok(format!(
        "{label}: frames {}..={} ({} samples), ankle peak {}, wrist peak {}\n",
        bounds.start,
        bounds.end,
        pair.len(),
        ctx.num(pair.input().iter().copied().fold(0.0, f64::max)),
        ctx.num(pair.output().iter().copied().fold(0.0, f64::max)),
    ))
}

fn load_two(a: &PairArgs) -> CliResult<(SignalPair64, SignalPair64)> {
    let p = load_motion(&a.first, None, None, None)?;
    let q = load_motion(&a.second, None, None, None)?;
    Ok((p, q))
}

fn cmd_compare(ctx: &Context, a: &PairArgs) -> CliResult<String> {
    let (p, q) = load_two(a)?;
    let cc = pair_cross_convolution(&p, &q, &ctx.dis)?;
    let dis = cc.dissimilarity()?;

    let stem = format!("compare_{}_{}", file_stem(p.label()), file_stem(q.label()));
    let mut csv = String::from("k,u,v\n");
    for (k, (u, v)) in cc.u.iter().zip(cc.v.iter()).enumerate() {
        csv.push_str(&format!("{k},{},{}\n", u.render(), v.render()));
    }
    ctx.write(&format!("{stem}.csv"), &csv)?;
    let idx = |c: &[f64]| c.iter().enumerate().map(|(k, &v)| (k as f64, v)).collect();
    let u_name = format!("u = {} ankle * {} wrist", p.label(), q.label());
    let v_name = format!("v = {} ankle * {} wrist", q.label(), p.label());
    let svg = plot::line_chart(
        &format!("Convolution vectors of {} and {} (Dis = {})", p.label(), q.label(), format_args!("{dis:.4}")),
        "k",
        "coefficient",
        &[
            Series { name: &u_name, color: BLUE, points: idx(&cc.u), markers: false },
            Series { name: &v_name, color: ORANGE, points: idx(&cc.v), markers: false },
        ],
    );
    ctx.write(&format!("{stem}.svg"), &svg)?;
    Ok(format!("{}\n", ctx.num(dis)))
}

fn matrix_table(ctx: &Context, m: &DissimilarityMatrix64) -> String {
    io::format_matrix_csv_with(m, |v| ctx.num(v))
}

fn cmd_matrix(ctx: &Context, a: &MatrixArgs) -> CliResult<String> {
    let pairs = load_manifest(&a.manifest)?;
    let m = build_matrix(&pairs, &ctx.dis)?;
    io::write_matrix_csv(ctx.path("matrix.csv"), &m)?;
    ctx.write_json("matrix.json", &m)?;
    Ok(matrix_table(ctx, &m))
}

#[derive(Serialize)]
struct DendrogramReport<'a> {
    #[serde(flatten)]
    tree: &'a MergeTree64,
    newick: String,
}

fn cmd_cluster(ctx: &Context, a: &ClusterArgs) -> CliResult<String> {
    let m = match (&a.input.manifest, &a.input.matrix) {
        (Some(manifest), _) => {
            let m = build_matrix(&load_manifest(manifest)?, &ctx.dis)?;
            io::write_matrix_csv(ctx.path("matrix.csv"), &m)?;
            ctx.write_json("matrix.json", &m)?;
            m
        }
        (None, Some(path)) => io::read_matrix(path)?,
        (None, None) => return Err(Error::InvalidArgument("give --manifest or --matrix".into()).into()),
    };
    if m.len() < 2 {
        return Err(Error::InvalidMatrix("clustering needs at least 2 motions".into()).into());
    }
    let tree = ward_cluster(&m);
    let newick = tree.to_newick();
    ctx.write_json(
        "dendrogram.json",
        &DendrogramReport {
            tree: &tree,
            newick: newick.clone(),
        },
    )?;
    ctx.write("dendrogram.nwk", &format!("{newick}\n"))?;
    ctx.write("dendrogram.svg", &plot::dendrogram("Ward dendrogram", &tree))?;

    let mut out = String::new();
    for mg in &tree.merges {
        out.push_str(&format!(
            "{} + {} -> {} at {}  [{}]\n",
            mg.left,
            mg.right,
            mg.id,
            ctx.num(mg.height),
            tree.member_labels(mg.id).join(", ")
        ));
    }
    out.push_str(&newick);
    out.push('\n');
    Ok(out)
}

#[derive(Serialize)]
struct SweepCurve<'a> {
    kind: &'static str,
    #[serde(flatten)]
    result: &'a AngleSweepResult64,
}

#[derive(Serialize)]
struct SmallAngleNote {
    limit_deg: f64,
    same_subject_max: Option<f64>,
    cross_subject_min: Option<f64>,
    /// Whether every same-subject value inside the limit is below every
    /// cross-subject value inside the limit.
    same_below_cross: Option<bool>,
}

#[derive(Serialize)]
struct SweepReport<'a> {
    base: &'a str,
    thetas: &'a [f64],
    curves: Vec<SweepCurve<'a>>,
    small_angle: SmallAngleNote,
}

fn cmd_sweep(ctx: &Context, a: &SweepArgs) -> CliResult<String> {
    let thetas = theta_grid(ctx.opts.theta_start, ctx.opts.theta_end, ctx.opts.theta_step)?;
    let base = io::read_mocap_trial::<f64>(&a.base)?;
    let probes = a
        .probes
        .iter()
        .map(io::read_mocap_trial::<f64>)
        .collect::<synergy_core::Result<Vec<_>>>()?;

    let mut results = vec![("same-subject", sweep(&base, &base, &thetas, &ctx.dis)?)];
    for probe in &probes {
        results.push(("cross-subject", sweep(&base, probe, &thetas, &ctx.dis)?));
    }

    let base_stem = file_stem(base.subject());
    let mut out = String::new();
    let mut series = Vec::new();
    let mut names = Vec::new();
    for (kind, r) in &results {
        let name = format!("sweep_{base_stem}_vs_{}.csv", file_stem(&r.probe_subject));
        let mut csv = String::from("theta_deg,dis\n");
        for e in &r.entries {
            csv.push_str(&format!("{},{}\n", e.theta.render(), e.dis.render()));
        }
        ctx.write(&name, &csv)?;
        out.push_str(&format!("{kind} {} vs {}: {name}\n", r.base_subject, r.probe_subject));
        for f in &r.failures {
            out.push_str(&format!("  theta {}: {}\n", f.theta.render(), f.error));
        }
        names.push(format!("{} vs {}", r.base_subject, r.probe_subject));
    }
    for ((kind, r), name) in results.iter().zip(&names) {
        series.push(Series {
            name,
            color: if *kind == "same-subject" { RED } else { GREEN },
            points: r.entries.iter().map(|e| (e.theta, e.dis)).collect(),
            markers: true,
        });
    }
    let svg = plot::line_chart(
        &format!("Dissimilarity against shooting angle, base {} at 0°", base.subject()),
        "theta [deg]",
        "Dis",
        &series,
    );
    ctx.write(&format!("sweep_{base_stem}.svg"), &svg)?;

    let inside = |r: &AngleSweepResult64| {
        r.entries
            .iter()
            .filter(|e| e.theta.abs() < SMALL_ANGLE_LIMIT_DEG)
            .map(|e| e.dis)
            .collect::<Vec<_>>()
    };
    let same_max = inside(&results[0].1).into_iter().reduce(f64::max);
    let cross_min = results[1..].iter().flat_map(|(_, r)| inside(r)).reduce(f64::min);
    let note = SmallAngleNote {
        limit_deg: SMALL_ANGLE_LIMIT_DEG,
        same_subject_max: same_max,
        cross_subject_min: cross_min,
        same_below_cross: same_max.zip(cross_min).map(|(s, c)| s < c),
    };
    if let Some(below) = note.same_below_cross {
        out.push_str(&format!(
            "|theta| < {SMALL_ANGLE_LIMIT_DEG}°: same-subject max {} {} cross-subject min {}\n",
            ctx.num(same_max.unwrap_or_default()),
            if below { "<" } else { ">=" },
            ctx.num(cross_min.unwrap_or_default())
        ));
    }
    let report = SweepReport {
        base: base.subject(),
        thetas: &thetas,
        curves: results.iter().map(|(kind, result)| SweepCurve { kind, result }).collect(),
        small_angle: note,
    };
    ctx.write_json(&format!("sweep_{base_stem}.json"), &report)?;
    Ok(out)
}

#[derive(Serialize)]
struct DtwReport<'a> {
    first: &'a str,
    second: &'a str,
    options: DtwOptions,
    dtw_input: f64,
    dtw_output: f64,
    dtw: f64,
    dissimilarity: f64,
}

fn cmd_dtw(ctx: &Context, a: &DtwArgs) -> CliResult<String> {
    let (p, q) = load_two(&a.pair)?;
    let options = DtwOptions {
        cost: a.dtw_cost,
        window: a.dtw_window,
        normalization: a.dtw_normalize,
    };
    let report = DtwReport {
        first: p.label(),
        second: q.label(),
        options,
        dtw_input: dtw_distance_with(p.input(), q.input(), &options)?,
        dtw_output: dtw_distance_with(p.output(), q.output(), &options)?,
        dtw: dtw_pair_distance(&p, &q, &options)?,
        dissimilarity: pair_cross_convolution(&p, &q, &ctx.dis)?.dissimilarity()?,
    };
    ctx.write_json(
        &format!("dtw_{}_{}.json", file_stem(p.label()), file_stem(q.label())),
        &report,
    )?;
    Ok(format!(
        "dtw {}\ndissimilarity {}\n",
        ctx.num(report.dtw),
        ctx.num(report.dissimilarity)
    ))
}

/// Entry point shared by the binary and tests.
pub fn run_args<I, T>(args: I) -> CliResult<String>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    run(&cli)
}
