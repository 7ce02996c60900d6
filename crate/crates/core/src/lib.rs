//! Dissimilarity of synergistic body coordination.
//!
//! Each motion is an LTI system from one segment's speed (the ankle) to
//! another's (the wrist). Two motions are compared by cross-convolving their
//! signals, which tolerates different durations and camera distances and
//! applies no temporal warping.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix it to `f64`, which is what the command-line tool uses.
//!
//! ```
//! use synergy_core::{dissimilarity, SignalPair64};
//!
//! let p = SignalPair64::from_samples(vec![1.0, 2.0, 1.0], vec![0.5, 1.5, 1.0], 30.0, "p")?;
//! let q = p.scaled(3.0)?;
//! assert!(dissimilarity(&p, &q)? < 1e-12);
//! # Ok::<(), synergy_core::Error>(())
//! ```

pub mod analysis;
pub mod error;
pub mod io;
pub mod kinematics;
pub mod projection;
pub mod scalar;
pub mod signal;

pub use analysis::{
    build_matrix, dtw_distance, dtw_distance_with, dtw_pair_distance, ward_cluster, DissimilarityMatrix,
    DtwNormalization, DtwOptions, LocalCost, Merge, MergeTree,
};
pub use error::{Error, Result};
pub use kinematics::{
    build_pair, build_pair_with_joints, detect_segment, joint_speeds, select_joints, speed_series, Handedness,
    Keypoint, KeypointSequence, SegmentBounds, SegmentDetector,
};
pub use projection::{
    default_theta_grid, project, sweep, theta_grid, AngleSweepResult, MocapSequence, MocapTrial, Point3,
};
pub use scalar::Scalar;
pub use signal::{
    convolve, convolve_fast, convolve_fft, cross_dissimilarity, dissimilarity, dissimilarity_with,
    pair_cross_convolution, ConvolutionVector, Convolver, CrossConvolution, DissimilarityOptions, Signal,
    SignalPair, DEFAULT_FFT_CROSSOVER,
};

pub type Signal64 = Signal<f64>;
pub type SignalPair64 = SignalPair<f64>;
pub type ConvolutionVector64 = ConvolutionVector<f64>;
pub type KeypointSequence64 = KeypointSequence<f64>;
pub type MocapSequence64 = MocapSequence<f64>;
pub type MocapTrial64 = MocapTrial<f64>;
pub type AngleSweepResult64 = AngleSweepResult<f64>;
pub type DissimilarityMatrix64 = DissimilarityMatrix<f64>;
pub type MergeTree64 = MergeTree<f64>;

pub type Signal32 = Signal<f32>;
pub type SignalPair32 = SignalPair<f32>;
