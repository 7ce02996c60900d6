//! Pairwise matrices, Ward clustering and the DTW baseline.

pub mod dtw;
pub mod matrix;
pub mod ward;

pub use dtw::{dtw_distance, dtw_distance_with, dtw_pair_distance, DtwNormalization, DtwOptions, LocalCost};
pub use matrix::{build_matrix, DissimilarityMatrix};
pub use ward::{ward_cluster, Merge, MergeTree};
