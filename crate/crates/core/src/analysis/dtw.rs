//! Dynamic time warping, kept as a baseline for the cross-convolution metric.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signal::SignalPair;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalCost {
    #[default]
    Absolute,
    Squared,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DtwNormalization {
    #[default]
    None,
    /// Divide by `len(s) + len(t)`.
    SumOfLengths,
}

impl FromStr for LocalCost {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "absolute" | "abs" => Ok(LocalCost::Absolute),
            "squared" | "sq" => Ok(LocalCost::Squared),
            _ => Err(Error::InvalidArgument(format!("unknown DTW local cost `{s}`"))),
        }
    }
}

impl FromStr for DtwNormalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(DtwNormalization::None),
            "sum-of-lengths" => Ok(DtwNormalization::SumOfLengths),
            _ => Err(Error::InvalidArgument(format!("unknown DTW normalization `{s}`"))),
        }
    }
}

/// Defaults are the classic variant: absolute cost, no window, no normalization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DtwOptions {
    pub cost: LocalCost,
    /// Sakoe–Chiba band half-width; `None` for the full matrix.
    pub window: Option<usize>,
    pub normalization: DtwNormalization,
}

impl LocalCost {
    fn eval<T: Scalar>(self, a: T, b: T) -> T {
        match self {
            LocalCost::Absolute => (a - b).abs(),
            LocalCost::Squared => (a - b) * (a - b),
        }
    }
}

/// Classic DTW cost between `s` and `t`.
pub fn dtw_distance<T: Scalar>(s: &[T], t: &[T]) -> Result<T> {
    dtw_distance_with(s, t, &DtwOptions::default())
}

/// Minimum over warping paths of the summed local cost, using match, insert
/// and delete steps with unit weight.
pub fn dtw_distance_with<T: Scalar>(s: &[T], t: &[T], opts: &DtwOptions) -> Result<T> {
    if s.is_empty() || t.is_empty() {
        return Err(Error::Empty("DTW operand"));
    }
    let (n, m) = (s.len(), t.len());
    let window = match opts.window {
        Some(w) if w < n.abs_diff(m) => {
            return Err(Error::InvalidArgument(format!(
                "DTW window {w} is narrower than the length difference {}",
                n.abs_diff(m)
            )))
        }
        Some(w) => w,
        None => n.max(m),
    };

    let inf = T::infinity();
    let mut prev = vec![inf; m + 1];
    let mut cur = vec![inf; m + 1];
    prev[0] = T::zero();
    for i in 1..=n {
        cur.fill(inf);
        let lo = i.saturating_sub(window).max(1);
        let hi = (i + window).min(m);
        for j in lo..=hi {
            let best = prev[j - 1].min(prev[j]).min(cur[j - 1]);
            cur[j] = opts.cost.eval(s[i - 1], t[j - 1]) + best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let total = prev[m];
    Ok(match opts.normalization {
        DtwNormalization::None => total,
        DtwNormalization::SumOfLengths => total / T::of((n + m) as f64),
    })
}

/// Channel-by-channel DTW: input against input plus output against output.
pub fn dtw_pair_distance<T: Scalar>(p: &SignalPair<T>, q: &SignalPair<T>, opts: &DtwOptions) -> Result<T> {
    Ok(dtw_distance_with(p.input(), q.input(), opts)? + dtw_distance_with(p.output(), q.output(), opts)?)
}
