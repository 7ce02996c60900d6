//! Signals, convolution and the cross-convolution dissimilarity.
//!
//! A motion is reduced to an (input, output) pair of speed signals, e.g.
//! ankle speed driving wrist speed. Two motions `(a, b)` and `(x, y)` share
//! coordination dynamics when `a * y == x * b`, the polynomial form of
//! `B/A == Y/X`. The dissimilarity compares the two convolution vectors
//! without ever dividing by a transfer function.

use std::ops::Deref;

use num_traits::Num;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::scalar::{all_finite, Scalar};

/// Minimum length of both operands before [`Convolver`] switches to the FFT path.
pub const DEFAULT_FFT_CROSSOVER: usize = 64;

/// A finite, uniformly sampled real time series.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal<T> {
    samples: Vec<T>,
    frame_rate: f64,
}

impl<T: Scalar> Signal<T> {
    pub fn new(samples: Vec<T>, frame_rate: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidSignal(format!(
                "need at least 2 samples, got {}",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidSignal(format!("sample {i} is not finite")));
        }
        if !(frame_rate.is_finite() && frame_rate > 0.0) {
            return Err(Error::InvalidSignal(format!(
                "frame rate must be positive, got {frame_rate}"
            )));
        }
        Ok(Signal {
            samples,
            frame_rate,
        })
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn frame_rate(&self) -> f64 {
        self.frame_rate
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|s| s.is_zero())
    }

    /// Multiplies every sample by `c`.
    pub fn scaled(&self, c: T) -> Result<Self> {
        Signal::new(self.samples.iter().map(|&s| s * c).collect(), self.frame_rate)
    }
}

impl<T> Deref for Signal<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.samples
    }
}

/// Input and output signals of one motion, sampled on the same frames.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalPair<T> {
    input: Signal<T>,
    output: Signal<T>,
    label: String,
}

impl<T: Scalar> SignalPair<T> {
    pub fn new(input: Signal<T>, output: Signal<T>, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if input.len() != output.len() {
            return Err(Error::InvalidSignal(format!(
                "{label}: input has {} samples but output has {}",
                input.len(),
                output.len()
            )));
        }
        if input.frame_rate() != output.frame_rate() {
            return Err(Error::FrameRateMismatch(
                input.frame_rate(),
                output.frame_rate(),
            ));
        }
        Ok(SignalPair {
            input,
            output,
            label,
        })
    }

    /// Builds a pair straight from sample vectors.
    pub fn from_samples(
        input: Vec<T>,
        output: Vec<T>,
        frame_rate: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        SignalPair::new(
            Signal::new(input, frame_rate)?,
            Signal::new(output, frame_rate)?,
            label,
        )
    }

    pub fn input(&self) -> &Signal<T> {
        &self.input
    }

    pub fn output(&self) -> &Signal<T> {
        &self.output
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn frame_rate(&self) -> f64 {
        self.input.frame_rate()
    }

    pub fn len(&self) -> usize {
        self.input.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Scales both channels by the same factor.
    pub fn scaled(&self, c: T) -> Result<Self> {
        SignalPair::new(self.input.scaled(c)?, self.output.scaled(c)?, &*self.label)
    }
}

/// Coefficients of a product polynomial, `len(f) + len(g) - 1` long.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvolutionVector<T>(Vec<T>);

impl<T> ConvolutionVector<T> {
    pub fn coefficients(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }
}

impl<T> Deref for ConvolutionVector<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T: Scalar> ConvolutionVector<T> {
    /// Euclidean norm.
    pub fn norm(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, &c| acc + c * c).sqrt()
    }
}

/// Direct-form linear convolution, `out[k] = sum_l f[l] * g[k - l]`.
///
/// Works for any ring-like sample type, so integer and rational inputs are
/// convolved exactly.
pub fn convolve<T: Num + Copy>(f: &[T], g: &[T]) -> Result<ConvolutionVector<T>> {
    if f.is_empty() || g.is_empty() {
        return Err(Error::Empty("convolution operand"));
    }
    let n = f.len() + g.len() - 1;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let lo = k.saturating_sub(g.len() - 1);
        let hi = k.min(f.len() - 1);
        let mut acc = T::zero();
        for l in lo..=hi {
            acc = acc + f[l] * g[k - l];
        }
        out.push(acc);
    }
    Ok(ConvolutionVector(out))
}

/// Convolution through the FFT regardless of operand length.
pub fn convolve_fft<T: Scalar>(f: &[T], g: &[T]) -> Result<ConvolutionVector<T>> {
    if f.is_empty() || g.is_empty() {
        return Err(Error::Empty("convolution operand"));
    }
    let n = f.len() + g.len() - 1;
    let size = n.next_power_of_two();

    let mut planner = FftPlanner::<T>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);

    let lift = |xs: &[T]| {
        let mut buf = vec![Complex::new(T::zero(), T::zero()); size];
        for (slot, &x) in buf.iter_mut().zip(xs) {
            slot.re = x;
        }
        buf
    };
    let mut fa = lift(f);
    let mut ga = lift(g);
    forward.process(&mut fa);
    forward.process(&mut ga);
    for (a, b) in fa.iter_mut().zip(&ga) {
        *a = *a * *b;
    }
    inverse.process(&mut fa);

    let scale = T::one() / T::of(size as f64);
    Ok(ConvolutionVector(
        fa[..n].iter().map(|c| c.re * scale).collect(),
    ))
}

/// Chooses between direct and FFT convolution by operand length.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Convolver {
    crossover: usize,
}

impl Default for Convolver {
    fn default() -> Self {
        Convolver {
            crossover: DEFAULT_FFT_CROSSOVER,
        }
    }
}

impl Convolver {
    /// The FFT path is taken once both operands are longer than `crossover`.
    pub fn new(crossover: usize) -> Self {
        Convolver { crossover }
    }

    /// Never uses the FFT.
    pub fn direct() -> Self {
        Convolver {
            crossover: usize::MAX,
        }
    }

    pub fn crossover(&self) -> usize {
        self.crossover
    }

    pub fn convolve<T: Scalar>(&self, f: &[T], g: &[T]) -> Result<ConvolutionVector<T>> {
        if !all_finite(f) || !all_finite(g) {
            return Err(Error::InvalidSignal(
                "convolution operand has non-finite samples".into(),
            ));
        }
        if f.len().min(g.len()) > self.crossover {
            convolve_fft(f, g)
        } else {
            convolve(f, g)
        }
    }
}

/// [`convolve`] with the default FFT crossover.
pub fn convolve_fast<T: Scalar>(f: &[T], g: &[T]) -> Result<ConvolutionVector<T>> {
    Convolver::default().convolve(f, g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DissimilarityOptions {
    pub convolver: Convolver,
    /// Reject pairs whose frame rates differ.
    pub check_frame_rate: bool,
}

impl Default for DissimilarityOptions {
    fn default() -> Self {
        DissimilarityOptions {
            convolver: Convolver::default(),
            check_frame_rate: true,
        }
    }
}

/// Both convolution vectors of a comparison: `u = a * y`, `v = x * b`.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossConvolution<T> {
    pub u: ConvolutionVector<T>,
    pub v: ConvolutionVector<T>,
}

impl<T: Scalar> CrossConvolution<T> {
    /// `|u - v|^2 / (|u| |v|)`.
    pub fn dissimilarity(&self) -> Result<T> {
        let nu = self.u.norm();
        let nv = self.v.norm();
        if nu.is_zero() || nv.is_zero() {
            let which = if nu.is_zero() { "u" } else { "v" };
            return Err(Error::DegenerateSignal(format!(
                "convolution vector {which} has zero norm"
            )));
        }
        let num = self
            .u
            .iter()
            .zip(self.v.iter())
            .fold(T::zero(), |acc, (&p, &q)| acc + (p - q) * (p - q));
        Ok(num / (nu * nv))
    }
}

/// Convolution vectors of the first motion `(a, b)` against the second `(x, y)`.
pub fn cross_convolve<T: Scalar>(
    a: &[T],
    b: &[T],
    x: &[T],
    y: &[T],
    convolver: &Convolver,
) -> Result<CrossConvolution<T>> {
    if a.len() != b.len() || x.len() != y.len() {
        return Err(Error::InvalidArgument(
            "input and output of a motion must have equal length".into(),
        ));
    }
    Ok(CrossConvolution {
        u: convolver.convolve(a, y)?,
        v: convolver.convolve(x, b)?,
    })
}

/// Dissimilarity on raw sample slices, for motions `(a, b)` and `(x, y)`.
pub fn cross_dissimilarity<T: Scalar>(
    a: &[T],
    b: &[T],
    x: &[T],
    y: &[T],
    convolver: &Convolver,
) -> Result<T> {
    cross_convolve(a, b, x, y, convolver)?.dissimilarity()
}

/// Dissimilarity of two motions with default options.
pub fn dissimilarity<T: Scalar>(p: &SignalPair<T>, q: &SignalPair<T>) -> Result<T> {
    dissimilarity_with(p, q, &DissimilarityOptions::default())
}

pub fn dissimilarity_with<T: Scalar>(
    p: &SignalPair<T>,
    q: &SignalPair<T>,
    opts: &DissimilarityOptions,
) -> Result<T> {
    pair_cross_convolution(p, q, opts)?.dissimilarity()
}

/// Validates two pairs and returns their convolution vectors.
pub fn pair_cross_convolution<T: Scalar>(
    p: &SignalPair<T>,
    q: &SignalPair<T>,
    opts: &DissimilarityOptions,
) -> Result<CrossConvolution<T>> {
    if opts.check_frame_rate && p.frame_rate() != q.frame_rate() {
        return Err(Error::FrameRateMismatch(p.frame_rate(), q.frame_rate()));
    }
    for pair in [p, q] {
        for (channel, signal) in [("input", pair.input()), ("output", pair.output())] {
            if signal.is_zero() {
                return Err(Error::DegenerateSignal(format!(
                    "{}: {channel} channel is all zero",
                    pair.label()
                )));
            }
        }
    }
    cross_convolve(p.input(), p.output(), q.input(), q.output(), &opts.convolver)
}
