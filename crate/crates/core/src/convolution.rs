//! Exact integer cross-correlation.
//!
//! `correlate(x, y)[i] = sum_j x[i + j] * y[j]` for every full overlap of `y`
//! on `x`. Short (or sparse) patterns are summed directly; longer ones go
//! through a floating-point FFT in overlap-save blocks and are rounded back to
//! integers. Every transform is sized so its a-priori magnitude stays below
//! 2^40, which keeps rounding exact; larger operands are split into limbs.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::alphabet::Sequence;
use crate::error::{check_lengths, Error, Result};

/// Largest predicted `|c_i|` for which the transform path is used.
pub const MAGNITUDE_BOUND: u128 = 1 << 50;

/// Default pattern size (non-zero entries) at or below which direct summation is used.
pub const DEFAULT_CROSSOVER: usize = 64;

/// Magnitude budget of a single floating-point transform.
const TRANSFORM_BITS: u32 = 40;

pub type IntVector = Vec<i64>;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(len), p.plan_fft_inverse(len))
    })
}

/// Stateless correlation engine.
#[derive(Clone, Copy, Debug)]
pub struct Correlator {
    crossover: usize,
}

impl Default for Correlator {
    fn default() -> Self {
        Self {
            crossover: DEFAULT_CROSSOVER,
        }
    }
}

impl Correlator {
    pub fn with_crossover(crossover: usize) -> Self {
        Self { crossover }
    }

    /// Always takes the transform path when the magnitude bound allows it.
    pub fn transform_only() -> Self {
        Self { crossover: 0 }
    }

    pub fn crossover(&self) -> usize {
        self.crossover
    }

    /// Valid-mode correlation of `x` (length n) against `y` (length m),
    /// returning n - m + 1 values.
    pub fn correlate(&self, x: &[i64], y: &[i64]) -> Result<IntVector> {
        check_lengths(x.len(), y.len())?;
        let max_x = x.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as u128;
        let max_y = y.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as u128;
        let support = y.iter().filter(|&&v| v != 0).count();
        let predicted = support as u128 * max_x * max_y;
        if predicted > i64::MAX as u128 {
            return Err(Error::Precision {
                predicted,
                limit: i64::MAX as u128,
            });
        }
        let out_len = x.len() - y.len() + 1;
        if predicted == 0 {
            return Ok(vec![0; out_len]);
        }
        if support <= self.crossover || predicted > MAGNITUDE_BOUND {
            return Ok(direct(x, y));
        }
        match limb_bits(support as u128, max_x, max_y) {
            Some(bits) => Ok(transform(x, y, bits)),
            None => Ok(direct(x, y)),
        }
    }

    /// Number of positions `j` with `p_j = t_{i+j-1} = symbol`, per alignment.
    pub fn indicator_correlate(
        &self,
        text: &Sequence,
        pattern: &Sequence,
        symbol: u8,
    ) -> Result<IntVector> {
        let x = indicator(text, symbol);
        let y = indicator(pattern, symbol);
        self.correlate(&x, &y)
    }

    /// `sum_j w(i+j-1) * t_{i+j-1}^a * p_j^b` with `w(pos) = pos` (1-based) when
    /// `position_weighted`, else 1. Wild cards are rank 0 and drop out.
    pub fn power_correlate(
        &self,
        text: &Sequence,
        pattern: &Sequence,
        a: u32,
        b: u32,
        position_weighted: bool,
    ) -> Result<IntVector> {
        if !(1..=3).contains(&a) || !(1..=3).contains(&b) {
            return Err(Error::InvalidParameter(format!(
                "exponents must lie in 1..=3, got ({a}, {b})"
            )));
        }
        let x: Vec<i64> = text
            .ranks()
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let v = (r as i64).pow(a);
                if position_weighted {
                    v * (i as i64 + 1)
                } else {
                    v
                }
            })
            .collect();
        let y: Vec<i64> = pattern.ranks().iter().map(|&r| (r as i64).pow(b)).collect();
        self.correlate(&x, &y)
    }
}

pub(crate) fn indicator(seq: &Sequence, symbol: u8) -> Vec<i64> {
    seq.ranks().iter().map(|&r| (r == symbol) as i64).collect()
}

fn direct(x: &[i64], y: &[i64]) -> IntVector {
    let support: Vec<(usize, i64)> = y
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0)
        .map(|(j, &v)| (j, v))
        .collect();
    (0..=x.len() - y.len())
        .map(|i| support.iter().map(|&(j, v)| x[i + j] * v).sum())
        .collect()
}

fn bit_len(v: u128) -> u32 {
    128 - v.leading_zeros()
}

/// Chooses the limb width so every per-degree transform stays within
/// `TRANSFORM_BITS`. `Some(0)` means no splitting is needed.
fn limb_bits(support: u128, max_x: u128, max_y: u128) -> Option<u32> {
    if support * max_x * max_y <= 1 << TRANSFORM_BITS {
        return Some(0);
    }
    let widest = bit_len(max_x).max(bit_len(max_y));
    for bits in (1..widest).rev() {
        let lx = bit_len(max_x).div_ceil(bits) as u128;
        let ly = bit_len(max_y).div_ceil(bits) as u128;
        let limb = (1u128 << bits) - 1;
        let per_degree = support * limb.min(max_x) * limb.min(max_y) * lx.min(ly);
        if per_degree <= 1 << TRANSFORM_BITS {
            return Some(bits);
        }
    }
    None
}

/// Splits signed values into `ceil(width / bits)` signed limbs, lowest first.
fn split_limbs(v: &[i64], bits: u32) -> Vec<Vec<i64>> {
    if bits == 0 {
        return vec![v.to_vec()];
    }
    let max = v.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) as u128;
    let count = bit_len(max).div_ceil(bits).max(1);
    let mask = (1u64 << bits) - 1;
    (0..count)
        .map(|l| {
            v.iter()
                .map(|&x| {
                    let limb = ((x.unsigned_abs() >> (l * bits)) & mask) as i64;
                    if x < 0 {
                        -limb
                    } else {
                        limb
                    }
                })
                .collect()
        })
        .collect()
}

fn transform_len(n: usize, m: usize) -> usize {
    let block = 2 * (2 * m).next_power_of_two();
    n.next_power_of_two().min(block).max(m.next_power_of_two())
}

fn transform(x: &[i64], y: &[i64], bits: u32) -> IntVector {
    let (n, m) = (x.len(), y.len());
    let out_len = n - m + 1;
    let size = transform_len(n, m);
    let (forward, inverse) = plan(size);
    let scale = 1.0 / size as f64;

    let x_limbs = split_limbs(x, bits);
    let y_limbs = split_limbs(y, bits);
    let degrees = x_limbs.len() + y_limbs.len() - 1;

    let y_spectra: Vec<Vec<Complex<f64>>> = y_limbs
        .iter()
        .map(|limb| {
            let mut buf = vec![Complex::new(0.0, 0.0); size];
            for (slot, &v) in buf.iter_mut().zip(limb) {
                slot.re = v as f64;
            }
            forward.process(&mut buf);
            buf.iter_mut().for_each(|c| *c = c.conj());
            buf
        })
        .collect();

    let mut out = vec![0i64; out_len];
    let mut x_spectra = vec![vec![Complex::new(0.0, 0.0); size]; x_limbs.len()];
    let mut acc = vec![Complex::new(0.0, 0.0); size];
    let step = size - m + 1;
    let mut start = 0;
    while start < out_len {
        let end = (start + size).min(n);
        for (spec, limb) in x_spectra.iter_mut().zip(&x_limbs) {
            spec.iter_mut().for_each(|c| *c = Complex::new(0.0, 0.0));
            for (slot, &v) in spec.iter_mut().zip(&limb[start..end]) {
                slot.re = v as f64;
            }
            forward.process(spec);
        }
        let valid = step.min(out_len - start);
        for degree in 0..degrees {
            acc.iter_mut().for_each(|c| *c = Complex::new(0.0, 0.0));
            for (a, xs) in x_spectra.iter().enumerate() {
                let Some(b) = degree.checked_sub(a) else {
                    break;
                };
                let Some(ys) = y_spectra.get(b) else { continue };
                for ((slot, xv), yv) in acc.iter_mut().zip(xs).zip(ys) {
                    *slot += xv * yv;
                }
            }
            inverse.process(&mut acc);
            let shift = degree as u32 * bits;
            for (o, c) in out[start..start + valid].iter_mut().zip(&acc) {
                *o += ((c.re * scale).round() as i64) << shift;
            }
        }
        start += step;
    }
    out
}
