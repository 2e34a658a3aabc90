//! Reference transforms.
//!
//! The direct sums evaluate the windowed DFT term by term with their own
//! kernel tables. The per-window FFTs use decimation in time with the same
//! combination order as the tree engines: the level-`l` value for a
//! subsequence is `even + w * odd`, where `even` is the half that starts
//! first and `w` is read from the full-size twiddle table. Both routes
//! therefore produce bitwise identical results.

use std::f64::consts::PI;

use crate::array::{row_major_strides, CoefficientArray, NdArray};
use crate::error::{Result, SwdftError};
use crate::memory::{MemoryBudget, MemoryPlan};
use crate::twiddle::{make_twiddles, TwiddleVector};
use crate::window::WindowSpec;
use crate::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `table[r] = exp(-2*pi*i*r/n)`, evaluated directly.
fn kernel_table(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|r| {
            let theta = -2.0 * PI * r as f64 / n as f64;
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect()
}

/// `out[k] = sum_j x[j] exp(-2*pi*i*j*k/n)` for any length.
pub fn dft_naive(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let kernel = kernel_table(n);
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(j, &v)| v * kernel[(j * k) % n])
                .sum()
        })
        .collect()
}

fn check_rank(x: &NdArray, expected: usize) -> Result<()> {
    if x.rank() != expected {
        return Err(SwdftError::RankMismatch {
            expected,
            found: x.rank(),
        });
    }
    Ok(())
}

fn prepare(x: &NdArray, spec: &WindowSpec, budget: MemoryBudget) -> Result<CoefficientArray> {
    spec.check_fits(x.dims())?;
    MemoryPlan::output_only(x.dims(), spec)?.check(budget)?;
    CoefficientArray::zeros(x.dims(), spec)
}

pub fn swdft_1d_naive(x: &NdArray, spec: &WindowSpec) -> Result<CoefficientArray> {
    swdft_1d_naive_budgeted(x, spec, MemoryBudget::default())
}

pub fn swdft_1d_naive_budgeted(
    x: &NdArray,
    spec: &WindowSpec,
    budget: MemoryBudget,
) -> Result<CoefficientArray> {
    check_rank(x, 1)?;
    let mut out = prepare(x, spec, budget)?;
    let n = spec.size(0);
    for q in 0..out.positions()[0] {
        // window [p - n + 1, p] with p = q + n - 1
        let coeffs = dft_naive(&x.data()[q..q + n]);
        out.window_flat_mut(q).copy_from_slice(&coeffs);
    }
    out.normalize(spec.normalization())
}

pub fn swdft_2d_naive(x: &NdArray, spec: &WindowSpec) -> Result<CoefficientArray> {
    swdft_2d_naive_budgeted(x, spec, MemoryBudget::default())
}

pub fn swdft_2d_naive_budgeted(
    x: &NdArray,
    spec: &WindowSpec,
    budget: MemoryBudget,
) -> Result<CoefficientArray> {
    check_rank(x, 2)?;
    let mut out = prepare(x, spec, budget)?;
    let (n0, n1) = (spec.size(0), spec.size(1));
    let (pos0, pos1) = (out.positions()[0], out.positions()[1]);
    let cols = x.dims()[1];
    let w0 = kernel_table(n0);
    let w1 = kernel_table(n1);
    let data = x.data();
    for q0 in 0..pos0 {
        for q1 in 0..pos1 {
            let window = out.window_flat_mut(q0 * pos1 + q1);
            for k0 in 0..n0 {
                for k1 in 0..n1 {
                    let mut sum = ZERO;
                    for j0 in 0..n0 {
                        let row = &data[(q0 + j0) * cols + q1..][..n1];
                        let outer = w0[(j0 * k0) % n0];
                        for (j1, &v) in row.iter().enumerate() {
                            sum += v * (outer * w1[(j1 * k1) % n1]);
                        }
                    }
                    window[k0 * n1 + k1] = sum;
                }
            }
        }
    }
    out.normalize(spec.normalization())
}

/// Calls `f` with every multi-index in the box `0 <= idx < extents`, row-major.
fn for_each_index(extents: &[usize], mut f: impl FnMut(&[usize])) {
    if extents.contains(&0) {
        return;
    }
    let mut idx = vec![0; extents.len()];
    loop {
        f(&idx);
        let mut d = extents.len();
        loop {
            if d == 0 {
                return;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < extents[d] {
                break;
            }
            idx[d] = 0;
        }
    }
}

pub fn swdft_kd_naive(x: &NdArray, spec: &WindowSpec) -> Result<CoefficientArray> {
    swdft_kd_naive_budgeted(x, spec, MemoryBudget::default())
}

pub fn swdft_kd_naive_budgeted(
    x: &NdArray,
    spec: &WindowSpec,
    budget: MemoryBudget,
) -> Result<CoefficientArray> {
    let mut out = prepare(x, spec, budget)?;
    let sizes = spec.sizes();
    let kernels: Vec<Vec<Complex64>> = sizes.iter().map(|&n| kernel_table(n)).collect();
    let positions = out.positions().to_vec();
    let mut flat = 0;
    let mut sample = vec![0; sizes.len()];
    for_each_index(&positions, |q| {
        let window = out.window_flat_mut(flat);
        let mut freq_flat = 0;
        for_each_index(&sizes, |k| {
            let mut sum = ZERO;
            for_each_index(&sizes, |j| {
                let mut kernel = Complex64::new(1.0, 0.0);
                for d in 0..sizes.len() {
                    kernel *= kernels[d][(j[d] * k[d]) % sizes[d]];
                    sample[d] = q[d] + j[d];
                }
                sum += x[&sample[..]] * kernel;
            });
            window[freq_flat] = sum;
            freq_flat += 1;
        });
        flat += 1;
    });
    out.normalize(spec.normalization())
}

/// Natural-order radix-2 FFT sharing the tree engines' arithmetic.
#[derive(Debug, Clone)]
pub struct Radix2Fft {
    twiddles: TwiddleVector,
    levels: u32,
    scratch: Vec<Complex64>,
}

impl Radix2Fft {
    pub fn new(n: usize) -> Result<Self> {
        let twiddles = make_twiddles(n)?;
        Ok(Radix2Fft {
            levels: n.trailing_zeros(),
            twiddles,
            scratch: vec![ZERO; n],
        })
    }

    pub fn len(&self) -> usize {
        self.twiddles.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Transforms `buf` in place; `buf.len()` must equal [`Radix2Fft::len`].
    ///
    /// At level `l` the buffer holds `n / 2^l` groups of `2^l` values; group
    /// `g` is the DFT of `x[g], x[g + s], x[g + 2s], ...` with `s = n / 2^l`.
    pub fn process(&mut self, buf: &mut [Complex64]) {
        let n = self.len();
        assert_eq!(buf.len(), n, "FFT length mismatch");
        let mut src: &mut [Complex64] = buf;
        let mut dst: &mut [Complex64] = &mut self.scratch;
        for level in 1..=self.levels {
            let width = 1usize << level;
            let half = width >> 1;
            let stride = n >> level;
            for g in 0..stride {
                let even = &src[g * half..][..half];
                let odd = &src[(g + stride) * half..][..half];
                let out = &mut dst[g * width..][..width];
                for (i, slot) in out.iter_mut().enumerate() {
                    let r = i & (half - 1);
                    *slot = even[r] + self.twiddles[i * stride] * odd[r];
                }
            }
            std::mem::swap(&mut src, &mut dst);
        }
        if self.levels % 2 == 1 {
            // result landed in scratch
            dst.copy_from_slice(src);
        }
    }
}

pub fn fft_radix2(x: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut fft = Radix2Fft::new(x.len())?;
    let mut buf = x.to_vec();
    fft.process(&mut buf);
    Ok(buf)
}

pub fn swfft_1d(x: &NdArray, spec: &WindowSpec) -> Result<CoefficientArray> {
    swfft_1d_budgeted(x, spec, MemoryBudget::default())
}

pub fn swfft_1d_budgeted(
    x: &NdArray,
    spec: &WindowSpec,
    budget: MemoryBudget,
) -> Result<CoefficientArray> {
    check_rank(x, 1)?;
    let mut out = prepare(x, spec, budget)?;
    let n = spec.size(0);
    let mut fft = Radix2Fft::new(n)?;
    for q in 0..out.positions()[0] {
        let window = out.window_flat_mut(q);
        window.copy_from_slice(&x.data()[q..q + n]);
        fft.process(window);
    }
    out.normalize(spec.normalization())
}

pub fn swfft_2d(x: &NdArray, spec: &WindowSpec) -> Result<CoefficientArray> {
    swfft_2d_budgeted(x, spec, MemoryBudget::default())
}

/// Row FFTs followed by column FFTs in every window.
pub fn swfft_2d_budgeted(
    x: &NdArray,
    spec: &WindowSpec,
    budget: MemoryBudget,
) -> Result<CoefficientArray> {
    check_rank(x, 2)?;
    let mut out = prepare(x, spec, budget)?;
    let (n0, n1) = (spec.size(0), spec.size(1));
    let (pos0, pos1) = (out.positions()[0], out.positions()[1]);
    let cols = x.dims()[1];
    let mut row_fft = Radix2Fft::new(n1)?;
    let mut col_fft = Radix2Fft::new(n0)?;
    let mut column = vec![ZERO; n0];
    let data = x.data();
    for q0 in 0..pos0 {
        for q1 in 0..pos1 {
            let window = out.window_flat_mut(q0 * pos1 + q1);
            for j0 in 0..n0 {
                let row = &mut window[j0 * n1..][..n1];
                row.copy_from_slice(&data[(q0 + j0) * cols + q1..][..n1]);
                row_fft.process(row);
            }
            for k1 in 0..n1 {
                for (j0, slot) in column.iter_mut().enumerate() {
                    *slot = window[j0 * n1 + k1];
                }
                col_fft.process(&mut column);
                for (k0, &v) in column.iter().enumerate() {
                    window[k0 * n1 + k1] = v;
                }
            }
        }
    }
    out.normalize(spec.normalization())
}

pub fn swfft_kd(x: &NdArray, spec: &WindowSpec) -> Result<CoefficientArray> {
    swfft_kd_budgeted(x, spec, MemoryBudget::default())
}

/// 1D FFTs along the last dimension first, then each earlier dimension.
pub fn swfft_kd_budgeted(
    x: &NdArray,
    spec: &WindowSpec,
    budget: MemoryBudget,
) -> Result<CoefficientArray> {
    let mut out = prepare(x, spec, budget)?;
    let sizes = spec.sizes();
    let rank = sizes.len();
    let strides = row_major_strides(&sizes);
    let mut ffts = sizes
        .iter()
        .map(|&n| Radix2Fft::new(n))
        .collect::<Result<Vec<_>>>()?;
    let positions = out.positions().to_vec();
    let mut flat = 0;
    let mut sample = vec![0; rank];
    let mut line = Vec::new();
    for_each_index(&positions, |q| {
        let window = out.window_flat_mut(flat);
        let mut f = 0;
        for_each_index(&sizes, |j| {
            for d in 0..rank {
                sample[d] = q[d] + j[d];
            }
            window[f] = x[&sample[..]];
            f += 1;
        });
        for d in (0..rank).rev() {
            let mut others = sizes.clone();
            others[d] = 1;
            line.resize(sizes[d], ZERO);
            for_each_index(&others, |base| {
                let start: usize = base.iter().zip(&strides).map(|(i, s)| i * s).sum();
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = window[start + t * strides[d]];
                }
                ffts[d].process(&mut line);
                for (t, &v) in line.iter().enumerate() {
                    window[start + t * strides[d]] = v;
                }
            });
        }
        flat += 1;
    });
    out.normalize(spec.normalization())
}
