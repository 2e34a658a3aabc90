use std::ops::{Index, IndexMut};

use crate::error::{Result, SwdftError};
use crate::window::{Normalization, WindowSpec};
use crate::Complex64;

/// Row-major strides for `dims`.
pub fn row_major_strides(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; dims.len()];
    for d in (0..dims.len().saturating_sub(1)).rev() {
        strides[d] = strides[d + 1] * dims[d + 1];
    }
    strides
}

/// Zero-filled buffer. Large requests come straight from the allocator's
/// zeroed pages, so untouched regions cost nothing.
pub(crate) fn zeroed(len: usize) -> Vec<Complex64> {
    bytemuck::zeroed_vec(len)
}

/// Dense row-major complex array.
#[derive(Debug, Clone, PartialEq)]
pub struct NdArray {
    dims: Vec<usize>,
    strides: Vec<usize>,
    data: Vec<Complex64>,
}

impl NdArray {
    pub fn zeros(dims: &[usize]) -> Self {
        let len = dims.iter().product();
        NdArray {
            dims: dims.to_vec(),
            strides: row_major_strides(dims),
            data: zeroed(len),
        }
    }

    pub fn from_vec(dims: &[usize], data: Vec<Complex64>) -> Result<Self> {
        let len: usize = dims.iter().product();
        if dims.is_empty() || len != data.len() {
            return Err(SwdftError::Shape(format!(
                "shape {dims:?} needs {len} elements, got {}",
                data.len()
            )));
        }
        Ok(NdArray {
            dims: dims.to_vec(),
            strides: row_major_strides(dims),
            data,
        })
    }

    /// Like [`NdArray::from_vec`], rejecting NaN and infinite components.
    pub fn from_finite(dims: &[usize], data: Vec<Complex64>) -> Result<Self> {
        if let Some(i) = data.iter().position(|z| !z.is_finite()) {
            return Err(SwdftError::NonFinite(i));
        }
        Self::from_vec(dims, data)
    }

    pub fn from_real(dims: &[usize], data: &[f64]) -> Result<Self> {
        Self::from_finite(dims, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_fn(dims: &[usize], mut f: impl FnMut(&[usize]) -> Complex64) -> Self {
        let mut out = Self::zeros(dims);
        let mut idx = vec![0; dims.len()];
        for offset in 0..out.data.len() {
            out.unravel_into(offset, &mut idx);
            out.data[offset] = f(&idx);
        }
        out
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.dims.len());
        debug_assert!(index.iter().zip(&self.dims).all(|(i, n)| i < n));
        index.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn unravel(&self, offset: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims.len()];
        self.unravel_into(offset, &mut idx);
        idx
    }

    fn unravel_into(&self, mut offset: usize, idx: &mut [usize]) {
        for (slot, &stride) in idx.iter_mut().zip(&self.strides) {
            *slot = offset / stride;
            offset %= stride;
        }
    }

    pub fn get(&self, index: &[usize]) -> Option<&Complex64> {
        if index.len() != self.dims.len() || index.iter().zip(&self.dims).any(|(i, n)| i >= n) {
            return None;
        }
        self.data.get(self.offset(index))
    }

    /// Output axis `a` is input axis `axes[a]`.
    pub fn permute_axes(&self, axes: &[usize]) -> Result<NdArray> {
        let mut seen = vec![false; self.rank()];
        if axes.len() != self.rank()
            || axes
                .iter()
                .any(|&a| a >= self.rank() || std::mem::replace(&mut seen[a], true))
        {
            return Err(SwdftError::Shape(format!(
                "{axes:?} is not a permutation of {} axes",
                self.rank()
            )));
        }
        let dims: Vec<usize> = axes.iter().map(|&a| self.dims[a]).collect();
        let mut src = vec![0; self.rank()];
        Ok(NdArray::from_fn(&dims, |idx| {
            for (a, &i) in axes.iter().zip(idx) {
                src[*a] = i;
            }
            self[&src[..]]
        }))
    }

    /// Element-wise maximum of `|a - b|`; `None` if the shapes differ.
    pub fn max_abs_diff(&self, other: &NdArray) -> Option<f64> {
        (self.dims == other.dims).then(|| {
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        })
    }
}

impl Index<&[usize]> for NdArray {
    type Output = Complex64;

    fn index(&self, index: &[usize]) -> &Complex64 {
        &self.data[self.offset(index)]
    }
}

impl IndexMut<&[usize]> for NdArray {
    fn index_mut(&mut self, index: &[usize]) -> &mut Complex64 {
        let offset = self.offset(index);
        &mut self.data[offset]
    }
}

/// Sliding-window coefficients, shape `P_0 x ... x P_{k-1} x n_0 x ... x n_{k-1}`.
///
/// Position index `q` corresponds to the window whose last sample sits at
/// `p = q + n - 1` in the source array.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientArray {
    array: NdArray,
    source_dims: Vec<usize>,
    window: WindowSpec,
}

impl CoefficientArray {
    /// Zeroed, unnormalized output for `source_dims` under `window`.
    pub fn zeros(source_dims: &[usize], window: &WindowSpec) -> Result<Self> {
        let positions = window.positions(source_dims)?;
        let mut dims = positions;
        dims.extend(window.sizes());
        Ok(CoefficientArray {
            array: NdArray::zeros(&dims),
            source_dims: source_dims.to_vec(),
            window: window.clone().with_normalization(Normalization::None),
        })
    }

    /// Reassembles coefficients from a `2k`-dimensional array.
    pub fn from_array(array: NdArray, normalization: Normalization) -> Result<Self> {
        let rank = array.rank();
        if rank == 0 || !rank.is_multiple_of(2) {
            return Err(SwdftError::Shape(format!(
                "coefficient arrays have an even number of axes, got {rank}"
            )));
        }
        let k = rank / 2;
        let sizes = &array.dims()[k..];
        let window = WindowSpec::from_sizes(sizes)?.with_normalization(normalization);
        normalization.factor(sizes)?;
        let source_dims = array.dims()[..k]
            .iter()
            .zip(sizes)
            .map(|(p, n)| p + n - 1)
            .collect();
        Ok(CoefficientArray {
            array,
            source_dims,
            window,
        })
    }

    pub fn array(&self) -> &NdArray {
        &self.array
    }

    pub fn array_mut(&mut self) -> &mut NdArray {
        &mut self.array
    }

    pub fn into_array(self) -> NdArray {
        self.array
    }

    pub fn source_dims(&self) -> &[usize] {
        &self.source_dims
    }

    pub fn window_spec(&self) -> &WindowSpec {
        &self.window
    }

    pub fn normalization(&self) -> Normalization {
        self.window.normalization()
    }

    pub fn rank(&self) -> usize {
        self.source_dims.len()
    }

    pub fn positions(&self) -> &[usize] {
        &self.array.dims()[..self.rank()]
    }

    pub fn window_count(&self) -> usize {
        self.positions().iter().product()
    }

    /// Coefficients of the `flat`-th window position (row-major), frequency-major.
    pub fn window_flat(&self, flat: usize) -> &[Complex64] {
        let len = self.window.window_len();
        &self.array.data()[flat * len..(flat + 1) * len]
    }

    pub fn window_flat_mut(&mut self, flat: usize) -> &mut [Complex64] {
        let len = self.window.window_len();
        &mut self.array.data_mut()[flat * len..(flat + 1) * len]
    }

    /// Coefficients of the window at position index `q` (`q_i = p_i - n_i + 1`).
    pub fn window(&self, q: &[usize]) -> &[Complex64] {
        let strides = row_major_strides(self.positions());
        let flat = q.iter().zip(&strides).map(|(i, s)| i * s).sum();
        self.window_flat(flat)
    }

    /// Scales the raw window sums by `mode`'s factor.
    pub fn normalize(mut self, mode: Normalization) -> Result<Self> {
        if self.normalization() != Normalization::None {
            return Err(SwdftError::State(format!(
                "coefficients are already normalized ({})",
                self.normalization()
            )));
        }
        let factor = mode.factor(&self.window.sizes())?;
        if mode != Normalization::None {
            for z in self.array.data_mut() {
                *z *= factor;
            }
        }
        self.window = self.window.with_normalization(mode);
        Ok(self)
    }
}
