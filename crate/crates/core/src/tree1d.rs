//! One-dimensional tree SWDFT.
//!
//! Tree `p` at level `l` holds the length-`2^l` DFT of the samples
//! `x[p - (2^l - 1) s], ..., x[p - s], x[p]` with stride `s = 2^(m - l)`:
//!
//! ```text
//! T[p, l, i] = T[p - s, l - 1, i mod 2^(l-1)] + W[i * s] * T[p, l - 1, i mod 2^(l-1)]
//! ```
//!
//! The node exists once `p >= n - s`. At level `m` it is the DFT of the window
//! ending at `p`.

use crate::array::{zeroed, CoefficientArray, NdArray};
use crate::error::{Result, SwdftError};
use crate::memory::{MemoryBudget, MemoryPlan};
use crate::probe::Probe;
use crate::twiddle::{make_twiddles, TwiddleVector};
use crate::window::WindowSpec;
use crate::Complex64;

pub fn tree_swdft_1d(x: &NdArray, spec: &WindowSpec) -> Result<CoefficientArray> {
    tree_swdft_1d_with(x, spec, MemoryBudget::default(), &mut ())
}

/// Batch transform, levels outermost, two level buffers of `N * n` values.
pub fn tree_swdft_1d_with<P: Probe>(
    x: &NdArray,
    spec: &WindowSpec,
    budget: MemoryBudget,
    probe: &mut P,
) -> Result<CoefficientArray> {
    if x.rank() != 1 || spec.rank() != 1 {
        return Err(SwdftError::RankMismatch {
            expected: 1,
            found: if x.rank() != 1 { x.rank() } else { spec.rank() },
        });
    }
    let plan = MemoryPlan::tree(x.dims(), spec)?;
    plan.check(budget)?;

    let len = x.len();
    let m = spec.exponent(0);
    let n = spec.size(0);
    let twiddles = make_twiddles(n)?;
    let mut front = zeroed(len * n);
    let mut back = zeroed(len * n);
    probe.allocated(plan.level_buffer_elements);

    for (p, &v) in x.data().iter().enumerate() {
        front[p * n] = v;
    }
    for level in 1..=m {
        let width = 1usize << level;
        let half = width >> 1;
        let s = n >> level;
        debug_assert!((width - 1) * s < n);
        for p in (n - s)..len {
            let (earlier, current) = (&front[(p - s) * n..][..half], &front[p * n..][..half]);
            let out = &mut back[p * n..][..width];
            for (i, slot) in out.iter_mut().enumerate() {
                let r = i & (half - 1);
                *slot = earlier[r] + twiddles[i * s] * current[r];
            }
            probe.nodes(p, width as u64);
        }
        std::mem::swap(&mut front, &mut back);
    }

    let mut out = CoefficientArray::zeros(x.dims(), spec)?;
    for q in 0..out.window_count() {
        let p = q + n - 1;
        out.window_flat_mut(q).copy_from_slice(&front[p * n..][..n]);
    }
    out.normalize(spec.normalization())
}

/// Sample-at-a-time tree SWDFT.
///
/// Each level keeps a ring of the last `n` trees, which covers the largest
/// shift `n / 2`. A push computes the new tree's nodes level by level and,
/// once `n` samples have arrived, returns the window ending at that sample.
#[derive(Debug, Clone)]
pub struct StreamingTree1d {
    spec: WindowSpec,
    twiddles: TwiddleVector,
    factor: f64,
    /// `rings[l]` holds `n` slots of `2^l` nodes.
    rings: Vec<Vec<Complex64>>,
    pushed: usize,
    last_ops: u64,
    total_ops: u64,
    closed: bool,
}

impl StreamingTree1d {
    pub fn new(spec: &WindowSpec) -> Result<Self> {
        if spec.rank() != 1 {
            return Err(SwdftError::RankMismatch {
                expected: 1,
                found: spec.rank(),
            });
        }
        let n = spec.size(0);
        let m = spec.exponent(0);
        Ok(StreamingTree1d {
            factor: spec.normalization().factor(&[n])?,
            twiddles: make_twiddles(n)?,
            rings: (0..=m).map(|l| zeroed(n << l)).collect(),
            spec: spec.clone(),
            pushed: 0,
            last_ops: 0,
            total_ops: 0,
            closed: false,
        })
    }

    pub fn window_size(&self) -> usize {
        self.spec.size(0)
    }

    pub fn samples_pushed(&self) -> usize {
        self.pushed
    }

    /// Operations performed by the most recent push.
    pub fn last_push_ops(&self) -> u64 {
        self.last_ops
    }

    pub fn total_ops(&self) -> u64 {
        self.total_ops
    }

    pub fn close(&mut self) {
        self.closed = true;
    }

    pub fn push(&mut self, sample: Complex64) -> Result<Option<Vec<Complex64>>> {
        if self.closed {
            return Err(SwdftError::State("push after close".into()));
        }
        if !sample.is_finite() {
            return Err(SwdftError::NonFinite(self.pushed));
        }
        let n = self.window_size();
        let m = self.spec.exponent(0);
        let p = self.pushed;
        let slot = p & (n - 1);
        self.rings[0][slot] = sample;
        let mut ops = 0;
        for level in 1..=m as usize {
            let width = 1usize << level;
            let half = width >> 1;
            let s = n >> level;
            if p + s < n {
                break;
            }
            let (lower, upper) = self.rings.split_at_mut(level);
            let prev = &lower[level - 1];
            let earlier = &prev[((p - s) & (n - 1)) * half..][..half];
            let current = &prev[slot * half..][..half];
            let out = &mut upper[0][slot * width..][..width];
            for (i, node) in out.iter_mut().enumerate() {
                let r = i & (half - 1);
                *node = earlier[r] + self.twiddles[i * s] * current[r];
            }
            ops += width as u64;
        }
        self.pushed += 1;
        self.last_ops = ops;
        self.total_ops += ops;
        if p + 1 < n {
            return Ok(None);
        }
        let coeffs = &self.rings[m as usize][slot * n..][..n];
        Ok(Some(if self.factor == 1.0 {
            coeffs.to_vec()
        } else {
            coeffs.iter().map(|&z| z * self.factor).collect()
        }))
    }
}
