//! Tree SWDFT for any number of dimensions.
//!
//! The last dimension owns the first block of levels and dimension 0 the
//! last. Nodes are stored row-major with the full window extents of the
//! dimensions already done, so level `l` holds `2^l` values per tree and a
//! level owned by dimension `c` reduces to flat indexing:
//!
//! ```text
//! T[p, l, f] = T[p - s e_c, l-1, f mod 2^(l-1)] + W_c[(f >> b) s] T[p, l-1, f mod 2^(l-1)]
//! ```
//!
//! where `b = m_{c+1} + ... + m_{k-1}` and `f >> b` is the node index along `c`.

use crate::array::{row_major_strides, zeroed, CoefficientArray, NdArray};
use crate::error::{Result, SwdftError};
use crate::memory::{MemoryBudget, MemoryPlan};
use crate::probe::Probe;
use crate::schedule::{inner_levels, level_geometry};
use crate::twiddle::{make_twiddles, TwiddleVector};
use crate::window::{Normalization, WindowSpec};
use crate::Complex64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelStep {
    pub level: u32,
    pub dim: usize,
    pub shift: usize,
    /// Node extents per dimension.
    pub extents: Vec<usize>,
    /// Source nodes are reduced modulo `2^modulus_exponent` along `dim`.
    pub modulus_exponent: u32,
    /// `log2` of the node stride along `dim`.
    pub inner_bits: u32,
    pub thresholds: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelPlan {
    steps: Vec<LevelStep>,
}

impl LevelPlan {
    pub fn steps(&self) -> &[LevelStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

pub fn build_level_plan(spec: &WindowSpec) -> LevelPlan {
    let steps = (1..=spec.total_levels())
        .map(|level| {
            let g = level_geometry(level, spec).expect("level within range");
            let dim = g.dim.expect("non-data level has an owner");
            let inner_bits = inner_levels(spec, dim);
            LevelStep {
                level,
                dim,
                shift: g.shift,
                extents: g.extents,
                // level - 1 - inner_bits >= 0 for every level the dimension owns
                modulus_exponent: level - 1 - inner_bits,
                inner_bits,
                thresholds: g.thresholds,
            }
        })
        .collect();
    LevelPlan { steps }
}

/// Calls `f(flat)` for every position in `lo[d] <= p[d] < hi[d]`, row-major,
/// where `flat` is the offset under `strides`.
fn for_each_in_box(lo: &[usize], hi: &[usize], strides: &[usize], mut f: impl FnMut(usize)) {
    if lo.iter().zip(hi).any(|(a, b)| a >= b) {
        return;
    }
    let rank = lo.len();
    let mut idx = lo.to_vec();
    let mut base: usize = lo.iter().zip(strides).map(|(i, s)| i * s).sum();
    let inner_stride = strides[rank - 1];
    loop {
        let mut flat = base;
        for _ in lo[rank - 1]..hi[rank - 1] {
            f(flat);
            flat += inner_stride;
        }
        // carry into the outer dimensions
        let mut d = rank - 1;
        loop {
            if d == 0 {
                return;
            }
            d -= 1;
            idx[d] += 1;
            base += strides[d];
            if idx[d] < hi[d] {
                break;
            }
            base -= (idx[d] - lo[d]) * strides[d];
            idx[d] = lo[d];
        }
    }
}

/// Double-buffered tree storage for the generic engine. Level 0 is read from
/// the input and the final level is written into the coefficient array.
#[derive(Debug)]
pub struct TreeLatticeKd<'a> {
    input: &'a NdArray,
    spec: WindowSpec,
    dims: Vec<usize>,
    strides: Vec<usize>,
    slot: usize,
    twiddles: Vec<TwiddleVector>,
    front: Vec<Complex64>,
    back: Vec<Complex64>,
    output: Option<Vec<Complex64>>,
    level: u32,
}

impl<'a> TreeLatticeKd<'a> {
    pub fn new(x: &'a NdArray, spec: &WindowSpec, budget: MemoryBudget) -> Result<Self> {
        if x.rank() != spec.rank() {
            return Err(SwdftError::RankMismatch {
                expected: spec.rank(),
                found: x.rank(),
            });
        }
        spec.check_fits(x.dims())?;
        MemoryPlan::tree(x.dims(), spec)?.check(budget)?;
        let slot = spec.window_len();
        Ok(TreeLatticeKd {
            input: x,
            spec: spec.clone(),
            dims: x.dims().to_vec(),
            strides: row_major_strides(x.dims()),
            slot,
            twiddles: spec
                .sizes()
                .into_iter()
                .map(make_twiddles)
                .collect::<Result<_>>()?,
            front: zeroed(x.len() * slot),
            back: zeroed(x.len() * slot),
            output: None,
            level: 0,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn allocated_elements(&self) -> usize {
        self.front.len() + self.back.len()
    }

    fn depth(&self) -> u32 {
        self.spec.total_levels()
    }

    /// Flat node index `f` of tree `p` at the current level (no validity check).
    pub fn raw_node(&self, p: &[usize], f: usize) -> Complex64 {
        if self.level == 0 {
            return self.input[p];
        }
        if let Some(out) = &self.output {
            let positions = self.spec.positions(&self.dims).expect("window fits");
            let q = p
                .iter()
                .zip(self.spec.sizes())
                .zip(row_major_strides(&positions))
                .map(|((&i, n), stride)| (i + 1 - n) * stride)
                .sum::<usize>();
            return out[q * self.slot + f];
        }
        let pos: usize = p.iter().zip(&self.strides).map(|(i, s)| i * s).sum();
        self.front[(pos << self.level) + f]
    }

    pub fn kd_level_step<P: Probe>(&mut self, step: &LevelStep, probe: &mut P) -> Result<()> {
        if step.level != self.level + 1 || step.level > self.depth() {
            return Err(SwdftError::State(format!(
                "lattice holds level {}, cannot compute level {}",
                self.level, step.level
            )));
        }
        if step.dim >= self.dims.len() {
            return Err(SwdftError::State(format!(
                "step for dimension {} on a rank-{} lattice",
                step.dim,
                self.dims.len()
            )));
        }
        let width = 1usize << step.level;
        let half = width >> 1;
        debug_assert_eq!(half, 1 << (step.modulus_exponent + step.inner_bits));
        let slot = self.slot;
        let back_shift = step.shift * self.strides[step.dim];
        let inner_bits = step.inner_bits;
        let s = step.shift;
        let last = step.level == self.depth();
        let mut dest = if last {
            // the final level's box is exactly the output, in the same order
            zeroed(self.spec.positions(&self.dims)?.iter().product::<usize>() * slot)
        } else {
            std::mem::take(&mut self.back)
        };
        let src = if self.level == 0 {
            self.input.data()
        } else {
            &self.front[..]
        };
        let twiddles = &self.twiddles[step.dim];
        let mut q = 0;
        for_each_in_box(&step.thresholds, &self.dims, &self.strides, |pos| {
            let earlier = &src[(pos - back_shift) * half..][..half];
            let current = &src[pos * half..][..half];
            let at = if last { q } else { pos };
            let out = &mut dest[at * width..][..width];
            for (f, node) in out.iter_mut().enumerate() {
                let r = f & (half - 1);
                *node = earlier[r] + twiddles[(f >> inner_bits) * s] * current[r];
            }
            q += 1;
            probe.nodes(pos, width as u64);
        });
        if last {
            self.output = Some(dest);
        } else {
            self.back = dest;
            std::mem::swap(&mut self.front, &mut self.back);
        }
        self.level = step.level;
        Ok(())
    }

    pub fn into_coefficients(self) -> Result<CoefficientArray> {
        if self.level != self.depth() {
            return Err(SwdftError::State(format!(
                "lattice is at level {} of {}",
                self.level,
                self.depth()
            )));
        }
        let positions = self.spec.positions(&self.dims)?;
        let data = match self.output {
            Some(out) => out,
            // single-sample windows: the input is its own transform
            None => self.input.data().to_vec(),
        };
        let dims: Vec<usize> = positions.into_iter().chain(self.spec.sizes()).collect();
        let out =
            CoefficientArray::from_array(NdArray::from_vec(&dims, data)?, Normalization::None)?;
        out.normalize(self.spec.normalization())
    }
}

pub fn tree_swdft_kd(x: &NdArray, spec: &WindowSpec) -> Result<CoefficientArray> {
    tree_swdft_kd_with(x, spec, MemoryBudget::default(), &mut ())
}

pub fn tree_swdft_kd_with<P: Probe>(
    x: &NdArray,
    spec: &WindowSpec,
    budget: MemoryBudget,
    probe: &mut P,
) -> Result<CoefficientArray> {
    let mut lattice = TreeLatticeKd::new(x, spec, budget)?;
    probe.allocated(lattice.allocated_elements() as u64);
    for step in build_level_plan(spec).steps() {
        lattice.kd_level_step(step, probe)?;
    }
    lattice.into_coefficients()
}
