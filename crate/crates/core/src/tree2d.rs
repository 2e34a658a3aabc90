//! Two-dimensional tree SWDFT built on the row-column FFT.
//!
//! Levels `1..=m1` run row FFTs along dimension 1; levels `m1+1..=m1+m0` run
//! column FFTs along dimension 0. With `W1`/`W0` the two twiddle tables:
//!
//! ```text
//! row level t:    T[p0, p1, t, 0, i1]  = T[p0, p1 - s, t-1, 0, i1 mod 2^(t-1)]
//!                                      + W1[i1 s] T[p0, p1, t-1, 0, i1 mod 2^(t-1)]      s = 2^(m1 - t)
//! column level v: T[p0, p1, v, i0, i1] = T[p0 - s, p1, v-1, i0 mod 2^(v-m1-1), i1]
//!                                      + W0[i0 s] T[p0, p1, v-1, i0 mod 2^(v-m1-1), i1]  s = 2^(m0 + m1 - v)
//! ```
//!
//! Nodes are stored row-major within each tree, and level `l` keeps its trees
//! `2^l` values apart. Level 0 is then the input itself and the last level is
//! the coefficient array.

use rayon::prelude::*;

use crate::array::{zeroed, CoefficientArray, NdArray};
use crate::error::{Result, SwdftError};
use crate::memory::{MemoryBudget, MemoryPlan};
use crate::probe::Probe;
use crate::twiddle::{make_twiddles, TwiddleVector};
use crate::window::{Normalization, WindowSpec};
use crate::Complex64;

/// Which loops run outermost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LoopOrder {
    /// Levels, then trees, then nodes. Needs all input up front; two level buffers.
    #[default]
    LevelsOuter,
    /// Trees row by row, then levels, then nodes. Runs through [`StreamingTree2d`].
    TreesOuter,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TreeOptions {
    pub budget: MemoryBudget,
    pub loop_order: LoopOrder,
    /// Split each level's trees across the rayon pool (levels-outer only).
    pub parallel: bool,
}

fn check_2d(x_rank: usize, spec: &WindowSpec) -> Result<()> {
    for found in [x_rank, spec.rank()] {
        if found != 2 {
            return Err(SwdftError::RankMismatch { expected: 2, found });
        }
    }
    Ok(())
}

/// Double-buffered tree storage for the levels-outer schedule.
///
/// Level 0 is read straight from the input and the final level is written
/// straight into the coefficient array, so the buffers only see levels in
/// between.
#[derive(Debug)]
pub struct TreeLattice2D<'a> {
    input: &'a NdArray,
    spec: WindowSpec,
    rows: usize,
    cols: usize,
    m: [u32; 2],
    n: [usize; 2],
    w0: TwiddleVector,
    w1: TwiddleVector,
    /// Holds `level` while `0 < level < depth`.
    front: Vec<Complex64>,
    back: Vec<Complex64>,
    output: Option<CoefficientArray>,
    level: u32,
}

impl<'a> TreeLattice2D<'a> {
    /// Allocates both level buffers; nothing is copied.
    pub fn new(x: &'a NdArray, spec: &WindowSpec, budget: MemoryBudget) -> Result<Self> {
        check_2d(x.rank(), spec)?;
        spec.check_fits(x.dims())?;
        let plan = MemoryPlan::tree(x.dims(), spec)?;
        plan.check(budget)?;
        let (rows, cols) = (x.dims()[0], x.dims()[1]);
        let n = [spec.size(0), spec.size(1)];
        let len = rows * cols * n[0] * n[1];
        Ok(TreeLattice2D {
            input: x,
            spec: spec.clone(),
            rows,
            cols,
            m: [spec.exponent(0), spec.exponent(1)],
            n,
            w0: make_twiddles(n[0])?,
            w1: make_twiddles(n[1])?,
            front: zeroed(len),
            back: zeroed(len),
            output: None,
            level: 0,
        })
    }

    /// Complex values held by the two level buffers.
    pub fn allocated_elements(&self) -> usize {
        self.front.len() + self.back.len()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn depth(&self) -> u32 {
        self.m[0] + self.m[1]
    }

    fn slot(&self) -> usize {
        self.n[0] * self.n[1]
    }

    fn advance(&mut self, level: u32) -> Result<()> {
        if level != self.level + 1 || level > self.depth() {
            return Err(SwdftError::State(format!(
                "lattice holds level {}, cannot compute level {level}",
                self.level
            )));
        }
        Ok(())
    }

    /// Node `(i0, i1)` of tree `(p0, p1)` at the current level, if it exists.
    pub fn node(&self, p0: usize, p1: usize, i0: usize, i1: usize) -> Option<Complex64> {
        let l = self.level;
        let (ext0, ext1, thr0, thr1) = if l <= self.m[1] {
            (1, 1 << l, 0, self.n[1] - (1 << (self.m[1] - l)))
        } else {
            let done = l - self.m[1];
            (
                1 << done,
                self.n[1],
                self.n[0] - (1 << (self.m[0] - done)),
                self.n[1] - 1,
            )
        };
        if p0 >= self.rows || p1 >= self.cols || p0 < thr0 || p1 < thr1 || i0 >= ext0 || i1 >= ext1
        {
            return None;
        }
        let f = i0 * self.n[1] + i1;
        if l == 0 {
            return Some(self.input[&[p0, p1][..]]);
        }
        if let Some(out) = &self.output {
            return Some(out.window(&[p0 + 1 - self.n[0], p1 + 1 - self.n[1]])[f]);
        }
        Some(self.front[((p0 * self.cols + p1) << l) + f])
    }

    /// Computes row level `t` (`1 <= t <= m1`) from level `t - 1`.
    pub fn row_level_step<P: Probe>(&mut self, t: u32, probe: &mut P) -> Result<()> {
        self.row_level_step_impl(t, false, probe)
    }

    /// Computes column level `v` (`m1 < v <= m0 + m1`) from level `v - 1`.
    pub fn col_level_step<P: Probe>(&mut self, v: u32, probe: &mut P) -> Result<()> {
        self.col_level_step_impl(v, false, probe)
    }

    /// Runs `kernel(p0, out_row)` over the destination rows of `row_len`
    /// values, where row `r` holds trees of row `row0 + r`, from `first_row` on.
    fn for_rows(
        dest: &mut [Complex64],
        row_len: usize,
        row0: usize,
        first_row: usize,
        parallel: bool,
        kernel: impl Fn(usize, &mut [Complex64]) + Sync,
    ) {
        if parallel {
            dest.par_chunks_mut(row_len)
                .enumerate()
                .skip(first_row - row0)
                .for_each(|(r, out_row)| kernel(r + row0, out_row));
        } else {
            for (r, out_row) in dest.chunks_mut(row_len).enumerate().skip(first_row - row0) {
                kernel(r + row0, out_row);
            }
        }
    }

    /// Source buffer for the next level.
    fn source(&self) -> &[Complex64] {
        if self.level == 0 {
            self.input.data()
        } else {
            &self.front
        }
    }

    /// Destination for `level`: the spare buffer, or a fresh output array
    /// for the final level (flagged `true`).
    fn take_target(&mut self, level: u32) -> (Vec<Complex64>, bool) {
        if level == self.depth() {
            let windows = (self.rows + 1 - self.n[0]) * (self.cols + 1 - self.n[1]);
            (zeroed(windows * self.slot()), true)
        } else {
            (std::mem::take(&mut self.back), false)
        }
    }

    fn finish_step(&mut self, level: u32, dest: Vec<Complex64>, last: bool) -> Result<()> {
        if last {
            let dims = [
                self.rows + 1 - self.n[0],
                self.cols + 1 - self.n[1],
                self.n[0],
                self.n[1],
            ];
            let array = NdArray::from_vec(&dims, dest)?;
            self.output = Some(CoefficientArray::from_array(array, Normalization::None)?);
        } else {
            self.back = dest;
            std::mem::swap(&mut self.front, &mut self.back);
        }
        self.level = level;
        Ok(())
    }

    /// First destination row and column and trees per destination row.
    fn target_geometry(&self, last: bool) -> (usize, usize, usize) {
        if last {
            (self.n[0] - 1, self.n[1] - 1, self.cols + 1 - self.n[1])
        } else {
            (0, 0, self.cols)
        }
    }

    fn row_level_step_impl<P: Probe>(
        &mut self,
        t: u32,
        parallel: bool,
        probe: &mut P,
    ) -> Result<()> {
        self.advance(t)?;
        if t > self.m[1] {
            return Err(SwdftError::State(format!("level {t} is a column level")));
        }
        let cols = self.cols;
        let width = 1usize << t;
        let half = width >> 1;
        let s = self.n[1] >> t;
        let first = self.n[1] - s;
        debug_assert!((width - 1) * s < self.n[1]);

        let (mut dest, last) = self.take_target(t);
        let (row0, col0, dest_cols) = self.target_geometry(last);
        let src = self.source();
        let w1 = &self.w1;
        let kernel = |p0: usize, out_row: &mut [Complex64]| {
            for p1 in first..cols {
                let pos = p0 * cols + p1;
                let earlier = &src[(pos - s) * half..][..half];
                let current = &src[pos * half..][..half];
                let out = &mut out_row[(p1 - col0) * width..][..width];
                for (i1, node) in out.iter_mut().enumerate() {
                    let r = i1 & (half - 1);
                    *node = earlier[r] + w1[i1 * s] * current[r];
                }
            }
        };
        let used = (self.rows - row0) * dest_cols * width;
        Self::for_rows(
            &mut dest[..used],
            dest_cols * width,
            row0,
            row0,
            parallel,
            kernel,
        );
        for p0 in row0..self.rows {
            for p1 in first..cols {
                probe.nodes(p0 * cols + p1, width as u64);
            }
        }
        self.finish_step(t, dest, last)
    }

    fn col_level_step_impl<P: Probe>(
        &mut self,
        v: u32,
        parallel: bool,
        probe: &mut P,
    ) -> Result<()> {
        self.advance(v)?;
        if v <= self.m[1] {
            return Err(SwdftError::State(format!("level {v} is a row level")));
        }
        let cols = self.cols;
        let n1 = self.n[1];
        let done = v - self.m[1];
        let extent0 = 1usize << done;
        let half0 = extent0 >> 1;
        let s = self.n[0] >> done;
        let first_row = self.n[0] - s;
        let first_col = n1 - 1;
        debug_assert!((extent0 - 1) * s < self.n[0]);

        let (mut dest, last) = self.take_target(v);
        let (row0, col0, dest_cols) = self.target_geometry(last);
        let src = self.source();
        let w0 = &self.w0;
        let (half, width) = (half0 * n1, extent0 * n1);
        let kernel = |p0: usize, out_row: &mut [Complex64]| {
            for p1 in first_col..cols {
                let pos = p0 * cols + p1;
                let earlier = &src[(pos - s * cols) * half..][..half];
                let current = &src[pos * half..][..half];
                let out = &mut out_row[(p1 - col0) * width..][..width];
                for i0 in 0..extent0 {
                    let w = w0[i0 * s];
                    let r0 = (i0 & (half0 - 1)) * n1;
                    let dst = &mut out[i0 * n1..][..n1];
                    for (i1, node) in dst.iter_mut().enumerate() {
                        *node = earlier[r0 + i1] + w * current[r0 + i1];
                    }
                }
            }
        };
        let used = (self.rows - row0) * dest_cols * width;
        Self::for_rows(
            &mut dest[..used],
            dest_cols * width,
            row0,
            first_row,
            parallel,
            kernel,
        );
        let nodes = width as u64;
        for p0 in first_row..self.rows {
            for p1 in first_col..cols {
                probe.nodes(p0 * cols + p1, nodes);
            }
        }
        self.finish_step(v, dest, last)
    }

    /// Runs every remaining level.
    pub fn run<P: Probe>(&mut self, parallel: bool, probe: &mut P) -> Result<()> {
        for level in self.level + 1..=self.depth() {
            if level <= self.m[1] {
                self.row_level_step_impl(level, parallel, probe)?;
            } else {
                self.col_level_step_impl(level, parallel, probe)?;
            }
        }
        Ok(())
    }

    fn raw_output(&self) -> Result<CoefficientArray> {
        if self.level != self.depth() {
            return Err(SwdftError::State(format!(
                "lattice is at level {} of {}",
                self.level,
                self.depth()
            )));
        }
        match &self.output {
            Some(out) => Ok(out.clone()),
            // single-sample windows: the input is its own transform
            None => {
                let dims = [self.rows, self.cols, 1, 1];
                let array = NdArray::from_vec(&dims, self.input.data().to_vec())?;
                CoefficientArray::from_array(array, Normalization::None)
            }
        }
    }

    /// Normalized coefficients at every full window position; the lattice stays usable.
    pub fn coefficients(&self) -> Result<CoefficientArray> {
        self.raw_output()?.normalize(self.spec.normalization())
    }

    pub fn into_coefficients(mut self) -> Result<CoefficientArray> {
        let out = match self.output.take() {
            Some(out) if self.level == self.depth() => out,
            _ => self.raw_output()?,
        };
        out.normalize(self.spec.normalization())
    }
}

pub fn tree_swdft_2d(x: &NdArray, spec: &WindowSpec) -> Result<CoefficientArray> {
    tree_swdft_2d_with(x, spec, &TreeOptions::default(), &mut ())
}

pub fn tree_swdft_2d_with<P: Probe>(
    x: &NdArray,
    spec: &WindowSpec,
    options: &TreeOptions,
    probe: &mut P,
) -> Result<CoefficientArray> {
    check_2d(x.rank(), spec)?;
    spec.check_fits(x.dims())?;
    match options.loop_order {
        LoopOrder::LevelsOuter => {
            let mut lattice = TreeLattice2D::new(x, spec, options.budget)?;
            probe.allocated(lattice.allocated_elements() as u64);
            lattice.run(options.parallel, probe)?;
            lattice.into_coefficients()
        }
        LoopOrder::TreesOuter => {
            MemoryPlan::output_only(x.dims(), spec)?.check(options.budget)?;
            let raw_spec = spec.clone().with_normalization(Normalization::None);
            let mut stream = StreamingTree2d::new(x.dims()[1], &raw_spec)?;
            probe.allocated(stream.allocated_elements() as u64);
            let mut out = CoefficientArray::zeros(x.dims(), spec)?;
            let slab_len = out.positions()[1] * spec.window_len();
            let mut filled = 0;
            for row in x.data().chunks(x.dims()[1]) {
                if let Some(slab) = stream.push_row_with(row, probe)? {
                    out.array_mut().data_mut()[filled..filled + slab_len]
                        .copy_from_slice(slab.data());
                    filled += slab_len;
                }
            }
            out.normalize(spec.normalization())
        }
    }
}

/// Row-at-a-time tree SWDFT.
///
/// Keeps every level for the last `n0` rows in ring buffers (the largest
/// column shift is `n0 / 2`). Each pushed row computes the trees at that row
/// from left to right, and from row `n0 - 1` on returns a slab of shape
/// `P1 x n0 x n1` holding the windows whose last row is the new one.
#[derive(Debug, Clone)]
pub struct StreamingTree2d {
    spec: WindowSpec,
    cols: usize,
    m: [u32; 2],
    n: [usize; 2],
    w0: TwiddleVector,
    w1: TwiddleVector,
    factor: f64,
    /// `rings[l]` holds `n0 * cols` trees of `2^l` nodes.
    rings: Vec<Vec<Complex64>>,
    rows: usize,
    row_ops: Vec<u64>,
}

impl StreamingTree2d {
    pub fn new(cols: usize, spec: &WindowSpec) -> Result<Self> {
        if spec.rank() != 2 {
            return Err(SwdftError::RankMismatch {
                expected: 2,
                found: spec.rank(),
            });
        }
        let n = [spec.size(0), spec.size(1)];
        if n[1] > cols {
            return Err(SwdftError::WindowTooLarge {
                window: n.to_vec(),
                dims: vec![usize::MAX, cols],
            });
        }
        let depth = spec.total_levels();
        Ok(StreamingTree2d {
            factor: spec.normalization().factor(&n)?,
            spec: spec.clone(),
            cols,
            m: [spec.exponent(0), spec.exponent(1)],
            n,
            w0: make_twiddles(n[0])?,
            w1: make_twiddles(n[1])?,
            rings: (0..=depth).map(|l| zeroed((n[0] * cols) << l)).collect(),
            rows: 0,
            row_ops: vec![0; cols],
        })
    }

    pub fn rows_pushed(&self) -> usize {
        self.rows
    }

    pub fn allocated_elements(&self) -> usize {
        self.rings.iter().map(Vec::len).sum()
    }

    /// Operations spent on each tree of the most recent row.
    pub fn last_row_ops(&self) -> &[u64] {
        &self.row_ops
    }

    pub fn push_row(&mut self, row: &[Complex64]) -> Result<Option<NdArray>> {
        self.push_row_with(row, &mut ())
    }

    /// Like [`StreamingTree2d::push_row`]; `probe` sees positions `row * cols + p1`.
    pub fn push_row_with<P: Probe>(
        &mut self,
        row: &[Complex64],
        probe: &mut P,
    ) -> Result<Option<NdArray>> {
        if row.len() != self.cols {
            return Err(SwdftError::Shape(format!(
                "row has {} samples, expected {}",
                row.len(),
                self.cols
            )));
        }
        if let Some(i) = row.iter().position(|z| !z.is_finite()) {
            return Err(SwdftError::NonFinite(i));
        }
        let [n0, n1] = self.n;
        let [_, m1] = self.m;
        let depth = self.m[0] + m1;
        let cols = self.cols;
        let p0 = self.rows;
        let band = p0 & (n0 - 1);
        for (p1, &v) in row.iter().enumerate() {
            let here = band * cols + p1;
            self.rings[0][here] = v;
            let mut ops = 0u64;
            for level in 1..=depth {
                let width = 1usize << level;
                let half = width >> 1;
                let (lower, upper) = self.rings.split_at_mut(level as usize);
                let prev = &lower[level as usize - 1];
                let out = &mut upper[0][here * width..][..width];
                if level <= m1 {
                    let s = n1 >> level;
                    if p1 + s < n1 {
                        break;
                    }
                    let earlier = &prev[(here - s) * half..][..half];
                    let current = &prev[here * half..][..half];
                    for (i1, node) in out.iter_mut().enumerate() {
                        let r = i1 & (half - 1);
                        *node = earlier[r] + self.w1[i1 * s] * current[r];
                    }
                } else {
                    let done = level - m1;
                    let s = n0 >> done;
                    if p1 + 1 < n1 || p0 + s < n0 {
                        break;
                    }
                    let extent0 = 1usize << done;
                    let half0 = extent0 >> 1;
                    let there = ((p0 - s) & (n0 - 1)) * cols + p1;
                    let earlier = &prev[there * half..][..half];
                    let current = &prev[here * half..][..half];
                    for i0 in 0..extent0 {
                        let w = self.w0[i0 * s];
                        let r0 = (i0 & (half0 - 1)) * n1;
                        for i1 in 0..n1 {
                            out[i0 * n1 + i1] = earlier[r0 + i1] + w * current[r0 + i1];
                        }
                    }
                }
                ops += width as u64;
            }
            self.row_ops[p1] = ops;
            probe.nodes(p0 * cols + p1, ops);
        }
        self.rows += 1;
        if p0 + 1 < n0 {
            return Ok(None);
        }
        let window = self.spec.window_len();
        let positions = cols - n1 + 1;
        let top = &self.rings[depth as usize];
        let mut data = Vec::with_capacity(positions * window);
        for p1 in n1 - 1..cols {
            let coeffs = &top[(band * cols + p1) * window..][..window];
            if self.factor == 1.0 {
                data.extend_from_slice(coeffs);
            } else {
                data.extend(coeffs.iter().map(|&z| z * self.factor));
            }
        }
        NdArray::from_vec(&[positions, n0, n1], data).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{swdft_2d_naive, swfft_2d};
    use crate::probe::OpCounter;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reals(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| c(x, 0.0)).collect()
    }

    fn field(rows: usize, cols: usize) -> NdArray {
        NdArray::from_fn(&[rows, cols], |i| {
            let (a, b) = (i[0] as f64, i[1] as f64);
            c(
                (0.37 * a + 1.1 * b).sin() + 0.05 * a * b,
                (0.9 * a - 0.4 * b).cos(),
            )
        })
    }

    fn spec(n0: usize, n1: usize) -> WindowSpec {
        WindowSpec::from_sizes(&[n0, n1]).unwrap()
    }

    #[test]
    fn two_by_two_example() {
        let x = NdArray::from_real(&[2, 2], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let out = tree_swdft_2d(&x, &spec(2, 2)).unwrap();
        assert_eq!(out.array().dims(), &[1, 1, 2, 2]);
        assert_eq!(out.window_flat(0), &reals(&[10.0, -2.0, -4.0, 0.0])[..]);
    }

    #[test]
    fn constant_input_is_dc_only() {
        let x = NdArray::from_real(&[8, 8], &[1.0; 64]).unwrap();
        let out = tree_swdft_2d(&x, &spec(4, 4)).unwrap();
        assert_eq!(out.window_count(), 25);
        for w in 0..25 {
            let win = out.window_flat(w);
            assert_eq!(win[0], c(16.0, 0.0));
            assert!(win[1..].iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn row_level_one() {
        let ones = NdArray::from_real(&[3, 4], &[1.0; 12]).unwrap();
        let mut lattice = TreeLattice2D::new(&ones, &spec(2, 4), MemoryBudget::default()).unwrap();
        lattice.row_level_step(1, &mut ()).unwrap();
        for p0 in 0..3 {
            for p1 in 2..4 {
                assert_eq!(lattice.node(p0, p1, 0, 0), Some(c(2.0, 0.0)));
                assert_eq!(lattice.node(p0, p1, 0, 1), Some(c(0.0, 0.0)));
            }
            assert_eq!(lattice.node(p0, 1, 0, 0), None);
        }

        // x[p0, p1] = p1: node (0, 1) = x[p1 - 2] - x[p1] = -2
        let ramp = NdArray::from_fn(&[2, 6], |i| c(i[1] as f64, 0.0));
        let mut lattice = TreeLattice2D::new(&ramp, &spec(2, 4), MemoryBudget::default()).unwrap();
        lattice.row_level_step(1, &mut ()).unwrap();
        assert_eq!(lattice.node(0, 2, 0, 1), Some(c(-2.0, 0.0)));
        assert_eq!(lattice.node(1, 5, 0, 0), Some(c(8.0, 0.0)));
    }

    #[test]
    fn cursor_is_checked() {
        let x = field(4, 4);
        let mut lattice = TreeLattice2D::new(&x, &spec(2, 2), MemoryBudget::default()).unwrap();
        assert!(matches!(
            lattice.row_level_step(2, &mut ()),
            Err(SwdftError::State(_))
        ));
        assert!(matches!(
            lattice.col_level_step(1, &mut ()),
            Err(SwdftError::State(_))
        ));
        assert!(lattice.coefficients().is_err());
        lattice.row_level_step(1, &mut ()).unwrap();
        assert!(matches!(
            lattice.row_level_step(2, &mut ()),
            Err(SwdftError::State(_))
        ));
        lattice.col_level_step(2, &mut ()).unwrap();
        assert!(lattice.col_level_step(3, &mut ()).is_err());
        assert!(lattice.coefficients().is_ok());
    }

    #[test]
    fn final_column_level_k0_zero_is_row_dft_sum() {
        let x = field(6, 6);
        let sp = spec(4, 2);
        let out = tree_swdft_2d(&x, &sp).unwrap();
        let rows_1d = WindowSpec::from_sizes(&[2]).unwrap();
        for q0 in 0..3 {
            for q1 in 0..5 {
                let mut sum = [c(0.0, 0.0); 2];
                for j0 in 0..4 {
                    let row = NdArray::from_vec(&[2], x.data()[(q0 + j0) * 6 + q1..][..2].to_vec())
                        .unwrap();
                    let dft = crate::oracle::swdft_1d_naive(&row, &rows_1d).unwrap();
                    sum[0] += dft.window_flat(0)[0];
                    sum[1] += dft.window_flat(0)[1];
                }
                let win = out.window(&[q0, q1]);
                assert!((win[0] - sum[0]).norm() < 1e-12 && (win[1] - sum[1]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn matches_oracles_on_all_shapes() {
        let x = field(10, 12);
        for n0 in [1, 2, 4, 8] {
            for n1 in [1, 2, 4, 8] {
                let sp = spec(n0, n1);
                let tree = tree_swdft_2d(&x, &sp).unwrap();
                let naive = swdft_2d_naive(&x, &sp).unwrap();
                assert!(tree.array().max_abs_diff(naive.array()).unwrap() <= 1e-10);
                assert_eq!(tree, swfft_2d(&x, &sp).unwrap(), "{n0}x{n1}");
            }
        }
        let x = field(6, 8);
        let sp = spec(2, 4);
        let tree = tree_swdft_2d(&x, &sp).unwrap();
        assert!(
            tree.array()
                .max_abs_diff(swdft_2d_naive(&x, &sp).unwrap().array())
                .unwrap()
                <= 1e-10
        );
    }

    #[test]
    fn schedules_agree_bitwise() {
        let x = field(9, 11);
        for (n0, n1) in [(1, 1), (2, 4), (4, 2), (8, 8), (4, 1)] {
            let sp = spec(n0, n1).with_normalization(Normalization::Unitary);
            let levels = tree_swdft_2d(&x, &sp).unwrap();
            let trees = tree_swdft_2d_with(
                &x,
                &sp,
                &TreeOptions {
                    loop_order: LoopOrder::TreesOuter,
                    ..Default::default()
                },
                &mut (),
            )
            .unwrap();
            let par = tree_swdft_2d_with(
                &x,
                &sp,
                &TreeOptions {
                    parallel: true,
                    ..Default::default()
                },
                &mut (),
            )
            .unwrap();
            assert_eq!(levels, trees);
            assert_eq!(levels, par);
        }
    }

    #[test]
    fn op_counts_and_memory() {
        let x = field(11, 13);
        for (n0, n1) in [(2, 2), (4, 4), (2, 8), (8, 1)] {
            let sp = spec(n0, n1);
            for order in [LoopOrder::LevelsOuter, LoopOrder::TreesOuter] {
                let mut counter = OpCounter::with_breakdown(11 * 13);
                let options = TreeOptions {
                    loop_order: order,
                    ..Default::default()
                };
                tree_swdft_2d_with(&x, &sp, &options, &mut counter).unwrap();
                let per = counter.per_position().unwrap();
                for p0 in n0 - 1..11 {
                    for p1 in n1 - 1..13 {
                        assert_eq!(per[p0 * 13 + p1], 2 * (n0 * n1) as u64 - 2);
                    }
                }
                if order == LoopOrder::LevelsOuter {
                    assert_eq!(counter.peak_elements(), 2 * 11 * 13 * (n0 * n1) as u64);
                }
            }
        }
    }

    #[test]
    fn errors() {
        let x = field(4, 4);
        assert!(matches!(
            tree_swdft_2d(&x, &spec(8, 2)),
            Err(SwdftError::WindowTooLarge { .. })
        ));
        assert!(tree_swdft_2d(&NdArray::zeros(&[4]), &spec(2, 2)).is_err());
        let err = tree_swdft_2d_with(
            &x,
            &spec(2, 2),
            &TreeOptions {
                budget: MemoryBudget(1000),
                ..Default::default()
            },
            &mut (),
        );
        assert!(
            matches!(err, Err(SwdftError::BudgetExceeded { required, .. }) if required == 9 * 4 * 16 + 2 * 16 * 4 * 16)
        );
    }

    #[test]
    fn streaming_rows() {
        let sp = spec(2, 2);
        let mut stream = StreamingTree2d::new(2, &sp).unwrap();
        assert!(stream.push_row(&reals(&[1.0, 2.0])).unwrap().is_none());
        let slab = stream.push_row(&reals(&[3.0, 4.0])).unwrap().unwrap();
        assert_eq!(slab.dims(), &[1, 2, 2]);
        assert_eq!(slab.data(), &reals(&[10.0, -2.0, -4.0, 0.0])[..]);
        assert_eq!(stream.last_row_ops(), &[0, 6]);
        assert!(matches!(
            stream.push_row(&reals(&[1.0])),
            Err(SwdftError::Shape(_))
        ));

        let mut stream = StreamingTree2d::new(5, &spec(2, 4)).unwrap();
        for r in 0..6 {
            let slab = stream.push_row(&reals(&[0.5; 5])).unwrap();
            if r == 0 {
                assert!(slab.is_none());
                continue;
            }
            let slab = slab.unwrap();
            for w in slab.data().chunks(8) {
                assert_eq!(w[0], c(4.0, 0.0));
                assert!(w[1..].iter().all(|z| z.norm() < 1e-12));
            }
        }
    }

    #[test]
    fn streaming_matches_batch() {
        let x = field(8, 8);
        for (n0, n1) in [(2, 2), (4, 2), (8, 8), (1, 4)] {
            let sp = spec(n0, n1);
            let batch = tree_swdft_2d(&x, &sp).unwrap();
            let mut stream = StreamingTree2d::new(8, &sp).unwrap();
            let mut q0 = 0;
            let slab_len = (9 - n1) * n0 * n1;
            for row in x.data().chunks(8) {
                if let Some(slab) = stream.push_row(row).unwrap() {
                    assert_eq!(
                        slab.data(),
                        &batch.array().data()[q0 * slab_len..][..slab_len]
                    );
                    assert!(stream.last_row_ops()[n1 - 1..]
                        .iter()
                        .all(|&o| o == 2 * (n0 * n1) as u64 - 2));
                    q0 += 1;
                }
            }
            assert_eq!(q0, 9 - n0);
        }
    }
}
