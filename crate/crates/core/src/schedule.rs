//! Level bookkeeping shared by every tree engine.
//!
//! A window with exponents `m_0 .. m_{k-1}` has trees of depth `m_0 + ... + m_{k-1}`.
//! The last dimension owns the first `m_{k-1}` levels, the dimension before it the
//! next block, and dimension 0 the final `m_0` levels. At level `l` owned by
//! dimension `c`, a node combines the previous level of its own tree with the
//! previous level of the tree `shift` positions earlier along `c`.

use crate::error::{Result, SwdftError};
use crate::window::WindowSpec;

/// Sum of the exponents of the dimensions after `dim`.
pub(crate) fn inner_levels(spec: &WindowSpec, dim: usize) -> u32 {
    spec.exponents()[dim + 1..].iter().sum()
}

/// Dimension that owns `level` (1-based). `None` for level 0 or beyond the last level.
pub fn owning_dim(level: u32, spec: &WindowSpec) -> Option<usize> {
    if level == 0 || level > spec.total_levels() {
        return None;
    }
    (0..spec.rank()).rev().find(|&c| {
        let inner = inner_levels(spec, c);
        level > inner && level <= inner + spec.exponent(c)
    })
}

/// Shift `s_l^c = 2^(m_c + ... + m_{k-1} - l)` for a level owned by `dim`.
pub fn shift(level: u32, dim: usize, spec: &WindowSpec) -> Result<usize> {
    if dim >= spec.rank() {
        return Err(SwdftError::Level {
            level,
            reason: format!("dimension {dim} out of range for rank {}", spec.rank()),
        });
    }
    let inner = inner_levels(spec, dim);
    let outer = inner + spec.exponent(dim);
    if level <= inner || level > outer {
        return Err(SwdftError::Level {
            level,
            reason: format!("dimension {dim} owns levels {}..={outer}", inner + 1),
        });
    }
    Ok(1 << (outer - level))
}

/// Shape of one tree level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelGeometry {
    pub level: u32,
    /// Owning dimension; `None` for the data level.
    pub dim: Option<usize>,
    /// Shift along `dim`; 0 for the data level.
    pub shift: usize,
    /// Node extents per dimension; their product is `2^level`.
    pub extents: Vec<usize>,
    /// A node at this level exists at position `p` iff `p[d] >= thresholds[d]` for all `d`.
    pub thresholds: Vec<usize>,
}

impl LevelGeometry {
    pub fn node_count(&self) -> usize {
        1 << self.level
    }

    /// Number of tree positions holding this level in an array of shape `dims`.
    pub fn valid_positions(&self, dims: &[usize]) -> usize {
        dims.iter()
            .zip(&self.thresholds)
            .map(|(&n, &t)| n.saturating_sub(t))
            .product()
    }
}

pub fn level_geometry(level: u32, spec: &WindowSpec) -> Result<LevelGeometry> {
    let rank = spec.rank();
    if level == 0 {
        return Ok(LevelGeometry {
            level,
            dim: None,
            shift: 0,
            extents: vec![1; rank],
            thresholds: vec![0; rank],
        });
    }
    let dim = owning_dim(level, spec).ok_or_else(|| SwdftError::Level {
        level,
        reason: format!("window {spec} has {} levels", spec.total_levels()),
    })?;
    let done = level - inner_levels(spec, dim);
    let shift = 1usize << (spec.exponent(dim) - done);
    let mut extents = vec![1; rank];
    let mut thresholds = vec![0; rank];
    for d in dim + 1..rank {
        extents[d] = spec.size(d);
        thresholds[d] = spec.size(d) - 1;
    }
    extents[dim] = 1 << done;
    thresholds[dim] = spec.size(dim) - shift;
    Ok(LevelGeometry {
        level,
        dim: Some(dim),
        shift,
        extents,
        thresholds,
    })
}

/// Geometry of every level `0..=total_levels`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftSchedule {
    levels: Vec<LevelGeometry>,
}

impl ShiftSchedule {
    pub fn new(spec: &WindowSpec) -> Self {
        let levels = (0..=spec.total_levels())
            .map(|l| level_geometry(l, spec).expect("level within range"))
            .collect();
        ShiftSchedule { levels }
    }

    pub fn levels(&self) -> &[LevelGeometry] {
        &self.levels
    }

    pub fn level(&self, level: u32) -> Option<&LevelGeometry> {
        self.levels.get(level as usize)
    }

    pub fn depth(&self) -> u32 {
        self.levels.len() as u32 - 1
    }
}
