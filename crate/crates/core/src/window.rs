use std::fmt;
use std::str::FromStr;

use crate::error::{Result, SwdftError};

/// Scaling applied to the raw (unnormalized) window sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Normalization {
    #[default]
    None,
    /// `1/n`, one-dimensional transforms only.
    Paper1d,
    /// `1/sqrt(n0 * n1 * ...)`, two or more dimensions.
    Paper2d,
    /// `1/sqrt(n0 * n1 * ...)` in any rank.
    Unitary,
}

impl Normalization {
    pub const ALL: [Normalization; 4] = [
        Normalization::None,
        Normalization::Paper1d,
        Normalization::Paper2d,
        Normalization::Unitary,
    ];

    /// Container byte code.
    pub fn code(self) -> u8 {
        match self {
            Normalization::None => 0,
            Normalization::Paper1d => 1,
            Normalization::Paper2d => 2,
            Normalization::Unitary => 3,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.code() == code)
            .ok_or_else(|| SwdftError::Format(format!("unknown normalization code {code}")))
    }

    pub fn name(self) -> &'static str {
        match self {
            Normalization::None => "none",
            Normalization::Paper1d => "paper-1d",
            Normalization::Paper2d => "paper-2d",
            Normalization::Unitary => "unitary",
        }
    }

    /// Multiplicative factor for a window with the given extents.
    pub fn factor(self, sizes: &[usize]) -> Result<f64> {
        let count: usize = sizes.iter().product();
        match self {
            Normalization::None => Ok(1.0),
            Normalization::Paper1d if sizes.len() == 1 => Ok(1.0 / count as f64),
            Normalization::Paper1d => Err(SwdftError::Normalization(format!(
                "paper-1d applies to 1D windows, got rank {}",
                sizes.len()
            ))),
            Normalization::Paper2d if sizes.len() >= 2 => Ok(1.0 / (count as f64).sqrt()),
            Normalization::Paper2d => Err(SwdftError::Normalization(
                "paper-2d applies to windows of rank 2 or more".into(),
            )),
            Normalization::Unitary => Ok(1.0 / (count as f64).sqrt()),
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Normalization {
    type Err = SwdftError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.name() == s)
            .ok_or_else(|| SwdftError::Normalization(format!("unknown mode `{s}`")))
    }
}

/// Radix-2 window shape: one exponent `m_i` per dimension, extent `2^m_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WindowSpec {
    exponents: Vec<u32>,
    normalization: Normalization,
}

impl WindowSpec {
    pub fn from_exponents(exponents: &[u32]) -> Result<Self> {
        if exponents.is_empty() {
            return Err(SwdftError::Shape(
                "window needs at least one dimension".into(),
            ));
        }
        if let Some(&m) = exponents.iter().find(|&&m| m >= usize::BITS - 1) {
            return Err(SwdftError::Shape(format!(
                "window exponent {m} is too large"
            )));
        }
        Ok(WindowSpec {
            exponents: exponents.to_vec(),
            normalization: Normalization::None,
        })
    }

    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let exponents = sizes
            .iter()
            .map(|&n| {
                if n.is_power_of_two() {
                    Ok(n.trailing_zeros())
                } else {
                    Err(SwdftError::InvalidWindow(n))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_exponents(&exponents)
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn exponent(&self, dim: usize) -> u32 {
        self.exponents[dim]
    }

    pub fn size(&self, dim: usize) -> usize {
        1 << self.exponents[dim]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.exponents.iter().map(|&m| 1usize << m).collect()
    }

    /// Number of coefficients per window, `n0 * n1 * ...`.
    pub fn window_len(&self) -> usize {
        1 << self.total_levels()
    }

    /// Tree depth, `m0 + m1 + ...`.
    pub fn total_levels(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// Window positions per dimension, `N_i - n_i + 1`.
    pub fn positions(&self, dims: &[usize]) -> Result<Vec<usize>> {
        self.check_fits(dims)?;
        Ok(dims
            .iter()
            .zip(self.sizes())
            .map(|(&big, small)| big - small + 1)
            .collect())
    }

    pub fn check_fits(&self, dims: &[usize]) -> Result<()> {
        if dims.len() != self.rank() {
            return Err(SwdftError::RankMismatch {
                expected: self.rank(),
                found: dims.len(),
            });
        }
        if dims
            .iter()
            .zip(self.sizes())
            .any(|(&big, small)| small > big)
        {
            return Err(SwdftError::WindowTooLarge {
                window: self.sizes(),
                dims: dims.to_vec(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sizes().iter().map(|n| n.to_string()).collect();
        f.write_str(&parts.join("x"))
    }
}

/// Parses `"8x8"`, `"4x2x2"` or `"16"`.
impl FromStr for WindowSpec {
    type Err = SwdftError;

    fn from_str(s: &str) -> Result<Self> {
        let sizes = parse_extents(s)?;
        WindowSpec::from_sizes(&sizes)
    }
}

/// Parses an `AxBxC` extent list.
pub fn parse_extents(s: &str) -> Result<Vec<usize>> {
    s.split(['x', 'X'])
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| SwdftError::Shape(format!("bad extent `{part}` in `{s}`")))
        })
        .collect()
}
