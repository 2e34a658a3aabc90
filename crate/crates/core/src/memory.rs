use std::fmt;

use crate::error::{Result, SwdftError};
use crate::window::WindowSpec;

/// Double-precision complex values take 16 bytes.
pub const BYTES_PER_COMPLEX: u64 = 16;

pub const DEFAULT_BUDGET_BYTES: u64 = 4 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryBudget(pub u64);

impl Default for MemoryBudget {
    fn default() -> Self {
        MemoryBudget(DEFAULT_BUDGET_BYTES)
    }
}

impl MemoryBudget {
    pub fn unlimited() -> Self {
        MemoryBudget(u64::MAX)
    }

    pub fn bytes(self) -> u64 {
        self.0
    }

    pub fn check(self, required: u64) -> Result<()> {
        if required > self.0 {
            Err(SwdftError::BudgetExceeded {
                required,
                budget: self.0,
            })
        } else {
            Ok(())
        }
    }
}

/// Storage needed by a sliding-window transform, in complex elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryPlan {
    /// `P_0 * ... * n_0 * ...`
    pub output_elements: u64,
    /// Two level buffers of `N_0 * ... * n_0 * ...` each; zero for the oracles.
    pub level_buffer_elements: u64,
}

fn checked_product(values: impl IntoIterator<Item = usize>) -> Result<u64> {
    values.into_iter().try_fold(1u64, |acc, v| {
        acc.checked_mul(v as u64)
            .ok_or_else(|| SwdftError::Shape("element count overflows u64".into()))
    })
}

impl MemoryPlan {
    /// Output only: what the per-window oracles need.
    pub fn output_only(dims: &[usize], window: &WindowSpec) -> Result<Self> {
        let positions = window.positions(dims)?;
        Ok(MemoryPlan {
            output_elements: checked_product(positions.into_iter().chain(window.sizes()))?,
            level_buffer_elements: 0,
        })
    }

    /// Output plus the double-buffered tree lattice.
    pub fn tree(dims: &[usize], window: &WindowSpec) -> Result<Self> {
        let mut plan = Self::output_only(dims, window)?;
        let lattice = checked_product(dims.iter().copied().chain(window.sizes()))?;
        plan.level_buffer_elements = lattice
            .checked_mul(2)
            .ok_or_else(|| SwdftError::Shape("element count overflows u64".into()))?;
        Ok(plan)
    }

    pub fn output_bytes(&self) -> u64 {
        self.output_elements.saturating_mul(BYTES_PER_COMPLEX)
    }

    pub fn level_buffer_bytes(&self) -> u64 {
        self.level_buffer_elements.saturating_mul(BYTES_PER_COMPLEX)
    }

    pub fn total_bytes(&self) -> u64 {
        self.output_bytes()
            .saturating_add(self.level_buffer_bytes())
    }

    pub fn check(&self, budget: MemoryBudget) -> Result<()> {
        budget.check(self.total_bytes())
    }
}

impl fmt::Display for MemoryPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "output_bytes={} level_buffer_bytes={} total_bytes={}",
            self.output_bytes(),
            self.level_buffer_bytes(),
            self.total_bytes()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_output_example() {
        let spec = WindowSpec::from_sizes(&[32, 32]).unwrap();
        let plan = MemoryPlan::tree(&[431, 431], &spec).unwrap();
        assert_eq!(plan.output_elements, 163_840_000);
        assert_eq!(plan.output_bytes(), 2_621_440_000);
        assert_eq!(plan.level_buffer_elements, 2 * 431 * 431 * 1024);
        assert!(plan.check(MemoryBudget::default()).is_err());
        assert!(plan.check(MemoryBudget::unlimited()).is_ok());
    }

    #[test]
    fn budget_error_reports_requirement() {
        let err = MemoryBudget(100).check(160).unwrap_err();
        assert!(matches!(
            err,
            SwdftError::BudgetExceeded {
                required: 160,
                budget: 100
            }
        ));
    }
}
