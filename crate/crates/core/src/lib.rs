//! Sliding window discrete Fourier transforms built on per-position FFT trees.
//!
//! Every window position owns a radix-2 tree whose final level holds that
//! window's DFT. Overlapping windows share the lower levels of their trees, so
//! each new window costs `2 (n_0 n_1 ... - 1)` complex multiply-adds instead of
//! a full FFT.
//!
//! * [`tree1d`], [`tree2d`] and [`treekd`] are the tree engines.
//! * [`oracle`] holds the direct sums and per-window FFTs used to check them.
//! * [`bench`] predicts operation counts and times the three approaches.

pub mod array;
pub mod bench;
pub mod container;
pub mod error;
pub mod memory;
pub mod oracle;
pub mod probe;
pub mod schedule;
pub mod tree1d;
pub mod tree2d;
pub mod treekd;
pub mod twiddle;
pub mod window;

pub use num_complex::Complex64;

pub use array::{CoefficientArray, NdArray};
pub use error::{Result, SwdftError};
pub use memory::{MemoryBudget, MemoryPlan};
pub use probe::{OpCounter, Probe};
pub use schedule::{level_geometry, shift, LevelGeometry, ShiftSchedule};
pub use twiddle::{make_twiddles, TwiddleVector};
pub use window::{Normalization, WindowSpec};
