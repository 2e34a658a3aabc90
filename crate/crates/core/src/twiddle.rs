use std::f64::consts::FRAC_PI_2;
use std::ops::Index;

use crate::error::{Result, SwdftError};
use crate::Complex64;

/// The table `[w^0, w^-1, ..., w^-(n-1)]` with `w = exp(2*pi*i/n)`.
///
/// Entries at multiples of a quarter turn are exact (`1`, `-i`, `-1`, `i`);
/// the remaining angles are reduced into the first quadrant before evaluating
/// `cos`/`sin`, so `entries[j]` and `entries[n - j]` are exact conjugates.
#[derive(Debug, Clone, PartialEq)]
pub struct TwiddleVector {
    entries: Vec<Complex64>,
}

impl TwiddleVector {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.entries
    }
}

impl Index<usize> for TwiddleVector {
    type Output = Complex64;

    #[inline]
    fn index(&self, j: usize) -> &Complex64 {
        &self.entries[j]
    }
}

pub fn make_twiddles(n: usize) -> Result<TwiddleVector> {
    if !n.is_power_of_two() {
        return Err(SwdftError::InvalidWindow(n));
    }
    let entries = (0..n).map(|j| negative_root_power(j, n)).collect();
    Ok(TwiddleVector { entries })
}

/// `exp(-2*pi*i*j/n)` for power-of-two `n`.
fn negative_root_power(j: usize, n: usize) -> Complex64 {
    // 2*pi*j/n = quadrant * pi/2 + (pi/2) * rem/n
    let quadrant = (4 * j) / n;
    let rem = (4 * j) % n;
    let (s, c) = if rem == 0 {
        (0.0, 1.0)
    } else {
        (FRAC_PI_2 * rem as f64 / n as f64).sin_cos()
    };
    // exp(+i*theta) rotated by quadrant quarter turns, then conjugated
    let (re, im) = match quadrant % 4 {
        0 => (c, s),
        1 => (-s, c),
        2 => (-c, -s),
        _ => (s, -c),
    };
    Complex64::new(re, -im)
}
