//! Uniform grid on the interval `[0, x_max]`.
//!
//! The interval stands in for the half line: wavefunctions are sampled at the
//! interior nodes `x_j = j dx`, `j = 1..n-1`, while cosine-side data also
//! carries the endpoints `x_0 = 0` and `x_n = x_max`. The conjugate
//! wavenumbers are `k_r = r pi / x_max`.

use crate::error::{Error, Result};
use crate::real::Real;

/// Number of subintervals and physical length of the sampling interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid<T> {
    x_max: T,
    n: usize,
}

impl<T: Real> Grid<T> {
    /// Creates a grid with `n` subintervals on `[0, x_max]`.
    ///
    /// `n` must be a power of two and at least 8 so the fast transforms have
    /// a regular factorization and the tail-guard region is meaningful.
    pub fn new(x_max: T, n: usize) -> Result<Self> {
        if !(x_max > T::zero()) || !x_max.is_finite() {
            return Err(Error::invalid("grid length must be positive and finite"));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::invalid(format!(
                "grid subinterval count must be a power of two >= 8, got {n}"
            )));
        }
        Ok(Grid { x_max, n })
    }

    /// Interval length.
    pub fn x_max(&self) -> T {
        self.x_max
    }

    /// Number of subintervals.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Node spacing `x_max / n`.
    pub fn dx(&self) -> T {
        self.x_max / T::from_usize(self.n).unwrap()
    }

    /// Wavenumber spacing `pi / x_max`.
    pub fn dk(&self) -> T {
        T::PI() / self.x_max
    }

    /// Node `x_j = j dx`, valid for `j = 0..=n`.
    pub fn node(&self, j: usize) -> T {
        debug_assert!(j <= self.n);
        T::from_usize(j).unwrap() * self.dx()
    }

    /// Wavenumber `k_r = r pi / x_max`, valid for `r = 0..=n`.
    pub fn wavenumber(&self, r: usize) -> T {
        debug_assert!(r <= self.n);
        T::from_usize(r).unwrap() * self.dk()
    }

    /// Number of interior nodes, `n - 1`.
    pub fn interior_len(&self) -> usize {
        self.n - 1
    }

    /// Iterator over the interior nodes `x_1, ..., x_{n-1}`.
    pub fn interior_nodes(&self) -> impl Iterator<Item = T> + '_ {
        (1..self.n).map(move |j| self.node(j))
    }

    /// Index of the first interior node inside the tail-guard region,
    /// i.e. the smallest `j` with `x_j >= 0.95 x_max`.
    pub fn tail_start(&self) -> usize {
        // x_j >= 0.95 x_max  <=>  20 j >= 19 n, in exact integer arithmetic.
        (19 * self.n).div_ceil(20)
    }

    /// Grid with the same length and twice the resolution.
    pub fn refined(&self) -> Self {
        Grid {
            x_max: self.x_max,
            n: 2 * self.n,
        }
    }

    /// Checks that `self` and `other` coincide.
    pub fn ensure_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "[0, {:?}] with {} subintervals vs [0, {:?}] with {}",
                self.x_max, self.n, other.x_max, other.n
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::<f64>::new(10.0, 7).is_err());
        assert!(Grid::<f64>::new(10.0, 12).is_err());
        assert!(Grid::<f64>::new(10.0, 4).is_err());
        assert!(Grid::<f64>::new(0.0, 16).is_err());
        assert!(Grid::<f64>::new(-1.0, 16).is_err());
        assert!(Grid::<f64>::new(10.0, 16).is_ok());
    }

    #[test]
    fn nodes_and_wavenumbers() {
        let g = Grid::<f64>::new(8.0, 16).unwrap();
        assert_eq!(g.dx(), 0.5);
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(16), 8.0);
        assert_eq!(g.node(3), 1.5);
        assert!((g.wavenumber(1) - std::f64::consts::PI / 8.0).abs() < 1e-15);
        assert_eq!(g.interior_len(), 15);
    }

    #[test]
    fn tail_region_starts_at_95_percent() {
        let g = Grid::<f64>::new(1.0, 64).unwrap();
        let j = g.tail_start();
        assert!(g.node(j) >= 0.95);
        assert!(g.node(j - 1) < 0.95);
        // n = 8 leaves no interior node in the guard region.
        let small = Grid::<f64>::new(1.0, 8).unwrap();
        assert_eq!(small.tail_start(), 8);
    }

    #[test]
    fn refinement_doubles_n() {
        let g = Grid::<f64>::new(5.0, 32).unwrap();
        let r = g.refined();
        assert_eq!(r.n(), 64);
        assert_eq!(r.x_max(), 5.0);
    }
}
