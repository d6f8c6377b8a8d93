//! Sampled wavefunctions: interior-node vectors, full-node vectors, and
//! edge-indexed bundles for star graphs.
//!
//! Discrete norms approximate the continuum `L^2` norms. Interior-node data
//! uses `|f|^2 = dx * sum_j |f_j|^2`; full-node data weights the two
//! endpoints by 1/2 (trapezoid rule), which is exactly what makes the
//! discrete cosine transform below unitary.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::real::{Real, C};

/// Wavefunction sampled at the interior nodes `x_1, ..., x_{n-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeWave<T> {
    grid: Grid<T>,
    values: Vec<C<T>>,
}

/// Wavefunction sampled at all nodes `x_0, ..., x_n` including endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct FullWave<T> {
    grid: Grid<T>,
    values: Vec<C<T>>,
}

/// One wavefunction per edge of a star graph, all on the same grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphWave<T> {
    edges: Vec<EdgeWave<T>>,
}

fn ensure_finite<T: Real>(values: &[C<T>]) -> Result<()> {
    if values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid("wavefunction samples must be finite"))
    }
}

impl<T: Real> EdgeWave<T> {
    /// Wraps `values` as interior-node samples on `grid`.
    pub fn new(grid: Grid<T>, values: Vec<C<T>>) -> Result<Self> {
        if values.len() != grid.interior_len() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} interior samples, got {}",
                grid.interior_len(),
                values.len()
            )));
        }
        ensure_finite(&values)?;
        Ok(EdgeWave { grid, values })
    }

    pub(crate) fn new_unchecked(grid: Grid<T>, values: Vec<C<T>>) -> Self {
        debug_assert_eq!(values.len(), grid.interior_len());
        EdgeWave { grid, values }
    }

    /// All-zero wave on `grid`.
    pub fn zeros(grid: Grid<T>) -> Self {
        EdgeWave {
            grid,
            values: vec![C::new(T::zero(), T::zero()); grid.interior_len()],
        }
    }

    /// Samples a function of position at the interior nodes.
    pub fn from_fn(grid: Grid<T>, mut f: impl FnMut(T) -> C<T>) -> Result<Self> {
        let values: Vec<C<T>> = grid.interior_nodes().map(&mut f).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[C<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C<T>] {
        &mut self.values
    }

    /// Discrete squared norm `dx * sum |f_j|^2`.
    pub fn norm_sqr(&self) -> T {
        let s = self
            .values
            .iter()
            .fold(T::zero(), |acc, v| acc + v.norm_sqr());
        s * self.grid.dx()
    }

    /// Discrete norm.
    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// Fraction of the squared norm carried by nodes with `x_j >= 0.95 x_max`.
    ///
    /// Returns 0 for the zero wave.
    pub fn tail_fraction(&self) -> T {
        let start = self.grid.tail_start();
        let mut tail = T::zero();
        let mut total = T::zero();
        for (j, v) in self.values.iter().enumerate() {
            let m = v.norm_sqr();
            total = total + m;
            if j + 1 >= start {
                tail = tail + m;
            }
        }
        if total > T::zero() {
            tail / total
        } else {
            T::zero()
        }
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(EdgeWave::new_unchecked(self.grid, values))
    }

    /// Pointwise difference.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(EdgeWave::new_unchecked(self.grid, values))
    }

    /// Scalar multiple.
    pub fn scaled(&self, c: C<T>) -> Self {
        let values = self.values.iter().map(|v| v * c).collect();
        EdgeWave::new_unchecked(self.grid, values)
    }

    /// Discrete `L^2` distance to `other`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        Ok(self.sub(other)?.norm())
    }

    /// Discrete inner product `dx * sum conj(f_j) g_j`.
    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        self.grid.ensure_same(&other.grid)?;
        let s = self
            .values
            .iter()
            .zip(&other.values)
            .fold(C::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            });
        Ok(s * self.grid.dx())
    }
}

impl<T: Real> FullWave<T> {
    /// Wraps `values` as full-node samples (length `n + 1`) on `grid`.
    pub fn new(grid: Grid<T>, values: Vec<C<T>>) -> Result<Self> {
        if values.len() != grid.n() + 1 {
            return Err(Error::DimensionMismatch(format!(
                "expected {} full-node samples, got {}",
                grid.n() + 1,
                values.len()
            )));
        }
        ensure_finite(&values)?;
        Ok(FullWave { grid, values })
    }

    pub(crate) fn new_unchecked(grid: Grid<T>, values: Vec<C<T>>) -> Self {
        debug_assert_eq!(values.len(), grid.n() + 1);
        FullWave { grid, values }
    }

    /// Extends interior samples by zero values at both endpoints.
    pub fn from_interior(wave: &EdgeWave<T>) -> Self {
        let zero = C::new(T::zero(), T::zero());
        let mut values = Vec::with_capacity(wave.grid.n() + 1);
        values.push(zero);
        values.extend_from_slice(&wave.values);
        values.push(zero);
        FullWave {
            grid: wave.grid,
            values,
        }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[C<T>] {
        &self.values
    }

    /// Drops the endpoint samples.
    pub fn interior(&self) -> EdgeWave<T> {
        EdgeWave::new_unchecked(self.grid, self.values[1..self.grid.n()].to_vec())
    }

    /// Trapezoid squared norm: endpoints weighted by 1/2.
    pub fn norm_sqr(&self) -> T {
        let n = self.grid.n();
        let half = T::lit(0.5);
        let mut s = half * (self.values[0].norm_sqr() + self.values[n].norm_sqr());
        for v in &self.values[1..n] {
            s = s + v.norm_sqr();
        }
        s * self.grid.dx()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }
}

impl<T: Real> GraphWave<T> {
    /// Bundles per-edge waves; at least one edge, all grids equal.
    pub fn new(edges: Vec<EdgeWave<T>>) -> Result<Self> {
        let first = edges
            .first()
            .ok_or_else(|| Error::invalid("graph wave needs at least one edge"))?;
        for e in &edges[1..] {
            first.grid.ensure_same(&e.grid)?;
        }
        Ok(GraphWave { edges })
    }

    /// All-zero graph wave with `n_edges` components.
    pub fn zeros(grid: Grid<T>, n_edges: usize) -> Result<Self> {
        if n_edges == 0 {
            return Err(Error::invalid("graph wave needs at least one edge"));
        }
        Ok(GraphWave {
            edges: (0..n_edges).map(|_| EdgeWave::zeros(grid)).collect(),
        })
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn grid(&self) -> &Grid<T> {
        self.edges[0].grid()
    }

    pub fn edges(&self) -> &[EdgeWave<T>] {
        &self.edges
    }

    /// Edge component by 0-based index.
    pub fn edge(&self, ell: usize) -> &EdgeWave<T> {
        &self.edges[ell]
    }

    /// Squared norm summed over edges.
    pub fn norm_sqr(&self) -> T {
        self.edges
            .iter()
            .fold(T::zero(), |acc, e| acc + e.norm_sqr())
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// Graph-level tail fraction: tail mass summed over edges divided by the
    /// total squared norm, so empty edges neither help nor hurt.
    pub fn tail_fraction(&self) -> T {
        let start = self.grid().tail_start();
        let mut tail = T::zero();
        let mut total = T::zero();
        for e in &self.edges {
            for (j, v) in e.values.iter().enumerate() {
                let m = v.norm_sqr();
                total = total + m;
                if j + 1 >= start {
                    tail = tail + m;
                }
            }
        }
        if total > T::zero() {
            tail / total
        } else {
            T::zero()
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.n_edges() != other.n_edges() {
            return Err(Error::DimensionMismatch(format!(
                "{} edges vs {}",
                self.n_edges(),
                other.n_edges()
            )));
        }
        let edges = self
            .edges
            .iter()
            .zip(&other.edges)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        GraphWave::new(edges)
    }

    /// Distance in the edge-summed `L^2` norm.
    pub fn distance(&self, other: &Self) -> Result<T> {
        Ok(self.sub(other)?.norm())
    }

    /// Applies `f` to every edge component.
    pub fn map_edges(&self, mut f: impl FnMut(&EdgeWave<T>) -> EdgeWave<T>) -> Self {
        GraphWave {
            edges: self.edges.iter().map(&mut f).collect(),
        }
    }
}
