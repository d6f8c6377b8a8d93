//! Star-graph dynamics: vertex scattering matrix, graph propagator, wave
//! operators, and the stationary scattering operator.
//!
//! An `n`-edge star graph carries one half line per edge, glued at a single
//! vertex. The self-adjoint Laplacian with standard (continuity plus zero
//! flux sum) vertex conditions evolves a graph wave by
//!
//! ```text
//! exp(-i t H / hbar) = (+) u_minus  -  S (+) u_plus
//! ```
//!
//! where `u_minus`/`u_plus` are the translation and mirror parts of free
//! half-line motion applied edgewise, and `S` is the vertex scattering
//! matrix acting on the edge index. For the equal-weight gluing `S` has
//! entries `delta - 2/n`; it is symmetric, involutive, and energy
//! independent. Replacing `S` by `-I` decouples the edges with Dirichlet
//! conditions; `n = 1` with `S = (-1)` recovers the Neumann half line.
//!
//! The wave operators comparing graph evolution with decoupled Dirichlet
//! evolution act edgewise through the transfer unitary `T = Fc* Fs`:
//!
//! ```text
//! (W(+/-) Psi)_l = Psi_l - (1/n) sum_l' (1 -/+ T) Psi_l'
//! ```
//!
//! and the composition `W(+)* W(-)` reproduces exactly the action of `S`,
//! with no dependence on `hbar`, mass, or packet shape.

use crate::error::{Error, Result};
use crate::real::{Real, C};
use crate::spectral::{
    dirichlet_propagate, neumann_propagate, transfer, transfer_adjoint, u_minus, u_plus,
};
use crate::states::TAIL_ERROR_LIMIT;
use crate::wave::{EdgeWave, GraphWave};
use crate::Sign;

/// Symmetric involutive vertex scattering matrix on the edge index.
#[derive(Clone, Debug, PartialEq)]
pub struct SMatrix<T> {
    n: usize,
    entries: Vec<T>,
}

impl<T: Real> SMatrix<T> {
    /// Equal-weight vertex matrix with entries `(n-2)/n` on the diagonal and
    /// `-2/n` off it.
    pub fn kirchhoff(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("vertex matrix needs at least one edge"));
        }
        let nt = T::from_usize(n).unwrap();
        let diag = (nt - T::lit(2.0)) / nt;
        let off = -T::lit(2.0) / nt;
        let mut entries = vec![off; n * n];
        for i in 0..n {
            entries[i * n + i] = diag;
        }
        Ok(SMatrix { n, entries })
    }

    /// Wraps a row-major `n x n` matrix, checking symmetry and `S^2 = I`.
    pub fn new(n: usize, entries: Vec<T>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "vertex matrix needs {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        let tol = T::epsilon() * T::lit(1e4);
        for i in 0..n {
            for j in 0..i {
                if (entries[i * n + j] - entries[j * n + i]).abs() > tol {
                    return Err(Error::invalid("vertex matrix must be symmetric"));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let mut acc = T::zero();
                for k in 0..n {
                    acc = acc + entries[i * n + k] * entries[k * n + j];
                }
                let expect = if i == j { T::one() } else { T::zero() };
                if (acc - expect).abs() > tol {
                    return Err(Error::invalid("vertex matrix must square to the identity"));
                }
            }
        }
        Ok(SMatrix { n, entries })
    }

    pub fn n_edges(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> T {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    /// True when the entries coincide with [`SMatrix::kirchhoff`] of the
    /// same size.
    pub fn is_kirchhoff(&self) -> bool {
        let reference = SMatrix::kirchhoff(self.n).expect("n >= 1");
        self.entries
            .iter()
            .zip(&reference.entries)
            .all(|(a, b)| *a == *b)
    }

    /// Matrix-vector product over the edge index.
    pub fn apply(&self, values: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(values.len(), self.n);
        (0..self.n)
            .map(|i| {
                let mut acc = C::new(T::zero(), T::zero());
                for (j, v) in values.iter().enumerate() {
                    acc = acc + v * C::new(self.entry(i, j), T::zero());
                }
                acc
            })
            .collect()
    }

    /// Applies the matrix pointwise across a graph wave.
    pub fn apply_graph(&self, psi: &GraphWave<T>) -> Result<GraphWave<T>> {
        self.ensure_edges(psi)?;
        let grid = *psi.grid();
        let len = grid.interior_len();
        let zero = C::new(T::zero(), T::zero());
        let mut out = vec![vec![zero; len]; self.n];
        for j in 0..len {
            for (i, row) in out.iter_mut().enumerate() {
                let mut acc = zero;
                for ell in 0..self.n {
                    acc = acc + psi.edge(ell).values()[j] * C::new(self.entry(i, ell), T::zero());
                }
                row[j] = acc;
            }
        }
        GraphWave::new(
            out.into_iter()
                .map(|v| EdgeWave::new_unchecked(grid, v))
                .collect(),
        )
    }

    fn ensure_edges(&self, psi: &GraphWave<T>) -> Result<()> {
        if psi.n_edges() == self.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "vertex matrix has {} edges, wave has {}",
                self.n,
                psi.n_edges()
            )))
        }
    }

    fn ensure_kirchhoff(&self) -> Result<()> {
        if self.is_kirchhoff() {
            Ok(())
        } else {
            Err(Error::NonKirchhoffMatrix(self.n))
        }
    }
}

fn guard_tail<T: Real>(fraction: T) -> Result<()> {
    let frac = fraction.as_f64();
    if frac > TAIL_ERROR_LIMIT {
        Err(Error::TailMassExceeded {
            fraction: frac,
            limit: TAIL_ERROR_LIMIT,
        })
    } else {
        Ok(())
    }
}

/// Evolves a graph wave for time `t` under the glued Laplacian with vertex
/// matrix `s`.
///
/// Fails when the evolved wave leaves too much mass near the artificial far
/// end of the grid.
pub fn kirchhoff_propagate<T: Real>(
    psi: &GraphWave<T>,
    t: T,
    hbar: T,
    mass: T,
    s: &SMatrix<T>,
) -> Result<GraphWave<T>> {
    s.ensure_edges(psi)?;
    let minus: Vec<EdgeWave<T>> = psi
        .edges()
        .iter()
        .map(|e| u_minus(e, t, hbar, mass))
        .collect();
    let plus: Vec<EdgeWave<T>> = psi
        .edges()
        .iter()
        .map(|e| u_plus(e, t, hbar, mass))
        .collect();
    let scattered = s.apply_graph(&GraphWave::new(plus)?)?;
    let edges = minus
        .into_iter()
        .zip(scattered.edges())
        .map(|(m, sp)| m.sub(sp))
        .collect::<Result<Vec<_>>>()?;
    let out = GraphWave::new(edges)?;
    guard_tail(out.tail_fraction())?;
    Ok(out)
}

/// Evolves every edge independently with a Dirichlet condition at the
/// vertex (the decoupled comparison dynamics).
pub fn dirichlet_graph_propagate<T: Real>(
    psi: &GraphWave<T>,
    t: T,
    hbar: T,
    mass: T,
) -> Result<GraphWave<T>> {
    let out = psi.map_edges(|e| dirichlet_propagate(e, t, hbar, mass));
    guard_tail(out.tail_fraction())?;
    Ok(out)
}

/// Half-line comparison operator between Neumann and Dirichlet dynamics:
/// `+T` or `-T` with the transfer unitary `T = Fc* Fs`.
pub fn wave_operator_nd<T: Real>(psi: &EdgeWave<T>, sign: Sign) -> EdgeWave<T> {
    let t = transfer(psi);
    match sign {
        Sign::Plus => t,
        Sign::Minus => t.scaled(C::new(-T::one(), T::zero())),
    }
}

/// Defect of the half-line comparison: how far `U^N_{-t} U^D_t` is from
/// `sign * T` on the state `phi`.
///
/// The plus sign is approached as `t -> +infinity`, the minus sign along
/// negative times. Fails when the Dirichlet excursion reaches the far end
/// of the grid.
pub fn nd_defect<T: Real>(phi: &EdgeWave<T>, t: T, hbar: T, mass: T, sign: Sign) -> Result<T> {
    let excursion = dirichlet_propagate(phi, t, hbar, mass);
    guard_tail(excursion.tail_fraction())?;
    let back = neumann_propagate(&excursion, -t, hbar, mass);
    let target = wave_operator_nd(phi, sign);
    back.distance(&target)
}

/// Graph wave operator comparing glued and decoupled dynamics.
///
/// Only defined for the equal-weight vertex matrix; any other matrix is
/// rejected. The result is independent of `hbar`, mass, and time.
pub fn wave_operator<T: Real>(
    psi: &GraphWave<T>,
    sign: Sign,
    s: &SMatrix<T>,
) -> Result<GraphWave<T>> {
    s.ensure_kirchhoff()?;
    s.ensure_edges(psi)?;
    edge_average_update(psi, sign, transfer)
}

/// Adjoint of [`wave_operator`] with the same sign convention.
pub fn wave_operator_adjoint<T: Real>(
    psi: &GraphWave<T>,
    sign: Sign,
    s: &SMatrix<T>,
) -> Result<GraphWave<T>> {
    s.ensure_kirchhoff()?;
    s.ensure_edges(psi)?;
    edge_average_update(psi, sign, transfer_adjoint)
}

/// Shared structure of the wave operators: form the edge sum `A`, apply
/// `1 -/+ op` to it, subtract `1/n` of the result from every edge.
fn edge_average_update<T: Real>(
    psi: &GraphWave<T>,
    sign: Sign,
    op: impl Fn(&EdgeWave<T>) -> EdgeWave<T>,
) -> Result<GraphWave<T>> {
    let n = psi.n_edges();
    let grid = *psi.grid();
    let mut sum = EdgeWave::zeros(grid);
    for e in psi.edges() {
        sum = sum.add(e)?;
    }
    let transferred = op(&sum);
    let correction = match sign {
        Sign::Plus => sum.sub(&transferred)?,
        Sign::Minus => sum.add(&transferred)?,
    };
    let inv_n = C::new(-T::from_usize(n).unwrap().recip(), T::zero());
    let shift = correction.scaled(inv_n);
    let edges = psi
        .edges()
        .iter()
        .map(|e| e.add(&shift))
        .collect::<Result<Vec<_>>>()?;
    GraphWave::new(edges)
}

/// Stationary scattering operator `W(+)* W(-)`, applied as the literal
/// composition of the two wave operators.
pub fn scattering_apply<T: Real>(psi: &GraphWave<T>, s: &SMatrix<T>) -> Result<GraphWave<T>> {
    wave_operator_adjoint(&wave_operator(psi, Sign::Minus, s)?, Sign::Plus, s)
}

/// Residuals of the standard vertex conditions, estimated from the five
/// interior nodes closest to the vertex by quartic extrapolation.
#[derive(Clone, Copy, Debug)]
pub struct BcResidual<T> {
    /// Largest modulus of a pairwise difference of edge boundary values.
    pub continuity: T,
    /// Modulus of the summed outgoing derivatives.
    pub flux: T,
}

/// Quartic one-sided estimates of `psi(0)` and `psi'(0)` from the samples
/// at `x_1..x_5`.
fn boundary_estimates<T: Real>(e: &EdgeWave<T>) -> (C<T>, C<T>) {
    let dx = e.grid().dx();
    let v = e.values();
    let value_coeffs = [5.0, -10.0, 10.0, -5.0, 1.0];
    let deriv_coeffs = [
        -77.0 / 12.0,
        107.0 / 6.0,
        -39.0 / 2.0,
        61.0 / 6.0,
        -25.0 / 12.0,
    ];
    let mut value = C::new(T::zero(), T::zero());
    let mut deriv = C::new(T::zero(), T::zero());
    for i in 0..5 {
        value = value + v[i] * C::new(T::lit(value_coeffs[i]), T::zero());
        deriv = deriv + v[i] * C::new(T::lit(deriv_coeffs[i]), T::zero());
    }
    (value, deriv / C::new(dx, T::zero()))
}

/// Measures how well a graph wave satisfies continuity and zero flux sum at
/// the vertex. The residuals are raw (not normalized by the wave's norm).
pub fn kirchhoff_bc_residual<T: Real>(psi: &GraphWave<T>) -> BcResidual<T> {
    let estimates: Vec<(C<T>, C<T>)> = psi.edges().iter().map(boundary_estimates).collect();
    let mut continuity = T::zero();
    for (i, (vi, _)) in estimates.iter().enumerate() {
        for (vj, _) in estimates.iter().skip(i + 1) {
            continuity = continuity.max((vi - vj).norm());
        }
    }
    let flux = estimates
        .iter()
        .fold(C::new(T::zero(), T::zero()), |acc, (_, d)| acc + d)
        .norm();
    BcResidual { continuity, flux }
}
