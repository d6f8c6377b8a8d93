//! Liouville transport on the half line and the star graph, classical wave
//! and scattering operators, and transported phase-space densities.
//!
//! Classical states are fields over phase space: each edge carries an
//! evaluation rule `(x, (q, p)) -> complex`, where `(q, p)` is the phase
//! point being transported and `x` is a position parameter that rides along
//! unchanged (the quantum comparisons integrate over it at fixed phase
//! point). Free transport moves `q` along straight lines; when the
//! trajectory crosses the vertex the field is evaluated at the mirrored
//! phase point and mixed across edges with the matrix `-S`, which for the
//! equal-weight vertex has entries `2/n - delta`. On a single edge the
//! mixing coefficient is `+1` (Neumann-type reflection without sign flip);
//! on two edges it is pure transmission.
//!
//! The trajectory hitting the vertex exactly (`q + p t / m = 0`) is a
//! measure-zero event; transported values there are defined to be 0.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::quantum_graph::SMatrix;
use crate::real::{Real, C};
use crate::states::{halfline_norm_sq, CoherentParams, CutoffSpec, Packet};
use crate::wave::{EdgeWave, GraphWave};
use crate::Sign;

/// Point of the half-line phase space, `q > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint<T> {
    q: T,
    p: T,
}

impl<T: Real> PhasePoint<T> {
    pub fn new(q: T, p: T) -> Result<Self> {
        if !(q > T::zero()) || !q.is_finite() || !p.is_finite() {
            return Err(Error::invalid(
                "phase point needs q > 0 and finite coordinates",
            ));
        }
        Ok(PhasePoint { q, p })
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn p(&self) -> T {
        self.p
    }

    /// Mirror image `(q, -p)`; stays inside the phase space.
    pub fn reversed(&self) -> Self {
        PhasePoint {
            q: self.q,
            p: -self.p,
        }
    }
}

type Component<T> = Arc<dyn Fn(T, PhasePoint<T>) -> C<T>>;

/// Edge-indexed field over the half-line phase space.
#[derive(Clone)]
pub struct ClassicalField<T> {
    components: Vec<Component<T>>,
}

impl<T: Real + 'static> ClassicalField<T> {
    /// Builds a field from per-edge closures.
    pub fn from_components(components: Vec<Component<T>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("classical field needs at least one edge"));
        }
        Ok(ClassicalField { components })
    }

    /// Field that vanishes on all `n_edges` edges.
    pub fn zero(n_edges: usize) -> Result<Self> {
        let z: Component<T> = Arc::new(|_, _| C::new(T::zero(), T::zero()));
        Self::from_components((0..n_edges).map(|_| z.clone()).collect())
    }

    pub fn n_edges(&self) -> usize {
        self.components.len()
    }

    /// Evaluates component `ell` at position `x` and phase point `xi`.
    pub fn eval(&self, ell: usize, x: T, xi: PhasePoint<T>) -> C<T> {
        (self.components[ell])(x, xi)
    }

    /// Field of squared moduli, used as a transport density.
    pub fn density(&self) -> Self {
        let components = self
            .components
            .iter()
            .map(|c| {
                let c = c.clone();
                let out: Component<T> =
                    Arc::new(move |x, xi| C::new(c(x, xi).norm_sqr(), T::zero()));
                out
            })
            .collect();
        ClassicalField { components }
    }

    /// Samples all components on the grid at a fixed phase point.
    pub fn render(&self, grid: Grid<T>, xi: PhasePoint<T>) -> Result<GraphWave<T>> {
        let edges = (0..self.n_edges())
            .map(|ell| EdgeWave::from_fn(grid, |x| self.eval(ell, x, xi)))
            .collect::<Result<Vec<_>>>()?;
        GraphWave::new(edges)
    }
}

impl<T> std::fmt::Debug for ClassicalField<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClassicalField")
            .field("n_edges", &self.components.len())
            .finish()
    }
}

/// Classical counterpart of the truncated packet, supported on the first
/// of `n_edges` edges.
///
/// Component 1 evaluates the truncated packet of width `sigma` recentered
/// at the phase point of evaluation, normalized by its continuum half-line
/// norm; the truncation window follows the center. Components `2..n`
/// vanish.
pub fn classical_field<T: Real + 'static>(
    cp: &CoherentParams<T>,
    sigma: C<T>,
    cut: &CutoffSpec<T>,
    n_edges: usize,
) -> Result<ClassicalField<T>> {
    crate::states::ensure_sigma(cp, sigma)?;
    if n_edges == 0 {
        return Err(Error::invalid("classical field needs at least one edge"));
    }
    let cp = *cp;
    let cut = *cut;
    let first: Component<T> = Arc::new(move |x, xi: PhasePoint<T>| {
        let norm = halfline_norm_sq(&cp, sigma, &cut, xi.q(), xi.p()).sqrt();
        let packet = Packet {
            hbar: cp.hbar(),
            sigma0: cp.sigma0(),
            sigma,
            q: xi.q(),
            p: xi.p(),
        };
        packet.eval(x) * C::new(cut.chi(xi.q(), x) / norm, T::zero())
    });
    let zero: Component<T> = Arc::new(|_, _| C::new(T::zero(), T::zero()));
    let mut components = vec![first];
    components.extend((1..n_edges).map(|_| zero.clone()));
    ClassicalField::from_components(components)
}

/// Straight-line transport on the half line with Dirichlet-type reflection:
/// past the vertex the field is evaluated at the mirrored phase point with
/// a sign flip. At the exact crossing the value is 0 by convention.
pub fn liouville_halfline<T: Real + 'static>(
    f: &ClassicalField<T>,
    x: T,
    t: T,
    mass: T,
    xi: PhasePoint<T>,
) -> Result<C<T>> {
    if f.n_edges() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "half-line transport needs a 1-component field, got {}",
            f.n_edges()
        )));
    }
    let qt = xi.q() + xi.p() * t / mass;
    if qt > T::zero() {
        Ok(f.eval(0, x, PhasePoint { q: qt, p: xi.p() }))
    } else if qt < T::zero() {
        Ok(-f.eval(
            0,
            x,
            PhasePoint {
                q: -qt,
                p: -xi.p(),
            },
        ))
    } else {
        Ok(C::new(T::zero(), T::zero()))
    }
}

/// Straight-line transport on the star graph: free motion on the
/// non-crossing branch, mirrored evaluation mixed with `-S` across edges on
/// the crossing branch, 0 at the exact crossing.
pub fn liouville_kirchhoff<T: Real + 'static>(
    field: &ClassicalField<T>,
    x: T,
    t: T,
    mass: T,
    xi: PhasePoint<T>,
    s: &SMatrix<T>,
) -> Result<Vec<C<T>>> {
    let n = field.n_edges();
    if s.n_edges() != n {
        return Err(Error::DimensionMismatch(format!(
            "vertex matrix has {} edges, field has {}",
            s.n_edges(),
            n
        )));
    }
    let qt = xi.q() + xi.p() * t / mass;
    if qt > T::zero() {
        let moved = PhasePoint { q: qt, p: xi.p() };
        Ok((0..n).map(|ell| field.eval(ell, x, moved)).collect())
    } else if qt < T::zero() {
        let mirrored = PhasePoint {
            q: -qt,
            p: -xi.p(),
        };
        let values: Vec<C<T>> = (0..n).map(|ell| field.eval(ell, x, mirrored)).collect();
        let mixed = s.apply(&values);
        Ok(mixed.into_iter().map(|v| -v).collect())
    } else {
        Ok(vec![C::new(T::zero(), T::zero()); n])
    }
}

/// Classical wave operator `theta(+/- p) 1 + theta(-/+ p) S`, evaluated at
/// position `x` and phase point `xi`.
///
/// Only the equal-weight vertex matrix is admitted. At `p = 0` the field is
/// returned unchanged and the second return value is `true` to flag the
/// convention.
pub fn classical_wave_op<T: Real + 'static>(
    field: &ClassicalField<T>,
    x: T,
    sign: Sign,
    xi: PhasePoint<T>,
    s: &SMatrix<T>,
) -> Result<(Vec<C<T>>, bool)> {
    let n = field.n_edges();
    if s.n_edges() != n {
        return Err(Error::DimensionMismatch(format!(
            "vertex matrix has {} edges, field has {}",
            s.n_edges(),
            n
        )));
    }
    if !s.is_kirchhoff() {
        return Err(Error::NonKirchhoffMatrix(s.n_edges()));
    }
    let values: Vec<C<T>> = (0..n).map(|ell| field.eval(ell, x, xi)).collect();
    if xi.p() == T::zero() {
        return Ok((values, true));
    }
    let keep = match sign {
        Sign::Plus => xi.p() > T::zero(),
        Sign::Minus => xi.p() < T::zero(),
    };
    if keep {
        Ok((values, false))
    } else {
        Ok((s.apply(&values), false))
    }
}

/// Classical scattering operator as the literal composition of the minus
/// wave operator with the adjoint plus one; away from `p = 0` this is
/// exactly the action of `S`.
pub fn classical_scattering<T: Real + 'static>(
    field: &ClassicalField<T>,
    x: T,
    xi: PhasePoint<T>,
    s: &SMatrix<T>,
) -> Result<(Vec<C<T>>, bool)> {
    let (incoming, flagged) = classical_wave_op(field, x, Sign::Minus, xi, s)?;
    if flagged {
        return Ok((incoming, true));
    }
    // The plus operator is a real symmetric coefficient matrix at fixed xi,
    // so its adjoint applies the same branch rule.
    let out = if xi.p() > T::zero() {
        incoming
    } else {
        s.apply(&incoming)
    };
    Ok((out, false))
}

/// Transported phase-space density: free pull-back along the backward
/// trajectory, with `|S|^2` edge weights on the reflected branch.
pub fn bg_density_transport<T: Real + 'static>(
    rho: &ClassicalField<T>,
    x: T,
    t: T,
    mass: T,
    xi: PhasePoint<T>,
    s: &SMatrix<T>,
) -> Result<Vec<T>> {
    let n = rho.n_edges();
    if s.n_edges() != n {
        return Err(Error::DimensionMismatch(format!(
            "vertex matrix has {} edges, density has {}",
            s.n_edges(),
            n
        )));
    }
    let qs = xi.q() - xi.p() * t / mass;
    if qs > T::zero() {
        let src = PhasePoint { q: qs, p: xi.p() };
        Ok((0..n).map(|ell| rho.eval(ell, x, src).re).collect())
    } else if qs < T::zero() {
        let src = PhasePoint {
            q: -qs,
            p: -xi.p(),
        };
        let values: Vec<T> = (0..n).map(|ell| rho.eval(ell, x, src).re).collect();
        Ok((0..n)
            .map(|ell| {
                let mut acc = T::zero();
                for (lp, v) in values.iter().enumerate() {
                    let w = s.entry(ell, lp);
                    acc = acc + w * w * *v;
                }
                acc
            })
            .collect())
    } else {
        Ok(vec![T::zero(); n])
    }
}

/// Distance between two fields at fixed phase point, integrating the
/// squared difference over the position grid on every edge.
pub fn classical_graph_distance_asfield<T: Real + 'static>(
    f: &ClassicalField<T>,
    g: &ClassicalField<T>,
    grid: Grid<T>,
    xi: PhasePoint<T>,
) -> Result<T> {
    if f.n_edges() != g.n_edges() {
        return Err(Error::DimensionMismatch(format!(
            "{} edges vs {}",
            f.n_edges(),
            g.n_edges()
        )));
    }
    f.render(grid, xi)?.distance(&g.render(grid, xi)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn point(q: f64, p: f64) -> PhasePoint<f64> {
        PhasePoint::new(q, p).unwrap()
    }

    fn tag_field(n: usize) -> ClassicalField<f64> {
        // Distinct smooth components so mixing coefficients are visible.
        let comps = (0..n)
            .map(|ell| {
                let a = (ell + 1) as f64;
                let c: Component<f64> = Arc::new(move |x, xi: PhasePoint<f64>| {
                    C::new(a * xi.q() + 0.1 * x, a * xi.p())
                });
                c
            })
            .collect();
        ClassicalField::from_components(comps).unwrap()
    }

    #[test]
    fn phase_point_requires_interior_position() {
        assert!(PhasePoint::new(0.0, 1.0).is_err());
        assert!(PhasePoint::new(-1.0, 1.0).is_err());
        assert!(PhasePoint::new(1.0, f64::NAN).is_err());
        assert!(PhasePoint::new(1.0, 0.0).is_ok());
    }

    #[test]
    fn halfline_transport_branches() {
        let f = tag_field(1);
        let x = 0.3;
        // Free branch: t = 0 is the identity.
        let xi = point(1.0, -1.0);
        let v0 = liouville_halfline(&f, x, 0.0, 1.0, xi).unwrap();
        assert_eq!(v0, f.eval(0, x, xi));
        // Reflected branch: q=1, p=-1, t=2 evaluates -f at (1, +1).
        let v2 = liouville_halfline(&f, x, 2.0, 1.0, xi).unwrap();
        assert_eq!(v2, -f.eval(0, x, point(1.0, 1.0)));
        // Exact crossing gives 0.
        let v1 = liouville_halfline(&f, x, 1.0, 1.0, xi).unwrap();
        assert_eq!(v1, C::new(0.0, 0.0));
        // Wrong component count is rejected.
        assert!(liouville_halfline(&tag_field(2), x, 0.5, 1.0, xi).is_err());
    }

    #[test]
    fn squared_modulus_ignores_reflection_sign() {
        let f = tag_field(1);
        let xi = point(2.0, -1.0);
        let t = 5.0;
        let v = liouville_halfline(&f, 0.0, t, 1.0, xi).unwrap();
        let rho = f.density();
        let direct = rho.eval(0, 0.0, point(3.0, 1.0)).re;
        assert!((v.norm_sqr() - direct).abs() < 1e-14);
    }

    #[test]
    fn graph_transport_mixing_coefficients() {
        let x = 0.0;
        let xi = point(1.0, -2.0);
        let t = 1.0; // q_t = -1: reflected branch, evaluated at (1, 2).
        let mirrored = point(1.0, 2.0);

        // n = 1: coefficient +1, no sign flip.
        let f1 = tag_field(1);
        let s1 = SMatrix::kirchhoff(1).unwrap();
        let out = liouville_kirchhoff(&f1, x, t, 1.0, xi, &s1).unwrap();
        assert_eq!(out[0], f1.eval(0, x, mirrored));

        // n = 2: pure transmission to the other edge.
        let f2 = tag_field(2);
        let s2 = SMatrix::kirchhoff(2).unwrap();
        let out = liouville_kirchhoff(&f2, x, t, 1.0, xi, &s2).unwrap();
        assert_eq!(out[0], f2.eval(1, x, mirrored));
        assert_eq!(out[1], f2.eval(0, x, mirrored));

        // n = 3: mixing matrix -S has -1/3 diagonal and 2/3 off-diagonal.
        let f3 = tag_field(3);
        let s3 = SMatrix::kirchhoff(3).unwrap();
        let out = liouville_kirchhoff(&f3, x, t, 1.0, xi, &s3).unwrap();
        for ell in 0..3 {
            let mut expect = C::new(0.0, 0.0);
            for lp in 0..3 {
                let coeff = if ell == lp { -1.0 / 3.0 } else { 2.0 / 3.0 };
                expect = expect + f3.eval(lp, x, mirrored) * C::new(coeff, 0.0);
            }
            assert!((out[ell] - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn graph_transport_group_law() {
        let f = tag_field(3);
        let s = SMatrix::kirchhoff(3).unwrap();
        let xi = point(3.0, -1.0);
        let x = 0.7;
        // Transport by s then t equals transport by s + t: realized by
        // transporting the once-transported field, i.e. evaluating the
        // composition at the shifted phase point.
        let t1 = 1.0;
        let t2 = 4.0;
        let once = liouville_kirchhoff(&f, x, t1 + t2, 1.0, xi, &s).unwrap();
        // After time t1 the trajectory sits at q = 2 (free); transporting
        // that point by t2 crosses the vertex.
        let mid = point(xi.q() + xi.p() * t1, xi.p());
        let composed = liouville_kirchhoff(&f, x, t2, 1.0, mid, &s).unwrap();
        for (a, b) in once.iter().zip(&composed) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn wave_op_branches_and_p_zero_flag() {
        let f = tag_field(3);
        let s = SMatrix::kirchhoff(3).unwrap();
        let x = 0.2;
        let up = point(1.0, 2.0);
        let down = point(1.0, -2.0);
        let rest = point(1.0, 0.0);
        let raw: Vec<C<f64>> = (0..3).map(|l| f.eval(l, x, up)).collect();
        // Outgoing momentum with the plus sign: identity.
        let (v, flag) = classical_wave_op(&f, x, Sign::Plus, up, &s).unwrap();
        assert!(!flag);
        assert_eq!(v, raw);
        // Incoming momentum with the plus sign: S acts.
        let rawd: Vec<C<f64>> = (0..3).map(|l| f.eval(l, x, down)).collect();
        let (v, flag) = classical_wave_op(&f, x, Sign::Plus, down, &s).unwrap();
        assert!(!flag);
        assert_eq!(v, s.apply(&rawd));
        // Minus sign swaps the branches.
        let (v, _) = classical_wave_op(&f, x, Sign::Minus, up, &s).unwrap();
        assert_eq!(v, s.apply(&raw));
        // p = 0: unchanged plus flag.
        let raw0: Vec<C<f64>> = (0..3).map(|l| f.eval(l, x, rest)).collect();
        let (v, flag) = classical_wave_op(&f, x, Sign::Plus, rest, &s).unwrap();
        assert!(flag);
        assert_eq!(v, raw0);
        // Non-equal-weight matrices are rejected.
        let swap = SMatrix::new(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(classical_wave_op(&tag_field(2), x, Sign::Plus, up, &swap).is_err());
    }

    #[test]
    fn scattering_is_vertex_matrix_action() {
        let f = tag_field(3);
        let s = SMatrix::kirchhoff(3).unwrap();
        let x = 0.4;
        for p in [1.5, -1.5] {
            let xi = point(2.0, p);
            let raw: Vec<C<f64>> = (0..3).map(|l| f.eval(l, x, xi)).collect();
            let (v, flag) = classical_scattering(&f, x, xi, &s).unwrap();
            assert!(!flag);
            assert_eq!(v, s.apply(&raw));
            //

            let (twice, _) = classical_scattering(
                &ClassicalField::from_components(
                    (0..3)
                        .map(|ell| {
                            let vv = v[ell];
                            let c: Component<f64> = Arc::new(move |_, _| vv);
                            c
                        })
                        .collect(),
                )
                .unwrap(),
                x,
                xi,
                &s,
            )
            .unwrap();
            for (a, b) in twice.iter().zip(&raw) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn density_weights_row_sum_to_one() {
        for n in [1usize, 2, 3, 6] {
            let s = SMatrix::<f64>::kirchhoff(n).unwrap();
            for ell in 0..n {
                let mut acc = 0.0;
                for lp in 0..n {
                    acc += s.entry(ell, lp) * s.entry(ell, lp);
                }
                assert!((acc - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn density_transport_weights_n3() {
        // A density sitting on edge 1 splits on reflection with weights
        // 1/9 back and 4/9 across.
        let one: Component<f64> = Arc::new(|_, _| C::new(1.0, 0.0));
        let zero: Component<f64> = Arc::new(|_, _| C::new(0.0, 0.0));
        let rho = ClassicalField::from_components(vec![one, zero.clone(), zero]).unwrap();
        let s = SMatrix::kirchhoff(3).unwrap();
        let xi = point(1.0, 1.0);
        let out = bg_density_transport(&rho, 0.0, 3.0, 1.0, xi, &s).unwrap();
        assert!((out[0] - 1.0 / 9.0).abs() < 1e-15);
        assert!((out[1] - 4.0 / 9.0).abs() < 1e-15);
        assert!((out[2] - 4.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn density_transport_matches_liouville_for_two_edges() {
        let f = tag_field(2);
        let s = SMatrix::kirchhoff(2).unwrap();
        let rho = f.density();
        let x = 0.6;
        for (q, p, t) in [(2.0, 1.0, 1.0), (2.0, 1.0, 4.0), (1.5, -0.5, 2.0)] {
            let xi = point(q, p);
            let bg = bg_density_transport(&rho, x, t, 1.0, xi, &s).unwrap();
            let lv = liouville_kirchhoff(&f, x, -t, 1.0, xi, &s).unwrap();
            for (b, v) in bg.iter().zip(&lv) {
                assert!((b - v.norm_sqr()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn coherent_field_matches_packet_on_first_edge() {
        let cp: CoherentParams<f64> = CoherentParams::new(0.1, 1.0, 1.0, 5.0, 1.0).unwrap();
        let field = classical_field(&cp, cp.sigma_initial(), &CutoffSpec::bare(), 3).unwrap();
        let xi = point(5.0, 1.0);
        let x = 5.3;
        let norm = halfline_norm_sq(&cp, cp.sigma_initial(), &CutoffSpec::bare(), 5.0, 1.0).sqrt();
        let expect = Packet::from_params(&cp, cp.sigma_initial()).eval(x) / norm;
        assert!((field.eval(0, x, xi) - expect).norm() < 1e-14);
        assert_eq!(field.eval(1, x, xi), C::new(0.0, 0.0));
        assert_eq!(field.eval(2, x, xi), C::new(0.0, 0.0));
    }

    #[test]
    fn field_distance_is_grid_quadrature() {
        let f = tag_field(2);
        let g = ClassicalField::zero(2).unwrap();
        let grid = Grid::new(2.0, 16).unwrap();
        let xi = point(1.0, 0.5);
        let d = classical_graph_distance_asfield(&f, &g, grid, xi).unwrap();
        let direct = f.render(grid, xi).unwrap().norm();
        assert!((d - direct).abs() < 1e-14);
        assert_eq!(
            classical_graph_distance_asfield(&f, &f, grid, xi).unwrap(),
            0.0
        );
        assert!(classical_graph_distance_asfield(&f, &tag_field(3), grid, xi).is_err());
    }

    proptest! {
        /// Liouville transport never moves mass off the graph: squared
        /// moduli are preserved along trajectories off the crossing set.
        #[test]
        fn pointwise_mass_preserved(q in 0.5f64..5.0, p in -2.0f64..2.0, t in -4.0f64..4.0) {
            prop_assume!((q + p * t).abs() > 1e-9);
            let f = tag_field(3);
            let s = SMatrix::kirchhoff(3).unwrap();
            let xi = point(q, p);
            let out = liouville_kirchhoff(&f, 0.0, t, 1.0, xi, &s).unwrap();
            // Norm of the mixed vector equals the norm of the source values
            // because -S is orthogonal.
            let qt = q + p * t;
            let src = if qt > 0.0 { point(qt, p) } else { point(-qt, -p) };
            let vals: Vec<C<f64>> = (0..3).map(|l| f.eval(l, 0.0, src)).collect();
            let n_out: f64 = out.iter().map(|v| v.norm_sqr()).sum();
            let n_src: f64 = vals.iter().map(|v| v.norm_sqr()).sum();
            prop_assert!((n_out - n_src).abs() < 1e-12 * (1.0 + n_src));
        }

        /// The classical scattering operator squares to the identity.
        #[test]
        fn scattering_involutive(q in 0.5f64..5.0, p in 0.1f64..2.0) {
            let s = SMatrix::kirchhoff(4).unwrap();
            let f = tag_field(4);
            let xi = point(q, p);
            let raw: Vec<C<f64>> = (0..4).map(|l| f.eval(l, 0.0, xi)).collect();
            let (once, _) = classical_scattering(&f, 0.0, xi, &s).unwrap();
            let twice = s.apply(&once);
            for (a, b) in twice.iter().zip(&raw) {
                prop_assert!((a - b).norm() < 1e-13);
            }
        }
    }
}
