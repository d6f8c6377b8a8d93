//! Gaussian wave packets with complex width, their free-motion parameter
//! flow, and the truncated states used on the half line.
//!
//! A packet with width parameter `sigma` (with `Re sigma = sigma0 > 0`) and
//! phase-space center `(q, p)` is
//!
//! ```text
//! psi(x) = (2 pi hbar)^(-1/4) sigma^(-1/2)
//!          * exp( -(x - q)^2 / (4 hbar sigma0 sigma) + i p (x - q) / hbar )
//! ```
//!
//! with the principal branch of `sigma^(-1/2)`. Under free motion with mass
//! `m` the parameters flow as `q -> q + p t / m`, `p -> p`,
//! `sigma -> sigma0 + i t / (2 m sigma0)`, and the packet picks up the phase
//! `exp(i p^2 t / (2 m hbar))`. The squared modulus is a Gaussian of
//! standard deviation `sqrt(hbar) |sigma|` centered at `q`.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::real::{Real, C};
use crate::wave::{EdgeWave, GraphWave};

/// Squared-norm fraction in the guard region that aborts a construction.
pub const TAIL_ERROR_LIMIT: f64 = 1e-6;
/// Squared-norm fraction in the guard region worth flagging in reports.
pub const TAIL_WARN_LIMIT: f64 = 1e-10;

/// Physical parameters of a half-line packet at time zero.
///
/// `q > 0` keeps the center strictly inside the half line; `p` may have
/// either sign or vanish.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherentParams<T> {
    hbar: T,
    mass: T,
    sigma0: T,
    q: T,
    p: T,
}

impl<T: Real> CoherentParams<T> {
    pub fn new(hbar: T, mass: T, sigma0: T, q: T, p: T) -> Result<Self> {
        let pos = |v: T, name: &str| -> Result<()> {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be positive and finite")))
            }
        };
        pos(hbar, "hbar")?;
        pos(mass, "mass")?;
        pos(sigma0, "sigma0")?;
        pos(q, "q")?;
        if !p.is_finite() {
            return Err(Error::invalid("p must be finite"));
        }
        Ok(CoherentParams {
            hbar,
            mass,
            sigma0,
            q,
            p,
        })
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }
    pub fn mass(&self) -> T {
        self.mass
    }
    pub fn sigma0(&self) -> T {
        self.sigma0
    }
    pub fn q(&self) -> T {
        self.q
    }
    pub fn p(&self) -> T {
        self.p
    }

    /// Width parameter at time zero, `sigma0 + 0i`.
    pub fn sigma_initial(&self) -> C<T> {
        C::new(self.sigma0, T::zero())
    }

    /// Time at which the free center `q + p t / m` reaches the origin.
    ///
    /// `None` when `p = 0`; negative when the packet moves away from the
    /// vertex, so the crossing lies in the past.
    pub fn collision_time(&self) -> Option<T> {
        if self.p == T::zero() {
            None
        } else {
            Some(-self.mass * self.q / self.p)
        }
    }
}

/// Free-motion flow of the packet parameters after time `t`.
#[derive(Clone, Copy, Debug)]
pub struct FreeFlow<T> {
    /// Transported center `q + p t / m`.
    pub q: T,
    /// Momentum, unchanged by free motion.
    pub p: T,
    /// Accumulated action `p^2 t / (2 m)`; the phase factor is
    /// `exp(i action / hbar)`.
    pub action: T,
    /// Spread parameter `sigma0 + i t / (2 m sigma0)`.
    pub sigma: C<T>,
}

/// Parameter flow of free motion for time `t` (may be negative).
pub fn free_flow<T: Real>(cp: &CoherentParams<T>, t: T) -> FreeFlow<T> {
    let two = T::lit(2.0);
    FreeFlow {
        q: cp.q + cp.p * t / cp.mass,
        p: cp.p,
        action: cp.p * cp.p * t / (two * cp.mass),
        sigma: C::new(cp.sigma0, t / (two * cp.mass * cp.sigma0)),
    }
}

/// Width parameter after free motion for time `t`.
pub fn sigma_at<T: Real>(cp: &CoherentParams<T>, t: T) -> C<T> {
    free_flow(cp, t).sigma
}

/// Checks the width-parameter precondition `Re sigma = sigma0`.
pub fn ensure_sigma<T: Real>(cp: &CoherentParams<T>, sigma: C<T>) -> Result<()> {
    if sigma.re == cp.sigma0 {
        Ok(())
    } else {
        Err(Error::invalid(
            "width parameter must satisfy Re sigma = sigma0; construct it with free_flow/sigma_at",
        ))
    }
}

/// A packet evaluator with an arbitrary real center.
///
/// Unlike [`CoherentParams`] the center may be zero or negative; reflected
/// packets centered at `-q` appear in half-line propagation formulas.
#[derive(Clone, Copy, Debug)]
pub struct Packet<T> {
    pub hbar: T,
    pub sigma0: T,
    pub sigma: C<T>,
    pub q: T,
    pub p: T,
}

impl<T: Real> Packet<T> {
    /// Packet with the given width at the center of `cp`.
    pub fn from_params(cp: &CoherentParams<T>, sigma: C<T>) -> Packet<T> {
        Packet {
            hbar: cp.hbar,
            sigma0: cp.sigma0,
            sigma,
            q: cp.q,
            p: cp.p,
        }
    }

    /// Packet with the flowed center, momentum, and width of `flow`.
    pub fn from_flow(cp: &CoherentParams<T>, flow: &FreeFlow<T>) -> Packet<T> {
        Packet {
            hbar: cp.hbar,
            sigma0: cp.sigma0,
            sigma: flow.sigma,
            q: flow.q,
            p: flow.p,
        }
    }

    /// Mirror image: `psi(-x)` of this packet equals the evaluation of the
    /// reflected packet, whose center is `(-q, -p)`.
    pub fn reflected(&self) -> Packet<T> {
        Packet {
            hbar: self.hbar,
            sigma0: self.sigma0,
            sigma: self.sigma,
            q: -self.q,
            p: -self.p,
        }
    }

    /// Evaluates the packet at position `x`.
    pub fn eval(&self, x: T) -> C<T> {
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        let amp = (two * T::PI() * self.hbar).powf(T::lit(-0.25));
        let inv_sqrt_sigma = C::new(T::one(), T::zero()) / self.sigma.sqrt();
        let d = x - self.q;
        let quad = C::new(-d * d, T::zero())
            / (self.sigma * C::new(four * self.hbar * self.sigma0, T::zero()));
        let lin = C::new(T::zero(), self.p * d / self.hbar);
        inv_sqrt_sigma * (quad + lin).exp() * C::new(amp, T::zero())
    }

    /// Squared modulus at `x`: a Gaussian of standard deviation
    /// `sqrt(hbar) |sigma|` with total mass one on the full line.
    pub fn density(&self, x: T) -> T {
        let two = T::lit(2.0);
        let s = self.sigma.norm();
        let d = x - self.q;
        (two * T::PI() * self.hbar).sqrt().recip() / s
            * (-d * d / (two * self.hbar * s * s)).exp()
    }

    /// Samples the packet at the interior nodes of `grid`.
    pub fn sample(&self, grid: Grid<T>) -> EdgeWave<T> {
        EdgeWave::from_fn(grid, |x| self.eval(x)).expect("packet samples are finite")
    }
}

/// Evaluates the packet of `cp` with width `sigma` at `x`.
pub fn coherent_eval<T: Real>(cp: &CoherentParams<T>, sigma: C<T>, x: T) -> Result<C<T>> {
    ensure_sigma(cp, sigma)?;
    Ok(Packet::from_params(cp, sigma).eval(x))
}

/// Truncation applied to a packet before it is used on the half line.
///
/// All variants take values in `[0, 1]` and equal 1 at the packet center, so
/// the truncated packet keeps the bulk of its mass when the center sits many
/// standard deviations inside the half line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CutoffSpec<T> {
    /// No truncation: plain restriction to `x >= 0`.
    Bare,
    /// Indicator of `x > (1 - eta) q`, with `0 < eta <= 1`.
    Sharp { eta: T },
    /// Smooth bump: 1 on `|x - q| <= eta q`, 0 outside
    /// `|x - q| < (1 - eta) q`, with `0 < eta < 1/2`, glued by
    /// `exp(1 - 1/(1 - s^2))` on the ramp.
    Smooth { eta: T },
}

impl<T: Real> CutoffSpec<T> {
    pub fn bare() -> Self {
        CutoffSpec::Bare
    }

    pub fn sharp(eta: T) -> Result<Self> {
        if eta > T::zero() && eta <= T::one() {
            Ok(CutoffSpec::Sharp { eta })
        } else {
            Err(Error::invalid("sharp cutoff needs 0 < eta <= 1"))
        }
    }

    pub fn smooth(eta: T) -> Result<Self> {
        if eta > T::zero() && eta < T::lit(0.5) {
            Ok(CutoffSpec::Smooth { eta })
        } else {
            Err(Error::invalid("smooth cutoff needs 0 < eta < 1/2"))
        }
    }

    /// Cutoff profile at position `x` for a packet centered at `q`.
    pub fn chi(&self, q: T, x: T) -> T {
        match *self {
            CutoffSpec::Bare => T::one(),
            CutoffSpec::Sharp { eta } => {
                if x > (T::one() - eta) * q {
                    T::one()
                } else {
                    T::zero()
                }
            }
            CutoffSpec::Smooth { eta } => {
                let u = (x - q).abs();
                let a = eta * q;
                let b = (T::one() - eta) * q;
                if u <= a {
                    T::one()
                } else if u >= b {
                    T::zero()
                } else {
                    let s = (u - a) / (b - a);
                    let s2 = s * s;
                    if s2 >= T::one() {
                        T::zero()
                    } else {
                        (T::one() - (T::one() - s2).recip()).exp()
                    }
                }
            }
        }
    }

    /// Positions where the profile for a packet centered at `q` is not
    /// smooth: the jump of the sharp cutoff and the inner ramp junctions of
    /// the smooth one. Quadratures split their domains here.
    pub fn junction_points(&self, q: T) -> Vec<T> {
        match *self {
            CutoffSpec::Bare => Vec::new(),
            CutoffSpec::Sharp { eta } => vec![(T::one() - eta) * q],
            CutoffSpec::Smooth { eta } => {
                let a = eta * q;
                let b = (T::one() - eta) * q;
                vec![q - b, q - a, q + a, q + b]
            }
        }
    }

    /// Width parameter of the cutoff; the bare case behaves like `eta = 1`.
    pub fn eta(&self) -> T {
        match *self {
            CutoffSpec::Bare => T::one(),
            CutoffSpec::Sharp { eta } | CutoffSpec::Smooth { eta } => eta,
        }
    }

    /// Supremum of the profile; 1 for every variant.
    pub fn sup_norm(&self) -> T {
        T::one()
    }

    /// Decay rate entering the truncation error bound:
    /// `min(1/4, eta^2 / 8) / 2`.
    pub fn eps(&self) -> T {
        let eta = self.eta();
        let quarter = T::lit(0.25);
        let rate = quarter.min(eta * eta / T::lit(8.0));
        rate / T::lit(2.0)
    }

    /// Constant in front of the truncation error bound:
    /// `1/sqrt(2) + 2^(5/4) (1 + sup |chi|)`.
    pub fn c0(&self) -> T {
        T::lit(0.5).sqrt() + T::lit(2.0).powf(T::lit(1.25)) * (T::one() + self.sup_norm())
    }

    pub fn label(&self) -> &'static str {
        match self {
            CutoffSpec::Bare => "bare",
            CutoffSpec::Sharp { .. } => "sharp",
            CutoffSpec::Smooth { .. } => "smooth",
        }
    }
}

/// Continuum squared norm of the truncated packet
/// `chi(x) psi(x)` over the half line, for the packet of `cp` with width
/// `sigma` centered at `q_center`.
///
/// Bare and sharp cutoffs use the error function in closed form; the smooth
/// cutoff integrates the profile by composite Simpson quadrature split at
/// the two ramp junctions.
pub fn halfline_norm_sq<T: Real>(
    cp: &CoherentParams<T>,
    sigma: C<T>,
    cut: &CutoffSpec<T>,
    q_center: T,
    p_center: T,
) -> T {
    let half = T::lit(0.5);
    let s = cp.hbar.sqrt() * sigma.norm();
    let root2 = T::lit(2.0).sqrt();
    match *cut {
        CutoffSpec::Bare => half * (T::one() + (q_center / (root2 * s)).erf()),
        CutoffSpec::Sharp { eta } => half * (T::one() + (eta * q_center / (root2 * s)).erf()),
        CutoffSpec::Smooth { .. } => {
            let packet = Packet {
                hbar: cp.hbar,
                sigma0: cp.sigma0,
                sigma,
                q: q_center,
                p: p_center,
            };
            let f = |x: T| {
                let c = cut.chi(q_center, x);
                c * c * packet.density(x)
            };
            let a = cut.eta() * q_center;
            let b = (T::one() - cut.eta()) * q_center;
            let reach = T::lit(14.0) * s;
            let mut total = T::zero();
            // Plateau and the two ramps, each clipped to the region where the
            // Gaussian factor is non-negligible.
            let segments = [
                (q_center - b, q_center - a),
                (q_center - a, q_center + a),
                (q_center + a, q_center + b),
            ];
            for (lo, hi) in segments {
                let lo = lo.max(q_center - reach);
                let hi = hi.min(q_center + reach);
                if hi > lo {
                    total = total + simpson(&f, lo, hi, 2048);
                }
            }
            total
        }
    }
}

/// Composite Simpson rule with `panels` panels (must be even and >= 2).
pub(crate) fn simpson<T: Real>(f: &impl Fn(T) -> T, lo: T, hi: T, panels: usize) -> T {
    debug_assert!(panels >= 2 && panels % 2 == 0);
    let h = (hi - lo) / T::from_usize(panels).unwrap();
    let mut sum = f(lo) + f(hi);
    for j in 1..panels {
        let w = if j % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
        sum = sum + w * f(lo + T::from_usize(j).unwrap() * h);
    }
    sum * h / T::lit(3.0)
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

/// Samples the truncated packet `chi * psi` on the grid and normalizes it to
/// unit grid norm.
///
/// Fails when the packet parameters put more than [`TAIL_ERROR_LIMIT`] of
/// the squared norm into the last 5% of the grid, or when the truncation
/// annihilates the samples entirely.
pub fn truncated_state<T: Real>(
    cp: &CoherentParams<T>,
    sigma: C<T>,
    cut: &CutoffSpec<T>,
    grid: Grid<T>,
) -> Result<EdgeWave<T>> {
    ensure_sigma(cp, sigma)?;
    let packet = Packet::from_params(cp, sigma);
    let wave = EdgeWave::from_fn(grid, |x| {
        packet.eval(x) * C::new(cut.chi(cp.q, x), T::zero())
    })?;
    guard_tail(wave.tail_fraction())?;
    let norm = wave.norm();
    if !(norm > T::zero()) {
        return Err(Error::invalid(
            "truncated packet vanishes on the grid; center or cutoff badly placed",
        ));
    }
    Ok(wave.scaled(C::new(norm.recip(), T::zero())))
}

/// Graph state supported on the first edge: the normalized truncated packet
/// there, zero on the remaining `n_edges - 1` edges.
pub fn graph_initial_state<T: Real>(
    cp: &CoherentParams<T>,
    sigma: C<T>,
    cut: &CutoffSpec<T>,
    grid: Grid<T>,
    n_edges: usize,
) -> Result<GraphWave<T>> {
    if n_edges == 0 {
        return Err(Error::invalid("graph needs at least one edge"));
    }
    let first = truncated_state(cp, sigma, cut, grid)?;
    let mut edges = vec![first];
    edges.extend((1..n_edges).map(|_| EdgeWave::zeros(grid)));
    GraphWave::new(edges)
}

/// Ring configuration on an even number of edges: the raw packet samples on
/// the first half of the edges and the mirror-image samples (center and
/// momentum both negated) on the second half. Pairing a first-half edge with
/// a second-half edge reassembles the packet on a full line through the
/// vertex, so the configuration satisfies the vertex conditions exactly and
/// evolves by free full-line propagation along each pair. No truncation and
/// no normalization is applied.
pub fn ring_state<T: Real>(
    cp: &CoherentParams<T>,
    sigma: C<T>,
    grid: Grid<T>,
    n_edges: usize,
) -> Result<GraphWave<T>> {
    if n_edges == 0 || n_edges % 2 != 0 {
        return Err(Error::OddEdgeCount(n_edges));
    }
    ensure_sigma(cp, sigma)?;
    let fwd = Packet::from_params(cp, sigma);
    let bwd = fwd.reflected();
    let half = n_edges / 2;
    let mut edges = Vec::with_capacity(n_edges);
    for _ in 0..half {
        edges.push(fwd.sample(grid));
    }
    for _ in half..n_edges {
        edges.push(bwd.sample(grid));
    }
    let wave = GraphWave::new(edges)?;
    guard_tail(wave.tail_fraction())?;
    Ok(wave)
}

/// Grid sized for evolutions of `cp` up to time `t_max`.
///
/// The length covers the transported center plus twelve final standard
/// deviations; the spacing resolves the initial packet width and its
/// momentum oscillations with `dx <= sqrt(hbar) sigma0 / 8`.
pub fn suggested_grid<T: Real>(cp: &CoherentParams<T>, t_max: T) -> Result<Grid<T>> {
    let s_final = cp.hbar.sqrt() * sigma_at(cp, t_max).norm();
    let x_max = cp.q + cp.p.abs() * t_max / cp.mass + T::lit(12.0) * s_final;
    let dx_max = cp.hbar.sqrt() * cp.sigma0 / T::lit(8.0);
    let n_min = (x_max / dx_max).ceil().as_f64() as usize;
    Grid::new(x_max, n_min.next_power_of_two().max(8))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params() -> CoherentParams<f64> {
        CoherentParams::new(0.05, 1.0, 1.0, 10.0, -1.5).unwrap()
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(CoherentParams::new(0.0, 1.0, 1.0, 1.0, 0.0).is_err());
        assert!(CoherentParams::new(0.1, -1.0, 1.0, 1.0, 0.0).is_err());
        assert!(CoherentParams::new(0.1, 1.0, 0.0, 1.0, 0.0).is_err());
        assert!(CoherentParams::new(0.1, 1.0, 1.0, -2.0, 0.0).is_err());
        assert!(CoherentParams::new(0.1, 1.0, 1.0, 2.0, f64::NAN).is_err());
        assert!(CoherentParams::new(0.1, 1.0, 1.0, 2.0, 0.0).is_ok());
    }

    #[test]
    fn packet_has_unit_mass_on_fine_grid() {
        let cp = params();
        let grid = Grid::new(20.0, 1024).unwrap();
        let w = Packet::from_params(&cp, cp.sigma_initial()).sample(grid);
        assert!((w.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_matches_squared_modulus() {
        let cp = params();
        let sigma = sigma_at(&cp, 0.7);
        let packet = Packet::from_params(&cp, sigma);
        for x in [8.0, 9.5, 10.0, 11.2] {
            let v = packet.eval(x);
            assert!((v.norm_sqr() - packet.density(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn reflection_swaps_center_sign() {
        let cp = params();
        let sigma = sigma_at(&cp, 1.3);
        let packet = Packet::from_params(&cp, sigma);
        let mirrored = packet.reflected();
        for x in [0.25, 1.0, 3.5] {
            let lhs = packet.eval(-x);
            let rhs = mirrored.eval(x);
            assert!((lhs - rhs).norm() < 1e-15 * lhs.norm().max(1.0));
        }
    }

    #[test]
    fn free_flow_at_zero_is_identity() {
        let cp = params();
        let flow = free_flow(&cp, 0.0);
        assert_eq!(flow.q, cp.q());
        assert_eq!(flow.p, cp.p());
        assert_eq!(flow.action, 0.0);
        assert_eq!(flow.sigma, cp.sigma_initial());
    }

    #[test]
    fn collision_time_matches_center_crossing() {
        let cp = CoherentParams::new(0.05, 2.0, 1.0, 6.0, -3.0).unwrap();
        let t = cp.collision_time().unwrap();
        assert_eq!(t, 4.0);
        let flow = free_flow(&cp, t);
        assert_eq!(flow.q, 0.0);
        assert!(CoherentParams::new(0.05, 1.0, 1.0, 6.0, 0.0)
            .unwrap()
            .collision_time()
            .is_none());
    }

    #[test]
    fn sigma_precondition_is_enforced() {
        let cp = params();
        assert!(coherent_eval(&cp, C::new(1.0, 0.4), 9.0).is_ok());
        assert!(coherent_eval(&cp, C::new(1.1, 0.4), 9.0).is_err());
    }

    #[test]
    fn smooth_cutoff_profile_values() {
        let cut = CutoffSpec::smooth(0.25).unwrap();
        let q = 8.0;
        assert_eq!(cut.chi(q, q), 1.0);
        assert_eq!(cut.chi(q, q + 2.0), 1.0);
        assert_eq!(cut.chi(q, q + 6.0), 0.0);
        assert_eq!(cut.chi(q, q - 6.5), 0.0);
        // Ramp midpoint: s = 1/2 gives exp(1 - 4/3).
        let mid = cut.chi(q, q + 4.0);
        assert!((mid - (-1.0f64 / 3.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn sharp_cutoff_cuts_below_threshold() {
        let cut = CutoffSpec::sharp(0.5).unwrap();
        assert_eq!(cut.chi(8.0, 3.9), 0.0);
        assert_eq!(cut.chi(8.0, 4.1), 1.0);
        assert!(CutoffSpec::sharp(0.0).is_err());
        assert!(CutoffSpec::sharp(1.5).is_err());
        assert!(CutoffSpec::smooth(0.5).is_err());
    }

    #[test]
    fn truncation_constants() {
        let bare: CutoffSpec<f64> = CutoffSpec::bare();
        assert_eq!(bare.eps(), 1.0 / 16.0);
        let expect_c0 = 0.5f64.sqrt() + 2.0f64.powf(1.25) * 2.0;
        assert!((bare.c0() - expect_c0).abs() < 1e-15);
        let sharp = CutoffSpec::sharp(0.5f64).unwrap();
        assert_eq!(sharp.eps(), 0.5 * 0.5 / 8.0 / 2.0);
    }

    #[test]
    fn halfline_norm_closed_forms() {
        let cp = params();
        let sigma = sigma_at(&cp, 0.9);
        // Far inside the half line almost nothing is cut away.
        let bare = halfline_norm_sq(&cp, sigma, &CutoffSpec::bare(), cp.q(), cp.p());
        assert!((bare - 1.0).abs() < 1e-12);
        // A sharp cutoff at the center keeps exactly half the mass.
        let half = halfline_norm_sq(
            &cp,
            sigma,
            &CutoffSpec::Sharp { eta: 1e-300 },
            cp.q(),
            cp.p(),
        );
        assert!((half - 0.5).abs() < 1e-12);
    }

    #[test]
    fn smooth_norm_matches_fine_quadrature() {
        let cp = CoherentParams::new(0.1, 1.0, 1.0, 6.0, 0.8).unwrap();
        let cut = CutoffSpec::smooth(0.3).unwrap();
        let sigma = sigma_at(&cp, 0.5);
        let v = halfline_norm_sq(&cp, sigma, &cut, cp.q(), cp.p());
        let packet = Packet::from_params(&cp, sigma);
        let f = |x: f64| {
            let c = cut.chi(cp.q(), x);
            c * c * packet.density(x)
        };
        let brute = simpson(&f, 1e-9, 12.0, 200_000);
        assert!((v - brute).abs() < 1e-11, "v={v} brute={brute}");
    }

    #[test]
    fn truncated_state_is_normalized() {
        let cp = params();
        let grid = Grid::new(24.0, 512).unwrap();
        let w = truncated_state(&cp, cp.sigma_initial(), &CutoffSpec::bare(), grid).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn tail_guard_rejects_center_near_the_far_end() {
        let cp = CoherentParams::new(0.05, 1.0, 1.0, 11.8, 0.0).unwrap();
        let grid = Grid::new(12.0, 256).unwrap();
        let r = truncated_state(&cp, cp.sigma_initial(), &CutoffSpec::bare(), grid);
        assert!(matches!(r, Err(Error::TailMassExceeded { .. })));
    }

    #[test]
    fn graph_state_lives_on_first_edge() {
        let cp = params();
        let grid = Grid::new(24.0, 256).unwrap();
        let g =
            graph_initial_state(&cp, cp.sigma_initial(), &CutoffSpec::bare(), grid, 3).unwrap();
        assert_eq!(g.n_edges(), 3);
        assert!((g.edge(0).norm() - 1.0).abs() < 1e-13);
        assert_eq!(g.edge(1).norm(), 0.0);
        assert_eq!(g.edge(2).norm(), 0.0);
    }

    #[test]
    fn ring_state_requires_even_edges() {
        let cp = params();
        let grid = Grid::new(24.0, 256).unwrap();
        assert!(ring_state(&cp, cp.sigma_initial(), grid, 3).is_err());
        let ring = ring_state(&cp, cp.sigma_initial(), grid, 4).unwrap();
        assert_eq!(ring.n_edges(), 4);
        // Second half carries the mirror image of the first half.
        let x = grid.node(100);
        let pk = Packet::from_params(&cp, cp.sigma_initial());
        assert_eq!(ring.edge(0).values()[99], pk.eval(x));
        assert_eq!(ring.edge(3).values()[99], pk.reflected().eval(x));
    }

    #[test]
    fn ring_state_is_continuous_at_the_vertex() {
        let cp = params();
        let pk = Packet::from_params(&cp, cp.sigma_initial());
        let a = pk.eval(0.0);
        let b = pk.reflected().eval(0.0);
        assert!((a - b).norm() < 1e-15 * a.norm().max(1e-300));
    }

    #[test]
    fn suggested_grid_resolves_packet() {
        let cp = params();
        let grid = suggested_grid(&cp, 4.0).unwrap();
        assert!(grid.dx() <= cp.hbar().sqrt() * cp.sigma0() / 8.0);
        assert!(grid.x_max() >= cp.q());
        assert!(grid.n().is_power_of_two());
    }

    proptest! {
        /// The cutoff profile always lies in [0, 1] and is 1 at the center.
        #[test]
        fn chi_bounded(eta in 0.01f64..0.49, q in 0.5f64..20.0, x in 0.0f64..40.0) {
            let cut = CutoffSpec::smooth(eta).unwrap();
            let v = cut.chi(q, x);
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert_eq!(cut.chi(q, q), 1.0);
        }

        /// Truncated states always come out with unit grid norm.
        #[test]
        fn truncated_norm_is_one(
            q in 5.0f64..12.0,
            p in -1.0f64..1.0,
            hbar in 0.02f64..0.2,
        ) {
            let cp = CoherentParams::new(hbar, 1.0, 1.0, q, p).unwrap();
            let grid = Grid::new(30.0, 256).unwrap();
            let w = truncated_state(&cp, cp.sigma_initial(), &CutoffSpec::bare(), grid).unwrap();
            prop_assert!((w.norm() - 1.0).abs() < 1e-12);
        }

        /// Free flow composes additively in time.
        #[test]
        fn flow_composes(t1 in -3.0f64..3.0, t2 in -3.0f64..3.0) {
            let cp = params();
            let once = free_flow(&cp, t1 + t2);
            let first = free_flow(&cp, t1);
            prop_assert!((once.q - (first.q + first.p * t2 / cp.mass())).abs() < 1e-12);
            let sig12 = free_flow(&cp, t1 + t2).sigma;
            let expect = C::new(first.sigma.re, first.sigma.im + t2 / (2.0 * cp.mass() * cp.sigma0()));
            prop_assert!((sig12 - expect).norm() < 1e-12);
        }
    }
}
