//! Slow reference implementations used to cross-check the fast paths.
//!
//! Everything here evaluates transforms and propagators by direct summation
//! over kernels, at quadratic cost in the grid size. The test suites compare
//! these against the FFT-based implementations on small grids; nothing in
//! the production paths calls into this module.

use crate::grid::Grid;
use crate::real::{cis, Real, C};
use crate::states::{simpson, CoherentParams, CutoffSpec, Packet};
use crate::wave::{EdgeWave, FullWave};

fn czero<T: Real>() -> C<T> {
    C::new(T::zero(), T::zero())
}

/// Sine transform by direct summation:
/// `c_r = -i sqrt(2/pi) dx sum_j sin(k_r x_j) f_j`, `r = 1..n-1`.
pub fn sine_forward_direct<T: Real>(wave: &EdgeWave<T>) -> Vec<C<T>> {
    let g = wave.grid();
    let scale = C::new(T::zero(), -(T::lit(2.0) / T::PI()).sqrt() * g.dx());
    (1..g.n())
        .map(|r| {
            let k = g.wavenumber(r);
            let mut acc: C<T> = czero();
            for (j, f) in wave.values().iter().enumerate() {
                let x = g.node(j + 1);
                acc = acc + f * C::new((k * x).sin(), T::zero());
            }
            acc * scale
        })
        .collect()
}

/// Inverse sine transform by direct summation:
/// `f_j = +i sqrt(2/pi) dk sum_r sin(k_r x_j) c_r`.
pub fn sine_inverse_direct<T: Real>(coeffs: &[C<T>], grid: Grid<T>) -> Vec<C<T>> {
    assert_eq!(coeffs.len(), grid.interior_len());
    let scale = C::new(T::zero(), (T::lit(2.0) / T::PI()).sqrt() * grid.dk());
    (1..grid.n())
        .map(|j| {
            let x = grid.node(j);
            let mut acc: C<T> = czero();
            for (r, c) in coeffs.iter().enumerate() {
                let k = grid.wavenumber(r + 1);
                acc = acc + c * C::new((k * x).sin(), T::zero());
            }
            acc * scale
        })
        .collect()
}

/// Cosine transform by direct summation with half-weighted endpoints:
/// `c_r = sqrt(2/pi) dx sum''_j cos(k_r x_j) f_j`, `r = 0..=n`.
pub fn cosine_forward_direct<T: Real>(wave: &FullWave<T>) -> Vec<C<T>> {
    let g = wave.grid();
    let n = g.n();
    let scale = C::new((T::lit(2.0) / T::PI()).sqrt() * g.dx(), T::zero());
    let half = T::lit(0.5);
    (0..=n)
        .map(|r| {
            let k = g.wavenumber(r);
            let mut acc: C<T> = czero();
            for (j, f) in wave.values().iter().enumerate() {
                let w = if j == 0 || j == n { half } else { T::one() };
                acc = acc + f * C::new(w * (k * g.node(j)).cos(), T::zero());
            }
            acc * scale
        })
        .collect()
}

/// Inverse cosine transform by direct summation, half-weighting the extreme
/// wavenumbers `r = 0` and `r = n`.
pub fn cosine_inverse_direct<T: Real>(coeffs: &[C<T>], grid: Grid<T>) -> Vec<C<T>> {
    let n = grid.n();
    assert_eq!(coeffs.len(), n + 1);
    let scale = C::new((T::lit(2.0) / T::PI()).sqrt() * grid.dk(), T::zero());
    let half = T::lit(0.5);
    (0..=n)
        .map(|j| {
            let x = grid.node(j);
            let mut acc: C<T> = czero();
            for (r, c) in coeffs.iter().enumerate() {
                let w = if r == 0 || r == n { half } else { T::one() };
                acc = acc + c * C::new(w * (grid.wavenumber(r) * x).cos(), T::zero());
            }
            acc * scale
        })
        .collect()
}

/// Discrete free-motion kernel on the period-`2n` extension lattice.
///
/// Entry `d` (taken mod `2n`) is
/// `(1/2n) sum_m exp(i pi m d / n) exp(-i hbar k_m^2 t / (2 mass))` with
/// `k_m = min(m, 2n - m) pi / x_max`, so that convolving an odd (even)
/// extension with this kernel realizes Dirichlet (Neumann) evolution.
pub fn free_kernel_direct<T: Real>(grid: Grid<T>, t: T, hbar: T, mass: T) -> Vec<C<T>> {
    let n = grid.n();
    let m2 = 2 * n;
    let norm = T::from_usize(m2).unwrap().recip();
    (0..m2)
        .map(|d| {
            let mut acc: C<T> = czero();
            for m in 0..m2 {
                let k = grid.wavenumber(m.min(m2 - m));
                let theta = hbar * k * k * t / (T::lit(2.0) * mass);
                // exp(i pi m d / n) has period 2n in the product m d.
                let angle =
                    T::PI() * T::from_usize(m * d % m2).unwrap() / T::from_usize(n).unwrap();
                acc = acc + cis(angle) * cis(-theta);
            }
            acc * C::new(norm, T::zero())
        })
        .collect()
}

fn kernel_apply<T: Real>(
    wave: &EdgeWave<T>,
    kernel: &[C<T>],
    combine: impl Fn(C<T>, C<T>) -> C<T>,
) -> Vec<C<T>> {
    let n = wave.grid().n();
    let m2 = 2 * n;
    (1..n)
        .map(|j| {
            let mut acc: C<T> = czero();
            for (idx, f) in wave.values().iter().enumerate() {
                let jp = idx + 1;
                let diff = kernel[(j + m2 - jp) % m2];
                let sum = kernel[(j + jp) % m2];
                acc = acc + f * combine(diff, sum);
            }
            acc
        })
        .collect()
}

/// Dirichlet propagation via the image kernel `U0(j - j') - U0(j + j')`.
pub fn dirichlet_direct<T: Real>(wave: &EdgeWave<T>, t: T, hbar: T, mass: T) -> EdgeWave<T> {
    let kernel = free_kernel_direct(*wave.grid(), t, hbar, mass);
    let vals = kernel_apply(wave, &kernel, |d, s| d - s);
    EdgeWave::new(*wave.grid(), vals).expect("kernel sum is finite")
}

/// Neumann propagation via the image kernel `U0(j - j') + U0(j + j')`.
pub fn neumann_direct<T: Real>(wave: &EdgeWave<T>, t: T, hbar: T, mass: T) -> EdgeWave<T> {
    let kernel = free_kernel_direct(*wave.grid(), t, hbar, mass);
    let vals = kernel_apply(wave, &kernel, |d, s| d + s);
    EdgeWave::new(*wave.grid(), vals).expect("kernel sum is finite")
}

/// Incoming half of the propagator: translation kernel `U0(j - j')` alone.
pub fn u_minus_direct<T: Real>(wave: &EdgeWave<T>, t: T, hbar: T, mass: T) -> EdgeWave<T> {
    let kernel = free_kernel_direct(*wave.grid(), t, hbar, mass);
    let vals = kernel_apply(wave, &kernel, |d, _| d);
    EdgeWave::new(*wave.grid(), vals).expect("kernel sum is finite")
}

/// Outgoing half of the propagator: mirror kernel `U0(j + j')` alone.
pub fn u_plus_direct<T: Real>(wave: &EdgeWave<T>, t: T, hbar: T, mass: T) -> EdgeWave<T> {
    let kernel = free_kernel_direct(*wave.grid(), t, hbar, mass);
    let vals = kernel_apply(wave, &kernel, |_, s| s);
    EdgeWave::new(*wave.grid(), vals).expect("kernel sum is finite")
}

/// Truncation distance `|| chi psi / ||chi psi|| - psi ||` over `[0, x_max]`
/// by Simpson quadrature at `refine` times the grid resolution.
///
/// Both the normalization constant and the distance use the same fine
/// quadrature, independent of the grid-based route.
pub fn truncation_distance_quadrature<T: Real>(
    cp: &CoherentParams<T>,
    cut: &CutoffSpec<T>,
    grid: Grid<T>,
    refine: usize,
) -> T {
    assert!(refine >= 1);
    let packet = Packet::from_params(cp, cp.sigma_initial());
    let panels = 2 * refine * grid.n();
    let cut_mass = |x: T| {
        let c = cut.chi(cp.q(), x);
        c * c * packet.density(x)
    };
    let norm = segmented_simpson(&cut_mass, cp, cut, grid, panels).sqrt();
    let diff = |x: T| {
        let v = packet.eval(x);
        let truncated = v * C::new(cut.chi(cp.q(), x) / norm, T::zero());
        (truncated - v).norm_sqr()
    };
    segmented_simpson(&diff, cp, cut, grid, panels).sqrt()
}

/// Simpson quadrature over `[0, x_max]` split at the non-smooth points of
/// the cutoff profile, so jumps and ramp junctions sit on segment
/// boundaries instead of inside panels.
fn segmented_simpson<T: Real>(
    f: &impl Fn(T) -> T,
    cp: &CoherentParams<T>,
    cut: &CutoffSpec<T>,
    grid: Grid<T>,
    panels: usize,
) -> T {
    let mut cuts: Vec<T> = cut
        .junction_points(cp.q())
        .into_iter()
        .filter(|&x| x > T::zero() && x < grid.x_max())
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut edges = vec![T::zero()];
    edges.extend(cuts);
    edges.push(grid.x_max());
    let mut total = T::zero();
    for pair in edges.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        if !(hi > lo) {
            continue;
        }
        let share = ((hi - lo) / grid.x_max() * T::from_usize(panels).unwrap())
            .ceil()
            .as_f64() as usize;
        let seg_panels = share.max(16) + share.max(16) % 2;
        total = total + simpson(f, lo, hi, seg_panels);
    }
    total
}
