//! Unitary sine and cosine transforms on the grid and the half-line
//! propagators they diagonalize.
//!
//! The forward sine transform of interior samples is
//! `c_r = -i sqrt(2/pi) dx sum_j sin(k_r x_j) f_j`; the cosine transform of
//! full-node samples half-weights the endpoints,
//! `c_r = sqrt(2/pi) dx sum''_j cos(k_r x_j) f_j`. With the matching inverse
//! scalings both maps are exactly unitary between the discrete position and
//! wavenumber norms (endpoint-weighted on the cosine side), which mirrors
//! the continuum transforms they discretize.
//!
//! Free motion on the half line follows by multiplying with the spectral
//! symbol `exp(-i hbar k^2 t / (2 mass))`: in the sine basis this is the
//! Dirichlet propagator, in the cosine basis the Neumann propagator. Their
//! half-sum and half-difference split the evolution into a translation part
//! (kernel `U0(x - y)`, here `u_minus`) and a mirror part (kernel
//! `U0(x + y)`, here `u_plus`), so `u_minus - u_plus` is exactly the
//! Dirichlet evolution and `u_minus + u_plus` the Neumann one.
//!
//! All fast paths run one complex FFT of length `2 n` per transform, using
//! the odd (sine) or even (cosine) extension of the data.

use rustfft::FftPlanner;

use crate::grid::Grid;
use crate::real::{cis, Real, C};
use crate::wave::{EdgeWave, FullWave};

/// Coefficients against `sin(k_r x)`, `r = 1..n-1`.
#[derive(Clone, Debug)]
pub struct SineSpectrum<T> {
    grid: Grid<T>,
    coeffs: Vec<C<T>>,
}

/// Coefficients against `cos(k_r x)`, `r = 0..=n`.
#[derive(Clone, Debug)]
pub struct CosineSpectrum<T> {
    grid: Grid<T>,
    coeffs: Vec<C<T>>,
}

impl<T: Real> SineSpectrum<T> {
    pub fn new(grid: Grid<T>, coeffs: Vec<C<T>>) -> Self {
        assert_eq!(coeffs.len(), grid.interior_len());
        SineSpectrum { grid, coeffs }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[C<T>] {
        &self.coeffs
    }

    /// Squared norm `dk * sum_r |c_r|^2`.
    pub fn norm_sqr(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |acc, c| acc + c.norm_sqr())
            * self.grid.dk()
    }
}

impl<T: Real> CosineSpectrum<T> {
    pub fn new(grid: Grid<T>, coeffs: Vec<C<T>>) -> Self {
        assert_eq!(coeffs.len(), grid.n() + 1);
        CosineSpectrum { grid, coeffs }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[C<T>] {
        &self.coeffs
    }

    /// Squared norm `dk * sum''_r |c_r|^2` with the extreme wavenumbers
    /// half-weighted.
    pub fn norm_sqr(&self) -> T {
        let n = self.grid.n();
        let half = T::lit(0.5);
        let mut s = half * (self.coeffs[0].norm_sqr() + self.coeffs[n].norm_sqr());
        for c in &self.coeffs[1..n] {
            s = s + c.norm_sqr();
        }
        s * self.grid.dk()
    }
}

fn fft_forward<T: Real>(buf: &mut [C<T>]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(buf.len()).process(buf);
}

/// Forward sine transform of interior samples.
pub fn fs_forward<T: Real>(wave: &EdgeWave<T>) -> SineSpectrum<T> {
    let g = *wave.grid();
    let n = g.n();
    let zero = C::new(T::zero(), T::zero());
    let mut buf = vec![zero; 2 * n];
    for (j, f) in wave.values().iter().enumerate() {
        buf[j + 1] = *f;
        buf[2 * n - (j + 1)] = -*f;
    }
    fft_forward(&mut buf);
    let scale = C::new((T::lit(2.0) / T::PI()).sqrt() * g.dx() / T::lit(2.0), T::zero());
    let coeffs = buf[1..n].iter().map(|v| v * scale).collect();
    SineSpectrum::new(g, coeffs)
}

/// Inverse sine transform back to interior samples.
pub fn fs_inverse<T: Real>(spec: &SineSpectrum<T>) -> EdgeWave<T> {
    let g = *spec.grid();
    let n = g.n();
    let zero = C::new(T::zero(), T::zero());
    let mut buf = vec![zero; 2 * n];
    for (r, c) in spec.coeffs().iter().enumerate() {
        buf[r + 1] = *c;
        buf[2 * n - (r + 1)] = -*c;
    }
    fft_forward(&mut buf);
    let scale = C::new(-(T::lit(2.0) / T::PI()).sqrt() * g.dk() / T::lit(2.0), T::zero());
    let values = buf[1..n].iter().map(|v| v * scale).collect();
    EdgeWave::new_unchecked(g, values)
}

/// Forward cosine transform of full-node samples.
pub fn fc_forward<T: Real>(wave: &FullWave<T>) -> CosineSpectrum<T> {
    let g = *wave.grid();
    let n = g.n();
    let zero = C::new(T::zero(), T::zero());
    let mut buf = vec![zero; 2 * n];
    for (j, f) in wave.values().iter().enumerate() {
        buf[j] = *f;
        if j > 0 && j < n {
            buf[2 * n - j] = *f;
        }
    }
    fft_forward(&mut buf);
    let scale = C::new((T::lit(2.0) / T::PI()).sqrt() * g.dx() / T::lit(2.0), T::zero());
    let coeffs = buf[..=n].iter().map(|v| v * scale).collect();
    CosineSpectrum::new(g, coeffs)
}

/// Inverse cosine transform back to full-node samples.
pub fn fc_inverse<T: Real>(spec: &CosineSpectrum<T>) -> FullWave<T> {
    let g = *spec.grid();
    let n = g.n();
    let zero = C::new(T::zero(), T::zero());
    let mut buf = vec![zero; 2 * n];
    for (r, c) in spec.coeffs().iter().enumerate() {
        buf[r] = *c;
        if r > 0 && r < n {
            buf[2 * n - r] = *c;
        }
    }
    fft_forward(&mut buf);
    let scale = C::new((T::lit(2.0) / T::PI()).sqrt() * g.dk() / T::lit(2.0), T::zero());
    let values = buf[..=n].iter().map(|v| v * scale).collect();
    FullWave::new_unchecked(g, values)
}

/// Spectral symbol of free motion, `exp(-i hbar k^2 t / (2 mass))`.
fn free_symbol<T: Real>(k: T, t: T, hbar: T, mass: T) -> C<T> {
    cis(-hbar * k * k * t / (T::lit(2.0) * mass))
}

/// Evolution with a Dirichlet condition at the origin: diagonal in the sine
/// basis, hence exactly unitary on interior samples. Negative `t` evolves
/// backwards; `t = 0` returns the input bitwise.
pub fn dirichlet_propagate<T: Real>(wave: &EdgeWave<T>, t: T, hbar: T, mass: T) -> EdgeWave<T> {
    if t.is_zero() {
        return wave.clone();
    }
    let mut spec = fs_forward(wave);
    let g = spec.grid;
    for (r, c) in spec.coeffs.iter_mut().enumerate() {
        *c = *c * free_symbol(g.wavenumber(r + 1), t, hbar, mass);
    }
    fs_inverse(&spec)
}

/// Evolution with a Neumann condition at the origin: diagonal in the cosine
/// basis. Interior samples are embedded with zero endpoint values, evolved,
/// and restricted back to the interior.
pub fn neumann_propagate<T: Real>(wave: &EdgeWave<T>, t: T, hbar: T, mass: T) -> EdgeWave<T> {
    if t.is_zero() {
        return wave.clone();
    }
    let mut spec = fc_forward(&FullWave::from_interior(wave));
    let g = spec.grid;
    for (r, c) in spec.coeffs.iter_mut().enumerate() {
        *c = *c * free_symbol(g.wavenumber(r), t, hbar, mass);
    }
    fc_inverse(&spec).interior()
}

/// Translation part of half-line free motion (kernel `U0(x - y)`), realized
/// as the half-sum of the Neumann and Dirichlet evolutions. At `t = 0` it
/// is the identity bitwise.
pub fn u_minus<T: Real>(wave: &EdgeWave<T>, t: T, hbar: T, mass: T) -> EdgeWave<T> {
    if t.is_zero() {
        return wave.clone();
    }
    let half = C::new(T::lit(0.5), T::zero());
    let nn = neumann_propagate(wave, t, hbar, mass);
    let dd = dirichlet_propagate(wave, t, hbar, mass);
    nn.add(&dd).expect("same grid").scaled(half)
}

/// Mirror part of half-line free motion (kernel `U0(x + y)`), realized as
/// the half-difference of the Neumann and Dirichlet evolutions. At `t = 0`
/// the mirror image has no support on the half line, so the result is zero.
pub fn u_plus<T: Real>(wave: &EdgeWave<T>, t: T, hbar: T, mass: T) -> EdgeWave<T> {
    if t.is_zero() {
        return EdgeWave::zeros(*wave.grid());
    }
    let half = C::new(T::lit(0.5), T::zero());
    let nn = neumann_propagate(wave, t, hbar, mass);
    let dd = dirichlet_propagate(wave, t, hbar, mass);
    nn.sub(&dd).expect("same grid").scaled(half)
}

/// Reinterprets sine coefficients as cosine coefficients at the same
/// wavenumbers, with zero weight on the extreme modes `r = 0` and `r = n`.
pub fn cosine_from_sine<T: Real>(spec: &SineSpectrum<T>) -> CosineSpectrum<T> {
    let g = *spec.grid();
    let zero = C::new(T::zero(), T::zero());
    let mut coeffs = Vec::with_capacity(g.n() + 1);
    coeffs.push(zero);
    coeffs.extend_from_slice(spec.coeffs());
    coeffs.push(zero);
    CosineSpectrum::new(g, coeffs)
}

/// Reinterprets cosine coefficients as sine coefficients, dropping the
/// extreme modes `r = 0` and `r = n` that have no sine counterpart.
pub fn sine_from_cosine<T: Real>(spec: &CosineSpectrum<T>) -> SineSpectrum<T> {
    let g = *spec.grid();
    SineSpectrum::new(g, spec.coeffs()[1..g.n()].to_vec())
}

/// The unitary comparing the two spectral representations: analyze in the
/// sine basis, synthesize in the cosine basis. This is the discrete version
/// of `Fc* Fs` on the half line.
pub fn transfer<T: Real>(wave: &EdgeWave<T>) -> EdgeWave<T> {
    fc_inverse(&cosine_from_sine(&fs_forward(wave))).interior()
}

/// Adjoint of [`transfer`]: analyze in the cosine basis (zero-endpoint
/// embedding), synthesize in the sine basis.
pub fn transfer_adjoint<T: Real>(wave: &EdgeWave<T>) -> EdgeWave<T> {
    fs_inverse(&sine_from_cosine(&fc_forward(&FullWave::from_interior(
        wave,
    ))))
}
