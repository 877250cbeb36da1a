//! Periodic grid, quadrature, spectral calculus, and the density data model.
//!
//! The domain is the unit-length circle `T = R/Z` discretized by `N` uniform
//! nodes `x_j = j/N`. The rectangle rule is spectrally accurate for smooth
//! periodic integrands, so quadrature is a plain scaled sum. Differentiation
//! is Fourier pseudo-spectral by default with a second-order central-difference
//! fallback behind the same interface.

use std::cell::RefCell;
use std::path::Path;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

/// Negative density values above this threshold are clipped to zero;
/// anything below is treated as an error (an unstable step upstream).
pub const NEG_CLIP_TOL: f64 = 1e-12;

/// Smallest admissible Jacobian for pushforward maps.
pub const JACOBIAN_FLOOR: f64 = 1e-6;

const TAU: f64 = std::f64::consts::TAU;

/// Uniform discretization of the unit-length torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicGrid {
    n: usize,
}

impl PeriodicGrid {
    /// A grid with `n` nodes; `n` must be even and at least 8.
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "need an even node count >= 8, got {n}"
            )));
        }
        Ok(PeriodicGrid { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node spacing `h = 1/N`.
    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Node `x_j = j/N`.
    pub fn node(&self, j: usize) -> f64 {
        j as f64 / self.n as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.node(j))
    }

    /// Rectangle-rule integral of raw node values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n);
        self.spacing() * values.iter().sum::<f64>()
    }
}

/// Real-valued function sampled at the grid nodes (potentials, variations).
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: PeriodicGrid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: PeriodicGrid, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "value count must match the grid");
        GridFunction { grid, values }
    }

    pub fn from_fn(grid: PeriodicGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().map(f).collect();
        GridFunction { grid, values }
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        GridFunction {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> PeriodicGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Nonnegative grid function integrating to one (a probability density).
#[derive(Debug, Clone)]
pub struct Density {
    grid: PeriodicGrid,
    values: Vec<f64>,
}

impl Density {
    /// Build a density from raw values, applying the clipping policy:
    /// values in `[-1e-12, 0)` are clipped to zero, anything lower is an
    /// error, and the result is renormalized to unit mass.
    pub fn new(grid: PeriodicGrid, mut values: Vec<f64>) -> Result<Self> {
        assert_eq!(values.len(), grid.len(), "value count must match the grid");
        for (j, v) in values.iter_mut().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite("density values"));
            }
            if *v < 0.0 {
                if *v < -NEG_CLIP_TOL {
                    return Err(Error::NegativeDensity { min: *v, node: j });
                }
                *v = 0.0;
            }
        }
        let mass = grid.integrate(&values);
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::NonFinite("density mass"));
        }
        for v in values.iter_mut() {
            *v /= mass;
        }
        Ok(Density { grid, values })
    }

    pub fn uniform(grid: PeriodicGrid) -> Self {
        Density {
            grid,
            values: vec![1.0; grid.len()],
        }
    }

    pub fn grid(&self) -> PeriodicGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mass(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn as_function(&self) -> GridFunction {
        GridFunction::new(self.grid, self.values.clone())
    }

    /// Max-norm distance to another density on the same grid.
    pub fn linf_distance(&self, other: &Density) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// L1 distance `h * sum |rho - sigma|`.
    pub fn l1_distance(&self, other: &Density) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.grid.spacing()
            * self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>()
    }
}

/// Differentiation backend; spectral is the default, the central-difference
/// fallback exists for robustness experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiffScheme {
    #[default]
    Spectral,
    CentralDifference,
}

/// Rectangle-rule quadrature `h * sum g_j`.
pub fn quadrature(g: &GridFunction) -> f64 {
    g.grid().integrate(g.values())
}

/// Fourier-multiplier derivative of order 1 or 2; Nyquist mode is zeroed for
/// odd orders so real input maps to real output.
pub fn spectral_derivative(g: &GridFunction, order: u32) -> Result<GridFunction> {
    derivative_with(g, order, DiffScheme::Spectral)
}

/// Derivative through the selected backend.
pub fn derivative_with(g: &GridFunction, order: u32, scheme: DiffScheme) -> Result<GridFunction> {
    assert!(order == 1 || order == 2, "only orders 1 and 2 are supported");
    if g.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("derivative input"));
    }
    let values = match scheme {
        DiffScheme::Spectral => fft::derivative(g.values(), order),
        DiffScheme::CentralDifference => central_difference(g.grid(), g.values(), order),
    };
    Ok(GridFunction::new(g.grid(), values))
}

fn central_difference(grid: PeriodicGrid, v: &[f64], order: u32) -> Vec<f64> {
    let n = grid.len();
    let h = grid.spacing();
    (0..n)
        .map(|j| {
            let prev = v[(j + n - 1) % n];
            let next = v[(j + 1) % n];
            match order {
                1 => (next - prev) / (2.0 * h),
                _ => (next - 2.0 * v[j] + prev) / (h * h),
            }
        })
        .collect()
}

/// Result of a pushforward: the resampled density and the mass
/// renormalization factor applied to it (must be within 1e-8 of one).
#[derive(Debug, Clone)]
pub struct Pushforward {
    pub density: Density,
    pub renorm_factor: f64,
}

/// Pushforward of `rho` under the map `x -> x + t * phi'(x)`.
///
/// The transported density satisfies
/// `rho_t(x_j + t phi'(x_j)) = rho(x_j) / (1 + t phi''(x_j))`; it is brought
/// back to the grid by monotone-cubic interpolation of the transported CDF,
/// which preserves positivity, and then renormalized.
pub fn pushforward_1d(rho: &Density, phi: &GridFunction, t: f64) -> Result<Pushforward> {
    let dphi = spectral_derivative(phi, 1)?;
    let d2phi = spectral_derivative(phi, 2)?;
    pushforward_with_derivatives(rho, &dphi, &d2phi, t)
}

/// Pushforward along an explicit displacement field `x -> x + t * v(x)` with
/// supplied `v = dphi` and `v' = d2phi`. This admits fields such as constant
/// rotations that no periodic potential can produce.
pub fn pushforward_with_derivatives(
    rho: &Density,
    dphi: &GridFunction,
    d2phi: &GridFunction,
    t: f64,
) -> Result<Pushforward> {
    let grid = rho.grid();
    assert_eq!(grid, dphi.grid(), "density and field must share a grid");
    let n = grid.len();

    let mut min_jac = f64::INFINITY;
    for &w in d2phi.values() {
        min_jac = min_jac.min(1.0 + t * w);
    }
    if min_jac < JACOBIAN_FLOOR {
        return Err(Error::JacobianDegenerate { t, min_jac });
    }

    // Transported node positions and the CDF values carried along with them.
    let mut ys = Vec::with_capacity(n + 1);
    for j in 0..n {
        ys.push(grid.node(j) + t * dphi.values()[j]);
    }
    ys.push(1.0 + ys[0]); // T(x_0 + 1) = T(x_0) + 1
    for w in ys.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::JacobianDegenerate { t, min_jac: 0.0 });
        }
    }

    let h = grid.spacing();
    let mass: f64 = rho.values().iter().sum::<f64>() * h;
    let mut cdf = fft::cumulative(rho.values());
    for v in cdf.iter_mut() {
        *v /= mass;
    }
    cdf.push(1.0);
    // Change of variables gives the transported CDF slope at each data point:
    // G'(T(x_j)) = rho(x_j) / (1 + t phi''(x_j)).
    let slope = |j: usize| rho.values()[j] / (mass * (1.0 + t * d2phi.values()[j]));

    // Extend one period on each side so every target node is interior.
    let mut xs_ext = Vec::with_capacity(3 * n + 1);
    let mut ys_ext = Vec::with_capacity(3 * n + 1);
    let mut ds_ext = Vec::with_capacity(3 * n + 1);
    for p in -1i64..=1 {
        for j in 0..n {
            xs_ext.push(ys[j] + p as f64);
            ys_ext.push(cdf[j] + p as f64);
            ds_ext.push(slope(j));
        }
    }
    xs_ext.push(ys[n] + 1.0);
    ys_ext.push(cdf[n] + 1.0);
    ds_ext.push(slope(0));

    let cdf_interp = crate::interp::MonotoneCubic::with_slopes(xs_ext, ys_ext, ds_ext);
    let values: Vec<f64> = grid.nodes().map(|x| cdf_interp.deriv(x)).collect();

    let resampled_mass = grid.integrate(&values);
    let renorm_factor = 1.0 / resampled_mass;
    if (renorm_factor - 1.0).abs() > 1e-8 {
        return Err(Error::RenormOutOfTolerance {
            factor: renorm_factor,
        });
    }
    Ok(Pushforward {
        density: Density::new(grid, values)?,
        renorm_factor,
    })
}

/// Write a density as CSV with header `x,value`, one row per node.
pub fn write_density_csv(path: &Path, rho: &Density) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "value"])?;
    for (j, v) in rho.values().iter().enumerate() {
        w.write_record(&[
            format!("{}", rho.grid().node(j)),
            format!("{v}"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Read a density CSV; nodes must be strictly increasing from 0 with
/// spacing `1/N`.
pub fn read_density_csv(path: &Path) -> Result<Density> {
    let data = std::fs::read_to_string(path)?;
    parse_density_csv(&data)
}

/// Parse the `x,value` density format from a string.
pub fn parse_density_csv(data: &str) -> Result<Density> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(data.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "value" {
        return Err(Error::Parse {
            context: "density csv".into(),
            message: format!("expected header `x,value`, got {headers:?}"),
        });
    }
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for record in reader.records() {
        let record = record?;
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|e| Error::Parse {
                context: "density csv".into(),
                message: format!("bad {what} `{s}`: {e}"),
            })
        };
        xs.push(parse(&record[0], "x")?);
        vs.push(parse(&record[1], "value")?);
    }
    let n = xs.len();
    let grid = PeriodicGrid::new(n).map_err(|e| Error::Parse {
        context: "density csv".into(),
        message: e.to_string(),
    })?;
    for (j, &x) in xs.iter().enumerate() {
        if (x - grid.node(j)).abs() > 1e-9 / n as f64 {
            return Err(Error::Parse {
                context: "density csv".into(),
                message: format!("node {j} at {x} does not match uniform grid j/N"),
            });
        }
    }
    Density::new(grid, vs)
}

/// Shared FFT plumbing; plans are cached per thread.
pub(crate) mod fft {
    use super::*;

    thread_local! {
        static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
    }

    fn plan_forward(n: usize) -> Arc<dyn Fft<f64>> {
        PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
    }

    fn plan_inverse(n: usize) -> Arc<dyn Fft<f64>> {
        PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
    }

    /// Signed frequency of bin `k` in an `n`-point transform.
    pub fn signed_freq(k: usize, n: usize) -> i64 {
        if k <= n / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        }
    }

    /// Forward DFT of real samples (unnormalized, rustfft convention).
    pub fn forward(values: &[f64]) -> Vec<Complex<f64>> {
        let n = values.len();
        let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
        plan_forward(n).process(&mut buf);
        buf
    }

    /// Inverse DFT returning the real part, including the 1/n normalization.
    pub fn inverse_real(mut spectrum: Vec<Complex<f64>>) -> Vec<f64> {
        let n = spectrum.len();
        plan_inverse(n).process(&mut spectrum);
        let scale = 1.0 / n as f64;
        spectrum.iter().map(|c| c.re * scale).collect()
    }

    /// Spectral derivative of the given order via Fourier multipliers.
    pub fn derivative(values: &[f64], order: u32) -> Vec<f64> {
        let n = values.len();
        let mut spec = forward(values);
        for (k, c) in spec.iter_mut().enumerate() {
            let kk = signed_freq(k, n) as f64;
            *c *= match order {
                1 => {
                    // Nyquist derivative is imaginary for real data; zero it.
                    if n % 2 == 0 && k == n / 2 {
                        Complex::new(0.0, 0.0)
                    } else {
                        Complex::new(0.0, TAU * kk)
                    }
                }
                _ => Complex::new(-(TAU * kk) * (TAU * kk), 0.0),
            };
        }
        inverse_real(spec)
    }

    /// Zero all modes with |k| > n/3 (2/3-rule dealiasing for quadratic terms).
    pub fn dealias(spectrum: &mut [Complex<f64>]) {
        let n = spectrum.len();
        let cutoff = n as i64 / 3;
        for (k, c) in spectrum.iter_mut().enumerate() {
            if signed_freq(k, n).abs() > cutoff {
                *c = Complex::new(0.0, 0.0);
            }
        }
    }

    /// Partial integrals `F_j = int_0^{x_j} v` of the trigonometric
    /// interpolant of `v`; spectrally accurate for smooth data. `F_0 = 0`.
    pub fn cumulative(values: &[f64]) -> Vec<f64> {
        let n = values.len();
        let mut spec = forward(values);
        let mean = spec[0].re / n as f64;
        for (k, c) in spec.iter_mut().enumerate() {
            let kk = signed_freq(k, n);
            // The Nyquist antiderivative sin(pi N x)/(pi N) vanishes at nodes.
            if kk == 0 || (n % 2 == 0 && k == n / 2) {
                *c = Complex::new(0.0, 0.0);
            } else {
                *c /= Complex::new(0.0, TAU * kk as f64);
            }
        }
        let fluct = inverse_real(spec);
        (0..n)
            .map(|j| mean * j as f64 / n as f64 + fluct[j] - fluct[0])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const TAU: f64 = std::f64::consts::TAU;

    /// Modified Bessel function of the first kind, by its power series.
    /// Independent oracle for integrals of exp(±cos); converges in ~20 terms.
    fn bessel_i0(z: f64) -> f64 {
        let q = z * z / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..40 {
            term *= q / ((k * k) as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn grid_basics() {
        assert!(PeriodicGrid::new(7).is_err());
        assert!(PeriodicGrid::new(9).is_err());
        let grid = PeriodicGrid::new(64).unwrap();
        assert_eq!(grid.len(), 64);
        assert_abs_diff_eq!(grid.spacing() * 64.0, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn quadrature_of_constant_is_one() {
        let grid = PeriodicGrid::new(64).unwrap();
        let g = GridFunction::from_fn(grid, |_| 1.0);
        assert_abs_diff_eq!(quadrature(&g), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn quadrature_of_zero_mean_mode() {
        let grid = PeriodicGrid::new(64).unwrap();
        let g = GridFunction::from_fn(grid, |x| (TAU * x).cos());
        assert_abs_diff_eq!(quadrature(&g), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn quadrature_matches_bessel_oracle() {
        // integral of exp(-cos 2 pi x) over the unit circle is I_0(1).
        let grid = PeriodicGrid::new(256).unwrap();
        let g = GridFunction::from_fn(grid, |x| (-(TAU * x).cos()).exp());
        let oracle = bessel_i0(1.0);
        assert_abs_diff_eq!(quadrature(&g), oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(oracle, 1.26606587775, epsilon = 1e-10);
    }

    #[test]
    fn spectral_derivative_of_sine() {
        let grid = PeriodicGrid::new(64).unwrap();
        let g = GridFunction::from_fn(grid, |x| (TAU * x).sin());
        let dg = spectral_derivative(&g, 1).unwrap();
        for (j, &v) in dg.values().iter().enumerate() {
            assert_abs_diff_eq!(v, TAU * (TAU * grid.node(j)).cos(), epsilon = 1e-12);
        }
    }

    #[test]
    fn spectral_derivative_of_constant_is_zero() {
        let grid = PeriodicGrid::new(64).unwrap();
        let g = GridFunction::from_fn(grid, |_| 4.2);
        let dg = spectral_derivative(&g, 1).unwrap();
        assert!(dg.max_abs() < 1e-13);
    }

    #[test]
    fn spectral_second_derivative() {
        let grid = PeriodicGrid::new(64).unwrap();
        let g = GridFunction::from_fn(grid, |x| (2.0 * TAU * x).cos());
        let d2g = spectral_derivative(&g, 2).unwrap();
        for (j, &v) in d2g.values().iter().enumerate() {
            let expect = -4.0 * TAU * TAU * (2.0 * TAU * grid.node(j)).cos();
            assert_abs_diff_eq!(v, expect, epsilon = 1e-10);
        }
    }

    #[test]
    fn spectral_derivative_rejects_non_finite() {
        let grid = PeriodicGrid::new(8).unwrap();
        let mut vals = vec![0.0; 8];
        vals[3] = f64::NAN;
        let g = GridFunction::new(grid, vals);
        assert!(matches!(
            spectral_derivative(&g, 1),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn central_difference_fallback_is_second_order()  {
        let f = |x: f64| (TAU * x).sin();
        let err_at = |n: usize| {
            let grid = PeriodicGrid::new(n).unwrap();
            let g = GridFunction::from_fn(grid, f);
            let dg = derivative_with(&g, 1, DiffScheme::CentralDifference).unwrap();
            dg.values()
                .iter()
                .enumerate()
                .map(|(j, v)| (v - TAU * (TAU * grid.node(j)).cos()).abs())
                .fold(0.0, f64::max)
        };
        let e1 = err_at(64);
        let e2 = err_at(128);
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "ratio = {ratio}");
    }

    #[test]
    fn product_rule_holds_for_band_limited_functions() {
        let grid = PeriodicGrid::new(96).unwrap();
        let f = GridFunction::from_fn(grid, |x| (3.0 * TAU * x).sin() + 0.3 * (TAU * x).cos());
        let g = GridFunction::from_fn(grid, |x| (5.0 * TAU * x).cos() - 0.1 * (2.0 * TAU * x).sin());
        let prod = GridFunction::new(
            grid,
            f.values().iter().zip(g.values()).map(|(a, b)| a * b).collect(),
        );
        let d_prod = spectral_derivative(&prod, 1).unwrap();
        let df = spectral_derivative(&f, 1).unwrap();
        let dg = spectral_derivative(&g, 1).unwrap();
        let mut max_err: f64 = 0.0;
        for j in 0..grid.len() {
            let leibniz = f.values()[j] * dg.values()[j] + g.values()[j] * df.values()[j];
            max_err = max_err.max((d_prod.values()[j] - leibniz).abs());
        }
        assert!(max_err <= 1e-8, "max_err = {max_err:.3e}");
    }

    #[test]
    fn density_mass_and_clipping() {
        let grid = PeriodicGrid::new(32).unwrap();
        let mut vals = vec![1.0; 32];
        vals[0] = -5e-13; // inside the clip band
        let rho = Density::new(grid, vals).unwrap();
        assert_abs_diff_eq!(rho.mass(), 1.0, epsilon = 1e-12);
        assert!(rho.min_value() >= 0.0);

        let mut bad = vec![1.0; 32];
        bad[5] = -1e-6;
        assert!(matches!(
            Density::new(grid, bad),
            Err(Error::NegativeDensity { node: 5, .. })
        ));
    }

    #[test]
    fn pushforward_identity_map() {
        let grid = PeriodicGrid::new(128).unwrap();
        let rho = Density::new(
            grid,
            grid.nodes().map(|x| (-(TAU * x).cos()).exp()).collect(),
        )
        .unwrap();
        let phi = GridFunction::zeros(grid);
        let out = pushforward_1d(&rho, &phi, 0.7).unwrap();
        assert!(out.density.linf_distance(&rho) < 1e-12);
        assert_abs_diff_eq!(out.renorm_factor, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pushforward_uniform_under_rotation() {
        // A constant shift field rotates the circle; uniform is invariant.
        let grid = PeriodicGrid::new(128).unwrap();
        let rho = Density::uniform(grid);
        let shift = GridFunction::from_fn(grid, |_| 0.37);
        let flat = GridFunction::zeros(grid);
        let out = pushforward_with_derivatives(&rho, &shift, &flat, 1.0).unwrap();
        assert!(out.density.linf_distance(&rho) < 1e-10);
    }

    #[test]
    fn pushforward_matches_exact_change_of_variables() {
        // rho = exp(-cos 2 pi x)/I0(1), phi = (0.01/2 pi) sin(2 pi x), t = 1.
        // Oracle: exact inverse-map root finding and the change-of-variables
        // formula evaluated analytically at every node.
        let n = 1 << 14;
        let grid = PeriodicGrid::new(n).unwrap();
        let i0 = bessel_i0(1.0);
        let rho_exact = |x: f64| (-(TAU * x).cos()).exp() / i0;
        let rho = Density::new(grid, grid.nodes().map(rho_exact).collect()).unwrap();
        let phi = GridFunction::from_fn(grid, |x| 0.01 / TAU * (TAU * x).sin());
        let t = 1.0;
        let out = pushforward_1d(&rho, &phi, t).unwrap();

        let dphi = |x: f64| 0.01 * (TAU * x).cos();
        let d2phi = |x: f64| -0.01 * TAU * (TAU * x).sin();
        // Invert y = x + t phi'(x) by bisection (map is monotone).
        let invert = |y: f64| -> f64 {
            let (mut lo, mut hi) = (y - 0.02, y + 0.02);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if mid + t * dphi(mid) < y {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let mut l1 = 0.0;
        for (j, &v) in out.density.values().iter().enumerate() {
            let y = grid.node(j);
            let x = invert(y);
            let oracle = rho_exact(x) / (1.0 + t * d2phi(x));
            l1 += (v - oracle).abs() * grid.spacing();
        }
        assert!(l1 <= 1e-6, "L1 error {l1:.3e}");
        assert!((out.renorm_factor - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn pushforward_roundtrip_error_is_quadratic_in_t() {
        let grid = PeriodicGrid::new(256).unwrap();
        let rho = Density::new(
            grid,
            grid.nodes().map(|x| (-(TAU * x).cos()).exp()).collect(),
        )
        .unwrap();
        let phi = GridFunction::from_fn(grid, |x| (TAU * x).sin() / TAU);
        let err_at = |t: f64| {
            let fwd = pushforward_1d(&rho, &phi, t).unwrap().density;
            let back = pushforward_1d(&fwd, &phi, -t).unwrap().density;
            back.l1_distance(&rho)
        };
        let e2 = err_at(1e-2);
        let e3 = err_at(1e-3);
        // quadratic decay: two orders of magnitude when t shrinks by one
        let ratio = e2 / e3;
        assert!(ratio > 30.0, "e(1e-2) = {e2:.3e}, e(1e-3) = {e3:.3e}, ratio {ratio:.1}");
    }

    #[test]
    fn pushforward_detects_degenerate_jacobian() {
        let grid = PeriodicGrid::new(128).unwrap();
        let rho = Density::uniform(grid);
        // phi'' reaches -2 pi; t = 0.3 makes 1 + t phi'' < 0.
        let phi = GridFunction::from_fn(grid, |x| (TAU * x).sin() / TAU);
        assert!(matches!(
            pushforward_1d(&rho, &phi, 0.3),
            Err(Error::JacobianDegenerate { .. })
        ));
    }

    #[test]
    fn density_csv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rho.csv");
        let grid = PeriodicGrid::new(64).unwrap();
        let rho = Density::new(
            grid,
            grid.nodes().map(|x| 1.0 + 0.4 * (TAU * x).sin()).collect(),
        )
        .unwrap();
        write_density_csv(&path, &rho).unwrap();
        let back = read_density_csv(&path).unwrap();
        assert!(back.linf_distance(&rho) < 1e-14);
    }

    #[test]
    fn density_csv_rejects_bad_nodes() {
        let data = "x,value\n0.0,1.0\n0.3,1.0\n";
        assert!(parse_density_csv(data).is_err());
    }
}
