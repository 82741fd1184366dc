//! Truncated Fourier representation of functions on the torus T = R/Z.
//!
//! A field is the trigonometric polynomial `u(x) = sum_{|n|<=N} c_n e^{2pi i n x}`
//! with the unit-circumference convention, so the Japanese bracket is
//! `<n> = (1 + n^2)^(1/2)` and the derivative symbol is `2 pi n`.
//!
//! All operations here are pure; fields are plain values that are cheap to
//! clone and safe to share across threads. FFT plans are cached per thread.

use std::cell::RefCell;
use std::collections::HashMap;
use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};

/// Coefficient symmetry class of a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Symmetry {
    /// Unconstrained complex coefficients.
    Complex,
    /// `c_{-n} = conj(c_n)`; the synthesized function is real-valued.
    RealSymmetric,
}

/// Japanese bracket `<n> = (1 + n^2)^(1/2)`.
pub fn bracket(n: i64) -> f64 {
    (1.0 + (n as f64) * (n as f64)).sqrt()
}

/// A function on the torus, stored as `2N+1` Fourier coefficients `c_n`,
/// `n = -N..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusField {
    modes: usize,
    symmetry: Symmetry,
    /// Coefficient `c_n` lives at index `n + N`.
    coeffs: Vec<Complex64>,
}

impl TorusField {
    /// Builds a field from coefficients ordered `n = -N..N`.
    pub fn new(modes: usize, symmetry: Symmetry, coeffs: Vec<Complex64>) -> Result<Self> {
        let expected = 2 * modes + 1;
        if coeffs.len() != expected {
            return Err(Error::BadCoefficientCount {
                got: coeffs.len(),
                expected,
                n: modes,
            });
        }
        let field = TorusField {
            modes,
            symmetry,
            coeffs,
        };
        field.check_finite()?;
        if symmetry == Symmetry::RealSymmetric {
            field.check_real_symmetric()?;
        }
        Ok(field)
    }

    pub fn zero(modes: usize, symmetry: Symmetry) -> Self {
        TorusField {
            modes,
            symmetry,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * modes + 1],
        }
    }

    /// A constant field `u(x) = c`.
    pub fn constant(modes: usize, c: Complex64) -> Self {
        let symmetry = if c.im == 0.0 {
            Symmetry::RealSymmetric
        } else {
            Symmetry::Complex
        };
        let mut f = TorusField::zero(modes, symmetry);
        f.set(0, c);
        f
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient `c_n`; zero outside the band.
    pub fn coeff(&self, n: i64) -> Complex64 {
        let modes = self.modes as i64;
        if n.abs() > modes {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(n + modes) as usize]
        }
    }

    pub fn set(&mut self, n: i64, value: Complex64) {
        let modes = self.modes as i64;
        assert!(n.abs() <= modes, "mode {n} outside band |n| <= {modes}");
        self.coeffs[(n + modes) as usize] = value;
    }

    pub fn check_finite(&self) -> Result<()> {
        let modes = self.modes as i64;
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::NonFiniteCoefficient { n: i as i64 - modes });
            }
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    fn check_real_symmetric(&self) -> Result<()> {
        let tol = 1e-12 * (1.0 + self.coeff_sup());
        if self.coeff(0).im.abs() > tol {
            return Err(Error::NotRealSymmetric {
                detail: format!("c_0 has imaginary part {}", self.coeff(0).im),
            });
        }
        for n in 1..=self.modes as i64 {
            let d = self.coeff(-n) - self.coeff(n).conj();
            if d.norm() > tol {
                return Err(Error::NotRealSymmetric {
                    detail: format!("|c_{} - conj(c_{})| = {}", -n, n, d.norm()),
                });
            }
        }
        Ok(())
    }

    fn coeff_sup(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Projects exactly onto the real-symmetric subspace. Used to scrub
    /// roundoff asymmetry accumulated by real-equation integrators.
    pub fn symmetrize_real(&mut self) {
        let modes = self.modes as i64;
        let c0 = self.coeff(0);
        self.set(0, Complex64::new(c0.re, 0.0));
        for n in 1..=modes {
            let avg = 0.5 * (self.coeff(n) + self.coeff(-n).conj());
            self.set(n, avg);
            self.set(-n, avg.conj());
        }
        self.symmetry = Symmetry::RealSymmetric;
    }

    /// Plancherel mass `M(u) = int |u|^2 dx = sum |c_n|^2`.
    pub fn mass(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `(sum <n>^{2s} |c_n|^2)^{1/2}`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let modes = self.modes as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| bracket(i as i64 - modes).powf(2.0 * s) * c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `(sum <n>^{sp} |c_n|^p)^{1/p}`, the Fourier-Lebesgue norm.
    pub fn fourier_lebesgue_norm(&self, s: f64, p: f64) -> Result<f64> {
        if p < 1.0 {
            return Err(Error::InvalidParameter {
                name: "p",
                detail: format!("Fourier-Lebesgue norm needs p >= 1, got {p}"),
            });
        }
        let modes = self.modes as i64;
        let sum: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| bracket(i as i64 - modes).powf(s * p) * c.norm().powf(p))
            .sum();
        Ok(sum.powf(1.0 / p))
    }

    /// `(int |u|^p dx)^{1/p}` by trapezoidal quadrature on a dealiased grid.
    ///
    /// Exact (up to roundoff) for even integer `p` once `G >= pN + 2`;
    /// spectrally accurate for other `p` since the integrand is smooth.
    pub fn lebesgue_norm(&self, p: f64) -> Result<f64> {
        if p < 1.0 {
            return Err(Error::InvalidParameter {
                name: "p",
                detail: format!("Lebesgue norm needs p >= 1, got {p}"),
            });
        }
        let g = quadrature_grid_size(self.modes, p.ceil().max(6.0) as usize);
        let sample = synthesize(self, g)?;
        let mean: f64 = sample
            .values()
            .iter()
            .map(|v| v.norm().powf(p))
            .sum::<f64>()
            / g as f64;
        Ok(mean.powf(1.0 / p))
    }

    /// `int |u|^p dx` without the root; shares the quadrature above.
    pub fn lebesgue_pth_power(&self, p: f64) -> Result<f64> {
        Ok(self.lebesgue_norm(p)?.powf(p))
    }

    /// Sharp projection onto frequencies `|n| <= 2^k`.
    pub fn project_low(&self, k: u32) -> TorusField {
        let cut = 1i64 << k;
        let modes = self.modes as i64;
        let mut out = self.clone();
        for n in -modes..=modes {
            if n.abs() > cut {
                out.set(n, Complex64::new(0.0, 0.0));
            }
        }
        out
    }

    /// Zeroes the mean mode (the paper's `P_{!=0}` projection).
    pub fn remove_mean(&self) -> TorusField {
        let mut out = self.clone();
        out.set(0, Complex64::new(0.0, 0.0));
        out
    }

    /// `c_n -> conj(c_{-n})`, i.e. pointwise complex conjugation of `u`.
    pub fn conjugate(&self) -> TorusField {
        let modes = self.modes as i64;
        let mut out = TorusField::zero(self.modes, self.symmetry);
        for n in -modes..=modes {
            out.set(n, self.coeff(-n).conj());
        }
        out
    }

    /// `c_n -> c_{-n}`, i.e. the parity map `u(x) -> u(-x)`.
    pub fn reflect(&self) -> TorusField {
        let modes = self.modes as i64;
        let mut out = TorusField::zero(self.modes, self.symmetry);
        for n in -modes..=modes {
            out.set(n, self.coeff(-n));
        }
        out
    }

    pub fn scale(&self, a: f64) -> TorusField {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c *= a;
        }
        out
    }
}

/// Collocation values of a field on the uniform grid `x_j = j/G`.
///
/// Grid sizes are powers of two; nonlinear work additionally uses the
/// dealiasing rule `G >= 6N + 2` so quintic products are alias-free.
#[derive(Debug, Clone)]
pub struct GridSample {
    g: usize,
    values: Vec<Complex64>,
}

impl GridSample {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        let g = values.len();
        if !g.is_power_of_two() {
            return Err(Error::GridNotPowerOfTwo { g });
        }
        Ok(GridSample { g, values })
    }

    pub fn grid_size(&self) -> usize {
        self.g
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }
}

/// Smallest power of two that dealiases a degree-`deg` product of an
/// order-`N` trigonometric polynomial (`G >= deg*N + 2`).
pub fn quadrature_grid_size(modes: usize, deg: usize) -> usize {
    (deg * modes + 2).max(8).next_power_of_two()
}

/// Default dealiased grid for the quintic nonlinearities used throughout.
pub fn dealias_grid_size(modes: usize) -> usize {
    quadrature_grid_size(modes, 6)
}

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
}

fn fft_plan(g: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        let mut map = cell.borrow_mut();
        map.entry((g, forward))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                let dir = if forward {
                    FftDirection::Forward
                } else {
                    FftDirection::Inverse
                };
                planner.plan_fft(g, dir)
            })
            .clone()
    })
}

/// Evaluates `u` on the grid `x_j = j/G`: `values_j = sum c_n e^{2pi i n j/G}`.
pub fn synthesize(field: &TorusField, g: usize) -> Result<GridSample> {
    let required = 2 * field.modes() + 1;
    if g < required {
        return Err(Error::GridTooSmall { g, required });
    }
    if !g.is_power_of_two() {
        return Err(Error::GridNotPowerOfTwo { g });
    }
    let modes = field.modes() as i64;
    let mut buf = vec![Complex64::new(0.0, 0.0); g];
    for n in -modes..=modes {
        let slot = n.rem_euclid(g as i64) as usize;
        buf[slot] = field.coeff(n);
    }
    fft_plan(g, false).process(&mut buf);
    GridSample::new(buf)
}

/// Recovers the first `2N+1` Fourier coefficients of the trigonometric
/// interpolant through the grid values. Inverse of [`synthesize`] whenever
/// `G >= 2N+1`.
pub fn analyze(sample: &GridSample, modes: usize) -> Result<TorusField> {
    let g = sample.grid_size();
    let required = 2 * modes + 1;
    if g < required {
        return Err(Error::GridTooSmall { g, required });
    }
    let mut buf = sample.values().to_vec();
    fft_plan(g, true).process(&mut buf);
    let scale = 1.0 / g as f64;
    let m = modes as i64;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * modes + 1];
    for n in -m..=m {
        let slot = n.rem_euclid(g as i64) as usize;
        coeffs[(n + m) as usize] = buf[slot] * scale;
    }
    TorusField::new(modes, Symmetry::Complex, coeffs)
}

/// Which equation a Hamiltonian or flow refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Equation {
    Nls,
    Gkdv,
}

impl std::fmt::Display for Equation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Equation::Nls => write!(f, "nls"),
            Equation::Gkdv => write!(f, "gkdv"),
        }
    }
}

/// `H(u) = 1/2 int |u_x|^2 - (1/p) int |u|^p` (NLS) or the real-valued
/// analogue with `u^p` in the potential (gKdV).
pub fn hamiltonian(field: &TorusField, equation: Equation, p: f64) -> Result<f64> {
    if p < 1.0 {
        return Err(Error::InvalidParameter {
            name: "p",
            detail: format!("Hamiltonian needs p >= 1, got {p}"),
        });
    }
    let modes = field.modes() as i64;
    let kinetic: f64 = field
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let n = (i as i64 - modes) as f64;
            let omega = 2.0 * std::f64::consts::PI * n;
            0.5 * omega * omega * c.norm_sqr()
        })
        .sum();
    let potential = match equation {
        Equation::Nls => field.lebesgue_pth_power(p)?,
        Equation::Gkdv => {
            field.check_real_symmetric().map_err(|_| Error::NotRealSymmetric {
                detail: "gKdV Hamiltonian requires a real-symmetric field".into(),
            })?;
            let g = quadrature_grid_size(field.modes(), p.ceil().max(6.0) as usize);
            let sample = synthesize(field, g)?;
            let int_p = if p.fract() == 0.0 {
                let k = p as i32;
                sample.values().iter().map(|v| v.re.powi(k)).sum::<f64>() / g as f64
            } else {
                sample.values().iter().map(|v| v.re.powf(p)).sum::<f64>() / g as f64
            };
            int_p
        }
    };
    Ok(kinetic - potential / p)
}

/// A norm selector, mirroring the run configuration surface.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum NormSpec {
    Sobolev { s: f64 },
    Lebesgue { p: f64 },
    FourierLebesgue { s: f64, p: f64 },
}

impl NormSpec {
    pub fn validate(&self) -> Result<()> {
        let p = match self {
            NormSpec::Sobolev { .. } => return Ok(()),
            NormSpec::Lebesgue { p } => *p,
            NormSpec::FourierLebesgue { p, .. } => *p,
        };
        if p < 1.0 {
            return Err(Error::InvalidParameter {
                name: "p",
                detail: format!("norms require p >= 1, got {p}"),
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, field: &TorusField) -> Result<f64> {
        match self {
            NormSpec::Sobolev { s } => Ok(field.sobolev_norm(*s)),
            NormSpec::Lebesgue { p } => field.lebesgue_norm(*p),
            NormSpec::FourierLebesgue { s, p } => field.fourier_lebesgue_norm(*s, *p),
        }
    }

    /// CSV column header, e.g. `h_0.25`, `l_6`, `fl_0.5_4`.
    pub fn column_name(&self) -> String {
        match self {
            NormSpec::Sobolev { s } => format!("h_{}", trim_float(*s)),
            NormSpec::Lebesgue { p } => format!("l_{}", trim_float(*p)),
            NormSpec::FourierLebesgue { s, p } => {
                format!("fl_{}_{}", trim_float(*s), trim_float(*p))
            }
        }
    }
}

fn trim_float(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Hoelder constant for the embedding `FL^{s+a/2,p} -> H^s`:
/// `C = (sum_n <n>^{-a p/(p-2)})^{(p-2)/(2p)}`, summed to `|n| <= 10^6`
/// with the integral tail bound added, so the returned value is an upper
/// bound for the true constant.
pub fn embedding_constant(a: f64, p: f64) -> f64 {
    let exponent = a * p / (p - 2.0);
    let cap: i64 = 1_000_000;
    let mut sum = 1.0; // n = 0 term
    for n in 1..=cap {
        sum += 2.0 * bracket(n).powf(-exponent);
    }
    // sum_{|n|>cap} <n>^{-e} <= 2 int_cap^inf x^{-e} dx
    let tail = 2.0 * (cap as f64).powf(1.0 - exponent) / (exponent - 1.0);
    (sum + tail).powf((p - 2.0) / (2.0 * p))
}

const GFL1_MAGIC: &[u8; 4] = b"GFL1";

/// Writes the binary snapshot format GFL1: magic, u32 LE mode count N,
/// u8 symmetry flag (0 complex, 1 real-symmetric), then `2N+1` little-endian
/// f64 pairs `(re, im)` ordered `n = -N..N`.
pub fn write_gfl1<W: Write>(field: &TorusField, mut out: W) -> Result<()> {
    out.write_all(GFL1_MAGIC)?;
    out.write_all(&(field.modes() as u32).to_le_bytes())?;
    let flag: u8 = match field.symmetry() {
        Symmetry::Complex => 0,
        Symmetry::RealSymmetric => 1,
    };
    out.write_all(&[flag])?;
    for c in field.coeffs() {
        out.write_all(&c.re.to_le_bytes())?;
        out.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_gfl1<R: Read>(mut input: R) -> Result<TorusField> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != GFL1_MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}, expected GFL1")));
    }
    let mut n_bytes = [0u8; 4];
    input.read_exact(&mut n_bytes)?;
    let modes = u32::from_le_bytes(n_bytes) as usize;
    let mut flag = [0u8; 1];
    input.read_exact(&mut flag)?;
    let symmetry = match flag[0] {
        0 => Symmetry::Complex,
        1 => Symmetry::RealSymmetric,
        other => return Err(Error::Format(format!("bad symmetry flag {other}"))),
    };
    let mut coeffs = Vec::with_capacity(2 * modes + 1);
    let mut pair = [0u8; 16];
    for _ in 0..(2 * modes + 1) {
        input.read_exact(&mut pair)?;
        let re = f64::from_le_bytes(pair[0..8].try_into().unwrap());
        let im = f64::from_le_bytes(pair[8..16].try_into().unwrap());
        coeffs.push(Complex64::new(re, im));
    }
    TorusField::new(modes, symmetry, coeffs)
}

/// CSV export with columns `n, re, im`.
pub fn write_coefficients_csv<W: Write>(field: &TorusField, mut out: W) -> Result<()> {
    writeln!(out, "n,re,im")?;
    let modes = field.modes() as i64;
    for n in -modes..=modes {
        let c = field.coeff(n);
        writeln!(out, "{},{},{}", n, c.re, c.im)?;
    }
    Ok(())
}
