//! The mass-critical ground state `Q`, its sharp constants, and the scaled
//! cutoff soliton family.
//!
//! `Q(x) = 3^{1/4} sech^{1/2}(2x)` is the unique even positive optimiser of
//! the sextic Gagliardo-Nirenberg-Sobolev inequality on the line and solves
//! `Q'' - Q + Q^5 = 0`. The closed form is primary; an independent shooting
//! solver exists purely as an oracle for the cached constants.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{analyze, dealias_grid_size, GridSample, TorusField};

/// Ground state profile, evaluated in a form stable for all `x`.
pub fn q_profile(x: f64) -> f64 {
    // sech(2x) = 2 e^{-2|x|} / (1 + e^{-4|x|})
    let e = (-2.0 * x.abs()).exp();
    let sech = 2.0 * e / (1.0 + e * e);
    3f64.powf(0.25) * sech.sqrt()
}

/// d/dx of the profile: `Q'(x) = -Q(x) tanh(2x)`.
pub fn q_profile_derivative(x: f64) -> f64 {
    -q_profile(x) * (2.0 * x).tanh()
}

/// Sharp constants attached to `Q`, each computed by adaptive quadrature of
/// the closed form (not hard-coded).
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SolitonProfile {
    /// `||Q||_{L^2(R)}^2`, the optimal mass threshold.
    pub mass_threshold: f64,
    /// `||Q||_{L^6(R)}^6`.
    pub l6_sixth_power: f64,
    /// `||Q'||_{L^2(R)}^2`.
    pub grad_sq: f64,
    /// Sharp constant of `||u||_{L^6}^6 <= C ||u||_{L^2}^4 ||u_x||_{L^2}^2`.
    pub c_gns_6: f64,
    /// `Q(0) = 3^{1/4}`.
    pub q0: f64,
    /// Relative residual of the optimiser identity `||Q||_6^6 = 3 ||Q'||_2^2`.
    pub l6_identity_residual: f64,
}

static CONSTANTS: OnceLock<SolitonProfile> = OnceLock::new();

/// Lazily computed, immutable sharp constants.
pub fn constants() -> &'static SolitonProfile {
    CONSTANTS.get_or_init(|| {
        // Q decays like e^{-|x|}; [-30, 30] leaves a tail below 1e-24.
        let mass = adaptive_simpson(&|x| q_profile(x).powi(2), -30.0, 30.0, 1e-13);
        let l6 = adaptive_simpson(&|x| q_profile(x).powi(6), -30.0, 30.0, 1e-13);
        let grad = adaptive_simpson(&|x| q_profile_derivative(x).powi(2), -30.0, 30.0, 1e-13);
        let c_gns = l6 / (mass * mass * grad);
        SolitonProfile {
            mass_threshold: mass,
            l6_sixth_power: l6,
            grad_sq: grad,
            c_gns_6: c_gns,
            q0: q_profile(0.0),
            l6_identity_residual: (l6 / (3.0 * grad) - 1.0).abs(),
        }
    })
}

/// `||Q||_{L^2(R)}^2 = sqrt(3) pi / 2`, the optimal mass cutoff.
pub fn mass_threshold() -> f64 {
    constants().mass_threshold
}

/// `||Q||_{L^r(R)}^r` by adaptive quadrature, for the scaling predictions.
pub fn q_lr_power(r: f64) -> f64 {
    adaptive_simpson(&|x| q_profile(x).powf(r), -30.0, 30.0, 1e-13)
}

/// Adaptive Simpson with Richardson acceptance test.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, fa, b, fb, fm);
    recurse(f, a, fa, b, fb, fm, whole, tol, 40)
}

/// Result of the independent shooting solve of `Q'' - Q + Q^5 = 0`.
#[derive(Debug, Clone)]
pub struct ShootingTable {
    /// Shot initial value `Q(0)` found by bisection.
    pub q0: f64,
    /// Sample abscissas on `[0, x_max]`.
    pub xs: Vec<f64>,
    /// Profile values at `xs`.
    pub values: Vec<f64>,
}

#[derive(PartialEq)]
enum ShotOutcome {
    /// Solution crossed zero: initial value too large.
    Crossed,
    /// Solution turned around while positive: initial value too small.
    Turned,
    /// Neither event up to `x_max`: on the separatrix within resolution.
    Decayed,
}

fn shoot(a: f64, x_max: f64, dx: f64) -> ShotOutcome {
    // RK4 on (Q, Q') with Q'' = Q - Q^5.
    let mut q = a;
    let mut p = 0.0f64;
    let deriv = |q: f64, p: f64| (p, q - q.powi(5));
    let steps = (x_max / dx).round() as usize;
    for _ in 0..steps {
        let (k1q, k1p) = deriv(q, p);
        let (k2q, k2p) = deriv(q + 0.5 * dx * k1q, p + 0.5 * dx * k1p);
        let (k3q, k3p) = deriv(q + 0.5 * dx * k2q, p + 0.5 * dx * k2p);
        let (k4q, k4p) = deriv(q + dx * k3q, p + dx * k3p);
        q += dx / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        p += dx / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        if q < 0.0 {
            return ShotOutcome::Crossed;
        }
        if p > 0.0 && q < 0.9 * a {
            return ShotOutcome::Turned;
        }
    }
    ShotOutcome::Decayed
}

/// Independently recovers the ground state by shooting on `Q(0)` with
/// `Q'(0) = 0`, bisecting between turning and crossing trajectories until the
/// solution decays out to `x = 15`. Used only as an oracle against the
/// closed form.
pub fn q_shoot() -> Result<ShootingTable> {
    let (x_max, dx) = (15.0, 5e-4);
    // Q = 1 is the ODE's centre equilibrium; bracket strictly away from it.
    let mut lo = 1.1f64;
    let mut hi = 1.5f64;
    if shoot(lo, x_max, dx) != ShotOutcome::Turned {
        return Err(Error::ShootingBracket {
            detail: format!("lower bracket {lo} did not turn"),
        });
    }
    if shoot(hi, x_max, dx) != ShotOutcome::Crossed {
        return Err(Error::ShootingBracket {
            detail: format!("upper bracket {hi} did not cross zero"),
        });
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        match shoot(mid, x_max, dx) {
            ShotOutcome::Crossed => hi = mid,
            ShotOutcome::Turned => lo = mid,
            // On the separatrix within integrator resolution: tighten both
            // sides towards it by shrinking the bracket around mid.
            ShotOutcome::Decayed => {
                let w = hi - lo;
                lo = mid - 0.25 * w;
                hi = mid + 0.25 * w;
            }
        }
        if hi - lo < f64::EPSILON {
            break;
        }
    }
    let a = 0.5 * (lo + hi);
    // Final pass storing the table.
    let mut q = a;
    let mut p = 0.0f64;
    let deriv = |q: f64, p: f64| (p, q - q.powi(5));
    let stride = (0.01 / dx).round() as usize;
    let steps = (x_max / dx).round() as usize;
    let mut xs = vec![0.0];
    let mut values = vec![q];
    for step in 1..=steps {
        let (k1q, k1p) = deriv(q, p);
        let (k2q, k2p) = deriv(q + 0.5 * dx * k1q, p + 0.5 * dx * k1p);
        let (k3q, k3p) = deriv(q + 0.5 * dx * k2q, p + 0.5 * dx * k2p);
        let (k4q, k4p) = deriv(q + dx * k3q, p + dx * k3p);
        q += dx / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        p += dx / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        if step % stride == 0 {
            xs.push(step as f64 * dx);
            values.push(q);
        }
    }
    Ok(ShootingTable { q0: a, xs, values })
}

/// Smooth cutoff built from `e^{-1/t}` transitions: identically 1 on
/// `|x| <= 1/8`, supported in `[-1/4, 1/4]`, values in `[0, 1]`.
pub fn chi(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 0.125 {
        1.0
    } else if ax >= 0.25 {
        0.0
    } else {
        // Smooth step from 1 at 1/8 down to 0 at 1/4.
        let t = (0.25 - ax) / 0.125; // 1 at the plateau edge, 0 at the support edge
        let f = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
        f(t) / (f(t) + f(1.0 - t))
    }
}

/// Parameters of the scaled, translated, phase-rotated, cutoff soliton
/// `e^{i theta} (1 - eps) chi(x - x0) delta^{-1/2} Q(delta^{-1}(x - x0))`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledCutoffSoliton {
    pub delta: f64,
    pub x0: f64,
    pub theta: f64,
    /// The proof's shrink factor; the produced profile is `(1 - eps) Q^chi`.
    pub eps: f64,
}

impl ScaledCutoffSoliton {
    pub fn new(delta: f64, x0: f64, theta: f64, eps: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.25) {
            return Err(Error::InvalidParameter {
                name: "delta",
                detail: format!("need 0 < delta < 1/4 so the cutoff dominates the tail, got {delta}"),
            });
        }
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::InvalidParameter {
                name: "eps",
                detail: format!("need 0 <= eps < 1, got {eps}"),
            });
        }
        Ok(ScaledCutoffSoliton { delta, x0, theta, eps })
    }

    /// Pointwise evaluation on the torus (x taken mod 1).
    pub fn eval(&self, x: f64) -> Complex64 {
        let mut d = (x - self.x0).rem_euclid(1.0);
        if d >= 0.5 {
            d -= 1.0;
        }
        let amplitude =
            (1.0 - self.eps) * chi(d) * self.delta.powf(-0.5) * q_profile(d / self.delta);
        Complex64::from_polar(amplitude, self.theta)
    }
}

/// Projects the scaled cutoff soliton onto `2N+1` Fourier modes.
///
/// Guards: `N >= 8/delta` keeps the aliasing of the sharp profile below
/// tolerance (the profile's spectrum decays like `e^{-pi delta n}`).
pub fn scaled_cutoff_soliton(params: &ScaledCutoffSoliton, modes: usize) -> Result<TorusField> {
    let suggested = (8.0 / params.delta).ceil() as usize;
    if modes < suggested {
        return Err(Error::SolitonResolution {
            delta: params.delta,
            n: modes,
            suggested_n: suggested,
        });
    }
    let g = dealias_grid_size(modes);
    let values: Vec<Complex64> = (0..g)
        .map(|j| params.eval(j as f64 / g as f64))
        .collect();
    let sample = GridSample::new(values)?;
    analyze(&sample, modes)
}

/// GNS deficit at dyadic scale `k`:
/// `C_GNS - ||P_{<=k} u_{!=0}||_{L^6}^6 / (||d_x P_{<=k} u||_{L^2}^2 ||Q||_{L^2(R)}^4)`,
/// with the convention `+inf` when the gradient vanishes.
pub fn gns_deficit(field: &TorusField, k: u32) -> Result<f64> {
    let c = constants();
    let projected = field.project_low(k);
    let grad_sq: f64 = projected
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, coeff)| {
            let n = (i as i64 - projected.modes() as i64) as f64;
            let omega = 2.0 * std::f64::consts::PI * n;
            omega * omega * coeff.norm_sqr()
        })
        .sum();
    let denom = grad_sq * c.mass_threshold * c.mass_threshold;
    if denom == 0.0 {
        return Ok(f64::INFINITY);
    }
    let l6 = projected.remove_mean().lebesgue_pth_power(6.0)?;
    Ok(c.c_gns_6 - l6 / denom)
}

/// Membership test for the quantitatively-non-sharp set `S_gamma`:
/// mass at most the threshold and deficit at least `gamma` for all
/// `1 <= k <= k_max`. Scales `k_max` with `2^{k_max} >= N`; larger `k` repeat
/// the full-band value.
pub fn s_gamma_member(field: &TorusField, gamma: f64, k_max: u32) -> Result<bool> {
    if gamma <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "gamma",
            detail: format!("need gamma > 0, got {gamma}"),
        });
    }
    if field.mass() > constants().mass_threshold {
        return Ok(false);
    }
    for k in 1..=k_max {
        if gns_deficit(field, k)? < gamma {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One side-by-side check of the soliton scaling estimates.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct QmEstimate {
    /// Norm (to the r-th power) computed spectrally from the projected field.
    pub computed: f64,
    /// Leading-order prediction `(1-eps)^r ||Q||_{L^r(R)}^r delta^{(2-r)/2}`,
    /// respectively the gradient bound `(1-eps)^2 (1+eps) ||Q'||^2 delta^{-2}`.
    pub predicted: f64,
}

/// Evaluates `||Qtilde^chi_delta||_{L^r(T)}^r` against its leading term, or
/// (for `r = None`) the gradient norm against its upper bound.
pub fn qm_estimates_check(delta: f64, eps: f64, r: Option<f64>) -> Result<QmEstimate> {
    let params = ScaledCutoffSoliton::new(delta, 0.0, 0.0, eps)?;
    let modes = (8.0 / delta).ceil() as usize;
    let field = scaled_cutoff_soliton(&params, modes)?;
    match r {
        Some(r) => {
            if r < 1.0 {
                return Err(Error::InvalidParameter {
                    name: "r",
                    detail: format!("need r >= 1, got {r}"),
                });
            }
            let computed = field.lebesgue_pth_power(r)?;
            let predicted =
                (1.0 - eps).powf(r) * q_lr_power(r) * delta.powf((2.0 - r) / 2.0);
            Ok(QmEstimate { computed, predicted })
        }
        None => {
            let computed: f64 = field
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let n = (i as i64 - field.modes() as i64) as f64;
                    let omega = 2.0 * std::f64::consts::PI * n;
                    omega * omega * c.norm_sqr()
                })
                .sum();
            let bound =
                (1.0 - eps).powi(2) * (1.0 + eps) * constants().grad_sq / (delta * delta);
            Ok(QmEstimate {
                computed,
                predicted: bound,
            })
        }
    }
}

/// Coefficient of `delta^{-2}` in the lower-bound exponent showing the Gibbs
/// density escapes `L^p` for `p > 1`:
/// `1/2 ||Q'||_{L^2(R)}^2 (p (1-eps)^6 - (1-eps)^2 (1+eps))`.
///
/// The unknown positive probability prefactor of the event
/// `{||v||_{L^2} <= (eps/2)||Q||_{L^2}}` is deliberately not folded in; it is
/// a measured quantity, never assumed.
pub fn density_blowup_exponent(p: f64, eps: f64) -> Result<f64> {
    if p <= 1.0 && p != 1.0 {
        return Err(Error::InvalidParameter {
            name: "p",
            detail: format!("need p >= 1, got {p}"),
        });
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidParameter {
            name: "eps",
            detail: format!("need 0 <= eps < 1, got {eps}"),
        });
    }
    let factor = p * (1.0 - eps).powi(6) - (1.0 - eps).powi(2) * (1.0 + eps);
    Ok(0.5 * constants().grad_sq * factor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn q_zero_value() {
        assert_relative_eq!(q_profile(0.0), 3f64.powf(0.25), epsilon = 1e-14);
        assert!((q_profile(0.0) - 1.31607).abs() < 1e-5);
    }

    #[test]
    fn q_even_positive_decreasing() {
        let mut prev = q_profile(0.0);
        for i in 1..200 {
            let x = i as f64 * 0.05;
            assert_relative_eq!(q_profile(x), q_profile(-x), epsilon = 1e-15);
            let v = q_profile(x);
            assert!(v > 0.0 && v < prev);
            prev = v;
        }
    }

    #[test]
    fn ode_residual_below_1e8() {
        // Fourth-order five-point stencil for Q''.
        let h = 1e-3;
        for i in 0..=2000 {
            let x = -10.0 + i as f64 * 0.01;
            let qpp = (-q_profile(x + 2.0 * h) + 16.0 * q_profile(x + h) - 30.0 * q_profile(x)
                + 16.0 * q_profile(x - h)
                - q_profile(x - 2.0 * h))
                / (12.0 * h * h);
            let residual = qpp - q_profile(x) + q_profile(x).powi(5);
            assert!(residual.abs() < 1e-8, "x={x} residual={residual}");
        }
    }

    #[test]
    fn threshold_matches_closed_form() {
        let analytic = 3f64.sqrt() * std::f64::consts::PI / 2.0;
        assert!((mass_threshold() - analytic).abs() < 1e-10);
        assert!((mass_threshold() - 2.7206990464).abs() < 1e-8);
    }

    #[test]
    fn threshold_scaling_invariance() {
        for &delta in &[0.1f64, 0.5] {
            let scaled =
                adaptive_simpson(&|x| (delta.powf(-0.5) * q_profile(x / delta)).powi(2), -30.0, 30.0, 1e-12);
            assert_relative_eq!(scaled, mass_threshold(), max_relative = 1e-9);
        }
    }

    #[test]
    fn optimiser_identity_and_gns_constant() {
        let c = constants();
        assert!(c.l6_identity_residual < 1e-6);
        // C_GNS * threshold^2 = ||Q||_6^6 / ||Q'||_2^2 = 3.
        assert_relative_eq!(
            c.c_gns_6 * c.mass_threshold * c.mass_threshold,
            3.0,
            max_relative = 1e-6
        );
        assert_relative_eq!(
            c.c_gns_6,
            4.0 / (std::f64::consts::PI * std::f64::consts::PI),
            max_relative = 1e-9
        );
    }

    #[test]
    fn shooting_oracle_agrees_with_closed_form() {
        let table = q_shoot().unwrap();
        assert!(
            (table.q0 - 3f64.powf(0.25)).abs() < 1e-9,
            "shot Q(0) = {}",
            table.q0
        );
        let mut sup = 0.0f64;
        for (x, v) in table.xs.iter().zip(&table.values) {
            if *x <= 10.0 {
                sup = sup.max((v - q_profile(*x)).abs());
            }
        }
        assert!(sup < 1e-8, "sup deviation {sup}");
    }

    #[test]
    fn chi_shape() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(0.124), 1.0);
        assert_eq!(chi(0.26), 0.0);
        assert_eq!(chi(-0.3), 0.0);
        for i in 0..100 {
            let x = 0.125 + 0.125 * i as f64 / 99.0;
            let v = chi(x);
            assert!((0.0..=1.0).contains(&v));
            assert_relative_eq!(chi(-x), v, epsilon = 1e-15);
        }
    }

    #[test]
    fn soliton_phase_and_translation() {
        let n = 200;
        let base = scaled_cutoff_soliton(
            &ScaledCutoffSoliton::new(0.05, 0.0, 0.0, 0.0).unwrap(),
            n,
        )
        .unwrap();
        let flipped = scaled_cutoff_soliton(
            &ScaledCutoffSoliton::new(0.05, 0.0, std::f64::consts::PI, 0.0).unwrap(),
            n,
        )
        .unwrap();
        for (a, b) in base.coeffs().iter().zip(flipped.coeffs()) {
            assert!((a + b).norm() < 1e-12);
        }
        let moved = scaled_cutoff_soliton(
            &ScaledCutoffSoliton::new(0.05, 0.37, 0.0, 0.0).unwrap(),
            n,
        )
        .unwrap();
        assert_relative_eq!(moved.mass(), base.mass(), epsilon = 1e-10);
    }

    #[test]
    fn soliton_mass_near_threshold() {
        let field = scaled_cutoff_soliton(
            &ScaledCutoffSoliton::new(0.01, 0.0, 0.0, 0.0).unwrap(),
            800,
        )
        .unwrap();
        let rel = (field.mass() - mass_threshold()).abs() / mass_threshold();
        assert!(rel < 0.01, "relative deviation {rel}");
    }

    #[test]
    fn soliton_resolution_guard() {
        let params = ScaledCutoffSoliton::new(0.01, 0.0, 0.0, 0.0).unwrap();
        match scaled_cutoff_soliton(&params, 100) {
            Err(Error::SolitonResolution { suggested_n, .. }) => assert_eq!(suggested_n, 800),
            other => panic!("expected resolution guard, got {other:?}"),
        }
    }

    #[test]
    fn deficit_conventions() {
        let zero = TorusField::zero(8, crate::field::Symmetry::Complex);
        assert_eq!(gns_deficit(&zero, 2).unwrap(), f64::INFINITY);
        let mean_only = TorusField::constant(8, Complex64::new(0.3, 0.0));
        assert_eq!(gns_deficit(&mean_only, 2).unwrap(), f64::INFINITY);
        assert!(s_gamma_member(&zero, 0.1, 3).unwrap());
    }

    #[test]
    fn deficit_decreases_along_soliton_family() {
        let modes = 1024;
        let k_max = 10; // 2^10 >= N
        let mut deficits = Vec::new();
        for &delta in &[0.05, 0.02, 0.01] {
            let field = scaled_cutoff_soliton(
                &ScaledCutoffSoliton::new(delta, 0.0, 0.0, 0.0).unwrap(),
                modes,
            )
            .unwrap();
            deficits.push(gns_deficit(&field, k_max).unwrap());
        }
        assert!(
            deficits[0] > deficits[1] && deficits[1] > deficits[2],
            "deficits {deficits:?}"
        );
        assert!(deficits[2] > 0.0);
    }

    #[test]
    fn near_soliton_fails_s_gamma() {
        let field = scaled_cutoff_soliton(
            &ScaledCutoffSoliton::new(0.01, 0.0, 0.0, 0.0).unwrap(),
            1024,
        )
        .unwrap();
        let gamma = 0.5 * constants().c_gns_6;
        assert!(!s_gamma_member(&field, gamma, 10).unwrap());
    }

    #[test]
    fn mass_exceeding_threshold_fails_s_gamma() {
        let c = (1.1 * mass_threshold()).sqrt();
        let field = TorusField::constant(4, Complex64::new(c, 0.0));
        assert!(!s_gamma_member(&field, 0.01, 3).unwrap());
    }

    #[test]
    fn qm_estimate_examples() {
        let e2 = qm_estimates_check(0.01, 0.0, Some(2.0)).unwrap();
        let ratio = e2.computed / e2.predicted;
        assert!((0.99..=1.01).contains(&ratio), "r=2 ratio {ratio}");

        let e6 = qm_estimates_check(0.01, 0.1, Some(6.0)).unwrap();
        let ratio = e6.computed / e6.predicted;
        assert!((0.97..=1.03).contains(&ratio), "r=6 ratio {ratio}");

        let grad = qm_estimates_check(0.01, 0.1, None).unwrap();
        assert!(grad.computed <= grad.predicted);
    }

    #[test]
    fn blowup_exponent_values() {
        assert_eq!(density_blowup_exponent(1.0, 0.0).unwrap(), 0.0);

        let v = density_blowup_exponent(1.1, 0.01).unwrap();
        let factor = v / (0.5 * constants().grad_sq);
        assert!((factor - 0.0457).abs() < 5e-4, "factor {factor}");
        assert!(v > 0.0);

        assert!(density_blowup_exponent(2.0, 0.1).unwrap() > 0.0);
    }

    #[test]
    fn blowup_exponent_sign_structure() {
        // For p > 1 some tested eps gives a positive factor; at p = 1 none does.
        for &p in &[1.01, 1.1, 2.0, 5.0] {
            assert!([0.001, 0.01, 0.1]
                .iter()
                .any(|&e| density_blowup_exponent(p, e).unwrap() > 0.0));
        }
        for &e in &[0.001, 0.01, 0.1] {
            assert!(density_blowup_exponent(1.0, e).unwrap() <= 0.0);
        }
    }
}
