//! The stretched-exponential Young function family
//! `F(x) = (G(|x|) - G(e^{1-alpha}))_+` with `G(x) = x e^{q |log x|^alpha}`,
//! its Legendre conjugate, Luxemburg norms over weighted samples, and the
//! tail-bound constants.
//!
//! `G` overflows `f64` long before the conjugate's maximiser does, so every
//! evaluation is carried in log space (`log G = log x + q |log x|^alpha`) and
//! exponentiated as late as possible. Values above the floating-point range
//! surface as `+inf`, which is safe inside the Luxemburg bisection: it only
//! pushes the norm bracket upward.

use crate::error::{Error, Result};

/// The `(alpha, q)` pair selecting one member of the family.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct YoungParams {
    pub alpha: f64,
    pub q: f64,
}

impl YoungParams {
    pub fn new(alpha: f64, q: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                detail: format!("need 0 < alpha < 1, got {alpha}"),
            });
        }
        if q <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "q",
                detail: format!("need q > 0, got {q}"),
            });
        }
        Ok(YoungParams { alpha, q })
    }

    /// `log G(e^t) = t + q |t|^alpha`.
    fn log_g(&self, t: f64) -> f64 {
        t + self.q * t.abs().powf(self.alpha)
    }

    /// Clamp level `G(e^{1-alpha})`.
    fn g_clamp(&self) -> f64 {
        self.log_g(1.0 - self.alpha).exp()
    }

    /// `log G'(e^t) = q t^alpha + log(1 + q alpha t^{alpha-1})` for `t > 0`.
    fn log_g_prime(&self, t: f64) -> f64 {
        self.q * t.powf(self.alpha)
            + (self.q * self.alpha * t.powf(self.alpha - 1.0)).ln_1p()
    }

    /// `y_{alpha,q} = e^{q(1-alpha)^alpha} (1 + q alpha (1-alpha)^{alpha-1})`,
    /// the value of `G'` at the clamp edge; always at least 1.
    pub fn y_threshold(&self) -> f64 {
        self.log_g_prime(1.0 - self.alpha).exp()
    }

    /// `c_{alpha,q} = 1 + q^{-1/alpha}`, the exponent constant of the
    /// conjugate upper bound.
    pub fn c_alpha_q(&self) -> f64 {
        1.0 + self.q.powf(-1.0 / self.alpha)
    }

    /// The proof's intermediate constant
    /// `c = q + log(1 + q alpha (1-alpha)^{alpha-1}) (1-alpha)^{-alpha}`,
    /// distinct from `c_{alpha,q}` and exposed under its own name.
    pub fn intermediate_c(&self) -> f64 {
        let a = self.alpha;
        self.q
            + (self.q * a * (1.0 - a).powf(a - 1.0)).ln_1p() * (1.0 - a).powf(-a)
    }
}

/// `F(x)`: even, zero on the clamp region `|x| <= e^{1-alpha}`, and
/// `G(|x|) - G(e^{1-alpha})` beyond. Returns `+inf` past the f64 range.
pub fn young_eval(params: &YoungParams, x: f64) -> f64 {
    let ax = x.abs();
    if ax == 0.0 {
        return 0.0;
    }
    let lg = params.log_g(ax.ln());
    if lg > 709.0 {
        return f64::INFINITY;
    }
    (lg.exp() - params.g_clamp()).max(0.0)
}

/// `log F*(y)` for `y > 0`, exact in the linear region `y <= y_{alpha,q}`
/// (where `F*(y) = y e^{1-alpha}`) and computed by monotone bisection of the
/// stationarity condition `G'(x) = y` on the concave branch otherwise.
pub fn log_conjugate(params: &YoungParams, y: f64) -> f64 {
    let y = y.abs();
    if y == 0.0 {
        return f64::NEG_INFINITY;
    }
    let log_linear = y.ln() + (1.0 - params.alpha);
    if y <= params.y_threshold() {
        return log_linear;
    }
    let ln_y = y.ln();
    // At the interior maximiser q t^alpha <= log y, so t is bracketed by
    // [1-alpha, (log y / q)^{1/alpha}].
    let mut lo = 1.0 - params.alpha;
    let mut hi = (ln_y / params.q).powf(1.0 / params.alpha).max(lo + 1.0);
    while params.log_g_prime(hi) < ln_y {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if params.log_g_prime(mid) < ln_y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.max(1.0) {
            break;
        }
    }
    let t = 0.5 * (lo + hi);
    // h(t) = e^t (y - e^{q t^alpha}) + G(e^{1-alpha}); the ratio is formed in
    // log space because e^t alone overflows long before the gap does.
    let gap = y - (params.log_g(t) - t).exp();
    let log_interior = if gap > 0.0 {
        let main = t + gap.ln();
        log_sum_exp(main, params.g_clamp().ln())
    } else {
        f64::NEG_INFINITY
    };
    log_linear.max(log_interior)
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `F*(y) = sup_x (xy - F(x))`; `+inf` when the value exceeds the f64 range.
pub fn conjugate_eval(params: &YoungParams, y: f64) -> f64 {
    let lv = log_conjugate(params, y);
    if lv == f64::NEG_INFINITY {
        0.0
    } else if lv > 709.0 {
        f64::INFINITY
    } else {
        lv.exp()
    }
}

/// The bound `F*(y) <= e^{c_{alpha,q} (log y)^{1/alpha}}`, valid for
/// `y >= y_{alpha,q}`. Rejects smaller `y`.
pub fn conjugate_upper_bound(params: &YoungParams, y: f64) -> Result<f64> {
    Ok(log_conjugate_upper_bound(params, y)?.exp())
}

/// Log of the bound above, usable far beyond the f64 value range.
pub fn log_conjugate_upper_bound(params: &YoungParams, y: f64) -> Result<f64> {
    let threshold = params.y_threshold();
    if y < threshold {
        return Err(Error::BelowConjugateThreshold { y, threshold });
    }
    Ok(params.c_alpha_q() * y.ln().powf(1.0 / params.alpha))
}

/// `(F*)^{-1}(z)`: the level `y` with `F*(y) = z`, by monotone inversion.
pub fn conjugate_inverse(params: &YoungParams, z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    let y_th = params.y_threshold();
    let linear_top = y_th * (1.0 - params.alpha).exp();
    if z <= linear_top {
        // Exact linear region: F*(y) = y e^{1-alpha}.
        return z * (-(1.0 - params.alpha)).exp();
    }
    let target = z.ln();
    let mut lo = y_th.ln();
    let mut hi = lo.max(0.0) + 1.0;
    while log_conjugate(params, hi.exp()) < target {
        hi += 1.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if log_conjugate(params, mid.exp()) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi.abs().max(1.0) {
            break;
        }
    }
    (0.5 * (lo + hi)).exp()
}

/// Orlicz norm of the indicator of an event of probability `p_hat` under the
/// conjugate Young function: `1 / (F*)^{-1}(1 / p_hat)`.
pub fn indicator_tail_norm(params: &YoungParams, p_hat: f64) -> f64 {
    if p_hat <= 0.0 {
        return 0.0;
    }
    1.0 / conjugate_inverse(params, 1.0 / p_hat)
}

/// Decay rate and onset of the Orlicz tail bound: returns
/// `c = (4 c_{alpha,q})^{-alpha}` together with the threshold `M_0` solving
/// `c_s exp(c_{alpha,q} (log y_{alpha,q})^{1/alpha} - M_0^2/4) = 1`.
pub fn tail_bound_constants(params: &YoungParams, c_s: f64) -> Result<(f64, f64)> {
    if c_s <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "c_s",
            detail: format!("need c_s > 0, got {c_s}"),
        });
    }
    let c = (4.0 * params.c_alpha_q()).powf(-params.alpha);
    let ln_y = params.y_threshold().ln();
    let arg = c_s.ln() + params.c_alpha_q() * ln_y.powf(1.0 / params.alpha);
    let m0 = if arg > 0.0 { 2.0 * arg.sqrt() } else { 0.0 };
    Ok((c, m0))
}

/// Which side of the conjugate pair a Luxemburg norm is taken in.
#[derive(Debug, Clone, Copy)]
pub enum YoungFn {
    Primal(YoungParams),
    Conjugate(YoungParams),
}

impl YoungFn {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            YoungFn::Primal(p) => young_eval(p, x),
            YoungFn::Conjugate(p) => conjugate_eval(p, x),
        }
    }
}

/// A certified Luxemburg-norm evaluation.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct OrliczNormEstimate {
    pub value: f64,
    /// Bisection bracket: the weighted integral exceeds 1 at `lower` and is
    /// at most 1 at `upper`.
    pub lower: f64,
    pub upper: f64,
    pub sample_count: usize,
}

const LUX_REL_TOL: f64 = 1e-8;
const LUX_MAX_ITERS: usize = 200;

/// Luxemburg norm `inf { c > 0 : sum_i w_i Psi(v_i / c) <= 1 }` over a
/// weighted empirical measure with nonnegative weights of total mass 1.
///
/// The integrand is monotone in `c`, so the returned bracket is certified.
pub fn luxemburg_norm(psi: YoungFn, samples: &[(f64, f64)]) -> Result<OrliczNormEstimate> {
    let mut total = 0.0;
    for (_, w) in samples {
        if *w < 0.0 || !w.is_finite() {
            return Err(Error::InvalidParameter {
                name: "weight",
                detail: format!("weights must be finite and nonnegative, got {w}"),
            });
        }
        total += w;
    }
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidParameter {
            name: "weights",
            detail: format!("weights must sum to 1 (self-normalized), got {total}"),
        });
    }
    let sup = samples
        .iter()
        .filter(|(_, w)| *w > 0.0)
        .map(|(v, _)| v.abs())
        .fold(0.0, f64::max);
    if sup == 0.0 {
        return Ok(OrliczNormEstimate {
            value: 0.0,
            lower: 0.0,
            upper: 0.0,
            sample_count: samples.len(),
        });
    }
    let integral = |c: f64| -> f64 {
        samples
            .iter()
            .map(|(v, w)| {
                if *w == 0.0 {
                    0.0
                } else {
                    w * psi.eval(v.abs() / c)
                }
            })
            .sum()
    };
    // Grow the upper end until the integral drops to 1 or below; every Young
    // function here vanishes on its clamp region, so this terminates fast.
    let mut hi = sup;
    while integral(hi) > 1.0 {
        hi *= 2.0;
    }
    // Shrink the lower end until the integral exceeds 1.
    let mut lo = 0.5 * hi;
    while integral(lo) <= 1.0 {
        hi = lo;
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE * 1e10 {
            break;
        }
    }
    for _ in 0..LUX_MAX_ITERS {
        if hi - lo <= LUX_REL_TOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if integral(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(OrliczNormEstimate {
        value: 0.5 * (lo + hi),
        lower: lo,
        upper: hi,
        sample_count: samples.len(),
    })
}

/// Both sides of the Orlicz-Hoelder inequality
/// `int |fg| dnu <= 2 ||f||_{F(L)} ||g||_{F*(L)}` on a finite probability
/// space; callers assert `lhs <= rhs`.
pub fn holder_check(
    f: &[f64],
    g: &[f64],
    weights: &[f64],
    params: &YoungParams,
) -> Result<(f64, f64)> {
    if f.len() != g.len() || f.len() != weights.len() {
        return Err(Error::InvalidParameter {
            name: "samples",
            detail: "f, g and weights must share one probability space".into(),
        });
    }
    let lhs: f64 = f
        .iter()
        .zip(g)
        .zip(weights)
        .map(|((a, b), w)| w * (a * b).abs())
        .sum();
    let fs: Vec<(f64, f64)> = f.iter().copied().zip(weights.iter().copied()).collect();
    let gs: Vec<(f64, f64)> = g.iter().copied().zip(weights.iter().copied()).collect();
    let nf = luxemburg_norm(YoungFn::Primal(*params), &fs)?;
    let ng = luxemburg_norm(YoungFn::Conjugate(*params), &gs)?;
    Ok((lhs, 2.0 * nf.upper * ng.upper))
}

/// `F**(x)` by golden-section maximisation of the concave map
/// `y -> xy - F*(y)`; agrees with `F` because `F` is convex and closed.
pub fn biconjugate_eval(params: &YoungParams, x: f64) -> f64 {
    let x = x.abs();
    // The maximiser is a subgradient of F at x, bounded by G'(x) past the
    // clamp region and by y_threshold inside it.
    let t = x.ln().max(1.0 - params.alpha);
    let mut hi = 2.0 * (params.y_threshold() + params.log_g_prime(t).exp()) + 10.0;
    let mut lo = 0.0;
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let objective = |y: f64| x * y - conjugate_eval(params, y);
    let mut a = hi - phi * (hi - lo);
    let mut b = lo + phi * (hi - lo);
    let mut fa = objective(a);
    let mut fb = objective(b);
    for _ in 0..120 {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = objective(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = objective(b);
        }
    }
    objective(0.5 * (lo + hi)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn params(alpha: f64, q: f64) -> YoungParams {
        YoungParams::new(alpha, q).unwrap()
    }

    #[test]
    fn young_basics() {
        let p = params(0.5, 0.1);
        assert_eq!(young_eval(&p, 0.0), 0.0);
        assert_eq!(young_eval(&p, 1.0), 0.0); // e^{1/2} > 1: clamp region
        assert_eq!(young_eval(&p, -1.0), 0.0);
        for x in [0.1, 0.5, 1.0, 1.6] {
            assert_eq!(young_eval(&p, x), 0.0, "x={x} inside clamp");
        }
        let x = std::f64::consts::E.powi(2);
        let expected = x * (0.1 * 2f64.sqrt()).exp()
            - std::f64::consts::E.sqrt() * (0.1 * 0.5f64.sqrt()).exp();
        assert_relative_eq!(young_eval(&p, x), expected, max_relative = 1e-13);
    }

    #[test]
    fn young_even_and_monotone() {
        let p = params(0.3, 1.0);
        let mut prev = 0.0;
        for i in 0..400 {
            let x = i as f64 * 0.25;
            assert_eq!(young_eval(&p, x), young_eval(&p, -x));
            let v = young_eval(&p, x);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn young_superlinear() {
        for p in [params(0.3, 1.0), params(0.5, 0.05)] {
            let ratios: Vec<f64> = (1..=6)
                .map(|k| {
                    let x = 10f64.powi(k);
                    young_eval(&p, x) / x
                })
                .collect();
            for w in ratios.windows(2) {
                assert!(w[1] > w[0], "F(x)/x not increasing: {ratios:?}");
            }
        }
    }

    #[test]
    fn midpoint_convexity() {
        let mut rng = crate::rng::stream(7, 0);
        for p in [params(0.3, 1.0), params(0.5, 0.05)] {
            for _ in 0..10_000 {
                let x = rng.gen_range(-1e3..1e3);
                let y = rng.gen_range(-1e3..1e3);
                let mid = young_eval(&p, 0.5 * (x + y));
                let avg = 0.5 * (young_eval(&p, x) + young_eval(&p, y));
                assert!(mid <= avg + 1e-12 * (1.0 + avg.abs()));
            }
        }
    }

    #[test]
    fn y_threshold_values() {
        let p = params(0.5, 0.1);
        let expected = (0.1 * 0.5f64.sqrt()).exp() * (1.0 + 0.05 * 2f64.sqrt());
        assert_relative_eq!(p.y_threshold(), expected, max_relative = 1e-14);
        assert!((p.y_threshold() - 1.1492).abs() < 5e-4);

        // q -> 0 limit is 1, and the threshold never dips below 1.
        assert!((params(0.5, 1e-12).y_threshold() - 1.0).abs() < 1e-10);
        for alpha in [0.1, 0.3, 0.5, 0.7, 0.9] {
            for q in [0.01, 0.1, 1.0, 10.0] {
                assert!(params(alpha, q).y_threshold() >= 1.0);
            }
        }
    }

    #[test]
    fn conjugate_zero_and_linear_region() {
        let p = params(0.5, 0.1);
        assert_eq!(conjugate_eval(&p, 0.0), 0.0);
        for y in [1e-6, 0.01, 0.5, 1.0, p.y_threshold()] {
            let expect = y * (0.5f64).exp();
            assert_relative_eq!(conjugate_eval(&p, y), expect, max_relative = 1e-12);
        }
        // Beyond the threshold the conjugate strictly dominates the linear bound.
        let y = 3.0;
        assert!(conjugate_eval(&p, y) > y * (0.5f64).exp());
    }

    #[test]
    fn conjugate_matches_log_grid_search() {
        // Brute-force oracle over 10^6 log-spaced points; compared in log
        // space since the value overflows f64 for these parameters.
        let p = params(0.5, 0.1);
        let y: f64 = 10.0;
        let t_hi = (y.ln() / p.q).powf(1.0 / p.alpha) * 1.5;
        let mut best = f64::NEG_INFINITY;
        let n = 1_000_000;
        for i in 0..=n {
            let t = (1.0 - p.alpha) + (t_hi - (1.0 - p.alpha)) * i as f64 / n as f64;
            let gap = y - (p.log_g(t) - t).exp();
            if gap > 0.0 {
                best = best.max(t + gap.ln());
            }
        }
        let ours = log_conjugate(&p, y);
        assert_relative_eq!(ours, best, max_relative = 1e-6);
        assert!(ours >= best - 1e-9);
    }

    #[test]
    fn conjugate_bound_sweep() {
        for p in [params(0.3, 1.0), params(0.5, 0.05)] {
            let y0 = p.y_threshold();
            assert!(conjugate_upper_bound(&p, y0).unwrap() >= conjugate_eval(&p, y0));
            let mut prev_bound = f64::NEG_INFINITY;
            for i in 0..=1000 {
                let y = y0 * (1e6f64 / y0).powf(i as f64 / 1000.0);
                let bound = log_conjugate_upper_bound(&p, y).unwrap();
                assert!(
                    log_conjugate(&p, y) <= bound + 1e-12,
                    "alpha={} q={} y={y}",
                    p.alpha,
                    p.q
                );
                assert!(bound >= prev_bound);
                prev_bound = bound;
            }
        }
        assert!(matches!(
            conjugate_upper_bound(&params(0.5, 0.1), 1.0),
            Err(Error::BelowConjugateThreshold { .. })
        ));
    }

    #[test]
    fn fenchel_young() {
        let mut rng = crate::rng::stream(11, 0);
        for p in [params(0.3, 1.0), params(0.5, 0.05)] {
            for _ in 0..10_000 {
                let x: f64 = rng.gen_range(0.0..1e3);
                let y: f64 = rng.gen_range(0.0..1e3);
                let rhs = young_eval(&p, x) + conjugate_eval(&p, y);
                assert!(
                    x * y <= rhs * (1.0 + 1e-9) + 1e-9,
                    "xy={} rhs={rhs}",
                    x * y
                );
            }
        }
    }

    #[test]
    fn biconjugate_recovers_young() {
        for p in [params(0.3, 1.0), params(0.5, 0.05)] {
            for i in 0..=100 {
                let x = i as f64;
                let f = young_eval(&p, x);
                let ff = biconjugate_eval(&p, x);
                let err = (ff - f).abs() / f.max(1.0);
                assert!(err < 1e-6, "alpha={} x={x}: F={f} F**={ff}", p.alpha);
            }
        }
    }

    #[test]
    fn tail_constants() {
        let p = params(0.5, 0.1);
        let (c, m0) = tail_bound_constants(&p, 2.0).unwrap();
        assert_relative_eq!(c, (4.0 * 101.0f64).powf(-0.5), max_relative = 1e-14);
        assert!((c - 0.04975).abs() < 1e-5);
        // Plugging M0 back into the defining equation gives 1.
        let lhs = 2.0
            * (p.c_alpha_q() * p.y_threshold().ln().powf(2.0) - m0 * m0 / 4.0).exp();
        assert_relative_eq!(lhs, 1.0, max_relative = 1e-12);
        // c decreases as c_{alpha,q} grows.
        let (c_small_q, _) = tail_bound_constants(&params(0.5, 0.05), 2.0).unwrap();
        assert!(c_small_q < c);
    }

    #[test]
    fn luxemburg_zero_and_indicator() {
        let p = params(0.5, 0.1);
        let zero = luxemburg_norm(YoungFn::Conjugate(p), &[(0.0, 0.4), (0.0, 0.6)]).unwrap();
        assert_eq!(zero.value, 0.0);

        for prob in [0.5, 0.1, 0.01] {
            let est = luxemburg_norm(
                YoungFn::Conjugate(p),
                &[(1.0, prob), (0.0, 1.0 - prob)],
            )
            .unwrap();
            let closed = indicator_tail_norm(&p, prob);
            assert_relative_eq!(est.value, closed, max_relative = 1e-6);
            assert!(est.lower <= est.value && est.value <= est.upper);
        }
    }

    #[test]
    fn luxemburg_homogeneous() {
        let p = params(0.5, 0.05);
        let mut rng = crate::rng::stream(3, 1);
        for _ in 0..20 {
            let samples: Vec<(f64, f64)> = (0..16)
                .map(|_| (rng.gen_range(-5.0..5.0), 1.0 / 16.0))
                .collect();
            let doubled: Vec<(f64, f64)> =
                samples.iter().map(|(v, w)| (2.0 * v, *w)).collect();
            let a = luxemburg_norm(YoungFn::Primal(p), &samples).unwrap();
            let b = luxemburg_norm(YoungFn::Primal(p), &doubled).unwrap();
            if a.value > 0.0 {
                assert_relative_eq!(b.value, 2.0 * a.value, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn indicator_norm_monotone_and_consistent() {
        let p = params(0.5, 0.05);
        assert_eq!(indicator_tail_norm(&p, 0.0), 0.0);
        let mut prev = 0.0;
        for i in 1..=50 {
            let prob = i as f64 / 50.0;
            let v = indicator_tail_norm(&p, prob);
            assert!(v >= prev);
            prev = v;
        }
        // p_hat = 1 endpoint equals 1/(F*)^{-1}(1).
        assert_relative_eq!(
            indicator_tail_norm(&p, 1.0),
            1.0 / conjugate_inverse(&p, 1.0),
            max_relative = 1e-12
        );
    }

    #[test]
    fn conjugate_inverse_round_trip() {
        let p = params(0.5, 0.05);
        for z in [0.5, 1.0, 3.0, 10.0, 1e3, 1e6] {
            let y = conjugate_inverse(&p, z);
            let back = conjugate_eval(&p, y);
            assert_relative_eq!(back, z, max_relative = 1e-9);
        }
    }

    #[test]
    fn holder_on_simple_functions() {
        let p = params(0.5, 0.1);
        let (lhs, rhs) = holder_check(&[0.0, 0.0], &[1.0, 2.0], &[0.5, 0.5], &p).unwrap();
        assert_eq!(lhs, 0.0);
        assert!(lhs <= rhs);

        // f = g = indicator of a probability-1/2 event.
        let (lhs, rhs) =
            holder_check(&[1.0, 0.0], &[1.0, 0.0], &[0.5, 0.5], &p).unwrap();
        assert!(lhs <= rhs, "lhs={lhs} rhs={rhs}");

        let mut rng = crate::rng::stream(5, 2);
        for _ in 0..1000 {
            let f: Vec<f64> = (0..16).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let g: Vec<f64> = (0..16).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let raw: Vec<f64> = (0..16).map(|_| rng.gen_range(0.0..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let (lhs, rhs) = holder_check(&f, &g, &w, &p).unwrap();
            assert!(lhs <= rhs * (1.0 + 1e-9), "lhs={lhs} rhs={rhs}");
        }
    }
}
