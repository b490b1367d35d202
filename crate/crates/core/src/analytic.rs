//! Closed-form perturbative functions `f_gra`, `f_dec`, the first-order
//! negativity and the entanglement-time solvers.
//!
//! Both functions depend on `lambda` only through `w = 4 lambda tau^2`:
//!
//! ```text
//! f_dec   = a + b
//! f_gra^2 = a^2 + b^2 + tau^4 g1(w) / 2
//! a = tau^3 g0(w),  b = tau g2(w) / 4
//! g0 = (x - sin x) / x^3
//! g1 = ((1 - cos x)(3 - cos x) - x^2) / x^4
//! g2 = 1 + sin x / x,     x^2 = w
//! ```
//!
//! The kernels are entire in `w`, so `lambda < 0` (hyperbolic) and
//! `lambda = 0` need no special casing beyond switching to a power series
//! for small `|w|`.

use serde::{Deserialize, Serialize};

use crate::entanglement;
use crate::error::{require_finite, require_non_negative, require_positive, Error, Result};
use crate::model::SystemParams;

/// Prefactor of the first-order negativity `3 (eta f_gra - mu f_dec)`.
pub const PERTURBATIVE_COEFFICIENT: f64 = 3.0;

/// Largest dimensionless time probed by [`tau_ent_numeric`].
pub const NUMERIC_TAU_MAX: f64 = 60.0;
const NUMERIC_TAU_START: f64 = 1e-3;
const NUMERIC_REL_TOL: f64 = 1e-6;

const SERIES_TERMS: usize = 24;

fn series(w: f64, coefficient: impl Fn(usize) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut power = 1.0;
    for k in 0..SERIES_TERMS {
        sum += coefficient(k) * power;
        power *= -w;
    }
    sum
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `(g0, g1, g2)` at `w = x^2`.
fn kernels(w: f64) -> (f64, f64, f64) {
    if w.abs() < 1.0 {
        let g0 = series(w, |k| 1.0 / factorial(2 * k + 3));
        let g1 = series(w, |j| (4f64.powi(j as i32 + 2) / 2.0 - 4.0) / factorial(2 * j + 4));
        let g2 = 1.0 + series(w, |k| 1.0 / factorial(2 * k + 1));
        (g0, g1, g2)
    } else if w > 0.0 {
        let x = w.sqrt();
        let (s, c) = x.sin_cos();
        (
            (x - s) / (x * w),
            ((1.0 - c) * (3.0 - c) - w) / (w * w),
            1.0 + s / x,
        )
    } else {
        let y = (-w).sqrt();
        let (s, c) = (y.sinh(), y.cosh());
        (
            (s - y) / (y * -w),
            ((1.0 - c) * (3.0 - c) - w) / (w * w),
            1.0 + s / y,
        )
    }
}

fn finite_or_overflow(v: f64, tau: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow { tau })
    }
}

/// `(f_gra, f_dec)` for any real `lambda`, including zero.
pub fn f_pair(lambda: f64, tau: f64) -> Result<(f64, f64)> {
    require_finite("lambda", lambda)?;
    require_non_negative("tau", tau)?;
    let (g0, g1, g2) = kernels(4.0 * lambda * tau * tau);
    let a = tau.powi(3) * g0;
    let b = tau * g2 / 4.0;
    let f_dec = finite_or_overflow(a + b, tau)?;
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        return Ok((0.0, f_dec));
    }
    let t2 = tau * tau / scale;
    let inner = (a / scale).powi(2) + (b / scale).powi(2) + t2 * t2 * g1 / 2.0;
    let f_gra = finite_or_overflow(scale * inner.max(0.0).sqrt(), tau)?;
    Ok((f_gra, f_dec))
}

fn require_nonzero_lambda(function: &'static str, lambda: f64) -> Result<()> {
    if lambda == 0.0 {
        Err(Error::Domain { function, lambda })
    } else {
        Ok(())
    }
}

pub fn f_gra_full(lambda: f64, tau: f64) -> Result<f64> {
    require_nonzero_lambda("f_gra_full", lambda)?;
    f_pair(lambda, tau).map(|p| p.0)
}

pub fn f_dec_full(lambda: f64, tau: f64) -> Result<f64> {
    require_nonzero_lambda("f_dec_full", lambda)?;
    f_pair(lambda, tau).map(|p| p.1)
}

/// `lambda = 0`: `f_gra = sqrt(tau^2/4 + tau^4/12 + tau^6/36)`,
/// `f_dec = tau/2 + tau^3/6`.
pub fn f_free(tau: f64) -> Result<(f64, f64)> {
    f_pair(0.0, tau)
}

/// Direct transcription of the trigonometric expressions, continued to
/// `lambda < 0` through `cos -> cosh`, `sqrt(lambda) sin -> -sqrt|lambda| sinh`.
/// Suffers cancellation for small `|lambda| tau^2`; kept as a cross-check.
pub fn f_gra_literal(lambda: f64, tau: f64) -> Result<f64> {
    require_nonzero_lambda("f_gra_literal", lambda)?;
    require_non_negative("tau", tau)?;
    let r = lambda.abs().sqrt();
    let y = 2.0 * r * tau;
    let (cos1, cos2, root_sin) = if lambda > 0.0 {
        (y.cos(), (2.0 * y).cos(), r * y.sin())
    } else {
        (y.cosh(), (2.0 * y).cosh(), -r * y.sinh())
    };
    let l1 = lambda - 1.0;
    let c1 = 1.0 + lambda * (lambda + 8.0 * l1 * l1 * tau * tau + 14.0);
    let c2 = -16.0 * lambda;
    let c3 = 8.0 * (lambda * lambda - 1.0) * tau;
    let c4 = -l1 * l1;
    let bracket = c1 + c2 * cos1 + c3 * root_sin + c4 * cos2;
    finite_or_overflow((bracket / (128.0 * lambda.powi(3))).max(0.0).sqrt(), tau)
}

/// Literal `f_dec = [2 sqrt(l)(l + 1) tau + (l - 1) sin(2 sqrt(l) tau)] / (8 l^{3/2})`.
pub fn f_dec_literal(lambda: f64, tau: f64) -> Result<f64> {
    require_nonzero_lambda("f_dec_literal", lambda)?;
    require_non_negative("tau", tau)?;
    let r = lambda.abs().sqrt();
    let y = 2.0 * r * tau;
    let v = if lambda > 0.0 {
        (2.0 * r * (lambda + 1.0) * tau + (lambda - 1.0) * y.sin()) / (8.0 * r.powi(3))
    } else {
        (2.0 * r * (lambda + 1.0) * tau + (lambda - 1.0) * y.sinh()) / (-8.0 * r.powi(3))
    };
    finite_or_overflow(v, tau)
}

/// `(f_gra, f_dec)` for an inverted potential (`lambda = -1`) released from
/// a trap `chi` times stiffer in frequency.
pub fn f_inverted_chi(chi: f64, tau: f64) -> Result<(f64, f64)> {
    require_positive("chi", chi)?;
    require_non_negative("tau", tau)?;
    let c2 = chi * chi;
    let (s2, sh) = ((2.0 * tau).sinh(), tau.sinh());
    let a = (c2 + 1.0) * 2.0 * tau - (c2 - 1.0) * s2;
    let b = 4.0 * chi * sh * sh;
    let f_gra = a.hypot(b) / (8.0 * chi);
    let f_dec = ((c2 + 1.0) * s2 - 2.0 * (c2 - 1.0) * tau) / (8.0 * chi);
    Ok((finite_or_overflow(f_gra, tau)?, finite_or_overflow(f_dec, tau)?))
}

/// `f_gra` and `f_dec` for a common spring constant and trap ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbativeCurve {
    pub lambda: f64,
    pub chi: f64,
}

impl PerturbativeCurve {
    pub fn new(lambda: f64, chi: f64) -> Result<Self> {
        require_finite("lambda", lambda)?;
        require_positive("chi", chi)?;
        if chi != 1.0 && lambda != -1.0 {
            return Err(Error::Unsupported(format!(
                "closed form for chi = {chi} exists only at lambda = -1 (got {lambda})"
            )));
        }
        Ok(Self { lambda, chi })
    }

    pub fn for_params(s: &SystemParams) -> Result<Self> {
        if s.lambda1 != s.lambda2 {
            return Err(Error::Unsupported(format!(
                "perturbative curve needs lambda1 = lambda2 (got {}, {})",
                s.lambda1, s.lambda2
            )));
        }
        Self::new(s.lambda1, s.chi)
    }

    pub fn evaluate(&self, tau: f64) -> Result<(f64, f64)> {
        if self.chi == 1.0 {
            f_pair(self.lambda, tau)
        } else {
            f_inverted_chi(self.chi, tau)
        }
    }

    pub fn f_gra(&self, tau: f64) -> Result<f64> {
        self.evaluate(tau).map(|p| p.0)
    }

    pub fn f_dec(&self, tau: f64) -> Result<f64> {
        self.evaluate(tau).map(|p| p.1)
    }
}

/// `eta f_gra - mu f_dec`: the first-order shift `1/2 - nu~_min`.
pub fn first_order_shift(s: &SystemParams, tau: f64) -> Result<f64> {
    let (g, d) = PerturbativeCurve::for_params(s)?.evaluate(tau)?;
    Ok(s.eta * g - s.mu * d)
}

/// `max(0, 3 (eta f_gra - mu f_dec))`.
pub fn negativity_perturbative(s: &SystemParams, tau: f64) -> Result<f64> {
    Ok((PERTURBATIVE_COEFFICIENT * first_order_shift(s, tau)?).max(0.0))
}

/// `max(0, -log2(1 - 2 (eta f_gra - mu f_dec)))`: the negativity of the
/// first-order eigenvalue without linearising the logarithm.
pub fn negativity_first_order(s: &SystemParams, tau: f64) -> Result<f64> {
    let shift = first_order_shift(s, tau)?;
    let arg = 1.0 - 2.0 * shift;
    if arg <= 0.0 {
        return Err(Error::InvalidState(format!(
            "first-order eigenvalue shift {shift:e} exceeds 1/2"
        )));
    }
    Ok((-arg.log2()).max(0.0))
}

/// Entanglement time in seconds from the long-time asymptotes:
/// `tau^3/6` for `lambda = 0`, `(chi^2 + 1) e^{2 tau} / (16 chi)` for
/// `lambda = -1`. With decoherence the coupling is replaced by `eta - mu`,
/// which stretches the free case by `(eta/(eta - mu))^{1/3}` and delays the
/// inverted case by `ln(eta/(eta - mu))/2`.
pub fn tau_ent(s: &SystemParams, target_en: f64, include_decoherence: bool) -> Result<f64> {
    require_positive("target_en", target_en)?;
    let curve = PerturbativeCurve::for_params(s)?;
    let coupling = if include_decoherence { s.eta - s.mu } else { s.eta };
    if coupling <= 0.0 {
        return Err(Error::NoEntanglement { eta: s.eta, mu: s.mu });
    }
    let f_target = target_en / (PERTURBATIVE_COEFFICIENT * coupling);
    let tau = if curve.lambda == 0.0 {
        (6.0 * f_target).cbrt()
    } else if curve.lambda == -1.0 {
        let chi = curve.chi;
        0.5 * (16.0 * chi * f_target / (chi * chi + 1.0)).ln()
    } else {
        return Err(Error::Unsupported(format!(
            "asymptotic entanglement time needs lambda in {{0, -1}} (got {})",
            curve.lambda
        )));
    };
    if !(tau > 0.0) {
        return Err(Error::invalid(
            "target_en",
            format!("{target_en:e} lies below the long-time regime"),
        ));
    }
    Ok(s.seconds(tau))
}

fn numeric_en(s: &SystemParams, tau: f64) -> Result<f64> {
    entanglement::negativity_at(s, tau).map(|r| r.log_negativity)
}

/// First time (seconds) at which the exactly propagated negativity reaches
/// `target_en`. Brackets by doubling from `tau = 1e-3` up to `tau = 60`,
/// then bisects to relative `1e-6`. An earlier crossing skipped by the
/// doubling grid is not searched for.
pub fn tau_ent_numeric(s: &SystemParams, target_en: f64) -> Result<f64> {
    require_positive("target_en", target_en)?;
    s.validate()?;
    let mut lo = 0.0;
    let mut hi = NUMERIC_TAU_START;
    let mut max_reached = 0.0f64;
    loop {
        let en = numeric_en(s, hi)?;
        max_reached = max_reached.max(en);
        if en >= target_en {
            break;
        }
        if hi >= NUMERIC_TAU_MAX {
            return Err(Error::NoCrossing {
                target: target_en,
                tau_max: NUMERIC_TAU_MAX,
                max_reached,
            });
        }
        lo = hi;
        hi = (2.0 * hi).min(NUMERIC_TAU_MAX);
    }
    for _ in 0..200 {
        if hi - lo <= NUMERIC_REL_TOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if numeric_en(s, mid)? >= target_en {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(s.seconds(hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kernel_branches_join() {
        for w in [1.0 - 1e-12, -1.0 + 1e-12] {
            let inside = kernels(w);
            let outside = kernels(w + w.signum() * 2e-12);
            assert_relative_eq!(inside.0, outside.0, max_relative = 1e-10);
            assert_relative_eq!(inside.1, outside.1, max_relative = 1e-8);
            assert_relative_eq!(inside.2, outside.2, max_relative = 1e-10);
        }
        let (g0, g1, g2) = kernels(0.0);
        assert_eq!((g0, g1, g2), (1.0 / 6.0, 1.0 / 6.0, 2.0));
    }

    #[test]
    fn literal_forms_agree() {
        for lambda in [-1.5, -1.0, -0.3, 0.4, 1.0, 2.0] {
            for tau in [0.7, 2.0, 5.0] {
                assert_relative_eq!(
                    f_gra_full(lambda, tau).unwrap(),
                    f_gra_literal(lambda, tau).unwrap(),
                    max_relative = 1e-8
                );
                assert_relative_eq!(
                    f_dec_full(lambda, tau).unwrap(),
                    f_dec_literal(lambda, tau).unwrap(),
                    max_relative = 1e-10
                );
            }
        }
    }

    #[test]
    fn harmonic_unit_frequency() {
        for tau in [0.1, 1.0, 3.0, 40.0] {
            assert_relative_eq!(f_dec_full(1.0, tau).unwrap(), tau / 2.0, max_relative = 1e-13);
            assert!((f_gra_full(1.0, tau).unwrap() - tau.sin().abs() / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn inverted_values() {
        let f = f_gra_full(-1.0, 13.0).unwrap();
        assert_relative_eq!(f, 0.5 * (169.0 + 13f64.sinh().powi(4)).sqrt(), max_relative = 1e-12);
        assert_relative_eq!(f * 8.0 * (-26f64).exp(), 1.0, max_relative = 1e-3);
        assert!((f_gra_full(-1.0, 1e-4).unwrap() - 5e-5).abs() < 1e-8);
    }

    #[test]
    fn free_limit() {
        // the lambda dependence is O(lambda tau^2), so compare at tau <= 1
        for tau in [1e-3, 0.5, 1.0] {
            let (g, d) = f_free(tau).unwrap();
            for lambda in [1e-6, -1e-6] {
                assert_relative_eq!(f_gra_full(lambda, tau).unwrap(), g, max_relative = 1e-6);
                assert_relative_eq!(f_dec_full(lambda, tau).unwrap(), d, max_relative = 1e-6);
            }
        }
        let (g, d) = f_free(4197.0).unwrap();
        assert_relative_eq!(g, 4197f64.powi(3) / 6.0, max_relative = 1e-6);
        assert_relative_eq!(g, d, max_relative = 1e-6);
        assert!(matches!(f_gra_full(0.0, 1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn chi_form() {
        for tau in [0.3, 5.0, 12.0] {
            let (g, d) = f_inverted_chi(1.0, tau).unwrap();
            assert_relative_eq!(g, f_gra_full(-1.0, tau).unwrap(), max_relative = 1e-10);
            assert_relative_eq!(d, f_dec_full(-1.0, tau).unwrap(), max_relative = 1e-10);
        }
        let (g, d) = f_inverted_chi(100.0, 10.0).unwrap();
        let asym = 100.0 * 20f64.exp() / 16.0;
        assert_relative_eq!(g, asym, max_relative = 1e-2);
        assert_relative_eq!(d, asym, max_relative = 1e-2);
    }

    #[test]
    fn perturbative_negativity() {
        let s = SystemParams::symmetric(1000.0, -1.0, 1e-12, 5e-13).unwrap();
        let en = negativity_perturbative(&s, 13.0).unwrap();
        assert_relative_eq!(en, 3.0 * 5e-13 * 26f64.exp() / 8.0, max_relative = 1e-3);
        let zero = SystemParams::symmetric(1000.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(negativity_perturbative(&zero, 5.0).unwrap(), 0.0);
        let bad = SystemParams::new(1000.0, -1.0, 0.0, 1e-12, 0.0, 1.0).unwrap();
        assert!(matches!(negativity_perturbative(&bad, 1.0), Err(Error::Unsupported(_))));
        let bad = SystemParams::new(1000.0, 0.0, 0.0, 1e-12, 0.0, 3.0).unwrap();
        assert!(matches!(negativity_perturbative(&bad, 1.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn entanglement_time_asymptotes() {
        let free = SystemParams::symmetric(1000.0, 0.0, 2.7e-13, 0.0).unwrap();
        assert_relative_eq!(tau_ent(&free, 1e-2, false).unwrap(), 4.2, max_relative = 3e-2);
        let inv = SystemParams::symmetric(1000.0, -1.0, 2.7e-13, 0.0).unwrap();
        assert_relative_eq!(tau_ent(&inv, 1e-2, false).unwrap(), 1.3e-2, max_relative = 3e-2);

        let noisy = SystemParams::symmetric(1000.0, -1.0, 2.7e-13, 1.35e-13).unwrap();
        let delay = tau_ent(&noisy, 1e-2, true).unwrap() - tau_ent(&noisy, 1e-2, false).unwrap();
        assert_relative_eq!(delay, 2f64.ln() / 2000.0, max_relative = 1e-9);
        let noisy_free = SystemParams::symmetric(1000.0, 0.0, 2.7e-13, 1.35e-13).unwrap();
        let ratio = tau_ent(&noisy_free, 1e-2, true).unwrap() / tau_ent(&noisy_free, 1e-2, false).unwrap();
        assert_relative_eq!(ratio, 2f64.cbrt(), max_relative = 1e-12);

        let dead = SystemParams::symmetric(1000.0, -1.0, 1e-13, 1e-13).unwrap();
        assert!(matches!(tau_ent(&dead, 1e-2, true), Err(Error::NoEntanglement { .. })));
    }

    #[test]
    fn numeric_entanglement_time() {
        let inv = SystemParams::symmetric(1000.0, -1.0, 2.7e-13, 0.0).unwrap();
        let t = tau_ent_numeric(&inv, 1e-2).unwrap();
        assert_relative_eq!(t, 1.3e-2, max_relative = 3e-2);

        let osc = SystemParams::symmetric(1000.0, 1.0, 1e-12, 0.0).unwrap();
        match tau_ent_numeric(&osc, 1e-2) {
            Err(Error::NoCrossing { max_reached, .. }) => assert!(max_reached < 1.5e-12 * 3.0),
            other => panic!("expected no crossing, got {other:?}"),
        }

        // resolution of nu near 1/2 is one ulp, so tiny targets are met at
        // the first resolvable eigenvalue shift
        let tiny = tau_ent_numeric(&inv, 1e-30).unwrap();
        assert!(tiny < 1e-4);
        assert!(tau_ent_numeric(&inv, 1e-10).unwrap() < t);
    }
}
