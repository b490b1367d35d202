//! Reference integrators used to cross-check the exact propagator.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::Matrix4;

use super::PropagatorPlan;
use crate::error::{Error, Result};
use crate::linalg::{self, check_overflow};
use crate::model::CovarianceState;

// Dormand-Prince 5(4) tableau. The system is autonomous, so the nodes are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const MAX_STEPS: usize = 2_000_000;

/// Integrates `d sigma/dt = K sigma + sigma K^T + D` from `initial.time` to
/// `tau` with an adaptive Dormand-Prince 5(4) stepper.
///
/// Error control is relative per entry, with an absolute floor of
/// `1e-6 * tolerance * max|sigma|` so entries passing through zero do not
/// stall the stepper.
pub fn propagate_oracle(plan: &PropagatorPlan, initial: &CovarianceState, tau: f64) -> Result<CovarianceState> {
    let span = plan.check(initial, tau)?;
    let k = plan.drift;
    let d = plan.diffusion;
    let rhs = |s: &Matrix4<f64>| k * s + s * k.transpose() + d;

    let rtol = plan.tolerance;
    let mut t = 0.0;
    let mut y = initial.matrix;
    if span == 0.0 {
        return Ok(CovarianceState::symmetrized(tau, y));
    }
    let mut h = (0.01 * span).min(0.01);
    let mut stages = [Matrix4::<f64>::zeros(); 7];
    stages[0] = rhs(&y);

    for _ in 0..MAX_STEPS {
        if t >= span {
            break;
        }
        let last = t + h >= span;
        if last {
            h = span - t;
        }
        for i in 1..7 {
            let mut acc = y;
            for (j, a) in A[i].iter().enumerate().take(i) {
                if *a != 0.0 {
                    acc += stages[j] * (h * a);
                }
            }
            stages[i] = rhs(&acc);
        }
        let mut y5 = y;
        let mut err = Matrix4::<f64>::zeros();
        for i in 0..7 {
            y5 += stages[i] * (h * B5[i]);
            err += stages[i] * (h * (B5[i] - B4[i]));
        }
        let floor = 1e-6 * rtol * y.amax().max(y5.amax());
        let ratio = err
            .iter()
            .zip(y.iter().zip(y5.iter()))
            .map(|(e, (a, b))| e.abs() / (rtol * a.abs().max(b.abs()) + floor))
            .fold(0.0, f64::max);

        if ratio <= 1.0 {
            t = if last { span } else { t + h };
            y = y5;
            check_overflow(&y, initial.time + t)?;
            // FSAL: the seventh stage is the derivative at the new point.
            stages[0] = stages[6];
        }
        let factor = if ratio == 0.0 {
            5.0
        } else if ratio.is_finite() {
            (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            0.2
        };
        h *= factor;
        if h < 1e-14 * span.max(1.0) {
            return Err(Error::StepSizeUnderflow {
                tau: initial.time + t,
                step: h,
            });
        }
    }
    if t < span {
        return Err(Error::NonConvergence {
            what: "oracle ODE integration",
            detail: format!("step budget exhausted at tau = {}", initial.time + t),
        });
    }
    Ok(CovarianceState::symmetrized(tau, y))
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for nodes 1, 3, 5, 7 above.
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Panel {
    lo: f64,
    hi: f64,
    value: Matrix4<f64>,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F>(f: &F, lo: f64, hi: f64) -> Result<Panel>
where
    F: Fn(f64) -> Result<Matrix4<f64>>,
{
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let centre = f(mid)?;
    let mut kronrod = centre * GK_WEIGHTS[7];
    let mut gauss = centre * GAUSS_WEIGHTS[3];
    for i in 0..7 {
        let dx = half * GK_NODES[i];
        let pair = f(mid - dx)? + f(mid + dx)?;
        kronrod += pair * GK_WEIGHTS[i];
        if i % 2 == 1 {
            gauss += pair * GAUSS_WEIGHTS[i / 2];
        }
    }
    Ok(Panel {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).amax(),
    })
}

/// `int_0^tau e^{-K s} D e^{-K^T s} ds` by adaptive Gauss-Kronrod (7, 15)
/// quadrature of the integrand, evaluated pointwise.
pub fn noise_integral_quadrature(
    drift: &Matrix4<f64>,
    diffusion: &Matrix4<f64>,
    tau: f64,
    tolerance: f64,
) -> Result<Matrix4<f64>> {
    if !(tau >= 0.0) {
        return Err(Error::invalid("tau", format!("must be >= 0, got {tau}")));
    }
    if tau == 0.0 {
        return Ok(Matrix4::zeros());
    }
    let integrand = |s: f64| -> Result<Matrix4<f64>> {
        let w = linalg::expm(&(-drift * s))?;
        Ok(w * diffusion * w.transpose())
    };

    let mut heap = BinaryHeap::new();
    // Start from a few panels so oscillatory integrands are sampled.
    let pieces = (tau.ceil() as usize).clamp(1, 64);
    for i in 0..pieces {
        let lo = tau * i as f64 / pieces as f64;
        let hi = tau * (i + 1) as f64 / pieces as f64;
        heap.push(gauss_kronrod(&integrand, lo, hi)?);
    }
    for _ in 0..20_000 {
        let total: Matrix4<f64> = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if error <= tolerance * total.amax() || error == 0.0 {
            return Ok(total);
        }
        let worst = heap.pop().expect("non-empty panel heap");
        let mid = 0.5 * (worst.lo + worst.hi);
        heap.push(gauss_kronrod(&integrand, worst.lo, mid)?);
        heap.push(gauss_kronrod(&integrand, mid, worst.hi)?);
    }
    Err(Error::NonConvergence {
        what: "noise integral quadrature",
        detail: format!("tolerance {tolerance:e} not met"),
    })
}
