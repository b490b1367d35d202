//! Dense small-matrix kernels: matrix exponential and the block-triangular
//! (Van Loan) integrals used by the propagator.

use nalgebra::{DMatrix, Matrix4, SMatrix};

use crate::error::{Error, Result};

/// Entries above this magnitude are reported as overflow.
pub const OVERFLOW_LIMIT: f64 = 1e250;

const THETA_13: f64 = 5.371_920_351_148_152;

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [
    17_297_280.0,
    8_648_640.0,
    1_995_840.0,
    277_200.0,
    25_200.0,
    1_512.0,
    56.0,
    1.0,
];
const PADE_9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3_960.0,
    90.0,
    1.0,
];
const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

fn one_norm<const N: usize>(m: &SMatrix<f64, N, N>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Odd/even split `U, V` of a low-order diagonal Padé numerator.
fn pade_low<const N: usize>(a: &SMatrix<f64, N, N>, b: &[f64]) -> (SMatrix<f64, N, N>, SMatrix<f64, N, N>) {
    let ident = SMatrix::<f64, N, N>::identity();
    let a2 = a * a;
    let mut power = ident;
    let mut u = SMatrix::<f64, N, N>::zeros();
    let mut v = SMatrix::<f64, N, N>::zeros();
    for k in 0..b.len() / 2 {
        v += power * b[2 * k];
        u += power * b[2 * k + 1];
        power *= a2;
    }
    (a * u, v)
}

fn pade_13<const N: usize>(a: &SMatrix<f64, N, N>) -> (SMatrix<f64, N, N>, SMatrix<f64, N, N>) {
    let b = &PADE_13;
    let ident = SMatrix::<f64, N, N>::identity();
    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let u_inner = a6 * (a6 * b[13] + a4 * b[11] + a2 * b[9]) + a6 * b[7] + a4 * b[5] + a2 * b[3] + ident * b[1];
    let u = a * u_inner;
    let v = a6 * (a6 * b[12] + a4 * b[10] + a2 * b[8]) + a6 * b[6] + a4 * b[4] + a2 * b[2] + ident * b[0];
    (u, v)
}

/// Matrix exponential by scaling and squaring with a diagonal Padé
/// approximant of degree 3 to 13, following Higham's 2005 selection rule.
pub fn expm<const N: usize>(m: &SMatrix<f64, N, N>) -> Result<SMatrix<f64, N, N>> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidState("matrix exponential of non-finite matrix".into()));
    }
    let norm = one_norm(m);
    // (theta_m, coefficients) for m = 3, 5, 7, 9
    let low_orders: [(f64, &[f64]); 4] = [
        (1.495_585_217_958_292e-2, &PADE_3),
        (2.539_398_330_063_23e-1, &PADE_5),
        (9.504_178_996_162_932e-1, &PADE_7),
        (2.097_847_961_257_068, &PADE_9),
    ];
    let (u, v, squarings) = match low_orders.iter().find(|(theta, _)| norm <= *theta) {
        Some((_, b)) => {
            let (u, v) = pade_low(m, b);
            (u, v, 0)
        }
        None => {
            let s = (norm / THETA_13).log2().ceil().max(0.0) as i32;
            let scaled = m * 2f64.powi(-s);
            let (u, v) = pade_13(&scaled);
            (u, v, s)
        }
    };
    let p = v + u;
    let q = v - u;
    let q = DMatrix::from_column_slice(N, N, q.as_slice());
    let p = DMatrix::from_column_slice(N, N, p.as_slice());
    let solved = q.lu().solve(&p).ok_or_else(|| Error::NonConvergence {
        what: "matrix exponential",
        detail: "singular Pade denominator".into(),
    })?;
    let mut r = SMatrix::<f64, N, N>::from_column_slice(solved.as_slice());
    for _ in 0..squarings {
        r = r * r;
        if r.amax() > OVERFLOW_LIMIT || r.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow { tau: f64::NAN });
        }
    }
    Ok(r)
}

/// Builds the 8x8 block matrix `[[a, b], [0, c]]`.
fn upper_block(a: &Matrix4<f64>, b: &Matrix4<f64>, c: &Matrix4<f64>) -> SMatrix<f64, 8, 8> {
    let mut m = SMatrix::<f64, 8, 8>::zeros();
    m.fixed_view_mut::<4, 4>(0, 0).copy_from(a);
    m.fixed_view_mut::<4, 4>(0, 4).copy_from(b);
    m.fixed_view_mut::<4, 4>(4, 4).copy_from(c);
    m
}

/// `int_0^t e^{-K s} D e^{-K^T s} ds`, read off the exponential of
/// `[[-K, D], [0, K^T]] t`.
pub fn van_loan_noise(k: &Matrix4<f64>, d: &Matrix4<f64>, t: f64) -> Result<Matrix4<f64>> {
    if t == 0.0 || d.iter().all(|v| *v == 0.0) {
        return Ok(Matrix4::zeros());
    }
    let block = upper_block(&(-k), d, &k.transpose()) * t;
    let e = expm(&block)?;
    let upper: Matrix4<f64> = e.fixed_view::<4, 4>(0, 4).into_owned();
    let back = expm(&(-k.transpose() * t))?;
    Ok(upper * back)
}

/// `W^T G W` with `W = e^{K t}`, computed as
/// `G + int_0^t W(s)^T (K^T G + G K) W(s) ds`.
///
/// When `K^T G + G K` is small the result stays accurate even where the
/// entries of `W` are huge, which is what a direct product cannot offer.
pub fn transported_form(k: &Matrix4<f64>, g: &Matrix4<f64>, t: f64) -> Result<Matrix4<f64>> {
    let generator = k.transpose() * g + g * k;
    if t == 0.0 || generator.iter().all(|v| *v == 0.0) {
        return Ok(*g);
    }
    let block = upper_block(&(-k.transpose()), &generator, k) * t;
    let e = expm(&block)?;
    let upper: Matrix4<f64> = e.fixed_view::<4, 4>(0, 4).into_owned();
    let w: Matrix4<f64> = e.fixed_view::<4, 4>(4, 4).into_owned();
    Ok(g + w.transpose() * upper)
}

pub fn symmetrize(m: &Matrix4<f64>) -> Matrix4<f64> {
    (m + m.transpose()) * 0.5
}

pub fn antisymmetrize(m: &Matrix4<f64>) -> Matrix4<f64> {
    (m - m.transpose()) * 0.5
}

pub fn check_overflow(m: &Matrix4<f64>, tau: f64) -> Result<()> {
    if m.iter().any(|v| !v.is_finite() || v.abs() > OVERFLOW_LIMIT) {
        Err(Error::Overflow { tau })
    } else {
        Ok(())
    }
}
