//! Small numerical building blocks: adaptive quadrature, bisection,
//! and zero-crossing period extraction.

use crate::error::{Error, Result};

/// Adaptive Simpson quadrature of `f` on [a, b] to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 48)
}

/// Composite trapezoid rule for a periodic integrand over one full period
/// [0, period): spectrally accurate for smooth periodic functions.
pub fn periodic_trapezoid(f: &dyn Fn(f64) -> f64, period: f64, n: usize) -> f64 {
    let h = period / n as f64;
    (0..n).map(|i| f(i as f64 * h)).sum::<f64>() * h
}

/// Bisection root of `f` on [a, b]; requires a sign change. Converges to
/// relative interval width `rtol`.
pub fn bisect(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rtol: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::invalid(format!(
            "bisection bracket [{a:e}, {b:e}] has no sign change"
        )));
    }
    let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || (b - a).abs() < rtol * scale {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Oscillation period from a sampled signal via linear-interpolated zero
/// crossings of `y - mean(y)`: twice the mean half-period. Needs at least
/// three crossings.
pub fn zero_crossing_period(t: &[f64], y: &[f64]) -> Result<f64> {
    if t.len() != y.len() || t.len() < 4 {
        return Err(Error::invalid("period extraction needs matched samples (>= 4)"));
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let mut crossings = Vec::new();
    for i in 1..y.len() {
        let (a, b) = (y[i - 1] - mean, y[i] - mean);
        if a == 0.0 {
            continue;
        }
        if a.signum() != b.signum() {
            let frac = a / (a - b);
            crossings.push(t[i - 1] + frac * (t[i] - t[i - 1]));
        }
    }
    if crossings.len() < 3 {
        return Err(Error::invalid(format!(
            "only {} zero crossings found",
            crossings.len()
        )));
    }
    let half: f64 = crossings.windows(2).map(|w| w[1] - w[0]).sum::<f64>()
        / (crossings.len() - 1) as f64;
    Ok(2.0 * half)
}

// 16-point Gauss-Legendre abscissae (positive half) and weights on [-1, 1].
const GL16_X: [f64; 8] = [
    0.095_012_509_837_637_44,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_8,
    0.755_404_408_355_003_0,
    0.865_631_202_387_831_8,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];
const GL16_W: [f64; 8] = [
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_5,
    0.149_595_988_816_576_7,
    0.124_628_971_255_533_9,
    0.095_158_511_682_492_8,
    0.062_253_523_938_647_9,
    0.027_152_459_411_754_1,
];

/// 16-point Gauss-Legendre quadrature on [a, b]. Nodes are strictly interior,
/// so integrands with removable endpoint singularities are never evaluated at
/// the endpoints.
pub fn gauss_legendre_16(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = 0.0;
    for i in 0..8 {
        s += GL16_W[i] * (f(mid + half * GL16_X[i]) + f(mid - half * GL16_X[i]));
    }
    s * half
}

/// Composite Gauss-Legendre integral with panel doubling until two successive
/// refinements agree to `rtol` relative. Errors if 1024 panels do not settle.
pub fn panel_doubling_integral(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    rtol: f64,
) -> Result<f64> {
    let composite = |panels: usize| -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|i| gauss_legendre_16(f, a + i as f64 * h, a + (i + 1) as f64 * h))
            .sum()
    };
    let mut prev = composite(4);
    let mut panels = 8;
    while panels <= 1024 {
        let cur = composite(panels);
        if (cur - prev).abs() <= rtol * cur.abs().max(1e-300) {
            return Ok(cur);
        }
        prev = cur;
        panels *= 2;
    }
    Err(Error::Refinement(format!(
        "integral did not settle to relative tolerance {rtol:e} within 1024 panels"
    )))
}
