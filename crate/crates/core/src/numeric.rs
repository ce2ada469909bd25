//! Small numerical kernels shared by the channel, waterfilling and bound
//! modules: log-spaced grids, bracketing bisection, golden-section
//! minimization and adaptive Simpson quadrature.

use crate::error::{Error, Result};

const GOLDEN: f64 = 0.618_033_988_749_894_8;
const MAX_SIMPSON_DEPTH: u32 = 48;

/// `count` points spaced evenly in log between `lo` and `hi` (both included).
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (count - 1) as f64;
    let mut pts: Vec<f64> = (0..count).map(|i| (a + step * i as f64).exp()).collect();
    // pin the endpoints exactly
    pts[0] = lo;
    pts[count - 1] = hi;
    pts
}

/// Locate the boundary between `inside` and `outside`, where `pred(inside)`
/// holds and `pred(outside)` does not. Iterates until the bracket is at the
/// resolution of the floating-point grid around the root.
pub fn bisect_boundary<F>(mut inside: f64, mut outside: f64, pred: F) -> f64
where
    F: Fn(f64) -> bool,
{
    for _ in 0..200 {
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        if pred(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    0.5 * (inside + outside)
}

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
/// Stops once the bracket width falls below `rel_tol` times its midpoint.
pub fn golden_section_min<F>(f: F, mut a: f64, mut b: f64, rel_tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..500 {
        if (b - a).abs() <= rel_tol * 0.5 * (a + b).abs() {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to relative tolerance
/// `rel_tol`. The interval is first cut into 16 panels so that narrow
/// features are not missed by the initial five-point estimate.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if b <= a {
        return Ok(0.0);
    }
    const PANELS: usize = 16;
    let h = (b - a) / PANELS as f64;
    let mut panels = Vec::with_capacity(PANELS);
    let mut coarse = 0.0;
    for i in 0..PANELS {
        let lo = a + h * i as f64;
        let hi = if i + 1 == PANELS { b } else { lo + h };
        let (flo, fhi) = (f(lo), f(hi));
        let fmid = f(0.5 * (lo + hi));
        let whole = simpson(lo, hi, flo, fmid, fhi);
        coarse += whole;
        panels.push((lo, hi, flo, fmid, fhi, whole));
    }
    let scale = coarse.abs().max(f64::MIN_POSITIVE);
    let eps = rel_tol * scale / PANELS as f64;
    let mut total = 0.0;
    for (lo, hi, flo, fmid, fhi, whole) in panels {
        total += simpson_step(&f, lo, hi, flo, fmid, fhi, whole, eps, MAX_SIMPSON_DEPTH)?;
    }
    if !total.is_finite() {
        return Err(Error::numerical("quadrature produced a non-finite value"));
    }
    Ok(total)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * eps || m <= a || m >= b {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::numerical(format!(
            "adaptive Simpson did not converge on [{a}, {b}]"
        )));
    }
    Ok(
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)?
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_space_endpoints_and_ratio() {
        let g = log_space(0.1, 1000.0, 5);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[4], 1000.0);
        for w in g.windows(2) {
            assert!((w[1] / w[0] - 10.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect_boundary(1.0, 2.0, |x| x * x < 2.0);
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn golden_finds_parabola_vertex() {
        let x = golden_section_min(|x| (x - 3.7).powi(2) + 1.0, 0.0, 10.0, 1e-10);
        assert!((x - 3.7).abs() < 1e-6);
    }

    #[test]
    fn simpson_integrates_smooth_functions() {
        let v = adaptive_simpson(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-11);
        let v = adaptive_simpson(|x: f64| (-x * x).exp(), -8.0, 8.0, 1e-12).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn simpson_empty_interval_is_zero() {
        assert_eq!(adaptive_simpson(|x| x, 2.0, 2.0, 1e-9).unwrap(), 0.0);
    }
}
