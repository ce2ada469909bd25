//! Principal branch of the Lambert W function on `[0, ∞)`.

use std::f64::consts::E;

use crate::error::{Error, Result};

const MAX_ITER: usize = 64;

/// W₀(x): the `w ≥ 0` with `w·e^w = x`.
///
/// Halley iteration on `w·e^w − x` for `x ≤ e`, and on the overflow-free
/// form `w + ln w − ln x` above that.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!(
            "W0 is evaluated on x >= 0 only, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let w = if x <= E {
        halley_direct(x)
    } else {
        halley_log(x)
    };
    Ok(w)
}

fn halley_direct(x: f64) -> f64 {
    let mut w = if x < 0.25 {
        // series about 0
        x * (1.0 - x * (1.0 - x * (1.5 - x * 8.0 / 3.0)))
    } else {
        let l = (1.0 + x).ln();
        l * (1.0 - (1.0 + l).ln() / (2.0 + l))
    };
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs() {
            break;
        }
    }
    w
}

fn halley_log(x: f64) -> f64 {
    let lx = x.ln();
    let llx = lx.ln();
    let mut w = lx - llx + llx / lx;
    for _ in 0..MAX_ITER {
        let g = w + w.ln() - lx;
        let g1 = 1.0 + 1.0 / w;
        let g2 = -1.0 / (w * w);
        let step = g / (g1 - g * g2 / (2.0 * g1));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs() {
            break;
        }
    }
    w
}
