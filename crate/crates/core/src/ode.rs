//! Adaptive Dormand–Prince 5(4) integration for matrix-valued ODEs.

use crate::linalg::CMatrix;
use crate::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MAX_STEPS: usize = 1_000_000;

/// Integrates `y' = f(t, y)` from `t0` to `t1` with mixed absolute/relative tolerance `tol`.
pub(crate) fn integrate<F>(f: F, t0: f64, t1: f64, y0: CMatrix, tol: f64) -> Result<CMatrix>
where
    F: Fn(f64, &CMatrix) -> CMatrix,
{
    if t1 <= t0 {
        return Ok(y0);
    }
    let span = t1 - t0;
    let mut t = t0;
    let mut y = y0;
    let mut h = (span / 16.0).min(0.05);
    let mut k1 = f(t, &y);
    let mut steps = 0;
    while t < t1 {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::InvalidArgument(format!(
                "ODE integration did not finish within {MAX_STEPS} steps"
            )));
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        let k2 = f(t + C2 * h, &combine(&y, h, &[(&k1, A21)]));
        let k3 = f(t + C3 * h, &combine(&y, h, &[(&k1, A31), (&k2, A32)]));
        let k4 = f(t + C4 * h, &combine(&y, h, &[(&k1, A41), (&k2, A42), (&k3, A43)]));
        let k5 = f(
            t + C5 * h,
            &combine(&y, h, &[(&k1, A51), (&k2, A52), (&k3, A53), (&k4, A54)]),
        );
        let k6 = f(
            t + h,
            &combine(&y, h, &[(&k1, A61), (&k2, A62), (&k3, A63), (&k4, A64), (&k5, A65)]),
        );
        let y_new = combine(&y, h, &[(&k1, B1), (&k3, B3), (&k4, B4), (&k5, B5), (&k6, B6)]);
        let k7 = f(t + h, &y_new);
        let err = combine(
            &CMatrix::zeros(y.nrows(), y.ncols()),
            h,
            &[(&k1, E1), (&k3, E3), (&k4, E4), (&k5, E5), (&k6, E6), (&k7, E7)],
        );
        let mut err_norm: f64 = 0.0;
        for (e, (a, b)) in err.iter().zip(y.iter().zip(y_new.iter())) {
            let scale = tol + tol * a.norm().max(b.norm());
            err_norm = err_norm.max(e.norm() / scale);
        }
        if err_norm <= 1.0 {
            t = if last { t1 } else { t + h };
            y = y_new;
            k1 = k7;
        }
        let factor = if err_norm == 0.0 {
            5.0
        } else {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < span * 1e-14 {
            return Err(Error::InvalidArgument("ODE step size underflow".into()));
        }
    }
    Ok(y)
}

/// `y + h Σ cᵢ kᵢ`
fn combine(y: &CMatrix, h: f64, terms: &[(&CMatrix, f64)]) -> CMatrix {
    let mut out = y.clone();
    for (k, c) in terms {
        let w = h * c;
        for (o, v) in out.iter_mut().zip(k.iter()) {
            *o += v * w;
        }
    }
    out
}
