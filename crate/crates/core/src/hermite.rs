//! Piecewise-cubic Hermite interpolation of `(x, y, y')` tables.

/// Cubic Hermite segment evaluation on `[x0, x1]`; returns value and slope.
pub(crate) fn segment(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> (f64, f64) {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = 6.0 * s2 - 6.0 * s;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = -6.0 * s2 + 6.0 * s;
    let dh11 = 3.0 * s2 - 2.0 * s;
    let slope = (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1;
    (value, slope)
}

/// Index `i` with `xs[i] <= x <= xs[i + 1]`, for `x` inside the table range.
pub(crate) fn locate(xs: &[f64], x: f64) -> usize {
    let i = xs.partition_point(|&k| k <= x);
    i.saturating_sub(1).min(xs.len().saturating_sub(2))
}

/// Limits the supplied slopes so each segment stays monotone (Fritsch–Carlson).
pub(crate) fn monotone_limit(xs: &[f64], ys: &[f64], ds: &mut [f64]) {
    for i in 0..xs.len().saturating_sub(1) {
        let delta = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
        if delta == 0.0 {
            ds[i] = 0.0;
            ds[i + 1] = 0.0;
            continue;
        }
        if ds[i].signum() != delta.signum() {
            ds[i] = 0.0;
        }
        if ds[i + 1].signum() != delta.signum() {
            ds[i + 1] = 0.0;
        }
        let a = ds[i] / delta;
        let b = ds[i + 1] / delta;
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            ds[i] = tau * a * delta;
            ds[i + 1] = tau * b * delta;
        }
    }
}
