//! Scalar quadrature helpers.
//!
//! Finite intervals go through the double-exponential rule of the
//! `quadrature` crate with bisection on top; semi-infinite intervals are
//! walked in doubling windows.
//! Sample-based rules (trapezoid, cumulative trapezoid) live here as well since
//! every report in [`crate::verify`] integrates recorded series.

/// Value and error estimate of a quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

/// Integrates `f` over `[a, b]` to the requested absolute tolerance.
///
/// One double-exponential pass is tried first; intervals whose error
/// estimate misses the target are bisected.
pub fn integrate<F>(f: F, a: f64, b: f64, abs_tol: f64) -> Quadrature
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Quadrature { value: 0.0, error: 0.0 };
    }
    adaptive(&f, a, b, abs_tol.max(f64::MIN_POSITIVE))
}

const MAX_PANELS: usize = 256;

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Quadrature {
    let panel = |lo: f64, hi: f64| {
        let out = quadrature::integrate(f, lo, hi, tol * ((hi - lo) / (b - a)).abs());
        (lo, hi, out.integral, out.error_estimate)
    };
    // Bisect the worst panel until the summed error meets the target.
    let mut panels = vec![panel(a, b)];
    loop {
        let value: f64 = panels.iter().map(|p| p.2).sum();
        let error: f64 = panels.iter().map(|p| p.3).sum();
        let floor = 8.0 * f64::EPSILON * panels.iter().map(|p| p.2.abs()).sum::<f64>();
        if error <= tol.max(floor) || panels.len() >= MAX_PANELS {
            return Quadrature { value, error };
        }
        let worst = (0..panels.len())
            .max_by(|&i, &j| panels[i].3.total_cmp(&panels[j].3))
            .unwrap_or(0);
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let m = 0.5 * (lo + hi);
        panels.push(panel(lo, m));
        panels.push(panel(m, hi));
    }
}

/// Integrates `f` over `[a, ∞)`.
///
/// The range is walked in doubling windows until a window contributes less
/// than a small fraction of the tolerance; the remainder goes through the map
/// `t = lo + u / (1 - u)`.
pub fn integrate_to_infinity<F>(f: F, a: f64, abs_tol: f64) -> Quadrature
where
    F: Fn(f64) -> f64,
{
    let mut total = Quadrature { value: 0.0, error: 0.0 };
    let mut lo = a;
    let mut width = a.abs().max(1.0);
    let mut quiet = 0;
    for _ in 0..400 {
        let piece = integrate(&f, lo, lo + width, 1e-2 * abs_tol);
        total.value += piece.value;
        total.error += piece.error;
        lo += width;
        width *= 2.0;
        if piece.value.abs() < 1e-2 * abs_tol {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        if !lo.is_finite() {
            return total;
        }
    }
    let mapped = |u: f64| {
        if u >= 1.0 {
            return 0.0;
        }
        let w = 1.0 - u;
        f(lo + u / w) / (w * w)
    };
    let tail = integrate(mapped, 0.0, 1.0, 1e-2 * abs_tol);
    total.value += tail.value;
    total.error += tail.error;
    total
}

/// Integrates `f` over `[a, b]` with `0 < a < b`, splitting the range at
/// powers of ten so that integrands varying on multiplicative scales are
/// resolved per decade.
pub fn integrate_log_split<F>(f: F, a: f64, b: f64, abs_tol: f64) -> Quadrature
where
    F: Fn(f64) -> f64,
{
    assert!(a > 0.0 && b >= a, "log-split quadrature needs 0 < a <= b");
    let mut total = Quadrature { value: 0.0, error: 0.0 };
    let mut lo = a;
    while lo < b {
        let hi = (10f64.powf(lo.log10().floor() + 1.0)).min(b);
        let hi = if hi <= lo { b } else { hi };
        let piece = integrate(&f, lo, hi, abs_tol);
        total.value += piece.value;
        total.error += piece.error;
        lo = hi;
    }
    total
}

/// Trapezoid rule over samples `(xs[i], ys[i])`.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Running trapezoid integral; the first entry is zero.
pub fn cumulative_trapezoid(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    debug_assert_eq!(xs.len(), ys.len());
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    if !xs.is_empty() {
        out.push(0.0);
    }
    for (x, y) in xs.windows(2).zip(ys.windows(2)) {
        acc += 0.5 * (x[1] - x[0]) * (y[0] + y[1]);
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-14);
        assert!((q.value - 8.0).abs() < 1e-12, "{q:?}");
    }

    #[test]
    fn semi_infinite_exponential() {
        let q = integrate_to_infinity(|t| (-t).exp(), 1.0, 1e-14);
        assert!((q.value - (-1f64).exp()).abs() < 1e-12, "{q:?}");
    }

    #[test]
    fn semi_infinite_power_tail() {
        // ∫_1^∞ t^{-3/2} dt = 2
        let q = integrate_to_infinity(|t| t.powf(-1.5), 1.0, 1e-13);
        assert!((q.value - 2.0).abs() < 1e-8, "{q:?}");
    }

    #[test]
    fn log_split_matches_closed_form() {
        let q = integrate_log_split(|s| 1.0 / s, 1.0, 1e4, 1e-14);
        assert!((q.value - 1e4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn cumulative_trapezoid_ends_at_total() {
        let xs: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
        let c = cumulative_trapezoid(&xs, &ys);
        assert_eq!(c.len(), xs.len());
        assert!((c[10] - trapezoid(&xs, &ys)).abs() < 1e-15);
        assert!((c[10] - 1.0).abs() < 1e-14);
    }
}
