//! Objectives the dynamics act on.

use crate::construct::ConvexObjective1D;

/// Differentiable convex objective on `R^d`.
pub trait Objective: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], out: &mut [f64]);
    /// `inf f` when known.
    fn infimum(&self) -> Option<f64>;
    fn minimizer(&self) -> Option<Vec<f64>>;
    /// Lipschitz constant of the gradient when globally finite.
    fn lipschitz(&self) -> Option<f64>;
    /// Short identifier recorded in trajectory metadata.
    fn id(&self) -> String;
}

/// `f(x) = ½ Σ μ_i x_i²`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadratic {
    pub diag: Vec<f64>,
}

impl Quadratic {
    pub fn new(diag: Vec<f64>) -> Self {
        Quadratic { diag }
    }

    /// One-dimensional `μ x² / 2`.
    pub fn scalar(mu: f64) -> Self {
        Quadratic { diag: vec![mu] }
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.diag.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        0.5 * self.diag.iter().zip(x).map(|(m, v)| m * v * v).sum::<f64>()
    }
    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        for ((o, m), v) in out.iter_mut().zip(&self.diag).zip(x) {
            *o = m * v;
        }
    }
    fn infimum(&self) -> Option<f64> {
        Some(0.0)
    }
    fn minimizer(&self) -> Option<Vec<f64>> {
        Some(vec![0.0; self.diag.len()])
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(self.diag.iter().fold(0.0, |a: f64, &b| a.max(b.abs())))
    }
    fn id(&self) -> String {
        format!("quadratic{:?}", self.diag)
    }
}

/// `f(x) = c |x|^p` in one dimension, `p ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub power: f64,
}

impl Objective for Monomial {
    fn dim(&self) -> usize {
        1
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.coeff * x[0].abs().powf(self.power)
    }
    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        out[0] = self.coeff * self.power * x[0].abs().powf(self.power - 1.0) * x[0].signum();
        if x[0] == 0.0 {
            out[0] = 0.0;
        }
    }
    fn infimum(&self) -> Option<f64> {
        Some(0.0)
    }
    fn minimizer(&self) -> Option<Vec<f64>> {
        Some(vec![0.0])
    }
    fn lipschitz(&self) -> Option<f64> {
        (self.power == 2.0).then_some(2.0 * self.coeff)
    }
    fn id(&self) -> String {
        format!("monomial(c={},p={})", self.coeff, self.power)
    }
}

/// `c · f`.
#[derive(Clone, Debug, PartialEq)]
pub struct Scaled<O> {
    pub inner: O,
    pub factor: f64,
}

impl<O: Objective> Objective for Scaled<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.factor * self.inner.value(x)
    }
    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        self.inner.gradient(x, out);
        for o in out.iter_mut() {
            *o *= self.factor;
        }
    }
    fn infimum(&self) -> Option<f64> {
        self.inner.infimum().map(|v| self.factor * v)
    }
    fn minimizer(&self) -> Option<Vec<f64>> {
        self.inner.minimizer()
    }
    fn lipschitz(&self) -> Option<f64> {
        self.inner.lipschitz().map(|l| self.factor * l)
    }
    fn id(&self) -> String {
        format!("{}*{}", self.factor, self.inner.id())
    }
}

impl Objective for ConvexObjective1D {
    fn dim(&self) -> usize {
        1
    }
    fn value(&self, x: &[f64]) -> f64 {
        ConvexObjective1D::value(self, x[0])
    }
    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        out[0] = self.slope(x[0]);
    }
    fn infimum(&self) -> Option<f64> {
        Some(ConvexObjective1D::infimum(self))
    }
    fn minimizer(&self) -> Option<Vec<f64>> {
        ConvexObjective1D::minimizer(self).map(|m| vec![m])
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(ConvexObjective1D::lipschitz(self))
    }
    fn id(&self) -> String {
        format!("knots({}, X={})", self.knots().len(), self.x_right())
    }
}

impl<O: Objective + ?Sized> Objective for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        (**self).gradient(x, out)
    }
    fn infimum(&self) -> Option<f64> {
        (**self).infimum()
    }
    fn minimizer(&self) -> Option<Vec<f64>> {
        (**self).minimizer()
    }
    fn lipschitz(&self) -> Option<f64> {
        (**self).lipschitz()
    }
    fn id(&self) -> String {
        (**self).id()
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_gradient() {
        let q = Quadratic::new(vec![1.0, 4.0]);
        let mut g = [0.0; 2];
        q.gradient(&[2.0, -1.0], &mut g);
        assert_eq!(g, [2.0, -4.0]);
        assert_eq!(q.value(&[2.0, -1.0]), 4.0);
        assert_eq!(q.lipschitz(), Some(4.0));
    }

    #[test]
    fn quartic_gradient() {
        let m = Monomial { coeff: 1.0 / 64.0, power: 4.0 };
        let mut g = [0.0];
        m.gradient(&[-2.0], &mut g);
        assert!((g[0] + 0.5).abs() < 1e-15);
        m.gradient(&[0.0], &mut g);
        assert_eq!(g[0], 0.0);
    }
}
