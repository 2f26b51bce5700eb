//! Ng's three-point extrapolation for fixed-point iterations `f ↦ A(f)`.

use std::collections::VecDeque;

#[derive(Debug, Default)]
pub(crate) struct NgAccelerator {
    /// (input, output) pairs, newest at the back.
    history: VecDeque<(Vec<f64>, Vec<f64>)>,
}

impl NgAccelerator {
    pub fn push(&mut self, input: Vec<f64>, output: Vec<f64>) {
        if self.history.len() == 3 {
            self.history.pop_front();
        }
        self.history.push_back((input, output));
    }

    pub fn clear(&mut self) {
        self.history.clear();
    }

    /// Next input minimizing the linearized residual over the last three
    /// iterates, or `None` when the history is short or the 2×2 system is
    /// degenerate.
    pub fn extrapolate(&self) -> Option<Vec<f64>> {
        if self.history.len() < 3 {
            return None;
        }
        let (f2, g2) = &self.history[0];
        let (f1, g1) = &self.history[1];
        let (f0, g0) = &self.history[2];
        let mut a11 = 0.0;
        let mut a12 = 0.0;
        let mut a22 = 0.0;
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for i in 0..f0.len() {
            let d0 = g0[i] - f0[i];
            let d01 = d0 - (g1[i] - f1[i]);
            let d02 = d0 - (g2[i] - f2[i]);
            a11 += d01 * d01;
            a12 += d01 * d02;
            a22 += d02 * d02;
            b1 += d0 * d01;
            b2 += d0 * d02;
        }
        let det = a11 * a22 - a12 * a12;
        if !(det.is_finite()) || det.abs() <= 1e-14 * a11 * a22 {
            return None;
        }
        let c1 = (b1 * a22 - b2 * a12) / det;
        let c2 = (a11 * b2 - a12 * b1) / det;
        if !(c1.is_finite() && c2.is_finite()) || c1.abs() > 1e3 || c2.abs() > 1e3 {
            return None;
        }
        let c0 = 1.0 - c1 - c2;
        Some((0..f0.len()).map(|i| c0 * g0[i] + c1 * g1[i] + c2 * g2[i]).collect())
    }
}
