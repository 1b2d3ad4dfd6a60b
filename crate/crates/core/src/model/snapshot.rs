use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// `n` equally spaced nodes on `[x0, x1]`, endpoints exact.
pub fn uniform_nodes(x0: f64, x1: f64, n: usize) -> Vec<f64> {
    let h = (x1 - x0) / (n - 1) as f64;
    (0..n)
        .map(|j| if j + 1 == n { x1 } else { x0 + h * j as f64 })
        .collect()
}

/// Three-point derivative estimates: centered in the interior, second-order
/// one-sided at both ends. Valid for non-uniform nodes.
pub fn derivative_estimates(nodes: &[f64], values: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut d = vec![0.0; n];
    if n < 3 {
        if n == 2 {
            let s = (values[1] - values[0]) / (nodes[1] - nodes[0]);
            d[0] = s;
            d[1] = s;
        }
        return d;
    }
    for i in 1..n - 1 {
        let h1 = nodes[i] - nodes[i - 1];
        let h2 = nodes[i + 1] - nodes[i];
        d[i] = -h2 / (h1 * (h1 + h2)) * values[i - 1]
            + (h2 - h1) / (h1 * h2) * values[i]
            + h1 / (h2 * (h1 + h2)) * values[i + 1];
    }
    d[0] = left_slope(nodes, values);
    d[n - 1] = right_slope(nodes, values);
    d
}

/// Second-order one-sided `u_x` at the first node.
pub fn left_slope(nodes: &[f64], values: &[f64]) -> f64 {
    let h1 = nodes[1] - nodes[0];
    let h2 = nodes[2] - nodes[1];
    -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * values[0] + (h1 + h2) / (h1 * h2) * values[1]
        - h1 / (h2 * (h1 + h2)) * values[2]
}

/// Second-order one-sided `u_x` at the last node.
pub fn right_slope(nodes: &[f64], values: &[f64]) -> f64 {
    let n = nodes.len();
    let h1 = nodes[n - 1] - nodes[n - 2];
    let h2 = nodes[n - 2] - nodes[n - 3];
    (2.0 * h1 + h2) / (h1 * (h1 + h2)) * values[n - 1] - (h1 + h2) / (h1 * h2) * values[n - 2]
        + h1 / (h2 * (h1 + h2)) * values[n - 3]
}

/// Solution profile at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
}

impl Snapshot {
    pub fn new(t: f64, nodes: Vec<f64>, values: Vec<f64>) -> Result<Snapshot> {
        if nodes.len() < 3 {
            return invalid("snapshot needs at least 3 nodes");
        }
        if nodes.len() != values.len() {
            return invalid("snapshot nodes and values differ in length");
        }
        if !nodes.windows(2).all(|w| w[0] < w[1]) {
            return invalid(format!("snapshot nodes not strictly increasing at t={t}"));
        }
        let derivs = derivative_estimates(&nodes, &values);
        Ok(Snapshot { t, nodes, values, derivs })
    }

    pub fn from_fn(t: f64, x0: f64, x1: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Snapshot> {
        let nodes = uniform_nodes(x0, x1, n);
        let values = nodes.iter().map(|&x| f(x)).collect();
        Snapshot::new(t, nodes, values)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Mean node spacing.
    pub fn dx(&self) -> f64 {
        (self.nodes[self.len() - 1] - self.nodes[0]) / (self.len() - 1) as f64
    }

    /// `max |u|`.
    pub fn scale(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| f64::max(m, v.abs()))
    }

    pub fn left(&self) -> f64 {
        self.values[0]
    }

    pub fn right(&self) -> f64 {
        self.values[self.len() - 1]
    }

    /// Trapezoid rule for `∫ u dx`.
    pub fn integral(&self) -> f64 {
        self.nodes
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, u)| 0.5 * (x[1] - x[0]) * (u[0] + u[1]))
            .sum()
    }

    /// Re-checks every snapshot invariant: ordering, lengths, and that the
    /// stored derivatives equal a fresh recomputation bit for bit.
    pub fn check(&self) -> Result<()> {
        if self.nodes.len() < 3 || self.values.len() != self.nodes.len() || self.derivs.len() != self.nodes.len() {
            return invalid("snapshot arrays inconsistent");
        }
        if !self.nodes.windows(2).all(|w| w[0] < w[1]) {
            return invalid("snapshot nodes not strictly increasing");
        }
        if derivative_estimates(&self.nodes, &self.values) != self.derivs {
            return invalid("snapshot derivative estimates stale");
        }
        Ok(())
    }

    /// Linear interpolation of `u` at `x` (clamped to the node range).
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.len();
        if x <= self.nodes[0] {
            return self.values[0];
        }
        if x >= self.nodes[n - 1] {
            return self.values[n - 1];
        }
        let j = self.nodes.partition_point(|&v| v <= x) - 1;
        let w = (x - self.nodes[j]) / (self.nodes[j + 1] - self.nodes[j]);
        self.values[j] * (1.0 - w) + self.values[j + 1] * w
    }

    /// Cubic Lagrange interpolation on the four nodes around `x`.
    pub fn interpolate_cubic(&self, x: f64) -> f64 {
        let n = self.len();
        if n < 4 {
            return self.interpolate(x);
        }
        let x = x.clamp(self.nodes[0], self.nodes[n - 1]);
        let j = self.nodes.partition_point(|&v| v <= x).clamp(1, n - 1) - 1;
        let s = j.saturating_sub(1).min(n - 4);
        let xs = &self.nodes[s..s + 4];
        let us = &self.values[s..s + 4];
        let mut acc = 0.0;
        for i in 0..4 {
            let mut w = 1.0;
            for k in 0..4 {
                if k != i {
                    w *= (x - xs[k]) / (xs[i] - xs[k]);
                }
            }
            acc += w * us[i];
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_exact_on_quadratics() {
        let nodes = vec![0.0, 0.1, 0.25, 0.5, 0.6];
        let values: Vec<f64> = nodes.iter().map(|x| 3.0 * x * x - x + 2.0).collect();
        let d = derivative_estimates(&nodes, &values);
        for (x, dv) in nodes.iter().zip(&d) {
            assert!((dv - (6.0 * x - 1.0)).abs() < 1e-12, "x={x}: {dv}");
        }
    }

    #[test]
    fn check_detects_tampering() {
        let mut s = Snapshot::from_fn(0.0, 0.0, 1.0, 11, |x| x * x).unwrap();
        assert!(s.check().is_ok());
        s.values[3] += 1e-3;
        assert!(s.check().is_err());
    }

    #[test]
    fn interpolation() {
        let s = Snapshot::from_fn(0.0, 0.0, 1.0, 11, |x| x * x * x).unwrap();
        assert!((s.interpolate_cubic(0.33) - 0.33f64.powi(3)).abs() < 1e-14);
        assert!((s.interpolate(0.05) - 0.0005).abs() < 1e-15);
    }
}
