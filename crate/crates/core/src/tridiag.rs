//! Thomas algorithm for tridiagonal systems.

use crate::error::{LabError, Result};

/// Tridiagonal matrix stored by diagonals. `lower[0]` and `upper[n-1]` are
/// unused.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Tridiagonal { lower: vec![0.0; n], diag: vec![0.0; n], upper: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `y = A x`
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.upper[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    /// Solves `A x = rhs` in place of `rhs`. Fails on a vanishing pivot,
    /// which only happens when diagonal dominance is badly lost.
    pub fn solve_in_place(&self, rhs: &mut [f64]) -> Result<()> {
        let n = self.len();
        assert_eq!(rhs.len(), n, "rhs length mismatch");
        let mut c = vec![0.0; n];
        let tiny = 1e-300;
        let mut pivot = self.diag[0];
        if pivot.abs() < tiny || !pivot.is_finite() {
            return Err(LabError::Tridiagonal { row: 0 });
        }
        c[0] = self.upper[0] / pivot;
        rhs[0] /= pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.lower[i] * c[i - 1];
            if pivot.abs() < tiny || !pivot.is_finite() {
                return Err(LabError::Tridiagonal { row: i });
            }
            c[i] = if i + 1 < n { self.upper[i] / pivot } else { 0.0 };
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= c[i] * rhs[i + 1];
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_pivot_reported() {
        let m = Tridiagonal { lower: vec![0.0, 1.0], diag: vec![1.0, 1.0], upper: vec![1.0, 0.0] };
        let mut rhs = vec![1.0, 1.0];
        assert_eq!(m.solve_in_place(&mut rhs), Err(LabError::Tridiagonal { row: 1 }));
    }

    proptest! {
        #[test]
        fn solves_diagonally_dominant_systems(
            n in 3usize..40,
            seed in proptest::collection::vec(-1.0f64..1.0, 160),
        ) {
            let mut m = Tridiagonal::zeros(n);
            for i in 0..n {
                m.lower[i] = seed[i];
                m.upper[i] = seed[40 + i];
                m.diag[i] = 2.5 + seed[80 + i];
            }
            let x: Vec<f64> = seed[120..120 + n].to_vec();
            let mut rhs = m.apply(&x);
            m.solve_in_place(&mut rhs).unwrap();
            for (a, b) in rhs.iter().zip(&x) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
