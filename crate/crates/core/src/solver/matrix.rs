//! Dense storage and LU factorization for the MNA system.
//!
//! Corpus circuits have about a dozen unknowns, so a dense row-major matrix
//! is used; [`SystemMatrix`] is the seam for a sparse backend.

use std::ops::{Index, IndexMut};

/// Smallest pivot magnitude accepted before the system is declared singular.
pub const PIVOT_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                self.data[r * self.n..(r + 1) * self.n]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.n + c]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.n + c]
    }
}

/// Linearized MNA system `a · x = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrix {
    pub a: DenseMatrix,
    pub rhs: Vec<f64>,
}

impl SystemMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            a: DenseMatrix::zeros(n),
            rhs: vec![0.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    /// Adds `value` at `(r, c)`; `None` is the ground row or column.
    pub(crate) fn add(&mut self, r: Option<usize>, c: Option<usize>, value: f64) {
        if let (Some(r), Some(c)) = (r, c) {
            self.a[(r, c)] += value;
        }
    }

    pub(crate) fn add_rhs(&mut self, r: Option<usize>, value: f64) {
        if let Some(r) = r {
            self.rhs[r] += value;
        }
    }

    /// Residual `a · x - rhs`.
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        self.a
            .mul_vec(x)
            .iter()
            .zip(&self.rhs)
            .map(|(ax, b)| ax - b)
            .collect()
    }
}

/// Pivot column that fell below [`PIVOT_FLOOR`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularPivot {
    pub column: usize,
}

/// Solves the system by LU factorization with partial pivoting.
pub fn solve_linear(m: &SystemMatrix) -> Result<Vec<f64>, SingularPivot> {
    let n = m.dim();
    let mut a = m.a.clone();
    let mut x = m.rhs.clone();

    for k in 0..n {
        let (pivot_row, pivot_abs) = (k..n)
            .map(|r| (r, a[(r, k)].abs()))
            .fold((k, -1.0), |best, cand| if cand.1 > best.1 { cand } else { best });
        if !(pivot_abs >= PIVOT_FLOOR) {
            return Err(SingularPivot { column: k });
        }
        if pivot_row != k {
            for c in 0..n {
                let tmp = a[(k, c)];
                a[(k, c)] = a[(pivot_row, c)];
                a[(pivot_row, c)] = tmp;
            }
            x.swap(k, pivot_row);
        }
        let pivot = a[(k, k)];
        for r in k + 1..n {
            let factor = a[(r, k)] / pivot;
            if factor == 0.0 {
                continue;
            }
            a[(r, k)] = factor;
            for c in k + 1..n {
                a[(r, c)] -= factor * a[(k, c)];
            }
            x[r] -= factor * x[k];
        }
    }
    for k in (0..n).rev() {
        let mut sum = x[k];
        for c in k + 1..n {
            sum -= a[(k, c)] * x[c];
        }
        x[k] = sum / a[(k, k)];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn inf_norm(v: &[f64]) -> f64 {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    #[test]
    fn identity_returns_rhs() {
        let m = SystemMatrix {
            a: DenseMatrix::identity(4),
            rhs: vec![1.0, -2.0, 3.5, 0.0],
        };
        assert_eq!(solve_linear(&m).unwrap(), m.rhs);
    }

    #[test]
    fn divider_two_by_two() {
        // Node 1 driven to 10 V through a 1k/1k divider, written as a
        // 2x2 nodal system with a Norton source: 10 mA into node 1.
        let g = 1e-3;
        let mut m = SystemMatrix::zeros(2);
        m.a[(0, 0)] = 2.0 * g;
        m.a[(0, 1)] = -g;
        m.a[(1, 0)] = -g;
        m.a[(1, 1)] = 2.0 * g;
        m.rhs = vec![10e-3, 0.0];
        let x = solve_linear(&m).unwrap();
        assert!((x[0] - 20.0 / 3.0).abs() < 1e-12);
        assert!((x[1] - 10.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn needs_pivoting() {
        let mut m = SystemMatrix::zeros(2);
        m.a[(0, 1)] = 1.0;
        m.a[(1, 0)] = 1.0;
        m.rhs = vec![3.0, 4.0];
        assert_eq!(solve_linear(&m).unwrap(), vec![4.0, 3.0]);
    }

    #[test]
    fn random_systems_meet_residual_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = 20;
            let mut m = SystemMatrix::zeros(n);
            for r in 0..n {
                for c in 0..n {
                    m.a[(r, c)] = rng.gen_range(-1.0..1.0);
                }
                m.a[(r, r)] += n as f64;
                m.rhs[r] = rng.gen_range(-10.0..10.0);
            }
            let x = solve_linear(&m).unwrap();
            let res = m.residual(&x);
            assert!(inf_norm(&res) <= 1e-9 * inf_norm(&m.rhs));
        }
    }

    #[test]
    fn singular_reports_column() {
        let mut m = SystemMatrix::zeros(3);
        m.a[(0, 0)] = 1.0;
        m.a[(2, 2)] = 1.0;
        assert_eq!(solve_linear(&m), Err(SingularPivot { column: 1 }));
    }
}
