//! Linear solvers for the symmetric positive-definite systems `M x = b`.
//!
//! Two independent routes: an envelope (profile) Cholesky factorization,
//! whose fill stays inside the row profiles of the row-major 5-point stencil,
//! and unpreconditioned conjugate gradients. Both are checked against the
//! same relative-residual tolerance after every solve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pde::laplacian::SparseOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    #[default]
    Cholesky,
    ConjugateGradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub kind: SolverKind,
    /// Required `||M x - b|| / ||b||`.
    pub rel_tol: f64,
    /// CG iteration cap as a multiple of the dimension.
    pub max_iter_factor: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            kind: SolverKind::Cholesky,
            rel_tol: 1e-10,
            max_iter_factor: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
}

/// Lower-triangular factor stored row by row from the first structurally
/// nonzero column to the diagonal.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn factor(op: &SparseOperator) -> Result<Self> {
        let n = op.dimension();
        let mut first = Vec::with_capacity(n);
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for r in 0..n {
            let f = op.row(r).map(|(c, _)| c).next().unwrap_or(r).min(r);
            first.push(f);
            start.push(start[r] + r - f + 1);
        }
        let mut data = vec![0.0; start[n]];
        for r in 0..n {
            let base = start[r];
            for (c, v) in op.row(r).take_while(|&(c, _)| c <= r) {
                data[base + c - first[r]] = v;
            }
        }

        for r in 0..n {
            let fr = first[r];
            let base_r = start[r];
            for c in fr..r {
                let fc = first[c];
                let lo = fr.max(fc);
                let base_c = start[c];
                let row_r = &data[base_r + lo - fr..base_r + c - fr];
                let row_c = &data[base_c + lo - fc..base_c + c - fc];
                let dot: f64 = row_r.iter().zip(row_c).map(|(a, b)| a * b).sum();
                let diag_c = data[base_c + c - fc];
                let k = base_r + c - fr;
                data[k] = (data[k] - dot) / diag_c;
            }
            let row = &data[base_r..base_r + r - fr];
            let d = data[base_r + r - fr] - row.iter().map(|v| v * v).sum::<f64>();
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { row: r, pivot: d });
            }
            data[base_r + r - fr] = d.sqrt();
        }
        Ok(Self { first, start, data })
    }

    pub fn dimension(&self) -> usize {
        self.first.len()
    }

    /// Stored entries of the factor.
    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.dimension();
        for r in 0..n {
            let fr = self.first[r];
            let row = &self.data[self.start[r]..self.start[r + 1]];
            let dot: f64 = row[..r - fr].iter().zip(&x[fr..r]).map(|(a, b)| a * b).sum();
            x[r] = (x[r] - dot) / row[r - fr];
        }
        for r in (0..n).rev() {
            let fr = self.first[r];
            let row = &self.data[self.start[r]..self.start[r + 1]];
            let xr = x[r] / row[r - fr];
            x[r] = xr;
            for (xk, l) in x[fr..r].iter_mut().zip(&row[..r - fr]) {
                *xk -= l * xr;
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Plain conjugate gradients from `guess` (zero when `None`).
pub fn conjugate_gradient(
    op: &SparseOperator,
    b: &[f64],
    guess: Option<&[f64]>,
    rel_tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolveStats)> {
    let n = b.len();
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok((vec![0.0; n], SolveStats::default()));
    }
    let mut x = guess.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    let mut r = op.apply(&x);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let target = rel_tol * b_norm;
    let mut iterations = 0;
    while rr.sqrt() > target && iterations < max_iter {
        op.apply_into(&p, &mut ap);
        let alpha = rr / dot(&p, &ap);
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rr_next = dot(&r, &r);
        let beta = rr_next / rr;
        for k in 0..n {
            p[k] = r[k] + beta * p[k];
        }
        rr = rr_next;
        iterations += 1;
    }
    let residual = relative_residual(op, &x, b);
    if residual > rel_tol || !residual.is_finite() {
        return Err(Error::SolverDivergence {
            residual,
            tolerance: rel_tol,
            iterations,
        });
    }
    Ok((x, SolveStats { iterations, residual }))
}

pub fn relative_residual(op: &SparseOperator, x: &[f64], b: &[f64]) -> f64 {
    let b_norm = norm(b);
    let ax = op.apply(x);
    let r: f64 = ax.iter().zip(b).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt();
    if b_norm == 0.0 {
        r
    } else {
        r / b_norm
    }
}

/// An SPD operator prepared for repeated solves.
#[derive(Debug, Clone)]
pub struct LinearSolver {
    op: SparseOperator,
    factor: Option<EnvelopeCholesky>,
    options: SolverOptions,
}

impl LinearSolver {
    pub fn new(op: SparseOperator, options: SolverOptions) -> Result<Self> {
        let factor = match options.kind {
            SolverKind::Cholesky => Some(EnvelopeCholesky::factor(&op)?),
            SolverKind::ConjugateGradient => None,
        };
        Ok(Self {
            op,
            factor,
            options,
        })
    }

    pub fn operator(&self) -> &SparseOperator {
        &self.op
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    pub fn solve(&self, b: &[f64], guess: Option<&[f64]>) -> Result<(Vec<f64>, SolveStats)> {
        match &self.factor {
            Some(chol) => {
                let mut x = b.to_vec();
                chol.solve_in_place(&mut x);
                let residual = relative_residual(&self.op, &x, b);
                if residual > self.options.rel_tol || !residual.is_finite() {
                    return Err(Error::SolverDivergence {
                        residual,
                        tolerance: self.options.rel_tol,
                        iterations: 1,
                    });
                }
                Ok((x, SolveStats { iterations: 1, residual }))
            }
            None => conjugate_gradient(
                &self.op,
                b,
                guess,
                self.options.rel_tol,
                self.options.max_iter_factor * self.op.dimension().max(1),
            ),
        }
    }
}
