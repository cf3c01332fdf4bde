//! Ridge-regularized normal equations.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tikhonov term added to each diagonal block of a normal system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ridge {
    /// `λ_b = factor * trace(G_bb) / dim_b` per diagonal block `b`.
    Relative(f64),
    /// Same `λ` on every diagonal entry.
    Fixed(f64),
}

pub const DEFAULT_RELATIVE_RIDGE: f64 = 1e-8;

impl Default for Ridge {
    fn default() -> Self {
        Ridge::Relative(DEFAULT_RELATIVE_RIDGE)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Largest system solved by Cholesky; larger ones use PCG.
    pub direct_limit: usize,
    pub cg_tolerance: f64,
    pub cg_max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            direct_limit: 2048,
            cg_tolerance: 1e-10,
            cg_max_iterations: 20_000,
        }
    }
}

/// Accumulated `G^T G` and `G^T b` with a block structure (one block per band).
#[derive(Debug, Clone)]
pub struct NormalSystem {
    pub gram: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub block: usize,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub params: DVector<f64>,
    /// Ridge applied to each block.
    pub lambda: Vec<f64>,
    /// The requested ridge left the system singular and the default was used.
    pub ridge_retried: bool,
    pub iterations: Option<usize>,
}

impl NormalSystem {
    pub fn zeros(dim: usize, block: usize) -> Self {
        assert!(block > 0 && dim % block == 0);
        Self {
            gram: DMatrix::zeros(dim, dim),
            rhs: DVector::zeros(dim),
            block,
        }
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn blocks(&self) -> usize {
        self.dim() / self.block
    }

    /// Largest `|G_ij - G_ji|`.
    pub fn asymmetry(&self) -> f64 {
        (&self.gram - self.gram.transpose()).amax()
    }

    pub(crate) fn symmetrize(&mut self) {
        let t = self.gram.transpose();
        self.gram += t;
        self.gram *= 0.5;
    }

    fn lambdas(&self, ridge: Ridge) -> Vec<f64> {
        let b = self.block;
        (0..self.blocks())
            .map(|i| match ridge {
                Ridge::Fixed(l) => l,
                Ridge::Relative(f) => {
                    let tr: f64 = (i * b..(i + 1) * b).map(|d| self.gram[(d, d)]).sum();
                    f * tr / b as f64
                }
            })
            .collect()
    }

    fn regularized(&self, lambda: &[f64]) -> DMatrix<f64> {
        let mut a = self.gram.clone();
        for (i, l) in lambda.iter().enumerate() {
            for d in i * self.block..(i + 1) * self.block {
                a[(d, d)] += l;
            }
        }
        a
    }

    pub fn solve(&self, ridge: Ridge, opts: &SolverOptions) -> Result<Solution> {
        let lambda = self.lambdas(ridge);
        match self.solve_with(&lambda, opts) {
            Ok((params, iterations)) => Ok(Solution {
                params,
                lambda,
                ridge_retried: false,
                iterations,
            }),
            Err(Error::Solver { .. }) if lambda.iter().all(|l| *l == 0.0) => {
                let lambda = self.lambdas(Ridge::default());
                let (params, iterations) = self.solve_with(&lambda, opts)?;
                Ok(Solution {
                    params,
                    lambda,
                    ridge_retried: true,
                    iterations,
                })
            }
            Err(e) => Err(e),
        }
    }

    fn solve_with(&self, lambda: &[f64], opts: &SolverOptions) -> Result<(DVector<f64>, Option<usize>)> {
        let a = self.regularized(lambda);
        if self.dim() <= opts.direct_limit {
            let chol = Cholesky::new(a).ok_or_else(|| Error::Solver {
                message: "normal matrix is not positive definite".into(),
                residual: f64::NAN,
            })?;
            return Ok((chol.solve(&self.rhs), None));
        }
        let precond = self.block_preconditioner(&a)?;
        let (x, iters) = pcg(&a, &self.rhs, &precond, self.block, opts)?;
        Ok((x, Some(iters)))
    }

    fn block_preconditioner(&self, a: &DMatrix<f64>) -> Result<Vec<Cholesky<f64, Dyn>>> {
        let b = self.block;
        (0..self.blocks())
            .map(|i| {
                let blk = a.view((i * b, i * b), (b, b)).into_owned();
                Cholesky::new(blk).ok_or_else(|| Error::Solver {
                    message: format!("diagonal block {i} is not positive definite"),
                    residual: f64::NAN,
                })
            })
            .collect()
    }
}

/// Conjugate gradients preconditioned by the block-diagonal part of `a`.
fn pcg(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    precond: &[Cholesky<f64, Dyn>],
    block: usize,
    opts: &SolverOptions,
) -> Result<(DVector<f64>, usize)> {
    let apply_precond = |r: &DVector<f64>| {
        let mut z = DVector::zeros(r.len());
        for (i, c) in precond.iter().enumerate() {
            let seg = r.rows(i * block, block).into_owned();
            z.rows_mut(i * block, block).copy_from(&c.solve(&seg));
        }
        z
    };
    let bnorm = b.norm();
    let mut x = DVector::zeros(b.len());
    if bnorm == 0.0 {
        return Ok((x, 0));
    }
    let mut r = b.clone();
    let mut z = apply_precond(&r);
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    let mut rel = 1.0;
    for it in 1..=opts.cg_max_iterations {
        let ap = a * &p;
        let alpha = rz / p.dot(&ap);
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        rel = r.norm() / bnorm;
        if rel <= opts.cg_tolerance {
            return Ok((x, it));
        }
        z = apply_precond(&r);
        let rz_next = r.dot(&z);
        p = &z + &p * (rz_next / rz);
        rz = rz_next;
    }
    Err(Error::Solver {
        message: format!("conjugate gradient did not converge in {} iterations", opts.cg_max_iterations),
        residual: rel,
    })
}
