//! Solvers for the reduced SPD system: envelope Cholesky for small problems,
//! Jacobi-preconditioned conjugate gradient for large ones.

use crate::error::{Result, VemError};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Direct below `size_threshold` unknowns, CG above.
    Auto,
    Direct,
    Cg,
}

impl std::str::FromStr for Method {
    type Err = VemError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Method::Auto),
            "direct" => Ok(Method::Direct),
            "cg" => Ok(Method::Cg),
            other => Err(VemError::Config(format!(
                "unknown solver '{other}' (expected auto, direct or cg)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preconditioner {
    Jacobi,
    None,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub method: Method,
    /// Auto mode switches from direct to CG at this system size.
    pub size_threshold: usize,
    /// Relative residual target of the CG iteration.
    pub tolerance: f64,
    /// CG iteration cap; defaults to 10 sqrt(N) + 100 when unset.
    pub max_iterations: Option<usize>,
    pub preconditioner: Preconditioner,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            method: Method::Auto,
            size_threshold: 2000,
            tolerance: 1e-10,
            max_iterations: None,
            preconditioner: Preconditioner::Jacobi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodUsed {
    Direct,
    Cg,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveStats {
    pub method: MethodUsed,
    pub iterations: usize,
    /// True relative residual of the returned solution.
    pub relative_residual: f64,
}

/// Solve the SPD system with the configured method.
pub fn solve(matrix: &CsrMatrix, rhs: &[f64], config: &SolverConfig) -> Result<(Vec<f64>, SolveStats)> {
    assert_eq!(matrix.n, rhs.len());
    let n = matrix.n;
    let rhs_norm = norm(rhs);
    if n == 0 || rhs_norm == 0.0 {
        return Ok((
            vec![0.0; n],
            SolveStats {
                method: MethodUsed::Direct,
                iterations: 0,
                relative_residual: 0.0,
            },
        ));
    }
    let use_direct = match config.method {
        Method::Direct => true,
        Method::Cg => false,
        Method::Auto => n < config.size_threshold,
    };
    if use_direct {
        let factor = EnvelopeCholesky::factor(matrix)?;
        let x = factor.solve(rhs);
        let residual = relative_residual(matrix, &x, rhs);
        Ok((
            x,
            SolveStats {
                method: MethodUsed::Direct,
                iterations: 0,
                relative_residual: residual,
            },
        ))
    } else {
        let max_iter = config
            .max_iterations
            .unwrap_or_else(|| 10 * (n as f64).sqrt().ceil() as usize + 100);
        let jacobi = config.preconditioner == Preconditioner::Jacobi;
        let (x, iterations) = pcg(matrix, rhs, config.tolerance, max_iter, jacobi)?;
        let residual = relative_residual(matrix, &x, rhs);
        Ok((
            x,
            SolveStats {
                method: MethodUsed::Cg,
                iterations,
                relative_residual: residual,
            },
        ))
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    let r: f64 = ax
        .iter()
        .zip(b)
        .map(|(axi, bi)| (bi - axi) * (bi - axi))
        .sum::<f64>()
        .sqrt();
    let nb = norm(b);
    if nb == 0.0 {
        r
    } else {
        r / nb
    }
}

/// Cholesky factorization in envelope (profile) storage: row i holds the
/// columns from its first structural nonzero up to the diagonal, fill-in
/// included.
struct EnvelopeCholesky {
    first: Vec<usize>,
    offsets: Vec<usize>,
    values: Vec<f64>,
}

impl EnvelopeCholesky {
    fn factor(a: &CsrMatrix) -> Result<EnvelopeCholesky> {
        let n = a.n;
        let mut first = vec![0usize; n];
        for i in 0..n {
            let (cols, _) = a.row(i);
            first[i] = cols.iter().copied().filter(|&c| c <= i).min().unwrap_or(i);
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + (i - first[i] + 1);
        }
        let mut values = vec![0.0; offsets[n]];
        for i in 0..n {
            let (cols, vals) = a.row(i);
            for (c, v) in cols.iter().zip(vals) {
                if *c <= i {
                    values[offsets[i] + (c - first[i])] = *v;
                }
            }
        }

        let mut chol = EnvelopeCholesky {
            first,
            offsets,
            values,
        };
        for i in 0..n {
            for j in chol.first[i]..i {
                let lo = chol.first[i].max(chol.first[j]);
                let mut sum = chol.values[chol.offsets[i] + (j - chol.first[i])];
                for k in lo..j {
                    sum -= chol.values[chol.offsets[i] + (k - chol.first[i])]
                        * chol.values[chol.offsets[j] + (k - chol.first[j])];
                }
                let djj = chol.values[chol.offsets[j] + (j - chol.first[j])];
                chol.values[chol.offsets[i] + (j - chol.first[i])] = sum / djj;
            }
            let mut diag = chol.values[chol.offsets[i] + (i - chol.first[i])];
            for k in chol.first[i]..i {
                let l = chol.values[chol.offsets[i] + (k - chol.first[i])];
                diag -= l * l;
            }
            if diag <= 0.0 || !diag.is_finite() {
                return Err(VemError::NotSpd { row: i });
            }
            chol.values[chol.offsets[i] + (i - chol.first[i])] = diag.sqrt();
        }
        Ok(chol)
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut x = b.to_vec();
        // Forward substitution L y = b.
        for i in 0..n {
            let mut sum = x[i];
            for k in self.first[i]..i {
                sum -= self.values[self.offsets[i] + (k - self.first[i])] * x[k];
            }
            x[i] = sum / self.values[self.offsets[i] + (i - self.first[i])];
        }
        // Backward substitution L^T x = y.
        for i in (0..n).rev() {
            let xi = x[i] / self.values[self.offsets[i] + (i - self.first[i])];
            x[i] = xi;
            for k in self.first[i]..i {
                x[k] -= self.values[self.offsets[i] + (k - self.first[i])] * xi;
            }
        }
        x
    }
}

/// Jacobi-preconditioned conjugate gradient. Convergence is declared on the
/// recurrence residual and confirmed against the true residual; if the check
/// fails the iteration restarts from the current iterate.
fn pcg(
    a: &CsrMatrix,
    b: &[f64],
    tolerance: f64,
    max_iter: usize,
    jacobi: bool,
) -> Result<(Vec<f64>, usize)> {
    let n = a.n;
    let inv_diag: Vec<f64> = if jacobi {
        let d = a.diagonal();
        if let Some(row) = d.iter().position(|&v| v <= 0.0) {
            return Err(VemError::NotSpd { row });
        }
        d.iter().map(|v| 1.0 / v).collect()
    } else {
        vec![1.0; n]
    };
    let b_norm = norm(b);
    let target = tolerance * b_norm;

    let mut x = vec![0.0; n];
    let mut iterations = 0;

    loop {
        let ax = a.mul_vec(&x);
        let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
        if norm(&r) <= target {
            return Ok((x, iterations));
        }
        let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
        let mut p = z.clone();
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();

        while iterations < max_iter {
            let ap = a.mul_vec(&p);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if pap <= 0.0 || !pap.is_finite() {
                return Err(VemError::NotSpd { row: 0 });
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            iterations += 1;
            if norm(&r) <= target {
                break;
            }
            for i in 0..n {
                z[i] = r[i] * inv_diag[i];
            }
            let rz_next: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }

        // Confirm with the true residual; restart if the recurrence drifted.
        let ax = a.mul_vec(&x);
        let true_res = b
            .iter()
            .zip(&ax)
            .map(|(bi, axi)| (bi - axi) * (bi - axi))
            .sum::<f64>()
            .sqrt();
        if true_res <= target {
            return Ok((x, iterations));
        }
        if iterations >= max_iter {
            return Err(VemError::CgDidNotConverge {
                max_iter,
                residual: true_res / b_norm.max(f64::MIN_POSITIVE),
            });
        }
    }
}
