//! Dense linear-algebra helpers over `faer` matrices.

use faer::{Mat, Side};

use crate::error::{Error, Result};

pub type Matrix = Mat<f64>;

/// Eigen-decomposition of a symmetric matrix; eigenvalues ascending, the
/// eigenvectors are the columns of the returned matrix.
pub fn sym_eigen(m: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let eig = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::NotConverged(format!("symmetric eigensolver: {e:?}")))?;
    let s = eig.S();
    let values: Vec<f64> = (0..m.nrows()).map(|i| s[i]).collect();
    Ok((values, eig.U().to_owned()))
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    let mut v = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::NotConverged(format!("symmetric eigensolver: {e:?}")))?;
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Largest singular value.
pub fn spectral_norm(m: &Matrix) -> Result<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0.0);
    }
    let sv = m
        .singular_values()
        .map_err(|e| Error::NotConverged(format!("singular values: {e:?}")))?;
    Ok(sv.into_iter().fold(0.0, f64::max))
}

/// Spectral norm of a symmetric matrix, `max |eigenvalue|`.
pub fn sym_spectral_norm(m: &Matrix) -> Result<f64> {
    let v = sym_eigenvalues(m)?;
    Ok(v.iter().fold(0.0f64, |acc, x| acc.max(x.abs())))
}

pub fn frobenius_sq(m: &Matrix) -> f64 {
    let mut s = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            s += m[(i, j)] * m[(i, j)];
        }
    }
    s
}

pub fn max_asymmetry(m: &Matrix) -> f64 {
    let mut d = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..i {
            d = d.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    d
}

pub fn matvec(m: &Matrix, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; m.nrows()];
    for j in 0..m.ncols() {
        let xj = x[j];
        if xj == 0.0 {
            continue;
        }
        let col = m.col(j);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += col[i] * xj;
        }
    }
    y
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// In-place Cholesky factorisation of a small dense SPD matrix stored
/// row-major; the lower factor overwrites `a`.
pub fn cholesky_in_place(a: &mut [f64], n: usize) -> Result<()> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::NotConverged(format!("matrix not positive definite at pivot {j} ({d:e})")));
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
        for k in j + 1..n {
            a[j * n + k] = 0.0;
        }
    }
    Ok(())
}

/// Solves `L y = b` in place for a lower factor stored row-major.
pub fn forward_substitute(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

/// Solves `L^T y = b` in place for a lower factor stored row-major.
pub fn back_substitute_transpose(l: &[f64], n: usize, b: &mut [f64]) {
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

/// Largest eigenvalue of a symmetric operator given by `apply`, via Lanczos
/// with full reorthogonalisation. Returns the eigenvalue and a unit vector.
pub fn lanczos_top(apply: impl Fn(&[f64]) -> Vec<f64>, n: usize, start: &[f64], tol: f64, max_iter: usize) -> Result<(f64, Vec<f64>)> {
    let max_iter = max_iter.min(n).max(1);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_iter);
    let mut alpha = Vec::with_capacity(max_iter);
    let mut beta: Vec<f64> = Vec::with_capacity(max_iter);
    let mut q = start.to_vec();
    let nq = norm2(&q);
    if nq == 0.0 {
        return Err(Error::InvalidInput("Lanczos start vector is zero".into()));
    }
    q.iter_mut().for_each(|v| *v /= nq);
    let mut prev_theta = f64::NAN;
    let mut best = (0.0, q.clone());
    for it in 0..max_iter {
        let mut w = apply(&q);
        let a = dot(&w, &q);
        alpha.push(a);
        basis.push(q.clone());
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
            }
        }
        let bnorm = norm2(&w);
        let m = alpha.len();
        let t = Matrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i == j + 1 {
                beta[j]
            } else if j == i + 1 {
                beta[i]
            } else {
                0.0
            }
        });
        let (vals, vecs) = sym_eigen(&t)?;
        let theta = vals[m - 1];
        let resid = (bnorm * vecs[(m - 1, m - 1)]).abs();
        let mut v = vec![0.0; n];
        if resid <= tol * theta.abs().max(1e-300) || it + 1 == max_iter || bnorm < 1e-14 || (theta - prev_theta).abs() <= 1e-15 * theta.abs() {
            for (k, b) in basis.iter().enumerate() {
                let c = vecs[(k, m - 1)];
                v.iter_mut().zip(b).for_each(|(vi, bi)| *vi += c * bi);
            }
            let nv = norm2(&v);
            v.iter_mut().for_each(|x| *x /= nv);
            best = (theta, v);
            if resid <= tol * theta.abs().max(1e-300) || bnorm < 1e-14 {
                return Ok(best);
            }
            if it + 1 == max_iter {
                break;
            }
        }
        prev_theta = theta;
        beta.push(bnorm);
        q = w.into_iter().map(|x| x / bnorm).collect();
    }
    Ok(best)
}
