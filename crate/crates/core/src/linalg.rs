//! Banded solvers: scalar tridiagonal (Thomas), 2×2 block tridiagonal, and the
//! Sturm count for symmetric tridiagonal matrices.

use crate::error::{Error, Result};

/// 2×2 block, row-major.
pub type Block = [[f64; 2]; 2];

const PIVOT_FLOOR: f64 = 1e-300;

/// Solves `A x = rhs` in place for tridiagonal `A`.
///
/// `sub[i]` couples row `i+1` to column `i`, `sup[i]` couples row `i` to
/// column `i+1`; both have length `n-1`.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64]) -> Result<()> {
    let n = diag.len();
    assert_eq!(rhs.len(), n);
    assert_eq!(sub.len() + 1, n.max(1));
    assert_eq!(sup.len() + 1, n.max(1));
    if n == 0 {
        return Ok(());
    }
    let mut c = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot.abs() < PIVOT_FLOOR || !pivot.is_finite() {
        return Err(Error::SingularJacobian { row: 0, pivot });
    }
    if n > 1 {
        c[0] = sup[0] / pivot;
    }
    rhs[0] /= pivot;
    for i in 1..n {
        pivot = diag[i] - sub[i - 1] * c[i - 1];
        if pivot.abs() < PIVOT_FLOOR || !pivot.is_finite() {
            return Err(Error::SingularJacobian { row: i, pivot });
        }
        if i + 1 < n {
            c[i] = sup[i] / pivot;
        }
        rhs[i] = (rhs[i] - sub[i - 1] * rhs[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
    Ok(())
}

/// Solves a tridiagonal system whose off-diagonals are the constant `off`.
pub fn solve_tridiagonal_const_off(off: f64, diag: &[f64], rhs: &mut [f64]) -> Result<()> {
    let offs = vec![off; diag.len().saturating_sub(1)];
    solve_tridiagonal(&offs, diag, &offs, rhs)
}

fn det(b: &Block) -> f64 {
    b[0][0] * b[1][1] - b[0][1] * b[1][0]
}

fn inv(b: &Block, row: usize) -> Result<Block> {
    let d = det(b);
    let scale = b.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    if !d.is_finite() || d.abs() <= 1e-14 * scale * scale || d.abs() < PIVOT_FLOOR {
        return Err(Error::SingularJacobian { row, pivot: d });
    }
    Ok([[b[1][1] / d, -b[0][1] / d], [-b[1][0] / d, b[0][0] / d]])
}

fn mul(a: &Block, b: &Block) -> Block {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn mul_vec(a: &Block, x: &[f64; 2]) -> [f64; 2] {
    [
        a[0][0] * x[0] + a[0][1] * x[1],
        a[1][0] * x[0] + a[1][1] * x[1],
    ]
}

fn sub_block(a: &Block, b: &Block) -> Block {
    [
        [a[0][0] - b[0][0], a[0][1] - b[0][1]],
        [a[1][0] - b[1][0], a[1][1] - b[1][1]],
    ]
}

/// Block Thomas algorithm for 2×2 blocks. `lower[i]` sits in block row `i+1`,
/// `upper[i]` in block row `i`.
pub fn solve_block_tridiagonal(
    lower: &[Block],
    diag: &[Block],
    upper: &[Block],
    rhs: &mut [[f64; 2]],
) -> Result<()> {
    let n = diag.len();
    assert_eq!(rhs.len(), n);
    if n == 0 {
        return Ok(());
    }
    assert_eq!(lower.len() + 1, n);
    assert_eq!(upper.len() + 1, n);

    // c[i] = D'_i^{-1} U_i, d[i] = D'_i^{-1} (r_i - L_{i-1} d[i-1])
    let mut c: Vec<Block> = Vec::with_capacity(n);
    let mut pivot = diag[0];
    let mut pinv = inv(&pivot, 0)?;
    if n > 1 {
        c.push(mul(&pinv, &upper[0]));
    }
    rhs[0] = mul_vec(&pinv, &rhs[0]);
    for i in 1..n {
        pivot = sub_block(&diag[i], &mul(&lower[i - 1], &c[i - 1]));
        pinv = inv(&pivot, i)?;
        if i + 1 < n {
            c.push(mul(&pinv, &upper[i]));
        }
        let lx = mul_vec(&lower[i - 1], &rhs[i - 1]);
        rhs[i] = mul_vec(&pinv, &[rhs[i][0] - lx[0], rhs[i][1] - lx[1]]);
    }
    for i in (0..n - 1).rev() {
        let cx = mul_vec(&c[i], &rhs[i + 1]);
        rhs[i] = [rhs[i][0] - cx[0], rhs[i][1] - cx[1]];
    }
    Ok(())
}

/// Number of eigenvalues strictly below `x` of the symmetric tridiagonal
/// matrix with diagonal `diag` and off-diagonal `off` (length n-1).
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let q_prev = if q == 0.0 { f64::EPSILON * (1.0 + off[i - 1].abs()) } else { q };
        q = diag[i] - x - off[i - 1] * off[i - 1] / q_prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}
