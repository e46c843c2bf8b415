use super::{singular_values, CMatrix, C64};
use crate::error::{Error, Result};

/// Full row rank means smallest singular value above this fraction of the largest.
pub const RANK_REL_TOL: f64 = 1e-10;

/// Solves `a x = b` (square `a`, any number of right-hand columns) by LU with
/// partial pivoting.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if b.rows() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "system {}x{} with right-hand side of {} rows",
            a.rows(),
            a.cols(),
            b.rows()
        )));
    }
    let n = a.rows();
    let nrhs = b.cols();
    let mut lu = a.clone();
    let mut x = b.clone();
    let scale = a.frobenius_norm();

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| lu[(i, col)].norm().total_cmp(&lu[(j, col)].norm()))
            .expect("non-empty range");
        if lu[(pivot, col)].norm() <= f64::EPSILON * scale {
            return Err(Error::Singular(format!("zero pivot in column {col}")));
        }
        if pivot != col {
            for j in 0..n {
                let tmp = lu[(col, j)];
                lu[(col, j)] = lu[(pivot, j)];
                lu[(pivot, j)] = tmp;
            }
            for j in 0..nrhs {
                let tmp = x[(col, j)];
                x[(col, j)] = x[(pivot, j)];
                x[(pivot, j)] = tmp;
            }
        }
        let inv = C64::new(1.0, 0.0) / lu[(col, col)];
        for i in col + 1..n {
            let f = lu[(i, col)] * inv;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for j in col..n {
                let v = lu[(col, j)];
                lu[(i, j)] -= f * v;
            }
            for j in 0..nrhs {
                let v = x[(col, j)];
                x[(i, j)] -= f * v;
            }
        }
    }
    for col in (0..n).rev() {
        let inv = C64::new(1.0, 0.0) / lu[(col, col)];
        for j in 0..nrhs {
            let mut acc = x[(col, j)];
            for l in col + 1..n {
                acc -= lu[(col, l)] * x[(l, j)];
            }
            x[(col, j)] = acc * inv;
        }
    }
    Ok(x)
}

/// `B = (G G^H)^{-1} G`, so that `B G^H = I_k`.
pub fn left_pseudo_inverse(g: &CMatrix) -> Result<CMatrix> {
    let sv = singular_values(g);
    let largest = sv.max();
    let smallest = sv.min();
    if g.rows() > g.cols() || !(smallest > RANK_REL_TOL * largest) {
        return Err(Error::RankDeficient {
            smallest: if g.rows() > g.cols() { 0.0 } else { smallest },
            largest,
        });
    }
    solve(&g.gram(), g)
}
