//! Singular values by one-sided (Hestenes) Jacobi.
//!
//! Works on the tall orientation of the input so the number of columns being
//! orthogonalized is `min(rows, cols)`. Does not go through `G G^H`, which
//! keeps it an independent route from the Hermitian eigensolver.

use super::{hermitian_transpose, CMatrix, Spectrum, SpectrumKind, C64};

const MAX_SWEEPS: usize = 100;

pub fn singular_values(g: &CMatrix) -> Spectrum {
    // Columns of `work` get orthogonalized; tall orientation.
    let work = if g.rows() >= g.cols() {
        g.clone()
    } else {
        hermitian_transpose(g)
    };
    let m = work.rows();
    let k = work.cols();
    let mut cols: Vec<Vec<C64>> = (0..k).map(|j| work.col(j)).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k.saturating_sub(1) {
            for q in p + 1..k {
                rotated |= orthogonalize_pair(&mut cols, p, q, m);
            }
        }
        if !rotated {
            break;
        }
    }

    let values = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    Spectrum::new(values, SpectrumKind::SingularValues)
}

fn orthogonalize_pair(cols: &mut [Vec<C64>], p: usize, q: usize, m: usize) -> bool {
    let (alpha, beta, gamma) = {
        let a = &cols[p];
        let b = &cols[q];
        let alpha: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        let beta: f64 = b.iter().map(|z| z.norm_sqr()).sum();
        let gamma: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
        (alpha, beta, gamma)
    };
    let r = gamma.norm();
    if r == 0.0 || r <= f64::EPSILON * (alpha * beta).sqrt() {
        return false;
    }
    let phase = gamma / r;
    let tau = (beta - alpha) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // Same unitary as the Hermitian Jacobi step applied to the 2x2 Gram block.
    let u10 = -phase.conj() * s;
    let u11 = phase.conj() * c;
    #[allow(clippy::needless_range_loop)] // two columns borrowed at once
    for i in 0..m {
        let x = cols[p][i];
        let y = cols[q][i];
        cols[p][i] = x * c + y * u10;
        cols[q][i] = x * s + y * u11;
    }
    true
}
