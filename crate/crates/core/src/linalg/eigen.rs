//! Cyclic complex Jacobi for Hermitian matrices.

use super::{hermitian_transpose, matmul, scaled_tol, CMatrix, Spectrum, SpectrumKind, C64};
use crate::error::{Error, Result};

const HERMITIAN_REL_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;

/// `m = vectors * diag(values) * vectors^H`, eigenvalues ascending with the
/// matching eigenvector in each column of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Spectrum,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// `‖V D V^H − m‖_F`.
    pub fn reconstruction_residual(&self, m: &CMatrix) -> f64 {
        let n = self.vectors.rows();
        let mut vd = self.vectors.clone();
        for j in 0..n {
            let d = self.values.values()[j];
            for i in 0..n {
                vd[(i, j)] *= d;
            }
        }
        let recon = matmul(&vd, &hermitian_transpose(&self.vectors)).expect("square");
        recon.sub(m).expect("same shape").frobenius_norm()
    }

    /// Column `j` of the eigenvector matrix.
    pub fn vector(&self, j: usize) -> Vec<C64> {
        self.vectors.col(j)
    }
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    let dev = m.hermitian_deviation().ok_or(Error::NotSquare {
        rows: m.rows(),
        cols: m.cols(),
    })?;
    if dev > scaled_tol(HERMITIAN_REL_TOL, m.frobenius_norm()) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(())
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Spectrum> {
    hermitian_eigen(m).map(|e| e.values)
}

pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    check_hermitian(m)?;
    let n = m.rows();
    // Symmetrize so the rotations act on an exactly Hermitian matrix.
    let mut a = CMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)?;
    let mut v = CMatrix::identity(n);
    let scale = m.frobenius_norm();
    let stop = 4.0 * n as f64 * f64::EPSILON * scale.max(f64::MIN_POSITIVE);

    let mut converged = n == 1;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= stop {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence("Hermitian Jacobi eigensolver"));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])])?;
    Ok(HermitianEigen {
        values: Spectrum::new(values, SpectrumKind::EigenvaluesOfHermitian),
        vectors,
    })
}

/// Zeroes `a[p][q]` with the unitary `U = diag(1, e^{-iφ}) · R(θ)` applied as
/// `a ← U^H a U`, accumulating `v ← v U`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let alpha = a[(p, p)].re;
    let beta = a[(q, q)].re;
    let phase = apq / r;
    let tau = (beta - alpha) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let u00 = C64::new(c, 0.0);
    let u01 = C64::new(s, 0.0);
    let u10 = -phase.conj() * s;
    let u11 = phase.conj() * c;

    let n = a.rows();
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * u00 + aiq * u10;
        a[(i, q)] = aip * u01 + aiq * u11;
    }
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = u00.conj() * apj + u10.conj() * aqj;
        a[(q, j)] = u01.conj() * apj + u11.conj() * aqj;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * u00 + viq * u10;
        v[(i, q)] = vip * u01 + viq * u11;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_and_diagonal() {
        assert_eq!(
            hermitian_eigenvalues(&CMatrix::identity(3))
                .unwrap()
                .values(),
            &[1.0, 1.0, 1.0]
        );
        let d = CMatrix::from_real(2, 2, &[3.0, 0.0, 0.0, 2.0]).unwrap();
        assert_eq!(hermitian_eigenvalues(&d).unwrap().values(), &[2.0, 3.0]);
    }

    #[test]
    fn two_by_two_symmetric() {
        // λ² − 4λ + 3 = (λ − 1)(λ − 3)
        let m = CMatrix::from_real(2, 2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        let ev = hermitian_eigenvalues(&m).unwrap();
        assert!((ev.values()[0] - 1.0).abs() < 1e-14);
        assert!((ev.values()[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        let m = CMatrix::from_rows(&[
            vec![c(4.0, 0.0), c(1.0, -2.0), c(0.0, 0.5)],
            vec![c(1.0, 2.0), c(3.0, 0.0), c(-1.0, 1.0)],
            vec![c(0.0, -0.5), c(-1.0, -1.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let e = hermitian_eigen(&m).unwrap();
        assert!(e.reconstruction_residual(&m) <= 1e-9 * m.frobenius_norm());
        let tr = m.trace().unwrap().re;
        assert!((e.values.sum() - tr).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_square_and_non_hermitian() {
        assert!(matches!(
            hermitian_eigenvalues(&CMatrix::zeros(2, 3)),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
        let m = CMatrix::from_real(2, 2, &[1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            hermitian_eigenvalues(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn tiny_asymmetry_is_tolerated() {
        let m = CMatrix::from_real(2, 2, &[1.0, 0.5, 0.5 + 1e-13, 1.0]).unwrap();
        assert!(hermitian_eigenvalues(&m).is_ok());
    }
}
