//! Encoding, AWGN and erasure channels, and least-squares (ML) decoding.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::Generator;
use crate::error::{invalid, Error, Result};
use crate::linalg::{left_pseudo_inverse, singular_values, solve, CMatrix, C64, RANK_REL_TOL};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Field {
    Real,
    Complex,
}

/// AWGN with total per-symbol variance `sigma2` (`E[w* w] = σ²`).
///
/// Complex noise is circularly symmetric with `σ²/2` per component; real
/// noise puts all of `σ²` on the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub field: Field,
    pub sigma2: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(field: Field, sigma2: f64, seed: u64) -> Result<Self> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(invalid(format!(
                "noise variance must be positive and finite, got {sigma2}"
            )));
        }
        Ok(NoiseModel {
            field,
            sigma2,
            seed,
        })
    }
}

/// Adds noise in place from a caller-owned stream.
pub fn add_noise(rng: &mut impl Rng, v: &mut [C64], field: Field, sigma2: f64) {
    match field {
        Field::Real => {
            let sd = sigma2.sqrt();
            for x in v {
                x.re += sd * rng::real_gaussian(rng);
            }
        }
        Field::Complex => {
            let sd = sigma2.sqrt();
            for x in v {
                *x += rng::complex_gaussian(rng) * sd;
            }
        }
    }
}

/// Channel output. Erased positions hold zero and are never read.
#[derive(Debug, Clone, PartialEq)]
pub struct Reception {
    pub r: Vec<C64>,
    pub erased: Option<BTreeSet<usize>>,
}

impl Reception {
    pub fn clean(r: Vec<C64>) -> Self {
        Reception { r, erased: None }
    }

    pub fn erased_count(&self) -> usize {
        self.erased.as_ref().map_or(0, BTreeSet::len)
    }
}

/// `v = G^H u`.
pub fn encode(g: &Generator, u: &[C64]) -> Result<Vec<C64>> {
    g.matrix().adjoint_mul_vec(u)
}

/// `r = v + w`, with `w` drawn from the noise model's own seeded stream.
pub fn awgn(v: &[C64], noise: &NoiseModel) -> Result<Reception> {
    let noise = NoiseModel::new(noise.field, noise.sigma2, noise.seed)?;
    let mut stream = rng::stream(noise.seed);
    let mut r = v.to_vec();
    add_noise(&mut stream, &mut r, noise.field, noise.sigma2);
    Ok(Reception::clean(r))
}

/// Marks `positions` of `v` as lost.
pub fn erase(v: &[C64], positions: &[usize]) -> Result<Reception> {
    let mut set = BTreeSet::new();
    for &p in positions {
        if p >= v.len() {
            return Err(invalid(format!(
                "erasure position {p} out of range for length {}",
                v.len()
            )));
        }
        if !set.insert(p) {
            return Err(invalid(format!("duplicate erasure position {p}")));
        }
    }
    let mut r = v.to_vec();
    for &p in &set {
        r[p] = C64::new(0.0, 0.0);
    }
    Ok(Reception {
        r,
        erased: Some(set),
    })
}

/// ML decoder for one generator with the pseudo-inverse `(G G^H)^{-1} G`
/// computed once.
#[derive(Debug, Clone)]
pub struct Decoder {
    pinv: CMatrix,
}

impl Decoder {
    pub fn new(g: &Generator) -> Result<Self> {
        Ok(Decoder {
            pinv: left_pseudo_inverse(g.matrix())?,
        })
    }

    pub fn pseudo_inverse(&self) -> &CMatrix {
        &self.pinv
    }

    /// `argmin_u ‖r − G^H u‖²`.
    pub fn decode(&self, r: &[C64]) -> Result<Vec<C64>> {
        self.pinv.mul_vec(r)
    }

    pub(crate) fn decode_into(&self, r: &[C64], out: &mut [C64]) {
        let n = self.pinv.cols();
        for (o, row) in out.iter_mut().zip(self.pinv.as_slice().chunks_exact(n)) {
            *o = row.iter().zip(r).map(|(a, b)| a * b).sum();
        }
    }
}

pub fn ml_decode(g: &Generator, rec: &Reception) -> Result<Vec<C64>> {
    if rec.erased_count() > 0 {
        return Err(invalid("reception has erasures; use erasure_decode"));
    }
    if rec.r.len() != g.n() {
        return Err(Error::DimensionMismatch(format!(
            "received {} symbols for a length-{} code",
            rec.r.len(),
            g.n()
        )));
    }
    Decoder::new(g)?.decode(&rec.r)
}

/// Least squares on the surviving symbols.
pub fn erasure_decode(g: &Generator, rec: &Reception) -> Result<Vec<C64>> {
    if rec.r.len() != g.n() {
        return Err(Error::DimensionMismatch(format!(
            "received {} symbols for a length-{} code",
            rec.r.len(),
            g.n()
        )));
    }
    let survivors: Vec<usize> = match &rec.erased {
        None => (0..g.n()).collect(),
        Some(set) => (0..g.n()).filter(|p| !set.contains(p)).collect(),
    };
    if survivors.len() < g.k() {
        return Err(Error::Singular(format!(
            "{} surviving symbols cannot determine {} source symbols",
            survivors.len(),
            g.k()
        )));
    }
    let sub = g.matrix().select_cols(&survivors)?;
    let sv = singular_values(&sub);
    if !(sv.min() > RANK_REL_TOL * sv.max()) {
        return Err(Error::Singular(format!(
            "surviving positions {survivors:?} do not determine the source (s_min/s_max = {:e})",
            if sv.max() > 0.0 {
                sv.min() / sv.max()
            } else {
                0.0
            }
        )));
    }
    let kept: Vec<C64> = survivors.iter().map(|&p| rec.r[p]).collect();
    let rhs = CMatrix::column(&sub.mul_vec(&kept)?)?;
    Ok(solve(&sub.gram(), &rhs)?.into_vec())
}

/// Expected `‖ũ − u‖²` of the ML decoder: `σ² Σ 1/s_i²`.
pub fn analytic_mse(g: &Generator, sigma2: f64) -> Result<f64> {
    let sv = singular_values(g.matrix());
    if !(sv.min() > RANK_REL_TOL * sv.max()) {
        return Err(Error::RankDeficient {
            smallest: sv.min(),
            largest: sv.max(),
        });
    }
    Ok(sigma2 * sv.values().iter().map(|s| 1.0 / (s * s)).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{make_dct, make_dft, make_random, make_repetition};
    use crate::linalg::norm_sqr;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn encode_cases() {
        let rep = make_repetition(3, 2).unwrap();
        assert!(encode(&rep, &[c(0.0, 0.0); 3])
            .unwrap()
            .iter()
            .all(|z| *z == c(0.0, 0.0)));
        let u = [c(1.0, -1.0), c(2.0, 0.5), c(-3.0, 0.0)];
        let v = encode(&rep, &u).unwrap();
        assert_eq!(&v[..3], &u);
        assert_eq!(&v[3..], &u);
        let dft = make_dft(7, &[0, 2, 3]).unwrap();
        let v = encode(&dft, &u).unwrap();
        assert!((norm_sqr(&v) - norm_sqr(&u)).abs() < 1e-12);
        assert!(encode(&rep, &u[..2]).is_err());
    }

    #[test]
    fn awgn_variance_and_determinism() {
        let v = vec![c(0.0, 0.0); 1_000_000];
        for field in [Field::Real, Field::Complex] {
            let noise = NoiseModel::new(field, 0.3, 9).unwrap();
            let rec = awgn(&v, &noise).unwrap();
            let var = norm_sqr(&rec.r) / v.len() as f64;
            assert!((var - 0.3).abs() < 0.003, "{field:?}: {var}");
            if field == Field::Real {
                assert!(rec.r.iter().all(|z| z.im == 0.0));
            } else {
                let re_var: f64 = rec.r.iter().map(|z| z.re * z.re).sum::<f64>() / v.len() as f64;
                assert!((re_var - 0.15).abs() < 0.0015);
            }
            assert_eq!(rec, awgn(&v, &noise).unwrap());
        }
        assert!(NoiseModel::new(Field::Real, 0.0, 0).is_err());
        let bad = NoiseModel {
            field: Field::Real,
            sigma2: 0.0,
            seed: 0,
        };
        assert!(awgn(&v[..4], &bad).is_err());
    }

    #[test]
    fn ml_decode_cases() {
        let g = make_random(4, 9, 3).unwrap();
        let u = [c(1.0, 2.0), c(-0.5, 0.0), c(0.25, -1.0), c(3.0, 3.0)];
        let v = encode(&g, &u).unwrap();
        let est = ml_decode(&g, &Reception::clean(v)).unwrap();
        for (a, b) in est.iter().zip(&u) {
            assert!((a - b).norm() < 1e-9);
        }

        let dct = make_dct(6, &[0, 1, 4]).unwrap();
        let r: Vec<C64> = (0..6)
            .map(|i| c(i as f64 * 0.3 - 1.0, 0.1 * i as f64))
            .collect();
        let est = ml_decode(&dct, &Reception::clean(r.clone())).unwrap();
        let direct = dct.matrix().mul_vec(&r).unwrap();
        for (a, b) in est.iter().zip(&direct) {
            assert!((a - b).norm() < 1e-12);
        }

        let rep = make_repetition(2, 2).unwrap();
        let r = vec![c(1.0, 0.0), c(2.0, 2.0), c(3.0, 0.0), c(0.0, -2.0)];
        let est = ml_decode(&rep, &Reception::clean(r)).unwrap();
        assert!((est[0] - c(2.0, 0.0)).norm() < 1e-14);
        assert!((est[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn erasure_recovery_on_mds_code() {
        let g = make_dct(8, &[0, 1, 2, 3]).unwrap();
        let u = [c(0.3, 0.0), c(-1.0, 0.0), c(0.7, 0.0), c(0.1, 0.0)];
        let v = encode(&g, &u).unwrap();
        let mut pos = vec![0, 1, 2, 3];
        loop {
            let rec = erase(&v, &pos).unwrap();
            let est = erasure_decode(&g, &rec).unwrap();
            for (a, b) in est.iter().zip(&u) {
                assert!((a - b).norm() < 1e-9, "erased {pos:?}");
            }
            if !crate::metrics::next_combination(&mut pos, 8) {
                break;
            }
        }
    }

    #[test]
    fn erasure_failures() {
        let rep = make_repetition(2, 2).unwrap();
        let v = encode(&rep, &[c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        let rec = erase(&v, &[0, 2]).unwrap();
        assert!(matches!(
            erasure_decode(&rep, &rec),
            Err(Error::Singular(_))
        ));
        let rec = erase(&v, &[0, 1, 2]).unwrap();
        assert!(matches!(
            erasure_decode(&rep, &rec),
            Err(Error::Singular(_))
        ));
        assert!(erase(&v, &[4]).is_err());
        assert!(erase(&v, &[1, 1]).is_err());
        assert!(ml_decode(&rep, &erase(&v, &[1]).unwrap()).is_err());
    }

    #[test]
    fn zero_erasures_match_ml() {
        let g = make_random(3, 7, 21).unwrap();
        let noise = NoiseModel::new(Field::Complex, 0.5, 4).unwrap();
        let v = encode(&g, &[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, -1.0)]).unwrap();
        let rec = awgn(&v, &noise).unwrap();
        let a = ml_decode(&g, &rec).unwrap();
        let b = erasure_decode(&g, &erase(&rec.r, &[]).unwrap()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-9);
        }
    }

    #[test]
    fn analytic_mse_cases() {
        let dct = make_dct(60, &(0..30).collect::<Vec<_>>()).unwrap();
        assert!((analytic_mse(&dct, 0.2).unwrap() - 30.0 * 0.2).abs() < 1e-9);
        let rep = make_repetition(5, 4).unwrap();
        assert!((analytic_mse(&rep, 1.0).unwrap() - 5.0 / 4.0).abs() < 1e-12);
        let g = Generator::from_matrix(
            CMatrix::from_real(2, 3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0]).unwrap(),
        )
        .unwrap();
        assert!((analytic_mse(&g, 0.8).unwrap() - 0.8 * 1.25).abs() < 1e-15);
    }
}
