//! Structural metrics of a linear analog code.
//!
//! The squared Euclidean distance ratio between two sources is
//! `‖G^H(u − u')‖² / ‖u − u'‖²`, a Rayleigh quotient of `G G^H`. Its
//! infimum is therefore the smallest eigenvalue of `G G^H`, which can never
//! exceed the mean eigenvalue `Γ = trace(G G^H)/k`. Codes meeting that bound
//! (all eigenvalues equal) are called MDRE here.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::codes::Generator;
use crate::error::{invalid, Error, Result};
use crate::linalg::{hermitian_eigen, norm_sqr, singular_values, Spectrum, C64};
use crate::rng;

pub const DEFAULT_MDRE_REL_TOL: f64 = 1e-8;
pub const DEFAULT_MDS_COND_TOL: f64 = 1e-10;
/// Largest subset count the exhaustive MDS scan accepts.
pub const MAX_EXHAUSTIVE_SUBSETS: u64 = 1_000_000;

/// `trace(G G^H) / k`.
pub fn encoding_power_gain(g: &Generator) -> f64 {
    let m = g.matrix();
    m.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>() / m.rows() as f64
}

pub fn gram_spectrum(g: &Generator) -> Spectrum {
    gram_eigen(g).values
}

fn gram_eigen(g: &Generator) -> crate::linalg::HermitianEigen {
    hermitian_eigen(&g.matrix().gram()).expect("G G^H is Hermitian by construction")
}

/// `‖G^H(u − u2)‖² / ‖u − u2‖²`.
pub fn distance_ratio(g: &Generator, u: &[C64], u2: &[C64]) -> Result<f64> {
    if u.len() != g.k() || u2.len() != g.k() {
        return Err(Error::DimensionMismatch(format!(
            "sources must have length k={}, got {} and {}",
            g.k(),
            u.len(),
            u2.len()
        )));
    }
    let diff: Vec<C64> = u.iter().zip(u2).map(|(a, b)| a - b).collect();
    let denom = norm_sqr(&diff);
    if denom == 0.0 {
        return Err(invalid("distance ratio is undefined for identical sources"));
    }
    Ok(norm_sqr(&g.matrix().adjoint_mul_vec_unchecked(&diff)) / denom)
}

pub fn min_distance_ratio(g: &Generator) -> f64 {
    gram_spectrum(g).min()
}

/// Smallest eigenvalue of `G G^H` and a unit source direction attaining it.
pub fn min_distance_direction(g: &Generator) -> (f64, Vec<C64>) {
    let e = gram_eigen(g);
    (e.values.min(), e.vector(0))
}

/// Monte Carlo mean with a 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub half_width: f64,
    pub trials: usize,
}

impl Estimate {
    /// From running sums of `x` and `x²`.
    pub fn from_sums(sum: f64, sum_sq: f64, trials: usize) -> Self {
        let n = trials as f64;
        let mean = sum / n;
        let var = if trials > 1 {
            ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        Estimate {
            mean,
            half_width: 1.96 * (var / n).sqrt(),
            trials,
        }
    }

    pub fn contains(&self, x: f64, widths: f64) -> bool {
        (self.mean - x).abs() <= widths * self.half_width
    }
}

/// Mean of `distance_ratio(u, 0)` over standard complex Gaussian `u`.
pub fn average_distance_ratio(g: &Generator, trials: usize, seed: u64) -> Result<Estimate> {
    if trials == 0 {
        return Err(invalid("trials must be >= 1"));
    }
    let mut stream = rng::stream(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    let mut u = vec![C64::new(0.0, 0.0); g.k()];
    for _ in 0..trials {
        u.iter_mut()
            .for_each(|x| *x = rng::complex_gaussian(&mut stream));
        let r = norm_sqr(&g.matrix().adjoint_mul_vec_unchecked(&u)) / norm_sqr(&u);
        sum += r;
        sum_sq += r * r;
    }
    Ok(Estimate::from_sums(sum, sum_sq, trials))
}

/// `(d_max − d_min) / d_max` over the eigenvalues of `G G^H`.
pub fn eigenvalue_spread(spectrum: &Spectrum) -> f64 {
    let max = spectrum.max();
    if max <= 0.0 {
        return 0.0;
    }
    (max - spectrum.min()) / max
}

fn check_mdre_tol(rel_tol: f64) -> Result<()> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(invalid(format!(
            "MDRE tolerance must lie in (0, 1), got {rel_tol}"
        )));
    }
    Ok(())
}

/// All eigenvalues of `G G^H` equal, up to relative spread `rel_tol`.
pub fn is_mdre(g: &Generator, rel_tol: f64) -> Result<bool> {
    check_mdre_tol(rel_tol)?;
    Ok(eigenvalue_spread(&gram_spectrum(g)) <= rel_tol)
}

/// Single-symbol source whose codeword has squared weight below `epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub source: Vec<C64>,
    /// Position of the one nonzero source symbol.
    pub index: usize,
    pub value: f64,
    pub weight: f64,
    pub epsilon: f64,
}

/// Puts `u_i` at half of `√(ε / ‖row_i(G)‖²)` on the first nonzero row `i`,
/// so `‖G^H u‖² = ε/4`.
pub fn small_weight_witness(g: &Generator, epsilon: f64) -> Result<Witness> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(invalid(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    let m = g.matrix();
    let (index, row_energy) = (0..m.rows())
        .map(|i| (i, norm_sqr(m.row(i))))
        .find(|&(_, e)| e > 0.0)
        .ok_or_else(|| invalid("generator is the zero matrix"))?;
    let value = 0.5 * (epsilon / row_energy).sqrt();
    if value == 0.0 || !value.is_finite() {
        return Err(Error::Underflow(format!(
            "source amplitude for epsilon={epsilon:e} is not representable"
        )));
    }
    let mut source = vec![C64::new(0.0, 0.0); m.rows()];
    source[index] = C64::new(value, 0.0);
    let weight = norm_sqr(&m.adjoint_mul_vec_unchecked(&source));
    if weight == 0.0 {
        return Err(Error::Underflow(format!(
            "codeword weight for epsilon={epsilon:e} underflowed to zero"
        )));
    }
    if !(weight < epsilon) {
        return Err(Error::Underflow(format!(
            "rounding left weight {weight:e} at or above epsilon={epsilon:e}"
        )));
    }
    Ok(Witness {
        source,
        index,
        value,
        weight,
        epsilon,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MdsVerdict {
    #[serde(rename = "MDS")]
    Mds,
    #[serde(rename = "NotMDS")]
    NotMds,
    #[serde(rename = "SampledLikelyMDS")]
    SampledLikelyMds,
}

impl std::fmt::Display for MdsVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MdsVerdict::Mds => "MDS",
            MdsVerdict::NotMds => "NotMDS",
            MdsVerdict::SampledLikelyMds => "SampledLikelyMDS",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdsMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdsReport {
    pub verdict: MdsVerdict,
    /// Smallest `s_min / s_max` seen over the checked k-symbol submatrices.
    pub worst_condition: f64,
    /// Codeword positions of that submatrix.
    pub worst_positions: Vec<usize>,
    pub subsets_checked: u64,
    pub cond_tol: f64,
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

fn condition_ratio(g: &Generator, positions: &[usize]) -> f64 {
    let sub = g
        .matrix()
        .select_cols(positions)
        .expect("positions in range");
    let sv = singular_values(&sub);
    if sv.max() == 0.0 {
        0.0
    } else {
        sv.min() / sv.max()
    }
}

/// Any `k` codeword symbols determine the source: every k-column submatrix
/// of `G` (equivalently k-row submatrix of `G^H`) has `s_min > cond_tol · s_max`.
pub fn is_mds(g: &Generator, mode: MdsMode, cond_tol: f64) -> Result<MdsReport> {
    if !(cond_tol > 0.0 && cond_tol < 1.0) {
        return Err(invalid(format!(
            "condition tolerance must lie in (0, 1), got {cond_tol}"
        )));
    }
    let (n, k) = (g.n(), g.k());
    let mut worst = f64::INFINITY;
    let mut worst_positions = Vec::new();
    let mut checked = 0u64;
    let mut visit = |positions: &[usize]| {
        let ratio = condition_ratio(g, positions);
        checked += 1;
        if ratio < worst {
            worst = ratio;
            worst_positions = positions.to_vec();
        }
    };
    match mode {
        MdsMode::Exhaustive => {
            let total = binomial(n, k);
            if total > MAX_EXHAUSTIVE_SUBSETS {
                return Err(invalid(format!(
                    "exhaustive MDS check needs C({n},{k}) = {total} > {MAX_EXHAUSTIVE_SUBSETS} subsets; use sampled mode"
                )));
            }
            let mut comb: Vec<usize> = (0..k).collect();
            loop {
                visit(&comb);
                if !next_combination(&mut comb, n) {
                    break;
                }
            }
        }
        MdsMode::Sampled { samples, seed } => {
            if samples == 0 {
                return Err(invalid("sampled MDS check needs samples >= 1"));
            }
            let mut stream = rng::stream(seed);
            for _ in 0..samples {
                let mut positions = sample(&mut stream, n, k).into_vec();
                positions.sort_unstable();
                visit(&positions);
            }
        }
    }
    let pass = worst > cond_tol;
    let verdict = match (pass, mode) {
        (false, _) => MdsVerdict::NotMds,
        (true, MdsMode::Exhaustive) => MdsVerdict::Mds,
        (true, MdsMode::Sampled { .. }) => MdsVerdict::SampledLikelyMds,
    };
    Ok(MdsReport {
        verdict,
        worst_condition: worst,
        worst_positions,
        subsets_checked: checked,
        cond_tol,
    })
}

/// Advances to the next k-subset of `0..n` in lexicographic order.
pub(crate) fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if comb[i] < n - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub mdre_rel_tol: f64,
    pub mds_cond_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            mdre_rel_tol: DEFAULT_MDRE_REL_TOL,
            mds_cond_tol: DEFAULT_MDS_COND_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub gamma: f64,
    pub eigenvalues: Vec<f64>,
    pub min_distance_ratio: f64,
    pub mdre: bool,
    pub eigenvalue_spread: f64,
    pub mds: MdsVerdict,
    pub mds_worst_condition: f64,
    pub mds_worst_positions: Vec<usize>,
    pub mse_lower_bound_per_sigma2: f64,
    pub tolerances: Tolerances,
}

impl MetricsReport {
    /// Exhaustive MDS scan when it fits under [`MAX_EXHAUSTIVE_SUBSETS`],
    /// otherwise `samples` random subsets.
    pub fn compute(g: &Generator, tol: Tolerances, samples: usize, seed: u64) -> Result<Self> {
        let mode = if binomial(g.n(), g.k()) <= MAX_EXHAUSTIVE_SUBSETS {
            MdsMode::Exhaustive
        } else {
            MdsMode::Sampled { samples, seed }
        };
        Self::compute_with(g, tol, mode)
    }

    pub fn compute_with(g: &Generator, tol: Tolerances, mode: MdsMode) -> Result<Self> {
        check_mdre_tol(tol.mdre_rel_tol)?;
        let gamma = encoding_power_gain(g);
        let spectrum = gram_spectrum(g);
        let spread = eigenvalue_spread(&spectrum);
        let min_ratio = spectrum.min();
        assert!(
            min_ratio <= gamma * (1.0 + 1e-9),
            "minimum distance ratio {min_ratio} exceeds power gain {gamma}"
        );
        let mds = is_mds(g, mode, tol.mds_cond_tol)?;
        Ok(MetricsReport {
            gamma,
            eigenvalues: spectrum.values().to_vec(),
            min_distance_ratio: min_ratio,
            mdre: spread <= tol.mdre_rel_tol,
            eigenvalue_spread: spread,
            mds: mds.verdict,
            mds_worst_condition: mds.worst_condition,
            mds_worst_positions: mds.worst_positions,
            mse_lower_bound_per_sigma2: g.k() as f64 / gamma,
            tolerances: tol,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{make_dct, make_dft, make_dst, make_random, make_repetition};
    use crate::linalg::CMatrix;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn power_gain_values() {
        assert!((encoding_power_gain(&make_dct(8, &[0, 1, 2]).unwrap()) - 1.0).abs() < 1e-12);
        assert_eq!(encoding_power_gain(&make_repetition(5, 3).unwrap()), 3.0);
        let g = make_random(3, 7, 1).unwrap();
        let ratio = encoding_power_gain(&g.scaled(1.5).unwrap()) / encoding_power_gain(&g);
        assert!((ratio - 2.25).abs() < 1e-12);
    }

    #[test]
    fn distance_ratio_cases() {
        let u = [C64::new(1.0, 2.0), r(-0.5), C64::new(0.0, 3.0)];
        let z = [r(0.0); 3];
        let dft = make_dft(5, &[0, 2, 3]).unwrap();
        assert!((distance_ratio(&dft, &u, &z).unwrap() - 1.0).abs() < 1e-12);
        let rep = make_repetition(3, 2).unwrap();
        assert!((distance_ratio(&rep, &u, &[r(1.0), r(1.0), r(1.0)]).unwrap() - 2.0).abs() < 1e-12);

        // G G^H = diag(1, 4).
        let g = Generator::from_matrix(
            CMatrix::from_real(2, 3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0]).unwrap(),
        )
        .unwrap();
        assert!(
            (distance_ratio(&g, &[r(1.0), r(0.0)], &[r(0.0), r(0.0)]).unwrap() - 1.0).abs() < 1e-15
        );
        assert!(matches!(
            distance_ratio(&g, &[r(1.0), r(1.0)], &[r(1.0), r(1.0)]),
            Err(Error::InvalidParameter(_))
        ));
        assert!(distance_ratio(&g, &[r(1.0)], &[r(0.0)]).is_err());
    }

    #[test]
    fn min_ratio_of_mdre_codes() {
        assert!((min_distance_ratio(&make_dct(10, &[0, 1, 2, 3]).unwrap()) - 1.0).abs() < 1e-12);
        assert!((min_distance_ratio(&make_repetition(4, 3).unwrap()) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn min_ratio_probe_cross_check() {
        let g = make_random(4, 9, 5).unwrap();
        let (dmin, dir) = min_distance_direction(&g);
        let zero = vec![r(0.0); 4];
        let attained = distance_ratio(&g, &dir, &zero).unwrap();
        assert!((attained - dmin).abs() <= 1e-9 * dmin.max(1.0));
        let mut stream = rng::stream(123);
        for _ in 0..10_000 {
            let u: Vec<C64> = (0..4).map(|_| rng::complex_gaussian(&mut stream)).collect();
            assert!(distance_ratio(&g, &u, &zero).unwrap() >= dmin - 1e-9);
        }
    }

    #[test]
    fn average_ratio() {
        let dst = make_dst(6, &[0, 1, 4]).unwrap();
        let e = average_distance_ratio(&dst, 500, 3).unwrap();
        assert!((e.mean - 1.0).abs() < 1e-12 && e.half_width < 1e-12);
        let rep = make_repetition(3, 4).unwrap();
        let e = average_distance_ratio(&rep, 500, 3).unwrap();
        assert!((e.mean - 4.0).abs() < 1e-12 && e.half_width < 1e-12);
        let g = make_random(4, 8, 11).unwrap();
        let e = average_distance_ratio(&g, 200_000, 4).unwrap();
        assert!(
            e.contains(encoding_power_gain(&g), 1.0),
            "{e:?} vs {}",
            encoding_power_gain(&g)
        );
        assert!(average_distance_ratio(&g, 0, 0).is_err());
    }

    #[test]
    fn mdre_verdicts() {
        assert!(is_mdre(&make_dft(8, &[1, 2, 5]).unwrap(), DEFAULT_MDRE_REL_TOL).unwrap());
        assert!(is_mdre(&make_dct(8, &[0, 3]).unwrap(), DEFAULT_MDRE_REL_TOL).unwrap());
        assert!(is_mdre(&make_dst(8, &[7]).unwrap(), DEFAULT_MDRE_REL_TOL).unwrap());
        assert!(is_mdre(&make_repetition(4, 2).unwrap(), DEFAULT_MDRE_REL_TOL).unwrap());
        let g = make_random(4, 8, 2).unwrap();
        assert!(!is_mdre(&g, DEFAULT_MDRE_REL_TOL).unwrap());
        assert!(eigenvalue_spread(&gram_spectrum(&g)) > 1e-3);
        assert!(is_mdre(&g, 0.0).is_err());
        assert!(is_mdre(&g, 1.0).is_err());
    }

    #[test]
    fn witness_cases() {
        let dct = make_dct(8, &[0, 1, 2, 3]).unwrap();
        let w = small_weight_witness(&dct, 1e-6).unwrap();
        assert!((w.weight - w.value * w.value).abs() < 1e-20);
        assert!(w.weight < 1e-6);
        let rep = make_repetition(3, 2).unwrap();
        let w = small_weight_witness(&rep, 1e-4).unwrap();
        assert!((w.weight - 2.0 * w.value * w.value).abs() < 1e-18);
        assert!(w.weight < 1e-4);
        assert!(matches!(
            small_weight_witness(&rep, 0.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(small_weight_witness(&rep, -1.0).is_err());
        let tiny = small_weight_witness(&dct, 1e-300).unwrap();
        assert!(tiny.weight > 0.0 && tiny.weight < 1e-300);
    }

    #[test]
    fn mds_verdicts() {
        let dft = make_dft(8, &[0, 1, 2, 3]).unwrap();
        assert_eq!(
            is_mds(&dft, MdsMode::Exhaustive, DEFAULT_MDS_COND_TOL)
                .unwrap()
                .verdict,
            MdsVerdict::Mds
        );
        let dct = make_dct(8, &[0, 1, 2, 3]).unwrap();
        let rep = is_mds(&dct, MdsMode::Exhaustive, DEFAULT_MDS_COND_TOL).unwrap();
        assert_eq!(rep.verdict, MdsVerdict::Mds);
        assert_eq!(rep.subsets_checked, 70);

        let rep = is_mds(
            &make_repetition(2, 2).unwrap(),
            MdsMode::Exhaustive,
            DEFAULT_MDS_COND_TOL,
        )
        .unwrap();
        assert_eq!(rep.verdict, MdsVerdict::NotMds);
        assert_eq!(rep.worst_positions, vec![0, 2]);
        assert_eq!(rep.worst_condition, 0.0);

        let sampled = is_mds(
            &dct,
            MdsMode::Sampled {
                samples: 50,
                seed: 1,
            },
            DEFAULT_MDS_COND_TOL,
        )
        .unwrap();
        assert_eq!(sampled.verdict, MdsVerdict::SampledLikelyMds);
        assert!(is_mds(
            &make_random(30, 60, 0).unwrap(),
            MdsMode::Exhaustive,
            DEFAULT_MDS_COND_TOL
        )
        .is_err());
    }

    #[test]
    fn combinations_enumerate_all() {
        let mut comb = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut comb, 5) {
            count += 1;
        }
        assert_eq!(count, binomial(5, 2));
        assert_eq!(binomial(60, 30), 118264581564861424);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn report_invariants_and_json() {
        let g = make_dct(8, &[0, 1, 2, 3]).unwrap();
        let rep = MetricsReport::compute(&g, Tolerances::default(), 100, 0).unwrap();
        assert!(rep.mdre);
        assert_eq!(rep.mds, MdsVerdict::Mds);
        assert_eq!(rep.min_distance_ratio, rep.eigenvalues[0]);
        assert!((rep.mse_lower_bound_per_sigma2 * rep.gamma - 4.0).abs() < 1e-9);
        let json = serde_json::to_value(&rep).unwrap();
        for key in [
            "gamma",
            "eigenvalues",
            "min_distance_ratio",
            "mdre",
            "mds",
            "mse_lower_bound_per_sigma2",
            "tolerances",
        ] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["mds"], "MDS");
    }
}
