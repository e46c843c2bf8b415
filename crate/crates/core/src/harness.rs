//! Monte Carlo MSE sweeps over SNR and multi-code comparisons.
//!
//! Each trial draws a fresh source and noise vector from its own stream,
//! seeded from the config seed, the SNR point index and the trial index.
//! Per-trial errors are collected in trial order and summed sequentially, so
//! a sweep is bit-identical for any number of worker threads. Stream seeds
//! do not depend on the code, so codes compared under one seed see the same
//! source and noise draws.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::channel::{add_noise, analytic_mse, Decoder, Field};
use crate::codes::{CodeDescriptor, Family, Generator};
use crate::error::{invalid, Result};
use crate::linalg::C64;
use crate::metrics::{encoding_power_gain, min_distance_ratio, Estimate};
use crate::rng;
use rand::Rng;

pub const MIN_TRIALS_PER_POINT: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Source {
    /// Real, uniform on [-1, 1]; paired with real channel noise.
    #[serde(rename = "UniformPM1")]
    UniformPm1,
    /// Standard circular complex Gaussian; paired with complex noise.
    ComplexGaussian,
}

impl Source {
    /// `E[|u_i|²]`.
    pub fn symbol_energy(self) -> f64 {
        match self {
            Source::UniformPm1 => 1.0 / 3.0,
            Source::ComplexGaussian => 1.0,
        }
    }

    pub fn noise_field(self) -> Field {
        match self {
            Source::UniformPm1 => Field::Real,
            Source::ComplexGaussian => Field::Complex,
        }
    }

    fn draw(self, rng: &mut impl Rng) -> C64 {
        match self {
            Source::UniformPm1 => C64::new(rng.random_range(-1.0..=1.0), 0.0),
            Source::ComplexGaussian => rng::complex_gaussian(rng),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub code: CodeDescriptor,
    /// `E_s/N_0` in dB.
    pub snr_db_points: Vec<f64>,
    pub trials_per_point: usize,
    pub source: Source,
    #[serde(default)]
    pub seed: u64,
}

impl SimConfig {
    /// 0 to 30 dB in 5 dB steps, 10^4 trials per point.
    pub fn with_defaults(code: CodeDescriptor, source: Source, seed: u64) -> Self {
        SimConfig {
            code,
            snr_db_points: (0..=6).map(|i| 5.0 * i as f64).collect(),
            trials_per_point: 10_000,
            source,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials_per_point < MIN_TRIALS_PER_POINT {
            return Err(invalid(format!(
                "trials_per_point: must be >= {MIN_TRIALS_PER_POINT}, got {}",
                self.trials_per_point
            )));
        }
        if self.snr_db_points.is_empty() {
            return Err(invalid("snr_db_points: must not be empty"));
        }
        if let Some(x) = self.snr_db_points.iter().find(|x| !x.is_finite()) {
            return Err(invalid(format!("snr_db_points: {x} is not finite")));
        }
        if self.code.family == Family::Custom {
            return Err(invalid(
                "code.family: custom codes cannot be rebuilt from a config",
            ));
        }
        self.code
            .validate()
            .map_err(|e| invalid(format!("code: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SimConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimPoint {
    pub snr_db: f64,
    pub sigma2: f64,
    /// Mean over trials of `‖ũ − u‖² / k`.
    pub mc_mse: f64,
    pub ci95: f64,
    /// `σ² Σ 1/s_i² / k`.
    pub analytic_mse_per_symbol: f64,
    pub log2_mse: f64,
    pub trials: usize,
}

impl SimPoint {
    /// Monte Carlo estimate lies within `widths` confidence half-widths of
    /// the analytic value.
    pub fn agrees_with_analytic(&self, widths: f64) -> bool {
        (self.mc_mse - self.analytic_mse_per_symbol).abs() <= widths * self.ci95
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub code_id: String,
    pub n: usize,
    pub k: usize,
    pub gamma: f64,
    pub min_distance_ratio: f64,
    pub points: Vec<SimPoint>,
}

/// `σ² = E_s / 10^(snr/10)`, with `E_s = Γ E[|u_i|²] k / n` the average
/// energy per transmitted symbol.
pub fn sigma2_for_snr(g: &Generator, source: Source, snr_db: f64) -> f64 {
    let es = encoding_power_gain(g) * source.symbol_energy() * g.k() as f64 / g.n() as f64;
    es / 10f64.powf(snr_db / 10.0)
}

/// Per-trial stream seed.
pub fn trial_seed(config_seed: u64, point: usize, trial: usize) -> u64 {
    rng::mix(config_seed, point as u64) ^ trial as u64
}

/// How many threads a sweep may use. `None` uses the global pool.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Workers(pub Option<usize>);

pub fn run_sweep(config: &SimConfig) -> Result<SimResult> {
    run_sweep_with(config, Workers::default())
}

pub fn run_sweep_with(config: &SimConfig, workers: Workers) -> Result<SimResult> {
    config.validate()?;
    let g = Generator::build(&config.code)?;
    sweep_generator(&g, config, workers)
}

/// Runs `config`'s grid on an explicit generator (the config's code
/// descriptor is ignored).
pub fn sweep_generator(g: &Generator, config: &SimConfig, workers: Workers) -> Result<SimResult> {
    let decoder = Decoder::new(g)?;
    let mut points = Vec::with_capacity(config.snr_db_points.len());
    for (idx, &snr_db) in config.snr_db_points.iter().enumerate() {
        let sigma2 = sigma2_for_snr(g, config.source, snr_db);
        let errors = run_point(g, &decoder, config, idx, sigma2, workers)?;
        let (sum, sum_sq) = errors
            .iter()
            .fold((0.0, 0.0), |(s, q), &e| (s + e, q + e * e));
        let est = Estimate::from_sums(sum, sum_sq, errors.len());
        points.push(SimPoint {
            snr_db,
            sigma2,
            mc_mse: est.mean,
            ci95: est.half_width,
            analytic_mse_per_symbol: analytic_mse(g, sigma2)? / g.k() as f64,
            log2_mse: est.mean.log2(),
            trials: errors.len(),
        });
    }
    Ok(SimResult {
        code_id: g.descriptor().id(),
        n: g.n(),
        k: g.k(),
        gamma: encoding_power_gain(g),
        min_distance_ratio: min_distance_ratio(g),
        points,
    })
}

fn one_trial(g: &Generator, decoder: &Decoder, source: Source, sigma2: f64, seed: u64) -> f64 {
    let mut stream = rng::stream(seed);
    let k = g.k();
    let u: Vec<C64> = (0..k).map(|_| source.draw(&mut stream)).collect();
    let mut r = g.matrix().adjoint_mul_vec_unchecked(&u);
    add_noise(&mut stream, &mut r, source.noise_field(), sigma2);
    let mut est = vec![C64::new(0.0, 0.0); k];
    decoder.decode_into(&r, &mut est);
    est.iter()
        .zip(&u)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        / k as f64
}

#[cfg(feature = "parallel")]
fn run_point(
    g: &Generator,
    decoder: &Decoder,
    config: &SimConfig,
    point: usize,
    sigma2: f64,
    workers: Workers,
) -> Result<Vec<f64>> {
    use rayon::prelude::*;
    let body = || {
        (0..config.trials_per_point)
            .into_par_iter()
            .map(|t| {
                one_trial(
                    g,
                    decoder,
                    config.source,
                    sigma2,
                    trial_seed(config.seed, point, t),
                )
            })
            .collect::<Vec<f64>>()
    };
    match workers.0 {
        None => Ok(body()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| invalid(format!("thread pool: {e}")))?;
            Ok(pool.install(body))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn run_point(
    g: &Generator,
    decoder: &Decoder,
    config: &SimConfig,
    point: usize,
    sigma2: f64,
    _workers: Workers,
) -> Result<Vec<f64>> {
    Ok((0..config.trials_per_point)
        .map(|t| {
            one_trial(
                g,
                decoder,
                config.source,
                sigma2,
                trial_seed(config.seed, point, t),
            )
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeSummary {
    pub code_id: String,
    pub gamma: f64,
    pub min_distance_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub snr_db_points: Vec<f64>,
    pub codes: Vec<CodeSummary>,
    /// `log2_mse[code][point]`, codes in the same order as `codes`.
    pub log2_mse: Vec<Vec<f64>>,
    pub results: Vec<SimResult>,
}

/// Normalizes every code to `Γ = 1` and sweeps them on a shared grid.
/// Output is sorted by code id.
pub fn compare_codes(configs: &[SimConfig], workers: Workers) -> Result<Comparison> {
    let first = configs
        .first()
        .ok_or_else(|| invalid("compare needs at least one config"))?;
    for (i, c) in configs.iter().enumerate() {
        if c.snr_db_points != first.snr_db_points {
            return Err(invalid(format!(
                "config {i}: snr_db_points differ from config 0"
            )));
        }
        if c.source != first.source {
            return Err(invalid(format!("config {i}: source differs from config 0")));
        }
    }
    let mut results = configs
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.code.normalized = true;
            run_sweep_with(&c, workers)
        })
        .collect::<Result<Vec<_>>>()?;
    results.sort_by(|a, b| a.code_id.cmp(&b.code_id));
    Ok(Comparison {
        snr_db_points: first.snr_db_points.clone(),
        codes: results
            .iter()
            .map(|r| CodeSummary {
                code_id: r.code_id.clone(),
                gamma: r.gamma,
                min_distance_ratio: r.min_distance_ratio,
            })
            .collect(),
        log2_mse: results
            .iter()
            .map(|r| r.points.iter().map(|p| p.log2_mse).collect())
            .collect(),
        results,
    })
}

/// One CSV row per (code, SNR point).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub snr_db: f64,
    pub sigma2: f64,
    pub code_id: String,
    pub mc_mse: f64,
    pub ci95: f64,
    pub analytic_mse: f64,
    pub log2_mse: f64,
}

pub const CSV_HEADER: [&str; 7] = [
    "snr_db",
    "sigma2",
    "code_id",
    "mc_mse",
    "ci95",
    "analytic_mse",
    "log2_mse",
];

pub fn csv_rows(results: &[SimResult]) -> Vec<CsvRow> {
    results
        .iter()
        .flat_map(|r| {
            r.points.iter().map(move |p| CsvRow {
                snr_db: p.snr_db,
                sigma2: p.sigma2,
                code_id: r.code_id.clone(),
                mc_mse: p.mc_mse,
                ci95: p.ci95,
                analytic_mse: p.analytic_mse_per_symbol,
                log2_mse: p.log2_mse,
            })
        })
        .collect()
}

/// Writes the header even when `results` is empty.
pub fn emit_csv(results: &[SimResult], w: impl Write) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(CSV_HEADER)?;
    for row in csv_rows(results) {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_csv(r: impl Read) -> Result<Vec<CsvRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(invalid(format!("unexpected CSV header {:?}", header)));
    }
    Ok(rdr
        .deserialize()
        .collect::<std::result::Result<Vec<CsvRow>, _>>()?)
}

pub fn emit_json<T: Serialize>(value: &T, mut w: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::CodeDescriptor;

    fn small(code: CodeDescriptor, snr: Vec<f64>, trials: usize) -> SimConfig {
        SimConfig {
            code,
            snr_db_points: snr,
            trials_per_point: trials,
            source: Source::UniformPm1,
            seed: 5,
        }
    }

    #[test]
    fn config_validation_names_fields() {
        let mut c = small(CodeDescriptor::repetition(2, 2), vec![0.0], 10);
        let e = c.validate().unwrap_err().to_string();
        assert!(e.contains("trials_per_point"), "{e}");
        c.trials_per_point = 100;
        c.snr_db_points = vec![f64::NAN];
        assert!(c
            .validate()
            .unwrap_err()
            .to_string()
            .contains("snr_db_points"));
        c.snr_db_points = vec![];
        assert!(c.validate().is_err());
        let e = SimConfig::from_json(r#"{"code": {"family": "dct", "n": 8}, "snr_db_points": [0], "trials_per_point": 100, "source": "UniformPM1"}"#)
            .unwrap_err()
            .to_string();
        assert!(e.contains("`k`"), "{e}");
    }

    #[test]
    fn json_config_parses() {
        let cfg = SimConfig::from_json(
            r#"{"code": {"family": "DCT", "n": 8, "k": 4}, "snr_db_points": [0, 10], "trials_per_point": 100, "source": "ComplexGaussian", "seed": 3}"#,
        )
        .unwrap();
        assert_eq!(cfg.code.family, Family::Dct);
        assert_eq!(cfg.source, Source::ComplexGaussian);
    }

    #[test]
    fn sigma2_convention() {
        let g = Generator::build(&CodeDescriptor::repetition(3, 2)).unwrap();
        // Γ = 2, E|u|² = 1/3, k/n = 1/2 → E_s = 1/3.
        assert!((sigma2_for_snr(&g, Source::UniformPm1, 0.0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((sigma2_for_snr(&g, Source::ComplexGaussian, 10.0) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn sweep_tracks_analytic() {
        let cfg = small(
            CodeDescriptor::transform(Family::Dct, 8, vec![0, 1, 2, 3]),
            vec![0.0, 10.0],
            20_000,
        );
        let res = run_sweep(&cfg).unwrap();
        for p in &res.points {
            assert!(p.ci95 > 0.0);
            assert!(p.agrees_with_analytic(4.0), "{p:?}");
        }
    }

    #[test]
    fn doubling_noise_doubles_mse() {
        let code = CodeDescriptor::random(3, 6, 8);
        let snr_for_double = -10.0 * 2f64.log10();
        let res = run_sweep(&small(code, vec![0.0, snr_for_double], 40_000)).unwrap();
        let (a, b) = (&res.points[0], &res.points[1]);
        assert!((b.sigma2 / a.sigma2 - 2.0).abs() < 1e-12);
        let diff = (b.mc_mse - 2.0 * a.mc_mse).abs();
        assert!(diff <= b.ci95 + 2.0 * a.ci95, "{a:?} {b:?}");
    }

    #[test]
    fn deterministic_across_workers() {
        let cfg = small(CodeDescriptor::random(4, 8, 1), vec![0.0, 20.0], 500);
        let a = run_sweep_with(&cfg, Workers(Some(1))).unwrap();
        let b = run_sweep_with(&cfg, Workers(Some(3))).unwrap();
        let c = run_sweep(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn compare_rejects_mismatched_grids() {
        let a = small(CodeDescriptor::repetition(2, 2), vec![0.0], 100);
        let b = small(CodeDescriptor::repetition(2, 2), vec![5.0], 100);
        assert!(compare_codes(&[a.clone(), b], Workers::default()).is_err());
        let mut c = a.clone();
        c.source = Source::ComplexGaussian;
        assert!(compare_codes(&[a.clone(), c], Workers::default()).is_err());
        assert!(compare_codes(&[], Workers::default()).is_err());
        let single = compare_codes(&[a], Workers::default()).unwrap();
        assert_eq!(single.codes.len(), 1);
        assert!((single.codes[0].gamma - 1.0).abs() < 1e-12);
        assert_eq!(single.log2_mse.len(), 1);
    }

    #[test]
    fn csv_roundtrip_and_shape() {
        let mut buf = Vec::new();
        emit_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "snr_db,sigma2,code_id,mc_mse,ci95,analytic_mse,log2_mse\n"
        );
        assert!(read_csv(buf.as_slice()).unwrap().is_empty());

        let cfgs = [
            small(CodeDescriptor::repetition(2, 2), vec![0.0, 5.0, 10.0], 100),
            small(
                CodeDescriptor::transform(Family::Dct, 4, vec![0, 1]),
                vec![0.0, 5.0, 10.0],
                100,
            ),
        ];
        let cmp = compare_codes(&cfgs, Workers::default()).unwrap();
        let mut buf = Vec::new();
        emit_csv(&cmp.results, &mut buf).unwrap();
        let rows = read_csv(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows, csv_rows(&cmp.results));

        let mut json = Vec::new();
        emit_json(&cmp.results[0], &mut json).unwrap();
        let back: SimResult = serde_json::from_slice(&json).unwrap();
        assert_eq!(back, cmp.results[0]);
    }
}
