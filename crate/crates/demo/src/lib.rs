//! Browser bindings. Each export takes plain numbers and returns a JSON
//! string so the page needs no generated TypeScript types.

use analog_codes::channel::{encode, erase, erasure_decode};
use analog_codes::harness::{run_sweep_with, SimConfig, Source, Workers};
use analog_codes::metrics::{
    binomial, encoding_power_gain, gram_spectrum, is_mds, MdsMode, DEFAULT_MDRE_REL_TOL,
    DEFAULT_MDS_COND_TOL,
};
use analog_codes::{rng, CodeDescriptor, Family, Generator, C64};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// The page only runs exhaustive MDS scans below this many subsets.
const MDS_SUBSET_LIMIT: u64 = 20_000;
const MAX_TRIALS: usize = 50_000;

/// Repetition codes take `t = n / k`.
pub fn descriptor(
    family: &str,
    n: usize,
    k: usize,
    seed: u32,
    normalize: bool,
) -> Result<CodeDescriptor, String> {
    let family: Family = family.parse().map_err(|e| format!("{e}"))?;
    let d = match family {
        Family::Repetition => {
            if k == 0 || !n.is_multiple_of(k) {
                return Err(format!(
                    "repetition needs n to be a multiple of k, got n={n} k={k}"
                ));
            }
            CodeDescriptor::repetition(k, n / k)
        }
        Family::Random => CodeDescriptor::random(k, n, seed as u64),
        Family::Custom => return Err("custom codes are not available here".into()),
        f => CodeDescriptor::transform(f, n, (0..k).collect()),
    };
    let d = CodeDescriptor {
        normalized: d.normalized || normalize,
        ..d
    };
    d.validate().map_err(|e| e.to_string())?;
    Ok(d)
}

fn build(
    family: &str,
    n: usize,
    k: usize,
    seed: u32,
    normalize: bool,
) -> Result<Generator, String> {
    Generator::build(&descriptor(family, n, k, seed, normalize)?).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Spectrum {
    id: String,
    gamma: f64,
    eigenvalues: Vec<f64>,
    min_distance_ratio: f64,
    mdre: bool,
    mse_floor_per_sigma2: f64,
    /// `None` when the exhaustive scan would be too slow for the page.
    mds: Option<String>,
}

pub fn spectrum_json(
    family: &str,
    n: usize,
    k: usize,
    seed: u32,
    normalize: bool,
) -> Result<String, String> {
    let g = build(family, n, k, seed, normalize)?;
    let spec = gram_spectrum(&g);
    let gamma = encoding_power_gain(&g);
    let mds = if binomial(n, k) <= MDS_SUBSET_LIMIT {
        let rep =
            is_mds(&g, MdsMode::Exhaustive, DEFAULT_MDS_COND_TOL).map_err(|e| e.to_string())?;
        Some(rep.verdict.to_string())
    } else {
        None
    };
    let out = Spectrum {
        id: g.descriptor().id(),
        gamma,
        eigenvalues: spec.values().to_vec(),
        min_distance_ratio: spec.min(),
        mdre: analog_codes::metrics::eigenvalue_spread(&spec) <= DEFAULT_MDRE_REL_TOL,
        mse_floor_per_sigma2: k as f64 / gamma,
        mds,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CurvePoint {
    snr_db: f64,
    mc_mse: f64,
    ci95: f64,
    analytic_mse: f64,
}

pub fn mse_curve_json(
    family: &str,
    n: usize,
    k: usize,
    seed: u32,
    normalize: bool,
    trials: usize,
) -> Result<String, String> {
    if trials > MAX_TRIALS {
        return Err(format!(
            "at most {MAX_TRIALS} trials per point in the browser"
        ));
    }
    let code = descriptor(family, n, k, seed, normalize)?;
    let cfg = SimConfig {
        code,
        snr_db_points: (0..=6).map(|i| 5.0 * i as f64).collect(),
        trials_per_point: trials,
        source: Source::UniformPm1,
        seed: 0,
    };
    let res = run_sweep_with(&cfg, Workers::default()).map_err(|e| e.to_string())?;
    let pts: Vec<CurvePoint> = res
        .points
        .iter()
        .map(|p| CurvePoint {
            snr_db: p.snr_db,
            mc_mse: p.mc_mse,
            ci95: p.ci95,
            analytic_mse: p.analytic_mse_per_symbol,
        })
        .collect();
    serde_json::to_string(&pts).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Recovery {
    source: Vec<[f64; 2]>,
    codeword: Vec<[f64; 2]>,
    erased: Vec<usize>,
    recovered: Vec<[f64; 2]>,
    max_error: f64,
}

fn pairs(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

/// Encodes a seeded random source, drops the comma-separated positions and
/// solves for the source from the survivors.
pub fn erasure_json(
    family: &str,
    n: usize,
    k: usize,
    seed: u32,
    normalize: bool,
    erased: &str,
) -> Result<String, String> {
    let g = build(family, n, k, seed, normalize)?;
    let positions: Vec<usize> = erased
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| format!("bad erasure position {s:?}")))
        .collect::<Result<_, _>>()?;
    let mut stream = rng::stream(seed as u64 ^ 0x5eed);
    let u: Vec<C64> = (0..k).map(|_| rng::complex_gaussian(&mut stream)).collect();
    let v = encode(&g, &u).map_err(|e| e.to_string())?;
    let rec = erase(&v, &positions).map_err(|e| e.to_string())?;
    let got = erasure_decode(&g, &rec).map_err(|e| e.to_string())?;
    let max_error = got
        .iter()
        .zip(&u)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let out = Recovery {
        source: pairs(&u),
        codeword: pairs(&v),
        erased: rec.erased.into_iter().flatten().collect(),
        recovered: pairs(&got),
        max_error,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn spectrum(
    family: &str,
    n: usize,
    k: usize,
    seed: u32,
    normalize: bool,
) -> Result<String, JsValue> {
    spectrum_json(family, n, k, seed, normalize).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn mse_curve(
    family: &str,
    n: usize,
    k: usize,
    seed: u32,
    normalize: bool,
    trials: usize,
) -> Result<String, JsValue> {
    mse_curve_json(family, n, k, seed, normalize, trials).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn erasure_recovery(
    family: &str,
    n: usize,
    k: usize,
    seed: u32,
    normalize: bool,
    erased: &str,
) -> Result<String, JsValue> {
    erasure_json(family, n, k, seed, normalize, erased).map_err(|e| JsValue::from_str(&e))
}
