//! Generator matrices for the standard linear analog code families.
//!
//! A code with generator `G` (k x n, rank k) maps a source `u ∈ C^k` to the
//! codeword `v = G^H u ∈ C^n`. The transform families (DFT, DCT, DST) take
//! `k` rows of an order-`n` unitary matrix, so `G G^H = I_k`.

use std::f64::consts::PI;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{read_matrix, singular_values, write_matrix, CMatrix, C64, RANK_REL_TOL};
use crate::rng;

const RANDOM_MAX_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    #[serde(alias = "DFT")]
    Dft,
    #[serde(alias = "DCT")]
    Dct,
    #[serde(alias = "DST")]
    Dst,
    #[serde(alias = "Repetition")]
    Repetition,
    #[serde(alias = "Random")]
    Random,
    #[serde(alias = "Custom")]
    Custom,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Dft => "dft",
            Family::Dct => "dct",
            Family::Dst => "dst",
            Family::Repetition => "repetition",
            Family::Random => "random",
            Family::Custom => "custom",
        }
    }

    pub fn is_transform(self) -> bool {
        matches!(self, Family::Dft | Family::Dct | Family::Dst)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dft" => Ok(Family::Dft),
            "dct" => Ok(Family::Dct),
            "dst" => Ok(Family::Dst),
            "repetition" | "rep" => Ok(Family::Repetition),
            "random" => Ok(Family::Random),
            "custom" => Ok(Family::Custom),
            other => Err(invalid(format!("unknown code family {other:?}"))),
        }
    }
}

/// Everything needed to rebuild a generator deterministically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeDescriptor {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    /// Transform families only. `None` means rows `0..k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row_indices: Option<Vec<usize>>,
    /// Repetition only; `n = t * k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    /// Random only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub normalized: bool,
}

impl CodeDescriptor {
    pub fn transform(family: Family, n: usize, rows: Vec<usize>) -> Self {
        CodeDescriptor {
            family,
            n,
            k: rows.len(),
            row_indices: Some(rows),
            t: None,
            seed: None,
            normalized: true,
        }
    }

    pub fn repetition(k: usize, t: usize) -> Self {
        CodeDescriptor {
            family: Family::Repetition,
            n: k * t,
            k,
            row_indices: None,
            t: Some(t),
            seed: None,
            normalized: false,
        }
    }

    pub fn random(k: usize, n: usize, seed: u64) -> Self {
        CodeDescriptor {
            family: Family::Random,
            n,
            k,
            row_indices: None,
            t: None,
            seed: Some(seed),
            normalized: false,
        }
    }

    pub fn custom(k: usize, n: usize) -> Self {
        CodeDescriptor {
            family: Family::Custom,
            n,
            k,
            row_indices: None,
            t: None,
            seed: None,
            normalized: false,
        }
    }

    /// Row selection for transform families, defaulting to `0..k`.
    pub fn rows(&self) -> Vec<usize> {
        self.row_indices
            .clone()
            .unwrap_or_else(|| (0..self.k).collect())
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.n {
            return Err(invalid(format!(
                "need 1 <= k <= n, got n={} k={}",
                self.n, self.k
            )));
        }
        match self.family {
            Family::Dft | Family::Dct | Family::Dst => {
                let rows = self.rows();
                if rows.len() != self.k {
                    return Err(invalid(format!(
                        "row_indices has {} entries but k={}",
                        rows.len(),
                        self.k
                    )));
                }
                check_rows(self.n, &rows)?;
            }
            Family::Repetition => {
                let t = self.t.ok_or_else(|| invalid("repetition code needs t"))?;
                if t == 0 || self.n != t * self.k {
                    return Err(invalid(format!(
                        "repetition needs t >= 1 and n = t*k, got n={} k={} t={t}",
                        self.n, self.k
                    )));
                }
            }
            Family::Random => {
                if self.seed.is_none() {
                    return Err(invalid("random code needs seed"));
                }
            }
            Family::Custom => {}
        }
        Ok(())
    }

    /// Short identifier, stable across runs, used as `code_id` in result tables.
    pub fn id(&self) -> String {
        let mut id = match self.family {
            Family::Dft | Family::Dct | Family::Dst => {
                let rows = self.rows();
                let mut s = format!("{}-n{}-k{}", self.family, self.n, self.k);
                if rows != (0..self.k).collect::<Vec<_>>() {
                    let list: Vec<String> = rows.iter().map(usize::to_string).collect();
                    s.push_str(&format!("-rows{}", list.join(".")));
                }
                s
            }
            Family::Repetition => format!("repetition-k{}-t{}", self.k, self.t.unwrap_or(0)),
            Family::Random => format!("random-k{}-n{}-s{}", self.k, self.n, self.seed.unwrap_or(0)),
            Family::Custom => format!("custom-k{}-n{}", self.k, self.n),
        };
        if self.normalized && !self.family.is_transform() {
            id.push_str("-norm");
        }
        id
    }

    /// `key=value` header written into generator files.
    pub fn header(&self) -> String {
        let mut s = format!("family={} n={} k={}", self.family, self.n, self.k);
        if self.family.is_transform() {
            let list: Vec<String> = self.rows().iter().map(usize::to_string).collect();
            s.push_str(&format!(" rows={}", list.join(",")));
        }
        if let Some(t) = self.t {
            s.push_str(&format!(" t={t}"));
        }
        if let Some(seed) = self.seed {
            s.push_str(&format!(" seed={seed}"));
        }
        s.push_str(&format!(" normalized={}", self.normalized));
        s
    }

    pub fn parse_header(line: &str) -> Result<Self> {
        let bad = |msg: String| Error::Parse { line: 1, msg };
        let mut d = CodeDescriptor::custom(0, 0);
        let mut saw_family = false;
        for kv in line.split_whitespace() {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| bad(format!("header token {kv:?} is not key=value")))?;
            let num = || {
                value
                    .parse::<usize>()
                    .map_err(|_| bad(format!("bad {key}={value}")))
            };
            match key {
                "family" => {
                    d.family = value
                        .parse()
                        .map_err(|_| bad(format!("unknown family {value:?}")))?;
                    saw_family = true;
                }
                "n" => d.n = num()?,
                "k" => d.k = num()?,
                "t" => d.t = Some(num()?),
                "seed" => {
                    d.seed = Some(
                        value
                            .parse()
                            .map_err(|_| bad(format!("bad seed={value}")))?,
                    )
                }
                "rows" => {
                    let rows = value
                        .split(',')
                        .map(|r| r.parse::<usize>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| bad(format!("bad rows={value}")))?;
                    d.row_indices = Some(rows);
                }
                "normalized" => {
                    d.normalized = value
                        .parse()
                        .map_err(|_| bad(format!("bad normalized={value}")))?
                }
                _ => {}
            }
        }
        if !saw_family {
            return Err(bad("header has no family".into()));
        }
        Ok(d)
    }
}

fn check_rows(n: usize, rows: &[usize]) -> Result<()> {
    if rows.is_empty() {
        return Err(invalid("row selection is empty"));
    }
    if rows.len() > n {
        return Err(invalid(format!(
            "cannot select {} rows of an order-{n} transform",
            rows.len()
        )));
    }
    let mut seen = vec![false; n];
    for &r in rows {
        if r >= n {
            return Err(invalid(format!("row index {r} out of range for n={n}")));
        }
        if std::mem::replace(&mut seen[r], true) {
            return Err(invalid(format!("duplicate row index {r}")));
        }
    }
    Ok(())
}

/// A full-row-rank generator together with the descriptor that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    descriptor: CodeDescriptor,
    g: CMatrix,
}

impl Generator {
    /// Wraps `g`, checking shape against the descriptor and full row rank.
    pub fn new(descriptor: CodeDescriptor, g: CMatrix) -> Result<Self> {
        if g.shape() != (descriptor.k, descriptor.n) {
            return Err(Error::DimensionMismatch(format!(
                "descriptor says {}x{}, matrix is {}x{}",
                descriptor.k,
                descriptor.n,
                g.rows(),
                g.cols()
            )));
        }
        check_full_row_rank(&g)?;
        Ok(Generator { descriptor, g })
    }

    pub fn from_matrix(g: CMatrix) -> Result<Self> {
        Self::new(CodeDescriptor::custom(g.rows(), g.cols()), g)
    }

    /// Rebuilds the generator a descriptor names. Custom codes cannot be rebuilt.
    pub fn build(d: &CodeDescriptor) -> Result<Self> {
        d.validate()?;
        let g = match d.family {
            Family::Dft => make_dft(d.n, &d.rows())?,
            Family::Dct => make_dct(d.n, &d.rows())?,
            Family::Dst => make_dst(d.n, &d.rows())?,
            Family::Repetition => make_repetition(d.k, d.t.expect("validated"))?,
            Family::Random => make_random(d.k, d.n, d.seed.expect("validated"))?,
            Family::Custom => return Err(invalid("custom codes are loaded from a generator file")),
        };
        if d.normalized {
            normalize(&g)
        } else {
            Ok(g)
        }
    }

    pub fn descriptor(&self) -> &CodeDescriptor {
        &self.descriptor
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.g
    }

    pub fn k(&self) -> usize {
        self.g.rows()
    }

    pub fn n(&self) -> usize {
        self.g.cols()
    }

    /// Same code, scaled by `a`. The descriptor loses its normalized flag.
    pub fn scaled(&self, a: f64) -> Result<Self> {
        let mut d = self.descriptor.clone();
        d.normalized = false;
        Generator::new(d, self.g.scale(a))
    }
}

fn check_full_row_rank(g: &CMatrix) -> Result<()> {
    if g.rows() > g.cols() {
        return Err(Error::RankDeficient {
            smallest: 0.0,
            largest: singular_values(g).max(),
        });
    }
    let sv = singular_values(g);
    if !(sv.min() > RANK_REL_TOL * sv.max()) {
        return Err(Error::RankDeficient {
            smallest: sv.min(),
            largest: sv.max(),
        });
    }
    Ok(())
}

/// Rows of the unitary DFT matrix, `exp(-j 2π r c / n) / √n`.
pub fn make_dft(n: usize, rows: &[usize]) -> Result<Generator> {
    check_rows(n, rows)?;
    let scale = 1.0 / (n as f64).sqrt();
    let g = CMatrix::from_fn(rows.len(), n, |i, c| {
        // Reduce the exponent mod n before converting so large orders stay exact.
        let e = (rows[i] * c) % n;
        C64::from_polar(scale, -2.0 * PI * e as f64 / n as f64)
    })?;
    Generator::new(CodeDescriptor::transform(Family::Dft, n, rows.to_vec()), g)
}

/// Rows of the orthonormal DCT-II matrix.
pub fn make_dct(n: usize, rows: &[usize]) -> Result<Generator> {
    check_rows(n, rows)?;
    let nf = n as f64;
    let g = CMatrix::from_fn(rows.len(), n, |i, c| {
        let r = rows[i];
        let v = if r == 0 {
            1.0 / nf.sqrt()
        } else {
            (2.0 / nf).sqrt() * ((2 * c + 1) as f64 * r as f64 * PI / (2.0 * nf)).cos()
        };
        C64::new(v, 0.0)
    })?;
    Generator::new(CodeDescriptor::transform(Family::Dct, n, rows.to_vec()), g)
}

/// Rows of the orthonormal DST-I matrix, `√(2/(n+1)) sin((r+1)(c+1)π/(n+1))`.
pub fn make_dst(n: usize, rows: &[usize]) -> Result<Generator> {
    check_rows(n, rows)?;
    let np1 = (n + 1) as f64;
    let g = CMatrix::from_fn(rows.len(), n, |i, c| {
        let v = (2.0 / np1).sqrt() * (((rows[i] + 1) * (c + 1)) as f64 * PI / np1).sin();
        C64::new(v, 0.0)
    })?;
    Generator::new(CodeDescriptor::transform(Family::Dst, n, rows.to_vec()), g)
}

/// `[I_k, I_k, ..., I_k]` with `t` blocks.
pub fn make_repetition(k: usize, t: usize) -> Result<Generator> {
    if k == 0 || t == 0 {
        return Err(invalid(format!(
            "repetition needs k >= 1 and t >= 1, got k={k} t={t}"
        )));
    }
    let g = CMatrix::from_fn(k, k * t, |i, j| {
        if j % k == i {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })?;
    Generator::new(CodeDescriptor::repetition(k, t), g)
}

/// i.i.d. standard complex Gaussian entries, redrawn until full rank.
pub fn make_random(k: usize, n: usize, seed: u64) -> Result<Generator> {
    if k == 0 || k > n {
        return Err(invalid(format!("need 1 <= k <= n, got n={n} k={k}")));
    }
    let mut stream = rng::stream(seed);
    let mut last = None;
    for _ in 0..RANDOM_MAX_ATTEMPTS {
        let g = CMatrix::from_fn(k, n, |_, _| rng::complex_gaussian(&mut stream))?;
        match Generator::new(CodeDescriptor::random(k, n, seed), g) {
            Ok(gen) => return Ok(gen),
            Err(e @ Error::RankDeficient { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// `G / √Γ(G)`, so the result has encoding power gain 1.
pub fn normalize(g: &Generator) -> Result<Generator> {
    let gamma = crate::metrics::encoding_power_gain(g);
    if !(gamma > 0.0) {
        return Err(invalid("cannot normalize a zero generator"));
    }
    let mut d = g.descriptor.clone();
    d.normalized = true;
    Generator::new(d, g.g.scale(1.0 / gamma.sqrt()))
}

pub fn save_generator(g: &Generator, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_generator(&mut w, g)?;
    w.flush()?;
    Ok(())
}

pub fn write_generator(w: impl Write, g: &Generator) -> Result<()> {
    write_matrix(w, &g.g, &[g.descriptor.header()])
}

pub fn load_generator(path: impl AsRef<Path>) -> Result<Generator> {
    read_generator(BufReader::new(File::open(path)?))
}

/// Reads a generator file. The first `family=...` comment, if any, supplies
/// the descriptor; otherwise the code is tagged custom.
pub fn read_generator(r: impl std::io::BufRead) -> Result<Generator> {
    let (g, comments) = read_matrix(r)?;
    let descriptor = match comments.iter().find(|c| c.starts_with("family=")) {
        Some(h) => CodeDescriptor::parse_header(h)?,
        None => CodeDescriptor::custom(g.rows(), g.cols()),
    };
    Generator::new(descriptor, g)
}
