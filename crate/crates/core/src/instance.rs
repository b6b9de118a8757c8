//! QUBO instance model, ORLIB-style parsers and a seeded random generator.
//!
//! The ORLIB multi-instance format starts with an instance count `P`,
//! followed by `P` blocks. Each block is a header `n m` and `m`
//! whitespace-separated triples `i j q` with 1-based indices. A listed
//! off-diagonal triple sets both `q[i][j]` and `q[j][i]` to the value;
//! repeated triples accumulate additively. The single-instance format is
//! one block without the leading count.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;

/// Inclusive integer range for generated coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightSpec {
    pub low: i64,
    pub high: i64,
}

impl WeightSpec {
    pub fn new(low: i64, high: i64) -> Result<Self, Error> {
        if low > high {
            return Err(Error::InvalidArgument(format!(
                "weight range low {low} > high {high}"
            )));
        }
        Ok(WeightSpec { low, high })
    }
}

/// A symmetric `n×n` integer coefficient matrix with metadata.
///
/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboInstance {
    n: usize,
    /// Row-major dense storage, `q[i * n + j]`.
    q: Vec<i64>,
    name: String,
    density: f64,
}

impl QuboInstance {
    /// Builds an instance from a dense row-major matrix, checking symmetry
    /// and the overflow bound `n² · max|q| ≤ i64::MAX`.
    pub fn from_matrix(name: impl Into<String>, n: usize, q: Vec<i64>) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be ≥ 1".into()));
        }
        if q.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "matrix length {} does not match n = {n}",
                q.len()
            )));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if q[i * n + j] != q[j * n + i] {
                    return Err(Error::InvalidArgument(format!(
                        "matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let max_abs = q.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
        let bound = (n as u128) * (n as u128) * (max_abs as u128);
        if bound > i64::MAX as u128 {
            return Err(Error::Overflow {
                n,
                max_abs: max_abs as i64,
            });
        }
        let nonzero = q.iter().filter(|&&v| v != 0).count();
        let density = nonzero as f64 / (n * n) as f64;
        Ok(QuboInstance {
            n,
            q,
            name: name.into(),
            density,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Fraction of nonzero entries in the full matrix (informational).
    pub fn density(&self) -> f64 {
        self.density
    }

    #[inline]
    pub fn coeff(&self, i: usize, j: usize) -> i64 {
        self.q[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[i64] {
        &self.q[i * self.n..(i + 1) * self.n]
    }

    /// Per-row coefficient sums; element `i` is `Σ_j q[i][j]`.
    pub fn row_sums(&self) -> Vec<i64> {
        (0..self.n)
            .map(|i| self.row(i).iter().sum())
            .collect()
    }

    /// Serializes to the single-instance text format. Emits the upper
    /// triangle (including the diagonal); reparsing reproduces the matrix.
    pub fn write_single(&self, out: &mut impl std::io::Write) -> std::io::Result<()> {
        let mut triples = Vec::new();
        for i in 0..self.n {
            for j in i..self.n {
                let v = self.coeff(i, j);
                if v != 0 {
                    triples.push((i + 1, j + 1, v));
                }
            }
        }
        writeln!(out, "{} {}", self.n, triples.len())?;
        for (i, j, v) in triples {
            writeln!(out, "{i} {j} {v}")?;
        }
        Ok(())
    }
}

/// Whitespace tokenizer that tracks 1-based line numbers for error reports.
struct Lexer<'a> {
    tokens: std::vec::IntoIter<(&'a str, usize)>,
    last_line: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        let mut tokens = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            for tok in line.split_whitespace() {
                tokens.push((tok, idx + 1));
            }
        }
        Lexer {
            tokens: tokens.into_iter(),
            last_line: 1,
        }
    }

    fn next(&mut self) -> Option<(&'a str, usize)> {
        let t = self.tokens.next();
        if let Some((_, line)) = t {
            self.last_line = line;
        }
        t
    }

    fn expect_int(&mut self, what: &str) -> Result<(i64, usize), Error> {
        match self.next() {
            None => Err(Error::parse(
                self.last_line,
                format!("unexpected end of input, expected {what}"),
            )),
            Some((tok, line)) => tok
                .parse::<i64>()
                .map(|v| (v, line))
                .map_err(|_| Error::parse(line, format!("non-numeric token '{tok}' for {what}"))),
        }
    }

    fn expect_count(&mut self, what: &str) -> Result<(usize, usize), Error> {
        let (v, line) = self.expect_int(what)?;
        if v < 0 {
            return Err(Error::parse(line, format!("{what} must be nonnegative, got {v}")));
        }
        Ok((v as usize, line))
    }
}

fn parse_block(lex: &mut Lexer, name: String) -> Result<QuboInstance, Error> {
    let (n, line) = lex.expect_count("variable count n")?;
    if n == 0 {
        return Err(Error::parse(line, "variable count n must be ≥ 1"));
    }
    let (m, _) = lex.expect_count("triple count m")?;
    let mut q = vec![0i64; n * n];
    for _ in 0..m {
        let (i, line_i) = lex.expect_count("row index")?;
        let (j, line_j) = lex.expect_count("column index")?;
        let (v, _) = lex.expect_int("coefficient")?;
        if i < 1 || i > n {
            return Err(Error::parse(line_i, format!("row index {i} out of range [1,{n}]")));
        }
        if j < 1 || j > n {
            return Err(Error::parse(
                line_j,
                format!("column index {j} out of range [1,{n}]"),
            ));
        }
        let (i, j) = (i - 1, j - 1);
        q[i * n + j] += v;
        if i != j {
            q[j * n + i] += v;
        }
    }
    QuboInstance::from_matrix(name, n, q).map_err(|e| match e {
        Error::Overflow { .. } => e,
        other => Error::InvalidArgument(other.to_string()),
    })
}

/// Parses an ORLIB-style multi-instance file. Instance names are
/// `<stem>.<ordinal>` with a 1-based ordinal.
pub fn parse_orlib_multi(text: &str, stem: &str) -> Result<Vec<QuboInstance>, Error> {
    let mut lex = Lexer::new(text);
    let (count, line) = lex.expect_count("instance count")?;
    if count == 0 {
        return Err(Error::parse(line, "instance count must be ≥ 1"));
    }
    let mut instances = Vec::with_capacity(count);
    for ordinal in 1..=count {
        instances.push(parse_block(&mut lex, format!("{stem}.{ordinal}"))?);
    }
    if let Some((tok, line)) = lex.next() {
        return Err(Error::parse(line, format!("unexpected trailing token '{tok}'")));
    }
    Ok(instances)
}

/// Parses a single-instance file: one ORLIB block without the leading count.
pub fn parse_single(text: &str, name: &str) -> Result<QuboInstance, Error> {
    let mut lex = Lexer::new(text);
    let inst = parse_block(&mut lex, name.to_string())?;
    if let Some((tok, line)) = lex.next() {
        return Err(Error::parse(line, format!("unexpected trailing token '{tok}'")));
    }
    Ok(inst)
}

/// Reads a file into a string, transparently decompressing gzip input
/// (detected by the 0x1f 0x8b magic bytes).
pub fn read_instance_text(path: &Path) -> Result<String, Error> {
    let mut raw = Vec::new();
    File::open(path)?.read_to_end(&mut raw)?;
    let bytes = if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        flate2::read::GzDecoder::new(&raw[..]).read_to_end(&mut out)?;
        out
    } else {
        raw
    };
    String::from_utf8(bytes)
        .map_err(|_| Error::InvalidArgument("instance file is not valid UTF-8".into()))
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".to_string())
}

/// Loads all instances from an ORLIB multi-instance file (plain or gzip).
pub fn load_orlib_file(path: &Path) -> Result<Vec<QuboInstance>, Error> {
    let text = read_instance_text(path)?;
    parse_orlib_multi(&text, &file_stem(path))
}

/// Loads one instance from a single-instance file (plain or gzip).
pub fn load_single_file(path: &Path) -> Result<QuboInstance, Error> {
    let text = read_instance_text(path)?;
    parse_single(&text, &file_stem(path))
}

/// Generates a seeded random instance: each unordered pair `{i,j}` with
/// `i ≤ j` is nonzero with probability `density`, values uniform in the
/// weight range. Deterministic for fixed `(n, density, weights, seed)`.
pub fn generate_random(
    n: usize,
    density: f64,
    weights: WeightSpec,
    seed: u64,
) -> Result<QuboInstance, Error> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be ≥ 1".into()));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "density must be in (0,1], got {density}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = vec![0i64; n * n];
    for i in 0..n {
        for j in i..n {
            if rng.gen_bool(density) {
                let v = rng.gen_range(weights.low..=weights.high);
                q[i * n + j] = v;
                q[j * n + i] = v;
            }
        }
    }
    QuboInstance::from_matrix(format!("rand-n{n}-s{seed}"), n, q)
}
