//! Sobol points in natural (binary) index order.
//!
//! Direction numbers come from a Joe-Kuo style table: one line per dimension
//! `d s a m_1 ... m_s`, where `s` is the degree of the primitive polynomial,
//! `a` encodes its interior coefficients and `m_i` are the initial direction
//! integers. Dimension 1 is the van der Corput sequence and has no line.

use std::path::Path;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

/// Bits of precision per coordinate.
pub const BITS: usize = 32;

const EMBEDDED_TABLE: &str = include_str!("../../data/joe-kuo-6.4096.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
struct PolynomialEntry {
    degree: usize,
    coefficients: u32,
    initial: Vec<u32>,
}

/// Parsed primitive polynomials and initial direction integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionTable {
    // entries[0] describes dimension 2
    entries: Vec<PolynomialEntry>,
}

impl DirectionTable {
    /// Parses a table in the Joe-Kuo text format. A leading header line is
    /// skipped, as are blank lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line_no = lineno + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if lineno == 0 && !line.starts_with(|c: char| c.is_ascii_digit()) {
                continue;
            }
            let err = |message: String| Error::DirectionTable {
                line: line_no,
                message,
            };
            let fields = line
                .split_whitespace()
                .map(|f| f.parse::<u64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| err(e.to_string()))?;
            if fields.len() < 3 {
                return Err(err("expected at least `d s a`".into()));
            }
            let (dim, degree, coefficients) = (fields[0], fields[1] as usize, fields[2]);
            let expected = entries.len() as u64 + 2;
            if dim != expected {
                return Err(err(format!("expected dimension {expected}, found {dim}")));
            }
            if degree == 0 || degree >= BITS {
                return Err(err(format!("unsupported degree {degree}")));
            }
            if coefficients >= 1 << (degree - 1) {
                return Err(err(format!("coefficients {coefficients} too wide for degree {degree}")));
            }
            let initial = &fields[3..];
            if initial.len() != degree {
                return Err(err(format!(
                    "expected {degree} initial direction integers, found {}",
                    initial.len()
                )));
            }
            for (i, &m) in initial.iter().enumerate() {
                if m % 2 == 0 || m >= 1 << (i + 1) {
                    return Err(err(format!("m_{} = {m} must be odd and below 2^{}", i + 1, i + 1)));
                }
            }
            entries.push(PolynomialEntry {
                degree,
                coefficients: coefficients as u32,
                initial: initial.iter().map(|&m| m as u32).collect(),
            });
        }
        Ok(Self { entries })
    }

    pub fn from_path(path: impl AsRef<Path>) -> std::io::Result<Result<Self>> {
        std::fs::read_to_string(path).map(|text| Self::parse(&text))
    }

    /// The table shipped with the crate, parsed once per process.
    pub fn embedded() -> &'static DirectionTable {
        static TABLE: OnceLock<DirectionTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            DirectionTable::parse(EMBEDDED_TABLE).expect("embedded direction table is well formed")
        })
    }

    /// Largest dimension this table supports.
    pub fn max_dimension(&self) -> usize {
        self.entries.len() + 1
    }

    /// Direction integers `v_1..v_32` of a 1-based dimension, left-aligned
    /// in 32 bits.
    fn direction_integers(&self, dimension: usize) -> [u32; BITS] {
        let mut v = [0u32; BITS];
        if dimension == 1 {
            for (i, vi) in v.iter_mut().enumerate() {
                *vi = 1 << (BITS - 1 - i);
            }
            return v;
        }
        let entry = &self.entries[dimension - 2];
        let s = entry.degree;
        let mut m = [0u32; BITS];
        m[..s].copy_from_slice(&entry.initial);
        for i in s..BITS {
            let mut next = m[i - s] ^ (m[i - s] << s);
            for k in 1..s {
                if (entry.coefficients >> (s - 1 - k)) & 1 == 1 {
                    next ^= m[i - k] << k;
                }
            }
            m[i] = next;
        }
        for i in 0..BITS {
            v[i] = m[i] << (BITS - 1 - i);
        }
        v
    }
}

/// Generator of the first `dimension` coordinates of the Sobol sequence.
///
/// Points are emitted in natural index order starting at index 1; the
/// all-zero point at index 0 is never produced. Index `i + 1` is obtained
/// from index `i` by one XOR per coordinate with the prefix-XOR of the
/// direction integers up to the lowest zero bit of `i`.
#[derive(Debug, Clone)]
pub struct SobolGenerator {
    dimension: usize,
    // row c holds v_0 ^ ... ^ v_c for every coordinate
    steps: Arc<[u32]>,
    state: Vec<u32>,
    emitted: u64,
}

impl SobolGenerator {
    /// Generator backed by the embedded direction table.
    pub fn new(dimension: usize) -> Result<Self> {
        Self::with_table(DirectionTable::embedded(), dimension)
    }

    pub fn with_table(table: &DirectionTable, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidConfig("Sobol dimension must be positive".into()));
        }
        if dimension > table.max_dimension() {
            return Err(Error::DimensionUnavailable {
                requested: dimension,
                available: table.max_dimension(),
            });
        }
        let mut steps = vec![0u32; BITS * dimension];
        for j in 0..dimension {
            let v = table.direction_integers(j + 1);
            let mut acc = 0u32;
            for (c, &vc) in v.iter().enumerate() {
                acc ^= vc;
                steps[c * dimension + j] = acc;
            }
        }
        Ok(Self {
            dimension,
            steps: steps.into(),
            state: vec![0; dimension],
            emitted: 0,
        })
    }

    /// A fresh generator at index 1 sharing this generator's direction data.
    pub fn restarted(&self) -> Self {
        Self {
            dimension: self.dimension,
            steps: Arc::clone(&self.steps),
            state: vec![0; self.dimension],
            emitted: 0,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Index of the next point to be emitted.
    pub fn cursor(&self) -> u64 {
        self.emitted + 1
    }

    /// Advances to the next index and returns its coordinates as 32-bit
    /// fixed-point fractions.
    ///
    /// Panics after `2^32 - 1` points.
    pub fn next_raw(&mut self) -> &[u32] {
        let c = self.emitted.trailing_ones() as usize;
        assert!(c < BITS, "Sobol sequence exhausted after 2^32 - 1 points");
        let row = &self.steps[c * self.dimension..(c + 1) * self.dimension];
        for (s, &w) in self.state.iter_mut().zip(row) {
            *s ^= w;
        }
        self.emitted += 1;
        &self.state
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        const SCALE: f64 = 1.0 / (1u64 << BITS) as f64;
        self.next_raw().iter().map(|&x| x as f64 * SCALE).collect()
    }
}
