use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::PredicateAst;
use crate::error::{Error, Result};
use crate::width::Width;

/// Truth table of `y(x)` over every `x` in `[0, 2^k)`, packed 64 inputs per word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleTable {
    width: Width,
    words: Vec<u64>,
    solution_count: u64,
}

impl OracleTable {
    /// Builds a table from an arbitrary indicator function.
    pub fn from_fn<F>(width: Width, indicator: F) -> Self
    where
        F: Fn(u64) -> bool + Sync,
    {
        let n = width.inputs();
        let words: Vec<u64> = (0..n.div_ceil(64))
            .into_par_iter()
            .map(|w| {
                let base = w * 64;
                let end = (base + 64).min(n);
                (base..end).fold(0u64, |acc, x| acc | (u64::from(indicator(x)) << (x - base)))
            })
            .collect();
        let solution_count = popcount(&words);
        OracleTable {
            width,
            words,
            solution_count,
        }
    }

    pub fn width(&self) -> Width {
        self.width
    }

    /// Number of inputs, `2^k`.
    pub fn len(&self) -> u64 {
        self.width.inputs()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bit(&self, x: u64) -> bool {
        debug_assert!(x < self.len());
        (self.words[(x / 64) as usize] >> (x % 64)) & 1 == 1
    }

    /// `S`, the number of inputs with `y(x) = 1`.
    pub fn solution_count(&self) -> u64 {
        self.solution_count
    }

    /// Recounts set bits instead of returning the cached count.
    pub fn recount(&self) -> u64 {
        popcount(&self.words)
    }

    pub fn solutions(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len()).filter(|&x| self.bit(x))
    }
}

fn popcount(words: &[u64]) -> u64 {
    words.iter().map(|w| u64::from(w.count_ones())).sum()
}

/// Evaluates `ast` at every input of `width`.
pub fn build_oracle_table(ast: &PredicateAst, width: u32) -> Result<OracleTable> {
    let width = Width::new(width)?;
    Ok(OracleTable::from_fn(width, |x| ast.root().value(x & width.mask()) != 0))
}

/// Exact fraction `S / 2^k` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactFraction(Ratio<u64>);

impl ExactFraction {
    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 || numer > denom {
            return Err(Error::InvalidCounts(format!("{numer}/{denom} is not a fraction in [0, 1]")));
        }
        Ok(ExactFraction(Ratio::new(numer, denom)))
    }

    pub fn ratio(&self) -> Ratio<u64> {
        self.0
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// `1 - f`.
    pub fn complement(&self) -> ExactFraction {
        ExactFraction(Ratio::from_integer(1) - self.0)
    }
}

impl fmt::Display for ExactFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for ExactFraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidCounts(format!("cannot read {s:?} as a fraction"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n = n.parse().map_err(|_| bad())?;
        let d = d.parse().map_err(|_| bad())?;
        ExactFraction::new(n, d)
    }
}

impl Serialize for ExactFraction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactFraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The solution fraction `f = S / 2^k` of a table.
pub fn exact_fraction(table: &OracleTable) -> ExactFraction {
    ExactFraction(Ratio::new(table.solution_count(), table.len()))
}
