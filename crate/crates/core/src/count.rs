//! Exact counts of triangular up-step paths, bucketed by terminal arc.
//!
//! A path of `k` up-steps over `{↑1, ↑2, ↑1+↑2}` that uses the diagonal step
//! `i` times ends on the square-lattice arc `A_{k+i}`. The number of such
//! step sequences is `C(k,i) * 2^(k-i)`, and the row sums to `3^k`.
//!
//! Counts are step sequences, not endpoints: two sequences reaching the same
//! vertex count separately.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeVariant, Vertex};

/// Largest generation accepted by [`enumerate_paths_bruteforce`].
pub const BRUTEFORCE_MAX_K: u64 = 14;

/// Exact binomial coefficient by the multiplicative formula.
pub fn binomial(k: u64, i: u64) -> Result<BigUint> {
    if i > k {
        return Err(Error::IndexOutOfRange { k, i });
    }
    let m = i.min(k - i);
    let mut acc = BigUint::one();
    for j in 1..=m {
        // the running product is C(k-m+j, j) after this step, so the division is exact
        acc *= k - m + j;
        acc /= j;
    }
    Ok(acc)
}

/// `C(k,i) * 2^(k-i)`: up-step sequences of length `k` ending on `A_{k+i}`.
pub fn path_count(k: u64, i: u64) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::ZeroGeneration);
    }
    Ok(binomial(k, i)? << (k - i))
}

/// Natural log of an exact integer, from its leading 64 bits.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.iter_u64_digits().next().unwrap_or(0) as f64).ln();
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    let lead = top.iter_u64_digits().next().unwrap_or(0) as f64;
    lead.ln() + shift as f64 * std::f64::consts::LN_2
}

/// One generation of the path count table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathCountRow {
    pub k: u64,
    /// `counts[i] = C(k,i) * 2^(k-i)`.
    #[serde(with = "decimal::vec")]
    pub counts: Vec<BigUint>,
    #[serde(with = "decimal::one")]
    pub total: BigUint,
}

impl PathCountRow {
    /// Pascal coefficient `c_{i_k} = counts[i] / 2^(k-i)`.
    pub fn coefficient(&self, i: u64) -> Option<BigUint> {
        self.counts.get(i as usize).map(|c| c >> (self.k - i))
    }

    pub fn power_of_two(&self, i: u64) -> BigUint {
        BigUint::one() << (self.k - i)
    }
}

pub fn count_row(k: u64) -> Result<PathCountRow> {
    if k == 0 {
        return Err(Error::ZeroGeneration);
    }
    let counts = (0..=k)
        .map(|i| path_count(k, i))
        .collect::<Result<Vec<_>>>()?;
    let total = counts.iter().sum();
    Ok(PathCountRow { k, counts, total })
}

/// Next row of Pascal's triangle: `out[i] = row[i] + row[i-1]`.
pub fn pascal_next(row: &[BigUint]) -> Result<Vec<BigUint>> {
    if row.is_empty() {
        return Err(Error::EmptyRow);
    }
    let zero = BigUint::zero();
    Ok((0..=row.len())
        .map(|i| {
            let left = if i == 0 { &zero } else { &row[i - 1] };
            let right = row.get(i).unwrap_or(&zero);
            left + right
        })
        .collect())
}

/// Sequence counts by endpoint norm, as found by exhaustive enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathHistogram {
    pub k: u64,
    /// Keys run over exactly `k..=2k`.
    #[serde(with = "decimal::map")]
    pub by_norm: BTreeMap<u64, BigUint>,
}

/// Walk every one of the `3^k` up-step sequences from the origin and bucket
/// each by the norm of its endpoint.
pub fn enumerate_paths_bruteforce(k: u64) -> Result<PathHistogram> {
    if !(1..=BRUTEFORCE_MAX_K).contains(&k) {
        return Err(Error::BruteforceBudget {
            k,
            cap: BRUTEFORCE_MAX_K,
        });
    }
    let steps = LatticeVariant::TriUp.up_steps()?;
    let n = 3u64.pow(k as u32);
    let width = 2 * k as usize + 1;
    let tally = (0..n)
        .into_par_iter()
        .fold(
            || vec![0u64; width],
            |mut acc, mut seq| {
                let mut v = Vertex::ORIGIN;
                for _ in 0..k {
                    v = v + steps[(seq % 3) as usize];
                    seq /= 3;
                }
                acc[v.norm() as usize] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; width],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    debug_assert!(tally[..k as usize].iter().all(|&c| c == 0));
    let by_norm = (k..=2 * k)
        .map(|m| (m, BigUint::from(tally[m as usize])))
        .collect();
    Ok(PathHistogram { k, by_norm })
}

/// Compare brute-force enumeration against the closed form for every `i`.
pub fn verify_row(k: u64) -> Result<bool> {
    verify_row_with(k, path_count)
}

/// [`verify_row`] against an arbitrary closed-form counter.
pub fn verify_row_with(k: u64, counter: impl Fn(u64, u64) -> Result<BigUint>) -> Result<bool> {
    let hist = enumerate_paths_bruteforce(k)?;
    for i in 0..=k {
        let expected = counter(k, i)?;
        if hist.by_norm.get(&(k + i)) != Some(&expected) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Serde helpers that write big integers as decimal strings.
pub(crate) mod decimal {
    use std::str::FromStr;

    use num_bigint::BigUint;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    fn parse<E: serde::de::Error>(s: &str) -> Result<BigUint, E> {
        BigUint::from_str(s).map_err(E::custom)
    }

    pub mod one {
        use super::*;

        pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
            s.serialize_str(&v.to_str_radix(10))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
            parse(&String::deserialize(d)?)
        }
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&x.to_str_radix(10))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|s| parse(s))
                .collect()
        }
    }

    pub mod map {
        use std::collections::BTreeMap;

        use super::*;
        use serde::ser::SerializeMap;

        pub fn serialize<S: Serializer>(
            v: &BTreeMap<u64, BigUint>,
            s: S,
        ) -> Result<S::Ok, S::Error> {
            let mut map = s.serialize_map(Some(v.len()))?;
            for (key, x) in v {
                map.serialize_entry(&key.to_string(), &x.to_str_radix(10))?;
            }
            map.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<BTreeMap<u64, BigUint>, D::Error> {
            BTreeMap::<String, String>::deserialize(d)?
                .iter()
                .map(|(key, x)| Ok((key.parse().map_err(D::Error::custom)?, parse(x)?)))
                .collect()
        }
    }
}
