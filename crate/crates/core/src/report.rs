//! CSV/JSON emission and run manifests.
//!
//! CSV headers are fixed strings; floats are printed with 17 significant
//! digits and big integers as plain decimal strings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bound::BoundPoint;
use crate::count::{PathCountRow, PathHistogram};
use crate::lattice::{LatticeVariant, Sign, Vertex};
use crate::sim::CrossingEstimate;

pub const ARCS_HEADER: &str = "variant,k,sign,a1,a2";
pub const COUNT_HEADER: &str = "k,i,coefficient,power_of_two,count";
pub const COUNT_BRUTEFORCE_HEADER: &str = "k,i,coefficient,power_of_two,count,bruteforce_count";
pub const BOUND_HEADER: &str = "k,mid,log_count,b_k,abs_err_vs_limit,b_k_displayed";
pub const ESTIMATE_HEADER: &str = "variant,k,p,event,trials,hits,phat,ci_low,ci_high,seed";

/// `x` with 17 significant digits; positional for moderate exponents.
pub fn fmt_f64(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.0000000000000000".into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..=16).contains(&exp) {
        return sci;
    }
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if exp < 0 {
        format!("{sign}0.{}{digits}", "0".repeat((-exp - 1) as usize))
    } else {
        let split = exp as usize + 1;
        if split >= digits.len() {
            format!("{sign}{digits}{}.0", "0".repeat(split - digits.len()))
        } else {
            format!("{sign}{}.{}", &digits[..split], &digits[split..])
        }
    }
}

pub fn sha256_hex(data: &[u8]) -> String {
    Sha256::digest(data)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcListing {
    pub variant: LatticeVariant,
    pub k: u64,
    pub sign: Sign,
    pub vertices: Vec<Vertex>,
}

impl ArcListing {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{ARCS_HEADER}\n");
        for v in &self.vertices {
            let _ = writeln!(out, "{},{},{},{}", self.variant, self.k, self.sign, v);
        }
        out
    }

    pub fn to_text(&self) -> String {
        self.vertices.iter().map(|v| format!("{v}\n")).collect()
    }
}

/// Row table; with a histogram, an extra column holds the enumerated count
/// at norm `k + i`.
pub fn count_csv(row: &PathCountRow, hist: Option<&PathHistogram>) -> String {
    let header = if hist.is_some() {
        COUNT_BRUTEFORCE_HEADER
    } else {
        COUNT_HEADER
    };
    let mut out = format!("{header}\n");
    for (i, count) in row.counts.iter().enumerate() {
        let i = i as u64;
        let coeff = row.coefficient(i).expect("index in row");
        let _ = write!(
            out,
            "{},{},{},{},{}",
            row.k,
            i,
            coeff,
            row.power_of_two(i),
            count
        );
        if let Some(h) = hist {
            let brute = h
                .by_norm
                .get(&(row.k + i))
                .map(|c| c.to_string())
                .unwrap_or_default();
            let _ = write!(out, ",{brute}");
        }
        out.push('\n');
    }
    out
}

pub fn bound_csv(points: &[BoundPoint]) -> String {
    let mut out = format!("{BOUND_HEADER}\n");
    for b in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            b.k,
            b.mid,
            fmt_f64(b.log_count),
            fmt_f64(b.b_k),
            fmt_f64(b.abs_err_vs_limit()),
            fmt_f64(b.b_k_displayed)
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub k: u64,
    pub mid: u64,
    pub log_count: f64,
    pub b_k: f64,
    pub abs_err_vs_limit: f64,
    pub b_k_displayed: f64,
}

impl From<&BoundPoint> for BoundRecord {
    fn from(b: &BoundPoint) -> Self {
        BoundRecord {
            k: b.k,
            mid: b.mid,
            log_count: b.log_count,
            b_k: b.b_k,
            abs_err_vs_limit: b.abs_err_vs_limit(),
            b_k_displayed: b.b_k_displayed,
        }
    }
}

/// Flat form of a [`CrossingEstimate`], one CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub variant: LatticeVariant,
    pub k: u64,
    pub p: f64,
    pub event: String,
    pub trials: u64,
    pub hits: u64,
    pub phat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl From<&CrossingEstimate> for EstimateRecord {
    fn from(e: &CrossingEstimate) -> Self {
        EstimateRecord {
            variant: e.config.variant,
            k: e.config.k,
            p: e.config.p,
            event: e.event.to_string(),
            trials: e.config.trials,
            hits: e.hits,
            phat: e.phat,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
            seed: e.config.seed,
        }
    }
}

impl EstimateRecord {
    pub fn csv_fields(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.variant,
            self.k,
            fmt_f64(self.p),
            self.event,
            self.trials,
            self.hits,
            fmt_f64(self.phat),
            fmt_f64(self.ci_low),
            fmt_f64(self.ci_high),
            self.seed
        )
    }
}

pub fn estimates_csv(estimates: &[CrossingEstimate]) -> String {
    let mut out = format!("{ESTIMATE_HEADER}\n");
    for e in estimates {
        out.push_str(&EstimateRecord::from(e).csv_fields());
        out.push('\n');
    }
    out
}

/// Parameters and output digest of one CLI run. Replaying `argv` reproduces
/// the data output byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub argv: Vec<String>,
    pub params: serde_json::Value,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub output_sha256: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::bound_at;
    use crate::count::{count_row, enumerate_paths_bruteforce};

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.5), "0.50000000000000000");
        assert_eq!(fmt_f64(1.0), "1.0000000000000000");
        assert_eq!(fmt_f64(-2.5), "-2.5000000000000000");
        assert_eq!(fmt_f64(0.0), "0.0000000000000000");
        assert_eq!(fmt_f64(0.001), "0.0010000000000000000");
        assert_eq!(fmt_f64(1e-7), "9.9999999999999995e-8");
        assert_eq!(fmt_f64(123456.0), "123456.00000000000");
        for x in [
            std::f64::consts::PI,
            0.353_553_390_593_273_73,
            1.0 / 3.0,
            9.87e-5,
            4.2e12,
        ] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            assert_eq!(
                s.chars()
                    .filter(char::is_ascii_digit)
                    .skip_while(|&c| c == '0')
                    .count(),
                17
            );
        }
    }

    #[test]
    fn count_table() {
        let row = count_row(2).unwrap();
        assert_eq!(
            count_csv(&row, None),
            "k,i,coefficient,power_of_two,count\n2,0,1,4,4\n2,1,2,2,4\n2,2,1,1,1\n"
        );
        let h = enumerate_paths_bruteforce(2).unwrap();
        let csv = count_csv(&row, Some(&h));
        assert!(csv.ends_with("2,2,1,1,1,1\n"), "{csv}");
    }

    #[test]
    fn bound_table() {
        let csv = bound_csv(&[bound_at(1).unwrap()]);
        assert_eq!(
            csv.lines().nth(1).unwrap(),
            "1,0,0.69314718055994529,0.50000000000000000,0.14644660940672627,0.70710678118654757"
        );
    }

    #[test]
    fn digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
