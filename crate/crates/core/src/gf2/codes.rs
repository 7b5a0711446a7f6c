//! The three built-in codes: Hamming (7,4), polar (16,8) and BCH (31,21).

use std::fmt;
use std::str::FromStr;

use super::gf32::{degree, poly_mul, Gf32};
use super::GeneratorMatrix;
use crate::error::Error;

/// `x^5 + x^2 + 1`.
pub const BCH_PRIMITIVE_POLY: u32 = 0b100101;

pub const DEFAULT_POLAR_DESIGN_EBN0_DB: f64 = 0.0;

/// Names accepted on the command line and stored in manifests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CodeId {
    Hamming74,
    Polar168,
    Bch3121,
}

impl CodeId {
    pub const ALL: [CodeId; 3] = [CodeId::Hamming74, CodeId::Polar168, CodeId::Bch3121];

    pub fn as_str(self) -> &'static str {
        match self {
            CodeId::Hamming74 => "hamming74",
            CodeId::Polar168 => "polar168",
            CodeId::Bch3121 => "bch3121",
        }
    }

    /// Builds the code; the polar design SNR is ignored by the other codes.
    pub fn build(self, polar_design_ebn0_db: f64) -> GeneratorMatrix {
        match self {
            CodeId::Hamming74 => hamming_7_4(),
            CodeId::Polar168 => polar_16_8(polar_design_ebn0_db),
            CodeId::Bch3121 => bch_31_21(),
        }
    }
}

impl fmt::Display for CodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CodeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_', '(', ')', ',', ' '], "").as_str() {
            "hamming74" | "hamming" => Ok(CodeId::Hamming74),
            "polar168" | "polar" => Ok(CodeId::Polar168),
            "bch3121" | "bch" => Ok(CodeId::Bch3121),
            _ => Err(Error::Parse(format!(
                "unknown code {s:?} (expected hamming74, polar168 or bch3121)"
            ))),
        }
    }
}

/// Systematic `[I | P]` Hamming (7,4) code with parity rows
/// `110, 101, 011, 111`.
pub fn hamming_7_4() -> GeneratorMatrix {
    const PARITY: [[u8; 3]; 4] = [[1, 1, 0], [1, 0, 1], [0, 1, 1], [1, 1, 1]];
    let rows = PARITY
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let parity = p.iter().enumerate().fold(0u64, |acc, (j, &b)| acc | (u64::from(b) << (4 + j)));
            (1u64 << i) | parity
        })
        .collect();
    GeneratorMatrix::new("hamming74", 7, rows).expect("hamming generator is valid")
}

/// Row `i` of the `m`-fold Kronecker power of `[[1,0],[1,1]]`: column `j` is set
/// iff the binary digits of `j` are a subset of those of `i`.
fn kronecker_row(i: usize, len: usize) -> u64 {
    (0..len)
        .filter(|&j| j & !i == 0)
        .fold(0u64, |acc, j| acc | (1u64 << j))
}

/// Bhattacharyya parameters of the `2^m` synthetic channels in natural index
/// order. The first polarization step acts on the most significant index bit:
/// a 0 selects the degraded channel `2z - z²`, a 1 the upgraded channel `z²`.
pub(crate) fn bhattacharyya(m: usize, z0: f64) -> Vec<f64> {
    (0..1usize << m)
        .map(|i| {
            (0..m).rev().fold(z0, |z, bit| {
                if (i >> bit) & 1 == 1 {
                    z * z
                } else {
                    2.0 * z - z * z
                }
            })
        })
        .collect()
}

/// Polar (16,8) code: the 8 most reliable rows of `F^{⊗4}` by Bhattacharyya
/// parameter at the given design Eb/N0. Frozen bits are zero; among equal
/// parameters the lower channel index is frozen first.
pub fn polar_16_8(design_ebn0_db: f64) -> GeneratorMatrix {
    polar(4, 8, design_ebn0_db)
}

fn polar(m: usize, k: usize, design_ebn0_db: f64) -> GeneratorMatrix {
    assert!(design_ebn0_db.is_finite(), "design Eb/N0 must be finite");
    let len = 1usize << m;
    let rate = k as f64 / len as f64;
    let z0 = (-rate * 10f64.powf(design_ebn0_db / 10.0)).exp();
    let z = bhattacharyya(m, z0);
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&a, &b| z[b].total_cmp(&z[a]).then(a.cmp(&b)));
    let mut frozen = order[..len - k].to_vec();
    frozen.sort_unstable();
    let info: Vec<usize> = (0..len).filter(|i| !frozen.contains(i)).collect();
    let rows = info.iter().map(|&i| kronecker_row(i, len)).collect();
    GeneratorMatrix::new(format!("polar{len}{k}"), len, rows)
        .expect("polar generator is valid")
        .with_meta(|meta| {
            meta.frozen_set = Some(frozen);
            meta.design_ebn0_db = Some(design_ebn0_db);
        })
}

fn poly_string(p: u64) -> String {
    let terms: Vec<String> = (0..64)
        .rev()
        .filter(|&i| (p >> i) & 1 == 1)
        .map(|i| match i {
            0 => "1".to_string(),
            1 => "x".to_string(),
            _ => format!("x^{i}"),
        })
        .collect();
    terms.join("+")
}

/// Generator polynomial `lcm(m_1, m_3)` of the narrow-sense double-error
/// correcting BCH code of length 31.
pub fn bch_31_21_generator_poly() -> u64 {
    let field = Gf32::new(BCH_PRIMITIVE_POLY);
    let m1 = field.minimal_polynomial(1);
    let m3 = field.minimal_polynomial(3);
    // Distinct irreducible factors, so the lcm is the product.
    debug_assert_ne!(m1, m3);
    poly_mul(m1, m3)
}

/// BCH (31,21): rows are the cyclic shifts `x^i g(x)`, `i = 0..20`.
pub fn bch_31_21() -> GeneratorMatrix {
    let g = bch_31_21_generator_poly();
    assert_eq!(degree(g), 10);
    let rows = (0..21).map(|i| g << i).collect();
    GeneratorMatrix::new("bch3121", 31, rows)
        .expect("bch generator is valid")
        .with_meta(|meta| meta.generator_polynomial = Some(poly_string(g)))
}
