//! Arithmetic in GF(2^κ) for the handful of κ the workbench uses.

use std::fmt;
use std::ops::{Add, Mul};

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Field sizes with a fixed reduction polynomial.
pub const SUPPORTED_KAPPAS: [u8; 5] = [3, 4, 8, 16, 32];

/// Reduction polynomial for GF(2^κ), including the leading x^κ term.
///
/// | κ  | polynomial                   |
/// |----|------------------------------|
/// | 3  | x³ + x + 1                   |
/// | 4  | x⁴ + x + 1                   |
/// | 8  | x⁸ + x⁴ + x³ + x + 1         |
/// | 16 | x¹⁶ + x⁵ + x³ + x² + 1       |
/// | 32 | x³² + x²² + x² + x + 1       |
pub fn modulus(kappa: u8) -> Result<u64> {
    match kappa {
        3 => Ok(0b1011),
        4 => Ok(0b1_0011),
        8 => Ok(0x11B),
        16 => Ok(0x1_002D),
        32 => Ok(0x1_0040_0007),
        k => Err(Error::param(format!("unsupported field size κ={k}"))),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem {
    value: u32,
    kappa: u8,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}@GF(2^{})", self.value, self.kappa)
    }
}

impl FieldElem {
    pub fn new(value: u32, kappa: u8) -> Result<Self> {
        modulus(kappa)?;
        if kappa < 32 && value >> kappa != 0 {
            return Err(Error::param(format!("{value} does not fit in GF(2^{kappa})")));
        }
        Ok(FieldElem { value, kappa })
    }

    pub fn zero(kappa: u8) -> Self {
        FieldElem { value: 0, kappa }
    }

    pub fn one(kappa: u8) -> Self {
        FieldElem { value: 1, kappa }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn kappa(self) -> u8 {
        self.kappa
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn random(kappa: u8, rng: &mut Rng) -> Self {
        let v: u32 = rng.random();
        let value = if kappa >= 32 { v } else { v & ((1 << kappa) - 1) };
        FieldElem { value, kappa }
    }

    /// Bits of the value, least significant first, exactly κ of them.
    pub fn to_bits(self) -> Vec<bool> {
        (0..self.kappa).map(|i| self.value >> i & 1 == 1).collect()
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let kappa = u8::try_from(bits.len()).map_err(|_| Error::param("too many bits"))?;
        let value = bits.iter().enumerate().fold(0u32, |acc, (i, &b)| acc | (u32::from(b) << i));
        FieldElem::new(value, kappa)
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = FieldElem::one(self.kappa);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via a^(2^κ − 2).
    pub fn inv(self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::param("zero has no inverse"));
        }
        Ok(self.pow((1u64 << self.kappa) - 2))
    }
}

fn raw_mul(a: u32, b: u32, kappa: u8) -> u32 {
    let m = modulus(kappa).expect("validated on construction");
    let mut prod: u64 = 0;
    let (a, mut b) = (u64::from(a), u64::from(b));
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            prod ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    for bit in (u32::from(kappa)..2 * u32::from(kappa)).rev() {
        if prod >> bit & 1 == 1 {
            prod ^= m << (bit - u32::from(kappa));
        }
    }
    prod as u32
}

/// Field product; both operands must come from the same GF(2^κ).
pub fn gf_mul(a: FieldElem, b: FieldElem) -> Result<FieldElem> {
    if a.kappa != b.kappa {
        return Err(Error::param(format!("mismatched fields GF(2^{}) and GF(2^{})", a.kappa, b.kappa)));
    }
    Ok(FieldElem { value: raw_mul(a.value, b.value, a.kappa), kappa: a.kappa })
}

impl Add for FieldElem {
    type Output = FieldElem;

    /// # Panics
    /// If the operands live in different fields.
    fn add(self, rhs: FieldElem) -> FieldElem {
        assert_eq!(self.kappa, rhs.kappa, "field mismatch");
        FieldElem { value: self.value ^ rhs.value, kappa: self.kappa }
    }
}

impl Mul for FieldElem {
    type Output = FieldElem;

    /// # Panics
    /// If the operands live in different fields.
    fn mul(self, rhs: FieldElem) -> FieldElem {
        gf_mul(self, rhs).expect("field mismatch")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn e(v: u32, k: u8) -> FieldElem {
        FieldElem::new(v, k).unwrap()
    }

    /// Polynomial product over GF(2) followed by long division, written
    /// independently of `raw_mul`.
    fn table_mul(a: u32, b: u32, poly: u32, k: u32) -> u32 {
        let mut p = 0u32;
        for i in 0..k {
            for j in 0..k {
                if (a >> i) & 1 == 1 && (b >> j) & 1 == 1 {
                    p ^= 1 << (i + j);
                }
            }
        }
        for d in (k..2 * k).rev() {
            if (p >> d) & 1 == 1 {
                p ^= poly << (d - k);
            }
        }
        p
    }

    #[test]
    fn zero_and_one() {
        for k in SUPPORTED_KAPPAS {
            let x = e(5, k);
            assert_eq!(gf_mul(FieldElem::zero(k), x).unwrap(), FieldElem::zero(k));
            assert_eq!(gf_mul(FieldElem::one(k), x).unwrap(), x);
        }
    }

    #[test]
    fn gf8_table_matches() {
        let table: Vec<Vec<u32>> = (0..8).map(|a| (0..8).map(|b| table_mul(a, b, 0b1011, 3)).collect()).collect();
        for a in 0..8 {
            for b in 0..8 {
                assert_eq!(gf_mul(e(a, 3), e(b, 3)).unwrap().value(), table[a as usize][b as usize]);
            }
        }
        // x · (x + 1) = x² + x
        assert_eq!(table[0b010][0b011], 0b110);
        assert_eq!(gf_mul(e(0b010, 3), e(0b011, 3)).unwrap().value(), 0b110);
    }

    #[test]
    fn gf256_matches_table_product() {
        for a in 0..256 {
            for b in (0..256).step_by(7) {
                assert_eq!(raw_mul(a, b, 8), table_mul(a, b, 0x11B, 8));
            }
        }
    }

    #[test]
    fn mismatched_fields_rejected() {
        assert!(gf_mul(e(1, 3), e(1, 4)).is_err());
        assert!(FieldElem::new(8, 3).is_err());
        assert!(FieldElem::new(1, 5).is_err());
    }

    #[test]
    fn every_nonzero_element_has_an_inverse() {
        for k in [3u8, 4, 8] {
            for v in 1..(1u32 << k) {
                let a = e(v, k);
                let inv = (1..(1u32 << k)).map(|w| e(w, k)).find(|&b| (a * b).value() == 1);
                let inv = inv.expect("field property");
                assert_eq!(a.inv().unwrap(), inv);
            }
        }
    }

    fn poly_mod(mut a: u64, m: u64) -> u64 {
        let dm = 63 - m.leading_zeros();
        while a != 0 && 63 - a.leading_zeros() >= dm {
            a ^= m << (63 - a.leading_zeros() - dm);
        }
        a
    }

    #[test]
    fn reduction_polynomials_are_irreducible() {
        for k in [3u8, 4, 8, 16, 32] {
            let m = modulus(k).unwrap();
            for f in 2u64..(1 << (k / 2 + 1)) {
                assert_ne!(poly_mod(m, f), 0, "κ={k} divisible by {f:#b}");
            }
        }
    }

    #[test]
    fn gf32_inverse_and_distributivity() {
        let mut rng = seeded(11);
        for _ in 0..200 {
            let (a, b, c) =
                (FieldElem::random(32, &mut rng), FieldElem::random(32, &mut rng), FieldElem::random(32, &mut rng));
            assert_eq!(a * (b + c), a * b + a * c);
            assert_eq!((a * b) * c, a * (b * c));
            if !a.is_zero() {
                assert_eq!(a * a.inv().unwrap(), FieldElem::one(32));
            }
        }
    }

    #[test]
    fn bits_roundtrip() {
        let x = e(0b1010_0110, 8);
        assert_eq!(FieldElem::from_bits(&x.to_bits()).unwrap(), x);
    }
}
