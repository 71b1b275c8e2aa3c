//! Bit-string helpers shared by the channel, hashing and wire layers.

use rand::Rng as _;

use crate::rng::Rng;

/// Uniform bits, 64 per generator call.
pub fn random_bits(n: usize, rng: &mut Rng) -> Vec<bool> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let w: u64 = rng.random();
        out.extend((0..64.min(n - out.len())).map(|i| w >> i & 1 == 1));
    }
    out
}

pub fn xor(a: &[bool], b: &[bool]) -> Vec<bool> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

pub fn select(bits: &[bool], idx: &[usize]) -> Vec<bool> {
    idx.iter().map(|&i| bits[i]).collect()
}

/// LSB-first packing into bytes; trailing bits of the last byte are zero.
pub fn pack(bits: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            out[i / 8] |= 1 << (i % 8);
        }
    }
    out
}

pub fn unpack(bytes: &[u8], n: usize) -> Vec<bool> {
    (0..n).map(|i| bytes[i / 8] >> (i % 8) & 1 == 1).collect()
}

/// Bits of `v`, least significant first.
pub fn from_u64(v: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| v >> i & 1 == 1).collect()
}

pub fn to_u64(bits: &[bool]) -> u64 {
    assert!(bits.len() <= 64);
    bits.iter().enumerate().fold(0, |acc, (i, &b)| acc | (u64::from(b) << i))
}

pub fn to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}
