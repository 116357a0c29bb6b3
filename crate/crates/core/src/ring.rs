//! Fixed-width modular integers: the domain all shares live in.
//!
//! Elements are residues modulo `2^k` for `k` in {32, 64, 128}, stored in a
//! `u128` and masked after every operation so the invariant `value < 2^k`
//! holds at all times. Serialization is little-endian with exactly
//! `ceil(k/8)` bytes and no framing.

use rand_chacha::rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Supported ring widths (bits of the modulus `2^k`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RingWidth {
    W32,
    W64,
    W128,
}

impl RingWidth {
    pub fn from_bits(bits: u32) -> Result<Self> {
        match bits {
            32 => Ok(RingWidth::W32),
            64 => Ok(RingWidth::W64),
            128 => Ok(RingWidth::W128),
            other => Err(Error::InvalidConfig(format!(
                "ring width must be 32, 64, or 128 bits, got {other}"
            ))),
        }
    }

    pub const fn bits(self) -> u32 {
        match self {
            RingWidth::W32 => 32,
            RingWidth::W64 => 64,
            RingWidth::W128 => 128,
        }
    }

    /// Serialized size of one element: `ceil(bits/8)`.
    pub const fn byte_len(self) -> usize {
        (self.bits() as usize) / 8
    }

    /// All-ones value of the ring: the reduction mask for raw integers.
    pub const fn mask(self) -> u128 {
        match self {
            RingWidth::W32 => (1u128 << 32) - 1,
            RingWidth::W64 => (1u128 << 64) - 1,
            RingWidth::W128 => u128::MAX,
        }
    }
}

/// A residue modulo `2^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingElement {
    value: u128,
    width: RingWidth,
}

impl RingElement {
    /// Reduces `value` modulo `2^k`.
    pub fn new(value: u128, width: RingWidth) -> Self {
        RingElement {
            value: value & width.mask(),
            width,
        }
    }

    pub fn zero(width: RingWidth) -> Self {
        RingElement { value: 0, width }
    }

    pub fn value(self) -> u128 {
        self.value
    }

    pub fn width(self) -> RingWidth {
        self.width
    }

    /// Uniform element drawn from `rng`; consumes exactly `k` bits of the
    /// stream, low word first for the 128-bit width.
    pub fn random(width: RingWidth, rng: &mut impl RngCore) -> Self {
        let value = match width {
            RingWidth::W32 => u128::from(rng.next_u32()),
            RingWidth::W64 => u128::from(rng.next_u64()),
            RingWidth::W128 => {
                let lo = u128::from(rng.next_u64());
                let hi = u128::from(rng.next_u64());
                lo | (hi << 64)
            }
        };
        RingElement { value, width }
    }

    // Plain methods rather than std::ops impls: ring arithmetic panics on
    // mixed widths, and an operator hiding that assert reads as infallible.
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, rhs: Self) -> Self {
        self.binop(rhs, u128::wrapping_add)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, rhs: Self) -> Self {
        self.binop(rhs, u128::wrapping_sub)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, rhs: Self) -> Self {
        self.binop(rhs, u128::wrapping_mul)
    }

    fn binop(self, rhs: Self, op: fn(u128, u128) -> u128) -> Self {
        assert_eq!(self.width, rhs.width, "mixed ring widths in arithmetic");
        RingElement {
            value: op(self.value, rhs.value) & self.width.mask(),
            width: self.width,
        }
    }

    /// Little-endian encoding, exactly [`RingWidth::byte_len`] bytes.
    pub fn to_le_bytes(self) -> Vec<u8> {
        self.value.to_le_bytes()[..self.width.byte_len()].to_vec()
    }

    /// Inverse of [`RingElement::to_le_bytes`]; `bytes` must be exactly one
    /// element wide.
    pub fn from_le_bytes(bytes: &[u8], width: RingWidth) -> Result<Self> {
        if bytes.len() != width.byte_len() {
            return Err(Error::InvalidUsage(format!(
                "expected {} bytes for a {}-bit element, got {}",
                width.byte_len(),
                width.bits(),
                bytes.len()
            )));
        }
        let mut buf = [0u8; 16];
        buf[..bytes.len()].copy_from_slice(bytes);
        Ok(RingElement {
            value: u128::from_le_bytes(buf),
            width,
        })
    }
}

/// Concatenates the little-endian encodings of `elems`.
pub fn encode_elements(elems: &[RingElement]) -> Vec<u8> {
    let mut out = Vec::with_capacity(elems.iter().map(|e| e.width().byte_len()).sum());
    for e in elems {
        out.extend_from_slice(&e.to_le_bytes());
    }
    out
}

/// Splits `bytes` into `count` elements of the given width.
pub fn decode_elements(bytes: &[u8], width: RingWidth, count: usize) -> Result<Vec<RingElement>> {
    let step = width.byte_len();
    if bytes.len() != step * count {
        return Err(Error::InvalidUsage(format!(
            "expected {} bytes for {count} elements, got {}",
            step * count,
            bytes.len()
        )));
    }
    bytes
        .chunks_exact(step)
        .map(|c| RingElement::from_le_bytes(c, width))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from;
    use proptest::prelude::*;

    #[test]
    fn byte_len_matches_width() {
        assert_eq!(RingWidth::W32.byte_len(), 4);
        assert_eq!(RingWidth::W64.byte_len(), 8);
        assert_eq!(RingWidth::W128.byte_len(), 16);
    }

    #[test]
    fn from_bits_rejects_unsupported_widths() {
        assert!(RingWidth::from_bits(64).is_ok());
        for bad in [0, 8, 16, 33, 48, 256] {
            assert!(matches!(
                RingWidth::from_bits(bad),
                Err(Error::InvalidConfig(_))
            ));
        }
    }

    #[test]
    fn arithmetic_wraps_at_the_modulus() {
        let w = RingWidth::W32;
        let max = RingElement::new(u128::from(u32::MAX), w);
        let one = RingElement::new(1, w);
        assert_eq!(max.add(one).value(), 0);
        assert_eq!(RingElement::zero(w).sub(one).value(), u128::from(u32::MAX));
        // (2^31)^2 = 2^62 == 0 mod 2^32.
        let half = RingElement::new(1 << 31, w);
        assert_eq!(half.mul(half).value(), 0);
    }

    #[test]
    fn new_reduces_out_of_range_values() {
        let e = RingElement::new(u128::MAX, RingWidth::W64);
        assert_eq!(e.value(), u128::from(u64::MAX));
    }

    #[test]
    fn w128_arithmetic_uses_full_width() {
        let w = RingWidth::W128;
        let max = RingElement::new(u128::MAX, w);
        assert_eq!(max.add(RingElement::new(1, w)).value(), 0);
        assert_eq!(max.mul(max).value(), 1); // (-1)^2 = 1
    }

    #[test]
    fn random_is_deterministic_per_seed() {
        for w in [RingWidth::W32, RingWidth::W64, RingWidth::W128] {
            let a = RingElement::random(w, &mut rng_from(9));
            let b = RingElement::random(w, &mut rng_from(9));
            assert_eq!(a, b);
        }
    }

    #[test]
    fn decode_rejects_ragged_buffers() {
        let bytes = [0u8; 7];
        assert!(decode_elements(&bytes, RingWidth::W32, 2).is_err());
        assert!(RingElement::from_le_bytes(&bytes, RingWidth::W64).is_err());
    }

    proptest! {
        #[test]
        fn serialization_round_trips(value in any::<u128>(), width_sel in 0usize..3) {
            let width = [RingWidth::W32, RingWidth::W64, RingWidth::W128][width_sel];
            let e = RingElement::new(value, width);
            let bytes = e.to_le_bytes();
            prop_assert_eq!(bytes.len(), width.byte_len());
            prop_assert_eq!(RingElement::from_le_bytes(&bytes, width).unwrap(), e);
        }

        #[test]
        fn add_matches_modular_arithmetic(a in any::<u64>(), b in any::<u64>()) {
            let w = RingWidth::W32;
            let got = RingElement::new(u128::from(a), w).add(RingElement::new(u128::from(b), w));
            let expect = (u128::from(a) + u128::from(b)) % (1u128 << 32);
            prop_assert_eq!(got.value(), expect);
        }

        #[test]
        fn mul_matches_modular_arithmetic(a in any::<u64>(), b in any::<u64>()) {
            let w = RingWidth::W64;
            let got = RingElement::new(u128::from(a), w).mul(RingElement::new(u128::from(b), w));
            let expect = (u128::from(a) * u128::from(b)) % (1u128 << 64);
            prop_assert_eq!(got.value(), expect);
        }

        #[test]
        fn batch_encoding_round_trips(values in prop::collection::vec(any::<u128>(), 0..16)) {
            let w = RingWidth::W128;
            let elems: Vec<_> = values.iter().map(|&v| RingElement::new(v, w)).collect();
            let bytes = encode_elements(&elems);
            prop_assert_eq!(decode_elements(&bytes, w, elems.len()).unwrap(), elems);
        }
    }
}
