//! Binary strings and bit-reversal arithmetic.
//!
//! Everything downstream leans on two facts made explicit here: a slot
//! number and the index it carries are bit reversals of each other, and
//! interval structure on one side turns into suffix structure on the
//! other. `BitString` keeps length and value separate so that strings
//! with leading zeros, including the empty string, stay distinguishable.

use std::fmt;

use crate::error::Error;

/// Capacity of a [`BitString`] in bits.
pub const MAX_BITS: u32 = 64;

/// An MSB-first string of binary digits, at most 64 of them.
///
/// Leading zeros are significant for the length but not for the value:
/// `(0101)` and `(101)` share the value 5 and differ as strings. The
/// empty string is valid and has value 0.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitString {
    len: u32,
    // Low `len` bits hold the digits; the string's first digit is bit
    // `len - 1`. Bits above `len` are always zero.
    value: u64,
}

impl BitString {
    pub const EMPTY: BitString = BitString { len: 0, value: 0 };

    /// The `width`-digit string representing `x mod 2^width`.
    pub fn bin_fixed(x: u64, width: u32) -> Result<BitString, Error> {
        if width > MAX_BITS {
            return Err(Error::WidthExceeded(width));
        }
        Ok(BitString {
            len: width,
            value: mask(x, width),
        })
    }

    /// The shortest string representing `x`; empty when `x = 0`.
    pub fn bin(x: u64) -> BitString {
        BitString {
            len: 64 - x.leading_zeros(),
            value: x,
        }
    }

    /// `width` zero digits.
    pub fn zeros(width: u32) -> Result<BitString, Error> {
        BitString::bin_fixed(0, width)
    }

    /// `width` one digits.
    pub fn ones(width: u32) -> Result<BitString, Error> {
        if width > MAX_BITS {
            return Err(Error::WidthExceeded(width));
        }
        let value = if width == 0 {
            0
        } else {
            u64::MAX >> (64 - width)
        };
        Ok(BitString { len: width, value })
    }

    /// The number the digits spell out, first digit most significant.
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Digit at position `i`, counted from the first (most significant) end.
    pub fn bit(&self, i: u32) -> u8 {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        ((self.value >> (self.len - 1 - i)) & 1) as u8
    }

    /// The same digits in the opposite order.
    pub fn reversed(&self) -> BitString {
        if self.len == 0 {
            return *self;
        }
        BitString {
            len: self.len,
            value: self.value.reverse_bits() >> (64 - self.len),
        }
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &BitString) -> Result<BitString, Error> {
        let len = self.len + other.len;
        if len > MAX_BITS {
            return Err(Error::WidthExceeded(len));
        }
        if other.len == 64 {
            // `self` is empty here, and a shift by 64 would be undefined.
            return Ok(*other);
        }
        Ok(BitString {
            len,
            value: (self.value << other.len) | other.value,
        })
    }

    /// `d` copies of `self` joined together.
    pub fn repeat(&self, d: u32) -> Result<BitString, Error> {
        if self.len == 0 {
            return Ok(BitString::EMPTY);
        }
        let total = self.len as u64 * d as u64;
        if total > MAX_BITS as u64 {
            return Err(Error::WidthExceeded(total.min(u32::MAX as u64) as u32));
        }
        let mut out = BitString::EMPTY;
        for _ in 0..d {
            out = out.concat(self)?;
        }
        Ok(out)
    }

    /// The first `width` digits.
    pub fn prefix(&self, width: u32) -> BitString {
        assert!(
            width <= self.len,
            "prefix {width} longer than string {}",
            self.len
        );
        let value = if width == 0 {
            0
        } else {
            self.value >> (self.len - width)
        };
        BitString { len: width, value }
    }

    /// The last `width` digits.
    pub fn suffix(&self, width: u32) -> BitString {
        assert!(
            width <= self.len,
            "suffix {width} longer than string {}",
            self.len
        );
        BitString {
            len: width,
            value: mask(self.value, width),
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 0..self.len {
            write!(f, "{}", self.bit(i))?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn mask(x: u64, width: u32) -> u64 {
    if width == 64 {
        x
    } else {
        x & ((1u64 << width) - 1)
    }
}

/// The value whose `k`-digit string is the reversal of the `k`-digit
/// string of `t mod 2^k`.
///
/// Negative inputs are reduced with the mathematical modulus, so the
/// result always lands in `[0, 2^k - 1]`. This is the broadcast schedule:
/// slot `t` carries the key with index `rev_k(t)`.
pub fn rev_k(t: i64, k: u32) -> i64 {
    assert!(k <= 63, "rev_k width {k} out of range");
    if k == 0 {
        return 0;
    }
    let m = t.rem_euclid(1i64 << k) as u64;
    (m.reverse_bits() >> (64 - k)) as i64
}

/// [`rev_k`] spelled out through string reversal. Slower than the bit
/// trick above and kept as its independent oracle.
pub fn rev_k_reference(t: i64, k: u32) -> i64 {
    assert!(k <= 63, "rev_k width {k} out of range");
    let m = t.rem_euclid(1i64 << k) as u64;
    let string = BitString::bin_fixed(m, k).expect("k <= 63 fits in a BitString");
    string.reversed().value() as i64
}

/// The largest `l <= k` with `t mod 2^l = 0`: how far `t` is aligned,
/// capped at the cycle exponent. Requires `t >= 0`.
pub fn trailing_zero_run(t: i64, k: u32) -> u32 {
    assert!(t >= 0, "alignment of a negative slot {t}");
    assert!(k <= 63, "trailing_zero_run width {k} out of range");
    (t.trailing_zeros()).min(k)
}
