//! Machine integer types and bit-level value helpers.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A fixed-width two's complement integer type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntType {
    pub width: u32,
    pub signed: bool,
}

impl IntType {
    pub const I8: IntType = IntType::new(8, true);
    pub const U8: IntType = IntType::new(8, false);
    pub const I16: IntType = IntType::new(16, true);
    pub const U16: IntType = IntType::new(16, false);
    pub const I32: IntType = IntType::new(32, true);
    pub const U32: IntType = IntType::new(32, false);

    pub const fn new(width: u32, signed: bool) -> Self {
        IntType { width, signed }
    }

    pub fn mask(self) -> u64 {
        mask(self.width)
    }

    /// Smallest representable value.
    pub fn min_value(self) -> i128 {
        if self.signed {
            -(1i128 << (self.width - 1))
        } else {
            0
        }
    }

    /// Largest representable value.
    pub fn max_value(self) -> i128 {
        if self.signed {
            (1i128 << (self.width - 1)) - 1
        } else {
            (1i128 << self.width) - 1
        }
    }

    /// Interprets raw bits as a mathematical integer of this type.
    pub fn to_i128(self, bits: u64) -> i128 {
        let bits = bits & self.mask();
        if self.signed {
            sign_extend(bits, self.width) as i128
        } else {
            bits as i128
        }
    }

    /// Wraps a mathematical integer into this type's bit pattern.
    pub fn wrap(self, value: i128) -> u64 {
        (value as u64) & self.mask()
    }

    pub fn contains(self, value: i128) -> bool {
        value >= self.min_value() && value <= self.max_value()
    }

    /// Usual C spelling of the type.
    pub fn c_name(self) -> &'static str {
        match (self.width, self.signed) {
            (8, true) => "signed char",
            (8, false) => "unsigned char",
            (16, true) => "short",
            (16, false) => "unsigned short",
            (32, true) => "int",
            (32, false) => "unsigned int",
            (64, true) => "long long",
            (64, false) => "unsigned long long",
            _ => "int",
        }
    }
}

impl fmt::Display for IntType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.signed { 'i' } else { 'u' }, self.width)
    }
}

/// Type of a typed expression: a truth value or a machine integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ty {
    Bool,
    Int(IntType),
}

impl Ty {
    pub fn int(self) -> Option<IntType> {
        match self {
            Ty::Int(t) => Some(t),
            Ty::Bool => None,
        }
    }

    pub fn is_bool(self) -> bool {
        matches!(self, Ty::Bool)
    }

    pub fn width(self) -> u32 {
        match self {
            Ty::Bool => 1,
            Ty::Int(t) => t.width,
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Bool => f.write_str("bool"),
            Ty::Int(t) => write!(f, "{}", t.c_name()),
        }
    }
}

pub fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

pub fn sign_extend(bits: u64, width: u32) -> i64 {
    if width >= 64 {
        bits as i64
    } else {
        let shift = 64 - width;
        ((bits << shift) as i64) >> shift
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(IntType::I8.min_value(), -128);
        assert_eq!(IntType::I8.max_value(), 127);
        assert_eq!(IntType::U32.max_value(), u32::MAX as i128);
        assert_eq!(IntType::I8.to_i128(0xff), -1);
        assert_eq!(IntType::U8.to_i128(0xff), 255);
        assert_eq!(IntType::I8.wrap(-1), 0xff);
        assert_eq!(IntType::U16.wrap(65536 + 3), 3);
    }
}
