//! Symbolic absolute values `q^e` at the place at infinity.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;

/// `|x|` as an exact power of q, or zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AbsValue {
    Zero,
    /// `q^e`
    Pow(i64),
}

impl AbsValue {
    pub const ONE: AbsValue = AbsValue::Pow(0);

    /// The exponent `e` of `q^e`; `None` for zero.
    pub fn log(self) -> Option<i64> {
        match self {
            AbsValue::Zero => None,
            AbsValue::Pow(e) => Some(e),
        }
    }

    pub fn is_zero(self) -> bool {
        self == AbsValue::Zero
    }

    pub fn recip(self) -> Option<AbsValue> {
        self.log().map(|e| AbsValue::Pow(-e))
    }

    /// Renders as `q^(e)` with the numeric field order substituted.
    pub fn render(self, q: u32) -> String {
        match self {
            AbsValue::Zero => "0".to_string(),
            AbsValue::Pow(e) => format!("{q}^({e})"),
        }
    }
}

impl PartialOrd for AbsValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AbsValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (AbsValue::Zero, AbsValue::Zero) => Ordering::Equal,
            (AbsValue::Zero, _) => Ordering::Less,
            (_, AbsValue::Zero) => Ordering::Greater,
            (AbsValue::Pow(a), AbsValue::Pow(b)) => a.cmp(b),
        }
    }
}

impl Mul for AbsValue {
    type Output = AbsValue;

    #[allow(clippy::suspicious_arithmetic_impl)] // norms multiply, exponents add
    fn mul(self, rhs: AbsValue) -> AbsValue {
        match (self, rhs) {
            (AbsValue::Pow(a), AbsValue::Pow(b)) => AbsValue::Pow(a + b),
            _ => AbsValue::Zero,
        }
    }
}

impl fmt::Display for AbsValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbsValue::Zero => write!(f, "0"),
            AbsValue::Pow(e) => write!(f, "q^({e})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_product() {
        assert!(AbsValue::Zero < AbsValue::Pow(-100));
        assert!(AbsValue::Pow(-2) < AbsValue::Pow(1));
        assert_eq!(AbsValue::Pow(3) * AbsValue::Pow(-5), AbsValue::Pow(-2));
        assert_eq!(AbsValue::Pow(3) * AbsValue::Zero, AbsValue::Zero);
        assert_eq!(AbsValue::Pow(-3).to_string(), "q^(-3)");
        assert_eq!(AbsValue::Pow(3).render(2), "2^(3)");
    }
}
