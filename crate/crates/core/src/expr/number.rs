use std::cmp::Ordering;
use std::fmt;

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};

/// Coefficient of an expression term: an exact rational while it fits in
/// `i64/i64`, otherwise an `f64`.
#[derive(Clone, Copy, Debug)]
pub enum Number {
    Exact(Rational64),
    Real(f64),
}

impl Number {
    pub const ZERO: Number = Number::Exact(Rational64::new_raw(0, 1));
    pub const ONE: Number = Number::Exact(Rational64::new_raw(1, 1));

    pub fn int(n: i64) -> Number {
        Number::Exact(Rational64::from_integer(n))
    }

    pub fn ratio(p: i64, q: i64) -> Number {
        Number::Exact(Rational64::new(p, q))
    }

    /// Exact when `x` is an integer of moderate size or a dyadic with a
    /// small denominator, otherwise a real.
    pub fn from_f64(x: f64) -> Number {
        if x.is_finite() {
            for q in [1i64, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024] {
                let y = x * q as f64;
                if y.fract() == 0.0 && y.abs() < 9.0e15 {
                    return Number::Exact(Rational64::new(y as i64, q));
                }
            }
        }
        Number::Real(x)
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Number::Exact(r) => r.to_f64().unwrap_or_else(|| *r.numer() as f64 / *r.denom() as f64),
            Number::Real(x) => x,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Number::Exact(r) => r.is_zero(),
            Number::Real(x) => x == 0.0,
        }
    }

    pub fn is_one(self) -> bool {
        matches!(self, Number::Exact(r) if r == Rational64::from_integer(1))
    }

    pub fn is_negative(self) -> bool {
        match self {
            Number::Exact(r) => r.is_negative(),
            Number::Real(x) => x < 0.0,
        }
    }

    pub fn abs(self) -> Number {
        if self.is_negative() {
            -self
        } else {
            self
        }
    }

    pub fn recip(self) -> Option<Number> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Number::Exact(r) => Number::Exact(r.recip()),
            Number::Real(x) => Number::Real(1.0 / x),
        })
    }

    /// `√self` if it is an exact rational square.
    pub fn exact_sqrt(self) -> Option<Number> {
        let Number::Exact(r) = self else { return None };
        if r.is_negative() {
            return None;
        }
        let isqrt = |v: i64| -> Option<i64> {
            let s = (v as f64).sqrt().round() as i64;
            (s.checked_mul(s) == Some(v)).then_some(s)
        };
        Some(Number::Exact(Rational64::new(isqrt(*r.numer())?, isqrt(*r.denom())?)))
    }

    fn combine(
        self,
        o: Number,
        exact: impl Fn(&Rational64, &Rational64) -> Option<Rational64>,
        real: impl Fn(f64, f64) -> f64,
    ) -> Number {
        match (self, o) {
            (Number::Exact(a), Number::Exact(b)) => match exact(&a, &b) {
                Some(r) => Number::Exact(r),
                None => Number::Real(real(self.to_f64(), o.to_f64())),
            },
            _ => Number::Real(real(self.to_f64(), o.to_f64())),
        }
    }
}

impl std::ops::Add for Number {
    type Output = Number;
    fn add(self, o: Number) -> Number {
        self.combine(o, |a, b| a.checked_add(b), |a, b| a + b)
    }
}
impl std::ops::Sub for Number {
    type Output = Number;
    fn sub(self, o: Number) -> Number {
        self.combine(o, |a, b| a.checked_sub(b), |a, b| a - b)
    }
}
impl std::ops::Mul for Number {
    type Output = Number;
    fn mul(self, o: Number) -> Number {
        if self.is_zero() || o.is_zero() {
            return Number::ZERO;
        }
        self.combine(o, |a, b| a.checked_mul(b), |a, b| a * b)
    }
}
impl std::ops::Div for Number {
    type Output = Number;
    fn div(self, o: Number) -> Number {
        self.combine(o, |a, b| a.checked_div(b), |a, b| a / b)
    }
}
impl std::ops::Neg for Number {
    type Output = Number;
    fn neg(self) -> Number {
        match self {
            Number::Exact(r) => Number::Exact(-r),
            Number::Real(x) => Number::Real(-x),
        }
    }
}

impl PartialEq for Number {
    fn eq(&self, o: &Number) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Number {}

impl PartialOrd for Number {
    fn partial_cmp(&self, o: &Number) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Number {
    fn cmp(&self, o: &Number) -> Ordering {
        match (self, o) {
            (Number::Exact(a), Number::Exact(b)) => a.cmp(b),
            (Number::Real(a), Number::Real(b)) => a.total_cmp(b),
            (Number::Exact(_), Number::Real(_)) => {
                self.to_f64().total_cmp(&o.to_f64()).then(Ordering::Less)
            }
            (Number::Real(_), Number::Exact(_)) => {
                self.to_f64().total_cmp(&o.to_f64()).then(Ordering::Greater)
            }
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Exact(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Number::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            // Display of f64 never uses exponent notation, so the grammar
            // can read it back.
            Number::Real(x) => write!(f, "{}", x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_falls_back_to_real() {
        let big = Number::int(i64::MAX / 2);
        let p = big * Number::int(4);
        assert!(matches!(p, Number::Real(_)));
        assert!((p.to_f64() - 2.0 * i64::MAX as f64).abs() / p.to_f64() < 1e-12);
    }

    #[test]
    fn exact_arithmetic_stays_exact() {
        let a = Number::ratio(1, 3) + Number::ratio(1, 6);
        assert_eq!(a, Number::ratio(1, 2));
        assert!(matches!(a, Number::Exact(_)));
        assert_eq!(Number::from_f64(0.75), Number::ratio(3, 4));
        assert!(matches!(Number::from_f64(0.1), Number::Real(_)));
        assert_eq!(Number::ratio(9, 4).exact_sqrt(), Some(Number::ratio(3, 2)));
        assert_eq!(Number::int(2).exact_sqrt(), None);
    }
}
