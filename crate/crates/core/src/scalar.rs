//! Scalar abstraction shared by every numerical routine.
//!
//! Everything pointwise is generic over [`Scalar`], so the same code runs on
//! `f64`, `f32` and on forward-mode dual numbers. Derivatives of composite
//! pointwise operators (for instance `d` applied after a Hodge star) are
//! obtained by evaluating at [`Dual`] points.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};
use std::ops::{AddAssign, DivAssign, MulAssign, RemAssign, SubAssign};

use num_traits::{FromPrimitive, Num, NumAssignOps, One, Zero};

/// Real-like scalar with the elementary functions used by coefficient
/// expressions.
pub trait Scalar:
    Num
    + NumAssignOps
    + FromPrimitive
    + Neg<Output = Self>
    + Copy
    + PartialOrd
    + Debug
    + Send
    + Sync
    + 'static
{
    /// Dual numbers over `Self`, used for one directional derivative.
    type Tangent: Scalar;

    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn abs(self) -> Self;

    /// Primal `f64` value. Pivoting and branch decisions look only at this.
    fn value(self) -> f64;

    /// Size including every tangent part, for convergence tests of
    /// iterations that derivatives pass through.
    fn magnitude(self) -> f64 {
        self.value().abs()
    }

    /// Embeds `x` as a constant of the tangent type.
    fn lift(x: Self) -> Self::Tangent;
    /// Embeds `x` with unit derivative.
    fn seed(x: Self) -> Self::Tangent;
    /// Splits a tangent value into primal and derivative parts.
    fn split(t: Self::Tangent) -> (Self, Self);

    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 is representable")
    }

    fn powi(self, n: i32) -> Self {
        if n < 0 {
            return Self::one() / self.powi(-n);
        }
        let mut acc = Self::one();
        let mut base = self;
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            type Tangent = Dual<$t>;
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
            fn sin(self) -> Self {
                <$t>::sin(self)
            }
            fn cos(self) -> Self {
                <$t>::cos(self)
            }
            fn exp(self) -> Self {
                <$t>::exp(self)
            }
            fn abs(self) -> Self {
                <$t>::abs(self)
            }
            fn value(self) -> f64 {
                self as f64
            }
            fn lift(x: Self) -> Dual<$t> {
                Dual::constant(x)
            }
            fn seed(x: Self) -> Dual<$t> {
                Dual::variable(x)
            }
            fn split(t: Dual<$t>) -> (Self, Self) {
                (t.re, t.eps)
            }
            fn powi(self, n: i32) -> Self {
                <$t>::powi(self, n)
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

/// First-order dual number `re + eps·ε` with `ε² = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Scalar> Dual<T> {
    pub fn new(re: T, eps: T) -> Self {
        Dual { re, eps }
    }
    pub fn constant(re: T) -> Self {
        Dual { re, eps: T::zero() }
    }
    pub fn variable(re: T) -> Self {
        Dual { re, eps: T::one() }
    }
}

impl<T: Scalar> PartialOrd for Dual<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.re.partial_cmp(&other.re)
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual::new(self.re + o.re, self.eps + o.eps)
    }
}
impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual::new(self.re - o.re, self.eps - o.eps)
    }
}
impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Dual::new(self.re * o.re, self.re * o.eps + self.eps * o.re)
    }
}
impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = T::one() / o.re;
        Dual::new(self.re * inv, (self.eps * o.re - self.re * o.eps) * inv * inv)
    }
}
impl<T: Scalar> Rem for Dual<T> {
    type Output = Self;
    fn rem(self, o: Self) -> Self {
        // Only the primal part is meaningful; x mod c has derivative 1 in x.
        Dual::new(self.re % o.re, self.eps)
    }
}
impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.eps)
    }
}

macro_rules! assign_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl<T: Scalar> $tr for Dual<T> {
            fn $m(&mut self, o: Self) {
                *self = *self $op o;
            }
        }
    };
}
assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);
assign_op!(RemAssign, rem_assign, %);

impl<T: Scalar> Zero for Dual<T> {
    fn zero() -> Self {
        Dual::constant(T::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.is_zero()
    }
}
impl<T: Scalar> One for Dual<T> {
    fn one() -> Self {
        Dual::constant(T::one())
    }
}

impl<T: Scalar> Num for Dual<T> {
    type FromStrRadixErr = T::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        T::from_str_radix(s, radix).map(Dual::constant)
    }
}

impl<T: Scalar> FromPrimitive for Dual<T> {
    fn from_i64(n: i64) -> Option<Self> {
        T::from_i64(n).map(Dual::constant)
    }
    fn from_u64(n: u64) -> Option<Self> {
        T::from_u64(n).map(Dual::constant)
    }
    fn from_f64(n: f64) -> Option<Self> {
        T::from_f64(n).map(Dual::constant)
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    type Tangent = Dual<Dual<T>>;

    fn sqrt(self) -> Self {
        let r = self.re.sqrt();
        Dual::new(r, self.eps / (r + r))
    }
    fn sin(self) -> Self {
        Dual::new(self.re.sin(), self.eps * self.re.cos())
    }
    fn cos(self) -> Self {
        Dual::new(self.re.cos(), -self.eps * self.re.sin())
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        Dual::new(e, self.eps * e)
    }
    fn abs(self) -> Self {
        if self.re.value() < 0.0 {
            -self
        } else {
            self
        }
    }
    fn value(self) -> f64 {
        self.re.value()
    }
    fn magnitude(self) -> f64 {
        self.re.magnitude().max(self.eps.magnitude())
    }
    fn lift(x: Self) -> Dual<Self> {
        Dual::constant(x)
    }
    fn seed(x: Self) -> Dual<Self> {
        Dual::variable(x)
    }
    fn split(t: Dual<Self>) -> (Self, Self) {
        (t.re, t.eps)
    }
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        let p = self.re.powi(n - 1);
        Dual::new(p * self.re, self.eps * T::of(n as f64) * p)
    }
}

/// Derivative of `f` at `x` by one forward-mode pass.
pub fn derivative<T: Scalar>(f: impl Fn(T::Tangent) -> T::Tangent, x: T) -> T {
    T::split(f(T::seed(x))).1
}
