//! Exact scalars: arbitrary-precision rationals and Gaussian rationals Q(i).
//!
//! Every computation in this crate is exact; floating point never appears.
//! Q(i) is enough for all character values that occur in practice (fourth
//! roots of unity and arbitrary nonzero rationals).

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Shorthand used throughout the crate.
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// An element of the field Q(i), stored as real and imaginary rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gaussian {
    pub re: Rat,
    pub im: Rat,
}

impl Gaussian {
    pub fn new(re: Rat, im: Rat) -> Self {
        Gaussian { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        Gaussian { re: rat(n), im: Rat::zero() }
    }

    pub fn from_rat(re: Rat) -> Self {
        Gaussian { re, im: Rat::zero() }
    }

    pub fn i() -> Self {
        Gaussian { re: Rat::zero(), im: Rat::one() }
    }

    pub fn zero() -> Self {
        Gaussian { re: Rat::zero(), im: Rat::zero() }
    }

    pub fn one() -> Self {
        Gaussian { re: Rat::one(), im: Rat::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Gaussian { re: self.re.clone(), im: -self.im.clone() }
    }

    /// Norm N(z) = z * conj(z) as a rational.
    pub fn norm(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Self {
        let n = self.norm();
        assert!(!n.is_zero(), "division by zero in Q(i)");
        Gaussian { re: &self.re / &n, im: -&self.im / &n }
    }

    /// Integer power (negative exponents use the inverse).
    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inv() } else { self.clone() };
        let mut acc = Gaussian::one();
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    pub fn scale(&self, r: &Rat) -> Self {
        Gaussian { re: &self.re * r, im: &self.im * r }
    }
}

impl fmt::Debug for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}{}i", self.re, self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, |$a:ident, $b:ident| $body:expr) => {
        impl<'a, 'b> $trait<&'b Gaussian> for &'a Gaussian {
            type Output = Gaussian;
            fn $method(self, other: &'b Gaussian) -> Gaussian {
                let ($a, $b) = (self, other);
                $body
            }
        }
        impl $trait<Gaussian> for Gaussian {
            type Output = Gaussian;
            fn $method(self, other: Gaussian) -> Gaussian {
                $trait::$method(&self, &other)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| Gaussian { re: &a.re + &b.re, im: &a.im + &b.im });
forward_binop!(Sub, sub, |a, b| Gaussian { re: &a.re - &b.re, im: &a.im - &b.im });
forward_binop!(Mul, mul, |a, b| Gaussian {
    re: &a.re * &b.re - &a.im * &b.im,
    im: &a.re * &b.im + &a.im * &b.re,
});
forward_binop!(Div, div, |a, b| a * &b.inv());

impl Neg for &Gaussian {
    type Output = Gaussian;
    fn neg(self) -> Gaussian {
        Gaussian { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Neg for Gaussian {
    type Output = Gaussian;
    fn neg(self) -> Gaussian {
        -&self
    }
}

impl AddAssign<&Gaussian> for Gaussian {
    fn add_assign(&mut self, rhs: &Gaussian) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&Gaussian> for Gaussian {
    fn sub_assign(&mut self, rhs: &Gaussian) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&Gaussian> for Gaussian {
    fn mul_assign(&mut self, rhs: &Gaussian) {
        *self = &*self * rhs;
    }
}
