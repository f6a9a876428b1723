//! Exact scalars: arbitrary-precision rationals and Gaussian rationals.
//!
//! A Gaussian rational is a complex number whose real and imaginary parts are
//! both rational. They form a field, and they are the entry type of every
//! matrix in this crate. `num_rational::BigRational` keeps numerator and
//! denominator in lowest terms with a positive denominator, so equality is
//! plain structural equality and serialized forms are canonical.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Build a rational from an integer numerator and denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Build a rational from an integer.
pub fn rat(num: i64) -> Rational {
    BigRational::from_integer(BigInt::from(num))
}

/// Render a rational as `p/q` with the denominator always present and positive.
pub fn rational_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse `p/q` or a bare integer `p`.
pub fn rational_from_str(s: &str) -> Result<Rational> {
    let parse_int = |t: &str| -> Result<BigInt> {
        BigInt::from_str(t.trim())
            .map_err(|_| Error::InvalidInput(format!("not an integer: `{t}`")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let num = parse_int(p)?;
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::InvalidInput(format!("zero denominator in `{s}`")));
            }
            Ok(BigRational::new(num, den))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

/// A complex number with rational real and imaginary parts.
///
/// The canonical form is inherited from `BigRational` (lowest terms, positive
/// denominator), so two equal Gaussian rationals are structurally equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        GaussianRational {
            re: Rational::zero(),
            im: Rational::zero(),
        }
    }

    pub fn one() -> Self {
        GaussianRational {
            re: Rational::one(),
            im: Rational::zero(),
        }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussianRational {
            re: Rational::zero(),
            im: Rational::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        GaussianRational {
            re: rat(n),
            im: Rational::zero(),
        }
    }

    pub fn from_rational(re: Rational) -> Self {
        GaussianRational {
            re,
            im: Rational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// Squared modulus `re^2 + im^2`, a nonnegative rational.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return Err(Error::InvalidInput("division by zero".into()));
        }
        Ok(GaussianRational {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    /// Render as a pair of `p/q` strings.
    pub fn to_parts(&self) -> (String, String) {
        (rational_to_string(&self.re), rational_to_string(&self.im))
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", rational_to_string(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}i", rational_to_string(&self.im))
        } else if self.im.is_negative() {
            write!(
                f,
                "{}{}i",
                rational_to_string(&self.re),
                rational_to_string(&self.im)
            )
        } else {
            write!(
                f,
                "{}+{}i",
                rational_to_string(&self.re),
                rational_to_string(&self.im)
            )
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> Self {
        GaussianRational {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl<'a> Add<&'a GaussianRational> for GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &'a Self) -> Self {
        GaussianRational {
            re: self.re + &rhs.re,
            im: self.im + &rhs.im,
        }
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &Self) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: Self) -> Self {
        GaussianRational {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &Self) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: Self) -> Self {
        (&self).mul(&rhs)
    }
}

impl<'b> Mul<&'b GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &'b GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &Self) {
        *self = (&*self).mul(rhs);
    }
}

impl Div for GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: Self) -> Self {
        let inv = rhs.inv().expect("division by zero");
        (&self).mul(&inv)
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> Self {
        GaussianRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        GaussianRational::from_int(n)
    }
}
