//! Exact rationals extended with a symbolic infinitesimal, used to model
//! strict bounds inside the simplex ("delta rationals").

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    BigRational::from(BigInt::from(n))
}

/// Value of the form `real + inf * eps` where `eps` is a positive infinitesimal.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Delta {
    pub real: Rat,
    pub inf: Rat,
}

impl Delta {
    pub fn new(real: Rat, inf: Rat) -> Self {
        Delta { real, inf }
    }

    pub fn from_rat(real: Rat) -> Self {
        Delta {
            real,
            inf: Rat::zero(),
        }
    }

    pub fn zero() -> Self {
        Delta::default()
    }

    pub fn is_rational(&self) -> bool {
        self.inf.is_zero()
    }

    /// Concretize with a specific positive value for eps.
    pub fn evaluate(&self, eps: &Rat) -> Rat {
        &self.real + &self.inf * eps
    }

    pub fn scale(&self, k: &Rat) -> Delta {
        Delta {
            real: &self.real * k,
            inf: &self.inf * k,
        }
    }
}

impl PartialOrd for Delta {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Delta {
    fn cmp(&self, other: &Self) -> Ordering {
        self.real
            .cmp(&other.real)
            .then_with(|| self.inf.cmp(&other.inf))
    }
}

impl fmt::Debug for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inf.is_zero() {
            write!(f, "{}", self.real)
        } else {
            write!(f, "{}{:+}e", self.real, self.inf)
        }
    }
}

impl Add for Delta {
    type Output = Delta;
    fn add(self, rhs: Delta) -> Delta {
        Delta {
            real: self.real + rhs.real,
            inf: self.inf + rhs.inf,
        }
    }
}

impl<'a> Add<&'a Delta> for Delta {
    type Output = Delta;
    fn add(self, rhs: &'a Delta) -> Delta {
        Delta {
            real: self.real + &rhs.real,
            inf: self.inf + &rhs.inf,
        }
    }
}

impl AddAssign<&Delta> for Delta {
    fn add_assign(&mut self, rhs: &Delta) {
        self.real += &rhs.real;
        self.inf += &rhs.inf;
    }
}

impl Sub for Delta {
    type Output = Delta;
    fn sub(self, rhs: Delta) -> Delta {
        Delta {
            real: self.real - rhs.real,
            inf: self.inf - rhs.inf,
        }
    }
}

impl<'a> Sub<&'a Delta> for Delta {
    type Output = Delta;
    fn sub(self, rhs: &'a Delta) -> Delta {
        Delta {
            real: self.real - &rhs.real,
            inf: self.inf - &rhs.inf,
        }
    }
}

impl SubAssign<&Delta> for Delta {
    fn sub_assign(&mut self, rhs: &Delta) {
        self.real -= &rhs.real;
        self.inf -= &rhs.inf;
    }
}

impl Neg for Delta {
    type Output = Delta;
    fn neg(self) -> Delta {
        Delta {
            real: -self.real,
            inf: -self.inf,
        }
    }
}

impl Mul<&Rat> for &Delta {
    type Output = Delta;
    fn mul(self, k: &Rat) -> Delta {
        self.scale(k)
    }
}

/// Parse an SMT-LIB numeral/decimal such as `3`, `4.25`.
pub fn parse_decimal(s: &str) -> Option<Rat> {
    if let Some(dot) = s.find('.') {
        let int_part = &s[..dot];
        let frac_part = &s[dot + 1..];
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let num: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        Some(BigRational::new(num, den))
    } else {
        let num: BigInt = s.parse().ok()?;
        Some(BigRational::from(num))
    }
}

/// Render a rational the way SMT solvers commonly print Real values.
pub fn format_smt_rat(r: &Rat) -> String {
    fn pos(r: &Rat) -> String {
        if r.is_integer() {
            format!("{}.0", r.numer())
        } else {
            format!("(/ {} {})", r.numer(), r.denom())
        }
    }
    if r.is_negative() {
        format!("(- {})", pos(&-r))
    } else {
        pos(r)
    }
}
