//! Exponents of power factors.
//!
//! Exponents are affine in the named parameters, `c0 + c1*p1 + ... + cn*pn`,
//! with exact rational coefficients. This covers every power that appears in
//! the classified families (e.g. `(u + f2)^f3`, `(alpha*t + beta)^(delta - 4/5)`).

use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{Rational, Symbol};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent {
    constant: Rational,
    /// Sorted by symbol, no zero coefficients.
    params: Vec<(Symbol, Rational)>,
}

impl Exponent {
    pub fn constant(value: Rational) -> Self {
        Exponent {
            constant: value,
            params: Vec::new(),
        }
    }

    pub fn int(value: i64) -> Self {
        Self::constant(Rational::from_integer(value.into()))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn param(name: Symbol) -> Self {
        Exponent {
            constant: Rational::zero(),
            params: vec![(name, Rational::one())],
        }
    }

    pub fn from_parts(constant: Rational, params: impl IntoIterator<Item = (Symbol, Rational)>) -> Self {
        let mut e = Exponent::constant(constant);
        for (p, c) in params {
            e = e.add(&Exponent {
                constant: Rational::zero(),
                params: vec![(p, c)],
            });
        }
        e
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn param_part(&self) -> &[(Symbol, Rational)] {
        &self.params
    }

    pub fn is_zero(&self) -> bool {
        self.params.is_empty() && self.constant.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.params.is_empty() && self.constant.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.params.is_empty()
    }

    pub fn as_constant(&self) -> Option<&Rational> {
        self.is_constant().then_some(&self.constant)
    }

    pub fn as_integer(&self) -> Option<i64> {
        let c = self.as_constant()?;
        if c.is_integer() {
            i64::try_from(c.to_integer()).ok()
        } else {
            None
        }
    }

    pub fn is_nonneg_integer(&self) -> bool {
        matches!(self.as_integer(), Some(n) if n >= 0)
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        let mut params = Vec::with_capacity(self.params.len() + other.params.len());
        let (mut i, mut j) = (0, 0);
        while i < self.params.len() || j < other.params.len() {
            let take = match (self.params.get(i), other.params.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, _) => std::cmp::Ordering::Greater,
            };
            match take {
                std::cmp::Ordering::Less => {
                    params.push(self.params[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    params.push(other.params[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = &self.params[i].1 + &other.params[j].1;
                    if !c.is_zero() {
                        params.push((self.params[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Exponent {
            constant: &self.constant + &other.constant,
            params,
        }
    }

    pub fn neg(&self) -> Exponent {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &Exponent) -> Exponent {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rational) -> Exponent {
        if k.is_zero() {
            return Exponent::zero();
        }
        Exponent {
            constant: &self.constant * k,
            params: self.params.iter().map(|(p, c)| (p.clone(), c * k)).collect(),
        }
    }

    /// Product of two exponents; `None` when the result would not be affine.
    pub fn mul(&self, other: &Exponent) -> Option<Exponent> {
        match (self.as_constant(), other.as_constant()) {
            (Some(a), _) => Some(other.scale(a)),
            (_, Some(b)) => Some(self.scale(b)),
            _ => None,
        }
    }

    /// Coefficient of a parameter.
    pub fn coefficient(&self, name: &str) -> Option<&Rational> {
        self.params
            .iter()
            .find(|(p, _)| p.as_ref() == name)
            .map(|(_, c)| c)
    }

    /// Key identifying the class of this exponent modulo the integers.
    pub fn class_key(&self) -> (Vec<(Symbol, Rational)>, Rational) {
        let floor = self.constant.floor();
        (self.params.clone(), &self.constant - floor)
    }

    /// Split `self = k + rest` with integer `k` and the constant part of `rest` in `[0, 1)`.
    pub fn split_integer(&self) -> (i64, Exponent) {
        let floor = self.constant.floor();
        let k = i64::try_from(floor.to_integer()).unwrap_or(0);
        (
            k,
            Exponent {
                constant: &self.constant - floor,
                params: self.params.clone(),
            },
        )
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut write_term = |f: &mut fmt::Formatter<'_>, c: &Rational, name: Option<&str>| -> fmt::Result {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match name {
                Some(n) if abs.is_one() => write!(f, "{n}"),
                Some(n) => write!(f, "{}*{n}", fmt_rational(&abs)),
                None => write!(f, "{}", fmt_rational(&abs)),
            }
        };
        for (p, c) in &self.params {
            write_term(f, c, Some(p))?;
        }
        if !self.constant.is_zero() || self.params.is_empty() {
            write_term(f, &self.constant, None)?;
        }
        Ok(())
    }
}

pub(crate) fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
