//! Polynomials in the four formal variables `(L², LK, c₁², c₂)` with
//! rational coefficients, stored as an exponent map.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

pub type Exponents = [u32; 4];

pub const VARIABLE_NAMES: [&str; 4] = ["L2", "LK", "c1sq", "c2"];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MultiPoly {
    terms: BTreeMap<Exponents, Rational>,
}

/// One serialized monomial: `{"exponents":[e1,e2,e3,e4],"coeff":"p/q"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub exponents: Exponents,
    pub coeff: String,
}

impl MultiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial([0; 4], c)
    }

    pub fn monomial(exponents: Exponents, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(exponents, c);
        p
    }

    /// `c` times the `i`-th variable.
    pub fn linear(i: usize, c: Rational) -> Self {
        let mut e = [0; 4];
        e[i] = 1;
        Self::monomial(e, c)
    }

    pub fn add_term(&mut self, exponents: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exponents).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&exponents);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exponents: &Exponents) -> Rational {
        self.terms.get(exponents).cloned().unwrap_or_else(Rational::zero)
    }

    /// Monomials in ascending exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for (e, a) in &self.terms {
            out.add_term(*e, a * c);
        }
        out
    }

    pub fn eval(&self, point: &[i64; 4]) -> Rational {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (x, k) in point.iter().zip(e) {
                m *= Rational::from_integer((*x).into()).pow(*k as i32);
            }
            acc += m;
        }
        acc
    }

    pub fn to_terms(&self) -> Vec<Term> {
        self.terms
            .iter()
            .map(|(e, c)| Term { exponents: *e, coeff: rational::to_text(c) })
            .collect()
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ea, a) in &self.terms {
            for (eb, b) in &rhs.terms {
                let e = std::array::from_fn(|i| ea[i] + eb[i]);
                out.add_term(e, a * b);
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest total degree first
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then(b.0.cmp(a.0))
        });
        for (i, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            let vars: Vec<String> = e
                .iter()
                .zip(VARIABLE_NAMES)
                .filter(|(k, _)| **k > 0)
                .map(|(k, v)| if *k == 1 { v.to_string() } else { format!("{v}^{k}") })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", rational::to_text(&a))?;
            } else if a.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", rational::to_text(&a), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn arithmetic_and_eval() {
        let x = MultiPoly::linear(0, int(1));
        let y = MultiPoly::linear(1, int(2));
        let p = &(&x + &y) * &(&x + &y);
        assert_eq!(p.coeff(&[2, 0, 0, 0]), int(1));
        assert_eq!(p.coeff(&[1, 1, 0, 0]), int(4));
        assert_eq!(p.coeff(&[0, 2, 0, 0]), int(4));
        assert_eq!(p.total_degree(), Some(2));
        assert_eq!(p.eval(&[3, -1, 7, 7]), int(1));
        let cancel = &x + &x.scale(&int(-1));
        assert!(cancel.is_zero());
        assert_eq!(cancel.total_degree(), None);
    }

    #[test]
    fn display_and_terms() {
        let mut p = MultiPoly::constant(frac(-1, 2));
        p.add_term([1, 0, 0, 0], int(3));
        p.add_term([0, 0, 0, 1], int(1));
        assert_eq!(p.to_string(), "3*L2 + c2 - 1/2");
        let t = p.to_terms();
        assert_eq!(t[0], Term { exponents: [0, 0, 0, 0], coeff: "-1/2".into() });
    }
}
