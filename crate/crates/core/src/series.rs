//! Truncated formal power series with exact rational coefficients.
//!
//! A [`PowerSeries`] of order `M` stores the coefficients of `1, t, ..., t^M`
//! and stands for the class of a series modulo `t^(M+1)`. Binary operations
//! on series of different orders silently truncate to the smaller order.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ParseError, SeriesError};
use crate::rational::{self, Rational};

/// Name of the formal variable. Only used for display and serialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    Q,
    X,
}

impl Variable {
    pub fn as_str(self) -> &'static str {
        match self {
            Variable::Q => "q",
            Variable::X => "x",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PowerSeries {
    coeffs: Vec<Rational>,
    var: Variable,
}

impl PowerSeries {
    /// Builds a series from its coefficients `c_0..=c_M`.
    ///
    /// Panics if `coeffs` is empty: a series always has order at least 0.
    pub fn new(var: Variable, coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a power series needs at least one coefficient");
        PowerSeries { coeffs, var }
    }

    pub fn from_ints(var: Variable, coeffs: &[i64]) -> Self {
        Self::new(var, coeffs.iter().map(|&c| rational::int(c)).collect())
    }

    pub fn zero(var: Variable, order: usize) -> Self {
        Self::new(var, vec![Rational::zero(); order + 1])
    }

    pub fn one(var: Variable, order: usize) -> Self {
        Self::constant(var, order, Rational::one())
    }

    pub fn constant(var: Variable, order: usize, c: Rational) -> Self {
        let mut s = Self::zero(var, order);
        s.coeffs[0] = c;
        s
    }

    /// `c * t^k` truncated at `order`.
    pub fn monomial(var: Variable, order: usize, k: usize, c: Rational) -> Self {
        let mut s = Self::zero(var, order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// The series `t` itself.
    pub fn identity(var: Variable, order: usize) -> Self {
        Self::monomial(var, order, 1, Rational::one())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn var(&self) -> Variable {
        self.var
    }

    /// Same coefficients, relabelled variable.
    pub fn with_var(mut self, var: Variable) -> Self {
        self.var = var;
        self
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// Coefficient of `t^n`. Panics if `n` exceeds the order.
    pub fn coeff(&self, n: usize) -> &Rational {
        &self.coeffs[n]
    }

    pub fn constant_term(&self) -> &Rational {
        &self.coeffs[0]
    }

    /// Index of the first nonzero coefficient, `None` for the zero series.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        Self::new(self.var, self.coeffs[..=order].to_vec())
    }

    /// Exact multiplication by a scalar.
    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.var, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Index of the first coefficient where the two series differ, compared
    /// through their common order.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .position(|(a, b)| a != b)
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(SeriesError::NonUnitDivisor);
        }
        let inv0 = c0.recip();
        let m = self.order();
        let mut out: Vec<Rational> = Vec::with_capacity(m + 1);
        out.push(inv0.clone());
        for n in 1..=m {
            let mut acc = Rational::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * &out[n - k];
                }
            }
            out.push(-(acc * &inv0));
        }
        Ok(Self::new(self.var, out))
    }

    /// `self / divisor`, truncated at the smaller order.
    pub fn checked_div(&self, divisor: &Self) -> Result<Self, SeriesError> {
        let m = self.order().min(divisor.order());
        Ok(&self.truncate(m) * &divisor.truncate(m).inverse()?)
    }

    /// Formal exponential; requires a zero constant term.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.constant_term().is_zero() {
            return Err(SeriesError::Normalization {
                op: "exp",
                required: "0",
                found: rational::to_text(self.constant_term()),
            });
        }
        // n e_n = sum_{k=1}^{n} k f_k e_{n-k}
        let m = self.order();
        let mut out: Vec<Rational> = Vec::with_capacity(m + 1);
        out.push(Rational::one());
        for n in 1..=m {
            let mut acc = Rational::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * &out[n - k] * rational::int(k as i64);
                }
            }
            out.push(acc / rational::int(n as i64));
        }
        Ok(Self::new(self.var, out))
    }

    /// Formal logarithm; requires constant term one.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if !self.constant_term().is_one() {
            return Err(SeriesError::Normalization {
                op: "log",
                required: "1",
                found: rational::to_text(self.constant_term()),
            });
        }
        // n l_n = n f_n - sum_{k=1}^{n-1} k l_k f_{n-k}
        let m = self.order();
        let mut out: Vec<Rational> = Vec::with_capacity(m + 1);
        out.push(Rational::zero());
        for n in 1..=m {
            let mut acc = &self.coeffs[n] * rational::int(n as i64);
            for (k, lk) in out.iter().enumerate().skip(1) {
                if !lk.is_zero() && !self.coeffs[n - k].is_zero() {
                    acc -= lk * &self.coeffs[n - k] * rational::int(k as i64);
                }
            }
            out.push(acc / rational::int(n as i64));
        }
        Ok(Self::new(self.var, out))
    }

    /// `self^e = exp(e log self)` for a rational exponent; requires constant
    /// term one.
    pub fn pow(&self, e: &Rational) -> Result<Self, SeriesError> {
        if !self.constant_term().is_one() {
            return Err(SeriesError::Normalization {
                op: "pow",
                required: "1",
                found: rational::to_text(self.constant_term()),
            });
        }
        self.log()?.scale(e).exp()
    }

    pub fn powi(&self, e: i64) -> Result<Self, SeriesError> {
        self.pow(&rational::int(e))
    }

    /// Substitutes `inner` for the variable of `self`. The result carries
    /// the variable of `inner` and the smaller of the two orders.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        if !inner.constant_term().is_zero() {
            return Err(SeriesError::NonzeroConstant {
                op: "compose",
                found: rational::to_text(inner.constant_term()),
            });
        }
        let m = self.order().min(inner.order());
        let inner = inner.truncate(m);
        // Horner, top coefficient first
        let mut acc = Self::constant(inner.var, m, self.coeffs[m].clone());
        for k in (0..m).rev() {
            acc = &acc * &inner;
            acc.coeffs[0] += &self.coeffs[k];
        }
        Ok(acc)
    }

    /// Compositional inverse: the series `h` with `self(h(t)) = t`.
    ///
    /// Uses the fixed point `h <- (t - sum_{k>=2} g_k h^k) / g_1`, which gains
    /// one correct coefficient per pass.
    pub fn revert(&self) -> Result<Self, SeriesError> {
        if !self.constant_term().is_zero() {
            return Err(SeriesError::NonzeroConstant {
                op: "revert",
                found: rational::to_text(self.constant_term()),
            });
        }
        let m = self.order();
        if m == 0 {
            return Err(SeriesError::InsufficientOrder { op: "revert", order: m });
        }
        let g1 = self.coeffs[1].clone();
        if g1.is_zero() {
            return Err(SeriesError::NotReversible);
        }
        let inv_g1 = g1.recip();
        let mut tail = self.clone();
        tail.coeffs[1] = Rational::zero();
        let t = Self::identity(self.var, m);

        let mut h = t.scale(&inv_g1);
        for _ in 1..m {
            let next = (&t - &tail.compose(&h)?).scale(&inv_g1);
            if next == h {
                break;
            }
            h = next;
        }
        Ok(h)
    }

    /// The operator `t d/dt`: coefficient `n` is multiplied by `n`.
    pub fn diff_d(&self) -> Self {
        Self::new(
            self.var,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c * rational::int(n as i64))
                .collect(),
        )
    }

    /// Exact division by `t^k`. The first `k` coefficients must vanish; the
    /// order drops by `k`.
    pub fn shift_down(&self, k: usize) -> Result<Self, SeriesError> {
        if k > self.order() {
            return Err(SeriesError::InsufficientOrder { op: "shift", order: self.order() });
        }
        if let Some(index) = self.coeffs[..k].iter().position(|c| !c.is_zero()) {
            return Err(SeriesError::Valuation { shift: k, index });
        }
        Ok(Self::new(self.var, self.coeffs[k..].to_vec()))
    }

    /// Multiplication by `t^k`, keeping the order.
    pub fn shift_up(&self, k: usize) -> Self {
        let m = self.order();
        let mut out = vec![Rational::zero(); m + 1];
        if k <= m {
            out[k..].clone_from_slice(&self.coeffs[..=m - k]);
        }
        Self::new(self.var, out)
    }

    /// Text form: `{"var":"q","order":M,"coeffs":["p/q",...]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("series serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self, ParseError> {
        serde_json::from_str(s).map_err(|e| ParseError::Document(e.to_string()))
    }
}

/// Coefficientwise comparison through the common order. The variable tag is
/// not compared.
impl PartialEq for PowerSeries {
    fn eq(&self, other: &Self) -> bool {
        self.first_difference(other).is_none()
    }
}

impl<'a> Add<&'a PowerSeries> for &'a PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: &PowerSeries) -> PowerSeries {
        let m = self.order().min(rhs.order());
        PowerSeries::new(
            self.var,
            (0..=m).map(|n| &self.coeffs[n] + &rhs.coeffs[n]).collect(),
        )
    }
}

impl<'a> Sub<&'a PowerSeries> for &'a PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: &PowerSeries) -> PowerSeries {
        let m = self.order().min(rhs.order());
        PowerSeries::new(
            self.var,
            (0..=m).map(|n| &self.coeffs[n] - &rhs.coeffs[n]).collect(),
        )
    }
}

impl<'a> Mul<&'a PowerSeries> for &'a PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: &PowerSeries) -> PowerSeries {
        let m = self.order().min(rhs.order());
        let mut out = vec![Rational::zero(); m + 1];
        for (i, a) in self.coeffs[..=m].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs[..=m - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        PowerSeries::new(self.var, out)
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        PowerSeries::new(self.var, self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $f:ident),*) => {$(
        impl $tr<PowerSeries> for PowerSeries {
            type Output = PowerSeries;
            fn $f(self, rhs: PowerSeries) -> PowerSeries {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a PowerSeries> for PowerSeries {
            type Output = PowerSeries;
            fn $f(self, rhs: &PowerSeries) -> PowerSeries {
                (&self).$f(rhs)
            }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul);

impl Neg for PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        -&self
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.var.as_str();
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            let body = match n {
                0 => rational::to_text(&a),
                _ => {
                    let mono = if n == 1 { v.to_string() } else { format!("{v}^{n}") };
                    if a.is_one() {
                        mono
                    } else {
                        format!("{}*{mono}", rational::to_text(&a))
                    }
                }
            };
            write!(f, "{body}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O({v}^{})", self.order() + 1)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    var: Variable,
    order: usize,
    coeffs: Vec<String>,
}

impl Serialize for PowerSeries {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SeriesRepr {
            var: self.var,
            order: self.order(),
            coeffs: self.coeffs.iter().map(rational::to_text).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PowerSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = SeriesRepr::deserialize(d)?;
        if repr.coeffs.len() != repr.order + 1 {
            return Err(D::Error::custom(format!(
                "order {} needs {} coefficients, found {}",
                repr.order,
                repr.order + 1,
                repr.coeffs.len()
            )));
        }
        let coeffs = repr
            .coeffs
            .iter()
            .map(|c| rational::parse(c))
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        Ok(PowerSeries::new(repr.var, coeffs))
    }
}
