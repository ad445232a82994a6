//! Exact q-expansions of `G2`, `D G2`, `D^2 G2`, the discriminant `Delta`
//! and the closed-form K3 generating function built from them.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{ParseError, SeriesError};
use crate::rational::{self, Rational};
use crate::series::{PowerSeries, Variable};

pub const CATALOG_FORMAT_VERSION: u32 = 1;

/// Sum of the divisors of `n`.
pub fn sigma1(n: u64) -> u64 {
    let mut s = 0;
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            s += d;
            if d * d != n {
                s += n / d;
            }
        }
        d += 1;
    }
    s
}

/// `G2 = -1/24 + sum_{n>0} sigma_1(n) q^n` through `q^order`.
pub fn eisenstein_g2(order: usize) -> PowerSeries {
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(rational::frac(-1, 24));
    coeffs.extend((1..=order as u64).map(|n| Rational::from_integer(BigInt::from(sigma1(n)))));
    PowerSeries::new(Variable::Q, coeffs)
}

/// `Delta = q prod_{k>0} (1 - q^k)^24` through `q^order`. Factors with
/// `k >= order` cannot reach `q^order` and are skipped.
pub fn discriminant_delta(order: usize) -> Result<PowerSeries, SeriesError> {
    if order == 0 {
        return Err(SeriesError::InsufficientOrder { op: "discriminant_delta", order });
    }
    let m = order - 1;
    let mut prod = vec![BigInt::zero(); m + 1];
    prod[0] = BigInt::from(1);
    for k in 1..=m {
        for _ in 0..24 {
            for n in (k..=m).rev() {
                let (lo, hi) = prod.split_at_mut(n);
                hi[0] -= &lo[n - k];
            }
        }
    }
    let mut coeffs = vec![Rational::zero()];
    coeffs.extend(prod.into_iter().map(Rational::from_integer));
    Ok(PowerSeries::new(Variable::Q, coeffs))
}

/// `D G2 / q` through `q^order`.
pub fn dg2_over_q(order: usize) -> PowerSeries {
    eisenstein_g2(order + 1)
        .diff_d()
        .shift_down(1)
        .expect("D G2 has no constant term")
}

/// `Delta * D^2 G2 / q^2` through `q^order`: the K3 denominator, with
/// constant term 1.
pub fn k3_denominator(order: usize) -> PowerSeries {
    let m = order + 2;
    let d2g2 = eisenstein_g2(m).diff_d().diff_d();
    let delta = discriminant_delta(m).expect("order >= 2");
    (&delta * &d2g2)
        .shift_down(2)
        .expect("Delta and D^2 G2 both have valuation 1")
}

/// Closed-form K3 generating function
/// `(D G2 / q)^chi / (Delta D^2 G2 / q^2)` in `q`, for a primitive class with
/// `chi(L) = chi`. The formula is formal, so any integer `chi` is accepted.
pub fn k3_generating(chi: i64, order: usize) -> PowerSeries {
    let numer = dg2_over_q(order).powi(chi).expect("D G2 / q has constant term 1");
    numer
        .checked_div(&k3_denominator(order))
        .expect("K3 denominator has constant term 1")
}

/// The quasimodular ingredients at a common truncation order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormCatalog {
    pub format_version: u32,
    pub order: usize,
    pub g2: PowerSeries,
    pub dg2: PowerSeries,
    pub d2g2: PowerSeries,
    pub delta: PowerSeries,
}

impl FormCatalog {
    pub fn new(order: usize) -> Result<Self, SeriesError> {
        let g2 = eisenstein_g2(order);
        let dg2 = g2.diff_d();
        let d2g2 = dg2.diff_d();
        let delta = discriminant_delta(order)?;
        Ok(FormCatalog { format_version: CATALOG_FORMAT_VERSION, order, g2, dg2, d2g2, delta })
    }

    /// Re-derives `dg2` and `d2g2` and checks the normalization of `delta`.
    pub fn is_consistent(&self) -> bool {
        let orders_ok = [&self.g2, &self.dg2, &self.d2g2, &self.delta]
            .iter()
            .all(|s| s.order() == self.order);
        orders_ok
            && self.dg2 == self.g2.diff_d()
            && self.d2g2 == self.dg2.diff_d()
            && self.delta.valuation() == Some(1)
            && self.delta.coeff(1) == &rational::int(1)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("catalog serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self, ParseError> {
        let cat: FormCatalog =
            serde_json::from_str(s).map_err(|e| ParseError::Document(e.to_string()))?;
        if cat.format_version != CATALOG_FORMAT_VERSION {
            return Err(ParseError::Version {
                found: cat.format_version,
                expected: CATALOG_FORMAT_VERSION,
            });
        }
        if !cat.is_consistent() {
            return Err(ParseError::Document("inconsistent form catalog".into()));
        }
        Ok(cat)
    }
}
