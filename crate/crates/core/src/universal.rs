//! Universal series and polynomials for nodal curve counts.
//!
//! For every pair `(S, L)` with class `v = (L², LK, c₁², c₂)` the generating
//! function `T(S,L)(x) = Σ_r T_r(v) x^r` factors as `A₁^{L²} A₂^{LK} A₃^{c₁²} A₄^{c₂}`.
//! Taking logarithms makes this linear in `v`, so four pairs with linearly
//! independent classes and known generating functions determine the `A_i`.
//! Here those are two plane degrees (Severi degrees) and two K3 classes
//! (closed form in quasimodular forms, pulled back to `x` through
//! `x = D G2(q)`).

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cobordism::{self, Descriptor, PairClass};
use crate::error::{Error, Result};
use crate::multipoly::{MultiPoly, Term};
use crate::quasimodular::{dg2_over_q, eisenstein_g2, k3_denominator, k3_generating};
use crate::rational::{self, Rational};
use crate::series::{PowerSeries, Variable};
use crate::severi::{self, SeveriTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitConfig {
    pub order: usize,
    pub degrees: (u32, u32),
    /// Self-intersections of the two primitive K3 classes.
    pub k3: (i64, i64),
    pub unsafe_thresholds: bool,
}

impl FitConfig {
    /// Smallest plane degrees meeting `d >= 5M - 1`, and K3 classes with
    /// `L² = 2, 4`.
    pub fn for_order(order: usize) -> Self {
        let d1 = (5 * order as u32).saturating_sub(1).max(1);
        FitConfig { order, degrees: (d1, d1 + 1), k3: (2, 4), unsafe_thresholds: false }
    }

    pub fn basis(&self) -> Result<[PairClass; 4]> {
        let (d1, d2) = self.degrees;
        let (s1, s2) = self.k3;
        Ok([
            Descriptor::Plane { d: d1 as i64 }.class()?,
            Descriptor::Plane { d: d2 as i64 }.class()?,
            Descriptor::K3 { l2: s1 }.class()?,
            Descriptor::K3 { l2: s2 }.class()?,
        ])
    }

    pub fn validate(&self) -> Result<()> {
        let (d1, d2) = self.degrees;
        if d1 == 0 || d2 == 0 {
            return Err(Error::Config("plane degrees must be positive".into()));
        }
        if d1 == d2 {
            return Err(Error::Config(format!("plane degrees must differ, got {d1} twice")));
        }
        if self.k3.0 == self.k3.1 {
            return Err(Error::Config(format!(
                "K3 self-intersections must differ, got {} twice",
                self.k3.0
            )));
        }
        if !cobordism::is_basis(&self.basis()?) {
            return Err(Error::Config("fitting classes are linearly dependent".into()));
        }
        if !self.unsafe_thresholds {
            severi::check_threshold(d1, self.order)?;
            severi::check_threshold(d2, self.order)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplicativeFit {
    pub config: FitConfig,
    /// `log A_1 .. log A_4`, series in `x` without constant term.
    pub log_a: [PowerSeries; 4],
    /// `A_1 .. A_4`, series in `x` with constant term 1.
    pub a: [PowerSeries; 4],
}

/// `T(S,L)(x)` for a primitive K3 class with `L² = l2`, from the closed form
/// in `q` composed with the inverse of `x = D G2(q)`.
pub fn k3_series_in_x(l2: i64, order: usize) -> PowerSeries {
    let gamma = k3_generating(2 + l2 / 2, order);
    if order == 0 {
        return gamma.with_var(Variable::X);
    }
    let to_q = eisenstein_g2(order)
        .diff_d()
        .revert()
        .expect("D G2 = q + O(q^2)")
        .with_var(Variable::X);
    gamma.compose(&to_q).expect("revert has no constant term")
}

/// Fits `log A_1..log A_4` from the four fitting pairs of `cfg`.
pub fn fit_a(cfg: &FitConfig, table: &SeveriTable) -> Result<MultiplicativeFit> {
    cfg.validate()?;
    let basis = cfg.basis()?;
    let inverse = cobordism::inverse_matrix(&basis)
        .ok_or_else(|| Error::Config("fitting classes are linearly dependent".into()))?;
    let m = cfg.order;

    let inputs = [
        severi::p2_series(table, cfg.degrees.0, m, cfg.unsafe_thresholds)?,
        severi::p2_series(table, cfg.degrees.1, m, cfg.unsafe_thresholds)?,
        k3_series_in_x(cfg.k3.0, m),
        k3_series_in_x(cfg.k3.1, m),
    ];
    let logs: Vec<PowerSeries> = inputs
        .iter()
        .map(|s| s.log())
        .collect::<std::result::Result<_, _>>()?;

    // log T_j = sum_i basis[j][i] log A_i, so log A = basis^{-1} log T
    let log_a: [PowerSeries; 4] = std::array::from_fn(|i| {
        let mut acc = PowerSeries::zero(Variable::X, m);
        for (j, lt) in logs.iter().enumerate() {
            acc = &acc + &lt.scale(&inverse[i][j]);
        }
        acc
    });
    let a = std::array::from_fn(|i| log_a[i].exp().expect("log A has no constant term"));
    Ok(MultiplicativeFit { config: *cfg, log_a, a })
}

/// `T_r` as a polynomial in `(L², LK, c₁², c₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniversalPolynomial {
    pub r: usize,
    pub poly: MultiPoly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniversalPolynomialRepr {
    pub r: usize,
    pub terms: Vec<Term>,
}

impl UniversalPolynomial {
    pub fn eval(&self, v: &PairClass) -> Rational {
        self.poly.eval(&v.as_array())
    }

    pub fn to_repr(&self) -> UniversalPolynomialRepr {
        UniversalPolynomialRepr { r: self.r, terms: self.poly.to_terms() }
    }
}

impl MultiplicativeFit {
    pub fn order(&self) -> usize {
        self.config.order
    }

    /// `exp(v · log A)` through `x^order`.
    pub fn evaluate(&self, v: &PairClass, order: usize) -> Result<PowerSeries> {
        if order > self.order() {
            return Err(Error::Order { requested: order, available: self.order() });
        }
        let mut acc = PowerSeries::zero(Variable::X, order);
        for (la, vi) in self.log_a.iter().zip(v.as_array()) {
            acc = &acc + &la.truncate(order).scale(&rational::int(vi));
        }
        Ok(acc.exp()?)
    }

    /// `T_0 .. T_max_r`, the coefficients of
    /// `exp(L² log A₁ + LK log A₂ + c₁² log A₃ + c₂ log A₄)` with the four
    /// invariants kept as formal variables.
    pub fn universal_polynomials(&self, max_r: usize) -> Result<Vec<UniversalPolynomial>> {
        if max_r > self.order() {
            return Err(Error::Order { requested: max_r, available: self.order() });
        }
        // P_k = sum_i X_i [x^k] log A_i ; n E_n = sum_{k=1}^n k P_k E_{n-k}
        let p: Vec<MultiPoly> = (0..=max_r)
            .map(|k| {
                let mut acc = MultiPoly::zero();
                for (i, la) in self.log_a.iter().enumerate() {
                    acc = &acc + &MultiPoly::linear(i, la.coeff(k).clone());
                }
                acc
            })
            .collect();
        let mut e: Vec<MultiPoly> = vec![MultiPoly::constant(rational::int(1))];
        for n in 1..=max_r {
            let mut acc = MultiPoly::zero();
            for k in 1..=n {
                if !p[k].is_zero() {
                    acc = &acc + &(&p[k] * &e[n - k]).scale(&rational::int(k as i64));
                }
            }
            e.push(acc.scale(&rational::frac(1, n as i64)));
        }
        Ok(e
            .into_iter()
            .enumerate()
            .map(|(r, poly)| {
                assert!(poly.total_degree().unwrap_or(0) as usize <= r, "T_r has degree <= r");
                UniversalPolynomial { r, poly }
            })
            .collect())
    }

    pub fn universal_t(&self, r: usize) -> Result<UniversalPolynomial> {
        Ok(self.universal_polynomials(r)?.pop().expect("r+1 polynomials"))
    }
}

/// Outcome of the two identities linking the fit to the closed forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GyzResiduals {
    pub order: usize,
    /// First `q`-power where `exp(2 â₁)` and `D G2 / q` differ.
    pub b3_mismatch: Option<usize>,
    /// First `q`-power where `exp(2 â₁ - 12 â₄)` and
    /// `(Δ D²G2 / q²)^{1/2}` differ.
    pub b4_mismatch: Option<usize>,
}

impl GyzResiduals {
    pub fn consistent(&self) -> bool {
        self.b3_mismatch.is_none() && self.b4_mismatch.is_none()
    }
}

/// The series of the formula
/// `Σ T_r(v) (D G2)^r = B₃^{χ(L)} B₁^{K²} B₂^{LK} / B₄^{χ(O)}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GyzFit {
    pub order: usize,
    pub b1: PowerSeries,
    pub b2: PowerSeries,
    /// Closed form `D G2 / q`.
    pub b3: PowerSeries,
    /// Closed form `(Δ D²G2 / q²)^{1/2}`.
    pub b4: PowerSeries,
    /// `log A_i (D G2(q))`.
    pub a_hat: [PowerSeries; 4],
    pub residuals: GyzResiduals,
}

/// Changes variables from `x` to `q` and regroups the exponents by
/// `(χ(L), LK, K², χ(O))` using `L² = 2χ(L) - 2χ(O) + LK`, `c₁² = K²` and
/// `c₂ = 12χ(O) - K²`:
///
/// `log γ = χ(L)·2â₁ + LK·(â₁+â₂) + K²·(â₃-â₄) + χ(O)·(12â₄-2â₁)`.
pub fn fit_b(fit: &MultiplicativeFit, order: usize) -> Result<GyzFit> {
    if order > fit.order() {
        return Err(Error::Order { requested: order, available: fit.order() });
    }
    let dg2 = eisenstein_g2(order).diff_d();
    let a_hat: [PowerSeries; 4] = std::array::from_fn(|i| {
        fit.log_a[i]
            .truncate(order)
            .compose(&dg2)
            .expect("D G2 has no constant term")
    });
    let [a1, a2, a3, a4] = &a_hat;
    let b1 = (a3 - a4).exp()?;
    let b2 = (a1 + a2).exp()?;
    let b3 = dg2_over_q(order);
    let b4 = k3_denominator(order).pow(&rational::frac(1, 2))?;

    let b3_fit = a1.scale(&rational::int(2)).exp()?;
    let b4_fit = (&a1.scale(&rational::int(2)) - &a4.scale(&rational::int(12))).exp()?;
    let residuals = GyzResiduals {
        order,
        b3_mismatch: b3_fit.first_difference(&b3),
        b4_mismatch: b4_fit.first_difference(&b4),
    };
    Ok(GyzFit { order, b1, b2, b3, b4, a_hat, residuals })
}

impl GyzFit {
    /// `B₃^{χ(L)} B₁^{K²} B₂^{LK} / B₄^{χ(O)}` for the class `v`.
    pub fn gamma(&self, v: &PairClass) -> Result<PowerSeries> {
        let alt = v.to_alt()?;
        let num = &(&self.b3.powi(alt.chi_l)? * &self.b1.powi(alt.ksq)?) * &self.b2.powi(alt.lk)?;
        Ok(num.checked_div(&self.b4.powi(alt.chi_o)?)?)
    }
}

/// A series `q^valuation · unit` with `unit` a power series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftedSeries {
    pub valuation: usize,
    pub unit: PowerSeries,
}

impl ShiftedSeries {
    /// Coefficients of `q^valuation ..= q^(valuation + order)`, materialized
    /// as an ordinary series through `q^(valuation + order)`.
    pub fn expand(&self) -> PowerSeries {
        let m = self.valuation + self.unit.order();
        let mut c = vec![Rational::zero(); self.valuation];
        c.extend(self.unit.coeffs().iter().cloned());
        PowerSeries::new(self.unit.var(), c).truncate(m)
    }
}

/// `Σ_l n_r(l, m) q^l = B₁^{K²} B₂^m (D G2)^r D²G2 / (Δ D²G2 / q²)^{χ(O)/2}`.
///
/// The right-hand side has valuation `r + 1`; the result stores that shift
/// and the unit part through `q^order`. `B₁`, `B₂` are only needed when
/// their exponents are nonzero.
pub fn genus_series(
    r: u32,
    ksq: i64,
    m: i64,
    chi_o: i64,
    order: usize,
    gyz: Option<&GyzFit>,
) -> Result<ShiftedSeries> {
    let mut unit = dg2_over_q(order).powi(r as i64)?;
    let d2g2_over_q = eisenstein_g2(order + 1)
        .diff_d()
        .diff_d()
        .shift_down(1)?;
    unit = &unit * &d2g2_over_q;
    unit = unit.checked_div(&k3_denominator(order).pow(&rational::frac(chi_o, 2))?)?;
    if ksq != 0 || m != 0 {
        let gyz = gyz.ok_or_else(|| Error::Config("B1/B2 needed but no fit given".into()))?;
        if gyz.order < order {
            return Err(Error::Order { requested: order, available: gyz.order });
        }
        unit = &(&unit * &gyz.b1.powi(ksq)?) * &gyz.b2.powi(m)?;
    }
    Ok(ShiftedSeries { valuation: r as usize + 1, unit })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub degree: u32,
    pub order: usize,
    pub held_out: bool,
    pub matches: bool,
    pub first_mismatch: Option<usize>,
    pub expected: PowerSeries,
    pub predicted: PowerSeries,
}

/// Compares the fitted prediction for `(P², O(d))` with the Severi degrees.
pub fn validate_p2(
    d: u32,
    fit: &MultiplicativeFit,
    order: usize,
    table: &SeveriTable,
) -> Result<ValidationReport> {
    let predicted = fit.evaluate(&Descriptor::Plane { d: d as i64 }.class()?, order)?;
    let expected = severi::p2_series(table, d, order, fit.config.unsafe_thresholds)?;
    let first_mismatch = predicted.first_difference(&expected);
    Ok(ValidationReport {
        degree: d,
        order,
        held_out: d != fit.config.degrees.0 && d != fit.config.degrees.1,
        matches: first_mismatch.is_none(),
        first_mismatch,
        expected,
        predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn order_zero_fit_is_trivial() {
        let t = SeveriTable::new();
        let fit = fit_a(&FitConfig::for_order(0), &t).unwrap();
        for a in &fit.a {
            assert_eq!(a, &PowerSeries::one(Variable::X, 0));
        }
        assert_eq!(fit.universal_t(0).unwrap().poly, MultiPoly::constant(int(1)));
    }

    #[test]
    fn first_order_fit() {
        let t = SeveriTable::new();
        let fit = fit_a(&FitConfig::for_order(1), &t).unwrap();
        let lin: Vec<_> = fit.log_a.iter().map(|s| s.coeff(1).clone()).collect();
        assert_eq!(lin, vec![int(3), int(2), int(0), int(1)]);
        let t1 = fit.universal_t(1).unwrap();
        assert_eq!(t1.poly.to_string(), "3*L2 + 2*LK + c2");
        assert!(fit.universal_t(2).is_err());
    }

    #[test]
    fn k3_series_matches_linear_term() {
        // T_1 on a K3 with L^2 = s is 3s + 24
        for s in [2, 4, 8] {
            assert_eq!(k3_series_in_x(s, 1).coeff(1), &int(3 * s + 24));
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = FitConfig::for_order(2);
        assert_eq!(cfg.degrees, (9, 10));
        assert_eq!(FitConfig::for_order(3).degrees, (14, 15));
        cfg.k3 = (4, 4);
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let mut cfg = FitConfig::for_order(2);
        cfg.degrees = (8, 10);
        assert!(cfg.validate().is_err());
        cfg.unsafe_thresholds = true;
        assert!(cfg.validate().is_ok());
        cfg.k3 = (2, 3);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn evaluate_zero_vector_and_order_guard() {
        let t = SeveriTable::new();
        let fit = fit_a(&FitConfig::for_order(1), &t).unwrap();
        assert_eq!(
            fit.evaluate(&PairClass::default(), 1).unwrap(),
            PowerSeries::one(Variable::X, 1)
        );
        assert!(matches!(fit.evaluate(&PairClass::default(), 2), Err(Error::Order { .. })));
    }

    #[test]
    fn genus_series_fixed_factor() {
        // all exponents zero: D^2 G2 itself, i.e. q * (1 + 12 q + 36 q^2 + 112 q^3)
        let s = genus_series(0, 0, 0, 0, 3, None).unwrap();
        assert_eq!(s.valuation, 1);
        assert_eq!(s.unit, PowerSeries::from_ints(Variable::Q, &[1, 12, 36, 112]));
        assert_eq!(s.expand(), eisenstein_g2(4).diff_d().diff_d());
        assert!(genus_series(0, 1, 0, 0, 3, None).is_err());
    }
}
