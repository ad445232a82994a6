//! Classes of surface / line-bundle pairs in the cobordism group `ω_{2,1}`.
//!
//! A pair `(S, L)` is determined up to cobordism by the integer vector
//! `(L², L·K, c₁(S)², c₂(S))`. The four classes
//! `[P², O]`, `[P², O(1)]`, `[P¹×P¹, O]`, `[P¹×P¹, O(1,0)]` form a basis.

use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::CobordismError;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairClass {
    #[serde(rename = "L2")]
    pub l2: i64,
    #[serde(rename = "LK")]
    pub lk: i64,
    pub c1sq: i64,
    pub c2: i64,
}

/// The alternative coordinates `(L·K, χ(L), χ(O_S), K²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AltPairClass {
    #[serde(rename = "LK")]
    pub lk: i64,
    #[serde(rename = "chiL")]
    pub chi_l: i64,
    #[serde(rename = "chiO")]
    pub chi_o: i64,
    #[serde(rename = "Ksq")]
    pub ksq: i64,
}

/// Coefficients of a class in the standard basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompCoefficients {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
}

/// Data of a degeneration `X₀ ⇝ X₁ ∪_D X₂`: the genus of the double curve
/// `D` and the degree of the line bundle restricted to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoublePointData {
    #[serde(rename = "gD")]
    pub g_d: u32,
    #[serde(rename = "degLD")]
    pub deg_ld: i64,
}

/// Surfaces with line bundles whose invariants are known in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Descriptor {
    /// `(P², O(d))`
    Plane { d: i64 },
    /// `(P¹×P¹, O(a,b))`
    Quadric { a: i64, b: i64 },
    /// A K3 surface with a primitive class of self-intersection `l2`.
    K3 { l2: i64 },
    /// Hirzebruch surface `F_k` with `L = c·h + e·f`, where `h² = k`,
    /// `h·f = 1`, `f² = 0` and `K = -2h + (k-2)f`.
    Hirzebruch { k: i64, c: i64, e: i64 },
    Raw(PairClass),
}

/// The standard basis, in the order of [`DecompCoefficients`].
pub const STANDARD_BASIS: [PairClass; 4] = [
    PairClass::new(0, 0, 9, 3),
    PairClass::new(1, -3, 9, 3),
    PairClass::new(0, 0, 8, 4),
    PairClass::new(0, -2, 8, 4),
];

impl PairClass {
    pub const fn new(l2: i64, lk: i64, c1sq: i64, c2: i64) -> Self {
        PairClass { l2, lk, c1sq, c2 }
    }

    pub fn as_array(&self) -> [i64; 4] {
        [self.l2, self.lk, self.c1sq, self.c2]
    }

    /// Noether integrality and Riemann–Roch parity.
    pub fn validate(&self) -> Result<(), CobordismError> {
        let noether = self.c1sq + self.c2;
        if noether.rem_euclid(12) != 0 {
            return Err(CobordismError::Noether(noether));
        }
        let parity = self.l2 + self.lk;
        if parity.rem_euclid(2) != 0 {
            return Err(CobordismError::Parity(parity));
        }
        Ok(())
    }

    pub fn to_alt(&self) -> Result<AltPairClass, CobordismError> {
        self.validate()?;
        let chi_o = (self.c1sq + self.c2) / 12;
        Ok(AltPairClass {
            lk: self.lk,
            chi_l: chi_o + (self.l2 - self.lk) / 2,
            chi_o,
            ksq: self.c1sq,
        })
    }

    pub fn from_alt(alt: &AltPairClass) -> Self {
        PairClass {
            l2: 2 * (alt.chi_l - alt.chi_o) + alt.lk,
            lk: alt.lk,
            c1sq: alt.ksq,
            c2: 12 * alt.chi_o - alt.ksq,
        }
    }

    /// Coordinates in [`STANDARD_BASIS`]. The reconstruction is checked.
    pub fn decompose(&self) -> Result<DecompCoefficients, CobordismError> {
        self.validate()?;
        let PairClass { l2, lk, c1sq, c2 } = *self;
        let div = |num: i64, den: i64, name| {
            if num % den == 0 {
                Ok(num / den)
            } else {
                Err(CobordismError::NonIntegral(name))
            }
        };
        let noether = c1sq + c2;
        let half = div(lk + l2, 2, "(LK+L^2)/2")?;
        let a1 = -l2 + div(noether, 3, "a1")? - c2;
        let a2 = l2;
        let a3 = l2 + half - div(noether, 4, "a3")? + c2;
        let a4 = -l2 - half;
        let coeffs = DecompCoefficients { a1, a2, a3, a4 };
        assert_eq!(coeffs.reconstruct(), *self, "decomposition must reproduce its input");
        Ok(coeffs)
    }
}

impl DecompCoefficients {
    pub fn reconstruct(&self) -> PairClass {
        let a = [self.a1, self.a2, self.a3, self.a4];
        let mut out = PairClass::default();
        for (ai, b) in a.iter().zip(STANDARD_BASIS) {
            out = out + b.scale(*ai);
        }
        out
    }
}

impl PairClass {
    pub fn scale(&self, k: i64) -> Self {
        PairClass::new(k * self.l2, k * self.lk, k * self.c1sq, k * self.c2)
    }
}

impl Add for PairClass {
    type Output = PairClass;
    fn add(self, o: PairClass) -> PairClass {
        PairClass::new(self.l2 + o.l2, self.lk + o.lk, self.c1sq + o.c1sq, self.c2 + o.c2)
    }
}

impl Sub for PairClass {
    type Output = PairClass;
    fn sub(self, o: PairClass) -> PairClass {
        self + (-o)
    }
}

impl Neg for PairClass {
    type Output = PairClass;
    fn neg(self) -> PairClass {
        self.scale(-1)
    }
}

impl Descriptor {
    pub fn class(&self) -> Result<PairClass, CobordismError> {
        let v = match *self {
            Descriptor::Plane { d } => PairClass::new(d * d, -3 * d, 9, 3),
            Descriptor::Quadric { a, b } => PairClass::new(2 * a * b, -2 * a - 2 * b, 8, 4),
            Descriptor::K3 { l2 } => {
                if l2 <= 0 || l2 % 2 != 0 {
                    return Err(CobordismError::Descriptor(format!(
                        "K3 primitive class needs even positive L^2, got {l2}"
                    )));
                }
                PairClass::new(l2, 0, 0, 24)
            }
            Descriptor::Hirzebruch { k, c, e } => {
                if k < 0 {
                    return Err(CobordismError::Descriptor(format!("Hirzebruch index {k} < 0")));
                }
                PairClass::new(c * c * k + 2 * c * e, -c * (k + 2) - 2 * e, 8, 4)
            }
            Descriptor::Raw(v) => v,
        };
        v.validate()?;
        Ok(v)
    }
}

/// Closes a double point relation `[X₀, L₀] = [X₁, L₁] + [X₂, L₂] - [X₃, L₃]`,
/// where `X₃ = P(O_D ⊕ N)` is the ruled surface over the double curve.
/// Returns `(v3, v0)`.
pub fn close_relation(v1: PairClass, v2: PairClass, dpd: DoublePointData) -> (PairClass, PairClass) {
    let g = dpd.g_d as i64;
    let v3 = PairClass::new(0, -2 * dpd.deg_ld, 8 - 8 * g, 4 - 4 * g);
    let v0 = v1 + v2 - v3;
    (v3, v0)
}

/// Exact determinant of a 4×4 integer matrix by fraction-free elimination.
pub fn determinant(rows: &[[i64; 4]; 4]) -> BigInt {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let n = 4;
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    &m[n - 1][n - 1] * sign
}

/// Whether the four classes are linearly independent over `Q`.
pub fn is_basis(vs: &[PairClass; 4]) -> bool {
    let rows = vs.map(|v| v.as_array());
    !determinant(&rows).is_zero()
}

/// Inverse of the matrix whose rows are `vs`, or `None` if it is singular.
pub fn inverse_matrix(vs: &[PairClass; 4]) -> Option<[[Rational; 4]; 4]> {
    let n = 4;
    let mut a: Vec<Vec<Rational>> = vs
        .iter()
        .map(|v| v.as_array().iter().map(|&x| Rational::from_integer(x.into())).collect())
        .collect();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| Rational::from_integer(BigInt::from((i == j) as i64))).collect())
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        inv.swap(col, p);
        let piv = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &piv;
            inv[col][j] = &inv[col][j] / &piv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let t = &f * &a[col][j];
                    a[r][j] -= t;
                    let t = &f * &inv[col][j];
                    inv[r][j] -= t;
                }
            }
        }
    }
    Some(std::array::from_fn(|i| std::array::from_fn(|j| inv[i][j].clone())))
}
