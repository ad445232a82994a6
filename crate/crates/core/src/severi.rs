//! Generalized Severi degrees of the plane via the Caporaso–Harris recursion.
//!
//! `N^{d,delta}(alpha, beta)` counts reduced (possibly reducible) degree-`d`
//! curves of cogenus `delta`, not containing a fixed line `E`, through the
//! appropriate number of general points, with tangency profile `alpha` to
//! `E` at assigned points of `E` and `beta` at unassigned points. The
//! recursion (cogenus form) is
//!
//! ```text
//! N^{d,δ}(α,β) = Σ_{k: β_k>0} k N^{d,δ}(α+e_k, β-e_k)
//!              + Σ_{α'≤α, β'≥β, I(α')+I(β')=d-1} k^{β'-β} C(α,α') C(β',β) N^{d-1,δ'}(α',β')
//! ```
//!
//! with `δ' = δ + |β'-β| - (d-1)`, and base case `N^{1,0} = 1`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::ops::RangeInclusive;
use std::path::Path;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Mutex, RwLock};

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::SeveriError;
use crate::rational::{self, Rational};
use crate::series::{PowerSeries, Variable};

pub const CACHE_HEADER: &str = "# nodal severi cache v1";

/// Tangency multiplicities as counts per multiplicity. Stored densely by
/// multiplicity with trailing zeros trimmed, so equal profiles compare and
/// hash equal.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TangencyProfile(Vec<u32>);

impl TangencyProfile {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `count` points of multiplicity `m`.
    pub fn single(m: u32, count: u32) -> Self {
        let mut p = Self::empty();
        p.set(m, count);
        p
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut p = Self::empty();
        for (m, c) in pairs {
            p.set(m, p.count(m) + c);
        }
        p
    }

    pub fn count(&self, m: u32) -> u32 {
        assert!(m >= 1, "multiplicities start at 1");
        self.0.get(m as usize - 1).copied().unwrap_or(0)
    }

    fn set(&mut self, m: u32, count: u32) {
        assert!(m >= 1, "multiplicities start at 1");
        let i = m as usize - 1;
        if i >= self.0.len() {
            self.0.resize(i + 1, 0);
        }
        self.0[i] = count;
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
    }

    /// Nonzero `(multiplicity, count)` pairs, multiplicities ascending.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i as u32 + 1, c))
    }

    /// `I(alpha) = sum m * alpha_m`.
    pub fn weight(&self) -> u64 {
        self.iter().map(|(m, c)| m as u64 * c as u64).sum()
    }

    /// `|alpha| = sum alpha_m`.
    pub fn size(&self) -> u64 {
        self.iter().map(|(_, c)| c as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn plus_unit(&self, m: u32) -> Self {
        let mut p = self.clone();
        p.set(m, p.count(m) + 1);
        p
    }

    fn minus_unit(&self, m: u32) -> Self {
        let mut p = self.clone();
        p.set(m, p.count(m) - 1);
        p
    }

    fn plus(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (m, c) in other.iter() {
            p.set(m, p.count(m) + c);
        }
        p
    }

    /// All profiles `sub <= self`, in lexicographic order of the counts.
    fn sub_profiles(&self) -> Vec<TangencyProfile> {
        let mut out = vec![TangencyProfile::empty()];
        for (m, c) in self.iter() {
            let mut next = Vec::with_capacity(out.len() * (c as usize + 1));
            for p in &out {
                for j in 0..=c {
                    let mut q = p.clone();
                    q.set(m, j);
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }
}

/// `m^count` entries joined by commas, multiplicities ascending; the empty
/// profile is the empty string.
impl fmt::Display for TangencyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in self.iter() {
            if !first {
                write!(f, ",")?;
            }
            first = false;
            write!(f, "{m}^{c}")?;
        }
        Ok(())
    }
}

impl FromStr for TangencyProfile {
    type Err = SeveriError;

    /// Accepts the canonical form and also plain `m` entries (count 1), in
    /// any order.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SeveriError::Profile(s.to_string());
        let mut p = TangencyProfile::empty();
        if s.trim().is_empty() {
            return Ok(p);
        }
        for part in s.split(',') {
            let part = part.trim();
            let (m, c) = match part.split_once('^') {
                Some((m, c)) => (m, c),
                None => (part, "1"),
            };
            let m: u32 = m.parse().map_err(|_| bad())?;
            let c: u32 = c.parse().map_err(|_| bad())?;
            if m == 0 {
                return Err(bad());
            }
            p.set(m, p.count(m) + c);
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeveriKey {
    pub d: u32,
    pub delta: i64,
    pub alpha: TangencyProfile,
    pub beta: TangencyProfile,
}

impl SeveriKey {
    pub fn new(d: u32, delta: i64, alpha: TangencyProfile, beta: TangencyProfile) -> Result<Self, SeveriError> {
        let key = SeveriKey { d, delta, alpha, beta };
        key.check()?;
        Ok(key)
    }

    /// The plain Severi degree: no tangency conditions beyond transversality.
    pub fn plain(d: u32, delta: i64) -> Self {
        SeveriKey { d, delta, alpha: TangencyProfile::empty(), beta: TangencyProfile::single(1, d) }
    }

    pub fn check(&self) -> Result<(), SeveriError> {
        if self.d == 0 {
            return Err(SeveriError::ZeroDegree);
        }
        let weight = self.alpha.weight() + self.beta.weight();
        if weight != self.d as u64 {
            return Err(SeveriError::ProfileWeightMismatch { d: self.d, weight });
        }
        Ok(())
    }
}

/// Canonical memo / cache key `d:delta:alpha|beta`.
impl fmt::Display for SeveriKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}|{}", self.d, self.delta, self.alpha, self.beta)
    }
}

impl FromStr for SeveriKey {
    type Err = SeveriError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SeveriError::Profile(s.to_string());
        let mut it = s.splitn(3, ':');
        let d = it.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
        let delta = it.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
        let (a, b) = it.next().and_then(|x| x.split_once('|')).ok_or_else(bad)?;
        SeveriKey::new(d, delta, a.parse()?, b.parse()?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TableStats {
    pub entries: usize,
    pub hits: u64,
    pub misses: u64,
}

/// Memo table for the recursion. Safe to share between threads: reads take
/// a shared lock, and an entry is inserted once and never changed.
#[derive(Debug, Default)]
pub struct SeveriTable {
    entries: RwLock<HashMap<SeveriKey, BigUint>>,
    on_disk: Mutex<HashSet<SeveriKey>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl SeveriTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stats(&self) -> TableStats {
        TableStats {
            entries: self.entries.read().unwrap().len(),
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
        }
    }

    pub fn clear(&self) {
        self.entries.write().unwrap().clear();
        self.on_disk.lock().unwrap().clear();
        self.hits.store(0, Ordering::Relaxed);
        self.misses.store(0, Ordering::Relaxed);
    }

    /// Snapshot of all entries, sorted by key.
    pub fn entries(&self) -> Vec<(SeveriKey, BigUint)> {
        let mut v: Vec<_> = self
            .entries
            .read()
            .unwrap()
            .iter()
            .map(|(k, n)| (k.clone(), n.clone()))
            .collect();
        v.sort();
        v
    }

    /// `N^{d,delta}(alpha, beta)`. Negative cogenus gives zero.
    pub fn relative(&self, key: &SeveriKey) -> Result<BigUint, SeveriError> {
        key.check()?;
        Ok(self.value(key))
    }

    /// The plain Severi degree `N^{d,delta}`.
    pub fn severi(&self, d: u32, delta: i64) -> Result<BigUint, SeveriError> {
        if d == 0 {
            return Err(SeveriError::ZeroDegree);
        }
        Ok(self.value(&SeveriKey::plain(d, delta)))
    }

    /// Evaluates independent keys in parallel on the current rayon pool.
    /// The returned values do not depend on scheduling.
    pub fn prefetch(&self, keys: &[SeveriKey]) -> Result<Vec<BigUint>, SeveriError> {
        keys.iter().try_for_each(SeveriKey::check)?;
        Ok(keys.par_iter().map(|k| self.value(k)).collect())
    }

    fn value(&self, key: &SeveriKey) -> BigUint {
        if key.delta < 0 {
            return BigUint::zero();
        }
        if let Some(v) = self.entries.read().unwrap().get(key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return v.clone();
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let v = self.compute(key);
        self.entries
            .write()
            .unwrap()
            .entry(key.clone())
            .or_insert(v)
            .clone()
    }

    fn compute(&self, key: &SeveriKey) -> BigUint {
        let SeveriKey { d, delta, alpha, beta } = key;
        let (d, delta) = (*d, *delta);
        assert_eq!(
            alpha.weight() + beta.weight(),
            d as u64,
            "inadmissible recursive call {key}"
        );
        if d == 1 {
            return if delta == 0 { BigUint::one() } else { BigUint::zero() };
        }

        let mut total = BigUint::zero();

        // a point of beta moves onto an assigned position
        for (k, _) in beta.iter() {
            let sub = SeveriKey {
                d,
                delta,
                alpha: alpha.plus_unit(k),
                beta: beta.minus_unit(k),
            };
            assert!(sub.beta.size() < beta.size());
            total += self.value(&sub) * k;
        }

        // the curve degenerates to E plus a curve of degree d-1
        let dm1 = (d - 1) as u64;
        for alpha_sub in alpha.sub_profiles() {
            let used = alpha_sub.weight() + beta.weight();
            if used > dm1 {
                continue;
            }
            let w = dm1 - used;
            // delta' = delta - (d-1) + |gamma| >= 0 bounds the excess
            // sum (k-1) gamma_k = w - |gamma|
            let budget = delta - dm1 as i64 + w as i64;
            if budget < 0 {
                continue;
            }
            let c_alpha = choose_product(alpha, &alpha_sub);
            for gamma in profiles_with_excess(w as u32, budget as u64) {
                let delta_sub = delta - dm1 as i64 + gamma.size() as i64;
                assert!(delta_sub >= 0 && delta_sub <= delta, "cogenus must not grow");
                let beta_sup = beta.plus(&gamma);
                let mut factor = c_alpha.clone() * choose_product(&beta_sup, beta);
                for (k, c) in gamma.iter() {
                    factor *= BigUint::from(k).pow(c);
                }
                let sub = SeveriKey { d: d - 1, delta: delta_sub, alpha: alpha_sub.clone(), beta: beta_sup };
                total += self.value(&sub) * factor;
            }
        }
        total
    }

    /// Reads a cache file written by [`SeveriTable::persist`]. Returns the
    /// number of entries loaded; a missing file or a header from another
    /// format version loads nothing.
    pub fn load(&self, path: &Path) -> Result<usize, SeveriError> {
        let file = match File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e.into()),
        };
        let mut lines = BufReader::new(file).lines();
        match lines.next() {
            Some(Ok(h)) if h == CACHE_HEADER => {}
            _ => return Ok(0),
        }
        let mut loaded = Vec::new();
        for line in lines {
            let line = line?;
            let Some((k, v)) = line.split_once(' ') else { continue };
            // a torn final line from an interrupted append is skipped
            let (Ok(key), Ok(val)) = (k.parse::<SeveriKey>(), v.parse::<BigUint>()) else {
                continue;
            };
            loaded.push((key, val));
        }
        let n = loaded.len();
        let mut entries = self.entries.write().unwrap();
        let mut on_disk = self.on_disk.lock().unwrap();
        for (key, val) in loaded {
            on_disk.insert(key.clone());
            entries.entry(key).or_insert(val);
        }
        Ok(n)
    }

    /// Appends every entry not yet present in the cache file, creating it
    /// with a header if needed. Returns the number of entries written.
    pub fn persist(&self, path: &Path) -> Result<usize, SeveriError> {
        let fresh = match File::open(path) {
            Ok(f) => {
                let mut first = String::new();
                BufReader::new(f).read_line(&mut first)?;
                if first.trim_end() != CACHE_HEADER {
                    // foreign or stale format: start over
                    std::fs::remove_file(path)?;
                    self.on_disk.lock().unwrap().clear();
                    true
                } else {
                    false
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => true,
            Err(e) => return Err(e.into()),
        };
        let mut out = OpenOptions::new().create(true).append(true).open(path)?;
        let mut buf = String::new();
        if fresh {
            buf.push_str(CACHE_HEADER);
            buf.push('\n');
        }
        let mut on_disk = self.on_disk.lock().unwrap();
        let mut written = 0;
        for (key, val) in self.entries() {
            if on_disk.insert(key.clone()) {
                buf.push_str(&format!("{key} {val}\n"));
                written += 1;
            }
        }
        out.write_all(buf.as_bytes())?;
        Ok(written)
    }
}

fn choose_product(top: &TangencyProfile, bottom: &TangencyProfile) -> BigUint {
    let mut acc = BigUint::one();
    for (m, c) in bottom.iter() {
        acc *= binomial(BigUint::from(top.count(m)), BigUint::from(c));
    }
    acc
}

/// Profiles of weight `w` whose excess `sum (k-1) gamma_k` is at most
/// `budget`. Parts of size >= 2 are chosen explicitly, the rest are ones.
fn profiles_with_excess(w: u32, budget: u64) -> Vec<TangencyProfile> {
    fn rec(k: u32, w_left: u32, budget: u64, cur: &mut Vec<(u32, u32)>, out: &mut Vec<TangencyProfile>) {
        if k > w_left.max(1) || (k as u64 - 1) > budget {
            let mut pairs = cur.clone();
            if w_left > 0 {
                pairs.push((1, w_left));
            }
            out.push(TangencyProfile::from_pairs(pairs));
            return;
        }
        let max_c = (w_left / k).min((budget / (k as u64 - 1)) as u32);
        for c in 0..=max_c {
            if c > 0 {
                cur.push((k, c));
            }
            rec(k + 1, w_left - c * k, budget - c as u64 * (k as u64 - 1), cur, out);
            if c > 0 {
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(2, w, budget, &mut Vec::new(), &mut out);
    out
}

/// `sum_{r=0}^{order} N^{d,r} x^r`.
///
/// The coefficients agree with the universal counts only when `O(d)` is
/// `(5r-1)`-very ample, i.e. `d >= 5r - 1`; unless `unsafe_thresholds` is set a
/// violation is an error.
pub fn p2_series(
    table: &SeveriTable,
    d: u32,
    order: usize,
    unsafe_thresholds: bool,
) -> Result<PowerSeries, SeveriError> {
    if d == 0 {
        return Err(SeveriError::ZeroDegree);
    }
    if !unsafe_thresholds {
        check_threshold(d, order)?;
    }
    let keys: Vec<_> = (0..=order as i64).map(|r| SeveriKey::plain(d, r)).collect();
    let values = table.prefetch(&keys)?;
    Ok(PowerSeries::new(
        Variable::X,
        values.into_iter().map(|v| Rational::from_integer(v.into())).collect(),
    ))
}

/// First `r <= order` with `d < 5r - 1`, as an error.
pub fn check_threshold(d: u32, order: usize) -> Result<(), SeveriError> {
    match (1..=order).find(|&r| (d as i64) < 5 * r as i64 - 1) {
        Some(r) => Err(SeveriError::Threshold { d, r }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodePolyReport {
    pub delta: u32,
    pub window: (u32, u32),
    /// Coefficients of the interpolant in `d`, constant term first.
    #[serde(serialize_with = "ser_rationals")]
    pub polynomial: Vec<Rational>,
    pub fits: bool,
    /// First degree in the window whose value the interpolant misses.
    pub first_mismatch: Option<u32>,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rational::to_text))
}

/// Interpolates `N^{d,delta}` by a polynomial of degree `2 delta` through the
/// first `2 delta + 1` degrees of `window` and checks that it predicts the
/// remaining values exactly.
pub fn node_poly_check(
    table: &SeveriTable,
    delta: u32,
    window: RangeInclusive<u32>,
) -> Result<NodePolyReport, SeveriError> {
    let (lo, hi) = (*window.start(), *window.end());
    let len = if hi >= lo { (hi - lo + 1) as usize } else { 0 };
    let needed = 2 * delta as usize + 2;
    if len < needed {
        return Err(SeveriError::WindowTooShort { delta, len, needed });
    }
    if lo == 0 {
        return Err(SeveriError::ZeroDegree);
    }
    let keys: Vec<_> = window.clone().map(|d| SeveriKey::plain(d, delta as i64)).collect();
    let values = table.prefetch(&keys)?;
    let points: Vec<(Rational, Rational)> = window
        .clone()
        .zip(values)
        .map(|(d, v)| (rational::int(d as i64), Rational::from_integer(v.into())))
        .collect();
    let fit_len = 2 * delta as usize + 1;
    let polynomial = interpolate(&points[..fit_len]);
    let first_mismatch = points[fit_len..]
        .iter()
        .find(|(x, y)| &eval_poly(&polynomial, x) != y)
        .map(|(x, _)| u32::try_from(x.to_integer()).expect("degree fits in u32"));
    Ok(NodePolyReport {
        delta,
        window: (lo, hi),
        polynomial,
        fits: first_mismatch.is_none(),
        first_mismatch,
    })
}

pub fn eval_poly(coeffs: &[Rational], x: &Rational) -> Rational {
    coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

/// Unique polynomial of degree `< points.len()` through the points, in the
/// monomial basis (Newton divided differences, then expansion).
pub fn interpolate(points: &[(Rational, Rational)]) -> Vec<Rational> {
    let n = points.len();
    let xs: Vec<_> = points.iter().map(|p| p.0.clone()).collect();
    let mut dd: Vec<_> = points.iter().map(|p| p.1.clone()).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    // Horner on the Newton form
    let mut poly = vec![Rational::zero(); n.max(1)];
    for i in (0..n).rev() {
        // poly <- poly * (x - xs[i]) + dd[i]
        let mut next = vec![Rational::zero(); n.max(1)];
        for (j, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if j + 1 < next.len() {
                next[j + 1] += c;
            }
            next[j] -= c * &xs[i];
        }
        next[0] += &dd[i];
        poly = next;
    }
    poly
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn n(table: &SeveriTable, d: u32, delta: i64) -> u64 {
        u64::try_from(table.severi(d, delta).unwrap()).unwrap()
    }

    #[test]
    fn base_case_and_small_values() {
        let t = SeveriTable::new();
        let line = SeveriKey::new(1, 0, TangencyProfile::empty(), TangencyProfile::single(1, 1)).unwrap();
        assert_eq!(t.relative(&line).unwrap(), BigUint::one());
        let conic_pair = SeveriKey::new(2, 1, TangencyProfile::empty(), TangencyProfile::single(1, 2)).unwrap();
        assert_eq!(t.relative(&conic_pair).unwrap(), BigUint::from(3u32));
        assert_eq!(n(&t, 3, 1), 12);
        assert_eq!(n(&t, 4, 1), 27);
        assert_eq!(n(&t, 5, -1), 0);
        for d in 1..8 {
            assert_eq!(n(&t, d, 0), 1);
        }
    }

    #[test]
    fn reducible_configurations() {
        // line + conic through 7 points; triangles through 6; four lines through 8
        let t = SeveriTable::new();
        assert_eq!(n(&t, 3, 2), 21);
        assert_eq!(n(&t, 3, 3), 15);
        assert_eq!(n(&t, 3, 4), 0);
        assert_eq!(n(&t, 4, 6), 105);
        assert_eq!(n(&t, 4, 7), 0);
        assert_eq!(n(&t, 2, 2), 0);
    }

    #[test]
    fn discriminant_degree() {
        let t = SeveriTable::new();
        for d in 2..=12u32 {
            let e = d as u64 - 1;
            assert_eq!(n(&t, d, 1), 3 * e * e, "d = {d}");
        }
    }

    #[test]
    fn inadmissible_key() {
        let err = SeveriKey::new(3, 0, TangencyProfile::single(1, 1), TangencyProfile::single(1, 1)).unwrap_err();
        assert!(matches!(err, SeveriError::ProfileWeightMismatch { d: 3, weight: 2 }));
    }

    #[test]
    fn key_text_form() {
        let key = SeveriKey::new(5, 2, TangencyProfile::single(2, 1), TangencyProfile::from_pairs([(1, 3)])).unwrap();
        assert_eq!(key.to_string(), "5:2:2^1|1^3");
        assert_eq!(key.to_string().parse::<SeveriKey>().unwrap(), key);
        assert_eq!(SeveriKey::plain(4, 1).to_string(), "4:1:|1^4");
        assert_eq!("3,1,1".parse::<TangencyProfile>().unwrap().to_string(), "1^2,3^1");
    }

    #[test]
    fn excess_enumeration() {
        // weight 4: 1^4 (excess 0), 1^2 2^1 (1), 2^2 and 1^1 3^1 (2), 4^1 (3)
        let count = |b| profiles_with_excess(4, b).len();
        assert_eq!([count(0), count(1), count(2), count(3)], [1, 2, 4, 5]);
        for p in profiles_with_excess(6, 10) {
            assert_eq!(p.weight(), 6);
        }
        assert_eq!(profiles_with_excess(6, 10).len(), 11);
        assert_eq!(profiles_with_excess(0, 0), vec![TangencyProfile::empty()]);
    }

    #[test]
    fn p2_series_threshold() {
        let t = SeveriTable::new();
        assert_eq!(p2_series(&t, 4, 1, false).unwrap(), PowerSeries::from_ints(Variable::X, &[1, 27]));
        assert_eq!(p2_series(&t, 2, 0, false).unwrap(), PowerSeries::from_ints(Variable::X, &[1]));
        assert!(matches!(p2_series(&t, 8, 2, false), Err(SeveriError::Threshold { d: 8, r: 2 })));
        assert!(p2_series(&t, 8, 2, true).is_ok());
        let s = p2_series(&t, 9, 2, false).unwrap();
        assert_eq!(s.coeff(1), &int(192));
    }

    #[test]
    fn node_polynomials() {
        let t = SeveriTable::new();
        let r = node_poly_check(&t, 1, 2..=6).unwrap();
        assert!(r.fits);
        assert_eq!(r.polynomial, vec![int(3), int(-6), int(3)]);
        let r = node_poly_check(&t, 0, 1..=3).unwrap();
        assert!(r.fits);
        assert_eq!(r.polynomial, vec![int(1)]);
        assert!(node_poly_check(&t, 2, 4..=10).unwrap().fits);
        assert!(matches!(
            node_poly_check(&t, 2, 4..=8),
            Err(SeveriError::WindowTooShort { delta: 2, len: 5, needed: 6 })
        ));
    }

    #[test]
    fn node_polynomial_detects_failure_below_threshold() {
        // N^{d,2} is polynomial from d = 1 on, but N^{d,4} is not at d = 2..
        let t = SeveriTable::new();
        let r = node_poly_check(&t, 4, 1..=10).unwrap();
        assert!(!r.fits);
        assert!(r.first_mismatch.is_some());
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = vec![int(2), int(-1), int(0), int(5)];
        let pts: Vec<_> = (0..4).map(|x| (int(x), eval_poly(&p, &int(x)))).collect();
        assert_eq!(interpolate(&pts), p);
    }

    #[test]
    fn determinism_after_clear() {
        let t = SeveriTable::new();
        let first = t.severi(7, 3).unwrap();
        assert!(t.stats().entries > 0);
        t.clear();
        assert_eq!(t.stats().entries, 0);
        assert_eq!(t.severi(7, 3).unwrap(), first);
    }

    #[test]
    fn disk_cache_roundtrip() {
        let dir = std::env::temp_dir().join(format!("nodal-cache-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("severi.cache");
        let _ = std::fs::remove_file(&path);

        let t = SeveriTable::new();
        let v = t.severi(6, 2).unwrap();
        let written = t.persist(&path).unwrap();
        assert_eq!(written, t.stats().entries);
        assert_eq!(t.persist(&path).unwrap(), 0, "append-only: nothing new");
        t.severi(7, 2).unwrap();
        assert!(t.persist(&path).unwrap() > 0);

        let u = SeveriTable::new();
        assert_eq!(u.load(&path).unwrap(), t.stats().entries);
        assert_eq!(u.severi(6, 2).unwrap(), v);
        assert_eq!(u.stats().misses, 0);

        std::fs::write(&path, "# nodal severi cache v0\n6:2:|1^6 1\n").unwrap();
        let w = SeveriTable::new();
        assert_eq!(w.load(&path).unwrap(), 0, "other versions are not trusted");
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
