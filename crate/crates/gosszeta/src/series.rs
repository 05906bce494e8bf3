//! Truncated power series in `pi` over a finite field, 1-units raised to
//! p-adic powers, valuations and Newton polygons.
//!
//! A [`TruncSeries`] of precision `N` is an element of `F[pi]/(pi^N)`.
//! Binary operations on series of different precision produce the smaller
//! precision; nothing ever claims more than its inputs guarantee.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::ff::{Elem, GaloisField};
use crate::padic::{PadicError, PadicExponent};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("series with zero constant term has no inverse")]
    NotUnit,
    #[error("constant term is not 1")]
    NotOneUnit,
    #[error(transparent)]
    Exponent(#[from] PadicError),
    #[error("empty valuation list")]
    EmptyPolygon,
    #[error("valuation list must start at degree 0 with valuation 0")]
    NotNormalized,
}

/// The `pi`-adic valuation of a truncated quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite(u64),
    /// Zero modulo `pi^N`: the true valuation is at least `N`.
    AtLeast(u64),
    /// Known to vanish exactly, for structural reasons.
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Lower bound, `u64::MAX` for exact zero.
    pub fn lower_bound(self) -> u64 {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
            Valuation::Infinite => u64::MAX,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone)]
pub struct TruncSeries {
    field: Arc<GaloisField>,
    coeffs: Vec<Elem>,
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{}*pi^{i}", c.0))
            .collect();
        write!(f, "[{}] + O(pi^{})", terms.join(" + "), self.coeffs.len())
    }
}

impl PartialEq for TruncSeries {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_field(&other.field) && self.coeffs == other.coeffs
    }
}
impl Eq for TruncSeries {}

impl TruncSeries {
    pub fn zero(field: &Arc<GaloisField>, n: usize) -> TruncSeries {
        TruncSeries {
            field: field.clone(),
            coeffs: vec![Elem::ZERO; n],
        }
    }

    pub fn one(field: &Arc<GaloisField>, n: usize) -> TruncSeries {
        Self::constant(field, n, Elem::ONE)
    }

    pub fn constant(field: &Arc<GaloisField>, n: usize, c: Elem) -> TruncSeries {
        let mut s = Self::zero(field, n);
        if n > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    /// `c pi^k`.
    pub fn monomial(field: &Arc<GaloisField>, n: usize, k: usize, c: Elem) -> TruncSeries {
        let mut s = Self::zero(field, n);
        if k < n {
            s.coeffs[k] = c;
        }
        s
    }

    /// Coefficients beyond `n` are dropped, missing ones are zero.
    pub fn from_coeffs(field: &Arc<GaloisField>, n: usize, mut c: Vec<Elem>) -> TruncSeries {
        c.resize(n, Elem::ZERO);
        TruncSeries {
            field: field.clone(),
            coeffs: c,
        }
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(Elem::ZERO)
    }

    pub fn set_coeff(&mut self, i: usize, c: Elem) {
        if i < self.coeffs.len() {
            self.coeffs[i] = c;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Explicit re-truncation to a smaller precision.
    pub fn truncate(&self, n: usize) -> TruncSeries {
        assert!(
            n <= self.precision(),
            "cannot raise precision by truncation"
        );
        TruncSeries {
            field: self.field.clone(),
            coeffs: self.coeffs[..n].to_vec(),
        }
    }

    pub fn valuation(&self) -> Valuation {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(i) => Valuation::Finite(i as u64),
            None => Valuation::AtLeast(self.coeffs.len() as u64),
        }
    }

    fn check(&self, other: &TruncSeries) -> usize {
        assert!(
            self.field.same_field(&other.field),
            "series over different fields cannot be combined"
        );
        self.precision().min(other.precision())
    }

    pub fn add_ref(&self, other: &TruncSeries) -> TruncSeries {
        let n = self.check(other);
        let f = &self.field;
        TruncSeries {
            field: f.clone(),
            coeffs: (0..n)
                .map(|i| f.add(self.coeffs[i], other.coeffs[i]))
                .collect(),
        }
    }

    pub fn sub_ref(&self, other: &TruncSeries) -> TruncSeries {
        let n = self.check(other);
        let f = &self.field;
        TruncSeries {
            field: f.clone(),
            coeffs: (0..n)
                .map(|i| f.sub(self.coeffs[i], other.coeffs[i]))
                .collect(),
        }
    }

    pub fn neg_ref(&self) -> TruncSeries {
        let f = &self.field;
        TruncSeries {
            field: f.clone(),
            coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(),
        }
    }

    pub fn scale(&self, c: Elem) -> TruncSeries {
        let f = &self.field;
        TruncSeries {
            field: f.clone(),
            coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    /// `self += a * b`, the inner step of every matrix routine.
    pub fn add_mul_assign(&mut self, a: &TruncSeries, b: &TruncSeries) {
        let n = self.check(a).min(b.precision());
        self.coeffs.truncate(n);
        mul_into(&self.field, &mut self.coeffs, &a.coeffs, &b.coeffs, n);
    }

    pub fn mul_ref(&self, other: &TruncSeries) -> TruncSeries {
        let n = self.check(other);
        let mut out = vec![Elem::ZERO; n];
        mul_into(&self.field, &mut out, &self.coeffs, &other.coeffs, n);
        TruncSeries {
            field: self.field.clone(),
            coeffs: out,
        }
    }

    pub fn inverse(&self) -> Result<TruncSeries, SeriesError> {
        let f = &self.field;
        let n = self.precision();
        if n == 0 {
            return Ok(self.clone());
        }
        let c0inv = f.inv(self.coeffs[0]).map_err(|_| SeriesError::NotUnit)?;
        let mut out = vec![Elem::ZERO; n];
        out[0] = c0inv;
        for k in 1..n {
            let mut s = Elem::ZERO;
            for j in 1..=k {
                let a = self.coeffs[j];
                if !a.is_zero() {
                    s = f.add(s, f.mul(a, out[k - j]));
                }
            }
            out[k] = f.neg(f.mul(s, c0inv));
        }
        Ok(TruncSeries {
            field: f.clone(),
            coeffs: out,
        })
    }

    pub fn pow(&self, mut e: u64) -> TruncSeries {
        let mut base = self.clone();
        let mut acc = TruncSeries::one(&self.field, self.precision());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    /// `self^{p^k}`: coefficients raised to `p^k` and moved to `i p^k`.
    pub fn frobenius(&self, k: u32) -> TruncSeries {
        let f = &self.field;
        let n = self.precision();
        let step = (f.characteristic() as usize).saturating_pow(k);
        let mut out = vec![Elem::ZERO; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            match i.checked_mul(step) {
                Some(j) if j < n => out[j] = f.frobenius_iter(c, k),
                _ => break,
            }
        }
        TruncSeries {
            field: f.clone(),
            coeffs: out,
        }
    }

    /// Applies the field automorphism `c -> c^{p^k}` to every coefficient.
    pub fn map_coeffs_frobenius(&self, k: u32) -> TruncSeries {
        let f = &self.field;
        TruncSeries {
            field: f.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|&c| f.frobenius_iter(c, k))
                .collect(),
        }
    }

    /// Substitutes `pi -> pi^e`.
    pub fn inflate(&self, e: usize) -> TruncSeries {
        let n = self.precision();
        let mut out = vec![Elem::ZERO; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if i * e >= n {
                break;
            }
            out[i * e] = c;
        }
        TruncSeries {
            field: self.field.clone(),
            coeffs: out,
        }
    }
}

fn nonzero_count(c: &[Elem]) -> usize {
    c.iter().filter(|x| !x.is_zero()).count()
}

/// `out += a * b mod pi^n`, iterating over the sparser factor.
fn mul_into(f: &GaloisField, out: &mut [Elem], a: &[Elem], b: &[Elem], n: usize) {
    let (a, b) = if nonzero_count(a) <= nonzero_count(b) {
        (a, b)
    } else {
        (b, a)
    };
    let bstart = match b.iter().position(|c| !c.is_zero()) {
        Some(s) => s,
        None => return,
    };
    for (i, &ai) in a.iter().enumerate().take(n) {
        if ai.is_zero() || i + bstart >= n {
            continue;
        }
        let lim = (n - i).min(b.len());
        for j in bstart..lim {
            let bj = b[j];
            if !bj.is_zero() {
                out[i + j] = f.add(out[i + j], f.mul(ai, bj));
            }
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl $tr<&TruncSeries> for &TruncSeries {
            type Output = TruncSeries;
            fn $m(self, rhs: &TruncSeries) -> TruncSeries {
                self.$imp(rhs)
            }
        }
        impl $tr<TruncSeries> for TruncSeries {
            type Output = TruncSeries;
            fn $m(self, rhs: TruncSeries) -> TruncSeries {
                self.$imp(&rhs)
            }
        }
    };
}
forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        self.neg_ref()
    }
}

/// A series with constant term 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneUnit(TruncSeries);

impl OneUnit {
    pub fn new(s: TruncSeries) -> Result<OneUnit, SeriesError> {
        if s.precision() > 0 && s.coeff(0) != Elem::ONE {
            return Err(SeriesError::NotOneUnit);
        }
        Ok(OneUnit(s))
    }

    pub fn series(&self) -> &TruncSeries {
        &self.0
    }

    pub fn into_series(self) -> TruncSeries {
        self.0
    }

    pub fn mul(&self, other: &OneUnit) -> OneUnit {
        OneUnit(self.0.mul_ref(&other.0))
    }
}

/// Number of base-`p` digits of the exponent that matter modulo `pi^n`:
/// the least `k` with `p^k >= n`.
pub fn digits_needed(p: u32, n: usize) -> usize {
    let mut k = 0;
    let mut pk = 1usize;
    while pk < n {
        pk = pk.saturating_mul(p as usize);
        k += 1;
    }
    k
}

/// `u^y mod pi^N` as `prod_k (u^{p^k})^{y_k}` over the base-`p` digits of
/// `y`. Only digits with `p^k < N` enter, so the result depends on `y`
/// modulo `p^{ceil(log_p N)}` alone.
pub fn one_unit_pow(u: &OneUnit, y: &PadicExponent) -> Result<OneUnit, SeriesError> {
    let s = u.series();
    let n = s.precision();
    let p = s.field().characteristic();
    assert_eq!(p, y.p(), "exponent and series live over different primes");
    let k = digits_needed(p, n);
    let digits = y.digits(k)?;
    Ok(one_unit_pow_digits(u, &digits))
}

/// [`one_unit_pow`] for an explicit digit vector.
pub fn one_unit_pow_digits(u: &OneUnit, digits: &[u8]) -> OneUnit {
    let s = u.series();
    let mut acc = TruncSeries::one(s.field(), s.precision());
    for (k, &d) in digits.iter().enumerate() {
        if d == 0 {
            continue;
        }
        let fk = s.frobenius(k as u32);
        for _ in 0..d {
            acc = acc.mul_ref(&fk);
        }
    }
    OneUnit(acc)
}

/// A slope `num/den` (in lowest terms, `den > 0`) with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Slope {
    pub num: i64,
    pub den: i64,
    pub mult: u64,
}

impl Slope {
    pub fn new(num: i64, den: i64, mult: u64) -> Slope {
        assert!(den != 0);
        let g = num.gcd(&den);
        let s = if den < 0 { -1 } else { 1 };
        Slope {
            num: s * num / g,
            den: s * den / g,
            mult,
        }
    }

    pub fn integer(v: i64, mult: u64) -> Slope {
        Slope::new(v, 1, mult)
    }

    pub fn cmp_value(&self, other: &Slope) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }

    pub fn same_value(&self, other: &Slope) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)?;
        } else {
            write!(f, "{}/{}", self.num, self.den)?;
        }
        if self.mult != 1 {
            write!(f, " (x{})", self.mult)?;
        }
        Ok(())
    }
}

impl Serialize for Slope {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.num, self.den, self.mult).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Slope {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (num, den, mult) = <(i64, i64, u64)>::deserialize(d)?;
        if den == 0 || mult == 0 {
            return Err(serde::de::Error::custom(
                "slope needs den != 0 and mult >= 1",
            ));
        }
        Ok(Slope::new(num, den, mult))
    }
}

/// Lower convex hull of `(degree, valuation)` points.
///
/// `certified_through` is the largest degree `k` such that the polygon on
/// `[0, k]` cannot change whatever the unknown (`AtLeast`) coefficients turn
/// out to be. The last listed degree is never certified, since the hull there
/// depends on coefficients that were not computed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    slopes: Vec<Slope>,
    certified_through: u64,
}

impl NewtonPolygon {
    /// A polygon given directly by its slopes; they must be strictly
    /// increasing.
    pub fn from_slopes(slopes: Vec<Slope>, certified_through: u64) -> NewtonPolygon {
        for w in slopes.windows(2) {
            assert_eq!(
                w[0].cmp_value(&w[1]),
                Ordering::Less,
                "slopes must increase"
            );
        }
        NewtonPolygon {
            slopes,
            certified_through,
        }
    }

    /// Merges equal consecutive slopes of a nondecreasing list.
    pub fn from_sorted_values(values: &[Slope], certified_through: u64) -> NewtonPolygon {
        let mut out: Vec<Slope> = Vec::new();
        for s in values {
            match out.last_mut() {
                Some(last) if last.same_value(s) => last.mult += s.mult,
                _ => out.push(*s),
            }
        }
        Self::from_slopes(out, certified_through)
    }

    pub fn empty() -> NewtonPolygon {
        NewtonPolygon {
            slopes: Vec::new(),
            certified_through: 0,
        }
    }

    pub fn from_points(points: &[(u64, Valuation)]) -> Result<NewtonPolygon, SeriesError> {
        if points.is_empty() {
            return Err(SeriesError::EmptyPolygon);
        }
        let mut pts = points.to_vec();
        pts.sort_by_key(|p| p.0);
        if pts[0] != (0, Valuation::Finite(0)) {
            return Err(SeriesError::NotNormalized);
        }
        let last_degree = pts.last().unwrap().0;
        let known: Vec<(i128, i128)> = pts
            .iter()
            .filter_map(|&(x, v)| v.finite().map(|v| (x as i128, v as i128)))
            .collect();
        let unknown: Vec<(i128, i128)> = pts
            .iter()
            .filter_map(|&(x, v)| match v {
                Valuation::AtLeast(n) => Some((x as i128, n as i128)),
                _ => None,
            })
            .collect();

        let mut hull: Vec<(i128, i128)> = Vec::new();
        for &pt in &known {
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                // drop b unless it lies strictly below segment a-pt
                let cross = (b.0 - a.0) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 - a.0);
                if cross <= 0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(pt);
        }
        let slopes: Vec<Slope> = hull
            .windows(2)
            .map(|w| {
                let dx = w[1].0 - w[0].0;
                Slope::new((w[1].1 - w[0].1) as i64, dx as i64, dx as u64)
            })
            .collect();

        // below the hull segment through a and b at x?
        let below = |a: (i128, i128), b: (i128, i128), x: i128, n: i128| {
            n * (b.0 - a.0) <= a.1 * (b.0 - a.0) + (b.1 - a.1) * (x - a.0)
        };
        let mut certified = 0u64;
        for vi in 1..hull.len() {
            let (k, vk) = hull[vi];
            if k as u64 >= last_degree {
                break;
            }
            let left_ok = unknown.iter().filter(|u| u.0 < k).all(|&(x, n)| {
                let seg = hull.windows(2).find(|w| w[0].0 <= x && x <= w[1].0);
                match seg {
                    Some(w) => !below(w[0], w[1], x, n),
                    None => true,
                }
            });
            let a = hull[vi - 1];
            let right_ok = unknown
                .iter()
                .filter(|u| u.0 > k)
                .all(|&(x, n)| (n - vk) * (k - a.0) > (vk - a.1) * (x - k));
            if left_ok && right_ok {
                certified = k as u64;
            } else {
                break;
            }
        }
        Ok(NewtonPolygon {
            slopes,
            certified_through: certified,
        })
    }

    pub fn slopes(&self) -> &[Slope] {
        &self.slopes
    }

    pub fn certified_through(&self) -> u64 {
        self.certified_through
    }

    /// Total horizontal length.
    pub fn length(&self) -> u64 {
        self.slopes.iter().map(|s| s.mult).sum()
    }

    /// The slopes of the certified part.
    pub fn certified_slopes(&self) -> Vec<Slope> {
        let mut x = 0u64;
        let mut out = Vec::new();
        for s in &self.slopes {
            if x + s.mult > self.certified_through {
                break;
            }
            x += s.mult;
            out.push(*s);
        }
        out
    }

    /// Slopes repeated according to multiplicity, as `(num, den)`.
    pub fn expanded(&self) -> Vec<(i64, i64)> {
        self.slopes
            .iter()
            .flat_map(|s| std::iter::repeat_n((s.num, s.den), s.mult as usize))
            .collect()
    }

    /// Certified slopes repeated according to multiplicity.
    pub fn certified_expanded(&self) -> Vec<(i64, i64)> {
        let mut e = self.expanded();
        e.truncate(self.certified_through as usize);
        e
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("polygon serializes")
    }

    /// Aligned human-readable rendering.
    pub fn to_table(&self) -> String {
        let mut out = format!("{:>12} {:>6}\n", "slope", "mult");
        for s in &self.slopes {
            let v = if s.den == 1 {
                s.num.to_string()
            } else {
                format!("{}/{}", s.num, s.den)
            };
            out.push_str(&format!("{:>12} {:>6}\n", v, s.mult));
        }
        out.push_str(&format!(
            "certified through degree {}\n",
            self.certified_through
        ));
        out
    }
}
