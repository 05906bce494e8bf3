//! Direct computation of the zeta function of `F_q[theta]` at the place
//! `infinity`, with uniformizer `pi = 1/theta`, by summing over monic
//! polynomials; special values at negative integers and their trivial zeros.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use serde::Serialize;

use crate::dwork::{
    char_series_stabilized, profile_for_precision, zeta_np_from_charseries, DworkError,
};
use crate::ff::{monic_polys, FieldError, GaloisField, Poly};
use crate::minperm::{nu_sequence, predicted_polygon, MinpermError};
use crate::padic::{DigitProfile, PadicError, PadicExponent};
use crate::series::{
    digits_needed, one_unit_pow_digits, NewtonPolygon, OneUnit, SeriesError, TruncSeries, Valuation,
};

/// Largest number of monic polynomials a single computation may visit.
pub const MONIC_LIMIT: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZetaError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Exponent(#[from] PadicError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("{needed} monic polynomials exceed the limit {limit}")]
    Budget { needed: u64, limit: u64 },
    #[error("special values need j < 0, got {0}")]
    NonNegative(i64),
    #[error("fredholm route: {0}")]
    Dwork(Box<DworkError>),
    #[error("predictor: {0}")]
    Minperm(#[from] MinpermError),
}

impl From<DworkError> for ZetaError {
    fn from(e: DworkError) -> Self {
        ZetaError::Dwork(Box::new(e))
    }
}

/// `<a>_pi` for monic `a` of degree `n`: `a / theta^n` written in
/// `pi = 1/theta`, the coefficient reversal `1 + a_{n-1} pi + ... + a_0 pi^n`.
pub fn one_unit_of_monic(
    field: &Arc<GaloisField>,
    a: &Poly,
    n_prec: usize,
) -> Result<OneUnit, ZetaError> {
    if !a.is_monic() {
        return Err(ZetaError::NotMonic);
    }
    let mut c = a.coeffs().to_vec();
    c.reverse();
    Ok(OneUnit::new(TruncSeries::from_coeffs(field, n_prec, c))?)
}

/// `sum_d S_d x^d` truncated at `x^{D+1}` and `pi^N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaSeries {
    coeffs: Vec<TruncSeries>,
    precision: usize,
}

impl ZetaSeries {
    pub fn new(coeffs: Vec<TruncSeries>, precision: usize) -> ZetaSeries {
        ZetaSeries { coeffs, precision }
    }

    pub fn coeffs(&self) -> &[TruncSeries] {
        &self.coeffs
    }

    pub fn coeff(&self, d: usize) -> &TruncSeries {
        &self.coeffs[d]
    }

    pub fn x_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn valuations(&self) -> Vec<(u64, Valuation)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(d, c)| (d as u64, c.valuation()))
            .collect()
    }

    /// The polygon of the points `(d, v(S_d))`.
    pub fn newton_polygon(&self) -> NewtonPolygon {
        NewtonPolygon::from_points(&self.valuations()).expect("S_0 = 1")
    }

    /// Reduction modulo `pi`: the constant terms of the coefficients.
    pub fn mod_pi(&self) -> Vec<u32> {
        self.coeffs.iter().map(|c| c.coeff(0).0).collect()
    }
}

/// `S_d(y) = sum_{a monic, deg a = d} <a>^y` for `d <= D`, over
/// `F_q = F_{p^b}`.
pub fn zeta_direct(
    y: &PadicExponent,
    b: u32,
    x_deg: usize,
    n_prec: usize,
) -> Result<ZetaSeries, ZetaError> {
    let p = y.p();
    let field = GaloisField::new(p, b)?;
    let q = field.order() as u64;
    let needed = q.checked_pow(x_deg as u32).unwrap_or(u64::MAX);
    if needed > MONIC_LIMIT {
        return Err(ZetaError::Budget {
            needed,
            limit: MONIC_LIMIT,
        });
    }
    let digits = y.digits(digits_needed(p, n_prec))?;
    let mut coeffs = Vec::with_capacity(x_deg + 1);
    for d in 0..=x_deg {
        let mut s = TruncSeries::zero(&field, n_prec);
        for a in monic_polys(&field, d) {
            let u = one_unit_of_monic(&field, &a, n_prec)?;
            s = &s + one_unit_pow_digits(&u, &digits).series();
        }
        coeffs.push(s);
    }
    Ok(ZetaSeries {
        coeffs,
        precision: n_prec,
    })
}

/// The three polygons of `zeta(x, y)` for `F_q[theta]` side by side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RouteComparison {
    pub direct: NewtonPolygon,
    pub fredholm: NewtonPolygon,
    pub predicted: NewtonPolygon,
    /// `alpha_i = nu_i / (q - 1)`, as decimal strings.
    pub alpha: Vec<String>,
    /// Length of the range certified by all three routes.
    pub joint: u64,
    /// First unit segment, 1-based, where two routes disagree.
    pub first_divergence: Option<u64>,
    pub agree: bool,
}

/// Runs the monic-sum, Fredholm and minimal-permutation routes and compares
/// the polygons on their jointly certified range. `direct_deg` bounds the
/// monic sums; the other two routes are asked for `x_deg` slopes.
pub fn compare_routes(
    y: &PadicExponent,
    b: u32,
    direct_deg: usize,
    x_deg: usize,
    n_prec: usize,
) -> Result<RouteComparison, ZetaError> {
    let direct = zeta_direct(y, b, direct_deg, n_prec)?.newton_polygon();
    let profile = profile_for_precision(y, b, n_prec)?;
    let cs = char_series_stabilized(&profile, x_deg, n_prec)?;
    let fredholm = zeta_np_from_charseries(&cs, b)?;
    let cover = DigitProfile::covering(y, b, 64.max(4 * x_deg as u64))?;
    let seq = nu_sequence(&cover, x_deg as u64)?;
    let predicted = predicted_polygon(&seq, 0, 1);
    let mut joint = direct.certified_through().min(fredholm.certified_through());
    if !seq.finite {
        joint = joint.min(predicted.length());
    }
    let (a, f, pr) = (direct.expanded(), fredholm.expanded(), predicted.expanded());
    let unit = |v: &[(i64, i64)], k: usize| v.get(k).copied();
    let first_divergence = (0..joint as usize)
        .find(|&k| unit(&a, k) != unit(&f, k) || unit(&a, k) != unit(&pr, k))
        .map(|k| k as u64 + 1);
    Ok(RouteComparison {
        alpha: seq.alpha.iter().map(|a| a.to_string()).collect(),
        agree: first_divergence.is_none(),
        direct,
        fredholm,
        predicted,
        joint,
        first_divergence,
    })
}

/// `P_j(x) = sum_n x^n sum_{a monic, deg n} a^{-j}` with coefficients in
/// `F_q[theta]`.
#[derive(Clone, PartialEq, Eq)]
pub struct SpecialPolynomial {
    field: Arc<GaloisField>,
    j: i64,
    coeffs: Vec<Poly>,
}

impl fmt::Debug for SpecialPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for SpecialPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let body = c.display("theta");
            let body = if c.coeffs().iter().filter(|x| !x.is_zero()).count() > 1 && n > 0 {
                format!("({body})")
            } else {
                body
            };
            parts.push(match n {
                0 => body,
                1 => format!("{body}*x"),
                _ => format!("{body}*x^{n}"),
            });
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl SpecialPolynomial {
    pub fn j(&self) -> i64 {
        self.j
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    /// Coefficients of `x^0, x^1, ...`, without trailing zeros.
    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// `P(1)`.
    pub fn at_one(&self) -> Poly {
        self.coeffs
            .iter()
            .fold(Poly::zero(), |acc, c| acc.add(c, &self.field))
    }

    /// Multiplicity of the root `x = 1`, by repeated synthetic division.
    pub fn order_at_one(&self) -> usize {
        let f = &self.field;
        let mut c = self.coeffs.clone();
        let mut order = 0;
        while !c.is_empty() && c.iter().fold(Poly::zero(), |a, x| a.add(x, f)).is_zero() {
            // divide by (x - 1): quotient q_k = sum_{i > k} c_i
            let mut quot = vec![Poly::zero(); c.len() - 1];
            let mut acc = Poly::zero();
            for k in (0..c.len() - 1).rev() {
                acc = acc.add(&c[k + 1], f);
                quot[k] = acc.clone();
            }
            while quot.last().is_some_and(Poly::is_zero) {
                quot.pop();
            }
            c = quot;
            order += 1;
            if c.is_empty() {
                break;
            }
        }
        order
    }
}

fn q_digit_sum(mut k: u64, q: u64) -> u64 {
    let mut s = 0;
    while k > 0 {
        s += k % q;
        k /= q;
    }
    s
}

/// `sum_{a monic, deg n} a^k` computed through the base-`p` digits of `k`:
/// `a^k = prod_i (a^{p^i})^{k_i}`.
fn power_sum(field: &GaloisField, n: usize, k: u64) -> Poly {
    let p = field.characteristic() as u64;
    let mut digits = Vec::new();
    let mut kk = k;
    while kk > 0 {
        digits.push(kk % p);
        kk /= p;
    }
    let mut total = Poly::zero();
    for a in monic_polys(field, n) {
        let mut acc = Poly::one();
        for (i, &d) in digits.iter().enumerate() {
            if d == 0 {
                continue;
            }
            let fa = a.frobenius_power(i as u32, field);
            for _ in 0..d {
                acc = acc.mul(&fa, field);
            }
        }
        total = total.add(&acc, field);
    }
    total
}

/// `P_j` over `F_{p^b}`. Inner sums vanish once `n` exceeds the base-`q`
/// digit sum of `-j` divided by `q - 1`; two further zero sums are
/// confirmed before stopping.
pub fn special_value_poly(p: u32, b: u32, j: i64) -> Result<SpecialPolynomial, ZetaError> {
    if j >= 0 {
        return Err(ZetaError::NonNegative(j));
    }
    let field = GaloisField::new(p, b)?;
    let q = field.order() as u64;
    let k = j.unsigned_abs();
    let bound = q_digit_sum(k, q) / (q - 1) + 1;
    let mut coeffs = Vec::new();
    let mut zeros_after = 0;
    let mut n = 0usize;
    loop {
        let needed = q.checked_pow(n as u32).unwrap_or(u64::MAX);
        if needed > MONIC_LIMIT {
            return Err(ZetaError::Budget {
                needed,
                limit: MONIC_LIMIT,
            });
        }
        let s = power_sum(&field, n, k);
        if n as u64 > bound {
            if s.is_zero() {
                zeros_after += 1;
            } else {
                zeros_after = 0;
            }
        }
        coeffs.push(s);
        if zeros_after >= 2 {
            break;
        }
        n += 1;
    }
    while coeffs.last().is_some_and(Poly::is_zero) {
        coeffs.pop();
    }
    Ok(SpecialPolynomial { field, j, coeffs })
}

/// Parity of `s_j` and the order of vanishing of `P_j` at `x = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct TrivialZero {
    /// `(q - 1) | j`.
    pub even: bool,
    pub order: usize,
}

pub fn trivial_zero_order(p: u32, b: u32, j: i64) -> Result<TrivialZero, ZetaError> {
    let poly = special_value_poly(p, b, j)?;
    let q = (p as i64).pow(b);
    Ok(TrivialZero {
        even: j % (q - 1) == 0,
        order: poly.order_at_one(),
    })
}
