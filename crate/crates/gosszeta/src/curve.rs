//! Zeta functions of `A = F_p[E - infinity]` for an ordinary elliptic curve
//! `E: y^2 = x^3 + a4 x + a6`, computed as an Euler product over closed
//! points. Each prime is principal after raising to the class number `h`,
//! so its character is the `h`-th root of the one-unit part of a Miller
//! function expanded at infinity.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::ff::{is_prime, Elem, FieldError, GaloisField};
use crate::padic::{PadicError, PadicExponent};
use crate::series::{one_unit_pow, NewtonPolygon, OneUnit, SeriesError, TruncSeries};
use crate::zeta::ZetaSeries;

/// Largest extension degree whose points are enumerated.
pub const MAX_POINT_DEGREE: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Exponent(#[from] PadicError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("p = {0} must be a prime greater than 3")]
    BadPrime(u32),
    #[error("the curve is singular")]
    Singular,
    #[error("p divides h = {0}: inseparable root required, unsupported host")]
    InseparableRoot(u64),
    #[error("the host is supersingular")]
    Supersingular,
    #[error("points of degree {0} exceed the enumeration limit")]
    Budget(u32),
    #[error("consistency check failed: {0}")]
    Consistency(String),
}

/// `y^2 = x^3 + a4 x + a6` over `F_p` with its point at infinity removed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EllipticHost {
    pub p: u32,
    pub a4: u32,
    pub a6: u32,
    /// `#E(F_p)`, the class number of `A`.
    pub h: u64,
    /// `a = p + 1 - h`.
    pub trace: i64,
    pub ordinary: bool,
}

impl EllipticHost {
    pub fn new(p: u32, a4: i64, a6: i64) -> Result<EllipticHost, CurveError> {
        if p <= 3 || !is_prime(p) {
            return Err(CurveError::BadPrime(p));
        }
        let f = GaloisField::new(p, 1)?;
        let (a4, a6) = (f.from_int(a4), f.from_int(a6));
        let disc = f.add(
            f.mul(f.from_int(4), f.pow(a4, 3)),
            f.mul(f.from_int(27), f.pow(a6, 2)),
        );
        if disc.is_zero() {
            return Err(CurveError::Singular);
        }
        let h = count_points(&f, a4, a6);
        let trace = p as i64 + 1 - h as i64;
        if h.is_multiple_of(p as u64) {
            return Err(CurveError::InseparableRoot(h));
        }
        Ok(EllipticHost {
            p,
            a4: a4.0,
            a6: a6.0,
            h,
            trace,
            ordinary: trace.rem_euclid(p as i64) != 0,
        })
    }

    pub fn genus(&self) -> u64 {
        1
    }

    /// `#E(F_{p^n})` from the trace: `p^n + 1 - (alpha^n + beta^n)`.
    pub fn count_over(&self, n: u32) -> i128 {
        let (a, p) = (self.trace as i128, self.p as i128);
        // s_k = alpha^k + beta^k, s_k = a s_{k-1} - p s_{k-2}
        let (mut s0, mut s1) = (2i128, a);
        for _ in 1..n {
            let s2 = a * s1 - p * s0;
            s0 = s1;
            s1 = s2;
        }
        p.pow(n) + 1 - s1
    }

    /// The affine Weil zeta function `(1 - a x + p x^2)/(1 - p x)` modulo `p`
    /// and `x^{D+1}`.
    pub fn weil_zeta_mod_p(&self, x_deg: usize) -> Vec<u32> {
        let mut out = vec![0u32; x_deg + 1];
        out[0] = 1;
        if x_deg >= 1 {
            out[1] = (-self.trace).rem_euclid(self.p as i64) as u32;
        }
        out
    }

    fn field(&self, k: u32) -> Result<Arc<GaloisField>, CurveError> {
        Ok(GaloisField::new(self.p, k)?)
    }

    fn rhs(&self, f: &GaloisField, x: Elem) -> Elem {
        let x3 = f.mul(f.mul(x, x), x);
        f.add(f.add(x3, f.mul(Elem(self.a4), x)), Elem(self.a6))
    }
}

fn count_points(f: &GaloisField, a4: Elem, a6: Elem) -> u64 {
    let mut n = 1;
    for x in f.elements() {
        let r = f.add(f.add(f.pow(x, 3), f.mul(a4, x)), a6);
        n += match f.sqrt(r) {
            None => 0,
            Some(_) if r.is_zero() => 1,
            Some(_) => 2,
        };
    }
    n
}

/// Affine point over some `F_{p^k}`; `None` is the point at infinity.
pub type Point = Option<(Elem, Elem)>;

fn point_add(f: &GaloisField, a4: Elem, a: Point, b: Point) -> Point {
    let (Some((x1, y1)), Some((x2, y2))) = (a, b) else {
        return a.or(b);
    };
    if x1 == x2 && f.add(y1, y2).is_zero() {
        return None;
    }
    let lambda = slope(f, a4, (x1, y1), (x2, y2));
    let x3 = f.sub(f.sub(f.mul(lambda, lambda), x1), x2);
    let y3 = f.sub(f.mul(lambda, f.sub(x1, x3)), y1);
    Some((x3, y3))
}

fn slope(f: &GaloisField, a4: Elem, (x1, y1): (Elem, Elem), (x2, y2): (Elem, Elem)) -> Elem {
    if x1 == x2 {
        let num = f.add(f.mul(f.from_int(3), f.mul(x1, x1)), a4);
        f.div(num, f.add(y1, y1))
            .expect("2y != 0 off the 2-torsion")
    } else {
        f.div(f.sub(y2, y1), f.sub(x2, x1)).expect("distinct x")
    }
}

/// A closed point of `E - infinity` of degree `k`, stored through one point
/// of its Frobenius orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedPoint {
    field: Arc<GaloisField>,
    x: Elem,
    y: Elem,
}

impl ClosedPoint {
    pub fn degree(&self) -> u32 {
        self.field.degree()
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn representative(&self) -> (Elem, Elem) {
        (self.x, self.y)
    }

    /// The conjugates `P, Frob(P), ..., Frob^{k-1}(P)`.
    pub fn orbit(&self) -> Vec<(Elem, Elem)> {
        (0..self.degree())
            .map(|j| {
                (
                    self.field.frobenius_iter(self.x, j),
                    self.field.frobenius_iter(self.y, j),
                )
            })
            .collect()
    }
}

fn orbit_len(f: &GaloisField, (x, y): (Elem, Elem)) -> u32 {
    let mut j = 1;
    while f.frobenius_iter(x, j) != x || f.frobenius_iter(y, j) != y {
        j += 1;
    }
    j
}

/// All affine closed points of degree at most `max_deg`, each orbit listed
/// once through its smallest member.
pub fn closed_points_up_to(
    host: &EllipticHost,
    max_deg: u32,
) -> Result<Vec<ClosedPoint>, CurveError> {
    let mut out = Vec::new();
    for k in 1..=max_deg {
        if k > MAX_POINT_DEGREE {
            return Err(CurveError::Budget(k));
        }
        let f = host.field(k)?;
        for x in f.elements() {
            let r = host.rhs(&f, x);
            let Some(s) = f.sqrt(r) else { continue };
            let ys = if s.is_zero() {
                vec![s]
            } else {
                vec![s, f.neg(s)]
            };
            for y in ys {
                if orbit_len(&f, (x, y)) != k {
                    continue;
                }
                let pt = ClosedPoint {
                    field: f.clone(),
                    x,
                    y,
                };
                let min = pt
                    .orbit()
                    .into_iter()
                    .min_by_key(|(a, b)| (a.0, b.0))
                    .unwrap();
                if min == (x, y) {
                    out.push(pt);
                }
            }
        }
    }
    Ok(out)
}

/// `z^val * unit` with `unit(0) != 0`, the unit known modulo `z^M`.
#[derive(Clone, Debug)]
struct Laurent {
    val: i64,
    unit: TruncSeries,
}

impl Laurent {
    fn one(f: &Arc<GaloisField>, m: usize) -> Laurent {
        Laurent {
            val: 0,
            unit: TruncSeries::one(f, m),
        }
    }

    fn mul(&self, o: &Laurent) -> Laurent {
        Laurent {
            val: self.val + o.val,
            unit: self.unit.mul_ref(&o.unit),
        }
    }

    fn div(&self, o: &Laurent) -> Laurent {
        Laurent {
            val: self.val - o.val,
            unit: self.unit.mul_ref(&o.unit.inverse().expect("unit")),
        }
    }

    fn pow(&self, e: u64) -> Laurent {
        Laurent {
            val: self.val * e as i64,
            unit: self.unit.pow(e),
        }
    }
}

/// Expansions of `x` and `y` at infinity in `z = -x/y` over `F_{p^k}`:
/// `x = z^{-2} W^{-1}`, `y = -z^{-3} W^{-1}`, where `w = -1/y = z^3 W`
/// solves `W = 1 + a4 z^4 W^2 + a6 z^6 W^3`.
#[derive(Clone, Debug)]
pub struct InfinityExpansion {
    field: Arc<GaloisField>,
    precision: usize,
    /// `W^{-1}`.
    winv: TruncSeries,
}

impl InfinityExpansion {
    pub fn new(
        host: &EllipticHost,
        field: &Arc<GaloisField>,
        precision: usize,
    ) -> InfinityExpansion {
        let m = precision;
        let z4 = TruncSeries::monomial(field, m, 4, Elem(host.a4));
        let z6 = TruncSeries::monomial(field, m, 6, Elem(host.a6));
        let one = TruncSeries::one(field, m);
        let mut w = one.clone();
        loop {
            let w2 = w.mul_ref(&w);
            let next = &(&one + &z4.mul_ref(&w2)) + &z6.mul_ref(&w2.mul_ref(&w));
            if next == w {
                break;
            }
            w = next;
        }
        InfinityExpansion {
            field: field.clone(),
            precision,
            winv: w.inverse().expect("W(0) = 1"),
        }
    }

    /// Laurent coefficients of `x`, starting at `z^{-2}`.
    pub fn x_coeffs(&self) -> &[Elem] {
        self.winv.coeffs()
    }

    /// Laurent coefficients of `y`, starting at `z^{-3}`.
    pub fn y_coeffs(&self) -> Vec<Elem> {
        self.winv.neg_ref().coeffs().to_vec()
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    /// `x - c`.
    fn vertical(&self, c: Elem) -> Laurent {
        let shift = TruncSeries::monomial(&self.field, self.precision, 2, c);
        Laurent {
            val: -2,
            unit: self.winv.sub_ref(&shift),
        }
    }

    /// `y - lambda x - c`.
    fn line(&self, lambda: Elem, c: Elem) -> Laurent {
        let m = self.precision;
        let lx = TruncSeries::monomial(&self.field, m, 1, lambda).mul_ref(&self.winv);
        let cz = TruncSeries::monomial(&self.field, m, 3, c);
        Laurent {
            val: -3,
            unit: self.winv.neg_ref().sub_ref(&lx).sub_ref(&cz),
        }
    }

    /// A function with divisor `[A] + [B] - [A+B] - [O]`.
    fn combine(&self, a4: Elem, a: Point, b: Point) -> Laurent {
        let f = &self.field;
        let (Some(pa), Some(pb)) = (a, b) else {
            return Laurent::one(f, self.precision);
        };
        if pa.0 == pb.0 && f.add(pa.1, pb.1).is_zero() {
            return self.vertical(pa.0);
        }
        let lambda = slope(f, a4, pa, pb);
        let c = f.sub(pa.1, f.mul(lambda, pa.0));
        let (sx, _) = point_add(f, a4, a, b).expect("A + B is affine here");
        self.line(lambda, c).div(&self.vertical(sx))
    }
}

/// Order in which the Miller function `f_{h,T}` is accumulated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
pub enum MillerChain {
    /// `f_{i+1} = f_i * c(iT, T)`.
    Sequential,
    /// Binary double-and-add on the bits of `h`.
    #[default]
    DoubleAndAdd,
}

fn miller(exp: &InfinityExpansion, a4: Elem, t: Point, h: u64, chain: MillerChain) -> Laurent {
    let f = &exp.field;
    let m = exp.precision;
    match chain {
        MillerChain::Sequential => {
            let mut acc = Laurent::one(f, m);
            let mut it = t;
            for _ in 1..h {
                acc = acc.mul(&exp.combine(a4, it, t));
                it = point_add(f, a4, it, t);
            }
            acc
        }
        MillerChain::DoubleAndAdd => {
            let mut acc = Laurent::one(f, m);
            let mut it = t;
            let bits = 64 - h.leading_zeros();
            for i in (0..bits - 1).rev() {
                acc = acc.mul(&acc).mul(&exp.combine(a4, it, it));
                it = point_add(f, a4, it, it);
                if (h >> i) & 1 == 1 {
                    acc = acc.mul(&exp.combine(a4, it, t));
                    it = point_add(f, a4, it, t);
                }
            }
            acc
        }
    }
}

/// Guard digits carried in the expansion at infinity.
const GUARD: usize = 6;

/// The one-unit part of a function `g` with divisor `h [P] - h deg(P) [O]`,
/// where `[P]` is the sum of the conjugates of `pt`.
pub fn principal_one_unit(
    host: &EllipticHost,
    pt: &ClosedPoint,
    n_prec: usize,
    chain: MillerChain,
) -> Result<OneUnit, CurveError> {
    let f = &pt.field;
    let exp = InfinityExpansion::new(host, f, n_prec + GUARD);
    let a4 = Elem(host.a4);
    // div F = sum [P_j] - [T] - (k-1)[O]
    let mut big_f = Laurent::one(f, exp.precision);
    let mut sum: Point = None;
    for q in pt.orbit() {
        big_f = big_f.mul(&exp.combine(a4, sum, Some(q)));
        sum = point_add(f, a4, sum, Some(q));
    }
    if let Some((x, y)) = sum {
        if !f.in_prime_field(x) || !f.in_prime_field(y) {
            return Err(CurveError::Consistency(
                "sum of conjugates is not rational".into(),
            ));
        }
    }
    let g = big_f.pow(host.h).mul(&miller(&exp, a4, sum, host.h, chain));
    let k = pt.degree() as i64;
    if g.val != -(host.h as i64) * k {
        return Err(CurveError::Consistency(format!(
            "pole order {} at infinity, expected {}",
            -g.val,
            host.h as i64 * k
        )));
    }
    let lead = g.unit.coeff(0);
    let normalized = g.unit.scale(f.inv(lead)?);
    let fp = GaloisField::new(host.p, 1)?;
    let mut coeffs = Vec::with_capacity(n_prec);
    for &c in &normalized.coeffs()[..n_prec] {
        if !f.in_prime_field(c) {
            return Err(CurveError::Consistency(
                "normalized function is not over F_p".into(),
            ));
        }
        coeffs.push(c);
    }
    Ok(OneUnit::new(TruncSeries::from_coeffs(&fp, n_prec, coeffs))?)
}

/// `<P_infinity>`: the `h`-th root of [`principal_one_unit`].
pub fn prime_character(
    host: &EllipticHost,
    pt: &ClosedPoint,
    n_prec: usize,
) -> Result<OneUnit, CurveError> {
    prime_character_with(host, pt, n_prec, MillerChain::default())
}

pub fn prime_character_with(
    host: &EllipticHost,
    pt: &ClosedPoint,
    n_prec: usize,
    chain: MillerChain,
) -> Result<OneUnit, CurveError> {
    let g = principal_one_unit(host, pt, n_prec, chain)?;
    let inv_h = PadicExponent::from_ratio(host.p, 1, host.h as i64)?;
    Ok(one_unit_pow(&g, &inv_h)?)
}

/// Number of closed points of each degree, keyed by degree.
pub fn census(points: &[ClosedPoint]) -> BTreeMap<u32, usize> {
    let mut out = BTreeMap::new();
    for pt in points {
        *out.entry(pt.degree()).or_insert(0) += 1;
    }
    out
}

/// `prod_P (1 - x^{deg P} <P>^y)^{-1}` modulo `(x^{D+1}, pi^N)`.
pub fn zeta_curve(
    host: &EllipticHost,
    y: &PadicExponent,
    x_deg: usize,
    n_prec: usize,
) -> Result<ZetaSeries, CurveError> {
    if !host.ordinary {
        return Err(CurveError::Supersingular);
    }
    let fp = GaloisField::new(host.p, 1)?;
    let mut zeta: Vec<TruncSeries> = (0..=x_deg)
        .map(|d| {
            if d == 0 {
                TruncSeries::one(&fp, n_prec)
            } else {
                TruncSeries::zero(&fp, n_prec)
            }
        })
        .collect();
    if x_deg == 0 {
        return Ok(ZetaSeries::new(zeta, n_prec));
    }
    for pt in closed_points_up_to(host, x_deg as u32)? {
        let k = pt.degree() as usize;
        let chi = prime_character(host, &pt, n_prec)?;
        let chi_y = one_unit_pow(&chi, y)?.into_series();
        // multiply by 1 + chi x^k + chi^2 x^{2k} + ...
        let mut powers = vec![TruncSeries::one(&fp, n_prec)];
        for _ in 1..=x_deg / k {
            let next = powers.last().unwrap().mul_ref(&chi_y);
            powers.push(next);
        }
        let mut out = zeta.clone();
        for (d, slot) in out.iter_mut().enumerate() {
            for (j, pw) in powers.iter().enumerate().skip(1) {
                if j * k > d {
                    break;
                }
                slot.add_mul_assign(&zeta[d - j * k], pw);
            }
        }
        zeta = out;
    }
    Ok(ZetaSeries::new(zeta, n_prec))
}

/// Host report together with the computed polygon.
#[derive(Clone, Debug, Serialize)]
pub struct CurveReport {
    pub host: EllipticHost,
    pub polygon: NewtonPolygon,
    pub mod_pi: Vec<u32>,
    pub weil_mod_p: Vec<u32>,
}

pub fn curve_report(
    host: &EllipticHost,
    y: &PadicExponent,
    x_deg: usize,
    n_prec: usize,
) -> Result<CurveReport, CurveError> {
    let z = zeta_curve(host, y, x_deg, n_prec)?;
    Ok(CurveReport {
        host: host.clone(),
        polygon: z.newton_polygon(),
        mod_pi: z.mod_pi(),
        weil_mod_p: host.weil_zeta_mod_p(x_deg),
    })
}
