//! Frobenius series, the block-cyclic Dwork matrix and Fredholm
//! determinants of its finite truncations.
//!
//! Entries of the matrix are `a_{i, p m1 - m2}`, the `theta^n` coefficients
//! of `beta_i = prod_j (1 - pi^{q^j p^{i-1}} theta)^{y_{i,j}}`, reduced modulo
//! `pi^N`. Every coefficient is an element of `F_p[pi]/(pi^N)`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ff::{Elem, GaloisField};
use crate::padic::{DigitProfile, PadicError, PadicExponent};
use crate::series::{digits_needed, NewtonPolygon, SeriesError, TruncSeries, Valuation};

/// Largest matrix dimension [`fredholm_coeffs`] accepts.
pub const MAX_DIMENSION: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DworkError {
    #[error(transparent)]
    Exponent(#[from] PadicError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("component {component} needs {needed} base-q digits, the profile holds {available}")]
    DigitsExhausted {
        component: usize,
        needed: usize,
        available: usize,
    },
    #[error("matrix dimension {dim} exceeds the limit {limit}")]
    DimensionLimit { dim: usize, limit: usize },
    #[error("characteristic series did not stabilize up to truncation M = {last_m}")]
    NotStabilized {
        last_m: u64,
        partial: Box<CharSeries>,
    },
    #[error("coefficient c_{degree} is nonzero although {block} does not divide {degree}")]
    NotBlockCyclic { degree: usize, block: u32 },
}

/// `beta_i` modulo `pi^N`, a polynomial in `theta`.
#[derive(Clone, Debug)]
pub struct BetaSeries {
    i: usize,
    precision: usize,
    coeffs: Vec<TruncSeries>,
}

impl BetaSeries {
    pub fn component(&self) -> usize {
        self.i
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    /// Degree in `theta` of the truncated product.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `a_{i,n}`, or `None` when it vanishes (including `n < 0`).
    pub fn coeff(&self, n: i64) -> Option<&TruncSeries> {
        if n < 0 {
            return None;
        }
        self.coeffs.get(n as usize).filter(|c| !c.is_zero())
    }

    pub fn valuation(&self, n: i64) -> Valuation {
        if n < 0 {
            return Valuation::Infinite;
        }
        match self.coeffs.get(n as usize) {
            Some(c) => c.valuation(),
            None => Valuation::AtLeast(self.precision as u64),
        }
    }

    /// Largest `n` with `a_{i,n} != 0 mod pi^N`.
    pub fn live_degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }
}

fn prime_field(p: u32) -> Arc<GaloisField> {
    GaloisField::new(p, 1).expect("profile prime is a valid field characteristic")
}

fn binomial_mod(n: u32, k: u32, p: u32) -> u32 {
    // n < p, so the ordinary binomial is small enough
    let mut c: u64 = 1;
    for t in 0..k {
        c = c * (n - t) as u64 / (t + 1) as u64;
    }
    (c % p as u64) as u32
}

/// Number of base-`q` digits of `y_i` that influence `beta_i` mod `pi^N`.
fn digits_for(profile: &DigitProfile, i: usize, n_prec: usize) -> usize {
    let base = (profile.p() as u128).pow(i as u32 - 1);
    let mut j = 0;
    let mut e = base;
    while e < n_prec as u128 {
        j += 1;
        e = e.saturating_mul(profile.q() as u128);
    }
    j
}

/// The number of base-`q` digits per component a profile needs so that
/// every `beta_i` is determined modulo `pi^N`.
pub fn digits_for_precision(q: u64, n_prec: usize) -> usize {
    digits_needed(q.min(u32::MAX as u64) as u32, n_prec).max(1)
}

/// A profile deep enough for [`build_beta`] at precision `N`.
pub fn profile_for_precision(
    y: &PadicExponent,
    b: u32,
    n_prec: usize,
) -> Result<DigitProfile, PadicError> {
    let q = (y.p() as u64).pow(b);
    DigitProfile::decompose(y, b, digits_for_precision(q, n_prec))
}

pub fn build_beta(
    profile: &DigitProfile,
    i: usize,
    n_prec: usize,
) -> Result<BetaSeries, DworkError> {
    let p = profile.p();
    let f = prime_field(p);
    let needed = digits_for(profile, i, n_prec);
    let digits = profile.component_digits(i);
    if needed > digits.len() && !profile.is_complete(i) {
        return Err(DworkError::DigitsExhausted {
            component: i,
            needed,
            available: digits.len(),
        });
    }
    let mut poly = vec![TruncSeries::one(&f, n_prec)];
    let mut e = (p as usize).pow(i as u32 - 1);
    for j in 0..needed {
        let d = digits.get(j).copied().unwrap_or(0) as u32;
        if d > 0 {
            let mut next = vec![TruncSeries::zero(&f, n_prec); poly.len() + d as usize];
            for k in 0..=d {
                let sign = if k % 2 == 0 { 1 } else { p - 1 };
                let c = f.mul(Elem(binomial_mod(d, k, p)), Elem(sign % p));
                let shift = e * k as usize;
                if shift >= n_prec {
                    break;
                }
                for (n, a) in poly.iter().enumerate() {
                    let target = &mut next[n + k as usize];
                    for (t, &x) in a.coeffs()[..n_prec - shift].iter().enumerate() {
                        if !x.is_zero() {
                            let old = target.coeff(t + shift);
                            target.set_coeff(t + shift, f.add(old, f.mul(x, c)));
                        }
                    }
                }
            }
            poly = next;
        }
        e = e.saturating_mul(profile.q() as usize);
    }
    while poly.len() > 1 && poly.last().is_some_and(|c| c.is_zero()) {
        poly.pop();
    }
    Ok(BetaSeries {
        i,
        precision: n_prec,
        coeffs: poly,
    })
}

/// An index `(i, m)` of `J_1 = Z/bZ x Z_{>0}`, with `1 <= i <= b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexJ1 {
    pub i: usize,
    pub m: u64,
}

impl IndexJ1 {
    pub fn new(i: usize, m: u64) -> IndexJ1 {
        assert!(m >= 1, "indices of J_1 have m >= 1");
        IndexJ1 { i, m }
    }
}

impl fmt::Display for IndexJ1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.m)
    }
}

/// A square matrix over `F[pi]/(pi^N)` stored by sparse rows.
#[derive(Clone, Debug)]
pub struct SeriesMatrix {
    field: Arc<GaloisField>,
    precision: usize,
    rows: Vec<Vec<(usize, TruncSeries)>>,
}

impl SeriesMatrix {
    pub fn from_dense(
        field: &Arc<GaloisField>,
        precision: usize,
        rows: Vec<Vec<TruncSeries>>,
    ) -> Self {
        let dim = rows.len();
        let rows = rows
            .into_iter()
            .map(|r| {
                assert_eq!(r.len(), dim, "matrix must be square");
                r.into_iter()
                    .enumerate()
                    .filter(|(_, s)| !s.is_zero())
                    .map(|(c, s)| (c, s.truncate(precision.min(s.precision()))))
                    .collect()
            })
            .collect();
        SeriesMatrix {
            field: field.clone(),
            precision,
            rows,
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn entry(&self, r: usize, c: usize) -> TruncSeries {
        self.rows[r]
            .iter()
            .find(|(cc, _)| *cc == c)
            .map(|(_, s)| s.clone())
            .unwrap_or_else(|| TruncSeries::zero(&self.field, self.precision))
    }

    pub fn nonzeros(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

/// Coefficients `c_0 = 1, c_1, ..., c_K` of `det(1 - x A)` modulo `pi^N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharSeries {
    coeffs: Vec<TruncSeries>,
    precision: usize,
    block: u32,
    truncation: Option<u64>,
}

impl CharSeries {
    pub fn coeffs(&self) -> &[TruncSeries] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &TruncSeries {
        &self.coeffs[k]
    }

    /// Highest computed index `K`.
    pub fn max_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    /// `b` when the source is block cyclic, so `c_k = 0` for `b` not dividing `k`.
    pub fn block(&self) -> u32 {
        self.block
    }

    /// The truncation `M` the coefficients were read from.
    pub fn truncation(&self) -> Option<u64> {
        self.truncation
    }

    /// `(k, v(c_k))`, with the structural zeros reported as infinite.
    pub fn valuations(&self) -> Vec<(u64, Valuation)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let v = if k % self.block as usize != 0 && c.is_zero() {
                    Valuation::Infinite
                } else {
                    c.valuation()
                };
                (k as u64, v)
            })
            .collect()
    }

    /// Polygon in the variable `x` of the determinant.
    pub fn newton_polygon(&self) -> NewtonPolygon {
        NewtonPolygon::from_points(&self.valuations()).expect("c_0 = 1")
    }

    /// `n,v(c_n)` lines; `>=N` marks a coefficient that vanished mod `pi^N`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,valuation\n");
        for (k, v) in self.valuations() {
            out.push_str(&format!("{k},{v}\n"));
        }
        out
    }

    fn same_coefficients(&self, other: &CharSeries) -> bool {
        self.coeffs == other.coeffs
    }
}

/// The matrix with entries `a_{i(k1), p|k1| - |k2|}` on `J_1`.
#[derive(Clone, Debug)]
pub struct PsiMatrix {
    p: u32,
    b: u32,
    precision: usize,
    betas: Vec<BetaSeries>,
}

impl PsiMatrix {
    pub fn new(profile: &DigitProfile, n_prec: usize) -> Result<PsiMatrix, DworkError> {
        let betas = (1..=profile.b() as usize)
            .map(|i| build_beta(profile, i, n_prec))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PsiMatrix {
            p: profile.p(),
            b: profile.b(),
            precision: n_prec,
            betas,
        })
    }

    pub fn beta(&self, i: usize) -> &BetaSeries {
        &self.betas[i - 1]
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    fn linked(&self, k1: IndexJ1, k2: IndexJ1) -> bool {
        let b = self.b as usize;
        (k2.i % b) == (k1.i + b - 1) % b
    }

    pub fn entry(&self, k1: IndexJ1, k2: IndexJ1) -> TruncSeries {
        let f = prime_field(self.p);
        if !self.linked(k1, k2) {
            return TruncSeries::zero(&f, self.precision);
        }
        let n = self.p as i64 * k1.m as i64 - k2.m as i64;
        match self.beta(k1.i).coeff(n) {
            Some(s) => s.clone(),
            None => TruncSeries::zero(&f, self.precision),
        }
    }

    pub fn entry_valuation(&self, k1: IndexJ1, k2: IndexJ1) -> Valuation {
        if !self.linked(k1, k2) {
            return Valuation::Infinite;
        }
        self.beta(k1.i)
            .valuation(self.p as i64 * k1.m as i64 - k2.m as i64)
    }

    /// Every cycle of entries that are nonzero mod `pi^N` lives on indices
    /// with `m <= X/(p-1)`, where `X` is the largest live `theta` degree
    /// among the `beta_i`: an entry needs `p m1 - m2 <= X`, so leaving the
    /// largest index of a cycle forces `(p-1) m <= X`. Truncating at this
    /// bound therefore leaves `det(1 - x Psi) mod pi^N` unchanged.
    pub fn support_bound(&self) -> u64 {
        let x = self
            .betas
            .iter()
            .map(|b| b.live_degree())
            .max()
            .unwrap_or(0);
        x as u64 / (self.p as u64 - 1)
    }

    /// The finite matrix on the indices with `|k| <= m`, listed by `m`
    /// then `i`.
    pub fn truncate(&self, m: u64) -> (Vec<IndexJ1>, SeriesMatrix) {
        let b = self.b as usize;
        let index: Vec<IndexJ1> = (1..=m)
            .flat_map(|mm| (1..=b).map(move |i| IndexJ1::new(i, mm)))
            .collect();
        let pos = |k: IndexJ1| (k.m as usize - 1) * b + (k.i - 1);
        let rows = index
            .iter()
            .map(|&k1| {
                let beta = self.beta(k1.i);
                let i2 = if k1.i == 1 { b } else { k1.i - 1 };
                let top = self.p as u64 * k1.m;
                let lo = top.saturating_sub(beta.degree() as u64).max(1);
                (lo..=top.min(m))
                    .filter_map(|m2| {
                        let k2 = IndexJ1::new(i2, m2);
                        beta.coeff((top - m2) as i64).map(|s| (pos(k2), s.clone()))
                    })
                    .collect()
            })
            .collect();
        let mat = SeriesMatrix {
            field: prime_field(self.p),
            precision: self.precision,
            rows,
        };
        (index, mat)
    }
}

/// `c_0..c_K` of `det(1 - x A)` by Berkowitz's division-free recursion,
/// truncated to the first `K + 1` coefficients throughout.
pub fn fredholm_coeffs(a: &SeriesMatrix, k_max: usize) -> Result<CharSeries, DworkError> {
    let dim = a.dim();
    if dim > MAX_DIMENSION {
        return Err(DworkError::DimensionLimit {
            dim,
            limit: MAX_DIMENSION,
        });
    }
    let f = a.field();
    let n = a.precision();
    let zero = TruncSeries::zero(f, n);
    let mut poly = vec![TruncSeries::one(f, n)];
    for r in 0..dim {
        let tlen = (r + 2).min(k_max + 1);
        let mut t = Vec::with_capacity(tlen);
        t.push(TruncSeries::one(f, n));
        if tlen > 1 {
            t.push(a.entry(r, r).neg_ref());
        }
        if tlen > 2 {
            // v = column r of the leading r x r block
            let mut v = vec![zero.clone(); r];
            for (row, entries) in a.rows.iter().enumerate().take(r) {
                if let Some((_, s)) = entries.iter().find(|(c, _)| *c == r) {
                    v[row] = s.clone();
                }
            }
            for k in 2..tlen {
                let mut dot = zero.clone();
                for (c, s) in &a.rows[r] {
                    if *c < r && !v[*c].is_zero() {
                        dot.add_mul_assign(s, &v[*c]);
                    }
                }
                t.push(dot.neg_ref());
                if k + 1 < tlen {
                    let mut next = vec![zero.clone(); r];
                    for (row, entries) in a.rows.iter().enumerate().take(r) {
                        for (c, s) in entries {
                            if *c < r && !v[*c].is_zero() {
                                next[row].add_mul_assign(s, &v[*c]);
                            }
                        }
                    }
                    v = next;
                }
            }
        }
        let len = (poly.len() + 1).min(k_max + 1);
        let mut next = vec![zero.clone(); len];
        for (i, slot) in next.iter_mut().enumerate() {
            for (j, pj) in poly.iter().enumerate().take(i + 1) {
                if i - j < t.len() && !pj.is_zero() {
                    slot.add_mul_assign(&t[i - j], pj);
                }
            }
        }
        poly = next;
    }
    poly.resize(k_max + 1, zero);
    Ok(CharSeries {
        coeffs: poly,
        precision: n,
        block: 1,
        truncation: None,
    })
}

/// Doubling schedule for [`char_series_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stabilization {
    /// Starting truncation; `None` means `max(8, p n_max)`.
    pub initial: Option<u64>,
    pub max_doublings: u32,
}

impl Default for Stabilization {
    fn default() -> Self {
        Stabilization {
            initial: None,
            max_doublings: 6,
        }
    }
}

/// `c_0..c_{b n_max}` of `det(1 - x Psi)` modulo `pi^N`, stable under
/// doubling the truncation.
pub fn char_series_stabilized(
    profile: &DigitProfile,
    n_max: usize,
    n_prec: usize,
) -> Result<CharSeries, DworkError> {
    char_series_with(profile, n_max, n_prec, Stabilization::default())
}

pub fn char_series_with(
    profile: &DigitProfile,
    n_max: usize,
    n_prec: usize,
    schedule: Stabilization,
) -> Result<CharSeries, DworkError> {
    let psi = PsiMatrix::new(profile, n_prec)?;
    let b = profile.b();
    let k_max = b as usize * n_max;
    let bound = psi.support_bound();
    let at = |m: u64| -> Result<CharSeries, DworkError> {
        // indices beyond the support bound cannot contribute
        let (_, mat) = psi.truncate(m.min(bound));
        let mut cs = fredholm_coeffs(&mat, k_max)?;
        cs.block = b;
        cs.truncation = Some(m);
        Ok(cs)
    };
    let mut m = schedule
        .initial
        .unwrap_or_else(|| 8.max(profile.p() as u64 * n_max as u64));
    let mut prev = at(m)?;
    for _ in 0..schedule.max_doublings {
        m *= 2;
        let cur = at(m)?;
        if cur.same_coefficients(&prev) {
            return Ok(prev);
        }
        prev = cur;
    }
    Err(DworkError::NotStabilized {
        last_m: m,
        partial: Box::new(prev),
    })
}

/// The polygon of `zeta(X, y)` with `X = x^b`: slopes `nu_n` from the
/// points `(n, v(c_{bn}))`.
pub fn zeta_np_from_charseries(cs: &CharSeries, b: u32) -> Result<NewtonPolygon, DworkError> {
    let mut pts = Vec::new();
    for (k, c) in cs.coeffs().iter().enumerate() {
        if k % b as usize != 0 {
            if !c.is_zero() {
                return Err(DworkError::NotBlockCyclic {
                    degree: k,
                    block: b,
                });
            }
            continue;
        }
        pts.push(((k / b as usize) as u64, c.valuation()));
    }
    Ok(NewtonPolygon::from_points(&pts)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Slope;

    fn profile(y: i64, p: u32, b: u32) -> DigitProfile {
        let y = PadicExponent::from_int(p, y).unwrap();
        DigitProfile::decompose(&y, b, 24).unwrap()
    }

    #[test]
    fn beta_small_expansion() {
        let pr = profile(-1, 3, 1);
        let beta = build_beta(&pr, 1, 3).unwrap();
        let f = prime_field(3);
        // (1 - pi theta)^2 mod pi^3 = 1 + pi theta + pi^2 theta^2
        assert_eq!(
            beta.coeff(1).unwrap(),
            &TruncSeries::monomial(&f, 3, 1, Elem(1))
        );
        assert_eq!(
            beta.coeff(2).unwrap(),
            &TruncSeries::monomial(&f, 3, 2, Elem(1))
        );
        let beta = build_beta(&pr, 1, 16).unwrap();
        assert_eq!(beta.valuation(1), Valuation::Finite(1));
        assert_eq!(beta.valuation(2), Valuation::Finite(2));
        assert_eq!(beta.valuation(3), Valuation::Finite(5));
        assert_eq!(beta.valuation(-1), Valuation::Infinite);
        let zero = build_beta(&profile(0, 3, 1), 1, 16).unwrap();
        assert_eq!(zero.degree(), 0);
    }

    #[test]
    fn beta_needs_digits() {
        let y = PadicExponent::parse("digits:2:1,1,1,1", 2).unwrap();
        let pr = DigitProfile::decompose(&y, 1, 4).unwrap();
        assert!(build_beta(&pr, 1, 16).is_ok());
        assert!(matches!(
            build_beta(&pr, 1, 17),
            Err(DworkError::DigitsExhausted { needed: 5, .. })
        ));
    }

    #[test]
    fn psi_entries() {
        let pr = profile(-1, 3, 1);
        let psi = PsiMatrix::new(&pr, 32).unwrap();
        let k = IndexJ1::new(1, 1);
        assert_eq!(psi.entry_valuation(k, k), Valuation::Finite(2));
        assert_eq!(
            psi.entry_valuation(k, IndexJ1::new(1, 3)),
            Valuation::Finite(0)
        );
        assert_eq!(
            psi.entry_valuation(k, IndexJ1::new(1, 4)),
            Valuation::Infinite
        );
        let pr = profile(-1, 2, 2);
        let psi = PsiMatrix::new(&pr, 32).unwrap();
        assert_eq!(
            psi.entry_valuation(IndexJ1::new(1, 1), IndexJ1::new(1, 1)),
            Valuation::Infinite
        );
        assert!(psi.entry(IndexJ1::new(2, 1), IndexJ1::new(2, 1)).is_zero());
        assert_eq!(
            psi.entry_valuation(IndexJ1::new(2, 1), IndexJ1::new(1, 1)),
            Valuation::Finite(2)
        );
    }

    fn series(f: &Arc<GaloisField>, n: usize, c: &[u32]) -> TruncSeries {
        TruncSeries::from_coeffs(f, n, c.iter().map(|&x| Elem(x)).collect())
    }

    #[test]
    fn small_determinants() {
        let f = prime_field(5);
        let a = series(&f, 6, &[0, 2, 1]);
        let m = SeriesMatrix::from_dense(&f, 6, vec![vec![a.clone()]]);
        let cs = fredholm_coeffs(&m, 1).unwrap();
        assert_eq!(cs.coeff(1), &a.neg_ref());
        let b = series(&f, 6, &[3, 0, 4]);
        let z = TruncSeries::zero(&f, 6);
        let m =
            SeriesMatrix::from_dense(&f, 6, vec![vec![a.clone(), z.clone()], vec![z, b.clone()]]);
        let cs = fredholm_coeffs(&m, 2).unwrap();
        assert_eq!(cs.coeff(1), &(&a + &b).neg_ref());
        assert_eq!(cs.coeff(2), &(&a * &b));
        let empty = SeriesMatrix::from_dense(&f, 6, vec![]);
        let cs = fredholm_coeffs(&empty, 3).unwrap();
        assert!(cs.coeff(1).is_zero() && cs.coeff(3).is_zero());
    }

    #[test]
    fn affine_line_p3() {
        let pr = profile(-1, 3, 1);
        let cs = char_series_stabilized(&pr, 3, 24).unwrap();
        assert_eq!(cs.coeff(1).valuation(), Valuation::Finite(2));
        assert_eq!(cs.coeff(2).valuation(), Valuation::Finite(10));
        let np = zeta_np_from_charseries(&cs, 1).unwrap();
        assert_eq!(
            &np.slopes()[..2],
            &[Slope::integer(2, 1), Slope::integer(8, 1)]
        );
        assert_eq!(np.certified_through(), 2);
    }

    #[test]
    fn q4_block_structure() {
        let pr = profile(-1, 2, 2);
        let cs = char_series_stabilized(&pr, 2, 40).unwrap();
        assert!(cs.coeff(1).is_zero() && cs.coeff(3).is_zero());
        assert_eq!(cs.coeff(2).valuation(), Valuation::Finite(3));
        assert_eq!(cs.coeff(4).valuation(), Valuation::Finite(18));
        let np = zeta_np_from_charseries(&cs, 2).unwrap();
        assert_eq!(np.slopes()[0], Slope::integer(3, 1));
    }

    #[test]
    fn trivial_exponent() {
        let pr = profile(0, 3, 2);
        let cs = char_series_stabilized(&pr, 3, 20).unwrap();
        assert!(cs.coeffs()[1..].iter().all(TruncSeries::is_zero));
        let np = zeta_np_from_charseries(&cs, 2).unwrap();
        assert!(np.slopes().is_empty());
    }

    #[test]
    fn stabilization_budget() {
        let pr = profile(-1, 2, 1);
        let tight = Stabilization {
            initial: Some(1),
            max_doublings: 1,
        };
        match char_series_with(&pr, 3, 200, tight) {
            Err(DworkError::NotStabilized { last_m, .. }) => assert_eq!(last_m, 2),
            other => panic!("expected a budget failure, got {other:?}"),
        }
    }

    #[test]
    fn csv_dump() {
        let pr = profile(-1, 2, 2);
        let cs = char_series_stabilized(&pr, 1, 12).unwrap();
        assert_eq!(cs.to_csv(), "n,valuation\n0,0\n1,inf\n2,3\n");
    }

    /// `c_k = (-1)^k` times the sum of the `k x k` principal minors, each
    /// expanded over all permutations.
    fn leibniz(a: &[Vec<TruncSeries>], f: &Arc<GaloisField>, n: usize) -> Vec<TruncSeries> {
        let dim = a.len();
        let mut out = vec![TruncSeries::zero(f, n); dim + 1];
        for mask in 0u32..(1 << dim) {
            let s: Vec<usize> = (0..dim).filter(|i| mask >> i & 1 == 1).collect();
            let k = s.len();
            let mut perm: Vec<usize> = (0..k).collect();
            let mut minor = TruncSeries::zero(f, n);
            loop {
                let mut term = TruncSeries::one(f, n);
                for (r, &c) in perm.iter().enumerate() {
                    term = &term * &a[s[r]][s[c]];
                }
                let inversions = (0..k)
                    .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                    .filter(|&(i, j)| perm[i] > perm[j])
                    .count();
                minor = if (inversions + k).is_multiple_of(2) {
                    &minor + &term
                } else {
                    &minor - &term
                };
                if !next_permutation(&mut perm) {
                    break;
                }
            }
            out[k] = &out[k] + &minor;
        }
        out
    }

    fn next_permutation(v: &mut [usize]) -> bool {
        if v.len() < 2 {
            return false;
        }
        let mut i = v.len() - 1;
        while i > 0 && v[i - 1] >= v[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = v.len() - 1;
        while v[j] <= v[i - 1] {
            j -= 1;
        }
        v.swap(i - 1, j);
        v[i..].reverse();
        true
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn berkowitz_matches_leibniz(
            dim in 0usize..=5,
            raw in proptest::collection::vec(proptest::collection::vec(0u32..3, 5), 25),
            sparsity in 0u32..3,
        ) {
            let f = prime_field(3);
            let n = 5;
            let rows: Vec<Vec<TruncSeries>> = (0..dim)
                .map(|r| {
                    (0..dim)
                        .map(|c| {
                            let v = &raw[r * 5 + c];
                            if v[0] < sparsity {
                                TruncSeries::zero(&f, n)
                            } else {
                                series(&f, n, v)
                            }
                        })
                        .collect()
                })
                .collect();
            let expect = leibniz(&rows, &f, n);
            let m = SeriesMatrix::from_dense(&f, n, rows);
            let got = fredholm_coeffs(&m, dim).unwrap();
            prop_assert_eq!(got.coeffs(), &expect[..]);
        }
    }
}
