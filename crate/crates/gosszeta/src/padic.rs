//! p-adic exponents and their digit profiles.
//!
//! An exponent `y` in `Z_p` is split as `y = sum_{i=1}^b p^{i-1} y_i`
//! where `y_i` collects the base-`p` digits of `y` at positions
//! `i-1, i-1+b, i-1+2b, ...`. Read in base `q = p^b` those are the digits
//! `y_{i,j}` of `y_i`, and everything downstream only ever looks at their
//! partial sums:
//!
//! * `d_i(n) = p^{i-1} q^w` with `w` the least index whose partial digit sum
//!   reaches `n` (and `d_i(n) = 0` for `n < 1`);
//! * `y_i(m) = d_i(1) + ... + d_i(m)`.
//!
//! Values grow like `q^{n/(digit density)}`, so the exact accessors return
//! [`BigUint`]. Every table only covers the digits it was built from; a
//! query past that point fails with [`PadicError::Exhausted`].

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ff::is_prime;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PadicError {
    #[error("cannot parse exponent {0:?}; expected an integer, digits:p:d0,d1,... or ratio:a/c")]
    Parse(String),
    #[error("{0} is not a prime below 256")]
    BadPrime(u32),
    #[error("denominator {den} is divisible by p = {p}")]
    DenominatorDivisibleByP { den: i64, p: u32 },
    #[error("digit {digit} is out of range for p = {p}")]
    BadDigit { digit: u32, p: u32 },
    #[error("exponent was given in base {given} but base {wanted} is required")]
    BaseMismatch { given: u32, wanted: u32 },
    #[error(
        "insufficient digit precision: {needed} base-p digits required, {available} available"
    )]
    Precision { needed: usize, available: usize },
    #[error("digit sequence exhausted: component {component} is certified only up to {certified}, {requested} requested")]
    Exhausted {
        component: usize,
        requested: i64,
        certified: u64,
    },
    #[error("component index {0} out of range")]
    Component(usize),
}

/// An element of `Z_p`, either exact (a rational `a/c` with `p` not
/// dividing `c`, integers included) or a finite list of base-`p` digits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicExponent {
    p: u32,
    repr: Repr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
enum Repr {
    Ratio { num: i64, den: i64 },
    Digits(Vec<u8>),
}

fn inv_mod(a: i128, p: i128) -> i128 {
    // p is prime and small
    let a = a.rem_euclid(p);
    let mut r = 1i128;
    let mut base = a;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    r
}

impl PadicExponent {
    fn check_p(p: u32) -> Result<(), PadicError> {
        if is_prime(p) && p < 256 {
            Ok(())
        } else {
            Err(PadicError::BadPrime(p))
        }
    }

    pub fn from_int(p: u32, n: i64) -> Result<Self, PadicError> {
        Self::from_ratio(p, n, 1)
    }

    pub fn from_ratio(p: u32, num: i64, den: i64) -> Result<Self, PadicError> {
        Self::check_p(p)?;
        if den == 0 || den.rem_euclid(p as i64) == 0 {
            return Err(PadicError::DenominatorDivisibleByP { den, p });
        }
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = num_integer::gcd(num, den).max(1);
        Ok(PadicExponent {
            p,
            repr: Repr::Ratio {
                num: num / g,
                den: den / g,
            },
        })
    }

    pub fn from_digits(p: u32, digits: Vec<u8>) -> Result<Self, PadicError> {
        Self::check_p(p)?;
        if let Some(&d) = digits.iter().find(|&&d| d as u32 >= p) {
            return Err(PadicError::BadDigit { digit: d as u32, p });
        }
        Ok(PadicExponent {
            p,
            repr: Repr::Digits(digits),
        })
    }

    /// Parses the shared exponent grammar. Integer and ratio forms need the
    /// prime from context; the digit form carries its own and must agree.
    pub fn parse(s: &str, p: u32) -> Result<Self, PadicError> {
        let s = s.trim();
        let bad = || PadicError::Parse(s.to_string());
        if let Some(rest) = s.strip_prefix("digits:") {
            let (pp, ds) = rest.split_once(':').ok_or_else(bad)?;
            let pp: u32 = pp.trim().parse().map_err(|_| bad())?;
            if pp != p {
                return Err(PadicError::BaseMismatch {
                    given: pp,
                    wanted: p,
                });
            }
            let digits = if ds.trim().is_empty() {
                Vec::new()
            } else {
                ds.split(',')
                    .map(|d| d.trim().parse::<u8>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>, _>>()?
            };
            return Self::from_digits(p, digits);
        }
        if let Some(rest) = s.strip_prefix("ratio:") {
            let (a, c) = rest.split_once('/').ok_or_else(bad)?;
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let c: i64 = c.trim().parse().map_err(|_| bad())?;
            return Self::from_ratio(p, a, c);
        }
        let n: i64 = s.parse().map_err(|_| bad())?;
        Self::from_int(p, n)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// `None` for exact exponents, otherwise the number of known digits.
    pub fn precision(&self) -> Option<usize> {
        match &self.repr {
            Repr::Ratio { .. } => None,
            Repr::Digits(d) => Some(d.len()),
        }
    }

    pub fn ratio(&self) -> Option<(i64, i64)> {
        match self.repr {
            Repr::Ratio { num, den } => Some((num, den)),
            Repr::Digits(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Ratio { num, .. } => *num == 0,
            Repr::Digits(d) => d.iter().all(|&x| x == 0),
        }
    }

    /// The first `n` base-`p` digits.
    pub fn digits(&self, n: usize) -> Result<Vec<u8>, PadicError> {
        match &self.repr {
            Repr::Digits(d) => {
                if d.len() < n {
                    Err(PadicError::Precision {
                        needed: n,
                        available: d.len(),
                    })
                } else {
                    Ok(d[..n].to_vec())
                }
            }
            Repr::Ratio { num, den } => Ok(RatioDigits::new(self.p, *num, *den).take(n).collect()),
        }
    }

    /// `y mod p^k` as an integer in `[0, p^k)`.
    pub fn residue(&self, k: usize) -> Result<u128, PadicError> {
        let d = self.digits(k)?;
        let mut acc: u128 = 0;
        for &x in d.iter().rev() {
            acc = acc
                .checked_mul(self.p as u128)
                .and_then(|v| v.checked_add(x as u128))
                .expect("residue fits in u128");
        }
        Ok(acc)
    }

    /// Sum of two exponents. Exact if both are exact and the rational
    /// arithmetic fits in `i64`, otherwise a digit list at the smaller
    /// precision (64 digits for exact inputs).
    pub fn add(&self, other: &PadicExponent) -> Result<PadicExponent, PadicError> {
        if self.p != other.p {
            return Err(PadicError::BaseMismatch {
                given: other.p,
                wanted: self.p,
            });
        }
        if let (Some((a, c)), Some((b, d))) = (self.ratio(), other.ratio()) {
            let num = (a as i128) * (d as i128) + (b as i128) * (c as i128);
            let den = (c as i128) * (d as i128);
            let g = num_integer::gcd(num, den).max(1);
            if let (Ok(n), Ok(dd)) = (i64::try_from(num / g), i64::try_from(den / g)) {
                return Self::from_ratio(self.p, n, dd);
            }
        }
        let n = self
            .precision()
            .unwrap_or(64)
            .min(other.precision().unwrap_or(64));
        let (x, y) = (self.digits(n)?, other.digits(n)?);
        let mut carry = 0u32;
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let s = x[k] as u32 + y[k] as u32 + carry;
            out.push((s % self.p) as u8);
            carry = s / self.p;
        }
        Self::from_digits(self.p, out)
    }

    /// Exact exponents only: whether each of the `b` components has
    /// infinitely many nonzero digits.
    /// Also returns the length of the preperiod in base-`p` digits.
    fn exact_component_infinite(&self, b: usize) -> Option<(Vec<bool>, usize)> {
        let (num, den) = self.ratio()?;
        let mut it = RatioDigits::new(self.p, num, den);
        let mut seen: HashMap<(i128, usize), usize> = HashMap::new();
        let mut digits = Vec::new();
        let start = loop {
            let key = (it.a, digits.len() % b);
            if let Some(&k) = seen.get(&key) {
                break k;
            }
            seen.insert(key, digits.len());
            digits.push(it.next().expect("infinite"));
        };
        let mut inf = vec![false; b];
        for (pos, &d) in digits.iter().enumerate().skip(start) {
            if d != 0 {
                inf[pos % b] = true;
            }
        }
        Some((inf, start))
    }

    /// The descriptor accepted by [`PadicExponent::parse`].
    pub fn descriptor(&self) -> String {
        match &self.repr {
            Repr::Ratio { num, den: 1 } => format!("{num}"),
            Repr::Ratio { num, den } => format!("ratio:{num}/{den}"),
            Repr::Digits(d) => format!(
                "digits:{}:{}",
                self.p,
                d.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
        }
    }
}

impl fmt::Display for PadicExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

/// Digits of `a/c` via `d = a c^{-1} mod p`, `a <- (a - d c)/p`.
struct RatioDigits {
    p: i128,
    a: i128,
    c: i128,
    cinv: i128,
}

impl RatioDigits {
    fn new(p: u32, num: i64, den: i64) -> Self {
        let p = p as i128;
        RatioDigits {
            p,
            a: num as i128,
            c: den as i128,
            cinv: inv_mod(den as i128, p),
        }
    }
}

impl Iterator for RatioDigits {
    type Item = u8;
    fn next(&mut self) -> Option<u8> {
        let d = (self.a.rem_euclid(self.p) * self.cinv) % self.p;
        self.a = (self.a - d * self.c) / self.p;
        Some(d as u8)
    }
}

impl FromStr for PadicExponent {
    type Err = PadicError;
    /// Parses `digits:p:...` only; the other forms need a prime.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let p = s
            .strip_prefix("digits:")
            .and_then(|r| r.split_once(':'))
            .and_then(|(p, _)| p.parse().ok())
            .ok_or_else(|| PadicError::Parse(s.to_string()))?;
        Self::parse(s, p)
    }
}

/// Result of [`DigitProfile::is_q_full`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QFullness {
    pub q_full: bool,
    /// Set when the answer depends on digits that were never seen.
    pub caveat: bool,
}

#[derive(Clone, Debug)]
struct Component {
    digits: Vec<u8>,
    /// `cum[j] = y_{i,0} + ... + y_{i,j}`
    cum: Vec<u64>,
    /// `prefix[j] = sum_{j' < j} y_{i,j'} q^{j'}`, length `J + 1`
    prefix: Vec<BigUint>,
    qpow: Vec<BigUint>,
    prefix_sat: Vec<u128>,
    qpow_sat: Vec<u128>,
    /// Infinitely many nonzero digits (`Some`) or unknown (`None`).
    infinite: Option<bool>,
    /// Eventually zero and every nonzero digit is inside the window.
    complete: bool,
}

impl Component {
    fn new(digits: Vec<u8>, q: u64, infinite: Option<bool>) -> Component {
        let j = digits.len();
        let mut cum = Vec::with_capacity(j);
        let mut prefix = Vec::with_capacity(j + 1);
        let mut qpow = Vec::with_capacity(j + 1);
        let mut prefix_sat = Vec::with_capacity(j + 1);
        let mut qpow_sat = Vec::with_capacity(j + 1);
        let (mut s, mut pre, mut qp) = (0u64, BigUint::zero(), BigUint::one());
        let (mut pre_s, mut qp_s) = (0u128, 1u128);
        for &d in &digits {
            prefix.push(pre.clone());
            qpow.push(qp.clone());
            prefix_sat.push(pre_s);
            qpow_sat.push(qp_s);
            s += d as u64;
            cum.push(s);
            pre += &qp * d as u32;
            qp *= q;
            pre_s = pre_s.saturating_add(qp_s.saturating_mul(d as u128));
            qp_s = qp_s.saturating_mul(q as u128);
        }
        prefix.push(pre);
        qpow.push(qp);
        prefix_sat.push(pre_s);
        qpow_sat.push(qp_s);
        Component {
            digits,
            cum,
            prefix,
            qpow,
            prefix_sat,
            qpow_sat,
            infinite,
            complete: false,
        }
    }

    fn support(&self) -> u64 {
        self.cum.last().copied().unwrap_or(0)
    }

    /// Least `w` with `cum[w] >= n`, for `1 <= n <= support`.
    fn level(&self, n: u64) -> usize {
        self.cum.partition_point(|&s| s < n)
    }
}

/// The decomposition of `y` into `b` components with base-`q` digit arrays.
#[derive(Clone, Debug)]
pub struct DigitProfile {
    p: u32,
    b: u32,
    q: u64,
    y: PadicExponent,
    comps: Vec<Component>,
    scale: Vec<BigUint>,
}

/// Largest number of base-`q` digits per component a profile will hold.
pub const MAX_COMPONENT_DIGITS: usize = 1 << 14;

impl DigitProfile {
    /// Splits `y` into `b` components of `j` base-`q` digits each.
    pub fn decompose(y: &PadicExponent, b: u32, j: usize) -> Result<DigitProfile, PadicError> {
        assert!(b >= 1 && j >= 1, "b and J must be positive");
        let p = y.p();
        let q = (p as u64).pow(b);
        let digits = y.digits(b as usize * j)?;
        let exact = y.exact_component_infinite(b as usize);
        let comps = (0..b as usize)
            .map(|i| {
                let d: Vec<u8> = (0..j).map(|jj| digits[i + b as usize * jj]).collect();
                let inf = exact.as_ref().map(|(v, _)| v[i]);
                let mut c = Component::new(d, q, inf);
                c.complete = exact
                    .as_ref()
                    .is_some_and(|(v, start)| !v[i] && b as usize * j >= *start);
                c
            })
            .collect();
        let scale = (0..b).map(|i| BigUint::from(p).pow(i)).collect();
        Ok(DigitProfile {
            p,
            b,
            q,
            y: y.clone(),
            comps,
            scale,
        })
    }

    /// A profile certified for every `n <= n_cap` on each component whose
    /// digits allow it. Exact exponents get as many digits as needed (up to
    /// [`MAX_COMPONENT_DIGITS`]); digit lists use what they have.
    pub fn covering(y: &PadicExponent, b: u32, n_cap: u64) -> Result<DigitProfile, PadicError> {
        let avail = y.precision().map(|n| n / b as usize);
        if avail == Some(0) {
            return Err(PadicError::Precision {
                needed: b as usize,
                available: y.precision().unwrap_or(0),
            });
        }
        let mut j = 16usize.min(avail.unwrap_or(usize::MAX));
        loop {
            let prof = Self::decompose(y, b, j)?;
            let done = prof
                .comps
                .iter()
                .all(|c| c.support() >= n_cap || c.complete);
            let limit = avail.unwrap_or(MAX_COMPONENT_DIGITS);
            if done || j >= limit {
                return Ok(prof);
            }
            j = (2 * j).min(limit);
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    /// `q = p^b`.
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn exponent(&self) -> &PadicExponent {
        &self.y
    }

    /// Number of base-`q` digits held per component.
    pub fn precision(&self) -> usize {
        self.comps[0].digits.len()
    }

    /// Component digits `y_{i,0..J}` for `1 <= i <= b`.
    pub fn component_digits(&self, i: usize) -> &[u8] {
        &self.comps[i - 1].digits
    }

    /// Largest `n` for which `d_i(n)` is known.
    pub fn certified(&self, i: usize) -> u64 {
        self.comps[i - 1].support()
    }

    /// Whether every nonzero digit of component `i` lies inside the window.
    pub fn is_complete(&self, i: usize) -> bool {
        self.comps[i - 1].complete
    }

    /// Minimum of [`DigitProfile::certified`] over all components.
    pub fn certified_all(&self) -> u64 {
        (1..=self.b as usize)
            .map(|i| self.certified(i))
            .min()
            .unwrap_or(0)
    }

    /// `y = 0` or some component `y_i = 0`: the slope machinery is empty.
    pub fn is_degenerate(&self) -> bool {
        self.comps.iter().any(|c| c.component_is_zero())
    }

    /// Whether every component has infinitely many nonzero base-`q` digits.
    /// Exact exponents are decided from the periodic part of their
    /// expansion. For digit lists a component counts as eventually zero
    /// when the second half of its window is all zero, and the answer is
    /// flagged with a caveat.
    pub fn is_q_full(&self) -> QFullness {
        if self.y.ratio().is_some() {
            let q_full = self.comps.iter().all(|c| c.infinite == Some(true));
            return QFullness {
                q_full,
                caveat: false,
            };
        }
        let q_full = self.comps.iter().all(|c| {
            let h = c.digits.len() / 2;
            c.digits[h..].iter().any(|&d| d != 0)
        });
        QFullness {
            q_full,
            caveat: true,
        }
    }

    fn comp(&self, i: usize) -> Result<&Component, PadicError> {
        if i == 0 || i > self.b as usize {
            return Err(PadicError::Component(i));
        }
        Ok(&self.comps[i - 1])
    }

    fn exhausted(&self, i: usize, n: i64) -> PadicError {
        PadicError::Exhausted {
            component: i,
            requested: n,
            certified: self.comps[i - 1].support(),
        }
    }

    /// `d_i(n)`.
    pub fn d(&self, i: usize, n: i64) -> Result<BigUint, PadicError> {
        let c = self.comp(i)?;
        if n < 1 {
            return Ok(BigUint::zero());
        }
        if n as u64 > c.support() {
            return Err(self.exhausted(i, n));
        }
        let w = c.level(n as u64);
        Ok(&self.scale[i - 1] * &c.qpow[w])
    }

    /// The exponent `w` with `d_i(n) = p^{i-1} q^w`.
    pub fn d_level(&self, i: usize, n: i64) -> Result<usize, PadicError> {
        let c = self.comp(i)?;
        if n < 1 || n as u64 > c.support() {
            return Err(self.exhausted(i, n));
        }
        Ok(c.level(n as u64))
    }

    /// `y_i(m)`, zero for `m <= 0`.
    pub fn y_partial(&self, i: usize, m: i64) -> Result<BigUint, PadicError> {
        let c = self.comp(i)?;
        if m < 1 {
            return Ok(BigUint::zero());
        }
        if m as u64 > c.support() {
            return Err(self.exhausted(i, m));
        }
        let w = c.level(m as u64);
        let before = if w == 0 { 0 } else { c.cum[w - 1] };
        let v = &c.prefix[w] + &c.qpow[w] * (m as u64 - before);
        Ok(v * &self.scale[i - 1])
    }

    /// `y_i(m)` saturated at `u128::MAX`.
    pub fn y_partial_sat(&self, i: usize, m: i64) -> Result<u128, PadicError> {
        let c = self.comp(i)?;
        if m < 1 {
            return Ok(0);
        }
        if m as u64 > c.support() {
            return Err(self.exhausted(i, m));
        }
        let w = c.level(m as u64);
        let before = if w == 0 { 0 } else { c.cum[w - 1] };
        let scale = (self.p as u128).saturating_pow(i as u32 - 1);
        Ok(c.prefix_sat[w]
            .saturating_add(c.qpow_sat[w].saturating_mul((m as u64 - before) as u128))
            .saturating_mul(scale))
    }

    /// `y_i(m, k) = y_i(m + k) - y_i(m)`.
    pub fn y_window(&self, i: usize, m: i64, k: i64) -> Result<BigInt, PadicError> {
        let a = BigInt::from(self.y_partial(i, m + k)?);
        let b = BigInt::from(self.y_partial(i, m)?);
        Ok(a - b)
    }

    /// Materialized `d_i(n)` and `y_i(m)` for `0 <= n, m <= upto`.
    pub fn table(&self, upto: u64) -> Result<PartialSumTable, PadicError> {
        let mut d = Vec::with_capacity(self.b as usize);
        let mut y = Vec::with_capacity(self.b as usize);
        for i in 1..=self.b as usize {
            let mut di = Vec::with_capacity(upto as usize + 1);
            let mut yi = Vec::with_capacity(upto as usize + 1);
            let mut acc = BigUint::zero();
            for n in 0..=upto as i64 {
                let v = self.d(i, n)?;
                acc += &v;
                di.push(v);
                yi.push(acc.clone());
            }
            d.push(di);
            y.push(yi);
        }
        Ok(PartialSumTable { upto, d, y })
    }

    /// `sum_i p^{i-1} sum_j y_{i,j} q^j mod p^{bJ}`, which must equal `y`.
    pub fn recompose(&self) -> BigUint {
        let mut acc = BigUint::zero();
        for (i, c) in self.comps.iter().enumerate() {
            acc += &c.prefix[c.digits.len()] * &self.scale[i];
        }
        acc
    }

    pub fn descriptor(&self) -> String {
        self.y.descriptor()
    }
}

impl Component {
    fn component_is_zero(&self) -> bool {
        match self.infinite {
            Some(true) => false,
            _ => self.digits.iter().all(|&d| d == 0),
        }
    }
}

/// `d_i(n)` and `y_i(m)` for every component up to a common bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialSumTable {
    pub upto: u64,
    /// `d[i-1][n]`
    pub d: Vec<Vec<BigUint>>,
    /// `y[i-1][m]`
    pub y: Vec<Vec<BigUint>>,
}

/// Samples a random `q`-full exponent: an exact rational `a/c` with
/// `|a| <= 10^4` and `1 <= c <= 60` prime to `p`, rejected unless every
/// component is infinite and has at least one nonzero digit in each block of
/// eight. The density guard keeps digit tables a manageable size.
pub fn random_q_full<R: Rng + ?Sized>(rng: &mut R, p: u32, b: u32) -> PadicExponent {
    loop {
        let c = rng.gen_range(1..=60i64);
        if c % p as i64 == 0 {
            continue;
        }
        let a = rng.gen_range(-10_000..=10_000i64);
        let y = PadicExponent::from_ratio(p, a, c).expect("valid ratio");
        if let Ok(prof) = DigitProfile::decompose(&y, b, 64) {
            if !prof.is_q_full().q_full {
                continue;
            }
            let dense = prof
                .comps
                .iter()
                .all(|c| c.digits.chunks(8).all(|w| w.iter().any(|&d| d != 0)));
            if dense {
                return y;
            }
        }
    }
}
