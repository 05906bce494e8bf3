//! Rotational permutations of `J_1`, their `R`-values, the minimal
//! permutations `Sigma_n` and the slope sequence `nu_n`.
//!
//! A rotational `b`-cycle is stored by its coordinates `(m_1, ..., m_b)`: it
//! sends `(i, m_i)` to `(i - 1, m_{i-1})`, indices mod `b`, and its `R`-value
//! is `sum_i y_i(p m_i - m_{i-1})` with `y_i(x) = 0` for `x <= 0`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::dwork::IndexJ1;
use crate::padic::{DigitProfile, PadicError};
use crate::series::{NewtonPolygon, Slope};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MinpermError {
    #[error(transparent)]
    Exponent(#[from] PadicError),
    #[error("no b-cycle with coordinates >= {n} fits in the box {bounds:?}")]
    EmptyBox { n: u64, bounds: Vec<u64> },
    #[error("permutation is not rotational")]
    NotRotational,
    #[error("pairs do not form a bijection of the support")]
    NotBijection,
    #[error("theorem violated: {0}")]
    TheoremViolation(String),
    #[error("minimal permutation of size {n} did not stabilize up to box {last_box}")]
    NotStabilized { n: u64, last_box: u64 },
    #[error("enumeration needs {needed} candidates, limit is {limit}")]
    Budget { needed: u128, limit: u128 },
    #[error("minimal R-value exceeds the 128-bit range of the brute-force search")]
    Saturated,
}

/// `y_i(x)` for `0 <= x <= upto`; `None` marks an infinite value, which
/// happens past the last nonzero digit of a component that is a positive
/// integer (its `beta_i` is a polynomial).
#[derive(Clone, Debug)]
pub struct YTable {
    upto: u64,
    vals: Vec<Vec<Option<BigUint>>>,
}

impl YTable {
    /// Deepens the profile from its exponent when it is too shallow.
    pub fn new(profile: &DigitProfile, upto: u64) -> Result<YTable, MinpermError> {
        let b = profile.b() as usize;
        let enough =
            |pr: &DigitProfile| (1..=b).all(|i| pr.certified(i) >= upto || pr.is_complete(i));
        let deeper;
        let pr = if enough(profile) {
            profile
        } else {
            deeper = DigitProfile::covering(profile.exponent(), profile.b(), upto)?;
            &deeper
        };
        let mut vals = Vec::with_capacity(b);
        for i in 1..=b {
            let cert = pr.certified(i);
            let complete = pr.is_complete(i);
            let mut row = Vec::with_capacity(upto as usize + 1);
            let mut acc = BigUint::zero();
            row.push(Some(acc.clone()));
            for x in 1..=upto {
                if x > cert {
                    if complete {
                        row.push(None);
                        continue;
                    }
                    return Err(PadicError::Exhausted {
                        component: i,
                        requested: x as i64,
                        certified: cert,
                    }
                    .into());
                }
                acc += pr.d(i, x as i64)?;
                row.push(Some(acc.clone()));
            }
            vals.push(row);
        }
        Ok(YTable { upto, vals })
    }

    pub fn upto(&self) -> u64 {
        self.upto
    }

    /// `y_i(x)`, zero for `x <= 0`, `None` if infinite.
    pub fn get(&self, i: usize, x: i64) -> Option<&BigUint> {
        static ZERO: std::sync::OnceLock<BigUint> = std::sync::OnceLock::new();
        if x <= 0 {
            return Some(ZERO.get_or_init(BigUint::zero));
        }
        assert!(x as u64 <= self.upto, "y table queried beyond its range");
        self.vals[i - 1][x as usize].as_ref()
    }

    fn get_sat(&self, i: usize, x: i64) -> u128 {
        match self.get(i, x) {
            Some(v) => v.to_u128().unwrap_or(u128::MAX),
            None => u128::MAX,
        }
    }
}

/// A rotational `b`-cycle by coordinates `(m_1, ..., m_b)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BCycle(Vec<u64>);

impl BCycle {
    pub fn new(coords: Vec<u64>) -> BCycle {
        assert!(!coords.is_empty(), "a b-cycle needs b >= 1 coordinates");
        assert!(coords.iter().all(|&m| m >= 1), "coordinates are positive");
        BCycle(coords)
    }

    pub fn diagonal(b: usize, n: u64) -> BCycle {
        BCycle::new(vec![n; b])
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn b(&self) -> usize {
        self.0.len()
    }

    /// `m_i` for `i` in `Z/bZ`, 1-based.
    pub fn m(&self, i: i64) -> u64 {
        let b = self.0.len() as i64;
        self.0[((i - 1).rem_euclid(b)) as usize]
    }

    /// `m_{i-1} <= p m_i` for every `i`, i.e. every entry of the cycle has
    /// finite valuation.
    pub fn is_p_bounded(&self, p: u32) -> bool {
        let b = self.b() as i64;
        (1..=b).all(|i| self.m(i - 1) <= p as u64 * self.m(i))
    }

    pub fn r_value(&self, t: &YTable, p: u32) -> Option<BigUint> {
        let mut acc = BigUint::zero();
        for i in 1..=self.b() as i64 {
            let x = p as i64 * self.m(i) as i64 - self.m(i - 1) as i64;
            acc += t.get(i as usize, x)?;
        }
        Some(acc)
    }

    /// Componentwise `<=`.
    pub fn le(&self, other: &BCycle) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// No shared index: every coordinate differs.
    pub fn disjoint(&self, other: &BCycle) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a != b)
    }

    /// Projection onto a `p`-bounded cycle below `self`: start at the
    /// first minimal coordinate `c` and set `n_c = m_c`,
    /// `n_{c-j} = min(p n_{c-j+1}, m_{c-j})`.
    pub fn p_map(&self, p: u32) -> BCycle {
        let b = self.b();
        let c = (0..b).min_by_key(|&j| (self.0[j], j)).unwrap();
        let mut out = self.0.clone();
        for j in 1..b {
            let idx = (c + b - j) % b;
            let prev = out[(idx + 1) % b];
            out[idx] = (p as u64 * prev).min(self.0[idx]);
        }
        BCycle(out)
    }

    pub fn minus_one(&self) -> Vec<u64> {
        self.0.iter().map(|m| m - 1).collect()
    }

    /// The pairs `(k, sigma(k))` of the cycle.
    pub fn pairs(&self) -> Vec<(IndexJ1, IndexJ1)> {
        let b = self.b() as i64;
        (1..=b)
            .map(|i| {
                let prev = if i == 1 { b } else { i - 1 };
                (
                    IndexJ1::new(i as usize, self.m(i)),
                    IndexJ1::new(prev as usize, self.m(i - 1)),
                )
            })
            .collect()
    }
}

impl fmt::Display for BCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "({})", s.join(","))
    }
}

/// A finite bijection `sigma` of a support `S` in `J_1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EnrichedPermutation {
    map: BTreeMap<IndexJ1, IndexJ1>,
}

impl EnrichedPermutation {
    pub fn new(pairs: impl IntoIterator<Item = (IndexJ1, IndexJ1)>) -> Result<Self, MinpermError> {
        let mut map = BTreeMap::new();
        for (k, v) in pairs {
            if map.insert(k, v).is_some() {
                return Err(MinpermError::NotBijection);
            }
        }
        let mut images: Vec<IndexJ1> = map.values().copied().collect();
        images.sort();
        let support: Vec<IndexJ1> = map.keys().copied().collect();
        if images != support {
            return Err(MinpermError::NotBijection);
        }
        Ok(EnrichedPermutation { map })
    }

    pub fn empty() -> Self {
        EnrichedPermutation {
            map: BTreeMap::new(),
        }
    }

    pub fn from_cycles(cycles: &[BCycle]) -> Result<Self, MinpermError> {
        Self::new(cycles.iter().flat_map(BCycle::pairs))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (IndexJ1, IndexJ1)> + '_ {
        self.map.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn image(&self, k: IndexJ1) -> Option<IndexJ1> {
        self.map.get(&k).copied()
    }

    pub fn is_rotational(&self, b: usize) -> bool {
        self.pairs()
            .all(|(k, v)| v.i == if k.i == 1 { b } else { k.i - 1 })
    }

    /// `|S| / b` for rotational permutations.
    pub fn size(&self, b: usize) -> Option<usize> {
        self.is_rotational(b).then(|| self.len() / b)
    }

    /// `|sigma(k)| <= p |k|` for every `k`: all entries have finite valuation.
    pub fn is_p_bounded(&self, p: u32) -> bool {
        self.pairs().all(|(k, v)| v.m <= p as u64 * k.m)
    }

    /// Cycle decomposition, each cycle starting at its least index.
    pub fn cycles(&self) -> Vec<Vec<IndexJ1>> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.map.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut cyc = vec![start];
            seen.insert(start);
            let mut k = self.map[&start];
            while k != start {
                cyc.push(k);
                seen.insert(k);
                k = self.map[&k];
            }
            out.push(cyc);
        }
        out
    }

    /// The `b`-cycles of a decomposable rotational permutation, sorted.
    pub fn b_cycles(&self, b: usize) -> Option<Vec<BCycle>> {
        if !self.is_rotational(b) {
            return None;
        }
        let mut out = Vec::new();
        for cyc in self.cycles() {
            if cyc.len() != b {
                return None;
            }
            let mut coords = vec![0; b];
            for k in cyc {
                coords[k.i - 1] = k.m;
            }
            out.push(BCycle(coords));
        }
        out.sort();
        Some(out)
    }

    pub fn is_decomposable(&self, b: usize) -> bool {
        self.b_cycles(b).is_some()
    }

    /// A product of `b`-cycles forming a chain `sigma_1 <= ... <= sigma_n`.
    pub fn is_lexicographical(&self, b: usize) -> bool {
        match self.b_cycles(b) {
            Some(cs) => cs.windows(2).all(|w| w[0].le(&w[1])),
            None => false,
        }
    }

    fn r_value_table(&self, t: &YTable, p: u32) -> Option<BigUint> {
        let mut acc = BigUint::zero();
        for (k, v) in self.pairs() {
            acc += t.get(k.i, p as i64 * k.m as i64 - v.m as i64)?;
        }
        Some(acc)
    }
}

/// `sum_k y_{i(k)}(p|k| - |sigma(k)|)`; `None` if some term is infinite.
pub fn r_value(
    profile: &DigitProfile,
    sigma: &EnrichedPermutation,
) -> Result<Option<BigUint>, MinpermError> {
    let b = profile.b() as usize;
    if !sigma.is_rotational(b) {
        return Err(MinpermError::NotRotational);
    }
    let p = profile.p();
    let upto = sigma
        .pairs()
        .map(|(k, _)| p as u64 * k.m)
        .max()
        .unwrap_or(0);
    let t = YTable::new(profile, upto)?;
    Ok(sigma.r_value_table(&t, p))
}

struct StarSearch<'a> {
    t: &'a YTable,
    p: u64,
    n: u64,
    bounds: &'a [u64],
    cur: Vec<u64>,
    best: Option<(BigUint, Vec<u64>)>,
    tie: Option<Vec<u64>>,
}

impl StarSearch<'_> {
    fn term(&self, j: usize) -> Option<&BigUint> {
        // term for component j + 1: y_{j+1}(p m_{j+1} - m_j)
        let b = self.cur.len();
        let prev = self.cur[(j + b - 1) % b];
        self.t
            .get(j + 1, self.p as i64 * self.cur[j] as i64 - prev as i64)
    }

    fn visit(&mut self, j: usize, partial: BigUint) {
        let b = self.cur.len();
        if let Some((best, _)) = &self.best {
            if &partial > best {
                return;
            }
        }
        if j + 1 == b {
            // the last coordinate was chosen first, close the cycle
            if self.cur[(b + b - 2) % b] > self.p * self.cur[b - 1] {
                return;
            }
            let Some(t) = self.term(b - 1) else { return };
            let total = partial + t;
            match &self.best {
                Some((best, _)) if &total > best => {}
                Some((best, _)) if &total == best => self.tie = Some(self.cur.clone()),
                _ => {
                    self.best = Some((total, self.cur.clone()));
                    self.tie = None;
                }
            }
            return;
        }
        let prev = self.cur[(j + b - 1) % b];
        let lo = self.n.max(prev.div_ceil(self.p));
        for m in lo..=self.bounds[j] {
            self.cur[j] = m;
            if let Some(t) = self.term(j) {
                let next = &partial + t;
                self.visit(j + 1, next);
            }
        }
    }
}

/// The `R`-minimal `b`-cycle with `n <= m_i <= bounds[i]`, searched among
/// `p`-bounded cycles. `Ok(None)` when every candidate has infinite
/// `R`-value.
pub fn sigma_star_table(
    t: &YTable,
    p: u32,
    n: u64,
    bounds: &[u64],
) -> Result<Option<(BCycle, BigUint)>, MinpermError> {
    let b = bounds.len();
    if n == 0 || bounds.iter().any(|&m| m < n) {
        return Err(MinpermError::EmptyBox {
            n,
            bounds: bounds.to_vec(),
        });
    }
    let mut s = StarSearch {
        t,
        p: p as u64,
        n,
        bounds,
        cur: vec![n; b],
        best: None,
        tie: None,
    };
    for last in n..=bounds[b - 1] {
        s.cur[b - 1] = last;
        s.visit(0, BigUint::zero());
    }
    if let Some(other) = s.tie {
        let (_, best) = s.best.as_ref().unwrap();
        return Err(MinpermError::TheoremViolation(format!(
            "p-bounded cycles {} and {} have equal R-value",
            BCycle(best.clone()),
            BCycle(other)
        )));
    }
    Ok(s.best.map(|(r, c)| (BCycle(c), r)))
}

/// `sigma_n^*` inside the box `bounds`.
pub fn sigma_star(
    profile: &DigitProfile,
    n: u64,
    bounds: &[u64],
) -> Result<Option<(BCycle, BigUint)>, MinpermError> {
    assert_eq!(
        bounds.len(),
        profile.b() as usize,
        "one bound per component"
    );
    let upto = profile.p() as u64 * bounds.iter().copied().max().unwrap_or(0);
    let t = YTable::new(profile, upto)?;
    sigma_star_table(&t, profile.p(), n, bounds)
}

/// `Sigma_n^*(m) = Sigma_{n-1}^*(sigma_n^*(m) - 1) sigma_n^*(m)`.
pub fn big_sigma_table(
    t: &YTable,
    p: u32,
    n: u64,
    bounds: &[u64],
) -> Result<Option<Vec<BCycle>>, MinpermError> {
    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    let Some((top, _)) = sigma_star_table(t, p, n, bounds)? else {
        return Ok(None);
    };
    let Some(mut rest) = big_sigma_table(t, p, n - 1, &top.minus_one())? else {
        return Ok(None);
    };
    rest.push(top);
    Ok(Some(rest))
}

/// Box growth for [`sigma_chain_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoxSchedule {
    /// Starting bound; `None` means `p (n + 2)`.
    pub initial: Option<u64>,
    pub max_doublings: u32,
}

impl Default for BoxSchedule {
    fn default() -> Self {
        BoxSchedule {
            initial: None,
            max_doublings: 6,
        }
    }
}

/// The minimal permutation of size `n`: its cycles in increasing order,
/// its `R`-value and the box it was found in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub cycles: Vec<BCycle>,
    #[serde(serialize_with = "ser_big")]
    pub r_value: BigUint,
    pub box_bound: u64,
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_big_vec<S: serde::Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

pub fn sigma_chain(profile: &DigitProfile, n: u64) -> Result<Option<Chain>, MinpermError> {
    sigma_chain_with(profile, n, BoxSchedule::default())
}

/// `Sigma_n` with the box doubled until the answer survives two
/// consecutive doublings. `Ok(None)` when no permutation of size `n` has
/// finite `R`-value.
pub fn sigma_chain_with(
    profile: &DigitProfile,
    n: u64,
    schedule: BoxSchedule,
) -> Result<Option<Chain>, MinpermError> {
    let b = profile.b() as usize;
    let p = profile.p();
    if n == 0 {
        return Ok(Some(Chain {
            cycles: Vec::new(),
            r_value: BigUint::zero(),
            box_bound: 0,
        }));
    }
    let mut bound = schedule.initial.unwrap_or(p as u64 * (n + 2)).max(n);
    let mut history: Vec<Option<Vec<BCycle>>> = Vec::new();
    for _ in 0..=schedule.max_doublings {
        let t = YTable::new(profile, p as u64 * bound)?;
        let found = big_sigma_table(&t, p, n, &vec![bound; b])?;
        history.push(found);
        let k = history.len();
        if k >= 3 && history[k - 1] == history[k - 2] && history[k - 2] == history[k - 3] {
            let Some(cycles) = history.pop().unwrap() else {
                return Ok(None);
            };
            let r_value = EnrichedPermutation::from_cycles(&cycles)
                .ok()
                .and_then(|s| s.r_value_table(&t, p))
                .ok_or_else(|| {
                    MinpermError::TheoremViolation("cycles of Sigma_n overlap".into())
                })?;
            return Ok(Some(Chain {
                cycles,
                r_value,
                box_bound: bound / 4,
            }));
        }
        bound *= 2;
    }
    Err(MinpermError::NotStabilized {
        n,
        last_box: bound / 2,
    })
}

/// `nu_1 < nu_2 < ...` together with `alpha_n = nu_n / (r - 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlopeSequence {
    pub r: u64,
    #[serde(serialize_with = "ser_big_vec")]
    pub nu: Vec<BigUint>,
    #[serde(serialize_with = "ser_big_vec")]
    pub alpha: Vec<BigUint>,
    /// Set when the sequence stopped before `n_max` because no larger
    /// permutation has finite valuation.
    pub finite: bool,
}

impl SlopeSequence {
    pub fn empty(r: u64) -> SlopeSequence {
        SlopeSequence {
            r,
            nu: Vec::new(),
            alpha: Vec::new(),
            finite: true,
        }
    }
}

pub fn nu_sequence(profile: &DigitProfile, n_max: u64) -> Result<SlopeSequence, MinpermError> {
    nu_sequence_with(profile, n_max, BoxSchedule::default())
}

pub fn nu_sequence_with(
    profile: &DigitProfile,
    n_max: u64,
    schedule: BoxSchedule,
) -> Result<SlopeSequence, MinpermError> {
    let r = profile.q();
    if profile.is_degenerate() {
        return Ok(SlopeSequence::empty(r));
    }
    let rm1 = BigUint::from(r - 1);
    let mut out = SlopeSequence::empty(r);
    out.finite = false;
    let mut prev_r = BigUint::zero();
    for n in 1..=n_max {
        let Some(chain) = sigma_chain_with(profile, n, schedule)? else {
            out.finite = true;
            break;
        };
        if chain.r_value < prev_r {
            return Err(MinpermError::TheoremViolation(format!(
                "R(Sigma_{n}) < R(Sigma_{})",
                n - 1
            )));
        }
        let nu = &chain.r_value - &prev_r;
        if let Some(last) = out.nu.last() {
            if &nu <= last {
                return Err(MinpermError::TheoremViolation(format!(
                    "nu_{n} = {nu} does not exceed nu_{} = {last}",
                    n - 1
                )));
            }
        }
        let (alpha, rem) = nu.div_rem(&rm1);
        if !rem.is_zero() {
            return Err(MinpermError::TheoremViolation(format!(
                "nu_{n} = {nu} is not divisible by r - 1 = {rm1}"
            )));
        }
        out.nu.push(nu);
        out.alpha.push(alpha);
        prev_r = chain.r_value;
    }
    Ok(out)
}

/// The real parts of zeros for a curve of genus `g` with `d = deg(infinity)`:
/// `g - 1 + d` zeros, then each `alpha_i (r - 1)` repeated `d` times.
pub fn predict_real_parts(
    profile: &DigitProfile,
    g: u64,
    d: u64,
    count: u64,
) -> Result<Vec<BigUint>, MinpermError> {
    assert!(d >= 1, "the degree of infinity is positive");
    let seq = nu_sequence(profile, count)?;
    Ok(real_parts_from(&seq, g, d))
}

/// The predicted polygon in `x`: each real part `r` becomes a slope `r / d`.
pub fn predicted_polygon(seq: &SlopeSequence, g: u64, d: u64) -> NewtonPolygon {
    let values: Vec<Slope> = real_parts_from(seq, g, d)
        .iter()
        .map(|r| Slope::new(r.try_into().expect("slope fits in i64"), d as i64, 1))
        .collect();
    let len = values.len() as u64;
    NewtonPolygon::from_sorted_values(&values, len)
}

pub fn real_parts_from(seq: &SlopeSequence, g: u64, d: u64) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero(); (g + d - 1) as usize];
    let rm1 = BigUint::from(seq.r - 1);
    for a in &seq.alpha {
        for _ in 0..d {
            out.push(a * &rm1);
        }
    }
    out
}

/// Largest number of candidate support tuples [`brute_force_min`] will
/// enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 50_000_000;

fn subsets(bound: u64, n: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(start: u64, bound: u64, n: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let need = (n - cur.len()) as u64;
        let mut m = start;
        while m + need - 1 <= bound {
            cur.push(m);
            rec(m + 1, bound, n, cur, out);
            cur.pop();
            m += 1;
        }
    }
    rec(1, bound, n, &mut cur, &mut out);
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut v = rest.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

/// Work estimate for [`brute_force_min`]: `C(bound, n)^b * b`.
pub fn brute_force_cost(b: usize, n: usize, bound: u64) -> u128 {
    binomial(bound, n as u64)
        .saturating_pow(b as u32)
        .saturating_mul(b as u128)
}

/// Every rotational permutation of size `n` supported on `|k| <= bound`
/// with least `R`-value. Pairs with `p|k| < |sigma(k)|` contribute zero,
/// as in the definition of `R`.
pub fn brute_force_min(
    profile: &DigitProfile,
    n: usize,
    bound: u64,
) -> Result<(BigUint, Vec<EnrichedPermutation>), MinpermError> {
    let b = profile.b() as usize;
    let p = profile.p();
    let needed = brute_force_cost(b, n, bound);
    if needed > BRUTE_FORCE_LIMIT {
        return Err(MinpermError::Budget {
            needed,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let t = YTable::new(profile, p as u64 * bound)?;
    let subs = subsets(bound, n);
    let perms = permutations(n);
    let ns = subs.len();
    // best[i][s * ns + u]: block i + 1 sends subset s onto subset u of block i
    let mut best: Vec<Vec<(u128, Vec<u32>)>> = Vec::with_capacity(b);
    for i in 1..=b {
        let mut tab = Vec::with_capacity(ns * ns);
        for s in &subs {
            for u in &subs {
                if b == 1 && !std::ptr::eq(s, u) {
                    tab.push((u128::MAX, Vec::new()));
                    continue;
                }
                let mut lo = u128::MAX;
                let mut who = Vec::new();
                for (pi, perm) in perms.iter().enumerate() {
                    let mut cost = 0u128;
                    for k in 0..n {
                        let x = p as i64 * s[k] as i64 - u[perm[k]] as i64;
                        cost = cost.saturating_add(t.get_sat(i, x));
                    }
                    if cost < lo {
                        lo = cost;
                        who.clear();
                    }
                    if cost == lo {
                        who.push(pi as u32);
                    }
                }
                tab.push((lo, who));
            }
        }
        best.push(tab);
    }
    // enumerate (s_1, ..., s_b); block i maps s_i onto s_{i-1}, s_0 = s_b
    let mut lo = u128::MAX;
    let mut winners: Vec<Vec<usize>> = Vec::new();
    let mut idx = vec![0usize; b];
    loop {
        let mut total = 0u128;
        for i in 0..b {
            let prev = idx[(i + b - 1) % b];
            total = total.saturating_add(best[i][idx[i] * ns + prev].0);
        }
        if total < lo {
            lo = total;
            winners.clear();
        }
        if total == lo {
            winners.push(idx.clone());
        }
        let mut j = 0;
        while j < b {
            idx[j] += 1;
            if idx[j] < ns {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == b {
            break;
        }
    }
    if lo == u128::MAX {
        return Err(MinpermError::Saturated);
    }
    let mut out = Vec::new();
    for w in winners {
        let choices: Vec<&Vec<u32>> = (0..b)
            .map(|i| &best[i][w[i] * ns + w[(i + b - 1) % b]].1)
            .collect();
        let mut pick = vec![0usize; b];
        loop {
            let mut pairs = Vec::with_capacity(n * b);
            for i in 0..b {
                let s = &subs[w[i]];
                let u = &subs[w[(i + b - 1) % b]];
                let perm = &perms[choices[i][pick[i]] as usize];
                let target_block = if i == 0 { b } else { i };
                for k in 0..n {
                    pairs.push((
                        IndexJ1::new(i + 1, s[k]),
                        IndexJ1::new(target_block, u[perm[k]]),
                    ));
                }
            }
            out.push(EnrichedPermutation::new(pairs)?);
            let mut j = 0;
            while j < b {
                pick[j] += 1;
                if pick[j] < choices[j].len() {
                    break;
                }
                pick[j] = 0;
                j += 1;
            }
            if j == b {
                break;
            }
        }
    }
    out.sort();
    out.dedup();
    Ok((BigUint::from(lo), out))
}

/// Which recursion the `p`-map uses; recorded in verification reports.
pub const P_MAP_VARIANT: &str = "n[c-j] = min(p*n[c-j+1], m[c-j])";

/// One line of a brute-force verification run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationRow {
    pub p: u32,
    pub b: u32,
    pub y: String,
    pub n: usize,
    pub minimizers: usize,
    pub r_min: String,
    pub matches_recurrence: bool,
    pub shape_ok: bool,
    pub p_map_variant: String,
}

impl VerificationRow {
    pub const CSV_HEADER: &'static str =
        "p,b,y,n,minimizers,r_min,matches_recurrence,shape_ok,p_map_variant";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},\"{}\"",
            self.p,
            self.b,
            self.y,
            self.n,
            self.minimizers,
            self.r_min,
            self.matches_recurrence,
            self.shape_ok,
            self.p_map_variant
        )
    }
}

/// Brute force at the box `p (n + 2)` compared against [`sigma_chain`].
/// `shape_ok` records that every minimizer is lexicographical,
/// decomposable and `p`-bounded.
pub fn verify(profile: &DigitProfile, n: usize) -> Result<VerificationRow, MinpermError> {
    let b = profile.b() as usize;
    let p = profile.p();
    if n == 0 {
        // only the empty permutation, with R = 0
        return Ok(VerificationRow {
            p,
            b: b as u32,
            y: profile.descriptor(),
            n,
            minimizers: 1,
            r_min: "0".into(),
            matches_recurrence: true,
            shape_ok: true,
            p_map_variant: P_MAP_VARIANT.to_string(),
        });
    }
    let bound = p as u64 * (n as u64 + 2);
    let (r_min, mins) = brute_force_min(profile, n, bound)?;
    let chain = sigma_chain(profile, n as u64)?;
    let matches = match (&chain, mins.as_slice()) {
        (Some(c), [only]) => {
            EnrichedPermutation::from_cycles(&c.cycles)? == *only && c.r_value == r_min
        }
        _ => false,
    };
    let shape_ok = mins
        .iter()
        .all(|s| s.is_lexicographical(b) && s.is_decomposable(b) && s.is_p_bounded(p));
    Ok(VerificationRow {
        p,
        b: b as u32,
        y: profile.descriptor(),
        n,
        minimizers: mins.len(),
        r_min: r_min.to_string(),
        matches_recurrence: matches,
        shape_ok,
        p_map_variant: P_MAP_VARIANT.to_string(),
    })
}
