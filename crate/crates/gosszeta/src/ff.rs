//! Finite fields `F_{p^m}`, polynomials over them, and enumeration of monic
//! polynomials and Frobenius orbits.
//!
//! A field is identified by `(p, m)`: the modulus is always the
//! lexicographically smallest monic irreducible polynomial of degree `m`
//! (coefficients compared from the constant term up), so two fields built
//! from the same pair are interchangeable.
//!
//! Elements are plain [`Elem`] handles whose integer encodes the coefficient
//! vector `c_0 + c_1 p + ... + c_{m-1} p^{m-1}` of the residue polynomial.
//! In particular the prime subfield is exactly the encodings below `p`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

const ADD_TABLE_LIMIT: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of order {p}^{m} exceeds the supported maximum {MAX_ORDER}")]
    TooLarge { p: u32, m: u32 },
    #[error("cannot combine an element of F_{left} with an element of F_{right}")]
    Mismatch { left: u64, right: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("F_{small} does not embed in F_{big}")]
    NoEmbedding { small: u64, big: u64 },
    #[error("polynomial is not monic")]
    NotMonic,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// An element of some [`GaloisField`]. Carries no field reference; see
/// [`FieldElem`] for the checked variant.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub struct GaloisField {
    p: u32,
    m: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    add: Option<Vec<u32>>,
    neg: Vec<u32>,
}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaloisField")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m
    }
}
impl Eq for GaloisField {}

// Schoolbook arithmetic on digit vectors, used only while the tables are
// being built.
fn digits_of(mut x: u32, p: u32, m: u32) -> Vec<u32> {
    let mut d = Vec::with_capacity(m as usize);
    for _ in 0..m {
        d.push(x % p);
        x /= p;
    }
    d
}

fn encode(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn slow_mul(a: u32, b: u32, p: u32, modulus: &[u32]) -> u32 {
    let m = modulus.len() - 1;
    let da = digits_of(a, p, m as u32);
    let db = digits_of(b, p, m as u32);
    let mut prod = vec![0u64; 2 * m];
    for i in 0..m {
        for j in 0..m {
            prod[i + j] = (prod[i + j] + da[i] as u64 * db[j] as u64) % p as u64;
        }
    }
    for k in (m..2 * m).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (i, &mi) in modulus.iter().enumerate().take(m) {
            let idx = k - m + i;
            prod[idx] = (prod[idx] + (p as u64 - c) * mi as u64) % p as u64;
        }
    }
    let d: Vec<u32> = prod[..m].iter().map(|&c| c as u32).collect();
    encode(&d, p)
}

fn slow_pow(mut a: u32, mut e: u64, p: u32, modulus: &[u32]) -> u32 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = slow_mul(r, a, p, modulus);
        }
        a = slow_mul(a, a, p, modulus);
        e >>= 1;
    }
    r
}

impl GaloisField {
    /// Builds `F_{p^m}` with the deterministic modulus.
    pub fn new(p: u32, m: u32) -> Result<Arc<GaloisField>, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if m == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let order = (p as u64).checked_pow(m).filter(|&q| q <= MAX_ORDER);
        let q = order.ok_or(FieldError::TooLarge { p, m })? as u32;
        let modulus = if m == 1 {
            vec![0, 1]
        } else {
            smallest_irreducible(p, m)
        };
        Ok(Arc::new(Self::with_modulus(p, m, q, modulus)))
    }

    fn with_modulus(p: u32, m: u32, q: u32, modulus: Vec<u32>) -> GaloisField {
        let neg: Vec<u32> = (0..q)
            .map(|x| {
                let d: Vec<u32> = digits_of(x, p, m).iter().map(|&c| (p - c) % p).collect();
                encode(&d, p)
            })
            .collect();
        let n = (q - 1) as u64;
        let factors = prime_factors(n);
        let gen = (1..q)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&l| slow_pow(g, n / l, p, &modulus) != 1)
            })
            .expect("multiplicative group is cyclic");
        let mut exp = Vec::with_capacity(2 * (q as usize - 1));
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for k in 0..(q - 1) {
            exp.push(x);
            log[x as usize] = k;
            x = slow_mul(x, gen, p, &modulus);
        }
        for k in 0..(q - 1) as usize {
            exp.push(exp[k]);
        }
        let add = (q <= ADD_TABLE_LIMIT).then(|| {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                let da = digits_of(a, p, m);
                for b in 0..q {
                    let db = digits_of(b, p, m);
                    let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                    t[(a * q + b) as usize] = encode(&s, p);
                }
            }
            t
        });
        GaloisField {
            p,
            m,
            q,
            modulus,
            exp,
            log,
            add,
            neg,
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Coefficients of the defining modulus, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn same_field(&self, other: &GaloisField) -> bool {
        self == other
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(Elem)
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.p as i64) as u32)
    }

    /// Builds an element from its coefficient vector (constant term first).
    pub fn from_coeffs(&self, c: &[u32]) -> Elem {
        assert!(c.len() <= self.m as usize);
        Elem(encode(
            &c.iter().map(|&x| x % self.p).collect::<Vec<_>>(),
            self.p,
        ))
    }

    pub fn coeffs(&self, x: Elem) -> Vec<u32> {
        digits_of(x.0, self.p, self.m)
    }

    pub fn in_prime_field(&self, x: Elem) -> bool {
        x.0 < self.p
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.m == 1 {
            let s = a.0 + b.0;
            return Elem(if s >= self.p { s - self.p } else { s });
        }
        match &self.add {
            Some(t) => Elem(t[(a.0 * self.q + b.0) as usize]),
            None => {
                let (mut x, mut y, mut r, mut place) = (a.0, b.0, 0u32, 1u32);
                while x > 0 || y > 0 {
                    r += ((x % self.p + y % self.p) % self.p) * place;
                    x /= self.p;
                    y /= self.p;
                    place *= self.p;
                }
                Elem(r)
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        if self.m == 1 {
            return Elem(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32);
        }
        let k = self.log[a.0 as usize] + self.log[b.0 as usize];
        Elem(self.exp[k as usize])
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let n = self.q - 1;
        let k = (n - self.log[a.0 as usize]) % n;
        Ok(Elem(self.exp[k as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.is_zero() {
            return Elem::ZERO;
        }
        let n = (self.q - 1) as u64;
        let k = (self.log[a.0 as usize] as u64 * (e % n)) % n;
        Elem(self.exp[k as usize])
    }

    /// `x^{p^k}`.
    pub fn frobenius_iter(&self, x: Elem, k: u32) -> Elem {
        if x.is_zero() {
            return x;
        }
        let n = (self.q - 1) as u64;
        let mut l = self.log[x.0 as usize] as u64;
        for _ in 0..(k % self.m) {
            l = l * self.p as u64 % n;
        }
        Elem(self.exp[l as usize])
    }

    /// `{x, x^p, x^{p^2}, ...}` without repetition.
    pub fn frobenius_orbit(&self, x: Elem) -> Vec<Elem> {
        let mut orbit = vec![x];
        let mut y = self.frobenius_iter(x, 1);
        while y != x {
            orbit.push(y);
            y = self.frobenius_iter(y, 1);
        }
        orbit
    }

    /// Square root, if one exists.
    pub fn sqrt(&self, a: Elem) -> Option<Elem> {
        if a.is_zero() {
            return Some(a);
        }
        if self.p == 2 {
            return Some(self.frobenius_iter(a, self.m - 1));
        }
        let l = self.log[a.0 as usize];
        l.is_multiple_of(2)
            .then(|| Elem(self.exp[(l / 2) as usize]))
    }

    /// A generator of the multiplicative group.
    pub fn generator(&self) -> Elem {
        Elem(self.exp[1.min(self.exp.len() - 1)])
    }
}

fn smallest_irreducible(p: u32, m: u32) -> Vec<u32> {
    let fp = GaloisField::new(p, 1).expect("prime field");
    let count = (p as u64).pow(m);
    for idx in 0..count {
        let poly = Poly::monic_from_index(&fp, m as usize, idx);
        if poly.is_irreducible(&fp) {
            return poly.coeffs.iter().map(|e| e.0).collect();
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// An element bundled with its field. Arithmetic between different fields
/// fails with [`FieldError::Mismatch`].
#[derive(Clone)]
pub struct FieldElem {
    field: Arc<GaloisField>,
    value: Elem,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}@F_{}", self.value, self.field.q)
    }
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_field(&other.field) && self.value == other.value
    }
}

impl FieldElem {
    pub fn new(field: &Arc<GaloisField>, value: Elem) -> FieldElem {
        assert!(value.0 < field.q, "element out of range");
        FieldElem {
            field: field.clone(),
            value,
        }
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn value(&self) -> Elem {
        self.value
    }

    fn check(&self, other: &FieldElem) -> Result<(), FieldError> {
        if self.field.same_field(&other.field) {
            Ok(())
        } else {
            Err(FieldError::Mismatch {
                left: self.field.q as u64,
                right: other.field.q as u64,
            })
        }
    }

    pub fn add(&self, other: &FieldElem) -> Result<FieldElem, FieldError> {
        self.check(other)?;
        Ok(FieldElem::new(
            &self.field,
            self.field.add(self.value, other.value),
        ))
    }

    pub fn sub(&self, other: &FieldElem) -> Result<FieldElem, FieldError> {
        self.check(other)?;
        Ok(FieldElem::new(
            &self.field,
            self.field.sub(self.value, other.value),
        ))
    }

    pub fn mul(&self, other: &FieldElem) -> Result<FieldElem, FieldError> {
        self.check(other)?;
        Ok(FieldElem::new(
            &self.field,
            self.field.mul(self.value, other.value),
        ))
    }

    pub fn div(&self, other: &FieldElem) -> Result<FieldElem, FieldError> {
        self.check(other)?;
        Ok(FieldElem::new(
            &self.field,
            self.field.div(self.value, other.value)?,
        ))
    }

    pub fn frobenius_iter(&self, k: u32) -> FieldElem {
        FieldElem::new(&self.field, self.field.frobenius_iter(self.value, k))
    }

    pub fn frobenius_orbit(&self) -> Vec<FieldElem> {
        self.field
            .frobenius_orbit(self.value)
            .into_iter()
            .map(|v| FieldElem::new(&self.field, v))
            .collect()
    }
}

/// The embedding `F_{p^a} -> F_{p^{ab}}` sending the generator `x` of the
/// small field to the smallest root of its modulus in the big field.
#[derive(Debug, Clone)]
pub struct Embedding {
    small: Arc<GaloisField>,
    big: Arc<GaloisField>,
    root: Elem,
}

impl Embedding {
    pub fn new(small: &Arc<GaloisField>, big: &Arc<GaloisField>) -> Result<Embedding, FieldError> {
        let err = FieldError::NoEmbedding {
            small: small.q as u64,
            big: big.q as u64,
        };
        if small.p != big.p || !big.m.is_multiple_of(small.m) {
            return Err(err);
        }
        let modulus = Poly::new(small.modulus.iter().map(|&c| Elem(c)).collect());
        let root = big
            .elements()
            .find(|&r| modulus.eval(big, r).is_zero())
            .ok_or(err)?;
        Ok(Embedding {
            small: small.clone(),
            big: big.clone(),
            root,
        })
    }

    pub fn apply(&self, x: Elem) -> Elem {
        let c = self.small.coeffs(x);
        let mut acc = Elem::ZERO;
        for &ci in c.iter().rev() {
            acc = self.big.add(self.big.mul(acc, self.root), Elem(ci));
        }
        acc
    }

    pub fn map(&self, x: &FieldElem) -> Result<FieldElem, FieldError> {
        if !x.field.same_field(&self.small) {
            return Err(FieldError::Mismatch {
                left: x.field.q as u64,
                right: self.small.q as u64,
            });
        }
        Ok(FieldElem::new(&self.big, self.apply(x.value)))
    }
}

/// Dense polynomial, constant term first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Elem>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<Elem>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Elem) -> Poly {
        Poly::new(vec![c])
    }

    pub fn one() -> Poly {
        Poly::constant(Elem::ONE)
    }

    /// `x^n`.
    pub fn monomial(n: usize) -> Poly {
        let mut c = vec![Elem::ZERO; n + 1];
        c[n] = Elem::ONE;
        Poly { coeffs: c }
    }

    /// `x - c`.
    pub fn linear(f: &GaloisField, c: Elem) -> Poly {
        Poly::new(vec![f.neg(c), Elem::ONE])
    }

    /// Parses `"x^2+1"`, `"t^2 + 2t + 1"` style input over a prime field.
    /// Any single letter may serve as the variable.
    pub fn parse(f: &GaloisField, s: &str) -> Option<Poly> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return None;
        }
        let mut coeffs: Vec<Elem> = Vec::new();
        let mut terms = Vec::new();
        let mut cur = String::new();
        for ch in s.chars() {
            if (ch == '+' || ch == '-') && !cur.is_empty() {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        for t in terms {
            let (sign, body) = match t.strip_prefix('-') {
                Some(b) => (-1i64, b.to_string()),
                None => (1, t.trim_start_matches('+').to_string()),
            };
            let var_pos = body.find(|c: char| c.is_ascii_alphabetic());
            let (c, e) = match var_pos {
                None => (body.parse::<i64>().ok()?, 0usize),
                Some(pos) => {
                    let cs = body[..pos].trim_end_matches('*');
                    let c = if cs.is_empty() { 1 } else { cs.parse().ok()? };
                    let rest = &body[pos + 1..];
                    let e = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^')?.parse().ok()?
                    };
                    (c, e)
                }
            };
            if coeffs.len() <= e {
                coeffs.resize(e + 1, Elem::ZERO);
            }
            coeffs[e] = f.add(coeffs[e], f.from_int(sign * c));
        }
        Some(Poly::new(coeffs))
    }

    fn monic_from_index(f: &GaloisField, d: usize, mut idx: u64) -> Poly {
        let q = f.q as u64;
        let mut c = Vec::with_capacity(d + 1);
        for _ in 0..d {
            c.push(Elem((idx % q) as u32));
            idx /= q;
        }
        c.push(Elem::ONE);
        Poly { coeffs: c }
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Elem {
        self.coeffs.last().copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Elem::ONE
    }

    pub fn add(&self, other: &Poly, f: &GaloisField) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| f.add(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly, f: &GaloisField) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| f.sub(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn scale(&self, c: Elem, f: &GaloisField) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly, f: &GaloisField) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Elem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = f.add(out[i + j], f.mul(a, b));
                }
            }
        }
        Poly::new(out)
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn divrem(&self, d: &Poly, f: &GaloisField) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead_inv = f.inv(d.leading()).expect("nonzero leading coefficient");
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Elem::ZERO; r.len() - dd];
        for k in (dd..r.len()).rev() {
            let c = f.mul(r[k], lead_inv);
            if c.is_zero() {
                continue;
            }
            quot[k - dd] = c;
            for (i, &di) in d.coeffs.iter().enumerate() {
                r[k - dd + i] = f.sub(r[k - dd + i], f.mul(c, di));
            }
        }
        (Poly::new(quot), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly, f: &GaloisField) -> Poly {
        self.divrem(d, f).1
    }

    pub fn monic(&self, f: &GaloisField) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(f.inv(self.leading()).expect("nonzero"), f)
    }

    pub fn gcd(&self, other: &Poly, f: &GaloisField) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn pow(&self, mut e: u64, f: &GaloisField) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, f);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, f);
            }
        }
        acc
    }

    pub fn pow_mod(&self, mut e: u64, m: &Poly, f: &GaloisField) -> Poly {
        let mut base = self.rem(m, f);
        let mut acc = Poly::one().rem(m, f);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, f).rem(m, f);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, f).rem(m, f);
            }
        }
        acc
    }

    /// Applies `c -> c^{p^k}` to every coefficient and `x -> x^{p^k}`, i.e.
    /// computes `self^{p^k}` in characteristic `p` without multiplying.
    pub fn frobenius_power(&self, k: u32, f: &GaloisField) -> Poly {
        let step = (f.p as usize).pow(k);
        if self.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Elem::ZERO; (self.coeffs.len() - 1) * step + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i * step] = f.frobenius_iter(c, k);
        }
        Poly::new(out)
    }

    pub fn eval(&self, f: &GaloisField, x: Elem) -> Elem {
        self.coeffs
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn roots(&self, f: &GaloisField) -> Vec<Elem> {
        f.elements()
            .filter(|&x| self.eval(f, x).is_zero())
            .collect()
    }

    /// Irreducibility over `f`: no factor of degree at most `deg/2`,
    /// checked through `gcd(x^{q^i} - x, self)`.
    pub fn is_irreducible(&self, f: &GaloisField) -> bool {
        let d = match self.degree() {
            None | Some(0) => return false,
            Some(d) => d,
        };
        if d == 1 {
            return true;
        }
        let x = Poly::monomial(1);
        let mut xq = x.clone();
        for _ in 1..=d / 2 {
            xq = xq.pow_mod(f.q as u64, self, f);
            let g = xq.sub(&x, f).gcd(self, f);
            if g.degree() != Some(0) {
                return false;
            }
        }
        true
    }

    /// Number of times `d` divides `self` (capped at `cap`; the zero
    /// polynomial returns `cap`).
    pub fn valuation_at(&self, d: &Poly, cap: usize, f: &GaloisField) -> usize {
        let mut cur = self.clone();
        for v in 0..cap {
            if cur.is_zero() {
                return cap;
            }
            let (quot, r) = cur.divrem(d, f);
            if !r.is_zero() {
                return v;
            }
            cur = quot;
        }
        cap
    }

    pub fn display(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            parts.push(match (c.0, i) {
                (_, 0) => format!("{}", c.0),
                (1, _) => mono,
                _ => format!("{}{}", c.0, mono),
            });
        }
        parts.join(" + ")
    }
}

/// All monic polynomials of a given degree, in a fixed order.
pub struct MonicPolys<'a> {
    field: &'a GaloisField,
    degree: usize,
    next: u64,
    end: u64,
}

impl Iterator for MonicPolys<'_> {
    type Item = Poly;

    fn next(&mut self) -> Option<Poly> {
        if self.next >= self.end {
            return None;
        }
        let p = Poly::monic_from_index(self.field, self.degree, self.next);
        self.next += 1;
        Some(p)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for MonicPolys<'_> {}

/// Exactly `q^d` monic polynomials of degree `d`, each once.
pub fn monic_polys(field: &GaloisField, d: usize) -> MonicPolys<'_> {
    let end = (field.q as u64)
        .checked_pow(d as u32)
        .expect("monic count overflows u64");
    MonicPolys {
        field,
        degree: d,
        next: 0,
        end,
    }
}
