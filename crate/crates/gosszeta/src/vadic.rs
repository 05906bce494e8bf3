//! The zeta function of `A = F_q[theta]` interpolated at a finite place `v`,
//! given by a monic irreducible `f`. Local arithmetic happens exactly in
//! `F_q[theta]/(f^N)`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::ff::{monic_polys, FieldError, GaloisField, Poly};
use crate::minperm::{nu_sequence, MinpermError};
use crate::padic::{DigitProfile, PadicError, PadicExponent};
use crate::series::{
    digits_needed, one_unit_pow_digits, NewtonPolygon, Slope, TruncSeries, Valuation,
};
use crate::zeta::{one_unit_of_monic, ZetaError, MONIC_LIMIT};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VadicError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Exponent(#[from] PadicError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Minperm(#[from] MinpermError),
    #[error("{0} is not monic irreducible")]
    NotIrreducible(String),
    #[error("element is divisible by the place")]
    NotUnit,
    #[error("Teichmuller iteration did not settle")]
    NoFixedPoint,
    #[error("{needed} monic polynomials exceed the limit {limit}")]
    Budget { needed: u64, limit: u64 },
    #[error("precision must be positive")]
    ZeroPrecision,
}

/// `O_v / pi_v^N` realised as `F_q[theta]/(f^N)`.
#[derive(Clone, PartialEq, Eq)]
pub struct LocalRing {
    field: Arc<GaloisField>,
    f: Poly,
    modulus: Poly,
    precision: usize,
}

impl fmt::Debug for LocalRing {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            fm,
            "F_{}[theta]/({})^{}",
            self.field.order(),
            self.f.display("theta"),
            self.precision
        )
    }
}

impl LocalRing {
    pub fn new(
        field: &Arc<GaloisField>,
        f: Poly,
        precision: usize,
    ) -> Result<Arc<LocalRing>, VadicError> {
        if precision == 0 {
            return Err(VadicError::ZeroPrecision);
        }
        if !f.is_monic() || !f.is_irreducible(field) {
            return Err(VadicError::NotIrreducible(f.display("theta")));
        }
        let modulus = f.pow(precision as u64, field);
        Ok(Arc::new(LocalRing {
            field: field.clone(),
            f,
            modulus,
            precision,
        }))
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    /// `d_v = deg f`.
    pub fn dv(&self) -> u32 {
        self.f.degree().expect("f is nonconstant") as u32
    }

    /// `r_v = q^{d_v}`.
    pub fn rv(&self) -> u64 {
        (self.field.order() as u64).pow(self.dv())
    }

    pub fn elem(self: &Arc<Self>, a: &Poly) -> LocalElem {
        LocalElem {
            ring: self.clone(),
            value: a.rem(&self.modulus, &self.field),
        }
    }

    pub fn one(self: &Arc<Self>) -> LocalElem {
        self.elem(&Poly::one())
    }
}

/// A residue class in [`LocalRing`].
#[derive(Clone, PartialEq, Eq)]
pub struct LocalElem {
    ring: Arc<LocalRing>,
    value: Poly,
}

impl fmt::Debug for LocalElem {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            fm,
            "{} mod ({})^{}",
            self.value.display("theta"),
            self.ring.f.display("theta"),
            self.ring.precision
        )
    }
}

impl LocalElem {
    pub fn ring(&self) -> &Arc<LocalRing> {
        &self.ring
    }

    /// The canonical representative, of degree below `N deg f`.
    pub fn value(&self) -> &Poly {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn add(&self, o: &LocalElem) -> LocalElem {
        self.with(self.value.add(&o.value, &self.ring.field))
    }

    pub fn sub(&self, o: &LocalElem) -> LocalElem {
        self.with(self.value.sub(&o.value, &self.ring.field))
    }

    pub fn mul(&self, o: &LocalElem) -> LocalElem {
        let r = &self.ring;
        self.with(self.value.mul(&o.value, &r.field).rem(&r.modulus, &r.field))
    }

    pub fn pow(&self, e: u64) -> LocalElem {
        let r = &self.ring;
        self.with(self.value.pow_mod(e, &r.modulus, &r.field))
    }

    /// `self^{p^k}`, through the Frobenius on coefficients.
    pub fn frobenius(&self, k: u32) -> LocalElem {
        let r = &self.ring;
        self.with(
            self.value
                .frobenius_power(k, &r.field)
                .rem(&r.modulus, &r.field),
        )
    }

    /// Number of factors of `f`, with `AtLeast(N)` for zero.
    pub fn valuation(&self) -> Valuation {
        let r = &self.ring;
        if self.value.is_zero() {
            return Valuation::AtLeast(r.precision as u64);
        }
        Valuation::Finite(self.value.valuation_at(&r.f, r.precision, &r.field) as u64)
    }

    pub fn is_unit(&self) -> bool {
        !self.value.rem(&self.ring.f, &self.ring.field).is_zero()
    }

    fn with(&self, value: Poly) -> LocalElem {
        LocalElem {
            ring: self.ring.clone(),
            value,
        }
    }
}

/// `a = omega * u` with `omega^{r_v} = omega` and `u = 1 mod f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TeichDecomp {
    pub omega: LocalElem,
    pub u: LocalElem,
}

pub fn teichmuller(a: &LocalElem) -> Result<TeichDecomp, VadicError> {
    if !a.is_unit() {
        return Err(VadicError::NotUnit);
    }
    let rv = a.ring.rv();
    let mut omega = a.clone();
    // the error term gains a factor r_v in its valuation each round
    for _ in 0..=a.ring.precision + 1 {
        let next = omega.pow(rv);
        if next == omega {
            let u = a.mul(&omega.pow(rv - 2));
            return Ok(TeichDecomp { omega, u });
        }
        omega = next;
    }
    Err(VadicError::NoFixedPoint)
}

/// `u^y` for a 1-unit `u`, as `prod_k (1 + t^{p^k})^{y_k}` with `t = u - 1`.
fn one_unit_pow_local(u: &LocalElem, digits: &[u8]) -> LocalElem {
    let one = u.ring.one();
    let t = u.sub(&one);
    let mut acc = one.clone();
    for (k, &d) in digits.iter().enumerate() {
        if d == 0 {
            continue;
        }
        let fk = one.add(&t.frobenius(k as u32));
        for _ in 0..d {
            acc = acc.mul(&fk);
        }
    }
    acc
}

/// `sum_d V_d x^d` with `V_d = sum_{a monic, deg d, f does not divide a} <a>_v^y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VadicZeta {
    ring: Arc<LocalRing>,
    coeffs: Vec<LocalElem>,
}

impl VadicZeta {
    pub fn ring(&self) -> &Arc<LocalRing> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[LocalElem] {
        &self.coeffs
    }

    pub fn valuations(&self) -> Vec<(u64, Valuation)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(d, c)| (d as u64, c.valuation()))
            .collect()
    }

    pub fn newton_polygon(&self) -> NewtonPolygon {
        NewtonPolygon::from_points(&self.valuations()).expect("V_0 = 1")
    }
}

fn check_budget(q: u64, d: usize) -> Result<(), VadicError> {
    let needed = q.checked_pow(d as u32).unwrap_or(u64::MAX);
    if needed > MONIC_LIMIT {
        return Err(VadicError::Budget {
            needed,
            limit: MONIC_LIMIT,
        });
    }
    Ok(())
}

/// The v-adic zeta function on the identity component, exact modulo
/// `(x^{D+1}, f^N)`. `f` is read over `F_{p^b}` with `p = y.p()`.
pub fn zeta_vadic(
    f: &Poly,
    b: u32,
    y: &PadicExponent,
    x_deg: usize,
    n_prec: usize,
) -> Result<VadicZeta, VadicError> {
    let field = GaloisField::new(y.p(), b)?;
    let ring = LocalRing::new(&field, f.clone(), n_prec)?;
    check_budget(field.order() as u64, x_deg)?;
    let digits = y.digits(digits_needed(y.p(), n_prec))?;
    let mut coeffs = Vec::with_capacity(x_deg + 1);
    for d in 0..=x_deg {
        let mut s = LocalElem {
            ring: ring.clone(),
            value: Poly::zero(),
        };
        for a in monic_polys(&field, d) {
            let a = ring.elem(&a);
            if !a.is_unit() {
                continue;
            }
            let td = teichmuller(&a)?;
            s = s.add(&one_unit_pow_local(&td.u, &digits));
        }
        coeffs.push(s);
    }
    Ok(VadicZeta { ring, coeffs })
}

/// `d_v` zero slopes, then each `alpha_{r_v, i} (r_v - 1) / d_v` with
/// multiplicity `d_v`, where the `alpha` come from the slope predictor run
/// over `F_{p^{b d_v}}`. These are the real parts of the zeros of the zeta
/// function of the coordinate ring of the curve minus `v`, divided by `d_v`.
pub fn vadic_predicted_slopes(
    dv: u32,
    b: u32,
    y: &PadicExponent,
    count: u64,
) -> Result<NewtonPolygon, VadicError> {
    assert!(dv >= 1, "d_v is positive");
    let profile = DigitProfile::covering(y, b * dv, 64.max(4 * count))?;
    let seq = nu_sequence(&profile, count)?;
    let mut values = vec![Slope::new(0, 1, dv as u64)];
    for nu in &seq.nu {
        let nu: i64 = nu.try_into().expect("slope fits in i64");
        values.push(Slope::new(nu, dv as i64, dv as u64));
    }
    let poly = NewtonPolygon::from_sorted_values(&values, 0);
    let len = poly.length();
    Ok(NewtonPolygon::from_sorted_values(&values, len))
}

/// Outcome of the `d_v = 1` comparison between the v-adic zeta function of
/// `F_q[theta]` at `theta = c` and the `infinity`-adic one of
/// `F_q[1/(theta - c)]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub q: u64,
    pub c: u32,
    pub x_degree: usize,
    pub precision: usize,
    pub equal: bool,
    /// Smallest `x`-degree where the two sides differ.
    pub first_mismatch: Option<usize>,
}

/// `a(pi + c)` truncated at `pi^N`.
fn shift_to_series(
    field: &Arc<GaloisField>,
    a: &Poly,
    c: crate::ff::Elem,
    n_prec: usize,
) -> TruncSeries {
    let step = Poly::new(vec![c, crate::ff::Elem::ONE]);
    let mut acc = Poly::zero();
    for &coef in a.coeffs().iter().rev() {
        acc = acc.mul(&step, field).add(&Poly::constant(coef), field);
    }
    let mut v = acc.coeffs().to_vec();
    v.truncate(n_prec);
    TruncSeries::from_coeffs(field, n_prec, v)
}

/// Checks `zeta_{A,v}(x, y) = (1 - x) zeta_{B,infinity}(x, y)` modulo
/// `(x^{D+1}, pi_v^N)` for `v = (theta - c)` and `B = F_q[theta']`,
/// `theta' = 1/(theta - c)`. The left side goes through the Teichmuller
/// decomposition in `F_q[theta]/((theta - c)^N)`; the right side through
/// one-units of monics in `theta'`.
pub fn comparison_check_dv1(
    p: u32,
    b: u32,
    c: crate::ff::Elem,
    y: &PadicExponent,
    x_deg: usize,
    n_prec: usize,
) -> Result<ComparisonReport, VadicError> {
    let field = GaloisField::new(p, b)?;
    let f = Poly::linear(&field, c);
    let lhs = zeta_vadic(&f, b, y, x_deg, n_prec)?;
    let digits = y.digits(digits_needed(p, n_prec))?;
    let mut rhs_raw = Vec::with_capacity(x_deg + 1);
    for d in 0..=x_deg {
        let mut s = TruncSeries::zero(&field, n_prec);
        for m in monic_polys(&field, d) {
            let u = one_unit_of_monic(&field, &m, n_prec)?;
            s = &s + one_unit_pow_digits(&u, &digits).series();
        }
        rhs_raw.push(s);
    }
    let mut first_mismatch = None;
    for d in 0..=x_deg {
        let rhs = if d == 0 {
            rhs_raw[0].clone()
        } else {
            &rhs_raw[d] - &rhs_raw[d - 1]
        };
        let l = shift_to_series(&field, lhs.coeffs[d].value(), c, n_prec);
        if l != rhs {
            first_mismatch = Some(d);
            break;
        }
    }
    Ok(ComparisonReport {
        q: field.order() as u64,
        c: c.0,
        x_degree: x_deg,
        precision: n_prec,
        equal: first_mismatch.is_none(),
        first_mismatch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Elem;
    use proptest::prelude::*;

    fn ring(p: u32, b: u32, f: &str, n: usize) -> Arc<LocalRing> {
        let field = GaloisField::new(p, b).unwrap();
        let f = Poly::parse(&field, f).unwrap();
        LocalRing::new(&field, f, n).unwrap()
    }

    #[test]
    fn teichmuller_examples() {
        let r = ring(3, 1, "t - 1", 6);
        let td = teichmuller(&r.elem(&Poly::monomial(1))).unwrap();
        assert_eq!(td.omega, r.one());
        assert_eq!(td.u.value(), &Poly::monomial(1));

        let c = r.elem(&Poly::constant(Elem(2)));
        let td = teichmuller(&c).unwrap();
        assert_eq!(td.omega, c);
        assert_eq!(td.u, r.one());

        let r = ring(3, 1, "t^2 + 1", 8);
        let a = r.elem(&Poly::monomial(1));
        let td = teichmuller(&a).unwrap();
        assert_eq!(td.omega.pow(9), td.omega);
        assert!(td.u.sub(&r.one()).valuation().lower_bound() >= 1);
        assert_eq!(td.omega.mul(&td.u), a);
        assert_ne!(td.omega, a);

        let zero = r.elem(&Poly::parse(r.field(), "t^2+1").unwrap());
        assert_eq!(teichmuller(&zero).unwrap_err(), VadicError::NotUnit);
    }

    #[test]
    fn rejects_reducible_place() {
        let field = GaloisField::new(3, 1).unwrap();
        let f = Poly::parse(&field, "t^2 - 1").unwrap();
        assert!(matches!(
            LocalRing::new(&field, f, 4),
            Err(VadicError::NotIrreducible(_))
        ));
    }

    #[test]
    fn slopes_at_theta() {
        let y = PadicExponent::from_int(3, -1).unwrap();
        let z = zeta_vadic(&Poly::monomial(1), 1, &y, 5, 30).unwrap();
        let np = z.newton_polygon();
        let pred = vadic_predicted_slopes(1, 1, &y, 4).unwrap();
        assert_eq!(
            &pred.slopes()[..3],
            &[
                Slope::integer(0, 1),
                Slope::integer(2, 1),
                Slope::integer(8, 1)
            ]
        );
        assert_eq!(
            np.certified_slopes(),
            &pred.slopes()[..np.certified_slopes().len()]
        );
        assert!(np.certified_through() >= 3);
    }

    #[test]
    fn slopes_at_degree_two_place() {
        let y = PadicExponent::from_int(3, -1).unwrap();
        let field = GaloisField::new(3, 1).unwrap();
        let f = Poly::parse(&field, "t^2+1").unwrap();
        let z = zeta_vadic(&f, 1, &y, 6, 24).unwrap();
        let np = z.newton_polygon();
        let pred = vadic_predicted_slopes(2, 1, &y, 3).unwrap();
        assert_eq!(pred.slopes()[0], Slope::new(0, 1, 2));
        assert_eq!(pred.slopes()[1], Slope::new(4, 1, 2));
        assert!(pred.slopes()[1..].iter().all(|s| s.mult == 2));
        assert!(np.certified_through() >= 4);
        assert_eq!(
            np.certified_slopes(),
            &pred.slopes()[..np.certified_slopes().len()]
        );
    }

    #[test]
    fn predicted_zero_count() {
        let y = PadicExponent::from_int(3, -1).unwrap();
        let pred = vadic_predicted_slopes(3, 1, &y, 0).unwrap();
        assert_eq!(pred.slopes(), &[Slope::new(0, 1, 3)]);
    }

    #[test]
    fn comparison_identity() {
        let y = PadicExponent::from_int(3, -1).unwrap();
        for c in [0, 1] {
            let rep = comparison_check_dv1(3, 1, Elem(c), &y, 4, 12).unwrap();
            assert!(rep.equal, "{rep:?}");
        }
        let y2 = PadicExponent::from_int(2, -1).unwrap();
        assert!(
            comparison_check_dv1(2, 1, Elem(1), &y2, 4, 12)
                .unwrap()
                .equal
        );
        let y0 = PadicExponent::from_int(3, 0).unwrap();
        assert!(
            comparison_check_dv1(3, 1, Elem(0), &y0, 3, 8)
                .unwrap()
                .equal
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn one_unit_part_is_multiplicative(
            a in proptest::collection::vec(0u32..3, 1..5),
            b in proptest::collection::vec(0u32..3, 1..5),
        ) {
            let r = ring(3, 1, "t^2+1", 6);
            let mk = |c: &[u32]| {
                let mut v: Vec<Elem> = c.iter().map(|&x| Elem(x)).collect();
                v.push(Elem::ONE);
                r.elem(&Poly::new(v))
            };
            let (ea, eb) = (mk(&a), mk(&b));
            prop_assume!(ea.is_unit() && eb.is_unit());
            let ta = teichmuller(&ea).unwrap();
            let tb = teichmuller(&eb).unwrap();
            let tab = teichmuller(&ea.mul(&eb)).unwrap();
            prop_assert_eq!(&tab.u, &ta.u.mul(&tb.u));
            prop_assert_eq!(tab.omega.pow(9), tab.omega.clone());
            prop_assert!(tab.u.sub(&r.one()).valuation().lower_bound() >= 1);
        }
    }
}
