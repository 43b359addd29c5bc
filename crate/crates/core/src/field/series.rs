//! Laurent polynomials in `z`, exact coefficient values in `u, z`, and
//! `u`-adically truncated series with Laurent-polynomial coefficients.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use super::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};

/// Finite sum of `c · z^m` with cyclotomic `c`; zero terms are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    pub terms: BTreeMap<Vec<i64>, Cyclotomic>,
}

impl LaurentPoly {
    pub fn monomial(z: Vec<i64>, c: Cyclotomic) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(z, c);
        }
        LaurentPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, z: &[i64], c: &Cyclotomic) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(z) {
            Some(e) => {
                let s = e.add(c);
                if s.is_zero() {
                    self.terms.remove(z);
                } else {
                    *e = s;
                }
            }
            None => {
                self.terms.insert(z.to_vec(), c.clone());
            }
        }
    }

    pub fn add_assign(&mut self, other: &LaurentPoly) {
        for (z, c) in &other.terms {
            self.add_term(z, c);
        }
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(z, c)| (z.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &LaurentPoly) -> Self {
        let mut out = LaurentPoly::default();
        for (za, ca) in &self.terms {
            for (zb, cb) in &other.terms {
                let z: Vec<i64> = za.iter().zip(zb).map(|(a, b)| a + b).collect();
                out.add_term(&z, &ca.mul(cb));
            }
        }
        out
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let mut out = LaurentPoly::default();
        for (z, c) in &self.terms {
            out.add_term(z, &c.scale(q));
        }
        out
    }

    /// The single term, if there is exactly one.
    pub fn as_monomial(&self) -> Option<(&Vec<i64>, &Cyclotomic)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }
}

/// Exact finite sum of `c · u^e · z^m`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UPoly {
    pub terms: BTreeMap<i64, LaurentPoly>,
}

impl UPoly {
    pub fn one(nvars: usize) -> Self {
        Self::monomial(0, vec![0; nvars], Cyclotomic::one(1))
    }

    pub fn monomial(u: i64, z: Vec<i64>, c: Cyclotomic) -> Self {
        let mut terms = BTreeMap::new();
        let p = LaurentPoly::monomial(z, c);
        if !p.is_zero() {
            terms.insert(u, p);
        }
        UPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn add_at(&mut self, u: i64, p: &LaurentPoly) {
        let e = self.terms.entry(u).or_default();
        e.add_assign(p);
        if e.is_zero() {
            self.terms.remove(&u);
        }
    }

    pub fn add(&self, other: &UPoly) -> UPoly {
        let mut out = self.clone();
        for (u, p) in &other.terms {
            out.add_at(*u, p);
        }
        out
    }

    pub fn neg(&self) -> UPoly {
        UPoly {
            terms: self.terms.iter().map(|(u, p)| (*u, p.neg())).collect(),
        }
    }

    pub fn scale(&self, q: &BigRational) -> UPoly {
        let mut out = UPoly::default();
        for (u, p) in &self.terms {
            out.add_at(*u, &p.scale(q));
        }
        out
    }

    /// Product, dropping exponents above `limit`.
    pub fn mul_upto(&self, other: &UPoly, limit: Option<i64>) -> UPoly {
        let mut out = UPoly::default();
        for (ea, pa) in &self.terms {
            for (eb, pb) in &other.terms {
                let e = ea + eb;
                if limit.map_or(false, |l| e > l) {
                    break;
                }
                out.add_at(e, &pa.mul(pb));
            }
        }
        out
    }

    pub fn truncate(&mut self, limit: i64) {
        self.terms.retain(|&e, _| e <= limit);
    }

    pub fn coefficient(&self, e: i64) -> LaurentPoly {
        self.terms.get(&e).cloned().unwrap_or_default()
    }
}

/// Exact element of the coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientValue {
    pub nvars: usize,
    pub poly: UPoly,
}

impl CoefficientValue {
    pub fn one(nvars: usize) -> Self {
        CoefficientValue {
            nvars,
            poly: UPoly::one(nvars),
        }
    }

    pub fn monomial(nvars: usize, u: i64, z: Vec<i64>, c: Cyclotomic) -> Self {
        assert_eq!(z.len(), nvars);
        CoefficientValue {
            nvars,
            poly: UPoly::monomial(u, z, c),
        }
    }

    pub fn is_one(&self) -> bool {
        self.poly == UPoly::one(self.nvars)
    }

    pub fn mul(&self, other: &CoefficientValue) -> CoefficientValue {
        CoefficientValue {
            nvars: self.nvars,
            poly: self.poly.mul_upto(&other.poly, None),
        }
    }
}

/// Series in `u` known modulo `u^{order+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    pub order: i64,
    pub nvars: usize,
    pub poly: UPoly,
}

impl TruncatedSeries {
    pub fn new(order: i64, nvars: usize, mut poly: UPoly) -> Self {
        poly.truncate(order);
        TruncatedSeries { order, nvars, poly }
    }

    pub fn one(order: i64, nvars: usize) -> Self {
        Self::new(order, nvars, UPoly::one(nvars))
    }

    pub fn zero(order: i64, nvars: usize) -> Self {
        TruncatedSeries {
            order,
            nvars,
            poly: UPoly::default(),
        }
    }

    pub fn from_value(order: i64, v: &CoefficientValue) -> Self {
        Self::new(order, v.nvars, v.poly.clone())
    }

    /// Lowest exponent that may carry a nonzero coefficient.
    pub fn valuation(&self) -> i64 {
        self.poly.valuation().unwrap_or(self.order + 1)
    }

    pub fn coefficient(&self, e: i64) -> LaurentPoly {
        assert!(e <= self.order, "coefficient beyond truncation order");
        self.poly.coefficient(e)
    }

    pub fn truncated(&self, order: i64) -> Self {
        assert!(order <= self.order);
        Self::new(order, self.nvars, self.poly.clone())
    }

    pub fn add(&self, other: &TruncatedSeries) -> Self {
        let order = self.order.min(other.order);
        Self::new(order, self.nvars, self.poly.add(&other.poly))
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            order: self.order,
            nvars: self.nvars,
            poly: self.poly.neg(),
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        TruncatedSeries {
            order: self.order,
            nvars: self.nvars,
            poly: self.poly.scale(q),
        }
    }

    pub fn mul(&self, other: &TruncatedSeries) -> Self {
        let order = (self.order + other.valuation()).min(other.order + self.valuation());
        Self::new(
            order,
            self.nvars,
            self.poly.mul_upto(&other.poly, Some(order)),
        )
    }

    /// Product with an exact value; the known range shifts by its valuation.
    pub fn mul_exact(&self, v: &CoefficientValue) -> Self {
        let order = match v.poly.valuation() {
            Some(val) => self.order + val,
            None => i64::MAX / 4,
        };
        Self::new(order, self.nvars, self.poly.mul_upto(&v.poly, Some(order)))
    }

    /// Binary powering.
    pub fn pow(&self, e: &BigUint) -> Self {
        let mut result = TruncatedSeries::one(self.order, self.nvars);
        let mut base = self.clone();
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                result = result.mul(&base);
            }
            if i + 1 < bits {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Reciprocal; the lowest coefficient must be a single invertible monomial.
    pub fn reciprocal(&self) -> Result<Self> {
        let v = self.poly.valuation().ok_or(Error::NotInvertible)?;
        let lead = &self.poly.terms[&v];
        let (z, c) = lead.as_monomial().ok_or(Error::NotInvertible)?;
        let cinv = c.inverse().ok_or(Error::NotInvertible)?;
        let lead_inv = LaurentPoly::monomial(z.iter().map(|x| -x).collect(), cinv);
        let span = self.order - v;
        // b_k = -lead^{-1} · Σ_{j=1..k} s_{v+j} b_{k-j}
        let mut b: Vec<LaurentPoly> = vec![lead_inv.clone()];
        for k in 1..=span {
            let mut acc = LaurentPoly::default();
            for j in 1..=k {
                let s = self.poly.coefficient(v + j);
                if !s.is_zero() {
                    acc.add_assign(&s.mul(&b[(k - j) as usize]));
                }
            }
            b.push(acc.mul(&lead_inv).neg());
        }
        let mut poly = UPoly::default();
        for (k, p) in b.iter().enumerate() {
            poly.add_at(k as i64 - v, p);
        }
        Ok(Self::new(span - v, self.nvars, poly))
    }

    /// First exponent `≤` the common order where the two series differ.
    pub fn first_mismatch(&self, other: &TruncatedSeries) -> Option<i64> {
        let order = self.order.min(other.order);
        let keys: std::collections::BTreeSet<i64> = self
            .poly
            .terms
            .keys()
            .chain(other.poly.terms.keys())
            .copied()
            .filter(|&e| e <= order)
            .collect();
        keys.into_iter()
            .find(|&e| self.poly.coefficient(e) != other.poly.coefficient(e))
    }

    pub fn agrees_with(&self, other: &TruncatedSeries) -> bool {
        self.first_mismatch(other).is_none()
    }
}

/// `[numerator, denominator, zeta_exponent, z_exponents]` per power-basis term.
pub fn laurent_terms(p: &LaurentPoly) -> Vec<(String, String, usize, Vec<i64>)> {
    let mut out = Vec::new();
    for (z, c) in &p.terms {
        for (k, q) in c.coeffs().iter().enumerate() {
            if !q.is_zero() {
                out.push((q.numer().to_string(), q.denom().to_string(), k, z.clone()));
            }
        }
    }
    out
}

fn common_order(p: &UPoly) -> u32 {
    use num_integer::Integer;
    p.terms
        .values()
        .flat_map(|l| l.terms.values().map(|c| c.order()))
        .fold(1u32, |a, b| a.lcm(&b))
}

fn lifted(p: &UPoly) -> (u32, Vec<(i64, Vec<(String, String, usize, Vec<i64>)>)>) {
    let n = common_order(p);
    let terms = p
        .terms
        .iter()
        .map(|(e, l)| {
            let l = LaurentPoly {
                terms: l
                    .terms
                    .iter()
                    .map(|(z, c)| (z.clone(), c.lift(n)))
                    .collect(),
            };
            (*e, laurent_terms(&l))
        })
        .collect();
    (n, terms)
}

impl Serialize for TruncatedSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (n, terms) = lifted(&self.poly);
        let mut st = s.serialize_struct("TruncatedSeries", 4)?;
        st.serialize_field("order", &self.order)?;
        st.serialize_field("cyclotomic_order", &n)?;
        st.serialize_field("z_variables", &self.nvars)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

impl Serialize for CoefficientValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (n, terms) = lifted(&self.poly);
        let mut st = s.serialize_struct("CoefficientValue", 3)?;
        st.serialize_field("cyclotomic_order", &n)?;
        st.serialize_field("z_variables", &self.nvars)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self
            .terms
            .values()
            .map(|c| c.order())
            .fold(1u32, |a, b| num_integer::Integer::lcm(&a, &b));
        let l = LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(z, c)| (z.clone(), c.lift(n)))
                .collect(),
        };
        let mut st = s.serialize_struct("LaurentPoly", 2)?;
        st.serialize_field("cyclotomic_order", &n)?;
        st.serialize_field("terms", &laurent_terms(&l))?;
        st.end()
    }
}

/// Integer coefficient helper for tests and closed forms.
pub fn int(k: i64) -> Cyclotomic {
    Cyclotomic::from_rational(1, BigRational::from_integer(BigInt::from(k)))
}

pub fn big_int(k: BigInt) -> Cyclotomic {
    Cyclotomic::from_rational(1, BigRational::from_integer(k))
}
