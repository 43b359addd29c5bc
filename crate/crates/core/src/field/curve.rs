//! The projective line over `F_q`: place counts, zeta function, spin data.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::series::{big_int, LaurentPoly, TruncatedSeries, UPoly};
use crate::error::{Error, Result};

/// One entry of a square root of the canonical divisor: multiplicity `m` at a
/// place of degree `degree`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinEntry {
    pub degree: u32,
    pub m: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Curve {
    pub q: u64,
    pub genus: u32,
    pub spin: Vec<SpinEntry>,
    /// Optional override for `#C(F_{q^n})`, `n = 1, 2, …`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point_counts: Option<Vec<u64>>,
}

pub fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let p = (2..=q).find(|p| q % p == 0).unwrap();
    let mut r = q;
    while r % p == 0 {
        r /= p;
    }
    r == 1
}

impl Curve {
    /// `P^1/F_q` with the spin structure `ϖ_∞^{-1}` at a rational point.
    pub fn projective_line(q: u64) -> Result<Curve> {
        Curve::new(q, 0, vec![SpinEntry { degree: 1, m: -1 }], None)
    }

    pub fn new(
        q: u64,
        genus: u32,
        spin: Vec<SpinEntry>,
        point_counts: Option<Vec<u64>>,
    ) -> Result<Curve> {
        if !is_prime_power(q) {
            return Err(Error::UnsupportedCurve(format!(
                "q = {q} is not a prime power"
            )));
        }
        if genus != 0 {
            return Err(Error::UnsupportedCurve(format!(
                "genus {genus}: unramified characters are only parametrized by degree on the projective line"
            )));
        }
        let twice: i64 = spin.iter().map(|s| 2 * s.m * s.degree as i64).sum();
        if twice != 2 * genus as i64 - 2 {
            return Err(Error::UnsupportedCurve(format!(
                "spin data has degree {twice}, expected {}",
                2 * genus as i64 - 2
            )));
        }
        Ok(Curve {
            q,
            genus,
            spin,
            point_counts,
        })
    }

    /// `#C(F_{q^n})`.
    pub fn points(&self, n: u32) -> BigInt {
        match &self.point_counts {
            Some(v) if (n as usize) <= v.len() => BigInt::from(v[n as usize - 1]),
            _ => BigInt::from(self.q).pow(n) + 1,
        }
    }

    /// `Σ_v m_v deg v`, the degree of the spin divisor.
    pub fn spin_degree(&self) -> i64 {
        self.spin.iter().map(|s| s.m * s.degree as i64).sum()
    }

    /// Exponent `k` with `Δ^{1/4} = u^k`, where `Δ = q^{2g-2}` and `u = q^{-1/2}`.
    pub fn delta_quarter_exponent(&self) -> i64 {
        1 - self.genus as i64
    }

    pub fn place_counts(&self, cutoff: u32) -> PlaceTable {
        place_counts(self, cutoff)
    }
}

pub fn mobius(n: u32) -> i64 {
    let mut n = n;
    let mut k = 0;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            k += 1;
        }
        p += 1;
    }
    if n > 1 {
        k += 1;
    }
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaceTable {
    pub q: u64,
    /// `counts[d - 1]` is the number of closed points of degree `d`.
    pub counts: Vec<BigUint>,
}

impl PlaceTable {
    pub fn count(&self, d: u32) -> &BigUint {
        &self.counts[d as usize - 1]
    }
}

/// `a_d = (1/d) Σ_{e | d} μ(e) N_{d/e}` for `d ≤ cutoff`.
pub fn place_counts(curve: &Curve, cutoff: u32) -> PlaceTable {
    let counts = (1..=cutoff)
        .map(|d| {
            let mut s = BigInt::zero();
            for e in 1..=d {
                if d % e == 0 {
                    s += curve.points(d / e) * mobius(e);
                }
            }
            assert!((&s % BigInt::from(d)).is_zero() && !s.is_negative());
            (s / BigInt::from(d)).to_biguint().unwrap()
        })
        .collect();
    PlaceTable { q: curve.q, counts }
}

/// `Z_C(t) = ∏_v (1 - t^{deg v})^{-1}` to order `t^order`, stored with `t` in
/// the exponent slot and no `z` variables.
pub fn zeta_series(curve: &Curve, order: u32) -> TruncatedSeries {
    let table = place_counts(curve, order.max(1));
    let mut acc = TruncatedSeries::one(order as i64, 0);
    for d in 1..=order {
        let mut geo = UPoly::default();
        let mut e = 0;
        while e <= order {
            geo.add_at(
                e as i64,
                &LaurentPoly::monomial(vec![], big_int(BigInt::one())),
            );
            e += d;
        }
        let f = TruncatedSeries::new(order as i64, 0, geo);
        acc = acc.mul(&f.pow(table.count(d)));
    }
    acc
}

/// `(q^{m+1} - 1)/(q - 1)`, the number of effective divisors of degree `m` on `P^1`.
pub fn effective_divisors(q: u64, m: u32) -> BigInt {
    (BigInt::from(q).pow(m + 1) - 1) / BigInt::from(q - 1)
}
