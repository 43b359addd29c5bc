//! Unramified characters of `[T]` on the projective line, equivalently
//! Frobenius values of unramified L-parameters into the dual torus.
//!
//! Each basis cocharacter `e_i` is sent to a monomial `ζ_N^{k_i} u^{c_i} z^{m_i}`.
//! A formal character has `m_i = e_i` and `k = c = 0`; a specialized one has no
//! `z` at all. Mixed values are allowed, which is what descent along orbit
//! closures produces.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::cyclotomic::Cyclotomic;
use super::series::CoefficientValue;
use crate::error::{Error, Result};
use crate::lattice::{dot, LatticeMap};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonomialValue {
    /// Exponent of `ζ_N`, kept in `[0, N)`.
    pub zeta: i64,
    pub u: i64,
    pub z: Vec<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Formal,
    Specialized,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharacterSpec {
    pub cyclotomic_order: u32,
    /// Number of formal variables `z_1, …`.
    pub variables: usize,
    pub values: Vec<MonomialValue>,
}

impl CharacterSpec {
    pub fn new(cyclotomic_order: u32, variables: usize, values: Vec<MonomialValue>) -> Self {
        assert!(cyclotomic_order >= 1);
        let n = cyclotomic_order as i64;
        let values = values
            .into_iter()
            .map(|v| {
                assert_eq!(v.z.len(), variables, "z exponent of wrong length");
                MonomialValue {
                    zeta: v.zeta.rem_euclid(n),
                    ..v
                }
            })
            .collect();
        CharacterSpec {
            cyclotomic_order,
            variables,
            values,
        }
    }

    pub fn formal(rank: usize) -> Self {
        let values = (0..rank)
            .map(|i| MonomialValue {
                zeta: 0,
                u: 0,
                z: (0..rank).map(|j| (i == j) as i64).collect(),
            })
            .collect();
        CharacterSpec::new(1, rank, values)
    }

    /// `z_i = ζ_N^{k_i} u^{c_i}`.
    pub fn specialized(order: u32, kc: &[(i64, i64)]) -> Self {
        let values = kc
            .iter()
            .map(|&(k, c)| MonomialValue {
                zeta: k,
                u: c,
                z: vec![],
            })
            .collect();
        CharacterSpec::new(order, 0, values)
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    pub fn mode(&self) -> Mode {
        if self.variables == 0 {
            return Mode::Specialized;
        }
        if *self == CharacterSpec::formal(self.rank()) {
            Mode::Formal
        } else {
            Mode::Mixed
        }
    }

    /// Exponents of `χ(ϖ_v^λ)` at a place of degree `d`.
    pub fn exponent(&self, lambda: &[i64], d: u32) -> MonomialValue {
        assert_eq!(lambda.len(), self.rank(), "cocharacter of wrong length");
        let d = d as i64;
        let ks: Vec<i64> = self.values.iter().map(|v| v.zeta).collect();
        let cs: Vec<i64> = self.values.iter().map(|v| v.u).collect();
        let z = (0..self.variables)
            .map(|j| {
                d * self
                    .values
                    .iter()
                    .zip(lambda)
                    .map(|(v, l)| v.z[j] * l)
                    .sum::<i64>()
            })
            .collect();
        MonomialValue {
            zeta: (d * dot(&ks, lambda)).rem_euclid(self.cyclotomic_order as i64),
            u: d * dot(&cs, lambda),
            z,
        }
    }

    pub fn monomial_value(&self, e: &MonomialValue) -> CoefficientValue {
        CoefficientValue::monomial(
            self.variables,
            e.u,
            e.z.clone(),
            Cyclotomic::zeta_pow(self.cyclotomic_order, e.zeta),
        )
    }

    /// `u`-exponents `c_i` of the values.
    pub fn u_weights(&self) -> Vec<i64> {
        self.values.iter().map(|v| v.u).collect()
    }

    /// Multiplies each value by `u^{w_i}`.
    pub fn twist_u(&self, w: &[i64]) -> Self {
        assert_eq!(w.len(), self.rank());
        let values = self
            .values
            .iter()
            .zip(w)
            .map(|(v, &k)| MonomialValue {
                u: v.u + k,
                ..v.clone()
            })
            .collect();
        CharacterSpec {
            values,
            ..self.clone()
        }
    }

    /// Character on the source lattice of `m`: `e_j ↦ χ(m(e_j))`.
    pub fn pullback(&self, m: &LatticeMap) -> Self {
        assert_eq!(m.target_rank, self.rank());
        let values = (0..m.source_rank)
            .map(|j| self.exponent(&m.column(j), 1))
            .collect();
        CharacterSpec {
            values,
            ..self.clone()
        }
    }

    /// Same character written over `Q(ζ_M)`.
    pub fn with_order(&self, m: u32) -> Result<Self> {
        if m % self.cyclotomic_order != 0 {
            return Err(Error::MissingRoots {
                order: m,
                needed: self.cyclotomic_order,
            });
        }
        let step = (m / self.cyclotomic_order) as i64;
        let values = self
            .values
            .iter()
            .map(|v| MonomialValue {
                zeta: v.zeta * step,
                ..v.clone()
            })
            .collect();
        Ok(CharacterSpec {
            cyclotomic_order: m,
            values,
            variables: self.variables,
        })
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.rank(), other.rank());
        assert_eq!(self.variables, other.variables);
        let m = self.cyclotomic_order.lcm(&other.cyclotomic_order);
        let a = self.with_order(m).unwrap();
        let b = other.with_order(m).unwrap();
        let values = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| MonomialValue {
                zeta: x.zeta + y.zeta,
                u: x.u + y.u,
                z: x.z.iter().zip(&y.z).map(|(p, q)| p + q).collect(),
            })
            .collect();
        CharacterSpec::new(m, self.variables, values)
    }

    /// Whether `χ(ϖ^λ) = 1` for every `λ` in `basis`, tested in the coefficient ring.
    pub fn is_trivial_on(&self, basis: &[Vec<i64>]) -> bool {
        basis
            .iter()
            .all(|b| character_monomial(self, b, 1).is_one())
    }
}

/// `χ_v(ϖ_v^λ)` at a place of degree `d`.
pub fn character_monomial(chi: &CharacterSpec, lambda: &[i64], d: u32) -> CoefficientValue {
    chi.monomial_value(&chi.exponent(lambda, d))
}
