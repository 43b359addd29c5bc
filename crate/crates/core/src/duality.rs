//! Graded affine toric varieties and their toric duals.
//!
//! A datum `(T, X, η, ρ̌)` is stored on the cocharacter side: `σ ⊂ X_*(T)_R`,
//! the grading cocharacter `ρ̌` and the eigenform character `η`. The dual datum
//! lives on `X_*(Ť) = X^*(T)` with cone `σ̌` and the two gradings swapped.

use serde::{Deserialize, Serialize};

use crate::cone::{self, dual_cone, face_dual, faces, image_cone, make_cone, Cone};
use crate::error::{Error, Result};
use crate::lattice::{dot, quotient_lattice, saturate_sublattice, QuotientData};

/// A cocharacter with rational coordinates `numer / denom`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalVector {
    pub numer: Vec<i64>,
    pub denom: i64,
}

impl RationalVector {
    pub fn integral(v: Vec<i64>) -> Self {
        RationalVector { numer: v, denom: 1 }
    }

    pub fn as_integral(&self) -> Option<&[i64]> {
        (self.denom == 1).then_some(&self.numer[..])
    }

    /// Integral multiple `k · self`, if it is integral.
    pub fn scaled(&self, k: i64) -> Result<Vec<i64>> {
        let v: Vec<i64> = self.numer.iter().map(|x| x * k).collect();
        if v.iter().all(|x| x % self.denom == 0) {
            Ok(v.iter().map(|x| x / self.denom).collect())
        } else {
            Err(Error::BranchAmbiguity {
                numer: v,
                denom: self.denom,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradedToricDatum {
    pub rank: usize,
    pub sigma: Cone,
    pub rho: RationalVector,
    pub eta: Vec<i64>,
    /// Set when `ρ̌` is only a rational lift of a grading on an isogenous cover.
    pub stack_induced: bool,
}

impl GradedToricDatum {
    pub fn new(sigma: Cone, rho: Vec<i64>, eta: Vec<i64>) -> Result<Self> {
        let rank = sigma.ambient_rank;
        if rho.len() != rank || eta.len() != rank {
            return Err(Error::DimensionMismatch(format!(
                "rank {rank} cone with rho of length {} and eta of length {}",
                rho.len(),
                eta.len()
            )));
        }
        if !sigma.strongly_convex {
            return Err(Error::NotStronglyConvex {
                witness: sigma.lineality[0].clone(),
            });
        }
        if !sigma.full_dimensional {
            return Err(Error::DimensionMismatch(format!(
                "cone has dimension {} in rank {rank}",
                sigma.dim()
            )));
        }
        Ok(GradedToricDatum {
            rank,
            sigma,
            rho: RationalVector::integral(rho),
            eta,
            stack_induced: false,
        })
    }

    pub fn from_rays(rank: usize, rays: &[Vec<i64>], rho: Vec<i64>, eta: Vec<i64>) -> Result<Self> {
        GradedToricDatum::new(make_cone(rank, rays)?, rho, eta)
    }

    /// Datum with a rational grading, as induced from an isogenous cover.
    pub fn induced(sigma: Cone, rho: RationalVector, eta: Vec<i64>) -> Self {
        GradedToricDatum {
            rank: sigma.ambient_rank,
            sigma,
            rho,
            eta,
            stack_induced: true,
        }
    }

    /// The grading cocharacter; plain data always have one.
    pub fn rho_integral(&self) -> Result<&[i64]> {
        self.rho
            .as_integral()
            .ok_or_else(|| Error::BranchAmbiguity {
                numer: self.rho.numer.clone(),
                denom: self.rho.denom,
            })
    }

    /// `⟨ρ̌, η⟩`.
    pub fn epsilon(&self) -> Result<i64> {
        let p = dot(&self.rho.numer, &self.eta);
        if p % self.rho.denom != 0 {
            return Err(Error::BranchAmbiguity {
                numer: self.rho.numer.clone(),
                denom: self.rho.denom,
            });
        }
        Ok(p / self.rho.denom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedDualPair {
    pub side_x: GradedToricDatum,
    pub side_xcheck: GradedToricDatum,
    pub epsilon: i64,
}

impl GradedDualPair {
    pub fn rank(&self) -> usize {
        self.side_x.rank
    }

    /// `r − ε`.
    pub fn duality_exponent(&self) -> i64 {
        self.rank() as i64 - self.epsilon
    }

    /// The same pair read from the other side.
    pub fn swapped(&self) -> GradedDualPair {
        GradedDualPair {
            side_x: self.side_xcheck.clone(),
            side_xcheck: self.side_x.clone(),
            epsilon: self.epsilon,
        }
    }
}

/// Builds the dual datum without checking the grading conditions.
pub fn assemble_pair(d: &GradedToricDatum) -> Result<GradedDualPair> {
    let rho = d.rho_integral()?.to_vec();
    let side_xcheck = GradedToricDatum {
        rank: d.rank,
        sigma: dual_cone(&d.sigma),
        rho: RationalVector::integral(d.eta.clone()),
        eta: rho,
        stack_induced: false,
    };
    Ok(GradedDualPair {
        side_x: d.clone(),
        side_xcheck,
        epsilon: d.epsilon()?,
    })
}

pub fn toric_dual(d: &GradedToricDatum) -> Result<GradedDualPair> {
    let rho = d.rho_integral()?.to_vec();
    if let Some((facet, pairing)) = cone::grading_witness(&d.sigma, &rho) {
        return Err(Error::InvalidGrading {
            rho,
            facet,
            pairing,
        });
    }
    for r in &d.sigma.rays {
        let p = dot(&d.eta, r);
        if p < 1 {
            return Err(Error::InvalidEigenform {
                eta: d.eta.clone(),
                ray: r.clone(),
                pairing: p,
            });
        }
    }
    assemble_pair(d)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitDescriptor {
    pub face: Cone,
    /// Saturated basis of `X_*(S_τ)`.
    pub stabilizer_basis: Vec<Vec<i64>>,
    /// `X_*(K_τ) = X_*(T)/X_*(S_τ)`.
    pub quotient: QuotientData,
    /// Image of `σ` in `X_*(K_τ)`.
    pub closure_cone: Cone,
}

impl OrbitDescriptor {
    pub fn key(&self) -> &Vec<Vec<i64>> {
        &self.face.rays
    }

    pub fn is_dense(&self) -> bool {
        self.face.rays.is_empty()
    }
}

pub fn orbit_of_face(sigma: &Cone, face: &Cone) -> OrbitDescriptor {
    let n = sigma.ambient_rank;
    let stabilizer_basis = saturate_sublattice(&face.rays, n);
    let quotient = quotient_lattice(n, &stabilizer_basis);
    let closure_cone = image_cone(sigma, &quotient.free_projection);
    OrbitDescriptor {
        face: face.clone(),
        stabilizer_basis,
        quotient,
        closure_cone,
    }
}

/// One orbit per face, in face-lattice order (dense orbit first).
pub fn orbits(d: &GradedToricDatum) -> Vec<OrbitDescriptor> {
    faces(&d.sigma)
        .faces
        .iter()
        .map(|f| orbit_of_face(&d.sigma, &f.cone))
        .collect()
}

/// The orbit of `τ* = τ^⊥ ∩ σ̌` on the other side of the pair.
pub fn dual_orbit(o: &OrbitDescriptor, pair: &GradedDualPair) -> Result<OrbitDescriptor> {
    let (from, to) = if cone::face_ray_indices(&o.face, &pair.side_x.sigma).is_ok() {
        (&pair.side_x, &pair.side_xcheck)
    } else {
        (&pair.side_xcheck, &pair.side_x)
    };
    let star = face_dual(&o.face, &from.sigma)?;
    Ok(orbit_of_face(&to.sigma, &star))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `ρ̌` lies in the interior of `σ`.
    Interior,
    /// The `ρ̌`-weights on `σ̌ ∩ X^*(T)` are nonnegative with finite level sets.
    FiniteLevels,
    /// `ρ̌`, read as a character of the dual torus, has no poles or zeros on the dual variety.
    PoleFree,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub side: String,
    pub condition: Condition,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairing: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<ConditionCheck>,
    pub passed: bool,
}

fn side_checks(
    label: &str,
    d: &GradedToricDatum,
    partner: &GradedToricDatum,
) -> Vec<ConditionCheck> {
    let rho = &d.rho.numer;
    let mk = |condition, witness: Option<(Vec<i64>, i64)>| ConditionCheck {
        side: label.to_string(),
        condition,
        passed: witness.is_none(),
        pairing: witness.as_ref().map(|w| w.1),
        witness: witness.map(|w| w.0),
    };
    let interior = if cone::is_conical_grading(&d.sigma, rho) {
        None
    } else {
        cone::grading_witness(&d.sigma, rho)
    };
    let dual = dual_cone(&d.sigma);
    let finite = dual
        .lineality
        .iter()
        .map(|l| (l.clone(), dot(rho, l)))
        .chain(dual.rays.iter().map(|h| (h.clone(), dot(rho, h))))
        .find(|(l, p)| *p <= 0 || dual.lineality.contains(l));
    let pole = partner
        .sigma
        .rays
        .iter()
        .map(|r| (r.clone(), dot(&partner.eta, r)))
        .find(|(_, p)| *p < 1)
        .or_else(|| (partner.eta != *rho).then(|| (partner.eta.clone(), 0)));
    vec![
        mk(Condition::Interior, interior),
        mk(Condition::FiniteLevels, finite),
        mk(Condition::PoleFree, pole),
    ]
}

/// The three equivalent grading conditions, on both sides.
pub fn validate_pair(pair: &GradedDualPair) -> ValidationReport {
    let mut checks = side_checks("X", &pair.side_x, &pair.side_xcheck);
    checks.extend(side_checks("X_check", &pair.side_xcheck, &pair.side_x));
    let passed = checks.iter().all(|c| c.passed) && pair.epsilon > 0;
    ValidationReport { checks, passed }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadric(rho: Vec<i64>, eta: Vec<i64>) -> GradedToricDatum {
        GradedToricDatum::from_rays(2, &[vec![1, 0], vec![1, 2]], rho, eta).unwrap()
    }

    #[test]
    fn tate_is_self_dual() {
        let t = GradedToricDatum::from_rays(1, &[vec![1]], vec![1], vec![1]).unwrap();
        let p = toric_dual(&t).unwrap();
        assert_eq!(p.side_x, p.side_xcheck);
        assert_eq!(p.epsilon, 1);
        assert_eq!(orbits(&t).len(), 2);
        assert!(validate_pair(&p).passed);
    }

    #[test]
    fn quadric_pairs() {
        let p = toric_dual(&quadric(vec![1, 1], vec![1, 1])).unwrap();
        assert_eq!(p.side_xcheck.sigma.rays, vec![vec![0, 1], vec![2, -1]]);
        assert_eq!(p.epsilon, 2);
        let p = toric_dual(&quadric(vec![1, 1], vec![2, 1])).unwrap();
        assert_eq!(p.epsilon, 3);
        assert_eq!(p.duality_exponent(), -1);
    }

    #[test]
    fn invalid_gradings_are_reported() {
        let bad = assemble_pair(&quadric(vec![1, 0], vec![1, 1])).unwrap();
        let r = validate_pair(&bad);
        assert!(!r.passed);
        let first = &r.checks[0];
        assert_eq!(
            (first.condition, first.witness.clone(), first.pairing),
            (Condition::Interior, Some(vec![0, 1]), Some(0))
        );
        assert!(toric_dual(&quadric(vec![1, 0], vec![1, 1])).is_err());

        let bad = assemble_pair(&quadric(vec![1, 1], vec![0, 1])).unwrap();
        let r = validate_pair(&bad);
        let pole = r
            .checks
            .iter()
            .find(|c| c.side == "X_check" && c.condition == Condition::PoleFree)
            .unwrap();
        assert_eq!(pole.witness, Some(vec![1, 0]));
    }

    #[test]
    fn orbit_duality() {
        let d = quadric(vec![1, 1], vec![1, 1]);
        let p = toric_dual(&d).unwrap();
        let os = orbits(&d);
        assert_eq!(os.len(), 4);
        let ray12 = os.iter().find(|o| o.face.rays == vec![vec![1, 2]]).unwrap();
        assert_eq!(dual_orbit(ray12, &p).unwrap().face.rays, vec![vec![2, -1]]);
        let dense = &os[0];
        assert!(dense.is_dense());
        assert_eq!(dual_orbit(dense, &p).unwrap().face, p.side_xcheck.sigma);
    }
}
