//! Cuspidality, genericity and the regularized contributions of single orbits.
//!
//! On the automorphic side the relevant monomial character is
//! `ψ(λ) = χ(ϖ^λ) u^{⟨η, λ⟩}`. On the spectral side the extended parameter acts
//! on `μ ∈ X^*(Ť)` by `φ(μ) u^{⟨ρ̌_X̌, μ⟩}`. Both are a `CharacterSpec` with
//! the `u`-weights folded in.

use serde::Serialize;

use crate::cone::{dual_cone, faces, image_cone, Cone};
use crate::duality::{
    dual_orbit, orbit_of_face, orbits, GradedDualPair, GradedToricDatum, OrbitDescriptor,
};
use crate::error::Result;
use crate::field::{character_monomial, CharacterSpec, Curve, TruncatedSeries};
use crate::lattice::{orthogonal_lattice, quotient_lattice, LatticeMap};
use crate::periods::{
    automorphic_prefactor, compare, dual_filtered_sum, euler_product, level_set_sum, min_weight,
    positivity_certificate, spectral_prefactor, u_power, Verdict,
};

pub fn automorphic_psi(d: &GradedToricDatum, chi: &CharacterSpec) -> CharacterSpec {
    chi.twist_u(&d.eta)
}

pub fn extended_parameter(
    d_check: &GradedToricDatum,
    phi: &CharacterSpec,
) -> Result<CharacterSpec> {
    Ok(phi.twist_u(d_check.rho_integral()?))
}

/// First face with a nontrivial proper stabilizer on which `psi` is trivial.
/// For a full-dimensional cone these are the faces of dimension `1..rank`.
pub fn cuspidality_witness(c: &Cone, psi: &CharacterSpec) -> Option<Cone> {
    let n = c.ambient_rank;
    faces(c)
        .faces
        .into_iter()
        .filter(|f| f.dim() >= 1 && f.dim() < n)
        .find(|f| psi.is_trivial_on(&crate::lattice::saturate_sublattice(&f.cone.rays, n)))
        .map(|f| f.cone)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cuspidality {
    pub cuspidal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_face: Option<Vec<Vec<i64>>>,
}

pub fn is_cuspidal(d: &GradedToricDatum, chi: &CharacterSpec) -> Cuspidality {
    let w = cuspidality_witness(&d.sigma, &automorphic_psi(d, chi));
    Cuspidality {
        cuspidal: w.is_none(),
        witness_face: w.map(|c| c.rays),
    }
}

/// Whether the orbit of the face `tau` of `d_check`'s cone is fixed pointwise:
/// the extended parameter is trivial on the characters of the orbit, `τ^⊥ ∩ X^*(Ť)`.
pub fn orbit_is_fixed(tau: &Cone, ext: &CharacterSpec) -> bool {
    ext.is_trivial_on(&orthogonal_lattice(&tau.rays, tau.ambient_rank))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Genericity {
    pub generic: bool,
    /// Faces whose orbits are fixed, in face-lattice order.
    pub fixed_orbits: Vec<Vec<Vec<i64>>>,
}

pub fn is_generic(d_check: &GradedToricDatum, phi: &CharacterSpec) -> Result<Genericity> {
    let ext = extended_parameter(d_check, phi)?;
    let fl = faces(&d_check.sigma);
    let fixed: Vec<bool> = fl
        .faces
        .iter()
        .map(|f| orbit_is_fixed(&f.cone, &ext))
        .collect();
    // fixed orbits are closed under specialization (larger faces)
    for (i, j) in &fl.order {
        debug_assert!(!fixed[*i] || fixed[*j], "fixed locus is not closed");
    }
    let fixed_orbits: Vec<Vec<Vec<i64>>> = fl
        .faces
        .iter()
        .zip(&fixed)
        .filter(|(_, x)| **x)
        .map(|(f, _)| f.cone.rays.clone())
        .collect();
    let generic = fixed_orbits.len() == 1 && fixed_orbits[0] == d_check.sigma.rays;
    Ok(Genericity {
        generic,
        fixed_orbits,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VanishReason {
    TrivialityFailed,
    NotRelativelyCuspidal,
    NotFixed,
    DominatedByLargerFixedOrbit,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Contribution {
    Computed {
        series: TruncatedSeries,
    },
    Vanished {
        reason: VanishReason,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness: Option<Vec<Vec<i64>>>,
    },
    /// The contribution is undefined, e.g. its sum fails the positivity certificate.
    Rejected {
        message: String,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitContribution {
    pub face: Vec<Vec<i64>>,
    #[serde(flatten)]
    pub contribution: Contribution,
}

impl OrbitContribution {
    pub fn series(&self) -> Option<&TruncatedSeries> {
        match &self.contribution {
            Contribution::Computed { series } => Some(series),
            _ => None,
        }
    }

    fn vanished(face: &Cone, reason: VanishReason, witness: Option<Vec<Vec<i64>>>) -> Self {
        OrbitContribution {
            face: face.rays.clone(),
            contribution: Contribution::Vanished { reason, witness },
        }
    }
}

/// Checks `psi(λ) = psibar(proj λ)` on a basis, so the descent is well defined.
fn descent_holds(psi: &CharacterSpec, psibar: &CharacterSpec, proj: &LatticeMap) -> bool {
    (0..proj.source_rank).all(|j| {
        let e: Vec<i64> = (0..proj.source_rank).map(|i| (i == j) as i64).collect();
        character_monomial(psi, &e, 1) == character_monomial(psibar, &proj.apply(&e), 1)
    })
}

/// Regularized automorphic contribution of an orbit of `d`.
pub fn regularized_automorphic_contribution(
    d: &GradedToricDatum,
    orbit: &OrbitDescriptor,
    curve: &Curve,
    chi: &CharacterSpec,
    order: i64,
) -> Result<OrbitContribution> {
    let psi = automorphic_psi(d, chi);
    if let Some(b) = orbit
        .stabilizer_basis
        .iter()
        .find(|b| !psi.is_trivial_on(std::slice::from_ref(b)))
    {
        return Ok(OrbitContribution::vanished(
            &orbit.face,
            VanishReason::TrivialityFailed,
            Some(vec![b.clone()]),
        ));
    }
    let psibar = psi.pullback(&orbit.quotient.section);
    assert!(
        descent_holds(&psi, &psibar, &orbit.quotient.free_projection),
        "character does not descend"
    );
    if let Some(w) = cuspidality_witness(&orbit.closure_cone, &psibar) {
        return Ok(OrbitContribution::vanished(
            &orbit.face,
            VanishReason::NotRelativelyCuspidal,
            Some(w.rays),
        ));
    }
    let cone = &orbit.closure_cone;
    let w = positivity_certificate(cone, &psibar)?;
    let e = euler_product(curve, order, chi.variables, min_weight(cone, &w), |deg| {
        dual_filtered_sum(cone, &psibar, deg, order)
    })?;
    let pre = automorphic_prefactor(d, curve, chi)?;
    Ok(OrbitContribution {
        face: orbit.face.rays.clone(),
        contribution: Contribution::Computed {
            series: e.series.mul_exact(&pre),
        },
    })
}

/// Regularized spectral contribution of an orbit of `d_check`.
pub fn regularized_spectral_contribution(
    d_check: &GradedToricDatum,
    orbit: &OrbitDescriptor,
    curve: &Curve,
    phi: &CharacterSpec,
    order: i64,
) -> Result<OrbitContribution> {
    let ext = extended_parameter(d_check, phi)?;
    let tau = &orbit.face;
    if !orbit_is_fixed(tau, &ext) {
        return Ok(OrbitContribution::vanished(
            tau,
            VanishReason::NotFixed,
            None,
        ));
    }
    let fl = faces(&d_check.sigma);
    let ti = fl
        .index_of(tau)
        .expect("orbit face is not a face of the cone");
    if let Some(&(i, _)) = fl
        .order
        .iter()
        .find(|(i, j)| *j == ti && *i != ti && orbit_is_fixed(&fl.faces[*i].cone, &ext))
    {
        return Ok(OrbitContribution::vanished(
            tau,
            VanishReason::DominatedByLargerFixedOrbit,
            Some(fl.faces[i].cone.rays.clone()),
        ));
    }
    // the stabilizer of the fixed orbit acts on the normal slice; its character
    // lattice is X^*(Ť) modulo the characters of the orbit
    let n = d_check.rank;
    let q = quotient_lattice(n, &orthogonal_lattice(&tau.rays, n));
    let cone = image_cone(&dual_cone(&d_check.sigma), &q.free_projection);
    let extbar = ext.pullback(&q.section);
    assert!(
        descent_holds(&ext, &extbar, &q.free_projection),
        "parameter does not descend"
    );
    let w = positivity_certificate(&cone, &extbar)?;
    let e = euler_product(curve, order, phi.variables, min_weight(&cone, &w), |deg| {
        level_set_sum(&cone, &extbar, deg, order)
    })?;
    let pre = spectral_prefactor(d_check, curve, phi)?;
    Ok(OrbitContribution {
        face: tau.rays.clone(),
        contribution: Contribution::Computed {
            series: e.series.mul_exact(&pre),
        },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitPairReport {
    pub automorphic: OrbitContribution,
    pub spectral: OrbitContribution,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shifted_spectral: Option<TruncatedSeries>,
    pub verdict: OrbitVerdict,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OrbitVerdict {
    BothVanish,
    Compared {
        verdict: Verdict,
    },
    SupportMismatch,
    /// Both sums fail the same positivity certificate, so neither side is defined.
    BothRejected {
        message: String,
    },
    Error {
        message: String,
    },
}

impl OrbitVerdict {
    pub fn passed(&self) -> bool {
        match self {
            OrbitVerdict::BothVanish | OrbitVerdict::BothRejected { .. } => true,
            OrbitVerdict::Compared { verdict } => verdict.is_equal(),
            _ => false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitDirectionReport {
    pub automorphic_side: String,
    pub cuspidality: Cuspidality,
    pub genericity: Genericity,
    pub pairs: Vec<OrbitPairReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitDualityReport {
    pub duality_exponent: i64,
    pub directions: Vec<OrbitDirectionReport>,
    pub passed: bool,
}

fn pair_report(
    pair: &GradedDualPair,
    o: &OrbitDescriptor,
    curve: &Curve,
    chi: &CharacterSpec,
    order: i64,
) -> Result<OrbitPairReport> {
    let star = dual_orbit(o, pair)?;
    let rejected = |face: &Cone, e: crate::error::Error| OrbitContribution {
        face: face.rays.clone(),
        contribution: Contribution::Rejected {
            message: e.to_string(),
        },
    };
    let aut = regularized_automorphic_contribution(&pair.side_x, o, curve, chi, order)
        .unwrap_or_else(|e| rejected(&o.face, e));
    let spec = regularized_spectral_contribution(&pair.side_xcheck, &star, curve, chi, order)
        .unwrap_or_else(|e| rejected(&star.face, e));
    let shift = curve.delta_quarter_exponent() * pair.duality_exponent();
    let mut shifted = None;
    let verdict = match (&aut.contribution, &spec.contribution) {
        (Contribution::Vanished { .. }, Contribution::Vanished { .. }) => OrbitVerdict::BothVanish,
        (Contribution::Computed { series: a }, Contribution::Computed { series: s }) => {
            let sh = s.mul_exact(&u_power(chi.variables, shift));
            let verdict = compare(a, &sh);
            shifted = Some(sh);
            OrbitVerdict::Compared { verdict }
        }
        (Contribution::Rejected { message: a }, Contribution::Rejected { message: s })
            if a == s =>
        {
            OrbitVerdict::BothRejected { message: a.clone() }
        }
        (Contribution::Rejected { message }, _) | (_, Contribution::Rejected { message }) => {
            OrbitVerdict::Error {
                message: message.clone(),
            }
        }
        _ => OrbitVerdict::SupportMismatch,
    };
    Ok(OrbitPairReport {
        automorphic: aut,
        spectral: spec,
        shifted_spectral: shifted,
        verdict,
    })
}

fn direction(
    pair: &GradedDualPair,
    label: &str,
    curve: &Curve,
    chi: &CharacterSpec,
    order: i64,
) -> Result<OrbitDirectionReport> {
    let pairs = orbits(&pair.side_x)
        .iter()
        .map(|o| pair_report(pair, o, curve, chi, order))
        .collect::<Result<Vec<_>>>()?;
    Ok(OrbitDirectionReport {
        automorphic_side: label.to_string(),
        cuspidality: is_cuspidal(&pair.side_x, chi),
        genericity: is_generic(&pair.side_xcheck, chi)?,
        pairs,
    })
}

/// Orbitwise check `P^reg_O(χ) = Δ^{(r−ε)/4} · L^reg_{O*}(φ_χ)` over all
/// orbit pairs, in both directions.
pub fn verify_langlands_dual_periods(
    pair: &GradedDualPair,
    curve: &Curve,
    chi: &CharacterSpec,
    order: i64,
) -> Result<OrbitDualityReport> {
    let directions = vec![
        direction(pair, "X", curve, chi, order)?,
        direction(&pair.swapped(), "X_check", curve, chi, order)?,
    ];
    let passed = directions
        .iter()
        .all(|d| d.pairs.iter().all(|p| p.verdict.passed()));
    Ok(OrbitDualityReport {
        duality_exponent: pair.duality_exponent(),
        directions,
        passed,
    })
}

/// Orbit of `d` attached to the face with the given rays.
pub fn orbit_by_rays(d: &GradedToricDatum, rays: &[Vec<i64>]) -> Option<OrbitDescriptor> {
    faces(&d.sigma)
        .faces
        .iter()
        .find(|f| f.cone.rays == rays)
        .map(|f| orbit_of_face(&d.sigma, &f.cone))
}
