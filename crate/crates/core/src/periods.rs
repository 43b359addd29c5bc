//! Automorphic and spectral periods of a graded toric dual pair, and the
//! weak-duality verifier.
//!
//! Both sides are Euler products over place degrees of local sums over lattice
//! points of a cone. The automorphic sum walks a bounding box and keeps points
//! whose pairings with the Hilbert basis of the dual cone are nonnegative; the
//! spectral sum is built from primal level sets. The two share only series
//! arithmetic.

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::cone::{bounding_box, dual_cone, for_each_in_box, hilbert_basis, level_sets, Cone};
use crate::duality::{GradedDualPair, GradedToricDatum};
use crate::error::{Error, Result};
use crate::field::{
    character_monomial, CharacterSpec, CoefficientValue, Curve, Cyclotomic, LaurentPoly,
    TruncatedSeries, UPoly,
};
use crate::lattice::dot;

/// `χ(λ(∂^{-1/2}))` for the spin data of `curve`.
pub fn spin_evaluation(curve: &Curve, chi: &CharacterSpec, cochar: &[i64]) -> CoefficientValue {
    let mut acc = CoefficientValue::one(chi.variables);
    for s in &curve.spin {
        let lambda: Vec<i64> = cochar.iter().map(|x| -s.m * x).collect();
        acc = acc.mul(&character_monomial(chi, &lambda, s.degree));
    }
    acc
}

/// `u^k` as a coefficient.
pub fn u_power(nvars: usize, k: i64) -> CoefficientValue {
    CoefficientValue::monomial(nvars, k, vec![0; nvars], Cyclotomic::one(1))
}

#[derive(Clone, Debug, Serialize)]
pub struct Prefactors {
    pub automorphic: CoefficientValue,
    pub spectral: CoefficientValue,
    /// `r − ε`: the check is `P = Δ^{(r−ε)/4} · L`.
    pub duality_exponent: i64,
}

pub fn automorphic_prefactor(
    d: &GradedToricDatum,
    curve: &Curve,
    chi: &CharacterSpec,
) -> Result<CoefficientValue> {
    Ok(spin_evaluation(curve, chi, d.rho_integral()?))
}

/// `𝔷 · Δ^{(ε − r)/4}` with `𝔷 = φ(η̌(∂^{-1/2}))`.
pub fn spectral_prefactor(
    d_check: &GradedToricDatum,
    curve: &Curve,
    phi: &CharacterSpec,
) -> Result<CoefficientValue> {
    let frak_z = spin_evaluation(curve, phi, &d_check.eta);
    let eps = d_check.epsilon()?;
    let k = curve.delta_quarter_exponent() * (eps - d_check.rank as i64);
    Ok(frak_z.mul(&u_power(phi.variables, k)))
}

pub fn normalization_prefactors(
    pair: &GradedDualPair,
    curve: &Curve,
    chi: &CharacterSpec,
) -> Result<Prefactors> {
    Ok(Prefactors {
        automorphic: automorphic_prefactor(&pair.side_x, curve, chi)?,
        spectral: spectral_prefactor(&pair.side_xcheck, curve, chi)?,
        duality_exponent: pair.duality_exponent(),
    })
}

/// Checks that the `u`-weights of `psi` are `≥ 1` on every ray of `c`.
pub fn positivity_certificate(c: &Cone, psi: &CharacterSpec) -> Result<Vec<i64>> {
    let w = psi.u_weights();
    if let Some(l) = c.lineality.first() {
        return Err(Error::PositivityViolation {
            weight: w,
            ray: l.clone(),
        });
    }
    for r in &c.rays {
        if dot(&w, r) < 1 {
            return Err(Error::PositivityViolation {
                weight: w,
                ray: r.clone(),
            });
        }
    }
    Ok(w)
}

/// Smallest weight of a nonzero lattice point of `c`; attained on the Hilbert basis.
pub fn min_weight(c: &Cone, w: &[i64]) -> i64 {
    hilbert_basis(c)
        .iter()
        .map(|h| dot(w, h))
        .min()
        .unwrap_or(i64::MAX)
        .max(1)
}

fn add_point(poly: &mut UPoly, psi: &CharacterSpec, lambda: &[i64], deg: u32) {
    let e = psi.exponent(lambda, deg);
    let v = psi.monomial_value(&e);
    for (u, p) in &v.poly.terms {
        poly.add_at(*u, p);
    }
}

/// `Σ_{λ ∈ c ∩ Z^n} ψ(ϖ^λ)` at a place of degree `deg`, with `λ ∈ c` decided by
/// pairing against the Hilbert basis of the dual cone.
pub fn dual_filtered_sum(
    c: &Cone,
    psi: &CharacterSpec,
    deg: u32,
    order: i64,
) -> Result<TruncatedSeries> {
    let w = positivity_certificate(c, psi)?;
    let dual_hb = hilbert_basis(&dual_cone(c));
    let bound = order.max(0) / deg as i64;
    let bx = bounding_box(c, &w, bound)?;
    let mut poly = UPoly::default();
    for_each_in_box(&bx, |lambda| {
        let level = dot(&w, lambda);
        if level <= bound && dual_hb.iter().all(|h| dot(h, lambda) >= 0) {
            add_point(&mut poly, psi, lambda, deg);
        }
    });
    Ok(TruncatedSeries::new(order, psi.variables, poly))
}

/// The same sum, assembled from the level sets of `c` under the weights of `psi`.
pub fn level_set_sum(
    c: &Cone,
    psi: &CharacterSpec,
    deg: u32,
    order: i64,
) -> Result<TruncatedSeries> {
    let w = positivity_certificate(c, psi)?;
    let bound = (order.max(0) / deg as i64) as usize;
    let levels = level_sets(c, &w, bound)?;
    let mut poly = UPoly::default();
    for level in &levels {
        for mu in level {
            add_point(&mut poly, psi, mu, deg);
        }
    }
    Ok(TruncatedSeries::new(order, psi.variables, poly))
}

pub fn automorphic_local_factor(
    d: &GradedToricDatum,
    chi: &CharacterSpec,
    deg: u32,
    order: i64,
) -> Result<TruncatedSeries> {
    dual_filtered_sum(&d.sigma, &chi.twist_u(&d.eta), deg, order)
}

/// Graded trace on `k[σ ∩ X^*(Ť)]`: the cone is the dual of `d_check`'s cone and
/// the grading is `d_check`'s grading cocharacter.
pub fn spectral_local_factor(
    d_check: &GradedToricDatum,
    phi: &CharacterSpec,
    deg: u32,
    order: i64,
) -> Result<TruncatedSeries> {
    let rho = d_check.rho_integral()?;
    level_set_sum(&dual_cone(&d_check.sigma), &phi.twist_u(rho), deg, order)
}

#[derive(Clone, Debug, Serialize)]
pub struct EulerProduct {
    pub series: TruncatedSeries,
    /// Local factors by place degree, before raising to the place count.
    pub factors: Vec<(u32, TruncatedSeries)>,
}

/// `∏_{d ≤ U / w_min} f_d^{a_d}` truncated at `u^U`. Factors for distinct
/// degrees are computed in parallel and multiplied in degree order.
pub fn euler_product<F>(
    curve: &Curve,
    order: i64,
    nvars: usize,
    wmin: i64,
    local: F,
) -> Result<EulerProduct>
where
    F: Fn(u32) -> Result<TruncatedSeries> + Sync,
{
    let cutoff = if order <= 0 {
        0
    } else {
        (order / wmin.max(1)) as u32
    };
    let table = curve.place_counts(cutoff.max(1));
    let computed: Vec<Result<(u32, TruncatedSeries, TruncatedSeries)>> = (1..=cutoff)
        .into_par_iter()
        .map(|d| {
            let f = local(d)?;
            let a: &BigUint = table.count(d);
            let p = if a.is_zero() {
                TruncatedSeries::one(order, nvars)
            } else {
                f.pow(a)
            };
            Ok((d, f, p))
        })
        .collect();
    let mut series = TruncatedSeries::one(order, nvars);
    let mut factors = Vec::new();
    for c in computed {
        let (d, f, p) = c?;
        series = series.mul(&p);
        factors.push((d, f));
    }
    Ok(EulerProduct { series, factors })
}

pub fn automorphic_euler(
    d: &GradedToricDatum,
    curve: &Curve,
    chi: &CharacterSpec,
    order: i64,
) -> Result<EulerProduct> {
    let psi = chi.twist_u(&d.eta);
    let w = positivity_certificate(&d.sigma, &psi)?;
    euler_product(
        curve,
        order,
        chi.variables,
        min_weight(&d.sigma, &w),
        |deg| dual_filtered_sum(&d.sigma, &psi, deg, order),
    )
}

pub fn spectral_euler(
    d_check: &GradedToricDatum,
    curve: &Curve,
    phi: &CharacterSpec,
    order: i64,
) -> Result<EulerProduct> {
    let cone = dual_cone(&d_check.sigma);
    let psi = phi.twist_u(d_check.rho_integral()?);
    let w = positivity_certificate(&cone, &psi)?;
    euler_product(curve, order, phi.variables, min_weight(&cone, &w), |deg| {
        level_set_sum(&cone, &psi, deg, order)
    })
}

/// `χ(ρ̌(∂^{-1/2})) · ∏_v` of the automorphic local factors. The factor
/// `Δ^{(dim X − dim T)/4}` of the theta series is `1` for toric varieties.
pub fn automorphic_period(
    d: &GradedToricDatum,
    curve: &Curve,
    chi: &CharacterSpec,
    order: i64,
) -> Result<TruncatedSeries> {
    let pre = automorphic_prefactor(d, curve, chi)?;
    Ok(automorphic_euler(d, curve, chi, order)?
        .series
        .mul_exact(&pre))
}

pub fn spectral_period(
    d_check: &GradedToricDatum,
    curve: &Curve,
    phi: &CharacterSpec,
    order: i64,
) -> Result<TruncatedSeries> {
    let pre = spectral_prefactor(d_check, curve, phi)?;
    Ok(spectral_euler(d_check, curve, phi, order)?
        .series
        .mul_exact(&pre))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Equal {
        up_to: i64,
    },
    Mismatch {
        exponent: i64,
        left: LaurentPoly,
        right: LaurentPoly,
    },
}

impl Verdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, Verdict::Equal { .. })
    }
}

pub fn compare(left: &TruncatedSeries, right: &TruncatedSeries) -> Verdict {
    match left.first_mismatch(right) {
        None => Verdict::Equal {
            up_to: left.order.min(right.order),
        },
        Some(e) => Verdict::Mismatch {
            exponent: e,
            left: left.coefficient(e),
            right: right.coefficient(e),
        },
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalSample {
    pub degree: u32,
    pub automorphic: TruncatedSeries,
    pub spectral: TruncatedSeries,
    pub equal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectionReport {
    /// Side carrying the automorphic period.
    pub automorphic_side: String,
    pub spectral_side: String,
    pub prefactors: Prefactors,
    pub local_factors: Vec<LocalSample>,
    pub automorphic: TruncatedSeries,
    pub spectral: TruncatedSeries,
    /// `Δ^{(r−ε)/4} · L`.
    pub shifted_spectral: TruncatedSeries,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodReport {
    pub rank: usize,
    pub epsilon: i64,
    pub duality_exponent: i64,
    pub directions: Vec<DirectionReport>,
    pub passed: bool,
}

fn one_direction(
    pair: &GradedDualPair,
    labels: (&str, &str),
    curve: &Curve,
    chi: &CharacterSpec,
    order: i64,
) -> Result<DirectionReport> {
    let prefactors = normalization_prefactors(pair, curve, chi)?;
    let aut = automorphic_euler(&pair.side_x, curve, chi, order)?;
    let spec = spectral_euler(&pair.side_xcheck, curve, chi, order)?;
    let local_factors = aut
        .factors
        .iter()
        .zip(&spec.factors)
        .map(|((d, a), (_, s))| LocalSample {
            degree: *d,
            automorphic: a.clone(),
            spectral: s.clone(),
            equal: a.agrees_with(s),
        })
        .collect();
    let automorphic = aut.series.mul_exact(&prefactors.automorphic);
    let spectral = spec.series.mul_exact(&prefactors.spectral);
    let shift = curve.delta_quarter_exponent() * prefactors.duality_exponent;
    let shifted_spectral = spectral.mul_exact(&u_power(chi.variables, shift));
    let verdict = compare(&automorphic, &shifted_spectral);
    Ok(DirectionReport {
        automorphic_side: labels.0.to_string(),
        spectral_side: labels.1.to_string(),
        prefactors,
        local_factors,
        automorphic,
        spectral,
        shifted_spectral,
        verdict,
    })
}

/// `P̊_X(χ) = Δ^{(r−ε)/4} · L_X̌(φ_χ)` and the same identity with the sides exchanged.
pub fn verify_weak_duality(
    pair: &GradedDualPair,
    curve: &Curve,
    chi: &CharacterSpec,
    order: i64,
) -> Result<PeriodReport> {
    if chi.rank() != pair.rank() {
        return Err(Error::DimensionMismatch(format!(
            "character of rank {} on a rank {} pair",
            chi.rank(),
            pair.rank()
        )));
    }
    let forward = one_direction(pair, ("X", "X_check"), curve, chi, order)?;
    let mirror = one_direction(&pair.swapped(), ("X_check", "X"), curve, chi, order)?;
    let passed = forward.verdict.is_equal() && mirror.verdict.is_equal();
    Ok(PeriodReport {
        rank: pair.rank(),
        epsilon: pair.epsilon,
        duality_exponent: pair.duality_exponent(),
        directions: vec![forward, mirror],
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::toric_dual;
    use crate::field::series::int;

    fn tate() -> GradedToricDatum {
        GradedToricDatum::from_rays(1, &[vec![1]], vec![1], vec![1]).unwrap()
    }

    fn z_series(order: i64, coeffs: &[(i64, i64, i64)]) -> TruncatedSeries {
        let mut p = UPoly::default();
        for &(u, z, c) in coeffs {
            p.add_at(u, &LaurentPoly::monomial(vec![z], int(c)));
        }
        TruncatedSeries::new(order, 1, p)
    }

    #[test]
    fn tate_local_factors() {
        let chi = CharacterSpec::formal(1);
        let a = automorphic_local_factor(&tate(), &chi, 1, 3).unwrap();
        assert_eq!(
            a,
            z_series(3, &[(0, 0, 1), (1, 1, 1), (2, 2, 1), (3, 3, 1)])
        );
        let a2 = automorphic_local_factor(&tate(), &chi, 2, 3).unwrap();
        assert_eq!(a2, z_series(3, &[(0, 0, 1), (2, 2, 1)]));
        assert_eq!(spectral_local_factor(&tate(), &chi, 1, 3).unwrap(), a);
        assert_eq!(
            spectral_local_factor(&tate(), &chi, 1, 0).unwrap(),
            TruncatedSeries::one(0, 1)
        );
    }

    #[test]
    fn quadric_local_factor() {
        let d = GradedToricDatum::from_rays(2, &[vec![1, 0], vec![1, 2]], vec![1, 1], vec![1, 1])
            .unwrap();
        let chi = CharacterSpec::formal(2);
        let a = automorphic_local_factor(&d, &chi, 1, 2).unwrap();
        let mut p = UPoly::one(2);
        p.add_at(1, &LaurentPoly::monomial(vec![1, 0], int(1)));
        p.add_at(2, &LaurentPoly::monomial(vec![2, 0], int(1)));
        p.add_at(2, &LaurentPoly::monomial(vec![1, 1], int(1)));
        assert_eq!(a, TruncatedSeries::new(2, 2, p));
        let pair = toric_dual(&d).unwrap();
        assert_eq!(
            spectral_local_factor(&pair.side_xcheck, &chi, 1, 2).unwrap(),
            a
        );
    }

    #[test]
    fn tate_periods() {
        let chi = CharacterSpec::formal(1);
        let c = Curve::projective_line(2).unwrap();
        let p = automorphic_period(&tate(), &c, &chi, 3).unwrap();
        assert_eq!(
            p,
            z_series(3, &[(0, 1, 1), (1, 2, 3), (2, 3, 7), (3, 4, 15)])
        );
        let c3 = Curve::projective_line(3).unwrap();
        let l = spectral_period(&tate(), &c3, &chi, 2).unwrap();
        assert_eq!(l, z_series(2, &[(0, 1, 1), (1, 2, 4), (2, 3, 13)]));
        assert_eq!(
            automorphic_period(&tate(), &c, &chi, 0).unwrap(),
            z_series(0, &[(0, 1, 1)])
        );
    }

    #[test]
    fn prefactor_examples() {
        let c = Curve::projective_line(2).unwrap();
        let chi = CharacterSpec::formal(1);
        let pre = normalization_prefactors(&toric_dual(&tate()).unwrap(), &c, &chi).unwrap();
        let z = CoefficientValue::monomial(1, 0, vec![1], int(1));
        assert_eq!(
            (pre.automorphic.clone(), pre.spectral, pre.duality_exponent),
            (z.clone(), z, 0)
        );
        let q = GradedToricDatum::from_rays(2, &[vec![1, 0], vec![1, 2]], vec![1, 1], vec![2, 1])
            .unwrap();
        let pre = normalization_prefactors(&toric_dual(&q).unwrap(), &c, &CharacterSpec::formal(2))
            .unwrap();
        assert_eq!(pre.duality_exponent, -1);
        assert_eq!(pre.spectral.poly.valuation(), Some(1));
    }

    #[test]
    fn weak_duality_small() {
        let c = Curve::projective_line(2).unwrap();
        let q = GradedToricDatum::from_rays(2, &[vec![1, 0], vec![1, 2]], vec![1, 1], vec![2, 1])
            .unwrap();
        let r = verify_weak_duality(&toric_dual(&q).unwrap(), &c, &CharacterSpec::formal(2), 5)
            .unwrap();
        assert!(r.passed, "{:?}", r.directions[0].verdict);
    }

    #[test]
    fn positivity_is_enforced() {
        let chi = CharacterSpec::specialized(1, &[(0, -1)]);
        assert!(matches!(
            automorphic_local_factor(&tate(), &chi, 1, 3),
            Err(Error::PositivityViolation { .. })
        ));
    }
}
