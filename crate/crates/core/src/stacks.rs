//! Finite subgroups `μ ⊂ T` presented by lattice inclusions, the induced
//! gradings with rational lifts, and periods of the quotient stacks.
//!
//! An isogeny is an inclusion `X_*(T) ↪ X_*(T')` of full rank; `μ̌` is its
//! cokernel. A character `χ` of `[T]` extends to `[T']` in exactly `m = |μ̌|`
//! unramified ways, differing by characters of `X_*(T')/X_*(T)`. The same set
//! parametrizes the lifts of `φ_χ` along `Ť' → Ť`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cone::{make_cone, Cone};
use crate::duality::{GradedDualPair, GradedToricDatum, RationalVector};
use crate::error::{Error, Result};
use crate::field::{character_monomial, CharacterSpec, Curve, MonomialValue, TruncatedSeries};
use crate::lattice::{lattice_index, primitive, quotient_lattice, Index, LatticeMap};
use crate::periods::{
    automorphic_period, automorphic_prefactor, compare, dual_filtered_sum, euler_product,
    min_weight, positivity_certificate, spectral_period, u_power, Verdict,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsogenyDatum {
    /// `X_*(T) → X_*(T')`.
    pub inclusion: LatticeMap,
    pub index: u64,
    /// Invariant factors `≥ 2` of `X_*(T')/X_*(T)`.
    pub mu_check_invariants: Vec<u64>,
    /// Rows reading off the torsion coordinates of `X_*(T')`.
    pub torsion_projection: Vec<Vec<i64>>,
    pub exponent: u64,
}

impl IsogenyDatum {
    pub fn new(inclusion: LatticeMap) -> Result<Self> {
        if inclusion.source_rank != inclusion.target_rank {
            return Err(Error::DimensionMismatch(format!(
                "isogeny between ranks {} and {}",
                inclusion.source_rank, inclusion.target_rank
            )));
        }
        let index = match lattice_index(&inclusion) {
            Index::Finite(i) => i.to_u64().expect("index exceeds u64"),
            Index::Infinite => {
                return Err(Error::DimensionMismatch(
                    "inclusion is not of full rank".into(),
                ))
            }
        };
        let cols: Vec<Vec<i64>> = (0..inclusion.source_rank)
            .map(|j| inclusion.column(j))
            .collect();
        let q = quotient_lattice(inclusion.target_rank, &cols);
        let exponent = q.torsion_invariants.iter().fold(1u64, |a, b| a.lcm(b));
        Ok(IsogenyDatum {
            inclusion,
            index,
            mu_check_invariants: q.torsion_invariants,
            torsion_projection: q.torsion_projection,
            exponent,
        })
    }

    pub fn rank(&self) -> usize {
        self.inclusion.source_rank
    }

    /// `q ≡ 1 (mod exponent)`, which also forces `gcd(q, exponent) = 1`.
    pub fn check_field(&self, q: u64) -> Result<()> {
        if q % self.exponent != 1 % self.exponent || q.gcd(&self.exponent) != 1 {
            return Err(Error::IncompatibleField {
                q,
                exponent: self.exponent,
            });
        }
        Ok(())
    }

    /// `|μ(F_q)|`.
    pub fn rational_points(&self, q: u64) -> u64 {
        self.mu_check_invariants
            .iter()
            .map(|d| d.gcd(&(q - 1)))
            .product()
    }

    /// The `m` characters of `X_*(T')/X_*(T)` as specialized root-of-unity
    /// tuples over `Q(ζ_N)`, ordered lexicographically by their coordinates in
    /// the invariant-factor decomposition.
    pub fn twists(&self, order: u32, variables: usize) -> Result<Vec<CharacterSpec>> {
        let n = order as u64;
        if n % self.exponent != 0 {
            return Err(Error::MissingRoots {
                order,
                needed: self.exponent as u32,
            });
        }
        let r = self.inclusion.target_rank;
        let mut out = Vec::new();
        let mut a = vec![0u64; self.mu_check_invariants.len()];
        loop {
            let values = (0..r)
                .map(|j| {
                    let zeta: i64 = a
                        .iter()
                        .zip(&self.mu_check_invariants)
                        .zip(&self.torsion_projection)
                        .map(|((ai, di), row)| (n / di) as i64 * *ai as i64 * row[j])
                        .sum();
                    MonomialValue {
                        zeta,
                        u: 0,
                        z: vec![0; variables],
                    }
                })
                .collect();
            out.push(CharacterSpec::new(order, variables, values));
            let mut k = a.len();
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                a[k] += 1;
                if a[k] < self.mu_check_invariants[k] {
                    break;
                }
                a[k] = 0;
            }
        }
    }
}

/// The dual sequence `1 → μ̌ → Ť' → Ť → 1`, presented by the transpose.
pub fn dual_isogeny(iso: &IsogenyDatum) -> IsogenyDatum {
    IsogenyDatum::new(iso.inclusion.transpose()).expect("transpose of a full-rank inclusion")
}

/// Solves `m x = v` over `Q` for square invertible `m`.
pub fn rational_preimage(m: &LatticeMap, v: &[i64]) -> RationalVector {
    let n = m.source_rank;
    let q = |x: i64| BigRational::from_integer(BigInt::from(x));
    let mut aug: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            m.matrix[i]
                .iter()
                .map(|&x| q(x))
                .chain(std::iter::once(q(v[i])))
                .collect()
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .find(|&i| !aug[i][c].is_zero())
            .expect("singular inclusion");
        aug.swap(c, p);
        let piv = aug[c][c].clone();
        for x in aug[c].iter_mut() {
            *x = &*x / &piv;
        }
        for i in 0..n {
            if i != c && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for j in 0..=n {
                    let t = &aug[c][j] * &f;
                    aug[i][j] -= t;
                }
            }
        }
    }
    let x: Vec<BigRational> = aug.into_iter().map(|r| r[n].clone()).collect();
    let denom = x.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let numer = x
        .iter()
        .map(|r| {
            (r * BigRational::from_integer(denom.clone()))
                .to_integer()
                .to_i64()
                .unwrap()
        })
        .collect();
    RationalVector {
        numer,
        denom: denom.abs().to_i64().unwrap(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InducedGradedPair {
    /// The pair `(T', Y)`, `(Ť', Y̌)`.
    pub base_pair: GradedDualPair,
    pub isogeny: IsogenyDatum,
    /// `ρ̌ ∈ (1/m) X_*(T)` with `inclusion(ρ̌) = ρ̌'`.
    pub rho_lift: RationalVector,
    /// Lift of the dual eigenform `η̌' = ρ̌'` along the same inclusion.
    pub eta_lift: RationalVector,
    /// `Y` seen as a `T`-variety: preimage cone, pulled-back eigenform, rational grading.
    pub induced: GradedToricDatum,
}

pub fn induced_pair(base_pair: GradedDualPair, isogeny: IsogenyDatum) -> Result<InducedGradedPair> {
    if isogeny.inclusion.target_rank != base_pair.rank() {
        return Err(Error::DimensionMismatch(format!(
            "isogeny into rank {} for a rank {} pair",
            isogeny.inclusion.target_rank,
            base_pair.rank()
        )));
    }
    let m = &isogeny.inclusion;
    let rho_lift = rational_preimage(m, base_pair.side_x.rho_integral()?);
    let eta_lift = rational_preimage(m, &base_pair.side_xcheck.eta);
    let rays: Vec<Vec<i64>> = base_pair
        .side_x
        .sigma
        .rays
        .iter()
        .map(|r| primitive(&rational_preimage(m, r).numer))
        .collect();
    let sigma: Cone = make_cone(m.source_rank, &rays)?;
    let eta = m.transpose().apply(&base_pair.side_x.eta);
    let induced = GradedToricDatum::induced(sigma, rho_lift.clone(), eta);
    Ok(InducedGradedPair {
        base_pair,
        isogeny,
        rho_lift,
        eta_lift,
        induced,
    })
}

/// Whether `big` restricted along `m` equals `small`, as monomial identities on a basis.
pub fn restricts_to(big: &CharacterSpec, m: &LatticeMap, small: &CharacterSpec) -> bool {
    let pulled = big.pullback(m);
    pulled.variables == small.variables
        && (0..m.source_rank).all(|j| {
            let e: Vec<i64> = (0..m.source_rank).map(|i| (i == j) as i64).collect();
            character_monomial(&pulled, &e, 1) == character_monomial(small, &e, 1)
        })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftFamily {
    pub base_lift: CharacterSpec,
    pub twists: Vec<CharacterSpec>,
    pub members: Vec<CharacterSpec>,
}

/// The `m` unramified lifts of `phi` along `Ť' → Ť`: `base_lift · δ`.
pub fn unramified_lifts(
    phi: &CharacterSpec,
    iso: &IsogenyDatum,
    base_lift: &CharacterSpec,
) -> Result<LiftFamily> {
    if !restricts_to(base_lift, &iso.inclusion, phi) {
        return Err(Error::NotALift);
    }
    let twists = iso.twists(base_lift.cyclotomic_order, base_lift.variables)?;
    let members: Vec<CharacterSpec> = twists.iter().map(|t| base_lift.mul(t)).collect();
    debug_assert!(members
        .iter()
        .enumerate()
        .all(|(i, a)| members[..i].iter().all(|b| a != b)));
    Ok(LiftFamily {
        base_lift: base_lift.clone(),
        twists,
        members,
    })
}

fn sum_series(parts: Vec<TruncatedSeries>, nvars: usize) -> TruncatedSeries {
    let order = parts.iter().map(|s| s.order).min().unwrap_or(0);
    parts
        .iter()
        .fold(TruncatedSeries::zero(order, nvars), |acc, s| acc.add(s))
}

/// `L^ur_X̌(φ)`: the sum over the lift family of the `Y̌`-spectral periods,
/// each with its own prefactor `φ̃(ρ̌'(∂^{-1/2})) Δ^{(ε − r)/4}`.
pub fn stack_spectral_period_unramified(
    pair: &InducedGradedPair,
    curve: &Curve,
    phi: &CharacterSpec,
    base_lift: &CharacterSpec,
    order: i64,
) -> Result<TruncatedSeries> {
    pair.isogeny.check_field(curve.q)?;
    let family = unramified_lifts(phi, &pair.isogeny, base_lift)?;
    let parts = family
        .members
        .par_iter()
        .map(|l| spectral_period(&pair.base_pair.side_xcheck, curve, l, order))
        .collect::<Result<Vec<_>>>()?;
    Ok(sum_series(parts, phi.variables))
}

/// `P̊_X̌(χ)`: the automorphic period of `(Ť', Y̌)` at `χ ∘ π̌`.
pub fn stack_automorphic_period(
    pair: &InducedGradedPair,
    curve: &Curve,
    chi_check: &CharacterSpec,
    order: i64,
) -> Result<TruncatedSeries> {
    let pulled = chi_check.pullback(&pair.isogeny.inclusion.transpose());
    automorphic_period(&pair.base_pair.side_xcheck, curve, &pulled, order)
}

/// `P̊^ur_X(χ) = (1/m) Σ_{χ̃} P̊_Y(χ̃)` over the unramified extensions of `χ`.
pub fn unramified_automorphic_period_liftsum(
    pair: &InducedGradedPair,
    curve: &Curve,
    chi: &CharacterSpec,
    base_ext: &CharacterSpec,
    order: i64,
) -> Result<TruncatedSeries> {
    if !restricts_to(base_ext, &pair.isogeny.inclusion, chi) {
        return Err(Error::NotAnExtension);
    }
    let twists = pair
        .isogeny
        .twists(base_ext.cyclotomic_order, base_ext.variables)?;
    let parts = twists
        .par_iter()
        .map(|t| automorphic_period(&pair.base_pair.side_x, curve, &base_ext.mul(t), order))
        .collect::<Result<Vec<_>>>()?;
    let m = BigRational::new(BigInt::one(), BigInt::from(pair.isogeny.index));
    Ok(sum_series(parts, chi.variables).scale(&m))
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectComparison {
    pub direct: TruncatedSeries,
    pub normative: TruncatedSeries,
    pub difference: TruncatedSeries,
    pub agrees: bool,
}

/// Experimental orbit-sum model of `P̊^ur_X(χ)`: `m` unramified orbits, each an
/// Euler product over `λ ∈ X_*(T)` with `inclusion(λ) ∈ σ'`, divided by `|μ(F)|`.
pub fn unramified_automorphic_period_direct(
    pair: &InducedGradedPair,
    curve: &Curve,
    chi: &CharacterSpec,
    base_ext: &CharacterSpec,
    order: i64,
) -> Result<DirectComparison> {
    pair.isogeny.check_field(curve.q)?;
    let normative = unramified_automorphic_period_liftsum(pair, curve, chi, base_ext, order)?;
    let d = &pair.induced;
    let psi = chi.twist_u(&d.eta);
    let w = positivity_certificate(&d.sigma, &psi)?;
    let e = euler_product(
        curve,
        order,
        chi.variables,
        min_weight(&d.sigma, &w),
        |deg| dual_filtered_sum(&d.sigma, &psi, deg, order),
    )?;
    let pre = automorphic_prefactor(&pair.base_pair.side_x, curve, base_ext)?;
    let scale = BigRational::new(
        BigInt::from(pair.isogeny.index),
        BigInt::from(pair.isogeny.rational_points(curve.q)),
    );
    let direct = e.series.mul_exact(&pre).scale(&scale);
    let difference = direct.sub(&normative);
    let agrees = direct.agrees_with(&normative);
    Ok(DirectComparison {
        direct,
        normative,
        difference,
        agrees,
    })
}

/// Characters entering the stack checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StackCharacters {
    /// Character of `[Ť]`, for the stack automorphic period.
    pub chi_check: CharacterSpec,
    /// Character of `[T']` extending the character of `[T]` being tested.
    pub base_lift: CharacterSpec,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub left: TruncatedSeries,
    pub right: TruncatedSeries,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct StackReport {
    pub index: u64,
    pub mu_check_invariants: Vec<u64>,
    pub discrepancy: i64,
    pub rho_lift: RationalVector,
    /// `P̊_X̌(χ) = Δ^{ǎ/4} L_X(φ_χ)`.
    pub stack_automorphic: IdentityReport,
    /// `P̊^ur_X(χ) = (Δ^{a/4}/m) L^ur_X̌(φ_χ)`.
    pub unramified: IdentityReport,
    /// Never gates the verdict.
    pub experimental_direct: DirectComparison,
    pub passed: bool,
}

pub fn verify_stack_duality(
    pair: &InducedGradedPair,
    curve: &Curve,
    chars: &StackCharacters,
    order: i64,
) -> Result<StackReport> {
    pair.isogeny.check_field(curve.q)?;
    let iso = &pair.isogeny;
    let a = pair.base_pair.duality_exponent();
    let shift = curve.delta_quarter_exponent() * a;

    let left = stack_automorphic_period(pair, curve, &chars.chi_check, order)?;
    let pulled = chars.chi_check.pullback(&iso.inclusion.transpose());
    let right = spectral_period(&pair.base_pair.side_x, curve, &pulled, order)?
        .mul_exact(&u_power(pulled.variables, shift));
    let verdict = compare(&left, &right);
    let stack_automorphic = IdentityReport {
        left,
        right,
        verdict,
    };

    let chi = chars.base_lift.pullback(&iso.inclusion);
    let left = unramified_automorphic_period_liftsum(pair, curve, &chi, &chars.base_lift, order)?;
    let m = BigRational::new(BigInt::one(), BigInt::from(iso.index));
    let right = stack_spectral_period_unramified(pair, curve, &chi, &chars.base_lift, order)?
        .mul_exact(&u_power(chi.variables, shift))
        .scale(&m);
    let verdict = compare(&left, &right);
    let unramified = IdentityReport {
        left,
        right,
        verdict,
    };

    let experimental_direct =
        unramified_automorphic_period_direct(pair, curve, &chi, &chars.base_lift, order)?;
    let passed = stack_automorphic.verdict.is_equal() && unramified.verdict.is_equal();
    Ok(StackReport {
        index: iso.index,
        mu_check_invariants: iso.mu_check_invariants.clone(),
        discrepancy: a,
        rho_lift: pair.rho_lift.clone(),
        stack_automorphic,
        unramified,
        experimental_direct,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::toric_dual;
    use crate::field::Cyclotomic;

    fn weight_n(n: i64) -> InducedGradedPair {
        let tate = GradedToricDatum::from_rays(1, &[vec![1]], vec![1], vec![1]).unwrap();
        let iso = IsogenyDatum::new(LatticeMap::new(1, 1, vec![vec![n]])).unwrap();
        induced_pair(toric_dual(&tate).unwrap(), iso).unwrap()
    }

    #[test]
    fn isogeny_invariants() {
        let iso = IsogenyDatum::new(LatticeMap::new(2, 2, vec![vec![2, 0], vec![0, 3]])).unwrap();
        assert_eq!(
            (iso.index, iso.mu_check_invariants.clone(), iso.exponent),
            (6, vec![6], 6)
        );
        assert_eq!(dual_isogeny(&iso).mu_check_invariants, vec![6]);
        let one = IsogenyDatum::new(LatticeMap::identity(2)).unwrap();
        assert_eq!((one.index, one.mu_check_invariants.len()), (1, 0));
        assert!(weight_n(2).isogeny.check_field(2).is_err());
        assert!(weight_n(3).isogeny.check_field(4).is_ok());
    }

    #[test]
    fn rational_lift() {
        let p = weight_n(2);
        assert_eq!(
            p.rho_lift,
            RationalVector {
                numer: vec![1],
                denom: 2
            }
        );
        assert_eq!(p.induced.eta, vec![2]);
        assert_eq!(p.induced.epsilon().unwrap(), 1);
    }

    #[test]
    fn lifts_of_a_square() {
        let p = weight_n(2);
        let w = CharacterSpec::formal(1).with_order(2).unwrap();
        let phi = w.pullback(&p.isogeny.inclusion);
        let fam = unramified_lifts(&phi, &p.isogeny, &w).unwrap();
        assert_eq!(fam.members.len(), 2);
        let at_one: Vec<_> = fam
            .members
            .iter()
            .map(|l| character_monomial(l, &[1], 1))
            .collect();
        let minus = character_monomial(&w, &[1], 1).mul(&crate::field::CoefficientValue::monomial(
            1,
            0,
            vec![0],
            Cyclotomic::from_int(2, -1),
        ));
        assert_eq!(at_one[1], minus);
        assert!(matches!(
            unramified_lifts(&w, &p.isogeny, &w),
            Err(Error::NotALift)
        ));
        assert!(matches!(
            unramified_lifts(&phi, &p.isogeny, &CharacterSpec::formal(1)),
            Err(Error::MissingRoots { .. }) | Err(Error::NotALift)
        ));
    }

    #[test]
    fn stack_pullback_doubles() {
        let p = weight_n(2);
        let pulled = CharacterSpec::formal(1).pullback(&p.isogeny.inclusion.transpose());
        assert_eq!(pulled.values[0].z, vec![2]);
    }

    #[test]
    fn stack_duality_small() {
        for (n, q) in [(2, 3), (3, 4)] {
            let p = weight_n(n);
            let chars = StackCharacters {
                chi_check: CharacterSpec::formal(1),
                base_lift: CharacterSpec::formal(1).with_order(n as u32).unwrap(),
            };
            let r =
                verify_stack_duality(&p, &Curve::projective_line(q).unwrap(), &chars, 5).unwrap();
            assert!(r.passed);
        }
    }
}
