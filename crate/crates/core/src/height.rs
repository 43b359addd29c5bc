//! Piecewise-linear heights on fans and their Fourier transforms over the
//! adelic torus of the projective line.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::cone::{bounding_box, for_each_in_box, Cone};
use crate::duality::GradedToricDatum;
use crate::error::{Error, Result};
use crate::field::{CharacterSpec, Curve, TruncatedSeries, UPoly};
use crate::lattice::dot;
use crate::periods::{
    automorphic_euler, automorphic_local_factor, compare, euler_product, min_weight, Verdict,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PiecewiseLinearHeight {
    pub rank: usize,
    /// Maximal cones.
    pub fan: Vec<Cone>,
    /// One linear form per maximal cone.
    pub slopes: Vec<Vec<i64>>,
}

impl PiecewiseLinearHeight {
    /// Checks continuity across shared faces and strict positivity on rays.
    pub fn new(rank: usize, fan: Vec<Cone>, slopes: Vec<Vec<i64>>) -> Result<Self> {
        if fan.len() != slopes.len()
            || fan.iter().any(|c| c.ambient_rank != rank)
            || slopes.iter().any(|s| s.len() != rank)
        {
            return Err(Error::DimensionMismatch(
                "fan and slopes do not match".into(),
            ));
        }
        for (c, s) in fan.iter().zip(&slopes) {
            if let Some(l) = c.lineality.first() {
                return Err(Error::PositivityViolation {
                    weight: s.clone(),
                    ray: l.clone(),
                });
            }
            if let Some(r) = c.rays.iter().find(|r| dot(s, r) <= 0) {
                return Err(Error::PositivityViolation {
                    weight: s.clone(),
                    ray: r.clone(),
                });
            }
        }
        for i in 0..fan.len() {
            for j in i + 1..fan.len() {
                let (a, b) = (&fan[i], &fan[j]);
                let ineqs: Vec<Vec<i64>> = a.facets.iter().chain(&b.facets).cloned().collect();
                let eqs: Vec<Vec<i64>> = a.equations.iter().chain(&b.equations).cloned().collect();
                let meet = Cone::from_constraints(rank, &ineqs, &eqs);
                if let Some(r) = meet
                    .rays
                    .iter()
                    .chain(&meet.lineality)
                    .find(|r| dot(&slopes[i], r) != dot(&slopes[j], r))
                {
                    return Err(Error::DiscontinuousHeight { ray: r.clone() });
                }
            }
        }
        Ok(PiecewiseLinearHeight { rank, fan, slopes })
    }
}

/// `φ(λ)`, read from any maximal cone containing `λ`.
pub fn height_exponent(h: &PiecewiseLinearHeight, lambda: &[i64]) -> Result<i64> {
    h.fan
        .iter()
        .zip(&h.slopes)
        .find(|(c, _)| c.contains(lambda))
        .map(|(_, s)| dot(s, lambda))
        .ok_or_else(|| Error::OutsideSupport {
            point: lambda.to_vec(),
        })
}

/// `u`-weight of `λ` at degree one: `2 φ(λ)` plus the `u`-part of `χ`.
fn combined_weights(h: &PiecewiseLinearHeight, chi: &CharacterSpec) -> Result<Vec<Vec<i64>>> {
    let c = chi.u_weights();
    h.fan
        .iter()
        .zip(&h.slopes)
        .map(|(cone, s)| {
            let w: Vec<i64> = s.iter().zip(&c).map(|(a, b)| 2 * a + b).collect();
            match cone.rays.iter().find(|r| dot(&w, r) < 1) {
                Some(r) => Err(Error::PositivityViolation {
                    weight: w,
                    ray: r.clone(),
                }),
                None => Ok(w),
            }
        })
        .collect()
}

/// `Σ_{λ ∈ |Σ| ∩ X_*(T)} χ(ϖ^λ) q_v^{-φ(λ)}` with `q_v^{-1} = u^{2 deg}`.
pub fn height_fourier_local(
    h: &PiecewiseLinearHeight,
    chi: &CharacterSpec,
    deg: u32,
    order: i64,
) -> Result<TruncatedSeries> {
    let weights = combined_weights(h, chi)?;
    let bound = order.max(0) / deg as i64;
    let mut points = BTreeSet::new();
    for (cone, w) in h.fan.iter().zip(&weights) {
        let bx = bounding_box(cone, w, bound)?;
        for_each_in_box(&bx, |lambda| {
            if dot(w, lambda) <= bound && cone.contains(lambda) {
                points.insert(lambda.to_vec());
            }
        });
    }
    let mut poly = UPoly::default();
    for lambda in &points {
        let mut e = chi.exponent(lambda, deg);
        e.u += 2 * deg as i64 * height_exponent(h, lambda)?;
        for (u, p) in &chi.monomial_value(&e).poly.terms {
            poly.add_at(*u, p);
        }
    }
    Ok(TruncatedSeries::new(order, chi.variables, poly))
}

pub fn height_fourier_global(
    h: &PiecewiseLinearHeight,
    curve: &Curve,
    chi: &CharacterSpec,
    order: i64,
) -> Result<TruncatedSeries> {
    let weights = combined_weights(h, chi)?;
    let wmin = h
        .fan
        .iter()
        .zip(&weights)
        .map(|(c, w)| min_weight(c, w))
        .min()
        .unwrap_or(1);
    Ok(euler_product(curve, order, chi.variables, wmin, |deg| {
        height_fourier_local(h, chi, deg, order)
    })?
    .series)
}

#[derive(Clone, Debug, Serialize)]
pub struct HeightBridgeReport {
    /// `η / 2`, the slope of the height on the single cone `σ`.
    pub slope: Vec<i64>,
    pub local: Vec<(u32, Verdict)>,
    pub global: Verdict,
    pub passed: bool,
}

/// With `φ = η/2` on the fan of faces of `σ`, `q_v^{-φ(λ)} = u^{deg ⟨η, λ⟩}`, so
/// the local transforms coincide with the automorphic local factors and the
/// global transform with the automorphic Euler product.
pub fn verify_height_bridge(
    d: &GradedToricDatum,
    curve: &Curve,
    chi: &CharacterSpec,
    order: i64,
) -> Result<HeightBridgeReport> {
    if d.eta.iter().any(|x| x % 2 != 0) {
        return Err(Error::DimensionMismatch(format!(
            "eigenform {:?} is not divisible by 2",
            d.eta
        )));
    }
    let slope: Vec<i64> = d.eta.iter().map(|x| x / 2).collect();
    let h = PiecewiseLinearHeight::new(d.rank, vec![d.sigma.clone()], vec![slope.clone()])?;
    let local = (1..=order.clamp(1, 3) as u32)
        .map(|deg| {
            Ok((
                deg,
                compare(
                    &height_fourier_local(&h, chi, deg, order)?,
                    &automorphic_local_factor(d, chi, deg, order)?,
                ),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let global = compare(
        &height_fourier_global(&h, curve, chi, order)?,
        &automorphic_euler(d, curve, chi, order)?.series,
    );
    let passed = global.is_equal() && local.iter().all(|(_, v)| v.is_equal());
    Ok(HeightBridgeReport {
        slope,
        local,
        global,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::make_cone;
    use crate::field::series::int;
    use crate::field::LaurentPoly;

    fn half_line() -> PiecewiseLinearHeight {
        PiecewiseLinearHeight::new(1, vec![make_cone(1, &[vec![1]]).unwrap()], vec![vec![1]])
            .unwrap()
    }

    fn complete_line() -> PiecewiseLinearHeight {
        PiecewiseLinearHeight::new(
            1,
            vec![
                make_cone(1, &[vec![1]]).unwrap(),
                make_cone(1, &[vec![-1]]).unwrap(),
            ],
            vec![vec![1], vec![-1]],
        )
        .unwrap()
    }

    #[test]
    fn exponents() {
        assert_eq!(height_exponent(&half_line(), &[3]).unwrap(), 3);
        assert_eq!(height_exponent(&complete_line(), &[-2]).unwrap(), 2);
        assert_eq!(height_exponent(&complete_line(), &[0]).unwrap(), 0);
        assert!(matches!(
            height_exponent(&half_line(), &[-1]),
            Err(Error::OutsideSupport { .. })
        ));
    }

    #[test]
    fn local_transforms() {
        let chi = CharacterSpec::formal(1);
        let f = height_fourier_local(&complete_line(), &chi, 1, 4).unwrap();
        let mut p = UPoly::one(1);
        for k in [1i64, 2] {
            p.add_at(2 * k, &LaurentPoly::monomial(vec![k], int(1)));
            p.add_at(2 * k, &LaurentPoly::monomial(vec![-k], int(1)));
        }
        assert_eq!(f, TruncatedSeries::new(4, 1, p));
        let bad =
            PiecewiseLinearHeight::new(1, vec![make_cone(1, &[vec![1]]).unwrap()], vec![vec![0]]);
        assert!(matches!(bad, Err(Error::PositivityViolation { .. })));
    }

    #[test]
    fn global_transforms() {
        let chi = CharacterSpec::formal(1);
        let c = Curve::projective_line(2).unwrap();
        let g = height_fourier_global(&complete_line(), &c, &chi, 2).unwrap();
        let mut p = UPoly::one(1);
        p.add_at(2, &LaurentPoly::monomial(vec![1], int(3)));
        p.add_at(2, &LaurentPoly::monomial(vec![-1], int(3)));
        assert_eq!(g, TruncatedSeries::new(2, 1, p));
        let g = height_fourier_global(&half_line(), &c, &chi, 4).unwrap();
        let mut p = UPoly::one(1);
        p.add_at(2, &LaurentPoly::monomial(vec![1], int(3)));
        p.add_at(4, &LaurentPoly::monomial(vec![2], int(7)));
        assert_eq!(g, TruncatedSeries::new(4, 1, p));
        let trivial = PiecewiseLinearHeight::new(1, vec![Cone::zero(1)], vec![vec![1]]).unwrap();
        assert_eq!(
            height_fourier_global(&trivial, &c, &chi, 4).unwrap(),
            TruncatedSeries::one(4, 1)
        );
    }

    #[test]
    fn discontinuity_is_caught() {
        let fan = vec![
            make_cone(2, &[vec![1, 0], vec![0, 1]]).unwrap(),
            make_cone(2, &[vec![0, 1], vec![-1, 0]]).unwrap(),
        ];
        let r = PiecewiseLinearHeight::new(2, fan, vec![vec![1, 1], vec![-1, 2]]);
        assert!(matches!(r, Err(Error::DiscontinuousHeight { ray }) if ray == vec![0, 1]));
    }
}
