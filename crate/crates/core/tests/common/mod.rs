//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use toric_periods::cone::{bounding_box, for_each_in_box, make_cone, Cone};
use toric_periods::duality::{toric_dual, GradedDualPair, GradedToricDatum};
use toric_periods::field::{CharacterSpec, LaurentPoly, TruncatedSeries, UPoly};
use toric_periods::lattice::{dot, rank_of};

/// Rays with positive last coordinate, so the cone is pointed.
pub fn ray_set(n: usize, extra: usize, span: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    let ray = (prop::collection::vec(-span..=span, n - 1), 1..=span).prop_map(|(mut v, last)| {
        v.push(last);
        v
    });
    prop::collection::vec(ray, n..=n + extra)
}

/// Full-dimensional strongly convex cones of rank `1..=max_rank`.
pub fn cone(max_rank: usize, span: i64) -> impl Strategy<Value = Cone> {
    (1..=max_rank)
        .prop_flat_map(move |n| ray_set(n, 2, span).prop_map(move |rays| (n, rays)))
        .prop_filter("full rank", |(n, rays)| rank_of(rays, *n) == *n)
        .prop_map(|(n, rays)| make_cone(n, &rays).unwrap())
}

/// Graded datum with `ρ̌` the sum of the rays and `η` the sum of the facet
/// normals plus `shift` copies of the first facet normal.
pub fn datum_from(c: &Cone, shift: i64) -> GradedToricDatum {
    let n = c.ambient_rank;
    let rho: Vec<i64> = (0..n).map(|i| c.rays.iter().map(|r| r[i]).sum()).collect();
    let eta: Vec<i64> = (0..n)
        .map(|i| c.facets.iter().map(|f| f[i]).sum::<i64>() + shift * c.facets[0][i])
        .collect();
    GradedToricDatum::new(c.clone(), rho, eta).unwrap()
}

pub fn pair(max_rank: usize, span: i64) -> impl Strategy<Value = GradedDualPair> {
    (cone(max_rank, span), 0..2i64).prop_map(|(c, s)| toric_dual(&datum_from(&c, s)).unwrap())
}

pub fn from_rays(rays: &[Vec<i64>], rho: &[i64], eta: &[i64]) -> GradedDualPair {
    toric_dual(&GradedToricDatum::from_rays(rho.len(), rays, rho.to_vec(), eta.to_vec()).unwrap())
        .unwrap()
}

/// The matched-grading catalog pairs.
pub fn catalog_pairs() -> Vec<(&'static str, GradedDualPair)> {
    vec![
        ("tate", from_rays(&[vec![1]], &[1], &[1])),
        (
            "orthant_a2",
            from_rays(&[vec![1, 0], vec![0, 1]], &[1, 1], &[1, 1]),
        ),
        (
            "quadric_cone",
            from_rays(&[vec![1, 0], vec![1, 2]], &[1, 1], &[1, 1]),
        ),
        (
            "quadric_cone_eta21",
            from_rays(&[vec![1, 0], vec![1, 2]], &[1, 1], &[2, 1]),
        ),
        (
            "square_cone_3d",
            from_rays(
                &[vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 1]],
                &[1, 1, 3],
                &[0, 0, 1],
            ),
        ),
    ]
}

/// Specialized characters `e_i ↦ ζ_N^{k_i} u^{c_i}`.
pub fn specialized(rank: usize) -> impl Strategy<Value = CharacterSpec> {
    (1u32..=6).prop_flat_map(move |n| {
        prop::collection::vec((0..n as i64, -2i64..=2), rank)
            .prop_map(move |kc| CharacterSpec::specialized(n, &kc))
    })
}

fn det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => unimplemented!("rank above 3"),
    }
}

/// Membership in the cone spanned by `rays` via Carathéodory and Cramer's rule
/// over every basis of rays; independent of the facet description.
pub fn in_span_brute(rays: &[Vec<i64>], v: &[i64]) -> bool {
    let n = v.len();
    if v.iter().all(|&x| x == 0) {
        return true;
    }
    let idx: Vec<usize> = (0..rays.len()).collect();
    let mut found = false;
    subsets(&idx, n, &mut |s| {
        if found {
            return;
        }
        // columns are the chosen rays
        let m: Vec<Vec<i64>> = (0..n)
            .map(|i| s.iter().map(|&j| rays[j][i]).collect())
            .collect();
        let d = det(&m);
        if d == 0 {
            return;
        }
        let ok = (0..n).all(|k| {
            let mk: Vec<Vec<i64>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if j == k { v[i] } else { m[i][j] })
                        .collect()
                })
                .collect();
            let dk = det(&mk);
            dk == 0 || (dk > 0) == (d > 0)
        });
        found = ok;
    });
    found
}

pub fn subsets(items: &[usize], k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(
        items: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, f);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut Vec::new(), f);
}

/// A linear form positive on every nonzero point of a pointed full cone.
pub fn interior_form(c: &Cone) -> Vec<i64> {
    (0..c.ambient_rank)
        .map(|i| c.facets.iter().map(|f| f[i]).sum())
        .collect()
}

/// Lattice points of `c` with `0 < ⟨w, v⟩ ≤ bound`, by box enumeration.
pub fn box_points(c: &Cone, w: &[i64], bound: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for_each_in_box(&bounding_box(c, w, bound).unwrap(), |v| {
        let k = dot(w, v);
        if k > 0 && k <= bound && in_span_brute(&c.rays, v) {
            out.push(v.to_vec());
        }
    });
    out
}

/// Irreducible elements of the monoid among points of weight at most `bound`.
pub fn irreducibles_brute(c: &Cone, w: &[i64], bound: i64) -> BTreeSet<Vec<i64>> {
    let pts = box_points(c, w, bound);
    let set: BTreeSet<Vec<i64>> = pts.iter().cloned().collect();
    pts.iter()
        .filter(|x| {
            !pts.iter().any(|a| {
                dot(w, a) < dot(w, x)
                    && set.contains(&x.iter().zip(a).map(|(p, q)| p - q).collect::<Vec<_>>())
            })
        })
        .cloned()
        .collect()
}

/// `u ↦ u^d`, `z ↦ z^d`.
pub fn substitute_power(s: &TruncatedSeries, d: i64, order: i64) -> TruncatedSeries {
    let mut p = UPoly::default();
    for (u, lp) in &s.poly.terms {
        let mut q = LaurentPoly::default();
        for (z, c) in &lp.terms {
            q.add_term(&z.iter().map(|x| x * d).collect::<Vec<_>>(), c);
        }
        p.add_at(u * d, &q);
    }
    TruncatedSeries::new(order, s.nvars, p)
}

/// `z ↦ z^{-1}`.
pub fn invert_z(s: &TruncatedSeries) -> TruncatedSeries {
    let mut p = UPoly::default();
    for (u, lp) in &s.poly.terms {
        let mut q = LaurentPoly::default();
        for (z, c) in &lp.terms {
            q.add_term(&z.iter().map(|x| -x).collect::<Vec<_>>(), c);
        }
        p.add_at(*u, &q);
    }
    TruncatedSeries::new(s.order, s.nvars, p)
}

/// Monic irreducible polynomials of degree `d` over `F_p`, plus the point at
/// infinity in degree one: the closed points of the projective line.
pub fn closed_points_brute(p: u64, d: usize) -> u64 {
    fn monic(p: u64, deg: usize) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for _ in 0..deg {
            out = out
                .into_iter()
                .flat_map(|v| (0..p).map(move |c| [v.clone(), vec![c]].concat()))
                .collect();
        }
        out.into_iter()
            .map(|mut v| {
                v.push(1);
                v
            })
            .collect()
    }
    fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        out
    }
    let mut reducible = BTreeSet::new();
    for k in 1..d {
        for a in monic(p, k) {
            for b in monic(p, d - k) {
                reducible.insert(mul(&a, &b, p));
            }
        }
    }
    let irreducible = monic(p, d).len() as u64 - reducible.len() as u64;
    irreducible + (d == 1) as u64
}
