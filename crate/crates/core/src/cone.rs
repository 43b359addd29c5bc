//! Rational polyhedral cones in `Z^n ⊗ R`.
//!
//! A cone is kept in both descriptions at once: generators (rays plus a
//! lineality basis) and constraints (facet normals plus equations). Duality
//! swaps the two. Both descriptions are minimal and canonical, so derived
//! equality is value equality.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, dot, hermite_rows, primitive, rank_of, LatticeMap};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cone {
    pub ambient_rank: usize,
    /// Primitive extreme rays, sorted. Orthogonal to the lineality space.
    pub rays: Vec<Vec<i64>>,
    /// Hermite basis of the lineality lattice. Empty iff strongly convex.
    pub lineality: Vec<Vec<i64>>,
    /// Primitive irredundant facet normals, sorted.
    pub facets: Vec<Vec<i64>>,
    /// Hermite basis of the lattice of equations. Empty iff full-dimensional.
    pub equations: Vec<Vec<i64>>,
    pub strongly_convex: bool,
    pub full_dimensional: bool,
}

fn combine(a: i64, x: &[i64], b: i64, y: &[i64]) -> Vec<i64> {
    // a*x + b*y, made primitive
    let v: Vec<i128> = x
        .iter()
        .zip(y)
        .map(|(&p, &q)| a as i128 * p as i128 + b as i128 * q as i128)
        .collect();
    let g = v.iter().fold(0i128, |g, &t| g.gcd(&t));
    v.iter()
        .map(|&t| {
            let t = if g == 0 { t } else { t / g };
            i64::try_from(t).expect("cone coordinate exceeds i64")
        })
        .collect()
}

fn is_zero(v: &[i64]) -> bool {
    v.iter().all(|&x| x == 0)
}

/// Extreme rays and lineality of `{y : a·y ≥ 0 (a ∈ ineqs), e·y = 0 (e ∈ eqs)}`.
fn double_description(
    n: usize,
    ineqs: &[Vec<i64>],
    eqs: &[Vec<i64>],
) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let mut lin: Vec<Vec<i64>> = lattice::identity_i64(n);
    let mut rays: Vec<Vec<i64>> = Vec::new();
    let mut seen: Vec<Vec<i64>> = Vec::new();
    let constraints = eqs
        .iter()
        .map(|e| (e, true))
        .chain(ineqs.iter().map(|a| (a, false)));
    for (a, equality) in constraints {
        if is_zero(a) {
            continue;
        }
        seen.push(a.clone());
        if let Some(p) = lin.iter().position(|l| dot(a, l) != 0) {
            let mut l0 = lin.remove(p);
            if dot(a, &l0) < 0 {
                l0.iter_mut().for_each(|x| *x = -*x);
            }
            let a0 = dot(a, &l0);
            lin = lin
                .iter()
                .map(|l| combine(a0, l, -dot(a, l), &l0))
                .collect();
            rays = rays
                .iter()
                .map(|r| combine(a0, r, -dot(a, r), &l0))
                .collect();
            if !equality {
                rays.push(primitive(&l0));
            }
        } else {
            let (mut pos, mut neg, mut zero) = (Vec::new(), Vec::new(), Vec::new());
            for r in rays.drain(..) {
                match dot(a, &r).signum() {
                    1 => pos.push(r),
                    -1 => neg.push(r),
                    _ => zero.push(r),
                }
            }
            for p in &pos {
                for q in &neg {
                    zero.push(combine(dot(a, p), q, -dot(a, q), p));
                }
            }
            if !equality {
                zero.extend(pos);
            }
            rays = zero;
        }
        rays.retain(|r| !is_zero(r));
        let set: BTreeSet<Vec<i64>> = rays.drain(..).collect();
        let target = n - lin.len();
        rays = set
            .into_iter()
            .filter(|r| {
                let tight: Vec<Vec<i64>> =
                    seen.iter().filter(|s| dot(s, r) == 0).cloned().collect();
                rank_of(&tight, n) + 1 == target
            })
            .collect();
    }
    (rays, lin)
}

/// Orthogonal projection of `v` onto the complement of `span(lin)`, scaled to
/// a primitive integer vector.
fn project_off(v: &[i64], lin: &[Vec<i64>]) -> Vec<i64> {
    if lin.is_empty() {
        return primitive(v);
    }
    let k = lin.len();
    let q = |x: i64| BigRational::from_integer(BigInt::from(x));
    // Gram system G c = L v
    let mut aug: Vec<Vec<BigRational>> = (0..k)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..k).map(|j| q(dot(&lin[i], &lin[j]))).collect();
            row.push(q(dot(&lin[i], v)));
            row
        })
        .collect();
    for c in 0..k {
        let p = (c..k)
            .find(|&i| !aug[i][c].is_zero())
            .expect("lineality basis is independent");
        aug.swap(c, p);
        let piv = aug[c][c].clone();
        for x in aug[c].iter_mut() {
            *x = &*x / &piv;
        }
        for i in 0..k {
            if i != c && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for j in 0..=k {
                    let t = &aug[c][j] * &f;
                    aug[i][j] -= t;
                }
            }
        }
    }
    let coeffs: Vec<BigRational> = aug.iter().map(|r| r[k].clone()).collect();
    let proj: Vec<BigRational> = (0..v.len())
        .map(|i| {
            let mut s = q(v[i]);
            for (c, l) in coeffs.iter().zip(lin) {
                s -= c * q(l[i]);
            }
            s
        })
        .collect();
    let den = proj.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<i64> = proj
        .iter()
        .map(|x| {
            (x.numer() * (&den / x.denom()))
                .to_i64()
                .expect("projection overflow")
        })
        .collect();
    primitive(&ints)
}

fn canonical_generators(
    n: usize,
    rays: Vec<Vec<i64>>,
    lin: Vec<Vec<i64>>,
) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let lin = hermite_rows(&lattice::saturate_sublattice(&lin, n), n);
    let rays: BTreeSet<Vec<i64>> = rays
        .iter()
        .map(|r| project_off(r, &lin))
        .filter(|r| !is_zero(r))
        .collect();
    (rays.into_iter().collect(), lin)
}

impl Cone {
    /// Cone generated by `rays` together with the lines through `lines`.
    pub fn generated_by(n: usize, rays: &[Vec<i64>], lines: &[Vec<i64>]) -> Cone {
        for v in rays.iter().chain(lines) {
            assert_eq!(v.len(), n, "generator of wrong length");
        }
        let (facets, equations) = double_description(n, rays, lines);
        let (facets, equations) = canonical_generators(n, facets, equations);
        Self::from_minimal_constraints(n, facets, equations)
    }

    /// Cone cut out by `ineqs ≥ 0` and `eqs = 0`.
    pub fn from_constraints(n: usize, ineqs: &[Vec<i64>], eqs: &[Vec<i64>]) -> Cone {
        let (rays, lin) = double_description(n, ineqs, eqs);
        let (rays, lin) = canonical_generators(n, rays, lin);
        Cone::generated_by(n, &rays, &lin)
    }

    fn from_minimal_constraints(n: usize, facets: Vec<Vec<i64>>, equations: Vec<Vec<i64>>) -> Cone {
        let (rays, lin) = double_description(n, &facets, &equations);
        let (rays, lineality) = canonical_generators(n, rays, lin);
        Cone {
            ambient_rank: n,
            strongly_convex: lineality.is_empty(),
            full_dimensional: equations.is_empty(),
            rays,
            lineality,
            facets,
            equations,
        }
    }

    pub fn zero(n: usize) -> Cone {
        Cone::generated_by(n, &[], &[])
    }

    pub fn dim(&self) -> usize {
        self.ambient_rank - self.equations.len()
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        contains_point(self, v)
    }
}

/// Strongly convex cone generated by `rays` in `Z^n`.
pub fn make_cone(n: usize, rays: &[Vec<i64>]) -> Result<Cone> {
    let c = Cone::generated_by(n, rays, &[]);
    match c.lineality.first() {
        Some(l) => Err(Error::NotStronglyConvex { witness: l.clone() }),
        None => Ok(c),
    }
}

pub fn dual_cone(c: &Cone) -> Cone {
    Cone {
        ambient_rank: c.ambient_rank,
        rays: c.facets.clone(),
        lineality: c.equations.clone(),
        facets: c.rays.clone(),
        equations: c.lineality.clone(),
        strongly_convex: c.equations.is_empty(),
        full_dimensional: c.lineality.is_empty(),
    }
}

pub fn contains_point(c: &Cone, v: &[i64]) -> bool {
    c.facets.iter().all(|f| dot(f, v) >= 0) && c.equations.iter().all(|e| dot(e, v) == 0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub cone: Cone,
    /// Indices into the parent's rays.
    pub ray_indices: Vec<usize>,
    /// Indices into the parent's facets that vanish on this face.
    pub facet_indices: Vec<usize>,
}

impl Face {
    pub fn dim(&self) -> usize {
        self.cone.dim()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceLattice {
    /// Sorted by dimension, then by ray list.
    pub faces: Vec<Face>,
    /// `(i, j)` whenever face `i` is contained in face `j`.
    pub order: Vec<(usize, usize)>,
}

impl FaceLattice {
    pub fn index_of(&self, c: &Cone) -> Option<usize> {
        self.faces.iter().position(|f| &f.cone == c)
    }
}

fn tight_facets(c: &Cone, rays: &BTreeSet<usize>) -> BTreeSet<usize> {
    (0..c.facets.len())
        .filter(|&f| rays.iter().all(|&r| dot(&c.facets[f], &c.rays[r]) == 0))
        .collect()
}

fn tight_rays(c: &Cone, facets: &BTreeSet<usize>) -> BTreeSet<usize> {
    (0..c.rays.len())
        .filter(|&r| facets.iter().all(|&f| dot(&c.facets[f], &c.rays[r]) == 0))
        .collect()
}

pub fn faces(c: &Cone) -> FaceLattice {
    assert!(c.strongly_convex, "faces() needs a strongly convex cone");
    let all: BTreeSet<usize> = (0..c.rays.len()).collect();
    let mut found: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let mut queue = vec![all.clone()];
    found.insert(all);
    while let Some(s) = queue.pop() {
        for f in 0..c.facets.len() {
            let next: BTreeSet<usize> = s
                .iter()
                .copied()
                .filter(|&r| dot(&c.facets[f], &c.rays[r]) == 0)
                .collect();
            if found.insert(next.clone()) {
                queue.push(next);
            }
        }
    }
    let mut list: Vec<Face> = found
        .into_iter()
        .map(|s| {
            let rays: Vec<Vec<i64>> = s.iter().map(|&i| c.rays[i].clone()).collect();
            let cone = Cone::generated_by(c.ambient_rank, &rays, &[]);
            Face {
                facet_indices: tight_facets(c, &s).into_iter().collect(),
                ray_indices: s.into_iter().collect(),
                cone,
            }
        })
        .collect();
    list.sort_by(|a, b| (a.dim(), &a.cone.rays).cmp(&(b.dim(), &b.cone.rays)));
    let mut order = Vec::new();
    for (i, a) in list.iter().enumerate() {
        for (j, b) in list.iter().enumerate() {
            if a.ray_indices.iter().all(|r| b.ray_indices.contains(r)) {
                order.push((i, j));
            }
        }
    }
    FaceLattice { faces: list, order }
}

/// Ray indices of `tau` inside `sigma`, if `tau` is a face.
pub fn face_ray_indices(tau: &Cone, sigma: &Cone) -> Result<BTreeSet<usize>> {
    let not_face = || Error::NotAFace {
        rays: tau.rays.clone(),
    };
    if tau.ambient_rank != sigma.ambient_rank || !tau.strongly_convex || !sigma.strongly_convex {
        return Err(not_face());
    }
    let mut idx = BTreeSet::new();
    for r in &tau.rays {
        idx.insert(
            sigma
                .rays
                .iter()
                .position(|s| s == r)
                .ok_or_else(not_face)?,
        );
    }
    if tight_rays(sigma, &tight_facets(sigma, &idx)) != idx {
        return Err(not_face());
    }
    Ok(idx)
}

/// `τ* = τ^⊥ ∩ σ̌`.
pub fn face_dual(tau: &Cone, sigma: &Cone) -> Result<Cone> {
    let idx = face_ray_indices(tau, sigma)?;
    let gens: Vec<Vec<i64>> = tight_facets(sigma, &idx)
        .into_iter()
        .map(|f| sigma.facets[f].clone())
        .collect();
    Ok(Cone::generated_by(
        sigma.ambient_rank,
        &gens,
        &sigma.equations,
    ))
}

fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// Lattice points of the half-open parallelepiped spanned by independent rays.
fn parallelepiped_points(n: usize, rays: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let d = rays.len();
    let m: Vec<Vec<BigInt>> = (0..n)
        .map(|i| rays.iter().map(|r| BigInt::from(r[i])).collect())
        .collect();
    let s = lattice::smith_normal_form(&m, n, d);
    let lm = lattice::mat_mul(&s.left, &m, n, d);
    let c: Vec<Vec<BigInt>> = lm[..d].to_vec();
    let s2 = lattice::smith_normal_form(&c, d, d);
    let dims: Vec<i64> = s2
        .diag
        .iter()
        .map(|x| x.to_i64().expect("parallelepiped too large"))
        .collect();
    let mut out = Vec::new();
    let mut a = vec![0i64; d];
    loop {
        let scaled: Vec<BigRational> = (0..d)
            .map(|i| BigRational::new(BigInt::from(a[i]), BigInt::from(dims[i])))
            .collect();
        let t: Vec<BigRational> = (0..d)
            .map(|j| {
                let mut acc = BigRational::zero();
                for (i, sc) in scaled.iter().enumerate() {
                    acc += BigRational::from_integer(s2.right[j][i].clone()) * sc;
                }
                frac(&acc)
            })
            .collect();
        let x: Vec<i64> = (0..n)
            .map(|i| {
                let mut acc = BigRational::zero();
                for (j, r) in rays.iter().enumerate() {
                    acc += &t[j] * BigRational::from_integer(BigInt::from(r[i]));
                }
                assert!(acc.is_integer());
                acc.to_integer().to_i64().unwrap()
            })
            .collect();
        out.push(x);
        let mut k = 0;
        while k < d {
            a[k] += 1;
            if a[k] < dims[k] {
                break;
            }
            a[k] = 0;
            k += 1;
        }
        if k == d {
            break;
        }
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Minimal generating set of the monoid `c ∩ Z^n`, sorted.
///
/// Candidates are the rays and the lattice points of the half-open
/// parallelepipeds of all simplicial subcones; these generate the monoid, and
/// the irreducible ones among them form the basis.
pub fn hilbert_basis(c: &Cone) -> Vec<Vec<i64>> {
    assert!(
        c.strongly_convex,
        "hilbert_basis needs a strongly convex cone"
    );
    let n = c.ambient_rank;
    let d = c.dim();
    let mut cands: BTreeSet<Vec<i64>> = c.rays.iter().cloned().collect();
    for s in subsets(c.rays.len(), d) {
        let sub: Vec<Vec<i64>> = s.iter().map(|&i| c.rays[i].clone()).collect();
        if rank_of(&sub, n) == d {
            cands.extend(
                parallelepiped_points(n, &sub)
                    .into_iter()
                    .filter(|x| !is_zero(x)),
            );
        }
    }
    let cands: Vec<Vec<i64>> = cands.into_iter().collect();
    cands
        .iter()
        .filter(|x| {
            !cands.iter().any(|g| {
                g != *x && {
                    let diff: Vec<i64> = x.iter().zip(g).map(|(a, b)| a - b).collect();
                    !is_zero(&diff) && contains_point(c, &diff)
                }
            })
        })
        .cloned()
        .collect()
}

fn check_positive(c: &Cone, w: &[i64]) -> Result<()> {
    if let Some(l) = c.lineality.first() {
        return Err(Error::NotPositiveGrading {
            grading: w.to_vec(),
            ray: l.clone(),
        });
    }
    for r in &c.rays {
        if dot(w, r) <= 0 {
            return Err(Error::NotPositiveGrading {
                grading: w.to_vec(),
                ray: r.clone(),
            });
        }
    }
    Ok(())
}

/// All level sets `{v ∈ c ∩ Z^n : ⟨w, v⟩ = k}` for `k = 0..=max`, each sorted.
///
/// Built from the Hilbert basis: level `k` is the union of `h + level(k - w(h))`.
pub fn level_sets(c: &Cone, w: &[i64], max: usize) -> Result<Vec<Vec<Vec<i64>>>> {
    check_positive(c, w)?;
    let hb: Vec<(usize, Vec<i64>)> = hilbert_basis(c)
        .into_iter()
        .map(|h| (dot(w, &h) as usize, h))
        .collect();
    let mut levels: Vec<BTreeSet<Vec<i64>>> = vec![BTreeSet::new(); max + 1];
    levels[0].insert(vec![0; c.ambient_rank]);
    for k in 1..=max {
        let mut cur = BTreeSet::new();
        for (wh, h) in &hb {
            if *wh <= k {
                for p in &levels[k - wh] {
                    cur.insert(p.iter().zip(h).map(|(a, b)| a + b).collect::<Vec<i64>>());
                }
            }
        }
        levels[k] = cur;
    }
    Ok(levels
        .into_iter()
        .map(|s| s.into_iter().collect())
        .collect())
}

pub fn points_at_level(c: &Cone, w: &[i64], n: usize) -> Result<Vec<Vec<i64>>> {
    Ok(level_sets(c, w, n)?.pop().unwrap())
}

/// Per-coordinate bounds of `{v ∈ c : ⟨w, v⟩ ≤ bound}` for a pointed cone on
/// which `w` is positive: the region is the hull of `0` and the scaled rays.
pub fn bounding_box(c: &Cone, w: &[i64], bound: i64) -> Result<Vec<(i64, i64)>> {
    check_positive(c, w)?;
    let mut bx = vec![(0i64, 0i64); c.ambient_rank];
    for r in &c.rays {
        let wr = dot(w, r);
        for (i, b) in bx.iter_mut().enumerate() {
            let t = r[i] * bound;
            b.0 = b.0.min(Integer::div_floor(&t, &wr));
            b.1 = b.1.max(Integer::div_ceil(&t, &wr));
        }
    }
    Ok(bx)
}

/// Calls `f` on every integer point of a box.
pub fn for_each_in_box(bx: &[(i64, i64)], mut f: impl FnMut(&[i64])) {
    if bx.iter().any(|(lo, hi)| lo > hi) {
        return;
    }
    let mut p: Vec<i64> = bx.iter().map(|b| b.0).collect();
    loop {
        f(&p);
        let mut k = 0;
        while k < bx.len() {
            p[k] += 1;
            if p[k] <= bx[k].1 {
                break;
            }
            p[k] = bx[k].0;
            k += 1;
        }
        if k == bx.len() {
            return;
        }
    }
}

pub fn image_cone(c: &Cone, proj: &LatticeMap) -> Cone {
    assert_eq!(proj.source_rank, c.ambient_rank);
    let rays: Vec<Vec<i64>> = c.rays.iter().map(|r| proj.apply(r)).collect();
    let lines: Vec<Vec<i64>> = c.lineality.iter().map(|l| proj.apply(l)).collect();
    Cone::generated_by(proj.target_rank, &rays, &lines)
}

/// First facet on which `rho` fails to be strictly positive, with the pairing.
pub fn grading_witness(c: &Cone, rho: &[i64]) -> Option<(Vec<i64>, i64)> {
    if let Some(e) = c.equations.first() {
        return Some((e.clone(), dot(e, rho)));
    }
    c.facets
        .iter()
        .map(|f| (f.clone(), dot(f, rho)))
        .find(|(_, p)| *p <= 0)
}

pub fn is_conical_grading(c: &Cone, rho: &[i64]) -> bool {
    c.full_dimensional && grading_witness(c, rho).is_none()
}

/// Positive rational multiple check used for sign conventions in tests.
pub fn same_direction(a: &[i64], b: &[i64]) -> bool {
    primitive(a) == primitive(b) && !is_zero(a)
}

/// Groups lattice points by their value under `w`.
pub fn by_level(points: &[Vec<i64>], w: &[i64]) -> BTreeMap<i64, Vec<Vec<i64>>> {
    let mut m: BTreeMap<i64, Vec<Vec<i64>>> = BTreeMap::new();
    for p in points {
        m.entry(dot(w, p)).or_default().push(p.clone());
    }
    m
}
