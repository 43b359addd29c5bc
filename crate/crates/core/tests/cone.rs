mod common;

use std::collections::BTreeSet;

use common::{box_points, cone, in_span_brute, interior_form, irreducibles_brute};
use proptest::prelude::*;
use toric_periods::cone::{
    dual_cone, face_dual, faces, for_each_in_box, hilbert_basis, level_sets, make_cone,
    points_at_level, Cone,
};
use toric_periods::lattice::dot;

fn probes(n: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for_each_in_box(&vec![(-3, 3); n], |v| out.push(v.to_vec()));
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn membership_matches_caratheodory(c in cone(3, 3)) {
        for v in probes(c.ambient_rank) {
            prop_assert_eq!(c.contains(&v), in_span_brute(&c.rays, &v), "{:?}", v);
        }
    }

    #[test]
    fn dual_is_an_involution(c in cone(3, 3)) {
        let d = dual_cone(&c);
        // recompute from scratch rather than trusting the swap of descriptions
        let fresh = Cone::generated_by(c.ambient_rank, &d.rays, &[]);
        prop_assert_eq!(&fresh, &d);
        prop_assert_eq!(Cone::from_constraints(c.ambient_rank, &c.rays, &[]), d.clone());
        prop_assert_eq!(Cone::from_constraints(c.ambient_rank, &fresh.rays, &[]), c.clone());
        for w in probes(c.ambient_rank) {
            prop_assert_eq!(d.contains(&w), c.rays.iter().all(|r| dot(&w, r) >= 0));
        }
    }

    #[test]
    fn faces_are_anti_isomorphic(c in cone(3, 3)) {
        let n = c.ambient_rank;
        let d = dual_cone(&c);
        let fl = faces(&c);
        let dl = faces(&d);
        prop_assert_eq!(fl.faces.len(), dl.faces.len());
        let image: Vec<usize> = fl
            .faces
            .iter()
            .map(|f| {
                let tau_star = face_dual(&f.cone, &c).unwrap();
                assert_eq!(f.dim() + tau_star.dim(), n, "dimensions not complementary");
                assert_eq!(face_dual(&tau_star, &d).unwrap(), f.cone, "not an involution");
                dl.index_of(&tau_star).expect("dual face missing")
            })
            .collect();
        prop_assert_eq!(image.iter().collect::<BTreeSet<_>>().len(), image.len());
        for (i, j) in &fl.order {
            prop_assert!(dl.order.contains(&(image[*j], image[*i])), "inclusion not reversed");
        }
        prop_assert_eq!(fl.order.len(), dl.order.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hilbert_basis_is_the_set_of_irreducibles(c in cone(3, 2)) {
        let w = interior_form(&c);
        let hb = hilbert_basis(&c);
        let bound = hb.iter().map(|h| dot(&w, h)).max().unwrap();
        let brute = irreducibles_brute(&c, &w, bound);
        prop_assert_eq!(hb.into_iter().collect::<BTreeSet<_>>(), brute);
    }

    #[test]
    fn level_sets_match_box_enumeration(c in cone(3, 3)) {
        let w = interior_form(&c);
        let max = 6;
        let levels = level_sets(&c, &w, max).unwrap();
        let pts = box_points(&c, &w, max as i64);
        for (k, level) in levels.iter().enumerate().skip(1) {
            let mut brute: Vec<Vec<i64>> = pts.iter().filter(|p| dot(&w, p) == k as i64).cloned().collect();
            brute.sort();
            prop_assert_eq!(level, &brute, "level {}", k);
        }
        prop_assert_eq!(&levels[0], &vec![vec![0; c.ambient_rank]]);
        prop_assert_eq!(&points_at_level(&c, &w, 3).unwrap(), &levels[3]);
    }
}

#[test]
fn quadric_level_counts() {
    let c = make_cone(2, &[vec![1, 0], vec![1, 2]]).unwrap();
    let counts: Vec<usize> = level_sets(&c, &[1, 1], 4)
        .unwrap()
        .iter()
        .map(Vec::len)
        .collect();
    assert_eq!(counts, vec![1, 1, 2, 3, 3]);
    assert_eq!(hilbert_basis(&c), vec![vec![1, 0], vec![1, 1], vec![1, 2]]);
}

#[test]
fn rejects_non_pointed_and_bad_weights() {
    assert!(make_cone(2, &[vec![1, 0], vec![-1, 0]]).is_err());
    let c = make_cone(2, &[vec![1, 0], vec![0, 1]]).unwrap();
    assert!(level_sets(&c, &[1, 0], 2).is_err());
}
