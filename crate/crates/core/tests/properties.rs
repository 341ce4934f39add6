//! Randomized invariant checks over the algebraic core: factorization,
//! cyclotomic cosets, matrix models, dihedral holomorph action, group
//! arithmetic, graphs, and map counts.

use proptest::prelude::*;

use rotapx::dihedral::{
    aut_action, aut_orbit, enumerate_irr, multiplicity_free_reps, realize, DihedralAut, IrrClass,
};
use rotapx::ffpoly::{cyclotomic_cosets, factor_x_r_minus_1, Poly};
use rotapx::group::AffineGroup;
use rotapx::pxgraph::{build_px, build_px_zero, isomorphic, Multigraph};
use rotapx::rotamap::{build_map, construct_rotary_default, maps_isomorphic};

/// Coprime (p, r) cells, wider than the census desk range. Cells whose
/// splitting field would blow the library's 2^52 desk-scale cap are left
/// out (the largest coset has ord_r(p) elements).
fn coprime_cells() -> Vec<(u64, u64)> {
    let mut cells = Vec::new();
    for p in [3u64, 5, 7, 11, 13, 17, 19] {
        for r in 3..=20u64 {
            if r % p != 0 {
                let ord = rotapx::ffpoly::multiplicative_order(p, r);
                let field = (0..ord).try_fold(1u128, |acc, _| {
                    let next = acc * p as u128;
                    (next <= 1u128 << 52).then_some(next)
                });
                if field.is_some() {
                    cells.push((p, r));
                }
            }
        }
    }
    cells
}

fn cell() -> impl Strategy<Value = (u64, u64)> {
    prop::sample::select(coprime_cells())
}

/// A cell together with one irreducible class index.
fn cell_and_class() -> impl Strategy<Value = (u64, u64, IrrClass)> {
    cell().prop_flat_map(|(p, r)| {
        let classes = enumerate_irr(p, r).unwrap();
        let count = classes.len();
        (Just(p), Just(r), 0..count)
            .prop_map(move |(p, r, i)| (p, r, classes[i].clone()))
    })
}

/// Single-class groups small enough for elementwise checks.
fn small_groups() -> Vec<(u64, u64, IrrClass)> {
    let mut out = Vec::new();
    for (p, r) in [(3u64, 4u64), (3, 5), (3, 7), (3, 8), (5, 3), (5, 4), (7, 3), (11, 3), (13, 3)]
    {
        for class in enumerate_irr(p, r).unwrap() {
            let order = (0..class.degree()).fold(2 * r as u128, |acc, _| acc * p as u128);
            if order <= 30_000 {
                out.push((p, r, class));
            }
        }
    }
    out
}

/// Multiplicity-free contents with a small group order, for map-level checks.
fn small_contents() -> Vec<(u64, u64, Vec<IrrClass>)> {
    let mut out = Vec::new();
    for (p, r) in [(3u64, 4u64), (3, 5), (5, 3), (7, 3), (3, 7)] {
        for total in 2..=4u64 {
            for set in multiplicity_free_reps(p, r, total).unwrap() {
                let order = (0..total).fold(2 * r as u128, |acc, _| acc * p as u128);
                if order <= 20_000 {
                    out.push((p, r, set));
                }
            }
        }
    }
    out
}

fn polynomial_pair() -> impl Strategy<Value = (Poly, Poly)> {
    prop::sample::select(vec![3u64, 5, 7, 11, 13]).prop_flat_map(|p| {
        let coeffs = prop::collection::vec(0..p, 0..8);
        (coeffs.clone(), coeffs)
            .prop_map(move |(a, b)| (Poly::new(p, a), Poly::new(p, b)))
    })
}

/// Reference graphs for the relabeling test.
fn graph_pool() -> Vec<Multigraph> {
    vec![
        build_px(3, 4, 1, 2_000).unwrap(),
        build_px(3, 5, 1, 2_000).unwrap(),
        build_px(5, 3, 1, 2_000).unwrap(),
        build_px(3, 4, 2, 2_000).unwrap(),
        build_px(7, 3, 1, 2_000).unwrap(),
        build_px_zero(3, 5, 1).unwrap(),
        build_px_zero(3, 4, -1).unwrap(),
    ]
}

fn graph_and_permutation() -> impl Strategy<Value = (Multigraph, Vec<usize>)> {
    prop::sample::select(graph_pool()).prop_flat_map(|g| {
        let n = g.vertices;
        (Just(g), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factors_multiply_back_and_stay_monic_irreducible((p, r) in cell()) {
        let factors = factor_x_r_minus_1(p, r).unwrap();
        let product = factors.iter().fold(Poly::one(p), |acc, (f, _)| acc.mul(f));
        prop_assert_eq!(product, Poly::x_r_minus_1(p, r));
        for (f, coset) in &factors {
            prop_assert!(f.is_monic());
            prop_assert!(f.is_irreducible());
            prop_assert_eq!(f.degree(), coset.len());
        }
    }

    #[test]
    fn cosets_partition_and_close_under_p((p, r) in cell()) {
        let cosets = cyclotomic_cosets(p, r).unwrap();
        let mut seen = vec![false; r as usize];
        for coset in &cosets {
            for &e in &coset.elements {
                prop_assert!(!seen[e as usize], "element {e} repeats");
                seen[e as usize] = true;
                prop_assert!(coset.contains(e * p % r), "coset not closed at {e}");
            }
            // |coset| is the orbit length of multiplication by p
            let e0 = coset.representative();
            let mut e = e0 * p % r;
            let mut len = 1usize;
            while e != e0 {
                e = e * p % r;
                len += 1;
            }
            prop_assert_eq!(len, coset.len());
        }
        prop_assert!(seen.iter().all(|&s| s));
        prop_assert_eq!(cosets[0].elements.as_slice(), &[0][..]);
    }

    #[test]
    fn division_inverts_multiplication((a, b) in polynomial_pair()) {
        prop_assume!(!b.is_zero());
        let (q, rem) = a.mul(&b).divrem(&b);
        prop_assert_eq!(q, a.clone());
        prop_assert!(rem.is_zero());
        let (q, rem) = a.divrem(&b);
        prop_assert_eq!(q.mul(&b).add(&rem), a);
        prop_assert!(rem.is_zero() || rem.degree() < b.degree());
    }

    #[test]
    fn matrix_models_satisfy_dihedral_relations((p, r, class) in cell_and_class()) {
        let rep = realize(p, r, &class).unwrap();
        let n = class.degree() as usize;
        prop_assert_eq!(rep.mat_c.pow(r), rotapx::linalg::Mat::identity(p, n));
        prop_assert_eq!(rep.mat_b.mul(&rep.mat_b), rotapx::linalg::Mat::identity(p, n));
        prop_assert_eq!(
            rep.mat_b.mul(&rep.mat_c).mul(&rep.mat_b),
            rep.mat_c.pow(r - 1)
        );
    }

    #[test]
    fn holomorph_action_is_a_right_action(
        ((p, r, class), pick) in cell_and_class().prop_flat_map(|t| {
            let count = DihedralAut::all(t.1).len();
            (Just(t), (0..count, 0..count))
        })
    ) {
        let _ = p;
        let auts = DihedralAut::all(r);
        let (s1, s2) = (&auts[pick.0], &auts[pick.1]);
        prop_assert_eq!(
            aut_action(&aut_action(&class, s1), s2),
            aut_action(&class, &s1.compose(s2))
        );
        prop_assert_eq!(aut_action(&class, &DihedralAut::identity(r)), class.clone());
        let orbit = aut_orbit(&class, r);
        prop_assert_eq!(DihedralAut::count(r) as usize % orbit.len(), 0);
    }

    #[test]
    fn group_arithmetic_is_associative_with_inverses(
        ((p, r, class), raw) in prop::sample::select(small_groups())
            .prop_flat_map(|t| (Just(t), (any::<u64>(), any::<u64>(), any::<u64>())))
    ) {
        let g = AffineGroup::from_classes(p, r, &[class]).unwrap();
        let size = g.order() as u64;
        let a = g.elem_at((raw.0 % size) as usize);
        let b = g.elem_at((raw.1 % size) as usize);
        let c = g.elem_at((raw.2 % size) as usize);
        prop_assert_eq!(g.mul(&g.mul(&a, &b), &c), g.mul(&a, &g.mul(&b, &c)));
        prop_assert_eq!(g.mul(&a, &g.inv(&a)), g.identity());
        prop_assert_eq!(g.mul(&g.inv(&a), &a), g.identity());
        let order = g.element_order(&a);
        prop_assert!(order >= 1 && g.order() % order as u128 == 0);
        let mut acc = g.identity();
        for _ in 0..order {
            acc = g.mul(&acc, &a);
        }
        prop_assert_eq!(acc, g.identity());
    }

    #[test]
    fn graph_isomorphism_survives_relabeling((g, perm) in graph_and_permutation()) {
        let mut relabeled = Multigraph::new(g.vertices);
        for (u, v, m) in g.edges() {
            relabeled.add_edge(perm[u], perm[v], m);
        }
        prop_assert!(isomorphic(&g, &relabeled, 2_000).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coset_counts_divide_the_group(
        (p, r, classes) in prop::sample::select(small_contents())
    ) {
        let map = construct_rotary_default(p, r, &classes).unwrap();
        let g = &map.group;
        let counts = map.counts();
        let rho_order = g.element_order(&map.rho) as u128;
        let face_order = g.element_order(&g.mul(&map.rho, &map.tau)) as u128;
        prop_assert_eq!(counts.vertices * rho_order, g.order());
        prop_assert_eq!(counts.edges * 2, g.order());
        prop_assert_eq!(counts.faces * face_order, g.order());
        prop_assert_eq!(
            counts.chi,
            counts.vertices as i128 - counts.edges as i128 + counts.faces as i128
        );
        let built = build_map(&map, 10_000).unwrap();
        prop_assert_eq!(built.graph.vertices as u128, counts.vertices);
        prop_assert!(built.graph.is_regular(2 * p));
    }

    #[test]
    fn map_isomorphism_is_reflexive_and_symmetric(
        (a, b) in prop::sample::select(small_contents()).prop_flat_map(|(p, r, _)| {
            let same_cell: Vec<Vec<IrrClass>> = small_contents()
                .into_iter()
                .filter(|&(q, t, _)| q == p && t == r)
                .map(|(_, _, set)| set)
                .collect();
            let count = same_cell.len();
            (0..count, 0..count).prop_map(move |(i, j)| {
                (
                    construct_rotary_default(p, r, &same_cell[i]).unwrap(),
                    construct_rotary_default(p, r, &same_cell[j]).unwrap(),
                )
            })
        })
    ) {
        prop_assert!(maps_isomorphic(&a, &a, 200_000).unwrap());
        prop_assert_eq!(
            maps_isomorphic(&a, &b, 200_000).unwrap(),
            maps_isomorphic(&b, &a, 200_000).unwrap()
        );
    }
}
