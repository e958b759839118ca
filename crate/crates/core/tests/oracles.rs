//! Cross-checks against independent computations: class counting and
//! character degrees of small groups, Fourier idempotents of cyclic group
//! algebras, power iteration for operator norms, and the known block
//! structure of typed categories.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::sync::Arc;

use cstarcat::afunctor::build_a;
use cstarcat::category::{FinCStarCat, ObjectInfo};
use cstarcat::crossed::reduced_crossed_product;
use cstarcat::group::{FiniteGroup, GAction};
use cstarcat::ktheory::{k0_of_category, wedderburn};
use cstarcat::linalg::seeded_rng;
use cstarcat::orbit::orbit_value;
use cstarcat::samples::random_typed_category;
use cstarcat::{ComplexMatrix, Tolerances, C64};

/// Number of conjugacy classes as `|{(x, y) : xy = yx}| / |G|`.
fn commuting_pairs_classes(g: &FiniteGroup) -> usize {
    let n = g.order();
    let pairs = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .filter(|&(x, y)| g.mul(x, y) == g.mul(y, x))
        .count();
    pairs / n
}

/// Order of the commutator subgroup, by closing the set of commutators.
fn derived_order(g: &FiniteGroup) -> usize {
    let n = g.order();
    let mut set: BTreeSet<usize> = BTreeSet::from([g.identity()]);
    for x in 0..n {
        for y in 0..n {
            set.insert(g.mul(g.mul(x, y), g.mul(g.inv(x), g.inv(y))));
        }
    }
    loop {
        let items: Vec<usize> = set.iter().copied().collect();
        let before = set.len();
        for &a in &items {
            for &b in &items {
                set.insert(g.mul(a, b));
            }
        }
        if set.len() == before {
            return set.len();
        }
    }
}

/// Character degrees when they are forced by `Σ d² = |G|`, the class count
/// and the number of linear characters (enough for the groups used here).
fn character_degrees(g: &FiniteGroup) -> Vec<usize> {
    let k = commuting_pairs_classes(g);
    let linear = g.order() / derived_order(g);
    let mut out = vec![1; linear];
    match k - linear {
        0 => {}
        1 => {
            let d = (((g.order() - linear) as f64).sqrt()).round() as usize;
            assert_eq!(d * d, g.order() - linear);
            out.push(d);
        }
        _ => panic!("degrees not determined by the oracle"),
    }
    out
}

fn scalar() -> Arc<FinCStarCat> {
    Arc::new(
        FinCStarCat::full(
            vec![ObjectInfo {
                id: "c".into(),
                dim: 1,
            }],
            Tolerances::default(),
        )
        .unwrap(),
    )
}

fn groups() -> Vec<(&'static str, FiniteGroup)> {
    vec![
        ("Z1", FiniteGroup::trivial()),
        ("Z2", FiniteGroup::cyclic(2)),
        ("Z3", FiniteGroup::cyclic(3)),
        ("Z4", FiniteGroup::cyclic(4)),
        ("Z5", FiniteGroup::cyclic(5)),
        ("Z6", FiniteGroup::cyclic(6)),
        ("Z2xZ2", FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2))),
        ("S3", FiniteGroup::symmetric(3)),
    ]
}

#[test]
fn group_algebras_match_character_theory() {
    for (name, g) in groups() {
        let mut degrees = character_degrees(&g);
        degrees.sort_unstable();
        let act = GAction::trivial(Arc::new(g), scalar());
        let cp = reduced_crossed_product(&act).unwrap();
        let k0 = k0_of_category(&cp.cat, 17).unwrap();
        assert_eq!(k0.rank(), degrees.len(), "{name}");
        assert_eq!(k0.block_multiset(), degrees, "{name}");
        // the regular representation contains each irreducible d times
        for b in &k0.wedderburn.blocks {
            assert_eq!(b.m, b.n, "{name}");
        }
    }
}

#[test]
fn class_count_agrees_with_group_module() {
    for (name, g) in groups() {
        assert_eq!(g.conjugacy_classes().len(), commuting_pairs_classes(&g), "{name}");
    }
}

#[test]
fn cyclic_idempotents_are_fourier_projections() {
    for n in 2..=5 {
        let act = GAction::trivial(Arc::new(FiniteGroup::cyclic(n)), scalar());
        let cp = reduced_crossed_product(&act).unwrap();
        let (a, _) = build_a(&cp.cat);
        let w = wedderburn(&a, 5).unwrap();
        let u = cp.rho(0, 0, &ComplexMatrix::identity(1), 1).unwrap();
        let mut powers = vec![ComplexMatrix::identity(n)];
        for j in 1..n {
            powers.push(&powers[j - 1] * &u);
        }
        let fourier: Vec<ComplexMatrix> = (0..n)
            .map(|k| {
                powers.iter().enumerate().fold(ComplexMatrix::zeros(n, n), |acc, (j, p)| {
                    let phase = C64::from_polar(1.0 / n as f64, 2.0 * PI * (j * k) as f64 / n as f64);
                    &acc + &p.scale_c(phase)
                })
            })
            .collect();
        for b in &w.blocks {
            let best = fourier.iter().map(|e| e.dist(&b.z)).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-9, "n = {n}: distance {best}");
        }
        assert_eq!(w.blocks.len(), n);
    }
}

fn power_iteration_norm(m: &ComplexMatrix) -> f64 {
    let g = &m.adjoint() * m;
    let n = g.rows();
    let mut v = ComplexMatrix::from_fn(n, 1, |i, _| C64::new(1.0 + i as f64 * 0.37, 0.11 * i as f64));
    let mut lambda = 0.0f64;
    for _ in 0..2000 {
        let w = &g * &v;
        let norm = w.hs_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = (&v.adjoint() * &w).get(0, 0).re / v.hs_norm().powi(2);
        v = w.scale(1.0 / norm);
        if (next - lambda).abs() < 1e-15 * next.abs().max(1.0) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda.max(0.0).sqrt()
}

#[test]
fn operator_norm_and_c_star_identity() {
    let mut rng = seeded_rng(23);
    for _ in 0..10 {
        let t = random_typed_category(&mut rng, 3, 2, 3).unwrap();
        let (a, _) = build_a(&t.cat);
        for _ in 0..10 {
            let x = a.random_element(&mut rng);
            let oracle = power_iteration_norm(&x);
            let norm = x.operator_norm();
            assert!((oracle - norm).abs() <= 1e-8 * (1.0 + norm), "{oracle} vs {norm}");
            let xx = &x.adjoint() * &x;
            assert!((power_iteration_norm(&xx) - oracle * oracle).abs() <= 1e-8 * (1.0 + oracle * oracle));
        }
    }
}

#[test]
fn typed_categories_have_known_blocks() {
    let mut rng = seeded_rng(29);
    for _ in 0..25 {
        let t = random_typed_category(&mut rng, 3, 3, 4).unwrap();
        let (a, _) = build_a(&t.cat);
        let w = wedderburn(&a, 31).unwrap();
        let mut got: Vec<(usize, usize)> = w.blocks.iter().map(|b| (b.n, b.m)).collect();
        got.sort_unstable();
        assert_eq!(got, t.expected_blocks(), "mu = {:?}, types = {:?}", t.mu, t.type_dims);
    }
}

#[test]
fn swap_on_two_points_is_a_matrix_algebra() {
    // transformation groupoid of Z/2 acting freely on two points: one orbit,
    // trivial stabilizer, so the crossed product is M_2
    let cat = Arc::new(
        FinCStarCat::generated(
            vec![
                ObjectInfo {
                    id: "a".into(),
                    dim: 1,
                },
                ObjectInfo {
                    id: "b".into(),
                    dim: 1,
                },
            ],
            &[],
            Tolerances::default(),
        )
        .unwrap(),
    );
    let z2 = Arc::new(FiniteGroup::cyclic(2));
    let act = GAction::permutation(z2.clone(), cat, vec![vec![0, 1], vec![1, 0]]).unwrap();
    let k0 = orbit_value(&act, &cstarcat::group::Subgroup::whole(&z2), 3).unwrap();
    assert_eq!(k0.block_sizes(), vec![2]);
}
