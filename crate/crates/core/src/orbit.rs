//! The orbit functor `G/H ↦ K0(C ⋊ H)` on a finite group, its values on
//! orbit morphisms through `C[G/H] ⋊ G`, and the comparison checks that go
//! with it.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::afunctor::{build_a, AlgebraMap};
use crate::category::{CatFunctor, FinCStarCat, ObjectInfo};
use crate::crossed::{
    c_of_gset, crossed_functor, induced_functor, max_equals_reduced_check, reduced_crossed_product,
    subgroup_inclusion, CrossedProduct, PointedCategory,
};
use crate::error::{Error, Result};
use crate::group::{orbit_maps, subgroups, CosetSpace, GAction, GSetMap, Subgroup};
use crate::intmat::IntMatrix;
use crate::ktheory::{functor_k0_map, k0_group, k0_map, k0_of_category, K0Data};
use crate::linalg::{singular_values, ComplexMatrix, MatrixSubspace};
use crate::morita::{functor_k0, morita_verdict_with, Verdict};
use crate::report::{Check, Report};

/// `K0(Res_H(cat) ⋊ H)`.
pub fn orbit_value(action: &GAction, h: &Subgroup, seed: u64) -> Result<K0Data> {
    let h = Subgroup::from_elements(&action.group, h.elements())?;
    let (res, _) = action.restrict(&h);
    let cp = reduced_crossed_product(&res)?;
    k0_of_category(&cp.cat, seed)
}

/// `i_H: Res_H(cat) ⋊ H -> D_{G/H} ⋊ G`, `C ↦ C_{eH}`, `ρ(f, h) ↦ ρ(f, h)`.
#[derive(Debug, Clone)]
pub struct BasePointInclusion {
    pub cosets: CosetSpace,
    pub source: CrossedProduct,
    pub pointed: PointedCategory,
    pub target: CrossedProduct,
    pub functor: CatFunctor,
}

pub fn i_h_functor(action: &GAction, h: &Subgroup) -> Result<BasePointInclusion> {
    let grp = &action.group;
    let h = Subgroup::from_elements(grp, h.elements())?;
    let cosets = CosetSpace::new(grp, &h);
    let (res, emb) = action.restrict(&h);
    let source = reduced_crossed_product(&res)?;
    let pointed = c_of_gset(action, &cosets.gset)?;
    let target = reduced_crossed_product(&pointed.action)?;
    let n = action.cat.len();
    let object_map: Vec<usize> = (0..n).map(|k| pointed.object(k, 0)).collect();
    let mut gens = BTreeMap::new();
    for s in 0..n {
        for d in 0..n {
            let list = source
                .generators(s, d)
                .into_iter()
                .map(|(hl, f, m)| Ok((m, target.rho(object_map[s], object_map[d], &f, emb[hl])?)))
                .collect::<Result<Vec<_>>>()?;
            gens.insert((s, d), list);
        }
    }
    let functor = CatFunctor::from_generators(source.cat.clone(), target.cat.clone(), object_map, &gens)?;
    Ok(BasePointInclusion {
        cosets,
        source,
        pointed,
        target,
        functor,
    })
}

/// Everything needed to evaluate the orbit functor at `G/H`.
#[derive(Debug, Clone)]
pub struct OrbitSite {
    pub inclusion: BasePointInclusion,
    pub value: K0Data,
    pub big: K0Data,
    /// K0 matrix of `i_H`.
    pub m_h: IntMatrix,
    pub verdict: Verdict,
}

impl OrbitSite {
    pub fn new(action: &GAction, h: &Subgroup, seed: u64) -> Result<Self> {
        let inclusion = i_h_functor(action, h)?;
        let value = k0_of_category(&inclusion.source.cat, seed)?;
        let big = k0_of_category(&inclusion.target.cat, seed)?;
        let m_h = functor_k0(&inclusion.functor, &value, &big, seed)?;
        let verdict = morita_verdict_with(&inclusion.functor, &big)?.verdict;
        Ok(OrbitSite {
            inclusion,
            value,
            big,
            m_h,
            verdict,
        })
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.inclusion.cosets.subgroup
    }
}

pub fn verify_i_h_morita(action: &GAction, h: &Subgroup, seed: u64) -> Result<Report> {
    let site = OrbitSite::new(action, h, seed)?;
    Ok(site_report(&site))
}

fn site_report(site: &OrbitSite) -> Report {
    let mut r = Report::new(format!("i_H Morita for H = {}", site.subgroup().label()));
    r.push(Check::flag("Morita equivalence", site.verdict == Verdict::Yes));
    r.push(Check::flag("K0 isomorphism", site.m_h.is_isomorphism()).with_detail(format!("K0 matrix {}", site.m_h)));
    r
}

/// The K0 matrix `K0(C ⋊ H) -> K0(C ⋊ K)` of a G-map `f: G/H -> G/K`,
/// `M_K⁻¹ · K0(C[f] ⋊ G) · M_H`.
pub fn orbit_map(from: &OrbitSite, to: &OrbitSite, f: &GSetMap, seed: u64) -> Result<IntMatrix> {
    let cf = induced_functor(&from.inclusion.pointed, &to.inclusion.pointed, f)?;
    let big = crossed_functor(&cf, &from.inclusion.target, &to.inclusion.target)?;
    let m_f = functor_k0_map(&big, &from.big, &to.big, seed)?;
    let inv = to
        .m_h
        .inverse()
        .ok_or_else(|| Error::InvalidFunctor(format!("i_H for {} is not a K0 isomorphism", to.subgroup().label())))?;
    Ok(inv.mul(&m_f).mul(&from.m_h))
}

#[derive(Debug, Clone)]
pub struct OrbitValue {
    pub subgroup: Subgroup,
    pub conjugates: Vec<Subgroup>,
    pub k0: K0Data,
}

#[derive(Debug, Clone)]
pub struct OrbitMorphism {
    pub from: usize,
    pub to: usize,
    pub map: GSetMap,
    pub matrix: IntMatrix,
}

#[derive(Debug, Clone)]
pub struct OrbitReport {
    pub group_order: usize,
    pub values: Vec<OrbitValue>,
    pub morphisms: Vec<OrbitMorphism>,
    pub checks: Report,
}

/// Evaluates the orbit functor on conjugacy-class representatives of
/// subgroups and on all G-maps between their orbits, with the comparison
/// checks (max = reduced, i_H Morita, A-crossed isomorphism, functoriality,
/// naturality of i_H, conjugacy invariance).
pub fn orbit_report(action: &GAction, seed: u64) -> Result<OrbitReport> {
    let grp = &action.group;
    let lattice = subgroups(grp)?;
    let mut checks = Report::new("orbit functor");
    checks.push(Check::flag("A-crossed isomorphism", a_crossed_iso_check(action, seed)?.passed()));
    let mut sites = Vec::new();
    let mut values = Vec::new();
    for class in &lattice.classes {
        let h = &lattice.subgroups[class[0]];
        let (res, _) = action.restrict(h);
        checks.push(Check::flag(
            format!("max = reduced at {}", h.label()),
            max_equals_reduced_check(&res)?.passed(),
        ));
        let site = OrbitSite::new(action, h, seed)?;
        let sr = site_report(&site);
        checks.push(Check::flag(format!("i_H Morita at {}", h.label()), sr.passed()));
        let multiset = site.value.block_multiset();
        let mut invariant = true;
        let mut conjugates = Vec::new();
        for &j in &class[1..] {
            let other = &lattice.subgroups[j];
            invariant &= orbit_value(action, other, seed)?.block_multiset() == multiset;
            conjugates.push(other.clone());
        }
        checks.push(Check::flag(format!("conjugacy invariance at {}", h.label()), invariant));
        values.push(OrbitValue {
            subgroup: h.clone(),
            conjugates,
            k0: site.value.clone(),
        });
        sites.push(site);
    }
    let mut morphisms = Vec::new();
    let mut lookup: BTreeMap<(usize, usize, Vec<usize>), usize> = BTreeMap::new();
    for (a, sa) in sites.iter().enumerate() {
        for (b, sb) in sites.iter().enumerate() {
            for f in orbit_maps(grp, &sa.inclusion.cosets, &sb.inclusion.cosets) {
                let matrix = orbit_map(sa, sb, &f, seed)?;
                lookup.insert((a, b, f.map.clone()), morphisms.len());
                morphisms.push(OrbitMorphism {
                    from: a,
                    to: b,
                    map: f,
                    matrix,
                });
            }
        }
    }
    // identities
    let ids_ok = morphisms
        .iter()
        .filter(|m| m.from == m.to && m.map.map.iter().enumerate().all(|(i, &j)| i == j))
        .all(|m| m.matrix == IntMatrix::identity(m.matrix.rows()));
    checks.push(Check::flag("identities", ids_ok));
    // composites
    let mut pairs = 0usize;
    let mut bad = 0usize;
    for m1 in &morphisms {
        for m2 in morphisms.iter().filter(|m| m.from == m1.to) {
            let comp = m1.map.then(&m2.map);
            let k = lookup[&(m1.from, m2.to, comp.map)];
            pairs += 1;
            if morphisms[k].matrix != m2.matrix.mul(&m1.matrix) {
                bad += 1;
            }
        }
    }
    checks.push(Check::flag("functoriality", bad == 0).with_detail(format!("{pairs} composable pairs, {bad} failures")));
    // naturality of i_H against subgroup inclusions H ⊆ K
    let mut squares = 0usize;
    let mut bad = 0usize;
    for (a, sa) in sites.iter().enumerate() {
        for (b, sb) in sites.iter().enumerate() {
            if a == b || !sa.subgroup().is_subset_of(sb.subgroup()) {
                continue;
            }
            let proj: Vec<usize> = sa
                .inclusion
                .cosets
                .cosets
                .iter()
                .map(|c| sb.inclusion.cosets.coset_of(c[0]))
                .collect();
            let k = lookup[&(a, b, proj)];
            let inc = subgroup_level_map(action, sa, sb, seed)?;
            squares += 1;
            if inc != morphisms[k].matrix {
                bad += 1;
            }
        }
    }
    checks.push(Check::flag("naturality of i_H", bad == 0).with_detail(format!("{squares} squares, {bad} failures")));
    Ok(OrbitReport {
        group_order: grp.order(),
        values,
        morphisms,
        checks,
    })
}

/// K0 of the subgroup inclusion `C ⋊ H -> C ⋊ K` for `H ⊆ K`, read in the
/// bases of the two orbit values.
fn subgroup_level_map(action: &GAction, small: &OrbitSite, large: &OrbitSite, seed: u64) -> Result<IntMatrix> {
    let (res, emb) = action.restrict(large.subgroup());
    let local: Vec<usize> = small
        .subgroup()
        .elements()
        .iter()
        .map(|a| emb.binary_search(a).expect("subgroup of K"))
        .collect();
    let h = Subgroup::from_elements(&res.group, &local)?;
    let inc = subgroup_inclusion(&res, &h)?;
    functor_k0(&inc.functor, &small.value, &large.value, seed)
}

/// `A(K ⋊ G) ≅ A(K) ⋊ G`, with `A(K) ⋊ G` realized as the crossed product of
/// the one-object category on `⊕ H_C` with endomorphisms `A(K)` and the
/// action `x ↦ V_g x V_g*`. The isomorphism is conjugation by a permutation
/// unitary reordering `(C, l)` slots into `(l, lC)` slots.
pub fn a_crossed_iso_check(action: &GAction, seed: u64) -> Result<Report> {
    let grp = action.group.clone();
    let cat = &action.cat;
    let order = grp.order();
    let tol = *cat.tol();
    let lhs_cp = reduced_crossed_product(action)?;
    let lhs = Arc::new(build_a(&lhs_cp.cat).0);

    let (ak, idx) = build_a(cat);
    let total = idx.total();
    let v: Vec<ComplexMatrix> = (0..order)
        .map(|g| {
            let mut m = ComplexMatrix::zeros(total, total);
            for c in 0..cat.len() {
                let gc = action.act_object(g, c);
                m.set_block(idx.range(gc).start, idx.range(c).start, &action.intertwiners[g][c]);
            }
            m
        })
        .collect();
    let one = FinCStarCat::from_homs(
        vec![ObjectInfo {
            id: "A".into(),
            dim: total,
        }],
        vec![vec![MatrixSubspace::from_orthonormal(total, total, ak.space.basis().to_vec())]],
        tol,
    )?;
    let one_action = GAction::new(grp.clone(), Arc::new(one), vec![vec![0]; order], v.into_iter().map(|m| vec![m]).collect())?;
    let rhs_cp = reduced_crossed_product(&one_action)?;
    let rhs = Arc::new(build_a(&rhs_cp.cat).0);

    // W sends slot l of object C (LHS) to slot l, block lC (RHS)
    let n = order * total;
    let mut w = ComplexMatrix::zeros(n, n);
    let mut lhs_off = 0;
    for c in 0..cat.len() {
        let dc = cat.dim(c);
        for l in 0..order {
            let lc = action.act_object(l, c);
            let dst = l * total + idx.range(lc).start;
            for i in 0..dc {
                w.set(dst + i, lhs_off + l * dc + i, crate::linalg::C64::new(1.0, 0.0));
            }
        }
        lhs_off += order * dc;
    }
    let conj = |x: &ComplexMatrix| &(&w * x) * &w.adjoint();
    let mut worst = 0.0f64;
    for b in lhs.space.basis() {
        let y = conj(b);
        worst = worst.max(rhs.space.residual(&y)? / (1.0 + y.hs_norm()));
    }
    let mut r = Report::new("A-crossed isomorphism");
    r.push(Check::flag("equal dimensions", lhs.dim() == rhs.dim()).with_detail(format!("{} and {}", lhs.dim(), rhs.dim())));
    r.push(Check::new("image in A(K) ⋊ G", worst, tol.mem_bound(1.0)));
    if worst > tol.mem_bound(1.0) {
        return Ok(r);
    }
    let phi = AlgebraMap::from_fn(lhs.clone(), rhs.clone(), conj)?;
    let sv = singular_values(&phi.coeffs);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    r.push(Check::flag("bijective", lhs.dim() == rhs.dim() && (lhs.dim() == 0 || smin > tol.rank)).with_detail(format!("smallest singular value {smin:.3e}")));
    r.push(Check::new("*-homomorphism", phi.star_hom_defect(8, seed)?, tol.mem_bound(1.0)));
    let k_lhs = k0_group(lhs, seed)?;
    let k_rhs = k0_group(rhs, seed)?;
    let m = k0_map(&phi, &k_lhs, &k_rhs, seed)?;
    r.push(
        Check::flag("K0 match", m.is_isomorphism() && k_lhs.block_multiset() == k_rhs.block_multiset())
            .with_detail(format!("K0 matrix {m}")),
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::FinCStarCat;
    use crate::group::FiniteGroup;
    use crate::linalg::{Tolerances, C64};

    fn obj(id: &str, dim: usize) -> ObjectInfo {
        ObjectInfo { id: id.into(), dim }
    }

    fn scalar_action(g: FiniteGroup) -> GAction {
        let cat = Arc::new(FinCStarCat::full(vec![obj("c", 1)], Tolerances::default()).unwrap());
        GAction::trivial(Arc::new(g), cat)
    }

    #[test]
    fn values_on_z2() {
        let act = scalar_action(FiniteGroup::cyclic(2));
        let g = &act.group;
        assert_eq!(orbit_value(&act, &Subgroup::trivial(g), 1).unwrap().rank(), 1);
        assert_eq!(orbit_value(&act, &Subgroup::whole(g), 1).unwrap().rank(), 2);
    }

    #[test]
    fn swap_value_is_m2() {
        let z2 = Arc::new(FiniteGroup::cyclic(2));
        let cat = Arc::new(FinCStarCat::generated(vec![obj("a", 1), obj("b", 1)], &[], Tolerances::default()).unwrap());
        let act = GAction::permutation(z2.clone(), cat, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let k0 = orbit_value(&act, &Subgroup::whole(&z2), 2).unwrap();
        assert_eq!(k0.rank(), 1);
        assert_eq!(k0.block_sizes(), vec![2]);
    }

    #[test]
    fn i_h_is_morita() {
        let act = scalar_action(FiniteGroup::cyclic(2));
        let g = act.group.clone();
        for h in [Subgroup::trivial(&g), Subgroup::whole(&g)] {
            let r = verify_i_h_morita(&act, &h, 3).unwrap();
            assert!(r.passed(), "{r}");
        }
        let s3 = scalar_action(FiniteGroup::symmetric(3));
        let z3 = Subgroup::generated(&s3.group, &[3]);
        assert_eq!(z3.order(), 3);
        assert!(verify_i_h_morita(&s3, &z3, 3).unwrap().passed());
    }

    #[test]
    fn induction_column_on_z2() {
        let act = scalar_action(FiniteGroup::cyclic(2));
        let g = act.group.clone();
        let e = OrbitSite::new(&act, &Subgroup::trivial(&g), 4).unwrap();
        let whole = OrbitSite::new(&act, &Subgroup::whole(&g), 4).unwrap();
        let f = orbit_maps(&g, &e.inclusion.cosets, &whole.inclusion.cosets);
        assert_eq!(f.len(), 1);
        let m = orbit_map(&e, &whole, &f[0], 4).unwrap();
        assert_eq!(m, IntMatrix::from_rows(&[vec![1], vec![1]]));
        let id = GSetMap { map: vec![0, 1] };
        assert_eq!(orbit_map(&e, &e, &id, 4).unwrap(), IntMatrix::identity(1));
    }

    #[test]
    fn normalizer_map_permutes() {
        // right multiplication on G/e for G = Z/3 permutes nothing on K0(C) = Z
        let act = scalar_action(FiniteGroup::cyclic(3));
        let g = act.group.clone();
        let e = OrbitSite::new(&act, &Subgroup::trivial(&g), 5).unwrap();
        for f in orbit_maps(&g, &e.inclusion.cosets, &e.inclusion.cosets) {
            let m = orbit_map(&e, &e, &f, 5).unwrap();
            assert!(m.is_permutation());
        }
    }

    #[test]
    fn report_on_z2_and_s3() {
        for g in [FiniteGroup::cyclic(2), FiniteGroup::symmetric(3)] {
            let act = scalar_action(g);
            let r = orbit_report(&act, 6).unwrap();
            assert!(r.checks.passed(), "{}", r.checks);
        }
    }

    #[test]
    fn a_crossed_examples() {
        let triv = scalar_action(FiniteGroup::trivial());
        assert!(a_crossed_iso_check(&triv, 1).unwrap().passed());
        let z2 = scalar_action(FiniteGroup::cyclic(2));
        assert!(a_crossed_iso_check(&z2, 1).unwrap().passed());
        let grp = Arc::new(FiniteGroup::cyclic(2));
        let full = Arc::new(FinCStarCat::full(vec![obj("a", 1), obj("b", 1)], Tolerances::default()).unwrap());
        let swap = GAction::permutation(grp.clone(), full, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let r = a_crossed_iso_check(&swap, 1).unwrap();
        assert!(r.passed(), "{r}");
        // twisted: the generator acts on a 2-dim object by diag(1, -1)
        let c2 = Arc::new(FinCStarCat::full(vec![obj("v", 2)], Tolerances::default()).unwrap());
        let d = ComplexMatrix::diag(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]);
        let tw = GAction::new(grp, c2, vec![vec![0], vec![0]], vec![vec![ComplexMatrix::identity(2)], vec![d]]).unwrap();
        assert!(a_crossed_iso_check(&tw, 1).unwrap().passed());
    }
}
