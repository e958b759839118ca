//! Reduced crossed products of finite C*-categories by finite groups acting
//! spatially, subgroup inclusions, and the categories `C[X]` of objects
//! placed at points of a finite G-set.
//!
//! An object `C` of `cat ⋊ G` lives on `⊕_{l ∈ G} H_{lC}` (slot `l` at offset
//! `l * dim C`). The generator attached to `f: C -> g⁻¹C'` and `g` is
//! `ρ(f, g) = Σ_l e_l^{C'} (lg)(f) e_{lg}^{C,*}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use crate::afunctor::build_a;
use crate::category::{CatFunctor, FinCStarCat, ObjIdx, ObjectInfo};
use crate::error::{Error, Result};
use crate::group::{FiniteGSet, GAction, GSetMap, Subgroup};
use crate::linalg::{seeded_rng, ComplexMatrix};
use crate::report::{Check, Report};

/// `cat ⋊_r G` with its generator map.
#[derive(Debug, Clone)]
pub struct CrossedProduct {
    pub cat: Arc<FinCStarCat>,
    pub action: GAction,
}

impl CrossedProduct {
    pub fn order(&self) -> usize {
        self.action.group.order()
    }

    /// `ρ(f, g)` for `f ∈ hom(s, g⁻¹ d)`.
    pub fn rho(&self, s: ObjIdx, d: ObjIdx, f: &ComplexMatrix, g: usize) -> Result<ComplexMatrix> {
        let act = &self.action;
        let grp = &act.group;
        let base = &act.cat;
        let gd = act.act_object(grp.inv(g), d);
        if f.shape() != (base.dim(gd), base.dim(s)) {
            return Err(Error::ShapeMismatch {
                expected: (base.dim(gd), base.dim(s)),
                got: f.shape(),
            });
        }
        Ok(rho_matrix(act, s, d, f, g))
    }

    /// Generators `ρ(b, g)` over bases `b` of `hom(s, g⁻¹ d)`, tagged with `g`.
    pub fn generators(&self, s: ObjIdx, d: ObjIdx) -> Vec<(usize, ComplexMatrix, ComplexMatrix)> {
        generators(&self.action, s, d)
    }
}

fn rho_matrix(act: &GAction, s: ObjIdx, d: ObjIdx, f: &ComplexMatrix, g: usize) -> ComplexMatrix {
    let grp = &act.group;
    let cat = &act.cat;
    let n = grp.order();
    let (ds, dd) = (cat.dim(s), cat.dim(d));
    let gd = act.act_object(grp.inv(g), d);
    let mut out = ComplexMatrix::zeros(n * dd, n * ds);
    for l in 0..n {
        let lg = grp.mul(l, g);
        let block = act.act(lg, s, gd, f);
        out.set_block(l * dd, lg * ds, &block);
    }
    out
}

fn generators(act: &GAction, s: ObjIdx, d: ObjIdx) -> Vec<(usize, ComplexMatrix, ComplexMatrix)> {
    let grp = &act.group;
    let mut out = Vec::new();
    for g in 0..grp.order() {
        let gd = act.act_object(grp.inv(g), d);
        for b in act.cat.hom(s, gd).basis() {
            out.push((g, b.clone(), rho_matrix(act, s, d, b, g)));
        }
    }
    out
}

/// Expected `dim hom(s, d)` in the crossed product: `Σ_g dim hom(s, g⁻¹ d)`.
pub fn expected_hom_dim(act: &GAction, s: ObjIdx, d: ObjIdx) -> usize {
    let grp = &act.group;
    (0..grp.order())
        .map(|g| act.cat.hom(s, act.act_object(grp.inv(g), d)).dim())
        .sum()
}

pub fn reduced_crossed_product(action: &GAction) -> Result<CrossedProduct> {
    let report = action.validate()?;
    if !report.passed() {
        let names: Vec<String> = report.failures().map(|c| c.to_string()).collect();
        return Err(Error::InvalidAction(names.join("; ")));
    }
    let cat = &action.cat;
    let n = action.group.order();
    let objects: Vec<ObjectInfo> = cat
        .objects()
        .iter()
        .map(|o| ObjectInfo {
            id: o.id.clone(),
            dim: n * o.dim,
        })
        .collect();
    // the generators are closed under products and adjoints by the relations
    let mut spans = Vec::new();
    for s in 0..cat.len() {
        for d in 0..cat.len() {
            spans.push((s, d, generators(action, s, d).into_iter().map(|(_, _, m)| m).collect()));
        }
    }
    let out = FinCStarCat::from_spans(objects, &spans, *cat.tol())?;
    for s in 0..cat.len() {
        for d in 0..cat.len() {
            let expected = expected_hom_dim(action, s, d);
            if out.hom(s, d).dim() != expected {
                return Err(Error::InvalidAction(format!(
                    "crossed product hom ({} -> {}) has dimension {}, expected {expected}",
                    cat.object(s).id,
                    cat.object(d).id,
                    out.hom(s, d).dim()
                )));
            }
        }
    }
    Ok(CrossedProduct {
        cat: Arc::new(out),
        action: action.clone(),
    })
}

/// `dim A(cat ⋊ G) = |G| dim A(cat)`: the canonical map from the maximal
/// (algebraic) crossed product is bijective.
pub fn max_equals_reduced_check(action: &GAction) -> Result<Report> {
    let cp = reduced_crossed_product(action)?;
    let lhs = build_a(&cp.cat).0.dim();
    let rhs = action.group.order() * build_a(&action.cat).0.dim();
    let mut r = Report::new("max = reduced");
    r.push(Check::flag("dim A(C ⋊ G) = |G| dim A(C)", lhs == rhs).with_detail(format!("{lhs} = {rhs}")));
    Ok(r)
}

/// Checks the multiplication and involution laws of the generators on
/// random composable pairs.
pub fn generator_relations_check(cp: &CrossedProduct, samples: usize, seed: u64) -> Result<Report> {
    let act = &cp.action;
    let grp = &act.group;
    let cat = &act.cat;
    let tol = cat.tol();
    let mut rng = seeded_rng(seed);
    let rel = |a: &ComplexMatrix, b: &ComplexMatrix| (a - b).hs_norm() / (1.0 + b.hs_norm());
    let (mut mult, mut inv) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let (s, c, d) = (
            rng.random_range(0..cat.len()),
            rng.random_range(0..cat.len()),
            rng.random_range(0..cat.len()),
        );
        let (g, g2) = (rng.random_range(0..grp.order()), rng.random_range(0..grp.order()));
        // f: s -> g⁻¹ c, f2: c -> g2⁻¹ d
        let f = cat.hom(s, act.act_object(grp.inv(g), c)).random_element(&mut rng);
        let f2 = cat.hom(c, act.act_object(grp.inv(g2), d)).random_element(&mut rng);
        let a = cp.rho(s, c, &f, g)?;
        let b = cp.rho(c, d, &f2, g2)?;
        // g⁻¹(f2) f : s -> g⁻¹ g2⁻¹ d
        let gi = grp.inv(g);
        let moved = act.act(gi, c, act.act_object(grp.inv(g2), d), &f2);
        let prod = cp.rho(s, d, &(&moved * &f), grp.mul(g2, g))?;
        mult = mult.max(rel(&(&b * &a), &prod));
        // ρ(f, g)* = ρ(g(f*), g⁻¹)
        let fstar = f.adjoint();
        let moved = act.act(g, act.act_object(gi, c), s, &fstar);
        inv = inv.max(rel(&a.adjoint(), &cp.rho(c, s, &moved, gi)?));
    }
    let mut r = Report::new("generator relations");
    r.push(Check::new("multiplication law", mult, tol.mem));
    r.push(Check::new("involution law", inv, tol.mem));
    Ok(r)
}

/// The inclusion `Res_H(cat) ⋊ H -> cat ⋊ G`, `ρ(f, h) ↦ ρ(f, h)`.
#[derive(Debug, Clone)]
pub struct SubgroupInclusion {
    pub source: CrossedProduct,
    pub target: CrossedProduct,
    pub functor: CatFunctor,
}

pub fn subgroup_inclusion(action: &GAction, h: &Subgroup) -> Result<SubgroupInclusion> {
    let h = Subgroup::from_elements(&action.group, h.elements())?;
    let (res, emb) = action.restrict(&h);
    let source = reduced_crossed_product(&res)?;
    let target = reduced_crossed_product(action)?;
    let n = action.cat.len();
    let mut gens = BTreeMap::new();
    for s in 0..n {
        for d in 0..n {
            let list = source
                .generators(s, d)
                .into_iter()
                .map(|(hl, f, m)| Ok((m, target.rho(s, d, &f, emb[hl])?)))
                .collect::<Result<Vec<_>>>()?;
            gens.insert((s, d), list);
        }
    }
    let functor = CatFunctor::from_generators(source.cat.clone(), target.cat.clone(), (0..n).collect(), &gens)?;
    Ok(SubgroupInclusion {
        source,
        target,
        functor,
    })
}

/// Functor axioms and norm preservation on `samples` random morphisms.
pub fn isometry_check(f: &CatFunctor, samples: usize, seed: u64) -> Result<Report> {
    let mut rng = seeded_rng(seed);
    let src = &f.source;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let (s, d) = (rng.random_range(0..src.len()), rng.random_range(0..src.len()));
        let x = src.hom(s, d).random_element(&mut rng);
        let y = f.apply(s, d, &x)?;
        let (a, b) = (x.operator_norm(), y.operator_norm());
        worst = worst.max((a - b).abs() / (1.0 + a));
    }
    let mut r = f.check_axioms();
    r.title = "isometric inclusion".into();
    r.push(Check::new("norm preserved", worst, 1e-8).with_detail(format!("{samples} samples")));
    Ok(r)
}

/// `D_X`: objects `C_x` for `C ∈ cat`, `x ∈ X` (index `x * |cat| + C`), with
/// `hom(C_x, C'_y) = hom(C, C')` if `x = y` and zero otherwise, and the
/// diagonal G-action `g(C_x) = (gC)_{gx}`.
#[derive(Debug, Clone)]
pub struct PointedCategory {
    pub base: GAction,
    pub gset: FiniteGSet,
    pub action: GAction,
}

impl PointedCategory {
    pub fn object(&self, k: ObjIdx, x: usize) -> ObjIdx {
        x * self.base.cat.len() + k
    }

    pub fn cat(&self) -> &Arc<FinCStarCat> {
        &self.action.cat
    }
}

pub fn c_of_gset(base: &GAction, gset: &FiniteGSet) -> Result<PointedCategory> {
    gset.validate(&base.group)?;
    let cat = &base.cat;
    let n = cat.len();
    let pts = gset.len();
    let mut objects = Vec::with_capacity(n * pts);
    for x in 0..pts {
        for k in 0..n {
            objects.push(ObjectInfo {
                id: format!("{}@{}", cat.object(k).id, gset.points[x]),
                dim: cat.dim(k),
            });
        }
    }
    let mut homs = Vec::with_capacity(n * pts);
    for x in 0..pts {
        for s in 0..n {
            let mut row = Vec::with_capacity(n * pts);
            for y in 0..pts {
                for d in 0..n {
                    row.push(if x == y {
                        cat.hom(s, d).clone()
                    } else {
                        crate::linalg::MatrixSubspace::zero(cat.dim(d), cat.dim(s))
                    });
                }
            }
            homs.push(row);
        }
    }
    let dx = Arc::new(FinCStarCat::from_homs(objects, homs, *cat.tol())?);
    let grp = &base.group;
    let perm = (0..grp.order())
        .map(|g| {
            (0..n * pts)
                .map(|i| gset.action[g][i / n] * n + base.act_object(g, i % n))
                .collect()
        })
        .collect();
    let intertwiners = (0..grp.order())
        .map(|g| (0..n * pts).map(|i| base.intertwiners[g][i % n].clone()).collect())
        .collect();
    let action = GAction::new(base.group.clone(), dx, perm, intertwiners)?;
    Ok(PointedCategory {
        base: base.clone(),
        gset: gset.clone(),
        action,
    })
}

/// `C[f]: D_X -> D_Y`, `C_x ↦ C_{f(x)}`, identity on morphism matrices.
pub fn induced_functor(dx: &PointedCategory, dy: &PointedCategory, f: &GSetMap) -> Result<CatFunctor> {
    let grp = &dx.base.group;
    let f = GSetMap::new(grp, &dx.gset, &dy.gset, f.map.clone())?;
    let n = dx.base.cat.len();
    let object_map = (0..dx.cat().len()).map(|i| dy.object(i % n, f.map[i / n])).collect();
    CatFunctor::from_matrix_map(dx.cat().clone(), dy.cat().clone(), object_map, |_, _, m| m.clone())
}

/// For an equivariant functor `F`, the functor `F ⋊ G` on crossed products:
/// `ρ(f, g) ↦ ρ(F f, g)`.
pub fn crossed_functor(f: &CatFunctor, source: &CrossedProduct, target: &CrossedProduct) -> Result<CatFunctor> {
    let sa = &source.action;
    let ta = &target.action;
    if sa.group.table() != ta.group.table() {
        return Err(Error::InvalidFunctor("crossed products over different groups".into()));
    }
    let grp = &sa.group;
    let tol = f.target.tol();
    // equivariance on objects and on morphisms
    for g in 0..grp.order() {
        for k in 0..sa.cat.len() {
            if f.object_map[sa.act_object(g, k)] != ta.act_object(g, f.object_map[k]) {
                return Err(Error::NotEquivariant);
            }
        }
        for s in 0..sa.cat.len() {
            for d in 0..sa.cat.len() {
                for b in sa.cat.hom(s, d).basis() {
                    let lhs = f.apply(sa.act_object(g, s), sa.act_object(g, d), &sa.act(g, s, d, b))?;
                    let rhs = ta.act(g, f.object_map[s], f.object_map[d], &f.apply(s, d, b)?);
                    if (&lhs - &rhs).hs_norm() > tol.mem_bound(rhs.hs_norm()) {
                        return Err(Error::NotEquivariant);
                    }
                }
            }
        }
    }
    let n = sa.cat.len();
    let mut gens = BTreeMap::new();
    for s in 0..n {
        for d in 0..n {
            let gd = |g: usize| sa.act_object(grp.inv(g), d);
            let list = source
                .generators(s, d)
                .into_iter()
                .map(|(g, b, m)| {
                    let fb = f.apply(s, gd(g), &b)?;
                    Ok((m, target.rho(f.object_map[s], f.object_map[d], &fb, g)?))
                })
                .collect::<Result<Vec<_>>>()?;
            gens.insert((s, d), list);
        }
    }
    CatFunctor::from_generators(
        source.cat.clone(),
        target.cat.clone(),
        f.object_map.clone(),
        &gens,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{find_unitary_iso, validate};
    use crate::group::{CosetSpace, FiniteGroup};
    use crate::linalg::{Tolerances, C64};

    fn obj(id: &str, dim: usize) -> ObjectInfo {
        ObjectInfo { id: id.into(), dim }
    }

    fn scalar() -> Arc<FinCStarCat> {
        Arc::new(FinCStarCat::full(vec![obj("c", 1)], Tolerances::default()).unwrap())
    }

    fn two_points() -> Arc<FinCStarCat> {
        Arc::new(FinCStarCat::generated(vec![obj("a", 1), obj("b", 1)], &[], Tolerances::default()).unwrap())
    }

    #[test]
    fn trivial_group_recovers_category() {
        let cat = Arc::new(FinCStarCat::full(vec![obj("a", 1), obj("b", 2)], Tolerances::default()).unwrap());
        let act = GAction::trivial(Arc::new(FiniteGroup::trivial()), cat.clone());
        let cp = reduced_crossed_product(&act).unwrap();
        for s in 0..2 {
            for d in 0..2 {
                assert_eq!(cp.cat.hom(s, d).dim(), cat.hom(s, d).dim());
            }
        }
        assert!(max_equals_reduced_check(&act).unwrap().passed());
    }

    #[test]
    fn scalar_by_z2_is_group_algebra() {
        let act = GAction::trivial(Arc::new(FiniteGroup::cyclic(2)), scalar());
        let cp = reduced_crossed_product(&act).unwrap();
        assert_eq!(cp.cat.hom(0, 0).dim(), 2);
        let swap = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let one = ComplexMatrix::identity(1);
        assert!(cp.rho(0, 0, &one, 1).unwrap().dist(&swap) < 1e-14);
        assert!(cp.rho(0, 0, &one, 0).unwrap().dist(&ComplexMatrix::identity(2)) < 1e-14);
        assert!(validate(&cp.cat).passed());
        assert!(max_equals_reduced_check(&act).unwrap().passed());
    }

    #[test]
    fn swap_action_dimensions() {
        let z2 = Arc::new(FiniteGroup::cyclic(2));
        // disconnected objects: A = C ⊕ C, crossed product of dimension 4
        let act = GAction::permutation(z2.clone(), two_points(), vec![vec![0, 1], vec![1, 0]]).unwrap();
        let cp = reduced_crossed_product(&act).unwrap();
        assert_eq!(build_a(&cp.cat).0.dim(), 4);
        // connected objects: A = M2, crossed product of dimension 8
        let full = Arc::new(FinCStarCat::full(vec![obj("a", 1), obj("b", 1)], Tolerances::default()).unwrap());
        let act = GAction::permutation(z2, full, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let cp = reduced_crossed_product(&act).unwrap();
        assert_eq!(build_a(&cp.cat).0.dim(), 8);
        assert!(validate(&cp.cat).passed());
        assert!(max_equals_reduced_check(&act).unwrap().passed());
        assert!(generator_relations_check(&cp, 20, 3).unwrap().passed());
    }

    #[test]
    fn twisted_action_relations() {
        // Z/2 acting on M2 (one object of dim 2) by conjugation with diag(1, -1)
        let cat = Arc::new(FinCStarCat::full(vec![obj("m", 2)], Tolerances::default()).unwrap());
        let v = ComplexMatrix::diag(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]);
        let act = GAction::new(
            Arc::new(FiniteGroup::cyclic(2)),
            cat,
            vec![vec![0], vec![0]],
            vec![vec![ComplexMatrix::identity(2)], vec![v]],
        )
        .unwrap();
        let cp = reduced_crossed_product(&act).unwrap();
        assert!(validate(&cp.cat).passed());
        assert!(generator_relations_check(&cp, 30, 11).unwrap().passed());
    }

    #[test]
    fn inclusions_are_isometric() {
        let z4 = Arc::new(FiniteGroup::cyclic(4));
        let act = GAction::trivial(z4.clone(), scalar());
        let h = Subgroup::generated(&z4, &[2]);
        let inc = subgroup_inclusion(&act, &h).unwrap();
        let r = isometry_check(&inc.functor, 20, 5).unwrap();
        assert!(r.passed(), "{r}");
        let whole = subgroup_inclusion(&act, &Subgroup::whole(&z4)).unwrap();
        assert!(isometry_check(&whole.functor, 10, 5).unwrap().passed());
        let triv = subgroup_inclusion(&act, &Subgroup::trivial(&z4)).unwrap();
        assert!(isometry_check(&triv.functor, 10, 5).unwrap().passed());
        assert!(subgroup_inclusion(&act, &Subgroup::generated(&z4, &[1]).clone()).is_ok());
    }

    #[test]
    fn pointed_categories() {
        let z2 = Arc::new(FiniteGroup::cyclic(2));
        let act = GAction::trivial(z2.clone(), scalar());
        let point = FiniteGSet::point()(&z2);
        let d = c_of_gset(&act, &point).unwrap();
        assert_eq!(d.cat().len(), 1);
        let free = CosetSpace::new(&z2, &Subgroup::trivial(&z2));
        let d2 = c_of_gset(&act, &free.gset).unwrap();
        assert_eq!(d2.cat().len(), 2);
        assert_eq!(d2.cat().hom(0, 1).dim(), 0);
        assert!(validate(d2.cat()).passed());
        assert!(find_unitary_iso(d2.cat(), 0, 1, 1).unitary().is_none());
        // collapse G/e -> G/G
        let f = GSetMap::new(&z2, &free.gset, &point, vec![0, 0]).unwrap();
        let cf = induced_functor(&d2, &d, &f).unwrap();
        assert!(cf.check_axioms().passed());
        let s = reduced_crossed_product(&d2.action).unwrap();
        let t = reduced_crossed_product(&d.action).unwrap();
        let cross = crossed_functor(&cf, &s, &t).unwrap();
        assert!(cross.check_axioms().passed());
    }
}
