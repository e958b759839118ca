//! Finite orthogonal sums, images of projections, and finite
//! materializations of the additive, idempotent and relative idempotent
//! completions.

use std::sync::Arc;

use crate::category::{CatFunctor, FinCStarCat, Ideal, Morphism, ObjIdx};
use crate::error::{Error, Result};
use crate::linalg::{range_basis, seeded_rng, ComplexMatrix, MatrixSubspace};
use crate::report::{Check, Report};

/// Subset enumeration cap for [`square_summable_bound_check`].
pub const MAX_SUBSET_FAMILY: usize = 16;

/// A sum object together with its structure isometries `e_i: C_i -> S`.
#[derive(Debug, Clone)]
pub struct SumPresentation {
    pub cat: Arc<FinCStarCat>,
    pub sum: ObjIdx,
    pub family: Vec<(ObjIdx, Morphism)>,
}

impl SumPresentation {
    pub fn summand_ids(&self) -> Vec<&str> {
        self.family.iter().map(|(k, _)| self.cat.object(*k).id.as_str()).collect()
    }

    /// Same presentation with the family reordered by `perm` (new position
    /// `i` holds old member `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> SumPresentation {
        SumPresentation {
            cat: self.cat.clone(),
            sum: self.sum,
            family: perm.iter().map(|&i| self.family[i].clone()).collect(),
        }
    }

    /// `p_J = Σ_{j∈J} e_j e_j*`.
    pub fn partial_projection(&self, subset: &[usize]) -> ComplexMatrix {
        let n = self.cat.dim(self.sum);
        subset.iter().fold(ComplexMatrix::zeros(n, n), |acc, &j| {
            let e = &self.family[j].1.matrix;
            &acc + &(e * &e.adjoint())
        })
    }
}

/// An object of `Idem(C)`: a base object with a projection in its endomorphisms.
#[derive(Debug, Clone)]
pub struct IdemObject {
    pub base: ObjIdx,
    pub projection: ComplexMatrix,
}

impl IdemObject {
    pub fn identity(cat: &FinCStarCat, base: ObjIdx) -> IdemObject {
        IdemObject {
            base,
            projection: ComplexMatrix::identity(cat.dim(base)),
        }
    }
}

fn fresh_id(cat: &FinCStarCat, stem: String) -> String {
    if cat.idx(&stem).is_err() {
        return stem;
    }
    (2..)
        .map(|k| format!("{stem}#{k}"))
        .find(|id| cat.idx(id).is_err())
        .expect("unbounded suffixes")
}

/// Adjoins an orthogonal sum of the listed objects (repeats allowed; the
/// empty family gives a zero object of dimension 0).
pub fn direct_sum(cat: &FinCStarCat, summands: &[ObjIdx]) -> Result<(Arc<FinCStarCat>, SumPresentation)> {
    for &k in summands {
        if k >= cat.len() {
            return Err(Error::UnknownObject(format!("#{k}")));
        }
    }
    let ids: Vec<&str> = summands.iter().map(|&k| cat.object(k).id.as_str()).collect();
    let id = fresh_id(cat, format!("⊕({})", ids.join(",")));
    let dims: Vec<usize> = summands.iter().map(|&k| cat.dim(k)).collect();
    let total: usize = dims.iter().sum();
    let mut offsets = Vec::with_capacity(dims.len());
    let mut acc = 0;
    for d in &dims {
        offsets.push(acc);
        acc += d;
    }
    let iso = |i: usize| ComplexMatrix::identity(dims[i]).embed(total, dims[i], offsets[i], 0);
    let n = cat.len();
    let mut to_new = vec![Vec::new(); n];
    let mut from_new = vec![Vec::new(); n];
    let mut end_new = Vec::new();
    for (i, &ci) in summands.iter().enumerate() {
        let e = iso(i);
        for k in 0..n {
            to_new[k].extend(cat.hom(k, ci).basis().iter().map(|h| &e * h));
            from_new[k].extend(cat.hom(ci, k).basis().iter().map(|h| h * &e.adjoint()));
        }
        for (j, &cj) in summands.iter().enumerate() {
            let f = iso(j);
            end_new.extend(cat.hom(cj, ci).basis().iter().map(|h| &(&e * h) * &f.adjoint()));
        }
    }
    let (ext, s) = cat.extend_closed(id, total, to_new, from_new, end_new)?;
    let ext = Arc::new(ext);
    let family = summands
        .iter()
        .enumerate()
        .map(|(i, &ci)| {
            (
                ci,
                Morphism {
                    src: ci,
                    dst: s,
                    matrix: iso(i),
                },
            )
        })
        .collect();
    Ok((
        ext.clone(),
        SumPresentation {
            cat: ext,
            sum: s,
            family,
        },
    ))
}

/// The three sum axioms plus the universal property, sampled on random
/// families out of every object.
pub fn verify_orthogonal_sum(p: &SumPresentation, seed: u64) -> Report {
    let cat = &p.cat;
    let tol = cat.tol();
    let rel = |a: &ComplexMatrix, b: &ComplexMatrix| (a - b).hs_norm() / (1.0 + b.hs_norm());
    let mut report = Report::new("orthogonal sum");

    let mut iso = 0.0f64;
    let mut member = 0.0f64;
    for (ci, e) in &p.family {
        iso = iso.max(rel(&(&e.matrix.adjoint() * &e.matrix), &ComplexMatrix::identity(cat.dim(*ci))));
        let r = cat.hom(*ci, p.sum).residual(&e.matrix).unwrap_or(f64::INFINITY);
        member = member.max(r / (1.0 + e.matrix.hs_norm()));
    }
    report.push(Check::new("structure maps are morphisms", member, tol.mem));
    report.push(Check::new("isometries", iso, tol.mem));

    let mut orth = 0.0f64;
    for (i, (_, ei)) in p.family.iter().enumerate() {
        for (j, (_, ej)) in p.family.iter().enumerate() {
            if i != j {
                orth = orth.max((&ej.matrix.adjoint() * &ei.matrix).hs_norm());
            }
        }
    }
    report.push(Check::new("mutual orthogonality", orth, tol.mem));

    let all: Vec<usize> = (0..p.family.len()).collect();
    let proj = p.partial_projection(&all);
    let id = ComplexMatrix::identity(cat.dim(p.sum));
    report.push(Check::new("completeness", rel(&proj, &id), tol.mem));

    // universal property: h = Σ e_i h_i restricts to h_j, and any h is
    // recovered from its components
    let mut rng = seeded_rng(seed);
    let mut restrict = 0.0f64;
    let mut unique = 0.0f64;
    for d in 0..cat.len() {
        let hs: Vec<ComplexMatrix> = p
            .family
            .iter()
            .map(|(ci, _)| cat.hom(d, *ci).random_element(&mut rng))
            .collect();
        let mut h = ComplexMatrix::zeros(cat.dim(p.sum), cat.dim(d));
        for ((_, e), hi) in p.family.iter().zip(&hs) {
            h = &h + &(&e.matrix * hi);
        }
        for ((_, e), hi) in p.family.iter().zip(&hs) {
            restrict = restrict.max(rel(&(&e.matrix.adjoint() * &h), hi));
        }
        let g = cat.hom(d, p.sum).random_element(&mut rng);
        let mut rebuilt = ComplexMatrix::zeros(g.rows(), g.cols());
        for (_, e) in &p.family {
            rebuilt = &rebuilt + &(&e.matrix * &(&e.matrix.adjoint() * &g));
        }
        unique = unique.max(rel(&rebuilt, &g));
    }
    report.push(Check::new("universal property", restrict, tol.mem));
    report.push(Check::new("uniqueness", unique, tol.mem));
    report
}

/// `v = Σ e'_i e_i*`, the comparison unitary between two sums of the same
/// family living in one category.
pub fn sum_comparison_unitary(p1: &SumPresentation, p2: &SumPresentation) -> Result<Morphism> {
    if p1.summand_ids() != p2.summand_ids() {
        return Err(Error::FamilyMismatch);
    }
    let cat = &p2.cat;
    let src = cat.idx(&p1.cat.object(p1.sum).id)?;
    let mut v = ComplexMatrix::zeros(cat.dim(p2.sum), cat.dim(src));
    for ((_, e1), (_, e2)) in p1.family.iter().zip(&p2.family) {
        v = &v + &(&e2.matrix * &e1.matrix.adjoint());
    }
    let tol = cat.tol();
    let bound = tol.mem_bound(v.hs_norm());
    let d1 = (&(&v.adjoint() * &v) - &ComplexMatrix::identity(v.cols())).hs_norm();
    let d2 = (&(&v * &v.adjoint()) - &ComplexMatrix::identity(v.rows())).hs_norm();
    if d1.max(d2) > bound {
        return Err(Error::InvalidCategory(format!(
            "comparison map is not unitary (defect {:.3e})",
            d1.max(d2)
        )));
    }
    cat.morphism(src, p2.sum, v)
}

/// Checks `|h|² = |Σ h_i* h_i|` for `h = Σ e_i h_i`.
pub fn norm_formula_check(p: &SumPresentation, family: &[Morphism]) -> Result<Report> {
    if family.len() != p.family.len() || family.iter().zip(&p.family).any(|(h, (ci, _))| h.dst != *ci) {
        return Err(Error::FamilyMismatch);
    }
    let Some(first) = family.first() else {
        let mut r = Report::new("norm formula");
        r.push(Check::new("norm formula", 0.0, 1e-7));
        return Ok(r);
    };
    if family.iter().any(|h| h.src != first.src) {
        return Err(Error::DomainMismatch);
    }
    let d = p.cat.dim(first.src);
    let mut h = ComplexMatrix::zeros(p.cat.dim(p.sum), d);
    let mut gram = ComplexMatrix::zeros(d, d);
    for (hi, (_, e)) in family.iter().zip(&p.family) {
        h = &h + &(&e.matrix * &hi.matrix);
        gram = &gram + &(&hi.matrix.adjoint() * &hi.matrix);
    }
    let lhs = h.operator_norm().powi(2);
    let rhs = gram.operator_norm();
    let mut r = Report::new("norm formula");
    r.push(
        Check::new("norm formula", (lhs - rhs).abs() / (1.0 + lhs), 1e-7)
            .with_detail(format!("|h|^2 = {lhs:.12}, |Σ h_i* h_i| = {rhs:.12}")),
    );
    Ok(r)
}

/// Checks `|Σ_{i∈J} h_i* h_i| ≤ sup_{i∈J} |h_i|²` on every nonempty subset `J`
/// of a family whose adjoints are mutually orthogonal.
pub fn square_summable_bound_check(family: &[Morphism], tol: f64) -> Result<Report> {
    if family.len() > MAX_SUBSET_FAMILY {
        return Err(Error::InvalidCategory(format!(
            "family of {} exceeds subset enumeration cap {MAX_SUBSET_FAMILY}",
            family.len()
        )));
    }
    if let Some(first) = family.first() {
        if family.iter().any(|h| h.src != first.src || h.matrix.cols() != first.matrix.cols()) {
            return Err(Error::DomainMismatch);
        }
    }
    let mut orth = 0.0f64;
    for (i, hi) in family.iter().enumerate() {
        for (j, hj) in family.iter().enumerate() {
            if i != j && hj.matrix.rows() == hi.matrix.rows() && hj.dst == hi.dst {
                let scale = 1.0 + hi.matrix.hs_norm() * hj.matrix.hs_norm();
                orth = orth.max((&hj.matrix * &hi.matrix.adjoint()).hs_norm() / scale);
            }
        }
    }
    if orth > tol {
        return Err(Error::NotMutuallyOrthogonal(orth));
    }
    let n = family.len();
    let norms: Vec<f64> = family.iter().map(|h| h.norm().powi(2)).collect();
    let mut worst = 0.0f64;
    for mask in 1u32..(1u32 << n) {
        let members: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let d = family[0].matrix.cols();
        let mut acc = ComplexMatrix::zeros(d, d);
        for &i in &members {
            acc = &acc + &(&family[i].matrix.adjoint() * &family[i].matrix);
        }
        let bound = members.iter().map(|&i| norms[i]).fold(0.0, f64::max);
        let excess = (acc.operator_norm() - bound) / (1.0 + bound);
        worst = worst.max(excess);
    }
    let mut r = Report::new("square summability");
    r.push(Check::new("subset bound", worst.max(0.0), tol).with_detail(format!("{} subsets", (1u64 << n) - 1)));
    Ok(r)
}

/// Adjoins an image `(D, u)` of a projection with `u u* = p`, `u* u = id_D`.
pub fn image_of_projection(cat: &FinCStarCat, obj: &IdemObject) -> Result<(Arc<FinCStarCat>, Morphism)> {
    let c = obj.base;
    if c >= cat.len() {
        return Err(Error::UnknownObject(format!("#{c}")));
    }
    let p = &obj.projection;
    let tol = cat.tol();
    if p.shape() != (cat.dim(c), cat.dim(c)) {
        return Err(Error::ShapeMismatch {
            expected: (cat.dim(c), cat.dim(c)),
            got: p.shape(),
        });
    }
    let defect = crate::ktheory::projection_defect(p).max(cat.hom(c, c).residual(p)?);
    if defect > tol.mem_bound(p.hs_norm()) {
        return Err(Error::NotAProjection(defect));
    }
    let u = range_basis(&p.hermitian_part(), 0.5)?;
    let n = cat.len();
    let mut to_new = vec![Vec::new(); n];
    let mut from_new = vec![Vec::new(); n];
    for k in 0..n {
        to_new[k] = cat.hom(k, c).basis().iter().map(|h| &u.adjoint() * h).collect();
        from_new[k] = cat.hom(c, k).basis().iter().map(|h| h * &u).collect();
    }
    let end_new = cat.hom(c, c).basis().iter().map(|h| &(&u.adjoint() * h) * &u).collect();
    let id = fresh_id(cat, format!("Im({})", cat.object(c).id));
    let (ext, d) = cat.extend_with(id, u.cols(), to_new, from_new, end_new)?;
    Ok((
        Arc::new(ext),
        Morphism {
            src: d,
            dst: c,
            matrix: u,
        },
    ))
}

/// A finite full subcategory of a completion, with the canonical inclusion of
/// the base category (whose objects come first).
#[derive(Debug, Clone)]
pub struct Materialized {
    pub cat: Arc<FinCStarCat>,
    pub inclusion: CatFunctor,
}

/// `C_⊕`: finite tuples of objects with block-matrix morphisms.
#[derive(Debug, Clone)]
pub struct AdditiveCompletion {
    pub base: Arc<FinCStarCat>,
}

/// `Idem(C)`: pairs `(C, p)` with morphisms `p' hom(C, C') p`.
#[derive(Debug, Clone)]
pub struct IdemCompletion {
    pub base: Arc<FinCStarCat>,
}

/// `C^♯ = Idem(C_⊕)`.
#[derive(Debug, Clone)]
pub struct SharpCompletion {
    pub base: Arc<FinCStarCat>,
}

/// `Idem^C(K)` for an ideal `K` of a unital `C`: objects of `Idem(C)`,
/// morphisms intersected with `K`.
#[derive(Debug, Clone)]
pub struct RelativeIdemCompletion {
    pub base: Arc<FinCStarCat>,
    pub ideal: Ideal,
}

pub fn additive_completion(cat: Arc<FinCStarCat>) -> AdditiveCompletion {
    AdditiveCompletion { base: cat }
}

pub fn idem_completion(cat: Arc<FinCStarCat>) -> IdemCompletion {
    IdemCompletion { base: cat }
}

pub fn sharp(cat: Arc<FinCStarCat>) -> SharpCompletion {
    SharpCompletion { base: cat }
}

pub fn relative_idem_completion(cat: Arc<FinCStarCat>, ideal: Ideal) -> Result<RelativeIdemCompletion> {
    ideal.validate(&cat)?;
    Ok(RelativeIdemCompletion { base: cat, ideal })
}

fn tuple_offsets(cat: &FinCStarCat, t: &[ObjIdx]) -> (Vec<usize>, usize) {
    let mut offs = Vec::with_capacity(t.len());
    let mut acc = 0;
    for &k in t {
        offs.push(acc);
        acc += cat.dim(k);
    }
    (offs, acc)
}

fn tuple_id(cat: &FinCStarCat, t: &[ObjIdx]) -> String {
    let ids: Vec<&str> = t.iter().map(|&k| cat.object(k).id.as_str()).collect();
    format!("[{}]", ids.join(","))
}

fn inclusion_functor(base: &Arc<FinCStarCat>, cat: &Arc<FinCStarCat>) -> Result<CatFunctor> {
    CatFunctor::from_matrix_map(base.clone(), cat.clone(), (0..base.len()).collect(), |_, _, m| m.clone())
}

fn distinct(ids: Vec<String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(ids.len());
    for id in ids {
        let mut candidate = id.clone();
        let mut k = 2;
        while out.contains(&candidate) {
            candidate = format!("{id}#{k}");
            k += 1;
        }
        out.push(candidate);
    }
    out
}

impl AdditiveCompletion {
    /// Morphism space between tuples: block matrices with `(j, i)` block in
    /// `hom(a_i, b_j)`.
    pub fn hom(&self, a: &[ObjIdx], b: &[ObjIdx]) -> MatrixSubspace {
        let cat = &self.base;
        let (oa, da) = tuple_offsets(cat, a);
        let (ob, db) = tuple_offsets(cat, b);
        let mut basis = Vec::new();
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                basis.extend(cat.hom(ai, bj).basis().iter().map(|h| h.embed(db, da, ob[j], oa[i])));
            }
        }
        MatrixSubspace::from_orthonormal(db, da, basis)
    }

    /// Base objects (as singletons) followed by the given tuples.
    pub fn materialize(&self, tuples: &[Vec<ObjIdx>]) -> Result<Materialized> {
        let cat = &self.base;
        for t in tuples {
            if let Some(&k) = t.iter().find(|&&k| k >= cat.len()) {
                return Err(Error::UnknownObject(format!("#{k}")));
            }
        }
        let all: Vec<Vec<ObjIdx>> = (0..cat.len()).map(|k| vec![k]).chain(tuples.iter().cloned()).collect();
        let ids = distinct(
            (0..cat.len())
                .map(|k| cat.object(k).id.clone())
                .chain(tuples.iter().map(|t| tuple_id(cat, t)))
                .collect(),
        );
        let objects = all
            .iter()
            .zip(ids)
            .map(|(t, id)| crate::category::ObjectInfo {
                id,
                dim: tuple_offsets(cat, t).1,
            })
            .collect();
        let homs = all.iter().map(|a| all.iter().map(|b| self.hom(a, b)).collect()).collect();
        let out = Arc::new(FinCStarCat::from_homs(objects, homs, *cat.tol())?);
        let inclusion = inclusion_functor(cat, &out)?;
        Ok(Materialized { cat: out, inclusion })
    }
}

/// Compressed morphism spaces `u_b* (p_b S p_a) u_a` for idempotent objects
/// over an ambient category given by `hom`.
fn compressed_homs(
    objs: &[IdemObject],
    isos: &[ComplexMatrix],
    hom: impl Fn(ObjIdx, ObjIdx) -> MatrixSubspace,
    tol: &crate::linalg::Tolerances,
) -> Result<Vec<Vec<MatrixSubspace>>> {
    let mut homs = Vec::with_capacity(objs.len());
    for (a, ua) in objs.iter().zip(isos) {
        let mut row = Vec::with_capacity(objs.len());
        for (b, ub) in objs.iter().zip(isos) {
            let imgs: Vec<ComplexMatrix> = hom(a.base, b.base)
                .basis()
                .iter()
                .map(|h| &(&ub.adjoint() * h) * ua)
                .collect();
            row.push(MatrixSubspace::span(ub.cols(), ua.cols(), &imgs, tol)?);
        }
        homs.push(row);
    }
    Ok(homs)
}

fn check_projection(space: &MatrixSubspace, p: &ComplexMatrix, tol: &crate::linalg::Tolerances) -> Result<()> {
    if p.shape() != space.shape() {
        return Err(Error::ShapeMismatch {
            expected: space.shape(),
            got: p.shape(),
        });
    }
    let defect = crate::ktheory::projection_defect(p).max(space.residual(p)?);
    if defect > tol.mem_bound(p.hs_norm()) {
        return Err(Error::NotAProjection(defect));
    }
    Ok(())
}

fn materialize_idem(
    base: &Arc<FinCStarCat>,
    ambient_ids: &dyn Fn(ObjIdx) -> String,
    ambient_hom: &dyn Fn(ObjIdx, ObjIdx) -> MatrixSubspace,
    base_count: usize,
    extra: &[IdemObject],
) -> Result<(Arc<FinCStarCat>, Vec<IdemObject>, Vec<ComplexMatrix>)> {
    let tol = *base.tol();
    for o in extra {
        check_projection(&ambient_hom(o.base, o.base), &o.projection, &tol)?;
    }
    let all: Vec<IdemObject> = (0..base_count)
        .map(|k| IdemObject {
            base: k,
            projection: ComplexMatrix::identity(base.dim(k)),
        })
        .chain(extra.iter().cloned())
        .collect();
    let isos = all
        .iter()
        .enumerate()
        .map(|(i, o)| {
            if i < base_count {
                Ok(ComplexMatrix::identity(o.projection.rows()))
            } else {
                range_basis(&o.projection.hermitian_part(), 0.5)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let ids = distinct(
        all.iter()
            .enumerate()
            .map(|(i, o)| {
                if i < base_count {
                    base.object(i).id.clone()
                } else {
                    format!("({},p{})", ambient_ids(o.base), i - base_count)
                }
            })
            .collect(),
    );
    let objects = ids
        .into_iter()
        .zip(&isos)
        .map(|(id, u)| crate::category::ObjectInfo { id, dim: u.cols() })
        .collect();
    let homs = compressed_homs(&all, &isos, ambient_hom, &tol)?;
    let out = Arc::new(FinCStarCat::from_homs(objects, homs, tol)?);
    Ok((out, all, isos))
}

impl IdemCompletion {
    /// Morphisms `(C, p) -> (C', p')` as the subspace `p' hom(C, C') p`.
    pub fn hom(&self, a: &IdemObject, b: &IdemObject) -> Result<MatrixSubspace> {
        let cat = &self.base;
        let imgs: Vec<ComplexMatrix> = cat
            .hom(a.base, b.base)
            .basis()
            .iter()
            .map(|h| &(&b.projection * h) * &a.projection)
            .collect();
        MatrixSubspace::span(cat.dim(b.base), cat.dim(a.base), &imgs, cat.tol())
    }

    /// Base objects as `(C, id)` followed by the given pairs, each realized
    /// on the range of its projection.
    pub fn materialize(&self, extra: &[IdemObject]) -> Result<Materialized> {
        let base = &self.base;
        let (cat, _, _) = materialize_idem(
            base,
            &|k| base.object(k).id.clone(),
            &|s, d| base.hom(s, d).clone(),
            base.len(),
            extra,
        )?;
        let inclusion = inclusion_functor(base, &cat)?;
        Ok(Materialized { cat, inclusion })
    }
}

/// An object of `C^♯`: a tuple with a projection on its block space.
#[derive(Debug, Clone)]
pub struct SharpObject {
    pub tuple: Vec<ObjIdx>,
    pub projection: ComplexMatrix,
}

impl SharpCompletion {
    /// Base objects as `([C], id)` followed by the given objects.
    pub fn materialize(&self, extra: &[SharpObject]) -> Result<Materialized> {
        let base = &self.base;
        let add = AdditiveCompletion { base: base.clone() };
        let tuples: Vec<Vec<ObjIdx>> = (0..base.len())
            .map(|k| vec![k])
            .chain(extra.iter().map(|o| o.tuple.clone()))
            .collect();
        for t in &tuples {
            if let Some(&k) = t.iter().find(|&&k| k >= base.len()) {
                return Err(Error::UnknownObject(format!("#{k}")));
            }
        }
        let idem_extra: Vec<IdemObject> = extra
            .iter()
            .enumerate()
            .map(|(i, o)| IdemObject {
                base: base.len() + i,
                projection: o.projection.clone(),
            })
            .collect();
        let (cat, _, _) = materialize_idem(
            base,
            &|k| tuple_id(base, &tuples[k]),
            &|s, d| add.hom(&tuples[s], &tuples[d]),
            base.len(),
            &idem_extra,
        )?;
        let inclusion = inclusion_functor(base, &cat)?;
        Ok(Materialized { cat, inclusion })
    }
}

/// A materialized relative idempotent completion: the ambient `Idem(C)`
/// subcategory and the ideal `Idem^C(K)` inside it.
#[derive(Debug, Clone)]
pub struct MaterializedRelative {
    pub ambient: Materialized,
    pub ideal: Ideal,
}

impl RelativeIdemCompletion {
    /// `(p' hom(C, C') p) ∩ K(C, C')`.
    pub fn hom(&self, a: &IdemObject, b: &IdemObject) -> Result<MatrixSubspace> {
        let full = IdemCompletion { base: self.base.clone() }.hom(a, b)?;
        full.intersect(&self.ideal.homs[a.base][b.base], self.base.tol())
    }

    pub fn materialize(&self, extra: &[IdemObject]) -> Result<MaterializedRelative> {
        let base = &self.base;
        let tol = *base.tol();
        let (cat, all, isos) = materialize_idem(
            base,
            &|k| base.object(k).id.clone(),
            &|s, d| base.hom(s, d).clone(),
            base.len(),
            extra,
        )?;
        let mut homs = Vec::with_capacity(all.len());
        for (a, ua) in all.iter().zip(&isos) {
            let mut row = Vec::with_capacity(all.len());
            for (b, ub) in all.iter().zip(&isos) {
                let meet = self.hom(a, b)?;
                let imgs: Vec<ComplexMatrix> = meet.basis().iter().map(|h| &(&ub.adjoint() * h) * ua).collect();
                row.push(MatrixSubspace::span(ub.cols(), ua.cols(), &imgs, &tol)?);
            }
            homs.push(row);
        }
        let ideal = Ideal { homs };
        ideal.validate(&cat)?;
        let inclusion = inclusion_functor(base, &cat)?;
        Ok(MaterializedRelative {
            ambient: Materialized { cat, inclusion },
            ideal,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{find_unitary_iso, is_fully_faithful, validate, ObjectInfo};
    use crate::linalg::{Tolerances, C64};
    use proptest::prelude::*;

    fn obj(id: &str, dim: usize) -> ObjectInfo {
        ObjectInfo { id: id.into(), dim }
    }

    fn full(dims: &[usize]) -> FinCStarCat {
        let objs = dims.iter().enumerate().map(|(i, &d)| obj(&format!("o{i}"), d)).collect();
        FinCStarCat::full(objs, Tolerances::default()).unwrap()
    }

    #[test]
    fn empty_sum_is_zero_object() {
        let cat = full(&[1]);
        let (ext, p) = direct_sum(&cat, &[]).unwrap();
        assert_eq!(ext.dim(p.sum), 0);
        assert_eq!(ext.identity(p.sum).norm(), 0.0);
        assert!(validate(&ext).passed());
        assert!(verify_orthogonal_sum(&p, 1).passed());
        assert_eq!(ext.hom(0, p.sum).dim(), 0);
    }

    #[test]
    fn single_summand_is_isomorphic() {
        let cat = full(&[2]);
        let (ext, p) = direct_sum(&cat, &[0]).unwrap();
        assert!(verify_orthogonal_sum(&p, 1).passed());
        let u = find_unitary_iso(&ext, 0, p.sum, 3);
        assert!(u.unitary().is_some());
    }

    #[test]
    fn sum_of_two_scalars_has_m2_endomorphisms() {
        let cat = full(&[1]);
        let (ext, p) = direct_sum(&cat, &[0, 0]).unwrap();
        assert_eq!(ext.dim(p.sum), 2);
        assert_eq!(ext.hom(p.sum, p.sum).dim(), 4);
        assert!(validate(&ext).passed());
        let r = verify_orthogonal_sum(&p, 7);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn dropping_a_summand_breaks_completeness() {
        let cat = full(&[1, 2]);
        let (_, p) = direct_sum(&cat, &[0, 1]).unwrap();
        let mut broken = p.clone();
        broken.family.pop();
        let r = verify_orthogonal_sum(&broken, 1);
        assert!(!r.get("completeness").unwrap().passed);
        assert!(r.get("isometries").unwrap().passed);
    }

    #[test]
    fn comparison_unitaries() {
        let cat = full(&[1, 2]);
        let (ext, p1) = direct_sum(&cat, &[0, 1]).unwrap();
        let v = sum_comparison_unitary(&p1, &p1).unwrap();
        assert!(v.matrix.dist(&ComplexMatrix::identity(3)) < 1e-12);
        let (ext2, p2) = direct_sum(&ext, &[0, 1]).unwrap();
        let v = sum_comparison_unitary(&p1, &p2).unwrap();
        for ((_, e1), (_, e2)) in p1.family.iter().zip(&p2.family) {
            assert!((&v.matrix * &e1.matrix).dist(&e2.matrix) < 1e-10);
        }
        // the opposite direction is the adjoint
        let p1_in_2 = SumPresentation {
            cat: ext2.clone(),
            sum: p1.sum,
            family: p1.family.clone(),
        };
        let w = sum_comparison_unitary(&p2, &p1_in_2).unwrap();
        assert!(w.matrix.dist(&v.matrix.adjoint()) < 1e-12);
        let (_, p3) = direct_sum(&ext2, &[1, 0]).unwrap();
        assert!(matches!(sum_comparison_unitary(&p1, &p3), Err(Error::FamilyMismatch)));
    }

    #[test]
    fn swapping_equal_summands_gives_block_swap() {
        let cat = full(&[1]);
        let (_, p) = direct_sum(&cat, &[0, 0]).unwrap();
        let v = sum_comparison_unitary(&p, &p.permuted(&[1, 0])).unwrap();
        let swap = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(v.matrix.dist(&swap) < 1e-12);
    }

    #[test]
    fn norm_formula_examples() {
        let cat = full(&[1]);
        let (ext, p) = direct_sum(&cat, &[0]).unwrap();
        let r = norm_formula_check(&p, &[ext.identity(0)]).unwrap();
        assert!(r.passed());
        let (ext, p) = direct_sum(&cat, &[0, 0]).unwrap();
        let h1 = ext.identity(0);
        let h2 = Morphism {
            matrix: ComplexMatrix::identity(1).scale(2.0),
            ..ext.identity(0)
        };
        let r = norm_formula_check(&p, &[h1, h2]).unwrap();
        assert!(r.passed());
        assert!(r.checks[0].detail.contains("5.0000"));
    }

    #[test]
    fn norm_formula_rejects_mixed_domains() {
        let cat = full(&[1, 2]);
        let (ext, p) = direct_sum(&cat, &[0, 0]).unwrap();
        let mut rng = seeded_rng(1);
        let a = ext.random_morphism(0, 0, &mut rng);
        let b = ext.random_morphism(1, 0, &mut rng);
        assert!(matches!(norm_formula_check(&p, &[a, b]), Err(Error::DomainMismatch)));
    }

    #[test]
    fn square_summable_examples() {
        let cat = full(&[1, 2]);
        let e1 = Morphism {
            src: 1,
            dst: 0,
            matrix: ComplexMatrix::unit(1, 2, 0, 0),
        };
        let e2 = Morphism {
            src: 1,
            dst: 0,
            matrix: ComplexMatrix::unit(1, 2, 0, 1).scale(0.5),
        };
        let r = square_summable_bound_check(&[e1.clone(), e2.clone()], 1e-8).unwrap();
        assert!(r.passed(), "{r}");
        let bad = Morphism {
            matrix: ComplexMatrix::from_real_rows(&[vec![1.0, 1.0]]),
            ..e1.clone()
        };
        assert!(matches!(
            square_summable_bound_check(&[e1, bad], 1e-8),
            Err(Error::NotMutuallyOrthogonal(_))
        ));
        let _ = cat;
    }

    #[test]
    fn images_of_projections() {
        let cat = full(&[2]);
        let id = IdemObject::identity(&cat, 0);
        let (ext, u) = image_of_projection(&cat, &id).unwrap();
        assert!(find_unitary_iso(&ext, 0, u.src, 1).unitary().is_some());
        let zero = IdemObject {
            base: 0,
            projection: ComplexMatrix::zeros(2, 2),
        };
        let (ext, u) = image_of_projection(&cat, &zero).unwrap();
        assert_eq!(ext.dim(u.src), 0);
        let e11 = IdemObject {
            base: 0,
            projection: ComplexMatrix::unit(2, 2, 0, 0),
        };
        let (ext, u) = image_of_projection(&cat, &e11).unwrap();
        assert_eq!(ext.dim(u.src), 1);
        assert!((&u.matrix * &u.matrix.adjoint()).dist(&e11.projection) < 1e-12);
        assert!(validate(&ext).passed());
        let not_proj = IdemObject {
            base: 0,
            projection: ComplexMatrix::unit(2, 2, 0, 1),
        };
        assert!(matches!(image_of_projection(&cat, &not_proj), Err(Error::NotAProjection(_))));
    }

    fn diagonal_c2() -> Arc<FinCStarCat> {
        let tol = Tolerances::default();
        let d = |a: f64, b: f64| ComplexMatrix::diag(&[C64::new(a, 0.0), C64::new(b, 0.0)]);
        Arc::new(FinCStarCat::generated(vec![obj("c", 2)], &[(0, 0, d(1.0, 0.0))], tol).unwrap())
    }

    #[test]
    fn completions_materialize() {
        let c = Arc::new(full(&[1]));
        let add = additive_completion(c.clone()).materialize(&[vec![0, 0, 0]]).unwrap();
        assert_eq!(add.cat.hom(1, 1).dim(), 9);
        assert!(validate(&add.cat).passed());
        assert!(is_fully_faithful(&add.inclusion));

        let d = diagonal_c2();
        let idem = idem_completion(d.clone())
            .materialize(&[IdemObject {
                base: 0,
                projection: ComplexMatrix::unit(2, 2, 0, 0),
            }])
            .unwrap();
        assert_eq!(idem.cat.hom(1, 1).dim(), 1);
        assert!(validate(&idem.cat).passed());

        let sh = sharp(c)
            .materialize(&[SharpObject {
                tuple: vec![0, 0],
                projection: ComplexMatrix::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]),
            }])
            .unwrap();
        assert_eq!(sh.cat.dim(1), 1);
        assert!(validate(&sh.cat).passed());
        assert!(find_unitary_iso(&sh.cat, 0, 1, 4).unitary().is_some());
    }

    #[test]
    fn relative_completion_examples() {
        let d = diagonal_c2();
        let whole = relative_idem_completion(d.clone(), Ideal::whole(&d)).unwrap();
        let m = whole.materialize(&[]).unwrap();
        assert_eq!(m.ideal.homs[0][0].dim(), 2);
        let zero = relative_idem_completion(d.clone(), Ideal::zero(&d)).unwrap();
        assert!(zero.materialize(&[]).unwrap().ideal.is_zero());
        let first = d.morphism(0, 0, ComplexMatrix::unit(2, 2, 0, 0)).unwrap();
        let k = Ideal::generated(&d, &[first]).unwrap();
        let rel = relative_idem_completion(d.clone(), k).unwrap();
        let m = rel.materialize(&[]).unwrap();
        assert_eq!(m.ideal.homs[0][0].dim(), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn sums_verify_and_partitions_cohere(seed in 0u64..10_000, picks in proptest::collection::vec(0usize..3, 1..4)) {
            let cat = full(&[1, 2, 1]);
            let (ext, p) = direct_sum(&cat, &picks).unwrap();
            prop_assert!(verify_orthogonal_sum(&p, seed).passed());
            // p_J is a projection whose image is a sum of the subfamily
            let subset: Vec<usize> = (0..picks.len()).filter(|i| (seed >> i) & 1 == 1).collect();
            let pj = p.partial_projection(&subset);
            prop_assert!(crate::ktheory::projection_defect(&pj) < 1e-10);
            let (ext2, u) = image_of_projection(&ext, &IdemObject { base: p.sum, projection: pj.clone() }).unwrap();
            prop_assert!((&u.matrix * &u.matrix.adjoint()).dist(&pj) < 1e-9);
            let family = subset
                .iter()
                .map(|&j| {
                    let (ci, e) = &p.family[j];
                    (*ci, Morphism { src: *ci, dst: u.src, matrix: &u.matrix.adjoint() * &e.matrix })
                })
                .collect();
            let sub = SumPresentation { cat: ext2, sum: u.src, family };
            let r = verify_orthogonal_sum(&sub, seed);
            prop_assert!(r.passed(), "{}", r);
        }

        #[test]
        fn norm_formula_random(seed in 0u64..10_000) {
            let cat = full(&[1, 2, 2]);
            let (ext, p) = direct_sum(&cat, &[0, 1, 2, 1]).unwrap();
            let mut rng = seeded_rng(seed);
            let family: Vec<Morphism> = p.family.iter().map(|(ci, _)| ext.random_morphism(1, *ci, &mut rng)).collect();
            prop_assert!(norm_formula_check(&p, &family).unwrap().passed());
        }
    }
}
