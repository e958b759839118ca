//! Concrete finite-dimensional C*-categories.
//!
//! An object is a label together with the dimension of the Hilbert space it
//! acts on; the morphisms `C -> C'` form a subspace of `dim(C') x dim(C)`
//! matrices. Composition is matrix multiplication and the involution is the
//! conjugate transpose, so the C*-identity holds for the operator norm.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, inv_sqrt_psd, seeded_rng, singular_values, ComplexMatrix, MatrixSubspace,
    Tolerances, C64,
};
use crate::report::{Check, Report};

/// Index of an object inside its category.
pub type ObjIdx = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectInfo {
    pub id: String,
    pub dim: usize,
}

/// A finite C*-category of matrices.
#[derive(Debug, Clone)]
pub struct FinCStarCat {
    objects: Vec<ObjectInfo>,
    index: BTreeMap<String, ObjIdx>,
    /// `homs[src][dst]`, of shape `dim(dst) x dim(src)`.
    homs: Vec<Vec<MatrixSubspace>>,
    tol: Tolerances,
}

impl FinCStarCat {
    /// Category with the given objects and zero morphism spaces.
    pub fn empty_homs(objects: Vec<ObjectInfo>, tol: Tolerances) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (k, o) in objects.iter().enumerate() {
            if index.insert(o.id.clone(), k).is_some() {
                return Err(Error::DuplicateObject(o.id.clone()));
            }
        }
        let homs = objects
            .iter()
            .map(|s| {
                objects
                    .iter()
                    .map(|d| MatrixSubspace::zero(d.dim, s.dim))
                    .collect()
            })
            .collect();
        Ok(FinCStarCat {
            objects,
            index,
            homs,
            tol,
        })
    }

    /// Morphism spaces spanned by the given matrices, without any closure.
    /// The result need not satisfy the axioms; see [`validate`].
    pub fn from_spans(
        objects: Vec<ObjectInfo>,
        spans: &[(ObjIdx, ObjIdx, Vec<ComplexMatrix>)],
        tol: Tolerances,
    ) -> Result<Self> {
        let mut cat = Self::empty_homs(objects, tol)?;
        for (s, d, ms) in spans {
            cat.check_idx(*s)?;
            cat.check_idx(*d)?;
            let space = &mut cat.homs[*s][*d];
            for m in ms {
                space.insert(m, &tol)?;
            }
        }
        Ok(cat)
    }

    /// Smallest C*-category on `objects` containing the identities and the
    /// given generators.
    pub fn generated(
        objects: Vec<ObjectInfo>,
        generators: &[(ObjIdx, ObjIdx, ComplexMatrix)],
        tol: Tolerances,
    ) -> Result<Self> {
        let mut cat = Self::empty_homs(objects, tol)?;
        let mut seeds: Vec<(ObjIdx, ObjIdx, ComplexMatrix)> = (0..cat.len())
            .map(|k| (k, k, ComplexMatrix::identity(cat.objects[k].dim)))
            .collect();
        for (s, d, m) in generators {
            cat.check_idx(*s)?;
            cat.check_idx(*d)?;
            seeds.push((*s, *d, m.clone()));
        }
        cat.close_with(seeds)?;
        Ok(cat)
    }

    /// Every matrix is a morphism.
    pub fn full(objects: Vec<ObjectInfo>, tol: Tolerances) -> Result<Self> {
        let mut cat = Self::empty_homs(objects, tol)?;
        for s in 0..cat.len() {
            for d in 0..cat.len() {
                cat.homs[s][d] = MatrixSubspace::full(cat.objects[d].dim, cat.objects[s].dim);
            }
        }
        Ok(cat)
    }

    /// Assembles a category from already orthonormal morphism spaces.
    pub fn from_homs(
        objects: Vec<ObjectInfo>,
        homs: Vec<Vec<MatrixSubspace>>,
        tol: Tolerances,
    ) -> Result<Self> {
        let mut cat = Self::empty_homs(objects, tol)?;
        if homs.len() != cat.len() || homs.iter().any(|r| r.len() != cat.len()) {
            return Err(Error::InvalidCategory("hom table has wrong size".into()));
        }
        for (s, row) in homs.iter().enumerate() {
            for (d, h) in row.iter().enumerate() {
                let expected = (cat.objects[d].dim, cat.objects[s].dim);
                if h.shape() != expected {
                    return Err(Error::ShapeMismatch {
                        expected,
                        got: h.shape(),
                    });
                }
            }
        }
        cat.homs = homs;
        Ok(cat)
    }

    fn check_idx(&self, k: ObjIdx) -> Result<()> {
        if k < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownObject(format!("#{k}")))
        }
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn tol(&self) -> &Tolerances {
        &self.tol
    }

    pub fn with_tol(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn objects(&self) -> &[ObjectInfo] {
        &self.objects
    }

    pub fn object(&self, k: ObjIdx) -> &ObjectInfo {
        &self.objects[k]
    }

    pub fn dim(&self, k: ObjIdx) -> usize {
        self.objects[k].dim
    }

    pub fn idx(&self, id: &str) -> Result<ObjIdx> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownObject(id.to_string()))
    }

    pub fn hom(&self, src: ObjIdx, dst: ObjIdx) -> &MatrixSubspace {
        &self.homs[src][dst]
    }

    pub fn homs(&self) -> &Vec<Vec<MatrixSubspace>> {
        &self.homs
    }

    /// Total dimension of all morphism spaces.
    pub fn total_hom_dim(&self) -> usize {
        self.homs.iter().flatten().map(MatrixSubspace::dim).sum()
    }

    pub fn identity(&self, k: ObjIdx) -> Morphism {
        Morphism {
            src: k,
            dst: k,
            matrix: ComplexMatrix::identity(self.dim(k)),
        }
    }

    /// Wraps `matrix` as a morphism after checking shape and membership.
    pub fn morphism(&self, src: ObjIdx, dst: ObjIdx, matrix: ComplexMatrix) -> Result<Morphism> {
        self.check_idx(src)?;
        self.check_idx(dst)?;
        let space = self.hom(src, dst);
        let r = space.residual(&matrix)?;
        if r > self.tol.mem_bound(matrix.hs_norm()) {
            return Err(Error::InvalidCategory(format!(
                "matrix is not a morphism {} -> {} (residual {r:.3e})",
                self.objects[src].id, self.objects[dst].id
            )));
        }
        Ok(Morphism { src, dst, matrix })
    }

    pub fn random_morphism<R: rand::Rng + ?Sized>(&self, src: ObjIdx, dst: ObjIdx, rng: &mut R) -> Morphism {
        Morphism {
            src,
            dst,
            matrix: self.hom(src, dst).random_element(rng),
        }
    }

    /// Appends an object with the given morphism spaces to and from the
    /// existing objects, then closes under composition and adjoints.
    ///
    /// `to_new[k]` spans `hom(k, new)`, `from_new[k]` spans `hom(new, k)`
    /// and `end_new` spans `End(new)`.
    pub fn extend_with(
        &self,
        id: impl Into<String>,
        dim: usize,
        to_new: Vec<Vec<ComplexMatrix>>,
        from_new: Vec<Vec<ComplexMatrix>>,
        end_new: Vec<ComplexMatrix>,
    ) -> Result<(FinCStarCat, ObjIdx)> {
        let id = id.into();
        if self.index.contains_key(&id) {
            return Err(Error::DuplicateObject(id));
        }
        let n = self.len();
        let mut objects = self.objects.clone();
        objects.push(ObjectInfo { id, dim });
        let mut out = FinCStarCat::empty_homs(objects, self.tol)?;
        for s in 0..n {
            for d in 0..n {
                out.homs[s][d] = self.homs[s][d].clone();
            }
        }
        let mut seeds = vec![(n, n, ComplexMatrix::identity(dim))];
        for (k, ms) in to_new.into_iter().enumerate() {
            seeds.extend(ms.into_iter().map(|m| (k, n, m)));
        }
        for (k, ms) in from_new.into_iter().enumerate() {
            seeds.extend(ms.into_iter().map(|m| (n, k, m)));
        }
        seeds.extend(end_new.into_iter().map(|m| (n, n, m)));
        out.close_with(seeds)?;
        Ok((out, n))
    }

    /// [`Self::extend_with`] for spans that are already closed under
    /// composition and adjoints together with the existing spaces.
    pub fn extend_closed(
        &self,
        id: impl Into<String>,
        dim: usize,
        to_new: Vec<Vec<ComplexMatrix>>,
        from_new: Vec<Vec<ComplexMatrix>>,
        end_new: Vec<ComplexMatrix>,
    ) -> Result<(FinCStarCat, ObjIdx)> {
        let id = id.into();
        if self.index.contains_key(&id) {
            return Err(Error::DuplicateObject(id));
        }
        let n = self.len();
        let mut objects = self.objects.clone();
        objects.push(ObjectInfo { id, dim });
        let mut out = FinCStarCat::empty_homs(objects, self.tol)?;
        for s in 0..n {
            for d in 0..n {
                out.homs[s][d] = self.homs[s][d].clone();
            }
        }
        for (k, ms) in to_new.iter().enumerate() {
            out.homs[k][n] = MatrixSubspace::span(dim, self.dim(k), ms, &self.tol)?;
        }
        for (k, ms) in from_new.iter().enumerate() {
            out.homs[n][k] = MatrixSubspace::span(self.dim(k), dim, ms, &self.tol)?;
        }
        out.homs[n][n] = MatrixSubspace::span(dim, dim, &end_new, &self.tol)?;
        Ok((out, n))
    }

    /// Worklist closure: inserts `seeds` and everything they generate together
    /// with the existing (assumed closed) morphism spaces.
    pub(crate) fn close_with(&mut self, seeds: Vec<(ObjIdx, ObjIdx, ComplexMatrix)>) -> Result<()> {
        let tol = self.tol;
        let mut queue: Vec<(ObjIdx, ObjIdx, ComplexMatrix)> = Vec::new();
        let mut total = self.total_hom_dim();
        let insert = |homs: &mut Vec<Vec<MatrixSubspace>>,
                      queue: &mut Vec<(ObjIdx, ObjIdx, ComplexMatrix)>,
                      total: &mut usize,
                      s: ObjIdx,
                      d: ObjIdx,
                      m: &ComplexMatrix|
         -> Result<()> {
            let space = &mut homs[s][d];
            if space.insert(m, &tol)? {
                *total += 1;
                if *total > tol.max_dim {
                    return Err(Error::DimensionBlowup {
                        dim: *total,
                        cap: tol.max_dim,
                    });
                }
                queue.push((s, d, space.basis().last().unwrap().clone()));
            }
            Ok(())
        };
        for (s, d, m) in &seeds {
            insert(&mut self.homs, &mut queue, &mut total, *s, *d, m)?;
        }
        let n = self.len();
        while let Some((s, d, x)) = queue.pop() {
            insert(&mut self.homs, &mut queue, &mut total, d, s, &x.adjoint())?;
            for c in 0..n {
                let after: Vec<ComplexMatrix> = self.homs[d][c].basis().to_vec();
                for y in &after {
                    let p = y * &x;
                    insert(&mut self.homs, &mut queue, &mut total, s, c, &p)?;
                }
                let before: Vec<ComplexMatrix> = self.homs[c][s].basis().to_vec();
                for y in &before {
                    let p = &x * y;
                    insert(&mut self.homs, &mut queue, &mut total, c, d, &p)?;
                }
            }
        }
        Ok(())
    }

    /// Full subcategory on the listed objects, in the given order.
    pub fn full_subcategory(&self, objs: &[ObjIdx]) -> Result<FinCStarCat> {
        for &k in objs {
            self.check_idx(k)?;
        }
        let objects = objs.iter().map(|&k| self.objects[k].clone()).collect();
        let homs = objs
            .iter()
            .map(|&s| objs.iter().map(|&d| self.homs[s][d].clone()).collect())
            .collect();
        FinCStarCat::from_homs(objects, homs, self.tol)
    }

    /// Renames objects; ids must stay distinct.
    pub fn relabel(&self, ids: Vec<String>) -> Result<FinCStarCat> {
        let objects = self
            .objects
            .iter()
            .zip(ids)
            .map(|(o, id)| ObjectInfo { id, dim: o.dim })
            .collect();
        FinCStarCat::from_homs(objects, self.homs.clone(), self.tol)
    }
}

/// A morphism `src -> dst` of some category.
#[derive(Debug, Clone)]
pub struct Morphism {
    pub src: ObjIdx,
    pub dst: ObjIdx,
    pub matrix: ComplexMatrix,
}

impl Morphism {
    pub fn norm(&self) -> f64 {
        self.matrix.operator_norm()
    }

    pub fn adjoint(&self) -> Morphism {
        Morphism {
            src: self.dst,
            dst: self.src,
            matrix: self.matrix.adjoint(),
        }
    }
}

/// `f ∘ g`: apply `g` first.
pub fn compose(f: &Morphism, g: &Morphism) -> Result<Morphism> {
    if g.dst != f.src {
        return Err(Error::EndpointMismatch(format!(
            "f: #{} -> #{} after g: #{} -> #{}",
            f.src, f.dst, g.src, g.dst
        )));
    }
    Ok(Morphism {
        src: g.src,
        dst: f.dst,
        matrix: &f.matrix * &g.matrix,
    })
}

/// Checks unitality, *-closure and composition closure, recording the worst
/// relative membership residual for each.
pub fn validate(cat: &FinCStarCat) -> Report {
    let tol = cat.tol;
    let mut report = Report::new("validate");
    let rel = |space: &MatrixSubspace, m: &ComplexMatrix| -> f64 {
        space.residual(m).map_or(f64::INFINITY, |r| r / (1.0 + m.hs_norm()))
    };

    let mut worst_orth = (0.0f64, String::new());
    for s in 0..cat.len() {
        for d in 0..cat.len() {
            let g = cat.hom(s, d).gram_defect();
            if g > worst_orth.0 {
                worst_orth = (g, pair_name(cat, s, d));
            }
        }
    }
    report.push(Check::new("orthonormal bases", worst_orth.0, tol.orth).with_detail(worst_orth.1));

    let mut worst = (0.0f64, String::new());
    for k in 0..cat.len() {
        let r = rel(cat.hom(k, k), &ComplexMatrix::identity(cat.dim(k)));
        if r > worst.0 {
            worst = (r, format!("id_{}", cat.objects[k].id));
        }
    }
    report.push(Check::new("identity", worst.0, tol.mem).with_detail(worst.1));

    let mut worst = (0.0f64, String::new());
    for s in 0..cat.len() {
        for d in 0..cat.len() {
            for b in cat.hom(s, d).basis() {
                let r = rel(cat.hom(d, s), &b.adjoint());
                if r > worst.0 {
                    worst = (r, pair_name(cat, s, d));
                }
            }
        }
    }
    report.push(Check::new("involution closure", worst.0, tol.mem).with_detail(worst.1));

    let mut worst = (0.0f64, String::new());
    for a in 0..cat.len() {
        for b in 0..cat.len() {
            for c in 0..cat.len() {
                for f in cat.hom(a, b).basis() {
                    for g in cat.hom(b, c).basis() {
                        let r = rel(cat.hom(a, c), &(g * f));
                        if r > worst.0 {
                            worst = (
                                r,
                                format!(
                                    "{} then {}",
                                    pair_name(cat, a, b),
                                    pair_name(cat, b, c)
                                ),
                            );
                        }
                    }
                }
            }
        }
    }
    report.push(Check::new("composition closure", worst.0, tol.mem).with_detail(worst.1));
    report
}

fn pair_name(cat: &FinCStarCat, s: ObjIdx, d: ObjIdx) -> String {
    format!("({} -> {})", cat.objects[s].id, cat.objects[d].id)
}

/// Outcome of a randomized search for a unitary isomorphism.
#[derive(Debug, Clone)]
pub enum UnitarySearch {
    Found(Morphism),
    /// Hilbert dimensions differ, so no unitary can exist.
    DimensionObstruction,
    /// No unitary found among the sampled candidates (probabilistic).
    NotFound,
}

impl UnitarySearch {
    pub fn unitary(&self) -> Option<&Morphism> {
        match self {
            UnitarySearch::Found(u) => Some(u),
            _ => None,
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            UnitarySearch::Found(_) => "unitary found",
            UnitarySearch::DimensionObstruction => "no unitary: Hilbert dimensions differ",
            UnitarySearch::NotFound => "no unitary found (probabilistic)",
        }
    }
}

pub const UNITARY_SEARCH_ATTEMPTS: usize = 8;

/// Polar part of random morphisms `src -> dst`.
pub fn find_unitary_iso(cat: &FinCStarCat, src: ObjIdx, dst: ObjIdx, seed: u64) -> UnitarySearch {
    if cat.dim(src) != cat.dim(dst) {
        return UnitarySearch::DimensionObstruction;
    }
    let tol = cat.tol;
    let n = cat.dim(src);
    let id = ComplexMatrix::identity(n);
    if n == 0 {
        return UnitarySearch::Found(Morphism {
            src,
            dst,
            matrix: ComplexMatrix::zeros(0, 0),
        });
    }
    let space = cat.hom(src, dst);
    if space.dim() == 0 {
        return UnitarySearch::NotFound;
    }
    let mut rng = seeded_rng(seed);
    for _ in 0..UNITARY_SEARCH_ATTEMPTS {
        let f = space.random_element(&mut rng);
        let ff = &f.adjoint() * &f;
        let Ok(eig) = hermitian_eig(&ff) else { continue };
        let scale = eig.values.last().copied().unwrap_or(0.0).max(1.0);
        if eig.values[0] <= tol.rank * scale {
            continue;
        }
        let Ok(inv) = inv_sqrt_psd(&ff, 0.0) else { continue };
        let u = &f * &inv;
        let Ok((u, _)) = space.project(&u) else { continue };
        let uu = &u.adjoint() * &u;
        let uu2 = &u * &u.adjoint();
        let bound = tol.mem_bound(id.hs_norm());
        if uu.dist(&id) <= bound && uu2.dist(&id) <= bound {
            return UnitarySearch::Found(Morphism { src, dst, matrix: u });
        }
    }
    UnitarySearch::NotFound
}

/// A *-functor between finite C*-categories, linear on each morphism space.
#[derive(Debug, Clone)]
pub struct CatFunctor {
    pub source: Arc<FinCStarCat>,
    pub target: Arc<FinCStarCat>,
    pub object_map: Vec<ObjIdx>,
    /// `hom_action[(s, d)]` maps source coordinates in `hom(s, d)` to target
    /// coordinates in `hom(F s, F d)`.
    pub hom_action: BTreeMap<(ObjIdx, ObjIdx), ComplexMatrix>,
}

impl CatFunctor {
    pub fn identity(cat: Arc<FinCStarCat>) -> CatFunctor {
        let n = cat.len();
        let mut hom_action = BTreeMap::new();
        for s in 0..n {
            for d in 0..n {
                hom_action.insert((s, d), ComplexMatrix::identity(cat.hom(s, d).dim()));
            }
        }
        CatFunctor {
            source: cat.clone(),
            target: cat,
            object_map: (0..n).collect(),
            hom_action,
        }
    }

    /// Functor whose action on a morphism matrix is `f`; images are projected
    /// onto the target morphism spaces and rejected if they do not belong.
    pub fn from_matrix_map<F>(
        source: Arc<FinCStarCat>,
        target: Arc<FinCStarCat>,
        object_map: Vec<ObjIdx>,
        f: F,
    ) -> Result<CatFunctor>
    where
        F: Fn(ObjIdx, ObjIdx, &ComplexMatrix) -> ComplexMatrix,
    {
        check_object_map(&source, &target, &object_map)?;
        let tol = *target.tol();
        let mut hom_action = BTreeMap::new();
        for s in 0..source.len() {
            for d in 0..source.len() {
                let src_space = source.hom(s, d);
                let tgt_space = target.hom(object_map[s], object_map[d]);
                let mut coeffs = ComplexMatrix::zeros(tgt_space.dim(), src_space.dim());
                for (j, b) in src_space.basis().iter().enumerate() {
                    let img = f(s, d, b);
                    let c = tgt_space.coords(&img)?;
                    let r = (&img - &tgt_space.from_coords(&c)).hs_norm();
                    if r > tol.mem_bound(img.hs_norm()) {
                        return Err(Error::InvalidFunctor(format!(
                            "image of a basis element of ({} -> {}) leaves the target morphism space (residual {r:.3e})",
                            source.object(s).id,
                            source.object(d).id
                        )));
                    }
                    for (i, z) in c.into_iter().enumerate() {
                        coeffs.set(i, j, z);
                    }
                }
                hom_action.insert((s, d), coeffs);
            }
        }
        Ok(CatFunctor {
            source,
            target,
            object_map,
            hom_action,
        })
    }

    /// Functor determined by its values on spanning families: for each source
    /// pair, a list of `(source matrix, target matrix)` generator images.
    /// The linear extension is fitted by least squares and rejected if the
    /// prescription is not linear.
    pub fn from_generators(
        source: Arc<FinCStarCat>,
        target: Arc<FinCStarCat>,
        object_map: Vec<ObjIdx>,
        generators: &BTreeMap<(ObjIdx, ObjIdx), Vec<(ComplexMatrix, ComplexMatrix)>>,
    ) -> Result<CatFunctor> {
        check_object_map(&source, &target, &object_map)?;
        let tol = *target.tol();
        let mut hom_action = BTreeMap::new();
        for s in 0..source.len() {
            for d in 0..source.len() {
                let src_space = source.hom(s, d);
                let tgt_space = target.hom(object_map[s], object_map[d]);
                let gens = generators.get(&(s, d)).map(Vec::as_slice).unwrap_or(&[]);
                let k = gens.len();
                let mut sc = ComplexMatrix::zeros(src_space.dim(), k);
                let mut tc = ComplexMatrix::zeros(tgt_space.dim(), k);
                for (j, (a, b)) in gens.iter().enumerate() {
                    for (i, z) in src_space.coords(a)?.into_iter().enumerate() {
                        sc.set(i, j, z);
                    }
                    let c = tgt_space.coords(b)?;
                    let r = (b - &tgt_space.from_coords(&c)).hs_norm();
                    if r > tol.mem_bound(b.hs_norm()) {
                        return Err(Error::InvalidFunctor(format!(
                            "generator image leaves target morphism space ({} -> {})",
                            source.object(s).id,
                            source.object(d).id
                        )));
                    }
                    for (i, z) in c.into_iter().enumerate() {
                        tc.set(i, j, z);
                    }
                }
                let rank = singular_values(&sc)
                    .iter()
                    .filter(|&&v| v > tol.rank)
                    .count();
                if rank < src_space.dim() {
                    return Err(Error::InvalidFunctor(format!(
                        "generators do not span ({} -> {})",
                        source.object(s).id,
                        source.object(d).id
                    )));
                }
                let coeffs = &tc * &crate::linalg::pinv(&sc);
                let fit = (&(&coeffs * &sc) - &tc).hs_norm();
                if fit > tol.mem_bound(tc.hs_norm()) {
                    return Err(Error::InvalidFunctor(format!(
                        "generator assignment is not linear on ({} -> {}) (residual {fit:.3e})",
                        source.object(s).id,
                        source.object(d).id
                    )));
                }
                hom_action.insert((s, d), coeffs);
            }
        }
        Ok(CatFunctor {
            source,
            target,
            object_map,
            hom_action,
        })
    }

    /// Image of a morphism matrix `s -> d`.
    pub fn apply(&self, s: ObjIdx, d: ObjIdx, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        let c = self.source.hom(s, d).coords(m)?;
        let coeffs = &self.hom_action[&(s, d)];
        let img: Vec<C64> = (0..coeffs.rows())
            .map(|i| (0..coeffs.cols()).map(|j| coeffs.get(i, j) * c[j]).sum())
            .collect();
        Ok(self
            .target
            .hom(self.object_map[s], self.object_map[d])
            .from_coords(&img))
    }

    pub fn apply_morphism(&self, f: &Morphism) -> Result<Morphism> {
        Ok(Morphism {
            src: self.object_map[f.src],
            dst: self.object_map[f.dst],
            matrix: self.apply(f.src, f.dst, &f.matrix)?,
        })
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &CatFunctor) -> Result<CatFunctor> {
        if !Arc::ptr_eq(&self.target, &other.source)
            && (self.target.len() != other.source.len()
                || self.target.objects() != other.source.objects())
        {
            return Err(Error::InvalidFunctor("functors are not composable".into()));
        }
        let object_map = self.object_map.iter().map(|&k| other.object_map[k]).collect();
        let mut hom_action = BTreeMap::new();
        for (&(s, d), a) in &self.hom_action {
            let b = &other.hom_action[&(self.object_map[s], self.object_map[d])];
            hom_action.insert((s, d), b * a);
        }
        Ok(CatFunctor {
            source: self.source.clone(),
            target: other.target.clone(),
            object_map,
            hom_action,
        })
    }

    pub fn is_injective_on_objects(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.object_map.iter().all(|k| seen.insert(*k))
    }

    /// Unitality, multiplicativity and *-compatibility on basis elements.
    pub fn check_axioms(&self) -> Report {
        let tol = *self.target.tol();
        let src = &self.source;
        let mut report = Report::new("functor axioms");
        let rel = |a: &ComplexMatrix, b: &ComplexMatrix| (a - b).hs_norm() / (1.0 + b.hs_norm());

        let mut worst = 0.0f64;
        for k in 0..src.len() {
            let img = self
                .apply(k, k, &ComplexMatrix::identity(src.dim(k)))
                .map(|m| rel(&m, &ComplexMatrix::identity(self.target.dim(self.object_map[k]))))
                .unwrap_or(f64::INFINITY);
            worst = worst.max(img);
        }
        report.push(Check::new("unitality", worst, tol.mem));

        let mut worst = 0.0f64;
        for s in 0..src.len() {
            for d in 0..src.len() {
                for b in src.hom(s, d).basis() {
                    let lhs = self.apply(d, s, &b.adjoint());
                    let rhs = self.apply(s, d, b).map(|m| m.adjoint());
                    worst = worst.max(match (lhs, rhs) {
                        (Ok(l), Ok(r)) => rel(&l, &r),
                        _ => f64::INFINITY,
                    });
                }
            }
        }
        report.push(Check::new("*-compatibility", worst, tol.mem));

        let mut worst = 0.0f64;
        for a in 0..src.len() {
            for b in 0..src.len() {
                for c in 0..src.len() {
                    for f in src.hom(a, b).basis() {
                        for g in src.hom(b, c).basis() {
                            let lhs = self.apply(a, c, &(g * f));
                            let rhs = self.apply(a, b, f).and_then(|ff| Ok(&self.apply(b, c, g)? * &ff));
                            worst = worst.max(match (lhs, rhs) {
                                (Ok(l), Ok(r)) => rel(&l, &r),
                                _ => f64::INFINITY,
                            });
                        }
                    }
                }
            }
        }
        report.push(Check::new("multiplicativity", worst, tol.mem));
        report
    }
}

fn check_object_map(source: &FinCStarCat, target: &FinCStarCat, object_map: &[ObjIdx]) -> Result<()> {
    if object_map.len() != source.len() {
        return Err(Error::InvalidFunctor("object map has wrong length".into()));
    }
    if let Some(&t) = object_map.iter().find(|&&t| t >= target.len()) {
        return Err(Error::UnknownObject(format!("#{t}")));
    }
    Ok(())
}

/// Every coefficient matrix is bijective.
pub fn is_fully_faithful(f: &CatFunctor) -> bool {
    let tol = f.target.tol();
    f.hom_action.iter().all(|(&(s, d), coeffs)| {
        let src_dim = f.source.hom(s, d).dim();
        let tgt_dim = f.target.hom(f.object_map[s], f.object_map[d]).dim();
        if src_dim != tgt_dim {
            return false;
        }
        if src_dim == 0 {
            return true;
        }
        let sv = singular_values(coeffs);
        sv.len() == src_dim && sv.iter().all(|&v| v > tol.rank)
    })
}

/// Fully faithful and every target object is unitarily isomorphic to an image object.
pub fn is_unitary_equivalence(f: &CatFunctor, seed: u64) -> bool {
    if !is_fully_faithful(f) {
        return false;
    }
    let images: std::collections::BTreeSet<ObjIdx> = f.object_map.iter().copied().collect();
    (0..f.target.len()).all(|e| {
        images.contains(&e)
            || images.iter().any(|&c| {
                find_unitary_iso(&f.target, c, e, seed ^ ((c as u64) << 32) ^ e as u64)
                    .unitary()
                    .is_some()
            })
    })
}

/// Product of finitely many categories: objects are tuples, morphisms act
/// block-diagonally on the direct sum of the Hilbert spaces.
pub fn product_category(cats: &[&FinCStarCat]) -> Result<FinCStarCat> {
    let tol = cats.first().map(|c| *c.tol()).unwrap_or_default();
    let mut tuples: Vec<Vec<ObjIdx>> = vec![Vec::new()];
    for cat in cats {
        let mut next = Vec::new();
        for t in &tuples {
            for k in 0..cat.len() {
                let mut t2 = t.clone();
                t2.push(k);
                next.push(t2);
            }
        }
        tuples = next;
    }
    let objects: Vec<ObjectInfo> = tuples
        .iter()
        .map(|t| ObjectInfo {
            id: format!(
                "⟨{}⟩",
                t.iter()
                    .zip(cats)
                    .map(|(&k, c)| c.object(k).id.as_str())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            dim: t.iter().zip(cats).map(|(&k, c)| c.dim(k)).sum(),
        })
        .collect();
    let mut homs = Vec::with_capacity(tuples.len());
    for (si, s) in tuples.iter().enumerate() {
        let mut row = Vec::with_capacity(tuples.len());
        for (di, d) in tuples.iter().enumerate() {
            let (rows, cols) = (objects[di].dim, objects[si].dim);
            let mut basis = Vec::new();
            let (mut ro, mut co) = (0, 0);
            for (f, cat) in cats.iter().enumerate() {
                for b in cat.hom(s[f], d[f]).basis() {
                    basis.push(b.embed(rows, cols, ro, co));
                }
                ro += cat.dim(d[f]);
                co += cat.dim(s[f]);
            }
            row.push(MatrixSubspace::from_orthonormal(rows, cols, basis));
        }
        homs.push(row);
    }
    FinCStarCat::from_homs(objects, homs, tol)
}

/// Projection `∏ cats -> cats[i]` out of [`product_category`].
pub fn product_projection(product: Arc<FinCStarCat>, cats: &[&FinCStarCat], i: usize) -> Result<CatFunctor> {
    let sizes: Vec<usize> = cats.iter().map(|c| c.len()).collect();
    let stride: usize = sizes[i + 1..].iter().product();
    let coord = |k: ObjIdx| (k / stride) % sizes[i];
    let offset = |k: ObjIdx| -> usize {
        (0..i)
            .map(|f| {
                let st: usize = sizes[f + 1..].iter().product();
                cats[f].dim((k / st) % sizes[f])
            })
            .sum()
    };
    let object_map = (0..product.len()).map(coord).collect();
    let target = Arc::new(cats[i].clone());
    let dims: Vec<usize> = (0..cats[i].len()).map(|k| cats[i].dim(k)).collect();
    CatFunctor::from_matrix_map(product, target, object_map, |s, d, m| {
        m.block(offset(d), offset(s), dims[coord(d)], dims[coord(s)])
    })
}

/// A family of subspaces `I(s, d) ⊆ hom(s, d)`.
#[derive(Debug, Clone)]
pub struct Ideal {
    pub homs: Vec<Vec<MatrixSubspace>>,
}

impl Ideal {
    pub fn zero(cat: &FinCStarCat) -> Ideal {
        Ideal {
            homs: (0..cat.len())
                .map(|s| {
                    (0..cat.len())
                        .map(|d| MatrixSubspace::zero(cat.dim(d), cat.dim(s)))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn whole(cat: &FinCStarCat) -> Ideal {
        Ideal {
            homs: cat.homs().clone(),
        }
    }

    /// Ideal generated by the given morphisms.
    pub fn generated(cat: &FinCStarCat, gens: &[Morphism]) -> Result<Ideal> {
        let tol = *cat.tol();
        let mut ideal = Ideal::zero(cat);
        let mut raw: Vec<Vec<Vec<ComplexMatrix>>> = vec![vec![Vec::new(); cat.len()]; cat.len()];
        for g in gens {
            // two-sided products a g b with a, b ranging over bases
            for s in 0..cat.len() {
                for d in 0..cat.len() {
                    for b in cat.hom(s, g.src).basis() {
                        for a in cat.hom(g.dst, d).basis() {
                            raw[s][d].push(&(a * &g.matrix) * b);
                        }
                    }
                }
            }
        }
        for s in 0..cat.len() {
            for d in 0..cat.len() {
                for m in &raw[s][d] {
                    ideal.homs[s][d].insert(m, &tol)?;
                }
            }
        }
        // closed two-sided ideals are *-closed; symmetrize the numerical spans
        for s in 0..cat.len() {
            for d in 0..cat.len() {
                let adj: Vec<ComplexMatrix> = ideal.homs[d][s].basis().iter().map(|m| m.adjoint()).collect();
                for m in &adj {
                    ideal.homs[s][d].insert(m, &tol)?;
                }
            }
        }
        Ok(ideal)
    }

    /// Worst relative residual of the ideal axioms.
    pub fn check(&self, cat: &FinCStarCat) -> Result<f64> {
        let n = cat.len();
        if self.homs.len() != n || self.homs.iter().any(|r| r.len() != n) {
            return Err(Error::NotAnIdeal("ideal table has wrong size".into()));
        }
        let rel = |space: &MatrixSubspace, m: &ComplexMatrix| -> Result<f64> {
            Ok(space.residual(m)? / (1.0 + m.hs_norm()))
        };
        let mut worst = 0.0f64;
        for s in 0..n {
            for d in 0..n {
                worst = worst.max(self.homs[s][d].worst_residual_in(cat.hom(s, d))?);
                for x in self.homs[s][d].basis() {
                    worst = worst.max(rel(&self.homs[d][s], &x.adjoint())?);
                    for c in 0..n {
                        for a in cat.hom(d, c).basis() {
                            worst = worst.max(rel(&self.homs[s][c], &(a * x))?);
                        }
                        for b in cat.hom(c, s).basis() {
                            worst = worst.max(rel(&self.homs[c][d], &(x * b))?);
                        }
                    }
                }
            }
        }
        Ok(worst)
    }

    pub fn validate(&self, cat: &FinCStarCat) -> Result<()> {
        let w = self.check(cat)?;
        if w > cat.tol().mem {
            return Err(Error::NotAnIdeal(format!("ideal axioms violated (residual {w:.3e})")));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.homs.iter().flatten().all(|h| h.dim() == 0)
    }
}

/// Quotient `cat / ideal`, realized on the complement of the ideal's central
/// support, together with the quotient functor.
pub fn quotient_by_ideal(cat: &Arc<FinCStarCat>, ideal: &Ideal) -> Result<(Arc<FinCStarCat>, CatFunctor)> {
    ideal.validate(cat)?;
    let tol = *cat.tol();
    let support = crate::afunctor::ideal_support(cat, ideal)?;
    // isometries onto the range of (1 - support) restricted to each object
    let mut isos = Vec::with_capacity(cat.len());
    for k in 0..cat.len() {
        let n = cat.dim(k);
        let comp = &ComplexMatrix::identity(n) - &support[k];
        isos.push(crate::linalg::range_basis(&comp.hermitian_part(), 0.5)?);
    }
    let objects: Vec<ObjectInfo> = (0..cat.len())
        .map(|k| ObjectInfo {
            id: cat.object(k).id.clone(),
            dim: isos[k].cols(),
        })
        .collect();
    let mut homs = Vec::with_capacity(cat.len());
    for s in 0..cat.len() {
        let mut row = Vec::with_capacity(cat.len());
        for d in 0..cat.len() {
            let imgs: Vec<ComplexMatrix> = cat
                .hom(s, d)
                .basis()
                .iter()
                .map(|b| &(&isos[d].adjoint() * b) * &isos[s])
                .collect();
            row.push(MatrixSubspace::span(objects[d].dim, objects[s].dim, &imgs, &tol)?);
        }
        homs.push(row);
    }
    let quotient = Arc::new(FinCStarCat::from_homs(objects, homs, tol)?);
    let functor = CatFunctor::from_matrix_map(cat.clone(), quotient.clone(), (0..cat.len()).collect(), |s, d, m| {
        &(&isos[d].adjoint() * m) * &isos[s]
    })?;
    Ok((quotient, functor))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(id: &str, dim: usize) -> ObjectInfo {
        ObjectInfo { id: id.into(), dim }
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn scalar_category_validates() {
        let cat = FinCStarCat::generated(vec![obj("C", 1)], &[], tol()).unwrap();
        assert!(validate(&cat).passed());
        assert_eq!(cat.hom(0, 0).dim(), 1);
    }

    #[test]
    fn nilpotent_span_fails_identity_and_involution() {
        let cat = FinCStarCat::from_spans(vec![obj("X", 2)], &[(0, 0, vec![ComplexMatrix::unit(2, 2, 0, 1)])], tol())
            .unwrap();
        let r = validate(&cat);
        assert!(!r.passed());
        assert!(!r.get("identity").unwrap().passed);
        assert!(!r.get("involution closure").unwrap().passed);
    }

    #[test]
    fn full_two_object_category_validates() {
        let cat = FinCStarCat::full(vec![obj("a", 1), obj("b", 2)], tol()).unwrap();
        assert!(validate(&cat).passed());
        assert_eq!(cat.total_hom_dim(), 9);
    }

    #[test]
    fn compose_adjoint_and_norm() {
        let cat = FinCStarCat::full(vec![obj("a", 2), obj("b", 3)], tol()).unwrap();
        let mut rng = seeded_rng(1);
        let f = cat.random_morphism(0, 1, &mut rng);
        let id = cat.identity(1);
        let g = compose(&id, &f).unwrap();
        assert!(g.matrix.dist(&f.matrix) < 1e-12);
        assert!(f.adjoint().adjoint().matrix.dist(&f.matrix) < 1e-15);
        let ff = compose(&f.adjoint(), &f).unwrap();
        assert!((ff.norm() - f.norm().powi(2)).abs() <= 1e-8 * f.norm().powi(2));
        assert!(matches!(compose(&f, &f), Err(Error::EndpointMismatch(_))));
    }

    #[test]
    fn unitary_search() {
        let cat = FinCStarCat::full(vec![obj("a", 1), obj("b", 2), obj("c", 2)], tol()).unwrap();
        let u = find_unitary_iso(&cat, 0, 0, 5);
        assert!(u.unitary().is_some());
        assert!(matches!(find_unitary_iso(&cat, 0, 1, 5), UnitarySearch::DimensionObstruction));
        let u = find_unitary_iso(&cat, 1, 2, 5);
        let u = u.unitary().unwrap();
        let id = ComplexMatrix::identity(2);
        assert!((&u.matrix.adjoint() * &u.matrix).dist(&id) < 1e-8);
        assert!((&u.matrix * &u.matrix.adjoint()).dist(&id) < 1e-8);
    }

    #[test]
    fn inclusion_functors() {
        let big = Arc::new(FinCStarCat::full(vec![obj("a", 1), obj("b", 2)], tol()).unwrap());
        let small = Arc::new(big.full_subcategory(&[0]).unwrap());
        let inc = CatFunctor::from_matrix_map(small.clone(), big.clone(), vec![0], |_, _, m| m.clone()).unwrap();
        assert!(inc.check_axioms().passed());
        assert!(is_fully_faithful(&inc));
        assert!(!is_unitary_equivalence(&inc, 1));
        let id = CatFunctor::identity(big.clone());
        assert!(is_fully_faithful(&id) && is_unitary_equivalence(&id, 1));

        let two = Arc::new(FinCStarCat::full(vec![obj("a", 1), obj("b", 1)], tol()).unwrap());
        let one = Arc::new(two.full_subcategory(&[0]).unwrap());
        let inc = CatFunctor::from_matrix_map(one, two, vec![0], |_, _, m| m.clone()).unwrap();
        assert!(is_unitary_equivalence(&inc, 3));
    }

    #[test]
    fn product_with_trivial_category() {
        let cat = FinCStarCat::full(vec![obj("a", 1), obj("b", 2)], tol()).unwrap();
        let triv = FinCStarCat::empty_homs(vec![obj("*", 0)], tol()).unwrap();
        let p = product_category(&[&cat, &triv]).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.object(0).id, "⟨a,*⟩");
        assert_eq!(p.total_hom_dim(), cat.total_hom_dim());
        assert!(validate(&p).passed());
        let empty = product_category(&[]).unwrap();
        assert_eq!(empty.len(), 1);
        assert_eq!(empty.dim(0), 0);
    }

    #[test]
    fn quotient_of_diagonal_algebra() {
        let d0 = ComplexMatrix::unit(2, 2, 0, 0);
        let d1 = ComplexMatrix::unit(2, 2, 1, 1);
        let cat = Arc::new(FinCStarCat::generated(vec![obj("C", 2)], &[(0, 0, d0.clone()), (0, 0, d1)], tol()).unwrap());
        assert_eq!(cat.hom(0, 0).dim(), 2);
        let ideal = Ideal::generated(&cat, &[cat.morphism(0, 0, d0).unwrap()]).unwrap();
        let (q, f) = quotient_by_ideal(&cat, &ideal).unwrap();
        assert_eq!(q.hom(0, 0).dim(), 1);
        assert!(validate(&q).passed());
        assert!(f.check_axioms().passed());

        let (q0, _) = quotient_by_ideal(&cat, &Ideal::zero(&cat)).unwrap();
        assert_eq!(q0.total_hom_dim(), cat.total_hom_dim());
    }

    #[test]
    fn non_ideal_is_rejected() {
        let cat = Arc::new(FinCStarCat::full(vec![obj("C", 2)], tol()).unwrap());
        let mut bad = Ideal::zero(&cat);
        bad.homs[0][0] = MatrixSubspace::span(2, 2, &[ComplexMatrix::unit(2, 2, 0, 0)], &tol()).unwrap();
        assert!(matches!(quotient_by_ideal(&cat, &bad), Err(Error::NotAnIdeal(_))));
    }
}
