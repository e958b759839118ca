//! The block-matrix algebra `A(C)` of a finite C*-category and the algebra
//! maps induced by functors that are injective on objects.

use std::sync::Arc;

use rand::Rng;

use crate::category::{CatFunctor, FinCStarCat, Ideal, ObjIdx};
use crate::error::{Error, Result};
use crate::linalg::{range_basis, seeded_rng, ComplexMatrix, MatrixSubspace, Tolerances, C64};
use crate::report::{Check, Report};

/// A *-subalgebra of `rep_dim x rep_dim` matrices.
#[derive(Debug, Clone)]
pub struct ConcreteAlgebra {
    pub rep_dim: usize,
    pub space: MatrixSubspace,
    /// Two-sided identity of `space`; need not be the ambient identity.
    pub unit: Option<ComplexMatrix>,
    pub tol: Tolerances,
}

impl ConcreteAlgebra {
    pub fn new(space: MatrixSubspace, unit: Option<ComplexMatrix>, tol: Tolerances) -> Self {
        ConcreteAlgebra {
            rep_dim: space.shape().0,
            space,
            unit,
            tol,
        }
    }

    /// Wraps a *-closed algebra and computes its unit as the support
    /// projection of `sum_k b_k b_k*`.
    pub fn with_support_unit(space: MatrixSubspace, tol: Tolerances) -> Result<Self> {
        let unit = support_projection(&space, &tol)?;
        Ok(Self::new(space, Some(unit), tol))
    }

    /// The *-algebra generated by `generators` inside `rep_dim x rep_dim` matrices.
    pub fn generated(rep_dim: usize, generators: &[ComplexMatrix], tol: Tolerances) -> Result<Self> {
        let space = if generators.is_empty() {
            MatrixSubspace::zero(rep_dim, rep_dim)
        } else {
            crate::linalg::close_under(generators, crate::linalg::matmul, true, &tol)?
        };
        Self::with_support_unit(space, tol)
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn unit(&self) -> Result<&ComplexMatrix> {
        self.unit.as_ref().ok_or(Error::NotUnital)
    }

    pub fn contains(&self, m: &ComplexMatrix) -> Result<bool> {
        self.space.contains(m, &self.tol)
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexMatrix {
        self.space.random_element(rng)
    }

    pub fn random_self_adjoint<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexMatrix {
        self.space.random_element(rng).hermitian_part()
    }

    /// Closure under products and adjoints, and the unit laws.
    pub fn validate(&self) -> Report {
        let mut report = Report::new("algebra");
        let rel = |m: &ComplexMatrix| -> f64 {
            self.space
                .residual(m)
                .map_or(f64::INFINITY, |r| r / (1.0 + m.hs_norm()))
        };
        let basis = self.space.basis();
        let mut worst = 0.0f64;
        for a in basis {
            worst = worst.max(rel(&a.adjoint()));
            for b in basis {
                worst = worst.max(rel(&(a * b)));
            }
        }
        report.push(Check::new("*-subalgebra closure", worst, self.tol.mem));
        if let Some(u) = &self.unit {
            let mut worst = rel(u);
            worst = worst.max((u - &u.adjoint()).hs_norm());
            worst = worst.max((&(u * u) - u).hs_norm());
            for a in basis {
                worst = worst.max((&(u * a) - a).hs_norm()).max((&(a * u) - a).hs_norm());
            }
            report.push(Check::new("unit", worst, self.tol.mem_bound(u.hs_norm())));
        }
        report
    }
}

/// Support projection of `sum_k b_k b_k*`: the unit of a finite-dimensional
/// *-closed algebra spanned by the `b_k`.
pub fn support_projection(space: &MatrixSubspace, tol: &Tolerances) -> Result<ComplexMatrix> {
    let n = space.shape().0;
    let mut acc = ComplexMatrix::zeros(n, n);
    for b in space.basis() {
        acc = &acc + &(b * &b.adjoint());
    }
    let scale = acc.operator_norm();
    let v = range_basis(&acc.hermitian_part(), tol.rank * (1.0 + scale))?;
    Ok(&v * &v.adjoint())
}

/// Offsets of each object's Hilbert space inside `⊕_C H_C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockIndex {
    pub offsets: Vec<usize>,
    pub dims: Vec<usize>,
}

impl BlockIndex {
    pub fn of(cat: &FinCStarCat) -> Self {
        let dims: Vec<usize> = cat.objects().iter().map(|o| o.dim).collect();
        let mut offsets = Vec::with_capacity(dims.len());
        let mut acc = 0;
        for d in &dims {
            offsets.push(acc);
            acc += d;
        }
        BlockIndex { offsets, dims }
    }

    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn range(&self, k: ObjIdx) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k] + self.dims[k]
    }

    /// Places a morphism `src -> dst` in the `(dst, src)` block.
    pub fn embed(&self, src: ObjIdx, dst: ObjIdx, m: &ComplexMatrix) -> ComplexMatrix {
        let n = self.total();
        m.embed(n, n, self.offsets[dst], self.offsets[src])
    }

    /// The `(dst, src)` block of `x`.
    pub fn extract(&self, src: ObjIdx, dst: ObjIdx, x: &ComplexMatrix) -> ComplexMatrix {
        x.block(self.offsets[dst], self.offsets[src], self.dims[dst], self.dims[src])
    }

    /// Projection onto the coordinates of object `k`.
    pub fn object_projection(&self, k: ObjIdx) -> ComplexMatrix {
        self.embed(k, k, &ComplexMatrix::identity(self.dims[k]))
    }
}

/// `A(cat)`: block matrices on `⊕_C H_C` whose `(C', C)` block lies in `hom(C, C')`.
pub fn build_a(cat: &FinCStarCat) -> (ConcreteAlgebra, BlockIndex) {
    let idx = BlockIndex::of(cat);
    let n = idx.total();
    let mut basis = Vec::with_capacity(cat.total_hom_dim());
    for s in 0..cat.len() {
        for d in 0..cat.len() {
            for b in cat.hom(s, d).basis() {
                basis.push(idx.embed(s, d, b));
            }
        }
    }
    let space = MatrixSubspace::from_orthonormal(n, n, basis);
    (
        ConcreteAlgebra::new(space, Some(ComplexMatrix::identity(n)), *cat.tol()),
        idx,
    )
}

/// `End(C)` as a unital algebra on `H_C`.
pub fn end_algebra(cat: &FinCStarCat, k: ObjIdx) -> ConcreteAlgebra {
    let n = cat.dim(k);
    ConcreteAlgebra::new(cat.hom(k, k).clone(), Some(ComplexMatrix::identity(n)), *cat.tol())
}

/// The sub-bimodule `M_C` of `A(cat)`: block column of object `k`, i.e.
/// all blocks `(C', k)` for every `C'`.
pub fn block_column(cat: &FinCStarCat, idx: &BlockIndex, k: ObjIdx) -> MatrixSubspace {
    let n = idx.total();
    let basis = (0..cat.len())
        .flat_map(|d| cat.hom(k, d).basis().iter().map(move |b| idx.embed(k, d, b)))
        .collect();
    MatrixSubspace::from_orthonormal(n, n, basis)
}

/// A linear map between concrete algebras, stored on bases.
#[derive(Debug, Clone)]
pub struct AlgebraMap {
    pub source: Arc<ConcreteAlgebra>,
    pub target: Arc<ConcreteAlgebra>,
    /// `dim target x dim source`.
    pub coeffs: ComplexMatrix,
}

impl AlgebraMap {
    /// Map with `x ↦ f(x)` on source basis elements; images must lie in the target.
    pub fn from_fn(
        source: Arc<ConcreteAlgebra>,
        target: Arc<ConcreteAlgebra>,
        f: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    ) -> Result<AlgebraMap> {
        let mut coeffs = ComplexMatrix::zeros(target.dim(), source.dim());
        for (j, b) in source.space.basis().iter().enumerate() {
            let img = f(b);
            let c = target.space.coords(&img)?;
            let r = (&img - &target.space.from_coords(&c)).hs_norm();
            if r > target.tol.mem_bound(img.hs_norm()) {
                return Err(Error::NotAHomomorphism(r));
            }
            for (i, z) in c.into_iter().enumerate() {
                coeffs.set(i, j, z);
            }
        }
        Ok(AlgebraMap {
            source,
            target,
            coeffs,
        })
    }

    pub fn identity(alg: Arc<ConcreteAlgebra>) -> AlgebraMap {
        let d = alg.dim();
        AlgebraMap {
            source: alg.clone(),
            target: alg,
            coeffs: ComplexMatrix::identity(d),
        }
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let c = self.source.space.coords(x)?;
        let img: Vec<C64> = (0..self.coeffs.rows())
            .map(|i| (0..self.coeffs.cols()).map(|j| self.coeffs.get(i, j) * c[j]).sum())
            .collect();
        Ok(self.target.space.from_coords(&img))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &AlgebraMap) -> AlgebraMap {
        AlgebraMap {
            source: self.source.clone(),
            target: other.target.clone(),
            coeffs: &other.coeffs * &self.coeffs,
        }
    }

    /// Worst relative defect of multiplicativity and *-compatibility on
    /// `samples` random pairs plus all basis adjoints.
    pub fn star_hom_defect(&self, samples: usize, seed: u64) -> Result<f64> {
        let mut rng = seeded_rng(seed);
        let rel = |a: &ComplexMatrix, b: &ComplexMatrix| (a - b).hs_norm() / (1.0 + b.hs_norm());
        let mut worst = 0.0f64;
        for b in self.source.space.basis() {
            worst = worst.max(rel(&self.apply(&b.adjoint())?, &self.apply(b)?.adjoint()));
        }
        for _ in 0..samples {
            let x = self.source.random_element(&mut rng);
            let y = self.source.random_element(&mut rng);
            let lhs = self.apply(&(&x * &y))?;
            let rhs = &self.apply(&x)? * &self.apply(&y)?;
            worst = worst.max(rel(&lhs, &rhs));
        }
        Ok(worst)
    }

    pub fn check_star_hom(&self, seed: u64) -> Result<()> {
        let d = self.star_hom_defect(8, seed)?;
        if d > self.target.tol.mem {
            return Err(Error::NotAHomomorphism(d));
        }
        Ok(())
    }
}

/// The canonical corner inclusion `End(C) -> A(cat)`.
pub fn ell_embedding(cat: &FinCStarCat, k: ObjIdx) -> Result<AlgebraMap> {
    if k >= cat.len() {
        return Err(Error::UnknownObject(format!("#{k}")));
    }
    let (alg, idx) = build_a(cat);
    AlgebraMap::from_fn(Arc::new(end_algebra(cat, k)), Arc::new(alg), |m| idx.embed(k, k, m))
}

/// `A(F)` for a functor that is injective on objects.
pub fn a_of_functor(f: &CatFunctor) -> Result<AlgebraMap> {
    if !f.is_injective_on_objects() {
        return Err(Error::NotInjectiveOnObjects);
    }
    let (src_alg, src_idx) = build_a(&f.source);
    let (tgt_alg, tgt_idx) = build_a(&f.target);
    let n = f.source.len();
    AlgebraMap::from_fn(Arc::new(src_alg), Arc::new(tgt_alg), |x| {
        let mut out = ComplexMatrix::zeros(tgt_idx.total(), tgt_idx.total());
        for s in 0..n {
            for d in 0..n {
                let block = src_idx.extract(s, d, x);
                if block.max_abs() == 0.0 {
                    continue;
                }
                let img = f.apply(s, d, &block).expect("block shape");
                out = &out + &tgt_idx.embed(f.object_map[s], f.object_map[d], &img);
            }
        }
        out
    })
}

/// `A(I)` for an ideal `I` of `cat`, with its unit (a central projection of `A(cat)`).
pub fn ideal_algebra(cat: &FinCStarCat, ideal: &Ideal) -> Result<ConcreteAlgebra> {
    let idx = BlockIndex::of(cat);
    let n = idx.total();
    let mut basis = Vec::new();
    for s in 0..cat.len() {
        for d in 0..cat.len() {
            for b in ideal.homs[s][d].basis() {
                basis.push(idx.embed(s, d, b));
            }
        }
    }
    ConcreteAlgebra::with_support_unit(MatrixSubspace::from_orthonormal(n, n, basis), *cat.tol())
}

/// Per-object diagonal blocks of the unit of `A(I)`.
pub fn ideal_support(cat: &FinCStarCat, ideal: &Ideal) -> Result<Vec<ComplexMatrix>> {
    let tol = cat.tol();
    (0..cat.len())
        .map(|k| {
            let n = cat.dim(k);
            let mut acc = ComplexMatrix::zeros(n, n);
            for s in 0..cat.len() {
                for b in ideal.homs[s][k].basis() {
                    acc = &acc + &(b * &b.adjoint());
                }
            }
            let scale = acc.operator_norm();
            let v = range_basis(&acc.hermitian_part(), tol.rank * (1.0 + scale))?;
            Ok(&v * &v.adjoint())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::ObjectInfo;

    fn obj(id: &str, dim: usize) -> ObjectInfo {
        ObjectInfo { id: id.into(), dim }
    }

    #[test]
    fn dimensions_of_small_examples() {
        let tol = Tolerances::default();
        let c = FinCStarCat::generated(vec![obj("C", 1)], &[], tol).unwrap();
        assert_eq!(build_a(&c).0.dim(), 1);
        let full = FinCStarCat::full(vec![obj("a", 1), obj("b", 1)], tol).unwrap();
        assert_eq!(build_a(&full).0.dim(), 4);
        let disc = FinCStarCat::generated(vec![obj("a", 1), obj("b", 1)], &[], tol).unwrap();
        let (a, _) = build_a(&disc);
        assert_eq!(a.dim(), 2);
        assert!(a.validate().passed());
    }

    #[test]
    fn ell_embedding_is_multiplicative_corner() {
        let tol = Tolerances::default();
        let cat = FinCStarCat::full(vec![obj("a", 2), obj("b", 1)], tol).unwrap();
        let ell = ell_embedding(&cat, 0).unwrap();
        let (_, idx) = build_a(&cat);
        let img = ell.apply(&ComplexMatrix::identity(2)).unwrap();
        assert!(img.dist(&idx.object_projection(0)) < 1e-12);
        assert!(ell.apply(&ComplexMatrix::zeros(2, 2)).unwrap().max_abs() < 1e-15);
        let mut rng = seeded_rng(2);
        let f = ComplexMatrix::random(2, 2, &mut rng);
        let g = ComplexMatrix::random(2, 2, &mut rng);
        let lhs = &ell.apply(&f).unwrap() * &ell.apply(&g).unwrap();
        assert!(lhs.dist(&ell.apply(&(&f * &g)).unwrap()) < 1e-9);
        assert!(ell_embedding(&cat, 7).is_err());
    }

    #[test]
    fn a_of_identity_and_rejection() {
        let tol = Tolerances::default();
        let cat = Arc::new(FinCStarCat::full(vec![obj("a", 1), obj("b", 2)], tol).unwrap());
        let id = a_of_functor(&CatFunctor::identity(cat.clone())).unwrap();
        assert!(id.coeffs.dist(&ComplexMatrix::identity(9)) < 1e-12);
        let one = Arc::new(FinCStarCat::full(vec![obj("x", 1), obj("y", 1)], tol).unwrap());
        let collapse = CatFunctor::from_matrix_map(one, cat, vec![0, 0], |_, _, m| m.clone()).unwrap();
        assert!(matches!(a_of_functor(&collapse), Err(Error::NotInjectiveOnObjects)));
    }

    #[test]
    fn support_unit_of_corner() {
        let tol = Tolerances::default();
        let alg = ConcreteAlgebra::generated(3, &[ComplexMatrix::unit(3, 3, 0, 1)], tol).unwrap();
        assert_eq!(alg.dim(), 4);
        let u = alg.unit().unwrap();
        let expected = ComplexMatrix::diag(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        assert!(u.dist(&expected) < 1e-10);
        assert!(alg.validate().passed());
    }
}
