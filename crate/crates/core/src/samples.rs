//! Seeded random instances: block-typed categories with known Wedderburn
//! data, randomly generated categories, mutations that break an axiom, and
//! random sum families.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::category::{FinCStarCat, Morphism, ObjIdx, ObjectInfo};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, MatrixSubspace, Tolerances, C64};

/// A Haar-ish random unitary (QR of a complex Gaussian matrix).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    if n == 0 {
        return ComplexMatrix::zeros(0, 0);
    }
    let g = ComplexMatrix::random(n, n, rng);
    let qr = g.as_dmatrix().clone().qr();
    ComplexMatrix::from_dmatrix(qr.q())
}

/// A category built from isotypic blocks: type `t` has size `d_t`, object
/// `C` carries `mu[C][t]` copies of it, and
/// `hom(C, D) = ⊕_t M_{mu[D][t] x mu[C][t]} ⊗ 1_{d_t}`, conjugated by a random
/// unitary on each object. `A(cat) ≅ ⊕_t M_{Σ_C mu[C][t]}`, each block with
/// multiplicity `d_t`.
#[derive(Debug, Clone)]
pub struct TypedCategory {
    pub cat: FinCStarCat,
    pub type_dims: Vec<usize>,
    pub mu: Vec<Vec<usize>>,
}

impl TypedCategory {
    /// `(n_t, d_t)` for the types that occur, sorted.
    pub fn expected_blocks(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = (0..self.type_dims.len())
            .map(|t| (self.mu.iter().map(|m| m[t]).sum::<usize>(), self.type_dims[t]))
            .filter(|&(n, _)| n > 0)
            .collect();
        out.sort_unstable();
        out
    }
}

pub fn typed_category(type_dims: &[usize], mu: &[Vec<usize>], unitaries: &[ComplexMatrix], tol: Tolerances) -> Result<TypedCategory> {
    let dims: Vec<usize> = mu
        .iter()
        .map(|m| m.iter().zip(type_dims).map(|(a, d)| a * d).sum())
        .collect();
    let objects: Vec<ObjectInfo> = dims
        .iter()
        .enumerate()
        .map(|(k, &d)| ObjectInfo {
            id: format!("X{k}"),
            dim: d,
        })
        .collect();
    // offset of copy `a` of type `t` in object `k`
    let offset = |k: usize, t: usize, a: usize| -> usize {
        (0..t).map(|u| mu[k][u] * type_dims[u]).sum::<usize>() + a * type_dims[t]
    };
    let n = mu.len();
    let mut homs = Vec::with_capacity(n);
    for s in 0..n {
        let mut row = Vec::with_capacity(n);
        for d in 0..n {
            let mut basis = Vec::new();
            for (t, &dt) in type_dims.iter().enumerate() {
                for a in 0..mu[d][t] {
                    for b in 0..mu[s][t] {
                        let mut m = ComplexMatrix::zeros(dims[d], dims[s]);
                        let scale = C64::new(1.0 / (dt as f64).sqrt(), 0.0);
                        for i in 0..dt {
                            m.set(offset(d, t, a) + i, offset(s, t, b) + i, scale);
                        }
                        basis.push(&(&unitaries[d] * &m) * &unitaries[s].adjoint());
                    }
                }
            }
            row.push(MatrixSubspace::from_orthonormal(dims[d], dims[s], basis));
        }
        homs.push(row);
    }
    Ok(TypedCategory {
        cat: FinCStarCat::from_homs(objects, homs, tol)?,
        type_dims: type_dims.to_vec(),
        mu: mu.to_vec(),
    })
}

/// Random typed category with at most `max_objects` objects, `max_types`
/// types of size 1 or 2, and multiplicities in `0..=2` (every object nonzero).
pub fn random_typed_category<R: Rng + ?Sized>(
    rng: &mut R,
    max_objects: usize,
    max_types: usize,
    max_dim: usize,
) -> Result<TypedCategory> {
    loop {
        let types = rng.random_range(1..=max_types);
        let type_dims: Vec<usize> = (0..types).map(|_| rng.random_range(1..=2)).collect();
        let n = rng.random_range(1..=max_objects);
        let mu: Vec<Vec<usize>> = (0..n)
            .map(|_| (0..types).map(|_| rng.random_range(0..=2)).collect())
            .collect();
        let dims_ok = mu.iter().all(|m| {
            let d: usize = m.iter().zip(&type_dims).map(|(a, b)| a * b).sum();
            (1..=max_dim).contains(&d)
        });
        if !dims_ok {
            continue;
        }
        let unitaries: Vec<ComplexMatrix> = mu
            .iter()
            .map(|m| random_unitary(m.iter().zip(&type_dims).map(|(a, b)| a * b).sum(), rng))
            .collect();
        return typed_category(&type_dims, &mu, &unitaries, Tolerances::default());
    }
}

/// Category generated by a few random morphisms between random objects.
pub fn random_generated_category<R: Rng + ?Sized>(rng: &mut R, max_objects: usize, max_dim: usize) -> Result<FinCStarCat> {
    let n = rng.random_range(1..=max_objects);
    let objects: Vec<ObjectInfo> = (0..n)
        .map(|k| ObjectInfo {
            id: format!("O{k}"),
            dim: rng.random_range(1..=max_dim),
        })
        .collect();
    let gens: Vec<(ObjIdx, ObjIdx, ComplexMatrix)> = (0..rng.random_range(0..=n))
        .map(|_| {
            let (s, d) = (rng.random_range(0..n), rng.random_range(0..n));
            // rank one, so the closure stays small more often
            let u = ComplexMatrix::random(objects[d].dim, 1, rng);
            let v = ComplexMatrix::random(objects[s].dim, 1, rng);
            (s, d, &u * &v.adjoint())
        })
        .collect();
    FinCStarCat::generated(objects, &gens, Tolerances::default())
}

/// The axiom a mutation breaks, named as in the validation report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    DroppedIdentity,
    BrokenInvolution,
}

impl Mutation {
    pub fn check_name(&self) -> &'static str {
        match self {
            Mutation::DroppedIdentity => "identity",
            Mutation::BrokenInvolution => "involution closure",
        }
    }
}

/// Removes the identity direction from one endomorphism space, or adds a
/// matrix to one morphism space without its adjoint.
pub fn mutate<R: Rng + ?Sized>(cat: &FinCStarCat, kind: Mutation, rng: &mut R) -> Result<FinCStarCat> {
    let n = cat.len();
    let mut homs = cat.homs().clone();
    match kind {
        Mutation::DroppedIdentity => {
            let k = rng.random_range(0..n);
            let d = cat.dim(k);
            let unit = ComplexMatrix::identity(d).scale(1.0 / (d as f64).sqrt());
            let kept: Vec<ComplexMatrix> = cat
                .hom(k, k)
                .basis()
                .iter()
                .map(|b| b - &unit.scale_c(unit.hs_inner(b)))
                .collect();
            homs[k][k] = MatrixSubspace::span(d, d, &kept, cat.tol())?;
        }
        Mutation::BrokenInvolution => {
            let mut pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|s| (0..n).map(move |d| (s, d)))
                .filter(|&(s, d)| cat.hom(s, d).dim() < cat.dim(s) * cat.dim(d) && cat.dim(s) * cat.dim(d) > 1)
                .collect();
            pairs.shuffle(rng);
            let Some(&(s, d)) = pairs.first() else {
                return Err(Error::InvalidCategory("every morphism space is full".into()));
            };
            let space = cat.hom(s, d);
            loop {
                let m = ComplexMatrix::random(cat.dim(d), cat.dim(s), rng);
                let (p, _) = space.project(&m)?;
                let r = &m - &p;
                let mut grown = space.clone();
                if !grown.insert(&r, cat.tol())? {
                    continue;
                }
                if s == d && grown.contains(&r.adjoint(), cat.tol())? {
                    continue;
                }
                homs[s][d] = grown;
                break;
            }
        }
    }
    FinCStarCat::from_homs(cat.objects().to_vec(), homs, *cat.tol())
}

/// `h_i: src -> C_i` for each summand, random morphisms with a common source.
pub fn random_family<R: Rng + ?Sized>(cat: &FinCStarCat, src: ObjIdx, targets: &[ObjIdx], rng: &mut R) -> Vec<Morphism> {
    targets.iter().map(|&t| cat.random_morphism(src, t, rng)).collect()
}
