//! Wedderburn decomposition of concrete finite-dimensional C*-algebras and
//! the resulting K0 groups, classes and induced maps.
//!
//! For a finite-dimensional algebra `A ≅ ⊕_i M_{n_i}`, K0(A) is free on the
//! blocks and the class of a projection `p` is its vector of block ranks
//! `tr(z_i p) / m_i`, where `m_i` is the multiplicity of block `i` in the
//! concrete representation. K1 vanishes.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::afunctor::{build_a, end_algebra, AlgebraMap, BlockIndex, ConcreteAlgebra};
use crate::category::{CatFunctor, FinCStarCat, ObjIdx};
use crate::error::{Error, Result};
use crate::intmat::IntMatrix;
use crate::linalg::{hermitian_eig, inv_sqrt_psd, seeded_rng, ComplexMatrix, MatrixSubspace, C64};
use crate::report::{Check, Report};

pub const K1_NOTE: &str = "K1 = 0 (finite-dimensional)";

/// Retry budget for randomized central and minimal projections.
pub const WEDDERBURN_ATTEMPTS: usize = 8;
const CENTER_SEED: u64 = 0x0c3e_47e5;

#[derive(Debug, Clone)]
pub struct WedderburnBlock {
    /// Minimal central projection.
    pub z: ComplexMatrix,
    /// Matrix size: `z A ≅ M_n`.
    pub n: usize,
    /// Multiplicity of the block in the representation: `tr z = n m`.
    pub m: usize,
    /// A minimal projection below `z`.
    pub min_proj: ComplexMatrix,
}

#[derive(Debug, Clone)]
pub struct WedderburnData {
    pub rep_dim: usize,
    pub center_dim: usize,
    pub blocks: Vec<WedderburnBlock>,
}

impl WedderburnData {
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.n).collect()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.m).collect()
    }
}

/// Nonzero entries of a matrix. Basis elements of `A(C)` live in single
/// blocks, so products against them are cheap in this form.
struct Sparse {
    entries: Vec<(usize, usize, C64)>,
}

impl Sparse {
    fn of(m: &ComplexMatrix) -> Sparse {
        let mut entries = Vec::new();
        for j in 0..m.cols() {
            for i in 0..m.rows() {
                let z = m.get(i, j);
                if z != C64::new(0.0, 0.0) {
                    entries.push((i, j, z));
                }
            }
        }
        Sparse { entries }
    }

    /// `self * t - t * self`.
    fn commutator(&self, t: &ComplexMatrix) -> ComplexMatrix {
        let n = t.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for &(i, j, v) in &self.entries {
            for k in 0..n {
                out.set(i, k, out.get(i, k) + v * t.get(j, k));
                out.set(k, j, out.get(k, j) - t.get(k, i) * v);
            }
        }
        out
    }

    /// Adds `self * self^*` to `acc`.
    fn add_gram_into(&self, acc: &mut ComplexMatrix) {
        // entries are stored column by column
        for col in self.entries.chunk_by(|a, b| a.1 == b.1) {
            for &(i, _, v) in col {
                for &(k, _, w) in col {
                    acc.set(i, k, acc.get(i, k) + v * w.conj());
                }
            }
        }
    }

    /// HS inner product `<self, m>`.
    fn inner(&self, m: &ComplexMatrix) -> C64 {
        self.entries.iter().map(|&(i, j, v)| v.conj() * m.get(i, j)).sum()
    }
}

/// Null space of `c ↦ ([Σ c_j b_j, t])_{t ∈ tests}` inside `alg`. Commutators
/// of algebra elements stay in the algebra, so they are compared through
/// their coordinates in the orthonormal basis.
fn commutant_in(alg: &ConcreteAlgebra, sparse: &[Sparse], tests: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
    let d = sparse.len();
    let mut gram = ComplexMatrix::zeros(d, d);
    for t in tests {
        let mut coords = ComplexMatrix::zeros(d, d);
        for (j, bj) in sparse.iter().enumerate() {
            let c = bj.commutator(t);
            for (i, bi) in sparse.iter().enumerate() {
                coords.set(i, j, bi.inner(&c));
            }
        }
        gram = &gram + &(&coords.adjoint() * &coords);
    }
    let eig = hermitian_eig(&gram.hermitian_part())?;
    let top = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    let cut = alg.tol.rank * (1.0 + top);
    let mut out = Vec::new();
    for (k, &v) in eig.values.iter().enumerate() {
        if v > cut {
            break;
        }
        let coeffs: Vec<C64> = (0..d).map(|j| eig.vectors.get(j, k)).collect();
        out.push(alg.space.from_coords(&coeffs));
    }
    Ok(out)
}

/// Orthonormal basis of the center of `alg`.
///
/// Two generic elements generate a semisimple algebra, so their commutant in
/// `alg` is the center; the candidate is verified against every basis
/// element and the full commutator system is used if that fails.
pub fn center(alg: &ConcreteAlgebra) -> Result<MatrixSubspace> {
    let n = alg.rep_dim;
    let basis = alg.space.basis();
    if basis.is_empty() {
        return Ok(MatrixSubspace::zero(n, n));
    }
    let sparse: Vec<Sparse> = basis.iter().map(Sparse::of).collect();
    let mut rng = seeded_rng(CENTER_SEED);
    let probes = [alg.random_element(&mut rng), alg.random_element(&mut rng)];
    let candidate = commutant_in(alg, &sparse, &probes)?;
    let central = candidate.iter().all(|z| {
        sparse
            .iter()
            .zip(basis)
            .all(|(s, b)| s.commutator(z).hs_norm() <= alg.tol.mem_bound(b.hs_norm()))
    });
    let out = if central {
        candidate
    } else {
        commutant_in(alg, &sparse, basis)?
    };
    Ok(MatrixSubspace::from_orthonormal(n, n, out))
}

/// `Σ_k b_k b_k*` over the orthonormal basis. For a central projection `z`,
/// `x ↦ z x` is an orthogonal projection of `A`, so `dim zA = tr(z K)`.
fn basis_frame(alg: &ConcreteAlgebra) -> ComplexMatrix {
    let n = alg.rep_dim;
    let mut k = ComplexMatrix::zeros(n, n);
    for b in alg.space.basis() {
        Sparse::of(b).add_gram_into(&mut k);
    }
    k
}

fn reference_weight(z: &ComplexMatrix) -> f64 {
    let n = z.rows();
    let v: Vec<f64> = (0..n).map(|j| ((j + 2) as f64).sqrt()).collect();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += v[i] * v[j] * z.get(i, j).re;
        }
    }
    acc
}

fn block_order(a: &WedderburnBlock, b: &WedderburnBlock) -> Ordering {
    a.n.cmp(&b.n)
        .then_with(|| reference_weight(&a.z).total_cmp(&reference_weight(&b.z)))
        .then_with(|| {
            let da: Vec<f64> = (0..a.z.rows()).map(|i| a.z.get(i, i).re).collect();
            let db: Vec<f64> = (0..b.z.rows()).map(|i| b.z.get(i, i).re).collect();
            da.partial_cmp(&db).unwrap_or(Ordering::Equal)
        })
}

fn round_guarded(value: f64, guard: f64) -> Result<i64> {
    let r = value.round();
    let residual = (value - r).abs();
    if residual > guard {
        return Err(Error::RoundingFailure { value, residual });
    }
    Ok(r as i64)
}

/// Smallest-eigenvalue spectral projection of a generic self-adjoint element
/// of the corner `z B z`, where `B` is spanned by `space` and `z` is central.
fn minimal_projection_in<R: Rng + ?Sized>(
    space: &MatrixSubspace,
    z: &ComplexMatrix,
    expected_trace: usize,
    rank_tol: f64,
    rng: &mut R,
) -> Option<ComplexMatrix> {
    for _ in 0..WEDDERBURN_ATTEMPTS {
        let a = space.random_element(rng).hermitian_part();
        let x = &(z * &a) * z;
        let y = &x + &z.scale(x.operator_norm() + 1.0);
        let eig = hermitian_eig(&y.hermitian_part()).ok()?;
        let gap = rank_tol * (1.0 + y.operator_norm());
        let Some((_, idx)) = eig.clusters(gap).into_iter().find(|(mean, _)| *mean > 0.5) else {
            continue;
        };
        if idx.len() == expected_trace {
            return Some(eig.projection(&idx));
        }
    }
    None
}

fn wedderburn_attempt<R: Rng + ?Sized>(
    alg: &ConcreteAlgebra,
    unit: &ComplexMatrix,
    centre: &MatrixSubspace,
    frame: &ComplexMatrix,
    rng: &mut R,
) -> Option<Vec<WedderburnBlock>> {
    let tol = &alg.tol;
    let mut h = ComplexMatrix::zeros(alg.rep_dim, alg.rep_dim);
    for c in centre.basis() {
        let r: f64 = rng.sample(StandardNormal);
        let s: f64 = rng.sample(StandardNormal);
        h = &h + &c.scale_c(C64::new(r, s));
    }
    let h = h.hermitian_part();
    let eig = hermitian_eig(&h).ok()?;
    let gap = tol.rank * (1.0 + h.operator_norm());
    let mut blocks = Vec::new();
    let mut total = 0usize;
    for (_, idx) in eig.clusters(gap) {
        let z = (&eig.projection(&idx) * unit).hermitian_part();
        let tr = z.trace().re;
        if tr < 0.5 {
            continue;
        }
        if (&(&z * &z) - &z).hs_norm() > tol.mem_bound(z.hs_norm()) {
            return None;
        }
        if !centre.contains(&z, tol).ok()? {
            return None;
        }
        let dz = round_guarded((&z * frame).trace().re, tol.rank).ok()?;
        if dz <= 0 {
            return None;
        }
        let dz = dz as usize;
        let n = (dz as f64).sqrt().round() as usize;
        if n == 0 || n * n != dz {
            return None;
        }
        let nm = round_guarded(tr, tol.rank).ok()?;
        if nm <= 0 || nm as usize % n != 0 {
            return None;
        }
        total += dz;
        blocks.push(WedderburnBlock {
            z,
            n,
            m: nm as usize / n,
            min_proj: ComplexMatrix::zeros(0, 0),
        });
    }
    if blocks.len() != centre.dim() || total != alg.dim() {
        return None;
    }
    for b in blocks.iter_mut() {
        b.min_proj = minimal_projection_in(&alg.space, &b.z, b.m, tol.rank, rng)?;
    }
    blocks.sort_by(block_order);
    Some(blocks)
}

/// Minimal central projections with block sizes and multiplicities.
pub fn wedderburn(alg: &ConcreteAlgebra, seed: u64) -> Result<WedderburnData> {
    let unit = alg.unit()?.clone();
    let centre = center(alg)?;
    let mut rng = seeded_rng(seed);
    if alg.dim() == 0 {
        return Ok(WedderburnData {
            rep_dim: alg.rep_dim,
            center_dim: 0,
            blocks: Vec::new(),
        });
    }
    let frame = basis_frame(alg);
    for _ in 0..WEDDERBURN_ATTEMPTS {
        if let Some(blocks) = wedderburn_attempt(alg, &unit, &centre, &frame, &mut rng) {
            return Ok(WedderburnData {
                rep_dim: alg.rep_dim,
                center_dim: centre.dim(),
                blocks,
            });
        }
    }
    Err(Error::NonGeneric(WEDDERBURN_ATTEMPTS))
}

/// K0 of a concrete algebra: `Z^k` on the Wedderburn blocks.
#[derive(Debug, Clone)]
pub struct K0Data {
    pub algebra: Arc<ConcreteAlgebra>,
    pub wedderburn: WedderburnData,
    pub labels: Vec<String>,
}

impl K0Data {
    pub fn rank(&self) -> usize {
        self.wedderburn.blocks.len()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.wedderburn.block_sizes()
    }

    /// Block sizes sorted ascending; an isomorphism invariant of the algebra.
    pub fn block_multiset(&self) -> Vec<usize> {
        let mut s = self.block_sizes();
        s.sort_unstable();
        s
    }

    pub fn unit_class(&self) -> Vec<i64> {
        self.wedderburn.blocks.iter().map(|b| b.n as i64).collect()
    }

    /// Generator projection of block `i` (class `e_i`).
    pub fn generator(&self, i: usize) -> &ComplexMatrix {
        &self.wedderburn.blocks[i].min_proj
    }

    pub fn class(&self, p: &ComplexMatrix) -> Result<Vec<i64>> {
        k0_class(self, p)
    }
}

impl fmt::Display for K0Data {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let unit: Vec<String> = self.unit_class().iter().map(i64::to_string).collect();
        write!(f, "K0 = Z^{}, [1] -> ({})", self.rank(), unit.join(", "))
    }
}

pub fn k0_group(alg: Arc<ConcreteAlgebra>, seed: u64) -> Result<K0Data> {
    let wedderburn = wedderburn(&alg, seed)?;
    let labels = wedderburn
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| format!("b{i}:M{}", b.n))
        .collect();
    Ok(K0Data {
        algebra: alg,
        wedderburn,
        labels,
    })
}

/// Residual of `p` as an orthogonal projection.
pub fn projection_defect(p: &ComplexMatrix) -> f64 {
    if !p.is_square() {
        return f64::INFINITY;
    }
    (p - &p.adjoint()).hs_norm().max((&(p * p) - p).hs_norm())
}

/// Block-rank vector of a projection of the algebra.
pub fn k0_class(data: &K0Data, p: &ComplexMatrix) -> Result<Vec<i64>> {
    let alg = &data.algebra;
    if p.shape() != (alg.rep_dim, alg.rep_dim) {
        return Err(Error::ShapeMismatch {
            expected: (alg.rep_dim, alg.rep_dim),
            got: p.shape(),
        });
    }
    let bound = alg.tol.mem_bound(p.hs_norm());
    let defect = projection_defect(p);
    if defect > bound {
        return Err(Error::NotAProjection(defect));
    }
    let r = alg.space.residual(p)?;
    if r > bound {
        return Err(Error::NotInAlgebra(r));
    }
    data.wedderburn
        .blocks
        .iter()
        .map(|b| round_guarded((&b.z * p).trace().re / b.m as f64, alg.tol.rank))
        .collect()
}

/// K0 matrix whose columns are the classes of the given projections.
pub fn classes_matrix(target: &K0Data, images: &[ComplexMatrix]) -> Result<IntMatrix> {
    let cols = images
        .iter()
        .map(|p| k0_class(target, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntMatrix::from_columns(target.rank(), &cols))
}

/// `K0(φ)`: column `j` is the class of `φ(generator j)`.
pub fn k0_map(phi: &AlgebraMap, source: &K0Data, target: &K0Data, seed: u64) -> Result<IntMatrix> {
    phi.check_star_hom(seed)?;
    let images = (0..source.rank())
        .map(|i| phi.apply(source.generator(i)))
        .collect::<Result<Vec<_>>>()?;
    classes_matrix(target, &images)
}

/// K0 of `A(cat)`.
pub fn k0_of_category(cat: &FinCStarCat, seed: u64) -> Result<K0Data> {
    let (alg, _) = build_a(cat);
    k0_group(Arc::new(alg), seed)
}

/// A minimal projection of block `i` of `A(cat)` supported on a single
/// object: returns that object and the projection as an endomorphism.
pub fn object_minimal_projection(
    cat: &FinCStarCat,
    data: &K0Data,
    i: usize,
    seed: u64,
) -> Result<(ObjIdx, ComplexMatrix)> {
    let idx = BlockIndex::of(cat);
    let z = &data.wedderburn.blocks[i].z;
    let m = data.wedderburn.blocks[i].m;
    let mut rng = seeded_rng(seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    for k in 0..cat.len() {
        let zk = idx.extract(k, k, z);
        if zk.trace().re < 0.5 {
            continue;
        }
        let end = end_algebra(cat, k);
        let Some(p) = minimal_projection_in(&end.space, &zk, m, cat.tol().rank, &mut rng) else {
            continue;
        };
        let mut expected = vec![0; data.rank()];
        expected[i] = 1;
        if k0_class(data, &idx.embed(k, k, &p))? == expected {
            return Ok((k, p));
        }
    }
    Err(Error::NonGeneric(WEDDERBURN_ATTEMPTS))
}

/// K0 matrix of a functor computed by pushing single-object minimal
/// projections forward; works for functors that merge objects.
pub fn functor_k0_map(f: &CatFunctor, source: &K0Data, target: &K0Data, seed: u64) -> Result<IntMatrix> {
    let tgt_idx = BlockIndex::of(&f.target);
    let images = (0..source.rank())
        .map(|i| {
            let (k, p) = object_minimal_projection(&f.source, source, i, seed)?;
            let fp = f.apply(k, k, &p)?;
            Ok(tgt_idx.embed(f.object_map[k], f.object_map[k], &fp))
        })
        .collect::<Result<Vec<_>>>()?;
    classes_matrix(target, &images)
}

pub fn mvn_subequivalent(data: &K0Data, p: &ComplexMatrix, q: &ComplexMatrix) -> Result<bool> {
    let cp = k0_class(data, p)?;
    let cq = k0_class(data, q)?;
    Ok(cp.iter().zip(&cq).all(|(a, b)| a <= b))
}

pub fn mvn_equivalent(data: &K0Data, p: &ComplexMatrix, q: &ComplexMatrix) -> Result<bool> {
    Ok(k0_class(data, p)? == k0_class(data, q)?)
}

/// A partial isometry `u` in the algebra with `u* u = p` and `u u* = q`, when
/// the classes agree. Built as the polar part of a random element of `q A p`.
pub fn mvn_witness(data: &K0Data, p: &ComplexMatrix, q: &ComplexMatrix, seed: u64) -> Result<Option<ComplexMatrix>> {
    if !mvn_equivalent(data, p, q)? {
        return Ok(None);
    }
    let alg = &data.algebra;
    let tol = &alg.tol;
    let mut rng = seeded_rng(seed);
    for _ in 0..WEDDERBURN_ATTEMPTS {
        let a = alg.random_element(&mut rng);
        let x = &(q * &a) * p;
        let h = (&x.adjoint() * &x).hermitian_part();
        let cut = tol.rank * (1.0 + h.operator_norm());
        let u = &x * &inv_sqrt_psd(&h, cut)?;
        let bound = tol.mem_bound(p.hs_norm() + q.hs_norm());
        if (&(&u.adjoint() * &u) - p).hs_norm() <= bound
            && (&(&u * &u.adjoint()) - q).hs_norm() <= bound
            && alg.space.residual(&u)? <= tol.mem_bound(u.hs_norm())
        {
            return Ok(Some(u));
        }
    }
    Ok(None)
}

/// Worst residual of `ideal` failing to be a *-closed two-sided ideal of `alg`.
pub fn ideal_defect(alg: &ConcreteAlgebra, ideal: &MatrixSubspace) -> Result<f64> {
    let rel = |m: &ComplexMatrix| -> Result<f64> { Ok(ideal.residual(m)? / (1.0 + m.hs_norm())) };
    let mut worst = ideal.worst_residual_in(&alg.space)?;
    for i in ideal.basis() {
        worst = worst.max(rel(&i.adjoint())?);
        for a in alg.space.basis() {
            worst = worst.max(rel(&(a * i))?).max(rel(&(i * a))?);
        }
    }
    Ok(worst)
}

/// The short exact sequence `0 -> K0(I) -> K0(A) -> K0(A/I) -> 0` for an
/// ideal `I`, with `A/I` realized on the complement of the support of `I`.
pub fn exactness_check(alg: Arc<ConcreteAlgebra>, ideal: &MatrixSubspace, seed: u64) -> Result<Report> {
    let tol = alg.tol;
    let defect = ideal_defect(&alg, ideal)?;
    if defect > tol.mem {
        return Err(Error::NotAnIdeal(format!("ideal defect {defect:.3e}")));
    }
    let unit = alg.unit()?.clone();
    let i_alg = Arc::new(ConcreteAlgebra::with_support_unit(ideal.clone(), tol)?);
    let e = i_alg.unit()?.clone();
    let f = (&unit - &e).hermitian_part();
    let n = alg.rep_dim;
    let q_gens: Vec<ComplexMatrix> = alg.space.basis().iter().map(|b| &f * b).collect();
    let q_space = MatrixSubspace::span(n, n, &q_gens, &tol)?;
    let q_alg = Arc::new(ConcreteAlgebra::new(q_space, Some(f.clone()), tol));

    let iota = AlgebraMap::from_fn(i_alg.clone(), alg.clone(), |x| x.clone())?;
    let pi = AlgebraMap::from_fn(alg.clone(), q_alg.clone(), |x| &f * x)?;
    let k_i = k0_group(i_alg, seed)?;
    let k_a = k0_group(alg, seed)?;
    let k_q = k0_group(q_alg, seed)?;
    let mi = k0_map(&iota, &k_i, &k_a, seed)?;
    let mp = k0_map(&pi, &k_a, &k_q, seed)?;

    let mut report = Report::new("exactness");
    report.push(Check::flag("K0(I) -> K0(A) injective", mi.is_injective()));
    let saturated = mi.smith().diag.iter().all(|&d| d == 1);
    report.push(Check::flag("image of K0(I) saturated", saturated));
    report.push(Check::flag("K0(A) -> K0(A/I) surjective", mp.is_surjective()));
    report.push(Check::flag("composite zero", mp.mul(&mi).is_zero()));
    report.push(
        Check::flag("rank additivity", k_a.rank() == k_i.rank() + k_q.rank())
            .with_detail(format!("{} = {} + {}", k_a.rank(), k_i.rank(), k_q.rank())),
    );
    Ok(report)
}

/// `K0(∏ C_i) -> ⊕ K0(C_i)` through the projections is an isomorphism.
pub fn product_preservation_check(cats: &[&FinCStarCat], seed: u64) -> Result<Report> {
    let product = Arc::new(crate::category::product_category(cats)?);
    let kp = k0_of_category(&product, seed)?;
    let mut rows = Vec::new();
    for i in 0..cats.len() {
        let pi = crate::category::product_projection(product.clone(), cats, i)?;
        let ki = k0_of_category(cats[i], seed)?;
        rows.extend(functor_k0_map(&pi, &kp, &ki, seed)?.to_rows());
    }
    let m = if rows.is_empty() {
        IntMatrix::zeros(0, kp.rank())
    } else {
        IntMatrix::from_rows(&rows)
    };
    let mut r = Report::new("product preservation");
    r.push(Check::flag("K0 of product is the sum", m.is_isomorphism()).with_detail(format!("K0 matrix {m}")));
    Ok(r)
}
