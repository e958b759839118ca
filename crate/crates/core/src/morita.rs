//! Morita equivalence of functors between finite C*-categories: full
//! faithfulness plus Wedderburn-block coverage, with explicit isometric
//! witnesses, and the induced isomorphisms on K0.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::afunctor::{a_of_functor, ideal_algebra, AlgebraMap, BlockIndex};
use crate::category::{is_fully_faithful, quotient_by_ideal, CatFunctor, FinCStarCat, Ideal};
use crate::error::{Error, Result};
use crate::intmat::IntMatrix;
use crate::ktheory::{functor_k0_map, k0_class, k0_group, k0_map, k0_of_category, K0Data};
use crate::linalg::{hermitian_eig, inv_sqrt_psd, ComplexMatrix};
use crate::report::{Check, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        })
    }
}

/// Coverage evidence for one target object `E`.
#[derive(Debug, Clone)]
pub struct ObjectEvidence {
    pub object: String,
    /// Block ranks of `id_E`.
    pub class: Vec<i64>,
    pub covered: bool,
    /// Smallest eigenvalue of `T = Σ b* b` over `b ∈ hom(E, F C)`.
    pub t_min: f64,
    /// Isometry `E -> ⊕ F(C)` stacked over the basis elements `b`, with its
    /// defect `|v* v - id|`.
    pub witness: Option<(ComplexMatrix, f64)>,
}

#[derive(Debug, Clone)]
pub struct MoritaVerdict {
    pub verdict: Verdict,
    pub fully_faithful: bool,
    /// Block ranks of the images `id_{F C}`, summed.
    pub image_coverage: Vec<i64>,
    pub evidence: Vec<ObjectEvidence>,
}

/// `T = Σ_{C, b} b* b` for `b` over bases of `hom(e, F C)`, and the stacked
/// isometry `v = [b T^{-1/2}]` when `T` is invertible.
fn coverage_witness(f: &CatFunctor, e: usize) -> Result<(f64, Option<(ComplexMatrix, f64)>)> {
    let tgt = &f.target;
    let de = tgt.dim(e);
    if de == 0 {
        return Ok((f64::INFINITY, Some((ComplexMatrix::zeros(0, 0), 0.0))));
    }
    let mut images: Vec<usize> = f.object_map.clone();
    images.sort_unstable();
    images.dedup();
    let bs: Vec<&ComplexMatrix> = images.iter().flat_map(|&c| tgt.hom(e, c).basis()).collect();
    let mut t = ComplexMatrix::zeros(de, de);
    for b in &bs {
        t = &t + &(&b.adjoint() * *b);
    }
    let t = t.hermitian_part();
    let eig = hermitian_eig(&t)?;
    let t_min = eig.values.first().copied().unwrap_or(0.0);
    let scale = 1.0 + eig.values.last().copied().unwrap_or(0.0);
    if t_min <= tgt.tol().rank * scale {
        return Ok((t_min, None));
    }
    let inv = inv_sqrt_psd(&t, 0.0)?;
    let rows: usize = bs.iter().map(|b| b.rows()).sum();
    let mut v = ComplexMatrix::zeros(rows, de);
    let mut off = 0;
    for b in &bs {
        v.set_block(off, 0, &(*b * &inv));
        off += b.rows();
    }
    let defect = (&(&v.adjoint() * &v) - &ComplexMatrix::identity(de)).hs_norm();
    Ok((t_min, Some((v, defect))))
}

pub fn is_morita_equivalence(f: &CatFunctor, seed: u64) -> Result<MoritaVerdict> {
    morita_verdict_with(f, &k0_of_category(&f.target, seed)?)
}

/// [`is_morita_equivalence`] with `K0(A(target))` already computed.
pub fn morita_verdict_with(f: &CatFunctor, k0: &K0Data) -> Result<MoritaVerdict> {
    let fully_faithful = is_fully_faithful(f);
    let tgt = &f.target;
    let idx = BlockIndex::of(tgt);
    let class_of = |k: usize| k0_class(k0, &idx.object_projection(k));
    let mut image_coverage = vec![0i64; k0.rank()];
    for &c in &f.object_map {
        for (acc, r) in image_coverage.iter_mut().zip(class_of(c)?) {
            *acc += r;
        }
    }
    let mut evidence = Vec::with_capacity(tgt.len());
    let mut all_covered = true;
    let mut inconclusive = false;
    for e in 0..tgt.len() {
        let class = class_of(e)?;
        let covered = class.iter().zip(&image_coverage).all(|(&r, &c)| r == 0 || c > 0);
        let (t_min, witness) = coverage_witness(f, e)?;
        // the block criterion and the witness must agree
        if covered != witness.is_some() {
            inconclusive = true;
        }
        if let Some((_, defect)) = &witness {
            if *defect > tgt.tol().mem_bound(1.0) {
                inconclusive = true;
            }
        }
        all_covered &= covered;
        evidence.push(ObjectEvidence {
            object: tgt.object(e).id.clone(),
            class,
            covered,
            t_min,
            witness,
        });
    }
    let verdict = if inconclusive {
        Verdict::Unknown
    } else if fully_faithful && all_covered {
        Verdict::Yes
    } else {
        Verdict::No
    };
    Ok(MoritaVerdict {
        verdict,
        fully_faithful,
        image_coverage,
        evidence,
    })
}

/// K0 matrix of a functor: through `A(F)` when `F` is injective on objects,
/// otherwise by projection pushforward.
pub fn functor_k0(f: &CatFunctor, source: &K0Data, target: &K0Data, seed: u64) -> Result<IntMatrix> {
    if f.is_injective_on_objects() {
        let phi = a_of_functor(f)?;
        let phi = AlgebraMap {
            source: source.algebra.clone(),
            target: target.algebra.clone(),
            coeffs: phi.coeffs,
        };
        k0_map(&phi, source, target, seed)
    } else {
        functor_k0_map(f, source, target, seed)
    }
}

/// For a Morita equivalence, checks that the induced K0 map is invertible over Z.
pub fn verify_morita_k0_invariance(f: &CatFunctor, seed: u64) -> Result<Report> {
    let verdict = is_morita_equivalence(f, seed)?;
    let src = k0_of_category(&f.source, seed)?;
    let tgt = k0_of_category(&f.target, seed)?;
    let m = functor_k0(f, &src, &tgt, seed)?;
    let mut r = Report::new("Morita invariance of K0");
    r.push(Check::flag("Morita equivalence", verdict.verdict == Verdict::Yes));
    r.push(Check::flag("K0 isomorphism", m.is_isomorphism()).with_detail(format!("K0 matrix {m}")));
    Ok(r)
}

/// A map of ideals `K ⊆ C`, `L ⊆ D` induced by a functor `ψ: C -> D` with
/// `ψ(K) ⊆ L`.
#[derive(Debug, Clone)]
pub struct RelativeSquare {
    pub functor: CatFunctor,
    pub source_ideal: Ideal,
    pub target_ideal: Ideal,
}

/// The K0 matrices of the three rows of the square, and the resulting check
/// that `K0(K) -> K0(L)` is an isomorphism.
pub fn relative_morita_check(sq: &RelativeSquare, seed: u64) -> Result<Report> {
    let psi = &sq.functor;
    let (c, d) = (&psi.source, &psi.target);
    sq.source_ideal.validate(c)?;
    sq.target_ideal.validate(d)?;
    // ψ(K) ⊆ L
    let tol = d.tol();
    for s in 0..c.len() {
        for t in 0..c.len() {
            for b in sq.source_ideal.homs[s][t].basis() {
                let img = psi.apply(s, t, b)?;
                let r = sq.target_ideal.homs[psi.object_map[s]][psi.object_map[t]].residual(&img)?;
                if r > tol.mem_bound(img.hs_norm()) {
                    return Err(Error::NotAnExactSquare(format!(
                        "image of the ideal leaves the target ideal at ({} -> {})",
                        c.object(s).id,
                        c.object(t).id
                    )));
                }
            }
        }
    }
    let (qc, q) = quotient_by_ideal(c, &sq.source_ideal)?;
    let (qd, qp) = quotient_by_ideal(d, &sq.target_ideal)?;
    let mut gens = BTreeMap::new();
    for s in 0..c.len() {
        for t in 0..c.len() {
            let list = c
                .hom(s, t)
                .basis()
                .iter()
                .map(|b| Ok((q.apply(s, t, b)?, qp.apply(psi.object_map[s], psi.object_map[t], &psi.apply(s, t, b)?)?)))
                .collect::<Result<Vec<_>>>()?;
            gens.insert((s, t), list);
        }
    }
    let kappa = CatFunctor::from_generators(qc.clone(), qd.clone(), psi.object_map.clone(), &gens)
        .map_err(|e| Error::NotAnExactSquare(format!("no induced quotient functor: {e}")))?;

    let psi_verdict = is_morita_equivalence(psi, seed)?;
    let kappa_verdict = is_morita_equivalence(&kappa, seed)?;

    // ideal row
    let phi_a = a_of_functor(psi)?;
    let ka = Arc::new(ideal_algebra(c, &sq.source_ideal)?);
    let la = Arc::new(ideal_algebra(d, &sq.target_ideal)?);
    let phi_k = AlgebraMap::from_fn(ka.clone(), la.clone(), |x| phi_a.apply(x).expect("ideal element"))?;
    let k0_k = k0_group(ka.clone(), seed)?;
    let k0_l = k0_group(la.clone(), seed)?;
    let m_ideal = k0_map(&phi_k, &k0_k, &k0_l, seed)?;
    // middle and quotient rows
    let k0_c = k0_of_category(c, seed)?;
    let k0_d = k0_of_category(d, seed)?;
    let m_mid = functor_k0(psi, &k0_c, &k0_d, seed)?;
    let k0_qc = k0_of_category(&qc, seed)?;
    let k0_qd = k0_of_category(&qd, seed)?;
    let m_quot = functor_k0(&kappa, &k0_qc, &k0_qd, seed)?;
    // left square commutes: K0(K) -> K0(C) -> K0(D) equals K0(K) -> K0(L) -> K0(D)
    let inc_k = AlgebraMap::from_fn(ka, k0_c.algebra.clone(), |x| x.clone())?;
    let inc_l = AlgebraMap::from_fn(la, k0_d.algebra.clone(), |x| x.clone())?;
    let i_k = k0_map(&inc_k, &k0_k, &k0_c, seed)?;
    let i_l = k0_map(&inc_l, &k0_l, &k0_d, seed)?;
    let commutes = m_mid.mul(&i_k) == i_l.mul(&m_ideal);

    let mut r = Report::new("relative Morita");
    r.push(Check::flag("middle functor Morita", psi_verdict.verdict == Verdict::Yes));
    r.push(Check::flag("quotient functor Morita", kappa_verdict.verdict == Verdict::Yes));
    r.push(Check::flag("middle K0 isomorphism", m_mid.is_isomorphism()).with_detail(m_mid.to_string()));
    r.push(Check::flag("quotient K0 isomorphism", m_quot.is_isomorphism()).with_detail(m_quot.to_string()));
    r.push(Check::flag("ideal square commutes", commutes));
    r.push(Check::flag("ideal K0 isomorphism", m_ideal.is_isomorphism()).with_detail(m_ideal.to_string()));
    Ok(r)
}

/// Relative square whose functor is a finite relative idempotent completion
/// `C -> Idem(C)` with `K ↦ Idem^C(K)`.
pub fn relative_completion_square(
    base: Arc<FinCStarCat>,
    ideal: Ideal,
    extra: &[crate::sums::IdemObject],
) -> Result<RelativeSquare> {
    let rel = crate::sums::relative_idem_completion(base, ideal.clone())?;
    let m = rel.materialize(extra)?;
    Ok(RelativeSquare {
        functor: m.ambient.inclusion,
        source_ideal: ideal,
        target_ideal: m.ideal,
    })
}

/// Verifies a user-supplied MvN equivalence `u = (u_C): f -> g`: each `u_C` is a
/// partial isometry in `hom(f C, g C)`, natural, with `u*u f(k) = f(k)` and
/// `g(k) u u* = g(k)`. Also compares the two K0 maps.
pub fn verify_mvn_functors(f: &CatFunctor, g: &CatFunctor, witness: &[ComplexMatrix], seed: u64) -> Result<Report> {
    if !Arc::ptr_eq(&f.source, &g.source) && f.source.len() != g.source.len() {
        return Err(Error::DomainMismatch);
    }
    if witness.len() != f.source.len() {
        return Err(Error::FamilyMismatch);
    }
    let (c, d) = (&f.source, &f.target);
    let tol = d.tol();
    let mut member = 0.0f64;
    let mut partial = 0.0f64;
    let mut natural = 0.0f64;
    let mut support = 0.0f64;
    for (k, u) in witness.iter().enumerate() {
        let (fk, gk) = (f.object_map[k], g.object_map[k]);
        if u.shape() != (d.dim(gk), d.dim(fk)) {
            return Err(Error::ShapeMismatch {
                expected: (d.dim(gk), d.dim(fk)),
                got: u.shape(),
            });
        }
        member = member.max(d.hom(fk, gk).residual(u)? / (1.0 + u.hs_norm()));
        partial = partial.max((&(&(u * &u.adjoint()) * u) - u).hs_norm());
    }
    for s in 0..c.len() {
        for t in 0..c.len() {
            let (us, ut) = (&witness[s], &witness[t]);
            for b in c.hom(s, t).basis() {
                let fb = f.apply(s, t, b)?;
                let gb = g.apply(s, t, b)?;
                natural = natural.max((&(ut * &fb) - &(&gb * us)).hs_norm());
                support = support.max((&(&(&ut.adjoint() * ut) * &fb) - &fb).hs_norm());
                support = support.max((&(&(&gb * us) * &us.adjoint()) - &gb).hs_norm());
            }
        }
    }
    let bound = tol.mem_bound(1.0);
    let mut r = Report::new("MvN equivalence of functors");
    r.push(Check::new("components are morphisms", member, bound));
    r.push(Check::new("partial isometries", partial, bound));
    r.push(Check::new("naturality", natural, bound));
    r.push(Check::new("support identities", support, bound));
    let src = k0_of_category(c, seed)?;
    let tgt = k0_of_category(d, seed)?;
    let (mf, mg) = (functor_k0(f, &src, &tgt, seed)?, functor_k0(g, &src, &tgt, seed)?);
    r.push(Check::flag("equal K0 maps", mf == mg).with_detail(format!("{mf} vs {mg}")));
    Ok(r)
}
