//! Turns spec documents into validated categories, groups, actions and
//! functors. Hom bases are orthonormalized by Gram–Schmidt and the change
//! of basis is kept.

use std::collections::BTreeMap;
use std::sync::Arc;

use cstarcat::category::{validate, CatFunctor, FinCStarCat, ObjIdx, ObjectInfo};
use cstarcat::group::{FiniteGroup, GAction};
use cstarcat::linalg::MatrixSubspace;
use cstarcat::{ComplexMatrix, Tolerances, C64};
use serde::Serialize;

use crate::error::CliError;
use crate::spec::{ActionSpec, CategorySpec, FunctorSpec, GroupSpec, MatrixSpec, SpecDocument};

/// Coordinates of each supplied matrix in the orthonormalized basis of one
/// morphism space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisChange {
    pub source: String,
    pub target: String,
    pub rank: usize,
    /// Row `i` holds the coordinates of input matrix `i`.
    pub coordinates: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone)]
pub struct IngestedCategory {
    pub cat: Arc<FinCStarCat>,
    pub changes: Vec<BasisChange>,
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub category: IngestedCategory,
    pub action: Option<GAction>,
}

fn validation(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

pub fn matrix(spec: &MatrixSpec, rows: usize, cols: usize, what: &str) -> Result<ComplexMatrix, CliError> {
    let got_rows = spec.len();
    let got_cols = spec.first().map_or(0, Vec::len);
    if got_rows != rows || spec.iter().any(|r| r.len() != cols) || (rows > 0 && got_cols != cols) {
        return Err(validation(format!(
            "{what}: expected a {rows}x{cols} matrix, got {got_rows} rows of lengths {:?}",
            spec.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    let mut m = ComplexMatrix::zeros(rows, cols);
    for (i, row) in spec.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            if !z[0].is_finite() || !z[1].is_finite() {
                return Err(validation(format!("{what}: non-finite entry at ({i}, {j})")));
            }
            m.set(i, j, C64::new(z[0], z[1]));
        }
    }
    Ok(m)
}

pub fn matrix_spec(m: &ComplexMatrix) -> MatrixSpec {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect())
        .collect()
}

fn lookup(index: &BTreeMap<&str, ObjIdx>, id: &str, what: &str) -> Result<ObjIdx, CliError> {
    index
        .get(id)
        .copied()
        .ok_or_else(|| validation(format!("{what}: unknown object `{id}`")))
}

/// Builds the category and checks the C*-category axioms.
pub fn category(spec: &CategorySpec, tol: Tolerances) -> Result<IngestedCategory, CliError> {
    let objects: Vec<ObjectInfo> = spec
        .objects
        .iter()
        .map(|o| ObjectInfo {
            id: o.id.clone(),
            dim: o.dim,
        })
        .collect();
    let mut index = BTreeMap::new();
    for (k, o) in spec.objects.iter().enumerate() {
        if index.insert(o.id.as_str(), k).is_some() {
            return Err(validation(format!("duplicate object `{}`", o.id)));
        }
    }
    let mut inputs: BTreeMap<(ObjIdx, ObjIdx), Vec<ComplexMatrix>> = BTreeMap::new();
    for (h, hom) in spec.homs.iter().enumerate() {
        let s = lookup(&index, &hom.source, &format!("homs[{h}].source"))?;
        let d = lookup(&index, &hom.target, &format!("homs[{h}].target"))?;
        for (b, m) in hom.basis.iter().enumerate() {
            let what = format!("homs[{h}].basis[{b}] ({} -> {})", hom.source, hom.target);
            inputs.entry((s, d)).or_default().push(matrix(m, objects[d].dim, objects[s].dim, &what)?);
        }
    }
    let (cat, changes) = if spec.generate {
        let gens: Vec<(ObjIdx, ObjIdx, ComplexMatrix)> = inputs
            .into_iter()
            .flat_map(|((s, d), ms)| ms.into_iter().map(move |m| (s, d, m)))
            .collect();
        (FinCStarCat::generated(objects, &gens, tol)?, Vec::new())
    } else {
        let mut homs: Vec<Vec<MatrixSubspace>> = objects
            .iter()
            .map(|s| objects.iter().map(|d| MatrixSubspace::zero(d.dim, s.dim)).collect())
            .collect();
        let mut changes = Vec::new();
        for ((s, d), ms) in inputs {
            let space = MatrixSubspace::span(objects[d].dim, objects[s].dim, &ms, &tol)?;
            let coordinates = ms
                .iter()
                .map(|m| Ok(space.coords(m)?.into_iter().map(|z| [z.re, z.im]).collect()))
                .collect::<Result<Vec<Vec<[f64; 2]>>, cstarcat::Error>>()?;
            changes.push(BasisChange {
                source: objects[s].id.clone(),
                target: objects[d].id.clone(),
                rank: space.dim(),
                coordinates,
            });
            homs[s][d] = space;
        }
        (FinCStarCat::from_homs(objects, homs, tol)?, changes)
    };
    let report = validate(&cat);
    if !report.passed() {
        let failures: Vec<String> = report.failures().map(|c| c.to_string()).collect();
        return Err(validation(failures.join("; ")));
    }
    Ok(IngestedCategory {
        cat: Arc::new(cat),
        changes,
    })
}

pub fn group(spec: &GroupSpec) -> Result<FiniteGroup, CliError> {
    if spec.table.len() != spec.order {
        return Err(validation(format!(
            "group: order {} but table has {} rows",
            spec.order,
            spec.table.len()
        )));
    }
    if !spec.names.is_empty() && spec.names.len() != spec.order {
        return Err(validation("group: names must list every element"));
    }
    Ok(FiniteGroup::from_table(spec.table.clone())?)
}

pub fn action(spec: &ActionSpec, group: FiniteGroup, cat: &Arc<FinCStarCat>) -> Result<GAction, CliError> {
    if spec.elements.len() != group.order() {
        return Err(validation(format!(
            "action: {} elements for a group of order {}",
            spec.elements.len(),
            group.order()
        )));
    }
    let index: BTreeMap<&str, ObjIdx> = cat.objects().iter().enumerate().map(|(k, o)| (o.id.as_str(), k)).collect();
    let mut perm = Vec::with_capacity(group.order());
    let mut intertwiners = Vec::with_capacity(group.order());
    for (g, el) in spec.elements.iter().enumerate() {
        if el.objects.len() != cat.len() {
            return Err(validation(format!("action.elements[{g}]: expected {} object images", cat.len())));
        }
        let p = el
            .objects
            .iter()
            .map(|id| lookup(&index, id, &format!("action.elements[{g}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let v = match &el.intertwiners {
            Some(list) => {
                if list.len() != cat.len() {
                    return Err(validation(format!("action.elements[{g}]: expected {} intertwiners", cat.len())));
                }
                list.iter()
                    .enumerate()
                    .map(|(k, m)| {
                        matrix(m, cat.dim(p[k]), cat.dim(k), &format!("action.elements[{g}].intertwiners[{k}]"))
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
            None => (0..cat.len())
                .map(|k| {
                    if cat.dim(p[k]) != cat.dim(k) {
                        Err(validation(format!(
                            "action.elements[{g}]: `{}` and `{}` have different dimensions",
                            cat.object(k).id,
                            cat.object(p[k]).id
                        )))
                    } else {
                        Ok(ComplexMatrix::identity(cat.dim(k)))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?,
        };
        perm.push(p);
        intertwiners.push(v);
    }
    Ok(GAction::new(Arc::new(group), cat.clone(), perm, intertwiners)?)
}

pub fn document(doc: &SpecDocument, tol: Tolerances) -> Result<Ingested, CliError> {
    let category = category(&doc.category, tol)?;
    let action = match (&doc.group, &doc.action) {
        (Some(g), Some(a)) => Some(action(a, group(g)?, &category.cat)?),
        (Some(g), None) => Some(GAction::trivial(Arc::new(group(g)?), category.cat.clone())),
        (None, Some(_)) => return Err(validation("action given without a group")),
        (None, None) => None,
    };
    Ok(Ingested { category, action })
}

pub fn functor(spec: &FunctorSpec, source: &Arc<FinCStarCat>, tol: Tolerances) -> Result<CatFunctor, CliError> {
    let target = category(&spec.target, tol)?.cat;
    let src_index: BTreeMap<&str, ObjIdx> = source.objects().iter().enumerate().map(|(k, o)| (o.id.as_str(), k)).collect();
    let tgt_index: BTreeMap<&str, ObjIdx> = target.objects().iter().enumerate().map(|(k, o)| (o.id.as_str(), k)).collect();
    let mut object_map = vec![usize::MAX; source.len()];
    for (s, t) in &spec.objects {
        object_map[lookup(&src_index, s, "functor.objects")?] = lookup(&tgt_index, t, "functor.objects")?;
    }
    if let Some(k) = object_map.iter().position(|&t| t == usize::MAX) {
        return Err(validation(format!("functor.objects: no image for `{}`", source.object(k).id)));
    }
    let f = if spec.images.is_empty() {
        CatFunctor::from_matrix_map(source.clone(), target, object_map, |_, _, m| m.clone())?
    } else {
        let mut gens: BTreeMap<(ObjIdx, ObjIdx), Vec<(ComplexMatrix, ComplexMatrix)>> = BTreeMap::new();
        for (i, im) in spec.images.iter().enumerate() {
            let what = format!("functor.images[{i}]");
            let s = lookup(&src_index, &im.source, &what)?;
            let d = lookup(&src_index, &im.target, &what)?;
            let from = matrix(&im.from, source.dim(d), source.dim(s), &what)?;
            let to = matrix(&im.to, target.dim(object_map[d]), target.dim(object_map[s]), &what)?;
            gens.entry((s, d)).or_default().push((from, to));
        }
        CatFunctor::from_generators(source.clone(), target, object_map, &gens)?
    };
    let report = f.check_axioms();
    if !report.passed() {
        let failures: Vec<String> = report.failures().map(|c| c.to_string()).collect();
        return Err(validation(format!("functor: {}", failures.join("; "))));
    }
    Ok(f)
}
