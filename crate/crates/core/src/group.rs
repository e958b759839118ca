//! Finite groups given by multiplication tables, their subgroups, finite
//! G-sets, and spatial actions on finite C*-categories.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::category::{FinCStarCat, ObjIdx};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::report::{Check, Report};

/// Default cap on the order of groups whose subgroups are enumerated.
pub const SUBGROUP_ORDER_CAP: usize = 64;

/// `table[a][b] = a b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    /// Validates associativity, identity and inverses exhaustively.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidGroup("table is not an n x n table over 0..n".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::InvalidGroup("no identity".into()))?;
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {a} has no inverse")))?;
            inverses.push(inv);
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!("not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            table,
            identity,
            inverses,
        })
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_table(table).expect("cyclic group")
    }

    /// Direct product; element `(a, b)` has index `a * |h| + b`.
    pub fn product(g: &FiniteGroup, h: &FiniteGroup) -> Self {
        let (m, n) = (g.order(), h.order());
        let table = (0..m * n)
            .map(|x| {
                (0..m * n)
                    .map(|y| g.mul(x / n, y / n) * n + h.mul(x % n, y % n))
                    .collect()
            })
            .collect();
        Self::from_table(table).expect("product group")
    }

    /// Symmetric group on `n` letters; elements are permutations in
    /// lexicographic order, composed as functions (`(a b)(i) = a(b(i))`).
    pub fn symmetric(n: usize) -> Self {
        let perms = permutations(n);
        let index = |p: &Vec<usize>| perms.iter().position(|q| q == p).unwrap();
        let table = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| index(&(0..n).map(|i| a[b[i]]).collect()))
                    .collect()
            })
            .collect();
        Self::from_table(table).expect("symmetric group")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn conjugate(&self, x: usize, a: usize) -> usize {
        self.mul(self.mul(x, a), self.inv(x))
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Conjugacy classes of elements, each sorted, ordered by smallest member.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for a in 0..n {
            if seen[a] {
                continue;
            }
            let class: BTreeSet<usize> = (0..n).map(|x| self.conjugate(x, a)).collect();
            for &c in &class {
                seen[c] = true;
            }
            out.push(class.into_iter().collect());
        }
        out
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in permutations(n - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|x| if x >= first { x + 1 } else { x }));
            out.push(p);
        }
    }
    out
}

/// A subgroup as a sorted element set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subgroup {
    elements: Vec<usize>,
}

impl Subgroup {
    pub fn from_elements(g: &FiniteGroup, elements: &[usize]) -> Result<Self> {
        let set: BTreeSet<usize> = elements.iter().copied().collect();
        if set.iter().any(|&x| x >= g.order()) {
            return Err(Error::NotASubgroup("element out of range".into()));
        }
        if !set.contains(&g.identity()) {
            return Err(Error::NotASubgroup("missing identity".into()));
        }
        for &a in &set {
            if !set.contains(&g.inv(a)) {
                return Err(Error::NotASubgroup(format!("not closed under inverse at {a}")));
            }
            for &b in &set {
                if !set.contains(&g.mul(a, b)) {
                    return Err(Error::NotASubgroup(format!("not closed under product at ({a}, {b})")));
                }
            }
        }
        Ok(Subgroup {
            elements: set.into_iter().collect(),
        })
    }

    pub fn trivial(g: &FiniteGroup) -> Self {
        Subgroup {
            elements: vec![g.identity()],
        }
    }

    pub fn whole(g: &FiniteGroup) -> Self {
        Subgroup {
            elements: (0..g.order()).collect(),
        }
    }

    /// Subgroup generated by `gens`.
    pub fn generated(g: &FiniteGroup, gens: &[usize]) -> Self {
        let mut set: BTreeSet<usize> = BTreeSet::from([g.identity()]);
        let mut frontier: Vec<usize> = vec![g.identity()];
        while let Some(x) = frontier.pop() {
            for &s in gens {
                let y = g.mul(x, s);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        Subgroup {
            elements: set.into_iter().collect(),
        }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, a: usize) -> bool {
        self.elements.binary_search(&a).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&a| other.contains(a))
    }

    /// `x H x⁻¹`.
    pub fn conjugate(&self, g: &FiniteGroup, x: usize) -> Subgroup {
        let set: BTreeSet<usize> = self.elements.iter().map(|&a| g.conjugate(x, a)).collect();
        Subgroup {
            elements: set.into_iter().collect(),
        }
    }

    /// The subgroup as a group in its own right, with the embedding into `g`
    /// (local index `i` is the element `embedding[i]`).
    pub fn as_group(&self, g: &FiniteGroup) -> (FiniteGroup, Vec<usize>) {
        let local = |a: usize| self.elements.binary_search(&a).expect("closed subgroup");
        let table = self
            .elements
            .iter()
            .map(|&a| self.elements.iter().map(|&b| local(g.mul(a, b))).collect())
            .collect();
        (
            FiniteGroup::from_table(table).expect("subgroup table"),
            self.elements.clone(),
        )
    }

    /// Short label such as `{0,3}`.
    pub fn label(&self) -> String {
        let parts: Vec<String> = self.elements.iter().map(usize::to_string).collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// All subgroups, with their conjugacy classes.
#[derive(Debug, Clone)]
pub struct SubgroupLattice {
    /// Sorted by order, then lexicographically by element set.
    pub subgroups: Vec<Subgroup>,
    /// Indices into `subgroups`; the first member of each class is its
    /// lexicographically smallest element set.
    pub classes: Vec<Vec<usize>>,
}

impl SubgroupLattice {
    pub fn representatives(&self) -> Vec<&Subgroup> {
        self.classes.iter().map(|c| &self.subgroups[c[0]]).collect()
    }
}

pub fn subgroups(g: &FiniteGroup) -> Result<SubgroupLattice> {
    subgroups_with_cap(g, SUBGROUP_ORDER_CAP)
}

pub fn subgroups_with_cap(g: &FiniteGroup, cap: usize) -> Result<SubgroupLattice> {
    if g.order() > cap {
        return Err(Error::GroupTooLarge { order: g.order(), cap });
    }
    let mut found: BTreeSet<Subgroup> = BTreeSet::from([Subgroup::trivial(g)]);
    let mut frontier = vec![Subgroup::trivial(g)];
    while let Some(h) = frontier.pop() {
        for x in 0..g.order() {
            if h.contains(x) {
                continue;
            }
            let mut gens = h.elements.clone();
            gens.push(x);
            let k = Subgroup::generated(g, &gens);
            if found.insert(k.clone()) {
                frontier.push(k);
            }
        }
    }
    let mut subgroups: Vec<Subgroup> = found.into_iter().collect();
    subgroups.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elements.cmp(&b.elements)));
    let mut class_of = vec![usize::MAX; subgroups.len()];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..subgroups.len() {
        if class_of[i] != usize::MAX {
            continue;
        }
        let conj: BTreeSet<Subgroup> = (0..g.order()).map(|x| subgroups[i].conjugate(g, x)).collect();
        let mut members: Vec<usize> = conj
            .iter()
            .map(|s| subgroups.iter().position(|t| t == s).expect("conjugate is a subgroup"))
            .collect();
        members.sort_unstable();
        for &m in &members {
            class_of[m] = classes.len();
        }
        classes.push(members);
    }
    Ok(SubgroupLattice { subgroups, classes })
}

/// A finite G-set: `action[g][x] = g x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGSet {
    pub points: Vec<String>,
    pub action: Vec<Vec<usize>>,
}

impl FiniteGSet {
    pub fn new(g: &FiniteGroup, points: Vec<String>, action: Vec<Vec<usize>>) -> Result<Self> {
        let s = FiniteGSet { points, action };
        s.validate(g)?;
        Ok(s)
    }

    /// Checks that the action is a homomorphism into permutations.
    pub fn validate(&self, g: &FiniteGroup) -> Result<()> {
        let n = self.points.len();
        if self.action.len() != g.order() {
            return Err(Error::InvalidAction("one permutation per group element required".into()));
        }
        for p in &self.action {
            let set: BTreeSet<usize> = p.iter().copied().collect();
            if p.len() != n || set.len() != n || set.iter().any(|&x| x >= n) {
                return Err(Error::InvalidAction("action entry is not a permutation".into()));
            }
        }
        if (0..n).any(|x| self.action[g.identity()][x] != x) {
            return Err(Error::InvalidAction("identity does not act trivially".into()));
        }
        for a in 0..g.order() {
            for b in 0..g.order() {
                for x in 0..n {
                    if self.action[g.mul(a, b)][x] != self.action[a][self.action[b][x]] {
                        return Err(Error::InvalidAction(format!("not a homomorphism at ({a}, {b})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point() -> impl Fn(&FiniteGroup) -> FiniteGSet {
        |g| FiniteGSet {
            points: vec!["*".into()],
            action: vec![vec![0]; g.order()],
        }
    }
}

/// The orbit `G/H` of left cosets; the base point `eH` has index 0.
#[derive(Debug, Clone)]
pub struct CosetSpace {
    pub subgroup: Subgroup,
    /// Sorted cosets, `eH` first.
    pub cosets: Vec<Vec<usize>>,
    pub gset: FiniteGSet,
}

impl CosetSpace {
    pub fn new(g: &FiniteGroup, h: &Subgroup) -> Self {
        let mut cosets: Vec<Vec<usize>> = Vec::new();
        for x in 0..g.order() {
            let mut c: Vec<usize> = h.elements().iter().map(|&a| g.mul(x, a)).collect();
            c.sort_unstable();
            if !cosets.contains(&c) {
                cosets.push(c);
            }
        }
        cosets.sort_by_key(|c| (!c.contains(&g.identity()), c.clone()));
        let find = |y: usize| cosets.iter().position(|c| c.contains(&y)).unwrap();
        let action = (0..g.order())
            .map(|a| cosets.iter().map(|c| find(g.mul(a, c[0]))).collect())
            .collect();
        let points = cosets.iter().map(|c| format!("{}H", c[0])).collect();
        CosetSpace {
            subgroup: h.clone(),
            cosets: cosets.clone(),
            gset: FiniteGSet { points, action },
        }
    }

    /// Index of the coset containing `x`.
    pub fn coset_of(&self, x: usize) -> usize {
        self.cosets.iter().position(|c| c.contains(&x)).expect("coset")
    }

    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }
}

/// An equivariant map of G-sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GSetMap {
    pub map: Vec<usize>,
}

impl GSetMap {
    pub fn new(g: &FiniteGroup, source: &FiniteGSet, target: &FiniteGSet, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.len() || map.iter().any(|&y| y >= target.len()) {
            return Err(Error::NotEquivariant);
        }
        for a in 0..g.order() {
            for x in 0..source.len() {
                if map[source.action[a][x]] != target.action[a][map[x]] {
                    return Err(Error::NotEquivariant);
                }
            }
        }
        Ok(GSetMap { map })
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &GSetMap) -> GSetMap {
        GSetMap {
            map: self.map.iter().map(|&y| other.map[y]).collect(),
        }
    }
}

/// All G-maps `G/H -> G/K`: `xH ↦ x a K` for `a` with `a⁻¹ H a ⊆ K`.
pub fn orbit_maps(g: &FiniteGroup, from: &CosetSpace, to: &CosetSpace) -> Vec<GSetMap> {
    let mut out: Vec<GSetMap> = Vec::new();
    for a in 0..g.order() {
        if !from.subgroup.conjugate(g, g.inv(a)).is_subset_of(&to.subgroup) {
            continue;
        }
        let map = from.cosets.iter().map(|c| to.coset_of(g.mul(c[0], a))).collect();
        let m = GSetMap::new(g, &from.gset, &to.gset, map).expect("coset maps are equivariant");
        if !out.contains(&m) {
            out.push(m);
        }
    }
    out
}

/// A strict spatial action: `g` sends object `C` to `perm[g][C]` and acts on
/// morphisms by `f ↦ V_{g,C'} f V_{g,C}*` with unitary intertwiners
/// `V_{g,C}: H_C -> H_{gC}`.
#[derive(Debug, Clone)]
pub struct GAction {
    pub group: Arc<FiniteGroup>,
    pub cat: Arc<FinCStarCat>,
    pub perm: Vec<Vec<ObjIdx>>,
    pub intertwiners: Vec<Vec<ComplexMatrix>>,
}

impl GAction {
    pub fn new(
        group: Arc<FiniteGroup>,
        cat: Arc<FinCStarCat>,
        perm: Vec<Vec<ObjIdx>>,
        intertwiners: Vec<Vec<ComplexMatrix>>,
    ) -> Result<Self> {
        let a = GAction {
            group,
            cat,
            perm,
            intertwiners,
        };
        let report = a.validate()?;
        if !report.passed() {
            let names: Vec<String> = report.failures().map(|c| c.to_string()).collect();
            return Err(Error::InvalidAction(names.join("; ")));
        }
        Ok(a)
    }

    pub fn trivial(group: Arc<FiniteGroup>, cat: Arc<FinCStarCat>) -> Self {
        let n = group.order();
        let perm = vec![(0..cat.len()).collect(); n];
        let intertwiners = vec![(0..cat.len()).map(|k| ComplexMatrix::identity(cat.dim(k))).collect(); n];
        GAction {
            group,
            cat,
            perm,
            intertwiners,
        }
    }

    /// Object permutation action with identity intertwiners.
    pub fn permutation(group: Arc<FiniteGroup>, cat: Arc<FinCStarCat>, perm: Vec<Vec<ObjIdx>>) -> Result<Self> {
        let intertwiners = perm
            .iter()
            .map(|p| {
                (0..cat.len())
                    .map(|k| {
                        if p.get(k).is_some_and(|&t| t < cat.len() && cat.dim(t) == cat.dim(k)) {
                            Ok(ComplexMatrix::identity(cat.dim(k)))
                        } else {
                            Err(Error::InvalidAction("permutation changes Hilbert dimension".into()))
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(group, cat, perm, intertwiners)
    }

    pub fn act_object(&self, g: usize, k: ObjIdx) -> ObjIdx {
        self.perm[g][k]
    }

    /// `g(f) = V_{g,d} f V_{g,s}*` for `f: s -> d`.
    pub fn act(&self, g: usize, s: ObjIdx, d: ObjIdx, f: &ComplexMatrix) -> ComplexMatrix {
        &(&self.intertwiners[g][d] * f) * &self.intertwiners[g][s].adjoint()
    }

    /// Structural checks raise errors; numerical axioms are reported.
    pub fn validate(&self) -> Result<Report> {
        let g = &self.group;
        let cat = &self.cat;
        let n = cat.len();
        if self.perm.len() != g.order() || self.intertwiners.len() != g.order() {
            return Err(Error::InvalidAction("one entry per group element required".into()));
        }
        for (a, p) in self.perm.iter().enumerate() {
            let set: BTreeSet<usize> = p.iter().copied().collect();
            if p.len() != n || set.len() != n || set.iter().any(|&x| x >= n) {
                return Err(Error::InvalidAction(format!("object map of element {a} is not a bijection")));
            }
            if self.intertwiners[a].len() != n {
                return Err(Error::InvalidAction(format!("element {a} needs one intertwiner per object")));
            }
            for k in 0..n {
                let expected = (cat.dim(p[k]), cat.dim(k));
                if self.intertwiners[a][k].shape() != expected {
                    return Err(Error::InvalidAction(format!(
                        "intertwiner ({a}, {}) has shape {:?}, expected {expected:?}",
                        cat.object(k).id,
                        self.intertwiners[a][k].shape()
                    )));
                }
            }
        }
        for a in 0..g.order() {
            for b in 0..g.order() {
                for k in 0..n {
                    if self.perm[g.mul(a, b)][k] != self.perm[a][self.perm[b][k]] {
                        return Err(Error::InvalidAction(format!("object action not a homomorphism at ({a}, {b})")));
                    }
                }
            }
        }
        let tol = cat.tol();
        let rel = |x: &ComplexMatrix, y: &ComplexMatrix| (x - y).hs_norm() / (1.0 + y.hs_norm());
        let mut report = Report::new("group action");
        let mut unitary = 0.0f64;
        let mut unit = 0.0f64;
        for a in 0..g.order() {
            for k in 0..n {
                let v = &self.intertwiners[a][k];
                unitary = unitary.max(rel(&(&v.adjoint() * v), &ComplexMatrix::identity(v.cols())));
                unitary = unitary.max(rel(&(v * &v.adjoint()), &ComplexMatrix::identity(v.rows())));
            }
        }
        for k in 0..n {
            unit = unit.max(rel(&self.intertwiners[g.identity()][k], &ComplexMatrix::identity(cat.dim(k))));
        }
        report.push(Check::new("intertwiners unitary", unitary, tol.mem));
        report.push(Check::new("identity acts trivially", unit, tol.mem));
        let mut cocycle = 0.0f64;
        for a in 0..g.order() {
            for b in 0..g.order() {
                for k in 0..n {
                    let lhs = &self.intertwiners[g.mul(a, b)][k];
                    let rhs = &self.intertwiners[a][self.perm[b][k]] * &self.intertwiners[b][k];
                    cocycle = cocycle.max(rel(lhs, &rhs));
                }
            }
        }
        report.push(Check::new("cocycle", cocycle, tol.mem));
        let mut preserve = 0.0f64;
        let mut detail = String::new();
        for a in 0..g.order() {
            for s in 0..n {
                for d in 0..n {
                    let target = cat.hom(self.perm[a][s], self.perm[a][d]);
                    for f in cat.hom(s, d).basis() {
                        let img = self.act(a, s, d, f);
                        let r = target.residual(&img)? / (1.0 + img.hs_norm());
                        if r > preserve {
                            preserve = r;
                            detail = format!("element {a} on ({} -> {})", cat.object(s).id, cat.object(d).id);
                        }
                    }
                }
            }
        }
        report.push(Check::new("morphism spaces preserved", preserve, tol.mem).with_detail(detail));
        Ok(report)
    }

    /// Restriction to a subgroup, acting through the subgroup's own group
    /// structure; returns the embedding of local indices.
    pub fn restrict(&self, h: &Subgroup) -> (GAction, Vec<usize>) {
        let (hg, emb) = h.as_group(&self.group);
        let perm = emb.iter().map(|&a| self.perm[a].clone()).collect();
        let intertwiners = emb.iter().map(|&a| self.intertwiners[a].clone()).collect();
        (
            GAction {
                group: Arc::new(hg),
                cat: self.cat.clone(),
                perm,
                intertwiners,
            },
            emb,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::ObjectInfo;
    use crate::linalg::{Tolerances, C64};

    #[test]
    fn rejects_bad_tables() {
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(FiniteGroup::from_table(vec![vec![0, 2]]).is_err());
        // a loop that is not associative: a Latin square with identity 0
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(FiniteGroup::from_table(t), Err(Error::InvalidGroup(_))));
    }

    #[test]
    fn standard_groups() {
        assert_eq!(FiniteGroup::symmetric(3).order(), 6);
        assert!(!FiniteGroup::symmetric(3).is_abelian());
        let k4 = FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
        assert!(k4.is_abelian());
        assert!((0..4).all(|a| k4.mul(a, a) == 0));
        assert_eq!(FiniteGroup::symmetric(3).conjugacy_classes().len(), 3);
    }

    #[test]
    fn subgroup_counts() {
        let l = subgroups(&FiniteGroup::cyclic(2)).unwrap();
        assert_eq!(l.subgroups.len(), 2);
        let l = subgroups(&FiniteGroup::cyclic(4)).unwrap();
        let orders: Vec<usize> = l.subgroups.iter().map(Subgroup::order).collect();
        assert_eq!(orders, vec![1, 2, 4]);
        let s3 = FiniteGroup::symmetric(3);
        let l = subgroups(&s3).unwrap();
        assert_eq!((l.subgroups.len(), l.classes.len()), (6, 4));
        assert!(matches!(
            subgroups_with_cap(&FiniteGroup::cyclic(70), 64),
            Err(Error::GroupTooLarge { .. })
        ));
    }

    #[test]
    fn subgroup_enumeration_matches_brute_force() {
        // every subset closed under multiplication is a subgroup in a finite group
        for g in [FiniteGroup::symmetric(3), FiniteGroup::cyclic(6), FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2))] {
            let n = g.order();
            let mut brute = 0;
            for mask in 1u32..(1 << n) {
                let s: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
                if s.iter().all(|&a| s.iter().all(|&b| s.contains(&g.mul(a, b)))) {
                    brute += 1;
                }
            }
            assert_eq!(subgroups(&g).unwrap().subgroups.len(), brute);
        }
    }

    #[test]
    fn cosets_and_maps() {
        let s3 = FiniteGroup::symmetric(3);
        let l = subgroups(&s3).unwrap();
        let c3 = l.subgroups.iter().find(|h| h.order() == 3).unwrap();
        let x = CosetSpace::new(&s3, c3);
        assert_eq!(x.len(), 2);
        assert!(x.cosets[0].contains(&s3.identity()));
        x.gset.validate(&s3).unwrap();
        let triv = CosetSpace::new(&s3, &Subgroup::trivial(&s3));
        assert_eq!(orbit_maps(&s3, &triv, &x).len(), 2);
        assert_eq!(orbit_maps(&s3, &triv, &triv).len(), 6);
        assert!(orbit_maps(&s3, &x, &triv).is_empty());
        assert!(GSetMap::new(&s3, &x.gset, &x.gset, vec![0, 0]).is_err());
    }

    #[test]
    fn actions_validate() {
        let tol = Tolerances::default();
        let cat = Arc::new(
            FinCStarCat::generated(
                vec![ObjectInfo { id: "a".into(), dim: 1 }, ObjectInfo { id: "b".into(), dim: 1 }],
                &[],
                tol,
            )
            .unwrap(),
        );
        let z2 = Arc::new(FiniteGroup::cyclic(2));
        let swap = GAction::permutation(z2.clone(), cat.clone(), vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(swap.validate().unwrap().passed());
        // a non-cocycle: V_1 = -1 on both objects violates V_{1·1} = V_1 V_1
        let neg = vec![vec![ComplexMatrix::identity(1); 2], vec![ComplexMatrix::diag(&[C64::new(0.0, 1.0)]); 2]];
        let err = GAction::new(z2.clone(), cat.clone(), vec![vec![0, 1], vec![0, 1]], neg).unwrap_err();
        assert!(matches!(err, Error::InvalidAction(ref m) if m.contains("cocycle")));
        let bad = GAction::new(z2, cat, vec![vec![0, 1], vec![0, 0]], vec![vec![ComplexMatrix::identity(1); 2]; 2]);
        assert!(bad.is_err());
    }
}
