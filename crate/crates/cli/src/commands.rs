use std::path::Path;

use cstarcat::afunctor::build_a;
use cstarcat::category::{validate, FinCStarCat, Morphism};
use cstarcat::crossed::{generator_relations_check, max_equals_reduced_check, reduced_crossed_product};
use cstarcat::group::{FiniteGroup, GAction, Subgroup};
use cstarcat::ktheory::{k0_of_category, K0Data, K1_NOTE};
use cstarcat::linalg::seeded_rng;
use cstarcat::morita::{is_morita_equivalence, verify_morita_k0_invariance};
use cstarcat::orbit::{a_crossed_iso_check, orbit_report};
use cstarcat::report::{Check, Report};
use cstarcat::samples::random_family;
use cstarcat::sums::{
    direct_sum, norm_formula_check, square_summable_bound_check, sum_comparison_unitary, verify_orthogonal_sum,
};
use cstarcat::Tolerances;
use rand::Rng;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::ingest::{self, Ingested};
use crate::output::CommandOutput;
use crate::spec::{FunctorSpec, SpecDocument};

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub seed: u64,
    pub tol: Tolerances,
}

fn output(name: &str, s: &Settings, summary: Vec<String>, data: Value, reports: Vec<Report>) -> CommandOutput {
    CommandOutput {
        command: name.into(),
        seed: s.seed,
        tolerances: s.tol,
        summary,
        data,
        reports,
    }
}

fn load(path: &Path, s: &Settings) -> Result<Ingested, CliError> {
    ingest::document(&SpecDocument::parse(path)?, s.tol)
}

fn require_action(ing: &Ingested) -> Result<&GAction, CliError> {
    ing.action
        .as_ref()
        .ok_or_else(|| CliError::Validation("this command needs a `group` section".into()))
}

pub fn k0_line(k0: &K0Data) -> String {
    format!("{k0}; {K1_NOTE}")
}

fn k0_value(k0: &K0Data) -> Value {
    json!({
        "rank": k0.rank(),
        "unit_class": k0.unit_class(),
        "block_sizes": k0.block_sizes(),
        "multiplicities": k0.wedderburn.multiplicities(),
    })
}

pub fn validate_cmd(path: &Path, s: &Settings) -> Result<CommandOutput, CliError> {
    let ing = load(path, s)?;
    let cat = &ing.category.cat;
    let mut reports = vec![validate(cat)];
    if let Some(a) = &ing.action {
        reports.push(a.validate()?);
    }
    let homs: Vec<Value> = (0..cat.len())
        .flat_map(|a| (0..cat.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| cat.hom(a, b).dim() > 0)
        .map(|(a, b)| json!({"source": cat.object(a).id, "target": cat.object(b).id, "dim": cat.hom(a, b).dim()}))
        .collect();
    let summary = vec![format!(
        "{} objects, total morphism dimension {}{}",
        cat.len(),
        cat.total_hom_dim(),
        ing.action
            .as_ref()
            .map_or(String::new(), |a| format!(", group of order {}", a.group.order()))
    )];
    let data = json!({
        "objects": cat.objects().iter().map(|o| json!({"id": o.id, "dim": o.dim})).collect::<Vec<_>>(),
        "homs": homs,
        "basis_changes": ing.category.changes,
        "group_order": ing.action.as_ref().map(|a| a.group.order()),
    });
    Ok(output("validate", s, summary, data, reports))
}

pub fn k0_cmd(path: &Path, s: &Settings) -> Result<CommandOutput, CliError> {
    let ing = load(path, s)?;
    let k0 = k0_of_category(&ing.category.cat, s.seed)?;
    Ok(output("k0", s, vec![k0_line(&k0)], json!({"k0": k0_value(&k0), "k1": 0}), vec![]))
}

fn element_index(g: &FiniteGroup, names: &[String], token: &str) -> Result<usize, CliError> {
    if let Some(k) = names.iter().position(|n| n == token) {
        return Ok(k);
    }
    if token == "e" {
        return Ok(g.identity());
    }
    token
        .parse::<usize>()
        .ok()
        .filter(|&k| k < g.order())
        .ok_or_else(|| CliError::Validation(format!("--subgroup: unknown group element `{token}`")))
}

/// Parses `0,3`, `{0,3}`, `{e}` or `G`; names from the group section are accepted.
pub fn parse_subgroup(text: &str, g: &FiniteGroup, names: &[String]) -> Result<Subgroup, CliError> {
    let t = text.trim();
    if t == "G" {
        return Ok(Subgroup::whole(g));
    }
    let inner = t.strip_prefix('{').and_then(|r| r.strip_suffix('}')).unwrap_or(t);
    let elements = inner
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| element_index(g, names, x))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Subgroup::from_elements(g, &elements)?)
}

pub fn subgroup_name(h: &Subgroup, g: &FiniteGroup) -> String {
    if h.order() == 1 {
        "e".into()
    } else if h.order() == g.order() {
        "G".into()
    } else {
        h.label()
    }
}

/// Checks for `C ⋊ H` with `H` given as the restricted action.
pub fn crossed_reports(action: &GAction, seed: u64) -> Result<(K0Data, Vec<Report>), CliError> {
    let cp = reduced_crossed_product(action)?;
    let mut dims = Report::new("dimensions");
    let lhs = build_a(&cp.cat).0.dim();
    let rhs = action.group.order() * build_a(&action.cat).0.dim();
    dims.push(Check::flag("dim A(C ⋊ H) = |H| dim A(C)", lhs == rhs).with_detail(format!("{lhs} vs {rhs}")));
    let reports = vec![
        dims,
        max_equals_reduced_check(action)?,
        generator_relations_check(&cp, 10, seed)?,
        a_crossed_iso_check(action, seed)?,
    ];
    Ok((k0_of_category(&cp.cat, seed)?, reports))
}

pub fn crossed_cmd(path: &Path, subgroup: Option<&str>, s: &Settings) -> Result<CommandOutput, CliError> {
    let doc = SpecDocument::parse(path)?;
    let ing = ingest::document(&doc, s.tol)?;
    let action = require_action(&ing)?;
    let names = doc.group.as_ref().map(|g| g.names.clone()).unwrap_or_default();
    let h = match subgroup {
        Some(t) => parse_subgroup(t, &action.group, &names)?,
        None => Subgroup::whole(&action.group),
    };
    let (restricted, _) = action.restrict(&h);
    let (k0, reports) = crossed_reports(&restricted, s.seed)?;
    let data = json!({
        "subgroup": h.elements(),
        "k0": k0_value(&k0),
        "k1": 0,
    });
    let summary = vec![
        format!("H = {} (order {})", subgroup_name(&h, &action.group), h.order()),
        k0_line(&k0),
    ];
    Ok(output("crossed", s, summary, data, reports))
}

fn matrix_text(rows: &[Vec<i64>]) -> String {
    let rows: Vec<String> = rows
        .iter()
        .map(|r| format!("[{}]", r.iter().map(i64::to_string).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

pub fn orbit_cmd(path: &Path, s: &Settings) -> Result<CommandOutput, CliError> {
    let ing = load(path, s)?;
    let action = require_action(&ing)?;
    let g = &action.group;
    let rep = orbit_report(action, s.seed)?;
    let names: Vec<String> = rep.values.iter().map(|v| format!("G/{}", subgroup_name(&v.subgroup, g))).collect();
    let mut summary: Vec<String> = rep
        .values
        .iter()
        .zip(&names)
        .map(|(v, n)| format!("{n}: Z^{}", v.k0.rank()))
        .collect();
    for m in &rep.morphisms {
        summary.push(format!(
            "{} -> {} via {:?}: {}",
            names[m.from],
            names[m.to],
            m.map.map,
            matrix_text(&m.matrix.to_rows())
        ));
    }
    let data = json!({
        "group_order": rep.group_order,
        "values": rep.values.iter().zip(&names).map(|(v, n)| json!({
            "orbit": n,
            "subgroup": v.subgroup.elements(),
            "conjugates": v.conjugates.iter().map(|c| c.elements().to_vec()).collect::<Vec<_>>(),
            "k0": k0_value(&v.k0),
        })).collect::<Vec<_>>(),
        "morphisms": rep.morphisms.iter().map(|m| json!({
            "from": names[m.from],
            "to": names[m.to],
            "map": m.map.map,
            "matrix": m.matrix.to_rows(),
        })).collect::<Vec<_>>(),
    });
    Ok(output("orbit", s, summary, data, vec![rep.checks]))
}

pub fn morita_cmd(path: &Path, functor: &Path, s: &Settings) -> Result<CommandOutput, CliError> {
    let ing = load(path, s)?;
    let f = ingest::functor(&FunctorSpec::parse(functor)?, &ing.category.cat, s.tol)?;
    let verdict = is_morita_equivalence(&f, s.seed)?;
    let report = verify_morita_k0_invariance(&f, s.seed)?;
    let src = k0_of_category(&f.source, s.seed)?;
    let tgt = k0_of_category(&f.target, s.seed)?;
    let map = cstarcat::morita::functor_k0(&f, &src, &tgt, s.seed)?;
    let summary = vec![
        format!("Morita equivalence: {}", verdict.verdict),
        format!("source {}", k0_line(&src)),
        format!("target {}", k0_line(&tgt)),
        format!("K0 map: {}", matrix_text(&map.to_rows())),
    ];
    let data = json!({
        "verdict": verdict.verdict.to_string(),
        "fully_faithful": verdict.fully_faithful,
        "image_coverage": verdict.image_coverage,
        "evidence": verdict.evidence.iter().map(|e| json!({
            "object": e.object,
            "class": e.class,
            "covered": e.covered,
            "t_min": e.t_min,
            "witness_defect": e.witness.as_ref().map(|w| w.1),
        })).collect::<Vec<_>>(),
        "source_k0": k0_value(&src),
        "target_k0": k0_value(&tgt),
        "k0_map": map.to_rows(),
    });
    Ok(output("morita", s, summary, data, vec![report]))
}

/// One random orthogonal sum in `cat` with the norm formula, the subset
/// bound and a comparison unitary between two presentations.
pub fn sums_trial<R: Rng + ?Sized>(cat: &FinCStarCat, rng: &mut R, seed: u64) -> Result<Report, CliError> {
    let n = rng.random_range(1..=4usize);
    let summands: Vec<usize> = (0..n).map(|_| rng.random_range(0..cat.len())).collect();
    let (ext, p) = direct_sum(cat, &summands)?;
    let mut report = Report::new(format!("sum of {:?}", p.summand_ids()));
    report.extend(verify_orthogonal_sum(&p, seed));

    let src = rng.random_range(0..cat.len());
    let family = random_family(&ext, src, &summands, rng);
    report.extend(norm_formula_check(&p, &family)?);

    // h_i = x_i e_i*: adjoints with orthogonal ranges
    let target = summands[0];
    let bounded: Vec<Morphism> = p
        .family
        .iter()
        .map(|(ci, e)| {
            let x = ext.random_morphism(*ci, target, rng);
            Morphism {
                src: p.sum,
                dst: target,
                matrix: &x.matrix * &e.matrix.adjoint(),
            }
        })
        .collect();
    report.extend(square_summable_bound_check(&bounded, 1e-8)?);

    let (ext2, p2) = direct_sum(&ext, &summands)?;
    let v = sum_comparison_unitary(&p, &p2)?;
    let d = ext2.dim(p2.sum);
    let id = cstarcat::ComplexMatrix::identity(d);
    let mut unitary = (&v.matrix.adjoint() * &v.matrix).dist(&id);
    unitary = unitary.max((&v.matrix * &v.matrix.adjoint()).dist(&id));
    let intertwines = p
        .family
        .iter()
        .zip(&p2.family)
        .map(|((_, e1), (_, e2))| (&v.matrix * &e1.matrix).dist(&e2.matrix))
        .fold(0.0, f64::max);
    report.push(Check::new("comparison unitary", unitary, 1e-8));
    report.push(Check::new("comparison intertwines structure maps", intertwines, 1e-8));
    Ok(report)
}

pub fn sums_cmd(path: &Path, trials: usize, s: &Settings) -> Result<CommandOutput, CliError> {
    let ing = load(path, s)?;
    let cat = &ing.category.cat;
    if cat.is_empty() {
        return Err(CliError::Validation("sums-check needs at least one object".into()));
    }
    let mut rng = seeded_rng(s.seed);
    let reports = (0..trials)
        .map(|t| {
            let mut r = sums_trial(cat, &mut rng, s.seed.wrapping_add(t as u64))?;
            r.title = format!("trial {t}: {}", r.title);
            Ok(r)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let failed = reports.iter().filter(|r| !r.passed()).count();
    let summary = vec![format!("{trials} trials, {failed} failed")];
    Ok(output("sums-check", s, summary, json!({"trials": trials, "failed": failed}), reports))
}

pub fn fmt_cmd(path: &Path) -> Result<String, CliError> {
    Ok(SpecDocument::parse(path)?.to_canonical_json())
}
