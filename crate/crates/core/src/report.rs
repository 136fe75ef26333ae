//! Deterministic text reports, rendered either for reading (`human`) or as
//! sorted `key=value` lines (`kv`).
//!
//! The whole acting group is written `W` in report text, e.g. `H1(W) = (2,2)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::cohomology::CohomologyProfile;
use crate::groups::Subgroup;
use crate::lattices::GLattice;
use crate::resolutions::{
    FlasqueResolution, HTrivialCheck, ObstructionReport, SearchOutcome, SimilarityVerdict, StableSearchBounds, Verdict,
};
use crate::zlinalg::FiniteAbelianGroup;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Kv,
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Default)]
pub struct Section {
    pub name: String,
    pub fields: Vec<(String, String)>,
    pub table: Option<Table>,
    /// Fields emitted in `kv` output only.
    pub kv_fields: Vec<(String, String)>,
    /// Free-text lines, shown in human output only.
    pub notes: Vec<String>,
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Section {
            name: name.into(),
            ..Section::default()
        }
    }

    pub fn field(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.fields.push((key.into(), value.to_string()));
        self
    }

    pub fn kv_field(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.kv_fields.push((key.into(), value.to_string()));
        self
    }

    pub fn note(mut self, line: impl Into<String>) -> Self {
        self.notes.push(line.into());
        self
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub sections: Vec<Section>,
}

impl Report {
    pub fn push(&mut self, s: Section) {
        self.sections.push(s);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Human => self.render_human(),
            Format::Kv => self.render_kv(),
        }
    }

    fn render_human(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "[{}]", s.name);
            for (k, v) in &s.fields {
                let _ = writeln!(out, "{k}: {v}");
            }
            if let Some(t) = &s.table {
                let mut widths: Vec<usize> = t.columns.iter().map(|c| c.chars().count()).collect();
                for row in &t.rows {
                    for (w, cell) in widths.iter_mut().zip(row) {
                        *w = (*w).max(cell.chars().count());
                    }
                }
                let line = |cells: &[String]| {
                    let padded: Vec<String> = cells
                        .iter()
                        .zip(&widths)
                        .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                        .collect();
                    padded.join("  ").trim_end().to_string()
                };
                let _ = writeln!(out, "{}", line(&t.columns));
                for row in &t.rows {
                    let _ = writeln!(out, "{}", line(row));
                }
            }
            for n in &s.notes {
                let _ = writeln!(out, "{n}");
            }
        }
        out
    }

    fn render_kv(&self) -> String {
        let mut map = BTreeMap::new();
        for s in &self.sections {
            for (k, v) in s.fields.iter().chain(&s.kv_fields) {
                map.insert(format!("{}.{k}", s.name), v.clone());
            }
            if let Some(t) = &s.table {
                map.insert(format!("{}.rows", s.name), t.rows.len().to_string());
                for (i, row) in t.rows.iter().enumerate() {
                    for (c, cell) in t.columns.iter().zip(row) {
                        map.insert(format!("{}.{i:03}.{}", s.name, kv_key(c)), cell.clone());
                    }
                }
            }
        }
        map.into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

fn kv_key(column: &str) -> String {
    column
        .chars()
        .filter_map(|c| match c {
            'a'..='z' | '0'..='9' | '_' => Some(c),
            'A'..='Z' => Some(c.to_ascii_lowercase()),
            '°' => Some('d'),
            ' ' | '-' => Some('_'),
            _ => None,
        })
        .collect()
}

pub fn subgroup_label(u: &Subgroup) -> String {
    if u.is_trivial() {
        "1".into()
    } else {
        u.label()
    }
}

pub fn lattice_section(n: &GLattice) -> Section {
    let g = n.group();
    Section::new("lattice")
        .field("name", n.name())
        .field("rank", n.rank())
        .field("group_order", g.order())
        .field("group_degree", g.degree())
        .field("generators", g.generator_names().join(","))
        .field("basis", n.labels().join(","))
}

/// Section `lattice` plus generator matrices and the images of the basis.
pub fn show(n: &GLattice) -> Report {
    let mut r = Report::default();
    r.push(lattice_section(n));
    let g = n.group();
    let mut act = Section::new("action");
    for ((name, m), a) in g.generators().iter().zip(n.generator_action()) {
        act = act.field(format!("{name}.group_matrix"), m).field(format!("{name}.matrix"), &a);
        for j in 0..n.rank() {
            act = act.field(
                format!("{name}({})", n.labels()[j]),
                n.render_vector(&a.column(j)),
            );
        }
    }
    r.push(act);
    r
}

/// One row per subgroup of `profile`; `dual` optionally adds the H1(N°) column.
pub fn profile_section(profile: &CohomologyProfile, dual: Option<&CohomologyProfile>, indices: &[usize]) -> Section {
    let mut columns = vec!["index".to_string(), "subgroup".into(), "order".into(), "H1(N)".into()];
    if dual.is_some() {
        columns.push("H1(N°)".into());
    }
    let rows = indices
        .iter()
        .map(|&i| {
            let u = &profile.subgroups[i];
            let mut row = vec![i.to_string(), subgroup_label(u), u.order().to_string(), profile.entries[i].to_string()];
            if let Some(d) = dual {
                row.push(d.entries[i].to_string());
            }
            row
        })
        .collect();
    let mut s = Section::new("profile");
    s.table = Some(Table { columns, rows });
    let last = profile.entries.len() - 1;
    if indices.contains(&last) {
        s = s.kv_field("h1_whole", profile.whole()).note(format!("H1(W) = {}", profile.whole()));
        if let Some(d) = dual {
            s = s.kv_field("h1_dual_whole", d.whole()).note(format!("H1(W, N°) = {}", d.whole()));
        }
    }
    s
}

pub fn cohomology(n: &GLattice, profile: &CohomologyProfile, dual: Option<&CohomologyProfile>, indices: &[usize]) -> Report {
    let mut r = Report::default();
    r.push(lattice_section(n));
    r.push(profile_section(profile, dual, indices));
    r
}

fn bounds_fields(mut s: Section, b: &StableSearchBounds) -> Section {
    s = s
        .field("rank_bound", b.rank_bound)
        .field("coeff_bound", b.limits.coeff_bound)
        .field("max_pairs", b.max_pairs)
        .field("max_candidates", b.limits.max_candidates)
        .field("max_morphism_dim", b.limits.max_morphism_dim)
        .field("max_unknowns", b.limits.max_unknowns);
    s
}

fn search_section(outcome: Option<&SearchOutcome>, bounds: &StableSearchBounds) -> Section {
    let s = bounds_fields(Section::new("search"), bounds);
    match outcome {
        None => s.field("outcome", "skipped").note("search skipped: the verdict is already a certificate"),
        Some(SearchOutcome::Proven { p, q, witness }) => s
            .field("outcome", "Proven")
            .field("p", if p.is_empty() { "0".into() } else { p.join(" + ") })
            .field("q", if q.is_empty() { "0".into() } else { q.join(" + ") })
            .field("witness", witness),
        Some(SearchOutcome::Unknown { pairs_tried, reason }) => s
            .field("outcome", "Unknown")
            .field("pairs_tried", pairs_tried)
            .field("reason", reason)
            .note("Unknown: no isomorphism n + P = Q was found within the bounds above"),
    }
}

pub fn obstruction(n: &GLattice, rep: &ObstructionReport) -> Report {
    let mut r = Report::default();
    r.push(lattice_section(n));
    let all: Vec<usize> = (0..rep.profile_n.entries.len()).collect();
    r.push(profile_section(&rep.profile_n, Some(&rep.profile_dual), &all));
    let v = Section::new("verdict");
    let v = match &rep.verdict {
        Verdict::NotStablyPermutation {
            witness,
            side,
            obstruction,
        } => v
            .field("verdict", "NotStablyPermutation")
            .field("witness", subgroup_label(witness))
            .field("witness_order", witness.order())
            .field("side", side)
            .field("obstruction", obstruction)
            .note(format!(
                "certificate: H1({}, {side}) = {obstruction} is nonzero, so the lattice is not stably permutation",
                subgroup_label(witness)
            )),
        Verdict::ConsistentWithStablyPermutation => v
            .field("verdict", "ConsistentWithStablyPermutation")
            .note("all H1 entries of N and N° vanish; this is consistent with, but NOT a proof of, being stably permutation"),
    };
    r.push(v);
    r.push(search_section(rep.search.as_ref(), &rep.bounds));
    r
}

pub fn resolution(res: &FlasqueResolution) -> Report {
    let mut r = Report::default();
    r.push(lattice_section(&res.m));
    r.push(
        Section::new("resolution")
            .field("rank_m", res.m.rank())
            .field("rank_s", res.s.rank())
            .field("rank_f", res.f.rank())
            .field("s", res.s.name())
            .field("f", res.f.name())
            .field("inject", &res.inject)
            .field("project", &res.project)
            .field("exact", "verified")
            .note("0 -> M -> S -> F -> 0 is exact, S is permutation and F is flasque (all re-verified)"),
    );
    r
}

pub fn check(n: &GLattice, property: &str, holds: bool, witness: Option<(&Subgroup, &FiniteAbelianGroup)>) -> Report {
    let mut r = Report::default();
    r.push(lattice_section(n));
    let mut s = Section::new("check").field("property", property).field("holds", holds);
    if let Some((u, h)) = witness {
        s = s
            .field("witness", subgroup_label(u))
            .field("witness_order", u.order())
            .field("h1", h);
    }
    r.push(s);
    r
}

pub fn h_trivial_check(n: &GLattice, property: &str, c: &HTrivialCheck) -> Report {
    check(n, property, c.holds(), c.witness.as_ref().map(|(u, h)| (u, h)))
}

pub fn similarity(a: &GLattice, b: &GLattice, v: &SimilarityVerdict, bounds: &StableSearchBounds) -> Report {
    let mut r = Report::default();
    let mut la = lattice_section(a);
    la.name = "lattice_a".into();
    let mut lb = lattice_section(b);
    lb.name = "lattice_b".into();
    r.push(la);
    r.push(lb);
    let s = Section::new("verdict");
    let s = match v {
        SimilarityVerdict::Similar { p, q, witness } => s
            .field("verdict", "Similar")
            .field("p", if p.is_empty() { "0".into() } else { p.join(" + ") })
            .field("q", if q.is_empty() { "0".into() } else { q.join(" + ") })
            .field("witness", witness),
        SimilarityVerdict::NotSimilar {
            subgroup,
            side,
            left,
            right,
        } => s
            .field("verdict", "NotSimilar")
            .field("subgroup", subgroup_label(subgroup))
            .field("side", side)
            .field("left", left)
            .field("right", right)
            .field("left_order", left.order().map_or("infinite".into(), |o| o.to_string()))
            .field("right_order", right.order().map_or("infinite".into(), |o| o.to_string())),
        SimilarityVerdict::Unknown { pairs_tried, reason } => s
            .field("verdict", "Unknown")
            .field("pairs_tried", pairs_tried)
            .field("reason", reason),
    };
    r.push(s);
    r.push(bounds_fields(Section::new("search"), bounds));
    r
}
