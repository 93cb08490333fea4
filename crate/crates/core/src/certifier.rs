//! The certifier: evaluate every hypothesis of the hardness criterion on a
//! template and emit a machine-readable certificate.
//!
//! Hypotheses are checked independently so a failure in one never hides
//! the state of another; each failing hypothesis carries a concrete
//! witness. The verdict is NP-HARD exactly when every hypothesis passes.
//! Certificates serialize deterministically: certifying the same input
//! with the same caps twice yields byte-identical JSON.

use serde::Serialize;
use serde_json::{json, Value};

use crate::complexes::{
    build_complex, build_spanning_tree, check_polymorphism_stable, max_pairwise_face_overlap,
    Complex, FaceMode, SpanningTree,
};
use crate::corpus;
use crate::groups::{free_basis, rho, FreeBasis};
use crate::mu::{
    build_mu_cycle, check_commutation, check_faces_preserved, check_fixed_point_free,
    cyclic_shift_mu, is_mu_connected, traversal_imbalance, CommutationSampleSpec, MuAction,
    MuProvenance,
};
use crate::polymorphisms::{
    analyze_xi_structure, check_minor_preservation, enumerate_polymorphisms, XiContext,
};
use crate::structures::{
    eval_pp_formula, find_homomorphism, parse_pp_formula, parse_structure, similar, PpFormula,
    Relation, RelationalStructure, Tuple,
};

pub const SCHEMA_VERSION: &str = "1";

/// Resource budgets. Every cap is recorded in the certificate so a replay
/// can reproduce the exact run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Caps {
    /// Assignment budget for pp-formula evaluation.
    pub pp_budget: u64,
    /// Bound on r! * |R|^2 when building the box tolerance.
    pub box_cost: u64,
    /// Domain and relation size bound for direct powers.
    pub power: u64,
    /// Highest polymorphism arity for the commutation check.
    pub commutation_max_arity: usize,
    /// Enumeration cutoff per arity for the commutation check.
    pub commutation_enum_limit: usize,
    /// Highest polymorphism arity for the xi structure check.
    pub xi_max_arity: usize,
    /// Enumeration cutoff per arity for the xi structure check.
    pub xi_enum_limit: usize,
    /// Highest arity for the face stability check with custom faces.
    pub stability_max_arity: usize,
    /// Enumeration cutoff for unary maps in the nondegeneracy check.
    pub unary_enum_limit: usize,
    /// Worker count. Recorded for reproducibility; evaluation is
    /// sequential, so this never changes results.
    pub threads: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            pp_budget: 10_000_000,
            box_cost: 100_000_000,
            power: 1_000_000,
            commutation_max_arity: 2,
            commutation_enum_limit: 2000,
            xi_max_arity: 2,
            xi_enum_limit: 200,
            stability_max_arity: 2,
            unary_enum_limit: 10_000,
            threads: 1,
        }
    }
}

/// How the symmetry is specified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MuSpec {
    /// Rotate tuple coordinates on both sides.
    CyclicShift,
    /// Explicit tuple maps, one per side; each must cover every vertex of
    /// its complex.
    Custom { a_map: Vec<(Tuple, Tuple)>, b_map: Vec<(Tuple, Tuple)> },
}

impl MuSpec {
    fn descriptor(&self) -> &'static str {
        match self {
            MuSpec::CyclicShift => "cyclic-shift",
            MuSpec::Custom { .. } => "custom",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TemplateInput {
    pub a: RelationalStructure,
    pub b: RelationalStructure,
    pub phi: PpFormula,
    pub faces_a: FaceMode,
    pub faces_b: FaceMode,
    pub mu: MuSpec,
}

impl TemplateInput {
    pub fn boxed(
        a: RelationalStructure,
        b: RelationalStructure,
        phi: PpFormula,
    ) -> TemplateInput {
        TemplateInput { a, b, phi, faces_a: FaceMode::Box, faces_b: FaceMode::Box, mu: MuSpec::CyclicShift }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub status: Status,
    pub detail: String,
    pub witness: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "NP-HARD")]
    NpHard,
    #[serde(rename = "NOT-CERTIFIED")]
    NotCertified,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::NpHard => "NP-HARD",
            Verdict::NotCertified => "NOT-CERTIFIED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TemplateRecord {
    pub a_name: String,
    pub a_domain: Vec<String>,
    pub b_name: String,
    pub b_domain: Vec<String>,
    pub pp: String,
    pub faces: String,
    pub mu: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FreeGroupRecord {
    pub vertices: usize,
    pub faces: usize,
    pub edges: usize,
    pub tree_edges: usize,
    pub rank: usize,
    /// Basis edges as labeled endpoint pairs.
    pub basis_edges: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImbalanceRecord {
    pub u: String,
    pub v: String,
    pub forward: usize,
    pub backward: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MuCycleRecord {
    pub anchor: String,
    pub order: usize,
    pub length: usize,
    pub vertices: Vec<String>,
    /// Reduced class of the cycle in its own complex, when that complex
    /// admits the free reduction (pairwise face overlap at most one).
    pub source_word: Option<String>,
    pub imbalance: Option<ImbalanceRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnaryWordRecord {
    /// The unary map, one "x->y" entry per source element.
    pub map: Vec<String>,
    pub word: String,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NondegeneracyRecord {
    pub unary_count: usize,
    pub exhaustive: bool,
    pub min_word_length: usize,
    pub words: Vec<UnaryWordRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub schema_version: &'static str,
    pub tool_version: &'static str,
    pub template: TemplateRecord,
    pub caps: Caps,
    pub hypotheses: Vec<Hypothesis>,
    pub free_group: Option<FreeGroupRecord>,
    pub mu_cycle: Option<MuCycleRecord>,
    pub nondegeneracy: Option<NondegeneracyRecord>,
    pub verdict: Verdict,
    pub failing: Vec<String>,
}

impl Certificate {
    pub fn hypothesis(&self, name: &str) -> Option<&Hypothesis> {
        self.hypotheses.iter().find(|h| h.name == name)
    }
}

/// Serialize a certificate as pretty JSON with a trailing newline. The
/// encoding is deterministic for a fixed certificate value.
pub fn certificate_json(cert: &Certificate) -> String {
    let mut s = serde_json::to_string_pretty(cert).expect("certificates always serialize");
    s.push('\n');
    s
}

/// Re-run the pipeline and compare byte-for-byte with a prior certificate.
pub fn verify_certificate(input: &TemplateInput, caps: &Caps, prior: &Certificate) -> bool {
    certificate_json(&certify(input, caps)) == certificate_json(prior)
}

fn fmt_tuple(domain: &[String], t: &[usize]) -> String {
    let labels: Vec<&str> = t.iter().map(|&i| domain[i].as_str()).collect();
    format!("({})", labels.join(","))
}

fn hyp(name: &str, status: Status, detail: impl Into<String>, witness: Value) -> Hypothesis {
    Hypothesis { name: name.to_string(), status, detail: detail.into(), witness }
}

fn skipped(name: &str, dep: &str) -> Hypothesis {
    hyp(name, Status::Skipped, format!("not evaluated: {dep} did not pass"), Value::Null)
}

fn component_count(h: &Complex) -> usize {
    let n = h.vertex_count();
    let mut seen = vec![false; n];
    let mut count = 0usize;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &h.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    count
}

fn resolve_custom_perm(
    h: &Complex,
    map: &[(Tuple, Tuple)],
    side: &str,
) -> Result<Vec<usize>, String> {
    let n = h.vertex_count();
    let mut perm: Vec<Option<usize>> = vec![None; n];
    for (from, to) in map {
        let Some(f) = h.vertex_id(from) else {
            return Err(format!("{side}: {from:?} is not a vertex"));
        };
        let Some(t) = h.vertex_id(to) else {
            return Err(format!("{side}: image {to:?} is not a vertex"));
        };
        if perm[f].is_some() {
            return Err(format!("{side}: vertex {from:?} mapped twice"));
        }
        perm[f] = Some(t);
    }
    perm.into_iter()
        .enumerate()
        .map(|(v, p)| p.ok_or_else(|| format!("{side}: vertex {v} has no image")))
        .collect()
}

/// Run the full pipeline. Never panics on template defects: every failure
/// mode lands in a hypothesis.
pub fn certify(input: &TemplateInput, caps: &Caps) -> Certificate {
    let a = &input.a;
    let b = &input.b;
    let mut hyps: Vec<Hypothesis> = Vec::new();
    let mut free_group: Option<FreeGroupRecord> = None;
    let mut mu_cycle_record: Option<MuCycleRecord> = None;
    let mut nondeg_record: Option<NondegeneracyRecord> = None;

    // similarity
    let signature = |s: &RelationalStructure| -> Vec<Value> {
        s.relations.iter().map(|r| json!({"name": r.name, "arity": r.arity})).collect()
    };
    let sim = similar(a, b);
    hyps.push(hyp(
        "similarity",
        if sim { Status::Pass } else { Status::Fail },
        if sim {
            format!("matching signatures with {} relation(s)", a.relations.len())
        } else {
            "relation names or arities differ".to_string()
        },
        json!({"a": signature(a), "b": signature(b)}),
    ));

    // template_witness
    if sim {
        match find_homomorphism(a, b) {
            Ok(Some(h)) => {
                let map: Vec<String> = h
                    .map
                    .iter()
                    .enumerate()
                    .map(|(x, &y)| format!("{}->{}", a.domain[x], b.domain[y]))
                    .collect();
                hyps.push(hyp(
                    "template_witness",
                    Status::Pass,
                    "the source maps homomorphically into the target",
                    json!({ "map": map }),
                ));
            }
            Ok(None) => hyps.push(hyp(
                "template_witness",
                Status::Fail,
                "no homomorphism from source to target; the promise is vacuous",
                Value::Null,
            )),
            Err(e) => hyps.push(hyp("template_witness", Status::Fail, e.to_string(), Value::Null)),
        }
    } else {
        hyps.push(skipped("template_witness", "similarity"));
    }

    // pp_nonempty
    let eval_side = |s: &RelationalStructure| -> Result<Relation, String> {
        match eval_pp_formula(&input.phi, s, caps.pp_budget) {
            Ok(rel) if rel.tuples.is_empty() => Err(format!("defines no tuples in {}", s.name)),
            Ok(rel) => Ok(rel),
            Err(e) => Err(format!("{}: {}", s.name, e)),
        }
    };
    let (rel_a, rel_b) = (eval_side(a), eval_side(b));
    match (&rel_a, &rel_b) {
        (Ok(ra), Ok(rb)) => {
            let sample = |s: &RelationalStructure, r: &Relation| -> Vec<String> {
                r.tuples.iter().take(8).map(|t| fmt_tuple(&s.domain, t)).collect()
            };
            hyps.push(hyp(
                "pp_nonempty",
                Status::Pass,
                format!(
                    "arity {}: {} tuples in {}, {} tuples in {}",
                    ra.arity,
                    ra.tuples.len(),
                    a.name,
                    rb.tuples.len(),
                    b.name
                ),
                json!({
                    "arity": ra.arity,
                    "a_tuples": ra.tuples.len(),
                    "b_tuples": rb.tuples.len(),
                    "a_sample": sample(a, ra),
                    "b_sample": sample(b, rb),
                }),
            ));
        }
        _ => {
            let mut msgs = Vec::new();
            if let Err(e) = &rel_a {
                msgs.push(e.clone());
            }
            if let Err(e) = &rel_b {
                msgs.push(e.clone());
            }
            hyps.push(hyp("pp_nonempty", Status::Fail, msgs.join("; "), Value::Null));
        }
    }

    // face_family
    let complexes = match (&rel_a, &rel_b) {
        (Ok(ra), Ok(rb)) => {
            let h_a = build_complex(ra, &input.faces_a, caps.box_cost);
            let h_b = build_complex(rb, &input.faces_b, caps.box_cost);
            match (h_a, h_b) {
                (Ok(h_a), Ok(h_b)) => Some((h_a, h_b)),
                (r_a, r_b) => {
                    let mut msgs = Vec::new();
                    if let Err(e) = &r_a {
                        msgs.push(format!("{}: {}", a.name, e));
                    }
                    if let Err(e) = &r_b {
                        msgs.push(format!("{}: {}", b.name, e));
                    }
                    hyps.push(hyp("face_family", Status::Fail, msgs.join("; "), Value::Null));
                    None
                }
            }
        }
        _ => {
            hyps.push(skipped("face_family", "pp_nonempty"));
            None
        }
    };
    let both_box = input.faces_a == FaceMode::Box && input.faces_b == FaceMode::Box;
    if let Some((h_a, h_b)) = &complexes {
        if both_box {
            hyps.push(hyp(
                "face_family",
                Status::Pass,
                format!(
                    "maximal boxes verified as products: {} faces on {} vertices / {} faces on {} vertices; \
                     coordinatewise operations carry box products into boxes",
                    h_a.faces.len(),
                    h_a.vertex_count(),
                    h_b.faces.len(),
                    h_b.vertex_count()
                ),
                json!({
                    "a_faces": h_a.faces.len(),
                    "b_faces": h_b.faces.len(),
                    "a_vertices": h_a.vertex_count(),
                    "b_vertices": h_b.vertex_count(),
                }),
            ));
        } else {
            // Custom faces carry no automatic stability, so check that
            // every enumerated operation maps face products into faces.
            let mut failure: Option<(usize, Value)> = None;
            let mut checked = Vec::new();
            'arity: for n in 1..=caps.stability_max_arity {
                match enumerate_polymorphisms(a, b, n, caps.power, Some(caps.commutation_enum_limit)) {
                    Ok((polys, exhaustive)) => {
                        checked.push(json!({
                            "arity": n,
                            "polymorphisms": polys.len(),
                            "exhaustive": exhaustive,
                        }));
                        for (pi, f) in polys.iter().enumerate() {
                            if let Err(v) =
                                check_polymorphism_stable(h_a, h_b, n, |args| f.apply_tuples(args))
                            {
                                failure = Some((
                                    n,
                                    json!({
                                        "arity": n,
                                        "poly": pi,
                                        "faces": v.faces,
                                        "image": v.image,
                                        "outside_tuple": v.outside_tuple,
                                    }),
                                ));
                                break 'arity;
                            }
                        }
                    }
                    Err(e) => {
                        failure = Some((n, json!({ "error": e.to_string() })));
                        break 'arity;
                    }
                }
            }
            match failure {
                None => hyps.push(hyp(
                    "face_family",
                    Status::Pass,
                    format!(
                        "custom faces: every enumerated operation up to arity {} maps face products into faces",
                        caps.stability_max_arity
                    ),
                    json!({ "checked": checked }),
                )),
                Some((n, w)) => hyps.push(hyp(
                    "face_family",
                    Status::Fail,
                    format!("custom faces are not stable under arity-{n} operations"),
                    w,
                )),
            }
        }
    }
    let faces_ok = complexes.is_some()
        && hyps.last().map(|h| h.name == "face_family" && h.status == Status::Pass).unwrap_or(false);

    // mu_action
    let mus: Option<(MuAction, MuAction)> = if let (Some((h_a, h_b)), true) = (&complexes, faces_ok)
    {
        let built: Result<(MuAction, MuAction), String> = match &input.mu {
            MuSpec::CyclicShift => {
                let mu_a = cyclic_shift_mu(h_a).map_err(|e| format!("{}: {}", a.name, e));
                let mu_b = cyclic_shift_mu(h_b).map_err(|e| format!("{}: {}", b.name, e));
                match (mu_a, mu_b) {
                    (Ok(x), Ok(y)) => Ok((x, y)),
                    (Err(e), _) | (_, Err(e)) => Err(e),
                }
            }
            MuSpec::Custom { a_map, b_map } => {
                let build = |h: &Complex, map: &[(Tuple, Tuple)], side: &str| {
                    let perm = resolve_custom_perm(h, map, side)?;
                    MuAction::new(perm, MuProvenance::Custom).map_err(|e| format!("{side}: {e}"))
                };
                match (build(h_a, a_map, "source"), build(h_b, b_map, "target")) {
                    (Ok(x), Ok(y)) => Ok((x, y)),
                    (Err(e), _) | (_, Err(e)) => Err(e),
                }
            }
        };
        match built {
            Ok((mu_a, mu_b)) if mu_a.order == mu_b.order => {
                hyps.push(hyp(
                    "mu_action",
                    Status::Pass,
                    format!("symmetry of order {} on both sides", mu_a.order),
                    json!({
                        "order": mu_a.order,
                        "provenance": format!("{:?}", mu_a.provenance),
                    }),
                ));
                Some((mu_a, mu_b))
            }
            Ok((mu_a, mu_b)) => {
                hyps.push(hyp(
                    "mu_action",
                    Status::Fail,
                    format!(
                        "orders differ: {} on the source, {} on the target",
                        mu_a.order, mu_b.order
                    ),
                    json!({ "a_order": mu_a.order, "b_order": mu_b.order }),
                ));
                None
            }
            Err(e) => {
                hyps.push(hyp("mu_action", Status::Fail, e, Value::Null));
                None
            }
        }
    } else {
        hyps.push(skipped("mu_action", "face_family"));
        None
    };

    // target_connected
    if let (Some((_, h_b)), true) = (&complexes, faces_ok) {
        let comps = component_count(h_b);
        hyps.push(hyp(
            "target_connected",
            if comps == 1 { Status::Pass } else { Status::Fail },
            format!("{} vertices in {} component(s)", h_b.vertex_count(), comps),
            json!({ "components": comps }),
        ));
    } else {
        hyps.push(skipped("target_connected", "face_family"));
    }
    let target_connected = hyps.last().unwrap().status == Status::Pass;

    // mu_connected_source
    let mu_connected = if let (Some((h_a, _)), Some((mu_a, _))) = (&complexes, &mus) {
        let conn = is_mu_connected(h_a, mu_a);
        let pass = conn.pass();
        let witness = match conn.failure {
            Some((v, w)) => json!({
                "vertex": fmt_tuple(&a.domain, &h_a.vertices[v]),
                "image": fmt_tuple(&a.domain, &h_a.vertices[w]),
            }),
            None => Value::Null,
        };
        hyps.push(hyp(
            "mu_connected_source",
            if pass { Status::Pass } else { Status::Fail },
            if pass {
                "every source vertex is joined to its image by a path".to_string()
            } else {
                "a source vertex is separated from its image".to_string()
            },
            witness,
        ));
        pass
    } else {
        hyps.push(skipped("mu_connected_source", "mu_action"));
        false
    };

    // mu_preserves_faces
    if let (Some((h_a, h_b)), Some((mu_a, mu_b))) = (&complexes, &mus) {
        let ra = check_faces_preserved(h_a, mu_a);
        let rb = check_faces_preserved(h_b, mu_b);
        let pass = ra.pass() && rb.pass();
        hyps.push(hyp(
            "mu_preserves_faces",
            if pass { Status::Pass } else { Status::Fail },
            if pass {
                format!(
                    "all {} source and {} target faces map onto faces",
                    h_a.faces.len(),
                    h_b.faces.len()
                )
            } else {
                "a maximal face maps outside the face family".to_string()
            },
            json!({
                "a": serde_json::to_value(&ra).unwrap(),
                "b": serde_json::to_value(&rb).unwrap(),
            }),
        ));
    } else {
        hyps.push(skipped("mu_preserves_faces", "mu_action"));
    }
    let faces_preserved = hyps.last().unwrap().status == Status::Pass;

    // mu_commutes
    if let (Some((h_a, h_b)), Some((mu_a, mu_b)), true) = (&complexes, &mus, sim) {
        let spec = CommutationSampleSpec {
            max_arity: caps.commutation_max_arity,
            enum_limit: caps.commutation_enum_limit,
            power_cap: caps.power,
        };
        match check_commutation(a, b, h_a, h_b, mu_a, mu_b, &spec) {
            Ok(report) => {
                let pass = report.pass();
                let detail = if pass {
                    let counts: Vec<String> = report
                        .checks
                        .iter()
                        .map(|c| {
                            format!(
                                "arity {}: {}{}",
                                c.arity,
                                c.polymorphisms,
                                if c.exhaustive { " (all)" } else { " (cut off)" }
                            )
                        })
                        .collect();
                    if report.by_symmetry {
                        format!(
                            "coordinate rotations commute with every coordinatewise operation; cross-checked {}",
                            counts.join(", ")
                        )
                    } else {
                        format!("no violation among {}", counts.join(", "))
                    }
                } else {
                    "a polymorphism fails to commute with the symmetry".to_string()
                };
                hyps.push(hyp(
                    "mu_commutes",
                    if pass { Status::Pass } else { Status::Fail },
                    detail,
                    serde_json::to_value(&report).unwrap(),
                ));
            }
            Err(e) => hyps.push(hyp("mu_commutes", Status::Fail, e.to_string(), Value::Null)),
        }
    } else {
        hyps.push(skipped("mu_commutes", "mu_action"));
    }

    // mu_fixed_point_free
    if let (Some((h_a, h_b)), Some((mu_a, mu_b))) = (&complexes, &mus) {
        let ra = check_fixed_point_free(h_a, mu_a);
        let rb = check_fixed_point_free(h_b, mu_b);
        let pass = ra.pass() && rb.pass();
        hyps.push(hyp(
            "mu_fixed_point_free",
            if pass { Status::Pass } else { Status::Fail },
            if pass {
                format!("no power in 1..{} fixes a simplex on either side", mu_a.order)
            } else {
                "a proper power of the symmetry fixes a simplex".to_string()
            },
            json!({
                "a": serde_json::to_value(&ra).unwrap(),
                "b": serde_json::to_value(&rb).unwrap(),
            }),
        ));
    } else {
        hyps.push(skipped("mu_fixed_point_free", "mu_action"));
    }

    // target_overlap_free
    let overlap_free = if let (Some((h_a, h_b)), true) = (&complexes, faces_ok) {
        let rep = max_pairwise_face_overlap(h_b);
        let a_rep = max_pairwise_face_overlap(h_a);
        let pass = rep.max <= 1;
        let witness = match rep.witness {
            Some((i, j)) => {
                let face = |f: &Vec<usize>| -> Vec<String> {
                    f.iter().map(|&v| fmt_tuple(&b.domain, &h_b.vertices[v])).collect()
                };
                json!({
                    "max": rep.max,
                    "face_1": face(&h_b.faces[i]),
                    "face_2": face(&h_b.faces[j]),
                })
            }
            None => json!({ "max": rep.max }),
        };
        hyps.push(hyp(
            "target_overlap_free",
            if pass { Status::Pass } else { Status::Fail },
            format!(
                "target faces pairwise share at most {} vertices (source: {})",
                rep.max, a_rep.max
            ),
            witness,
        ));
        pass
    } else {
        hyps.push(skipped("target_overlap_free", "face_family"));
        false
    };

    // mu_cycle
    let mut cycle_artifacts: Option<(SpanningTree, crate::mu::MuCycle)> = None;
    if let (Some((h_a, _)), Some((mu_a, _)), true) = (&complexes, &mus, mu_connected) {
        let tree_a = build_spanning_tree(h_a, 0);
        match build_mu_cycle(h_a, &tree_a, mu_a, None) {
            Ok(mc) => {
                let source_word = free_basis(h_a, &tree_a).ok().and_then(|basis| {
                    let word = rho(h_a, &tree_a, &mc.cycle).ok()?;
                    Some(basis.eta(h_a, &word).ok()?.render())
                });
                let imb = traversal_imbalance(&mc.core()).map(|w| ImbalanceRecord {
                    u: fmt_tuple(&a.domain, &h_a.vertices[w.u]),
                    v: fmt_tuple(&a.domain, &h_a.vertices[w.v]),
                    forward: w.forward,
                    backward: w.backward,
                });
                let record = MuCycleRecord {
                    anchor: fmt_tuple(&a.domain, &h_a.vertices[mc.anchor]),
                    order: mc.order,
                    length: mc.cycle.0.len() - 1,
                    vertices: mc
                        .cycle
                        .0
                        .iter()
                        .map(|&v| fmt_tuple(&a.domain, &h_a.vertices[v]))
                        .collect(),
                    source_word,
                    imbalance: imb,
                };
                hyps.push(hyp(
                    "mu_cycle",
                    Status::Pass,
                    format!(
                        "symmetric cycle of length {} through {} rotations",
                        record.length, mc.order
                    ),
                    json!({ "length": record.length, "order": mc.order }),
                ));
                mu_cycle_record = Some(record);
                cycle_artifacts = Some((tree_a, mc));
            }
            Err(e) => hyps.push(hyp("mu_cycle", Status::Fail, e.to_string(), Value::Null)),
        }
    } else {
        hyps.push(skipped("mu_cycle", "mu_connected_source"));
    }

    // Free basis artifacts for the last two hypotheses.
    let xi_ready = overlap_free && target_connected && cycle_artifacts.is_some() && sim;
    let mut basis_artifacts: Option<(SpanningTree, FreeBasis)> = None;
    if let (Some((_, h_b)), true) = (&complexes, overlap_free) {
        let tree_b = build_spanning_tree(h_b, 0);
        if let Ok(basis) = free_basis(h_b, &tree_b) {
            free_group = Some(FreeGroupRecord {
                vertices: h_b.vertex_count(),
                faces: h_b.faces.len(),
                edges: h_b.edges.len(),
                tree_edges: tree_b.edge_count(),
                rank: basis.rank(),
                basis_edges: basis
                    .basis
                    .iter()
                    .map(|&e| {
                        let (u, v) = h_b.edges[e];
                        [
                            fmt_tuple(&b.domain, &h_b.vertices[u]),
                            fmt_tuple(&b.domain, &h_b.vertices[v]),
                        ]
                    })
                    .collect(),
            });
            basis_artifacts = Some((tree_b, basis));
        }
    }

    // nondegeneracy
    if let (Some((h_a, h_b)), Some((tree_b, basis_b)), Some((_, mc)), true) =
        (&complexes, &basis_artifacts, &cycle_artifacts, xi_ready)
    {
        let ctx = XiContext { h_a, h_b, tree_b, basis_b, cycle_a: &mc.cycle };
        match enumerate_polymorphisms(a, b, 1, caps.power, Some(caps.unary_enum_limit)) {
            Ok((unary, exhaustive)) if !unary.is_empty() => {
                let mut words = Vec::with_capacity(unary.len());
                let mut error: Option<String> = None;
                for g in &unary {
                    match ctx.xi(g) {
                        Ok(mut w) => words.push(w.pop().unwrap()),
                        Err(e) => {
                            error = Some(e.to_string());
                            break;
                        }
                    }
                }
                match error {
                    Some(e) => {
                        hyps.push(hyp("nondegeneracy", Status::Fail, e, Value::Null));
                    }
                    None => {
                        let records: Vec<UnaryWordRecord> = unary
                            .iter()
                            .zip(&words)
                            .map(|(g, w)| UnaryWordRecord {
                                map: g
                                    .table
                                    .iter()
                                    .enumerate()
                                    .map(|(x, &y)| {
                                        format!("{}->{}", a.domain[x], b.domain[y])
                                    })
                                    .collect(),
                                word: w.render(),
                                length: w.len(),
                            })
                            .collect();
                        let min_len = words.iter().map(|w| w.len()).min().unwrap();
                        let pass = min_len > 0;
                        let detail = if pass {
                            format!(
                                "all {} unary maps send the cycle to an essential class{}",
                                unary.len(),
                                if exhaustive { "" } else { " (enumeration cut off)" }
                            )
                        } else {
                            "a unary map collapses the cycle to the trivial class".to_string()
                        };
                        hyps.push(hyp(
                            "nondegeneracy",
                            if pass { Status::Pass } else { Status::Fail },
                            detail,
                            json!({
                                "unary_count": unary.len(),
                                "exhaustive": exhaustive,
                                "min_word_length": min_len,
                            }),
                        ));
                        nondeg_record = Some(NondegeneracyRecord {
                            unary_count: unary.len(),
                            exhaustive,
                            min_word_length: min_len,
                            words: records,
                        });
                    }
                }
            }
            Ok(_) => hyps.push(hyp(
                "nondegeneracy",
                Status::Fail,
                "no unary maps exist",
                Value::Null,
            )),
            Err(e) => hyps.push(hyp("nondegeneracy", Status::Fail, e.to_string(), Value::Null)),
        }
    } else {
        hyps.push(skipped("nondegeneracy", "mu_cycle, target_overlap_free and target_connected"));
    }

    // xi_essential
    if let (Some((h_a, h_b)), Some((tree_b, basis_b)), Some((_, mc)), true) =
        (&complexes, &basis_artifacts, &cycle_artifacts, xi_ready)
    {
        let ctx = XiContext { h_a, h_b, tree_b, basis_b, cycle_a: &mc.cycle };
        let mut arity_records = Vec::new();
        let mut failure: Option<(String, Value)> = None;
        'outer: for n in 1..=caps.xi_max_arity {
            match enumerate_polymorphisms(a, b, n, caps.power, Some(caps.xi_enum_limit)) {
                Ok((polys, exhaustive)) => {
                    let mut roots_sample = Vec::new();
                    let mut minor_checked = 0usize;
                    for (pi, f) in polys.iter().enumerate() {
                        let words = match ctx.xi(f) {
                            Ok(w) => w,
                            Err(e) => {
                                failure = Some((
                                    format!("xi failed on an arity-{n} operation"),
                                    json!({ "arity": n, "poly": pi, "error": e.to_string() }),
                                ));
                                break 'outer;
                            }
                        };
                        let st = analyze_xi_structure(&words);
                        if !st.essential() {
                            failure = Some((
                                format!("an arity-{n} operation has an inessential image"),
                                json!({
                                    "arity": n,
                                    "poly": pi,
                                    "structure": serde_json::to_value(&st).unwrap(),
                                    "words": words.iter().map(|w| w.render()).collect::<Vec<_>>(),
                                }),
                            ));
                            break 'outer;
                        }
                        if roots_sample.len() < 8 {
                            roots_sample.push(json!({
                                "poly": pi,
                                "root": st.root,
                                "exponents": st.exponents,
                            }));
                        }
                        // Merging all slots must multiply the slot words.
                        if n == 2 && minor_checked < 25 {
                            minor_checked += 1;
                            match check_minor_preservation(&ctx, f, &[0, 0], 1) {
                                Ok(mc) if mc.holds => {}
                                Ok(mc) => {
                                    failure = Some((
                                        "a merged operation disagrees with the slot product".into(),
                                        json!({
                                            "arity": n,
                                            "poly": pi,
                                            "minor_side": mc.minor_side.iter().map(|w| w.render()).collect::<Vec<_>>(),
                                            "product_side": mc.product_side.iter().map(|w| w.render()).collect::<Vec<_>>(),
                                        }),
                                    ));
                                    break 'outer;
                                }
                                Err(e) => {
                                    failure = Some((
                                        "minor comparison failed".into(),
                                        json!({ "arity": n, "poly": pi, "error": e.to_string() }),
                                    ));
                                    break 'outer;
                                }
                            }
                        }
                    }
                    arity_records.push(json!({
                        "arity": n,
                        "polymorphisms": polys.len(),
                        "exhaustive": exhaustive,
                        "minor_checks": minor_checked,
                        "sample": roots_sample,
                    }));
                }
                Err(e) => {
                    failure = Some((e.to_string(), Value::Null));
                    break 'outer;
                }
            }
        }
        match failure {
            None => hyps.push(hyp(
                "xi_essential",
                Status::Pass,
                format!(
                    "every enumerated operation up to arity {} acts by commuting powers of a \
                     nontrivial root with nonzero exponent sum",
                    caps.xi_max_arity
                ),
                json!({ "arities": arity_records }),
            )),
            Some((detail, witness)) => {
                hyps.push(hyp("xi_essential", Status::Fail, detail, witness))
            }
        }
    } else {
        hyps.push(skipped("xi_essential", "mu_cycle, target_overlap_free and target_connected"));
    }

    let _ = faces_preserved;
    let failing: Vec<String> = hyps
        .iter()
        .filter(|h| h.status == Status::Fail)
        .map(|h| h.name.clone())
        .collect();
    let all_pass = hyps.iter().all(|h| h.status == Status::Pass);
    debug_assert!(
        all_pass || !failing.is_empty(),
        "a skipped hypothesis always follows from a failed one"
    );

    Certificate {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        template: TemplateRecord {
            a_name: a.name.clone(),
            a_domain: a.domain.clone(),
            b_name: b.name.clone(),
            b_domain: b.domain.clone(),
            pp: input.phi.text.clone(),
            faces: if both_box { "box".to_string() } else { "custom".to_string() },
            mu: input.mu.descriptor().to_string(),
        },
        caps: caps.clone(),
        hypotheses: hyps,
        free_group,
        mu_cycle: mu_cycle_record,
        nondegeneracy: nondeg_record,
        verdict: if all_pass { Verdict::NpHard } else { Verdict::NotCertified },
        failing,
    }
}

/// Human-readable rendering of a certificate.
pub fn render_text(cert: &Certificate) -> String {
    let mut out = String::new();
    let t = &cert.template;
    out.push_str(&format!(
        "template {} -> {}  pp={}  faces={}  mu={}\n",
        t.a_name, t.b_name, t.pp, t.faces, t.mu
    ));
    out.push_str(&format!("verdict {}\n", cert.verdict));
    if !cert.failing.is_empty() {
        out.push_str(&format!("failing: {}\n", cert.failing.join(", ")));
    }
    for h in &cert.hypotheses {
        let tag = match h.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skip",
        };
        out.push_str(&format!("  [{tag}] {}: {}\n", h.name, h.detail));
    }
    if let Some(g) = &cert.free_group {
        out.push_str(&format!(
            "free group: rank {} ({} vertices, {} faces, {} edges, {} tree edges)\n",
            g.rank, g.vertices, g.faces, g.edges, g.tree_edges
        ));
    }
    if let Some(c) = &cert.mu_cycle {
        out.push_str(&format!(
            "symmetric cycle: anchor {}, order {}, length {}\n",
            c.anchor, c.order, c.length
        ));
        if let Some(w) = &c.source_word {
            out.push_str(&format!("  source class: {w}\n"));
        }
        if let Some(i) = &c.imbalance {
            out.push_str(&format!(
                "  imbalance: {} -> {} crossed {} forward, {} backward\n",
                i.u, i.v, i.forward, i.backward
            ));
        }
    }
    if let Some(n) = &cert.nondegeneracy {
        out.push_str(&format!(
            "nondegeneracy: {} unary maps, shortest image word {}\n",
            n.unary_count, n.min_word_length
        ));
    }
    out
}

/// One row of the bundled template suite.
#[derive(Debug, Clone, Copy)]
pub struct SuiteSpec {
    pub a: &'static str,
    pub b: &'static str,
    pub pp: &'static str,
    pub expected: Verdict,
    /// Expected failing hypotheses, in certificate order.
    pub expected_failing: &'static [&'static str],
}

/// The bundled suite: hard templates of every family in the corpus plus
/// controls that fail exactly one hypothesis.
pub fn bundled_suite() -> Vec<SuiteSpec> {
    use Verdict::*;
    vec![
        SuiteSpec { a: "k3", b: "k3", pp: "E(x,y)", expected: NpHard, expected_failing: &[] },
        SuiteSpec { a: "c5", b: "k3", pp: "E(x,y)", expected: NpHard, expected_failing: &[] },
        SuiteSpec { a: "c7", b: "k3", pp: "E(x,y)", expected: NpHard, expected_failing: &[] },
        SuiteSpec { a: "c5", b: "petersen", pp: "E(x,y)", expected: NpHard, expected_failing: &[] },
        SuiteSpec { a: "h2", b: "h2", pp: "R(x,y,z)", expected: NpHard, expected_failing: &[] },
        SuiteSpec { a: "h2", b: "e", pp: "R(x,y,z)", expected: NpHard, expected_failing: &[] },
        SuiteSpec { a: "e", b: "e", pp: "R(x,y,z)", expected: NpHard, expected_failing: &[] },
        SuiteSpec { a: "a", b: "a3", pp: "R(x,y,z)", expected: NpHard, expected_failing: &[] },
        SuiteSpec { a: "b3", b: "d3", pp: "R(x,y,z)", expected: NpHard, expected_failing: &[] },
        SuiteSpec { a: "b4", b: "d4", pp: "R(w,x,y,z)", expected: NpHard, expected_failing: &[] },
        SuiteSpec {
            a: "b5",
            b: "d5",
            pp: "R(v,w,x,y,z)",
            expected: NotCertified,
            expected_failing: &["target_overlap_free"],
        },
        SuiteSpec {
            a: "b6",
            b: "d6",
            pp: "R(u,v,w,x,y,z)",
            expected: NotCertified,
            expected_failing: &["target_overlap_free"],
        },
        SuiteSpec {
            a: "a2",
            b: "a3",
            pp: "R(x,y,z)",
            expected: NotCertified,
            expected_failing: &["mu_connected_source"],
        },
        SuiteSpec {
            a: "k3",
            b: "k4",
            pp: "E(x,y)",
            expected: NotCertified,
            expected_failing: &["target_overlap_free"],
        },
    ]
}

/// Build a template from two bundled structures and a pp-formula, with
/// box faces and the coordinate shift.
pub fn bundled_template(a: &str, b: &str, pp: &str) -> TemplateInput {
    let load = |name: &str| -> RelationalStructure {
        parse_structure(corpus::get(name).unwrap_or_else(|| panic!("no bundled structure '{name}'")))
            .expect("bundled structures parse")
    };
    TemplateInput::boxed(load(a), load(b), parse_pp_formula(pp).expect("suite formulas parse"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteRowResult {
    pub a: String,
    pub b: String,
    pub pp: String,
    pub expected: Verdict,
    pub verdict: Verdict,
    pub failing: Vec<String>,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub rows: Vec<SuiteRowResult>,
    pub all_match: bool,
}

/// Certify every bundled row and compare against the expected verdicts.
pub fn run_suite(caps: &Caps) -> SuiteReport {
    let mut rows = Vec::new();
    for spec in bundled_suite() {
        let input = bundled_template(spec.a, spec.b, spec.pp);
        let cert = certify(&input, caps);
        let matched = cert.verdict == spec.expected
            && cert.failing == spec.expected_failing.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        rows.push(SuiteRowResult {
            a: spec.a.to_string(),
            b: spec.b.to_string(),
            pp: spec.pp.to_string(),
            expected: spec.expected,
            verdict: cert.verdict,
            failing: cert.failing,
            matched,
        });
    }
    let all_match = rows.iter().all(|r| r.matched);
    SuiteReport { rows, all_match }
}

/// Plain-text suite table.
pub fn render_suite(report: &SuiteReport) -> String {
    let mut out = String::new();
    for r in &report.rows {
        out.push_str(&format!(
            "{} ({}, {})  pp={}  expected={}  got={}{}\n",
            if r.matched { "ok " } else { "BAD" },
            r.a,
            r.b,
            r.pp,
            r.expected,
            r.verdict,
            if r.failing.is_empty() {
                String::new()
            } else {
                format!("  failing: {}", r.failing.join(", "))
            },
        ));
    }
    out.push_str(if report.all_match { "suite: all rows match\n" } else { "suite: MISMATCH\n" });
    out
}
