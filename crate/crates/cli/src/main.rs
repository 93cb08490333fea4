//! Command-line front end: wires structure files and pp-formulas to the
//! library and prints JSON (machine) or text (human) reports.
//!
//! Exit codes: 0 success, 1 a check or certification failed, 2 bad input.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pcsp_ep_core::certifier::{
    certificate_json, certify, render_suite, render_text, run_suite, Caps, MuSpec, TemplateInput,
    Verdict,
};
use pcsp_ep_core::complexes::{
    build_complex, build_spanning_tree, is_connected, max_pairwise_face_overlap, Complex, FaceMode,
};
use pcsp_ep_core::groups::{build_presentation, free_basis};
use pcsp_ep_core::mu::{
    build_mu_cycle, check_commutation, check_faces_preserved, check_fixed_point_free,
    cyclic_shift_mu, is_mu_connected, CommutationSampleSpec, MuAction, MuProvenance,
};
use pcsp_ep_core::polymorphisms::{analyze_xi_structure, enumerate_polymorphisms, XiContext};
use pcsp_ep_core::structures::{
    eval_pp_formula, parse_pp_formula, parse_structure, serialize_structure, RelationalStructure,
    Tuple,
};

#[derive(Parser)]
#[command(name = "pcsp-ep")]
#[command(about = "Topological NP-hardness certification for promise CSP templates")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Report format
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn emit(&self, report: &Value, text: impl FnOnce() -> String) -> Result<(), String> {
        let body = match self.format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Text => text(),
        };
        self.write(&body)
    }

    fn write(&self, body: &str) -> Result<(), String> {
        match &self.out {
            Some(path) => fs::write(path, body)
                .map_err(|e| format!("cannot write {}: {e}", path.display())),
            None => {
                print!("{body}");
                Ok(())
            }
        }
    }
}

#[derive(Args, Clone)]
struct CapsArgs {
    /// Assignment budget for pp-formula evaluation
    #[arg(long, default_value_t = Caps::default().pp_budget)]
    pp_budget: u64,
    /// Cost cap for building the box tolerance
    #[arg(long, default_value_t = Caps::default().box_cost)]
    box_cost: u64,
    /// Element and tuple cap for direct powers
    #[arg(long = "power-cap", default_value_t = Caps::default().power)]
    power_cap: u64,
    /// Highest polymorphism arity for the commutation check
    #[arg(long, default_value_t = Caps::default().commutation_max_arity)]
    commutation_max_arity: usize,
    /// Enumeration cutoff per arity for the commutation check
    #[arg(long, default_value_t = Caps::default().commutation_enum_limit)]
    commutation_enum_limit: usize,
    /// Highest polymorphism arity for the winding structure check
    #[arg(long, default_value_t = Caps::default().xi_max_arity)]
    xi_max_arity: usize,
    /// Enumeration cutoff per arity for the winding structure check
    #[arg(long, default_value_t = Caps::default().xi_enum_limit)]
    xi_enum_limit: usize,
    /// Highest arity for the face stability check with custom faces
    #[arg(long, default_value_t = Caps::default().stability_max_arity)]
    stability_max_arity: usize,
    /// Enumeration cutoff for unary maps in the nondegeneracy check
    #[arg(long, default_value_t = Caps::default().unary_enum_limit)]
    unary_enum_limit: usize,
    /// Worker count; defaults to PCSP_EP_THREADS, then 1
    #[arg(long)]
    threads: Option<usize>,
}

impl CapsArgs {
    fn caps(&self) -> Caps {
        let threads = self
            .threads
            .or_else(|| std::env::var("PCSP_EP_THREADS").ok().and_then(|v| v.parse().ok()))
            .unwrap_or(1);
        Caps {
            pp_budget: self.pp_budget,
            box_cost: self.box_cost,
            power: self.power_cap,
            commutation_max_arity: self.commutation_max_arity,
            commutation_enum_limit: self.commutation_enum_limit,
            xi_max_arity: self.xi_max_arity,
            xi_enum_limit: self.xi_enum_limit,
            stability_max_arity: self.stability_max_arity,
            unary_enum_limit: self.unary_enum_limit,
            threads,
        }
    }
}

#[derive(Subcommand)]
enum Commands {
    /// Parse a structure file and echo its canonical form
    Parse {
        /// Structure file
        file: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Build the complex on a pp-defined relation: faces, graph, overlap stats
    Complex {
        /// Structure file (alias of --b; give exactly one)
        #[arg(long)]
        a: Option<PathBuf>,
        /// Structure file (alias of --a; give exactly one)
        #[arg(long)]
        b: Option<PathBuf>,
        /// pp-formula defining the relation, e.g. "E(x,y)"
        #[arg(long)]
        pp: String,
        /// "box" or a JSON file holding an array of vertex-index faces
        #[arg(long, default_value = "box")]
        faces: String,
        #[command(flatten)]
        caps: CapsArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Edge-path group report: presentation, free basis, rank
    Group {
        /// Structure file (alias of --b; give exactly one)
        #[arg(long)]
        a: Option<PathBuf>,
        /// Structure file (alias of --a; give exactly one)
        #[arg(long)]
        b: Option<PathBuf>,
        /// pp-formula defining the relation
        #[arg(long)]
        pp: String,
        /// "box" or a JSON file holding an array of vertex-index faces
        #[arg(long, default_value = "box")]
        faces: String,
        #[command(flatten)]
        caps: CapsArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the symmetry conditions on a template's complexes
    MuCheck {
        /// Source structure file
        #[arg(long)]
        a: PathBuf,
        /// Target structure file; enables the commutation check
        #[arg(long)]
        b: Option<PathBuf>,
        /// pp-formula defining the relations
        #[arg(long)]
        pp: String,
        /// "box" or a JSON file holding an array of vertex-index faces
        #[arg(long, default_value = "box")]
        faces: String,
        /// "shift" or a JSON file {"a": [permutation], "b": [...], "order": n}
        #[arg(long, default_value = "shift")]
        mu: String,
        #[command(flatten)]
        caps: CapsArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Enumerate polymorphisms and optionally their winding images
    Poly {
        /// Source structure file
        #[arg(long)]
        a: PathBuf,
        /// Target structure file
        #[arg(long)]
        b: PathBuf,
        /// Polymorphism arity
        #[arg(long, default_value_t = 2)]
        arity: usize,
        /// Enumeration cutoff; omit for the default cap
        #[arg(long)]
        limit: Option<usize>,
        /// Compute winding images; requires --pp
        #[arg(long)]
        xi: bool,
        /// pp-formula defining the relations (needed for --xi)
        #[arg(long)]
        pp: Option<String>,
        /// "box" or a JSON file holding an array of vertex-index faces
        #[arg(long, default_value = "box")]
        faces: String,
        /// "shift" or a JSON file {"a": [permutation], ...}
        #[arg(long, default_value = "shift")]
        mu: String,
        #[command(flatten)]
        caps: CapsArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Certify a template NP-hard; exits 1 when not certified
    Certify {
        /// Source structure file
        #[arg(long)]
        a: PathBuf,
        /// Target structure file
        #[arg(long)]
        b: PathBuf,
        /// pp-formula defining the relations
        #[arg(long)]
        pp: String,
        /// Face family for both sides: "box" or a JSON face file
        #[arg(long, default_value = "box")]
        faces: String,
        /// Face family override for the source side
        #[arg(long)]
        faces_a: Option<String>,
        /// Face family override for the target side
        #[arg(long)]
        faces_b: Option<String>,
        /// "shift" or a JSON file {"a": [permutation], "b": [...], "order": n}
        #[arg(long, default_value = "shift")]
        mu: String,
        /// Replay and compare byte-for-byte against a stored certificate
        #[arg(long)]
        check: Option<PathBuf>,
        #[command(flatten)]
        caps: CapsArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the bundled template suite; exits 1 on any mismatch
    Suite {
        #[command(flatten)]
        caps: CapsArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_structure(path: &PathBuf) -> Result<RelationalStructure, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_structure(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn face_mode(arg: &str) -> Result<FaceMode, String> {
    if arg == "box" {
        return Ok(FaceMode::Box);
    }
    let text = fs::read_to_string(arg).map_err(|e| format!("cannot read {arg}: {e}"))?;
    let faces: Vec<Vec<usize>> =
        serde_json::from_str(&text).map_err(|e| format!("{arg}: expected [[v,...],...]: {e}"))?;
    Ok(FaceMode::Custom(faces))
}

/// Evaluate the formula on a structure and build its complex.
fn build_side(
    s: &RelationalStructure,
    pp: &str,
    faces: &FaceMode,
    caps: &Caps,
) -> Result<Complex, String> {
    let phi = parse_pp_formula(pp).map_err(|e| e.to_string())?;
    let rel = eval_pp_formula(&phi, s, caps.pp_budget).map_err(|e| e.to_string())?;
    build_complex(&rel, faces, caps.box_cost).map_err(|e| e.to_string())
}

/// Read {"a": [...], "b": [...], "order": n} and pull one side's permutation.
fn mu_file_perm(path: &str, side: &str, n: usize) -> Result<(Vec<usize>, Option<usize>), String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))?;
    let arr = v
        .get(side)
        .and_then(Value::as_array)
        .ok_or_else(|| format!("{path}: missing \"{side}\" permutation"))?;
    let perm: Vec<usize> = arr
        .iter()
        .map(|x| x.as_u64().map(|u| u as usize))
        .collect::<Option<_>>()
        .ok_or_else(|| format!("{path}: \"{side}\" must hold vertex indices"))?;
    if perm.len() != n || perm.iter().any(|&i| i >= n) {
        return Err(format!(
            "{path}: \"{side}\" must permute 0..{n}, got {} entries",
            perm.len()
        ));
    }
    let order = match v.get("order") {
        None => None,
        Some(o) => Some(
            o.as_u64()
                .map(|u| u as usize)
                .ok_or_else(|| format!("{path}: \"order\" must be an integer"))?,
        ),
    };
    Ok((perm, order))
}

/// Resolve --mu for one complex: the shift keyword or a stored permutation.
fn mu_action(arg: &str, side: &str, h: &Complex) -> Result<MuAction, String> {
    if arg == "shift" {
        return cyclic_shift_mu(h).map_err(|e| e.to_string());
    }
    let (perm, declared) = mu_file_perm(arg, side, h.vertex_count())?;
    let action = MuAction::new(perm, MuProvenance::Custom).map_err(|e| e.to_string())?;
    if let Some(order) = declared {
        if order != action.order {
            return Err(format!(
                "{arg}: declared order {order}, but the permutation has order {}",
                action.order
            ));
        }
    }
    Ok(action)
}

/// Resolve --mu for the certifier: tuple maps on both complexes.
fn mu_spec(arg: &str, h_a: &Complex, h_b: &Complex) -> Result<MuSpec, String> {
    if arg == "shift" {
        return Ok(MuSpec::CyclicShift);
    }
    let side = |side: &str, h: &Complex| -> Result<Vec<(Tuple, Tuple)>, String> {
        let (perm, declared) = mu_file_perm(arg, side, h.vertex_count())?;
        if let Some(order) = declared {
            let action = MuAction::new(perm.clone(), MuProvenance::Custom)
                .map_err(|e| format!("{arg}: {e}"))?;
            if order != action.order {
                return Err(format!(
                    "{arg}: declared order {order}, but \"{side}\" has order {}",
                    action.order
                ));
            }
        }
        Ok(perm
            .iter()
            .enumerate()
            .map(|(i, &j)| (h.vertices[i].clone(), h.vertices[j].clone()))
            .collect())
    };
    Ok(MuSpec::Custom { a_map: side("a", h_a)?, b_map: side("b", h_b)? })
}

fn fmt_tuple(domain: &[String], t: &[usize]) -> String {
    let labels: Vec<&str> = t.iter().map(|&i| domain[i].as_str()).collect();
    format!("({})", labels.join(","))
}

/// Pick the single structure for `complex` and `group`.
fn one_side(a: Option<PathBuf>, b: Option<PathBuf>) -> Result<PathBuf, String> {
    match (a, b) {
        (Some(p), None) | (None, Some(p)) => Ok(p),
        _ => Err("give exactly one of --a or --b".into()),
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Commands::Parse { file, output } => {
            let s = load_structure(&file)?;
            let relations: Vec<Value> = s
                .relations
                .iter()
                .map(|r| {
                    let tuples: Vec<Vec<&str>> = r
                        .tuples
                        .iter()
                        .map(|t| t.iter().map(|&i| s.domain[i].as_str()).collect())
                        .collect();
                    json!({ "name": r.name, "arity": r.arity, "tuples": tuples })
                })
                .collect();
            let report = json!({
                "name": s.name,
                "domain": s.domain,
                "relations": relations,
            });
            output.emit(&report, || serialize_structure(&s))?;
            Ok(0)
        }

        Commands::Complex { a, b, pp, faces, caps, output } => {
            let path = one_side(a, b)?;
            let s = load_structure(&path)?;
            let caps = caps.caps();
            let mode = face_mode(&faces)?;
            let h = build_side(&s, &pp, &mode, &caps)?;
            let overlap = max_pairwise_face_overlap(&h);
            let label = |v: usize| fmt_tuple(&s.domain, &h.vertices[v]);
            let face_labels: Vec<Vec<String>> =
                h.faces.iter().map(|f| f.iter().map(|&v| label(v)).collect()).collect();
            let report = json!({
                "structure": s.name,
                "pp": pp,
                "face_family": if matches!(mode, FaceMode::Box) { "box" } else { "custom" },
                "vertices": h.vertex_count(),
                "edges": h.edges.len(),
                "faces": h.faces.len(),
                "max_face_size": h.faces.iter().map(|f| f.len()).max().unwrap_or(0),
                "max_overlap": overlap.max,
                "overlap_witness": overlap.witness.map(|(i, j)| json!([face_labels[i], face_labels[j]])),
                "connected": is_connected(&h),
                "face_vertices": face_labels,
            });
            output.emit(&report, || {
                let mut out = format!(
                    "complex on {} of {}\nvertices {}  edges {}  maximal faces {}\n",
                    pp,
                    s.name,
                    h.vertex_count(),
                    h.edges.len(),
                    h.faces.len()
                );
                out.push_str(&format!(
                    "largest face {}  pairwise overlap max {}\nconnected: {}\n",
                    h.faces.iter().map(|f| f.len()).max().unwrap_or(0),
                    overlap.max,
                    if is_connected(&h) { "yes" } else { "no" }
                ));
                for f in &h.faces {
                    let labels: Vec<String> = f.iter().map(|&v| label(v)).collect();
                    out.push_str(&format!("face {}\n", labels.join(" ")));
                }
                out
            })?;
            Ok(0)
        }

        Commands::Group { a, b, pp, faces, caps, output } => {
            let path = one_side(a, b)?;
            let s = load_structure(&path)?;
            let caps = caps.caps();
            let mode = face_mode(&faces)?;
            let h = build_side(&s, &pp, &mode, &caps)?;
            let tree = build_spanning_tree(&h, 0);
            let pres = build_presentation(&h, &tree);
            let basis = free_basis(&h, &tree);
            let (free, rank, basis_edges, note) = match &basis {
                Ok(fb) => {
                    let edges: Vec<[String; 2]> = fb
                        .basis
                        .iter()
                        .map(|&e| {
                            let (u, v) = h.edges[e];
                            [
                                fmt_tuple(&s.domain, &h.vertices[u]),
                                fmt_tuple(&s.domain, &h.vertices[v]),
                            ]
                        })
                        .collect();
                    (true, Some(fb.rank()), Some(edges), String::new())
                }
                Err(e) => (false, None, None, e.to_string()),
            };
            let report = json!({
                "structure": s.name,
                "pp": pp,
                "vertices": h.vertex_count(),
                "edges": h.edges.len(),
                "faces": h.faces.len(),
                "tree_edges": tree.parent.iter().filter(|p| p.is_some()).count(),
                "free": free,
                "rank": rank,
                "basis_edges": basis_edges,
                "note": note,
                "presentation": pres.render_text(&h),
            });
            output.emit(&report, || {
                let mut out = pres.render_text(&h);
                match rank {
                    Some(r) => out.push_str(&format!("free basis rank {r}\n")),
                    None => out.push_str(&format!("not free: {note}\n")),
                }
                out
            })?;
            Ok(0)
        }

        Commands::MuCheck { a, b, pp, faces, mu, caps, output } => {
            let sa = load_structure(&a)?;
            let caps = caps.caps();
            let mode = face_mode(&faces)?;
            let h_a = build_side(&sa, &pp, &mode, &caps)?;
            let mut checks: Vec<Value> = Vec::new();
            let mut pass = true;
            let mut push = |name: &str, side: &str, ok: bool, report: Value| {
                checks.push(json!({ "name": name, "side": side, "pass": ok, "report": report }));
                pass &= ok;
            };

            let mu_a = match mu_action(&mu, "a", &h_a) {
                Ok(m) => m,
                Err(e) => {
                    let report = json!({
                        "mu": mu, "pass": false,
                        "checks": [{ "name": "action", "side": "a", "pass": false, "report": e }],
                    });
                    output.emit(&report, || format!("action a: FAIL {e}\nmu-check: FAIL\n"))?;
                    return Ok(1);
                }
            };
            push(
                "action",
                "a",
                true,
                json!({ "order": mu_a.order, "provenance": format!("{:?}", mu_a.provenance) }),
            );
            let fp = check_faces_preserved(&h_a, &mu_a);
            push("faces_preserved", "a", fp.pass(), serde_json::to_value(&fp).unwrap());
            let fx = check_fixed_point_free(&h_a, &mu_a);
            push("fixed_point_free", "a", fx.violation.is_none(), serde_json::to_value(&fx).unwrap());
            let conn = is_mu_connected(&h_a, &mu_a);
            push("connected_to_image", "a", conn.pass(), serde_json::to_value(&conn).unwrap());

            if let Some(bpath) = b {
                let sb = load_structure(&bpath)?;
                let h_b = build_side(&sb, &pp, &mode, &caps)?;
                match mu_action(&mu, "b", &h_b) {
                    Ok(mu_b) => {
                        push(
                            "action",
                            "b",
                            true,
                            json!({ "order": mu_b.order, "provenance": format!("{:?}", mu_b.provenance) }),
                        );
                        let fpb = check_faces_preserved(&h_b, &mu_b);
                        push("faces_preserved", "b", fpb.pass(), serde_json::to_value(&fpb).unwrap());
                        let spec = CommutationSampleSpec {
                            max_arity: caps.commutation_max_arity,
                            enum_limit: caps.commutation_enum_limit,
                            power_cap: caps.power,
                        };
                        let comm = check_commutation(&sa, &sb, &h_a, &h_b, &mu_a, &mu_b, &spec)
                            .map_err(|e| e.to_string())?;
                        push("commutation", "a*b", comm.pass(), serde_json::to_value(&comm).unwrap());
                    }
                    Err(e) => push("action", "b", false, json!(e)),
                }
            }

            let report = json!({ "mu": mu, "pass": pass, "checks": checks });
            output.emit(&report, || {
                let mut out = String::new();
                for c in report["checks"].as_array().unwrap() {
                    out.push_str(&format!(
                        "{} {}: {}\n",
                        c["name"].as_str().unwrap(),
                        c["side"].as_str().unwrap(),
                        if c["pass"].as_bool().unwrap() { "ok" } else { "FAIL" }
                    ));
                }
                out.push_str(&format!("mu-check: {}\n", if pass { "ok" } else { "FAIL" }));
                out
            })?;
            Ok(if pass { 0 } else { 1 })
        }

        Commands::Poly { a, b, arity, limit, xi, pp, faces, mu, caps, output } => {
            let sa = load_structure(&a)?;
            let sb = load_structure(&b)?;
            let caps = caps.caps();
            let cutoff = limit.unwrap_or(caps.commutation_enum_limit);
            let (polys, exhaustive) =
                enumerate_polymorphisms(&sa, &sb, arity, caps.power, Some(cutoff))
                    .map_err(|e| e.to_string())?;
            let tables: Vec<&Vec<usize>> = polys.iter().take(8).map(|f| &f.table).collect();

            let xi_records: Option<Vec<Value>> = if xi {
                let pp = pp.as_deref().ok_or("--xi needs --pp to build the cycle")?;
                let mode = face_mode(&faces)?;
                let h_a = build_side(&sa, pp, &mode, &caps)?;
                let h_b = build_side(&sb, pp, &mode, &caps)?;
                let mu_a = mu_action(&mu, "a", &h_a)?;
                let tree_a = build_spanning_tree(&h_a, 0);
                let mc = build_mu_cycle(&h_a, &tree_a, &mu_a, None).map_err(|e| e.to_string())?;
                let tree_b = build_spanning_tree(&h_b, 0);
                let basis_b = free_basis(&h_b, &tree_b).map_err(|e| e.to_string())?;
                let ctx = XiContext {
                    h_a: &h_a,
                    h_b: &h_b,
                    tree_b: &tree_b,
                    basis_b: &basis_b,
                    cycle_a: &mc.cycle,
                };
                let mut records = Vec::new();
                for (i, f) in polys.iter().enumerate() {
                    let words = ctx.xi(f).map_err(|e| format!("operation {i}: {e}"))?;
                    let st = analyze_xi_structure(&words);
                    records.push(json!({
                        "poly": i,
                        "slots": words.iter().map(|w| w.render()).collect::<Vec<_>>(),
                        "root": st.root,
                        "exponents": st.exponents,
                        "essential": st.essential(),
                    }));
                }
                Some(records)
            } else {
                None
            };

            let report = json!({
                "a": sa.name,
                "b": sb.name,
                "arity": arity,
                "count": polys.len(),
                "exhaustive": exhaustive,
                "tables": tables,
                "xi": xi_records,
            });
            output.emit(&report, || {
                let mut out = format!(
                    "{} operations of arity {} ({})\n",
                    polys.len(),
                    arity,
                    if exhaustive { "exhaustive" } else { "cut off" }
                );
                if let Some(recs) = report["xi"].as_array() {
                    for r in recs {
                        out.push_str(&format!(
                            "poly {} winds {} root {}\n",
                            r["poly"],
                            r["exponents"],
                            r["root"].as_str().unwrap_or("-")
                        ));
                    }
                }
                out
            })?;
            Ok(0)
        }

        Commands::Certify { a, b, pp, faces, faces_a, faces_b, mu, check, caps, output } => {
            let sa = load_structure(&a)?;
            let sb = load_structure(&b)?;
            let caps = caps.caps();
            let phi = parse_pp_formula(&pp).map_err(|e| e.to_string())?;
            let mode_a = face_mode(faces_a.as_deref().unwrap_or(&faces))?;
            let mode_b = face_mode(faces_b.as_deref().unwrap_or(&faces))?;
            let spec = if mu == "shift" {
                MuSpec::CyclicShift
            } else {
                // Index permutations refer to each side's own complex.
                let h_a = build_side(&sa, &pp, &mode_a, &caps)?;
                let h_b = build_side(&sb, &pp, &mode_b, &caps)?;
                mu_spec(&mu, &h_a, &h_b)?
            };
            let input = TemplateInput {
                a: sa,
                b: sb,
                phi,
                faces_a: mode_a,
                faces_b: mode_b,
                mu: spec,
            };
            let cert = certify(&input, &caps);
            let bytes = certificate_json(&cert);

            if let Some(prior_path) = check {
                let prior = fs::read_to_string(&prior_path)
                    .map_err(|e| format!("cannot read {}: {e}", prior_path.display()))?;
                let ok = prior == bytes;
                let report = json!({ "check": if ok { "ok" } else { "mismatch" } });
                output.emit(&report, || {
                    if ok {
                        "check ok: stored certificate replays byte-identically\n".into()
                    } else {
                        "check FAILED: stored certificate differs from replay\n".into()
                    }
                })?;
                return Ok(if ok { 0 } else { 1 });
            }

            match output.format {
                Format::Json => output.write(&bytes)?,
                Format::Text => output.write(&render_text(&cert))?,
            }
            Ok(if cert.verdict == Verdict::NpHard { 0 } else { 1 })
        }

        Commands::Suite { caps, output } => {
            let report = run_suite(&caps.caps());
            let value = serde_json::to_value(&report).expect("suite reports serialize");
            output.emit(&value, || render_suite(&report))?;
            Ok(if report.all_match { 0 } else { 1 })
        }
    }
}
