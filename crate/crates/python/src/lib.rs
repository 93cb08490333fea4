//! Python bindings. Structures are a small wrapper class; reports and
//! certificates cross the boundary as JSON strings so Python sees exactly
//! what the CLI emits.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::json;

use pcsp_ep_core::certifier::{
    certificate_json, certify as run_certify, run_suite as run_bundled_suite, Caps, MuSpec,
    TemplateInput,
};
use pcsp_ep_core::complexes::{
    build_complex, build_spanning_tree, is_connected, max_pairwise_face_overlap, Complex, FaceMode,
};
use pcsp_ep_core::groups::{build_presentation, free_basis, Letter, Word};
use pcsp_ep_core::polymorphisms::enumerate_polymorphisms;
use pcsp_ep_core::structures::{
    eval_pp_formula, parse_pp_formula, parse_structure, serialize_structure, RelationalStructure,
};

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A finite relational structure: named domain elements plus relations.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct Structure {
    inner: RelationalStructure,
}

#[pymethods]
impl Structure {
    /// Parse the line-oriented structure format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Structure { inner: parse_structure(text).map_err(value_err)? })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn domain(&self) -> Vec<String> {
        self.inner.domain.clone()
    }

    fn size(&self) -> usize {
        self.inner.size()
    }

    /// (name, arity, tuples) for every relation, tuples as element indices.
    fn relations(&self) -> Vec<(String, usize, Vec<Vec<usize>>)> {
        self.inner
            .relations
            .iter()
            .map(|r| (r.name.clone(), r.arity, r.tuples.clone()))
            .collect()
    }

    /// Canonical file form; `parse` of the result gives back this structure.
    fn serialize(&self) -> String {
        serialize_structure(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Structure({}, {} elements, {} relations)",
            self.inner.name,
            self.inner.size(),
            self.inner.relations.len()
        )
    }
}

fn face_mode(custom: Option<Vec<Vec<usize>>>) -> FaceMode {
    match custom {
        Some(faces) => FaceMode::Custom(faces),
        None => FaceMode::Box,
    }
}

fn complex_of(s: &RelationalStructure, pp: &str, faces: &FaceMode) -> PyResult<Complex> {
    let phi = parse_pp_formula(pp).map_err(value_err)?;
    let rel = eval_pp_formula(&phi, s, Caps::default().pp_budget).map_err(value_err)?;
    build_complex(&rel, faces, Caps::default().box_cost).map_err(value_err)
}

/// The relation a pp-formula defines on a structure, as index tuples.
#[pyfunction]
#[pyo3(signature = (s, pp, budget=10_000_000))]
fn eval_pp(s: &Structure, pp: &str, budget: u64) -> PyResult<Vec<Vec<usize>>> {
    let phi = parse_pp_formula(pp).map_err(value_err)?;
    Ok(eval_pp_formula(&phi, &s.inner, budget).map_err(value_err)?.tuples)
}

/// Certify a template NP-hard. Returns the certificate as a JSON string.
///
/// `mu_a`/`mu_b` are vertex-index permutations of each side's complex;
/// leave both unset for the coordinate shift.
#[pyfunction]
#[pyo3(signature = (
    a, b, pp, *,
    custom_faces_a=None, custom_faces_b=None, mu_a=None, mu_b=None,
    commutation_enum_limit=None, xi_enum_limit=None, threads=None,
))]
#[allow(clippy::too_many_arguments)]
fn certify(
    a: &Structure,
    b: &Structure,
    pp: &str,
    custom_faces_a: Option<Vec<Vec<usize>>>,
    custom_faces_b: Option<Vec<Vec<usize>>>,
    mu_a: Option<Vec<usize>>,
    mu_b: Option<Vec<usize>>,
    commutation_enum_limit: Option<usize>,
    xi_enum_limit: Option<usize>,
    threads: Option<usize>,
) -> PyResult<String> {
    let mut caps = Caps::default();
    if let Some(v) = commutation_enum_limit {
        caps.commutation_enum_limit = v;
    }
    if let Some(v) = xi_enum_limit {
        caps.xi_enum_limit = v;
    }
    if let Some(v) = threads {
        caps.threads = v;
    }
    let faces_a = face_mode(custom_faces_a);
    let faces_b = face_mode(custom_faces_b);
    let mu = match (mu_a, mu_b) {
        (None, None) => MuSpec::CyclicShift,
        (Some(pa), Some(pb)) => {
            let side = |s: &RelationalStructure,
                        faces: &FaceMode,
                        perm: Vec<usize>|
             -> PyResult<Vec<(Vec<usize>, Vec<usize>)>> {
                let h = complex_of(s, pp, faces)?;
                let n = h.vertex_count();
                if perm.len() != n || perm.iter().any(|&i| i >= n) {
                    return Err(PyValueError::new_err(format!(
                        "permutation must cover vertex indices 0..{n}"
                    )));
                }
                Ok(perm
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| (h.vertices[i].clone(), h.vertices[j].clone()))
                    .collect())
            };
            MuSpec::Custom {
                a_map: side(&a.inner, &faces_a, pa)?,
                b_map: side(&b.inner, &faces_b, pb)?,
            }
        }
        _ => return Err(PyValueError::new_err("give both mu_a and mu_b, or neither")),
    };
    let input = TemplateInput {
        a: a.inner.clone(),
        b: b.inner.clone(),
        phi: parse_pp_formula(pp).map_err(value_err)?,
        faces_a,
        faces_b,
        mu,
    };
    Ok(certificate_json(&run_certify(&input, &caps)))
}

/// Run the bundled template suite; returns the report as a JSON string.
#[pyfunction]
fn run_suite() -> String {
    let report = run_bundled_suite(&Caps::default());
    let mut s = serde_json::to_string_pretty(&report).expect("suite reports serialize");
    s.push('\n');
    s
}

/// Vertex, edge, face and overlap statistics of the complex, as JSON.
#[pyfunction]
#[pyo3(signature = (s, pp, custom_faces=None))]
fn complex_report(s: &Structure, pp: &str, custom_faces: Option<Vec<Vec<usize>>>) -> PyResult<String> {
    let h = complex_of(&s.inner, pp, &face_mode(custom_faces))?;
    let overlap = max_pairwise_face_overlap(&h);
    let report = json!({
        "structure": s.inner.name,
        "pp": pp,
        "vertices": h.vertex_count(),
        "edges": h.edges.len(),
        "faces": h.faces.len(),
        "max_face_size": h.faces.iter().map(|f| f.len()).max().unwrap_or(0),
        "max_overlap": overlap.max,
        "connected": is_connected(&h),
    });
    Ok(report.to_string())
}

/// Presentation, freeness and rank of the edge-path group, as JSON.
#[pyfunction]
#[pyo3(signature = (s, pp, custom_faces=None))]
fn group_report(s: &Structure, pp: &str, custom_faces: Option<Vec<Vec<usize>>>) -> PyResult<String> {
    let h = complex_of(&s.inner, pp, &face_mode(custom_faces))?;
    let tree = build_spanning_tree(&h, 0);
    let pres = build_presentation(&h, &tree);
    let (free, rank) = match free_basis(&h, &tree) {
        Ok(fb) => (true, Some(fb.rank())),
        Err(_) => (false, None),
    };
    let report = json!({
        "structure": s.inner.name,
        "pp": pp,
        "vertices": h.vertex_count(),
        "edges": h.edges.len(),
        "faces": h.faces.len(),
        "free": free,
        "rank": rank,
        "presentation": pres.render_text(&h),
    });
    Ok(report.to_string())
}

fn to_word(letters: Vec<(usize, bool)>) -> Word {
    Word(letters.into_iter().map(|(edge, inv)| Letter { edge, inv }).collect())
}

fn from_word(w: &Word) -> Vec<(usize, bool)> {
    w.0.iter().map(|l| (l.edge, l.inv)).collect()
}

/// Freely reduce a word over oriented edges, given as (edge, inverted) pairs.
#[pyfunction]
fn free_reduce(letters: Vec<(usize, bool)>) -> Vec<(usize, bool)> {
    from_word(&to_word(letters).reduced())
}

/// Primitive root of a word: the pair (root, exponent) with maximal exponent.
#[pyfunction]
fn primitive_root(letters: Vec<(usize, bool)>) -> PyResult<(Vec<(usize, bool)>, u32)> {
    let (root, k) = pcsp_ep_core::groups::primitive_root(&to_word(letters)).map_err(value_err)?;
    Ok((from_word(&root), k))
}

/// Enumerate polymorphisms as flat value tables; returns (tables, exhaustive).
#[pyfunction]
#[pyo3(signature = (a, b, arity, limit=None))]
fn polymorphisms(
    a: &Structure,
    b: &Structure,
    arity: usize,
    limit: Option<usize>,
) -> PyResult<(Vec<Vec<usize>>, bool)> {
    let caps = Caps::default();
    let cutoff = limit.unwrap_or(caps.commutation_enum_limit);
    let (polys, exhaustive) =
        enumerate_polymorphisms(&a.inner, &b.inner, arity, caps.power, Some(cutoff))
            .map_err(value_err)?;
    Ok((polys.into_iter().map(|f| f.table).collect(), exhaustive))
}

#[pymodule]
fn pcsp_ep(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Structure>()?;
    m.add_function(wrap_pyfunction!(eval_pp, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(complex_report, m)?)?;
    m.add_function(wrap_pyfunction!(group_report, m)?)?;
    m.add_function(wrap_pyfunction!(free_reduce, m)?)?;
    m.add_function(wrap_pyfunction!(primitive_root, m)?)?;
    m.add_function(wrap_pyfunction!(polymorphisms, m)?)?;
    Ok(())
}
