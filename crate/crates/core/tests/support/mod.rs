//! Independent oracles for cross-checking the library: small-scale brute
//! force implementations that share no code with the algorithms under test.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use pcsp_ep_core::complexes::{Complex, Cycle, FaceMode};
use pcsp_ep_core::corpus;
use pcsp_ep_core::groups::{Letter, Word};
use pcsp_ep_core::structures::{
    parse_pp_formula, parse_structure, Homomorphism, PpAtom, PpFormula, RelationalStructure,
    Tuple,
};

pub fn structure(name: &str) -> RelationalStructure {
    parse_structure(corpus::get(name).expect("bundled structure")).expect("bundled parse")
}

pub fn box_complex(name: &str, pp: &str) -> Complex {
    let s = structure(name);
    let phi = parse_pp_formula(pp).unwrap();
    let rel = pcsp_ep_core::structures::eval_pp_formula(&phi, &s, 10_000_000).unwrap();
    pcsp_ep_core::complexes::build_complex(&rel, &FaceMode::Box, 100_000_000).unwrap()
}

/// Every map A -> B, kept when it validates as a homomorphism. Exponential
/// in |A|; guarded so misuse fails loudly.
pub fn brute_homomorphisms(a: &RelationalStructure, b: &RelationalStructure) -> Vec<Vec<usize>> {
    let (n, m) = (a.size(), b.size());
    assert!(
        (m as f64).powi(n as i32) <= 4_000_000.0,
        "brute force hom space too large"
    );
    let mut out = Vec::new();
    let mut map = vec![0usize; n];
    loop {
        if (Homomorphism { map: map.clone() }).validate(a, b).is_ok() {
            out.push(map.clone());
        }
        let mut i = 0;
        loop {
            if i == n {
                out.sort();
                return out;
            }
            map[i] += 1;
            if map[i] < m {
                break;
            }
            map[i] = 0;
            i += 1;
        }
    }
}

/// Evaluate a pp-formula by trying every assignment of every variable.
pub fn brute_eval_pp(phi: &PpFormula, s: &RelationalStructure) -> Vec<Tuple> {
    let vars: Vec<&String> = phi.free_vars.iter().chain(&phi.bound_vars).collect();
    let d = s.size();
    assert!(
        (d as f64).powi(vars.len() as i32) <= 4_000_000.0,
        "brute force assignment space too large"
    );
    let value = |assign: &[usize], v: &str| -> usize {
        assign[vars.iter().position(|w| *w == v).unwrap()]
    };
    let mut rows = BTreeSet::new();
    let mut assign = vec![0usize; vars.len()];
    loop {
        let holds = phi.atoms.iter().all(|atom| match atom {
            PpAtom::Rel { name, args } => {
                let t: Tuple = args.iter().map(|v| value(&assign, v)).collect();
                s.relation(name).is_some_and(|r| r.contains(&t))
            }
            PpAtom::Eq { left, right } => value(&assign, left) == value(&assign, right),
        });
        if holds {
            rows.insert(
                phi.free_vars.iter().map(|v| value(&assign, v)).collect::<Tuple>(),
            );
        }
        let mut i = 0;
        loop {
            if i == assign.len() {
                return rows.into_iter().collect();
            }
            assign[i] += 1;
            if assign[i] < d {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
    }
}

/// Maximal boxes inside a relation by exhausting all products of non-empty
/// subsets of the per-coordinate value sets. Returns sorted vertex sets.
pub fn brute_maximal_boxes(tuples: &[Tuple], arity: usize) -> Vec<Vec<Tuple>> {
    let inside: HashSet<&Tuple> = tuples.iter().collect();
    let columns: Vec<Vec<usize>> = (0..arity)
        .map(|i| {
            let mut vals: Vec<usize> = tuples.iter().map(|t| t[i]).collect();
            vals.sort_unstable();
            vals.dedup();
            vals
        })
        .collect();
    let space: f64 = columns.iter().map(|c| (1u64 << c.len()) as f64).product();
    assert!(space <= 4_000_000.0, "brute force box space too large");

    let mut boxes: Vec<Vec<Tuple>> = Vec::new();
    let mut masks = vec![1usize; arity];
    'outer: loop {
        let picks: Vec<Vec<usize>> = (0..arity)
            .map(|i| {
                columns[i]
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| masks[i] >> j & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect();
        let mut product = vec![Vec::new()];
        for p in &picks {
            let mut next = Vec::new();
            for t in &product {
                for &v in p {
                    let mut t2: Tuple = t.clone();
                    t2.push(v);
                    next.push(t2);
                }
            }
            product = next;
        }
        if product.iter().all(|t| inside.contains(t)) {
            product.sort();
            boxes.push(product);
        }
        let mut i = 0;
        loop {
            if i == arity {
                break 'outer;
            }
            masks[i] += 1;
            if masks[i] < 1 << columns[i].len() {
                break;
            }
            masks[i] = 1;
            i += 1;
        }
    }
    let maximal: Vec<Vec<Tuple>> = boxes
        .iter()
        .filter(|b| {
            !boxes.iter().any(|other| {
                other.len() > b.len() && b.iter().all(|t| other.binary_search(t).is_ok())
            })
        })
        .cloned()
        .collect();
    let mut out: Vec<Vec<Tuple>> = maximal;
    out.sort();
    out.dedup();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomotopyVerdict {
    Contractible,
    NotContractible,
    /// The length cap truncated the search before it could exhaust.
    Inconclusive,
}

fn normalize_walk(walk: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(walk.len());
    for &v in walk {
        if out.last() != Some(&v) {
            out.push(v);
        }
    }
    out
}

fn common_face(h: &Complex, mut verts: Vec<usize>) -> bool {
    verts.sort_unstable();
    verts.dedup();
    h.faces.iter().any(|f| verts.iter().all(|v| f.binary_search(v).is_ok()))
}

/// Remove immediate backtracks [u, w, u] -> [u] until none remain. The
/// result is the unique reduced representative of the walk.
pub fn spike_reduce(walk: &[usize]) -> Vec<usize> {
    let mut w = normalize_walk(walk);
    loop {
        let Some(i) = (0..w.len().saturating_sub(2)).find(|&i| w[i] == w[i + 2]) else {
            break;
        };
        w.drain(i + 1..i + 3);
    }
    w
}

/// Exact null-homotopy decision for complexes whose faces all have at most
/// two vertices: the walk contracts iff spike removal kills it. Returns
/// None when a larger face makes triangle moves possible.
pub fn graph_null_homotopy(h: &Complex, cycle: &Cycle) -> Option<bool> {
    if h.faces.iter().any(|f| f.len() > 2) {
        return None;
    }
    let reduced = spike_reduce(&cycle.0);
    Some(reduced.len() == 1)
}

/// Decide null-homotopy of a closed walk by breadth-first search over
/// elementary moves: spike insertion/removal and triangle exchanges inside
/// a common face, with walk length capped at `cap` edges.
pub fn bfs_null_homotopy(h: &Complex, cycle: &Cycle, cap: usize) -> HomotopyVerdict {
    let start = normalize_walk(&cycle.0);
    let base = start[0];
    assert_eq!(*start.last().unwrap(), base, "walk must be closed");
    let goal = vec![base];
    if start == goal {
        return HomotopyVerdict::Contractible;
    }
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut queue: VecDeque<Vec<usize>> = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    let mut truncated = false;
    while let Some(w) = queue.pop_front() {
        let k = w.len() - 1;
        let push = |next: Vec<usize>, seen: &mut HashSet<Vec<usize>>,
                        queue: &mut VecDeque<Vec<usize>>,
                        truncated: &mut bool| {
            let next = normalize_walk(&next);
            if next.len() - 1 > cap {
                *truncated = true;
                return false;
            }
            if next == goal {
                return true;
            }
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
            false
        };
        // Spike removal u,w,u -> u and triangle contraction u,v,w -> u,w.
        for i in 1..k {
            if w[i - 1] == w[i + 1] {
                let mut next = w.clone();
                next.drain(i..i + 2);
                if push(next, &mut seen, &mut queue, &mut truncated) {
                    return HomotopyVerdict::Contractible;
                }
            } else if common_face(h, vec![w[i - 1], w[i], w[i + 1]]) {
                let mut next = w.clone();
                next.remove(i);
                if push(next, &mut seen, &mut queue, &mut truncated) {
                    return HomotopyVerdict::Contractible;
                }
            }
        }
        // Triangle expansion u,w -> u,v,w for v sharing a face with both.
        for i in 0..k {
            for v in 0..h.vertex_count() {
                if v != w[i]
                    && v != w[i + 1]
                    && common_face(h, vec![w[i], v, w[i + 1]])
                {
                    let mut next = w.clone();
                    next.insert(i + 1, v);
                    if push(next, &mut seen, &mut queue, &mut truncated) {
                        return HomotopyVerdict::Contractible;
                    }
                }
            }
        }
        // Spike insertion u -> u,v,u for any neighbor v.
        for i in 0..=k {
            for &v in &h.adj[w[i]] {
                let mut next = w.clone();
                next.insert(i + 1, v);
                next.insert(i + 2, w[i]);
                if push(next, &mut seen, &mut queue, &mut truncated) {
                    return HomotopyVerdict::Contractible;
                }
            }
        }
    }
    if truncated {
        HomotopyVerdict::Inconclusive
    } else {
        HomotopyVerdict::NotContractible
    }
}

/// Free rank of a connected complex whose faces pairwise share at most one
/// vertex, from the Euler characteristic of the vertex-face incidence graph
/// (which the complex deformation-retracts to in that case).
pub fn incidence_rank(h: &Complex) -> usize {
    let incidences: usize = h.faces.iter().map(|f| f.len()).sum();
    let nodes = h.vertex_count() + h.faces.len();
    incidences + 1 - nodes
}

/// Primitive root by exhausting conjugating prefixes and periods: the root
/// with the largest exponent wins, and it must be unique.
pub fn brute_primitive_root(w: &Word) -> (Word, u32) {
    let w = w.reduced();
    assert!(!w.is_identity(), "identity has no primitive root");
    let mut best: Option<(Word, u32)> = None;
    for p in 0..=w.0.len() / 2 {
        let y = Word(w.0[..p].to_vec());
        let core = y.inverse().concat(&w).concat(&y).reduced();
        if core.is_identity() || core.0.len() != w.0.len() - 2 * p {
            continue;
        }
        if core.0.first().copied() == core.0.last().map(|l| l.inverse()) {
            continue;
        }
        let m = core.0.len();
        for d in 1..=m {
            if m % d != 0 {
                continue;
            }
            let seed = Word(core.0[..d].to_vec());
            if seed.pow((m / d) as i64) == core {
                let root = y.concat(&seed).concat(&y.inverse()).reduced();
                let k = (m / d) as u32;
                match &best {
                    Some((r, kb)) if *kb >= k => {
                        if *kb == k {
                            assert_eq!(*r, root, "primitive root must be unique");
                        }
                    }
                    _ => best = Some((root, k)),
                }
            }
        }
    }
    best.expect("reduced nonidentity word always has a root")
}

/// All fully reduced words reachable by cancelling adjacent inverse pairs
/// in every possible order. Confluence means the set is a singleton.
pub fn reduce_all_orders(w: &Word) -> BTreeSet<Vec<Letter>> {
    let mut cancels = Vec::new();
    for i in 0..w.0.len().saturating_sub(1) {
        if w.0[i + 1] == w.0[i].inverse() {
            cancels.push(i);
        }
    }
    if cancels.is_empty() {
        return BTreeSet::from([w.0.clone()]);
    }
    let mut out = BTreeSet::new();
    for i in cancels {
        let mut next = w.0.clone();
        next.drain(i..i + 2);
        out.extend(reduce_all_orders(&Word(next)));
    }
    out
}
