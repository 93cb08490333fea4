//! The edge-path group of a complex and its free-group calculus.
//!
//! Fix a complex H, a base vertex t1, and a BFS spanning tree T of its
//! component. The group is presented on the oriented edges of the
//! component with three relation families: tree edges are trivial, loops
//! (t t) are trivial, and (t1 t2)(t2 t3)(t3 t1) is trivial whenever the
//! three vertices share a face. Based cycles map onto the group by reading
//! off their steps, and the map is invertible by splicing tree paths.
//!
//! When any two maximal faces share at most one vertex the group is free.
//! A basis is built by completing, inside each maximal face, the global
//! tree edges to a spanning tree of the face; the face edges added this
//! way are the free generators, and every oriented edge rewrites to the
//! word its endpoints trace through the face tree (tree letters vanish).
//! Null-homotopy of a cycle is then decided by free reduction.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::complexes::{max_pairwise_face_overlap, Complex, Cycle, SpanningTree};

/// One oriented edge: the canonical edge id plus a direction flag.
/// `inv == false` traverses from the smaller vertex id to the larger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub edge: usize,
    pub inv: bool,
}

impl Letter {
    pub fn inverse(self) -> Letter {
        Letter { edge: self.edge, inv: !self.inv }
    }
}

/// A word over oriented edges; the identity is the empty word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Cancel adjacent inverse pairs until none remain. The result is the
    /// unique reduced form regardless of cancellation order.
    pub fn reduced(&self) -> Word {
        let mut stack: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if stack.last() == Some(&l.inverse()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Word(stack)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// self^k, reduced. Negative k uses the inverse.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base).reduced();
        }
        out
    }

    pub fn render(&self) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        self.0
            .iter()
            .map(|l| if l.inv { format!("e{}^-1", l.edge) } else { format!("e{}", l.edge) })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Reduced uv * vu^-1 test: words commute iff their commutator reduces to 1.
pub fn commutes(u: &Word, v: &Word) -> bool {
    u.concat(v).concat(&u.inverse()).concat(&v.inverse()).reduced().is_identity()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("cycle is based at {got}, the presentation root is {want}")]
    BaseMismatch { got: usize, want: usize },
    #[error("cycle step {u} -> {v} is not an edge of the complex")]
    NotAnEdge { u: usize, v: usize },
    #[error("vertex {0} is outside the root component")]
    OutsideComponent(usize),
    #[error("the group is not known to be free: maximal faces {f1} and {f2} share {size} vertices")]
    NotFree { f1: usize, f2: usize, size: usize },
    #[error("edge {edge} lies in {count} maximal faces; face data is inconsistent")]
    AmbiguousEdgeFace { edge: usize, count: usize },
    #[error("the empty word has no primitive root")]
    EmptyWord,
}

/// Read a based cycle off as a word: one letter per step, loops skipped
/// (a loop letter is trivial in the group).
pub fn rho(h: &Complex, tree: &SpanningTree, cycle: &Cycle) -> Result<Word, GroupError> {
    if cycle.base() != tree.root {
        return Err(GroupError::BaseMismatch { got: cycle.base(), want: tree.root });
    }
    let mut letters = Vec::new();
    for w in cycle.0.windows(2) {
        let (u, v) = (w[0], w[1]);
        if u == v {
            continue;
        }
        let edge = h.edge_id(u, v).ok_or(GroupError::NotAnEdge { u, v })?;
        letters.push(Letter { edge, inv: u > v });
    }
    Ok(Word(letters))
}

/// Rebuild a based cycle from a word by walking each letter's edge and
/// splicing the unique tree paths between consecutive letters (and to and
/// from the root). The empty word becomes the null cycle at the root.
pub fn gamma(h: &Complex, tree: &SpanningTree, word: &Word) -> Cycle {
    if word.is_empty() {
        return Cycle::null(tree.root);
    }
    let endpoints = |l: &Letter| {
        let (a, b) = h.edges[l.edge];
        if l.inv {
            (b, a)
        } else {
            (a, b)
        }
    };
    let mut seq: Vec<usize> = Vec::new();
    let (first, _) = endpoints(&word.0[0]);
    seq.extend(tree.path(tree.root, first));
    for (i, l) in word.0.iter().enumerate() {
        let (from, to) = endpoints(l);
        debug_assert_eq!(*seq.last().unwrap(), from);
        seq.push(to);
        let next_start = if i + 1 < word.len() {
            endpoints(&word.0[i + 1]).0
        } else {
            tree.root
        };
        let bridge = tree.path(to, next_start);
        seq.extend_from_slice(&bridge[1..]);
    }
    Cycle(seq)
}

/// The three relation families of the edge-path presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub root: usize,
    /// Vertices of the root component, sorted.
    pub component: Vec<usize>,
    /// Canonical edge ids with both ends in the component.
    pub generators: Vec<usize>,
    /// Tree-edge relations: each listed generator is trivial.
    pub tree_trivial: Vec<usize>,
    /// Loop relations, one per spanned vertex.
    pub loop_trivial: Vec<usize>,
    /// Face-triangle relations as vertex triples u < v < w sharing a face;
    /// the relation word is (uv)(vw)(wu).
    pub triangles: Vec<(usize, usize, usize)>,
}

impl Presentation {
    pub fn oriented_generator_count(&self) -> usize {
        2 * self.generators.len()
    }

    pub fn tree_trivial_oriented_count(&self) -> usize {
        2 * self.tree_trivial.len()
    }

    /// Plain text export: one generator or relation per line. Relation
    /// words equal the identity.
    pub fn render_text(&self, h: &Complex) -> String {
        let mut out = String::new();
        out.push_str(&format!("presentation root v{}\n", self.root));
        out.push_str(&format!("generators {}\n", self.generators.len()));
        for &e in &self.generators {
            let (u, v) = h.edges[e];
            out.push_str(&format!("gen e{e} v{u} v{v}\n"));
        }
        out.push_str("relations\n");
        for &e in &self.tree_trivial {
            out.push_str(&format!("tree e{e}\n"));
        }
        for &t in &self.loop_trivial {
            out.push_str(&format!("loop v{t}\n"));
        }
        for &(u, v, w) in &self.triangles {
            let word = Word(vec![
                letter_for(h, u, v),
                letter_for(h, v, w),
                letter_for(h, w, u),
            ]);
            out.push_str(&format!("face v{u} v{v} v{w}: {}\n", word.render()));
        }
        out.push_str("end\n");
        out
    }
}

fn letter_for(h: &Complex, u: usize, v: usize) -> Letter {
    let edge = h.edge_id(u, v).expect("triangle edge must exist");
    Letter { edge, inv: u > v }
}

/// Enumerate the presentation of the edge-path group for the component of
/// the tree root.
pub fn build_presentation(h: &Complex, tree: &SpanningTree) -> Presentation {
    let component: Vec<usize> =
        (0..h.vertex_count()).filter(|&v| tree.in_component[v]).collect();
    let generators: Vec<usize> = h
        .edges
        .iter()
        .enumerate()
        .filter(|(_, &(u, v))| tree.in_component[u] && tree.in_component[v])
        .map(|(i, _)| i)
        .collect();
    let tree_trivial: Vec<usize> = generators
        .iter()
        .copied()
        .filter(|&e| {
            let (u, v) = h.edges[e];
            tree.is_tree_edge(u, v)
        })
        .collect();
    let mut triangles: Vec<(usize, usize, usize)> = Vec::new();
    for face in &h.faces {
        if !tree.in_component[face[0]] {
            continue;
        }
        for i in 0..face.len() {
            for j in i + 1..face.len() {
                for k in j + 1..face.len() {
                    triangles.push((face[i], face[j], face[k]));
                }
            }
        }
    }
    triangles.sort_unstable();
    triangles.dedup();
    Presentation {
        root: tree.root,
        loop_trivial: component.clone(),
        component,
        generators,
        tree_trivial,
        triangles,
    }
}

/// Free basis data for a complex whose maximal faces pairwise share at
/// most one vertex.
#[derive(Debug, Clone)]
pub struct FreeBasis {
    /// Edge ids of the free generators, sorted.
    pub basis: Vec<usize>,
    /// The unique maximal face of each edge (root component edges only).
    edge_face: Vec<Option<usize>>,
    /// Per edge: is it a global tree edge?
    global_tree_edge: Vec<bool>,
    /// Per face: parent array of the face spanning tree, keyed by vertex.
    face_parent: Vec<HashMap<usize, Option<usize>>>,
    face_depth: Vec<HashMap<usize, usize>>,
}

impl FreeBasis {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// The path u -> v inside the spanning tree of face `f` (inclusive).
    fn face_path(&self, f: usize, u: usize, v: usize) -> Vec<usize> {
        let parent = &self.face_parent[f];
        let depth = &self.face_depth[f];
        let (mut x, mut y) = (u, v);
        let mut front = vec![x];
        let mut back = vec![y];
        while depth[&x] > depth[&y] {
            x = parent[&x].unwrap();
            front.push(x);
        }
        while depth[&y] > depth[&x] {
            y = parent[&y].unwrap();
            back.push(y);
        }
        while x != y {
            x = parent[&x].unwrap();
            front.push(x);
            y = parent[&y].unwrap();
            back.push(y);
        }
        back.pop();
        back.reverse();
        front.extend(back);
        front
    }
}

/// Build the free basis: inside each maximal face, seed with the global
/// tree edges lying in the face and complete to a spanning tree of the
/// face by adding face edges in canonical order; the added edges are the
/// free generators.
pub fn free_basis(h: &Complex, tree: &SpanningTree) -> Result<FreeBasis, GroupError> {
    let overlap = max_pairwise_face_overlap(h);
    if overlap.max > 1 {
        let (f1, f2) = overlap.witness.unwrap();
        return Err(GroupError::NotFree { f1, f2, size: overlap.max });
    }

    let mut edge_face: Vec<Option<usize>> = vec![None; h.edges.len()];
    for (e, faces) in h.edge_faces.iter().enumerate() {
        let (u, v) = h.edges[e];
        if !tree.in_component[u] || !tree.in_component[v] {
            continue;
        }
        if faces.len() != 1 {
            return Err(GroupError::AmbiguousEdgeFace { edge: e, count: faces.len() });
        }
        edge_face[e] = Some(faces[0]);
    }

    let global_tree_edge: Vec<bool> = h
        .edges
        .iter()
        .map(|&(u, v)| tree.in_component[u] && tree.is_tree_edge(u, v))
        .collect();

    let mut basis: Vec<usize> = Vec::new();
    let mut face_tree_adj: Vec<HashMap<usize, Vec<usize>>> = vec![HashMap::new(); h.faces.len()];
    for (fi, face) in h.faces.iter().enumerate() {
        if !tree.in_component[face[0]] {
            continue;
        }
        // Union-find over face vertices, seeded with global tree edges.
        let mut comp: HashMap<usize, usize> = face.iter().map(|&v| (v, v)).collect();
        fn find(comp: &mut HashMap<usize, usize>, v: usize) -> usize {
            let p = comp[&v];
            if p == v {
                v
            } else {
                let r = find(comp, p);
                comp.insert(v, r);
                r
            }
        }
        let add_edge = |adj: &mut HashMap<usize, Vec<usize>>, u: usize, v: usize| {
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
        };
        for i in 0..face.len() {
            for j in i + 1..face.len() {
                let (u, v) = (face[i], face[j]);
                if tree.is_tree_edge(u, v) {
                    let (ru, rv) = (find(&mut comp, u), find(&mut comp, v));
                    debug_assert_ne!(ru, rv, "global tree edges inside a face are acyclic");
                    comp.insert(ru.max(rv), ru.min(rv));
                    add_edge(&mut face_tree_adj[fi], u, v);
                }
            }
        }
        // Complete with face edges in canonical vertex order.
        for i in 0..face.len() {
            for j in i + 1..face.len() {
                let (u, v) = (face[i], face[j]);
                let (ru, rv) = (find(&mut comp, u), find(&mut comp, v));
                if ru != rv {
                    comp.insert(ru.max(rv), ru.min(rv));
                    add_edge(&mut face_tree_adj[fi], u, v);
                    basis.push(h.edge_id(u, v).expect("face pair is an edge"));
                }
            }
        }
    }
    basis.sort_unstable();

    // Root each face tree at the face's first vertex for path queries.
    let mut face_parent: Vec<HashMap<usize, Option<usize>>> = Vec::with_capacity(h.faces.len());
    let mut face_depth: Vec<HashMap<usize, usize>> = Vec::with_capacity(h.faces.len());
    for (fi, face) in h.faces.iter().enumerate() {
        let mut parent: HashMap<usize, Option<usize>> = HashMap::new();
        let mut depth: HashMap<usize, usize> = HashMap::new();
        if tree.in_component[face[0]] {
            let root = face[0];
            parent.insert(root, None);
            depth.insert(root, 0);
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                let mut nbrs = face_tree_adj[fi].get(&u).cloned().unwrap_or_default();
                nbrs.sort_unstable();
                for v in nbrs {
                    if !parent.contains_key(&v) {
                        parent.insert(v, Some(u));
                        depth.insert(v, depth[&u] + 1);
                        queue.push_back(v);
                    }
                }
            }
            debug_assert_eq!(parent.len(), face.len(), "face tree spans the face");
        }
        face_parent.push(parent);
        face_depth.push(depth);
    }

    Ok(FreeBasis { basis, edge_face, global_tree_edge, face_parent, face_depth })
}

impl FreeBasis {
    /// Rewrite a word over oriented edges into the free basis: each letter
    /// becomes the trace of its endpoints through its face's spanning
    /// tree, global tree letters vanish, and the result is reduced.
    pub fn eta(&self, h: &Complex, word: &Word) -> Result<Word, GroupError> {
        let mut out: Vec<Letter> = Vec::new();
        for &l in &word.0 {
            let (a, b) = h.edges[l.edge];
            let (from, to) = if l.inv { (b, a) } else { (a, b) };
            let f = self.edge_face[l.edge].ok_or(GroupError::OutsideComponent(a))?;
            let path = self.face_path(f, from, to);
            for w in path.windows(2) {
                let (x, y) = (w[0], w[1]);
                let e = h.edge_id(x, y).expect("face tree step is an edge");
                if self.global_tree_edge[e] {
                    continue;
                }
                let letter = Letter { edge: e, inv: x > y };
                if out.last() == Some(&letter.inverse()) {
                    out.pop();
                } else {
                    out.push(letter);
                }
            }
        }
        Ok(Word(out))
    }
}

/// Decide null-homotopy of a based cycle by rewriting into the free basis
/// and reducing. Requires the free case (pairwise face overlap at most 1).
pub fn is_null_homotopic(
    h: &Complex,
    tree: &SpanningTree,
    basis: &FreeBasis,
    cycle: &Cycle,
) -> Result<bool, GroupError> {
    let word = rho(h, tree, cycle)?;
    Ok(basis.eta(h, &word)?.is_identity())
}

/// Decompose a reduced word as y s'^k y^-1 with s' cyclically reduced and
/// k maximal; the primitive root is y s' y^-1.
///
/// Returns the root and the exponent k >= 1.
pub fn primitive_root(w: &Word) -> Result<(Word, u32), GroupError> {
    let w = w.reduced();
    if w.is_empty() {
        return Err(GroupError::EmptyWord);
    }
    // Strip the conjugating prefix: while the first letter inverts the
    // last, peel both.
    let mut y: Vec<Letter> = Vec::new();
    let mut core: &[Letter] = &w.0;
    while core.len() >= 2 && core[0] == core[core.len() - 1].inverse() {
        y.push(core[0]);
        core = &core[1..core.len() - 1];
    }
    debug_assert!(!core.is_empty(), "a reduced word cannot strip to nothing");
    // Smallest period d of the cyclically reduced core with d | len.
    let m = core.len();
    let mut d = m;
    for cand in 1..=m / 2 {
        if m % cand != 0 {
            continue;
        }
        if (cand..m).all(|i| core[i] == core[i - cand]) {
            d = cand;
            break;
        }
    }
    let k = (m / d) as u32;
    let mut root_letters = y.clone();
    root_letters.extend_from_slice(&core[..d]);
    root_letters.extend(y.iter().rev().map(|l| l.inverse()));
    let root = Word(root_letters);
    debug_assert_eq!(root.reduced(), root, "root is reduced by construction");
    debug_assert_eq!(root.pow(k as i64), w, "root^k rebuilds the word");
    Ok((root, k))
}

/// A common primitive root for a commuting family: root s and exponents
/// c_i with w_i = s^{c_i}. None when some pair fails to commute. If every
/// word is trivial the root is the empty word and all exponents are zero.
pub fn common_root(words: &[Word]) -> Option<(Word, Vec<i64>)> {
    let reduced: Vec<Word> = words.iter().map(|w| w.reduced()).collect();
    for i in 0..reduced.len() {
        for j in i + 1..reduced.len() {
            if !commutes(&reduced[i], &reduced[j]) {
                return None;
            }
        }
    }
    let Some(first) = reduced.iter().find(|w| !w.is_empty()) else {
        return Some((Word::identity(), vec![0; words.len()]));
    };
    let (root0, _) = primitive_root(first).expect("non-empty word has a root");
    // Canonical direction: the lexicographically smaller of the root and
    // its inverse, comparing (edge, inv) sequences.
    let key = |w: &Word| w.0.iter().map(|l| (l.edge, l.inv)).collect::<Vec<_>>();
    let inv = root0.inverse();
    let root = if key(&root0) <= key(&inv) { root0 } else { inv };

    let mut exps = Vec::with_capacity(reduced.len());
    for w in &reduced {
        if w.is_empty() {
            exps.push(0i64);
            continue;
        }
        let (r, k) = primitive_root(w).expect("non-empty word has a root");
        let k = k as i64;
        if r == root {
            exps.push(k);
        } else if r == root.inverse() {
            exps.push(-k);
        } else {
            // Commuting elements of a free group share a primitive root;
            // reaching here means the family was not commuting after all.
            return None;
        }
    }
    Some((root, exps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(edge: usize, inv: bool) -> Letter {
        Letter { edge, inv }
    }

    #[test]
    fn reduce_cancels_nested_pairs() {
        let w = Word(vec![l(0, false), l(1, false), l(1, true), l(0, true)]);
        assert!(w.reduced().is_identity());
    }

    #[test]
    fn reduce_is_idempotent() {
        let w = Word(vec![l(0, false), l(1, false), l(1, true), l(2, false)]);
        let r = w.reduced();
        assert_eq!(r, r.reduced());
        assert_eq!(r, Word(vec![l(0, false), l(2, false)]));
    }

    #[test]
    fn pow_of_inverse_cancels() {
        let w = Word(vec![l(0, false), l(1, true)]);
        assert!(w.concat(&w.inverse()).reduced().is_identity());
        assert_eq!(w.pow(-2), w.inverse().concat(&w.inverse()));
    }

    #[test]
    fn primitive_root_of_square() {
        let w = Word(vec![l(0, false), l(1, false), l(0, false), l(1, false)]);
        let (root, k) = primitive_root(&w).unwrap();
        assert_eq!(root, Word(vec![l(0, false), l(1, false)]));
        assert_eq!(k, 2);
    }

    #[test]
    fn primitive_root_of_conjugated_square() {
        // b a a b^-1 = b a b^-1 squared.
        let w = Word(vec![l(1, false), l(0, false), l(0, false), l(1, true)]);
        let (root, k) = primitive_root(&w).unwrap();
        assert_eq!(root, Word(vec![l(1, false), l(0, false), l(1, true)]));
        assert_eq!(k, 2);
        assert_eq!(w.len(), root.0.len() + (k as usize - 1));
    }

    #[test]
    fn primitive_root_rejects_empty() {
        assert_eq!(primitive_root(&Word::identity()), Err(GroupError::EmptyWord));
    }

    #[test]
    fn common_root_with_trivial_member() {
        let ab = Word(vec![l(0, false), l(1, false)]);
        let (root, exps) = common_root(&[Word::identity(), ab.clone()]).unwrap();
        assert_eq!(root, ab);
        assert_eq!(exps, vec![0, 1]);
    }

    #[test]
    fn common_root_rejects_non_commuting() {
        let a = Word(vec![l(0, false)]);
        let b = Word(vec![l(1, false)]);
        assert_eq!(common_root(&[a, b]), None);
    }

    #[test]
    fn common_root_handles_opposite_directions() {
        let ab = Word(vec![l(0, false), l(1, false)]);
        let (root, exps) = common_root(&[ab.inverse(), ab.pow(3)]).unwrap();
        let back: Vec<Word> = exps.iter().map(|&c| root.pow(c)).collect();
        assert_eq!(back[0], ab.inverse());
        assert_eq!(back[1], ab.pow(3));
    }
}
