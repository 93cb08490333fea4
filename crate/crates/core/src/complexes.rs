//! Simplicial complexes on the tuples of a relation.
//!
//! Vertices are the tuples of an r-ary relation. In box mode the maximal
//! faces are the maximal subsets of the form X_1 x ... x X_r contained in
//! the relation; they are computed as the maximal classes of the box
//! tolerance (the intersection, over all orderings of the coordinates, of
//! the compositions of the single-coordinate change relations) and then
//! verified to be products. A custom face family can be supplied instead.

use std::collections::HashMap;

use itertools::Itertools;
use thiserror::Error;

use crate::structures::{Relation, Tuple};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error("box tolerance needs r! * |R|^2 <= {cap}, got {got} (arity {arity}, {tuples} tuples)")]
    ToleranceCap { cap: u64, got: u64, arity: usize, tuples: usize },
    #[error("face {face} with projections of sizes {sizes:?} is not a product: {detail}")]
    NotABox { face: usize, sizes: Vec<usize>, detail: String },
    #[error("custom face {face} lists vertex {vertex}, but the relation has {count} tuples")]
    BadFaceVertex { face: usize, vertex: usize, count: usize },
    #[error("custom face {0} is empty")]
    EmptyFace(usize),
    #[error("the relation has no tuples")]
    EmptyRelation,
}

/// Symmetric reflexive relation on tuple indices, stored as bit rows.
#[derive(Debug, Clone)]
pub struct Tolerance {
    pub n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Tolerance {
    fn full(n: usize) -> Self {
        let words = n.div_ceil(64);
        let mut t = Tolerance { n, words, bits: vec![!0u64; n * words] };
        // Clear padding bits so row operations stay canonical.
        if n % 64 != 0 {
            let mask = (1u64 << (n % 64)) - 1;
            for row in 0..n {
                t.bits[row * words + words - 1] &= mask;
            }
        }
        t
    }

    fn empty(n: usize) -> Self {
        let words = n.div_ceil(64);
        Tolerance { n, words, bits: vec![0u64; n * words] }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1u64 << (j % 64);
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// Boolean matrix product self ∘ other: (i,k) iff some j with
    /// self(i,j) and other(j,k).
    fn compose(&self, other: &Tolerance) -> Tolerance {
        let mut out = Tolerance::empty(self.n);
        for i in 0..self.n {
            let mut acc = vec![0u64; self.words];
            let row = self.row(i);
            for j in 0..self.n {
                if row[j / 64] >> (j % 64) & 1 == 1 {
                    for (a, b) in acc.iter_mut().zip(other.row(j)) {
                        *a |= b;
                    }
                }
            }
            out.bits[i * self.words..(i + 1) * self.words].copy_from_slice(&acc);
        }
        out
    }

    fn intersect_with(&mut self, other: &Tolerance) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a &= b;
        }
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| j != i && self.get(i, j)).collect()
    }
}

/// The box tolerance of a relation: two tuples are related when they can be
/// joined by changing one coordinate at a time, in every coordinate order,
/// staying inside the relation. Its maximal classes are exactly the maximal
/// boxes contained in the relation.
pub fn box_tolerance(rel: &Relation, cap: u64) -> Result<Tolerance, ComplexError> {
    let n = rel.tuples.len();
    if n == 0 {
        return Err(ComplexError::EmptyRelation);
    }
    let r = rel.arity;
    let fact: u64 = (1..=r as u64).product();
    let cost = fact.saturating_mul((n as u64).saturating_mul(n as u64));
    if cost > cap {
        return Err(ComplexError::ToleranceCap { cap, got: cost, arity: r, tuples: n });
    }

    // Single-coordinate change relations: q[i] relates tuples equal on
    // every coordinate except possibly i.
    let mut q: Vec<Tolerance> = (0..r).map(|_| Tolerance::empty(n)).collect();
    for a in 0..n {
        for b in 0..n {
            let ta = &rel.tuples[a];
            let tb = &rel.tuples[b];
            let diff: Vec<usize> = (0..r).filter(|&j| ta[j] != tb[j]).collect();
            match diff.len() {
                0 => {
                    for qi in q.iter_mut() {
                        qi.set(a, b);
                    }
                }
                1 => q[diff[0]].set(a, b),
                _ => {}
            }
        }
    }

    let mut acc = Tolerance::full(n);
    for perm in (0..r).permutations(r) {
        let mut prod = q[perm[0]].clone();
        for &i in &perm[1..] {
            prod = prod.compose(&q[i]);
        }
        acc.intersect_with(&prod);
    }
    Ok(acc)
}

/// Maximal cliques of the tolerance graph (diagonal ignored), via
/// Bron-Kerbosch with pivoting. Output is canonical: each clique sorted,
/// cliques sorted lexicographically.
pub fn maximal_classes(tol: &Tolerance) -> Vec<Vec<usize>> {
    let n = tol.n;
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut r: Vec<usize> = Vec::new();
    let p: Vec<usize> = (0..n).collect();
    let x: Vec<usize> = Vec::new();
    bron_kerbosch(tol, &mut r, p, x, &mut out);
    for c in out.iter_mut() {
        c.sort_unstable();
    }
    out.sort();
    out
}

fn bron_kerbosch(
    tol: &Tolerance,
    r: &mut Vec<usize>,
    p: Vec<usize>,
    x: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r.clone());
        return;
    }
    // Pivot: vertex of P ∪ X with most neighbors in P; smallest index wins ties.
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| {
            let deg = p.iter().filter(|&&v| v != u && tol.get(u, v)).count();
            (deg, std::cmp::Reverse(u))
        })
        .unwrap();
    let candidates: Vec<usize> =
        p.iter().copied().filter(|&v| v == pivot || !tol.get(pivot, v)).collect();
    let mut p = p;
    let mut x = x;
    for v in candidates {
        r.push(v);
        let p2: Vec<usize> = p.iter().copied().filter(|&u| u != v && tol.get(v, u)).collect();
        let x2: Vec<usize> = x.iter().copied().filter(|&u| u != v && tol.get(v, u)).collect();
        bron_kerbosch(tol, r, p2, x2, out);
        r.pop();
        p.retain(|&u| u != v);
        x.push(v);
    }
}

/// Check that every face is a product of its coordinate projections and
/// that the product stays inside the relation.
pub fn verify_boxes(rel: &Relation, faces: &[Vec<usize>]) -> Result<(), ComplexError> {
    for (fi, face) in faces.iter().enumerate() {
        let r = rel.arity;
        let mut projections: Vec<Vec<usize>> = vec![Vec::new(); r];
        for &v in face {
            for (j, &val) in rel.tuples[v].iter().enumerate() {
                if !projections[j].contains(&val) {
                    projections[j].push(val);
                }
            }
        }
        for p in projections.iter_mut() {
            p.sort_unstable();
        }
        let sizes: Vec<usize> = projections.iter().map(|p| p.len()).collect();
        let product: usize = sizes.iter().product();
        if product != face.len() {
            return Err(ComplexError::NotABox {
                face: fi,
                sizes,
                detail: format!("face has {} tuples, projections span {}", face.len(), product),
            });
        }
        // |face| = prod |X_j| and face ⊆ prod X_j force equality, but the
        // product must also lie in the relation; check each combination.
        let mut pick = vec![0usize; r];
        loop {
            let t: Tuple = (0..r).map(|j| projections[j][pick[j]]).collect();
            if !rel.contains(&t) {
                return Err(ComplexError::NotABox {
                    face: fi,
                    sizes,
                    detail: format!("projection product contains {t:?} outside the relation"),
                });
            }
            let mut k = r;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                pick[k] += 1;
                if pick[k] < projections[k].len() {
                    break;
                }
                pick[k] = 0;
            }
            if pick.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FaceMode {
    /// Maximal boxes of the relation, via the box tolerance.
    Box,
    /// Explicit maximal faces as lists of tuple indices. Non-maximal
    /// entries are dropped; uncovered vertices become singleton faces.
    Custom(Vec<Vec<usize>>),
}

/// A complex: relation tuples as vertices, a maximal face family, and the
/// derived co-occurrence graph.
#[derive(Debug, Clone)]
pub struct Complex {
    pub arity: usize,
    /// Sorted lexicographically; vertex id = index.
    pub vertices: Vec<Tuple>,
    vertex_index: HashMap<Tuple, usize>,
    /// Maximal faces, each sorted, family sorted.
    pub faces: Vec<Vec<usize>>,
    /// Edges (u, v) with u < v, sorted; loops excluded.
    pub edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    /// Maximal faces containing each edge.
    pub edge_faces: Vec<Vec<usize>>,
    /// Maximal faces containing each vertex.
    pub vertex_faces: Vec<Vec<usize>>,
    /// Neighbor lists, sorted, no loops.
    pub adj: Vec<Vec<usize>>,
}

impl Complex {
    pub fn vertex_id(&self, t: &[usize]) -> Option<usize> {
        self.vertex_index.get(t).copied()
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edge_index.get(&key).copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// True when u and v share a face (u == v counts).
    pub fn connected_step(&self, u: usize, v: usize) -> bool {
        u == v || self.edge_id(u, v).is_some()
    }
}

/// Build a complex over the tuples of `rel` with the given face family.
pub fn build_complex(rel: &Relation, mode: &FaceMode, cap: u64) -> Result<Complex, ComplexError> {
    if rel.tuples.is_empty() {
        return Err(ComplexError::EmptyRelation);
    }
    let vertices = rel.tuples.clone();
    let n = vertices.len();

    let mut faces: Vec<Vec<usize>> = match mode {
        FaceMode::Box => {
            let tol = box_tolerance(rel, cap)?;
            let classes = maximal_classes(&tol);
            verify_boxes(rel, &classes)?;
            classes
        }
        FaceMode::Custom(given) => {
            let mut cleaned: Vec<Vec<usize>> = Vec::new();
            for (fi, face) in given.iter().enumerate() {
                if face.is_empty() {
                    return Err(ComplexError::EmptyFace(fi));
                }
                let mut f = face.clone();
                f.sort_unstable();
                f.dedup();
                if let Some(&v) = f.iter().find(|&&v| v >= n) {
                    return Err(ComplexError::BadFaceVertex { face: fi, vertex: v, count: n });
                }
                cleaned.push(f);
            }
            // Keep inclusion-maximal faces only.
            let mut covered = vec![false; n];
            for f in &cleaned {
                for &v in f {
                    covered[v] = true;
                }
            }
            for (v, c) in covered.into_iter().enumerate() {
                if !c {
                    cleaned.push(vec![v]);
                }
            }
            let mut keep: Vec<Vec<usize>> = Vec::new();
            for f in &cleaned {
                let maximal = !cleaned
                    .iter()
                    .any(|g| g.len() > f.len() && f.iter().all(|v| g.binary_search(v).is_ok()));
                if maximal && !keep.contains(f) {
                    keep.push(f.clone());
                }
            }
            keep
        }
    };
    faces.sort();

    let vertex_index: HashMap<Tuple, usize> =
        vertices.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();

    let mut edge_map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    let mut vertex_faces: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (fi, face) in faces.iter().enumerate() {
        for (i, &u) in face.iter().enumerate() {
            vertex_faces[u].push(fi);
            for &v in &face[i + 1..] {
                edge_map.entry((u, v)).or_default().push(fi);
            }
        }
    }
    let mut edges: Vec<(usize, usize)> = edge_map.keys().copied().collect();
    edges.sort_unstable();
    let edge_index: HashMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let edge_faces: Vec<Vec<usize>> = edges.iter().map(|e| edge_map[e].clone()).collect();

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in &edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    for l in adj.iter_mut() {
        l.sort_unstable();
        l.dedup();
    }

    Ok(Complex { arity: rel.arity, vertices, vertex_index, faces, edges, edge_index, edge_faces, vertex_faces, adj })
}

/// True when the co-occurrence graph has a single connected component.
pub fn is_connected(h: &Complex) -> bool {
    let n = h.vertex_count();
    if n <= 1 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in &h.adj[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == n
}

/// BFS spanning tree of the component of `root`, visiting neighbors in
/// vertex order.
#[derive(Debug, Clone)]
pub struct SpanningTree {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    pub depth: Vec<usize>,
    pub in_component: Vec<bool>,
}

impl SpanningTree {
    pub fn is_tree_edge(&self, u: usize, v: usize) -> bool {
        self.parent[u] == Some(v) || self.parent[v] == Some(u)
    }

    pub fn edge_count(&self) -> usize {
        self.parent.iter().filter(|p| p.is_some()).count()
    }

    /// The unique tree path from u to v (inclusive).
    pub fn path(&self, u: usize, v: usize) -> Vec<usize> {
        assert!(self.in_component[u] && self.in_component[v], "path endpoints must be spanned");
        let (mut x, mut y) = (u, v);
        let mut front = vec![x];
        let mut back = vec![y];
        while self.depth[x] > self.depth[y] {
            x = self.parent[x].unwrap();
            front.push(x);
        }
        while self.depth[y] > self.depth[x] {
            y = self.parent[y].unwrap();
            back.push(y);
        }
        while x != y {
            x = self.parent[x].unwrap();
            front.push(x);
            y = self.parent[y].unwrap();
            back.push(y);
        }
        back.pop();
        back.reverse();
        front.extend(back);
        front
    }
}

pub fn build_spanning_tree(h: &Complex, root: usize) -> SpanningTree {
    let n = h.vertex_count();
    let mut parent = vec![None; n];
    let mut depth = vec![0usize; n];
    let mut in_component = vec![false; n];
    in_component[root] = true;
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &v in &h.adj[u] {
            if !in_component[v] {
                in_component[v] = true;
                parent[v] = Some(u);
                depth[v] = depth[u] + 1;
                queue.push_back(v);
            }
        }
    }
    SpanningTree { root, parent, depth, in_component }
}

/// BFS shortest path u -> v in the co-occurrence graph, neighbors in
/// vertex order; None when v is unreachable.
pub fn bfs_path(h: &Complex, u: usize, v: usize) -> Option<Vec<usize>> {
    if u == v {
        return Some(vec![u]);
    }
    let n = h.vertex_count();
    let mut prev: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[u] = true;
    let mut queue = std::collections::VecDeque::from([u]);
    while let Some(x) = queue.pop_front() {
        for &y in &h.adj[x] {
            if !seen[y] {
                seen[y] = true;
                prev[y] = Some(x);
                if y == v {
                    let mut path = vec![v];
                    let mut cur = v;
                    while let Some(p) = prev[cur] {
                        path.push(p);
                        cur = p;
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(y);
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct OverlapReport {
    pub max: usize,
    /// A face pair attaining the maximum, present when max > 1.
    pub witness: Option<(usize, usize)>,
}

/// Maximum |σ ∩ σ'| over distinct maximal faces.
pub fn max_pairwise_face_overlap(h: &Complex) -> OverlapReport {
    let mut max = 0usize;
    let mut witness = None;
    for i in 0..h.faces.len() {
        for j in i + 1..h.faces.len() {
            let inter = intersection_size(&h.faces[i], &h.faces[j]);
            if inter > max {
                max = inter;
                witness = Some((i, j));
            }
        }
    }
    OverlapReport { max, witness: if max > 1 { witness } else { None } }
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Is `set` (sorted vertex ids) contained in some maximal face of h?
pub fn contained_in_some_face(h: &Complex, set: &[usize]) -> Option<usize> {
    if set.is_empty() {
        return None;
    }
    h.vertex_faces[set[0]]
        .iter()
        .copied()
        .find(|&fi| set.iter().all(|v| h.faces[fi].binary_search(v).is_ok()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityViolation {
    /// Indices of the chosen maximal faces in the source complex.
    pub faces: Vec<usize>,
    /// Image vertex set that lies in no face of the target complex.
    pub image: Vec<usize>,
    /// An image tuple that is not even a vertex of the target, if any.
    pub outside_tuple: Option<Tuple>,
}

/// Check that a map sending source-tuple n-tuples to target tuples carries
/// every product of maximal faces into a face of the target complex.
/// `apply` maps one tuple per argument slot to the image tuple.
pub fn check_polymorphism_stable<F>(
    h_a: &Complex,
    h_b: &Complex,
    n: usize,
    apply: F,
) -> Result<(), StabilityViolation>
where
    F: Fn(&[&Tuple]) -> Tuple,
{
    assert!(n >= 1, "stability check needs a positive arity");
    let k = h_a.faces.len();
    let mut choice = vec![0usize; n];
    loop {
        match image_of_faces(h_a, h_b, &choice, &apply) {
            Err(outside) => {
                return Err(StabilityViolation {
                    faces: choice.clone(),
                    image: Vec::new(),
                    outside_tuple: Some(outside),
                })
            }
            Ok(image) => {
                if contained_in_some_face(h_b, &image).is_none() {
                    return Err(StabilityViolation { faces: choice.clone(), image, outside_tuple: None });
                }
            }
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < k {
                break;
            }
            choice[i] = 0;
        }
    }
}

fn image_of_faces<F>(
    h_a: &Complex,
    h_b: &Complex,
    faces: &[usize],
    apply: &F,
) -> Result<Vec<usize>, Tuple>
where
    F: Fn(&[&Tuple]) -> Tuple,
{
    let n = faces.len();
    let mut pick = vec![0usize; n];
    let mut out: Vec<usize> = Vec::new();
    loop {
        let args: Vec<&Tuple> =
            (0..n).map(|i| &h_a.vertices[h_a.faces[faces[i]][pick[i]]]).collect();
        let image = apply(&args);
        let id = h_b.vertex_id(&image).ok_or(image)?;
        if !out.contains(&id) {
            out.push(id);
        }
        let mut i = n;
        loop {
            if i == 0 {
                out.sort_unstable();
                return Ok(out);
            }
            i -= 1;
            pick[i] += 1;
            if pick[i] < h_a.faces[faces[i]].len() {
                break;
            }
            pick[i] = 0;
        }
    }
}

/// A closed walk in the co-occurrence graph: vertex sequence with first ==
/// last, consecutive entries equal or adjacent. The null cycle at t is
/// [t, t].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle(pub Vec<usize>);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CycleError {
    #[error("a cycle needs at least two entries")]
    TooShort,
    #[error("cycle is not closed: starts at {0}, ends at {1}")]
    NotClosed(usize, usize),
    #[error("step {index}: vertices {u} and {v} share no face")]
    BadStep { index: usize, u: usize, v: usize },
}

impl Cycle {
    pub fn null(t: usize) -> Cycle {
        Cycle(vec![t, t])
    }

    pub fn base(&self) -> usize {
        self.0[0]
    }

    pub fn validate(&self, h: &Complex) -> Result<(), CycleError> {
        if self.0.len() < 2 {
            return Err(CycleError::TooShort);
        }
        let (first, last) = (self.0[0], *self.0.last().unwrap());
        if first != last {
            return Err(CycleError::NotClosed(first, last));
        }
        for (i, w) in self.0.windows(2).enumerate() {
            if !h.connected_step(w[0], w[1]) {
                return Err(CycleError::BadStep { index: i, u: w[0], v: w[1] });
            }
        }
        Ok(())
    }

    /// Concatenate with another cycle based at the same vertex.
    pub fn concat(&self, other: &Cycle) -> Cycle {
        assert_eq!(self.base(), other.base(), "cycle concatenation needs a common base");
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0[1..]);
        Cycle(v)
    }

    pub fn reversed(&self) -> Cycle {
        let mut v = self.0.clone();
        v.reverse();
        Cycle(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::Relation;

    fn relation_of(tuples: &[&[usize]], arity: usize) -> Relation {
        Relation::new("R", arity, tuples.iter().map(|t| t.to_vec()).collect())
    }

    #[test]
    fn tolerance_of_single_tuple_is_reflexive() {
        let rel = relation_of(&[&[0, 1]], 2);
        let tol = box_tolerance(&rel, 1 << 20).unwrap();
        assert!(tol.get(0, 0));
        assert_eq!(maximal_classes(&tol), vec![vec![0]]);
    }

    #[test]
    fn tolerance_of_full_square_relates_everything() {
        let rel = relation_of(&[&[0, 0], &[0, 1], &[1, 0], &[1, 1]], 2);
        let tol = box_tolerance(&rel, 1 << 20).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!(tol.get(i, j));
            }
        }
        assert_eq!(maximal_classes(&tol), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn custom_faces_drop_subsets_and_cover_vertices() {
        let rel = relation_of(&[&[0, 0], &[0, 1], &[1, 0]], 2);
        let mode = FaceMode::Custom(vec![vec![0, 1], vec![1, 0], vec![0]]);
        let h = build_complex(&rel, &mode, 1 << 20).unwrap();
        assert_eq!(h.faces, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn tree_path_is_unique_and_inclusive() {
        let rel = relation_of(&[&[0, 1], &[0, 2], &[3, 1], &[3, 2]], 2);
        let h = build_complex(&rel, &FaceMode::Box, 1 << 20).unwrap();
        let tree = build_spanning_tree(&h, 0);
        let p = tree.path(0, 0);
        assert_eq!(p, vec![0]);
        for &(u, v) in &h.edges {
            if tree.is_tree_edge(u, v) {
                assert_eq!(tree.path(u, v), vec![u, v]);
            }
        }
    }
}
