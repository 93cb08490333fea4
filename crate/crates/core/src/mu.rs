//! Cyclic symmetries of a template and the symmetric cycles they induce.
//!
//! A symmetry is a permutation of the complex vertices of order at least
//! two. For templates whose relation is defined on r-tuples, the standard
//! choice is the cyclic coordinate shift. Three conditions are checked:
//! the symmetry maps maximal faces to maximal faces, it commutes with
//! every polymorphism applied coordinatewise, and no proper power fixes a
//! simplex. A symmetric cycle is built by chaining one connecting path
//! through all rotations of the symmetry.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::complexes::{bfs_path, contained_in_some_face, Complex, Cycle, CycleError, SpanningTree};
use crate::polymorphisms::{enumerate_polymorphisms, PolyError};
use crate::structures::{RelationalStructure, Tuple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MuProvenance {
    /// Acts by rotating tuple coordinates, uniformly on every vertex;
    /// powers of the rotation keep the flag.
    CyclicShift,
    /// Supplied as an explicit vertex permutation.
    Custom,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MuError {
    #[error("symmetry map is not a bijection: {0}")]
    NotABijection(String),
    #[error("symmetry has order 1, at least 2 is required")]
    TrivialAction,
    #[error("rotating {tuple:?} gives {image:?}, which is not a vertex")]
    NotShiftClosed { tuple: Tuple, image: Tuple },
    #[error("coordinate rotation needs arity at least 2, relation has arity {0}")]
    ArityTooSmall(usize),
    #[error("no path connects vertex {from} to its image {to}")]
    Disconnected { from: usize, to: usize },
    #[error("cycle anchor {0} is outside the spanning tree component")]
    AnchorOutside(usize),
    #[error(transparent)]
    BadCycle(#[from] CycleError),
}

/// A vertex permutation of finite order >= 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuAction {
    pub perm: Vec<usize>,
    pub order: usize,
    pub provenance: MuProvenance,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn perm_order(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut order = 1usize;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0usize;
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            v = perm[v];
            len += 1;
        }
        order = order / gcd(order, len) * len;
    }
    order
}

impl MuAction {
    pub fn new(perm: Vec<usize>, provenance: MuProvenance) -> Result<MuAction, MuError> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &v in &perm {
            if v >= n {
                return Err(MuError::NotABijection(format!("image {v} out of range 0..{n}")));
            }
            if seen[v] {
                return Err(MuError::NotABijection(format!("image {v} repeats")));
            }
            seen[v] = true;
        }
        let order = perm_order(&perm);
        if order < 2 {
            return Err(MuError::TrivialAction);
        }
        Ok(MuAction { perm, order, provenance })
    }

    pub fn apply(&self, v: usize) -> usize {
        self.perm[v]
    }

    /// The permutation of the k-th power.
    pub fn power(&self, k: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.perm.len()).collect();
        for _ in 0..k % self.order {
            for slot in out.iter_mut() {
                *slot = self.perm[*slot];
            }
        }
        out
    }

    /// Replace the action by the power whose order is the smallest prime
    /// factor of the current order. Every condition checked of the
    /// original descends to the power, and prime order makes the
    /// fixed-simplex check as small as possible.
    pub fn reduce_to_prime(&self) -> MuAction {
        let p = (2..=self.order).find(|d| self.order % d == 0).unwrap();
        if p == self.order {
            return self.clone();
        }
        let perm = self.power(self.order / p);
        debug_assert_eq!(perm_order(&perm), p);
        MuAction { perm, order: p, provenance: self.provenance }
    }
}

/// The coordinate rotation (a_1, ..., a_r) -> (a_r, a_1, ..., a_{r-1}) as
/// a vertex permutation; errors if some rotated tuple is not a vertex.
pub fn cyclic_shift_mu(h: &Complex) -> Result<MuAction, MuError> {
    let r = h.arity;
    if r < 2 {
        return Err(MuError::ArityTooSmall(r));
    }
    let mut perm = Vec::with_capacity(h.vertex_count());
    for t in &h.vertices {
        let image: Tuple = (0..r).map(|j| t[(j + r - 1) % r]).collect();
        match h.vertex_id(&image) {
            Some(v) => perm.push(v),
            None => return Err(MuError::NotShiftClosed { tuple: t.clone(), image }),
        }
    }
    MuAction::new(perm, MuProvenance::CyclicShift)
}

/// A tuple equal to a proper rotation of itself: t[j] == t[(j+k) mod r]
/// for all j and some k in 1..r.
pub fn has_periodic_tuple(vertices: &[Tuple]) -> Option<(Tuple, usize)> {
    for t in vertices {
        let r = t.len();
        for k in 1..r {
            if (0..r).all(|j| t[j] == t[(j + k) % r]) {
                return Some((t.clone(), k));
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FacePreservationViolation {
    pub face: usize,
    /// Sorted image of the face, which is not a maximal face.
    pub image: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FacePreservationReport {
    pub faces_checked: usize,
    pub violation: Option<FacePreservationViolation>,
}

impl FacePreservationReport {
    pub fn pass(&self) -> bool {
        self.violation.is_none()
    }
}

/// Every maximal face must map onto a maximal face. The map is injective
/// on faces, so passing makes it a bijection and the inverse preserves
/// faces too.
pub fn check_faces_preserved(h: &Complex, mu: &MuAction) -> FacePreservationReport {
    let face_set: HashSet<&[usize]> = h.faces.iter().map(|f| f.as_slice()).collect();
    for (fi, face) in h.faces.iter().enumerate() {
        let mut image: Vec<usize> = face.iter().map(|&v| mu.perm[v]).collect();
        image.sort_unstable();
        if !face_set.contains(image.as_slice()) {
            return FacePreservationReport {
                faces_checked: fi + 1,
                violation: Some(FacePreservationViolation { face: fi, image }),
            };
        }
    }
    FacePreservationReport { faces_checked: h.faces.len(), violation: None }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixedSimplex {
    /// The power of the symmetry that fixes the simplex, in 1..order.
    pub power: usize,
    /// A vertex orbit of that power contained in one maximal face; the
    /// orbit is itself a fixed simplex.
    pub orbit: Vec<usize>,
    pub face: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixedPointReport {
    pub order: usize,
    pub violation: Option<FixedSimplex>,
    /// A rotation-periodic vertex, if any. For the coordinate shift on a
    /// box complex, no periodic tuple already rules out fixed simplices.
    pub periodic_tuple: Option<(Tuple, usize)>,
}

impl FixedPointReport {
    pub fn pass(&self) -> bool {
        self.violation.is_none()
    }
}

/// No proper power of the symmetry may fix a simplex. A power g fixes a
/// simplex exactly when some g-orbit of a vertex lies inside a maximal
/// face: the orbit is then a fixed simplex, and any fixed simplex
/// contains the orbit of each of its vertices.
pub fn check_fixed_point_free(h: &Complex, mu: &MuAction) -> FixedPointReport {
    let periodic_tuple = has_periodic_tuple(&h.vertices);
    let n = h.vertex_count();
    for power in 1..mu.order {
        let perm = mu.power(power);
        let mut visited = vec![false; n];
        for start in 0..n {
            if visited[start] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut v = start;
            while !visited[v] {
                visited[v] = true;
                orbit.push(v);
                v = perm[v];
            }
            orbit.sort_unstable();
            if let Some(face) = contained_in_some_face(h, &orbit) {
                return FixedPointReport {
                    order: mu.order,
                    violation: Some(FixedSimplex { power, orbit, face }),
                    periodic_tuple,
                };
            }
        }
    }
    FixedPointReport { order: mu.order, violation: None, periodic_tuple }
}

/// Budget for the commutation check: polymorphism arities to cover and
/// how many operations to enumerate per arity before cutting off.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutationSampleSpec {
    pub max_arity: usize,
    pub enum_limit: usize,
    pub power_cap: u64,
}

impl Default for CommutationSampleSpec {
    fn default() -> Self {
        CommutationSampleSpec { max_arity: 2, enum_limit: 2000, power_cap: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutationArityCheck {
    pub arity: usize,
    pub polymorphisms: usize,
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum CommutationFailure {
    /// f(mu t_1, ..., mu t_n) disagrees with mu f(t_1, ..., t_n).
    Mismatch { arity: usize, poly: usize, inputs: Vec<usize>, lhs: Tuple, rhs: Tuple },
    /// f applied to source vertices missed the target vertex set, so the
    /// defined relation is not preserved.
    ImageNotVertex { arity: usize, poly: usize, inputs: Vec<usize>, image: Tuple },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutationReport {
    /// Both actions rotate coordinates uniformly, so they commute with
    /// every coordinatewise operation of any arity; the enumeration below
    /// is then a cross-check rather than the deciding evidence.
    pub by_symmetry: bool,
    pub checks: Vec<CommutationArityCheck>,
    pub failure: Option<CommutationFailure>,
}

impl CommutationReport {
    pub fn pass(&self) -> bool {
        self.failure.is_none()
    }
}

/// Check that the source and target symmetries commute with every
/// enumerated polymorphism applied coordinatewise to source vertices.
pub fn check_commutation(
    a: &RelationalStructure,
    b: &RelationalStructure,
    h_a: &Complex,
    h_b: &Complex,
    mu_a: &MuAction,
    mu_b: &MuAction,
    spec: &CommutationSampleSpec,
) -> Result<CommutationReport, PolyError> {
    let by_symmetry = mu_a.provenance == MuProvenance::CyclicShift
        && mu_b.provenance == MuProvenance::CyclicShift;
    let mut checks = Vec::new();
    let nv = h_a.vertex_count();
    for arity in 1..=spec.max_arity {
        let (polys, exhaustive) =
            enumerate_polymorphisms(a, b, arity, spec.power_cap, Some(spec.enum_limit))?;
        checks.push(CommutationArityCheck { arity, polymorphisms: polys.len(), exhaustive });
        for (pi, f) in polys.iter().enumerate() {
            let mut inputs = vec![0usize; arity];
            loop {
                let rotated: Vec<&Tuple> =
                    inputs.iter().map(|&v| &h_a.vertices[mu_a.perm[v]]).collect();
                let lhs = f.apply_tuples(&rotated);
                let plain: Vec<&Tuple> = inputs.iter().map(|&v| &h_a.vertices[v]).collect();
                let image = f.apply_tuples(&plain);
                let Some(image_id) = h_b.vertex_id(&image) else {
                    return Ok(CommutationReport {
                        by_symmetry,
                        checks,
                        failure: Some(CommutationFailure::ImageNotVertex {
                            arity,
                            poly: pi,
                            inputs,
                            image,
                        }),
                    });
                };
                let rhs = &h_b.vertices[mu_b.perm[image_id]];
                if &lhs != rhs {
                    return Ok(CommutationReport {
                        by_symmetry,
                        checks,
                        failure: Some(CommutationFailure::Mismatch {
                            arity,
                            poly: pi,
                            inputs,
                            lhs,
                            rhs: rhs.clone(),
                        }),
                    });
                }
                let mut k = arity;
                let done = loop {
                    if k == 0 {
                        break true;
                    }
                    k -= 1;
                    inputs[k] += 1;
                    if inputs[k] < nv {
                        break false;
                    }
                    inputs[k] = 0;
                };
                if done {
                    break;
                }
            }
        }
    }
    Ok(CommutationReport { by_symmetry, checks, failure: None })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MuConnectivity {
    pub vertices: usize,
    /// First vertex living in a different component than its image.
    pub failure: Option<(usize, usize)>,
}

impl MuConnectivity {
    pub fn pass(&self) -> bool {
        self.failure.is_none()
    }
}

/// Every vertex must be joined to its image by a path; otherwise no
/// symmetric cycle through the symmetry exists.
pub fn is_mu_connected(h: &Complex, mu: &MuAction) -> MuConnectivity {
    let n = h.vertex_count();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0usize;
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = next;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &h.adj[u] {
                if comp[v] == usize::MAX {
                    comp[v] = next;
                    queue.push_back(v);
                }
            }
        }
        next += 1;
    }
    let failure = (0..n).find(|&v| comp[v] != comp[mu.perm[v]]).map(|v| (v, mu.perm[v]));
    MuConnectivity { vertices: n, failure }
}

/// The symmetric cycle: reach an anchor from the root along the tree,
/// walk one path to the anchor's image, chain that path through every
/// rotation back to the anchor, and return to the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuCycle {
    pub anchor: usize,
    pub order: usize,
    /// Tree path root -> anchor, inclusive.
    pub prefix: Vec<usize>,
    /// Path anchor -> mu(anchor), inclusive.
    pub segment: Vec<usize>,
    pub cycle: Cycle,
}

impl MuCycle {
    /// The closed part at the anchor, without the conjugating prefix.
    pub fn core(&self) -> Cycle {
        let p = self.prefix.len();
        Cycle(self.cycle.0[p - 1..self.cycle.0.len() - (p - 1)].to_vec())
    }
}

pub fn build_mu_cycle(
    h: &Complex,
    tree: &SpanningTree,
    mu: &MuAction,
    anchor: Option<usize>,
) -> Result<MuCycle, MuError> {
    let anchor = anchor.unwrap_or(tree.root);
    if !tree.in_component[anchor] {
        return Err(MuError::AnchorOutside(anchor));
    }
    let prefix = tree.path(tree.root, anchor);
    let segment = bfs_path(h, anchor, mu.perm[anchor])
        .ok_or(MuError::Disconnected { from: anchor, to: mu.perm[anchor] })?;
    let mut seq = prefix.clone();
    let mut rotated = segment.clone();
    for _ in 0..mu.order {
        seq.extend_from_slice(&rotated[1..]);
        for v in rotated.iter_mut() {
            *v = mu.perm[*v];
        }
    }
    debug_assert_eq!(*seq.last().unwrap(), anchor, "rotations chain back to the anchor");
    seq.extend(prefix.iter().rev().skip(1));
    let cycle = Cycle(seq);
    cycle.validate(h)?;
    Ok(MuCycle { anchor, order: mu.order, prefix, segment, cycle })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraversalImbalance {
    pub u: usize,
    pub v: usize,
    /// Steps u -> v with u < v.
    pub forward: usize,
    pub backward: usize,
}

/// An edge crossed more often one way than the other. Such an edge
/// witnesses that the walk is not a back-and-forth retrace.
pub fn traversal_imbalance(cycle: &Cycle) -> Option<TraversalImbalance> {
    let mut counts: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for w in cycle.0.windows(2) {
        let (u, v) = (w[0], w[1]);
        if u == v {
            continue;
        }
        let entry = counts.entry((u.min(v), u.max(v))).or_insert((0, 0));
        if u < v {
            entry.0 += 1;
        } else {
            entry.1 += 1;
        }
    }
    counts
        .into_iter()
        .find(|(_, (f, b))| f != b)
        .map(|((u, v), (forward, backward))| TraversalImbalance { u, v, forward, backward })
}
