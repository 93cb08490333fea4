//! Polymorphisms of a template and their action on cycle classes.
//!
//! An n-ary polymorphism of (A, B) is a homomorphism A^n -> B; it is
//! stored as a value table indexed by the n-tuple of arguments. Applied
//! coordinatewise, a polymorphism maps tuples of a pp-defined relation of
//! A to tuples of the matching relation of B, so it carries based cycles
//! of the source complex to based cycles of the target complex. The map
//! `xi` records, per argument slot, the class of the cycle obtained by
//! walking that slot around a fixed cycle while parking the other slots
//! at the base vertex.

use serde::Serialize;
use thiserror::Error;

use crate::complexes::{Complex, Cycle, SpanningTree};
use crate::groups::{common_root, commutes, rho, FreeBasis, GroupError, Word};
use crate::structures::{
    direct_power, enumerate_homomorphisms, HomError, PowerError, RelationalStructure, Tuple,
};

/// A finite operation A^n -> B as a flat table. The index of arguments
/// (x_1, ..., x_n) is their mixed-radix value with x_1 most significant,
/// matching the element order of the n-th direct power.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polymorphism {
    pub arity: usize,
    pub a_size: usize,
    pub table: Vec<usize>,
}

impl Polymorphism {
    pub fn new(arity: usize, a_size: usize, table: Vec<usize>) -> Self {
        assert!(arity >= 1, "operations need at least one argument");
        assert_eq!(table.len(), a_size.pow(arity as u32), "table covers A^n");
        Polymorphism { arity, a_size, table }
    }

    /// The i-th projection of the given arity.
    pub fn projection(arity: usize, a_size: usize, coord: usize) -> Self {
        assert!(coord < arity);
        let size = a_size.pow(arity as u32);
        let mut table = vec![0usize; size];
        for (idx, entry) in table.iter_mut().enumerate() {
            let shift = a_size.pow((arity - 1 - coord) as u32);
            *entry = idx / shift % a_size;
        }
        Polymorphism { arity, a_size, table }
    }

    fn index(&self, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.arity);
        args.iter().fold(0usize, |acc, &x| acc * self.a_size + x)
    }

    pub fn apply(&self, args: &[usize]) -> usize {
        self.table[self.index(args)]
    }

    /// Coordinatewise application to equal-length tuples.
    pub fn apply_tuples(&self, args: &[&Tuple]) -> Tuple {
        debug_assert_eq!(args.len(), self.arity);
        let r = args[0].len();
        let mut slot = vec![0usize; self.arity];
        (0..r)
            .map(|j| {
                for (k, t) in args.iter().enumerate() {
                    slot[k] = t[j];
                }
                self.apply(&slot)
            })
            .collect()
    }

    /// The minor along pi: an m-ary operation g with
    /// g(y_1..y_m) = f(y_{pi[0]}, ..., y_{pi[n-1]}).
    pub fn minor(&self, pi: &[usize], m: usize) -> Polymorphism {
        assert_eq!(pi.len(), self.arity, "pi assigns a slot to every argument");
        assert!(m >= 1 && pi.iter().all(|&i| i < m), "pi must map into [m]");
        let size = self.a_size.pow(m as u32);
        let mut table = vec![0usize; size];
        let mut y = vec![0usize; m];
        for (idx, entry) in table.iter_mut().enumerate() {
            let mut rest = idx;
            for j in (0..m).rev() {
                y[j] = rest % self.a_size;
                rest /= self.a_size;
            }
            let args: Vec<usize> = pi.iter().map(|&i| y[i]).collect();
            *entry = self.apply(&args);
        }
        Polymorphism { arity: m, a_size: self.a_size, table }
    }

    /// Argument slots the operation actually depends on.
    pub fn essential_coordinates(&self) -> Vec<usize> {
        let mut essential = Vec::new();
        let mut args = vec![0usize; self.arity];
        'coords: for i in 0..self.arity {
            for idx in 0..self.table.len() {
                let mut rest = idx;
                for j in (0..self.arity).rev() {
                    args[j] = rest % self.a_size;
                    rest /= self.a_size;
                }
                let here = self.table[idx];
                let orig = args[i];
                for v in 0..self.a_size {
                    args[i] = v;
                    if self.apply(&args) != here {
                        essential.push(i);
                        continue 'coords;
                    }
                }
                args[i] = orig;
            }
        }
        essential
    }

    /// Check the defining condition directly: every coordinatewise image
    /// of source tuples lands in the target relation.
    pub fn validate(
        &self,
        a: &RelationalStructure,
        b: &RelationalStructure,
    ) -> Result<(), PolyViolation> {
        for (ra, rb) in a.relations.iter().zip(&b.relations) {
            let m = ra.tuples.len();
            if m == 0 {
                continue;
            }
            let mut pick = vec![0usize; self.arity];
            loop {
                let args: Vec<&Tuple> = pick.iter().map(|&p| &ra.tuples[p]).collect();
                let image = self.apply_tuples(&args);
                if !rb.contains(&image) {
                    return Err(PolyViolation {
                        relation: ra.name.clone(),
                        picks: pick.clone(),
                        image,
                    });
                }
                let mut k = self.arity;
                loop {
                    if k == 0 {
                        return Ok(());
                    }
                    k -= 1;
                    pick[k] += 1;
                    if pick[k] < m {
                        break;
                    }
                    pick[k] = 0;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("tuples at positions {picks:?} of relation '{relation}' map to {image:?}, outside the target")]
pub struct PolyViolation {
    pub relation: String,
    pub picks: Vec<usize>,
    pub image: Tuple,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error(transparent)]
    Power(#[from] PowerError),
    #[error(transparent)]
    Hom(#[from] HomError),
}

/// Enumerate n-ary polymorphisms of (a, b) in lexicographic table order.
///
/// Returns the list and whether it is exhaustive; with a limit the list is
/// the lexicographic prefix and the flag reports whether anything was cut.
pub fn enumerate_polymorphisms(
    a: &RelationalStructure,
    b: &RelationalStructure,
    n: usize,
    power_cap: u64,
    limit: Option<usize>,
) -> Result<(Vec<Polymorphism>, bool), PolyError> {
    let power = direct_power(a, n, power_cap)?;
    let probe = limit.map(|l| l + 1);
    let mut homs = enumerate_homomorphisms(&power, b, probe)?;
    let complete = match limit {
        Some(l) => homs.len() <= l,
        None => true,
    };
    if let Some(l) = limit {
        homs.truncate(l);
    }
    let polys = homs
        .into_iter()
        .map(|h| Polymorphism { arity: n, a_size: a.size(), table: h.map })
        .collect();
    Ok((polys, complete))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum XiError {
    #[error("image tuple {0:?} is not a vertex of the target complex")]
    ImageNotVertex(Tuple),
    #[error("image step {u:?} -> {v:?} is not an edge of the target complex")]
    ImageStepNotEdge { u: Tuple, v: Tuple },
    #[error("image vertex {0} is outside the component of the target base")]
    ImageOutsideComponent(usize),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Everything needed to evaluate xi: the two complexes, the target tree
/// and free basis, and the fixed based cycle in the source complex.
pub struct XiContext<'a> {
    pub h_a: &'a Complex,
    pub h_b: &'a Complex,
    pub tree_b: &'a SpanningTree,
    pub basis_b: &'a FreeBasis,
    pub cycle_a: &'a Cycle,
}

impl<'a> XiContext<'a> {
    fn image_vertex(&self, f: &Polymorphism, args: &[&Tuple]) -> Result<usize, XiError> {
        let image = f.apply_tuples(args);
        match self.h_b.vertex_id(&image) {
            Some(v) => Ok(v),
            None => Err(XiError::ImageNotVertex(image)),
        }
    }

    /// The based cycle tracking slot i: park every other slot at the base
    /// of the source cycle, walk slot i around it, and conjugate by the
    /// tree path from the target root to the image of the all-base point.
    pub fn coordinate_cycle(&self, f: &Polymorphism, i: usize) -> Result<Cycle, XiError> {
        assert!(i < f.arity);
        let base_tuple = &self.h_a.vertices[self.cycle_a.base()];
        let mut args: Vec<&Tuple> = vec![base_tuple; f.arity];
        let b0 = self.image_vertex(f, &args)?;
        if !self.tree_b.in_component[b0] {
            return Err(XiError::ImageOutsideComponent(b0));
        }
        let mut walk = Vec::with_capacity(self.cycle_a.0.len());
        for &c in &self.cycle_a.0 {
            args[i] = &self.h_a.vertices[c];
            walk.push(self.image_vertex(f, &args)?);
        }
        for w in walk.windows(2) {
            if !self.h_b.connected_step(w[0], w[1]) {
                return Err(XiError::ImageStepNotEdge {
                    u: self.h_b.vertices[w[0]].clone(),
                    v: self.h_b.vertices[w[1]].clone(),
                });
            }
        }
        let prefix = self.tree_b.path(self.tree_b.root, b0);
        let mut seq = prefix.clone();
        seq.extend_from_slice(&walk[1..]);
        seq.extend(prefix.iter().rev().skip(1));
        Ok(Cycle(seq))
    }

    /// xi(f): per argument slot, the reduced basis word of the slot's
    /// coordinate cycle.
    pub fn xi(&self, f: &Polymorphism) -> Result<Vec<Word>, XiError> {
        (0..f.arity)
            .map(|i| {
                let cycle = self.coordinate_cycle(f, i)?;
                let word = rho(self.h_b, self.tree_b, &cycle)?;
                Ok(self.basis_b.eta(self.h_b, &word)?)
            })
            .collect()
    }
}

/// Outcome of checking xi(f^pi) against the products of xi(f).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorCheck {
    pub holds: bool,
    /// xi of the minor, per slot.
    pub minor_side: Vec<Word>,
    /// Slotwise products of xi(f) over the preimages of pi, reduced.
    pub product_side: Vec<Word>,
}

/// xi must turn minors into slotwise products: for g = f^pi,
/// xi(g)_i = prod of xi(f)_j over j with pi[j] = i, ascending.
pub fn check_minor_preservation(
    ctx: &XiContext,
    f: &Polymorphism,
    pi: &[usize],
    m: usize,
) -> Result<MinorCheck, XiError> {
    let g = f.minor(pi, m);
    let minor_side = ctx.xi(&g)?;
    let xi_f = ctx.xi(f)?;
    let mut product_side = Vec::with_capacity(m);
    for i in 0..m {
        let mut acc = Word::identity();
        for (j, &target) in pi.iter().enumerate() {
            if target == i {
                acc = acc.concat(&xi_f[j]);
            }
        }
        product_side.push(acc.reduced());
    }
    Ok(MinorCheck { holds: minor_side == product_side, minor_side, product_side })
}

/// Shape of a xi image: the slot words must pairwise commute, hence share
/// a primitive root s with xi(f)_i = s^{c_i}; hardness needs the exponent
/// sum to be nonzero (in particular s != 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XiStructure {
    pub commuting: bool,
    /// Rendered common root when the family commutes.
    pub root: Option<String>,
    pub exponents: Vec<i64>,
    pub exponent_sum: i64,
}

impl XiStructure {
    /// True when the structure witnesses an essential image: commuting
    /// powers of a nontrivial root with nonzero exponent sum.
    pub fn essential(&self) -> bool {
        self.commuting
            && self.exponent_sum != 0
            && self.root.as_deref().is_some_and(|r| r != "1")
    }
}

pub fn analyze_xi_structure(words: &[Word]) -> XiStructure {
    match common_root(words) {
        Some((root, exponents)) => {
            let exponent_sum = exponents.iter().sum();
            XiStructure {
                commuting: true,
                root: Some(root.render()),
                exponents,
                exponent_sum,
            }
        }
        None => {
            debug_assert!(
                words
                    .iter()
                    .enumerate()
                    .any(|(i, u)| words[i + 1..].iter().any(|v| !commutes(u, v))),
                "common_root fails only on non-commuting input"
            );
            XiStructure { commuting: false, root: None, exponents: Vec::new(), exponent_sum: 0 }
        }
    }
}
