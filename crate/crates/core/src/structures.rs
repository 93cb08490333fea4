//! Finite relational structures: parsing, homomorphisms, pp-formulas, powers.
//!
//! A structure is a finite domain of named elements together with a list of
//! named relations, each a set of tuples of domain indices. Tuples are kept
//! sorted and deduplicated so that equal structures compare equal and every
//! serialization is canonical.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

/// A relation tuple, as indices into the owning structure's domain.
pub type Tuple = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub arity: usize,
    /// Sorted lexicographically, no duplicates.
    pub tuples: Vec<Tuple>,
}

impl Relation {
    pub fn new(name: impl Into<String>, arity: usize, mut tuples: Vec<Tuple>) -> Self {
        tuples.sort();
        tuples.dedup();
        Relation { name: name.into(), arity, tuples }
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        self.tuples.binary_search_by(|u| u.as_slice().cmp(t)).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationalStructure {
    pub name: String,
    /// Element labels in file order; an element's id is its index here.
    pub domain: Vec<String>,
    pub relations: Vec<Relation>,
}

impl RelationalStructure {
    pub fn size(&self) -> usize {
        self.domain.len()
    }

    pub fn elem(&self, label: &str) -> Option<usize> {
        self.domain.iter().position(|l| l == label)
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name == name)
    }
}

/// Same signature: relation names and arities match in order.
pub fn similar(a: &RelationalStructure, b: &RelationalStructure) -> bool {
    a.relations.len() == b.relations.len()
        && a.relations
            .iter()
            .zip(&b.relations)
            .all(|(ra, rb)| ra.name == rb.name && ra.arity == rb.arity)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, col {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, col, msg: msg.into() }
}

/// Parse the line-oriented structure format:
///
/// ```text
/// structure <name>
/// domain <e1> <e2> ...
/// relation <name> <arity>
/// <one tuple per line, space-separated element labels>
/// end
/// ```
///
/// A file holds one structure; `relation`/`end` blocks may repeat. Blank
/// lines and lines starting with `#` are ignored.
pub fn parse_structure(text: &str) -> Result<RelationalStructure, ParseError> {
    let mut name: Option<String> = None;
    let mut domain: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut relations: Vec<Relation> = Vec::new();
    let mut current: Option<(String, usize, Vec<Tuple>)> = None;
    let mut saw_domain = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        // Column of a token: byte offset of its start within the raw line, 1-based.
        let col_of = |tok: &str| raw.find(tok).map_or(1, |p| p + 1);
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        match tokens[0] {
            "structure" => {
                if name.is_some() {
                    return Err(syntax(line, 1, "duplicate 'structure' header"));
                }
                if tokens.len() != 2 {
                    return Err(syntax(line, 1, "expected: structure <name>"));
                }
                name = Some(tokens[1].to_string());
            }
            "domain" => {
                if name.is_none() {
                    return Err(syntax(line, 1, "'domain' before 'structure' header"));
                }
                if saw_domain {
                    return Err(syntax(line, 1, "duplicate 'domain' line"));
                }
                if tokens.len() < 2 {
                    return Err(syntax(line, 1, "empty domain"));
                }
                for tok in &tokens[1..] {
                    if index.contains_key(*tok) {
                        return Err(syntax(line, col_of(tok), format!("duplicate element '{tok}'")));
                    }
                    index.insert(tok.to_string(), domain.len());
                    domain.push(tok.to_string());
                }
                saw_domain = true;
            }
            "relation" => {
                if !saw_domain {
                    return Err(syntax(line, 1, "'relation' before 'domain'"));
                }
                if current.is_some() {
                    return Err(syntax(line, 1, "'relation' inside an unterminated relation block"));
                }
                if tokens.len() != 3 {
                    return Err(syntax(line, 1, "expected: relation <name> <arity>"));
                }
                let arity: usize = tokens[2]
                    .parse()
                    .map_err(|_| syntax(line, col_of(tokens[2]), "arity must be a positive integer"))?;
                if arity == 0 {
                    return Err(syntax(line, col_of(tokens[2]), "arity must be a positive integer"));
                }
                if relations.iter().any(|r| r.name == tokens[1]) {
                    return Err(syntax(line, col_of(tokens[1]), format!("duplicate relation '{}'", tokens[1])));
                }
                current = Some((tokens[1].to_string(), arity, Vec::new()));
            }
            "end" => match current.take() {
                Some((rname, arity, tuples)) => relations.push(Relation::new(rname, arity, tuples)),
                None => return Err(syntax(line, 1, "'end' without an open relation block")),
            },
            _ => {
                let Some((_, arity, tuples)) = current.as_mut() else {
                    return Err(syntax(line, 1, format!("unexpected token '{}'", tokens[0])));
                };
                if tokens.len() != *arity {
                    return Err(syntax(
                        line,
                        1,
                        format!("tuple has {} entries, relation arity is {arity}", tokens.len()),
                    ));
                }
                let mut tup = Vec::with_capacity(*arity);
                for tok in &tokens {
                    match index.get(*tok) {
                        Some(&i) => tup.push(i),
                        None => return Err(syntax(line, col_of(tok), format!("unknown element '{tok}'"))),
                    }
                }
                tuples.push(tup);
            }
        }
    }
    if current.is_some() {
        return Err(syntax(text.lines().count(), 1, "unterminated relation block (missing 'end')"));
    }
    let Some(name) = name else {
        return Err(syntax(1, 1, "missing 'structure' header"));
    };
    if !saw_domain {
        return Err(syntax(1, 1, "missing 'domain' line"));
    }
    Ok(RelationalStructure { name, domain, relations })
}

/// Canonical text form; `parse_structure(serialize_structure(s)) == s`.
pub fn serialize_structure(s: &RelationalStructure) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "structure {}", s.name);
    let _ = writeln!(out, "domain {}", s.domain.join(" "));
    for rel in &s.relations {
        let _ = writeln!(out, "relation {} {}", rel.name, rel.arity);
        for t in &rel.tuples {
            let labels: Vec<&str> = t.iter().map(|&i| s.domain[i].as_str()).collect();
            let _ = writeln!(out, "{}", labels.join(" "));
        }
        let _ = writeln!(out, "end");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    /// map[i] = image of source element i in the target domain.
    pub map: Vec<usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HomError {
    #[error("structures are not similar")]
    NotSimilar,
    #[error("relation '{relation}': tuple {tuple:?} maps outside the target relation")]
    Violation { relation: String, tuple: Tuple },
    #[error("map length {got} does not cover the source domain of size {want}")]
    BadLength { got: usize, want: usize },
}

impl Homomorphism {
    /// Check the defining condition directly against every tuple.
    pub fn validate(
        &self,
        a: &RelationalStructure,
        b: &RelationalStructure,
    ) -> Result<(), HomError> {
        if !similar(a, b) {
            return Err(HomError::NotSimilar);
        }
        if self.map.len() != a.size() {
            return Err(HomError::BadLength { got: self.map.len(), want: a.size() });
        }
        for (ra, rb) in a.relations.iter().zip(&b.relations) {
            for t in &ra.tuples {
                let image: Tuple = t.iter().map(|&x| self.map[x]).collect();
                if !rb.contains(&image) {
                    return Err(HomError::Violation { relation: ra.name.clone(), tuple: t.clone() });
                }
            }
        }
        Ok(())
    }

    /// Composition: first `self`, then `g`.
    pub fn then(&self, g: &Homomorphism) -> Homomorphism {
        Homomorphism { map: self.map.iter().map(|&x| g.map[x]).collect() }
    }
}

/// Candidate value sets during backtracking, one bitset per source element.
struct Domains {
    blocks: usize,
    bits: Vec<u64>,
}

impl Domains {
    fn full(vars: usize, vals: usize) -> Domains {
        let blocks = vals.div_ceil(64).max(1);
        let mut bits = vec![0u64; vars * blocks];
        for x in 0..vars {
            for v in 0..vals {
                bits[x * blocks + v / 64] |= 1 << (v % 64);
            }
        }
        Domains { blocks, bits }
    }

    fn contains(&self, x: usize, v: usize) -> bool {
        self.bits[x * self.blocks + v / 64] >> (v % 64) & 1 == 1
    }

    fn remove(&mut self, x: usize, v: usize) {
        self.bits[x * self.blocks + v / 64] &= !(1 << (v % 64));
    }

    fn insert(&mut self, x: usize, v: usize) {
        self.bits[x * self.blocks + v / 64] |= 1 << (v % 64);
    }

    fn is_empty(&self, x: usize) -> bool {
        self.bits[x * self.blocks..(x + 1) * self.blocks].iter().all(|&b| b == 0)
    }

    /// Candidate values of `x` in ascending order.
    fn values(&self, x: usize, vals: usize) -> Vec<usize> {
        (0..vals).filter(|&v| self.contains(x, v)).collect()
    }
}

/// Occurrence positions of each source element inside relation tuples,
/// used to propagate constraints during backtracking: a tuple with one
/// unassigned element left restricts that element's candidate set.
struct HomSearch<'a> {
    a: &'a RelationalStructure,
    b: &'a RelationalStructure,
    b_sets: Vec<HashSet<&'a [usize]>>,
    /// (relation, tuple) pairs indexed by source element.
    occurs: Vec<Vec<(usize, usize)>>,
}

impl<'a> HomSearch<'a> {
    fn new(a: &'a RelationalStructure, b: &'a RelationalStructure) -> Self {
        let b_sets = b
            .relations
            .iter()
            .map(|r| r.tuples.iter().map(|t| t.as_slice()).collect())
            .collect();
        let mut occurs = vec![Vec::new(); a.size()];
        for (ri, rel) in a.relations.iter().enumerate() {
            for (ti, t) in rel.tuples.iter().enumerate() {
                let mut seen = HashSet::new();
                for &x in t {
                    if seen.insert(x) {
                        occurs[x].push((ri, ti));
                    }
                }
            }
        }
        HomSearch { a, b, b_sets, occurs }
    }

    /// Propagate the assignment of `elem`. Fully assigned tuples must land
    /// in B; tuples with exactly one unassigned element restrict its
    /// domain, recording removals on `trail` for undo. False on a closed
    /// tuple outside B or a wiped-out domain.
    fn forward_check(
        &self,
        assign: &[Option<usize>],
        domains: &mut Domains,
        trail: &mut Vec<(usize, usize)>,
        elem: usize,
    ) -> bool {
        let mut image = Vec::new();
        for &(ri, ti) in &self.occurs[elem] {
            let t = &self.a.relations[ri].tuples[ti];
            let mut open: Option<usize> = None;
            let mut closed = true;
            for &x in t {
                if assign[x].is_none() {
                    closed = false;
                    match open {
                        None => open = Some(x),
                        Some(y) if y == x => {}
                        Some(_) => {
                            open = None;
                            break;
                        }
                    }
                }
            }
            if closed {
                image.clear();
                image.extend(t.iter().map(|&x| assign[x].unwrap()));
                if !self.b_sets[ri].contains(image.as_slice()) {
                    return false;
                }
                continue;
            }
            let Some(y) = open else { continue };
            for w in domains.values(y, self.b.size()) {
                image.clear();
                image.extend(t.iter().map(|&x| if x == y { w } else { assign[x].unwrap() }));
                if !self.b_sets[ri].contains(image.as_slice()) {
                    domains.remove(y, w);
                    trail.push((y, w));
                }
            }
            if domains.is_empty(y) {
                return false;
            }
        }
        true
    }

    fn solve(&self, order: &[usize], limit: Option<usize>, out: &mut Vec<Homomorphism>) {
        let mut assign: Vec<Option<usize>> = vec![None; self.a.size()];
        let mut domains = Domains::full(self.a.size(), self.b.size());
        let mut trail: Vec<(usize, usize)> = Vec::new();
        self.recurse(order, 0, &mut assign, &mut domains, &mut trail, limit, out);
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &self,
        order: &[usize],
        depth: usize,
        assign: &mut Vec<Option<usize>>,
        domains: &mut Domains,
        trail: &mut Vec<(usize, usize)>,
        limit: Option<usize>,
        out: &mut Vec<Homomorphism>,
    ) {
        if let Some(l) = limit {
            if out.len() >= l {
                return;
            }
        }
        if depth == order.len() {
            out.push(Homomorphism { map: assign.iter().map(|v| v.unwrap()).collect() });
            return;
        }
        let elem = order[depth];
        for val in domains.values(elem, self.b.size()) {
            assign[elem] = Some(val);
            let mark = trail.len();
            if self.forward_check(assign, domains, trail, elem) {
                self.recurse(order, depth + 1, assign, domains, trail, limit, out);
            }
            while trail.len() > mark {
                let (y, w) = trail.pop().unwrap();
                domains.insert(y, w);
            }
            assign[elem] = None;
            if let Some(l) = limit {
                if out.len() >= l {
                    return;
                }
            }
        }
    }
}

/// First homomorphism A -> B found by backtracking, or None.
///
/// Elements are assigned most-constrained-first (descending tuple occurrence
/// count, ties by index), values in target domain order, so the result is
/// deterministic for fixed domain orders.
pub fn find_homomorphism(
    a: &RelationalStructure,
    b: &RelationalStructure,
) -> Result<Option<Homomorphism>, HomError> {
    if !similar(a, b) {
        return Err(HomError::NotSimilar);
    }
    if b.size() == 0 {
        return Ok(if a.size() == 0 {
            Some(Homomorphism { map: vec![] })
        } else {
            None
        });
    }
    let search = HomSearch::new(a, b);
    let mut order: Vec<usize> = (0..a.size()).collect();
    order.sort_by_key(|&x| (std::cmp::Reverse(search.occurs[x].len()), x));
    let mut out = Vec::new();
    search.solve(&order, Some(1), &mut out);
    Ok(out.pop())
}

/// All homomorphisms A -> B in lexicographic order of the map as a tuple
/// over B's domain order, truncated at `limit` if given.
pub fn enumerate_homomorphisms(
    a: &RelationalStructure,
    b: &RelationalStructure,
    limit: Option<usize>,
) -> Result<Vec<Homomorphism>, HomError> {
    if !similar(a, b) {
        return Err(HomError::NotSimilar);
    }
    if b.size() == 0 {
        return Ok(if a.size() == 0 {
            vec![Homomorphism { map: vec![] }]
        } else {
            Vec::new()
        });
    }
    let search = HomSearch::new(a, b);
    // Assign elements so each one co-occurs with as many already assigned
    // elements as possible: constraints then close early and propagation
    // prunes hard. The search order is a fixed function of the input, and
    // sorting afterwards makes the output order independent of it; with a
    // `limit` the result is the sorted first-found sample.
    let order = connectivity_order(&search);
    let mut out = Vec::new();
    search.solve(&order, limit, &mut out);
    out.sort_by(|f, g| f.map.cmp(&g.map));
    Ok(out)
}

/// Maximum cardinality order over the co-occurrence graph of source
/// elements: repeatedly pick the element with the most ordered co-occurring
/// elements, breaking ties by occurrence count then index.
fn connectivity_order(search: &HomSearch<'_>) -> Vec<usize> {
    let n = search.a.size();
    let mut neighbors: Vec<HashSet<usize>> = vec![HashSet::new(); n];
    for rel in &search.a.relations {
        for t in &rel.tuples {
            for &x in t {
                for &y in t {
                    if x != y {
                        neighbors[x].insert(y);
                    }
                }
            }
        }
    }
    let mut ordered = vec![false; n];
    let mut weight = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let pick = (0..n)
            .filter(|&x| !ordered[x])
            .max_by_key(|&x| (weight[x], search.occurs[x].len(), std::cmp::Reverse(x)))
            .unwrap();
        ordered[pick] = true;
        order.push(pick);
        for &y in &neighbors[pick] {
            if !ordered[y] {
                weight[y] += 1;
            }
        }
    }
    order
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PpAtom {
    Rel { name: String, args: Vec<String> },
    Eq { left: String, right: String },
}

/// A primitive-positive formula: existentially quantified conjunction of
/// relation atoms and equalities over free and bound variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpFormula {
    pub text: String,
    pub free_vars: Vec<String>,
    pub bound_vars: Vec<String>,
    pub atoms: Vec<PpAtom>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PpError {
    #[error("pp-formula parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown relation '{0}' in pp-formula")]
    UnknownRelation(String),
    #[error("relation '{name}' used with {got} arguments, arity is {want}")]
    ArityMismatch { name: String, got: usize, want: usize },
    #[error("variable '{0}' is not declared free or bound")]
    UndeclaredVar(String),
    #[error("variable '{0}' declared more than once")]
    DuplicateVar(String),
    #[error("pp-formula has no free variables")]
    NoFreeVars,
    #[error("evaluation exceeds the assignment cap of {0}")]
    CapExceeded(u64),
}

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn parse_sexps(text: &str) -> Result<Vec<Sexp>, PpError> {
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    while pos < bytes.len() {
        let c = bytes[pos] as char;
        if c.is_whitespace() || c == ',' {
            pos += 1;
        } else if c == '(' {
            stack.push(Vec::new());
            pos += 1;
        } else if c == ')' {
            let done = stack.pop().unwrap();
            if stack.is_empty() {
                return Err(PpError::Parse { pos, msg: "unbalanced ')'".into() });
            }
            stack.last_mut().unwrap().push(Sexp::List(done));
            pos += 1;
        } else {
            let start = pos;
            while pos < bytes.len() {
                let c = bytes[pos] as char;
                if c.is_whitespace() || c == '(' || c == ')' || c == ',' {
                    break;
                }
                pos += 1;
            }
            stack.last_mut().unwrap().push(Sexp::Atom(text[start..pos].to_string()));
        }
    }
    if stack.len() != 1 {
        return Err(PpError::Parse { pos, msg: "unbalanced '('".into() });
    }
    Ok(stack.pop().unwrap())
}

fn collect_body(
    sexp: &Sexp,
    bound: &mut Vec<String>,
    atoms: &mut Vec<PpAtom>,
) -> Result<(), PpError> {
    match sexp {
        Sexp::Atom(a) => Err(PpError::Parse { pos: 0, msg: format!("unexpected bare atom '{a}'") }),
        Sexp::List(items) => {
            let Some(Sexp::Atom(head)) = items.first() else {
                return Err(PpError::Parse { pos: 0, msg: "expected an operator or relation name".into() });
            };
            match head.as_str() {
                "and" => {
                    for item in &items[1..] {
                        collect_body(item, bound, atoms)?;
                    }
                    Ok(())
                }
                "exists" => {
                    if items.len() != 3 {
                        return Err(PpError::Parse {
                            pos: 0,
                            msg: "expected: (exists (v ...) <body>)".into(),
                        });
                    }
                    let Sexp::List(vars) = &items[1] else {
                        return Err(PpError::Parse { pos: 0, msg: "exists needs a variable list".into() });
                    };
                    for v in vars {
                        let Sexp::Atom(v) = v else {
                            return Err(PpError::Parse { pos: 0, msg: "bad variable in exists".into() });
                        };
                        bound.push(v.clone());
                    }
                    collect_body(&items[2], bound, atoms)
                }
                "=" => {
                    if items.len() != 3 {
                        return Err(PpError::Parse { pos: 0, msg: "expected: (= v w)".into() });
                    }
                    let (Sexp::Atom(l), Sexp::Atom(r)) = (&items[1], &items[2]) else {
                        return Err(PpError::Parse { pos: 0, msg: "equality needs two variables".into() });
                    };
                    atoms.push(PpAtom::Eq { left: l.clone(), right: r.clone() });
                    Ok(())
                }
                _ => {
                    let mut args = Vec::new();
                    for item in &items[1..] {
                        let Sexp::Atom(v) = item else {
                            return Err(PpError::Parse { pos: 0, msg: "relation arguments must be variables".into() });
                        };
                        args.push(v.clone());
                    }
                    atoms.push(PpAtom::Rel { name: head.clone(), args });
                    Ok(())
                }
            }
        }
    }
}

/// Parse a pp-formula. Two input styles are accepted:
///
/// - prefix: `(free x y) (exists (z) (and (E x z) (E z y)))`
/// - compact single atom: `E(x,y)` with free variables in order of appearance
pub fn parse_pp_formula(text: &str) -> Result<PpFormula, PpError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(PpError::Parse { pos: 0, msg: "empty formula".into() });
    }
    let (free_vars, mut bound_vars, atoms) = if trimmed.starts_with('(') {
        let sexps = parse_sexps(trimmed)?;
        let mut free = Vec::new();
        let mut rest = Vec::new();
        let mut seen_free = false;
        for s in sexps {
            match &s {
                Sexp::List(items)
                    if matches!(items.first(), Some(Sexp::Atom(h)) if h == "free") =>
                {
                    if seen_free {
                        return Err(PpError::Parse { pos: 0, msg: "duplicate (free ...) clause".into() });
                    }
                    for v in &items[1..] {
                        let Sexp::Atom(v) = v else {
                            return Err(PpError::Parse { pos: 0, msg: "bad variable in free clause".into() });
                        };
                        free.push(v.clone());
                    }
                    seen_free = true;
                }
                _ => rest.push(s),
            }
        }
        if !seen_free {
            return Err(PpError::Parse { pos: 0, msg: "missing (free ...) clause".into() });
        }
        let mut bound = Vec::new();
        let mut atoms = Vec::new();
        for s in &rest {
            collect_body(s, &mut bound, &mut atoms)?;
        }
        (free, bound, atoms)
    } else {
        // Compact form: Name(v1, v2, ...)
        if trimmed.matches('(').count() != 1 {
            return Err(PpError::Parse {
                pos: 0,
                msg: "compact form is a single atom 'Name(v1,...)'; use the prefix form for anything larger".into(),
            });
        }
        let open = trimmed.find('(').ok_or_else(|| PpError::Parse {
            pos: 0,
            msg: "expected 'Name(v1,...)' or a parenthesized prefix formula".into(),
        })?;
        if !trimmed.ends_with(')') {
            return Err(PpError::Parse { pos: trimmed.len(), msg: "missing closing ')'".into() });
        }
        let name = trimmed[..open].trim().to_string();
        if name.is_empty() {
            return Err(PpError::Parse { pos: 0, msg: "missing relation name".into() });
        }
        let inner = &trimmed[open + 1..trimmed.len() - 1];
        let args: Vec<String> = inner
            .split(',')
            .map(|a| a.trim().to_string())
            .filter(|a| !a.is_empty())
            .collect();
        if args.is_empty() {
            return Err(PpError::Parse { pos: open, msg: "relation atom needs arguments".into() });
        }
        let mut free = Vec::new();
        for a in &args {
            if !free.contains(a) {
                free.push(a.clone());
            }
        }
        (free, Vec::new(), vec![PpAtom::Rel { name, args }])
    };

    let mut seen = HashSet::new();
    for v in free_vars.iter().chain(bound_vars.iter()) {
        if !seen.insert(v.clone()) {
            return Err(PpError::DuplicateVar(v.clone()));
        }
    }
    if free_vars.is_empty() {
        return Err(PpError::NoFreeVars);
    }
    // Variables mentioned by atoms must be declared.
    let declared: HashSet<&String> = free_vars.iter().chain(bound_vars.iter()).collect();
    for atom in &atoms {
        let vars: Vec<&String> = match atom {
            PpAtom::Rel { args, .. } => args.iter().collect(),
            PpAtom::Eq { left, right } => vec![left, right],
        };
        for v in vars {
            if !declared.contains(v) {
                return Err(PpError::UndeclaredVar(v.clone()));
            }
        }
    }
    bound_vars.dedup();
    Ok(PpFormula { text: trimmed.to_string(), free_vars, bound_vars, atoms })
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }
    fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx != ry {
            // Keep the smaller index as representative for determinism.
            let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
            self.parent[hi] = lo;
        }
    }
}

/// Evaluate a pp-formula in a structure, returning the defined relation on
/// the free variables (tuples sorted lexicographically).
///
/// Equality atoms are eliminated first by unifying variables; the remaining
/// relation atoms are solved by backtracking join, most-instantiated atom
/// first. `cap` bounds the number of partial assignments explored.
pub fn eval_pp_formula(
    phi: &PpFormula,
    s: &RelationalStructure,
    cap: u64,
) -> Result<Relation, PpError> {
    // Variable universe: free then bound.
    let mut var_ids: HashMap<&str, usize> = HashMap::new();
    let all_vars: Vec<&String> = phi.free_vars.iter().chain(phi.bound_vars.iter()).collect();
    for (i, v) in all_vars.iter().enumerate() {
        var_ids.insert(v.as_str(), i);
    }
    let nvars = all_vars.len();

    // Validate relation atoms against the signature.
    let mut rel_atoms: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut uf = UnionFind::new(nvars);
    for atom in &phi.atoms {
        match atom {
            PpAtom::Rel { name, args } => {
                let ri = s
                    .relations
                    .iter()
                    .position(|r| &r.name == name)
                    .ok_or_else(|| PpError::UnknownRelation(name.clone()))?;
                let rel = &s.relations[ri];
                if args.len() != rel.arity {
                    return Err(PpError::ArityMismatch {
                        name: name.clone(),
                        got: args.len(),
                        want: rel.arity,
                    });
                }
                rel_atoms.push((ri, args.iter().map(|a| var_ids[a.as_str()]).collect()));
            }
            PpAtom::Eq { left, right } => {
                uf.union(var_ids[left.as_str()], var_ids[right.as_str()]);
            }
        }
    }

    // Solve over class representatives.
    let reps: Vec<usize> = (0..nvars).map(|v| uf.find(v)).collect();
    let mut assign: Vec<Option<usize>> = vec![None; nvars];
    let mut results: Vec<Tuple> = Vec::new();
    let mut budget = cap;

    // Order atoms greedily at each step: most representatives already bound.
    fn solve(
        s: &RelationalStructure,
        rel_atoms: &[(usize, Vec<usize>)],
        used: &mut Vec<bool>,
        reps: &[usize],
        free_reps: &[usize],
        assign: &mut Vec<Option<usize>>,
        results: &mut Vec<Tuple>,
        budget: &mut u64,
    ) -> Result<(), PpError> {
        if *budget == 0 {
            return Err(PpError::CapExceeded(0));
        }
        *budget -= 1;
        let next = (0..rel_atoms.len())
            .filter(|&i| !used[i])
            .max_by_key(|&i| {
                let bound = rel_atoms[i].1.iter().filter(|&&v| assign[reps[v]].is_some()).count();
                (bound, std::cmp::Reverse(i))
            });
        match next {
            None => {
                // All atoms satisfied; expand over unassigned free representatives.
                let mut unassigned: Vec<usize> =
                    free_reps.iter().copied().filter(|&r| assign[r].is_none()).collect();
                unassigned.sort_unstable();
                unassigned.dedup();
                let mut stack = vec![0usize; unassigned.len()];
                let mut i = 0usize;
                loop {
                    if i == unassigned.len() {
                        results.push(Vec::new());
                        let tup = results.last_mut().unwrap();
                        for &r in free_reps {
                            tup.push(assign[r].unwrap());
                        }
                        // free_reps lists the representative of each free var
                        // in free-var order, so the tuple is already aligned.
                        if i == 0 {
                            break;
                        }
                        i -= 1;
                        assign[unassigned[i]] = None;
                        stack[i] += 1;
                        continue;
                    }
                    if stack[i] >= s.size() {
                        if i == 0 {
                            break;
                        }
                        stack[i] = 0;
                        i -= 1;
                        assign[unassigned[i]] = None;
                        stack[i] += 1;
                        continue;
                    }
                    assign[unassigned[i]] = Some(stack[i]);
                    i += 1;
                }
                for &r in &unassigned {
                    assign[r] = None;
                }
                Ok(())
            }
            Some(ai) => {
                used[ai] = true;
                let (ri, ref vars) = rel_atoms[ai];
                'tuples: for t in &s.relations[ri].tuples {
                    let mut touched: Vec<usize> = Vec::new();
                    for (pos, &v) in vars.iter().enumerate() {
                        let r = reps[v];
                        match assign[r] {
                            Some(val) => {
                                if val != t[pos] {
                                    for &r in &touched {
                                        assign[r] = None;
                                    }
                                    continue 'tuples;
                                }
                            }
                            None => {
                                assign[r] = Some(t[pos]);
                                touched.push(r);
                            }
                        }
                    }
                    solve(s, rel_atoms, used, reps, free_reps, assign, results, budget)?;
                    for &r in &touched {
                        assign[r] = None;
                    }
                }
                used[ai] = false;
                Ok(())
            }
        }
    }

    let free_reps: Vec<usize> = (0..phi.free_vars.len()).map(|i| reps[i]).collect();
    let mut used = vec![false; rel_atoms.len()];
    solve(s, &rel_atoms, &mut used, &reps, &free_reps, &mut assign, &mut results, &mut budget)
        .map_err(|_| PpError::CapExceeded(cap))?;

    Ok(Relation::new("pp", phi.free_vars.len(), results))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PowerError {
    #[error("power domain would have {0} elements, cap is {1}")]
    DomainCap(u64, u64),
    #[error("relation '{name}' in the power would have {count} tuples, cap is {cap}")]
    RelationCap { name: String, count: u64, cap: u64 },
}

/// The n-th direct power of a structure. Domain elements are n-tuples in
/// lexicographic order, labeled `(a,b,...)`; relations act coordinatewise.
pub fn direct_power(
    a: &RelationalStructure,
    n: usize,
    cap: u64,
) -> Result<RelationalStructure, PowerError> {
    assert!(n >= 1, "direct power arity must be at least 1");
    let dom_count = (a.size() as u64).checked_pow(n as u32).filter(|&c| c <= cap);
    let Some(dom_count) = dom_count else {
        return Err(PowerError::DomainCap(u64::MAX, cap));
    };
    let _ = dom_count;

    let mut domain = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let labels: Vec<&str> = idx.iter().map(|&i| a.domain[i].as_str()).collect();
        domain.push(format!("({})", labels.join(",")));
        let mut k = n;
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < a.size() {
                break;
            }
            idx[k] = 0;
        }
        if idx.iter().all(|&i| i == 0) {
            break;
        }
    }

    // Element id of (x_1..x_n) is its mixed-radix value, matching the
    // domain order built above.
    let base = a.size();
    let mut relations = Vec::new();
    for rel in &a.relations {
        let count = (rel.tuples.len() as u64).checked_pow(n as u32);
        match count {
            Some(c) if c <= cap => {}
            _ => {
                return Err(PowerError::RelationCap {
                    name: rel.name.clone(),
                    count: count.unwrap_or(u64::MAX),
                    cap,
                })
            }
        }
        let mut tuples = Vec::new();
        let m = rel.tuples.len();
        if m > 0 {
            let mut pick = vec![0usize; n];
            loop {
                let mut t = vec![0usize; rel.arity];
                for (j, entry) in t.iter_mut().enumerate() {
                    let mut id = 0usize;
                    for &p in pick.iter() {
                        id = id * base + rel.tuples[p][j];
                    }
                    *entry = id;
                }
                tuples.push(t);
                let mut k = n;
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    pick[k] += 1;
                    if pick[k] < m {
                        break;
                    }
                    pick[k] = 0;
                }
                if pick.iter().all(|&p| p == 0) {
                    break;
                }
            }
        }
        relations.push(Relation::new(rel.name.clone(), rel.arity, tuples));
    }

    Ok(RelationalStructure { name: format!("{}^{}", a.name, n), domain, relations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rejects_unknown_element() {
        let text = "structure t\ndomain a b\nrelation E 2\na c\nend\n";
        let err = parse_structure(text).unwrap_err();
        match err {
            ParseError::Syntax { line, col, .. } => {
                assert_eq!(line, 4);
                assert_eq!(col, 3);
            }
        }
    }

    #[test]
    fn parse_rejects_arity_mismatch() {
        let text = "structure t\ndomain a b\nrelation E 2\na a a\nend\n";
        assert!(matches!(parse_structure(text), Err(ParseError::Syntax { line: 4, .. })));
    }

    #[test]
    fn parse_rejects_missing_end() {
        let text = "structure t\ndomain a\nrelation E 1\na\n";
        assert!(parse_structure(text).is_err());
    }

    #[test]
    fn compact_pp_form_orders_free_vars_by_appearance() {
        let phi = parse_pp_formula("E(y, x)").unwrap();
        assert_eq!(phi.free_vars, vec!["y", "x"]);
        assert_eq!(phi.atoms.len(), 1);
    }

    #[test]
    fn prefix_pp_form_parses_exists_and_eq() {
        let phi = parse_pp_formula("(free x y) (exists (z) (and (E x z) (= z y)))").unwrap();
        assert_eq!(phi.free_vars, vec!["x", "y"]);
        assert_eq!(phi.bound_vars, vec!["z"]);
        assert_eq!(phi.atoms.len(), 2);
    }

    #[test]
    fn pp_rejects_undeclared_variable() {
        let err = parse_pp_formula("(free x) (E x w)").unwrap_err();
        assert_eq!(err, PpError::UndeclaredVar("w".into()));
    }
}
