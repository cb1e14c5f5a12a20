//! Normal-form calculus for the subring of mod-2 Galois cohomology generated
//! by square-class symbols.
//!
//! Square classes are squarefree products of declared atoms (the constants
//! `-1` and `2`, indeterminates, and "dependent" atoms carrying extra
//! relations).  A cohomology class is an F2-sum of normalized cup-product
//! monomials of degree-1 symbols.  The rewrite rules are
//!
//! * `(x)·(x) = (-1)·(x)` for every non-constant atom `x`,
//! * `(2)·(2) = (-1)·(2)`,
//! * `(-1)·(2) = 0`,
//! * a monomial containing a dependent atom together with one of its
//!   relation partners is zero,
//! * when the context declares `-1` (resp. `2`) to be a square, every
//!   monomial containing that constant is zero.
//!
//! The rule `(-1)·(2) = 0` follows from the Steinberg relation
//! `(a)·(1-a) = 0` at `a = -1`; it is what makes identities such as
//! `w_2 = (2)·w_1` for the dihedral group hold as literal normal forms.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Index of an atom inside its [`SymbolContext`].
///
/// Ids `0` and `1` are reserved for the constants `-1` and `2`; declared
/// atoms start at `2` and are numbered in canonical (natural name) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomId(pub u32);

pub const MINUS_ONE: AtomId = AtomId(0);
pub const TWO: AtomId = AtomId(1);

const FIRST_FREE_ID: u32 = 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymbolError {
    #[error("atom `{0}` is not declared in this context")]
    UndeclaredAtom(String),
    #[error("atom id {0} out of range for this context")]
    UnknownAtomId(u32),
    #[error("duplicate atom name `{0}`")]
    DuplicateAtom(String),
    #[error("invalid atom name `{0}`")]
    InvalidName(String),
    #[error("dependent atom `{0}` lists itself as a relation partner")]
    SelfPartner(String),
    #[error("residue at a constant symbol is not defined")]
    ResidueAtConstant,
    #[error("dependent atom `{0}` has no declared residue specialization")]
    MissingSpecialization(String),
    #[error("monomial `{0}` does not occur in the supplied basis")]
    TermOutsideBasis(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// An element of `K^x / K^x2`, stored as its squarefree support.
///
/// Multiplication of square classes is symmetric difference of supports;
/// the trivial class has empty support.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default, Hash)]
pub struct SquareClass {
    support: BTreeSet<AtomId>,
}

impl SquareClass {
    pub fn trivial() -> Self {
        SquareClass::default()
    }

    pub fn from_atoms<I: IntoIterator<Item = AtomId>>(atoms: I) -> Self {
        // exponents are mod 2: atoms occurring twice cancel
        let mut support = BTreeSet::new();
        for a in atoms {
            if !support.insert(a) {
                support.remove(&a);
            }
        }
        SquareClass { support }
    }

    pub fn is_trivial(&self) -> bool {
        self.support.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.support.iter().copied()
    }

    pub fn contains(&self, a: AtomId) -> bool {
        self.support.contains(&a)
    }

    /// Group law of `K^x / K^x2`.
    pub fn product(&self, other: &SquareClass) -> SquareClass {
        let support = self
            .support
            .symmetric_difference(&other.support)
            .copied()
            .collect();
        SquareClass { support }
    }
}

/// A normalized cup-product monomial `(-1)^a·(2)^e·(x_1)···(x_k)`.
///
/// Invariants: `e = 1` implies `a = 0` (because `(-1)·(2) = 0`), `rest` is
/// strictly increasing and contains non-constant atoms only.  The zero
/// monomial is not representable; operations return `Option` or drop zero
/// terms instead.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    minus_one_exp: u32,
    two_flag: bool,
    rest: Vec<AtomId>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial {
            minus_one_exp: 0,
            two_flag: false,
            rest: Vec::new(),
        }
    }

    pub fn degree(&self) -> u32 {
        self.minus_one_exp + u32::from(self.two_flag) + self.rest.len() as u32
    }

    pub fn minus_one_exp(&self) -> u32 {
        self.minus_one_exp
    }

    pub fn has_two(&self) -> bool {
        self.two_flag
    }

    pub fn rest(&self) -> &[AtomId] {
        &self.rest
    }

    pub fn contains(&self, a: AtomId) -> bool {
        match a {
            MINUS_ONE => self.minus_one_exp > 0,
            TWO => self.two_flag,
            _ => self.rest.binary_search(&a).is_ok(),
        }
    }

    /// Sequence of factor ranks used for the canonical degree-lex order:
    /// `(-1)` factors first, then `(2)`, then atoms in id order.
    fn factor_ranks(&self) -> impl Iterator<Item = u32> + '_ {
        std::iter::repeat_n(0u32, self.minus_one_exp as usize)
            .chain(std::iter::once(1u32).take(usize::from(self.two_flag)))
            .chain(self.rest.iter().map(|a| a.0 + FIRST_FREE_ID))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.factor_ranks().cmp(other.factor_ranks()))
    }
}

/// An F2-sum of normalized monomials.  May be inhomogeneous so that total
/// Stiefel-Whitney classes can be manipulated directly.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct CohClass {
    terms: BTreeSet<Monomial>,
}

impl CohClass {
    pub fn zero() -> Self {
        CohClass::default()
    }

    pub fn one() -> Self {
        CohClass::from_monomial(Monomial::one())
    }

    pub fn from_monomial(m: Monomial) -> Self {
        let mut terms = BTreeSet::new();
        terms.insert(m);
        CohClass { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// F2 addition: symmetric difference of term sets.
    pub fn add(&self, other: &CohClass) -> CohClass {
        let terms = self
            .terms
            .symmetric_difference(&other.terms)
            .cloned()
            .collect();
        CohClass { terms }
    }

    fn toggle(&mut self, m: Monomial) {
        if !self.terms.insert(m.clone()) {
            self.terms.remove(&m);
        }
    }

    /// The sum of the degree-`d` terms.
    pub fn degree_component(&self, d: u32) -> CohClass {
        CohClass {
            terms: self
                .terms
                .iter()
                .filter(|m| m.degree() == d)
                .cloned()
                .collect(),
        }
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Drops every term containing the given atom.  Used by the residue
    /// cascade of the dihedral freeness check to eliminate forced markers.
    pub fn without_atom(&self, a: AtomId) -> CohClass {
        CohClass {
            terms: self
                .terms
                .iter()
                .filter(|m| !m.contains(a))
                .cloned()
                .collect(),
        }
    }
}

impl std::ops::Add for &CohClass {
    type Output = CohClass;
    fn add(self, rhs: &CohClass) -> CohClass {
        self.add(rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct DependentData {
    partners: BTreeSet<AtomId>,
    /// `None` when no specialization was declared; the map sends atoms to
    /// their square class in the residue field (trivial class = the symbol
    /// dies there).
    specialization: Option<BTreeMap<AtomId, SquareClass>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct AtomData {
    name: String,
    dependent: Option<DependentData>,
}

/// Context of declared atoms plus the `-1`/`2` square flags.  Immutable
/// after construction; all operations are pure functions of their inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolContext {
    atoms: Vec<AtomData>,
    by_name: BTreeMap<String, AtomId>,
    minus_one_square: bool,
    two_square: bool,
}

/// Natural ordering of atom names: alphabetic prefix first, then the numeric
/// suffix compared as a number, so `t2 < t10`.
fn name_key(name: &str) -> (&str, Option<u64>) {
    let split = name
        .rfind(|c: char| !c.is_ascii_digit())
        .map(|i| i + 1)
        .unwrap_or(0);
    let (prefix, digits) = name.split_at(split);
    (prefix, digits.parse().ok())
}

fn name_cmp(a: &str, b: &str) -> Ordering {
    name_key(a).cmp(&name_key(b))
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !name.chars().next().unwrap().is_ascii_digit()
}

enum PendingKind {
    Indeterminate,
    Dependent {
        partners: Vec<String>,
        specialization: Option<Vec<(String, Vec<String>)>>,
    },
}

/// Builder for [`SymbolContext`].  Atoms are declared by name; ids are
/// assigned in canonical order when the context is built.
pub struct ContextBuilder {
    pending: Vec<(String, PendingKind)>,
    minus_one_square: bool,
    two_square: bool,
}

impl Default for ContextBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl ContextBuilder {
    pub fn new() -> Self {
        ContextBuilder {
            pending: Vec::new(),
            minus_one_square: false,
            two_square: false,
        }
    }

    pub fn minus_one_square(mut self, flag: bool) -> Self {
        self.minus_one_square = flag;
        self
    }

    pub fn two_square(mut self, flag: bool) -> Self {
        self.two_square = flag;
        self
    }

    pub fn indeterminate(mut self, name: &str) -> Self {
        self.pending
            .push((name.to_owned(), PendingKind::Indeterminate));
        self
    }

    pub fn indeterminates<'a, I: IntoIterator<Item = &'a str>>(mut self, names: I) -> Self {
        for n in names {
            self = self.indeterminate(n);
        }
        self
    }

    /// Declares a dependent atom.  `partners` are the atoms whose degree-1
    /// symbols cup-multiply this one to zero; `specialization`, when given,
    /// maps atoms to their square class in the residue field at this atom
    /// (an empty factor list means the symbol vanishes there).
    pub fn dependent(
        mut self,
        name: &str,
        partners: &[&str],
        specialization: Option<&[(&str, &[&str])]>,
    ) -> Self {
        self.pending.push((
            name.to_owned(),
            PendingKind::Dependent {
                partners: partners.iter().map(|s| (*s).to_owned()).collect(),
                specialization: specialization.map(|entries| {
                    entries
                        .iter()
                        .map(|(a, c)| {
                            ((*a).to_owned(), c.iter().map(|s| (*s).to_owned()).collect())
                        })
                        .collect()
                }),
            },
        ));
        self
    }

    pub fn build(self) -> Result<SymbolContext, SymbolError> {
        let mut names: Vec<&str> = self.pending.iter().map(|(n, _)| n.as_str()).collect();
        names.sort_by(|a, b| name_cmp(a, b));
        let mut by_name = BTreeMap::new();
        for (i, n) in names.iter().enumerate() {
            if !valid_name(n) {
                return Err(SymbolError::InvalidName((*n).to_owned()));
            }
            if by_name
                .insert((*n).to_owned(), AtomId(i as u32 + FIRST_FREE_ID))
                .is_some()
            {
                return Err(SymbolError::DuplicateAtom((*n).to_owned()));
            }
        }
        let lookup = |n: &str| -> Result<AtomId, SymbolError> {
            by_name
                .get(n)
                .copied()
                .ok_or_else(|| SymbolError::UndeclaredAtom(n.to_owned()))
        };
        let mut atoms = vec![
            AtomData {
                name: String::new(),
                dependent: None
            };
            names.len()
        ];
        for (name, kind) in &self.pending {
            let id = by_name[name];
            let dependent = match kind {
                PendingKind::Indeterminate => None,
                PendingKind::Dependent {
                    partners,
                    specialization,
                } => {
                    let mut ps = BTreeSet::new();
                    for p in partners {
                        let pid = lookup(p)?;
                        if pid == id {
                            return Err(SymbolError::SelfPartner(name.clone()));
                        }
                        ps.insert(pid);
                    }
                    let spec = match specialization {
                        None => None,
                        Some(entries) => {
                            let mut map = BTreeMap::new();
                            for (a, cls) in entries {
                                let aid = lookup(a)?;
                                let mut sc = SquareClass::trivial();
                                for f in cls {
                                    sc = sc.product(&SquareClass::from_atoms([lookup(f)?]));
                                }
                                map.insert(aid, sc);
                            }
                            Some(map)
                        }
                    };
                    Some(DependentData {
                        partners: ps,
                        specialization: spec,
                    })
                }
            };
            atoms[(id.0 - FIRST_FREE_ID) as usize] = AtomData {
                name: name.clone(),
                dependent,
            };
        }
        Ok(SymbolContext {
            atoms,
            by_name,
            minus_one_square: self.minus_one_square,
            two_square: self.two_square,
        })
    }
}

impl SymbolContext {
    pub fn minus_one_is_square(&self) -> bool {
        self.minus_one_square
    }

    pub fn two_is_square(&self) -> bool {
        self.two_square
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom(&self, name: &str) -> Result<AtomId, SymbolError> {
        match name {
            "-1" => Ok(MINUS_ONE),
            "2" => Ok(TWO),
            _ => self
                .by_name
                .get(name)
                .copied()
                .ok_or_else(|| SymbolError::UndeclaredAtom(name.to_owned())),
        }
    }

    pub fn atom_name(&self, a: AtomId) -> &str {
        match a {
            MINUS_ONE => "-1",
            TWO => "2",
            _ => &self.atoms[(a.0 - FIRST_FREE_ID) as usize].name,
        }
    }

    pub fn is_dependent(&self, a: AtomId) -> bool {
        self.atom_data(a).is_some_and(|d| d.dependent.is_some())
    }

    /// All declared (non-constant) atom ids in canonical order.
    pub fn declared_atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        (0..self.atoms.len() as u32).map(|i| AtomId(i + FIRST_FREE_ID))
    }

    fn atom_data(&self, a: AtomId) -> Option<&AtomData> {
        if a.0 < FIRST_FREE_ID {
            None
        } else {
            self.atoms.get((a.0 - FIRST_FREE_ID) as usize)
        }
    }

    fn check_atom(&self, a: AtomId) -> Result<(), SymbolError> {
        if a.0 < FIRST_FREE_ID || ((a.0 - FIRST_FREE_ID) as usize) < self.atoms.len() {
            Ok(())
        } else {
            Err(SymbolError::UnknownAtomId(a.0))
        }
    }

    /// Square class from atom names (`"-1"` and `"2"` refer to the
    /// constants).  Repeated names cancel mod squares.
    pub fn square_class(&self, names: &[&str]) -> Result<SquareClass, SymbolError> {
        let mut ids = Vec::with_capacity(names.len());
        for n in names {
            ids.push(self.atom(n)?);
        }
        Ok(SquareClass::from_atoms(ids))
    }

    /// Normalizes raw monomial data, returning `None` when the monomial is
    /// zero under the context rules.  The atom list may contain the
    /// constants and repeats; `(x)^k` folds to `(-1)^(k-1)·(x)`.
    pub fn normalize_monomial(
        &self,
        minus_one_exp: u32,
        two_flag: bool,
        rest: &[AtomId],
    ) -> Option<Monomial> {
        let mut exp = minus_one_exp;
        let mut twos = u32::from(two_flag);
        let mut sorted: Vec<AtomId> = Vec::with_capacity(rest.len());
        let mut counted: BTreeMap<AtomId, u32> = BTreeMap::new();
        for &a in rest {
            match a {
                MINUS_ONE => exp += 1,
                TWO => twos += 1,
                _ => *counted.entry(a).or_insert(0) += 1,
            }
        }
        if twos > 1 {
            exp += twos - 1;
        }
        for (a, k) in counted {
            exp += k - 1;
            sorted.push(a);
        }
        self.finish_monomial(exp, twos > 0, sorted)
    }

    fn finish_monomial(&self, exp: u32, two: bool, rest: Vec<AtomId>) -> Option<Monomial> {
        if two && exp > 0 {
            return None; // (-1)·(2) = 0
        }
        if self.minus_one_square && exp > 0 {
            return None;
        }
        if self.two_square && two {
            return None;
        }
        for &a in &rest {
            if let Some(dep) = self.atom_data(a).and_then(|d| d.dependent.as_ref()) {
                for p in &dep.partners {
                    let hit = match *p {
                        MINUS_ONE => exp > 0,
                        TWO => two,
                        q => rest.binary_search(&q).is_ok(),
                    };
                    if hit {
                        return None;
                    }
                }
            }
        }
        Some(Monomial {
            minus_one_exp: exp,
            two_flag: two,
            rest,
        })
    }

    fn mul_monomials(&self, a: &Monomial, b: &Monomial) -> Option<Monomial> {
        let mut exp = a.minus_one_exp + b.minus_one_exp;
        if a.two_flag && b.two_flag {
            exp += 1; // (2)·(2) = (-1)·(2)
        }
        let two = a.two_flag || b.two_flag;
        let mut rest = Vec::with_capacity(a.rest.len() + b.rest.len());
        let (mut i, mut j) = (0, 0);
        while i < a.rest.len() && j < b.rest.len() {
            match a.rest[i].cmp(&b.rest[j]) {
                Ordering::Less => {
                    rest.push(a.rest[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    rest.push(b.rest[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    // (x)·(x) = (-1)·(x)
                    exp += 1;
                    rest.push(a.rest[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        rest.extend_from_slice(&a.rest[i..]);
        rest.extend_from_slice(&b.rest[j..]);
        self.finish_monomial(exp, two, rest)
    }

    /// Degree-1 symbol map `a -> (a)`, additive in the square-class group
    /// law: `sym(c·c') = sym(c) + sym(c')`.
    pub fn sym(&self, c: &SquareClass) -> Result<CohClass, SymbolError> {
        let mut out = CohClass::zero();
        for a in c.support() {
            self.check_atom(a)?;
            let m = match a {
                MINUS_ONE => self.finish_monomial(1, false, Vec::new()),
                TWO => self.finish_monomial(0, true, Vec::new()),
                _ => self.finish_monomial(0, false, vec![a]),
            };
            if let Some(m) = m {
                out.toggle(m);
            }
        }
        Ok(out)
    }

    /// Cup product; bilinear, associative, commutative over F2.
    pub fn cup(&self, a: &CohClass, b: &CohClass) -> CohClass {
        let mut out = CohClass::zero();
        for x in a.terms() {
            for y in b.terms() {
                if let Some(m) = self.mul_monomials(x, y) {
                    out.toggle(m);
                }
            }
        }
        out
    }

    pub fn cup_all<'a, I: IntoIterator<Item = &'a CohClass>>(&self, factors: I) -> CohClass {
        let mut acc = CohClass::one();
        for f in factors {
            acc = self.cup(&acc, f);
        }
        acc
    }

    /// Residue map at the valuation attached to `p`: writes `c = b + (p)·g`
    /// with `b`, `g` free of `p` and returns `g` after applying `p`'s
    /// residue specialization (the identity for indeterminates).
    pub fn residue_at(&self, c: &CohClass, p: AtomId) -> Result<CohClass, SymbolError> {
        if p.0 < FIRST_FREE_ID {
            return Err(SymbolError::ResidueAtConstant);
        }
        self.check_atom(p)?;
        let spec: Option<&BTreeMap<AtomId, SquareClass>> =
            match self.atom_data(p).and_then(|d| d.dependent.as_ref()) {
                Some(dep) => Some(dep.specialization.as_ref().ok_or_else(|| {
                    SymbolError::MissingSpecialization(self.atom_name(p).to_owned())
                })?),
                None => None,
            };
        let mut out = CohClass::zero();
        for m in c.terms() {
            if !m.contains(p) {
                continue;
            }
            let keep: Vec<AtomId> = m.rest.iter().copied().filter(|&a| a != p).collect();
            match spec {
                None => {
                    if let Some(g) = self.finish_monomial(m.minus_one_exp, m.two_flag, keep) {
                        out.toggle(g);
                    }
                }
                Some(map) => {
                    let base: Vec<AtomId> = keep
                        .iter()
                        .copied()
                        .filter(|a| !map.contains_key(a))
                        .collect();
                    let Some(g) = self.finish_monomial(m.minus_one_exp, m.two_flag, base) else {
                        continue;
                    };
                    let mut cls = CohClass::from_monomial(g);
                    for a in keep.iter().filter(|a| map.contains_key(a)) {
                        cls = self.cup(&cls, &self.sym(&map[a])?);
                    }
                    out = out.add(&cls);
                }
            }
        }
        Ok(out)
    }

    /// Characteristic vector of the term set of `c` over an ordered monomial
    /// basis.
    pub fn support_vector(
        &self,
        c: &CohClass,
        basis: &[Monomial],
    ) -> Result<Vec<bool>, SymbolError> {
        let index: BTreeMap<&Monomial, usize> =
            basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut v = vec![false; basis.len()];
        for t in c.terms() {
            match index.get(t) {
                Some(&i) => v[i] = true,
                None => return Err(SymbolError::TermOutsideBasis(self.render_monomial(t))),
            }
        }
        Ok(v)
    }

    pub fn render_monomial(&self, m: &Monomial) -> String {
        if m.degree() == 0 {
            return "1".to_owned();
        }
        let mut parts = Vec::new();
        match m.minus_one_exp {
            0 => {}
            1 => parts.push("(-1)".to_owned()),
            k => parts.push(format!("(-1)^{k}")),
        }
        if m.two_flag {
            parts.push("(2)".to_owned());
        }
        for a in &m.rest {
            parts.push(format!("({})", self.atom_name(*a)));
        }
        parts.join("\u{b7}")
    }

    /// Canonical text rendering: `"0"` or `"+"`-joined monomials in
    /// degree-lex order.  This is the bit-exact format used in reports.
    pub fn render_class(&self, c: &CohClass) -> String {
        if c.is_zero() {
            return "0".to_owned();
        }
        c.terms()
            .map(|m| self.render_monomial(m))
            .collect::<Vec<_>>()
            .join("+")
    }

    pub fn render_square_class(&self, c: &SquareClass) -> String {
        if c.is_trivial() {
            return "1".to_owned();
        }
        c.support()
            .map(|a| self.atom_name(a).to_owned())
            .collect::<Vec<_>>()
            .join("\u{b7}")
    }

    /// Parses the canonical rendering back into a class.  Inverse of
    /// [`render_class`](Self::render_class) on normalized classes.
    pub fn parse_class(&self, input: &str) -> Result<CohClass, SymbolError> {
        let s = input.trim();
        if s == "0" {
            return Ok(CohClass::zero());
        }
        let mut out = CohClass::zero();
        let mut offset = 0usize;
        for chunk in s.split('+') {
            let m = self.parse_monomial(chunk, offset)?;
            if let Some(m) = m {
                out.toggle(m);
            }
            offset += chunk.len() + 1;
        }
        Ok(out)
    }

    fn parse_monomial(&self, chunk: &str, base: usize) -> Result<Option<Monomial>, SymbolError> {
        let t = chunk.trim();
        if t == "1" {
            return Ok(Some(Monomial::one()));
        }
        let mut exp = 0u32;
        let mut two = false;
        let mut rest = Vec::new();
        for factor in t.split('\u{b7}') {
            let f = factor.trim();
            let err = |msg: &str| SymbolError::Parse {
                pos: base,
                msg: msg.to_owned(),
            };
            if let Some(tail) = f.strip_prefix("(-1)") {
                if tail.is_empty() {
                    exp += 1;
                } else if let Some(k) = tail.strip_prefix('^') {
                    exp += k
                        .parse::<u32>()
                        .map_err(|_| err("invalid exponent on (-1)"))?;
                } else {
                    return Err(err("unexpected characters after (-1)"));
                }
            } else if f == "(2)" {
                if two {
                    return Err(err("repeated (2) factor"));
                }
                two = true;
            } else if let Some(name) = f.strip_prefix('(').and_then(|g| g.strip_suffix(')')) {
                rest.push(self.atom(name)?);
            } else {
                return Err(err(&format!("cannot parse factor `{f}`")));
            }
        }
        Ok(self.normalize_monomial(exp, two, &rest))
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx_tuv() -> SymbolContext {
        ContextBuilder::new()
            .indeterminates(["t", "u", "v"])
            .build()
            .unwrap()
    }

    /// Context of the dihedral-group versal torsor: t, u, v free and the
    /// norm atom N = u^2 - v^2 t with (N)·(t) = 0 and residue
    /// specialization (t) -> 0 (t becomes the square (u/v)^2 there).
    fn ctx_d4() -> SymbolContext {
        ContextBuilder::new()
            .indeterminates(["t", "u", "v"])
            .dependent("N", &["t"], Some(&[("t", &[])]))
            .build()
            .unwrap()
    }

    #[test]
    fn sym_of_trivial_class_is_zero() {
        let ctx = ctx_tuv();
        assert!(ctx.sym(&SquareClass::trivial()).unwrap().is_zero());
    }

    #[test]
    fn sym_expands_bilinearly() {
        let ctx = ctx_tuv();
        let c = ctx.square_class(&["2", "t"]).unwrap();
        assert_eq!(ctx.render_class(&ctx.sym(&c).unwrap()), "(2)+(t)");
    }

    #[test]
    fn sym_exponents_mod_two() {
        let ctx = ctx_tuv();
        let c = ctx.square_class(&["u", "t", "u"]).unwrap();
        assert_eq!(ctx.render_class(&ctx.sym(&c).unwrap()), "(t)");
    }

    #[test]
    fn cup_square_rule_with_minus_one_square() {
        let ctx = ContextBuilder::new()
            .indeterminate("t")
            .minus_one_square(true)
            .build()
            .unwrap();
        let t = ctx.sym(&ctx.square_class(&["t"]).unwrap()).unwrap();
        assert!(ctx.cup(&t, &t).is_zero());
    }

    #[test]
    fn cup_square_rule_without_flags() {
        let ctx = ctx_tuv();
        let t = ctx.sym(&ctx.square_class(&["t"]).unwrap()).unwrap();
        assert_eq!(ctx.render_class(&ctx.cup(&t, &t)), "(-1)\u{b7}(t)");
    }

    #[test]
    fn cup_two_with_two_t() {
        // (2)·(2t) = (2)(2) + (2)(t) = (-1)(2) + (2)(t) = (2)·(t)
        let ctx = ctx_tuv();
        let two = ctx.sym(&ctx.square_class(&["2"]).unwrap()).unwrap();
        let two_t = ctx.sym(&ctx.square_class(&["2", "t"]).unwrap()).unwrap();
        assert_eq!(ctx.render_class(&ctx.cup(&two, &two_t)), "(2)\u{b7}(t)");
    }

    #[test]
    fn cup_distinct_free_atoms() {
        let ctx = ctx_tuv();
        let u = ctx.sym(&ctx.square_class(&["u"]).unwrap()).unwrap();
        let v = ctx.sym(&ctx.square_class(&["v"]).unwrap()).unwrap();
        assert_eq!(ctx.render_class(&ctx.cup(&u, &v)), "(u)\u{b7}(v)");
    }

    #[test]
    fn dependent_relation_kills_monomial() {
        let ctx = ctx_d4();
        let n = ctx.sym(&ctx.square_class(&["N"]).unwrap()).unwrap();
        let t = ctx.sym(&ctx.square_class(&["t"]).unwrap()).unwrap();
        assert!(ctx.cup(&n, &t).is_zero());
    }

    #[test]
    fn residue_basic() {
        let ctx = ctx_tuv();
        let t = ctx.atom("t").unwrap();
        let tu = ctx.cup(
            &ctx.sym(&ctx.square_class(&["t"]).unwrap()).unwrap(),
            &ctx.sym(&ctx.square_class(&["u"]).unwrap()).unwrap(),
        );
        assert_eq!(ctx.render_class(&ctx.residue_at(&tu, t).unwrap()), "(u)");
        let uv = ctx.cup(
            &ctx.sym(&ctx.square_class(&["u"]).unwrap()).unwrap(),
            &ctx.sym(&ctx.square_class(&["v"]).unwrap()).unwrap(),
        );
        assert!(ctx.residue_at(&uv, t).unwrap().is_zero());
    }

    #[test]
    fn residue_at_dependent_applies_specialization() {
        // residue_at(l2·(tN) + l3·(2u)·(-1·t·N), N) = l2 + l3·(2u),
        // with markers l2, l3 carried as extra free atoms.
        let ctx = ContextBuilder::new()
            .indeterminates(["t", "u", "v", "l2", "l3"])
            .dependent("N", &["t"], Some(&[("t", &[])]))
            .build()
            .unwrap();
        let sym = |names: &[&str]| ctx.sym(&ctx.square_class(names).unwrap()).unwrap();
        let term2 = ctx.cup(&sym(&["l2"]), &sym(&["t", "N"]));
        let term3 = ctx.cup_all([&sym(&["l3"]), &sym(&["2", "u"]), &sym(&["-1", "t", "N"])]);
        let class = term2.add(&term3);
        let n = ctx.atom("N").unwrap();
        let expected = ctx.parse_class("(l2)+(2)\u{b7}(l3)+(l3)\u{b7}(u)").unwrap();
        assert_eq!(ctx.residue_at(&class, n).unwrap(), expected);
    }

    #[test]
    fn residue_requires_specialization() {
        let ctx = ContextBuilder::new()
            .indeterminate("t")
            .dependent("M", &["t"], None)
            .build()
            .unwrap();
        let m = ctx.atom("M").unwrap();
        let cls = ctx.sym(&ctx.square_class(&["M"]).unwrap()).unwrap();
        assert_eq!(
            ctx.residue_at(&cls, m),
            Err(SymbolError::MissingSpecialization("M".to_owned()))
        );
    }

    #[test]
    fn support_vector_matches_spec_examples() {
        let ctx = ctx_tuv();
        let parse = |s: &str| ctx.parse_class(s).unwrap();
        let basis: Vec<Monomial> = parse("(t)+(u)+(t)\u{b7}(u)").terms().cloned().collect();
        let v = ctx.support_vector(&parse("(t)+(u)"), &basis).unwrap();
        assert_eq!(v, vec![true, true, false]);
        assert_eq!(
            ctx.support_vector(&CohClass::zero(), &basis).unwrap(),
            vec![false, false, false]
        );
        assert_eq!(
            ctx.support_vector(&parse("(t)\u{b7}(u)"), &basis).unwrap(),
            vec![false, false, true]
        );
        assert!(ctx.support_vector(&parse("(v)"), &basis).is_err());
    }

    #[test]
    fn undeclared_atom_is_context_error() {
        let ctx = ctx_tuv();
        assert_eq!(
            ctx.square_class(&["w"]),
            Err(SymbolError::UndeclaredAtom("w".to_owned()))
        );
    }

    #[test]
    fn flags_kill_constant_factors() {
        let ctx = ContextBuilder::new()
            .indeterminate("t")
            .minus_one_square(true)
            .two_square(true)
            .build()
            .unwrap();
        assert!(ctx
            .sym(&ctx.square_class(&["-1"]).unwrap())
            .unwrap()
            .is_zero());
        assert!(ctx
            .sym(&ctx.square_class(&["2"]).unwrap())
            .unwrap()
            .is_zero());
        assert_eq!(
            ctx.render_class(&ctx.sym(&ctx.square_class(&["2", "t"]).unwrap()).unwrap()),
            "(t)"
        );
    }

    #[test]
    fn render_parse_roundtrip() {
        let ctx = ctx_d4();
        for s in [
            "0",
            "1",
            "(t)",
            "(-1)\u{b7}(t)",
            "(-1)^3\u{b7}(u)\u{b7}(v)",
            "(2)\u{b7}(N)",
            "1+(t)+(t)\u{b7}(u)",
        ] {
            let c = ctx.parse_class(s).unwrap();
            assert_eq!(ctx.render_class(&c), s);
        }
    }

    #[test]
    fn normalize_folds_constants_in_the_atom_list() {
        let ctx = ctx_tuv();
        let t = ctx.atom("t").unwrap();
        // (2)·(2)·(t) = (-1)·(2)·(t) = 0
        assert_eq!(ctx.normalize_monomial(0, false, &[TWO, TWO, t]), None);
        // (-1)·(t)·(t) = (-1)^2·(t)
        let m = ctx
            .normalize_monomial(0, false, &[MINUS_ONE, t, t])
            .unwrap();
        assert_eq!(ctx.render_monomial(&m), "(-1)^2\u{b7}(t)");
    }

    #[test]
    fn monomial_order_is_degree_lex() {
        let ctx = ctx_tuv();
        let c = ctx
            .parse_class("(u)\u{b7}(v)+(t)+1+(-1)+(2)\u{b7}(t)+(-1)^2")
            .unwrap();
        assert_eq!(
            ctx.render_class(&c),
            "1+(-1)+(t)+(-1)^2+(2)\u{b7}(t)+(u)\u{b7}(v)"
        );
    }

    #[test]
    fn natural_name_order() {
        let ctx = ContextBuilder::new()
            .indeterminates(["t10", "t2", "u1"])
            .build()
            .unwrap();
        let ids: Vec<&str> = ctx.declared_atoms().map(|a| ctx.atom_name(a)).collect();
        assert_eq!(ids, vec!["t2", "t10", "u1"]);
    }

    /// With -1 and 2 square, the normalized monomials on n free atoms are
    /// exactly the squarefree subsets and cup is exterior multiplication.
    /// The oracle multiplies subsets directly: disjoint union or zero.
    #[test]
    fn exterior_algebra_oracle_up_to_n4() {
        let n = 4usize;
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        let ctx = ContextBuilder::new()
            .indeterminates(names.iter().map(String::as_str))
            .minus_one_square(true)
            .two_square(true)
            .build()
            .unwrap();
        let atoms: Vec<AtomId> = ctx.declared_atoms().collect();
        let of_mask = |mask: usize| -> Vec<AtomId> {
            (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| atoms[i])
                .collect()
        };
        // every squarefree subset survives normalization, nothing else is new
        let mut seen = BTreeSet::new();
        for mask in 0..1usize << n {
            let m = ctx.normalize_monomial(0, false, &of_mask(mask)).unwrap();
            assert_eq!(m.rest().len(), mask.count_ones() as usize);
            seen.insert(m);
        }
        assert_eq!(seen.len(), 1 << n);
        // cup on monomials = exterior product: zero unless disjoint
        for a in 0..1usize << n {
            for b in 0..1usize << n {
                let ma = ctx.normalize_monomial(0, false, &of_mask(a)).unwrap();
                let mb = ctx.normalize_monomial(0, false, &of_mask(b)).unwrap();
                let prod = ctx.cup(&CohClass::from_monomial(ma), &CohClass::from_monomial(mb));
                if a & b != 0 {
                    assert!(prod.is_zero(), "overlapping subsets must cup to zero");
                } else {
                    let expected = ctx.normalize_monomial(0, false, &of_mask(a | b)).unwrap();
                    assert_eq!(prod, CohClass::from_monomial(expected));
                }
            }
        }
    }

    mod proptests {
        use super::*;
        use proptest::prelude::*;

        fn test_ctx(minus_one_square: bool, two_square: bool) -> SymbolContext {
            ContextBuilder::new()
                .indeterminates(["a", "b", "c", "d", "e"])
                .minus_one_square(minus_one_square)
                .two_square(two_square)
                .build()
                .unwrap()
        }

        prop_compose! {
            fn raw_monomial()(exp in 0u32..3, two in any::<bool>(),
                              picks in prop::collection::vec(0u32..5, 0..6)) -> (u32, bool, Vec<u32>) {
                (exp, two, picks)
            }
        }

        fn class_from(ctx: &SymbolContext, raws: &[(u32, bool, Vec<u32>)]) -> CohClass {
            let mut out = CohClass::zero();
            for (exp, two, picks) in raws {
                let atoms: Vec<AtomId> = picks.iter().map(|&p| AtomId(p + 2)).collect();
                if let Some(m) = ctx.normalize_monomial(*exp, *two, &atoms) {
                    out = out.add(&CohClass::from_monomial(m));
                }
            }
            out
        }

        proptest! {
            #[test]
            fn normalization_idempotent(raw in raw_monomial(),
                                        f1 in any::<bool>(), f2 in any::<bool>()) {
                let ctx = test_ctx(f1, f2);
                let atoms: Vec<AtomId> = raw.2.iter().map(|&p| AtomId(p + 2)).collect();
                if let Some(m) = ctx.normalize_monomial(raw.0, raw.1, &atoms) {
                    let again = ctx
                        .normalize_monomial(m.minus_one_exp(), m.has_two(), m.rest())
                        .expect("normal forms stay nonzero");
                    prop_assert_eq!(m, again);
                }
            }

            #[test]
            fn cup_commutative_associative(
                ra in prop::collection::vec(raw_monomial(), 0..5),
                rb in prop::collection::vec(raw_monomial(), 0..5),
                rc in prop::collection::vec(raw_monomial(), 0..5),
                f1 in any::<bool>(), f2 in any::<bool>(),
            ) {
                let ctx = test_ctx(f1, f2);
                let (a, b, c) = (class_from(&ctx, &ra), class_from(&ctx, &rb), class_from(&ctx, &rc));
                prop_assert_eq!(ctx.cup(&a, &b), ctx.cup(&b, &a));
                prop_assert_eq!(ctx.cup(&ctx.cup(&a, &b), &c), ctx.cup(&a, &ctx.cup(&b, &c)));
            }

            #[test]
            fn sym_is_additive(xs in prop::collection::vec(0u32..7, 0..6),
                               ys in prop::collection::vec(0u32..7, 0..6),
                               f1 in any::<bool>(), f2 in any::<bool>()) {
                let ctx = test_ctx(f1, f2);
                // 0, 1 hit the constants; 2..6 the declared atoms
                let sc = |picks: &[u32]| SquareClass::from_atoms(picks.iter().map(|&p| AtomId(p)));
                let (x, y) = (sc(&xs), sc(&ys));
                let lhs = ctx.sym(&x.product(&y)).unwrap();
                let rhs = ctx.sym(&x).unwrap().add(&ctx.sym(&y).unwrap());
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
