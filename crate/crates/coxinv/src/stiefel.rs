//! Stiefel-Whitney classes of diagonal quadratic forms, invariant
//! expressions `w_i·w̃_j`, their evaluation on torsors, and fingerprints
//! over the canonical versal `H_q` family.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::symbols::{CohClass, SymbolContext, SymbolError};
use crate::torsors::{self, QuadraticForm, Torsor, TorsorError, VersalFamily};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StiefelError {
    #[error("torsor rank {torsor} does not match expression rank {expr}")]
    RankMismatch { torsor: usize, expr: usize },
    #[error("expressions have different type or rank")]
    TypeMismatch,
    #[error("invalid invariant pair (i={i}, j={j}) for type {ty} rank {n}")]
    InvalidPair { i: u32, j: u32, ty: char, n: usize },
    #[error(
        "type D fingerprints need even rank (odd ranks are experimental; enable them explicitly)"
    )]
    OddRankD,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Torsor(#[from] TorsorError),
}

/// `-1` / `2` square flags of the evaluation context.
pub const FLAGS_SET: (bool, bool) = (true, true);
pub const FLAGS_CLEARED: (bool, bool) = (false, false);

/// `i`-th elementary symmetric function of the degree-1 symbols of the
/// diagonal entries; `w_0 = 1` and `w_i = 0` beyond the rank.
pub fn sw(ctx: &SymbolContext, form: &QuadraticForm, i: u32) -> Result<CohClass, StiefelError> {
    let symbols = torsors::diagonal_symbols(ctx, form)?;
    let i = i as usize;
    let mut acc: Vec<CohClass> = vec![CohClass::zero(); i + 1];
    acc[0] = CohClass::one();
    for s in &symbols {
        for k in (1..=i).rev() {
            let bump = ctx.cup(&acc[k - 1], s);
            acc[k] = acc[k].add(&bump);
        }
    }
    Ok(acc.pop().unwrap())
}

/// Total class `Π (1 + (entry))`; its degree-`i` component is `sw(q, i)`.
pub fn total_sw(ctx: &SymbolContext, form: &QuadraticForm) -> Result<CohClass, StiefelError> {
    let mut acc = CohClass::one();
    for s in torsors::diagonal_symbols(ctx, form)? {
        acc = ctx.cup(&acc, &CohClass::one().add(&s));
    }
    Ok(acc)
}

/// Whitney formula check: `sw(q1 ⊕ q2, i) = Σ_k sw(q1,k)·sw(q2,i-k)`.
pub fn whitney_check(
    ctx: &SymbolContext,
    q1: &QuadraticForm,
    q2: &QuadraticForm,
    i: u32,
) -> Result<bool, StiefelError> {
    let lhs = sw(ctx, &q1.direct_sum(q2), i)?;
    let mut rhs = CohClass::zero();
    for k in 0..=i {
        let prod = ctx.cup(&sw(ctx, q1, k)?, &sw(ctx, q2, i - k)?);
        rhs = rhs.add(&prod);
    }
    Ok(lhs == rhs)
}

/// Ambient Weyl type of an invariant expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InvariantType {
    A,
    B,
    D,
}

impl InvariantType {
    pub fn letter(self) -> char {
        match self {
            InvariantType::A => 'A',
            InvariantType::B => 'B',
            InvariantType::D => 'D',
        }
    }
}

impl fmt::Display for InvariantType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// An F2-combination of pairs `(i, j)`, each denoting `w_i·w̃_j`.  For
/// type A only the `w_i` exist, so `j` must be zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantExpr {
    pub ty: InvariantType,
    pub n: usize,
    terms: BTreeSet<(u32, u32)>,
}

impl InvariantExpr {
    pub fn zero(ty: InvariantType, n: usize) -> Self {
        InvariantExpr {
            ty,
            n,
            terms: BTreeSet::new(),
        }
    }

    pub fn new<I: IntoIterator<Item = (u32, u32)>>(
        ty: InvariantType,
        n: usize,
        pairs: I,
    ) -> Result<Self, StiefelError> {
        let mut expr = InvariantExpr::zero(ty, n);
        for (i, j) in pairs {
            expr.toggle(i, j)?;
        }
        Ok(expr)
    }

    pub fn single(ty: InvariantType, n: usize, i: u32, j: u32) -> Result<Self, StiefelError> {
        InvariantExpr::new(ty, n, [(i, j)])
    }

    fn toggle(&mut self, i: u32, j: u32) -> Result<(), StiefelError> {
        if i as usize > self.n || j as usize > self.n || (self.ty == InvariantType::A && j != 0) {
            return Err(StiefelError::InvalidPair {
                i,
                j,
                ty: self.ty.letter(),
                n: self.n,
            });
        }
        if !self.terms.insert((i, j)) {
            self.terms.remove(&(i, j));
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.terms.iter().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// F2 sum; duplicate pairs cancel.
    pub fn add(&self, other: &InvariantExpr) -> Result<InvariantExpr, StiefelError> {
        if self.ty != other.ty || self.n != other.n {
            return Err(StiefelError::TypeMismatch);
        }
        let mut out = self.clone();
        for (i, j) in other.terms() {
            out.toggle(i, j)?;
        }
        Ok(out)
    }

    /// Rendering `w1*wt3 + wt2`, terms in `(i, j)`-lexicographic order.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_owned();
        }
        self.terms
            .iter()
            .map(|&(i, j)| match (i, j) {
                (0, 0) => "1".to_owned(),
                (i, 0) => format!("w{i}"),
                (0, j) => format!("wt{j}"),
                (i, j) => format!("w{i}*wt{j}"),
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Parses the `w<i>`/`wt<j>` grammar: terms joined by `+`, factors by
    /// `*`.  The Unicode form `w̃<j>` is accepted on input.
    pub fn parse(ty: InvariantType, n: usize, input: &str) -> Result<Self, StiefelError> {
        let mut expr = InvariantExpr::zero(ty, n);
        let trimmed = input.trim();
        if trimmed == "0" {
            return Ok(expr);
        }
        let mut offset = 0usize;
        for chunk in input.split('+') {
            let (i, j) = parse_term(chunk, offset)?;
            expr.toggle(i, j)?;
            offset += chunk.len() + 1;
        }
        Ok(expr)
    }
}

fn parse_term(chunk: &str, base: usize) -> Result<(u32, u32), StiefelError> {
    let mut i: Option<u32> = None;
    let mut j: Option<u32> = None;
    let err = |pos: usize, msg: &str| StiefelError::Parse {
        pos,
        msg: msg.to_owned(),
    };
    let mut offset = base;
    for factor in chunk.split('*') {
        let f = factor.trim();
        let pos = offset + (factor.len() - factor.trim_start().len());
        offset += factor.len() + 1;
        if f == "1" {
            continue;
        }
        let (twisted, digits) = if let Some(d) = f.strip_prefix("wt") {
            (true, d)
        } else if let Some(d) = f.strip_prefix("w\u{303}") {
            // 'w' + combining tilde
            (true, d)
        } else if let Some(d) = f.strip_prefix('w') {
            (false, d)
        } else {
            return Err(err(pos, &format!("expected w<i> or wt<j>, found `{f}`")));
        };
        let k: u32 = digits
            .parse()
            .map_err(|_| err(pos, &format!("invalid index in `{f}`")))?;
        let slot = if twisted { &mut j } else { &mut i };
        if slot.is_some() {
            return Err(err(pos, "at most one w and one wt factor per term"));
        }
        *slot = Some(k);
    }
    Ok((i.unwrap_or(0), j.unwrap_or(0)))
}

/// Evaluation of an invariant expression on a torsor:
/// `Σ (i,j) of sw(trace, i)·sw(twisted, j)`.
pub fn eval(
    ctx: &SymbolContext,
    expr: &InvariantExpr,
    torsor: &Torsor,
) -> Result<CohClass, StiefelError> {
    if torsor.rank() != expr.n {
        return Err(StiefelError::RankMismatch {
            torsor: torsor.rank(),
            expr: expr.n,
        });
    }
    let trace = torsor.trace_form();
    let twisted = torsor.twisted_trace_form();
    let mut out = CohClass::zero();
    for (i, j) in expr.terms() {
        let prod = ctx.cup(&sw(ctx, &trace, i)?, &sw(ctx, &twisted, j)?);
        out = out.add(&prod);
    }
    Ok(out)
}

/// The ordered evaluations of an expression on the canonical versal
/// torsors: `q = 0..floor(n/2)` for types A and B, the single `q = m`
/// norm-1 torsor for type D.  Atom names are canonical, so fingerprints
/// compare by literal equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fingerprint {
    pub ty: InvariantType,
    pub n: usize,
    pub minus_one_square: bool,
    pub two_square: bool,
    /// `(q, value)` pairs in increasing `q`.
    pub entries: Vec<(usize, CohClass)>,
}

impl Fingerprint {
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|(_, c)| c.is_zero())
    }
}

/// The canonical torsor family a fingerprint evaluates on.
pub fn versal_family_for(
    ty: InvariantType,
    n: usize,
    q: usize,
    flags: (bool, bool),
) -> Result<VersalFamily, TorsorError> {
    match ty {
        InvariantType::A | InvariantType::B => torsors::versal_hq(n, q, flags.0, flags.1),
        InvariantType::D => torsors::versal_dn(n, flags.0, flags.1),
    }
}

pub fn fingerprint(expr: &InvariantExpr, flags: (bool, bool)) -> Result<Fingerprint, StiefelError> {
    fingerprint_impl(expr, flags, false)
}

/// Fingerprint with type-D odd ranks enabled.  The odd-rank D family is an
/// analogy-derived construction and is not validated against any exact
/// statement; it is shipped for experiments only.
pub fn fingerprint_experimental_odd_d(
    expr: &InvariantExpr,
    flags: (bool, bool),
) -> Result<Fingerprint, StiefelError> {
    fingerprint_impl(expr, flags, true)
}

fn fingerprint_impl(
    expr: &InvariantExpr,
    flags: (bool, bool),
    allow_odd_d: bool,
) -> Result<Fingerprint, StiefelError> {
    let m = expr.n / 2;
    let qs: Vec<usize> = match expr.ty {
        InvariantType::A | InvariantType::B => (0..=m).collect(),
        InvariantType::D => {
            if !expr.n.is_multiple_of(2) && !allow_odd_d {
                return Err(StiefelError::OddRankD);
            }
            vec![m]
        }
    };
    let mut entries = Vec::with_capacity(qs.len());
    for q in qs {
        let family = versal_family_for(expr.ty, expr.n, q, flags)?;
        entries.push((q, eval(&family.ctx, expr, &family.torsor)?));
    }
    Ok(Fingerprint {
        ty: expr.ty,
        n: expr.n,
        minus_one_square: flags.0,
        two_square: flags.1,
        entries,
    })
}

/// Equality of invariants through their fingerprints.  Soundness of
/// "equal fingerprints imply equal invariants" is the vanishing theorem for
/// the versal family and is assumed here.
pub fn invariants_equal(
    e1: &InvariantExpr,
    e2: &InvariantExpr,
    flags: (bool, bool),
) -> Result<bool, StiefelError> {
    if e1.ty != e2.ty || e1.n != e2.n {
        return Err(StiefelError::TypeMismatch);
    }
    Ok(fingerprint(e1, flags)? == fingerprint(e2, flags)?)
}
