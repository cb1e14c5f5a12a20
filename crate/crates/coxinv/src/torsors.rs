//! Pointed étale algebras as torsor models, the canonical versal torsors of
//! the abelian subgroups `H_q`, and their trace / twisted-trace quadratic
//! forms.
//!
//! Torsors are purely symbolic: a factor is either a split line with a
//! marked unit, a quadratic extension `k(√t)` with a marked unit from the
//! base field, or a quadratic extension whose marked element is generic
//! (`u + v√t`), carried through its norm class as a dependent atom.

use thiserror::Error;

use crate::symbols::{
    AtomId, CohClass, ContextBuilder, SquareClass, SymbolContext, SymbolError, TWO,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TorsorError {
    #[error("q = {q} out of range for rank {n}")]
    QOutOfRange { q: usize, n: usize },
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

/// One factor of a pointed étale algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Factor {
    /// A factor `k` with marked unit.
    SplitOne { unit: SquareClass },
    /// A factor `k(√disc)` whose marked unit comes from `k^x`.
    Quadratic {
        disc: SquareClass,
        unit: SquareClass,
    },
    /// A factor `k(√disc)` with a generic marked element of norm class
    /// `norm`; `unit` is the coefficient square class of the generic
    /// element (the `u` of `u + v√t`).
    GenericQuadratic {
        disc: SquareClass,
        norm: AtomId,
        unit: SquareClass,
    },
}

impl Factor {
    pub fn rank(&self) -> usize {
        match self {
            Factor::SplitOne { .. } => 1,
            _ => 2,
        }
    }
}

/// A pointed étale algebra `(L, α)` as an ordered list of factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Torsor {
    pub factors: Vec<Factor>,
}

/// A diagonal quadratic form `⟨α_1, ..., α_m⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    pub diagonal: Vec<SquareClass>,
}

impl QuadraticForm {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// Orthogonal sum: concatenation of the diagonals.
    pub fn direct_sum(&self, other: &QuadraticForm) -> QuadraticForm {
        let mut diagonal = self.diagonal.clone();
        diagonal.extend(other.diagonal.iter().cloned());
        QuadraticForm { diagonal }
    }
}

impl Torsor {
    pub fn new(factors: Vec<Factor>) -> Self {
        Torsor { factors }
    }

    pub fn rank(&self) -> usize {
        self.factors.iter().map(Factor::rank).sum()
    }

    pub fn concat(&self, other: &Torsor) -> Torsor {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Torsor { factors }
    }

    /// Trace form `x -> Tr(x^2)`: `⟨1⟩` per split factor, `⟨2, 2t⟩` per
    /// quadratic factor.  Independent of the marked units.
    pub fn trace_form(&self) -> QuadraticForm {
        let two = SquareClass::from_atoms([TWO]);
        let mut diagonal = Vec::new();
        for f in &self.factors {
            match f {
                Factor::SplitOne { .. } => diagonal.push(SquareClass::trivial()),
                Factor::Quadratic { disc, .. } | Factor::GenericQuadratic { disc, .. } => {
                    diagonal.push(two.clone());
                    diagonal.push(two.product(disc));
                }
            }
        }
        QuadraticForm { diagonal }
    }

    /// Twisted trace form `x -> Tr(αx^2)`: `⟨u⟩` per split factor,
    /// `⟨2u, 2ut⟩` per quadratic factor, `⟨2u, 2utN⟩` for a generic one.
    pub fn twisted_trace_form(&self) -> QuadraticForm {
        let two = SquareClass::from_atoms([TWO]);
        let mut diagonal = Vec::new();
        for f in &self.factors {
            match f {
                Factor::SplitOne { unit } => diagonal.push(unit.clone()),
                Factor::Quadratic { disc, unit } => {
                    let first = two.product(unit);
                    diagonal.push(first.clone());
                    diagonal.push(first.product(disc));
                }
                Factor::GenericQuadratic { disc, norm, unit } => {
                    let first = two.product(unit);
                    diagonal.push(first.clone());
                    diagonal.push(
                        first
                            .product(disc)
                            .product(&SquareClass::from_atoms([*norm])),
                    );
                }
            }
        }
        QuadraticForm { diagonal }
    }

    /// Product over factors of the norm of the marked unit.  The torsor
    /// lies in the image of the type-D cohomology set iff this is trivial.
    pub fn norm_class(&self) -> SquareClass {
        let mut out = SquareClass::trivial();
        for f in &self.factors {
            match f {
                Factor::SplitOne { unit } => out = out.product(unit),
                // a base-field unit has norm u^2, a square
                Factor::Quadratic { .. } => {}
                Factor::GenericQuadratic { norm, .. } => {
                    out = out.product(&SquareClass::from_atoms([*norm]));
                }
            }
        }
        out
    }

    /// Text rendering, e.g. `k(√t1)×k(√t2)×k^2 ; α=(u1,u2,u3,v3)`.
    pub fn render(&self, ctx: &SymbolContext) -> String {
        let mut algebra: Vec<String> = Vec::new();
        let mut units: Vec<String> = Vec::new();
        let mut split_run = 0usize;
        let flush = |run: &mut usize, alg: &mut Vec<String>| {
            match *run {
                0 => {}
                1 => alg.push("k".to_owned()),
                k => alg.push(format!("k^{k}")),
            }
            *run = 0;
        };
        for f in &self.factors {
            match f {
                Factor::SplitOne { unit } => {
                    split_run += 1;
                    units.push(ctx.render_square_class(unit));
                }
                Factor::Quadratic { disc, unit } => {
                    flush(&mut split_run, &mut algebra);
                    algebra.push(format!("k(\u{221a}{})", ctx.render_square_class(disc)));
                    units.push(ctx.render_square_class(unit));
                }
                Factor::GenericQuadratic { disc, norm, unit } => {
                    flush(&mut split_run, &mut algebra);
                    algebra.push(format!("k(\u{221a}{})", ctx.render_square_class(disc)));
                    units.push(format!(
                        "generic({},{})",
                        ctx.render_square_class(unit),
                        ctx.atom_name(*norm)
                    ));
                }
            }
        }
        flush(&mut split_run, &mut algebra);
        format!("{} ; \u{3b1}=({})", algebra.join("\u{d7}"), units.join(","))
    }
}

/// Atom layout of a canonical versal `H_q` torsor.
#[derive(Debug, Clone)]
pub struct VersalFamily {
    pub ctx: SymbolContext,
    pub torsor: Torsor,
    pub n: usize,
    pub q: usize,
    /// Discriminant atoms `t_1..t_q`.
    pub t_atoms: Vec<AtomId>,
    /// Unit atoms `u_1..u_m` (plus `u_{m+1}` when `n` is odd).
    pub u_atoms: Vec<AtomId>,
    /// Unit atoms `v_{q+1}..v_m`.
    pub v_atoms: Vec<AtomId>,
    /// Marked units of the split factors, in factor order.
    pub split_units: Vec<AtomId>,
}

/// Names declared by [`versal_hq`]; the `extra` unit carries the odd
/// coordinate of a rank-`2m+1` torsor.
#[derive(Debug, Clone)]
pub struct VersalNames {
    pub n: usize,
    pub q: usize,
    pub t: Vec<String>,
    pub u: Vec<String>,
    pub v: Vec<String>,
    pub extra: Option<String>,
}

/// Atom names for the rank-`n` versal `H_q` torsor: `t1..tq`, `u1..um`,
/// `v(q+1)..vm`, and `u(m+1)` when `n` is odd.
pub fn versal_names(n: usize, q: usize) -> Result<VersalNames, TorsorError> {
    let m = n / 2;
    if q > m {
        return Err(TorsorError::QOutOfRange { q, n });
    }
    Ok(VersalNames {
        n,
        q,
        t: (1..=q).map(|i| format!("t{i}")).collect(),
        u: (1..=m).map(|i| format!("u{i}")).collect(),
        v: (q + 1..=m).map(|i| format!("v{i}")).collect(),
        extra: (n % 2 == 1).then(|| format!("u{}", m + 1)),
    })
}

/// Declares the atoms of `names` into a context builder.
pub fn declare_versal(builder: ContextBuilder, names: &VersalNames) -> ContextBuilder {
    let mut b = builder;
    for t in &names.t {
        b = b.indeterminate(t);
    }
    for u in &names.u {
        b = b.indeterminate(u);
    }
    for v in &names.v {
        b = b.indeterminate(v);
    }
    if let Some(x) = &names.extra {
        b = b.indeterminate(x);
    }
    b
}

/// `(torsor, t_atoms, u_atoms, v_atoms, split_units)` of a resolved versal
/// layout.
pub type ResolvedVersal = (Torsor, Vec<AtomId>, Vec<AtomId>, Vec<AtomId>, Vec<AtomId>);

/// Resolves `names` against a built context and assembles the torsor
/// `(k(√t1)×...×k(√tq)×k^(n-2q), (u1,...,uq, u_{q+1},v_{q+1},...))`.
pub fn resolve_versal(
    ctx: &SymbolContext,
    names: &VersalNames,
) -> Result<ResolvedVersal, TorsorError> {
    let ids = |v: &[String]| -> Result<Vec<AtomId>, SymbolError> {
        v.iter().map(|s| ctx.atom(s)).collect()
    };
    let t_atoms = ids(&names.t)?;
    let mut u_atoms = ids(&names.u)?;
    let v_atoms = ids(&names.v)?;
    let mut factors = Vec::new();
    for i in 0..names.q {
        factors.push(Factor::Quadratic {
            disc: SquareClass::from_atoms([t_atoms[i]]),
            unit: SquareClass::from_atoms([u_atoms[i]]),
        });
    }
    let mut split_units = Vec::new();
    for i in names.q..names.u.len() {
        split_units.push(u_atoms[i]);
        split_units.push(v_atoms[i - names.q]);
    }
    if let Some(x) = &names.extra {
        let id = ctx.atom(x)?;
        split_units.push(id);
        u_atoms.push(id);
    }
    for &s in &split_units {
        factors.push(Factor::SplitOne {
            unit: SquareClass::from_atoms([s]),
        });
    }
    Ok((Torsor::new(factors), t_atoms, u_atoms, v_atoms, split_units))
}

/// The canonical versal `H_q` torsor in a fresh context with the given
/// square flags.  Deterministic atom naming `t1, u1, v1, ...`.
pub fn versal_hq(
    n: usize,
    q: usize,
    minus_one_square: bool,
    two_square: bool,
) -> Result<VersalFamily, TorsorError> {
    let names = versal_names(n, q)?;
    let ctx = declare_versal(
        ContextBuilder::new()
            .minus_one_square(minus_one_square)
            .two_square(two_square),
        &names,
    )
    .build()
    .map_err(TorsorError::from)?;
    let (torsor, t_atoms, u_atoms, v_atoms, split_units) = resolve_versal(&ctx, &names)?;
    Ok(VersalFamily {
        ctx,
        torsor,
        n,
        q,
        t_atoms,
        u_atoms,
        v_atoms,
        split_units,
    })
}

/// The norm-1 versal torsor of the type-D subgroup `H_m`.  For even `n`
/// this is the all-quadratic `versal_hq(n, n/2)` (base-field units have
/// square norm); odd `n` appends a split factor with trivial unit so the
/// norm stays trivial.
pub fn versal_dn(
    n: usize,
    minus_one_square: bool,
    two_square: bool,
) -> Result<VersalFamily, TorsorError> {
    let m = n / 2;
    if n.is_multiple_of(2) {
        return versal_hq(n, m, minus_one_square, two_square);
    }
    let mut names = versal_names(n, m)?;
    names.extra = None; // the odd coordinate of a D-torsor carries the unit 1
    let ctx = declare_versal(
        ContextBuilder::new()
            .minus_one_square(minus_one_square)
            .two_square(two_square),
        &names,
    )
    .build()
    .map_err(TorsorError::from)?;
    let (mut torsor, t_atoms, u_atoms, v_atoms, split_units) = resolve_versal(&ctx, &names)?;
    torsor.factors.push(Factor::SplitOne {
        unit: SquareClass::trivial(),
    });
    Ok(VersalFamily {
        ctx,
        torsor,
        n,
        q: m,
        t_atoms,
        u_atoms,
        v_atoms,
        split_units,
    })
}

/// Names used by the generic dihedral-group block `(K(√t), u+v√t)`.
#[derive(Debug, Clone)]
pub struct D4Names {
    pub t: String,
    pub u: String,
    pub v: String,
    pub norm: String,
}

impl D4Names {
    pub fn with_suffix(suffix: &str) -> Self {
        D4Names {
            t: format!("t{suffix}"),
            u: format!("u{suffix}"),
            v: format!("v{suffix}"),
            norm: format!("N{suffix}"),
        }
    }
}

/// Declares `t, u, v` and the dependent norm atom `N = u^2 - v^2 t` with
/// relation `(N)·(t) = 0` and residue specialization `(t) -> 0`.  Both
/// facts come from the Steinberg relation: `(N)·(t) = (N)·(u^2-N) =
/// (N)·(1-N/u^2) = 0`, and in the residue field at `N` the class `t` is
/// the square `(u/v)^2`.
pub fn declare_d4(builder: ContextBuilder, names: &D4Names) -> ContextBuilder {
    builder
        .indeterminate(&names.t)
        .indeterminate(&names.u)
        .indeterminate(&names.v)
        .dependent(&names.norm, &[&names.t], Some(&[(&names.t, &[])]))
}

pub fn resolve_d4(ctx: &SymbolContext, names: &D4Names) -> Result<Torsor, TorsorError> {
    let t = ctx.atom(&names.t)?;
    let u = ctx.atom(&names.u)?;
    let norm = ctx.atom(&names.norm)?;
    Ok(Torsor::new(vec![Factor::GenericQuadratic {
        disc: SquareClass::from_atoms([t]),
        norm,
        unit: SquareClass::from_atoms([u]),
    }]))
}

#[derive(Debug, Clone)]
pub struct D4Versal {
    pub ctx: SymbolContext,
    pub torsor: Torsor,
    pub t: AtomId,
    pub u: AtomId,
    pub v: AtomId,
    pub norm: AtomId,
}

/// The versal dihedral-group torsor `(K(√t), u+v√t)` in a fresh context.
/// `extra_indeterminates` may declare formal marker atoms alongside.
pub fn d4_versal(
    minus_one_square: bool,
    two_square: bool,
    extra_indeterminates: &[&str],
) -> Result<D4Versal, TorsorError> {
    let names = D4Names {
        t: "t".into(),
        u: "u".into(),
        v: "v".into(),
        norm: "N".into(),
    };
    let mut b = declare_d4(
        ContextBuilder::new()
            .minus_one_square(minus_one_square)
            .two_square(two_square),
        &names,
    );
    for x in extra_indeterminates {
        b = b.indeterminate(x);
    }
    let ctx = b.build().map_err(TorsorError::from)?;
    let torsor = resolve_d4(&ctx, &names)?;
    Ok(D4Versal {
        t: ctx.atom("t")?,
        u: ctx.atom("u")?,
        v: ctx.atom("v")?,
        norm: ctx.atom("N")?,
        ctx,
        torsor,
    })
}

/// Expands the diagonal of a form into degree-1 symbol classes.
pub fn diagonal_symbols(
    ctx: &SymbolContext,
    form: &QuadraticForm,
) -> Result<Vec<CohClass>, SymbolError> {
    form.diagonal.iter().map(|c| ctx.sym(c)).collect()
}
