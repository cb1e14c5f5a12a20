//! Root systems, classical Weyl groups as signed permutations, and
//! brute-force enumeration of abelian reflection subgroups up to conjugacy.
//!
//! Types B and C share the same Weyl group, so type C is an alias of B
//! everywhere a group (rather than a root system) is asked for.  Exceptional
//! types get root-system generation only; their Weyl groups are never
//! enumerated here.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("illegal (type, rank) pair: {0} {1}")]
    IllegalPair(String, usize),
    #[error("root is not of classical type A/B/C/D shape")]
    UnsupportedRoot,
    #[error("group order {order} exceeds the enumeration cap {cap}")]
    CapExceeded { order: u128, cap: u128 },
    #[error("subgroup is not freely generated by its reflections")]
    NotReflectionFree,
    #[error("q = {q} out of range for rank {n}")]
    QOutOfRange { q: usize, n: usize },
}

/// Labels of the irreducible root systems handled here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RootType {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl RootType {
    pub fn legal_rank(self, rank: usize) -> bool {
        match self {
            RootType::A => rank >= 1,
            RootType::B | RootType::C => rank >= 2,
            RootType::D => rank >= 4,
            RootType::E => (6..=8).contains(&rank),
            RootType::F => rank == 4,
            RootType::G => rank == 2,
        }
    }
}

/// A root system with integer coordinates.  Coordinates are scaled by 2 so
/// that the half-integer roots of the E types become integral.
#[derive(Debug, Clone)]
pub struct RootSystem {
    pub ty: RootType,
    pub rank: usize,
    pub dim: usize,
    pub roots: Vec<Vec<i64>>,
}

fn unit(dim: usize, i: usize, v: i64) -> Vec<i64> {
    let mut e = vec![0; dim];
    e[i] = v;
    e
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The root list of the given type, per the classical coordinate models.
pub fn roots(ty: RootType, rank: usize) -> Result<RootSystem, CoxeterError> {
    if !ty.legal_rank(rank) {
        return Err(CoxeterError::IllegalPair(format!("{ty:?}"), rank));
    }
    let mut roots = Vec::new();
    let dim;
    match ty {
        RootType::A => {
            dim = rank + 1;
            for i in 0..dim {
                for j in 0..dim {
                    if i != j {
                        let mut r = vec![0; dim];
                        r[i] = 2;
                        r[j] = -2;
                        roots.push(r);
                    }
                }
            }
        }
        RootType::B | RootType::C => {
            dim = rank;
            let short = if ty == RootType::B { 2 } else { 4 };
            for i in 0..dim {
                roots.push(unit(dim, i, short));
                roots.push(unit(dim, i, -short));
            }
            push_pair_roots(&mut roots, dim, 2);
        }
        RootType::D => {
            dim = rank;
            push_pair_roots(&mut roots, dim, 2);
        }
        RootType::E => {
            dim = 8;
            let pairs = match rank {
                6 => 5,
                7 => 6,
                _ => 8,
            };
            push_pair_roots(&mut roots, pairs, 2);
            for r in &mut roots {
                r.resize(8, 0);
            }
            match rank {
                6 => {
                    // ±(e8 - e7 - e6 + sum of ±e_l), evenly many minus signs
                    for mask in 0..32u32 {
                        if mask.count_ones() % 2 != 0 {
                            continue;
                        }
                        for sign in [1i64, -1] {
                            let mut r = vec![0i64; 8];
                            for (l, slot) in r.iter_mut().enumerate().take(5) {
                                *slot = sign * if mask >> l & 1 == 1 { -1 } else { 1 };
                            }
                            r[5] = -sign;
                            r[6] = -sign;
                            r[7] = sign;
                            roots.push(r);
                        }
                    }
                }
                7 => {
                    roots.push(vec![0, 0, 0, 0, 0, 0, 2, -2]);
                    roots.push(vec![0, 0, 0, 0, 0, 0, -2, 2]);
                    // ±(e7 - e8 + sum of ±e_l), oddly many minus signs
                    for mask in 0..64u32 {
                        if mask.count_ones() % 2 != 1 {
                            continue;
                        }
                        for sign in [1i64, -1] {
                            let mut r = vec![0i64; 8];
                            for (l, slot) in r.iter_mut().enumerate().take(6) {
                                *slot = sign * if mask >> l & 1 == 1 { -1 } else { 1 };
                            }
                            r[6] = sign;
                            r[7] = -sign;
                            roots.push(r);
                        }
                    }
                }
                _ => {
                    // all ±1 vectors with evenly many minus signs
                    for mask in 0..256u32 {
                        if mask.count_ones() % 2 != 0 {
                            continue;
                        }
                        let r: Vec<i64> = (0..8)
                            .map(|l| if mask >> l & 1 == 1 { -1 } else { 1 })
                            .collect();
                        roots.push(r);
                    }
                }
            }
        }
        RootType::F => {
            dim = 4;
            for i in 0..4 {
                roots.push(unit(4, i, 2));
                roots.push(unit(4, i, -2));
            }
            push_pair_roots(&mut roots, 4, 2);
            for mask in 0..16u32 {
                let r: Vec<i64> = (0..4)
                    .map(|l| if mask >> l & 1 == 1 { -1 } else { 1 })
                    .collect();
                roots.push(r);
            }
        }
        RootType::G => {
            dim = 3;
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                for sign in [1i64, -1] {
                    let mut r = vec![0i64; 3];
                    r[i] = 2 * sign;
                    r[j] = -2 * sign;
                    roots.push(r);
                }
            }
            for i in 0..3 {
                for sign in [1i64, -1] {
                    let mut r = vec![-2 * sign; 3];
                    r[i] = 4 * sign;
                    roots.push(r);
                }
            }
        }
    }
    Ok(RootSystem {
        ty,
        rank,
        dim,
        roots,
    })
}

fn push_pair_roots(roots: &mut Vec<Vec<i64>>, dim: usize, scale: i64) {
    for i in 0..dim {
        for j in i + 1..dim {
            for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let mut r = vec![0; dim];
                r[i] = si * scale;
                r[j] = sj * scale;
                roots.push(r);
            }
        }
    }
}

impl RootSystem {
    pub fn contains(&self, v: &[i64]) -> bool {
        self.roots.iter().any(|r| r == v)
    }

    /// Orthogonal reflection in the root `alpha`, applied to `beta`.  Exact
    /// integer arithmetic; panics if the crystallographic integrality
    /// condition fails.
    pub fn reflect(alpha: &[i64], beta: &[i64]) -> Vec<i64> {
        let num = 2 * dot(alpha, beta);
        let den = dot(alpha, alpha);
        assert!(num % den == 0, "non-crystallographic pair");
        let c = num / den;
        beta.iter().zip(alpha).map(|(b, a)| b - c * a).collect()
    }
}

/// An element of the group of signed permutations, `e_i -> ±e_{p[i]}`.
/// Covers the Weyl groups of types B/C (all of it), D (even sign count)
/// and A (trivial signs, acting on `n+1` coordinates).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPermutation {
    p: Vec<usize>,
    neg: Vec<bool>,
}

impl SignedPermutation {
    pub fn identity(n: usize) -> Self {
        SignedPermutation {
            p: (0..n).collect(),
            neg: vec![false; n],
        }
    }

    pub fn new(p: Vec<usize>, neg: Vec<bool>) -> Self {
        assert_eq!(p.len(), neg.len());
        let mut seen = vec![false; p.len()];
        for &i in &p {
            assert!(i < p.len() && !seen[i], "not a permutation");
            seen[i] = true;
        }
        SignedPermutation { p, neg }
    }

    pub fn degree(&self) -> usize {
        self.p.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.p
    }

    pub fn signs(&self) -> &[bool] {
        &self.neg
    }

    pub fn is_identity(&self) -> bool {
        self.p.iter().enumerate().all(|(i, &j)| i == j) && self.neg.iter().all(|&b| !b)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &SignedPermutation) -> SignedPermutation {
        assert_eq!(self.degree(), other.degree());
        let n = self.degree();
        let mut p = vec![0; n];
        let mut neg = vec![false; n];
        for i in 0..n {
            p[i] = self.p[other.p[i]];
            neg[i] = other.neg[i] ^ self.neg[other.p[i]];
        }
        SignedPermutation { p, neg }
    }

    pub fn inverse(&self) -> SignedPermutation {
        let n = self.degree();
        let mut p = vec![0; n];
        let mut neg = vec![false; n];
        for i in 0..n {
            p[self.p[i]] = i;
            neg[self.p[i]] = self.neg[i];
        }
        SignedPermutation { p, neg }
    }

    /// Product of the signs; an element lies in the D subgroup iff this is
    /// `+1` (`true`).
    pub fn parity_positive(&self) -> bool {
        self.neg.iter().filter(|&&b| b).count() % 2 == 0
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.degree());
        let mut out = vec![0; v.len()];
        for (i, &x) in v.iter().enumerate() {
            out[self.p[i]] = if self.neg[i] { -x } else { x };
        }
        out
    }

    pub fn conjugate_by(&self, w: &SignedPermutation) -> SignedPermutation {
        w.compose(self).compose(&w.inverse())
    }

    /// Order-2 test plus the rank-1 shape of `r - id`: either a single sign
    /// flip, or a transposition with equal signs on the swapped pair and
    /// none elsewhere.
    pub fn is_reflection(&self) -> bool {
        let n = self.degree();
        let moved: Vec<usize> = (0..n).filter(|&i| self.p[i] != i).collect();
        match moved.len() {
            0 => self.neg.iter().filter(|&&b| b).count() == 1,
            2 => {
                let (i, j) = (moved[0], moved[1]);
                self.p[i] == j
                    && self.p[j] == i
                    && self.neg[i] == self.neg[j]
                    && (0..n).all(|k| k == i || k == j || !self.neg[k])
            }
            _ => false,
        }
    }

    /// Compact byte encoding used for hashing and canonical ordering.
    pub fn key(&self) -> Vec<u8> {
        let mut k: Vec<u8> = self.p.iter().map(|&i| i as u8).collect();
        let mut mask = 0u16;
        for (i, &b) in self.neg.iter().enumerate() {
            if b {
                mask |= 1 << i;
            }
        }
        k.extend_from_slice(&mask.to_le_bytes());
        k
    }
}

/// The reflection attached to a classical root: `±e_i` is the sign flip at
/// `i`, `e_i - e_j` the transposition `(i j)`, `e_i + e_j` the transposition
/// with both signs flipped.
pub fn reflection_of_root(root: &[i64], dim: usize) -> Result<SignedPermutation, CoxeterError> {
    assert!(root.len() <= dim);
    let support: Vec<usize> = (0..root.len()).filter(|&i| root[i] != 0).collect();
    let mut r = SignedPermutation::identity(dim);
    match support.len() {
        1 => {
            r.neg[support[0]] = true;
            Ok(r)
        }
        2 => {
            let (i, j) = (support[0], support[1]);
            if root[i].abs() != root[j].abs() {
                return Err(CoxeterError::UnsupportedRoot);
            }
            r.p[i] = j;
            r.p[j] = i;
            if root[i].signum() == root[j].signum() {
                r.neg[i] = true;
                r.neg[j] = true;
            }
            Ok(r)
        }
        _ => Err(CoxeterError::UnsupportedRoot),
    }
}

/// Classical types whose Weyl groups can be enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeylType {
    A,
    B,
    C,
    D,
}

impl WeylType {
    pub fn as_root_type(self) -> RootType {
        match self {
            WeylType::A => RootType::A,
            WeylType::B => RootType::B,
            WeylType::C => RootType::C,
            WeylType::D => RootType::D,
        }
    }

    /// Ambient coordinate dimension of the signed-permutation model.
    pub fn dim(self, n: usize) -> usize {
        match self {
            WeylType::A => n + 1,
            _ => n,
        }
    }

    pub fn order(self, n: usize) -> u128 {
        let fact = |k: usize| (1..=k as u128).product::<u128>();
        match self {
            WeylType::A => fact(n + 1),
            WeylType::B | WeylType::C => (1u128 << n) * fact(n),
            WeylType::D => (1u128 << (n - 1)) * fact(n),
        }
    }

    pub fn legal_rank(self, n: usize) -> bool {
        self.as_root_type().legal_rank(n)
    }
}

fn permutations_lex(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::with_capacity(k);
    let mut used = vec![false; k];
    fn rec(k: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(k, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(k, &mut cur, &mut used, &mut out);
    out
}

/// Full element list of the Weyl group, in a deterministic order.
pub fn enumerate_weyl(
    ty: WeylType,
    n: usize,
    cap: u128,
) -> Result<Vec<SignedPermutation>, CoxeterError> {
    if !ty.legal_rank(n) {
        return Err(CoxeterError::IllegalPair(format!("{ty:?}"), n));
    }
    let order = ty.order(n);
    if order > cap {
        return Err(CoxeterError::CapExceeded { order, cap });
    }
    let dim = ty.dim(n);
    let perms = permutations_lex(dim);
    let mut out = Vec::with_capacity(order as usize);
    match ty {
        WeylType::A => {
            for p in perms {
                out.push(SignedPermutation {
                    p,
                    neg: vec![false; dim],
                });
            }
        }
        WeylType::B | WeylType::C | WeylType::D => {
            for p in perms {
                for mask in 0..(1u32 << n) {
                    if ty == WeylType::D && mask.count_ones() % 2 != 0 {
                        continue;
                    }
                    let neg: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
                    out.push(SignedPermutation { p: p.clone(), neg });
                }
            }
        }
    }
    debug_assert_eq!(out.len() as u128, order);
    Ok(out)
}

/// All reflections of the Weyl group (one per positive root).
pub fn reflections(ty: WeylType, n: usize) -> Result<Vec<SignedPermutation>, CoxeterError> {
    let rs = roots(ty.as_root_type(), n)?;
    let dim = ty.dim(n);
    let mut set = BTreeSet::new();
    for r in &rs.roots {
        set.insert(reflection_of_root(r, dim)?);
    }
    Ok(set.into_iter().collect())
}

/// A subgroup generated by reflections, with its element set enumerated.
#[derive(Debug, Clone)]
pub struct ReflectionSubgroup {
    pub dim: usize,
    /// Generating reflections in their defining order; this order fixes the
    /// coordinate labels used by [`normalizer_action`].
    pub reflections: Vec<SignedPermutation>,
    pub elements: Vec<SignedPermutation>,
}

impl ReflectionSubgroup {
    pub fn from_reflections(gens: Vec<SignedPermutation>) -> Result<Self, CoxeterError> {
        let dim = gens.first().map_or(0, SignedPermutation::degree);
        for g in &gens {
            if !g.is_reflection() {
                return Err(CoxeterError::NotReflectionFree);
            }
        }
        let elements = close_under_product(&gens, dim);
        Ok(ReflectionSubgroup {
            dim,
            reflections: gens,
            elements,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_abelian(&self) -> bool {
        self.reflections.iter().enumerate().all(|(i, a)| {
            self.reflections[i + 1..]
                .iter()
                .all(|b| a.compose(b) == b.compose(a))
        })
    }

    fn reflection_key_set(&self) -> Vec<Vec<u8>> {
        let mut keys: Vec<Vec<u8>> = self.reflections.iter().map(|r| r.key()).collect();
        keys.sort();
        keys
    }
}

fn close_under_product(gens: &[SignedPermutation], dim: usize) -> Vec<SignedPermutation> {
    let mut seen: BTreeSet<SignedPermutation> = BTreeSet::new();
    let mut queue: VecDeque<SignedPermutation> = VecDeque::new();
    let id = SignedPermutation::identity(dim);
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(w) = queue.pop_front() {
        for g in gens {
            let next = g.compose(&w);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen.into_iter().collect()
}

/// The abelian subgroup `H_q` of `W(B_n)` attached to the root subsystem
/// `{±e_1±e_2, ..., ±e_{2q-1}±e_{2q}, ±e_{2q+1}, ..., ±e_n}`; for type D,
/// only `q = floor(n/2)` is available and the sign-flip tail is dropped.
///
/// Generator order (which fixes H^1 coordinate labels): for each pair block
/// first `r_{e-f}` then `r_{e+f}`, then the remaining sign flips.
pub fn subgroup_hq(ty: WeylType, n: usize, q: usize) -> Result<ReflectionSubgroup, CoxeterError> {
    let m = n / 2;
    match ty {
        WeylType::B | WeylType::C => {
            if q > m {
                return Err(CoxeterError::QOutOfRange { q, n });
            }
        }
        WeylType::D => {
            if !ty.legal_rank(n) || q != m {
                return Err(CoxeterError::QOutOfRange { q, n });
            }
        }
        WeylType::A => return Err(CoxeterError::IllegalPair("A".to_owned(), n)),
    }
    let mut gens = Vec::new();
    for i in 0..q {
        let mut diff = vec![0i64; n];
        diff[2 * i] = 2;
        diff[2 * i + 1] = -2;
        gens.push(reflection_of_root(&diff, n)?);
        let mut sum = vec![0i64; n];
        sum[2 * i] = 2;
        sum[2 * i + 1] = 2;
        gens.push(reflection_of_root(&sum, n)?);
    }
    if ty != WeylType::D {
        for i in 2 * q..n {
            let flip = unit(n, i, 2);
            gens.push(reflection_of_root(&flip, n)?);
        }
    }
    ReflectionSubgroup::from_reflections(gens)
}

fn bron_kerbosch(
    adj: &[Vec<bool>],
    r: &mut Vec<usize>,
    p: &mut BTreeSet<usize>,
    x: &mut BTreeSet<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r.clone());
        return;
    }
    let pivot = *p.iter().chain(x.iter()).next().unwrap();
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    for v in candidates {
        r.push(v);
        let mut p2: BTreeSet<usize> = p.iter().copied().filter(|&u| adj[v][u]).collect();
        let mut x2: BTreeSet<usize> = x.iter().copied().filter(|&u| adj[v][u]).collect();
        bron_kerbosch(adj, r, &mut p2, &mut x2, out);
        r.pop();
        p.remove(&v);
        x.insert(v);
    }
}

/// Conjugacy-class representatives of the maximal abelian reflection
/// subgroups, by brute force: maximal sets of pairwise-commuting
/// reflections, partitioned by W-conjugacy.  Deterministic output (classes
/// sorted by their least reflection-set key).
pub fn maximal_abelian_reflection_subgroups(
    ty: WeylType,
    n: usize,
    cap: u128,
) -> Result<Vec<ReflectionSubgroup>, CoxeterError> {
    let w = enumerate_weyl(ty, n, cap)?;
    let refl = reflections(ty, n)?;
    let k = refl.len();
    let mut adj = vec![vec![false; k]; k];
    for i in 0..k {
        for j in 0..k {
            adj[i][j] = i != j && refl[i].compose(&refl[j]) == refl[j].compose(&refl[i]);
        }
    }
    let mut cliques = Vec::new();
    let mut p: BTreeSet<usize> = (0..k).collect();
    let mut x = BTreeSet::new();
    bron_kerbosch(&adj, &mut Vec::new(), &mut p, &mut x, &mut cliques);

    let clique_key = |c: &[usize]| -> Vec<Vec<u8>> {
        let mut keys: Vec<Vec<u8>> = c.iter().map(|&i| refl[i].key()).collect();
        keys.sort();
        keys
    };
    let mut remaining: BTreeMap<Vec<Vec<u8>>, Vec<usize>> =
        cliques.iter().map(|c| (clique_key(c), c.clone())).collect();
    let mut reps = Vec::new();
    while let Some((_, clique)) = remaining.pop_first() {
        let members: Vec<SignedPermutation> = clique.iter().map(|&i| refl[i].clone()).collect();
        // orbit of the reflection set under conjugation
        let mut orbit: HashSet<Vec<Vec<u8>>> = HashSet::new();
        for g in &w {
            let mut keys: Vec<Vec<u8>> = members.iter().map(|r| r.conjugate_by(g).key()).collect();
            keys.sort();
            orbit.insert(keys);
        }
        remaining.retain(|key, _| !orbit.contains(key));
        reps.push(ReflectionSubgroup::from_reflections(members)?);
    }
    Ok(reps)
}

/// Whether the reflection sets of `a` and `b` are conjugate under some
/// element of `w`.
pub fn are_conjugate(
    w: &[SignedPermutation],
    a: &ReflectionSubgroup,
    b: &ReflectionSubgroup,
) -> bool {
    let target = b.reflection_key_set();
    w.iter().any(|g| {
        let mut keys: Vec<Vec<u8>> = a
            .reflections
            .iter()
            .map(|r| r.conjugate_by(g).key())
            .collect();
        keys.sort();
        keys == target
    })
}

/// The permutation action of `N_W(H)/H` on the coordinate labels of
/// `H ≅ (Z/2Z)^k`, where label `i` is the `i`-th generating reflection of
/// `H`.  Conjugation permutes the reflections of an abelian
/// reflection-generated subgroup, and for the subgroups used here the
/// reflections are a free basis, so the induced action on `H^1` coordinates
/// is by permutations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateAction {
    pub degree: usize,
    pub perms: Vec<Vec<usize>>,
}

pub fn normalizer_action(
    h: &ReflectionSubgroup,
    w: &[SignedPermutation],
) -> Result<CoordinateAction, CoxeterError> {
    let k = h.reflections.len();
    if h.order() != 1usize << k {
        return Err(CoxeterError::NotReflectionFree);
    }
    let index: BTreeMap<SignedPermutation, usize> = h
        .reflections
        .iter()
        .enumerate()
        .map(|(i, r)| (r.clone(), i))
        .collect();
    let mut perms: BTreeSet<Vec<usize>> = BTreeSet::new();
    'next: for g in w {
        let mut perm = vec![0usize; k];
        for (i, r) in h.reflections.iter().enumerate() {
            match index.get(&r.conjugate_by(g)) {
                Some(&j) => perm[i] = j,
                None => continue 'next,
            }
        }
        perms.insert(perm);
    }
    Ok(CoordinateAction {
        degree: k,
        perms: perms.into_iter().collect(),
    })
}
