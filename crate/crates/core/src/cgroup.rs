//! Polytope axioms on generator tuples: string property, intersection
//! properties, Schläfli types, facet extraction and the chirality decision.

use std::collections::HashMap;
use std::ops::Range;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::gf::Fe;
use crate::grp::{GroupError, GroupHandle};
use crate::linalg;
use crate::projmat::{Pgl3, ProjError, ProjMatrix};

/// Outcome of one axiom check; failures carry a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<W> {
    Pass,
    Fail(W),
}

impl<W> Verdict<W> {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail(w) => Some(w),
        }
    }
}

/// Rotation generators `σ_1, …, σ_{r-1}` with every product
/// `τ_{i,j} = σ_i ⋯ σ_j` precomputed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChiralTuple {
    sigma: Vec<ProjMatrix>,
    // tau[i][j - i] for 0-based i <= j
    tau: Vec<Vec<ProjMatrix>>,
}

impl ChiralTuple {
    pub fn new(g: &Pgl3, sigma: Vec<ProjMatrix>) -> ChiralTuple {
        assert!(!sigma.is_empty(), "a chiral tuple needs at least one generator");
        let tau = (0..sigma.len())
            .map(|i| {
                let mut row = vec![sigma[i]];
                for j in i + 1..sigma.len() {
                    let last = *row.last().unwrap();
                    row.push(g.mul(&last, &sigma[j]));
                }
                row
            })
            .collect();
        ChiralTuple { sigma, tau }
    }

    pub fn rank(&self) -> usize {
        self.sigma.len() + 1
    }

    pub fn generators(&self) -> &[ProjMatrix] {
        &self.sigma
    }

    /// `σ_i`, 1-based.
    pub fn sigma(&self, i: usize) -> ProjMatrix {
        self.sigma[i - 1]
    }

    /// `τ_{i,j}`, 1-based, `i <= j`.
    pub fn tau(&self, i: usize, j: usize) -> ProjMatrix {
        self.tau[i - 1][j - i]
    }

    pub fn cache_is_coherent(&self, g: &Pgl3) -> bool {
        let n = self.sigma.len();
        (1..=n).all(|i| (i..=n).all(|j| self.tau(i, j) == g.product(&self.sigma[i - 1..j])))
    }

    /// `(σ_{r-1}^-1, …, σ_1^-1)`.
    pub fn dual(&self, g: &Pgl3) -> ChiralTuple {
        ChiralTuple::new(g, self.sigma.iter().rev().map(|s| g.inverse(s)).collect())
    }

    pub fn map(&self, g: &Pgl3, f: impl Fn(&ProjMatrix) -> ProjMatrix) -> ChiralTuple {
        ChiralTuple::new(g, self.sigma.iter().map(f).collect())
    }
}

/// Involutions `ρ_0, …, ρ_{r-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularTuple {
    rho: Vec<ProjMatrix>,
}

impl RegularTuple {
    pub fn new(rho: Vec<ProjMatrix>) -> RegularTuple {
        RegularTuple { rho }
    }

    pub fn rank(&self) -> usize {
        self.rho.len()
    }

    pub fn generators(&self) -> &[ProjMatrix] {
        &self.rho
    }

    pub fn dual(&self) -> RegularTuple {
        RegularTuple { rho: self.rho.iter().rev().copied().collect() }
    }

    /// `ρ_0ρ_1, ρ_1ρ_2, …`, generating the rotation subgroup.
    pub fn rotations(&self, g: &Pgl3) -> Vec<ProjMatrix> {
        self.rho.windows(2).map(|w| g.mul(&w[0], &w[1])).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StringFailure {
    /// `τ_{i,j}` (or `ρ_i` for regular tuples, with `i == j`) squares to a non-identity.
    NotInvolution { i: usize, j: usize },
    /// `τ_{i,j}` or `ρ_i` is the identity.
    Trivial { i: usize, j: usize },
    /// `ρ_i` and `ρ_j` with `|i-j| > 1` do not commute.
    NotCommuting { i: usize, j: usize },
}

/// Indices are 1-based.
pub fn check_string_chiral(g: &Pgl3, t: &ChiralTuple) -> Verdict<StringFailure> {
    let n = t.generators().len();
    for i in 1..=n {
        for j in i + 1..=n {
            let tau = t.tau(i, j);
            if g.is_identity(&tau) {
                return Verdict::Fail(StringFailure::Trivial { i, j });
            }
            if !g.is_identity(&g.mul(&tau, &tau)) {
                return Verdict::Fail(StringFailure::NotInvolution { i, j });
            }
        }
    }
    Verdict::Pass
}

/// Indices are 0-based.
pub fn check_string_regular(g: &Pgl3, t: &RegularTuple) -> Verdict<StringFailure> {
    let rho = t.generators();
    for (i, r) in rho.iter().enumerate() {
        if g.is_identity(r) {
            return Verdict::Fail(StringFailure::Trivial { i, j: i });
        }
        if !g.is_identity(&g.mul(r, r)) {
            return Verdict::Fail(StringFailure::NotInvolution { i, j: i });
        }
    }
    for i in 0..rho.len() {
        for j in i + 2..rho.len() {
            if !g.commute(&rho[i], &rho[j]) {
                return Verdict::Fail(StringFailure::NotCommuting { i, j });
            }
        }
    }
    Verdict::Pass
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchlafliType {
    pub entries: Vec<u64>,
    pub degenerate: bool,
}

fn schlafli_of(g: &Pgl3, elems: impl Iterator<Item = ProjMatrix>) -> Result<SchlafliType, ProjError> {
    let entries = elems.map(|m| g.order(&m)).collect::<Result<Vec<_>, _>>()?;
    let degenerate = entries.contains(&2);
    Ok(SchlafliType { entries, degenerate })
}

/// Orders of `σ_1, …, σ_{r-1}`.
pub fn schlafli_chiral(g: &Pgl3, t: &ChiralTuple) -> Result<SchlafliType, ProjError> {
    schlafli_of(g, t.generators().iter().copied())
}

/// Orders of `ρ_iρ_{i+1}`.
pub fn schlafli_regular(g: &Pgl3, t: &RegularTuple) -> Result<SchlafliType, ProjError> {
    schlafli_of(g, t.rotations(g).into_iter())
}

/// Subgroups generated by contiguous runs of a generator list, cached.
pub struct Parabolics {
    pgl: Pgl3,
    gens: Vec<ProjMatrix>,
    cap: usize,
    cache: Mutex<HashMap<(usize, usize), Arc<GroupHandle>>>,
}

impl Parabolics {
    pub fn new(pgl: &Pgl3, gens: &[ProjMatrix], cap: usize) -> Parabolics {
        Parabolics { pgl: pgl.clone(), gens: gens.to_vec(), cap, cache: Mutex::new(HashMap::new()) }
    }

    /// `⟨gens[r]⟩` for a 0-based half-open range; empty ranges give the trivial group.
    pub fn get(&self, r: Range<usize>) -> Arc<GroupHandle> {
        let key = if r.is_empty() { (0, 0) } else { (r.start, r.end) };
        let mut cache = self.cache.lock().expect("cache lock");
        cache
            .entry(key)
            .or_insert_with(|| Arc::new(GroupHandle::new(&self.pgl, self.gens[key.0..key.1].to_vec(), self.cap)))
            .clone()
    }

    /// All handles built so far, keyed by range.
    pub fn built(&self) -> Vec<((usize, usize), Arc<GroupHandle>)> {
        let cache = self.cache.lock().expect("cache lock");
        let mut v: Vec<_> = cache.iter().map(|(k, h)| (*k, h.clone())).collect();
        v.sort_by_key(|(k, _)| *k);
        v
    }
}

/// A failed set equality `⟨left⟩ ∩ ⟨right⟩ = ⟨expected⟩` (0-based half-open
/// generator ranges) together with an element on one side only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionFailure {
    pub left: Range<usize>,
    pub right: Range<usize>,
    pub expected: Range<usize>,
    pub element: ProjMatrix,
    /// True when `element` lies in the intersection but not in the expected subgroup.
    pub extra: bool,
}

fn check_equality(
    par: &Parabolics,
    left: Range<usize>,
    right: Range<usize>,
    expected: Range<usize>,
) -> Result<Verdict<IntersectionFailure>, GroupError> {
    let (l, r, e) = (par.get(left.clone()), par.get(right.clone()), par.get(expected.clone()));
    let fail = |element, extra| IntersectionFailure {
        left: left.clone(),
        right: right.clone(),
        expected: expected.clone(),
        element,
        extra,
    };
    let inter = l.intersect(&r)?;
    if let Some(m) = inter.iter().find(|m| !e.contains(m)) {
        return Ok(Verdict::Fail(fail(*m, true)));
    }
    let missing = match e.elements()? {
        Some(set) => set.iter().filter(|m| !(l.contains(m) && r.contains(m))).min().copied(),
        None => e.generators().iter().find(|m| !(l.contains(m) && r.contains(m))).copied(),
    };
    Ok(match missing {
        Some(m) => Verdict::Fail(fail(m, false)),
        None => Verdict::Pass,
    })
}

/// IP⁺ via the recursion: `(σ_1..σ_{m-1})` satisfies IP⁺ iff `(σ_1..σ_{m-2})`
/// does and `⟨σ_1..σ_{m-2}⟩ ∩ ⟨σ_i..σ_{m-1}⟩ = ⟨σ_i..σ_{m-2}⟩` for every i.
/// The case i = 1 holds trivially and is skipped. Assumes the string property.
pub fn check_ip_plus(par: &Parabolics, t: &ChiralTuple) -> Result<Verdict<IntersectionFailure>, GroupError> {
    let n = t.generators().len();
    for m in 2..=n {
        for i in 1..m {
            let v = check_equality(par, 0..m - 1, i..m, i..m - 1)?;
            if !v.passed() {
                return Ok(v);
            }
        }
    }
    Ok(Verdict::Pass)
}

/// IP for involution tuples via the recursion on `(ρ_lo..ρ_{hi-1})`:
/// both maximal proper runs satisfy IP and their parabolics meet in the middle run.
pub fn check_ip_regular(par: &Parabolics, t: &RegularTuple) -> Result<Verdict<IntersectionFailure>, GroupError> {
    let mut memo = HashMap::new();
    ip_range(par, 0, t.rank(), &mut memo)
}

fn ip_range(
    par: &Parabolics,
    lo: usize,
    hi: usize,
    memo: &mut HashMap<(usize, usize), Verdict<IntersectionFailure>>,
) -> Result<Verdict<IntersectionFailure>, GroupError> {
    if hi - lo <= 1 {
        return Ok(Verdict::Pass);
    }
    if let Some(v) = memo.get(&(lo, hi)) {
        return Ok(v.clone());
    }
    let mut v = ip_range(par, lo, hi - 1, memo)?;
    if v.passed() {
        v = ip_range(par, lo + 1, hi, memo)?;
    }
    if v.passed() {
        v = check_equality(par, lo..hi - 1, lo + 1..hi, lo + 1..hi - 1)?;
    }
    memo.insert((lo, hi), v.clone());
    Ok(v)
}

/// The facet tuple `(τ_{1,2}, …, τ_{1,r-1})` and the generators
/// `σ_3, …, σ_{r-1}` of its rotation subgroup.
pub fn facet_extract(t: &ChiralTuple) -> (RegularTuple, Vec<ProjMatrix>) {
    let n = t.generators().len();
    let facet = RegularTuple::new((2..=n).map(|j| t.tau(1, j)).collect());
    let rotation = t.generators().iter().skip(2).copied().collect();
    (facet, rotation)
}

/// Pairs `(i, j)`, 1-based with `j - i > 2`, where `σ_i` and `σ_j` do not commute.
pub fn distant_noncommuting(g: &Pgl3, t: &ChiralTuple) -> Vec<(usize, usize)> {
    let s = t.generators();
    let mut out = Vec::new();
    for i in 0..s.len() {
        for j in i + 3..s.len() {
            if !g.commute(&s[i], &s[j]) {
                out.push((i + 1, j + 1));
            }
        }
    }
    out
}

/// All `g` in PGL(3,q) with `g A_i g^-1 = B_i` projectively for every pair,
/// i.e. `g A_i = λ_i B_i g` for some scalars. Scalars are restricted by
/// `λ_i^3 = det A_i / det B_i` and each pair's constraints refine the
/// solution space of the previous ones.
pub fn solve_intertwiners(g: &Pgl3, pairs: &[(ProjMatrix, ProjMatrix)]) -> Vec<ProjMatrix> {
    let full: Vec<Vec<Fe>> = (0..9)
        .map(|k| (0..9).map(|l| if k == l { Fe::ONE } else { Fe::ZERO }).collect())
        .collect();
    let mut out = Vec::new();
    refine(g, pairs, full, &mut out);
    out.sort();
    out.dedup();
    out
}

/// Rows of the linear system `X A - λ B X = 0` in the 9 entries of `X`.
fn intertwiner_rows(g: &Pgl3, a: &ProjMatrix, b: &ProjMatrix, lambda: Fe) -> Vec<Vec<Fe>> {
    let f = g.field();
    let mut rows = Vec::with_capacity(9);
    for r in 0..3 {
        for c in 0..3 {
            let mut row = vec![Fe::ZERO; 9];
            for k in 0..3 {
                // (X A)_{rc} = Σ_k X_{rk} A_{kc}
                row[3 * r + k] = f.add(row[3 * r + k], a.at(k, c));
                // (B X)_{rc} = Σ_k B_{rk} X_{kc}
                row[3 * k + c] = f.sub(row[3 * k + c], f.mul(lambda, b.at(r, k)));
            }
            rows.push(row);
        }
    }
    rows
}

fn refine(g: &Pgl3, pairs: &[(ProjMatrix, ProjMatrix)], basis: Vec<Vec<Fe>>, out: &mut Vec<ProjMatrix>) {
    let f = g.field();
    let Some(((a, b), rest)) = pairs.split_first() else {
        linalg::for_each_projective_combination(f, &basis, |v| {
            let raw: [Fe; 9] = v.try_into().expect("nine entries");
            if let Ok(m) = g.canonicalize(raw) {
                out.push(m);
            }
            false
        });
        return;
    };
    let ratio = f.div(g.det(a), g.det(b)).expect("invertible");
    for lambda in f.nonzero() {
        if f.pow_u(lambda, 3) != ratio {
            continue;
        }
        let next = linalg::restrict_nullspace(f, &basis, &intertwiner_rows(g, a, b, lambda));
        if !next.is_empty() {
            refine(g, rest, next, out);
        }
    }
}

/// An automorphism `m ↦ c · F^k(D(m)) · c^-1` of PSL(3,q), where `F` is the
/// Frobenius map and `D` the inverse-transpose when `duality` is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    pub conjugator: ProjMatrix,
    pub frobenius: u32,
    pub duality: bool,
}

impl Automorphism {
    pub fn apply(&self, g: &Pgl3, m: &ProjMatrix) -> ProjMatrix {
        let d = if self.duality { g.dual(m) } else { *m };
        g.conjugate(&g.frobenius_map(&d, self.frobenius), &self.conjugator)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Chirality {
    Chiral,
    /// The witness inverts `σ_1` and fixes every `τ_{1,j}`.
    Regular(Automorphism),
}

fn chirality_pairs(g: &Pgl3, t: &ChiralTuple) -> Vec<(ProjMatrix, ProjMatrix)> {
    let n = t.generators().len();
    let mut pairs = vec![(t.sigma(1), g.inverse(&t.sigma(1)))];
    pairs.extend((2..=n).map(|j| (t.tau(1, j), t.tau(1, j))));
    pairs
}

/// Whether `aut` sends `σ_1` to its inverse and fixes every `τ_{1,j}`.
pub fn is_reflection_witness(g: &Pgl3, t: &ChiralTuple, aut: &Automorphism) -> bool {
    chirality_pairs(g, t).iter().all(|(a, b)| aut.apply(g, a) == *b)
}

/// Searches every automorphism of PSL(3,q) (conjugation by PGL(3,q), field
/// automorphisms and, unless disabled, the duality) for one that inverts `σ_1`
/// and fixes all `τ_{1,j}`.
pub fn chirality_check(g: &Pgl3, t: &ChiralTuple, search_duality: bool) -> Chirality {
    let pairs = chirality_pairs(g, t);
    let dualities: &[bool] = if search_duality { &[false, true] } else { &[false] };
    for k in 0..g.field().n() {
        for &duality in dualities {
            let transformed: Vec<_> = pairs
                .iter()
                .map(|(a, b)| {
                    let d = if duality { g.dual(a) } else { *a };
                    (g.frobenius_map(&d, k), *b)
                })
                .collect();
            for c in solve_intertwiners(g, &transformed) {
                let aut = Automorphism { conjugator: c, frobenius: k, duality };
                if is_reflection_witness(g, t, &aut) {
                    return Chirality::Regular(aut);
                }
            }
        }
    }
    Chirality::Chiral
}
