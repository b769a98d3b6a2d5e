//! Generated subgroups of PGL(3,q): closure, Schreier-Sims, membership and
//! intersection.

use std::fmt::Debug;
use std::hash::Hash;
use std::sync::OnceLock;

use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::gf::{Fe, Field};
use crate::projmat::{Pgl3, ProjMatrix};

/// Default enumeration cap for [`closure`].
pub const DEFAULT_CAP: usize = 20_000_000;

/// Groups at most this large are always enumerated and cross-checked
/// against their Schreier-Sims order.
pub const ORACLE_LIMIT: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("closure found {closure} elements but Schreier-Sims reports {schreier_sims}")]
    Inconsistent { closure: u128, schreier_sims: u128 },
    #[error("generator {0} is not in PSL(3,q)")]
    NotInPsl(usize),
    #[error("group of order {order} exceeds the enumeration cap {cap}; raise --cap")]
    TooLarge { order: u128, cap: usize },
}

/// A group acting on the points `0..degree`.
pub trait Action {
    type Elem: Clone + Eq + Hash + Debug;

    fn degree(&self) -> u32;
    fn identity(&self) -> Self::Elem;
    /// `a` after `b`.
    fn compose(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inverse(&self, a: &Self::Elem) -> Self::Elem;
    fn image(&self, a: &Self::Elem, point: u32) -> u32;

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }

    fn first_moved(&self, a: &Self::Elem) -> Option<u32> {
        (0..self.degree()).find(|&x| self.image(a, x) != x)
    }
}

impl Action for Pgl3 {
    type Elem = ProjMatrix;

    fn degree(&self) -> u32 {
        self.num_points()
    }

    fn identity(&self) -> ProjMatrix {
        Pgl3::identity(self)
    }

    fn compose(&self, a: &ProjMatrix, b: &ProjMatrix) -> ProjMatrix {
        self.mul(a, b)
    }

    fn inverse(&self, a: &ProjMatrix) -> ProjMatrix {
        Pgl3::inverse(self, a)
    }

    fn image(&self, a: &ProjMatrix, point: u32) -> u32 {
        self.image_index(a, point)
    }
}

/// A permutation of `0..n` in image form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Perm(pub Vec<u32>);

/// The symmetric group on `degree` points.
#[derive(Clone, Copy, Debug)]
pub struct PermAction {
    pub degree: u32,
}

impl Action for PermAction {
    type Elem = Perm;

    fn degree(&self) -> u32 {
        self.degree
    }

    fn identity(&self) -> Perm {
        Perm((0..self.degree).collect())
    }

    fn compose(&self, a: &Perm, b: &Perm) -> Perm {
        Perm(b.0.iter().map(|&x| a.0[x as usize]).collect())
    }

    fn inverse(&self, a: &Perm) -> Perm {
        let mut out = vec![0; a.0.len()];
        for (i, &x) in a.0.iter().enumerate() {
            out[x as usize] = i as u32;
        }
        Perm(out)
    }

    fn image(&self, a: &Perm, point: u32) -> u32 {
        a.0[point as usize]
    }
}

struct Level<E> {
    base: u32,
    gens: Vec<E>,
    orbit: Vec<u32>,
    /// For each orbit point `y`: `(u, u^-1)` with `u(base) = y`.
    transversal: Vec<Option<(E, E)>>,
}

/// A base and strong generating set, built by deterministic Schreier-Sims.
pub struct StabChain<A: Action> {
    levels: Vec<Level<A::Elem>>,
}

impl<A: Action> StabChain<A> {
    /// Runs Schreier-Sims. The base starts with `prefix` (each entry gets a
    /// level even if its basic orbit is trivial); further base points are the
    /// smallest points moved by the element that needs them.
    pub fn new(action: &A, gens: &[A::Elem], prefix: &[u32]) -> Self {
        let mut chain = StabChain {
            levels: prefix.iter().map(|&b| Self::empty_level(action, b)).collect(),
        };
        let mut seen = FxHashSet::default();
        for g in gens {
            if action.is_identity(g) || !seen.insert(g.clone()) {
                continue;
            }
            let j = (0..chain.levels.len())
                .find(|&l| action.image(g, chain.levels[l].base) != chain.levels[l].base)
                .unwrap_or(chain.levels.len());
            chain.add_strong(action, g.clone(), 0, j);
        }
        chain.complete(action);
        chain
    }

    fn empty_level(action: &A, base: u32) -> Level<A::Elem> {
        let mut transversal = vec![None; action.degree() as usize];
        transversal[base as usize] = Some((action.identity(), action.identity()));
        Level { base, gens: Vec::new(), orbit: vec![base], transversal }
    }

    /// Adds `h` to the generators of levels `from..=to`, creating a new level when `to` is past the end.
    fn add_strong(&mut self, action: &A, h: A::Elem, from: usize, to: usize) {
        if to == self.levels.len() {
            let b = action.first_moved(&h).expect("non-identity element");
            self.levels.push(Self::empty_level(action, b));
        }
        for l in from..=to {
            self.levels[l].gens.push(h.clone());
        }
    }

    fn rebuild_orbit(action: &A, level: &mut Level<A::Elem>) {
        level.transversal.iter_mut().for_each(|t| *t = None);
        level.transversal[level.base as usize] = Some((action.identity(), action.identity()));
        level.orbit.clear();
        level.orbit.push(level.base);
        let mut i = 0;
        while i < level.orbit.len() {
            let y = level.orbit[i];
            let (u, _) = level.transversal[y as usize].clone().expect("orbit point");
            for s in &level.gens {
                let z = action.image(s, y);
                if level.transversal[z as usize].is_none() {
                    let v = action.compose(s, &u);
                    let vi = action.inverse(&v);
                    level.transversal[z as usize] = Some((v, vi));
                    level.orbit.push(z);
                }
            }
            i += 1;
        }
    }

    fn complete(&mut self, action: &A) {
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let lv = i as usize;
            Self::rebuild_orbit(action, &mut self.levels[lv]);
            let mut restart = None;
            'scan: for idx in 0..self.levels[lv].orbit.len() {
                let x = self.levels[lv].orbit[idx];
                for gi in 0..self.levels[lv].gens.len() {
                    let level = &self.levels[lv];
                    let s = &level.gens[gi];
                    let (ux, _) = level.transversal[x as usize].as_ref().expect("orbit point");
                    let sx = action.image(s, x);
                    let (_, usx_inv) = level.transversal[sx as usize].as_ref().expect("orbit is closed");
                    let h = action.compose(usx_inv, &action.compose(s, ux));
                    if action.is_identity(&h) {
                        continue;
                    }
                    let (res, j) = self.sift_from(action, h, lv + 1);
                    if !action.is_identity(&res) {
                        self.add_strong(action, res, lv + 1, j);
                        restart = Some(j);
                        break 'scan;
                    }
                }
            }
            match restart {
                Some(j) => i = j as isize,
                None => i -= 1,
            }
        }
    }

    fn sift_from(&self, action: &A, mut h: A::Elem, from: usize) -> (A::Elem, usize) {
        for (l, level) in self.levels.iter().enumerate().skip(from) {
            let y = action.image(&h, level.base);
            match &level.transversal[y as usize] {
                Some((_, ui)) => h = action.compose(ui, &h),
                None => return (h, l),
            }
        }
        (h, self.levels.len())
    }

    pub fn contains(&self, action: &A, g: &A::Elem) -> bool {
        let (res, _) = self.sift_from(action, g.clone(), 0);
        action.is_identity(&res)
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn strong_generators(&self) -> &[A::Elem] {
        self.levels.first().map_or(&[], |l| &l.gens)
    }
}

/// Schreier-Sims order with the default base choice.
pub fn schreier_sims_order<A: Action>(action: &A, gens: &[A::Elem]) -> u128 {
    StabChain::new(action, gens, &[]).order()
}

/// Elements of `H ∩ K`, found by backtracking over the images of the common
/// base. Both chains must share the same base sequence, and that base must
/// determine elements of the ambient group.
pub fn intersect_chains<A: Action>(action: &A, h: &StabChain<A>, k: &StabChain<A>) -> Vec<A::Elem> {
    assert_eq!(h.base(), k.base(), "chains must share a base");
    let mut out = Vec::new();
    let id = action.identity();
    backtrack(action, h, k, 0, id.clone(), id.clone(), &mut out);
    out
}

fn backtrack<A: Action>(
    action: &A,
    h: &StabChain<A>,
    k: &StabChain<A>,
    l: usize,
    hcur: A::Elem,
    kcur_inv: A::Elem,
    out: &mut Vec<A::Elem>,
) {
    if l == h.levels.len() {
        if k.contains(action, &hcur) {
            out.push(hcur);
        }
        return;
    }
    let (hl, kl) = (&h.levels[l], &k.levels[l]);
    for &y in &hl.orbit {
        let (u, _) = hl.transversal[y as usize].as_ref().expect("orbit point");
        let x = action.image(&hcur, y);
        let z = action.image(&kcur_inv, x);
        if let Some((_, vi)) = &kl.transversal[z as usize] {
            let next_h = action.compose(&hcur, u);
            let next_k_inv = action.compose(vi, &kcur_inv);
            backtrack(action, h, k, l + 1, next_h, next_k_inv, out);
        }
    }
}

/// Result of a capped closure.
#[derive(Debug)]
pub enum Closure<E> {
    Complete(FxHashSet<E>),
    Overflow,
}

/// Breadth-first closure of `gens` under right multiplication; gives up once
/// more than `cap` elements have been found.
pub fn closure<A: Action>(action: &A, gens: &[A::Elem], cap: usize) -> Closure<A::Elem> {
    let mut set = FxHashSet::default();
    let id = action.identity();
    set.insert(id.clone());
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for s in gens {
            let y = action.compose(&x, s);
            if set.insert(y.clone()) {
                if set.len() > cap {
                    return Closure::Overflow;
                }
                frontier.push(y);
            }
        }
    }
    Closure::Complete(set)
}

/// The frame `(1,0,0), (0,1,0), (0,0,1), (1,1,1)`: four points in general
/// position, so only the identity of PGL(3,q) fixes all of them.
pub fn frame_base(g: &Pgl3) -> Vec<u32> {
    [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]]
        .iter()
        .map(|&v| g.point_index(&g.point(v).expect("nonzero")))
        .collect()
}

/// A subgroup of PGL(3,q) given by generators, with lazily computed element
/// set and stabilizer chains. Caches are write-once and thread-safe.
pub struct GroupHandle {
    pgl: Pgl3,
    gens: Vec<ProjMatrix>,
    cap: usize,
    elements: OnceLock<Result<Option<FxHashSet<ProjMatrix>>, GroupError>>,
    chain: OnceLock<StabChain<Pgl3>>,
    frame_chain: OnceLock<StabChain<Pgl3>>,
}

impl GroupHandle {
    pub fn new(pgl: &Pgl3, gens: Vec<ProjMatrix>, cap: usize) -> Self {
        GroupHandle {
            pgl: pgl.clone(),
            gens,
            cap,
            elements: OnceLock::new(),
            chain: OnceLock::new(),
            frame_chain: OnceLock::new(),
        }
    }

    pub fn pgl(&self) -> &Pgl3 {
        &self.pgl
    }

    pub fn generators(&self) -> &[ProjMatrix] {
        &self.gens
    }

    pub fn chain(&self) -> &StabChain<Pgl3> {
        self.chain.get_or_init(|| StabChain::new(&self.pgl, &self.gens, &[]))
    }

    fn frame_chain(&self) -> &StabChain<Pgl3> {
        self.frame_chain
            .get_or_init(|| StabChain::new(&self.pgl, &self.gens, &frame_base(&self.pgl)))
    }

    /// Exact order from Schreier-Sims.
    pub fn order(&self) -> u128 {
        self.chain().order()
    }

    pub fn is_enumerable(&self) -> bool {
        self.order() <= self.cap as u128
    }

    /// The full element set when the group fits under the cap, cross-checked
    /// against the Schreier-Sims order.
    pub fn elements(&self) -> Result<Option<&FxHashSet<ProjMatrix>>, GroupError> {
        self.elements
            .get_or_init(|| {
                let ss = self.order();
                if ss > self.cap as u128 {
                    return Ok(None);
                }
                match closure(&self.pgl, &self.gens, self.cap) {
                    Closure::Complete(set) if set.len() as u128 == ss => Ok(Some(set)),
                    Closure::Complete(set) => {
                        Err(GroupError::Inconsistent { closure: set.len() as u128, schreier_sims: ss })
                    }
                    Closure::Overflow => {
                        Err(GroupError::Inconsistent { closure: self.cap as u128 + 1, schreier_sims: ss })
                    }
                }
            })
            .as_ref()
            .map(Option::as_ref)
            .map_err(Clone::clone)
    }

    pub fn require_elements(&self) -> Result<&FxHashSet<ProjMatrix>, GroupError> {
        self.elements()?
            .ok_or(GroupError::TooLarge { order: self.order(), cap: self.cap })
    }

    /// Enumerates and cross-checks when the group is small enough to be worth it.
    pub fn cross_check(&self) -> Result<Option<u128>, GroupError> {
        if self.order() > ORACLE_LIMIT.min(self.cap as u128) {
            return Ok(None);
        }
        Ok(self.elements()?.map(|s| s.len() as u128))
    }

    pub fn contains(&self, m: &ProjMatrix) -> bool {
        if let Some(Ok(Some(set))) = self.elements.get() {
            return set.contains(m);
        }
        self.chain().contains(&self.pgl, m)
    }

    pub fn contains_all(&self, other: &GroupHandle) -> bool {
        other.gens.iter().all(|g| self.contains(g))
    }

    /// Elements of the intersection, sorted. The smaller group is enumerated
    /// and filtered when it fits under the cap; otherwise a backtrack search
    /// over a common frame base is used.
    pub fn intersect(&self, other: &GroupHandle) -> Result<Vec<ProjMatrix>, GroupError> {
        let (small, big) = if self.order() <= other.order() { (self, other) } else { (other, self) };
        let mut out = match small.elements()? {
            Some(set) => set.iter().filter(|m| big.contains(m)).copied().collect(),
            None => intersect_chains(&self.pgl, self.frame_chain(), other.frame_chain()),
        };
        out.sort();
        Ok(out)
    }

    /// Whether the group is all of PSL(3,q).
    pub fn equals_psl3(&self) -> Result<bool, GroupError> {
        if let Some(i) = self.gens.iter().position(|g| !self.pgl.in_psl(g)) {
            return Err(GroupError::NotInPsl(i));
        }
        Ok(self.order() == self.pgl.psl_order())
    }
}

/// A subfield GF(p^n) of a larger field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Subfield {
    pub p: u32,
    pub n: u32,
}

impl Subfield {
    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.n)
    }
}

/// Smallest subfield containing `elems`: the least `d | n` with `a^(p^d) = a` for all inputs.
pub fn generated_subfield(field: &Field, elems: &[Fe]) -> Subfield {
    let n = field.n();
    let d = (1..=n)
        .filter(|d| n % d == 0)
        .find(|&d| elems.iter().all(|&a| field.frobenius(a, d) == a))
        .unwrap_or(n);
    Subfield { p: field.p(), n: d }
}
