//! Exhaustive search for rotation-group generator tuples in PSL(3,q), q tiny.

use std::collections::HashSet;

use psl3_core::cgroup::{check_ip_plus, chirality_check, Chirality, ChiralTuple, Parabolics};
use psl3_core::grp::{GroupHandle, DEFAULT_CAP};
use psl3_core::{make_field, Pgl3, ProjMatrix};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub q: u32,
    pub rank: usize,
    /// Conjugacy classes tried for `σ_1`.
    pub sigma1_classes: usize,
    /// Tuples with the string property (every `τ_{i,j}`, `i < j`, an involution).
    pub string_tuples: u64,
    /// String tuples dropped because some `σ_i` is an involution or trivial.
    pub rejected_short_generators: u64,
    pub full_group: u64,
    /// Full-group tuples that also satisfy IP⁺.
    pub polytopes: u64,
    pub chiral: u64,
    pub directly_regular: u64,
    pub chiral_tuples: Vec<Vec<String>>,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub search_duality: bool,
}

/// Only fields small enough to enumerate PSL(3,q) in full.
pub fn supported(q: u32) -> bool {
    q == 2 || q == 3
}

struct Ctx {
    g: Pgl3,
    involutions: Vec<ProjMatrix>,
    psl_order: u128,
    opts: SearchOptions,
}

/// Representatives of the conjugacy classes of `elements` under `gens`.
fn class_representatives(g: &Pgl3, elements: &[ProjMatrix]) -> Vec<ProjMatrix> {
    let mut seen = HashSet::new();
    let mut reps = Vec::new();
    for &x in elements {
        if seen.contains(&x) {
            continue;
        }
        reps.push(x);
        for h in elements {
            seen.insert(g.conjugate(&x, h));
        }
    }
    reps
}

pub fn search(q: u32, rank: usize, opts: SearchOptions) -> SearchReport {
    assert!(supported(q) && (3..=5).contains(&rank), "unsupported search parameters");
    let (p, n) = if q == 2 { (2, 1) } else { (3, 1) };
    let g = Pgl3::new(make_field(p, n).expect("prime"));
    let whole = GroupHandle::new(&g, g.psl_generators(), DEFAULT_CAP);
    let mut elements: Vec<ProjMatrix> = whole.require_elements().expect("small group").iter().copied().collect();
    elements.sort();
    let order = |m: &ProjMatrix| g.order(m).expect("finite");
    let involutions: Vec<_> = elements.iter().copied().filter(|m| order(m) == 2).collect();
    let reps: Vec<_> = class_representatives(&g, &elements).into_iter().filter(|m| order(m) > 2).collect();
    let ctx = Ctx { psl_order: g.psl_order(), g, involutions, opts };
    let mut report = SearchReport { q, rank, sigma1_classes: reps.len(), ..SearchReport::default() };
    // one task per (σ_1, τ_{1,2}) pair; results are merged in input order
    let tasks: Vec<(ProjMatrix, ProjMatrix)> =
        reps.iter().flat_map(|&s| ctx.involutions.iter().map(move |&t| (s, t))).collect();
    let parts: Vec<SearchReport> = tasks
        .par_iter()
        .map(|&(s1, t12)| {
            let mut part = SearchReport::default();
            let s2 = ctx.g.mul(&ctx.g.inverse(&s1), &t12);
            extend(&ctx, vec![s1, s2], rank - 1, &mut part);
            part
        })
        .collect();
    for part in parts {
        report.string_tuples += part.string_tuples;
        report.rejected_short_generators += part.rejected_short_generators;
        report.full_group += part.full_group;
        report.polytopes += part.polytopes;
        report.chiral += part.chiral;
        report.directly_regular += part.directly_regular;
        report.chiral_tuples.extend(part.chiral_tuples);
    }
    report
}

fn is_involution(g: &Pgl3, m: &ProjMatrix) -> bool {
    !g.is_identity(m) && g.is_identity(&g.mul(m, m))
}

/// Extends `sigma` (whose `τ_{i,j}` are already involutions) to `len` generators.
fn extend(ctx: &Ctx, sigma: Vec<ProjMatrix>, len: usize, out: &mut SearchReport) {
    let g = &ctx.g;
    if sigma.len() == len {
        evaluate(ctx, sigma, out);
        return;
    }
    let last = *sigma.last().expect("nonempty");
    let last_inv = g.inverse(&last);
    for v in &ctx.involutions {
        let next = g.mul(&last_inv, v);
        // τ_{j,k+1} = σ_j ⋯ σ_{k-1} · v for every j < k
        let mut prefix = g.identity();
        let mut ok = true;
        for j in (0..sigma.len() - 1).rev() {
            prefix = g.mul(&sigma[j], &prefix);
            if !is_involution(g, &g.mul(&prefix, v)) {
                ok = false;
                break;
            }
        }
        if ok {
            let mut s = sigma.clone();
            s.push(next);
            extend(ctx, s, len, out);
        }
    }
}

fn evaluate(ctx: &Ctx, sigma: Vec<ProjMatrix>, out: &mut SearchReport) {
    let g = &ctx.g;
    out.string_tuples += 1;
    // an involutory or trivial generator gives an index-2 subgroup or a
    // degenerate tuple, neither possible for a chiral tuple of a simple group
    if sigma.iter().any(|s| g.order(s).expect("finite") <= 2) {
        out.rejected_short_generators += 1;
        return;
    }
    let par = Parabolics::new(g, &sigma, DEFAULT_CAP);
    if par.get(0..sigma.len()).order() != ctx.psl_order {
        return;
    }
    out.full_group += 1;
    let t = ChiralTuple::new(g, sigma);
    if !check_ip_plus(&par, &t).expect("small groups").passed() {
        return;
    }
    out.polytopes += 1;
    match chirality_check(g, &t, ctx.opts.search_duality) {
        Chirality::Chiral => {
            out.chiral += 1;
            out.chiral_tuples.push(t.generators().iter().map(|m| g.format(m)).collect());
        }
        Chirality::Regular(_) => out.directly_regular += 1,
    }
}
