//! Brute-force recomputation of orders, Schläfli types and intersections,
//! sharing nothing with the stabilizer-chain code beyond matrix arithmetic.

use std::collections::{HashSet, VecDeque};

use psl3_core::catalogue::{Instance, Tuple};
use psl3_core::grp::GroupHandle;
use psl3_core::{Pgl3, ProjMatrix};
use rand::{rngs::StdRng, Rng, SeedableRng};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupOrder {
    pub subgroup: String,
    pub closure: u64,
    pub schreier_sims: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionCheck {
    pub left: String,
    pub right: String,
    pub expected: String,
    pub size: u64,
    pub equals_expected: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub family: String,
    pub q: u32,
    pub schlafli: Vec<u64>,
    pub subgroups: Vec<SubgroupOrder>,
    pub intersections: Vec<IntersectionCheck>,
    /// Random words in the generators tested for membership both ways.
    pub membership_samples: u64,
    pub membership_agree: bool,
    pub consistent: bool,
}

#[derive(Debug)]
pub struct CapExceeded {
    pub subgroup: String,
    pub order: u128,
    pub cap: usize,
}

fn closure(g: &Pgl3, gens: &[ProjMatrix], cap: usize) -> Option<HashSet<ProjMatrix>> {
    let mut seen = HashSet::from([g.identity()]);
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        for s in gens {
            let y = g.mul(&x, s);
            if seen.insert(y) {
                if seen.len() > cap {
                    return None;
                }
                queue.push_back(y);
            }
        }
    }
    Some(seen)
}

fn naive_order(g: &Pgl3, m: &ProjMatrix) -> u64 {
    let mut x = *m;
    let mut n = 1;
    while !g.is_identity(&x) {
        x = g.mul(&x, m);
        n += 1;
    }
    n
}

pub fn run(inst: &Instance, cap: usize, samples: u64, seed: u64) -> Result<OracleReport, CapExceeded> {
    let g = &inst.pgl;
    let gens = inst.generators();
    let (chiral, rotations): (bool, Vec<ProjMatrix>) = match &inst.tuple {
        Tuple::Chiral(t) => (true, t.generators().to_vec()),
        Tuple::Regular(t) => (false, t.rotations(g)),
        Tuple::Witness(_) => (false, Vec::new()),
    };
    let label = |lo: usize, hi: usize| -> String {
        let names: Vec<String> =
            (lo..hi).map(|i| if chiral { format!("s{}", i + 1) } else { format!("r{i}") }).collect();
        format!("<{}>", names.join(","))
    };
    let n = gens.len();
    let mut sets = std::collections::BTreeMap::new();
    let mut subgroups = Vec::new();
    for len in (1..=n).rev() {
        for lo in 0..=n - len {
            let hi = lo + len;
            let name = label(lo, hi);
            let set = closure(g, &gens[lo..hi], cap).ok_or_else(|| CapExceeded {
                subgroup: name.clone(),
                order: GroupHandle::new(g, gens[lo..hi].to_vec(), cap).order(),
                cap,
            })?;
            let ss = GroupHandle::new(g, gens[lo..hi].to_vec(), cap).order();
            subgroups.push(SubgroupOrder { subgroup: name, closure: set.len() as u64, schreier_sims: ss });
            sets.insert((lo, hi), set);
        }
    }
    let trivial = HashSet::from([g.identity()]);
    let get = |lo: usize, hi: usize| if lo == hi { &trivial } else { &sets[&(lo, hi)] };
    let mut intersections = Vec::new();
    let mut push = |l: (usize, usize), r: (usize, usize), e: (usize, usize)| {
        let (a, b, c) = (get(l.0, l.1), get(r.0, r.1), get(e.0, e.1));
        let inter: HashSet<ProjMatrix> = a.intersection(b).copied().collect();
        intersections.push(IntersectionCheck {
            left: label(l.0, l.1),
            right: label(r.0, r.1),
            expected: label(e.0, e.1),
            size: inter.len() as u64,
            equals_expected: inter == *c,
        });
    };
    if chiral {
        for m in 2..=n {
            for i in 1..m {
                push((0, m - 1), (i, m), (i, m - 1));
            }
        }
    } else if !matches!(inst.tuple, Tuple::Witness(_)) {
        for lo in 0..n {
            for hi in lo + 2..=n {
                push((lo, hi - 1), (lo + 1, hi), (lo + 1, hi - 1));
            }
        }
    }
    // random words: membership by set lookup against the stabilizer chain
    let mut rng = StdRng::seed_from_u64(seed);
    let whole = GroupHandle::new(g, gens.clone(), cap);
    let mut membership_agree = true;
    if n > 0 {
        let full = &sets[&(0, n)];
        for _ in 0..samples {
            let len = rng.gen_range(1..20);
            let w = g.product((0..len).map(|_| &gens[rng.gen_range(0..n)]));
            membership_agree &= full.contains(&w) && whole.contains(&w);
            // a random matrix: both tests must agree either way
            let f = g.field();
            let raw = std::array::from_fn(|_| f.elem(rng.gen_range(0..f.q())).expect("in range"));
            if let Ok(m) = g.canonicalize(raw) {
                membership_agree &= full.contains(&m) == whole.contains(&m);
            }
        }
    }
    let schlafli = rotations.iter().map(|m| naive_order(g, m)).collect();
    let consistent = membership_agree && subgroups.iter().all(|s| s.closure as u128 == s.schreier_sims);
    Ok(OracleReport {
        family: inst.family.to_string(),
        q: inst.q(),
        schlafli,
        subgroups,
        intersections,
        membership_samples: samples,
        membership_agree,
        consistent,
    })
}
