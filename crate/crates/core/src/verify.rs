//! Runs every applicable check on a catalogue instance and collects the
//! outcome into a serializable report.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::catalogue::{self, ExpectedChirality, Expectation, Family, Instance, Rank6Witness, Tuple};
use crate::cgroup::{
    check_ip_plus, check_ip_regular, check_string_chiral, check_string_regular, chirality_check, distant_noncommuting,
    facet_extract, is_reflection_witness, schlafli_chiral, schlafli_regular, Chirality, ChiralTuple,
    IntersectionFailure, Parabolics, RegularTuple,
};
use crate::gf::FieldSpec;
use crate::grp::{GroupError, GroupHandle, DEFAULT_CAP};
use crate::projmat::{Pgl3, ProjError, ProjMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Proj(#[from] ProjError),
    #[error(transparent)]
    Catalogue(#[from] catalogue::CatalogueError),
    #[error("reflection witness failed re-validation")]
    InvalidWitness,
}

impl VerifyError {
    /// Whether two independent computations disagreed.
    pub fn is_inconsistency(&self) -> bool {
        matches!(self, VerifyError::Group(GroupError::Inconsistent { .. }) | VerifyError::InvalidWitness)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub cap: usize,
    pub search_duality: bool,
    pub timings: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { cap: DEFAULT_CAP, search_duality: true, timings: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    fn of(b: bool) -> Status {
        if b {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiralityStatus {
    Chiral,
    Regular,
    NotApplicable,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    pub string: Status,
    pub ip: Status,
    pub full_group: Status,
    pub chirality: ChiralityStatus,
    pub nondegenerate: Status,
}

/// A family-specific claim and whether it was found to hold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fact {
    pub holds: bool,
    pub expected: bool,
    pub detail: String,
}

/// Closure size against Schreier-Sims order for one generated subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub subgroup: String,
    pub schreier_sims: u128,
    pub closure: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub family: Family,
    pub q: u32,
    pub field: FieldSpec,
    pub params: BTreeMap<String, String>,
    /// `sigma_1_based`, `rho_0_based` or `witness`.
    pub indexing: String,
    pub rank: usize,
    pub generators: Vec<String>,
    pub schlafli: Vec<u64>,
    pub degenerate: bool,
    pub checks: Checks,
    pub witnesses: BTreeMap<String, Value>,
    pub facts: BTreeMap<String, Fact>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_order: Option<u128>,
    pub oracle: Vec<OracleCheck>,
    pub expected: Expectation,
    pub expectations_met: bool,
    pub mismatches: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, u64>>,
}

impl VerificationReport {
    /// String property and intersection property both hold.
    pub fn is_polytope(&self) -> bool {
        self.checks.string == Status::Pass && self.checks.ip == Status::Pass
    }
}

/// Lap timer; never reads the clock when disabled (there is none on wasm32).
struct Timer {
    start: Option<Instant>,
    laps: BTreeMap<String, u64>,
}

impl Timer {
    fn new(enabled: bool) -> Timer {
        Timer { start: enabled.then(Instant::now), laps: BTreeMap::new() }
    }

    fn lap(&mut self, name: &str) {
        if let Some(start) = self.start {
            let now = Instant::now();
            self.laps.insert(name.to_string(), (now - start).as_millis() as u64);
            self.start = Some(now);
        }
    }
}

/// Builds and verifies in one step.
pub fn verify_family(
    family: Family,
    q: u32,
    params: &catalogue::Params,
    opts: &VerifyOptions,
) -> Result<VerificationReport, VerifyError> {
    let inst = catalogue::build(family, q, params)?;
    verify(&inst, opts)
}

pub fn verify(inst: &Instance, opts: &VerifyOptions) -> Result<VerificationReport, VerifyError> {
    let total = opts.timings.then(Instant::now);
    let mut timer = Timer::new(opts.timings);
    let g = &inst.pgl;
    let mut r = VerificationReport {
        family: inst.family,
        q: inst.q(),
        field: g.field().spec(),
        params: inst.params.clone(),
        indexing: String::new(),
        rank: 0,
        generators: inst.generators().iter().map(|m| g.format(m)).collect(),
        schlafli: Vec::new(),
        degenerate: false,
        checks: Checks {
            string: Status::Skipped,
            ip: Status::Skipped,
            full_group: Status::Skipped,
            chirality: ChiralityStatus::Skipped,
            nondegenerate: Status::Skipped,
        },
        witnesses: BTreeMap::new(),
        facts: BTreeMap::new(),
        group_order: None,
        oracle: Vec::new(),
        expected: inst.expect.clone(),
        expectations_met: false,
        mismatches: Vec::new(),
        timings_ms: None,
    };
    match &inst.tuple {
        Tuple::Chiral(t) => verify_chiral(inst, t, opts, &mut r, &mut timer)?,
        Tuple::Regular(t) => verify_regular(g, t, opts, &mut r, &mut timer)?,
        Tuple::Witness(w) => verify_witness(g, w, &mut r)?,
    }
    family_facts(inst, opts, &mut r)?;
    timer.lap("facts");
    compare_expectations(&mut r);
    if let Some(total) = total {
        timer.laps.insert("total".into(), total.elapsed().as_millis() as u64);
        r.timings_ms = Some(timer.laps);
    }
    Ok(r)
}

fn chiral_label(range: (usize, usize)) -> String {
    if range.0 == range.1 {
        return "<>".into();
    }
    let names: Vec<String> = (range.0..range.1).map(|i| format!("s{}", i + 1)).collect();
    format!("<{}>", names.join(","))
}

fn regular_label(range: (usize, usize)) -> String {
    if range.0 == range.1 {
        return "<>".into();
    }
    let names: Vec<String> = (range.0..range.1).map(|i| format!("r{i}")).collect();
    format!("<{}>", names.join(","))
}

fn intersection_witness(g: &Pgl3, w: &IntersectionFailure, label: fn((usize, usize)) -> String) -> Value {
    json!({
        "left": label((w.left.start, w.left.end)),
        "right": label((w.right.start, w.right.end)),
        "expected": label((w.expected.start, w.expected.end)),
        "element": g.format(&w.element),
        "kind": if w.extra { "in_intersection_not_expected" } else { "in_expected_not_intersection" },
    })
}

fn record_oracle(par: &Parabolics, label: fn((usize, usize)) -> String, prefix: &str, out: &mut Vec<OracleCheck>) -> Result<(), VerifyError> {
    for (range, h) in par.built() {
        if let Some(n) = h.cross_check()? {
            out.push(OracleCheck { subgroup: format!("{prefix}{}", label(range)), schreier_sims: h.order(), closure: n });
        }
    }
    Ok(())
}

fn verify_chiral(
    inst: &Instance,
    t: &ChiralTuple,
    opts: &VerifyOptions,
    r: &mut VerificationReport,
    timer: &mut Timer,
) -> Result<(), VerifyError> {
    let g = &inst.pgl;
    let n = t.generators().len();
    r.indexing = "sigma_1_based".into();
    r.rank = t.rank();
    let sch = schlafli_chiral(g, t)?;
    r.schlafli = sch.entries.clone();
    r.degenerate = sch.degenerate;
    r.checks.nondegenerate = Status::of(!sch.degenerate);

    let string = check_string_chiral(g, t);
    r.checks.string = Status::of(string.passed());
    if let Some(w) = string.witness() {
        r.witnesses.insert("string".into(), serde_json::to_value(w).expect("serializable"));
    }
    timer.lap("string");

    let par = Parabolics::new(g, t.generators(), opts.cap);
    if string.passed() {
        let ip = check_ip_plus(&par, t)?;
        r.checks.ip = Status::of(ip.passed());
        if let Some(w) = ip.witness() {
            r.witnesses.insert("ip".into(), intersection_witness(g, w, chiral_label));
        }
    }
    timer.lap("ip");

    let whole = par.get(0..n);
    r.group_order = Some(whole.order());
    let full = whole.equals_psl3()?;
    r.checks.full_group = Status::of(full);
    timer.lap("full_group");

    if r.is_polytope() {
        match chirality_check(g, t, opts.search_duality) {
            Chirality::Chiral => r.checks.chirality = ChiralityStatus::Chiral,
            Chirality::Regular(aut) => {
                // re-validated independently of the search
                let valid = is_reflection_witness(g, t, &aut);
                r.checks.chirality = ChiralityStatus::Regular;
                r.witnesses.insert(
                    "chirality".into(),
                    json!({
                        "conjugator": g.format(&aut.conjugator),
                        "frobenius": aut.frobenius,
                        "duality": aut.duality,
                        "revalidated": valid,
                    }),
                );
                if !valid {
                    return Err(VerifyError::InvalidWitness);
                }
            }
        }
        timer.lap("chirality");

        let (facet, _) = facet_extract(t);
        let facet_par = Parabolics::new(g, facet.generators(), opts.cap);
        let facet_string = check_string_regular(g, &facet).passed();
        let facet_ip = facet_string && check_ip_regular(&facet_par, &facet)?.passed();
        r.facts.insert(
            "facet_regular".into(),
            Fact {
                holds: facet_string && facet_ip,
                expected: true,
                detail: format!("facet tuple (t12..t1{n}) string={facet_string} ip={facet_ip}"),
            },
        );
        record_oracle(&facet_par, regular_label, "facet", &mut r.oracle)?;

        let bad = distant_noncommuting(g, t);
        r.facts.insert(
            "distant_generators_commute".into(),
            Fact {
                holds: bad.is_empty(),
                expected: true,
                detail: if bad.is_empty() {
                    "s_i s_j = s_j s_i for |i-j| > 2".into()
                } else {
                    format!("non-commuting pairs {bad:?}")
                },
            },
        );
        if full && r.checks.chirality == ChiralityStatus::Chiral {
            let involutions: Vec<usize> = (0..n).filter(|&i| sch.entries[i] == 2).map(|i| i + 1).collect();
            r.facts.insert(
                "no_involutory_generator".into(),
                Fact {
                    holds: involutions.is_empty(),
                    expected: true,
                    detail: format!("generators of order 2: {involutions:?}"),
                },
            );
        }
        timer.lap("consequences");
    } else {
        r.checks.chirality = ChiralityStatus::Skipped;
    }
    record_oracle(&par, chiral_label, "", &mut r.oracle)?;
    timer.lap("oracle");
    Ok(())
}

fn verify_regular(
    g: &Pgl3,
    t: &RegularTuple,
    opts: &VerifyOptions,
    r: &mut VerificationReport,
    timer: &mut Timer,
) -> Result<(), VerifyError> {
    let n = t.rank();
    r.indexing = "rho_0_based".into();
    r.rank = n;
    r.checks.chirality = ChiralityStatus::NotApplicable;
    let sch = schlafli_regular(g, t)?;
    r.schlafli = sch.entries.clone();
    r.degenerate = sch.degenerate;
    r.checks.nondegenerate = Status::of(!sch.degenerate);

    let string = check_string_regular(g, t);
    r.checks.string = Status::of(string.passed());
    if let Some(w) = string.witness() {
        r.witnesses.insert("string".into(), serde_json::to_value(w).expect("serializable"));
    }
    timer.lap("string");

    let par = Parabolics::new(g, t.generators(), opts.cap);
    let ip = check_ip_regular(&par, t)?;
    r.checks.ip = Status::of(ip.passed());
    if let Some(w) = ip.witness() {
        r.witnesses.insert("ip".into(), intersection_witness(g, w, regular_label));
    }
    timer.lap("ip");

    let whole = par.get(0..n);
    r.group_order = Some(whole.order());
    r.checks.full_group = match whole.equals_psl3() {
        Ok(b) => Status::of(b),
        Err(GroupError::NotInPsl(_)) => Status::Fail,
        Err(e) => return Err(e.into()),
    };
    timer.lap("full_group");
    record_oracle(&par, regular_label, "", &mut r.oracle)?;
    timer.lap("oracle");
    Ok(())
}

fn verify_witness(g: &Pgl3, w: &Rank6Witness, r: &mut VerificationReport) -> Result<(), VerifyError> {
    r.indexing = "witness".into();
    r.rank = 6;
    let get = |name: &str| w.elements.iter().find(|(n, _)| n == name).map(|(_, m)| *m);
    let f = g.field();
    let common = [crate::gf::Fe::ZERO, crate::gf::Fe::ONE, crate::gf::Fe::ZERO];
    let taus: Vec<&(String, ProjMatrix)> = w.elements.iter().filter(|(n, _)| n.starts_with("tau")).collect();
    let fixing: Vec<&str> =
        taus.iter().filter(|(_, m)| g.apply_point(m, &common) == common).map(|(n, _)| n.as_str()).collect();
    let on_axis: Vec<&str> = taus
        .iter()
        .filter(|(_, m)| g.center_axis(m).is_ok_and(|(_, axis)| g.incident(&common, &axis)))
        .map(|(n, _)| n.as_str())
        .collect();
    r.witnesses.insert(
        "common_point".into(),
        json!({
            "point": g.format_vec(&common),
            "fixed_by": fixing,
            "on_axis_of": on_axis,
        }),
    );
    if w.parity_even {
        r.facts.insert(
            "common_fixed_point".into(),
            Fact {
                holds: fixing.len() == taus.len(),
                expected: true,
                detail: format!("(0,1,0) fixed by {} of {} elements", fixing.len(), taus.len()),
            },
        );
        r.facts.insert(
            "axes_through_common_point".into(),
            Fact {
                holds: on_axis.len() == taus.len(),
                expected: true,
                detail: format!("(0,1,0) on {} of {} axes", on_axis.len(), taus.len()),
            },
        );
    } else {
        let (s1, s5) = (get("sigma1").expect("built"), get("sigma5").expect("built"));
        let commute = g.commute(&s1, &s5);
        r.witnesses.insert(
            "noncommuting".into(),
            json!({
                "sigma1": g.format(&s1),
                "sigma5": g.format(&s5),
                "sigma1_sigma5": g.format(&g.mul(&s1, &s5)),
                "sigma5_sigma1": g.format(&g.mul(&s5, &s1)),
            }),
        );
        r.facts.insert(
            "distant_generators_commute".into(),
            Fact {
                holds: commute,
                expected: false,
                detail: if commute { "s1 s5 = s5 s1".into() } else { "s1 s5 != s5 s1".into() },
            },
        );
        let involutions = taus.iter().all(|(_, m)| g.order(m).is_ok_and(|o| o == 2));
        r.facts.insert(
            "taus_are_involutions".into(),
            Fact { holds: involutions, expected: true, detail: format!("all listed t_ij have order 2 over GF({})", f.q()) },
        );
    }
    Ok(())
}

fn permutes(g: &Pgl3, gens: &[ProjMatrix], set: &[[crate::gf::Fe; 3]], lines: bool) -> bool {
    gens.iter().all(|m| {
        set.iter().all(|v| {
            let image = if lines { g.apply_line(m, v) } else { g.apply_point(m, v) };
            set.contains(&image)
        })
    })
}

fn family_facts(inst: &Instance, opts: &VerifyOptions, r: &mut VerificationReport) -> Result<(), VerifyError> {
    let g = &inst.pgl;
    let f = g.field();
    match (&inst.family, &inst.tuple) {
        (Family::Thm1, Tuple::Chiral(t)) => {
            let d = inst.extras.duality.expect("thm1 carries D");
            let phi = |m: &ProjMatrix| g.conjugate(&g.dual(m), &d);
            let dual = t.dual(g);
            let image = t.map(g, phi);
            r.facts.insert(
                "self_dual".into(),
                Fact {
                    holds: image == dual,
                    expected: true,
                    detail: "D s^-T D^-1 maps (s1,s2,s3) to (s3^-1,s2^-1,s1^-1)".into(),
                },
            );
            let back = image.map(g, phi);
            r.facts.insert(
                "duality_involutive".into(),
                Fact { holds: back == *t, expected: true, detail: "applying the duality twice".into() },
            );
            let lines: Vec<_> = inst.extras.lines.iter().map(|(_, l)| *l).collect();
            let points: Vec<_> = inst.extras.points.iter().map(|(_, p)| *p).collect();
            r.facts.insert(
                "s1_s2_stabilize_two_lines".into(),
                Fact {
                    holds: permutes(g, &t.generators()[..2], &lines, true),
                    expected: true,
                    detail: format!("line set {{{}}}", lines.iter().map(|l| g.format_vec(l)).collect::<Vec<_>>().join(",")),
                },
            );
            r.facts.insert(
                "s2_s3_stabilize_two_points".into(),
                Fact {
                    holds: permutes(g, &t.generators()[1..], &points, false),
                    expected: true,
                    detail: format!("point set {{{}}}", points.iter().map(|p| g.format_vec(p)).collect::<Vec<_>>().join(",")),
                },
            );
        }
        (Family::Thm2, Tuple::Chiral(t)) => {
            let k = inst.params.get("k").map(String::as_str) == Some("-1");
            let tail = &t.generators()[1..];
            if k {
                let form = inst.extras.form.expect("conic for k = -1");
                let ok = tail.iter().map(|m| g.preserves_form(m, &form)).collect::<Result<Vec<_>, _>>()?;
                r.facts.insert(
                    "conic_invariant".into(),
                    Fact { holds: ok.iter().all(|&b| b), expected: true, detail: "s2,s3,s4 preserve XY + wYZ + w^2ZX".into() },
                );
                let alt4 = GroupHandle::new(g, t.generators()[2..].to_vec(), opts.cap);
                let order = alt4.order();
                if let Some(n) = alt4.cross_check()? {
                    r.oracle.push(OracleCheck { subgroup: "<s3,s4>".into(), schreier_sims: order, closure: n });
                }
                r.facts.insert(
                    "s3_s4_order_12".into(),
                    Fact { holds: order == 12, expected: true, detail: format!("|<s3,s4>| = {order}") },
                );
            } else {
                let (_, pt) = inst.extras.points[0];
                let other = [pt[0], pt[2], pt[1]];
                r.facts.insert(
                    "point_invariant".into(),
                    Fact {
                        holds: tail.iter().all(|m| g.apply_point(m, &pt) == pt),
                        expected: true,
                        detail: format!("s2,s3,s4 fix {}", g.format_vec(&pt)),
                    },
                );
                r.facts.insert(
                    "second_point_invariant".into(),
                    Fact {
                        holds: t.generators()[2..].iter().all(|m| g.apply_point(m, &other) == other),
                        expected: true,
                        detail: format!("s3,s4 fix {}", g.format_vec(&other)),
                    },
                );
                let omega = f.primitive_cube_root().expect("built");
                let v = inst.extras.dual_conjugator.expect("thm2 carries V");
                let t11 = catalogue::thm2_matrices(g, omega, 1, 1)?;
                let t12 = catalogue::thm2_matrices(g, omega, 1, 2)?;
                let v_inv = g.inverse(&v);
                let image = t11.map(g, |m| g.conjugate(m, &v_inv));
                r.facts.insert(
                    "dual_conjugator".into(),
                    Fact {
                        holds: image == t12.dual(g),
                        expected: true,
                        detail: "V^-1 t V maps the (k,i)=(1,1) tuple to the dual of the (1,2) tuple".into(),
                    },
                );
            }
        }
        (Family::R3Conic, Tuple::Regular(t)) => {
            let form = inst.extras.form.expect("conic family carries its form");
            let ok = t.generators().iter().map(|m| g.preserves_form(m, &form)).collect::<Result<Vec<_>, _>>()?;
            r.facts.insert(
                "form_preserved".into(),
                Fact { holds: ok.iter().all(|&b| b), expected: true, detail: "every generator preserves Q".into() },
            );
        }
        _ => {}
    }
    Ok(())
}

fn compare_expectations(r: &mut VerificationReport) {
    let e = r.expected.clone();
    let mut miss = Vec::new();
    if let Some(p) = e.polytope {
        if r.is_polytope() != p {
            miss.push(format!("polytope: expected {p}, found {}", r.is_polytope()));
        }
    }
    if let Some(s) = &e.schlafli {
        if *s != r.schlafli {
            miss.push(format!("schlafli: expected {s:?}, found {:?}", r.schlafli));
        }
    }
    if let Some(n) = e.group_order {
        if r.group_order != Some(n) {
            miss.push(format!("group order: expected {n}, found {:?}", r.group_order));
        }
    }
    if let Some(b) = e.full_group {
        if (r.checks.full_group == Status::Pass) != b {
            miss.push(format!("full group: expected {b}, found {:?}", r.checks.full_group));
        }
    }
    if let Some(d) = e.degenerate {
        if r.degenerate != d {
            miss.push(format!("degenerate: expected {d}, found {}", r.degenerate));
        }
    }
    match e.chirality {
        Some(ExpectedChirality::Chiral) if r.checks.chirality != ChiralityStatus::Chiral => {
            miss.push(format!("chirality: expected chiral, found {:?}", r.checks.chirality));
        }
        Some(ExpectedChirality::Regular { frobenius }) => {
            if r.checks.chirality != ChiralityStatus::Regular {
                miss.push(format!("chirality: expected regular, found {:?}", r.checks.chirality));
            } else if let Some(k) = frobenius {
                let found = r.witnesses.get("chirality").and_then(|w| w.get("frobenius")).and_then(Value::as_u64);
                if found != Some(k as u64) {
                    miss.push(format!("chirality witness: expected Frobenius power {k}, found {found:?}"));
                }
            }
        }
        _ => {}
    }
    for (name, fact) in &r.facts {
        if fact.holds != fact.expected {
            miss.push(format!("{name}: expected {}, found {} ({})", fact.expected, fact.holds, fact.detail));
        }
    }
    for o in &r.oracle {
        if o.closure != o.schreier_sims {
            miss.push(format!("oracle {}: closure {} vs Schreier-Sims {}", o.subgroup, o.closure, o.schreier_sims));
        }
    }
    r.expectations_met = miss.is_empty();
    r.mismatches = miss;
}

/// Column names of [`csv_row`].
pub const CSV_HEADER: &str =
    "family,q,params,rank,schlafli,string,ip,full_group,chirality,nondegenerate,group_order,expectations_met";

/// One flattened CSV line (no trailing newline).
pub fn csv_row(r: &VerificationReport) -> String {
    let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let schlafli: Vec<String> = r.schlafli.iter().map(u64::to_string).collect();
    let status = |s: Status| serde_json::to_value(s).expect("serializable").as_str().unwrap_or("").to_string();
    let chir = serde_json::to_value(r.checks.chirality).expect("serializable");
    format!(
        "{},{},\"{}\",{},\"[{}]\",{},{},{},{},{},{},{}",
        r.family,
        r.q,
        params.join(";"),
        r.rank,
        schlafli.join(","),
        status(r.checks.string),
        status(r.checks.ip),
        status(r.checks.full_group),
        chir.as_str().unwrap_or(""),
        status(r.checks.nondegenerate),
        r.group_order.map(|n| n.to_string()).unwrap_or_default(),
        r.expectations_met
    )
}

/// A short human-readable summary.
pub fn text_summary(r: &VerificationReport) -> String {
    let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let mut s = format!("{} q={} {}\n", r.family, r.q, params.join(" "));
    s += &format!("  rank {} ({}), schlafli {:?}\n", r.rank, r.indexing, r.schlafli);
    s += &format!(
        "  string {:?}, ip {:?}, full group {:?}, chirality {:?}, nondegenerate {:?}\n",
        r.checks.string, r.checks.ip, r.checks.full_group, r.checks.chirality, r.checks.nondegenerate
    );
    if let Some(n) = r.group_order {
        s += &format!("  group order {n}\n");
    }
    for (name, w) in &r.witnesses {
        s += &format!("  witness {name}: {w}\n");
    }
    for (name, fact) in &r.facts {
        s += &format!("  fact {name}: {} ({})\n", fact.holds, fact.detail);
    }
    if !r.oracle.is_empty() {
        s += &format!("  oracle: {} subgroups, closure = Schreier-Sims for all: {}\n", r.oracle.len(), r.oracle.iter().all(|o| o.closure == o.schreier_sims));
    }
    s += &format!("  expectations met: {}\n", r.expectations_met);
    for m in &r.mismatches {
        s += &format!("    mismatch: {m}\n");
    }
    s
}
