//! Builders for the explicit generator families, with the verdicts and group
//! orders each family is expected to produce.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cgroup::{ChiralTuple, RegularTuple};
use crate::gf::{self, make_field, Fe, Field, FieldError};
use crate::grp::generated_subfield;
use crate::projmat::{Pgl3, ProjError, ProjMatrix, QuadraticForm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogueError {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("{family}: {reason}")]
    Precondition { family: Family, reason: String },
    #[error("{family}: missing parameter `{name}`")]
    Missing { family: Family, name: &'static str },
    #[error("cannot evaluate `{expr}`: {reason}")]
    Expression { expr: String, reason: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Proj(#[from] ProjError),
}

type Result<T> = std::result::Result<T, CatalogueError>;

/// Stable family identifiers, as used on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "THM1")]
    Thm1,
    #[serde(rename = "THM2")]
    Thm2,
    #[serde(rename = "DIH_A")]
    DihA,
    #[serde(rename = "DIH_B")]
    DihB,
    #[serde(rename = "DIH_1")]
    Dih1,
    #[serde(rename = "DIH_2")]
    Dih2,
    #[serde(rename = "DIH_3")]
    Dih3,
    #[serde(rename = "DIH_4")]
    Dih4,
    #[serde(rename = "R3_ODD_CASE1")]
    R3OddCase1,
    #[serde(rename = "R3_ODD_CASE2")]
    R3OddCase2,
    #[serde(rename = "R3_ODD_CASE2_DUAL")]
    R3OddCase2Dual,
    #[serde(rename = "R3_ODD_CASE3")]
    R3OddCase3,
    #[serde(rename = "R3_ODD_CASE4")]
    R3OddCase4,
    #[serde(rename = "R3_ODD_CASE5")]
    R3OddCase5,
    #[serde(rename = "R3_ODD_CASE6")]
    R3OddCase6,
    #[serde(rename = "R3_ODD_CASE7")]
    R3OddCase7,
    #[serde(rename = "R3_ODD_CASE8")]
    R3OddCase8,
    #[serde(rename = "R3_CONIC")]
    R3Conic,
    #[serde(rename = "R4_ODD")]
    R4Odd,
    #[serde(rename = "R3_EVEN")]
    R3Even,
    #[serde(rename = "R4_EVEN")]
    R4Even,
    #[serde(rename = "EVEN_TRIANGULAR")]
    EvenTriangular,
    #[serde(rename = "RANK6_WITNESS_EVEN")]
    Rank6WitnessEven,
    #[serde(rename = "RANK6_WITNESS_ODD")]
    Rank6WitnessOdd,
}

impl Family {
    pub const ALL: [Family; 24] = [
        Family::Thm1,
        Family::Thm2,
        Family::DihA,
        Family::DihB,
        Family::Dih1,
        Family::Dih2,
        Family::Dih3,
        Family::Dih4,
        Family::R3OddCase1,
        Family::R3OddCase2,
        Family::R3OddCase2Dual,
        Family::R3OddCase3,
        Family::R3OddCase4,
        Family::R3OddCase5,
        Family::R3OddCase6,
        Family::R3OddCase7,
        Family::R3OddCase8,
        Family::R3Conic,
        Family::R4Odd,
        Family::R3Even,
        Family::R4Even,
        Family::EvenTriangular,
        Family::Rank6WitnessEven,
        Family::Rank6WitnessOdd,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Family::Thm1 => "THM1",
            Family::Thm2 => "THM2",
            Family::DihA => "DIH_A",
            Family::DihB => "DIH_B",
            Family::Dih1 => "DIH_1",
            Family::Dih2 => "DIH_2",
            Family::Dih3 => "DIH_3",
            Family::Dih4 => "DIH_4",
            Family::R3OddCase1 => "R3_ODD_CASE1",
            Family::R3OddCase2 => "R3_ODD_CASE2",
            Family::R3OddCase2Dual => "R3_ODD_CASE2_DUAL",
            Family::R3OddCase3 => "R3_ODD_CASE3",
            Family::R3OddCase4 => "R3_ODD_CASE4",
            Family::R3OddCase5 => "R3_ODD_CASE5",
            Family::R3OddCase6 => "R3_ODD_CASE6",
            Family::R3OddCase7 => "R3_ODD_CASE7",
            Family::R3OddCase8 => "R3_ODD_CASE8",
            Family::R3Conic => "R3_CONIC",
            Family::R4Odd => "R4_ODD",
            Family::R3Even => "R3_EVEN",
            Family::R4Even => "R4_EVEN",
            Family::EvenTriangular => "EVEN_TRIANGULAR",
            Family::Rank6WitnessEven => "RANK6_WITNESS_EVEN",
            Family::Rank6WitnessOdd => "RANK6_WITNESS_ODD",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Family {
    type Err = CatalogueError;

    fn from_str(s: &str) -> Result<Family> {
        let up = s.trim().to_ascii_uppercase().replace('-', "_");
        Family::ALL
            .into_iter()
            .find(|f| f.id() == up)
            .ok_or_else(|| CatalogueError::UnknownFamily(s.to_string()))
    }
}

/// Raw family parameters. Field-valued entries are expressions evaluated in
/// GF(q) (see [`eval_param`]).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_prime: Option<String>,
}

/// Field of order `q`.
pub fn field_of_order(q: u32) -> Result<Field> {
    let factors = gf::prime_factors(q as u64);
    if factors.len() != 1 {
        return Err(CatalogueError::NotPrimePower(q));
    }
    let p = factors[0] as u32;
    let mut n = 0;
    let mut m = q;
    while m > 1 {
        m /= p;
        n += 1;
    }
    Ok(make_field(p, n)?)
}

/// Evaluates an arithmetic expression over GF(q): integers, `X`, `+ - * /`,
/// unary minus and parentheses. In an extension field `X` is the polynomial
/// variable; in a prime field it is the smallest square root of 5. A
/// coefficient list `[c0,c1,...]` is accepted as a literal.
pub fn eval_param(f: &Field, expr: &str) -> Result<Fe> {
    let err = |reason: &str| CatalogueError::Expression { expr: expr.to_string(), reason: reason.to_string() };
    let t = expr.trim();
    if t.starts_with('[') {
        return f.parse(t).map_err(|_| err("bad coefficient list"));
    }
    let tokens: Vec<char> = t.chars().filter(|c| !c.is_whitespace()).collect();
    let mut parser = ExprParser { f, tokens: &tokens, pos: 0 };
    let v = parser.sum().map_err(|r| err(&r))?;
    if parser.pos != tokens.len() {
        return Err(err("trailing input"));
    }
    Ok(v)
}

struct ExprParser<'a> {
    f: &'a Field,
    tokens: &'a [char],
    pos: usize,
}

impl ExprParser<'_> {
    fn peek(&self) -> Option<char> {
        self.tokens.get(self.pos).copied()
    }

    fn sum(&mut self) -> std::result::Result<Fe, String> {
        let mut acc = self.product()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.product()?;
            acc = if op == '+' { self.f.add(acc, rhs) } else { self.f.sub(acc, rhs) };
        }
        Ok(acc)
    }

    fn product(&mut self) -> std::result::Result<Fe, String> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == '*' {
                self.f.mul(acc, rhs)
            } else {
                self.f.div(acc, rhs).map_err(|_| "division by zero".to_string())?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> std::result::Result<Fe, String> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(self.f.neg(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> std::result::Result<Fe, String> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek() != Some(')') {
                    return Err("unbalanced parentheses".into());
                }
                self.pos += 1;
                Ok(v)
            }
            Some('X') | Some('x') => {
                self.pos += 1;
                if self.f.n() > 1 {
                    Ok(self.f.x())
                } else {
                    self.f.sqrt(self.f.from_int(5)).ok_or_else(|| "5 is not a square".to_string())
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let s: String = self.tokens[start..self.pos].iter().collect();
                let v: i64 = s.parse().map_err(|_| "integer too large".to_string())?;
                Ok(self.f.from_int(v))
            }
            _ => Err("unexpected token".into()),
        }
    }
}

/// What a verification run should find. `None` means no claim.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expectation {
    /// Whether the tuple is a string C-group (regular) or C⁺-group (chiral).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polytope: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schlafli: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_order: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub full_group: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chirality: Option<ExpectedChirality>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedChirality {
    Chiral,
    Regular { frobenius: Option<u32> },
}

/// The generator data of a catalogue instance.
#[derive(Clone, Debug)]
pub enum Tuple {
    Chiral(ChiralTuple),
    Regular(RegularTuple),
    Witness(Rank6Witness),
}

/// Matrices entering the rank-6 impossibility arguments.
#[derive(Clone, Debug)]
pub struct Rank6Witness {
    /// Named elements in display order.
    pub elements: Vec<(String, ProjMatrix)>,
    pub parity_even: bool,
}

/// Auxiliary objects a family carries for its extra checks.
#[derive(Clone, Debug, Default)]
pub struct Extras {
    pub duality: Option<ProjMatrix>,
    pub dual_conjugator: Option<ProjMatrix>,
    pub form: Option<QuadraticForm>,
    pub points: Vec<(String, [Fe; 3])>,
    pub lines: Vec<(String, [Fe; 3])>,
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub family: Family,
    pub pgl: Pgl3,
    /// Resolved parameter values, formatted for reports.
    pub params: BTreeMap<String, String>,
    pub tuple: Tuple,
    pub expect: Expectation,
    pub extras: Extras,
}

impl Instance {
    pub fn q(&self) -> u32 {
        self.pgl.q()
    }

    pub fn generators(&self) -> Vec<ProjMatrix> {
        match &self.tuple {
            Tuple::Chiral(t) => t.generators().to_vec(),
            Tuple::Regular(t) => t.generators().to_vec(),
            Tuple::Witness(w) => w.elements.iter().map(|(_, m)| *m).collect(),
        }
    }
}

struct Ctx<'a> {
    family: Family,
    g: Pgl3,
    p: &'a Params,
    resolved: BTreeMap<String, String>,
}

impl<'a> Ctx<'a> {
    fn f(&self) -> &Field {
        self.g.field()
    }

    fn fail<T>(&self, reason: impl Into<String>) -> Result<T> {
        Err(CatalogueError::Precondition { family: self.family, reason: reason.into() })
    }

    fn record(&mut self, name: &str, v: Fe) {
        let s = self.f().format(v);
        self.resolved.insert(name.to_string(), s);
    }

    /// A field parameter, falling back to `default` (an expression) when absent.
    fn field_param(&mut self, name: &'static str, raw: &Option<String>, default: Option<&str>) -> Result<Fe> {
        let expr = match (raw, default) {
            (Some(s), _) => s.clone(),
            (None, Some(d)) => d.to_string(),
            (None, None) => return Err(CatalogueError::Missing { family: self.family, name }),
        };
        let v = eval_param(self.f(), &expr)?;
        self.record(name, v);
        Ok(v)
    }

    fn m(&self, rows: [[Fe; 3]; 3]) -> Result<ProjMatrix> {
        Ok(self.g.from_rows(rows)?)
    }

    fn mi(&self, rows: [[i64; 3]; 3]) -> Result<ProjMatrix> {
        Ok(self.g.from_ints(rows)?)
    }

    fn require_odd(&self) -> Result<()> {
        if self.f().p() == 2 {
            return self.fail("requires odd characteristic");
        }
        Ok(())
    }

    fn require_even(&self) -> Result<()> {
        if self.f().p() != 2 {
            return self.fail("requires even characteristic");
        }
        Ok(())
    }

    fn order(&self, m: &ProjMatrix) -> Result<u64> {
        Ok(self.g.order(m)?)
    }
}

/// Builds the instance of `family` over GF(q).
pub fn build(family: Family, q: u32, params: &Params) -> Result<Instance> {
    let field = field_of_order(q)?;
    let mut ctx = Ctx { family, g: Pgl3::new(field), p: params, resolved: BTreeMap::new() };
    let (tuple, expect, extras) = match family {
        Family::Thm1 => thm1(&mut ctx)?,
        Family::Thm2 => thm2(&mut ctx)?,
        Family::DihA | Family::DihB | Family::Dih1 | Family::Dih2 | Family::Dih3 | Family::Dih4 => dihedral(&mut ctx)?,
        Family::R3OddCase1
        | Family::R3OddCase2
        | Family::R3OddCase2Dual
        | Family::R3OddCase3
        | Family::R3OddCase4
        | Family::R3OddCase5
        | Family::R3OddCase6
        | Family::R3OddCase7
        | Family::R3OddCase8 => rank3_odd(&mut ctx)?,
        Family::R3Conic => rank3_conic(&mut ctx)?,
        Family::R4Odd => rank4_odd(&mut ctx)?,
        Family::R3Even => rank3_even(&mut ctx)?,
        Family::R4Even => rank4_even(&mut ctx)?,
        Family::EvenTriangular => even_triangular(&mut ctx)?,
        Family::Rank6WitnessEven | Family::Rank6WitnessOdd => rank6(&mut ctx)?,
    };
    Ok(Instance { family, pgl: ctx.g, params: ctx.resolved, tuple, expect, extras })
}

type Built = (Tuple, Expectation, Extras);

fn thm1(ctx: &mut Ctx) -> Result<Built> {
    let f = ctx.f().clone();
    let q = f.q();
    if q < 5 {
        return ctx.fail("requires q >= 5");
    }
    let x = match &ctx.p.x {
        Some(s) => eval_param(&f, s)?,
        None => f.primitive_element(),
    };
    if x.is_zero() || f.element_order(x)? != (q - 1) as u64 {
        return ctx.fail(format!("x = {} is not primitive", f.format(x)));
    }
    ctx.record("x", x);
    let (tuple, duality) = thm1_matrices(&ctx.g, x)?;
    let d = gf::gcd(3, (q - 1) as u64);
    let qm1 = (q - 1) as u64;
    let expect = Expectation {
        polytope: Some(true),
        schlafli: Some(vec![qm1, 2 * qm1 / d, qm1]),
        group_order: Some(ctx.g.psl_order()),
        structure: Some(format!("PSL(3,{q})")),
        full_group: Some(true),
        chirality: Some(ExpectedChirality::Chiral),
        degenerate: Some(false),
    };
    let (o, z) = (Fe::ONE, Fe::ZERO);
    let extras = Extras {
        duality: Some(duality),
        points: vec![("p".into(), [z, o, z]), ("p'".into(), [z, z, o])],
        lines: vec![
            ("l".into(), ctx.g.normalize([z, o, f.neg(o)])?),
            ("l'".into(), ctx.g.normalize([z, x, f.neg(o)])?),
        ],
        ..Extras::default()
    };
    Ok((Tuple::Chiral(tuple), expect, extras))
}

/// The rank-4 generators for a primitive `x` and the duality matrix `D`.
pub fn thm1_matrices(g: &Pgl3, x: Fe) -> Result<(ChiralTuple, ProjMatrix)> {
    let f = g.field();
    let (o, z) = (Fe::ONE, Fe::ZERO);
    let xi = f.inv(x)?;
    let s1 = g.from_rows([[x, o, z], [z, f.add(o, xi), f.neg(xi)], [z, o, z]])?;
    let s2 = g.from_rows([[f.neg(xi), z, z], [z, z, o], [z, x, z]])?;
    let d = f.sub(x, xi);
    let s3 = g.from_rows([[x, z, z], [d, o, z], [d, z, xi]])?;
    let dual = g.from_rows([[f.inv(d)?, z, z], [z, o, o], [z, o, x]])?;
    Ok((ChiralTuple::new(g, vec![s1, s2, s3]), dual))
}

fn thm2(ctx: &mut Ctx) -> Result<Built> {
    let f = ctx.f().clone();
    let Some(omega) = f.primitive_cube_root() else {
        return ctx.fail("no primitive cube root of unity");
    };
    let k = ctx.p.k.unwrap_or(1);
    let i = ctx.p.i.unwrap_or(1);
    if k != 1 && k != -1 {
        return ctx.fail("k must be 1 or -1");
    }
    if i != 1 && i != 2 {
        return ctx.fail("i must be 1 or 2");
    }
    ctx.resolved.insert("k".into(), k.to_string());
    ctx.resolved.insert("i".into(), i.to_string());
    ctx.record("omega", omega);
    let tuple = thm2_matrices(&ctx.g, omega, k, i)?;
    let (p, n) = (f.p(), f.n());
    let chirality = if n == 1 && p % 6 == 1 {
        Some(ExpectedChirality::Chiral)
    } else if n == 2 && p % 6 == 5 {
        Some(ExpectedChirality::Regular { frobenius: Some(1) })
    } else {
        None
    };
    let known = chirality.is_some();
    let expect = Expectation {
        polytope: known.then_some(true),
        schlafli: known.then(|| if k == 1 { vec![3, 6, 6, 3] } else { vec![3, 6, 3, 3] }),
        group_order: known.then(|| ctx.g.psl_order()),
        structure: known.then(|| format!("PSL(3,{})", f.q())),
        full_group: known.then_some(true),
        chirality,
        degenerate: known.then_some(false),
    };
    let w2 = f.mul(omega, omega);
    let (o, z) = (Fe::ONE, Fe::ZERO);
    let mut extras = Extras {
        dual_conjugator: Some(ctx.g.from_rows([[omega, w2, o], [w2, omega, o], [o, o, o]])?),
        ..Extras::default()
    };
    if k == -1 {
        // XY + ωYZ + ω²ZX with ω replaced by ω^i
        let wi = f.pow_u(omega, i as u64);
        extras.form = Some(QuadraticForm([z, o, f.mul(wi, wi), z, wi, z]));
    } else {
        let wi = f.pow_u(omega, i as u64);
        extras.points.push(("fixed".into(), [o, wi, f.mul(wi, wi)]));
    }
    Ok((Tuple::Chiral(tuple), expect, extras))
}

/// The rank-5 generators for a cube root of unity `omega`.
pub fn thm2_matrices(g: &Pgl3, omega: Fe, k: i64, i: u32) -> Result<ChiralTuple> {
    let f = g.field();
    let (o, z) = (Fe::ONE, Fe::ZERO);
    let wi = f.pow_u(omega, i as u64);
    let w2i = f.pow_u(omega, 2 * i as u64);
    let kk = f.from_int(k);
    let s1 = g.from_rows([[o, z, z], [z, wi, z], [z, z, w2i]])?;
    let s2 = g.from_rows([
        [f.neg(o), z, f.neg(kk)],
        [z, f.neg(w2i), f.neg(f.mul(kk, w2i))],
        [z, z, wi],
    ])?;
    let s3 = g.from_rows([[o, kk, z], [z, kk, o], [z, f.neg(o), z]])?;
    let s4 = g.from_ints([[0, 1, 0], [0, 0, 1], [1, 0, 0]])?;
    Ok(ChiralTuple::new(g, vec![s1, s2, s3, s4]))
}

fn dihedral(ctx: &mut Ctx) -> Result<Built> {
    let f = ctx.f().clone();
    let (o, z) = (Fe::ONE, Fe::ZERO);
    let (sigma, tau) = match ctx.family {
        Family::DihA => {
            ctx.require_even()?;
            let a = ctx.field_param("a", &ctx.p.a.clone(), None)?;
            if a.is_zero() || a == o {
                return ctx.fail("a must differ from 0 and 1");
            }
            (ctx.mi([[1, 1, 0], [0, 1, 0], [0, 0, 1]])?, ctx.m([[o, a, z], [z, o, z], [z, z, o]])?)
        }
        Family::DihB => {
            ctx.require_odd()?;
            (ctx.mi([[-1, 0, 0], [0, -1, 0], [0, 0, 1]])?, ctx.mi([[1, 0, 0], [0, -1, 0], [0, 0, -1]])?)
        }
        Family::Dih1 => {
            let default = f.format(f.primitive_element());
            let x = ctx.field_param("x", &ctx.p.x.clone(), Some(&default))?;
            if x.is_zero() || x == o || x == f.neg(o) {
                return ctx.fail("x must differ from 0 and ±1");
            }
            (ctx.m([[x, z, z], [z, o, z], [z, z, f.inv(x)?]])?, ctx.mi([[0, 0, 1], [0, -1, 0], [1, 0, 0]])?)
        }
        Family::Dih2 => (ctx.mi([[1, 1, 0], [0, 1, 1], [0, 0, 1]])?, ctx.mi([[-1, -1, 0], [0, 1, 0], [0, 0, -1]])?),
        Family::Dih3 => {
            ctx.require_odd()?;
            let s = ctx.p.sign.unwrap_or(1);
            if s != 1 && s != -1 {
                return ctx.fail("sign must be 1 or -1");
            }
            ctx.resolved.insert("sign".into(), s.to_string());
            (ctx.mi([[s, 1, 0], [0, s, 0], [0, 0, 1]])?, ctx.mi([[1, 0, 0], [0, -1, 0], [0, 0, -1]])?)
        }
        Family::Dih4 => {
            let x = match ctx.p.x.clone() {
                Some(s) => eval_param(&f, &s)?,
                None => match f.elements().find(|&x| is_irreducible_trace_poly(&f, x)) {
                    Some(x) => x,
                    None => return ctx.fail("no x with X^2 - xX + 1 irreducible"),
                },
            };
            if !is_irreducible_trace_poly(&f, x) {
                return ctx.fail("X^2 - xX + 1 must be irreducible");
            }
            ctx.record("x", x);
            (ctx.m([[o, z, z], [z, z, f.neg(o)], [z, o, x]])?, ctx.m([[f.neg(o), z, z], [z, o, x], [z, z, f.neg(o)]])?)
        }
        _ => unreachable!(),
    };
    let tuple = RegularTuple::new(vec![tau, ctx.g.mul(&tau, &sigma)]);
    let n = ctx.order(&sigma)?;
    let expect = Expectation {
        polytope: Some(true),
        schlafli: Some(vec![n]),
        group_order: Some(2 * n as u128),
        structure: Some(format!("D{}", 2 * n)),
        degenerate: Some(n == 2),
        ..Expectation::default()
    };
    Ok((Tuple::Regular(tuple), expect, Extras::default()))
}

fn is_irreducible_trace_poly(f: &Field, x: Fe) -> bool {
    // X^2 - xX + 1 has no root
    f.elements().all(|t| f.add(f.sub(f.mul(t, t), f.mul(x, t)), Fe::ONE) != Fe::ZERO)
}

/// Expected order of the dihedral group `⟨φ_1, ρ, φ_3⟩` with `φ_3` central:
/// twice the least even multiple of `ord(φ_1 ρ)`.
fn central_dihedral_order(ctx: &Ctx, phi1: &ProjMatrix, rho: &ProjMatrix) -> Result<u128> {
    let m = ctx.order(&ctx.g.mul(phi1, rho))? as u128;
    Ok(2 * if m % 2 == 0 { m } else { 2 * m })
}

fn rank3_odd(ctx: &mut Ctx) -> Result<Built> {
    ctx.require_odd()?;
    let f = ctx.f().clone();
    let p = f.p() as u128;
    let phi1 = ctx.mi([[-1, 0, 0], [0, 1, 0], [0, 0, 1]])?;
    let phi3 = ctx.mi([[1, 0, 0], [0, 1, 0], [0, 0, -1]])?;
    let mut expect = Expectation::default();
    let o = Fe::ONE;
    let a_matrix = |ctx: &mut Ctx, last: [i64; 3]| -> Result<ProjMatrix> {
        let a = ctx.field_param("a", &ctx.p.a.clone(), Some("2"))?;
        if a.is_zero() || a == o || a == f.neg(o) {
            return ctx.fail("a must differ from 0 and ±1");
        }
        let rows = [
            [a, f.sub(f.neg(a), o), Fe::ZERO],
            [f.sub(a, o), f.neg(a), Fe::ZERO],
            last.map(|v| f.from_int(v)),
        ];
        ctx.m(rows)
    };
    let rho2 = match ctx.family {
        Family::R3OddCase1 => {
            expect.polytope = Some(false);
            ctx.mi([[1, 0, 0], [0, -1, 0], [0, 0, -1]])?
        }
        Family::R3OddCase2 => {
            expect.group_order = Some(4 * p);
            expect.structure = Some(format!("D{}", 4 * p));
            ctx.mi([[1, 0, 0], [1, -1, 0], [0, 0, -1]])?
        }
        Family::R3OddCase2Dual => ctx.mi([[1, -2, 0], [0, -1, 0], [0, 0, -1]])?,
        Family::R3OddCase3 => {
            expect.group_order = Some(4 * p * p);
            expect.structure = Some(format!("D{}^2", 2 * p));
            ctx.mi([[1, 0, 0], [1, -1, 0], [1, 0, -1]])?
        }
        Family::R3OddCase4 => {
            expect.polytope = Some(false);
            expect.group_order = Some(8);
            expect.structure = Some("D8".into());
            ctx.mi([[0, -1, 0], [-1, 0, 0], [0, 0, -1]])?
        }
        Family::R3OddCase5 => {
            let rho2 = a_matrix(ctx, [0, 0, -1])?;
            let n = central_dihedral_order(ctx, &phi1, &rho2)?;
            expect.group_order = Some(n);
            expect.structure = Some(format!("D{n}"));
            expect.degenerate = Some(true);
            rho2
        }
        Family::R3OddCase6 => {
            expect.polytope = Some(true);
            expect.group_order = Some(4 * p * p * p);
            expect.structure = Some(format!("He{p}:C2^2"));
            ctx.mi([[1, -2, 0], [0, -1, 0], [1, -1, -1]])?
        }
        Family::R3OddCase7 => {
            expect.polytope = Some(true);
            expect.group_order = Some(8 * p * p);
            expect.structure = Some(format!("D{}wrC2", 2 * p));
            ctx.mi([[0, -1, 0], [-1, 0, 0], [1, -1, -1]])?
        }
        Family::R3OddCase8 => {
            let rho2 = a_matrix(ctx, [1, -1, -1])?;
            let a = eval_param(&f, ctx.resolved.get("a").expect("recorded"))?;
            let sub = generated_subfield(&f, &[a]).order() as u128;
            let dihedral = a_matrix(ctx, [0, 0, -1])?;
            let n = central_dihedral_order(ctx, &phi1, &dihedral)?;
            expect.group_order = Some(sub * sub * n);
            expect.structure = Some(format!("E{sub}^2:D{n}"));
            rho2
        }
        _ => unreachable!(),
    };
    let tuple = RegularTuple::new(vec![phi1, rho2, phi3]);
    Ok((Tuple::Regular(tuple), expect, Extras::default()))
}

/// `ρ_2` of the conic-preserving rank-3 family and its invariant form.
pub fn conic_rho2(g: &Pgl3, a: Fe, b: Fe) -> Result<(ProjMatrix, QuadraticForm)> {
    let f = g.field();
    let o = Fe::ONE;
    let (a1, ab, b1) = (f.add(a, o), f.add(a, b), f.add(b, o));
    if a1.is_zero() || ab.is_zero() || b1.is_zero() {
        return Err(CatalogueError::Precondition {
            family: Family::R3Conic,
            reason: "a+1, a+b and b+1 must be nonzero".into(),
        });
    }
    let rho2 = g.from_rows([
        [a, f.neg(a1), a1],
        [ab, f.neg(f.add(ab, o)), ab],
        [b1, f.neg(b1), b],
    ])?;
    let z = Fe::ZERO;
    let form = QuadraticForm([f.inv(a1)?, z, z, f.neg(f.inv(ab)?), z, f.inv(b1)?]);
    Ok((rho2, form))
}

fn rank3_conic(ctx: &mut Ctx) -> Result<Built> {
    ctx.require_odd()?;
    let a = ctx.field_param("a", &ctx.p.a.clone(), Some("-1/2"))?;
    let b = ctx.field_param("b", &ctx.p.b.clone(), Some("-1/2"))?;
    let (rho2, form) = conic_rho2(&ctx.g, a, b)?;
    let phi1 = ctx.mi([[-1, 0, 0], [0, 1, 0], [0, 0, 1]])?;
    let phi3 = ctx.mi([[1, 0, 0], [0, 1, 0], [0, 0, -1]])?;
    let f = ctx.f().clone();
    let half = f.neg(f.inv(f.from_int(2))?);
    let alt5 = |v: Fe| v != half && f.add(f.mul(f.from_int(4), f.mul(v, v)), f.sub(f.mul(f.from_int(2), v), Fe::ONE)).is_zero();
    let is_half = |v: Fe| v == half;
    let sym4 = (is_half(a) && is_half(b)) || (a.is_zero() && is_half(b)) || (is_half(a) && b.is_zero());
    let alt = (is_half(a) && alt5(b)) || (alt5(a) && is_half(b)) || (alt5(a) && alt5(b) && a != b);
    let mut expect = Expectation::default();
    if sym4 {
        expect = Expectation { polytope: Some(true), group_order: Some(24), structure: Some("Sym(4)".into()), ..expect };
    } else if alt {
        expect = Expectation { polytope: Some(true), group_order: Some(60), structure: Some("Alt(5)".into()), ..expect };
    }
    let extras = Extras { form: Some(form), ..Extras::default() };
    Ok((Tuple::Regular(RegularTuple::new(vec![phi1, rho2, phi3])), expect, extras))
}

fn rank4_odd(ctx: &mut Ctx) -> Result<Built> {
    ctx.require_odd()?;
    let f = ctx.f().clone();
    let (o, z) = (Fe::ONE, Fe::ZERO);
    let case = ctx.p.case.unwrap_or(1);
    ctx.resolved.insert("case".into(), case.to_string());
    let p = f.p() as u128;
    let mut expect = Expectation::default();
    let (a, b, c, ap, bp, cp) = match case {
        1 => {
            let a = ctx.field_param("a", &ctx.p.a.clone(), Some("-1/2"))?;
            let ap = ctx.field_param("a'", &ctx.p.a_prime.clone(), Some("-1/2"))?;
            for v in [a, ap] {
                if v.is_zero() || v == f.neg(o) || v == o {
                    return ctx.fail("a and a' must avoid 0 and ±1");
                }
            }
            let table = exceptional_rank4_expectation(&f, a, ap);
            if let Some((schlafli, order, name)) = table {
                expect = Expectation {
                    polytope: Some(true),
                    schlafli: Some(schlafli),
                    group_order: Some(order),
                    structure: Some(name),
                    degenerate: Some(false),
                    ..Expectation::default()
                };
            }
            (a, f.sub(f.neg(a), o), f.sub(a, o), ap, f.sub(f.neg(ap), o), f.sub(ap, o))
        }
        2 => {
            let ap = ctx.field_param("a'", &ctx.p.a_prime.clone(), Some("-1/2"))?;
            if ap.is_zero() || ap == f.neg(o) {
                return ctx.fail("a' must avoid 0 and -1");
            }
            if ap == o {
                expect = Expectation {
                    polytope: Some(true),
                    group_order: Some(4 * p * p * p),
                    structure: Some(format!("He{p}:C2^2")),
                    ..Expectation::default()
                };
            } else {
                expect.polytope = Some(false);
            }
            (o, z, o, ap, f.sub(f.neg(ap), o), f.sub(ap, o))
        }
        3 => (o, z, o, o, z, o),
        4 => {
            expect = Expectation {
                polytope: Some(true),
                schlafli: Some(vec![p as u64, 2 * p as u64, p as u64]),
                group_order: Some(4 * p * p * p),
                structure: Some(format!("He{p}:C2^2")),
                degenerate: Some(false),
                ..Expectation::default()
            };
            (o, z, o, o, o, z)
        }
        _ => return ctx.fail("case must be 1, 2, 3 or 4"),
    };
    let m1 = f.neg(o);
    let rho1 = ctx.mi([[1, 0, 0], [0, -1, 0], [0, 0, -1]])?;
    let rho2 = ctx.m([[a, b, z], [c, f.neg(a), z], [z, z, m1]])?;
    let rho3 = ctx.m([[m1, z, z], [z, f.neg(ap), cp], [z, bp, ap]])?;
    let rho4 = ctx.mi([[-1, 0, 0], [0, -1, 0], [0, 0, 1]])?;
    Ok((Tuple::Regular(RegularTuple::new(vec![rho1, rho2, rho3, rho4])), expect, Extras::default()))
}

/// The exceptional rank-4 cases: both `a` and `a'` give order 3 or 5 at the ends,
/// and the middle order is read off from `-aa' + a + a' + 1`.
fn exceptional_rank4_expectation(f: &Field, a: Fe, ap: Fe) -> Option<(Vec<u64>, u128, String)> {
    let end_order = |v: Fe| -> Option<u64> {
        let half = f.neg(f.inv(f.from_int(2)).ok()?);
        if v == half {
            return Some(3);
        }
        let quintic = f.sub(f.add(f.mul(f.from_int(4), f.mul(v, v)), f.mul(f.from_int(2), v)), Fe::ONE);
        quintic.is_zero().then_some(5)
    };
    let (k1, k3) = (end_order(a)?, end_order(ap)?);
    let p = f.p();
    if f.n() != 1 {
        return None;
    }
    match (k1, k3, p) {
        (3, 3, 5) => Some((vec![3, 3, 3], 120, "PGL(2,5)".into())),
        (3, 3, 11) => Some((vec![3, 5, 3], 660, "PSL(2,11)".into())),
        (5, 5, 19) if a == ap => Some((vec![5, 3, 5], 3420, "PSL(2,19)".into())),
        _ => None,
    }
}

fn rank3_even(ctx: &mut Ctx) -> Result<Built> {
    ctx.require_even()?;
    let f = ctx.f().clone();
    let (o, z) = (Fe::ONE, Fe::ZERO);
    let a = ctx.field_param("a", &ctx.p.a.clone(), Some("X"))?;
    let b = ctx.field_param("b", &ctx.p.b.clone(), Some("0"))?;
    let c = ctx.field_param("c", &ctx.p.c.clone(), Some("1"))?;
    if a.is_zero() {
        return ctx.fail("a must be nonzero");
    }
    let rho1 = ctx.m([[o, z, a], [z, o, z], [z, z, o]])?;
    let rho2 = ctx.mi([[1, 0, 0], [0, 1, 0], [1, 0, 1]])?;
    let rho3 = ctx.m([[o, z, b], [z, o, c], [z, z, o]])?;
    let mut expect = Expectation::default();
    if b.is_zero() || a == b {
        let sub = generated_subfield(&f, &[a, b]).order() as u128;
        let k = ctx.order(&ctx.g.mul(&rho1, &rho2))? as u128;
        expect.group_order = Some(2 * k * sub * sub);
        expect.structure = Some(format!("E{sub}^2:D{}", 2 * k));
    }
    Ok((Tuple::Regular(RegularTuple::new(vec![rho1, rho2, rho3])), expect, Extras::default()))
}

fn rank4_even(ctx: &mut Ctx) -> Result<Built> {
    ctx.require_even()?;
    let f = ctx.f().clone();
    let (o, z) = (Fe::ONE, Fe::ZERO);
    let a = ctx.field_param("a", &ctx.p.a.clone(), Some("X"))?;
    let b = ctx.field_param("b", &ctx.p.b.clone(), Some("X+1"))?;
    let ab = f.mul(a, b);
    let sub = generated_subfield(&f, &[ab]);
    if a.is_zero() || b.is_zero() || generated_subfield(&f, &[ab, a]) == sub {
        return ctx.fail("requires a, b nonzero with a outside F_2[ab]");
    }
    let rho1 = ctx.mi([[1, 0, 0], [0, 1, 1], [0, 0, 1]])?;
    let rho2 = ctx.m([[o, z, z], [z, o, z], [a, z, o]])?;
    let rho3 = ctx.m([[o, z, b], [z, o, z], [z, z, o]])?;
    let rho4 = ctx.mi([[1, 0, 0], [1, 1, 0], [0, 0, 1]])?;
    let k = ctx.order(&ctx.g.mul(&rho2, &rho3))?;
    let qp = sub.order() as u128;
    let expect = Expectation {
        polytope: Some(true),
        schlafli: Some(vec![4, k, 4]),
        group_order: Some(2 * k as u128 * qp.pow(4)),
        structure: Some(format!("E{qp}^4:D{}", 2 * k)),
        degenerate: Some(k == 2),
        ..Expectation::default()
    };
    Ok((Tuple::Regular(RegularTuple::new(vec![rho1, rho2, rho3, rho4])), expect, Extras::default()))
}

/// Unitriangular `[[1,x,y],[0,1,z],[0,0,1]]`.
fn unitriangular(ctx: &Ctx, x: Fe, y: Fe, z: Fe) -> Result<ProjMatrix> {
    let (o, n) = (Fe::ONE, Fe::ZERO);
    ctx.m([[o, x, y], [n, o, z], [n, n, o]])
}

fn even_triangular(ctx: &mut Ctx) -> Result<Built> {
    ctx.require_even()?;
    let f = ctx.f().clone();
    let (o, z) = (Fe::ONE, Fe::ZERO);
    let rank = ctx.p.rank.unwrap_or(3);
    let case = ctx.p.case.unwrap_or(1);
    ctx.resolved.insert("rank".into(), rank.to_string());
    let other = if f.n() > 1 { f.x() } else { o };
    let (rho, expect) = match (rank, case) {
        (1, _) => (
            vec![unitriangular(ctx, z, z, o)?],
            Expectation {
                polytope: Some(true),
                schlafli: Some(vec![]),
                group_order: Some(2),
                structure: Some("C2".into()),
                ..Expectation::default()
            },
        ),
        (2, _) => (
            vec![unitriangular(ctx, o, z, z)?, unitriangular(ctx, z, z, o)?],
            Expectation {
                polytope: Some(true),
                schlafli: Some(vec![4]),
                group_order: Some(8),
                structure: Some("D8".into()),
                ..Expectation::default()
            },
        ),
        (3, 1) => {
            if f.n() == 1 {
                return ctx.fail("the wreath product needs q >= 4");
            }
            ctx.resolved.insert("case".into(), "1".into());
            (
                vec![unitriangular(ctx, z, z, o)?, unitriangular(ctx, o, z, z)?, unitriangular(ctx, z, z, other)?],
                Expectation {
                    polytope: Some(true),
                    schlafli: Some(vec![4, 4]),
                    group_order: Some(32),
                    structure: Some("C2^2wrC2".into()),
                    ..Expectation::default()
                },
            )
        }
        (3, 2) => {
            if f.n() == 1 {
                return ctx.fail("the direct product needs q >= 4");
            }
            ctx.resolved.insert("case".into(), "2".into());
            (
                vec![unitriangular(ctx, z, z, o)?, unitriangular(ctx, o, z, z)?, unitriangular(ctx, z, other, o)?],
                Expectation {
                    polytope: Some(false),
                    group_order: Some(16),
                    structure: Some("C2xD8".into()),
                    ..Expectation::default()
                },
            )
        }
        _ => return ctx.fail("rank must be 1, 2 or 3 (case 1 or 2 at rank 3)"),
    };
    Ok((Tuple::Regular(RegularTuple::new(rho)), expect, Extras::default()))
}

fn rank6(ctx: &mut Ctx) -> Result<Built> {
    let even = ctx.family == Family::Rank6WitnessEven;
    let g = ctx.g.clone();
    let f = ctx.f().clone();
    let (o, z) = (Fe::ONE, Fe::ZERO);
    let elements = if even {
        ctx.require_even()?;
        let a = ctx.field_param("a", &ctx.p.a.clone(), Some(if f.n() > 1 { "X" } else { "1" }))?;
        let b = ctx.field_param("b", &ctx.p.b.clone(), Some("1"))?;
        let t12 = ctx.mi([[1, 0, 0], [0, 1, 1], [0, 0, 1]])?;
        let t13 = ctx.m([[o, z, z], [z, o, z], [a, z, o]])?;
        let t14 = ctx.m([[o, z, b], [z, o, z], [z, z, o]])?;
        let t15 = ctx.mi([[1, 0, 0], [1, 1, 0], [0, 0, 1]])?;
        let t45 = g.mul(&t13, &t15);
        let t35 = g.mul(&t12, &t15);
        vec![("tau12", t12), ("tau13", t13), ("tau14", t14), ("tau15", t15), ("tau45", t45), ("tau35", t35)]
    } else {
        ctx.require_odd()?;
        let a = ctx.field_param("a", &ctx.p.a.clone(), Some("1"))?;
        if a.is_zero() {
            return ctx.fail("a must be nonzero");
        }
        let t12 = ctx.mi([[1, 0, 0], [0, -1, 0], [0, 0, -1]])?;
        let t13 = ctx.mi([[1, 0, 0], [1, -1, 0], [0, 0, -1]])?;
        let t14 = ctx.mi([[-1, 0, 0], [0, -1, 0], [0, 1, 1]])?;
        let t15 = ctx.mi([[-1, 0, 0], [0, -1, 0], [0, 0, 1]])?;
        let m1 = f.neg(o);
        let t25 = ctx.m([[m1, z, f.mul(f.from_int(2), a)], [z, m1, a], [z, z, o]])?;
        let t45 = g.mul(&t13, &t15);
        let t35 = g.mul(&t12, &t15);
        let s1 = g.mul(&t15, &t25);
        let s5 = g.mul(&t14, &t15);
        vec![
            ("tau12", t12),
            ("tau13", t13),
            ("tau14", t14),
            ("tau15", t15),
            ("tau45", t45),
            ("tau35", t35),
            ("tau25", t25),
            ("sigma1", s1),
            ("sigma5", s5),
        ]
    };
    let w = Rank6Witness {
        elements: elements.into_iter().map(|(n, m)| (n.to_string(), m)).collect(),
        parity_even: even,
    };
    let extras = Extras { points: vec![("common".into(), [z, o, z])], ..Extras::default() };
    Ok((Tuple::Witness(w), Expectation::default(), extras))
}
