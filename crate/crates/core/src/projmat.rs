//! PGL(3,q) acting on the projective plane PG(2,q).
//!
//! A [`ProjMatrix`] is a 3x3 invertible matrix scaled so that its first
//! nonzero entry (row-major) is 1, which makes equality in PGL plain
//! array equality. All arithmetic goes through a [`Pgl3`] context that
//! owns the field.

use std::fmt;

use serde_json::Value;
use thiserror::Error;

use crate::gf::{Fe, Field, FieldError};
use crate::linalg;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProjError {
    #[error("matrix is singular")]
    Singular,
    #[error("zero vector is not a projective point")]
    ZeroVector,
    #[error("element is not an involution")]
    NotInvolution,
    #[error("element order exceeds {0}; arithmetic is inconsistent")]
    OrderCap(u64),
    #[error("quadratic form is degenerate")]
    DegenerateForm,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Canonical representative of an element of PGL(3,q), entries row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjMatrix(pub [Fe; 9]);

impl ProjMatrix {
    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Fe {
        self.0[3 * r + c]
    }

    pub fn rows(&self) -> [[Fe; 3]; 3] {
        let e = &self.0;
        [[e[0], e[1], e[2]], [e[3], e[4], e[5]], [e[6], e[7], e[8]]]
    }
}

/// Normalized homogeneous coordinates of a point of PG(2,q).
pub type Point = [Fe; 3];
/// Normalized coordinates `(a,b,c)` of the line `aX + bY + cZ = 0`.
pub type Line = [Fe; 3];

/// A ternary quadratic form `sum c_ij x_i x_j` over `i <= j`, stored as
/// `[c11, c12, c13, c22, c23, c33]`. This covers both characteristics:
/// for odd q a symmetric Gram matrix `A` corresponds to `c_ii = A_ii`,
/// `c_ij = 2 A_ij`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadraticForm(pub [Fe; 6]);

const PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

impl QuadraticForm {
    pub fn from_gram(f: &Field, a: [[Fe; 3]; 3]) -> QuadraticForm {
        let two = f.from_int(2);
        QuadraticForm(PAIRS.map(|(i, j)| if i == j { a[i][i] } else { f.mul(two, a[i][j]) }))
    }

    pub fn eval(&self, f: &Field, v: [Fe; 3]) -> Fe {
        PAIRS.iter().zip(self.0).fold(Fe::ZERO, |acc, (&(i, j), c)| {
            f.add(acc, f.mul(c, f.mul(v[i], v[j])))
        })
    }

    /// Coefficients of `v -> Q(M v)`, recovered by polarization.
    pub fn compose(&self, f: &Field, m: &ProjMatrix) -> QuadraticForm {
        let col = |j: usize| [m.at(0, j), m.at(1, j), m.at(2, j)];
        let diag = [0, 1, 2].map(|j| self.eval(f, col(j)));
        QuadraticForm(PAIRS.map(|(i, j)| {
            if i == j {
                diag[i]
            } else {
                let (ci, cj) = (col(i), col(j));
                let s = [f.add(ci[0], cj[0]), f.add(ci[1], cj[1]), f.add(ci[2], cj[2])];
                f.sub(f.sub(self.eval(f, s), diag[i]), diag[j])
            }
        }))
    }

    pub fn is_degenerate(&self, f: &Field) -> bool {
        let [c11, c12, c13, c22, c23, c33] = self.0;
        if f.p() == 2 {
            // the polar form is alternating; its radical is spanned by (c23, c13, c12)
            let r = [c23, c13, c12];
            r.iter().all(|x| x.is_zero()) || self.eval(f, r).is_zero()
        } else {
            let half = f.inv(f.from_int(2)).expect("odd characteristic");
            let (a12, a13, a23) = (f.mul(half, c12), f.mul(half, c13), f.mul(half, c23));
            det3(f, &[c11, a12, a13, a12, c22, a23, a13, a23, c33]).is_zero()
        }
    }
}

fn det3(f: &Field, e: &[Fe; 9]) -> Fe {
    let minor = |a: usize, b: usize, c: usize, d: usize| f.sub(f.mul(e[a], e[b]), f.mul(e[c], e[d]));
    let t0 = f.mul(e[0], minor(4, 8, 5, 7));
    let t1 = f.mul(e[1], minor(3, 8, 5, 6));
    let t2 = f.mul(e[2], minor(3, 7, 4, 6));
    f.add(f.sub(t0, t1), t2)
}

fn adjugate(f: &Field, e: &[Fe; 9]) -> [Fe; 9] {
    let m = |a: usize, b: usize, c: usize, d: usize| f.sub(f.mul(e[a], e[b]), f.mul(e[c], e[d]));
    [
        m(4, 8, 5, 7),
        m(2, 7, 1, 8),
        m(1, 5, 2, 4),
        m(5, 6, 3, 8),
        m(0, 8, 2, 6),
        m(2, 3, 0, 5),
        m(3, 7, 4, 6),
        m(1, 6, 0, 7),
        m(0, 4, 1, 3),
    ]
}

/// The group PGL(3,q) over a fixed field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pgl3 {
    field: Field,
}

impl Pgl3 {
    pub fn new(field: Field) -> Pgl3 {
        Pgl3 { field }
    }

    #[inline]
    pub fn field(&self) -> &Field {
        &self.field
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.field.q()
    }

    /// Scales a raw matrix to canonical form.
    pub fn canonicalize(&self, raw: [Fe; 9]) -> Result<ProjMatrix, ProjError> {
        if det3(&self.field, &raw).is_zero() {
            return Err(ProjError::Singular);
        }
        Ok(self.scale_canonical(raw))
    }

    #[inline]
    fn scale_canonical(&self, mut raw: [Fe; 9]) -> ProjMatrix {
        let lead = *raw.iter().find(|e| !e.is_zero()).expect("nonzero matrix");
        if lead != Fe::ONE {
            let s = self.field.inv(lead).expect("nonzero");
            for e in raw.iter_mut() {
                *e = self.field.mul(*e, s);
            }
        }
        ProjMatrix(raw)
    }

    pub fn from_rows(&self, rows: [[Fe; 3]; 3]) -> Result<ProjMatrix, ProjError> {
        let [a, b, c] = rows;
        self.canonicalize([a[0], a[1], a[2], b[0], b[1], b[2], c[0], c[1], c[2]])
    }

    pub fn from_ints(&self, rows: [[i64; 3]; 3]) -> Result<ProjMatrix, ProjError> {
        self.from_rows(rows.map(|r| r.map(|v| self.field.from_int(v))))
    }

    pub fn identity(&self) -> ProjMatrix {
        let (o, z) = (Fe::ONE, Fe::ZERO);
        ProjMatrix([o, z, z, z, o, z, z, z, o])
    }

    pub fn diag(&self, d: [Fe; 3]) -> Result<ProjMatrix, ProjError> {
        let z = Fe::ZERO;
        self.canonicalize([d[0], z, z, z, d[1], z, z, z, d[2]])
    }

    /// Raw product of two entry arrays (no rescaling).
    #[inline]
    pub fn mul_raw(&self, a: &[Fe; 9], b: &[Fe; 9]) -> [Fe; 9] {
        let f = &self.field;
        let mut out = [Fe::ZERO; 9];
        for r in 0..3 {
            let row = [a[3 * r], a[3 * r + 1], a[3 * r + 2]];
            for c in 0..3 {
                out[3 * r + c] = f.dot3(row, [b[c], b[3 + c], b[6 + c]]);
            }
        }
        out
    }

    #[inline]
    pub fn mul(&self, a: &ProjMatrix, b: &ProjMatrix) -> ProjMatrix {
        self.scale_canonical(self.mul_raw(&a.0, &b.0))
    }

    /// Product of a sequence, left to right.
    pub fn product<'a>(&self, ms: impl IntoIterator<Item = &'a ProjMatrix>) -> ProjMatrix {
        ms.into_iter().fold(self.identity(), |acc, m| self.mul(&acc, m))
    }

    #[inline]
    pub fn inverse(&self, m: &ProjMatrix) -> ProjMatrix {
        self.scale_canonical(adjugate(&self.field, &m.0))
    }

    /// Determinant of the canonical representative.
    pub fn det(&self, m: &ProjMatrix) -> Fe {
        det3(&self.field, &m.0)
    }

    /// Some scalar multiple has determinant 1 iff the determinant is a cube.
    pub fn in_psl(&self, m: &ProjMatrix) -> bool {
        self.field.is_cube(self.det(m)).expect("invertible")
    }

    pub fn is_identity(&self, m: &ProjMatrix) -> bool {
        *m == self.identity()
    }

    /// Upper bound on element orders in PGL(3,q).
    pub fn order_cap(&self) -> u64 {
        let q = self.q() as u64;
        q * q + q + 1
    }

    pub fn order(&self, m: &ProjMatrix) -> Result<u64, ProjError> {
        let id = self.identity();
        let mut cur = *m;
        for k in 1..=self.order_cap() {
            if cur == id {
                return Ok(k);
            }
            cur = self.mul(&cur, m);
        }
        Err(ProjError::OrderCap(self.order_cap()))
    }

    pub fn pow(&self, m: &ProjMatrix, e: i64) -> ProjMatrix {
        let base = if e < 0 { self.inverse(m) } else { *m };
        let mut e = e.unsigned_abs();
        let (mut acc, mut b) = (self.identity(), base);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    pub fn transpose(&self, m: &ProjMatrix) -> ProjMatrix {
        let e = m.0;
        self.scale_canonical([e[0], e[3], e[6], e[1], e[4], e[7], e[2], e[5], e[8]])
    }

    /// Inverse-transpose, the duality automorphism.
    pub fn dual(&self, m: &ProjMatrix) -> ProjMatrix {
        self.transpose(&self.inverse(m))
    }

    /// Entry-wise `x -> x^(p^k)`.
    pub fn frobenius_map(&self, m: &ProjMatrix, k: u32) -> ProjMatrix {
        self.scale_canonical(m.0.map(|e| self.field.frobenius(e, k)))
    }

    /// `g m g^-1`.
    pub fn conjugate(&self, m: &ProjMatrix, g: &ProjMatrix) -> ProjMatrix {
        self.mul(&self.mul(g, m), &self.inverse(g))
    }

    pub fn commute(&self, a: &ProjMatrix, b: &ProjMatrix) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    // --- the plane ---

    pub fn num_points(&self) -> u32 {
        let q = self.q();
        q * q + q + 1
    }

    /// Scales a nonzero triple so its first nonzero coordinate is 1.
    pub fn normalize(&self, v: [Fe; 3]) -> Result<Point, ProjError> {
        let lead = *v.iter().find(|e| !e.is_zero()).ok_or(ProjError::ZeroVector)?;
        let s = self.field.inv(lead)?;
        Ok(v.map(|e| self.field.mul(e, s)))
    }

    pub fn point(&self, v: [i64; 3]) -> Result<Point, ProjError> {
        self.normalize(v.map(|x| self.field.from_int(x)))
    }

    /// Position in the point list: `(0,0,1)`, then `(0,1,b)`, then `(1,a,b)`,
    /// each block ordered by the element encodings.
    #[inline]
    pub fn point_index(&self, p: &Point) -> u32 {
        let q = self.q();
        if !p[0].is_zero() {
            1 + q + p[1].index() * q + p[2].index()
        } else if !p[1].is_zero() {
            1 + p[2].index()
        } else {
            0
        }
    }

    #[inline]
    pub fn point_at(&self, idx: u32) -> Point {
        let q = self.q();
        let fe = |v: u32| self.field.elem(v).expect("in range");
        if idx == 0 {
            [Fe::ZERO, Fe::ZERO, Fe::ONE]
        } else if idx <= q {
            [Fe::ZERO, Fe::ONE, fe(idx - 1)]
        } else {
            let r = idx - 1 - q;
            [Fe::ONE, fe(r / q), fe(r % q)]
        }
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.num_points()).map(|i| self.point_at(i))
    }

    #[inline]
    fn apply_raw(&self, m: &ProjMatrix, p: &[Fe; 3]) -> [Fe; 3] {
        let f = &self.field;
        let e = &m.0;
        [
            f.dot3([e[0], e[1], e[2]], *p),
            f.dot3([e[3], e[4], e[5]], *p),
            f.dot3([e[6], e[7], e[8]], *p),
        ]
    }

    /// Image of `P` under `M P`.
    pub fn apply_point(&self, m: &ProjMatrix, p: &Point) -> Point {
        self.normalize(self.apply_raw(m, p)).expect("invertible matrix")
    }

    /// Image of `L` under `M^-T L`, so that incidence is preserved.
    pub fn apply_line(&self, m: &ProjMatrix, l: &Line) -> Line {
        self.apply_point(&self.dual(m), l)
    }

    #[inline]
    pub fn image_index(&self, m: &ProjMatrix, idx: u32) -> u32 {
        let v = self.apply_raw(m, &self.point_at(idx));
        let p = self.normalize(v).expect("invertible matrix");
        self.point_index(&p)
    }

    pub fn incident(&self, p: &Point, l: &Line) -> bool {
        self.field.dot3(*p, *l).is_zero()
    }

    /// Point permutation induced by `m`.
    pub fn permutation(&self, m: &ProjMatrix) -> Vec<u32> {
        (0..self.num_points()).map(|i| self.image_index(m, i)).collect()
    }

    fn shifted(&self, m: &ProjMatrix, lambda: Fe) -> Vec<Vec<Fe>> {
        let f = &self.field;
        (0..3)
            .map(|r| {
                (0..3)
                    .map(|c| if r == c { f.sub(m.at(r, c), lambda) } else { m.at(r, c) })
                    .collect()
            })
            .collect()
    }

    /// All points `P` with `M P = lambda P` for some scalar, in point-list order.
    pub fn fixed_points(&self, m: &ProjMatrix) -> Vec<Point> {
        let mut out = Vec::new();
        for lambda in self.field.nonzero() {
            let basis = linalg::nullspace(&self.field, &self.shifted(m, lambda), 3);
            linalg::for_each_projective_combination(&self.field, &basis, |v| {
                out.push(self.normalize([v[0], v[1], v[2]]).expect("nonzero"));
                false
            });
        }
        out.sort_by_key(|p| self.point_index(p));
        out
    }

    pub fn fixed_lines(&self, m: &ProjMatrix) -> Vec<Line> {
        self.fixed_points(&self.dual(m))
    }

    /// Center and axis of an involution: the unique `lambda` with
    /// `M - lambda I = c r^T` of rank one gives center `c` and axis `r`.
    pub fn center_axis(&self, m: &ProjMatrix) -> Result<(Point, Line), ProjError> {
        if self.order(m)? != 2 {
            return Err(ProjError::NotInvolution);
        }
        for lambda in self.field.nonzero() {
            let s = self.shifted(m, lambda);
            if linalg::rank(&self.field, &s) != 1 {
                continue;
            }
            let row = s.iter().find(|r| r.iter().any(|e| !e.is_zero())).expect("rank one");
            let c = (0..3).find(|&c| s.iter().any(|r| !r[c].is_zero())).expect("rank one");
            let axis = self.normalize([row[0], row[1], row[2]])?;
            let center = self.normalize([s[0][c], s[1][c], s[2][c]])?;
            return Ok((center, axis));
        }
        Err(ProjError::NotInvolution)
    }

    /// Whether `Q(M v) = lambda Q(v)` for some nonzero scalar.
    pub fn preserves_form(&self, m: &ProjMatrix, form: &QuadraticForm) -> Result<bool, ProjError> {
        let f = &self.field;
        if form.is_degenerate(f) {
            return Err(ProjError::DegenerateForm);
        }
        let image = form.compose(f, m);
        let k = form.0.iter().position(|c| !c.is_zero()).expect("nondegenerate");
        let lambda = f.div(image.0[k], form.0[k])?;
        Ok(!lambda.is_zero() && image.0.iter().zip(form.0).all(|(&a, b)| a == f.mul(lambda, b)))
    }

    // --- the group as a whole ---

    /// Elementary transvections `I + t E_ij` with `t` running over an
    /// additive basis of the field; they generate SL(3,q), hence PSL(3,q).
    pub fn psl_generators(&self) -> Vec<ProjMatrix> {
        let f = &self.field;
        let basis: Vec<Fe> = (0..f.n()).map(|k| f.elem(f.p().pow(k)).expect("in range")).collect();
        let mut out = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                for &t in &basis {
                    let mut e = self.identity().0;
                    e[3 * i + j] = t;
                    out.push(ProjMatrix(e));
                }
            }
        }
        out
    }

    pub fn pgl_order(&self) -> u128 {
        let q = self.q() as u128;
        q.pow(3) * (q.pow(3) - 1) * (q * q - 1)
    }

    pub fn psl_order(&self) -> u128 {
        let q = self.q() as u128;
        self.pgl_order() / crate::gf::gcd(3, (q - 1) as u64) as u128
    }

    // --- presentation ---

    pub fn to_json(&self, m: &ProjMatrix) -> Value {
        Value::Array(
            m.rows()
                .iter()
                .map(|r| Value::Array(r.iter().map(|&e| self.field.to_json(e)).collect()))
                .collect(),
        )
    }

    pub fn vec_json(&self, v: &[Fe; 3]) -> Value {
        Value::Array(v.iter().map(|&e| self.field.to_json(e)).collect())
    }

    pub fn format(&self, m: &ProjMatrix) -> String {
        let rows: Vec<String> = m.rows().iter().map(|r| self.format_vec(r)).collect();
        format!("[{}]", rows.join(","))
    }

    pub fn format_vec(&self, v: &[Fe; 3]) -> String {
        let parts: Vec<String> = v.iter().map(|&e| self.field.format(e)).collect();
        format!("({})", parts.join(","))
    }

    pub fn display<'a>(&'a self, m: &'a ProjMatrix) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Pgl3, &'a ProjMatrix);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.format(self.1))
            }
        }
        D(self, m)
    }
}
