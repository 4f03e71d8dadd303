//! Exact integer linear algebra and the affine-relaxation solver for the
//! tractable side of the clique dichotomy.
//!
//! The solver writes one equation `Σ_{v∈e} x_v = k − 1` per hyperedge, solves
//! it over ℤ through the Smith normal form and rounds `x_v ≥ 1` to colour 1.
//! An edge sum of `k − 1 ≥ 1` forces some coordinate to be positive, and not
//! all of them can be, so every rounded edge is non-constant.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mmsnp::{classify, Verdict};
use crate::structure::{FiniteRelation, Relation};

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|r| self.row(r).iter().map(ToString::to_string).collect::<Vec<_>>())).finish()
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of equal length. `cols` fixes the width when
    /// there are no rows.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::LengthMismatch { expected: cols, found: row.len() });
            }
            data.extend(row.iter().cloned().map(Into::into));
        }
        Ok(IntMatrix { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::LengthMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * other.get(k, j);
                    out.data[i * other.cols + j] += prod;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows).map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    /// Determinant by fraction-free elimination. Non-square matrices are an
    /// error.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::param(format!("determinant of a {}x{} matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        Ok(if n == 0 { sign } else { sign * a.get(n - 1, n - 1) })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// `row[dst] += factor · row[src]`
    fn add_row(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for c in 0..self.cols {
            let delta = factor * self.get(src, c);
            self.data[dst * self.cols + c] += delta;
        }
    }

    /// `col[dst] += factor · col[src]`
    fn add_col(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for r in 0..self.rows {
            let delta = factor * self.get(r, src);
            self.data[r * self.cols + dst] += delta;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self.get(r, c);
            self.set(r, c, v);
        }
    }
}

/// `U·M·V = D` with `U`, `V` unimodular and `D` diagonal with a divisibility
/// chain of nonnegative invariant factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub d: IntMatrix,
    pub rank: usize,
}

impl SnfDecomposition {
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d.get(i, i).clone()).collect()
    }
}

fn smallest_nonzero(d: &IntMatrix, from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for r in from..d.rows {
        for c in from..d.cols {
            let x = d.get(r, c);
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(br, bc)| x.abs() < d.get(br, bc).abs()) {
                best = Some((r, c));
            }
        }
    }
    best
}

/// Smith normal form. The pivot is the smallest nonzero absolute value in the
/// remaining block, ties going to the first in row-major order.
pub fn smith_normal_form(m: &IntMatrix) -> SnfDecomposition {
    let mut d = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let mut t = 0;
    while t < m.rows.min(m.cols) {
        let Some((pr, pc)) = smallest_nonzero(&d, t) else { break };
        d.swap_rows(t, pr);
        u.swap_rows(t, pr);
        d.swap_cols(t, pc);
        v.swap_cols(t, pc);

        let mut dirty = false;
        let pivot = d.get(t, t).clone();
        for r in t + 1..d.rows {
            let q = d.get(r, t) / &pivot;
            if !q.is_zero() {
                d.add_row(r, t, &-&q);
                u.add_row(r, t, &-&q);
            }
            dirty |= !d.get(r, t).is_zero();
        }
        for c in t + 1..d.cols {
            let q = d.get(t, c) / &pivot;
            if !q.is_zero() {
                d.add_col(c, t, &-&q);
                v.add_col(c, t, &-&q);
            }
            dirty |= !d.get(t, c).is_zero();
        }
        if dirty {
            // A smaller remainder now sits in row or column t.
            continue;
        }
        if let Some(r) = (t + 1..d.rows).find(|&r| (t + 1..d.cols).any(|c| !d.get(r, c).is_multiple_of(&pivot))) {
            d.add_row(t, r, &BigInt::one());
            u.add_row(t, r, &BigInt::one());
            continue;
        }
        if pivot.is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    SnfDecomposition { u, v, d, rank: t }
}

/// Some integer solution of `A·x = b`, or `None` when there is none.
pub fn solve_integer_linear(a: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if b.len() != a.rows {
        return Err(Error::LengthMismatch { expected: a.rows, found: b.len() });
    }
    let snf = smith_normal_form(a);
    let ub = snf.u.mul_vec(b)?;
    let mut y = vec![BigInt::zero(); a.cols];
    for (i, rhs) in ub.iter().enumerate() {
        if i < snf.rank {
            let (q, r) = rhs.div_rem(snf.d.get(i, i));
            if !r.is_zero() {
                return Ok(None);
            }
            y[i] = q;
        } else if !rhs.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(snf.v.mul_vec(&y)?))
}

/// Coordinate-wise `x ≥ 1 ↦ 1`, otherwise `0`.
pub fn aip_round(x: &[BigInt]) -> Vec<usize> {
    x.iter().map(|v| usize::from(*v >= BigInt::one())).collect()
}

/// A uniform hypergraph on variables `0..variables`. Edges are ordered
/// tuples; a repeated variable counts with multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawHypergraph")]
pub struct Hypergraph {
    variables: usize,
    arity: usize,
    edges: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct RawHypergraph {
    variables: usize,
    arity: usize,
    edges: Vec<Vec<usize>>,
}

impl TryFrom<RawHypergraph> for Hypergraph {
    type Error = Error;

    fn try_from(raw: RawHypergraph) -> Result<Self> {
        Hypergraph::new(raw.variables, raw.arity, raw.edges)
    }
}

impl Hypergraph {
    pub fn new(variables: usize, arity: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        for e in &edges {
            if e.len() != arity {
                return Err(Error::LengthMismatch { expected: arity, found: e.len() });
            }
            if let Some(&v) = e.iter().find(|&&v| v >= variables) {
                return Err(Error::structure(format!("edge variable {v} outside 0..{variables}")));
            }
        }
        Ok(Hypergraph { variables, arity, edges })
    }

    /// One edge per tuple of a relation over `0..variables`.
    pub fn from_relation(variables: usize, rel: &Relation) -> Result<Self> {
        Hypergraph::new(variables, rel.arity, rel.tuples.clone())
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }
}

/// True iff every edge's colour tuple lies in `target`.
pub fn verify_colouring(h: &Hypergraph, colouring: &[usize], target: &FiniteRelation) -> bool {
    if colouring.len() != h.variables || h.arity != target.arity() && !h.edges.is_empty() {
        return false;
    }
    let mut buf = Vec::with_capacity(h.arity);
    h.edges.iter().all(|e| {
        buf.clear();
        buf.extend(e.iter().map(|&v| colouring[v]));
        target.contains(&buf)
    })
}

/// Finds a `d`-colouring with no monochromatic edge for an instance promised
/// to admit a colouring in which every colour of `[c]` appears fewer than `k`
/// times per edge. Fails with [`Error::PromiseViolation`] when the relaxation
/// shows the promise does not hold.
pub fn solve_tractable_pcsp(h: &Hypergraph, c: usize, d: usize, k: usize, l: usize) -> Result<Vec<usize>> {
    if h.arity != l {
        return Err(Error::param(format!("instance arity {} differs from ℓ = {l}", h.arity)));
    }
    let verdict = classify(c, d, k, l)?;
    if verdict.verdict != Verdict::TractableAip {
        return Err(Error::NotTractable(format!("(c,d,k,ℓ) = ({c},{d},{k},{l}) is classified {:?}", verdict.verdict)));
    }
    if l > c * (k - 1) || d == 1 {
        if h.edges.is_empty() {
            return Ok(vec![0; h.variables]);
        }
        return Err(Error::PromiseViolation(format!(
            "the promise relation is empty for (c,k,ℓ) = ({c},{k},{l}) but the instance has edges"
        )));
    }
    let mut a = IntMatrix::zeros(h.edges.len(), h.variables);
    for (r, e) in h.edges.iter().enumerate() {
        for &v in e {
            let cur = a.get(r, v) + 1;
            a.set(r, v, cur);
        }
    }
    let b = vec![BigInt::from(k - 1); h.edges.len()];
    let x = solve_integer_linear(&a, &b)?
        .ok_or_else(|| Error::PromiseViolation("the edge equations have no integer solution".into()))?;
    let colouring = aip_round(&x);
    debug_assert!(verify_colouring(h, &colouring, &crate::structure::nae(d, l)));
    Ok(colouring)
}
