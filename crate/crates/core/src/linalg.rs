//! Exact integer matrix algebra.
//!
//! Everything here works over arbitrary-precision integers: coefficient
//! growth during a reduction can never overflow. The central routine is
//! [`smith_normal_form`], which returns the diagonal form together with the
//! unimodular transforms that certify it.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod modular;

/// Square matrices at least this large try the multi-modular Smith form first.
const MODULAR_THRESHOLD: usize = 16;

/// Dense integer matrix stored in row-major order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn diagonal(rows: usize, cols: usize, diag: &[i64]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, &d) in diag.iter().enumerate().take(rows.min(cols)) {
            m.entries[i * cols + i] = BigInt::from(d);
        }
        m
    }

    /// Builds a matrix from small-integer rows. `cols` is only consulted when
    /// `rows` is empty, so a `0 x n` matrix can still be expressed.
    pub fn from_rows_with_cols(rows: &[Vec<i64>], cols: usize) -> Result<Self> {
        let cols = rows.first().map_or(cols, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            entries.extend(row.iter().map(|&x| BigInt::from(x)));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    /// Convenience constructor for non-empty literal matrices.
    ///
    /// Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows_with_cols(rows, 0).expect("ragged matrix literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Row lists with every entry narrowed to `i64`.
    pub fn to_i64_rows(&self) -> Result<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| x.to_i64().ok_or_else(|| Error::Overflow(x.to_string())))
                    .collect()
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(l, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Exact determinant: multi-modular for large matrices with word-size
    /// entries, fraction-free (Bareiss) elimination otherwise.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        if n >= MODULAR_THRESHOLD {
            if let Some(small) = modular::small_entries(self) {
                return Ok(modular::determinant(&small, n));
            }
        }
        let mut m = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = v / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        Ok(sign * &m[n - 1][n - 1])
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{}x{}[", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::Error as _;
        self.to_i64_rows().map_err(S::Error::custom)?.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rows = Vec::<Vec<i64>>::deserialize(d)?;
        IntMatrix::from_rows_with_cols(&rows, 0).map_err(D::Error::custom)
    }
}

/// Unimodular diagonalisation `U * A * V = D` of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub rank: usize,
}

impl SmithForm {
    /// The nonzero diagonal entries `d_1 | d_2 | ... | d_rank`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d.get(i, i).clone()).collect()
    }

    /// Checks every defining property against the source matrix.
    pub fn certifies(&self, a: &IntMatrix) -> bool {
        let Ok(uav) = self.u.mul(a).and_then(|ua| ua.mul(&self.v)) else {
            return false;
        };
        if uav != self.d {
            return false;
        }
        if a.is_square() && self.rank == a.rows {
            // det U * det A * det V = prod d_i, so |det A| = prod d_i forces
            // both transforms to be unimodular.
            let prod: BigInt = self.invariant_factors().iter().product();
            if a.determinant().map(|d| d.abs()) != Ok(prod) {
                return false;
            }
        } else {
            let unimodular = |m: &IntMatrix| m.determinant().is_ok_and(|det| det.abs().is_one());
            if !unimodular(&self.u) || !unimodular(&self.v) {
                return false;
            }
        }
        for i in 0..self.d.rows() {
            for j in 0..self.d.cols() {
                let x = self.d.get(i, j);
                let on_chain = i == j && i < self.rank;
                if on_chain != !x.is_zero() {
                    return false;
                }
            }
        }
        let factors = self.invariant_factors();
        factors.iter().all(Signed::is_positive) && factors.windows(2).all(|w| w[1].is_multiple_of(&w[0]))
    }
}

/// Working state of the reduction: the matrix being diagonalised plus the
/// accumulated row transform `U` and column transform `V`.
///
/// Column operations are carried out as row operations on the transposes,
/// so `v` holds `V^T` while `transposed` is set.
struct Reduction {
    d: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
    transposed: bool,
}

fn identity_rows(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

fn transpose_rows(m: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    (0..cols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// `target -= factor * source`, skipping zero entries of `source`.
fn axpy(target: &mut [BigInt], source: &[BigInt], factor: &BigInt) {
    for (t, s) in target.iter_mut().zip(source) {
        if !s.is_zero() {
            *t -= factor * s;
        }
    }
}

/// Two distinct rows, the first immutably and the second mutably.
fn pair_mut(m: &mut [Vec<BigInt>], a: usize, b: usize) -> (&[BigInt], &mut [BigInt]) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = m.split_at_mut(b);
        (&lo[a], &mut hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(a);
        (&hi[0], &mut lo[b])
    }
}

fn both_mut(m: &mut [Vec<BigInt>], a: usize, b: usize) -> (&mut [BigInt], &mut [BigInt]) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = m.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(a);
        (&mut hi[0], &mut lo[b])
    }
}

/// Applies the unimodular 2x2 matrix `[[s, t], [-b/g, a/g]]` to rows `p`, `r`.
fn gcd_rows(m: &mut [Vec<BigInt>], p: usize, r: usize, e: &GcdStep) {
    let (rp, rr) = both_mut(m, p, r);
    for (x, y) in rp.iter_mut().zip(rr.iter_mut()) {
        if x.is_zero() && y.is_zero() {
            continue;
        }
        let nx = &e.s * &*x + &e.t * &*y;
        let ny = &e.a_g * &*y - &e.b_g * &*x;
        *x = nx;
        *y = ny;
    }
}

struct GcdStep {
    s: BigInt,
    t: BigInt,
    a_g: BigInt,
    b_g: BigInt,
}

impl GcdStep {
    fn new(a: &BigInt, b: &BigInt) -> Self {
        let e = a.extended_gcd(b);
        GcdStep {
            s: e.x,
            t: e.y,
            a_g: a / &e.gcd,
            b_g: b / &e.gcd,
        }
    }
}

impl Reduction {
    /// The side transform that row operations on `d` must be mirrored into.
    fn side(&mut self) -> &mut Vec<Vec<BigInt>> {
        if self.transposed {
            &mut self.v
        } else {
            &mut self.u
        }
    }

    fn sub_row(&mut self, r: usize, p: usize, q: &BigInt) {
        let (src, dst) = pair_mut(&mut self.d, p, r);
        axpy(dst, src, q);
        let side = self.side();
        let (src, dst) = pair_mut(side, p, r);
        axpy(dst, src, q);
    }

    fn gcd_step(&mut self, p: usize, r: usize, step: &GcdStep) {
        gcd_rows(&mut self.d, p, r, step);
        gcd_rows(self.side(), p, r, step);
    }

    fn permute_rows(&mut self, order: &[usize]) {
        let take = |m: &mut Vec<Vec<BigInt>>| {
            let mut old: Vec<Option<Vec<BigInt>>> = std::mem::take(m).into_iter().map(Some).collect();
            *m = order
                .iter()
                .map(|&i| old[i].take().expect("permutation"))
                .collect();
        };
        take(&mut self.d);
        take(self.side());
    }

    fn flip(&mut self) {
        let cols = self.d.first().map_or(0, Vec::len);
        self.d = transpose_rows(&self.d, cols);
        self.transposed = !self.transposed;
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.d[i].iter_mut() {
            *x = -std::mem::take(x);
        }
        for x in self.side()[i].iter_mut() {
            *x = -std::mem::take(x);
        }
    }

    /// Hermite-reduces the pivot rows: every entry above a pivot is brought
    /// into `[0, pivot)`. Rows are visited left to right so a reduction
    /// never disturbs a column that was already reduced.
    fn reduce_pivot_rows(&mut self, pivots: &[(usize, usize)]) {
        for (ki, &(_, k)) in pivots.iter().enumerate() {
            for &(c, p) in &pivots[ki + 1..] {
                let x = &self.d[k][c];
                if x.is_zero() {
                    continue;
                }
                let piv = &self.d[p][c];
                if x.is_negative() || x >= piv {
                    let q = x.div_floor(piv);
                    self.sub_row(k, p, &q);
                }
            }
        }
    }

    /// Row echelon form by inserting rows one at a time into the Hermite
    /// form of the rows already seen. Each insertion divides exactly by an
    /// existing pivot or performs a unimodular gcd step against it, and the
    /// pivot rows are re-reduced afterwards, which keeps both the matrix and
    /// the transform at the size of the relevant minors.
    ///
    /// Returns the pivot columns; rows are reordered so pivot `i` sits in
    /// row `i` and zero rows come last.
    fn echelon(&mut self) -> Vec<usize> {
        let rows = self.d.len();
        // (pivot column, row index), sorted by column
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        for r in 0..rows {
            while let Some(lead) = self.d[r].iter().position(|x| !x.is_zero()) {
                match pivots.binary_search_by_key(&lead, |&(c, _)| c) {
                    Ok(k) => {
                        let p = pivots[k].1;
                        let (a, b) = (&self.d[p][lead], &self.d[r][lead]);
                        if b.is_multiple_of(a) {
                            let q = b / a;
                            self.sub_row(r, p, &q);
                        } else {
                            let step = GcdStep::new(a, b);
                            self.gcd_step(p, r, &step);
                        }
                    }
                    Err(k) => {
                        if self.d[r][lead].is_negative() {
                            self.negate_row(r);
                        }
                        pivots.insert(k, (lead, r));
                        break;
                    }
                }
            }
            self.reduce_pivot_rows(&pivots);
        }
        let mut order: Vec<usize> = pivots.iter().map(|&(_, r)| r).collect();
        let zero_rows: Vec<usize> = (0..rows).filter(|r| !order.contains(r)).collect();
        order.extend(zero_rows);
        self.permute_rows(&order);
        pivots.iter().map(|&(c, _)| c).collect()
    }

    /// True when every row and every column holds at most one nonzero entry.
    fn is_monomial(&self) -> bool {
        let cols = self.d.first().map_or(0, Vec::len);
        let mut col_used = vec![false; cols];
        for row in &self.d {
            let mut seen = false;
            for (j, x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                if seen || col_used[j] {
                    return false;
                }
                seen = true;
                col_used[j] = true;
            }
        }
        true
    }

    fn sub_col(&mut self, j: usize, t: usize, q: &BigInt) {
        debug_assert!(!self.transposed);
        for row in self.d.iter_mut() {
            if !row[t].is_zero() {
                let delta = q * &row[t];
                row[j] -= delta;
            }
        }
        let (src, dst) = pair_mut(&mut self.v, t, j);
        axpy(dst, src, q);
    }

    /// Replaces `diag(a, b)` at positions `i < j` by `diag(gcd, lcm)`.
    fn gcd_lcm_step(&mut self, i: usize, j: usize) {
        let a = self.d[i][i].clone();
        let b = self.d[j][j].clone();
        let step = GcdStep::new(&a, &b);
        // col_i += col_j
        self.sub_col(i, j, &BigInt::from(-1));
        // rows (i, j) <- [[s, t], [-b/g, a/g]] * rows (i, j)
        self.gcd_step(i, j, &step);
        // col_j -= (t*b/g) * col_i
        let q = &step.t * &step.b_g;
        self.sub_col(j, i, &q);
    }
}

/// Smith normal form with certificate.
///
/// Rows and columns are brought to echelon form alternately (a
/// Kannan-Bachem style iteration) until the matrix is diagonal up to
/// permutation; the diagonal is then rearranged into a divisor chain.
/// Diagonal entries come out positive and the result is deterministic.
///
/// Large nonsingular square matrices with few nontrivial invariant factors,
/// which includes almost every random square matrix, take a multi-modular
/// shortcut that confines coefficient growth to a small block.
pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    if a.rows >= MODULAR_THRESHOLD {
        if let Some(s) = modular::block_smith_form(a) {
            return s;
        }
    }
    eliminate(a)
}

fn eliminate(a: &IntMatrix) -> SmithForm {
    let (rows, cols) = (a.rows, a.cols);
    let mut red = Reduction {
        d: a.to_rows(),
        u: identity_rows(rows),
        // kept as V^T while working on the transposed matrix
        v: identity_rows(cols),
        transposed: false,
    };
    if rows > 0 && cols > 0 {
        loop {
            red.echelon();
            if red.is_monomial() {
                break;
            }
            red.flip();
        }
        if red.transposed {
            red.flip();
        }
    }

    // Gather the nonzero entries onto the leading diagonal.
    let mut hits: Vec<(usize, usize)> = Vec::new();
    for (i, row) in red.d.iter().enumerate() {
        if let Some(j) = row.iter().position(|x| !x.is_zero()) {
            hits.push((i, j));
        }
    }
    hits.sort_by_key(|&(_, j)| j);
    let rank = hits.len();
    let mut row_order: Vec<usize> = hits.iter().map(|&(i, _)| i).collect();
    row_order.extend((0..rows).filter(|r| !hits.iter().any(|&(i, _)| i == *r)));
    red.permute_rows(&row_order);
    let mut col_order: Vec<usize> = hits.iter().map(|&(_, j)| j).collect();
    col_order.extend((0..cols).filter(|c| !hits.iter().any(|&(_, j)| j == *c)));
    red.d = red
        .d
        .iter()
        .map(|row| col_order.iter().map(|&j| row[j].clone()).collect())
        .collect();
    red.v = col_order.iter().map(|&j| red.v[j].clone()).collect();
    for i in 0..rank {
        if red.d[i][i].is_negative() {
            for x in red.d[i].iter_mut().chain(red.u[i].iter_mut()) {
                *x = -std::mem::take(x);
            }
        }
    }
    for i in 0..rank {
        for j in i + 1..rank {
            if !red.d[j][j].is_multiple_of(&red.d[i][i]) {
                red.gcd_lcm_step(i, j);
            }
        }
    }
    let v = transpose_rows(&red.v, cols);
    let flatten = |m: Vec<Vec<BigInt>>, r: usize, c: usize| IntMatrix {
        rows: r,
        cols: c,
        entries: m.into_iter().flatten().collect(),
    };
    SmithForm {
        u: flatten(red.u, rows, rows),
        d: flatten(red.d, rows, cols),
        v: flatten(v, cols, cols),
        rank,
    }
}

/// Dense matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn from_int(m: &IntMatrix) -> Self {
        RationalMatrix {
            rows: m.rows,
            cols: m.cols,
            entries: m.entries.iter().cloned().map(BigRational::from_integer).collect(),
        }
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = vec![BigRational::zero(); self.rows * other.cols];
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    entries[i * other.cols + j] += a * other.get(l, j);
                }
            }
        }
        Ok(RationalMatrix {
            rows: self.rows,
            cols: other.cols,
            entries,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    /// `x^T * self * y`
    pub fn bilinear(&self, x: &[BigInt], y: &[BigInt]) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() {
                    acc += self.get(i, j) * BigRational::from_integer(xi * yj);
                }
            }
        }
        acc
    }
}

/// Exact inverse by Gauss-Jordan elimination over the rationals.
pub fn rational_inverse(l: &IntMatrix) -> Result<RationalMatrix> {
    if !l.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "inverse of a {}x{} matrix",
            l.rows, l.cols
        )));
    }
    let n = l.rows;
    let mut a: Vec<Vec<BigRational>> = l
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(BigRational::from_integer).collect())
        .collect();
    let mut inv: Vec<Vec<BigRational>> = identity_rows(n)
        .into_iter()
        .map(|r| r.into_iter().map(BigRational::from_integer).collect())
        .collect();
    for c in 0..n {
        let p = (c..n)
            .find(|&r| !a[r][c].is_zero())
            .ok_or(Error::SingularMatrix)?;
        a.swap(c, p);
        inv.swap(c, p);
        let pivot = a[c][c].clone();
        for x in a[c].iter_mut().chain(inv[c].iter_mut()) {
            *x /= &pivot;
        }
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for j in 0..n {
                let da = &f * &a[c][j];
                a[r][j] -= da;
                let di = &f * &inv[c][j];
                inv[r][j] -= di;
            }
        }
    }
    Ok(RationalMatrix {
        rows: n,
        cols: n,
        entries: inv.into_iter().flatten().collect(),
    })
}

/// Number of solutions of `A x = 0` over `Z_k`, read off the Smith diagonal:
/// `k^(cols - rank) * prod gcd(d_i, k)`.
pub fn kernel_count_mod_k(a: &IntMatrix, k: u64) -> BigUint {
    let snf = smith_normal_form(a);
    kernel_count_from_factors(a.cols, &snf.invariant_factors(), k)
}

pub(crate) fn kernel_count_from_factors(cols: usize, factors: &[BigInt], k: u64) -> BigUint {
    let kk = BigInt::from(k);
    let free = BigUint::from(k).pow((cols - factors.len()) as u32);
    factors.iter().fold(free, |acc, d| {
        acc * d.gcd(&kk).to_biguint().expect("gcd is non-negative")
    })
}
