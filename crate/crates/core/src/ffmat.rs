//! Exact dense linear algebra over prime fields F_p.
//!
//! Everything downstream (Hom spaces, kernels, conflation tests) reduces to
//! the operations here: multiplication, Gaussian elimination, nullspaces,
//! and affine solving. All arithmetic is exact; residues are reduced
//! eagerly and pivoting is deterministic (first nonzero), so identical
//! inputs give bit-identical outputs on every run.
//!
//! Matrices with zero rows or zero columns are first-class citizens: empty
//! Hom components between zero spaces show up constantly and must compose.

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest admissible prime. Keeps single entries in `u32` and products in `u64`.
pub const PRIME_CEILING: u32 = 1 << 16;

/// Default cap on `p^d`-style element enumerations.
pub const DEFAULT_ENUMERATION_CEILING: u64 = 1 << 16;

/// A prime field order, validated at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Self> {
        if p > PRIME_CEILING {
            return Err(Error::PrimeTooLarge {
                value: p,
                ceiling: PRIME_CEILING,
            });
        }
        if p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p % d == 0) {
            return Err(Error::NotPrime { value: p });
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, x: u64) -> u32 {
        (x % u64::from(self.0)) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        self.reduce(u64::from(a) + u64::from(b))
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        self.reduce(u64::from(a) + u64::from(self.0) - u64::from(b))
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        self.reduce(u64::from(a) * u64::from(b))
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    /// Multiplicative inverse of a nonzero residue, by Fermat exponentiation.
    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.0 != 0, "zero has no inverse in F_{}", self.0);
        let mut base = u64::from(a % self.0);
        let mut exp = self.0 - 2;
        let m = u64::from(self.0);
        let mut acc: u64 = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            exp >>= 1;
        }
        acc as u32
    }
}

/// Dense row-major matrix over F_p. Entries are always reduced residues.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FpMatrix {
    p: Prime,
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

/// Solution set of a consistent affine system `A x = b`: one particular
/// solution plus a kernel basis spanning all others.
#[derive(Clone, Debug)]
pub struct SolutionSet {
    particular: FpMatrix,
    kernel: Vec<FpMatrix>,
}

impl FpMatrix {
    pub fn zero(p: Prime, rows: usize, cols: usize) -> Self {
        FpMatrix {
            p,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(p: Prime, n: usize) -> Self {
        let mut m = Self::zero(p, n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from row-major entries, reducing mod p.
    pub fn from_entries(
        p: Prime,
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = u64>,
    ) -> Result<Self> {
        let entries: Vec<u32> = entries.into_iter().map(|x| p.reduce(x)).collect();
        if entries.len() != rows * cols {
            return Err(Error::InvalidRep(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(FpMatrix {
            p,
            rows,
            cols,
            entries,
        })
    }

    /// Convenience constructor from explicit rows; `cols` disambiguates the
    /// width of a matrix with zero rows.
    pub fn from_rows(p: Prime, cols: usize, rows: &[Vec<u64>]) -> Result<Self> {
        for r in rows {
            if r.len() != cols {
                return Err(Error::InvalidRep(format!(
                    "ragged row: expected width {cols}, got {}",
                    r.len()
                )));
            }
        }
        Self::from_entries(p, rows.len(), cols, rows.iter().flatten().copied())
    }

    /// Assembles a matrix of shape `height x cols.len()` from column vectors.
    pub fn from_columns(p: Prime, height: usize, cols: &[FpMatrix]) -> Result<Self> {
        let mut m = Self::zero(p, height, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.p != p || c.rows != height || c.cols != 1 {
                return Err(Error::DimensionMismatch {
                    left_rows: height,
                    left_cols: 1,
                    right_rows: c.rows,
                    right_cols: c.cols,
                });
            }
            for i in 0..height {
                m.entries[i * cols.len() + j] = c.entries[i];
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn p(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        debug_assert!(i < self.rows && j < self.cols);
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        debug_assert!(i < self.rows && j < self.cols);
        self.entries[i * self.cols + j] = v % self.p.0;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (0..self.cols).all(|j| self.get(i, j) == u32::from(i == j)))
    }

    pub fn column(&self, j: usize) -> FpMatrix {
        let mut c = FpMatrix::zero(self.p, self.rows, 1);
        for i in 0..self.rows {
            c.entries[i] = self.get(i, j);
        }
        c
    }

    fn check_field(&self, rhs: &FpMatrix) -> Result<()> {
        if self.p != rhs.p {
            return Err(Error::FieldMismatch {
                left: self.p.0,
                right: rhs.p.0,
            });
        }
        Ok(())
    }

    /// Matrix product over F_p.
    pub fn mat_mul(&self, rhs: &FpMatrix) -> Result<FpMatrix> {
        self.check_field(rhs)?;
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rhs.rows,
                right_cols: rhs.cols,
            });
        }
        let m = u64::from(self.p.0);
        let mut out = FpMatrix::zero(self.p, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = u64::from(self.entries[i * self.cols + k]);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let cur = u64::from(out.entries[i * rhs.cols + j]);
                    let b = u64::from(rhs.entries[k * rhs.cols + j]);
                    out.entries[i * rhs.cols + j] = ((cur + a * b) % m) as u32;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &FpMatrix) -> Result<FpMatrix> {
        self.check_field(rhs)?;
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rhs.rows,
                right_cols: rhs.cols,
            });
        }
        let mut out = self.clone();
        for (a, &b) in out.entries.iter_mut().zip(&rhs.entries) {
            *a = self.p.add(*a, b);
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &FpMatrix) -> Result<FpMatrix> {
        self.add(&rhs.scale(self.p.neg(1)))
    }

    pub fn scale(&self, c: u32) -> FpMatrix {
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a = self.p.mul(*a, c);
        }
        out
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut out = FpMatrix::zero(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.get(i, j);
            }
        }
        out
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hstack(&self, rhs: &FpMatrix) -> Result<FpMatrix> {
        self.check_field(rhs)?;
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rhs.rows,
                right_cols: rhs.cols,
            });
        }
        let mut out = FpMatrix::zero(self.p, self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[i * out.cols + j] = self.get(i, j);
            }
            for j in 0..rhs.cols {
                out.entries[i * out.cols + self.cols + j] = rhs.get(i, j);
            }
        }
        Ok(out)
    }

    /// Vertical concatenation.
    pub fn vstack(&self, rhs: &FpMatrix) -> Result<FpMatrix> {
        self.check_field(rhs)?;
        if self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rhs.rows,
                right_cols: rhs.cols,
            });
        }
        let mut out = FpMatrix::zero(self.p, self.rows + rhs.rows, self.cols);
        out.entries[..self.entries.len()].copy_from_slice(&self.entries);
        out.entries[self.entries.len()..].copy_from_slice(&rhs.entries);
        Ok(out)
    }

    /// Block-diagonal sum `diag(self, rhs)`.
    pub fn block_diag(&self, rhs: &FpMatrix) -> Result<FpMatrix> {
        self.check_field(rhs)?;
        let mut out = FpMatrix::zero(self.p, self.rows + rhs.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[i * out.cols + j] = self.get(i, j);
            }
        }
        for i in 0..rhs.rows {
            for j in 0..rhs.cols {
                out.entries[(self.rows + i) * out.cols + self.cols + j] = rhs.get(i, j);
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form with the list of pivot columns.
    /// First-nonzero pivoting makes the result deterministic.
    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let mut m = self.clone();
        let p = m.p;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if pr != row {
                for j in 0..m.cols {
                    let a = m.get(row, j);
                    let b = m.get(pr, j);
                    m.set(row, j, b);
                    m.set(pr, j, a);
                }
            }
            let inv = p.inv(m.get(row, col));
            for j in 0..m.cols {
                let v = p.mul(m.get(row, j), inv);
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor == 0 {
                    continue;
                }
                for j in 0..m.cols {
                    let v = p.sub(m.get(r, j), p.mul(factor, m.get(row, j)));
                    m.set(r, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    /// Rank over F_p.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right nullspace, as column vectors. Size equals
    /// `cols - rank`. Free variables are set to 1 one at a time, in
    /// increasing column order.
    pub fn kernel_basis(&self) -> Vec<FpMatrix> {
        let (r, pivots) = self.rref();
        let p = self.p;
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = FpMatrix::zero(p, self.cols, 1);
            v.entries[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v.entries[pc] = p.neg(r.get(i, free));
            }
            basis.push(v);
        }
        basis
    }

    /// Two-sided inverse, or `None` when the matrix is singular.
    pub fn try_inverse(&self) -> Result<Option<FpMatrix>> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let aug = self.hstack(&FpMatrix::identity(self.p, self.rows))?;
        let (r, pivots) = aug.rref();
        if pivots.len() != self.rows || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return Ok(None);
        }
        let mut inv = FpMatrix::zero(self.p, self.rows, self.rows);
        for i in 0..self.rows {
            for j in 0..self.rows {
                inv.set(i, j, r.get(i, self.rows + j));
            }
        }
        Ok(Some(inv))
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Solves `A x = b` for a single column vector `b`. Returns `None` when
    /// the system is inconsistent; that is an answer, not an error.
    pub fn solve_affine(&self, b: &FpMatrix) -> Result<Option<SolutionSet>> {
        self.check_field(b)?;
        if b.cols != 1 || b.rows != self.rows {
            return Err(Error::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: b.rows,
                right_cols: b.cols,
            });
        }
        let aug = self.hstack(b)?;
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return Ok(None);
        }
        let mut x = FpMatrix::zero(self.p, self.cols, 1);
        for (i, &pc) in pivots.iter().enumerate() {
            x.entries[pc] = r.get(i, self.cols);
        }
        Ok(Some(SolutionSet {
            particular: x,
            kernel: self.kernel_basis(),
        }))
    }

    /// Solves `A X = B` columnwise, returning one particular `X`.
    pub fn solve_matrix(&self, b: &FpMatrix) -> Result<Option<FpMatrix>> {
        self.check_field(b)?;
        if b.rows != self.rows {
            return Err(Error::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: b.rows,
                right_cols: b.cols,
            });
        }
        let mut cols = Vec::with_capacity(b.cols);
        for j in 0..b.cols {
            match self.solve_affine(&b.column(j))? {
                Some(s) => cols.push(s.particular),
                None => return Ok(None),
            }
        }
        Ok(Some(FpMatrix::from_columns(self.p, self.cols, &cols)?))
    }

    /// Basis of the column space: the pivot columns, kept in order. The
    /// result has independent columns spanning the image.
    pub fn image_basis(&self) -> FpMatrix {
        let (_, pivots) = self.rref();
        let cols: Vec<FpMatrix> = pivots.iter().map(|&j| self.column(j)).collect();
        FpMatrix::from_columns(self.p, self.rows, &cols).expect("columns share the height")
    }

    /// Coordinate indices of a complement of the column space: the non-pivot
    /// coordinates after row-reducing the transpose. Standard basis vectors
    /// at these indices complete the columns to a basis of F_p^rows.
    pub fn complement_coords(&self) -> Vec<usize> {
        let (_, pivots) = self.transpose().rref();
        let mut is_pivot = vec![false; self.rows];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        (0..self.rows).filter(|&i| !is_pivot[i]).collect()
    }

    /// For a matrix `B` with independent columns, returns the projection
    /// `q: F^rows -> F^(rows - cols)` whose kernel is exactly the column
    /// space of `B`: the trailing rows of `[B | E]^-1` where `E` holds
    /// standard basis vectors at the complement coordinates.
    pub fn quotient_map(&self) -> FpMatrix {
        let comp = self.complement_coords();
        assert_eq!(
            comp.len() + self.cols,
            self.rows,
            "quotient_map requires independent columns"
        );
        let mut full = FpMatrix::zero(self.p, self.rows, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                full.set(i, j, self.get(i, j));
            }
        }
        for (j, &c) in comp.iter().enumerate() {
            full.set(c, self.cols + j, 1);
        }
        let inv = full
            .try_inverse()
            .expect("square by construction")
            .expect("columns of [B | E] form a basis");
        let mut q = FpMatrix::zero(self.p, comp.len(), self.rows);
        for i in 0..comp.len() {
            for j in 0..self.rows {
                q.set(i, j, inv.get(self.cols + i, j));
            }
        }
        q
    }

    /// Basis (as columns of one matrix) of `{x : A x in colspace(img)}`.
    /// `img` must have independent columns spanning a subspace of F^rows.
    pub fn preimage_basis(&self, img: &FpMatrix) -> FpMatrix {
        assert_eq!(self.rows, img.rows, "ambient spaces must agree");
        let q = img.quotient_map();
        let comp = q.mat_mul(self).expect("shapes agree by construction");
        let cols = comp.kernel_basis();
        FpMatrix::from_columns(self.p, self.cols, &cols).expect("kernel vectors share the shape")
    }
}

impl SolutionSet {
    pub fn particular(&self) -> &FpMatrix {
        &self.particular
    }

    pub fn kernel(&self) -> &[FpMatrix] {
        &self.kernel
    }

    /// Number of solutions, `p^(kernel dimension)`.
    pub fn count(&self) -> u128 {
        u128::from(self.particular.p.get()).pow(self.kernel.len() as u32)
    }

    /// Enumerates every solution in deterministic base-p counting order.
    pub fn iter(&self) -> impl Iterator<Item = FpMatrix> + '_ {
        let p = self.particular.p;
        let k = self.kernel.len();
        let total = self.count();
        (0..total).map(move |idx| {
            let mut x = self.particular.clone();
            let mut rem = idx;
            for v in 0..k {
                let c = (rem % u128::from(p.get())) as u32;
                rem /= u128::from(p.get());
                if c != 0 {
                    x = x
                        .add(&self.kernel[v].scale(c))
                        .expect("kernel vectors share the shape");
                }
            }
            x
        })
    }
}

impl Serialize for FpMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            let row: Vec<u32> = (0..self.cols).map(|j| self.get(i, j)).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}
