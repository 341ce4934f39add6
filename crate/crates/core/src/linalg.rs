//! Dense exact linear algebra over `F_p`: matrices, Gaussian elimination,
//! kernels, and echelonized subspaces.
//!
//! Dimensions here are tiny (representation degrees, at most a few dozen),
//! so everything is straightforward O(n³) elimination with `u64` residues.

use crate::ffpoly::{addm, invm, mulm, negm, subm, Poly};

/// Row-major matrix over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    pub p: u64,
    pub rows: usize,
    pub cols: usize,
    data: Vec<u64>,
}

impl Mat {
    pub fn zero(p: u64, rows: usize, cols: usize) -> Mat {
        Mat { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u64, n: usize) -> Mat {
        let mut m = Mat::zero(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// 1×1 matrix (degree-1 representations).
    pub fn scalar(p: u64, a: u64) -> Mat {
        let mut m = Mat::zero(p, 1, 1);
        m.set(0, 0, a % p);
        m
    }

    pub fn from_rows(p: u64, rows: &[Vec<u64>]) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Mat::zero(p, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v % p);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (0..self.cols).all(|j| self.get(i, j) == u64::from(i == j)))
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.p, other.p);
        let p = self.p;
        let mut out = Mat::zero(p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = addm(out.get(i, j), mulm(a, other.get(k, j), p), p);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, v.len());
        let p = self.p;
        (0..self.rows)
            .map(|i| {
                let mut acc = 0u64;
                for (j, &x) in v.iter().enumerate() {
                    acc = addm(acc, mulm(self.get(i, j), x, p), p);
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, &b) in out.data.iter_mut().zip(&other.data) {
            *a = addm(*a, b, self.p);
        }
        out
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, &b) in out.data.iter_mut().zip(&other.data) {
            *a = subm(*a, b, self.p);
        }
        out
    }

    pub fn scale(&self, c: u64) -> Mat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = mulm(*a, c, self.p);
        }
        out
    }

    /// `self − λ·I`.
    pub fn sub_scalar_identity(&self, lambda: u64) -> Mat {
        assert_eq!(self.rows, self.cols);
        let mut out = self.clone();
        for i in 0..self.rows {
            out.set(i, i, subm(out.get(i, i), lambda, self.p));
        }
        out
    }

    pub fn pow(&self, mut exp: u64) -> Mat {
        assert_eq!(self.rows, self.cols);
        let mut acc = Mat::identity(self.p, self.rows);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }

    /// Evaluate a polynomial at this matrix (Horner).
    pub fn eval_poly(&self, f: &Poly) -> Mat {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.p, f.p);
        let n = self.rows;
        let mut acc = Mat::zero(self.p, n, n);
        for &c in f.coeffs.iter().rev() {
            acc = acc.mul(self);
            for i in 0..n {
                acc.set(i, i, addm(acc.get(i, i), c, self.p));
            }
        }
        acc
    }

    pub fn det(&self) -> u64 {
        assert_eq!(self.rows, self.cols);
        let p = self.p;
        let n = self.rows;
        let mut m = self.clone();
        let mut det = 1u64;
        for col in 0..n {
            let pivot = (col..n).find(|&i| m.get(i, col) != 0);
            let Some(pivot) = pivot else { return 0 };
            if pivot != col {
                for j in 0..n {
                    let (a, b) = (m.get(col, j), m.get(pivot, j));
                    m.set(col, j, b);
                    m.set(pivot, j, a);
                }
                det = negm(det, p);
            }
            let lead = m.get(col, col);
            det = mulm(det, lead, p);
            let inv = invm(lead, p);
            for i in col + 1..n {
                let factor = mulm(m.get(i, col), inv, p);
                if factor == 0 {
                    continue;
                }
                for j in col..n {
                    let v = subm(m.get(i, j), mulm(factor, m.get(col, j), p), p);
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Mat> {
        assert_eq!(self.rows, self.cols);
        let p = self.p;
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = Mat::identity(p, n);
        for col in 0..n {
            let pivot = (col..n).find(|&i| m.get(i, col) != 0)?;
            if pivot != col {
                for j in 0..n {
                    let (a, b) = (m.get(col, j), m.get(pivot, j));
                    m.set(col, j, b);
                    m.set(pivot, j, a);
                    let (a, b) = (inv.get(col, j), inv.get(pivot, j));
                    inv.set(col, j, b);
                    inv.set(pivot, j, a);
                }
            }
            let lead_inv = invm(m.get(col, col), p);
            for j in 0..n {
                m.set(col, j, mulm(m.get(col, j), lead_inv, p));
                inv.set(col, j, mulm(inv.get(col, j), lead_inv, p));
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let factor = m.get(i, col);
                if factor == 0 {
                    continue;
                }
                for j in 0..n {
                    let v = subm(m.get(i, j), mulm(factor, m.get(col, j), p), p);
                    m.set(i, j, v);
                    let v = subm(inv.get(i, j), mulm(factor, inv.get(col, j), p), p);
                    inv.set(i, j, v);
                }
            }
        }
        Some(inv)
    }

    pub fn rank(&self) -> usize {
        let mut space = Subspace::new(self.p, self.cols);
        for i in 0..self.rows {
            space.insert(self.row(i).to_vec());
        }
        space.dim()
    }

    /// Basis of the right null space `{x : Mx = 0}`.
    pub fn kernel_basis(&self) -> Vec<Vec<u64>> {
        let p = self.p;
        let (rows, cols) = (self.rows, self.cols);
        let mut m = self.clone();
        // Forward + back elimination to RREF, tracking pivot columns.
        let mut pivots: Vec<usize> = Vec::new();
        let mut rank = 0usize;
        for col in 0..cols {
            let pivot = (rank..rows).find(|&i| m.get(i, col) != 0);
            let Some(pivot) = pivot else { continue };
            if pivot != rank {
                for j in 0..cols {
                    let (a, b) = (m.get(rank, j), m.get(pivot, j));
                    m.set(rank, j, b);
                    m.set(pivot, j, a);
                }
            }
            let inv = invm(m.get(rank, col), p);
            for j in 0..cols {
                m.set(rank, j, mulm(m.get(rank, j), inv, p));
            }
            for i in 0..rows {
                if i == rank {
                    continue;
                }
                let factor = m.get(i, col);
                if factor == 0 {
                    continue;
                }
                for j in 0..cols {
                    let v = subm(m.get(i, j), mulm(factor, m.get(rank, j), p), p);
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == rows {
                break;
            }
        }
        let pivot_set: Vec<bool> = {
            let mut s = vec![false; cols];
            for &c in &pivots {
                s[c] = true;
            }
            s
        };
        let mut basis = Vec::new();
        for free in 0..cols {
            if pivot_set[free] {
                continue;
            }
            let mut v = vec![0u64; cols];
            v[free] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = negm(m.get(row, free), p);
            }
            basis.push(v);
        }
        basis
    }

    /// Block-diagonal assembly of square blocks.
    pub fn block_diag(p: u64, blocks: &[&Mat]) -> Mat {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut out = Mat::zero(p, n, n);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.rows, b.cols);
            assert_eq!(b.p, p);
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(off + i, off + j, b.get(i, j));
                }
            }
            off += b.rows;
        }
        out
    }
}

/// A subspace of `F_p^n` kept in reduced row-echelon form, supporting
/// membership, growth, and coordinate extraction.
#[derive(Debug, Clone)]
pub struct Subspace {
    pub p: u64,
    pub ambient: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn new(p: u64, ambient: usize) -> Subspace {
        Subspace { p, ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(p: u64, ambient: usize) -> Subspace {
        let mut s = Subspace::new(p, ambient);
        for i in 0..ambient {
            let mut v = vec![0; ambient];
            v[i] = 1;
            s.insert(v);
        }
        s
    }

    pub fn from_vectors(p: u64, ambient: usize, vectors: &[Vec<u64>]) -> Subspace {
        let mut s = Subspace::new(p, ambient);
        for v in vectors {
            s.insert(v.clone());
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Residual of `v` after eliminating all pivot coordinates; zero iff
    /// `v` lies in the subspace.
    pub fn reduce(&self, mut v: Vec<u64>) -> Vec<u64> {
        let p = self.p;
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = v[pc];
            if c == 0 {
                continue;
            }
            for (x, &y) in v.iter_mut().zip(row) {
                *x = subm(*x, mulm(c, y, p), p);
            }
        }
        v
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v.to_vec()).iter().all(|&c| c == 0)
    }

    /// Insert a vector; returns true iff the dimension grew.
    pub fn insert(&mut self, v: Vec<u64>) -> bool {
        assert_eq!(v.len(), self.ambient);
        let p = self.p;
        let v = self.reduce(v);
        let Some(pivot) = v.iter().position(|&c| c != 0) else {
            return false;
        };
        let inv = invm(v[pivot], p);
        let v: Vec<u64> = v.iter().map(|&c| mulm(c, inv, p)).collect();
        // Back-eliminate the new pivot from existing rows to stay in RREF.
        for row in self.rows.iter_mut() {
            let c = row[pivot];
            if c == 0 {
                continue;
            }
            for (x, &y) in row.iter_mut().zip(&v) {
                *x = subm(*x, mulm(c, y, p), p);
            }
        }
        let at = self.pivots.partition_point(|&pc| pc < pivot);
        self.rows.insert(at, v);
        self.pivots.insert(at, pivot);
        true
    }

    /// Coordinates of `v` in the stored RREF basis; `None` if `v` is outside.
    pub fn coordinates(&self, v: &[u64]) -> Option<Vec<u64>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&pc| v[pc]).collect())
    }

    /// Rebuild the vector with the given coordinates.
    pub fn from_coordinates(&self, coords: &[u64]) -> Vec<u64> {
        assert_eq!(coords.len(), self.dim());
        let p = self.p;
        let mut v = vec![0u64; self.ambient];
        for (c, row) in coords.iter().zip(&self.rows) {
            for (x, &y) in v.iter_mut().zip(row) {
                *x = addm(*x, mulm(*c, y, p), p);
            }
        }
        v
    }

    /// Smallest subspace containing `seed` and closed under all `gens`.
    pub fn spin(p: u64, ambient: usize, gens: &[&Mat], seed: &[u64]) -> Subspace {
        let mut space = Subspace::new(p, ambient);
        let mut worklist = vec![seed.to_vec()];
        space.insert(seed.to_vec());
        while let Some(v) = worklist.pop() {
            for g in gens {
                let w = g.matvec(&v);
                if space.insert(w.clone()) {
                    worklist.push(w);
                }
            }
        }
        space
    }

    /// True iff every generator maps the subspace into itself.
    pub fn is_invariant(&self, gens: &[&Mat]) -> bool {
        self.rows
            .iter()
            .all(|v| gens.iter().all(|g| self.contains(&g.matvec(v))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let m = Mat::from_rows(7, &[vec![1, 2, 0], vec![0, 1, 4], vec![5, 0, 1]]);
        let inv = m.inverse().expect("invertible");
        assert!(m.mul(&inv).is_identity());
        assert!(inv.mul(&m).is_identity());
    }

    #[test]
    fn singular_has_no_inverse_and_zero_det() {
        let m = Mat::from_rows(5, &[vec![1, 2], vec![2, 4]]);
        assert!(m.inverse().is_none());
        assert_eq!(m.det(), 0);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernel_annihilates() {
        let m = Mat::from_rows(3, &[vec![1, 2, 0, 1], vec![0, 0, 1, 2]]);
        let basis = m.kernel_basis();
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!(m.matvec(v).iter().all(|&c| c == 0));
        }
        let space = Subspace::from_vectors(3, 4, &basis);
        assert_eq!(space.dim(), 2);
    }

    #[test]
    fn subspace_coordinates_roundtrip() {
        let mut s = Subspace::new(5, 4);
        s.insert(vec![1, 2, 3, 4]);
        s.insert(vec![0, 1, 1, 0]);
        for v in [vec![1, 2, 3, 4], vec![1, 3, 4, 4], vec![0, 2, 2, 0]] {
            let coords = s.coordinates(&v).expect("inside");
            assert_eq!(s.from_coordinates(&coords), v);
        }
        assert!(s.coordinates(&[1, 0, 0, 0]).is_none());
    }

    #[test]
    fn spin_reaches_invariant_closure() {
        // Rotation permutation matrix on F_3^3: spinning e0 fills the space.
        let rot = Mat::from_rows(3, &[vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]]);
        let space = Subspace::spin(3, 3, &[&rot], &[1, 0, 0]);
        assert_eq!(space.dim(), 3);
        assert!(space.is_invariant(&[&rot]));
    }

    #[test]
    fn eval_poly_matches_manual() {
        use crate::ffpoly::Poly;
        let m = Mat::from_rows(5, &[vec![1, 1], vec![0, 2]]);
        // f(M) = M² + 3M + 2I
        let f = Poly::new(5, vec![2, 3, 1]);
        let manual = m.mul(&m).add(&m.scale(3)).add(&Mat::identity(5, 2).scale(2));
        assert_eq!(m.eval_poly(&f), manual);
    }
}
