//! Dense linear algebra over the coefficient rings, in particular exact
//! solving over chain rings Z/p^M and their unramified extensions.
//!
//! Over a chain ring, Gaussian elimination must pivot on an entry of
//! minimal valuation in the whole remaining submatrix, swapping columns as
//! needed. Left-to-right pivoting is genuinely wrong here: 2x + y = 1 over
//! Z/4 is solvable, but eliminating on the 2 first loses the solution.
//! With full valuation pivoting the pivot valuations are nondecreasing and
//! every other entry in a pivot row has valuation at least the pivot's, so
//! back-substitution solvability at each row is independent of the choices
//! made below it.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::ring::{LocalRing, Ring};

#[derive(Debug, Clone, PartialEq)]
pub struct Mat<R: Ring> {
    ring: R,
    rows: usize,
    cols: usize,
    data: Vec<R::Elt>,
}

impl<R: Ring> Mat<R> {
    pub fn zero(ring: R, rows: usize, cols: usize) -> Self {
        let data = vec![ring.zero(); rows * cols];
        Mat { ring, rows, cols, data }
    }

    pub fn identity(ring: R, n: usize) -> Self {
        let mut m = Self::zero(ring, n, n);
        for i in 0..n {
            let one = m.ring.one();
            m.set(i, i, one);
        }
        m
    }

    pub fn from_fn(ring: R, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R::Elt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { ring, rows, cols, data }
    }

    pub fn from_rows(ring: R, rows: Vec<Vec<R::Elt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row);
        }
        Mat { ring, rows: r, cols: c, data }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &R::Elt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R::Elt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let ring = self.ring.clone();
        Mat::from_fn(ring.clone(), self.rows, other.cols, |i, j| {
            let mut acc = ring.zero();
            for k in 0..self.cols {
                let t = ring.mul(self.at(i, k), other.at(k, j));
                acc = ring.add(&acc, &t);
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[R::Elt]) -> Vec<R::Elt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = self.ring.zero();
                for k in 0..self.cols {
                    let t = self.ring.mul(self.at(i, k), &v[k]);
                    acc = self.ring.add(&acc, &t);
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let ring = self.ring.clone();
        Mat::from_fn(ring.clone(), self.rows, self.cols, |i, j| {
            ring.add(self.at(i, j), other.at(i, j))
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let ring = self.ring.clone();
        Mat::from_fn(ring.clone(), self.rows, self.cols, |i, j| {
            ring.sub(self.at(i, j), other.at(i, j))
        })
    }

    pub fn scale(&self, c: &R::Elt) -> Self {
        let ring = self.ring.clone();
        Mat::from_fn(ring.clone(), self.rows, self.cols, |i, j| ring.mul(self.at(i, j), c))
    }

    pub fn map_ring<S: Ring>(&self, target: &S, f: impl Fn(&R::Elt) -> S::Elt) -> Mat<S> {
        Mat {
            ring: target.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(&f).collect(),
        }
    }
}

/// Full solution set of A x = b over a chain ring: `particular` plus the
/// span of `kernel`. `max_pivot_valuation` measures how much precision the
/// elimination consumed; callers watching for precision exhaustion compare
/// it against their slack.
#[derive(Debug, Clone)]
pub struct LinearSolution<R: LocalRing> {
    pub particular: Vec<R::Elt>,
    pub kernel: Vec<Vec<R::Elt>>,
    pub pivot_valuations: Vec<u32>,
    pub max_pivot_valuation: u32,
}

struct Eliminated<R: LocalRing> {
    ring: R,
    /// Row echelon with pivot (s, s) = p^(v_s), after row scaling; columns
    /// physically permuted.
    mat: Mat<R>,
    rhs: Vec<R::Elt>,
    pivots: Vec<u32>,
    /// perm[j] = original index of the column now at position j.
    perm: Vec<usize>,
}

fn eliminate<R: LocalRing>(a: &Mat<R>, b: &[R::Elt]) -> Eliminated<R> {
    let ring = a.ring().clone();
    let mut mat = a.clone();
    let mut rhs = b.to_vec();
    let rows = mat.rows();
    let cols = mat.cols();
    let mut perm: Vec<usize> = (0..cols).collect();
    let mut pivots: Vec<u32> = Vec::new();

    for s in 0..rows.min(cols) {
        // Minimal-valuation entry in the remaining submatrix.
        let mut best: Option<(u32, usize, usize)> = None;
        for i in s..rows {
            for j in s..cols {
                if let Some(v) = ring.valuation(mat.at(i, j)) {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                        if v == 0 {
                            break;
                        }
                    }
                }
            }
            if matches!(best, Some((0, _, _))) {
                break;
            }
        }
        let Some((v, pi, pj)) = best else { break };

        if pi != s {
            for j in 0..cols {
                let x = mat.at(s, j).clone();
                let y = mat.at(pi, j).clone();
                mat.set(s, j, y);
                mat.set(pi, j, x);
            }
            rhs.swap(s, pi);
        }
        if pj != s {
            for i in 0..rows {
                let x = mat.at(i, s).clone();
                let y = mat.at(i, pj).clone();
                mat.set(i, s, y);
                mat.set(i, pj, x);
            }
            perm.swap(s, pj);
        }

        // Scale the pivot row so the pivot becomes exactly p^v.
        let unit = ring.div_exact_p(mat.at(s, s), v);
        let unit_inv = ring.unit_inverse(&unit).expect("pivot unit part is invertible");
        for j in s..cols {
            let t = ring.mul(mat.at(s, j), &unit_inv);
            mat.set(s, j, t);
        }
        rhs[s] = ring.mul(&rhs[s], &unit_inv);

        // Eliminate below: every entry in the pivot column has valuation
        // at least v by pivot minimality.
        for i in s + 1..rows {
            let Some(vi) = ring.valuation(mat.at(i, s)) else { continue };
            debug_assert!(vi >= v);
            let factor = ring.div_exact_p(mat.at(i, s), v);
            for j in s..cols {
                let t = ring.mul(&factor, mat.at(s, j));
                let nv = ring.sub(mat.at(i, j), &t);
                mat.set(i, j, nv);
            }
            let t = ring.mul(&factor, &rhs[s]);
            rhs[i] = ring.sub(&rhs[i], &t);
        }
        pivots.push(v);
    }

    Eliminated { ring, mat, rhs, pivots, perm }
}

impl<R: LocalRing> Eliminated<R> {
    /// Back-substitution with the non-pivot variables fixed. Returns None
    /// when some row is unsolvable.
    fn back_substitute(&self, rhs: &[R::Elt], mut x: Vec<R::Elt>) -> Option<Vec<R::Elt>> {
        let ring = &self.ring;
        let r = self.pivots.len();
        let cols = self.mat.cols();
        // Rows below the pivot block are all-zero on the left.
        for i in r..self.mat.rows() {
            if !ring.is_zero(&rhs[i]) {
                return None;
            }
        }
        for s in (0..r).rev() {
            let mut gamma = rhs[s].clone();
            for j in s + 1..cols {
                let t = ring.mul(self.mat.at(s, j), &x[j]);
                gamma = ring.sub(&gamma, &t);
            }
            let v = self.pivots[s];
            match ring.valuation(&gamma) {
                None => x[s] = ring.zero(),
                Some(gv) if gv >= v => x[s] = ring.div_exact_p(&gamma, v),
                Some(_) => return None,
            }
        }
        Some(x)
    }

    fn unpermute(&self, x: Vec<R::Elt>) -> Vec<R::Elt> {
        let mut out = vec![self.ring.zero(); x.len()];
        for (j, xj) in x.into_iter().enumerate() {
            out[self.perm[j]] = xj;
        }
        out
    }
}

/// Solve A x = b, returning the full solution set. Errors with
/// `NoSolution` when the system is inconsistent at this precision.
pub fn solve<R: LocalRing>(a: &Mat<R>, b: &[R::Elt]) -> Result<LinearSolution<R>, Error> {
    assert_eq!(a.rows(), b.len());
    let elim = eliminate(a, b);
    let ring = elim.ring.clone();
    let cols = a.cols();
    let r = elim.pivots.len();
    let m = ring.precision();

    let zeros = vec![ring.zero(); cols];
    let particular = elim
        .back_substitute(&elim.rhs, zeros.clone())
        .ok_or(Error::NoSolution)?;

    let hom_rhs = vec![ring.zero(); a.rows()];
    let mut kernel: Vec<Vec<R::Elt>> = Vec::new();
    // Free columns: one generator each.
    for fcol in r..cols {
        let mut x = zeros.clone();
        x[fcol] = ring.one();
        let g = elim
            .back_substitute(&hom_rhs, x)
            .expect("homogeneous back-substitution cannot fail");
        if !g.iter().all(|c| ring.is_zero(c)) {
            kernel.push(elim.unpermute(g));
        }
    }
    // Positive-valuation pivots: p^(M - v) times that column direction.
    for s in (0..r).rev() {
        let v = elim.pivots[s];
        if v == 0 || v >= m {
            continue;
        }
        let mut x = zeros.clone();
        x[s] = ring.mul_p(&ring.one(), m - v);
        // Freeze later pivots and free columns at zero; solve rows above s.
        let mut ok = true;
        for t in (0..s).rev() {
            let mut gamma = ring.zero();
            for j in t + 1..cols {
                let term = ring.mul(elim.mat.at(t, j), &x[j]);
                gamma = ring.sub(&gamma, &term);
            }
            match ring.valuation(&gamma) {
                None => x[t] = ring.zero(),
                Some(gv) if gv >= elim.pivots[t] => {
                    x[t] = ring.div_exact_p(&gamma, elim.pivots[t])
                }
                Some(_) => {
                    ok = false;
                    break;
                }
            }
        }
        debug_assert!(ok, "pivot-direction kernel generator must lift");
        if ok && !x.iter().all(|c| ring.is_zero(c)) {
            kernel.push(elim.unpermute(x));
        }
    }

    let particular = elim.unpermute(particular);
    let max_pivot_valuation = elim.pivots.iter().copied().max().unwrap_or(0);
    Ok(LinearSolution {
        particular,
        kernel,
        pivot_valuations: elim.pivots.clone(),
        max_pivot_valuation,
    })
}

/// Generators of the kernel of A.
pub fn kernel<R: LocalRing>(a: &Mat<R>) -> Vec<Vec<R::Elt>> {
    let b = vec![a.ring().zero(); a.rows()];
    solve(a, &b).expect("homogeneous system is always solvable").kernel
}
