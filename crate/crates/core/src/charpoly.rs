//! Characteristic polynomials by the Berkowitz algorithm.
//!
//! Division-free, so it works verbatim over Z and over Z/p^M — no
//! fraction-field detour and no pivoting concerns. Cost is O(n^4) ring
//! multiplications, irrelevant at the matrix sizes that arise here.

use alloc::vec;
use alloc::vec::Vec;

use crate::intpoly::IntPoly;
use crate::linear::Mat;
use crate::ring::{IntegerRing, Ring};

/// Coefficients of det(xI - A), ascending, length n + 1, monic.
pub fn charpoly<R: Ring>(a: &Mat<R>) -> Vec<R::Elt> {
    assert_eq!(a.rows(), a.cols());
    let ring = a.ring().clone();
    let n = a.rows();
    if n == 0 {
        return vec![ring.one()];
    }

    // Descending coefficients of the charpoly of the leading principal
    // r x r submatrix, grown one row at a time by a Toeplitz product.
    let mut c = vec![ring.one(), ring.neg(a.at(0, 0))];
    for r in 1..n {
        // q_0 = 1, q_1 = -A[r][r], q_(k+2) = -(R . M^k . S) with
        // M the leading r x r block, R the new row, S the new column.
        let mut q = Vec::with_capacity(r + 2);
        q.push(ring.one());
        q.push(ring.neg(a.at(r, r)));
        let mut w: Vec<R::Elt> = (0..r).map(|i| a.at(i, r).clone()).collect();
        for k in 0..r {
            if k > 0 {
                let mut next = vec![ring.zero(); r];
                for (i, ni) in next.iter_mut().enumerate() {
                    for (j, wj) in w.iter().enumerate() {
                        let t = ring.mul(a.at(i, j), wj);
                        *ni = ring.add(ni, &t);
                    }
                }
                w = next;
            }
            let mut dot = ring.zero();
            for (j, wj) in w.iter().enumerate() {
                let t = ring.mul(a.at(r, j), wj);
                dot = ring.add(&dot, &t);
            }
            q.push(ring.neg(&dot));
        }

        let mut cn = vec![ring.zero(); r + 2];
        for (i, cni) in cn.iter_mut().enumerate() {
            for (j, cj) in c.iter().enumerate().take(i + 1) {
                if i - j < q.len() {
                    let t = ring.mul(&q[i - j], cj);
                    *cni = ring.add(cni, &t);
                }
            }
        }
        c = cn;
    }

    c.reverse();
    c
}

pub fn charpoly_int(a: &Mat<IntegerRing>) -> IntPoly {
    IntPoly::new(charpoly(a))
}
