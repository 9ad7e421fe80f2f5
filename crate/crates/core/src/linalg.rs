//! Small dense linear algebra over exact rationals.
//!
//! Matrices here are at most a few rows wide (ranks of H^2), so a plain
//! row-major `Vec<Vec<Q>>` with Gauss-Jordan elimination is enough.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::Q;

pub type Matrix = Vec<Vec<Q>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect()
}

pub fn from_ints(rows: &[&[i64]]) -> Matrix {
    rows.iter().map(|r| crate::qvec(r)).collect()
}

pub fn transpose(a: &Matrix) -> Matrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// `a * b`; the caller guarantees compatible shapes.
pub fn mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(Q::zero(), |acc, k| acc + &row[k] * &b[k][j])
                })
                .collect()
        })
        .collect()
}

pub fn mul_vec(a: &Matrix, v: &[Q]) -> Vec<Q> {
    a.iter().map(|row| dot(row, v)).collect()
}

pub fn dot(u: &[Q], v: &[Q]) -> Q {
    u.iter().zip(v).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

/// `uᵀ G v`.
pub fn bilinear(g: &Matrix, u: &[Q], v: &[Q]) -> Q {
    dot(u, &mul_vec(g, v))
}

/// Matrix shape `(rows, cols)`, or `None` if rows have unequal length.
pub fn shape(a: &Matrix) -> Option<(usize, usize)> {
    let cols = a.first().map_or(0, Vec::len);
    a.iter().all(|r| r.len() == cols).then_some((a.len(), cols))
}

/// Reduced row echelon form together with the pivot columns.
pub fn rref(a: &Matrix) -> (Matrix, Vec<usize>) {
    let mut m = a.clone();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank(a: &Matrix) -> usize {
    rref(a).1.len()
}

/// Basis of the right nullspace `{x : a x = 0}`.
///
/// Each basis vector is scaled to a primitive integer vector whose first
/// nonzero entry is positive, so results are canonical.
pub fn nullspace(a: &Matrix, cols: usize) -> Vec<Vec<Q>> {
    let (r, pivots) = rref(a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[row][f].clone();
            }
            primitive(&v)
        })
        .collect()
}

/// Scale a nonzero rational vector to a primitive integer vector with
/// positive leading entry. The zero vector is returned unchanged.
pub fn primitive(v: &[Q]) -> Vec<Q> {
    let Some(lead) = v.iter().find(|x| !x.is_zero()) else {
        return v.to_vec();
    };
    let den_lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(den_lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let sign = if lead.is_negative() { -BigInt::one() } else { BigInt::one() };
    ints.into_iter()
        .map(|x| Q::from_integer(x / &g * &sign))
        .collect()
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}
