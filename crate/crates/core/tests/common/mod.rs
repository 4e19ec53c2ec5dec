//! Random generators and entry-by-entry oracles shared by the integration tests.
//!
//! The oracles work on `Vec<Vec<u8>>` with plain triple loops so that they do
//! not share code paths with the bit-packed implementation.

#![allow(dead_code)]

use nilclean::Gf2Matrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub type Dense = Vec<Vec<u8>>;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut StdRng, n: usize) -> Gf2Matrix {
    let bits: Vec<u8> = (0..n * n).map(|_| rng.gen_range(0..2)).collect();
    Gf2Matrix::from_entries(n, &bits).unwrap()
}

pub fn random_invertible(rng: &mut StdRng, n: usize) -> Gf2Matrix {
    loop {
        let m = random_matrix(rng, n);
        if m.rank() == n {
            return m;
        }
    }
}

/// `S diag(I_r, 0) S^{-1}` for random `r` and invertible `S`.
pub fn random_idempotent(rng: &mut StdRng, n: usize) -> Gf2Matrix {
    let r = rng.gen_range(0..=n);
    let mut d = Gf2Matrix::zero(n);
    for i in 0..r {
        d.set(i, i, true);
    }
    Gf2Matrix::conjugate(&random_invertible(rng, n), &d).unwrap()
}

/// Random strictly upper triangular matrix conjugated by a random invertible.
pub fn random_nilpotent(rng: &mut StdRng, n: usize) -> Gf2Matrix {
    let mut u = Gf2Matrix::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            u.set(i, j, rng.gen_bool(0.5));
        }
    }
    Gf2Matrix::conjugate(&random_invertible(rng, n), &u).unwrap()
}

/// Random `q` with `q^e = 0`: Jordan blocks of size at most `e`, conjugated.
pub fn random_nilpotent_index(rng: &mut StdRng, n: usize, e: usize) -> Gf2Matrix {
    let mut u = Gf2Matrix::zero(n);
    let mut start = 0;
    while start < n {
        let size = rng.gen_range(1..=e.min(n - start));
        for i in start..start + size - 1 {
            u.set(i, i + 1, rng.gen_bool(0.7));
        }
        start += size;
    }
    Gf2Matrix::conjugate(&random_invertible(rng, n), &u).unwrap()
}

pub fn dense(m: &Gf2Matrix) -> Dense {
    let n = m.dim();
    (0..n).map(|i| (0..n).map(|j| m.get(i, j) as u8).collect()).collect()
}

pub fn dense_from_code(n: usize, code: u64) -> Dense {
    (0..n).map(|i| (0..n).map(|j| ((code >> (i * n + j)) & 1) as u8).collect()).collect()
}

pub fn naive_mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut c = vec![vec![0u8; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0;
            for l in 0..n {
                s ^= a[i][l] & b[l][j];
            }
            c[i][j] = s;
        }
    }
    c
}

pub fn naive_add(a: &Dense, b: &Dense) -> Dense {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x ^ y).collect()).collect()
}

pub fn naive_pow(a: &Dense, e: usize) -> Dense {
    let n = a.len();
    let mut r: Dense = (0..n).map(|i| (0..n).map(|j| (i == j) as u8).collect()).collect();
    for _ in 0..e {
        r = naive_mul(&r, a);
    }
    r
}

pub fn is_zero(a: &Dense) -> bool {
    a.iter().all(|r| r.iter().all(|&x| x == 0))
}

/// Idempotents of `M_n(F_2)` by scanning all `2^{n^2}` matrices, as dense arrays.
pub fn brute_idempotents(n: usize) -> Vec<Dense> {
    (0..1u64 << (n * n)).map(|code| dense_from_code(n, code)).filter(|p| naive_mul(p, p) == *p).collect()
}

/// Number of idempotents `p` with `(a + p)^k = 0`, entry by entry.
pub fn brute_decomposition_count(a: &Gf2Matrix, k: usize, idempotents: &[Dense]) -> usize {
    let a = dense(a);
    idempotents.iter().filter(|p| is_zero(&naive_pow(&naive_add(&a, p), k))).count()
}

pub fn to_matrix(d: &Dense) -> Gf2Matrix {
    let n = d.len();
    let bits: Vec<u8> = d.iter().flatten().copied().collect();
    Gf2Matrix::from_entries(n, &bits).unwrap()
}
