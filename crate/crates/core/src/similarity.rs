//! Similarity invariants: minimal polynomial, invariant factors, and the
//! rational canonical (Frobenius) form.
//!
//! Invariant factors are read off nullity signatures. For each irreducible `p`
//! dividing the minimal polynomial, the nullities of `p(A)^j` for
//! `j = 1, 2, ...` determine how many elementary divisors `p^e` occur for each
//! `e`; the elementary divisors are then stacked into the divisor chain.

use crate::error::MatrixError;
use crate::matrix::Gf2Matrix;
use crate::poly::Gf2Poly;

/// A similarity class of `M_n(F_2)`, identified by its invariant factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimilarityClass {
    /// `f_1 | f_2 | ... | f_k`, smallest first.
    pub invariant_factors: Vec<Gf2Poly>,
    /// Block-diagonal companion matrices of the factors.
    pub representative: Gf2Matrix,
}

impl SimilarityClass {
    pub fn from_chain(invariant_factors: Vec<Gf2Poly>) -> Result<Self, MatrixError> {
        let representative = companion_sum(&invariant_factors)?;
        Ok(SimilarityClass { invariant_factors, representative })
    }

    pub fn dim(&self) -> usize {
        self.representative.dim()
    }

    /// Chain as space-separated bit strings, e.g. `"11 11"`.
    pub fn chain_string(&self) -> String {
        chain_string(&self.invariant_factors)
    }
}

pub fn chain_string(chain: &[Gf2Poly]) -> String {
    chain.iter().map(Gf2Poly::to_bit_string).collect::<Vec<_>>().join(" ")
}

fn companion_sum(chain: &[Gf2Poly]) -> Result<Gf2Matrix, MatrixError> {
    if chain.is_empty() {
        return Ok(Gf2Matrix::zero(0));
    }
    let blocks = chain.iter().map(Gf2Matrix::companion).collect::<Result<Vec<_>, _>>()?;
    Gf2Matrix::direct_sum(&blocks)
}

/// Minimal polynomial of the vector `v` under `a`: the first linear relation
/// among `v, Av, A^2 v, ...`.
fn vector_minimal_polynomial(a: &Gf2Matrix, v: u64) -> Gf2Poly {
    // Each basis entry is (reduced vector, polynomial combination producing it).
    let mut basis: Vec<(u64, Gf2Poly)> = Vec::new();
    let mut current = v;
    let mut power = 0usize;
    loop {
        let mut vec = current;
        let mut combo = Gf2Poly::from_exponents(&[power]);
        for (b, c) in &basis {
            let low = b & b.wrapping_neg();
            if vec & low != 0 {
                vec ^= b;
                combo = combo.add(c);
            }
        }
        if vec == 0 {
            return combo;
        }
        basis.push((vec, combo));
        current = a.apply(current);
        power += 1;
    }
}

/// Minimal polynomial as the least common multiple of the minimal polynomials
/// of the standard basis vectors (Krylov sequences). Independent of the
/// nullity-signature route used by [`invariant_factors`].
pub fn krylov_minimal_polynomial(a: &Gf2Matrix) -> Gf2Poly {
    (0..a.dim()).fold(Gf2Poly::one(), |acc, i| acc.lcm(&vector_minimal_polynomial(a, 1 << i)))
}

/// Multiset of elementary divisor exponents of `p` in `a`, largest first.
fn elementary_exponents(a: &Gf2Matrix, p: &Gf2Poly) -> Vec<u32> {
    let n = a.dim();
    let d = p.degree().expect("irreducible has positive degree");
    let b = a.eval_poly(p);
    // nullities[j] = nullity(b^j) / deg p
    let mut nullities = vec![0usize];
    let mut power = Gf2Matrix::identity(n);
    loop {
        power = power.mul_unchecked(&b);
        let nu = n - power.rank();
        debug_assert_eq!(nu % d, 0);
        if nu / d == *nullities.last().unwrap() {
            break;
        }
        nullities.push(nu / d);
    }
    // at_least[j] = number of blocks of size >= j, for j >= 1
    let top = nullities.len() - 1;
    let at_least = |j: usize| if j > top { 0 } else { nullities[j] - nullities[j - 1] };
    let mut exps = Vec::new();
    for e in (1..=top).rev() {
        let count = at_least(e) - at_least(e + 1);
        exps.extend(std::iter::repeat_n(e as u32, count));
    }
    exps
}

/// Elementary divisors `(p, e)`, grouped by irreducible `p` in ascending order.
pub fn elementary_divisors(a: &Gf2Matrix) -> Vec<(Gf2Poly, Vec<u32>)> {
    krylov_minimal_polynomial(a)
        .irreducible_factors()
        .into_iter()
        .map(|p| {
            let exps = elementary_exponents(a, &p);
            (p, exps)
        })
        .collect()
}

/// Invariant factor chain `f_1 | ... | f_k`, smallest first.
pub fn invariant_factors(a: &Gf2Matrix) -> Vec<Gf2Poly> {
    let divisors = elementary_divisors(a);
    let k = divisors.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
    // The i-th largest factor takes the i-th largest exponent of every prime.
    let mut chain: Vec<Gf2Poly> = (0..k)
        .map(|i| {
            divisors.iter().fold(Gf2Poly::one(), |acc, (p, exps)| match exps.get(i) {
                Some(&e) => acc.mul(&p.pow(e)),
                None => acc,
            })
        })
        .collect();
    chain.reverse();
    chain
}

/// Largest invariant factor, checked to annihilate `a`.
pub fn minimal_polynomial(a: &Gf2Matrix) -> Gf2Poly {
    let m = invariant_factors(a).pop().unwrap_or_else(Gf2Poly::one);
    assert!(a.eval_poly(&m).is_zero(), "largest invariant factor must annihilate the matrix");
    m
}

pub fn frobenius_form(a: &Gf2Matrix) -> Gf2Matrix {
    companion_sum(&invariant_factors(a)).expect("invariant factors are monic with total degree n")
}

pub fn is_similar(a: &Gf2Matrix, b: &Gf2Matrix) -> Result<bool, MatrixError> {
    if a.dim() != b.dim() {
        return Err(MatrixError::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(invariant_factors(a) == invariant_factors(b))
}

/// One entry per similarity class of `M_n(F_2)`, chains in lexicographic order.
pub fn enumerate_similarity_classes(n: usize) -> Vec<SimilarityClass> {
    fn extend(prefix: &mut Vec<Gf2Poly>, remaining: usize, out: &mut Vec<Vec<Gf2Poly>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        let min_deg = prefix.last().map_or(1, |p| p.degree().unwrap());
        for d in min_deg..=remaining {
            // later factors are at least as large as this one
            if remaining - d != 0 && remaining - d < d {
                continue;
            }
            for f in Gf2Poly::monic_of_degree(d) {
                if prefix.last().is_none_or(|prev| prev.divides(&f)) {
                    prefix.push(f);
                    extend(prefix, remaining - d, out);
                    prefix.pop();
                }
            }
        }
    }
    let mut chains = Vec::new();
    extend(&mut Vec::new(), n, &mut chains);
    chains.into_iter().map(|c| SimilarityClass::from_chain(c).expect("valid chain")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Gf2Poly {
        s.parse().unwrap()
    }

    #[test]
    fn minimal_polynomial_examples() {
        assert_eq!(minimal_polynomial(&Gf2Matrix::matrix_c()), p("10011"));
        assert_eq!(minimal_polynomial(&Gf2Matrix::identity(3)), p("11"));
        assert_eq!(minimal_polynomial(&Gf2Matrix::zero(3)), p("01"));
        assert_eq!(minimal_polynomial(&Gf2Matrix::shift(3)), p("0001"));
    }

    #[test]
    fn invariant_factor_examples() {
        let c = Gf2Matrix::matrix_c();
        assert_eq!(invariant_factors(&c), vec![p("10011")]);
        assert_eq!(invariant_factors(&Gf2Matrix::zero(2)), vec![p("01"), p("01")]);
        let cc = Gf2Matrix::direct_power(&c, 2).unwrap();
        assert_eq!(invariant_factors(&cc), vec![p("10011"), p("10011")]);
        // diag(0, 1) has chain [t(t+1)]
        assert_eq!(invariant_factors(&Gf2Matrix::diag(&[0, 1])), vec![p("011")]);
        // I_2 (+) J_2(1): elementary divisors (t+1), (t+1), (t+1)^2
        let j = Gf2Matrix::from_row_strs(&["11", "01"]).unwrap();
        let a = Gf2Matrix::direct_sum(&[Gf2Matrix::identity(2), j]).unwrap();
        assert_eq!(invariant_factors(&a), vec![p("11"), p("11"), p("101")]);
    }

    #[test]
    fn frobenius_examples() {
        let c = Gf2Matrix::matrix_c();
        assert_eq!(frobenius_form(&c), c);
        assert_eq!(frobenius_form(&Gf2Matrix::identity(2)), Gf2Matrix::identity(2));
        assert!(frobenius_form(&Gf2Matrix::zero(0)).dim() == 0);
    }

    #[test]
    fn similarity_examples() {
        let c = Gf2Matrix::matrix_c();
        assert!(!is_similar(&c, &Gf2Matrix::identity(4)).unwrap());
        assert!(!is_similar(&Gf2Matrix::zero(2), &Gf2Matrix::shift(2)).unwrap());
        assert!(is_similar(&c, &c.transpose()).unwrap());
        assert!(is_similar(&c, &Gf2Matrix::identity(3)).is_err());
    }

    #[test]
    fn class_counts_small() {
        let one = enumerate_similarity_classes(1);
        assert_eq!(one.len(), 2);
        assert_eq!(one[0].invariant_factors, vec![p("01")]);
        assert_eq!(one[1].invariant_factors, vec![p("11")]);
        assert_eq!(enumerate_similarity_classes(2).len(), 6);
        let four = enumerate_similarity_classes(4);
        let c_class = four.iter().find(|c| c.invariant_factors == vec![p("10011")]).unwrap();
        assert_eq!(c_class.representative, Gf2Matrix::matrix_c());
    }
}
