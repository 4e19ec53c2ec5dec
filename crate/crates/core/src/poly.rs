//! Univariate polynomials over GF(2).
//!
//! Coefficients are packed into `u64` limbs, bit `i` of the concatenation being
//! the coefficient of `t^i`. Limbs are trimmed so that the top limb is nonzero;
//! the zero polynomial has no limbs.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::PolyError;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Gf2Poly {
    limbs: Vec<u64>,
}

impl Gf2Poly {
    pub fn zero() -> Self {
        Gf2Poly { limbs: Vec::new() }
    }

    pub fn one() -> Self {
        Gf2Poly { limbs: vec![1] }
    }

    /// The indeterminate `t`.
    pub fn x() -> Self {
        Gf2Poly { limbs: vec![2] }
    }

    /// Polynomial whose coefficient bits are the bits of `bits` (bit `i` is `t^i`).
    pub fn from_u64(bits: u64) -> Self {
        let mut p = Gf2Poly { limbs: vec![bits] };
        p.trim();
        p
    }

    /// Monic polynomial with the given exponents set, e.g. `&[4, 3, 0]`.
    pub fn from_exponents(exps: &[usize]) -> Self {
        let mut p = Self::zero();
        for &e in exps {
            p.flip(e);
        }
        p
    }

    fn trim(&mut self) {
        while self.limbs.last() == Some(&0) {
            self.limbs.pop();
        }
    }

    fn flip(&mut self, i: usize) {
        let (w, b) = (i / 64, i % 64);
        if self.limbs.len() <= w {
            self.limbs.resize(w + 1, 0);
        }
        self.limbs[w] ^= 1 << b;
        self.trim();
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.limbs.get(i / 64).is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let top = *self.limbs.last()?;
        Some((self.limbs.len() - 1) * 64 + 63 - top.leading_zeros() as usize)
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.limbs == [1]
    }

    /// Low 64 coefficients as a word; exact for degree < 64.
    pub fn low_bits(&self) -> u64 {
        self.limbs.first().copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (long, short) = if self.limbs.len() >= other.limbs.len() { (self, other) } else { (other, self) };
        let mut limbs = long.limbs.clone();
        for (a, b) in limbs.iter_mut().zip(&short.limbs) {
            *a ^= b;
        }
        let mut p = Gf2Poly { limbs };
        p.trim();
        p
    }

    fn shl(&self, s: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let (ws, bs) = (s / 64, s % 64);
        let mut limbs = vec![0u64; self.limbs.len() + ws + 1];
        for (i, &w) in self.limbs.iter().enumerate() {
            limbs[i + ws] ^= w << bs;
            if bs > 0 {
                limbs[i + ws + 1] ^= w >> (64 - bs);
            }
        }
        let mut p = Gf2Poly { limbs };
        p.trim();
        p
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut acc = Self::zero();
        let Some(d) = other.degree() else {
            return acc;
        };
        for i in 0..=d {
            if other.coeff(i) {
                acc = acc.add(&self.shl(i));
            }
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Long division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn divmod(&self, divisor: &Self) -> Result<(Self, Self), PolyError> {
        let dd = divisor.degree().ok_or(PolyError::DivisionByZero)?;
        let mut q = Self::zero();
        let mut r = self.clone();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            q.flip(rd - dd);
            r = r.add(&divisor.shl(rd - dd));
        }
        Ok((q, r))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self, PolyError> {
        self.divmod(divisor).map(|(_, r)| r)
    }

    pub fn divides(&self, other: &Self) -> bool {
        !self.is_zero() && other.rem(self).map(|r| r.is_zero()).unwrap_or(false)
    }

    /// Greatest common divisor; monic, or zero when both inputs are zero.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a
    }

    pub fn lcm(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let g = self.gcd(other);
        self.divmod(&g).expect("nonzero gcd").0.mul(other)
    }

    /// Bit string, lowest degree first (`t^4+t^3+1` is `"10011"`). The zero
    /// polynomial is `"0"`.
    pub fn to_bit_string(&self) -> String {
        match self.degree() {
            None => "0".to_string(),
            Some(d) => (0..=d).map(|i| if self.coeff(i) { '1' } else { '0' }).collect(),
        }
    }

    /// All monic polynomials of degree `d`, in increasing integer order.
    pub fn monic_of_degree(d: usize) -> impl Iterator<Item = Gf2Poly> {
        assert!(d < 63, "degree {d} is too large to enumerate");
        let top = 1u64 << d;
        (0..top).map(move |low| Gf2Poly::from_u64(top | low))
    }

    /// Whether the polynomial has no factor of degree between 1 and `deg / 2`.
    pub fn is_irreducible(&self) -> bool {
        let Some(d) = self.degree() else {
            return false;
        };
        if d == 0 {
            return false;
        }
        (1..=d / 2).all(|k| Self::monic_of_degree(k).all(|g| !g.divides(self)))
    }

    /// Distinct irreducible factors in ascending order, by trial division with
    /// monic polynomials of increasing degree.
    pub fn irreducible_factors(&self) -> Vec<Gf2Poly> {
        let mut rest = self.clone();
        let mut factors = Vec::new();
        let mut d = 1;
        while let Some(rd) = rest.degree() {
            if rd == 0 {
                break;
            }
            if 2 * d > rd {
                factors.push(rest);
                break;
            }
            for g in Self::monic_of_degree(d) {
                if g.divides(&rest) {
                    while g.divides(&rest) {
                        rest = rest.divmod(&g).expect("nonzero").0;
                    }
                    factors.push(g);
                }
            }
            d += 1;
        }
        factors.sort();
        factors
    }
}

/// Every monic irreducible polynomial of degree `1..=max_degree`, ordered by
/// degree and then coefficient bits.
pub fn irreducibles_up_to(max_degree: usize) -> Vec<Gf2Poly> {
    let mut found: Vec<Gf2Poly> = Vec::new();
    for d in 1..=max_degree {
        let candidates: Vec<Gf2Poly> = Gf2Poly::monic_of_degree(d)
            .filter(|f| found.iter().take_while(|g| 2 * g.degree().unwrap() <= d).all(|g| !g.divides(f)))
            .collect();
        found.extend(candidates);
    }
    found
}

impl Ord for Gf2Poly {
    /// Degree first, then coefficient bits read as an integer.
    fn cmp(&self, other: &Self) -> Ordering {
        self.limbs.len().cmp(&other.limbs.len()).then_with(|| self.limbs.iter().rev().cmp(other.limbs.iter().rev()))
    }
}

impl PartialOrd for Gf2Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromStr for Gf2Poly {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(PolyError::Parse(s.to_string()));
        }
        let mut p = Gf2Poly::zero();
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => p.flip(i),
                _ => return Err(PolyError::Parse(s.to_string())),
            }
        }
        Ok(p)
    }
}

impl fmt::Display for Gf2Poly {
    /// Human form such as `t^4+t^3+1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(d) = self.degree() else {
            return f.write_str("0");
        };
        let terms: Vec<String> = (0..=d)
            .rev()
            .filter(|&i| self.coeff(i))
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            })
            .collect();
        f.write_str(&terms.join("+"))
    }
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Poly({self})")
    }
}
