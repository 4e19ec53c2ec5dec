//! Noncommutative polynomials over GF(2) in the letters `P` and `Q`, reduced
//! modulo `P^2 = P` and `Q^e = 0`.
//!
//! A polynomial is a set of words: coefficients live in GF(2), so adding a
//! word that is already present removes it. Both rules act on maximal runs of
//! a single letter, so reduction is confluent and every polynomial has a
//! unique normal form.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::MatrixError;
use crate::matrix::Gf2Matrix;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Letter {
    P,
    Q,
}

/// A word over `{P, Q}`; the empty word is the identity.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct NcWord(pub Vec<Letter>);

impl NcWord {
    pub fn empty() -> Self {
        NcWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &NcWord) -> NcWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        NcWord(v)
    }

    pub fn reversed(&self) -> NcWord {
        NcWord(self.0.iter().rev().copied().collect())
    }

    /// Substitutes matrices for the letters.
    pub fn evaluate(&self, p0: &Gf2Matrix, q0: &Gf2Matrix) -> Gf2Matrix {
        self.0.iter().fold(Gf2Matrix::identity(p0.dim()), |acc, l| match l {
            Letter::P => acc.mul_unchecked(p0),
            Letter::Q => acc.mul_unchecked(q0),
        })
    }
}

impl Ord for NcWord {
    /// Length first, then lexicographic with `P < Q`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for NcWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for NcWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for l in &self.0 {
            f.write_str(match l {
                Letter::P => "P",
                Letter::Q => "Q",
            })?;
        }
        Ok(())
    }
}

impl fmt::Debug for NcWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for NcWord {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "1" {
            return Ok(NcWord::empty());
        }
        s.chars()
            .map(|c| match c {
                'P' => Ok(Letter::P),
                'Q' => Ok(Letter::Q),
                other => Err(format!("invalid letter {other:?}")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(NcWord)
    }
}

/// Rewriting rules `P^2 -> P` and `Q^e -> 0`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RuleSet {
    nil_index: usize,
}

impl RuleSet {
    pub fn new(nil_index: usize) -> Option<Self> {
        (nil_index >= 1).then_some(RuleSet { nil_index })
    }

    pub fn nil_index(&self) -> usize {
        self.nil_index
    }

    /// Collapses runs of `P` and discards words containing `Q^e`.
    pub fn reduce_word(&self, word: &NcWord) -> Option<NcWord> {
        let mut out = Vec::with_capacity(word.len());
        let mut q_run = 0;
        for &l in &word.0 {
            match l {
                Letter::P => {
                    q_run = 0;
                    if out.last() != Some(&Letter::P) {
                        out.push(Letter::P);
                    }
                }
                Letter::Q => {
                    q_run += 1;
                    if q_run >= self.nil_index {
                        return None;
                    }
                    out.push(Letter::Q);
                }
            }
        }
        Some(NcWord(out))
    }

    /// Applies one rule instance at a time, always at the leftmost (or
    /// rightmost) redex, until no rule applies.
    pub fn reduce_word_stepwise(&self, word: &NcWord, from_left: bool) -> Option<NcWord> {
        let e = self.nil_index;
        let mut w = word.0.clone();
        loop {
            let mut redexes = Vec::new();
            for i in 0..w.len() {
                if i + 1 < w.len() && w[i] == Letter::P && w[i + 1] == Letter::P {
                    redexes.push((i, Letter::P));
                }
                if i + e <= w.len() && w[i..i + e].iter().all(|&l| l == Letter::Q) {
                    redexes.push((i, Letter::Q));
                }
            }
            let pick = if from_left { redexes.first() } else { redexes.last() };
            match pick {
                None => return Some(NcWord(w)),
                Some(&(_, Letter::Q)) => return None,
                Some(&(i, Letter::P)) => {
                    w.remove(i);
                }
            }
        }
    }
}

/// Formal sum of words with coefficients in GF(2).
#[derive(Clone, PartialEq, Eq, Default)]
pub struct NcPoly {
    words: BTreeSet<NcWord>,
}

impl NcPoly {
    pub fn zero() -> Self {
        NcPoly::default()
    }

    pub fn one() -> Self {
        NcPoly::from_words([NcWord::empty()])
    }

    /// `P + Q`.
    pub fn letters() -> Self {
        NcPoly::from_words([NcWord(vec![Letter::P]), NcWord(vec![Letter::Q])])
    }

    /// Sum of the given words; repeated words cancel in pairs.
    pub fn from_words<I: IntoIterator<Item = NcWord>>(words: I) -> Self {
        let mut p = NcPoly::zero();
        for w in words {
            p.toggle(w);
        }
        p
    }

    pub fn toggle(&mut self, w: NcWord) {
        if !self.words.remove(&w) {
            self.words.insert(w);
        }
    }

    pub fn words(&self) -> impl Iterator<Item = &NcWord> {
        self.words.iter()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: &NcWord) -> bool {
        self.words.contains(w)
    }

    pub fn add(&self, other: &NcPoly) -> NcPoly {
        NcPoly { words: self.words.symmetric_difference(&other.words).cloned().collect() }
    }

    pub fn mul(&self, other: &NcPoly) -> NcPoly {
        NcPoly::from_words(self.words.iter().flat_map(|a| other.words.iter().map(move |b| a.concat(b))))
    }

    pub fn reversed(&self) -> NcPoly {
        NcPoly::from_words(self.words.iter().map(NcWord::reversed))
    }

    pub fn normal_form(&self, rules: &RuleSet) -> NcPoly {
        NcPoly::from_words(self.words.iter().filter_map(|w| rules.reduce_word(w)))
    }

    /// Substitutes `p0` for `P` and `q0` for `Q` and sums the words.
    pub fn evaluate(&self, p0: &Gf2Matrix, q0: &Gf2Matrix) -> Result<Gf2Matrix, MatrixError> {
        if p0.dim() != q0.dim() {
            return Err(MatrixError::DimensionMismatch(p0.dim(), q0.dim()));
        }
        let mut acc = Gf2Matrix::zero(p0.dim());
        for w in &self.words {
            acc.add_assign_unchecked(&w.evaluate(p0, q0));
        }
        Ok(acc)
    }
}

/// Reduced expansion of `(P + Q)^k`.
///
/// Multiplies one factor at a time and reduces after each step; reduction is
/// compatible with concatenation, so this agrees with expanding all `2^k`
/// words first.
pub fn expand_sum_power(k: usize, rules: &RuleSet) -> NcPoly {
    let step = NcPoly::letters();
    (0..k).fold(NcPoly::one(), |acc, _| acc.mul(&step).normal_form(rules))
}

/// Reduced form of `(P + Q)^4 + (P + Q)^3` under `Q^e = 0`.
///
/// Whenever `t^4 + t^3 + 1` annihilates `P + Q`, this word set sums to the
/// identity.
pub fn derive_identity(rules: &RuleSet) -> NcPoly {
    expand_sum_power(4, rules).add(&expand_sum_power(3, rules)).normal_form(rules)
}

/// The index-three case: `PQPQ + QPQP + PQQP + QQPQ + QPQQ + PQP`.
pub fn derive_eq1() -> NcPoly {
    derive_identity(&RuleSet::new(3).expect("index 3"))
}

impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.words.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.words.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("+"))
    }
}

impl fmt::Debug for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NcPoly({self})")
    }
}

impl FromStr for NcPoly {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "0" {
            return Ok(NcPoly::zero());
        }
        s.split('+').map(|w| w.trim().parse::<NcWord>()).collect::<Result<Vec<_>, _>>().map(NcPoly::from_words)
    }
}
