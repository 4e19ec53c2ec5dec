//! Idempotent enumeration and the search for nil-clean decompositions.
//!
//! Two enumerators are provided. `Brute` filters all of `M_n(F_2)` by
//! `p^2 = p` and is limited to `n <= 4`. `Stratified` generates each idempotent
//! of rank `r` exactly once as the projection onto a subspace `U` (in reduced
//! row echelon form) along a complement `W`; complements of `U` are the
//! graphs of linear maps from the span of the non-pivot coordinate vectors
//! into `U`, indexed by `r * (n - r)` free bits.
//!
//! Searches scan the whole space and keep the lexicographically smallest
//! witness, so results do not depend on the number of worker threads.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::SearchError;
use crate::matrix::Gf2Matrix;
use crate::nc::derive_eq1;
use crate::report::{Decomposition, SearchReport, SearchStatus, Strategy};
use crate::sat::{dpll_solve, encode, CnfInstance, SolveMode, SolveResult};
use crate::similarity::{enumerate_similarity_classes, SimilarityClass};

/// Largest dimension the stratified enumerator accepts.
pub const MAX_STRATIFIED_DIM: usize = 10;

/// Knobs shared by the search entry points.
#[derive(Clone, Copy, Debug, Default)]
pub struct SearchOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    /// Decision budget for the built-in SAT solver; `None` is unlimited.
    pub sat_budget: Option<u64>,
}

/// A subspace of `F_2^n` given by a reduced row echelon basis.
#[derive(Clone, Debug)]
struct Subspace {
    n: usize,
    basis: Vec<u64>,
    non_pivots: Vec<usize>,
}

impl Subspace {
    fn rank(&self) -> usize {
        self.basis.len()
    }

    fn complement_count(&self) -> u64 {
        1u64 << (self.rank() * (self.n - self.rank()))
    }

    /// Projection onto this subspace along the complement indexed by `code`.
    fn projection(&self, code: u64) -> Gf2Matrix {
        let r = self.rank();
        let mut cols = self.basis.clone();
        for (t, &j) in self.non_pivots.iter().enumerate() {
            let mut w = 1u64 << j;
            for (i, &u) in self.basis.iter().enumerate() {
                if (code >> (t * r + i)) & 1 == 1 {
                    w ^= u;
                }
            }
            cols.push(w);
        }
        let frame = Gf2Matrix::from_columns(self.n, &cols);
        let inv = frame.inverse().expect("subspace and complement span F_2^n");
        let keep = Gf2Matrix::direct_sum(&[Gf2Matrix::identity(r), Gf2Matrix::zero(self.n - r)])
            .unwrap_or_else(|_| Gf2Matrix::zero(self.n));
        frame.mul_unchecked(&keep).mul_unchecked(&inv)
    }
}

/// All `r`-dimensional subspaces of `F_2^n`, ordered by pivot set and then by
/// the free entries of the echelon basis.
fn subspaces(n: usize, r: usize) -> Vec<Subspace> {
    fn pivot_sets(n: usize, r: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for c in start..n {
            if n - c < r - cur.len() {
                break;
            }
            cur.push(c);
            pivot_sets(n, r, c + 1, cur, out);
            cur.pop();
        }
    }
    let mut sets = Vec::new();
    pivot_sets(n, r, 0, &mut Vec::new(), &mut sets);
    let mut out = Vec::new();
    for pivots in sets {
        let non_pivots: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
        // free slots: (row, column) with column > pivot and not a pivot column
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| non_pivots.iter().filter(move |&&j| j > c).map(move |&j| (i, j)))
            .collect();
        for bits in 0u64..(1 << free.len()) {
            let mut basis: Vec<u64> = pivots.iter().map(|&c| 1u64 << c).collect();
            for (b, &(i, j)) in free.iter().enumerate() {
                if (bits >> b) & 1 == 1 {
                    basis[i] |= 1 << j;
                }
            }
            out.push(Subspace { n, basis, non_pivots: non_pivots.clone() });
        }
    }
    out
}

fn all_subspaces(n: usize) -> Vec<Subspace> {
    (0..=n).flat_map(|r| subspaces(n, r)).collect()
}

fn check_enumerable(n: usize, strategy: Strategy) -> Result<(), SearchError> {
    match strategy {
        Strategy::Brute if n > 4 => Err(SearchError::BruteTooLarge(n)),
        Strategy::Stratified if n > MAX_STRATIFIED_DIM => Err(SearchError::StratifiedTooLarge(n)),
        Strategy::Sat => Err(SearchError::NotEnumerable),
        _ => Ok(()),
    }
}

/// Every idempotent of `M_n(F_2)`, each exactly once.
pub fn iter_idempotents(n: usize, strategy: Strategy) -> Result<Box<dyn Iterator<Item = Gf2Matrix>>, SearchError> {
    check_enumerable(n, strategy)?;
    Ok(match strategy {
        Strategy::Brute => Box::new(
            (0..1u64 << (n * n)).map(move |code| Gf2Matrix::from_index(n, code)).filter(Gf2Matrix::is_idempotent),
        ),
        _ => {
            Box::new(all_subspaces(n).into_iter().flat_map(|s| (0..s.complement_count()).map(move |c| s.projection(c))))
        }
    })
}

/// `sum_r [n choose r]_2 * 2^{r(n-r)}`; `None` on overflow.
pub fn idempotent_count_formula(n: usize) -> Option<u128> {
    (0..=n).try_fold(0u128, |acc, r| {
        let g = gaussian_binomial(n, r)?;
        let shift = u32::try_from(r * (n - r)).ok()?;
        let complements = 1u128.checked_shl(shift).filter(|_| shift < 128)?;
        acc.checked_add(g.checked_mul(complements)?)
    })
}

/// Number of `r`-dimensional subspaces of `F_2^n`.
pub fn gaussian_binomial(n: usize, r: usize) -> Option<u128> {
    if r > n {
        return Some(0);
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..r {
        let top = 1u128.checked_shl(u32::try_from(n - i).ok()?).filter(|_| n - i < 128)? - 1;
        let bottom = (1u128 << (i + 1)) - 1;
        num = num.checked_mul(top)?;
        den = den.checked_mul(bottom)?;
    }
    Some(num / den)
}

/// Per-partition accumulator for the parallel scan.
#[derive(Default)]
struct Scan {
    examined: u64,
    best: Option<Gf2Matrix>,
}

impl Scan {
    fn offer(&mut self, p: Gf2Matrix) {
        match &self.best {
            Some(b) if b.lex_cmp(&p) != Ordering::Greater => {}
            _ => self.best = Some(p),
        }
    }

    fn merge(mut self, other: Scan) -> Scan {
        self.examined += other.examined;
        if let Some(p) = other.best {
            self.offer(p);
        }
        self
    }
}

fn with_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build().expect("thread pool").install(job),
        None => job(),
    }
}

/// Nilpotent matrices with `q^k = 0` have rank at most `n - ceil(n / k)`.
fn max_nilpotent_rank(n: usize, k: u32) -> usize {
    n - n.div_ceil(k as usize)
}

fn enumerate_search(a: &Gf2Matrix, k: u32, strategy: Strategy, workers: Option<usize>) -> Scan {
    let n = a.dim();
    let rank_cap = max_nilpotent_rank(n, k);
    let test = |p: &Gf2Matrix| {
        let q = a.add_unchecked(p);
        q.rank() <= rank_cap && q.is_nilpotent_index(k as u64)
    };
    with_pool(workers, || match strategy {
        Strategy::Brute => {
            let total = 1u64 << (n * n);
            let chunk = 1u64 << 10;
            (0..total.div_ceil(chunk))
                .into_par_iter()
                .map(|c| {
                    let mut scan = Scan::default();
                    for code in c * chunk..((c + 1) * chunk).min(total) {
                        let p = Gf2Matrix::from_index(n, code);
                        if p.is_idempotent() {
                            scan.examined += 1;
                            if test(&p) {
                                scan.offer(p);
                            }
                        }
                    }
                    scan
                })
                .reduce(Scan::default, Scan::merge)
        }
        _ => all_subspaces(n)
            .into_par_iter()
            .map(|s| {
                let mut scan = Scan::default();
                for code in 0..s.complement_count() {
                    let p = s.projection(code);
                    scan.examined += 1;
                    if test(&p) {
                        scan.offer(p);
                    }
                }
                scan
            })
            .reduce(Scan::default, Scan::merge),
    })
}

/// Searches for an idempotent `p` with `(a + p)^k = 0`.
///
/// The enumerating strategies report the lexicographically smallest witness.
/// The SAT strategy runs the built-in solver, whose first model is the same
/// smallest witness; when its budget runs out the report is `Exported`.
pub fn decompose(a: &Gf2Matrix, k: u32, strategy: Strategy, opts: &SearchOptions) -> Result<SearchReport, SearchError> {
    if k == 0 {
        return Err(SearchError::BadIndex);
    }
    if strategy == Strategy::Sat {
        return Ok(decompose_sat(a, k, opts.sat_budget).0);
    }
    check_enumerable(a.dim(), strategy)?;
    let scan = enumerate_search(a, k, strategy, opts.workers);
    let witness = scan.best.map(|p| {
        let q = a.add_unchecked(&p);
        Decomposition::new(p, q, k, a.clone()).expect("scan only keeps valid witnesses")
    });
    Ok(SearchReport {
        target: a.clone(),
        k,
        status: if witness.is_some() { SearchStatus::Found } else { SearchStatus::ExhaustedNone },
        witness,
        strategy,
        space_size: scan.examined,
    })
}

/// SAT route: returns the report together with the encoded instance.
pub fn decompose_sat(a: &Gf2Matrix, k: u32, budget: Option<u64>) -> (SearchReport, CnfInstance) {
    let cnf = encode(a, k);
    let outcome = dpll_solve(&cnf, SolveMode::FirstSolution, budget);
    let (status, witness) = match outcome.result {
        SolveResult::Sat(s) => {
            let d = cnf.decode_and_verify(&s).unwrap_or_else(|e| panic!("{e}"));
            (SearchStatus::Found, Some(d))
        }
        SolveResult::Unsat => (SearchStatus::ExhaustedNone, None),
        SolveResult::Unknown | SolveResult::Count(_) => (SearchStatus::Exported, None),
    };
    let report =
        SearchReport { target: a.clone(), k, status, witness, strategy: Strategy::Sat, space_size: outcome.decisions };
    (report, cnf)
}

/// Result of checking the theorem for `m` copies of C.
#[derive(Clone, Debug)]
pub struct TheoremOutcome {
    pub report: SearchReport,
    /// Present when the instance was exported instead of exhausted.
    pub cnf: Option<CnfInstance>,
}

/// The direct sum of `m` (odd) copies of C admits no decomposition with
/// `Q^3 = 0`. `m = 1` is settled by exhaustive enumeration; larger `m` is
/// exported as CNF and never claimed refuted here.
pub fn theorem_check(m: usize, opts: &SearchOptions) -> Result<TheoremOutcome, SearchError> {
    if m.is_multiple_of(2) {
        return Err(SearchError::EvenCopies(m));
    }
    let target = Gf2Matrix::direct_power(&Gf2Matrix::matrix_c(), m)?;
    if m == 1 {
        let report = decompose(&target, 3, Strategy::Stratified, opts)?;
        return Ok(TheoremOutcome { report, cnf: None });
    }
    let cnf = encode(&target, 3);
    let report = SearchReport {
        target,
        k: 3,
        status: SearchStatus::Exported,
        witness: None,
        strategy: Strategy::Sat,
        space_size: 0,
    };
    Ok(TheoremOutcome { report, cnf: Some(cnf) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockIdentity {
    pub lhs: Gf2Matrix,
    pub rhs: Gf2Matrix,
    pub equal: bool,
}

/// With `p = I_r (+) 0_alpha`, compares the bottom-right `alpha x alpha` block
/// of the six-word identity evaluated at `(p, q)` against
/// `Q3 Q2 Q4 + Q4 Q3 Q2`. The two agree for every `q`.
pub fn block_identity_check(r: usize, q: &Gf2Matrix) -> Result<BlockIdentity, SearchError> {
    let n = q.dim();
    if r > n {
        return Err(SearchError::Matrix(crate::error::MatrixError::AlphaOutOfRange { alpha: r, n }));
    }
    let alpha = n - r;
    let p = canonical_projector(r, alpha);
    let e = derive_eq1().evaluate(&p, q)?;
    let lhs = e.block_split(alpha)?.q4;
    let blocks = q.block_split(alpha)?;
    let q3q2 = blocks.q3.mul(&blocks.q2)?.into_square()?;
    let rhs = q3q2.mul_unchecked(&blocks.q4).add_unchecked(&blocks.q4.mul_unchecked(&q3q2));
    let equal = lhs == rhs;
    Ok(BlockIdentity { lhs, rhs, equal })
}

/// `I_r (+) 0_alpha`.
pub fn canonical_projector(r: usize, alpha: usize) -> Gf2Matrix {
    let mut p = Gf2Matrix::zero(r + alpha);
    for i in 0..r {
        p.set(i, i, true);
    }
    p
}

/// Trace bookkeeping for a pair `p^2 = p`, `q^3 = 0`.
///
/// If `eq1_holds`, the block identity gives `XY + YX = I_alpha` for some
/// square `X, Y`; traces of `XY` and `YX` agree, so `alpha` is even and
/// `trace(p + q) = trace(p) = rank(p) mod 2 = n mod 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityAudit {
    pub alpha: usize,
    pub eq1_holds: bool,
    pub trace_sum: bool,
    pub trace_p: bool,
    pub rank_p_parity: bool,
    pub trace_q: bool,
}

impl ParityAudit {
    /// `eq1_holds` implies `alpha` even.
    pub fn consistent(&self) -> bool {
        (!self.eq1_holds || self.alpha.is_multiple_of(2))
            && self.trace_p == self.rank_p_parity
            && !self.trace_q
            && self.trace_sum == (self.trace_p ^ self.trace_q)
    }
}

pub fn parity_audit(p: &Gf2Matrix, q: &Gf2Matrix) -> Result<ParityAudit, SearchError> {
    if p.dim() != q.dim() {
        return Err(SearchError::InvalidPair("dimension mismatch"));
    }
    if !p.is_idempotent() {
        return Err(SearchError::InvalidPair("p is not idempotent"));
    }
    if !q.is_nilpotent_index(3) {
        return Err(SearchError::InvalidPair("q^3 is nonzero"));
    }
    let rank = p.rank();
    Ok(ParityAudit {
        alpha: p.dim() - rank,
        eq1_holds: derive_eq1().evaluate(p, q)?.is_identity(),
        trace_sum: p.add_unchecked(q).trace(),
        trace_p: p.trace(),
        rank_p_parity: rank % 2 == 1,
        trace_q: q.trace(),
    })
}

#[derive(Clone, Debug)]
pub struct SurveyRow {
    pub class: SimilarityClass,
    pub report: SearchReport,
}

impl SurveyRow {
    pub fn decomposable(&self) -> bool {
        self.report.status == SearchStatus::Found
    }
}

/// Runs [`decompose`] on the Frobenius representative of every similarity
/// class of `M_n(F_2)`. Decomposability is a similarity invariant, so the
/// table classifies the whole matrix ring.
pub fn survey(n: usize, k: u32, strategy: Strategy, opts: &SearchOptions) -> Result<Vec<SurveyRow>, SearchError> {
    enumerate_similarity_classes(n)
        .into_iter()
        .map(|class| {
            let report = decompose(&class.representative, k, strategy, opts)?;
            Ok(SurveyRow { class, report })
        })
        .collect()
}
