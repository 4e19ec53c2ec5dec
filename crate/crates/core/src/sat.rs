//! CNF encoding of "A = P + Q with P^2 = P and Q^k = 0", DIMACS I/O, and a
//! small complete DPLL solver used as a test oracle.
//!
//! The only primary variables are the entries `p_ij` of `P` (numbered
//! row-major from 1). Entries of `Q` are the literals `a_ij XOR p_ij`, i.e.
//! `p_ij` or its negation. Every product of literals gets one Tseitin AND
//! variable, and every parity constraint is cut into 3-input XOR gadgets. All
//! auxiliary variables are fully defined by the primaries, so models of the
//! instance correspond one-to-one to idempotents `P` with `(A + P)^k = 0`.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::SatError;
use crate::matrix::Gf2Matrix;
use crate::report::Decomposition;

pub type Lit = i32;

/// Target matrix and index an instance was encoded from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfMeta {
    pub n: usize,
    pub k: u32,
    pub target: Gf2Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CnfInstance {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
    /// `(i, j, var)` with 1-based matrix coordinates.
    pub varmap: Vec<(usize, usize, u32)>,
    pub meta: Option<CnfMeta>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    /// `values[v - 1]` is the value of variable `v`.
    pub values: Vec<bool>,
}

impl Assignment {
    pub fn value(&self, lit: Lit) -> bool {
        let v = self.values[lit.unsigned_abs() as usize - 1];
        if lit > 0 {
            v
        } else {
            !v
        }
    }
}

struct Encoder {
    num_vars: u32,
    clauses: Vec<Vec<Lit>>,
    and_cache: HashMap<Vec<Lit>, Lit>,
}

impl Encoder {
    fn fresh(&mut self) -> Lit {
        self.num_vars += 1;
        self.num_vars as Lit
    }

    /// Literal equivalent to the conjunction, or `None` if it is constantly false.
    fn and(&mut self, lits: &[Lit]) -> Option<Lit> {
        let mut key = lits.to_vec();
        key.sort_unstable();
        key.dedup();
        if key.iter().any(|l| key.binary_search(&-l).is_ok()) {
            return None;
        }
        if key.len() == 1 {
            return Some(key[0]);
        }
        if let Some(&y) = self.and_cache.get(&key) {
            return Some(y);
        }
        let y = self.fresh();
        for &l in &key {
            self.clauses.push(vec![-y, l]);
        }
        let mut big = vec![y];
        big.extend(key.iter().map(|l| -l));
        self.clauses.push(big);
        self.and_cache.insert(key, y);
        Some(y)
    }

    /// Constrains the XOR of `terms` to equal `rhs`.
    fn xor_eq(&mut self, terms: &[Lit], mut rhs: bool) {
        let mut vars: Vec<Lit> = Vec::with_capacity(terms.len());
        for &t in terms {
            if t < 0 {
                rhs = !rhs;
            }
            vars.push(t.abs());
        }
        vars.sort_unstable();
        // x XOR x = 0
        let mut reduced: Vec<Lit> = Vec::with_capacity(vars.len());
        for v in vars {
            if reduced.last() == Some(&v) {
                reduced.pop();
            } else {
                reduced.push(v);
            }
        }
        match reduced.as_slice() {
            [] => {
                if rhs {
                    self.clauses.push(Vec::new());
                }
            }
            [x] => self.clauses.push(vec![if rhs { *x } else { -x }]),
            [first, middle @ .., last] => {
                let mut acc = *first;
                for &x in middle {
                    let t = self.fresh();
                    // t XOR acc XOR x = 0
                    self.clauses.push(vec![-t, acc, x]);
                    self.clauses.push(vec![t, -acc, x]);
                    self.clauses.push(vec![t, acc, -x]);
                    self.clauses.push(vec![-t, -acc, -x]);
                    acc = t;
                }
                let x = *last;
                if rhs {
                    self.clauses.push(vec![acc, x]);
                    self.clauses.push(vec![-acc, -x]);
                } else {
                    self.clauses.push(vec![-acc, x]);
                    self.clauses.push(vec![acc, -x]);
                }
            }
        }
    }
}

/// Encodes the existence of an idempotent `P` with `(a + P)^k = 0`.
pub fn encode(a: &Gf2Matrix, k: u32) -> CnfInstance {
    assert!(k >= 1, "nilpotency index must be at least 1");
    let n = a.dim();
    let p = |i: usize, j: usize| (1 + i * n + j) as Lit;
    let q = |i: usize, j: usize| if a.get(i, j) { -p(i, j) } else { p(i, j) };
    let mut enc = Encoder { num_vars: (n * n) as u32, clauses: Vec::new(), and_cache: HashMap::new() };

    // P^2 = P
    for i in 0..n {
        for j in 0..n {
            let mut terms: Vec<Lit> = (0..n).filter_map(|l| enc.and(&[p(i, l), p(l, j)])).collect();
            terms.push(p(i, j));
            enc.xor_eq(&terms, false);
        }
    }

    // (A + P)^k = 0: sum over all index paths i -> l_1 -> ... -> l_{k-1} -> j
    let inner = (k - 1) as usize;
    let paths = n.pow(inner as u32);
    let mut path = vec![0usize; inner];
    for i in 0..n {
        for j in 0..n {
            let mut terms = Vec::with_capacity(paths);
            for code in 0..paths {
                let mut c = code;
                for slot in path.iter_mut().rev() {
                    *slot = c % n;
                    c /= n;
                }
                let mut lits = Vec::with_capacity(k as usize);
                let mut from = i;
                for &to in path.iter().chain(std::iter::once(&j)) {
                    lits.push(q(from, to));
                    from = to;
                }
                if let Some(t) = enc.and(&lits) {
                    terms.push(t);
                }
            }
            enc.xor_eq(&terms, false);
        }
    }

    let varmap = (0..n).flat_map(|i| (0..n).map(move |j| (i + 1, j + 1, (1 + i * n + j) as u32))).collect();
    CnfInstance {
        num_vars: enc.num_vars as usize,
        clauses: enc.clauses,
        varmap,
        meta: Some(CnfMeta { n, k, target: a.clone() }),
    }
}

impl CnfInstance {
    /// Whether every clause has a true literal under `s`.
    pub fn check(&self, s: &Assignment) -> Result<(), SatError> {
        if s.values.len() != self.num_vars {
            return Err(SatError::AssignmentLength { expected: self.num_vars, found: s.values.len() });
        }
        match self.clauses.iter().position(|c| !c.iter().any(|&l| s.value(l))) {
            Some(idx) => Err(SatError::Unsatisfied(idx)),
            None => Ok(()),
        }
    }

    /// DIMACS text. Metadata and the variable map go in comment lines before
    /// the header.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        if let Some(meta) = &self.meta {
            let _ = writeln!(out, "c nilclean n {} k {}", meta.n, meta.k);
            for row in meta.target.to_text().lines().skip(1) {
                let _ = writeln!(out, "c target {row}");
            }
        }
        for &(i, j, v) in &self.varmap {
            let _ = writeln!(out, "c varmap p {i} {j} {v}");
        }
        let _ = writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for l in clause {
                let _ = write!(out, "{l} ");
            }
            out.push_str("0\n");
        }
        out
    }

    pub fn parse_dimacs(text: &str) -> Result<Self, SatError> {
        let err = |line: usize, msg: &str| SatError::Dimacs { line, msg: msg.to_string() };
        let mut inst = CnfInstance::default();
        let mut meta_nk: Option<(usize, u32)> = None;
        let mut target_rows: Vec<String> = Vec::new();
        let mut header: Option<(usize, usize)> = None;
        let mut current: Vec<Lit> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('c') {
                let fields: Vec<&str> = rest.split_whitespace().collect();
                match fields.as_slice() {
                    ["varmap", "p", i, j, v] => {
                        let parse = |s: &str| s.parse::<usize>().map_err(|_| err(lineno, "bad varmap entry"));
                        inst.varmap.push((parse(i)?, parse(j)?, parse(v)? as u32));
                    }
                    ["nilclean", "n", n, "k", k] => {
                        let n = n.parse().map_err(|_| err(lineno, "bad n"))?;
                        let k = k.parse().map_err(|_| err(lineno, "bad k"))?;
                        meta_nk = Some((n, k));
                    }
                    ["target", row] => target_rows.push(row.to_string()),
                    _ => {}
                }
                continue;
            }
            if let Some(rest) = line.strip_prefix("p ") {
                let fields: Vec<&str> = rest.split_whitespace().collect();
                let ["cnf", v, c] = fields.as_slice() else {
                    return Err(err(lineno, "malformed header"));
                };
                let v = v.parse().map_err(|_| err(lineno, "bad variable count"))?;
                let c = c.parse().map_err(|_| err(lineno, "bad clause count"))?;
                header = Some((v, c));
                continue;
            }
            let Some((num_vars, _)) = header else {
                return Err(err(lineno, "clause before header"));
            };
            for tok in line.split_whitespace() {
                let l: Lit = tok.parse().map_err(|_| err(lineno, "bad literal"))?;
                if l == 0 {
                    inst.clauses.push(std::mem::take(&mut current));
                } else if l.unsigned_abs() as usize > num_vars {
                    return Err(err(lineno, "literal out of range"));
                } else {
                    current.push(l);
                }
            }
        }
        let (num_vars, num_clauses) = header.ok_or_else(|| err(0, "missing header"))?;
        if !current.is_empty() {
            return Err(err(0, "unterminated clause"));
        }
        if inst.clauses.len() != num_clauses {
            return Err(err(0, "clause count does not match header"));
        }
        inst.num_vars = num_vars;
        if let Some((n, k)) = meta_nk {
            let rows: Vec<&str> = target_rows.iter().map(String::as_str).collect();
            let target = Gf2Matrix::from_row_strs(&rows)?;
            if target.dim() != n {
                return Err(err(0, "target size does not match metadata"));
            }
            inst.meta = Some(CnfMeta { n, k, target });
        }
        Ok(inst)
    }

    /// Reads `P` off the variable map and returns the verified decomposition.
    pub fn decode_and_verify(&self, s: &Assignment) -> Result<Decomposition, SatError> {
        self.check(s)?;
        let meta = self.meta.as_ref().ok_or(SatError::MissingMetadata)?;
        let mut p = Gf2Matrix::zero(meta.n);
        for &(i, j, v) in &self.varmap {
            p.set(i - 1, j - 1, s.values[v as usize - 1]);
        }
        let q = meta.target.add(&p)?;
        Decomposition::new(p, q, meta.k, meta.target.clone()).map_err(|e| SatError::EncoderBug(e.to_string()))
    }
}

/// What an external solver reported.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolverAnswer {
    Sat(Assignment),
    Unsat,
    Unknown,
}

/// Parses competition-style output (`s SATISFIABLE` plus `v` lines) as well
/// as the MiniSat result-file form (`SAT` followed by a literal line).
/// Variables not mentioned default to false.
pub fn parse_solver_output(text: &str, num_vars: usize) -> Result<SolverAnswer, SatError> {
    let mut status: Option<&str> = None;
    let mut values = vec![false; num_vars];
    let mut saw_values = false;
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let (kind, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r),
            None => (line, ""),
        };
        match kind {
            "s" => status = Some(rest.trim()),
            "SAT" | "UNSAT" | "INDET" | "SATISFIABLE" | "UNSATISFIABLE" | "UNKNOWN" if rest.is_empty() => {
                status = Some(kind)
            }
            _ => {
                let lits = if kind == "v" { rest } else { line };
                for tok in lits.split_whitespace() {
                    let l: Lit =
                        tok.parse().map_err(|_| SatError::SolverOutput(format!("unexpected token {tok:?}")))?;
                    if l == 0 {
                        continue;
                    }
                    let v = l.unsigned_abs() as usize;
                    if v > num_vars {
                        return Err(SatError::SolverOutput(format!("variable {v} out of range")));
                    }
                    values[v - 1] = l > 0;
                    saw_values = true;
                }
            }
        }
    }
    match status {
        Some("SATISFIABLE") | Some("SAT") => Ok(SolverAnswer::Sat(Assignment { values })),
        Some("UNSATISFIABLE") | Some("UNSAT") => Ok(SolverAnswer::Unsat),
        Some("UNKNOWN") | Some("INDET") => Ok(SolverAnswer::Unknown),
        Some(other) => Err(SatError::SolverOutput(format!("unknown status {other:?}"))),
        None if saw_values => Ok(SolverAnswer::Sat(Assignment { values })),
        None => Err(SatError::SolverOutput("no status line".into())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMode {
    FirstSolution,
    CountAll,
    ProveUnsat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    Sat(Assignment),
    Unsat,
    Count(u128),
    /// The decision budget ran out.
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOutcome {
    pub result: SolveResult,
    pub decisions: u64,
}

const UNASSIGNED: i8 = 0;

#[inline]
fn code(l: Lit) -> usize {
    2 * (l.unsigned_abs() as usize - 1) + usize::from(l < 0)
}

struct Dpll {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    values: Vec<i8>,
    trail: Vec<Lit>,
    head: usize,
}

impl Dpll {
    fn value(&self, l: Lit) -> i8 {
        let v = self.values[l.unsigned_abs() as usize - 1];
        if l > 0 {
            v
        } else {
            -v
        }
    }

    fn enqueue(&mut self, l: Lit) {
        self.values[l.unsigned_abs() as usize - 1] = if l > 0 { 1 } else { -1 };
        self.trail.push(l);
    }

    fn undo_to(&mut self, len: usize) {
        for l in self.trail.drain(len..) {
            self.values[l.unsigned_abs() as usize - 1] = UNASSIGNED;
        }
        self.head = self.head.min(len);
    }

    /// Two-watched-literal unit propagation. Returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.head < self.trail.len() {
            let false_lit = -self.trail[self.head];
            self.head += 1;
            let watchers = std::mem::take(&mut self.watches[code(false_lit)]);
            let mut keep = Vec::with_capacity(watchers.len());
            let mut conflict = false;
            for (pos, &ci) in watchers.iter().enumerate() {
                if conflict {
                    keep.extend_from_slice(&watchers[pos..]);
                    break;
                }
                let clause = &mut self.clauses[ci];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                if self.value(first) == 1 {
                    keep.push(ci);
                    continue;
                }
                let clause = &self.clauses[ci];
                if let Some(k) = (2..clause.len()).find(|&k| self.value(clause[k]) != -1) {
                    let clause = &mut self.clauses[ci];
                    clause.swap(1, k);
                    let w = clause[1];
                    self.watches[code(w)].push(ci);
                    continue;
                }
                keep.push(ci);
                match self.value(first) {
                    -1 => conflict = true,
                    _ => self.enqueue(first),
                }
            }
            self.watches[code(false_lit)] = keep;
            if conflict {
                return false;
            }
        }
        true
    }

    fn model(&self) -> Assignment {
        Assignment { values: self.values.iter().map(|&v| v == 1).collect() }
    }
}

/// Sorts literals within clauses and clauses within the instance, and drops
/// duplicate literals, duplicate clauses, and tautologies.
fn canonical_clauses(clauses: &[Vec<Lit>]) -> Vec<Vec<Lit>> {
    let mut out: Vec<Vec<Lit>> = clauses
        .iter()
        .filter_map(|c| {
            let mut c = c.clone();
            c.sort_unstable_by_key(|l| (l.abs(), *l));
            c.dedup();
            (!c.windows(2).any(|w| w[0] == -w[1])).then_some(c)
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Complete DPLL search with unit propagation.
///
/// Branching always picks the lowest-index unassigned variable and tries
/// false first, so the first model found is the lexicographically smallest
/// one. `budget` caps the number of decisions.
pub fn dpll_solve(c: &CnfInstance, mode: SolveMode, budget: Option<u64>) -> SolveOutcome {
    let clauses = canonical_clauses(&c.clauses);
    let mut s = Dpll {
        num_vars: c.num_vars,
        clauses: Vec::new(),
        watches: vec![Vec::new(); 2 * c.num_vars],
        values: vec![UNASSIGNED; c.num_vars],
        trail: Vec::new(),
        head: 0,
    };
    let none = |decisions| SolveOutcome {
        result: if mode == SolveMode::CountAll { SolveResult::Count(0) } else { SolveResult::Unsat },
        decisions,
    };
    let mut units = Vec::new();
    for clause in clauses {
        match clause.len() {
            0 => return none(0),
            1 => units.push(clause[0]),
            _ => {
                let ci = s.clauses.len();
                s.watches[code(clause[0])].push(ci);
                s.watches[code(clause[1])].push(ci);
                s.clauses.push(clause);
            }
        }
    }
    for u in units {
        match s.value(u) {
            -1 => return none(0),
            0 => s.enqueue(u),
            _ => {}
        }
    }

    // (trail length before the decision, decision literal, already flipped)
    let mut decisions: Vec<(usize, Lit, bool)> = Vec::new();
    let mut count: u128 = 0;
    let mut steps: u64 = 0;
    let mut next_free = 0usize;

    loop {
        let ok = s.propagate();
        let backtrack = if !ok {
            true
        } else {
            while next_free < s.num_vars && s.values[next_free] != UNASSIGNED {
                next_free += 1;
            }
            if next_free == s.num_vars {
                match mode {
                    SolveMode::FirstSolution | SolveMode::ProveUnsat => {
                        return SolveOutcome { result: SolveResult::Sat(s.model()), decisions: steps };
                    }
                    SolveMode::CountAll => {
                        count += 1;
                        true
                    }
                }
            } else {
                if budget.is_some_and(|b| steps >= b) {
                    return SolveOutcome { result: SolveResult::Unknown, decisions: steps };
                }
                steps += 1;
                let l = -((next_free + 1) as Lit);
                decisions.push((s.trail.len(), l, false));
                s.enqueue(l);
                false
            }
        };
        if backtrack {
            loop {
                let Some((len, l, flipped)) = decisions.pop() else {
                    let result = match mode {
                        SolveMode::CountAll => SolveResult::Count(count),
                        _ => SolveResult::Unsat,
                    };
                    return SolveOutcome { result, decisions: steps };
                };
                s.undo_to(len);
                next_free = next_free.min(l.unsigned_abs() as usize - 1);
                if !flipped {
                    decisions.push((len, -l, true));
                    s.enqueue(-l);
                    break;
                }
            }
        }
    }
}
