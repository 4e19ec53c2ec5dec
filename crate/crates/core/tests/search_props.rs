mod common;

use std::collections::BTreeSet;

use common::*;
use nilclean::search::{canonical_projector, decompose_sat};
use nilclean::{
    block_identity_check, decompose, frobenius_form, idempotent_count_formula, iter_idempotents, parity_audit, survey,
    Gf2Matrix, SearchOptions, SearchReport, SearchStatus, Strategy,
};
use rand::Rng;

fn key(m: &Gf2Matrix) -> Vec<u64> {
    m.rows().to_vec()
}

/// Row-major bit string with entry (1,1) first.
fn lex_key(d: &Dense) -> Vec<u8> {
    d.iter().flatten().copied().collect()
}

/// Smallest witness in row-major order, by scanning all idempotents.
fn naive_min_witness(a: &Gf2Matrix, k: usize, idempotents: &[Dense]) -> Option<Gf2Matrix> {
    let da = dense(a);
    idempotents.iter().filter(|p| is_zero(&naive_pow(&naive_add(&da, p), k))).min_by_key(|p| lex_key(p)).map(to_matrix)
}

fn opts() -> SearchOptions {
    SearchOptions::default()
}

#[test]
fn stratified_matches_brute_set() {
    for n in 1..=4 {
        let brute: BTreeSet<Vec<u64>> = brute_idempotents(n).iter().map(|d| key(&to_matrix(d))).collect();
        let listed: Vec<Vec<u64>> = iter_idempotents(n, Strategy::Stratified).unwrap().map(|p| key(&p)).collect();
        let strat: BTreeSet<Vec<u64>> = listed.iter().cloned().collect();
        assert_eq!(listed.len(), strat.len(), "duplicates at n = {n}");
        assert_eq!(strat, brute, "n = {n}");
        assert_eq!(idempotent_count_formula(n), Some(brute.len() as u128));
        let via_brute: BTreeSet<Vec<u64>> = iter_idempotents(n, Strategy::Brute).unwrap().map(|p| key(&p)).collect();
        assert_eq!(via_brute, brute);
    }
}

#[test]
fn stratified_counts_beyond_brute_range() {
    // sum over r of [n choose r]_2 * 2^{r(n-r)}, worked by hand
    for n in 5..=6 {
        let count = iter_idempotents(n, Strategy::Stratified).unwrap().count() as u128;
        assert_eq!(Some(count), idempotent_count_formula(n));
    }
    assert_eq!(idempotent_count_formula(5), Some(20834));
    assert_eq!(idempotent_count_formula(6), Some(1051586));
    let sample: Vec<Gf2Matrix> = iter_idempotents(6, Strategy::Stratified).unwrap().step_by(997).collect();
    assert!(sample.iter().all(Gf2Matrix::is_idempotent));
}

#[test]
fn c_has_no_index_three_decomposition_by_naive_scan() {
    let c = Gf2Matrix::matrix_c();
    let idem = brute_idempotents(4);
    assert_eq!(idem.len(), 802);
    assert_eq!(brute_decomposition_count(&c, 3, &idem), 0);
    assert!(brute_decomposition_count(&c, 4, &idem) > 0);
    for strategy in [Strategy::Brute, Strategy::Stratified, Strategy::Sat] {
        let report = decompose(&c, 3, strategy, &opts()).unwrap();
        assert_eq!(report.status, SearchStatus::ExhaustedNone, "{strategy}");
        assert!(report.witness.is_none());
    }
    assert_eq!(decompose(&c, 3, Strategy::Stratified, &opts()).unwrap().space_size, 802);
}

#[test]
fn c_index_four_witness_is_frozen() {
    let c = Gf2Matrix::matrix_c();
    let expected = Gf2Matrix::from_row_strs(&["0000", "0000", "0000", "0011"]).unwrap();
    assert_eq!(naive_min_witness(&c, 4, &brute_idempotents(4)), Some(expected.clone()));
    for strategy in [Strategy::Brute, Strategy::Stratified, Strategy::Sat] {
        let report = decompose(&c, 4, strategy, &opts()).unwrap();
        assert_eq!(report.status, SearchStatus::Found);
        let w = report.witness.unwrap();
        assert!(w.verify());
        assert_eq!(w.p, expected, "{strategy}");
        assert_eq!(w.q, c.add(&expected).unwrap());
    }
}

#[test]
fn all_small_matrices_agree_with_naive_oracle() {
    for n in 1..=3usize {
        let idem = brute_idempotents(n);
        for code in 0..1u64 << (n * n) {
            let a = Gf2Matrix::from_index(n, code);
            for k in 1..=3u32 {
                let expect = naive_min_witness(&a, k as usize, &idem);
                for strategy in [Strategy::Brute, Strategy::Stratified, Strategy::Sat] {
                    let report = decompose(&a, k, strategy, &opts()).unwrap();
                    let got = report.witness.as_ref().map(|w| w.p.clone());
                    assert_eq!(got, expect, "{strategy} n = {n} code = {code} k = {k}");
                    if let Some(w) = &report.witness {
                        assert!(w.verify());
                    }
                }
            }
        }
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let mut r = rng(67);
    let mut targets = vec![Gf2Matrix::matrix_c(), Gf2Matrix::identity(5)];
    targets.extend((0..6).map(|_| random_matrix(&mut r, 5)));
    for a in &targets {
        for k in [2, 3, 4] {
            let reports: Vec<SearchReport> = [Some(1), Some(4), None]
                .into_iter()
                .map(|workers| {
                    decompose(a, k, Strategy::Stratified, &SearchOptions { workers, sat_budget: None }).unwrap()
                })
                .collect();
            assert_eq!(reports[0], reports[1]);
            assert_eq!(reports[0], reports[2]);
            assert_eq!(reports[0].to_json(), reports[2].to_json());
        }
    }
}

#[test]
fn status_is_a_similarity_invariant() {
    for n in 1..=3usize {
        for code in 0..1u64 << (n * n) {
            let a = Gf2Matrix::from_index(n, code);
            let f = frobenius_form(&a);
            for k in 1..=3 {
                let sa = decompose(&a, k, Strategy::Stratified, &opts()).unwrap().status;
                let sf = decompose(&f, k, Strategy::Stratified, &opts()).unwrap().status;
                assert_eq!(sa, sf, "code {code} k {k}");
            }
        }
    }
    let mut r = rng(71);
    for _ in 0..60 {
        let a = random_matrix(&mut r, 4);
        let b = Gf2Matrix::conjugate(&random_invertible(&mut r, 4), &a).unwrap();
        for k in 2..=3 {
            let sa = decompose(&a, k, Strategy::Stratified, &opts()).unwrap().status;
            let sb = decompose(&b, k, Strategy::Stratified, &opts()).unwrap().status;
            assert_eq!(sa, sb);
        }
    }
}

#[test]
fn survey_four_matches_naive_scan() {
    let idem = brute_idempotents(4);
    for k in [3u32, 4] {
        let rows = survey(4, k, Strategy::Stratified, &opts()).unwrap();
        assert_eq!(rows.len(), 34);
        for row in &rows {
            let expect = brute_decomposition_count(&row.class.representative, k as usize, &idem) > 0;
            assert_eq!(row.decomposable(), expect, "{} k = {k}", row.class.chain_string());
        }
        let missing: Vec<String> = rows.iter().filter(|r| !r.decomposable()).map(|r| r.class.chain_string()).collect();
        if k == 4 {
            assert!(missing.is_empty(), "{missing:?}");
        } else {
            assert!(missing.contains(&"10011".to_string()), "{missing:?}");
        }
    }
}

#[test]
fn block_identity_holds_for_arbitrary_q() {
    let mut r = rng(73);
    for _ in 0..2000 {
        let n = r.gen_range(1..=9);
        let rank = r.gen_range(0..=n);
        let q = random_matrix(&mut r, n);
        let check = block_identity_check(rank, &q).unwrap();
        assert!(check.equal, "r = {rank}, q = {q:?}");
        assert_eq!(check.lhs.dim(), n - rank);
    }
    assert!(block_identity_check(5, &Gf2Matrix::zero(4)).is_err());
    assert_eq!(canonical_projector(2, 1).rank(), 2);
}

#[test]
fn parity_audit_on_c_translates() {
    let c = Gf2Matrix::matrix_c();
    let mut valid = 0;
    for p in iter_idempotents(4, Strategy::Stratified).unwrap() {
        let q = c.add(&p).unwrap();
        if let Ok(audit) = parity_audit(&p, &q) {
            valid += 1;
            assert!(audit.consistent());
        }
    }
    assert_eq!(valid, 0);
}

#[test]
fn parity_audit_is_consistent_on_random_pairs() {
    let mut r = rng(79);
    for _ in 0..3000 {
        let n = r.gen_range(1..=6);
        let p = random_idempotent(&mut r, n);
        let q = random_nilpotent_index(&mut r, n, 3);
        let audit = parity_audit(&p, &q).unwrap();
        assert!(audit.consistent(), "{audit:?}");
    }
    assert!(parity_audit(&Gf2Matrix::matrix_c(), &Gf2Matrix::zero(4)).is_err());
}

#[test]
fn sat_route_reports_instance() {
    let c = Gf2Matrix::matrix_c();
    let (report, cnf) = decompose_sat(&c, 3, None);
    assert_eq!(report.status, SearchStatus::ExhaustedNone);
    assert_eq!(cnf.varmap.len(), 16);
    let (report, _) = decompose_sat(&Gf2Matrix::matrix_c(), 4, Some(1));
    assert!(matches!(report.status, SearchStatus::Found | SearchStatus::Exported));
}

#[test]
fn errors_for_bad_input() {
    assert!(decompose(&Gf2Matrix::identity(2), 0, Strategy::Brute, &opts()).is_err());
    assert!(decompose(&Gf2Matrix::identity(5), 2, Strategy::Brute, &opts()).is_err());
    assert!(iter_idempotents(11, Strategy::Stratified).is_err());
    assert!(iter_idempotents(3, Strategy::Sat).is_err());
}
