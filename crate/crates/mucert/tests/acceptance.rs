//! Acceptance gate: one pass/fail line per criterion.
//!
//! Run with: cargo test --test acceptance -- --nocapture

use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mucert::autstruct::{
    module_route_grid_check, odd_unitary_type, polarized_filtration, polarized_structure,
    restriction_surjectivity_check,
};
use mucert::certify::{abvar_bound, certify_pel, Orbit, PELDatum};
use mucert::dieudonne::{DieudonneModule, SemilinearMap};
use mucert::field::{Fq, WittRing};
use mucert::homs::{end_ring_check, group_hom_count_log_p, predict_hom};
use mucert::mainexample::{group_suite, main_example, submodule_census, TestAlgebra, UnipotentModel};

const BUDGET: u64 = 2_000_000;

/// Run a criterion body, print its pass/fail line, and enforce the stated
/// runtime budget.
fn gate(name: &str, budget_ms: u128, body: impl FnOnce() -> Result<String, String>) {
    let started = Instant::now();
    let result = body();
    let elapsed = started.elapsed().as_millis();
    match result {
        Ok(detail) => {
            if elapsed > budget_ms {
                println!("{name}: FAIL — exceeded the {budget_ms} ms budget ({elapsed} ms)");
                panic!("{name} exceeded its runtime budget: {elapsed} ms > {budget_ms} ms");
            }
            println!("{name}: PASS — {detail} [{elapsed} ms]");
        }
        Err(msg) => {
            println!("{name}: FAIL — {msg} [{elapsed} ms]");
            panic!("{name} failed: {msg}");
        }
    }
}

fn ensure(cond: bool, msg: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

fn lib<T>(r: mucert::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn all_slope_functions(e: usize) -> Vec<Vec<u8>> {
    (0..(1u32 << e))
        .map(|code| (0..e).map(|i| ((code >> i) & 1) as u8).collect())
        .collect()
}

#[test]
fn criterion_1_end_ring_law() {
    gate("criterion 1 (end-ring law)", 30_000, || {
        let mut cases = 0u32;
        for p in [3u64, 5] {
            for e in 1..=3u32 {
                for n in 1..=2u32 {
                    let ring = lib(WittRing::new(lib(Fq::new(p, e))?, n))?;
                    for f in all_slope_functions(e as usize) {
                        let md = lib(DieudonneModule::basic(&ring, &f))?;
                        let rep = lib(end_ring_check(&md, BUDGET))?;
                        ensure(
                            rep.matches_witt_ring
                                && rep.commutative
                                && rep.closed_under_composition
                                && rep.contains_witt_ring_of_kappa,
                            &format!("End(X({f:?})_{n}) over F_{} is not W_{n}(kappa)", ring.fq().q()),
                        )?;
                        ensure(
                            rep.count_log_p == n * e,
                            &format!("count is p^{} instead of p^{}", rep.count_log_p, n * e),
                        )?;
                        // additive exponent p^n: p^(n-1) . id is still nonzero
                        let id = SemilinearMap::identity(&ring, md.rank);
                        let pn1 = id.scalar_int(&ring, p.pow(n - 1));
                        ensure(
                            pn1.mat.iter().any(|row| row.iter().any(|w| !ring.is_zero(w))),
                            "additive exponent is smaller than p^n",
                        )?;
                        cases += 1;
                    }
                }
            }
        }
        Ok(format!(
            "{cases} end rings over p in {{3,5}}, e <= 3, n <= 2 equal W_n(kappa), \
             commutative of additive exponent p^n, order p^(n e)"
        ))
    });
}

#[test]
fn criterion_2_hom_vanishing() {
    gate("criterion 2 (hom vanishing)", 30_000, || {
        let p = 3u64;
        let n = 1u32;
        let mut pairs = 0u32;
        for e in 1..=3u32 {
            let ring = lib(WittRing::new(lib(Fq::new(p, e))?, n))?;
            let ring_big = lib(WittRing::new(lib(Fq::new(p, 2 * e))?, n))?;
            let fs = all_slope_functions(e as usize);
            for f1 in &fs {
                for f2 in &fs {
                    let pred = lib(predict_hom(f1, f2, n))?;
                    if !pred.comparable {
                        continue;
                    }
                    let expected = if f1 == f2 { e } else { 0 };
                    ensure(
                        pred.rational_points_log_p == Some(expected),
                        "closed form disagrees with the f'-calculus",
                    )?;
                    let g1 = lib(DieudonneModule::basic(&ring, f1))?;
                    let g2 = lib(DieudonneModule::basic(&ring, f2))?;
                    ensure(
                        lib(group_hom_count_log_p(&g1, &g2))? == expected,
                        &format!("oracle count over F_{} is off for {f1:?} -> {f2:?}", ring.fq().q()),
                    )?;
                    let b1 = lib(DieudonneModule::basic(&ring_big, f1))?;
                    let b2 = lib(DieudonneModule::basic(&ring_big, f2))?;
                    ensure(
                        lib(group_hom_count_log_p(&b1, &b2))? == expected,
                        "hom count moved under a field extension",
                    )?;
                    pairs += 1;
                }
            }
        }
        Ok(format!(
            "{pairs} comparable pairs over e <= 3: count 1 for f1 != f2, p^e for f1 = f2, \
             stable under one field extension"
        ))
    });
}

#[test]
fn criterion_3_tangent_anchors() {
    gate("criterion 3 (tangent anchors)", 1_000, || {
        let ring = lib(WittRing::new(lib(Fq::new(3, 1))?, 1))?;
        let mu_p = lib(DieudonneModule::basic(&ring, &[1]))?;
        let z_p = lib(DieudonneModule::basic(&ring, &[0]))?;
        let alpha_p = lib(DieudonneModule::alpha_p(&ring))?;
        let ring2 = lib(WittRing::new(lib(Fq::new(3, 2))?, 1))?;
        let e0 = lib(DieudonneModule::basic_ungraded(&ring2, &[0, 1]))?;
        ensure(mu_p.tangent_dim() == 1 && mu_p.is_multiplicative(), "t(mu_p) != 1")?;
        ensure(z_p.tangent_dim() == 0 && z_p.is_etale(), "t(Z/p) != 0")?;
        ensure(alpha_p.tangent_dim() == 1, "t(alpha_p) != 1")?;
        ensure(e0.tangent_dim() == 1, "t(E_0) != 1")?;
        Ok("t(mu_p) = 1, t(Z/p) = 0, t(alpha_p) = 1, t(E_0) = 1".into())
    });
}

#[test]
fn criterion_4_odd_unitary_structure() {
    gate("criterion 4 (odd unitary structure)", 10_000, || {
        let ring = lib(WittRing::new(lib(Fq::new(3, 2))?, 1))?;
        for delta in 1..=3u32 {
            let (ff, d) = odd_unitary_type(delta);
            let pol = lib(polarized_structure(&ff, d, 1))?;
            ensure(
                pol.multiplicative_rank == delta * delta,
                &format!("H-part rank of G(ff)_1 at delta {delta} is not delta^2"),
            )?;
            ensure(
                pol.tangent == delta * delta + delta,
                &format!("t(G(ff)_1) at delta {delta} is not delta^2 + delta"),
            )?;
            ensure(
                pol.tangent - pol.multiplicative_rank == delta,
                &format!("quotient tangent at delta {delta} is not delta"),
            )?;
            let filt = lib(polarized_filtration(&ff, d, 1, 3))?;
            ensure(
                filt.total_tangent == pol.tangent
                    && filt.total_order_exponent == pol.order_exponent,
                &format!("filtration totals disagree at delta {delta}"),
            )?;
            lib(module_route_grid_check(&ring, &ff, d))?;
        }
        Ok("delta in {1,2,3}: H-rank delta^2, quotient tangent delta, \
            t = delta^2 + delta, filtration and module route agree"
            .into())
    });
}

#[test]
fn criterion_5_group_law_suite() {
    gate("criterion 5 (group-law suite)", 120_000, || {
        let report = lib(group_suite(1, BUDGET))?;
        ensure(report.p == 3 && report.q == 9, "the example lives over F_9")?;
        ensure(
            report.asymmetry_witness_found,
            "no non-symmetry witness for the hermitian pairing",
        )?;
        ensure(
            report.sigma_section_is_group_hom_on_frobenius_kernel,
            "sigma is not multiplicative on Frobenius-kernel points",
        )?;
        for counts in &report.algebra_counts {
            ensure(
                counts.group_points == counts.group_points_formula,
                &format!("count mismatch over {}", counts.label),
            )?;
        }
        // group axioms on honest points over the four test algebras
        let ex = lib(main_example())?;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut full_ops = 0u64;
        let mut sampled_ops = 0u64;
        for dim in 1..=4usize {
            let alg = lib(TestAlgebra::jet(&ex.fq, dim))?;
            let model = lib(UnipotentModel::new(ex, alg.clone(), 1))?;
            let pts = lib(model.enumerate(BUDGET))?;
            let id = model.identity();
            for g in &pts {
                ensure(model.in_group(g), "enumerated point misses the group")?;
                ensure(
                    model.mul(g, &id) == *g && model.mul(&id, g) == *g,
                    "identity law fails",
                )?;
                let gi = model.inv(g);
                ensure(model.in_group(&gi), "inverse leaves the group")?;
                ensure(
                    model.mul(g, &gi) == id && model.mul(&gi, g) == id,
                    "inverse law fails",
                )?;
                full_ops += 4;
            }
            if pts.len() <= 100 {
                // closure on all pairs and associativity on all triples
                for g in &pts {
                    for h in &pts {
                        ensure(model.in_group(&model.mul(g, h)), "closure fails")?;
                        full_ops += 1;
                        for k in &pts {
                            ensure(
                                model.mul(&model.mul(g, h), k) == model.mul(g, &model.mul(h, k)),
                                "associativity fails",
                            )?;
                            full_ops += 2;
                        }
                    }
                }
            } else {
                // seeded, reproducible samples on the larger algebras
                for _ in 0..20_000 {
                    let g = &pts[rng.gen_range(0..pts.len())];
                    let h = &pts[rng.gen_range(0..pts.len())];
                    let k = &pts[rng.gen_range(0..pts.len())];
                    ensure(model.in_group(&model.mul(g, h)), "closure fails")?;
                    ensure(
                        model.mul(&model.mul(g, h), k) == model.mul(g, &model.mul(h, k)),
                        "associativity fails",
                    )?;
                    sampled_ops += 3;
                }
            }
        }
        Ok(format!(
            "counts, sigma-section, hermitian witness, and group axioms hold \
             ({full_ops} exhaustive + {sampled_ops} seeded operations over 4 test algebras)"
        ))
    });
}

#[test]
fn criterion_6_quotient_tangent_census() {
    gate("criterion 6 (quotient-tangent census)", 120_000, || {
        let mut total = 0u64;
        for deg in [1u32, 2, 4] {
            let fq = lib(Fq::new(3, deg))?;
            for m in 1..=2u32 {
                let census = lib(submodule_census(&fq, m, BUDGET))?;
                ensure(
                    census.all_quotient_tangents_equal_m,
                    &format!("a quotient tangent differs from m = {m} over F_{}", fq.q()),
                )?;
                ensure(
                    u128::from(census.subspaces_checked) == census.expected_subspaces,
                    "the census missed admissible submodules",
                )?;
                total += census.subspaces_checked;
            }
        }
        Ok(format!(
            "{total} admissible submodules over q in {{3, 9, 81}}, m in {{1, 2}}: \
             every quotient tangent equals m"
        ))
    });
}

#[test]
fn criterion_7_restriction_surjectivity() {
    gate("criterion 7 (restriction surjectivity)", 60_000, || {
        let fq = lib(Fq::new(3, 2))?;
        let mut pairs = 0u32;
        for (ff, d) in [(vec![1u32], 2u32), (vec![1], 3), (vec![1, 2], 3)] {
            let rep = lib(restriction_surjectivity_check(&fq, &ff, d, 1))?;
            ensure(
                rep.all_surjective,
                &format!("restriction fails for ff = {ff:?}, d = {d}"),
            )?;
            pairs += rep.pairs_checked;
        }
        Ok(format!(
            "{pairs} hom blocks: level 2 -> 1 restriction surjective on F_q-points"
        ))
    });
}

#[test]
fn criterion_8_certification() {
    gate("criterion 8 (certification)", 10_000, || {
        // the quadratic inert datum: d = 3, type (1, 2)
        let inert = PELDatum {
            p: 3,
            d: 3,
            pairs: vec![(1, 2)],
            orbits: vec![Orbit {
                kind: "AU".into(),
                ff: vec![1, 2],
            }],
            split_totally_real: true,
        };
        let cert = lib(certify_pel(&inert))?;
        ensure(
            cert.certified && cert.tangent_total == 2 && cert.dim_shimura == 2,
            "the quadratic inert datum should certify ed >= 2 with t(G) = dim S = 2",
        )?;
        // the split variant certifies through mu_p^(delta (delta + 1))
        let split = PELDatum {
            p: 3,
            d: 3,
            pairs: vec![(1, 2)],
            orbits: vec![Orbit {
                kind: "AL".into(),
                ff: vec![1],
            }],
            split_totally_real: true,
        };
        let cert = lib(certify_pel(&split))?;
        ensure(
            cert.certified && cert.h_multiplicative_rank == 2,
            "the split variant should certify via mu_p^2",
        )?;
        // every valid datum with <= 6 factors, delta <= 4: t(G) = dim S
        let mut data = 0u32;
        for delta in 1..=4u32 {
            let d = 2 * delta + 1;
            let tags: [(&str, Vec<u32>, (u32, u32)); 4] = [
                ("AL", vec![0], (0, d)),
                ("AL", vec![delta], (delta, delta + 1)),
                ("AU", vec![0, d], (0, d)),
                ("AU", vec![delta, delta + 1], (delta, delta + 1)),
            ];
            for c0 in 0..=6usize {
                for c1 in 0..=(6 - c0) {
                    for c2 in 0..=(6 - c0 - c1) {
                        for c3 in 0..=(6 - c0 - c1 - c2) {
                            let total = c0 + c1 + c2 + c3;
                            if total == 0 {
                                continue;
                            }
                            let mut orbits = Vec::new();
                            let mut pairs = Vec::new();
                            for (count, (kind, ff, sig)) in
                                [c0, c1, c2, c3].into_iter().zip(tags.iter())
                            {
                                for _ in 0..count {
                                    orbits.push(Orbit {
                                        kind: (*kind).into(),
                                        ff: ff.clone(),
                                    });
                                    pairs.push(*sig);
                                }
                            }
                            let datum = PELDatum {
                                p: 3,
                                d,
                                pairs,
                                orbits,
                                split_totally_real: true,
                            };
                            let cert = lib(certify_pel(&datum))?;
                            ensure(
                                cert.certified && cert.tangent_total == cert.dim_shimura,
                                &format!(
                                    "t(G) != dim S for delta {delta}, counts \
                                     ({c0}, {c1}, {c2}, {c3})"
                                ),
                            )?;
                            data += 1;
                        }
                    }
                }
            }
        }
        Ok(format!(
            "inert and split quadratic data certify; t(G) = dim S on {data} data \
             with <= 6 factors, delta <= 4"
        ))
    });
}

#[test]
fn criterion_9_abelian_variety_bounds() {
    gate("criterion 9 (abelian-variety bounds)", 1_000, || {
        ensure(lib(abvar_bound(3, 2))? == 3, "abvar_bound(3, 2) != 3")?;
        let mut cases = 0u32;
        for d in 1..=6u32 {
            for n in 0..d {
                ensure(
                    lib(abvar_bound(d, n))? == n + 1,
                    &format!("abvar_bound({d}, {n}) != n + 1"),
                )?;
                cases += 1;
            }
        }
        Ok(format!(
            "abvar_bound(3, 2) = 3 and abvar_bound(d, n) = n + 1 on {cases} pairs with n < d <= 6"
        ))
    });
}

// ---------------------------------------------------------------------------
// Command-line contract
// ---------------------------------------------------------------------------

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mucert"))
}

#[test]
fn cli_exit_codes_and_examples() {
    gate("cli (exit codes and documented examples)", 120_000, || {
        // abvar bound --d 3 --n 2 -> bound 3, exit 0
        let out = bin()
            .args(["abvar", "bound", "--d", "3", "--n", "2"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.code() == Some(0), "abvar bound exit code")?;
        let text = String::from_utf8_lossy(&out.stdout).to_string();
        ensure(text.contains(">= 3"), "abvar bound output")?;

        // dmod hom --f1 01 --f2 01 --n 1 --p 3 -> count 9, oracle agreement
        let out = bin()
            .args(["dmod", "hom", "--f1", "01", "--f2", "01", "--n", "1", "--p", "3"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.code() == Some(0), "dmod hom exit code")?;
        let text = String::from_utf8_lossy(&out.stdout).to_string();
        ensure(
            text.contains("9 homomorphisms (p^2)") && text.contains("agreement: yes"),
            "dmod hom output",
        )?;

        // shimura certify with d even -> exit 2
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let bad = dir.path().join("bad.json");
        std::fs::write(
            &bad,
            serde_json::json!({
                "p": 3, "d": 4, "pairs": [[2, 2]],
                "orbits": [{"kind": "AU", "ff": [2, 2]}],
                "split_totally_real": true,
            })
            .to_string(),
        )
        .map_err(|e| e.to_string())?;
        let out = bin()
            .args(["shimura", "certify", bad.to_str().unwrap()])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.code() == Some(2), "even d should exit 2")?;

        // the inert datum certifies with exit 0 and certified: true in JSON
        let good = dir.path().join("inert.json");
        std::fs::write(
            &good,
            serde_json::json!({
                "p": 3, "d": 3, "pairs": [[1, 2]],
                "orbits": [{"kind": "AU", "ff": [1, 2]}],
                "split_totally_real": true,
            })
            .to_string(),
        )
        .map_err(|e| e.to_string())?;
        let out = bin()
            .args(["shimura", "certify", good.to_str().unwrap(), "--json"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.code() == Some(0), "inert datum should exit 0")?;
        let report: serde_json::Value =
            serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        ensure(
            report["results"]["certified"] == serde_json::json!(true)
                && report["passed"] == serde_json::json!(true),
            "JSON certificate fields",
        )?;

        // usage errors -> exit 64
        for args in [
            vec!["frobnicate"],
            vec!["suite", "bogus"],
            vec!["oracle", "verify", "bogus", "--p", "3"],
            vec!["dmod", "hom", "--f1", "01", "--p", "3"],
        ] {
            let out = bin().args(&args).output().map_err(|e| e.to_string())?;
            ensure(
                out.status.code() == Some(64),
                &format!("{args:?} should exit 64"),
            )?;
        }

        // a starved budget surfaces as an internal-check failure (exit 3)
        let out = bin()
            .env("MUCERT_BUDGET", "1")
            .args(["example", "main"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(
            out.status.code() == Some(3),
            "budget exhaustion should exit 3",
        )?;

        // hypotheses not satisfied -> exit 2
        let out = bin()
            .args(["example", "main", "--p", "5", "--q", "25"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.code() == Some(2), "p != 3 should exit 2")?;

        Ok("documented examples, exit codes 0/2/3/64, and budget override".into())
    });
}

#[test]
fn cli_json_determinism() {
    gate("cli (byte-identical JSON)", 60_000, || {
        for args in [
            vec!["dmod", "build", "--f", "011", "--p", "3", "--json"],
            vec!["dmod", "hom", "--f1", "01", "--f2", "11", "--p", "3", "--json"],
            vec!["aut", "structure", "--ff", "1,2", "--d", "3", "--json"],
            vec!["aut", "filtration", "--ff", "1,2", "--d", "3", "--p", "3", "--json"],
            vec!["abvar", "bound", "--d", "5", "--n", "3", "--json"],
        ] {
            let a = bin().args(&args).output().map_err(|e| e.to_string())?;
            let b = bin().args(&args).output().map_err(|e| e.to_string())?;
            ensure(a.status.code() == Some(0), &format!("{args:?} failed"))?;
            ensure(
                a.stdout == b.stdout,
                &format!("{args:?} output differs across runs"),
            )?;
        }
        Ok("repeated runs emit byte-identical JSON".into())
    });
}

#[test]
fn cli_suite_homs_passes() {
    gate("cli (suite homs)", 120_000, || {
        let out = bin()
            .args(["suite", "homs"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.code() == Some(0), "suite homs exit code")?;
        let text = String::from_utf8_lossy(&out.stdout).to_string();
        ensure(text.contains("passed: true"), "suite homs did not pass")?;
        Ok("suite homs passes end to end".into())
    });
}
