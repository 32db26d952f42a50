//! Named end-to-end verification suites: each runs a batch of
//! structural claims through both the closed-form layer and the
//! brute-force oracle and reports one pass/fail line per check.
//!
//! The suite names are `homs` (end rings, hom counts, tangent anchors),
//! `aut` (matricial grids, the polarized filtration, restriction
//! surjectivity), `mainexample` (the supersingular group-law suite and
//! the submodule census), `certify` (Shimura certificates and
//! abelian-variety bounds), and `all`.

use serde::Serialize;

use crate::autstruct::{
    odd_unitary_type, polarized_filtration, polarized_structure, restriction_surjectivity_check,
};
use crate::certify::{abvar_bound, certify_pel, Orbit, PELDatum};
use crate::dieudonne::DieudonneModule;
use crate::error::{Error, Result};
use crate::field::{Fq, WittRing};
use crate::homs::{end_ring_check, module_homs, predict_hom};
use crate::mainexample;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

fn run_check(
    checks: &mut Vec<CheckResult>,
    name: &str,
    body: impl FnOnce() -> Result<String>,
) {
    match body() {
        Ok(detail) => checks.push(CheckResult {
            name: name.to_string(),
            passed: true,
            detail,
        }),
        Err(e) => checks.push(CheckResult {
            name: name.to_string(),
            passed: false,
            detail: e.to_string(),
        }),
    }
}

fn expect(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InternalCheck(msg.to_string()))
    }
}

// ---------------------------------------------------------------------------
// homs: end-ring laws, hom counts, tangent anchors.
// ---------------------------------------------------------------------------

fn all_slope_functions(e: usize) -> Vec<Vec<u8>> {
    (0..(1u32 << e))
        .map(|code| (0..e).map(|i| ((code >> i) & 1) as u8).collect())
        .collect()
}

fn suite_homs(budget: u64) -> SuiteReport {
    let mut checks = Vec::new();
    // end rings: every block over e <= 3, n <= 2, p in {3, 5} has
    // End = W_n(kappa), commutative with p^{n e} elements
    for p in [3u64, 5] {
        for e in 1..=3u32 {
            for n in 1..=2u32 {
                let name = format!("end ring p={p} e={e} n={n} is W_n(kappa) for all f");
                run_check(&mut checks, &name, || {
                    let fq = Fq::new(p, e)?;
                    let ring = WittRing::new(fq, n)?;
                    let mut tested = 0;
                    for f in all_slope_functions(e as usize) {
                        let md = DieudonneModule::basic(&ring, &f)?;
                        let rep = end_ring_check(&md, budget)?;
                        expect(
                            rep.matches_witt_ring && rep.commutative && rep.closed_under_composition,
                            &format!("End(X({:?})_{n}) is not W_{n}(kappa)", f),
                        )?;
                        expect(
                            rep.count_log_p == n * e,
                            "endomorphism count is not p^(n e)",
                        )?;
                        tested += 1;
                    }
                    Ok(format!("{tested} slope functions, count p^{}", n * e))
                });
            }
        }
    }
    // hom counts for comparable pairs at n = 1, p = 3, with stability
    // under one unramified field extension
    for e in 1..=3u32 {
        let name = format!("hom counts e={e} n=1 p=3 match the closed form and extend");
        run_check(&mut checks, &name, || {
            let fq = Fq::new(3, e)?;
            let ring = WittRing::new(fq, 1)?;
            let fq_big = Fq::new(3, 2 * e)?;
            let ring_big = WittRing::new(fq_big, 1)?;
            let mut pairs = 0;
            for f1 in all_slope_functions(e as usize) {
                for f2 in all_slope_functions(e as usize) {
                    let pred = predict_hom(&f1, &f2, 1)?;
                    if !pred.comparable {
                        continue;
                    }
                    let m1 = DieudonneModule::basic(&ring, &f1)?;
                    let m2 = DieudonneModule::basic(&ring, &f2)?;
                    // contravariance: group homs X(f1) -> X(f2) are
                    // module homs M(f2) -> M(f1)
                    let space = module_homs(&m2, &m1)?;
                    let expected = pred.rational_points_log_p.unwrap();
                    expect(
                        space.count_log_p() == expected,
                        &format!(
                            "hom count for {} -> {}: got p^{}, expected p^{expected}",
                            pred.f1,
                            pred.f2,
                            space.count_log_p()
                        ),
                    )?;
                    // one field extension: same count on points
                    let b1 = DieudonneModule::basic(&ring_big, &f1)?;
                    let b2 = DieudonneModule::basic(&ring_big, &f2)?;
                    let space_big = module_homs(&b2, &b1)?;
                    expect(
                        space_big.count_log_p() == expected,
                        "hom count changed under a field extension",
                    )?;
                    pairs += 1;
                }
            }
            Ok(format!("{pairs} comparable pairs"))
        });
    }
    // tangent anchors
    run_check(&mut checks, "tangent anchors mu_p, Z/p, alpha_p, E_0", || {
        let fq = Fq::new(3, 1)?;
        let ring = WittRing::new(fq, 1)?;
        let mu_p = DieudonneModule::basic(&ring, &[1])?;
        let z_p = DieudonneModule::basic(&ring, &[0])?;
        let alpha = DieudonneModule::alpha_p(&ring)?;
        expect(mu_p.tangent_dim() == 1, "t(mu_p) != 1")?;
        expect(z_p.tangent_dim() == 0, "t(Z/p) != 0")?;
        expect(alpha.tangent_dim() == 1, "t(alpha_p) != 1")?;
        let fq2 = Fq::new(3, 2)?;
        let ring2 = WittRing::new(fq2, 1)?;
        let e0 = DieudonneModule::basic_ungraded(&ring2, &[0, 1])?;
        expect(e0.tangent_dim() == 1, "t(E_0) != 1")?;
        Ok("t = 1, 0, 1, 1".into())
    });
    finish("homs", checks)
}

// ---------------------------------------------------------------------------
// aut: matricial structure, filtration, restriction surjectivity.
// ---------------------------------------------------------------------------

fn suite_aut(_budget: u64) -> SuiteReport {
    let mut checks = Vec::new();
    for delta in 1..=3u32 {
        let name = format!("odd unitary delta={delta}: H rank, quotient tangent, t(G)");
        run_check(&mut checks, &name, || {
            let (ff, d) = odd_unitary_type(delta);
            let ps = polarized_structure(&ff, d, 1)?;
            expect(
                ps.multiplicative_rank == delta * delta,
                "H-part rank is not delta^2",
            )?;
            expect(
                ps.tangent == delta * delta + delta,
                "t(G) is not delta^2 + delta",
            )?;
            expect(
                ps.tangent - ps.multiplicative_rank == delta,
                "quotient tangent is not delta",
            )?;
            let filt = polarized_filtration(&ff, d, 1, 3)?;
            expect(
                filt.total_tangent == ps.tangent,
                "filtration tangent total disagrees",
            )?;
            expect(
                filt.total_order_exponent == ps.order_exponent,
                "filtration order total disagrees",
            )?;
            Ok(format!(
                "t = {}, H rank = {}, order exponent = {}",
                ps.tangent, ps.multiplicative_rank, ps.order_exponent
            ))
        });
    }
    run_check(&mut checks, "restriction surjectivity 1 -> 2 for e <= 2", || {
        let mut pairs = 0;
        for (deg, ff, d) in [(1u32, vec![1u32], 2u32), (1, vec![1], 3), (2, vec![1, 2], 3)] {
            let fq = Fq::new(3, deg)?;
            let rep = restriction_surjectivity_check(&fq, &ff, d, 1)?;
            expect(rep.all_surjective, "a hom block failed to lift")?;
            pairs += rep.pairs_checked;
        }
        Ok(format!("{pairs} block pairs lift from level 1 to 2"))
    });
    finish("aut", checks)
}

// ---------------------------------------------------------------------------
// mainexample: the supersingular group suite and the submodule census.
// ---------------------------------------------------------------------------

fn suite_mainexample(budget: u64) -> SuiteReport {
    let mut checks = Vec::new();
    run_check(&mut checks, "group-law suite delta=1 p=3 q=9", || {
        let rep = mainexample::group_suite(1, budget)?;
        expect(
            rep.hom_count == 81 && rep.iso_count == 72,
            "Hom(E, E^D) counts are off",
        )?;
        expect(rep.asymmetry_witness_found, "pairing looks symmetric")?;
        expect(
            rep.sigma_section_is_group_hom_on_frobenius_kernel,
            "sigma is not multiplicative on the Frobenius kernel",
        )?;
        expect(
            rep.tangent_group_route == rep.tangent_grid_route,
            "tangent routes disagree",
        )?;
        let counts: Vec<u64> = rep.algebra_counts.iter().map(|c| c.group_points).collect();
        expect(counts == vec![1, 81, 6561, 59049], "group point counts are off")?;
        expect(
            rep.submodule_census.iter().all(|c| c.all_quotient_tangents_equal_m),
            "a submodule quotient has the wrong tangent",
        )?;
        Ok(format!(
            "points {:?}, t(G) = {}, census over {} (q, m) cases",
            counts,
            rep.tangent_group_route,
            rep.submodule_census.len()
        ))
    });
    run_check(&mut checks, "group law closure and associativity on points", || {
        let ex = mainexample::main_example()?;
        let alg = mainexample::TestAlgebra::jet(&ex.fq, 2)?;
        let model = mainexample::UnipotentModel::new(ex, alg, 1)?;
        let pts = model.enumerate(budget)?;
        let mut triples = 0;
        for g in pts.iter().step_by(5) {
            for h in pts.iter().step_by(7) {
                let gh = model.mul(g, h);
                expect(model.in_group(&gh), "product left the subgroup")?;
                for k in pts.iter().step_by(11) {
                    let a = model.mul(&model.mul(g, h), k);
                    let b = model.mul(g, &model.mul(h, k));
                    expect(a == b, "associativity failed")?;
                    triples += 1;
                }
            }
        }
        Ok(format!("{} points, {triples} associativity triples", pts.len()))
    });
    finish("mainexample", checks)
}

// ---------------------------------------------------------------------------
// certify: Shimura certificates and abelian-variety bounds.
// ---------------------------------------------------------------------------

fn suite_certify(_budget: u64) -> SuiteReport {
    let mut checks = Vec::new();
    run_check(&mut checks, "quadratic inert datum certifies ed >= 2", || {
        let datum = PELDatum {
            p: 3,
            d: 3,
            pairs: vec![(1, 2)],
            orbits: vec![Orbit {
                kind: "AU".into(),
                ff: vec![1, 2],
            }],
            split_totally_real: true,
        };
        let cert = certify_pel(&datum)?;
        expect(cert.certified, "the quadratic inert datum failed")?;
        expect(
            cert.dim_shimura == 2 && cert.tangent_total == 2,
            "t(G) = dim S = 2 expected",
        )?;
        Ok(cert.verdict)
    });
    run_check(&mut checks, "quadratic split datum certifies via mu_p^2", || {
        let datum = PELDatum {
            p: 3,
            d: 3,
            pairs: vec![(1, 2)],
            orbits: vec![Orbit {
                kind: "AL".into(),
                ff: vec![1],
            }],
            split_totally_real: true,
        };
        let cert = certify_pel(&datum)?;
        expect(
            cert.certified && cert.h_multiplicative_rank == 2,
            "the split factor should be mu_p^2",
        )?;
        Ok(cert.verdict)
    });
    run_check(&mut checks, "t(G) = dim S for all multisets <= 6, delta <= 4", || {
        let mut tested = 0;
        for delta in 1..=4u32 {
            let d = 2 * delta + 1;
            let tags: [(&str, Vec<u32>, (u32, u32)); 4] = [
                ("AL", vec![0], (0, d)),
                ("AL", vec![delta], (delta, delta + 1)),
                ("AU", vec![0, d], (0, d)),
                ("AU", vec![delta, delta + 1], (delta, delta + 1)),
            ];
            // multisets of the 4 tags with 1..=6 elements
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
                                [c0, c1, c2, c3].iter().zip(tags.iter())
                            {
                                for _ in 0..*count {
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
                            let cert = certify_pel(&datum)?;
                            expect(cert.certified, "a valid multiset failed")?;
                            expect(
                                cert.tangent_total == cert.dim_shimura,
                                "central equality violated",
                            )?;
                            tested += 1;
                        }
                    }
                }
            }
        }
        Ok(format!("{tested} datum multisets"))
    });
    run_check(&mut checks, "abelian-variety bounds", || {
        expect(abvar_bound(3, 2)? == 3, "abvar_bound(3, 2) != 3")?;
        for d in 1..=6u32 {
            for n in 0..d {
                expect(abvar_bound(d, n)? == n + 1, "bound is not n + 1")?;
            }
        }
        Ok("min(n+1, d) on all n <= d <= 6".into())
    });
    finish("certify", checks)
}

fn finish(name: &str, checks: Vec<CheckResult>) -> SuiteReport {
    let passed = checks.iter().all(|c| c.passed);
    SuiteReport {
        suite: name.to_string(),
        checks,
        passed,
    }
}

/// Run a named suite. `all` concatenates every suite in order.
pub fn run_suite(name: &str, budget: u64) -> Result<SuiteReport> {
    match name {
        "homs" => Ok(suite_homs(budget)),
        "aut" => Ok(suite_aut(budget)),
        "mainexample" => Ok(suite_mainexample(budget)),
        "certify" => Ok(suite_certify(budget)),
        "all" => {
            let mut checks = Vec::new();
            for sub in ["homs", "aut", "mainexample", "certify"] {
                let rep = run_suite(sub, budget)?;
                for mut c in rep.checks {
                    c.name = format!("{sub}: {}", c.name);
                    checks.push(c);
                }
            }
            Ok(finish("all", checks))
        }
        other => Err(Error::BadParameter(format!(
            "unknown suite {other:?}; expected one of all, homs, aut, mainexample, certify"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homs_suite_passes() {
        let rep = run_suite("homs", 2_000_000).unwrap();
        assert!(rep.passed, "{:#?}", rep.checks);
        assert_eq!(rep.checks.len(), 16);
    }

    #[test]
    fn aut_suite_passes() {
        let rep = run_suite("aut", 2_000_000).unwrap();
        assert!(rep.passed, "{:#?}", rep.checks);
    }

    #[test]
    fn certify_suite_passes() {
        let rep = run_suite("certify", 2_000_000).unwrap();
        assert!(rep.passed, "{:#?}", rep.checks);
    }

    #[test]
    fn unknown_suite_is_a_usage_error() {
        assert!(matches!(
            run_suite("nope", 1),
            Err(Error::BadParameter(_))
        ));
    }
}
