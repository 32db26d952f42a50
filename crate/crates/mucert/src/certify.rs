//! Incompressibility certificates for mu-ordinary congruence covers of
//! unitary Shimura varieties, and the companion essential-dimension
//! bound for multiplication by p on abelian varieties.
//!
//! A [`PELDatum`] records the arithmetic shell of a unitary PEL datum:
//! the odd prime p (assumed to split completely in the totally real
//! field), the archimedean signatures (n(tau), n(tau-bar)), and the
//! c-orbits of p-adic places, each split (AL) or inert quadratic (AU).
//! [`certify_pel`] classifies each orbit's mu-ordinary factor, computes
//! the identity component of the automorphism group scheme from the
//! matricial structure, checks the central equality t(G) = dim S, and
//! emits the verdict: the level-p congruence cover is p-incompressible,
//! with essential dimension at p at least dim S.
//!
//! The certificate is one-directional: when a hypothesis fails the
//! verdict only says "no conclusion", never that a cover is
//! compressible.

use serde::{Deserialize, Serialize};

use crate::autstruct::{aut_prime_structure, odd_unitary_type, polarized_structure};
use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Input datum.
// ---------------------------------------------------------------------------

/// One c-orbit of p-adic places of the CM field.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Orbit {
    /// "AL" for a split pair of places, "AU" for an inert quadratic place.
    pub kind: String,
    /// The value(s) of the slope function: one number for AL, the two
    /// conjugate values {n, d - n} for AU.
    pub ff: Vec<u32>,
}

/// The arithmetic data of a unitary PEL Shimura datum, as supplied by
/// the user; splitting behavior is asserted, not computed.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PELDatum {
    pub p: u64,
    /// Common value n(tau) + n(tau-bar) of the hermitian form.
    pub d: u32,
    /// Archimedean conjugate pairs of signatures.
    pub pairs: Vec<(u32, u32)>,
    /// c-orbits of the p-adic places.
    pub orbits: Vec<Orbit>,
    /// Asserts that p splits completely in the totally real field.
    pub split_totally_real: bool,
}

// ---------------------------------------------------------------------------
// Classification of the mu-ordinary factors.
// ---------------------------------------------------------------------------

/// The classification of one c-orbit's factor and the contribution of
/// its Aut^0 to the group acting on the congruence cover.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FactorClassification {
    pub kind: String,
    /// One of "AL-0", "AL-delta", "AU-0d", "AU-delta".
    pub tag: String,
    pub ff: Vec<u32>,
    pub aut0_description: String,
    /// Tangent dimension of Aut^0 at level one.
    pub tangent: u32,
    /// Multiplicative rank of the canonical mu_p-power subgroup H.
    pub h_multiplicative_rank: u32,
    /// n(tau) n(tau-bar) for the signatures attached to this orbit.
    pub dim_contribution: u32,
    /// True when the derivation is reconstructed from the general grid
    /// rather than spelled out case by case (the extreme AU signature).
    pub reconstructed: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct HypothesisCheck {
    pub name: String,
    pub ok: bool,
}

/// The full certificate: per-factor table, the two routes to the acting
/// group's tangent dimension, and the verdict.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Certificate {
    pub p: u64,
    pub d: u32,
    pub delta: u32,
    pub factors: Vec<FactorClassification>,
    /// Sum over archimedean pairs of n(tau) n(tau-bar).
    pub dim_shimura: u32,
    /// Sum of factor tangents = t(G) for the product group.
    pub tangent_total: u32,
    /// Multiplicative rank of H = product of the per-factor H's.
    pub h_multiplicative_rank: u32,
    pub hypothesis_checks: Vec<HypothesisCheck>,
    pub certified: bool,
    pub verdict: String,
}

fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut f = 3;
    while f * f <= p {
        if p % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

/// Validate the datum and classify each orbit. Violated hypotheses
/// surface as typed errors naming the failed condition.
pub fn classify_factors(datum: &PELDatum) -> Result<Vec<FactorClassification>> {
    let d = datum.d;
    if d % 2 == 0 || d == 0 {
        return Err(Error::Hypothesis(format!("d = {d} must be odd")));
    }
    let delta = (d - 1) / 2;
    if !is_odd_prime(datum.p) {
        return Err(Error::Hypothesis(format!(
            "p = {} must be an odd prime",
            datum.p
        )));
    }
    if !datum.split_totally_real {
        return Err(Error::Hypothesis(
            "p must split completely in the totally real field".into(),
        ));
    }
    let allowed = [0, delta, delta + 1, d];
    for &(a, b) in &datum.pairs {
        if a + b != d {
            return Err(Error::Hypothesis(format!(
                "signature pair ({a}, {b}) does not sum to d = {d}"
            )));
        }
        if !allowed.contains(&a) {
            return Err(Error::Hypothesis(format!(
                "signature {a} is not in {{0, {delta}, {}, {d}}}",
                delta + 1
            )));
        }
    }
    let mut out = Vec::with_capacity(datum.orbits.len());
    for orbit in &datum.orbits {
        let fc = match orbit.kind.as_str() {
            "AL" => classify_al(orbit, d, delta)?,
            "AU" => classify_au(orbit, d, delta)?,
            other => {
                return Err(Error::BadParameter(format!(
                    "orbit kind {other:?} is neither \"AL\" nor \"AU\""
                )))
            }
        };
        out.push(fc);
    }
    Ok(out)
}

fn classify_al(orbit: &Orbit, d: u32, delta: u32) -> Result<FactorClassification> {
    if orbit.ff.len() != 1 {
        return Err(Error::BadParameter(
            "an AL orbit carries a single slope value".into(),
        ));
    }
    let f = orbit.ff[0];
    if f > d {
        return Err(Error::Hypothesis(format!("slope value {f} exceeds d = {d}")));
    }
    // the two places are interchanged, so f and d - f give the same factor
    let fmin = f.min(d - f);
    if fmin == 0 {
        return Ok(FactorClassification {
            kind: "AL".into(),
            tag: "AL-0".into(),
            ff: orbit.ff.clone(),
            aut0_description: "trivial (etale times multiplicative)".into(),
            tangent: 0,
            h_multiplicative_rank: 0,
            dim_contribution: 0,
            reconstructed: false,
        });
    }
    if fmin != delta {
        return Err(Error::Hypothesis(format!(
            "AL slope value {f} is not in {{0, {delta}, {}, {d}}}",
            delta + 1
        )));
    }
    // Aut^0 of the unpolarized X(delta): one off-diagonal block, fully
    // multiplicative; compute it from the matricial grid.
    let grid = aut_prime_structure(&[delta], d, 1)?;
    if grid.grid.len() != 1 || grid.grid[0].delta_bits != "1" {
        return Err(Error::InternalCheck(
            "the AL-delta grid should be a single multiplicative block".into(),
        ));
    }
    let tangent = grid.unipotent_tangent;
    if tangent != delta * (delta + 1) {
        return Err(Error::InternalCheck(format!(
            "AL-delta tangent {tangent} does not match delta(delta+1)"
        )));
    }
    Ok(FactorClassification {
        kind: "AL".into(),
        tag: "AL-delta".into(),
        ff: orbit.ff.clone(),
        aut0_description: format!("mu_p^{} (one multiplicative hom block)", tangent),
        tangent,
        h_multiplicative_rank: tangent,
        dim_contribution: delta * (delta + 1),
        reconstructed: false,
    })
}

fn classify_au(orbit: &Orbit, d: u32, delta: u32) -> Result<FactorClassification> {
    if orbit.ff.len() != 2 {
        return Err(Error::BadParameter(
            "an AU orbit carries the two conjugate slope values".into(),
        ));
    }
    let mut vals = [orbit.ff[0], orbit.ff[1]];
    vals.sort_unstable();
    if vals[0] + vals[1] != d {
        return Err(Error::Hypothesis(format!(
            "AU slope values {{{}, {}}} do not sum to d = {d}",
            vals[0], vals[1]
        )));
    }
    if vals == [0, d] {
        // extreme signature: all layers coincide, r = 1, Aut^0 trivial
        let ps = polarized_structure(&[0, d], d, 1)?;
        if ps.r != 1 || ps.tangent != 0 || ps.order_exponent != 0 {
            return Err(Error::InternalCheck(
                "the extreme AU factor should have r = 1 and trivial Aut^0".into(),
            ));
        }
        return Ok(FactorClassification {
            kind: "AU".into(),
            tag: "AU-0d".into(),
            ff: orbit.ff.clone(),
            aut0_description: "trivial (single slope layer, r = 1)".into(),
            tangent: 0,
            h_multiplicative_rank: 0,
            dim_contribution: 0,
            reconstructed: true,
        });
    }
    if vals != [delta, delta + 1] {
        return Err(Error::Hypothesis(format!(
            "AU slope values {{{}, {}}} are neither {{0, {d}}} nor {{{delta}, {}}}",
            vals[0],
            vals[1],
            delta + 1
        )));
    }
    let (ff, dd) = odd_unitary_type(delta);
    let ps = polarized_structure(&ff, dd, 1)?;
    if ps.tangent != delta * delta + delta || ps.multiplicative_rank != delta * delta {
        return Err(Error::InternalCheck(
            "the odd unitary factor does not match the hand computation".into(),
        ));
    }
    Ok(FactorClassification {
        kind: "AU".into(),
        tag: "AU-delta".into(),
        ff: orbit.ff.clone(),
        aut0_description: format!(
            "unipotent of tangent {} with mu_p^{} inside",
            ps.tangent, ps.multiplicative_rank
        ),
        tangent: ps.tangent,
        h_multiplicative_rank: ps.multiplicative_rank,
        dim_contribution: delta * (delta + 1),
        reconstructed: false,
    })
}

/// dim S = sum over conjugate pairs of n(tau) n(tau-bar).
pub fn dim_shimura(datum: &PELDatum) -> u32 {
    datum.pairs.iter().map(|&(a, b)| a * b).sum()
}

/// Run all hypothesis checks and produce the certificate. Hypothesis
/// violations become a negative verdict (never an error); only internal
/// inconsistencies (which indicate a bug) surface as errors.
pub fn certify_pel(datum: &PELDatum) -> Result<Certificate> {
    let d = datum.d;
    let delta = if d % 2 == 1 { (d - 1) / 2 } else { 0 };
    let mut checks = Vec::new();
    let push = |checks: &mut Vec<HypothesisCheck>, name: &str, ok: bool| {
        checks.push(HypothesisCheck {
            name: name.to_string(),
            ok,
        });
        ok
    };
    let mut all_ok = true;
    all_ok &= push(&mut checks, "p is an odd prime", is_odd_prime(datum.p));
    all_ok &= push(&mut checks, "d is odd", d % 2 == 1 && d > 0);
    all_ok &= push(
        &mut checks,
        "p splits completely in the totally real field",
        datum.split_totally_real,
    );
    let allowed = [0, delta, delta + 1, d];
    all_ok &= push(
        &mut checks,
        "every signature lies in {0, delta, delta+1, d}",
        d % 2 == 1
            && datum
                .pairs
                .iter()
                .all(|&(a, b)| a + b == d && allowed.contains(&a)),
    );
    // orbit-level validity, via the classifier
    let factors = if all_ok {
        match classify_factors(datum) {
            Ok(f) => {
                push(&mut checks, "p-adic orbits carry admissible slopes", true);
                f
            }
            Err(Error::Hypothesis(msg)) | Err(Error::BadParameter(msg)) => {
                push(
                    &mut checks,
                    &format!("p-adic orbits carry admissible slopes ({msg})"),
                    false,
                );
                all_ok = false;
                Vec::new()
            }
            Err(e) => return Err(e),
        }
    } else {
        Vec::new()
    };
    // coherence of the archimedean and p-adic data: the multiset of
    // unordered signature pairs must match the orbits' slope pairs
    if all_ok {
        let mut arch: Vec<(u32, u32)> = datum
            .pairs
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        let mut padic: Vec<(u32, u32)> = datum
            .orbits
            .iter()
            .map(|o| {
                if o.ff.len() == 1 {
                    let f = o.ff[0].min(d - o.ff[0]);
                    (f, d - f)
                } else {
                    (o.ff[0].min(o.ff[1]), o.ff[0].max(o.ff[1]))
                }
            })
            .collect();
        arch.sort_unstable();
        padic.sort_unstable();
        all_ok &= push(
            &mut checks,
            "archimedean signatures match the p-adic orbits",
            arch == padic,
        );
    }
    let dim_s = dim_shimura(datum);
    let tangent_total: u32 = factors.iter().map(|f| f.tangent).sum();
    let h_rank: u32 = factors.iter().map(|f| f.h_multiplicative_rank).sum();
    if all_ok {
        // the central equality of the main theorem's proof; a failure
        // here would be a bug in the tables, not a bad input
        let dim_from_factors: u32 = factors.iter().map(|f| f.dim_contribution).sum();
        if tangent_total != dim_from_factors || dim_from_factors != dim_s {
            return Err(Error::InternalCheck(format!(
                "t(G) = {tangent_total}, factor dims = {dim_from_factors}, dim S = {dim_s} disagree"
            )));
        }
    }
    let verdict = if all_ok {
        format!(
            "p-incompressible: the level-p congruence cover has essential \
             dimension at p at least {dim_s} = dim S, with t(G) = dim S"
        )
    } else {
        let failed: Vec<&str> = checks
            .iter()
            .filter(|c| !c.ok)
            .map(|c| c.name.as_str())
            .collect();
        format!("no conclusion: hypotheses not satisfied ({})", failed.join("; "))
    };
    Ok(Certificate {
        p: datum.p,
        d,
        delta,
        factors,
        dim_shimura: dim_s,
        tangent_total,
        h_multiplicative_rank: h_rank,
        hypothesis_checks: checks,
        certified: all_ok,
        verdict,
    })
}

// ---------------------------------------------------------------------------
// Abelian varieties.
// ---------------------------------------------------------------------------

/// Lower bound for the essential dimension at p of multiplication by p
/// on a d-dimensional abelian variety whose reduction contains mu_p^n:
/// n + 1 for n < d, capped at d (the n = d ordinary case applies the
/// bound with a mu_p^{d-1} subgroup).
pub fn abvar_bound(d: u32, n: u32) -> Result<u32> {
    if d == 0 {
        return Err(Error::Hypothesis("the abelian variety must have dim >= 1".into()));
    }
    if n > d {
        return Err(Error::BadParameter(format!(
            "multiplicative rank n = {n} cannot exceed d = {d}"
        )));
    }
    Ok((n + 1).min(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic_inert() -> PELDatum {
        PELDatum {
            p: 3,
            d: 3,
            pairs: vec![(1, 2)],
            orbits: vec![Orbit {
                kind: "AU".into(),
                ff: vec![1, 2],
            }],
            split_totally_real: true,
        }
    }

    #[test]
    fn quadratic_inert_datum_certifies() {
        let cert = certify_pel(&quadratic_inert()).unwrap();
        assert!(cert.certified);
        assert_eq!(cert.delta, 1);
        assert_eq!(cert.dim_shimura, 2);
        assert_eq!(cert.tangent_total, 2);
        assert_eq!(cert.h_multiplicative_rank, 1);
        assert_eq!(cert.factors.len(), 1);
        assert_eq!(cert.factors[0].tag, "AU-delta");
        assert_eq!(
            (
                cert.factors[0].tangent,
                cert.factors[0].h_multiplicative_rank,
                cert.factors[0].dim_contribution
            ),
            (2, 1, 2)
        );
        assert!(cert.verdict.contains("p-incompressible"));
    }

    #[test]
    fn quadratic_split_datum_uses_the_multiplicative_block() {
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
        let cert = certify_pel(&datum).unwrap();
        assert!(cert.certified);
        let f = &cert.factors[0];
        assert_eq!(f.tag, "AL-delta");
        assert_eq!((f.tangent, f.h_multiplicative_rank, f.dim_contribution), (2, 2, 2));
    }

    #[test]
    fn extreme_signatures_contribute_nothing() {
        let datum = PELDatum {
            p: 5,
            d: 5,
            pairs: vec![(0, 5), (2, 3)],
            orbits: vec![
                Orbit {
                    kind: "AU".into(),
                    ff: vec![0, 5],
                },
                Orbit {
                    kind: "AU".into(),
                    ff: vec![2, 3],
                },
            ],
            split_totally_real: true,
        };
        let cert = certify_pel(&datum).unwrap();
        assert!(cert.certified);
        assert_eq!(cert.dim_shimura, 6);
        assert_eq!(cert.tangent_total, 6);
        assert_eq!(cert.factors[0].tag, "AU-0d");
        assert!(cert.factors[0].reconstructed);
        assert_eq!(cert.factors[0].tangent, 0);
        assert_eq!(cert.factors[1].tag, "AU-delta");
        assert_eq!(cert.factors[1].h_multiplicative_rank, 4);
    }

    #[test]
    fn two_real_places_add_contributions() {
        let datum = PELDatum {
            p: 3,
            d: 3,
            pairs: vec![(1, 2), (1, 2)],
            orbits: vec![
                Orbit {
                    kind: "AU".into(),
                    ff: vec![1, 2],
                },
                Orbit {
                    kind: "AU".into(),
                    ff: vec![2, 1],
                },
            ],
            split_totally_real: true,
        };
        let cert = certify_pel(&datum).unwrap();
        assert!(cert.certified);
        assert_eq!(cert.dim_shimura, 4);
        assert_eq!(cert.tangent_total, 4);
        assert!(cert.verdict.contains("at least 4"));
    }

    #[test]
    fn even_d_is_rejected_with_a_verdict() {
        let mut datum = quadratic_inert();
        datum.d = 4;
        datum.pairs = vec![(2, 2)];
        datum.orbits[0].ff = vec![2, 2];
        let cert = certify_pel(&datum).unwrap();
        assert!(!cert.certified);
        assert!(cert.verdict.contains("no conclusion"));
        assert!(cert.hypothesis_checks.iter().any(|c| !c.ok));
    }

    #[test]
    fn bad_signature_and_incoherent_data_fail_their_checks() {
        // signature outside {0, delta, delta+1, d}
        let mut datum = quadratic_inert();
        datum.d = 7;
        datum.pairs = vec![(1, 6)];
        datum.orbits[0].ff = vec![1, 6];
        let cert = certify_pel(&datum).unwrap();
        assert!(!cert.certified);
        // orbit slopes not matching the archimedean pairs
        let mut datum = quadratic_inert();
        datum.pairs = vec![(0, 3)];
        let cert = certify_pel(&datum).unwrap();
        assert!(!cert.certified);
        assert!(cert
            .hypothesis_checks
            .iter()
            .any(|c| c.name.contains("match") && !c.ok));
    }

    #[test]
    fn classify_rejects_malformed_orbits() {
        let mut datum = quadratic_inert();
        datum.orbits[0].kind = "XX".into();
        assert!(matches!(
            classify_factors(&datum),
            Err(Error::BadParameter(_))
        ));
        let mut datum = quadratic_inert();
        datum.orbits[0].ff = vec![1];
        assert!(matches!(
            classify_factors(&datum),
            Err(Error::BadParameter(_))
        ));
    }

    #[test]
    fn central_equality_holds_for_all_small_tag_multisets() {
        // every valid datum with <= 6 factors and delta <= 4 has
        // t(G) = dim S; enumerate multisets of the four tags
        for delta in 1..=4u32 {
            let d = 2 * delta + 1;
            let tag_pool: Vec<(Orbit, (u32, u32))> = vec![
                (
                    Orbit {
                        kind: "AL".into(),
                        ff: vec![0],
                    },
                    (0, d),
                ),
                (
                    Orbit {
                        kind: "AL".into(),
                        ff: vec![delta],
                    },
                    (delta, delta + 1),
                ),
                (
                    Orbit {
                        kind: "AU".into(),
                        ff: vec![0, d],
                    },
                    (0, d),
                ),
                (
                    Orbit {
                        kind: "AU".into(),
                        ff: vec![delta, delta + 1],
                    },
                    (delta, delta + 1),
                ),
            ];
            // every tuple of size 1..=6 over the 4 tags (covers every
            // multiset, and reorderings exercise the permutation
            // invariance of the classification)
            for count in 1..=6usize {
                for code in 0..4usize.pow(count as u32) {
                    let mut c = code;
                    let mut orbits = Vec::new();
                    let mut pairs = Vec::new();
                    for _ in 0..count {
                        let pick = c % 4;
                        c /= 4;
                        orbits.push(tag_pool[pick].0.clone());
                        pairs.push(tag_pool[pick].1);
                    }
                    let datum = PELDatum {
                        p: 3,
                        d,
                        pairs,
                        orbits,
                        split_totally_real: true,
                    };
                    let cert = certify_pel(&datum).unwrap();
                    assert!(cert.certified, "delta {delta} code {code}");
                    assert_eq!(cert.tangent_total, cert.dim_shimura);
                }
            }
        }
    }

    #[test]
    fn abelian_variety_bounds() {
        assert_eq!(abvar_bound(3, 2).unwrap(), 3);
        assert_eq!(abvar_bound(1, 0).unwrap(), 1);
        assert_eq!(abvar_bound(5, 2).unwrap(), 3);
        // n + 1 whenever n < d, capped at d for the ordinary case
        for d in 1..=6u32 {
            for n in 0..d {
                assert_eq!(abvar_bound(d, n).unwrap(), n + 1);
            }
            assert_eq!(abvar_bound(d, d).unwrap(), d);
        }
        // monotone in n
        for d in 1..=6u32 {
            let mut prev = 0;
            for n in 0..=d {
                let b = abvar_bound(d, n).unwrap();
                assert!(b >= prev);
                prev = b;
            }
        }
        assert!(abvar_bound(0, 0).is_err());
        assert!(matches!(abvar_bound(3, 4), Err(Error::BadParameter(_))));
    }
}
