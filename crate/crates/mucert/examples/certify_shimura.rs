//! End-to-end p-incompressibility certificates
//!
//! This example demonstrates:
//! - Certifying the quadratic inert datum (d = 3, signature (1, 2))
//! - The split variant, which certifies through a mu_p power
//! - A datum that violates the hypotheses (even d) and is rejected
//! - A composite datum with several orbits
//!
//! Run with: cargo run --example certify_shimura

use mucert::certify::{certify_pel, Orbit, PELDatum};

fn main() {
    println!("=== Shimura-cover certificates ===\n");

    inert();
    split();
    rejected();
    composite();
}

fn print_certificate(datum: &PELDatum) {
    match certify_pel(datum) {
        Ok(cert) => {
            for f in &cert.factors {
                println!(
                    "  factor {} (ff = {:?}): {}, tangent {}, contributes {}",
                    f.tag, f.ff, f.aut0_description, f.tangent, f.dim_contribution
                );
            }
            println!(
                "  t(G) = {}, dim S = {}, certified: {}",
                cert.tangent_total, cert.dim_shimura, cert.certified
            );
            println!("  verdict: {}\n", cert.verdict);
        }
        Err(e) => println!("  error: {e}\n"),
    }
}

/// The quadratic imaginary field inert at p, signature (1, 2).
fn inert() {
    println!("--- Inert quadratic datum, d = 3 ---\n");
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
    print_certificate(&datum);
}

/// The same signature with p split in the quadratic field: the group
/// degenerates to a mu_p power but still certifies.
fn split() {
    println!("--- Split quadratic datum, d = 3 ---\n");
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
    print_certificate(&datum);
}

/// Even d violates the hypotheses; the certificate reports why.
fn rejected() {
    println!("--- Rejected datum: d = 4 ---\n");
    let datum = PELDatum {
        p: 3,
        d: 4,
        pairs: vec![(2, 2)],
        orbits: vec![Orbit {
            kind: "AU".into(),
            ff: vec![2, 2],
        }],
        split_totally_real: true,
    };
    print_certificate(&datum);
}

/// Several places with different behaviors contribute additively.
fn composite() {
    println!("--- Composite datum: three orbits at delta = 2, d = 5 ---\n");
    let datum = PELDatum {
        p: 3,
        d: 5,
        pairs: vec![(2, 3), (2, 3), (0, 5)],
        orbits: vec![
            Orbit {
                kind: "AU".into(),
                ff: vec![2, 3],
            },
            Orbit {
                kind: "AL".into(),
                ff: vec![2],
            },
            Orbit {
                kind: "AU".into(),
                ff: vec![0, 5],
            },
        ],
        split_totally_real: true,
    };
    print_certificate(&datum);
}
