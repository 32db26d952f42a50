//! Census of admissible submodules and quotient tangents
//!
//! This example demonstrates:
//! - The Gaussian binomial count of subspaces of k^m
//! - Enumerating every admissible Dieudonne submodule of M(E_0)^m
//!   that contains F M
//! - The invariance of the quotient tangent dimension: always m
//!
//! Run with: cargo run --example submodule_census

use mucert::field::Fq;
use mucert::mainexample::submodule_census;
use mucert::oracle::gauss_binomial;

fn main() {
    println!("=== Admissible submodules of M(E_0)^m ===\n");

    gaussian_binomials();
    census();
}

/// How many k-dimensional subspaces an m-dimensional space has over F_q.
fn gaussian_binomials() {
    println!("--- Gaussian binomials ---\n");
    for q in [3u64, 9, 81] {
        let counts: Vec<u128> = (0..=2).map(|k| gauss_binomial(q, 2, k)).collect();
        println!(
            "subspaces of F_{q}^2 by dimension: {counts:?} (total {})",
            counts.iter().sum::<u128>()
        );
    }
    println!();
}

/// Every admissible submodule N with F M <= N <= M gives t(M/N') = m.
fn census() {
    println!("--- The census ---\n");
    for deg in [1u32, 2, 4] {
        let fq = Fq::new(3, deg).unwrap();
        for m in 1..=2u32 {
            let report = submodule_census(&fq, m, 1_000_000).unwrap();
            println!(
                "q = {:>2}, m = {m}: {} submodules (expected {}), all quotient tangents = m: {}",
                report.q,
                report.subspaces_checked,
                report.expected_subspaces,
                report.all_quotient_tangents_equal_m
            );
        }
    }
}
