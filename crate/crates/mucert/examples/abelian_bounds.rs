//! Essential-dimension lower bounds for abelian varieties
//!
//! This example demonstrates:
//! - The bound ed_p >= min(n + 1, d) for a d-dimensional abelian variety
//!   whose p-torsion contains mu_p^n
//! - The saturated case n >= d - 1, where the bound reaches d
//! - Parameter validation (d = 0 and n > d are rejected)
//!
//! Run with: cargo run --example abelian_bounds

use mucert::certify::abvar_bound;

fn main() {
    println!("=== Lower bounds for ed_p of p-torsion covers ===\n");

    table();
    saturated();
    rejected();
}

/// The full table for d <= 6.
fn table() {
    println!("--- min(n + 1, d) for 0 <= n <= d <= 6 ---\n");
    println!("  d \\ n   0   1   2   3   4   5   6");
    for d in 1..=6u32 {
        let mut row = format!("  {d}    ");
        for n in 0..=d {
            row.push_str(&format!("  {:>2}", abvar_bound(d, n).unwrap()));
        }
        println!("{row}");
    }
    println!();
}

/// Once the multiplicative rank reaches d - 1, the bound is d itself.
fn saturated() {
    println!("--- p-rank at least d - 1 pins the bound to d ---\n");
    for d in [3u32, 5] {
        println!(
            "d = {d}: bound with mu_p^{} is {}, with mu_p^{d} is {}",
            d - 1,
            abvar_bound(d, d - 1).unwrap(),
            abvar_bound(d, d).unwrap()
        );
    }
    println!();
}

/// Out-of-range parameters are rejected with a reasoned error.
fn rejected() {
    println!("--- Rejected parameters ---\n");
    for (d, n) in [(0u32, 0u32), (3, 4)] {
        match abvar_bound(d, n) {
            Ok(b) => println!("abvar_bound({d}, {n}) = {b}"),
            Err(e) => println!("abvar_bound({d}, {n}): {e}"),
        }
    }
}
