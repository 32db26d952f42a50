//! Building Dieudonne modules of mu-ordinary blocks
//!
//! This example demonstrates:
//! - The four basic blocks X(f)_1 over e = 2 and their invariants
//! - alpha_p as the degenerate block with F = V = 0
//! - Cartier duality at the level of slope functions
//! - Layered modules X(ff)_n and truncation to a lower level
//!
//! Run with: cargo run --example build_modules

use mucert::dieudonne::DieudonneModule;
use mucert::field::{Fq, WittRing};

fn main() {
    println!("=== Dieudonne modules of the basic blocks ===\n");

    basic_blocks();
    alpha_p();
    cartier_duals();
    layered_modules();
}

/// All slope functions of length two, at level one over F_9.
fn basic_blocks() {
    println!("--- X(f)_1 for all f of length 2 ---\n");
    let ring = WittRing::new(Fq::new(3, 2).unwrap(), 1).unwrap();
    for f in [[0u8, 0], [0, 1], [1, 0], [1, 1]] {
        let md = DieudonneModule::basic(&ring, &f).unwrap();
        let d = md.descriptor();
        println!(
            "{}: rank {}, order p^{}, tangent {}, parts (et, mult, bi) = ({}, {}, {})",
            md.label,
            md.rank,
            d.order_exponent,
            d.tangent_dim,
            d.etale_rank,
            d.multiplicative_rank,
            d.biconnected_rank
        );
    }
    println!();
}

/// The block with F = V = 0: self-dual, infinitesimal, tangent 1.
fn alpha_p() {
    println!("--- alpha_p ---\n");
    let ring = WittRing::new(Fq::new(3, 1).unwrap(), 1).unwrap();
    let a = DieudonneModule::alpha_p(&ring).unwrap();
    let d = a.descriptor();
    println!(
        "{}: order p^{}, tangent {}, infinitesimal {}",
        a.label, d.order_exponent, d.tangent_dim, d.infinitesimal
    );
    let dual = a.cartier_dual();
    println!("its Cartier dual: {}\n", dual.label);
}

/// Dual of X(f) has the complementary slope function, up to relabeling.
fn cartier_duals() {
    println!("--- Cartier duals swap 0 <-> 1 ---\n");
    let ring = WittRing::new(Fq::new(3, 2).unwrap(), 1).unwrap();
    for f in [[0u8, 1], [1, 1]] {
        let md = DieudonneModule::basic(&ring, &f).unwrap();
        let dual = md.cartier_dual();
        println!(
            "dual of X({}{}) has slope bits {:?}",
            f[0],
            f[1],
            dual.recover_slope_bits()
        );
    }
    println!();
}

/// A layered module and its truncation to a lower level.
fn layered_modules() {
    println!("--- X(ff)_n for the layered type ff = (1, 2), d = 3 ---\n");
    let ring = WittRing::new(Fq::new(3, 2).unwrap(), 2).unwrap();
    let md = DieudonneModule::layered(&ring, &[1, 2], 3).unwrap();
    let d = md.descriptor();
    println!(
        "{}: rank {}, order p^{}, tangent {}",
        md.label, md.rank, d.order_exponent, d.tangent_dim
    );

    let level1 = md.restrict_level(1).unwrap();
    let d1 = level1.descriptor();
    println!(
        "restricted to level 1: order p^{}, tangent {}",
        d1.order_exponent, d1.tangent_dim
    );

    let sum = DieudonneModule::direct_sum(&[(&level1, 2)]).unwrap();
    println!(
        "X(ff)_1^2: rank {}, order p^{}, tangent {}",
        sum.rank,
        sum.descriptor().order_exponent,
        sum.descriptor().tangent_dim
    );
}
