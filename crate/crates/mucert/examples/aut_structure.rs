//! Automorphism schemes of mu-ordinary groups
//!
//! This example demonstrates:
//! - The block grid of Aut'(X(ff)_1) for the odd unitary type at delta = 2
//! - The polarized subgroup cut out by Phi Phi^dagger = id: free,
//!   anti-diagonal, and determined positions
//! - The normal filtration by diagonal distance and its graded pieces
//! - Surjectivity of level restriction on hom blocks
//!
//! Run with: cargo run --example aut_structure

use mucert::autstruct::{
    aut_prime_structure, odd_unitary_type, polarized_filtration, polarized_structure,
    restriction_surjectivity_check,
};
use mucert::field::Fq;

fn main() {
    println!("=== Automorphism schemes at the odd unitary type ===\n");

    let (ff, d) = odd_unitary_type(2);
    println!("layered type ff = {ff:?}, d = {d}\n");

    grid(&ff, d);
    polarized(&ff, d);
    filtration(&ff, d);
    restriction();
}

/// The unpolarized grid: one hom block per ordered pair of layers.
fn grid(ff: &[u32], d: u32) {
    println!("--- The grid of Aut'(X(ff)_1) ---\n");
    let st = aut_prime_structure(ff, d, 1).unwrap();
    for b in &st.blocks {
        println!("layer f = {} with multiplicity {}", b.bits, b.multiplicity);
    }
    println!();
    for g in &st.grid {
        println!(
            "block ({}, {}): f' = {}, {} copies, order p^{}, tangent {}",
            g.i, g.ip, g.delta_bits, g.count, g.order_exponent, g.tangent
        );
    }
    println!(
        "\nunipotent part: order p^{}, tangent {}\n",
        st.unipotent_order_exponent, st.unipotent_tangent
    );
}

/// The dagger involution pairs grid positions; solving Phi Phi^dagger = id
/// leaves the free ones, constrains the anti-diagonal, determines the rest.
fn polarized(ff: &[u32], d: u32) {
    println!("--- The polarized subgroup G(ff)_1 ---\n");
    let pol = polarized_structure(ff, d, 1).unwrap();
    println!("r = {} diagonal blocks", pol.r);
    println!("free positions          : {:?}", pol.free);
    println!("anti-diagonal positions : {:?}", pol.antidiagonal);
    println!("determined positions    : {:?}", pol.determined);
    for mp in &pol.minus_parts {
        println!(
            "minus part at ({}, {}): {} swapped pairs, {} self-paired, tangent {}",
            mp.i, mp.ip, mp.swapped_pairs, mp.self_paired, mp.tangent
        );
    }
    println!(
        "\nG(1): order p^{}, tangent {}, multiplicative rank {}\n",
        pol.order_exponent, pol.tangent, pol.multiplicative_rank
    );
}

/// The filtration G(s) by diagonal distance recovers the same totals.
fn filtration(ff: &[u32], d: u32) {
    println!("--- The filtration G(1) > G(2) > ... ---\n");
    let filt = polarized_filtration(ff, d, 1, 3).unwrap();
    for layer in &filt.layers {
        println!(
            "G({})/G({}): order p^{}, tangent {}",
            layer.s,
            layer.s + 1,
            layer.order_exponent,
            layer.tangent
        );
    }
    println!("reductive GL orders: {:?}", filt.reductive_gl_orders);
    println!("reductive unitary order: {:?}", filt.reductive_unitary_order);
    println!(
        "totals: order p^{}, tangent {}\n",
        filt.total_order_exponent, filt.total_tangent
    );
}

/// Restriction from level 2 to level 1 is surjective on points.
fn restriction() {
    println!("--- Level restriction ---\n");
    let fq = Fq::new(3, 2).unwrap();
    let rep = restriction_surjectivity_check(&fq, &[1, 2], 3, 1).unwrap();
    println!(
        "{} hom blocks checked, all surjective: {}",
        rep.pairs_checked, rep.all_surjective
    );
}
