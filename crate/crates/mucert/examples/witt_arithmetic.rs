//! Truncated Witt vectors over finite fields
//!
//! This example demonstrates:
//! - The canonical irreducible modulus behind each `F_{p^m}`
//! - Witt coordinates next to the unramified ring representation
//! - Teichmueller lifts, Frobenius, and Verschiebung
//! - The identities F(V(w)) = p w and 1 + 1 + 1 = "3" in W_2(F_3)
//!
//! Run with: cargo run --example witt_arithmetic

use mucert::field::{canonical_modulus, Fq, WittRing};

fn main() {
    println!("=== Truncated Witt vectors ===\n");

    moduli();
    integers_in_witt_coordinates();
    teichmuller_and_frobenius();
    subring_embeddings();
}

/// The fixed irreducible polynomial used for each finite field.
fn moduli() {
    println!("--- Canonical moduli ---\n");
    for (p, m) in [(3u64, 1u32), (3, 2), (3, 3), (3, 4), (5, 2)] {
        println!("F_{}^{} : x^{} + {:?}", p, m, m, canonical_modulus(p, m));
    }
    println!();
}

/// Small integers written out in Witt coordinates over F_3.
fn integers_in_witt_coordinates() {
    println!("--- W_2(F_3) is Z/9 in coordinates ---\n");
    let fq = Fq::new(3, 1).unwrap();
    let ring = WittRing::new(fq.clone(), 2).unwrap();

    let one = ring.teichmuller(fq.one());
    let mut acc = ring.witt_zero();
    for k in 1..=8 {
        acc = ring.witt_add(&acc, &one);
        println!("{k} = {:?}", acc.0);
    }
    let two = ring.witt_add(&one, &one);
    let four = ring.witt_mul(&two, &two);
    println!("2 * 2 = {:?} (the coordinates of 4)\n", four.0);
}

/// Teichmueller lifts are multiplicative; Frobenius is coordinate-wise
/// p-th power and satisfies F(V(w)) = p w.
fn teichmuller_and_frobenius() {
    println!("--- Teichmueller, Frobenius, Verschiebung over W_2(F_9) ---\n");
    let fq = Fq::new(3, 2).unwrap();
    let ring = WittRing::new(fq.clone(), 2).unwrap();

    // a generator of F_9 over F_3
    let g = fq.from_coeffs(&[0, 1]);
    let a = ring.teichmuller(g);
    let b = ring.teichmuller(fq.mul(g, g));
    let prod = ring.witt_mul(&a, &b);
    println!("Teich(g)        = {:?}", a.0);
    println!("Teich(g^2)      = {:?}", b.0);
    println!("their product   = {:?}", prod.0);
    println!("Teich(g * g^2)  = {:?}", ring.teichmuller(fq.pow(g, 3)).0);

    let mut w = ring.witt_zero();
    w.0[0] = g;
    w.0[1] = fq.one();
    let fv = ring.witt_frobenius(&ring.verschiebung(&w));
    let pw = {
        let ring_el = ring.from_witt_coords(&w.0);
        ring.witt_coords(&ring.scalar_int(3, &ring_el))
    };
    println!("\nw        = {:?}", w.0);
    println!("F(V(w))  = {:?}", fv.0);
    println!("p w      = {pw:?}\n");
}

/// W_n(F_{p^e}) sits inside W_n(F_{p^m}) whenever e divides m; the e
/// distinct embeddings differ by Frobenius twists.
fn subring_embeddings() {
    println!("--- Embedding W_2(F_3) into W_2(F_9) ---\n");
    let small = WittRing::new(Fq::new(3, 1).unwrap(), 2).unwrap();
    let big = WittRing::new(Fq::new(3, 2).unwrap(), 2).unwrap();
    let emb = mucert::field::SubringEmbedding::new(&small, &big).unwrap();

    let five = small.from_int(5);
    let image = emb.embed(&five, 0);
    println!("5 in W_2(F_3)      : {:?}", small.witt_coords(&five));
    println!("its image in W_2(F_9): {:?}", big.witt_coords(&image));
    println!(
        "image of 5 equals 5 computed upstairs: {}",
        image == big.from_int(5)
    );
}
