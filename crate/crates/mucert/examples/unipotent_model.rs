//! The explicit supersingular unipotent group at p = 3
//!
//! This example demonstrates:
//! - The Lubin-Tate group law mod p on k[t]/(t^9) and its first
//!   correction beyond X + Y
//! - The frozen antilinear hermitian pairing lambda: E -> E^D
//! - Honest Hopf-algebra points of the unipotent group over k[s]/(s^m)
//! - The sigma-section and the failure of symmetry of the pairing
//!
//! Run with: cargo run --example unipotent_model

use mucert::field::FqEl;
use mucert::mainexample::{main_example, TestAlgebra, UnipotentModel};

fn main() {
    println!("=== The supersingular model over F_9 ===\n");

    group_law();
    pairing();
    points_and_group();
    section_and_asymmetry();
}

/// The reduced group law: X + Y plus corrections supported in degrees
/// congruent to 0 mod the Frobenius kernel height.
fn group_law() {
    println!("--- The group law mod p ---\n");
    let ex = main_example().unwrap();
    print!("F(x, y) = x + y");
    for i in 0..ex.qt {
        for j in 0..ex.qt {
            let c = ex.law[i][j];
            if c != FqEl(0) && !((i, j) == (1, 0) || (i, j) == (0, 1)) {
                print!(" + [{}] x^{i} y^{j}", c.0);
            }
        }
    }
    println!("\n(coefficients are F_9 element codes; the law is truncated at t^9)\n");
}

/// The frozen pairing and the solver counts it came from.
fn pairing() {
    println!("--- The pairing lambda ---\n");
    let ex = main_example().unwrap();
    println!(
        "|Hom(E, E^D)| = {}, isomorphisms {}, polarizations {}",
        ex.hom_count, ex.iso_count, ex.polarization_count
    );
    println!("lambda coefficients (rows i, cols j, codes in F_9):");
    for i in 1..ex.qt {
        let row: Vec<u32> = (1..ex.qt).map(|j| ex.lambda[i][j].0).collect();
        if row.iter().any(|&c| c != 0) {
            println!("  i = {i}: {row:?}");
        }
    }
    println!();
}

/// Multiply two honest points of the group over the dual numbers.
fn points_and_group() {
    println!("--- Points over k[s]/(s^2) ---\n");
    let ex = main_example().unwrap();
    let alg = TestAlgebra::jet(&ex.fq, 2).unwrap();
    let model = UnipotentModel::new(ex, alg.clone(), 1).unwrap();

    let e_pts = ex.e_points(&alg);
    let mu = alg.mu_p();
    println!("|E(A)| = {}, |mu_p(A)| = {}", e_pts.len(), mu.len());

    let pts = model.enumerate(1_000_000).unwrap();
    println!("|G(A)| = {} = |E(A)| * |mu_p(A)|", pts.len());

    let g = &pts[10];
    let h = &pts[20];
    let gh = model.mul(g, h);
    println!("\ng     : x = {:?}", g.x[0]);
    println!("h     : x = {:?}", h.x[0]);
    println!("g h   : x = {:?}", gh.x[0]);
    println!("in group: {}", model.in_group(&gh));
    let gi = model.inv(g);
    println!("g g^-1 = identity: {}", model.mul(g, &gi) == model.identity());

    let h_pts = model.h_points();
    println!("\n|H(A)| = {} (the central mu_p block)\n", h_pts.len());
}

/// The sigma-section splits G -> E on Frobenius-kernel points, and the
/// pairing is hermitian but *not* symmetric.
fn section_and_asymmetry() {
    println!("--- Section and asymmetry ---\n");
    let ex = main_example().unwrap();
    let alg = TestAlgebra::jet(&ex.fq, 4).unwrap();
    let model = UnipotentModel::new(ex, alg.clone(), 1).unwrap();

    let f_pts = ex.f_points(&alg);
    let a = &f_pts[1];
    let s = model.sigma(&[a.clone()]);
    println!("sigma(a) lands in the group: {}", model.in_group(&s));

    let jet5 = TestAlgebra::jet(&ex.fq, 5).unwrap();
    let mut x = jet5.zero();
    x[1] = ex.fq.one();
    let xp = jet5.scale(ex.omega, &x);
    let left = ex.char_pair(&jet5, &x, &ex.lambda_point(&jet5, &xp));
    let right = ex.char_pair(&jet5, &xp, &ex.lambda_point(&jet5, &x));
    println!("<x, lambda(x')> = {:?} at 1, {:?} at omega", left.0, left.1);
    println!("<x', lambda(x)> = {:?} at 1, {:?} at omega", right.0, right.1);
    println!("symmetric: {}", left == right);
}
