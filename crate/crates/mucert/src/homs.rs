//! Hom and End modules between mu-ordinary building blocks, computed two
//! independent ways: by the closed-form combinatorics of slope functions,
//! and by the exact Z/p^n solver applied to the semilinear commutation
//! equations.
//!
//! Conventions: `module_homs(src, dst)` solves for module maps
//! `Phi: src -> dst` (matrices over W_n(F_q)) with `Phi F = F Phi`,
//! `Phi V = V Phi`, and — when both modules are graded — grading
//! compatibility, which together encode W_n(F_q)-linearity and
//! kappa-equivariance. Group-scheme homs `G_1 -> G_2` correspond
//! contravariantly to module homs `M(G_2) -> M(G_1)`.
//!
//! For blocks with equal e, `Hom(X(f^1)_n, X(f^2)_n)` is the zero scheme
//! unless `f^1 <= f^2` pointwise, in which case it is `X(f')_n` for the
//! difference type `f'(tau) = [f^1(tau) != f^2(tau)]`; its rational points
//! number `p^{n e}` when `f^1 = f^2` (the endomorphism ring `W_n(kappa)`)
//! and `1` otherwise.

use serde::Serialize;

use crate::dieudonne::{bits_string, DieudonneModule, SemilinearMap};
use crate::error::{Error, Result};
use crate::field::{SubringEmbedding, WittRing, Wn};
use crate::oracle::{LinearizedProblem, SolutionModule};

// ---------------------------------------------------------------------------
// Structural predictions.
// ---------------------------------------------------------------------------

/// Closed-form description of Hom(X(f1)_n, X(f2)_n).
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct HomPrediction {
    pub f1: String,
    pub f2: String,
    pub n: u32,
    /// f1 <= f2 or f2 <= f1 pointwise.
    pub comparable: bool,
    /// The Hom scheme is nonzero iff f1 <= f2 pointwise.
    pub nonzero_scheme: bool,
    /// The difference type f' when the scheme is nonzero.
    pub delta_bits: Option<String>,
    /// log_p of the order of the Hom scheme (n e if nonzero, else 0).
    pub order_exponent: u32,
    /// log_p #Hom(F_q): n e when f1 = f2, else 0. Only defined for
    /// comparable pairs — the closed form assumes f1 <= f2 or f2 <= f1
    /// (incomparable rotations admit sigma-twisted homs whose count
    /// grows with the field).
    pub rational_points_log_p: Option<u32>,
}

pub fn predict_hom(f1: &[u8], f2: &[u8], n: u32) -> Result<HomPrediction> {
    if f1.len() != f2.len() || f1.is_empty() {
        return Err(Error::BadParameter(
            "hom prediction needs slope functions of equal positive length".into(),
        ));
    }
    let e = f1.len() as u32;
    let le = f1.iter().zip(f2).all(|(a, b)| a <= b);
    let ge = f1.iter().zip(f2).all(|(a, b)| a >= b);
    let delta: Vec<u8> = f1
        .iter()
        .zip(f2)
        .map(|(a, b)| if a == b { 0 } else { 1 })
        .collect();
    let equal = delta.iter().all(|&d| d == 0);
    Ok(HomPrediction {
        f1: bits_string(f1),
        f2: bits_string(f2),
        n,
        comparable: le || ge,
        nonzero_scheme: le,
        delta_bits: if le { Some(bits_string(&delta)) } else { None },
        order_exponent: if le { n * e } else { 0 },
        rational_points_log_p: if le || ge {
            Some(if equal { n * e } else { 0 })
        } else {
            None
        },
    })
}

// ---------------------------------------------------------------------------
// Solver route.
// ---------------------------------------------------------------------------

/// The unknown layout of a hom space: the allowed matrix positions
/// (grading-compatible when both sides are graded) with m ring
/// coefficients per position.
#[derive(Clone, Debug)]
pub struct HomUnknowns {
    pub positions: Vec<(usize, usize)>,
    pub m: usize,
}

impl HomUnknowns {
    pub fn count(&self) -> usize {
        self.positions.len() * self.m
    }

    /// Coefficient vector -> matrix over the ring (twist 0).
    pub fn to_map(
        &self,
        ring: &WittRing,
        rows: usize,
        cols: usize,
        x: &[u64],
    ) -> SemilinearMap {
        assert_eq!(x.len(), self.count());
        let mut map = SemilinearMap::zero(ring, rows, cols, 0);
        for (k, &(i, j)) in self.positions.iter().enumerate() {
            map.mat[i][j] = Wn(x[k * self.m..(k + 1) * self.m].to_vec());
        }
        map
    }

    /// Matrix -> coefficient vector; None if it uses forbidden positions.
    pub fn from_map(&self, map: &SemilinearMap) -> Option<Vec<u64>> {
        let mut x = vec![0u64; self.count()];
        for (k, &(i, j)) in self.positions.iter().enumerate() {
            x[k * self.m..(k + 1) * self.m].copy_from_slice(&map.mat[i][j].0);
        }
        // verify no entry outside the support
        for (i, row) in map.mat.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                if entry.0.iter().any(|&c| c != 0) && !self.positions.contains(&(i, j)) {
                    return None;
                }
            }
        }
        Some(x)
    }
}

/// The solved space of module homomorphisms src -> dst.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub ring: WittRing,
    pub rows: usize,
    pub cols: usize,
    pub unknowns: HomUnknowns,
    pub solution: SolutionModule,
}

impl HomSpace {
    pub fn count_log_p(&self) -> u32 {
        self.solution.log_p_count()
    }

    /// All homomorphisms as matrices (within budget).
    pub fn matrices(&self, budget: u64) -> Result<Vec<SemilinearMap>> {
        Ok(self
            .solution
            .enumerate(budget)?
            .iter()
            .map(|x| self.unknowns.to_map(&self.ring, self.rows, self.cols, x))
            .collect())
    }

    pub fn contains(&self, map: &SemilinearMap) -> bool {
        match self.unknowns.from_map(map) {
            Some(x) => self.solution.contains(&x),
            None => false,
        }
    }

    /// A generating set of the hom space as matrices: every hom is an
    /// integer combination of these.
    pub fn generator_matrices(&self) -> Vec<SemilinearMap> {
        self.solution
            .generators
            .iter()
            .map(|x| self.unknowns.to_map(&self.ring, self.rows, self.cols, x))
            .collect()
    }
}

/// Solve for all module homomorphisms `src -> dst` commuting with F and V
/// (and respecting gradings when both are present).
pub fn module_homs(src: &DieudonneModule, dst: &DieudonneModule) -> Result<HomSpace> {
    if src.ring != dst.ring {
        return Err(Error::BadParameter(
            "hom spaces need a common Witt ring".into(),
        ));
    }
    let ring = &src.ring;
    let m = ring.fq().m() as usize;
    let graded = !src.grading.is_empty() && !dst.grading.is_empty() && src.e == dst.e;
    let mut positions = Vec::new();
    for i in 0..dst.rank {
        for j in 0..src.rank {
            if !graded || dst.grading[i] == src.grading[j] {
                positions.push((i, j));
            }
        }
    }
    let unknowns = HomUnknowns { positions, m };
    let n = ring.n();
    let p = ring.p();
    let mut sys = LinearizedProblem::new(p, n, unknowns.count());
    // Build the constraint matrix column by column: image of each unknown
    // basis matrix under Phi -> (Phi F_src - F_dst Phi, Phi V_src - V_dst Phi).
    let mut cols: Vec<Vec<u64>> = Vec::with_capacity(unknowns.count());
    for k in 0..unknowns.count() {
        let mut x = vec![0u64; unknowns.count()];
        x[k] = 1;
        let e_map = unknowns.to_map(ring, dst.rank, src.rank, &x);
        let c_f = subtract_maps(
            ring,
            &e_map.compose(ring, &src.f_op),
            &dst.f_op.compose(ring, &e_map),
        );
        let c_v = subtract_maps(
            ring,
            &e_map.compose(ring, &src.v_op),
            &dst.v_op.compose(ring, &e_map),
        );
        let mut col = Vec::new();
        for mm in [&c_f, &c_v] {
            for row in &mm.mat {
                for entry in row {
                    col.extend_from_slice(&entry.0);
                }
            }
        }
        cols.push(col);
    }
    let rows_count = cols.first().map_or(0, |c| c.len());
    for r in 0..rows_count {
        let row: Vec<u64> = cols.iter().map(|c| c[r]).collect();
        if row.iter().any(|&x| x != 0) {
            sys.push_row(row);
        }
    }
    let solution = sys.solve();
    Ok(HomSpace {
        ring: ring.clone(),
        rows: dst.rank,
        cols: src.rank,
        unknowns,
        solution,
    })
}

fn subtract_maps(ring: &WittRing, a: &SemilinearMap, b: &SemilinearMap) -> SemilinearMap {
    assert_eq!(a.twist, b.twist);
    SemilinearMap {
        twist: a.twist,
        mat: a
            .mat
            .iter()
            .zip(&b.mat)
            .map(|(ra, rb)| {
                ra.iter()
                    .zip(rb)
                    .map(|(x, y)| ring.sub(x, y))
                    .collect()
            })
            .collect(),
    }
}

/// log_p #Hom_{group schemes}(G1, G2)(F_q), via contravariance.
pub fn group_hom_count_log_p(g1: &DieudonneModule, g2: &DieudonneModule) -> Result<u32> {
    Ok(module_homs(g2, g1)?.count_log_p())
}

// ---------------------------------------------------------------------------
// End rings.
// ---------------------------------------------------------------------------

/// Exact comparison of End(X(f)_n) with W_n(kappa).
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct EndRingReport {
    pub count_log_p: u32,
    pub expected_log_p: u32,
    pub commutative: bool,
    pub closed_under_composition: bool,
    pub contains_witt_ring_of_kappa: bool,
    pub matches_witt_ring: bool,
}

/// Verify that the endomorphism ring of a single graded block X(f)_n is
/// exactly W_n(kappa) acting diagonally through the embeddings.
pub fn end_ring_check(md: &DieudonneModule, budget: u64) -> Result<EndRingReport> {
    if md.grading.is_empty() {
        return Err(Error::BadParameter(
            "end_ring_check expects a graded block".into(),
        ));
    }
    let ring = &md.ring;
    let space = module_homs(md, md)?;
    let count_log_p = space.count_log_p();
    let expected_log_p = ring.n() * md.e;
    let mut commutative = true;
    let mut closed = true;
    // Composition and the commutator are Z-bilinear, so checking them on
    // a generating set decides them for the whole ring.
    let gens = space.generator_matrices();
    for a in &gens {
        for b in &gens {
            let ab = a.compose(ring, b);
            let ba = b.compose(ring, a);
            if ab.mat != ba.mat {
                commutative = false;
            }
            if !space.contains(&ab) {
                closed = false;
            }
        }
    }
    // Second route at desk scale: the full multiplication table.
    if count_log_p < 63 && ring.p().pow(count_log_p) <= budget.min(200) {
        let mats = space.matrices(budget.min(200))?;
        for a in &mats {
            for b in &mats {
                let ab = a.compose(ring, b);
                let ba = b.compose(ring, a);
                if ab.mat != ba.mat {
                    commutative = false;
                }
                if !space.contains(&ab) {
                    closed = false;
                }
            }
        }
    }
    // The diagonal W_n(kappa)-action: a |-> diag(sigma^tau(tau_0(a))).
    let kappa = WittRing::new(crate::field::Fq::new(ring.p(), md.e)?, ring.n())?;
    let emb = SubringEmbedding::new(&kappa, ring)?;
    let mut contains_kappa = true;
    // check on every Teichmueller lift and on the image of a general
    // element (1 + the generator when e > 1)
    let mut test_elements: Vec<Wn> = kappa
        .fq()
        .elements()
        .map(|c| kappa.teichmuller_ring(c))
        .collect();
    if md.e > 1 {
        let mut g = kappa.zero();
        g.0[1] = 1;
        test_elements.push(kappa.add(&kappa.one(), &g));
    }
    for a in &test_elements {
        let mut diag = SemilinearMap::zero(ring, md.rank, md.rank, 0);
        for (i, &tau) in md.grading.iter().enumerate() {
            diag.mat[i][i] = emb.embed(a, tau);
        }
        if !space.contains(&diag) {
            contains_kappa = false;
        }
    }
    Ok(EndRingReport {
        count_log_p,
        expected_log_p,
        commutative,
        closed_under_composition: closed,
        contains_witt_ring_of_kappa: contains_kappa,
        matches_witt_ring: count_log_p == expected_log_p
            && commutative
            && closed
            && contains_kappa,
    })
}
