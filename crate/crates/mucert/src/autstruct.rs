//! Automorphism group schemes of mu-ordinary truncated p-divisible groups:
//! the matricial grid of the W(kappa)-equivariant automorphisms, the
//! polarized (unitary) subgroup cut out by `Phi Phi^dagger = id`, and its
//! descending filtration with graded pieces.
//!
//! For a layered type `ff` with distinct increasing layers `f_1 < ... < f_r`
//! of multiplicities `m_1, ..., m_r`:
//!
//! * the full automorphism group is upper block triangular: the (i, i')
//!   entry for i < i' is `Hom(X_i, X_{i'}) = X(f')^{m_i m_{i'}}` with
//!   `f' = f_i XOR f_{i'}`, the diagonal is `GL_{m_i}(W_n(kappa))`, and
//!   everything below vanishes;
//! * the unipotent part (identity diagonal) has order exponent
//!   `sum n e m_i m_{i'}` and tangent dimension `sum m_i m_{i'} |f'|_1`;
//! * with a compatible polarization, `Phi Phi^dagger = id` leaves the
//!   grid entries with `i + i' < r + 1` free, determines the mirrored
//!   entries, and on the anti-diagonal `i + i' = r + 1` leaves a torsor
//!   under the anti-invariants `Hom(X_i, X_{i'})^-` of the dagger
//!   involution. Anti-invariants split entry-wise: swapped entry pairs
//!   contribute a full `X(f')`, self-paired (diagonal) entries contribute
//!   `X(f'')^-` where `f''` is the restriction of the conjugation-invariant
//!   `f'` to the index set of kappa.

use serde::Serialize;

use crate::dieudonne::{bits_string, layered_type_layers, parse_bits, DieudonneModule, SlopeLayer};
use crate::error::{Error, Result};
use crate::field::{Fq, WittRing};
use crate::homs::module_homs;
use crate::oracle;

fn ones(bits: &[u8]) -> u32 {
    bits.iter().filter(|&&b| b == 1).count() as u32
}

fn xor_bits(a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter().zip(b).map(|(&x, &y)| x ^ y).collect()
}

// ---------------------------------------------------------------------------
// The unpolarized grid.
// ---------------------------------------------------------------------------

/// One strictly-upper-triangular entry of the automorphism grid.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct GridEntry {
    /// 0-based block indices, i < ip.
    pub i: usize,
    pub ip: usize,
    /// The difference type f' of the block pair (a bit string).
    pub delta_bits: String,
    /// Number of X(f') factors: m_i * m_ip.
    pub count: u32,
    /// log_p of the order of the full entry: count * n * e.
    pub order_exponent: u32,
    /// Tangent dimension: count * (number of ones of f').
    pub tangent: u32,
}

/// The matricial structure of Aut'(X(ff)_n): blocks, grid, and the totals
/// for the unipotent part (identity diagonal).
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct MatricialStructure {
    pub e: u32,
    pub n: u32,
    pub d: u32,
    pub ff: Vec<u32>,
    pub blocks: Vec<SlopeLayer>,
    pub grid: Vec<GridEntry>,
    pub unipotent_order_exponent: u32,
    pub unipotent_tangent: u32,
}

/// Compute the matricial structure of the W(kappa)-equivariant
/// automorphism group of X(ff)_n.
pub fn aut_prime_structure(ff: &[u32], d: u32, n: u32) -> Result<MatricialStructure> {
    let blocks = layered_type_layers(ff, d)?;
    let e = ff.len() as u32;
    let bit_vecs: Vec<Vec<u8>> = blocks
        .iter()
        .map(|b| parse_bits(&b.bits))
        .collect::<Result<_>>()?;
    let mut grid = Vec::new();
    let mut order = 0u32;
    let mut tangent = 0u32;
    for i in 0..blocks.len() {
        for ip in (i + 1)..blocks.len() {
            let delta = xor_bits(&bit_vecs[i], &bit_vecs[ip]);
            let count = blocks[i].multiplicity * blocks[ip].multiplicity;
            let entry = GridEntry {
                i,
                ip,
                delta_bits: bits_string(&delta),
                count,
                order_exponent: count * n * e,
                tangent: count * ones(&delta),
            };
            order += entry.order_exponent;
            tangent += entry.tangent;
            grid.push(entry);
        }
    }
    Ok(MatricialStructure {
        e,
        n,
        d,
        ff: ff.to_vec(),
        blocks,
        grid,
        unipotent_order_exponent: order,
        unipotent_tangent: tangent,
    })
}

/// |GL_m(W_n(F_Q))| = Q^{(n-1) m^2} * prod_{i=0}^{m-1} (Q^m - Q^i).
pub fn gl_order(q: u64, m: u32, n: u32) -> u128 {
    let q = q as u128;
    let mut acc: u128 = q.pow((n - 1) * m * m);
    for i in 0..m {
        acc *= q.pow(m) - q.pow(i);
    }
    acc
}

/// |U_m(W_n)| for the unitary group of the quadratic extension
/// W_n(F_{q^2})/W_n(F_q):
/// q^{m(m-1)/2} * prod_{i=1}^{m} (q^i - (-1)^i) * q^{(n-1) m^2}.
pub fn unitary_order(q: u64, m: u32, n: u32) -> u128 {
    let qq = q as u128;
    let mut acc: u128 = qq.pow(m * (m - 1) / 2) * qq.pow((n - 1) * m * m);
    for i in 1..=m {
        let term = if i % 2 == 0 {
            qq.pow(i) - 1
        } else {
            qq.pow(i) + 1
        };
        acc *= term;
    }
    acc
}

impl MatricialStructure {
    /// Orders of the diagonal blocks GL_{m_i}(W_n(kappa)), kappa = F_{p^e}.
    pub fn diagonal_orders(&self, p: u64) -> Vec<u128> {
        let q = p.pow(self.e);
        self.blocks
            .iter()
            .map(|b| gl_order(q, b.multiplicity, self.n))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// The polarized structure.
// ---------------------------------------------------------------------------

/// The anti-diagonal data at a position i + i' = r + 1 (1-based): the
/// dagger acts entry-wise on the m x m block matrix; swapped entry pairs
/// contribute full X(f') factors to the anti-invariants, self-paired
/// entries contribute X(f'')^-.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct MinusPart {
    pub i: usize,
    pub ip: usize,
    /// The (conjugation-invariant) difference type on the full index set.
    pub delta_bits: String,
    /// Its restriction to the index set of kappa (half length).
    pub restricted_bits: String,
    /// m(m-1)/2 swapped entry pairs, each a full X(f').
    pub swapped_pairs: u32,
    /// m self-paired entries, each an X(f'')^-.
    pub self_paired: u32,
    pub order_exponent: u32,
    pub tangent: u32,
    pub multiplicative_rank: u32,
}

/// The polarized automorphism group G(ff)_n = Aut(X(ff)_n, iota, lambda):
/// the classification of grid positions under `Phi Phi^dagger = id` and
/// the invariants of its unipotent part G(1).
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PolarizedStructure {
    pub base: MatricialStructure,
    pub r: usize,
    /// free positions (0-based, i < ip, i + ip < r - 1): full Hom blocks.
    pub free: Vec<(usize, usize)>,
    /// anti-diagonal positions (i + ip = r - 1): torsors under Hom^-.
    pub antidiagonal: Vec<(usize, usize)>,
    /// mirrored positions determined by the free ones.
    pub determined: Vec<(usize, usize)>,
    pub minus_parts: Vec<MinusPart>,
    /// invariants of the unipotent part G(1)
    pub tangent: u32,
    pub order_exponent: u32,
    pub multiplicative_rank: u32,
}

fn conjugate_index(tau: usize, e: usize) -> usize {
    (tau + e / 2) % e
}

pub fn polarized_structure(ff: &[u32], d: u32, n: u32) -> Result<PolarizedStructure> {
    let e = ff.len();
    if e % 2 != 0 {
        return Err(Error::Hypothesis(
            "polarized types need an even index set (quadratic extension)".into(),
        ));
    }
    for tau in 0..e {
        if ff[tau] + ff[conjugate_index(tau, e)] != d {
            return Err(Error::Hypothesis(format!(
                "polarized type needs ff(tau) + ff(conj tau) = d, violated at tau = {tau}"
            )));
        }
    }
    let base = aut_prime_structure(ff, d, n)?;
    let r = base.blocks.len();
    // Duality pairs block i with block r+1-i (1-based): multiplicities match.
    for i in 0..r {
        if base.blocks[i].multiplicity != base.blocks[r - 1 - i].multiplicity {
            return Err(Error::InternalCheck(
                "conjugate-dual blocks must have equal multiplicities".into(),
            ));
        }
    }
    let mut free = Vec::new();
    let mut antidiagonal = Vec::new();
    let mut determined = Vec::new();
    let mut minus_parts = Vec::new();
    let mut tangent = 0u32;
    let mut order = 0u32;
    let mut mult_rank = 0u32;
    for entry in &base.grid {
        let (i, ip) = (entry.i, entry.ip);
        if i + ip < r - 1 {
            free.push((i, ip));
            tangent += entry.tangent;
            order += entry.order_exponent;
            let delta = parse_bits(&entry.delta_bits)?;
            if delta.iter().all(|&b| b == 1) {
                mult_rank += entry.count * e as u32;
            }
        } else if i + ip == r - 1 {
            antidiagonal.push((i, ip));
            let m = base.blocks[i].multiplicity;
            if base.blocks[ip].multiplicity != m {
                return Err(Error::InternalCheck(
                    "anti-diagonal blocks must be square".into(),
                ));
            }
            let delta = parse_bits(&entry.delta_bits)?;
            // f' must be invariant under conjugation for the dagger to act.
            for tau in 0..e {
                if delta[tau] != delta[conjugate_index(tau, e)] {
                    return Err(Error::InternalCheck(
                        "anti-diagonal difference type must be conjugation-invariant".into(),
                    ));
                }
            }
            let restricted: Vec<u8> = delta[..e / 2].to_vec();
            let swapped_pairs = m * (m - 1) / 2;
            let self_paired = m;
            let part = MinusPart {
                i,
                ip,
                delta_bits: bits_string(&delta),
                restricted_bits: bits_string(&restricted),
                swapped_pairs,
                self_paired,
                order_exponent: swapped_pairs * n * e as u32
                    + self_paired * n * (e as u32 / 2),
                tangent: swapped_pairs * ones(&delta) + self_paired * ones(&restricted),
                multiplicative_rank: swapped_pairs
                    * if delta.iter().all(|&b| b == 1) { e as u32 } else { 0 }
                    + self_paired
                        * if restricted.iter().all(|&b| b == 1) {
                            e as u32 / 2
                        } else {
                            0
                        },
            };
            tangent += part.tangent;
            order += part.order_exponent;
            mult_rank += part.multiplicative_rank;
            minus_parts.push(part);
        } else {
            determined.push((i, ip));
        }
    }
    Ok(PolarizedStructure {
        base,
        r,
        free,
        antidiagonal,
        determined,
        minus_parts,
        tangent,
        order_exponent: order,
        multiplicative_rank: mult_rank,
    })
}

// ---------------------------------------------------------------------------
// The filtration of the polarized group.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FiltrationFactor {
    /// 1-based block pair (t, t+s).
    pub t: usize,
    pub t_plus_s: usize,
    /// Full Hom block or the anti-invariant part.
    pub minus_part: bool,
    pub order_exponent: u32,
    pub tangent: u32,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FiltrationLayer {
    pub s: u32,
    pub factors: Vec<FiltrationFactor>,
    pub order_exponent: u32,
    pub tangent: u32,
}

/// The graded pieces G(s)/G(s+1) for s = 1..r-1, plus the reductive
/// quotient G(0)/G(1) orders.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FiltrationReport {
    pub r: usize,
    pub layers: Vec<FiltrationLayer>,
    /// |GL_{m_t}(W_n(kappa~))| for t = 1..floor(r/2).
    pub reductive_gl_orders: Vec<u128>,
    /// |UAut(X_mid)| when r is odd.
    pub reductive_unitary_order: Option<u128>,
    pub total_order_exponent: u32,
    pub total_tangent: u32,
}

/// The filtration of G(ff)_n by diagonal distance, with graded pieces
/// prod_{t=1}^{floor((r-s)/2)} Hom(X_t, X_{t+s}) x P, where P is the
/// anti-invariant part at the middle position when r - s is odd. The
/// totals are cross-checked against the free/anti-diagonal accounting of
/// `polarized_structure`.
pub fn polarized_filtration(ff: &[u32], d: u32, n: u32, p: u64) -> Result<FiltrationReport> {
    let pol = polarized_structure(ff, d, n)?;
    let r = pol.r;
    let base = &pol.base;
    let entry_at = |i: usize, ip: usize| -> &GridEntry {
        base.grid
            .iter()
            .find(|g| g.i == i && g.ip == ip)
            .expect("grid contains all i < ip")
    };
    let minus_at = |i: usize, ip: usize| -> &MinusPart {
        pol.minus_parts
            .iter()
            .find(|m| m.i == i && m.ip == ip)
            .expect("anti-diagonal position has minus data")
    };
    let mut layers = Vec::new();
    let mut total_order = 0u32;
    let mut total_tangent = 0u32;
    for s in 1..r as u32 {
        let mut factors = Vec::new();
        let mut order = 0u32;
        let mut tangent = 0u32;
        let rs = r as u32 - s;
        for t in 1..=(rs / 2) {
            let (i, ip) = ((t - 1) as usize, (t + s - 1) as usize);
            let g = entry_at(i, ip);
            factors.push(FiltrationFactor {
                t: t as usize,
                t_plus_s: (t + s) as usize,
                minus_part: false,
                order_exponent: g.order_exponent,
                tangent: g.tangent,
            });
            order += g.order_exponent;
            tangent += g.tangent;
        }
        if rs % 2 == 1 {
            let t = rs.div_ceil(2);
            let (i, ip) = ((t - 1) as usize, (t + s - 1) as usize);
            let mp = minus_at(i, ip);
            factors.push(FiltrationFactor {
                t: t as usize,
                t_plus_s: (t + s) as usize,
                minus_part: true,
                order_exponent: mp.order_exponent,
                tangent: mp.tangent,
            });
            order += mp.order_exponent;
            tangent += mp.tangent;
        }
        total_order += order;
        total_tangent += tangent;
        layers.push(FiltrationLayer {
            s,
            factors,
            order_exponent: order,
            tangent,
        });
    }
    // Cross-check: the filtration must account for exactly the free and
    // anti-diagonal parameters of Phi Phi^dagger = id.
    if total_order != pol.order_exponent || total_tangent != pol.tangent {
        return Err(Error::InternalCheck(format!(
            "filtration totals (order 2^... p^{total_order}, tangent {total_tangent}) \
             disagree with the matrix accounting (p^{}, tangent {})",
            pol.order_exponent, pol.tangent
        )));
    }
    let q_kappa = p.pow(base.e / 2);
    let q_tilde = p.pow(base.e);
    let mut gl_orders = Vec::new();
    for t in 1..=(r / 2) {
        gl_orders.push(gl_order(q_tilde, base.blocks[t - 1].multiplicity, n));
    }
    let unitary = if r % 2 == 1 {
        let mid = r.div_ceil(2);
        Some(unitary_order(
            q_kappa,
            base.blocks[mid - 1].multiplicity,
            n,
        ))
    } else {
        None
    };
    Ok(FiltrationReport {
        r,
        layers,
        reductive_gl_orders: gl_orders,
        reductive_unitary_order: unitary,
        total_order_exponent: total_order,
        total_tangent: total_tangent,
    })
}

// ---------------------------------------------------------------------------
// Module-level verification of the closed forms.
// ---------------------------------------------------------------------------

/// Re-derive every grid entry's invariants from explicit Dieudonné
/// modules over the given Witt ring (requires e | m): the difference
/// block X(f') is built from its matrices and must reproduce the
/// predicted tangent and order; for anti-diagonal entries the minus and
/// plus parts of the conjugation involution are split off as explicit
/// (F, V)-submodules and measured directly.
pub fn module_route_grid_check(ring: &WittRing, ff: &[u32], d: u32) -> Result<()> {
    let n = ring.n();
    let structure = polarized_structure(ff, d, n)?;
    let e = ff.len();
    for entry in &structure.base.grid {
        let delta = parse_bits(&entry.delta_bits)?;
        let block = DieudonneModule::basic(ring, &delta)?;
        let per_factor_tangent = entry.tangent / entry.count;
        if block.tangent_dim() != per_factor_tangent {
            return Err(Error::InternalCheck(format!(
                "X({}) tangent from matrices = {}, grid predicts {}",
                entry.delta_bits,
                block.tangent_dim(),
                per_factor_tangent
            )));
        }
        if block.order_exponent() != n * e as u32 {
            return Err(Error::InternalCheck("block order mismatch".into()));
        }
    }
    for mp in &structure.minus_parts {
        let delta = parse_bits(&mp.delta_bits)?;
        let block = DieudonneModule::basic(ring, &delta)?;
        // The conjugation involution e_tau -> e_taubar commutes with F, V
        // because f' is conjugation-invariant; the minus part is spanned
        // by e_tau - e_taubar. Measure its tangent: rank of F mod p on
        // the span, subtracted from the half-rank.
        let fq = ring.fq();
        let half = e / 2;
        // basis of the minus part in module coordinates
        let mut minus_basis = Vec::new();
        for tau in 0..half {
            let mut v = vec![fq.zero(); e];
            v[tau] = fq.one();
            v[conjugate_index(tau, e)] = fq.neg(fq.one());
            minus_basis.push(v);
        }
        // image of the minus basis under F mod p, expressed in the full
        // module, then its rank.
        let fmat = block.f_op.residue_mat(ring);
        let mut images = Vec::new();
        for v in &minus_basis {
            let tv: Vec<_> = v.iter().map(|&c| fq.frobenius(c, 1)).collect();
            let mut img = vec![fq.zero(); e];
            for (row_i, img_c) in img.iter_mut().enumerate() {
                for (col_j, &tvj) in tv.iter().enumerate() {
                    *img_c = fq.add(*img_c, fq.mul(fmat[row_i][col_j], tvj));
                }
            }
            images.push(img);
        }
        let minus_tangent = half as u32 - oracle::fq_rank(fq, &images);
        let predicted_per_entry = ones(&parse_bits(&mp.restricted_bits)?);
        if minus_tangent != predicted_per_entry {
            return Err(Error::InternalCheck(format!(
                "minus part of X({}) has tangent {} from matrices, predicted {}",
                mp.delta_bits, minus_tangent, predicted_per_entry
            )));
        }
    }
    Ok(())
}

/// Solver-level check of the restriction surjectivity
/// Aut(X(ff)_{n+1}) -> Aut(X(ff)_n) on every Hom block and End block:
/// the level-(n+1) solution module, reduced mod p^n, must span the full
/// level-n solution module.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RestrictionReport {
    pub pairs_checked: u32,
    pub all_surjective: bool,
}

pub fn restriction_surjectivity_check(
    fq: &Fq,
    ff: &[u32],
    d: u32,
    n: u32,
) -> Result<RestrictionReport> {
    let big = WittRing::new(fq.clone(), n + 1)?;
    let small = WittRing::new(fq.clone(), n)?;
    let layers = layered_type_layers(ff, d)?;
    let bit_vecs: Vec<Vec<u8>> = layers
        .iter()
        .map(|b| parse_bits(&b.bits))
        .collect::<Result<_>>()?;
    let mut pairs_checked = 0u32;
    let mut all = true;
    for i in 0..bit_vecs.len() {
        for ip in i..bit_vecs.len() {
            let src_b = DieudonneModule::basic(&big, &bit_vecs[i])?;
            let dst_b = DieudonneModule::basic(&big, &bit_vecs[ip])?;
            let src_s = DieudonneModule::basic(&small, &bit_vecs[i])?;
            let dst_s = DieudonneModule::basic(&small, &bit_vecs[ip])?;
            let space_b = module_homs(&src_b, &dst_b)?;
            let space_s = module_homs(&src_s, &dst_s)?;
            // reduce the level-(n+1) generators mod p^n
            let pn = small.pn();
            let reduced: Vec<Vec<u64>> = space_b
                .solution
                .generators
                .iter()
                .map(|g| g.iter().map(|&c| c % pn).collect())
                .collect();
            // sanity: each reduced generator solves the level-n system
            for g in &reduced {
                if !space_s.solution.contains(g) {
                    return Err(Error::InternalCheck(
                        "reduction of a hom is not a hom".into(),
                    ));
                }
            }
            // surjective iff the span of the reductions has the full size;
            // the span is the image of the matrix whose columns are the
            // reduced generators.
            let coords = space_s.unknowns.count();
            let rows: Vec<Vec<u64>> = (0..coords)
                .map(|c| reduced.iter().map(|g| g[c]).collect())
                .collect();
            let span_sys = oracle::LinearizedProblem {
                p: small.p(),
                n,
                cols: reduced.len(),
                rows,
            };
            let image_log = span_sys.image_log_p_count();
            pairs_checked += 1;
            if image_log != space_s.solution.log_p_count() {
                all = false;
            }
        }
    }
    Ok(RestrictionReport {
        pairs_checked,
        all_surjective: all,
    })
}

/// The odd unitary family of signature (delta, delta+1) over the
/// quadratic extension: ff = (delta, delta+1) on two embeddings,
/// d = 2 delta + 1, blocks of multiplicities (delta, 1, delta).
pub fn odd_unitary_type(delta: u32) -> (Vec<u32>, u32) {
    (vec![delta, delta + 1], 2 * delta + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FqEl;

    #[test]
    fn odd_unitary_grid_matches_hand_computation() {
        // delta = 1: blocks (00, 01, 11) with multiplicities (1, 1, 1).
        let (ff, d) = odd_unitary_type(1);
        let ms = aut_prime_structure(&ff, d, 1).unwrap();
        assert_eq!(ms.blocks.len(), 3);
        assert_eq!(
            ms.blocks.iter().map(|b| b.multiplicity).collect::<Vec<_>>(),
            vec![1, 1, 1]
        );
        // unpolarized unipotent tangent: 2 delta^2 + 2 delta = 4.
        assert_eq!(ms.unipotent_tangent, 4);
        assert_eq!(ms.unipotent_order_exponent, 6);
        for delta in 1..=3u32 {
            let (ff, d) = odd_unitary_type(delta);
            let ms = aut_prime_structure(&ff, d, 1).unwrap();
            assert_eq!(ms.unipotent_tangent, 2 * delta * delta + 2 * delta);
            assert_eq!(
                ms.blocks.iter().map(|b| b.multiplicity).collect::<Vec<_>>(),
                vec![delta, 1, delta]
            );
        }
    }

    #[test]
    fn polarized_totals_for_the_odd_unitary_family() {
        for delta in 1..=4u32 {
            let (ff, d) = odd_unitary_type(delta);
            let pol = polarized_structure(&ff, d, 1).unwrap();
            // t(G(1)) = delta^2 + delta; order exponent delta^2 + 2 delta;
            // multiplicative rank delta^2.
            assert_eq!(pol.tangent, delta * delta + delta, "delta={delta}");
            assert_eq!(pol.order_exponent, delta * delta + 2 * delta);
            assert_eq!(pol.multiplicative_rank, delta * delta);
            // free: only (X_1, X_2); anti-diagonal: (X_1, X_3);
            // determined: (X_2, X_3).
            assert_eq!(pol.free, vec![(0, 1)]);
            assert_eq!(pol.antidiagonal, vec![(0, 2)]);
            assert_eq!(pol.determined, vec![(1, 2)]);
        }
    }

    #[test]
    fn filtration_matches_matrix_accounting() {
        for delta in 1..=3u32 {
            let (ff, d) = odd_unitary_type(delta);
            let rep = polarized_filtration(&ff, d, 1, 3).unwrap();
            assert_eq!(rep.r, 3);
            assert_eq!(rep.layers.len(), 2);
            // s = 1: Hom(X_1, X_2) = E^delta: order exp 2 delta, tangent delta.
            assert_eq!(rep.layers[0].order_exponent, 2 * delta);
            assert_eq!(rep.layers[0].tangent, delta);
            // s = 2: Hom(X_1, X_3)^-: mu_p^{delta^2}.
            assert_eq!(rep.layers[1].order_exponent, delta * delta);
            assert_eq!(rep.layers[1].tangent, delta * delta);
            assert!(rep.layers[1].factors[0].minus_part);
            // reductive quotient: GL_delta(W_1(F_9)) and U_1(F_9/F_3).
            assert_eq!(rep.reductive_gl_orders, vec![gl_order(9, delta, 1)]);
            assert_eq!(rep.reductive_unitary_order, Some(4)); // |U_1(F_3)| = 3 + 1
        }
    }

    #[test]
    fn gl_orders_match_brute_force() {
        // |GL_m(F_q)| by enumerating all matrices and ranking them.
        for (p, mdeg, m) in [(3u64, 1u32, 2u32), (3, 1, 3), (3, 2, 2)] {
            let fq = Fq::new(p, mdeg).unwrap();
            let q = fq.q();
            let total = q.pow(m * m);
            let mut invertible = 0u64;
            for code in 0..total {
                let mut mat = vec![vec![fq.zero(); m as usize]; m as usize];
                let mut c = code;
                for row in mat.iter_mut() {
                    for entry in row.iter_mut() {
                        *entry = FqEl((c % q) as u32);
                        c /= q;
                    }
                }
                if oracle::fq_rank(&fq, &mat) == m {
                    invertible += 1;
                }
            }
            assert_eq!(invertible as u128, gl_order(q, m, 1), "GL_{m}(F_{q})");
        }
    }

    #[test]
    fn gl_order_at_level_two_matches_brute_force() {
        // |GL_1(W_2(F_3))| = units of Z/9 = 6 = 3^{1} * (3 - 1).
        assert_eq!(gl_order(3, 1, 2), 6);
        // |GL_2(W_2(F_3))|: matrices over Z/9 with invertible reduction.
        let mut count = 0u64;
        for code in 0..9u64.pow(4) {
            let mut c = code;
            let mut entries = [0u64; 4];
            for e in entries.iter_mut() {
                *e = c % 9;
                c /= 9;
            }
            // invertible over Z/9 iff det is a unit mod 3
            let det = (entries[0] * entries[3] % 3 + 3 - entries[1] * entries[2] % 3) % 3;
            if det != 0 {
                count += 1;
            }
        }
        assert_eq!(count as u128, gl_order(3, 2, 2));
    }

    #[test]
    fn unitary_orders_match_brute_force() {
        // U_1(F_9/F_3): x with x * x^sigma = 1 in F_9: norm-one torus,
        // q + 1 = 4 elements.
        let fq = Fq::new(3, 2).unwrap();
        let mut count = 0;
        for a in fq.elements() {
            if a != fq.zero() && fq.mul(a, fq.frobenius(a, 1)) == fq.one() {
                count += 1;
            }
        }
        assert_eq!(count as u128, unitary_order(3, 1, 1));
        // U_2(F_9/F_3): x * conj(x)^T = id, brute force over 9^4 matrices.
        let conj = |x: FqEl| fq.frobenius(x, 1);
        let mut count2 = 0u64;
        for code in 0..9u64.pow(4) {
            let mut c = code;
            let mut e = [FqEl(0); 4];
            for v in e.iter_mut() {
                *v = FqEl((c % 9) as u32);
                c /= 9;
            }
            // rows (e0 e1; e2 e3); condition: M conj(M)^T = I
            let m00 = fq.add(fq.mul(e[0], conj(e[0])), fq.mul(e[1], conj(e[1])));
            let m01 = fq.add(fq.mul(e[0], conj(e[2])), fq.mul(e[1], conj(e[3])));
            let m10 = fq.add(fq.mul(e[2], conj(e[0])), fq.mul(e[3], conj(e[1])));
            let m11 = fq.add(fq.mul(e[2], conj(e[2])), fq.mul(e[3], conj(e[3])));
            if m00 == fq.one() && m11 == fq.one() && m01 == fq.zero() && m10 == fq.zero() {
                count2 += 1;
            }
        }
        assert_eq!(count2 as u128, unitary_order(3, 2, 1));
        // level 2 for U_1: kernel of reduction is the anti-invariants of
        // the residue field, size |kappa| = 3: total 12.
        let w2 = WittRing::new(fq.clone(), 2).unwrap();
        let mut count3 = 0;
        for a in 0..9u64 {
            for b in 0..9u64 {
                let x = crate::field::Wn(vec![a, b]);
                if !w2.is_unit(&x) {
                    continue;
                }
                let prod = w2.mul(&x, &w2.sigma(&x, 1));
                if prod == w2.one() {
                    count3 += 1;
                }
            }
        }
        assert_eq!(count3 as u128, unitary_order(3, 1, 2));
    }

    #[test]
    fn module_route_confirms_the_grid() {
        let ring = WittRing::new(Fq::new(3, 2).unwrap(), 1).unwrap();
        for delta in 1..=3u32 {
            let (ff, d) = odd_unitary_type(delta);
            module_route_grid_check(&ring, &ff, d).unwrap();
        }
        let ring2 = WittRing::new(Fq::new(3, 2).unwrap(), 2).unwrap();
        module_route_grid_check(&ring2, &odd_unitary_type(2).0, 5).unwrap();
    }

    #[test]
    fn restriction_is_surjective_on_hom_blocks() {
        let fq = Fq::new(3, 2).unwrap();
        let (ff, d) = odd_unitary_type(1);
        let rep = restriction_surjectivity_check(&fq, &ff, d, 1).unwrap();
        assert!(rep.all_surjective);
        assert_eq!(rep.pairs_checked, 6); // 3 End blocks + 3 Hom blocks
    }

    #[test]
    fn even_signature_is_rejected() {
        // ff values must pair to d under conjugation; (1, 2) with d = 4
        // violates it.
        assert!(polarized_structure(&[1, 2], 4, 1).is_err());
        // odd-length index sets cannot carry the quadratic involution
        assert!(polarized_structure(&[1, 1, 2], 3, 1).is_err());
    }
}
