//! Finite fields `F_q` (q = p^m, p an odd prime) and truncated Witt vectors
//! `W_n(F_q)` with their Frobenius.
//!
//! Field elements are indexed by their base-p polynomial encoding and
//! multiplied through discrete-log tables, so all arithmetic is exact table
//! lookups. The Witt ring is realized as the unramified finite local ring
//! `(Z/p^n)[x]/(m~(x))` for a monic lift `m~` of the field modulus; Witt
//! coordinates are exposed through the canonical bijection
//!
//! ```text
//! (c_0, ..., c_{n-1})  <->  sum_i p^i * Teich(c_i^{p^-i})
//! ```
//!
//! under which addition/multiplication of Witt vectors is plain ring
//! arithmetic, Frobenius is coordinate-wise p-th power, and the Teichmueller
//! lift of `c` is `(c, 0, ..., 0)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest field order for which tables are built eagerly.
const MAX_Q: u64 = 1 << 21;

// ---------------------------------------------------------------------------
// Polynomial helpers over F_p (coefficients in [0, p)).
// ---------------------------------------------------------------------------

fn poly_trim(c: &mut Vec<u64>) {
    while c.len() > 1 && *c.last().unwrap() == 0 {
        c.pop();
    }
}

fn poly_mul_mod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    poly_rem(&mut prod, modulus, p);
    prod
}

/// Reduce `a` modulo the monic polynomial `modulus` in place.
fn poly_rem(a: &mut Vec<u64>, modulus: &[u64], p: u64) {
    let d = modulus.len() - 1;
    while a.len() > d {
        let lead = *a.last().unwrap() % p;
        let shift = a.len() - 1 - d;
        if lead != 0 {
            for i in 0..d {
                let sub = (lead * modulus[i]) % p;
                a[shift + i] = (a[shift + i] + p * p - sub) % p;
            }
        }
        a.pop();
    }
    poly_trim(a);
    while a.len() < d {
        a.push(0);
    }
}

fn poly_pow_mod(base: &[u64], mut e: u64, modulus: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    acc.resize(modulus.len() - 1, 0);
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mul_mod(&acc, &b, modulus, p);
        }
        b = poly_mul_mod(&b, &b, modulus, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let inv_mod_p = |x: u64| -> u64 {
        // Fermat inverse; p is prime and x != 0.
        let mut acc = 1u64;
        let mut base = x % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc
    };
    let mut f = a.to_vec();
    let mut g = b.to_vec();
    poly_trim(&mut f);
    poly_trim(&mut g);
    while !(g.len() == 1 && g[0] == 0) {
        // f mod g with g made monic on the fly.
        let lg = *g.last().unwrap();
        let li = inv_mod_p(lg);
        let gm: Vec<u64> = g.iter().map(|&c| c * li % p).collect();
        let mut r = f.clone();
        while r.len() >= gm.len() && !(r.len() == 1 && r[0] == 0) {
            let lead = *r.last().unwrap();
            if lead == 0 {
                r.pop();
                poly_trim(&mut r);
                continue;
            }
            let shift = r.len() - gm.len();
            for i in 0..gm.len() {
                let sub = lead * gm[i] % p;
                r[shift + i] = (r[shift + i] + p * p - sub) % p;
            }
            poly_trim(&mut r);
        }
        f = g;
        g = r;
    }
    f
}

/// Rabin irreducibility test for a monic polynomial over F_p.
fn poly_is_irreducible(f: &[u64], p: u64) -> bool {
    let m = f.len() - 1;
    if m == 0 {
        return false;
    }
    // x^(p^m) == x mod f, and gcd(x^(p^(m/r)) - x, f) == 1 for prime r | m.
    let x = vec![0u64, 1];
    let mut xp = x.clone();
    poly_rem(&mut xp, f, p);
    let mut pow = xp.clone(); // x^(p^0) = x reduced
    let mut powers = Vec::with_capacity(m + 1);
    powers.push(pow.clone());
    for _ in 0..m {
        pow = poly_pow_mod(&pow, p, f, p);
        powers.push(pow.clone());
    }
    // powers[i] = x^(p^i) mod f
    let mut xm = powers[m].clone();
    // subtract x
    if xm.len() < 2 {
        xm.resize(2, 0);
    }
    xm[1] = (xm[1] + p - 1) % p;
    poly_trim(&mut xm);
    if !(xm.len() == 1 && xm[0] == 0) {
        return false;
    }
    let mut r = 2;
    let mut mm = m;
    let mut primes = Vec::new();
    while mm > 1 {
        if mm % r == 0 {
            primes.push(r);
            while mm % r == 0 {
                mm /= r;
            }
        }
        r += 1;
    }
    for r in primes {
        let mut g = powers[m / r].clone();
        if g.len() < 2 {
            g.resize(2, 0);
        }
        g[1] = (g[1] + p - 1) % p;
        poly_trim(&mut g);
        let gcd = poly_gcd(f, &g, p);
        if gcd.len() > 1 {
            return false;
        }
    }
    true
}

/// The deterministic modulus for F_{p^m}: the monic irreducible of degree m
/// whose coefficient encoding sum(c_i p^i) is smallest. For m = 1 this is x.
pub fn canonical_modulus(p: u64, m: u32) -> Vec<u64> {
    if m == 1 {
        return vec![0, 1];
    }
    let deg = m as usize;
    let count = p.pow(m);
    for code in 0..count {
        let mut f = Vec::with_capacity(deg + 1);
        let mut c = code;
        for _ in 0..deg {
            f.push(c % p);
            c /= p;
        }
        f.push(1); // monic
        if poly_is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_p");
}

// ---------------------------------------------------------------------------
// The field F_q.
// ---------------------------------------------------------------------------

/// An element of `F_q`, stored as its base-p polynomial encoding
/// `sum c_i p^i` (so `0` is zero and `1` is one for every field).
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqEl(pub u32);

impl fmt::Debug for FqEl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct FqTables {
    p: u64,
    m: u32,
    q: u64,
    modulus: Vec<u64>,
    /// exp[i] = encoding of g^i for a fixed generator g, length 2(q-1).
    exp: Vec<u32>,
    /// log[enc] for enc != 0; log[0] is unused.
    log: Vec<u32>,
}

/// The finite field `F_{p^m}` with table-backed exact arithmetic.
///
/// Cloning is cheap (shared tables). Elements from different `Fq` handles
/// are compatible exactly when `(p, m)` agree; the modulus is always the
/// canonical (smallest-encoding irreducible) one.
#[derive(Clone)]
pub struct Fq {
    t: Arc<FqTables>,
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.t.p, self.t.m)
    }
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.t.p == other.t.p && self.t.m == other.t.m
    }
}
impl Eq for Fq {}

impl Fq {
    /// Build `F_{p^m}` for an odd prime p. Errors on even/composite p or
    /// oversized q.
    pub fn new(p: u64, m: u32) -> Result<Fq> {
        if p < 3 || p % 2 == 0 {
            return Err(Error::BadParameter(format!(
                "p must be an odd prime, got {p}"
            )));
        }
        let mut d = 2;
        while d * d <= p {
            if p % d == 0 {
                return Err(Error::BadParameter(format!("p must be prime, got {p}")));
            }
            d += 1;
        }
        if m == 0 {
            return Err(Error::BadParameter("extension degree m must be >= 1".into()));
        }
        let q = p.checked_pow(m).filter(|&q| q <= MAX_Q).ok_or_else(|| {
            Error::Budget(format!("field order p^m = {p}^{m} exceeds the table budget"))
        })?;
        let modulus = canonical_modulus(p, m);
        // Find a multiplicative generator by trial over encodings.
        let deg = m as usize;
        let decode = |enc: u64| -> Vec<u64> {
            let mut v = Vec::with_capacity(deg);
            let mut c = enc;
            for _ in 0..deg {
                v.push(c % p);
                c /= p;
            }
            v
        };
        let encode = |poly: &[u64]| -> u64 {
            let mut e = 0u64;
            for &c in poly.iter().rev() {
                e = e * p + c;
            }
            e
        };
        let order = q - 1;
        let mut prime_factors = Vec::new();
        let mut o = order;
        let mut f = 2;
        while f * f <= o {
            if o % f == 0 {
                prime_factors.push(f);
                while o % f == 0 {
                    o /= f;
                }
            }
            f += 1;
        }
        if o > 1 {
            prime_factors.push(o);
        }
        let mut gen_enc = 0;
        'search: for cand in 2..q {
            let cp = decode(cand);
            for &r in &prime_factors {
                let pw = poly_pow_mod(&cp, order / r, &modulus, p);
                if encode(&pw) == 1 {
                    continue 'search;
                }
            }
            gen_enc = cand;
            break;
        }
        assert!(gen_enc != 0, "multiplicative generator exists for every F_q");
        let gp = decode(gen_enc);
        let mut exp = vec![0u32; 2 * (order as usize)];
        let mut log = vec![0u32; q as usize];
        let mut cur = vec![1u64];
        cur.resize(deg, 0);
        for i in 0..order as usize {
            let e = encode(&cur) as u32;
            exp[i] = e;
            exp[i + order as usize] = e;
            log[e as usize] = i as u32;
            cur = poly_mul_mod(&cur, &gp, &modulus, p);
        }
        Ok(Fq {
            t: Arc::new(FqTables {
                p,
                m,
                q,
                modulus,
                exp,
                log,
            }),
        })
    }

    pub fn p(&self) -> u64 {
        self.t.p
    }
    pub fn m(&self) -> u32 {
        self.t.m
    }
    pub fn q(&self) -> u64 {
        self.t.q
    }
    pub fn modulus(&self) -> &[u64] {
        &self.t.modulus
    }

    pub fn zero(&self) -> FqEl {
        FqEl(0)
    }
    pub fn one(&self) -> FqEl {
        FqEl(1)
    }

    /// Element from base-p digit coefficients (constant term first).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> FqEl {
        assert!(coeffs.len() <= self.t.m as usize, "too many coefficients");
        let mut e = 0u64;
        for &c in coeffs.iter().rev() {
            e = e * self.t.p + (c % self.t.p);
        }
        FqEl(e as u32)
    }

    /// The image of the integer n under Z -> F_q.
    pub fn from_int(&self, n: i64) -> FqEl {
        let p = self.t.p as i64;
        FqEl(((n % p + p) % p) as u32)
    }

    pub fn coeffs(&self, a: FqEl) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.t.m as usize);
        let mut c = a.0 as u64;
        for _ in 0..self.t.m {
            v.push(c % self.t.p);
            c /= self.t.p;
        }
        v
    }

    pub fn add(&self, a: FqEl, b: FqEl) -> FqEl {
        let p = self.t.p;
        let mut out = 0u64;
        let (mut x, mut y) = (a.0 as u64, b.0 as u64);
        let mut place = 1u64;
        for _ in 0..self.t.m {
            let d = (x % p + y % p) % p;
            out += d * place;
            place *= p;
            x /= p;
            y /= p;
        }
        FqEl(out as u32)
    }

    pub fn neg(&self, a: FqEl) -> FqEl {
        let p = self.t.p;
        let mut out = 0u64;
        let mut x = a.0 as u64;
        let mut place = 1u64;
        for _ in 0..self.t.m {
            let d = (p - x % p) % p;
            out += d * place;
            place *= p;
            x /= p;
        }
        FqEl(out as u32)
    }

    pub fn sub(&self, a: FqEl, b: FqEl) -> FqEl {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FqEl, b: FqEl) -> FqEl {
        if a.0 == 0 || b.0 == 0 {
            return FqEl(0);
        }
        let order = (self.t.q - 1) as usize;
        let i = self.t.log[a.0 as usize] as usize + self.t.log[b.0 as usize] as usize;
        let i = if i >= order { i - order } else { i };
        FqEl(self.t.exp[i])
    }

    pub fn inv(&self, a: FqEl) -> FqEl {
        assert!(a.0 != 0, "division by zero in F_q");
        let order = (self.t.q - 1) as usize;
        let i = (order - self.t.log[a.0 as usize] as usize) % order;
        FqEl(self.t.exp[i])
    }

    pub fn pow(&self, a: FqEl, e: u64) -> FqEl {
        if a.0 == 0 {
            return if e == 0 { FqEl(1) } else { FqEl(0) };
        }
        let order = (self.t.q - 1) as u64;
        let i = (self.t.log[a.0 as usize] as u64 * (e % order)) % order;
        FqEl(self.t.exp[i as usize])
    }

    /// sigma^k where sigma(x) = x^p is the arithmetic Frobenius. Negative k
    /// uses sigma^{-1} = sigma^{m-1}.
    pub fn frobenius(&self, a: FqEl, k: i64) -> FqEl {
        let m = self.t.m as i64;
        let k = ((k % m) + m) % m;
        self.pow(a, self.t.p.pow(k as u32))
    }

    /// All q elements, in encoding order (deterministic).
    pub fn elements(&self) -> impl Iterator<Item = FqEl> {
        (0..self.t.q as u32).map(FqEl)
    }

    /// The roots in F_q of a monic polynomial with F_p coefficients.
    pub fn roots_of_fp_poly(&self, poly: &[u64]) -> Vec<FqEl> {
        let mut roots = Vec::new();
        for a in self.elements() {
            let mut acc = FqEl(0);
            for &c in poly.iter().rev() {
                acc = self.add(self.mul(acc, a), self.from_int(c as i64));
            }
            if acc.0 == 0 {
                roots.push(a);
            }
        }
        roots
    }
}

// ---------------------------------------------------------------------------
// W_n(F_q): the length-n truncated Witt vectors, via unramified lifts.
// ---------------------------------------------------------------------------

/// An element of `W_n(F_q)` in its ring representation: the coefficient
/// vector (length m, entries in `[0, p^n)`) of a residue in
/// `(Z/p^n)[x]/(m~(x))`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Wn(pub Vec<u64>);

impl fmt::Debug for Wn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Wn{:?}", self.0)
    }
}

/// The ring `W_n(F_q)` of length-n Witt vectors, together with its
/// Frobenius automorphism and the Witt-coordinate bijection.
#[derive(Clone)]
pub struct WittRing {
    fq: Fq,
    n: u32,
    pn: u64,
    /// Monic lift of the field modulus, coefficients in Z/p^n.
    modulus: Vec<u64>,
    /// Matrix of sigma acting on coefficient vectors: column j is sigma(x^j).
    frob_mat: Vec<Vec<u64>>,
    /// Matrix of sigma^{-1}.
    frob_inv_mat: Vec<Vec<u64>>,
}

impl fmt::Debug for WittRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W_{}({:?})", self.n, self.fq)
    }
}

impl PartialEq for WittRing {
    fn eq(&self, other: &Self) -> bool {
        self.fq == other.fq && self.n == other.n
    }
}
impl Eq for WittRing {}

impl WittRing {
    pub fn new(fq: Fq, n: u32) -> Result<WittRing> {
        if n == 0 || n > 6 {
            return Err(Error::BadParameter(format!(
                "Witt length n must be in 1..=6, got {n}"
            )));
        }
        let p = fq.p();
        let pn = p.pow(n);
        let modulus: Vec<u64> = fq.modulus().to_vec(); // digit lift
        let m = fq.m() as usize;
        let mut ring = WittRing {
            fq,
            n,
            pn,
            modulus,
            frob_mat: vec![],
            frob_inv_mat: vec![],
        };
        // sigma(x) = the Hensel root of the modulus congruent to x^p mod p.
        let xp = if m == 1 {
            // F_p: the quotient is Z/p^n with x = 0, and sigma is trivial.
            ring.zero()
        } else {
            let mut x = ring.zero();
            x.0[1] = 1;
            ring.pow_u64(&x, p)
        };
        let root = ring.hensel_root(&xp);
        let mut pow = ring.one();
        let mut cols = Vec::with_capacity(m);
        for _ in 0..m {
            cols.push(pow.0.clone());
            pow = ring.mul(&pow, &root);
        }
        ring.frob_mat = cols;
        // sigma^{-1} = sigma^{m-1}
        let mut inv_cols: Vec<Vec<u64>> = (0..m)
            .map(|j| {
                let mut e = vec![0u64; m];
                e[j] = 1;
                e
            })
            .collect();
        for _ in 0..ring.fq.m() - 1 {
            inv_cols = inv_cols
                .iter()
                .map(|c| ring.apply_mat(&ring.frob_mat, c))
                .collect();
        }
        ring.frob_inv_mat = inv_cols;
        Ok(ring)
    }

    pub fn fq(&self) -> &Fq {
        &self.fq
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn p(&self) -> u64 {
        self.fq.p()
    }
    /// p^n, the additive exponent of the ring.
    pub fn pn(&self) -> u64 {
        self.pn
    }
    fn m(&self) -> usize {
        self.fq.m() as usize
    }

    pub fn zero(&self) -> Wn {
        Wn(vec![0; self.m()])
    }
    pub fn one(&self) -> Wn {
        let mut v = vec![0; self.m()];
        v[0] = 1;
        Wn(v)
    }
    pub fn from_int(&self, k: i64) -> Wn {
        let pn = self.pn as i64;
        let mut v = vec![0; self.m()];
        v[0] = ((k % pn + pn) % pn) as u64;
        Wn(v)
    }

    pub fn is_zero(&self, a: &Wn) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &Wn, b: &Wn) -> Wn {
        Wn(a.0
            .iter()
            .zip(&b.0)
            .map(|(&x, &y)| (x + y) % self.pn)
            .collect())
    }

    pub fn neg(&self, a: &Wn) -> Wn {
        Wn(a.0.iter().map(|&x| (self.pn - x) % self.pn).collect())
    }

    pub fn sub(&self, a: &Wn, b: &Wn) -> Wn {
        self.add(a, &self.neg(b))
    }

    pub fn scalar_int(&self, k: u64, a: &Wn) -> Wn {
        Wn(a.0.iter().map(|&x| (x * (k % self.pn)) % self.pn).collect())
    }

    pub fn mul(&self, a: &Wn, b: &Wn) -> Wn {
        let m = self.m();
        let mut prod = vec![0u128; 2 * m - 1];
        for i in 0..m {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..m {
                prod[i + j] += a.0[i] as u128 * b.0[j] as u128;
            }
        }
        // reduce mod monic modulus (degree m)
        let pn = self.pn as u128;
        for k in (m..2 * m - 1).rev() {
            let lead = prod[k] % pn;
            if lead != 0 {
                for i in 0..m {
                    let sub = lead * self.modulus[i] as u128 % pn;
                    prod[k - m + i] = prod[k - m + i] + pn * pn - sub;
                }
            }
            prod[k] = 0;
        }
        Wn(prod[..m].iter().map(|&x| (x % pn) as u64).collect())
    }

    pub fn pow_u64(&self, a: &Wn, mut e: u64) -> Wn {
        let mut acc = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    /// Residue of a in F_q (reduction mod p).
    pub fn residue(&self, a: &Wn) -> FqEl {
        let coeffs: Vec<u64> = a.0.iter().map(|&c| c % self.p()).collect();
        self.fq.from_coeffs(&coeffs)
    }

    pub fn is_unit(&self, a: &Wn) -> bool {
        self.residue(a).0 != 0
    }

    /// p-adic valuation: the largest v <= n with a in p^v W_n (v = n for 0).
    pub fn valuation(&self, a: &Wn) -> u32 {
        let p = self.p();
        let mut v = self.n;
        for &c in &a.0 {
            if c == 0 {
                continue;
            }
            let mut cv = 0;
            let mut cc = c;
            while cc % p == 0 {
                cc /= p;
                cv += 1;
            }
            v = v.min(cv);
        }
        v
    }

    /// Exact division by p^k of an element with valuation >= k (asserts).
    pub fn div_exact_p(&self, a: &Wn, k: u32) -> Wn {
        assert!(self.valuation(a) >= k, "div_exact_p: valuation too small");
        let pk = self.p().pow(k);
        Wn(a.0.iter().map(|&c| c / pk).collect())
    }

    pub fn inv(&self, a: &Wn) -> Wn {
        assert!(self.is_unit(a), "inverting a non-unit in W_n(F_q)");
        // Invert the residue via field tables, then Hensel-lift:
        // y <- y(2 - ay) doubles p-adic precision each round.
        let r = self.residue(a);
        let rinv = self.fq.inv(r);
        let mut y = self.teichmuller_ring(rinv); // some unit lift of r^{-1}
        for _ in 0..self.n {
            let ay = self.mul(a, &y);
            let two = self.from_int(2);
            let corr = self.sub(&two, &ay);
            y = self.mul(&y, &corr);
        }
        y
    }

    fn apply_mat(&self, mat: &[Vec<u64>], coeffs: &[u64]) -> Vec<u64> {
        let m = self.m();
        let mut out = vec![0u64; m];
        for (j, col) in mat.iter().enumerate() {
            let c = coeffs[j] % self.pn;
            if c == 0 {
                continue;
            }
            for i in 0..m {
                out[i] = (out[i] + (c as u128 * col[i] as u128 % self.pn as u128) as u64)
                    % self.pn;
            }
        }
        out
    }

    /// The Frobenius sigma^k of the ring (lift of x -> x^(p^k)).
    pub fn sigma(&self, a: &Wn, k: i64) -> Wn {
        let m = self.fq.m() as i64;
        let k = ((k % m) + m) % m;
        let mut v = a.0.clone();
        for _ in 0..k {
            v = self.apply_mat(&self.frob_mat, &v);
        }
        Wn(v)
    }

    pub fn sigma_inv(&self, a: &Wn) -> Wn {
        Wn(self.apply_mat(&self.frob_inv_mat, &a.0))
    }

    /// Hensel root of the (lifted) modulus congruent to `approx` mod p.
    /// `approx` must reduce to a simple root of the modulus mod p.
    fn hensel_root(&self, approx: &Wn) -> Wn {
        let mut r = approx.clone();
        for _ in 0..self.n {
            let (f, fp) = self.eval_modulus(&r);
            let fp_inv = self.inv(&fp);
            let delta = self.mul(&f, &fp_inv);
            r = self.sub(&r, &delta);
        }
        let (f, _) = self.eval_modulus(&r);
        assert!(self.is_zero(&f), "Hensel iteration must converge at level n");
        r
    }

    /// Evaluate the lifted modulus and its derivative at r (in the ring).
    fn eval_modulus(&self, r: &Wn) -> (Wn, Wn) {
        let m = self.m();
        let mut f = self.one(); // leading monic coefficient
        let mut fp = self.zero();
        // Horner for f and f' simultaneously over coefficients degree m..0.
        for i in (0..m).rev() {
            fp = self.add(&self.mul(&fp, r), &f);
            let ci = self.from_int(self.modulus[i] as i64);
            f = self.add(&self.mul(&f, r), &ci);
        }
        (f, fp)
    }

    /// Teichmueller lift of a field element into the ring representation:
    /// the unique root of x^q = x congruent to it mod p.
    pub fn teichmuller_ring(&self, a: FqEl) -> Wn {
        let digits = self.fq.coeffs(a);
        let mut t = Wn(digits);
        if self.n == 1 {
            return t;
        }
        for _ in 0..(self.n - 1) {
            t = self.pow_u64(&t, self.fq.q());
        }
        t
    }

    // -- Witt coordinates ---------------------------------------------------

    /// Ring element of the Witt vector with coordinates `(c_0, .., c_{n-1})`:
    /// sum_i p^i Teich(c_i^{p^-i}).
    pub fn from_witt_coords(&self, coords: &[FqEl]) -> Wn {
        assert_eq!(coords.len(), self.n as usize, "coordinate length != n");
        let mut acc = self.zero();
        let mut pi = 1u64;
        for (i, &c) in coords.iter().enumerate() {
            let tw = self.fq.frobenius(c, -(i as i64));
            let t = self.teichmuller_ring(tw);
            acc = self.add(&acc, &self.scalar_int(pi, &t));
            pi *= self.p();
        }
        acc
    }

    /// Witt coordinates of a ring element (inverse of `from_witt_coords`).
    pub fn witt_coords(&self, a: &Wn) -> Vec<FqEl> {
        let mut coords = Vec::with_capacity(self.n as usize);
        let mut w = a.clone();
        let mut level = self.n;
        let mut ring = self.clone();
        let mut i = 0i64;
        while level > 0 {
            let r = ring.residue(&w);
            coords.push(ring.fq.frobenius(r, i));
            if level == 1 {
                break;
            }
            let t = ring.teichmuller_ring(r);
            let diff = ring.sub(&w, &t);
            // divide by p and drop one level of precision
            let next = WittRing::new(ring.fq.clone(), level - 1).expect("smaller level");
            w = Wn(diff.0.iter().map(|&c| (c / ring.p()) % next.pn).collect());
            ring = next;
            level -= 1;
            i += 1;
        }
        coords
    }
}

// ---------------------------------------------------------------------------
// Witt vectors in coordinates (the I/O-facing representation).
// ---------------------------------------------------------------------------

/// A truncated Witt vector over F_q in coordinates. All arithmetic goes
/// through the ring representation of its `WittRing`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WittVec(pub Vec<FqEl>);

impl WittRing {
    pub fn witt_zero(&self) -> WittVec {
        WittVec(vec![FqEl(0); self.n as usize])
    }

    /// Teichmueller lift: (a, 0, ..., 0).
    pub fn teichmuller(&self, a: FqEl) -> WittVec {
        let mut v = vec![FqEl(0); self.n as usize];
        v[0] = a;
        WittVec(v)
    }

    pub fn witt_add(&self, a: &WittVec, b: &WittVec) -> WittVec {
        WittVec(self.witt_coords(&self.add(
            &self.from_witt_coords(&a.0),
            &self.from_witt_coords(&b.0),
        )))
    }

    pub fn witt_mul(&self, a: &WittVec, b: &WittVec) -> WittVec {
        WittVec(self.witt_coords(&self.mul(
            &self.from_witt_coords(&a.0),
            &self.from_witt_coords(&b.0),
        )))
    }

    pub fn witt_neg(&self, a: &WittVec) -> WittVec {
        WittVec(self.witt_coords(&self.neg(&self.from_witt_coords(&a.0))))
    }

    /// Witt-vector Frobenius: coordinate-wise p-th power (F_q is perfect).
    pub fn witt_frobenius(&self, a: &WittVec) -> WittVec {
        WittVec(a.0.iter().map(|&c| self.fq.frobenius(c, 1)).collect())
    }

    /// Verschiebung shift (0, c_0, ..., c_{n-2}); satisfies F(V(w)) = p w.
    pub fn verschiebung(&self, a: &WittVec) -> WittVec {
        let mut v = vec![FqEl(0); self.n as usize];
        for i in 1..self.n as usize {
            v[i] = a.0[i - 1];
        }
        WittVec(v)
    }
}

/// The canonical embedding of `W_n(F_{p^e})` into `W_n(F_{p^m})` (e | m):
/// sends the generator of the small ring to a fixed Hensel-lifted root of
/// the small modulus. The e distinct embeddings are sigma^i of this one.
pub struct SubringEmbedding {
    pub small: WittRing,
    pub big: WittRing,
    /// column j = image of x_small^j in big's coefficient space
    cols: Vec<Wn>,
}

impl SubringEmbedding {
    pub fn new(small: &WittRing, big: &WittRing) -> Result<SubringEmbedding> {
        if small.p() != big.p() || small.n() != big.n() {
            return Err(Error::BadParameter(
                "subring embedding needs equal p and Witt length".into(),
            ));
        }
        let e = small.fq().m();
        let m = big.fq().m();
        if m % e != 0 {
            return Err(Error::BadParameter(format!(
                "F_p^{e} does not embed in F_p^{m}"
            )));
        }
        // Deterministic root: smallest-encoding root of the small modulus in
        // the big field, Hensel-lifted.
        let roots = big.fq().roots_of_fp_poly(small.fq().modulus());
        let r0 = *roots
            .iter()
            .min()
            .expect("the small modulus splits in the big field");
        let approx = big.teichmuller_ring(r0); // a unit-ish lift of the root
        // Hensel against the small modulus lifted with digit coefficients.
        let mut r = approx;
        for _ in 0..big.n() {
            let (mut f, mut fp) = (big.one(), big.zero());
            for i in (0..e as usize).rev() {
                fp = big.add(&big.mul(&fp, &r), &f);
                let ci = big.from_int(small.modulus[i] as i64);
                f = big.add(&big.mul(&f, &r), &ci);
            }
            let corr = big.mul(&f, &big.inv(&fp));
            r = big.sub(&r, &corr);
        }
        let mut cols = Vec::with_capacity(e as usize);
        let mut pw = big.one();
        for _ in 0..e {
            cols.push(pw.clone());
            pw = big.mul(&pw, &r);
        }
        Ok(SubringEmbedding {
            small: small.clone(),
            big: big.clone(),
            cols,
        })
    }

    /// The i-th embedding tau_i = sigma^i . tau_0 applied to a small-ring
    /// element.
    pub fn embed(&self, a: &Wn, i: u32) -> Wn {
        let mut acc = self.big.zero();
        for (j, col) in self.cols.iter().enumerate() {
            let c = a.0[j];
            acc = self.big.add(&acc, &self.big.scalar_int(c, col));
        }
        self.big.sigma(&acc, i as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_moduli_are_the_expected_ones() {
        // x^2 + 1 is the first irreducible quadratic over F_3.
        assert_eq!(canonical_modulus(3, 2), vec![1, 0, 1]);
        // x^3 + 2x + 1 over F_3.
        assert_eq!(canonical_modulus(3, 3), vec![1, 2, 0, 1]);
        // x^2 + 2 over F_5 (x^2+1 has root 2, x^2+2 has no root).
        assert_eq!(canonical_modulus(5, 2), vec![2, 0, 1]);
    }

    #[test]
    fn fq_field_axioms_exhaustive_small() {
        for (p, m) in [(3u64, 1u32), (3, 2), (5, 1), (3, 3)] {
            let f = Fq::new(p, m).unwrap();
            let els: Vec<FqEl> = f.elements().collect();
            assert_eq!(els.len() as u64, f.q());
            for &a in &els {
                assert_eq!(f.add(a, f.zero()), a);
                assert_eq!(f.mul(a, f.one()), a);
                assert_eq!(f.add(a, f.neg(a)), f.zero());
                if a != f.zero() {
                    assert_eq!(f.mul(a, f.inv(a)), f.one());
                }
                // Frobenius is additive and fixes exactly F_p at k = 1 iff m = 1.
                assert_eq!(f.frobenius(a, m as i64), a);
            }
            for &a in &els {
                for &b in &els {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(
                        f.frobenius(f.add(a, b), 1),
                        f.add(f.frobenius(a, 1), f.frobenius(b, 1))
                    );
                    assert_eq!(
                        f.frobenius(f.mul(a, b), 1),
                        f.mul(f.frobenius(a, 1), f.frobenius(b, 1))
                    );
                }
            }
        }
    }

    #[test]
    fn witt_ring_over_fp_is_z_mod_pn() {
        // W_n(F_p) =~ Z/p^n: check the coordinate bijection is a ring iso
        // exhaustively for p in {3, 5}, n in {1, 2, 3}.
        for p in [3u64, 5] {
            for n in [1u32, 2, 3] {
                let f = Fq::new(p, 1).unwrap();
                let w = WittRing::new(f.clone(), n).unwrap();
                let pn = p.pow(n);
                // Every ring element is from_int of a unique integer.
                for a in 0..pn {
                    for b in 0..pn {
                        let wa = w.from_int(a as i64);
                        let wb = w.from_int(b as i64);
                        assert_eq!(w.add(&wa, &wb), w.from_int(((a + b) % pn) as i64));
                        assert_eq!(w.mul(&wa, &wb), w.from_int(((a * b) % pn) as i64));
                        // coordinates round-trip
                        let ca = w.witt_coords(&wa);
                        assert_eq!(w.from_witt_coords(&ca), wa);
                    }
                }
            }
        }
    }

    #[test]
    fn witt_examples_in_w2_f3() {
        // 1 + 1 + 1 = image of 3 = (0, 1); 2 * 2 = image of 4 = (1, 1)... in
        // coordinates: 4 = 1 + 3, Teich digits of 4 in Z/9: 4 mod 3 = 1,
        // (4 - 1)/3 = 1 -> coords (1, 1).
        let f = Fq::new(3, 1).unwrap();
        let w = WittRing::new(f, 2).unwrap();
        let one = w.teichmuller(FqEl(1));
        let s = w.witt_add(&w.witt_add(&one, &one), &one);
        assert_eq!(w.from_witt_coords(&s.0), w.from_int(3));
        assert_eq!(s.0, vec![FqEl(0), FqEl(1)]);
        let two = WittVec(w.witt_coords(&w.from_int(2)));
        let four = w.witt_mul(&two, &two);
        assert_eq!(w.from_witt_coords(&four.0), w.from_int(4));
    }

    #[test]
    fn ghost_components_match_after_lifting() {
        // For W_n(F_p), the k-th ghost component of a Witt sum/product agrees
        // with the ghost-arithmetic mod p^{k+1} after lifting coordinates to
        // integer digits.
        let ghost = |coords: &[FqEl], k: usize, p: u64| -> u128 {
            let mut acc: u128 = 0;
            for i in 0..=k {
                let c = coords[i].0 as u128;
                let e = p.pow((k - i) as u32);
                let mut pw: u128 = 1;
                for _ in 0..e {
                    pw *= c;
                }
                acc += (p as u128).pow(i as u32) * pw;
            }
            acc
        };
        for p in [3u64, 5] {
            let f = Fq::new(p, 1).unwrap();
            let n = 3u32;
            let w = WittRing::new(f, n).unwrap();
            let pn = p.pow(n);
            for a in 0..pn.min(40) {
                for b in 0..pn.min(40) {
                    let wa = WittVec(w.witt_coords(&w.from_int(a as i64)));
                    let wb = WittVec(w.witt_coords(&w.from_int(b as i64)));
                    let sum = w.witt_add(&wa, &wb);
                    let prod = w.witt_mul(&wa, &wb);
                    for k in 0..n as usize {
                        let md = (p as u128).pow(k as u32 + 1);
                        assert_eq!(
                            ghost(&sum.0, k, p) % md,
                            (ghost(&wa.0, k, p) + ghost(&wb.0, k, p)) % md,
                            "ghost addition mismatch"
                        );
                        assert_eq!(
                            ghost(&prod.0, k, p) % md,
                            (ghost(&wa.0, k, p) * ghost(&wb.0, k, p)) % md,
                            "ghost multiplication mismatch"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_is_coordinatewise_p_power() {
        let f = Fq::new(3, 2).unwrap();
        let w = WittRing::new(f.clone(), 2).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                let v = WittVec(vec![a, b]);
                let lhs = w.sigma(&w.from_witt_coords(&v.0), 1);
                let rhs = w.from_witt_coords(&w.witt_frobenius(&v).0);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn teichmuller_is_multiplicative() {
        let f = Fq::new(3, 2).unwrap();
        let w = WittRing::new(f.clone(), 3).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                let ta = w.teichmuller_ring(a);
                let tb = w.teichmuller_ring(b);
                assert_eq!(w.mul(&ta, &tb), w.teichmuller_ring(f.mul(a, b)));
            }
        }
    }

    #[test]
    fn verschiebung_satisfies_fv_equals_p() {
        let f = Fq::new(3, 2).unwrap();
        let w = WittRing::new(f.clone(), 3).unwrap();
        for a in f.elements().take(20) {
            let v = WittVec(vec![a, f.frobenius(a, 1), f.add(a, f.one())]);
            let fv = w.witt_frobenius(&w.verschiebung(&v));
            let pv = w.witt_coords(&w.scalar_int(3, &w.from_witt_coords(&v.0)));
            assert_eq!(fv.0, pv, "F(V(w)) = p w in Witt coordinates");
        }
    }

    #[test]
    fn sigma_is_a_ring_automorphism_of_order_m() {
        let f = Fq::new(3, 3).unwrap();
        let w = WittRing::new(f.clone(), 2).unwrap();
        let x = Wn({
            let mut v = vec![0; 3];
            v[1] = 1;
            v
        });
        let mut y = x.clone();
        for _ in 0..3 {
            y = w.sigma(&y, 1);
        }
        assert_eq!(y, x, "sigma^m = id");
        assert_eq!(w.sigma(&w.sigma_inv(&x), 1), x, "sigma of sigma-inverse is id");
        // homomorphism on a sample
        let a = w.from_int(5);
        let s = w.add(&a, &x);
        assert_eq!(w.sigma(&s, 1), w.add(&w.sigma(&a, 1), &w.sigma(&x, 1)));
        let m = w.mul(&a, &x);
        assert_eq!(w.sigma(&m, 1), w.mul(&w.sigma(&a, 1), &w.sigma(&x, 1)));
    }

    #[test]
    fn subring_embedding_is_a_ring_map() {
        let small = WittRing::new(Fq::new(3, 1).unwrap(), 2).unwrap();
        let big = WittRing::new(Fq::new(3, 2).unwrap(), 2).unwrap();
        let emb = SubringEmbedding::new(&small, &big).unwrap();
        for a in 0..9i64 {
            for b in 0..9i64 {
                let (wa, wb) = (small.from_int(a), small.from_int(b));
                let s = small.add(&wa, &wb);
                let m = small.mul(&wa, &wb);
                assert_eq!(emb.embed(&s, 0), big.add(&emb.embed(&wa, 0), &emb.embed(&wb, 0)));
                assert_eq!(emb.embed(&m, 0), big.mul(&emb.embed(&wa, 0), &emb.embed(&wb, 0)));
            }
        }
        // The two embeddings of W_2(F_9) into itself... here: embeddings of
        // F_3-Witt ring are all equal since e = 1.
        let e2 = SubringEmbedding::new(&big, &big).unwrap();
        let x = big.from_witt_coords(&[FqEl(2), FqEl(5)]);
        assert_eq!(e2.embed(&x, 0), x, "self-embedding tau_0 is the identity");
        assert_eq!(e2.embed(&x, 1), big.sigma(&x, 1), "tau_1 = sigma");
    }
}
