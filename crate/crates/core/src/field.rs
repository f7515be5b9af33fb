//! Exact arithmetic in GF(p^r), the quadratic-residue character, and
//! primitive-root machinery.
//!
//! Elements are stored in the polynomial basis: `coeffs[i]` multiplies `x^i`
//! and every coefficient lies in `[0, p)`. The canonical index of an element
//! is `sum coeffs[i] * p^i`, a fixed bijection GF(q) <-> [0, q) that the rest
//! of the crate uses to label graph vertices. Both the reducing polynomial
//! and the primitive root are chosen canonically (smallest in their
//! respective orders), so identical parameters always produce identical
//! labelings.

use crate::error::{Error, Result};
use std::fmt;

/// Default refusal threshold for `q = p^r`. Everything downstream keeps a
/// dense `q x q` adjacency, so fields beyond this are refused unless the
/// caller raises the cap explicitly.
pub const DEFAULT_Q_CAP: u64 = 1 << 20;

/// Value of the quadratic-residue character: `+1` on nonzero squares, `-1`
/// on non-squares, `0` on the zero element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharValue {
    MinusOne,
    Zero,
    PlusOne,
}

impl CharValue {
    /// The character value as an integer in {-1, 0, +1}.
    pub fn value(self) -> i64 {
        match self {
            CharValue::MinusOne => -1,
            CharValue::Zero => 0,
            CharValue::PlusOne => 1,
        }
    }
}

/// An element of GF(p^r) in polynomial-basis coordinates.
///
/// The coefficient vector always has length `r`; elements only make sense
/// relative to the [`FieldSpec`] that produced them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coeffs: Vec<u64>,
}

impl FieldElement {
    /// Coefficients, lowest degree first.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if wrote {
                write!(f, " + ")?;
            }
            match i {
                0 => write!(f, "{c}")?,
                1 if c == 1 => write!(f, "x")?,
                1 => write!(f, "{c}x")?,
                _ if c == 1 => write!(f, "x^{i}")?,
                _ => write!(f, "{c}x^{i}")?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A validated description of GF(p^r): the prime, the extension degree, and
/// the canonical monic irreducible reducing polynomial.
///
/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    p: u64,
    r: u32,
    q: u64,
    /// `r + 1` coefficients, lowest degree first, leading coefficient 1.
    modulus: Vec<u64>,
}

impl FieldSpec {
    /// Builds GF(p^r) with the canonical (lexicographically smallest monic
    /// irreducible) reducing polynomial and the default q cap.
    pub fn new(p: u64, r: u32) -> Result<Self> {
        Self::with_cap(p, r, DEFAULT_Q_CAP)
    }

    /// Like [`FieldSpec::new`] but with an explicit cap on `q`.
    pub fn with_cap(p: u64, r: u32, q_cap: u64) -> Result<Self> {
        let q = validate_params(p, r, q_cap)?;
        let modulus = find_irreducible(p, r)?;
        Ok(FieldSpec { p, r, q, modulus })
    }

    /// Builds the field with a caller-supplied reducing polynomial, which is
    /// validated to be monic of degree `r` and irreducible over GF(p).
    pub fn with_modulus(p: u64, r: u32, modulus: Vec<u64>) -> Result<Self> {
        let q = validate_params(p, r, DEFAULT_Q_CAP)?;
        if modulus.len() != r as usize + 1 {
            return Err(Error::InvalidSpec(format!(
                "modulus must have {} coefficients, got {}",
                r + 1,
                modulus.len()
            )));
        }
        if modulus[r as usize] != 1 {
            return Err(Error::InvalidSpec("modulus must be monic".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidSpec(
                "modulus coefficients must lie in [0, p)".into(),
            ));
        }
        if r > 1 && !poly_is_irreducible(p, &modulus) {
            return Err(Error::InvalidSpec(format!(
                "polynomial is reducible over GF({p})"
            )));
        }
        Ok(FieldSpec { p, r, q, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// The field order `q = p^r`.
    pub fn q(&self) -> u64 {
        self.q
    }

    /// The reducing polynomial, lowest degree first (`r + 1` coefficients).
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// True when `q = 1 (mod 4)`, the congruence every graph construction
    /// requires.
    pub fn is_graph_admissible(&self) -> bool {
        self.q % 4 == 1
    }

    /// The additive identity.
    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coeffs: vec![0; self.r as usize],
        }
    }

    /// The multiplicative identity.
    pub fn one(&self) -> FieldElement {
        self.element_from_index(1).expect("q >= 2")
    }

    /// Builds an element from explicit coefficients (length `r`, each in
    /// `[0, p)`).
    pub fn element(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() != self.r as usize {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                self.r,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidArgument(format!(
                "coefficients must lie in [0, {})",
                self.p
            )));
        }
        Ok(FieldElement {
            coeffs: coeffs.to_vec(),
        })
    }

    /// Inverse of [`FieldSpec::index_of`]: decodes a canonical index into
    /// base-p digits.
    pub fn element_from_index(&self, index: u64) -> Result<FieldElement> {
        if index >= self.q {
            return Err(Error::InvalidArgument(format!(
                "index {index} out of range for q = {}",
                self.q
            )));
        }
        let mut coeffs = vec![0; self.r as usize];
        let mut rest = index;
        for c in coeffs.iter_mut() {
            *c = rest % self.p;
            rest /= self.p;
        }
        Ok(FieldElement { coeffs })
    }

    /// Canonical index `sum coeffs[i] * p^i` in `[0, q)`.
    pub fn index_of(&self, a: &FieldElement) -> u64 {
        let mut index = 0;
        for &c in a.coeffs.iter().rev() {
            index = index * self.p + c;
        }
        index
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| {
                let s = x + y;
                if s >= self.p {
                    s - self.p
                } else {
                    s
                }
            })
            .collect();
        FieldElement { coeffs }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| if x >= y { x - y } else { x + self.p - y })
            .collect();
        FieldElement { coeffs }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        self.sub(&self.zero(), a)
    }

    /// Schoolbook product followed by reduction modulo the field polynomial.
    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let r = self.r as usize;
        if r == 1 {
            return FieldElement {
                coeffs: vec![mulmod(a.coeffs[0], b.coeffs[0], self.p)],
            };
        }
        let mut prod = vec![0u64; 2 * r - 1];
        for (i, &ai) in a.coeffs.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.coeffs.iter().enumerate() {
                prod[i + j] = addmod(prod[i + j], mulmod(ai, bj, self.p), self.p);
            }
        }
        // Reduce x^(r+k) via the monic modulus: x^r = -(m_0 + ... + m_{r-1} x^{r-1}).
        for d in (r..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for k in 0..r {
                let t = mulmod(c, self.modulus[k], self.p);
                prod[d - r + k] = submod(prod[d - r + k], t, self.p);
            }
        }
        prod.truncate(r);
        FieldElement { coeffs: prod }
    }

    /// `a^e` by square-and-multiply.
    pub fn pow(&self, a: &FieldElement, mut e: u64) -> FieldElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via `a^(q-2)`.
    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if self.is_zero(a) {
            return Err(Error::ZeroInversion);
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn is_zero(&self, a: &FieldElement) -> bool {
        a.coeffs.iter().all(|&c| c == 0)
    }

    /// The quadratic-residue character `chi(a) = a^((q-1)/2)`, computed by
    /// square-and-multiply. Requires odd `p`.
    pub fn chi(&self, a: &FieldElement) -> CharValue {
        assert!(self.p % 2 == 1, "chi requires odd characteristic");
        if self.is_zero(a) {
            return CharValue::Zero;
        }
        let v = self.pow(a, (self.q - 1) / 2);
        if v == self.one() {
            CharValue::PlusOne
        } else {
            debug_assert_eq!(v, self.neg(&self.one()));
            CharValue::MinusOne
        }
    }

    /// The canonically smallest element (by canonical index) of
    /// multiplicative order `q - 1`, verified against every prime divisor
    /// of `q - 1`.
    pub fn primitive_root(&self) -> FieldElement {
        let prime_divisors = distinct_prime_factors(self.q - 1);
        for idx in 1..self.q {
            let cand = self.element_from_index(idx).expect("index < q");
            let primitive = prime_divisors
                .iter()
                .all(|&l| self.pow(&cand, (self.q - 1) / l) != self.one());
            if primitive {
                return cand;
            }
        }
        unreachable!("every finite field has a primitive root")
    }

    /// Discrete-log table with respect to `root`, built in one pass over the
    /// `q - 1` powers. Fails if `root` is not primitive.
    pub fn power_class_table(&self, root: &FieldElement) -> Result<PowerClassTable> {
        let mut dlog = vec![u32::MAX; self.q as usize];
        let mut acc = self.one();
        for j in 0..self.q - 1 {
            let idx = self.index_of(&acc) as usize;
            if dlog[idx] != u32::MAX {
                return Err(Error::InvalidArgument(format!(
                    "element with index {} is not a primitive root",
                    self.index_of(root)
                )));
            }
            dlog[idx] = j as u32;
            acc = self.mul(&acc, root);
        }
        Ok(PowerClassTable { q: self.q, dlog })
    }
}

/// Discrete logarithms of every nonzero element with respect to a fixed
/// primitive root, exposing the exponent-mod-4 classes the Peisert
/// construction partitions differences into.
#[derive(Debug, Clone)]
pub struct PowerClassTable {
    q: u64,
    /// `dlog[index] = j` where the element equals `root^j`; `u32::MAX` marks
    /// the zero element.
    dlog: Vec<u32>,
}

impl PowerClassTable {
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Full discrete log of the element with the given canonical index, or
    /// `None` for zero.
    pub fn dlog_of_index(&self, index: u64) -> Option<u64> {
        match self.dlog[index as usize] {
            u32::MAX => None,
            j => Some(j as u64),
        }
    }

    /// The exponent mod 4 of a nonzero element, or `None` for zero.
    pub fn class_of_index(&self, index: u64) -> Option<u8> {
        self.dlog_of_index(index).map(|j| (j % 4) as u8)
    }
}

fn validate_params(p: u64, r: u32, q_cap: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::InvalidSpec(format!("p = {p} is not prime")));
    }
    if r == 0 {
        return Err(Error::InvalidSpec("extension degree r must be >= 1".into()));
    }
    let mut q: u64 = 1;
    for _ in 0..r {
        q = q
            .checked_mul(p)
            .ok_or_else(|| Error::ResourceLimit(format!("p^r overflows for p = {p}, r = {r}")))?;
        if q > q_cap {
            return Err(Error::ResourceLimit(format!(
                "q = p^r exceeds the cap {q_cap} (raise it explicitly for larger fields)"
            )));
        }
    }
    Ok(q)
}

/// Deterministic trial-division primality check; fine for the sizes the q
/// cap allows.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors of `n`, ascending.
pub fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The lexicographically smallest monic irreducible polynomial of degree `r`
/// over GF(p), ordering the non-leading coefficient tuples
/// `(c_0, ..., c_{r-1})` ascending with `c_0` most significant. Degree 1
/// returns `x`.
pub fn find_irreducible(p: u64, r: u32) -> Result<Vec<u64>> {
    if !is_prime(p) {
        return Err(Error::InvalidSpec(format!("p = {p} is not prime")));
    }
    if r == 0 {
        return Err(Error::InvalidSpec("degree must be >= 1".into()));
    }
    let r = r as usize;
    if r == 1 {
        return Ok(vec![0, 1]);
    }
    let mut coeffs = vec![0u64; r + 1];
    coeffs[r] = 1;
    loop {
        if poly_is_irreducible(p, &coeffs) {
            return Ok(coeffs);
        }
        // Advance the tuple (c_0, ..., c_{r-1}) lexicographically: bump the
        // least significant position, which is c_{r-1}.
        let mut pos = r - 1;
        loop {
            coeffs[pos] += 1;
            if coeffs[pos] < p {
                break;
            }
            coeffs[pos] = 0;
            if pos == 0 {
                // Exhausted all monic candidates; cannot happen since
                // irreducibles of every degree exist over GF(p).
                return Err(Error::InvalidSpec(format!(
                    "no irreducible polynomial of degree {r} over GF({p})"
                )));
            }
            pos -= 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Polynomial arithmetic over GF(p) on coefficient vectors, used only by the
// irreducibility test.
// ---------------------------------------------------------------------------

fn addmod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

fn submod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    acc
}

fn poly_trim(v: &mut Vec<u64>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
}

fn poly_deg(v: &[u64]) -> usize {
    debug_assert!(v.len() == 1 || *v.last().unwrap() != 0);
    v.len() - 1
}

fn poly_is_zero(v: &[u64]) -> bool {
    v.iter().all(|&c| c == 0)
}

/// `a * b mod f` over GF(p); `f` monic.
fn poly_mulmod(p: u64, a: &[u64], b: &[u64], f: &[u64]) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = addmod(prod[i + j], mulmod(ai, bj, p), p);
        }
    }
    poly_rem(p, prod, f)
}

/// Remainder of `a` modulo monic `f` over GF(p).
fn poly_rem(p: u64, mut a: Vec<u64>, f: &[u64]) -> Vec<u64> {
    let df = f.len() - 1;
    for d in (df..a.len()).rev() {
        let c = a[d];
        if c == 0 {
            continue;
        }
        a[d] = 0;
        for k in 0..df {
            let t = mulmod(c, f[k], p);
            a[d - df + k] = submod(a[d - df + k], t, p);
        }
    }
    a.truncate(df.max(1));
    poly_trim(&mut a);
    a
}

/// Monic gcd over GF(p).
fn poly_gcd(p: u64, mut a: Vec<u64>, mut b: Vec<u64>) -> Vec<u64> {
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !poly_is_zero(&b) {
        let r = poly_rem_general(p, &a, &b);
        a = b;
        b = r;
    }
    // Normalize to monic so callers can compare against [1].
    if !poly_is_zero(&a) {
        let lead_inv = powmod(*a.last().unwrap(), p - 2, p);
        for c in a.iter_mut() {
            *c = mulmod(*c, lead_inv, p);
        }
    }
    a
}

/// Remainder of `a` modulo `b` where `b` need not be monic.
fn poly_rem_general(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut a = a.to_vec();
    poly_trim(&mut a);
    let db = poly_deg(b);
    let lead_inv = powmod(b[db], p - 2, p);
    while !poly_is_zero(&a) && poly_deg(&a) >= db {
        let da = poly_deg(&a);
        let c = mulmod(a[da], lead_inv, p);
        for k in 0..=db {
            let t = mulmod(c, b[k], p);
            a[da - db + k] = submod(a[da - db + k], t, p);
        }
        poly_trim(&mut a);
    }
    a
}

/// Irreducibility of a monic polynomial of degree >= 2 over GF(p):
/// `f` is irreducible iff `gcd(f, x^(p^d) - x) = 1` for every
/// `d <= deg(f) / 2`, since any nontrivial factorization contains an
/// irreducible factor of such a degree and every irreducible of degree `d`
/// divides `x^(p^d) - x`.
fn poly_is_irreducible(p: u64, f: &[u64]) -> bool {
    let r = f.len() - 1;
    debug_assert!(r >= 2);
    if f[0] == 0 {
        return false; // x divides f
    }
    let x = vec![0, 1];
    let mut t = x.clone(); // will hold x^(p^d) mod f
    for _ in 1..=r / 2 {
        // One Frobenius step: t <- t^p mod f.
        let mut acc = vec![1u64];
        let mut base = t.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(p, &acc, &base, f);
            }
            base = poly_mulmod(p, &base, &base, f);
            e >>= 1;
        }
        t = acc;
        // gcd(f, t - x)
        let mut diff = t.clone();
        if diff.len() < 2 {
            diff.resize(2, 0);
        }
        diff[1] = submod(diff[1], 1, p);
        poly_trim(&mut diff);
        let g = poly_gcd(p, f.to_vec(), diff);
        if !(g.len() == 1 && g[0] == 1) {
            return false;
        }
    }
    true
}
