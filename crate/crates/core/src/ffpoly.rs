//! Exact arithmetic over `F_p` and its extensions, dense polynomials, and
//! the cyclotomic-coset factorization of `x^r − 1`.
//!
//! Residues are `u64` values reduced modulo a runtime prime `p`; every
//! product goes through `u128`, so nothing here can overflow for the desk
//! scales this crate supports. The factorization of `x^r − 1` is carried out
//! honestly in a splitting field `F_{p^m}` with `m = ord_r(p)`: pick a
//! generator `g` of the multiplicative group, set `ω = g^((p^m−1)/r)`, and
//! multiply out `∏_{e∈S}(x − ω^e)` for each cyclotomic coset `S`, checking
//! that every coefficient descends to the prime field.

use crate::error::{Error, Result};
use crate::validate_pr;

/// Splitting fields larger than this are refused (trial-division
/// factorization of `p^m − 1` must stay cheap).
const EXT_FIELD_CAP: u64 = 1 << 52;

// ---------------------------------------------------------------------------
// scalar arithmetic mod p
// ---------------------------------------------------------------------------

#[inline]
pub fn addm(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn subm(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub fn negm(a: u64, p: u64) -> u64 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

#[inline]
pub fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn powm(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulm(acc, base, p);
        }
        base = mulm(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo the prime `p`.
///
/// # Panics
/// Panics if `a ≡ 0 (mod p)`; callers are responsible for never inverting zero.
pub fn invm(a: u64, p: u64) -> u64 {
    assert!(a % p != 0, "division by zero mod {p}");
    powm(a, p - 2, p)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Deterministic trial-division primality test (sufficient for desk-scale `p`).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime divisors of `n`, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d as u128 * d as u128 <= n as u128 {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Euler's totient φ(n).
///
/// ```
/// assert_eq!(rotapx::ffpoly::euler_totient(7), 6);
/// assert_eq!(rotapx::ffpoly::euler_totient(12), 4);
/// ```
pub fn euler_totient(n: u64) -> u64 {
    assert!(n >= 1);
    let mut phi = n;
    for q in prime_factors(n) {
        phi = phi / q * (q - 1);
    }
    phi
}

/// Least `k ≥ 1` with `a^k ≡ 1 (mod n)`; requires `gcd(a, n) = 1`.
pub fn multiplicative_order(a: u64, n: u64) -> u64 {
    let a = a % n;
    assert!(gcd(a, n) == 1, "order undefined: gcd({a},{n}) != 1");
    if n == 1 {
        return 1;
    }
    let mut k = 1u64;
    let mut x = a;
    while x != 1 {
        x = mulm(x, a, n);
        k += 1;
    }
    k
}

// ---------------------------------------------------------------------------
// cyclotomic cosets
// ---------------------------------------------------------------------------

/// Orbit of multiplication-by-`p` on `Z_r`; indexes one irreducible factor
/// of `x^r − 1` over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CyclotomicCoset {
    /// Sorted ascending; the representative is the smallest element.
    pub elements: Vec<u64>,
}

impl CyclotomicCoset {
    pub fn representative(&self) -> u64 {
        self.elements[0]
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, e: u64) -> bool {
        self.elements.binary_search(&e).is_ok()
    }

    /// The negated coset `{−e mod r : e ∈ S}`, sorted.
    pub fn negated(&self, r: u64) -> CyclotomicCoset {
        let mut elements: Vec<u64> = self.elements.iter().map(|&e| (r - e) % r).collect();
        elements.sort_unstable();
        CyclotomicCoset { elements }
    }
}

/// The cyclotomic cosets of `p` on `Z_r`, sorted by representative.
///
/// ```
/// let cosets = rotapx::ffpoly::cyclotomic_cosets(3, 4).unwrap();
/// let sets: Vec<_> = cosets.iter().map(|c| c.elements.clone()).collect();
/// assert_eq!(sets, vec![vec![0], vec![1, 3], vec![2]]);
/// ```
pub fn cyclotomic_cosets(p: u64, r: u64) -> Result<Vec<CyclotomicCoset>> {
    validate_pr(p, r)?;
    let mut seen = vec![false; r as usize];
    let mut cosets = Vec::new();
    for start in 0..r {
        if seen[start as usize] {
            continue;
        }
        let mut elements = Vec::new();
        let mut e = start;
        while !seen[e as usize] {
            seen[e as usize] = true;
            elements.push(e);
            e = mulm(e, p % r, r);
        }
        elements.sort_unstable();
        cosets.push(CyclotomicCoset { elements });
    }
    // Scanning from 0 upward already yields representative order.
    debug_assert!(cosets.windows(2).all(|w| w[0].elements[0] < w[1].elements[0]));
    Ok(cosets)
}

/// True iff the coset is closed under negation mod `r` (equivalently, its
/// factor of `x^r − 1` equals its own monic reciprocal).
pub fn is_self_reciprocal(coset: &CyclotomicCoset, r: u64) -> bool {
    coset.elements.iter().all(|&e| coset.contains((r - e) % r))
}

// ---------------------------------------------------------------------------
// polynomials over F_p
// ---------------------------------------------------------------------------

/// Dense polynomial over `F_p`, coefficients lowest-degree first, normalized
/// so the leading coefficient is nonzero (the zero polynomial is empty).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    pub p: u64,
    pub coeffs: Vec<u64>,
}

impl Poly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Poly {
        for c in &mut coeffs {
            *c %= p;
        }
        let mut poly = Poly { p, coeffs };
        poly.normalize();
        poly
    }

    pub fn zero(p: u64) -> Poly {
        Poly { p, coeffs: vec![] }
    }

    pub fn one(p: u64) -> Poly {
        Poly { p, coeffs: vec![1] }
    }

    /// The monomial `x`.
    pub fn x(p: u64) -> Poly {
        Poly { p, coeffs: vec![0, 1] }
    }

    /// `x^r − 1`.
    pub fn x_r_minus_1(p: u64, r: u64) -> Poly {
        let mut coeffs = vec![0; r as usize + 1];
        coeffs[0] = p - 1;
        coeffs[r as usize] = 1;
        Poly { p, coeffs }
    }

    fn normalize(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports degree 0 by convention — guard
    /// with `is_zero` where the distinction matters.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = addm(mulm(acc, x, self.p), c, self.p);
        }
        acc
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let p = self.p;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| addm(self.coeff(i), other.coeff(i), p))
            .collect();
        Poly::new(p, coeffs)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let p = self.p;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| subm(self.coeff(i), other.coeff(i), p))
            .collect();
        Poly::new(p, coeffs)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let p = self.p;
        if self.is_zero() || other.is_zero() {
            return Poly::zero(p);
        }
        let mut coeffs = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = addm(coeffs[i + j], mulm(a, b, p), p);
            }
        }
        Poly::new(p, coeffs)
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn divrem(&self, divisor: &Poly) -> (Poly, Poly) {
        let p = self.p;
        assert!(!divisor.is_zero(), "polynomial division by zero");
        if self.coeffs.len() < divisor.coeffs.len() {
            return (Poly::zero(p), self.clone());
        }
        let lead_inv = invm(*divisor.coeffs.last().unwrap(), p);
        let mut rem = self.coeffs.clone();
        let dn = divisor.coeffs.len();
        let mut quot = vec![0u64; rem.len() - dn + 1];
        for k in (0..quot.len()).rev() {
            let c = mulm(rem[k + dn - 1], lead_inv, p);
            quot[k] = c;
            if c == 0 {
                continue;
            }
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = subm(rem[k + j], mulm(c, d, p), p);
            }
        }
        (Poly::new(p, quot), Poly::new(p, rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.divrem(divisor).1
    }

    /// `self^exp mod modulus`.
    pub fn powmod(&self, mut exp: u64, modulus: &Poly) -> Poly {
        let mut acc = Poly::one(self.p);
        let mut base = self.rem(modulus);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base).rem(modulus);
            }
            base = base.mul(&base).rem(modulus);
            exp >>= 1;
        }
        acc
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        // Normalize monic so gcds compare predictably.
        let inv = invm(*a.coeffs.last().unwrap(), a.p);
        Poly::new(a.p, a.coeffs.iter().map(|&c| mulm(c, inv, a.p)).collect())
    }

    /// The monic reciprocal `x^deg · f(1/x)` (requires nonzero constant term).
    pub fn monic_reciprocal(&self) -> Poly {
        assert!(!self.is_zero() && self.coeffs[0] != 0);
        let p = self.p;
        let mut coeffs: Vec<u64> = self.coeffs.iter().rev().copied().collect();
        let inv = invm(coeffs[coeffs.len() - 1], p);
        for c in &mut coeffs {
            *c = mulm(*c, inv, p);
        }
        Poly::new(p, coeffs)
    }

    /// Rabin irreducibility test for a monic polynomial of degree ≥ 1.
    pub fn is_irreducible(&self) -> bool {
        let p = self.p;
        let m = self.degree() as u64;
        if self.is_zero() || m == 0 {
            return false;
        }
        if m == 1 {
            return true;
        }
        // x^{p^k} mod f by iterating the p-power Frobenius k times.
        let frob_power = |k: u64| -> Poly {
            let mut h = Poly::x(p).rem(self);
            for _ in 0..k {
                h = h.powmod(p, self);
            }
            h
        };
        let x = Poly::x(p).rem(self);
        if frob_power(m) != x {
            return false;
        }
        for q in prime_factors(m) {
            let h = frob_power(m / q).sub(&x);
            if self.gcd(&h).degree() != 0 {
                return false;
            }
        }
        true
    }
}

impl std::fmt::Display for Poly {
    /// Human form, highest degree first: `x^2 + 2x + 1`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{c}x")?,
                (_, 1) => write!(f, "x^{i}")?,
                _ => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// extension field F_{p^m}
// ---------------------------------------------------------------------------

/// The field `F_{p^m} = F_p[x]/(modulus)`; elements are coefficient vectors
/// of length `m`.
#[derive(Debug, Clone)]
pub struct ExtField {
    pub p: u64,
    pub m: usize,
    pub modulus: Poly,
}

pub type ExtElem = Vec<u64>;

impl ExtField {
    /// Build `F_{p^m}` on the first monic irreducible of degree `m` in
    /// lexicographic coefficient order (deterministic).
    pub fn new(p: u64, m: usize) -> Result<ExtField> {
        assert!(m >= 1);
        let size = (p as u128).checked_pow(m as u32);
        match size {
            Some(s) if s <= EXT_FIELD_CAP as u128 => {}
            _ => {
                return Err(Error::Budget(format!(
                    "splitting field F_{{{p}^{m}}} exceeds the desk-scale cap 2^52"
                )))
            }
        }
        if m == 1 {
            return Ok(ExtField { p, m, modulus: Poly::x(p) });
        }
        // Low coefficients enumerated as base-p digits of a counter.
        let count = (p as u128).pow(m as u32);
        for low in 0..count {
            let mut coeffs = vec![0u64; m + 1];
            let mut rest = low;
            for c in coeffs.iter_mut().take(m) {
                *c = (rest % p as u128) as u64;
                rest /= p as u128;
            }
            coeffs[m] = 1;
            let f = Poly::new(p, coeffs);
            if f.is_irreducible() {
                return Ok(ExtField { p, m, modulus: f });
            }
        }
        Err(Error::Internal(format!(
            "no irreducible of degree {m} over F_{p} found (impossible)"
        )))
    }

    pub fn size(&self) -> u64 {
        (self.p as u128).pow(self.m as u32) as u64
    }

    pub fn zero(&self) -> ExtElem {
        vec![0; self.m]
    }

    pub fn one(&self) -> ExtElem {
        let mut e = self.zero();
        e[0] = 1;
        e
    }

    pub fn embed(&self, a: u64) -> ExtElem {
        let mut e = self.zero();
        e[0] = a % self.p;
        e
    }

    /// Element with index `idx` in base-`p` digit order (0 ↦ zero, 1 ↦ one, …).
    pub fn elem_at(&self, idx: u64) -> ExtElem {
        let mut e = self.zero();
        let mut rest = idx;
        for d in e.iter_mut() {
            *d = rest % self.p;
            rest /= self.p;
        }
        e
    }

    pub fn is_zero_elem(&self, a: &ExtElem) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn is_one_elem(&self, a: &ExtElem) -> bool {
        a[0] == 1 && a[1..].iter().all(|&c| c == 0)
    }

    /// True iff the element lies in the prime subfield.
    pub fn is_scalar(&self, a: &ExtElem) -> bool {
        a[1..].iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        a.iter().zip(b).map(|(&x, &y)| addm(x, y, self.p)).collect()
    }

    pub fn sub(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        a.iter().zip(b).map(|(&x, &y)| subm(x, y, self.p)).collect()
    }

    pub fn mul(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        let prod = Poly::new(self.p, a.clone()).mul(&Poly::new(self.p, b.clone()));
        let mut red = prod.rem(&self.modulus).coeffs;
        red.resize(self.m, 0);
        red
    }

    pub fn pow(&self, a: &ExtElem, mut exp: u64) -> ExtElem {
        let mut acc = self.one();
        let mut base = a.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    /// Find a generator of the multiplicative group. The scan order starts at
    /// an offset derived from `seed` (0 = plain ascending order) and wraps, so
    /// any seed finds a generator; the default is fully deterministic.
    pub fn generator(&self, seed: u64) -> Result<ExtElem> {
        let n = self.size() - 1;
        let factors = prime_factors(n);
        let candidates = self.size() - 2; // indices 2..size
        let offset = if candidates == 0 { 0 } else { seed % candidates };
        for step in 0..candidates {
            let idx = 2 + (step + offset) % candidates;
            let g = self.elem_at(idx);
            if factors.iter().all(|&q| !self.is_one_elem(&self.pow(&g, n / q))) {
                return Ok(g);
            }
        }
        Err(Error::Internal(format!(
            "no generator found in F_{{{}^{}}} (impossible)",
            self.p, self.m
        )))
    }
}

// ---------------------------------------------------------------------------
// factorization of x^r - 1
// ---------------------------------------------------------------------------

/// Factor `x^r − 1` over `F_p` into irreducibles, one per cyclotomic coset,
/// returned in coset (representative) order.
///
/// Each factor is built as `∏_{e∈S}(x − ω^e)` for a fixed primitive `r`-th
/// root `ω ∈ F_{p^m}`; coefficients are verified to descend to `F_p`, and the
/// full product is verified to equal `x^r − 1`.
pub fn factor_x_r_minus_1(p: u64, r: u64) -> Result<Vec<(Poly, CyclotomicCoset)>> {
    factor_x_r_minus_1_seeded(p, r, 0)
}

/// As [`factor_x_r_minus_1`], with a seed controlling only the generator
/// scan order inside the splitting field (the result is seed-independent).
pub fn factor_x_r_minus_1_seeded(
    p: u64,
    r: u64,
    seed: u64,
) -> Result<Vec<(Poly, CyclotomicCoset)>> {
    let cosets = cyclotomic_cosets(p, r)?;
    let m = multiplicative_order(p % r, r) as usize;
    let field = ExtField::new(p, m)?;
    let g = field.generator(seed)?;
    let omega = field.pow(&g, (field.size() - 1) / r);

    // Sanity: ω must have exact order r.
    if !field.is_one_elem(&field.pow(&omega, r)) {
        return Err(Error::Internal("ω^r != 1 in splitting field".into()));
    }
    for q in prime_factors(r) {
        if field.is_one_elem(&field.pow(&omega, r / q)) {
            return Err(Error::Internal("ω has order < r in splitting field".into()));
        }
    }

    let mut out = Vec::with_capacity(cosets.len());
    for coset in cosets {
        // Product of (x − ω^e) with coefficients in the extension field.
        let mut ext_coeffs: Vec<ExtElem> = vec![field.one()];
        for &e in &coset.elements {
            let root = field.pow(&omega, e);
            let mut next: Vec<ExtElem> = vec![field.zero(); ext_coeffs.len() + 1];
            for (i, c) in ext_coeffs.iter().enumerate() {
                // x * c x^i  and  (−root) * c x^i
                next[i + 1] = field.add(&next[i + 1], c);
                let t = field.mul(&root, c);
                next[i] = field.sub(&next[i], &t);
            }
            ext_coeffs = next;
        }
        let mut coeffs = Vec::with_capacity(ext_coeffs.len());
        for c in &ext_coeffs {
            if !field.is_scalar(c) {
                return Err(Error::Internal(format!(
                    "factor coefficient for coset {:?} failed to descend to F_{p}",
                    coset.elements
                )));
            }
            coeffs.push(c[0]);
        }
        let f = Poly::new(p, coeffs);
        if !f.is_monic() || f.degree() != coset.len() {
            return Err(Error::Internal(format!(
                "malformed factor for coset {:?}",
                coset.elements
            )));
        }
        out.push((f, coset));
    }

    let product = out
        .iter()
        .fold(Poly::one(p), |acc, (f, _)| acc.mul(f));
    if product != Poly::x_r_minus_1(p, r) {
        return Err(Error::Internal(
            "factor product does not reconstruct x^r - 1".into(),
        ));
    }
    Ok(out)
}
