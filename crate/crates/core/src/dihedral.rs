//! Irreducible `F_p`-representations of the dihedral group `D_2r` and the
//! holomorph action on them.
//!
//! Conventions. `D_2r = ⟨c⟩ ⋊ ⟨b⟩` with `c^r = b² = 1`, `b c b = c^{-1}`.
//! We also track the reflection `a := c·b`, so `c = a·b`; linear characters
//! are labelled by the sign pair `(γ(a), γ(b))`.
//!
//! Classes of degree ≥ 2 are labelled by cyclotomic cosets: the orbit
//! structure of multiplication-by-p on `Z_r` controls how `x^r − 1` factors,
//! and each irreducible constituent of the regular module restricts to `⟨c⟩`
//! with eigenvalue exponents `S ∪ (−S)` for an orbit `S`.

use crate::error::{Error, Result};
use crate::ffpoly::{
    cyclotomic_cosets, euler_totient, factor_x_r_minus_1, gcd, is_self_reciprocal,
    multiplicative_order, powm, CyclotomicCoset,
};
use crate::linalg::Mat;
use crate::validate_pr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn mul(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn pow(self, e: u64) -> Sign {
        if self == Sign::Minus && e % 2 == 1 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    /// The sign as an element of `F_p`.
    pub fn to_fp(self, p: u64) -> u64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => p - 1,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Isomorphism class of an irreducible `F_p[D_2r]`-module.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IrrClass {
    /// Degree-1 class, labelled by `(γ(a), γ(b))` with `a = c·b`.
    Linear { sign_a: Sign, sign_b: Sign },
    /// Degree `2|S|` class from a coset pair `{S, −S}` with `S ≠ −S`;
    /// `s` is the lexicographically smaller coset of the two.
    CosetPair { s: CyclotomicCoset, neg: CyclotomicCoset },
    /// Degree `|S|` class from a self-reciprocal coset `S = −S`, `|S| ≥ 2`.
    SelfReciprocal { s: CyclotomicCoset },
}

impl IrrClass {
    pub fn degree(&self) -> u64 {
        match self {
            IrrClass::Linear { .. } => 1,
            IrrClass::CosetPair { s, .. } => 2 * s.len() as u64,
            IrrClass::SelfReciprocal { s } => s.len() as u64,
        }
    }

    /// Degree over `F_p` of the endomorphism field of the module.
    pub fn end_degree(&self) -> u64 {
        match self {
            IrrClass::Linear { .. } => 1,
            IrrClass::CosetPair { s, .. } => s.len() as u64,
            IrrClass::SelfReciprocal { s } => s.len() as u64 / 2,
        }
    }

    /// Whether the representation is injective on `D_2r` (needs `r ≥ 3`).
    pub fn is_faithful(&self, r: u64) -> bool {
        match self {
            IrrClass::Linear { .. } => false,
            IrrClass::CosetPair { s, .. } | IrrClass::SelfReciprocal { s } => {
                gcd(s.representative(), r) == 1
            }
        }
    }

    /// All exponents `e` with `ω^e` an eigenvalue of the image of `c`
    /// (over a splitting field), sorted.
    pub fn c_exponents(&self, r: u64) -> Vec<u64> {
        match self {
            IrrClass::Linear { sign_a, sign_b } => {
                if sign_a.mul(*sign_b) == Sign::Plus {
                    vec![0]
                } else {
                    vec![r / 2]
                }
            }
            IrrClass::CosetPair { s, neg } => {
                let mut all: Vec<u64> =
                    s.elements.iter().chain(&neg.elements).copied().collect();
                all.sort_unstable();
                all
            }
            IrrClass::SelfReciprocal { s } => s.elements.clone(),
        }
    }

    /// Compact text form: `L(+,-)`, `P{1,5}`, `R{2,5}`.
    pub fn signature(&self) -> String {
        match self {
            IrrClass::Linear { sign_a, sign_b } => {
                format!("L({},{})", sign_a.symbol(), sign_b.symbol())
            }
            IrrClass::CosetPair { s, .. } => format!("P{{{}}}", join(&s.elements)),
            IrrClass::SelfReciprocal { s } => format!("R{{{}}}", join(&s.elements)),
        }
    }
}

fn join(elements: &[u64]) -> String {
    elements
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Parse a class signature as printed by [`IrrClass::signature`], validated
/// against the actual class list at `(p, r)`.
pub fn parse_signature(p: u64, r: u64, text: &str) -> Result<IrrClass> {
    let wanted: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let classes = enumerate_irr(p, r)?;
    classes
        .iter()
        .find(|cl| cl.signature() == wanted)
        .cloned()
        .ok_or_else(|| {
            let available: Vec<String> = classes.iter().map(|c| c.signature()).collect();
            Error::Parse(format!(
                "unknown class signature {text:?} at (p, r) = ({p}, {r}); available: {}",
                available.join(" ")
            ))
        })
}

/// All irreducible classes at `(p, r)`, linear characters first, then the
/// coset classes ordered by smallest exponent.
pub fn enumerate_irr(p: u64, r: u64) -> Result<Vec<IrrClass>> {
    validate_pr(p, r)?;
    let mut classes = vec![
        IrrClass::Linear { sign_a: Sign::Plus, sign_b: Sign::Plus },
        IrrClass::Linear { sign_a: Sign::Minus, sign_b: Sign::Minus },
    ];
    if r % 2 == 0 {
        classes.push(IrrClass::Linear { sign_a: Sign::Plus, sign_b: Sign::Minus });
        classes.push(IrrClass::Linear { sign_a: Sign::Minus, sign_b: Sign::Plus });
    }
    let cosets = cyclotomic_cosets(p, r)?;
    for coset in &cosets {
        let rep = coset.representative();
        if rep == 0 || (r % 2 == 0 && rep == r / 2) {
            continue; // the exponents carried by the linear characters
        }
        if is_self_reciprocal(coset, r) {
            classes.push(IrrClass::SelfReciprocal { s: coset.clone() });
        } else {
            let neg = coset.negated(r);
            if rep < neg.representative() {
                classes.push(IrrClass::CosetPair { s: coset.clone(), neg });
            }
            // The partner coset contributes the same class; emitted once.
        }
    }
    // Block dimensions of the semisimple group algebra must add to |D_2r|.
    let total: u64 = classes
        .iter()
        .map(|cl| cl.degree() * cl.degree() / cl.end_degree())
        .sum();
    if total != 2 * r {
        return Err(Error::Internal(format!(
            "class dimension count at (p, r) = ({p}, {r}): got {total}, expected {}",
            2 * r
        )));
    }
    Ok(classes)
}

/// Degree and number of faithful irreducible classes at `(p, r)`.
///
/// With `d` the order of `p` mod `r`: the faithful classes have degree `d`
/// when `p^{d/2} ≡ −1 (mod r)` (self-reciprocal orbits) and `2d` otherwise
/// (paired orbits); either way there are `φ(r)/degree` of them.
pub fn faithful_degree(p: u64, r: u64) -> Result<(u64, u64)> {
    validate_pr(p, r)?;
    let d = multiplicative_order(p, r);
    let deg = if d % 2 == 0 && powm(p, d / 2, r) == r - 1 { d } else { 2 * d };
    Ok((deg, euler_totient(r) / deg))
}

/// A concrete matrix model: images of the generators `c` and `b`.
#[derive(Debug, Clone)]
pub struct MatrixRep {
    pub class: IrrClass,
    pub mat_c: Mat,
    pub mat_b: Mat,
}

/// Matrix model of an irreducible class, with the defining relations
/// verified on the produced matrices.
///
/// - Linear: `1×1` scalars.
/// - Coset pair `{S, −S}`: block matrix `diag(C, C^{-1})` for the companion
///   matrix `C` of the factor of `x^r − 1` attached to `S`, with `b` acting
///   as the block swap.
/// - Self-reciprocal `S`: multiplication by `x` on `F_p[x]/(f_S)`, with `b`
///   acting as the `|S|/2`-th power of Frobenius (which inverts `x` there).
pub fn realize(p: u64, r: u64, class: &IrrClass) -> Result<MatrixRep> {
    validate_pr(p, r)?;
    let (mat_c, mat_b) = match class {
        IrrClass::Linear { sign_a, sign_b } => {
            let sign_c = sign_a.mul(*sign_b);
            (Mat::scalar(p, sign_c.to_fp(p)), Mat::scalar(p, sign_b.to_fp(p)))
        }
        IrrClass::CosetPair { s, .. } => {
            let f = factor_for_coset(p, r, s)?;
            let c_block = companion(p, &f);
            let c_inv = c_block.inverse().ok_or_else(|| {
                Error::Internal("companion matrix of a factor of x^r − 1 must be invertible".into())
            })?;
            let k = s.len();
            let mat_c = Mat::block_diag(p, &[&c_block, &c_inv]);
            let mut mat_b = Mat::zero(p, 2 * k, 2 * k);
            for i in 0..k {
                mat_b.set(i, k + i, 1);
                mat_b.set(k + i, i, 1);
            }
            (mat_c, mat_b)
        }
        IrrClass::SelfReciprocal { s } => {
            let f = factor_for_coset(p, r, s)?;
            let k = s.len();
            let mat_c = companion(p, &f);
            // Column j of b = coefficients of x^{j·p^{k/2}} mod f; build
            // y = x^{p^{k/2}} by iterating the p-th power map, then take
            // successive powers of y.
            let mut y = crate::ffpoly::Poly::x(p);
            for _ in 0..k / 2 {
                y = y.powmod(p, &f);
            }
            let mut mat_b = Mat::zero(p, k, k);
            let mut col = crate::ffpoly::Poly::one(p);
            for j in 0..k {
                for (i, &co) in col.coeffs.iter().enumerate() {
                    mat_b.set(i, j, co);
                }
                if j + 1 < k {
                    col = col.mul(&y).rem(&f);
                }
            }
            (mat_c, mat_b)
        }
    };
    let deg = class.degree() as usize;
    if mat_c.rows != deg || mat_b.rows != deg {
        return Err(Error::Internal(format!(
            "realized degree mismatch for {}",
            class.signature()
        )));
    }
    let ok = mat_c.pow(r).is_identity()
        && mat_b.mul(&mat_b).is_identity()
        && mat_b.mul(&mat_c).mul(&mat_b)
            == mat_c.inverse().ok_or_else(|| {
                Error::Internal("image of c must be invertible".into())
            })?;
    if !ok {
        return Err(Error::Internal(format!(
            "defining relations fail in the matrix model of {}",
            class.signature()
        )));
    }
    Ok(MatrixRep { class: class.clone(), mat_c, mat_b })
}

fn factor_for_coset(p: u64, r: u64, s: &CyclotomicCoset) -> Result<crate::ffpoly::Poly> {
    let factors = factor_x_r_minus_1(p, r)?;
    factors
        .into_iter()
        .find(|(_, coset)| coset == s)
        .map(|(f, _)| f)
        .ok_or_else(|| {
            Error::Internal(format!(
                "no factor of x^{r} − 1 matches the coset {:?}",
                s.elements
            ))
        })
}

fn companion(p: u64, f: &crate::ffpoly::Poly) -> Mat {
    let k = f.degree();
    assert!(k > 0 && f.is_monic());
    let mut m = Mat::zero(p, k, k);
    for i in 1..k {
        m.set(i, i - 1, 1);
    }
    for i in 0..k {
        m.set(i, k - 1, crate::ffpoly::negm(f.coeff(i), p));
    }
    m
}

/// Automorphism `σ_{t,k}` of `D_2r`: `c ↦ c^k`, `b ↦ c^t b` (`k` a unit).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DihedralAut {
    pub r: u64,
    pub t: u64,
    pub k: u64,
}

impl DihedralAut {
    pub fn new(r: u64, t: u64, k: u64) -> Result<DihedralAut> {
        if gcd(k % r, r) != 1 {
            return Err(Error::ParamDomain(format!(
                "k = {k} is not a unit modulo r = {r}"
            )));
        }
        Ok(DihedralAut { r, t: t % r, k: k % r })
    }

    pub fn identity(r: u64) -> DihedralAut {
        DihedralAut { r, t: 0, k: 1 }
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &DihedralAut) -> DihedralAut {
        assert_eq!(self.r, other.r);
        DihedralAut {
            r: self.r,
            t: (self.t + self.k * other.t) % self.r,
            k: (self.k * other.k) % self.r,
        }
    }

    /// The full automorphism group, `r·φ(r)` elements.
    pub fn all(r: u64) -> Vec<DihedralAut> {
        let mut out = Vec::new();
        for k in 1..r {
            if gcd(k, r) != 1 {
                continue;
            }
            for t in 0..r {
                out.push(DihedralAut { r, t, k });
            }
        }
        out
    }

    pub fn count(r: u64) -> u64 {
        r * euler_totient(r)
    }
}

/// The class of `γ ∘ σ` for `γ` in the given class and `σ = σ_{t,k}`.
pub fn aut_action(class: &IrrClass, aut: &DihedralAut) -> IrrClass {
    let r = aut.r;
    match class {
        IrrClass::Linear { sign_a, sign_b } => {
            // γ'(b) = γ(c^t b), γ'(a) = γ'(c)γ'(b) with γ'(c) = γ(c)^k.
            let sign_c = sign_a.mul(*sign_b);
            let new_b = sign_c.pow(aut.t).mul(*sign_b);
            let new_a = sign_c.pow(aut.k + aut.t).mul(*sign_b);
            IrrClass::Linear { sign_a: new_a, sign_b: new_b }
        }
        IrrClass::CosetPair { s, .. } => {
            let mapped = scale_coset(s, aut.k, r);
            let neg = mapped.negated(r);
            if mapped.representative() <= neg.representative() {
                IrrClass::CosetPair { s: mapped, neg }
            } else {
                IrrClass::CosetPair { s: neg, neg: mapped }
            }
        }
        IrrClass::SelfReciprocal { s } => {
            IrrClass::SelfReciprocal { s: scale_coset(s, aut.k, r) }
        }
    }
}

fn scale_coset(s: &CyclotomicCoset, k: u64, r: u64) -> CyclotomicCoset {
    let mut elements: Vec<u64> = s.elements.iter().map(|&e| e * k % r).collect();
    elements.sort_unstable();
    CyclotomicCoset { elements }
}

/// Orbit of a class under all of `Aut(D_2r)`, sorted and deduplicated.
pub fn aut_orbit(class: &IrrClass, r: u64) -> Vec<IrrClass> {
    let mut orbit: Vec<IrrClass> = DihedralAut::all(r)
        .iter()
        .map(|aut| aut_action(class, aut))
        .collect();
    orbit.sort();
    orbit.dedup();
    orbit
}

/// All multiplicity-free sets of irreducible classes with total degree
/// `total_degree`, excluding sets that contain the character with
/// `γ(a) = −1, γ(b) = +1` (whose fixed vectors cannot seed a rotation of
/// the required order when `r` is even).
///
/// Sets are emitted in lexicographic order of class indices within
/// [`enumerate_irr`]'s ordering.
pub fn multiplicity_free_reps(p: u64, r: u64, total_degree: u64) -> Result<Vec<Vec<IrrClass>>> {
    let classes: Vec<IrrClass> = enumerate_irr(p, r)?
        .into_iter()
        .filter(|cl| {
            *cl != IrrClass::Linear { sign_a: Sign::Minus, sign_b: Sign::Plus }
        })
        .collect();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    subset_sum(&classes, 0, total_degree, &mut chosen, &mut out);
    Ok(out)
}

fn subset_sum(
    classes: &[IrrClass],
    from: usize,
    remaining: u64,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Vec<IrrClass>>,
) {
    if remaining == 0 {
        out.push(chosen.iter().map(|&i| classes[i].clone()).collect());
        return;
    }
    for i in from..classes.len() {
        let d = classes[i].degree();
        if d > remaining {
            continue;
        }
        chosen.push(i);
        subset_sum(classes, i + 1, remaining - d, chosen, out);
        chosen.pop();
    }
}
