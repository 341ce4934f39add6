//! Exact-arithmetic construction, decomposition, and classification of
//! rotary (orientably regular) maps whose underlying graphs are Praeger–Xu
//! graphs `C(p,r,s)`, for odd primes `p` with `p ∤ r`.
//!
//! The pipeline, bottom to top:
//!
//! * [`ffpoly`] — arithmetic over `F_p` and small extensions, cyclotomic
//!   cosets, and the coset factorization of `x^r − 1`.
//! * [`linalg`] — dense exact linear algebra over `F_p` (kernels, spans,
//!   inverses) used by the representation machinery.
//! * [`dihedral`] — the irreducible `F_p`-representations of the dihedral
//!   group `D_2r`, their explicit matrix models, and the holomorph action
//!   of `Aut(D_2r)` on isomorphism classes.
//! * [`group`] — concrete groups `G = Z_p^n ⋊_ψ D_2r`: element arithmetic,
//!   orders, generation tests, rotary-pair enumeration, automorphism
//!   counting, orbit counting.
//! * [`pxgraph`] — loop-free multigraphs, the `C(p,r,s)` and augmented
//!   `C*(p,r,0,±1)` constructors, and desk-scale isomorphism testing.
//! * [`rotamap`] — the coset-map construction from a rotary pair, underlying
//!   graphs, map isomorphism, quotients, direct products, and module
//!   decomposition.
//! * [`census`] — the classification pipeline tying everything together,
//!   with optional graph/brute-force/decomposition verification and JSON
//!   persistence.
//!
//! All arithmetic is exact: residues mod a runtime prime, never floats.

pub mod census;
pub mod dihedral;
pub mod error;
pub mod ffpoly;
pub mod group;
pub mod linalg;
pub mod pxgraph;
pub mod rotamap;

pub use error::{Error, Result};

/// Validate the standing hypothesis on `(p, r)`: `p` an odd prime, `r ≥ 3`,
/// and `p ∤ r`. Every public entry point taking these parameters calls this.
pub fn validate_pr(p: u64, r: u64) -> Result<()> {
    if p < 3 || !ffpoly::is_prime(p) {
        return Err(Error::ParamDomain(format!(
            "p = {p} is not an odd prime (the construction requires odd prime p)"
        )));
    }
    if r < 3 {
        return Err(Error::ParamDomain(format!("r = {r} < 3")));
    }
    if r % p == 0 {
        return Err(Error::ParamDomain(format!(
            "p = {p} divides r = {r}; only split extensions are in scope"
        )));
    }
    Ok(())
}
