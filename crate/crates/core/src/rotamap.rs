//! Rotary maps carried by the affine groups: construction from a class
//! set, coset geometry and counts, isomorphism, decomposition into
//! irreducible constituent maps, and direct products.
//!
//! A rotary map is a pair `(ρ, τ)` generating its group with `|τ| = 2`.
//! Vertices, edges, and faces are the cosets of `⟨ρ⟩`, `⟨τ⟩`, `⟨ρτ⟩`,
//! incident when they intersect; all counting is exact.

use serde::{Deserialize, Serialize};

use crate::dihedral::{enumerate_irr, parse_signature, realize, IrrClass, Sign};
use crate::error::{Error, Result};
use crate::ffpoly::{addm, factor_x_r_minus_1, invm, mulm, subm};
use crate::group::{intertwiner_basis, pair_extension, AffineGroup, GElem};
use crate::linalg::{Mat, Subspace};
use crate::pxgraph::Multigraph;

/// A rotary map: a group together with a distinguished generating pair.
#[derive(Debug, Clone)]
pub struct RotaryMap {
    pub group: AffineGroup,
    pub rho: GElem,
    pub tau: GElem,
}

/// Exact vertex/edge/face counts and the Euler characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapCounts {
    pub vertices: u128,
    pub edges: u128,
    pub faces: u128,
    pub chi: i128,
}

impl RotaryMap {
    pub fn new(group: AffineGroup, rho: GElem, tau: GElem) -> Result<RotaryMap> {
        if group.element_order(&tau) != 2 {
            return Err(Error::Verification(format!(
                "τ has order {}, not 2",
                group.element_order(&tau)
            )));
        }
        // τ inside ⟨ρ⟩ collapses every edge to a loop
        let rho_order = group.element_order(&rho);
        let mut power = group.identity();
        for _ in 0..rho_order {
            if power == tau {
                return Err(Error::Verification(
                    "τ lies in ⟨ρ⟩: the map degenerates to loops".into(),
                ));
            }
            power = group.mul(&power, &rho);
        }
        if !group.generates(&[rho.clone(), tau.clone()]) {
            return Err(Error::Verification(
                "the pair (ρ, τ) does not generate the group".into(),
            ));
        }
        Ok(RotaryMap { group, rho, tau })
    }

    pub fn counts(&self) -> MapCounts {
        let order = self.group.order();
        let vertices = order / self.group.element_order(&self.rho) as u128;
        let edges = order / 2;
        let faces = order / self.face_length() as u128;
        let chi = vertices as i128 - edges as i128 + faces as i128;
        debug_assert_eq!(chi.rem_euclid(2), 0, "orientable maps have even χ");
        MapCounts { vertices, edges, faces, chi }
    }

    /// Boundary length of every face: the order of `ρτ`.
    pub fn face_length(&self) -> u64 {
        self.group.element_order(&self.group.mul(&self.rho, &self.tau))
    }
}

/// The coset geometry of a map, materialized: vertex labels per group
/// element and the underlying multigraph.
#[derive(Debug, Clone)]
pub struct CosetMap {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub graph: Multigraph,
}

/// Materialize the coset geometry. The three partitions are built by
/// direct coset scans, so their sizes independently confirm the closed
/// forms in [`RotaryMap::counts`].
pub fn build_map(map: &RotaryMap, max_vertices: u64) -> Result<CosetMap> {
    let g = &map.group;
    let counts = map.counts();
    if counts.vertices > max_vertices as u128 {
        return Err(Error::Budget(format!(
            "map on {} vertices exceeds the cap {max_vertices}",
            counts.vertices
        )));
    }
    let size = g.order() as usize;
    let partition = |generator: &GElem| -> (Vec<u32>, usize) {
        let gen_order = g.element_order(generator) as usize;
        let mut label = vec![u32::MAX; size];
        let mut count = 0usize;
        for start in 0..size {
            if label[start] != u32::MAX {
                continue;
            }
            let mut cursor = g.elem_at(start);
            for _ in 0..gen_order {
                label[g.elem_index(&cursor)] = count as u32;
                cursor = g.mul(&cursor, generator);
            }
            count += 1;
        }
        (label, count)
    };
    let (vertex_of, nv) = partition(&map.rho);
    let rho_tau = g.mul(&map.rho, &map.tau);
    let (_, nf) = partition(&rho_tau);
    if nv as u128 != counts.vertices || nf as u128 != counts.faces {
        return Err(Error::Internal(
            "coset scan disagrees with the closed-form counts".into(),
        ));
    }
    let mut graph = Multigraph::new(nv);
    let mut seen = vec![false; size];
    let mut ne = 0usize;
    for start in 0..size {
        if seen[start] {
            continue;
        }
        let elem = g.elem_at(start);
        let other = g.mul(&elem, &map.tau);
        let other_idx = g.elem_index(&other);
        seen[start] = true;
        seen[other_idx] = true;
        let (u, v) = (vertex_of[start] as usize, vertex_of[other_idx] as usize);
        if u == v {
            return Err(Error::Internal(
                "loop edge after the degeneracy check".into(),
            ));
        }
        graph.add_edge(u, v, 1);
        ne += 1;
    }
    if ne as u128 != counts.edges {
        return Err(Error::Internal(
            "edge coset scan disagrees with |G|/2".into(),
        ));
    }
    Ok(CosetMap { vertices: nv, edges: ne, faces: nf, graph })
}

/// The canonical rotary map on the group of a class set.
///
/// `ρ = (v, c^{x_i} b)` and `τ = (0, c^{y_i} b)` with `gcd(x_i − y_i, r) = 1`.
/// The seed `v` takes, per class block, the first fixed vector of the
/// reflection image — except on the block of the full-cycle character,
/// where that image is `−1` and any nonzero vector serves.
pub fn construct_rotary(
    p: u64,
    r: u64,
    classes: &[IrrClass],
    x_i: u64,
    y_i: u64,
) -> Result<RotaryMap> {
    let group = AffineGroup::from_classes(p, r, classes)?;
    let x_i = x_i % r;
    let y_i = y_i % r;
    if crate::ffpoly::gcd((x_i + r - y_i) % r, r) != 1 {
        return Err(Error::ParamDomain(format!(
            "x − y = {} is not a unit modulo r = {r}",
            (x_i + r - y_i) % r
        )));
    }
    let mx = g_m_owned(&group, x_i, 1);
    let mut v = vec![0u64; group.n];
    let cycle_class = IrrClass::Linear { sign_a: Sign::Minus, sign_b: Sign::Minus };
    for (idx, class) in classes.iter().enumerate() {
        let (lo, hi) = group.block_range(idx);
        if *class == cycle_class {
            v[lo] = 1;
            continue;
        }
        // block of mx, then its fixed space
        let d = hi - lo;
        let mut block = Mat::zero(p, d, d);
        for i in 0..d {
            for j in 0..d {
                block.set(i, j, mx.get(lo + i, lo + j));
            }
        }
        let fixed = block.sub_scalar_identity(1).kernel_basis();
        let seed = fixed.first().ok_or_else(|| {
            Error::Verification(format!(
                "the reflection c^{x_i}b fixes no vector in the {} block",
                class.signature()
            ))
        })?;
        v[lo..hi].copy_from_slice(seed);
    }
    let rho = group.make(v, x_i, 1);
    let tau = group.make(vec![0; group.n], y_i, 1);
    RotaryMap::new(group, rho, tau)
}

/// Default generator offsets: `ρ` over the reflection `c·b`, `τ` over `b`.
pub fn construct_rotary_default(p: u64, r: u64, classes: &[IrrClass]) -> Result<RotaryMap> {
    construct_rotary(p, r, classes, 1, 0)
}

/// Isomorphism type of the underlying graph of a rotary map, by family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphForm {
    /// The simple graph `C(p, length, s)`; `length` is `r` or `p·r`.
    Px { length: u64, s: u64 },
    /// The `p`-fold thickened cycle of the given length (`C*(p, len, 0, +1)`).
    ThickCycle { length: u64 },
    /// The simple cycle on `p·r` vertices (`C*(p, r, 0, −1)`).
    Cycle,
}

impl GraphForm {
    /// Display label, e.g. `C(3,4,1)`, `C*(3,12,0,1)`, `C*(3,4,0,-1)`.
    pub fn label(&self, p: u64, r: u64) -> String {
        match self {
            GraphForm::Px { length, s } => format!("C({p},{length},{s})"),
            GraphForm::ThickCycle { length } => format!("C*({p},{length},0,1)"),
            GraphForm::Cycle => format!("C*({p},{r},0,-1)"),
        }
    }
}

/// The graph family the map with the given content actually lives on.
///
/// A multiplicity-free class set of total degree `t` that avoids the
/// full-cycle character `L(-,-)` yields a map on `C(p, r, t − 1)` (or the
/// thickened `r`-cycle when it is a single linear class).  A set that
/// contains `L(-,-)` alongside other content re-expresses over the longer
/// cycle: adjoining the `L(-,-)` block to the rotation gives the same
/// group as `Z_p^{t−1} ⋊ D_{2pr}` with the remaining classes reread over
/// `D_{2pr}`, so the graph is `C(p, pr, t − 2)` (thickened `pr`-cycle when
/// only one class remains).  Checked by exhausting every generating pair
/// of every affected group at (3,4) and (5,3): the graphs depend only on
/// the content, never on the pair.
pub fn graph_form(p: u64, r: u64, classes: &[IrrClass]) -> GraphForm {
    let cycle_class = IrrClass::Linear { sign_a: Sign::Minus, sign_b: Sign::Minus };
    let total: u64 = classes.iter().map(|c| c.degree()).sum();
    if classes.len() == 1 {
        return if classes[0] == cycle_class {
            GraphForm::Cycle
        } else if classes[0].degree() == 1 {
            GraphForm::ThickCycle { length: r }
        } else {
            GraphForm::Px { length: r, s: total - 1 }
        };
    }
    if classes.contains(&cycle_class) {
        if total == 2 {
            GraphForm::ThickCycle { length: p * r }
        } else {
            GraphForm::Px { length: p * r, s: total - 2 }
        }
    } else {
        GraphForm::Px { length: r, s: total - 1 }
    }
}

/// Build a reference copy of the graph a [`GraphForm`] names.
pub fn build_graph_form(p: u64, r: u64, form: GraphForm, max_vertices: u64) -> Result<Multigraph> {
    match form {
        GraphForm::Px { length, s } => crate::pxgraph::build_px(p, length, s, max_vertices),
        GraphForm::ThickCycle { length } => crate::pxgraph::build_px_zero(p, length, 1),
        GraphForm::Cycle => crate::pxgraph::build_px_zero(p, r, -1),
    }
}

fn g_m_owned(g: &AffineGroup, i: u64, e: u8) -> Mat {
    g.m(i, e).clone()
}

/// Map isomorphism: a group isomorphism carrying `(ρ, τ)` to `(ρ', τ')`.
/// Invariant pre-checks first, then the Cayley-walk extension.
pub fn maps_isomorphic(a: &RotaryMap, b: &RotaryMap, max_group_order: u64) -> Result<bool> {
    if a.group.order() != b.group.order() {
        return Ok(false);
    }
    let orders = |m: &RotaryMap| {
        (
            m.group.element_order(&m.rho),
            m.group.element_order(&m.tau),
            m.face_length(),
        )
    };
    if orders(a) != orders(b) {
        return Ok(false);
    }
    let gens_a = [a.rho.clone(), a.tau.clone()];
    let gens_b = [b.rho.clone(), b.tau.clone()];
    Ok(pair_extension(&a.group, &gens_a, &b.group, &gens_b, max_group_order)?.is_some())
}

/// First invertible intertwiner from the module `(a_c, a_b)` to
/// `(b_c, b_b)`, walking the solution space in counter order; `None` if
/// every intertwiner is singular.
pub fn module_isomorphism(
    p: u64,
    a_mats: (&Mat, &Mat),
    b_mats: (&Mat, &Mat),
) -> Result<Option<Mat>> {
    let basis = intertwiner_basis(a_mats.0, a_mats.1, b_mats.0, b_mats.1);
    if basis.is_empty() {
        return Ok(None);
    }
    let m = basis.len();
    let total = (0..m).try_fold(1u64, |acc, _| {
        acc.checked_mul(p).filter(|&t| t <= 1_000_000)
    });
    let Some(total) = total else {
        return Err(Error::Budget(
            "intertwiner space too large to scan for an invertible member".into(),
        ));
    };
    let n = basis[0].rows;
    let mut coords = vec![0u64; m];
    for _ in 1..total {
        let mut k = 0;
        loop {
            coords[k] += 1;
            if coords[k] < p {
                break;
            }
            coords[k] = 0;
            k += 1;
        }
        let mut l = Mat::zero(p, n, n);
        for (c, b) in coords.iter().zip(&basis) {
            if *c != 0 {
                l = l.add(&b.scale(*c));
            }
        }
        if l.det() != 0 {
            return Ok(Some(l));
        }
    }
    Ok(None)
}

/// Split a `D_2r`-module `(mat_c, mat_b)` into its irreducible summands,
/// requiring multiplicity-freeness.
///
/// The `c`-primary parts are kernels of the irreducible factors of
/// `x^r − 1` evaluated at `mat_c` (squarefree since `p ∤ r`, so they sum
/// to everything); the two eigenvalue-`±1` parts are further split by the
/// action of `b`, and a coset pair contributes the sum of its two
/// kernels. A part of any other dimension than the class degree means a
/// repeated constituent.
pub fn decompose_module(
    p: u64,
    r: u64,
    mat_c: &Mat,
    mat_b: &Mat,
) -> Result<Vec<(IrrClass, Subspace)>> {
    let n = mat_c.rows;
    if mat_b.rows != n || !mat_c.pow(r).is_identity() || !mat_b.mul(mat_b).is_identity() {
        return Err(Error::Verification(
            "the matrices do not define a D_2r-module".into(),
        ));
    }
    let factors = factor_x_r_minus_1(p, r)?;
    let factor_of = |elements: &[u64]| -> Result<&crate::ffpoly::Poly> {
        factors
            .iter()
            .find(|(_, coset)| coset.elements == elements)
            .map(|(f, _)| f)
            .ok_or_else(|| Error::Internal("missing cyclotomic factor".into()))
    };
    let eigen_split = |c_sign: u64, b_sign: u64| -> Subspace {
        let mut rows = Vec::new();
        let a = mat_c.sub_scalar_identity(c_sign);
        let b = mat_b.sub_scalar_identity(b_sign);
        for i in 0..n {
            rows.push(a.row(i).to_vec());
        }
        for i in 0..n {
            rows.push(b.row(i).to_vec());
        }
        Subspace::from_vectors(p, n, &Mat::from_rows(p, &rows).kernel_basis())
    };
    let mut parts: Vec<(IrrClass, Subspace)> = Vec::new();
    for class in enumerate_irr(p, r)? {
        let part = match &class {
            IrrClass::Linear { sign_a, sign_b } => {
                let sign_c = sign_a.mul(*sign_b);
                eigen_split(sign_c.to_fp(p), sign_b.to_fp(p))
            }
            IrrClass::CosetPair { s, neg } => {
                let mut space = Subspace::from_vectors(
                    p,
                    n,
                    &mat_c.eval_poly(factor_of(&s.elements)?).kernel_basis(),
                );
                let half = space.dim();
                for v in mat_c.eval_poly(factor_of(&neg.elements)?).kernel_basis() {
                    space.insert(v);
                }
                if space.dim() != 2 * half {
                    return Err(Error::Verification(format!(
                        "coset-pair halves are unbalanced in {}",
                        class.signature()
                    )));
                }
                space
            }
            IrrClass::SelfReciprocal { s } => Subspace::from_vectors(
                p,
                n,
                &mat_c.eval_poly(factor_of(&s.elements)?).kernel_basis(),
            ),
        };
        if part.dim() == 0 {
            continue;
        }
        if part.dim() as u64 != class.degree() {
            return Err(Error::Verification(format!(
                "the {} part has dimension {}, expected {} or 0: \
                 the module is not multiplicity-free",
                class.signature(),
                part.dim(),
                class.degree()
            )));
        }
        if !part.is_invariant(&[mat_c, mat_b]) {
            return Err(Error::Internal(format!(
                "the {} part is not invariant",
                class.signature()
            )));
        }
        // belt and braces: each part is irreducible, so one vector spins up
        let spun = Subspace::spin(p, n, &[mat_c, mat_b], &part.basis()[0]);
        if spun.dim() != part.dim() {
            return Err(Error::Internal(format!(
                "the {} part is reducible",
                class.signature()
            )));
        }
        parts.push((class, part));
    }
    let total: usize = parts.iter().map(|(_, w)| w.dim()).sum();
    if total != n {
        return Err(Error::Internal(
            "summand dimensions do not exhaust the module".into(),
        ));
    }
    Ok(parts)
}

/// The equivariant projection onto `w` along the other summands, obtained
/// by averaging an arbitrary projection over the group:
/// `π = (1/2r) Σ_{x ∈ D} M(x) π₀ M(x)^{-1}`.
fn averaged_projection(
    p: u64,
    r: u64,
    mat_c: &Mat,
    mat_b: &Mat,
    w: &Subspace,
) -> Result<Mat> {
    let n = mat_c.rows;
    let mut p0 = Mat::zero(p, n, n);
    for (row, &piv) in w.basis().iter().zip(w.pivots()) {
        for (a, &val) in row.iter().enumerate() {
            p0.set(a, piv, addm(p0.get(a, piv), val, p));
        }
    }
    let mut acc = Mat::zero(p, n, n);
    let mut c_pow = Mat::identity(p, n);
    let mut c_pow_inv = Mat::identity(p, n);
    let c_inv = mat_c
        .inverse()
        .ok_or_else(|| Error::Internal("c-image not invertible".into()))?;
    for _ in 0..r {
        // x = c^i and x = c^i b (b is an involution, so M(x)^{-1} folds in)
        acc = acc.add(&c_pow.mul(&p0).mul(&c_pow_inv));
        let refl = c_pow.mul(mat_b);
        acc = acc.add(&refl.mul(&p0).mul(&refl.inverse().ok_or_else(|| {
            Error::Internal("reflection image not invertible".into())
        })?));
        c_pow = c_pow.mul(mat_c);
        c_pow_inv = c_inv.mul(&c_pow_inv);
    }
    let scale = invm(2 * r % p, p);
    let pi = acc.scale(scale);
    // verify: idempotent, image exactly w, equivariant
    let ok = pi.mul(&pi) == pi
        && pi.mul(mat_c) == mat_c.mul(&pi)
        && pi.mul(mat_b) == mat_b.mul(&pi)
        && pi.rank() == w.dim()
        && w.basis().iter().all(|v| pi.matvec(v) == *v);
    if !ok {
        return Err(Error::Internal("averaged projection failed its checks".into()));
    }
    Ok(pi)
}

/// Matrix of the action restricted to a summand, in the summand's
/// echelon-basis coordinates.
fn restricted_matrix(m: &Mat, w: &Subspace) -> Result<Mat> {
    let d = w.dim();
    let mut out = Mat::zero(m.p, d, d);
    for (k, basis_vec) in w.basis().iter().enumerate() {
        let image = m.matvec(basis_vec);
        let coords = w
            .coordinates(&image)
            .ok_or_else(|| Error::Internal("summand is not invariant".into()))?;
        for (i, &c) in coords.iter().enumerate() {
            out.set(i, k, c);
        }
    }
    Ok(out)
}

/// Decompose a module into classes and produce the change of basis onto
/// the standard block-diagonal model: returns the standard group and `T`
/// with `T·mat_c = standard_c·T`, `T·mat_b = standard_b·T`.
pub fn standardize_module(
    p: u64,
    r: u64,
    mat_c: &Mat,
    mat_b: &Mat,
) -> Result<(AffineGroup, Mat)> {
    let parts = decompose_module(p, r, mat_c, mat_b)?;
    let classes: Vec<IrrClass> = parts.iter().map(|(c, _)| c.clone()).collect();
    let std_group = AffineGroup::from_classes(p, r, &classes)?;
    let n = mat_c.rows;
    let mut t = Mat::zero(p, n, n);
    for (idx, (class, w)) in parts.iter().enumerate() {
        let pi = averaged_projection(p, r, mat_c, mat_b, w)?;
        let r_c = restricted_matrix(mat_c, w)?;
        let r_b = restricted_matrix(mat_b, w)?;
        let model = realize(p, r, class)?;
        let l = module_isomorphism(p, (&r_c, &r_b), (&model.mat_c, &model.mat_b))?
            .ok_or_else(|| {
                Error::Internal(format!(
                    "no invertible intertwiner onto the {} model",
                    class.signature()
                ))
            })?;
        let (lo, _hi) = std_group.block_range(idx);
        for j in 0..n {
            let mut e_j = vec![0u64; n];
            e_j[j] = 1;
            let component = pi.matvec(&e_j);
            let coords = w
                .coordinates(&component)
                .ok_or_else(|| Error::Internal("projection left its image".into()))?;
            let mapped = l.matvec(&coords);
            for (i, &val) in mapped.iter().enumerate() {
                t.set(lo + i, j, val);
            }
        }
    }
    let ok = t.inverse().is_some()
        && t.mul(mat_c) == std_group.mat_c.mul(&t)
        && t.mul(mat_b) == std_group.mat_b.mul(&t);
    if !ok {
        return Err(Error::Internal(
            "assembled change of basis is not a module isomorphism".into(),
        ));
    }
    Ok((std_group, t))
}

/// The irreducible constituent maps, one per summand of the module, in
/// class order. Each is the image of the map under the quotient killing
/// the other summands.
pub fn decompose(map: &RotaryMap) -> Result<Vec<RotaryMap>> {
    let g = &map.group;
    let (p, r) = (g.p, g.r);
    let parts = decompose_module(p, r, &g.mat_c, &g.mat_b)?;
    let mut out = Vec::with_capacity(parts.len());
    for (class, w) in &parts {
        let pi = averaged_projection(p, r, &g.mat_c, &g.mat_b, w)?;
        let r_c = restricted_matrix(&g.mat_c, w)?;
        let r_b = restricted_matrix(&g.mat_b, w)?;
        let quotient_group = AffineGroup::from_classes(p, r, &[class.clone()])?;
        let model = realize(p, r, class)?;
        let l = module_isomorphism(p, (&r_c, &r_b), (&model.mat_c, &model.mat_b))?
            .ok_or_else(|| {
                Error::Internal(format!(
                    "no invertible intertwiner onto the {} model",
                    class.signature()
                ))
            })?;
        let project = |elem: &GElem| -> Result<GElem> {
            let component = pi.matvec(&elem.v);
            let coords = w
                .coordinates(&component)
                .ok_or_else(|| Error::Internal("projection left its image".into()))?;
            Ok(quotient_group.make(l.matvec(&coords), elem.i, elem.e))
        };
        let rho = project(&map.rho)?;
        let tau = project(&map.tau)?;
        out.push(RotaryMap::new(quotient_group, rho, tau)?);
    }
    Ok(out)
}

/// Direct product of rotary maps sharing `(p, r)`: the map carried by
/// `⟨(ρ₁, …, ρ_k), (τ₁, …, τ_k)⟩` inside the product group, renormalized
/// onto a standard affine group.
///
/// The subgroup is closed with tuple dihedral parts (always a copy of
/// `D_2r` generated by the two reflection tuples); its vector part `W` is
/// the new module. The closure's coset representatives form a section
/// that is straightened into a homomorphic one by averaging its cocycle,
/// after which elements split as `(w, i, e)` and `W` is standardized.
pub fn direct_product(maps: &[&RotaryMap]) -> Result<RotaryMap> {
    let Some(first) = maps.first() else {
        return Err(Error::ParamDomain("empty product".into()));
    };
    let (p, r) = (first.group.p, first.group.r);
    if maps.iter().any(|m| m.group.p != p || m.group.r != r) {
        return Err(Error::ParamDomain(
            "direct products need a common (p, r)".into(),
        ));
    }
    for m in maps {
        if m.rho.e != 1 || m.tau.e != 1 {
            return Err(Error::ParamDomain(
                "product factors must have reflection-type generators".into(),
            ));
        }
    }
    let offsets: Vec<usize> = maps
        .iter()
        .scan(0usize, |acc, m| {
            let lo = *acc;
            *acc += m.group.n;
            Some(lo)
        })
        .collect();
    let big_n: usize = maps.iter().map(|m| m.group.n).sum();
    type DTuple = Vec<(u64, u8)>;
    let dmul = |a: &DTuple, b: &DTuple| -> DTuple {
        a.iter()
            .zip(b)
            .map(|(&(i1, e1), &(i2, e2))| {
                let i = if e1 == 0 { (i1 + i2) % r } else { (i1 + r - i2) % r };
                (i, e1 ^ e2)
            })
            .collect()
    };
    let apply = |d: &DTuple, v: &[u64]| -> Vec<u64> {
        let mut out = vec![0u64; big_n];
        for ((m, &(i, e)), &lo) in maps.iter().zip(d).zip(&offsets) {
            let block = m.group.m(i, e).matvec(&v[lo..lo + m.group.n]);
            out[lo..lo + m.group.n].copy_from_slice(&block);
        }
        out
    };
    let add = |a: &[u64], b: &[u64]| -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| addm(x, y, p)).collect()
    };
    let gens: Vec<(Vec<u64>, DTuple)> = {
        let mut rho_v = vec![0u64; big_n];
        let mut tau_v = vec![0u64; big_n];
        let mut rho_d = Vec::new();
        let mut tau_d = Vec::new();
        for (m, &lo) in maps.iter().zip(&offsets) {
            rho_v[lo..lo + m.group.n].copy_from_slice(&m.rho.v);
            tau_v[lo..lo + m.group.n].copy_from_slice(&m.tau.v);
            rho_d.push((m.rho.i, 1u8));
            tau_d.push((m.tau.i, 1u8));
        }
        vec![(rho_v, rho_d), (tau_v, tau_d)]
    };
    // closure with dynamically indexed dihedral-part tuples
    let identity_d: DTuple = vec![(0, 0); maps.len()];
    let mut dparts: Vec<DTuple> = vec![identity_d.clone()];
    let mut index = std::collections::HashMap::new();
    index.insert(identity_d, 0usize);
    let mut reps: Vec<Vec<u64>> = vec![vec![0; big_n]];
    let mut w = Subspace::new(p, big_n);
    let mut head = 0usize;
    while head < reps.len() {
        let (d, rep) = (dparts[head].clone(), reps[head].clone());
        head += 1;
        for (gv, gd) in &gens {
            let nd = dmul(&d, gd);
            let nv = add(&rep, &apply(&d, gv));
            match index.get(&nd) {
                None => {
                    index.insert(nd.clone(), dparts.len());
                    dparts.push(nd);
                    reps.push(nv);
                }
                Some(&k) => {
                    let diff: Vec<u64> =
                        nv.iter().zip(&reps[k]).map(|(&x, &y)| subm(x, y, p)).collect();
                    w.insert(diff);
                }
            }
        }
    }
    if dparts.len() != 2 * r as usize {
        return Err(Error::Internal(format!(
            "tuple closure found {} dihedral parts, expected {}",
            dparts.len(),
            2 * r
        )));
    }
    // straighten the section: e(δ) = avg_x [c(δ) + M(δ)c(x) − c(δx)]
    let scale = invm(2 * r % p, p);
    let mut corrected: Vec<Vec<u64>> = Vec::with_capacity(reps.len());
    for (di, d) in dparts.iter().enumerate() {
        let mut acc = vec![0u64; big_n];
        for (xi, x) in dparts.iter().enumerate() {
            let dx = dmul(d, x);
            let k = index[&dx];
            let moved = apply(d, &reps[xi]);
            for (slot, ((&cd, &mv), &cdx)) in acc
                .iter_mut()
                .zip(reps[di].iter().zip(&moved).zip(&reps[k]))
            {
                let f = subm(addm(cd, mv, p), cdx, p);
                *slot = addm(*slot, f, p);
            }
        }
        let e_d: Vec<u64> = acc.iter().map(|&x| mulm(x, scale, p)).collect();
        if !w.contains(&e_d) {
            return Err(Error::Internal("cocycle average left W".into()));
        }
        corrected.push(
            reps[di]
                .iter()
                .zip(&e_d)
                .map(|(&c, &e)| subm(c, e, p))
                .collect(),
        );
    }
    // the corrected section must be homomorphic on all of D₀
    for (di, d) in dparts.iter().enumerate() {
        for (xi, x) in dparts.iter().enumerate() {
            let dx = dmul(d, x);
            let k = index[&dx];
            let lhs = add(&corrected[di], &apply(d, &corrected[xi]));
            if lhs != corrected[k] {
                return Err(Error::Internal("straightened section not a homomorphism".into()));
            }
        }
    }
    // W as the new module: generators of its dihedral action
    let d_tau = &dparts[index[&gens[1].1]];
    let d_c = dmul(&gens[0].1, &gens[1].1); // ρ̄τ̄, of order r
    let to_w_matrix = |d: &DTuple| -> Result<Mat> {
        let dim = w.dim();
        let mut out = Mat::zero(p, dim, dim);
        for (k, basis_vec) in w.basis().iter().enumerate() {
            let image = apply(d, basis_vec);
            let coords = w.coordinates(&image).ok_or_else(|| {
                Error::Internal("W is not invariant under the tuple action".into())
            })?;
            for (i, &c) in coords.iter().enumerate() {
                out.set(i, k, c);
            }
        }
        Ok(out)
    };
    let w_c = to_w_matrix(&d_c)?;
    let w_b = to_w_matrix(d_tau)?;
    let (std_group, t) = standardize_module(p, r, &w_c, &w_b)?;
    // express each generator in the split coordinates (w − section, i, e):
    // ρ̄ sits over c·b (i = 1, e = 1), τ̄ over b (i = 0, e = 1)
    let transport = |gv: &[u64], d: &DTuple, i: u64, e: u8| -> Result<GElem> {
        let k = index[d];
        let wpart: Vec<u64> = gv
            .iter()
            .zip(&corrected[k])
            .map(|(&x, &y)| subm(x, y, p))
            .collect();
        let coords = w
            .coordinates(&wpart)
            .ok_or_else(|| Error::Internal("generator is not in its W-coset".into()))?;
        Ok(std_group.make(t.matvec(&coords), i, e))
    };
    let rho = transport(&gens[0].0, &gens[0].1, 1, 1)?;
    let tau = transport(&gens[1].0, &gens[1].1, 0, 1)?;
    RotaryMap::new(std_group, rho, tau)
}

/// Serialized form of a map: the group by parameters and class
/// signatures, the generators as flat `[v…, i, e]` arrays, the counts,
/// and an optional reference to an exported edge list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapJson {
    pub group: MapGroupJson,
    pub rho: Vec<u64>,
    pub tau: Vec<u64>,
    pub counts: MapCountsJson,
    pub graph: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapGroupJson {
    pub p: u64,
    pub r: u64,
    pub classes: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct MapCountsJson {
    pub v: u64,
    pub e: u64,
    pub f: u64,
    pub chi: i64,
}

pub fn map_to_json(map: &RotaryMap, graph: Option<String>) -> MapJson {
    let flat = |e: &GElem| -> Vec<u64> {
        let mut out = e.v.clone();
        out.push(e.i);
        out.push(e.e as u64);
        out
    };
    let counts = map.counts();
    MapJson {
        group: MapGroupJson {
            p: map.group.p,
            r: map.group.r,
            classes: map.group.classes.iter().map(|c| c.signature()).collect(),
        },
        rho: flat(&map.rho),
        tau: flat(&map.tau),
        counts: MapCountsJson {
            v: counts.vertices as u64,
            e: counts.edges as u64,
            f: counts.faces as u64,
            chi: counts.chi as i64,
        },
        graph,
    }
}

pub fn map_from_json(raw: &MapJson) -> Result<RotaryMap> {
    let (p, r) = (raw.group.p, raw.group.r);
    let classes: Vec<IrrClass> = raw
        .group
        .classes
        .iter()
        .map(|s| parse_signature(p, r, s))
        .collect::<Result<_>>()?;
    let group = AffineGroup::from_classes(p, r, &classes)?;
    let unflat = |flat: &[u64], name: &str| -> Result<GElem> {
        if flat.len() != group.n + 2 {
            return Err(Error::Parse(format!(
                "{name} has {} entries, expected {}",
                flat.len(),
                group.n + 2
            )));
        }
        let (v, tail) = flat.split_at(group.n);
        if v.iter().any(|&x| x >= p) || tail[0] >= r || tail[1] > 1 {
            return Err(Error::Parse(format!("{name} coordinates out of range")));
        }
        Ok(group.make(v.to_vec(), tail[0], tail[1] as u8))
    };
    let rho = unflat(&raw.rho, "rho")?;
    let tau = unflat(&raw.tau, "tau")?;
    let map = RotaryMap::new(group, rho, tau)?;
    let counts = map.counts();
    let stated = &raw.counts;
    if (stated.v as u128, stated.e as u128, stated.f as u128, stated.chi as i128)
        != (counts.vertices, counts.edges, counts.faces, counts.chi)
    {
        return Err(Error::Verification(
            "stored counts disagree with the reconstructed map".into(),
        ));
    }
    Ok(map)
}

/// Write a map as pretty JSON, atomically (temp file + rename).
pub fn write_map_file(map: &RotaryMap, path: &std::path::Path, graph: Option<String>) -> Result<()> {
    let json = map_to_json(map, graph);
    let text = serde_json::to_string_pretty(&json)
        .map_err(|e| Error::Internal(format!("serialize: {e}")))?;
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text + "\n")?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_map_file(path: &std::path::Path) -> Result<RotaryMap> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    let raw: MapJson = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    map_from_json(&raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pxgraph::{build_px, build_px_zero, isomorphic};

    fn classes(p: u64, r: u64, sigs: &[&str]) -> Vec<IrrClass> {
        sigs.iter().map(|s| parse_signature(p, r, s).unwrap()).collect()
    }

    #[test]
    fn cycle_map_shape() {
        let map = construct_rotary_default(3, 4, &classes(3, 4, &["L(-,-)"])).unwrap();
        assert_eq!(map.group.element_order(&map.rho), 2);
        let counts = map.counts();
        assert_eq!(
            (counts.vertices, counts.edges, counts.faces, counts.chi),
            (12, 12, 2, 2)
        );
        let built = build_map(&map, 2000).unwrap();
        let cycle = build_px_zero(3, 4, -1).unwrap();
        assert!(isomorphic(&built.graph, &cycle, 2000).unwrap());
    }

    #[test]
    fn thick_cycle_maps_shape() {
        let map = construct_rotary_default(3, 4, &classes(3, 4, &["L(+,+)"])).unwrap();
        let counts = map.counts();
        assert_eq!(
            (counts.vertices, counts.edges, counts.faces, counts.chi),
            (4, 12, 2, -6)
        );
        let thick = build_px_zero(3, 4, 1).unwrap();
        assert!(isomorphic(&build_map(&map, 2000).unwrap().graph, &thick, 2000).unwrap());

        let map = construct_rotary_default(3, 4, &classes(3, 4, &["L(+,-)"])).unwrap();
        let counts = map.counts();
        assert_eq!(counts.faces, 6); // 2p faces on the same thickened cycle
        assert_eq!(counts.chi, -2);
        assert!(isomorphic(&build_map(&map, 2000).unwrap().graph, &thick, 2000).unwrap());
    }

    #[test]
    fn quartic_face_example() {
        // the singleton-pair class at (5, 4): faces close after p − 1 steps
        let map = construct_rotary_default(5, 4, &classes(5, 4, &["P{1}"])).unwrap();
        assert_eq!(map.face_length(), 4);
        let counts = map.counts();
        assert_eq!(
            (counts.vertices, counts.edges, counts.faces, counts.chi),
            (20, 100, 50, -30)
        );
    }

    #[test]
    fn plane_map_on_the_complete_bipartite_graph() {
        let map = construct_rotary_default(3, 4, &classes(3, 4, &["R{1,3}"])).unwrap();
        let built = build_map(&map, 2000).unwrap();
        let px = build_px(3, 4, 1, 2000).unwrap();
        assert!(isomorphic(&built.graph, &px, 2000).unwrap());
    }

    #[test]
    fn two_maps_of_total_degree_two_at_5_3() {
        let a = construct_rotary_default(5, 3, &classes(5, 3, &["L(+,+)", "L(-,-)"])).unwrap();
        let b = construct_rotary_default(5, 3, &classes(5, 3, &["R{1,2}"])).unwrap();
        for m in [&a, &b] {
            assert_eq!(m.counts().vertices, 15);
        }
        // Same vertex count, different graphs: the linear pair forces edge
        // multiplicity 5 (its group is Z_5 × D_30), the plane class is simple.
        let thick = build_px_zero(5, 15, 1).unwrap();
        assert!(isomorphic(&build_map(&a, 2000).unwrap().graph, &thick, 2000).unwrap());
        let px = build_px(5, 3, 1, 2000).unwrap();
        assert!(isomorphic(&build_map(&b, 2000).unwrap().graph, &px, 2000).unwrap());
        assert_eq!(graph_form(5, 3, &a.group.classes), GraphForm::ThickCycle { length: 15 });
        assert_eq!(graph_form(5, 3, &b.group.classes), GraphForm::Px { length: 3, s: 1 });
        assert!(!maps_isomorphic(&a, &b, 100_000).unwrap());
        assert!(maps_isomorphic(&a, &a, 100_000).unwrap());
    }

    #[test]
    fn graph_form_by_content() {
        let f = |names: &[&str]| graph_form(3, 4, &classes(3, 4, names));
        assert_eq!(f(&["L(-,-)"]), GraphForm::Cycle);
        assert_eq!(f(&["L(+,+)"]), GraphForm::ThickCycle { length: 4 });
        assert_eq!(f(&["L(+,-)"]), GraphForm::ThickCycle { length: 4 });
        assert_eq!(f(&["R{1,3}"]), GraphForm::Px { length: 4, s: 1 });
        assert_eq!(f(&["L(+,+)", "L(-,-)"]), GraphForm::ThickCycle { length: 12 });
        assert_eq!(f(&["L(+,-)", "L(-,-)"]), GraphForm::ThickCycle { length: 12 });
        assert_eq!(f(&["L(+,+)", "L(+,-)"]), GraphForm::Px { length: 4, s: 1 });
        assert_eq!(f(&["L(-,-)", "R{1,3}"]), GraphForm::Px { length: 12, s: 1 });
        assert_eq!(f(&["L(+,+)", "R{1,3}"]), GraphForm::Px { length: 4, s: 2 });
        assert_eq!(
            f(&["L(+,+)", "L(-,-)", "L(+,-)"]),
            GraphForm::Px { length: 12, s: 1 }
        );
        assert_eq!(
            f(&["L(+,+)", "L(-,-)", "R{1,3}"]),
            GraphForm::Px { length: 12, s: 2 }
        );
        assert_eq!(GraphForm::Px { length: 4, s: 1 }.label(3, 4), "C(3,4,1)");
        assert_eq!(GraphForm::Px { length: 12, s: 1 }.label(3, 4), "C(3,12,1)");
        assert_eq!(GraphForm::ThickCycle { length: 12 }.label(3, 4), "C*(3,12,0,1)");
        assert_eq!(GraphForm::Cycle.label(3, 4), "C*(3,4,0,-1)");
    }

    #[test]
    fn degenerate_pairs_are_rejected() {
        let g = AffineGroup::from_classes(3, 4, &classes(3, 4, &["L(+,+)"])).unwrap();
        let rho = g.make(vec![1], 1, 1);
        // τ = ρ³ lies in ⟨ρ⟩
        let tau = g.mul(&g.mul(&rho, &rho), &rho);
        assert_eq!(g.element_order(&tau), 2);
        let err = RotaryMap::new(g.clone(), rho.clone(), tau).unwrap_err();
        assert!(matches!(err, Error::Verification(_)));
        // non-generating pair
        let err =
            RotaryMap::new(g.clone(), g.make(vec![0], 1, 1), g.make(vec![0], 0, 1))
                .unwrap_err();
        assert!(matches!(err, Error::Verification(_)));
    }

    #[test]
    fn construct_requires_unit_offset() {
        let err = construct_rotary(3, 4, &classes(3, 4, &["R{1,3}"]), 2, 0).unwrap_err();
        assert!(matches!(err, Error::ParamDomain(_)));
    }

    #[test]
    fn decompose_roundtrip_three_classes() {
        let set = classes(3, 4, &["L(+,+)", "L(-,-)", "R{1,3}"]);
        let map = construct_rotary_default(3, 4, &set).unwrap();
        let parts = decompose(&map).unwrap();
        assert_eq!(parts.len(), 3);
        for (part, class) in parts.iter().zip(&set) {
            assert_eq!(part.group.classes, vec![class.clone()]);
            let canonical = construct_rotary_default(3, 4, &[class.clone()]).unwrap();
            assert!(
                maps_isomorphic(part, &canonical, 100_000).unwrap(),
                "constituent {} is not the canonical map",
                class.signature()
            );
        }
    }

    #[test]
    fn products_recombine_linear_content() {
        // {L(+,+)} × {L(-,-)} at (5,3): the product carries both classes and
        // lives on the thickened 15-cycle.
        let a = construct_rotary_default(5, 3, &classes(5, 3, &["L(+,+)"])).unwrap();
        let b = construct_rotary_default(5, 3, &classes(5, 3, &["L(-,-)"])).unwrap();
        let prod = direct_product(&[&a, &b]).unwrap();
        let expected =
            construct_rotary_default(5, 3, &classes(5, 3, &["L(+,+)", "L(-,-)"])).unwrap();
        assert_eq!(prod.group.classes, expected.group.classes);
        assert!(maps_isomorphic(&prod, &expected, 100_000).unwrap());
        let thick = build_px_zero(5, 15, 1).unwrap();
        assert!(isomorphic(&build_map(&prod, 2000).unwrap().graph, &thick, 2000).unwrap());

        // {L(+,+)} × {L(+,-)} at (3,4): two thickened-cycle maps whose
        // product is simple, on C(3,4,1).
        let a = construct_rotary_default(3, 4, &classes(3, 4, &["L(+,+)"])).unwrap();
        let b = construct_rotary_default(3, 4, &classes(3, 4, &["L(+,-)"])).unwrap();
        let prod = direct_product(&[&a, &b]).unwrap();
        let px = build_px(3, 4, 1, 2000).unwrap();
        assert!(isomorphic(&build_map(&prod, 2000).unwrap().graph, &px, 2000).unwrap());
    }

    #[test]
    fn product_with_itself_collapses() {
        let m = construct_rotary_default(5, 3, &classes(5, 3, &["R{1,2}"])).unwrap();
        let prod = direct_product(&[&m, &m]).unwrap();
        assert_eq!(prod.group.classes, m.group.classes);
        assert!(maps_isomorphic(&prod, &m, 100_000).unwrap());
    }

    #[test]
    fn cross_parameter_cycle_maps_agree() {
        // D_30 carries the 15-cycle map seen from (3,5) and from (5,3)
        let a = construct_rotary_default(3, 5, &classes(3, 5, &["L(-,-)"])).unwrap();
        let b = construct_rotary_default(5, 3, &classes(5, 3, &["L(-,-)"])).unwrap();
        assert_eq!(a.group.order(), 30);
        assert_eq!(b.group.order(), 30);
        assert!(maps_isomorphic(&a, &b, 100_000).unwrap());
    }

    #[test]
    fn json_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("map.json");
        let map = construct_rotary_default(3, 4, &classes(3, 4, &["L(+,+)", "R{1,3}"])).unwrap();
        write_map_file(&map, &path, Some("graph.txt".into())).unwrap();
        let back = read_map_file(&path).unwrap();
        assert_eq!(back.group.classes, map.group.classes);
        assert_eq!(back.rho, map.rho);
        assert_eq!(back.tau, map.tau);
        // and a tampered file fails verification
        let mut raw: MapJson =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        raw.counts.f += 2;
        std::fs::write(&path, serde_json::to_string(&raw).unwrap()).unwrap();
        assert!(matches!(read_map_file(&path), Err(Error::Verification(_))));
    }

    #[test]
    fn standardize_recovers_a_scrambled_module() {
        // conjugate the standard module by a fixed invertible matrix and
        // check the standardization transports back onto the model
        let set = classes(3, 4, &["L(-,-)", "R{1,3}"]);
        let g = AffineGroup::from_classes(3, 4, &set).unwrap();
        let s = Mat::from_rows(3, &[vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]]);
        let s_inv = s.inverse().unwrap();
        let scrambled_c = s.mul(&g.mat_c).mul(&s_inv);
        let scrambled_b = s.mul(&g.mat_b).mul(&s_inv);
        let (std_group, t) = standardize_module(3, 4, &scrambled_c, &scrambled_b).unwrap();
        assert_eq!(std_group.classes, set);
        assert_eq!(t.mul(&scrambled_c), std_group.mat_c.mul(&t));
        assert_eq!(t.mul(&scrambled_b), std_group.mat_b.mul(&t));
    }

    #[test]
    fn decompose_rejects_repeated_content() {
        // two copies of the same class: glue the standard block twice
        let g = AffineGroup::from_classes(3, 4, &classes(3, 4, &["R{1,3}"])).unwrap();
        let twice_c = Mat::block_diag(3, &[&g.mat_c, &g.mat_c]);
        let twice_b = Mat::block_diag(3, &[&g.mat_b, &g.mat_b]);
        let err = decompose_module(3, 4, &twice_c, &twice_b).unwrap_err();
        assert!(matches!(err, Error::Verification(_)));
    }
}
