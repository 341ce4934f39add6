//! The split extension `G = V ⋊ D_2r` for a multiplicity-free module `V`,
//! with exact element arithmetic, generation testing, rotary-pair
//! enumeration, and automorphism counting.
//!
//! Elements are triples `(v, i, e)` standing for `v · c^i · b^e` with
//! `v ∈ V = F_p^n`; multiplication pulls the right-hand vector through the
//! module action: `(v₁,d₁)(v₂,d₂) = (v₁ + M(d₁)v₂, d₁d₂)` where `M(i,e)`
//! is the matrix of `c^i b^e` on `V`.
//!
//! The generation test never materializes the group. It closes the
//! dihedral parts (at most `2r` of them), keeps one representative vector
//! per dihedral part, and funnels every collision into a growing subspace
//! `W = H ∩ V`; then `|H| = #parts · p^{dim W}`. Each (element, generator)
//! edge is examined once, so a single test costs `O(r · n²)` — cheap
//! enough to run millions of times during brute enumeration.

use crate::dihedral::{realize, DihedralAut, IrrClass, MatrixRep, Sign};
use crate::error::{Error, Result};
use crate::ffpoly::{addm, gcd, mulm, negm, subm};
use crate::linalg::{Mat, Subspace};
use crate::validate_pr;

/// `v · c^i · b^e` with `v ∈ F_p^n`, `0 ≤ i < r`, `e ∈ {0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GElem {
    pub v: Vec<u64>,
    pub i: u64,
    pub e: u8,
}

/// Split extension `F_p^n ⋊ D_2r` defined by a set of distinct
/// irreducible classes (the multiplicity-free module is their sum).
#[derive(Debug, Clone)]
pub struct AffineGroup {
    pub p: u64,
    pub r: u64,
    pub classes: Vec<IrrClass>,
    pub n: usize,
    pub mat_c: Mat,
    pub mat_b: Mat,
    /// Coordinate range of each class block, aligned with `classes`.
    block_ranges: Vec<(usize, usize)>,
    /// `M(i, e)` at index `2i + e`.
    m_table: Vec<Mat>,
}

impl AffineGroup {
    pub fn from_classes(p: u64, r: u64, classes: &[IrrClass]) -> Result<AffineGroup> {
        validate_pr(p, r)?;
        if classes.is_empty() {
            return Err(Error::ParamDomain(
                "at least one irreducible class is required".into(),
            ));
        }
        for (idx, cl) in classes.iter().enumerate() {
            if classes[..idx].contains(cl) {
                return Err(Error::ParamDomain(format!(
                    "class {} repeats; the module must be multiplicity-free",
                    cl.signature()
                )));
            }
        }
        let reps: Vec<MatrixRep> =
            classes.iter().map(|cl| realize(p, r, cl)).collect::<Result<_>>()?;
        let mut block_ranges = Vec::new();
        let mut off = 0usize;
        for rep in &reps {
            let d = rep.mat_c.rows;
            block_ranges.push((off, off + d));
            off += d;
        }
        let mat_c = Mat::block_diag(p, &reps.iter().map(|m| &m.mat_c).collect::<Vec<_>>());
        let mat_b = Mat::block_diag(p, &reps.iter().map(|m| &m.mat_b).collect::<Vec<_>>());
        let n = off;
        let mut m_table = Vec::with_capacity(2 * r as usize);
        let mut c_pow = Mat::identity(p, n);
        for _ in 0..r {
            m_table.push(c_pow.clone());
            m_table.push(c_pow.mul(&mat_b));
            c_pow = c_pow.mul(&mat_c);
        }
        Ok(AffineGroup {
            p,
            r,
            classes: classes.to_vec(),
            n,
            mat_c,
            mat_b,
            block_ranges,
            m_table,
        })
    }

    pub fn order(&self) -> u128 {
        2 * self.r as u128 * upow(self.p, self.n as u32)
    }

    /// The matrix of `c^i b^e` on `V`.
    pub fn m(&self, i: u64, e: u8) -> &Mat {
        &self.m_table[2 * (i % self.r) as usize + (e & 1) as usize]
    }

    pub fn block_range(&self, class_index: usize) -> (usize, usize) {
        self.block_ranges[class_index]
    }

    pub fn identity(&self) -> GElem {
        GElem { v: vec![0; self.n], i: 0, e: 0 }
    }

    pub fn make(&self, v: Vec<u64>, i: u64, e: u8) -> GElem {
        assert_eq!(v.len(), self.n);
        GElem {
            v: v.into_iter().map(|x| x % self.p).collect(),
            i: i % self.r,
            e: e & 1,
        }
    }

    pub fn mul(&self, a: &GElem, b: &GElem) -> GElem {
        let p = self.p;
        let moved = self.m(a.i, a.e).matvec(&b.v);
        let v = a.v.iter().zip(&moved).map(|(&x, &y)| addm(x, y, p)).collect();
        let i = if a.e == 0 {
            (a.i + b.i) % self.r
        } else {
            (a.i + self.r - b.i) % self.r
        };
        GElem { v, i, e: a.e ^ b.e }
    }

    pub fn inv(&self, a: &GElem) -> GElem {
        // Dihedral inverse first: (c^i)^{-1} = c^{-i}, reflections are
        // involutions; then the vector part is pulled back through it.
        let (i, e) = if a.e == 0 { ((self.r - a.i) % self.r, 0) } else { (a.i, 1) };
        let moved = self.m(i, e).matvec(&a.v);
        let v = moved.iter().map(|&x| negm(x, self.p)).collect();
        GElem { v, i, e }
    }

    /// Exact element order from the closed forms for split extensions:
    /// powers of `(v, d)` telescope to geometric sums `Σ M(d)^j v`.
    pub fn element_order(&self, a: &GElem) -> u64 {
        let p = self.p;
        if a.e == 1 {
            // square = (v + M(a)v, 1); a reflection either is an involution
            // or squares to a nontrivial translation of order p.
            let moved = self.m(a.i, 1).matvec(&a.v);
            let square_zero =
                a.v.iter().zip(&moved).all(|(&x, &y)| addm(x, y, p) == 0);
            return if square_zero { 2 } else { 2 * p };
        }
        if a.i == 0 {
            return if a.v.iter().all(|&x| x == 0) { 1 } else { p };
        }
        let t = self.r / gcd(a.i, self.r);
        let mut sum = vec![0u64; self.n];
        for j in 0..t {
            let moved = self.m(a.i * j % self.r, 0).matvec(&a.v);
            for (s, &y) in sum.iter_mut().zip(&moved) {
                *s = addm(*s, y, p);
            }
        }
        if sum.iter().all(|&x| x == 0) {
            t
        } else {
            t * p
        }
    }

    /// Dense element index: vector digits (little-endian base `p`), then
    /// rotation, then reflection bit.
    pub fn elem_index(&self, a: &GElem) -> usize {
        let mut vi = 0usize;
        for &digit in a.v.iter().rev() {
            vi = vi * self.p as usize + digit as usize;
        }
        (vi * self.r as usize + a.i as usize) * 2 + a.e as usize
    }

    pub fn elem_at(&self, index: usize) -> GElem {
        let e = (index & 1) as u8;
        let rest = index >> 1;
        let i = (rest % self.r as usize) as u64;
        let mut vi = rest / self.r as usize;
        let mut v = vec![0u64; self.n];
        for digit in v.iter_mut() {
            *digit = (vi % self.p as usize) as u64;
            vi /= self.p as usize;
        }
        debug_assert_eq!(vi, 0);
        GElem { v, i, e }
    }

    /// Order of `⟨gens⟩` via dihedral-part closure (see module docs).
    pub fn subgroup_size(&self, gens: &[GElem]) -> u128 {
        let (parts, wdim) = self.closure_dims(gens, false);
        parts as u128 * upow(self.p, wdim as u32)
    }

    pub fn generates(&self, gens: &[GElem]) -> bool {
        let (parts, wdim) = self.closure_dims(gens, true);
        parts == 2 * self.r as usize && wdim == self.n
    }

    fn closure_dims(&self, gens: &[GElem], early_exit: bool) -> (usize, usize) {
        let mut tester = PairTester::new(self);
        tester.closure(gens.iter().map(|g| (g.v.as_slice(), g.i, g.e)), early_exit)
    }
}

fn upow(base: u64, exp: u32) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc * base as u128)
}

/// Reusable scratch space for the dihedral-part closure, so the brute
/// enumerator does not allocate per pair.
struct PairTester<'g> {
    g: &'g AffineGroup,
    /// Representative vector per dihedral part, `2r × n` flat.
    reps: Vec<u64>,
    have: Vec<bool>,
    queue: Vec<u32>,
    /// Echelon rows of `W = H ∩ V`, `n × n` flat, `wdim` used.
    wrows: Vec<u64>,
    wpivots: Vec<usize>,
    scratch: Vec<u64>,
}

impl<'g> PairTester<'g> {
    fn new(g: &'g AffineGroup) -> PairTester<'g> {
        let parts = 2 * g.r as usize;
        PairTester {
            g,
            reps: vec![0; parts * g.n],
            have: vec![false; parts],
            queue: Vec::with_capacity(parts),
            wrows: vec![0; g.n * g.n],
            wpivots: Vec::with_capacity(g.n),
            scratch: vec![0; g.n],
        }
    }

    /// Forward-reduce `v` against the echelon rows of `W` in place.
    fn wreduce(&mut self, v: &mut [u64]) {
        let p = self.g.p;
        let n = self.g.n;
        for (row, &piv) in self.wpivots.iter().enumerate() {
            let c = v[piv];
            if c == 0 {
                continue;
            }
            let row = &self.wrows[row * n..(row + 1) * n];
            for (x, &y) in v.iter_mut().zip(row) {
                *x = subm(*x, mulm(c, y, p), p);
            }
        }
    }

    /// Insert an already-reduced nonzero vector into `W`.
    fn winsert(&mut self, v: &[u64]) {
        let p = self.g.p;
        let n = self.g.n;
        let piv = v.iter().position(|&c| c != 0).expect("nonzero");
        let inv = crate::ffpoly::invm(v[piv], p);
        let row = self.wpivots.len();
        for (slot, &c) in self.wrows[row * n..(row + 1) * n].iter_mut().zip(v) {
            *slot = mulm(c, inv, p);
        }
        self.wpivots.push(piv);
    }

    /// Run the closure; returns (#dihedral parts reached, dim W).
    fn closure<'a>(
        &mut self,
        gens: impl Iterator<Item = (&'a [u64], u64, u8)> + Clone,
        early_exit: bool,
    ) -> (usize, usize) {
        let g = self.g;
        let (p, r, n) = (g.p, g.r as usize, g.n);
        let parts = 2 * r;
        self.have.iter_mut().for_each(|h| *h = false);
        self.queue.clear();
        self.wpivots.clear();
        self.have[0] = true;
        self.reps[..n].iter_mut().for_each(|x| *x = 0);
        self.queue.push(0);
        let mut found = 1usize;
        let mut head = 0usize;
        while head < self.queue.len() {
            let d = self.queue[head] as usize;
            head += 1;
            let (di, de) = ((d / 2) as u64, (d & 1) as u8);
            for (gv, gi, ge) in gens.clone() {
                let nd = {
                    let i = if de == 0 {
                        (di + gi) % r as u64
                    } else {
                        (di + r as u64 - gi) % r as u64
                    };
                    2 * i as usize + (de ^ ge) as usize
                };
                // product vector = reps[d] + M(d)·gv
                let m = g.m(di, de);
                for (k, slot) in self.scratch.iter_mut().enumerate() {
                    let mut acc = self.reps[d * n + k];
                    for (j, &x) in gv.iter().enumerate() {
                        acc = addm(acc, mulm(m.get(k, j), x, p), p);
                    }
                    *slot = acc;
                }
                if !self.have[nd] {
                    self.have[nd] = true;
                    for k in 0..n {
                        self.reps[nd * n + k] = self.scratch[k];
                    }
                    found += 1;
                    self.queue.push(nd as u32);
                } else {
                    for k in 0..n {
                        self.scratch[k] = subm(self.scratch[k], self.reps[nd * n + k], p);
                    }
                    let mut diff = std::mem::take(&mut self.scratch);
                    self.wreduce(&mut diff);
                    if diff.iter().any(|&c| c != 0) {
                        self.winsert(&diff);
                    }
                    self.scratch = diff;
                }
                if early_exit && found == parts && self.wpivots.len() == n {
                    return (found, n);
                }
            }
        }
        (found, self.wpivots.len())
    }
}

/// Count of ordered generating pairs `(ρ, τ)` with `|ρ|` equal to the
/// target order and `|τ| = 2`, plus a thin sample for spot checks.
#[derive(Debug, Clone)]
pub struct PairCount {
    pub target_order: u64,
    pub pairs: u128,
    pub samples: Vec<(GElem, GElem)>,
}

/// The rotation order a rotary map on this group must have: `|ρ| = |G|/|V|`
/// forces `2p` except for the one group whose map is a full cycle.
pub fn rho_target_order(g: &AffineGroup) -> u64 {
    let cycle_class =
        [IrrClass::Linear { sign_a: Sign::Minus, sign_b: Sign::Minus }];
    if g.classes == cycle_class {
        2
    } else {
        2 * g.p
    }
}

/// Brute enumeration of ordered pairs `(ρ, τ)`, `|ρ| = target_order`,
/// `|τ| = 2`, `⟨ρ, τ⟩ = G`.
///
/// Both elements must project to reflections of `D_2r`: an involution
/// and an element of order `2`, `2p` project to order ≤ 2, and two
/// rotation-part involutions generate at most 4 rotations, so a
/// generating pair needs reflections `c^i b`, `c^j b` with
/// `gcd(i − j, r) = 1`. The scan runs over exactly that shape.
pub fn enumerate_rotary_pairs(
    g: &AffineGroup,
    target_order: u64,
    max_group_order: u64,
) -> Result<PairCount> {
    if g.order() > max_group_order as u128 {
        return Err(Error::Budget(format!(
            "group order {} exceeds the enumeration cap {max_group_order}",
            g.order()
        )));
    }
    let (p, r, n) = (g.p, g.r, g.n);
    if target_order != 2 && target_order != 2 * p {
        return Err(Error::ParamDomain(format!(
            "rotation order {target_order} is not 2 or 2p"
        )));
    }
    let vcount = upow(p, n as u32) as usize;
    // τ candidates per reflection index j: the (−1)-eigenspace of M(j, 1).
    let mut tau_vecs: Vec<Vec<Vec<u64>>> = Vec::with_capacity(r as usize);
    for j in 0..r {
        let mj = g.m(j, 1);
        let eig = Subspace::from_vectors(
            p,
            n,
            &mj.sub_scalar_identity(p - 1).kernel_basis(),
        );
        let mut vecs = Vec::with_capacity(upow(p, eig.dim() as u32) as usize);
        let mut coords = vec![0u64; eig.dim()];
        loop {
            vecs.push(eig.from_coordinates(&coords));
            let mut k = 0;
            while k < coords.len() {
                coords[k] += 1;
                if coords[k] < p {
                    break;
                }
                coords[k] = 0;
                k += 1;
            }
            if k == coords.len() {
                break;
            }
        }
        tau_vecs.push(vecs);
    }
    let unit_offsets: Vec<u64> = (1..r).filter(|&u| gcd(u, r) == 1).collect();
    let mut tester = PairTester::new(g);
    let mut pairs: u128 = 0;
    let mut samples = Vec::new();
    // Keep the first dozen pairs, then thin out geometrically.
    let sample_cap = 24;
    let mut next_sample: u128 = 16;
    let mut rho_v = vec![0u64; n];
    for i in 0..r {
        let mi = g.m(i, 1);
        for vidx in 0..vcount {
            // decode vidx into rho_v
            let mut rest = vidx;
            for digit in rho_v.iter_mut() {
                *digit = (rest % p as usize) as u64;
                rest /= p as usize;
            }
            let moved = mi.matvec(&rho_v);
            let involution =
                rho_v.iter().zip(&moved).all(|(&x, &y)| addm(x, y, p) == 0);
            if involution != (target_order == 2) {
                continue;
            }
            for &u in &unit_offsets {
                let j = (i + r - u) % r;
                for w in &tau_vecs[j as usize] {
                    let gens = [
                        (rho_v.as_slice(), i, 1u8),
                        (w.as_slice(), j, 1u8),
                    ];
                    let (parts, wdim) = tester.closure(gens.iter().copied(), true);
                    if parts == 2 * r as usize && wdim == n {
                        pairs += 1;
                        if samples.len() < sample_cap
                            && (pairs <= 12 || pairs == next_sample)
                        {
                            samples.push((
                                g.make(rho_v.clone(), i, 1),
                                g.make(w.clone(), j, 1),
                            ));
                            if pairs >= 12 {
                                next_sample = next_sample.saturating_mul(2);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(PairCount { target_order, pairs, samples })
}

/// `|Aut(G)|`, computed structurally.
///
/// `V = O_p(G)` is characteristic and `H¹(D_2r, V) = 0` (coprime orders),
/// so every automorphism is an inner-by-`V` twist of one normalizing the
/// standard complement: `|Aut(G)| = p^{n−c} · |N|` with `c = dim C_V(D)`.
/// `N` is counted per dihedral automorphism `σ` as the number of
/// invertible `L` with `L·ψ(x) = ψ(σ(x))·L`, found by solving that linear
/// system and walking its solution space.
pub fn automorphism_count(g: &AffineGroup) -> Result<u128> {
    let (p, n) = (g.p, g.n);
    let fixed_c = common_fixed_dim(g);
    let mut normalizer: u128 = 0;
    for sigma in DihedralAut::all(g.r) {
        let target_c = g.mat_c.pow(sigma.k);
        let target_b = g.mat_c.pow(sigma.t).mul(&g.mat_b);
        let basis = intertwiner_basis(&g.mat_c, &g.mat_b, &target_c, &target_b);
        if basis.is_empty() {
            continue;
        }
        let m = basis.len();
        let total = upow(p, m as u32);
        if total > 1_000_000 {
            return Err(Error::Budget(format!(
                "intertwiner space has {total} members for one dihedral \
                 automorphism; counting invertibles is out of budget"
            )));
        }
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
                normalizer += 1;
            }
        }
    }
    Ok(upow(p, (n - fixed_c) as u32) * normalizer)
}

fn common_fixed_dim(g: &AffineGroup) -> usize {
    let stacked = {
        let a = g.mat_c.sub(&Mat::identity(g.p, g.n));
        let b = g.mat_b.sub(&Mat::identity(g.p, g.n));
        let mut rows = Vec::new();
        for i in 0..g.n {
            rows.push(a.row(i).to_vec());
        }
        for i in 0..g.n {
            rows.push(b.row(i).to_vec());
        }
        Mat::from_rows(g.p, &rows)
    };
    stacked.kernel_basis().len()
}

/// Basis of `{L : L·A = A'·L and L·B = B'·L}` as `n×n` matrices.
pub fn intertwiner_basis(a: &Mat, b: &Mat, a2: &Mat, b2: &Mat) -> Vec<Mat> {
    let p = a.p;
    let n = a.rows;
    let var = |i: usize, j: usize| i * n + j;
    let mut rows = Vec::with_capacity(2 * n * n);
    for (m, m2) in [(a, a2), (b, b2)] {
        for i in 0..n {
            for j in 0..n {
                // Σ_k L[i,k]·m[k,j] − Σ_k m2[i,k]·L[k,j] = 0
                let mut row = vec![0u64; n * n];
                for k in 0..n {
                    row[var(i, k)] = addm(row[var(i, k)], m.get(k, j), p);
                    row[var(k, j)] = subm(row[var(k, j)], m2.get(i, k), p);
                }
                rows.push(row);
            }
        }
    }
    Mat::from_rows(p, &rows)
        .kernel_basis()
        .into_iter()
        .map(|flat| {
            let mut l = Mat::zero(p, n, n);
            for i in 0..n {
                for j in 0..n {
                    l.set(i, j, flat[var(i, j)]);
                }
            }
            l
        })
        .collect()
}

/// Extend `gens_a[k] ↦ gens_b[k]` to an isomorphism if one exists.
///
/// Walks the Cayley graph of the source from the identity; every edge is
/// checked for consistency, which makes the produced index map a
/// homomorphism on all of `⟨gens_a⟩`. Returns the image table, or `None`
/// when the extension conflicts or fails to be bijective.
pub fn pair_extension(
    ga: &AffineGroup,
    gens_a: &[GElem],
    gb: &AffineGroup,
    gens_b: &[GElem],
    max_group_order: u64,
) -> Result<Option<Vec<u32>>> {
    if gens_a.len() != gens_b.len() {
        return Err(Error::Internal("generator lists differ in length".into()));
    }
    if ga.order() > max_group_order as u128 {
        return Err(Error::Budget(format!(
            "group order {} exceeds the isomorphism-walk cap {max_group_order}",
            ga.order()
        )));
    }
    if ga.order() != gb.order() {
        return Ok(None);
    }
    let size = ga.order() as usize;
    const UNSET: u32 = u32::MAX;
    let mut img = vec![UNSET; size];
    let mut used = vec![false; size];
    let mut queue: Vec<u32> = Vec::with_capacity(size);
    let ida = ga.elem_index(&ga.identity());
    let idb = gb.elem_index(&gb.identity());
    img[ida] = idb as u32;
    used[idb] = true;
    queue.push(ida as u32);
    let mut head = 0usize;
    let mut covered = 1usize;
    while head < queue.len() {
        let x_idx = queue[head] as usize;
        head += 1;
        let x = ga.elem_at(x_idx);
        let fx = gb.elem_at(img[x_idx] as usize);
        for (ga_gen, gb_gen) in gens_a.iter().zip(gens_b) {
            let y = ga.mul(&x, ga_gen);
            let fy = gb.mul(&fx, gb_gen);
            let y_idx = ga.elem_index(&y);
            let fy_idx = gb.elem_index(&fy) as u32;
            if img[y_idx] == UNSET {
                if used[fy_idx as usize] {
                    return Ok(None); // a value collision: not injective
                }
                img[y_idx] = fy_idx;
                used[fy_idx as usize] = true;
                covered += 1;
                queue.push(y_idx as u32);
            } else if img[y_idx] != fy_idx {
                return Ok(None); // ill-defined: the relations disagree
            }
        }
    }
    if covered != size {
        return Err(Error::Internal(
            "the source generators do not generate their group".into(),
        ));
    }
    Ok(Some(img))
}

/// Automorphism count by exhaustive generator-image search — a slow
/// independent oracle for small groups.
///
/// Every automorphism is determined by the images of one generating pair,
/// and a candidate image pair extends iff the Cayley-graph walk closes
/// consistently, so the count is the number of successful extensions.
pub fn automorphism_count_by_images(g: &AffineGroup, cap: u64) -> Result<u128> {
    if g.order() > cap as u128 {
        return Err(Error::Budget(format!(
            "group order {} exceeds the oracle cap {cap}",
            g.order()
        )));
    }
    let base = enumerate_rotary_pairs(g, rho_target_order(g), cap)?;
    let (rho, tau) = base
        .samples
        .first()
        .cloned()
        .ok_or_else(|| Error::Internal("no rotary pair to anchor the search".into()))?;
    let rho_order = g.element_order(&rho);
    let size = g.order() as usize;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for idx in 0..size {
        let cand = g.elem_at(idx);
        let o = g.element_order(&cand);
        if o == rho_order {
            xs.push(cand.clone());
        }
        if o == 2 {
            ys.push(cand);
        }
    }
    let gens_a = [rho, tau];
    let mut count: u128 = 0;
    for x in &xs {
        for y in &ys {
            let gens_b = [x.clone(), y.clone()];
            if pair_extension(g, &gens_a, g, &gens_b, cap)?.is_some() {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Pairs, automorphisms, and their exact quotient.
#[derive(Debug, Clone)]
pub struct OrbitCount {
    pub pairs: u128,
    pub automorphisms: u128,
    pub orbits: u128,
    pub samples: Vec<(GElem, GElem)>,
}

/// Number of rotary maps carried by `G` up to isomorphism: `Aut(G)` acts
/// freely on generating pairs (a pair determines the automorphism), so
/// the orbit count is an exact division.
pub fn count_orbits_on_pairs(g: &AffineGroup, max_group_order: u64) -> Result<OrbitCount> {
    let count = enumerate_rotary_pairs(g, rho_target_order(g), max_group_order)?;
    let autos = automorphism_count(g)?;
    if autos == 0 || count.pairs % autos != 0 {
        return Err(Error::Internal(format!(
            "pair count {} is not a multiple of the automorphism count {autos}",
            count.pairs
        )));
    }
    // Freeness spot-check: a pair extended to itself forces the identity.
    for (rho, tau) in &count.samples {
        let gens = [rho.clone(), tau.clone()];
        let img = pair_extension(g, &gens, g, &gens, max_group_order)?
            .ok_or_else(|| Error::Internal("self-extension failed".into()))?;
        if img.iter().enumerate().any(|(k, &v)| v as usize != k) {
            return Err(Error::Internal(
                "a generating pair is fixed by a non-identity automorphism".into(),
            ));
        }
    }
    Ok(OrbitCount {
        pairs: count.pairs,
        automorphisms: autos,
        orbits: count.pairs / autos,
        samples: count.samples,
    })
}
