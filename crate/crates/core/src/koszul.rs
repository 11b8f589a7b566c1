//! Koszul complexes on monomial sequences over `k[x_1..x_d]`, their duals into
//! monomial quotient modules, the residue pairing and truncated local
//! cohomology.
//!
//! Every complex here is multigraded and the differentials preserve the
//! multidegree, so all computations run slice by slice.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{
    cohomology_dims, cone, induced_rank, ChainComplex, ChainMap, Degree, DimTable, GradedVectorSpace,
};
use crate::error::{Error, Result};
use crate::linalg::{is_permutation_matrix, Matrix};
use crate::scalar::{q, sign, Exact, Rational};

pub type Multidegree = Vec<i64>;

/// All points of the box `lo <= a <= hi`, lexicographic.
pub fn box_points(lo: &[i64], hi: &[i64]) -> Vec<Multidegree> {
    let mut out = vec![Vec::new()];
    for (l, h) in lo.iter().zip(hi) {
        out = out
            .into_iter()
            .flat_map(|p| {
                (*l..=*h).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

fn add(a: &[i64], b: &[i64]) -> Multidegree {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[i64], b: &[i64]) -> Multidegree {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn unit(d: usize, i: usize, n: i64) -> Multidegree {
    let mut v = vec![0; d];
    v[i] = n;
    v
}

fn fmt_exp(b: &[i64]) -> String {
    let parts: Vec<String> = b.iter().map(i64::to_string).collect();
    format!("x^({})", parts.join(","))
}

fn fmt_subset(s: u32) -> String {
    let parts: Vec<String> = (0..32).filter(|i| s >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
    format!("xi{{{}}}", parts.join(","))
}

/// Number of elements of `s` below `i`.
fn pos(s: u32, i: usize) -> i64 {
    (s & ((1u32 << i) - 1)).count_ones() as i64
}

/// The quotient `A/J` of `A = k[x_1..x_d]` by a monomial ideal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialModule {
    d: usize,
    /// Exponent vectors generating `J`.
    relations: Vec<Vec<u32>>,
}

impl MonomialModule {
    pub fn new(d: usize, relations: Vec<Vec<u32>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::NotAModule("the ring needs at least one variable".into()));
        }
        if let Some(r) = relations.iter().find(|r| r.len() != d) {
            return Err(Error::NotAModule(format!("relation {r:?} does not have {d} exponents")));
        }
        Ok(Self { d, relations })
    }

    pub fn ring(d: usize) -> Self {
        Self { d, relations: Vec::new() }
    }

    /// `k = A/(x_1, ..., x_d)`.
    pub fn residue_field(d: usize) -> Self {
        Self { d, relations: (0..d).map(|i| unit(d, i, 1).iter().map(|&x| x as u32).collect()).collect() }
    }

    pub fn nvars(&self) -> usize {
        self.d
    }

    pub fn relations(&self) -> &[Vec<u32>] {
        &self.relations
    }

    /// Whether `x^b` is a nonzero basis element of the module.
    pub fn has(&self, b: &[i64]) -> bool {
        b.iter().all(|&x| x >= 0)
            && !self.relations.iter().any(|r| r.iter().zip(b).all(|(&ri, &bi)| bi >= ri as i64))
    }

    fn max_relation_exponent(&self) -> i64 {
        self.relations.iter().flatten().map(|&x| x as i64).max().unwrap_or(0)
    }
}

/// The Koszul complex over `A` on generators `g_s` of cohomological degree
/// `-1` and multidegree `c_s`, with `d g_s = x^{c_s}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KoszulSpec {
    d: usize,
    gens: Vec<Multidegree>,
}

impl KoszulSpec {
    pub fn new(d: usize, gens: Vec<Multidegree>) -> Result<Self> {
        if gens.len() > 31 {
            return Err(Error::InvalidBounds("at most 31 Koszul generators".into()));
        }
        if gens.iter().any(|g| g.len() != d || g.iter().any(|&x| x < 0)) {
            return Err(Error::InvalidBounds("generator multidegrees must be nonnegative with d entries".into()));
        }
        Ok(Self { d, gens })
    }

    /// `A_{n,k}`: the sequence `x_1^n, ..., x_k^n`.
    pub fn standard(d: usize, n: u32, k: usize) -> Result<Self> {
        if k > d || n == 0 {
            return Err(Error::InvalidBounds(format!("need n >= 1 and k <= d, got n={n}, k={k}, d={d}")));
        }
        Self::new(d, (0..k).map(|i| unit(d, i, n as i64)).collect())
    }

    /// `K (x)_A K'`: the Koszul complex on the concatenated sequence.
    pub fn tensor(&self, other: &KoszulSpec) -> Result<Self> {
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        Self::new(self.d, gens)
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    fn weight(&self, s: u32) -> Multidegree {
        let mut w = vec![0; self.d];
        for (i, g) in self.gens.iter().enumerate() {
            if s >> i & 1 == 1 {
                w = add(&w, g);
            }
        }
        w
    }

    /// The slice of the complex in multidegree `m`: basis `x^b g_S` with
    /// `b + c_S = m`, in degree `-|S|`.
    pub fn slice(&self, m: &[i64]) -> ChainComplex {
        let (space, index) = self.slice_basis(m);
        let mut diff: BTreeMap<Degree, Vec<(usize, usize, Rational)>> = BTreeMap::new();
        for (&s, &(deg, j)) in &index {
            for i in 0..self.len() {
                if s >> i & 1 == 0 {
                    continue;
                }
                let t = s & !(1 << i);
                let &(_, row) = index.get(&t).expect("faces stay in the slice");
                diff.entry(deg).or_default().push((row, j, sign(pos(s, i))));
            }
        }
        build(space, diff)
    }

    fn slice_basis(&self, m: &[i64]) -> (GradedVectorSpace, BTreeMap<u32, (Degree, usize)>) {
        let mut space = GradedVectorSpace::new();
        let mut index = BTreeMap::new();
        for s in 0..(1u32 << self.len()) {
            let b = sub(m, &self.weight(s));
            if b.iter().all(|&x| x >= 0) {
                let deg = -(s.count_ones() as Degree);
                let j = space.push(deg, format!("{}{}", fmt_exp(&b), fmt_subset(s))).expect("distinct subsets");
                index.insert(s, (deg, j));
            }
        }
        (space, index)
    }

    /// The slice of `Hom_A(K, M)` in multidegree `a`: basis `x^b g_S^v` with
    /// `b - c_S = a`, in degree `|S|`, and
    /// `d(m g_S^v) = -(-1)^{|S|} sum_{t not in S} (-1)^{pos(t)} x^{c_t} m g_{S+t}^v`.
    pub fn dual_slice(&self, module: &MonomialModule, a: &[i64]) -> ChainComplex {
        let (space, index) = self.dual_basis(module, a);
        let mut diff: BTreeMap<Degree, Vec<(usize, usize, Rational)>> = BTreeMap::new();
        for (&s, &(deg, j)) in &index {
            for t in 0..self.len() {
                if s >> t & 1 == 1 {
                    continue;
                }
                let u = s | 1 << t;
                if let Some(&(_, row)) = index.get(&u) {
                    let c = -sign(deg as i64) * sign(pos(u, t));
                    diff.entry(deg).or_default().push((row, j, c));
                }
            }
        }
        build(space, diff)
    }

    fn dual_basis(&self, module: &MonomialModule, a: &[i64]) -> (GradedVectorSpace, BTreeMap<u32, (Degree, usize)>) {
        let mut space = GradedVectorSpace::new();
        let mut index = BTreeMap::new();
        for s in 0..(1u32 << self.len()) {
            let b = add(a, &self.weight(s));
            if module.has(&b) {
                let deg = s.count_ones() as Degree;
                let j = space.push(deg, format!("{}{}*", fmt_exp(&b), fmt_subset(s))).expect("distinct subsets");
                index.insert(s, (deg, j));
            }
        }
        (space, index)
    }
}

fn build(space: GradedVectorSpace, entries: BTreeMap<Degree, Vec<(usize, usize, Rational)>>) -> ChainComplex {
    let diff = entries
        .into_iter()
        .map(|(n, e)| (n, Matrix::from_triplets(space.dim(n + 1), space.dim(n), e)))
        .collect();
    ChainComplex::new(space, diff).expect("Koszul differentials square to zero")
}

/// A map of Koszul algebras determined on generators by `g_s -> x^{e_s} h_{sigma(s)}`.
#[derive(Clone, Debug)]
pub struct KoszulMap {
    source: KoszulSpec,
    target: KoszulSpec,
    images: Vec<(Multidegree, usize)>,
}

impl KoszulMap {
    /// Checks `c_s = e_s + c'_{sigma(s)}`, which makes it a chain map.
    pub fn new(source: KoszulSpec, target: KoszulSpec, images: Vec<(Multidegree, usize)>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::NotChainMap("one image per generator is required".into()));
        }
        for (s, (e, t)) in images.iter().enumerate() {
            if *t >= target.len() || add(e, &target.gens[*t]) != source.gens[s] {
                return Err(Error::NotChainMap(format!("generator {} is not sent to a compatible image", s + 1)));
            }
        }
        Ok(Self { source, target, images })
    }

    /// `x^b g_S -> sign x^{b + e_S} h_{sigma(S)}`, or zero if `sigma` is not
    /// injective on `S`.
    fn on_subset(&self, s: u32) -> Option<(u32, Multidegree, Rational)> {
        let mut t = 0u32;
        let mut shift = vec![0; self.source.d];
        let mut targets = Vec::new();
        for i in 0..self.source.len() {
            if s >> i & 1 == 1 {
                let (e, h) = &self.images[i];
                if t >> h & 1 == 1 {
                    return None;
                }
                t |= 1 << h;
                shift = add(&shift, e);
                targets.push(*h);
            }
        }
        // sign of the permutation sorting the targets
        let mut inversions = 0i64;
        for i in 0..targets.len() {
            for j in i + 1..targets.len() {
                if targets[i] > targets[j] {
                    inversions += 1;
                }
            }
        }
        Some((t, shift, sign(inversions)))
    }

    pub fn slice_map(&self, m: &[i64]) -> Result<ChainMap> {
        let src = self.source.slice(m);
        let tgt = self.target.slice(m);
        let (_, si) = self.source.slice_basis(m);
        let (_, ti) = self.target.slice_basis(m);
        let mut entries: BTreeMap<Degree, Vec<(usize, usize, Rational)>> = BTreeMap::new();
        for (&s, &(deg, j)) in &si {
            if let Some((t, _, c)) = self.on_subset(s) {
                let &(_, row) = ti.get(&t).expect("image lies in the slice");
                entries.entry(deg).or_default().push((row, j, c));
            }
        }
        let comps = entries
            .into_iter()
            .map(|(n, e)| (n, Matrix::from_triplets(tgt.dim(n), src.dim(n), e)))
            .collect();
        ChainMap::new(src, tgt, comps)
    }

    /// `phi -> phi . f` from `Hom(target, M)` to `Hom(source, M)` in multidegree `a`.
    pub fn dual_slice_map(&self, module: &MonomialModule, a: &[i64]) -> Result<ChainMap> {
        let src = self.target.dual_slice(module, a);
        let tgt = self.source.dual_slice(module, a);
        let (_, si) = self.target.dual_basis(module, a);
        let (_, ti) = self.source.dual_basis(module, a);
        let mut entries: BTreeMap<Degree, Vec<(usize, usize, Rational)>> = BTreeMap::new();
        for (&s, &(deg, row)) in &ti {
            let Some((t, _, c)) = self.on_subset(s) else { continue };
            // the coefficient x^{e_S} m must survive in M: it does exactly when
            // the target basis element exists
            if let Some(&(_, col)) = si.get(&t) {
                entries.entry(deg).or_default().push((row, col, c));
            }
        }
        let comps = entries
            .into_iter()
            .map(|(n, e)| (n, Matrix::from_triplets(tgt.dim(n), src.dim(n), e)))
            .collect();
        ChainMap::new(src, tgt, comps)
    }
}

/// Transition `A_{n+1, k} -> A_{n, k}`, `xi_i -> x_i xi_i`.
pub fn transition(d: usize, n: u32, k: usize) -> Result<KoszulMap> {
    let src = KoszulSpec::standard(d, n + 1, k)?;
    let tgt = KoszulSpec::standard(d, n, k)?;
    KoszulMap::new(src, tgt, (0..k).map(|i| (unit(d, i, 1), i)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SliceDims {
    pub multidegree: Multidegree,
    pub dims: DimTable,
}

fn total(slices: &[SliceDims]) -> DimTable {
    let mut t = DimTable::new();
    for s in slices {
        for (n, d) in &s.dims {
            *t.entry(*n).or_default() += d;
        }
    }
    t.retain(|_, d| *d > 0);
    t
}

/// `A_{n,k}` truncated to multidegrees in `[0, window]^d`.
#[derive(Clone, Debug)]
pub struct KoszulData {
    pub spec: KoszulSpec,
    pub n: u32,
    pub k: usize,
    pub window: u32,
    pub slices: BTreeMap<Multidegree, ChainComplex>,
}

pub fn koszul_complex(d: usize, n: u32, k: usize, window: u32) -> Result<KoszulData> {
    let spec = KoszulSpec::standard(d, n, k)?;
    if k > 0 && window < n {
        return Err(Error::WindowTooSmall(format!("window {window} does not reach the relations x_i^{n}")));
    }
    let slices = box_points(&vec![0; d], &vec![window as i64; d])
        .into_iter()
        .map(|m| {
            let c = spec.slice(&m);
            (m, c)
        })
        .collect();
    Ok(KoszulData { spec, n, k, window, slices })
}

impl KoszulData {
    pub fn cohomology(&self, exact: &Exact) -> Result<Vec<SliceDims>> {
        let out: Result<Vec<SliceDims>> = self
            .slices
            .par_iter()
            .map(|(m, c)| Ok(SliceDims { multidegree: m.clone(), dims: cohomology_dims(c, exact)? }))
            .collect();
        Ok(out?.into_iter().filter(|s| !s.dims.is_empty()).collect())
    }

    /// Monomials spanning `H^0`.
    pub fn h0_basis(&self, exact: &Exact) -> Result<Vec<Multidegree>> {
        Ok(self
            .cohomology(exact)?
            .into_iter()
            .filter(|s| s.dims.get(&0).copied().unwrap_or(0) > 0)
            .map(|s| s.multidegree)
            .collect())
    }
}

/// Compares `A_{n,k+1}` with `cone(x_{k+1}^n : A_{n,k} -> A_{n,k})` slice by
/// slice; returns the slices where the cohomology dims differ.
pub fn cone_identity_check(d: usize, n: u32, k: usize, window: u32, exact: &Exact) -> Result<Vec<Multidegree>> {
    if k >= d {
        return Err(Error::InvalidBounds(format!("need k < d, got k={k}, d={d}")));
    }
    let big = KoszulSpec::standard(d, n, k + 1)?;
    let small = KoszulSpec::standard(d, n, k)?;
    let shift = unit(d, k, n as i64);
    let mut bad = Vec::new();
    for m in box_points(&vec![0; d], &vec![window as i64; d]) {
        let lower = sub(&m, &shift);
        let src = if lower.iter().all(|&x| x >= 0) { small.slice(&lower) } else { ChainComplex::zero() };
        let tgt = small.slice(&m);
        // multiplication by x_{k+1}^n identifies bases subset by subset
        let mut comps = BTreeMap::new();
        for deg in src.degrees() {
            let mut e = Vec::new();
            for (j, l) in src.space().labels(deg).iter().enumerate() {
                let tag = &l[l.find("xi").expect("label has a subset")..];
                let i = tgt.space().labels(deg).iter().position(|t| t.ends_with(tag)).expect("subset present");
                e.push((i, j, q(1)));
            }
            comps.insert(deg, Matrix::from_triplets(tgt.dim(deg), src.dim(deg), e));
        }
        let f = ChainMap::new(src, tgt, comps)?;
        if cohomology_dims(&cone(&f), exact)? != cohomology_dims(&big.slice(&m), exact)? {
            bad.push(m);
        }
    }
    Ok(bad)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualityRow {
    pub multidegree: Multidegree,
    pub dual_dims: DimTable,
    pub shifted_dims: DimTable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelfDualityReport {
    pub d: usize,
    pub n: u32,
    pub k: usize,
    pub window: u32,
    pub rows: Vec<DualityRow>,
    pub dual_total: DimTable,
    pub shifted_total: DimTable,
    pub agrees: bool,
}

/// `Hom_A(A_{n,k}, A)` in multidegree `a` against `A_{n,k}[-k]` in multidegree
/// `a + n(1,..,1,0,..)`, over every `a` whose shifted slice fits the window.
pub fn self_duality_check(d: usize, n: u32, k: usize, window: u32, exact: &Exact) -> Result<SelfDualityReport> {
    let spec = KoszulSpec::standard(d, n, k)?;
    if window < n {
        return Err(Error::WindowTooSmall(format!("window {window} must be at least n = {n}")));
    }
    let ring = MonomialModule::ring(d);
    let ones: Multidegree = (0..d).map(|i| if i < k { n as i64 } else { 0 }).collect();
    let lo: Multidegree = (0..d).map(|i| if i < k { -(n as i64) } else { 0 }).collect();
    let hi: Multidegree = (0..d).map(|i| window as i64 - if i < k { n as i64 } else { 0 }).collect();
    let rows: Result<Vec<DualityRow>> = box_points(&lo, &hi)
        .into_par_iter()
        .map(|a| {
            let dual = cohomology_dims(&spec.dual_slice(&ring, &a), exact)?;
            let shifted = cohomology_dims(&spec.slice(&add(&a, &ones)).shift(-(k as Degree)), exact)?;
            Ok(DualityRow { multidegree: a, dual_dims: dual, shifted_dims: shifted })
        })
        .collect();
    let rows: Vec<DualityRow> = rows?.into_iter().filter(|r| !r.dual_dims.is_empty() || !r.shifted_dims.is_empty()).collect();
    let agrees = rows.iter().all(|r| r.dual_dims == r.shifted_dims);
    let dual_total = total(&rows.iter().map(|r| SliceDims { multidegree: r.multidegree.clone(), dims: r.dual_dims.clone() }).collect::<Vec<_>>());
    let shifted_total =
        total(&rows.iter().map(|r| SliceDims { multidegree: r.multidegree.clone(), dims: r.shifted_dims.clone() }).collect::<Vec<_>>());
    Ok(SelfDualityReport { d, n, k, window, rows, dual_total, shifted_total, agrees })
}

/// Basis monomials of `A_n = k[x]/(x_1^n, .., x_d^n)`, lexicographic.
pub fn truncated_monomials(d: usize, n: u32) -> Vec<Multidegree> {
    box_points(&vec![0; d], &vec![n as i64 - 1; d])
}

/// `r_n`: the coefficient of `x_1^{n-1} ... x_d^{n-1}`.
pub fn residue(n: u32, monomial: &[i64]) -> Rational {
    if monomial.iter().all(|&e| e == n as i64 - 1) {
        q(1)
    } else {
        q(0)
    }
}

/// `<x^a, x^b> = r_n(x^{a+b})` on the monomial basis of `A_n`.
pub fn residue_pairing(n: u32, d: usize) -> Result<Matrix> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidBounds("need n >= 1 and d >= 1".into()));
    }
    let basis = truncated_monomials(d, n);
    let index: BTreeMap<&Multidegree, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let top = vec![n as i64 - 1; d];
    let entries = basis.iter().enumerate().filter_map(|(i, a)| {
        let b = sub(&top, a);
        index.get(&b).map(|&j| (i, j, residue(n, &add(a, &b))))
    });
    Ok(Matrix::from_triplets(basis.len(), basis.len(), entries))
}

pub fn residue_pairing_is_perfect(n: u32, d: usize) -> Result<bool> {
    Ok(is_permutation_matrix(&residue_pairing(n, d)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalStage {
    pub n: u32,
    pub dims: DimTable,
    pub slices: Vec<SliceDims>,
    /// Rank of the map to the next stage, when there is one.
    pub transition_rank: Option<DimTable>,
    pub transition_injective: Option<bool>,
    /// Image of this stage in the last stage.
    pub image_in_last: Vec<SliceDims>,
    pub image_dims: DimTable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalCohomologyReport {
    pub d: usize,
    pub module: MonomialModule,
    pub n_max: u32,
    pub window: u32,
    pub stages: Vec<LocalStage>,
}

impl LocalCohomologyReport {
    /// For `M = A`: every stage concentrated in degree `d` with dimension
    /// `n^d`, and all transitions injective.
    pub fn ring_concentration_holds(&self) -> bool {
        self.stages.iter().all(|s| {
            s.dims == DimTable::from([(self.d as Degree, (s.n as usize).pow(self.d as u32))])
                && s.transition_injective != Some(false)
        })
    }
}

/// `H^*(Hom_A(A_{n,d}, M))` for `n = 1..n_max` over multidegrees in
/// `[-n_max, window]^d`, with the transition maps of the colimit.
pub fn local_cohomology(module: &MonomialModule, n_max: u32, window: u32, exact: &Exact) -> Result<LocalCohomologyReport> {
    let d = module.nvars();
    if n_max == 0 {
        return Err(Error::InvalidBounds("n_max must be at least 1".into()));
    }
    if module.max_relation_exponent() > window as i64 {
        return Err(Error::WindowTooSmall(format!("module relations do not fit in window {window}")));
    }
    let points = box_points(&vec![-(n_max as i64); d], &vec![window as i64; d]);
    let specs: Vec<KoszulSpec> = (1..=n_max).map(|n| KoszulSpec::standard(d, n, d)).collect::<Result<_>>()?;
    let transitions: Vec<KoszulMap> = (1..n_max).map(|n| transition(d, n, d)).collect::<Result<_>>()?;

    struct PointData {
        dims: Vec<DimTable>,
        step: Vec<DimTable>,
        image: Vec<DimTable>,
    }
    let per_point: Vec<PointData> = points
        .par_iter()
        .map(|a| {
            let stages: Vec<ChainComplex> = specs.iter().map(|s| s.dual_slice(module, a)).collect();
            let dims = stages.iter().map(|c| cohomology_dims(c, exact)).collect::<Result<Vec<_>>>()?;
            let maps: Vec<ChainMap> = transitions.iter().map(|t| t.dual_slice_map(module, a)).collect::<Result<_>>()?;
            let step = maps.iter().map(|f| induced_rank(f, exact)).collect::<Result<Vec<_>>>()?;
            // composite from stage n to the last stage
            let last = stages.len() - 1;
            let mut image = vec![DimTable::new(); stages.len()];
            image[last] = dims[last].clone();
            let mut to_last: Option<ChainMap> = None;
            for n in (0..last).rev() {
                let f = match to_last {
                    None => maps[n].clone(),
                    Some(g) => maps[n].then(&g)?,
                };
                image[n] = induced_rank(&f, exact)?;
                to_last = Some(f);
            }
            Ok(PointData { dims, step, image })
        })
        .collect::<Result<_>>()?;

    let mut stages = Vec::new();
    for (i, n) in (1..=n_max).enumerate() {
        let slices: Vec<SliceDims> = points
            .iter()
            .zip(&per_point)
            .filter(|(_, p)| !p.dims[i].is_empty())
            .map(|(a, p)| SliceDims { multidegree: a.clone(), dims: p.dims[i].clone() })
            .collect();
        let image_in_last: Vec<SliceDims> = points
            .iter()
            .zip(&per_point)
            .filter(|(_, p)| !p.image[i].is_empty())
            .map(|(a, p)| SliceDims { multidegree: a.clone(), dims: p.image[i].clone() })
            .collect();
        let (transition_rank, transition_injective) = if n < n_max {
            let rank = total(
                &per_point.iter().map(|p| SliceDims { multidegree: Vec::new(), dims: p.step[i].clone() }).collect::<Vec<_>>(),
            );
            let injective = per_point.iter().all(|p| p.step[i] == p.dims[i]);
            (Some(rank), Some(injective))
        } else {
            (None, None)
        };
        stages.push(LocalStage {
            n,
            dims: total(&slices),
            image_dims: total(&image_in_last),
            slices,
            transition_rank,
            transition_injective,
            image_in_last,
        });
    }
    Ok(LocalCohomologyReport { d, module: module.clone(), n_max, window, stages })
}

/// Extended Čech complex `A -> (+) A_{x_i} -> ... -> A_{x_1...x_d}` of the ring
/// in multidegree `a`; it computes local cohomology at the origin.
pub fn cech_slice(d: usize, a: &[i64]) -> ChainComplex {
    let mut space = GradedVectorSpace::new();
    let mut index = BTreeMap::new();
    for t in 0..(1u32 << d) {
        if (0..d).all(|i| t >> i & 1 == 1 || a[i] >= 0) {
            let deg = t.count_ones() as Degree;
            let j = space.push(deg, format!("loc{}", fmt_subset(t))).expect("distinct subsets");
            index.insert(t, (deg, j));
        }
    }
    let mut diff: BTreeMap<Degree, Vec<(usize, usize, Rational)>> = BTreeMap::new();
    for (&t, &(deg, j)) in &index {
        for i in 0..d {
            if t >> i & 1 == 0 {
                let u = t | 1 << i;
                let &(_, row) = index.get(&u).expect("localizing further stays in the slice");
                diff.entry(deg).or_default().push((row, j, sign(pos(u, i))));
            }
        }
    }
    build(space, diff)
}

/// Compares, for `M = A`, the image of each stage in the last stage with the
/// Čech cohomology in the multidegrees `a >= -n` the stage can see.
pub fn cech_agreement(report: &LocalCohomologyReport, exact: &Exact) -> Result<bool> {
    let d = report.d;
    if report.module != MonomialModule::ring(d) {
        return Err(Error::Unsupported("the Čech comparison is for M = A".into()));
    }
    let hi = vec![report.window as i64; d];
    for stage in &report.stages {
        let lo = vec![-(stage.n as i64); d];
        let image: BTreeMap<&Multidegree, &DimTable> =
            stage.image_in_last.iter().map(|s| (&s.multidegree, &s.dims)).collect();
        for a in box_points(&lo, &hi) {
            let cech = cohomology_dims(&cech_slice(d, &a), exact)?;
            let ours = image.get(&a).map(|t| (*t).clone()).unwrap_or_default();
            if cech != ours {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CofinalityStage {
    pub n: u32,
    pub stage_dims: DimTable,
    pub image_dims: DimTable,
    pub matches_target: bool,
    /// For `n >= p`: the comparison map from the target is an isomorphism
    /// onto the image in the last stage.
    pub comparison_iso: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CofinalityReport {
    pub d: usize,
    pub p: u32,
    pub n_max: u32,
    pub window: u32,
    pub target_dims: DimTable,
    pub stages: Vec<CofinalityStage>,
    pub stabilization_index: Option<u32>,
}

/// Colimit over `n` of `H^*(Hom_A(A_n (x) A_p, A))` against `H^*(Hom_A(A_p, A))`.
///
/// The colimit is read off as the image of stage `n` in stage `n_max`, on the
/// multidegrees `[-n_max, window]^d`.
pub fn cofinality_check(d: usize, p: u32, n_max: u32, window: u32, exact: &Exact) -> Result<CofinalityReport> {
    if p == 0 {
        return Err(Error::InvalidBounds("p must be at least 1".into()));
    }
    if n_max < p {
        return Err(Error::WindowTooSmall(format!("n_max = {n_max} never reaches p = {p}")));
    }
    let ring = MonomialModule::ring(d);
    let kp = KoszulSpec::standard(d, p, d)?;
    let stage_spec = |n: u32| KoszulSpec::standard(d, n, d)?.tensor(&kp);
    let specs: Vec<KoszulSpec> = (1..=n_max).map(stage_spec).collect::<Result<_>>()?;
    // K_{n+1} (x) K_p -> K_n (x) K_p
    let transitions: Vec<KoszulMap> = (1..n_max)
        .map(|n| {
            let images = (0..d).map(|i| (unit(d, i, 1), i)).chain((0..d).map(|i| (vec![0; d], d + i))).collect();
            KoszulMap::new(specs[n as usize].clone(), specs[n as usize - 1].clone(), images)
        })
        .collect::<Result<_>>()?;
    // multiplication K_n (x) K_p -> K_p, xi_i -> x_i^{n-p} zeta_i
    let comparisons: BTreeMap<u32, KoszulMap> = (p..=n_max)
        .map(|n| {
            let images = (0..d).map(|i| (unit(d, i, (n - p) as i64), i)).chain((0..d).map(|i| (vec![0; d], i))).collect();
            Ok((n, KoszulMap::new(specs[n as usize - 1].clone(), kp.clone(), images)?))
        })
        .collect::<Result<_>>()?;

    let points = box_points(&vec![-(n_max as i64); d], &vec![window as i64; d]);
    let last = n_max as usize - 1;
    struct PointData {
        target: DimTable,
        stage: Vec<DimTable>,
        image: Vec<DimTable>,
        comparison: Vec<Option<DimTable>>,
    }
    let per_point: Vec<PointData> = points
        .par_iter()
        .map(|a| {
            let target = cohomology_dims(&kp.dual_slice(&ring, a), exact)?;
            let stage = specs.iter().map(|s| cohomology_dims(&s.dual_slice(&ring, a), exact)).collect::<Result<Vec<_>>>()?;
            let maps: Vec<ChainMap> = transitions.iter().map(|t| t.dual_slice_map(&ring, a)).collect::<Result<_>>()?;
            let mut to_last: Vec<Option<ChainMap>> = vec![None; specs.len()];
            let mut acc: Option<ChainMap> = None;
            for n in (0..last).rev() {
                let f = match acc {
                    None => maps[n].clone(),
                    Some(g) => maps[n].then(&g)?,
                };
                to_last[n] = Some(f.clone());
                acc = Some(f);
            }
            let mut image = Vec::with_capacity(specs.len());
            let mut comparison = Vec::with_capacity(specs.len());
            for (i, n) in (1..=n_max).enumerate() {
                image.push(match &to_last[i] {
                    Some(f) => induced_rank(f, exact)?,
                    None => stage[i].clone(),
                });
                comparison.push(match comparisons.get(&n) {
                    Some(c) => {
                        let into_stage = c.dual_slice_map(&ring, a)?;
                        let full = match &to_last[i] {
                            Some(f) => into_stage.then(f)?,
                            None => into_stage,
                        };
                        Some(induced_rank(&full, exact)?)
                    }
                    None => None,
                });
            }
            Ok(PointData { target, stage, image, comparison })
        })
        .collect::<Result<_>>()?;

    let sum = |f: &dyn Fn(&PointData) -> DimTable| {
        total(&per_point.iter().map(|p| SliceDims { multidegree: Vec::new(), dims: f(p) }).collect::<Vec<_>>())
    };
    let target_dims = sum(&|p| p.target.clone());
    let mut stages = Vec::new();
    for (i, n) in (1..=n_max).enumerate() {
        let matches_target = per_point.iter().all(|p| p.image[i] == p.target);
        let comparison_iso = comparisons.contains_key(&n).then(|| {
            per_point.iter().all(|p| p.comparison[i].as_ref() == Some(&p.target) && p.image[i] == p.target)
        });
        stages.push(CofinalityStage {
            n,
            stage_dims: sum(&|p| p.stage[i].clone()),
            image_dims: sum(&|p| p.image[i].clone()),
            matches_target,
            comparison_iso,
        });
    }
    let mut stabilization_index = None;
    for s in stages.iter().rev() {
        if s.matches_target && s.comparison_iso == Some(true) {
            stabilization_index = Some(s.n);
        } else {
            break;
        }
    }
    Ok(CofinalityReport { d, p, n_max, window, target_dims, stages, stabilization_index })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex() -> Exact {
        Exact::rational()
    }

    #[test]
    fn koszul_d1_n1() {
        let kd = koszul_complex(1, 1, 1, 3).unwrap();
        assert_eq!(kd.h0_basis(&ex()).unwrap(), vec![vec![0]]);
        let h = kd.cohomology(&ex()).unwrap();
        assert_eq!(h.len(), 1);
    }

    #[test]
    fn koszul_d2_n2_h0() {
        let kd = koszul_complex(2, 2, 2, 4).unwrap();
        let basis = kd.h0_basis(&ex()).unwrap();
        assert_eq!(basis, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let h = kd.cohomology(&ex()).unwrap();
        assert!(h.iter().all(|s| s.dims.keys().all(|&k| k == 0)));
    }

    #[test]
    fn koszul_k0_is_the_ring() {
        let kd = koszul_complex(2, 3, 0, 2).unwrap();
        let h = kd.cohomology(&ex()).unwrap();
        assert_eq!(h.len(), 9);
        assert!(h.iter().all(|s| s.dims == DimTable::from([(0, 1)])));
    }

    #[test]
    fn koszul_window_too_small() {
        assert!(matches!(koszul_complex(1, 3, 1, 2), Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn cone_identity_small() {
        for d in 1..=3 {
            for n in 1..=2 {
                for k in 0..d {
                    assert!(cone_identity_check(d, n, k, n + 1, &ex()).unwrap().is_empty(), "d={d} n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn self_duality_examples() {
        for (d, n, k) in [(1, 2, 1), (1, 1, 0), (2, 1, 2), (2, 2, 1)] {
            let r = self_duality_check(d, n, k, 3 * n, &ex()).unwrap();
            assert!(r.agrees, "d={d} n={n} k={k}");
        }
        let r = self_duality_check(2, 1, 2, 3, &ex()).unwrap();
        assert!(r.rows.iter().any(|row| row.dual_dims.contains_key(&2)));
    }

    #[test]
    fn residue_examples() {
        assert_eq!(residue_pairing(1, 1).unwrap(), Matrix::identity(1));
        let m = residue_pairing(2, 1).unwrap();
        assert_eq!(m.to_dense(), vec![vec![q(0), q(1)], vec![q(1), q(0)]]);
        let m = residue_pairing(2, 2).unwrap();
        assert_eq!(m.nrows(), 4);
        // x^(0,0) pairs with x^(1,1)
        assert_eq!(m.get(0, 3), q(1));
        assert_eq!(m.get(1, 2), q(1));
        assert!(is_permutation_matrix(&m));
        assert_eq!(residue(3, &[2, 2]), q(1));
        assert_eq!(residue(3, &[2, 1]), q(0));
    }

    #[test]
    fn local_cohomology_d1_ring() {
        let r = local_cohomology(&MonomialModule::ring(1), 3, 2, &ex()).unwrap();
        let dims: Vec<usize> = r.stages.iter().map(|s| s.dims.get(&1).copied().unwrap_or(0)).collect();
        assert_eq!(dims, vec![1, 2, 3]);
        assert!(r.ring_concentration_holds());
        assert!(cech_agreement(&r, &ex()).unwrap());
    }

    #[test]
    fn local_cohomology_d2_ring() {
        let r = local_cohomology(&MonomialModule::ring(2), 2, 1, &ex()).unwrap();
        assert_eq!(r.stages[0].dims, DimTable::from([(2, 1)]));
        assert!(r.ring_concentration_holds());
        assert!(cech_agreement(&r, &ex()).unwrap());
    }

    #[test]
    fn local_cohomology_residue_field() {
        let r = local_cohomology(&MonomialModule::residue_field(1), 3, 2, &ex()).unwrap();
        for s in &r.stages[..2] {
            assert_eq!(s.image_dims, DimTable::from([(0, 1)]));
        }
    }

    #[test]
    fn module_validation() {
        assert!(matches!(MonomialModule::new(2, vec![vec![1]]), Err(Error::NotAModule(_))));
    }

    #[test]
    fn transitions_are_chain_maps() {
        let t = transition(2, 2, 2).unwrap();
        for m in box_points(&[0, 0], &[4, 4]) {
            t.slice_map(&m).unwrap();
        }
    }

    #[test]
    fn cofinality_examples() {
        let r = cofinality_check(1, 1, 3, 2, &ex()).unwrap();
        assert_eq!(r.stabilization_index, Some(1));
        let r = cofinality_check(1, 2, 4, 2, &ex()).unwrap();
        assert_eq!(r.stabilization_index, Some(2));
        let r = cofinality_check(2, 1, 2, 1, &ex()).unwrap();
        assert_eq!(r.stabilization_index, Some(1));
        assert!(matches!(cofinality_check(1, 3, 2, 2, &ex()), Err(Error::WindowTooSmall(_))));
    }
}
