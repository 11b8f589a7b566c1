//! Graded vector spaces, cochain complexes (differential of degree +1) and the
//! chain-level operations built on them.
//!
//! Sign conventions:
//! * shift: `(C[k])^n = C^{n+k}` with differential `(-1)^k d`;
//! * dual: `(C^v)^n = (C^{-n})^v` with `(d^v phi) = -(-1)^{|phi|} phi . d`;
//! * tensor: `d(x (x) y) = dx (x) y + (-1)^{|x|} x (x) dy`;
//! * cone of `f: M -> N`: `M^{n+1} + N^n`, `d(m, x) = (-dm, f(m) + dx)`.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{kernel_over, rank, Echelon, Matrix, SparseVec};
use crate::scalar::{sign, Exact, Rational, Rationals};

pub type Degree = i32;

/// Dimension per cohomological degree; zero entries are omitted.
pub type DimTable = BTreeMap<Degree, usize>;

pub fn dims_nonzero(t: &DimTable) -> DimTable {
    t.iter().filter(|(_, d)| **d > 0).map(|(k, d)| (*k, *d)).collect()
}

/// Reindex a table as for `C[k]`.
pub fn shift_dims(t: &DimTable, k: Degree) -> DimTable {
    t.iter().map(|(n, d)| (n - k, *d)).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GradedVectorSpace {
    components: BTreeMap<Degree, Vec<String>>,
}

impl GradedVectorSpace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_components<I, S>(components: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Degree, Vec<S>)>,
        S: Into<String>,
    {
        let mut space = Self::new();
        for (deg, labels) in components {
            for l in labels {
                space.push(deg, l.into())?;
            }
        }
        Ok(space)
    }

    pub fn concentrated<S: Into<String>>(deg: Degree, labels: Vec<S>) -> Self {
        Self::from_components([(deg, labels)]).expect("labels must be unique")
    }

    /// Appends a basis vector, rejecting duplicate labels within a degree.
    pub fn push(&mut self, deg: Degree, label: String) -> Result<usize> {
        let comp = self.components.entry(deg).or_default();
        if comp.contains(&label) {
            return Err(Error::InvalidComplex(format!("duplicate label {label:?} in degree {deg}")));
        }
        comp.push(label);
        Ok(comp.len() - 1)
    }

    pub fn dim(&self, deg: Degree) -> usize {
        self.components.get(&deg).map_or(0, Vec::len)
    }

    pub fn total_dim(&self) -> usize {
        self.components.values().map(Vec::len).sum()
    }

    pub fn labels(&self, deg: Degree) -> &[String] {
        self.components.get(&deg).map_or(&[], Vec::as_slice)
    }

    /// Degrees with a nonzero component, ascending.
    pub fn degrees(&self) -> Vec<Degree> {
        self.components.iter().filter(|(_, v)| !v.is_empty()).map(|(d, _)| *d).collect()
    }

    pub fn dims(&self) -> DimTable {
        self.components.iter().filter(|(_, v)| !v.is_empty()).map(|(d, v)| (*d, v.len())).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn shift(&self, k: Degree) -> Self {
        Self { components: self.components.iter().map(|(d, v)| (d - k, v.clone())).collect() }
    }

    pub fn dual(&self) -> Self {
        Self {
            components: self
                .components
                .iter()
                .map(|(d, v)| (-d, v.iter().map(|l| dual_label(l)).collect()))
                .collect(),
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.components.iter().map(|(d, v)| if d % 2 == 0 { v.len() as i64 } else { -(v.len() as i64) }).sum()
    }

    fn relabeled(&self, f: impl Fn(&str) -> String) -> Self {
        Self { components: self.components.iter().map(|(d, v)| (*d, v.iter().map(|l| f(l)).collect())).collect() }
    }
}

fn dual_label(l: &str) -> String {
    match l.strip_suffix('*') {
        Some(base) => base.to_string(),
        None => format!("{l}*"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    space: GradedVectorSpace,
    diff: BTreeMap<Degree, Matrix>,
}

impl ChainComplex {
    /// Validates matrix shapes and `d^2 = 0`.
    pub fn new(space: GradedVectorSpace, diff: BTreeMap<Degree, Matrix>) -> Result<Self> {
        let mut clean = BTreeMap::new();
        for (n, m) in diff {
            let (rows, cols) = (space.dim(n + 1), space.dim(n));
            if m.nrows() != rows || m.ncols() != cols {
                return Err(Error::InvalidComplex(format!(
                    "d_{n} is {}x{} but the degrees have dims {rows} and {cols}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if !m.is_zero() {
                clean.insert(n, m);
            }
        }
        let c = Self { space, diff: clean };
        c.check_d_squared()?;
        Ok(c)
    }

    pub fn zero() -> Self {
        Self { space: GradedVectorSpace::new(), diff: BTreeMap::new() }
    }

    /// A graded space with zero differential.
    pub fn from_space(space: GradedVectorSpace) -> Self {
        Self { space, diff: BTreeMap::new() }
    }

    pub fn concentrated<S: Into<String>>(deg: Degree, labels: Vec<S>) -> Self {
        Self::from_space(GradedVectorSpace::concentrated(deg, labels))
    }

    pub fn space(&self) -> &GradedVectorSpace {
        &self.space
    }

    pub fn dim(&self, n: Degree) -> usize {
        self.space.dim(n)
    }

    pub fn dims(&self) -> DimTable {
        self.space.dims()
    }

    pub fn degrees(&self) -> Vec<Degree> {
        self.space.degrees()
    }

    /// `d_n : C^n -> C^{n+1}`.
    pub fn d(&self, n: Degree) -> Matrix {
        self.diff.get(&n).cloned().unwrap_or_else(|| Matrix::zeros(self.dim(n + 1), self.dim(n)))
    }

    pub fn differentials(&self) -> &BTreeMap<Degree, Matrix> {
        &self.diff
    }

    pub fn check_d_squared(&self) -> Result<()> {
        for (n, m) in &self.diff {
            if let Some(next) = self.diff.get(&(n + 1)) {
                let sq = next.mul(m);
                let first = sq.triplets().next().map(|(i, j, x)| (i, j, x.clone()));
                if let Some((i, j, x)) = first {
                    return Err(Error::InvalidComplex(format!(
                        "d_{} d_{n} != 0: entry ({i},{j}) = {x} (from {:?} to {:?})",
                        n + 1,
                        self.space.labels(*n)[j],
                        self.space.labels(n + 2)[i]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn shift(&self, k: Degree) -> Self {
        let s = sign(k as i64);
        Self {
            space: self.space.shift(k),
            diff: self.diff.iter().map(|(n, m)| (n - k, m.scale(&s))).collect(),
        }
    }

    pub fn dual(&self) -> Self {
        // (d^v)_n = -(-1)^n (d_{-n-1})^T
        let diff = self
            .diff
            .iter()
            .map(|(m_deg, m)| {
                let n = -m_deg - 1;
                (n, m.transpose().scale(&-sign(n as i64)))
            })
            .collect();
        Self { space: self.space.dual(), diff }
    }

    pub fn tensor(&self, other: &ChainComplex) -> Self {
        let a_degs = self.degrees();
        let b_degs = other.degrees();
        let mut space = GradedVectorSpace::new();
        // offset of block (i, j) inside total degree i + j
        let mut offset: BTreeMap<(Degree, Degree), usize> = BTreeMap::new();
        let mut totals: BTreeSet<Degree> = BTreeSet::new();
        for &i in &a_degs {
            for &j in &b_degs {
                totals.insert(i + j);
            }
        }
        for &n in &totals {
            for &i in &a_degs {
                let j = n - i;
                if other.dim(j) == 0 {
                    continue;
                }
                offset.insert((i, j), space.dim(n));
                for x in self.space.labels(i) {
                    for y in other.space.labels(j) {
                        space.push(n, format!("{x}(x){y}")).expect("unique products");
                    }
                }
            }
        }
        let mut entries: BTreeMap<Degree, Vec<(usize, usize, Rational)>> = BTreeMap::new();
        for (&(i, j), &off) in &offset {
            let n = i + j;
            let bj = other.dim(j);
            if let Some(&to) = offset.get(&(i + 1, j)) {
                let m = self.d(i).kronecker(&Matrix::identity(bj));
                entries.entry(n).or_default().extend(m.triplets().map(|(r, c, x)| (r + to, c + off, x.clone())));
            }
            if let Some(&to) = offset.get(&(i, j + 1)) {
                let m = Matrix::identity(self.dim(i)).kronecker(&other.d(j)).scale(&sign(i as i64));
                entries.entry(n).or_default().extend(m.triplets().map(|(r, c, x)| (r + to, c + off, x.clone())));
            }
        }
        let diff = entries
            .into_iter()
            .map(|(n, e)| (n, Matrix::from_triplets(space.dim(n + 1), space.dim(n), e)))
            .collect();
        Self::new(space, diff).expect("tensor of complexes is a complex")
    }

    /// Direct sum; labels are prefixed to stay unique.
    pub fn direct_sum(parts: &[(&str, &ChainComplex)]) -> Self {
        let mut space = GradedVectorSpace::new();
        let degs: BTreeSet<Degree> = parts.iter().flat_map(|(_, c)| c.degrees()).collect();
        for &n in &degs {
            for (p, c) in parts {
                for l in c.space.labels(n) {
                    space.push(n, format!("{p}{l}")).expect("prefixes keep labels unique");
                }
            }
        }
        let mut diff = BTreeMap::new();
        for &n in &degs {
            let blocks: Vec<Matrix> = parts.iter().map(|(_, c)| c.d(n)).collect();
            let refs: Vec<&Matrix> = blocks.iter().collect();
            diff.insert(n, Matrix::block_diag(&refs));
        }
        Self::new(space, diff).expect("sum of complexes is a complex")
    }

    /// Reorders every basis by a permutation drawn from `seed`.
    /// Returns the permuted complex and, per degree, `perm[old] = new`.
    pub fn shuffled(&self, seed: u64) -> (Self, BTreeMap<Degree, Vec<usize>>) {
        let mut perms = BTreeMap::new();
        let mut space = GradedVectorSpace::new();
        for n in self.degrees() {
            let dim = self.dim(n);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((n as i64 as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
            let mut order: Vec<usize> = (0..dim).collect();
            order.shuffle(&mut rng);
            // order[new] = old
            let mut perm = vec![0; dim];
            for (new, &old) in order.iter().enumerate() {
                perm[old] = new;
            }
            for &old in &order {
                space.push(n, self.space.labels(n)[old].clone()).expect("same labels");
            }
            perms.insert(n, perm);
        }
        let empty = Vec::new();
        let diff = self
            .diff
            .iter()
            .map(|(n, m)| {
                let rp = perms.get(&(n + 1)).unwrap_or(&empty);
                let cp = perms.get(n).unwrap_or(&empty);
                (*n, m.permuted(rp, cp))
            })
            .collect();
        (Self { space, diff }, perms)
    }

    pub fn relabeled(&self, f: impl Fn(&str) -> String) -> Self {
        Self { space: self.space.relabeled(f), diff: self.diff.clone() }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.space.euler_characteristic()
    }
}

/// Cohomology in one degree: dimension and cocycle representatives whose
/// classes form a basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeCohomology {
    pub dim: usize,
    pub representatives: Vec<SparseVec<Rational>>,
}

pub type CohomologyTable = BTreeMap<Degree, DegreeCohomology>;

pub fn table_dims(t: &CohomologyTable) -> DimTable {
    t.iter().filter(|(_, h)| h.dim > 0).map(|(n, h)| (*n, h.dim)).collect()
}

/// Cohomology dimensions only (nonzero degrees).
pub fn cohomology_dims(c: &ChainComplex, exact: &Exact) -> Result<DimTable> {
    c.check_d_squared()?;
    let c = match exact.shuffle {
        Some(seed) => c.shuffled(seed).0,
        None => c.clone(),
    };
    let mut ranks: BTreeMap<Degree, usize> = BTreeMap::new();
    for (n, m) in &c.diff {
        ranks.insert(*n, rank(exact, m)?);
    }
    let mut out = DimTable::new();
    for n in c.degrees() {
        let h = c.dim(n) - ranks.get(&n).copied().unwrap_or(0) - ranks.get(&(n - 1)).copied().unwrap_or(0);
        if h > 0 {
            out.insert(n, h);
        }
    }
    Ok(out)
}

/// Full cohomology with representatives (in the original basis order even
/// when shuffling). Over `F_p` the representatives are the canonical lifts.
pub fn cohomology(c: &ChainComplex, exact: &Exact) -> Result<CohomologyTable> {
    c.check_d_squared()?;
    let (work, perms) = match exact.shuffle {
        Some(seed) => {
            let (w, p) = c.shuffled(seed);
            (w, Some(p))
        }
        None => (c.clone(), None),
    };
    let mut out = CohomologyTable::new();
    for n in work.degrees() {
        let dim = work.dim(n);
        let cocycles = kernel_over(exact, &work.d(n))?;
        let boundaries = work.d(n - 1).columns();
        let reps = select_complement(exact, dim, &boundaries, &cocycles)?;
        let reps = match &perms {
            Some(p) => {
                let perm = &p[&n];
                let mut inv = vec![0; perm.len()];
                for (old, new) in perm.iter().enumerate() {
                    inv[*new] = old;
                }
                reps.into_iter()
                    .map(|v| {
                        let mut w: SparseVec<Rational> = v.into_iter().map(|(j, x)| (inv[j], x)).collect();
                        w.sort_by_key(|(j, _)| *j);
                        w
                    })
                    .collect()
            }
            None => reps,
        };
        out.insert(n, DegreeCohomology { dim: reps.len(), representatives: reps });
    }
    Ok(out)
}

fn select_complement(
    exact: &Exact,
    width: usize,
    span: &[SparseVec<Rational>],
    candidates: &[SparseVec<Rational>],
) -> Result<Vec<SparseVec<Rational>>> {
    use crate::linalg::{convert_vec, lift_vec};
    use crate::scalar::{FieldKind, PrimeField};
    fn run<F: crate::scalar::Field>(
        f: &F,
        width: usize,
        span: &[SparseVec<Rational>],
        candidates: &[SparseVec<Rational>],
    ) -> Result<Vec<SparseVec<Rational>>> {
        let mut ech = Echelon::new(f, width);
        for v in span {
            ech.insert(&convert_vec(f, v)?);
        }
        let mut out = Vec::new();
        for v in candidates {
            let fv = convert_vec(f, v)?;
            if ech.insert(&fv) {
                out.push(lift_vec(f, &fv));
            }
        }
        Ok(out)
    }
    match exact.field {
        FieldKind::Rational => run(&Rationals, width, span, candidates),
        FieldKind::Prime(p) => run(&PrimeField::new(p)?, width, span, candidates),
    }
}

/// A degree-0 chain map. Components missing from the map are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: ChainComplex,
    target: ChainComplex,
    comps: BTreeMap<Degree, Matrix>,
}

impl ChainMap {
    /// Validates shapes and `f d = d f`.
    pub fn new(source: ChainComplex, target: ChainComplex, comps: BTreeMap<Degree, Matrix>) -> Result<Self> {
        let mut clean = BTreeMap::new();
        for (n, m) in comps {
            if m.nrows() != target.dim(n) || m.ncols() != source.dim(n) {
                return Err(Error::NotChainMap(format!(
                    "component {n} is {}x{}, expected {}x{}",
                    m.nrows(),
                    m.ncols(),
                    target.dim(n),
                    source.dim(n)
                )));
            }
            if !m.is_zero() {
                clean.insert(n, m);
            }
        }
        let f = Self { source, target, comps: clean };
        f.check()?;
        Ok(f)
    }

    pub fn identity(c: &ChainComplex) -> Self {
        let comps = c.degrees().into_iter().map(|n| (n, Matrix::identity(c.dim(n)))).collect();
        Self { source: c.clone(), target: c.clone(), comps }
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex) -> Self {
        Self { source: source.clone(), target: target.clone(), comps: BTreeMap::new() }
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    pub fn component(&self, n: Degree) -> Matrix {
        self.comps.get(&n).cloned().unwrap_or_else(|| Matrix::zeros(self.target.dim(n), self.source.dim(n)))
    }

    fn check(&self) -> Result<()> {
        let degs: BTreeSet<Degree> = self.source.degrees().into_iter().collect();
        for n in degs {
            let lhs = self.component(n + 1).mul(&self.source.d(n));
            let rhs = self.target.d(n).mul(&self.component(n));
            if lhs != rhs {
                return Err(Error::NotChainMap(format!("f d != d f on degree {n}")));
            }
        }
        Ok(())
    }

    /// `other . self`.
    pub fn then(&self, other: &ChainMap) -> Result<ChainMap> {
        if self.target.dims() != other.source.dims() {
            return Err(Error::DimensionMismatch("composing maps with different middle complexes".into()));
        }
        let comps = self
            .source
            .degrees()
            .into_iter()
            .map(|n| (n, other.component(n).mul(&self.component(n))))
            .collect();
        ChainMap::new(self.source.clone(), other.target.clone(), comps)
    }

    pub fn scale(&self, c: &Rational) -> ChainMap {
        Self {
            source: self.source.clone(),
            target: self.target.clone(),
            comps: self.comps.iter().map(|(n, m)| (*n, m.scale(c))).collect(),
        }
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap> {
        let degs: BTreeSet<Degree> = self.comps.keys().chain(other.comps.keys()).copied().collect();
        let comps = degs.into_iter().map(|n| (n, self.component(n).add(&other.component(n)))).collect();
        ChainMap::new(self.source.clone(), self.target.clone(), comps)
    }

    /// Map into a direct sum: `x -> (f_1 x, ..., f_k x)`. All maps share a source.
    pub fn into_sum(parts: &[(&str, &ChainMap)]) -> Result<ChainMap> {
        let source = parts[0].1.source.clone();
        let targets: Vec<(&str, &ChainComplex)> = parts.iter().map(|(p, f)| (*p, &f.target)).collect();
        let target = ChainComplex::direct_sum(&targets);
        let mut comps = BTreeMap::new();
        for n in source.degrees() {
            let heights: Vec<usize> = parts.iter().map(|(_, f)| f.target.dim(n)).collect();
            let blocks: Vec<Matrix> = parts.iter().map(|(_, f)| f.component(n)).collect();
            let placed: Vec<(usize, usize, &Matrix)> = blocks.iter().enumerate().map(|(i, m)| (i, 0, m)).collect();
            comps.insert(n, Matrix::from_blocks(&heights, &[source.dim(n)], &placed));
        }
        ChainMap::new(source, target, comps)
    }

    /// Map out of a direct sum: `(x_1, ..., x_k) -> sum f_i x_i`. All maps share a target.
    pub fn from_sum(parts: &[(&str, &ChainMap)]) -> Result<ChainMap> {
        let target = parts[0].1.target.clone();
        let sources: Vec<(&str, &ChainComplex)> = parts.iter().map(|(p, f)| (*p, &f.source)).collect();
        let source = ChainComplex::direct_sum(&sources);
        let mut comps = BTreeMap::new();
        for n in source.degrees() {
            let widths: Vec<usize> = parts.iter().map(|(_, f)| f.source.dim(n)).collect();
            let blocks: Vec<Matrix> = parts.iter().map(|(_, f)| f.component(n)).collect();
            let placed: Vec<(usize, usize, &Matrix)> = blocks.iter().enumerate().map(|(i, m)| (0, i, m)).collect();
            comps.insert(n, Matrix::from_blocks(&[target.dim(n)], &widths, &placed));
        }
        ChainMap::new(source, target, comps)
    }

    /// Componentwise sum `f_1 + ... + f_k` between direct sums.
    pub fn direct_sum(parts: &[(&str, &ChainMap)]) -> Result<ChainMap> {
        let sources: Vec<(&str, &ChainComplex)> = parts.iter().map(|(p, f)| (*p, &f.source)).collect();
        let targets: Vec<(&str, &ChainComplex)> = parts.iter().map(|(p, f)| (*p, &f.target)).collect();
        let source = ChainComplex::direct_sum(&sources);
        let target = ChainComplex::direct_sum(&targets);
        let degs: BTreeSet<Degree> = source.degrees().into_iter().collect();
        let mut comps = BTreeMap::new();
        for n in degs {
            let blocks: Vec<Matrix> = parts.iter().map(|(_, f)| f.component(n)).collect();
            let refs: Vec<&Matrix> = blocks.iter().collect();
            comps.insert(n, Matrix::block_diag(&refs));
        }
        ChainMap::new(source, target, comps)
    }

    /// `f^v : N^v -> M^v`, componentwise transpose (compatible with the dual
    /// differential without extra signs).
    pub fn dual(&self) -> ChainMap {
        let source = self.target.dual();
        let target = self.source.dual();
        let comps = self.comps.iter().map(|(n, m)| (-n, m.transpose())).collect();
        ChainMap { source, target, comps }
    }

    pub fn is_degreewise_surjective(&self, exact: &Exact) -> Result<bool> {
        for n in self.target.degrees() {
            if rank(exact, &self.component(n))? != self.target.dim(n) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Rank of the map induced on cohomology, per degree of the source.
pub fn induced_rank(f: &ChainMap, exact: &Exact) -> Result<DimTable> {
    let mut out = DimTable::new();
    for n in f.source.degrees() {
        let cocycles = kernel_over(exact, &f.source.d(n))?;
        if cocycles.is_empty() {
            continue;
        }
        let fm = f.component(n);
        let images: Vec<SparseVec<Rational>> = cocycles.iter().map(|z| fm.apply(z)).collect();
        let boundaries = f.target.d(n - 1).columns();
        let r = select_complement(exact, f.target.dim(n), &boundaries, &images)?.len();
        if r > 0 {
            out.insert(n, r);
        }
    }
    Ok(out)
}

/// `cone(f)^n = M^{n+1} + N^n`, `d(m, x) = (-dm, f(m) + dx)`.
pub fn cone(f: &ChainMap) -> ChainComplex {
    let (m, n) = (&f.source, &f.target);
    let degs: BTreeSet<Degree> = m.degrees().into_iter().map(|k| k - 1).chain(n.degrees()).collect();
    let mut space = GradedVectorSpace::new();
    for &k in &degs {
        for l in m.space.labels(k + 1) {
            space.push(k, format!("src:{l}")).expect("prefixed");
        }
        for l in n.space.labels(k) {
            space.push(k, format!("tgt:{l}")).expect("prefixed");
        }
    }
    let mut diff = BTreeMap::new();
    for &k in &degs {
        let heights = [m.dim(k + 2), n.dim(k + 1)];
        let widths = [m.dim(k + 1), n.dim(k)];
        let dm = m.d(k + 1).neg();
        let fk = f.component(k + 1);
        let dn = n.d(k);
        let blocks = [(0, 0, &dm), (1, 0, &fk), (1, 1, &dn)];
        diff.insert(k, Matrix::from_blocks(&heights, &widths, &blocks));
    }
    ChainComplex::new(space, diff).expect("cone of a chain map is a complex")
}

/// The map `cone(f) -> cone(g)` induced by a commutative square
/// `g . alpha = beta . f`.
pub fn cone_map(f: &ChainMap, g: &ChainMap, alpha: &ChainMap, beta: &ChainMap) -> Result<ChainMap> {
    let lhs = alpha.then(g)?;
    let rhs = f.then(beta)?;
    for n in f.source.degrees() {
        if lhs.component(n) != rhs.component(n) {
            return Err(Error::NotChainMap(format!("square does not commute in degree {n}")));
        }
    }
    let src = cone(f);
    let tgt = cone(g);
    let comps = src
        .degrees()
        .into_iter()
        .map(|k| {
            let a = alpha.component(k + 1);
            let b = beta.component(k);
            (k, Matrix::block_diag(&[&a, &b]))
        })
        .collect();
    ChainMap::new(src, tgt, comps)
}

/// Homotopy fibre of `(f, -g): B + C -> A`, i.e. `cone(f, -g)[-1]`.
pub fn hopullback(f: &ChainMap, g: &ChainMap) -> Result<ChainComplex> {
    if f.target.dims() != g.target.dims() || f.target != g.target {
        return Err(Error::NotChainMap("hopullback needs maps into the same complex".into()));
    }
    let h = ChainMap::from_sum(&[("B:", f), ("C:", &g.scale(&-Rational::from_integer(1.into())))])?;
    Ok(cone(&h).shift(-1))
}

/// Strict pullback `{(b, c) : f b = g c}` as a subcomplex of `B + C`.
pub fn strict_pullback(f: &ChainMap, g: &ChainMap) -> Result<ChainComplex> {
    let h = ChainMap::from_sum(&[("B:", f), ("C:", &g.scale(&-Rational::from_integer(1.into())))])?;
    kernel_subcomplex(&h)
}

/// `ker f` as a complex, with bases from the reduced row echelon form.
pub fn kernel_subcomplex(f: &ChainMap) -> Result<ChainComplex> {
    let src = &f.source;
    let mut bases: BTreeMap<Degree, Vec<SparseVec<Rational>>> = BTreeMap::new();
    let mut space = GradedVectorSpace::new();
    for n in src.degrees() {
        let k = crate::linalg::kernel(&f.component(n));
        for i in 0..k.len() {
            space.push(n, format!("z{i}")).expect("fresh labels");
        }
        bases.insert(n, k);
    }
    let mut diff = BTreeMap::new();
    for (n, basis) in &bases {
        let Some(next) = bases.get(&(n + 1)) else { continue };
        let d = src.d(*n);
        let mut entries = Vec::new();
        for (j, v) in basis.iter().enumerate() {
            let image = d.apply(v);
            let coords = crate::linalg::express_in_span(next, src.dim(n + 1), &image)
                .ok_or_else(|| Error::NotChainMap("kernel is not a subcomplex".into()))?;
            entries.extend(coords.into_iter().map(|(i, x)| (i, j, x)));
        }
        diff.insert(*n, Matrix::from_triplets(next.len(), basis.len(), entries));
    }
    ChainComplex::new(space, diff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn two_term(dim0: usize, dim1: usize, d: Matrix) -> ChainComplex {
        let space = GradedVectorSpace::from_components([
            (0, (0..dim0).map(|i| format!("a{i}")).collect::<Vec<_>>()),
            (1, (0..dim1).map(|i| format!("b{i}")).collect::<Vec<_>>()),
        ])
        .unwrap();
        ChainComplex::new(space, BTreeMap::from([(0, d)])).unwrap()
    }

    fn ex() -> Exact {
        Exact::rational()
    }

    #[test]
    fn zero_complex_has_no_cohomology() {
        assert!(cohomology_dims(&ChainComplex::zero(), &ex()).unwrap().is_empty());
    }

    #[test]
    fn identity_two_term_is_acyclic() {
        let c = two_term(1, 1, Matrix::identity(1));
        assert!(cohomology_dims(&c, &ex()).unwrap().is_empty());
    }

    #[test]
    fn row_vector_differential() {
        let d = Matrix::from_triplets(1, 2, [(0, 0, q(1)), (0, 1, q(1))]);
        let c = two_term(2, 1, d);
        let h = cohomology(&c, &ex()).unwrap();
        assert_eq!(table_dims(&h), DimTable::from([(0, 1)]));
        let rep = &h[&0].representatives[0];
        assert!(c.d(0).apply(rep).is_empty());
    }

    #[test]
    fn bad_differential_rejected() {
        let space = GradedVectorSpace::from_components([(0, vec!["x"]), (1, vec!["y"]), (2, vec!["z"])]).unwrap();
        let d = BTreeMap::from([(0, Matrix::identity(1)), (1, Matrix::identity(1))]);
        assert!(matches!(ChainComplex::new(space, d), Err(Error::InvalidComplex(_))));
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(GradedVectorSpace::from_components([(0, vec!["x", "x"])]).is_err());
    }

    #[test]
    fn shift_examples() {
        let k = ChainComplex::concentrated(0, vec!["1"]);
        assert_eq!(k.shift(0), k);
        assert_eq!(k.shift(1).dims(), DimTable::from([(-1, 1)]));
        let c = two_term(2, 1, Matrix::from_triplets(1, 2, [(0, 0, q(1))]));
        assert_eq!(c.shift(3).shift(-3), c);
    }

    #[test]
    fn dual_examples() {
        let k = ChainComplex::concentrated(0, vec!["1"]);
        assert_eq!(k.dual().dims(), DimTable::from([(0, 1)]));
        let k2 = ChainComplex::concentrated(2, vec!["1"]);
        assert_eq!(k2.dual().dims(), DimTable::from([(-2, 1)]));
    }

    #[test]
    fn tensor_examples() {
        let unit = ChainComplex::concentrated(0, vec!["1"]);
        let c = two_term(2, 1, Matrix::from_triplets(1, 2, [(0, 0, q(1))]));
        assert_eq!(c.tensor(&unit).dims(), c.dims());
        let k1 = ChainComplex::concentrated(1, vec!["e"]);
        assert_eq!(k1.tensor(&k1).dims(), DimTable::from([(2, 1)]));
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let c = two_term(2, 1, Matrix::from_triplets(1, 2, [(0, 0, q(1))]));
        let h = cone(&ChainMap::identity(&c));
        assert!(cohomology_dims(&h, &ex()).unwrap().is_empty());
    }

    #[test]
    fn cone_of_zero_splits() {
        let m = ChainComplex::concentrated(0, vec!["m"]);
        let n = ChainComplex::concentrated(0, vec!["n0", "n1"]);
        let h = cohomology_dims(&cone(&ChainMap::zero(&m, &n)), &ex()).unwrap();
        assert_eq!(h, DimTable::from([(-1, 1), (0, 2)]));
    }

    #[test]
    fn non_chain_map_rejected() {
        let c = two_term(1, 1, Matrix::identity(1));
        let comps = BTreeMap::from([(0, Matrix::identity(1))]);
        assert!(matches!(ChainMap::new(c.clone(), c, comps), Err(Error::NotChainMap(_))));
    }

    #[test]
    fn hopullback_examples() {
        let b = ChainComplex::concentrated(0, vec!["b"]);
        let c = ChainComplex::concentrated(0, vec!["c0", "c1"]);
        let zero = ChainComplex::zero();
        let p = hopullback(&ChainMap::zero(&b, &zero), &ChainMap::zero(&c, &zero)).unwrap();
        assert_eq!(cohomology_dims(&p, &ex()).unwrap(), DimTable::from([(0, 3)]));

        let k = ChainComplex::concentrated(0, vec!["x"]);
        let id = ChainMap::identity(&k);
        let p = hopullback(&id, &id).unwrap();
        assert_eq!(cohomology_dims(&p, &ex()).unwrap(), DimTable::from([(0, 1)]));
        let strict = strict_pullback(&id, &id).unwrap();
        assert_eq!(cohomology_dims(&strict, &ex()).unwrap(), DimTable::from([(0, 1)]));
    }

    #[test]
    fn shuffling_preserves_cohomology() {
        let d = Matrix::from_triplets(2, 3, [(0, 0, q(1)), (0, 1, q(2)), (1, 2, q(1))]);
        let c = two_term(3, 2, d);
        let plain = cohomology(&c, &ex()).unwrap();
        let shuffled = cohomology(&c, &ex().with_shuffle(7)).unwrap();
        assert_eq!(table_dims(&plain), table_dims(&shuffled));
        for rep in &shuffled[&0].representatives {
            assert!(c.d(0).apply(rep).is_empty());
        }
    }
}
