//! Finite poset diagrams of complexes and their homotopy colimits.
//!
//! [`PosetDiagram::hocolim`] is the Bousfield–Kan bar complex over strict
//! chains `x0 < ... < xk`; [`PuncturedCube::hocolim_recursive`] is an
//! independent construction by iterated mapping cones, used as a cross-check.

use std::collections::{BTreeMap, BTreeSet};

use crate::complex::{cone, cone_map, ChainComplex, ChainMap, Degree, GradedVectorSpace};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{q, sign, Rational};

#[derive(Clone, Debug)]
pub struct PosetDiagram {
    names: Vec<String>,
    values: Vec<ChainComplex>,
    /// `leq[i][j]` iff `i <= j`.
    leq: Vec<Vec<bool>>,
    /// Composite maps `D(i) -> D(j)` for every `i < j`.
    maps: BTreeMap<(usize, usize), ChainMap>,
}

impl PosetDiagram {
    /// The order is generated by the given arrows; composites along different
    /// paths must agree.
    pub fn new(names: Vec<String>, values: Vec<ChainComplex>, arrows: BTreeMap<(usize, usize), ChainMap>) -> Result<Self> {
        let n = names.len();
        if values.len() != n {
            return Err(Error::InvalidDiagram(format!("{n} nodes but {} values", values.len())));
        }
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (&(i, j), f) in &arrows {
            if i >= n || j >= n || i == j {
                return Err(Error::InvalidDiagram(format!("bad arrow {i} -> {j}")));
            }
            if f.source() != &values[i] || f.target() != &values[j] {
                return Err(Error::InvalidDiagram(format!(
                    "arrow {} -> {} does not match the node complexes",
                    names[i], names[j]
                )));
            }
            out[i].push(j);
        }
        let order = topological_order(&out)
            .ok_or_else(|| Error::InvalidDiagram("arrows contain a cycle".into()))?;

        let mut leq = vec![vec![false; n]; n];
        let mut maps: BTreeMap<(usize, usize), ChainMap> = BTreeMap::new();
        for &i in order.iter().rev() {
            leq[i][i] = true;
            let mut candidates: BTreeMap<usize, ChainMap> = BTreeMap::new();
            for &c in &out[i] {
                let first = &arrows[&(i, c)];
                let mut reach: Vec<(usize, ChainMap)> = vec![(c, first.clone())];
                for j in 0..n {
                    if j != c && leq[c][j] {
                        reach.push((j, first.then(&maps[&(c, j)])?));
                    }
                }
                for (j, f) in reach {
                    leq[i][j] = true;
                    match candidates.get(&j) {
                        Some(g) if g != &f => {
                            return Err(Error::InvalidDiagram(format!(
                                "paths {} -> {} give different composites",
                                names[i], names[j]
                            )))
                        }
                        Some(_) => {}
                        None => {
                            candidates.insert(j, f);
                        }
                    }
                }
            }
            for (j, f) in candidates {
                maps.insert((i, j), f);
            }
        }
        Ok(Self { names, values, leq, maps })
    }

    /// Like [`PosetDiagram::new`] but from raw matrices, so that failing the
    /// chain-map check is reported as an invalid diagram.
    pub fn from_matrices(
        names: Vec<String>,
        values: Vec<ChainComplex>,
        arrows: Vec<(usize, usize, BTreeMap<Degree, Matrix>)>,
    ) -> Result<Self> {
        let mut maps = BTreeMap::new();
        for (i, j, comps) in arrows {
            let (Some(s), Some(t)) = (values.get(i), values.get(j)) else {
                return Err(Error::InvalidDiagram(format!("arrow {i} -> {j} names a missing node")));
            };
            let f = ChainMap::new(s.clone(), t.clone(), comps).map_err(|e| Error::InvalidDiagram(e.to_string()))?;
            maps.insert((i, j), f);
        }
        Self::new(names, values, maps)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn value(&self, i: usize) -> &ChainComplex {
        &self.values[i]
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    /// `D(i <= j)`.
    pub fn map(&self, i: usize, j: usize) -> Result<ChainMap> {
        if i == j {
            return Ok(ChainMap::identity(&self.values[i]));
        }
        self.maps
            .get(&(i, j))
            .cloned()
            .ok_or_else(|| Error::InvalidDiagram(format!("{} is not below {}", self.names[i], self.names[j])))
    }

    /// Strict chains `x0 < x1 < ... < xk`, in lexicographic order.
    pub fn chains(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack: Vec<Vec<usize>> = (0..self.len()).rev().map(|i| vec![i]).collect();
        while let Some(chain) = stack.pop() {
            let last = *chain.last().expect("nonempty chain");
            for j in (0..self.len()).rev() {
                if j != last && self.leq[last][j] {
                    let mut next = chain.clone();
                    next.push(j);
                    stack.push(next);
                }
            }
            out.push(chain);
        }
        out
    }

    fn bar_layout(&self) -> Result<BarLayout> {
        let chains = self.chains();
        let mut space = GradedVectorSpace::new();
        let mut offset: BTreeMap<(usize, Degree), usize> = BTreeMap::new();
        let mut by_degree: BTreeMap<Degree, Vec<(usize, Degree)>> = BTreeMap::new();
        for (ci, chain) in chains.iter().enumerate() {
            let k = (chain.len() - 1) as Degree;
            let v = &self.values[chain[0]];
            for m in v.degrees() {
                by_degree.entry(m - k).or_default().push((ci, m));
            }
        }
        for (&total, parts) in &by_degree {
            for &(ci, m) in parts {
                offset.insert((ci, m), space.dim(total));
                let tag: Vec<&str> = chains[ci].iter().map(|&x| self.names[x].as_str()).collect();
                for l in self.values[chains[ci][0]].space().labels(m) {
                    space.push(total, format!("[{}]{l}", tag.join("<")))?;
                }
            }
        }
        Ok(BarLayout { chains, space, offset, by_degree })
    }

    /// Bar construction: summand `D(x0)[k]` for each chain of length `k`, with
    /// `d(s, v) = (s, (-1)^k dv) + sum_i (-1)^i (d_i s, face_i v)`.
    pub fn hocolim(&self) -> Result<ChainComplex> {
        let BarLayout { chains, space, offset, by_degree } = self.bar_layout()?;
        let index: BTreeMap<&[usize], usize> = chains.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
        let mut entries: BTreeMap<Degree, Vec<(usize, usize, Rational)>> = BTreeMap::new();
        let mut place = |total: Degree, to: usize, from: usize, m: &Matrix, s: &Rational| {
            entries
                .entry(total)
                .or_default()
                .extend(m.triplets().map(|(r, c, x)| (r + to, c + from, x * s)));
        };
        for (&total, parts) in &by_degree {
            for &(ci, m) in parts {
                let chain = &chains[ci];
                let k = chain.len() - 1;
                let from = offset[&(ci, m)];
                let v = &self.values[chain[0]];
                let dv = v.d(m);
                if !dv.is_zero() {
                    let to = offset[&(ci, m + 1)];
                    place(total, to, from, &dv, &sign(k as i64));
                }
                for i in 0..=k {
                    if k == 0 {
                        break;
                    }
                    let mut face = chain.clone();
                    face.remove(i);
                    let fi = index[face.as_slice()];
                    let Some(&to) = offset.get(&(fi, m)) else { continue };
                    let s = sign(i as i64);
                    if i == 0 {
                        let f = self.map(chain[0], chain[1])?.component(m);
                        place(total, to, from, &f, &s);
                    } else {
                        place(total, to, from, &Matrix::identity(v.dim(m)), &s);
                    }
                }
            }
        }
        let diff = entries
            .into_iter()
            .map(|(n, e)| (n, Matrix::from_triplets(space.dim(n + 1), space.dim(n), e)))
            .collect();
        ChainComplex::new(space, diff)
    }

    /// The map `hocolim D -> X` induced by a cocone `D(i) -> X`: the node
    /// summands map by the cocone, higher simplices to zero.
    pub fn hocolim_augmentation(&self, target: &ChainComplex, cocone: &[ChainMap]) -> Result<ChainMap> {
        if cocone.len() != self.len() {
            return Err(Error::InvalidDiagram("one cocone map per node expected".into()));
        }
        for (i, f) in cocone.iter().enumerate() {
            if f.source() != &self.values[i] || f.target() != target {
                return Err(Error::InvalidDiagram(format!("cocone map at {} has the wrong ends", self.names[i])));
            }
        }
        for ((i, j), f) in &self.maps {
            if f.then(&cocone[*j])? != cocone[*i] {
                return Err(Error::InvalidDiagram(format!("cocone is not natural along {} -> {}", self.names[*i], self.names[*j])));
            }
        }
        let source = self.hocolim()?;
        let BarLayout { chains, offset, by_degree, .. } = self.bar_layout()?;
        let mut comps = BTreeMap::new();
        for (&total, parts) in &by_degree {
            let mut entries = Vec::new();
            for &(ci, m) in parts {
                if chains[ci].len() != 1 {
                    continue;
                }
                let from = offset[&(ci, m)];
                entries.extend(cocone[chains[ci][0]].component(m).triplets().map(|(r, c, x)| (r, c + from, x.clone())));
            }
            comps.insert(total, Matrix::from_triplets(target.dim(total), source.dim(total), entries));
        }
        ChainMap::new(source, target.clone(), comps)
    }
}

struct BarLayout {
    chains: Vec<Vec<usize>>,
    space: GradedVectorSpace,
    /// (chain, degree in `D(x0)`) -> offset within the total degree
    offset: BTreeMap<(usize, Degree), usize>,
    by_degree: BTreeMap<Degree, Vec<(usize, Degree)>>,
}

fn topological_order(out: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = out.len();
    let mut indeg = vec![0usize; n];
    for targets in out {
        for &j in targets {
            indeg[j] += 1;
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &j in &out[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.insert(j);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Subsets of `{0..d}` as bit masks.
pub type Subset = u32;

pub fn subset_name(mask: Subset, d: usize) -> String {
    let members: Vec<String> = (0..d).filter(|i| mask >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", members.join(","))
}

/// A diagram on the nonempty subsets of `{0..d}` with arrows `E -> E'` for
/// `E' ⊆ E`.
#[derive(Clone, Debug)]
pub struct PuncturedCube {
    dim: usize,
    diagram: PosetDiagram,
    index: BTreeMap<Subset, usize>,
}

impl PuncturedCube {
    /// `arrow(E, i)` is the map `D(E) -> D(E \ {i})` for `i ∈ E`, `|E| >= 2`.
    pub fn new(
        dim: usize,
        value: impl Fn(Subset) -> ChainComplex,
        arrow: impl Fn(Subset, usize) -> Result<ChainMap>,
    ) -> Result<Self> {
        if dim == 0 || dim > 16 {
            return Err(Error::InvalidDiagram(format!("cube dimension {dim} out of range")));
        }
        let masks: Vec<Subset> = (1..(1u32 << dim)).collect();
        let index: BTreeMap<Subset, usize> = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let names = masks.iter().map(|&m| subset_name(m, dim)).collect();
        let values = masks.iter().map(|&m| value(m)).collect();
        let mut arrows = BTreeMap::new();
        for &m in &masks {
            if m.count_ones() < 2 {
                continue;
            }
            for i in 0..dim {
                if m >> i & 1 == 1 {
                    arrows.insert((index[&m], index[&(m & !(1 << i))]), arrow(m, i)?);
                }
            }
        }
        let diagram = PosetDiagram::new(names, values, arrows)?;
        Ok(Self { dim, diagram, index })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn diagram(&self) -> &PosetDiagram {
        &self.diagram
    }

    pub fn value(&self, mask: Subset) -> &ChainComplex {
        self.diagram.value(self.index[&mask])
    }

    fn map(&self, from: Subset, to: Subset) -> Result<ChainMap> {
        self.diagram.map(self.index[&from], self.index[&to])
    }

    pub fn hocolim(&self) -> Result<ChainComplex> {
        self.diagram.hocolim()
    }

    /// Splits off the last coordinate `t`: the sets containing `t` have `{t}`
    /// as terminal node, so the colimit is the homotopy pushout of
    /// `R(no t) <- R(with t, rest nonempty) -> D({t})`.
    pub fn hocolim_recursive(&self) -> Result<ChainComplex> {
        let coords: Vec<usize> = (0..self.dim).collect();
        Ok(self.recurse(0, &coords)?.0)
    }

    /// Colimit of `S -> D(base ∪ S)` over nonempty `S ⊆ coords`, with the map
    /// defining the outer cone.
    fn recurse(&self, base: Subset, coords: &[usize]) -> Result<(ChainComplex, Option<ChainMap>)> {
        let (&t, rest) = coords.split_last().expect("nonempty coordinates");
        let tb = base | 1 << t;
        if rest.is_empty() {
            return Ok((self.value(tb).clone(), None));
        }
        let h = self.pushout_map(base, rest, t)?;
        Ok((cone(&h), Some(h)))
    }

    /// `R(yes) -> R(no) + D(base ∪ {t})`, `x -> (R(eta) x, -eps x)`.
    fn pushout_map(&self, base: Subset, rest: &[usize], t: usize) -> Result<ChainMap> {
        let tb = base | 1 << t;
        let eta = self.transformation(tb, base, rest)?;
        let eps = self.augmentation(tb, rest, tb)?;
        ChainMap::into_sum(&[("no:", &eta), ("pt:", &eps.scale(&q(-1)))])
    }

    /// `R(base1, coords) -> R(base2, coords)` induced by `base2 ⊆ base1`.
    fn transformation(&self, base1: Subset, base2: Subset, coords: &[usize]) -> Result<ChainMap> {
        let (&t, rest) = coords.split_last().expect("nonempty coordinates");
        let (t1, t2) = (base1 | 1 << t, base2 | 1 << t);
        if rest.is_empty() {
            return self.map(t1, t2);
        }
        let h1 = self.pushout_map(base1, rest, t)?;
        let h2 = self.pushout_map(base2, rest, t)?;
        let yes = self.transformation(t1, t2, rest)?;
        let no = self.transformation(base1, base2, rest)?;
        let pt = self.map(t1, t2)?;
        let tgt = ChainMap::direct_sum(&[("no:", &no), ("pt:", &pt)])?;
        cone_map(&h1, &h2, &yes, &tgt)
    }

    /// `R(base, coords) -> D(target)` from the maps `D(base ∪ S) -> D(target)`.
    fn augmentation(&self, base: Subset, coords: &[usize], target: Subset) -> Result<ChainMap> {
        let (&t, rest) = coords.split_last().expect("nonempty coordinates");
        let tb = base | 1 << t;
        if rest.is_empty() {
            return self.map(tb, target);
        }
        let (src, h) = self.recurse(base, coords)?;
        let h = h.expect("recursive step has a cone");
        let no = self.augmentation(base, rest, target)?;
        let pt = self.map(tb, target)?;
        let out = ChainMap::from_sum(&[("no:", &no), ("pt:", &pt)])?;
        let x = self.value(target);
        let comps = src
            .degrees()
            .into_iter()
            .map(|k| {
                let zero = Matrix::zeros(x.dim(k), h.source().dim(k + 1));
                let a = out.component(k);
                (k, Matrix::from_blocks(&[x.dim(k)], &[h.source().dim(k + 1), h.target().dim(k)], &[(0, 0, &zero), (0, 1, &a)]))
            })
            .collect();
        ChainMap::new(src, x.clone(), comps)
    }
}
