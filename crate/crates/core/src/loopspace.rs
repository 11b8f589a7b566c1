//! Coordinate models of formal loop and bubble spaces on finite windows of
//! multi-indices: generator counts, the window complexes `M_D`, colimits
//! over punctured cubes of subsets, the formal sphere algebra and the
//! residue pairing on the bubble tangent.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{cohomology_dims, cone, hopullback, shift_dims, ChainComplex, ChainMap, DimTable};
use crate::dglie::{augmentation_is_algebra_map, square_zero, truncated_polynomial, BaseCdga, CdgaModule, Elem};
use crate::diagram::{subset_name, PuncturedCube, Subset};
use crate::error::{Error, Result};
use crate::koszul::{box_points, residue, residue_pairing, truncated_monomials, Multidegree};
use crate::linalg::{kernel, rank, Matrix};
use crate::scalar::{q, Exact};

/// Largest cube dimension accepted by the subset-colimit checks.
pub const MAX_CUBE_DIM: usize = 5;

fn members(mask: Subset, d: usize) -> impl Iterator<Item = usize> {
    (0..d).filter(move |i| mask >> i & 1 == 1)
}

fn check_subset(mask: Subset, d: usize) -> Result<()> {
    if d == 0 || d > 30 || mask >> d != 0 {
        return Err(Error::InvalidBounds(format!("subset {mask:#b} does not lie in {{1..{d}}}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorCount {
    pub d: usize,
    pub e: Vec<usize>,
    pub n: u32,
    pub p: u32,
    pub count: usize,
    pub formula: u64,
    pub generators: Vec<Multidegree>,
}

/// Multi-indices `alpha` with `-n [i in E] <= alpha_i <= p`.
pub fn loop_window(d: usize, e: Subset, n: u32, p: u32) -> Result<Vec<Multidegree>> {
    check_subset(e, d)?;
    let lo: Vec<i64> = (0..d).map(|i| if e >> i & 1 == 1 { -(n as i64) } else { 0 }).collect();
    Ok(box_points(&lo, &vec![p as i64; d]))
}

pub fn count_generators(d: usize, e: Subset, n: u32, p: u32) -> Result<GeneratorCount> {
    let generators = loop_window(d, e, n, p)?;
    let k = e.count_ones();
    let formula = u64::from(n + p + 1).pow(k) * u64::from(p + 1).pow(d as u32 - k);
    Ok(GeneratorCount {
        d,
        e: members(e, d).map(|i| i + 1).collect(),
        n,
        p,
        count: generators.len(),
        formula,
        generators,
    })
}

/// Free complex in degree 0 on symbols `a_alpha` with `-n <= alpha_i < 0`
/// for `i` in `D` and `0 <= alpha_i <= p` otherwise.
pub fn window_complex(d: usize, dset: Subset, n: u32, p: u32) -> Result<ChainComplex> {
    check_subset(dset, d)?;
    let lo: Vec<i64> = (0..d).map(|i| if dset >> i & 1 == 1 { -(n as i64) } else { 0 }).collect();
    let hi: Vec<i64> = (0..d).map(|i| if dset >> i & 1 == 1 { -1 } else { p as i64 }).collect();
    let labels: Vec<String> = box_points(&lo, &hi).iter().map(|a| format!("a{a:?}")).collect();
    Ok(ChainComplex::concentrated(0, labels))
}

/// Which summands `M_D` sit over a node `E`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColimMode {
    /// `D` nonempty, `D ⊆ E`.
    NonemptyD,
    /// every `D ⊆ E`, including the empty set.
    AllD,
}

impl ColimMode {
    fn admits(self, dset: Subset) -> bool {
        self == ColimMode::AllD || dset != 0
    }
}

/// One complex `M_D` per subset `D` of `{1..d}`.
#[derive(Clone, Debug)]
pub struct SubsetFamily {
    d: usize,
    complexes: BTreeMap<Subset, ChainComplex>,
}

impl SubsetFamily {
    pub fn new(d: usize, complexes: BTreeMap<Subset, ChainComplex>) -> Result<Self> {
        if d == 0 || d > MAX_CUBE_DIM {
            return Err(Error::InvalidDiagram(format!("cube dimension {d} outside 1..={MAX_CUBE_DIM}")));
        }
        for mask in 0..(1u32 << d) {
            if !complexes.contains_key(&mask) {
                return Err(Error::InvalidDiagram(format!("no complex for the subset {}", subset_name(mask, d))));
            }
        }
        if complexes.keys().any(|m| m >> d != 0) {
            return Err(Error::InvalidDiagram("a subset lies outside {1..d}".into()));
        }
        Ok(Self { d, complexes })
    }

    /// The window complexes `M_D^{p,n}`.
    pub fn windows(d: usize, n: u32, p: u32) -> Result<Self> {
        let complexes = (0..(1u32 << d)).map(|m| Ok((m, window_complex(d, m, n, p)?))).collect::<Result<_>>()?;
        Self::new(d, complexes)
    }

    /// Random small complexes: sums of lines and of two-term pieces
    /// `k -> k`, at most `max_dim` basis vectors each.
    pub fn random<R: Rng>(rng: &mut R, d: usize, max_dim: usize) -> Result<Self> {
        let mut complexes = BTreeMap::new();
        for mask in 0..(1u32 << d) {
            complexes.insert(mask, random_small_complex(rng, max_dim));
        }
        Self::new(d, complexes)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, dset: Subset) -> &ChainComplex {
        &self.complexes[&dset]
    }

    fn parts(&self, e: Subset, mode: ColimMode) -> Vec<(String, Subset)> {
        (0..(1u32 << self.d))
            .filter(|dset| dset & !e == 0 && mode.admits(*dset))
            .map(|dset| (format!("{}:", subset_name(dset, self.d)), dset))
            .collect()
    }

    fn node(&self, e: Subset, mode: ColimMode) -> ChainComplex {
        let parts = self.parts(e, mode);
        let refs: Vec<(&str, &ChainComplex)> = parts.iter().map(|(p, m)| (p.as_str(), &self.complexes[m])).collect();
        ChainComplex::direct_sum(&refs)
    }

    /// `(+)_{D ⊆ E} M_D -> (+)_{D ⊆ E'} M_D`, projecting away the summands
    /// with `D` not inside `E'`.
    fn projection(&self, e: Subset, e2: Subset, mode: ColimMode) -> Result<ChainMap> {
        let src_parts = self.parts(e, mode);
        let tgt_parts = self.parts(e2, mode);
        let mut pieces = Vec::new();
        for (_, dset) in &src_parts {
            let m = &self.complexes[dset];
            let into: Vec<ChainMap> = tgt_parts
                .iter()
                .map(|(_, d2)| if d2 == dset { ChainMap::identity(m) } else { ChainMap::zero(m, &self.complexes[d2]) })
                .collect();
            let refs: Vec<(&str, &ChainMap)> = tgt_parts.iter().zip(&into).map(|((p, _), f)| (p.as_str(), f)).collect();
            pieces.push(ChainMap::into_sum(&refs)?);
        }
        let refs: Vec<(&str, &ChainMap)> = src_parts.iter().zip(&pieces).map(|((p, _), f)| (p.as_str(), f)).collect();
        ChainMap::from_sum(&refs)
    }

    /// `E -> (+)_{D ⊆ E} M_D` over nonempty `E`, arrows `E -> E \ {i}`.
    pub fn cube(&self, mode: ColimMode) -> Result<PuncturedCube> {
        if mode == ColimMode::NonemptyD && self.d == 0 {
            return Err(Error::InvalidDiagram("empty cube".into()));
        }
        PuncturedCube::new(self.d, |e| self.node(e, mode), |e, i| self.projection(e, e & !(1 << i), mode))
    }

    /// Cohomology of `M_F[d-1]`, plus `M_∅` in all-`D` mode.
    pub fn expected(&self, mode: ColimMode, exact: &Exact) -> Result<DimTable> {
        let full = (1u32 << self.d) - 1;
        let mut t = shift_dims(&cohomology_dims(&self.complexes[&full], exact)?, self.d as i32 - 1);
        if mode == ColimMode::AllD {
            for (k, v) in cohomology_dims(&self.complexes[&0], exact)? {
                *t.entry(k).or_default() += v;
            }
        }
        Ok(t)
    }
}

fn random_small_complex<R: Rng>(rng: &mut R, max_dim: usize) -> ChainComplex {
    let mut pieces = Vec::new();
    let mut used = 0;
    let target = rng.gen_range(0..=max_dim);
    while used < target {
        let deg = rng.gen_range(-1..=1);
        if target - used >= 2 && rng.gen_bool(0.3) {
            let c = q(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
            let space = crate::complex::GradedVectorSpace::from_components([(deg, vec!["s"]), (deg + 1, vec!["t"])])
                .expect("distinct labels");
            let diff = BTreeMap::from([(deg, Matrix::from_triplets(1, 1, [(0, 0, c)]))]);
            pieces.push(ChainComplex::new(space, diff).expect("two-term complex"));
            used += 2;
        } else {
            pieces.push(ChainComplex::concentrated(deg, vec!["v"]));
            used += 1;
        }
    }
    let names: Vec<String> = (0..pieces.len()).map(|i| format!("{i}:")).collect();
    let refs: Vec<(&str, &ChainComplex)> = names.iter().map(|s| s.as_str()).zip(&pieces).collect();
    ChainComplex::direct_sum(&refs)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubsetsColimReport {
    pub d: usize,
    pub mode: ColimMode,
    pub bar: DimTable,
    pub recursive: DimTable,
    pub expected: DimTable,
    pub implementations_agree: bool,
    pub passes: bool,
}

pub fn subsets_colim_check(family: &SubsetFamily, mode: ColimMode, exact: &Exact) -> Result<SubsetsColimReport> {
    let cube = family.cube(mode)?;
    let bar = cohomology_dims(&cube.hocolim()?, exact)?;
    let recursive = cohomology_dims(&cube.hocolim_recursive()?, exact)?;
    let expected = family.expected(mode, exact)?;
    let implementations_agree = bar == recursive;
    let passes = implementations_agree && bar == expected;
    Ok(SubsetsColimReport { d: family.d, mode, bar, recursive, expected, implementations_agree, passes })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopTangentReport {
    pub d: usize,
    pub n: u32,
    pub p: u32,
    pub cohomology: DimTable,
    pub expected: DimTable,
    pub passes: bool,
}

fn loop_expected(d: usize, n: u32, p: u32, shift: i32) -> DimTable {
    let mut t = DimTable::new();
    *t.entry(0).or_default() += (p as usize + 1).pow(d as u32);
    *t.entry(-shift).or_default() += (n as usize).pow(d as u32);
    t
}

fn check_np(n: u32, p: u32) -> Result<()> {
    if n == 0 || p == 0 {
        return Err(Error::InvalidBounds("n and p must be at least 1".into()));
    }
    Ok(())
}

/// Colimit over nonempty `E` of `(+)_{D ⊆ E} M_D^{p,n}`; expected
/// `(p+1)^d` in degree 0 and `n^d` in degree `-(d-1)`.
pub fn loop_tangent(d: usize, n: u32, p: u32, exact: &Exact) -> Result<LoopTangentReport> {
    check_np(n, p)?;
    let family = SubsetFamily::windows(d, n, p)?;
    let cube = family.cube(ColimMode::AllD)?;
    let cohomology = cohomology_dims(&cube.hocolim()?, exact)?;
    let expected = loop_expected(d, n, p, d as i32 - 1);
    Ok(LoopTangentReport { d, n, p, passes: cohomology == expected, cohomology, expected })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BubbleFiberReport {
    pub d: usize,
    pub n: u32,
    pub p: u32,
    /// Pushout of `M_∅ <- C -> M_∅` along the augmentations.
    pub cotangent: DimTable,
    /// Homotopy pullback of the duals `M_∅^v -> C^v <- M_∅^v`.
    pub tangent: DimTable,
    pub expected_cotangent: DimTable,
    pub passes: bool,
}

/// Fibre product of two copies of `M_∅` over the loop colimit `C`, computed
/// on cotangent complexes (pushout) and on tangent complexes (pullback).
pub fn bubble_fiber_check(d: usize, n: u32, p: u32, exact: &Exact) -> Result<BubbleFiberReport> {
    check_np(n, p)?;
    let family = SubsetFamily::windows(d, n, p)?;
    let cube = family.cube(ColimMode::AllD)?;
    let base = family.get(0).clone();
    let diagram = cube.diagram();
    let cocone: Vec<ChainMap> = (0..diagram.len())
        .map(|i| {
            let node = diagram.value(i);
            let maps = project_onto_empty(&family, node, &base, i, &cube)?;
            Ok(maps)
        })
        .collect::<Result<_>>()?;
    let aug = diagram.hocolim_augmentation(&base, &cocone)?;
    let to_pair = ChainMap::into_sum(&[("L:", &aug), ("R:", &aug.scale(&q(-1)))])?;
    let cotangent = cohomology_dims(&cone(&to_pair), exact)?;
    let dual = aug.dual();
    let tangent = cohomology_dims(&hopullback(&dual, &dual)?, exact)?;
    let expected_cotangent = loop_expected(d, n, p, d as i32);
    let expected_tangent: DimTable = expected_cotangent.iter().map(|(k, v)| (-k, *v)).collect();
    let passes = cotangent == expected_cotangent && tangent == expected_tangent;
    Ok(BubbleFiberReport { d, n, p, cotangent, tangent, expected_cotangent, passes })
}

fn project_onto_empty(family: &SubsetFamily, node: &ChainComplex, base: &ChainComplex, i: usize, cube: &PuncturedCube) -> Result<ChainMap> {
    let e = (1..(1u32 << family.d())).nth(i).expect("node index");
    debug_assert_eq!(cube.value(e), node);
    let parts = family.parts(e, ColimMode::AllD);
    let pieces: Vec<ChainMap> = parts
        .iter()
        .map(|(_, dset)| if *dset == 0 { ChainMap::identity(base) } else { ChainMap::zero(family.get(*dset), base) })
        .collect();
    let refs: Vec<(&str, &ChainMap)> = parts.iter().zip(&pieces).map(|((p, _), f)| (p.as_str(), f)).collect();
    ChainMap::from_sum(&refs)
}

/// `A_p (+) A_n[-d]` with `A_m = k[x_1..x_d]/(x_i^m)`, square-zero.
#[derive(Clone, Debug)]
pub struct FormalSphere {
    pub d: usize,
    pub n: u32,
    pub p: u32,
    pub algebra: BaseCdga,
    /// Number of basis vectors in the `A_p` part (they come first).
    pub base_dim: usize,
    pub augmentation_is_algebra_map: bool,
}

pub fn formal_sphere(d: usize, n: u32, p: u32) -> Result<FormalSphere> {
    if d == 0 || n == 0 || p < n {
        return Err(Error::InvalidBounds(format!("formal sphere needs d >= 1 and p >= n >= 1 (got d={d}, n={n}, p={p})")));
    }
    let ap = truncated_polynomial(d, p)?;
    let big = truncated_monomials(d, p);
    let small = truncated_monomials(d, n);
    let index: BTreeMap<&Multidegree, usize> = small.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let action: Vec<Vec<Elem>> = big
        .iter()
        .map(|a| {
            small
                .iter()
                .map(|b| {
                    let s: Multidegree = a.iter().zip(b).map(|(x, y)| x + y).collect();
                    index.get(&s).map(|&k| Elem::from([(k, q(1))])).unwrap_or_default()
                })
                .collect()
        })
        .collect();
    let labels = small.iter().map(|b| format!("top{b:?}")).collect();
    let module = CdgaModule::new(&ap, labels, vec![d as i32; small.len()], action, vec![Elem::new(); small.len()])?;
    let algebra = square_zero(&ap, &module)?;
    let base_dim = big.len();
    let augmentation_is_algebra_map = augmentation_is_algebra_map(&algebra, base_dim);
    Ok(FormalSphere { d, n, p, algebra, base_dim, augmentation_is_algebra_map })
}

/// `[[0, I], [-I, 0]]` of size `2m`.
pub fn standard_symplectic(m: usize) -> Matrix {
    let entries = (0..m).flat_map(|i| [(i, m + i, q(1)), (m + i, i, q(-1))]);
    Matrix::from_triplets(2 * m, 2 * m, entries)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairingReport {
    pub d: usize,
    pub m: usize,
    pub n: u32,
    pub p: u32,
    #[serde(skip)]
    pub matrix: Matrix,
    pub size: usize,
    pub rank: usize,
    pub kernel_dim: usize,
    pub invertible: bool,
    pub same_degree_blocks_zero: bool,
    pub antisymmetric: bool,
    /// Cross block equals (residue pairing) (x) omega; only meaningful for `p = n`.
    pub cross_block_matches_residue: bool,
}

/// `<u (x) e_i, v (x) e_j> = omega_ij r_n((uv)_top)` on the formal sphere
/// tensored with a `2m`-dimensional symplectic space.
pub fn bubble_pairing(d: usize, m: usize, n: u32, p: u32, exact: &Exact) -> Result<PairingReport> {
    if m == 0 {
        return Err(Error::InvalidBounds("the symplectic target needs m >= 1".into()));
    }
    let sphere = formal_sphere(d, n, p)?;
    let alg = &sphere.algebra;
    let small = truncated_monomials(d, n);
    let omega = standard_symplectic(m);
    let top_residue = |i: usize, j: usize| {
        let mut r = q(0);
        for (k, c) in alg.basis_product(i, j) {
            if *k >= sphere.base_dim {
                r += c * residue(n, &small[k - sphere.base_dim]);
            }
        }
        r
    };
    let dim = alg.dim();
    let mut res_entries = Vec::new();
    for i in 0..dim {
        for j in 0..dim {
            let r = top_residue(i, j);
            if r != q(0) {
                res_entries.push((i, j, r));
            }
        }
    }
    let residues = Matrix::from_triplets(dim, dim, res_entries);
    let matrix = residues.kronecker(&omega);
    let size = matrix.nrows();
    let rk = rank(exact, &matrix)?;
    let low = sphere.base_dim * 2 * m;
    let same_degree_blocks_zero = matrix.triplets().all(|(r, c, _)| (r < low) != (c < low));
    let antisymmetric = matrix.add(&matrix.transpose()).is_zero();
    let cross_block_matches_residue = if p == n {
        let block = Matrix::from_triplets(low, size - low, matrix.triplets().filter(|(r, c, _)| *r < low && *c >= low).map(|(r, c, x)| (r, c - low, x.clone())));
        block == residue_pairing(n, d)?.kronecker(&omega)
    } else {
        false
    };
    let kernel_dim = kernel(&matrix).len();
    Ok(PairingReport {
        d,
        m,
        n,
        p,
        size,
        rank: rk,
        kernel_dim,
        invertible: rk == size,
        same_degree_blocks_zero,
        antisymmetric,
        cross_block_matches_residue,
        matrix,
    })
}

/// Monomials in the generators `a_alpha` of the loop window, with every
/// generator having a negative coordinate raised to a power below `m`,
/// counted per total degree `0..=cutoff`.
pub fn hilbert_series(d: usize, e: Subset, n: u32, p: u32, m: u32, cutoff: usize) -> Result<Vec<u64>> {
    if m == 0 {
        return Err(Error::InvalidBounds("nilpotency order must be at least 1".into()));
    }
    let gens = loop_window(d, e, n, p)?;
    let mut series = vec![0u64; cutoff + 1];
    series[0] = 1;
    for g in &gens {
        let bound = if g.iter().any(|a| *a < 0) { (m as usize - 1).min(cutoff) } else { cutoff };
        let mut next = vec![0u64; cutoff + 1];
        for (k, c) in series.iter().enumerate() {
            for j in 0..=bound.min(cutoff - k) {
                next[k + j] += c;
            }
        }
        series = next;
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ex() -> Exact {
        Exact::rational()
    }

    #[test]
    fn generator_counts() {
        assert_eq!(count_generators(2, 0b01, 1, 1).unwrap().count, 6);
        assert_eq!(count_generators(1, 0b1, 2, 0).unwrap().count, 3);
        for d in 1..=3 {
            for e in 0..(1u32 << d) {
                for n in 0..=3 {
                    for p in 0..=3 {
                        let c = count_generators(d, e, n, p).unwrap();
                        assert_eq!(c.count as u64, c.formula);
                    }
                }
            }
        }
        assert_eq!(count_generators(3, 0, 2, 2).unwrap().count, 27);
    }

    #[test]
    fn window_complex_dims() {
        let m = window_complex(3, 0b101, 2, 1).unwrap();
        assert_eq!(m.dims(), DimTable::from([(0, 2 * 2 * 2)]));
        assert_eq!(window_complex(2, 0, 5, 1).unwrap(), window_complex(2, 0, 0, 1).unwrap());
        assert_eq!(window_complex(2, 0b11, 2, 7).unwrap(), window_complex(2, 0b11, 2, 0).unwrap());
    }

    #[test]
    fn one_node_colimit() {
        let f = SubsetFamily::windows(1, 2, 1).unwrap();
        let r = subsets_colim_check(&f, ColimMode::NonemptyD, &ex()).unwrap();
        assert!(r.passes);
        assert_eq!(r.bar, DimTable::from([(0, 2)]));
    }

    #[test]
    fn constant_square_nonempty_mode() {
        let k = ChainComplex::concentrated(0, vec!["1"]);
        let f = SubsetFamily::new(2, (0..4).map(|m| (m, k.clone())).collect()).unwrap();
        let r = subsets_colim_check(&f, ColimMode::NonemptyD, &ex()).unwrap();
        assert_eq!(r.bar, DimTable::from([(-1, 1)]));
        assert!(r.passes);
    }

    #[test]
    fn random_families_in_both_modes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 1..=3 {
            for _ in 0..3 {
                let f = SubsetFamily::random(&mut rng, d, 2).unwrap();
                for mode in [ColimMode::NonemptyD, ColimMode::AllD] {
                    let r = subsets_colim_check(&f, mode, &ex()).unwrap();
                    assert!(r.passes, "{r:?}");
                }
            }
        }
    }

    #[test]
    fn loop_tangent_examples() {
        assert_eq!(loop_tangent(1, 2, 1, &ex()).unwrap().cohomology, DimTable::from([(0, 4)]));
        assert_eq!(loop_tangent(2, 1, 1, &ex()).unwrap().cohomology, DimTable::from([(0, 4), (-1, 1)]));
        assert_eq!(loop_tangent(2, 2, 1, &ex()).unwrap().cohomology, DimTable::from([(0, 4), (-1, 4)]));
    }

    #[test]
    fn bubble_fiber_examples() {
        let r = bubble_fiber_check(1, 1, 1, &ex()).unwrap();
        assert_eq!(r.cotangent, DimTable::from([(0, 2), (-1, 1)]));
        assert!(r.passes, "{r:?}");
        assert_eq!(bubble_fiber_check(2, 1, 1, &ex()).unwrap().cotangent, DimTable::from([(0, 4), (-2, 1)]));
        let r = bubble_fiber_check(2, 2, 2, &ex()).unwrap();
        assert_eq!(r.cotangent, DimTable::from([(0, 9), (-2, 4)]));
        assert_eq!(r.tangent, DimTable::from([(0, 9), (2, 4)]));
    }

    #[test]
    fn formal_sphere_dims() {
        assert_eq!(formal_sphere(1, 2, 2).unwrap().algebra.dim(), 4);
        assert_eq!(formal_sphere(2, 1, 1).unwrap().algebra.dim(), 2);
        let s = formal_sphere(1, 1, 3).unwrap();
        assert_eq!(s.algebra.dim(), 4);
        assert!(s.augmentation_is_algebra_map);
        // x . top = 0 because x vanishes in A_1
        assert!(s.algebra.basis_product(1, 3).is_empty());
        assert!(matches!(formal_sphere(1, 3, 2), Err(Error::InvalidBounds(_))));
    }

    #[test]
    fn pairing_small_cases() {
        let r = bubble_pairing(1, 1, 1, 1, &ex()).unwrap();
        assert_eq!(r.size, 4);
        assert!(r.invertible && r.same_degree_blocks_zero && r.antisymmetric && r.cross_block_matches_residue);
        let r = bubble_pairing(1, 1, 2, 2, &ex()).unwrap();
        assert_eq!(r.size, 8);
        assert!(r.invertible && r.cross_block_matches_residue);
    }

    #[test]
    fn mismatched_pairing_has_kernel() {
        let r = bubble_pairing(1, 1, 1, 2, &ex()).unwrap();
        assert!(!r.invertible);
        assert_eq!(r.kernel_dim, 2);
        assert!(r.antisymmetric && r.same_degree_blocks_zero);
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert_series(1, 0b1, 1, 1, 2, 2).unwrap(), vec![1, 3, 5]);
        assert_eq!(hilbert_series(1, 0b1, 2, 0, 2, 1).unwrap(), vec![1, 3]);
        for cutoff in 0..4 {
            assert_eq!(hilbert_series(2, 0b11, 2, 1, 1, cutoff).unwrap(), hilbert_series(2, 0, 2, 1, 1, cutoff).unwrap());
        }
    }
}
