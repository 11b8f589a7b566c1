//! Chevalley–Eilenberg chains `Sym_A(L[1])`, truncated by word weight.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lie::{lie_add, DgLieAlgebra, LieElem, Representation};
use super::assemble;
use crate::complex::{cohomology_dims, ChainComplex, DimTable};
use crate::error::{Error, Result};
use crate::scalar::{q, sign, Exact, Rational};

type Word = Vec<usize>;
type Chain = BTreeMap<(usize, Word), Rational>;

/// Sign family used for the bracket part of the differential.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BracketSign {
    /// `(-1)^{T_ij + |c|}`; fails `d^2 = 0` once odd letters meet.
    Plain,
    /// `(-1)^{T_ij + |x_i| + |c|}`.
    #[default]
    WithFirstDegree,
}

fn shifted_odd(lie: &DgLieAlgebra, i: usize) -> bool {
    (lie.degree(i) - 1).rem_euclid(2) == 1
}

/// Sorts a word of `L[1]` letters with Koszul signs; `None` if an odd
/// letter repeats.
fn canonicalize(lie: &DgLieAlgebra, mut w: Word) -> Option<(Rational, Word)> {
    let mut odd_swaps = 0usize;
    for i in 1..w.len() {
        let mut j = i;
        while j > 0 && w[j - 1] > w[j] {
            if shifted_odd(lie, w[j - 1]) && shifted_odd(lie, w[j]) {
                odd_swaps += 1;
            }
            w.swap(j - 1, j);
            j -= 1;
        }
    }
    if w.windows(2).any(|p| p[0] == p[1] && shifted_odd(lie, p[0])) {
        return None;
    }
    Some((sign(odd_swaps as i64), w))
}

fn chain_add(acc: &mut Chain, key: (usize, Word), c: Rational) {
    if c.is_zero() {
        return;
    }
    let slot = acc.entry(key.clone()).or_insert_with(Rational::zero);
    *slot += c;
    if slot.is_zero() {
        acc.remove(&key);
    }
}

/// `D(eta x_1 ... eta x_k)` with coefficients pulled to the front.
fn word_differential(lie: &DgLieAlgebra, w: &[usize], family: BracketSign) -> Chain {
    let base = lie.base();
    let mut out = Chain::new();
    let deg = |i: usize| lie.degree(w[i]) as i64;
    let s: Vec<i64> = (0..w.len()).map(|i| i as i64 + (0..i).map(deg).sum::<i64>()).collect();
    for i in 0..w.len() {
        for ((da, k), c) in lie.basis_diff(w[i]) {
            let dd = base.degree(*da) as i64;
            let coef = -sign(s[i]) * sign(dd * (1 + s[i])) * c;
            let mut nw = w.to_vec();
            nw[i] = *k;
            if let Some((sg, cw)) = canonicalize(lie, nw) {
                chain_add(&mut out, (*da, cw), coef * sg);
            }
        }
    }
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            let Some(br) = lie.basis_bracket(w[i], w[j]) else { continue };
            let (pi, pj) = (deg(i) - 1, deg(j) - 1);
            let mut t = pi * s[i] + pj * s[j] + pi * pj;
            if family == BracketSign::WithFirstDegree {
                t += deg(i);
            }
            let rest: Vec<usize> = (0..w.len()).filter(|&m| m != i && m != j).map(|m| w[m]).collect();
            for ((ca, k), c) in br {
                let coef = sign(t + base.degree(*ca) as i64) * c;
                let mut nw = vec![*k];
                nw.extend(&rest);
                if let Some((sg, cw)) = canonicalize(lie, nw) {
                    chain_add(&mut out, (*ca, cw), coef * sg);
                }
            }
        }
    }
    out
}

/// Words of total weight at most `cutoff` in which exactly `marked_count`
/// letters come from `marked` (marked letters carry no weight).
fn enumerate_words(lie: &DgLieAlgebra, cutoff: u32, marked: &BTreeSet<usize>, marked_count: usize) -> Result<Vec<Word>> {
    if let Some(i) = (0..lie.dim()).find(|i| lie.weight(*i) == 0 && !marked.contains(i)) {
        return Err(Error::InvalidBounds(format!("{} has weight 0; weights must be positive", lie.labels()[i])));
    }
    let mut out = Vec::new();
    let mut stack = vec![(0usize, Word::new(), 0u32, 0usize)];
    while let Some((start, w, wt, mc)) = stack.pop() {
        if mc == marked_count {
            out.push(w.clone());
        }
        for i in start..lie.dim() {
            let is_marked = marked.contains(&i);
            let nwt = wt + if is_marked { 0 } else { lie.weight(i) };
            let nmc = mc + usize::from(is_marked);
            if nwt > cutoff || nmc > marked_count {
                continue;
            }
            if shifted_odd(lie, i) && w.last() == Some(&i) {
                continue;
            }
            let next = if shifted_odd(lie, i) { i + 1 } else { i };
            let mut nw = w.clone();
            nw.push(i);
            stack.push((next, nw, nwt, nmc));
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

fn word_label(lie: &DgLieAlgebra, a: usize, w: &[usize]) -> String {
    let letters: Vec<&str> = w.iter().map(|i| lie.labels()[*i].as_str()).collect();
    let body = if letters.is_empty() { "1".to_string() } else { letters.join(".") };
    if a == lie.base().unit() {
        body
    } else {
        format!("{}*{body}", lie.base().labels()[a])
    }
}

/// The truncated CE chain complex, split by weight when the structure is
/// weight-homogeneous.
#[derive(Clone, Debug)]
pub struct CeComplex {
    pub weight_cutoff: u32,
    pub homogeneous: bool,
    /// `(weight, complex)`; a single entry keyed by the cutoff otherwise.
    pub pieces: Vec<(u32, ChainComplex)>,
}

impl CeComplex {
    pub fn dims(&self) -> DimTable {
        let mut out = DimTable::new();
        for (_, c) in &self.pieces {
            for (n, d) in c.dims() {
                *out.entry(n).or_default() += d;
            }
        }
        out
    }
}

fn build(lie: &DgLieAlgebra, cutoff: u32, marked: &BTreeSet<usize>, marked_count: usize, family: BracketSign) -> Result<CeComplex> {
    if !lie.is_weight_filtered() {
        return Err(Error::InvalidBounds("the bracket or differential raises weight; truncations are not subcomplexes".into()));
    }
    let base = lie.base();
    let words = enumerate_words(lie, cutoff, marked, marked_count)?;
    let weight_of = |w: &Word| -> u32 { w.iter().filter(|i| !marked.contains(i)).map(|i| lie.weight(*i)).sum() };
    let homogeneous = lie.is_weight_homogeneous();
    let mut groups: BTreeMap<u32, Vec<(usize, Word)>> = BTreeMap::new();
    for w in &words {
        let key = if homogeneous { weight_of(w) } else { cutoff };
        for a in 0..base.dim() {
            groups.entry(key).or_default().push((a, w.clone()));
        }
    }
    let pieces = groups
        .into_par_iter()
        .map(|(weight, elems)| {
            let index: BTreeMap<&(usize, Word), usize> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
            let basis: Vec<(i32, String)> = elems
                .iter()
                .map(|(a, w)| {
                    let deg = base.degree(*a) + w.iter().map(|i| lie.degree(*i) - 1).sum::<i32>();
                    (deg, word_label(lie, *a, w))
                })
                .collect();
            let mut images = Vec::with_capacity(elems.len());
            for (a, w) in &elems {
                let mut img = Chain::new();
                for (da, c) in base.basis_diff(*a) {
                    chain_add(&mut img, (*da, w.clone()), c.clone());
                }
                let s = sign(base.degree(*a) as i64);
                for ((b, nw), c) in word_differential(lie, w, family) {
                    for (m, cm) in base.basis_product(*a, b) {
                        chain_add(&mut img, (*m, nw.clone()), &s * &c * cm);
                    }
                }
                let mut row = Vec::with_capacity(img.len());
                for (key, c) in img {
                    let Some(&i) = index.get(&key) else {
                        return Err(Error::InvalidBounds(format!(
                            "differential of {} leaves the truncation",
                            word_label(lie, *a, w)
                        )));
                    };
                    row.push((i, c));
                }
                images.push(row);
            }
            Ok((weight, assemble(&basis, &images)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CeComplex { weight_cutoff: cutoff, homogeneous, pieces })
}

/// CE chains with an explicit bracket sign family.
pub fn ce_complex_with(lie: &DgLieAlgebra, cutoff: u32, family: BracketSign) -> Result<CeComplex> {
    build(lie, cutoff, &BTreeSet::new(), 0, family)
}

/// The CE chains `Sym_A(L[1])` up to total weight `cutoff`. Fails with
/// `InvalidComplex` if the assembled differential does not square to zero.
pub fn ce_complex(lie: &DgLieAlgebra, cutoff: u32) -> Result<CeComplex> {
    ce_complex_with(lie, cutoff, BracketSign::WithFirstDegree)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CeTable {
    pub weight_cutoff: u32,
    pub homogeneous: bool,
    pub chain_dims: DimTable,
    /// Per weight; empty unless the algebra is weight-homogeneous.
    pub by_weight: BTreeMap<u32, DimTable>,
    pub total: DimTable,
}

fn table(c: &CeComplex, exact: &Exact, dualize: bool) -> Result<CeTable> {
    let per: Vec<(u32, DimTable)> = c
        .pieces
        .par_iter()
        .map(|(w, piece)| {
            let dims = if dualize { cohomology_dims(&piece.dual(), exact)? } else { cohomology_dims(piece, exact)? };
            Ok((*w, dims))
        })
        .collect::<Result<_>>()?;
    let mut total = DimTable::new();
    for (_, t) in &per {
        for (n, d) in t {
            *total.entry(*n).or_default() += d;
        }
    }
    let chain_dims = if dualize { reflect(&c.dims()) } else { c.dims() };
    Ok(CeTable {
        weight_cutoff: c.weight_cutoff,
        homogeneous: c.homogeneous,
        chain_dims,
        by_weight: if c.homogeneous { per.into_iter().collect() } else { BTreeMap::new() },
        total,
    })
}

fn reflect(t: &DimTable) -> DimTable {
    t.iter().map(|(n, d)| (-n, *d)).collect()
}

/// CE homology, in cohomological degrees (a word of length `k` in degree-0
/// letters sits in degree `-k`).
pub fn ce_homology(lie: &DgLieAlgebra, cutoff: u32, exact: &Exact) -> Result<CeTable> {
    lie.validate()?;
    table(&ce_complex(lie, cutoff)?, exact, false)
}

/// The Lie algebra `L x| M^v[-1]` whose CE chains, linear in the second
/// summand, are the chains of `L` with coefficients in `M^v`.
fn coefficient_algebra(lie: &DgLieAlgebra, rep: &Representation) -> Result<(DgLieAlgebra, BTreeSet<usize>)> {
    rep.validate(lie)?;
    let n = lie.dim();
    let m = rep.dim();
    let mut labels = lie.labels().to_vec();
    labels.extend(rep.labels.iter().map(|l| format!("{l}*")));
    let phi_deg: Vec<i32> = rep.degrees.iter().map(|d| -d).collect();
    let mut degrees = lie.degrees().to_vec();
    degrees.extend(phi_deg.iter().map(|d| d + 1));
    let mut weights = lie.weights().to_vec();
    weights.extend(std::iter::repeat_n(0, m));
    let mut diff: Vec<LieElem> = (0..n).map(|i| lie.basis_diff(i).clone()).collect();
    for j in 0..m {
        // d' = -(dual d) on the shifted dual
        let mut e = LieElem::new();
        for jp in 0..m {
            let c = rep.diff.get(j, jp);
            lie_add(&mut e, (0, n + jp), sign(phi_deg[j] as i64) * c);
        }
        diff.push(e);
    }
    let mut bracket = lie.brackets().clone();
    for x in 0..n {
        for j in 0..m {
            let mut e = LieElem::new();
            for jp in 0..m {
                let c = rep.action[x].get(j, jp);
                let s = -sign((lie.degree(x) * phi_deg[j]) as i64) * sign(lie.degree(x) as i64);
                lie_add(&mut e, (0, n + jp), s * c);
            }
            if !e.is_empty() {
                bracket.insert((x, n + j), e);
            }
        }
    }
    let ext = DgLieAlgebra::new(lie.base().clone(), labels, degrees, weights, diff, bracket)?;
    ext.validate().map_err(|e| Error::NotARepresentation(format!("the semidirect product is not a dg-Lie algebra: {e}")))?;
    Ok((ext, (n..n + m).collect()))
}

/// CE cohomology with coefficients (trivial one-dimensional when `None`),
/// computed as the dual of the chains with coefficients in the dual module.
pub fn ce_cohomology(lie: &DgLieAlgebra, cutoff: u32, coefficients: Option<&Representation>, exact: &Exact) -> Result<CeTable> {
    lie.require_field_base("CE cohomology")?;
    lie.validate()?;
    let trivial;
    let rep = match coefficients {
        Some(r) => r,
        None => {
            trivial = Representation::trivial(lie, vec!["1".into()], vec![0]);
            &trivial
        }
    };
    let (ext, marked) = coefficient_algebra(lie, rep)?;
    let c = build(&ext, cutoff, &marked, 1, BracketSign::WithFirstDegree)?;
    table(&c, exact, true)
}

/// Expected dims of `k (+) V^v[-1]` for the free Lie algebra on generators
/// in the given degrees.
pub fn free_cohomology_expected(generator_degrees: &[i32]) -> DimTable {
    let mut t = DimTable::from([(0, 1)]);
    for d in generator_degrees {
        *t.entry(1 - d).or_default() += 1;
    }
    t
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoderivationReport {
    pub words_checked: usize,
    pub generators_primitive: bool,
    pub holds: bool,
    pub witness: Option<String>,
}

type Tensor2 = BTreeMap<(Word, Word), Rational>;

fn shifted_deg(lie: &DgLieAlgebra, w: &[usize]) -> i64 {
    w.iter().map(|i| lie.degree(*i) as i64 - 1).sum()
}

/// Unshuffle coproduct of a canonical word, both factors canonicalized.
fn coproduct(lie: &DgLieAlgebra, w: &[usize]) -> Tensor2 {
    let mut out = Tensor2::new();
    for mask in 0u32..(1 << w.len()) {
        let (mut left, mut right) = (Word::new(), Word::new());
        let mut odd_swaps = 0i64;
        for (pos, &x) in w.iter().enumerate() {
            if mask & (1 << pos) != 0 {
                if shifted_odd(lie, x) {
                    odd_swaps += right.iter().filter(|y| shifted_odd(lie, **y)).count() as i64;
                }
                left.push(x);
            } else {
                right.push(x);
            }
        }
        let key = (left, right);
        let slot = out.entry(key.clone()).or_insert_with(Rational::zero);
        *slot += sign(odd_swaps);
        if slot.is_zero() {
            out.remove(&key);
        }
    }
    out
}

fn t2_add(acc: &mut Tensor2, key: (Word, Word), c: Rational) {
    if c.is_zero() {
        return;
    }
    let slot = acc.entry(key.clone()).or_insert_with(Rational::zero);
    *slot += c;
    if slot.is_zero() {
        acc.remove(&key);
    }
}

/// Checks `Delta D = (D (x) 1 + 1 (x) D) Delta` on every canonical word of
/// length at most `max_len` and weight at most `cutoff`, and that letters
/// are primitive.
pub fn coderivation_check(lie: &DgLieAlgebra, cutoff: u32, max_len: usize) -> Result<CoderivationReport> {
    lie.require_field_base("the coderivation check")?;
    let words: Vec<Word> = enumerate_words(lie, cutoff, &BTreeSet::new(), 0)?.into_iter().filter(|w| w.len() <= max_len).collect();
    let dw = |w: &[usize]| -> BTreeMap<Word, Rational> {
        word_differential(lie, w, BracketSign::WithFirstDegree).into_iter().map(|((_, w), c)| (w, c)).collect()
    };
    let generators_primitive = (0..lie.dim()).all(|i| {
        let delta = coproduct(lie, &[i]);
        delta == Tensor2::from([((vec![i], vec![]), q(1)), ((vec![], vec![i]), q(1))])
    });
    for w in &words {
        let mut lhs = Tensor2::new();
        for (nw, c) in dw(w) {
            for (key, c2) in coproduct(lie, &nw) {
                t2_add(&mut lhs, key, &c * c2);
            }
        }
        let mut rhs = Tensor2::new();
        for ((u, v), c) in coproduct(lie, w) {
            for (du, c2) in dw(&u) {
                t2_add(&mut rhs, (du, v.clone()), &c * c2);
            }
            let s = sign(shifted_deg(lie, &u));
            for (dv, c2) in dw(&v) {
                t2_add(&mut rhs, (u.clone(), dv), &c * &s * c2);
            }
        }
        if lhs != rhs {
            return Ok(CoderivationReport {
                words_checked: words.len(),
                generators_primitive,
                holds: false,
                witness: Some(word_label(lie, lie.base().unit(), w)),
            });
        }
    }
    Ok(CoderivationReport { words_checked: words.len(), generators_primitive, holds: generators_primitive, witness: None })
}

#[cfg(test)]
mod tests {
    use super::super::cdga::{square_zero, BaseCdga, CdgaModule, Elem};
    use super::super::free::free_lie;
    use super::*;
    use crate::complex::GradedVectorSpace;

    fn ex() -> Exact {
        Exact::rational()
    }

    #[test]
    fn sl2_homology() {
        let t = ce_homology(&DgLieAlgebra::sl2(), 3, &ex()).unwrap();
        assert_eq!(t.total, DimTable::from([(0, 1), (-3, 1)]));
        assert_eq!(t.chain_dims, DimTable::from([(0, 1), (-1, 3), (-2, 3), (-3, 1)]));
    }

    #[test]
    fn sl2_cohomology_trivial_and_adjoint() {
        let l = DgLieAlgebra::sl2();
        let t = ce_cohomology(&l, 3, None, &ex()).unwrap();
        assert_eq!(t.total, DimTable::from([(0, 1), (3, 1)]));
        let adj = Representation::adjoint(&l);
        let t = ce_cohomology(&l, 3, Some(&adj), &ex()).unwrap();
        assert!(t.total.is_empty(), "{:?}", t.total);
    }

    #[test]
    fn odd_abelian_line_is_polynomial() {
        let l = DgLieAlgebra::abelian(&[1]);
        let t = ce_homology(&l, 4, &ex()).unwrap();
        assert!(t.homogeneous);
        for w in 0..=4 {
            assert_eq!(t.by_weight[&w], DimTable::from([(0, 1)]));
        }
    }

    #[test]
    fn abelian_cohomology_reflects_homology() {
        let l = DgLieAlgebra::abelian(&[1, 1]);
        let h = ce_homology(&l, 3, &ex()).unwrap();
        let c = ce_cohomology(&l, 3, None, &ex()).unwrap();
        assert_eq!(c.total, reflect(&h.total));
        assert_eq!(c.by_weight[&3], DimTable::from([(0, 4)]));
    }

    fn free_on(degrees: &[i32], weight: u32) -> DgLieAlgebra {
        let labels: Vec<String> = (0..degrees.len()).map(|i| format!("v{}", i + 1)).collect();
        let mut v = GradedVectorSpace::new();
        for (l, d) in labels.iter().zip(degrees) {
            v.push(*d, l.clone()).unwrap();
        }
        free_lie(&v, weight).unwrap().algebra
    }

    #[test]
    fn sign_family_decided_by_d_squared() {
        let all = [vec![0, 0], vec![1, 1], vec![0, 1], vec![2, 1], vec![1], vec![2, 2], vec![-1, 0]];
        for degrees in &all {
            let l = free_on(degrees, 4);
            assert!(ce_complex_with(&l, 4, BracketSign::WithFirstDegree).is_ok(), "{degrees:?}");
        }
        for degrees in [vec![1, 1], vec![2, 1], vec![-1, 0]] {
            let err = ce_complex_with(&free_on(&degrees, 4), 4, BracketSign::Plain).unwrap_err();
            assert!(matches!(err, Error::InvalidComplex(_)), "{degrees:?}");
        }
        for degrees in [vec![0, 0], vec![0, 1], vec![2, 2]] {
            assert!(ce_complex_with(&free_on(&degrees, 4), 4, BracketSign::Plain).is_ok(), "{degrees:?}");
        }
    }

    #[test]
    fn free_lie_homology_is_generators_shifted() {
        for degrees in [vec![0], vec![0, 0], vec![1, 0], vec![1, 1]] {
            let l = free_on(&degrees, 4);
            let t = ce_homology(&l, 4, &ex()).unwrap();
            let mut expected = DimTable::from([(0, 1)]);
            for d in &degrees {
                *expected.entry(d - 1).or_default() += 1;
            }
            assert_eq!(t.total, expected, "{degrees:?}");
            let c = ce_cohomology(&l, 4, None, &ex()).unwrap();
            assert_eq!(c.total, free_cohomology_expected(&degrees), "{degrees:?}");
        }
    }

    #[test]
    fn coderivation_on_short_words() {
        for l in [DgLieAlgebra::sl2(), free_on(&[1, 0], 3), DgLieAlgebra::abelian(&[1, 2])] {
            let r = coderivation_check(&l, 3, 3).unwrap();
            assert!(r.holds, "{r:?}");
        }
    }

    fn elem(pairs: &[(usize, i64)]) -> Elem {
        pairs.iter().map(|(k, c)| (*k, q(*c))).collect()
    }

    /// `1, s, t` with `|s| = -1`, `|t| = 0`, `ds = t`, all products of `s, t` zero.
    fn acyclic_base() -> BaseCdga {
        let labels = ["1", "s", "t"].map(String::from).to_vec();
        let mut mult = vec![vec![Elem::new(); 3]; 3];
        for i in 0..3 {
            mult[0][i] = elem(&[(i, 1)]);
            mult[i][0] = elem(&[(i, 1)]);
        }
        BaseCdga::new(labels, vec![0, -1, 0], 0, mult, vec![Elem::new(), elem(&[(2, 1)]), Elem::new()]).unwrap()
    }

    #[test]
    fn base_coefficients_square_to_zero() {
        // sl2 over A
        let sl2 = DgLieAlgebra::sl2();
        let a = acyclic_base();
        let l = DgLieAlgebra::new(
            a.clone(),
            sl2.labels().to_vec(),
            sl2.degrees().to_vec(),
            vec![1; 3],
            vec![LieElem::new(); 3],
            sl2.brackets().clone(),
        )
        .unwrap();
        l.validate().unwrap();
        let c = ce_complex(&l, 3).unwrap();
        assert_eq!(c.dims().values().sum::<usize>(), 3 * 8);
        // A is quasi-isomorphic to k.
        assert_eq!(ce_homology(&l, 3, &ex()).unwrap().total, DimTable::from([(0, 1), (-3, 1)]));

        // Odd letters with a coefficient u of degree -1, u^2 = 0: x, z, y in degrees 0, 1, 2.
        let u = CdgaModule::new(&BaseCdga::field(), vec!["u".into()], vec![-1], vec![vec![elem(&[(0, 1)])]], vec![Elem::new()]).unwrap();
        let a = square_zero(&BaseCdga::field(), &u).unwrap();
        let mut bracket = BTreeMap::new();
        bracket.insert((0, 1), LieElem::from([((1, 2), q(1))]));
        let mut diff = vec![LieElem::new(); 3];
        diff[0] = LieElem::from([((1, 2), q(1))]);
        let l = DgLieAlgebra::new(a, ["x", "z", "y"].map(String::from).to_vec(), vec![0, 1, 2], vec![1; 3], diff, bracket).unwrap();
        l.validate().unwrap();
        ce_complex(&l, 4).unwrap();
    }
}
