//! Truncated universal enveloping algebras and the PBW symmetrization map.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use super::lie::DgLieAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{convert_vec, Echelon, Matrix, SparseVec};
use crate::scalar::{q, sign, Exact, Field, FieldKind, PrimeField, Rational, Rationals};

pub(crate) type Word = Vec<usize>;

/// All words in letters of the given positive weights, of total weight at
/// most `cutoff`, ordered by length then lexicographically.
pub(crate) struct TruncatedTensor {
    pub words: Vec<Word>,
    pub index: BTreeMap<Word, usize>,
    weights: Vec<u32>,
    cutoff: u32,
}

impl TruncatedTensor {
    pub fn new(weights: &[u32], cutoff: u32) -> Result<Self> {
        if weights.contains(&0) {
            return Err(Error::InvalidBounds("tensor truncation needs positive weights".into()));
        }
        let mut words = vec![Word::new()];
        let mut frontier = vec![(Word::new(), 0u32)];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for (w, wt) in frontier {
                for (i, li) in weights.iter().enumerate() {
                    if wt + li <= cutoff {
                        let mut nw = w.clone();
                        nw.push(i);
                        words.push(nw.clone());
                        next.push((nw, wt + li));
                    }
                }
            }
            frontier = next;
        }
        words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        Ok(Self { words, index, weights: weights.to_vec(), cutoff })
    }

    pub fn weight(&self, w: &[usize]) -> u32 {
        w.iter().map(|i| self.weights[*i]).sum()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    /// Words `a` and `b` with `weight(a) + extra + weight(b) <= cutoff`.
    pub fn flanks(&self, extra: u32) -> Vec<(&Word, &Word)> {
        let mut out = Vec::new();
        for a in &self.words {
            let wa = self.weight(a);
            if wa + extra > self.cutoff {
                continue;
            }
            for b in &self.words {
                if wa + extra + self.weight(b) <= self.cutoff {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn sparse(&self, e: &BTreeMap<Word, Rational>) -> SparseVec<Rational> {
        let mut v: SparseVec<Rational> =
            e.iter().filter(|(_, c)| !c.is_zero()).map(|(w, c)| (self.index[w], c.clone())).collect();
        v.sort_by_key(|(i, _)| *i);
        v
    }
}

fn add(acc: &mut BTreeMap<Word, Rational>, w: Word, c: Rational) {
    let slot = acc.entry(w).or_insert_with(Rational::zero);
    *slot += c;
}

/// Spanning vectors of the two-sided relations `x y - (-1)^{|x||y|} y x - [x, y]`
/// up to the truncation weight.
pub(crate) fn envelope_relations(lie: &DgLieAlgebra, t: &TruncatedTensor) -> Vec<SparseVec<Rational>> {
    let mut out = Vec::new();
    for x in 0..lie.dim() {
        for y in x..lie.dim() {
            let flanks = t.flanks(lie.weight(x) + lie.weight(y));
            let s = sign((lie.degree(x) * lie.degree(y)) as i64);
            for (a, b) in flanks {
                let mut e = BTreeMap::new();
                let wrap = |mid: &[usize]| -> Word { a.iter().chain(mid).chain(b.iter()).copied().collect() };
                add(&mut e, wrap(&[x, y]), q(1));
                add(&mut e, wrap(&[y, x]), -s.clone());
                if let Some(br) = lie.basis_bracket(x, y) {
                    for ((_, k), c) in br {
                        add(&mut e, wrap(&[*k]), -c.clone());
                    }
                }
                let v = t.sparse(&e);
                if !v.is_empty() {
                    out.push(v);
                }
            }
        }
    }
    out
}

/// Koszul sign of listing `letters` in the order `perm`.
fn koszul_sign(lie: &DgLieAlgebra, letters: &[usize], perm: &[usize]) -> Rational {
    let mut odd_inversions = 0i64;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] && lie.degree(letters[perm[i]]) % 2 != 0 && lie.degree(letters[perm[j]]) % 2 != 0 {
                odd_inversions += 1;
            }
        }
    }
    sign(odd_inversions)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut np = p.clone();
            np.insert(pos, n - 1);
            out.push(np);
        }
    }
    out
}

/// Sorted multisets of basis letters (odd letters at most once) of weight
/// at most `cutoff`.
pub(crate) fn sym_words(lie: &DgLieAlgebra, cutoff: u32) -> Vec<Word> {
    let mut out = Vec::new();
    let mut stack = vec![(0usize, Word::new(), 0u32)];
    while let Some((start, w, wt)) = stack.pop() {
        out.push(w.clone());
        for i in start..lie.dim() {
            if wt + lie.weight(i) > cutoff {
                continue;
            }
            let odd = lie.degree(i) % 2 != 0;
            let mut nw = w.clone();
            nw.push(i);
            stack.push((if odd { i + 1 } else { i }, nw, wt + lie.weight(i)));
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PbwLevel {
    pub weight: u32,
    pub sym_dim: usize,
    pub envelope_dim: usize,
    pub rank: usize,
    pub invertible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PbwCertificate {
    pub levels: Vec<PbwLevel>,
    /// Symmetrization at the top level, columns indexed by symmetric words and
    /// rows by the normal-form basis of the truncated envelope.
    #[serde(skip)]
    pub matrix: Matrix,
    pub invertible: bool,
}

fn level<F: Field>(f: &F, lie: &DgLieAlgebra, w: u32) -> Result<(PbwLevel, Matrix)> {
    let t = TruncatedTensor::new(lie.weights(), w)?;
    let mut ech = Echelon::new(f, t.len());
    for r in envelope_relations(lie, &t) {
        ech.insert(&convert_vec(f, &r)?);
    }
    let normal: Vec<usize> = (0..t.len()).filter(|c| !ech.is_pivot(*c)).collect();
    let row_of: BTreeMap<usize, usize> = normal.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let syms = sym_words(lie, w);
    let mut entries = Vec::new();
    for (col, s) in syms.iter().enumerate() {
        let perms = permutations(s.len());
        let norm = Rational::from_integer((1..=s.len() as i64).product::<i64>().into()).recip();
        let mut e = BTreeMap::new();
        for p in &perms {
            let word: Word = p.iter().map(|i| s[*i]).collect();
            add(&mut e, word, koszul_sign(lie, s, p) * &norm);
        }
        let (res, _) = ech.reduce(&convert_vec(f, &t.sparse(&e))?);
        for (c, x) in res {
            entries.push((row_of[&c], col, f.to_rational(&x)));
        }
    }
    let m = Matrix::from_triplets(normal.len(), syms.len(), entries);
    let rank = {
        let mut e = Echelon::new(f, normal.len());
        for c in m.columns() {
            e.insert(&convert_vec(f, &c)?);
        }
        e.rank()
    };
    let invertible = rank == normal.len() && rank == syms.len();
    Ok((PbwLevel { weight: w, sym_dim: syms.len(), envelope_dim: normal.len(), rank, invertible }, m))
}

/// Builds `U^{<=w} L` by row reduction and checks that symmetrization
/// `Sym^{<=v} L -> U^{<=v} L` is bijective for every `v <= w`.
pub fn pbw_symmetrize(lie: &DgLieAlgebra, weight: u32, exact: &Exact) -> Result<PbwCertificate> {
    lie.require_field_base("PBW symmetrization")?;
    lie.validate()?;
    if let FieldKind::Prime(p) = exact.field {
        if p <= weight as u64 {
            return Err(Error::CharDivision { prime: p, detail: format!("symmetrization up to weight {weight} divides by {p}") });
        }
    }
    let mut levels = Vec::new();
    let mut top = Matrix::zeros(0, 0);
    for w in 0..=weight {
        let (lvl, m) = match exact.field {
            FieldKind::Rational => level(&Rationals, lie, w)?,
            FieldKind::Prime(p) => level(&PrimeField::new(p)?, lie, w)?,
        };
        levels.push(lvl);
        top = m;
    }
    let invertible = levels.iter().all(|l| l.invertible);
    Ok(PbwCertificate { levels, matrix: top, invertible })
}

#[cfg(test)]
mod tests {
    use super::super::free::free_lie;
    use super::*;
    use crate::complex::GradedVectorSpace;

    #[test]
    fn sl2_weight_two() {
        let c = pbw_symmetrize(&DgLieAlgebra::sl2(), 2, &Exact::rational()).unwrap();
        let top = c.levels.last().unwrap();
        assert_eq!((top.sym_dim, top.envelope_dim), (10, 10));
        assert!(c.invertible);
    }

    #[test]
    fn abelian_is_identity() {
        let l = DgLieAlgebra::abelian(&[0, 1]);
        let c = pbw_symmetrize(&l, 3, &Exact::rational()).unwrap();
        assert!(c.invertible);
        assert!(c.matrix.columns().iter().all(|col| !col.is_empty()));
    }

    #[test]
    fn free_lie_weight_three() {
        let mut v = GradedVectorSpace::new();
        v.push(0, "a".into()).unwrap();
        v.push(0, "b".into()).unwrap();
        let l = free_lie(&v, 3).unwrap().algebra;
        let c = pbw_symmetrize(&l, 3, &Exact::rational()).unwrap();
        let top = c.levels.last().unwrap();
        assert_eq!(top.envelope_dim, 15);
        assert_eq!(top.sym_dim, 15);
        assert!(c.invertible);
    }

    #[test]
    fn small_characteristic_rejected() {
        let err = pbw_symmetrize(&DgLieAlgebra::sl2(), 3, &Exact::prime(3).unwrap()).unwrap_err();
        assert!(matches!(err, Error::CharDivision { prime: 3, .. }));
        assert!(pbw_symmetrize(&DgLieAlgebra::sl2(), 3, &Exact::prime(5).unwrap()).unwrap().invertible);
    }
}
