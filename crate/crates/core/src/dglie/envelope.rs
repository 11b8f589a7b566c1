//! Independent CE homology oracle: `U(k[eta] (x) L) (x)_{U L} k` built as a
//! quotient of the truncated tensor algebra.

use std::collections::BTreeMap;

use serde::Serialize;

use super::assemble;
use super::lie::{lie_add, DgLieAlgebra, LieElem};
use super::pbw::{envelope_relations, TruncatedTensor, Word};
use crate::complex::{cohomology_dims, DimTable};
use crate::error::{Error, Result};
use crate::linalg::Echelon;
use crate::scalar::{q, sign, Exact, Rational, Rationals};

pub const ENVELOPE_MAX_WEIGHT: u32 = 6;

/// `k[eta] (x) L` with `|eta| = -1`: letters `x` followed by letters `eta x`.
pub fn shifted_envelope_algebra(lie: &DgLieAlgebra) -> Result<DgLieAlgebra> {
    lie.require_field_base("the envelope oracle")?;
    let n = lie.dim();
    let mut labels = lie.labels().to_vec();
    labels.extend(lie.labels().iter().map(|l| format!("eta.{l}")));
    let mut degrees = lie.degrees().to_vec();
    degrees.extend(lie.degrees().iter().map(|d| d - 1));
    let mut weights = lie.weights().to_vec();
    weights.extend_from_slice(lie.weights());
    let eta = |e: &LieElem, s: &Rational| -> LieElem { e.iter().map(|((a, k), c)| ((*a, k + n), c * s)).collect() };
    let mut diff: Vec<LieElem> = (0..n).map(|i| lie.basis_diff(i).clone()).collect();
    for i in 0..n {
        // d(eta x) = x - eta dx
        let mut e = eta(lie.basis_diff(i), &q(-1));
        lie_add(&mut e, (0, i), q(1));
        diff.push(e);
    }
    let mut bracket = BTreeMap::new();
    for ((i, j), e) in lie.brackets() {
        bracket.insert((*i, *j), e.clone());
        bracket.insert((*i, j + n), eta(e, &sign(lie.degree(*i) as i64)));
        bracket.insert((i + n, *j), eta(e, &q(1)));
    }
    let l = DgLieAlgebra::new(lie.base().clone(), labels, degrees, weights, diff, bracket)?;
    l.validate()?;
    Ok(l)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnvelopeReport {
    pub weight_cutoff: u32,
    pub quotient_dims: DimTable,
    pub cohomology: DimTable,
}

/// Cohomology of the weight-truncated quotient of `U(k[eta] (x) L)` by the
/// right ideal generated by `L`.
pub fn envelope_quotient_oracle(lie: &DgLieAlgebra, weight: u32, exact: &Exact) -> Result<EnvelopeReport> {
    if weight > ENVELOPE_MAX_WEIGHT {
        return Err(Error::WeightTooLarge { weight, bound: ENVELOPE_MAX_WEIGHT });
    }
    lie.validate()?;
    let big = shifted_envelope_algebra(lie)?;
    let n = lie.dim();
    let t = TruncatedTensor::new(big.weights(), weight)?;
    let field = Rationals;
    let mut ech = Echelon::new(&field, t.len());
    for (idx, w) in t.words.iter().enumerate() {
        if w.last().is_some_and(|last| *last < n) {
            ech.insert(&[(idx, q(1))]);
        }
    }
    for r in envelope_relations(&big, &t) {
        ech.insert(&r);
    }
    let normal: Vec<usize> = (0..t.len()).filter(|c| !ech.is_pivot(*c)).collect();
    let pos: BTreeMap<usize, usize> = normal.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let word_degree = |w: &Word| -> i32 { w.iter().map(|i| big.degree(*i)).sum() };
    let basis: Vec<(i32, String)> = normal
        .iter()
        .map(|c| {
            let w = &t.words[*c];
            let label = if w.is_empty() { "1".to_string() } else { w.iter().map(|i| big.labels()[*i].as_str()).collect::<Vec<_>>().join("|") };
            (word_degree(w), label)
        })
        .collect();
    let mut images = Vec::with_capacity(normal.len());
    for c in &normal {
        let w = &t.words[*c];
        let mut img: BTreeMap<usize, Rational> = BTreeMap::new();
        let mut prefix_deg = 0i64;
        for (i, letter) in w.iter().enumerate() {
            let s = sign(prefix_deg);
            for ((_, k), coef) in big.basis_diff(*letter) {
                let mut nw = w.clone();
                nw[i] = *k;
                let idx = t.index.get(&nw).copied().ok_or_else(|| {
                    Error::InvalidBounds("the differential raises weight; the truncation is not a subcomplex".into())
                })?;
                *img.entry(idx).or_insert_with(|| q(0)) += &s * coef;
            }
            prefix_deg += big.degree(*letter) as i64;
        }
        let v: Vec<(usize, Rational)> = img.into_iter().filter(|(_, x)| *x != q(0)).collect();
        let (res, _) = ech.reduce(&v);
        images.push(res.into_iter().map(|(col, x)| (pos[&col], x)).collect());
    }
    let complex = assemble(&basis, &images)?;
    Ok(EnvelopeReport { weight_cutoff: weight, quotient_dims: complex.dims(), cohomology: cohomology_dims(&complex, exact)? })
}

#[cfg(test)]
mod tests {
    use super::super::ce::ce_homology;
    use super::super::free::free_lie;
    use super::*;
    use crate::complex::GradedVectorSpace;

    fn agree(l: &DgLieAlgebra, w: u32) {
        let ex = Exact::rational();
        let oracle = envelope_quotient_oracle(l, w, &ex).unwrap();
        let ce = ce_homology(l, w, &ex).unwrap();
        assert_eq!(oracle.cohomology, ce.total);
        assert_eq!(oracle.quotient_dims, ce.chain_dims);
    }

    #[test]
    fn abelian_line() {
        for w in 1..=4 {
            agree(&DgLieAlgebra::abelian(&[0]), w);
            agree(&DgLieAlgebra::abelian(&[1]), w);
        }
    }

    #[test]
    fn sl2_weight_three() {
        agree(&DgLieAlgebra::sl2(), 3);
    }

    #[test]
    fn free_lie_on_one_and_two_generators() {
        let mut v = GradedVectorSpace::new();
        v.push(0, "a".into()).unwrap();
        agree(&free_lie(&v, 3).unwrap().algebra, 3);
        v.push(1, "b".into()).unwrap();
        agree(&free_lie(&v, 3).unwrap().algebra, 3);
    }

    #[test]
    fn internal_differential() {
        // d y = x with x, y in degrees 1, 0: contractible
        let l = DgLieAlgebra::over_field(vec!["x".into(), "y".into()], vec![1, 0], None, &[(1, 0, q(1))], &[]).unwrap();
        agree(&l, 3);
    }
}
