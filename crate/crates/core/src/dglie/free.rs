//! Free graded Lie algebras, realized by iterated commutators in the tensor
//! algebra and truncated by bracket weight.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::lie::DgLieAlgebra;
use crate::complex::GradedVectorSpace;
use crate::error::{Error, Result};
use crate::linalg::Echelon;
use crate::scalar::{sign, Rational, Rationals};

pub const DEFAULT_MAX_WEIGHT: u32 = 8;

type TensorElem = BTreeMap<Vec<usize>, Rational>;

#[derive(Clone, Debug)]
pub struct FreeLie {
    pub algebra: DgLieAlgebra,
    /// Each basis element as a commutator polynomial in the generators.
    pub expressions: Vec<TensorElem>,
    /// `weight -> degree -> dim`.
    pub dims: BTreeMap<u32, BTreeMap<i32, usize>>,
}

fn commutator(a: &TensorElem, da: i32, b: &TensorElem, db: i32) -> TensorElem {
    let mut out = TensorElem::new();
    let s = -sign((da * db) as i64);
    for (u, x) in a {
        for (v, y) in b {
            let mut uv = u.clone();
            uv.extend(v);
            let mut vu = v.clone();
            vu.extend(u);
            *out.entry(uv).or_insert_with(Rational::zero) += x * y;
            *out.entry(vu).or_insert_with(Rational::zero) += &s * x * y;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn word_index(w: &[usize], letters: usize) -> usize {
    w.iter().fold(0, |acc, i| acc * letters + i)
}

fn to_sparse(e: &TensorElem, letters: usize) -> Vec<(usize, Rational)> {
    let mut v: Vec<(usize, Rational)> = e.iter().map(|(w, c)| (word_index(w, letters), c.clone())).collect();
    v.sort_by_key(|(i, _)| *i);
    v
}

/// The free Lie algebra on `v`, up to bracket weight `weight`.
pub fn free_lie(v: &GradedVectorSpace, weight: u32) -> Result<FreeLie> {
    free_lie_bounded(v, weight, DEFAULT_MAX_WEIGHT)
}

pub fn free_lie_bounded(v: &GradedVectorSpace, weight: u32, bound: u32) -> Result<FreeLie> {
    if weight > bound {
        return Err(Error::WeightTooLarge { weight, bound });
    }
    let mut gen_labels = Vec::new();
    let mut gen_degrees = Vec::new();
    for d in v.degrees() {
        for l in v.labels(d) {
            gen_labels.push(l.clone());
            gen_degrees.push(d);
        }
    }
    let m = gen_labels.len();
    if m == 0 || weight == 0 {
        let algebra = DgLieAlgebra::over_field(vec![], vec![], None, &[], &[])?;
        return Ok(FreeLie { algebra, expressions: vec![], dims: BTreeMap::new() });
    }
    let mut labels: Vec<String> = gen_labels.clone();
    let mut degrees: Vec<i32> = gen_degrees.clone();
    let mut weights: Vec<u32> = vec![1; m];
    let mut expressions: Vec<TensorElem> = (0..m).map(|i| TensorElem::from([(vec![i], Rational::from_integer(1.into()))])).collect();
    let field = Rationals;
    for w in 2..=weight {
        let width = m.checked_pow(w).ok_or(Error::WeightTooLarge { weight, bound })?;
        let mut ech = Echelon::new(&field, width);
        let prev: Vec<usize> = (0..labels.len()).filter(|&i| weights[i] == w - 1).collect();
        for g in 0..m {
            for &b in &prev {
                let c = commutator(&expressions[g], degrees[g], &expressions[b], degrees[b]);
                let independent = !c.is_empty() && ech.insert(&to_sparse(&c, m));
                if independent {
                    labels.push(format!("[{},{}]", gen_labels[g], labels[b]));
                    degrees.push(degrees[g] + degrees[b]);
                    weights.push(w);
                    expressions.push(c);
                }
            }
        }
    }
    let n = labels.len();
    // Tracking echelons re-express brackets in the chosen basis.
    let mut bracket_entries = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let w = weights[i] + weights[j];
            if w > weight {
                continue;
            }
            let c = commutator(&expressions[i], degrees[i], &expressions[j], degrees[j]);
            if c.is_empty() {
                continue;
            }
            let basis: Vec<usize> = (0..n).filter(|&k| weights[k] == w).collect();
            let mut ech = Echelon::with_tracking(&field, m.pow(w));
            for &k in &basis {
                ech.insert(&to_sparse(&expressions[k], m));
            }
            let coords = ech
                .express(&to_sparse(&c, m))
                .ok_or_else(|| Error::InvalidComplex(format!("[{}, {}] is not a Lie polynomial", labels[i], labels[j])))?;
            for (t, x) in coords {
                bracket_entries.push((i, j, basis[t], x));
            }
        }
    }
    let algebra = DgLieAlgebra::over_field(labels, degrees.clone(), Some(weights.clone()), &[], &bracket_entries)?;
    let mut dims: BTreeMap<u32, BTreeMap<i32, usize>> = BTreeMap::new();
    for (w, d) in weights.iter().zip(&degrees) {
        *dims.entry(*w).or_default().entry(*d).or_default() += 1;
    }
    Ok(FreeLie { algebra, expressions, dims })
}

fn binomial(n: i128, k: i128) -> i128 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

type Series = BTreeMap<(u32, i32), i128>;

fn series_mul(a: &Series, b: &Series, cutoff: u32) -> Series {
    let mut out = Series::new();
    for ((n1, j1), x) in a {
        for ((n2, j2), y) in b {
            if n1 + n2 <= cutoff {
                *out.entry((n1 + n2, j1 + j2)).or_default() += x * y;
            }
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Dimensions of the free graded Lie algebra by (weight, degree), from
/// `T(V) = Sym(Free V)` solved weight by weight.
pub fn free_lie_dim_oracle(generator_degrees: &[i32], weight: u32) -> BTreeMap<u32, BTreeMap<i32, i64>> {
    let mut tensor: Series = Series::from([((0, 0), 1)]);
    let v: Series = generator_degrees.iter().fold(Series::new(), |mut acc, d| {
        *acc.entry((1, *d)).or_default() += 1;
        acc
    });
    let mut power = tensor.clone();
    for _ in 0..weight {
        power = series_mul(&power, &v, weight);
        for (k, c) in &power {
            *tensor.entry(*k).or_default() += c;
        }
    }
    let mut product: Series = Series::from([((0, 0), 1)]);
    let mut out: BTreeMap<u32, BTreeMap<i32, i64>> = BTreeMap::new();
    for n in 1..=weight {
        let mut here: Vec<(i32, i128)> = Vec::new();
        for ((tn, j), c) in tensor.range((n, i32::MIN)..=(n, i32::MAX)) {
            debug_assert_eq!(*tn, n);
            let a = c - product.get(&(n, *j)).copied().unwrap_or(0);
            if a != 0 {
                here.push((*j, a));
            }
        }
        for ((tn, j), _) in product.range((n, i32::MIN)..=(n, i32::MAX)) {
            if !tensor.contains_key(&(*tn, *j)) {
                here.push((*j, -product[&(*tn, *j)]));
            }
        }
        for (j, a) in here {
            out.entry(n).or_default().insert(j, a as i64);
            let mut factor = Series::new();
            let mut k = 0i128;
            while (n as i128) * k <= weight as i128 {
                let c = if j.rem_euclid(2) == 0 { binomial(a + k - 1, k) } else { binomial(a, k) };
                if c != 0 {
                    factor.insert((n * k as u32, j * k as i32), c);
                }
                k += 1;
            }
            product = series_mul(&product, &factor, weight);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dglie::LieElem;

    fn space(degrees: &[i32]) -> GradedVectorSpace {
        let mut v = GradedVectorSpace::new();
        for (i, d) in degrees.iter().enumerate() {
            v.push(*d, format!("v{}", i + 1)).unwrap();
        }
        v
    }

    fn totals(d: &BTreeMap<u32, BTreeMap<i32, usize>>, w: u32) -> Vec<usize> {
        (1..=w).map(|k| d.get(&k).map_or(0, |t| t.values().sum())).collect()
    }

    fn mobius(n: u32) -> i64 {
        let (mut n, mut m, mut p) = (n, 1i64, 2u32);
        while p * p <= n {
            if n % p == 0 {
                n /= p;
                if n % p == 0 {
                    return 0;
                }
                m = -m;
            }
            p += 1;
        }
        if n > 1 {
            m = -m;
        }
        m
    }

    fn necklace(gens: i64, w: u32) -> i64 {
        (1..=w).filter(|e| w.is_multiple_of(*e)).map(|e| mobius(e) * gens.pow(w / e)).sum::<i64>() / w as i64
    }

    #[test]
    fn two_even_generators() {
        let f = free_lie(&space(&[0, 0]), 4).unwrap();
        assert_eq!(totals(&f.dims, 4), vec![2, 1, 2, 3]);
        f.algebra.validate().unwrap();
    }

    #[test]
    fn one_even_generator() {
        let f = free_lie(&space(&[0]), 4).unwrap();
        assert_eq!(totals(&f.dims, 4), vec![1, 0, 0, 0]);
    }

    #[test]
    fn one_odd_generator() {
        let f = free_lie(&space(&[1]), 4).unwrap();
        assert_eq!(totals(&f.dims, 4), vec![1, 1, 0, 0]);
        f.algebra.validate().unwrap();
    }

    #[test]
    fn necklace_agreement_up_to_weight_five() {
        for gens in 1..=2usize {
            let f = free_lie(&space(&vec![0; gens]), 5).unwrap();
            let expected: Vec<usize> = (1..=5).map(|w| necklace(gens as i64, w) as usize).collect();
            assert_eq!(totals(&f.dims, 5), expected);
        }
    }

    #[test]
    fn oracle_matches_row_reduction() {
        for degrees in [vec![0, 0], vec![1], vec![1, 1], vec![0, 1], vec![2, 1], vec![-1, 0]] {
            let f = free_lie(&space(&degrees), 5).unwrap();
            let oracle = free_lie_dim_oracle(&degrees, 5);
            let got: BTreeMap<u32, BTreeMap<i32, i64>> = f
                .dims
                .iter()
                .map(|(w, t)| (*w, t.iter().map(|(d, n)| (*d, *n as i64)).collect()))
                .collect();
            let oracle: BTreeMap<u32, BTreeMap<i32, i64>> =
                oracle.into_iter().map(|(w, t)| (w, t.into_iter().filter(|(_, n)| *n != 0).collect())).filter(|(_, t): &(u32, BTreeMap<i32, i64>)| !t.is_empty()).collect();
            assert_eq!(got, oracle, "{degrees:?}");
        }
    }

    #[test]
    fn weight_bound_enforced() {
        assert!(matches!(free_lie(&space(&[0]), 9), Err(Error::WeightTooLarge { weight: 9, bound: 8 })));
    }

    #[test]
    fn brackets_are_truncated() {
        let f = free_lie(&space(&[0, 0]), 2).unwrap();
        let l = &f.algebra;
        assert_eq!(l.dim(), 3);
        assert!(l.basis_bracket(0, 2).is_none());
        assert_eq!(l.basis_bracket(0, 1).unwrap(), &LieElem::from([((0, 2), Rational::from_integer(1.into()))]));
    }
}
