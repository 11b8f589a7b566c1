//! dg-Lie algebras that are free of finite rank over a base cdga.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use super::cdga::{BaseCdga, Elem};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{format_rational, q, sign, Rational};

/// Element of `A (x) L`, keyed by (base basis index, Lie basis index).
pub type LieElem = BTreeMap<(usize, usize), Rational>;

pub(crate) fn lie_add(acc: &mut LieElem, key: (usize, usize), c: Rational) {
    if c.is_zero() {
        return;
    }
    let slot = acc.entry(key).or_insert_with(Rational::zero);
    *slot += c;
    if slot.is_zero() {
        acc.remove(&key);
    }
}

fn lie_sum(a: &LieElem, b: &LieElem, cb: &Rational) -> LieElem {
    let mut out = a.clone();
    for (k, x) in b {
        lie_add(&mut out, *k, x * cb);
    }
    out
}

/// A dg-Lie algebra `L` free on a homogeneous basis over a base cdga `A`.
///
/// Brackets and the differential are given on basis elements with
/// coefficients in `A` and extended `A`-bilinearly with Koszul signs.
#[derive(Clone, Debug)]
pub struct DgLieAlgebra {
    base: BaseCdga,
    labels: Vec<String>,
    degrees: Vec<i32>,
    weights: Vec<u32>,
    diff: Vec<LieElem>,
    bracket: BTreeMap<(usize, usize), LieElem>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LieValidation {
    pub dim: usize,
    pub brackets_checked: usize,
    pub triples_checked: usize,
}

impl DgLieAlgebra {
    /// Builds the algebra from explicit tables. Missing `[e_j, e_i]` entries
    /// are filled in from `[e_i, e_j]` by graded antisymmetry; nothing else is
    /// checked here (see [`DgLieAlgebra::validate`]).
    pub fn new(
        base: BaseCdga,
        labels: Vec<String>,
        degrees: Vec<i32>,
        weights: Vec<u32>,
        diff: Vec<LieElem>,
        mut bracket: BTreeMap<(usize, usize), LieElem>,
    ) -> Result<Self> {
        let n = labels.len();
        if degrees.len() != n || weights.len() != n || diff.len() != n {
            return Err(Error::InvalidBounds("Lie algebra tables do not match the basis".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(Error::InvalidBounds(format!("duplicate basis label {l}")));
            }
        }
        let in_range = |e: &LieElem| e.keys().all(|(a, k)| *a < base.dim() && *k < n);
        if !diff.iter().all(in_range) || !bracket.iter().all(|((i, j), e)| *i < n && *j < n && in_range(e)) {
            return Err(Error::InvalidBounds("structure constants refer to unknown basis elements".into()));
        }
        let given: Vec<((usize, usize), LieElem)> = bracket.iter().map(|(k, v)| (*k, v.clone())).collect();
        for ((i, j), e) in given {
            if i != j && !bracket.contains_key(&(j, i)) {
                let s = -sign((degrees[i] * degrees[j]) as i64);
                bracket.insert((j, i), e.iter().map(|(k, x)| (*k, x * &s)).collect());
            }
        }
        bracket.retain(|_, e| !e.is_empty());
        Ok(Self { base, labels, degrees, weights, diff, bracket })
    }

    /// Over the ground field: `diff` entries `(i, k, c)` mean `d e_i += c e_k`,
    /// bracket entries `(i, j, k, c)` mean `[e_i, e_j] += c e_k`.
    pub fn over_field(
        labels: Vec<String>,
        degrees: Vec<i32>,
        weights: Option<Vec<u32>>,
        diff: &[(usize, usize, Rational)],
        brackets: &[(usize, usize, usize, Rational)],
    ) -> Result<Self> {
        let n = labels.len();
        let mut d = vec![LieElem::new(); n];
        for (i, k, c) in diff {
            if *i >= n {
                return Err(Error::InvalidBounds(format!("differential entry for unknown index {i}")));
            }
            lie_add(&mut d[*i], (0, *k), c.clone());
        }
        let mut b: BTreeMap<(usize, usize), LieElem> = BTreeMap::new();
        for (i, j, k, c) in brackets {
            lie_add(b.entry((*i, *j)).or_default(), (0, *k), c.clone());
        }
        let weights = weights.unwrap_or_else(|| vec![1; n]);
        Self::new(BaseCdga::field(), labels, degrees, weights, d, b)
    }

    pub fn abelian(degrees: &[i32]) -> Self {
        let labels = (0..degrees.len()).map(|i| format!("x{}", i + 1)).collect();
        Self::over_field(labels, degrees.to_vec(), None, &[], &[]).expect("abelian tables are consistent")
    }

    /// `sl_2` with basis `e, h, f` in degree 0.
    pub fn sl2() -> Self {
        let labels = ["e", "h", "f"].map(String::from).to_vec();
        let b = [(0, 2, 1, q(1)), (1, 0, 0, q(2)), (1, 2, 2, q(-2))];
        Self::over_field(labels, vec![0; 3], None, &[], &b).expect("sl2 tables are consistent")
    }

    pub fn base(&self) -> &BaseCdga {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn basis_diff(&self, i: usize) -> &LieElem {
        &self.diff[i]
    }

    pub fn basis_bracket(&self, i: usize, j: usize) -> Option<&LieElem> {
        self.bracket.get(&(i, j))
    }

    pub fn brackets(&self) -> &BTreeMap<(usize, usize), LieElem> {
        &self.bracket
    }

    pub fn with_weights(mut self, weights: Vec<u32>) -> Result<Self> {
        if weights.len() != self.dim() {
            return Err(Error::InvalidBounds("one weight per basis element expected".into()));
        }
        self.weights = weights;
        Ok(self)
    }

    /// Overwrites `[e_i, e_j]` (and its antisymmetric partner) without
    /// validating; used to build deliberately broken fixtures.
    pub fn with_bracket(mut self, i: usize, j: usize, value: LieElem) -> Self {
        let s = -sign((self.degrees[i] * self.degrees[j]) as i64);
        let partner: LieElem = value.iter().map(|(k, x)| (*k, x * &s)).collect();
        self.bracket.insert((i, j), value);
        if i != j {
            self.bracket.insert((j, i), partner);
        }
        self.bracket.retain(|_, e| !e.is_empty());
        self
    }

    pub fn basis(&self, i: usize) -> LieElem {
        LieElem::from([((self.base.unit(), i), q(1))])
    }

    fn term_degree(&self, (a, k): (usize, usize)) -> i32 {
        self.base.degree(a) + self.degrees[k]
    }

    /// `a . x` for `a` in the base.
    pub fn scale(&self, a: &Elem, x: &LieElem) -> LieElem {
        let mut out = LieElem::new();
        for (ai, c) in a {
            for ((b, k), y) in x {
                for (m, z) in self.base.basis_product(*ai, *b) {
                    lie_add(&mut out, (*m, *k), c * y * z);
                }
            }
        }
        out
    }

    /// `[a e_i, b e_j] = (-1)^{|e_i||b|} ab [e_i, e_j]`.
    pub fn bracket(&self, x: &LieElem, y: &LieElem) -> LieElem {
        let mut out = LieElem::new();
        for ((a, i), cx) in x {
            for ((b, j), cy) in y {
                let Some(br) = self.bracket.get(&(*i, *j)) else { continue };
                let s = sign((self.degrees[*i] * self.base.degree(*b)) as i64);
                for (ab, cab) in self.base.basis_product(*a, *b) {
                    for ((c, k), cz) in br {
                        for (m, cm) in self.base.basis_product(*ab, *c) {
                            lie_add(&mut out, (*m, *k), &s * cx * cy * cab * cz * cm);
                        }
                    }
                }
            }
        }
        out
    }

    /// `d(a e_i) = (da) e_i + (-1)^{|a|} a d(e_i)`.
    pub fn d(&self, x: &LieElem) -> LieElem {
        let mut out = LieElem::new();
        for ((a, i), c) in x {
            for (da, cd) in self.base.basis_diff(*a) {
                lie_add(&mut out, (*da, *i), c * cd);
            }
            let s = sign(self.base.degree(*a) as i64);
            for ((b, k), cb) in &self.diff[*i] {
                for (m, cm) in self.base.basis_product(*a, *b) {
                    lie_add(&mut out, (*m, *k), &s * c * cb * cm);
                }
            }
        }
        out
    }

    pub fn show(&self, x: &LieElem) -> String {
        if x.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = x
            .iter()
            .map(|((a, k), c)| {
                let coef = format_rational(c);
                if a == &self.base.unit() {
                    format!("{coef}*{}", self.labels[*k])
                } else {
                    format!("{coef}*{}*{}", self.base.labels()[*a], self.labels[*k])
                }
            })
            .collect();
        parts.join(" + ")
    }

    fn violation(axiom: &str, witness: String) -> Error {
        Error::LieAxiomViolation { axiom: axiom.into(), witness }
    }

    /// Checks degrees, graded antisymmetry, the graded Jacobi identity, the
    /// Leibniz rule and `d^2 = 0` on basis elements.
    pub fn validate(&self) -> Result<LieValidation> {
        let n = self.dim();
        let l = &self.labels;
        for i in 0..n {
            let di = &self.diff[i];
            if let Some(key) = di.keys().find(|key| self.term_degree(**key) != self.degrees[i] + 1) {
                return Err(Self::violation("degree", format!("d {} has a term of degree {}", l[i], self.term_degree(*key))));
            }
            let dd = self.d(di);
            if !dd.is_empty() {
                return Err(Self::violation("d^2", format!("d(d {}) = {}", l[i], self.show(&dd))));
            }
        }
        for ((i, j), br) in &self.bracket {
            if let Some(key) = br.keys().find(|key| self.term_degree(**key) != self.degrees[*i] + self.degrees[*j]) {
                return Err(Self::violation(
                    "degree",
                    format!("[{}, {}] has a term of degree {}", l[*i], l[*j], self.term_degree(*key)),
                ));
            }
        }
        let mut brackets_checked = 0;
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (self.basis(i), self.basis(j));
                let xy = self.bracket(&x, &y);
                let yx = self.bracket(&y, &x);
                let s = sign((self.degrees[i] * self.degrees[j]) as i64);
                if lie_sum(&xy, &yx, &s) != LieElem::new() {
                    return Err(Self::violation(
                        "antisymmetry",
                        format!("[{a}, {b}] = {} but [{b}, {a}] = {}", self.show(&xy), self.show(&yx), a = l[i], b = l[j]),
                    ));
                }
                let lhs = self.d(&xy);
                let rhs = lie_sum(
                    &self.bracket(&self.d(&x), &y),
                    &self.bracket(&x, &self.d(&y)),
                    &sign(self.degrees[i] as i64),
                );
                if lhs != rhs {
                    return Err(Self::violation(
                        "Leibniz",
                        format!("d[{}, {}] = {} but the Leibniz rule gives {}", l[i], l[j], self.show(&lhs), self.show(&rhs)),
                    ));
                }
                brackets_checked += 1;
            }
        }
        let mut triples_checked = 0;
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (self.basis(i), self.basis(j));
                let xy = self.bracket(&x, &y);
                for k in 0..n {
                    let z = self.basis(k);
                    let lhs = self.bracket(&x, &self.bracket(&y, &z));
                    let rhs = lie_sum(
                        &self.bracket(&xy, &z),
                        &self.bracket(&y, &self.bracket(&x, &z)),
                        &sign((self.degrees[i] * self.degrees[j]) as i64),
                    );
                    if lhs != rhs {
                        let diff = lie_sum(&lhs, &rhs, &q(-1));
                        return Err(Self::violation(
                            "Jacobi",
                            format!("[{a}, [{b}, {c}]] - [[{a}, {b}], {c}] - (+/-)[{b}, [{a}, {c}]] = {}", self.show(&diff), a = l[i], b = l[j], c = l[k]),
                        ));
                    }
                    triples_checked += 1;
                }
            }
        }
        Ok(LieValidation { dim: n, brackets_checked, triples_checked })
    }

    pub(crate) fn require_field_base(&self, what: &str) -> Result<()> {
        if self.base.is_field() {
            Ok(())
        } else {
            Err(Error::Unsupported(format!("{what} is only implemented over a field base")))
        }
    }

    /// Whether brackets and the differential preserve weight exactly.
    pub fn is_weight_homogeneous(&self) -> bool {
        self.diff.iter().enumerate().all(|(i, e)| e.keys().all(|(_, k)| self.weights[*k] == self.weights[i]))
            && self.bracket.iter().all(|((i, j), e)| e.keys().all(|(_, k)| self.weights[*k] == self.weights[*i] + self.weights[*j]))
    }

    /// Whether brackets and the differential never raise weight, so weight
    /// truncations are compatible with the structure.
    pub fn is_weight_filtered(&self) -> bool {
        self.diff.iter().enumerate().all(|(i, e)| e.keys().all(|(_, k)| self.weights[*k] <= self.weights[i]))
            && self.bracket.iter().all(|((i, j), e)| e.keys().all(|(_, k)| self.weights[*k] <= self.weights[*i] + self.weights[*j]))
    }
}

/// A dg-representation of a field-based dg-Lie algebra on a finite graded
/// vector space: one matrix per Lie basis element, plus an internal
/// differential.
#[derive(Clone, Debug)]
pub struct Representation {
    pub labels: Vec<String>,
    pub degrees: Vec<i32>,
    pub action: Vec<Matrix>,
    pub diff: Matrix,
}

impl Representation {
    pub fn trivial(lie: &DgLieAlgebra, labels: Vec<String>, degrees: Vec<i32>) -> Self {
        let m = labels.len();
        Self { labels, degrees, action: vec![Matrix::zeros(m, m); lie.dim()], diff: Matrix::zeros(m, m) }
    }

    /// The adjoint representation of a field-based algebra.
    pub fn adjoint(lie: &DgLieAlgebra) -> Self {
        let n = lie.dim();
        let action = (0..n)
            .map(|i| {
                let entries = (0..n).flat_map(|j| {
                    lie.basis_bracket(i, j).cloned().unwrap_or_default().into_iter().map(move |((_, k), c)| (k, j, c))
                });
                Matrix::from_triplets(n, n, entries)
            })
            .collect();
        let diff = Matrix::from_triplets(
            n,
            n,
            (0..n).flat_map(|j| lie.basis_diff(j).clone().into_iter().map(move |((_, k), c)| (k, j, c))),
        );
        Self { labels: lie.labels().to_vec(), degrees: lie.degrees().to_vec(), action, diff }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// `rho([x, y]) = [rho(x), rho(y)]`, `rho(dx) = [d, rho(x)]`, `d^2 = 0`
    /// and degree compatibility, on basis elements.
    pub fn validate(&self, lie: &DgLieAlgebra) -> Result<()> {
        lie.require_field_base("representation checks")?;
        let m = self.dim();
        let bad = |msg: String| Err(Error::NotARepresentation(msg));
        if self.degrees.len() != m || self.action.len() != lie.dim() || self.diff.nrows() != m || self.diff.ncols() != m {
            return bad("action tables do not match the bases".into());
        }
        if self.action.iter().any(|a| a.nrows() != m || a.ncols() != m) {
            return bad("action matrices have the wrong shape".into());
        }
        if !self.diff.mul(&self.diff).is_zero() {
            return bad("d^2 != 0 on the module".into());
        }
        for (r, c, _) in self.diff.triplets() {
            if self.degrees[r] != self.degrees[c] + 1 {
                return bad(format!("d {} has a term {} of the wrong degree", self.labels[c], self.labels[r]));
            }
        }
        let as_matrix = |e: &LieElem| -> Matrix {
            let mut acc = Matrix::zeros(m, m);
            for ((_, k), c) in e {
                acc = acc.add(&self.action[*k].scale(c));
            }
            acc
        };
        for i in 0..lie.dim() {
            for (r, c, _) in self.action[i].triplets() {
                if self.degrees[r] != self.degrees[c] + lie.degree(i) {
                    return bad(format!("{} . {} has a term of the wrong degree", lie.labels()[i], self.labels[c]));
                }
            }
            let lhs = as_matrix(lie.basis_diff(i));
            let rhs = self.diff.mul(&self.action[i]).sub(&self.action[i].mul(&self.diff).scale(&sign(lie.degree(i) as i64)));
            if lhs != rhs {
                return bad(format!("the action of d {} is not the commutator with d", lie.labels()[i]));
            }
            for j in 0..lie.dim() {
                let s = sign((lie.degree(i) * lie.degree(j)) as i64);
                let lhs = as_matrix(lie.basis_bracket(i, j).unwrap_or(&LieElem::new()));
                let rhs = self.action[i].mul(&self.action[j]).sub(&self.action[j].mul(&self.action[i]).scale(&s));
                if lhs != rhs {
                    return bad(format!("the action of [{}, {}] is not the commutator", lie.labels()[i], lie.labels()[j]));
                }
            }
        }
        Ok(())
    }
}
