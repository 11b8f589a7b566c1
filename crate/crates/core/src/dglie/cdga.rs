//! Finite-dimensional commutative dg-algebras given by structure constants,
//! dg-modules over them, and trivial square-zero extensions.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::{q, sign, Rational};

/// Sparse element over a finite basis.
pub type Elem = BTreeMap<usize, Rational>;

pub(crate) fn add_into(acc: &mut Elem, k: usize, c: Rational) {
    use num_traits::Zero;
    if c.is_zero() {
        return;
    }
    let slot = acc.entry(k).or_insert_with(Rational::zero);
    *slot += c;
    if slot.is_zero() {
        acc.remove(&k);
    }
}

fn scaled(e: &Elem, c: &Rational) -> Elem {
    let mut out = Elem::new();
    for (k, x) in e {
        add_into(&mut out, *k, x * c);
    }
    out
}

fn sum(a: &Elem, b: &Elem) -> Elem {
    let mut out = a.clone();
    for (k, x) in b {
        add_into(&mut out, *k, x.clone());
    }
    out
}

fn show(e: &Elem, labels: &[String]) -> String {
    if e.is_empty() {
        return "0".into();
    }
    let parts: Vec<String> = e.iter().map(|(k, c)| format!("({c})*{}", labels[*k])).collect();
    parts.join(" + ")
}

/// A graded-commutative unital dg-algebra on a finite basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseCdga {
    labels: Vec<String>,
    degrees: Vec<i32>,
    unit: usize,
    /// `mult[i][j] = e_i e_j`.
    mult: Vec<Vec<Elem>>,
    /// `diff[i] = d e_i`.
    diff: Vec<Elem>,
}

impl BaseCdga {
    /// Validates degrees, unit, graded commutativity, associativity,
    /// `d^2 = 0` and the Leibniz rule by enumeration over basis triples.
    pub fn new(labels: Vec<String>, degrees: Vec<i32>, unit: usize, mult: Vec<Vec<Elem>>, diff: Vec<Elem>) -> Result<Self> {
        let n = labels.len();
        if degrees.len() != n || mult.len() != n || mult.iter().any(|r| r.len() != n) || diff.len() != n || unit >= n {
            return Err(Error::InvalidCdga("structure tables do not match the basis".into()));
        }
        let a = Self { labels, degrees, unit, mult, diff };
        a.validate()?;
        Ok(a)
    }

    /// The ground field.
    pub fn field() -> Self {
        Self {
            labels: vec!["1".into()],
            degrees: vec![0],
            unit: 0,
            mult: vec![vec![Elem::from([(0, q(1))])]],
            diff: vec![Elem::new()],
        }
    }

    pub fn is_field(&self) -> bool {
        self.dim() == 1 && self.degrees[0] == 0
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

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn basis_product(&self, i: usize, j: usize) -> &Elem {
        &self.mult[i][j]
    }

    pub fn basis_diff(&self, i: usize) -> &Elem {
        &self.diff[i]
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let mut out = Elem::new();
        for (i, x) in a {
            for (j, y) in b {
                for (k, z) in &self.mult[*i][*j] {
                    add_into(&mut out, *k, x * y * z);
                }
            }
        }
        out
    }

    pub fn d(&self, a: &Elem) -> Elem {
        let mut out = Elem::new();
        for (i, x) in a {
            for (k, z) in &self.diff[*i] {
                add_into(&mut out, *k, x * z);
            }
        }
        out
    }

    fn basis(&self, i: usize) -> Elem {
        Elem::from([(i, q(1))])
    }

    fn check_homogeneous(&self, e: &Elem, deg: i32, what: &str) -> Result<()> {
        if let Some(k) = e.keys().find(|&&k| self.degrees[k] != deg) {
            return Err(Error::InvalidCdga(format!("{what} has a term {} of the wrong degree", self.labels[*k])));
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        let l = &self.labels;
        for i in 0..n {
            self.check_homogeneous(&self.diff[i], self.degrees[i] + 1, &format!("d {}", l[i]))?;
            if self.d(&self.diff[i]) != Elem::new() {
                return Err(Error::InvalidCdga(format!("d^2 {} != 0", l[i])));
            }
            let e = self.basis(i);
            let u = self.basis(self.unit);
            if self.mul(&u, &e) != e || self.mul(&e, &u) != e {
                return Err(Error::InvalidCdga(format!("unit does not act as identity on {}", l[i])));
            }
        }
        if !self.diff[self.unit].is_empty() {
            return Err(Error::InvalidCdga("d(1) != 0".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (self.basis(i), self.basis(j));
                let ab = self.mul(&a, &b);
                self.check_homogeneous(&ab, self.degrees[i] + self.degrees[j], &format!("{} {}", l[i], l[j]))?;
                let ba = self.mul(&b, &a);
                if ab != scaled(&ba, &sign((self.degrees[i] * self.degrees[j]) as i64)) {
                    return Err(Error::InvalidCdga(format!("{} {} is not graded commutative", l[i], l[j])));
                }
                let lhs = self.d(&ab);
                let rhs = sum(&self.mul(&self.d(&a), &b), &scaled(&self.mul(&a, &self.d(&b)), &sign(self.degrees[i] as i64)));
                if lhs != rhs {
                    return Err(Error::InvalidCdga(format!("Leibniz fails on {} {}", l[i], l[j])));
                }
                for k in 0..n {
                    let c = self.basis(k);
                    if self.mul(&ab, &c) != self.mul(&a, &self.mul(&b, &c)) {
                        return Err(Error::InvalidCdga(format!(
                            "associativity fails on {} {} {}: {} vs {}",
                            l[i],
                            l[j],
                            l[k],
                            show(&self.mul(&ab, &c), l),
                            show(&self.mul(&a, &self.mul(&b, &c)), l)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A dg-module over a [`BaseCdga`] on a finite basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdgaModule {
    labels: Vec<String>,
    degrees: Vec<i32>,
    /// `action[i][j] = a_i . m_j`.
    action: Vec<Vec<Elem>>,
    diff: Vec<Elem>,
}

impl CdgaModule {
    /// Validates the module axioms against `base`.
    pub fn new(base: &BaseCdga, labels: Vec<String>, degrees: Vec<i32>, action: Vec<Vec<Elem>>, diff: Vec<Elem>) -> Result<Self> {
        let m = labels.len();
        if degrees.len() != m || diff.len() != m || action.len() != base.dim() || action.iter().any(|r| r.len() != m) {
            return Err(Error::NotAModule("action tables do not match the bases".into()));
        }
        let module = Self { labels, degrees, action, diff };
        module.validate(base)?;
        Ok(module)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    fn act(&self, a: &Elem, m: &Elem) -> Elem {
        let mut out = Elem::new();
        for (i, x) in a {
            for (j, y) in m {
                for (k, z) in &self.action[*i][*j] {
                    add_into(&mut out, *k, x * y * z);
                }
            }
        }
        out
    }

    fn d(&self, m: &Elem) -> Elem {
        let mut out = Elem::new();
        for (j, y) in m {
            for (k, z) in &self.diff[*j] {
                add_into(&mut out, *k, y * z);
            }
        }
        out
    }

    fn validate(&self, base: &BaseCdga) -> Result<()> {
        let l = &self.labels;
        let bad = |msg: String| Err(Error::NotAModule(msg));
        for j in 0..self.dim() {
            let m = Elem::from([(j, q(1))]);
            if let Some(k) = self.diff[j].keys().find(|&&k| self.degrees[k] != self.degrees[j] + 1) {
                return bad(format!("d {} has a term {} of the wrong degree", l[j], l[*k]));
            }
            if !self.d(&self.d(&m)).is_empty() {
                return bad(format!("d^2 {} != 0", l[j]));
            }
            if self.act(&base.basis(base.unit), &m) != m {
                return bad(format!("the unit does not fix {}", l[j]));
            }
            for i in 0..base.dim() {
                let a = base.basis(i);
                let am = self.act(&a, &m);
                if let Some(k) = am.keys().find(|&&k| self.degrees[k] != self.degrees[j] + base.degree(i)) {
                    return bad(format!("{} . {} has a term {} of the wrong degree", base.labels()[i], l[j], l[*k]));
                }
                let lhs = self.d(&am);
                let rhs = sum(&self.act(&base.d(&a), &m), &scaled(&self.act(&a, &self.d(&m)), &sign(base.degree(i) as i64)));
                if lhs != rhs {
                    return bad(format!("d is not a derivation on {} . {}", base.labels()[i], l[j]));
                }
                for k in 0..base.dim() {
                    let b = base.basis(k);
                    if self.act(&base.mul(&a, &b), &m) != self.act(&a, &self.act(&b, &m)) {
                        return bad(format!("(ab)m != a(bm) for {} {} {}", base.labels()[i], base.labels()[k], l[j]));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `A (+) M` with `(a, m)(b, m') = (ab, a m' + (-1)^{|m||b|} b m)`.
pub fn square_zero(base: &BaseCdga, module: &CdgaModule) -> Result<BaseCdga> {
    let na = base.dim();
    let n = na + module.dim();
    let mut labels = base.labels.clone();
    labels.extend(module.labels.iter().cloned());
    let mut degrees = base.degrees.clone();
    degrees.extend(module.degrees.iter().copied());
    let shift = |e: &Elem| -> Elem { e.iter().map(|(k, x)| (k + na, x.clone())).collect() };
    let mut mult = vec![vec![Elem::new(); n]; n];
    for i in 0..na {
        for j in 0..na {
            mult[i][j] = base.mult[i][j].clone();
        }
        for j in 0..module.dim() {
            let am = shift(&module.action[i][j]);
            let s = sign((module.degrees[j] * base.degrees[i]) as i64);
            mult[na + j][i] = scaled(&am, &s);
            mult[i][na + j] = am;
        }
    }
    let mut diff = base.diff.clone();
    diff.extend(module.diff.iter().map(shift));
    BaseCdga::new(labels, degrees, base.unit, mult, diff).map_err(|e| Error::NotAModule(e.to_string()))
}

/// Whether the projection `A (+) M -> A` onto the first `base_dim` basis
/// vectors is multiplicative and commutes with `d`.
pub fn augmentation_is_algebra_map(ext: &BaseCdga, base_dim: usize) -> bool {
    let proj = |e: &Elem| -> Elem { e.iter().filter(|(k, _)| **k < base_dim).map(|(k, x)| (*k, x.clone())).collect() };
    for i in 0..ext.dim() {
        let a = ext.basis(i);
        if proj(&ext.d(&a)) != ext.d(&proj(&a)) {
            return false;
        }
        for j in 0..ext.dim() {
            let b = ext.basis(j);
            if proj(&ext.mul(&a, &b)) != ext.mul(&proj(&a), &proj(&b)) {
                return false;
            }
        }
    }
    true
}

/// `k[x_1..x_d]/(x_1^m, .., x_d^m)` in degree 0, monomials in lexicographic order.
pub fn truncated_polynomial(d: usize, m: u32) -> Result<BaseCdga> {
    if m == 0 {
        return Err(Error::InvalidBounds("truncation order must be positive".into()));
    }
    let monos = crate::koszul::truncated_monomials(d, m);
    let index: BTreeMap<&Vec<i64>, usize> = monos.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let labels = monos.iter().map(|e| mono_label(e)).collect();
    let mult = monos
        .iter()
        .map(|a| {
            monos
                .iter()
                .map(|b| {
                    let s: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                    index.get(&s).map(|&k| Elem::from([(k, q(1))])).unwrap_or_default()
                })
                .collect()
        })
        .collect();
    BaseCdga::new(labels, vec![0; monos.len()], 0, mult, vec![Elem::new(); monos.len()])
}

pub(crate) fn mono_label(e: &[i64]) -> String {
    let parts: Vec<String> = e.iter().map(i64::to_string).collect();
    format!("x^({})", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k() -> BaseCdga {
        BaseCdga::field()
    }

    fn trivial_module(degrees: Vec<i32>) -> CdgaModule {
        let n = degrees.len();
        let labels = (0..n).map(|i| format!("m{i}")).collect();
        let action = vec![(0..n).map(|j| Elem::from([(j, q(1))])).collect()];
        CdgaModule::new(&k(), labels, degrees, action, vec![Elem::new(); n]).unwrap()
    }

    #[test]
    fn dual_numbers_in_degree_one() {
        let a = square_zero(&k(), &trivial_module(vec![1])).unwrap();
        assert_eq!(a.dim(), 2);
        assert_eq!(a.degrees(), &[0, 1]);
        assert!(a.basis_product(1, 1).is_empty());
        assert!(augmentation_is_algebra_map(&a, 1));
    }

    #[test]
    fn square_zero_on_k2() {
        let a = square_zero(&k(), &trivial_module(vec![0, 0])).unwrap();
        assert_eq!(a.dim(), 3);
        assert!(a.basis_product(1, 2).is_empty());
    }

    #[test]
    fn truncated_polynomials_validate() {
        let a = truncated_polynomial(2, 3).unwrap();
        assert_eq!(a.dim(), 9);
    }

    #[test]
    fn noncommutative_table_rejected() {
        // x y = z but y x = 0
        let labels = ["1", "x", "y", "z"].map(String::from).to_vec();
        let mut mult = vec![vec![Elem::new(); 4]; 4];
        for i in 0..4 {
            mult[0][i] = Elem::from([(i, q(1))]);
            mult[i][0] = Elem::from([(i, q(1))]);
        }
        mult[1][2] = Elem::from([(3, q(1))]);
        let err = BaseCdga::new(labels, vec![0; 4], 0, mult, vec![Elem::new(); 4]).unwrap_err();
        assert!(matches!(err, Error::InvalidCdga(_)));
    }

    #[test]
    fn bad_module_rejected() {
        let action = vec![vec![Elem::from([(0, q(2))])]];
        let err = CdgaModule::new(&k(), vec!["m".into()], vec![0], action, vec![Elem::new()]).unwrap_err();
        assert!(matches!(err, Error::NotAModule(_)));
    }
}
