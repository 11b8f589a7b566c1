//! Window models of Tate vector spaces: ind/pro towers and their duals,
//! lattices commensurable with the standard one, relative dimension and
//! determinant lines.
//!
//! The ambient space has basis `e_i`, `i ∈ Z`, and standard lattice
//! `L_0 = span{e_i : i >= 0}`. A lattice is stored as a finite window
//! `[start, end)`, a framed subspace `W` of the window, and the tail
//! `span{e_i : i >= end}`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{cohomology_dims, ChainComplex, DimTable, GradedVectorSpace};
use crate::error::{Error, Result};
use crate::linalg::{determinant, kernel, rank, Echelon, Matrix, SparseVec};
use crate::scalar::{q, Exact, Rational, Rationals};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Ind,
    Pro,
}

/// An `N`-indexed tower of finite-dimensional spaces. For `Ind` the map `k`
/// goes from stage `k` to stage `k+1`; for `Pro` from stage `k+1` to stage `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    direction: Direction,
    stages: Vec<GradedVectorSpace>,
    maps: Vec<Matrix>,
}

impl Tower {
    pub fn new(direction: Direction, stages: Vec<GradedVectorSpace>, maps: Vec<Matrix>) -> Result<Self> {
        if !stages.is_empty() && maps.len() + 1 != stages.len() {
            return Err(Error::DimensionMismatch(format!("{} stages need {} maps", stages.len(), stages.len() - 1)));
        }
        for (k, m) in maps.iter().enumerate() {
            let (src, tgt) = match direction {
                Direction::Ind => (k, k + 1),
                Direction::Pro => (k + 1, k),
            };
            if m.ncols() != stages[src].total_dim() || m.nrows() != stages[tgt].total_dim() {
                return Err(Error::DimensionMismatch(format!("map {k} has the wrong shape")));
            }
        }
        Ok(Self { direction, stages, maps })
    }

    /// Stages `k^{dims[0]} -> k^{dims[1]} -> ...` in degree 0.
    pub fn from_dims(direction: Direction, dims: &[usize], maps: Vec<Matrix>) -> Result<Self> {
        let stages = dims
            .iter()
            .enumerate()
            .map(|(s, &n)| GradedVectorSpace::concentrated(0, (0..n).map(|i| format!("s{s}e{i}")).collect::<Vec<_>>()))
            .collect();
        Self::new(direction, stages, maps)
    }

    pub fn zero() -> Self {
        Self { direction: Direction::Ind, stages: Vec::new(), maps: Vec::new() }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn stages(&self) -> &[GradedVectorSpace] {
        &self.stages
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    pub fn stage_dims(&self) -> Vec<usize> {
        self.stages.iter().map(GradedVectorSpace::total_dim).collect()
    }

    pub fn map_ranks(&self, exact: &Exact) -> Result<Vec<usize>> {
        self.maps.iter().map(|m| rank(exact, m)).collect()
    }

    /// For each map `f`, the two-term complex `source -f-> target` in degrees
    /// 0 and 1.
    pub fn associated_complexes(&self) -> Vec<ChainComplex> {
        self.maps
            .iter()
            .map(|m| {
                let space = GradedVectorSpace::from_components([
                    (0, (0..m.ncols()).map(|i| format!("s{i}")).collect::<Vec<_>>()),
                    (1, (0..m.nrows()).map(|i| format!("t{i}")).collect::<Vec<_>>()),
                ])
                .expect("fresh labels");
                ChainComplex::new(space, [(0, m.clone())].into()).expect("two-term complexes are complexes")
            })
            .collect()
    }

    pub fn associated_cohomology(&self, exact: &Exact) -> Result<Vec<DimTable>> {
        self.associated_complexes().iter().map(|c| cohomology_dims(c, exact)).collect()
    }
}

/// Flips the direction, dualizes each stage and transposes each map.
pub fn dualize_tower(t: &Tower) -> Tower {
    let direction = match t.direction {
        Direction::Ind => Direction::Pro,
        Direction::Pro => Direction::Ind,
    };
    Tower {
        direction,
        stages: t.stages.iter().map(GradedVectorSpace::dual).collect(),
        maps: t.maps.iter().map(Matrix::transpose).collect(),
    }
}

/// The ambient space `span{e_i : i ∈ Z}` placed in one cohomological degree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TateWindowModel {
    pub degree: i32,
}

impl TateWindowModel {
    pub fn standard_lattice(&self) -> Lattice {
        Lattice::shift(0)
    }

    pub fn window_labels(&self, start: i64, end: i64) -> Vec<String> {
        (start..end).map(|i| format!("e{i}")).collect()
    }
}

/// `W + span{e_i : i >= end}` with `W` spanned by the rows of `framing`,
/// written in the coordinates `e_start, ..., e_{end-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    start: i64,
    end: i64,
    framing: Matrix,
}

impl Lattice {
    pub fn new(start: i64, end: i64, framing: Matrix) -> Result<Self> {
        if end < start {
            return Err(Error::InvalidBounds(format!("window [{start}, {end}) is reversed")));
        }
        if framing.ncols() != (end - start) as usize {
            return Err(Error::DimensionMismatch(format!(
                "framing has {} columns for a window of width {}",
                framing.ncols(),
                end - start
            )));
        }
        if rank(&Exact::rational(), &framing)? != framing.nrows() {
            return Err(Error::InvalidBounds("framing rows must be independent".into()));
        }
        Ok(Self { start, end, framing })
    }

    /// `L_a = span{e_i : i >= a}`.
    pub fn shift(a: i64) -> Self {
        Self { start: a, end: a, framing: Matrix::zeros(0, 0) }
    }

    pub fn window(&self) -> (i64, i64) {
        (self.start, self.end)
    }

    pub fn framing(&self) -> &Matrix {
        &self.framing
    }

    /// `dim W`, i.e. the dimension of the lattice modulo `L_end`.
    pub fn window_rank(&self) -> usize {
        self.framing.nrows()
    }

    /// The same lattice over a larger window: zero columns in front and the
    /// unit rows `e_end, ..., e_{end'-1}` appended.
    pub fn extend(&self, start: i64, end: i64) -> Result<Self> {
        if start > self.start || end < self.end {
            return Err(Error::InvalidBounds("extension must contain the current window".into()));
        }
        let front = (self.start - start) as usize;
        let width = (end - start) as usize;
        let mut entries: Vec<(usize, usize, Rational)> =
            self.framing.triplets().map(|(i, j, x)| (i, j + front, x.clone())).collect();
        let r = self.framing.nrows();
        for (t, col) in (self.end..end).enumerate() {
            entries.push((r + t, (col - start) as usize, q(1)));
        }
        Ok(Self { start, end, framing: Matrix::from_triplets(r + (end - self.end) as usize, width, entries) })
    }

    fn rref(&self) -> (Vec<SparseVec<Rational>>, Vec<usize>) {
        let f = Rationals;
        let mut ech = Echelon::new(&f, self.framing.ncols());
        for r in self.framing.rows() {
            ech.insert(r);
        }
        let rows = ech.rref();
        let pivots = rows.iter().map(|r| r[0].0).collect();
        (rows, pivots)
    }

    /// Reduced echelon basis of `W`, as a matrix.
    pub fn normal_form(&self) -> Matrix {
        let (rows, _) = self.rref();
        let n = rows.len();
        Matrix::from_triplets(
            n,
            self.framing.ncols(),
            rows.into_iter().enumerate().flat_map(|(i, r)| r.into_iter().map(move |(j, x)| (i, j, x))),
        )
    }

    /// Determinant of the framing against the reduced echelon basis of the same
    /// space; unchanged by window extension.
    pub fn frame_scalar(&self) -> Rational {
        let (_, pivots) = self.rref();
        let r = self.framing.nrows();
        let entries = self
            .framing
            .triplets()
            .filter_map(|(i, j, x)| pivots.iter().position(|&p| p == j).map(|k| (i, k, x.clone())));
        determinant(&Matrix::from_triplets(r, r, entries)).expect("square by construction")
    }

    /// Equality as subspaces.
    pub fn same_subspace(&self, other: &Lattice) -> bool {
        let (a, b) = joint(self, other);
        a.normal_form() == b.normal_form()
    }

    pub fn contains(&self, other: &Lattice) -> bool {
        let (a, b) = joint(self, other);
        let f = Rationals;
        let mut ech = Echelon::new(&f, a.framing.ncols());
        for r in a.framing.rows() {
            ech.insert(r);
        }
        b.framing.rows().iter().all(|r| ech.contains(r))
    }

    /// A random lattice over the window `[start, end)`, with small integer
    /// entries.
    pub fn random<R: Rng>(rng: &mut R, start: i64, end: i64) -> Self {
        let width = (end - start) as usize;
        loop {
            let r = rng.gen_range(0..=width);
            let entries: Vec<(usize, usize, Rational)> = (0..r)
                .flat_map(|i| (0..width).map(move |j| (i, j)))
                .map(|(i, j)| (i, j, q(rng.gen_range(-2..=2))))
                .collect();
            if let Ok(l) = Lattice::new(start, end, Matrix::from_triplets(r, width, entries)) {
                return l;
            }
        }
    }
}

fn joint(a: &Lattice, b: &Lattice) -> (Lattice, Lattice) {
    let start = a.start.min(b.start);
    let end = a.end.max(b.end);
    (a.extend(start, end).expect("joint window"), b.extend(start, end).expect("joint window"))
}

fn from_rows(start: i64, end: i64, rows: Vec<SparseVec<Rational>>) -> Lattice {
    let width = (end - start) as usize;
    let n = rows.len();
    let framing = Matrix::from_triplets(
        n,
        width,
        rows.into_iter().enumerate().flat_map(|(i, r)| r.into_iter().map(move |(j, x)| (i, j, x))),
    );
    Lattice { start, end, framing }
}

/// `(L1 ∩ L2, L1 + L2)` over the joint window, in reduced echelon form.
pub fn lattice_intersect_sum(l1: &Lattice, l2: &Lattice) -> (Lattice, Lattice) {
    let (a, b) = joint(l1, l2);
    let (start, end) = a.window();
    let width = a.framing.ncols();
    let f = Rationals;

    let mut ech = Echelon::new(&f, width);
    for r in a.framing.rows().iter().chain(b.framing.rows()) {
        ech.insert(r);
    }
    let sum = from_rows(start, end, ech.rref());

    // x F_a = y F_b  <=>  (x, -y) in the left kernel of [F_a; F_b]
    let (ra, rb) = (a.framing.nrows(), b.framing.nrows());
    let stacked = Matrix::from_blocks(&[ra, rb], &[width], &[(0, 0, &a.framing), (1, 0, &b.framing)]);
    let left = kernel(&stacked.transpose());
    let mut ech = Echelon::new(&f, width);
    for v in left {
        let x: SparseVec<Rational> = v.into_iter().filter(|(i, _)| *i < ra).collect();
        ech.insert(&a.framing.transpose().apply(&x));
    }
    let meet = from_rows(start, end, ech.rref());
    (meet, sum)
}

/// `dim L1/(L1 ∩ L2) - dim L2/(L1 ∩ L2)`; `relative_dimension(L_a, L_b) = b - a`.
pub fn relative_dimension(l1: &Lattice, l2: &Lattice) -> i64 {
    let (a, b) = joint(l1, l2);
    a.window_rank() as i64 - b.window_rank() as i64
}

/// A graded line: degree and torsor coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetLine {
    pub degree: i64,
    pub scalar: Rational,
}

impl DetLine {
    pub fn compose(&self, next: &DetLine) -> DetLine {
        DetLine { degree: self.degree + next.degree, scalar: &self.scalar * &next.scalar }
    }
}

/// Degree is the relative dimension; the scalar compares the framings of the
/// two lattices against their reduced echelon wedges.
pub fn det_line(l1: &Lattice, l2: &Lattice) -> DetLine {
    DetLine { degree: relative_dimension(l1, l2), scalar: l2.frame_scalar() / l1.frame_scalar() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tower_duality() {
        let incl = |r: usize, c: usize| Matrix::from_triplets(r, c, (0..c).map(|i| (i, i, q(1))));
        let t = Tower::from_dims(Direction::Ind, &[1, 2, 3], vec![incl(2, 1), incl(3, 2)]).unwrap();
        let dt = dualize_tower(&t);
        assert_eq!(dt.direction(), Direction::Pro);
        assert_eq!(dt.stage_dims(), vec![1, 2, 3]);
        let ex = Exact::rational();
        assert_eq!(dt.map_ranks(&ex).unwrap(), t.map_ranks(&ex).unwrap());
        assert_eq!(dualize_tower(&dt), t);
        assert_eq!(dualize_tower(&Tower::zero()).stage_dims(), Vec::<usize>::new());
    }

    #[test]
    fn tower_shape_checked() {
        assert!(Tower::from_dims(Direction::Ind, &[1, 2], vec![Matrix::zeros(1, 2)]).is_err());
    }

    #[test]
    fn intersect_sum_examples() {
        let l0 = Lattice::shift(0);
        let (m, s) = lattice_intersect_sum(&l0, &l0);
        assert!(m.same_subspace(&l0) && s.same_subspace(&l0));
        let (m, s) = lattice_intersect_sum(&Lattice::shift(1), &Lattice::shift(3));
        assert!(m.same_subspace(&Lattice::shift(3)));
        assert!(s.same_subspace(&Lattice::shift(1)));
    }

    #[test]
    fn intersect_sum_containment() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let a = Lattice::random(&mut rng, -2, 2);
            let b = Lattice::random(&mut rng, -1, 3);
            let (m, s) = lattice_intersect_sum(&a, &b);
            assert!(a.contains(&m) && b.contains(&m));
            assert!(s.contains(&a) && s.contains(&b));
            assert_eq!(relative_dimension(&a, &m) + relative_dimension(&m, &b), relative_dimension(&a, &b));
        }
    }

    #[test]
    fn relative_dimension_examples() {
        let l = Lattice::shift(0);
        assert_eq!(relative_dimension(&l, &l), 0);
        assert_eq!(relative_dimension(&Lattice::shift(1), &Lattice::shift(3)), 2);
        for a in -3..=3 {
            for b in -3..=3 {
                assert_eq!(relative_dimension(&Lattice::shift(a), &Lattice::shift(b)), b - a);
            }
        }
    }

    #[test]
    fn det_line_examples() {
        let l0 = Lattice::shift(0);
        assert_eq!(det_line(&l0, &l0), DetLine { degree: 0, scalar: q(1) });
        assert_eq!(det_line(&l0, &Lattice::shift(2)), DetLine { degree: 2, scalar: q(1) });
        let scaled = Lattice::new(0, 1, Matrix::from_triplets(1, 1, [(0, 0, q(5))])).unwrap();
        assert!(scaled.same_subspace(&l0));
        assert_eq!(det_line(&l0, &scaled), DetLine { degree: 0, scalar: q(5) });
    }

    #[test]
    fn extension_is_invisible() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = Lattice::random(&mut rng, -1, 3);
            let b = Lattice::random(&mut rng, 0, 2);
            let (ea, eb) = (a.extend(-4, 6).unwrap(), b.extend(-3, 5).unwrap());
            assert_eq!(relative_dimension(&a, &b), relative_dimension(&ea, &eb));
            assert_eq!(det_line(&a, &b), det_line(&ea, &eb));
            assert!(a.same_subspace(&ea));
        }
    }

    #[test]
    fn framing_must_be_independent() {
        let m = Matrix::from_triplets(2, 2, [(0, 0, q(1)), (1, 0, q(2))]);
        assert!(Lattice::new(0, 2, m).is_err());
    }
}
