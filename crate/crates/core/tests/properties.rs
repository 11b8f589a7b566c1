use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tate_forge::complex::{cone, shift_dims, ChainMap};
use tate_forge::dglie::{ce_cohomology, ce_homology, free_cohomology_expected, free_lie, free_lie_dim_oracle, DgLieAlgebra};
use tate_forge::koszul::{residue_pairing_is_perfect, self_duality_check};
use tate_forge::linalg::{kernel, Matrix};
use tate_forge::loopspace::{
    bubble_fiber_check, bubble_pairing, count_generators, loop_tangent, subsets_colim_check, ColimMode, SubsetFamily,
};
use tate_forge::scalar::q;
use tate_forge::tate::{det_line, dualize_tower, lattice_intersect_sum, relative_dimension, Direction, Lattice, Tower};
use tate_forge::{cohomology_dims, ChainComplex, DimTable, Exact, GradedVectorSpace};

fn ex() -> Exact {
    Exact::rational()
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let mut entries = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            if rng.gen_bool(0.5) {
                entries.push((i, j, q(rng.gen_range(-2..=2))));
            }
        }
    }
    Matrix::from_triplets(rows, cols, entries)
}

/// A three-term complex in degrees -1, 0, 1 with at most `max_dim` basis
/// vectors; the first differential is drawn from the kernel of the second.
fn random_complex(seed: u64, max_dim: usize) -> ChainComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dims = [0usize; 3];
    for _ in 0..rng.gen_range(0..=max_dim) {
        dims[rng.gen_range(0..3)] += 1;
    }
    let [a, b, c] = dims;
    let second = random_matrix(&mut rng, c, b);
    let ker = kernel(&second);
    let mut first = Vec::new();
    for j in 0..a {
        for v in &ker {
            let t = q(rng.gen_range(-1..=1));
            for (i, x) in v {
                first.push((*i, j, x * &t));
            }
        }
    }
    let mut space = GradedVectorSpace::new();
    for (deg, n) in [(-1, a), (0, b), (1, c)] {
        for i in 0..n {
            space.push(deg, format!("v{deg}_{i}")).unwrap();
        }
    }
    let diff = BTreeMap::from([(-1, Matrix::from_triplets(b, a, first)), (0, second)]);
    ChainComplex::new(space, diff).unwrap()
}

fn h(c: &ChainComplex) -> DimTable {
    cohomology_dims(c, &ex()).unwrap()
}

fn convolve(a: &DimTable, b: &DimTable) -> DimTable {
    let mut t = DimTable::new();
    for (i, x) in a {
        for (j, y) in b {
            *t.entry(i + j).or_default() += x * y;
        }
    }
    t.retain(|_, v| *v > 0);
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shift_moves_cohomology(seed: u64, k in -3i32..=3) {
        let c = random_complex(seed, 6);
        prop_assert_eq!(h(&c.shift(k)), shift_dims(&h(&c), k));
        prop_assert_eq!(c.shift(k).shift(-k), c);
    }

    #[test]
    fn dual_reflects_cohomology(seed: u64) {
        let c = random_complex(seed, 6);
        let reflected: DimTable = h(&c).into_iter().map(|(n, d)| (-n, d)).collect();
        prop_assert_eq!(h(&c.dual()), reflected);
    }

    #[test]
    fn kunneth(s1: u64, s2: u64) {
        let (a, b) = (random_complex(s1, 3), random_complex(s2, 3));
        prop_assert_eq!(h(&a.tensor(&b)), convolve(&h(&a), &h(&b)));
    }

    #[test]
    fn cones_of_identity_and_zero(s1: u64, s2: u64) {
        let (m, n) = (random_complex(s1, 5), random_complex(s2, 5));
        prop_assert!(h(&cone(&ChainMap::identity(&m))).is_empty());
        let mut split = shift_dims(&h(&m), 1);
        for (k, v) in h(&n) {
            *split.entry(k).or_default() += v;
        }
        prop_assert_eq!(h(&cone(&ChainMap::zero(&m, &n))), split);
    }

    #[test]
    fn basis_order_is_irrelevant(seed: u64, shuffle: u64) {
        let c = random_complex(seed, 6);
        let (s, _) = c.shuffled(shuffle);
        prop_assert_eq!(h(&s), h(&c));
        prop_assert_eq!(cohomology_dims(&c, &ex().with_shuffle(shuffle)).unwrap(), h(&c));
    }

    #[test]
    fn euler_characteristic_survives_cohomology(seed: u64) {
        let c = random_complex(seed, 6);
        let chi: i64 = h(&c).iter().map(|(n, d)| if n % 2 == 0 { *d as i64 } else { -(*d as i64) }).sum();
        prop_assert_eq!(c.euler_characteristic(), chi);
    }

    #[test]
    fn hocolim_implementations_agree(seed: u64, d in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let family = SubsetFamily::random(&mut rng, d, 2).unwrap();
        for mode in [ColimMode::NonemptyD, ColimMode::AllD] {
            let r = subsets_colim_check(&family, mode, &ex()).unwrap();
            prop_assert!(r.implementations_agree, "{:?}", r);
            prop_assert!(r.passes, "{:?}", r);
        }
    }

    #[test]
    fn relative_dimension_is_a_cocycle(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ls: Vec<Lattice> = (0..3).map(|_| Lattice::random(&mut rng, 0, 6)).collect();
        let r = |i: usize, j: usize| relative_dimension(&ls[i], &ls[j]);
        prop_assert_eq!(r(0, 2), r(0, 1) + r(1, 2));
        prop_assert_eq!(r(0, 1), -r(1, 0));
        let (d01, d12) = (det_line(&ls[0], &ls[1]), det_line(&ls[1], &ls[2]));
        prop_assert_eq!(d01.compose(&d12), det_line(&ls[0], &ls[2]));
        prop_assert_eq!(d01.degree, r(0, 1));
    }

    #[test]
    fn intersection_and_sum(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (Lattice::random(&mut rng, 0, 6), Lattice::random(&mut rng, 0, 6));
        let (meet, sum) = lattice_intersect_sum(&a, &b);
        prop_assert!(a.contains(&meet) && b.contains(&meet));
        prop_assert!(sum.contains(&a) && sum.contains(&b));
        prop_assert_eq!(relative_dimension(&sum, &meet), relative_dimension(&sum, &a) + relative_dimension(&sum, &b));
    }

    #[test]
    fn double_dual_of_a_tower(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims: Vec<usize> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(0..=4)).collect();
        let maps = dims.windows(2).map(|w| random_matrix(&mut rng, w[1], w[0])).collect();
        let t = Tower::from_dims(Direction::Ind, &dims, maps).unwrap();
        let dd = dualize_tower(&dualize_tower(&t));
        prop_assert_eq!(dd.direction(), Direction::Ind);
        prop_assert_eq!(dd.stage_dims(), t.stage_dims());
        prop_assert_eq!(dd.map_ranks(&ex()).unwrap(), t.map_ranks(&ex()).unwrap());
        prop_assert_eq!(dd.associated_cohomology(&ex()).unwrap(), t.associated_cohomology(&ex()).unwrap());
    }

    #[test]
    fn ce_of_abelian_algebras(degrees in prop::collection::vec(-1i32..=2, 0..=3)) {
        let l = DgLieAlgebra::abelian(&degrees);
        let hom = ce_homology(&l, 3, &ex()).unwrap();
        prop_assert_eq!(&hom.total, &hom.chain_dims.iter().filter(|(_, v)| **v > 0).map(|(k, v)| (*k, *v)).collect::<DimTable>());
        let co = ce_cohomology(&l, 3, None, &ex()).unwrap();
        let reflected: DimTable = hom.total.iter().map(|(k, v)| (-k, *v)).collect();
        prop_assert_eq!(co.total, reflected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ce_of_free_algebras(degrees in prop::collection::vec(-1i32..=1, 1..=2)) {
        let mut v = GradedVectorSpace::new();
        for (i, d) in degrees.iter().enumerate() {
            v.push(*d, format!("x{i}")).unwrap();
        }
        let l = free_lie(&v, 3).unwrap().algebra;
        prop_assert_eq!(ce_cohomology(&l, 3, None, &ex()).unwrap().total, free_cohomology_expected(&degrees));
    }

    #[test]
    fn self_duality(d in 1usize..=2, n in 1u32..=2, k in 0usize..=2) {
        let k = k.min(d);
        prop_assert!(self_duality_check(d, n, k, 2 * n + 1, &ex()).unwrap().agrees);
    }
}

#[test]
fn free_lie_matches_necklace_counts() {
    for degrees in [vec![0], vec![1], vec![0, 0], vec![0, 1], vec![1, 1], vec![-1, 0], vec![2, 1]] {
        let mut v = GradedVectorSpace::new();
        for (i, d) in degrees.iter().enumerate() {
            v.push(*d, format!("x{i}")).unwrap();
        }
        let f = free_lie(&v, 5).unwrap();
        let oracle = free_lie_dim_oracle(&degrees, 5);
        for w in 1..=5 {
            let got: BTreeMap<i32, i64> =
                f.dims.get(&w).into_iter().flatten().filter(|(_, n)| **n > 0).map(|(d, n)| (*d, *n as i64)).collect();
            let want: BTreeMap<i32, i64> = oracle.get(&w).into_iter().flatten().filter(|(_, n)| **n != 0).map(|(d, n)| (*d, *n)).collect();
            assert_eq!(got, want, "degrees {degrees:?}, weight {w}");
        }
    }
}

#[test]
fn generator_count_formula() {
    for d in 1..=3usize {
        for e in 0..(1u32 << d) {
            for n in 0..=3 {
                for p in 0..=3 {
                    let c = count_generators(d, e, n, p).unwrap();
                    assert_eq!(c.count as u64, c.formula, "d={d} e={e:#b} n={n} p={p}");
                }
            }
        }
    }
}

#[test]
fn loop_tangent_identity() {
    for d in 1..=3 {
        for n in 1..=2 {
            for p in 1..=2 {
                let r = loop_tangent(d, n, p, &ex()).unwrap();
                assert!(r.passes, "{r:?}");
            }
        }
    }
}

#[test]
fn bubble_fiber_identity() {
    for d in 1..=2 {
        for n in 1..=2 {
            for p in 1..=2 {
                let r = bubble_fiber_check(d, n, p, &ex()).unwrap();
                assert!(r.passes, "{r:?}");
            }
        }
    }
}

#[test]
fn bubble_pairing_is_perfect() {
    for d in 1..=2 {
        for m in 1..=2 {
            for n in 1..=3 {
                let r = bubble_pairing(d, m, n, n, &ex()).unwrap();
                assert!(r.invertible && r.same_degree_blocks_zero && r.cross_block_matches_residue, "{r:?}");
            }
        }
    }
}

#[test]
fn residue_pairing_is_perfect_in_small_cases() {
    for n in 1..=4 {
        for d in 1..=3 {
            assert!(residue_pairing_is_perfect(n, d).unwrap());
        }
    }
}
