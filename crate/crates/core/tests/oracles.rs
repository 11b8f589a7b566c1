//! Frozen reference values, computed independently of the implementation
//! (by hand, by enumeration, or by a classical formula).

use std::collections::BTreeMap;

use tate_forge::complex::{cohomology_dims, cone, hopullback, ChainComplex, ChainMap, DimTable, GradedVectorSpace};
use tate_forge::dglie::{
    ce_cohomology, ce_homology, envelope_quotient_oracle, free_lie, pbw_symmetrize, square_zero, BaseCdga, CdgaModule,
    DgLieAlgebra, Elem, LieElem,
};
use tate_forge::koszul::{
    cofinality_check, koszul_complex, local_cohomology, residue_pairing, self_duality_check, MonomialModule,
};
use tate_forge::linalg::Matrix;
use tate_forge::loopspace::{
    bubble_fiber_check, bubble_pairing, count_generators, formal_sphere, hilbert_series, loop_tangent,
    subsets_colim_check, ColimMode, SubsetFamily,
};
use tate_forge::scalar::q;
use tate_forge::tate::{det_line, dualize_tower, lattice_intersect_sum, relative_dimension, Direction, Lattice, Tower};
use tate_forge::{Error, Exact};

fn ex() -> Exact {
    Exact::rational()
}

fn dims(pairs: &[(i32, usize)]) -> DimTable {
    pairs.iter().copied().collect()
}

fn k(deg: i32) -> ChainComplex {
    ChainComplex::concentrated(deg, vec!["1"])
}

fn space(degrees: &[i32]) -> GradedVectorSpace {
    let mut v = GradedVectorSpace::new();
    for (i, d) in degrees.iter().enumerate() {
        v.push(*d, format!("v{}", i + 1)).unwrap();
    }
    v
}

// chain complexes

#[test]
fn row_vector_differential_has_one_cocycle() {
    let s = GradedVectorSpace::from_components([(0, vec!["a", "b"]), (1, vec!["c"])]).unwrap();
    let d = Matrix::from_triplets(1, 2, [(0, 0, q(1)), (0, 1, q(1))]);
    let c = ChainComplex::new(s, BTreeMap::from([(0, d)])).unwrap();
    assert_eq!(cohomology_dims(&c, &ex()).unwrap(), dims(&[(0, 1)]));
}

#[test]
fn cone_of_x_squared_on_truncated_polynomials() {
    // internal degree j: x^{j-2} -> x^j, so H^0 is the cokernel
    let mut h0 = Vec::new();
    for j in 0..=4 {
        let tgt = ChainComplex::concentrated(0, vec![format!("x^{j}")]);
        let src = if j >= 2 { ChainComplex::concentrated(0, vec![format!("x^{}", j - 2)]) } else { ChainComplex::zero() };
        let comps = if j >= 2 { BTreeMap::from([(0, Matrix::identity(1))]) } else { BTreeMap::new() };
        let f = ChainMap::new(src, tgt, comps).unwrap();
        h0.push(cohomology_dims(&cone(&f), &ex()).unwrap().get(&0).copied().unwrap_or(0));
    }
    assert_eq!(h0, vec![1, 1, 0, 0, 0]);
}

#[test]
fn diagonal_pullback_of_a_line() {
    let id = ChainMap::identity(&k(0));
    assert_eq!(cohomology_dims(&hopullback(&id, &id).unwrap(), &ex()).unwrap(), dims(&[(0, 1)]));
}

#[test]
fn punctured_square_with_only_the_top_corner() {
    let mut family = BTreeMap::new();
    for m in 0..4u32 {
        family.insert(m, if m == 0b11 { k(0) } else { ChainComplex::zero() });
    }
    let f = SubsetFamily::new(2, family).unwrap();
    let r = subsets_colim_check(&f, ColimMode::NonemptyD, &ex()).unwrap();
    assert_eq!(r.bar, dims(&[(-1, 1)]));
    assert_eq!(r.recursive, dims(&[(-1, 1)]));
}

#[test]
fn punctured_square_of_lines() {
    let f = SubsetFamily::new(2, (0..4).map(|m| (m, k(0))).collect()).unwrap();
    let r = subsets_colim_check(&f, ColimMode::NonemptyD, &ex()).unwrap();
    assert_eq!(r.bar, dims(&[(-1, 1)]));
    assert!(r.implementations_agree);
}

// Koszul complexes, residues, local cohomology

#[test]
fn koszul_of_one_variable() {
    let kd = koszul_complex(1, 1, 1, 3).unwrap();
    assert_eq!(kd.h0_basis(&ex()).unwrap(), vec![vec![0]]);
}

#[test]
fn koszul_h0_basis_in_two_variables() {
    let kd = koszul_complex(2, 2, 2, 4).unwrap();
    assert_eq!(kd.h0_basis(&ex()).unwrap(), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
}

#[test]
fn koszul_with_no_sequence_is_the_ring() {
    let kd = koszul_complex(2, 3, 0, 2).unwrap();
    assert!(kd.cohomology(&ex()).unwrap().iter().all(|s| s.dims == dims(&[(0, 1)])));
}

#[test]
fn self_duality_examples() {
    assert!(self_duality_check(1, 2, 1, 4, &ex()).unwrap().agrees);
    assert!(self_duality_check(2, 1, 2, 3, &ex()).unwrap().agrees);
    assert!(self_duality_check(2, 2, 0, 3, &ex()).unwrap().agrees);
}

#[test]
fn residue_matrices() {
    assert_eq!(residue_pairing(1, 1).unwrap(), Matrix::identity(1));
    let anti = Matrix::from_triplets(2, 2, [(0, 1, q(1)), (1, 0, q(1))]);
    assert_eq!(residue_pairing(2, 1).unwrap(), anti);
    // basis 1, x2, x1, x1x2 pairs a with (1,1) - a
    let m = residue_pairing(2, 2).unwrap();
    let want = Matrix::from_triplets(4, 4, (0..4).map(|i| (i, 3 - i, q(1))));
    assert_eq!(m, want);
}

#[test]
fn local_cohomology_of_the_line() {
    let r = local_cohomology(&MonomialModule::ring(1), 3, 3, &ex()).unwrap();
    let got: Vec<DimTable> = r.stages.iter().map(|s| s.dims.clone()).collect();
    assert_eq!(got, vec![dims(&[(1, 1)]), dims(&[(1, 2)]), dims(&[(1, 3)])]);
    assert!(r.stages.iter().all(|s| s.transition_injective != Some(false)));
}

#[test]
fn local_cohomology_of_the_plane_at_first_stage() {
    let r = local_cohomology(&MonomialModule::ring(2), 1, 2, &ex()).unwrap();
    assert_eq!(r.stages[0].dims, dims(&[(2, 1)]));
}

#[test]
fn local_cohomology_of_the_residue_field() {
    let r = local_cohomology(&MonomialModule::residue_field(1), 3, 2, &ex()).unwrap();
    // x acts by zero, so each stage is k (+) k[-1]; only degree 0 survives
    assert!(r.stages.iter().all(|s| s.dims == dims(&[(0, 1), (1, 1)])));
    assert!(r.stages[..2].iter().all(|s| s.image_dims == dims(&[(0, 1)])));
}

#[test]
fn cofinality_stabilization_points() {
    assert_eq!(cofinality_check(1, 1, 3, 2, &ex()).unwrap().stabilization_index, Some(1));
    assert_eq!(cofinality_check(1, 2, 4, 3, &ex()).unwrap().stabilization_index, Some(2));
    assert_eq!(cofinality_check(2, 1, 2, 2, &ex()).unwrap().stabilization_index, Some(1));
}

// lattices

#[test]
fn shift_lattices() {
    let (l1, l3) = (Lattice::shift(1), Lattice::shift(3));
    let (meet, sum) = lattice_intersect_sum(&l1, &l3);
    assert!(meet.same_subspace(&l3));
    assert!(sum.same_subspace(&l1));
    assert_eq!(relative_dimension(&l1, &l3), 2);
    assert_eq!(relative_dimension(&l1, &l1), 0);
}

#[test]
fn determinant_lines() {
    let l0 = Lattice::shift(0);
    let d = det_line(&l0, &l0);
    assert_eq!((d.degree, d.scalar), (0, q(1)));
    let d = det_line(&l0, &Lattice::shift(2));
    assert_eq!((d.degree, d.scalar), (2, q(1)));
    let scaled = Lattice::new(0, 1, Matrix::from_triplets(1, 1, [(0, 0, q(5))])).unwrap();
    let d = det_line(&l0, &scaled);
    assert_eq!((d.degree, d.scalar), (0, q(5)));
}

#[test]
fn dual_of_an_inclusion_tower() {
    let incl = |r: usize, c: usize| Matrix::from_triplets(r, c, (0..c).map(|i| (i, i, q(1))));
    let t = Tower::from_dims(Direction::Ind, &[1, 2, 3], vec![incl(2, 1), incl(3, 2)]).unwrap();
    let d = dualize_tower(&t);
    assert_eq!(d.direction(), Direction::Pro);
    assert_eq!(d.stage_dims(), vec![1, 2, 3]);
    assert_eq!(d.map_ranks(&ex()).unwrap(), vec![1, 2]);
}

// dg-Lie algebras

#[test]
fn sl2_is_a_lie_algebra_and_corruption_is_caught() {
    let v = DgLieAlgebra::sl2().validate().unwrap();
    assert!(v.triples_checked >= 27);
    // [e, f] = h + e
    let bad = DgLieAlgebra::sl2().with_bracket(0, 2, LieElem::from([((0, 1), q(1)), ((0, 0), q(1))]));
    match bad.validate() {
        Err(Error::LieAxiomViolation { axiom, .. }) => assert_eq!(axiom, "Jacobi"),
        other => panic!("expected a Jacobi violation, got {other:?}"),
    }
}

fn weight_totals(f: &tate_forge::dglie::FreeLie, w: u32) -> Vec<usize> {
    (1..=w).map(|i| f.dims.get(&i).map_or(0, |t| t.values().sum())).collect()
}

#[test]
fn free_lie_dimensions() {
    assert_eq!(weight_totals(&free_lie(&space(&[0, 0]), 4).unwrap(), 4), vec![2, 1, 2, 3]);
    assert_eq!(weight_totals(&free_lie(&space(&[0]), 4).unwrap(), 4), vec![1, 0, 0, 0]);
    assert_eq!(weight_totals(&free_lie(&space(&[1]), 2).unwrap(), 2), vec![1, 1]);
}

#[test]
fn pbw_dimension_counts() {
    let c = pbw_symmetrize(&DgLieAlgebra::sl2(), 2, &ex()).unwrap();
    let top = c.levels.last().unwrap();
    assert_eq!((top.sym_dim, top.envelope_dim), (10, 10));
    let l = free_lie(&space(&[0, 0]), 3).unwrap().algebra;
    let top = pbw_symmetrize(&l, 3, &ex()).unwrap().levels.last().unwrap().clone();
    assert_eq!((top.sym_dim, top.envelope_dim), (15, 15));
    assert!(pbw_symmetrize(&DgLieAlgebra::abelian(&[0, 1]), 3, &ex()).unwrap().invertible);
}

#[test]
fn sl2_chevalley_eilenberg() {
    let h = ce_homology(&DgLieAlgebra::sl2(), 3, &ex()).unwrap();
    assert_eq!(h.total, dims(&[(0, 1), (-3, 1)]));
    assert_eq!(h.chain_dims, dims(&[(0, 1), (-1, 3), (-2, 3), (-3, 1)]));
    let c = ce_cohomology(&DgLieAlgebra::sl2(), 3, None, &ex()).unwrap();
    assert_eq!(c.total, dims(&[(0, 1), (3, 1)]));
}

#[test]
fn odd_abelian_line_has_one_class_per_weight() {
    let h = ce_homology(&DgLieAlgebra::abelian(&[1]), 4, &ex()).unwrap();
    for w in 0..=4 {
        assert_eq!(h.by_weight[&w], dims(&[(0, 1)]), "weight {w}");
    }
}

#[test]
fn odd_abelian_plane_cohomology() {
    let c = ce_cohomology(&DgLieAlgebra::abelian(&[1, 1]), 4, None, &ex()).unwrap();
    for w in 0..=4u32 {
        assert_eq!(c.by_weight[&w], dims(&[(0, w as usize + 1)]), "weight {w}");
    }
}

#[test]
fn free_lie_chevalley_eilenberg() {
    // H(free V) = k (+) V[1]: generators of degree 0 and 1 land in -1 and 0
    let l = free_lie(&space(&[0, 1]), 3).unwrap().algebra;
    assert_eq!(ce_homology(&l, 3, &ex()).unwrap().total, dims(&[(-1, 1), (0, 2)]));
    assert_eq!(ce_cohomology(&l, 3, None, &ex()).unwrap().total, dims(&[(0, 2), (1, 1)]));
}

#[test]
fn envelope_agrees_with_ce() {
    for (l, w) in [(DgLieAlgebra::abelian(&[0]), 4), (free_lie(&space(&[0]), 3).unwrap().algebra, 3), (DgLieAlgebra::sl2(), 3)] {
        let env = envelope_quotient_oracle(&l, w, &ex()).unwrap();
        assert_eq!(env.cohomology, ce_homology(&l, w, &ex()).unwrap().total);
    }
}

#[test]
fn square_zero_examples() {
    let kf = BaseCdga::field();
    let unit_action = |m: usize| vec![(0..m).map(|i| Elem::from([(i, q(1))])).collect::<Vec<_>>()];
    let eps = CdgaModule::new(&kf, vec!["eps".into()], vec![1], unit_action(1), vec![Elem::new()]).unwrap();
    let a = square_zero(&kf, &eps).unwrap();
    assert_eq!(a.dim(), 2);
    assert!(a.basis_product(1, 1).is_empty());
    let plane = CdgaModule::new(&kf, vec!["u".into(), "v".into()], vec![0, 0], unit_action(2), vec![Elem::new(); 2]).unwrap();
    let b = square_zero(&kf, &plane).unwrap();
    assert_eq!(b.dim(), 3);
    assert!(b.basis_product(1, 2).is_empty());
}

// loop and bubble spaces

#[test]
fn generator_counts() {
    assert_eq!(count_generators(2, 0b01, 1, 1).unwrap().count, 6);
    assert_eq!(count_generators(1, 0b1, 2, 0).unwrap().count, 3);
    assert_eq!(count_generators(3, 0, 4, 1).unwrap().count, 8);
}

#[test]
fn loop_tangent_examples() {
    assert_eq!(loop_tangent(1, 2, 1, &ex()).unwrap().cohomology, dims(&[(0, 4)]));
    assert_eq!(loop_tangent(2, 1, 1, &ex()).unwrap().cohomology, dims(&[(0, 4), (-1, 1)]));
    assert_eq!(loop_tangent(2, 2, 1, &ex()).unwrap().cohomology, dims(&[(0, 4), (-1, 4)]));
}

#[test]
fn bubble_fiber_examples() {
    assert_eq!(bubble_fiber_check(1, 1, 1, &ex()).unwrap().cotangent, dims(&[(0, 2), (-1, 1)]));
    assert_eq!(bubble_fiber_check(2, 1, 1, &ex()).unwrap().cotangent, dims(&[(0, 4), (-2, 1)]));
    assert_eq!(bubble_fiber_check(2, 2, 2, &ex()).unwrap().cotangent, dims(&[(0, 9), (-2, 4)]));
}

#[test]
fn formal_sphere_dimensions() {
    assert_eq!(formal_sphere(1, 2, 2).unwrap().algebra.dim(), 4);
    assert_eq!(formal_sphere(2, 1, 1).unwrap().algebra.dim(), 2);
    assert_eq!(formal_sphere(1, 1, 3).unwrap().algebra.dim(), 4);
    assert!(matches!(formal_sphere(1, 2, 1), Err(Error::InvalidBounds(_))));
}

#[test]
fn pairing_matrices() {
    let omega = Matrix::from_triplets(2, 2, [(0, 1, q(1)), (1, 0, q(-1))]);
    let r = bubble_pairing(1, 1, 1, 1, &ex()).unwrap();
    // basis (1 (x) e1, 1 (x) e2, top (x) e1, top (x) e2)
    let cross = Matrix::from_triplets(2, 2, r.matrix.triplets().filter(|(i, j, _)| *i < 2 && *j >= 2).map(|(i, j, x)| (i, j - 2, x.clone())));
    assert_eq!(cross, omega);
    assert!(r.invertible);
    let r = bubble_pairing(1, 1, 2, 2, &ex()).unwrap();
    assert_eq!(r.size, 8);
    assert!(r.invertible && r.same_degree_blocks_zero && r.cross_block_matches_residue);
}

#[test]
fn hilbert_counts() {
    assert_eq!(hilbert_series(1, 0b1, 1, 1, 2, 2).unwrap(), vec![1, 3, 5]);
    assert_eq!(hilbert_series(1, 0b1, 2, 0, 2, 1).unwrap(), vec![1, 3]);
    assert_eq!(hilbert_series(2, 0b11, 1, 1, 1, 3).unwrap(), hilbert_series(2, 0, 1, 1, 1, 3).unwrap());
}
