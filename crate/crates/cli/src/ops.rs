//! Dispatch from a job to the library, with the invariants each operation
//! asserts.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use tate_forge::complex::GradedVectorSpace;
use tate_forge::dglie::{
    ce_cohomology, ce_homology, envelope_quotient_oracle, free_lie, free_lie_dim_oracle, pbw_symmetrize, Representation,
};
use tate_forge::koszul::{
    cech_agreement, cofinality_check, cone_identity_check, koszul_complex, local_cohomology, residue_pairing,
    self_duality_check, MonomialModule,
};
use tate_forge::linalg::is_permutation_matrix;
use tate_forge::loopspace::{
    bubble_fiber_check, bubble_pairing, count_generators, formal_sphere, hilbert_series, loop_tangent,
    subsets_colim_check, SubsetFamily,
};
use tate_forge::tate::{det_line, dualize_tower, lattice_intersect_sum, relative_dimension, Lattice, Tower};
use tate_forge::Exact;

use crate::encode;
use crate::schema::*;
use crate::{input_error, JobResult};

/// One asserted invariant and, when it fails, what broke it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Verdict {
    pub fn new(name: &str, pass: bool) -> Self {
        Self { name: name.into(), pass, witness: None }
    }

    pub fn with_witness(name: &str, pass: bool, witness: impl FnOnce() -> String) -> Self {
        Self { name: name.into(), pass, witness: (!pass).then(witness) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub result: Value,
    pub verdicts: Vec<Verdict>,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

/// Runs a job. Relative paths inside the parameters are resolved against `base`.
pub fn execute(job: &JobSpec, base: &Path) -> JobResult<Outcome> {
    let exact = job.exact()?;
    use Operation::*;
    match job.operation {
        ResiduePairing => residue(params(job)?),
        KoszulComplex => koszul(params(job)?, &exact),
        KoszulSelfDuality => self_duality(params(job)?, &exact),
        LocalCohomology => local(params(job)?, &exact),
        Cofinality => cofinality(params(job)?, &exact),
        DualizeTower => tower(params(job)?, &exact),
        LatticeIndex => lattices(params(job)?),
        LieValidate => lie_validate(params(job)?, base),
        CeHomology => ce_hom(params(job)?, base, &exact),
        CeCohomology => ce_cohom(params(job)?, base, &exact),
        FreeLie => free(params(job)?),
        Pbw => pbw(params(job)?, base, &exact),
        EnvelopeOracle => envelope(params(job)?, base, &exact),
        CountGenerators => count(params(job)?),
        SubsetsColim => colim(params(job)?, &exact),
        LoopTangent => tangent(params(job)?, &exact),
        BubbleFiber => fiber(params(job)?, &exact),
        FormalSphere => sphere(params(job)?),
        BubblePairing => pairing(params(job)?, &exact),
        Hilbert => hilbert(params(job)?),
    }
}

fn check_d(d: usize) -> JobResult<usize> {
    check_range("d", d, 1, bounds::D)
}

fn check_power(name: &str, n: u32, lo: u32) -> JobResult<u32> {
    check_range(name, n, lo, bounds::POWER)
}

fn residue(p: ResidueParams) -> JobResult<Outcome> {
    check_d(p.d)?;
    check_power("n", p.n, 1)?;
    let m = residue_pairing(p.n, p.d)?;
    let perm = is_permutation_matrix(&m);
    Ok(Outcome {
        result: json!({"size": m.nrows(), "matrix": encode::matrix(&m)}),
        verdicts: vec![Verdict::new("permutation matrix", perm)],
    })
}

fn koszul(p: KoszulParams, exact: &Exact) -> JobResult<Outcome> {
    check_d(p.d)?;
    check_power("n", p.n, 1)?;
    check_range("k", p.k, 0, p.d)?;
    check_range("window", p.window, 0, bounds::WINDOW)?;
    let data = koszul_complex(p.d, p.n, p.k, p.window)?;
    let slices = data.cohomology(exact)?;
    let h0 = data.h0_basis(exact)?;
    let mut verdicts = Vec::new();
    if p.k == p.d && p.window + 1 >= p.n {
        let expected = (p.n as usize).pow(p.d as u32);
        verdicts.push(Verdict::with_witness("H^0 has dimension n^d", h0.len() == expected, || {
            format!("found {} monomials, expected {expected}", h0.len())
        }));
    }
    if p.k < p.d {
        let bad = cone_identity_check(p.d, p.n, p.k, p.window, exact)?;
        verdicts.push(Verdict::with_witness("next complex is the cone of x^n", bad.is_empty(), || {
            format!("multidegree {:?}", bad[0])
        }));
    }
    Ok(Outcome { result: json!({"slices": to_value(&slices), "h0_basis": h0}), verdicts })
}

fn self_duality(p: KoszulParams, exact: &Exact) -> JobResult<Outcome> {
    check_d(p.d)?;
    check_power("n", p.n, 1)?;
    check_range("k", p.k, 0, p.d)?;
    check_range("window", p.window, 0, bounds::WINDOW)?;
    let r = self_duality_check(p.d, p.n, p.k, p.window, exact)?;
    let verdict = Verdict::with_witness("dual matches shift by -k", r.agrees, || {
        let row = r.rows.iter().find(|row| row.dual_dims != row.shifted_dims).expect("a disagreeing row");
        format!("multidegree {:?}: {:?} vs {:?}", row.multidegree, row.dual_dims, row.shifted_dims)
    });
    Ok(Outcome { result: to_value(&r), verdicts: vec![verdict] })
}

fn local(p: LocalParams, exact: &Exact) -> JobResult<Outcome> {
    check_d(p.d)?;
    check_power("n_max", p.n_max, 1)?;
    check_range("window", p.window, 0, bounds::WINDOW)?;
    let is_ring = p.module.is_empty();
    let module = if is_ring { MonomialModule::ring(p.d) } else { MonomialModule::new(p.d, p.module)? };
    let r = local_cohomology(&module, p.n_max, p.window, exact)?;
    let mut verdicts = Vec::new();
    if is_ring {
        verdicts.push(Verdict::new("concentrated in degree d with injective transitions", r.ring_concentration_holds()));
        if p.d == 1 {
            verdicts.push(Verdict::new("agrees with the Cech complex", cech_agreement(&r, exact)?));
        }
    }
    Ok(Outcome { result: to_value(&r), verdicts })
}

fn cofinality(p: CofinalityParams, exact: &Exact) -> JobResult<Outcome> {
    check_d(p.d)?;
    check_power("p", p.p, 1)?;
    check_power("n_max", p.n_max, 1)?;
    check_range("window", p.window, 0, bounds::WINDOW)?;
    let r = cofinality_check(p.d, p.p, p.n_max, p.window, exact)?;
    let verdict = Verdict::with_witness("stabilizes", r.stabilization_index.is_some(), || {
        "no stage from which the colimit matches Hom(A_p, A)".into()
    });
    Ok(Outcome { result: to_value(&r), verdicts: vec![verdict] })
}

fn tower(p: TowerParams, exact: &Exact) -> JobResult<Outcome> {
    if p.dims.len() > bounds::TOWER_STAGE || p.dims.iter().any(|d| *d > bounds::TOWER_STAGE) {
        return Err(input_error(format!("towers are limited to {} stages of dimension {}", bounds::TOWER_STAGE, bounds::TOWER_STAGE)));
    }
    if p.maps.len() + 1 != p.dims.len().max(1) {
        return Err(input_error(format!("{} stages need {} maps", p.dims.len(), p.dims.len().saturating_sub(1))));
    }
    let maps = p
        .maps
        .iter()
        .enumerate()
        .map(|(k, rows)| {
            let (src, tgt) = match p.direction {
                tate_forge::tate::Direction::Ind => (p.dims[k], p.dims[k + 1]),
                tate_forge::tate::Direction::Pro => (p.dims[k + 1], p.dims[k]),
            };
            let m = encode::parse_matrix(rows, src)?;
            if m.nrows() != tgt {
                return Err(input_error(format!("map {k} has {} rows, expected {tgt}", m.nrows())));
            }
            Ok(m)
        })
        .collect::<JobResult<Vec<_>>>()?;
    let t = Tower::from_dims(p.direction, &p.dims, maps)?;
    let dual = dualize_tower(&t);
    let double = dualize_tower(&dual);
    let summary = |t: &Tower| -> JobResult<Value> {
        Ok(json!({
            "direction": t.direction(),
            "stage_dims": t.stage_dims(),
            "map_ranks": t.map_ranks(exact)?,
            "maps": t.maps().iter().map(encode::matrix).collect::<Vec<_>>(),
        }))
    };
    let preserved = double.stage_dims() == t.stage_dims()
        && double.map_ranks(exact)? == t.map_ranks(exact)?
        && double.associated_cohomology(exact)? == t.associated_cohomology(exact)?;
    Ok(Outcome {
        result: json!({"input": summary(&t)?, "dual": summary(&dual)?}),
        verdicts: vec![Verdict::new("double dual preserves dimension data", preserved)],
    })
}

fn lattices(p: LatticeParams) -> JobResult<Outcome> {
    check_range("number of lattices", p.lattices.len(), 1, 8)?;
    let ls: Vec<Lattice> = p.lattices.iter().map(LatticeSpec::build).collect::<JobResult<_>>()?;
    let mut pairs = Vec::new();
    let mut antisymmetric = true;
    let mut contained = true;
    for (i, a) in ls.iter().enumerate() {
        for (j, b) in ls.iter().enumerate() {
            if i >= j {
                continue;
            }
            let (meet, sum) = lattice_intersect_sum(a, b);
            contained &= a.contains(&meet) && b.contains(&meet) && sum.contains(a) && sum.contains(b);
            let r = relative_dimension(a, b);
            antisymmetric &= r == -relative_dimension(b, a);
            let det = det_line(a, b);
            pairs.push(json!({
                "pair": [i, j],
                "relative_dimension": r,
                "det_degree": det.degree,
                "det_scalar": encode::rational(&det.scalar),
                "intersection_window_rank": meet.window_rank(),
                "sum_window_rank": sum.window_rank(),
            }));
        }
    }
    let mut verdicts = vec![Verdict::new("intersection and sum bound both lattices", contained), Verdict::new("antisymmetry", antisymmetric)];
    let mut cocycle = true;
    let mut det_cocycle = true;
    for a in &ls {
        for b in &ls {
            for c in &ls {
                cocycle &= relative_dimension(a, c) == relative_dimension(a, b) + relative_dimension(b, c);
                det_cocycle &= det_line(a, b).compose(&det_line(b, c)) == det_line(a, c);
            }
        }
    }
    if ls.len() >= 3 {
        verdicts.push(Verdict::new("relative dimension cocycle", cocycle));
        verdicts.push(Verdict::new("determinant line cocycle", det_cocycle));
    }
    Ok(Outcome { result: json!({"pairs": pairs}), verdicts })
}

fn lie_validate(p: LieParams, base: &Path) -> JobResult<Outcome> {
    let l = p.lie.load(base)?;
    let v = l.validate()?;
    Ok(Outcome { result: to_value(&v), verdicts: vec![Verdict::new("dg-Lie axioms", true)] })
}

fn check_weight(w: u32) -> JobResult<u32> {
    check_range("weight", w, 0, bounds::WEIGHT)
}

fn ce_hom(p: LieWeightParams, base: &Path, exact: &Exact) -> JobResult<Outcome> {
    check_weight(p.weight)?;
    let l = p.lie.load(base)?;
    let t = ce_homology(&l, p.weight, exact)?;
    Ok(Outcome { result: to_value(&t), verdicts: vec![Verdict::new("CE differential squares to zero", true)] })
}

fn ce_cohom(p: CeCohomologyParams, base: &Path, exact: &Exact) -> JobResult<Outcome> {
    check_weight(p.weight)?;
    let l = p.lie.load(base)?;
    l.validate()?;
    let rep = match p.coefficients {
        Coefficients::Trivial => None,
        Coefficients::Adjoint => Some(Representation::adjoint(&l)),
    };
    let t = ce_cohomology(&l, p.weight, rep.as_ref(), exact)?;
    Ok(Outcome { result: to_value(&t), verdicts: vec![Verdict::new("CE differential squares to zero", true)] })
}

fn free(p: FreeLieParams) -> JobResult<Outcome> {
    check_weight(p.weight)?;
    check_range("number of generators", p.degrees.len(), 1, 4)?;
    let mut v = GradedVectorSpace::new();
    for (i, d) in p.degrees.iter().enumerate() {
        v.push(*d, format!("v{}", i + 1))?;
    }
    let f = free_lie(&v, p.weight)?;
    let oracle = free_lie_dim_oracle(&p.degrees, p.weight);
    let signed = |t: &std::collections::BTreeMap<i32, usize>| t.iter().map(|(d, n)| (*d, *n as i64)).collect();
    let mut agree = true;
    for w in 1..=p.weight {
        let got: std::collections::BTreeMap<i32, i64> = f.dims.get(&w).map(signed).unwrap_or_default();
        let want: std::collections::BTreeMap<i32, i64> =
            oracle.get(&w).map(|t| t.iter().filter(|(_, n)| **n != 0).map(|(d, n)| (*d, *n)).collect()).unwrap_or_default();
        agree &= got == want;
    }
    let l = &f.algebra;
    let basis: Vec<Value> = (0..l.dim())
        .map(|i| json!({"label": l.labels()[i], "degree": l.degree(i), "weight": l.weight(i)}))
        .collect();
    Ok(Outcome {
        result: json!({"dims": to_value(&f.dims), "basis": basis}),
        verdicts: vec![Verdict::new("dimensions match the generating-series count", agree)],
    })
}

fn pbw(p: LieWeightParams, base: &Path, exact: &Exact) -> JobResult<Outcome> {
    check_range("weight", p.weight, 0, 6)?;
    let l = p.lie.load(base)?;
    let c = pbw_symmetrize(&l, p.weight, exact)?;
    let verdict = Verdict::with_witness("symmetrization is bijective", c.invertible, || {
        let bad = c.levels.iter().find(|lv| !lv.invertible).expect("a failing level");
        format!("weight {}: rank {} of {}x{}", bad.weight, bad.rank, bad.envelope_dim, bad.sym_dim)
    });
    Ok(Outcome { result: to_value(&c), verdicts: vec![verdict] })
}

fn envelope(p: LieWeightParams, base: &Path, exact: &Exact) -> JobResult<Outcome> {
    check_weight(p.weight)?;
    let l = p.lie.load(base)?;
    let r = envelope_quotient_oracle(&l, p.weight, exact)?;
    let ce = ce_homology(&l, p.weight, exact)?;
    let verdict = Verdict::with_witness("agrees with CE homology", r.cohomology == ce.total, || {
        format!("envelope {:?} vs CE {:?}", r.cohomology, ce.total)
    });
    Ok(Outcome { result: json!({"envelope": to_value(&r), "ce_total": to_value(&ce.total)}), verdicts: vec![verdict] })
}

fn count(p: CountParams) -> JobResult<Outcome> {
    check_d(p.d)?;
    check_power("n", p.n, 0)?;
    check_power("p", p.p, 0)?;
    let c = count_generators(p.d, subset_from(&p.e, p.d)?, p.n, p.p)?;
    let ok = c.count as u64 == c.formula;
    Ok(Outcome { result: to_value(&c), verdicts: vec![Verdict::new("product formula matches enumeration", ok)] })
}

fn colim(p: ColimParams, exact: &Exact) -> JobResult<Outcome> {
    check_range("d", p.d, 1, bounds::CUBE_DIM.min(3))?;
    let family = match (p.n, p.p, p.seed) {
        (Some(n), Some(pp), None) => {
            check_power("n", n, 0)?;
            check_power("p", pp, 0)?;
            SubsetFamily::windows(p.d, n, pp)?
        }
        (None, None, Some(seed)) => {
            let max_dim = check_range("max_dim", p.max_dim.unwrap_or(2), 0, 4)?;
            SubsetFamily::random(&mut ChaCha8Rng::seed_from_u64(seed), p.d, max_dim)?
        }
        _ => return Err(input_error("subsets-colim needs either n and p (window family) or seed (random family)")),
    };
    let r = subsets_colim_check(&family, p.mode, exact)?;
    let verdicts = vec![
        Verdict::new("bar and recursive colimits agree", r.implementations_agree),
        Verdict::with_witness("matches the expected dimensions", r.bar == r.expected, || {
            format!("{:?} vs {:?}", r.bar, r.expected)
        }),
    ];
    Ok(Outcome { result: to_value(&r), verdicts })
}

fn tangent(p: LoopParams, exact: &Exact) -> JobResult<Outcome> {
    check_range("d", p.d, 1, 3)?;
    check_power("n", p.n, 1)?;
    check_power("p", p.p, 1)?;
    let r = loop_tangent(p.d, p.n, p.p, exact)?;
    let v = Verdict::with_witness("(p+1)^d in degree 0 and n^d in degree 1-d", r.passes, || format!("{:?}", r.cohomology));
    Ok(Outcome { result: to_value(&r), verdicts: vec![v] })
}

fn fiber(p: LoopParams, exact: &Exact) -> JobResult<Outcome> {
    check_range("d", p.d, 1, 3)?;
    check_power("n", p.n, 1)?;
    check_power("p", p.p, 1)?;
    let r = bubble_fiber_check(p.d, p.n, p.p, exact)?;
    let v = Verdict::with_witness("(p+1)^d in degree 0 and n^d in degree -d", r.passes, || {
        format!("cotangent {:?}, tangent {:?}", r.cotangent, r.tangent)
    });
    Ok(Outcome { result: to_value(&r), verdicts: vec![v] })
}

fn sphere(p: LoopParams) -> JobResult<Outcome> {
    check_d(p.d)?;
    check_power("n", p.n, 1)?;
    check_power("p", p.p, 1)?;
    let s = formal_sphere(p.d, p.n, p.p)?;
    let a = &s.algebra;
    let expected = (p.p as usize).pow(p.d as u32) + (p.n as usize).pow(p.d as u32);
    let basis: Vec<Value> = (0..a.dim()).map(|i| json!({"label": a.labels()[i], "degree": a.degree(i)})).collect();
    Ok(Outcome {
        result: json!({"dim": a.dim(), "base_dim": s.base_dim, "basis": basis}),
        verdicts: vec![
            Verdict::new("dimension p^d + n^d", a.dim() == expected),
            Verdict::new("augmentation is an algebra map", s.augmentation_is_algebra_map),
        ],
    })
}

fn pairing(p: PairingParams, exact: &Exact) -> JobResult<Outcome> {
    check_range("d", p.d, 1, 3)?;
    check_range("m", p.m, 1, bounds::HALF_DIM)?;
    check_power("n", p.n, 1)?;
    let top = check_power("p", p.p.unwrap_or(p.n), p.n)?;
    let r = bubble_pairing(p.d, p.m, p.n, top, exact)?;
    let mut verdicts = vec![
        Verdict::new("same-degree blocks vanish", r.same_degree_blocks_zero),
        Verdict::new("graded antisymmetric", r.antisymmetric),
    ];
    if top == p.n {
        verdicts.push(Verdict::with_witness("invertible", r.invertible, || format!("rank {} of {}", r.rank, r.size)));
        verdicts.push(Verdict::new("cross block is residue (x) omega", r.cross_block_matches_residue));
    } else {
        let expected = ((top as usize).pow(p.d as u32) - (p.n as usize).pow(p.d as u32)) * 2 * p.m;
        verdicts.push(Verdict::with_witness("kernel is the pro/ind mismatch", r.kernel_dim == expected, || {
            format!("kernel {} vs {expected}", r.kernel_dim)
        }));
    }
    let mut result = to_value(&r);
    result["matrix"] = encode::matrix(&r.matrix);
    Ok(Outcome { result, verdicts })
}

fn hilbert(p: HilbertParams) -> JobResult<Outcome> {
    check_d(p.d)?;
    check_power("n", p.n, 0)?;
    check_power("p", p.p, 0)?;
    check_range("m", p.m, 1, bounds::POWER)?;
    check_range("cutoff", p.cutoff, 0, bounds::CUTOFF)?;
    let counts = hilbert_series(p.d, subset_from(&p.e, p.d)?, p.n, p.p, p.m, p.cutoff)?;
    Ok(Outcome { result: json!({"counts": counts}), verdicts: vec![] })
}
