//! The acceptance battery: twelve criteria, each a family of exact checks
//! with a runtime budget.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use tate_forge::complex::GradedVectorSpace;
use tate_forge::dglie::{
    ce_cohomology, ce_complex_with, ce_homology, envelope_quotient_oracle, free_cohomology_expected, free_lie,
    pbw_symmetrize, BracketSign, DgLieAlgebra,
};
use tate_forge::koszul::{cech_agreement, cofinality_check, local_cohomology, residue_pairing, self_duality_check, MonomialModule};
use tate_forge::linalg::is_permutation_matrix;
use tate_forge::loopspace::{bubble_fiber_check, bubble_pairing, loop_tangent, subsets_colim_check, ColimMode, SubsetFamily};
use tate_forge::tate::{det_line, relative_dimension, Lattice};
use tate_forge::{Exact, Result};

use crate::report::tool_version;

/// Knobs for one run of the battery.
#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub exact: Exact,
    /// Lie algebras checked alongside the built-in fixtures.
    pub extra_lie: Vec<(String, DgLieAlgebra)>,
    /// Sign family for the CE bracket term.
    pub sign: BracketSign,
    /// Worker threads; `None` uses the ambient pool.
    pub threads: Option<usize>,
    /// Run the determinism criterion (three passes over the others).
    pub determinism: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { exact: Exact::rational(), extra_lie: Vec::new(), sign: BracketSign::default(), threads: None, determinism: true }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Dimension data produced along the way; compared across runs.
    pub tables: BTreeMap<String, Value>,
    #[serde(skip)]
    pub elapsed: Duration,
    #[serde(skip)]
    pub budget: Duration,
}

impl CriterionResult {
    /// One human-readable line.
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!(
            "[{status}] {:>2}. {} ({} checks, {:.2}s of {}s)",
            self.id,
            self.name,
            self.checks,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        );
        if let Some(w) = &self.witness {
            s.push_str(&format!(": {w}"));
        }
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub tool: String,
    pub suite: String,
    pub criteria: Vec<CriterionResult>,
    pub passed: bool,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Accumulates checks; keeps the first failure as the witness.
#[derive(Default)]
struct Check {
    count: usize,
    witness: Option<String>,
    tables: BTreeMap<String, Value>,
}

impl Check {
    fn expect(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.count += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
        }
    }

    fn ok<T>(&mut self, r: Result<T>, context: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(x) => Some(x),
            Err(e) => {
                self.expect(false, || format!("{}: {e}", context()));
                None
            }
        }
    }

    fn table<T: Serialize>(&mut self, key: String, value: &T) {
        self.tables.insert(key, serde_json::to_value(value).expect("tables serialize"));
    }
}

struct Criterion {
    id: u8,
    name: &'static str,
    budget_secs: u64,
    run: fn(&SuiteOptions, &mut Check),
}

const CRITERIA: [Criterion; 11] = [
    Criterion { id: 1, name: "residue pairing is perfect", budget_secs: 1, run: residue_perfection },
    Criterion { id: 2, name: "Koszul self-duality", budget_secs: 10, run: koszul_self_duality },
    Criterion { id: 3, name: "local cohomology concentration", budget_secs: 20, run: local_concentration },
    Criterion { id: 4, name: "cofinality stabilization", budget_secs: 10, run: cofinality },
    Criterion { id: 5, name: "lattice index and determinant laws", budget_secs: 5, run: tate_laws },
    Criterion { id: 6, name: "CE signs square to zero and match the envelope", budget_secs: 60, run: ce_soundness },
    Criterion { id: 7, name: "free Lie cohomology", budget_secs: 30, run: free_lie_cohomology },
    Criterion { id: 8, name: "PBW symmetrization", budget_secs: 30, run: pbw },
    Criterion { id: 9, name: "subsets colimit", budget_secs: 20, run: subsets_colim },
    Criterion { id: 10, name: "loop tangent and bubble fibre", budget_secs: 20, run: loop_and_bubble },
    Criterion { id: 11, name: "bubble symplectic pairing", budget_secs: 5, run: symplectic_pairing },
];

const DETERMINISM_BUDGET_SECS: u64 = 240;

fn run_one(c: &Criterion, opts: &SuiteOptions) -> CriterionResult {
    let start = Instant::now();
    let mut check = Check::default();
    (c.run)(opts, &mut check);
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(c.budget_secs);
    let mut witness = check.witness;
    if witness.is_none() && elapsed > budget {
        witness = Some(format!("took {:.2}s, over the {}s budget", elapsed.as_secs_f64(), c.budget_secs));
    }
    CriterionResult {
        id: c.id,
        name: c.name.into(),
        passed: witness.is_none(),
        checks: check.count,
        witness,
        tables: check.tables,
        elapsed,
        budget,
    }
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build().expect("thread pool").install(f),
        None => f(),
    }
}

/// Criteria 1 to 11, calling `progress` after each.
pub fn run_criteria(opts: &SuiteOptions, progress: &mut dyn FnMut(&CriterionResult)) -> Vec<CriterionResult> {
    let mut out = Vec::new();
    for c in &CRITERIA {
        let r = in_pool(opts.threads, || run_one(c, opts));
        progress(&r);
        out.push(r);
    }
    out
}

fn tables_json(results: &[CriterionResult]) -> String {
    let all: BTreeMap<u8, &BTreeMap<String, Value>> = results.iter().map(|r| (r.id, &r.tables)).collect();
    serde_json::to_string(&all).expect("tables serialize")
}

/// Re-runs criteria 1 to 11 with shuffled bases on other thread counts and
/// compares every dimension table byte for byte.
fn determinism(opts: &SuiteOptions, baseline: &[CriterionResult]) -> CriterionResult {
    let start = Instant::now();
    let reference = tables_json(baseline);
    let mut check = Check::default();
    for (seed, threads) in [(0x5eed_u64, 1usize), (0xface, 3)] {
        let variant = SuiteOptions {
            exact: opts.exact.with_shuffle(seed),
            threads: Some(threads),
            determinism: false,
            ..opts.clone()
        };
        let rerun = run_criteria(&variant, &mut |_| {});
        let got = tables_json(&rerun);
        check.expect(got == reference, || {
            let first = baseline
                .iter()
                .zip(&rerun)
                .find(|(a, b)| a.tables != b.tables)
                .map(|(a, _)| a.id)
                .unwrap_or_default();
            format!("tables differ from the baseline in criterion {first} (shuffle seed {seed:#x}, {threads} threads)")
        });
    }
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(DETERMINISM_BUDGET_SECS);
    let mut witness = check.witness;
    if witness.is_none() && elapsed > budget {
        witness = Some(format!("took {:.2}s, over the {}s budget", elapsed.as_secs_f64(), DETERMINISM_BUDGET_SECS));
    }
    CriterionResult {
        id: 12,
        name: "determinism under shuffling and thread counts".into(),
        passed: witness.is_none(),
        checks: check.count,
        witness,
        tables: BTreeMap::new(),
        elapsed,
        budget,
    }
}

/// The full battery.
pub fn run_acceptance(opts: &SuiteOptions, progress: &mut dyn FnMut(&CriterionResult)) -> SuiteReport {
    let mut criteria = run_criteria(opts, progress);
    if opts.determinism {
        let d = determinism(opts, &criteria);
        progress(&d);
        criteria.push(d);
    }
    let failures: Vec<String> = criteria
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}. {}: {}", c.id, c.name, c.witness.clone().unwrap_or_default()))
        .collect();
    SuiteReport { tool: tool_version(), suite: "acceptance".into(), passed: failures.is_empty(), failures, criteria }
}

fn residue_perfection(_: &SuiteOptions, c: &mut Check) {
    for n in 1..=4 {
        for d in 1..=3 {
            if let Some(m) = c.ok(residue_pairing(n, d), || format!("n={n}, d={d}")) {
                c.expect(is_permutation_matrix(&m), || format!("n={n}, d={d}: not a permutation matrix"));
                c.table(format!("n={n},d={d}"), &m.nrows());
            }
        }
    }
}

fn koszul_self_duality(o: &SuiteOptions, c: &mut Check) {
    for n in 1..=3u32 {
        for d in 1..=3usize {
            for k in 0..=d {
                let Some(r) = c.ok(self_duality_check(d, n, k, 3 * n, &o.exact), || format!("n={n}, d={d}, k={k}")) else {
                    continue;
                };
                c.expect(r.agrees, || format!("n={n}, d={d}, k={k}: {:?} vs {:?}", r.dual_total, r.shifted_total));
                c.table(format!("n={n},d={d},k={k}"), &r.dual_total);
            }
        }
    }
}

fn local_concentration(o: &SuiteOptions, c: &mut Check) {
    for d in 1..=2usize {
        let Some(r) = c.ok(local_cohomology(&MonomialModule::ring(d), 3, 3, &o.exact), || format!("d={d}")) else {
            continue;
        };
        c.expect(r.ring_concentration_holds(), || {
            format!("d={d}: stage dims {:?}", r.stages.iter().map(|s| &s.dims).collect::<Vec<_>>())
        });
        if d == 1 {
            let agree = c.ok(cech_agreement(&r, &o.exact), || "Cech comparison".into());
            c.expect(agree == Some(true), || "d=1: differs from the Cech complex".into());
        }
        let dims: Vec<_> = r.stages.iter().map(|s| &s.dims).collect();
        c.table(format!("d={d}"), &dims);
    }
}

fn cofinality(o: &SuiteOptions, c: &mut Check) {
    for d in 1..=2usize {
        for p in 1..=2u32 {
            let Some(r) = c.ok(cofinality_check(d, p, 4, 4, &o.exact), || format!("d={d}, p={p}")) else {
                continue;
            };
            c.expect(r.stabilization_index == Some(p), || {
                format!("d={d}, p={p}: stabilizes at {:?}, expected {p}", r.stabilization_index)
            });
            let images: Vec<_> = r.stages.iter().map(|s| &s.image_dims).collect();
            c.table(format!("d={d},p={p}"), &(&r.target_dims, images));
        }
    }
}

fn tate_laws(_: &SuiteOptions, c: &mut Check) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a7e);
    let mut indices = Vec::new();
    for t in 0..50 {
        let mut lattice = || {
            let start = rand::Rng::gen_range(&mut rng, -3..=1);
            let width = rand::Rng::gen_range(&mut rng, 0..=6);
            Lattice::random(&mut rng, start, start + width)
        };
        let (a, b, l3) = (lattice(), lattice(), lattice());
        let (ab, bc, ac) = (relative_dimension(&a, &b), relative_dimension(&b, &l3), relative_dimension(&a, &l3));
        c.expect(ab == -relative_dimension(&b, &a), || format!("triple {t}: antisymmetry fails"));
        c.expect(ac == ab + bc, || format!("triple {t}: {ac} != {ab} + {bc}"));
        let composed = det_line(&a, &b).compose(&det_line(&b, &l3));
        let direct = det_line(&a, &l3);
        c.expect(composed.degree == direct.degree, || format!("triple {t}: det degrees differ"));
        c.expect(composed.scalar == direct.scalar, || format!("triple {t}: cocycle scalar is not 1"));
        indices.push((ab, bc, ac));
    }
    c.table("indices".into(), &indices);
}

fn free_on(degrees: &[i32], weight: u32) -> Result<DgLieAlgebra> {
    let mut v = GradedVectorSpace::new();
    for (i, d) in degrees.iter().enumerate() {
        v.push(*d, format!("v{}", i + 1))?;
    }
    Ok(free_lie(&v, weight)?.algebra)
}

/// Abelian algebras up to dimension 3, `sl_2`, and free Lie algebras on at
/// most two generators (truncated at weight 4), plus any extras.
fn fixtures(o: &SuiteOptions) -> Vec<(String, Result<DgLieAlgebra>)> {
    let mut out: Vec<(String, Result<DgLieAlgebra>)> = Vec::new();
    for degrees in [vec![0], vec![1], vec![0, 0], vec![0, 1], vec![1, 1], vec![0, 0, 0], vec![0, 1, 1], vec![-1, 0, 2]] {
        out.push((format!("abelian{degrees:?}"), Ok(DgLieAlgebra::abelian(&degrees))));
    }
    out.push(("sl2".into(), Ok(DgLieAlgebra::sl2())));
    for degrees in [vec![0], vec![1], vec![0, 0], vec![0, 1], vec![1, 1]] {
        out.push((format!("free{degrees:?}"), free_on(&degrees, 4)));
    }
    for (name, l) in &o.extra_lie {
        out.push((name.clone(), Ok(l.clone())));
    }
    out
}

fn ce_soundness(o: &SuiteOptions, c: &mut Check) {
    for (name, l) in fixtures(o) {
        let Some(l) = c.ok(l, || name.clone()) else { continue };
        if c.ok(l.validate(), || name.clone()).is_none() {
            continue;
        }
        let Some(ce) = c.ok(ce_complex_with(&l, 4, o.sign), || format!("{name}, weight 4")) else { continue };
        c.table(format!("{name}/chains"), &ce.dims());
        let env = c.ok(envelope_quotient_oracle(&l, 3, &o.exact), || format!("{name}: envelope"));
        let hom = c.ok(ce_homology(&l, 3, &o.exact), || format!("{name}: CE homology"));
        if let (Some(env), Some(hom)) = (env, hom) {
            c.expect(env.cohomology == hom.total, || format!("{name}: envelope {:?} vs CE {:?}", env.cohomology, hom.total));
            c.expect(env.quotient_dims == hom.chain_dims, || format!("{name}: chain dims differ"));
            c.table(format!("{name}/homology"), &hom.total);
        }
    }
}

/// Degree multisets of size at most 3 drawn from `-1..=2`.
fn small_spaces() -> Vec<Vec<i32>> {
    let degs = [-1, 0, 1, 2];
    let mut out = vec![vec![]];
    for a in 0..4 {
        out.push(vec![degs[a]]);
        for b in a..4 {
            out.push(vec![degs[a], degs[b]]);
            for c in b..4 {
                out.push(vec![degs[a], degs[b], degs[c]]);
            }
        }
    }
    out
}

fn free_lie_cohomology(o: &SuiteOptions, c: &mut Check) {
    for degrees in small_spaces() {
        let Some(l) = c.ok(free_on(&degrees, 3), || format!("free Lie on {degrees:?}")) else { continue };
        let Some(t) = c.ok(ce_cohomology(&l, 3, None, &o.exact), || format!("{degrees:?}")) else { continue };
        let expected = free_cohomology_expected(&degrees);
        c.expect(t.total == expected, || format!("{degrees:?}: {:?} vs {expected:?}", t.total));
        c.table(format!("{degrees:?}"), &t.total);
    }
}

fn pbw(o: &SuiteOptions, c: &mut Check) {
    for (name, l) in fixtures(o) {
        let Some(l) = c.ok(l, || name.clone()) else { continue };
        let Some(cert) = c.ok(pbw_symmetrize(&l, 4, &o.exact), || name.clone()) else { continue };
        c.expect(cert.invertible, || {
            let bad = cert.levels.iter().find(|lv| !lv.invertible).expect("a failing level");
            format!("{name}: weight {} has rank {} for {}x{}", bad.weight, bad.rank, bad.envelope_dim, bad.sym_dim)
        });
        let dims: Vec<_> = cert.levels.iter().map(|lv| (lv.sym_dim, lv.envelope_dim)).collect();
        c.table(name, &dims);
    }
}

fn subsets_colim(o: &SuiteOptions, c: &mut Check) {
    for i in 0..20u64 {
        let d = 1 + (i % 3) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(0xc0_11 + i);
        let Some(f) = c.ok(SubsetFamily::random(&mut rng, d, 2), || format!("family {i}")) else { continue };
        let Some(r) = c.ok(subsets_colim_check(&f, ColimMode::NonemptyD, &o.exact), || format!("family {i}")) else {
            continue;
        };
        c.expect(r.implementations_agree, || format!("family {i} (d={d}): bar {:?} vs recursive {:?}", r.bar, r.recursive));
        c.expect(r.bar == r.expected, || format!("family {i} (d={d}): {:?} vs M_F[d-1] {:?}", r.bar, r.expected));
        c.table(format!("family{i}"), &r.bar);
    }
}

fn loop_and_bubble(o: &SuiteOptions, c: &mut Check) {
    for d in 1..=3usize {
        for n in 1..=2 {
            for p in 1..=2 {
                if let Some(r) = c.ok(loop_tangent(d, n, p, &o.exact), || format!("tangent d={d}, n={n}, p={p}")) {
                    c.expect(r.passes, || format!("tangent d={d}, n={n}, p={p}: {:?}", r.cohomology));
                    c.table(format!("tangent d={d},n={n},p={p}"), &r.cohomology);
                }
                if d > 2 {
                    continue;
                }
                if let Some(r) = c.ok(bubble_fiber_check(d, n, p, &o.exact), || format!("fibre d={d}, n={n}, p={p}")) {
                    c.expect(r.passes, || format!("fibre d={d}, n={n}, p={p}: {:?} / {:?}", r.cotangent, r.tangent));
                    c.table(format!("fibre d={d},n={n},p={p}"), &(&r.cotangent, &r.tangent));
                }
            }
        }
    }
}

fn symplectic_pairing(o: &SuiteOptions, c: &mut Check) {
    for d in 1..=2usize {
        for m in 1..=2usize {
            for n in 1..=3u32 {
                let Some(r) = c.ok(bubble_pairing(d, m, n, n, &o.exact), || format!("d={d}, m={m}, n={n}")) else {
                    continue;
                };
                c.expect(r.invertible, || format!("d={d}, m={m}, n={n}: rank {} of {}", r.rank, r.size));
                c.expect(r.same_degree_blocks_zero, || format!("d={d}, m={m}, n={n}: same-degree block is nonzero"));
                c.expect(r.antisymmetric, || format!("d={d}, m={m}, n={n}: not antisymmetric"));
                c.expect(r.cross_block_matches_residue, || format!("d={d}, m={m}, n={n}: cross block is not residue (x) omega"));
                c.table(format!("d={d},m={m},n={n}"), &json!({"size": r.size, "rank": r.rank}));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_spaces_enumerated() {
        let s = small_spaces();
        assert_eq!(s.len(), 1 + 4 + 10 + 20);
        assert!(s.iter().all(|v| v.len() <= 3));
    }

    #[test]
    fn plain_signs_fail_soundness() {
        let opts = SuiteOptions { sign: BracketSign::Plain, determinism: false, ..SuiteOptions::default() };
        let mut c = Check::default();
        ce_soundness(&opts, &mut c);
        let w = c.witness.expect("a witness");
        assert!(w.contains("d_"), "{w}");
    }
}
