//! Exhaustive verification suites over families of groups, forms and
//! complexes, with per-case failure reports.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::abgroup::{torsion_groups_up_to, FgAbelianGroup, LinkingForm};
use crate::bfcs::{tv_crosscheck, verify_back_to_cs, verify_gauss_delta, verify_gauss_delta_all};
use crate::cyclotomic::CycloSum;
use crate::error::{Error, Result};
use crate::homology::{ChainComplex, SimplicialComplex};
use crate::manifolds::{catalog, lens_space};
use crate::sectors::{delta_support, verify_order_independence, SectorModel};

/// Outcome of one suite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: u64,
    pub failures: Vec<CaseFailure>,
    /// Cases that must fail, and how many of them did.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negative_controls: Option<NegativeControls>,
    /// Cases not run because they exceed an enumeration guard.
    pub skipped: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseFailure {
    pub case: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NegativeControls {
    pub cases: u64,
    pub detected: u64,
    /// The first few `(case, witness)` pairs.
    pub examples: Vec<CaseFailure>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            cases: 0,
            failures: Vec::new(),
            negative_controls: None,
            skipped: 0,
        }
    }

    fn fail(&mut self, case: String, detail: String) {
        self.failures.push(CaseFailure { case, detail });
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
            && self
                .negative_controls
                .as_ref()
                .is_none_or(|n| n.detected == n.cases)
    }
}

/// Which nondegenerate forms a suite runs on each group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FormPolicy {
    /// Up to this many nondegenerate forms are taken; beyond it a seeded
    /// random subset of this size.
    pub limit: usize,
    pub seed: u64,
}

impl Default for FormPolicy {
    fn default() -> Self {
        FormPolicy { limit: 256, seed: 0 }
    }
}

/// Above this many symmetric forms, sampling replaces enumeration.
const ENUMERATE_FORMS_UP_TO: u64 = 4096;

/// Distinct nondegenerate forms on `t` chosen by `policy`, in a
/// deterministic order.
pub fn forms_for(t: &FgAbelianGroup, policy: FormPolicy, rng: &mut ChaCha8Rng) -> Vec<LinkingForm> {
    let total = LinkingForm::count_on(t);
    if total <= BigUint::from(ENUMERATE_FORMS_UP_TO) {
        let all: Vec<LinkingForm> = LinkingForm::all_on(t).filter(|q| q.is_nondegenerate(t)).collect();
        if all.len() <= policy.limit {
            return all;
        }
        let mut picked = sample(rng, all.len(), policy.limit).into_vec();
        picked.sort_unstable();
        return picked.into_iter().map(|i| all[i].clone()).collect();
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(policy.limit);
    let mut attempts = 0usize;
    while out.len() < policy.limit && attempts < policy.limit * 200 {
        attempts += 1;
        let q = LinkingForm::random(t, rng);
        if q.is_nondegenerate(t) && seen.insert(q.to_strings()) {
            out.push(q);
        }
    }
    out
}

/// Linking forms of the catalog and of lens spaces, restricted to torsion
/// of order at most `max_order`.
pub fn catalog_forms(max_order: u64) -> Vec<(String, FgAbelianGroup, LinkingForm)> {
    let mut specs = catalog();
    for p in 2..=max_order {
        for q in 1..p {
            if p.gcd(&q) == 1 && (q == 1 || p <= 30) {
                specs.push(lens_space(p, q).expect("coprime"));
            }
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for m in specs {
        let t = m.h1().torsion_subgroup();
        if t.torsion_order() > BigUint::from(max_order) {
            continue;
        }
        if let Some(q) = m.linking_form {
            if seen.insert((t.torsion().to_vec(), q.to_strings())) {
                out.push((m.name, t, q));
            }
        }
    }
    out
}

fn case(t: &FgAbelianGroup, q: &LinkingForm, k: u64) -> String {
    format!("T = {t}, Q = {q}, k = {k}")
}

/// The Gauss-sum delta identity for catalog forms and for the forms chosen
/// by `policy` on every torsion group of order at most `max_order`, for
/// each `k` in `ks`. Each group of order > 1 also runs a degenerate form at
/// `k = 1`, which must fail with a witness.
pub fn gauss_suite(max_order: u64, ks: &[u64], policy: FormPolicy) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("gauss");
    let mut controls = NegativeControls {
        cases: 0,
        detected: 0,
        examples: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    let run = |report: &mut SuiteReport, t: &FgAbelianGroup, q: &LinkingForm| -> Result<()> {
        for (k, r) in verify_gauss_delta_all(t, q, ks)? {
            report.cases += 1;
            if !r.holds {
                report.fail(case(t, q, k), witness_text(&r.witness, &r.witness_sum));
            }
        }
        Ok(())
    };
    for (_, t, q) in catalog_forms(max_order) {
        run(&mut report, &t, &q)?;
    }
    for t in torsion_groups_up_to(max_order) {
        for q in forms_for(&t, policy, &mut rng) {
            run(&mut report, &t, &q)?;
        }
        if t.torsion().is_empty() {
            continue;
        }
        let degenerate = (0..64)
            .map(|_| LinkingForm::random(&t, &mut rng))
            .find(|q| !q.is_nondegenerate(&t))
            .unwrap_or_else(|| LinkingForm::zero(&t));
        let r = verify_gauss_delta(&t, &degenerate, 1)?;
        controls.cases += 1;
        if !r.holds && r.witness.is_some() {
            controls.detected += 1;
            if controls.examples.len() < 5 {
                controls.examples.push(CaseFailure {
                    case: case(&t, &degenerate, 1),
                    detail: witness_text(&r.witness, &r.witness_sum),
                });
            }
        } else {
            report.fail(case(&t, &degenerate, 1), "degenerate form passed".into());
        }
    }
    report.negative_controls = Some(controls);
    Ok(report)
}

fn witness_text(witness: &Option<Vec<u64>>, sum: &Option<CycloSum>) -> String {
    match (witness, sum) {
        (Some(w), Some(s)) => format!("tau_B = {w:?}, sum = {s}"),
        (Some(w), None) => format!("tau_B = {w:?}"),
        _ => String::new(),
    }
}

/// The BF/CS relation for every nondegenerate form on every group of order
/// at most `max_order`, and every `k <= max_k`.
pub fn back_to_cs_suite(max_order: u64, max_k: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("backtocs");
    for t in torsion_groups_up_to(max_order) {
        for q in LinkingForm::all_on(&t).filter(|q| q.is_nondegenerate(&t)) {
            for k in 1..=max_k {
                report.cases += 1;
                let r = verify_back_to_cs(&t, &q, k)?;
                if !r.holds {
                    report.fail(
                        case(&t, &q, k),
                        format!(
                            "triple sum {} but {} x {}",
                            r.triple_sum, r.normalization, r.cs_sum
                        ),
                    );
                }
            }
        }
    }
    Ok(report)
}

/// One brute-force determination of the BF/CS normalization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizationCase {
    pub group: String,
    pub form: String,
    pub k: u64,
    /// The integer `N` with `triple = N cs`, when `cs != 0` determines it.
    pub derived: Option<u64>,
    /// `|G| |G[k]|`
    pub expected: u64,
    pub consistent: bool,
}

/// Recovers the constant `N` in `sum_{A,B,C} = N sum_A` for every
/// nondegenerate form on `g` and every `k <= max_k`, summing phases one
/// term at a time with no use of the delta identity.
pub fn normalization_bruteforce(g: &FgAbelianGroup, max_k: u64) -> Vec<NormalizationCase> {
    let elements: Vec<Vec<u64>> = g.torsion_elements().collect();
    let size = elements.len() as u64;
    let mut out = Vec::new();
    for q in LinkingForm::all_on(g).filter(|q| q.is_nondegenerate(g)) {
        let order = q.modulus();
        for k in 1..=max_k {
            let kr = Rational64::from_integer(k as i64);
            let phase = |x: &[u64], y: &[u64]| q.pair(x, y) * kr;
            // e^{2 pi i r} = zeta_order^{r order}
            let index = |r: Rational64| {
                let x = (r - r.floor()) * Rational64::from_integer(order as i64);
                x.to_integer() as u64
            };
            let mut triple = CycloSum::zero(order);
            for a in &elements {
                for b in &elements {
                    for c in &elements {
                        triple.add_term(index(phase(c, b) + phase(a, b) - phase(c, a)), 1);
                    }
                }
            }
            let mut cs = CycloSum::zero(order);
            for a in &elements {
                cs.add_term(index(phase(a, a)), 1);
            }
            let expected = size * g.k_torsion_order(k).to_u64().expect("small group");
            let scaled = |n: u64| CycloSum::integer(order, BigUint::from(n)) * cs.clone();
            let derived = if cs.is_zero() {
                None
            } else {
                (0..=size * size).find(|&n| (triple.clone() - scaled(n)).is_zero())
            };
            let consistent = match derived {
                Some(n) => n == expected,
                None => triple.is_zero(),
            };
            out.push(NormalizationCase {
                group: g.to_string(),
                form: q.to_string(),
                k,
                derived,
                expected,
                consistent,
            });
        }
    }
    out
}

/// One point of the delta-census grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusCase {
    pub torsion: Vec<u64>,
    pub b: usize,
    pub k: u64,
    pub resolution: u64,
    #[serde(serialize_with = "as_string")]
    pub support: BigUint,
    #[serde(serialize_with = "as_string")]
    pub expected: BigUint,
    /// Support larger than one point: `delta(k B)` is not a rescaled
    /// `delta(B)`.
    pub not_rescaled_delta: bool,
    pub orders_agree: bool,
}

fn as_string<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl CensusCase {
    pub fn holds(&self) -> bool {
        // at k = 1 the two sides coincide, so no spread is possible
        let must_spread = self.k > 1 && (self.b > 0 || self.torsion.iter().any(|&p| p.gcd(&self.k) > 1));
        self.support == self.expected && self.orders_agree && self.not_rescaled_delta == must_spread
    }
}

/// A fixed nondegenerate form on `t`: `1 / p_i` on the diagonal.
pub fn diagonal_form(t: &FgAbelianGroup) -> LinkingForm {
    let n = t.torsion().len();
    let values = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational64::new(1, t.torsion()[i] as i64)
                    } else {
                        Rational64::from_integer(0)
                    }
                })
                .collect()
        })
        .collect();
    LinkingForm::new(t, values).expect("diagonal forms are compatible")
}

/// Enumerates the sectors of `(b, T, Q)` at resolution `k lcm(p_i)` in all
/// six step orders and compares the support with `k^b prod gcd(k, p_i)`.
pub fn census_case(t: &FgAbelianGroup, q: &LinkingForm, b: usize, k: u64) -> Result<CensusCase> {
    let resolution = k * t.exponent();
    let model = SectorModel::new(b, t.clone(), q.clone(), resolution)?;
    let support = delta_support(&model, k)?.size();
    let expected = BigUint::from(k).pow(b as u32)
        * t.torsion()
            .iter()
            .map(|&p| BigUint::from(p.gcd(&k)))
            .product::<BigUint>();
    Ok(CensusCase {
        torsion: t.torsion().to_vec(),
        b,
        k,
        resolution,
        not_rescaled_delta: support > BigUint::one(),
        support,
        expected,
        orders_agree: verify_order_independence(&model, k)?,
    })
}

/// The census grid: `T` in `Z_4`, `Z_2 + Z_4`, `Z_6`, `b <= 2`, `k <= max_k`.
pub fn census_grid(max_k: u64) -> Result<Vec<CensusCase>> {
    let mut out = Vec::new();
    for chain in [vec![4], vec![2, 4], vec![6]] {
        let t = FgAbelianGroup::new(0, chain)?;
        let q = diagonal_form(&t);
        for b in 0..=2 {
            for k in 1..=max_k {
                out.push(census_case(&t, &q, b, k)?);
            }
        }
    }
    Ok(out)
}

/// [`census_grid`] as a suite.
pub fn order_independence_suite(max_k: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("order-independence");
    for c in census_grid(max_k)? {
        report.cases += 1;
        if !c.holds() {
            report.fail(
                format!("T = {:?}, b = {}, k = {}", c.torsion, c.b, c.k),
                format!(
                    "support {} (expected {}), orders agree: {}",
                    c.support, c.expected, c.orders_agree
                ),
            );
        }
    }
    Ok(report)
}

/// Chain complexes for the cocycle-count check: lens CW complexes with
/// `p <= max_p` and two circles.
pub fn tv_complexes(max_p: u64) -> Result<Vec<(String, ChainComplex)>> {
    let mut out: Vec<(String, ChainComplex)> = (1..=max_p as i64)
        .map(|p| (format!("lens_cw({p})"), ChainComplex::lens_cw(p)))
        .collect();
    let triangle = SimplicialComplex::from_facets(&[vec![0, 1], vec![1, 2], vec![0, 2]])?;
    out.push(("hollow triangle".into(), triangle.boundary_matrices()?));
    let square = SimplicialComplex::from_facets(&[vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]])?;
    out.push(("hollow square".into(), square.boundary_matrices()?));
    Ok(out)
}

/// `|T_1| |H^1(C; Z_k)|` against the include-free-factor partition
/// function, and the brute-force cocycle count against the SNF count
/// wherever the cochain space fits the guard.
pub fn tv_suite(max_p: u64, max_k: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("tv");
    for (name, c) in tv_complexes(max_p)? {
        for k in 1..=max_k {
            report.cases += 1;
            let r = tv_crosscheck(&c, k)?;
            if !r.holds {
                report.fail(
                    format!("{name}, k = {k}"),
                    format!("state sum {} but partition {}", r.state_sum, r.partition),
                );
            }
            match c.count_cocycles_bruteforce(1, k) {
                Ok((cocycles, coboundaries)) => {
                    let fast = c.cohomology_zk_order(1, k);
                    if cocycles % coboundaries != 0 || BigUint::from(cocycles / coboundaries) != fast {
                        report.fail(
                            format!("{name}, k = {k}"),
                            format!("{cocycles} cocycles / {coboundaries} coboundaries, SNF gives {fast}"),
                        );
                    }
                }
                Err(Error::TooLarge { .. }) => report.skipped += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms_for_is_deterministic_and_distinct() {
        let t = FgAbelianGroup::new(0, vec![2, 2, 2, 2, 2]).unwrap();
        let policy = FormPolicy { limit: 20, seed: 7 };
        let a = forms_for(&t, policy, &mut ChaCha8Rng::seed_from_u64(7));
        let b = forms_for(&t, policy, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
        assert_eq!(a.len(), 20);
        let distinct: BTreeSet<_> = a.iter().map(LinkingForm::to_strings).collect();
        assert_eq!(distinct.len(), 20);
        assert!(a.iter().all(|q| q.is_nondegenerate(&t)));
        // Z_5 has exactly four nondegenerate forms
        let z5 = FgAbelianGroup::new(0, vec![5]).unwrap();
        assert_eq!(forms_for(&z5, policy, &mut ChaCha8Rng::seed_from_u64(0)).len(), 4);
    }

    #[test]
    fn small_suites_pass() {
        let g = gauss_suite(16, &[1, 2, 3], FormPolicy { limit: 8, seed: 1 }).unwrap();
        assert!(g.passed(), "{:?}", g.failures);
        let n = g.negative_controls.as_ref().unwrap();
        assert!(n.cases > 0 && n.detected == n.cases);
        assert!(back_to_cs_suite(8, 3).unwrap().passed());
        assert!(tv_suite(4, 4).unwrap().passed());
    }

    #[test]
    fn normalization_on_z2_and_z3() {
        for p in [2, 3] {
            let g = FgAbelianGroup::cyclic(p).unwrap();
            let cases = normalization_bruteforce(&g, 6);
            assert!(cases.iter().all(|c| c.consistent));
            assert!(cases.iter().any(|c| c.derived.is_some()));
        }
    }

    #[test]
    fn census_small_case() {
        let t = FgAbelianGroup::new(0, vec![4]).unwrap();
        let c = census_case(&t, &diagonal_form(&t), 1, 2).unwrap();
        assert_eq!(c.support, BigUint::from(4u32));
        assert!(c.holds());
        let c = census_case(&t, &diagonal_form(&t), 0, 3).unwrap();
        assert_eq!(c.support, BigUint::one());
        assert!(!c.not_rescaled_delta && c.holds());
    }
}
