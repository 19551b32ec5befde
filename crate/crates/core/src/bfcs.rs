//! BF partition functions by three routes, and exhaustive checks of the
//! Gauss-sum delta identity, the BF/Chern-Simons relation and the
//! cocycle-count cross-check.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use serde::Serialize;

use crate::abgroup::{FgAbelianGroup, LinkingForm};
use crate::cyclotomic::{exp_sum_over, CycloSum};
use crate::error::{Error, Result};
use crate::homology::ChainComplex;
use crate::sectors::{delta_support, gauss_sum, SectorModel};

/// How the free part of `H_1` enters the partition function.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `prod p_i gcd(k, p_i)`: the free part is dropped.
    #[default]
    TorsionOnly,
    /// `|T| |Hom(H_1, Z_k)| = |T| k^b prod gcd(k, p_i)`.
    IncludeFreeFactor,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::TorsionOnly => "torsion_only",
            Convention::IncludeFreeFactor => "include_free_factor",
        })
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "torsion" | "torsion_only" => Ok(Convention::TorsionOnly),
            "free" | "include_free_factor" => Ok(Convention::IncludeFreeFactor),
            _ => Err(Error::InvalidParameters(format!("unknown convention `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    ClosedFormula,
    HomOrder,
    DeltaCensus,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::ClosedFormula => "closed_formula",
            Route::HomOrder => "hom_order",
            Route::DeltaCensus => "delta_census",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionResult {
    #[serde(serialize_with = "as_string")]
    pub value: BigUint,
    pub route: Route,
    pub convention: Convention,
}

fn as_string<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// `Z_{BF_k}` from the closed formulas.
pub fn partition_bf(h1: &FgAbelianGroup, k: u64, convention: Convention) -> PartitionResult {
    assert!(k >= 1, "k must be positive");
    let torsion: BigUint = h1
        .torsion()
        .iter()
        .map(|&p| BigUint::from(p) * BigUint::from(k.gcd(&p)))
        .product();
    let value = match convention {
        Convention::TorsionOnly => torsion,
        Convention::IncludeFreeFactor => torsion * BigUint::from(k).pow(h1.rank() as u32),
    };
    PartitionResult {
        value,
        route: Route::ClosedFormula,
        convention,
    }
}

/// `Z_{BF_k} = |T| |Hom(G, Z_k)|` with `G = H_1` or, under the torsion-only
/// convention, its torsion subgroup.
pub fn partition_hom(h1: &FgAbelianGroup, k: u64, convention: Convention) -> PartitionResult {
    assert!(k >= 1, "k must be positive");
    let g = match convention {
        Convention::TorsionOnly => h1.torsion_subgroup(),
        Convention::IncludeFreeFactor => h1.clone(),
    };
    PartitionResult {
        value: h1.torsion_order() * g.hom_order_to_zk(k),
        route: Route::HomOrder,
        convention,
    }
}

/// `Z_{BF_k} = |T| int DB delta(k B)`: the multiplicity times the size of
/// the support. This counts the free directions, so it is the
/// include-free-factor value.
pub fn partition_via_delta(model: &SectorModel, k: u64) -> Result<PartitionResult> {
    let support = delta_support(model, k)?;
    Ok(PartitionResult {
        value: &support.multiplicity * support.size(),
        route: Route::DeltaCensus,
        convention: Convention::IncludeFreeFactor,
    })
}

/// The delta route under either convention: the torsion-only value is the
/// census of the model with `b = 0`.
pub fn partition_delta_route(
    h1: &FgAbelianGroup,
    form: &LinkingForm,
    k: u64,
    convention: Convention,
) -> Result<PartitionResult> {
    let b = match convention {
        Convention::TorsionOnly => 0,
        Convention::IncludeFreeFactor => h1.rank(),
    };
    let model = SectorModel::new(b, h1.torsion_subgroup(), form.clone(), k)?;
    let mut result = partition_via_delta(&model, k)?;
    result.convention = convention;
    Ok(result)
}

/// Outcome of [`verify_gauss_delta`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussReport {
    pub holds: bool,
    /// First `tau_B` (lexicographically) where the identity fails.
    pub witness: Option<Vec<u64>>,
    /// The exact sum at the witness.
    pub witness_sum: Option<CycloSum>,
}

/// Checks `sum_{tau_A} e^{-2 pi i k Q(tau_A, tau_B)} = |T| delta_{k tau_B, 0}`
/// for every `tau_B`, with exact cyclotomic sums.
pub fn verify_gauss_delta(t: &FgAbelianGroup, q: &LinkingForm, k: u64) -> Result<GaussReport> {
    check_pair(t, q)?;
    let order = t.torsion_order();
    for y in t.torsion_elements() {
        let sum = gauss_sum(t, q, &y, k);
        let killed = t.scale_torsion(&y, k).iter().all(|&x| x == 0);
        let expected = if killed { order.clone() } else { BigUint::default() };
        if !sum.equals_integer(expected) {
            return Ok(GaussReport {
                holds: false,
                witness: Some(y),
                witness_sum: Some(sum),
            });
        }
    }
    Ok(GaussReport {
        holds: true,
        witness: None,
        witness_sum: None,
    })
}

/// [`verify_gauss_delta`] for several `k` at once, sharing the sums: since
/// `k Q(x, y) = Q(x, k y)`, the sum for `(k, y)` is the `k = 1` sum at `k y`.
pub fn verify_gauss_delta_all(
    t: &FgAbelianGroup,
    q: &LinkingForm,
    ks: &[u64],
) -> Result<Vec<(u64, GaussReport)>> {
    check_pair(t, q)?;
    let e = q.modulus();
    let order = t.torsion_order();
    let elements: Vec<Vec<u64>> = t.torsion_elements().collect();
    // value of the k = 1 sum at each y: Some(true) for |T|, Some(false) for 0
    let mut verdicts: Vec<Option<Option<bool>>> = vec![None; elements.len()];
    let index = |y: &[u64]| -> usize {
        y.iter()
            .zip(t.torsion())
            .fold(0usize, |acc, (&x, &p)| acc * p as usize + x as usize)
    };
    let mut out = Vec::with_capacity(ks.len());
    for &k in ks {
        let mut report = GaussReport {
            holds: true,
            witness: None,
            witness_sum: None,
        };
        for y in &elements {
            let ky = t.scale_torsion(y, k);
            let i = index(&ky);
            let verdict = *verdicts[i].get_or_insert_with(|| {
                let sum = exp_sum_over(e, q.pairings_with(t, &ky).into_iter().map(|a| (e - a) % e));
                if sum.equals_integer(order.clone()) {
                    Some(true)
                } else if sum.is_zero() {
                    Some(false)
                } else {
                    None
                }
            });
            let killed = ky.iter().all(|&x| x == 0);
            if verdict != Some(killed) {
                report = GaussReport {
                    holds: false,
                    witness: Some(y.clone()),
                    witness_sum: Some(gauss_sum(t, q, y, k)),
                };
                break;
            }
        }
        out.push((k, report));
    }
    Ok(out)
}

fn check_pair(t: &FgAbelianGroup, q: &LinkingForm) -> Result<()> {
    if t.rank() != 0 || q.dim() != t.torsion().len() {
        return Err(Error::InvalidLinkingForm(format!(
            "{}x{} form on {t}",
            q.dim(),
            q.dim()
        )));
    }
    if t.torsion_order_u64().is_none() {
        return Err(Error::TooLarge {
            states: t.torsion_order().to_string(),
            guard: u64::MAX,
        });
    }
    Ok(())
}

/// Both sides of the finite BF/Chern-Simons relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackToCsReport {
    pub holds: bool,
    /// `sum_{A,B,C} e^{2 pi i k (l(C,B) + l(A,B) - l(C,A))}`
    pub triple_sum: CycloSum,
    /// `sum_A e^{2 pi i k l(A,A)}`
    pub cs_sum: CycloSum,
    /// `|G| |G[k]|`
    pub normalization: BigUint,
}

/// Checks `sum_{A,B,C} e^{2 pi i k (l(C,B) + l(A,B) - l(C,A))}
/// = |G| |G[k]| sum_A e^{2 pi i k l(A,A)}` by brute force.
///
/// Summing over `B` first forces `k (A + C) = 0`; on that locus the phase is
/// `k l(A, A)`, so each `A` contributes `|G| |G[k]|` times its CS phase.
pub fn verify_back_to_cs(g: &FgAbelianGroup, l: &LinkingForm, k: u64) -> Result<BackToCsReport> {
    check_pair(g, l)?;
    if !l.is_nondegenerate(g) {
        return Err(Error::DegeneratePairing(format!("{l} on {g}")));
    }
    let (triple_sum, cs_sum) = back_to_cs_sums(g, l, k);
    let normalization = g.torsion_order() * g.k_torsion_order(k);
    let scaled = CycloSum::integer(cs_sum.order(), normalization.clone()) * cs_sum.clone();
    Ok(BackToCsReport {
        holds: (triple_sum.clone() - scaled).is_zero(),
        triple_sum,
        cs_sum,
        normalization,
    })
}

/// The two sums of the BF/CS relation for any symmetric form.
pub fn back_to_cs_sums(g: &FgAbelianGroup, l: &LinkingForm, k: u64) -> (CycloSum, CycloSum) {
    let e = l.modulus();
    let elements: Vec<Vec<u64>> = g.torsion_elements().collect();
    let size = elements.len();
    let ke = k % e;
    // table[x][y] = k l(x, y) numerator mod e
    let table: Vec<Vec<u64>> = elements
        .iter()
        .map(|y| l.pairings_with(g, y).into_iter().map(|a| a * ke % e).collect())
        .collect();
    let mut counts = vec![0u64; e as usize];
    for a in 0..size {
        for c in 0..size {
            let base = (e - table[c][a]) % e;
            for b in 0..size {
                counts[((base + table[c][b] + table[a][b]) % e) as usize] += 1;
            }
        }
    }
    let triple = exp_sum_over(e, expand(&counts));
    let cs = exp_sum_over(e, (0..size).map(|a| table[a][a]));
    (triple, cs)
}

fn expand(counts: &[u64]) -> impl Iterator<Item = u64> + '_ {
    counts
        .iter()
        .enumerate()
        .flat_map(|(j, &c)| std::iter::repeat_n(j as u64, c as usize))
}

/// Both sides of the cocycle-count cross-check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TvReport {
    pub holds: bool,
    /// `|T_1| |H^1(C; Z_k)|`
    pub state_sum: BigUint,
    pub partition: BigUint,
}

/// Compares `|T_1| |H^1(C; Z_k)|`, the cohomology order counted from mod-k
/// cochains, with the include-free-factor partition function of `H_1(C)`.
pub fn tv_crosscheck(c: &ChainComplex, k: u64) -> Result<TvReport> {
    let h0 = c.homology(0)?;
    if h0.rank() != 1 || !h0.is_torsion_free() {
        return Err(Error::InvalidParameters(format!(
            "H_0 = {h0}; the complex is not connected"
        )));
    }
    let h1 = c.homology(1)?;
    let state_sum = h1.torsion_order() * c.cohomology_zk_order(1, k);
    let partition = partition_bf(&h1, k, Convention::IncludeFreeFactor).value;
    Ok(TvReport {
        holds: state_sum == partition,
        state_sum,
        partition,
    })
}
