//! Finite model of a field decomposed as `(n, tau, theta, omega)`: a free
//! class in `Z^b`, a torsion class, a point of the torus `(R/Z)^b` on the
//! lattice `(1/m) Z`, and a symbolic flag for the remaining
//! infinite-dimensional component.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::abgroup::{format_fraction, FgAbelianGroup, LinkingForm};
use crate::cyclotomic::{exp_sum_over, CycloSum};
use crate::error::{Error, Result};

/// `b`, the torsion group `T` with its nondegenerate form `Q`, and the
/// resolution `m` of the theta lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorModel {
    b: usize,
    torsion: FgAbelianGroup,
    form: LinkingForm,
    resolution: u64,
}

impl SectorModel {
    pub fn new(b: usize, torsion: FgAbelianGroup, form: LinkingForm, resolution: u64) -> Result<Self> {
        if torsion.rank() != 0 {
            return Err(Error::InvalidGroup(format!("{torsion} is not a torsion group")));
        }
        if form.dim() != torsion.torsion().len() {
            return Err(Error::InvalidLinkingForm(format!(
                "{}x{} form on {torsion}",
                form.dim(),
                form.dim()
            )));
        }
        if !form.is_nondegenerate(&torsion) {
            return Err(Error::DegeneratePairing(format!("{form} on {torsion}")));
        }
        if resolution == 0 {
            return Err(Error::InvalidParameters("resolution must be positive".into()));
        }
        Ok(SectorModel {
            b,
            torsion,
            form,
            resolution,
        })
    }

    /// The model of a group `Z^b + T` carrying `form` on `T`.
    pub fn from_group(group: &FgAbelianGroup, form: LinkingForm, resolution: u64) -> Result<Self> {
        Self::new(group.rank(), group.torsion_subgroup(), form, resolution)
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn torsion(&self) -> &FgAbelianGroup {
        &self.torsion
    }

    pub fn form(&self) -> &LinkingForm {
        &self.form
    }

    pub fn resolution(&self) -> u64 {
        self.resolution
    }

    /// Checks that a sector has the model's shape and lives on its lattice.
    pub fn check(&self, s: &FieldSector) -> Result<()> {
        if s.n.len() != self.b || s.theta.len() != self.b {
            return Err(Error::ModelMismatch(format!(
                "sector has {} free and {} theta components, model has b = {}",
                s.n.len(),
                s.theta.len(),
                self.b
            )));
        }
        if !self.torsion.is_torsion_element(&s.tau) {
            return Err(Error::ModelMismatch(format!(
                "{:?} is not a reduced element of {}",
                s.tau, self.torsion
            )));
        }
        for t in &s.theta {
            if *t < Rational64::zero() || *t >= Rational64::one() {
                return Err(Error::ModelMismatch(format!(
                    "theta {} outside [0, 1)",
                    format_fraction(t)
                )));
            }
            if self.resolution as i64 % t.denom() != 0 {
                return Err(Error::ModelMismatch(format!(
                    "theta {} is off the 1/{} lattice",
                    format_fraction(t),
                    self.resolution
                )));
            }
        }
        Ok(())
    }

    fn require_divides(&self, k: u64) -> Result<()> {
        if k == 0 || !self.resolution.is_multiple_of(k) {
            return Err(Error::ResolutionError {
                resolution: self.resolution,
                k,
            });
        }
        Ok(())
    }
}

/// One point `(n, tau, theta, omega)` of the finite model.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldSector {
    pub n: Vec<i64>,
    pub tau: Vec<u64>,
    pub theta: Vec<Rational64>,
    /// `true` when the omega component is zero.
    pub omega_zero: bool,
}

impl FieldSector {
    pub fn zero(model: &SectorModel) -> Self {
        FieldSector {
            n: vec![0; model.b],
            tau: vec![0; model.torsion.torsion().len()],
            theta: vec![Rational64::zero(); model.b],
            omega_zero: true,
        }
    }
}

/// Outcome of one integration step: whether the support condition holds,
/// and the factor it contributes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub satisfied: bool,
    pub weight: BigUint,
}

impl Constraint {
    fn from_bool(satisfied: bool) -> Self {
        Constraint {
            satisfied,
            weight: BigUint::from(u8::from(satisfied)),
        }
    }
}

fn frac(x: Rational64) -> Rational64 {
    x - x.floor()
}

/// `S(A, B) = n_A . theta_B + theta_A . n_B - Q(tau_A, tau_B) mod 1`.
///
/// Only sectors with a vanishing omega component are evaluated; the omega
/// terms are not part of the finite model.
pub fn action(a: &FieldSector, b: &FieldSector, model: &SectorModel) -> Result<Rational64> {
    model.check(a)?;
    model.check(b)?;
    if !a.omega_zero || !b.omega_zero {
        return Err(Error::ModelMismatch(
            "the omega component has no finite action".into(),
        ));
    }
    let mut s = Rational64::zero();
    for i in 0..model.b {
        s = frac(s + b.theta[i] * a.n[i] + a.theta[i] * b.n[i]);
    }
    Ok(frac(s - model.form.pair(&a.tau, &b.tau)))
}

/// The theta integral `oint d theta_A e^{2 pi i k theta_A . n_B}`: 1 when
/// `k n_B = 0` in `Z^b`, else 0.
pub fn integrate_theta(b: &FieldSector, model: &SectorModel, k: u64) -> Result<Constraint> {
    model.check(b)?;
    Ok(Constraint::from_bool(
        b.n.iter().all(|&x| x as i128 * k as i128 == 0),
    ))
}

/// `sum_{tau_A in T} e^{-2 pi i k Q(tau_A, tau_B)}` as an exact cyclotomic
/// sum over `zeta_e`, `e` the exponent of `T`.
pub fn torsion_gauss_sum(tau_b: &[u64], model: &SectorModel, k: u64) -> Result<CycloSum> {
    if !model.torsion.is_torsion_element(tau_b) {
        return Err(Error::ModelMismatch(format!(
            "{tau_b:?} is not in {}",
            model.torsion
        )));
    }
    Ok(gauss_sum(&model.torsion, &model.form, tau_b, k))
}

/// The same sum for any form, degenerate ones included.
pub(crate) fn gauss_sum(t: &FgAbelianGroup, q: &LinkingForm, tau_b: &[u64], k: u64) -> CycloSum {
    let e = q.modulus();
    let ky = t.scale_torsion(tau_b, k);
    exp_sum_over(e, q.pairings_with(t, &ky).into_iter().map(|a| (e - a) % e))
}

/// Support verdict of the Dirac comb `sum_{n_A} e^{2 pi i k n_A . theta_B}`:
/// satisfied iff `k theta_B` is integral.
pub fn comb_sum_n_a(theta_b: &[Rational64], model: &SectorModel, k: u64) -> Result<Constraint> {
    if theta_b.len() != model.b {
        return Err(Error::ModelMismatch(format!(
            "{} theta components for b = {}",
            theta_b.len(),
            model.b
        )));
    }
    if k == 0 || !model.resolution.is_multiple_of(k) {
        return Err(Error::DenominatorError(format!(
            "k = {k} does not divide the resolution {}",
            model.resolution
        )));
    }
    for t in theta_b {
        if model.resolution as i64 % t.denom() != 0 {
            return Err(Error::DenominatorError(format!(
                "theta {} is off the 1/{} lattice",
                format_fraction(t),
                model.resolution
            )));
        }
    }
    Ok(Constraint::from_bool(
        theta_b.iter().all(|t| (*t * k as i64).is_integer()),
    ))
}

/// The formal omega integral: supported only on `omega_B = 0`.
pub fn integrate_omega(b: &FieldSector) -> Constraint {
    Constraint::from_bool(b.omega_zero)
}

/// The support of `delta(k B)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaSupport {
    pub n_constraint: &'static str,
    pub tau_solutions: Vec<Vec<u64>>,
    #[serde(serialize_with = "serialize_thetas")]
    pub theta_solutions: Vec<Vec<Rational64>>,
    pub omega_constraint: &'static str,
    #[serde(serialize_with = "serialize_big")]
    pub multiplicity: BigUint,
}

fn serialize_thetas<S: serde::Serializer>(
    v: &[Vec<Rational64>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let strings: Vec<Vec<String>> = v
        .iter()
        .map(|r| r.iter().map(format_fraction).collect())
        .collect();
    strings.serialize(s)
}

fn serialize_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.to_string().serialize(s)
}

const N_CONSTRAINT: &str = "n_B = 0";
const OMEGA_CONSTRAINT: &str = "omega_B = 0";

impl DeltaSupport {
    /// Number of support points.
    pub fn size(&self) -> BigUint {
        BigUint::from(self.tau_solutions.len()) * BigUint::from(self.theta_solutions.len())
    }
}

/// `delta(k B)` assembled from its closed-form pieces: `n_B = 0`,
/// `k tau_B = 0`, `theta_B in {a / k}`, `omega_B = 0`, with prefactor `|T|`.
pub fn delta_support(model: &SectorModel, k: u64) -> Result<DeltaSupport> {
    model.require_divides(k)?;
    let grid: Vec<Vec<u64>> = lattice(model.b, k).collect();
    let theta_solutions = grid
        .into_iter()
        .map(|a| {
            a.into_iter()
                .map(|x| Rational64::new(x as i64, k as i64))
                .collect()
        })
        .collect();
    Ok(DeltaSupport {
        n_constraint: N_CONSTRAINT,
        tau_solutions: model.torsion.torsion_k_solutions(k),
        theta_solutions,
        omega_constraint: OMEGA_CONSTRAINT,
        multiplicity: model.torsion.torsion_order(),
    })
}

/// `{0, ..., size - 1}^dim` in lexicographic order.
fn lattice(dim: usize, size: u64) -> impl Iterator<Item = Vec<u64>> {
    let mut x = vec![0u64; dim];
    let mut done = size == 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let item = x.clone();
        done = true;
        for pos in (0..dim).rev() {
            x[pos] += 1;
            if x[pos] < size {
                done = false;
                break;
            }
            x[pos] = 0;
        }
        Some(item)
    })
}

/// The three finite integration steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Theta,
    Torsion,
    Comb,
}

/// All orders in which the three steps can be performed.
pub const ORDERS: [[Step; 3]; 6] = [
    [Step::Theta, Step::Torsion, Step::Comb],
    [Step::Theta, Step::Comb, Step::Torsion],
    [Step::Torsion, Step::Theta, Step::Comb],
    [Step::Torsion, Step::Comb, Step::Theta],
    [Step::Comb, Step::Theta, Step::Torsion],
    [Step::Comb, Step::Torsion, Step::Theta],
];

/// Every sector with `|n_i| <= n_radius`, theta on the lattice, and both
/// values of the omega flag, in a fixed order.
pub fn all_sectors(model: &SectorModel, n_radius: i64) -> Vec<FieldSector> {
    let b = model.b;
    let m = model.resolution;
    let ns: Vec<Vec<i64>> = lattice(b, (2 * n_radius + 1) as u64)
        .map(|v| v.into_iter().map(|x| x as i64 - n_radius).collect())
        .collect();
    let thetas: Vec<Vec<Rational64>> = lattice(b, m)
        .map(|v| {
            v.into_iter()
                .map(|x| Rational64::new(x as i64, m as i64))
                .collect()
        })
        .collect();
    let taus: Vec<Vec<u64>> = model.torsion.torsion_elements().collect();
    let mut out = Vec::with_capacity(ns.len() * thetas.len() * taus.len() * 2);
    for n in &ns {
        for tau in &taus {
            for theta in &thetas {
                for omega_zero in [true, false] {
                    out.push(FieldSector {
                        n: n.clone(),
                        tau: tau.clone(),
                        theta: theta.clone(),
                        omega_zero,
                    });
                }
            }
        }
    }
    out
}

/// Computes the support of `delta(k B)` by filtering every enumerated
/// sector through the steps in the given order, then through the omega
/// integral. Each step contributes its weight; the support points must all
/// carry the same total.
pub fn enumerate_support(
    model: &SectorModel,
    k: u64,
    order: [Step; 3],
    n_radius: i64,
) -> Result<DeltaSupport> {
    model.require_divides(k)?;
    let mut survivors: Vec<(FieldSector, BigUint)> = all_sectors(model, n_radius)
        .into_iter()
        .map(|s| (s, BigUint::one()))
        .collect();
    let mut gauss: HashMap<Vec<u64>, Option<num_bigint::BigInt>> = HashMap::new();
    for step in order {
        let mut next = Vec::with_capacity(survivors.len());
        for (s, w) in survivors {
            let c = match step {
                Step::Theta => integrate_theta(&s, model, k)?,
                Step::Comb => comb_sum_n_a(&s.theta, model, k)?,
                Step::Torsion => {
                    let value = match gauss.get(&s.tau) {
                        Some(v) => v.clone(),
                        None => {
                            let v = torsion_gauss_sum(&s.tau, model, k)?.to_integer();
                            gauss.insert(s.tau.clone(), v.clone());
                            v
                        }
                    };
                    let value = value.ok_or_else(|| {
                        Error::Consistency(format!("torsion sum at {:?} is not an integer", s.tau))
                    })?;
                    let weight = value.to_biguint().ok_or_else(|| {
                        Error::Consistency(format!("torsion sum at {:?} is negative", s.tau))
                    })?;
                    Constraint {
                        satisfied: !weight.is_zero(),
                        weight,
                    }
                }
            };
            if c.satisfied {
                next.push((s, w * c.weight));
            }
        }
        survivors = next;
    }
    survivors.retain(|(s, _)| integrate_omega(s).satisfied);

    let weights: BTreeSet<&BigUint> = survivors.iter().map(|(_, w)| w).collect();
    if weights.len() > 1 {
        return Err(Error::Consistency(
            "support points carry different weights".into(),
        ));
    }
    let multiplicity = weights.into_iter().next().cloned().unwrap_or_default();
    if survivors.iter().any(|(s, _)| s.n.iter().any(|&x| x != 0)) {
        return Err(Error::Consistency("a support point has n_B != 0".into()));
    }
    let taus: BTreeSet<Vec<u64>> = survivors.iter().map(|(s, _)| s.tau.clone()).collect();
    let thetas: BTreeSet<Vec<Rational64>> = survivors.iter().map(|(s, _)| s.theta.clone()).collect();
    if taus.len() * thetas.len() != survivors.len() {
        return Err(Error::Consistency("the support is not a product".into()));
    }
    Ok(DeltaSupport {
        n_constraint: N_CONSTRAINT,
        tau_solutions: taus.into_iter().collect(),
        theta_solutions: thetas.into_iter().collect(),
        omega_constraint: OMEGA_CONSTRAINT,
        multiplicity,
    })
}

/// Radius of the `n` box used by [`verify_order_independence`].
pub const N_RADIUS: i64 = 1;

/// True iff all six step orders yield the same support, equal to the
/// closed-form [`delta_support`].
pub fn verify_order_independence(model: &SectorModel, k: u64) -> Result<bool> {
    let reference = delta_support(model, k)?;
    for order in ORDERS {
        if enumerate_support(model, k, order, N_RADIUS)? != reference {
            return Ok(false);
        }
    }
    Ok(true)
}
