//! Finitely generated abelian groups `Z^b + Z_{p_1} + ... + Z_{p_N}` in
//! divisor-chain form, their elements, and torsion linking forms.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{smith_normal_form, IntMatrix};

/// `Z^rank + Z_{p_1} + ... + Z_{p_N}` with `2 <= p_1 | p_2 | ... | p_N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGroup")]
pub struct FgAbelianGroup {
    rank: usize,
    torsion: Vec<u64>,
}

#[derive(Deserialize)]
struct RawGroup {
    rank: usize,
    torsion: Vec<u64>,
}

impl TryFrom<RawGroup> for FgAbelianGroup {
    type Error = Error;

    fn try_from(raw: RawGroup) -> Result<Self> {
        FgAbelianGroup::new(raw.rank, raw.torsion)
    }
}

impl FgAbelianGroup {
    pub fn new(rank: usize, torsion: Vec<u64>) -> Result<Self> {
        if let Some(&p) = torsion.iter().find(|&&p| p < 2) {
            return Err(Error::InvalidGroup(format!("torsion coefficient {p} is below 2")));
        }
        if let Some(w) = torsion.windows(2).find(|w| w[1] % w[0] != 0) {
            return Err(Error::InvalidGroup(format!("{} does not divide {}", w[0], w[1])));
        }
        Ok(FgAbelianGroup { rank, torsion })
    }

    pub fn trivial() -> Self {
        FgAbelianGroup {
            rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        FgAbelianGroup {
            rank,
            torsion: Vec::new(),
        }
    }

    /// `Z_p`; `p = 1` gives the trivial group.
    pub fn cyclic(p: u64) -> Result<Self> {
        match p {
            0 => Err(Error::InvalidGroup("cyclic group of order 0".into())),
            1 => Ok(Self::trivial()),
            _ => Ok(FgAbelianGroup {
                rank: 0,
                torsion: vec![p],
            }),
        }
    }

    /// `Z^rank` plus cyclic factors of arbitrary positive orders, brought
    /// into divisor-chain form.
    pub fn from_orders(rank: usize, orders: &[u64]) -> Result<Self> {
        let (group, _) = canonicalize(orders, None)?;
        Ok(FgAbelianGroup {
            rank,
            torsion: group.torsion,
        })
    }

    /// The cokernel of the relation matrix `r`, whose rows are relations
    /// among `r.cols()` generators.
    pub fn from_presentation(r: &IntMatrix) -> Result<Self> {
        let snf = smith_normal_form(r);
        let torsion = snf
            .invariant_factors()
            .into_iter()
            .filter(|d| !d.is_one())
            .map(|d| d.to_u64().ok_or_else(|| Error::Overflow(d.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Ok(FgAbelianGroup {
            rank: r.cols() - snf.rank,
            torsion,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion(&self) -> &[u64] {
        &self.torsion
    }

    pub fn torsion_order(&self) -> BigUint {
        self.torsion.iter().map(|&p| BigUint::from(p)).product()
    }

    /// `|T|` when it fits a `u64`.
    pub fn torsion_order_u64(&self) -> Option<u64> {
        self.torsion.iter().try_fold(1u64, |acc, &p| acc.checked_mul(p))
    }

    /// Least common multiple of the torsion orders (1 for torsion-free).
    pub fn exponent(&self) -> u64 {
        self.torsion.last().copied().unwrap_or(1)
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn torsion_subgroup(&self) -> Self {
        FgAbelianGroup {
            rank: 0,
            torsion: self.torsion.clone(),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let orders: Vec<u64> = self.torsion.iter().chain(&other.torsion).copied().collect();
        let (torsion, _) = canonicalize(&orders, None).expect("orders are valid");
        FgAbelianGroup {
            rank: self.rank + other.rank,
            torsion: torsion.torsion,
        }
    }

    /// All torsion residue vectors in lexicographic order.
    pub fn torsion_elements(&self) -> impl Iterator<Item = Vec<u64>> {
        product(self.torsion.iter().map(|&p| (0..p).collect()).collect())
    }

    /// The solutions of `k t = 0` in the torsion subgroup, lexicographically.
    /// Component `i` runs over the multiples of `p_i / gcd(k, p_i)`.
    pub fn torsion_k_solutions(&self, k: u64) -> Vec<Vec<u64>> {
        let ranges = self
            .torsion
            .iter()
            .map(|&p| {
                let g = k.gcd(&p);
                let step = p / g;
                (0..g).map(|j| j * step).collect()
            })
            .collect();
        product(ranges).collect()
    }

    /// `|Hom(G, Z_k)| = k^rank * prod gcd(k, p_i)`.
    pub fn hom_order_to_zk(&self, k: u64) -> BigUint {
        let free = BigUint::from(k).pow(self.rank as u32);
        self.torsion
            .iter()
            .fold(free, |acc, &p| acc * BigUint::from(k.gcd(&p)))
    }

    /// `prod gcd(k, p_i)`, the size of the k-torsion subgroup of `T`.
    pub fn k_torsion_order(&self, k: u64) -> BigUint {
        self.torsion.iter().map(|&p| BigUint::from(k.gcd(&p))).product()
    }

    pub fn is_torsion_element(&self, t: &[u64]) -> bool {
        t.len() == self.torsion.len() && t.iter().zip(&self.torsion).all(|(x, p)| x < p)
    }

    /// `k t`, componentwise modulo the torsion orders.
    pub fn scale_torsion(&self, t: &[u64], k: u64) -> Vec<u64> {
        t.iter()
            .zip(&self.torsion)
            .map(|(&x, &p)| mul_mod(x, k % p, p))
            .collect()
    }

    pub fn add_torsion(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .zip(&self.torsion)
            .map(|((&x, &y), &p)| ((x as u128 + y as u128) % p as u128) as u64)
            .collect()
    }

    pub fn neg_torsion(&self, a: &[u64]) -> Vec<u64> {
        a.iter().zip(&self.torsion).map(|(&x, &p)| (p - x) % p).collect()
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|p| format!("Z_{p}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Cartesian product of the given value lists, in lexicographic order.
fn product(ranges: Vec<Vec<u64>>) -> impl Iterator<Item = Vec<u64>> {
    let empty = ranges.iter().any(Vec::is_empty);
    let mut index = vec![0usize; ranges.len()];
    let mut done = empty;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let item = index.iter().zip(&ranges).map(|(&i, r)| r[i]).collect();
        done = true;
        for pos in (0..index.len()).rev() {
            index[pos] += 1;
            if index[pos] < ranges[pos].len() {
                done = false;
                break;
            }
            index[pos] = 0;
        }
        Some(item)
    })
}

/// Every torsion group `Z_{p_1} + ... + Z_{p_N}` of order at most
/// `max_order`, the trivial group included, ordered by order and then by
/// divisor chain.
pub fn torsion_groups_up_to(max_order: u64) -> Vec<FgAbelianGroup> {
    fn extend(chain: &mut Vec<u64>, order: u64, max: u64, out: &mut Vec<Vec<u64>>) {
        out.push(chain.clone());
        let last = chain.last().copied().unwrap_or(1);
        // the next factor is a multiple of `last`, and at least 2
        let mut p = if last == 1 { 2 } else { last };
        while order.saturating_mul(p) <= max {
            chain.push(p);
            extend(chain, order * p, max, out);
            chain.pop();
            p += if last == 1 { 1 } else { last };
        }
    }
    let mut chains = Vec::new();
    if max_order >= 1 {
        extend(&mut Vec::new(), 1, max_order, &mut chains);
    }
    let mut groups: Vec<FgAbelianGroup> = chains
        .into_iter()
        .map(|torsion| FgAbelianGroup { rank: 0, torsion })
        .collect();
    groups.sort_by(|a, b| {
        a.torsion_order()
            .cmp(&b.torsion_order())
            .then_with(|| a.torsion.cmp(&b.torsion))
    });
    groups
}

/// An element of an [`FgAbelianGroup`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    pub free: Vec<i64>,
    pub torsion: Vec<u64>,
}

impl GroupElement {
    pub fn zero(group: &FgAbelianGroup) -> Self {
        GroupElement {
            free: vec![0; group.rank],
            torsion: vec![0; group.torsion.len()],
        }
    }

    /// Builds an element, reducing the torsion components.
    pub fn new(group: &FgAbelianGroup, free: Vec<i64>, torsion: &[i64]) -> Result<Self> {
        if free.len() != group.rank || torsion.len() != group.torsion.len() {
            return Err(Error::DimensionMismatch(format!(
                "element with {} free and {} torsion components in {group}",
                free.len(),
                torsion.len()
            )));
        }
        let torsion = torsion
            .iter()
            .zip(&group.torsion)
            .map(|(&x, &p)| (x as i128).rem_euclid(p as i128) as u64)
            .collect();
        Ok(GroupElement { free, torsion })
    }

    pub fn is_zero(&self) -> bool {
        self.free.iter().all(|&n| n == 0) && self.torsion.iter().all(|&t| t == 0)
    }
}

/// A symmetric `Q/Z`-valued pairing on the torsion generators, stored with
/// every value reduced into `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinkingForm {
    values: Vec<Vec<Rational64>>,
    /// common denominator of all values (the group exponent)
    modulus: u64,
    /// `values[i][j] * modulus`
    numerators: Vec<Vec<u64>>,
}

impl LinkingForm {
    /// Validates symmetry and compatibility `p_i * Q(g_i, g_j) = 0 mod 1`.
    pub fn new(group: &FgAbelianGroup, values: Vec<Vec<Rational64>>) -> Result<Self> {
        let n = group.torsion.len();
        if values.len() != n || values.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidLinkingForm(format!(
                "expected a {n}x{n} matrix for {group}"
            )));
        }
        let values: Vec<Vec<Rational64>> = values
            .into_iter()
            .map(|row| row.into_iter().map(frac_part).collect())
            .collect();
        for i in 0..n {
            for j in 0..n {
                if values[i][j] != values[j][i] {
                    return Err(Error::InvalidLinkingForm(format!("not symmetric at ({i}, {j})")));
                }
                let p = group.torsion[i] as i64;
                if !(values[i][j] * p).is_integer() {
                    return Err(Error::InvalidLinkingForm(format!(
                        "{} is not a multiple of 1/{p} at ({i}, {j})",
                        format_fraction(&values[i][j])
                    )));
                }
            }
        }
        Ok(Self::from_reduced(group.exponent(), values))
    }

    fn from_reduced(modulus: u64, values: Vec<Vec<Rational64>>) -> Self {
        let numerators = values
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| {
                        let x = *v * modulus as i64;
                        debug_assert!(x.is_integer());
                        x.to_integer() as u64
                    })
                    .collect()
            })
            .collect();
        LinkingForm {
            values,
            modulus,
            numerators,
        }
    }

    /// Builds a form from numerators over the group exponent.
    pub fn from_numerators(group: &FgAbelianGroup, numerators: &[Vec<i64>]) -> Result<Self> {
        let e = group.exponent() as i64;
        let values = numerators
            .iter()
            .map(|row| row.iter().map(|&a| Rational64::new(a, e)).collect())
            .collect();
        Self::new(group, values)
    }

    /// The identically zero (maximally degenerate) form.
    pub fn zero(group: &FgAbelianGroup) -> Self {
        let n = group.torsion.len();
        Self::from_reduced(group.exponent(), vec![vec![Rational64::zero(); n]; n])
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Vec<Rational64>] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Rational64 {
        self.values[i][j]
    }

    /// Common denominator `e` with `Q(x, y) = pair_numerator(x, y) / e`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Numerator of `Q(x, y)` over [`Self::modulus`], in `[0, e)`.
    pub fn pair_numerator(&self, x: &[u64], y: &[u64]) -> u64 {
        let e = self.modulus as u128;
        let mut acc: u128 = 0;
        for (xi, row) in x.iter().zip(&self.numerators) {
            if *xi == 0 {
                continue;
            }
            let mut inner: u128 = 0;
            for (yj, a) in y.iter().zip(row) {
                inner = (inner + *yj as u128 % e * *a as u128) % e;
            }
            acc = (acc + *xi as u128 % e * inner) % e;
        }
        acc as u64
    }

    /// Numerators of `Q(g_i, y)` on the torsion generators.
    pub fn character_of(&self, y: &[u64]) -> Vec<u64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut unit = vec![0; n];
                unit[i] = 1;
                self.pair_numerator(&unit, y)
            })
            .collect()
    }

    /// Numerators of `Q(x, y)` for every torsion element `x`, in the
    /// lexicographic order of [`FgAbelianGroup::torsion_elements`].
    pub fn pairings_with(&self, group: &FgAbelianGroup, y: &[u64]) -> Vec<u64> {
        let e = self.modulus;
        let chi = self.character_of(y);
        let orders = group.torsion();
        let size = group.torsion_order_u64().expect("enumerable group") as usize;
        let mut out = Vec::with_capacity(size);
        let mut x = vec![0u64; orders.len()];
        let mut value = 0u64;
        loop {
            out.push(value);
            let mut pos = orders.len();
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                x[pos] += 1;
                value = (value + chi[pos]) % e;
                if x[pos] < orders[pos] {
                    break;
                }
                // wrapped: chi[pos] * orders[pos] = 0 mod e
                x[pos] = 0;
            }
        }
    }

    /// `Q(x, y)` in `[0, 1)`.
    pub fn pair(&self, x: &[u64], y: &[u64]) -> Rational64 {
        Rational64::new(self.pair_numerator(x, y) as i64, self.modulus as i64)
    }

    /// True when `y -> Q(., y)` is injective on the torsion subgroup.
    ///
    /// With `M` the numerator matrix over the exponent `e`, the image of
    /// `y -> M y mod e` has `e^N / prod d_i` elements, `d_i` running over the
    /// Smith diagonal of `[M | e I]`; the form is nondegenerate exactly when
    /// that equals `|T|`.
    pub fn is_nondegenerate(&self, group: &FgAbelianGroup) -> bool {
        let n = self.dim();
        if n == 0 {
            return true;
        }
        let e = self.modulus as i64;
        let mut m = IntMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, BigInt::from(self.numerators[i][j]));
            }
            m.set(i, n + i, BigInt::from(e));
        }
        let index: BigInt = smith_normal_form(&m).invariant_factors().iter().product();
        let image = BigInt::from(e).pow(n as u32) / index;
        image == BigInt::from(group.torsion_order())
    }

    /// A nonzero torsion element `y` with `Q(., y) = 0`, found by exhaustive
    /// search.
    pub fn degeneracy_witness(&self, group: &FgAbelianGroup) -> Option<Vec<u64>> {
        let n = self.dim();
        let units: Vec<Vec<u64>> = (0..n)
            .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
            .collect();
        group
            .torsion_elements()
            .skip(1)
            .find(|y| units.iter().all(|g| self.pair_numerator(g, y) == 0))
    }

    /// A uniformly random symmetric compatible form; it may be degenerate.
    pub fn random<R: Rng + ?Sized>(group: &FgAbelianGroup, rng: &mut R) -> Self {
        let n = group.torsion.len();
        let e = group.exponent();
        let mut num = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i..n {
                // entry (i, j) with i <= j has denominator dividing p_i
                let p = group.torsion[i];
                let a = rng.gen_range(0..p);
                num[i][j] = (a * (e / p)) as i64;
                num[j][i] = num[i][j];
            }
        }
        Self::from_numerators(group, &num).expect("compatible by construction")
    }

    /// Every symmetric compatible form on the torsion of `group`, degenerate
    /// ones included, in lexicographic order of the upper-triangle values.
    pub fn all_on(group: &FgAbelianGroup) -> impl Iterator<Item = LinkingForm> + '_ {
        let n = group.torsion.len();
        let e = group.exponent();
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let ranges = slots
            .iter()
            .map(|&(i, _)| {
                (0..group.torsion[i])
                    .map(|a| a * (e / group.torsion[i]))
                    .collect()
            })
            .collect();
        product(ranges).map(move |choice| {
            let mut num = vec![vec![0i64; n]; n];
            for (&(i, j), &a) in slots.iter().zip(&choice) {
                num[i][j] = a as i64;
                num[j][i] = a as i64;
            }
            Self::from_numerators(group, &num).expect("compatible by construction")
        })
    }

    /// Number of forms produced by [`Self::all_on`].
    pub fn count_on(group: &FgAbelianGroup) -> BigUint {
        let t = &group.torsion;
        (0..t.len())
            .map(|i| BigUint::from(t[i]).pow((t.len() - i) as u32))
            .product()
    }

    /// Values as `"num/den"` strings, for serialization.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.values
            .iter()
            .map(|row| row.iter().map(format_fraction).collect())
            .collect()
    }

    pub fn from_strings(group: &FgAbelianGroup, rows: &[Vec<String>]) -> Result<Self> {
        let values = rows
            .iter()
            .map(|row| row.iter().map(|s| parse_fraction(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(group, values)
    }
}

fn frac_part(x: Rational64) -> Rational64 {
    x - x.floor()
}

/// `"num/den"`, or just `"num"` for integers.
pub fn format_fraction(x: &Rational64) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_fraction(s: &str) -> Result<Rational64> {
    let bad = |m: &str| Error::parse(format!("rational `{s}`"), m);
    let (num, den) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: i64 = num.parse().map_err(|_| bad("numerator is not an integer"))?;
    let den: i64 = den.parse().map_err(|_| bad("denominator is not an integer"))?;
    if den == 0 {
        return Err(bad("zero denominator"));
    }
    Ok(Rational64::new(num, den))
}

/// The torsion group and linking form of the 3-manifold obtained by surgery
/// on a framed link with linking matrix `l`: `T = coker(l)` and
/// `Q(x, y) = x^T l^-1 y mod 1`.
///
/// With `U l V = D`, the canonical generator of `Z_{d_i}` is
/// `x_i = l v_i / d_i` (`v_i` the i-th column of `V`), so that
/// `Q(x_i, x_j) = v_i . x_j / d_i`.
pub fn linking_form_from_surgery(l: &IntMatrix) -> Result<(FgAbelianGroup, LinkingForm)> {
    if !l.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "surgery matrix is {}x{}",
            l.rows(),
            l.cols()
        )));
    }
    if !l.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let snf = smith_normal_form(l);
    if snf.rank < l.rows() {
        return Err(Error::SingularMatrix);
    }
    let factors = snf.invariant_factors();
    let active: Vec<usize> = (0..factors.len()).filter(|&i| !factors[i].is_one()).collect();
    let torsion = active
        .iter()
        .map(|&i| {
            factors[i]
                .to_u64()
                .ok_or_else(|| Error::Overflow(factors[i].to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let group = FgAbelianGroup::new(0, torsion)?;
    let v = |i: usize| snf.v.column(i);
    let generators: Vec<Vec<BigInt>> = active
        .iter()
        .map(|&i| {
            l.apply(&v(i))
                .expect("square")
                .into_iter()
                .map(|x| x / &factors[i])
                .collect()
        })
        .collect();
    let mut values = Vec::with_capacity(active.len());
    for (a, &i) in active.iter().enumerate() {
        let vi = v(i);
        let row = (0..active.len())
            .map(|b| {
                let dot: BigInt = vi.iter().zip(&generators[b]).map(|(x, y)| x * y).sum();
                reduce_fraction(&dot, &factors[active[a]])
            })
            .collect::<Result<Vec<_>>>()?;
        values.push(row);
    }
    let form = LinkingForm::new(&group, values)?;
    Ok((group, form))
}

/// `num / den mod 1` as a machine rational.
fn reduce_fraction(num: &BigInt, den: &BigInt) -> Result<Rational64> {
    let r = num.mod_floor(den);
    let (r, d) = (r.to_i64(), den.to_i64());
    match (r, d) {
        (Some(r), Some(d)) => Ok(Rational64::new(r, d)),
        _ => Err(Error::Overflow(den.to_string())),
    }
}

/// Brings `Z_{o_1} + ... + Z_{o_N}` (arbitrary positive orders, generators
/// `e_i`) into divisor-chain form, carrying a pairing given on the `e_i`
/// over to the new canonical generators.
pub fn canonicalize(
    orders: &[u64],
    form: Option<&[Vec<Rational64>]>,
) -> Result<(FgAbelianGroup, Option<LinkingForm>)> {
    if let Some(&o) = orders.iter().find(|&&o| o == 0) {
        return Err(Error::InvalidGroup(format!("cyclic order {o}")));
    }
    let n = orders.len();
    let diag: Vec<i64> = orders
        .iter()
        .map(|&o| i64::try_from(o).map_err(|_| Error::Overflow(o.to_string())))
        .collect::<Result<_>>()?;
    let p = IntMatrix::diagonal(n, n, &diag);
    let snf = smith_normal_form(&p);
    let factors = snf.invariant_factors();
    let active: Vec<usize> = (0..n).filter(|&i| !factors[i].is_one()).collect();
    let torsion = active
        .iter()
        .map(|&i| {
            factors[i]
                .to_u64()
                .ok_or_else(|| Error::Overflow(factors[i].to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let group = FgAbelianGroup::new(0, torsion)?;
    let Some(form) = form else {
        return Ok((group, None));
    };
    if form.len() != n || form.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidLinkingForm(format!("expected a {n}x{n} matrix")));
    }
    // New generator i in old coordinates: P v_i / d_i, reduced mod the orders.
    let coords: Vec<Vec<i64>> = active
        .iter()
        .map(|&i| {
            let col = snf.v.column(i);
            (0..n)
                .map(|r| {
                    let c = (&col[r] * orders[r]) / &factors[i];
                    c.mod_floor(&BigInt::from(orders[r]))
                        .to_i64()
                        .expect("below the order")
                })
                .collect()
        })
        .collect();
    let m = active.len();
    let mut values = vec![vec![Rational64::zero(); m]; m];
    for a in 0..m {
        for b in 0..m {
            let mut acc = Rational64::zero();
            for (r, &x) in coords[a].iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (s, &y) in coords[b].iter().enumerate() {
                    if y != 0 {
                        acc = frac_part(acc + form[r][s] * x * y);
                    }
                }
            }
            values[a][b] = acc;
        }
    }
    let form = LinkingForm::new(&group, values)?;
    Ok((group, Some(form)))
}

/// Orthogonal sum of two forms, re-expressed on the canonical generators of
/// the direct sum.
pub fn direct_sum_forms(
    (g1, q1): (&FgAbelianGroup, &LinkingForm),
    (g2, q2): (&FgAbelianGroup, &LinkingForm),
) -> Result<(FgAbelianGroup, LinkingForm)> {
    let (n1, n2) = (q1.dim(), q2.dim());
    let mut block = vec![vec![Rational64::zero(); n1 + n2]; n1 + n2];
    for i in 0..n1 {
        for j in 0..n1 {
            block[i][j] = q1.get(i, j);
        }
    }
    for i in 0..n2 {
        for j in 0..n2 {
            block[n1 + i][n1 + j] = q2.get(i, j);
        }
    }
    let orders: Vec<u64> = g1.torsion.iter().chain(&g2.torsion).copied().collect();
    let (torsion, form) = canonicalize(&orders, Some(&block))?;
    let group = FgAbelianGroup {
        rank: g1.rank + g2.rank,
        torsion: torsion.torsion,
    };
    Ok((group, form.expect("a form was supplied")))
}

/// `sum_{x in T} e^{2 pi i phi(x)}` for the character `phi` given by its
/// values on the torsion generators: `|T|` when `phi` is trivial, else 0.
pub fn character_sum(group: &FgAbelianGroup, phi: &[Rational64]) -> Result<BigUint> {
    if phi.len() != group.torsion.len() {
        return Err(Error::IllFormedHomomorphism(format!(
            "{} values for {} generators",
            phi.len(),
            group.torsion.len()
        )));
    }
    for (v, &p) in phi.iter().zip(&group.torsion) {
        if !(*v * p as i64).is_integer() {
            return Err(Error::IllFormedHomomorphism(format!(
                "value {} on a generator of order {p}",
                format_fraction(v)
            )));
        }
    }
    if phi.iter().all(|v| v.is_integer()) {
        Ok(group.torsion_order())
    } else {
        Ok(BigUint::zero())
    }
}

impl fmt::Display for LinkingForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.to_strings().iter().map(|r| r.join(" ")).collect();
        write!(f, "[{}]", rows.join("; "))
    }
}
