//! Exact sums of roots of unity: elements of `Z[x]/(x^n - 1)`, compared
//! as algebraic numbers through the cyclotomic polynomial `Phi_n`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Integer polynomial, coefficients from the constant term up.
pub type Poly = Vec<BigInt>;

/// `sum_j coeffs[j] * zeta_n^j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycloSum {
    order: u64,
    coeffs: Vec<BigInt>,
}

impl CycloSum {
    pub fn zero(order: u64) -> Self {
        assert!(order >= 1, "order must be positive");
        CycloSum {
            order,
            coeffs: vec![BigInt::zero(); order as usize],
        }
    }

    /// `m * zeta^0`.
    pub fn integer(order: u64, m: impl Into<BigInt>) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = m.into();
        s
    }

    /// Coefficients are reduced cyclically to length `order`.
    pub fn from_coeffs(order: u64, coeffs: Vec<BigInt>) -> Self {
        let mut s = Self::zero(order);
        for (j, c) in coeffs.into_iter().enumerate() {
            s.coeffs[j % order as usize] += c;
        }
        s
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Adds `count * zeta^j`.
    pub fn add_term(&mut self, j: u64, count: impl Into<BigInt>) {
        self.coeffs[(j % self.order) as usize] += count.into();
    }

    /// The same element written over `zeta_{order * factor}`.
    pub fn lift(&self, order: u64) -> Self {
        assert!(
            order.is_multiple_of(self.order),
            "{order} is not a multiple of {}",
            self.order
        );
        let step = (order / self.order) as usize;
        let mut s = Self::zero(order);
        for (j, c) in self.coeffs.iter().enumerate() {
            s.coeffs[j * step] = c.clone();
        }
        s
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        if self.order == other.order {
            return (self.clone(), other.clone());
        }
        let n = self.order.lcm(&other.order);
        (self.lift(n), other.lift(n))
    }

    /// True iff the element is 0 as an algebraic number.
    pub fn is_zero(&self) -> bool {
        if self.coeffs.iter().all(Zero::is_zero) {
            return true;
        }
        self.reduced().iter().all(Zero::is_zero)
    }

    /// Remainder of the coefficient polynomial mod `Phi_n`, in machine
    /// integers when no intermediate value overflows.
    fn reduced(&self) -> Poly {
        let small: Option<Vec<i128>> = self.coeffs.iter().map(ToPrimitive::to_i128).collect();
        if let Some(r) = small.and_then(|c| remainder_small(c, &small_cyclotomic(self.order))) {
            return r.into_iter().map(BigInt::from).collect();
        }
        remainder(&self.coeffs, &cyclotomic_polynomial(self.order))
    }

    pub fn equals_integer(&self, m: impl Into<BigInt>) -> bool {
        (self.clone() - CycloSum::integer(self.order, m)).is_zero()
    }

    /// The value as an integer, when it is one.
    ///
    /// The remainder mod `Phi_n` is the unique representative of degree
    /// below `phi(n)`, so the element is an integer exactly when the
    /// remainder is constant.
    pub fn to_integer(&self) -> Option<BigInt> {
        let r = self.reduced();
        if r.iter().skip(1).all(Zero::is_zero) {
            Some(r.first().cloned().unwrap_or_default())
        } else {
            None
        }
    }

    /// Floating-point value; for sanity checks only.
    pub fn to_complex(&self) -> (f64, f64) {
        let n = self.order as f64;
        self.coeffs
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(re, im), (j, c)| {
                let c: f64 = c.to_string().parse().unwrap_or(f64::NAN);
                let t = std::f64::consts::TAU * j as f64 / n;
                (re + c * t.cos(), im + c * t.sin())
            })
    }
}

impl Add for CycloSum {
    type Output = CycloSum;

    fn add(self, other: CycloSum) -> CycloSum {
        let (mut a, b) = self.common(&other);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs) {
            *x += y;
        }
        a
    }
}

impl Neg for CycloSum {
    type Output = CycloSum;

    fn neg(mut self) -> CycloSum {
        for c in &mut self.coeffs {
            *c = -&*c;
        }
        self
    }
}

impl Sub for CycloSum {
    type Output = CycloSum;

    fn sub(self, other: CycloSum) -> CycloSum {
        self + (-other)
    }
}

impl Mul for CycloSum {
    type Output = CycloSum;

    fn mul(self, other: CycloSum) -> CycloSum {
        let (a, b) = self.common(&other);
        let n = a.order as usize;
        let mut out = CycloSum::zero(a.order);
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    out.coeffs[(i + j) % n] += x * y;
                }
            }
        }
        out
    }
}

impl fmt::Display for CycloSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| match j {
                0 => c.to_string(),
                _ => format!("{c}*z{}^{j}", self.order),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// `sum_k e^{2 pi i phases[k]}` over `zeta_n`, `n` the lcm of the phase
/// denominators. Phases are reduced mod 1 first.
pub fn exp_sum(phases: &[Rational64]) -> CycloSum {
    let n = phases
        .iter()
        .fold(1i64, |acc, p| acc.lcm(p.denom()))
        .unsigned_abs();
    let mut s = CycloSum::zero(n);
    for p in phases {
        let j = (p.numer() * (n as i64 / p.denom())).rem_euclid(n as i64);
        s.coeffs[j as usize] += 1;
    }
    s
}

/// `sum_k e^{2 pi i a_k / n}` given the numerators `a_k`.
pub fn exp_sum_over(n: u64, numerators: impl IntoIterator<Item = u64>) -> CycloSum {
    let mut counts = vec![0u64; n as usize];
    for a in numerators {
        counts[(a % n) as usize] += 1;
    }
    CycloSum {
        order: n,
        coeffs: counts.into_iter().map(BigInt::from).collect(),
    }
}

/// `Phi_n`, as the exact quotient of `x^n - 1` by `prod_{d | n, d < n} Phi_d`.
pub fn cyclotomic_polynomial(n: u64) -> Poly {
    assert!(n >= 1, "cyclotomic polynomial of order 0");
    static CACHE: OnceLock<Mutex<HashMap<u64, Poly>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().expect("cache poisoned").get(&n) {
        return p.clone();
    }
    let mut num: Poly = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        let (q, r) = divide_monic(&num, &cyclotomic_polynomial(d));
        debug_assert!(r.iter().all(Zero::is_zero));
        num = q;
    }
    cache.lock().expect("cache poisoned").insert(n, num.clone());
    num
}

/// `Phi_n` with machine coefficients, cached.
fn small_cyclotomic(n: u64) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().expect("cache poisoned").get(&n) {
        return Arc::clone(p);
    }
    let phi: Vec<i64> = cyclotomic_polynomial(n)
        .iter()
        .map(|c| c.to_i64().expect("cyclotomic coefficients are small"))
        .collect();
    let phi = Arc::new(phi);
    cache.lock().expect("cache poisoned").insert(n, Arc::clone(&phi));
    phi
}

/// Remainder by a monic polynomial; `None` on overflow.
fn remainder_small(mut r: Vec<i128>, b: &[i64]) -> Option<Vec<i128>> {
    let db = b.len() - 1;
    if r.len() <= db {
        return Some(r);
    }
    for i in (db..r.len()).rev() {
        let c = r[i];
        if c == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if bj != 0 {
                let t = c.checked_mul(bj as i128)?;
                r[i - db + j] = r[i - db + j].checked_sub(t)?;
            }
        }
    }
    r.truncate(db);
    Some(r)
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    let mut m = n;
    let mut out = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

/// Division by a monic polynomial: `(quotient, remainder)`.
fn divide_monic(a: &[BigInt], b: &[BigInt]) -> (Poly, Poly) {
    let db = b.len() - 1;
    debug_assert!(b[db].is_one());
    let mut r: Poly = a.to_vec();
    if r.len() <= db {
        return (vec![BigInt::zero()], r);
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for i in (db..r.len()).rev() {
        if r[i].is_zero() {
            continue;
        }
        let c = r[i].clone();
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                r[i - db + j] -= &c * bj;
            }
        }
        q[i - db] = c;
    }
    r.truncate(db);
    (trim(q), r)
}

fn remainder(a: &[BigInt], b: &[BigInt]) -> Poly {
    divide_monic(a, b).1
}

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

/// Degree of a trimmed polynomial.
pub fn degree(p: &[BigInt]) -> usize {
    p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

/// True when every coefficient is -1, 0 or 1; handy for tests of small orders.
pub fn has_unit_coefficients(p: &[BigInt]) -> bool {
    p.iter().all(|c| c.abs() <= BigInt::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> Poly {
        c.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), poly(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(2), poly(&[1, 1]));
        assert_eq!(cyclotomic_polynomial(4), poly(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), poly(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12), poly(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn degree_is_totient() {
        for n in 1..=200 {
            let phi = cyclotomic_polynomial(n);
            assert_eq!(degree(&phi) as u64, totient(n), "n = {n}");
            assert!(phi.last().unwrap().is_one());
        }
        // first order with a coefficient outside {-1, 0, 1}
        assert!((1..105).all(|n| has_unit_coefficients(&cyclotomic_polynomial(n))));
        assert!(!has_unit_coefficients(&cyclotomic_polynomial(105)));
    }

    #[test]
    fn product_over_divisors_is_x_n_minus_1() {
        for n in 1..=40u64 {
            let mut prod: Poly = poly(&[1]);
            for d in (1..=n).filter(|d| n % d == 0) {
                let phi = cyclotomic_polynomial(d);
                let mut next = vec![BigInt::zero(); prod.len() + phi.len() - 1];
                for (i, a) in prod.iter().enumerate() {
                    for (j, b) in phi.iter().enumerate() {
                        next[i + j] += a * b;
                    }
                }
                prod = next;
            }
            let mut expect = vec![BigInt::zero(); n as usize + 1];
            expect[0] = BigInt::from(-1);
            expect[n as usize] = BigInt::one();
            assert_eq!(prod, expect);
        }
    }

    #[test]
    fn exp_sum_examples() {
        let s = exp_sum(&[r(0, 1), r(0, 1), r(0, 1)]);
        assert!(!s.is_zero());
        assert!(s.equals_integer(3));
        assert!(exp_sum(&[r(0, 1), r(1, 3), r(2, 3)]).is_zero());
        assert!(exp_sum(&[r(1, 4), r(3, 4)]).is_zero());
        assert_eq!(exp_sum(&[r(1, 4), r(3, 4)]).order(), 4);
    }

    #[test]
    fn is_zero_examples() {
        let orbit = CycloSum::from_coeffs(3, poly(&[1, 1, 1]));
        assert!(orbit.is_zero());
        assert!(!CycloSum::from_coeffs(5, poly(&[1, 1])).is_zero());
        let a = CycloSum::from_coeffs(8, poly(&[1, 0, 1]));
        let b = CycloSum::from_coeffs(8, poly(&[1, 0, 1]));
        assert!((a - b).is_zero());
    }

    #[test]
    fn equals_integer_examples() {
        assert!(exp_sum(&[r(0, 1); 7]).equals_integer(7));
        assert!(exp_sum(&[r(0, 1), r(1, 3), r(2, 3)]).equals_integer(0));
        // Z_4 with Q = xy/4 and tau_B = 2: phases -2x/4 for x = 0..3
        let phases: Vec<Rational64> = (0..4).map(|x| r(-2 * x, 4) - r(-2 * x, 4).floor()).collect();
        assert_eq!(phases, vec![r(0, 1), r(1, 2), r(0, 1), r(1, 2)]);
        assert!(exp_sum(&phases).equals_integer(0));
    }

    #[test]
    fn integer_values() {
        assert_eq!(exp_sum(&[r(1, 6), r(5, 6)]).to_integer(), Some(BigInt::one()));
        assert_eq!(exp_sum(&[r(1, 5)]).to_integer(), None);
        // a quadratic Gauss sum: sum_x zeta_5^{x^2} = sqrt 5 is not an integer
        let g = exp_sum_over(5, (0..5).map(|x| x * x));
        assert_eq!(g.to_integer(), None);
        assert!((g.clone() * g).equals_integer(5));
    }

    #[test]
    fn huge_coefficients_fall_back_to_big_integers() {
        let big = BigInt::from(i128::MAX) * BigInt::from(4);
        let s = CycloSum::from_coeffs(3, vec![big.clone(), big.clone(), big.clone()]);
        assert!(s.is_zero());
        let t = CycloSum::from_coeffs(4, vec![big.clone(), BigInt::zero(), big.clone()]);
        assert!(t.is_zero());
        assert_eq!(CycloSum::integer(6, big.clone()).to_integer(), Some(big));
    }

    #[test]
    fn lifting_preserves_value() {
        let s = exp_sum(&[r(1, 3), r(1, 2)]);
        assert_eq!(s.order(), 6);
        let t = s.lift(30);
        assert!((s.clone() - t.clone()).is_zero());
        assert!((CycloSum::integer(2, 1) + exp_sum(&[r(1, 5)]) - exp_sum(&[r(1, 5)])).equals_integer(1));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        /// Phases whose denominators divide `base`, keeping the lcm bounded.
        fn phases(base: i64) -> impl Strategy<Value = Vec<Rational64>> {
            let divisors: Vec<i64> = (1..=base).filter(|d| base % d == 0).collect();
            let denom = proptest::sample::select(divisors);
            proptest::collection::vec(denom.prop_flat_map(|d| (0..d, Just(d))), 0..12)
                .prop_map(|v| v.into_iter().map(|(a, d)| Rational64::new(a, d)).collect())
        }

        proptest! {
            #[test]
            fn concatenation_is_addition(p in phases(360), q in phases(360)) {
                let joined: Vec<Rational64> = p.iter().chain(&q).copied().collect();
                prop_assert!((exp_sum(&p) + exp_sum(&q) - exp_sum(&joined)).is_zero());
            }

            #[test]
            fn multiplication_adds_phases(p in phases(12), q in phases(12)) {
                let pairs: Vec<Rational64> = p
                    .iter()
                    .flat_map(|a| q.iter().map(move |b| {
                        let s = *a + *b;
                        s - s.floor()
                    }))
                    .collect();
                prop_assert!((exp_sum(&p) * exp_sum(&q) - exp_sum(&pairs)).is_zero());
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]

            #[test]
            fn exact_zero_test_agrees_with_floating_point(
                n in 1u64..=60,
                coeffs in proptest::collection::vec(-2i64..=2, 60),
                orbit in 0u64..=60,
            ) {
                let mut s = CycloSum::from_coeffs(n, coeffs[..n as usize].iter().map(|&c| BigInt::from(c)).collect());
                // mix in a full orbit of a divisor so that zero sums are common
                let d = (1..=n).filter(|d| n % d == 0).nth((orbit % 4) as usize).unwrap_or(n);
                if d > 1 {
                    for j in 0..d {
                        s.add_term(j * (n / d), 3);
                    }
                }
                let (re, im) = s.to_complex();
                let small = re.abs() < 1e-9 && im.abs() < 1e-9;
                prop_assert_eq!(s.is_zero(), small);
            }
        }
    }
}
