//! Word-size modular arithmetic and Chinese remaindering for dense integer
//! matrices whose entries fit in an `i64`.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{IntMatrix, SmithForm};

/// Primes just below 2^62, so that Shoup products stay below 2^63.
const PRIME_CEILING: u64 = 1 << 62;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for 64-bit integers.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn primes_below(n: u64) -> impl Iterator<Item = u64> {
    (1..n / 2).map(move |i| n - 2 * i + 1).filter(|&n| is_prime(n))
}

/// Descending primes below [`PRIME_CEILING`]; the first few are cached.
fn primes() -> impl Iterator<Item = u64> {
    static CACHE: OnceLock<Vec<u64>> = OnceLock::new();
    let cached = CACHE.get_or_init(|| primes_below(PRIME_CEILING).take(64).collect());
    let last = *cached.last().expect("cache is non-empty");
    cached.iter().copied().chain(primes_below(last))
}

/// Multiplication by a fixed factor modulo `p` (Shoup's method).
#[derive(Clone, Copy)]
struct Shoup {
    factor: u64,
    quotient: u64,
}

impl Shoup {
    fn new(factor: u64, p: u64) -> Self {
        Shoup {
            factor,
            quotient: (((factor as u128) << 64) / p as u128) as u64,
        }
    }

    /// Branch-free: the reductions are data dependent and unpredictable.
    #[inline(always)]
    fn mul(self, y: u64, p: u64) -> u64 {
        let q = ((self.quotient as u128 * y as u128) >> 64) as u64;
        let r = self.factor.wrapping_mul(y).wrapping_sub(q.wrapping_mul(p));
        r.min(r.wrapping_sub(p))
    }
}

fn residue(x: i64, p: u64) -> u64 {
    (x as i128).rem_euclid(p as i128) as u64
}

fn big_residue(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("residue below p")
}

/// In-place inverse of an `n x n` matrix modulo `p`, or `None` when it is
/// singular modulo `p`.
fn invert_mod(a: &mut [u64], n: usize, p: u64) -> Option<()> {
    let mut swaps = Vec::with_capacity(n);
    for k in 0..n {
        let r = (k..n).find(|&r| a[r * n + k] != 0)?;
        if r != k {
            for j in 0..n {
                a.swap(r * n + j, k * n + j);
            }
        }
        swaps.push(r);
        let pivot = a[k * n + k];
        let scale = Shoup::new(inv_mod(pivot, p), p);
        a[k * n + k] = 1;
        for x in &mut a[k * n..(k + 1) * n] {
            *x = scale.mul(*x, p);
        }
        let pivot_row = a[k * n..(k + 1) * n].to_vec();
        for i in (0..n).filter(|&i| i != k) {
            let f = a[i * n + k];
            if f == 0 {
                continue;
            }
            a[i * n + k] = 0;
            let neg = Shoup::new(p - f, p);
            for (x, &y) in a[i * n..(i + 1) * n].iter_mut().zip(&pivot_row) {
                let s = *x + neg.mul(y, p);
                *x = s.min(s.wrapping_sub(p));
            }
        }
    }
    for (k, &r) in swaps.iter().enumerate().rev() {
        if r != k {
            for i in 0..n {
                a.swap(i * n + r, i * n + k);
            }
        }
    }
    Some(())
}

/// Determinant modulo `p` by Gaussian elimination, destroying `a`.
fn det_mod(a: &mut [u64], n: usize, p: u64) -> u64 {
    let mut det = 1;
    for k in 0..n {
        let Some(r) = (k..n).find(|&r| a[r * n + k] != 0) else {
            return 0;
        };
        if r != k {
            for j in k..n {
                a.swap(r * n + j, k * n + j);
            }
            det = p - det;
        }
        let pivot = a[k * n + k];
        det = mul_mod(det, pivot, p);
        let pivot_inv = inv_mod(pivot, p);
        let pivot_row = a[k * n + k..(k + 1) * n].to_vec();
        for i in k + 1..n {
            let f = mul_mod(a[i * n + k], pivot_inv, p);
            if f == 0 {
                continue;
            }
            let neg = Shoup::new(p - f, p);
            for (x, &y) in a[i * n + k..(i + 1) * n].iter_mut().zip(&pivot_row) {
                let s = *x + neg.mul(y, p);
                *x = s.min(s.wrapping_sub(p));
            }
        }
    }
    det % p
}

/// Chinese remaindering onto the symmetric range `(-M/2, M/2]`.
struct Crt {
    primes: Vec<u64>,
    /// `inverses[i][j]` multiplies by `p_j^-1 mod p_i`, for `j < i`
    inverses: Vec<Vec<Shoup>>,
    modulus: BigInt,
    half: BigUint,
}

impl Crt {
    fn new(primes: Vec<u64>) -> Self {
        let inverses = primes
            .iter()
            .enumerate()
            .map(|(i, &pi)| {
                primes[..i]
                    .iter()
                    .map(|&pj| Shoup::new(inv_mod(pj % pi, pi), pi))
                    .collect()
            })
            .collect();
        let modulus: BigUint = primes.iter().map(|&p| BigUint::from(p)).product();
        let half = &modulus >> 1;
        Crt {
            primes,
            inverses,
            modulus: modulus.into(),
            half,
        }
    }

    /// `log2` of the largest magnitude that is recovered exactly.
    fn capacity_bits(&self) -> f64 {
        self.primes.iter().map(|&p| (p as f64).log2()).sum::<f64>() - 1.0
    }

    fn reconstruct(&self, residues: &[u64]) -> BigInt {
        // Garner's mixed-radix digits. All primes lie in (2^61, 2^62), so a
        // digit modulo one prime is below twice any other.
        let mut digits: Vec<u64> = Vec::with_capacity(residues.len());
        for (i, (&r, &p)) in residues.iter().zip(&self.primes).enumerate() {
            let mut t = r;
            for (&c, inv) in digits.iter().zip(&self.inverses[i]) {
                let c = if c >= p { c - p } else { c };
                let diff = if t >= c { t - c } else { t + p - c };
                t = inv.mul(diff, p);
            }
            digits.push(t);
        }
        let mut x = BigUint::zero();
        for (i, &c) in digits.iter().enumerate().rev() {
            if i + 1 < digits.len() {
                x *= self.primes[i];
            }
            x += c;
        }
        if x > self.half {
            BigInt::from(x) - &self.modulus
        } else {
            BigInt::from(x)
        }
    }

    /// Entry-wise reconstruction of a matrix from its images.
    fn reconstruct_all(&self, images: &[Vec<u64>]) -> Vec<BigInt> {
        let len = images.first().map_or(0, Vec::len);
        let mut residues = vec![0; images.len()];
        (0..len)
            .map(|idx| {
                for (r, img) in residues.iter_mut().zip(images) {
                    *r = img[idx];
                }
                self.reconstruct(&residues)
            })
            .collect()
    }
}

/// `log2` of a column-wise Hadamard bound on every minor, padded against
/// rounding.
fn hadamard_bits(a: &[i64], n: usize) -> f64 {
    let mut bits = 0.0;
    for j in 0..n {
        let norm2: f64 = (0..n).map(|i| (a[i * n + j] as f64).powi(2)).sum();
        bits += 0.5 * norm2.max(1.0).log2();
    }
    bits + 4.0
}

fn crt_for_bits(bits: f64, mut usable: impl FnMut(u64) -> bool) -> Vec<u64> {
    let mut chosen = Vec::new();
    let mut covered = -1.0;
    for p in primes() {
        if covered > bits {
            break;
        }
        if usable(p) {
            chosen.push(p);
            covered += (p as f64).log2();
        }
    }
    chosen
}

pub(super) fn small_entries(a: &IntMatrix) -> Option<Vec<i64>> {
    a.entries.iter().map(ToPrimitive::to_i64).collect()
}

/// Exact determinant of a square matrix with word-size entries.
pub(super) fn determinant(a: &[i64], n: usize) -> BigInt {
    let mut dets = Vec::new();
    let primes = crt_for_bits(hadamard_bits(a, n), |p| {
        let mut m: Vec<u64> = a.iter().map(|&x| residue(x, p)).collect();
        dets.push(det_mod(&mut m, n, p));
        true
    });
    Crt::new(primes).reconstruct(&dets)
}

/// Inverses of a nonsingular matrix modulo primes not dividing its
/// determinant, enough of them to recover integers below `2^bits`.
struct InverseImages<'a> {
    a: &'a [i64],
    n: usize,
    det: BigInt,
    crt: Crt,
    /// `inverses[i]` is `A^-1 mod primes[i]` in row-major order
    inverses: Vec<Vec<u64>>,
}

impl<'a> InverseImages<'a> {
    fn new(a: &'a [i64], n: usize, det: BigInt) -> Self {
        InverseImages {
            a,
            n,
            det,
            crt: Crt::new(Vec::new()),
            inverses: Vec::new(),
        }
    }

    fn cover(&mut self, bits: f64) {
        if self.crt.capacity_bits() > bits {
            return;
        }
        let mut primes = self.crt.primes.clone();
        let last = primes.last().copied().unwrap_or(u64::MAX);
        let mut covered = self.crt.capacity_bits();
        for p in primes_after(last) {
            if covered > bits {
                break;
            }
            if big_residue(&self.det, p) == 0 {
                continue;
            }
            let mut m: Vec<u64> = self.a.iter().map(|&x| residue(x, p)).collect();
            invert_mod(&mut m, self.n, p).expect("p does not divide the determinant");
            self.inverses.push(m);
            primes.push(p);
            covered += (p as f64).log2();
        }
        self.crt = Crt::new(primes);
    }
}

fn primes_after(last: u64) -> impl Iterator<Item = u64> {
    primes().skip_while(move |&p| p >= last)
}

/// Smith form of a nonsingular square matrix with word-size entries, or
/// `None` when the shortcut does not apply.
///
/// Write `A^-1 = [S; R]` with `R` its last `m` rows, `delta = |det A|`, and
/// let `S'`, `R'` be the corresponding rows of `adj(A) = ±delta A^-1`. If
/// `Z` is a basis of `{z : z R' = 0 mod delta}` and `X` solves
/// `X R' = -S' mod delta`, then `U = [S + X R; Z R]` is integral with
/// `U A = [[I, X], [0, Z]]`, and `|det Z| = delta` exactly when `U` is
/// unimodular. A column shear and the Smith form of the small block `Z`
/// finish the reduction. Only `m x m` blocks ever see coefficient growth;
/// the rest is word-size arithmetic modulo primes, recombined under a
/// Hadamard bound.
///
/// The split succeeds for the smallest `m` such that the first `n - m`
/// columns of `A` span a saturated lattice, which for a random matrix is
/// the number of nontrivial invariant factors. Several small `m` are tried
/// before giving up.
pub(super) fn block_smith_form(a: &IntMatrix) -> Option<SmithForm> {
    let n = a.rows;
    if n < 2 || a.cols != n {
        return None;
    }
    let small = small_entries(a)?;
    let hbits = hadamard_bits(&small, n);
    let det = determinant(&small, n);
    if det.is_zero() {
        return None;
    }
    let delta = det.abs();
    let mut images = InverseImages::new(&small, n, det);
    images.cover(hbits + 8.0);

    // adj(A) mod delta, up to a global sign that does not affect the
    // congruences below.
    let delta_images: Vec<Shoup> = images
        .crt
        .primes
        .iter()
        .map(|&p| Shoup::new(big_residue(&delta, p), p))
        .collect();
    let adj_images: Vec<Vec<u64>> = images
        .inverses
        .iter()
        .zip(&delta_images)
        .zip(&images.crt.primes)
        .map(|((inv, d), &p)| inv.iter().map(|&x| d.mul(x, p)).collect())
        .collect();
    let adj: Vec<BigInt> = images
        .crt
        .reconstruct_all(&adj_images)
        .into_iter()
        .map(|x| x.mod_floor(&delta))
        .collect();
    drop(adj_images);

    let (m, split) = [1, 2, 3, 4, 6, 8]
        .into_iter()
        .filter(|&m| m < n)
        .find_map(|m| split(&adj, n, m, &delta).map(|s| (m, s)))?;
    let k = n - m;
    let small_form = super::eliminate(&split.z);
    // Bottom rows of the final U are (P_Z Z) R.
    let w = small_form.u.mul(&split.z).expect("square blocks");

    let inv_bits = hbits - (delta.bits() as f64 - 1.0);
    let row_bits = |row: &[BigInt]| {
        let sum: BigInt = row.iter().map(|x| x.abs()).sum();
        (sum.bits() as f64).max(1.0)
    };
    let x_bits = split.x.iter().map(|r| row_bits(r)).fold(1.0, f64::max);
    let w_bits = (0..m).map(|i| row_bits(w.row(i))).fold(1.0, f64::max);
    images.cover(inv_bits + x_bits.max(w_bits) + 4.0);

    let mut u_images = Vec::with_capacity(images.inverses.len());
    for (inv, &p) in images.inverses.iter().zip(&images.crt.primes) {
        let mut u = vec![0u64; n * n];
        let r_rows = &inv[k * n..];
        let accumulate = |dst: &mut [u64], coeffs: &[BigInt]| {
            for (l, c) in coeffs.iter().enumerate() {
                let c = big_residue(c, p);
                if c == 0 {
                    continue;
                }
                let f = Shoup::new(c, p);
                for (x, &y) in dst.iter_mut().zip(&r_rows[l * n..(l + 1) * n]) {
                    let s = *x + f.mul(y, p);
                    *x = s.min(s.wrapping_sub(p));
                }
            }
        };
        for (i, x_row) in split.x.iter().enumerate() {
            let dst = &mut u[i * n..(i + 1) * n];
            dst.copy_from_slice(&inv[i * n..(i + 1) * n]);
            accumulate(dst, x_row);
        }
        for i in 0..m {
            accumulate(&mut u[(k + i) * n..(k + i + 1) * n], w.row(i));
        }
        u_images.push(u);
    }
    let u = IntMatrix::new(n, n, images.crt.reconstruct_all(&u_images)).expect("n x n");
    drop(u_images);

    // V = [[I, -X Q_Z], [0, Q_Z]]
    let q = &small_form.v;
    let mut v = IntMatrix::identity(n);
    for (i, x_row) in split.x.iter().enumerate() {
        for j in 0..m {
            let s: BigInt = (0..m).map(|l| &x_row[l] * q.get(l, j)).sum();
            v.set(i, k + j, -s);
        }
    }
    for i in 0..m {
        for j in 0..m {
            v.set(k + i, k + j, q.get(i, j).clone());
        }
    }
    let mut d = IntMatrix::identity(n);
    for i in 0..m {
        d.set(k + i, k + i, small_form.d.get(i, i).clone());
    }
    Some(SmithForm { u, d, v, rank: n })
}

struct Split {
    /// `n - m` rows of length `m`, entries in `[0, delta)`
    x: Vec<Vec<BigInt>>,
    z: IntMatrix,
}

/// Solves the congruences of [`block_smith_form`] for a trailing block of
/// `m` rows. Each column `c` of `adj` gives one congruence in the unknown
/// row `x`, namely `x . R'[.., c] = -S'[row, c] mod delta`, for all rows of
/// `S'` at once. The congruences are triangularised by unimodular row
/// operations, leaving an `m x m` system settled by an exact Smith form.
fn split(adj: &[BigInt], n: usize, m: usize, delta: &BigInt) -> Option<Split> {
    let k = n - m;
    let reduce = |x: BigInt| x.mod_floor(delta);
    let mut pivots: Vec<Option<Vec<BigInt>>> = vec![None; m];
    for c in 0..n {
        let mut g: Vec<BigInt> = (0..m)
            .map(|l| adj[(k + l) * n + c].clone())
            .chain((0..k).map(|i| reduce(-&adj[i * n + c])))
            .collect();
        let mut placed = false;
        for col in 0..m {
            if g[col].is_zero() {
                continue;
            }
            let Some(p) = pivots[col].as_mut() else {
                pivots[col] = Some(g.clone());
                placed = true;
                break;
            };
            if g[col].is_multiple_of(&p[col]) {
                let q = &g[col] / &p[col];
                for (x, y) in g[col..].iter_mut().zip(&p[col..]) {
                    if !y.is_zero() {
                        *x = reduce(&*x - &q * y);
                    }
                }
            } else {
                let e = p[col].extended_gcd(&g[col]);
                let (a_g, b_g) = (&p[col] / &e.gcd, &g[col] / &e.gcd);
                for (x, y) in p[col..].iter_mut().zip(g[col..].iter_mut()) {
                    let nx = reduce(&e.x * &*x + &e.y * &*y);
                    let ny = reduce(&a_g * &*y - &b_g * &*x);
                    *x = nx;
                    *y = ny;
                }
            }
        }
        if !placed && g[m..].iter().any(|x| !x.is_zero()) {
            return None;
        }
    }

    // T x = r (mod delta) with T upper triangular, via [T | delta I].
    let mut t = IntMatrix::zeros(m, 2 * m);
    for (i, p) in pivots.iter().enumerate() {
        if let Some(p) = p {
            for j in 0..m {
                t.set(i, j, p[j].clone());
            }
        }
        t.set(i, m + i, delta.clone());
    }
    let form = super::eliminate(&t);
    let rhs = |j: usize| -> Vec<BigInt> {
        pivots
            .iter()
            .map(|p| p.as_ref().map_or_else(BigInt::zero, |p| p[m + j].clone()))
            .collect()
    };
    let mut x = Vec::with_capacity(k);
    for j in 0..k {
        let pr = form.u.apply(&rhs(j)).expect("length m");
        let mut w = Vec::with_capacity(2 * m);
        for (i, y) in pr.iter().enumerate() {
            let di = form.d.get(i, i);
            if !y.is_multiple_of(di) {
                return None;
            }
            w.push(y / di);
        }
        w.resize(2 * m, BigInt::zero());
        let z = form.v.apply(&w).expect("length 2m");
        x.push(z[..m].iter().map(|v| v.mod_floor(delta)).collect());
    }
    // The last m columns of the column transform span the kernel of
    // [T | delta I]; their first m coordinates are the homogeneous
    // solutions.
    let z_entries = (0..m)
        .flat_map(|i| (0..m).map(move |l| (i, l)))
        .map(|(i, l)| form.v.get(l, m + i).clone())
        .collect();
    let z = IntMatrix::new(m, m, z_entries).expect("m x m");
    if z.determinant().ok()?.abs() != *delta {
        return None;
    }
    Some(Split { x, z })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small_cases() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
        assert!(is_prime(PRIME_CEILING - 57));
    }

    #[test]
    fn shoup_matches_wide_multiplication() {
        let p = primes().next().unwrap();
        for (a, b) in [(1, 1), (p - 1, p - 1), (123_456_789, p - 2), (p / 3, p / 7)] {
            assert_eq!(Shoup::new(a, p).mul(b, p), mul_mod(a, b, p));
        }
    }

    #[test]
    fn crt_recovers_signed_values() {
        let crt = Crt::new(primes().take(3).collect());
        for x in [
            BigInt::from(0),
            BigInt::from(-1),
            BigInt::from(1) << 150u32,
            -(BigInt::from(7) << 170u32),
        ] {
            let res: Vec<u64> = crt.primes.iter().map(|&p| big_residue(&x, p)).collect();
            assert_eq!(crt.reconstruct(&res), x);
        }
    }

    #[test]
    fn modular_inverse_of_small_matrix() {
        let p = 101;
        let mut m = vec![2, 1, 1, 2];
        assert_eq!(det_mod(&mut m.clone(), 2, p), 3);
        invert_mod(&mut m, 2, p).unwrap();
        let third = inv_mod(3, p);
        assert_eq!(m, vec![2 * third % p, p - third, p - third, 2 * third % p]);
        assert_eq!(invert_mod(&mut [1, 2, 2, 4], 2, p), None);
    }

    fn xorshift(mut state: u64) -> impl FnMut() -> u64 {
        move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        }
    }

    fn random_matrix(n: usize, next: &mut impl FnMut() -> u64) -> IntMatrix {
        let entries = (0..n * n)
            .map(|_| BigInt::from((next() % 11) as i64 - 5))
            .collect();
        IntMatrix::new(n, n, entries).unwrap()
    }

    /// Product of random elementary row operations.
    fn random_unimodular(n: usize, ops: usize, next: &mut impl FnMut() -> u64) -> IntMatrix {
        let mut m = IntMatrix::identity(n);
        for _ in 0..ops {
            let i = (next() % n as u64) as usize;
            let j = (i + 1 + (next() % (n as u64 - 1)) as usize) % n;
            let c = BigInt::from((next() % 3) as i64 - 1);
            for col in 0..n {
                let x = m.get(i, col) + &c * m.get(j, col);
                m.set(i, col, x);
            }
        }
        m
    }

    #[test]
    fn non_cyclic_cokernel_is_split() {
        let mut next = xorshift(0x2545F4914F6CDD1D);
        let n = 18;
        let mut diag = vec![1i64; n];
        diag[n - 3..].copy_from_slice(&[2, 6, 12]);
        let left = random_unimodular(n, 60, &mut next);
        let right = random_unimodular(n, 60, &mut next);
        let a = left
            .mul(&IntMatrix::diagonal(n, n, &diag))
            .unwrap()
            .mul(&right)
            .unwrap();
        let s = block_smith_form(&a).expect("three trailing invariant factors split off");
        assert!(s.certifies(&a));
        assert_eq!(s.d, IntMatrix::diagonal(n, n, &diag));
    }

    #[test]
    fn random_matrices_take_the_shortcut() {
        let mut next = xorshift(0x9E3779B97F4A7C15);
        let mut taken = 0;
        for _ in 0..60 {
            let a = random_matrix(12, &mut next);
            if let Some(s) = block_smith_form(&a) {
                taken += 1;
                assert!(s.certifies(&a));
                assert_eq!(s.d, super::super::eliminate(&a).d);
            }
        }
        assert!(taken >= 55, "shortcut taken {taken} times out of 60");
    }

    #[test]
    fn singular_and_rectangular_inputs_are_declined() {
        let mut rows = vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]];
        assert!(block_smith_form(&IntMatrix::from_rows(&rows)).is_none());
        rows.pop();
        assert!(block_smith_form(&IntMatrix::from_rows(&rows)).is_none());
    }

    #[test]
    fn determinant_of_singular_matrix_is_zero() {
        let a: Vec<i64> = (0..25).map(|i| i % 7).collect();
        let rows: Vec<Vec<i64>> = a.chunks(5).map(<[i64]>::to_vec).collect();
        let exact = IntMatrix::from_rows(&rows).determinant().unwrap();
        assert_eq!(determinant(&a, 5), exact);
    }

    mod props {
        use super::super::super::eliminate;
        use super::*;
        use proptest::prelude::*;

        fn square(max_dim: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
            (1..=max_dim).prop_flat_map(move |n| {
                prop::collection::vec(-bound..=bound, n * n).prop_map(move |v| {
                    IntMatrix::new(n, n, v.into_iter().map(BigInt::from).collect()).unwrap()
                })
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(500))]
            #[test]
            fn block_form_is_certified(a in square(7, 6)) {
                if let Some(s) = block_smith_form(&a) {
                    prop_assert!(s.certifies(&a), "{:?} -> {:?}", a, s);
                    prop_assert_eq!(s.d.clone(), eliminate(&a).d);
                }
            }

            #[test]

            #[test]
            fn modular_determinant_matches_bareiss(a in square(6, 9)) {
                let small = small_entries(&a).unwrap();
                prop_assert_eq!(determinant(&small, a.rows()), a.determinant().unwrap());
            }
        }
    }
}
