//! Simplicial and cellular chain complexes, integral homology, and mod-k
//! cohomology orders.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::abgroup::FgAbelianGroup;
use crate::error::{Error, Result};
use crate::linalg::{kernel_count_mod_k, smith_normal_form, IntMatrix};

/// Largest state space [`ChainComplex::count_cocycles_bruteforce`] will walk.
pub const ENUMERATION_GUARD: u64 = 10_000_000;

/// A simplicial complex, stored as sorted vertex tuples per dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertex_count: usize,
    simplices: Vec<Vec<Vec<usize>>>,
}

impl SimplicialComplex {
    /// Checks that every simplex is a sorted tuple without repeats and that
    /// all of its faces are present.
    pub fn new(vertex_count: usize, simplices: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let mut present: HashSet<&[usize]> = HashSet::new();
        for (dim, list) in simplices.iter().enumerate() {
            for s in list {
                if s.len() != dim + 1 {
                    return Err(Error::NotAComplex(format!(
                        "{s:?} listed among the {dim}-simplices"
                    )));
                }
                if s.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::NotAComplex(format!("{s:?} is not strictly increasing")));
                }
                if s.iter().any(|&v| v >= vertex_count) {
                    return Err(Error::NotAComplex(format!(
                        "{s:?} uses a vertex beyond {vertex_count}"
                    )));
                }
                if !present.insert(s) {
                    return Err(Error::NotAComplex(format!("{s:?} is listed twice")));
                }
            }
        }
        for list in simplices.iter().skip(1) {
            for s in list {
                for face in faces(s) {
                    if !present.contains(face.as_slice()) {
                        return Err(Error::NotAComplex(format!("face {face:?} of {s:?} is missing")));
                    }
                }
            }
        }
        Ok(SimplicialComplex {
            vertex_count,
            simplices,
        })
    }

    /// The closure of a list of simplices given as vertex sets in any order.
    pub fn from_facets(facets: &[Vec<usize>]) -> Result<Self> {
        let mut by_dim: Vec<BTreeSet<Vec<usize>>> = Vec::new();
        let mut vertex_count = 0;
        for f in facets {
            let mut s = f.clone();
            s.sort_unstable();
            if s.is_empty() {
                continue;
            }
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::NotAComplex(format!("{f:?} repeats a vertex")));
            }
            vertex_count = vertex_count.max(s[s.len() - 1] + 1);
            let mut stack = vec![s];
            while let Some(s) = stack.pop() {
                let dim = s.len() - 1;
                if by_dim.len() <= dim {
                    by_dim.resize(dim + 1, BTreeSet::new());
                }
                if by_dim[dim].insert(s.clone()) && dim > 0 {
                    stack.extend(faces(&s));
                }
            }
        }
        let simplices = by_dim.into_iter().map(|set| set.into_iter().collect()).collect();
        Self::new(vertex_count, simplices)
    }

    /// One facet per line as whitespace-separated vertex indices; blank lines
    /// and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut facets = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let facet = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| {
                        Error::parse(format!("line {}", n + 1), format!("`{t}` is not a vertex index"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            facets.push(facet);
        }
        Self::from_facets(&facets)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn dimension(&self) -> Option<usize> {
        self.simplices.len().checked_sub(1)
    }

    pub fn simplices(&self, dim: usize) -> &[Vec<usize>] {
        self.simplices.get(dim).map_or(&[], Vec::as_slice)
    }

    /// Boundary maps with the orientation induced by the vertex order:
    /// `d [v_0 .. v_q] = sum_i (-1)^i [v_0 .. ^v_i .. v_q]`.
    pub fn boundary_matrices(&self) -> Result<ChainComplex> {
        let cells: Vec<usize> = self.simplices.iter().map(Vec::len).collect();
        let mut boundary = Vec::new();
        for q in 1..self.simplices.len() {
            let lower = &self.simplices[q - 1];
            let mut d = IntMatrix::zeros(lower.len(), cells[q]);
            for (j, s) in self.simplices[q].iter().enumerate() {
                for (i, face) in faces(s).into_iter().enumerate() {
                    let row = lower
                        .binary_search(&face)
                        .map_err(|_| Error::NotAComplex(format!("face {face:?} of {s:?} is missing")))?;
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    d.set(row, j, BigInt::from(sign));
                }
            }
            boundary.push(d);
        }
        ChainComplex::new(cells, boundary)
    }
}

/// Faces in the order `^v_0, ^v_1, ...`.
fn faces(s: &[usize]) -> Vec<Vec<usize>> {
    (0..s.len())
        .map(|i| {
            s.iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect()
}

/// Free chain groups `Z^{cells[q]}` with boundary maps `d_q`, stored as
/// `boundary[q - 1]` of shape `cells[q-1] x cells[q]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    cells: Vec<usize>,
    boundary: Vec<IntMatrix>,
}

#[derive(Serialize, Deserialize)]
struct RawChainComplex {
    cells: Vec<usize>,
    boundary: Vec<Vec<Vec<i64>>>,
}

impl ChainComplex {
    /// Checks shapes and `d_{q-1} d_q = 0`.
    pub fn new(cells: Vec<usize>, boundary: Vec<IntMatrix>) -> Result<Self> {
        if boundary.len() + 1 != cells.len().max(1) {
            return Err(Error::DimensionMismatch(format!(
                "{} boundary maps for {} degrees",
                boundary.len(),
                cells.len()
            )));
        }
        for (i, d) in boundary.iter().enumerate() {
            if d.rows() != cells[i] || d.cols() != cells[i + 1] {
                return Err(Error::DimensionMismatch(format!(
                    "d_{} is {}x{}, expected {}x{}",
                    i + 1,
                    d.rows(),
                    d.cols(),
                    cells[i],
                    cells[i + 1]
                )));
            }
        }
        for q in 1..boundary.len() {
            if !boundary[q - 1].mul(&boundary[q])?.is_zero() {
                return Err(Error::BoundarySquareNonzero(q + 1));
            }
        }
        Ok(ChainComplex { cells, boundary })
    }

    /// One cell in each degree `0..=3` with `d_2 = [p]`: the standard CW
    /// structure of the lens spaces `L(p, q)`.
    pub fn lens_cw(p: i64) -> Self {
        let z = || IntMatrix::zeros(1, 1);
        ChainComplex::new(vec![1; 4], vec![z(), IntMatrix::from_rows(&[vec![p]]), z()])
            .expect("a valid complex")
    }

    /// JSON `{"cells": [...], "boundary": [d_1, d_2, ...]}`, each map a list
    /// of rows.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawChainComplex =
            serde_json::from_str(text).map_err(|e| Error::parse("chain complex", e))?;
        if raw.boundary.len() + 1 != raw.cells.len().max(1) {
            return Err(Error::parse(
                "chain complex",
                format!(
                    "{} boundary maps for {} degrees",
                    raw.boundary.len(),
                    raw.cells.len()
                ),
            ));
        }
        let boundary = raw
            .boundary
            .iter()
            .enumerate()
            .map(|(i, rows)| {
                if rows.len() != raw.cells[i] {
                    return Err(Error::parse(
                        format!("boundary[{i}]"),
                        format!("{} rows, expected {}", rows.len(), raw.cells[i]),
                    ));
                }
                IntMatrix::from_rows_with_cols(rows, raw.cells[i + 1])
                    .map_err(|e| Error::parse(format!("boundary[{i}]"), e))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(raw.cells, boundary)
    }

    pub fn to_json(&self) -> Result<String> {
        let raw = RawChainComplex {
            cells: self.cells.clone(),
            boundary: self
                .boundary
                .iter()
                .map(IntMatrix::to_i64_rows)
                .collect::<Result<_>>()?,
        };
        serde_json::to_string(&raw).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    /// Highest degree with cells, if any.
    pub fn top_degree(&self) -> Option<usize> {
        self.cells.len().checked_sub(1)
    }

    fn cells_in(&self, q: usize) -> usize {
        self.cells.get(q).copied().unwrap_or(0)
    }

    /// `d_q : C_q -> C_{q-1}`; a zero map outside the stored range.
    pub fn boundary(&self, q: usize) -> IntMatrix {
        match q {
            0 => IntMatrix::zeros(0, self.cells_in(0)),
            q if q <= self.boundary.len() => self.boundary[q - 1].clone(),
            q => IntMatrix::zeros(self.cells_in(q - 1), self.cells_in(q)),
        }
    }

    /// `H_q = ker d_q / im d_{q+1}`; trivial outside the complex.
    pub fn homology(&self, q: usize) -> Result<FgAbelianGroup> {
        let c = self.cells_in(q);
        if c == 0 {
            return Ok(FgAbelianGroup::trivial());
        }
        let rank_out = smith_normal_form(&self.boundary(q)).rank;
        let incoming = smith_normal_form(&self.boundary(q + 1));
        let torsion = incoming
            .invariant_factors()
            .into_iter()
            .filter(|d| *d > BigInt::from(1))
            .map(|d| d.to_u64().ok_or_else(|| Error::Overflow(d.to_string())))
            .collect::<Result<Vec<_>>>()?;
        FgAbelianGroup::new(c - rank_out - incoming.rank, torsion)
    }

    /// `|H^q(C; Z_k)| = |ker d^q| / |im d^{q-1}|` with `d^q` the transpose of
    /// `d_{q+1}`, everything mod `k`.
    pub fn cohomology_zk_order(&self, q: usize, k: u64) -> BigUint {
        assert!(k >= 1, "k must be positive");
        if self.cells_in(q) == 0 {
            return BigUint::from(1u32);
        }
        let kernel = kernel_count_mod_k(&self.boundary(q + 1).transpose(), k);
        let image = if q == 0 {
            BigUint::from(1u32)
        } else {
            let before = self.boundary(q).transpose();
            BigUint::from(k).pow(before.cols() as u32) / kernel_count_mod_k(&before, k)
        };
        kernel / image
    }

    /// Exhaustive count of `(cocycles, coboundaries)` in `C^q(Z_k)`.
    pub fn count_cocycles_bruteforce(&self, q: usize, k: u64) -> Result<(u64, u64)> {
        assert!(k >= 1, "k must be positive");
        let c = self.cells_in(q);
        let c_prev = if q == 0 { 0 } else { self.cells_in(q - 1) };
        for n in [c, c_prev] {
            let states = (k as u128).checked_pow(n as u32);
            if states.is_none_or(|s| s > ENUMERATION_GUARD as u128) {
                return Err(Error::TooLarge {
                    states: format!("{k}^{n}"),
                    guard: ENUMERATION_GUARD,
                });
            }
        }
        let reduce = |m: &IntMatrix| -> Vec<Vec<u64>> {
            let kk = BigInt::from(k);
            m.to_rows()
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|x| {
                            let r = ((x % &kk) + &kk) % &kk;
                            r.to_u64().expect("reduced mod k")
                        })
                        .collect()
                })
                .collect()
        };
        // d^q x = d_{q+1}^T x, so the cocycle test reads the columns of d_{q+1}
        let cocycle_test = reduce(&self.boundary(q + 1).transpose());
        let coboundary_map = reduce(&self.boundary(q).transpose());

        let mut cocycles = 0u64;
        for_each_cochain(c, k, |x| {
            if apply_mod(&cocycle_test, x, k).iter().all(|&v| v == 0) {
                cocycles += 1;
            }
        });
        let mut images: HashSet<Vec<u64>> = HashSet::new();
        if q == 0 {
            images.insert(vec![0; c]);
        } else {
            for_each_cochain(c_prev, k, |y| {
                images.insert(apply_mod(&coboundary_map, y, k));
            });
        }
        Ok((cocycles, images.len() as u64))
    }
}

fn apply_mod(m: &[Vec<u64>], x: &[u64], k: u64) -> Vec<u64> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(0u128, |acc, (&a, &b)| (acc + a as u128 * b as u128) % k as u128) as u64
        })
        .collect()
}

fn for_each_cochain(n: usize, k: u64, mut f: impl FnMut(&[u64])) {
    let mut x = vec![0u64; n];
    loop {
        f(&x);
        let mut pos = n;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            x[pos] += 1;
            if x[pos] < k {
                break;
            }
            x[pos] = 0;
        }
    }
}

/// Betti numbers and torsion of every degree up to the top one.
pub fn all_homology(c: &ChainComplex) -> Result<Vec<FgAbelianGroup>> {
    match c.top_degree() {
        None => Ok(Vec::new()),
        Some(top) => (0..=top).map(|q| c.homology(q)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge() -> SimplicialComplex {
        SimplicialComplex::parse("0 1\n").unwrap()
    }

    fn triangle() -> SimplicialComplex {
        SimplicialComplex::parse("0 1\n1 2\n0 2\n").unwrap()
    }

    fn sphere() -> SimplicialComplex {
        SimplicialComplex::parse("0 1 2\n0 1 3\n0 2 3\n1 2 3\n").unwrap()
    }

    /// Seven-vertex torus.
    fn torus() -> SimplicialComplex {
        let facets: Vec<Vec<usize>> = (0..7)
            .flat_map(|i| {
                [
                    vec![i, (i + 1) % 7, (i + 3) % 7],
                    vec![i, (i + 2) % 7, (i + 3) % 7],
                ]
            })
            .collect();
        SimplicialComplex::from_facets(&facets).unwrap()
    }

    /// Six-vertex real projective plane.
    fn projective_plane() -> SimplicialComplex {
        let text = "0 1 2\n0 2 3\n0 3 4\n0 4 5\n0 5 1\n1 2 4\n2 3 5\n3 4 1\n4 5 2\n5 1 3\n";
        SimplicialComplex::parse(text).unwrap()
    }

    fn group(rank: usize, torsion: &[u64]) -> FgAbelianGroup {
        FgAbelianGroup::new(rank, torsion.to_vec()).unwrap()
    }

    #[test]
    fn edge_boundary() {
        let c = edge().boundary_matrices().unwrap();
        assert_eq!(c.boundary(1), IntMatrix::from_rows(&[vec![-1], vec![1]]));
        assert_eq!(c.cells(), &[2, 1]);
    }

    #[test]
    fn triangle_homology() {
        let c = triangle().boundary_matrices().unwrap();
        assert_eq!(smith_normal_form(&c.boundary(1)).rank, 2);
        assert_eq!(c.homology(0).unwrap(), group(1, &[]));
        assert_eq!(c.homology(1).unwrap(), group(1, &[]));
        assert_eq!(c.homology(2).unwrap(), FgAbelianGroup::trivial());
        assert_eq!(c.homology(7).unwrap(), FgAbelianGroup::trivial());
    }

    #[test]
    fn sphere_homology() {
        let c = sphere().boundary_matrices().unwrap();
        assert!(c.boundary(1).mul(&c.boundary(2)).unwrap().is_zero());
        assert_eq!(c.homology(0).unwrap(), group(1, &[]));
        assert_eq!(c.homology(1).unwrap(), FgAbelianGroup::trivial());
        assert_eq!(c.homology(2).unwrap(), group(1, &[]));
    }

    #[test]
    fn surfaces() {
        let t = torus().boundary_matrices().unwrap();
        assert_eq!(t.cells(), &[7, 21, 14]);
        assert_eq!(t.homology(1).unwrap(), group(2, &[]));
        assert_eq!(t.homology(2).unwrap(), group(1, &[]));
        let p = projective_plane().boundary_matrices().unwrap();
        assert_eq!(p.homology(1).unwrap(), group(0, &[2]));
        assert_eq!(p.homology(2).unwrap(), FgAbelianGroup::trivial());
        assert_eq!(p.cohomology_zk_order(2, 2), BigUint::from(2u32));
        assert_eq!(p.cohomology_zk_order(2, 3), BigUint::from(1u32));
    }

    #[test]
    fn lens_cw_family() {
        for p in 2..=12 {
            let c = ChainComplex::lens_cw(p);
            let h1 = c.homology(1).unwrap();
            assert_eq!(h1, group(0, &[p as u64]));
            assert_eq!(c.homology(3).unwrap(), group(1, &[]));
            for k in 1..=12 {
                assert_eq!(c.cohomology_zk_order(1, k), h1.hom_order_to_zk(k));
            }
        }
        let c = ChainComplex::lens_cw(7);
        assert_eq!(c.homology(1).unwrap(), group(0, &[7]));
        assert_eq!(
            ChainComplex::lens_cw(4).cohomology_zk_order(1, 2),
            BigUint::from(2u32)
        );
    }

    #[test]
    fn cohomology_examples() {
        let c = triangle().boundary_matrices().unwrap();
        assert_eq!(c.cohomology_zk_order(1, 1), BigUint::from(1u32));
        assert_eq!(c.cohomology_zk_order(1, 5), BigUint::from(5u32));
        assert_eq!(c.count_cocycles_bruteforce(1, 2).unwrap(), (8, 4));
        assert_eq!(c.count_cocycles_bruteforce(1, 1).unwrap(), (1, 1));
        let e = edge().boundary_matrices().unwrap();
        let (z, b) = e.count_cocycles_bruteforce(0, 3).unwrap();
        assert_eq!(z / b, 3);
        assert_eq!(e.cohomology_zk_order(0, 3), BigUint::from(3u32));
    }

    #[test]
    fn enumeration_guard() {
        let t = torus().boundary_matrices().unwrap();
        assert!(matches!(
            t.count_cocycles_bruteforce(1, 3),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn brute_force_matches_snf_path() {
        let complexes = [
            edge(),
            triangle(),
            sphere(),
            projective_plane(),
            SimplicialComplex::parse("0 1 2\n2 3\n3 4\n4 2\n5\n").unwrap(),
        ];
        let mut chains: Vec<ChainComplex> =
            complexes.iter().map(|s| s.boundary_matrices().unwrap()).collect();
        chains.extend((2..=6).map(ChainComplex::lens_cw));
        for c in &chains {
            for q in 0..=c.top_degree().unwrap() {
                for k in 1..=6 {
                    let Ok((z, b)) = c.count_cocycles_bruteforce(q, k) else {
                        continue;
                    };
                    assert_eq!(z % b, 0);
                    assert_eq!(BigUint::from(z / b), c.cohomology_zk_order(q, k), "q={q} k={k}");
                }
            }
        }
    }

    #[test]
    fn universal_coefficients_in_degree_one() {
        let complexes = [triangle(), sphere(), torus(), projective_plane()];
        for s in &complexes {
            let c = s.boundary_matrices().unwrap();
            let h1 = c.homology(1).unwrap();
            for k in 1..=8 {
                assert_eq!(c.cohomology_zk_order(1, k), h1.hom_order_to_zk(k));
            }
        }
    }

    #[test]
    fn rejects_non_complexes() {
        let missing = SimplicialComplex::new(
            3,
            vec![
                vec![vec![0], vec![1], vec![2]],
                vec![vec![0, 1], vec![1, 2]],
                vec![vec![0, 1, 2]],
            ],
        );
        assert!(matches!(missing, Err(Error::NotAComplex(_))));
        let unsorted = SimplicialComplex::new(2, vec![vec![vec![0], vec![1]], vec![vec![1, 0]]]);
        assert!(matches!(unsorted, Err(Error::NotAComplex(_))));
        assert!(SimplicialComplex::parse("0 0 1\n").is_err());
        assert!(matches!(
            SimplicialComplex::parse("0 x\n"),
            Err(Error::Parse { .. })
        ));
        let bad = ChainComplex::new(
            vec![1, 1, 1],
            vec![IntMatrix::from_rows(&[vec![1]]), IntMatrix::from_rows(&[vec![1]])],
        );
        assert!(matches!(bad, Err(Error::BoundarySquareNonzero(2))));
    }

    #[test]
    fn json_round_trip() {
        let c = sphere().boundary_matrices().unwrap();
        let back = ChainComplex::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
        let lens = r#"{"cells":[1,1,1,1],"boundary":[[[0]],[[5]],[[0]]]}"#;
        assert_eq!(ChainComplex::from_json(lens).unwrap(), ChainComplex::lens_cw(5));
        let zero_rows = r#"{"cells":[0,2],"boundary":[[]]}"#;
        assert_eq!(
            ChainComplex::from_json(zero_rows).unwrap().homology(1).unwrap(),
            group(2, &[])
        );
        assert!(matches!(ChainComplex::from_json("{"), Err(Error::Parse { .. })));
        assert!(ChainComplex::from_json(r#"{"cells":[1,1],"boundary":[[[1,2]]]}"#).is_err());
    }

    #[test]
    fn empty_complex() {
        let c = ChainComplex::new(Vec::new(), Vec::new()).unwrap();
        assert_eq!(c.homology(0).unwrap(), FgAbelianGroup::trivial());
        assert!(all_homology(&c).unwrap().is_empty());
        assert_eq!(c.cohomology_zk_order(0, 4), BigUint::from(1u32));
    }
}
