//! Closed 3-manifolds through their homology and linking form: the
//! catalog, lens spaces, connected sums, and file loading.

use std::fmt;
use std::path::{Path, PathBuf};

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::abgroup::{direct_sum_forms, linking_form_from_surgery, FgAbelianGroup, LinkingForm};
use crate::error::{Error, Result};
use crate::homology::{all_homology, ChainComplex, SimplicialComplex};
use crate::linalg::IntMatrix;
use crate::sectors::SectorModel;

/// Where the homology of a [`ManifoldSpec`] comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Direct,
    Surgery(IntMatrix),
    Complex(PathBuf),
}

/// Homological data of a closed oriented manifold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifoldSpec {
    pub name: String,
    pub dimension: usize,
    /// `b_0, ..., b_n`
    pub betti: Vec<usize>,
    /// divisor chain of the torsion of `H_0, ..., H_n`
    pub torsion: Vec<Vec<u64>>,
    /// the form on the torsion of `H_1`, on its canonical generators
    pub linking_form: Option<LinkingForm>,
    pub source: Source,
}

impl ManifoldSpec {
    /// `H_q`.
    pub fn homology(&self, q: usize) -> FgAbelianGroup {
        match (self.betti.get(q), self.torsion.get(q)) {
            (Some(&b), Some(t)) => FgAbelianGroup::new(b, t.clone()).expect("validated"),
            _ => FgAbelianGroup::trivial(),
        }
    }

    pub fn h1(&self) -> FgAbelianGroup {
        self.homology(1)
    }

    pub fn require_form(&self) -> Result<&LinkingForm> {
        self.linking_form
            .as_ref()
            .ok_or_else(|| Error::MissingLinkingForm(self.name.clone()))
    }

    /// The sector model `(b_1, T_1, Q)` at resolution `m`.
    pub fn sector_model(&self, resolution: u64) -> Result<SectorModel> {
        SectorModel::from_group(&self.h1(), self.require_form()?.clone(), resolution)
    }

    /// The manifold obtained by integral surgery on a framed link with
    /// linking matrix `l`.
    pub fn from_surgery(name: impl Into<String>, l: IntMatrix) -> Result<Self> {
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
        let h1 = FgAbelianGroup::from_presentation(&l)?;
        let linking_form = if l.determinant()?.is_zero() {
            // the torsion form of a degenerate link is not derived here
            h1.torsion().is_empty().then(|| LinkingForm::zero(&h1))
        } else {
            Some(linking_form_from_surgery(&l)?.1)
        };
        Ok(ManifoldSpec {
            name: name.into(),
            dimension: 3,
            betti: vec![1, h1.rank(), h1.rank(), 1],
            torsion: vec![Vec::new(), h1.torsion().to_vec(), Vec::new(), Vec::new()],
            linking_form,
            source: Source::Surgery(l),
        })
    }

    /// Checks the declared data for internal consistency and against its
    /// source. Relative complex paths are resolved against `base`.
    pub fn validate(&self, base: Option<&Path>) -> Result<()> {
        let n = self.dimension;
        if self.betti.len() != n + 1 || self.torsion.len() != n + 1 {
            return Err(Error::Consistency(format!(
                "{}: dimension {n} needs {} Betti numbers and torsion chains, found {} and {}",
                self.name,
                n + 1,
                self.betti.len(),
                self.torsion.len()
            )));
        }
        for (q, t) in self.torsion.iter().enumerate() {
            FgAbelianGroup::new(0, t.clone())
                .map_err(|e| Error::Consistency(format!("{}: torsion of H_{q}: {e}", self.name)))?;
        }
        if !self.torsion[0].is_empty() || !self.torsion[n].is_empty() {
            return Err(Error::Consistency(format!(
                "{}: H_0 and H_{n} of a closed oriented manifold are free",
                self.name
            )));
        }
        if n == 3 {
            let dual = self.betti[0] == self.betti[3]
                && self.betti[1] == self.betti[2]
                && self.torsion[2].is_empty();
            if !dual {
                return Err(Error::Consistency(format!(
                    "{}: homology violates Poincare duality",
                    self.name
                )));
            }
        }
        if let Some(q) = &self.linking_form {
            let t = self.h1().torsion_subgroup();
            LinkingForm::new(&t, q.values().to_vec())
                .map_err(|e| Error::Consistency(format!("{}: {e}", self.name)))?;
            if !q.is_nondegenerate(&t) {
                return Err(Error::Consistency(format!(
                    "{}: linking form is degenerate",
                    self.name
                )));
            }
        }
        match &self.source {
            Source::Direct => Ok(()),
            Source::Surgery(l) => {
                let derived = ManifoldSpec::from_surgery(self.name.clone(), l.clone())?;
                self.compare(&derived.betti, &derived.torsion)
            }
            Source::Complex(path) => {
                let path = match base {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.clone(),
                };
                let complex = load_chain_complex(&path)?;
                let groups = all_homology(&complex)?;
                let betti: Vec<usize> = (0..=n).map(|q| groups.get(q).map_or(0, |g| g.rank())).collect();
                let torsion: Vec<Vec<u64>> = (0..=n)
                    .map(|q| groups.get(q).map_or(Vec::new(), |g| g.torsion().to_vec()))
                    .collect();
                if groups.len() > n + 1 {
                    return Err(Error::Consistency(format!(
                        "{}: complex has cells above dimension {n}",
                        self.name
                    )));
                }
                self.compare(&betti, &torsion)
            }
        }
    }

    fn compare(&self, betti: &[usize], torsion: &[Vec<u64>]) -> Result<()> {
        if self.betti != betti || self.torsion != torsion {
            return Err(Error::Consistency(format!(
                "{}: declared betti {:?} torsion {:?}, source gives betti {:?} torsion {:?}",
                self.name, self.betti, self.torsion, betti, torsion
            )));
        }
        Ok(())
    }

    pub fn to_json_value(&self) -> Value {
        let raw = RawSpec {
            name: self.name.clone(),
            dimension: self.dimension,
            betti: self.betti.clone(),
            torsion: self.torsion.clone(),
            linking_form: self.linking_form.as_ref().map(LinkingForm::to_strings),
            source: Some(match &self.source {
                Source::Direct => RawSource::Direct("direct".into()),
                Source::Surgery(l) => RawSource::Surgery {
                    surgery: l.to_i64_rows().expect("surgery matrices are small"),
                },
                Source::Complex(p) => RawSource::Complex {
                    complex: p.display().to_string(),
                },
            }),
        };
        serde_json::to_value(raw).expect("serializable")
    }

    /// Parses the JSON form and validates it.
    pub fn from_json(text: &str, base: Option<&Path>) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(text).map_err(|e| Error::parse("manifold spec", e))?;
        let source = match raw.source {
            None => Source::Direct,
            Some(RawSource::Direct(s)) if s == "direct" => Source::Direct,
            Some(RawSource::Direct(s)) => {
                return Err(Error::parse(
                    "manifold spec: source",
                    format!("unknown source `{s}`"),
                ))
            }
            Some(RawSource::Surgery { surgery }) => Source::Surgery(surgery_matrix(&surgery)?),
            Some(RawSource::Complex { complex }) => Source::Complex(PathBuf::from(complex)),
        };
        let linking_form = match raw.linking_form {
            None => None,
            Some(rows) => {
                let chain = raw.torsion.get(1).cloned().unwrap_or_default();
                let t =
                    FgAbelianGroup::new(0, chain).map_err(|e| Error::parse("manifold spec: torsion", e))?;
                Some(
                    LinkingForm::from_strings(&t, &rows)
                        .map_err(|e| Error::parse("manifold spec: linking_form", e))?,
                )
            }
        };
        let spec = ManifoldSpec {
            name: raw.name,
            dimension: raw.dimension,
            betti: raw.betti,
            torsion: raw.torsion,
            linking_form,
            source,
        };
        spec.validate(base)?;
        Ok(spec)
    }
}

impl fmt::Display for ManifoldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: H_1 = {}", self.name, self.h1())?;
        if let Some(q) = &self.linking_form {
            if q.dim() > 0 {
                write!(f, ", Q = {q}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    name: String,
    dimension: usize,
    betti: Vec<usize>,
    torsion: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    linking_form: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<RawSource>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawSource {
    Direct(String),
    Surgery { surgery: Vec<Vec<i64>> },
    Complex { complex: String },
}

fn surgery_matrix(rows: &[Vec<i64>]) -> Result<IntMatrix> {
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(Error::parse(
            "surgery matrix",
            "rows must all have the matrix size",
        ));
    }
    IntMatrix::from_rows_with_cols(rows, rows.len())
}

/// The continued fraction `p/q = a_1 - 1/(a_2 - 1/(... - 1/a_r))` with
/// every `a_i >= 2`.
pub fn continued_fraction(p: u64, q: u64) -> Vec<i64> {
    let (mut num, mut den) = (p as i64, q as i64);
    let mut out = Vec::new();
    while den != 0 {
        let a = Integer::div_ceil(&num, &den);
        out.push(a);
        (num, den) = (den, a * den - num);
    }
    out
}

/// `L(p, q)` by surgery on a chain of unknots framed by the continued
/// fraction of `p/q`.
pub fn lens_space(p: u64, q: u64) -> Result<ManifoldSpec> {
    if p < 2 {
        return Err(Error::InvalidParameters(format!("L({p}, {q}) needs p >= 2")));
    }
    if p.gcd(&q) != 1 {
        return Err(Error::InvalidParameters(format!(
            "L({p}, {q}) needs gcd(p, q) = 1"
        )));
    }
    let a = continued_fraction(p, q % p);
    let r = a.len();
    let mut rows = vec![vec![0i64; r]; r];
    for i in 0..r {
        rows[i][i] = a[i];
        if i + 1 < r {
            rows[i][i + 1] = -1;
            rows[i + 1][i] = -1;
        }
    }
    let name = if (p, q % p) == (2, 1) {
        "RP3".to_string()
    } else {
        format!("L{p}_{}", q % p)
    };
    ManifoldSpec::from_surgery(name, IntMatrix::from_rows(&rows))
}

/// `a # b`: homology adds in the middle degrees and the linking forms add
/// orthogonally.
pub fn connected_sum(a: &ManifoldSpec, b: &ManifoldSpec) -> Result<ManifoldSpec> {
    if a.dimension != b.dimension {
        return Err(Error::ManifoldDimensionMismatch(a.dimension, b.dimension));
    }
    let n = a.dimension;
    let mut betti = Vec::with_capacity(n + 1);
    let mut torsion = Vec::with_capacity(n + 1);
    for q in 0..=n {
        if q == 0 || q == n {
            betti.push(a.betti[q] + b.betti[q] - 1);
            torsion.push(Vec::new());
        } else {
            let g = a.homology(q).direct_sum(&b.homology(q));
            betti.push(g.rank());
            torsion.push(g.torsion().to_vec());
        }
    }
    let linking_form = match (&a.linking_form, &b.linking_form) {
        (Some(qa), Some(qb)) => {
            let ta = a.h1().torsion_subgroup();
            let tb = b.h1().torsion_subgroup();
            Some(direct_sum_forms((&ta, qa), (&tb, qb))?.1)
        }
        _ => None,
    };
    let source = match (&a.source, &b.source) {
        (Source::Surgery(la), Source::Surgery(lb)) => Source::Surgery(block_diagonal(la, lb)),
        _ => Source::Direct,
    };
    Ok(ManifoldSpec {
        name: format!("{}#{}", a.name, b.name),
        dimension: n,
        betti,
        torsion,
        linking_form,
        source,
    })
}

fn block_diagonal(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let mut m = IntMatrix::zeros(a.rows() + b.rows(), a.cols() + b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            m.set(i, j, a.get(i, j).clone());
        }
    }
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            m.set(a.rows() + i, a.cols() + j, b.get(i, j).clone());
        }
    }
    m
}

const LENS_ENTRIES: [(u64, u64); 12] = [
    (3, 1),
    (4, 1),
    (5, 1),
    (5, 2),
    (6, 1),
    (7, 1),
    (7, 2),
    (8, 3),
    (9, 2),
    (10, 3),
    (12, 5),
    (30, 7),
];

const SUM_ENTRIES: [&str; 5] = ["L5_1#L3_1", "L2_1#L3_1", "RP3#RP3", "L4_1#L6_1", "RP3#S2xS1"];

/// The built-in manifolds.
pub fn catalog() -> Vec<ManifoldSpec> {
    let mut out = vec![
        ManifoldSpec::from_surgery("S3", IntMatrix::from_rows(&[vec![1]])).expect("valid"),
        ManifoldSpec::from_surgery("S2xS1", IntMatrix::from_rows(&[vec![0]])).expect("valid"),
        // zero-framed Borromean rings
        ManifoldSpec::from_surgery("T3", IntMatrix::zeros(3, 3)).expect("valid"),
        lens_space(2, 1).expect("valid"),
    ];
    out.extend(
        LENS_ENTRIES
            .iter()
            .map(|&(p, q)| lens_space(p, q).expect("valid")),
    );
    out.extend(SUM_ENTRIES.iter().map(|name| lookup(name).expect("valid")));
    out
}

/// A catalog name, `L{p}_{q}`, or a `#`-separated connected sum of those.
pub fn lookup(name: &str) -> Result<ManifoldSpec> {
    let name = name.trim();
    if name.contains('#') {
        let mut parts = name.split('#').map(lookup);
        let first = parts.next().expect("split yields one part")?;
        let mut sum = parts.try_fold(first, |acc, m| connected_sum(&acc, &m?))?;
        sum.name = name.to_string();
        return Ok(sum);
    }
    match name {
        "S3" => ManifoldSpec::from_surgery("S3", IntMatrix::from_rows(&[vec![1]])),
        "S2xS1" => ManifoldSpec::from_surgery("S2xS1", IntMatrix::from_rows(&[vec![0]])),
        "T3" => ManifoldSpec::from_surgery("T3", IntMatrix::zeros(3, 3)),
        "RP3" => lens_space(2, 1),
        _ => {
            let parsed = name
                .strip_prefix('L')
                .and_then(|rest| rest.split_once('_'))
                .and_then(|(p, q)| Some((p.parse::<u64>().ok()?, q.parse::<u64>().ok()?)));
            match parsed {
                Some((p, q)) => {
                    let mut m = lens_space(p, q)?;
                    m.name = name.to_string();
                    Ok(m)
                }
                None => Err(Error::UnknownManifold(name.to_string())),
            }
        }
    }
}

/// Anything [`load`] can produce.
#[derive(Clone, Debug)]
pub enum Loaded {
    Manifold(ManifoldSpec),
    Simplicial(SimplicialComplex),
    Chain(ChainComplex),
}

/// Reads a manifold spec, a surgery matrix, a chain complex or a simplicial
/// complex, telling them apart by content.
pub fn load(path: &Path) -> Result<Loaded> {
    let text = std::fs::read_to_string(path)?;
    let context = path.display().to_string();
    let trimmed = text.trim_start();
    if !(trimmed.starts_with('{') || trimmed.starts_with('[')) {
        return Ok(Loaded::Simplicial(SimplicialComplex::parse(&text)?));
    }
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::parse(context.clone(), e))?;
    match &value {
        Value::Array(_) => Ok(Loaded::Manifold(surgery_from_value(path, value)?)),
        Value::Object(map) if map.contains_key("cells") => Ok(Loaded::Chain(ChainComplex::from_json(&text)?)),
        Value::Object(_) => Ok(Loaded::Manifold(ManifoldSpec::from_json(&text, path.parent())?)),
        _ => Err(Error::parse(context, "expected a JSON object or array")),
    }
}

fn surgery_from_value(path: &Path, value: Value) -> Result<ManifoldSpec> {
    let rows: Vec<Vec<i64>> =
        serde_json::from_value(value).map_err(|e| Error::parse(path.display().to_string(), e))?;
    let name = path
        .file_stem()
        .map_or_else(|| "surgery".to_string(), |s| s.to_string_lossy().into_owned());
    ManifoldSpec::from_surgery(name, surgery_matrix(&rows)?)
}

/// A manifold spec in JSON.
pub fn load_spec(path: &Path) -> Result<ManifoldSpec> {
    let text = std::fs::read_to_string(path)?;
    ManifoldSpec::from_json(&text, path.parent())
}

/// A surgery matrix as a JSON array of rows.
pub fn load_surgery(path: &Path) -> Result<ManifoldSpec> {
    let text = std::fs::read_to_string(path)?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e))?;
    surgery_from_value(path, value)
}

/// A chain complex in JSON, or a simplicial complex in the facet-list text
/// format.
pub fn load_chain_complex(path: &Path) -> Result<ChainComplex> {
    match load(path)? {
        Loaded::Chain(c) => Ok(c),
        Loaded::Simplicial(s) => s.boundary_matrices(),
        Loaded::Manifold(_) => Err(Error::parse(
            path.display().to_string(),
            "expected a complex, found a manifold description",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;
    use num_traits::Signed;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn torsion_of(m: &ManifoldSpec) -> Vec<u64> {
        m.h1().torsion().to_vec()
    }

    #[test]
    fn catalog_basics() {
        let s3 = lookup("S3").unwrap();
        assert_eq!(s3.betti, vec![1, 0, 0, 1]);
        assert!(torsion_of(&s3).is_empty());
        let rp3 = lookup("RP3").unwrap();
        assert_eq!(torsion_of(&rp3), vec![2]);
        assert_eq!(rp3.linking_form.as_ref().unwrap().get(0, 0), r(1, 2));
        assert_eq!(lookup("S2xS1").unwrap().h1(), FgAbelianGroup::free(1));
        assert_eq!(lookup("T3").unwrap().h1(), FgAbelianGroup::free(3));
        assert_eq!(torsion_of(&lookup("L5_1#L3_1").unwrap()), vec![15]);
        assert_eq!(torsion_of(&lookup("RP3#RP3").unwrap()), vec![2, 2]);
        assert_eq!(torsion_of(&lookup("L2_1#L3_1").unwrap()), vec![6]);
        assert!(matches!(lookup("K3"), Err(Error::UnknownManifold(_))));
    }

    #[test]
    fn catalog_entries_are_consistent() {
        let all = catalog();
        let mut names: Vec<&str> = all.iter().map(|m| m.name.as_str()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), all.len());
        for m in &all {
            m.validate(None).unwrap();
            assert!(matches!(m.source, Source::Surgery(_)), "{}", m.name);
            assert_eq!(lookup(&m.name).unwrap(), *m);
        }
    }

    #[test]
    fn continued_fractions() {
        assert_eq!(continued_fraction(5, 2), vec![3, 2]);
        assert_eq!(continued_fraction(7, 1), vec![7]);
        assert_eq!(continued_fraction(7, 3), vec![3, 2, 2]);
        for p in 2..60u64 {
            for q in (1..p).filter(|q| p.gcd(q) == 1) {
                let a = continued_fraction(p, q);
                assert!(a.iter().all(|&x| x >= 2));
                // evaluate back
                let mut v = r(*a.last().unwrap(), 1);
                for &x in a.iter().rev().skip(1) {
                    v = r(x, 1) - v.recip();
                }
                assert_eq!(v, r(p as i64, q as i64));
            }
        }
    }

    #[test]
    fn lens_examples() {
        let l = lens_space(2, 1).unwrap();
        assert_eq!(torsion_of(&l), vec![2]);
        let l7 = lens_space(7, 1).unwrap();
        assert_eq!(torsion_of(&l7), vec![7]);
        assert_eq!(*l7.linking_form.as_ref().unwrap().get(0, 0).denom(), 7);
        let l52 = lens_space(5, 2).unwrap();
        let Source::Surgery(m) = &l52.source else { panic!() };
        assert_eq!(*m, IntMatrix::from_rows(&[vec![3, -1], vec![-1, 2]]));
        assert_eq!(m.determinant().unwrap().abs(), 5.into());
        assert_eq!(torsion_of(&l52), vec![5]);
        let q51 = lens_space(5, 1).unwrap().linking_form.unwrap().get(0, 0);
        let q52 = l52.linking_form.unwrap().get(0, 0);
        assert_ne!(q51, q52);
        // Q(g, g) = q^{-1}-type value up to squares: 2/5 versus 1/5
        let squares = |q: Rational64| -> Vec<Rational64> {
            let mut v: Vec<Rational64> = (1..5)
                .map(|a| {
                    let x = q * (a * a);
                    x - x.floor()
                })
                .collect();
            v.sort();
            v
        };
        assert_ne!(squares(q51), squares(q52));
        assert!(matches!(lens_space(4, 2), Err(Error::InvalidParameters(_))));
        assert!(matches!(lens_space(1, 1), Err(Error::InvalidParameters(_))));
    }

    #[test]
    fn lens_spaces_have_order_p_and_nondegenerate_forms() {
        for p in 2..=40u64 {
            for q in (1..p).filter(|q| p.gcd(q) == 1) {
                let m = lens_space(p, q).unwrap();
                assert_eq!(m.h1().torsion_order(), p.into());
                let t = m.h1().torsion_subgroup();
                assert!(m.require_form().unwrap().is_nondegenerate(&t));
            }
        }
    }

    #[test]
    fn connected_sum_examples() {
        let s3 = lookup("S3").unwrap();
        for m in catalog() {
            let sum = connected_sum(&m, &s3).unwrap();
            assert_eq!(sum.betti, m.betti);
            assert_eq!(sum.torsion, m.torsion);
            assert_eq!(sum.linking_form, m.linking_form);
        }
        let t = lookup("RP3#RP3").unwrap();
        assert_eq!(
            t.linking_form.unwrap().values(),
            &[vec![r(1, 2), r(0, 1)], vec![r(0, 1), r(1, 2)]]
        );
        let two = ManifoldSpec {
            dimension: 2,
            betti: vec![1, 0, 1],
            torsion: vec![vec![], vec![], vec![]],
            ..s3.clone()
        };
        assert!(matches!(
            connected_sum(&s3, &two),
            Err(Error::ManifoldDimensionMismatch(3, 2))
        ));
    }

    #[test]
    fn connected_sum_is_commutative_and_associative() {
        let pieces = ["RP3", "L4_1", "L3_1", "S2xS1", "L6_1"].map(|n| lookup(n).unwrap());
        for a in &pieces {
            for b in &pieces {
                let ab = connected_sum(a, b).unwrap();
                let ba = connected_sum(b, a).unwrap();
                assert_eq!((ab.betti.clone(), ab.torsion.clone()), (ba.betti, ba.torsion));
                ab.validate(None).unwrap();
                for c in &pieces {
                    let left = connected_sum(&ab, c).unwrap();
                    let right = connected_sum(a, &connected_sum(b, c).unwrap()).unwrap();
                    assert_eq!((left.betti, left.torsion), (right.betti, right.torsion));
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        for m in catalog() {
            let text = m.to_json_value().to_string();
            let back = ManifoldSpec::from_json(&text, None).unwrap();
            assert_eq!(back, m);
        }
        let direct = r#"{"name":"RP3","dimension":3,"betti":[1,0,0,1],"torsion":[[],[2],[],[]],"linking_form":[["1/2"]]}"#;
        let m = ManifoldSpec::from_json(direct, None).unwrap();
        assert_eq!(m.source, Source::Direct);
        assert_eq!(m.require_form().unwrap().get(0, 0), r(1, 2));
    }

    #[test]
    fn json_errors() {
        assert!(matches!(
            ManifoldSpec::from_json("{", None),
            Err(Error::Parse { .. })
        ));
        let wrong = r#"{"name":"X","dimension":3,"betti":[1,0,0,1],"torsion":[[],[3],[],[]],"source":{"surgery":[[2]]}}"#;
        assert!(matches!(
            ManifoldSpec::from_json(wrong, None),
            Err(Error::Consistency(_))
        ));
        let nodual = r#"{"name":"X","dimension":3,"betti":[1,1,0,1],"torsion":[[],[],[],[]]}"#;
        assert!(matches!(
            ManifoldSpec::from_json(nodual, None),
            Err(Error::Consistency(_))
        ));
        let degenerate =
            r#"{"name":"X","dimension":3,"betti":[1,0,0,1],"torsion":[[],[2],[],[]],"linking_form":[["0"]]}"#;
        assert!(matches!(
            ManifoldSpec::from_json(degenerate, None),
            Err(Error::Consistency(_))
        ));
        let bad_form = r#"{"name":"X","dimension":3,"betti":[1,0,0,1],"torsion":[[],[2],[],[]],"linking_form":[["1/3"]]}"#;
        assert!(matches!(
            ManifoldSpec::from_json(bad_form, None),
            Err(Error::Parse { .. })
        ));
        let no_form = r#"{"name":"X","dimension":3,"betti":[1,0,0,1],"torsion":[[],[2],[],[]]}"#;
        let m = ManifoldSpec::from_json(no_form, None).unwrap();
        assert!(matches!(m.require_form(), Err(Error::MissingLinkingForm(_))));
    }

    #[test]
    fn surgery_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a2.json");
        std::fs::write(&path, "[[2,1],[1,2]]").unwrap();
        let m = load_surgery(&path).unwrap();
        assert_eq!(torsion_of(&m), vec![3]);
        assert_eq!(m.name, "a2");
        assert!(matches!(load(&path).unwrap(), Loaded::Manifold(_)));
        std::fs::write(&path, "[[2,1],[0,2]]").unwrap();
        assert!(matches!(load_surgery(&path), Err(Error::NotSymmetric)));
        std::fs::write(&path, "[[2,1],[1]]").unwrap();
        assert!(matches!(load_surgery(&path), Err(Error::Parse { .. })));
    }

    #[test]
    fn complex_sources() {
        let dir = tempfile::tempdir().unwrap();
        let lens = dir.path().join("lens5.json");
        std::fs::write(&lens, ChainComplex::lens_cw(5).to_json().unwrap()).unwrap();
        let spec = dir.path().join("spec.json");
        let good = r#"{"name":"L5","dimension":3,"betti":[1,0,0,1],"torsion":[[],[5],[],[]],"source":{"complex":"lens5.json"}}"#;
        std::fs::write(&spec, good).unwrap();
        let m = load_spec(&spec).unwrap();
        assert_eq!(m.source, Source::Complex("lens5.json".into()));
        let bad = good.replace("[[],[5],[],[]]", "[[],[7],[],[]]");
        std::fs::write(&spec, bad).unwrap();
        assert!(matches!(load_spec(&spec), Err(Error::Consistency(_))));
        assert!(matches!(load(&lens).unwrap(), Loaded::Chain(_)));

        let tri = dir.path().join("triangle.txt");
        std::fs::write(&tri, "0 1\n1 2\n0 2\n").unwrap();
        assert!(matches!(load(&tri).unwrap(), Loaded::Simplicial(_)));
        assert_eq!(
            load_chain_complex(&tri).unwrap().homology(1).unwrap(),
            FgAbelianGroup::free(1)
        );
        assert!(load_chain_complex(&spec).is_err());
    }
}
