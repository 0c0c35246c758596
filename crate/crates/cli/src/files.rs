//! JSON file formats for instances, certificates and moment vectors.
//!
//! Rationals are strings (`"4/63"`, `"-2"`); subsets are sorted 1-based
//! index lists written as strings (`"[1,3]"`, `"[]"`). Output is emitted in
//! canonical subset order so equal inputs give identical bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, ensure, Context, Result};
use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use lasgap::certify::GapCertificate;
use lasgap::lattice::{enumerate_subsets, lattice_size, LatticeVector, Repr, MAX_N};
use lasgap::scalar::{format_rational, parse_rational};
use lasgap::{Instance, LinearForm, MultilinearPoly, Rational, SubsetIndex};

/// Parses `"[1,3]"` into a subset of `{1..n}`; indices must be strictly increasing.
pub fn parse_subset(text: &str, n: usize) -> Result<SubsetIndex> {
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| anyhow!("subset {text:?} is not of the form [i,j,...]"))?;
    let indices = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| anyhow!("bad index {p:?} in subset {text:?}"))
            })
            .collect::<Result<Vec<_>>>()?
    };
    parse_indices(&indices, n).with_context(|| format!("subset {text:?}"))
}

fn parse_indices(indices: &[usize], n: usize) -> Result<SubsetIndex> {
    ensure!(
        indices.windows(2).all(|w| w[0] < w[1]),
        "indices must be strictly increasing"
    );
    ensure!(
        indices.iter().all(|&i| (1..=n).contains(&i)),
        "indices must lie in 1..={n}"
    );
    Ok(SubsetIndex::from_indices(indices.iter().copied())?)
}

fn rational(text: &str) -> Result<Rational> {
    parse_rational(text).map_err(|e| anyhow!(e))
}

fn check_n(n: usize) -> Result<()> {
    ensure!(n <= MAX_N, "n = {n} exceeds the supported maximum {MAX_N}");
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub monomial: Vec<usize>,
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintEntry {
    pub a: Vec<String>,
    pub g0: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub objective: Vec<Term>,
    #[serde(default)]
    pub constraints: Vec<ConstraintEntry>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        let objective = inst
            .objective
            .terms()
            .map(|(s, c)| Term {
                monomial: s.indices().collect(),
                coeff: format_rational(c),
            })
            .collect();
        let constraints = inst
            .constraints
            .iter()
            .map(|g| ConstraintEntry {
                a: g.a.iter().map(format_rational).collect(),
                g0: format_rational(&g.g0),
            })
            .collect();
        InstanceFile {
            n: inst.n(),
            objective,
            constraints,
        }
    }

    pub fn to_instance(&self) -> Result<Instance> {
        let n = self.n;
        check_n(n)?;
        let mut seen = BTreeSet::new();
        let mut terms = Vec::with_capacity(self.objective.len());
        for (i, term) in self.objective.iter().enumerate() {
            let s = parse_indices(&term.monomial, n)
                .with_context(|| format!("objective term {i}"))?;
            ensure!(seen.insert(s), "objective term {i}: monomial {s} repeated");
            terms.push((s, rational(&term.coeff).with_context(|| format!("objective term {i}"))?));
        }
        let objective = MultilinearPoly::from_coeffs(n, terms)?;
        let constraints = self
            .constraints
            .iter()
            .enumerate()
            .map(|(l, c)| {
                ensure!(
                    c.a.len() == n,
                    "constraint {l}: expected {n} coefficients, found {}",
                    c.a.len()
                );
                let a = c.a.iter().map(|v| rational(v)).collect::<Result<Vec<_>>>()?;
                Ok(LinearForm::new(a, rational(&c.g0)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Instance::new(objective, constraints)?)
    }
}

/// JSON object kept as an ordered list so duplicate keys can be reported.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Entries(pub Vec<(String, String)>);

impl<'de> Deserialize<'de> for Entries {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct EntriesVisitor;
        impl<'de> Visitor<'de> for EntriesVisitor {
            type Value = Entries;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping subsets to rational strings")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Entries, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, String>()? {
                    out.push((k, v));
                }
                Ok(Entries(out))
            }
        }
        de.deserialize_map(EntriesVisitor)
    }
}

impl Serialize for Entries {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = ser.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl Entries {
    fn from_vector(v: &LatticeVector<Rational>) -> Self {
        Entries(
            v.iter()
                .map(|(s, x)| (s.to_string(), format_rational(x)))
                .collect(),
        )
    }

    /// Parses every entry; each subset at most once.
    fn parse(&self, n: usize) -> Result<BTreeMap<SubsetIndex, Rational>> {
        let mut out = BTreeMap::new();
        for (k, v) in &self.0 {
            let s = parse_subset(k, n)?;
            let x = rational(v).with_context(|| format!("entry {k}"))?;
            ensure!(out.insert(s, x).is_none(), "subset {k} appears more than once");
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub n: usize,
    #[serde(rename = "yN")]
    pub y_n: Entries,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl CertificateFile {
    pub fn from_certificate(cert: &GapCertificate) -> Self {
        CertificateFile {
            n: cert.n(),
            y_n: Entries::from_vector(cert.y_n()),
            metadata: cert.metadata.clone(),
        }
    }

    /// Requires every subset exactly once and an exact total of 1.
    pub fn to_certificate(&self) -> Result<GapCertificate> {
        let n = self.n;
        check_n(n)?;
        let mut values = self.y_n.parse(n)?;
        let expected = 1usize << n;
        ensure!(
            values.len() == expected,
            "certificate lists {} subsets, expected all {expected}",
            values.len()
        );
        let mut cert = GapCertificate::from_fn(n, |s| values.remove(&s).expect("all subsets present"))?;
        cert.metadata = self.metadata.clone();
        Ok(cert)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentFile {
    pub n: usize,
    pub y: Entries,
}

impl MomentFile {
    pub fn from_vector(y: &LatticeVector<Rational>) -> Self {
        MomentFile {
            n: y.n(),
            y: Entries::from_vector(y),
        }
    }

    /// The entries must cover exactly the subsets of size at most some level.
    pub fn to_vector(&self) -> Result<LatticeVector<Rational>> {
        let n = self.n;
        check_n(n)?;
        let mut values = self.y.parse(n)?;
        let level = values.keys().map(|s| s.len()).max().unwrap_or(0);
        ensure!(
            values.len() == lattice_size(n, level),
            "moment vector must list every subset of size at most {level}"
        );
        let order = enumerate_subsets(n, level)?;
        let vals = order
            .iter()
            .map(|s| {
                values
                    .remove(s)
                    .ok_or_else(|| anyhow!("subset {s} missing from the moment vector"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LatticeVector::new(n, level, Repr::Moment, vals)?)
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("file types serialize");
    s.push('\n');
    s
}

pub fn instance_json(inst: &Instance) -> String {
    to_json(&InstanceFile::from_instance(inst))
}

pub fn certificate_json(cert: &GapCertificate) -> String {
    to_json(&CertificateFile::from_certificate(cert))
}

pub fn moment_json(y: &LatticeVector<Rational>) -> String {
    to_json(&MomentFile::from_vector(y))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text)?;
    file.to_instance()
}

pub fn parse_certificate(text: &str) -> Result<GapCertificate> {
    let file: CertificateFile = serde_json::from_str(text)?;
    file.to_certificate()
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

pub fn load_certificate(path: &Path) -> Result<GapCertificate> {
    parse_certificate(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// A vector given either as a certificate (`yN`) or in moment form (`y`).
#[derive(Debug, Clone)]
pub enum VectorFile {
    Certificate(GapCertificate),
    Moment(LatticeVector<Rational>),
}

impl VectorFile {
    pub fn moment_vector(&self) -> LatticeVector<Rational> {
        match self {
            VectorFile::Certificate(c) => c.moment_vector(),
            VectorFile::Moment(y) => y.clone(),
        }
    }
}

pub fn parse_vector(text: &str) -> Result<VectorFile> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| anyhow!("expected a JSON object"))?;
    if obj.contains_key("yN") {
        Ok(VectorFile::Certificate(parse_certificate(text)?))
    } else if obj.contains_key("y") {
        let file: MomentFile = serde_json::from_str(text)?;
        Ok(VectorFile::Moment(file.to_vector()?))
    } else {
        bail!("expected a \"yN\" (certificate) or \"y\" (moment) field")
    }
}

pub fn load_vector(path: &Path) -> Result<VectorFile> {
    parse_vector(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}
