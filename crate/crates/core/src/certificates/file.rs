//! JSON certificate files.
//!
//! Both kinds share a header with `kind`, `variables` and `polynomial` (in
//! canonical text). Monomials are written as exponent tuples like `(2,0,1)`
//! and every scalar as a `"num/den"` string, so files round-trip byte for byte.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::basis::MonomialBasis;
use super::gram::{verify_gram, GramCertificate};
use super::matrix::RatMatrix;
use super::report::VerificationReport;
use super::separation::{verify_separation, SeparationCertificate};
use crate::error::{Error, Result};
use crate::polynomial::scalar::{format_scalar, parse_scalar};
use crate::polynomial::text::{from_canonical, parse_tuple, to_canonical};
use crate::polynomial::{Monomial, Polynomial};

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    Gram(GramCertificate),
    Separation(SeparationCertificate),
}

/// A certificate together with the polynomial it speaks about.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateFile {
    pub variables: Vec<String>,
    pub polynomial: Polynomial,
    pub certificate: Certificate,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    kind: String,
    variables: Vec<String>,
    polynomial: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    basis: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    multiplier: Option<String>,
    #[serde(default, rename = "Q", skip_serializing_if = "Option::is_none")]
    q: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ordering: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    moment_basis: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<Vec<String>>,
}

fn basis_text(b: &MonomialBasis) -> Vec<String> {
    b.iter().map(Monomial::tuple_text).collect()
}

fn parse_basis(num_vars: usize, items: &[String]) -> Result<MonomialBasis> {
    let monomials = items
        .iter()
        .map(|t| parse_tuple(t).map(Monomial::new))
        .collect::<Result<Vec<_>>>()?;
    MonomialBasis::new(num_vars, monomials)
}

fn missing(field: &str) -> Error {
    Error::Parse(format!("certificate file lacks `{field}`"))
}

impl CertificateFile {
    pub fn new(polynomial: Polynomial, certificate: Certificate) -> Self {
        let variables = crate::polynomial::default_names(polynomial.num_vars());
        CertificateFile {
            variables,
            polynomial,
            certificate,
        }
    }

    pub fn with_variables(mut self, names: Vec<String>) -> Self {
        self.variables = names;
        self
    }

    pub fn to_json(&self) -> String {
        let mut raw = RawFile {
            kind: String::new(),
            variables: self.variables.clone(),
            polynomial: to_canonical(&self.polynomial),
            basis: None,
            scale: None,
            multiplier: None,
            q: None,
            ordering: None,
            moment_basis: None,
            c: None,
        };
        match &self.certificate {
            Certificate::Gram(g) => {
                raw.kind = "gram".into();
                raw.basis = Some(basis_text(&g.basis));
                raw.scale = Some(format_scalar(&g.scale));
                raw.multiplier = Some(to_canonical(&g.multiplier));
                raw.q = Some(
                    (0..g.gram.rows())
                        .map(|i| g.gram.row(i).iter().map(format_scalar).collect())
                        .collect(),
                );
            }
            Certificate::Separation(s) => {
                raw.kind = "separation".into();
                raw.ordering = Some(basis_text(&s.ordering));
                raw.moment_basis = Some(basis_text(&s.moment_basis));
                raw.c = Some(s.dual.iter().map(format_scalar).collect());
            }
        }
        let mut out = serde_json::to_string_pretty(&raw).expect("plain data serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let polynomial = from_canonical(&raw.polynomial)?;
        let n = polynomial.num_vars();
        if raw.variables.len() != n {
            return Err(Error::Parse(format!(
                "{} variable names for a polynomial in {n} variables",
                raw.variables.len()
            )));
        }
        let certificate = match raw.kind.as_str() {
            "gram" => {
                let basis = parse_basis(n, raw.basis.as_deref().ok_or_else(|| missing("basis"))?)?;
                let scale = match &raw.scale {
                    Some(s) => parse_scalar(s)?,
                    None => num_traits::One::one(),
                };
                let multiplier = match &raw.multiplier {
                    Some(m) => from_canonical(m)?,
                    None => Polynomial::one(n),
                };
                let rows = raw
                    .q
                    .ok_or_else(|| missing("Q"))?
                    .iter()
                    .map(|r| r.iter().map(|s| parse_scalar(s)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                let gram = RatMatrix::from_rows(rows)?;
                Certificate::Gram(GramCertificate::with_multiplier(basis, gram, multiplier, scale)?)
            }
            "separation" => {
                let ordering = parse_basis(n, raw.ordering.as_deref().ok_or_else(|| missing("ordering"))?)?;
                let moment_basis = parse_basis(n, raw.moment_basis.as_deref().ok_or_else(|| missing("moment_basis"))?)?;
                let dual = raw
                    .c
                    .ok_or_else(|| missing("c"))?
                    .iter()
                    .map(|s| parse_scalar(s))
                    .collect::<Result<Vec<_>>>()?;
                Certificate::Separation(SeparationCertificate::new(ordering, dual, moment_basis)?)
            }
            other => return Err(Error::Parse(format!("unknown certificate kind `{other}`"))),
        };
        Ok(CertificateFile {
            variables: raw.variables,
            polynomial,
            certificate,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    /// Verifies the certificate against the embedded polynomial.
    pub fn verify(&self) -> Result<VerificationReport> {
        self.verify_against(&self.polynomial)
    }

    /// Verifies against an externally supplied polynomial.
    pub fn verify_against(&self, p: &Polynomial) -> Result<VerificationReport> {
        match &self.certificate {
            Certificate::Gram(g) => verify_gram(p, g),
            Certificate::Separation(s) => verify_separation(p, s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::scalar::{int, ratio};

    #[test]
    fn gram_round_trip() {
        let p = Polynomial::from_int_terms(2, &[(1, &[2, 0]), (1, &[0, 2])]);
        let basis = MonomialBasis::from_exponents(2, &[&[1, 0], &[0, 1]]).unwrap();
        let mut q = RatMatrix::identity(2);
        q.set(0, 0, int(2));
        q.set(1, 1, int(2));
        let g = GramCertificate::with_multiplier(basis, q, Polynomial::one(2), ratio(1, 2)).unwrap();
        let file = CertificateFile::new(p, Certificate::Gram(g));
        let text = file.to_json();
        assert!(text.contains("\"scale\": \"1/2\""));
        let back = CertificateFile::from_json(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_json(), text);
        assert!(back.verify().unwrap().valid);
    }

    #[test]
    fn malformed_files() {
        assert!(CertificateFile::from_json("{").is_err());
        assert!(CertificateFile::from_json(r#"{"kind":"gram","variables":["x1"],"polynomial":"poly 1\n"}"#).is_err());
        assert!(CertificateFile::from_json(r#"{"kind":"other","variables":["x1"],"polynomial":"poly 1\n"}"#).is_err());
    }
}
