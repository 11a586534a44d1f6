use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::polynomial::scalar::ratio;
use crate::polynomial::text::{from_canonical, parse_infix, to_canonical};
use crate::polynomial::{default_names, PolyMatrix, Polynomial};

/// What a catalog entry holds.
#[derive(Debug, Clone, PartialEq)]
pub enum CatalogObject {
    Polynomial(Polynomial),
    Matrix(PolyMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub object: CatalogObject,
    /// Cone memberships the entry is known for.
    pub claims: &'static str,
    pub description: &'static str,
}

impl CatalogEntry {
    pub fn polynomial(&self) -> Option<&Polynomial> {
        match &self.object {
            CatalogObject::Polynomial(p) => Some(p),
            CatalogObject::Matrix(_) => None,
        }
    }

    pub fn matrix(&self) -> Option<&PolyMatrix> {
        match &self.object {
            CatalogObject::Matrix(m) => Some(m),
            CatalogObject::Polynomial(_) => None,
        }
    }

    /// Canonical text; matrices list the upper triangle entry by entry.
    pub fn canonical_text(&self) -> String {
        match &self.object {
            CatalogObject::Polynomial(p) => to_canonical(p),
            CatalogObject::Matrix(m) => matrix_to_canonical(m),
        }
    }
}

pub fn matrix_to_canonical(m: &PolyMatrix) -> String {
    let mut out = format!("matrix {} {}\n", m.dim(), m.num_vars());
    for i in 0..m.dim() {
        for j in i..m.dim() {
            let _ = writeln!(out, "entry {} {}", i + 1, j + 1);
            out.push_str(&to_canonical(m.get(i, j)));
        }
    }
    out
}

/// Reads the format written by [`matrix_to_canonical`]: a `matrix dim vars`
/// header followed by `entry i j` blocks for the upper triangle. Entries that
/// are left out are zero.
pub fn matrix_from_canonical(text: &str) -> Result<PolyMatrix> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty matrix text".into()))?;
    let dims: Vec<usize> = header
        .strip_prefix("matrix")
        .map(|rest| rest.split_whitespace().filter_map(|t| t.parse().ok()).collect())
        .unwrap_or_default();
    let &[dim, num_vars] = dims.as_slice() else {
        return Err(Error::Parse(format!("bad matrix header `{header}`")));
    };
    let mut blocks: Vec<((usize, usize), String)> = Vec::new();
    for line in lines {
        if let Some(rest) = line.strip_prefix("entry") {
            let idx: Vec<usize> = rest.split_whitespace().filter_map(|t| t.parse().ok()).collect();
            let &[i, j] = idx.as_slice() else {
                return Err(Error::Parse(format!("bad entry line `{line}`")));
            };
            if i == 0 || j == 0 || i > dim || j > dim || i > j {
                return Err(Error::Parse(format!(
                    "entry ({i},{j}) outside the upper triangle of a {dim}x{dim} matrix"
                )));
            }
            blocks.push(((i - 1, j - 1), String::new()));
        } else {
            let (_, body) = blocks
                .last_mut()
                .ok_or_else(|| Error::Parse(format!("text before the first entry: `{line}`")))?;
            body.push_str(line);
            body.push('\n');
        }
    }
    let mut rows = vec![vec![Polynomial::zero(num_vars); dim]; dim];
    for ((i, j), body) in blocks {
        let p = from_canonical(&body)?;
        if p.num_vars() != num_vars {
            return Err(Error::VariableMismatch {
                left: p.num_vars(),
                right: num_vars,
            });
        }
        rows[j][i] = p.clone();
        rows[i][j] = p;
    }
    PolyMatrix::new(rows)
}

pub const NAMES: [&str; 9] = ["motzkin", "robinson", "p38", "q64", "f36", "f26", "h44", "h34", "choi"];

fn infix(vars: usize, text: &str) -> Polynomial {
    parse_infix(text, Some(&default_names(vars)))
        .expect("catalog expressions are well formed")
        .polynomial
}

const MOTZKIN: &str = "x1^4 x2^2 + x1^2 x2^4 - 3 x1^2 x2^2 x3^2 + x3^6";

const ROBINSON: &str = "x1^2 (x1 - x4)^2 + x2^2 (x2 - x4)^2 + x3^2 (x3 - x4)^2 \
    + 2 x1 x2 x3 (x1 + x2 + x3 - 2 x4)";

const P38: &str = "32 x1^8 + 118 x1^6 x2^2 + 40 x1^6 x3^2 + 25 x1^4 x2^4 - 43 x1^4 x2^2 x3^2 \
    - 35 x1^4 x3^4 + 3 x1^2 x2^4 x3^2 - 16 x1^2 x2^2 x3^4 + 24 x1^2 x3^6 + 16 x2^8 \
    + 44 x2^6 x3^2 + 70 x2^4 x3^4 + 60 x2^2 x3^6 + 30 x3^8";

const Q64: &str = "x1^4 + x2^4 + x3^4 + x4^4 + x5^4 + x6^4 \
    + 2 (x1^2 x2^2 + x1^2 x3^2 + x2^2 x3^2 + x4^2 x5^2 + x4^2 x6^2 + x5^2 x6^2) \
    + 1/2 (x1^2 x4^2 + x2^2 x5^2 + x3^2 x6^2) + x1^2 x6^2 + x2^2 x4^2 + x3^2 x5^2 \
    - (x1 x2 x4 x5 + x1 x3 x4 x6 + x2 x3 x5 x6)";

const F36: &str = "77 x1^6 - 155 x1^5 x2 + 445 x1^4 x2^2 + 76 x1^3 x2^3 + 556 x1^2 x2^4 + 68 x1 x2^5 \
    + 240 x2^6 - 9 x1^5 x3 - 1129 x1^3 x2^2 x3 + 62 x1^2 x2^3 x3 + 1206 x1 x2^4 x3 \
    - 343 x2^5 x3 + 363 x1^4 x3^2 + 773 x1^3 x2 x3^2 + 891 x1^2 x2^2 x3^2 - 869 x1 x2^3 x3^2 \
    + 1043 x2^4 x3^2 - 14 x1^3 x3^3 - 1108 x1^2 x2 x3^3 - 216 x1 x2^2 x3^3 - 839 x2^3 x3^3 \
    + 721 x1^2 x3^4 + 436 x1 x2 x3^4 + 378 x2^2 x3^4 + 48 x1 x3^5 - 97 x2 x3^5 + 89 x3^6";

const H44: &str = "1671 x1^4 - 4134 x1^3 x2 - 3332 x1^3 x3 + 5104 x1^2 x2^2 + 4989 x1^2 x2 x3 \
    + 3490 x1^2 x3^2 - 2203 x1 x2^3 - 3030 x1 x2^2 x3 - 3776 x1 x2 x3^2 - 1522 x1 x3^3 \
    + 1227 x2^4 - 595 x2^3 x3 + 1859 x2^2 x3^2 + 1146 x2 x3^3 + 979 x3^4 + 1195728 x4^4 \
    - 1932 x1 x4^3 - 2296 x2 x4^3 - 3144 x3 x4^3 + 1465 x1^2 x4^2 - 1376 x1^3 x4 \
    - 263 x1 x2 x4^2 + 2790 x1^2 x2 x4 + 2121 x2^2 x4^2 - 292 x1 x2^2 x4 - 1224 x2^3 x4 \
    + 2404 x1 x3 x4^2 + 2727 x2 x3 x4^2 - 2852 x1 x3^2 x4 - 388 x2 x3^2 x4 - 1520 x3^3 x4 \
    + 2943 x1^2 x3 x4 - 5053 x1 x2 x3 x4 + 2552 x2^2 x3 x4 + 3512 x3^2 x4^2";

pub fn motzkin() -> Polynomial {
    infix(3, MOTZKIN)
}

pub fn robinson() -> Polynomial {
    infix(4, ROBINSON)
}

/// Convex, not sos-convex ternary octic.
pub fn p38() -> Polynomial {
    infix(3, P38)
}

/// Convex, not sos-convex quartic in six variables.
pub fn q64() -> Polynomial {
    infix(6, Q64)
}

/// Convex, not sos-convex ternary sextic.
pub fn f36() -> Polynomial {
    infix(3, F36)
}

/// `f36(x1, x2, 1 - x2/2)`.
pub fn f26() -> Polynomial {
    let assign = [
        Polynomial::var(2, 0),
        Polynomial::var(2, 1),
        &Polynomial::one(2) - &Polynomial::var(2, 1).scale(&ratio(1, 2)),
    ];
    f36().substitute(&assign).expect("three assignments")
}

/// Convex, not sos-convex quaternary quartic.
pub fn h44() -> Polynomial {
    infix(4, H44)
}

/// `h44(x1, x2, x3, 1)`.
pub fn h34() -> Polynomial {
    h44().dehomogenize(3, &ratio(1, 1)).expect("index in range")
}

/// The Choi biquadratic matrix, PSD everywhere but not an sos-matrix.
pub fn choi() -> PolyMatrix {
    let e = |s: &str| infix(3, s);
    PolyMatrix::new(vec![
        vec![e("x1^2 + 2 x2^2"), e("-x1 x2"), e("-x1 x3")],
        vec![e("-x1 x2"), e("x2^2 + 2 x3^2"), e("-x2 x3")],
        vec![e("-x1 x3"), e("-x2 x3"), e("x3^2 + 2 x1^2")],
    ])
    .expect("symmetric")
}

pub fn catalog(name: &str) -> Result<CatalogEntry> {
    let poly = CatalogObject::Polynomial;
    let (name, object, claims, description) = match name {
        "motzkin" => (
            "motzkin",
            poly(motzkin()),
            "psd, not sos (3 vars, degree 6)",
            "Motzkin form",
        ),
        "robinson" => (
            "robinson",
            poly(robinson()),
            "psd, not sos (4 vars, degree 4)",
            "Robinson form",
        ),
        "p38" => (
            "p38",
            poly(p38()),
            "convex, not sos-convex (3 vars, degree 8)",
            "first known convex but not sos-convex form",
        ),
        "q64" => (
            "q64",
            poly(q64()),
            "convex, not sos-convex (6 vars, degree 4)",
            "quartic built from the Choi biquadratic form",
        ),
        "f36" => (
            "f36",
            poly(f36()),
            "convex, not sos-convex (3 vars, degree 6)",
            "minimal ternary sextic form",
        ),
        "f26" => (
            "f26",
            poly(f26()),
            "convex, not sos-convex polynomial (2 vars, degree 6)",
            "f36 restricted to x3 = 1 - x2/2",
        ),
        "h44" => (
            "h44",
            poly(h44()),
            "convex, not sos-convex (4 vars, degree 4)",
            "minimal quaternary quartic form",
        ),
        "h34" => (
            "h34",
            poly(h34()),
            "convex, not sos-convex polynomial (3 vars, degree 4)",
            "h44 dehomogenized at x4 = 1",
        ),
        "choi" => (
            "choi",
            CatalogObject::Matrix(choi()),
            "psd matrix, not an sos-matrix (3x3, quadratic entries)",
            "Choi biquadratic matrix",
        ),
        other => return Err(Error::UnknownEntry(other.to_string())),
    };
    Ok(CatalogEntry {
        name,
        object,
        claims,
        description,
    })
}

/// Every catalog entry, in a fixed order.
pub fn all_entries() -> Vec<CatalogEntry> {
    NAMES.iter().map(|n| catalog(n).expect("known name")).collect()
}
